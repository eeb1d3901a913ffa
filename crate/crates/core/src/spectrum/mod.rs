//! Characteristic polynomials and band edges of the rational Harper operator.

mod bands;
mod charpoly;
mod dd;
mod hamiltonian;

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

pub use bands::{band_edges, BandSpectrum, Location, SPECTRUM_TOL};
pub use charpoly::{charpoly_coeffs, charpoly_eval, CharPoly};
pub use hamiltonian::{chambers_residual, complex_det, hamiltonian};

use crate::error::Result;
use crate::moebius::Rational;

/// Insert-once memo of band spectra, shared by readers.
#[derive(Debug, Default)]
pub struct SpectrumCache {
    map: RwLock<HashMap<Rational, Arc<BandSpectrum>>>,
}

impl SpectrumCache {
    pub fn new() -> Self {
        Self::default()
    }

    /// Process-wide cache.
    pub fn global() -> &'static SpectrumCache {
        static CACHE: OnceLock<SpectrumCache> = OnceLock::new();
        CACHE.get_or_init(SpectrumCache::new)
    }

    pub fn get(&self, theta: Rational) -> Result<Arc<BandSpectrum>> {
        if let Some(s) = self.map.read().unwrap_or_else(|e| e.into_inner()).get(&theta) {
            return Ok(Arc::clone(s));
        }
        let fresh = Arc::new(band_edges(theta)?);
        let mut w = self.map.write().unwrap_or_else(|e| e.into_inner());
        Ok(Arc::clone(w.entry(theta).or_insert(fresh)))
    }

    pub fn len(&self) -> usize {
        self.map.read().unwrap_or_else(|e| e.into_inner()).len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Band spectrum through the global cache.
pub fn spectrum(theta: Rational) -> Result<Arc<BandSpectrum>> {
    SpectrumCache::global().get(theta)
}
