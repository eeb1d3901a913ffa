use atlas_core::render::{butterfly_rows, overlay_rows, render_similarity_overlay, RenderConfig};
use atlas_core::similarity::{Sign, Similarity};
use atlas_core::ProjMat;

fn round_trip(sim: Similarity, qmax: u32) {
    let src = butterfly_rows(qmax).unwrap();
    let img = overlay_rows(&sim, qmax).unwrap();
    assert_eq!(src.rows.len(), img.rows.len());
    for row in &src.rows {
        let target = sim.target(row.theta).unwrap().theta;
        let out = img.rows.iter().find(|r| r.theta == target).expect("image row");
        let offset = sim.offset(row.theta).unwrap();
        for (k, (&(lo, hi), &(a, b))) in row.bands.iter().zip(&out.bands).enumerate() {
            let k_out = offset + k + 1;
            let (x, kb) = sim.pull_back(row.theta, k_out, a).unwrap();
            assert_eq!(kb, k + 1);
            assert!((x - lo).abs() < 1e-6, "{sim} at {}: {x} vs {lo}", row.theta);
            let (x, _) = sim.pull_back(row.theta, k_out, b).unwrap();
            assert!((x - hi).abs() < 1e-6, "{sim} at {}: {x} vs {hi}", row.theta);
        }
    }
}

#[test]
fn overlay_endpoints_pull_back() {
    round_trip(Similarity::new(ProjMat::new(1, 0, 2, 1).unwrap(), 1, Sign::Plus).unwrap(), 10);
    round_trip(Similarity::new(ProjMat::B, 0, Sign::Plus).unwrap(), 10);
    round_trip(Similarity::new(ProjMat::new(0, 1, -1, 3).unwrap(), 1, Sign::Minus).unwrap(), 8);
}

#[test]
fn overlay_svg_has_both_layers() {
    let sim = Similarity::new(ProjMat::A, 1, Sign::Plus).unwrap();
    let cfg = RenderConfig { qmax: 6, width: 300, height: 300, ..RenderConfig::default() };
    let svg = render_similarity_overlay(&sim, &cfg).unwrap();
    assert_eq!(svg, render_similarity_overlay(&sim, &cfg).unwrap());
    let bands: usize = butterfly_rows(6).unwrap().rows.iter().map(|r| r.bands.len()).sum();
    assert_eq!(svg.matches("<line").count(), 2 * bands);
    assert!(svg.contains("<g id=\"spectrum\"") && svg.contains("<g id=\"image\""));
}

#[test]
fn parallel_sweep_matches_sequential() {
    let rows = butterfly_rows(16).unwrap().rows;
    let thetas = atlas_core::moebius::farey(16);
    assert_eq!(rows.len(), thetas.len());
    for (row, theta) in rows.iter().zip(thetas) {
        assert_eq!(row.theta, theta);
        let spec = atlas_core::spectrum::band_edges(theta).unwrap();
        assert_eq!(row.bands, spec.bands().collect::<Vec<_>>());
    }
}
