use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::moebius::ProjMat;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Letter {
    A,
    B,
}

impl Letter {
    pub fn matrix(self) -> ProjMat {
        match self {
            Letter::A => ProjMat::A,
            Letter::B => ProjMat::B,
        }
    }
}

/// A word over `{A, B}`; the leftmost letter is the leftmost matrix factor.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct GeneratorWord {
    letters: Vec<Letter>,
}

impl GeneratorWord {
    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    fn push_a(&mut self, n: i64) {
        self.letters.extend(std::iter::repeat_n(Letter::A, n as usize));
    }

    fn push_b(&mut self) {
        self.letters.push(Letter::B);
    }

    /// Multiplies the word out, left to right.
    pub fn product(&self) -> Result<ProjMat> {
        self.letters
            .iter()
            .try_fold(ProjMat::IDENTITY, |acc, l| acc.checked_mul(&l.matrix()))
    }
}

impl fmt::Display for GeneratorWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.letters {
            f.write_str(match l {
                Letter::A => "A",
                Letter::B => "B",
            })?;
        }
        Ok(())
    }
}

impl FromStr for GeneratorWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let letters = s
            .trim()
            .chars()
            .map(|ch| match ch {
                'A' | 'a' => Ok(Letter::A),
                'B' | 'b' => Ok(Letter::B),
                _ => Err(Error::Parse { what: "generator word", input: s.to_string() }),
            })
            .collect::<Result<_>>()?;
        Ok(GeneratorWord { letters })
    }
}

/// Factors a semigroup member into the generators `A`, `B`.
///
/// With `b = 0` the matrix is `A^c`. Otherwise the Euclidean algorithm on
/// `(d, b)` peels factors `[[0,1],[1,q]] = A^(q-1)·B·A` until a lower
/// triangular remainder `[[±1,0],[c,1]]` is left; a `-1` corner is absorbed
/// into the last quotient factor as `(A^(q-2)·B·A)·(B·A^c)`.
///
/// Some members (`B` itself, or `theta -> (1 - theta)/(2 - theta)`) leave a
/// remainder with `c < 0`. Those are factored through `M·B`, `B·M` or
/// `B·M·B`, which are members as well, and the `B` is put back on the word.
pub fn factor_word(m: &ProjMat) -> Result<GeneratorWord> {
    if !m.in_semigroup() {
        return Err(Error::NotInSemigroup(*m));
    }
    let b = ProjMat::B;
    let tries: [(bool, bool); 4] = [(false, false), (false, true), (true, false), (true, true)];
    for (pre, post) in tries {
        let mut inner = *m;
        if pre {
            inner = b.checked_mul(&inner)?;
        }
        if post {
            inner = inner.checked_mul(&b)?;
        }
        if let Some(core) = euclid_word(&inner) {
            let mut word = GeneratorWord::default();
            if pre {
                word.push_b();
            }
            word.letters.extend(core.letters);
            if post {
                word.push_b();
            }
            if word.product()? == *m {
                return Ok(word);
            }
        }
    }
    Err(Error::Numerical(format!("no generator word found for {m}")))
}

fn euclid_word(m: &ProjMat) -> Option<GeneratorWord> {
    let (a, b, c, d) = m.oriented();
    let mut word = GeneratorWord::default();
    if b == 0 {
        if a != 1 || d != 1 || c < 0 {
            return None;
        }
        word.push_a(c);
        return Some(word);
    }
    if !(0 < b && b <= d) {
        return None;
    }

    // remainder [[ra, rb], [rc, rd]]
    let (mut ra, mut rb, mut rc, mut rd) = (a as i128, b as i128, c as i128, d as i128);
    let mut quotients = Vec::new();
    while rb != 0 {
        let qj = rd / rb;
        quotients.push(qj);
        // [[0,1],[1,q]]^-1 = [[-q,1],[1,0]]
        (ra, rb, rc, rd) = (rc - qj * ra, rd - qj * rb, ra, rb);
    }
    // [[ra, 0], [rc, 1]] with ra = ±1
    if rd != 1 || (ra != 1 && ra != -1) || rc < 0 {
        return None;
    }
    let last = quotients.len() - 1;
    for (j, &qj) in quotients.iter().enumerate() {
        if j == last && ra == -1 {
            if qj < 2 {
                return None;
            }
            word.push_a((qj - 2) as i64);
            word.push_b();
            word.push_a(1);
            word.push_b();
            word.push_a(rc as i64);
        } else {
            word.push_a((qj - 1) as i64);
            word.push_b();
            word.push_a(1);
        }
    }
    if ra == 1 {
        word.push_a(rc as i64);
    }
    Some(word)
}
