use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use super::{leray_project, SpectralVectorField, ZERO};
use crate::grid::{GridSpec, WaveVector};

/// Sign of a curl eigenvalue: `curl(h_s(k) e^{ik·x}) = s|k| h_s(k) e^{ik·x}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Helicity {
    Plus,
    Minus,
}

impl Helicity {
    pub const BOTH: [Helicity; 2] = [Helicity::Plus, Helicity::Minus];

    pub fn sign(self) -> f64 {
        match self {
            Helicity::Plus => 1.0,
            Helicity::Minus => -1.0,
        }
    }
}

impl std::str::FromStr for Helicity {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "+" | "plus" | "+1" | "1" => Ok(Helicity::Plus),
            "-" | "minus" | "-1" => Ok(Helicity::Minus),
            other => Err(format!("unknown helicity sign {other:?}")),
        }
    }
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn normalized(v: [f64; 3]) -> [f64; 3] {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    [v[0] / n, v[1] / n, v[2] / n]
}

/// Real orthonormal frame `(e₁, e₂)` transverse to `k ≠ 0`:
/// `e₁ = k×ẑ/|k×ẑ|` (with `x̂` in place of `ẑ` when `k ∥ ẑ`), `e₂ = k̂×e₁`.
pub fn helical_frame(k: WaveVector) -> ([f64; 3], [f64; 3]) {
    assert!(!k.is_zero(), "helical frame undefined at k = 0");
    let kc = k.components();
    let axis = if kc[0] == 0 && kc[1] == 0 {
        [1.0, 0.0, 0.0]
    } else {
        [0.0, 0.0, 1.0]
    };
    let kf = k.as_f64();
    let e1 = normalized(cross(kf, axis));
    let e2 = cross(normalized(kf), e1);
    (e1, e2)
}

/// Helical basis vector `h_s(k) = (e₁ + i s e₂)/√2`.
pub fn helical_basis(k: WaveVector, s: Helicity) -> [Complex64; 3] {
    let (e1, e2) = helical_frame(k);
    let sg = s.sign();
    std::array::from_fn(|j| Complex64::new(e1[j], sg * e2[j]) * FRAC_1_SQRT_2)
}

/// Amplitudes `a₊(k)`, `a₋(k)` of a field in the curl eigenbasis, stored in
/// the grid's flat coefficient layout (the `k = 0` and Nyquist slots stay 0).
#[derive(Debug, Clone, PartialEq)]
pub struct HelicalCoefficients {
    grid: GridSpec,
    plus: Vec<Complex64>,
    minus: Vec<Complex64>,
}

impl HelicalCoefficients {
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn amplitude(&self, k: WaveVector, s: Helicity) -> Option<Complex64> {
        let i = self.grid.flat_index(k.components())?;
        Some(self.slot(s)[i])
    }

    pub fn amplitudes(&self, s: Helicity) -> &[Complex64] {
        self.slot(s)
    }

    fn slot(&self, s: Helicity) -> &Vec<Complex64> {
        match s {
            Helicity::Plus => &self.plus,
            Helicity::Minus => &self.minus,
        }
    }

    /// Applies `a_s(k) ↦ f(k, s) a_s(k)`.
    pub fn scale_by<F>(&self, mut f: F) -> Self
    where
        F: FnMut(WaveVector, Helicity) -> f64,
    {
        let mut out = self.clone();
        for (flat, k) in self.grid.modes() {
            if k.is_zero() {
                continue;
            }
            out.plus[flat] *= f(k, Helicity::Plus);
            out.minus[flat] *= f(k, Helicity::Minus);
        }
        out
    }

    /// `X̂(k) = a₊(k) h₊(k) + a₋(k) h₋(k)`.
    pub fn reconstruct(&self) -> SpectralVectorField {
        let mut out = SpectralVectorField::zeros(self.grid);
        for (flat, k) in self.grid.modes() {
            if k.is_zero() || self.grid.is_nyquist(&k) {
                continue;
            }
            let hp = helical_basis(k, Helicity::Plus);
            let hm = helical_basis(k, Helicity::Minus);
            let (ap, am) = (self.plus[flat], self.minus[flat]);
            out.set(flat, std::array::from_fn(|j| ap * hp[j] + am * hm[j]));
        }
        out
    }

    /// Total `Σ_k |a_s(k)|²` per sign.
    pub fn energy_split(&self) -> (f64, f64) {
        let sum = |v: &[Complex64]| v.iter().map(|z| z.norm_sqr()).sum::<f64>();
        (sum(&self.plus), sum(&self.minus))
    }
}

/// Projects the exact divergence-free part of `x` onto the helical basis,
/// `a_s(k) = h_s(k)*·X̂(k)`.
pub fn helical_decompose(x: &SpectralVectorField) -> HelicalCoefficients {
    let x = leray_project(x);
    let g = *x.grid();
    let mut plus = vec![ZERO; g.len()];
    let mut minus = vec![ZERO; g.len()];
    for (flat, k) in g.modes() {
        if k.is_zero() || g.is_nyquist(&k) {
            continue;
        }
        let v = x.at(flat);
        let dot = |h: [Complex64; 3]| (0..3).map(|j| h[j].conj() * v[j]).sum::<Complex64>();
        plus[flat] = dot(helical_basis(k, Helicity::Plus));
        minus[flat] = dot(helical_basis(k, Helicity::Minus));
    }
    HelicalCoefficients {
        grid: g,
        plus,
        minus,
    }
}
