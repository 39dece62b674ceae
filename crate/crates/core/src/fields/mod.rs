//! Real vector fields on the torus held as Fourier coefficients, together
//! with their constructors, projections and the helical decomposition.

mod construct;
mod helical;
mod hodge;

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{self, GridSpec, WaveVector};

pub use construct::{
    abc_field, constant_field, helical_mode, random_beltrami_field, random_exact_field,
    random_scalar_field,
};
pub use helical::{helical_basis, helical_decompose, HelicalCoefficients, Helicity};
pub use hodge::{hodge_decompose, leray_project, HodgeParts};

/// Relative tolerance used when an operator requires an exact
/// divergence-free input.
pub const EXACTNESS_TOL: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// A real vector field stored as three complex coefficient arrays.
///
/// The same value type represents velocity fields, 1-form proxies `ω_X` and
/// 2-form proxies `i_X μ`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralVectorField {
    grid: GridSpec,
    comps: [Vec<Complex64>; 3],
}

impl SpectralVectorField {
    pub fn zeros(grid: GridSpec) -> Self {
        let len = grid.len();
        Self {
            grid,
            comps: [vec![ZERO; len], vec![ZERO; len], vec![ZERO; len]],
        }
    }

    pub fn from_coeffs(grid: GridSpec, comps: [Vec<Complex64>; 3]) -> Result<Self> {
        if comps.iter().any(|c| c.len() != grid.len()) {
            return Err(Error::invalid(format!(
                "each component needs {} coefficients",
                grid.len()
            )));
        }
        Ok(Self { grid, comps })
    }

    /// Transforms physical samples (layout as in [`crate::grid`]). Nyquist
    /// modes are discarded.
    pub fn from_samples(grid: GridSpec, samples: [&[f64]; 3]) -> Result<Self> {
        let mut out = Self::zeros(grid);
        for (j, s) in samples.iter().enumerate() {
            out.comps[j] = grid::transform_forward(&grid, s)?;
        }
        out.drop_nyquist();
        Ok(out)
    }

    pub fn to_samples(&self) -> [Vec<f64>; 3] {
        let g = &self.grid;
        let (a, b) = grid::transform_inverse_pair(g, &self.comps[0], &self.comps[1]);
        let c = grid::transform_inverse(g, &self.comps[2]).expect("length checked");
        [a, b, c]
    }

    /// Samples back to coefficients, then applies the dealias mask.
    pub(crate) fn from_products(grid: GridSpec, samples: [Vec<f64>; 3]) -> Self {
        let (a, b) = grid::transform_forward_pair(&grid, &samples[0], &samples[1]);
        let c = grid::transform_forward(&grid, &samples[2]).expect("length checked");
        let mut comps = [a, b, c];
        for c in comps.iter_mut() {
            grid::dealias_in_place(&grid, c);
        }
        Self { grid, comps }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn component(&self, j: usize) -> &[Complex64] {
        &self.comps[j]
    }

    pub fn components(&self) -> &[Vec<Complex64>; 3] {
        &self.comps
    }

    /// Coefficient vector `X̂(k)`, if `k` is representable on the grid.
    pub fn coeff(&self, k: WaveVector) -> Option<[Complex64; 3]> {
        let i = self.grid.flat_index(k.components())?;
        Some(self.at(i))
    }

    pub(crate) fn at(&self, flat: usize) -> [Complex64; 3] {
        [
            self.comps[0][flat],
            self.comps[1][flat],
            self.comps[2][flat],
        ]
    }

    pub(crate) fn set(&mut self, flat: usize, v: [Complex64; 3]) {
        for j in 0..3 {
            self.comps[j][flat] = v[j];
        }
    }

    /// Sets `X̂(k) = v` and `X̂(−k) = conj(v)` so the field stays real.
    pub fn set_mode(&mut self, k: WaveVector, v: [Complex64; 3]) -> Result<()> {
        let (Some(p), Some(m)) = (
            self.grid.flat_index(k.components()),
            self.grid.flat_index(k.neg().components()),
        ) else {
            return Err(Error::invalid(format!(
                "{k:?} not representable on the grid"
            )));
        };
        if self.grid.is_nyquist(&k) {
            return Err(Error::invalid(format!("{k:?} lies on the Nyquist plane")));
        }
        if k.is_zero() && v.iter().any(|c| c.im != 0.0) {
            return Err(Error::invalid("mean mode must be real"));
        }
        self.set(p, v);
        self.set(m, [v[0].conj(), v[1].conj(), v[2].conj()]);
        Ok(())
    }

    /// Mean value, i.e. the `k = 0` coefficient.
    pub fn mean(&self) -> [f64; 3] {
        let c = self.at(0);
        [c[0].re, c[1].re, c[2].re]
    }

    /// Builds a new field by mapping each coefficient vector.
    pub fn map_modes<F>(&self, mut f: F) -> Self
    where
        F: FnMut(WaveVector, [Complex64; 3]) -> [Complex64; 3],
    {
        let mut out = Self::zeros(self.grid);
        for (flat, k) in self.grid.modes() {
            out.set(flat, f(k, self.at(flat)));
        }
        out
    }

    pub fn dealiased(&self) -> Self {
        let mut out = self.clone();
        for c in out.comps.iter_mut() {
            grid::dealias_in_place(&self.grid, c);
        }
        out
    }

    fn drop_nyquist(&mut self) {
        let g = self.grid;
        for (flat, k) in g.modes() {
            if g.is_nyquist(&k) {
                self.set(flat, [ZERO; 3]);
            }
        }
    }

    pub fn scaled(&self, a: f64) -> Self {
        let mut out = self.clone();
        out.comps
            .iter_mut()
            .flat_map(|c| c.iter_mut())
            .for_each(|z| *z *= a);
        out
    }

    /// `self += a · other`.
    pub fn axpy(&mut self, a: f64, other: &Self) -> Result<()> {
        self.grid.check_same(&other.grid)?;
        for (dst, src) in self.comps.iter_mut().zip(&other.comps) {
            for (d, s) in dst.iter_mut().zip(src) {
                *d += s * a;
            }
        }
        Ok(())
    }

    /// Largest coefficient modulus over all components.
    pub fn max_abs_coeff(&self) -> f64 {
        self.comps
            .iter()
            .flat_map(|c| c.iter())
            .fold(0.0f64, |m, z| m.max(z.norm_sqr()))
            .sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.comps
            .iter()
            .flat_map(|c| c.iter())
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// `max_k |k·X̂(k)| / max_k |k||X̂(k)|`, zero for the zero field.
    pub fn divergence_residual(&self) -> f64 {
        let mut num = 0.0f64;
        let mut den = 0.0f64;
        for (flat, k) in self.grid.modes() {
            let kf = k.as_f64();
            let v = self.at(flat);
            let d = v[0] * kf[0] + v[1] * kf[1] + v[2] * kf[2];
            num = num.max(d.norm_sqr());
            let mag = v[0].norm_sqr() + v[1].norm_sqr() + v[2].norm_sqr();
            den = den.max(k.norm_sq() as f64 * mag);
        }
        if den == 0.0 {
            0.0
        } else {
            (num / den).sqrt()
        }
    }

    /// Pointwise maximum of `|div X|` on the grid.
    pub fn max_divergence(&self) -> f64 {
        divergence(self)
            .to_samples()
            .iter()
            .fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `max_k |X̂(−k) − conj X̂(k)|`.
    pub fn reality_defect(&self) -> f64 {
        let g = self.grid;
        let mut worst = 0.0f64;
        for (flat, k) in g.modes() {
            if g.is_nyquist(&k) {
                continue;
            }
            let neg = g
                .flat_index(k.neg().components())
                .expect("non-Nyquist mode");
            for j in 0..3 {
                worst = worst.max((self.comps[j][neg] - self.comps[j][flat].conj()).norm());
            }
        }
        worst
    }

    /// Checks that the field is an exact divergence-free field (zero mean,
    /// `k·X̂(k) = 0`) up to [`EXACTNESS_TOL`].
    pub fn ensure_exact(&self, what: &str) -> Result<()> {
        let scale = self.max_abs_coeff();
        if scale == 0.0 {
            return Ok(());
        }
        let mean = self.at(0).iter().fold(0.0f64, |m, z| m.max(z.norm()));
        if mean > EXACTNESS_TOL * scale {
            return Err(Error::domain(format!(
                "{what}: nonzero mean mode ({mean:.3e}) has no preimage under curl"
            )));
        }
        self.ensure_divergence_free(what)
    }

    pub fn ensure_divergence_free(&self, what: &str) -> Result<()> {
        let div = self.divergence_residual();
        if div > EXACTNESS_TOL {
            return Err(Error::domain(format!(
                "{what}: divergence residual {div:.3e} exceeds {EXACTNESS_TOL:e}"
            )));
        }
        Ok(())
    }

    pub fn is_exact(&self) -> bool {
        self.ensure_exact("field").is_ok()
    }
}

impl Add for &SpectralVectorField {
    type Output = SpectralVectorField;
    fn add(self, rhs: Self) -> SpectralVectorField {
        let mut out = self.clone();
        out.axpy(1.0, rhs).expect("grid mismatch in addition");
        out
    }
}

impl Sub for &SpectralVectorField {
    type Output = SpectralVectorField;
    fn sub(self, rhs: Self) -> SpectralVectorField {
        let mut out = self.clone();
        out.axpy(-1.0, rhs).expect("grid mismatch in subtraction");
        out
    }
}

impl Neg for &SpectralVectorField {
    type Output = SpectralVectorField;
    fn neg(self) -> SpectralVectorField {
        self.scaled(-1.0)
    }
}

impl Mul<&SpectralVectorField> for f64 {
    type Output = SpectralVectorField;
    fn mul(self, rhs: &SpectralVectorField) -> SpectralVectorField {
        rhs.scaled(self)
    }
}

/// A real scalar field stored as Fourier coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralScalar {
    grid: GridSpec,
    coeffs: Vec<Complex64>,
}

impl SpectralScalar {
    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            grid,
            coeffs: vec![ZERO; grid.len()],
        }
    }

    pub fn from_samples(grid: GridSpec, samples: &[f64]) -> Result<Self> {
        let mut coeffs = grid::transform_forward(&grid, samples)?;
        for (flat, k) in grid.modes() {
            if grid.is_nyquist(&k) {
                coeffs[flat] = ZERO;
            }
        }
        Ok(Self { grid, coeffs })
    }

    /// Real scalar field `Σ amplitude·cos(k·x + phase)` built from terms
    /// `(k, amplitude, phase)`.
    pub fn from_cosines(grid: GridSpec, terms: &[(WaveVector, f64, f64)]) -> Result<Self> {
        let mut out = Self::zeros(grid);
        for &(k, amp, phase) in terms {
            if grid.is_nyquist(&k) {
                return Err(Error::invalid(format!("{k:?} lies on the Nyquist plane")));
            }
            let half = Complex64::from_polar(0.5 * amp, phase);
            let p = grid
                .flat_index(k.components())
                .ok_or_else(|| Error::invalid(format!("{k:?} not representable")))?;
            if k.is_zero() {
                out.coeffs[p] += Complex64::new(amp * phase.cos(), 0.0);
                continue;
            }
            let m = grid
                .flat_index(k.neg().components())
                .expect("symmetric range");
            out.coeffs[p] += half;
            out.coeffs[m] += half.conj();
        }
        Ok(out)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn to_samples(&self) -> Vec<f64> {
        grid::transform_inverse(&self.grid, &self.coeffs).expect("length checked")
    }

    /// `grad φ`, spectrally: `ik φ̂(k)`.
    pub fn gradient(&self) -> SpectralVectorField {
        let mut out = SpectralVectorField::zeros(self.grid);
        for (flat, k) in self.grid.modes() {
            let ik = Complex64::new(0.0, 1.0) * self.coeffs[flat];
            let kf = k.as_f64();
            out.set(flat, [ik * kf[0], ik * kf[1], ik * kf[2]]);
        }
        out
    }
}

/// Spectral divergence `i k·X̂(k)`.
pub fn divergence(x: &SpectralVectorField) -> SpectralScalar {
    let g = *x.grid();
    let mut out = SpectralScalar::zeros(g);
    for (flat, k) in g.modes() {
        let kf = k.as_f64();
        let v = x.at(flat);
        out.coeffs[flat] = Complex64::new(0.0, 1.0) * (v[0] * kf[0] + v[1] * kf[1] + v[2] * kf[2]);
    }
    out
}

/// Pointwise product of two scalars, dealiased.
pub(crate) fn scalar_from_product(grid: GridSpec, samples: Vec<f64>) -> SpectralScalar {
    let mut coeffs = grid::transform_forward(&grid, &samples).expect("length checked");
    grid::dealias_in_place(&grid, &mut coeffs);
    SpectralScalar { grid, coeffs }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gradient_of_sine_is_cosine() {
        let g = GridSpec::new(8).unwrap();
        let phi = SpectralScalar::from_cosines(
            g,
            &[(WaveVector::new(1, 0, 0), 1.0, -std::f64::consts::FRAC_PI_2)],
        )
        .unwrap();
        let grad = phi.gradient();
        let c = grad.coeff(WaveVector::new(1, 0, 0)).unwrap();
        assert!((c[0] - Complex64::new(0.5, 0.0)).norm() < 1e-15);
        assert!(divergence(&grad).coeffs().iter().any(|z| z.norm() > 0.1));
    }

    #[test]
    fn set_mode_keeps_field_real() {
        let g = GridSpec::new(8).unwrap();
        let mut f = SpectralVectorField::zeros(g);
        let v = [
            Complex64::new(1.0, 2.0),
            Complex64::new(0.0, -1.0),
            Complex64::new(3.0, 0.5),
        ];
        f.set_mode(WaveVector::new(1, -2, 3), v).unwrap();
        assert_eq!(f.reality_defect(), 0.0);
        assert!(f.set_mode(WaveVector::new(4, 0, 0), v).is_err());
        assert!(f.set_mode(WaveVector::ZERO, v).is_err());
    }

    #[test]
    fn samples_round_trip() {
        let g = GridSpec::new(8).unwrap();
        let f = random_exact_field(g, 3, 2, 1.0).unwrap();
        let s = f.to_samples();
        let back = SpectralVectorField::from_samples(g, [&s[0], &s[1], &s[2]]).unwrap();
        assert!((&back - &f).max_abs_coeff() < 1e-14);
    }

    #[test]
    fn arithmetic() {
        let g = GridSpec::new(8).unwrap();
        let a = random_exact_field(g, 1, 2, 1.0).unwrap();
        let b = random_exact_field(g, 2, 2, 1.0).unwrap();
        let s = &(&a + &b) - &b;
        assert!((&s - &a).max_abs_coeff() < 1e-15);
        assert_eq!(&(-&a) + &a, SpectralVectorField::zeros(g));
        assert_eq!(2.0 * &a, a.scaled(2.0));
    }
}
