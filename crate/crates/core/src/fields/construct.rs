use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{helical_basis, Helicity, SpectralScalar, SpectralVectorField};
use crate::error::{Error, Result};
use crate::grid::{enumerate_wavevectors, GridSpec, WaveVector};

/// Arnold–Beltrami–Childress field
/// `V = (A sin x₃ + C cos x₂, B sin x₁ + A cos x₃, C sin x₂ + B cos x₁)`,
/// a curl eigenfield with eigenvalue 1.
pub fn abc_field(grid: GridSpec, a: f64, b: f64, c: f64) -> SpectralVectorField {
    let z = Complex64::new(0.0, 0.0);
    let re = |v: f64| Complex64::new(v / 2.0, 0.0);
    let sin = |v: f64| Complex64::new(0.0, -v / 2.0);
    let mut out = SpectralVectorField::zeros(grid);
    let modes = [
        (WaveVector::new(1, 0, 0), [z, sin(b), re(b)]),
        (WaveVector::new(0, 1, 0), [re(c), z, sin(c)]),
        (WaveVector::new(0, 0, 1), [sin(a), re(a), z]),
    ];
    for (k, v) in modes {
        out.set_mode(k, v)
            .expect("|k| = 1 fits every supported grid");
    }
    out
}

/// Spatially constant field; purely harmonic, so not exact.
pub fn constant_field(grid: GridSpec, v: [f64; 3]) -> SpectralVectorField {
    let mut out = SpectralVectorField::zeros(grid);
    out.set(0, v.map(|c| Complex64::new(c, 0.0)));
    out
}

/// Real helical mode `amplitude · h_s(k) e^{ik·x} + c.c.`.
pub fn helical_mode(
    grid: GridSpec,
    k: WaveVector,
    s: Helicity,
    amplitude: f64,
) -> Result<SpectralVectorField> {
    if k.is_zero() {
        return Err(Error::invalid("helical modes need k != 0"));
    }
    if !grid.is_retained(&k) {
        return Err(Error::invalid(format!(
            "{k:?} lies outside the dealias mask (cutoff {})",
            grid.dealias_cutoff()
        )));
    }
    let h = helical_basis(k, s);
    let mut out = SpectralVectorField::zeros(grid);
    out.set_mode(k, h.map(|c| c * amplitude))?;
    Ok(out)
}

fn gaussian(rng: &mut ChaCha8Rng) -> Complex64 {
    // unit variance: E|a|² = 1
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Seeded random exact divergence-free field supported on
/// `0 < max_j |k_j| ≤ kband`, with independent unit-variance complex
/// Gaussian helical amplitudes scaled by `amplitude`.
pub fn random_exact_field(
    grid: GridSpec,
    seed: u64,
    kband: usize,
    amplitude: f64,
) -> Result<SpectralVectorField> {
    if kband == 0 || kband as i64 > grid.dealias_cutoff() {
        return Err(Error::invalid(format!(
            "kband {kband} must lie in 1..={} for n = {}",
            grid.dealias_cutoff(),
            grid.n()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = SpectralVectorField::zeros(grid);
    for k in enumerate_wavevectors(&grid, kband)? {
        // one draw per {k, -k} pair; -k follows from reality
        if k <= WaveVector::ZERO {
            continue;
        }
        let ap = gaussian(&mut rng);
        let am = gaussian(&mut rng);
        let hp = helical_basis(k, Helicity::Plus);
        let hm = helical_basis(k, Helicity::Minus);
        let v = std::array::from_fn(|j| (ap * hp[j] + am * hm[j]) * amplitude);
        out.set_mode(k, v)?;
    }
    Ok(out)
}

/// Seeded random Beltrami field: random amplitudes on every `k` with
/// `|k|² = shell_sq`, all of helicity `s`, so `curl X = s·√shell_sq · X`.
pub fn random_beltrami_field(
    grid: GridSpec,
    seed: u64,
    shell_sq: i64,
    s: Helicity,
    amplitude: f64,
) -> Result<SpectralVectorField> {
    let kmax = (shell_sq.max(0) as f64).sqrt().floor() as usize;
    if shell_sq <= 0 || kmax as i64 > grid.dealias_cutoff() {
        return Err(Error::invalid(format!(
            "shell |k|^2 = {shell_sq} not available below the dealias cutoff"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = SpectralVectorField::zeros(grid);
    let mut any = false;
    for k in enumerate_wavevectors(&grid, kmax)? {
        if k <= WaveVector::ZERO || k.norm_sq() != shell_sq {
            continue;
        }
        let a = gaussian(&mut rng) * amplitude;
        out.set_mode(k, helical_basis(k, s).map(|c| c * a))?;
        any = true;
    }
    if !any {
        return Err(Error::invalid(format!(
            "no lattice vector has |k|^2 = {shell_sq}"
        )));
    }
    Ok(out)
}

/// Seeded random real scalar field on `0 < max_j |k_j| ≤ kband`; its
/// gradient is a convenient compressible test field.
pub fn random_scalar_field(grid: GridSpec, seed: u64, kband: usize) -> Result<SpectralScalar> {
    if kband == 0 || kband as i64 > grid.dealias_cutoff() {
        return Err(Error::invalid(format!(
            "kband {kband} must lie in 1..={} for n = {}",
            grid.dealias_cutoff(),
            grid.n()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut terms = Vec::new();
    for k in enumerate_wavevectors(&grid, kband)? {
        if k <= WaveVector::ZERO {
            continue;
        }
        let a = gaussian(&mut rng);
        terms.push((k, 2.0 * a.norm(), a.arg()));
    }
    SpectralScalar::from_cosines(grid, &terms)
}
