//! Bilinear forms on fields and spectral invariants.
//!
//! `(X, Y)` is the L² product `∫ g(X, Y) dμ`; `⟨X, Y⟩ = (X, curl⁻¹ Y)` is
//! the bi-invariant (indefinite) form on exact divergence-free fields.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::fields::SpectralVectorField;
use crate::grid::{enumerate_wavevectors, GridSpec};
use crate::operators::{cross, curl, curl_inv, lie_bracket, relative_residual};

/// `(X, Y) = (2π)³ Re Σ_k X̂(k)·conj Ŷ(k)`.
pub fn l2_inner(x: &SpectralVectorField, y: &SpectralVectorField) -> Result<f64> {
    x.grid().check_same(y.grid())?;
    let mut sum = 0.0;
    for j in 0..3 {
        sum += x
            .component(j)
            .iter()
            .zip(y.component(j))
            .map(|(a, b)| a.re * b.re + a.im * b.im)
            .sum::<f64>();
    }
    Ok(x.grid().volume() * sum)
}

pub fn l2_norm(x: &SpectralVectorField) -> f64 {
    l2_inner(x, x).expect("same grid").sqrt()
}

/// `⟨X, Y⟩` together with its Cauchy–Schwarz bound `‖X‖ ‖curl⁻¹ Y‖`, the
/// scale used to normalize invariance residuals.
pub fn biinvariant_form_bounded(
    x: &SpectralVectorField,
    y: &SpectralVectorField,
) -> Result<(f64, f64)> {
    x.ensure_exact("biinvariant_form (X)")?;
    let v = curl_inv(y)?;
    Ok((l2_inner(x, &v)?, l2_norm(x) * l2_norm(&v)))
}

/// `⟨X, Y⟩ = ∫ g(X, curl⁻¹ Y) dμ`.
pub fn biinvariant_form(x: &SpectralVectorField, y: &SpectralVectorField) -> Result<f64> {
    x.ensure_exact("biinvariant_form (X)")?;
    l2_inner(x, &curl_inv(y)?)
}

/// `Q(i_X μ, i_Y μ) = (i_X μ, A⁻¹ i_Y μ)`, evaluated on the vector proxies
/// of the exact 2-forms. Coincides with [`biinvariant_form`].
pub fn q_form(x: &SpectralVectorField, y: &SpectralVectorField) -> Result<f64> {
    biinvariant_form(x, y)
}

/// Invariance of `Q` under the Lie derivative along an arbitrary (possibly
/// compressible) `X`: `⟨curl(Y×X), Z⟩ + ⟨Y, curl(Z×X)⟩ = 0`.
pub fn d0_invariance_residual(
    x: &SpectralVectorField,
    y: &SpectralVectorField,
    z: &SpectralVectorField,
) -> Result<f64> {
    y.ensure_exact("d0_invariance_residual (Y)")?;
    z.ensure_exact("d0_invariance_residual (Z)")?;
    let ly = curl(&cross(y, x)?);
    let lz = curl(&cross(z, x)?);
    let (a, sa) = biinvariant_form_bounded(&ly, z)?;
    let (b, sb) = biinvariant_form_bounded(y, &lz)?;
    Ok(relative_residual(a + b, &[sa, sb]))
}

/// Ad-invariance `⟨[X,Y], Z⟩ + ⟨Y, [X,Z]⟩ = 0`.
pub fn adjoint_invariance_residual(
    x: &SpectralVectorField,
    y: &SpectralVectorField,
    z: &SpectralVectorField,
) -> Result<f64> {
    let (a, sa) = biinvariant_form_bounded(&lie_bracket(x, y)?, z)?;
    let (b, sb) = biinvariant_form_bounded(y, &lie_bracket(x, z)?)?;
    Ok(relative_residual(a + b, &[sa, sb]))
}

/// `|⟨X,Y⟩ − ⟨Y,X⟩|` relative to the larger of the two.
pub fn symmetry_residual(x: &SpectralVectorField, y: &SpectralVectorField) -> Result<f64> {
    let (a, sa) = biinvariant_form_bounded(x, y)?;
    let (b, sb) = biinvariant_form_bounded(y, x)?;
    Ok(relative_residual(a - b, &[sa, sb]))
}

/// Kinetic energy `½ (V, V)`.
pub fn energy(v: &SpectralVectorField) -> f64 {
    0.5 * l2_inner(v, v).expect("same grid")
}

/// Helicity (kinetic moment) `(curl V, V)`.
pub fn helicity(v: &SpectralVectorField) -> Result<f64> {
    v.ensure_exact("helicity")?;
    l2_inner(&curl(v), v)
}

/// One row of the curl multiplicity table: all lattice vectors with a given
/// `|k|²`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShellMultiplicity {
    pub norm_sq: i64,
    /// Number of nonzero lattice vectors on the shell.
    pub lattice_count: usize,
    /// Real dimension of the `+|k|` eigenspace restricted to the shell.
    pub positive: usize,
    /// Real dimension of the `−|k|` eigenspace restricted to the shell.
    pub negative: usize,
}

/// Partial signed sum `Σ sign(λ) |λ|^{−s}` over the curl spectrum on the
/// lattice box `0 < max_j |k_j| ≤ kmax`.
#[derive(Debug, Clone, PartialEq)]
pub struct EtaReport {
    pub kmax: usize,
    pub s: f64,
    pub eta_partial: f64,
    pub positive_count: usize,
    pub negative_count: usize,
    pub multiplicity_table: Vec<ShellMultiplicity>,
}

/// Every nonzero lattice vector `k` carries one `h₊` and one `h₋` mode with
/// eigenvalues `±|k|`. Contributions are accumulated pairwise per `k`, so the
/// torus sum cancels exactly rather than to roundoff.
pub fn eta_partial(s: f64, kmax: usize, grid: &GridSpec) -> Result<EtaReport> {
    if kmax == 0 {
        return Err(Error::invalid("kmax must be positive (empty spectrum)"));
    }
    if !s.is_finite() {
        return Err(Error::invalid(format!(
            "exponent s must be finite, got {s}"
        )));
    }
    let mut shells: BTreeMap<i64, usize> = BTreeMap::new();
    let mut eta = 0.0;
    let (mut pos, mut neg) = (0usize, 0usize);
    for k in enumerate_wavevectors(grid, kmax)? {
        if k.is_zero() {
            continue;
        }
        let lam = k.norm();
        let plus = lam.powf(-s);
        let minus = -((-lam).abs().powf(-s));
        eta += plus + minus;
        pos += 1;
        neg += 1;
        *shells.entry(k.norm_sq()).or_default() += 1;
    }
    let multiplicity_table = shells
        .into_iter()
        .map(|(norm_sq, count)| ShellMultiplicity {
            norm_sq,
            lattice_count: count,
            positive: count,
            negative: count,
        })
        .collect();
    Ok(EtaReport {
        kmax,
        s,
        eta_partial: eta,
        positive_count: pos,
        negative_count: neg,
        multiplicity_table,
    })
}
