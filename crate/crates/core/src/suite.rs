//! The identity suite run by `helicore check`: every algebraic identity of
//! the operator calculus evaluated on seeded band-limited random fields.

use crate::curvature::{
    bianchi_residual, curvature_skew_residual, sectional_biinv, sectional_rightinv,
    sectional_rightinv_eigen,
};
use crate::error::{Error, Result};
use crate::fields::{random_beltrami_field, random_exact_field, random_scalar_field, Helicity};
use crate::forms::{
    adjoint_invariance_residual, biinvariant_form_bounded, d0_invariance_residual, l2_inner,
    symmetry_residual,
};
use crate::grid::GridSpec;
use crate::operators::{
    bracket_equivalence_residual, curl, jacobi_residual, lemma1_residual, lemma2_residual,
    projector_identity_residuals, relative_residual, vector_identity_residuals,
};

/// Pass threshold for identities involving at most two nested products.
pub const IDENTITY_TOL: f64 = 1e-11;
/// Pass threshold for single-product or linear identities.
pub const STRICT_TOL: f64 = 1e-12;
/// Pass threshold for the eigenfield reduction of the right-invariant curvature.
pub const EIGEN_REDUCTION_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub residual: f64,
    pub threshold: f64,
}

impl IdentityCheck {
    fn new(name: &'static str, residual: f64, threshold: f64) -> Self {
        Self {
            name,
            residual,
            threshold,
        }
    }

    pub fn passed(&self) -> bool {
        self.residual <= self.threshold
    }
}

/// Validates `(n, band)`: even `n ≥ 8` and `n ≥ 6·band`, so two nested
/// quadratic products stay alias-free.
pub fn validate_suite_args(n: usize, band: usize) -> Result<GridSpec> {
    let grid = GridSpec::new(n)?;
    if band == 0 || n < 6 * band {
        return Err(Error::invalid(format!(
            "band {band} needs 1 <= band and n >= 6*band (n = {n})"
        )));
    }
    Ok(grid)
}

/// Runs every identity for fields drawn from `seed, seed+1, …` on band
/// `band`. Deterministic for fixed arguments.
pub fn run_identity_suite(n: usize, seed: u64, band: usize) -> Result<Vec<IdentityCheck>> {
    let g = validate_suite_args(n, band)?;
    let x = random_exact_field(g, seed, band, 1.0)?;
    let y = random_exact_field(g, seed.wrapping_add(1), band, 1.0)?;
    let z = random_exact_field(g, seed.wrapping_add(2), band, 1.0)?;
    let w = random_exact_field(g, seed.wrapping_add(3), band, 1.0)?;
    // compressible generator: exact part plus a gradient
    let xc = &x + &random_scalar_field(g, seed.wrapping_add(4), band)?.gradient();

    let mut out = Vec::new();
    out.push(IdentityCheck::new(
        "lemma1: curl_inv[X,Y] = P(Y x X)",
        lemma1_residual(&x, &y)?,
        IDENTITY_TOL,
    ));
    out.push(IdentityCheck::new(
        "lemma2: P(. x X) skew (compressible X)",
        lemma2_residual(&xc, &y, &z)?,
        IDENTITY_TOL,
    ));
    out.push(IdentityCheck::new(
        "Q invariance under L_X (divergence-free X)",
        d0_invariance_residual(&x, &y, &z)?,
        IDENTITY_TOL,
    ));
    out.push(IdentityCheck::new(
        "Q invariance under L_X (compressible X)",
        d0_invariance_residual(&xc, &y, &z)?,
        IDENTITY_TOL,
    ));
    out.push(IdentityCheck::new(
        "ad-invariance <[X,Y],Z> + <Y,[X,Z]> = 0",
        adjoint_invariance_residual(&x, &y, &z)?,
        IDENTITY_TOL,
    ));
    let (v1, v2) = vector_identity_residuals(&x, &y)?;
    out.push(IdentityCheck::new(
        "X x curl Y + Y x curl X = -(nabla_X Y + nabla_Y X) + grad g(X,Y)",
        v1,
        IDENTITY_TOL,
    ));
    out.push(IdentityCheck::new(
        "nabla_X X = curl X x X + grad g(X,X)/2",
        v2,
        IDENTITY_TOL,
    ));
    let (p1, p2) = projector_identity_residuals(&x, &y)?;
    out.push(IdentityCheck::new(
        "P(nabla_X Y + nabla_Y X) = curl_inv([X,curl Y] + [Y,curl X])",
        p1,
        IDENTITY_TOL,
    ));
    out.push(IdentityCheck::new(
        "P(nabla_X X) = curl_inv[X,curl X]",
        p2,
        IDENTITY_TOL,
    ));
    out.push(IdentityCheck::new(
        "Jacobi identity",
        jacobi_residual(&x, &y, &z)?,
        IDENTITY_TOL,
    ));
    out.push(IdentityCheck::new(
        "bracket: curl(Y x X) = advective commutator",
        bracket_equivalence_residual(&x, &y)?,
        STRICT_TOL,
    ));
    out.push(IdentityCheck::new(
        "<X,Y> symmetric",
        symmetry_residual(&x, &y)?,
        STRICT_TOL,
    ));
    let (a, sa) = biinvariant_form_bounded(&x, &curl(&y))?;
    let b = l2_inner(&x, &y)?;
    out.push(IdentityCheck::new(
        "<X, curl Y> = (X, Y)",
        relative_residual(a - b, &[sa]),
        STRICT_TOL,
    ));
    out.push(IdentityCheck::new(
        "sectional K0: <[X,Y],[X,Y]>/4 = int g([X,Y], Y x X)/4",
        sectional_biinv(&x, &y, true)?.agreement(),
        IDENTITY_TOL,
    ));
    out.push(IdentityCheck::new(
        "first Bianchi identity for R0",
        bianchi_residual(&x, &y, &z)?,
        IDENTITY_TOL,
    ));
    out.push(IdentityCheck::new(
        "R0(X,Y) skew for <.,.>",
        curvature_skew_residual(&x, &y, &z, &w)?,
        IDENTITY_TOL,
    ));

    // eigenpair with distinct eigenvalues 1 and -sqrt 2
    let ex = random_beltrami_field(g, seed, 1, Helicity::Plus, 1.0)?;
    let ey = random_beltrami_field(g, seed.wrapping_add(1), 2, Helicity::Minus, 1.0)?;
    let full = sectional_rightinv(&ex, &ey)?.total();
    let eig = sectional_rightinv_eigen(&ex, &ey, 1.0, -(2f64).sqrt())?.total();
    out.push(IdentityCheck::new(
        "right-invariant K: five-term = eigen form",
        relative_residual(full - eig, &[full, eig]),
        EIGEN_REDUCTION_TOL,
    ));
    Ok(out)
}
