//! Curvature of the volume-preserving diffeomorphism group: the connection
//! and curvature tensor of the bi-invariant form, its sectional curvature
//! (two evaluations), and the five-term right-invariant sectional curvature
//! with its reduction for curl eigenfields.

use crate::error::{Error, Result};
use crate::fields::SpectralVectorField;
use crate::forms::{biinvariant_form, biinvariant_form_bounded, l2_inner, l2_norm};
use crate::operators::{cross, curl, curl_inv, lie_bracket, relative_residual, NORMALIZER_FLOOR};

/// Relative tolerance for accepting `curl X = λ X`.
pub const EIGEN_TOL: f64 = 1e-10;

/// Relative Gram-determinant threshold below which a pair spans no plane.
pub const GRAM_TOL: f64 = 1e-12;

/// `∇⁰_X Y = ½ [X, Y]`.
pub fn biinv_connection(
    x: &SpectralVectorField,
    y: &SpectralVectorField,
) -> Result<SpectralVectorField> {
    Ok(lie_bracket(x, y)?.scaled(0.5))
}

/// `R⁰(X, Y) Z = −¼ [[X, Y], Z]`.
pub fn biinv_curvature_tensor(
    x: &SpectralVectorField,
    y: &SpectralVectorField,
    z: &SpectralVectorField,
) -> Result<SpectralVectorField> {
    Ok(lie_bracket(&lie_bracket(x, y)?, z)?.scaled(-0.25))
}

/// First Bianchi identity `R⁰(X,Y)Z + R⁰(Y,Z)X + R⁰(Z,X)Y = 0`.
pub fn bianchi_residual(
    x: &SpectralVectorField,
    y: &SpectralVectorField,
    z: &SpectralVectorField,
) -> Result<f64> {
    let t = [
        biinv_curvature_tensor(x, y, z)?,
        biinv_curvature_tensor(y, z, x)?,
        biinv_curvature_tensor(z, x, y)?,
    ];
    let sum = &(&t[0] + &t[1]) + &t[2];
    let scales: Vec<f64> = t.iter().map(l2_norm).collect();
    Ok(relative_residual(l2_norm(&sum), &scales))
}

/// Skewness of `R⁰(X,Y)` for the bi-invariant form:
/// `⟨R⁰(X,Y)Z, W⟩ + ⟨Z, R⁰(X,Y)W⟩ = 0`.
pub fn curvature_skew_residual(
    x: &SpectralVectorField,
    y: &SpectralVectorField,
    z: &SpectralVectorField,
    w: &SpectralVectorField,
) -> Result<f64> {
    let (a, sa) = biinvariant_form_bounded(&biinv_curvature_tensor(x, y, z)?, w)?;
    let (b, sb) = biinvariant_form_bounded(z, &biinv_curvature_tensor(x, y, w)?)?;
    Ok(relative_residual(a + b, &[sa, sb]))
}

/// Which bilinear form a pair is orthonormalized against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairForm {
    L2,
    Biinvariant,
}

impl PairForm {
    fn eval(self, a: &SpectralVectorField, b: &SpectralVectorField) -> Result<f64> {
        match self {
            PairForm::L2 => l2_inner(a, b),
            PairForm::Biinvariant => biinvariant_form(a, b),
        }
    }
}

/// Pair with `|⟨X′,X′⟩| = |⟨Y′,Y′⟩| = 1` and `⟨X′,Y′⟩ = 0`; `signs` are the
/// diagonal values `⟨X′,X′⟩`, `⟨Y′,Y′⟩` (the bi-invariant form is
/// indefinite, so either may be −1).
#[derive(Debug, Clone)]
pub struct OrthonormalPair {
    pub x: SpectralVectorField,
    pub y: SpectralVectorField,
    pub signs: [f64; 2],
}

/// Gram–Schmidt for a possibly indefinite form. If `X` is (nearly) null, the
/// first vector is taken from `Y`, `X + Y` or `X − Y` instead; the spanned
/// plane is unchanged.
pub fn orthonormalize_pair(
    x: &SpectralVectorField,
    y: &SpectralVectorField,
    form: PairForm,
) -> Result<OrthonormalPair> {
    let g11 = form.eval(x, x)?;
    let g12 = form.eval(x, y)?;
    let g22 = form.eval(y, y)?;
    let scale = g11.abs().max(g22.abs()).max(g12.abs());
    let det = g11 * g22 - g12 * g12;
    if scale == 0.0 || det.abs() <= GRAM_TOL * scale * scale {
        return Err(Error::domain(format!(
            "pair spans no plane: Gram determinant {det:.3e} (scale {scale:.3e})"
        )));
    }

    let sum = x + y;
    let diff = x - y;
    let candidates = [
        (x, y, g11),
        (y, x, g22),
        (&sum, y, g11 + 2.0 * g12 + g22),
        (&diff, y, g11 - 2.0 * g12 + g22),
    ];
    let (u, w, uu) = candidates
        .into_iter()
        .find(|c| c.2.abs() > 1e-6 * scale)
        .expect("a nonsingular Gram matrix has a non-null vector among these");

    let s1 = uu.signum();
    let u1 = u.scaled(1.0 / uu.abs().sqrt());
    let mut w1 = w.clone();
    w1.axpy(-s1 * form.eval(&u1, w)?, &u1)?;
    let ww = form.eval(&w1, &w1)?;
    if ww.abs() <= NORMALIZER_FLOOR {
        return Err(Error::domain("second vector degenerates after projection"));
    }
    Ok(OrthonormalPair {
        x: u1,
        y: w1.scaled(1.0 / ww.abs().sqrt()),
        signs: [s1, ww.signum()],
    })
}

/// Both evaluations of the bi-invariant sectional curvature.
#[derive(Debug, Clone, PartialEq)]
pub struct SectionalBiinv {
    /// `¼ ⟨[X,Y], [X,Y]⟩`.
    pub form_value: f64,
    /// `¼ ∫ g([X,Y], Y × X) dμ`.
    pub cross_value: f64,
    /// Normalization signs when the pair was orthonormalized.
    pub signs: Option<[f64; 2]>,
}

impl SectionalBiinv {
    pub fn value(&self) -> f64 {
        self.form_value
    }

    pub fn agreement(&self) -> f64 {
        relative_residual(
            self.form_value - self.cross_value,
            &[self.form_value, self.cross_value],
        )
    }
}

/// `K⁰ = ¼⟨[X,Y],[X,Y]⟩`, also evaluated as `¼∫g([X,Y], Y×X)dμ`. With
/// `normalize`, the pair is first orthonormalized for the bi-invariant form.
pub fn sectional_biinv(
    x: &SpectralVectorField,
    y: &SpectralVectorField,
    normalize: bool,
) -> Result<SectionalBiinv> {
    x.ensure_exact("sectional_biinv (X)")?;
    y.ensure_exact("sectional_biinv (Y)")?;
    let (pair, signs) = if normalize {
        let p = orthonormalize_pair(x, y, PairForm::Biinvariant)?;
        ((p.x, p.y), Some(p.signs))
    } else {
        ((x.clone(), y.clone()), None)
    };
    let (x, y) = (&pair.0, &pair.1);
    let b = lie_bracket(x, y)?;
    Ok(SectionalBiinv {
        form_value: 0.25 * biinvariant_form(&b, &b)?,
        cross_value: 0.25 * l2_inner(&b, &cross(y, x)?)?,
        signs,
    })
}

/// The five integrals of the right-invariant sectional curvature, each with
/// its coefficient applied.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RightInvariantTerms {
    pub terms: [f64; 5],
}

impl RightInvariantTerms {
    pub fn total(&self) -> f64 {
        self.terms.iter().sum()
    }
}

/// Right-invariant sectional curvature of the plane spanned by `X, Y`:
///
/// ```text
/// K = −½∫g(X,[[X,Y],Y]) − ½∫g([X,[X,Y]],Y) − ¾∫g([X,Y],[X,Y])
///     + ∫g(curl⁻¹[X,curl X], Y×curl Y)
///     − ¼∫g(curl⁻¹([X,curl Y] − [curl X,Y]), X×curl Y − curl X×Y)
/// ```
///
/// The pair is used as given; normalize it first if required.
pub fn sectional_rightinv(
    x: &SpectralVectorField,
    y: &SpectralVectorField,
) -> Result<RightInvariantTerms> {
    x.ensure_exact("sectional_rightinv (X)")?;
    y.ensure_exact("sectional_rightinv (Y)")?;
    let (cx, cy) = (curl(x), curl(y));
    let b = lie_bracket(x, y)?;

    let t1 = -0.5 * l2_inner(x, &lie_bracket(&b, y)?)?;
    let t2 = -0.5 * l2_inner(&lie_bracket(x, &b)?, y)?;
    let t3 = -0.75 * l2_inner(&b, &b)?;
    let t4 = l2_inner(&curl_inv(&lie_bracket(x, &cx)?)?, &cross(y, &cy)?)?;
    let mixed = curl_inv(&(&lie_bracket(x, &cy)? - &lie_bracket(&cx, y)?))?;
    let t5 = -0.25 * l2_inner(&mixed, &(&cross(x, &cy)? - &cross(&cx, y)?))?;
    Ok(RightInvariantTerms {
        terms: [t1, t2, t3, t4, t5],
    })
}

/// The four terms of the eigenfield form of the right-invariant curvature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenTerms {
    pub terms: [f64; 4],
}

impl EigenTerms {
    pub fn total(&self) -> f64 {
        self.terms.iter().sum()
    }
}

fn check_eigen(f: &SpectralVectorField, lambda: f64, name: &str) -> Result<()> {
    let c = curl(f);
    let mut r = c.clone();
    r.axpy(-lambda, f)?;
    let res = relative_residual(l2_norm(&r), &[l2_norm(&c), lambda * l2_norm(f)]);
    if res > EIGEN_TOL {
        return Err(Error::domain(format!(
            "{name} is not a curl eigenfield for λ = {lambda}: residual {res:.3e}"
        )));
    }
    Ok(())
}

/// Right-invariant sectional curvature for `curl X = λX`, `curl Y = μY`:
///
/// ```text
/// K = −½∫g(X,[[X,Y],Y]) − ½∫g([X,[X,Y]],Y) − ¾∫g([X,Y],[X,Y])
///     − (λ−μ)²/4 ∫g(curl⁻¹[X,Y], X×Y)
/// ```
pub fn sectional_rightinv_eigen(
    x: &SpectralVectorField,
    y: &SpectralVectorField,
    lambda: f64,
    mu: f64,
) -> Result<EigenTerms> {
    x.ensure_exact("sectional_rightinv_eigen (X)")?;
    y.ensure_exact("sectional_rightinv_eigen (Y)")?;
    check_eigen(x, lambda, "X")?;
    check_eigen(y, mu, "Y")?;
    let b = lie_bracket(x, y)?;
    let t1 = -0.5 * l2_inner(x, &lie_bracket(&b, y)?)?;
    let t2 = -0.5 * l2_inner(&lie_bracket(x, &b)?, y)?;
    let t3 = -0.75 * l2_inner(&b, &b)?;
    let d = lambda - mu;
    let t4 = -0.25 * d * d * l2_inner(&curl_inv(&b)?, &cross(x, y)?)?;
    Ok(EigenTerms {
        terms: [t1, t2, t3, t4],
    })
}
