//! Differential operators on the torus and the Lie-algebra structure of
//! divergence-free fields: curl and its inverse, cross product, the bracket
//! (via `curl(Y × X)` and via the advective commutator), and residual
//! evaluators for the operator identities the algebra relies on.

use num_complex::Complex64;

use crate::error::Result;
use crate::fields::{leray_project, scalar_from_product, SpectralScalar, SpectralVectorField};
use crate::forms::{l2_inner, l2_norm};

/// Floor for residual normalizers so degenerate inputs report 0 instead of NaN.
pub const NORMALIZER_FLOOR: f64 = 1e-30;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// `|diff| / max(scales…, floor)`. Callers pass the norms of every term
/// entering the identity, including unprojected intermediates, so a
/// residual whose terms all vanish still reports roundoff relative to the
/// size of the inputs.
pub fn relative_residual(diff: f64, scales: &[f64]) -> f64 {
    let den = scales.iter().fold(NORMALIZER_FLOOR, |m, s| m.max(s.abs()));
    diff.abs() / den
}

/// `‖∇X‖ = ((2π)³ Σ_k |k|² |X̂(k)|²)^{1/2}`.
pub fn gradient_norm(x: &SpectralVectorField) -> f64 {
    let mut sum = 0.0;
    for (flat, k) in x.grid().modes() {
        let v = x.at(flat);
        sum += k.norm_sq() as f64 * v.iter().map(|z| z.norm_sqr()).sum::<f64>();
    }
    (x.grid().volume() * sum).sqrt()
}

/// Size of a pointwise product `X ∂Y` in L², `‖X‖ ‖∇Y‖ / |T³|^{1/2}`. Used as
/// an input-based floor in residual normalizers.
pub fn product_scale(x: &SpectralVectorField, y: &SpectralVectorField) -> f64 {
    l2_norm(x) * gradient_norm(y) / x.grid().volume().sqrt()
}

/// `(curl X)^(k) = i k × X̂(k)`.
pub fn curl(x: &SpectralVectorField) -> SpectralVectorField {
    x.map_modes(|k, v| {
        let k = k.as_f64();
        [
            I * (v[2] * k[1] - v[1] * k[2]),
            I * (v[0] * k[2] - v[2] * k[0]),
            I * (v[1] * k[0] - v[0] * k[1]),
        ]
    })
}

/// Inverse curl on exact divergence-free fields: `a_s(k) ↦ a_s(k)/(s|k|)`
/// in the helical basis. Fails with a domain error on a mean component or a
/// divergence above [`crate::fields::EXACTNESS_TOL`].
pub fn curl_inv(x: &SpectralVectorField) -> Result<SpectralVectorField> {
    x.ensure_exact("curl_inv")?;
    // a_s/(s|k|) in the helical basis is i k × X̂ / |k|² on exact fields
    Ok(x.map_modes(|k, v| {
        if k.is_zero() {
            return [Complex64::new(0.0, 0.0); 3];
        }
        let [k1, k2, k3] = k.as_f64();
        let f = I / k.norm_sq() as f64;
        [
            (v[2] * k2 - v[1] * k3) * f,
            (v[0] * k3 - v[2] * k1) * f,
            (v[1] * k1 - v[0] * k2) * f,
        ]
    }))
}

/// Partial derivative along axis `axis` of every component.
fn partial(x: &SpectralVectorField, axis: usize) -> SpectralVectorField {
    x.map_modes(|k, v| {
        let f = I * k.as_f64()[axis];
        [v[0] * f, v[1] * f, v[2] * f]
    })
}

/// Pointwise `X × Y`, evaluated on the grid and dealiased.
pub fn cross(x: &SpectralVectorField, y: &SpectralVectorField) -> Result<SpectralVectorField> {
    x.grid().check_same(y.grid())?;
    let (a, b) = rayon::join(|| x.to_samples(), || y.to_samples());
    let len = x.grid().len();
    let mut out = [vec![0.0; len], vec![0.0; len], vec![0.0; len]];
    for i in 0..len {
        out[0][i] = a[1][i] * b[2][i] - a[2][i] * b[1][i];
        out[1][i] = a[2][i] * b[0][i] - a[0][i] * b[2][i];
        out[2][i] = a[0][i] * b[1][i] - a[1][i] * b[0][i];
    }
    Ok(SpectralVectorField::from_products(*x.grid(), out))
}

/// Pointwise `g(X, Y)`, dealiased.
pub fn dot(x: &SpectralVectorField, y: &SpectralVectorField) -> Result<SpectralScalar> {
    x.grid().check_same(y.grid())?;
    let (a, b) = rayon::join(|| x.to_samples(), || y.to_samples());
    let out = (0..x.grid().len())
        .map(|i| a[0][i] * b[0][i] + a[1][i] * b[1][i] + a[2][i] * b[2][i])
        .collect();
    Ok(scalar_from_product(*x.grid(), out))
}

/// `grad g(X, Y)`.
pub fn grad_dot(x: &SpectralVectorField, y: &SpectralVectorField) -> Result<SpectralVectorField> {
    Ok(dot(x, y)?.gradient())
}

/// `∇_X Y = (X·∇)Y` on the flat torus, dealiased.
pub fn advective_derivative(
    x: &SpectralVectorField,
    y: &SpectralVectorField,
) -> Result<SpectralVectorField> {
    x.grid().check_same(y.grid())?;
    let xs = x.to_samples();
    let len = x.grid().len();
    let mut out = [vec![0.0; len], vec![0.0; len], vec![0.0; len]];
    for (axis, xa) in xs.iter().enumerate() {
        let dy = partial(y, axis).to_samples();
        for j in 0..3 {
            for i in 0..len {
                out[j][i] += xa[i] * dy[j][i];
            }
        }
    }
    Ok(SpectralVectorField::from_products(*x.grid(), out))
}

/// Lie bracket of divergence-free fields, `[X, Y] = curl(Y × X)`.
///
/// The result is divergence-free and mean-free by construction.
pub fn lie_bracket(
    x: &SpectralVectorField,
    y: &SpectralVectorField,
) -> Result<SpectralVectorField> {
    x.ensure_divergence_free("lie_bracket (first argument)")?;
    y.ensure_divergence_free("lie_bracket (second argument)")?;
    Ok(curl(&cross(y, x)?))
}

/// Bracket via the commutator `(X·∇)Y − (Y·∇)X`.
pub fn lie_bracket_advective(
    x: &SpectralVectorField,
    y: &SpectralVectorField,
) -> Result<SpectralVectorField> {
    let a = advective_derivative(x, y)?;
    let b = advective_derivative(y, x)?;
    Ok(&a - &b)
}

/// Relative gap between the two bracket routes.
pub fn bracket_equivalence_residual(
    x: &SpectralVectorField,
    y: &SpectralVectorField,
) -> Result<f64> {
    let a = lie_bracket(x, y)?;
    let xy = advective_derivative(x, y)?;
    let yx = advective_derivative(y, x)?;
    let b = &xy - &yx;
    Ok(relative_residual(
        l2_norm(&(&a - &b)),
        &[
            l2_norm(&a),
            l2_norm(&xy),
            l2_norm(&yx),
            product_scale(x, y),
            product_scale(y, x),
        ],
    ))
}

/// `curl⁻¹[X, Y] = P(Y × X)` for divergence-free `X` and exact `Y`.
pub fn lemma1_residual(x: &SpectralVectorField, y: &SpectralVectorField) -> Result<f64> {
    y.ensure_exact("lemma1_residual (Y)")?;
    let lhs = curl_inv(&lie_bracket(x, y)?)?;
    let yx = cross(y, x)?;
    let rhs = leray_project(&yx);
    Ok(relative_residual(
        l2_norm(&(&lhs - &rhs)),
        &[l2_norm(&lhs), l2_norm(&yx)],
    ))
}

/// Skewness of `Y ↦ P(Y × X)`: `(P(Y×X), Z) + (Y, P(Z×X)) = 0`.
pub fn lemma2_residual(
    x: &SpectralVectorField,
    y: &SpectralVectorField,
    z: &SpectralVectorField,
) -> Result<f64> {
    let (pyx, pzx) = (leray_project(&cross(y, x)?), leray_project(&cross(z, x)?));
    let a = l2_inner(&pyx, z)?;
    let b = l2_inner(y, &pzx)?;
    Ok(relative_residual(
        a + b,
        &[l2_norm(&pyx) * l2_norm(z), l2_norm(y) * l2_norm(&pzx)],
    ))
}

/// Residuals of
/// `P(∇_X Y + ∇_Y X) = curl⁻¹([X, curl Y] + [Y, curl X])` and
/// `P(∇_X X) = curl⁻¹[X, curl X]`.
pub fn projector_identity_residuals(
    x: &SpectralVectorField,
    y: &SpectralVectorField,
) -> Result<(f64, f64)> {
    x.ensure_exact("projector_identity_residuals (X)")?;
    y.ensure_exact("projector_identity_residuals (Y)")?;
    let (cx, cy) = (curl(x), curl(y));

    let (xy, yx) = (advective_derivative(x, y)?, advective_derivative(y, x)?);
    let lhs1 = leray_project(&(&xy + &yx));
    let rhs1 = curl_inv(&(&lie_bracket(x, &cy)? + &lie_bracket(y, &cx)?))?;
    let r1 = relative_residual(
        l2_norm(&(&lhs1 - &rhs1)),
        &[
            l2_norm(&lhs1),
            l2_norm(&rhs1),
            l2_norm(&xy),
            l2_norm(&yx),
            product_scale(x, y),
            product_scale(y, x),
        ],
    );

    let xx = advective_derivative(x, x)?;
    let lhs2 = leray_project(&xx);
    let rhs2 = curl_inv(&lie_bracket(x, &cx)?)?;
    let r2 = relative_residual(
        l2_norm(&(&lhs2 - &rhs2)),
        &[
            l2_norm(&lhs2),
            l2_norm(&rhs2),
            l2_norm(&xx),
            product_scale(x, x),
        ],
    );
    Ok((r1, r2))
}

/// Residuals of the pointwise identities
/// `X×curl Y + Y×curl X = −(∇_X Y + ∇_Y X) + grad g(X,Y)` and
/// `∇_X X = curl X × X + ½ grad g(X,X)`.
pub fn vector_identity_residuals(
    x: &SpectralVectorField,
    y: &SpectralVectorField,
) -> Result<(f64, f64)> {
    let (cx, cy) = (curl(x), curl(y));

    let t = [
        cross(x, &cy)?,
        cross(y, &cx)?,
        advective_derivative(x, y)?,
        advective_derivative(y, x)?,
        grad_dot(x, y)?,
    ];
    let mut d = &t[0] + &t[1];
    for (term, sign) in t[2..].iter().zip([1.0, 1.0, -1.0]) {
        d.axpy(sign, term)?;
    }
    let mut scales: Vec<f64> = t.iter().map(l2_norm).collect();
    scales.extend([product_scale(x, y), product_scale(y, x)]);
    let r1 = relative_residual(l2_norm(&d), &scales);

    let t = [
        advective_derivative(x, x)?,
        cross(&cx, x)?,
        grad_dot(x, x)?.scaled(0.5),
    ];
    let d = &(&t[0] - &t[1]) - &t[2];
    let mut scales: Vec<f64> = t.iter().map(l2_norm).collect();
    scales.push(product_scale(x, x));
    let r2 = relative_residual(l2_norm(&d), &scales);
    Ok((r1, r2))
}

/// `[X,[Y,Z]] + [Y,[Z,X]] + [Z,[X,Y]] = 0`.
pub fn jacobi_residual(
    x: &SpectralVectorField,
    y: &SpectralVectorField,
    z: &SpectralVectorField,
) -> Result<f64> {
    let t = [
        lie_bracket(x, &lie_bracket(y, z)?)?,
        lie_bracket(y, &lie_bracket(z, x)?)?,
        lie_bracket(z, &lie_bracket(x, y)?)?,
    ];
    let sum = &(&t[0] + &t[1]) + &t[2];
    let scales: Vec<f64> = t.iter().map(l2_norm).collect();
    Ok(relative_residual(l2_norm(&sum), &scales))
}
