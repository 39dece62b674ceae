use num_complex::Complex64;

use super::{SpectralVectorField, ZERO};

/// Projection onto exact divergence-free fields: removes the gradient part
/// `k(k·X̂)/|k|²` of every mode and the mean (harmonic) mode.
pub fn leray_project(x: &SpectralVectorField) -> SpectralVectorField {
    x.map_modes(|k, v| {
        if k.is_zero() {
            return [ZERO; 3];
        }
        let kf = k.as_f64();
        let proj = (v[0] * kf[0] + v[1] * kf[1] + v[2] * kf[2]) / k.norm_sq() as f64;
        [
            v[0] - proj * kf[0],
            v[1] - proj * kf[1],
            v[2] - proj * kf[2],
        ]
    })
}

/// The three L²-orthogonal pieces of a vector field on the torus.
#[derive(Debug, Clone, PartialEq)]
pub struct HodgeParts {
    pub gradient: SpectralVectorField,
    pub exact: SpectralVectorField,
    pub harmonic: SpectralVectorField,
}

impl HodgeParts {
    pub fn reassemble(&self) -> SpectralVectorField {
        &(&self.gradient + &self.exact) + &self.harmonic
    }
}

/// Splits `X = grad φ + curl-part + constant`.
pub fn hodge_decompose(x: &SpectralVectorField) -> HodgeParts {
    let exact = leray_project(x);
    let harmonic = x.map_modes(|k, v| if k.is_zero() { v } else { [ZERO; 3] });
    let gradient = x.map_modes(|k, v| {
        if k.is_zero() {
            return [Complex64::new(0.0, 0.0); 3];
        }
        let kf = k.as_f64();
        let proj = (v[0] * kf[0] + v[1] * kf[1] + v[2] * kf[2]) / k.norm_sq() as f64;
        [proj * kf[0], proj * kf[1], proj * kf[2]]
    });
    HodgeParts {
        gradient,
        exact,
        harmonic,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{abc_field, constant_field, random_exact_field, SpectralScalar};
    use crate::forms::l2_inner;
    use crate::grid::{GridSpec, WaveVector};

    fn grid() -> GridSpec {
        GridSpec::new(8).unwrap()
    }

    fn grad_sin_x1(g: GridSpec) -> SpectralVectorField {
        SpectralScalar::from_cosines(
            g,
            &[(WaveVector::new(1, 0, 0), 1.0, -std::f64::consts::FRAC_PI_2)],
        )
        .unwrap()
        .gradient()
    }

    #[test]
    fn gradients_and_constants_are_annihilated() {
        let g = grid();
        assert!(leray_project(&grad_sin_x1(g)).max_abs_coeff() < 1e-16);
        assert_eq!(
            leray_project(&constant_field(g, [1.0, 0.0, 0.0])),
            SpectralVectorField::zeros(g)
        );
    }

    #[test]
    fn abc_is_unchanged() {
        let g = grid();
        let v = abc_field(g, 1.0, 1.0, 1.0);
        // oracle: analytic divergence of each ABC component vanishes and the
        // field has no constant term
        assert!((&leray_project(&v) - &v).max_abs_coeff() < 1e-16);
    }

    #[test]
    fn projection_idempotent_and_self_adjoint() {
        let g = GridSpec::new(16).unwrap();
        let grad = SpectralScalar::from_cosines(
            g,
            &[
                (WaveVector::new(1, 2, 0), 0.8, 0.3),
                (WaveVector::new(0, 1, -1), 1.1, -1.0),
            ],
        )
        .unwrap()
        .gradient();
        let x = &random_exact_field(g, 3, 2, 1.0).unwrap() + &grad;
        let y = &random_exact_field(g, 4, 2, 1.0).unwrap() + &constant_field(g, [0.2, 0.0, 1.0]);
        let px = leray_project(&x);
        assert!((&leray_project(&px) - &px).max_abs_coeff() < 1e-15);
        let a = l2_inner(&px, &y).unwrap();
        let b = l2_inner(&x, &leray_project(&y)).unwrap();
        assert!((a - b).abs() <= 1e-12 * a.abs().max(b.abs()));
    }

    #[test]
    fn hodge_of_pure_gradient() {
        let g = grid();
        let gr = SpectralScalar::from_cosines(g, &[(WaveVector::new(0, 1, 0), 1.0, 0.0)])
            .unwrap()
            .gradient();
        let parts = hodge_decompose(&gr);
        assert!((&parts.gradient - &gr).max_abs_coeff() < 1e-16);
        assert!(parts.exact.max_abs_coeff() < 1e-16);
        assert_eq!(parts.harmonic, SpectralVectorField::zeros(g));
    }

    #[test]
    fn hodge_of_abc_plus_constant() {
        let g = grid();
        let v = abc_field(g, 1.0, 1.0, 1.0);
        let c = constant_field(g, [0.0, 1.0, 0.0]);
        let parts = hodge_decompose(&(&v + &c));
        assert!(parts.gradient.max_abs_coeff() < 1e-16);
        assert!((&parts.exact - &v).max_abs_coeff() < 1e-16);
        assert_eq!(parts.harmonic, c);
    }

    #[test]
    fn hodge_parts_orthogonal_and_complete() {
        let g = GridSpec::new(16).unwrap();
        let grad = SpectralScalar::from_cosines(g, &[(WaveVector::new(2, -1, 1), 1.3, 0.5)])
            .unwrap()
            .gradient();
        let x = &(&random_exact_field(g, 9, 3, 1.0).unwrap() + &grad)
            + &constant_field(g, [0.5, -0.2, 0.1]);
        let p = hodge_decompose(&x);
        assert!((&p.reassemble() - &x).max_abs_coeff() <= 1e-13 * x.max_abs_coeff());
        let nx = l2_inner(&x, &x).unwrap();
        for (a, b) in [
            (&p.gradient, &p.exact),
            (&p.gradient, &p.harmonic),
            (&p.exact, &p.harmonic),
        ] {
            assert!(l2_inner(a, b).unwrap().abs() <= 1e-12 * nx);
        }
    }
}
