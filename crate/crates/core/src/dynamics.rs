//! Ideal incompressible Euler flow written on the vorticity `X = curl V`:
//! `dX/dt = [X, curl⁻¹ X]`, integrated with classical RK4.

use crate::error::{Error, Result};
use crate::fields::SpectralVectorField;
use crate::forms::{energy, l2_inner, l2_norm};
use crate::operators::{curl, curl_inv, lie_bracket, NORMALIZER_FLOOR};

/// Largest coefficient modulus tolerated before a run is declared blown up.
pub const BLOWUP_LIMIT: f64 = 1e100;

/// Fixed-step integration settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveConfig {
    pub dt: f64,
    pub steps: usize,
    pub record_every: usize,
    /// 0 disables snapshots.
    pub snapshot_every: usize,
}

impl EvolveConfig {
    pub fn new(dt: f64, steps: usize) -> Self {
        Self {
            dt,
            steps,
            record_every: 1,
            snapshot_every: 0,
        }
    }

    pub fn record_every(mut self, every: usize) -> Self {
        self.record_every = every;
        self
    }

    pub fn snapshot_every(mut self, every: usize) -> Self {
        self.snapshot_every = every;
        self
    }

    pub fn total_time(&self) -> f64 {
        self.dt * self.steps as f64
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::invalid(format!(
                "dt must be positive, got {}",
                self.dt
            )));
        }
        if self.steps == 0 {
            return Err(Error::invalid("steps must be positive"));
        }
        if self.record_every == 0 || self.record_every > self.steps {
            return Err(Error::invalid(format!(
                "record_every must lie in 1..={}, got {}",
                self.steps, self.record_every
            )));
        }
        Ok(())
    }
}

/// One diagnostics record.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticsRow {
    pub step: usize,
    pub t: f64,
    pub energy: f64,
    pub helicity: f64,
    pub stationarity_residual: f64,
    pub max_divergence: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct DiagnosticsSeries {
    pub rows: Vec<DiagnosticsRow>,
}

impl DiagnosticsSeries {
    fn drift(&self, f: impl Fn(&DiagnosticsRow) -> f64) -> f64 {
        match (self.rows.first(), self.rows.last()) {
            (Some(a), Some(b)) => (f(b) - f(a)).abs() / f(a).abs().max(NORMALIZER_FLOOR),
            _ => 0.0,
        }
    }

    /// `|E_last − E_0| / E_0`.
    pub fn energy_drift(&self) -> f64 {
        self.drift(|r| r.energy)
    }

    /// `|m_last − m_0| / max(|m_0|, ε)`.
    pub fn helicity_drift(&self) -> f64 {
        self.drift(|r| r.helicity)
    }
}

/// Result of [`evolve`].
#[derive(Debug, Clone)]
pub struct EvolveOutcome {
    pub final_field: SpectralVectorField,
    pub series: DiagnosticsSeries,
    pub snapshots: Vec<(usize, SpectralVectorField)>,
}

/// `[X, curl⁻¹ X]`.
pub fn euler_rhs(x: &SpectralVectorField) -> Result<SpectralVectorField> {
    let v = curl_inv(x)?;
    lie_bracket(x, &v)
}

/// One classical fourth-order Runge–Kutta step.
pub fn step_rk4(x: &SpectralVectorField, dt: f64) -> Result<SpectralVectorField> {
    let k1 = euler_rhs(x)?;
    let mut s = x.clone();
    s.axpy(0.5 * dt, &k1)?;
    let k2 = euler_rhs(&s)?;
    let mut s = x.clone();
    s.axpy(0.5 * dt, &k2)?;
    let k3 = euler_rhs(&s)?;
    let mut s = x.clone();
    s.axpy(dt, &k3)?;
    let k4 = euler_rhs(&s)?;

    let mut out = x.clone();
    out.axpy(dt / 6.0, &k1)?;
    out.axpy(dt / 3.0, &k2)?;
    out.axpy(dt / 3.0, &k3)?;
    out.axpy(dt / 6.0, &k4)?;
    Ok(out)
}

/// `rms([Y, curl⁻¹ Y]) / rms(Y)²`; zero exactly at stationary states.
pub fn stationarity_residual(y: &SpectralVectorField) -> Result<f64> {
    let b = euler_rhs(y)?;
    let vol = y.grid().volume();
    let rms_y2 = l2_inner(y, y)? / vol;
    let rms_b = l2_norm(&b) / vol.sqrt();
    Ok(rms_b / rms_y2.max(NORMALIZER_FLOOR))
}

/// Rayleigh-quotient eigenvalue estimate `(curl Y, Y)/(Y, Y)` and the
/// residual `‖curl Y − λ̂ Y‖ / ‖Y‖`.
pub fn beltrami_check(y: &SpectralVectorField) -> Result<(f64, f64)> {
    y.ensure_exact("beltrami_check")?;
    let yy = l2_inner(y, y)?;
    if yy == 0.0 {
        return Err(Error::invalid("beltrami_check needs a nonzero field"));
    }
    let cy = curl(y);
    let lam = l2_inner(&cy, y)? / yy;
    let mut r = cy;
    r.axpy(-lam, y)?;
    Ok((lam, l2_norm(&r) / yy.sqrt()))
}

/// Velocity-based diagnostics for vorticity `x`.
pub fn diagnostics(step: usize, t: f64, x: &SpectralVectorField) -> Result<DiagnosticsRow> {
    let v = curl_inv(x)?;
    Ok(DiagnosticsRow {
        step,
        t,
        energy: energy(&v),
        helicity: l2_inner(x, &v)?,
        stationarity_residual: stationarity_residual(x)?,
        max_divergence: x.max_divergence(),
    })
}

/// Integrates from `x0`, calling `on_snapshot` at step 0 and every
/// `snapshot_every` steps. Diagnostics are recorded at step 0, every
/// `record_every` steps and at the final step.
pub fn evolve_with<F>(
    x0: &SpectralVectorField,
    cfg: &EvolveConfig,
    mut on_snapshot: F,
) -> Result<(SpectralVectorField, DiagnosticsSeries)>
where
    F: FnMut(usize, &SpectralVectorField) -> Result<()>,
{
    cfg.validate()?;
    x0.ensure_exact("evolve (initial vorticity)")?;
    let mut series = DiagnosticsSeries::default();
    let mut x = x0.clone();
    series.rows.push(diagnostics(0, 0.0, &x)?);
    if cfg.snapshot_every > 0 {
        on_snapshot(0, &x)?;
    }
    for step in 1..=cfg.steps {
        x = step_rk4(&x, cfg.dt)?;
        let t = step as f64 * cfg.dt;
        if !x.is_finite() || x.max_abs_coeff() > BLOWUP_LIMIT {
            return Err(Error::Blowup {
                step,
                t,
                message: "non-finite or runaway vorticity; reduce dt".into(),
            });
        }
        if step % cfg.record_every == 0 || step == cfg.steps {
            series.rows.push(diagnostics(step, t, &x)?);
        }
        if cfg.snapshot_every > 0 && step % cfg.snapshot_every == 0 {
            on_snapshot(step, &x)?;
        }
    }
    Ok((x, series))
}

/// [`evolve_with`], keeping snapshots in memory.
pub fn evolve(x0: &SpectralVectorField, cfg: &EvolveConfig) -> Result<EvolveOutcome> {
    let mut snapshots = Vec::new();
    let (final_field, series) = evolve_with(x0, cfg, |step, x| {
        snapshots.push((step, x.clone()));
        Ok(())
    })?;
    Ok(EvolveOutcome {
        final_field,
        series,
        snapshots,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{abc_field, helical_mode, random_exact_field, Helicity};
    use crate::grid::{GridSpec, WaveVector};
    use crate::operators::cross;

    #[test]
    fn beltrami_fields_are_fixed_points() {
        let g = GridSpec::new(16).unwrap();
        let v = abc_field(g, 1.0, 1.0, 1.0);
        assert!(euler_rhs(&v).unwrap().max_abs_coeff() <= 1e-14);
        assert!(stationarity_residual(&v).unwrap() <= 1e-13);
        let h = helical_mode(g, WaveVector::new(1, 2, 0), Helicity::Minus, 1.0).unwrap();
        assert!(euler_rhs(&h).unwrap().max_abs_coeff() <= 1e-14);
        let stepped = step_rk4(&v, 0.1).unwrap();
        assert!(l2_norm(&(&stepped - &v)) <= 1e-13 * l2_norm(&v));
    }

    #[test]
    fn zero_step_is_identity() {
        let g = GridSpec::new(16).unwrap();
        let x = random_exact_field(g, 3, 2, 1.0).unwrap();
        assert_eq!(step_rk4(&x, 0.0).unwrap(), x);
    }

    #[test]
    fn rhs_matches_velocity_form() {
        // [curl V, V] with V the velocity, via curl(V × curl V)
        let g = GridSpec::new(32).unwrap();
        let v = random_exact_field(g, 4, 2, 1.0).unwrap();
        let x = curl(&v);
        let a = euler_rhs(&x).unwrap();
        let b = curl(&cross(&v, &x).unwrap());
        assert!(l2_norm(&(&a - &b)) <= 1e-12 * l2_norm(&b));
        assert!(a.divergence_residual() < 1e-14);
        assert_eq!(a.mean(), [0.0; 3]);
    }

    #[test]
    fn stationarity_detects_mixing() {
        let g = GridSpec::new(16).unwrap();
        let a = helical_mode(g, WaveVector::new(1, 0, 0), Helicity::Plus, 1.0).unwrap();
        let b = helical_mode(g, WaveVector::new(0, 1, 1), Helicity::Plus, 1.0).unwrap();
        assert!(stationarity_residual(&(&a + &b)).unwrap() > 1e-3);
        assert_eq!(
            stationarity_residual(&SpectralVectorField::zeros(g)).unwrap(),
            0.0
        );
    }

    #[test]
    fn beltrami_check_examples() {
        let g = GridSpec::new(16).unwrap();
        let (lam, res) = beltrami_check(&abc_field(g, 1.0, 1.0, 1.0)).unwrap();
        assert!((lam - 1.0).abs() <= 1e-14 && res <= 1e-13);
        let k = WaveVector::new(1, 1, 1);
        let (lam, res) =
            beltrami_check(&helical_mode(g, k, Helicity::Minus, 1.0).unwrap()).unwrap();
        assert!((lam + k.norm()).abs() <= 1e-13 && res <= 1e-13);

        // equal-energy mix of +1 and −1 eigenfields: λ̂ = 0, residual = 1
        let p = helical_mode(g, WaveVector::new(1, 0, 0), Helicity::Plus, 1.0).unwrap();
        let m = helical_mode(g, WaveVector::new(0, 1, 0), Helicity::Minus, 1.0).unwrap();
        let (lam, res) = beltrami_check(&(&p + &m)).unwrap();
        assert!(lam.abs() <= 1e-14);
        assert!((res - 1.0).abs() <= 1e-13);
        assert!(beltrami_check(&SpectralVectorField::zeros(g)).is_err());
    }

    #[test]
    fn evolve_zero_field_stays_zero() {
        let g = GridSpec::new(8).unwrap();
        let out = evolve(&SpectralVectorField::zeros(g), &EvolveConfig::new(1e-2, 5)).unwrap();
        assert_eq!(out.final_field, SpectralVectorField::zeros(g));
        assert_eq!(out.series.rows.len(), 6);
    }

    #[test]
    fn evolve_cadence() {
        let g = GridSpec::new(16).unwrap();
        let x = random_exact_field(g, 2, 2, 0.5).unwrap();
        let cfg = EvolveConfig::new(1e-3, 20)
            .record_every(5)
            .snapshot_every(10);
        let out = evolve(&x, &cfg).unwrap();
        let steps: Vec<usize> = out.series.rows.iter().map(|r| r.step).collect();
        assert_eq!(steps, vec![0, 5, 10, 15, 20]);
        let snaps: Vec<usize> = out.snapshots.iter().map(|s| s.0).collect();
        assert_eq!(snaps, vec![0, 10, 20]);
        assert!(out.series.rows.windows(2).all(|w| w[0].t < w[1].t));
        assert!(out.series.rows.iter().all(|r| r.max_divergence < 1e-12));
    }

    #[test]
    fn evolve_rejects_bad_configs() {
        let g = GridSpec::new(8).unwrap();
        let x = random_exact_field(g, 2, 2, 1.0).unwrap();
        assert!(evolve(&x, &EvolveConfig::new(0.0, 5)).is_err());
        assert!(evolve(&x, &EvolveConfig::new(1e-3, 0)).is_err());
        assert!(evolve(&x, &EvolveConfig::new(1e-3, 5).record_every(6)).is_err());
        let c = crate::fields::constant_field(g, [1.0, 0.0, 0.0]);
        assert!(matches!(
            evolve(&c, &EvolveConfig::new(1e-3, 5)),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn evolve_reports_blowup() {
        let g = GridSpec::new(16).unwrap();
        let x = random_exact_field(g, 2, 5, 1e40).unwrap();
        let err = evolve(&x, &EvolveConfig::new(10.0, 50)).unwrap_err();
        assert!(matches!(err, Error::Blowup { .. }), "{err}");
    }
}
