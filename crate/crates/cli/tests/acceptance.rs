//! Acceptance criteria 1–8. Each criterion prints one PASS/FAIL line with the
//! measured quantities; the test fails if any criterion fails.

use std::io::Write;
use std::process::Command;

use helicore::curvature::{sectional_biinv, sectional_rightinv, sectional_rightinv_eigen};
use helicore::dynamics::{evolve, stationarity_residual, EvolveConfig};
use helicore::fields::{
    abc_field, helical_mode, random_beltrami_field, random_exact_field, Helicity,
};
use helicore::forms::symmetry_residual;
use helicore::forms::{biinvariant_form, biinvariant_form_bounded, eta_partial, l2_inner, l2_norm};
use helicore::io::{
    diagnostics_csv, parse_diagnostics_csv, read_snapshot, write_snapshot, FieldSnapshot,
};
use helicore::operators::{bracket_equivalence_residual, curl, relative_residual};
use helicore::{GridSpec, SpectralVectorField, WaveVector};

struct Report {
    failed: Vec<usize>,
}

impl Report {
    fn line(&mut self, id: usize, ok: bool, detail: String) {
        if !ok {
            self.failed.push(id);
        }
        let verdict = if ok { "PASS" } else { "FAIL" };
        // bypasses the test harness capture so the lines land in the log
        let mut out = std::io::stdout().lock();
        let _ = writeln!(out, "criterion {id}: {verdict}  {detail}");
        let _ = out.flush();
    }
}

fn g(n: usize) -> GridSpec {
    GridSpec::new(n).unwrap()
}

fn identity_suite(r: &mut Report) {
    let mut detail = Vec::new();
    let mut ok = true;
    for seed in [7, 8, 9] {
        let mut buf = Vec::new();
        let code = helicore_cli::cmd_check(32, seed, 2, &mut buf).unwrap();
        let worst = helicore::suite::run_identity_suite(32, seed, 2)
            .unwrap()
            .iter()
            .map(|c| c.residual / c.threshold)
            .fold(0.0, f64::max);
        ok &= code == 0;
        detail.push(format!(
            "seed {seed}: exit {code}, worst residual/threshold {worst:.2e}"
        ));
    }
    r.line(1, ok, detail.join("; "));
}

fn bracket_equivalence(r: &mut Report) {
    let grid = g(32);
    let mut worst = 0.0f64;
    for seed in 0..5u64 {
        let x = random_exact_field(grid, 100 + 2 * seed, 2, 1.0).unwrap();
        let y = random_exact_field(grid, 101 + 2 * seed, 2, 1.0).unwrap();
        worst = worst.max(bracket_equivalence_residual(&x, &y).unwrap());
    }
    r.line(
        2,
        worst <= 1e-12,
        format!("max residual {worst:.3e} over 5 pairs (<= 1e-12)"),
    );
}

fn form_structure(r: &mut Report) {
    let grid = g(32);
    let fields: Vec<SpectralVectorField> = (0..10u64)
        .map(|s| random_exact_field(grid, 300 + s, 2, 1.0).unwrap())
        .collect();
    let mut sym = 0.0f64;
    for pair in fields.windows(2) {
        sym = sym.max(symmetry_residual(&pair[0], &pair[1]).unwrap());
    }
    let mut curl_res = 0.0f64;
    let mut all_positive = true;
    for x in &fields {
        let (v, bound) = biinvariant_form_bounded(x, &curl(x)).unwrap();
        let xx = l2_inner(x, x).unwrap();
        all_positive &= v > 0.0 && xx > 0.0;
        curl_res = curl_res.max(relative_residual(v - xx, &[bound, xx]));
    }
    // negative-helicity shell: <X,X> = -(X,X)/|k|
    let w = random_beltrami_field(grid, 5, 2, Helicity::Minus, 1.0).unwrap();
    let ww = biinvariant_form(&w, &w).unwrap();
    let expected = -l2_inner(&w, &w).unwrap() / 2f64.sqrt();
    let witness = ww < 0.0 && relative_residual(ww - expected, &[expected]) <= 1e-12;
    r.line(
        3,
        sym <= 1e-12 && curl_res <= 1e-12 && all_positive && witness,
        format!(
            "symmetry {sym:.3e}; <X,curl X>=(X,X)>0 on 10 fields, residual {curl_res:.3e}; \
             witness <W,W> = {ww:.6e} < 0"
        ),
    );
}

fn drifts(x0: &SpectralVectorField, dt: f64, steps: usize) -> (f64, f64) {
    let cfg = EvolveConfig::new(dt, steps).record_every(steps);
    let out = evolve(x0, &cfg).unwrap();
    (out.series.energy_drift(), out.series.helicity_drift())
}

fn conservation(r: &mut Report) {
    // amplitude chosen so the RK4 truncation error sits well above roundoff
    let x0 = random_exact_field(g(32), 11, 2, 0.4).unwrap();
    let (e1, h1) = drifts(&x0, 1e-3, 1000);
    let (e2, h2) = drifts(&x0, 5e-4, 2000);
    let (re, rh) = (e1 / e2, h1 / h2);
    let ok = e1 <= 1e-8 && h1 <= 1e-8 && re >= 8.0 && rh >= 8.0;
    r.line(
        4,
        ok,
        format!(
            "dt=1e-3: energy {e1:.3e}, helicity {h1:.3e}; dt=5e-4: energy {e2:.3e}, \
             helicity {h2:.3e}; reduction {re:.1}x / {rh:.1}x"
        ),
    );
}

fn beltrami(r: &mut Report) {
    let mut cases: Vec<(String, SpectralVectorField)> =
        vec![("abc(1,1,1) n=32".into(), abc_field(g(32), 1.0, 1.0, 1.0))];
    for (k, s) in [
        (WaveVector::new(1, 0, 0), Helicity::Plus),
        (WaveVector::new(0, 1, 1), Helicity::Minus),
        (WaveVector::new(1, 2, 0), Helicity::Plus),
    ] {
        let name = format!(
            "h{}{:?} n=16",
            if s == Helicity::Plus { "+" } else { "-" },
            k.components()
        );
        cases.push((name, helical_mode(g(16), k, s, 1.0).unwrap()));
    }
    let mut ok = true;
    let mut detail = Vec::new();
    for (name, x) in &cases {
        let st = stationarity_residual(x).unwrap();
        let out = evolve(x, &EvolveConfig::new(1e-3, 1000).record_every(1000)).unwrap();
        let drift = l2_norm(&(&out.final_field - x)) / l2_norm(x);
        ok &= st <= 1e-13 && drift <= 1e-9;
        detail.push(format!("{name}: stationarity {st:.2e}, change {drift:.2e}"));
    }
    r.line(5, ok, detail.join("; "));
}

fn curvature(r: &mut Report) {
    let grid = g(32);
    let mut agree = 0.0f64;
    for seed in 0..4u64 {
        let x = random_exact_field(grid, 500 + 2 * seed, 2, 1.0).unwrap();
        let y = random_exact_field(grid, 501 + 2 * seed, 2, 1.0).unwrap();
        for normalize in [false, true] {
            agree = agree.max(sectional_biinv(&x, &y, normalize).unwrap().agreement());
        }
    }
    let hx = helical_mode(grid, WaveVector::new(1, 0, 0), Helicity::Plus, 1.0).unwrap();
    let hy = helical_mode(grid, WaveVector::new(0, 1, 0), Helicity::Plus, 1.0).unwrap();
    agree = agree.max(sectional_biinv(&hx, &hy, false).unwrap().agreement());

    let eigen_pairs = [
        (1, Helicity::Plus, 2, Helicity::Minus),
        (1, Helicity::Plus, 1, Helicity::Plus),
        (3, Helicity::Minus, 2, Helicity::Plus),
        (2, Helicity::Minus, 5, Helicity::Minus),
    ];
    let mut reduction = 0.0f64;
    for (i, &(sx, hsx, sy, hsy)) in eigen_pairs.iter().enumerate() {
        let x = random_beltrami_field(grid, 40 + i as u64, sx, hsx, 1.0).unwrap();
        let y = random_beltrami_field(grid, 60 + i as u64, sy, hsy, 1.0).unwrap();
        let lam = hsx.sign() * (sx as f64).sqrt();
        let mu = hsy.sign() * (sy as f64).sqrt();
        let five = sectional_rightinv(&x, &y).unwrap();
        let four = sectional_rightinv_eigen(&x, &y, lam, mu).unwrap();
        let scales: Vec<f64> = five
            .terms
            .iter()
            .chain(&four.terms)
            .map(|t| t.abs())
            .collect();
        reduction = reduction.max(relative_residual(five.total() - four.total(), &scales));
    }

    let a = abc_field(grid, 1.0, 1.0, 1.0);
    let za = helical_mode(grid, WaveVector::new(0, 0, 1), Helicity::Plus, 1.0).unwrap();
    let zb = helical_mode(grid, WaveVector::new(0, 0, 2), Helicity::Minus, 0.5).unwrap();
    let mut commuting = Vec::new();
    for (x, y) in [(&a, &a), (&a, &a.scaled(2.0)), (&za, &zb)] {
        let k = sectional_biinv(x, y, false).unwrap();
        commuting.push(k.form_value == 0.0 && k.cross_value == 0.0);
    }
    let exact_zero = commuting.iter().all(|&c| c);
    r.line(
        6,
        agree <= 1e-11 && reduction <= 1e-10 && exact_zero,
        format!(
            "K0 evaluations agree to {agree:.3e}; five-term vs eigen form {reduction:.3e} on \
             {} eigenpairs; commuting pairs K0 == 0: {commuting:?}",
            eigen_pairs.len()
        ),
    );
}

fn eta(r: &mut Report) {
    let cases = [
        (1.0, 3usize),
        (0.5, 8),
        (2.0, 5),
        (0.25, 1),
        (3.5, 6),
        (-1.0, 4),
    ];
    let mut ok = true;
    let mut detail = Vec::new();
    for (s, kmax) in cases {
        let grid = g((2 * kmax).max(8));
        let rep = eta_partial(s, kmax, &grid).unwrap();
        let lattice = (2 * kmax + 1).pow(3) - 1;
        ok &= rep.eta_partial == 0.0
            && rep.positive_count == rep.negative_count
            && rep.positive_count == lattice;
        detail.push(format!(
            "({s},{kmax}): eta {} +{}/-{}",
            rep.eta_partial, rep.positive_count, rep.negative_count
        ));
    }
    r.line(7, ok, detail.join("; "));
}

fn io(r: &mut Report) {
    let dir = tempfile::tempdir().unwrap();
    let x = random_exact_field(g(16), 77, 3, 1.0).unwrap();
    let snap = FieldSnapshot::from_field(&x);
    let path = dir.path().join("x.hfd");
    write_snapshot(&path, &snap).unwrap();
    let bytes = std::fs::read(&path).unwrap();
    let back = read_snapshot(&path).unwrap();
    let same_bits = snap
        .samples
        .iter()
        .zip(&back.samples)
        .all(|(a, b)| a.iter().zip(b).all(|(p, q)| p.to_bits() == q.to_bits()));
    let snapshot_ok = same_bits && back.encode() == bytes;

    let cfg = EvolveConfig::new(1e-3, 12).record_every(3);
    let series = evolve(&x, &cfg).unwrap().series;
    let reloaded = parse_diagnostics_csv(diagnostics_csv(&series).as_bytes()).unwrap();
    let bits = |s: &helicore::dynamics::DiagnosticsSeries| -> Vec<u64> {
        s.rows
            .iter()
            .flat_map(|r| {
                [
                    r.t,
                    r.energy,
                    r.helicity,
                    r.stationarity_residual,
                    r.max_divergence,
                ]
                .map(f64::to_bits)
            })
            .collect()
    };
    let csv_ok = bits(&series) == bits(&reloaded) && series.rows.len() == reloaded.rows.len();

    let bin = env!("CARGO_BIN_EXE_helicore");
    let code = |args: &[&str]| Command::new(bin).args(args).output().unwrap().status.code();
    let pass = code(&["check", "--n", "32", "--seed", "7", "--band", "2"]);
    let invalid = code(&["check", "--n", "8", "--band", "2"]);
    let exit_ok = pass == Some(0) && invalid == Some(2);
    r.line(
        8,
        snapshot_ok && csv_ok && exit_ok,
        format!(
            "snapshot bit-exact {snapshot_ok}; csv exact {csv_ok}; check exits {pass:?} (valid) \
             and {invalid:?} (n=8, band=2)"
        ),
    );
}

#[test]
fn acceptance_criteria() {
    let mut r = Report { failed: Vec::new() };
    identity_suite(&mut r);
    bracket_equivalence(&mut r);
    form_structure(&mut r);
    conservation(&mut r);
    beltrami(&mut r);
    curvature(&mut r);
    eta(&mut r);
    io(&mut r);
    assert!(r.failed.is_empty(), "failed criteria: {:?}", r.failed);
}
