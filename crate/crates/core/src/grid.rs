//! Discretization of the torus `[0, 2π)³`, wavevector bookkeeping, the 2/3
//! dealiasing mask and the forward/inverse FFT pair.
//!
//! Arrays of `n³` values are stored with index `(i₁·n + i₂)·n + i₃`, so `i₃`
//! runs fastest. Fourier coefficients use the same layout with the usual FFT
//! ordering: index `i` carries wavenumber `i` for `i ≤ n/2` and `i − n`
//! otherwise. The synthesis convention is `c(x) = Σ ĉ(k) e^{ik·x}`, i.e. the
//! forward transform divides by `n³`.

use std::cell::RefCell;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Smallest supported resolution per axis.
pub const MIN_RESOLUTION: usize = 8;

/// Uniform grid on the flat torus with `n` samples per axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GridSpec {
    n: usize,
    dealias_num: usize,
    dealias_den: usize,
}

impl GridSpec {
    /// Grid with the default 2/3 dealiasing rule.
    pub fn new(n: usize) -> Result<Self> {
        Self::with_dealias(n, 2, 3)
    }

    /// Grid with a dealias fraction `num/den` in `(0, 1]`.
    pub fn with_dealias(n: usize, num: usize, den: usize) -> Result<Self> {
        if n < MIN_RESOLUTION || !n.is_multiple_of(2) {
            return Err(Error::invalid(format!(
                "resolution must be even and >= {MIN_RESOLUTION}, got {n}"
            )));
        }
        if den == 0 || num == 0 || num > den {
            return Err(Error::invalid(format!(
                "dealias fraction {num}/{den} must lie in (0, 1]"
            )));
        }
        Ok(Self {
            n,
            dealias_num: num,
            dealias_den: den,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of grid points, `n³`.
    pub fn len(&self) -> usize {
        self.n * self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn domain_length(&self) -> f64 {
        2.0 * PI
    }

    /// Torus volume `(2π)³`.
    pub fn volume(&self) -> f64 {
        let l = self.domain_length();
        l * l * l
    }

    pub fn dealias_fraction(&self) -> (usize, usize) {
        (self.dealias_num, self.dealias_den)
    }

    /// Largest retained `max_j |k_j|`, `⌊fraction · n/2⌋`.
    pub fn dealias_cutoff(&self) -> i64 {
        ((self.dealias_num * (self.n / 2)) / self.dealias_den) as i64
    }

    /// `x_i = 2π i / n`.
    pub fn sample_point(&self, i: usize) -> f64 {
        2.0 * PI * i as f64 / self.n as f64
    }

    /// Signed wavenumber carried by FFT index `i`.
    pub fn wavenumber(&self, i: usize) -> i64 {
        if i <= self.n / 2 {
            i as i64
        } else {
            i as i64 - self.n as i64
        }
    }

    /// FFT index of a signed wavenumber, if representable.
    pub fn index_of(&self, k: i64) -> Option<usize> {
        let half = (self.n / 2) as i64;
        if k.abs() > half {
            return None;
        }
        Some(k.rem_euclid(self.n as i64) as usize)
    }

    /// Flat array position of a wavevector.
    pub fn flat_index(&self, k: [i64; 3]) -> Option<usize> {
        let i1 = self.index_of(k[0])?;
        let i2 = self.index_of(k[1])?;
        let i3 = self.index_of(k[2])?;
        Some((i1 * self.n + i2) * self.n + i3)
    }

    /// Wavevector stored at a flat array position.
    pub fn wavevector_at(&self, flat: usize) -> WaveVector {
        let n = self.n;
        let i3 = flat % n;
        let i2 = (flat / n) % n;
        let i1 = flat / (n * n);
        WaveVector::new(
            self.wavenumber(i1),
            self.wavenumber(i2),
            self.wavenumber(i3),
        )
    }

    /// Whether a mode touches the Nyquist plane on any axis. Such modes have
    /// no real-valued derivative and are dropped by every field constructor.
    pub fn is_nyquist(&self, k: &WaveVector) -> bool {
        let half = (self.n / 2) as i64;
        k.components().iter().any(|c| c.abs() == half)
    }

    /// Whether a mode survives the dealias mask.
    pub fn is_retained(&self, k: &WaveVector) -> bool {
        k.max_abs() <= self.dealias_cutoff()
    }

    /// Iterator over `(flat index, wavevector)` for every stored mode.
    pub fn modes(&self) -> impl Iterator<Item = (usize, WaveVector)> + '_ {
        (0..self.len()).map(move |i| (i, self.wavevector_at(i)))
    }

    pub(crate) fn check_same(&self, other: &GridSpec) -> Result<()> {
        if self != other {
            return Err(Error::invalid(format!(
                "grid mismatch: n={} vs n={}",
                self.n, other.n
            )));
        }
        Ok(())
    }
}

/// Integer wavevector `k = (k₁, k₂, k₃)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WaveVector([i64; 3]);

impl WaveVector {
    pub const ZERO: WaveVector = WaveVector([0, 0, 0]);

    pub fn new(k1: i64, k2: i64, k3: i64) -> Self {
        WaveVector([k1, k2, k3])
    }

    pub fn components(&self) -> [i64; 3] {
        self.0
    }

    pub fn as_f64(&self) -> [f64; 3] {
        [self.0[0] as f64, self.0[1] as f64, self.0[2] as f64]
    }

    pub fn norm_sq(&self) -> i64 {
        self.0.iter().map(|c| c * c).sum()
    }

    pub fn norm(&self) -> f64 {
        (self.norm_sq() as f64).sqrt()
    }

    pub fn max_abs(&self) -> i64 {
        self.0.iter().map(|c| c.abs()).max().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.0 == [0, 0, 0]
    }

    pub fn neg(&self) -> Self {
        WaveVector([-self.0[0], -self.0[1], -self.0[2]])
    }
}

impl From<[i64; 3]> for WaveVector {
    fn from(k: [i64; 3]) -> Self {
        WaveVector(k)
    }
}

/// All `k` with `max_j |k_j| ≤ kmax`, in lexicographic order of `(k₁, k₂, k₃)`.
pub fn enumerate_wavevectors(grid: &GridSpec, kmax: usize) -> Result<Vec<WaveVector>> {
    if kmax > grid.n() / 2 {
        return Err(Error::invalid(format!(
            "kmax {kmax} exceeds n/2 = {}",
            grid.n() / 2
        )));
    }
    let m = kmax as i64;
    let mut out = Vec::with_capacity((2 * kmax + 1).pow(3));
    for k1 in -m..=m {
        for k2 in -m..=m {
            for k3 in -m..=m {
                out.push(WaveVector::new(k1, k2, k3));
            }
        }
    }
    Ok(out)
}

/// Forward transform of `n³` real samples to coefficients of `Σ ĉ(k) e^{ik·x}`.
pub fn transform_forward(grid: &GridSpec, samples: &[f64]) -> Result<Vec<Complex64>> {
    if samples.len() != grid.len() {
        return Err(Error::invalid(format!(
            "expected {} samples, got {}",
            grid.len(),
            samples.len()
        )));
    }
    let mut data: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft3(grid, &mut data, Direction::Forward);
    let scale = 1.0 / grid.len() as f64;
    data.iter_mut().for_each(|c| *c *= scale);
    Ok(data)
}

/// Inverse transform; returns the real part of the synthesized samples.
pub fn transform_inverse(grid: &GridSpec, coeffs: &[Complex64]) -> Result<Vec<f64>> {
    if coeffs.len() != grid.len() {
        return Err(Error::invalid(format!(
            "expected {} coefficients, got {}",
            grid.len(),
            coeffs.len()
        )));
    }
    let mut data = coeffs.to_vec();
    fft3(grid, &mut data, Direction::Inverse);
    Ok(data.into_iter().map(|c| c.re).collect())
}

/// Inverse transforms of two real fields with one complex FFT.
pub(crate) fn transform_inverse_pair(
    grid: &GridSpec,
    a: &[Complex64],
    b: &[Complex64],
) -> (Vec<f64>, Vec<f64>) {
    let i = Complex64::new(0.0, 1.0);
    let mut data: Vec<Complex64> = a.iter().zip(b).map(|(x, y)| x + i * y).collect();
    fft3(grid, &mut data, Direction::Inverse);
    data.into_iter().map(|c| (c.re, c.im)).unzip()
}

/// Forward transforms of two real sample arrays with one complex FFT,
/// separated through `Ẑ(k) = P̂(k) + i Q̂(k)` and Hermitian symmetry.
pub(crate) fn transform_forward_pair(
    grid: &GridSpec,
    p: &[f64],
    q: &[f64],
) -> (Vec<Complex64>, Vec<Complex64>) {
    let n = grid.n();
    let mut z: Vec<Complex64> = p
        .iter()
        .zip(q)
        .map(|(&x, &y)| Complex64::new(x, y))
        .collect();
    fft3(grid, &mut z, Direction::Forward);
    let scale = 0.5 / grid.len() as f64;
    let neg = |i: usize| (n - i) % n;
    let mut pc = vec![Complex64::new(0.0, 0.0); z.len()];
    let mut qc = vec![Complex64::new(0.0, 0.0); z.len()];
    for i1 in 0..n {
        for i2 in 0..n {
            for i3 in 0..n {
                let f = (i1 * n + i2) * n + i3;
                let m = (neg(i1) * n + neg(i2)) * n + neg(i3);
                let (zk, zm) = (z[f], z[m].conj());
                pc[f] = (zk + zm) * scale;
                qc[f] = Complex64::new(0.0, -1.0) * (zk - zm) * scale;
            }
        }
    }
    (pc, qc)
}

/// Zero every coefficient outside the dealias mask. Idempotent.
pub fn dealias(grid: &GridSpec, coeffs: &[Complex64]) -> Vec<Complex64> {
    let mut out = coeffs.to_vec();
    dealias_in_place(grid, &mut out);
    out
}

pub(crate) fn dealias_in_place(grid: &GridSpec, coeffs: &mut [Complex64]) {
    let n = grid.n();
    let cut = grid.dealias_cutoff();
    let keep: Vec<bool> = (0..n).map(|i| grid.wavenumber(i).abs() <= cut).collect();
    for (flat, c) in coeffs.iter_mut().enumerate() {
        let i3 = flat % n;
        let i2 = (flat / n) % n;
        let i1 = flat / (n * n);
        if !(keep[i1] && keep[i2] && keep[i3]) {
            *c = Complex64::new(0.0, 0.0);
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub(crate) enum Direction {
    Forward,
    Inverse,
}

type PlanKey = (usize, Direction);
type PlanCache = Mutex<HashMap<PlanKey, Arc<dyn Fft<f64>>>>;

fn plan(n: usize, dir: Direction) -> Arc<dyn Fft<f64>> {
    static PLANS: OnceLock<PlanCache> = OnceLock::new();
    let cache = PLANS.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("fft plan cache poisoned");
    guard
        .entry((n, dir))
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            match dir {
                Direction::Forward => planner.plan_fft_forward(n),
                Direction::Inverse => planner.plan_fft_inverse(n),
            }
        })
        .clone()
}

/// Unnormalized in-place 3-D FFT. Each 1-D line is transformed independently,
/// so the result does not depend on how lines are spread over threads. Strided
/// axes are transposed into contiguous lines and transformed in batches.
pub(crate) fn fft3(grid: &GridSpec, data: &mut [Complex64], dir: Direction) {
    let n = grid.n();
    let nn = n * n;
    let fft = plan(n, dir);
    let scratch = || vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];

    // axis 3: contiguous lines
    data.par_chunks_mut(nn)
        .for_each_init(scratch, |s, slab| fft.process_with_scratch(slab, s));

    // axis 2: transpose each n×n slab
    data.par_chunks_mut(nn).for_each_init(
        || (vec![Complex64::new(0.0, 0.0); nn], scratch()),
        |(buf, s), slab| {
            transpose(slab, buf, n, n);
            fft.process_with_scratch(buf, s);
            transpose(buf, slab, n, n);
        },
    );

    // axis 1: view as n × n² and transpose into a reused buffer
    thread_local! {
        static AXIS1: RefCell<Vec<Complex64>> = const { RefCell::new(Vec::new()) };
    }
    AXIS1.with_borrow_mut(|buf| {
        buf.resize(data.len(), Complex64::new(0.0, 0.0));
        let src: &[Complex64] = data;
        buf.par_chunks_mut(n * 64)
            .enumerate()
            .for_each_init(scratch, |s, (b, chunk)| {
                for (r, line) in chunk.chunks_mut(n).enumerate() {
                    let j = b * 64 + r;
                    for (i1, v) in line.iter_mut().enumerate() {
                        *v = src[i1 * nn + j];
                    }
                }
                fft.process_with_scratch(chunk, s);
            });
        data.par_chunks_mut(nn).enumerate().for_each(|(i1, plane)| {
            for (j, v) in plane.iter_mut().enumerate() {
                *v = buf[j * n + i1];
            }
        });
    });
}

/// `dst[c·rows + r] = src[r·cols + c]`.
fn transpose(src: &[Complex64], dst: &mut [Complex64], rows: usize, cols: usize) {
    for r in 0..rows {
        for c in 0..cols {
            dst[c * rows + r] = src[r * cols + c];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize) -> GridSpec {
        GridSpec::new(n).unwrap()
    }

    #[test]
    fn paired_transforms_match_single() {
        let g = grid(8);
        let p: Vec<f64> = (0..g.len())
            .map(|i| ((i * 7919) % 97) as f64 / 97.0 - 0.5)
            .collect();
        let q: Vec<f64> = (0..g.len())
            .map(|i| ((i * 104729) % 89) as f64 / 89.0)
            .collect();
        let (pc, qc) = transform_forward_pair(&g, &p, &q);
        let (ps, qs) = (
            transform_forward(&g, &p).unwrap(),
            transform_forward(&g, &q).unwrap(),
        );
        for f in 0..g.len() {
            assert!((pc[f] - ps[f]).norm() < 1e-15 && (qc[f] - qs[f]).norm() < 1e-15);
        }
        let (pb, qb) = transform_inverse_pair(&g, &ps, &qs);
        for f in 0..g.len() {
            assert!((pb[f] - p[f]).abs() < 1e-14 && (qb[f] - q[f]).abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_small_or_odd_resolution() {
        assert!(GridSpec::new(6).is_err());
        assert!(GridSpec::new(9).is_err());
        assert!(GridSpec::new(8).is_ok());
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(
            enumerate_wavevectors(&grid(8), 0).unwrap(),
            vec![WaveVector::ZERO]
        );
        assert_eq!(enumerate_wavevectors(&grid(8), 1).unwrap().len(), 27);
        assert_eq!(enumerate_wavevectors(&grid(16), 2).unwrap().len(), 125);
        assert!(enumerate_wavevectors(&grid(8), 5).is_err());
    }

    #[test]
    fn enumeration_is_lexicographic() {
        let ks = enumerate_wavevectors(&grid(8), 2).unwrap();
        assert!(ks.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(ks[0], WaveVector::new(-2, -2, -2));
    }

    #[test]
    fn wavevector_norm_zero_iff_zero() {
        assert_eq!(WaveVector::ZERO.norm(), 0.0);
        assert!(WaveVector::new(0, 0, 1).norm() > 0.0);
        assert_eq!(WaveVector::new(1, 2, 2).norm(), 3.0);
    }

    #[test]
    fn index_round_trip() {
        let g = grid(8);
        for i in 0..8 {
            assert_eq!(g.index_of(g.wavenumber(i)), Some(i));
        }
        assert_eq!(g.index_of(5), None);
        for flat in [0, 17, 300, 511] {
            let k = g.wavevector_at(flat);
            assert_eq!(g.flat_index(k.components()), Some(flat));
        }
    }

    #[test]
    fn constant_has_only_dc() {
        let g = grid(8);
        let c = transform_forward(&g, &vec![1.0; g.len()]).unwrap();
        assert!((c[0] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!(c[1..].iter().all(|z| z.norm() < 1e-15));
    }

    #[test]
    fn cosine_splits_into_two_modes() {
        let g = grid(8);
        let n = g.n();
        let mut s = vec![0.0; g.len()];
        for (flat, v) in s.iter_mut().enumerate() {
            *v = g.sample_point(flat / (n * n)).cos();
        }
        let c = transform_forward(&g, &s).unwrap();
        let p = g.flat_index([1, 0, 0]).unwrap();
        let m = g.flat_index([-1, 0, 0]).unwrap();
        for (i, z) in c.iter().enumerate() {
            let expect = if i == p || i == m { 0.5 } else { 0.0 };
            assert!(
                (z - Complex64::new(expect, 0.0)).norm() < 1e-15,
                "index {i}: {z}"
            );
        }
    }

    #[test]
    fn round_trip_random_samples() {
        let g = grid(16);
        let s: Vec<f64> = (0..g.len())
            .map(|i| ((i * 7919) % 1013) as f64 / 1013.0 - 0.5)
            .collect();
        let back = transform_inverse(&g, &transform_forward(&g, &s).unwrap()).unwrap();
        let scale = s.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for (a, b) in s.iter().zip(&back) {
            assert!((a - b).abs() <= 1e-13 * scale);
        }
    }

    #[test]
    fn forward_of_real_data_is_hermitian() {
        let g = grid(8);
        let s: Vec<f64> = (0..g.len()).map(|i| ((i * 31) % 17) as f64).collect();
        let c = transform_forward(&g, &s).unwrap();
        for (flat, k) in g.modes() {
            if g.is_nyquist(&k) {
                continue;
            }
            let neg = g.flat_index(k.neg().components()).unwrap();
            assert!((c[neg] - c[flat].conj()).norm() < 1e-13);
        }
    }

    #[test]
    fn size_mismatch_is_rejected() {
        let g = grid(8);
        assert!(transform_forward(&g, &[0.0; 10]).is_err());
        assert!(transform_inverse(&g, &[Complex64::new(0.0, 0.0); 10]).is_err());
    }

    #[test]
    fn dealias_mask() {
        let g = grid(8);
        assert_eq!(g.dealias_cutoff(), 2);
        let mut c = vec![Complex64::new(0.0, 0.0); g.len()];
        c[g.flat_index([1, -1, 1]).unwrap()] = Complex64::new(1.0, 2.0);
        assert_eq!(dealias(&g, &c), c);

        let mut hi = vec![Complex64::new(0.0, 0.0); g.len()];
        hi[g.flat_index([4, 0, 0]).unwrap()] = Complex64::new(1.0, 0.0);
        assert!(dealias(&g, &hi).iter().all(|z| z.norm() == 0.0));

        let noisy: Vec<Complex64> = (0..g.len())
            .map(|i| Complex64::new(i as f64, 1.0))
            .collect();
        let once = dealias(&g, &noisy);
        assert_eq!(dealias(&g, &once), once);
    }

    #[test]
    fn parseval_matches_quadrature() {
        let g = grid(16);
        let n = g.n();
        let s: Vec<f64> = (0..g.len())
            .map(|flat| {
                let x = g.sample_point(flat / (n * n));
                let y = g.sample_point((flat / n) % n);
                let z = g.sample_point(flat % n);
                (x + 2.0 * y).sin() + 0.3 * (3.0 * z).cos() - 0.7 * (x - y + z).cos() + 0.2
            })
            .collect();
        let c = transform_forward(&g, &s).unwrap();
        let spectral = g.volume() * c.iter().map(|z| z.norm_sqr()).sum::<f64>();
        let h = g.domain_length() / n as f64;
        let quad = h * h * h * s.iter().map(|v| v * v).sum::<f64>();
        assert!((spectral - quad).abs() <= 1e-12 * quad);
    }
}
