//! Discrete Fourier representation of real periodic fields on `[-π, π)`.
//!
//! A [`SpectralField`] stores the coefficients `f̂(k)` of the band-limited
//! interpolant
//!
//! ```text
//! f(x) = Σ_k f̂(k) e^{ikx},   k ∈ {-N/2+1, …, N/2}
//! ```
//!
//! with the `1/N` normalization on the forward transform, so that the `f̂(k)`
//! are true Fourier coefficients and Parseval reads
//! `‖f‖²_{L²} = 2π Σ_k |f̂(k)|²`.
//!
//! Coefficients are stored in FFT order: index `i` holds wavenumber `i` for
//! `i ≤ N/2` and `i - N` otherwise.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Tolerance of the conjugate-symmetry guard, relative to `max(1, max|f̂|)`.
pub const SYMMETRY_TOL: f64 = 1e-10;

struct GridInner {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

/// Equispaced collocation grid `x_j = -π + 2πj/N` on the torus.
///
/// Cloning is cheap; the FFT plans are shared.
#[derive(Clone)]
pub struct Grid {
    inner: Arc<GridInner>,
}

impl Grid {
    pub fn new(n: usize) -> Result<Self> {
        if n < 8 || n % 2 != 0 {
            return Err(Error::InvalidGrid { n });
        }
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        Ok(Self {
            inner: Arc::new(GridInner {
                n,
                forward,
                inverse,
            }),
        })
    }

    pub fn n(&self) -> usize {
        self.inner.n
    }

    pub fn spacing(&self) -> f64 {
        2.0 * PI / self.n() as f64
    }

    pub fn points(&self) -> Vec<f64> {
        let h = self.spacing();
        (0..self.n()).map(|j| -PI + h * j as f64).collect()
    }

    /// Wavenumber stored at FFT index `index`.
    pub fn wavenumber(&self, index: usize) -> i64 {
        let n = self.n();
        if index <= n / 2 {
            index as i64
        } else {
            index as i64 - n as i64
        }
    }

    /// FFT index of wavenumber `k`, if `k ∈ (-N/2, N/2]`.
    pub fn index(&self, k: i64) -> Option<usize> {
        let half = (self.n() / 2) as i64;
        if k > -half && k <= half {
            Some(if k >= 0 {
                k as usize
            } else {
                (k + self.n() as i64) as usize
            })
        } else {
            None
        }
    }

    /// Wavenumbers in storage order.
    pub fn wavenumbers(&self) -> impl Iterator<Item = i64> + '_ {
        (0..self.n()).map(move |i| self.wavenumber(i))
    }

    pub fn nyquist(&self) -> usize {
        self.n() / 2
    }

    /// Largest `|k|` kept by the 2/3-rule dealiasing.
    ///
    /// Retained modes satisfy `3|k| < N`, which keeps quadratic products
    /// alias-free for every even `N`. For `N` not divisible by three this is
    /// `⌊N/3⌋`.
    pub fn dealias_cutoff(&self) -> usize {
        (self.n() - 1) / 3
    }

    fn check_same(&self, other: &Grid) -> Result<()> {
        if self.n() == other.n() {
            Ok(())
        } else {
            Err(Error::GridMismatch {
                left: self.n(),
                right: other.n(),
            })
        }
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.n() == other.n()
    }
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid").field("n", &self.n()).finish()
    }
}

/// Fourier coefficients of a real periodic function.
///
/// A field built from physical samples remembers those samples, so that
/// converting it back to physical space reproduces them bit for bit. Any
/// operation that produces a new field drops them.
#[derive(Clone)]
pub struct SpectralField {
    grid: Grid,
    coeffs: Vec<Complex64>,
    samples: Option<Arc<[f64]>>,
}

impl SpectralField {
    pub fn zeros(grid: &Grid) -> Self {
        Self::from_raw(grid, vec![Complex64::new(0.0, 0.0); grid.n()])
    }

    /// Wraps a coefficient vector given in FFT order.
    ///
    /// The vector must have length `N` and be conjugate-symmetric within
    /// [`SYMMETRY_TOL`].
    pub fn from_coeffs(grid: &Grid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.n() {
            return Err(Error::ShapeMismatch {
                expected: grid.n(),
                found: coeffs.len(),
            });
        }
        let field = Self::from_raw(grid, coeffs);
        field.check_real()?;
        Ok(field)
    }

    /// Builds a real field from `(k, f̂(k))` pairs with `k ≥ 0`; the
    /// coefficient at `-k` is filled in by conjugation. Repeated wavenumbers
    /// accumulate.
    pub fn from_modes(grid: &Grid, modes: &[(i64, Complex64)]) -> Result<Self> {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); grid.n()];
        for &(k, c) in modes {
            let idx = match grid.index(k) {
                Some(i) if k >= 0 => i,
                _ => return Err(Error::WavenumberOutOfRange { k, n: grid.n() }),
            };
            if k == 0 || idx == grid.nyquist() {
                coeffs[idx] += Complex64::new(c.re, 0.0);
            } else {
                coeffs[idx] += c;
                coeffs[grid.n() - idx] += c.conj();
            }
        }
        Ok(Self::from_raw(grid, coeffs))
    }

    pub(crate) fn from_raw(grid: &Grid, coeffs: Vec<Complex64>) -> Self {
        debug_assert_eq!(coeffs.len(), grid.n());
        Self {
            grid: grid.clone(),
            coeffs,
            samples: None,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Coefficients in FFT order.
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// `f̂(k)`.
    ///
    /// # Panics
    /// If `k` is outside `(-N/2, N/2]`.
    pub fn coeff(&self, k: i64) -> Complex64 {
        match self.grid.index(k) {
            Some(i) => self.coeffs[i],
            None => panic!("wavenumber {k} not on grid with N = {}", self.grid.n()),
        }
    }

    pub fn mean(&self) -> f64 {
        self.coeffs[0].re
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Max-norm distance between the coefficient vectors.
    ///
    /// # Panics
    /// If the grids differ.
    pub fn max_abs_diff(&self, other: &SpectralField) -> f64 {
        assert_eq!(self.grid, other.grid, "grid mismatch");
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `max_k |f̂(k) - conj(f̂(-k))|`, including the self-paired `k = 0` and
    /// Nyquist entries.
    pub fn symmetry_defect(&self) -> f64 {
        let n = self.grid.n();
        (0..n)
            .map(|i| (self.coeffs[i] - self.coeffs[(n - i) % n].conj()).norm())
            .fold(0.0, f64::max)
    }

    /// Whether the field passes the reality check at [`SYMMETRY_TOL`].
    pub fn is_real(&self) -> bool {
        self.check_real().is_ok()
    }

    pub(crate) fn check_real(&self) -> Result<()> {
        let defect = self.symmetry_defect();
        if defect <= SYMMETRY_TOL * self.max_abs().max(1.0) {
            Ok(())
        } else {
            Err(Error::CorruptedField { defect })
        }
    }

    pub fn scale(&self, factor: f64) -> SpectralField {
        self.map_coeffs(|_, c| c * factor)
    }

    /// New field with coefficient at index `i` replaced by `op(k, f̂(k))`.
    pub(crate) fn map_coeffs(&self, op: impl Fn(i64, Complex64) -> Complex64) -> SpectralField {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| op(self.grid.wavenumber(i), c))
            .collect();
        Self::from_raw(&self.grid, coeffs)
    }

    fn zip_with(
        &self,
        other: &SpectralField,
        op: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> SpectralField {
        assert_eq!(self.grid, other.grid, "grid mismatch");
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&a, &b)| op(a, b))
            .collect();
        Self::from_raw(&self.grid, coeffs)
    }

    /// Physical samples, see [`inverse_transform`].
    pub fn to_samples(&self) -> Result<Vec<f64>> {
        inverse_transform(self)
    }

    pub(crate) fn cached_samples(&self) -> Option<&[f64]> {
        self.samples.as_deref()
    }

    /// Zeroes a mean that is pure rounding noise while keeping the cached
    /// physical samples.
    pub(crate) fn clear_rounding_mean(&mut self) {
        self.coeffs[0] = Complex64::new(0.0, 0.0);
    }

    /// Zeroes every mode with `|k|` above the dealiasing cutoff, Nyquist
    /// included.
    pub fn truncated(&self) -> SpectralField {
        let cutoff = self.grid.dealias_cutoff() as i64;
        self.map_coeffs(|k, c| {
            if k.abs() > cutoff {
                Complex64::new(0.0, 0.0)
            } else {
                c
            }
        })
    }
}

impl fmt::Debug for SpectralField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpectralField")
            .field("n", &self.grid.n())
            .field("coeffs", &self.coeffs)
            .finish()
    }
}

impl PartialEq for SpectralField {
    fn eq(&self, other: &Self) -> bool {
        self.grid == other.grid && self.coeffs == other.coeffs
    }
}

impl Add for &SpectralField {
    type Output = SpectralField;
    fn add(self, rhs: &SpectralField) -> SpectralField {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &SpectralField {
    type Output = SpectralField;
    fn sub(self, rhs: &SpectralField) -> SpectralField {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Neg for &SpectralField {
    type Output = SpectralField;
    fn neg(self) -> SpectralField {
        self.map_coeffs(|_, c| -c)
    }
}

impl Mul<f64> for &SpectralField {
    type Output = SpectralField;
    fn mul(self, rhs: f64) -> SpectralField {
        self.scale(rhs)
    }
}

/// `f̂(k) = (1/N) Σ_j s_j e^{-ik x_j}`.
///
/// The result is made exactly conjugate-symmetric (the input is real, so
/// this only removes rounding noise). The samples are cached on the field.
pub fn forward_transform(samples: &[f64], grid: &Grid) -> Result<SpectralField> {
    let n = grid.n();
    if samples.len() != n {
        return Err(Error::ShapeMismatch {
            expected: n,
            found: samples.len(),
        });
    }
    let raw = analyze(samples, grid);
    let coeffs = (0..n)
        .map(|i| (raw[i] + raw[(n - i) % n].conj()) * 0.5)
        .collect();
    Ok(SpectralField {
        grid: grid.clone(),
        coeffs,
        samples: Some(samples.into()),
    })
}

/// `s_j = Σ_k f̂(k) e^{ik x_j}`, after checking that the field is real.
pub fn inverse_transform(field: &SpectralField) -> Result<Vec<f64>> {
    field.check_real()?;
    if let Some(samples) = field.cached_samples() {
        return Ok(samples.to_vec());
    }
    let values = synthesize_complex(&field.coeffs, &field.grid);
    let residue = values.iter().map(|v| v.im.abs()).fold(0.0, f64::max);
    if residue > SYMMETRY_TOL * field.max_abs().max(1.0) {
        return Err(Error::CorruptedField { defect: residue });
    }
    Ok(values.into_iter().map(|v| v.re).collect())
}

/// Output equals input with `f̂(0) = 0`.
pub fn project_mean_zero(field: &SpectralField) -> SpectralField {
    let mut coeffs = field.coeffs.clone();
    coeffs[0] = Complex64::new(0.0, 0.0);
    SpectralField::from_raw(&field.grid, coeffs)
}

/// Coefficients of the pointwise product `a·b` under the 2/3 rule: modes
/// above [`Grid::dealias_cutoff`] are removed from both factors and from the
/// result.
pub fn dealiased_product(a: &SpectralField, b: &SpectralField) -> Result<SpectralField> {
    a.grid.check_same(&b.grid)?;
    let grid = &a.grid;
    let pa = synthesize_real(&a.truncated().coeffs, grid);
    let pb = synthesize_real(&b.truncated().coeffs, grid);
    let prod: Vec<f64> = pa.iter().zip(&pb).map(|(x, y)| x * y).collect();
    let raw = analyze(&prod, grid);
    let n = grid.n();
    let cutoff = grid.dealias_cutoff() as i64;
    let coeffs = (0..n)
        .map(|i| {
            if grid.wavenumber(i).abs() > cutoff {
                Complex64::new(0.0, 0.0)
            } else {
                (raw[i] + raw[(n - i) % n].conj()) * 0.5
            }
        })
        .collect();
    Ok(SpectralField::from_raw(grid, coeffs))
}

/// L² inner product `∫ a b dx = 2π Σ_k Re(â(k) conj(b̂(k)))`.
pub fn inner_product(a: &SpectralField, b: &SpectralField) -> Result<f64> {
    a.grid.check_same(&b.grid)?;
    let s: f64 = a
        .coeffs
        .iter()
        .zip(&b.coeffs)
        .map(|(x, y)| (x * y.conj()).re)
        .sum();
    Ok(2.0 * PI * s)
}

// e^{-ik x_j} = (-1)^k e^{-2πijk/N}, and (-1)^k = (-1)^i for the FFT index i.
fn analyze(samples: &[f64], grid: &Grid) -> Vec<Complex64> {
    let n = grid.n();
    let mut buf: Vec<Complex64> = samples.iter().map(|&s| Complex64::new(s, 0.0)).collect();
    grid.inner.forward.process(&mut buf);
    let scale = 1.0 / n as f64;
    for (i, c) in buf.iter_mut().enumerate() {
        *c *= if i % 2 == 0 { scale } else { -scale };
    }
    buf
}

fn synthesize_complex(coeffs: &[Complex64], grid: &Grid) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = coeffs
        .iter()
        .enumerate()
        .map(|(i, &c)| if i % 2 == 0 { c } else { -c })
        .collect();
    grid.inner.inverse.process(&mut buf);
    buf
}

pub(crate) fn synthesize_real(coeffs: &[Complex64], grid: &Grid) -> Vec<f64> {
    synthesize_complex(coeffs, grid)
        .into_iter()
        .map(|v| v.re)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize) -> Grid {
        Grid::new(n).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn grid_rejects_odd_and_small() {
        assert!(matches!(Grid::new(65), Err(Error::InvalidGrid { n: 65 })));
        assert!(matches!(Grid::new(6), Err(Error::InvalidGrid { n: 6 })));
        assert!(Grid::new(8).is_ok());
    }

    #[test]
    fn grid_points_and_wavenumbers() {
        let g = grid(8);
        let x = g.points();
        assert_eq!(x[0], -PI);
        for w in x.windows(2) {
            assert!((w[1] - w[0] - g.spacing()).abs() < 1e-15);
        }
        let ks: Vec<i64> = g.wavenumbers().collect();
        assert_eq!(ks, vec![0, 1, 2, 3, 4, -3, -2, -1]);
        assert_eq!(g.index(4), Some(4));
        assert_eq!(g.index(-4), None);
        assert_eq!(g.index(-1), Some(7));
        assert_eq!(grid(64).dealias_cutoff(), 21);
        assert_eq!(grid(48).dealias_cutoff(), 15);
    }

    #[test]
    fn forward_of_cosine_and_constant() {
        let g = grid(16);
        let cos: Vec<f64> = g.points().iter().map(|x| x.cos()).collect();
        let f = forward_transform(&cos, &g).unwrap();
        for k in g.wavenumbers() {
            let expect = if k.abs() == 1 { 0.5 } else { 0.0 };
            assert!((f.coeff(k) - c(expect, 0.0)).norm() < 1e-15, "k={k}");
        }
        let one = forward_transform(&[1.0; 16], &g).unwrap();
        assert!((one.coeff(0) - c(1.0, 0.0)).norm() < 1e-15);
        assert!(one.max_abs_diff(&SpectralField::from_modes(&g, &[(0, c(1.0, 0.0))]).unwrap()) < 1e-15);
    }

    #[test]
    fn forward_rejects_wrong_length() {
        let g = grid(8);
        assert!(matches!(
            forward_transform(&[0.0; 7], &g),
            Err(Error::ShapeMismatch { expected: 8, found: 7 })
        ));
    }

    #[test]
    fn inverse_of_cosine_mode_and_zero() {
        let g = grid(16);
        let f = SpectralField::from_modes(&g, &[(1, c(0.5, 0.0))]).unwrap();
        let s = inverse_transform(&f).unwrap();
        for (x, v) in g.points().iter().zip(&s) {
            assert!((v - x.cos()).abs() < 1e-15);
        }
        let z = inverse_transform(&SpectralField::zeros(&g)).unwrap();
        assert!(z.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn inverse_rejects_asymmetric_spectrum() {
        let g = grid(8);
        let mut coeffs = vec![c(0.0, 0.0); 8];
        coeffs[1] = c(1.0, 0.0);
        assert!(matches!(
            SpectralField::from_coeffs(&g, coeffs.clone()),
            Err(Error::CorruptedField { .. })
        ));
        let f = SpectralField::from_raw(&g, coeffs);
        assert!(matches!(inverse_transform(&f), Err(Error::CorruptedField { .. })));
    }

    #[test]
    fn cached_samples_round_trip_bit_exact() {
        let g = grid(32);
        let s: Vec<f64> = g.points().iter().map(|x| (3.0 * x).sin() + 0.1 * x.cos()).collect();
        let f = forward_transform(&s, &g).unwrap();
        assert_eq!(inverse_transform(&f).unwrap(), s);
        // derived fields forget the samples
        assert!(f.scale(1.0).cached_samples().is_none());
    }

    #[test]
    fn mean_projection() {
        let g = grid(16);
        let f = SpectralField::from_modes(&g, &[(0, c(3.7, 0.0))]).unwrap();
        assert_eq!(project_mean_zero(&f), SpectralField::zeros(&g));

        let one_plus_cos = SpectralField::from_modes(&g, &[(0, c(1.0, 0.0)), (1, c(0.5, 0.0))]).unwrap();
        let cos = SpectralField::from_modes(&g, &[(1, c(0.5, 0.0))]).unwrap();
        assert_eq!(project_mean_zero(&one_plus_cos), cos);
        assert_eq!(project_mean_zero(&cos), cos);
    }

    #[test]
    fn product_of_cosines() {
        let g = grid(32);
        let cos = SpectralField::from_modes(&g, &[(1, c(0.5, 0.0))]).unwrap();
        let p = dealiased_product(&cos, &cos).unwrap();
        let expect =
            SpectralField::from_modes(&g, &[(0, c(0.5, 0.0)), (2, c(0.25, 0.0))]).unwrap();
        assert!(p.max_abs_diff(&expect) < 1e-15);
        let zero = dealiased_product(&cos, &SpectralField::zeros(&g)).unwrap();
        assert_eq!(zero.max_abs(), 0.0);
    }

    #[test]
    fn product_removes_modes_outside_band() {
        let g = grid(16);
        // cutoff 5: the k = 6 factor is dropped before multiplying
        let a = SpectralField::from_modes(&g, &[(6, c(0.5, 0.0))]).unwrap();
        let b = SpectralField::from_modes(&g, &[(1, c(0.5, 0.0))]).unwrap();
        assert_eq!(dealiased_product(&a, &b).unwrap().max_abs(), 0.0);
        // 4 + 3 = 7 lies above the band and is removed afterwards
        let a = SpectralField::from_modes(&g, &[(4, c(0.5, 0.0))]).unwrap();
        let b = SpectralField::from_modes(&g, &[(3, c(0.5, 0.0))]).unwrap();
        let p = dealiased_product(&a, &b).unwrap();
        assert!((p.coeff(1) - c(0.25, 0.0)).norm() < 1e-16);
        assert_eq!(p.coeff(7), c(0.0, 0.0));
        assert_eq!(p.coeff(-7), c(0.0, 0.0));
    }

    #[test]
    fn product_rejects_grid_mismatch() {
        let a = SpectralField::zeros(&grid(8));
        let b = SpectralField::zeros(&grid(16));
        assert!(matches!(
            dealiased_product(&a, &b),
            Err(Error::GridMismatch { left: 8, right: 16 })
        ));
    }

    #[test]
    fn from_modes_rejects_out_of_range() {
        let g = grid(8);
        assert!(SpectralField::from_modes(&g, &[(5, c(1.0, 0.0))]).is_err());
        assert!(SpectralField::from_modes(&g, &[(-1, c(1.0, 0.0))]).is_err());
    }
}
