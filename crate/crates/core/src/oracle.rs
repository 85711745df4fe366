//! Slow reference implementations.
//!
//! Nothing here shares code with the production paths it is used to check:
//! transforms are direct `O(N²)` sums, products are explicit truncated
//! convolutions, matrix exponentials use scaling and squaring. Used by the
//! test suites and by `vwave verify`.

use num_complex::Complex64;
use rand::Rng;

use crate::model::{ModelParams, WaveState};
use crate::spectral::{Grid, SpectralField};

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// `f̂(k) = (1/N) Σ_j s_j e^{-ik x_j}` by direct summation, FFT order.
pub fn direct_dft(samples: &[f64], grid: &Grid) -> Vec<Complex64> {
    let n = grid.n();
    let x = grid.points();
    (0..n)
        .map(|i| {
            let k = grid.wavenumber(i) as f64;
            samples
                .iter()
                .zip(&x)
                .map(|(&s, &xj)| Complex64::from_polar(s, -k * xj))
                .sum::<Complex64>()
                / n as f64
        })
        .collect()
}

/// `s_j = Σ_k f̂(k) e^{ik x_j}` by direct summation.
pub fn direct_synthesis(coeffs: &[Complex64], grid: &Grid) -> Vec<Complex64> {
    grid.points()
        .iter()
        .map(|&xj| {
            coeffs
                .iter()
                .enumerate()
                .map(|(i, &c)| c * Complex64::from_polar(1.0, grid.wavenumber(i) as f64 * xj))
                .sum()
        })
        .collect()
}

fn per_mode(f: &SpectralField, symbol: impl Fn(i64) -> Complex64) -> SpectralField {
    let grid = f.grid();
    let coeffs = (0..grid.n())
        .map(|i| f.coeffs()[i] * symbol(grid.wavenumber(i)))
        .collect();
    SpectralField::from_raw(grid, coeffs)
}

fn nyquist_cleared(f: SpectralField) -> SpectralField {
    let nyq = f.grid().nyquist() as i64;
    f.map_coeffs(|k, c| if k == nyq { zero() } else { c })
}

/// `-i sgn(k)` applied mode by mode.
pub fn hilbert(f: &SpectralField) -> SpectralField {
    nyquist_cleared(per_mode(f, |k| match k {
        k if k > 0 => Complex64::new(0.0, -1.0),
        k if k < 0 => Complex64::new(0.0, 1.0),
        _ => zero(),
    }))
}

/// `|k|^s` applied mode by mode, `0` at `k = 0`.
pub fn lambda_pow(f: &SpectralField, s: f64) -> SpectralField {
    per_mode(f, |k| {
        if k == 0 {
            zero()
        } else {
            Complex64::new((k as f64).abs().powf(s), 0.0)
        }
    })
}

/// `(ik)^n` applied mode by mode.
pub fn derivative(f: &SpectralField, order: u32) -> SpectralField {
    let out = per_mode(f, |k| Complex64::new(0.0, k as f64).powu(order));
    if order % 2 == 1 {
        nyquist_cleared(out)
    } else {
        out
    }
}

/// Exact convolution `Σ_m â(m) b̂(k-m)` over the dealiased band
/// `|m|, |k-m|, |k| ≤ cutoff`.
pub fn truncated_convolution(a: &SpectralField, b: &SpectralField) -> SpectralField {
    let grid = a.grid();
    assert_eq!(grid, b.grid(), "grid mismatch");
    let cutoff = grid.dealias_cutoff() as i64;
    let mut out = vec![zero(); grid.n()];
    for k in -cutoff..=cutoff {
        let mut sum = zero();
        for m in -cutoff..=cutoff {
            let rest = k - m;
            if rest.abs() <= cutoff {
                sum += a.coeff(m) * b.coeff(rest);
            }
        }
        out[grid.index(k).unwrap()] = sum;
    }
    SpectralField::from_raw(grid, out)
}

/// `ℋ(fg) - f ℋg` through truncated convolutions.
pub fn commutator_hilbert(f: &SpectralField, g: &SpectralField) -> SpectralField {
    &hilbert(&truncated_convolution(f, g)) - &truncated_convolution(f, &hilbert(g))
}

/// `∂x²(fg) - f ∂x²g` in its unexpanded form, through truncated convolutions.
pub fn commutator_dxx(f: &SpectralField, g: &SpectralField) -> SpectralField {
    &derivative(&truncated_convolution(f, g), 2) - &truncated_convolution(f, &derivative(g, 2))
}

/// The six-term nonlinearity assembled from the oracle operators.
pub fn nonlinear_rhs_simplified(s: &WaveState, p: &ModelParams) -> SpectralField {
    let (f, ft) = (s.f(), s.ft());
    let hft = hilbert(ft);
    let h_dxx_f = hilbert(&derivative(f, 2));
    let terms = [
        (-1.0, lambda_pow(&truncated_convolution(&hft, &hft), 1.0)),
        (1.0, derivative(&commutator_hilbert(f, &lambda_pow(f, 1.0)), 1)),
        (p.beta, derivative(&commutator_hilbert(f, &lambda_pow(f, 3.0)), 1)),
        (p.delta, derivative(&commutator_hilbert(&hft, &h_dxx_f), 1)),
        (p.delta, lambda_pow(&truncated_convolution(&hft, &h_dxx_f), 1.0)),
        (-p.delta, derivative(&commutator_dxx(f, &hft), 1)),
    ];
    sum_terms(f.grid(), &terms).scale(p.epsilon)
}

/// `ε(δ²∂x[∂x²,f]Λ∂xf - δ²∂x[ℋ,∂x²f]∂x²f)`: what the parent model adds to
/// the simplified one when `α₁ = α₂ = δ`.
pub fn full_model_extra_terms(s: &WaveState, p: &ModelParams) -> SpectralField {
    let f = s.f();
    let d2 = p.delta * p.delta;
    let dxx_f = derivative(f, 2);
    let terms = [
        (d2, derivative(&commutator_dxx(f, &lambda_pow(&derivative(f, 1), 1.0)), 1)),
        (-d2, derivative(&commutator_hilbert(&dxx_f, &dxx_f), 1)),
    ];
    sum_terms(f.grid(), &terms).scale(p.epsilon)
}

fn sum_terms(grid: &Grid, terms: &[(f64, SpectralField)]) -> SpectralField {
    terms
        .iter()
        .fold(SpectralField::zeros(grid), |acc, (w, t)| &acc + &t.scale(*w))
}

/// `‖Λ^s f‖²_{L²}` by synthesising `Λ^s f` on the grid with a direct sum and
/// applying the trapezoid rule. Exact for fields without a Nyquist mode.
pub fn sobolev_norm_sq_quadrature(f: &SpectralField, s: f64) -> f64 {
    let grid = f.grid();
    let g = if s == 0.0 { f.clone() } else { lambda_pow(f, s) };
    let values = direct_synthesis(g.coeffs(), grid);
    grid.spacing() * values.iter().map(|v| v.re * v.re).sum::<f64>()
}

/// `exp(tA)` for a 2×2 matrix by scaling and squaring a Taylor polynomial.
pub fn expm2(a: [[f64; 2]; 2], t: f64) -> [[f64; 2]; 2] {
    let norm = a.iter().flatten().map(|v| (v * t).abs()).sum::<f64>();
    let squarings = if norm > 0.125 {
        (norm / 0.125).log2().ceil() as u32
    } else {
        0
    };
    let h = t / 2f64.powi(squarings as i32);
    let b = [[a[0][0] * h, a[0][1] * h], [a[1][0] * h, a[1][1] * h]];
    let mul = |x: [[f64; 2]; 2], y: [[f64; 2]; 2]| {
        let mut z = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                z[i][j] = x[i][0] * y[0][j] + x[i][1] * y[1][j];
            }
        }
        z
    };
    let mut result = [[1.0, 0.0], [0.0, 1.0]];
    let mut term = result;
    for n in 1..=20 {
        term = mul(term, b);
        let inv = 1.0 / n as f64;
        for row in term.iter_mut() {
            for v in row.iter_mut() {
                *v *= inv;
            }
        }
        for i in 0..2 {
            for j in 0..2 {
                result[i][j] += term[i][j];
            }
        }
    }
    for _ in 0..squarings {
        result = mul(result, result);
    }
    result
}

/// Solution `(y, y')` at time `t` of `y'' + damping·y' + stiffness·y = 0`
/// in the underdamped regime, written as `e^{σt}(A cos ωt + B sin ωt)`.
pub fn damped_oscillator(y0: f64, v0: f64, damping: f64, stiffness: f64, t: f64) -> (f64, f64) {
    let sigma = -0.5 * damping;
    let omega = (stiffness - 0.25 * damping * damping).sqrt();
    assert!(omega > 0.0, "not underdamped");
    let a = y0;
    let b = (v0 - sigma * y0) / omega;
    let (s, c) = (omega * t).sin_cos();
    let e = (sigma * t).exp();
    let y = e * (a * c + b * s);
    let dy = e * ((sigma * a + omega * b) * c + (sigma * b - omega * a) * s);
    (y, dy)
}

/// Random real mean-zero field with modes `1..=band` and amplitudes
/// `|f̂(k)| ≲ k^{-decay}`; Nyquist and the mean are zero.
pub fn random_field<R: Rng>(grid: &Grid, rng: &mut R, band: usize, decay: f64) -> SpectralField {
    let band = band.min(grid.nyquist() - 1);
    let modes: Vec<(i64, Complex64)> = (1..=band as i64)
        .map(|k| {
            let scale = (k as f64).powf(-decay);
            let re: f64 = rng.gen_range(-1.0..1.0);
            let im: f64 = rng.gen_range(-1.0..1.0);
            (k, Complex64::new(re, im) * scale)
        })
        .collect();
    SpectralField::from_modes(grid, &modes).expect("modes inside the grid")
}

/// Random state inside the dealiased band.
pub fn random_state<R: Rng>(grid: &Grid, rng: &mut R, amplitude: f64) -> WaveState {
    let band = grid.dealias_cutoff();
    let f = random_field(grid, rng, band, 2.0).scale(amplitude);
    let ft = random_field(grid, rng, band, 2.0).scale(amplitude);
    WaveState::new(f, ft, 0.0).expect("valid random state")
}

/// Max-norm of `a - b`, divided by `max(1, max|b|)`.
pub fn relative_error(a: &SpectralField, b: &SpectralField) -> f64 {
    a.max_abs_diff(b) / b.max_abs().max(1.0)
}

/// `amplitude · cos(kx + phase)`.
pub fn cosine_mode(grid: &Grid, k: i64, amplitude: f64, phase: f64) -> SpectralField {
    SpectralField::from_modes(grid, &[(k, Complex64::from_polar(0.5 * amplitude, phase))])
        .expect("mode inside the grid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expm_matches_rotation() {
        let m = expm2([[0.0, 1.0], [-1.0, 0.0]], 2.0);
        assert!((m[0][0] - 2f64.cos()).abs() < 1e-14);
        assert!((m[0][1] - 2f64.sin()).abs() < 1e-14);
    }

    #[test]
    fn damped_oscillator_satisfies_its_ode() {
        let (d, c) = (0.3, 2.0);
        let h = 1e-4;
        let t = 1.3;
        let (y_m, _) = damped_oscillator(1.0, 0.5, d, c, t - h);
        let (y, dy) = damped_oscillator(1.0, 0.5, d, c, t);
        let (y_p, _) = damped_oscillator(1.0, 0.5, d, c, t + h);
        let ypp = (y_p - 2.0 * y + y_m) / (h * h);
        assert!((ypp + d * dy + c * y).abs() < 1e-6);
        assert!(((y_p - y_m) / (2.0 * h) - dy).abs() < 1e-7);
    }
}
