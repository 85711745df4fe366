//! Linear dispersion relation: analytic eigenvalues of each mode and their
//! measurement from a linear run.
//!
//! Mode `k` of the linear equation behaves like `e^{λt}` with
//! `λ± = -δk² ± i√(k + βk³)`. A run started from `Σ cos(kx)` is sampled
//! every step; for a real sequence `z_n = R e^{an} cos(bn + φ)` the quantity
//! `z_n² - z_{n-1} z_{n+1} = R² e^{2an} sin²b` is an exact envelope, so a
//! straight-line fit of its logarithm gives the decay rate, and the recurrence
//! `z_{n+1} + e^{2a} z_{n-1} = 2 e^{a} cos(b) z_n` then gives the frequency.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{linear_symbol, ModelParams, Variant, WaveState};
use crate::spectral::{Grid, SpectralField};
use crate::timestepper::Stepper;

/// The eigenvalue `λ₊` of mode `k` (non-negative imaginary part).
pub fn analytic_eigenvalue(k: i64, p: &ModelParams) -> Complex64 {
    let sym = linear_symbol(k, p);
    let sigma = -0.5 * sym.damping;
    if sym.discriminant <= 0.0 {
        Complex64::new(sigma, (-sym.discriminant).sqrt())
    } else {
        Complex64::new(sigma + sym.discriminant.sqrt(), 0.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DispersionRow {
    pub k: i64,
    pub analytic: Complex64,
    pub measured: Complex64,
}

impl DispersionRow {
    pub fn csv_header() -> &'static str {
        "k,re_lambda,im_lambda,re_lambda_measured,im_lambda_measured"
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{:.16e},{:.16e},{:.16e},{:.16e}",
            self.k, self.analytic.re, self.analytic.im, self.measured.re, self.measured.im
        )
    }
}

/// Decay rate and angular frequency `(Re λ, Im λ)` of a sampled damped
/// oscillation `z_n = z(n·dt)`.
pub fn fit_damped_oscillation(z: &[f64], dt: f64) -> Option<(f64, f64)> {
    if z.len() < 4 {
        return None;
    }
    let mut ts = Vec::new();
    let mut logs = Vec::new();
    for n in 1..z.len() - 1 {
        let r2 = z[n] * z[n] - z[n - 1] * z[n + 1];
        if r2 > 0.0 && r2.is_finite() {
            ts.push(n as f64 * dt);
            logs.push(0.5 * r2.ln());
        }
    }
    if ts.len() < 2 {
        return None;
    }
    let rate = least_squares_slope(&ts, &logs);

    let mu = (rate * dt).exp();
    let (mut num, mut den) = (0.0, 0.0);
    for n in 1..z.len() - 1 {
        num += z[n] * (z[n + 1] + mu * mu * z[n - 1]);
        den += z[n] * z[n];
    }
    let cos_b = (num / den / (2.0 * mu)).clamp(-1.0, 1.0);
    Some((rate, cos_b.acos() / dt))
}

fn least_squares_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Runs the linear model from `f = Σ_{k=1}^{kmax} cos(kx)`, `f_t = 0` and
/// measures `λ` of every mode.
///
/// Steps are a quarter of the fastest half-period; the run covers two
/// periods of the slowest mode.
pub fn measure_dispersion(p: &ModelParams, kmax: usize) -> Result<Vec<DispersionRow>> {
    if kmax == 0 {
        return Err(Error::InvalidSimConfig("kmax must be at least 1".into()));
    }
    let p = p.with_variant(Variant::Linear);
    p.validate()?;
    let mut n = 8;
    while (n - 1) / 3 < kmax {
        n *= 2;
    }
    let grid = Grid::new(n)?;
    let ks: Vec<i64> = (1..=kmax as i64).collect();
    let omegas: Vec<f64> = ks.iter().map(|&k| analytic_eigenvalue(k, &p).im).collect();
    if omegas.iter().any(|&w| w <= 0.0) {
        return Err(Error::InvalidParams(
            "dispersion measurement needs oscillating (underdamped) modes".into(),
        ));
    }
    let omega_max = omegas.iter().cloned().fold(0.0, f64::max);
    let omega_min = omegas.iter().cloned().fold(f64::INFINITY, f64::min);
    let dt = 0.25 * PI / omega_max;
    let steps = (4.0 * PI / omega_min / dt).ceil() as usize + 2;

    let modes: Vec<(i64, Complex64)> = ks.iter().map(|&k| (k, Complex64::new(0.5, 0.0))).collect();
    let f = SpectralField::from_modes(&grid, &modes)?;
    let mut state = WaveState::new(f, SpectralField::zeros(&grid), 0.0)?;
    let stepper = Stepper::new(&grid, &p, dt)?;
    let mut series: Vec<Vec<f64>> = ks.iter().map(|&k| vec![state.f().coeff(k).re]).collect();
    for _ in 0..steps {
        state = stepper.step(&state)?;
        for (trace, &k) in series.iter_mut().zip(&ks) {
            trace.push(state.f().coeff(k).re);
        }
    }

    ks.iter()
        .zip(&series)
        .map(|(&k, z)| {
            let (rate, freq) = fit_damped_oscillation(z, dt).ok_or_else(|| {
                Error::InvalidSimConfig(format!("could not fit mode {k}: too few usable samples"))
            })?;
            Ok(DispersionRow {
                k,
                analytic: analytic_eigenvalue(k, &p),
                measured: Complex64::new(rate, freq),
            })
        })
        .collect()
}
