//! Sobolev norms, the energy and dissipation functionals, and a linear energy
//! with an exact decay law.
//!
//! All norms are continuum norms of the band-limited interpolant,
//! `‖f‖²_{Ḣ^s} = 2π Σ_k |k|^{2s} |f̂(k)|²`.
//!
//! The energy reported here is the running maximum over the instants at
//! which diagnostics were taken, not over continuous time.

use std::f64::consts::PI;

use crate::model::{ModelParams, WaveState};
use crate::spectral::SpectralField;

/// Orders `s` at which `‖f‖_{Ḣ^s}` is recorded.
pub const F_NORM_ORDERS: [f64; 8] = [1.0, 2.0, 3.0, 3.5, 4.0, 4.5, 5.0, 5.5];
/// Orders `s` at which `‖f_t‖_{Ḣ^s}` is recorded.
pub const FT_NORM_ORDERS: [f64; 5] = [2.25, 3.0, 3.5, 4.0, 4.5];

/// `sqrt(2π Σ_k |k|^{2s} |f̂(k)|²)`.
///
/// For `s = 0` the mean is included and this is the L² norm; for `s ≠ 0`
/// the `k = 0` mode does not contribute.
pub fn sobolev_norm(f: &SpectralField, s: f64) -> f64 {
    sobolev_norm_sq(f, s).sqrt()
}

pub fn sobolev_norm_sq(f: &SpectralField, s: f64) -> f64 {
    let grid = f.grid();
    let sum: f64 = f
        .coeffs()
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let k = grid.wavenumber(i).unsigned_abs() as f64;
            let weight = if k == 0.0 {
                if s == 0.0 {
                    1.0
                } else {
                    0.0
                }
            } else {
                k.powf(2.0 * s)
            };
            weight * c.norm_sqr()
        })
        .sum();
    2.0 * PI * sum
}

/// `‖f‖²_{Ḣ⁴} + β‖f‖²_{Ḣ⁵} + δ²‖f‖²_{Ḣ^{5.5}} + ‖f_t‖²_{Ḣ^{3.5}}`.
pub fn energy_instant(s: &WaveState, p: &ModelParams) -> f64 {
    sobolev_norm_sq(s.f(), 4.0)
        + p.beta * sobolev_norm_sq(s.f(), 5.0)
        + p.delta * p.delta * sobolev_norm_sq(s.f(), 5.5)
        + sobolev_norm_sq(s.ft(), 3.5)
}

/// Returns `(e_inst, e_max)` where `e_max = max(prev_max, e_inst)`.
pub fn energy(s: &WaveState, p: &ModelParams, prev_max: f64) -> (f64, f64) {
    let e = energy_instant(s, p);
    (e, prev_max.max(e))
}

/// `2δ‖f_t‖²_{Ḣ^{4.5}}`.
pub fn dissipation(s: &WaveState, p: &ModelParams) -> f64 {
    2.0 * p.delta * sobolev_norm_sq(s.ft(), 4.5)
}

/// `‖f_t‖²_{L²} + ‖f‖²_{Ḣ^{1/2}} + β‖f‖²_{Ḣ^{3/2}} + δ²‖f‖²_{Ḣ²}`.
///
/// Along solutions of the linear model its time derivative is
/// `-4δ‖f_t‖²_{Ḣ¹}` (see [`linear_energy_rate`]).
pub fn linear_energy(s: &WaveState, p: &ModelParams) -> f64 {
    sobolev_norm_sq(s.ft(), 0.0)
        + sobolev_norm_sq(s.f(), 0.5)
        + p.beta * sobolev_norm_sq(s.f(), 1.5)
        + p.delta * p.delta * sobolev_norm_sq(s.f(), 2.0)
}

/// `-4δ‖f_t‖²_{Ḣ¹}`.
pub fn linear_energy_rate(s: &WaveState, p: &ModelParams) -> f64 {
    -4.0 * p.delta * sobolev_norm_sq(s.ft(), 1.0)
}

/// One row of the diagnostics time series.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagnosticsRecord {
    pub t: f64,
    /// `‖f‖_{Ḣ^s}` for `s` in [`F_NORM_ORDERS`].
    pub h_norms: [f64; 8],
    /// `‖f_t‖_{Ḣ^s}` for `s` in [`FT_NORM_ORDERS`].
    pub ft_norms: [f64; 5],
    pub e_inst: f64,
    pub e_max: f64,
    pub dissipation: f64,
    pub e_linear: f64,
}

impl DiagnosticsRecord {
    pub fn compute(s: &WaveState, p: &ModelParams, prev_max: f64) -> Self {
        let (e_inst, e_max) = energy(s, p, prev_max);
        Self {
            t: s.t(),
            h_norms: F_NORM_ORDERS.map(|order| sobolev_norm(s.f(), order)),
            ft_norms: FT_NORM_ORDERS.map(|order| sobolev_norm(s.ft(), order)),
            e_inst,
            e_max,
            dissipation: dissipation(s, p),
            e_linear: linear_energy(s, p),
        }
    }

    /// `t,h1,h2,h3,h35,h4,h45,h5,h55,ft225,ft3,ft35,ft4,ft45,e_inst,e_max,dissipation,e_linear`
    pub fn csv_header() -> String {
        let mut cols = vec!["t".to_string()];
        cols.extend(F_NORM_ORDERS.iter().map(|s| format!("h{}", order_tag(*s))));
        cols.extend(FT_NORM_ORDERS.iter().map(|s| format!("ft{}", order_tag(*s))));
        cols.extend(["e_inst", "e_max", "dissipation", "e_linear"].map(String::from));
        cols.join(",")
    }

    /// Values in header order, 17 significant digits each.
    pub fn csv_row(&self) -> String {
        let mut values = vec![self.t];
        values.extend(self.h_norms);
        values.extend(self.ft_norms);
        values.extend([self.e_inst, self.e_max, self.dissipation, self.e_linear]);
        values
            .iter()
            .map(|v| format!("{v:.16e}"))
            .collect::<Vec<_>>()
            .join(",")
    }
}

// 3.5 -> "35", 2.25 -> "225"
fn order_tag(s: f64) -> String {
    format!("{s}").replace('.', "")
}
