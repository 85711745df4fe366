//! Time integration.
//!
//! The linear part of each mode, `y' = A_k y` with
//! `A_k = [[0, 1], [-stiffness, -damping]]`, is propagated exactly through
//! its closed-form matrix exponential. The nonlinearity is handled by a
//! two-stage exponential Runge–Kutta scheme with midpoint node:
//!
//! ```text
//! U      = e^{hA/2} u + φ₁(h/2) N(u)
//! u_next = e^{hA} u + φ₁(h) N(u) + (2/h) φ₂(h) (N(U) - N(u))
//! ```
//!
//! where `φ₁(h) = ∫₀^h e^{(h-τ)A} dτ` and `φ₂(h) = ∫₀^h e^{(h-τ)A} τ dτ`
//! act on the forcing slot `(0, 1)`. The second stage interpolates the
//! forcing linearly across the step, which keeps second order even for the
//! stiff high modes. With zero forcing a step is the exact linear flow.

use log::debug;

use crate::diagnostics::{energy_instant, DiagnosticsRecord};
use crate::error::{Error, Result};
use crate::model::{linear_symbol, rhs, ModelParams, Variant, WaveState};
use crate::spectral::{Grid, SpectralField};

/// Energy growth over the initial value that is treated as blow-up.
pub const BLOWUP_ENERGY_FACTOR: f64 = 1e6;

type Mat2 = [[f64; 2]; 2];

/// Exact one-step propagation data for a single wavenumber.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModePropagator {
    pub k: i64,
    pub dt: f64,
    /// `exp(dt·A_k)`.
    pub matrix: Mat2,
    /// `∫₀^dt exp((dt-τ)A_k) dτ · (0, 1)`: response to a constant unit forcing.
    pub duhamel: [f64; 2],
    /// `∫₀^dt exp((dt-τ)A_k) τ dτ · (0, 1)`: response to the forcing `τ`.
    pub duhamel_ramp: [f64; 2],
}

impl ModePropagator {
    /// Applies the propagator to one complex mode amplitude pair, with
    /// forcing `constant + slope·τ` in the `f_t` equation.
    #[inline]
    fn advance(
        &self,
        y: [num_complex::Complex64; 2],
        constant: num_complex::Complex64,
        slope: num_complex::Complex64,
    ) -> [num_complex::Complex64; 2] {
        let m = &self.matrix;
        [
            y[0] * m[0][0] + y[1] * m[0][1] + constant * self.duhamel[0] + slope * self.duhamel_ramp[0],
            y[0] * m[1][0] + y[1] * m[1][1] + constant * self.duhamel[1] + slope * self.duhamel_ramp[1],
        ]
    }

    #[inline]
    fn advance_free(&self, y: [num_complex::Complex64; 2]) -> [num_complex::Complex64; 2] {
        let m = &self.matrix;
        [
            y[0] * m[0][0] + y[1] * m[0][1],
            y[0] * m[1][0] + y[1] * m[1][1],
        ]
    }
}

/// Builds the propagator for wavenumber `k` over a step `dt`.
///
/// `dt` may be negative, which runs the linear flow backwards.
pub fn build_propagator(k: i64, dt: f64, p: &ModelParams) -> ModePropagator {
    let sym = linear_symbol(k, p);
    let (c, d) = (sym.stiffness, sym.damping);
    let a = [[0.0, 1.0], [-c, -d]];
    let (matrix, duhamel, duhamel_ramp) = if c == 0.0 || (1.0 + c + d) * dt.abs() <= 0.5 {
        taylor_propagator(&a, dt)
    } else {
        closed_form_propagator(c, d, sym.discriminant, dt)
    };
    ModePropagator {
        k,
        dt,
        matrix,
        duhamel,
        duhamel_ramp,
    }
}

// M = Σ Aⁿtⁿ/n!, φ₁ = Σ Aⁿtⁿ⁺¹/(n+1)!, φ₂ = Σ Aⁿtⁿ⁺²/(n+2)!.
fn taylor_propagator(a: &Mat2, dt: f64) -> (Mat2, [f64; 2], [f64; 2]) {
    let mut term = [[1.0, 0.0], [0.0, 1.0]];
    let mut m = [[0.0; 2]; 2];
    let mut phi1 = [[0.0; 2]; 2];
    let mut phi2 = [[0.0; 2]; 2];
    for n in 0..200 {
        let nf = n as f64;
        let w1 = dt / (nf + 1.0);
        let w2 = dt * dt / ((nf + 1.0) * (nf + 2.0));
        for i in 0..2 {
            for j in 0..2 {
                m[i][j] += term[i][j];
                phi1[i][j] += term[i][j] * w1;
                phi2[i][j] += term[i][j] * w2;
            }
        }
        let size = term.iter().flatten().map(|v| v.abs()).fold(0.0, f64::max);
        if size == 0.0 || size < 1e-18 {
            break;
        }
        let scale = dt / (nf + 1.0);
        let mut next = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                next[i][j] = (term[i][0] * a[0][j] + term[i][1] * a[1][j]) * scale;
            }
        }
        term = next;
    }
    (m, [phi1[0][1], phi1[1][1]], [phi2[0][1], phi2[1][1]])
}

// exp(tA) = e^{σt} [C(t) I + S(t) (A - σI)], σ = -d/2, (A - σI)² = q I.
fn closed_form_propagator(c: f64, d: f64, q: f64, dt: f64) -> (Mat2, [f64; 2], [f64; 2]) {
    let sigma = -0.5 * d;
    let (ec, es) = if q.abs() * dt * dt < 1e-2 {
        let (cc, ss) = cos_sin_series(q, dt);
        let e = (sigma * dt).exp();
        (e * cc, e * ss)
    } else if q < 0.0 {
        let omega = (-q).sqrt();
        let e = (sigma * dt).exp();
        (e * (omega * dt).cos(), e * (omega * dt).sin() / omega)
    } else {
        let r = q.sqrt();
        let ep = ((sigma + r) * dt).exp();
        let em = ((sigma - r) * dt).exp();
        (0.5 * (ep + em), 0.5 * (ep - em) / r)
    };
    let m = [
        [ec + 0.5 * d * es, es],
        [-c * es, ec - 0.5 * d * es],
    ];
    // A⁻¹(x, y) = ((-d x - y)/c, x); φ₁ = A⁻¹(M - I), φ₂ = A⁻¹(φ₁ - t I).
    let w = [(-d * m[0][1] - (m[1][1] - 1.0)) / c, m[0][1]];
    let v = [(-d * w[0] - (w[1] - dt)) / c, w[0]];
    (m, w, v)
}

// C = Σ qⁿt²ⁿ/(2n)!, S = Σ qⁿt²ⁿ⁺¹/(2n+1)!, i.e. cosh/sinh(√q t)/√q for any sign of q.
fn cos_sin_series(q: f64, t: f64) -> (f64, f64) {
    let x = q * t * t;
    let (mut c, mut s) = (0.0, 0.0);
    let (mut tc, mut ts) = (1.0, t);
    for n in 0..30 {
        c += tc;
        s += ts;
        let nf = n as f64;
        tc *= x / ((2.0 * nf + 1.0) * (2.0 * nf + 2.0));
        ts *= x / ((2.0 * nf + 2.0) * (2.0 * nf + 3.0));
        if tc.abs() < 1e-18 * c.abs() && ts.abs() < 1e-18 * s.abs() {
            break;
        }
    }
    (c, s)
}

/// Step size resolving the fastest retained oscillation:
/// `0.5 · 2π / ω_max` with `ω_max = √(k_max + β k_max³)`.
pub fn default_dt(grid: &Grid, p: &ModelParams) -> f64 {
    let k = grid.dealias_cutoff() as f64;
    let omega = (k + p.beta * k * k * k).sqrt();
    0.5 * 2.0 * std::f64::consts::PI / omega
}

/// Propagator tables for one grid, parameter set and step size.
#[derive(Clone, Debug)]
pub struct Stepper {
    grid: Grid,
    params: ModelParams,
    dt: f64,
    full: Vec<ModePropagator>,
    half: Vec<ModePropagator>,
}

impl Stepper {
    pub fn new(grid: &Grid, params: &ModelParams, dt: f64) -> Result<Self> {
        if !dt.is_finite() || dt == 0.0 {
            return Err(Error::InvalidSimConfig(format!("time step must be finite and nonzero, got {dt}")));
        }
        let modes = 0..=grid.nyquist() as i64;
        Ok(Self {
            grid: grid.clone(),
            params: *params,
            dt,
            full: modes.clone().map(|k| build_propagator(k, dt, params)).collect(),
            half: modes.map(|k| build_propagator(k, 0.5 * dt, params)).collect(),
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn propagator(&self, k: i64) -> Option<&ModePropagator> {
        self.full.get(k.unsigned_abs() as usize)
    }

    /// Advances `s` by one step.
    pub fn step(&self, s: &WaveState) -> Result<WaveState> {
        if *s.grid() != self.grid {
            return Err(Error::GridMismatch {
                left: self.grid.n(),
                right: s.grid().n(),
            });
        }
        let t_next = s.t() + self.dt;
        let next = if self.params.variant == Variant::Linear {
            self.propagate(s, &self.full, None, t_next)
        } else {
            let n1 = rhs(s, &self.params)?;
            let mid = self.propagate(s, &self.half, Some((&n1, None)), s.t() + 0.5 * self.dt);
            let n2 = rhs(&mid, &self.params)?;
            let slope = (&n2 - &n1).scale(2.0 / self.dt);
            self.propagate(s, &self.full, Some((&n1, Some(&slope))), t_next)
        };
        check_finite(&next)?;
        Ok(next)
    }

    fn propagate(
        &self,
        s: &WaveState,
        table: &[ModePropagator],
        forcing: Option<(&SpectralField, Option<&SpectralField>)>,
        t: f64,
    ) -> WaveState {
        let zero = num_complex::Complex64::new(0.0, 0.0);
        let n = self.grid.n();
        let mut f = Vec::with_capacity(n);
        let mut ft = Vec::with_capacity(n);
        for i in 0..n {
            let prop = &table[self.grid.wavenumber(i).unsigned_abs() as usize];
            let y = [s.f().coeffs()[i], s.ft().coeffs()[i]];
            let out = match forcing {
                None => prop.advance_free(y),
                Some((constant, slope)) => {
                    let slope = slope.map_or(zero, |g| g.coeffs()[i]);
                    prop.advance(y, constant.coeffs()[i], slope)
                }
            };
            f.push(out[0]);
            ft.push(out[1]);
        }
        WaveState::from_parts(
            SpectralField::from_raw(&self.grid, f),
            SpectralField::from_raw(&self.grid, ft),
            t,
        )
    }
}

fn check_finite(s: &WaveState) -> Result<()> {
    for field in [s.f(), s.ft()] {
        if let Some(i) = field.coeffs().iter().position(|c| !c.is_finite()) {
            let k = field.grid().wavenumber(i);
            return Err(Error::BlowUp {
                t: s.t(),
                mode: Some(k),
                detail: format!("non-finite coefficient at k = {k}"),
            });
        }
    }
    Ok(())
}

/// One step of size `dt`. Builds the propagator tables on every call; use a
/// [`Stepper`] when stepping repeatedly.
pub fn step(s: &WaveState, dt: f64, p: &ModelParams) -> Result<WaveState> {
    Stepper::new(s.grid(), p, dt)?.step(s)
}

/// Run length and output cadence.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimConfig {
    pub dt: f64,
    /// Absolute end time.
    pub t_end: f64,
    /// Emit a snapshot every this many steps (and at the start).
    pub snapshot_every: usize,
    /// Emit a diagnostics record every this many steps (and at the start).
    pub diagnostics_every: usize,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::InvalidSimConfig(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_end.is_finite() && self.t_end >= 0.0) {
            return Err(Error::InvalidSimConfig(format!(
                "t_end must be non-negative, got {}",
                self.t_end
            )));
        }
        if self.snapshot_every == 0 || self.diagnostics_every == 0 {
            return Err(Error::InvalidSimConfig(
                "snapshot_every and diagnostics_every must be positive".into(),
            ));
        }
        Ok(())
    }

    /// `(full_steps, final_partial_step)` covering `[t0, t_end]`.
    fn step_plan(&self, t0: f64) -> (usize, Option<f64>) {
        let span = self.t_end - t0;
        if span <= 0.0 {
            return (0, None);
        }
        let ratio = span / self.dt;
        let nearest = ratio.round();
        if nearest >= 1.0 && (nearest * self.dt - span).abs() <= 1e-9 * self.dt {
            return (nearest as usize, None);
        }
        let full = ratio.floor() as usize;
        (full, Some(span - full as f64 * self.dt))
    }

    /// Number of steps a run from `t0` takes.
    pub fn step_count(&self, t0: f64) -> usize {
        let (full, partial) = self.step_plan(t0);
        full + usize::from(partial.is_some())
    }
}

/// Receives run output. Returning an error aborts the run.
pub trait Sink {
    fn snapshot(&mut self, _step: usize, _state: &WaveState, _params: &ModelParams) -> Result<()> {
        Ok(())
    }

    fn diagnostics(&mut self, _record: &DiagnosticsRecord) -> Result<()> {
        Ok(())
    }
}

/// Discards everything.
pub struct NullSink;

impl Sink for NullSink {}

/// Keeps everything in memory.
#[derive(Default, Debug)]
pub struct Recorder {
    pub snapshots: Vec<(usize, WaveState)>,
    pub records: Vec<DiagnosticsRecord>,
}

impl Sink for Recorder {
    fn snapshot(&mut self, step: usize, state: &WaveState, _params: &ModelParams) -> Result<()> {
        self.snapshots.push((step, state.clone()));
        Ok(())
    }

    fn diagnostics(&mut self, record: &DiagnosticsRecord) -> Result<()> {
        self.records.push(record.clone());
        Ok(())
    }
}

/// Outcome of [`simulate`].
#[derive(Clone, Debug)]
pub struct RunReport {
    /// State at exactly `t_end`.
    pub state: WaveState,
    pub steps: usize,
    /// Energy functional at the initial time.
    pub initial_energy: f64,
    /// Running maximum of the energy over the diagnostic instants.
    pub max_energy: f64,
    /// First diagnostic time at which the running maximum exceeded four times
    /// its initial value.
    pub energy_bound_exceeded_at: Option<f64>,
}

/// Integrates from `init.t()` to `cfg.t_end`, the last step shortened to land
/// on `t_end` exactly.
pub fn simulate(
    init: &WaveState,
    params: &ModelParams,
    cfg: &SimConfig,
    sink: &mut dyn Sink,
) -> Result<RunReport> {
    params.validate()?;
    cfg.validate()?;
    let t0 = init.t();
    if cfg.t_end < t0 {
        return Err(Error::InvalidSimConfig(format!(
            "t_end = {} lies before the initial time {t0}",
            cfg.t_end
        )));
    }
    let grid = init.grid().clone();
    let (full_steps, partial) = cfg.step_plan(t0);
    let total = full_steps + usize::from(partial.is_some());
    let stepper = Stepper::new(&grid, params, cfg.dt)?;
    let last_stepper = partial.map(|dt| Stepper::new(&grid, params, dt)).transpose()?;
    debug!("simulating {total} steps of dt = {} on N = {}", cfg.dt, grid.n());

    let initial_energy = energy_instant(init, params);
    let first = DiagnosticsRecord::compute(init, params, 0.0);
    let mut max_energy = first.e_max;
    let mut exceeded = None;
    sink.diagnostics(&first)?;
    sink.snapshot(0, init, params)?;

    let mut state = init.clone();
    for i in 1..=total {
        let next = match (&last_stepper, i > full_steps) {
            (Some(last), true) => last.step(&state)?,
            _ => stepper.step(&state)?,
        };
        let t = if i == total {
            cfg.t_end
        } else {
            t0 + i as f64 * cfg.dt
        };
        state = next.with_time(t);

        let e = energy_instant(&state, params);
        if initial_energy > 0.0 && e > BLOWUP_ENERGY_FACTOR * initial_energy {
            let mode = dominant_mode(&state);
            return Err(Error::BlowUp {
                t,
                mode: Some(mode),
                detail: format!(
                    "energy grew from {initial_energy:e} to {e:e}; largest contribution at k = {mode}"
                ),
            });
        }
        if i % cfg.diagnostics_every == 0 {
            let record = DiagnosticsRecord::compute(&state, params, max_energy);
            max_energy = record.e_max;
            if exceeded.is_none() && max_energy > 4.0 * initial_energy {
                exceeded = Some(t);
            }
            sink.diagnostics(&record)?;
        }
        if i % cfg.snapshot_every == 0 {
            sink.snapshot(i, &state, params)?;
        }
    }

    Ok(RunReport {
        state,
        steps: total,
        initial_energy,
        max_energy,
        energy_bound_exceeded_at: exceeded,
    })
}

fn dominant_mode(s: &WaveState) -> i64 {
    let grid = s.grid();
    (0..grid.n())
        .map(|i| {
            let k = grid.wavenumber(i).unsigned_abs() as f64;
            let w = s.f().coeffs()[i].norm_sqr() * k.powi(8) + s.ft().coeffs()[i].norm_sqr() * k.powi(7);
            (grid.wavenumber(i).abs(), w)
        })
        .fold((0, f64::NEG_INFINITY), |best, cur| if cur.1 > best.1 { cur } else { best })
        .0
}
