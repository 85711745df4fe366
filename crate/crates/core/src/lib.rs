//! Pseudospectral simulation of a nonlocal fourth-order damped wave equation
//! for viscous water waves on the torus `[-π, π)`:
//!
//! ```text
//! f_tt + 2δΛ²f_t + Λf + βΛ³f + δ²Λ⁴f = ε N(f, f_t)
//! ```
//!
//! where `Λ = |∂x|` is the Calderón operator and `N` is a sum of quadratic
//! commutator terms built from the Hilbert transform `ℋ`.
//!
//! The crate is organised bottom-up:
//!
//! * [`spectral`]: grids, Fourier transforms, dealiased products.
//! * [`operators`]: `ℋ`, `Λ^s`, `∂x^n` and the commutators `[ℋ, f]`, `[∂x², f]`.
//! * [`model`]: parameters, the wave state and the right-hand side.
//! * [`timestepper`]: exact linear propagation plus a second-order
//!   exponential integrator for the nonlinearity.
//! * [`diagnostics`]: Sobolev norms, energy and dissipation.
//! * [`io`], [`cli`]: run configuration, snapshots, CSV output and the
//!   `vwave` command line.
//! * [`oracle`], [`verify`]: slow reference implementations and the
//!   verification suite built on them.
//!
//! ```
//! use viscous_waves::{Grid, ModelParams, SimConfig, WaveState, NullSink};
//! use viscous_waves::spectral::forward_transform;
//!
//! let grid = Grid::new(64).unwrap();
//! let f0: Vec<f64> = grid.points().iter().map(|x| 0.01 * x.cos()).collect();
//! let f0 = forward_transform(&f0, &grid).unwrap();
//! let init = WaveState::new(f0, viscous_waves::SpectralField::zeros(&grid), 0.0).unwrap();
//!
//! let params = ModelParams::simplified(0.05, 1e-5, 1.0);
//! let cfg = SimConfig { dt: 0.01, t_end: 0.5, snapshot_every: 10, diagnostics_every: 10 };
//! let report = viscous_waves::simulate(&init, &params, &cfg, &mut NullSink).unwrap();
//! assert_eq!(report.state.t(), 0.5);
//! ```

pub mod cli;
pub mod diagnostics;
pub mod dispersion;
mod error;
pub mod io;
pub mod model;
pub mod operators;
pub mod oracle;
pub mod spectral;
pub mod timestepper;
pub mod verify;

pub use diagnostics::DiagnosticsRecord;
pub use error::{Error, Result};
pub use model::{ModelParams, Variant, WaveState};
pub use spectral::{Grid, SpectralField};
pub use timestepper::{simulate, NullSink, Recorder, RunReport, SimConfig, Sink, Stepper};

#[cfg(doctest)]
pub mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod introduction {}
    #[doc = include_str!("../../../book/src/spectral.md")]
    pub mod spectral {}
    #[doc = include_str!("../../../book/src/operators.md")]
    pub mod operators {}
    #[doc = include_str!("../../../book/src/model.md")]
    pub mod model {}
    #[doc = include_str!("../../../book/src/time-stepping.md")]
    pub mod time_stepping {}
    #[doc = include_str!("../../../book/src/diagnostics.md")]
    pub mod diagnostics {}
    #[doc = include_str!("../../../book/src/command-line.md")]
    pub mod command_line {}
}
