//! Model parameters, the wave state and the right-hand side of
//!
//! ```text
//! f_tt + 2δΛ²f_t + Λf + βΛ³f + δ²Λ⁴f = ε N(f, f_t)
//! ```
//!
//! together with its parent model, where the damping pair `(α₁, α₂)` replaces
//! `(δ, δ)` and two more quadratic terms appear.
//!
//! Every term of the nonlinearity is kept in the form it is written in,
//! e.g. `∂x[ℋ, f]Λf` is computed as `derivative(commutator_hilbert(f, Λf), 1)`.

use std::fmt;
use std::str::FromStr;

use log::warn;

use crate::error::{Error, Result};
use crate::operators::{commutator_dxx, commutator_hilbert, derivative, hilbert, lambda_pow};
use crate::spectral::{dealiased_product, project_mean_zero, Grid, SpectralField};

/// Which equation is evolved.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variant {
    /// Left-hand side only; the nonlinearity is dropped.
    Linear,
    /// Six-term nonlinearity with `α₁ = α₂ = δ`.
    Simplified,
    /// Eight-term nonlinearity with independent `α₁`, `α₂`.
    Full,
}

impl Variant {
    /// Byte used in snapshot headers.
    pub fn code(self) -> u8 {
        match self {
            Variant::Linear => 0,
            Variant::Simplified => 1,
            Variant::Full => 2,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(Variant::Linear),
            1 => Some(Variant::Simplified),
            2 => Some(Variant::Full),
            _ => None,
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Linear => "linear",
            Variant::Simplified => "simplified",
            Variant::Full => "full",
        })
    }
}

impl FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "linear" => Ok(Variant::Linear),
            "simplified" => Ok(Variant::Simplified),
            "full" => Ok(Variant::Full),
            other => Err(format!(
                "unknown variant `{other}` (expected linear, simplified or full)"
            )),
        }
    }
}

/// Dimensionless coefficients of the model.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelParams {
    /// Viscous damping `δ`.
    pub delta: f64,
    /// Bond number `β`.
    pub beta: f64,
    /// Steepness `ε`, the overall scale of the nonlinearity.
    pub epsilon: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub variant: Variant,
}

impl ModelParams {
    pub fn simplified(delta: f64, beta: f64, epsilon: f64) -> Self {
        Self {
            delta,
            beta,
            epsilon,
            alpha1: delta,
            alpha2: delta,
            variant: Variant::Simplified,
        }
    }

    pub fn linear(delta: f64, beta: f64) -> Self {
        Self {
            variant: Variant::Linear,
            ..Self::simplified(delta, beta, 1.0)
        }
    }

    /// The parent model. `δ` only enters the diagnostics.
    pub fn full(delta: f64, beta: f64, epsilon: f64, alpha1: f64, alpha2: f64) -> Self {
        Self {
            delta,
            beta,
            epsilon,
            alpha1,
            alpha2,
            variant: Variant::Full,
        }
    }

    /// Typical physical magnitudes: `ε = 1e-2`, `β = 1e-5`,
    /// `α₁ = α₂ = δ = 1e-4`.
    pub fn ocean_regime() -> Self {
        Self::simplified(1e-4, 1e-5, 1e-2)
    }

    pub fn with_variant(self, variant: Variant) -> Self {
        Self { variant, ..self }
    }

    /// Checks signs and finiteness, and `α₁ = α₂ = δ` for the simplified
    /// model. `δ = 0` is accepted with a warning.
    pub fn validate(&self) -> Result<()> {
        let named = [
            ("delta", self.delta),
            ("beta", self.beta),
            ("epsilon", self.epsilon),
            ("alpha1", self.alpha1),
            ("alpha2", self.alpha2),
        ];
        for (name, value) in named {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::InvalidParams(format!(
                    "{name} must be finite and non-negative, got {value}"
                )));
            }
        }
        if self.variant == Variant::Simplified
            && (self.alpha1 != self.delta || self.alpha2 != self.delta)
        {
            return Err(Error::InvalidParams(format!(
                "the simplified model requires alpha1 = alpha2 = delta (got {}, {}, {})",
                self.alpha1, self.alpha2, self.delta
            )));
        }
        let damping = match self.variant {
            Variant::Full => self.alpha1 + self.alpha2,
            _ => self.delta,
        };
        if damping == 0.0 {
            warn!("running without viscous damping; the well-posedness theory assumes delta > 0");
        }
        Ok(())
    }
}

/// The pair `(f, f_t)` at time `t`. Both fields are real and mean-zero.
#[derive(Clone, Debug, PartialEq)]
pub struct WaveState {
    f: SpectralField,
    ft: SpectralField,
    t: f64,
}

impl WaveState {
    /// Validates the fields. A nonzero mean is projected away; means at
    /// rounding level are cleared silently, larger ones with a warning.
    pub fn new(f: SpectralField, ft: SpectralField, t: f64) -> Result<Self> {
        if f.grid() != ft.grid() {
            return Err(Error::GridMismatch {
                left: f.grid().n(),
                right: ft.grid().n(),
            });
        }
        f.check_real()?;
        ft.check_real()?;
        Ok(Self {
            f: zero_mean(f, "f"),
            ft: zero_mean(ft, "f_t"),
            t,
        })
    }

    pub fn zeros(grid: &Grid) -> Self {
        Self {
            f: SpectralField::zeros(grid),
            ft: SpectralField::zeros(grid),
            t: 0.0,
        }
    }

    pub(crate) fn from_parts(f: SpectralField, ft: SpectralField, t: f64) -> Self {
        Self { f, ft, t }
    }

    pub fn f(&self) -> &SpectralField {
        &self.f
    }

    pub fn ft(&self) -> &SpectralField {
        &self.ft
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn grid(&self) -> &Grid {
        self.f.grid()
    }

    pub fn with_time(self, t: f64) -> Self {
        Self { t, ..self }
    }

    /// `(λf, λf_t)` at the same time.
    pub fn scaled(&self, factor: f64) -> Self {
        Self::from_parts(self.f.scale(factor), self.ft.scale(factor), self.t)
    }
}

fn zero_mean(mut field: SpectralField, label: &str) -> SpectralField {
    let mean = field.coeff(0).norm();
    if mean == 0.0 {
        field
    } else if mean <= 1e-14 * field.max_abs().max(1.0) {
        field.clear_rounding_mean();
        field
    } else {
        warn!("{label} has nonzero mean {mean:e}; projecting it away");
        project_mean_zero(&field)
    }
}

/// Per-mode linear coefficients: the mode ODE is
/// `f̂'' + damping·f̂' + stiffness·f̂ = N̂(k)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinearSymbol {
    pub damping: f64,
    pub stiffness: f64,
    /// `damping²/4 - stiffness`, computed without cancellation. Negative
    /// means an underdamped mode with frequency `√(-discriminant)`.
    pub discriminant: f64,
}

pub fn linear_symbol(k: i64, p: &ModelParams) -> LinearSymbol {
    let k = k.unsigned_abs() as f64;
    let k2 = k * k;
    let k4 = k2 * k2;
    let restoring = k + p.beta * k * k2;
    match p.variant {
        Variant::Linear | Variant::Simplified => LinearSymbol {
            damping: 2.0 * p.delta * k2,
            stiffness: restoring + p.delta * p.delta * k4,
            // (δk²)² - (k + βk³ + δ²k⁴)
            discriminant: -restoring,
        },
        Variant::Full => {
            let half_gap = 0.5 * (p.alpha1 - p.alpha2);
            LinearSymbol {
                damping: (p.alpha1 + p.alpha2) * k2,
                stiffness: restoring + p.alpha1 * p.alpha2 * k4,
                // ((α₁+α₂)k²/2)² - α₁α₂k⁴ = ((α₁-α₂)/2)²k⁴
                discriminant: half_gap * half_gap * k4 - restoring,
            }
        }
    }
}

/// Factors shared between several terms of the nonlinearity.
struct Factors {
    f: SpectralField,
    h_ft: SpectralField,
    h_dxx_f: SpectralField,
    dxx_f: SpectralField,
    lambda_f: SpectralField,
    lambda3_f: SpectralField,
}

impl Factors {
    fn new(s: &WaveState) -> Result<Self> {
        let f = s.f.clone();
        let dxx_f = derivative(&f, 2);
        Ok(Self {
            h_ft: hilbert(&s.ft),
            h_dxx_f: hilbert(&dxx_f),
            lambda_f: lambda_pow(&f, 1.0)?,
            lambda3_f: lambda_pow(&f, 3.0)?,
            dxx_f,
            f,
        })
    }

    /// `-Λ((ℋf_t)²) + ∂x[ℋ,f]Λf + β∂x[ℋ,f]Λ³f`, the part with no damping
    /// coefficient.
    fn inviscid(&self, beta: f64) -> Result<SpectralField> {
        let t1 = lambda_pow(&dealiased_product(&self.h_ft, &self.h_ft)?, 1.0)?;
        let t2 = derivative(&commutator_hilbert(&self.f, &self.lambda_f)?, 1);
        let t3 = derivative(&commutator_hilbert(&self.f, &self.lambda3_f)?, 1);
        Ok(&(&t2 - &t1) + &t3.scale(beta))
    }

    /// `∂x[ℋ,ℋf_t]ℋ∂x²f`
    fn hilbert_ft_commutator(&self) -> Result<SpectralField> {
        Ok(derivative(&commutator_hilbert(&self.h_ft, &self.h_dxx_f)?, 1))
    }

    /// `Λ(ℋf_t ℋ∂x²f)`
    fn lambda_product(&self) -> Result<SpectralField> {
        lambda_pow(&dealiased_product(&self.h_ft, &self.h_dxx_f)?, 1.0)
    }

    /// `∂x[∂x²,f]ℋf_t`
    fn dxx_commutator(&self) -> Result<SpectralField> {
        Ok(derivative(&commutator_dxx(&self.f, &self.h_ft)?, 1))
    }
}

/// `ε{ -Λ((ℋf_t)²) + ∂x[ℋ,f]Λf + β∂x[ℋ,f]Λ³f + δ∂x[ℋ,ℋf_t]ℋ∂x²f
///   + δΛ(ℋf_t ℋ∂x²f) - δ∂x[∂x²,f]ℋf_t }`
pub fn nonlinear_rhs_simplified(s: &WaveState, p: &ModelParams) -> Result<SpectralField> {
    check_grids(s)?;
    let x = Factors::new(s)?;
    let mut out = x.inviscid(p.beta)?;
    out = &out + &x.hilbert_ft_commutator()?.scale(p.delta);
    out = &out + &x.lambda_product()?.scale(p.delta);
    out = &out - &x.dxx_commutator()?.scale(p.delta);
    Ok(out.scale(p.epsilon))
}

/// The eight-term nonlinearity of the parent model:
///
/// ```text
/// ε{ -Λ((ℋf_t)²) + ∂x[ℋ,f]Λf + β∂x[ℋ,f]Λ³f + α₂∂x[ℋ,ℋf_t]ℋ∂x²f
///    + α₂Λ(ℋf_t ℋ∂x²f) + α₁α₂∂x[∂x²,f]Λ∂xf - α₁∂x[∂x²,f]ℋf_t
///    - α₂α₂∂x[ℋ,∂x²f]∂x²f }
/// ```
///
/// The last coefficient is `α₂²` as printed, not `α₁α₂`.
pub fn nonlinear_rhs_full(s: &WaveState, p: &ModelParams) -> Result<SpectralField> {
    check_grids(s)?;
    let x = Factors::new(s)?;
    let lambda_dx_f = lambda_pow(&derivative(&x.f, 1), 1.0)?;
    let mut out = x.inviscid(p.beta)?;
    out = &out + &x.hilbert_ft_commutator()?.scale(p.alpha2);
    out = &out + &x.lambda_product()?.scale(p.alpha2);
    let t6 = derivative(&commutator_dxx(&x.f, &lambda_dx_f)?, 1);
    out = &out + &t6.scale(p.alpha1 * p.alpha2);
    out = &out - &x.dxx_commutator()?.scale(p.alpha1);
    let t8 = derivative(&commutator_hilbert(&x.dxx_f, &x.dxx_f)?, 1);
    out = &out - &t8.scale(p.alpha2 * p.alpha2);
    Ok(out.scale(p.epsilon))
}

/// Dispatches on [`ModelParams::variant`]; the linear model has no forcing.
pub fn rhs(s: &WaveState, p: &ModelParams) -> Result<SpectralField> {
    match p.variant {
        Variant::Linear => {
            check_grids(s)?;
            Ok(SpectralField::zeros(s.grid()))
        }
        Variant::Simplified => nonlinear_rhs_simplified(s, p),
        Variant::Full => nonlinear_rhs_full(s, p),
    }
}

fn check_grids(s: &WaveState) -> Result<()> {
    if s.f.grid() == s.ft.grid() {
        Ok(())
    } else {
        Err(Error::GridMismatch {
            left: s.f.grid().n(),
            right: s.ft.grid().n(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn linear_symbol_examples() {
        let p = ModelParams::simplified(0.1, 0.0, 1.0);
        let zero = linear_symbol(0, &p);
        assert_eq!((zero.damping, zero.stiffness), (0.0, 0.0));

        let one = linear_symbol(1, &p);
        assert!((one.damping - 0.2).abs() < 1e-16);
        assert!((one.stiffness - 1.01).abs() < 1e-15);
        let full = linear_symbol(1, &ModelParams::full(0.1, 0.0, 1.0, 0.1, 0.1));
        assert_eq!(one, full);

        let inviscid = linear_symbol(2, &ModelParams::linear(0.0, 1.0));
        assert_eq!((inviscid.damping, inviscid.stiffness), (0.0, 10.0));
        assert_eq!(linear_symbol(-2, &ModelParams::linear(0.0, 1.0)), inviscid);
    }

    #[test]
    fn discriminant_matches_direct_formula() {
        for p in [
            ModelParams::simplified(0.3, 0.2, 1.0),
            ModelParams::full(0.0, 0.2, 1.0, 0.5, 0.05),
        ] {
            for k in 1..20 {
                let s = linear_symbol(k, &p);
                let direct = s.damping * s.damping / 4.0 - s.stiffness;
                assert!(
                    (s.discriminant - direct).abs() <= 1e-12 * s.stiffness,
                    "k={k}: {} vs {direct}",
                    s.discriminant
                );
            }
        }
    }

    #[test]
    fn params_validation() {
        assert!(ModelParams::ocean_regime().validate().is_ok());
        let mut p = ModelParams::simplified(0.1, 0.0, 1.0);
        p.alpha1 = 0.2;
        assert!(p.validate().is_err());
        assert!(ModelParams::simplified(-0.1, 0.0, 1.0).validate().is_err());
        assert!(ModelParams::simplified(0.1, f64::NAN, 1.0).validate().is_err());
        assert!(ModelParams::linear(0.0, 0.0).validate().is_ok());
        assert!(ModelParams::full(0.1, 0.0, 1.0, 0.2, 0.3).validate().is_ok());
    }

    #[test]
    fn variant_codes_and_names() {
        for v in [Variant::Linear, Variant::Simplified, Variant::Full] {
            assert_eq!(Variant::from_code(v.code()), Some(v));
            assert_eq!(v.to_string().parse::<Variant>().unwrap(), v);
        }
        assert_eq!(Variant::from_code(3), None);
        assert!("viscous".parse::<Variant>().is_err());
    }

    #[test]
    fn wave_state_projects_mean() {
        let g = Grid::new(16).unwrap();
        let f = SpectralField::from_modes(&g, &[(0, c(0.3, 0.0)), (1, c(0.5, 0.0))]).unwrap();
        let s = WaveState::new(f, SpectralField::zeros(&g), 0.0).unwrap();
        assert_eq!(s.f().coeff(0), c(0.0, 0.0));
        assert_eq!(s.f().coeff(1), c(0.5, 0.0));
    }

    #[test]
    fn wave_state_rejects_mismatch_and_complex_fields() {
        let a = SpectralField::zeros(&Grid::new(8).unwrap());
        let b = SpectralField::zeros(&Grid::new(16).unwrap());
        assert!(WaveState::new(a, b, 0.0).is_err());
    }

    #[test]
    fn zero_state_gives_zero_rhs() {
        let g = Grid::new(32).unwrap();
        let s = WaveState::zeros(&g);
        for p in [
            ModelParams::linear(0.1, 0.1),
            ModelParams::simplified(0.1, 0.1, 1.0),
            ModelParams::full(0.1, 0.1, 1.0, 0.2, 0.3),
        ] {
            assert_eq!(rhs(&s, &p).unwrap().max_abs(), 0.0);
        }
    }

    #[test]
    fn linear_variant_has_no_forcing() {
        let g = Grid::new(32).unwrap();
        let f = SpectralField::from_modes(&g, &[(1, c(0.5, 0.0)), (3, c(0.1, 0.2))]).unwrap();
        let s = WaveState::new(f.clone(), f, 0.0).unwrap();
        assert_eq!(rhs(&s, &ModelParams::linear(0.1, 0.0)).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn only_the_ft_square_survives_when_f_vanishes() {
        let g = Grid::new(32).unwrap();
        let ft = SpectralField::from_modes(&g, &[(1, c(0.2, 0.1)), (2, c(0.0, 0.3))]).unwrap();
        let s = WaveState::new(SpectralField::zeros(&g), ft.clone(), 0.0).unwrap();
        let p = ModelParams::full(0.3, 0.2, 0.7, 0.3, 0.3);
        let simplified = nonlinear_rhs_simplified(&s, &ModelParams::simplified(0.3, 0.2, 0.7)).unwrap();
        let full = nonlinear_rhs_full(&s, &p).unwrap();
        let h = hilbert(&ft);
        let expect = lambda_pow(&dealiased_product(&h, &h).unwrap(), 1.0).unwrap().scale(-0.7);
        assert!(simplified.max_abs_diff(&expect) < 1e-15);
        assert!(full.max_abs_diff(&simplified) < 1e-15);
    }
}
