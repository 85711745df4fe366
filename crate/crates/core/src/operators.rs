//! Fourier multipliers and the commutator brackets of the model.
//!
//! | operator | symbol `m(k)` |
//! |----------|---------------|
//! | Hilbert transform `ℋ` | `-i sgn(k)`, `sgn(0) = 0` |
//! | Calderón operator `Λ^s` | `\|k\|^s`, `m(0) = 0` |
//! | derivative `∂x^n` | `(ik)^n` |
//!
//! Each symbol satisfies `m(-k) = conj(m(k))`, so real fields map to real
//! fields. Odd symbols cannot be represented on the self-paired Nyquist
//! mode; it is zeroed whenever one is applied.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::{dealiased_product, Grid, SpectralField};

/// Symmetry class of a multiplier under `k ↦ -k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    /// `m(-k) = m(k)`; a real symbol.
    Even,
    /// `m(-k) = -m(k)`; a purely imaginary symbol.
    Odd,
    /// Neither. The Nyquist mode is zeroed, like for odd symbols.
    None,
}

/// A Fourier multiplier tabulated on one grid.
#[derive(Clone, Debug)]
pub struct Multiplier {
    name: String,
    parity: Parity,
    grid: Grid,
    symbol: Vec<Complex64>,
}

impl Multiplier {
    /// Tabulates `symbol` on the grid and checks finiteness, reality
    /// preservation and the declared parity.
    pub fn new(
        grid: &Grid,
        name: impl Into<String>,
        parity: Parity,
        symbol: impl Fn(i64) -> Complex64,
    ) -> Result<Self> {
        let name = name.into();
        let table: Vec<Complex64> = grid.wavenumbers().map(&symbol).collect();
        let invalid = |reason: String| Error::InvalidMultiplier {
            name: name.clone(),
            reason,
        };
        if let Some(k) = grid.wavenumbers().zip(&table).find(|(_, m)| !m.is_finite()).map(|(k, _)| k) {
            return Err(invalid(format!("symbol is not finite at k = {k}")));
        }
        let n = grid.n();
        for i in 1..grid.nyquist() {
            let (plus, minus) = (table[i], table[n - i]);
            let k = i as i64;
            let scale = plus.norm().max(1.0);
            if (minus - plus.conj()).norm() > 1e-14 * scale {
                return Err(invalid(format!(
                    "m(-{k}) != conj(m({k})); the operator would not preserve real fields"
                )));
            }
            let parity_defect = match parity {
                Parity::Even => (minus - plus).norm(),
                Parity::Odd => (minus + plus).norm(),
                Parity::None => 0.0,
            };
            if parity_defect > 1e-14 * scale {
                return Err(invalid(format!("symbol is not {parity:?} at k = {k}")));
            }
        }
        Ok(Self {
            name,
            parity,
            grid: grid.clone(),
            symbol: table,
        })
    }

    pub fn hilbert(grid: &Grid) -> Self {
        Self::new(grid, "hilbert", Parity::Odd, hilbert_symbol).expect("valid symbol")
    }

    /// `Λ^s`, with `m(0) = 0` for every `s`.
    pub fn lambda(grid: &Grid, s: f64) -> Self {
        Self::new(grid, format!("lambda^{s}"), Parity::Even, |k| {
            Complex64::new(lambda_symbol(k, s), 0.0)
        })
        .expect("valid symbol")
    }

    pub fn derivative(grid: &Grid, order: u32) -> Self {
        let parity = if order % 2 == 0 { Parity::Even } else { Parity::Odd };
        Self::new(grid, format!("dx^{order}"), parity, |k| derivative_symbol(k, order))
            .expect("valid symbol")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn symbol(&self, k: i64) -> Option<Complex64> {
        self.grid.index(k).map(|i| self.symbol[i])
    }

    pub fn apply(&self, f: &SpectralField) -> Result<SpectralField> {
        if *f.grid() != self.grid {
            return Err(Error::GridMismatch {
                left: self.grid.n(),
                right: f.grid().n(),
            });
        }
        let nyq = self.grid.nyquist();
        let keep_nyquist = self.parity == Parity::Even;
        let coeffs = f
            .coeffs()
            .iter()
            .zip(&self.symbol)
            .enumerate()
            .map(|(i, (&c, &m))| {
                if i == nyq && !keep_nyquist {
                    Complex64::new(0.0, 0.0)
                } else {
                    c * m
                }
            })
            .collect();
        Ok(SpectralField::from_raw(&self.grid, coeffs))
    }
}

fn hilbert_symbol(k: i64) -> Complex64 {
    Complex64::new(0.0, -(k.signum() as f64))
}

fn lambda_symbol(k: i64, s: f64) -> f64 {
    if k == 0 {
        0.0
    } else if s.fract() == 0.0 && s.abs() < 64.0 {
        (k.abs() as f64).powi(s as i32)
    } else {
        (k.abs() as f64).powf(s)
    }
}

fn derivative_symbol(k: i64, order: u32) -> Complex64 {
    let magnitude = (k as f64).powi(order as i32);
    match order % 4 {
        0 => Complex64::new(magnitude, 0.0),
        1 => Complex64::new(0.0, magnitude),
        2 => Complex64::new(-magnitude, 0.0),
        _ => Complex64::new(0.0, -magnitude),
    }
}

fn apply_symbol(f: &SpectralField, keep_nyquist: bool, symbol: impl Fn(i64) -> Complex64) -> SpectralField {
    let nyq = f.grid().nyquist() as i64;
    f.map_coeffs(|k, c| {
        if k == nyq && !keep_nyquist {
            Complex64::new(0.0, 0.0)
        } else {
            c * symbol(k)
        }
    })
}

/// Hilbert transform: `ĝ(k) = -i sgn(k) f̂(k)`.
pub fn hilbert(f: &SpectralField) -> SpectralField {
    apply_symbol(f, false, hilbert_symbol)
}

/// `Λ^s f`: `ĝ(k) = |k|^s f̂(k)`, `ĝ(0) = 0`.
///
/// Negative powers are only defined on mean-zero fields.
pub fn lambda_pow(f: &SpectralField, s: f64) -> Result<SpectralField> {
    if s < 0.0 && f.coeff(0).norm() != 0.0 {
        return Err(Error::SingularMode { s, mean: f.mean() });
    }
    Ok(apply_symbol(f, true, |k| Complex64::new(lambda_symbol(k, s), 0.0)))
}

/// `∂x^n f`: `ĝ(k) = (ik)^n f̂(k)`.
pub fn derivative(f: &SpectralField, order: u32) -> SpectralField {
    apply_symbol(f, order % 2 == 0, |k| derivative_symbol(k, order))
}

/// `[ℋ, f] g = ℋ(f g) - f ℋg`, both products dealiased.
pub fn commutator_hilbert(f: &SpectralField, g: &SpectralField) -> Result<SpectralField> {
    let fg = dealiased_product(f, g)?;
    let f_hg = dealiased_product(f, &hilbert(g))?;
    Ok(&hilbert(&fg) - &f_hg)
}

/// `[∂x², f] g = ∂x²(f g) - f ∂x²g`, evaluated in the expanded form
/// `g ∂x²f + 2 ∂xf ∂xg`.
pub fn commutator_dxx(f: &SpectralField, g: &SpectralField) -> Result<SpectralField> {
    let a = dealiased_product(g, &derivative(f, 2))?;
    let b = dealiased_product(&derivative(f, 1), &derivative(g, 1))?;
    Ok(&a + &b.scale(2.0))
}
