//! Run configuration, initial data, snapshots and CSV output.
//!
//! # Config files
//!
//! Flat `key = value` lines; `#` starts a comment. Unknown or repeated keys
//! are errors. Defaults:
//!
//! | key | default |
//! |-----|---------|
//! | `grid_n` | 64 |
//! | `dt` | 0 (automatic) |
//! | `t_end` | 1.0 |
//! | `delta` | 1e-4 |
//! | `beta` | 1e-5 |
//! | `epsilon` | 1e-2 |
//! | `alpha1`, `alpha2` | value of `delta` |
//! | `variant` | `simplified` |
//! | `init`, `init_ft` | empty |
//! | `snapshot_every` | 100 |
//! | `diagnostics_every` | 1 |
//! | `output_dir` | `out` |
//! | `seed` | none |
//! | `random_amplitude` | 1e-2 |
//!
//! `init` and `init_ft` are lists `k:amp:phase, k:amp:phase, ...` meaning
//! `Σ amp·cos(kx + phase)`. When `init` is empty and `seed` is set, `f₀` is a
//! random field instead (see [`random_initial_field`]).
//!
//! # Snapshot layout (`.vwav`)
//!
//! Little-endian throughout:
//!
//! | offset | size | content |
//! |--------|------|---------|
//! | 0 | 4 | magic `VWAV` |
//! | 4 | 4 | version `u32` = 1 |
//! | 8 | 8 | `grid_n` `u64` |
//! | 16 | 8 | `t` `f64` |
//! | 24 | 40 | `δ, β, ε, α₁, α₂` as `f64` |
//! | 64 | 1 | variant `u8` (0 linear, 1 simplified, 2 full) |
//! | 65 | 3 | zero padding |
//! | 68 | 8N | physical samples of `f` |
//! | 68+8N | 8N | physical samples of `f_t` |

use std::collections::HashSet;
use std::f64::consts::PI;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::diagnostics::DiagnosticsRecord;
use crate::error::{Error, Result};
use crate::model::{ModelParams, Variant, WaveState};
use crate::spectral::{forward_transform, Grid, SpectralField};
use crate::timestepper::{default_dt, SimConfig, Sink};

pub const SNAPSHOT_MAGIC: &[u8; 4] = b"VWAV";
pub const SNAPSHOT_VERSION: u32 = 1;
pub const SNAPSHOT_HEADER_LEN: usize = 68;

/// One `k:amp:phase` entry: `amp·cos(kx + phase)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InitMode {
    pub k: i64,
    pub amplitude: f64,
    pub phase: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub grid_n: usize,
    /// 0 selects [`default_dt`].
    pub dt: f64,
    pub t_end: f64,
    pub delta: f64,
    pub beta: f64,
    pub epsilon: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub variant: Variant,
    pub init_modes: Vec<InitMode>,
    pub init_ft_modes: Vec<InitMode>,
    pub snapshot_every: usize,
    pub diagnostics_every: usize,
    pub output_dir: PathBuf,
    pub seed: Option<u64>,
    pub random_amplitude: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        let preset = ModelParams::ocean_regime();
        Self {
            grid_n: 64,
            dt: 0.0,
            t_end: 1.0,
            delta: preset.delta,
            beta: preset.beta,
            epsilon: preset.epsilon,
            alpha1: preset.alpha1,
            alpha2: preset.alpha2,
            variant: Variant::Simplified,
            init_modes: Vec::new(),
            init_ft_modes: Vec::new(),
            snapshot_every: 100,
            diagnostics_every: 1,
            output_dir: PathBuf::from("out"),
            seed: None,
            random_amplitude: 1e-2,
        }
    }
}

impl RunConfig {
    pub fn params(&self) -> ModelParams {
        ModelParams {
            delta: self.delta,
            beta: self.beta,
            epsilon: self.epsilon,
            alpha1: self.alpha1,
            alpha2: self.alpha2,
            variant: self.variant,
        }
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.grid_n)
    }

    pub fn sim_config(&self, grid: &Grid) -> SimConfig {
        let dt = if self.dt > 0.0 {
            self.dt
        } else {
            default_dt(grid, &self.params())
        };
        SimConfig {
            dt,
            t_end: self.t_end,
            snapshot_every: self.snapshot_every,
            diagnostics_every: self.diagnostics_every,
        }
    }

    /// Checks every constraint the parser cannot check line by line.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::ConfigInvalid(m));
        if self.grid_n % 2 != 0 {
            return bad("grid_n must be even".into());
        }
        if self.grid_n < 8 {
            return bad(format!("grid_n must be at least 8, got {}", self.grid_n));
        }
        if !(self.t_end.is_finite() && self.t_end > 0.0) {
            return bad(format!("t_end must be positive, got {}", self.t_end));
        }
        if !(self.dt.is_finite() && self.dt >= 0.0) {
            return bad(format!("dt must be non-negative, got {}", self.dt));
        }
        if self.snapshot_every == 0 || self.diagnostics_every == 0 {
            return bad("snapshot_every and diagnostics_every must be positive".into());
        }
        let band = (self.grid_n - 1) / 3;
        for m in self.init_modes.iter().chain(&self.init_ft_modes) {
            if m.k < 1 {
                return bad(format!("init mode k={} must be at least 1", m.k));
            }
            if m.k as usize > band {
                return bad(format!("init mode k={} exceeds dealias band {band}", m.k));
            }
        }
        if self.init_modes.is_empty() && self.init_ft_modes.is_empty() && self.seed.is_none() {
            return bad("no initial data: set `init` or `seed`".into());
        }
        if !(self.random_amplitude.is_finite() && self.random_amplitude >= 0.0) {
            return bad("random_amplitude must be non-negative".into());
        }
        self.params().validate()
    }
}

/// Parses a config file; see the [module docs](self) for the grammar.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    let mut seen = HashSet::new();
    let mut alpha_given = (false, false);
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| Error::ConfigParse {
            line: line_no,
            message,
        };
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| err(format!("expected `key = value`, got `{line}`")))?;
        let (key, value) = (key.trim(), value.trim());
        if !seen.insert(key.to_string()) {
            return Err(err(format!("duplicate key `{key}`")));
        }
        let real = || -> Result<f64> {
            value
                .parse::<f64>()
                .map_err(|_| err(format!("`{key}` expects a number, got `{value}`")))
        };
        let int = || -> Result<u64> {
            value
                .parse::<u64>()
                .map_err(|_| err(format!("`{key}` expects a non-negative integer, got `{value}`")))
        };
        match key {
            "grid_n" => cfg.grid_n = int()? as usize,
            "dt" => cfg.dt = real()?,
            "t_end" => cfg.t_end = real()?,
            "delta" => cfg.delta = real()?,
            "beta" => cfg.beta = real()?,
            "epsilon" => cfg.epsilon = real()?,
            "alpha1" => {
                cfg.alpha1 = real()?;
                alpha_given.0 = true;
            }
            "alpha2" => {
                cfg.alpha2 = real()?;
                alpha_given.1 = true;
            }
            "variant" => cfg.variant = value.parse().map_err(err)?,
            "init" => cfg.init_modes = parse_modes(value).map_err(err)?,
            "init_ft" => cfg.init_ft_modes = parse_modes(value).map_err(err)?,
            "snapshot_every" => cfg.snapshot_every = int()? as usize,
            "diagnostics_every" => cfg.diagnostics_every = int()? as usize,
            "output_dir" => cfg.output_dir = PathBuf::from(value),
            "seed" => cfg.seed = Some(int()?),
            "random_amplitude" => cfg.random_amplitude = real()?,
            other => return Err(err(format!("unknown key `{other}`"))),
        }
    }
    if !alpha_given.0 {
        cfg.alpha1 = cfg.delta;
    }
    if !alpha_given.1 {
        cfg.alpha2 = cfg.delta;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn parse_modes(value: &str) -> std::result::Result<Vec<InitMode>, String> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|entry| {
            let parts: Vec<&str> = entry.split(':').map(str::trim).collect();
            if parts.len() != 3 {
                return Err(format!("mode `{entry}` is not of the form k:amp:phase"));
            }
            let k = parts[0]
                .parse::<i64>()
                .map_err(|_| format!("bad wavenumber in `{entry}`"))?;
            let amplitude = parts[1]
                .parse::<f64>()
                .map_err(|_| format!("bad amplitude in `{entry}`"))?;
            let phase = parts[2]
                .parse::<f64>()
                .map_err(|_| format!("bad phase in `{entry}`"))?;
            Ok(InitMode { k, amplitude, phase })
        })
        .collect()
}

/// `Σ amp·cos(kx + phase)` sampled on the grid.
pub fn modes_to_field(modes: &[InitMode], grid: &Grid) -> Result<SpectralField> {
    let samples: Vec<f64> = grid
        .points()
        .iter()
        .map(|&x| {
            modes
                .iter()
                .map(|m| m.amplitude * (m.k as f64 * x + m.phase).cos())
                .sum()
        })
        .collect();
    forward_transform(&samples, grid)
}

/// Random band-limited field `f̂(k) = amplitude · k⁻³ · e^{iφ_k}` for
/// `1 ≤ k ≤ N/3`, with phases `φ_k` drawn uniformly from `[0, 2π)` in order of
/// increasing `k` from a ChaCha8 stream seeded with `seed`.
pub fn random_initial_field(grid: &Grid, seed: u64, amplitude: f64) -> SpectralField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let modes: Vec<(i64, Complex64)> = (1..=grid.dealias_cutoff() as i64)
        .map(|k| {
            let phase = rng.gen::<f64>() * 2.0 * PI;
            (k, Complex64::from_polar(amplitude * (k as f64).powi(-3), phase))
        })
        .collect();
    SpectralField::from_modes(grid, &modes).expect("modes inside the dealiased band")
}

/// `(f₀, f₁)` at `t = 0`, both projected to zero mean.
pub fn build_initial_state(cfg: &RunConfig, grid: &Grid) -> Result<WaveState> {
    let f = match (cfg.init_modes.is_empty(), cfg.seed) {
        (true, Some(seed)) => random_initial_field(grid, seed, cfg.random_amplitude),
        _ => modes_to_field(&cfg.init_modes, grid)?,
    };
    let ft = modes_to_field(&cfg.init_ft_modes, grid)?;
    WaveState::new(f, ft, 0.0)
}

/// Serialises a state in the `.vwav` layout.
pub fn encode_snapshot(state: &WaveState, params: &ModelParams) -> Result<Vec<u8>> {
    let n = state.grid().n();
    let mut out = Vec::with_capacity(SNAPSHOT_HEADER_LEN + 16 * n);
    out.extend_from_slice(SNAPSHOT_MAGIC);
    out.extend_from_slice(&SNAPSHOT_VERSION.to_le_bytes());
    out.extend_from_slice(&(n as u64).to_le_bytes());
    out.extend_from_slice(&state.t().to_le_bytes());
    for v in [params.delta, params.beta, params.epsilon, params.alpha1, params.alpha2] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out.push(params.variant.code());
    out.extend_from_slice(&[0u8; 3]);
    for field in [state.f(), state.ft()] {
        for v in field.to_samples()? {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    Ok(out)
}

struct Reader<'a> {
    bytes: &'a [u8],
    offset: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, len: usize, what: &str) -> Result<&'a [u8]> {
        let end = self.offset + len;
        if end > self.bytes.len() {
            return Err(Error::Format {
                offset: self.offset as u64,
                message: format!(
                    "truncated file: need {len} bytes for {what}, {} left",
                    self.bytes.len() - self.offset
                ),
            });
        }
        let out = &self.bytes[self.offset..end];
        self.offset = end;
        Ok(out)
    }

    fn u32(&mut self, what: &str) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }

    fn u64(&mut self, what: &str) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8, what)?.try_into().unwrap()))
    }

    fn f64(&mut self, what: &str) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8, what)?.try_into().unwrap()))
    }

    fn format_error(&self, offset: usize, message: impl Into<String>) -> Error {
        Error::Format {
            offset: offset as u64,
            message: message.into(),
        }
    }
}

/// Parses the `.vwav` layout.
pub fn decode_snapshot(bytes: &[u8]) -> Result<(WaveState, ModelParams)> {
    let mut r = Reader { bytes, offset: 0 };
    if r.take(4, "magic")? != SNAPSHOT_MAGIC {
        return Err(r.format_error(0, "bad magic, expected `VWAV`"));
    }
    let version = r.u32("version")?;
    if version != SNAPSHOT_VERSION {
        return Err(Error::UnsupportedVersion(version));
    }
    let n = r.u64("grid_n")?;
    let grid = usize::try_from(n)
        .ok()
        .and_then(|n| Grid::new(n).ok())
        .ok_or_else(|| r.format_error(8, format!("invalid grid_n {n}")))?;
    let t = r.f64("t")?;
    let mut values = [0.0; 5];
    for (v, name) in values.iter_mut().zip(["delta", "beta", "epsilon", "alpha1", "alpha2"]) {
        *v = r.f64(name)?;
    }
    let code = r.take(1, "variant")?[0];
    let variant =
        Variant::from_code(code).ok_or_else(|| r.format_error(64, format!("unknown variant code {code}")))?;
    if r.take(3, "padding")? != [0u8; 3] {
        return Err(r.format_error(65, "nonzero padding"));
    }
    let params = ModelParams {
        delta: values[0],
        beta: values[1],
        epsilon: values[2],
        alpha1: values[3],
        alpha2: values[4],
        variant,
    };
    params
        .validate()
        .map_err(|e| r.format_error(24, e.to_string()))?;

    let mut fields = Vec::with_capacity(2);
    for name in ["f samples", "f_t samples"] {
        let start = r.offset;
        let raw = r.take(8 * grid.n(), name)?;
        let samples: Vec<f64> = raw
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
            return Err(r.format_error(start + 8 * i, format!("non-finite sample in {name}")));
        }
        fields.push(forward_transform(&samples, &grid)?);
    }
    if r.offset != bytes.len() {
        return Err(r.format_error(r.offset, format!("{} trailing bytes", bytes.len() - r.offset)));
    }
    let ft = fields.pop().unwrap();
    let f = fields.pop().unwrap();
    Ok((WaveState::new(f, ft, t)?, params))
}

pub fn write_snapshot(state: &WaveState, params: &ModelParams, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, encode_snapshot(state, params)?)?;
    Ok(())
}

pub fn read_snapshot(path: impl AsRef<Path>) -> Result<(WaveState, ModelParams)> {
    decode_snapshot(&fs::read(path)?)
}

/// `snap_NNNNNN.vwav`, numbered by step.
pub fn snapshot_file_name(step: usize) -> String {
    format!("snap_{step:06}.vwav")
}

/// Writes snapshots and `diagnostics.csv` into one directory.
pub struct FileSink {
    dir: PathBuf,
    csv: BufWriter<File>,
    pub snapshots_written: usize,
    pub rows_written: usize,
}

impl FileSink {
    pub fn create(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref().to_path_buf();
        fs::create_dir_all(&dir)?;
        let mut csv = BufWriter::new(File::create(dir.join("diagnostics.csv"))?);
        writeln!(csv, "{}", DiagnosticsRecord::csv_header())?;
        Ok(Self {
            dir,
            csv,
            snapshots_written: 0,
            rows_written: 0,
        })
    }

    pub fn finish(mut self) -> Result<()> {
        self.csv.flush()?;
        Ok(())
    }
}

impl Sink for FileSink {
    fn snapshot(&mut self, step: usize, state: &WaveState, params: &ModelParams) -> Result<()> {
        write_snapshot(state, params, self.dir.join(snapshot_file_name(step)))?;
        self.snapshots_written += 1;
        Ok(())
    }

    fn diagnostics(&mut self, record: &DiagnosticsRecord) -> Result<()> {
        writeln!(self.csv, "{}", record.csv_row())?;
        self.rows_written += 1;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minimal_config_with_defaults() {
        let cfg = parse_config("grid_n = 64\nt_end = 1.0\ndelta = 0.1\ninit = 1:0.1:0.0").unwrap();
        assert_eq!(cfg.grid_n, 64);
        assert_eq!(cfg.beta, 1e-5);
        assert_eq!(cfg.epsilon, 1e-2);
        assert_eq!((cfg.alpha1, cfg.alpha2), (0.1, 0.1));
        assert_eq!(cfg.variant, Variant::Simplified);
        assert_eq!(
            cfg.init_modes,
            vec![InitMode {
                k: 1,
                amplitude: 0.1,
                phase: 0.0
            }]
        );
    }

    #[test]
    fn comments_and_blank_lines() {
        let text = "# a run\n\ngrid_n = 32 # small\ninit = 1:1:0, 2:0.5:0.1\nvariant = full\nalpha1 = 0.2\n";
        let cfg = parse_config(text).unwrap();
        assert_eq!(cfg.grid_n, 32);
        assert_eq!(cfg.init_modes.len(), 2);
        assert_eq!(cfg.variant, Variant::Full);
        assert_eq!(cfg.alpha1, 0.2);
        assert_eq!(cfg.alpha2, cfg.delta);
    }

    #[test]
    fn config_errors() {
        let msg = |t: &str| parse_config(t).unwrap_err().to_string();
        assert!(msg("grid_n = 65\ninit = 1:1:0").contains("grid_n must be even"));
        assert!(msg("grid_n = 64\ninit = 30:1:0").contains("k=30 exceeds dealias band 21"));
        assert!(msg("init = 1:1:0\ncolour = blue").contains("line 2: unknown key `colour`"));
        assert!(msg("init = 1:1:0\ninit = 2:1:0").contains("duplicate key"));
        assert!(msg("grid_n 64").contains("line 1"));
        assert!(msg("init = 1:1").contains("k:amp:phase"));
        assert!(msg("t_end = 1").contains("no initial data"));
        assert!(msg("init = 1:1:0\nt_end = -1").contains("t_end"));
        assert!(msg("init = 1:1:0\nalpha1 = 0.3").contains("alpha1 = alpha2 = delta"));
        assert!(parse_config("grid_n = 65\ninit = 1:1:0").unwrap_err().is_config_error());
    }

    #[test]
    fn initial_state_from_modes() {
        let cfg = parse_config("grid_n = 32\ninit = 1:1:0").unwrap();
        let grid = cfg.grid().unwrap();
        let s = build_initial_state(&cfg, &grid).unwrap();
        let samples = s.f().to_samples().unwrap();
        for (x, v) in grid.points().iter().zip(&samples) {
            assert!((v - x.cos()).abs() < 1e-15);
        }
        assert_eq!(s.ft().max_abs(), 0.0);
        assert_eq!(s.t(), 0.0);

        let cfg = parse_config("grid_n = 32\ninit = 1:1:1.5707963").unwrap();
        let s = build_initial_state(&cfg, &grid).unwrap();
        for (x, v) in grid.points().iter().zip(s.f().to_samples().unwrap()) {
            assert!((v + x.sin()).abs() < 1e-7);
        }
    }

    #[test]
    fn random_initial_state_is_reproducible() {
        let cfg = parse_config("grid_n = 64\nseed = 7").unwrap();
        let grid = cfg.grid().unwrap();
        let a = build_initial_state(&cfg, &grid).unwrap();
        let b = build_initial_state(&cfg, &grid).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.f().coeff(0).norm(), 0.0);
        for k in 1..=21 {
            let expect = 1e-2 * (k as f64).powi(-3);
            assert!((a.f().coeff(k).norm() - expect).abs() < 1e-15 * expect.max(1e-3));
        }
        assert_eq!(a.f().coeff(22).norm(), 0.0);
        let other = parse_config("grid_n = 64\nseed = 8").unwrap();
        assert_ne!(build_initial_state(&other, &grid).unwrap(), a);
    }

    #[test]
    fn snapshot_header_layout() {
        let cfg = parse_config("grid_n = 8\ninit = 1:1:0").unwrap();
        let grid = cfg.grid().unwrap();
        let s = build_initial_state(&cfg, &grid).unwrap().with_time(2.5);
        let bytes = encode_snapshot(&s, &cfg.params()).unwrap();
        assert_eq!(bytes.len(), 68 + 16 * 8);
        assert_eq!(&bytes[0..4], b"VWAV");
        assert_eq!(u32::from_le_bytes(bytes[4..8].try_into().unwrap()), 1);
        assert_eq!(u64::from_le_bytes(bytes[8..16].try_into().unwrap()), 8);
        assert_eq!(f64::from_le_bytes(bytes[16..24].try_into().unwrap()), 2.5);
        assert_eq!(f64::from_le_bytes(bytes[32..40].try_into().unwrap()), 1e-5);
        assert_eq!(bytes[64], 1);
        assert_eq!(&bytes[65..68], &[0, 0, 0]);
        let first = f64::from_le_bytes(bytes[68..76].try_into().unwrap());
        assert_eq!(first, (-PI).cos());
    }

    #[test]
    fn snapshot_errors() {
        let cfg = parse_config("grid_n = 8\ninit = 1:1:0").unwrap();
        let grid = cfg.grid().unwrap();
        let s = build_initial_state(&cfg, &grid).unwrap();
        let bytes = encode_snapshot(&s, &cfg.params()).unwrap();

        match decode_snapshot(&bytes[..100]) {
            Err(Error::Format { offset, .. }) => assert_eq!(offset, 68),
            other => panic!("{other:?}"),
        }
        match decode_snapshot(&bytes[..20]) {
            Err(Error::Format { offset, .. }) => assert_eq!(offset, 16),
            other => panic!("{other:?}"),
        }
        let mut v2 = bytes.clone();
        v2[4..8].copy_from_slice(&2u32.to_le_bytes());
        assert_eq!(decode_snapshot(&v2).unwrap_err().to_string(), "unsupported version 2");
        let mut magic = bytes.clone();
        magic[0] = b'X';
        assert!(matches!(decode_snapshot(&magic), Err(Error::Format { offset: 0, .. })));
        let mut variant = bytes.clone();
        variant[64] = 9;
        assert!(matches!(decode_snapshot(&variant), Err(Error::Format { offset: 64, .. })));
        let mut extra = bytes.clone();
        extra.push(0);
        assert!(matches!(decode_snapshot(&extra), Err(Error::Format { offset: 196, .. })));
    }
}
