// Copyright 2026 The unruh-preth Authors
// SPDX-License-Identifier: Apache-2.0

//! Scenario files and the runner that turns them into CSV/JSON outputs.
//!
//! A scenario is a JSON object:
//!
//! ```json
//! {
//!   "name": "two_atom_spectrum",
//!   "mode": "spectrum",
//!   "rates": { "gamma_plus": 0.8, "gamma_minus": 0.2, "f_ab": 1.0, "n_atoms": 2 },
//!   "f_values": [0.0, 0.99, 0.9999, 1.0]
//! }
//! ```
//!
//! Sweep points run on the rayon pool and are written in input order.
//! Floats are written as `{:.16e}`, so identical scenarios give
//! byte-identical files.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{json, Value};

use crate::bloch::{evolve_bloch, gge_steady, gibbs_steady, prethermal_departure_time, reconstruct_density, rhs_residual, BlochState, GgeParameters};
use crate::dicke::{
    burst_metrics, cascade_trajectory, entropy_vs_n, evolve_block, independent_decay_time, DickeBlock, EntropyRegime,
};
use crate::error::{Error, Result};
use crate::fit::{power_law_fit, PowerLawFit};
use crate::liouvillian::{build_lindbladian, DEFAULT_ZERO_TOL, MAX_DENSE_ATOMS};
use crate::measures::{concurrence_wootters, observables, purity, von_neumann_entropy};
use crate::rates::{compute_f_ab, PhysicalConfig, PrethermalTimescales, RateSet, RateSpec, UnitMode};
use crate::state::{DensityMatrix, DipolarState};

/// Scenarios shipped with the crate, as `(name, json)`.
pub const BUNDLED: &[(&str, &str)] = &[
    ("fig1_spectrum", include_str!("../../../scenarios/fig1_spectrum.json")),
    ("fig2_panel", include_str!("../../../scenarios/fig2_panel.json")),
    ("fig3_scaling", include_str!("../../../scenarios/fig3_scaling.json")),
    ("fig4_entropy", include_str!("../../../scenarios/fig4_entropy.json")),
    ("fig5_cascade", include_str!("../../../scenarios/fig5_cascade.json")),
    ("fig6_contour", include_str!("../../../scenarios/fig6_contour.json")),
    ("lifetime", include_str!("../../../scenarios/lifetime.json")),
    ("steady", include_str!("../../../scenarios/steady.json")),
];

/// Parse a bundled scenario by name.
pub fn bundled(name: &str) -> Result<Scenario> {
    let (_, text) = BUNDLED
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| Error::Scenario(format!("no bundled scenario named `{name}`")))?;
    Scenario::from_json(text)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Spectrum,
    Evolve,
    Steady,
    DickeScaling,
    Cascade,
    EntropyScan,
    FabContour,
    Lifetime,
}

impl Mode {
    pub fn label(self) -> &'static str {
        match self {
            Mode::Spectrum => "spectrum",
            Mode::Evolve => "evolve",
            Mode::Steady => "steady",
            Mode::DickeScaling => "dicke_scaling",
            Mode::Cascade => "cascade",
            Mode::EntropyScan => "entropy_scan",
            Mode::FabContour => "fab_contour",
            Mode::Lifetime => "lifetime",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeGrid {
    pub t_min: f64,
    pub t_max: f64,
    pub points: usize,
    /// Defaults to `log` for cascades and `linear` otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spacing: Option<Spacing>,
}

impl TimeGrid {
    fn resolved(&self, default: Spacing) -> Spacing {
        self.spacing.unwrap_or(default)
    }

    fn validate(&self, default: Spacing) -> Result<()> {
        let bad = |m: String| Err(Error::Scenario(format!("time_grid: {m}")));
        if !(self.t_min.is_finite() && self.t_max.is_finite()) {
            return bad("bounds must be finite".into());
        }
        if self.t_min < 0.0 {
            return bad(format!("t_min = {} is negative", self.t_min));
        }
        if self.resolved(default) == Spacing::Log && self.t_min <= 0.0 {
            return bad("log spacing needs t_min > 0".into());
        }
        if self.t_max <= self.t_min {
            return bad(format!("t_max = {} must exceed t_min = {}", self.t_max, self.t_min));
        }
        if self.points < 2 {
            return bad("need at least two points".into());
        }
        Ok(())
    }

    pub fn times(&self, default: Spacing) -> Vec<f64> {
        let n = self.points - 1;
        (0..=n)
            .map(|k| {
                let s = k as f64 / n as f64;
                match self.resolved(default) {
                    Spacing::Linear => self.t_min + (self.t_max - self.t_min) * s,
                    Spacing::Log => self.t_min * (self.t_max / self.t_min).powf(s),
                }
            })
            .collect()
    }
}

/// Initial condition named in a scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialState {
    Dipolar(DipolarState),
    /// `|↑...↑>` for any `N`.
    AllUp,
    /// `|↓...↓>` for any `N`.
    AllDown,
}

impl InitialState {
    pub fn label(self) -> &'static str {
        match self {
            InitialState::Dipolar(d) => d.label(),
            InitialState::AllUp => "all_up",
            InitialState::AllDown => "all_down",
        }
    }

    pub fn density_matrix(self, n_atoms: usize) -> Result<DensityMatrix> {
        match self {
            InitialState::Dipolar(d) if n_atoms == 2 => Ok(d.density_matrix()),
            InitialState::Dipolar(d) => Err(Error::Scenario(format!("`{d}` is a two-atom state, N = {n_atoms}"))),
            InitialState::AllUp => DensityMatrix::all_up(n_atoms),
            InitialState::AllDown => DensityMatrix::all_down(n_atoms),
        }
    }

    /// Level index `J + m` of the principal Dicke block.
    pub fn dicke_level(self, n_atoms: usize) -> Result<usize> {
        match self {
            InitialState::AllUp | InitialState::Dipolar(DipolarState::UpUp) => Ok(n_atoms),
            InitialState::AllDown | InitialState::Dipolar(DipolarState::DownDown) => Ok(0),
            other => Err(Error::Scenario(format!(
                "`{other}` is not a single level of the principal block"
            ))),
        }
    }
}

impl fmt::Display for InitialState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for InitialState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all_up" => Ok(InitialState::AllUp),
            "all_down" => Ok(InitialState::AllDown),
            _ => s.parse().map(InitialState::Dipolar),
        }
    }
}

impl Serialize for InitialState {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.label())
    }
}

impl<'de> Deserialize<'de> for InitialState {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Inclusive log-spaced range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogRange {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl LogRange {
    fn validate(&self, what: &str) -> Result<()> {
        if !(self.min.is_finite() && self.max.is_finite() && self.min > 0.0 && self.max >= self.min) {
            return Err(Error::Scenario(format!("{what}: need 0 < min <= max, got [{}, {}]", self.min, self.max)));
        }
        if self.points < 2 {
            return Err(Error::Scenario(format!("{what}: need at least two points")));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        let n = self.points - 1;
        (0..=n)
            .map(|k| self.min * (self.max / self.min).powf(k as f64 / n as f64))
            .collect()
    }
}

/// SI grid over acceleration and separation at fixed `omega0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContourSpec {
    /// 1/s.
    pub omega0: f64,
    /// m/s^2.
    pub alpha_range: LogRange,
    /// m.
    #[serde(rename = "L_range")]
    pub l_range: LogRange,
}

impl ContourSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.omega0.is_finite() && self.omega0 > 0.0) {
            return Err(Error::Scenario(format!("contour: omega0 must be > 0, got {}", self.omega0)));
        }
        self.alpha_range.validate("contour.alpha_range")?;
        self.l_range.validate("contour.L_range")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContourPoint {
    pub alpha: f64,
    #[serde(rename = "L")]
    pub l: f64,
    pub f_ab: f64,
    /// `(T_th - T_pre) / T_th`.
    pub t_pre_frac: f64,
}

/// `f_ab` and the fractional prethermal lifetime on an `(alpha, L)` grid,
/// alpha-major.
pub fn contour_fab(spec: &ContourSpec) -> Result<Vec<ContourPoint>> {
    spec.validate()?;
    let ls = spec.l_range.values();
    let points: Vec<(f64, f64)> = spec
        .alpha_range
        .values()
        .into_iter()
        .flat_map(|a| ls.iter().map(move |&l| (a, l)))
        .collect();
    points
        .par_iter()
        .map(|&(alpha, l)| {
            let config = PhysicalConfig {
                omega0: spec.omega0,
                alpha,
                separation: l,
                coupling: 1.0,
                n_atoms: 2,
                unit_mode: UnitMode::Si,
            };
            config.validate()?;
            let f_ab = compute_f_ab(&config);
            // f_ab = 1 only at L = 0, where the fraction tends to 1
            let t_pre_frac = if f_ab < 1.0 {
                PrethermalTimescales::new(1.0, f_ab)?.fraction()
            } else {
                1.0
            };
            Ok(ContourPoint {
                alpha,
                l,
                f_ab,
                t_pre_frac,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub mode: Mode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rates: Option<RateSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub initial_states: Vec<InitialState>,
    /// Overrides the `f_ab` of `rates`; one run per value.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub f_values: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time_grid: Option<TimeGrid>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub n_values: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub contour: Option<ContourSpec>,
    /// Relative band for plateau departure in `lifetime` mode.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub band_fraction: Option<f64>,
    /// Output subdirectory; defaults to `name`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

/// Default relative band for plateau departure.
pub const DEFAULT_BAND_FRACTION: f64 = 0.1;

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self> {
        let s: Scenario = serde_json::from_str(text).map_err(|e| Error::Scenario(e.to_string()))?;
        s.validate()?;
        Ok(s)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    fn default_spacing(&self) -> Spacing {
        if self.mode == Mode::Cascade {
            Spacing::Log
        } else {
            Spacing::Linear
        }
    }

    pub fn times(&self) -> Option<Vec<f64>> {
        self.time_grid.map(|g| g.times(self.default_spacing()))
    }

    fn require<T>(&self, field: Option<T>, what: &str) -> Result<T> {
        field.ok_or_else(|| Error::Scenario(format!("mode `{}` needs `{what}`", self.mode.label())))
    }

    fn rate_spec(&self) -> Result<RateSpec> {
        self.require(self.rates, "rates")
    }

    fn n_atoms(&self) -> Result<usize> {
        Ok(self.rate_spec()?.n_atoms())
    }

    /// Base rates at each requested `f_ab`.
    pub fn rate_sets(&self) -> Result<Vec<RateSet>> {
        let base = self.rate_spec()?.rates()?;
        if self.f_values.is_empty() {
            return Ok(vec![base]);
        }
        self.f_values.iter().map(|&f| base.with_f_ab(f)).collect()
    }

    fn need_states(&self) -> Result<()> {
        if self.initial_states.is_empty() {
            return Err(Error::Scenario(format!("mode `{}` needs `initial_states`", self.mode.label())));
        }
        Ok(())
    }

    fn need_n_values(&self) -> Result<()> {
        if self.n_values.is_empty() || self.n_values.contains(&0) {
            return Err(Error::Scenario(format!(
                "mode `{}` needs a non-empty `n_values` of positive integers",
                self.mode.label()
            )));
        }
        Ok(())
    }

    fn need_n(&self, ok: impl Fn(usize) -> bool, what: &str) -> Result<()> {
        let n = self.n_atoms()?;
        if !ok(n) {
            return Err(Error::Scenario(format!("mode `{}` needs {what}, got n_atoms = {n}", self.mode.label())));
        }
        Ok(())
    }

    /// Check that every field the mode needs is present and well formed.
    pub fn validate(&self) -> Result<()> {
        if self.name.is_empty() {
            return Err(Error::Scenario("`name` is empty".into()));
        }
        if let Some(out) = &self.output {
            let p = Path::new(out);
            if out.is_empty() || p.is_absolute() || p.components().any(|c| matches!(c, std::path::Component::ParentDir)) {
                return Err(Error::Scenario(format!("`output` must be a relative path without `..`, got `{out}`")));
            }
        }
        if let Some(g) = &self.time_grid {
            g.validate(self.default_spacing())?;
        }
        if self.mode != Mode::FabContour {
            self.rate_sets()?;
        }
        for s in &self.initial_states {
            if let Some(n) = self.rates.map(|r| r.n_atoms()) {
                if matches!(s, InitialState::Dipolar(_)) && n != 2 && self.mode != Mode::DickeScaling {
                    return Err(Error::Scenario(format!("`{s}` is a two-atom state, n_atoms = {n}")));
                }
            }
        }
        match self.mode {
            Mode::Spectrum => self.need_n(|n| n <= MAX_DENSE_ATOMS, "n_atoms <= 6")?,
            Mode::Evolve => {
                self.need_n(|n| n == 2, "n_atoms = 2")?;
                self.need_states()?;
                self.require(self.time_grid, "time_grid")?;
            }
            Mode::Steady => {
                self.need_n(|n| n == 2, "n_atoms = 2")?;
                let collective = self.rate_sets()?.iter().any(|r| r.f_ab == 1.0);
                if collective {
                    self.need_states()?;
                }
            }
            Mode::DickeScaling => {
                self.need_n_values()?;
                if self.initial_states.len() != 1 {
                    return Err(Error::Scenario("mode `dicke_scaling` needs exactly one initial state".into()));
                }
                self.initial_states[0].dicke_level(1)?;
            }
            Mode::Cascade => {
                self.need_n(|n| n <= MAX_DENSE_ATOMS, "n_atoms <= 6")?;
                self.require(self.time_grid, "time_grid")?;
            }
            Mode::EntropyScan => self.need_n_values()?,
            Mode::FabContour => self.require(self.contour, "contour")?.validate()?,
            Mode::Lifetime => {
                self.need_n(|n| n == 2, "n_atoms = 2")?;
                self.need_states()?;
                if self.rate_sets()?.iter().any(|r| !(0.0..1.0).contains(&r.f_ab)) {
                    return Err(Error::Scenario("mode `lifetime` needs every f_ab in [0, 1)".into()));
                }
                let band = self.band_fraction.unwrap_or(DEFAULT_BAND_FRACTION);
                if !(band > 0.0 && band < 1.0) {
                    return Err(Error::Scenario(format!("band_fraction must lie in (0, 1), got {band}")));
                }
            }
        }
        Ok(())
    }
}

/// What a run wrote and its headline numbers.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub scenario: String,
    pub mode: Mode,
    pub out_dir: PathBuf,
    pub files: Vec<String>,
    pub rows_written: usize,
    pub metrics: Value,
}

/// Fixed 17-significant-digit float formatting.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Filename fragment for an `f_ab` value.
fn f_tag(f: f64) -> String {
    format!("f{f}")
}

struct Sink {
    dir: PathBuf,
    files: Vec<String>,
    rows: usize,
}

impl Sink {
    fn new(dir: PathBuf) -> Result<Self> {
        fs::create_dir_all(&dir)?;
        Ok(Self {
            dir,
            files: Vec::new(),
            rows: 0,
        })
    }

    fn csv(&mut self, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
        let mut w = csv::Writer::from_path(self.dir.join(name))?;
        w.write_record(header)?;
        for r in rows {
            w.write_record(r)?;
        }
        w.flush()?;
        self.rows += rows.len();
        self.files.push(name.to_owned());
        Ok(())
    }

    fn json(&mut self, name: &str, value: &impl Serialize) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        fs::write(self.dir.join(name), text)?;
        self.files.push(name.to_owned());
        Ok(())
    }
}

/// Run a validated scenario, writing into `out_root/<output or name>`.
pub fn run_scenario(scenario: &Scenario, out_root: &Path) -> Result<Summary> {
    scenario.validate()?;
    let dir = out_root.join(scenario.output.as_deref().unwrap_or(&scenario.name));
    let mut sink = Sink::new(dir.clone())?;
    let metrics = match scenario.mode {
        Mode::Spectrum => run_spectrum(scenario, &mut sink)?,
        Mode::Evolve => run_evolve(scenario, &mut sink)?,
        Mode::Steady => run_steady(scenario, &mut sink)?,
        Mode::DickeScaling => run_scaling(scenario, &mut sink)?,
        Mode::Cascade => run_cascade(scenario, &mut sink)?,
        Mode::EntropyScan => run_entropy(scenario, &mut sink)?,
        Mode::FabContour => run_contour(scenario, &mut sink)?,
        Mode::Lifetime => run_lifetime(scenario, &mut sink)?,
    };
    Ok(Summary {
        scenario: scenario.name.clone(),
        mode: scenario.mode,
        out_dir: dir,
        files: sink.files,
        rows_written: sink.rows,
        metrics,
    })
}

fn run_spectrum(s: &Scenario, sink: &mut Sink) -> Result<Value> {
    let n = s.n_atoms()?;
    let reports = s
        .rate_sets()?
        .par_iter()
        .map(|r| build_lindbladian(r, n)?.spectrum(DEFAULT_ZERO_TOL).map(|rep| (r.f_ab, rep)))
        .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    let mut per_f = Vec::new();
    for (f, rep) in &reports {
        for (k, z) in rep.eigenvalues.iter().enumerate() {
            rows.push(vec![fmt_float(*f), k.to_string(), fmt_float(z.re), fmt_float(z.im)]);
        }
        sink.json(&format!("spectrum_{}.json", f_tag(*f)), rep)?;
        let slowest = rep.decay_rates().into_iter().find(|r| *r > 0.0);
        per_f.push(json!({
            "f_ab": f,
            "zero_count": rep.zero_count,
            "adr": rep.adr,
            "slowest_nonzero_rate": slowest,
            "max_imaginary": rep.max_imaginary(),
        }));
    }
    sink.csv("spectrum.csv", &["f_ab", "index", "re", "im"], &rows)?;
    Ok(json!({ "n_atoms": n, "spectra": per_f }))
}

/// One trajectory row: `t, Mz, Mzz, Mc, purity, entropy, concurrence, model`.
fn trajectory_row(t: f64, rho: &DensityMatrix, model: &str) -> Result<(Vec<String>, [f64; 3])> {
    let o = observables(rho)?;
    let row = vec![
        fmt_float(t),
        fmt_float(o.mz),
        fmt_float(o.mzz),
        fmt_float(o.mc),
        fmt_float(purity(rho)),
        fmt_float(von_neumann_entropy(rho)?),
        fmt_float(concurrence_wootters(rho)?),
        model.to_owned(),
    ];
    Ok((row, [o.mz, o.mzz, o.mc]))
}

const TRAJECTORY_HEADER: [&str; 8] = ["t", "Mz", "Mzz", "Mc", "purity", "entropy", "concurrence", "model"];

fn run_evolve(s: &Scenario, sink: &mut Sink) -> Result<Value> {
    let times = s.require(s.times(), "time_grid")?;
    let jobs: Vec<(RateSet, InitialState)> = s
        .rate_sets()?
        .into_iter()
        .flat_map(|r| s.initial_states.iter().map(move |&st| (r, st)))
        .collect();
    let results = jobs
        .par_iter()
        .map(|(r, st)| {
            let rho0 = st.density_matrix(2)?;
            let sop = build_lindbladian(r, 2)?;
            let dense = sop.propagator().evolve(&rho0, &times)?;
            let bloch = evolve_bloch(r, &BlochState::from_observables(&observables(&rho0)?), &times)?;
            let mut rows = Vec::with_capacity(2 * times.len());
            let mut diff = 0.0f64;
            let mut dense_obs = Vec::with_capacity(times.len());
            for (t, rho) in times.iter().zip(&dense) {
                let (row, o) = trajectory_row(*t, rho, "dense")?;
                rows.push(row);
                dense_obs.push(o);
            }
            for (b, o) in bloch.iter().zip(&dense_obs) {
                let rho = reconstruct_density(b.mz, b.mzz, b.mc)?;
                let (row, _) = trajectory_row(b.tau, &rho, "bloch")?;
                rows.push(row);
                diff = diff.max(b.max_abs_diff(&BlochState::new(o[0], o[1], o[2])));
            }
            Ok((r.f_ab, *st, rows, diff))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut worst = 0.0f64;
    for (f, st, rows, diff) in &results {
        sink.csv(&format!("evolve_{st}_{}.csv", f_tag(*f)), &TRAJECTORY_HEADER, rows)?;
        worst = worst.max(*diff);
    }
    Ok(json!({ "trajectories": results.len(), "max_dense_bloch_difference": worst }))
}

fn steady_row(f: f64, initial: &str, method: &str, rho: &DensityMatrix) -> Result<(Vec<String>, [f64; 3])> {
    let o = observables(rho)?;
    let row = vec![
        fmt_float(f),
        initial.to_owned(),
        method.to_owned(),
        fmt_float(o.mz),
        fmt_float(o.mzz),
        fmt_float(o.mc),
        fmt_float(purity(rho)),
        fmt_float(von_neumann_entropy(rho)?),
    ];
    Ok((row, [o.mz, o.mzz, o.mc]))
}

fn max_diff(a: [f64; 3], b: [f64; 3]) -> f64 {
    a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn run_steady(s: &Scenario, sink: &mut Sink) -> Result<Value> {
    let results = s
        .rate_sets()?
        .par_iter()
        .map(|r| -> Result<(Vec<Vec<String>>, Value)> {
            let sop = build_lindbladian(r, 2)?;
            let zero_count = sop.spectrum(DEFAULT_ZERO_TOL)?.zero_count;
            let mut rows = Vec::new();
            let f = r.f_ab;
            if zero_count == 1 {
                let ss = sop.steady_states(DEFAULT_ZERO_TOL)?.remove(0);
                let (row, num) = steady_row(f, "any", "null_space", &ss)?;
                rows.push(row);
                let g = gibbs_steady(r)?;
                let (row, ana) = steady_row(f, "any", "gibbs", &g.density)?;
                rows.push(row);
                return Ok((rows, json!({ "f_ab": f, "zero_count": 1, "max_deviation": max_diff(num, ana) })));
            }
            let mut worst = 0.0f64;
            let mut worst_rhs = 0.0f64;
            let mut worst_generator = 0.0f64;
            for st in &s.initial_states {
                let rho0 = st.density_matrix(2)?;
                let init = BlochState::from_observables(&observables(&rho0)?);
                let gge = gge_steady(&GgeParameters::new(&init, r.m0))?;
                let asym = sop.asymptotic_state(&rho0, DEFAULT_ZERO_TOL)?;
                let (row, ana) = steady_row(f, st.label(), "gge", &gge.density)?;
                rows.push(row);
                let (row, num) = steady_row(f, st.label(), "asymptotic", &asym)?;
                rows.push(row);
                worst = worst.max(max_diff(ana, num));
                worst_rhs = worst_rhs.max(rhs_residual(&gge.state, r));
                let l_rho = sop.apply(&gge.density)?;
                worst_generator = worst_generator.max(crate::linalg::frobenius_c(l_rho.as_ref()));
            }
            Ok((
                rows,
                json!({
                    "f_ab": f,
                    "zero_count": zero_count,
                    "max_deviation": worst,
                    "gge_bloch_residual": worst_rhs,
                    "gge_generator_residual": worst_generator,
                }),
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    let mut per_f = Vec::new();
    for (r, m) in results {
        rows.extend(r);
        per_f.push(m);
    }
    sink.csv(
        "steady.csv",
        &["f_ab", "initial_state", "method", "Mz", "Mzz", "Mc", "purity", "entropy"],
        &rows,
    )?;
    Ok(json!({ "steady_states": per_f }))
}

fn run_scaling(s: &Scenario, sink: &mut Sink) -> Result<Value> {
    let r = s.rate_spec()?.rates()?;
    let start = s.initial_states[0];
    let times = s.times();
    let results = s
        .n_values
        .par_iter()
        .map(|&n| {
            let block = DickeBlock::level(n, start.dicke_level(n)?, r.gamma_plus, r.gamma_minus)?;
            let m = burst_metrics(&block)?;
            let baseline = independent_decay_time(n, r.gamma_plus, r.gamma_minus)?;
            let traj = times.as_ref().map(|t| evolve_block(&block, t)).transpose()?;
            Ok((n, m, baseline, traj))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    let mut base_rows = Vec::new();
    for (n, m, baseline, traj) in &results {
        rows.push(vec![n.to_string(), fmt_float(m.i_max), fmt_float(m.t_peak), fmt_float(m.t_r)]);
        base_rows.push(vec![n.to_string(), fmt_float(*baseline)]);
        if let Some(traj) = traj {
            let tr: Vec<Vec<String>> = traj
                .times
                .iter()
                .zip(&traj.intensity)
                .map(|(t, i)| vec![fmt_float(*t), fmt_float(*i)])
                .collect();
            sink.csv(&format!("burst_N{n}.csv"), &["t", "intensity"], &tr)?;
        }
    }
    sink.csv("scaling.csv", &["N", "I_max", "t_peak", "T_R"], &rows)?;
    sink.csv("scaling_f0.csv", &["N", "T_R"], &base_rows)?;
    let mut fits: Option<(PowerLawFit, PowerLawFit)> = None;
    if results.len() >= 2 {
        let x: Vec<f64> = results.iter().map(|(n, ..)| *n as f64).collect();
        let imax: Vec<f64> = results.iter().map(|(_, m, ..)| m.i_max).collect();
        let tr: Vec<f64> = results.iter().map(|(_, m, ..)| m.t_r).collect();
        let (fi, ft) = (power_law_fit(&x, &imax)?, power_law_fit(&x, &tr)?);
        sink.json("fit_I_max.json", &fi)?;
        sink.json("fit_T_R.json", &ft)?;
        fits = Some((fi, ft));
    }
    let baseline: Vec<f64> = results.iter().map(|(_, _, b, _)| *b).collect();
    let spread = baseline.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        / baseline.iter().cloned().fold(f64::INFINITY, f64::min)
        - 1.0;
    Ok(json!({
        "initial_state": start.label(),
        "i_max_slope": fits.map(|f| f.0.slope),
        "t_r_slope": fits.map(|f| f.1.slope),
        "bursts": results.iter().filter(|(_, m, ..)| m.burst).count(),
        "f0_t_r_relative_spread": spread,
    }))
}

fn run_cascade(s: &Scenario, sink: &mut Sink) -> Result<Value> {
    let n = s.n_atoms()?;
    let times = s.require(s.times(), "time_grid")?;
    let results = s
        .rate_sets()?
        .par_iter()
        .map(|r| cascade_trajectory(r, n, &times).map(|c| (r.f_ab, c)))
        .collect::<Result<Vec<_>>>()?;
    let mut per_f = Vec::new();
    for (f, c) in &results {
        let rows: Vec<Vec<String>> = c
            .times
            .iter()
            .zip(&c.intensity)
            .map(|(t, i)| vec![fmt_float(*t), fmt_float(*i)])
            .collect();
        let tag = f_tag(*f);
        sink.csv(&format!("cascade_{tag}.csv"), &["t", "intensity"], &rows)?;
        let meta = json!({
            "f_ab": f,
            "n_atoms": n,
            "peak_time": c.peak_time,
            "peak_intensity": c.peak_intensity,
            "burst_efolding_time": c.burst_efolding_time,
            "plateau": c.plateau,
            "gge_intensity": c.gge_intensity,
            "gibbs_intensity": c.gibbs_intensity,
            "final_intensity": c.intensity.last(),
        });
        sink.json(&format!("cascade_{tag}.json"), &meta)?;
        per_f.push(meta);
    }
    Ok(json!({ "cascades": per_f }))
}

fn run_entropy(s: &Scenario, sink: &mut Sink) -> Result<Value> {
    let r = s.rate_spec()?.rates()?;
    let f0 = entropy_vs_n(&r, &s.n_values, EntropyRegime::F0)?;
    let f1 = entropy_vs_n(&r, &s.n_values, EntropyRegime::F1Principal)?;
    let rows: Vec<Vec<String>> = f0
        .iter()
        .zip(&f1)
        .map(|((n, a), (_, b))| vec![n.to_string(), fmt_float(*a), fmt_float(*b)])
        .collect();
    sink.csv("entropy.csv", &["N", "S_f0", "S_f1_principal"], &rows)?;
    Ok(json!({
        "points": rows.len(),
        "s_f1_last": f1.last().map(|p| p.1),
        "s_f0_last": f0.last().map(|p| p.1),
    }))
}

fn run_contour(s: &Scenario, sink: &mut Sink) -> Result<Value> {
    let spec = s.require(s.contour, "contour")?;
    let grid = contour_fab(&spec)?;
    let rows: Vec<Vec<String>> = grid
        .iter()
        .map(|p| vec![fmt_float(p.alpha), fmt_float(p.l), fmt_float(p.f_ab), fmt_float(p.t_pre_frac)])
        .collect();
    sink.csv("contour.csv", &["alpha", "L", "f_ab", "T_pre_frac"], &rows)?;
    let above = grid.iter().filter(|p| p.f_ab > 0.99).count();
    let frac_defect = grid.iter().map(|p| (p.t_pre_frac - p.f_ab).abs()).fold(0.0, f64::max);
    Ok(json!({
        "points": grid.len(),
        "points_above_0_99": above,
        "max_fraction_defect": frac_defect,
    }))
}

fn run_lifetime(s: &Scenario, sink: &mut Sink) -> Result<Value> {
    let band = s.band_fraction.unwrap_or(DEFAULT_BAND_FRACTION);
    let jobs: Vec<(RateSet, InitialState)> = s
        .rate_sets()?
        .into_iter()
        .flat_map(|r| s.initial_states.iter().map(move |&st| (r, st)))
        .collect();
    let results = jobs
        .par_iter()
        .map(|(r, st)| {
            let init = BlochState::from_observables(&observables(&st.density_matrix(2)?)?);
            let t = prethermal_departure_time(r, &init, band)?;
            let t_th = PrethermalTimescales::new(r.total_rate(), r.f_ab)?.t_th;
            Ok((r.f_ab, *st, t, t_th))
        })
        .collect::<Result<Vec<_>>>()?;
    let rows: Vec<Vec<String>> = results
        .iter()
        .map(|(f, st, t, th)| {
            vec![
                fmt_float(*f),
                st.label().to_owned(),
                t.map(fmt_float).unwrap_or_default(),
                fmt_float(*th),
            ]
        })
        .collect();
    sink.csv("lifetime.csv", &["f_ab", "initial_state", "departure_time", "T_th"], &rows)?;
    let entries: Vec<Value> = results
        .iter()
        .map(|(f, st, t, th)| json!({ "f_ab": f, "initial_state": st.label(), "departure_time": t, "T_th": th }))
        .collect();
    Ok(json!({ "band_fraction": band, "lifetimes": entries }))
}
