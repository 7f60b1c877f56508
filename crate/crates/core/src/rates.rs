// Copyright 2026 The unruh-preth Authors
// SPDX-License-Identifier: Apache-2.0

//! Transition rates of accelerated two-level atoms coupled to the massless
//! scalar vacuum.
//!
//! Everything downstream (generators, reduced models, collective blocks) is
//! driven by a [`RateSet`]. A rate set is either derived from physical
//! parameters through [`compute_rates`] or written down directly through
//! [`rates_from_gammas`], which is how the figure scenarios fix
//! `gamma_plus + gamma_minus = 1`.
//!
//! The cross-atom factor is
//!
//! ```text
//! f = sin(2 (w0/a) asinh(a L / 2)) / (L w0 sqrt(1 + L^2 a^2 / 4))
//! ```
//!
//! in natural units. It is evaluated here in the factorized form
//! `sinc(z) * asinh(x)/x / sqrt(1 + x^2)` with `x = aL/2`, `z = 2 (w0/a) asinh(x)`,
//! which has no removable singularity at `L = 0`.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{invalid, Error, Result};

/// Reduced Planck constant, J s (CODATA 2018, exact).
pub const HBAR: f64 = 1.054_571_817e-34;
/// Speed of light in vacuum, m/s (exact).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// Boltzmann constant, J/K (exact).
pub const BOLTZMANN: f64 = 1.380_649e-23;

/// Beyond this value of `pi w0 / a`, `tanh` and `coth` are pinned to 1.
pub const HYPERBOLIC_CLAMP: f64 = 700.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum UnitMode {
    /// `c = hbar = 1`; `alpha` and `L` are mutually inverse lengths.
    #[default]
    Natural,
    /// `omega0` in 1/s, `alpha` in m/s^2, `L` in m.
    #[serde(rename = "SI", alias = "si")]
    Si,
}

/// Physical parameters of the accelerated atoms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConfig {
    pub omega0: f64,
    pub alpha: f64,
    #[serde(rename = "L")]
    pub separation: f64,
    #[serde(rename = "lambda")]
    pub coupling: f64,
    pub n_atoms: usize,
    #[serde(default)]
    pub unit_mode: UnitMode,
}

impl PhysicalConfig {
    pub fn new(
        omega0: f64,
        alpha: f64,
        separation: f64,
        coupling: f64,
        n_atoms: usize,
        unit_mode: UnitMode,
    ) -> Result<Self> {
        let config = Self {
            omega0,
            alpha,
            separation,
            coupling,
            n_atoms,
            unit_mode,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega0.is_finite() && self.omega0 > 0.0) {
            return Err(invalid("omega0", format!("must be finite and > 0, got {}", self.omega0)));
        }
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return Err(invalid("alpha", format!("must be finite and > 0, got {}", self.alpha)));
        }
        if !(self.separation.is_finite() && self.separation >= 0.0) {
            return Err(invalid("L", format!("must be finite and >= 0, got {}", self.separation)));
        }
        if !self.coupling.is_finite() {
            return Err(invalid("lambda", "must be finite"));
        }
        if self.n_atoms == 0 {
            return Err(invalid("n_atoms", "must be >= 1"));
        }
        Ok(())
    }

    /// The dimensionless groups `(x, y, l)` with `x = aL/2`, `y = w0/a`,
    /// `l = L w0` (speed of light restored in SI mode).
    fn dimensionless_groups(&self) -> (f64, f64, f64) {
        match self.unit_mode {
            UnitMode::Natural => (
                self.alpha * self.separation / 2.0,
                self.omega0 / self.alpha,
                self.separation * self.omega0,
            ),
            UnitMode::Si => {
                let c = SPEED_OF_LIGHT;
                (
                    self.alpha * self.separation / (2.0 * c * c),
                    self.omega0 * c / self.alpha,
                    self.separation * self.omega0 / c,
                )
            }
        }
    }

    /// `pi w0 / a`, the argument of the thermal `tanh`/`coth` factors.
    pub fn thermal_argument(&self) -> f64 {
        let (_, y, _) = self.dimensionless_groups();
        std::f64::consts::PI * y
    }
}

/// Dissipator coefficients for one pair of identical atoms.
///
/// `a_*`/`b_*` are the even/odd Kossakowski combinations; `gamma_plus` and
/// `gamma_minus` are the rates of the raising and lowering jump channels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateSet {
    pub gamma_plus: f64,
    pub gamma_minus: f64,
    pub a_local: f64,
    pub b_local: f64,
    pub a_cross: f64,
    pub b_cross: f64,
    pub f_ab: f64,
    pub m0: f64,
}

impl RateSet {
    /// `gamma_plus + gamma_minus`, the single-atom population relaxation rate.
    pub fn total_rate(&self) -> f64 {
        self.gamma_plus + self.gamma_minus
    }

    /// Same local rates with a different cross-atom factor.
    pub fn with_f_ab(&self, f_ab: f64) -> Result<Self> {
        check_f(f_ab)?;
        let out = Self {
            a_cross: f_ab * self.a_local,
            b_cross: f_ab * self.b_local,
            f_ab,
            ..*self
        };
        out.check_invariants(1e-12)?;
        Ok(out)
    }

    pub fn check_invariants(&self, tol: f64) -> Result<()> {
        let fail = |what: &str| Err(Error::Invariant(format!("rate set {what}: {self:?}")));
        if self.gamma_plus < 0.0 || self.gamma_minus < 0.0 {
            return fail("has a negative rate");
        }
        if (self.total_rate() - self.b_local).abs() > tol * self.b_local.max(1.0) {
            return fail("violates gamma_plus + gamma_minus = B");
        }
        if !(self.b_local > 0.0) || self.a_local < self.b_local * (1.0 - tol) {
            return fail("violates A >= B > 0");
        }
        if self.f_ab.abs() > 1.0 {
            return fail("has |f_ab| > 1");
        }
        let scale = self.a_local.max(1.0);
        if (self.a_cross - self.f_ab * self.a_local).abs() > tol * scale
            || (self.b_cross - self.f_ab * self.b_local).abs() > tol * scale
        {
            return fail("has cross terms inconsistent with f_ab");
        }
        Ok(())
    }
}

fn check_f(f_ab: f64) -> Result<()> {
    if !(f_ab.is_finite() && f_ab.abs() <= 1.0) {
        return Err(invalid("f_ab", format!("must lie in [-1, 1], got {f_ab}")));
    }
    Ok(())
}

fn sinc(z: f64) -> f64 {
    if z.abs() < 1e-4 {
        1.0 - z * z / 6.0
    } else {
        z.sin() / z
    }
}

/// `asinh(x) / x`, continuous at zero.
fn asinhc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        x.asinh() / x
    }
}

/// Cross-atom dissipation factor for `a != b`.
///
/// Returns 1 at `L = 0`. The value oscillates in sign for large `aL`; its
/// magnitude never exceeds 1.
pub fn compute_f_ab(config: &PhysicalConfig) -> f64 {
    if config.separation == 0.0 {
        return 1.0;
    }
    let (x, y, _) = config.dimensionless_groups();
    let z = 2.0 * y * x.asinh();
    sinc(z) * asinhc(x) / (1.0 + x * x).sqrt()
}

/// Literal evaluation of the quotient form, kept for cross-checks.
#[doc(hidden)]
pub fn f_ab_quotient_form(config: &PhysicalConfig) -> f64 {
    let (x, y, l) = config.dimensionless_groups();
    (2.0 * y * x.asinh()).sin() / (l * (1.0 + x * x).sqrt())
}

/// `(tanh, coth)` of the thermal argument with the overflow clamp applied.
fn thermal_factors(arg: f64) -> (f64, f64) {
    if arg > HYPERBOLIC_CLAMP {
        (1.0, 1.0)
    } else {
        let t = arg.tanh();
        (t, 1.0 / t)
    }
}

pub fn compute_rates(config: &PhysicalConfig) -> Result<RateSet> {
    config.validate()?;
    let b_local = config.coupling * config.coupling * config.omega0 / (8.0 * std::f64::consts::PI);
    if !(b_local > 0.0) {
        return Err(invalid("lambda", "coupling must be nonzero"));
    }
    let (m0, coth) = thermal_factors(config.thermal_argument());
    let f_ab = compute_f_ab(config);
    let a_local = b_local * coth;
    let rates = RateSet {
        gamma_plus: b_local * (1.0 + m0) / 2.0,
        gamma_minus: b_local * (1.0 - m0) / 2.0,
        a_local,
        b_local,
        a_cross: f_ab * a_local,
        b_cross: f_ab * b_local,
        f_ab,
        m0,
    };
    rates.check_invariants(1e-12)?;
    Ok(rates)
}

/// Rate set fixed by the two jump rates and the cross factor directly.
pub fn rates_from_gammas(gamma_plus: f64, gamma_minus: f64, f_ab: f64) -> Result<RateSet> {
    if !(gamma_minus.is_finite() && gamma_minus >= 0.0) {
        return Err(invalid("gamma_minus", format!("must be finite and >= 0, got {gamma_minus}")));
    }
    if !(gamma_plus.is_finite() && gamma_plus > gamma_minus) {
        return Err(invalid(
            "gamma_plus",
            format!("must exceed gamma_minus ({gamma_minus}), got {gamma_plus}; equal rates mean infinite temperature"),
        ));
    }
    check_f(f_ab)?;
    let b_local = gamma_plus + gamma_minus;
    let m0 = (gamma_plus - gamma_minus) / b_local;
    let a_local = b_local / m0;
    let rates = RateSet {
        gamma_plus,
        gamma_minus,
        a_local,
        b_local,
        a_cross: f_ab * a_local,
        b_cross: f_ab * b_local,
        f_ab,
        m0,
    };
    rates.check_invariants(1e-12)?;
    Ok(rates)
}

/// Unruh temperature in kelvin for a proper acceleration in m/s^2.
pub fn unruh_temperature(alpha_si: f64) -> Result<f64> {
    if !(alpha_si.is_finite() && alpha_si > 0.0) {
        return Err(invalid("alpha", format!("must be finite and > 0, got {alpha_si}")));
    }
    Ok(HBAR * alpha_si / (2.0 * std::f64::consts::PI * SPEED_OF_LIGHT * BOLTZMANN))
}

/// Time to reach the prethermal state and time to thermalize.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PrethermalTimescales {
    pub t_pre: f64,
    pub t_th: f64,
}

impl PrethermalTimescales {
    pub fn new(total_rate: f64, f_ab: f64) -> Result<Self> {
        if !(total_rate > 0.0) {
            return Err(invalid("total_rate", "must be > 0"));
        }
        if !(-1.0..1.0).contains(&f_ab) {
            return Err(invalid("f_ab", format!("must lie in [-1, 1), got {f_ab}")));
        }
        Ok(Self {
            t_pre: 1.0 / total_rate,
            t_th: 1.0 / (total_rate * (1.0 - f_ab)),
        })
    }

    pub fn fraction(&self) -> f64 {
        (self.t_th - self.t_pre) / self.t_th
    }
}

/// `(T_th - T_pre) / T_th`, computed from the two timescales and checked
/// against `f_ab` to 1e-12.
pub fn fractional_prethermal_lifetime(f_ab: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&f_ab) {
        return Err(invalid("f_ab", format!("must lie in [0, 1), got {f_ab}")));
    }
    let frac = PrethermalTimescales::new(1.0, f_ab)?.fraction();
    if (frac - f_ab).abs() > 1e-12 {
        return Err(Error::Invariant(format!(
            "fractional lifetime {frac} differs from f_ab {f_ab}"
        )));
    }
    Ok(frac)
}

/// Where the rates of a run come from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(untagged)]
pub enum RateSpec {
    Physical(PhysicalConfig),
    Direct {
        gamma_plus: f64,
        gamma_minus: f64,
        f_ab: f64,
        n_atoms: usize,
    },
}

const PHYSICAL_KEYS: [&str; 4] = ["omega0", "alpha", "L", "lambda"];
const DIRECT_KEYS: [&str; 3] = ["gamma_plus", "gamma_minus", "f_ab"];

impl RateSpec {
    pub fn n_atoms(&self) -> usize {
        match self {
            RateSpec::Physical(c) => c.n_atoms,
            RateSpec::Direct { n_atoms, .. } => *n_atoms,
        }
    }

    pub fn rates(&self) -> Result<RateSet> {
        match self {
            RateSpec::Physical(c) => compute_rates(c),
            RateSpec::Direct {
                gamma_plus,
                gamma_minus,
                f_ab,
                ..
            } => rates_from_gammas(*gamma_plus, *gamma_minus, *f_ab),
        }
    }

    /// Parse the JSON object form. Exactly one of the physical key set
    /// `{omega0, alpha, L, lambda}` and the direct key set
    /// `{gamma_plus, gamma_minus, f_ab}` must be present, plus `n_atoms`.
    pub fn from_json(value: &Value) -> Result<Self> {
        let obj = value
            .as_object()
            .ok_or_else(|| invalid("rates", "expected a JSON object"))?;
        let has_physical = PHYSICAL_KEYS.iter().any(|k| obj.contains_key(*k));
        let has_direct = DIRECT_KEYS.iter().any(|k| obj.contains_key(*k));
        let spec = match (has_physical, has_direct) {
            (true, true) => {
                return Err(invalid("rates", "physical and direct-rate keys are mutually exclusive"))
            }
            (false, false) => {
                return Err(invalid(
                    "rates",
                    "expected {omega0, alpha, L, lambda, n_atoms[, unit_mode]} or {gamma_plus, gamma_minus, f_ab, n_atoms}",
                ))
            }
            (true, false) => {
                for k in PHYSICAL_KEYS.iter().chain(["n_atoms"].iter()) {
                    if !obj.contains_key(*k) {
                        return Err(invalid("rates", format!("missing key `{k}`")));
                    }
                }
                let config: PhysicalConfig = serde_json::from_value(value.clone())?;
                config.validate()?;
                RateSpec::Physical(config)
            }
            (false, true) => {
                let get = |k: &'static str| {
                    obj.get(k)
                        .and_then(Value::as_f64)
                        .ok_or_else(|| invalid("rates", format!("missing numeric key `{k}`")))
                };
                let n_atoms = obj
                    .get("n_atoms")
                    .and_then(Value::as_u64)
                    .ok_or_else(|| invalid("rates", "missing integer key `n_atoms`"))?;
                RateSpec::Direct {
                    gamma_plus: get("gamma_plus")?,
                    gamma_minus: get("gamma_minus")?,
                    f_ab: get("f_ab")?,
                    n_atoms: n_atoms as usize,
                }
            }
        };
        if spec.n_atoms() == 0 {
            return Err(invalid("n_atoms", "must be >= 1"));
        }
        spec.rates()?;
        Ok(spec)
    }
}

impl<'de> Deserialize<'de> for RateSpec {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let value = Value::deserialize(deserializer)?;
        RateSpec::from_json(&value).map_err(serde::de::Error::custom)
    }
}
