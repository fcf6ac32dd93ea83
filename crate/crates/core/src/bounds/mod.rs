//! Closed-form probabilistic bounds on the ERA, the Rademacher complexity,
//! the wimpy variance, the expectation gaps and the supremum deviations.
//!
//! Every calculator takes the unknown quantity it needs (ERA, wimpy variance,
//! `E[Z]`, ...) as an explicit parameter, so upper bounds from other
//! calculators can be plugged in. [`chain`] composes them from raw data.
//!
//! Throughout, `L = ln(1/delta)`.

pub mod chain;
mod tail;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

pub use tail::{tail_probability, TailKind, TailParams};

/// A failure probability `delta` in the open interval `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Confidence(f64);

impl Confidence {
    pub fn new(delta: f64) -> Result<Self> {
        if delta > 0.0 && delta < 1.0 {
            Ok(Confidence(delta))
        } else {
            Err(Error::invalid(format!("delta must lie in (0, 1), got {delta}")))
        }
    }

    pub fn delta(self) -> f64 {
        self.0
    }

    /// `ln(1/delta)`
    pub fn log_inv(self) -> f64 {
        -self.0.ln()
    }

    /// Equal share of `delta` for one of `events` union-bounded events.
    pub fn split(self, events: usize) -> Confidence {
        Confidence(self.0 / events.max(1) as f64)
    }
}

impl Serialize for Confidence {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_f64(self.0)
    }
}

/// Which bound a [`BoundResult`] instantiates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Method {
    EraBd,
    EraSbNu,
    EraSbWvar,
    RcFromEra,
    RcN1Bd,
    RcN1Var,
    WvarUb,
    EtaUb,
    GammaUb,
    SdBd,
    SdBousquet,
    SdSbPos,
    SdSbNeg,
    TauBhatiaDavis,
}

impl Method {
    pub const ALL: [Method; 14] = [
        Method::EraBd,
        Method::EraSbNu,
        Method::EraSbWvar,
        Method::RcFromEra,
        Method::RcN1Bd,
        Method::RcN1Var,
        Method::WvarUb,
        Method::EtaUb,
        Method::GammaUb,
        Method::SdBd,
        Method::SdBousquet,
        Method::SdSbPos,
        Method::SdSbNeg,
        Method::TauBhatiaDavis,
    ];

    /// Kebab-case command-line name, e.g. `era-sb-nu`.
    pub fn cli_name(self) -> &'static str {
        match self {
            Method::EraBd => "era-bd",
            Method::EraSbNu => "era-sb-nu",
            Method::EraSbWvar => "era-sb-wvar",
            Method::RcFromEra => "rc-from-era",
            Method::RcN1Bd => "rc-n1-bd",
            Method::RcN1Var => "rc-n1-var",
            Method::WvarUb => "wvar-ub",
            Method::EtaUb => "eta-ub",
            Method::GammaUb => "gamma-ub",
            Method::SdBd => "sd-bd",
            Method::SdBousquet => "sd-bousquet",
            Method::SdSbPos => "sd-sb-pos",
            Method::SdSbNeg => "sd-sb-neg",
            Method::TauBhatiaDavis => "tau-bhatia-davis",
        }
    }

    /// Upper-case tag used in JSON output, e.g. `ERA_SB_NU`.
    pub fn tag(self) -> String {
        self.cli_name().replace('-', "_").to_uppercase()
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.tag())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let wanted = s.trim().to_ascii_lowercase().replace('_', "-");
        Method::ALL
            .into_iter()
            .find(|m| m.cli_name() == wanted)
            .ok_or_else(|| Error::invalid(format!("unknown bound method `{s}`")))
    }
}

/// A computed bound with the parameters that produced it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundResult {
    pub method: Method,
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<Confidence>,
    pub inputs: BTreeMap<String, f64>,
}

impl BoundResult {
    fn new(method: Method, value: f64, delta: Option<Confidence>, inputs: &[(&str, f64)]) -> Self {
        debug_assert!(value.is_finite() && value >= 0.0, "{method}: {value}");
        BoundResult {
            method,
            value,
            delta,
            inputs: inputs.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        }
    }

    /// Caps the value at `cap`, recording the cap. Sound for ERA bounds with
    /// `cap = nu_hat`, since the ERA never exceeds `nu_hat`.
    pub fn clamped(mut self, cap: f64) -> Self {
        self.inputs.insert("clamp".to_string(), cap);
        self.value = self.value.min(cap);
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("bound results always serialize")
    }
}

/// Which supremum deviation a self-bounding SD bound controls.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// `sup_f (mean_S f - E f)`, controlled through `eta_F`.
    Pos,
    /// `sup_f (E f - mean_S f)`, controlled through `gamma_F`.
    Neg,
}

impl FromStr for Side {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "pos" | "+" | "positive" => Ok(Side::Pos),
            "neg" | "-" | "negative" => Ok(Side::Neg),
            _ => Err(Error::invalid(format!("unknown side `{s}`, expected pos or neg"))),
        }
    }
}

/// Inputs shared by the supremum-deviation bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupDeviationInputs {
    /// Upper bound on `E[Z]`, typically twice an RC upper bound.
    pub ez_upper: f64,
    /// Variance proxy `tau >= sup_f Var(f)`, needed by the Bousquet bound.
    pub tau: Option<f64>,
    /// `eta_F` (positive side) or `gamma_F` (negative side) upper bound,
    /// needed by the self-bounding bounds.
    pub mean_gap: Option<f64>,
    pub c: f64,
    pub m: usize,
}

impl SupDeviationInputs {
    pub fn new(ez_upper: f64, c: f64, m: usize) -> Self {
        SupDeviationInputs { ez_upper, tau: None, mean_gap: None, c, m }
    }

    pub fn with_tau(mut self, tau: f64) -> Self {
        self.tau = Some(tau);
        self
    }

    pub fn with_mean_gap(mut self, gap: f64) -> Self {
        self.mean_gap = Some(gap);
        self
    }

    fn validate(&self) -> Result<()> {
        nonneg("ez_upper", self.ez_upper)?;
        positive("c", self.c)?;
        count("m", self.m)?;
        if let Some(tau) = self.tau {
            nonneg("tau", tau)?;
            let cap = self.c * self.c / 4.0;
            if tau > cap {
                return Err(Error::invalid(format!(
                    "tau = {tau} exceeds the largest possible variance c^2/4 = {cap}"
                )));
            }
        }
        if let Some(gap) = self.mean_gap {
            nonneg("eta/gamma", gap)?;
        }
        Ok(())
    }
}

fn nonneg(name: &str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} must be a finite nonnegative number, got {v}")))
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} must be a finite positive number, got {v}")))
    }
}

fn count(name: &str, v: usize) -> Result<()> {
    if v >= 1 {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} must be at least 1")))
    }
}

/// Bennett's function `h(x) = (1+x) ln(1+x) - x` on `x >= -1`, with
/// `h(-1) = 1` by continuity.
pub fn bennett_h(x: f64) -> Result<f64> {
    if x.is_nan() || x < -1.0 {
        return Err(Error::Domain(format!("bennett_h is defined on x >= -1, got {x}")));
    }
    if x == -1.0 {
        return Ok(1.0);
    }
    Ok((1.0 + x) * x.ln_1p() - x)
}

/// The largest fixed point of `r(x) = u + sqrt(v + y x)`:
/// `u + y/2 + sqrt(y^2/4 + u y + v)`.
pub fn fixed_point(u: f64, v: f64, y: f64) -> Result<f64> {
    for (name, value) in [("u", u), ("v", v), ("y", y)] {
        if !(value >= 0.0 && value.is_finite()) {
            return Err(Error::Domain(format!("fixed_point needs {name} >= 0, got {value}")));
        }
    }
    Ok(u + y / 2.0 + (y * y / 4.0 + u * y + v).sqrt())
}

/// Deviation `epsilon = z sqrt(2 L / (n m))` such that
/// `ERA <= MCERA + epsilon` with probability at least `1 - delta`
/// (bounded differences).
pub fn era_bound_bd(z: f64, n: usize, m: usize, delta: Confidence) -> Result<BoundResult> {
    nonneg("z", z)?;
    count("n", n)?;
    count("m", m)?;
    let nm = n as f64 * m as f64;
    let eps = z * (2.0 * delta.log_inv() / nm).sqrt();
    Ok(BoundResult::new(
        Method::EraBd,
        eps,
        Some(delta),
        &[("z", z), ("n", n as f64), ("m", m as f64)],
    ))
}

fn era_sb_inputs(mcera: f64, z_hat: f64, n: usize, m: usize) -> Result<()> {
    nonneg("mcera", mcera)?;
    nonneg("z_hat", z_hat)?;
    count("n", n)?;
    count("m", m)
}

/// Upper bound on the ERA from the MCERA through the self-bounding property
/// with `beta = n m nu_hat`:
/// `MCERA + t + sqrt(t^2 + 4 z_hat (MCERA + nu_hat) L / (n m))`, `t = 2 z_hat L / (n m)`.
pub fn era_bound_sb_nu(
    mcera: f64,
    z_hat: f64,
    nu_hat: f64,
    n: usize,
    m: usize,
    delta: Confidence,
) -> Result<BoundResult> {
    era_sb_inputs(mcera, z_hat, n, m)?;
    nonneg("nu_hat", nu_hat)?;
    if !(mcera <= nu_hat && nu_hat <= z_hat) {
        return Err(Error::invalid(format!(
            "expected 0 <= mcera <= nu_hat <= z_hat, got mcera = {mcera}, nu_hat = {nu_hat}, z_hat = {z_hat}"
        )));
    }
    let value = if z_hat == 0.0 {
        mcera
    } else {
        let rate = delta.log_inv() / (n as f64 * m as f64);
        let t = 2.0 * z_hat * rate;
        mcera + t + (t * t + 4.0 * z_hat * (mcera + nu_hat) * rate).sqrt()
    };
    Ok(BoundResult::new(
        Method::EraSbNu,
        value,
        Some(delta),
        &[("mcera", mcera), ("z_hat", z_hat), ("nu_hat", nu_hat), ("n", n as f64), ("m", m as f64)],
    ))
}

/// Upper bound on the ERA from the MCERA through the weak self-bounding
/// property: `MCERA + t + sqrt(t^2 + 4 (z_hat MCERA + wvar_hat) L / (n m))`.
pub fn era_bound_sb_wvar(
    mcera: f64,
    z_hat: f64,
    wvar_hat: f64,
    n: usize,
    m: usize,
    delta: Confidence,
) -> Result<BoundResult> {
    era_sb_inputs(mcera, z_hat, n, m)?;
    nonneg("wvar_hat", wvar_hat)?;
    if wvar_hat > z_hat * z_hat {
        return Err(Error::invalid(format!(
            "wvar_hat = {wvar_hat} exceeds z_hat^2 = {}",
            z_hat * z_hat
        )));
    }
    let value = if z_hat == 0.0 {
        mcera
    } else {
        let rate = delta.log_inv() / (n as f64 * m as f64);
        let t = 2.0 * z_hat * rate;
        mcera + t + (t * t + 4.0 * (z_hat * mcera + wvar_hat) * rate).sqrt()
    };
    Ok(BoundResult::new(
        Method::EraSbWvar,
        value,
        Some(delta),
        &[("mcera", mcera), ("z_hat", z_hat), ("wvar_hat", wvar_hat), ("n", n as f64), ("m", m as f64)],
    ))
}

/// `x + cL/m + sqrt((cL/m)^2 + 2 c L x / m)`: the explicit inversion shared by
/// every (1,0)-self-bounding left tail with scale `c`.
fn self_bounding_upper(x: f64, scale: f64, m: usize, delta: Confidence) -> f64 {
    let t = scale * delta.log_inv() / m as f64;
    x + t + (t * t + 2.0 * t * x).sqrt()
}

/// Upper bound on the Rademacher complexity from an ERA upper bound, via the
/// self-bounding property of the ERA. Increasing in `era_ub`.
pub fn rc_bound_from_era(era_ub: f64, c: f64, m: usize, delta: Confidence) -> Result<BoundResult> {
    nonneg("era_ub", era_ub)?;
    positive("c", c)?;
    count("m", m)?;
    Ok(BoundResult::new(
        Method::RcFromEra,
        self_bounding_upper(era_ub, c, m, delta),
        Some(delta),
        &[("era_ub", era_ub), ("c", c), ("m", m as f64)],
    ))
}

/// Direct RC bound from a single sign vector by bounded differences on the
/// joint (sign, sample) pairs: `MCERA^1 + z sqrt(2L/m)`.
pub fn rc_bound_n1_bd(mcera1: f64, z: f64, m: usize, delta: Confidence) -> Result<BoundResult> {
    nonneg("mcera1", mcera1)?;
    positive("z", z)?;
    count("m", m)?;
    let value = mcera1 + z * (2.0 * delta.log_inv() / m as f64).sqrt();
    Ok(BoundResult::new(
        Method::RcN1Bd,
        value,
        Some(delta),
        &[("mcera1", mcera1), ("z", z), ("m", m as f64)],
    ))
}

/// Variance-aware RC bound from a single sign vector (left tail of Bousquet's
/// inequality), made explicit with the fixed-point lemma:
/// `MCERA^1 + sqrt(9/8 (2zL/m)^2 + 2(2z MCERA^1 + wvar) L/m) + 17 z L/(8m)`.
pub fn rc_bound_n1_var(mcera1: f64, z: f64, wvar_ub: f64, m: usize, delta: Confidence) -> Result<BoundResult> {
    nonneg("mcera1", mcera1)?;
    positive("z", z)?;
    nonneg("wvar_ub", wvar_ub)?;
    count("m", m)?;
    let rate = delta.log_inv() / m as f64;
    let lead = 2.0 * z * rate;
    let value = mcera1 + (9.0 / 8.0 * lead * lead + 2.0 * (2.0 * z * mcera1 + wvar_ub) * rate).sqrt()
        + 17.0 * z * rate / 8.0;
    Ok(BoundResult::new(
        Method::RcN1Var,
        value,
        Some(delta),
        &[("mcera1", mcera1), ("z", z), ("wvar_ub", wvar_ub), ("m", m as f64)],
    ))
}

/// Upper bound on the wimpy variance `sup_f E[f^2]` from its empirical
/// counterpart: `wvar_hat + z^2 L/m + sqrt((z^2 L/m)^2 + 2 z^2 wvar_hat L/m)`.
pub fn wvar_upper_bound(wvar_hat: f64, z: f64, m: usize, delta: Confidence) -> Result<BoundResult> {
    nonneg("wvar_hat", wvar_hat)?;
    positive("z", z)?;
    count("m", m)?;
    Ok(BoundResult::new(
        Method::WvarUb,
        self_bounding_upper(wvar_hat, z * z, m, delta),
        Some(delta),
        &[("wvar_hat", wvar_hat), ("z", z), ("m", m as f64)],
    ))
}

/// Upper bound on `eta_F = sup_f E[f] - a` from `eta_hat`.
pub fn eta_upper_bound(eta_hat: f64, c: f64, m: usize, delta: Confidence) -> Result<BoundResult> {
    nonneg("eta_hat", eta_hat)?;
    positive("c", c)?;
    count("m", m)?;
    Ok(BoundResult::new(
        Method::EtaUb,
        self_bounding_upper(eta_hat, c, m, delta),
        Some(delta),
        &[("eta_hat", eta_hat), ("c", c), ("m", m as f64)],
    ))
}

/// Upper bound on `gamma_F = b - inf_f E[f]` from `gamma_hat`; the eta bound
/// applied to the negated class.
pub fn gamma_upper_bound(gamma_hat: f64, c: f64, m: usize, delta: Confidence) -> Result<BoundResult> {
    nonneg("gamma_hat", gamma_hat)?;
    positive("c", c)?;
    count("m", m)?;
    Ok(BoundResult::new(
        Method::GammaUb,
        self_bounding_upper(gamma_hat, c, m, delta),
        Some(delta),
        &[("gamma_hat", gamma_hat), ("c", c), ("m", m as f64)],
    ))
}

/// Variance proxy from bounds on the expectation gaps. Every mean lies in
/// `[b - gamma, a + eta]`, and Bhatia-Davis gives `Var(f) <= (b - E f)(E f - a)`;
/// the supremum of that parabola over the admissible means is capped by
/// `gamma eta` and Popoviciu's `c^2/4`.
pub fn tau_upper_bhatia_davis(eta_ub: f64, gamma_ub: f64, c: f64) -> Result<BoundResult> {
    positive("c", c)?;
    nonneg("eta_ub", eta_ub)?;
    nonneg("gamma_ub", gamma_ub)?;
    if eta_ub > c || gamma_ub > c {
        return Err(Error::invalid(format!(
            "eta_ub = {eta_ub} and gamma_ub = {gamma_ub} must not exceed c = {c}"
        )));
    }
    // means shifted by -a lie in [c - gamma, eta]
    let (lo, hi) = (c - gamma_ub, eta_ub);
    if lo > hi {
        return Err(Error::invalid(format!(
            "eta_ub + gamma_ub = {} < c = {c}: no expectation is admissible",
            eta_ub + gamma_ub
        )));
    }
    let parabola = |x: f64| x * (c - x);
    let half = c / 2.0;
    let over_means = if lo <= half && half <= hi {
        c * c / 4.0
    } else {
        parabola(lo).max(parabola(hi))
    };
    let value = over_means.min(gamma_ub * eta_ub).min(c * c / 4.0);
    Ok(BoundResult::new(
        Method::TauBhatiaDavis,
        value,
        None,
        &[("eta_ub", eta_ub), ("gamma_ub", gamma_ub), ("c", c)],
    ))
}

/// Bounded-differences deviation `epsilon = c sqrt(L / (2m))` with
/// `Z <= E[Z] + epsilon` for either supremum deviation.
pub fn sd_bound_bd(c: f64, m: usize, delta: Confidence) -> Result<BoundResult> {
    positive("c", c)?;
    count("m", m)?;
    let value = c * (delta.log_inv() / (2.0 * m as f64)).sqrt();
    Ok(BoundResult::new(Method::SdBd, value, Some(delta), &[("c", c), ("m", m as f64)]))
}

/// Variance-dependent SD bound from Bousquet's inequality:
/// `E[Z] + sqrt(2L (tau + 2c E[Z]) / m) + cL/(3m)`.
pub fn sd_bound_bousquet(inp: &SupDeviationInputs, delta: Confidence) -> Result<BoundResult> {
    inp.validate()?;
    let tau = inp.tau.ok_or_else(|| Error::invalid("sd_bound_bousquet needs tau"))?;
    let l = delta.log_inv();
    let m = inp.m as f64;
    let value = inp.ez_upper + (2.0 * l * (tau + 2.0 * inp.c * inp.ez_upper) / m).sqrt() + inp.c * l / (3.0 * m);
    Ok(BoundResult::new(
        Method::SdBousquet,
        value,
        Some(delta),
        &[("ez_upper", inp.ez_upper), ("tau", tau), ("c", inp.c), ("m", m)],
    ))
}

/// Self-bounding SD bound:
/// `E[Z] + sqrt((cL/(3m))^2 + 2cL (E[Z] + x)/m) + cL/(3m)` with `x = eta_F`
/// for the positive side and `x = gamma_F` for the negative side.
pub fn sd_bound_sb(inp: &SupDeviationInputs, side: Side, delta: Confidence) -> Result<BoundResult> {
    inp.validate()?;
    let gap = inp
        .mean_gap
        .ok_or_else(|| Error::invalid("sd_bound_sb needs an eta (pos) or gamma (neg) bound"))?;
    let l = delta.log_inv();
    let m = inp.m as f64;
    let third = inp.c * l / (3.0 * m);
    let value = inp.ez_upper + (third * third + 2.0 * inp.c * l * (inp.ez_upper + gap) / m).sqrt() + third;
    let (method, gap_name) = match side {
        Side::Pos => (Method::SdSbPos, "eta"),
        Side::Neg => (Method::SdSbNeg, "gamma"),
    };
    Ok(BoundResult::new(
        method,
        value,
        Some(delta),
        &[("ez_upper", inp.ez_upper), (gap_name, gap), ("c", inp.c), ("m", m)],
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn d(x: f64) -> Confidence {
        Confidence::new(x).unwrap()
    }

    // Reference values below were computed with 50-digit arithmetic (mpmath).

    #[test]
    fn confidence_rejects_closed_ends() {
        for bad in [0.0, 1.0, -0.1, 1.5, f64::NAN] {
            assert!(Confidence::new(bad).is_err());
        }
        assert_eq!(d(0.05).split(2).delta(), 0.025);
    }

    #[test]
    fn bennett_h_values() {
        assert_eq!(bennett_h(0.0).unwrap(), 0.0);
        assert_eq!(bennett_h(-1.0).unwrap(), 1.0);
        assert_relative_eq!(bennett_h(1.0).unwrap(), 0.386_294_361_119_890_62, max_relative = 1e-15);
        assert!(matches!(bennett_h(-1.000_001), Err(Error::Domain(_))));
        // continuity at -1
        assert!((bennett_h(-1.0 + 1e-12).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn fixed_point_examples() {
        assert_eq!(fixed_point(0.0, 0.0, 0.0).unwrap(), 0.0);
        assert_eq!(fixed_point(0.0, 4.0, 0.0).unwrap(), 2.0);
        let x = fixed_point(1.0, 1.0, 1.0).unwrap();
        assert_eq!(x, 3.0);
        assert_eq!(1.0 + (1.0 + x).sqrt(), 3.0);
        assert!(fixed_point(-1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn era_bd_values() {
        let b = era_bound_bd(1.0, 1, 1_000_000, d(0.05)).unwrap();
        assert_relative_eq!(b.value, 2.447_746_830_680_816_5e-3, max_relative = 1e-14);
        let quarter = era_bound_bd(1.0, 4, 1_000_000, d(0.05)).unwrap();
        assert_relative_eq!(b.value / quarter.value, 2.0, max_relative = 1e-14);
        assert_eq!(era_bound_bd(0.0, 3, 10, d(0.05)).unwrap().value, 0.0);
    }

    #[test]
    fn era_sb_degenerate_and_preconditions() {
        assert_eq!(era_bound_sb_nu(0.0, 0.0, 0.0, 3, 10, d(0.05)).unwrap().value, 0.0);
        assert_eq!(era_bound_sb_wvar(0.0, 0.0, 0.0, 3, 10, d(0.05)).unwrap().value, 0.0);
        assert!(era_bound_sb_nu(0.2, 1.0, 0.1, 1, 10, d(0.05)).is_err());
        assert!(era_bound_sb_nu(0.0, 0.5, 0.6, 1, 10, d(0.05)).is_err());
        assert!(era_bound_sb_wvar(0.0, 0.5, 0.3, 1, 10, d(0.05)).is_err());
    }

    #[test]
    fn era_sb_wvar_value() {
        let b = era_bound_sb_wvar(3e-3, 1.0, 1e-2, 1, 1_000_000, d(0.05)).unwrap();
        assert_relative_eq!(b.value, 3.400_724_255_017_100_2e-3, max_relative = 1e-12);
    }

    #[test]
    fn rc_from_era_values() {
        let l = 20f64.ln();
        let zero = rc_bound_from_era(0.0, 1.0, 1_000_000, d(0.05)).unwrap();
        assert_relative_eq!(zero.value, 2.0 * l / 1e6, max_relative = 1e-14);
        let b = rc_bound_from_era(1e-3, 1.0, 1_000_000, d(0.05)).unwrap();
        assert_relative_eq!(b.value, 1.080_458_232_613_801_2e-3, max_relative = 1e-12);
    }

    #[test]
    fn rc_n1_values() {
        let b = rc_bound_n1_bd(0.0, 1.0, 1_000_000, d(0.05)).unwrap();
        assert_relative_eq!(b.value, 2.447_746_830_680_816_5e-3, max_relative = 1e-14);
        let half = rc_bound_n1_bd(0.0, 0.5, 1_000_000, d(0.05)).unwrap();
        assert_relative_eq!(half.value, b.value / 2.0, max_relative = 1e-15);
        let near_one = rc_bound_n1_bd(0.1, 1.0, 1000, d(1.0 - 1e-12)).unwrap();
        assert!(near_one.value - 0.1 < 1e-6);

        let v = rc_bound_n1_var(0.0, 1.0, 0.0, 1_000_000, d(0.05)).unwrap();
        assert_relative_eq!(v.value, 1.272_083_889_705_049_2e-5, max_relative = 1e-12);
    }

    #[test]
    fn wvar_eta_gamma_values() {
        let l = 20f64.ln();
        assert_relative_eq!(
            wvar_upper_bound(0.0, 1.0, 1000, d(0.05)).unwrap().value,
            2.0 * l / 1000.0,
            max_relative = 1e-14
        );
        let w = wvar_upper_bound(1e-2, 1.0, 1000, d(0.05)).unwrap();
        assert_relative_eq!(w.value, 2.129_567_548_576_290_2e-2, max_relative = 1e-12);
        assert!(w.value >= 1e-2);

        let e = eta_upper_bound(0.3, 1.0, 1000, d(0.05)).unwrap();
        assert_relative_eq!(e.value, 3.454_976_590_062_000e-1, max_relative = 1e-12);
        let g = gamma_upper_bound(0.3, 1.0, 1000, d(0.05)).unwrap();
        assert_eq!(e.value, g.value);
        assert_relative_eq!(
            eta_upper_bound(0.0, 1.0, 1000, d(0.05)).unwrap().value,
            2.0 * l / 1000.0,
            max_relative = 1e-14
        );
    }

    #[test]
    fn bhatia_davis_chain() {
        assert_eq!(tau_upper_bhatia_davis(0.5, 0.5, 1.0).unwrap().value, 0.25);
        assert_eq!(tau_upper_bhatia_davis(2.0, 0.0, 2.0).unwrap().value, 0.0);
        let t = tau_upper_bhatia_davis(0.3, 0.9, 1.0).unwrap();
        assert_relative_eq!(t.value, 0.21, max_relative = 1e-15);
        assert!(t.delta.is_none());
        // both gaps above c/2: a mean of c/2 is admissible
        assert_eq!(tau_upper_bhatia_davis(0.9, 0.9, 1.0).unwrap().value, 0.25);
        assert!(tau_upper_bhatia_davis(0.2, 0.3, 1.0).is_err());
        assert!(tau_upper_bhatia_davis(1.2, 0.3, 1.0).is_err());
    }

    #[test]
    fn sd_values() {
        let b = sd_bound_bd(1.0, 1_000_000, d(0.05)).unwrap();
        assert_relative_eq!(b.value, 1.223_873_415_340_408_3e-3, max_relative = 1e-14);
        assert_relative_eq!(sd_bound_bd(3.0, 1_000_000, d(0.05)).unwrap().value, 3.0 * b.value, max_relative = 1e-15);

        let l = 20f64.ln();
        let zero = SupDeviationInputs::new(0.0, 1.0, 1000).with_tau(0.0).with_mean_gap(0.0);
        assert_relative_eq!(
            sd_bound_bousquet(&zero, d(0.05)).unwrap().value,
            l / 3000.0,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            sd_bound_sb(&zero, Side::Pos, d(0.05)).unwrap().value,
            2.0 * l / 3000.0,
            max_relative = 1e-14
        );

        let vd = SupDeviationInputs::new(0.05, 1.0, 1000).with_tau(0.2475);
        assert_relative_eq!(
            sd_bound_bousquet(&vd, d(0.05)).unwrap().value,
            9.662_788_741_404_144e-2,
            max_relative = 1e-12
        );
        let sb = SupDeviationInputs::new(0.05, 1.0, 1000).with_mean_gap(0.45);
        let pos = sd_bound_sb(&sb, Side::Pos, d(0.05)).unwrap();
        assert_relative_eq!(pos.value, 1.057_409_689_545_447_8e-1, max_relative = 1e-12);
        let neg = sd_bound_sb(&sb, Side::Neg, d(0.05)).unwrap();
        assert_eq!(pos.value, neg.value);
        assert_eq!(neg.method, Method::SdSbNeg);

        let too_wide = SupDeviationInputs::new(0.05, 1.0, 1000).with_tau(0.3);
        assert!(sd_bound_bousquet(&too_wide, d(0.05)).is_err());
        assert!(sd_bound_bousquet(&sb, d(0.05)).is_err());
    }

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.cli_name().parse::<Method>().unwrap(), m);
            assert_eq!(m.tag().parse::<Method>().unwrap(), m);
        }
        assert!("era-xx".parse::<Method>().is_err());
        assert_eq!(Method::EraSbNu.tag(), "ERA_SB_NU");
    }

    #[test]
    fn json_shape() {
        let b = era_bound_bd(1.0, 1, 1000, d(0.05)).unwrap();
        let v: serde_json::Value = serde_json::from_str(&b.to_json()).unwrap();
        assert_eq!(v["method"], "ERA_BD");
        assert_eq!(v["delta"], 0.05);
        assert_eq!(v["inputs"]["m"], 1000.0);
        let t = tau_upper_bhatia_davis(0.3, 0.9, 1.0).unwrap();
        assert!(!t.to_json().contains("delta"));
    }
}
