//! Tail probabilities behind each explicit bound.
//!
//! Kinds come in pairs where the sharp form is a Bennett tail: the plain kind
//! evaluates `exp(-v h(t))` and the `*SubGamma` kind the relaxation obtained
//! from `h(-x) >= x^2/2` (left tails) or `h(x) >= x^2 / (2 (1 + x/3))` (right
//! tails). The explicit bounds invert the sub-gamma forms.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::bennett_h;
use crate::error::{Error, Result};

/// Which tail inequality to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TailKind {
    /// `P(ERA - MCERA >= eps) <= exp(-n m eps^2 / (2 z^2))`
    EraBd,
    /// `P(Z - E[Z] >= eps) <= exp(-2 m eps^2 / c^2)`
    SdBd,
    /// `P(RC - ERA >= eps) <= exp(-(m RC / c) h(-eps / RC))`, `eps <= RC`
    RcSelfBounding,
    /// `exp(-m eps^2 / (2 c RC))`
    RcSelfBoundingSubGamma,
    /// `P(ERA - MCERA >= eps) <= exp(-n m eps^2 / (4 z_hat (ERA + nu_hat)))`
    EraSbNu,
    /// `P(ERA - MCERA >= eps) <= exp(-n m eps^2 / (4 (z_hat ERA + wvar_hat)))`
    EraSbWvar,
    /// `P(wvar - wvar_hat >= eps) <= exp(-(m wvar / z^2) h(-eps / wvar))`
    WvarSelfBounding,
    /// `exp(-m eps^2 / (2 z^2 wvar))`
    WvarSubGamma,
    /// `P(eta - eta_hat >= eps) <= exp(-(m eta / c) h(-eps / eta))`
    EtaSelfBounding,
    /// `exp(-m eps^2 / (2 c eta))`
    EtaSubGamma,
    /// Same as [`TailKind::EtaSelfBounding`] with `gamma`.
    GammaSelfBounding,
    /// `exp(-m eps^2 / (2 c gamma))`
    GammaSubGamma,
    /// `P(Z - E[Z] >= eps) <= exp(-(m v / c^2) h(c eps / v))`, `v = tau + 2 c E[Z]`
    SdBousquet,
    /// `exp(-m eps^2 / (2 (v + c eps / 3)))`
    SdBousquetSubGamma,
    /// `P(Z - E[Z] >= eps) <= exp(-(m w / c) h(eps / w))`, `w = E[Z] + eta`
    SdSbPos,
    /// `exp(-m eps^2 / (2 c (E[Z] + eta + eps / 3)))`
    SdSbPosSubGamma,
    /// Negative side of [`TailKind::SdSbPos`], with `gamma` in place of `eta`.
    SdSbNeg,
    /// `exp(-m eps^2 / (2 c (E[Z] + gamma + eps / 3)))`
    SdSbNegSubGamma,
}

impl TailKind {
    pub const ALL: [TailKind; 18] = [
        TailKind::EraBd,
        TailKind::SdBd,
        TailKind::RcSelfBounding,
        TailKind::RcSelfBoundingSubGamma,
        TailKind::EraSbNu,
        TailKind::EraSbWvar,
        TailKind::WvarSelfBounding,
        TailKind::WvarSubGamma,
        TailKind::EtaSelfBounding,
        TailKind::EtaSubGamma,
        TailKind::GammaSelfBounding,
        TailKind::GammaSubGamma,
        TailKind::SdBousquet,
        TailKind::SdBousquetSubGamma,
        TailKind::SdSbPos,
        TailKind::SdSbPosSubGamma,
        TailKind::SdSbNeg,
        TailKind::SdSbNegSubGamma,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TailKind::EraBd => "era-bd",
            TailKind::SdBd => "sd-bd",
            TailKind::RcSelfBounding => "rc-self-bounding",
            TailKind::RcSelfBoundingSubGamma => "rc-self-bounding-sub-gamma",
            TailKind::EraSbNu => "era-sb-nu",
            TailKind::EraSbWvar => "era-sb-wvar",
            TailKind::WvarSelfBounding => "wvar-self-bounding",
            TailKind::WvarSubGamma => "wvar-sub-gamma",
            TailKind::EtaSelfBounding => "eta-self-bounding",
            TailKind::EtaSubGamma => "eta-sub-gamma",
            TailKind::GammaSelfBounding => "gamma-self-bounding",
            TailKind::GammaSubGamma => "gamma-sub-gamma",
            TailKind::SdBousquet => "sd-bousquet",
            TailKind::SdBousquetSubGamma => "sd-bousquet-sub-gamma",
            TailKind::SdSbPos => "sd-sb-pos",
            TailKind::SdSbPosSubGamma => "sd-sb-pos-sub-gamma",
            TailKind::SdSbNeg => "sd-sb-neg",
            TailKind::SdSbNegSubGamma => "sd-sb-neg-sub-gamma",
        }
    }

    /// The sub-gamma relaxation of a Bennett kind.
    pub fn relaxation(self) -> Option<TailKind> {
        match self {
            TailKind::RcSelfBounding => Some(TailKind::RcSelfBoundingSubGamma),
            TailKind::WvarSelfBounding => Some(TailKind::WvarSubGamma),
            TailKind::EtaSelfBounding => Some(TailKind::EtaSubGamma),
            TailKind::GammaSelfBounding => Some(TailKind::GammaSubGamma),
            TailKind::SdBousquet => Some(TailKind::SdBousquetSubGamma),
            TailKind::SdSbPos => Some(TailKind::SdSbPosSubGamma),
            TailKind::SdSbNeg => Some(TailKind::SdSbNegSubGamma),
            _ => None,
        }
    }
}

impl fmt::Display for TailKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TailKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let wanted = s.trim().to_ascii_lowercase().replace('_', "-");
        TailKind::ALL
            .into_iter()
            .find(|k| k.name() == wanted)
            .ok_or_else(|| Error::invalid(format!("unknown tail kind `{s}`")))
    }
}

/// Parameters a tail formula may name. Only the ones the chosen kind uses
/// need to be set.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct TailParams {
    pub z: Option<f64>,
    pub z_hat: Option<f64>,
    pub c: Option<f64>,
    pub n: Option<usize>,
    pub m: Option<usize>,
    /// The ERA (or an upper bound on it).
    pub era: Option<f64>,
    /// The Rademacher complexity.
    pub rc: Option<f64>,
    pub nu_hat: Option<f64>,
    pub wvar_hat: Option<f64>,
    /// The wimpy variance `sup_f E[f^2]`.
    pub wvar: Option<f64>,
    pub eta: Option<f64>,
    pub gamma: Option<f64>,
    /// Expected supremum deviation `E[Z]`.
    pub ez: Option<f64>,
    pub tau: Option<f64>,
}

impl TailParams {
    fn real(value: Option<f64>, name: &str, kind: TailKind) -> Result<f64> {
        let v = value.ok_or_else(|| Error::invalid(format!("tail kind {kind} needs parameter `{name}`")))?;
        if v >= 0.0 && v.is_finite() {
            Ok(v)
        } else {
            Err(Error::invalid(format!("parameter `{name}` must be finite and nonnegative, got {v}")))
        }
    }

    fn count(value: Option<usize>, name: &str, kind: TailKind) -> Result<f64> {
        match value {
            Some(v) if v >= 1 => Ok(v as f64),
            Some(_) => Err(Error::invalid(format!("parameter `{name}` must be at least 1"))),
            None => Err(Error::invalid(format!("tail kind {kind} needs parameter `{name}`"))),
        }
    }
}

/// `exp(-num / den)`, with a vanishing denominator meaning no mass beyond 0.
fn gaussian_like(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        0.0
    } else {
        (-num / den).exp()
    }
}

fn left_tail_limit(kind: TailKind, eps: f64, name: &str, limit: f64) -> Result<()> {
    if eps > limit {
        Err(Error::Validity(format!(
            "{kind}: epsilon = {eps} exceeds {name} = {limit}; the left tail is only stated for epsilon <= {name}"
        )))
    } else {
        Ok(())
    }
}

/// Bennett left tail `exp(-scale * h(-eps / center))` for `eps <= center`.
fn bennett_left(kind: TailKind, eps: f64, center: f64, scale: f64, name: &str) -> Result<f64> {
    left_tail_limit(kind, eps, name, center)?;
    if eps == 0.0 {
        return Ok(1.0);
    }
    Ok((-scale * bennett_h(-eps / center)?).exp())
}

/// Evaluates the right-hand side of the tail inequality `kind` at `epsilon`,
/// clamped to `[0, 1]`.
pub fn tail_probability(kind: TailKind, epsilon: f64, p: &TailParams) -> Result<f64> {
    if !(epsilon >= 0.0) || !epsilon.is_finite() {
        return Err(Error::invalid(format!("epsilon must be finite and nonnegative, got {epsilon}")));
    }
    if epsilon == 0.0 {
        // still validate the parameters so a malformed call fails loudly
        tail_probability_positive(kind, 0.0, p)?;
        return Ok(1.0);
    }
    Ok(tail_probability_positive(kind, epsilon, p)?.clamp(0.0, 1.0))
}

fn tail_probability_positive(kind: TailKind, eps: f64, p: &TailParams) -> Result<f64> {
    let real = |v: Option<f64>, name: &str| TailParams::real(v, name, kind);
    let count = |v: Option<usize>, name: &str| TailParams::count(v, name, kind);
    let eps2 = eps * eps;
    let value = match kind {
        TailKind::EraBd => {
            let (z, n, m) = (real(p.z, "z")?, count(p.n, "n")?, count(p.m, "m")?);
            gaussian_like(n * m * eps2, 2.0 * z * z)
        }
        TailKind::SdBd => {
            let (c, m) = (real(p.c, "c")?, count(p.m, "m")?);
            gaussian_like(2.0 * m * eps2, c * c)
        }
        TailKind::RcSelfBounding => {
            let (c, m, rc) = (real(p.c, "c")?, count(p.m, "m")?, real(p.rc, "rc")?);
            bennett_left(kind, eps, rc, m * rc / c, "rc")?
        }
        TailKind::RcSelfBoundingSubGamma => {
            let (c, m, rc) = (real(p.c, "c")?, count(p.m, "m")?, real(p.rc, "rc")?);
            left_tail_limit(kind, eps, "rc", rc)?;
            gaussian_like(m * eps2, 2.0 * c * rc)
        }
        TailKind::EraSbNu => {
            let (z_hat, nu_hat, era) = (real(p.z_hat, "z_hat")?, real(p.nu_hat, "nu_hat")?, real(p.era, "era")?);
            let (n, m) = (count(p.n, "n")?, count(p.m, "m")?);
            left_tail_limit(kind, eps, "era", era)?;
            gaussian_like(n * m * eps2, 4.0 * z_hat * (era + nu_hat))
        }
        TailKind::EraSbWvar => {
            let (z_hat, wvar_hat, era) = (real(p.z_hat, "z_hat")?, real(p.wvar_hat, "wvar_hat")?, real(p.era, "era")?);
            let (n, m) = (count(p.n, "n")?, count(p.m, "m")?);
            left_tail_limit(kind, eps, "era", era)?;
            gaussian_like(n * m * eps2, 4.0 * (z_hat * era + wvar_hat))
        }
        TailKind::WvarSelfBounding => {
            let (z, m, wvar) = (real(p.z, "z")?, count(p.m, "m")?, real(p.wvar, "wvar")?);
            bennett_left(kind, eps, wvar, m * wvar / (z * z), "wvar")?
        }
        TailKind::WvarSubGamma => {
            let (z, m, wvar) = (real(p.z, "z")?, count(p.m, "m")?, real(p.wvar, "wvar")?);
            left_tail_limit(kind, eps, "wvar", wvar)?;
            gaussian_like(m * eps2, 2.0 * z * z * wvar)
        }
        TailKind::EtaSelfBounding | TailKind::GammaSelfBounding => {
            let (gap, name) = mean_gap(kind, p)?;
            let (c, m) = (real(p.c, "c")?, count(p.m, "m")?);
            bennett_left(kind, eps, gap, m * gap / c, name)?
        }
        TailKind::EtaSubGamma | TailKind::GammaSubGamma => {
            let (gap, name) = mean_gap(kind, p)?;
            let (c, m) = (real(p.c, "c")?, count(p.m, "m")?);
            left_tail_limit(kind, eps, name, gap)?;
            gaussian_like(m * eps2, 2.0 * c * gap)
        }
        TailKind::SdBousquet | TailKind::SdBousquetSubGamma => {
            let (c, m, ez, tau) = (real(p.c, "c")?, count(p.m, "m")?, real(p.ez, "ez")?, real(p.tau, "tau")?);
            let v = tau + 2.0 * c * ez;
            if kind == TailKind::SdBousquet {
                if v == 0.0 {
                    0.0
                } else {
                    (-(m * v / (c * c)) * bennett_h(c * eps / v)?).exp()
                }
            } else {
                gaussian_like(m * eps2, 2.0 * (v + c * eps / 3.0))
            }
        }
        TailKind::SdSbPos | TailKind::SdSbPosSubGamma | TailKind::SdSbNeg | TailKind::SdSbNegSubGamma => {
            let (gap, _) = mean_gap(kind, p)?;
            let (c, m, ez) = (real(p.c, "c")?, count(p.m, "m")?, real(p.ez, "ez")?);
            let w = ez + gap;
            match kind {
                TailKind::SdSbPos | TailKind::SdSbNeg => {
                    if w == 0.0 {
                        0.0
                    } else {
                        (-(m * w / c) * bennett_h(eps / w)?).exp()
                    }
                }
                _ => gaussian_like(m * eps2, 2.0 * c * (w + eps / 3.0)),
            }
        }
    };
    Ok(value)
}

fn mean_gap(kind: TailKind, p: &TailParams) -> Result<(f64, &'static str)> {
    match kind {
        TailKind::EtaSelfBounding | TailKind::EtaSubGamma | TailKind::SdSbPos | TailKind::SdSbPosSubGamma => {
            Ok((TailParams::real(p.eta, "eta", kind)?, "eta"))
        }
        _ => Ok((TailParams::real(p.gamma, "gamma", kind)?, "gamma")),
    }
}
