//! Bounds computed straight from an evaluation matrix and a sign matrix.
//!
//! Each method is a chain of probabilistic events (estimate the ERA, lift it
//! to the RC, bound a variance proxy, ...). A chain of `k` events runs every
//! stage at `delta / k`, so the whole chain holds with probability at least
//! `1 - delta` by the union bound. The split is echoed in the inputs as
//! `delta_events` and `delta_each`.

use std::collections::BTreeMap;

use super::*;
use crate::class_eval::{class_stats, mcera, ClassStats, EvaluationMatrix, SignMatrix};

/// Options for [`bound_from_data`].
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ChainOptions {
    /// Cap every ERA estimate at `nu_hat`, which the ERA never exceeds.
    pub clamp_to_nu: bool,
}

struct Chain {
    delta: Confidence,
    each: Confidence,
    events: usize,
    stats: ClassStats,
    mcera: f64,
    n: usize,
    clamp_to_nu: bool,
    inputs: BTreeMap<String, f64>,
}

impl Chain {
    fn record(&mut self, name: &str, value: f64) {
        self.inputs.insert(name.to_string(), value);
    }

    fn era_ub(&mut self) -> Result<f64> {
        let s = self.stats;
        let mut era = era_bound_sb_wvar(self.mcera, s.z_hat, s.wvar_hat, self.n, s.m, self.each)?.value;
        if self.clamp_to_nu {
            era = era.min(s.nu_hat);
        }
        self.record("era_ub", era);
        Ok(era)
    }

    fn rc_ub(&mut self) -> Result<f64> {
        let era = self.era_ub()?;
        let rc = rc_bound_from_era(era, self.stats.c, self.stats.m, self.each)?.value;
        self.record("rc_ub", rc);
        Ok(rc)
    }

    /// `E[Z] <= 2 RC` by symmetrization.
    fn ez_ub(&mut self) -> Result<f64> {
        let ez = 2.0 * self.rc_ub()?;
        self.record("ez_ub", ez);
        Ok(ez)
    }

    fn eta_ub(&mut self) -> Result<f64> {
        let s = self.stats;
        let eta = eta_upper_bound(s.eta_hat, s.c, s.m, self.each)?.value.min(s.c);
        self.record("eta_ub", eta);
        Ok(eta)
    }

    fn gamma_ub(&mut self) -> Result<f64> {
        let s = self.stats;
        let gamma = gamma_upper_bound(s.gamma_hat, s.c, s.m, self.each)?.value.min(s.c);
        self.record("gamma_ub", gamma);
        Ok(gamma)
    }

    fn finish(mut self, method: Method, value: f64) -> BoundResult {
        self.record("delta_events", self.events as f64);
        self.record("delta_each", self.each.delta());
        BoundResult { method, value, delta: Some(self.delta), inputs: self.inputs }
    }
}

/// Number of probabilistic events chained by `method`.
pub fn chain_events(method: Method) -> usize {
    match method {
        Method::EraBd
        | Method::EraSbNu
        | Method::EraSbWvar
        | Method::RcN1Bd
        | Method::WvarUb
        | Method::EtaUb
        | Method::GammaUb => 1,
        Method::RcFromEra | Method::RcN1Var | Method::TauBhatiaDavis => 2,
        Method::SdBd => 3,
        Method::SdSbPos | Method::SdSbNeg => 4,
        Method::SdBousquet => 5,
    }
}

/// Computes `method` from the class values on a sample and a sign matrix,
/// using the empirical statistics of `evals` and its n-MCERA under `sigma`.
///
/// ERA methods bound the ERA of the sample, RC methods the Rademacher
/// complexity, WVAR/ETA/GAMMA the population quantities, TAU a variance proxy
/// and SD methods the supremum deviation of this sample.
pub fn bound_from_data(
    method: Method,
    evals: &EvaluationMatrix,
    sigma: &SignMatrix,
    delta: Confidence,
    opts: ChainOptions,
) -> Result<BoundResult> {
    let stats = class_stats(evals);
    let mc = mcera(evals, sigma)?;
    let n = sigma.n();
    let events = chain_events(method);
    let mut chain = Chain {
        delta,
        each: delta.split(events),
        events,
        stats,
        mcera: mc,
        n,
        clamp_to_nu: opts.clamp_to_nu,
        inputs: BTreeMap::new(),
    };
    chain.record("mcera", mc);
    chain.record("n", n as f64);
    chain.record("m", stats.m as f64);
    let each = chain.each;
    let (z, c, m) = (stats.z, stats.c, stats.m);

    let needs_single_row = matches!(method, Method::RcN1Bd | Method::RcN1Var);
    if needs_single_row && n != 1 {
        return Err(Error::invalid(format!(
            "{method} uses a single sign vector, got a sign matrix with n = {n}"
        )));
    }

    let clamp_era = |v: f64, chain: &mut Chain| {
        if chain.clamp_to_nu {
            chain.record("clamp", stats.nu_hat);
            v.min(stats.nu_hat)
        } else {
            v
        }
    };

    let value = match method {
        Method::EraBd => {
            let v = mc + era_bound_bd(z, n, m, each)?.value;
            chain.record("z", z);
            clamp_era(v, &mut chain)
        }
        Method::EraSbNu => {
            chain.record("z_hat", stats.z_hat);
            chain.record("nu_hat", stats.nu_hat);
            let v = era_bound_sb_nu(mc, stats.z_hat, stats.nu_hat, n, m, each)?.value;
            clamp_era(v, &mut chain)
        }
        Method::EraSbWvar => {
            chain.record("z_hat", stats.z_hat);
            chain.record("wvar_hat", stats.wvar_hat);
            let v = era_bound_sb_wvar(mc, stats.z_hat, stats.wvar_hat, n, m, each)?.value;
            clamp_era(v, &mut chain)
        }
        Method::RcFromEra => chain.rc_ub()?,
        Method::RcN1Bd => {
            chain.record("z", z);
            rc_bound_n1_bd(mc, z, m, each)?.value
        }
        Method::RcN1Var => {
            let wvar = wvar_upper_bound(stats.wvar_hat, z, m, each)?.value.min(z * z);
            chain.record("wvar_ub", wvar);
            chain.record("z", z);
            rc_bound_n1_var(mc, z, wvar, m, each)?.value
        }
        Method::WvarUb => {
            chain.record("wvar_hat", stats.wvar_hat);
            chain.record("z", z);
            wvar_upper_bound(stats.wvar_hat, z, m, each)?.value
        }
        Method::EtaUb => {
            chain.record("eta_hat", stats.eta_hat);
            eta_upper_bound(stats.eta_hat, c, m, each)?.value
        }
        Method::GammaUb => {
            chain.record("gamma_hat", stats.gamma_hat);
            gamma_upper_bound(stats.gamma_hat, c, m, each)?.value
        }
        Method::TauBhatiaDavis => {
            let (eta, gamma) = (chain.eta_ub()?, chain.gamma_ub()?);
            tau_upper_bhatia_davis(eta, gamma, c)?.value
        }
        Method::SdBd => {
            let ez = chain.ez_ub()?;
            ez + sd_bound_bd(c, m, each)?.value
        }
        Method::SdBousquet => {
            let ez = chain.ez_ub()?;
            let (eta, gamma) = (chain.eta_ub()?, chain.gamma_ub()?);
            let tau = tau_upper_bhatia_davis(eta, gamma, c)?.value;
            chain.record("tau", tau);
            sd_bound_bousquet(&SupDeviationInputs::new(ez, c, m).with_tau(tau), each)?.value
        }
        Method::SdSbPos => {
            let ez = chain.ez_ub()?;
            let eta = chain.eta_ub()?;
            sd_bound_sb(&SupDeviationInputs::new(ez, c, m).with_mean_gap(eta), Side::Pos, each)?.value
        }
        Method::SdSbNeg => {
            let ez = chain.ez_ub()?;
            let gamma = chain.gamma_ub()?;
            sd_bound_sb(&SupDeviationInputs::new(ez, c, m).with_mean_gap(gamma), Side::Neg, each)?.value
        }
    };
    Ok(chain.finish(method, value))
}
