//! Deterministic parameter sweeps comparing the bounds, written as CSV tables.
//!
//! Three sweeps are available:
//!
//! 1. ERA bounds against `nu_hat`: bounded differences (`bd`) against the
//!    self-bounding bound (`sb`).
//! 2. RC bounds against `wvar_hat`: bounded differences then self-bounding
//!    (`bd_sb`), self-bounding twice (`sb_sb`) and, for a single sign vector,
//!    the direct variance-aware bound with an estimated wimpy variance
//!    (`ew_db`). Each composite pipeline splits `delta` in two.
//! 3. Supremum-deviation bounds on a grid of `(E[Z], eta)` for a binary class
//!    (`tau = eta (1 - eta)`, `c = 1`): Bousquet (`vd`) against self-bounding
//!    (`sb`) and their ratio.
//!
//! Sweeps 1 and 2 simulate the MCERA as `min(sqrt(x ln C / m), x)` for sweep
//! value `x`, or set it to `x` in worst-case mode.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{
    era_bound_bd, era_bound_sb_nu, era_bound_sb_wvar, rc_bound_from_era, rc_bound_n1_var, sd_bound_bousquet,
    sd_bound_sb, wvar_upper_bound, Confidence, Side, SupDeviationInputs,
};
use crate::error::{Error, Result};

/// Ratio levels at which the third sweep is meant to be contoured.
pub const CONTOUR_LEVELS: [f64; 7] = [0.95, 0.98, 1.0, 1.02, 1.05, 1.1, 1.15];

/// `min(sqrt(x ln C / m), x)`: a Massart-style MCERA for a class of `C`
/// functions whose empirical mean is `x`.
pub fn simulated_mcera(x: f64, m: usize, massart_c: f64) -> f64 {
    (x * massart_c.ln() / m as f64).sqrt().min(x)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum McEraMode {
    Simulated,
    /// MCERA equal to the sweep value, its largest possible value.
    WorstCase,
}

impl McEraMode {
    fn name(self) -> &'static str {
        match self {
            McEraMode::Simulated => "simulated",
            McEraMode::WorstCase => "worst_case",
        }
    }
}

/// Parameters of one sweep panel. Deserializes from TOML.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub figure: u8,
    pub m: usize,
    pub n: usize,
    pub delta: f64,
    pub massart_c: f64,
    /// Points per axis, log-spaced.
    pub grid_points: usize,
    pub sweep_range: [f64; 2],
    pub mcera_mode: McEraMode,
}

impl SweepConfig {
    fn base(figure: u8, m: usize, n: usize, grid_points: usize, hi: f64) -> Self {
        SweepConfig {
            figure,
            m,
            n,
            delta: 0.05,
            massart_c: 1e6,
            grid_points,
            sweep_range: [1.0 / m as f64, hi],
            mcera_mode: McEraMode::Simulated,
        }
    }

    /// ERA bounds against `nu_hat` in `[1/m, 1]`, `m = 10^6`.
    pub fn figure1(n: usize) -> Self {
        Self::base(1, 1_000_000, n, 200, 1.0)
    }

    /// RC bounds against `wvar_hat` in `[1/m, 1]`, `m = 10^6`.
    pub fn figure2(n: usize) -> Self {
        Self::base(2, 1_000_000, n, 200, 1.0)
    }

    /// SD bounds on `[1/m, 1/2]^2`.
    pub fn figure3(m: usize) -> Self {
        Self::base(3, m, 1, 100, 0.5)
    }

    pub fn worst_case(mut self) -> Self {
        self.mcera_mode = McEraMode::WorstCase;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=3).contains(&self.figure) {
            return Err(Error::invalid(format!("figure must be 1, 2 or 3, got {}", self.figure)));
        }
        if self.m == 0 || self.n == 0 {
            return Err(Error::invalid("m and n must be at least 1"));
        }
        Confidence::new(self.delta)?;
        if !(self.massart_c > 1.0 && self.massart_c.is_finite()) {
            return Err(Error::invalid(format!("massart_c must exceed 1, got {}", self.massart_c)));
        }
        if self.grid_points < 2 {
            return Err(Error::invalid("grid_points must be at least 2"));
        }
        let [lo, hi] = self.sweep_range;
        let floor = 1.0 / self.m as f64;
        if !(lo >= floor * (1.0 - 1e-12)) {
            return Err(Error::invalid(format!("sweep range must start at or above 1/m = {floor}, got {lo}")));
        }
        let cap = if self.figure == 3 { 0.5 } else { 1.0 };
        if !(hi <= cap && lo <= hi) {
            return Err(Error::invalid(format!("sweep range [{lo}, {hi}] must be ordered and end at or below {cap}")));
        }
        Ok(())
    }

    fn mcera(&self, x: f64) -> f64 {
        match self.mcera_mode {
            McEraMode::Simulated => simulated_mcera(x, self.m, self.massart_c),
            McEraMode::WorstCase => x,
        }
    }
}

/// `points` log-spaced values from `lo` to `hi`, both included.
pub fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let ratio = (hi / lo).ln();
    (0..points)
        .map(|i| {
            if i + 1 == points {
                hi
            } else {
                lo * (ratio * i as f64 / (points - 1) as f64).exp()
            }
        })
        .collect()
}

/// Rows of a sweep, one per grid point, with the metadata that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub config: SweepConfig,
    pub metadata: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl SweepTable {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }

    /// `#key=value` metadata lines, a header row, then one line per grid
    /// point. Values use Rust's shortest round-trip scientific notation.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.metadata {
            let _ = writeln!(out, "#{k}={v}");
        }
        let _ = writeln!(out, "{}", self.columns.join(","));
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:e}")).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }
}

fn metadata(cfg: &SweepConfig, sweep_var: &str) -> Vec<(String, String)> {
    vec![
        ("figure".into(), cfg.figure.to_string()),
        ("m".into(), cfg.m.to_string()),
        ("n".into(), cfg.n.to_string()),
        ("delta".into(), format!("{}", cfg.delta)),
        ("massart_c".into(), format!("{:e}", cfg.massart_c)),
        ("grid_points".into(), cfg.grid_points.to_string()),
        ("sweep_range".into(), format!("{:e};{:e}", cfg.sweep_range[0], cfg.sweep_range[1])),
        ("mcera_mode".into(), cfg.mcera_mode.name().into()),
        ("sweep_var".into(), sweep_var.into()),
    ]
}

fn evaluate_rows<F>(grid: &[f64], row: F) -> Result<Vec<Vec<f64>>>
where
    F: Fn(f64) -> Result<Vec<f64>> + Sync,
{
    let rows: Vec<Result<Vec<f64>>> = grid.par_iter().map(|&x| row(x)).collect();
    rows.into_iter().collect()
}

/// ERA bounds as functions of `nu_hat`, with `z = z_hat = 1`.
pub fn sweep_figure1(cfg: &SweepConfig) -> Result<SweepTable> {
    cfg.validate()?;
    if cfg.figure != 1 {
        return Err(Error::invalid("sweep_figure1 needs figure = 1"));
    }
    let delta = Confidence::new(cfg.delta)?;
    let eps = era_bound_bd(1.0, cfg.n, cfg.m, delta)?.value;
    let grid = log_grid(cfg.sweep_range[0], cfg.sweep_range[1], cfg.grid_points);
    let rows = evaluate_rows(&grid, |nu| {
        let mc = cfg.mcera(nu);
        let sb = era_bound_sb_nu(mc, 1.0, nu, cfg.n, cfg.m, delta)?.value;
        Ok(vec![nu, mc, mc + eps, sb])
    })?;
    let mut meta = metadata(cfg, "nu_hat");
    meta.push(("z".into(), "1".into()));
    meta.push(("z_hat".into(), "1".into()));
    Ok(SweepTable {
        config: cfg.clone(),
        metadata: meta,
        columns: ["sweep_var", "mcera", "bd", "sb"].map(String::from).to_vec(),
        rows,
    })
}

/// RC bounds as functions of `wvar_hat`, with `z = z_hat = c = 1`.
pub fn sweep_figure2(cfg: &SweepConfig) -> Result<SweepTable> {
    cfg.validate()?;
    if cfg.figure != 2 {
        return Err(Error::invalid("sweep_figure2 needs figure = 2"));
    }
    let half = Confidence::new(cfg.delta)?.split(2);
    let (n, m) = (cfg.n, cfg.m);
    let eps = era_bound_bd(1.0, n, m, half)?.value;
    let grid = log_grid(cfg.sweep_range[0], cfg.sweep_range[1], cfg.grid_points);
    let rows = evaluate_rows(&grid, |wvar_hat| {
        let mc = cfg.mcera(wvar_hat);
        let bd_sb = rc_bound_from_era(mc + eps, 1.0, m, half)?.value;
        let era_sb = era_bound_sb_wvar(mc, 1.0, wvar_hat, n, m, half)?.value;
        let sb_sb = rc_bound_from_era(era_sb, 1.0, m, half)?.value;
        let mut row = vec![wvar_hat, mc, bd_sb, sb_sb];
        if n == 1 {
            let wvar_ub = wvar_upper_bound(wvar_hat, 1.0, m, half)?.value;
            row.push(rc_bound_n1_var(mc, 1.0, wvar_ub, m, half)?.value);
        }
        Ok(row)
    })?;
    let mut columns = ["sweep_var", "mcera", "bd_sb", "sb_sb"].map(String::from).to_vec();
    if n == 1 {
        columns.push("ew_db".into());
    }
    let mut meta = metadata(cfg, "wvar_hat");
    meta.push(("delta_split".into(), "2".into()));
    Ok(SweepTable { config: cfg.clone(), metadata: meta, columns, rows })
}

/// Bousquet against self-bounding SD bounds on a `(E[Z], eta)` grid for a
/// binary class.
pub fn sweep_figure3(cfg: &SweepConfig) -> Result<SweepTable> {
    cfg.validate()?;
    if cfg.figure != 3 {
        return Err(Error::invalid("sweep_figure3 needs figure = 3"));
    }
    let delta = Confidence::new(cfg.delta)?;
    let axis = log_grid(cfg.sweep_range[0], cfg.sweep_range[1], cfg.grid_points);
    let grid: Vec<(f64, f64)> = axis.iter().flat_map(|&ez| axis.iter().map(move |&eta| (ez, eta))).collect();
    let rows: Vec<Result<Vec<f64>>> = grid
        .par_iter()
        .map(|&(ez, eta)| {
            let inp = SupDeviationInputs::new(ez, 1.0, cfg.m).with_tau(eta * (1.0 - eta)).with_mean_gap(eta);
            let vd = sd_bound_bousquet(&inp, delta)?.value;
            let sb = sd_bound_sb(&inp, Side::Pos, delta)?.value;
            Ok(vec![ez, eta, vd, sb, vd / sb])
        })
        .collect();
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    let mut meta = metadata(cfg, "ez;eta");
    meta.push(("c".into(), "1".into()));
    meta.push(("tau".into(), "eta*(1-eta)".into()));
    let levels: Vec<String> = CONTOUR_LEVELS.iter().map(|l| l.to_string()).collect();
    meta.push(("contour_levels".into(), levels.join(";")));
    Ok(SweepTable {
        config: cfg.clone(),
        metadata: meta,
        columns: ["ez", "eta", "vd", "sb", "ratio"].map(String::from).to_vec(),
        rows,
    })
}

/// Dispatches on `cfg.figure`.
pub fn sweep(cfg: &SweepConfig) -> Result<SweepTable> {
    match cfg.figure {
        1 => sweep_figure1(cfg),
        2 => sweep_figure2(cfg),
        3 => sweep_figure3(cfg),
        other => Err(Error::invalid(format!("figure must be 1, 2 or 3, got {other}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn simulated_mcera_values() {
        let m = 1_000_000;
        assert_eq!(simulated_mcera(1.0 / m as f64, m, 1e6), 1e-6);
        assert_relative_eq!(simulated_mcera(1.0, m, 1e6), 3.716_922_188_849_838_4e-3, max_relative = 1e-12);
    }

    #[test]
    fn log_grid_endpoints() {
        let g = log_grid(1e-6, 1.0, 200);
        assert_eq!(g.len(), 200);
        assert_eq!(g[0], 1e-6);
        assert_eq!(g[199], 1.0);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn config_validation() {
        let mut c = SweepConfig::figure1(1);
        assert!(c.validate().is_ok());
        c.sweep_range = [1e-7, 1.0];
        assert!(c.validate().is_err());
        let mut c = SweepConfig::figure3(1000);
        c.sweep_range = [1e-3, 0.6];
        assert!(c.validate().is_err());
        let text = r#"
            figure = 2
            m = 1000
            n = 1
            delta = 0.05
            massart_c = 1e6
            grid_points = 10
            sweep_range = [1e-3, 1.0]
            mcera_mode = "worst_case"
        "#;
        let parsed: SweepConfig = toml::from_str(text).unwrap();
        assert_eq!(parsed.mcera_mode, McEraMode::WorstCase);
        assert!(parsed.validate().is_ok());
    }

    #[test]
    fn figure1_columns() {
        let t = sweep_figure1(&SweepConfig::figure1(1)).unwrap();
        assert_eq!(t.rows.len(), 200);
        let first = &t.rows[0];
        assert_relative_eq!(first[2] - first[1], 2.447_746_830_680_816_5e-3, max_relative = 1e-9);
        for r in &t.rows {
            assert!(r[2] >= r[1] && r[3] >= r[1]);
        }
        let sb = t.column("sb").unwrap();
        assert!(sb.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn figure2_single_vector_has_direct_column() {
        let t = sweep_figure2(&SweepConfig::figure2(1)).unwrap();
        assert_eq!(t.columns.last().unwrap(), "ew_db");
        let t10 = sweep_figure2(&SweepConfig::figure2(10)).unwrap();
        assert_eq!(t10.columns.len(), 4);
        for r in &t.rows {
            assert!(r[2..].iter().all(|v| *v >= r[1]));
        }
    }

    #[test]
    fn figure3_grid_and_metadata() {
        let mut cfg = SweepConfig::figure3(1000);
        cfg.grid_points = 10;
        let t = sweep_figure3(&cfg).unwrap();
        assert_eq!(t.rows.len(), 100);
        assert!(t.rows.iter().all(|r| r[4].is_finite() && r[4] > 0.0));
        let csv = t.to_csv();
        assert!(csv.contains("#contour_levels=0.95;0.98;1;1.02;1.05;1.1;1.15\n"));
        assert!(csv.contains("\nez,eta,vd,sb,ratio\n"));
    }

    #[test]
    fn csv_is_reproducible() {
        let cfg = SweepConfig { grid_points: 20, ..SweepConfig::figure1(10) };
        assert_eq!(sweep(&cfg).unwrap().to_csv(), sweep(&cfg).unwrap().to_csv());
    }
}
