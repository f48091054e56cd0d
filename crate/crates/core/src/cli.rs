//! Sweep and report front end shared by the `measinfo` binary and tests.

use std::fmt::Write as _;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::receivers::{BetaChoice, BinaryCoherentScenario, ReceiverResult, Scheme, SchemeParams, ThetaChoice};

/// Failure classes with distinct exit codes.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidArgument(m) => CliError::Usage(m),
            other => CliError::Numerical(other.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Mean-photon-number grid `start:stop:step`; points are start + i·step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Grid {
    pub fn points(&self) -> Vec<f64> {
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        (0..n).map(|i| self.start + self.step * i as f64).collect()
    }

    pub fn single(x: f64) -> Self {
        Self { start: x, stop: x, step: 1.0 }
    }

    fn validate(&self, allow_zero: bool) -> CliResult<()> {
        if !(self.start.is_finite() && self.stop.is_finite() && self.step.is_finite()) {
            return Err(CliError::Usage("grid values must be finite".into()));
        }
        if self.start < 0.0 || (self.start == 0.0 && !allow_zero) {
            return Err(CliError::Usage(format!(
                "grid start must be > 0, got {}; fractions are undefined at zero amplitude",
                self.start
            )));
        }
        if self.step <= 0.0 || self.stop < self.start {
            return Err(CliError::Usage(format!(
                "grid needs step > 0 and stop >= start, got {}:{}:{}",
                self.start, self.stop, self.step
            )));
        }
        Ok(())
    }
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("bad number '{t}' in grid '{s}'"));
        match parts.as_slice() {
            [x] => Ok(Grid::single(num(x)?)),
            [a, b, c] => Ok(Grid { start: num(a)?, stop: num(b)?, step: num(c)? }),
            _ => Err(format!("grid must be start:stop:step or a single value, got '{s}'")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Jsonl,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "jsonl" => Ok(OutputFormat::Jsonl),
            _ => Err(format!("format must be csv or jsonl, got '{s}'")),
        }
    }
}

/// One receiver configuration swept over the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub scheme: Scheme,
    pub stages: Option<usize>,
    pub beta: Option<BetaChoice>,
}

impl Curve {
    pub fn new(scheme: Scheme) -> Self {
        Self { scheme, stages: None, beta: None }
    }
}

/// Curve families of the four figure panels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    Fig1a,
    Fig1b,
    Fig1c,
    Fig1d,
}

impl Preset {
    pub const GRID: Grid = Grid { start: 0.02, stop: 4.0, step: 0.02 };

    pub fn curves(self) -> Vec<Curve> {
        let opt = |scheme| Curve { scheme, stages: None, beta: Some(BetaChoice::MinError) };
        let staged = |n| Curve { scheme: Scheme::AtomicUnambiguous, stages: Some(n), beta: None };
        match self {
            Preset::Fig1a => vec![Curve::new(Scheme::HomodyneHard), Curve::new(Scheme::HomodyneSoft)],
            Preset::Fig1b => vec![opt(Scheme::PnrdHard), opt(Scheme::PnrdSoft), Curve::new(Scheme::Kennedy)],
            Preset::Fig1c => vec![Curve::new(Scheme::AtomicOptimal)],
            Preset::Fig1d => vec![staged(1), staged(2)],
        }
    }
}

impl FromStr for Preset {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "fig1a" => Ok(Preset::Fig1a),
            "fig1b" => Ok(Preset::Fig1b),
            "fig1c" => Ok(Preset::Fig1c),
            "fig1d" => Ok(Preset::Fig1d),
            _ => Err(format!("preset must be one of fig1a, fig1b, fig1c, fig1d, got '{s}'")),
        }
    }
}

/// Partially specified settings, as given by flags or by a JSON config file.
///
/// String-valued fields use the same syntax as the corresponding flag.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    pub scheme: Option<String>,
    pub preset: Option<String>,
    pub alpha2: Option<String>,
    pub priors: Option<f64>,
    pub beta: Option<String>,
    pub stages: Option<usize>,
    /// Comma-separated fixed angles, one per stage.
    pub theta: Option<String>,
    pub n_max: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Option<String>,
    pub workers: Option<usize>,
    pub seed: Option<u64>,
}

impl Settings {
    pub fn from_json_file(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("bad config {}: {e}", path.display())))
    }

    /// Fields set in `self` win over those in `other`.
    pub fn or(self, other: Settings) -> Settings {
        Settings {
            scheme: self.scheme.or(other.scheme),
            preset: self.preset.or(other.preset),
            alpha2: self.alpha2.or(other.alpha2),
            priors: self.priors.or(other.priors),
            beta: self.beta.or(other.beta),
            stages: self.stages.or(other.stages),
            theta: self.theta.or(other.theta),
            n_max: self.n_max.or(other.n_max),
            out: self.out.or(other.out),
            format: self.format.or(other.format),
            workers: self.workers.or(other.workers),
            seed: self.seed.or(other.seed),
        }
    }
}

/// Fully resolved sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub curves: Vec<Curve>,
    pub grid: Grid,
    /// Prior of |α⟩; |−α⟩ gets 1 − η₁.
    pub eta1: f64,
    pub beta: BetaChoice,
    pub thetas: Vec<ThetaChoice>,
    pub n_max: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
    pub workers: Option<usize>,
    pub seed: u64,
}

fn usage<T, E: std::fmt::Display>(r: Result<T, E>) -> CliResult<T> {
    r.map_err(|e| CliError::Usage(e.to_string()))
}

fn parse_thetas(s: &str) -> CliResult<Vec<ThetaChoice>> {
    s.split(',')
        .map(|t| match t.trim() {
            "auto" => Ok(ThetaChoice::Auto),
            v => v
                .parse::<f64>()
                .map(ThetaChoice::Fixed)
                .map_err(|_| CliError::Usage(format!("bad theta '{v}'"))),
        })
        .collect()
}

impl SweepConfig {
    /// Resolves settings against preset and built-in defaults and validates the result.
    pub fn resolve(s: Settings) -> CliResult<Self> {
        Self::resolve_with(s, false)
    }

    /// As [`SweepConfig::resolve`] but for a single point, which may be zero so
    /// that [`report`] can explain why the fractions are undefined there.
    pub fn resolve_single(s: Settings) -> CliResult<Self> {
        let cfg = Self::resolve_with(s, true)?;
        if cfg.grid.points().len() != 1 {
            return Err(CliError::Usage("report takes a single alpha2 value".into()));
        }
        Ok(cfg)
    }

    fn resolve_with(s: Settings, allow_zero: bool) -> CliResult<Self> {
        let preset = s.preset.as_deref().map(Preset::from_str).transpose().map_err(CliError::Usage)?;
        let curves = match (preset, s.scheme.as_deref()) {
            (Some(_), Some(_)) => return Err(CliError::Usage("give either a scheme or a preset, not both".into())),
            (Some(p), None) => p.curves(),
            (None, Some(name)) => vec![Curve::new(usage(name.parse::<Scheme>())?)],
            (None, None) => return Err(CliError::Usage("a scheme or a preset is required".into())),
        };
        let grid = match (s.alpha2.as_deref(), preset) {
            (Some(g), _) => g.parse::<Grid>().map_err(CliError::Usage)?,
            (None, Some(_)) => Preset::GRID,
            (None, None) => return Err(CliError::Usage("an alpha2 grid is required".into())),
        };
        grid.validate(allow_zero)?;
        let eta1 = s.priors.unwrap_or(0.5);
        if !(eta1 > 0.0 && eta1 < 1.0) {
            return Err(CliError::Usage(format!("prior must lie strictly between 0 and 1, got {eta1}")));
        }
        let beta = s.beta.as_deref().map(BetaChoice::from_str).transpose();
        let beta = usage(beta)?;
        let mut curves = curves;
        if let Some(stages) = s.stages {
            if !(1..=2).contains(&stages) {
                return Err(CliError::Usage(format!("stages must be 1 or 2, got {stages}")));
            }
            for c in &mut curves {
                c.stages = Some(stages);
            }
        }
        if let Some(b) = beta {
            for c in &mut curves {
                c.beta = Some(b);
            }
        }
        let thetas = s.theta.as_deref().map(parse_thetas).transpose()?.unwrap_or_else(|| vec![ThetaChoice::Auto]);
        let format = s.format.as_deref().map(OutputFormat::from_str).transpose().map_err(CliError::Usage)?;
        if s.workers == Some(0) {
            return Err(CliError::Usage("workers must be at least 1".into()));
        }
        Ok(SweepConfig {
            curves,
            grid,
            eta1,
            beta: beta.unwrap_or(BetaChoice::MinError),
            thetas,
            n_max: s.n_max,
            out: s.out,
            format: format.unwrap_or_default(),
            workers: s.workers,
            seed: s.seed.unwrap_or(crate::info::OptimizerConfig::default().seed),
        })
    }

    fn scenario(&self, alpha_sq: f64) -> crate::Result<BinaryCoherentScenario> {
        let mut sc = BinaryCoherentScenario::from_mean_photons(alpha_sq, self.eta1)?;
        if let Some(n) = self.n_max {
            sc = sc.with_n_max(n);
        }
        sc.optimizer.seed = self.seed;
        Ok(sc)
    }

    fn params(&self, curve: &Curve) -> SchemeParams {
        SchemeParams {
            beta: curve.beta.unwrap_or(self.beta),
            stages: curve.stages.unwrap_or(1),
            thetas: self.thetas.clone(),
            ..SchemeParams::default()
        }
    }

    /// Runs one receiver at one grid point.
    pub fn evaluate(&self, curve: &Curve, alpha_sq: f64) -> crate::Result<ReceiverResult> {
        curve.scheme.run(&self.scenario(alpha_sq)?, &self.params(curve))
    }
}

/// One output line.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub scheme: String,
    pub alpha_sq: f64,
    #[serde(rename = "I")]
    pub mutual_info: Option<f64>,
    #[serde(rename = "I_acc")]
    pub i_acc: Option<f64>,
    #[serde(rename = "I_prime_max")]
    pub i_prime_max: Option<f64>,
    #[serde(rename = "E")]
    pub extracted: Option<f64>,
    #[serde(rename = "R")]
    pub residual: Option<f64>,
    #[serde(rename = "D")]
    pub destroyed: Option<f64>,
    pub r1: Option<f64>,
    pub r2: Option<f64>,
    pub avg_error: Option<f64>,
    pub theta: Option<f64>,
    pub stage: Option<usize>,
    pub error: Option<String>,
}

pub const CSV_HEADER: &str = "scheme,alpha_sq,I,I_acc,I_prime_max,E,R,D,r1,r2,avg_error,theta,stage,error";

impl SweepRow {
    pub fn from_result(curve: &Curve, alpha_sq: f64, res: crate::Result<ReceiverResult>) -> Self {
        let stage = (curve.scheme == Scheme::AtomicUnambiguous).then(|| curve.stages.unwrap_or(1));
        let mut row = SweepRow {
            scheme: curve.scheme.name().to_string(),
            alpha_sq,
            mutual_info: None,
            i_acc: None,
            i_prime_max: None,
            extracted: None,
            residual: None,
            destroyed: None,
            r1: None,
            r2: None,
            avg_error: None,
            theta: None,
            stage,
            error: None,
        };
        match res {
            Ok(r) => {
                let b = &r.breakdown;
                row.mutual_info = Some(b.mutual_info);
                row.i_acc = Some(b.i_acc);
                row.i_prime_max = Some(b.i_prime_max);
                row.extracted = Some(b.extracted);
                row.residual = Some(b.residual);
                row.destroyed = Some(b.destroyed);
                row.r1 = Some(r.error_probs.0);
                row.r2 = Some(r.error_probs.1);
                row.avg_error = Some(r.avg_error);
                row.theta = r.thetas.last().copied();
            }
            Err(e) => row.error = Some(e.to_string()),
        }
        row
    }

    pub fn to_csv(&self) -> String {
        let f = |v: Option<f64>| v.map(|x| format!("{x:.16e}")).unwrap_or_default();
        let mut line = format!("{},{:.16e}", self.scheme, self.alpha_sq);
        for v in [
            self.mutual_info,
            self.i_acc,
            self.i_prime_max,
            self.extracted,
            self.residual,
            self.destroyed,
            self.r1,
            self.r2,
            self.avg_error,
            self.theta,
        ] {
            let _ = write!(line, ",{}", f(v));
        }
        let _ = write!(line, ",{}", self.stage.map(|s| s.to_string()).unwrap_or_default());
        let _ = write!(line, ",{}", self.error.as_deref().map(csv_quote).unwrap_or_default());
        line
    }
}

fn csv_quote(s: &str) -> String {
    format!("\"{}\"", s.replace('"', "\"\""))
}

/// Evaluates every curve on every grid point; rows come out curve by curve in grid order.
pub fn run_sweep(cfg: &SweepConfig) -> CliResult<Vec<SweepRow>> {
    let points = cfg.grid.points();
    let jobs: Vec<(&Curve, f64)> = cfg.curves.iter().flat_map(|c| points.iter().map(move |&x| (c, x))).collect();
    let compute = || -> Vec<SweepRow> {
        jobs.par_iter()
            .map(|&(curve, x)| SweepRow::from_result(curve, x, cfg.evaluate(curve, x)))
            .collect()
    };
    match cfg.workers {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::Usage(format!("cannot start {n} workers: {e}")))?;
            Ok(pool.install(compute))
        }
        None => Ok(compute()),
    }
}

pub fn write_rows<W: Write>(rows: &[SweepRow], format: OutputFormat, mut w: W) -> io::Result<()> {
    match format {
        OutputFormat::Csv => {
            writeln!(w, "{CSV_HEADER}")?;
            for r in rows {
                writeln!(w, "{}", r.to_csv())?;
            }
        }
        OutputFormat::Jsonl => {
            for r in rows {
                serde_json::to_writer(&mut w, r).map_err(io::Error::other)?;
                writeln!(w)?;
            }
        }
    }
    w.flush()
}

/// Runs the sweep and writes it to the configured destination.
///
/// Fails with a numerical error after writing everything if any row carries an error marker.
pub fn sweep(cfg: &SweepConfig) -> CliResult<Vec<SweepRow>> {
    let rows = run_sweep(cfg)?;
    match &cfg.out {
        Some(path) => write_rows(&rows, cfg.format, io::BufWriter::new(std::fs::File::create(path)?))?,
        None => write_rows(&rows, cfg.format, io::stdout().lock())?,
    }
    let failed = rows.iter().filter(|r| r.error.is_some()).count();
    if failed > 0 {
        return Err(CliError::Numerical(format!("{failed} of {} points failed", rows.len())));
    }
    Ok(rows)
}

/// Human-readable breakdown of one scenario.
pub fn report(cfg: &SweepConfig) -> CliResult<String> {
    let points = cfg.grid.points();
    let [curve] = cfg.curves.as_slice() else {
        return Err(CliError::Usage("report takes a single scheme".into()));
    };
    let &[alpha_sq] = points.as_slice() else {
        return Err(CliError::Usage("report takes a single alpha2 value".into()));
    };
    let sc = cfg.scenario(alpha_sq)?;
    let res = match curve.scheme.run(&sc, &cfg.params(curve)) {
        Err(Error::ZeroAccessibleInfo { i_acc }) => {
            return Err(CliError::Numerical(format!(
                "undefined fractions: accessible information is {i_acc:e}, so E, R and D cannot be normalized"
            )))
        }
        other => other?,
    };
    let b = &res.breakdown;
    let chi = sc.holevo();
    let mut out = String::new();
    let _ = writeln!(out, "scheme        {}", curve.scheme);
    let _ = writeln!(out, "alpha^2       {alpha_sq}");
    let _ = writeln!(out, "priors        {} {}", sc.priors()[0], sc.priors()[1]);
    if let Some(beta) = res.beta {
        let _ = writeln!(out, "beta          {}", beta.re);
    }
    for (i, t) in res.thetas.iter().enumerate() {
        let _ = writeln!(out, "theta[{}]      {t:.10}", i + 1);
    }
    for (i, v) in res.stage_infos.iter().enumerate() {
        let _ = writeln!(out, "I after {}     {v:.12}", i + 1);
    }
    let _ = writeln!(out, "I             {:.12}", b.mutual_info);
    let _ = writeln!(out, "I'_max        {:.12}", b.i_prime_max);
    let _ = writeln!(out, "I_acc         {:.12}", b.i_acc);
    let _ = writeln!(out, "chi           {chi:.12}");
    let _ = writeln!(out, "H(priors)     {:.12}", sc.prior_entropy());
    let _ = writeln!(out, "E             {:.12}", b.extracted);
    let _ = writeln!(out, "R             {:.12}", b.residual);
    let _ = writeln!(out, "D             {:.12}", b.destroyed);
    let _ = writeln!(out, "E+R+D-1       {:.3e}", b.conservation_residual());
    let _ = writeln!(out, "r1 r2         {:.12} {:.12}", res.error_probs.0, res.error_probs.1);
    let _ = writeln!(out, "avg error     {:.12}", res.avg_error);
    let _ = writeln!(out, "Helstrom      {:.12}", sc.helstrom_avg_error());
    let tol = 1e-9;
    let chain = [
        ("I <= I'_max", b.mutual_info <= b.i_prime_max + tol),
        ("I'_max <= I_acc", b.i_prime_max <= b.i_acc + tol),
        ("I_acc <= chi", b.i_acc <= chi + tol),
    ];
    for (name, ok) in chain {
        let _ = writeln!(out, "{name:<16}{}", if ok { "holds" } else { "VIOLATED" });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn settings(scheme: &str, grid: &str) -> Settings {
        Settings {
            scheme: Some(scheme.into()),
            alpha2: Some(grid.into()),
            ..Settings::default()
        }
    }

    #[test]
    fn grid_points_are_offsets_from_start() {
        let g = Preset::GRID.points();
        assert_eq!(g.len(), 200);
        assert_eq!(g[0], 0.02);
        assert_eq!(g[199], 0.02 + 0.02 * 199.0);
        assert_eq!("0.5".parse::<Grid>().unwrap().points(), vec![0.5]);
    }

    #[test]
    fn zero_grid_start_is_a_usage_error() {
        let err = SweepConfig::resolve(settings("kennedy", "0:1:0.1")).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn flags_override_config_file() {
        let file = Settings {
            priors: Some(0.3),
            seed: Some(11),
            ..settings("homodyne-hard", "0.1:0.2:0.1")
        };
        let flags = Settings { priors: Some(0.4), ..Settings::default() };
        let cfg = SweepConfig::resolve(flags.or(file)).unwrap();
        assert_eq!(cfg.eta1, 0.4);
        assert_eq!(cfg.seed, 11);
    }

    #[test]
    fn unknown_config_keys_are_rejected() {
        assert!(serde_json::from_str::<Settings>(r#"{"schem": "kennedy"}"#).is_err());
    }

    #[test]
    fn preset_and_scheme_conflict() {
        let s = Settings { preset: Some("fig1a".into()), ..settings("kennedy", "0.1") };
        assert!(matches!(SweepConfig::resolve(s), Err(CliError::Usage(_))));
    }

    #[test]
    fn csv_row_shape() {
        let cfg = SweepConfig::resolve(settings("kennedy", "0.5")).unwrap();
        let rows = run_sweep(&cfg).unwrap();
        assert_eq!(rows.len(), 1);
        let line = rows[0].to_csv();
        assert_eq!(line.split(',').count(), CSV_HEADER.split(',').count());
        assert!(line.starts_with("kennedy,5.0000000000000000e-1,"));
    }

    #[test]
    fn error_rows_carry_markers() {
        let curve = Curve::new(Scheme::HomodyneHard);
        let row = SweepRow::from_result(&curve, 0.0, Err(Error::ZeroAccessibleInfo { i_acc: 0.0 }));
        let line = row.to_csv();
        assert!(line.ends_with('"'));
        assert_eq!(row.mutual_info, None);
    }

    #[test]
    fn report_at_zero_amplitude_is_a_numerical_failure() {
        let cfg = SweepConfig::resolve_single(settings("atomic-optimal", "0")).unwrap();
        let err = report(&cfg).unwrap_err();
        assert_eq!(err.exit_code(), 3);
        assert!(err.to_string().contains("undefined fractions"));
    }
}
