//! Command-line front end: argument model, command dispatch and output formatting.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fmt::Write as _;
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use kekulattice_core::bloch::{bloch_t, HoppingTriple};
use kekulattice_core::energy::total_energy;
use kekulattice_core::kagome::kagome_bands;
use kekulattice_core::minimize::{mu_values, phase_point, MinimizerTables};
use kekulattice_core::perturbation::{mu_c, mu_c_prime_bound};
use kekulattice_core::verify::{run_verify, VerifyOptions};
use kekulattice_core::{basis, make_grid, MinimizeOptions, PhasePoint, Vec2, Zone};
use serde_json::json;

pub const THREADS_ENV: &str = "KEKULATTICE_THREADS";
pub const BANDS_HEADER: &str = "i,kx,ky,e1,e2,e3,e4,e5,e6";
pub const KAGOME_HEADER: &str = "i,kx,ky,e1,e2,e3";
pub const SCAN_HEADER: &str = "mu,t,u,v,class,gap,energy,energy_pristine";
pub const ENERGY_HEADER: &str = "t,u,v,mu,grid_n,quantum,elastic,total,quad_error";
pub const CRITICAL_KEYS: [&str; 5] = ["mu_c", "mu_c_prime_bound", "grid_n", "err_mu_c", "err_mu_c_prime"];

const DEFAULT_GRID: usize = 256;
const DEFAULT_VERIFY_GRID: usize = 16;
const MIN_GRID: usize = 8;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Numerical(#[from] kekulattice_core::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Numerical(_) | CliError::Io(_) => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tuv(pub [f64; 3]);

impl FromStr for Tuv {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(format!("expected t,u,v, got {s:?}"));
        }
        let mut out = [0.0f64; 3];
        for (o, p) in out.iter_mut().zip(&parts) {
            *o = p.parse().map_err(|_| format!("not a number: {p:?}"))?;
            if !o.is_finite() {
                return Err(format!("not finite: {p:?}"));
            }
        }
        Ok(Tuv(out))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MuRange {
    pub from: f64,
    pub to: f64,
    pub steps: usize,
}

impl FromStr for MuRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let [from, to, steps] = parts[..] else {
            return Err(format!("expected FROM:TO:STEPS, got {s:?}"));
        };
        let num = |p: &str| p.trim().parse::<f64>().map_err(|_| format!("not a number: {p:?}"));
        let r = MuRange {
            from: num(from)?,
            to: num(to)?,
            steps: steps.trim().parse().map_err(|_| format!("not a step count: {steps:?}"))?,
        };
        if r.steps == 0 {
            return Err("STEPS must be at least 1".into());
        }
        if !(r.from > 0.0) || !r.to.is_finite() {
            return Err("FROM must be positive and TO finite".into());
        }
        if r.steps > 1 && !(r.from < r.to) {
            return Err("FROM must be below TO".into());
        }
        Ok(r)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "kekulattice", version, about = "Tight-binding energy of Kekulé-distorted graphene")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Quadrature points per axis (default 256; 16 for `verify`).
    #[arg(long, global = true)]
    pub grid: Option<usize>,
    /// Elastic rigidity.
    #[arg(long, global = true)]
    pub mu: Option<f64>,
    /// Hopping amplitudes as t,u,v.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub tuv: Option<Tuv>,
    /// Rigidity range FROM:TO:STEPS.
    #[arg(long = "mu-range", global = true)]
    pub mu_range: Option<MuRange>,
    /// Output file (stdout when absent).
    #[arg(long, global = true)]
    pub out: Option<std::path::PathBuf>,
    /// Output format (csv by default; json for `critical`; text for `verify`).
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Seed for multistart jitter and random verification samples.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads, 0 = all cores. Overrides KEKULATTICE_THREADS.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Six bands of T(k) along Γ→K→M→Γ of the Kekulé zone.
    Bands {
        #[arg(long, default_value_t = 128)]
        points: usize,
    },
    /// Total, quantum and elastic energy per atom of one configuration.
    Energy,
    /// Minimize the total energy at fixed rigidity.
    Minimize,
    /// Minimize over a range of rigidities.
    PhaseScan {
        /// Same as --mu-range.
        range: Option<MuRange>,
    },
    /// Critical rigidity and its upper bound.
    Critical,
    /// Kagome bands along Γ→K→M→Γ.
    Kagome {
        #[arg(long, default_value_t = 128)]
        points: usize,
    },
    /// Randomized invariant suites.
    Verify {
        /// Flip the sign of the constant term of Z̃.
        #[arg(long)]
        inject_fault: bool,
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
}

/// Rendered output and the exit status it implies.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub text: String,
    pub code: i32,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Self { text, code: 0 }
    }
}

/// `%.12g`.
pub fn fmt_g(x: f64) -> String {
    const P: i32 = 12;
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.into();
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", (P - 1) as usize, x);
    let (mant, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..P).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mant), exp.abs())
    } else {
        trim_zeros(&format!("{:.*}", (P - 1 - exp) as usize, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn csv_line(out: &mut String, fields: &[String]) {
    out.push_str(&fields.join(","));
    out.push('\n');
}

/// `n` points per segment along the closed polyline through `corners`, endpoint included.
pub fn polyline(corners: &[Vec2], n: usize) -> Vec<Vec2> {
    let mut pts = Vec::with_capacity(n * (corners.len() - 1) + 1);
    for w in corners.windows(2) {
        for i in 0..n {
            pts.push(w[0] + (w[1] - w[0]) * (i as f64 / n as f64));
        }
    }
    pts.push(*corners.last().expect("nonempty path"));
    pts
}

/// Γ, K, M, Γ of the Kekulé zone.
pub fn kekule_path_corners() -> [Vec2; 4] {
    let (g1, g2) = basis().reciprocal(Zone::B6);
    [Vec2::zeros(), (g1 + g2) / 3.0, g1 / 2.0, Vec2::zeros()]
}

/// Γ, K, M, Γ of the honeycomb zone.
pub fn honeycomb_path_corners() -> [Vec2; 4] {
    let (g1, g2) = basis().reciprocal(Zone::B2);
    [Vec2::zeros(), (2.0 * g1 + g2) / 3.0, g1 / 2.0, Vec2::zeros()]
}

impl Cli {
    fn grid_n(&self, default: usize) -> Result<usize, CliError> {
        let n = self.grid.unwrap_or(default);
        if n < MIN_GRID {
            return Err(CliError::Usage(format!("--grid must be at least {MIN_GRID}, got {n}")));
        }
        Ok(n)
    }

    fn require_mu(&self) -> Result<f64, CliError> {
        match self.mu {
            Some(mu) if mu > 0.0 && mu.is_finite() => Ok(mu),
            Some(mu) => Err(CliError::Usage(format!("--mu must be positive, got {mu}"))),
            None => Err(CliError::Usage("--mu is required".into())),
        }
    }

    fn require_tuv(&self) -> Result<HoppingTriple, CliError> {
        self.tuv
            .map(|t| HoppingTriple::from_array(t.0))
            .ok_or_else(|| CliError::Usage("--tuv is required".into()))
    }

    fn format(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }

    fn minimize_options(&self) -> MinimizeOptions {
        MinimizeOptions {
            seed: self.seed,
            ..Default::default()
        }
    }
}

/// Thread count from the flag, else from the environment, else 0 (all cores).
pub fn resolve_threads(flag: Option<usize>, env: Option<&str>) -> Result<usize, CliError> {
    match (flag, env) {
        (Some(n), _) => Ok(n),
        (None, Some(s)) => s
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("{THREADS_ENV} must be a nonnegative integer, got {s:?}"))),
        (None, None) => Ok(0),
    }
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Bands { points } => cmd_bands(cli, *points),
        Command::Energy => cmd_energy(cli),
        Command::Minimize => cmd_minimize(cli),
        Command::PhaseScan { range } => {
            let range = range
                .or(cli.mu_range)
                .ok_or_else(|| CliError::Usage("phase-scan needs FROM:TO:STEPS".into()))?;
            cmd_phase_scan(cli, range)
        }
        Command::Critical => cmd_critical(cli),
        Command::Kagome { points } => cmd_kagome(cli, *points),
        Command::Verify { inject_fault, samples } => cmd_verify(cli, *inject_fault, *samples),
    }
}

fn require_points(points: usize) -> Result<(), CliError> {
    if points == 0 {
        return Err(CliError::Usage("--points must be positive".into()));
    }
    Ok(())
}

fn path_output(header: &str, rows: Vec<(Vec2, Vec<f64>)>, format: Format) -> String {
    match format {
        Format::Csv => {
            let mut out = format!("{header}\n");
            for (i, (k, e)) in rows.iter().enumerate() {
                let mut f = vec![i.to_string(), fmt_g(k.x), fmt_g(k.y)];
                f.extend(e.iter().map(|x| fmt_g(*x)));
                csv_line(&mut out, &f);
            }
            out
        }
        Format::Json => {
            let rows: Vec<_> = rows
                .iter()
                .enumerate()
                .map(|(i, (k, e))| json!({"i": i, "kx": k.x, "ky": k.y, "e": e}))
                .collect();
            json_text(&serde_json::Value::Array(rows))
        }
    }
}

fn json_text(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn cmd_bands(cli: &Cli, points: usize) -> Result<Outcome, CliError> {
    require_points(points)?;
    let cfg = cli.require_tuv()?;
    let rows = polyline(&kekule_path_corners(), points)
        .into_iter()
        .map(|k| (k, bloch_t(&cfg, &k).bands().values.to_vec()))
        .collect();
    Ok(Outcome::ok(path_output(BANDS_HEADER, rows, cli.format(Format::Csv))))
}

fn cmd_kagome(cli: &Cli, points: usize) -> Result<Outcome, CliError> {
    require_points(points)?;
    let rows = polyline(&honeycomb_path_corners(), points)
        .into_iter()
        .map(|k| (k, kagome_bands(&k).values().to_vec()))
        .collect();
    Ok(Outcome::ok(path_output(KAGOME_HEADER, rows, cli.format(Format::Csv))))
}

fn cmd_energy(cli: &Cli) -> Result<Outcome, CliError> {
    let (cfg, mu, n) = (cli.require_tuv()?, cli.require_mu()?, cli.grid_n(DEFAULT_GRID)?);
    let grid = make_grid(Zone::B6, n, (0.5, 0.5))?;
    let e = total_energy(&cfg, mu, &grid)?;
    let text = match cli.format(Format::Csv) {
        Format::Csv => {
            let mut out = format!("{ENERGY_HEADER}\n");
            let mut f: Vec<String> = cfg.as_array().iter().map(|x| fmt_g(*x)).collect();
            f.push(fmt_g(mu));
            f.push(n.to_string());
            f.extend([e.quantum, e.elastic, e.total, e.quad_error].map(fmt_g));
            csv_line(&mut out, &f);
            out
        }
        Format::Json => json_text(&json!({
            "t": cfg.t, "u": cfg.u, "v": cfg.v, "mu": mu, "grid_n": n,
            "quantum": e.quantum, "elastic": e.elastic, "total": e.total, "quad_error": e.quad_error,
        })),
    };
    Ok(Outcome::ok(text))
}

fn scan_output(points: &[PhasePoint], format: Format) -> String {
    match format {
        Format::Csv => {
            let mut out = format!("{SCAN_HEADER}\n");
            for p in points {
                let c = p.cfg;
                let mut f: Vec<String> = [p.mu, c.t, c.u, c.v].map(fmt_g).to_vec();
                f.push(p.phase.as_str().to_string());
                f.extend([p.gap, p.energy_kekule, p.energy_pristine].map(fmt_g));
                csv_line(&mut out, &f);
            }
            out
        }
        Format::Json => {
            let rows: Vec<_> = points
                .iter()
                .map(|p| {
                    json!({
                        "mu": p.mu, "t": p.cfg.t, "u": p.cfg.u, "v": p.cfg.v,
                        "class": p.phase.as_str(), "symmetry": p.sym_class.as_str(),
                        "gap": p.gap, "energy": p.energy_kekule, "energy_pristine": p.energy_pristine,
                    })
                })
                .collect();
            json_text(&serde_json::Value::Array(rows))
        }
    }
}

fn scan(cli: &Cli, mus: &[f64]) -> Result<Vec<PhasePoint>, CliError> {
    let grid = make_grid(Zone::B6, cli.grid_n(DEFAULT_GRID)?, (0.5, 0.5))?;
    let opts = cli.minimize_options();
    let tables = MinimizerTables::new(&grid, opts.search_n)?;
    let mut out = Vec::with_capacity(mus.len());
    for &mu in mus {
        let p = phase_point(mu, &tables, &opts)?;
        log::info!("mu = {mu}: {} {:?}", p.phase.as_str(), p.cfg);
        out.push(p);
    }
    Ok(out)
}

fn cmd_minimize(cli: &Cli) -> Result<Outcome, CliError> {
    let mu = cli.require_mu()?;
    Ok(Outcome::ok(scan_output(&scan(cli, &[mu])?, cli.format(Format::Csv))))
}

fn cmd_phase_scan(cli: &Cli, r: MuRange) -> Result<Outcome, CliError> {
    let mus = mu_values(r.from, r.to, r.steps).map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(Outcome::ok(scan_output(&scan(cli, &mus)?, cli.format(Format::Csv))))
}

fn cmd_critical(cli: &Cli) -> Result<Outcome, CliError> {
    let n = cli.grid_n(DEFAULT_GRID)?;
    let lower = mu_c(&make_grid(Zone::B6, n, (0.5, 0.5))?)?;
    let upper = mu_c_prime_bound(&make_grid(Zone::B2, n, (0.5, 0.5))?)?;
    if !(lower.value < upper.value) {
        return Err(kekulattice_core::Error::InconsistentCoefficients(format!(
            "mu_c = {} is not below its bound {}",
            lower.value, upper.value
        ))
        .into());
    }
    let vals = [lower.value, upper.value, n as f64, lower.error, upper.error];
    let text = match cli.format(Format::Json) {
        Format::Json => json_text(&json!({
            CRITICAL_KEYS[0]: lower.value,
            CRITICAL_KEYS[1]: upper.value,
            CRITICAL_KEYS[2]: n,
            CRITICAL_KEYS[3]: lower.error,
            CRITICAL_KEYS[4]: upper.error,
        })),
        Format::Csv => {
            let mut out = CRITICAL_KEYS.join(",");
            out.push('\n');
            csv_line(&mut out, &vals.map(fmt_g));
            out
        }
    };
    Ok(Outcome::ok(text))
}

fn cmd_verify(cli: &Cli, inject_fault: bool, samples: usize) -> Result<Outcome, CliError> {
    let opts = VerifyOptions {
        seed: cli.seed,
        samples,
        grid_n: cli.grid_n(DEFAULT_VERIFY_GRID)?,
        inject_fault,
    };
    let report = run_verify(&opts)?;
    let text = match cli.format {
        Some(Format::Json) => json_text(&serde_json::to_value(&report).expect("serializable")),
        Some(Format::Csv) => {
            let mut out = String::from("suite,pass,checked,worst\n");
            for s in &report.suites {
                let _ = writeln!(out, "{},{},{},{}", s.name, s.pass, s.checked, fmt_g(s.worst));
            }
            out
        }
        None => report.render(),
    };
    Ok(Outcome {
        text,
        code: if report.all_pass() { 0 } else { 2 },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn general_format_matches_printf() {
        let cases = [
            (0.0, "0"),
            (1.0, "1"),
            (-2.5, "-2.5"),
            (1.0 / 3.0, "0.333333333333"),
            (2.0 / 3.0 * 1e-5, "6.66666666667e-06"),
            (1e-4, "0.0001"),
            (123456789012.0, "123456789012"),
            (1234567890123.0, "1.23456789012e+12"),
            (1.5e300, "1.5e+300"),
            (0.99999999999999, "1"),
        ];
        for (x, want) in cases {
            assert_eq!(fmt_g(x), want, "{x}");
        }
    }

    #[test]
    fn range_and_triple_parsing() {
        assert_eq!("0.5:1.5:21".parse::<MuRange>().unwrap(), MuRange { from: 0.5, to: 1.5, steps: 21 });
        assert!("0.7:0.7:1".parse::<MuRange>().is_ok());
        assert!("1.5:0.5:3".parse::<MuRange>().is_err());
        assert!("0.5:1.5:0".parse::<MuRange>().is_err());
        assert!("0.5:1.5".parse::<MuRange>().is_err());
        assert_eq!("1,-2, 3".parse::<Tuv>().unwrap(), Tuv([1.0, -2.0, 3.0]));
        assert!("1,2".parse::<Tuv>().is_err());
        assert!("1,x,2".parse::<Tuv>().is_err());
    }

    #[test]
    fn threads_flag_wins_over_environment() {
        assert_eq!(resolve_threads(Some(3), Some("5")).unwrap(), 3);
        assert_eq!(resolve_threads(None, Some("5")).unwrap(), 5);
        assert_eq!(resolve_threads(None, None).unwrap(), 0);
        assert_eq!(resolve_threads(None, Some("x")).unwrap_err().exit_code(), 1);
    }

    #[test]
    fn path_corners_sit_on_the_zone_boundary() {
        for (corners, zone) in [(kekule_path_corners(), Zone::B6), (honeycomb_path_corners(), Zone::B2)] {
            let (g1, _) = basis().reciprocal(zone);
            let (k, m) = (corners[1], corners[2]);
            // K and M lie on the Bragg line of g1, K at the zone corner.
            assert!((k.dot(&g1) - 0.5 * g1.norm_squared()).abs() < 1e-12);
            assert!((m.dot(&g1) - 0.5 * g1.norm_squared()).abs() < 1e-12);
            assert!((k.norm() - g1.norm() / 3f64.sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn polyline_length() {
        assert_eq!(polyline(&kekule_path_corners(), 128).len(), 385);
        assert_eq!(polyline(&kekule_path_corners(), 1).len(), 4);
    }
}
