use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use fracinfo::spectrum::{action_integral, energy_level, Units};
use fracinfo::sweep::{
    prepare_state, reconcile_table, run_sweep, Normalization, PointOptions, PointRecord, PointStatus, SweepConfig,
};
use fracinfo::{LevyIndex, MomentumState, Representation, Tolerance};

use crate::emit::{write_csv, write_json, Cell, Table};
use crate::parse::{parse_config, parse_index_list, parse_list};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_ALL_FAILED: i32 = 2;
pub const EXIT_PARTIAL: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "fracinfo", version, about = "Information measures of the fractional quantum oscillator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Energy levels and their quantization check.
    Spectrum(Common),
    /// Momentum-space eigenstates: exponents, coefficients and norms.
    States(Common),
    /// Information measures for every (n, α, representation).
    Measures(Common),
    /// Residuals against the reference complexity table.
    Reconcile(Common),
}

#[derive(Args, Debug, Default)]
struct Common {
    /// Flat `key = value` file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Quantum numbers: comma list or ranges `a:b:step`.
    #[arg(long)]
    n: Option<String>,
    /// Lévy indices in [1, 2]: comma list or ranges `a:b:step`.
    #[arg(long)]
    alpha: Option<String>,
    /// `x`, `k`, or `x,k`.
    #[arg(long)]
    representation: Option<String>,
    /// `on` or `off`.
    #[arg(long)]
    normalize: Option<String>,
    /// Cutoff applied to states that are not normalizable.
    #[arg(long)]
    epsilon: Option<String>,
    #[arg(long)]
    out: Option<String>,
    /// `csv` or `json`.
    #[arg(long)]
    format: Option<String>,
    #[arg(long = "grid-points")]
    grid_points: Option<String>,
    #[arg(long)]
    kmax: Option<String>,
    /// Absolute and relative quadrature tolerance.
    #[arg(long)]
    tol: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// Fully resolved settings of one invocation.
#[derive(Clone, Debug, PartialEq)]
pub struct Settings {
    pub ns: Vec<u32>,
    pub alphas: Vec<f64>,
    pub representations: Vec<Representation>,
    pub normalization: Normalization,
    pub options: PointOptions,
    pub out: PathBuf,
    pub format: Format,
}

fn config_err(key: &str, e: impl std::fmt::Display) -> String {
    format!("{key}: {e}")
}

/// Merges file entries with flag values (flags win) and validates them.
pub fn resolve(file: &BTreeMap<String, String>, flags: &BTreeMap<String, String>) -> Result<Settings, String> {
    let get = |k: &str| flags.get(k).or_else(|| file.get(k)).map(|s| s.trim().to_string());
    let ns = parse_index_list(&get("n").unwrap_or_else(|| "0:3:1".into())).map_err(|e| config_err("n", e))?;
    let alphas = parse_list(&get("alpha").unwrap_or_else(|| "1.2:2:0.1".into())).map_err(|e| config_err("alpha", e))?;
    for &a in &alphas {
        LevyIndex::inclusive(a).map_err(|e| config_err("alpha", e))?;
    }
    let representations = match get("representation").as_deref() {
        None | Some("x,k") | Some("k,x") | Some("both") => vec![Representation::Position, Representation::Momentum],
        Some("x") => vec![Representation::Position],
        Some("k") => vec![Representation::Momentum],
        Some(other) => return Err(config_err("representation", format!("expected x, k or x,k, got {other:?}"))),
    };
    let normalization = match get("normalize").as_deref() {
        None | Some("on") => Normalization::Normalized,
        Some("off") => Normalization::Raw,
        Some(other) => return Err(config_err("normalize", format!("expected on or off, got {other:?}"))),
    };
    let float = |k: &str| -> Result<Option<f64>, String> {
        get(k)
            .map(|s| s.parse::<f64>().map_err(|e| config_err(k, e)))
            .transpose()
    };
    let grid_points = get("grid-points")
        .map(|s| s.parse::<usize>().map_err(|e| config_err("grid-points", e)))
        .transpose()?;
    let options = PointOptions {
        epsilon: float("epsilon")?,
        grid_points,
        k_max: float("kmax")?,
        tol: float("tol")?.map(|t| Tolerance::new(t, t)),
    };
    options.validate().map_err(|e| e.to_string())?;
    let format = match get("format").as_deref() {
        None | Some("csv") => Format::Csv,
        Some("json") => Format::Json,
        Some(other) => return Err(config_err("format", format!("expected csv or json, got {other:?}"))),
    };
    Ok(Settings {
        ns,
        alphas,
        representations,
        normalization,
        options,
        out: PathBuf::from(get("out").unwrap_or_else(|| "out".into())),
        format,
    })
}

impl Common {
    fn flags(&self) -> BTreeMap<String, String> {
        let pairs = [
            ("n", &self.n),
            ("alpha", &self.alpha),
            ("representation", &self.representation),
            ("normalize", &self.normalize),
            ("epsilon", &self.epsilon),
            ("out", &self.out),
            ("format", &self.format),
            ("grid-points", &self.grid_points),
            ("kmax", &self.kmax),
            ("tol", &self.tol),
        ];
        pairs
            .into_iter()
            .filter_map(|(k, v)| v.clone().map(|v| (k.to_string(), v)))
            .collect()
    }

    fn settings(&self) -> Result<Settings, String> {
        let file = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
                parse_config(&text).map_err(|e| format!("{}: {e}", path.display()))?
            }
            None => BTreeMap::new(),
        };
        resolve(&file, &self.flags())
    }
}

fn write_table(settings: &Settings, stem: &str, table: &Table) -> Result<PathBuf, String> {
    fs::create_dir_all(&settings.out).map_err(|e| format!("{}: {e}", settings.out.display()))?;
    let path = settings.out.join(format!("{stem}.{}", settings.format.extension()));
    let io_err = |e: std::io::Error| format!("{}: {e}", path.display());
    let file = fs::File::create(&path).map_err(io_err)?;
    let mut w = BufWriter::new(file);
    match settings.format {
        Format::Csv => write_csv(table, &mut w),
        Format::Json => write_json(table, &mut w),
    }
    .and_then(|_| w.flush())
    .map_err(io_err)?;
    Ok(path)
}

/// Exit status of a batch of point outcomes.
pub fn exit_code(statuses: &[PointStatus]) -> i32 {
    if statuses.is_empty() || statuses.iter().all(|s| *s == PointStatus::Ok) {
        EXIT_OK
    } else if statuses.iter().all(|s| *s == PointStatus::Failed) {
        EXIT_ALL_FAILED
    } else {
        EXIT_PARTIAL
    }
}

fn spectrum(s: &Settings) -> Result<(Vec<Table>, Vec<PointStatus>), String> {
    let mut t = Table::new(vec!["n", "alpha", "energy", "action_residual"]);
    let units = Units::default();
    let mut statuses = Vec::new();
    for &a in &s.alphas {
        for &n in &s.ns {
            let e = energy_level(n, a, &units).map_err(|e| e.to_string())?;
            let target = 2.0 * std::f64::consts::PI * (n as f64 + 0.5);
            let residual = action_integral(e, a, &units).map(|j| j / target - 1.0);
            statuses.push(if residual.is_ok() { PointStatus::Ok } else { PointStatus::Failed });
            t.push(
                vec![n.into(), a.into(), e.into(), residual.map_or(Cell::Empty, Cell::Float)],
                vec![],
            );
        }
    }
    Ok((vec![t], statuses))
}

fn states(s: &Settings) -> Result<(Vec<Table>, Vec<PointStatus>), String> {
    let mut summary = Table::new(vec![
        "n",
        "alpha",
        "status",
        "normalizable",
        "density_exponent",
        "decay_exponent",
        "decay_rate",
        "mass",
        "cutoff",
        "energy",
        "error",
    ]);
    let mut terms = Table::new(vec!["n", "alpha", "index", "exponent", "coefficient"]);
    let mut statuses = Vec::new();
    let mut keys: Vec<(u32, f64)> = s.ns.iter().flat_map(|&n| s.alphas.iter().map(move |&a| (n, a))).collect();
    keys.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
    keys.dedup();
    for (n, a) in keys {
        let levy = LevyIndex::inclusive(a).map_err(|e| e.to_string())?;
        let base = MomentumState::new(n, levy);
        for (i, term) in base.poly().terms().iter().enumerate() {
            terms.push(vec![n.into(), a.into(), i.into(), term.exponent.into(), term.coeff.into()], vec![]);
        }
        let energy = energy_level(n, a, &Units::default()).map_err(|e| e.to_string())?;
        let prepared = prepare_state(n, a, s.options.epsilon);
        let mass = prepared
            .as_ref()
            .map_err(|e| e.to_string())
            .and_then(|st| st.mass(s.options.tol.unwrap_or_default()).map_err(|e| e.to_string()));
        let (status, error) = match &mass {
            Ok(_) => (PointStatus::Ok, Cell::Empty),
            Err(e) => (PointStatus::Failed, Cell::from(e.clone())),
        };
        statuses.push(status);
        summary.push(
            vec![
                n.into(),
                a.into(),
                status.label().into(),
                base.is_normalizable().into(),
                base.density_exponent().into(),
                base.decay_exponent().into(),
                base.decay_rate().into(),
                Cell::opt_float(mass.ok()),
                Cell::opt_float(prepared.ok().and_then(|p| p.cutoff())),
                energy.into(),
                error,
            ],
            vec![],
        );
    }
    Ok((vec![summary, terms], statuses))
}

const MEASURE_NAMES: [&str; 10] = [
    "fisher",
    "shannon",
    "disequilibrium",
    "exp_entropy",
    "complexity",
    "j3",
    "j1",
    "fisher_shannon",
    "fisher_shannon_1d",
    "variance",
];

fn measure_values(r: &PointRecord) -> [Option<f64>; 10] {
    match &r.measures {
        None => [None; 10],
        Some(m) => [
            m.fisher,
            m.shannon,
            m.disequilibrium,
            m.exp_entropy,
            m.complexity,
            m.j3,
            m.j1,
            m.fisher_shannon,
            m.fisher_shannon_1d,
            m.variance,
        ]
        .map(Some),
    }
}

fn measures(s: &Settings) -> Result<(Vec<Table>, Vec<PointStatus>), String> {
    let config = SweepConfig {
        ns: s.ns.clone(),
        alphas: s.alphas.clone(),
        representations: s.representations.clone(),
        normalization: s.normalization,
        options: s.options,
    };
    let records = run_sweep(&config).map_err(|e| e.to_string())?;
    let mut columns = vec!["n", "alpha", "representation", "normalization", "status", "energy"];
    columns.extend(MEASURE_NAMES);
    columns.extend(["error_kind", "error"]);
    let mut table = Table::new(columns).with_nested(
        "diagnostics",
        vec![
            "divergent",
            "approximate",
            "norm_constant",
            "parseval",
            "tail_decay",
            "cutoff",
            "density_exponent",
            "grid_points",
            "kmax",
        ],
    );
    let mut series = Table::new(vec!["measure", "n", "representation", "normalization", "alpha", "value"]);
    for r in &records {
        let mut row: Vec<Cell> = vec![
            r.n.into(),
            r.alpha.into(),
            r.representation.label().into(),
            r.normalization.label().into(),
            r.status().label().into(),
            r.energy.into(),
        ];
        row.extend(measure_values(r).map(Cell::opt_float));
        match &r.error {
            Some(e) => row.extend([Cell::from(e.kind), Cell::from(e.message.clone())]),
            None => row.extend([Cell::Empty, Cell::Empty]),
        }
        let d = &r.diagnostics;
        table.push(
            row,
            vec![
                d.divergent.join(";").into(),
                d.approximate.into(),
                Cell::opt_float(d.norm_constant),
                Cell::opt_float(d.parseval),
                Cell::opt_float(d.tail_decay),
                Cell::opt_float(d.cutoff),
                d.density_exponent.into(),
                d.grid_points.map_or(Cell::Empty, Cell::from),
                Cell::opt_float(d.k_max),
            ],
        );
    }
    // (α, value) series grouped by measure, then by the record order
    for (i, name) in MEASURE_NAMES.iter().enumerate() {
        for r in &records {
            if let Some(v) = measure_values(r)[i] {
                series.push(
                    vec![
                        (*name).into(),
                        r.n.into(),
                        r.representation.label().into(),
                        r.normalization.label().into(),
                        r.alpha.into(),
                        v.into(),
                    ],
                    vec![],
                );
            }
        }
    }
    let statuses = records.iter().map(PointRecord::status).collect();
    Ok((vec![table, series], statuses))
}

fn reconcile(s: &Settings) -> Result<(Vec<Table>, Vec<PointStatus>), String> {
    let report = reconcile_table(&s.ns, &s.options).map_err(|e| e.to_string())?;
    let mut cells = Table::new(vec![
        "n",
        "alpha",
        "convention",
        "reference_complexity",
        "reference_fisher_shannon",
        "complexity",
        "fisher_shannon",
        "complexity_residual",
        "fisher_shannon_residual",
        "approximate",
        "reference_below_lmc_bound",
        "error",
    ]);
    for row in &report.rows {
        for v in &row.values {
            cells.push(
                vec![
                    row.cell.n.into(),
                    row.cell.alpha.into(),
                    v.convention.label().into(),
                    row.cell.complexity.into(),
                    row.cell.fisher_shannon.into(),
                    v.complexity.into(),
                    v.fisher_shannon.into(),
                    v.complexity_residual.into(),
                    v.fisher_shannon_residual.into(),
                    v.approximate.into(),
                    row.violates_lmc_bound.into(),
                    v.error.clone().map_or(Cell::Empty, Cell::from),
                ],
                vec![],
            );
        }
    }
    let mut best = Table::new(vec!["n", "convention", "mean_residual", "missing", "best"]);
    for b in &report.best {
        for sc in &b.scores {
            best.push(
                vec![
                    b.n.into(),
                    sc.convention.label().into(),
                    sc.mean_residual.into(),
                    sc.missing.into(),
                    (sc.convention == b.best).into(),
                ],
                vec![],
            );
        }
    }
    Ok((vec![cells, best], Vec::new()))
}

/// Parses `args`, runs the subcommand and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let (common, stems, job): (&Common, &[&str], fn(&Settings) -> _) = match &cli.command {
        Command::Spectrum(c) => (c, &["spectrum"], spectrum),
        Command::States(c) => (c, &["states", "terms"], states),
        Command::Measures(c) => (c, &["measures", "series"], measures),
        Command::Reconcile(c) => (c, &["reconciliation", "conventions"], reconcile),
    };
    let settings = match common.settings() {
        Ok(s) => s,
        Err(e) => {
            eprintln!("config error: {e}");
            return EXIT_CONFIG;
        }
    };
    let (tables, statuses) = match job(&settings) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    for (stem, table) in stems.iter().zip(&tables) {
        match write_table(&settings, stem, table) {
            Ok(path) => eprintln!("wrote {}", path.display()),
            Err(e) => {
                eprintln!("error: {e}");
                return EXIT_CONFIG;
            }
        }
    }
    exit_code(&statuses)
}

/// Writes to `dir` for tests and scripted use; same as `run` with `--out`.
pub fn run_in(dir: &Path, args: &[&str]) -> i32 {
    let mut full: Vec<String> = vec!["fracinfo".into()];
    full.extend(args.iter().map(|s| s.to_string()));
    full.push("--out".into());
    full.push(dir.display().to_string());
    run(full)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn map(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
        pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
    }

    #[test]
    fn flags_override_file() {
        let file = map(&[("alpha", "1.5"), ("format", "json"), ("n", "2")]);
        let flags = map(&[("alpha", "2.0")]);
        let s = resolve(&file, &flags).unwrap();
        assert_eq!(s.alphas, vec![2.0]);
        assert_eq!(s.ns, vec![2]);
        assert_eq!(s.format, Format::Json);
    }

    #[test]
    fn invalid_settings() {
        assert!(resolve(&map(&[("alpha", "0.5")]), &BTreeMap::new()).is_err());
        assert!(resolve(&map(&[("epsilon", "-1")]), &BTreeMap::new()).is_err());
        assert!(resolve(&map(&[("grid-points", "1000")]), &BTreeMap::new()).is_err());
        assert!(resolve(&map(&[("normalize", "maybe")]), &BTreeMap::new()).is_err());
        assert!(resolve(&map(&[("tol", "0")]), &BTreeMap::new()).is_err());
    }

    #[test]
    fn exit_codes() {
        use PointStatus::*;
        assert_eq!(exit_code(&[]), EXIT_OK);
        assert_eq!(exit_code(&[Ok, Ok]), EXIT_OK);
        assert_eq!(exit_code(&[Ok, Flagged]), EXIT_PARTIAL);
        assert_eq!(exit_code(&[Failed, Ok]), EXIT_PARTIAL);
        assert_eq!(exit_code(&[Failed, Failed]), EXIT_ALL_FAILED);
    }
}
