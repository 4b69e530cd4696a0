use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use qcausal::model::{q_from_delay, CausalMap, FamilyPoint, Paradigm};
use qcausal::sweep::{read_config_file, run_sweep, write_rows, SweepConfig};
use qcausal::tomography::{
    classify_records, fit_theta, pauli_grid, pseudo_counts, read_counts_file, reconstruct,
    simulate_counts, write_counts_file, BootstrapOptions, FitTarget, DEFAULT_RESAMPLES,
};
use qcausal::witness::{classify, ReportJson, SearchOptions, DEFAULT_EPSILON};
use qcausal::Error;

#[derive(Parser)]
#[command(
    name = "qcausal",
    version,
    about = "Causal maps between two time-ordered qubits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep one of the transition families and write CSV or JSON rows.
    Sweep(SweepArgs),
    /// Classify a single configuration (or a map file) and print the report.
    Classify(ClassifyArgs),
    /// Simulate tomography, reconstruct the map and classify it.
    Tomo(TomoArgs),
    /// Print the causal map JSON of a configuration.
    DumpMap(PointArgs),
}

/// Parameters of a single family point. Unset values fall back to the
/// config file, then to `θ = π/2, p = 0, q = 1, η = 0`.
#[derive(Args, Clone, Default)]
struct PointArgs {
    #[arg(long)]
    paradigm: Option<Paradigm>,
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long, conflicts_with = "tau")]
    q: Option<f64>,
    /// Delay; needs --tau-coh and replaces --q.
    #[arg(long, requires = "tau_coh")]
    tau: Option<f64>,
    #[arg(long)]
    tau_coh: Option<f64>,
    #[arg(long)]
    eta: Option<f64>,
    /// Plain-text `key = value` file; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file (classify, dump-map) or directory (tomo); stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    q: Option<f64>,
    #[arg(long)]
    tau_coh: Option<f64>,
    #[arg(long)]
    eta: Option<f64>,
    /// Number of points on every swept axis.
    #[arg(long)]
    steps: Option<usize>,
    /// Override one axis: `param=start:stop:steps`.
    #[arg(long, value_name = "PARAM=START:STOP:STEPS")]
    grid: Vec<String>,
    #[arg(long)]
    epsilon: Option<f64>,
    /// Simulate tomography with this many shots per setting at every point.
    #[arg(long)]
    shots: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct ClassifyArgs {
    #[command(flatten)]
    point: PointArgs,
    /// Classify a causal map JSON file instead of a family point.
    #[arg(long, conflicts_with_all = ["paradigm", "theta", "p", "q", "tau", "eta"])]
    map: Option<PathBuf>,
    #[arg(long)]
    epsilon: Option<f64>,
}

#[derive(Args)]
struct TomoArgs {
    #[command(flatten)]
    point: PointArgs,
    /// Shots per setting; omitted means exact probabilities as pseudo-counts.
    #[arg(long)]
    shots: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Read counts from this CSV instead of simulating.
    #[arg(long, conflicts_with = "shots")]
    counts: Option<PathBuf>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    resamples: Option<usize>,
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Config { .. } | Error::Parse(_) | Error::Argument(_) => 2,
        Error::Contract(_)
        | Error::Construction(_)
        | Error::Reconstruction(_)
        | Error::ZeroProbability { .. } => 3,
        Error::Io { .. } => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Sweep(a) => cmd_sweep(a),
        Command::Classify(a) => cmd_classify(a),
        Command::Tomo(a) => cmd_tomo(a),
        Command::DumpMap(a) => cmd_dump_map(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qcausal: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

/// Config-file pairs followed by flag pairs, so flags win.
fn layered(
    config: Option<&Path>,
    flags: Vec<(&str, Option<String>)>,
) -> qcausal::Result<Vec<(String, String)>> {
    let mut pairs = match config {
        Some(path) => read_config_file(path)?,
        None => Vec::new(),
    };
    pairs.extend(
        flags
            .into_iter()
            .filter_map(|(k, v)| v.map(|v| (k.to_string(), v))),
    );
    Ok(pairs)
}

fn s<T: ToString>(v: &Option<T>) -> Option<String> {
    v.as_ref().map(T::to_string)
}

fn write_output(out: Option<&Path>, bytes: &[u8]) -> qcausal::Result<()> {
    match out {
        Some(path) => fs::write(path, bytes).map_err(|e| Error::Io {
            path: path.to_path_buf(),
            source: e,
        }),
        None => io::stdout().write_all(bytes).map_err(|e| Error::Io {
            path: "<stdout>".into(),
            source: e,
        }),
    }
}

fn to_json_bytes<T: Serialize>(value: &T) -> qcausal::Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| Error::Parse(e.to_string()))?;
    bytes.push(b'\n');
    Ok(bytes)
}

fn cmd_sweep(a: SweepArgs) -> qcausal::Result<()> {
    let mut flags = vec![
        ("family", a.family.clone()),
        ("theta", s(&a.theta)),
        ("p", s(&a.p)),
        ("q", s(&a.q)),
        ("tau_coh", s(&a.tau_coh)),
        ("eta", s(&a.eta)),
        ("steps", s(&a.steps)),
        ("epsilon", s(&a.epsilon)),
        ("shots", s(&a.shots)),
        ("seed", s(&a.seed)),
        ("output", a.out.as_ref().map(|p| p.display().to_string())),
        ("format", a.format.clone()),
    ];
    let mut grid_pairs = Vec::new();
    for g in &a.grid {
        let (param, spec) = g.split_once('=').ok_or_else(|| {
            Error::config("grid", format!("`{g}` must be param=start:stop:steps"))
        })?;
        grid_pairs.push((format!("grid.{}", param.trim()), spec.to_string()));
    }
    let mut pairs = layered(a.config.as_deref(), std::mem::take(&mut flags))?;
    pairs.extend(grid_pairs);
    let config = SweepConfig::from_pairs(pairs)?;
    let rows = run_sweep(&config)?;
    let mut buf = Vec::new();
    write_rows(&mut buf, &rows, config.format)?;
    write_output(config.output.as_deref(), &buf)
}

/// Resolved point-command settings.
struct PointSettings {
    point: FamilyPoint,
    values: BTreeMap<String, String>,
}

impl PointSettings {
    fn take_f64(&mut self, key: &str) -> qcausal::Result<Option<f64>> {
        self.values
            .remove(key)
            .map(|v| {
                v.parse()
                    .map_err(|_| Error::config(key, format!("`{v}` is not a number")))
            })
            .transpose()
    }

    fn take_u64(&mut self, key: &str) -> qcausal::Result<Option<u64>> {
        self.values
            .remove(key)
            .map(|v| {
                v.parse()
                    .map_err(|_| Error::config(key, format!("`{v}` is not an integer")))
            })
            .transpose()
    }

    fn take_path(&mut self, key: &str) -> Option<PathBuf> {
        self.values.remove(key).map(PathBuf::from)
    }

    fn finish(self) -> qcausal::Result<()> {
        match self.values.keys().next() {
            Some(k) => Err(Error::config(k, "unknown or inapplicable key")),
            None => Ok(()),
        }
    }
}

fn resolve_point(
    a: &PointArgs,
    extra: Vec<(&str, Option<String>)>,
) -> qcausal::Result<PointSettings> {
    let mut flags = vec![
        ("paradigm", s(&a.paradigm)),
        ("theta", s(&a.theta)),
        ("p", s(&a.p)),
        ("q", s(&a.q)),
        ("tau", s(&a.tau)),
        ("tau_coh", s(&a.tau_coh)),
        ("eta", s(&a.eta)),
        ("out", a.out.as_ref().map(|p| p.display().to_string())),
    ];
    flags.extend(extra);
    let mut values = BTreeMap::new();
    for (k, v) in layered(a.config.as_deref(), flags)? {
        values.insert(k.trim().replace('-', "_"), v);
    }
    let mut st = PointSettings {
        point: FamilyPoint::default(),
        values,
    };
    let base = match st.values.remove("paradigm") {
        Some(name) => name
            .parse::<Paradigm>()
            .map_err(|e| Error::config("paradigm", e.to_string()))?
            .point(),
        None => FamilyPoint {
            theta: FRAC_PI_2,
            ..Default::default()
        },
    };
    let theta = st.take_f64("theta")?;
    let p = st.take_f64("p")?;
    let q = st.take_f64("q")?;
    let tau = st.take_f64("tau")?;
    let tau_coh = st.take_f64("tau_coh")?;
    let eta = st.take_f64("eta")?;
    let q = match (tau, tau_coh) {
        (Some(t), Some(tc)) => {
            if q.is_some() {
                return Err(Error::config("q", "give either q or tau, not both"));
            }
            Some(q_from_delay(t, tc).map_err(|e| Error::config("tau", e.to_string()))?)
        }
        (Some(_), None) => return Err(Error::config("tau_coh", "tau needs tau_coh")),
        (None, _) => q,
    };
    st.point = FamilyPoint {
        theta: theta.unwrap_or(base.theta),
        p: p.unwrap_or(base.p),
        q: q.unwrap_or(base.q),
        eta: eta.unwrap_or(base.eta),
    };
    st.point
        .validate()
        .map_err(|e| Error::config("parameters", e.to_string()))?;
    Ok(st)
}

fn cmd_classify(a: ClassifyArgs) -> qcausal::Result<()> {
    let mut st = resolve_point(
        &a.point,
        vec![
            ("epsilon", s(&a.epsilon)),
            ("map", a.map.as_ref().map(|p| p.display().to_string())),
        ],
    )?;
    let epsilon = st.take_f64("epsilon")?.unwrap_or(DEFAULT_EPSILON);
    let map_path = st.take_path("map");
    let out = st.take_path("out");
    let point = st.point;
    st.finish()?;
    let map = match map_path {
        Some(path) => CausalMap::read_json(&path)?,
        None => point.build()?,
    };
    let report = classify(&map, epsilon).map_err(|e| match e {
        Error::Argument(m) => Error::config("epsilon", m),
        e => e,
    })?;
    write_output(out.as_deref(), &to_json_bytes(&report.to_json())?)
}

#[derive(Serialize)]
struct TomoReport {
    #[serde(flatten)]
    report: ReportJson,
    shots: Option<u64>,
    seed: u64,
    theta_hat: f64,
    theta_fit_residual: f64,
    frobenius_to_model: f64,
}

fn cmd_tomo(a: TomoArgs) -> qcausal::Result<()> {
    let mut st = resolve_point(
        &a.point,
        vec![
            ("epsilon", s(&a.epsilon)),
            ("shots", s(&a.shots)),
            ("seed", s(&a.seed)),
            ("resamples", s(&a.resamples)),
            ("counts", a.counts.as_ref().map(|p| p.display().to_string())),
        ],
    )?;
    let epsilon = st.take_f64("epsilon")?.unwrap_or(DEFAULT_EPSILON);
    let shots = st.take_u64("shots")?;
    let seed = st.take_u64("seed")?.unwrap_or(0);
    let resamples = st
        .take_u64("resamples")?
        .map_or(DEFAULT_RESAMPLES, |r| r as usize);
    let counts_in = st.take_path("counts");
    let out = st
        .take_path("out")
        .ok_or_else(|| Error::config("out", "tomo needs an output directory"))?;
    let point = st.point;
    st.finish()?;
    if shots == Some(0) {
        return Err(Error::config("shots", "must be positive"));
    }

    let model = point.build()?;
    let records = match (&counts_in, shots) {
        (Some(path), _) => read_counts_file(path)?,
        (None, Some(n)) => simulate_counts(&model, &pauli_grid(), n, seed)?,
        (None, None) => pseudo_counts(&model, &pauli_grid()),
    };
    let finite = counts_in.is_some() || shots.is_some();
    let opts = BootstrapOptions { resamples, seed };
    let report = classify_records(
        &records,
        epsilon,
        &SearchOptions::default(),
        finite.then_some(&opts),
    )?;
    let map = reconstruct(&records)?;
    let fit = fit_theta(FitTarget::Records(&records), &point)?;

    fs::create_dir_all(&out).map_err(|e| Error::Io {
        path: out.clone(),
        source: e,
    })?;
    write_counts_file(&out.join("counts.csv"), &records)?;
    map.write_json(&out.join("map.json"))?;
    let tomo = TomoReport {
        report: report.to_json(),
        shots,
        seed,
        theta_hat: fit.theta_hat,
        theta_fit_residual: fit.residual,
        frobenius_to_model: (map.tau() - model.tau()).frobenius_norm(),
    };
    write_output(Some(&out.join("report.json")), &to_json_bytes(&tomo)?)
}

fn cmd_dump_map(a: PointArgs) -> qcausal::Result<()> {
    let mut st = resolve_point(&a, Vec::new())?;
    let out = st.take_path("out");
    let point = st.point;
    st.finish()?;
    let map = point.build()?;
    write_output(out.as_deref(), &to_json_bytes(&map.to_json())?)
}
