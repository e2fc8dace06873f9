//! Command-line front end: single-case analysis, mass-grid sweeps,
//! periodic-orbit continuation, closed-form oracle evaluation and resonance
//! scans. A run is reproducible from its JSON config alone; every flag
//! mirrors a config field and overrides it.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use nalgebra::DVector;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{self, ConfigRequest};
use crate::dynamics::{
    self, continue_family, linear_mode, reconstruct_theta, shoot_periodic, Family, PolyField,
    ReducedField, ShootingControl, VectorField,
};
use crate::error::{Error, Result};
use crate::normal_form;
use crate::reduced::ReducedDynamics;
use crate::report::{self, fmt_f64};
use crate::resonance;

#[derive(Parser, Debug)]
#[command(name = "relequi", version, about = "Birkhoff normal forms and periodic orbits near relative equilibria of the planar N-body problem", disable_help_subcommand = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Solve one configuration, normalize it and write the verdict reports.
    Analyze(AnalyzeArgs),
    /// Sweep a (beta, m1) grid of Lagrange points into a CSV table.
    Sweep(SweepArgs),
    /// Locate and continue periodic-orbit families by shooting.
    Orbits(OrbitsArgs),
    /// Evaluate the closed-form oracles only (no series computation).
    Oracle(OracleArgs),
    /// Scan a frequency vector for integer relations.
    Scan(ScanArgs),
}

#[derive(Args, Debug, Default, Clone, Serialize, Deserialize)]
pub struct AnalyzeArgs {
    /// JSON config; explicit flags override its fields.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Configuration kind: lagrange | euler3 | collinear.
    #[arg(long)]
    pub kind: Option<String>,
    /// Masses, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub masses: Option<Vec<f64>>,
    /// Lagrange (beta, m1) parameterization.
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub m1: Option<f64>,
    /// Line ordering for euler3, e.g. 0,1,2.
    #[arg(long, value_delimiter = ',')]
    pub ordering: Option<Vec<usize>>,
    /// Output directory for the report files.
    #[arg(long, default_value = "relequi-out")]
    #[serde(default)]
    pub out: PathBuf,
}

#[derive(Args, Debug, Default, Clone, Serialize, Deserialize)]
pub struct SweepArgs {
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub beta_min: Option<f64>,
    #[arg(long)]
    pub beta_max: Option<f64>,
    #[arg(long)]
    pub beta_steps: Option<usize>,
    #[arg(long)]
    pub m1_min: Option<f64>,
    #[arg(long)]
    pub m1_max: Option<f64>,
    #[arg(long)]
    pub m1_steps: Option<usize>,
    /// Output CSV path.
    #[arg(long, default_value = "sweep.csv")]
    #[serde(default = "default_sweep_out")]
    pub out: PathBuf,
}

fn default_sweep_out() -> PathBuf {
    "sweep.csv".into()
}

#[derive(Args, Debug, Default, Clone, Serialize, Deserialize)]
pub struct OrbitsArgs {
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub kind: Option<String>,
    #[arg(long, value_delimiter = ',')]
    pub masses: Option<Vec<f64>>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub m1: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    pub ordering: Option<Vec<usize>>,
    /// Family: trivial | lyapunov<k> | weinstein<k> with k the elliptic
    /// mode index (1-based, omega_0 excluded).
    #[arg(long)]
    pub family: Option<String>,
    /// Field to shoot on: reduced (exact) | poly (degree-4 Hamiltonian).
    #[arg(long)]
    pub field: Option<String>,
    /// Smallest amplitude of the branch.
    #[arg(long)]
    pub amplitude: Option<f64>,
    /// Number of continuation steps beyond the seed.
    #[arg(long)]
    pub steps: Option<usize>,
    /// Amplitude increment per continuation step.
    #[arg(long)]
    pub d_amplitude: Option<f64>,
    #[arg(long, default_value = "orbits-out")]
    #[serde(default = "default_orbits_out")]
    pub out: PathBuf,
}

fn default_orbits_out() -> PathBuf {
    "orbits-out".into()
}

#[derive(Args, Debug, Default, Clone, Serialize, Deserialize)]
pub struct OracleArgs {
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Which oracle: lagrange | euler-block | ak.
    #[arg(long)]
    pub what: Option<String>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub m1: Option<f64>,
    #[arg(long)]
    pub iota: Option<f64>,
    #[arg(long)]
    pub c_ring: Option<f64>,
    #[arg(long)]
    pub n_max: Option<usize>,
}

#[derive(Args, Debug, Default, Clone, Serialize, Deserialize)]
pub struct ScanArgs {
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    pub freqs: Option<Vec<f64>>,
    #[arg(long)]
    pub order: Option<u32>,
    #[arg(long)]
    pub tol: Option<f64>,
    /// Also estimate the Diophantine (c, upsilon) fit up to this order.
    #[arg(long)]
    pub fit_order: Option<u32>,
}

fn merge_config<T: for<'de> Deserialize<'de> + Serialize>(
    path: &Option<PathBuf>,
    cli_value: T,
) -> Result<T> {
    let Some(path) = path else {
        return Ok(cli_value);
    };
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Usage(format!("cannot read config {}: {e}", path.display())))?;
    let mut file_value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| Error::Usage(format!("config is not valid JSON: {e}")))?;
    let cli_json = serde_json::to_value(&cli_value).expect("args serialize");
    // CLI flags that were actually set override the file
    if let (Some(file_map), Some(cli_map)) = (file_value.as_object_mut(), cli_json.as_object()) {
        for (k, v) in cli_map {
            if !v.is_null() {
                file_map.insert(k.clone(), v.clone());
            }
        }
    }
    serde_json::from_value(file_value).map_err(|e| Error::Usage(format!("bad config: {e}")))
}

fn request_from(
    kind: &Option<String>,
    masses: &Option<Vec<f64>>,
    beta: Option<f64>,
    m1: Option<f64>,
    ordering: &Option<Vec<usize>>,
) -> Result<ConfigRequest> {
    let kind = kind
        .as_deref()
        .ok_or_else(|| Error::Usage("--kind is required (lagrange | euler3 | collinear)".into()))?;
    match kind {
        "lagrange" => {
            if let (Some(beta), Some(m1)) = (beta, m1) {
                Ok(ConfigRequest::Lagrange { beta, m1 })
            } else if let Some(ms) = masses {
                Ok(ConfigRequest::LagrangeMasses { masses: ms.clone() })
            } else {
                Err(Error::Usage(
                    "lagrange needs --beta and --m1, or --masses".into(),
                ))
            }
        }
        "euler3" => {
            let ms = masses
                .clone()
                .ok_or_else(|| Error::Usage("euler3 needs --masses".into()))?;
            let ord = match ordering {
                Some(o) if o.len() == 3 => [o[0], o[1], o[2]],
                Some(_) => return Err(Error::Usage("--ordering must have 3 entries".into())),
                None => [0, 1, 2],
            };
            Ok(ConfigRequest::Euler3 {
                masses: ms,
                ordering: ord,
            })
        }
        "collinear" => {
            let ms = masses
                .clone()
                .ok_or_else(|| Error::Usage("collinear needs --masses".into()))?;
            Ok(ConfigRequest::Collinear { masses: ms })
        }
        other => Err(Error::Usage(format!("unknown kind '{other}'"))),
    }
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<()> {
    fs::create_dir_all(dir)
        .map_err(|e| Error::Usage(format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join(name);
    fs::write(&path, contents)
        .map_err(|e| Error::Usage(format!("cannot write {}: {e}", path.display())))?;
    Ok(())
}

/// `analyze`: run the pipeline, write CentralConfig, FrequencyData,
/// NormalForm and ResonanceReport files plus a one-object summary.
pub fn cmd_analyze(args: AnalyzeArgs) -> Result<()> {
    let args = merge_config(&args.config.clone(), args)?;
    let req = request_from(&args.kind, &args.masses, args.beta, args.m1, &args.ordering)?;
    let rep = analysis::analyze(&req)?;
    write_file(&args.out, "config.json", &report::to_json(&rep.config))?;
    write_file(
        &args.out,
        "frequencies.json",
        &report::to_json(&rep.frequencies),
    )?;
    write_file(
        &args.out,
        "resonance.json",
        &report::to_json(&rep.resonance),
    )?;
    write_file(&args.out, "analysis.json", &report::to_json(&rep))?;
    println!(
        "nondegenerate: {} (det = {})",
        rep.nondegenerate,
        fmt_f64(rep.det_center)
    );
    println!(
        "nonresonant up to order {}: {} (min divisor = {})",
        rep.resonance.order_checked,
        rep.resonance.offending.is_empty(),
        fmt_f64(rep.resonance.min_divisor)
    );
    Ok(())
}

#[derive(Serialize)]
struct SweepRow {
    beta: f64,
    m1: f64,
    ok: bool,
    note: String,
    w0: f64,
    w1: f64,
    w2: f64,
    det_center: f64,
    min_divisor: f64,
    nondegenerate: bool,
}

/// `sweep`: one CSV row per accepted grid point, failures recorded in-row.
pub fn cmd_sweep(args: SweepArgs) -> Result<()> {
    let args = merge_config(&args.config.clone(), args)?;
    let beta_min = args.beta_min.unwrap_or(0.001);
    let beta_max = args.beta_max.unwrap_or(1.0 / 27.0 - 1e-4);
    let nb = args.beta_steps.unwrap_or(20);
    let m1_min = args.m1_min.unwrap_or(0.962);
    let m1_max = args.m1_max.unwrap_or(0.999);
    let nm = args.m1_steps.unwrap_or(20);
    if nb < 1 || nm < 1 {
        return Err(Error::Usage("grid needs at least one point per axis".into()));
    }
    let mut points = Vec::new();
    for i in 0..nb {
        for j in 0..nm {
            let beta = beta_min + (beta_max - beta_min) * i as f64 / (nb.max(2) - 1).max(1) as f64;
            let m1 = m1_min + (m1_max - m1_min) * j as f64 / (nm.max(2) - 1).max(1) as f64;
            points.push((beta, m1));
        }
    }
    // keep only points that parameterize genuine masses
    points.retain(|&(beta, m1)| resonance::omega_ps_membership(beta, m1));
    let rows: Vec<SweepRow> = points
        .par_iter()
        .map(|&(beta, m1)| match analysis::analyze(&ConfigRequest::Lagrange { beta, m1 }) {
            Ok(rep) => SweepRow {
                beta,
                m1,
                ok: true,
                note: String::new(),
                w0: rep.frequencies.omega0.unwrap_or(f64::NAN),
                w1: rep.frequencies.elliptic.first().copied().unwrap_or(f64::NAN),
                w2: rep.frequencies.elliptic.get(1).copied().unwrap_or(f64::NAN),
                det_center: rep.det_center,
                min_divisor: rep.resonance.min_divisor,
                nondegenerate: rep.nondegenerate,
            },
            Err(e) => SweepRow {
                beta,
                m1,
                ok: false,
                note: format!("{e}").replace(',', ";"),
                w0: f64::NAN,
                w1: f64::NAN,
                w2: f64::NAN,
                det_center: f64::NAN,
                min_divisor: f64::NAN,
                nondegenerate: false,
            },
        })
        .collect();
    let mut out = String::from("beta,m1,ok,note,w0,w1,w2,det_center,min_divisor,nondegenerate\n");
    for r in &rows {
        out.push_str(&report::csv_line(&[
            fmt_f64(r.beta),
            fmt_f64(r.m1),
            r.ok.to_string(),
            r.note.clone(),
            fmt_f64(r.w0),
            fmt_f64(r.w1),
            fmt_f64(r.w2),
            fmt_f64(r.det_center),
            fmt_f64(r.min_divisor),
            r.nondegenerate.to_string(),
        ]));
        out.push('\n');
    }
    if let Some(dir) = args.out.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir)
                .map_err(|e| Error::Usage(format!("cannot create {}: {e}", dir.display())))?;
        }
    }
    fs::write(&args.out, out)
        .map_err(|e| Error::Usage(format!("cannot write {}: {e}", args.out.display())))?;
    println!("{} rows -> {}", rows.len(), args.out.display());
    Ok(())
}

fn parse_family(s: &str) -> Result<(Family, usize)> {
    if s == "trivial" {
        return Ok((Family::Trivial, 0));
    }
    if let Some(k) = s.strip_prefix("lyapunov") {
        let k: usize = k
            .parse()
            .map_err(|_| Error::Usage(format!("bad family index in '{s}'")))?;
        return Ok((Family::Lyapunov(k), k));
    }
    if let Some(k) = s.strip_prefix("weinstein") {
        let k: usize = k
            .parse()
            .map_err(|_| Error::Usage(format!("bad family index in '{s}'")))?;
        return Ok((Family::Weinstein(k), k));
    }
    Err(Error::Usage(format!(
        "unknown family '{s}' (trivial | lyapunov<k> | weinstein<k>)"
    )))
}

/// `orbits`: seed a family from linear theory, shoot, continue, and write a
/// JSON-lines archive plus a plot-data CSV.
pub fn cmd_orbits(args: OrbitsArgs) -> Result<()> {
    let args = merge_config(&args.config.clone(), args)?;
    let req = request_from(&args.kind, &args.masses, args.beta, args.m1, &args.ordering)?;
    let family_str = args
        .family
        .clone()
        .ok_or_else(|| Error::Usage("--family is required".into()))?;
    let (family, mode_idx) = parse_family(&family_str)?;
    let amplitude = args.amplitude.unwrap_or(1e-3);
    let steps = args.steps.unwrap_or(10);
    let d_amp = args.d_amplitude.unwrap_or(amplitude);

    let p = analysis::run_pipeline(&req)?;
    let dynamics = ReducedDynamics::new(&p.masses, &p.config)?;
    let use_poly = matches!(args.field.as_deref(), Some("poly"));
    let poly_field;
    let reduced_field;
    let field: &dyn VectorField = if use_poly {
        poly_field = PolyField::new(&p.expansion);
        &poly_field
    } else {
        reduced_field = ReducedField(dynamics.clone());
        &reduced_field
    };
    let eq = if use_poly {
        DVector::zeros(field.dim())
    } else {
        dynamics.equilibrium()
    };

    // target frequency: mode 0 = radial, k >= 1 the k-th elliptic shape mode
    let mut elliptic: Vec<f64> = p
        .chart
        .pairs
        .iter()
        .filter(|pk| pk.is_elliptic())
        .map(|pk| pk.frequency().abs())
        .collect();
    let w0 = elliptic.remove(0);
    let target = match (&family, mode_idx) {
        (Family::Trivial, _) => w0,
        (_, 0) => w0,
        (_, k) => *elliptic.get(k - 1).ok_or_else(|| {
            Error::Usage(format!(
                "family index {k} exceeds the {} elliptic shape modes",
                elliptic.len()
            ))
        })?,
    };

    let (re, _im, w) = linear_mode(field, &eq, target)?;
    let mut ctrl = ShootingControl::default();
    ctrl.step.h_init = 0.05 / w;
    ctrl.step.h_max = 0.5 / w;
    let guess = &eq + &re * amplitude;
    let seed = shoot_periodic(
        field,
        &guess,
        2.0 * std::f64::consts::PI / w,
        &eq,
        &re,
        amplitude,
        family.clone(),
        &ctrl,
    )?;
    let mut branch = continue_family(field, &seed, &eq, &re, steps, d_amp, &ctrl)?;

    // frame rotation per period for reduced-dynamics orbits
    if !use_poly {
        for orbit in &mut branch {
            let s0 = DVector::from_column_slice(&orbit.state0);
            let (path, _) =
                dynamics::integrate_path(field, &s0, orbit.period, &ctrl.step, true)?;
            orbit.delta_theta = Some(reconstruct_theta(&dynamics, &path));
        }
    }

    let mut jsonl = String::new();
    let mut csv = String::from("amplitude,period,energy,max_multiplier\n");
    for orbit in &branch {
        jsonl.push_str(&report::to_json(orbit).replace('\n', "").replace("  ", ""));
        jsonl.push('\n');
        let maxmul = orbit
            .floquet
            .iter()
            .map(|(re, im)| re.hypot(*im))
            .fold(0.0f64, f64::max);
        csv.push_str(&report::csv_line(&[
            fmt_f64(orbit.amplitude),
            fmt_f64(orbit.period),
            fmt_f64(orbit.energy),
            fmt_f64(maxmul),
        ]));
        csv.push('\n');
    }
    write_file(&args.out, "orbits.jsonl", &jsonl)?;
    write_file(&args.out, "orbits.csv", &csv)?;
    println!(
        "{} orbits on the {family_str} branch -> {}",
        branch.len(),
        args.out.display()
    );
    Ok(())
}

/// `oracle`: closed-form evaluation only.
pub fn cmd_oracle(args: OracleArgs) -> Result<()> {
    let args = merge_config(&args.config.clone(), args)?;
    match args.what.as_deref() {
        Some("lagrange") => {
            let beta = args.beta.ok_or_else(|| Error::Usage("--beta".into()))?;
            let m1 = args.m1.ok_or_else(|| Error::Usage("--m1".into()))?;
            let o = normal_form::oracle_lagrange(beta, m1)?;
            println!("{}", report::to_json(&o));
        }
        Some("euler-block") => {
            let iota = args.iota.ok_or_else(|| Error::Usage("--iota".into()))?;
            let c = args.c_ring.ok_or_else(|| Error::Usage("--c-ring".into()))?;
            let o = normal_form::oracle_euler_block(iota, c)?;
            println!("{}", report::to_json(&o));
        }
        Some("ak") => {
            let n = args.n_max.unwrap_or(12);
            let rep = resonance::verify_ak_nonresonant(n)?;
            println!("{}", report::to_json(&rep));
        }
        other => {
            return Err(Error::Usage(format!(
                "--what must be lagrange | euler-block | ak, got {other:?}"
            )))
        }
    }
    Ok(())
}

/// `scan`: resonance scan of an explicit frequency vector.
pub fn cmd_scan(args: ScanArgs) -> Result<()> {
    let args = merge_config(&args.config.clone(), args)?;
    let freqs = args
        .freqs
        .clone()
        .ok_or_else(|| Error::Usage("--freqs is required".into()))?;
    let order = args.order.unwrap_or(4);
    let wmax = freqs.iter().map(|w| w.abs()).fold(0.0f64, f64::max);
    let tol = args.tol.unwrap_or(1e-9 * wmax);
    let mut rep = resonance::scan(&freqs, order, tol)?;
    if let Some(fit_order) = args.fit_order {
        rep.diophantine_fit = resonance::diophantine_fit(&freqs, fit_order).ok();
    }
    println!("{}", report::to_json(&rep));
    Ok(())
}

/// Entry point used by the binary; returns a process exit code.
pub fn run() -> i32 {
    // worker pool size from the environment
    if let Ok(threads) = std::env::var("RELEQUI_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // clap help/version go to stdout with code 0
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 64,
            };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.command {
        Command::Analyze(a) => cmd_analyze(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Orbits(a) => cmd_orbits(a),
        Command::Oracle(a) => cmd_oracle(a),
        Command::Scan(a) => cmd_scan(a),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
