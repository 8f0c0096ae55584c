//! `skewcirc`: densities, moments, sampling, Diophantine search and
//! identifiability probes for skewed circular and cylindrical families.

mod output;
mod params;

use std::f64::consts::{PI, TAU};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::Value;
use skewcirc::circular::Family;
use skewcirc::cylindrical::{
    conditional_ratio_probe, tau_limit_check, tau_limit_grid, CylProbeConfig,
};
use skewcirc::diophantine::{self, DiophantineQuery};
use skewcirc::probe::{check_base_conditions, probe_pair, ProbeConfig};

use output::{emit, envelope, to_json, Cell, Table};
use params::FamilyArg;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Numeric(String),
    #[error("{0}")]
    Io(String),
}

impl From<skewcirc::Error> for CliError {
    fn from(e: skewcirc::Error) -> Self {
        if e.is_validation() {
            CliError::Validation(e.to_string())
        } else {
            CliError::Numeric(e.to_string())
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MomentMethod {
    Closed,
    Quadrature,
}

#[derive(Debug, Args)]
struct Common {
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write to this file instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Parser)]
#[command(name = "skewcirc", version, about = "Skewed circular and cylindrical distributions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Circular density on an equispaced grid over [−π, π).
    Density {
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long, allow_hyphen_values = true)]
        params: String,
        #[arg(long, default_value_t = 64)]
        grid: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Trigonometric moments for p = 0..=p_max.
    Moments {
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long, allow_hyphen_values = true)]
        params: String,
        #[arg(long, default_value_t = 10)]
        p_max: i64,
        #[arg(long, value_enum, default_value_t = MomentMethod::Closed)]
        method: MomentMethod,
        #[command(flatten)]
        common: Common,
    },
    /// Mean resultant lengths with their logarithms.
    Mrl {
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long, allow_hyphen_values = true)]
        params: String,
        #[arg(long, default_value_t = 10)]
        p_max: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Random draws, angles in [0, 2π) for circular families and
    /// [−π, π) for cylindrical ones.
    Sample {
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long, allow_hyphen_values = true)]
        params: String,
        #[arg(long, default_value_t = 1000)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Orders p at which every p·cᵢ·π lies within ε of 2πℤ.
    Diophantine {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        coeffs: Vec<f64>,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        count: usize,
        #[arg(long, default_value_t = 10_000_000)]
        p_max: u64,
        /// Tighten the tolerance along the sequence.
        #[arg(long)]
        refining: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Separation certificate for two circular parameter vectors.
    Probe {
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long, allow_hyphen_values = true)]
        p1: String,
        #[arg(long, allow_hyphen_values = true)]
        p2: String,
        #[arg(long)]
        p_max: Option<u64>,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        count: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Base-moment identifiability conditions for a sine-skewed family.
    CheckConditions {
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long, value_delimiter = ',', required = true)]
        psi: Vec<f64>,
        #[arg(long, default_value_t = 200)]
        p_max: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Joint, conditional and marginal cylindrical densities on a grid.
    CylDensity {
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long, allow_hyphen_values = true)]
        params: String,
        #[arg(long, default_value_t = 16)]
        n_theta: usize,
        #[arg(long, default_value_t = 16)]
        n_x: usize,
        #[arg(long, default_value_t = 5.0)]
        x_max: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Separation certificate for two cylindrical parameter vectors.
    CylProbe {
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long, allow_hyphen_values = true)]
        p1: String,
        #[arg(long, allow_hyphen_values = true)]
        p2: String,
        #[command(flatten)]
        common: Common,
    },
    /// Sup distance between the Pareto-type density and its τ → 0 limit.
    TauLimit {
        /// sigma, delta, mu, kappa, lambda
        #[arg(long, allow_hyphen_values = true)]
        params: String,
        #[arg(long, value_delimiter = ',', default_value = "1e-2,1e-3,1e-4")]
        taus: Vec<f64>,
        #[arg(long, default_value_t = 50)]
        grid: usize,
        #[arg(long, default_value_t = 10.0)]
        x_max: f64,
        #[command(flatten)]
        common: Common,
    },
}

/// Rendered output plus, for partial results, the reason they are partial.
struct Artifact {
    text: String,
    incomplete: Option<String>,
}

impl Artifact {
    fn complete(text: String) -> Self {
        Artifact {
            text,
            incomplete: None,
        }
    }
}

fn positive(name: &str, n: usize) -> Result<(), CliError> {
    if n == 0 {
        return Err(CliError::Validation(format!("--{name} must be at least 1")));
    }
    Ok(())
}

fn circular_family(f: FamilyArg) -> Result<Family, CliError> {
    match f {
        FamilyArg::Sswc => Ok(Family::Sswc),
        FamilyArg::Ssvm => Ok(Family::Ssvm),
        FamilyArg::Mc => Ok(Family::Mc),
        _ => Err(CliError::Validation(format!(
            "family {} is cylindrical; this command takes sswc, ssvm or mc",
            f.name()
        ))),
    }
}

fn table_json(command: &str, family: Option<FamilyArg>, params: Value, table: &Table) -> String {
    let mut fields = Vec::new();
    if let Some(f) = family {
        fields.push(("family", Value::from(f.name())));
    }
    if !params.is_null() {
        fields.push(("params", params));
    }
    let body = table.to_json_value();
    fields.push(("columns", body["columns"].clone()));
    fields.push(("rows", body["rows"].clone()));
    envelope(command, fields)
}

fn render_table(
    format: Format,
    command: &str,
    family: Option<FamilyArg>,
    params: Value,
    table: &Table,
) -> String {
    match format {
        Format::Csv => table.to_csv(),
        Format::Json => table_json(command, family, params, table),
    }
}

fn run(cli: Cli) -> Result<(Artifact, Option<PathBuf>), CliError> {
    let (artifact, common) = match cli.command {
        Command::Density {
            family,
            params,
            grid,
            common,
        } => {
            positive("grid", grid)?;
            let m = params::circular(family, &params)?;
            let mut t = Table::new(&["theta", "density"]);
            for k in 0..grid {
                let theta = -PI + TAU * k as f64 / grid as f64;
                t.push(vec![Cell::Float(theta), Cell::Float(m.density(theta))]);
            }
            let f = common.format.unwrap_or(Format::Csv);
            (Artifact::complete(render_table(f, "density", Some(family), to_json(&m), &t)), common)
        }
        Command::Moments {
            family,
            params,
            p_max,
            method,
            common,
        } => {
            if p_max < 0 {
                return Err(CliError::Validation("--p-max must be nonnegative".into()));
            }
            let m = params::circular(family, &params)?;
            let mut t = Table::new(&["p", "alpha", "beta"]);
            for p in 0..=p_max {
                let mom = match method {
                    MomentMethod::Closed => m.trig_moment_closed(p)?,
                    MomentMethod::Quadrature => m.trig_moment_quadrature(p)?,
                };
                t.push(vec![Cell::Int(p), Cell::Float(mom.alpha), Cell::Float(mom.beta)]);
            }
            let f = common.format.unwrap_or(Format::Csv);
            (Artifact::complete(render_table(f, "moments", Some(family), to_json(&m), &t)), common)
        }
        Command::Mrl {
            family,
            params,
            p_max,
            common,
        } => {
            let m = params::circular(family, &params)?;
            let mut t = Table::new(&["p", "rho", "log_rho"]);
            for p in 0..=p_max {
                let e = m.mean_resultant_length(p)?;
                t.push(vec![Cell::Int(p as i64), Cell::Float(e.value), Cell::Float(e.log_value)]);
            }
            let f = common.format.unwrap_or(Format::Csv);
            (Artifact::complete(render_table(f, "mrl", Some(family), to_json(&m), &t)), common)
        }
        Command::Sample {
            family,
            params,
            count,
            seed,
            common,
        } => {
            positive("count", count)?;
            let (t, p) = if family.is_circular() {
                let m = params::circular(family, &params)?;
                let mut t = Table::new(&["theta"]);
                for theta in m.sample(count, seed)? {
                    t.push(vec![Cell::Float(theta)]);
                }
                (t, to_json(&m))
            } else {
                let m = params::cylindrical(family, &params)?;
                let mut t = Table::new(&["theta", "x"]);
                for (theta, x) in m.sample(count, seed)? {
                    t.push(vec![Cell::Float(theta), Cell::Float(x)]);
                }
                (t, to_json(&m.params))
            };
            let f = common.format.unwrap_or(Format::Csv);
            (Artifact::complete(render_table(f, "sample", Some(family), p, &t)), common)
        }
        Command::Diophantine {
            coeffs,
            eps,
            count,
            p_max,
            refining,
            common,
        } => {
            positive("count", count)?;
            let q = DiophantineQuery::new(coeffs.clone(), eps, p_max)?;
            let found = if refining {
                diophantine::find_refining_indices(&q, count)
            } else {
                diophantine::find_indices(&q, count)
            };
            let (indices, incomplete) = match found {
                Ok(seq) => (seq.indices, None),
                Err(skewcirc::Error::Exhausted {
                    found,
                    requested,
                    p_max,
                }) => {
                    let reason = format!(
                        "search exhausted at p = {p_max} with {} of {requested} indices found",
                        found.len()
                    );
                    (found, Some(reason))
                }
                Err(e) => return Err(e.into()),
            };
            let mut t = Table::new(&["p", "residual"]);
            for &p in &indices {
                t.push(vec![
                    Cell::Int(p as i64),
                    Cell::Float(diophantine::index_residual(p, &coeffs)),
                ]);
            }
            t.incomplete = incomplete.clone();
            let text = match common.format.unwrap_or(Format::Csv) {
                Format::Csv => t.to_csv(),
                Format::Json => {
                    let mut fields = vec![
                        ("coeffs", to_json(&coeffs)),
                        ("epsilon", to_json(&eps)),
                        ("p_max", Value::from(p_max)),
                        ("refining", Value::Bool(refining)),
                        ("incomplete", Value::Bool(incomplete.is_some())),
                    ];
                    let body = t.to_json_value();
                    fields.push(("columns", body["columns"].clone()));
                    fields.push(("rows", body["rows"].clone()));
                    envelope("diophantine", fields)
                }
            };
            (Artifact { text, incomplete }, common)
        }
        Command::Probe {
            family,
            p1,
            p2,
            p_max,
            eps,
            count,
            common,
        } => {
            let m1 = params::circular(family, &p1)?;
            let m2 = params::circular(family, &p2)?;
            let mut cfg = ProbeConfig::default();
            if let Some(p) = p_max {
                cfg.p_max = p;
            }
            if let Some(e) = eps {
                cfg.epsilon_dio = e;
            }
            if let Some(c) = count {
                cfg.dio_count = c;
                cfg.dio_count_max = cfg.dio_count_max.max(c);
            }
            let cert = probe_pair(&m1, &m2, &cfg)?;
            let text = match common.format.unwrap_or(Format::Json) {
                Format::Json => envelope(
                    "probe",
                    vec![
                        ("separating", Value::Bool(cert.is_separating())),
                        ("certificate", to_json(&cert)),
                    ],
                ),
                Format::Csv => {
                    let ev = &cert.evidence;
                    let mut t = Table::new(&["p", "log_magnitude", "phase"]);
                    for k in 0..ev.len() {
                        t.push(vec![
                            Cell::Int(ev.indices[k] as i64),
                            Cell::Float(ev.log_magnitude[k]),
                            Cell::Float(ev.phase[k]),
                        ]);
                    }
                    t.to_csv()
                }
            };
            (Artifact::complete(text), common)
        }
        Command::CheckConditions {
            family,
            psi,
            p_max,
            common,
        } => {
            let fam = circular_family(family)?;
            let pairs: Vec<(f64, f64)> = (0..psi.len())
                .flat_map(|i| (i + 1..psi.len()).map(move |j| (i, j)))
                .map(|(i, j)| (psi[i], psi[j]))
                .collect();
            let report = check_base_conditions(fam, &psi, &pairs, p_max)?;
            let text = match common.format.unwrap_or(Format::Json) {
                Format::Json => envelope("check-conditions", vec![("report", to_json(&report))]),
                Format::Csv => {
                    let mut t = Table::new(&[
                        "psi",
                        "alpha_01",
                        "cond_i",
                        "cond_ii_inf",
                        "cond_ii_inf_at",
                        "cond_ii_bound",
                        "cond_ii",
                        "cond_iii_exponent",
                        "cond_iii_residual",
                    ]);
                    for c in &report.psi {
                        t.push(vec![
                            Cell::Float(c.psi),
                            Cell::Float(c.alpha_01),
                            Cell::Bool(c.cond_i),
                            Cell::Float(c.cond_ii_inf),
                            Cell::Int(c.cond_ii_inf_at as i64),
                            Cell::Float(c.cond_ii_bound),
                            Cell::Bool(c.cond_ii),
                            Cell::Float(c.cond_iii_exponent),
                            Cell::Float(c.cond_iii_residual),
                        ]);
                    }
                    t.to_csv()
                }
            };
            (Artifact::complete(text), common)
        }
        Command::CylDensity {
            family,
            params,
            n_theta,
            n_x,
            x_max,
            common,
        } => {
            positive("n-theta", n_theta)?;
            positive("n-x", n_x)?;
            if !(x_max > 0.0 && x_max.is_finite()) {
                return Err(CliError::Validation("--x-max must be positive and finite".into()));
            }
            let m = params::cylindrical(family, &params)?;
            let mut t = Table::new(&["theta", "x", "joint", "conditional", "marginal"]);
            for i in 0..n_theta {
                let theta = -PI + TAU * i as f64 / n_theta as f64;
                let marginal = m.marginal_theta_density(theta)?;
                for j in 1..=n_x {
                    let x = x_max * j as f64 / n_x as f64;
                    t.push(vec![
                        Cell::Float(theta),
                        Cell::Float(x),
                        Cell::Float(m.joint_density(theta, x)?),
                        Cell::Float(m.conditional_x_density(theta, x)?),
                        Cell::Float(marginal),
                    ]);
                }
            }
            let f = common.format.unwrap_or(Format::Csv);
            let p = to_json(&m);
            (Artifact::complete(render_table(f, "cyl-density", Some(family), p, &t)), common)
        }
        Command::CylProbe {
            family,
            p1,
            p2,
            common,
        } => {
            let m1 = params::cylindrical(family, &p1)?;
            let m2 = params::cylindrical(family, &p2)?;
            let cert = conditional_ratio_probe(&m1, &m2, &CylProbeConfig::default())?;
            let text = match common.format.unwrap_or(Format::Json) {
                Format::Json => envelope(
                    "cyl-probe",
                    vec![
                        ("separating", Value::Bool(cert.is_separating())),
                        ("certificate", to_json(&cert)),
                    ],
                ),
                Format::Csv => {
                    let mut t = Table::new(&["log_x", "log_ratio"]);
                    if let Some(ev) = &cert.evidence {
                        for (&lx, &lr) in ev.log_x.iter().zip(&ev.log_ratio) {
                            t.push(vec![Cell::Float(lx), Cell::Float(lr)]);
                        }
                    }
                    t.to_csv()
                }
            };
            (Artifact::complete(text), common)
        }
        Command::TauLimit {
            params,
            taus,
            grid,
            x_max,
            common,
        } => {
            positive("grid", grid)?;
            if !(x_max > 0.0 && x_max.is_finite()) {
                return Err(CliError::Validation("--x-max must be positive and finite".into()));
            }
            if taus.is_empty() {
                return Err(CliError::Validation("--taus needs at least one value".into()));
            }
            let base = params::pareto_without_tau(&params)?;
            let points = tau_limit_grid(grid, grid, x_max);
            let mut t = Table::new(&["tau", "sup_difference", "ratio_to_previous"]);
            let mut previous: Option<f64> = None;
            for &tau in &taus {
                let gp = params::pareto(base, tau)?;
                let d = tau_limit_check(&gp, &points)?;
                let ratio = previous.map_or(f64::NAN, |p| p / d);
                t.push(vec![Cell::Float(tau), Cell::Float(d), Cell::Float(ratio)]);
                previous = Some(d);
            }
            let f = common.format.unwrap_or(Format::Csv);
            let p = to_json(&base);
            (Artifact::complete(render_table(f, "tau-limit", None, p, &t)), common)
        }
    };
    Ok((artifact, common.out))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok((artifact, out)) => {
            if let Err(e) = emit(&artifact.text, out.as_deref()) {
                eprintln!("error: {e}");
                return ExitCode::from(e.exit_code());
            }
            match artifact.incomplete {
                Some(reason) => {
                    eprintln!("error: {reason}");
                    ExitCode::from(3)
                }
                None => ExitCode::SUCCESS,
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
