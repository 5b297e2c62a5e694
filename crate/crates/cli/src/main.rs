//! Command-line surface: parse instance files, run pipelines, emit reports.
//!
//! Exit codes: 0 ok, 2 parse/validation, 3 numerical failure,
//! 4 missing or inexact descriptors.

mod suite;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use drsplit_core::error::Error;
use drsplit_core::ranges;
use drsplit_core::schema::{InstanceFile, OutputKind};
use drsplit_core::splitting::{estimate_v, EstimateVerdict, MembershipVerdict};

#[derive(Parser)]
#[command(
    name = "drsplit",
    version,
    about = "Douglas-Rachford splitting runs and displacement diagnostics on instance files"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Iterate the splitting operator; writes trace.csv and summary.json
    Run {
        file: PathBuf,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Displacement decomposition report: v, v_D, v_R, condition, defects
    Diagnose {
        file: PathBuf,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Probe membership of a point in the closure of ran(Id - T);
    /// W is comma-separated coordinates, e.g. "-3,0"
    Probe {
        file: PathBuf,
        #[arg(allow_hyphen_values = true)]
        w: String,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Run the built-in regression suite over the catalog examples
    VerifyExamples {
        /// Inject a gamma mismatch into the rotator pair (negative control)
        #[arg(long, hide = true)]
        perturb: bool,
    },
}

#[derive(Args)]
struct CommonArgs {
    /// Output directory for generated files
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Override the instance file's step count
    #[arg(long)]
    steps: Option<usize>,
    /// Override the instance file's convergence tolerance
    #[arg(long)]
    tol: Option<f64>,
    /// Override the instance file's seed
    #[arg(long)]
    seed: Option<u64>,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::InvalidInstance(_)
            | Error::Construction(_)
            | Error::DimensionMismatch { .. }
            | Error::NotACone(_)
            | Error::TraceTooShort { .. } => 2,
            Error::NumericalBreakdown { .. }
            | Error::InternalInconsistency { .. }
            | Error::NotConverged { .. }
            | Error::Operator(_) => 3,
            Error::DescriptorMissing(_)
            | Error::InexactRangePair
            | Error::NoSufficientCondition(_) => 4,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn read_instance(path: &Path, common: &CommonArgs) -> Result<InstanceFile, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure {
        code: 2,
        message: format!("cannot read {}: {e}", path.display()),
    })?;
    let mut file = InstanceFile::parse(&text)?;
    if let Some(steps) = common.steps {
        file.run.steps = steps;
    }
    if let Some(tol) = common.tol {
        file.run.tol = tol;
    }
    if let Some(seed) = common.seed {
        file.run.seed = seed;
    }
    Ok(file)
}

fn write_out(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, Failure> {
    fs::create_dir_all(dir).map_err(|e| Failure {
        code: 1,
        message: format!("cannot create {}: {e}", dir.display()),
    })?;
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| Failure {
        code: 1,
        message: format!("cannot write {}: {e}", path.display()),
    })?;
    Ok(path)
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable reports");
    s.push('\n');
    s
}

#[derive(Serialize)]
struct VSummary {
    difference: Vec<f64>,
    cesaro: Vec<f64>,
    gap: f64,
    verdict: EstimateVerdict,
}

#[derive(Serialize)]
struct RunSummary {
    schema: u32,
    dim: usize,
    steps: usize,
    converged: bool,
    fixed_point_residual: f64,
    v: VSummary,
    x_final: Vec<f64>,
}

fn cmd_run(path: &Path, common: &CommonArgs) -> Result<(), Failure> {
    let file = read_instance(path, common)?;
    let built = file.build()?;
    let inst = built.instance();
    let x0 = file.x0(inst.dim())?;
    let trace = inst.iterate(&x0, file.run.steps)?;
    let est = estimate_v(&trace, file.run.agree_tol)?;
    let residual = *trace.diff_norms.last().expect("steps >= 1");

    let summary = RunSummary {
        schema: 1,
        dim: inst.dim(),
        steps: trace.step_count,
        converged: residual <= file.run.tol,
        fixed_point_residual: residual,
        v: VSummary {
            difference: est.difference.as_slice().to_vec(),
            cesaro: est.cesaro.as_slice().to_vec(),
            gap: est.gap,
            verdict: est.verdict,
        },
        x_final: trace.governing[trace.step_count].as_slice().to_vec(),
    };

    let wanted = |kind: OutputKind| {
        file.outputs
            .as_ref()
            .map(|o| o.contains(&kind))
            .unwrap_or(true)
    };
    if wanted(OutputKind::Trace) {
        let mut csv = String::new();
        let d = inst.dim();
        csv.push_str("step");
        for i in 0..d {
            csv.push_str(&format!(",x{i}"));
        }
        for i in 0..d {
            csv.push_str(&format!(",shadowA{i}"));
        }
        csv.push_str(",diff_norm\n");
        for n in 0..=trace.step_count {
            csv.push_str(&n.to_string());
            for i in 0..d {
                csv.push_str(&format!(",{}", trace.governing[n][i]));
            }
            for i in 0..d {
                csv.push_str(&format!(",{}", trace.shadow_a[n][i]));
            }
            if n < trace.step_count {
                csv.push_str(&format!(",{}", trace.diff_norms[n]));
            } else {
                csv.push(',');
            }
            csv.push('\n');
        }
        write_out(&common.out, "trace.csv", &csv)?;
    }
    let json = to_json(&summary);
    if wanted(OutputKind::Summary) {
        write_out(&common.out, "summary.json", &json)?;
    }
    print!("{json}");
    Ok(())
}

fn cmd_diagnose(path: &Path, common: &CommonArgs) -> Result<(), Failure> {
    let file = read_instance(path, common)?;
    let built = file.build()?;
    let inst = built.instance();
    let x0 = file.x0(inst.dim())?;
    let report = ranges::diagnose(inst, &x0, file.run.steps, file.run.agree_tol)?;
    let json = to_json(&report);
    write_out(&common.out, "report.json", &json)?;
    print!("{json}");
    Ok(())
}

#[derive(Serialize)]
struct ProbeReport {
    schema: u32,
    w: Vec<f64>,
    n_schedule: Vec<u64>,
    iterate_norms: Vec<f64>,
    scaled_norms: Vec<f64>,
    stage_converged: Vec<bool>,
    verdict: MembershipVerdict,
    residual_estimate: Vec<f64>,
}

fn cmd_probe(path: &Path, w_text: &str, common: &CommonArgs) -> Result<(), Failure> {
    let file = read_instance(path, common)?;
    let built = file.build()?;
    let inst = built.instance();
    let w_vals: Vec<f64> = w_text
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| Failure {
            code: 2,
            message: format!("cannot parse probe point {w_text:?}: {e}"),
        })?;
    if w_vals.len() != inst.dim() {
        return Err(Failure {
            code: 2,
            message: format!(
                "probe point has {} coordinates, instance dimension is {}",
                w_vals.len(),
                inst.dim()
            ),
        });
    }
    let w = nalgebra::DVector::from_row_slice(&w_vals);
    let result = inst.probe_range_membership(&w, &file.run.probe_params())?;
    let report = ProbeReport {
        schema: 1,
        w: w_vals,
        n_schedule: result.n_schedule,
        iterate_norms: result.iterate_norms,
        scaled_norms: result.scaled_norms,
        stage_converged: result.stage_converged,
        verdict: result.verdict,
        residual_estimate: result.residual_estimate.as_slice().to_vec(),
    };
    let json = to_json(&report);
    write_out(&common.out, "probe.json", &json)?;
    print!("{json}");
    Ok(())
}

fn cmd_verify_examples(perturb: bool) -> Result<(), Failure> {
    let rows = suite::run_suite(perturb);
    let mut all_pass = true;
    println!(
        "{:<34} {:>12} {:>9}  status",
        "example", "max defect", "tol"
    );
    for row in &rows {
        let pass = row.defect <= row.tol;
        all_pass &= pass;
        println!(
            "{:<34} {:>12.3e} {:>9.1e}  {}",
            row.name,
            row.defect,
            row.tol,
            if pass { "PASS" } else { "FAIL" }
        );
    }
    if all_pass {
        Ok(())
    } else {
        Err(Failure {
            code: 1,
            message: "regression suite failed".into(),
        })
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run { file, common } => cmd_run(file, common),
        Command::Diagnose { file, common } => cmd_diagnose(file, common),
        Command::Probe { file, w, common } => cmd_probe(file, w, common),
        Command::VerifyExamples { perturb } => cmd_verify_examples(*perturb),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
