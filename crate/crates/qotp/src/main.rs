//! Command-line front end: state-file ingestion, subcommand dispatch, and
//! human- plus machine-readable reports.
//!
//! Exit codes: 0 on success with all bound checks passing, 1 on input or
//! validation errors, 2 when a bound check fails.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use qotp::bounds::{asymptotic_schedule, capacity_report, AsymptoticPoint, CapacityReport};
use qotp::classical::{classical_capacity_report, ClassicalCapacityReport};
use qotp::error::Result;
use qotp::functionals::{mutual_information, von_neumann_entropy};
use qotp::matcore::Subsystem;
use qotp::scramble::{
    averaged_state, block_decompose, build_ensemble, enumerate_average, verify_privacy,
    PrivacyReport,
};
use qotp::statefile::StateFile;
use qotp::tol;

#[derive(Parser)]
#[command(
    name = "qotp",
    version,
    about = "Quantum one-time pad laboratory: capacity, scrambling and bounds for bipartite keys"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Emit the report as JSON instead of text.
    #[arg(long, global = true)]
    json: bool,

    /// Relative tolerance for grouping near-degenerate eigenvalues of the A
    /// marginal; changes the block count and therefore the lower bound.
    #[arg(long, global = true, default_value_t = tol::GROUPING_DEFAULT)]
    grouping_tol: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Full capacity analysis of a bipartite key with bound checks.
    Analyze { path: PathBuf },
    /// Scrambling-ensemble synthesis and privacy audit.
    Scramble {
        path: PathBuf,
        /// Also brute-force the ensemble average and report the deviation
        /// from the sequential twirl (refused for more than 10^6 members).
        #[arg(long)]
        enumerate: bool,
        /// How many ensemble members the privacy audit samples.
        #[arg(long, default_value_t = 128)]
        sample: usize,
    },
    /// Per-copy rate schedule for using n copies of the key jointly.
    Asympt {
        path: PathBuf,
        #[arg(long, default_value_t = 100)]
        n_max: usize,
    },
    /// Classical key (joint PMF) analysis via the diagonal embedding.
    Classical { path: PathBuf },
}

#[derive(Serialize)]
struct AnalyzeReport {
    capacity: CapacityReport,
    state: StateFile,
}

#[derive(Serialize)]
struct BlockSummary {
    eigenvalue: f64,
    dim: usize,
    weight: f64,
}

#[derive(Serialize)]
struct ScrambleReport {
    ensemble_size: u128,
    block_count: usize,
    blocks: Vec<BlockSummary>,
    i_rho: f64,
    i_sigma: f64,
    chi_ab: f64,
    privacy: PrivacyReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    enumeration_deviation: Option<f64>,
    state: StateFile,
}

#[derive(Serialize)]
struct AsymptReport {
    d: usize,
    i_rho: f64,
    points: Vec<AsymptoticPoint>,
    state: StateFile,
}

#[derive(Serialize)]
struct ClassicalReport {
    #[serde(flatten)]
    classical: ClassicalCapacityReport,
    state: StateFile,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: &Cli) -> Result<ExitCode> {
    match &cli.command {
        Command::Analyze { path } => cmd_analyze(path, cli),
        Command::Scramble {
            path,
            enumerate,
            sample,
        } => cmd_scramble(path, *enumerate, *sample, cli),
        Command::Asympt { path, n_max } => cmd_asympt(path, *n_max, cli),
        Command::Classical { path } => cmd_classical(path, cli),
    }
}

fn exit_for(passed: bool) -> ExitCode {
    if passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    }
}

fn print_json<T: Serialize>(report: &T) {
    println!(
        "{}",
        serde_json::to_string_pretty(report).expect("reports serialize")
    );
}

fn print_state_echo(state: &StateFile) {
    println!("state echo (re-parseable):");
    print!("{}", state.to_text());
}

fn print_checks(capacity: &CapacityReport) {
    println!("checks:");
    for check in &capacity.checks {
        let verdict = if check.passed { "pass" } else { "FAIL" };
        println!(
            "  [{verdict}] {:<28} margin {:+.3e}",
            check.name, check.margin
        );
    }
}

fn print_capacity(capacity: &CapacityReport) {
    println!("I_rho  (mutual information):      {:.9} bits", capacity.i_rho);
    println!("I_sigma (after scrambling):       {:.9} bits", capacity.i_sigma);
    println!("chi_AB (achieved Holevo):         {:.9} bits", capacity.chi_ab);
    println!("chi_A  (eavesdropper Holevo):     {:.3e} bits", capacity.chi_a);
    println!("blocks D:                         {}", capacity.block_count);
    println!("log2 D:                           {:.9} bits", capacity.log_d);
    println!("lower bound (I_rho - log2 D):     {:.9} bits", capacity.lower_bound);
    println!("upper bound (I_rho):              {:.9} bits", capacity.upper_bound);
    println!("ensemble size N:                  {}", capacity.ensemble_size);
    print_privacy(&capacity.privacy);
    print_checks(capacity);
}

fn print_privacy(privacy: &PrivacyReport) {
    let coverage = if privacy.exhaustive {
        "all members".to_string()
    } else {
        format!(
            "{} sampled members, seed {}",
            privacy.members_checked, privacy.sample_seed
        )
    };
    println!(
        "privacy: max marginal deviation {:.3e}, max commutator {:.3e} ({coverage})",
        privacy.max_marginal_deviation, privacy.max_commutator
    );
}

fn cmd_analyze(path: &Path, cli: &Cli) -> Result<ExitCode> {
    let state_file = StateFile::read(path)?;
    let state = state_file.to_bipartite()?;
    let capacity = capacity_report(&state, cli.grouping_tol)?;
    let passed = capacity.all_passed();
    let report = AnalyzeReport {
        capacity,
        state: StateFile::from_bipartite(&state, state_file.label.clone()),
    };
    if cli.json {
        print_json(&report);
    } else {
        print_header(path, &report.state);
        print_capacity(&report.capacity);
        println!(
            "result: {}",
            if passed {
                "all bound checks passed"
            } else {
                "BOUND CHECK FAILED"
            }
        );
        print_state_echo(&report.state);
    }
    Ok(exit_for(passed))
}

fn print_header(path: &Path, state: &StateFile) {
    let label = state.label.as_deref().unwrap_or("unlabeled");
    println!(
        "{} ({label}, kind {}, dA={}, dB={})",
        path.display(),
        state.kind.name(),
        state.dim_a,
        state.dim_b
    );
}

fn cmd_scramble(path: &Path, enumerate: bool, sample: usize, cli: &Cli) -> Result<ExitCode> {
    let state_file = StateFile::read(path)?;
    let state = state_file.to_bipartite()?;
    let blocks = block_decompose(&state.marginal(Subsystem::A), cli.grouping_tol)?;
    let summaries: Vec<BlockSummary> = blocks
        .blocks()
        .iter()
        .map(|b| BlockSummary {
            eigenvalue: b.eigenvalue,
            dim: b.dim,
            weight: b.weight,
        })
        .collect();
    let block_count = blocks.block_count();
    let ensemble = build_ensemble(blocks);

    let sigma = averaged_state(&state, &ensemble)?;
    let privacy = verify_privacy(&state, &ensemble, sample);
    let chi_ab =
        von_neumann_entropy(sigma.density()) - von_neumann_entropy(state.density());
    let enumeration_deviation = if enumerate {
        let brute = enumerate_average(&state, &ensemble, tol::ENUMERATION_LIMIT)?;
        Some(sigma.matrix().max_abs_diff(brute.matrix()))
    } else {
        None
    };

    let privacy_ok = privacy.holds();
    let enumeration_ok =
        enumeration_deviation.is_none_or(|d| d <= tol::ENUMERATION_AGREEMENT);
    let report = ScrambleReport {
        ensemble_size: ensemble.size(),
        block_count,
        blocks: summaries,
        i_rho: mutual_information(&state),
        i_sigma: mutual_information(&sigma),
        chi_ab,
        privacy,
        enumeration_deviation,
        state: StateFile::from_bipartite(&state, state_file.label.clone()),
    };

    if cli.json {
        print_json(&report);
    } else {
        print_header(path, &report.state);
        println!("ensemble size N: {}", report.ensemble_size);
        println!("blocks (D={}):", report.block_count);
        for (k, b) in report.blocks.iter().enumerate() {
            println!(
                "  K={k}: eigenvalue {:.9}, dim {}, weight {:.9}",
                b.eigenvalue, b.dim, b.weight
            );
        }
        println!("I_rho:   {:.9} bits", report.i_rho);
        println!("I_sigma: {:.9} bits", report.i_sigma);
        println!("chi_AB:  {:.9} bits", report.chi_ab);
        print_privacy(&report.privacy);
        if let Some(dev) = report.enumeration_deviation {
            println!("enumeration vs twirl deviation: {:.3e}", dev);
        }
        print_state_echo(&report.state);
    }
    Ok(exit_for(privacy_ok && enumeration_ok))
}

fn cmd_asympt(path: &Path, n_max: usize, cli: &Cli) -> Result<ExitCode> {
    let state_file = StateFile::read(path)?;
    let state = state_file.to_bipartite()?;
    let rho_a = state.marginal(Subsystem::A);
    let i_rho = mutual_information(&state);
    let points = asymptotic_schedule(&rho_a, i_rho, n_max);
    let report = AsymptReport {
        d: rho_a.dim(),
        i_rho,
        points,
        state: StateFile::from_bipartite(&state, state_file.label.clone()),
    };
    if cli.json {
        print_json(&report);
    } else {
        print_header(path, &report.state);
        println!("d = {}, I_rho = {:.9} bits", report.d, report.i_rho);
        println!(
            "{:>6}  {:>16}  {:>16}  {:>14}",
            "n", "rate lower bound", "type-class bound", "exact count"
        );
        for point in &report.points {
            let exact = point
                .exact_distinct_eigenvalues
                .map(|c| c.to_string())
                .unwrap_or_else(|| "-".to_string());
            println!(
                "{:>6}  {:>16.9}  {:>16.9}  {:>14}",
                point.n, point.rate_lower_bound, point.type_class_bound, exact
            );
        }
        print_state_echo(&report.state);
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_classical(path: &Path, cli: &Cli) -> Result<ExitCode> {
    let state_file = StateFile::read(path)?;
    let pmf = state_file.to_pmf()?;
    let classical = classical_capacity_report(&pmf, cli.grouping_tol)?;
    let passed = classical.all_passed();
    let report = ClassicalReport {
        classical,
        state: StateFile::from_pmf(&pmf, state_file.label.clone()),
    };
    if cli.json {
        print_json(&report);
    } else {
        print_header(path, &report.state);
        println!(
            "classical I(X_A:X_B):             {:.9} bits",
            report.classical.classical_mutual_information
        );
        println!(
            "embedded quantum I_rho:           {:.9} bits",
            report.classical.embedded_mutual_information
        );
        println!(
            "agreement margin:                 {:.3e} ({})",
            report.classical.agreement_margin,
            if report.classical.agreement {
                "ok"
            } else {
                "DISAGREE"
            }
        );
        print_capacity(&report.classical.report);
        println!("note: {}", report.classical.ensemble_note);
        println!(
            "result: {}",
            if passed {
                "all bound checks passed"
            } else {
                "BOUND CHECK FAILED"
            }
        );
        print_state_echo(&report.state);
    }
    Ok(exit_for(passed))
}
