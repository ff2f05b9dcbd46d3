//! The `hierq` command line: JSON in, canonical JSON out.
//!
//! Every subcommand reads its payloads from JSON files, runs one
//! library operation and writes the canonical JSON result to a file or
//! stdout. Exit codes follow a fixed contract:
//!
//! | code | meaning                              |
//! |------|--------------------------------------|
//! | 0    | success                              |
//! | 1    | validation or parse error            |
//! | 2    | infeasible repair                    |
//! | 3    | internal numeric failure             |
//!
//! Failures print a single-line diagnostic on stderr. All runs are
//! deterministic given identical inputs and seed.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use hierq_core::codec;
use hierq_core::density::{build_density, diagonalize, expectation, macro_expectation, reduce};
use hierq_core::haar;
use hierq_core::repair::{repair_cascade, CascadeOutcome};
use hierq_core::repgroup::{decompose_product, IrrepLabel};
use hierq_core::tree::validate;
use hierq_core::Error as CoreError;

const TOLERANCE_ENV: &str = "HIERQ_TOLERANCE";
const TOLERANCE_MAX: f64 = 1e-3;

/// The resolved configuration of one run: which operation, which
/// files, the comparison tolerance (from `--tolerance`, then
/// `HIERQ_TOLERANCE`, then 1e-9) and the reproducibility seed.
#[derive(Debug, Clone)]
pub struct ScenarioConfig {
    pub operation: &'static str,
    pub inputs: Vec<PathBuf>,
    pub tolerance: f64,
    pub output: Option<PathBuf>,
    pub seed: u64,
}

#[derive(Parser)]
#[command(
    name = "hierq",
    version,
    about = "Hierarchical quantum states: registers, density matrices, representation coupling and self-repair"
)]
struct Cli {
    /// Absolute comparison tolerance in (0, 1e-3]; defaults to $HIERQ_TOLERANCE or 1e-9
    #[arg(long, global = true, value_name = "TOL")]
    tolerance: Option<f64>,

    /// Seed recorded in the run configuration; commands draw no
    /// randomness, so identical inputs and seed give identical outputs
    #[arg(long, global = true, value_name = "SEED", default_value_t = 0)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fold a register of leaf states into its stored form
    HaarEncode {
        /// Leaf layer JSON
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
        /// Zero every difference vector with norm at or below this threshold (lossy)
        #[arg(long, value_name = "NORM")]
        truncate: Option<f64>,
    },
    /// Unfold a stored register back into its leaves
    HaarDecode {
        /// Encoded register JSON
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Build the density matrix of a joint micro/macro state
    Density {
        /// Joint coefficient tensor JSON
        #[arg(long)]
        coeffs: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Reduced density matrix of one micro subsystem
    Reduce {
        #[arg(long)]
        coeffs: PathBuf,
        /// Subsystem index, 1-based
        #[arg(long)]
        subsystem: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Expectation value of a micro-level observable
    Expect {
        #[arg(long)]
        coeffs: PathBuf,
        /// Hermitian operator JSON on the full micro space
        #[arg(long)]
        operator: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Expectation value of a macrolevel-conditioned observable
    MacroExpect {
        #[arg(long)]
        coeffs: PathBuf,
        /// Blocks JSON: one hermitian micro-space operator per macro state
        #[arg(long)]
        operator: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Occupation weights and eigenvectors of a density matrix
    Diag {
        /// Density matrix JSON
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Decompose a product of SU(2) irreps and report a containment multiplicity
    Cg {
        /// Comma-separated two_j labels, e.g. 1,1,2
        #[arg(long, value_delimiter = ',')]
        reps: Vec<u32>,
        /// Target irrep two_j
        #[arg(long)]
        target: u32,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Validate a state tree and report every violated invariant
    Validate {
        /// Tree JSON
        #[arg(long)]
        input: PathBuf,
        /// Also require each parent irrep to occur in its children's product
        #[arg(long)]
        consistency: bool,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run a repair cascade scenario and write its trace
    Repair {
        /// Scenario JSON (organism + damage)
        #[arg(long, conflicts_with = "batch")]
        scenario: Option<PathBuf>,
        /// Process several scenario files, each in isolation
        #[arg(long, num_args = 1.., value_name = "FILE")]
        batch: Vec<PathBuf>,
        /// Trace destination (single-scenario mode)
        #[arg(long, conflicts_with = "batch")]
        output: Option<PathBuf>,
        /// Directory for batch traces (default: next to each input)
        #[arg(long, requires = "batch")]
        output_dir: Option<PathBuf>,
    },
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }
}

impl From<CoreError> for Failure {
    fn from(err: CoreError) -> Self {
        let code = match &err {
            CoreError::InfeasibleRebuild { .. } => 2,
            CoreError::Numeric(_) => 3,
            _ => 1,
        };
        Failure::new(code, err.to_string())
    }
}

/// Parses `args` and executes one command; returns the process exit
/// code and prints a single-line diagnostic on stderr for failures.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            if matches!(
                err.kind(),
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion
            ) {
                let _ = err.print();
                return 0;
            }
            let first_line = err
                .to_string()
                .lines()
                .next()
                .unwrap_or("invalid arguments")
                .to_string();
            eprintln!("{first_line}");
            return 1;
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            failure.code
        }
    }
}

fn execute(cli: Cli) -> Result<(), Failure> {
    let tolerance = resolve_tolerance(cli.tolerance)?;
    let seed = cli.seed;
    let config = |operation, inputs, output| ScenarioConfig {
        operation,
        inputs,
        tolerance,
        output,
        seed,
    };
    match cli.command {
        Command::HaarEncode {
            input,
            output,
            truncate,
        } => cmd_haar_encode(&config("haar-encode", vec![input], output), truncate),
        Command::HaarDecode { input, output } => {
            cmd_haar_decode(&config("haar-decode", vec![input], output))
        }
        Command::Density { coeffs, output } => {
            cmd_density(&config("density", vec![coeffs], output))
        }
        Command::Reduce {
            coeffs,
            subsystem,
            output,
        } => cmd_reduce(&config("reduce", vec![coeffs], output), subsystem),
        Command::Expect {
            coeffs,
            operator,
            output,
        } => cmd_expect(&config("expect", vec![coeffs, operator], output)),
        Command::MacroExpect {
            coeffs,
            operator,
            output,
        } => cmd_macro_expect(&config("macro-expect", vec![coeffs, operator], output)),
        Command::Diag { input, output } => cmd_diag(&config("diag", vec![input], output)),
        Command::Cg {
            reps,
            target,
            output,
        } => cmd_cg(&config("cg", vec![], output), &reps, target),
        Command::Validate {
            input,
            consistency,
            output,
        } => cmd_validate(&config("validate", vec![input], output), consistency),
        Command::Repair {
            scenario,
            batch,
            output,
            output_dir,
        } => {
            if let Some(path) = scenario {
                cmd_repair(&config("repair", vec![path], output))
            } else if !batch.is_empty() {
                cmd_repair_batch(&config("repair", batch, None), output_dir)
            } else {
                Err(Failure::new(1, "repair needs --scenario or --batch"))
            }
        }
    }
}

fn resolve_tolerance(flag: Option<f64>) -> Result<f64, Failure> {
    let tolerance = match flag {
        Some(t) => t,
        None => match std::env::var(TOLERANCE_ENV) {
            Ok(text) => text
                .trim()
                .parse::<f64>()
                .map_err(|_| Failure::new(1, format!("{TOLERANCE_ENV}: not a number: {text:?}")))?,
            Err(std::env::VarError::NotPresent) => hierq_core::DEFAULT_TOLERANCE,
            Err(std::env::VarError::NotUnicode(_)) => {
                return Err(Failure::new(
                    1,
                    format!("{TOLERANCE_ENV}: not valid unicode"),
                ))
            }
        },
    };
    if !(tolerance > 0.0 && tolerance <= TOLERANCE_MAX) {
        return Err(Failure::new(
            1,
            format!("tolerance {tolerance:e} outside (0, {TOLERANCE_MAX:e}]"),
        ));
    }
    Ok(tolerance)
}

fn read_input(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|err| Failure::new(1, format!("{}: {err}", path.display())))
}

fn emit(config: &ScenarioConfig, payload: &str) -> Result<(), Failure> {
    emit_to(config.output.as_deref(), payload)
}

fn emit_to(output: Option<&Path>, payload: &str) -> Result<(), Failure> {
    match output {
        Some(path) => fs::write(path, format!("{payload}\n"))
            .map_err(|err| Failure::new(1, format!("{}: {err}", path.display()))),
        None => {
            println!("{payload}");
            Ok(())
        }
    }
}

fn cmd_haar_encode(config: &ScenarioConfig, truncate: Option<f64>) -> Result<(), Failure> {
    let text = read_input(&config.inputs[0])?;
    let layer = codec::leaf_layer_from_json(&text)?;
    let mut tree = haar::encode(&layer)?;
    if let Some(threshold) = truncate {
        if threshold < 0.0 {
            return Err(Failure::new(1, "truncation threshold must be non-negative"));
        }
        tree.truncate(threshold);
    }
    emit(config, &codec::haar_tree_to_json(&tree))
}

fn cmd_haar_decode(config: &ScenarioConfig) -> Result<(), Failure> {
    let text = read_input(&config.inputs[0])?;
    let tree = codec::haar_tree_from_json(&text)?;
    let layer = haar::decode(&tree)?;
    emit(config, &codec::leaf_layer_to_json(&layer))
}

fn cmd_density(config: &ScenarioConfig) -> Result<(), Failure> {
    let text = read_input(&config.inputs[0])?;
    let coeffs = codec::coefficients_from_json(&text)?;
    let rho = build_density(&coeffs, config.tolerance)?;
    emit(config, &codec::density_to_json(&rho))
}

fn cmd_reduce(config: &ScenarioConfig, subsystem: usize) -> Result<(), Failure> {
    let text = read_input(&config.inputs[0])?;
    let coeffs = codec::coefficients_from_json(&text)?;
    let rho = reduce(&coeffs, subsystem, config.tolerance)?;
    emit(config, &codec::density_to_json(&rho))
}

fn cmd_expect(config: &ScenarioConfig) -> Result<(), Failure> {
    let coeffs = codec::coefficients_from_json(&read_input(&config.inputs[0])?)?;
    let operator = codec::operator_from_json(&read_input(&config.inputs[1])?)?;
    let value = expectation(&coeffs, &operator, config.tolerance)?;
    emit(config, &codec::value_to_json(value))
}

fn cmd_macro_expect(config: &ScenarioConfig) -> Result<(), Failure> {
    let coeffs = codec::coefficients_from_json(&read_input(&config.inputs[0])?)?;
    let blocks = codec::macro_operator_from_json(&read_input(&config.inputs[1])?)?;
    let value = macro_expectation(&coeffs, &blocks, config.tolerance)?;
    emit(config, &codec::value_to_json(value))
}

fn cmd_diag(config: &ScenarioConfig) -> Result<(), Failure> {
    let text = read_input(&config.inputs[0])?;
    let rho = codec::density_from_json(&text, config.tolerance)?;
    let (weights, eigvecs) = diagonalize(&rho, config.tolerance)?;
    emit(config, &codec::weights_to_json(&weights, &eigvecs))
}

fn cmd_cg(config: &ScenarioConfig, reps: &[u32], target: u32) -> Result<(), Failure> {
    let labels: Vec<IrrepLabel> = reps.iter().map(|&j| IrrepLabel::new(j)).collect();
    let series = decompose_product(&labels);
    let target = IrrepLabel::new(target);
    emit(config, &codec::coupling_to_json(&labels, target, &series))
}

fn cmd_validate(config: &ScenarioConfig, consistency: bool) -> Result<(), Failure> {
    let text = read_input(&config.inputs[0])?;
    let tree = codec::tree_from_json(&text)?;
    let report = validate(&tree, consistency);
    emit(config, &codec::report_to_json(&report))?;
    if !report.is_valid() {
        return Err(Failure::new(
            1,
            format!(
                "tree failed validation with {} violation(s)",
                report.violations.len()
            ),
        ));
    }
    Ok(())
}

fn cmd_repair(config: &ScenarioConfig) -> Result<(), Failure> {
    let text = read_input(&config.inputs[0])?;
    let scenario = codec::scenario_from_json(&text)?;
    let trace = repair_cascade(&scenario.organism, &scenario.damage)?;
    emit(config, &codec::trace_to_json(&trace))?;
    if trace.outcome == CascadeOutcome::InfeasibleRebuild {
        return Err(Failure::new(
            2,
            format!(
                "rebuild infeasible: cloning cannot restore two_j = {}",
                scenario.organism.target().two_j
            ),
        ));
    }
    Ok(())
}

/// Batch mode: every scenario runs in isolation on its own thread; a
/// failing file does not stop the others. The exit code is the worst
/// per-file code.
fn cmd_repair_batch(config: &ScenarioConfig, output_dir: Option<PathBuf>) -> Result<(), Failure> {
    let results: Vec<(PathBuf, Result<(), Failure>)> = std::thread::scope(|scope| {
        let handles: Vec<_> = config
            .inputs
            .iter()
            .map(|path| {
                let output = trace_path(path, output_dir.as_deref());
                let sub = ScenarioConfig {
                    operation: "repair",
                    inputs: vec![path.clone()],
                    tolerance: config.tolerance,
                    output: Some(output),
                    seed: config.seed,
                };
                scope.spawn(move || cmd_repair(&sub))
            })
            .collect();
        config
            .inputs
            .iter()
            .cloned()
            .zip(handles.into_iter().map(|h| h.join().expect("no panics")))
            .collect()
    });

    let mut worst = 0;
    for (path, result) in results {
        if let Err(failure) = result {
            eprintln!("error: {}: {}", path.display(), failure.message);
            worst = worst.max(failure.code);
        }
    }
    if worst != 0 {
        return Err(Failure::new(worst, "batch finished with failures"));
    }
    Ok(())
}

/// `<input stem>.trace.json`, either next to the input or under `dir`.
fn trace_path(input: &Path, dir: Option<&Path>) -> PathBuf {
    let stem = input
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "scenario".to_string());
    let name = format!("{stem}.trace.json");
    match dir {
        Some(d) => d.join(name),
        None => input.with_file_name(name),
    }
}
