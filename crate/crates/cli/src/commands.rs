//! Implementations behind the `solve`, `verify`, and `gen` subcommands.
//! Each returns the rendered report text; the binary decides where it goes.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use exdes::criteria::{d_efficiency, DCriterion};
use exdes::design::DesignProblem;
use exdes::heuristic::{run_with_sink, InitStrategy, SearchConfig, TraceEvent};
use exdes::oracle::{enumeration_report, OracleError};
use exdes::problems::{
    block_problem, fluoranthene_problem, quadratic_problem, BlockProblemSpec, FluorantheneSpec,
};
use thiserror::Error;

use crate::format::{
    emit_problem, run_result, verify_file, Comparison, FormatError, ProblemFile, TRACE_HEADER,
};

/// Exit codes: 1 for output failures, 2 for anything wrong with the inputs,
/// 3 when the oracle refuses an oversized enumeration.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {message}")]
    Input { path: String, message: String },
    #[error("{0}")]
    Refused(#[from] OracleError),
    #[error("cannot write {path}: {source}")]
    Output {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Output { .. } => 1,
            CliError::Input { .. } => 2,
            CliError::Refused(_) => 3,
        }
    }
}

fn input_error(path: &Path, message: impl ToString) -> CliError {
    CliError::Input {
        path: path.display().to_string(),
        message: message.to_string(),
    }
}

fn load_problem(path: &Path) -> Result<(ProblemFile, DesignProblem), CliError> {
    let text = fs::read_to_string(path).map_err(|e| input_error(path, e))?;
    let file = ProblemFile::parse(&text).map_err(|e| input_error(path, e))?;
    let problem = file.build().map_err(|e| match e {
        FormatError::Problem(p) => input_error(path, p),
        other => input_error(path, other),
    })?;
    Ok((file, problem))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InitKind {
    Base,
    Random,
    Floor,
}

#[derive(Clone, Debug)]
pub struct SolveOptions {
    pub time_limit: Option<f64>,
    pub stall_limit: Option<u64>,
    pub back_max: u32,
    pub n_round: u32,
    pub seed: u64,
    pub restarts: u32,
    pub init: InitKind,
    pub trace: Option<PathBuf>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            time_limit: None,
            stall_limit: None,
            back_max: 16,
            n_round: 9,
            seed: 0,
            restarts: 10,
            init: InitKind::Random,
            trace: None,
        }
    }
}

impl SolveOptions {
    /// Translates the flags into a search configuration. Without an explicit
    /// stopping flag the run gets the default two-minute budget.
    fn search_config(&self, path: &Path, file: &ProblemFile) -> Result<SearchConfig, CliError> {
        let time_limit = match (self.time_limit, self.stall_limit) {
            (Some(t), _) if !t.is_finite() || t < 0.0 => {
                return Err(input_error(path, format!("time limit must be a nonnegative number of seconds, got {t}")));
            }
            (Some(t), _) => Some(Duration::from_secs_f64(t)),
            (None, Some(_)) => None,
            (None, None) => Some(Duration::from_secs(120)),
        };
        let init = match self.init {
            InitKind::Base => InitStrategy::Base,
            InitKind::Random => InitStrategy::RandomWalk { walk_length: None },
            InitKind::Floor => match file.approximate() {
                Some(a) => InitStrategy::FromApproximate(a),
                None => {
                    return Err(input_error(
                        path,
                        "floor initialization needs an [approximate] table with weights",
                    ));
                }
            },
        };
        Ok(SearchConfig {
            time_limit,
            stall_limit: self.stall_limit,
            back_max: self.back_max,
            n_round: self.n_round,
            seed: self.seed,
            restarts: self.restarts,
            init,
        })
    }
}

pub fn solve(path: &Path, opts: &SolveOptions) -> Result<String, CliError> {
    let (file, problem) = load_problem(path)?;
    let config = opts.search_config(path, &file)?;
    let mut trace_rows = opts.trace.as_ref().map(|_| vec![TRACE_HEADER.to_string()]);
    let mut sink = |e: TraceEvent| {
        if let Some(rows) = trace_rows.as_mut() {
            rows.push(format!(
                "{},{},{:.6}",
                e.kind.as_str(),
                e.phi,
                e.elapsed.as_secs_f64()
            ));
        }
    };
    let outcome =
        run_with_sink(&problem, &DCriterion, &config, &mut sink).map_err(|e| input_error(path, e))?;
    if let (Some(trace_path), Some(rows)) = (&opts.trace, trace_rows) {
        let mut text = rows.join("\n");
        text.push('\n');
        fs::write(trace_path, text).map_err(|source| CliError::Output {
            path: trace_path.clone(),
            source,
        })?;
    }
    let report = run_result(&problem, &outcome, &config);
    Ok(toml::to_string(&report).expect("results always serialize"))
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub cap: Option<u64>,
    pub compare: bool,
    pub seed: u64,
    pub stall_limit: u64,
    pub restarts: u32,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            cap: None,
            compare: false,
            seed: 0,
            stall_limit: 10_000,
            restarts: 5,
        }
    }
}

pub fn verify(path: &Path, opts: &VerifyOptions) -> Result<String, CliError> {
    let (_, problem) = load_problem(path)?;
    let report = enumeration_report(&problem, &DCriterion, opts.cap)?;
    let comparison = if opts.compare {
        let config = SearchConfig {
            time_limit: None,
            stall_limit: Some(opts.stall_limit),
            seed: opts.seed,
            restarts: opts.restarts,
            ..SearchConfig::default()
        };
        let outcome = run_with_sink(&problem, &DCriterion, &config, &mut |_| {})
            .map_err(|e| input_error(path, e))?;
        let reference = &report.global_optima[0];
        let efficiency = d_efficiency(&problem, &outcome.best, reference)
            .map_err(|e| input_error(path, e))?;
        Some(Comparison {
            phi: outcome.best_phi,
            efficiency,
            counts: outcome.best.counts().to_vec(),
        })
    } else {
        None
    };
    let out = verify_file(&problem, &report, comparison);
    Ok(toml::to_string(&out).expect("reports always serialize"))
}

/// Which benchmark family `gen` should materialize.
#[derive(Clone, Debug)]
pub enum GenTarget {
    Block {
        v: usize,
        blocks: Option<u64>,
        treatment_limits: Option<Vec<u64>>,
    },
    Quadratic {
        budget: f64,
    },
    Fluoranthene {
        start_hour: u32,
        budget: f64,
        theta1: f64,
        theta2: f64,
    },
}

pub fn gen(target: &GenTarget) -> Result<String, CliError> {
    let built = match target {
        GenTarget::Block {
            v,
            blocks,
            treatment_limits,
        } => block_problem(&BlockProblemSpec {
            v: *v,
            block_limit: *blocks,
            treatment_limits: treatment_limits.clone(),
        }),
        GenTarget::Quadratic { budget } => quadratic_problem(*budget),
        GenTarget::Fluoranthene {
            start_hour,
            budget,
            theta1,
            theta2,
        } => fluoranthene_problem(&FluorantheneSpec {
            start_hour: *start_hour,
            budget: *budget,
            theta1: *theta1,
            theta2: *theta2,
        }),
    };
    let problem = built.map_err(|e| CliError::Input {
        path: "<family parameters>".to_string(),
        message: e.to_string(),
    })?;
    let mut text = String::new();
    let _ = writeln!(text, "# generated: {}", describe(target));
    text.push_str(&emit_problem(&problem));
    Ok(text)
}

fn describe(target: &GenTarget) -> String {
    match target {
        GenTarget::Block {
            v,
            blocks,
            treatment_limits,
        } => {
            let mut s = format!("block designs, {v} treatments");
            if let Some(n) = blocks {
                let _ = write!(s, ", at most {n} blocks");
            }
            if let Some(l) = treatment_limits {
                let _ = write!(s, ", treatment limits {l:?}");
            }
            s
        }
        GenTarget::Quadratic { budget } => format!("quadratic mixture study, budget {budget}"),
        GenTarget::Fluoranthene {
            start_hour,
            budget,
            theta1,
            theta2,
        } => format!(
            "fluoranthene sampling, start hour {start_hour}, budget {budget}, theta = ({theta1}, {theta2})"
        ),
    }
}

/// Writes `text` to `out`, or to standard output when no path is given.
pub fn deliver(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text).map_err(|source| CliError::Output {
            path: path.to_path_buf(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
