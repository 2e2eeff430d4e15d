//! On-disk formats.
//!
//! Problem files are TOML with exactly one of two sources: an `[explicit]`
//! table spelling out the model and constraint matrices, or a `[family.*]`
//! table naming a built-in benchmark generator. An optional `[approximate]`
//! table supplies weights for floor initialization. Results and verification
//! reports are TOML as well; search traces are CSV.

use exdes::criteria::{Criterion, DCriterion};
use exdes::design::{ApproximateDesign, DesignProblem, ExactDesign, ProblemError};
use exdes::heuristic::{InitStrategy, RunOutcome, SearchConfig};
use exdes::oracle::EnumerationReport;
use exdes::problems::{
    block_problem, fluoranthene_problem, quadratic_problem, BlockProblemSpec, FluorantheneSpec,
};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("not valid TOML: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("a problem file needs an [explicit] or a [family.*] table")]
    MissingSource,
    #[error("[explicit] and [family.*] are mutually exclusive")]
    AmbiguousSource,
    #[error(transparent)]
    Problem(#[from] ProblemError),
}

/// Root of a problem file.
#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub explicit: Option<ExplicitSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub approximate: Option<ApproximateSpec>,
}

/// Fully spelled-out problem: `regressors` holds the m model rows over the n
/// candidate points, `constraints` the k consumption rows, `limits` the k
/// resource budgets, `base` the protected trial counts.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ExplicitSpec {
    pub regressors: Vec<Vec<f64>>,
    pub constraints: Vec<Vec<f64>>,
    pub limits: Vec<f64>,
    pub base: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

/// A built-in benchmark generator and its parameters.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum FamilySpec {
    Block {
        v: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        block_limit: Option<u64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        treatment_limits: Option<Vec<u64>>,
    },
    Quadratic {
        budget: f64,
    },
    Fluoranthene {
        #[serde(default)]
        start_hour: u32,
        #[serde(default = "default_budget")]
        budget: f64,
        #[serde(default = "default_theta1")]
        theta1: f64,
        #[serde(default = "default_theta2")]
        theta2: f64,
    },
}

fn default_budget() -> f64 {
    FluorantheneSpec::default().budget
}

fn default_theta1() -> f64 {
    FluorantheneSpec::default().theta1
}

fn default_theta2() -> f64 {
    FluorantheneSpec::default().theta2
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ApproximateSpec {
    pub weights: Vec<f64>,
}

impl ProblemFile {
    pub fn parse(text: &str) -> Result<ProblemFile, FormatError> {
        Ok(toml::from_str(text)?)
    }

    /// Validates and constructs the design problem this file describes.
    pub fn build(&self) -> Result<DesignProblem, FormatError> {
        match (&self.explicit, &self.family) {
            (Some(_), Some(_)) => Err(FormatError::AmbiguousSource),
            (None, None) => Err(FormatError::MissingSource),
            (Some(e), None) => Ok(DesignProblem::new(
                e.regressors.clone(),
                e.constraints.clone(),
                e.limits.clone(),
                e.base.clone(),
                e.labels.clone(),
            )?),
            (None, Some(f)) => Ok(match f {
                FamilySpec::Block {
                    v,
                    block_limit,
                    treatment_limits,
                } => block_problem(&BlockProblemSpec {
                    v: *v,
                    block_limit: *block_limit,
                    treatment_limits: treatment_limits.clone(),
                })?,
                FamilySpec::Quadratic { budget } => quadratic_problem(*budget)?,
                FamilySpec::Fluoranthene {
                    start_hour,
                    budget,
                    theta1,
                    theta2,
                } => fluoranthene_problem(&FluorantheneSpec {
                    start_hour: *start_hour,
                    budget: *budget,
                    theta1: *theta1,
                    theta2: *theta2,
                })?,
            }),
        }
    }

    pub fn approximate(&self) -> Option<ApproximateDesign> {
        self.approximate
            .as_ref()
            .map(|a| ApproximateDesign::new(a.weights.clone()))
    }
}

/// Renders a problem in explicit form. Numbers keep full round-trip
/// precision, so `parse(emit(p))` rebuilds bit-equal matrices.
pub fn emit_problem(problem: &DesignProblem) -> String {
    let cons = problem.constraints();
    let file = ProblemFile {
        explicit: Some(ExplicitSpec {
            regressors: problem.regressor_rows(),
            constraints: (0..problem.k()).map(|r| cons.row(r).to_vec()).collect(),
            limits: cons.limits().to_vec(),
            base: problem.base().counts().to_vec(),
            labels: problem.labels().map(<[String]>::to_vec),
        }),
        family: None,
        approximate: None,
    };
    toml::to_string(&file).expect("explicit problems always serialize")
}

/// Solver output. `design` lists only points with nonzero counts, indexed
/// from 1 to match problem-file column order.
#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct RunResultFile {
    pub phi: f64,
    pub attribute_mantissa: u64,
    pub attribute_exponent: i32,
    pub iterations: u64,
    pub restarts: u32,
    pub seed: u64,
    pub elapsed_s: f64,
    pub config: ConfigEcho,
    pub design: Vec<DesignEntry>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct ConfigEcho {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time_limit_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stall_limit: Option<u64>,
    pub back_max: u32,
    pub n_round: u32,
    pub init: String,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct DesignEntry {
    pub index: usize,
    pub count: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

pub fn design_entries(problem: &DesignProblem, design: &ExactDesign) -> Vec<DesignEntry> {
    design
        .support()
        .map(|(i, count)| DesignEntry {
            index: i + 1,
            count,
            label: problem.labels().map(|l| l[i].clone()),
        })
        .collect()
}

pub fn run_result(
    problem: &DesignProblem,
    outcome: &RunOutcome,
    config: &SearchConfig,
) -> RunResultFile {
    let init = match config.init {
        InitStrategy::Base => "base",
        InitStrategy::RandomWalk { .. } => "random",
        InitStrategy::FromApproximate(_) => "floor",
    };
    RunResultFile {
        phi: outcome.best_phi,
        attribute_mantissa: outcome.attribute.mantissa,
        attribute_exponent: outcome.attribute.exponent,
        iterations: outcome.iterations,
        restarts: outcome.restarts,
        seed: config.seed,
        elapsed_s: outcome.elapsed.as_secs_f64(),
        config: ConfigEcho {
            time_limit_s: config.time_limit.map(|d: std::time::Duration| d.as_secs_f64()),
            stall_limit: config.stall_limit,
            back_max: config.back_max,
            n_round: config.n_round,
            init: init.to_string(),
        },
        design: design_entries(problem, &outcome.best),
    }
}

/// Exhaustive-verification output: census counts plus the exact optima, and
/// optionally the heuristic's answer next to them.
#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct VerifyFile {
    pub feasible_count: u64,
    pub maximal_count: u64,
    pub best_phi: f64,
    pub global_optima: Vec<OptimumEntry>,
    pub local_optima: Vec<OptimumEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub comparison: Option<Comparison>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct OptimumEntry {
    pub phi: f64,
    pub counts: Vec<u64>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct Comparison {
    pub phi: f64,
    pub efficiency: f64,
    pub counts: Vec<u64>,
}

pub fn verify_file(
    problem: &DesignProblem,
    report: &EnumerationReport,
    comparison: Option<Comparison>,
) -> VerifyFile {
    let c = DCriterion;
    let entry = |d: &ExactDesign| OptimumEntry {
        phi: c.evaluate_exact(problem, d),
        counts: d.counts().to_vec(),
    };
    VerifyFile {
        feasible_count: report.feasible_count,
        maximal_count: report.maximal_designs.len() as u64,
        best_phi: report.best_phi,
        global_optima: report.global_optima.iter().map(entry).collect(),
        local_optima: report.local_optima.iter().map(entry).collect(),
        comparison,
    }
}

pub const TRACE_HEADER: &str = "step_kind,phi,elapsed_s";

#[cfg(test)]
mod tests {
    use super::*;

    const TOY: &str = r#"
        [explicit]
        regressors = [[1.0, 0.0], [0.0, 1.0]]
        constraints = [[1.0, 1.0], [1.0, 2.0]]
        limits = [20.0, 23.0]
        base = [0, 0]
    "#;

    #[test]
    fn explicit_files_parse_and_build() {
        let file = ProblemFile::parse(TOY).unwrap();
        let p = file.build().unwrap();
        assert_eq!(p.n(), 2);
        assert_eq!(p.m(), 2);
        assert_eq!(p.constraints().limits(), &[20.0, 23.0]);
    }

    #[test]
    fn family_files_route_to_generators() {
        let block = ProblemFile::parse("[family.block]\nv = 3\nblock_limit = 3\n").unwrap();
        assert_eq!(block.build().unwrap().n(), 3);
        let quad = ProblemFile::parse("[family.quadratic]\nbudget = 3000.0\n").unwrap();
        assert_eq!(quad.build().unwrap().n(), 54);
        let fluo = ProblemFile::parse("[family.fluoranthene]\nstart_hour = 10\n").unwrap();
        let p = fluo.build().unwrap();
        assert_eq!(p.n(), 145);
        assert_eq!(p.k(), 146);
    }

    #[test]
    fn both_sources_or_neither_are_rejected() {
        let both = concat!(
            "[explicit]\nregressors = [[1.0]]\nconstraints = [[1.0]]\n",
            "limits = [1.0]\nbase = [0]\n[family.quadratic]\nbudget = 100.0\n"
        );
        assert!(matches!(
            ProblemFile::parse(both).unwrap().build(),
            Err(FormatError::AmbiguousSource)
        ));
        assert!(matches!(
            ProblemFile::parse("").unwrap().build(),
            Err(FormatError::MissingSource)
        ));
    }

    #[test]
    fn unknown_keys_are_parse_errors() {
        assert!(ProblemFile::parse("[explicit]\nmatrix = [[1.0]]\n").is_err());
        assert!(ProblemFile::parse("[family.simplex]\nn = 3\n").is_err());
    }

    #[test]
    fn nonpositive_limits_are_named_in_the_diagnostic() {
        let text = TOY.replace("[20.0, 23.0]", "[0.0, 23.0]");
        let err = ProblemFile::parse(&text).unwrap().build().unwrap_err();
        let message = err.to_string();
        assert!(message.contains("positive"), "got: {message}");
    }

    #[test]
    fn emitted_problems_reparse_bit_for_bit() {
        let spec = FluorantheneSpec::default();
        let p = fluoranthene_problem(&spec).unwrap();
        let text = emit_problem(&p);
        let again = ProblemFile::parse(&text).unwrap().build().unwrap();
        assert_eq!(again.regressor_rows(), p.regressor_rows());
        for r in 0..p.k() {
            assert_eq!(again.constraints().row(r), p.constraints().row(r));
        }
        assert_eq!(again.constraints().limits(), p.constraints().limits());
        assert_eq!(again.base().counts(), p.base().counts());
        assert_eq!(again.labels(), p.labels());
    }

    #[test]
    fn design_entries_are_sparse_and_one_based() {
        let file = ProblemFile::parse(TOY).unwrap();
        let p = file.build().unwrap();
        let entries = design_entries(&p, &ExactDesign::new(vec![11, 0]));
        assert_eq!(entries.len(), 1);
        assert_eq!(entries[0].index, 1);
        assert_eq!(entries[0].count, 11);
    }
}
