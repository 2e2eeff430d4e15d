//! Tabu excursion search over the feasible design lattice.
//!
//! The search walks in single-unit steps. Designs are remembered through
//! their attribute, the criterion value rounded to `n_round` significant
//! digits; a hash set of attributes is the tabu list. From a design with a
//! fresh attribute the walk prefers to climb, from a known one to retreat,
//! always to the neighbor with the best lookahead score whose attribute is
//! unseen. When every neighbor is tabu it takes one uniformly random step.
//! Each maximal design encountered for the first time is compared against the
//! incumbent, and after more than `back_max` backward steps without a new
//! incumbent the excursion is abandoned and the walk restarts from the
//! incumbent with the tabu list intact.
//!
//! The lookahead score of a candidate is the criterion value of the
//! fractional design `zeta + gamma(zeta) * d(zeta)`: the furthest point of
//! the feasible region along the componentwise headroom direction. It
//! estimates how good the designs above `zeta` can get, which is what makes
//! climbing greedy in a useful way.

use std::collections::HashSet;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::criteria::{Criterion, InformationMatrix};
use crate::design::{ApproximateDesign, DesignProblem, Direction, ExactDesign, Residuals};

/// The incremental information matrix and residuals are rebuilt from scratch
/// after this many steps to stop float drift from accumulating.
const REBUILD_PERIOD: u32 = 1024;

/// Rounded criterion value used as a tabu fingerprint: `mantissa` carries the
/// leading significant digits, so the represented value is
/// `mantissa * 10^(exponent - n_round + 1)`. Zero is `(0, 0)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct AttributeToken {
    pub mantissa: u64,
    pub exponent: i32,
}

/// Rounds `phi` to `n_round` significant digits.
///
/// Non-finite or non-positive values collapse to the zero token. A carry that
/// rounds up to the next decade (9.999... to 10) is renormalized, and a
/// misestimated decade from `log10` rounding is repaired by one recompute, so
/// tokens are exact integers for every finite input.
pub fn attr(phi: f64, n_round: u32) -> AttributeToken {
    assert!((1..=15).contains(&n_round), "n_round must lie in 1..=15");
    if !phi.is_finite() || phi <= 0.0 {
        return AttributeToken {
            mantissa: 0,
            exponent: 0,
        };
    }
    let digits = 10u64.pow(n_round);
    let lead = digits / 10;
    let mut exponent = phi.log10().floor() as i32;
    let mut mantissa = scaled_round(phi, n_round as i32 - 1 - exponent);
    if mantissa < lead {
        exponent -= 1;
        mantissa = scaled_round(phi, n_round as i32 - 1 - exponent);
    }
    if mantissa >= digits {
        mantissa = lead;
        exponent += 1;
    }
    AttributeToken { mantissa, exponent }
}

/// `round(phi * 10^p)` with the scaling split in two so that neither factor
/// overflows for any finite `phi`.
fn scaled_round(phi: f64, p: i32) -> u64 {
    let half = p / 2;
    (phi * 10f64.powi(half) * 10f64.powi(p - half)).round() as u64
}

/// Lookahead score of a design: the criterion at `zeta + gamma * d`, the
/// furthest feasible fractional design along the headroom direction. Falls
/// back to the criterion value of `zeta` itself when `zeta` is maximal.
pub fn val<C: Criterion + ?Sized>(
    problem: &DesignProblem,
    criterion: &C,
    design: &ExactDesign,
) -> f64 {
    let r = problem.residuals(design);
    let d = problem.headroom_from_residuals(&r);
    let g = problem.gamma_from_residuals(&r, &d);
    let mut info = InformationMatrix::from_exact(problem, design);
    if g > 0.0 {
        for (i, &di) in d.iter().enumerate() {
            if di > 0 {
                info.add_point(problem.regressor(i), g * di as f64);
            }
        }
    }
    criterion.evaluate(&info)
}

/// How the initial design of each restart is picked.
#[derive(Clone, Debug)]
pub enum InitStrategy {
    /// Start at the protected base design.
    Base,
    /// Random forward walk from the base. `None` walks to a maximal design
    /// once and keeps a uniformly random prefix of that walk.
    RandomWalk { walk_length: Option<u64> },
    /// Floor an externally computed approximate design.
    FromApproximate(ApproximateDesign),
}

pub fn initial_from_base(problem: &DesignProblem) -> ExactDesign {
    problem.base().clone()
}

/// Seeded random forward walk from the base design.
pub fn initial_random<R: Rng>(
    problem: &DesignProblem,
    rng: &mut R,
    walk_length: Option<u64>,
) -> ExactDesign {
    let mut design = problem.base().clone();
    let mut res = problem.residuals(&design);
    let cons = problem.constraints();
    let mut picks = Vec::new();
    let limit = walk_length.unwrap_or(u64::MAX);
    while (picks.len() as u64) < limit {
        let ups: Vec<usize> = (0..problem.n()).filter(|&i| cons.can_add(&res, i)).collect();
        if ups.is_empty() {
            break;
        }
        let i = ups[rng.random_range(0..ups.len())];
        design.add_unit(i);
        cons.step_residuals(&mut res, i, Direction::Up);
        picks.push(i);
    }
    if walk_length.is_some() {
        return design;
    }
    // Unbounded walks keep a uniformly random prefix, so initial designs
    // spread over all sizes between the base and a maximal design.
    let keep = rng.random_range(0..=picks.len());
    let mut out = problem.base().clone();
    for &i in &picks[..keep] {
        out.add_unit(i);
    }
    out
}

#[derive(Debug, Error, PartialEq)]
pub enum ApproximateInitError {
    #[error("approximate design has length {got}, expected {expected}")]
    Shape { got: usize, expected: usize },
    #[error("approximate design weight {index} lies below the base count")]
    BelowBase { index: usize },
    #[error("approximate design overdraws constraint row {row}")]
    Infeasible { row: usize },
}

/// Floors an approximate design to the lattice. The floor only reduces
/// resource use, so the result is feasible whenever the input dominates the
/// base and satisfies the constraints.
pub fn initial_from_approximate(
    problem: &DesignProblem,
    approx: &ApproximateDesign,
) -> Result<ExactDesign, ApproximateInitError> {
    if approx.len() != problem.n() {
        return Err(ApproximateInitError::Shape {
            got: approx.len(),
            expected: problem.n(),
        });
    }
    let w = approx.weights();
    for (i, &b) in problem.base().counts().iter().enumerate() {
        if w[i] < b as f64 {
            return Err(ApproximateInitError::BelowBase { index: i });
        }
    }
    if let Some(row) = problem.constraints().violated_row(w) {
        return Err(ApproximateInitError::Infeasible { row });
    }
    let counts = w
        .iter()
        .zip(problem.base().counts())
        .map(|(&wi, &b)| (wi.floor() as u64).max(b))
        .collect();
    let design = ExactDesign::new(counts);
    debug_assert!(problem.is_feasible(&design));
    Ok(design)
}

/// Knobs of the excursion search.
#[derive(Clone, Debug)]
pub struct SearchConfig {
    /// Wall-clock budget of a single restart.
    pub time_limit: Option<Duration>,
    /// Stop a restart after this many iterations without a new incumbent.
    /// The reproducible alternative to the wall clock.
    pub stall_limit: Option<u64>,
    /// Backward steps tolerated before the excursion is declared a failure.
    pub back_max: u32,
    /// Significant digits of the attribute rounding.
    pub n_round: u32,
    pub seed: u64,
    /// Number of independent searches; their best result wins.
    pub restarts: u32,
    pub init: InitStrategy,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            time_limit: Some(Duration::from_secs(120)),
            stall_limit: None,
            back_max: 16,
            n_round: 9,
            seed: 0,
            restarts: 10,
            init: InitStrategy::RandomWalk { walk_length: None },
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("back_max must be at least 1")]
    BackMax,
    #[error("n_round must lie in 1..=15")]
    NRound,
    #[error("restarts must be at least 1")]
    Restarts,
    #[error("either a time limit or a stall limit must be set")]
    NoStopRule,
}

impl SearchConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.back_max < 1 {
            return Err(ConfigError::BackMax);
        }
        if !(1..=15).contains(&self.n_round) {
            return Err(ConfigError::NRound);
        }
        if self.restarts < 1 {
            return Err(ConfigError::Restarts);
        }
        if self.time_limit.is_none() && self.stall_limit.is_none() {
            return Err(ConfigError::NoStopRule);
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepKind {
    Forward,
    Backward,
    BlockageRandom,
    Restart,
    NewBest,
}

impl StepKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            StepKind::Forward => "forward",
            StepKind::Backward => "backward",
            StepKind::BlockageRandom => "blockage-random",
            StepKind::Restart => "restart",
            StepKind::NewBest => "new-best",
        }
    }
}

/// One line of the search log.
#[derive(Clone, Copy, Debug)]
pub struct TraceEvent {
    pub kind: StepKind,
    pub phi: f64,
    pub attribute: AttributeToken,
    pub elapsed: Duration,
}

#[derive(Clone, Debug, Default)]
pub struct SearchTrace {
    pub events: Vec<TraceEvent>,
}

/// What one call to [`excursion_step`] did.
#[derive(Clone, Copy, Debug)]
pub struct StepReport {
    pub kind: StepKind,
    pub direction: Direction,
    pub index: usize,
    /// Criterion value of the design the move landed on.
    pub phi: f64,
    /// The incumbent was replaced this iteration.
    pub new_best: bool,
    /// The excursion failed and the walk jumped back to the incumbent.
    pub failure_restart: bool,
}

/// Mutable state of one excursion search.
pub struct SearchState {
    current: ExactDesign,
    residuals: Residuals,
    info: InformationMatrix,
    phi: f64,
    best: ExactDesign,
    best_phi: f64,
    tabu: HashSet<AttributeToken>,
    back_count: u32,
    steps_since_rebuild: u32,
    rng: ChaCha8Rng,
    scratch: Scratch,
}

struct Scratch {
    cand_info: InformationMatrix,
    look_info: InformationMatrix,
    cand_res: Residuals,
    head: Vec<u64>,
}

impl SearchState {
    /// Panics if `initial` is not feasible.
    pub fn new<C: Criterion + ?Sized>(
        problem: &DesignProblem,
        criterion: &C,
        initial: ExactDesign,
        rng: ChaCha8Rng,
    ) -> Self {
        assert!(
            problem.is_feasible(&initial),
            "initial design must be feasible"
        );
        let residuals = problem.residuals(&initial);
        let info = InformationMatrix::from_exact(problem, &initial);
        let phi = criterion.evaluate(&info);
        let scratch = Scratch {
            cand_info: info.clone(),
            look_info: info.clone(),
            cand_res: residuals.clone(),
            head: Vec::with_capacity(problem.n()),
        };
        SearchState {
            best: initial.clone(),
            best_phi: phi,
            current: initial,
            residuals,
            info,
            phi,
            tabu: HashSet::new(),
            back_count: 0,
            steps_since_rebuild: 0,
            rng,
            scratch,
        }
    }

    pub fn current(&self) -> &ExactDesign {
        &self.current
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn best(&self) -> &ExactDesign {
        &self.best
    }

    pub fn best_phi(&self) -> f64 {
        self.best_phi
    }

    pub fn back_count(&self) -> u32 {
        self.back_count
    }

    pub fn tabu_len(&self) -> usize {
        self.tabu.len()
    }

    fn jump_to_best<C: Criterion + ?Sized>(&mut self, problem: &DesignProblem, criterion: &C) {
        self.current = self.best.clone();
        self.residuals = problem.residuals(&self.current);
        self.info = InformationMatrix::from_exact(problem, &self.current);
        self.phi = criterion.evaluate(&self.info);
        self.back_count = 0;
        self.steps_since_rebuild = 0;
    }
}

struct Pick {
    index: usize,
    phi: f64,
}

/// Scores every non-tabu neighbor in one direction and keeps the argmax by
/// lookahead value, ties to the smallest index. Also counts how many
/// neighbors exist at all, which distinguishes "all tabu" from "maximal".
fn pick_move<C: Criterion + ?Sized>(
    state: &mut SearchState,
    problem: &DesignProblem,
    criterion: &C,
    n_round: u32,
    dir: Direction,
) -> (usize, Option<Pick>) {
    let mut available = 0;
    let mut best: Option<(Pick, f64)> = None;
    let sign = match dir {
        Direction::Up => 1.0,
        Direction::Down => -1.0,
    };
    for i in 0..problem.n() {
        let open = match dir {
            Direction::Up => problem.constraints().can_add(&state.residuals, i),
            Direction::Down => state.current.count(i) > problem.base().count(i),
        };
        if !open {
            continue;
        }
        available += 1;
        let s = &mut state.scratch;
        s.cand_info.clone_from(&state.info);
        s.cand_info.add_point(problem.regressor(i), sign);
        let phi = criterion.evaluate(&s.cand_info);
        if state.tabu.contains(&attr(phi, n_round)) {
            continue;
        }
        s.cand_res.clone_from(&state.residuals);
        problem.constraints().step_residuals(&mut s.cand_res, i, dir);
        problem.headroom_into(&s.cand_res, &mut s.head);
        let g = problem.gamma_from_residuals(&s.cand_res, &s.head);
        let value = if g > 0.0 {
            s.look_info.clone_from(&s.cand_info);
            for (j, &dj) in s.head.iter().enumerate() {
                if dj > 0 {
                    s.look_info.add_point(problem.regressor(j), g * dj as f64);
                }
            }
            criterion.evaluate(&s.look_info)
        } else {
            phi
        };
        if best.as_ref().is_none_or(|(_, bv)| value > *bv) {
            best = Some((Pick { index: i, phi }, value));
        }
    }
    (available, best.map(|(p, _)| p))
}

/// Uniform draw over all feasible one-unit moves, the blockage escape.
fn random_move(state: &mut SearchState, problem: &DesignProblem) -> (Direction, usize) {
    let mut moves = Vec::new();
    for i in 0..problem.n() {
        if state.current.count(i) > problem.base().count(i) {
            moves.push((Direction::Down, i));
        }
    }
    for i in 0..problem.n() {
        if problem.constraints().can_add(&state.residuals, i) {
            moves.push((Direction::Up, i));
        }
    }
    assert!(
        !moves.is_empty(),
        "no feasible one-unit move; the base design must have been maximal"
    );
    moves[state.rng.random_range(0..moves.len())]
}

/// One iteration of the excursion loop.
pub fn excursion_step<C: Criterion + ?Sized>(
    state: &mut SearchState,
    problem: &DesignProblem,
    criterion: &C,
    config: &SearchConfig,
) -> StepReport {
    let token = attr(state.phi, config.n_round);
    let mut new_best = false;
    let kind;
    let direction;
    let index;
    let mut known_phi = None;

    if !state.tabu.contains(&token) {
        // Fresh design: remember it, then try to climb.
        state.tabu.insert(token);
        let (up_count, up_pick) = pick_move(state, problem, criterion, config.n_round, Direction::Up);
        if let Some(p) = up_pick {
            kind = StepKind::Forward;
            direction = Direction::Up;
            index = p.index;
            known_phi = Some(p.phi);
        } else {
            if up_count == 0 && state.best_phi < state.phi {
                state.best.clone_from(&state.current);
                state.best_phi = state.phi;
                state.back_count = 0;
                new_best = true;
            }
            let (_, down_pick) =
                pick_move(state, problem, criterion, config.n_round, Direction::Down);
            if let Some(p) = down_pick {
                kind = StepKind::Backward;
                direction = Direction::Down;
                index = p.index;
                known_phi = Some(p.phi);
                state.back_count += 1;
            } else {
                kind = StepKind::BlockageRandom;
                let (d, i) = random_move(state, problem);
                direction = d;
                index = i;
            }
        }
    } else {
        // Known design: prefer to retreat, then climb, then wander.
        let (_, down_pick) = pick_move(state, problem, criterion, config.n_round, Direction::Down);
        if let Some(p) = down_pick {
            kind = StepKind::Backward;
            direction = Direction::Down;
            index = p.index;
            known_phi = Some(p.phi);
            state.back_count += 1;
        } else {
            let (_, up_pick) =
                pick_move(state, problem, criterion, config.n_round, Direction::Up);
            if let Some(p) = up_pick {
                kind = StepKind::Forward;
                direction = Direction::Up;
                index = p.index;
                known_phi = Some(p.phi);
            } else {
                kind = StepKind::BlockageRandom;
                let (d, i) = random_move(state, problem);
                direction = d;
                index = i;
            }
        }
    }

    state.current.step(index, direction);
    problem
        .constraints()
        .step_residuals(&mut state.residuals, index, direction);
    state.info.add_point(
        problem.regressor(index),
        match direction {
            Direction::Up => 1.0,
            Direction::Down => -1.0,
        },
    );
    state.steps_since_rebuild += 1;
    if state.steps_since_rebuild >= REBUILD_PERIOD {
        state.residuals = problem.residuals(&state.current);
        state.info = InformationMatrix::from_exact(problem, &state.current);
        state.phi = criterion.evaluate(&state.info);
        state.steps_since_rebuild = 0;
    } else {
        state.phi = known_phi.unwrap_or_else(|| criterion.evaluate(&state.info));
    }
    debug_assert!(problem.is_feasible(&state.current));
    let phi_after_move = state.phi;

    let mut failure_restart = false;
    if state.back_count > config.back_max {
        state.jump_to_best(problem, criterion);
        failure_restart = true;
    }

    StepReport {
        kind,
        direction,
        index,
        phi: phi_after_move,
        new_best,
        failure_restart,
    }
}

/// Result of a full (multi-restart) run.
#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub best: ExactDesign,
    pub best_phi: f64,
    pub attribute: AttributeToken,
    /// Total excursion steps across all restarts.
    pub iterations: u64,
    pub restarts: u32,
    pub elapsed: Duration,
}

#[derive(Debug, Error, PartialEq)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Init(#[from] ApproximateInitError),
}

/// Derives a decorrelated stream seed for one restart (splitmix64 finisher).
fn restart_seed(seed: u64, restart: u32) -> u64 {
    let mut z = seed ^ (u64::from(restart) + 1).wrapping_mul(0x9E3779B97F4A7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// Runs `config.restarts` independent excursion searches and returns the best
/// design found, streaming trace events into `sink`.
///
/// Each restart gets its own RNG stream and tabu list plus the full time or
/// stall budget. With stall-limit stopping the outcome is reproducible bit
/// for bit from the seed.
pub fn run_with_sink<C: Criterion + ?Sized>(
    problem: &DesignProblem,
    criterion: &C,
    config: &SearchConfig,
    sink: &mut dyn FnMut(TraceEvent),
) -> Result<RunOutcome, RunError> {
    config.validate()?;
    let clock = Instant::now();
    let mut winner: Option<(ExactDesign, f64)> = None;
    let mut iterations = 0u64;
    for restart in 0..config.restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(restart_seed(config.seed, restart));
        let initial = match &config.init {
            InitStrategy::Base => initial_from_base(problem),
            InitStrategy::RandomWalk { walk_length } => {
                initial_random(problem, &mut rng, *walk_length)
            }
            InitStrategy::FromApproximate(approx) => initial_from_approximate(problem, approx)?,
        };
        let mut state = SearchState::new(problem, criterion, initial, rng);
        sink(TraceEvent {
            kind: StepKind::NewBest,
            phi: state.best_phi,
            attribute: attr(state.best_phi, config.n_round),
            elapsed: clock.elapsed(),
        });
        let restart_clock = Instant::now();
        let mut stall = 0u64;
        loop {
            if let Some(limit) = config.time_limit {
                if restart_clock.elapsed() > limit {
                    break;
                }
            }
            if let Some(limit) = config.stall_limit {
                if stall >= limit {
                    break;
                }
            }
            let previous_best = state.best_phi;
            let report = excursion_step(&mut state, problem, criterion, config);
            iterations += 1;
            if report.new_best {
                sink(TraceEvent {
                    kind: StepKind::NewBest,
                    phi: state.best_phi,
                    attribute: attr(state.best_phi, config.n_round),
                    elapsed: clock.elapsed(),
                });
            }
            sink(TraceEvent {
                kind: report.kind,
                phi: report.phi,
                attribute: attr(report.phi, config.n_round),
                elapsed: clock.elapsed(),
            });
            if report.failure_restart {
                sink(TraceEvent {
                    kind: StepKind::Restart,
                    phi: state.phi,
                    attribute: attr(state.phi, config.n_round),
                    elapsed: clock.elapsed(),
                });
            }
            if state.best_phi > previous_best {
                stall = 0;
            } else {
                stall += 1;
            }
        }
        if winner
            .as_ref()
            .is_none_or(|(_, phi)| state.best_phi > *phi)
        {
            winner = Some((state.best.clone(), state.best_phi));
        }
    }
    let (best, best_phi) = winner.expect("at least one restart");
    Ok(RunOutcome {
        attribute: attr(best_phi, config.n_round),
        best,
        best_phi,
        iterations,
        restarts: config.restarts,
        elapsed: clock.elapsed(),
    })
}

/// Like [`run_with_sink`], collecting the trace in memory.
pub fn run<C: Criterion + ?Sized>(
    problem: &DesignProblem,
    criterion: &C,
    config: &SearchConfig,
) -> Result<(RunOutcome, SearchTrace), RunError> {
    let mut trace = SearchTrace::default();
    let outcome = run_with_sink(problem, criterion, config, &mut |e| trace.events.push(e))?;
    Ok((outcome, trace))
}
