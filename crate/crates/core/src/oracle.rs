//! Exhaustive ground truth for small problems.
//!
//! Everything here trades speed for certainty: complete enumeration of the
//! feasible lattice, the exact argmax of a criterion over it, a census of
//! strict local optima, and a spanning-tree counter that works by trying
//! every edge subset. The heuristic and the closed-form counts are tested
//! against these on problem sizes where exhaustion is affordable. Oversized
//! requests are refused outright rather than truncated.

use std::collections::HashMap;

use thiserror::Error;

use crate::criteria::Criterion;
use crate::design::{DesignProblem, Direction, ExactDesign, Residuals};
use crate::problems::Multigraph;

/// Default ceiling on the number of lattice nodes an enumeration may visit.
pub const DEFAULT_NODE_CAP: u64 = 10_000_000;

const BRUTE_VERTEX_CAP: usize = 8;
const BRUTE_EDGE_CAP: u64 = 20;

/// Two criterion values within this relative distance count as tied when the
/// argmax set is collected.
const TIE_REL: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("enumeration bound {bound:.3e} exceeds the cap of {cap} nodes")]
    CapExceeded { bound: f64, cap: u64 },
    #[error("brute-force tree count handles at most {cap} vertices, got {got}")]
    TooManyVertices { got: usize, cap: usize },
    #[error("brute-force tree count handles at most {cap} edges, got {got}")]
    TooManyEdges { got: u64, cap: u64 },
}

/// Upper bound on the nodes a depth-first enumeration can touch: the product
/// of per-coordinate headrooms at the base, each plus one.
pub fn node_bound(problem: &DesignProblem) -> f64 {
    problem
        .headroom(problem.base())
        .iter()
        .map(|&d| d as f64 + 1.0)
        .product()
}

fn check_cap(problem: &DesignProblem, cap: u64) -> Result<(), OracleError> {
    let bound = node_bound(problem);
    if bound > cap as f64 {
        return Err(OracleError::CapExceeded { bound, cap });
    }
    Ok(())
}

/// Depth-first walk over every feasible design in ascending lexicographic
/// order. The visitor receives each design's counts and residuals.
fn for_each_feasible(
    problem: &DesignProblem,
    cap: u64,
    visitor: &mut dyn FnMut(&[u64], &Residuals),
) -> Result<(), OracleError> {
    check_cap(problem, cap)?;
    let mut counts = problem.base().counts().to_vec();
    let res = problem.residuals(problem.base());
    walk(problem, 0, &mut counts, &res, visitor);
    Ok(())
}

fn walk(
    problem: &DesignProblem,
    level: usize,
    counts: &mut Vec<u64>,
    res: &Residuals,
    visitor: &mut dyn FnMut(&[u64], &Residuals),
) {
    if level == problem.n() {
        visitor(counts, res);
        return;
    }
    let mut local = res.clone();
    loop {
        walk(problem, level + 1, counts, &local, visitor);
        if problem.constraints().can_add(&local, level) {
            counts[level] += 1;
            problem.constraints().step_residuals(&mut local, level, Direction::Up);
        } else {
            counts[level] = problem.base().count(level);
            return;
        }
    }
}

/// Collects the whole feasible set in lexicographic order.
pub fn enumerate_feasible(
    problem: &DesignProblem,
    cap: Option<u64>,
) -> Result<Vec<ExactDesign>, OracleError> {
    let mut out = Vec::new();
    for_each_feasible(problem, cap.unwrap_or(DEFAULT_NODE_CAP), &mut |counts, _| {
        out.push(ExactDesign::new(counts.to_vec()));
    })?;
    Ok(out)
}

/// Everything the enumeration learns about a problem.
#[derive(Clone, Debug)]
pub struct EnumerationReport {
    pub feasible_count: u64,
    /// Feasible designs with no feasible forward step, in lexicographic order.
    pub maximal_designs: Vec<ExactDesign>,
    /// The exact argmax set of the criterion; ties within a relative
    /// tolerance of 1e-12 are reported together.
    pub global_optima: Vec<ExactDesign>,
    /// Criterion value attained by the global optima.
    pub best_phi: f64,
    /// Designs strictly better than every distinct feasible design within
    /// distance one in every coordinate.
    pub local_optima: Vec<ExactDesign>,
}

/// Exhaustively evaluates the criterion on the whole feasible set.
pub fn enumeration_report<C: Criterion + ?Sized>(
    problem: &DesignProblem,
    criterion: &C,
    cap: Option<u64>,
) -> Result<EnumerationReport, OracleError> {
    let cap = cap.unwrap_or(DEFAULT_NODE_CAP);
    let mut feasible_count = 0u64;
    let mut maximal_designs = Vec::new();
    let mut global_optima: Vec<ExactDesign> = Vec::new();
    let mut best_phi = f64::NEG_INFINITY;
    let mut phis: HashMap<Box<[u64]>, f64> = HashMap::new();
    for_each_feasible(problem, cap, &mut |counts, res| {
        feasible_count += 1;
        let design = ExactDesign::new(counts.to_vec());
        let phi = criterion.evaluate_exact(problem, &design);
        if (0..problem.n()).all(|i| !problem.constraints().can_add(res, i)) {
            maximal_designs.push(design.clone());
        }
        if global_optima.is_empty() {
            best_phi = phi;
            global_optima.push(design.clone());
        } else if phi > best_phi + TIE_REL * best_phi.abs() {
            best_phi = phi;
            global_optima.clear();
            global_optima.push(design.clone());
        } else if phi >= best_phi - TIE_REL * best_phi.abs() {
            best_phi = best_phi.max(phi);
            global_optima.push(design.clone());
        }
        phis.insert(counts.to_vec().into_boxed_slice(), phi);
    })?;

    // The box-neighborhood sweep only varies coordinates that can move at
    // all; still, its cost is feasible_count * 3^q, so oversized sweeps are
    // refused like oversized enumerations.
    let movable: Vec<usize> = problem
        .headroom(problem.base())
        .iter()
        .enumerate()
        .filter(|&(_, &d)| d > 0)
        .map(|(i, _)| i)
        .collect();
    let sweep = feasible_count as f64 * 3f64.powi(movable.len() as i32);
    if sweep > 1e9 {
        return Err(OracleError::CapExceeded { bound: sweep, cap });
    }
    let mut local_optima = Vec::new();
    'designs: for (counts, &phi) in &phis {
        let mut probe = counts.to_vec();
        // Ternary odometer over {-1, 0, +1} offsets on the movable
        // coordinates; the design survives as a strict local optimum only if
        // every distinct feasible box neighbor scores strictly worse.
        let mut offsets = vec![-1i8; movable.len()];
        loop {
            if offsets.iter().any(|&o| o != 0) {
                let mut valid = true;
                for (&i, &o) in movable.iter().zip(&offsets) {
                    match counts[i].checked_add_signed(i64::from(o)) {
                        Some(c) => probe[i] = c,
                        None => {
                            valid = false;
                            break;
                        }
                    }
                }
                if valid {
                    if let Some(&other) = phis.get(probe.as_slice()) {
                        if other >= phi {
                            continue 'designs;
                        }
                    }
                }
            }
            let mut pos = 0;
            while pos < offsets.len() && offsets[pos] == 1 {
                offsets[pos] = -1;
                pos += 1;
            }
            if pos == offsets.len() {
                local_optima.push(ExactDesign::new(counts.to_vec()));
                continue 'designs;
            }
            offsets[pos] += 1;
        }
    }
    local_optima.sort_by(|a, b| a.counts().cmp(b.counts()));

    Ok(EnumerationReport {
        feasible_count,
        maximal_designs,
        global_optima,
        best_phi,
        local_optima,
    })
}

/// The exact argmax of the criterion over the feasible set.
pub fn global_optimum<C: Criterion + ?Sized>(
    problem: &DesignProblem,
    criterion: &C,
    cap: Option<u64>,
) -> Result<EnumerationReport, OracleError> {
    enumeration_report(problem, criterion, cap)
}

/// Census of strict local optima under the all-coordinate box neighborhood.
pub fn local_optima<C: Criterion + ?Sized>(
    problem: &DesignProblem,
    criterion: &C,
    cap: Option<u64>,
) -> Result<Vec<ExactDesign>, OracleError> {
    Ok(enumeration_report(problem, criterion, cap)?.local_optima)
}

/// Counts spanning trees by testing every subset of `v - 1` edges, parallel
/// edges distinct. A slow, independent check of the Laplacian determinant.
pub fn spanning_tree_brute(graph: &Multigraph) -> Result<u64, OracleError> {
    let v = graph.vertices();
    if v > BRUTE_VERTEX_CAP {
        return Err(OracleError::TooManyVertices {
            got: v,
            cap: BRUTE_VERTEX_CAP,
        });
    }
    let total = graph.edge_count();
    if total > BRUTE_EDGE_CAP {
        return Err(OracleError::TooManyEdges {
            got: total,
            cap: BRUTE_EDGE_CAP,
        });
    }
    let mut edges = Vec::with_capacity(total as usize);
    for (t1, t2, mult) in graph.edges() {
        for _ in 0..mult {
            edges.push((t1 - 1, t2 - 1));
        }
    }
    let need = v - 1;
    if edges.len() < need {
        return Ok(0);
    }
    let mut count = 0u64;
    let mut chosen: Vec<usize> = (0..need).collect();
    loop {
        if is_spanning_tree(v, chosen.iter().map(|&e| edges[e])) {
            count += 1;
        }
        // Next lexicographic combination of `need` edge indices.
        let mut pos = need;
        loop {
            if pos == 0 {
                return Ok(count);
            }
            pos -= 1;
            if chosen[pos] < edges.len() - (need - pos) {
                chosen[pos] += 1;
                for later in pos + 1..need {
                    chosen[later] = chosen[later - 1] + 1;
                }
                break;
            }
        }
    }
}

/// `v - 1` edges form a spanning tree exactly when they merge all vertices
/// into one component without a cycle.
fn is_spanning_tree(v: usize, edges: impl Iterator<Item = (usize, usize)>) -> bool {
    let mut parent: Vec<usize> = (0..v).collect();
    fn root(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for (a, b) in edges {
        let (ra, rb) = (root(&mut parent, a), root(&mut parent, b));
        if ra == rb {
            return false;
        }
        parent[ra] = rb;
    }
    true
}
