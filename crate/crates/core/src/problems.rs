//! Three benchmark problem families and the graph tools that certify one of
//! them.
//!
//! * Block designs with blocks of size two: the design points are treatment
//!   pairs, the feasible set is capped by a block budget, per-treatment usage
//!   limits, or both. The determinant of the information matrix equals the
//!   spanning-tree count of the design's concurrence graph, so known
//!   tree-count formulas give exact optimal values to test against.
//! * A full quadratic model in two factors on a 54-point grid with marginal
//!   material limits per level of the first factor and a budget row that
//!   prices the second factor.
//! * Sampling-time selection for a compartment model of fluoranthene uptake
//!   and elimination, with hour-of-week dependent sampling wages, a price
//!   budget, and at most one observation per hour.

use crate::design::{DesignProblem, ExactDesign, ProblemError};

/// Index of the treatment pair `(t1, t2)` in the lexicographic listing of all
/// pairs `1 <= t1 < t2 <= v`, counting from 1.
///
/// Panics unless `1 <= t1 < t2 <= v`.
pub fn pair_index(t1: usize, t2: usize, v: usize) -> usize {
    assert!(
        1 <= t1 && t1 < t2 && t2 <= v,
        "pair ({t1}, {t2}) out of order for v = {v}"
    );
    t1 * v + t2 - v - (t1 * t1 + t1) / 2
}

/// All treatment pairs of `1..=v` in index order.
fn all_pairs(v: usize) -> impl Iterator<Item = (usize, usize)> {
    (1..v).flat_map(move |t1| (t1 + 1..=v).map(move |t2| (t1, t2)))
}

/// Parameters of a block-design problem with blocks of size two.
///
/// At least one of the two constraint groups must be present; setting both
/// produces both groups of rows.
#[derive(Clone, Debug)]
pub struct BlockProblemSpec {
    /// Number of treatments, at least 3.
    pub v: usize,
    /// Cap on the total number of blocks (one all-ones constraint row).
    pub block_limit: Option<u64>,
    /// Per-treatment usage caps (`v` rows, one per treatment).
    pub treatment_limits: Option<Vec<u64>>,
}

impl BlockProblemSpec {
    pub fn with_block_limit(v: usize, blocks: u64) -> Self {
        BlockProblemSpec {
            v,
            block_limit: Some(blocks),
            treatment_limits: None,
        }
    }

    pub fn with_treatment_limits(v: usize, limits: Vec<u64>) -> Self {
        BlockProblemSpec {
            v,
            block_limit: None,
            treatment_limits: Some(limits),
        }
    }
}

/// Builds the design problem for comparing pairs of treatments in blocks of
/// size two.
///
/// Point `pair_index(t1, t2, v)` carries the regressor `e_t1 - e_t2`
/// truncated to its first `v - 1` coordinates, so the information matrix of a
/// design is the reduced Laplacian of its concurrence graph.
pub fn block_problem(spec: &BlockProblemSpec) -> Result<DesignProblem, ProblemError> {
    if spec.v < 3 {
        return Err(ProblemError::InvalidFamily(format!(
            "block designs need at least 3 treatments, got {}",
            spec.v
        )));
    }
    if spec.block_limit.is_none() && spec.treatment_limits.is_none() {
        return Err(ProblemError::InvalidFamily(
            "block designs need a block limit, treatment limits, or both".into(),
        ));
    }
    if let Some(ref limits) = spec.treatment_limits {
        if limits.len() != spec.v {
            return Err(ProblemError::InvalidFamily(format!(
                "expected {} treatment limits, got {}",
                spec.v,
                limits.len()
            )));
        }
    }
    let v = spec.v;
    let n = v * (v - 1) / 2;
    let m = v - 1;
    let mut regressors = vec![vec![0.0; n]; m];
    let mut labels = Vec::with_capacity(n);
    for (col, (t1, t2)) in all_pairs(v).enumerate() {
        regressors[t1 - 1][col] = 1.0;
        if t2 < v {
            regressors[t2 - 1][col] = -1.0;
        }
        labels.push(format!("({t1},{t2})"));
    }
    let mut rows = Vec::new();
    let mut limits = Vec::new();
    if let Some(blocks) = spec.block_limit {
        rows.push(vec![1.0; n]);
        limits.push(blocks as f64);
    }
    if let Some(ref caps) = spec.treatment_limits {
        for t in 1..=v {
            let mut row = vec![0.0; n];
            for (col, (t1, t2)) in all_pairs(v).enumerate() {
                if t == t1 || t == t2 {
                    row[col] = 1.0;
                }
            }
            rows.push(row);
            limits.push(caps[t - 1] as f64);
        }
    }
    DesignProblem::new(regressors, rows, limits, vec![0; n], Some(labels))
}

/// Undirected multigraph on vertices `1..=v` without self-loops, stored as
/// edge multiplicities in pair-index order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Multigraph {
    v: usize,
    multiplicity: Vec<u64>,
}

impl Multigraph {
    /// Edgeless graph on `v >= 2` vertices.
    pub fn new(v: usize) -> Self {
        assert!(v >= 2, "a multigraph needs at least 2 vertices");
        Multigraph {
            v,
            multiplicity: vec![0; v * (v - 1) / 2],
        }
    }

    pub fn vertices(&self) -> usize {
        self.v
    }

    pub fn multiplicity(&self, t1: usize, t2: usize) -> u64 {
        let (a, b) = if t1 < t2 { (t1, t2) } else { (t2, t1) };
        self.multiplicity[pair_index(a, b, self.v) - 1]
    }

    pub fn add_edges(&mut self, t1: usize, t2: usize, count: u64) {
        let (a, b) = if t1 < t2 { (t1, t2) } else { (t2, t1) };
        self.multiplicity[pair_index(a, b, self.v) - 1] += count;
    }

    /// Total edge count with multiplicity.
    pub fn edge_count(&self) -> u64 {
        self.multiplicity.iter().sum()
    }

    /// Edges with nonzero multiplicity as `(t1, t2, multiplicity)`.
    pub fn edges(&self) -> Vec<(usize, usize, u64)> {
        all_pairs(self.v)
            .zip(&self.multiplicity)
            .filter(|&(_, &m)| m > 0)
            .map(|((t1, t2), &m)| (t1, t2, m))
            .collect()
    }

    /// Complete multipartite graph whose parts have the given sizes.
    pub fn complete_multipartite(sizes: &[usize]) -> Self {
        assert!(sizes.len() >= 2, "need at least 2 parts");
        assert!(sizes.iter().all(|&k| k >= 1), "parts must be nonempty");
        let v: usize = sizes.iter().sum();
        let mut part = Vec::with_capacity(v);
        for (p, &k) in sizes.iter().enumerate() {
            part.extend(std::iter::repeat(p).take(k));
        }
        let mut g = Multigraph::new(v);
        for (t1, t2) in all_pairs(v) {
            if part[t1 - 1] != part[t2 - 1] {
                g.add_edges(t1, t2, 1);
            }
        }
        g
    }
}

/// Concurrence graph of a block design: the multiplicity of the edge
/// `(t1, t2)` is the design's count at the corresponding pair point.
pub fn concurrence_graph(design: &ExactDesign, v: usize) -> Multigraph {
    assert_eq!(
        design.len(),
        v * (v - 1) / 2,
        "design length does not match the pair count of v = {v}"
    );
    Multigraph {
        v,
        multiplicity: design.counts().to_vec(),
    }
}

/// Number of spanning trees via the determinant of a reduced Laplacian.
///
/// The determinant is computed in double precision and rounded; an assertion
/// confirms the residual is far below one, which holds comfortably for the
/// graph sizes this crate works with (counts up to about 10^13).
pub fn matrix_tree_count(graph: &Multigraph) -> u64 {
    let v = graph.v;
    let n = v - 1;
    let mut lap = vec![0.0f64; n * n];
    for ((t1, t2), &mult) in all_pairs(v).zip(&graph.multiplicity) {
        let (i, j, m) = (t1 - 1, t2 - 1, mult as f64);
        if i < n {
            lap[i * n + i] += m;
        }
        if j < n {
            lap[j * n + j] += m;
        }
        if i < n && j < n {
            lap[i * n + j] -= m;
            lap[j * n + i] -= m;
        }
    }
    let det = determinant(&mut lap, n);
    let rounded = det.round();
    assert!(rounded >= 0.0, "reduced Laplacian determinant was negative");
    if rounded == 0.0 {
        assert!(det.abs() < 1e-6, "residual too large for a zero count");
    } else {
        assert!(
            (det - rounded).abs() < 1e-6 * rounded,
            "determinant {det} too far from integer {rounded}"
        );
    }
    rounded as u64
}

/// Determinant by Gaussian elimination with partial pivoting. Consumes the
/// row-major buffer.
fn determinant(a: &mut [f64], n: usize) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let mut det = 1.0;
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&r, &s| a[r * n + col].abs().total_cmp(&a[s * n + col].abs()))
            .unwrap();
        if a[pivot_row * n + col] == 0.0 {
            return 0.0;
        }
        if pivot_row != col {
            for j in 0..n {
                a.swap(col * n + j, pivot_row * n + j);
            }
            det = -det;
        }
        let pivot = a[col * n + col];
        det *= pivot;
        for row in col + 1..n {
            let factor = a[row * n + col] / pivot;
            if factor == 0.0 {
                continue;
            }
            for j in col..n {
                a[row * n + j] -= factor * a[col * n + j];
            }
        }
    }
    det
}

/// Spanning-tree count of the complete multipartite graph with `v` vertices
/// split into parts of the given sizes: `v^(p-2) * prod (v - k_j)^(k_j - 1)`.
///
/// Panics if the sizes do not partition `v` or fewer than two parts are
/// given; the closed form only covers `p >= 2`.
pub fn multipartite_tree_count(v: usize, sizes: &[usize]) -> u128 {
    let p = sizes.len();
    assert!(p >= 2, "need at least 2 parts");
    assert_eq!(
        sizes.iter().sum::<usize>(),
        v,
        "part sizes must partition the vertex set"
    );
    let mut count = (v as u128)
        .checked_pow(p as u32 - 2)
        .expect("tree count overflows u128");
    for &k in sizes {
        assert!(k >= 1, "parts must be nonempty");
        let factor = ((v - k) as u128)
            .checked_pow(k as u32 - 1)
            .expect("tree count overflows u128");
        count = count.checked_mul(factor).expect("tree count overflows u128");
    }
    count
}

/// Per-level caps on the first factor of the quadratic problem, one per grid
/// value of `x1`.
pub const QUADRATIC_MARGINALS: [f64; 18] = [
    1.0, 3.0, 14.0, 59.0, 52.0, 29.0, 25.0, 32.0, 36.0, 29.0, 36.0, 38.0, 12.0, 10.0, 8.0, 2.0,
    3.0, 3.0,
];

/// Grid values of the first factor in tenths, so indexing stays exact: the
/// value 95.0 is absent from the physical levels.
const X1_TENTHS: [i32; 18] = [
    949, 951, 952, 953, 954, 955, 956, 957, 958, 959, 960, 961, 962, 963, 964, 965, 966, 967,
];

const X2_LEVELS: [i32; 3] = [0, 10, 20];

/// Full quadratic model in two factors on the 54-point grid
/// `{94.9, 95.1, ..., 96.7} x {0, 10, 20}`.
///
/// Constraint rows: 18 marginal caps (one per `x1` level, see
/// [`QUADRATIC_MARGINALS`]) followed by one cost row charging 1 price unit
/// per percent of the second factor, capped at `budget`.
pub fn quadratic_problem(budget: f64) -> Result<DesignProblem, ProblemError> {
    if !(budget > 0.0) || !budget.is_finite() {
        return Err(ProblemError::InvalidFamily(format!(
            "budget must be positive and finite, got {budget}"
        )));
    }
    let n = X1_TENTHS.len() * X2_LEVELS.len();
    let mut regressors = vec![vec![0.0; n]; 6];
    let mut cost = vec![0.0; n];
    let mut labels = Vec::with_capacity(n);
    let mut marginals = vec![vec![0.0; n]; X1_TENTHS.len()];
    for (g, &tenths) in X1_TENTHS.iter().enumerate() {
        for (j, &x2i) in X2_LEVELS.iter().enumerate() {
            let col = 3 * g + j;
            let x1 = tenths as f64 / 10.0;
            let x2 = x2i as f64;
            regressors[0][col] = 1.0;
            regressors[1][col] = x1;
            regressors[2][col] = x2;
            regressors[3][col] = x1 * x1;
            regressors[4][col] = x2 * x2;
            regressors[5][col] = x1 * x2;
            cost[col] = x2;
            marginals[g][col] = 1.0;
            labels.push(format!("({}.{}, {})", tenths / 10, tenths % 10, x2i));
        }
    }
    let mut rows = marginals;
    let mut limits = QUADRATIC_MARGINALS.to_vec();
    rows.push(cost);
    limits.push(budget);
    DesignProblem::new(regressors, rows, limits, vec![0; n], Some(labels))
}

/// Mean internal fluoranthene concentration after `t` hours: uptake at rate
/// `theta1` for the first 72 hours, elimination at rate `theta2` throughout.
pub fn mu_concentration(t: u32, theta1: f64, theta2: f64) -> f64 {
    let t = f64::from(t);
    let u = (t - 72.0).max(0.0);
    theta1 / theta2 * ((-theta2 * u).exp() - (-theta2 * t).exp())
}

/// Gradient of [`mu_concentration`] in the two rates, the regressor of the
/// linearized sampling-time model.
pub fn mu_gradient(t: u32, theta1: f64, theta2: f64) -> [f64; 2] {
    let t = f64::from(t);
    let u = (t - 72.0).max(0.0);
    let e_u = (-theta2 * u).exp();
    let e_t = (-theta2 * t).exp();
    let d1 = (e_u - e_t) / theta2;
    let d2 = -theta1 / (theta2 * theta2) * (e_u - e_t) + theta1 / theta2 * (t * e_t - u * e_u);
    [d1, d2]
}

/// Hourly wage class for a sample taken `t` hours after the start hour `s`.
///
/// Hour 0 of the week is Monday 00:00. Weekend wages (2.0) apply on
/// [Friday 19:00, Monday 06:00), regular wages (1.0) on weekday working hours
/// [08:00, 17:00), and off-hours wages (1.5) everywhere else; the half-open
/// windows make the three classes a partition of the week.
pub fn cost_class(s: u32, t: u32) -> f64 {
    assert!(s < 168, "start hour must lie in 0..168");
    assert!(t <= 144, "offset must lie in 0..=144");
    let h = (s + t) % 168;
    let (day, hour) = (h / 24, h % 24);
    if h >= 115 || h < 6 {
        2.0
    } else if day < 5 && (8..17).contains(&hour) {
        1.0
    } else {
        1.5
    }
}

/// Parameters of the fluoranthene sampling-time problem.
#[derive(Clone, Debug)]
pub struct FluorantheneSpec {
    /// Hour of the week at which the experiment starts, `0..168`.
    pub start_hour: u32,
    /// Price budget for all samples.
    pub budget: f64,
    /// Nominal uptake rate; only scales the criterion, not the ranking.
    pub theta1: f64,
    /// Nominal elimination rate the model is linearized at.
    pub theta2: f64,
}

impl Default for FluorantheneSpec {
    fn default() -> Self {
        FluorantheneSpec {
            start_hour: 0,
            budget: 13.0,
            theta1: 1.0,
            theta2: 0.2381,
        }
    }
}

impl FluorantheneSpec {
    pub fn at_start(start_hour: u32) -> Self {
        FluorantheneSpec {
            start_hour,
            ..FluorantheneSpec::default()
        }
    }
}

/// Sampling-time design problem: one point per hour `t = 0..=144`, regressors
/// from [`mu_gradient`], mandatory samples at hours 0, 72, and 144.
///
/// Constraint rows: one cost row with the wage class of each hour capped at
/// the budget, then 145 direct rows capping every count at 1.
pub fn fluoranthene_problem(spec: &FluorantheneSpec) -> Result<DesignProblem, ProblemError> {
    if spec.start_hour >= 168 {
        return Err(ProblemError::InvalidFamily(format!(
            "start hour must lie in 0..168, got {}",
            spec.start_hour
        )));
    }
    if !(spec.budget > 0.0) || !spec.budget.is_finite() {
        return Err(ProblemError::InvalidFamily(format!(
            "budget must be positive and finite, got {}",
            spec.budget
        )));
    }
    if !(spec.theta2 > 0.0) || !spec.theta2.is_finite() {
        return Err(ProblemError::InvalidFamily(format!(
            "elimination rate must be positive and finite, got {}",
            spec.theta2
        )));
    }
    if spec.theta1 == 0.0 || !spec.theta1.is_finite() {
        return Err(ProblemError::InvalidFamily(format!(
            "uptake rate must be nonzero and finite, got {}",
            spec.theta1
        )));
    }
    let n = 145;
    let mut regressors = vec![vec![0.0; n]; 2];
    let mut cost = vec![0.0; n];
    let mut labels = Vec::with_capacity(n);
    for t in 0..n as u32 {
        let grad = mu_gradient(t, spec.theta1, spec.theta2);
        regressors[0][t as usize] = grad[0];
        regressors[1][t as usize] = grad[1];
        cost[t as usize] = cost_class(spec.start_hour, t);
        labels.push(format!("t={t}"));
    }
    let mut rows = Vec::with_capacity(n + 1);
    let mut limits = Vec::with_capacity(n + 1);
    rows.push(cost);
    limits.push(spec.budget);
    for i in 0..n {
        let mut row = vec![0.0; n];
        row[i] = 1.0;
        rows.push(row);
        limits.push(1.0);
    }
    let mut base = vec![0; n];
    base[0] = 1;
    base[72] = 1;
    base[144] = 1;
    DesignProblem::new(regressors, rows, limits, base, Some(labels))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn pair_index_matches_lexicographic_listing() {
        assert_eq!(pair_index(1, 2, 3), 1);
        assert_eq!(pair_index(1, 3, 3), 2);
        assert_eq!(pair_index(2, 3, 3), 3);
        assert_eq!(pair_index(15, 16, 16), 120);
        for v in [3, 5, 16] {
            let indices: Vec<usize> = all_pairs(v).map(|(a, b)| pair_index(a, b, v)).collect();
            let expected: Vec<usize> = (1..=v * (v - 1) / 2).collect();
            assert_eq!(indices, expected, "v = {v}");
        }
    }

    #[test]
    #[should_panic(expected = "out of order")]
    fn pair_index_rejects_unordered_pairs() {
        pair_index(2, 2, 3);
    }

    #[test]
    fn small_block_problem_has_difference_regressors() {
        let p = block_problem(&BlockProblemSpec::with_block_limit(3, 3)).unwrap();
        assert_eq!((p.n(), p.m(), p.k()), (3, 2, 1));
        assert_eq!(p.regressor(0), &[1.0, -1.0]);
        assert_eq!(p.regressor(1), &[1.0, 0.0]);
        assert_eq!(p.regressor(2), &[0.0, 1.0]);
        assert_eq!(p.constraints().row(0), &[1.0, 1.0, 1.0]);
        assert_eq!(p.constraints().limits(), &[3.0]);
        assert_eq!(p.labels().unwrap()[2], "(2,3)");
    }

    #[test]
    fn treatment_limits_cap_every_pair_containing_the_treatment() {
        let mut limits = vec![4; 5];
        limits.extend(vec![5; 5]);
        limits.extend(vec![6; 5]);
        limits.push(56);
        let p = block_problem(&BlockProblemSpec::with_treatment_limits(16, limits)).unwrap();
        assert_eq!((p.n(), p.m(), p.k()), (120, 15, 16));
        for t in 1..=16 {
            let row = p.constraints().row(t - 1);
            assert_eq!(row.iter().filter(|&&x| x == 1.0).count(), 15);
            for (col, (t1, t2)) in all_pairs(16).enumerate() {
                let expected = if t == t1 || t == t2 { 1.0 } else { 0.0 };
                assert_eq!(row[col], expected);
            }
        }
        let b = p.constraints().limits();
        assert_eq!(&b[..5], &[4.0; 5]);
        assert_eq!(&b[5..10], &[5.0; 5]);
        assert_eq!(&b[10..15], &[6.0; 5]);
        assert_eq!(b[15], 56.0);
    }

    #[test]
    fn both_constraint_groups_can_coexist() {
        let spec = BlockProblemSpec {
            v: 4,
            block_limit: Some(5),
            treatment_limits: Some(vec![2, 2, 2, 2]),
        };
        let p = block_problem(&spec).unwrap();
        assert_eq!(p.k(), 5);
    }

    #[test]
    fn block_spec_validation() {
        assert!(matches!(
            block_problem(&BlockProblemSpec::with_block_limit(2, 3)),
            Err(ProblemError::InvalidFamily(_))
        ));
        let no_groups = BlockProblemSpec {
            v: 4,
            block_limit: None,
            treatment_limits: None,
        };
        assert!(matches!(
            block_problem(&no_groups),
            Err(ProblemError::InvalidFamily(_))
        ));
        assert!(matches!(
            block_problem(&BlockProblemSpec::with_treatment_limits(4, vec![1, 1])),
            Err(ProblemError::InvalidFamily(_))
        ));
    }

    #[test]
    fn concurrence_graph_mirrors_the_counts() {
        let triangle = concurrence_graph(&ExactDesign::new(vec![1, 1, 1]), 3);
        assert_eq!(triangle.edge_count(), 3);
        assert_eq!(triangle.multiplicity(1, 2), 1);
        assert_eq!(triangle.multiplicity(3, 2), 1);
        // Pairs (1,3), (1,4), (2,3), (2,4) once each: the 4-cycle K_{2,2}
        // with parts {1,2} and {3,4}.
        let cycle = concurrence_graph(&ExactDesign::new(vec![0, 1, 1, 1, 1, 0]), 4);
        assert_eq!(cycle.multiplicity(1, 2), 0);
        assert_eq!(cycle.multiplicity(3, 4), 0);
        assert_eq!(cycle.multiplicity(1, 3), 1);
        assert_eq!(cycle.multiplicity(2, 4), 1);
        assert_eq!(cycle, Multigraph::complete_multipartite(&[2, 2]));
        let empty = concurrence_graph(&ExactDesign::zeros(6), 4);
        assert_eq!(empty.edge_count(), 0);
        assert_eq!(empty.edges(), vec![]);
    }

    #[test]
    fn matrix_tree_examples() {
        assert_eq!(matrix_tree_count(&Multigraph::complete_multipartite(&[1, 1, 1])), 3);
        assert_eq!(matrix_tree_count(&Multigraph::complete_multipartite(&[2, 2])), 4);
        assert_eq!(
            matrix_tree_count(&Multigraph::complete_multipartite(&[1, 1, 1, 1])),
            16
        );
        let mut doubled = Multigraph::new(2);
        doubled.add_edges(1, 2, 2);
        assert_eq!(matrix_tree_count(&doubled), 2);
        let mut disconnected = Multigraph::new(4);
        disconnected.add_edges(1, 2, 1);
        disconnected.add_edges(3, 4, 1);
        assert_eq!(matrix_tree_count(&disconnected), 0);
        assert_eq!(matrix_tree_count(&Multigraph::new(2)), 0);
    }

    #[test]
    fn multipartite_count_matches_formula_and_laplacian() {
        assert_eq!(multipartite_tree_count(4, &[2, 2]), 4);
        assert_eq!(multipartite_tree_count(6, &[3, 3]), 81);
        assert_eq!(multipartite_tree_count(16, &[8, 8]), 4_398_046_511_104);
        assert_eq!(multipartite_tree_count(5, &[1, 4]), 1);
        for sizes in [vec![3, 3], vec![2, 3, 4], vec![1, 1, 5]] {
            let v = sizes.iter().sum();
            let g = Multigraph::complete_multipartite(&sizes);
            assert_eq!(
                u128::from(matrix_tree_count(&g)),
                multipartite_tree_count(v, &sizes),
                "sizes {sizes:?}"
            );
        }
    }

    #[test]
    #[should_panic(expected = "partition")]
    fn multipartite_count_rejects_bad_partitions() {
        multipartite_tree_count(5, &[2, 2]);
    }

    #[test]
    fn quadratic_problem_shape_and_indexing() {
        let p = quadratic_problem(1965.0).unwrap();
        assert_eq!((p.n(), p.m(), p.k()), (54, 6, 19));
        // The point listing starts (94.9, 0), (94.9, 10), (94.9, 20) and the
        // fourth point is (95.1, 0): the level 95.0 is skipped.
        let f = p.regressor(3);
        assert_eq!(f[0], 1.0);
        assert_relative_eq!(f[1], 95.1);
        assert_eq!(f[2], 0.0);
        assert_relative_eq!(f[3], 95.1 * 95.1);
        assert_eq!(p.labels().unwrap()[3], "(95.1, 0)");
        assert_eq!(p.labels().unwrap()[53], "(96.7, 20)");
        let f = p.regressor(5);
        assert_relative_eq!(f[5], 95.1 * 20.0);
        assert_relative_eq!(f[4], 400.0);
    }

    #[test]
    fn quadratic_marginal_rows_partition_the_grid() {
        let p = quadratic_problem(500.0).unwrap();
        for col in 0..54 {
            let hits: Vec<usize> = (0..18)
                .filter(|&r| p.constraints().row(r)[col] == 1.0)
                .collect();
            assert_eq!(hits, vec![col / 3]);
        }
        assert_eq!(&p.constraints().limits()[..18], &QUADRATIC_MARGINALS);
    }

    #[test]
    fn quadratic_cost_row_prices_the_additive() {
        let p = quadratic_problem(1100.0).unwrap();
        let cost = p.constraints().row(18);
        for col in 0..54 {
            assert_eq!(cost[col], [0.0, 10.0, 20.0][col % 3]);
        }
        assert_eq!(p.constraints().limits()[18], 1100.0);
        assert!(matches!(
            quadratic_problem(0.0),
            Err(ProblemError::InvalidFamily(_))
        ));
    }

    #[test]
    fn concentration_is_zero_at_start_and_peaks_at_hour_72() {
        assert_eq!(mu_concentration(0, 1.0, 0.2381), 0.0);
        assert_eq!(mu_gradient(0, 1.0, 0.2381), [0.0, 0.0]);
        let peak = mu_concentration(72, 1.0, 0.2381);
        for t in [1, 36, 100, 144] {
            assert!(mu_concentration(t, 1.0, 0.2381) < peak, "t = {t}");
        }
    }

    #[test]
    fn gradient_matches_central_differences() {
        let (t1, t2) = (1.0, 0.2381);
        let h = 1e-6;
        for t in [1, 36, 72, 73, 100, 144] {
            let g = mu_gradient(t, t1, t2);
            let fd1 = (mu_concentration(t, t1 + h, t2) - mu_concentration(t, t1 - h, t2)) / (2.0 * h);
            let fd2 = (mu_concentration(t, t1, t2 + h) - mu_concentration(t, t1, t2 - h)) / (2.0 * h);
            assert_relative_eq!(g[0], fd1, max_relative = 1e-6);
            assert_relative_eq!(g[1], fd2, max_relative = 1e-6);
        }
    }

    #[test]
    fn cost_class_examples_and_boundaries() {
        assert_eq!(cost_class(34, 0), 1.0); // Tuesday 10:00
        assert_eq!(cost_class(132, 0), 2.0); // Saturday 12:00
        assert_eq!(cost_class(7, 0), 1.5); // Monday 07:00, between windows
        assert_eq!(cost_class(114, 0), 1.5); // Friday 18:00
        assert_eq!(cost_class(115, 0), 2.0); // Friday 19:00 opens the weekend
        assert_eq!(cost_class(5, 0), 2.0); // Monday 05:00
        assert_eq!(cost_class(6, 0), 1.5); // Monday 06:00 closes the weekend
        assert_eq!(cost_class(8, 0), 1.0); // Monday 08:00 opens working hours
        assert_eq!(cost_class(16, 0), 1.0);
        assert_eq!(cost_class(17, 0), 1.5); // Monday 17:00 closes working hours
    }

    #[test]
    fn cost_class_partitions_the_week() {
        let mut hours = [0u32; 3];
        for h in 0..168 {
            match cost_class(h, 0) {
                c if c == 1.0 => hours[0] += 1,
                c if c == 1.5 => hours[1] += 1,
                _ => hours[2] += 1,
            }
        }
        assert_eq!(hours, [45, 64, 59]);
    }

    #[test]
    fn cost_class_is_periodic_in_the_total_hour() {
        for s in (0..168).step_by(7) {
            for t in (0..=144).step_by(13) {
                assert_eq!(cost_class(s, t), cost_class((s + t) % 168, 0));
            }
        }
    }

    #[test]
    fn fluoranthene_problem_shape() {
        let p = fluoranthene_problem(&FluorantheneSpec::default()).unwrap();
        assert_eq!((p.n(), p.m(), p.k()), (145, 2, 146));
        assert_eq!(p.base().count(0), 1);
        assert_eq!(p.base().count(72), 1);
        assert_eq!(p.base().count(144), 1);
        assert_eq!(p.base().size(), 3);
        for t in 0..145 {
            let g = mu_gradient(t as u32, 1.0, 0.2381);
            assert_eq!(p.regressor(t), &g);
            assert_eq!(p.constraints().row(1 + t)[t], 1.0);
            assert_eq!(p.constraints().limits()[1 + t], 1.0);
        }
        assert_eq!(p.labels().unwrap()[144], "t=144");
    }

    #[test]
    fn fluoranthene_base_cost_reflects_the_wage_windows() {
        // Starting Monday midnight: hour 0 is still weekend wage, hour 72 is
        // Thursday midnight off-hours, hour 144 is Sunday midnight weekend.
        let p = fluoranthene_problem(&FluorantheneSpec::default()).unwrap();
        let used = p.constraints().consumption(p.base().counts());
        assert_eq!(used[0], 2.0 + 1.5 + 2.0);
        let by_hand: f64 = [0, 72, 144].iter().map(|&t| cost_class(0, t)).sum();
        assert_eq!(used[0], by_hand);
    }

    #[test]
    fn fluoranthene_constructs_for_every_start_hour() {
        for s in 0..168 {
            let p = fluoranthene_problem(&FluorantheneSpec::at_start(s)).unwrap();
            let base_cost = p.constraints().consumption(p.base().counts())[0];
            assert!(base_cost <= 6.0, "s = {s}: base cost {base_cost}");
        }
    }

    #[test]
    fn fluoranthene_spec_validation() {
        let bad = FluorantheneSpec {
            start_hour: 168,
            ..FluorantheneSpec::default()
        };
        assert!(matches!(
            fluoranthene_problem(&bad),
            Err(ProblemError::InvalidFamily(_))
        ));
        let bad = FluorantheneSpec {
            budget: 0.0,
            ..FluorantheneSpec::default()
        };
        assert!(matches!(
            fluoranthene_problem(&bad),
            Err(ProblemError::InvalidFamily(_))
        ));
        let bad = FluorantheneSpec {
            theta2: -1.0,
            ..FluorantheneSpec::default()
        };
        assert!(matches!(
            fluoranthene_problem(&bad),
            Err(ProblemError::InvalidFamily(_))
        ));
        let bad = FluorantheneSpec {
            theta1: 0.0,
            ..FluorantheneSpec::default()
        };
        assert!(matches!(
            fluoranthene_problem(&bad),
            Err(ProblemError::InvalidFamily(_))
        ));
    }
}
