//! Construction of efficient exact experimental designs under resource
//! constraints.
//!
//! An exact design allocates an integer number of trials to each point of a
//! finite design space. The feasible designs are those that dominate a
//! protected base design and satisfy a system of nonnegative linear resource
//! constraints, which covers limits on the number of trials, per-point caps,
//! marginal caps on groups of points, budgets with unequal prices, and any
//! combination of these. The solver searches that lattice for a design
//! maximizing an information criterion by tabu-guided excursions of
//! single-trial steps.
//!
//! Module map:
//!
//! * [`design`]: the lattice. Designs, constraint systems, residuals,
//!   neighborhoods, headroom.
//! * [`criteria`]: information matrices and the determinant criterion.
//! * [`heuristic`]: the excursion search itself.
//! * [`problems`]: generators for three benchmark families (block designs,
//!   a constrained quadratic response surface, sampling-time selection).
//! * [`oracle`]: exhaustive enumeration for small problems, used to certify
//!   the search on instances where ground truth is computable.
//!
//! ```
//! use exdes::criteria::DCriterion;
//! use exdes::design::DesignProblem;
//! use exdes::heuristic::{run, InitStrategy, SearchConfig};
//!
//! // Two design points, two resources: a size cap of 20 trials and a
//! // budget row where the second point is twice as expensive.
//! let problem = DesignProblem::new(
//!     vec![vec![1.0, 0.0], vec![0.0, 1.0]],
//!     vec![vec![1.0, 1.0], vec![1.0, 2.0]],
//!     vec![20.0, 23.0],
//!     vec![0, 0],
//!     None,
//! )?;
//! let config = SearchConfig {
//!     time_limit: None,
//!     stall_limit: Some(5_000),
//!     seed: 1,
//!     restarts: 2,
//!     init: InitStrategy::Base,
//!     ..SearchConfig::default()
//! };
//! let (outcome, _trace) = run(&problem, &DCriterion, &config)?;
//! assert_eq!(outcome.best.counts(), &[11, 6]);
//! assert!((outcome.best_phi - 66.0_f64.sqrt()).abs() < 1e-9);
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

pub mod criteria;
pub mod design;
pub mod heuristic;
pub mod oracle;
pub mod problems;
