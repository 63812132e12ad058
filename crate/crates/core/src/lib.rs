//! Distributor transportation planning under crisp, fuzzy and probabilistic
//! uncertainty.
//!
//! * [`interval`] and [`fuzzy`]: interval arithmetic, trapezoidal fuzzy
//!   numbers and probabilistic ordering.
//! * [`ingest`]: samples, histograms and Gaussians to trapezoids.
//! * [`simplex`] and [`transport`]: crisp LP and transportation solvers.
//! * [`model`]: the distributor-benefit model.
//! * [`fuzzy_solver`]: α-cut corner solution of the fuzzy model.
//! * [`monte_carlo`]: Gaussian scenario sampling and comparison with the
//!   fuzzy result.

pub mod error;
pub mod fuzzy;
pub mod fuzzy_solver;
pub mod ingest;
pub mod interval;
pub mod model;
pub mod monte_carlo;
pub mod problem_file;
pub mod simplex;
pub mod table1;
pub mod transport;

pub use error::{Error, Result};
pub use fuzzy::{AlphaGrid, Trapezoid};
pub use fuzzy_solver::{solve_fuzzy, FuzzySolution, Quantity};
pub use ingest::{BinnedHistogram, ConfidenceLevels, EmpiricalCdf, SampleSet};
pub use interval::Interval;
pub use model::{CrispInstance, CrispSolution, DistributionProblem};
pub use monte_carlo::{GaussianSpec, McResult, ProblemSpecs};
pub use simplex::{LinearProgram, Relation, Sense, SimplexSolution, Status};
pub use transport::{TransportInstance, TransportPlan};
