//! Compile real linear systems `Ax = b` and eigenproblems `Ax = lambda x` into
//! QUBO models over radix-2 encodings, sample them classically, and decode
//! the binary ground states back to real solutions.
//!
//! ```
//! use qubo_linsys::{build_model1, solve_exhaustive, CrossTermPolicy, EncodingConfig, LinearSystemProblem};
//!
//! let p = LinearSystemProblem::new(
//!     vec![vec![3.0, 1.0], vec![-1.0, 2.0]],
//!     vec![-1.0, 5.0],
//!     EncodingConfig::two_sided(0, 1).unwrap(),
//! )
//! .unwrap();
//! let (qubo, registry) = build_model1(&p, CrossTermPolicy::Zeroed).unwrap();
//! let ground = solve_exhaustive(&qubo).unwrap();
//! assert_eq!(registry.decode(&ground.records[0].bits).unwrap().x, vec![-1.0, 2.0]);
//! ```

pub mod cli;
pub mod eigen;
pub mod encoding;
pub mod error;
pub mod io;
pub mod linsys;
pub mod model;
pub mod quadratize;
pub mod sampler;
pub mod verify;

pub use eigen::{assemble_eigen_poly, build_eigen_qubo, filter_nontrivial, EigenProblem};
pub use encoding::{
    apply_scaling, representable_range, DecodedSolution, EncodingConfig, Group, LambdaSign, QubitRole,
    Scheme, Sign, VariableRegistry,
};
pub use error::{Error, Result};
pub use io::{
    export_coordinate, export_vendor_script, load_problem, parse_coordinate, parse_vendor_script,
    ExportFormat, ProblemFile,
};
pub use linsys::{
    build_model1, build_model1_parallel, build_model2, estimate_cost, CostEstimate, CrossTermPolicy,
    LinearSystemProblem,
};
pub use model::{
    ising_to_qubo, poly_energy, qubo_energy, qubo_to_ising, IsingProblem, PseudoBooleanPolynomial,
    QuboProblem, Sample, SampleSet,
};
pub use quadratize::{quadratize, ReductionPlan};
pub use sampler::{ground_states, solve_exhaustive, solve_exhaustive_within, solve_sa, AnnealSchedule};
