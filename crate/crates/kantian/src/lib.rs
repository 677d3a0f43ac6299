//! Equilibrium solvers for symmetric two-player games with continuous
//! strategies: Nash and Pareto landmarks, multiplicative Kantian
//! equilibria under monotone strategy rescalings, mixed Kantian-Nasher
//! play, and evolutionary selection between the two optimization
//! protocols.
//!
//! Start with the runnable examples (`cargo run -p kantian --example
//! landmarks`) or the `kantian` binary, a thin wrapper over [`cli`].

pub mod cli;
pub mod error;
pub mod expr;
pub mod game;
pub mod interaction;
pub mod mke;
pub mod population;
pub mod rescale;

mod solve;

pub use error::{Error, Result};
pub use expr::{Dual, EvalError, Expr, ParseError};
pub use game::{
    builtin, landmarks, nash_best_response, nash_best_response_rescaled, solve_nash, solve_pareto,
    validate_assumptions, Game, Interval, Landmarks, SolverConfig, ValidatedGame,
};
pub use interaction::{
    best_response_curves, build_type_matrix, kn_representative, select_focal,
    solve_kantian_nasher, BrCurvePoint, KnEquilibrium, TypeGameMatrix,
};
pub use mke::{
    branch_of, efficient_symmetric_mke, kantian_best_response, kantian_foc, kantian_objective,
    solve_symmetric_mke, verify_mke, Branch, KbrRoot, MkeResult, Verification, ZProfile,
};
pub use population::{
    check_spne, equilibrium_stage_plan, ess_check, mean_payoffs, replicator_simulate,
    stage_payoffs, EssReport, PopulationState, SpneReport, StagePayoffs, StagePlan, TerminalState,
    Trajectory, TrajectorySample,
};
pub use rescale::{efficient_rescaling, is_proportional, Rescaling, RescalingKind};
