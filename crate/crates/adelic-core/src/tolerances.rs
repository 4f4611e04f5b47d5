//! Numerical tolerances and search limits used across the crate.

/// Default relative duality gap of the John and Lowner solvers (absolute gap in log det).
pub const ELLIPSOID_TOL: f64 = 1e-7;

/// Iteration cap of the damped Newton barrier solver.
pub const NEWTON_ITERATION_CAP: usize = 500;

/// Iteration cap of the coordinate ascent (Khachiyan) solver.
pub const KHACHIYAN_ITERATION_CAP: usize = 200_000;

/// Tolerance for slope identities and polygon comparisons.
pub const SLOPE_TOL: f64 = 1e-9;

/// Tolerance for the exact hermitian identities checked in suites.
pub const IDENTITY_TOL: f64 = 1e-8;

/// Semistability threshold on the spread of the slopes.
pub const SEMISTABLE_TOL: f64 = 1e-9;

/// Relative slack added to enumeration radii to absorb floating point rounding.
pub const ENUM_RADIUS_SLACK: f64 = 1e-9;

/// Node budget of a single Fincke-Pohst enumeration.
pub const ENUM_NODE_BUDGET: u64 = 50_000_000;

/// Maximal rank accepted by the polygon and minima searches.
pub const RANK_GUARD: usize = 8;

/// Number of radius escalation rounds for an uncertified polygon search.
pub const RADIUS_ESCALATION_ROUNDS: usize = 3;

/// Factor applied to the radius at each escalation round.
pub const RADIUS_ESCALATION_FACTOR: f64 = 1.5;

/// Largest number of multi-indices accepted by the gamma computation.
pub const GAMMA_SIZE_GUARD: u64 = 10_000_000;

/// Largest number of constraint subsets examined by exact polytope enumeration.
pub const POLYTOPE_SUBSET_GUARD: u64 = 5_000_000;

/// Number of standard errors allowed when a Monte Carlo estimate enters a check.
pub const MC_SIGMAS: f64 = 3.0;

/// Standard errors allowed for Monte Carlo checks drawn repeatedly inside randomized suites.
pub const SUITE_MC_SIGMAS: f64 = 5.0;
