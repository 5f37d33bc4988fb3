//! Numerical laboratory for scalar SDEs whose diffusion vanishes with a
//! Hölder power at isolated points: model definitions, regime
//! classification, Feller scale machinery, stationary densities, large
//! deviations, and deterministic Monte Carlo simulation.

pub mod classify;
pub mod density;
pub mod interval;
pub mod ldp;
pub mod model;
pub mod quad;
pub mod rng;
pub mod rootfind;
pub mod scale;
pub mod sim;

pub use classify::{
    classify, classify_saddle_node, Absorption, Blowup, ClassifyError, Existence, QsdVerdict,
    RegimeReport, StabilityStatus, StabilityVerdict, StationaryEntry, StationaryForm,
};
pub use density::{
    density_profile, granted_supports, lyapunov_exponent_sn, normalize_density,
    p_bifurcation_points, particular_solution, pitchfork_mode, saddle_node_mode,
    saddle_node_moments, stationary_density_unnormalized, DensityError, DensityProfile, Mode,
    Shape, ThresholdRecord,
};
pub use interval::Interval;
pub use ldp::{
    asymptotic_regime, exponential_rate_expansion, quasipotential, quasipotential_at_zero, CParam,
    LdpError, QuasipotentialReport, Regime,
};
pub use model::{
    check_assumptions, signed_power, AssumptionReport, AssumptionStatus, AssumptionVerdict,
    GeneralPowerParams, ModelError, ModelKind, ModelSpec,
};
pub use quad::{QuadError, QuadResult, Tolerance};
pub use rng::NormalStream;
pub use scale::{
    boundary_limits, compute_g, hitting_probability, scale_p, scale_table, scale_v,
    BoundaryReport, EndpointReport, FellerVerdict, PLimit, ScaleError, ScaleMachine, ScaleTable,
    Side, VLimit,
};
pub use sim::{
    ensemble_run, euler_maruyama_path, exit_frequencies, mean_absorption_time,
    noiseless_fixed_point, AbsorptionTimeEstimate, EnsembleStats, ExitFrequency, ExitLabel,
    Initial, LabelCounts, ParticleOutcome, PathRecord, SimConfig, SimError, SnapshotHistogram,
};
