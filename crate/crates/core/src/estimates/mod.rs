//! Discrete counterparts of the analytic estimates: space-time `X^{s,b}`
//! norms, random probes of the bilinear null-form estimates, the modulation
//! inequality, the `H^{k-1}` product estimate and the energy bound.

pub mod admissibility;
mod gronwall;
mod inequality;
mod probe;
mod product;
mod spacetime;

pub use gronwall::{gronwall_bound, gronwall_monitor, GronwallPoint, GronwallReport, GRONWALL_SLACK};
pub use inequality::{
    check_algebraic_inequality, inequality_scan, scan_case, InequalityCase, InequalityCheck, ModulationTriple,
    Region, ScanReport, SCAN_RANGE,
};
pub use probe::{
    ensemble_field, pair_label, probe_all, probe_estimate_star2, probe_estimate_star3, probe_on_grid, probe_pair,
    probe_ratio, spacetime_nullform, Estimate, EstimateWeights, ProbeConfig, ProbeReport, ProbeSample, ProbeStats,
    DEFAULT_EPS_PRIME, PROBE_COLUMNS,
};
pub use product::{pointwise_product, product_constant, product_estimate_check, ProductCheck};
pub use spacetime::{xsb_norm, SpaceTimeField, SpaceTimeGrid, XsbParams};
