pub mod analytic_dist;
pub mod beamform;
pub mod error;
pub mod expcli;
pub mod montecarlo;
pub mod quad;
pub mod rng;
pub mod secrecy_metrics;
pub mod specfun;
pub mod sysmodel;
