//! Constrained flows, local minimizers and explicit mountain-pass paths.

mod flow;
mod minimizer;
mod paths;

pub use flow::{gradient_flow, FlowConfig, FlowResult, FlowStatus, TrajectoryRow};
pub use minimizer::{
    flow_adaptive, gaussian_start, gaussian_tuple, local_minimizer, start_grad2, local_minimizer_on, minimizer_region, mu_sweep, Region,
    FLOW_CELLS, FLOW_TOL,
};
pub use paths::{
    best_w_path, bubble_tuple, mp_level_estimate, mp_path_mu0, mp_path_w, region_barrier, LevelEstimate, PathKind,
    PathReport, ThresholdComparison, PATH_SAMPLES, W_PATH_CELLS,
};
