//! Large-deviation engine for the lower tail of the average squared radius of
//! uniform points on a cube.

mod mgf;
pub mod quadrature;
mod tail;

pub use mgf::{
    cube_mean, laplace_check, mgf_log, mgf_log_tensor, rate_function, LaplaceCheck, MgfLog, RateFunctionResult,
    DEFAULT_QUAD_ORDER, MAX_QUAD_LIST, MIN_QUAD_ORDER,
};
pub use tail::{clopper_pearson, mc_tail, TailEstimate, TailParams, CONFIDENCE, MIN_TAIL_SAMPLES, TAIL_CSV_HEADER};
