//! Problem instances and the maps the solvers work with.

mod equation;
pub mod maps;
mod reduction;

pub use equation::{make_equation, BClass, MTensorEquation};
pub use maps::{
    jac_e, jac_f, map_e, map_f, max_step, max_step_from, newton_matrix, reg_block, reg_jacobian,
    reg_map_e, residual, PointEval,
};
pub use reduction::{is_reducible, reduce_zero_pattern, ReductionResult};
