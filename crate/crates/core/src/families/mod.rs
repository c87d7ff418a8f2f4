//! Two analytic families of Bell functionals with closed-form quantum values.

mod double_tilted;
mod wolfe_yelin;

pub use double_tilted::{
    double_tilted_eigenvalues, double_tilted_functional, double_tilted_solve, DoubleTiltedParams, DoubleTiltedSolution,
};
pub use wolfe_yelin::{
    wolfe_yelin_cot_half_theta, wolfe_yelin_eigenvalue, wolfe_yelin_extended_point, wolfe_yelin_extended_realization,
    wolfe_yelin_functional, wolfe_yelin_solve, WolfeYelinParams, WolfeYelinSolution,
};
