//! Classical sparse-recovery baselines: ISTA and OMP, plus the CS-MRI and
//! sparse-view CT image reconstructions built on ISTA.

mod image;
mod operator;
mod solvers;

pub use image::{cs_reconstruct_ct, cs_reconstruct_image, cs_reconstruct_image_report};
pub use operator::{max_eigenvalue, LinearOperator};
pub use solvers::{
    ista_solve, ista_solve_with_step, lasso_objective, omp_solve, CsSolveReport, OMP_RIDGE,
    POWER_ITERATIONS, STEP_MARGIN,
};
