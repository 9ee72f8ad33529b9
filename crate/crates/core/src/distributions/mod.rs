//! Multinomial and Dirichlet specializations of the simplex bound, with
//! log-pmf / log-density evaluation and seeded samplers.

mod dirichlet;
mod log_factorial;
mod multinomial;

pub use dirichlet::{dirichlet_bound, sample_dirichlet, DirichletSpec};
pub use log_factorial::{LogFactorials, DEFAULT_TABLE_LIMIT};
pub use multinomial::{
    multinomial_bound, multinomial_log_pmf, sample_multinomial, CountVector, MultinomialSpec,
};
