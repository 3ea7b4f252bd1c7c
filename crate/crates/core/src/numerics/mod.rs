//! Numerical building blocks: compensated summation, special functions,
//! Gauss-Legendre quadrature, bracketed root finding and log-log fits.

pub mod fit;
pub mod quadrature;
pub mod roots;
pub mod special;
pub mod sum;

pub use fit::{linear_fit, power_law_fit, two_term_fit, FitReport, LinearFit, TwoTermFit};
pub use quadrature::{adaptive_integrate, gauss_legendre, integrate_to_infinity, GaussLegendre};
pub use roots::{bisect_secant, RootOutcome};
pub use special::{
    arcsine_closed_form, chi_square_survival, gamma, kolmogorov_survival, ln_gamma, reg_inc_beta,
    reg_inc_gamma_upper,
};
pub use sum::{compensated_sum, log_sum_exp, NeumaierSum};

/// Geometric grid of `count` points from `start` to `stop` inclusive.
pub fn geometric_grid<T: crate::Real>(start: T, stop: T, count: usize) -> Vec<T> {
    match count {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let (a, b) = (start.ln(), stop.ln());
            let step = (b - a) / T::idx(count as u64 - 1);
            (0..count)
                .map(|i| {
                    if i == 0 {
                        start
                    } else if i + 1 == count {
                        stop
                    } else {
                        (a + step * T::idx(i as u64)).exp()
                    }
                })
                .collect()
        }
    }
}
