//! Special functions underpinning the symbol and decomposition machinery:
//! complex gamma/digamma, the Gauss hypergeometric function on the closed
//! unit disk, and Bessel functions of the first kind with a truncatable
//! large-argument expansion.

pub mod bessel;
pub mod gamma;
pub mod hyp2f1;

pub use bessel::{bessel_asymptotic, bessel_j, BesselAsymptotic};
pub use gamma::{digamma, gamma, gamma_real, is_gamma_pole, pochhammer, recip_gamma};
pub use hyp2f1::{hyp2f1, hyp2f1_euler_integral};
