//! Complex special functions: Γ, 1F1 and erfc.

mod erf;
mod gamma;
mod kummer;

pub use erf::{erf, erfc, gaussian_fourier_cdf};
pub use gamma::{complex_gamma, gamma_envelope_ratio, ln_gamma, recip_gamma};
pub use kummer::kummer_1f1;
