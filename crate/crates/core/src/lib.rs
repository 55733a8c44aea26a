//! Classification of two-dimensional anisotropic media for the type-1
//! thermo-elastic system
//!
//! ```text
//! U_tt + A(D)U + γ∇θ = 0,
//! θ_t − κΔθ + γ∇·U_t = 0,
//! ```
//!
//! covering admissibility of the elastic symbol, hyperbolic directions,
//! vanishing orders of the coupling functions, tangency orders of the Fresnel
//! curve, the resulting dispersive decay exponents and a Fourier-spectral
//! simulator used to cross-check them.

pub mod analysis;
pub mod decay;
pub mod fixtures;
pub mod fresnel;
pub mod media;
pub mod hyperbolic;
mod poly;
pub mod simulate;
pub mod spectral;

pub use analysis::{analyze, AnalysisBundle};
pub use decay::{overall_rate, DecayReport, Exponent};
pub use media::{Moduli, SymbolMatrix, SymmetryClass};
pub use spectral::{EigenPair, Sheet};
