//! Numerical toolbox for quantifying how strongly a quantum resource can
//! change a chosen readout under a fixed process.
//!
//! The central objects are a quantum channel Λ, a resource-destroying map G
//! (dephasing, twirl, replacement), and a readout observable M. The library
//! computes the impact functional C_M(Λ) = sup_ρ |Tr[M(Λ(ρ) − Λ(G(ρ)))]|,
//! its instantaneous rate Γ_M(t) along Lindblad dynamics, the associated
//! variation/time/feasibility bounds, and the free/resourceful decomposition
//! of channels and generators. A fully analytic donor–acceptor dimer model
//! is included and doubles as the test oracle for the generic machinery.
//!
//! Conventions: ℏ = 1, energies and rates share one arbitrary unit, time is
//! its inverse. Superoperators act on row-stacked (vec) operators, so
//! vec(AρB) = (A ⊗ Bᵀ) vec(ρ).

pub mod channels;
pub mod checks;
pub mod decomposition;
pub mod dimer;
pub mod dynamics;
pub mod error;
pub mod impact;
pub mod operators;
pub mod quad;
pub mod resource;
pub mod sampling;

pub use channels::{QuantumChannel, SuperOperator};
pub use dynamics::LindbladGenerator;
pub use error::QresError;
pub use operators::{CMat, CVec, DensityOperator, HermitianObservable};
pub use resource::ResourceDestroyingMap;


/// Scalar type used throughout: double-precision complex.
pub type C64 = num_complex::Complex<f64>;
