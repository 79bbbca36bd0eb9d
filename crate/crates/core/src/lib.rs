//! Numerical laboratory for the two-component deposition system
//!
//! ```text
//! d/dt rho + d/dx (rho u) = 0
//! d/dt u   + d/dx rho     = 0
//! ```
//!
//! spanning both description levels of the model:
//!
//! * the PDE side — characteristic structure and Riemann invariants
//!   ([`characteristics`]), Rankine-Hugoniot jump algebra with Lax
//!   classification ([`shocks`]), entropy/flux pairs ([`entropy`]) and
//!   viscous/inviscid solvers with maximum-principle monitors
//!   ([`solvers`]);
//! * the particle side — the bricklayer lattice gas whose hydrodynamic
//!   limit the PDE describes ([`bricklayer`]) and the thermodynamic flux
//!   functions bridging the two ([`hydroflux`]).

pub mod bricklayer;
pub mod characteristics;
pub mod entropy;
pub mod grid;
pub mod hydroflux;
pub mod numerics;
pub mod shocks;
pub mod solvers;

pub use characteristics::{CharData, DomainClass, PhysState};
pub use grid::{Boundary, Field1D, GridSpec, HeightField, Trajectory};
pub use shocks::{ShockClass, ShockData};
