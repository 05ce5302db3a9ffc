//! Catalog of subdirectly irreducible algebras: sequential chains, the three
//! small algebras, machine configuration algebras, and the power-window
//! construction connecting machine runs to algebra structure.

mod machine;
mod sequential;
mod small;
mod window;

pub use machine::{
    build_machine_pn, check_phi_conditions, default_phi, theta_phi_quotient, MachinePn,
    MachineSpec, PhiReport, SpecParseError, ThetaPhi, ThetaPhiError,
};
pub use sequential::build_sequential;
pub use small::{build_small_si, classify_small_si, satisfies_ei_zero, SmallSiKind};
pub use window::{build_gamma_window, generate_window_universe, GammaWindowError, GammaWindowReport};

use crate::algebra::FiniteAlgebra;

/// True when `S2(u,v,x,y,z) = 0` for all arguments, using the support list
/// when available.
pub fn s2_identically_zero(alg: &FiniteAlgebra) -> bool {
    match alg.op_index("S2") {
        None => true,
        Some(op) => alg.op_is_zero(op).unwrap_or(false),
    }
}
