//! Finite flat algebras built from Turing machines.
//!
//! The crate constructs, for any deterministic Turing machine, a finite
//! algebra whose congruence structure mirrors the machine's behavior, and
//! provides the machinery to explore it: congruence generation and lattices,
//! subdirectly irreducible catalogs (sequential chains and machine
//! configuration algebras), a first-order congruence-formula library with a
//! brute-force evaluator, and an executable Maltsev-chain rewriting calculus
//! with endpoint verification after every rewrite.

pub mod algebra;
pub mod aprime;
pub mod chains;
pub mod formulas;
pub mod oracle;
pub mod si;
pub mod suite;
pub mod tm;

/// Default size guard for congruence-lattice style computations.
pub const DEFAULT_LATTICE_GUARD: usize = 64;

/// Default cap for generated subuniverses and power subalgebras.
pub const DEFAULT_GENERATION_CAP: usize = 4096;
