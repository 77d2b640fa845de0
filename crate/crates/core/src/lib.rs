//! SL(3,C)^3 invariants of three-qutrit states and a spin-1 block
//! renormalization-group flow that reads the Haldane phase off them.

pub mod block;
pub mod eigh;
pub mod error;
pub mod flow;
pub mod invariants;
pub mod poly;
pub mod roots;
pub mod scan;
pub mod tensor;

pub use block::{block_solution, BlockSolution, Couplings};
pub use error::{Error, Result};
pub use invariants::{invariants_full, InvariantSet};
pub use tensor::{LocalOp, Tensor333};
