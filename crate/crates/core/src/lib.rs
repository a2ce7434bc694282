//! Composition engine for autonomous coherent-feedback error-correction
//! networks built from idealized photonic components.
//!
//! The layers, bottom up: symbolic operators on a 13-site register
//! ([`operator`], compiled through [`sparse`]), the `(S, L, H)` circuit
//! algebra ([`slh`]), a device catalog ([`catalog`]), the 3×3 Bacon-Shor
//! network assembly ([`network`]) and the code-theoretic toolkit ([`code`]).

pub mod assignment;
pub mod catalog;
pub mod code;
pub mod error;
pub mod network;
pub mod operator;
pub mod sites;
pub mod slh;
pub mod sparse;

pub use error::{Error, Result};
pub use operator::{LocalOp, OperatorSum, Pauli, TensorTerm};
pub use sites::{Site, SiteSpace};
pub use slh::{MasterEquation, SLHTriple};
pub use sparse::CsrMatrix;
