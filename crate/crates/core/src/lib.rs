//! Connected components of strata of Abelian differentials.
//!
//! Permutations and Rauzy classes ([`perm`], [`rauzy`]), exact interval
//! exchanges ([`iet`]), square-tiled surfaces with spin parity
//! ([`surface`]), separatrix diagrams ([`diagram`]) and the component
//! classifier ([`classify`]).

pub mod classify;
pub mod diagram;
pub mod iet;
pub mod lp;
pub mod perm;
pub mod rauzy;
pub mod surface;
