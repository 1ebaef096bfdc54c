//! Dessins d'enfants as permutation pairs, the point-line geometries induced by
//! their pair stabilizers, Belyi function verification, and multi-qubit Pauli
//! contextuality checks.

pub mod belyi;
pub mod catalog;
pub mod dessin;
pub mod enumerate;
pub mod expr;
pub mod field;
pub mod geometry;
pub mod graph;
pub mod group;
pub mod pauli;
pub mod perm;
pub mod poly;
pub mod spectrum;

pub use dessin::{Dessin, DessinError, Mode, Passport, PassportPattern, Signature};
pub use group::{PermGroup, Subgroup};
pub use perm::{CycleType, Permutation};
