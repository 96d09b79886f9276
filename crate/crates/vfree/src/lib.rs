//! Finitely generated virtually free groups, represented as finite graphs of
//! finite groups, together with the machinery needed to decide whether two
//! such groups have the same ∀∃-first-order theory: normal forms and the word
//! problem, splittings and slide moves, conjugacy classes of finite subgroups
//! and their normalizers, the five counting invariants, legal large and small
//! extensions, a bounded search for isomorphic multiple legal extensions with
//! machine-checkable certificates, and first-order sentence emission.

pub mod analysis;
pub mod corpus;
pub mod decide;
pub mod fingrp;
pub mod formulas;
pub mod gog;
pub mod iso;
pub mod legal;
pub mod splittings;
pub mod vcyc;

pub use fingrp::{FinGroup, GrpHom, Perm, Subgrp};
