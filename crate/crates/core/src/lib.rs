//! Hereditarily finite (HF) set theory as an executable artifact: canonical HF
//! set values, a first-order language over them with a sealed LCF-style proof
//! kernel, synthesis of proofs for true Σ sentences, Gödel coding of syntax and
//! derivations, executable shadow predicates, and the diagonal construction of
//! the Gödel sentence together with computable fixed-point checks.

pub mod hf_core;
pub mod syntax;
pub mod semantics;
pub mod calculus;
pub mod sigma;
pub mod coding;
pub mod provability;
pub mod goedel;
pub mod cli;
pub mod corpus;
