//! Desk-scale toolkit for small-cancellation presentations.
//!
//! The crate is organised around a pipeline: parse a presentation, check the
//! algebraic C(4) and T(4) conditions ([`words`]), subdivide it into a
//! piece-indexed presentation ([`bsd`]), enumerate dominoes and grade the
//! letter alphabet from stable triplets ([`domino`]), build the padded-pair
//! order automaton ([`order`]), and drive word refutation down to
//! order-minimal normal forms ([`refute`]).  Van Kampen diagrams are
//! represented as dart-based rotation systems in [`diagram`], and all
//! group-theoretic claims are certified through the bounded oracle in
//! [`oracle`].
//!
//! Everything is deterministic: collections are ordered, enumeration output
//! is canonicalised, and serialised artifacts are byte-identical across runs.

pub mod bsd;
pub mod config;
pub mod diagram;
pub mod domino;
pub mod fixtures;
pub mod oracle;
pub mod words;
