//! Societies, transactions, renditions and certificates.
//!
//! A *society* is a multigraph together with a cyclic order Ω on a subset of
//! its vertices.  This crate computes the standard invariants of societies
//! (depth, crosses, rurality), extracts structured transactions (planar,
//! crosscap, crooked, leap patterns), builds combinatorial disk renditions and
//! linear vortex decompositions, and constructs clique-minor models — every
//! positive answer is a certificate that can be re-checked by an independent
//! verifier.
//!
//! Modules mirror the conceptual layers:
//!
//! * [`graph`] — multigraphs, paths, linkages, Menger routing, separations,
//!   bridges, and a brute-force minor-model oracle;
//! * [`planarity`] — planarity testing with rotation-system output;
//! * [`society`] — societies, segments and society surgery;
//! * [`transactions`] — depth, crosses, crooked transactions,
//!   Erdős–Szekeres extraction and the crooked-or-cylindrical dichotomy;
//! * [`renditions`] — combinatorial disk/cylindrical renditions, tracks,
//!   nests, restrictions;
//! * [`rerouting`] — exchange and augmentation arguments for crosses, crooked
//!   transactions, rooted linkages and leap patterns;
//! * [`strips`] — strip societies of planar and crosscap transactions;
//! * [`walls`] — walls, grids with crosses, and constructive clique models;
//! * [`vortex`] — linear decompositions of bounded-depth societies;
//! * [`cli`] — the command-line front end and instance generators.

pub mod cli;
pub mod graph;
pub mod planarity;
pub mod renditions;
pub mod rerouting;
pub mod society;
pub mod strips;
pub mod transactions;
pub mod vortex;
pub mod walls;

pub use graph::{Graph, Linkage, MinorModel, Path, Separation};
pub use society::{Segment, Society};
