//! Hedonic coalition formation on graphs.
//!
//! Players are vertices of a connected graph and may only form coalitions
//! that induce connected subgraphs. This crate simulates single-player
//! deviation dynamics over such partitions, exhaustively certifies whether
//! the dynamics can cycle on a given instance, and ships a catalog of small
//! instances with known behavior: cycling schedules on cycles, paths, stars
//! and trees, and schedules of maximal length on paths, stars and trees.

pub mod cli;
pub mod dynamics;
pub mod examples;
pub mod graph;
pub mod oracle;
pub mod prefs;
