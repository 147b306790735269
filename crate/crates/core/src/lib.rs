//! Rainbow matchings in k-partite families.
//!
//! A family here is a set of tuples in `[n]^k`; two tuples are disjoint when
//! they differ in every coordinate. A *rainbow matching* of families
//! `F_1, ..., F_s` picks one tuple from each family so that the picks are
//! pairwise disjoint, and a threshold sequence `f_1, ..., f_s` is
//! *satisfying* when every system with `|F_i| > f_i` admits one.
//!
//! The crate provides exhaustive desk-scale oracles for these notions
//! together with the machinery used to reason about them at scale:
//!
//! - [`family`]: tuples, families, multisets, hyperplanes.
//! - [`io`]: the plain-text family file format.
//! - [`search`]: exact rainbow-matching search, greedy extraction from a
//!   perfect matching, saturation, the stripe construction.
//! - [`sequence`] and [`bounds`]: satisfying-sequence verdicts, the minimal
//!   offset search, closed-form thresholds.
//! - [`shift`]: the shift map, compression, hyperplane-core diagnostics.
//! - [`spread`]: spread approximation by peeling.
//! - [`randmatch`]: uniform random perfect matchings and tail experiments.
//! - [`nullsatz`]: exact Vandermonde coefficients and vanishing degrees for
//!   the `k = 2` polynomial method.
//!
//! Interchangeable algorithms (rainbow search, spread pattern selection) sit
//! behind traits and are looked up by name through a [`registry::Registry`].

pub mod bounds;
pub mod budget;
pub mod error;
pub mod family;
pub mod io;
pub mod linalg;
pub mod nullsatz;
pub mod parallel;
pub mod randmatch;
pub mod registry;
pub mod search;
pub mod sequence;
pub mod shift;
pub mod spread;

pub use budget::{Meter, SearchBudget};
pub use error::{Error, Result};
pub use family::{Family, FamilySystem, Tuple, TupleMultiset, Universe};
