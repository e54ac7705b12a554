//! Exact dynamics of induced maps on atomic probability measures over the
//! Cantor space `{0,1}^N`.
//!
//! Points are eventually-zero binary sequences, maps are prefix-rewrite
//! tables, and every distance or mass is an exact rational. The crate is
//! organised bottom-up:
//!
//! * [`cantor`]: words, cylinders, cylinder partitions and the ultrametric.
//! * [`maps`]: prefix tables, partition digraphs, shape classification and
//!   the balloon / dumbbell tower generators.
//! * [`measures`]: atomic measures, pushforward and the Prohorov solver.
//! * [`dynamics`]: orbits of the induced map, Li-Yorke profiles, entropy,
//!   chains, chain continuity, transitivity and weak shadowing.
//! * [`recurrence`]: periodic measures, chain-recurrence tests, perturbations
//!   and periodic approximation.
//! * [`certificate`]: the JSON record every check emits.

pub mod cantor;
pub mod certificate;
pub mod dynamics;
pub mod error;
pub mod maps;
pub mod measures;
pub mod rational;
pub mod recurrence;

pub use cantor::{cell_distance, cells_meeting, partition_stats, point_distance, Partition, Word};
pub use certificate::Certificate;
pub use error::{Error, Result};
pub use maps::{ComponentShape, MapTower, PartitionDigraph, PrefixTableMap, ShapeKind};
pub use measures::{AtomicMeasure, Backend, ProhorovResult};
pub use rational::Rational;
