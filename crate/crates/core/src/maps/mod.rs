//! Continuous maps and homeomorphisms of the Cantor space as prefix-rewrite
//! tables, their partition digraphs, and the balloon / dumbbell towers.

mod digraph;
mod table;
mod tower;

pub use digraph::{classify_components, ComponentShape, PartitionDigraph, ShapeKind};
pub use table::{normalize_cylinders, PrefixTableMap};
pub use tower::{
    eventual_image, factorial, LevelFile, LevelSpec, LoopWitness, MapFile, MapTower, StrictWitness,
    TowerKind, TowerLevel,
};
