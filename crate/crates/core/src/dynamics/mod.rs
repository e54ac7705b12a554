//! Orbits of the induced map `f̃` and the analyses built on them.

mod chains;
mod entropy;
mod equicontinuity;
mod grid;
mod orbit;
mod shadowing;

pub use chains::{
    chain_connect_homeo, chain_connect_map, chain_continuity_test, choose_gamma, k0_for, Chain,
};
pub use entropy::{entropy_estimate, EntropyRow, EntropyTable};
pub use equicontinuity::equicontinuity_certificate;
pub use grid::{random_cell_measure, random_close_pair, representative, simplex_grid};
pub use orbit::{
    distance_profile, li_yorke_classify, orbit_summary, upper_density, DistanceProfile, LiYorke,
    MeasureOrbit, OrbitSummary, PointOrbit,
};
pub use shadowing::{transitivity_check, weak_shadowing_refutation};

/// Default number of steps an atom orbit may take before it must resolve.
pub const DEFAULT_BUDGET: usize = 4096;
