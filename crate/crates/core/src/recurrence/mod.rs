//! Periodic measures from admissible choices, chain-recurrence tests at the
//! partition level, perturbations and periodic approximation.

mod approx;
mod choice;
mod cr;

pub use approx::{approx_by_periodic, LoopDecomposition};
pub use choice::{admissible_choices, consistency_check, periodic_measure, AdmissibleChoice};
pub use cr::{cr_candidate_test, non_cr_perturbation, recurrence_certificate};

use crate::cantor::Word;
use crate::maps::ComponentShape;

/// Loop cells of a component: the balloon loop, or the right then left
/// loop of a dumbbell.
pub(crate) fn loops(shape: &ComponentShape) -> Vec<&[Word]> {
    match shape {
        ComponentShape::Balloon { cycle, .. } => vec![cycle],
        ComponentShape::Dumbbell { left, right, .. } => vec![right, left],
        ComponentShape::Loop { cycle } => vec![cycle],
        ComponentShape::Other { .. } => vec![],
    }
}

/// Cells that a chain-recurrent measure must not charge: balloon paths and
/// dumbbell bars.
pub(crate) fn transient_cells(shape: &ComponentShape) -> &[Word] {
    match shape {
        ComponentShape::Balloon { path, .. } => path,
        ComponentShape::Dumbbell { bar, .. } => bar,
        _ => &[],
    }
}

/// The initial vertex used for nesting: `v_1` of a balloon, `u_1` of a dumbbell.
pub(crate) fn initial_vertex(shape: &ComponentShape) -> Option<&Word> {
    match shape {
        ComponentShape::Balloon { path, .. } => path.first(),
        ComponentShape::Dumbbell { left, .. } => left.first(),
        _ => None,
    }
}
