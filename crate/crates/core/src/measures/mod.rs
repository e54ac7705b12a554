//! Atomic probability measures, the induced map `f̃` and the Prohorov metric.

mod atomic;
mod flow;
mod prohorov;

pub use atomic::AtomicMeasure;
pub use prohorov::{prohorov, prohorov_two_sided, prohorov_with, Backend, ProhorovResult};
