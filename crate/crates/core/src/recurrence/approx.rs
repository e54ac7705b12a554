use num_integer::Integer;
use num_traits::Zero;
use serde::Serialize;

use crate::cantor::Word;
use crate::certificate::Certificate;
use crate::dynamics::MeasureOrbit;
use crate::error::{Error, Result};
use crate::maps::MapTower;
use crate::measures::AtomicMeasure;
use crate::rational::{self, Rational};

use super::cr::cr_candidate_test;
use super::loops;

/// Classes `a_{r,t} = f^{-tp}(a_{r,0}) ∩ W` of one loop `W` under the
/// return time `p`, with their masses summed.
#[derive(Clone, Debug, Serialize)]
pub struct LoopDecomposition {
    pub component: usize,
    pub classes: Vec<Vec<Word>>,
    #[serde(serialize_with = "ser_vec")]
    pub sums: Vec<Rational>,
}

fn ser_vec<S: serde::Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(rational::format))
}

/// A measure `μ'` fixed by `f̃^p` within `ε` of the recurrent `μ`, where `p`
/// is the first time with `d_P(f̃^p μ, μ) < min{δ(P), mesh(P)/(2 q! card P)}`.
pub fn approx_by_periodic(
    tower: &MapTower,
    mu: &AtomicMeasure,
    epsilon: Rational,
    budget: usize,
) -> Result<(AtomicMeasure, Certificate)> {
    let level = tower
        .levels
        .iter()
        .position(|l| l.partition.mesh() < epsilon)
        .ok_or_else(|| Error::Parameter(format!("no certified level has mesh below {epsilon}")))?;
    let cr = cr_candidate_test(tower, mu, level, None);
    if !cr.passed {
        return Err(Error::Precondition(
            "measure is not a chain-recurrent candidate".into(),
        ));
    }
    let lvl = tower.level(level);
    let partition = &lvl.partition;
    let q = lvl.loop_len;
    let card = Rational::from_integer(partition.card() as i128);
    let delta = partition
        .separation()
        .min(partition.mesh() / (card * Rational::from_integer(2 * q as i128)));

    let orbit = MeasureOrbit::compute(&tower.map, mu, budget)?;
    let horizon = if orbit.exact {
        orbit.preperiod() + orbit.period()
    } else {
        budget
    };
    let mut p = None;
    for n in 1..=horizon {
        if orbit.measure_at(n).distance(mu)? < delta {
            p = Some(n);
            break;
        }
    }
    let p = p.ok_or_else(|| {
        Error::Resource(format!("no return time within δ = {delta} up to {horizon}"))
    })?;

    let power = tower.map.power(p);
    let mut decompositions = Vec::new();
    let mut atoms: Vec<(Word, Rational)> = Vec::new();
    for (i, shape) in lvl.components.iter().enumerate() {
        for cycle in loops(shape) {
            let g = p.gcd(&cycle.len());
            let k = cycle.len() / g;
            let mut classes = Vec::with_capacity(g);
            let mut sums = Vec::with_capacity(g);
            for r in 0..g {
                let mut class = vec![cycle[r].clone()];
                for _ in 1..k {
                    let pre = power.preimage_cells(class.last().expect("nonempty"), partition);
                    let next = pre.into_iter().find(|c| cycle.contains(c)).ok_or_else(|| {
                        Error::Precondition("loop cell without a loop preimage".into())
                    })?;
                    class.push(next);
                }
                let sum: Rational = class.iter().map(|c| mu.mass_of(c)).sum();
                let share = sum / Rational::from_integer(k as i128);
                atoms.extend(class.iter().map(|c| (c.to_point(), share)));
                classes.push(class);
                sums.push(sum);
            }
            decompositions.push(LoopDecomposition {
                component: i,
                classes,
                sums,
            });
        }
    }
    let approx = AtomicMeasure::new(atoms)?;
    let invariant = approx.pushforward_n(&tower.map, p) == approx;
    let distance = approx.distance(mu)?;
    let cell_gap = approx
        .cell_masses(partition)
        .iter()
        .zip(mu.cell_masses(partition))
        .map(|(a, b)| if *a > b { *a - b } else { b - *a })
        .fold(Rational::zero(), Rational::max);
    let passed = invariant && distance < epsilon;
    let cert = Certificate::new("approx_by_periodic")
        .param_rational("epsilon", &epsilon)
        .param("level", level)
        .witness_rational("delta", &delta)
        .witness("return_time", p)
        .witness("decompositions", &decompositions)
        .witness("invariant", invariant)
        .witness_rational("distance", &distance)
        .witness_rational("max_cell_gap", &cell_gap)
        .witness_rational("cell_gap_bound", &(partition.mesh() / card))
        .verdict(
            if passed {
                "PeriodicApproximation"
            } else {
                "Failed"
            },
            passed,
        );
    Ok((approx, cert))
}
