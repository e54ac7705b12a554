use num_traits::{One, Zero};
use serde::Serialize;

use crate::cantor::Word;
use crate::certificate::Certificate;
use crate::error::{Error, Result};
use crate::maps::{ComponentShape, MapTower, TowerKind};
use crate::measures::AtomicMeasure;
use crate::rational::{self, Rational};

use crate::dynamics::{PointOrbit, DEFAULT_BUDGET};

use super::transient_cells;

#[derive(Serialize)]
struct Charge {
    set: String,
    mass: String,
}

/// The first `n ≥ 1` with `h^n(x)` in one of `bars`, following the exact
/// orbit of `x` through its transient and one cycle.
fn first_bar_visit(tower: &MapTower, x: &Word, bars: &[Word]) -> Result<Option<usize>> {
    let orbit = PointOrbit::compute(&tower.map, x, DEFAULT_BUDGET)?;
    Ok((1..=orbit.start() + orbit.cycle_len()).find(|&n| {
        let y = orbit.at(n);
        bars.iter().any(|b| b.contains_point(&y))
    }))
}

/// Partition-level chain-recurrence test: no mass on balloon paths or
/// dumbbell bars, and for dumbbell towers none on `h^{-n}(v_1)` for
/// `1 ≤ n ≤ horizon`. Without a horizon every atom's orbit is followed
/// exactly, which covers all `n`.
pub fn cr_candidate_test(
    tower: &MapTower,
    mu: &AtomicMeasure,
    level: usize,
    horizon: Option<usize>,
) -> Certificate {
    let lvl = tower.level(level);
    let mut charges = Vec::new();
    for shape in &lvl.components {
        for cell in transient_cells(shape) {
            let mass = mu.mass_of(cell);
            if !mass.is_zero() {
                charges.push(Charge {
                    set: cell.to_string(),
                    mass: rational::format(&mass),
                });
            }
        }
    }
    if let (TowerKind::Dumbbells, Some(inverse)) = (tower.kind, &tower.inverse) {
        let entries: Vec<Word> = lvl
            .components
            .iter()
            .filter_map(|shape| match shape {
                ComponentShape::Dumbbell { bar, .. } => Some(bar[0].clone()),
                _ => None,
            })
            .collect();
        match horizon {
            Some(horizon) => {
                for entry in &entries {
                    let mut set = vec![entry.clone()];
                    for n in 1..=horizon {
                        set = inverse.image_of_set(&set);
                        let mass = mu.mass_of_set(&set);
                        if !mass.is_zero() {
                            charges.push(Charge {
                                set: format!("h^-{n}({entry})"),
                                mass: rational::format(&mass),
                            });
                        }
                    }
                }
            }
            None => {
                for (x, m) in mu.atoms() {
                    let set = match first_bar_visit(tower, x, &entries) {
                        Ok(None) => continue,
                        Ok(Some(n)) => format!("h^-{n}(bar) ∋ {x}"),
                        Err(e) => format!("orbit of {x} unresolved: {e}"),
                    };
                    charges.push(Charge {
                        set,
                        mass: rational::format(m),
                    });
                }
            }
        }
    }
    let passed = charges.is_empty();
    Certificate::new("cr_candidate_test")
        .param("level", level)
        .param(
            "horizon",
            horizon.map_or_else(|| "unbounded".to_string(), |h| h.to_string()),
        )
        .param("measure", mu)
        .witness("charged", charges)
        .verdict(
            if passed {
                "CandidateChainRecurrent"
            } else {
                "NotChainRecurrent"
            },
            passed,
        )
}

fn fine_level(tower: &MapTower, epsilon: Rational) -> Result<usize> {
    tower
        .levels
        .iter()
        .position(|l| l.partition.mesh() < epsilon)
        .ok_or_else(|| Error::Parameter(format!("no certified level has mesh below {epsilon}")))
}

/// `d_P(f̃^{q!}(μ), μ) < ε` at the coarsest level with mesh below `ε`.
pub fn recurrence_certificate(
    tower: &MapTower,
    mu: &AtomicMeasure,
    epsilon: Rational,
) -> Result<Certificate> {
    let level = fine_level(tower, epsilon)?;
    let cr = cr_candidate_test(tower, mu, level, None);
    if !cr.passed {
        return Err(Error::Precondition(format!(
            "measure charges transient cells: {}",
            serde_json::to_string(&cr.witnesses["charged"]).unwrap_or_default()
        )));
    }
    let q = tower.level(level).loop_len;
    let distance = mu.pushforward_n(&tower.map, q).distance(mu)?;
    let passed = distance < epsilon;
    Ok(Certificate::new("recurrence_certificate")
        .param_rational("epsilon", &epsilon)
        .param("level", level)
        .witness("return_time", q)
        .witness_rational("distance", &distance)
        .verdict(if passed { "Recurrent" } else { "NotRecurrent" }, passed))
}

/// `μ_λ = (1 − λ)μ + λπ_z` with `z` on the first path or bar cell that
/// `μ`'s orbit should never charge; certifies `d_P(μ_λ, μ) ≤ λ` and that
/// `μ_λ` fails the chain-recurrence test.
pub fn non_cr_perturbation(
    tower: &MapTower,
    mu: &AtomicMeasure,
    lambda: Rational,
    level: usize,
) -> Result<(AtomicMeasure, Certificate)> {
    if lambda <= Rational::zero() || lambda >= Rational::one() {
        return Err(Error::Parameter(format!(
            "λ = {lambda} must lie strictly between 0 and 1"
        )));
    }
    let lvl = tower.level(level);
    let cells = transient_cells(&lvl.components[0]);
    let z = match tower.kind {
        // the image of the initial vertex representative lies in v_2
        TowerKind::Balloons if cells.len() >= 2 => tower.map.apply(&cells[0].to_point()),
        _ => cells[0].to_point(),
    };
    let perturbed = mu.mix(&AtomicMeasure::dirac(&z), lambda)?;
    let distance = perturbed.distance(mu)?;
    let cr = cr_candidate_test(tower, &perturbed, level, None);
    let q = lvl.loop_len;
    let moved = perturbed.pushforward_n(&tower.map, q) != perturbed;
    let passed = distance <= lambda && !cr.passed;
    let cert = Certificate::new("non_cr_perturbation")
        .param_rational("lambda", &lambda)
        .param("level", level)
        .witness("point", &z)
        .witness_rational("distance", &distance)
        .witness("charged", cr.witnesses["charged"].clone())
        .witness("not_fixed_by_loop_power", moved)
        .verdict(
            if passed {
                "EmptyInteriorWitness"
            } else {
                "Failed"
            },
            passed,
        );
    Ok((perturbed, cert))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::LevelSpec;
    use crate::rational::rat;
    use crate::recurrence::{periodic_measure, AdmissibleChoice};

    #[test]
    fn balloon_examples() {
        let tower =
            MapTower::generate_balloons(&[LevelSpec::new(2, 2, 1), LevelSpec::new(3, 2, 2)])
                .unwrap();
        let choice = AdmissibleChoice {
            components: vec![0, 0],
            offset: 1,
            period: 1,
        };
        let mu = periodic_measure(&tower, &choice, 1).unwrap();
        assert!(cr_candidate_test(&tower, &mu, 0, None).passed);
        let ComponentShape::Balloon { path, .. } = &tower.level(0).components[0] else {
            panic!()
        };
        let bad = AtomicMeasure::dirac(&path[0].to_point());
        let cert = cr_candidate_test(&tower, &bad, 0, None);
        assert!(!cert.passed);
        assert_eq!(cert.witnesses["charged"][0]["set"], path[0].to_string());
        let rec = recurrence_certificate(&tower, &mu, rat(1, 2)).unwrap();
        assert_eq!(rec.witnesses["distance"], "0");
        assert!(recurrence_certificate(&tower, &bad, rat(1, 2)).is_err());
        let (perturbed, cert) = non_cr_perturbation(&tower, &mu, rat(1, 4), 0).unwrap();
        assert!(cert.passed, "{}", cert.to_json());
        assert_eq!(perturbed.mass_of(&path[1]), rat(1, 4));
        assert!(non_cr_perturbation(&tower, &mu, rat(0, 1), 0).is_err());
    }

    #[test]
    fn dumbbell_preimages_are_charged() {
        let tower = MapTower::generate_dumbbells(&[LevelSpec::new(2, 2, 1)]).unwrap();
        let ComponentShape::Dumbbell { left, .. } = &tower.level(0).components[0] else {
            panic!()
        };
        // u_1 11 drains into the bar
        let drain = AtomicMeasure::dirac(&left[0].child(true).child(true));
        assert!(!cr_candidate_test(&tower, &drain, 0, None).passed);
        let stay = AtomicMeasure::dirac(&left[0].to_point());
        assert!(cr_candidate_test(&tower, &stay, 0, None).passed);
    }

    #[test]
    fn slow_drains_need_the_exact_orbit() {
        let tower = MapTower::generate_dumbbells(&[LevelSpec::new(2, 2, 1)]).unwrap();
        let ComponentShape::Dumbbell { left, .. } = &tower.level(0).components[0] else {
            panic!()
        };
        // u_1 1 0^k 1 loops k times before draining, u_1 1 0^∞ never drains
        let tail: Word = "100001".parse().unwrap();
        let late = AtomicMeasure::dirac(&left[0].concat(&tail));
        assert!(cr_candidate_test(&tower, &late, 0, Some(2)).passed);
        assert!(!cr_candidate_test(&tower, &late, 0, None).passed);
        let never: Word = "1".parse().unwrap();
        let stay = AtomicMeasure::dirac(&left[0].concat(&never));
        assert!(cr_candidate_test(&tower, &stay, 0, None).passed);
    }
}
