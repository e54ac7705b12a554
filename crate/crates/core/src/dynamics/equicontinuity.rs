use serde::Serialize;

use crate::certificate::Certificate;
use crate::error::{Error, Result};
use crate::maps::{MapTower, TowerKind};
use crate::measures::AtomicMeasure;
use crate::rational::{self, Rational};

use super::orbit::distance_profile;

#[derive(Serialize)]
struct Failure {
    mu: AtomicMeasure,
    nu: AtomicMeasure,
    sup: String,
}

/// Checks `sup_n d_P(f̃^n μ, f̃^n ν) < ε` for every sampled pair with
/// `d_P(μ, ν) < δ`, `δ = min{δ(P), mesh(P) / (2 card P)}` at the coarsest
/// certified level whose mesh is below `ε`.
pub fn equicontinuity_certificate(
    tower: &MapTower,
    epsilon: Rational,
    pairs: &[(AtomicMeasure, AtomicMeasure)],
    budget: usize,
) -> Result<Certificate> {
    if tower.kind != TowerKind::Balloons {
        return Err(Error::Parameter(
            "equicontinuity needs a balloon tower".into(),
        ));
    }
    let (index, level) = tower
        .levels
        .iter()
        .enumerate()
        .find(|(_, l)| l.partition.mesh() < epsilon)
        .ok_or_else(|| Error::Parameter(format!("no certified level has mesh below {epsilon}")))?;
    let partition = &level.partition;
    let card = Rational::from_integer(partition.card() as i128);
    let delta = partition.separation().min(partition.mesh() / (card * 2));
    let mut checked = 0usize;
    let mut skipped = 0usize;
    let mut worst = Rational::from_integer(0);
    let mut failures = Vec::new();
    for (mu, nu) in pairs {
        if mu.distance(nu)? >= delta {
            skipped += 1;
            continue;
        }
        checked += 1;
        let profile = distance_profile(&tower.map, mu, nu, budget)?;
        worst = worst.max(profile.sup);
        if profile.sup >= epsilon {
            failures.push(Failure {
                mu: mu.clone(),
                nu: nu.clone(),
                sup: rational::format(&profile.sup),
            });
        }
    }
    let passed = failures.is_empty();
    Ok(Certificate::new("equicontinuity_certificate")
        .param_rational("epsilon", &epsilon)
        .param("pairs", pairs.len())
        .witness("level", index)
        .witness_rational("mesh", &partition.mesh())
        .witness("card", partition.card())
        .witness_rational("delta", &delta)
        .witness("checked", checked)
        .witness("skipped", skipped)
        .witness_rational("largest_sup", &worst)
        .witness("failures", failures)
        .verdict(if passed { "Equicontinuous" } else { "Violated" }, passed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::LevelSpec;
    use crate::rational::rat;

    #[test]
    fn modulus_formula() {
        let tower = MapTower::generate_balloons(&[LevelSpec::new(2, 2, 1)]).unwrap();
        let mu = AtomicMeasure::dirac(&crate::cantor::w("01"));
        let cert = equicontinuity_certificate(&tower, rat(1, 2), &[(mu.clone(), mu)], 100).unwrap();
        assert_eq!(cert.witnesses["delta"], "1/24");
        assert!(cert.passed);
        assert!(equicontinuity_certificate(&tower, rat(1, 4), &[], 100).is_err());
    }
}
