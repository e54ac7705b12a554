use rayon::prelude::*;
use serde::Serialize;

use crate::cantor::Partition;
use crate::certificate::Certificate;
use crate::error::{Error, Result};
use crate::maps::{ComponentShape, MapTower, PartitionDigraph, PrefixTableMap, TowerKind};
use crate::measures::AtomicMeasure;
use crate::rational::{self, Rational};

use super::chains::{chain_connect_homeo, choose_gamma, k0_for};
use super::grid::representative;
use super::orbit::MeasureOrbit;

/// Exact steps evaluated past the transient before falling back on the
/// limit-cycle bound.
const EXTRA_STEPS: usize = 64;

/// Cell-level transitivity: whether every cell reaches every cell along
/// paths of positive length in `G(f, P)`.
pub fn transitivity_check(map: &PrefixTableMap, partition: &Partition) -> Certificate {
    let graph = PartitionDigraph::of(map, partition);
    let cert = Certificate::new("transitivity_check").param("cells", partition.card());
    for a in 0..graph.vertex_count() {
        let mut seen = vec![false; graph.vertex_count()];
        let mut stack: Vec<usize> = graph.successors(a).to_vec();
        for &s in &stack {
            seen[s] = true;
        }
        while let Some(v) = stack.pop() {
            for &b in graph.successors(v) {
                if !seen[b] {
                    seen[b] = true;
                    stack.push(b);
                }
            }
        }
        if let Some(b) = seen.iter().position(|&r| !r) {
            return cert
                .witness("from", graph.cell(a))
                .witness("never_meets", graph.cell(b))
                .verdict("NotTransitive", true);
        }
    }
    cert.verdict("TransitiveAtCellLevel", true)
}

#[derive(Serialize)]
struct Unrefuted {
    measure: AtomicMeasure,
    bound_to_start: String,
    bound_to_end: String,
}

/// Lower bound on `inf_{n ∈ Z} d_P(h̃^n η, target)`.
fn two_sided_bound(
    fwd: &MeasureOrbit,
    bwd: &MeasureOrbit,
    target: &AtomicMeasure,
) -> Result<Rational> {
    Ok(fwd
        .distance_lower_bound(target, EXTRA_STEPS)?
        .min(bwd.distance_lower_bound(target, EXTRA_STEPS)?))
}

/// Builds a `δ`-pseudotrajectory through unit masses in two different
/// dumbbells and shows that no grid measure has an orbit passing within `ε`
/// of both.
pub fn weak_shadowing_refutation(
    tower: &MapTower,
    epsilon: Rational,
    delta: Rational,
    grid: &[AtomicMeasure],
    budget: usize,
) -> Result<Certificate> {
    let inverse = match (&tower.kind, &tower.inverse) {
        (TowerKind::Dumbbells, Some(inverse)) => inverse,
        _ => {
            return Err(Error::Precondition(
                "weak shadowing needs a dumbbell tower".into(),
            ))
        }
    };
    let level = tower.level(0);
    let transitivity = transitivity_check(&tower.map, &level.partition);
    if transitivity.verdict != "NotTransitive" {
        return Err(Error::Precondition(
            "the map is transitive at cell level".into(),
        ));
    }
    let lefts: Vec<_> = level
        .components
        .iter()
        .filter_map(|c| match c {
            ComponentShape::Dumbbell { left, .. } => Some(left[0].clone()),
            _ => None,
        })
        .collect();
    if lefts.len() < 2 {
        return Err(Error::Precondition("need at least two dumbbells".into()));
    }
    let start = AtomicMeasure::dirac(&representative(&lefts[0]));
    let end = AtomicMeasure::dirac(&representative(&lefts[1]));
    let k0 = k0_for(choose_gamma(delta)?);
    let chain = chain_connect_homeo(&tower.map, inverse, &start, &end, delta, k0)?;
    let chain_ok = chain.verify(&tower.map)? && *chain.last() == end;
    let results = grid
        .par_iter()
        .map(|eta| {
            let fwd = MeasureOrbit::compute(&tower.map, eta, budget)?;
            let bwd = MeasureOrbit::compute(inverse, eta, budget)?;
            let a = two_sided_bound(&fwd, &bwd, &start)?;
            let b = two_sided_bound(&fwd, &bwd, &end)?;
            Ok((eta, a, b))
        })
        .collect::<Result<Vec<_>>>()?;
    let unrefuted: Vec<Unrefuted> = results
        .iter()
        .filter(|(_, a, b)| *a < epsilon && *b < epsilon)
        .map(|(eta, a, b)| Unrefuted {
            measure: (*eta).clone(),
            bound_to_start: rational::format(a),
            bound_to_end: rational::format(b),
        })
        .collect();
    let passed = chain_ok && unrefuted.is_empty();
    Ok(Certificate::new("weak_shadowing_refutation")
        .param_rational("epsilon", &epsilon)
        .param_rational("delta", &delta)
        .param("grid_size", grid.len())
        .witness("transitivity", transitivity.witnesses)
        .witness("start", &start)
        .witness("end", &end)
        .witness("chain_length", chain.len())
        .witness("chain_verified", chain_ok)
        .witness("unrefuted", unrefuted)
        .verdict(
            if passed {
                "WeakShadowingRefuted"
            } else {
                "Inconclusive"
            },
            passed,
        ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cantor::w;
    use crate::maps::LevelSpec;
    use crate::rational::rat;

    #[test]
    fn transitivity_examples() {
        let swap = PrefixTableMap::new(vec![(w("0"), w("1")), (w("1"), w("0"))]).unwrap();
        let p1 = Partition::standard(1);
        assert_eq!(
            transitivity_check(&swap, &p1).verdict,
            "TransitiveAtCellLevel"
        );
        let id = transitivity_check(&PrefixTableMap::identity(), &p1);
        assert_eq!(id.verdict, "NotTransitive");
        assert_eq!(id.witnesses["from"], "0");
        assert_eq!(id.witnesses["never_meets"], "1");
    }

    #[test]
    fn refutes_against_own_start() {
        let tower = MapTower::generate_dumbbells(&[LevelSpec::new(3, 2, 2)]).unwrap();
        let left = match &tower.level(0).components[0] {
            ComponentShape::Dumbbell { left, .. } => left[0].clone(),
            _ => unreachable!(),
        };
        let grid = vec![AtomicMeasure::dirac(&representative(&left))];
        let cert = weak_shadowing_refutation(&tower, rat(1, 4), rat(1, 2), &grid, 1000).unwrap();
        assert!(cert.passed, "{}", cert.to_json());
    }

    #[test]
    fn declines_balloon_towers() {
        let tower = MapTower::generate_balloons(&[LevelSpec::new(2, 2, 1)]).unwrap();
        assert!(weak_shadowing_refutation(&tower, rat(1, 4), rat(1, 2), &[], 100).is_err());
    }
}
