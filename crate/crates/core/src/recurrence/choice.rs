use serde::Serialize;

use crate::certificate::Certificate;
use crate::error::{Error, Result};
use crate::maps::MapTower;
use crate::measures::AtomicMeasure;
use crate::rational::Rational;

use super::{initial_vertex, loops};

/// One component per tower level, each nested in the previous one by its
/// initial vertex, with a loop offset `t` (1-based) and a period `p`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AdmissibleChoice {
    pub components: Vec<usize>,
    pub offset: usize,
    pub period: usize,
}

impl AdmissibleChoice {
    pub fn validate(&self, tower: &MapTower) -> Result<()> {
        if self.components.len() != tower.levels.len() {
            return Err(Error::Parameter(format!(
                "choice covers {} levels, tower has {}",
                self.components.len(),
                tower.levels.len()
            )));
        }
        let mut previous = None;
        for (level, &c) in tower.levels.iter().zip(&self.components) {
            let shape = level
                .components
                .get(c)
                .ok_or_else(|| Error::Parameter(format!("no component {c}")))?;
            let init = initial_vertex(shape)
                .ok_or_else(|| Error::Parameter("component has no initial vertex".into()))?;
            if let Some(prev) = previous {
                if !crate::cantor::Word::is_prefix_of(prev, init) {
                    return Err(Error::Parameter(format!(
                        "initial vertex {init} is not nested in {prev}"
                    )));
                }
            }
            previous = Some(init);
            if self.period == 0 || level.loop_len % self.period != 0 {
                return Err(Error::Parameter(format!(
                    "period {} does not divide the loop length {}",
                    self.period, level.loop_len
                )));
            }
            if self.offset == 0 || self.offset > level.loop_len {
                return Err(Error::Parameter(format!(
                    "offset {} is out of range",
                    self.offset
                )));
            }
        }
        Ok(())
    }
}

/// Every admissible choice with the given period and offsets `1..=p`.
pub fn admissible_choices(tower: &MapTower, period: usize) -> Vec<AdmissibleChoice> {
    let mut paths: Vec<Vec<usize>> = (0..tower.levels[0].components.len())
        .map(|c| vec![c])
        .collect();
    for k in 1..tower.levels.len() {
        let coarse = &tower.levels[k - 1].components;
        let fine = &tower.levels[k].components;
        paths = paths
            .into_iter()
            .flat_map(|path| {
                let outer = initial_vertex(&coarse[*path.last().expect("nonempty")]).cloned();
                fine.iter()
                    .enumerate()
                    .filter(move |(_, s)| {
                        matches!((&outer, initial_vertex(s)), (Some(o), Some(i)) if o.is_prefix_of(i))
                    })
                    .map(move |(c, _)| {
                        let mut next = path.clone();
                        next.push(c);
                        next
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
    }
    paths
        .into_iter()
        .flat_map(|components| {
            (1..=period).map(move |offset| AdmissibleChoice {
                components: components.clone(),
                offset,
                period,
            })
        })
        .filter(|c| c.validate(tower).is_ok())
        .collect()
}

/// Level-`n` truncation: mass `p/Q` on the representatives of
/// `w_{t + jp}`, `0 ≤ j < Q/p`, in the chosen component's loop.
pub fn periodic_measure(
    tower: &MapTower,
    choice: &AdmissibleChoice,
    level: usize,
) -> Result<AtomicMeasure> {
    choice.validate(tower)?;
    let lvl = tower
        .levels
        .get(level)
        .ok_or_else(|| Error::Parameter(format!("no level {level}")))?;
    let shape = &lvl.components[choice.components[level]];
    let cycle = loops(shape)[0];
    let q = cycle.len();
    let mass = Rational::new(choice.period as i128, q as i128);
    AtomicMeasure::new((0..q / choice.period).map(|j| {
        (
            cycle[(choice.offset - 1 + j * choice.period) % q].to_point(),
            mass,
        )
    }))
}

/// The masses of the level-`fine` truncation aggregated over the level-`coarse`
/// cells equal the level-`coarse` truncation.
pub fn consistency_check(
    tower: &MapTower,
    choice: &AdmissibleChoice,
    coarse: usize,
    fine: usize,
) -> Certificate {
    let cert = Certificate::new("consistency_check")
        .param("choice", choice)
        .param("coarse_level", coarse)
        .param("fine_level", fine);
    let (a, b) = match (
        periodic_measure(tower, choice, coarse),
        periodic_measure(tower, choice, fine),
    ) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => {
            return cert
                .witness("error", e.to_string())
                .verdict("Invalid", false)
        }
    };
    let partition = &tower.levels[coarse].partition;
    let expected = a.cell_masses(partition);
    let aggregated = b.cell_masses(partition);
    let holds = expected == aggregated;
    let fmt = |v: &[Rational]| v.iter().map(crate::rational::format).collect::<Vec<_>>();
    cert.witness("coarse_masses", fmt(&expected))
        .witness("aggregated_fine_masses", fmt(&aggregated))
        .verdict(if holds { "Consistent" } else { "Inconsistent" }, holds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::LevelSpec;
    use crate::rational::rat;

    fn tower() -> MapTower {
        MapTower::generate_balloons(&[LevelSpec::new(3, 3, 1), LevelSpec::new(5, 3, 4)]).unwrap()
    }

    #[test]
    fn masses_on_every_second_loop_cell() {
        let tower = tower();
        let choice = AdmissibleChoice {
            components: vec![0, 0],
            offset: 1,
            period: 2,
        };
        let mu = periodic_measure(&tower, &choice, 0).unwrap();
        let crate::maps::ComponentShape::Balloon { cycle, .. } = &tower.level(0).components[0]
        else {
            panic!()
        };
        let expected: Vec<_> = [0, 2, 4]
            .iter()
            .map(|&i| (cycle[i].to_point(), rat(1, 3)))
            .collect();
        assert_eq!(mu, AtomicMeasure::new(expected).unwrap());
        assert_eq!(mu.pushforward_n(&tower.map, 2), mu);
        assert_ne!(mu.pushforward(&tower.map), mu);
    }

    #[test]
    fn period_one_is_uniform_and_fixed() {
        let tower = tower();
        let choice = AdmissibleChoice {
            components: vec![0, 1],
            offset: 1,
            period: 1,
        };
        let mu = periodic_measure(&tower, &choice, 1).unwrap();
        assert_eq!(mu.len(), 6);
        assert!(mu.atoms().iter().all(|(_, m)| *m == rat(1, 6)));
        assert_eq!(mu.pushforward(&tower.map), mu);
        assert!(consistency_check(&tower, &choice, 0, 1).passed);
    }

    #[test]
    fn enumerates_nested_choices() {
        let tower = tower();
        let choices = admissible_choices(&tower, 2);
        assert_eq!(choices.len(), 8);
        let measures: Vec<_> = choices
            .iter()
            .map(|c| periodic_measure(&tower, c, 1).unwrap())
            .collect();
        for i in 0..measures.len() {
            for j in i + 1..measures.len() {
                assert_ne!(measures[i], measures[j]);
            }
        }
    }

    #[test]
    fn broken_nesting_fails() {
        let tower =
            MapTower::generate_balloons(&[LevelSpec::new(3, 2, 2), LevelSpec::new(4, 2, 4)])
                .unwrap();
        let good = admissible_choices(&tower, 1);
        assert_eq!(good.len(), 4);
        let mut bad = good[0].clone();
        bad.components[1] = (0..4)
            .find(|c| {
                !good
                    .iter()
                    .any(|g| g.components == vec![bad.components[0], *c])
            })
            .unwrap();
        assert!(!consistency_check(&tower, &bad, 0, 1).passed);
        assert!(periodic_measure(
            &tower,
            &AdmissibleChoice {
                period: 3,
                ..good[0].clone()
            },
            0
        )
        .is_err());
    }
}
