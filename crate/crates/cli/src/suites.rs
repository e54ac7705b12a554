//! The certificate suites run by `analyze`.

use std::collections::BTreeMap;
use std::time::Instant;

use cantor_dynamics::cantor::Word;
use cantor_dynamics::dynamics::{
    chain_connect_homeo, chain_connect_map, chain_continuity_test, choose_gamma, entropy_estimate,
    equicontinuity_certificate, k0_for, li_yorke_classify, random_close_pair, simplex_grid,
    transitivity_check, weak_shadowing_refutation, DistanceProfile, LiYorke, MeasureOrbit,
};
use cantor_dynamics::maps::{ComponentShape, MapTower, TowerKind};
use cantor_dynamics::measures::AtomicMeasure;
use cantor_dynamics::rational::{self, Rational};
use cantor_dynamics::recurrence::{
    admissible_choices, approx_by_periodic, consistency_check, non_cr_perturbation,
    periodic_measure, recurrence_certificate,
};
use cantor_dynamics::{Certificate, Error};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::ExperimentConfig;
use crate::report::Item;

pub const SUITES: [&str; 5] = ["liyorke", "entropy", "chains", "shadowing", "recurrence"];

pub struct Context<'a> {
    pub config: &'a ExperimentConfig,
    pub tower: &'a MapTower,
    pub grid: Vec<AtomicMeasure>,
}

/// Collects items and their timings in run order.
pub struct Runner {
    pub items: Vec<Item>,
    pub timings_ms: BTreeMap<String, u64>,
}

impl Runner {
    pub fn new() -> Self {
        Self {
            items: Vec::new(),
            timings_ms: BTreeMap::new(),
        }
    }

    fn run(&mut self, suite: &str, name: &str, f: impl FnOnce() -> Result<Certificate, Error>) {
        let start = Instant::now();
        let result = f().map_err(|e| e.to_string());
        self.timings_ms.insert(
            format!("{suite}/{name}"),
            start.elapsed().as_millis() as u64,
        );
        self.items.push(Item::from_result(suite, name, result));
    }

    fn skip(&mut self, suite: &str, name: &str, reason: &str) {
        self.items.push(Item::skipped(suite, name, reason));
    }
}

impl Context<'_> {
    /// Item-specific generator, independent of which other items run.
    fn rng(&self, item: &str) -> ChaCha8Rng {
        let salt = item.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
            (h ^ b as u64).wrapping_mul(0x100_0000_01b3)
        });
        ChaCha8Rng::seed_from_u64(self.config.seed ^ salt)
    }

    fn budget(&self) -> usize {
        self.config.budget
    }

    pub fn run(&self, suite: &str, runner: &mut Runner) {
        match suite {
            "liyorke" => self.liyorke(runner),
            "entropy" => self.entropy(runner),
            "chains" => self.chains(runner),
            "shadowing" => self.shadowing(runner),
            "recurrence" => self.recurrence(runner),
            _ => unreachable!("suite names are validated"),
        }
    }

    fn liyorke(&self, runner: &mut Runner) {
        runner.run("liyorke", "li_yorke_grid", || {
            let orbits = self
                .grid
                .par_iter()
                .map(|m| MeasureOrbit::compute(&self.tower.map, m, self.budget()))
                .collect::<Result<Vec<_>, _>>()?;
            let pairs: Vec<(usize, usize)> = (0..orbits.len())
                .flat_map(|i| (i + 1..orbits.len()).map(move |j| (i, j)))
                .collect();
            let profiles = pairs
                .par_iter()
                .map(|&(i, j)| DistanceProfile::between(&orbits[i], &orbits[j]))
                .collect::<Result<Vec<_>, _>>()?;
            let count = |v: LiYorke| {
                profiles
                    .iter()
                    .filter(|p| li_yorke_classify(p) == v)
                    .count()
            };
            let smallest_gap = profiles
                .iter()
                .map(|p| p.liminf)
                .filter(|l| *l > Rational::from_integer(0))
                .min();
            let li_yorke = count(LiYorke::LiYorkePair);
            Ok(Certificate::new("li_yorke_grid")
                .param("grid_size", self.grid.len())
                .param("m", self.config.grid.m)
                .param("level", self.config.grid.level)
                .witness("pairs", pairs.len())
                .witness("asymptotic", count(LiYorke::Asymptotic))
                .witness("separated_below", count(LiYorke::SeparatedBelow))
                .witness("li_yorke_pairs", li_yorke)
                .witness(
                    "inexact_profiles",
                    profiles.iter().filter(|p| !p.exact).count(),
                )
                .witness(
                    "smallest_positive_liminf",
                    smallest_gap.map(|r| rational::format(&r)),
                )
                .verdict(
                    if li_yorke == 0 {
                        "NoLiYorkePair"
                    } else {
                        "LiYorkePairFound"
                    },
                    li_yorke == 0,
                ))
        });
        if self.tower.kind != TowerKind::Balloons {
            runner.skip("liyorke", "equicontinuity", "needs a balloon tower");
            return;
        }
        runner.run("liyorke", "equicontinuity", || {
            let epsilon = self.config.liyorke.epsilon;
            let level = self
                .tower
                .levels
                .iter()
                .find(|l| l.partition.mesh() < epsilon)
                .ok_or_else(|| {
                    Error::Parameter(format!("no certified level has mesh below {epsilon}"))
                })?;
            let p = &level.partition;
            let delta = p
                .separation()
                .min(p.mesh() / Rational::from_integer(2 * p.card() as i128));
            let mut rng = self.rng("equicontinuity");
            let pairs: Vec<_> = (0..self.config.liyorke.pairs)
                .map(|_| random_close_pair(p, delta, &mut rng))
                .collect();
            equicontinuity_certificate(self.tower, epsilon, &pairs, self.budget())
        });
    }

    fn entropy(&self, runner: &mut Runner) {
        runner.run("entropy", "entropy_estimate", || {
            let cfg = &self.config.entropy;
            let table = entropy_estimate(
                &self.tower.map,
                &self.grid,
                &cfg.epsilons,
                cfg.n_max,
                self.budget(),
            )?;
            let flat = table.rows.iter().all(|r| r.final_ratio == "1");
            Ok(Certificate::new("entropy_estimate")
                .param("grid_size", table.grid_size)
                .param("n_max", table.n_max)
                .param(
                    "epsilons",
                    cfg.epsilons
                        .iter()
                        .map(rational::format)
                        .collect::<Vec<_>>(),
                )
                .witness("rows", &table.rows)
                .verdict(
                    if flat {
                        "NoGrowthAtHorizon"
                    } else {
                        "GrowthAtHorizon"
                    },
                    flat,
                ))
        });
    }

    fn chains(&self, runner: &mut Runner) {
        let cfg = &self.config.chains;
        runner.run("chains", "k0", || {
            let gamma = choose_gamma(cfg.delta)?;
            let k0 = k0_for(gamma);
            let k = Rational::from_integer(k0 as i128);
            let one = Rational::from_integer(1);
            let holds = (k - 1) * gamma < one && one <= k * gamma;
            Ok(Certificate::new("k0")
                .param_rational("delta", &cfg.delta)
                .witness_rational("gamma", &gamma)
                .witness("k0", k0)
                .verdict(if holds { "Minimal" } else { "NotMinimal" }, holds))
        });
        runner.run("chains", "chain_connect", || {
            let k0 = k0_for(choose_gamma(cfg.delta)?);
            let pairs: Vec<(usize, usize)> = (0..self.grid.len())
                .flat_map(|i| (0..self.grid.len()).map(move |j| (i, j)))
                .collect();
            let failures = pairs
                .par_iter()
                .map(|&(i, j)| {
                    let (mu, nu) = (&self.grid[i], &self.grid[j]);
                    let mut bad = Vec::new();
                    for k in k0..=k0 + cfg.extra {
                        let (chain, end) = match &self.tower.inverse {
                            Some(inv) => (
                                chain_connect_homeo(&self.tower.map, inv, mu, nu, cfg.delta, k)?,
                                nu.clone(),
                            ),
                            None => (
                                chain_connect_map(&self.tower.map, mu, nu, cfg.delta, k)?,
                                nu.pushforward_n(&self.tower.map, k),
                            ),
                        };
                        if !chain.verify(&self.tower.map)? || *chain.last() != end {
                            bad.push((i, j, k));
                        }
                    }
                    Ok(bad)
                })
                .collect::<Result<Vec<_>, Error>>()?
                .concat();
            let passed = failures.is_empty();
            Ok(Certificate::new("chain_connect")
                .param_rational("delta", &cfg.delta)
                .param("lengths", (k0, k0 + cfg.extra))
                .param("homeomorphism", self.tower.inverse.is_some())
                .witness("chains", pairs.len() * (cfg.extra + 1))
                .witness("failures", failures)
                .verdict(
                    if passed {
                        "AllChainsVerified"
                    } else {
                        "ChainFailed"
                    },
                    passed,
                ))
        });
        runner.run("chains", "chain_continuity", || {
            chain_continuity_test(
                &self.tower.map,
                cfg.depth,
                cfg.epsilon,
                &[cfg.delta],
                &[],
                self.budget(),
            )
        });
    }

    fn shadowing(&self, runner: &mut Runner) {
        let partition = &self.tower.level(self.config.grid.level).partition;
        runner.run("shadowing", "transitivity", || {
            Ok(transitivity_check(&self.tower.map, partition))
        });
        if self.tower.kind != TowerKind::Dumbbells {
            runner.skip("shadowing", "weak_shadowing", "needs a dumbbell tower");
            return;
        }
        let cfg = &self.config.shadowing;
        runner.run("shadowing", "weak_shadowing", || {
            weak_shadowing_refutation(
                self.tower,
                cfg.epsilon,
                cfg.delta,
                &self.grid,
                self.budget(),
            )
        });
    }

    fn periods(&self) -> Vec<usize> {
        let q = self.tower.level(0).loop_len;
        match &self.config.recurrence.periods {
            p if p.is_empty() => (1..=q).filter(|d| q.is_multiple_of(*d)).collect(),
            p => p.clone(),
        }
    }

    fn recurrence(&self, runner: &mut Runner) {
        let tower = self.tower;
        let cfg = &self.config.recurrence;
        let finest = tower.levels.len() - 1;
        runner.run("recurrence", "periodic_measures", || {
            let mut counts = BTreeMap::new();
            let mut failures = Vec::new();
            for p in self.periods() {
                let choices = admissible_choices(tower, p);
                let mut measures = Vec::new();
                for choice in &choices {
                    for level in 0..tower.levels.len() {
                        let mu = periodic_measure(tower, choice, level)?;
                        let mut image = mu.clone();
                        for j in 1..=p {
                            image = image.pushforward(&tower.map);
                            if (image == mu) != (j == p) {
                                failures
                                    .push(format!("{choice:?} at level {level} returns at {j}"));
                                break;
                            }
                        }
                        if level == finest {
                            measures.push(mu);
                        }
                    }
                }
                for (i, a) in measures.iter().enumerate() {
                    for b in &measures[i + 1..] {
                        if a.distance(b)?.numer() == &0 {
                            failures.push(format!("period {p}: two choices coincide"));
                        }
                    }
                }
                counts.insert(p.to_string(), choices.len());
            }
            let passed = failures.is_empty();
            Ok(Certificate::new("periodic_measures")
                .param("periods", self.periods())
                .witness("distinct_measures", counts)
                .witness("failures", failures)
                .verdict(
                    if passed {
                        "ExactPeriods"
                    } else {
                        "PeriodMismatch"
                    },
                    passed,
                ))
        });
        runner.run("recurrence", "consistency", || {
            let mut checked = 0;
            let mut failures = Vec::new();
            for p in self.periods() {
                for choice in admissible_choices(tower, p) {
                    for coarse in 0..finest {
                        let cert = consistency_check(tower, &choice, coarse, coarse + 1);
                        checked += 1;
                        if !cert.passed {
                            failures.push(cert);
                        }
                    }
                }
            }
            let passed = failures.is_empty();
            Ok(Certificate::new("consistency")
                .witness("checked", checked)
                .witness("failures", failures)
                .verdict(if passed { "Consistent" } else { "Inconsistent" }, passed))
        });
        let base = admissible_choices(tower, 1)
            .first()
            .map(|c| periodic_measure(tower, c, finest));
        match base {
            Some(Ok(mu)) => {
                runner.run("recurrence", "recurrence_certificate", || {
                    recurrence_certificate(tower, &mu, cfg.epsilon)
                });
                for lambda in &cfg.lambdas {
                    let name = format!(
                        "non_cr_perturbation_{}",
                        rational::format(lambda).replace('/', "_")
                    );
                    runner.run("recurrence", &name, || {
                        non_cr_perturbation(tower, &mu, *lambda, 0).map(|(_, cert)| cert)
                    });
                }
            }
            _ => runner.skip(
                "recurrence",
                "recurrence_certificate",
                "no fixed admissible choice",
            ),
        }
        let mut rng = self.rng("approx_by_periodic");
        for i in 0..cfg.samples {
            let start = loop_supported(tower, finest, &mut rng);
            runner.run("recurrence", &format!("approx_by_periodic_{i}"), || {
                // measures on the attracting cycle are recurrent
                let mu = MeasureOrbit::compute(&tower.map, &start, self.budget())?.cycle[0].clone();
                approx_by_periodic(tower, &mu, cfg.epsilon, self.budget())
                    .map(|(_, cert)| cert.param("measure", &mu))
            });
        }
    }
}

/// A random measure on points of the loop cells of a level.
fn loop_supported<R: Rng>(tower: &MapTower, level: usize, rng: &mut R) -> AtomicMeasure {
    let cells: Vec<&Word> = tower
        .level(level)
        .components
        .iter()
        .flat_map(|c| match c {
            ComponentShape::Balloon { cycle, .. } | ComponentShape::Loop { cycle } => {
                cycle.iter().collect()
            }
            ComponentShape::Dumbbell { left, right, .. } => left.iter().chain(right).collect(),
            ComponentShape::Other { .. } => Vec::new(),
        })
        .collect();
    let picks: Vec<(Word, i128)> = (0..rng.gen_range(1..=4))
        .map(|_| {
            let cell = cells[rng.gen_range(0..cells.len())];
            let tail = Word::from_bits(
                (0..rng.gen_range(0..4))
                    .map(|_| rng.gen_bool(0.5))
                    .collect(),
            );
            (cell.concat(&tail), rng.gen_range(1..=4))
        })
        .collect();
    let total: i128 = picks.iter().map(|(_, m)| m).sum();
    AtomicMeasure::new(picks.into_iter().map(|(p, m)| (p, Rational::new(m, total))))
        .expect("positive masses")
}

pub fn grid_for(config: &ExperimentConfig, tower: &MapTower) -> Result<Vec<AtomicMeasure>, String> {
    let level = config.grid.level;
    if level >= tower.levels.len() {
        return Err(format!(
            "[grid] level {level} but the tower has {} levels",
            tower.levels.len()
        ));
    }
    Ok(simplex_grid(&tower.level(level).partition, config.grid.m))
}
