use std::collections::HashMap;

use num_integer::Integer;
use num_traits::Zero;
use serde::Serialize;

use crate::cantor::Word;
use crate::error::{Error, Result};
use crate::maps::PrefixTableMap;
use crate::measures::AtomicMeasure;
use crate::rational::Rational;

/// Longest cycle considered when looking for a drifting point orbit.
const MAX_DRIFT_CYCLE: usize = 256;
/// Largest combined period assembled from atom periods.
const MAX_COMBINED_PERIOD: usize = 1 << 16;

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tail {
    Periodic(Vec<Word>),
    /// At time `start + j + t*c` the point is `heads[j] 0^{t*growth} rest`.
    Drift {
        heads: Vec<Word>,
        growth: usize,
        rest: Word,
    },
}

/// The forward orbit of one eventually-zero point, in closed form.
///
/// Either the orbit is eventually periodic, or after `start` steps it
/// repeats a fixed pattern while a run of zeros grows by `growth` per cycle;
/// in the second case it converges to the periodic orbit of the heads.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointOrbit {
    transient: Vec<Word>,
    tail: Tail,
}

/// Tries to read `x` as `y` with `k > 0` zeros inserted right before a one,
/// and checks that `c` steps from `y` never read past that position.
fn detect_drift(map: &PrefixTableMap, y: &Word, x: &Word, c: usize) -> Option<Tail> {
    let k = x.len() - y.len();
    for b in (0..y.len()).filter(|&b| y.bit(b)) {
        let inserted = y
            .prefix(b)
            .concat(&Word::from_bits(vec![false; k]))
            .concat(&y.suffix(b));
        if &inserted != x {
            continue;
        }
        let rest = y.suffix(b);
        let mut current = y.clone();
        let mut boundary = b;
        let mut heads = Vec::with_capacity(c);
        let mut ok = true;
        for _ in 0..c {
            heads.push(current.prefix(boundary));
            let (p, q) = map
                .rules()
                .iter()
                .find(|(p, _)| p.contains_point(&current))
                .expect("complete table");
            if p.len() > boundary {
                ok = false;
                break;
            }
            current = q.concat(&current.suffix(p.len()));
            boundary = boundary - p.len() + q.len();
        }
        if ok && &current.to_point() == x && boundary == b + k {
            return Some(Tail::Drift {
                heads,
                growth: k,
                rest,
            });
        }
    }
    None
}

impl PointOrbit {
    pub fn compute(map: &PrefixTableMap, x: &Word, budget: usize) -> Result<Self> {
        let mut seen: HashMap<Word, usize> = HashMap::new();
        let mut xs: Vec<Word> = Vec::new();
        let mut x = x.to_point();
        for n in 0..=budget {
            if let Some(&i) = seen.get(&x) {
                let cycle = xs.split_off(i);
                return Ok(Self {
                    transient: xs,
                    tail: Tail::Periodic(cycle),
                });
            }
            for c in 1..=n.min(MAX_DRIFT_CYCLE) {
                let y = &xs[n - c];
                if x.len() > y.len() {
                    if let Some(tail) = detect_drift(map, y, &x, c) {
                        xs.truncate(n - c);
                        return Ok(Self {
                            transient: xs,
                            tail,
                        });
                    }
                }
            }
            seen.insert(x.clone(), n);
            xs.push(x.clone());
            x = map.apply(&x);
        }
        Err(Error::Resource(format!(
            "orbit of {} not resolved within {budget} steps",
            xs[0]
        )))
    }

    pub fn start(&self) -> usize {
        self.transient.len()
    }

    pub fn cycle_len(&self) -> usize {
        match &self.tail {
            Tail::Periodic(cycle) => cycle.len(),
            Tail::Drift { heads, .. } => heads.len(),
        }
    }

    pub fn is_eventually_periodic(&self) -> bool {
        matches!(self.tail, Tail::Periodic(_))
    }

    /// `f^n(x)`.
    pub fn at(&self, n: usize) -> Word {
        if n < self.start() {
            return self.transient[n].clone();
        }
        let (j, t) = (
            (n - self.start()) % self.cycle_len(),
            (n - self.start()) / self.cycle_len(),
        );
        match &self.tail {
            Tail::Periodic(cycle) => cycle[j].clone(),
            Tail::Drift {
                heads,
                growth,
                rest,
            } => heads[j]
                .concat(&Word::from_bits(vec![false; t * growth]))
                .concat(rest),
        }
    }

    /// The point of the limiting periodic orbit aligned with time `n`.
    pub fn limit_at(&self, n: usize) -> Word {
        let n = n.max(self.start());
        let j = (n - self.start()) % self.cycle_len();
        match &self.tail {
            Tail::Periodic(cycle) => cycle[j].clone(),
            Tail::Drift { heads, .. } => heads[j].to_point(),
        }
    }

    /// `sup_{m ≥ n} d(f^m(x), limit_at(m))`.
    pub fn displacement_bound(&self, n: usize) -> Rational {
        let Tail::Drift { heads, growth, .. } = &self.tail else {
            return Rational::zero();
        };
        let n = n.max(self.start());
        (n..n + heads.len())
            .map(|m| {
                let (j, t) = (
                    (m - self.start()) % heads.len(),
                    (m - self.start()) / heads.len(),
                );
                Rational::new(1, (heads[j].len() + t * growth + 1) as i128)
            })
            .max()
            .expect("nonempty cycle")
    }
}

fn checked_lcm(a: usize, b: usize) -> Result<usize> {
    let l = a / a.gcd(&b) * b;
    if l > MAX_COMBINED_PERIOD {
        return Err(Error::Resource(format!("combined period {l} is too large")));
    }
    Ok(l)
}

/// Exact orbit summary of `f̃^n(μ)`.
///
/// When every atom is eventually periodic, `transient` and `cycle` are the
/// exact measures with minimal preperiod and period. Otherwise some atom
/// drifts: `transient` is still exact, `cycle` is the limiting periodic
/// orbit the measures converge to, and `exact` is false.
#[derive(Clone, Debug)]
pub struct MeasureOrbit {
    atoms: Vec<(PointOrbit, Rational)>,
    pub transient: Vec<AtomicMeasure>,
    pub cycle: Vec<AtomicMeasure>,
    pub exact: bool,
}

/// Preperiod, period and visited states of an orbit.
#[derive(Clone, Debug, Serialize)]
pub struct OrbitSummary {
    pub preperiod: usize,
    pub period: usize,
    pub states: Vec<AtomicMeasure>,
    pub exact: bool,
}

fn minimal_period(cycle: &[AtomicMeasure]) -> usize {
    let c = cycle.len();
    (1..=c)
        .filter(|p| c.is_multiple_of(*p))
        .find(|&p| (0..c).all(|i| cycle[i] == cycle[(i + p) % c]))
        .expect("the full length is a period")
}

impl MeasureOrbit {
    pub fn compute(map: &PrefixTableMap, mu: &AtomicMeasure, budget: usize) -> Result<Self> {
        let atoms = mu
            .atoms()
            .iter()
            .map(|(p, m)| PointOrbit::compute(map, p, budget).map(|o| (o, *m)))
            .collect::<Result<Vec<_>>>()?;
        let start = atoms.iter().map(|(o, _)| o.start()).max().unwrap_or(0);
        let combined = atoms
            .iter()
            .try_fold(1usize, |acc, (o, _)| checked_lcm(acc, o.cycle_len()))?;
        let exact = atoms.iter().all(|(o, _)| o.is_eventually_periodic());
        let mut orbit = Self {
            atoms,
            transient: Vec::new(),
            cycle: Vec::new(),
            exact,
        };
        let limit: Vec<AtomicMeasure> = (start..start + combined)
            .map(|n| orbit.limit_measure(n))
            .collect();
        let period = minimal_period(&limit);
        let mut preperiod = start;
        if exact {
            // the measure orbit may become periodic before every atom does
            while preperiod > 0
                && orbit.measure_at(preperiod - 1) == orbit.measure_at(preperiod - 1 + period)
            {
                preperiod -= 1;
            }
        }
        orbit.transient = (0..preperiod).map(|n| orbit.measure_at(n)).collect();
        orbit.cycle = (preperiod..preperiod + period)
            .map(|n| orbit.limit_measure(n.max(start)))
            .collect();
        if exact && preperiod < start {
            orbit.cycle = (preperiod..preperiod + period)
                .map(|n| orbit.measure_at(n))
                .collect();
        }
        Ok(orbit)
    }

    fn limit_measure(&self, n: usize) -> AtomicMeasure {
        AtomicMeasure::new(self.atoms.iter().map(|(o, m)| (o.limit_at(n), *m)))
            .expect("masses are preserved")
    }

    /// `f̃^n(μ)`, exactly.
    pub fn measure_at(&self, n: usize) -> AtomicMeasure {
        AtomicMeasure::new(self.atoms.iter().map(|(o, m)| (o.at(n), *m)))
            .expect("masses are preserved")
    }

    pub fn preperiod(&self) -> usize {
        self.transient.len()
    }

    pub fn period(&self) -> usize {
        self.cycle.len()
    }

    /// The cycle (or limit-cycle) measure aligned with time `n ≥ preperiod`.
    pub fn cycle_at(&self, n: usize) -> &AtomicMeasure {
        &self.cycle[(n - self.preperiod()) % self.period()]
    }

    /// `sup_{m ≥ n} d_P(f̃^m(μ), cycle_at(m))`; zero for exact orbits.
    pub fn displacement_bound(&self, n: usize) -> Rational {
        self.atoms
            .iter()
            .map(|(o, _)| o.displacement_bound(n))
            .max()
            .unwrap_or_else(Rational::zero)
    }

    pub fn summary(&self) -> OrbitSummary {
        OrbitSummary {
            preperiod: self.preperiod(),
            period: self.period(),
            states: self.transient.iter().chain(&self.cycle).cloned().collect(),
            exact: self.exact,
        }
    }

    /// A lower bound on `inf_{n ≥ 0} d_P(f̃^n(μ), target)`, exact when the
    /// orbit is. `extra` further steps are evaluated exactly before the
    /// limit-cycle bound takes over.
    pub fn distance_lower_bound(&self, target: &AtomicMeasure, extra: usize) -> Result<Rational> {
        let mut best: Option<Rational> = None;
        let mut consider = |d: Rational| {
            best = Some(best.map_or(d, |b: Rational| b.min(d)));
        };
        let horizon = self.preperiod() + if self.exact { 0 } else { extra };
        for n in 0..horizon {
            consider(self.measure_at(n).distance(target)?);
        }
        let slack = self.displacement_bound(horizon);
        for m in &self.cycle {
            let d = m.distance(target)? - slack;
            consider(d.max(Rational::zero()));
        }
        Ok(best.expect("nonempty orbit"))
    }
}

pub fn orbit_summary(
    map: &PrefixTableMap,
    mu: &AtomicMeasure,
    budget: usize,
) -> Result<OrbitSummary> {
    MeasureOrbit::compute(map, mu, budget).map(|o| o.summary())
}

/// `d_n = d_P(f̃^n μ, f̃^n ν)`: exact values before the joint cycle and the
/// values along the (limit) cycle after it.
#[derive(Clone, Debug, Serialize)]
pub struct DistanceProfile {
    #[serde(serialize_with = "ser_vec")]
    pub transient: Vec<Rational>,
    #[serde(serialize_with = "ser_vec")]
    pub cycle: Vec<Rational>,
    #[serde(with = "crate::rational::serde_str")]
    pub liminf: Rational,
    #[serde(with = "crate::rational::serde_str")]
    pub limsup: Rational,
    /// `sup_n d_n`; exact when `exact`, otherwise an upper bound.
    #[serde(with = "crate::rational::serde_str")]
    pub sup: Rational,
    pub exact: bool,
}

fn ser_vec<S: serde::Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(crate::rational::format))
}

impl DistanceProfile {
    pub fn between(a: &MeasureOrbit, b: &MeasureOrbit) -> Result<Self> {
        let start = a.preperiod().max(b.preperiod());
        let period = checked_lcm(a.period(), b.period())?;
        let transient = (0..start)
            .map(|n| a.measure_at(n).distance(&b.measure_at(n)))
            .collect::<Result<Vec<_>>>()?;
        let cycle = (start..start + period)
            .map(|n| a.cycle_at(n).distance(b.cycle_at(n)))
            .collect::<Result<Vec<_>>>()?;
        let liminf = *cycle.iter().min().expect("nonempty cycle");
        let limsup = *cycle.iter().max().expect("nonempty cycle");
        let exact = a.exact && b.exact;
        let slack = a.displacement_bound(start) + b.displacement_bound(start);
        let sup = transient
            .iter()
            .copied()
            .chain(std::iter::once(limsup + slack))
            .max()
            .expect("nonempty");
        Ok(Self {
            transient,
            cycle,
            liminf,
            limsup,
            sup,
            exact,
        })
    }

    /// Upper density of `{n : pred(d_n)}`, for exact profiles.
    pub fn upper_density_where(&self, pred: impl Fn(&Rational) -> bool) -> Option<Rational> {
        if !self.exact {
            return None;
        }
        let prefix: Vec<bool> = self.transient.iter().map(&pred).collect();
        let cycle: Vec<bool> = self.cycle.iter().map(&pred).collect();
        Some(upper_density(&prefix, &cycle))
    }
}

pub fn distance_profile(
    map: &PrefixTableMap,
    mu: &AtomicMeasure,
    nu: &AtomicMeasure,
    budget: usize,
) -> Result<DistanceProfile> {
    DistanceProfile::between(
        &MeasureOrbit::compute(map, mu, budget)?,
        &MeasureOrbit::compute(map, nu, budget)?,
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum LiYorke {
    Asymptotic,
    SeparatedBelow,
    LiYorkePair,
}

pub fn li_yorke_classify(profile: &DistanceProfile) -> LiYorke {
    if profile.limsup.is_zero() {
        LiYorke::Asymptotic
    } else if profile.liminf.is_zero() {
        LiYorke::LiYorkePair
    } else {
        LiYorke::SeparatedBelow
    }
}

/// `limsup card([1,n] ∩ A)/n` for the index set whose indicator is `prefix`
/// followed by `cycle` repeated forever. The prefix does not matter: the
/// running averages converge to the cycle average.
pub fn upper_density(prefix: &[bool], cycle: &[bool]) -> Rational {
    let _ = prefix;
    if cycle.is_empty() {
        return Rational::zero();
    }
    let hits = cycle.iter().filter(|&&b| b).count();
    Rational::new(hits as i128, cycle.len() as i128)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cantor::w;
    use crate::rational::rat;

    fn table(rules: &[(&str, &str)]) -> PrefixTableMap {
        PrefixTableMap::new(rules.iter().map(|(p, q)| (w(p), w(q))).collect()).unwrap()
    }

    #[test]
    fn identity_and_swap_orbits() {
        let mu = AtomicMeasure::uniform(&[w("0"), w("1")]).unwrap();
        let s = orbit_summary(&PrefixTableMap::identity(), &mu, 100).unwrap();
        assert_eq!((s.preperiod, s.period), (0, 1));
        let swap = table(&[("0", "1"), ("1", "0")]);
        let s = orbit_summary(&swap, &AtomicMeasure::dirac(&w("0")), 100).unwrap();
        assert_eq!((s.preperiod, s.period), (0, 2));
        // the uniform measure is fixed although each atom has period 2
        let s = orbit_summary(&swap, &mu, 100).unwrap();
        assert_eq!((s.preperiod, s.period), (0, 1));
    }

    #[test]
    fn drifting_point_converges() {
        // 1 0^m 1 -> 1 0^{m+1} 1
        let h = table(&[("0", "0"), ("10", "100"), ("11", "101")]);
        let orbit = PointOrbit::compute(&h, &w("11"), 100).unwrap();
        assert!(!orbit.is_eventually_periodic());
        for n in 0..10 {
            let mut x = w("11");
            for _ in 0..n {
                x = h.apply(&x);
            }
            assert_eq!(orbit.at(n), x);
            if n < orbit.start() {
                continue;
            }
            assert!(
                crate::cantor::point_distance(&x, &orbit.limit_at(n))
                    <= orbit.displacement_bound(n)
            );
        }
        assert_eq!(orbit.limit_at(50), w("1"));
        let m = MeasureOrbit::compute(&h, &AtomicMeasure::dirac(&w("11")), 100).unwrap();
        assert!(!m.exact);
        assert_eq!(m.cycle, vec![AtomicMeasure::dirac(&w("1"))]);
    }

    #[test]
    fn profile_examples() {
        let swap = table(&[("0", "1"), ("1", "0")]);
        let p0 = AtomicMeasure::dirac(&w("0"));
        let same = distance_profile(&swap, &p0, &p0, 10).unwrap();
        assert_eq!((same.liminf, same.limsup), (rat(0, 1), rat(0, 1)));
        assert_eq!(li_yorke_classify(&same), LiYorke::Asymptotic);
        let p1 = AtomicMeasure::dirac(&w("1"));
        let apart = distance_profile(&swap, &p0, &p1, 10).unwrap();
        assert_eq!((apart.liminf, apart.limsup), (rat(1, 1), rat(1, 1)));
        assert_eq!(li_yorke_classify(&apart), LiYorke::SeparatedBelow);
    }

    #[test]
    fn classification_table() {
        let profile = |liminf, limsup| DistanceProfile {
            transient: vec![],
            cycle: vec![liminf, limsup],
            liminf,
            limsup,
            sup: limsup,
            exact: true,
        };
        assert_eq!(
            li_yorke_classify(&profile(rat(0, 1), rat(0, 1))),
            LiYorke::Asymptotic
        );
        assert_eq!(
            li_yorke_classify(&profile(rat(1, 2), rat(1, 1))),
            LiYorke::SeparatedBelow
        );
        assert_eq!(
            li_yorke_classify(&profile(rat(0, 1), rat(1, 2))),
            LiYorke::LiYorkePair
        );
    }

    #[test]
    fn density_examples() {
        assert_eq!(upper_density(&[false, false], &[true]), rat(1, 1));
        assert_eq!(upper_density(&[true], &[false]), rat(0, 1));
        assert_eq!(upper_density(&[], &[true, false]), rat(1, 2));
    }
}
