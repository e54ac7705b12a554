use num_integer::Integer;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::cantor::{point_distance, Word};
use crate::error::{Error, Result};
use crate::rational::Rational;

use super::atomic::AtomicMeasure;
use super::flow::bipartite_max_flow;

/// Largest support the subset enumeration accepts.
pub const ENUMERATION_LIMIT: usize = 20;
/// Largest support for which `Auto` prefers enumeration.
pub const AUTO_ENUMERATION: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Enumeration,
    Flow,
    Auto,
}

impl std::str::FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "enumeration" | "enum" => Ok(Self::Enumeration),
            "flow" => Ok(Self::Flow),
            "auto" => Ok(Self::Auto),
            _ => Err(Error::Parameter(format!("unknown backend {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ProhorovResult {
    #[serde(with = "crate::rational::serde_str")]
    pub value: Rational,
    /// Support atoms of the binding set `X`.
    pub witness: Vec<Word>,
    pub backend: Backend,
}

/// Masses scaled to integers over a common denominator.
struct Scaled {
    points: Vec<Word>,
    mass: Vec<i128>,
}

fn common_scale(mu: &AtomicMeasure, nu: &AtomicMeasure) -> Result<i128> {
    mu.atoms()
        .iter()
        .chain(nu.atoms())
        .try_fold(1i128, |acc, (_, m)| {
            let d = *m.denom();
            (acc / acc.gcd(&d))
                .checked_mul(d)
                .ok_or_else(|| Error::Resource("mass denominators overflow".into()))
        })
}

fn scale(mu: &AtomicMeasure, by: i128) -> Scaled {
    Scaled {
        points: mu.support(),
        mass: mu
            .atoms()
            .iter()
            .map(|(_, m)| m.numer() * (by / m.denom()))
            .collect(),
    }
}

/// `max_X μ(X) − ν(N(X))` with `N(X)` the `ν` atoms adjacent to `X`, by
/// enumerating every subset of `μ`'s support.
fn gap_enumeration(left: &[i128], right: &[i128], adjacent: &[Vec<bool>]) -> (i128, u32) {
    let m = left.len();
    let full: u32 = if m == 32 { u32::MAX } else { (1u32 << m) - 1 };
    let size = 1usize << m;
    // avoid[T] = ν-mass of atoms whose neighbours all lie in T
    let mut avoid = vec![0i128; size];
    for (j, &b) in right.iter().enumerate() {
        let signature = (0..m)
            .filter(|&i| adjacent[i][j])
            .fold(0u32, |s, i| s | 1 << i);
        avoid[signature as usize] += b;
    }
    for i in 0..m {
        for t in 0..size {
            if t & (1 << i) != 0 {
                avoid[t] += avoid[t ^ (1 << i)];
            }
        }
    }
    let total: i128 = right.iter().sum();
    let mut mass = vec![0i128; size];
    let (mut best, mut arg) = (0i128, 0u32);
    for x in 1..size {
        let low = x.trailing_zeros() as usize;
        mass[x] = mass[x & (x - 1)] + left[low];
        let g = mass[x] - (total - avoid[(full ^ x as u32) as usize]);
        if g > best {
            best = g;
            arg = x as u32;
        }
    }
    (best, arg)
}

fn gap_flow(left: &[i128], right: &[i128], adjacent: &[Vec<bool>]) -> (i128, Vec<bool>) {
    let links: Vec<Vec<usize>> = adjacent
        .iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .filter(|(_, &a)| a)
                .map(|(j, _)| j)
                .collect()
        })
        .collect();
    let (flow, side) = bipartite_max_flow(left, right, &links);
    (left.iter().sum::<i128>() - flow, side)
}

struct Solver {
    mu: Scaled,
    nu: Scaled,
    scale: i128,
    dist: Vec<Vec<Rational>>,
    enumerate: bool,
    two_sided: bool,
}

impl Solver {
    fn gap_one(
        &self,
        left: &Scaled,
        right: &Scaled,
        adjacent: Vec<Vec<bool>>,
    ) -> (i128, Vec<Word>) {
        let (g, chosen): (i128, Vec<bool>) = if self.enumerate {
            let (g, mask) = gap_enumeration(&left.mass, &right.mass, &adjacent);
            (
                g,
                (0..left.mass.len()).map(|i| mask & (1 << i) != 0).collect(),
            )
        } else {
            gap_flow(&left.mass, &right.mass, &adjacent)
        };
        let witness = left
            .points
            .iter()
            .zip(chosen)
            .filter(|(_, c)| *c)
            .map(|(p, _)| p.clone())
            .collect();
        (g, witness)
    }

    /// The gap on the interval where neighbourhoods are `d ≤ threshold`.
    fn gap(&self, threshold: &Rational) -> (Rational, Vec<Word>) {
        let forward: Vec<Vec<bool>> = self
            .dist
            .iter()
            .map(|row| row.iter().map(|d| d <= threshold).collect())
            .collect();
        let mut best = self.gap_one(&self.mu, &self.nu, forward.clone());
        if self.two_sided {
            let backward = (0..self.nu.points.len())
                .map(|j| forward.iter().map(|row| row[j]).collect())
                .collect();
            let other = self.gap_one(&self.nu, &self.mu, backward);
            if other.0 > best.0 {
                best = other;
            }
        }
        (Rational::new(best.0, self.scale), best.1)
    }

    fn solve(&self) -> (Rational, Vec<Word>) {
        let mut thresholds: Vec<Rational> = self.dist.iter().flatten().copied().collect();
        thresholds.push(Rational::zero());
        thresholds.sort();
        thresholds.dedup();
        let mut previous = Vec::new();
        for (k, d) in thresholds.iter().enumerate() {
            let (g, witness) = self.gap(d);
            if g <= *d {
                return (*d, if k == 0 { witness } else { previous });
            }
            if thresholds.get(k + 1).is_none_or(|upper| g <= *upper) {
                return (g, witness);
            }
            previous = witness;
        }
        unreachable!("the last interval is unbounded")
    }
}

fn run(
    mu: &AtomicMeasure,
    nu: &AtomicMeasure,
    backend: Backend,
    two_sided: bool,
) -> Result<ProhorovResult> {
    let largest = if two_sided {
        mu.len().max(nu.len())
    } else {
        mu.len()
    };
    let enumerate = match backend {
        Backend::Enumeration if largest > ENUMERATION_LIMIT => {
            return Err(Error::Backend(format!(
                "{largest} atoms exceed the enumeration limit of {ENUMERATION_LIMIT}; use the flow backend"
            )))
        }
        Backend::Enumeration => true,
        Backend::Flow => false,
        Backend::Auto => largest <= AUTO_ENUMERATION,
    };
    let used = if enumerate {
        Backend::Enumeration
    } else {
        Backend::Flow
    };
    if mu == nu {
        return Ok(ProhorovResult {
            value: Rational::zero(),
            witness: Vec::new(),
            backend: used,
        });
    }
    let by = common_scale(mu, nu)?;
    let (mu, nu) = (scale(mu, by), scale(nu, by));
    let dist = mu
        .points
        .iter()
        .map(|x| nu.points.iter().map(|y| point_distance(x, y)).collect())
        .collect();
    let solver = Solver {
        mu,
        nu,
        scale: by,
        dist,
        enumerate,
        two_sided,
    };
    let (value, witness) = solver.solve();
    Ok(ProhorovResult {
        value,
        witness,
        backend: used,
    })
}

/// `d_P(μ, ν) = inf{δ > 0 : μ(X) ≤ ν(X^δ) + δ for all Borel X}`.
pub fn prohorov_with(
    mu: &AtomicMeasure,
    nu: &AtomicMeasure,
    backend: Backend,
) -> Result<ProhorovResult> {
    run(mu, nu, backend, false)
}

pub fn prohorov(mu: &AtomicMeasure, nu: &AtomicMeasure) -> Result<ProhorovResult> {
    run(mu, nu, Backend::Auto, false)
}

/// The infimum over `δ` satisfying the condition in both directions.
pub fn prohorov_two_sided(
    mu: &AtomicMeasure,
    nu: &AtomicMeasure,
    backend: Backend,
) -> Result<ProhorovResult> {
    run(mu, nu, backend, true)
}

impl AtomicMeasure {
    /// Prohorov distance with the automatic backend.
    pub fn distance(&self, other: &AtomicMeasure) -> Result<Rational> {
        prohorov(self, other).map(|r| r.value)
    }
}
