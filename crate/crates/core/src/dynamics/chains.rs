use num_traits::{One, Zero};
use serde::Serialize;
use serde_json::json;

use crate::cantor::{point_distance, Partition, Word};
use crate::certificate::{rational_value, Certificate};
use crate::error::{Error, Result};
use crate::maps::{eventual_image, PrefixTableMap};
use crate::measures::AtomicMeasure;
use crate::rational::{self, Rational};

use super::orbit::PointOrbit;

/// Largest denominator considered when choosing `γ < δ`.
pub const GAMMA_DENOMINATOR: i128 = 64;

/// A finite `δ`-chain `μ_0, ..., μ_k`: `d_P(f̃(μ_n), μ_{n+1}) < δ`.
#[derive(Clone, Debug, Serialize)]
pub struct Chain {
    pub points: Vec<AtomicMeasure>,
    #[serde(with = "crate::rational::serde_str")]
    pub delta: Rational,
}

impl Chain {
    /// Number of steps `k`.
    pub fn len(&self) -> usize {
        self.points.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn last(&self) -> &AtomicMeasure {
        self.points.last().expect("chains are nonempty")
    }

    pub fn step_distances(&self, map: &PrefixTableMap) -> Result<Vec<Rational>> {
        self.points
            .windows(2)
            .map(|w| w[0].pushforward(map).distance(&w[1]))
            .collect()
    }

    /// Re-checks every step with the exact solver.
    pub fn verify(&self, map: &PrefixTableMap) -> Result<bool> {
        Ok(self.step_distances(map)?.iter().all(|d| *d < self.delta))
    }
}

/// The largest `p/q < δ` with `q ≤ 64`, capped at one.
pub fn choose_gamma(delta: Rational) -> Result<Rational> {
    if delta <= Rational::zero() {
        return Err(Error::Parameter(format!("δ = {delta} must be positive")));
    }
    if delta > Rational::one() {
        return Ok(Rational::one());
    }
    (1..=GAMMA_DENOMINATOR)
        .filter_map(|q| {
            let scaled = delta * q;
            // largest p with p/q < δ
            let p = if scaled.is_integer() {
                scaled.to_integer() - 1
            } else {
                scaled.floor().to_integer()
            };
            (p >= 1).then(|| Rational::new(p, q))
        })
        .max()
        .ok_or_else(|| Error::Parameter(format!("δ = {delta} is below 1/{GAMMA_DENOMINATOR}")))
}

/// The least `k_0` with `k_0 γ ≥ 1`.
pub fn k0_for(gamma: Rational) -> usize {
    (Rational::one() / gamma).ceil().to_integer() as usize
}

/// A `δ`-chain of length `k` from `μ` to `f̃^k(ν)`:
/// `μ_j = (1 - jγ) f̃^j(μ) + jγ f̃^j(ν)` for `j < k_0`, then the orbit of `ν`.
pub fn chain_connect_map(
    map: &PrefixTableMap,
    mu: &AtomicMeasure,
    nu: &AtomicMeasure,
    delta: Rational,
    k: usize,
) -> Result<Chain> {
    let gamma = choose_gamma(delta)?;
    let k0 = k0_for(gamma);
    if k < k0 {
        return Err(Error::Parameter(format!(
            "length {k} is below k0 = {k0} for δ = {delta}"
        )));
    }
    let mut points = Vec::with_capacity(k + 1);
    let (mut fm, mut fn_) = (mu.clone(), nu.clone());
    for j in 0..=k {
        let weight = gamma * Rational::from_integer(j as i128);
        points.push(if j < k0 {
            fm.mix(&fn_, weight)?
        } else {
            fn_.clone()
        });
        fm = fm.pushforward(map);
        fn_ = fn_.pushforward(map);
    }
    Ok(Chain { points, delta })
}

/// A `δ`-chain of length `k` from `μ` ending exactly at `ν`, through
/// `ν' = h̃^{-k}(ν)`.
pub fn chain_connect_homeo(
    map: &PrefixTableMap,
    inverse: &PrefixTableMap,
    mu: &AtomicMeasure,
    nu: &AtomicMeasure,
    delta: Rational,
    k: usize,
) -> Result<Chain> {
    if map.then(inverse) != PrefixTableMap::identity() {
        return Err(Error::NotInvertible(
            "the given inverse does not invert the map".into(),
        ));
    }
    chain_connect_map(map, mu, &nu.pushforward_n(inverse, k), delta, k)
}

#[derive(Serialize)]
struct Divergence {
    start: AtomicMeasure,
    delta: String,
    k0: usize,
    first_end: AtomicMeasure,
    second_end: AtomicMeasure,
    end_distance: String,
    verified: bool,
}

/// Singleton test for `⋂ f^n(M)` up to `depth`; otherwise two `δ`-chains
/// from each start that end at least `2ε` apart.
pub fn chain_continuity_test(
    map: &PrefixTableMap,
    depth: usize,
    epsilon: Rational,
    deltas: &[Rational],
    starts: &[AtomicMeasure],
    budget: usize,
) -> Result<Certificate> {
    let cert = Certificate::new("chain_continuity_test")
        .param("depth", depth)
        .param_rational("epsilon", &epsilon)
        .param(
            "deltas",
            deltas.iter().map(rational::format).collect::<Vec<_>>(),
        );
    let images: Vec<Vec<Word>> = (1..=depth)
        .map(|n| eventual_image(map, &Partition::standard(n)))
        .collect();
    let singleton = images.iter().all(|e| e.len() == 1)
        && images.windows(2).all(|p| p[0][0].is_prefix_of(&p[1][0]));
    if singleton {
        let nested: Vec<Word> = images.iter().map(|e| e[0].clone()).collect();
        return Ok(cert
            .witness("nested_cells", nested)
            .verdict("ChainContinuousEverywhere", true));
    }
    let surviving = images.last().expect("depth ≥ 1");
    let mut periodic: Vec<(Word, usize)> = Vec::new();
    for cell in surviving {
        let orbit = PointOrbit::compute(map, &cell.to_point(), budget)?;
        let c = orbit.cycle_len();
        for n in orbit.start()..orbit.start() + c {
            let y = orbit.limit_at(n);
            if !periodic.iter().any(|(p, _)| *p == y) {
                periodic.push((y, c));
            }
        }
    }
    type Pair = ((Word, usize), (Word, usize), Rational);
    let mut best: Option<Pair> = None;
    for (i, a) in periodic.iter().enumerate() {
        for b in &periodic[i + 1..] {
            let d = point_distance(&a.0, &b.0);
            if best.as_ref().is_none_or(|x| d > x.2) {
                best = Some((a.clone(), b.clone(), d));
            }
        }
    }
    let Some(((y, py), (w, pw), d)) = best.filter(|b| b.2 >= epsilon * 2) else {
        return Ok(cert
            .witness("surviving_cells", surviving)
            .verdict("Inconclusive", false));
    };
    let default_start = [AtomicMeasure::dirac(&Word::empty())];
    let starts = if starts.is_empty() {
        &default_start[..]
    } else {
        starts
    };
    let iterate = |x: &Word, n: usize| (0..n).fold(x.clone(), |acc, _| map.apply(&acc));
    let (pi_y, pi_w) = (AtomicMeasure::dirac(&y), AtomicMeasure::dirac(&w));
    let end_distance = pi_y.distance(&pi_w)?;
    let mut records = Vec::new();
    let mut all_ok = end_distance >= epsilon * 2;
    for start in starts {
        for &delta in deltas {
            let k0 = k0_for(choose_gamma(delta)?);
            // a preimage of y along its own cycle, k0 steps back
            let back = |x: &Word, period: usize| iterate(x, period * k0.div_ceil(period) - k0);
            let first =
                chain_connect_map(map, start, &AtomicMeasure::dirac(&back(&y, py)), delta, k0)?;
            let second =
                chain_connect_map(map, start, &AtomicMeasure::dirac(&back(&w, pw)), delta, k0)?;
            let verified = first.verify(map)?
                && second.verify(map)?
                && *first.last() == pi_y
                && *second.last() == pi_w;
            all_ok &= verified;
            records.push(Divergence {
                start: start.clone(),
                delta: rational::format(&delta),
                k0,
                first_end: first.last().clone(),
                second_end: second.last().clone(),
                end_distance: rational::format(&end_distance),
                verified,
            });
        }
    }
    Ok(cert
        .witness("periodic_points", json!([y.to_string(), w.to_string()]))
        .witness("point_distance", rational_value(&d))
        .witness("surviving_cells", surviving.len())
        .witness("chains", records)
        .verdict(
            if all_ok {
                "NotChainContinuousAnywhere"
            } else {
                "Inconclusive"
            },
            all_ok,
        ))
}
