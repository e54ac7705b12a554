use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::maps::PrefixTableMap;
use crate::measures::AtomicMeasure;
use crate::rational::{self, Rational};

use super::orbit::MeasureOrbit;

/// Grids up to this size get an exact maximum separated set.
pub const EXACT_CLIQUE_LIMIT: usize = 25;

#[derive(Clone, Debug, Serialize)]
pub struct EntropyRow {
    pub epsilon: String,
    /// `N(n, ε)` for `n = 1..=n_max` (lower bounds when not `exact`).
    pub counts: Vec<usize>,
    pub exact: bool,
    /// `N(n_max) / N(n_max - 1)`; a ratio of one means zero growth at the horizon.
    pub final_ratio: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct EntropyTable {
    pub grid_size: usize,
    pub n_max: usize,
    pub rows: Vec<EntropyRow>,
}

fn max_clique_exact(adj: &[u64]) -> usize {
    fn expand(adj: &[u64], size: usize, mut cand: u64, best: &mut usize) {
        if cand == 0 {
            *best = (*best).max(size);
            return;
        }
        while cand != 0 {
            if size + cand.count_ones() as usize <= *best {
                return;
            }
            let v = cand.trailing_zeros() as usize;
            cand &= cand - 1;
            expand(adj, size + 1, cand & adj[v], best);
        }
    }
    let full = if adj.len() == 64 {
        u64::MAX
    } else {
        (1u64 << adj.len()) - 1
    };
    let mut best = 0;
    expand(adj, 0, full, &mut best);
    best
}

fn max_clique_greedy(adj: &[Vec<bool>]) -> usize {
    let mut order: Vec<usize> = (0..adj.len()).collect();
    order.sort_by_key(|&v| std::cmp::Reverse(adj[v].iter().filter(|&&a| a).count()));
    let mut chosen: Vec<usize> = Vec::new();
    for v in order {
        if chosen.iter().all(|&u| adj[u][v]) {
            chosen.push(v);
        }
    }
    chosen.len()
}

/// `N(n, ε, f̃)` on a finite grid: the largest subset whose members are
/// pairwise `d_n ≥ ε` apart, `d_n(μ, ν) = max_{k<n} d_P(f̃^k μ, f̃^k ν)`.
pub fn entropy_estimate(
    map: &PrefixTableMap,
    grid: &[AtomicMeasure],
    epsilons: &[Rational],
    n_max: usize,
    budget: usize,
) -> Result<EntropyTable> {
    let g = grid.len();
    let orbits = grid
        .par_iter()
        .map(|mu| MeasureOrbit::compute(map, mu, budget))
        .collect::<Result<Vec<_>>>()?;
    let states: Vec<Vec<AtomicMeasure>> = orbits
        .iter()
        .map(|o| (0..n_max).map(|k| o.measure_at(k)).collect())
        .collect();
    let pairs: Vec<(usize, usize)> = (0..g)
        .flat_map(|i| (i + 1..g).map(move |j| (i, j)))
        .collect();
    // running[p][n-1] = d_n for pair p
    let running = pairs
        .par_iter()
        .map(|&(i, j)| {
            let mut acc = Rational::from_integer(0);
            (0..n_max)
                .map(|k| {
                    acc = acc.max(states[i][k].distance(&states[j][k])?);
                    Ok(acc)
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let exact = g <= EXACT_CLIQUE_LIMIT;
    let rows = epsilons
        .iter()
        .map(|eps| {
            let counts: Vec<usize> = (0..n_max)
                .map(|n| {
                    let mut adj = vec![vec![false; g]; g];
                    for (p, &(i, j)) in pairs.iter().enumerate() {
                        let sep = running[p][n] >= *eps;
                        adj[i][j] = sep;
                        adj[j][i] = sep;
                    }
                    if exact {
                        let masks: Vec<u64> = adj
                            .iter()
                            .map(|row| {
                                row.iter()
                                    .enumerate()
                                    .filter(|(_, &a)| a)
                                    .fold(0, |m, (j, _)| m | 1 << j)
                            })
                            .collect();
                        max_clique_exact(&masks)
                    } else {
                        max_clique_greedy(&adj)
                    }
                })
                .collect();
            let ratio = match counts.len() {
                0 | 1 => Rational::from_integer(1),
                n => Rational::new(counts[n - 1] as i128, counts[n - 2].max(1) as i128),
            };
            EntropyRow {
                epsilon: rational::format(eps),
                counts,
                exact,
                final_ratio: rational::format(&ratio),
            }
        })
        .collect();
    Ok(EntropyTable {
        grid_size: g,
        n_max,
        rows,
    })
}
