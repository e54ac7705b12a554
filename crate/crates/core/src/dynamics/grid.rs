use rand::Rng;

use crate::cantor::{Partition, Word};
use crate::measures::AtomicMeasure;
use crate::rational::Rational;

/// The leftmost point of a cell, used to carry the cell's mass.
pub fn representative(cell: &Word) -> Word {
    cell.to_point()
}

/// Every cell measure with masses in `{0, 1/m, ..., 1}`, in lexicographic
/// order of the mass vectors.
pub fn simplex_grid(partition: &Partition, m: usize) -> Vec<AtomicMeasure> {
    fn rec(cells: usize, left: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() + 1 == cells {
            prefix.push(left);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for k in (0..=left).rev() {
            prefix.push(k);
            rec(cells, left - k, prefix, out);
            prefix.pop();
        }
    }
    let mut weights = Vec::new();
    rec(partition.card(), m, &mut Vec::new(), &mut weights);
    weights
        .into_iter()
        .map(|w| {
            AtomicMeasure::new(
                partition
                    .cells()
                    .iter()
                    .zip(w)
                    .map(|(c, k)| (representative(c), Rational::new(k as i128, m as i128))),
            )
            .expect("grid weights sum to one")
        })
        .collect()
}

/// A cell measure with up to `atoms` atoms and masses `k/denominator`.
pub fn random_cell_measure<R: Rng>(
    partition: &Partition,
    atoms: usize,
    denominator: i128,
    rng: &mut R,
) -> AtomicMeasure {
    let mut weights = vec![0i128; partition.card()];
    let count = rng.gen_range(1..=atoms.max(1));
    let chosen: Vec<usize> = (0..count)
        .map(|_| rng.gen_range(0..partition.card()))
        .collect();
    let mut left = denominator;
    for (i, &cell) in chosen.iter().enumerate() {
        let take = if i + 1 == chosen.len() {
            left
        } else {
            rng.gen_range(0..=left)
        };
        weights[cell] += take;
        left -= take;
    }
    AtomicMeasure::new(
        partition
            .cells()
            .iter()
            .zip(weights)
            .map(|(c, k)| (representative(c), Rational::new(k, denominator))),
    )
    .expect("weights sum to one")
}

/// A random cell measure `μ` and a measure `ν` at Prohorov distance `< δ`
/// from it: mass less than `δ/2` is moved to a random cell and some atoms
/// are nudged by less than `δ/2`.
pub fn random_close_pair<R: Rng>(
    partition: &Partition,
    delta: Rational,
    rng: &mut R,
) -> (AtomicMeasure, AtomicMeasure) {
    let mu = random_cell_measure(partition, 4, 12, rng);
    let scale = 1000i128;
    let t = Rational::new(rng.gen_range(0..scale), 2 * scale) * delta;
    let target = &partition.cells()[rng.gen_range(0..partition.card())];
    let moved = mu
        .mix(&AtomicMeasure::dirac(&representative(target)), t)
        .expect("convex");
    // a point agreeing with x on its first n coordinates is within 1/(n+1)
    let depth = (2 * *delta.denom() / *delta.numer().max(&1)) as usize + 1;
    let nu = AtomicMeasure::new(moved.atoms().iter().map(|(p, m)| {
        if rng.gen_bool(0.5) {
            (p.clone(), *m)
        } else {
            let tail = Word::from_bits((0..3).map(|_| rng.gen_bool(0.5)).collect());
            (p.prefix(depth.max(p.len())).concat(&tail), *m)
        }
    }))
    .expect("masses unchanged");
    (mu, nu)
}
