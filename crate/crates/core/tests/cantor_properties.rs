use cantor_dynamics::cantor::{cell_distance, partition_stats, point_distance, Partition, Word};
use cantor_dynamics::rational::{rat, Rational};
use proptest::prelude::*;

fn words_up_to(n: usize) -> Vec<Word> {
    (0..=n).flat_map(Word::all_of_length).collect()
}

#[test]
fn ultrametric_inequality_exhaustive() {
    let words = words_up_to(6);
    for u in &words {
        for v in &words {
            let uv = point_distance(u, v);
            for x in &words {
                assert!(point_distance(u, x) <= uv.max(point_distance(v, x)));
            }
        }
    }
}

#[test]
fn partition_stats_match_brute_force() {
    for depth in 1..=8 {
        let p = Partition::standard(depth);
        let cells = p.cells();
        let delta = (0..cells.len())
            .flat_map(|i| (i + 1..cells.len()).map(move |j| (i, j)))
            .map(|(i, j)| cell_distance(&cells[i], &cells[j]).unwrap())
            .min()
            .unwrap();
        let mesh = cells.iter().map(Word::diameter).max().unwrap();
        assert_eq!(partition_stats(&p), (mesh, delta));
        assert_eq!(
            (mesh, delta),
            (rat(1, depth as i128 + 1), rat(1, depth as i128))
        );
    }
}

#[test]
fn diameter_by_point_pairs() {
    // points in [a] differ first at some index beyond |a|
    for a in words_up_to(3) {
        let points: Vec<Word> = Word::all_of_length(4).iter().map(|t| a.concat(t)).collect();
        let widest = points
            .iter()
            .flat_map(|x| points.iter().map(move |y| point_distance(x, y)))
            .max()
            .unwrap();
        assert_eq!(widest, a.diameter());
    }
}

proptest! {
    #[test]
    fn inter_cell_distance_is_constant(
        depth in 1usize..=5,
        i in any::<prop::sample::Index>(),
        j in any::<prop::sample::Index>(),
    ) {
        let cells = Word::all_of_length(depth);
        let (a, b) = (&cells[i.index(cells.len())], &cells[j.index(cells.len())]);
        prop_assume!(a != b);
        let expected = cell_distance(a, b).unwrap();
        for s in Word::all_of_length(4) {
            for t in Word::all_of_length(4) {
                prop_assert_eq!(point_distance(&a.concat(&s), &b.concat(&t)), expected);
            }
        }
    }

    #[test]
    fn located_cell_contains_point(bits in prop::collection::vec(any::<bool>(), 0..10), depth in 0usize..6) {
        let p = Partition::standard(depth);
        let x = Word::from_bits(bits);
        prop_assert!(p.cells()[p.locate(&x)].contains_point(&x));
    }

    #[test]
    fn distance_is_reciprocal_index(u in prop::collection::vec(any::<bool>(), 0..8), v in prop::collection::vec(any::<bool>(), 0..8)) {
        let (u, v) = (Word::from_bits(u), Word::from_bits(v));
        let d = point_distance(&u, &v);
        match u.first_difference(&v) {
            None => prop_assert_eq!(d, Rational::from_integer(0)),
            Some(n) => {
                prop_assert_eq!(d, rat(1, n as i128));
                prop_assert!((0..n - 1).all(|i| u.bit(i) == v.bit(i)));
                prop_assert_ne!(u.bit(n - 1), v.bit(n - 1));
            }
        }
    }
}
