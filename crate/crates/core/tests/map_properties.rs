use cantor_dynamics::cantor::{Partition, Word};
use cantor_dynamics::maps::{
    classify_components, ComponentShape, LevelSpec, MapTower, PartitionDigraph, PrefixTableMap,
    ShapeKind,
};
use proptest::prelude::*;

fn word(max_len: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec(any::<bool>(), 0..=max_len).prop_map(Word::from_bits)
}

fn table() -> impl Strategy<Value = PrefixTableMap> {
    prop::collection::vec(word(3), 4).prop_map(|images| {
        PrefixTableMap::new(Word::all_of_length(2).into_iter().zip(images).collect()).unwrap()
    })
}

fn towers() -> Vec<MapTower> {
    vec![
        MapTower::generate_balloons(&[LevelSpec::new(2, 2, 1)]).unwrap(),
        MapTower::generate_balloons(&[LevelSpec::new(2, 2, 1), LevelSpec::new(3, 2, 2)]).unwrap(),
        MapTower::generate_balloons(&[LevelSpec::new(3, 3, 1), LevelSpec::new(5, 3, 4)]).unwrap(),
        MapTower::generate_dumbbells(&[LevelSpec::new(2, 2, 1)]).unwrap(),
        MapTower::generate_dumbbells(&[LevelSpec::new(3, 2, 2), LevelSpec::new(4, 2, 4)]).unwrap(),
        MapTower::generate_dumbbells(&[LevelSpec::new(3, 1, 2).with_bar(2)]).unwrap(),
    ]
}

#[test]
fn generated_tables_are_complete_and_mutations_are_detected() {
    for tower in towers() {
        let rules = tower.map.rules().to_vec();
        assert!(PrefixTableMap::new(rules.clone()).is_ok());
        for i in 0..rules.len() {
            let mut mutated = rules.clone();
            let p = mutated[i].0.clone();
            mutated[i].0 = p.child(false);
            assert!(PrefixTableMap::new(mutated).is_err());
        }
    }
}

#[test]
fn classifier_reproduces_declared_shapes() {
    for tower in towers() {
        for level in &tower.levels {
            let graph = PartitionDigraph::of(&tower.map, &level.partition);
            for shape in classify_components(&graph) {
                let q = level.loop_len;
                match shape.kind() {
                    ShapeKind::Balloon(s, t) => assert_eq!((s, t), (q, q)),
                    ShapeKind::Dumbbell(r, s, t) => assert!(r == q && t == q && s >= 1),
                    other => panic!("unexpected {other:?}"),
                }
            }
        }
    }
}

#[test]
fn dumbbell_towers_are_bijective_with_fixed_loop_witnesses() {
    for tower in towers().into_iter().filter(|t| t.inverse.is_some()) {
        let inverse = tower.inverse.as_ref().unwrap();
        assert_eq!(tower.map.then(inverse), PrefixTableMap::identity());
        for level in &tower.levels {
            let power = tower.map.power(level.loop_len);
            for (shape, witness) in level.components.iter().zip(&level.loops) {
                let ComponentShape::Dumbbell { left, right, .. } = shape else {
                    panic!()
                };
                assert!(left[0].is_prefix_of(&witness.left));
                assert!(right[0].is_prefix_of(&witness.right));
                assert_eq!(
                    power.image_of_cylinder(&witness.left),
                    vec![witness.left.clone()]
                );
                assert_eq!(
                    power.image_of_cylinder(&witness.right),
                    vec![witness.right.clone()]
                );
            }
        }
    }
}

#[test]
fn balloon_images_are_proper_one_level_down() {
    for tower in towers().into_iter().filter(|t| t.inverse.is_none()) {
        for level in &tower.levels {
            for witness in &level.strictness {
                assert!(witness.target.is_prefix_of(&witness.missed));
                let images: Vec<Word> = level
                    .partition
                    .cells()
                    .iter()
                    .flat_map(|c| tower.map.image_of_cylinder(c))
                    .collect();
                assert!(images.iter().all(|i| !i.meets(&witness.missed)));
            }
        }
    }
}

#[test]
fn coarse_graph_is_projection_of_fine_graph() {
    for tower in towers() {
        for pair in tower.levels.windows(2) {
            let coarse = PartitionDigraph::of(&tower.map, &pair[0].partition);
            let fine = PartitionDigraph::of(&tower.map, &pair[1].partition);
            let mut projected: Vec<(Word, Word)> = fine
                .cell_edges()
                .into_iter()
                .map(|(a, b)| {
                    let up = |c: &Word| {
                        pair[0].partition.cells()[pair[0].partition.cell_containing(c).unwrap()]
                            .clone()
                    };
                    (up(&a), up(&b))
                })
                .collect();
            projected.sort();
            projected.dedup();
            assert_eq!(projected, coarse.cell_edges());
        }
    }
}

proptest! {
    #[test]
    fn image_and_preimage_cells_are_adjoint(f in table(), depth in 1usize..=3) {
        let p = Partition::standard(depth);
        for a in p.cells() {
            for b in p.cells() {
                let forward = f.image_cells(a, &p).contains(b);
                let backward = f.preimage_cells(b, &p).contains(a);
                prop_assert_eq!(forward, backward);
            }
        }
    }

    #[test]
    fn composition_matches_pointwise(f in table(), g in table(), x in word(8)) {
        prop_assert_eq!(f.then(&g).apply(&x), g.apply(&f.apply(&x)));
    }

    #[test]
    fn every_cell_has_an_out_edge(f in table(), depth in 1usize..=4) {
        let graph = PartitionDigraph::of(&f, &Partition::standard(depth));
        prop_assert!((0..graph.vertex_count()).all(|v| !graph.successors(v).is_empty()));
    }

    #[test]
    fn inverse_undoes_bijections(perm in Just(Word::all_of_length(3)).prop_shuffle(), x in word(8)) {
        let h = PrefixTableMap::new(Word::all_of_length(3).into_iter().zip(perm).collect()).unwrap();
        let inv = h.invert().unwrap();
        prop_assert_eq!(inv.apply(&h.apply(&x)), x.to_point());
    }
}
