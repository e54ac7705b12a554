use serde::{Deserialize, Serialize};

use crate::cantor::{Partition, Word};
use crate::error::{Error, Result};

use super::digraph::{classify_components, ComponentShape, PartitionDigraph, ShapeKind};
use super::table::{normalize_cylinders, PrefixTableMap};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TowerKind {
    /// Continuous map whose partition graphs are strict balloons.
    #[serde(rename = "Q")]
    Balloons,
    /// Homeomorphism whose partition graphs are balanced dumbbells.
    #[serde(rename = "P")]
    Dumbbells,
}

/// One requested level: minimum cell depth, the parameter `q` (loops have
/// `q!` cells), the number of components and, for dumbbells, the bar length.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelSpec {
    pub depth: usize,
    pub q: usize,
    pub components: usize,
    #[serde(default = "one")]
    pub bar: usize,
}

fn one() -> usize {
    1
}

impl LevelSpec {
    pub fn new(depth: usize, q: usize, components: usize) -> Self {
        Self {
            depth,
            q,
            components,
            bar: 1,
        }
    }

    pub fn with_bar(mut self, bar: usize) -> Self {
        self.bar = bar;
        self
    }
}

/// Clopen sets inside `u_1` and `w_1` fixed by `h^r` and `h^t`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LoopWitness {
    pub left: Word,
    pub right: Word,
}

/// A subcylinder of `target` missed by the images that land in it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StrictWitness {
    pub target: Word,
    pub missed: Word,
}

#[derive(Clone, Debug)]
pub struct TowerLevel {
    pub q: usize,
    pub loop_len: usize,
    pub partition: Partition,
    pub graph: PartitionDigraph,
    pub components: Vec<ComponentShape>,
    pub strictness: Vec<StrictWitness>,
    pub loops: Vec<LoopWitness>,
}

/// A prefix-table map together with a certified sequence of strongly
/// refining partitions.
#[derive(Clone, Debug)]
pub struct MapTower {
    pub kind: TowerKind,
    pub map: PrefixTableMap,
    pub inverse: Option<PrefixTableMap>,
    pub levels: Vec<TowerLevel>,
}

/// On-disk form of a tower: the rule table plus the certified levels.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapFile {
    pub kind: TowerKind,
    pub rules: Vec<(Word, Word)>,
    pub levels: Vec<LevelFile>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelFile {
    pub q: usize,
    pub cells: Vec<Word>,
}

pub fn factorial(q: usize) -> Result<usize> {
    (1..=q)
        .try_fold(1usize, |acc, k| acc.checked_mul(k))
        .ok_or_else(|| Error::Parameter(format!("{q}! overflows")))
}

/// `m` leaves under `a` forming a balanced prefix code, in lexicographic order.
fn split_cell(a: &Word, m: usize) -> Vec<Word> {
    let e = usize::BITS as usize - 1 - m.leading_zeros() as usize;
    let extra = m - (1 << e);
    let mut out = Vec::with_capacity(m);
    for (i, tail) in Word::all_of_length(e).into_iter().enumerate() {
        let base = a.concat(&tail);
        if i < extra {
            out.push(base.child(false));
            out.push(base.child(true));
        } else {
            out.push(base);
        }
    }
    out
}

/// Cylinders inside `target` disjoint from the union `set`.
fn complement_within(target: &Word, set: &[Word]) -> Vec<Word> {
    if set.iter().any(|s| s.is_prefix_of(target)) {
        return Vec::new();
    }
    if !set.iter().any(|s| s.meets(target)) {
        return vec![target.clone()];
    }
    let mut out = complement_within(&target.child(false), set);
    out.extend(complement_within(&target.child(true), set));
    out
}

/// Cells of `partition` surviving in `f^k(M)` for all `k`: the fixed point of
/// the cell-image operator started from every cell.
pub fn eventual_image(map: &PrefixTableMap, partition: &Partition) -> Vec<Word> {
    let graph = PartitionDigraph::of(map, partition);
    let mut alive = vec![true; graph.vertex_count()];
    loop {
        let mut next = vec![false; alive.len()];
        for (a, _) in alive.iter().enumerate().filter(|(_, &on)| on) {
            for &b in graph.successors(a) {
                next[b] = true;
            }
        }
        if next == alive {
            break;
        }
        alive = next;
    }
    alive
        .iter()
        .enumerate()
        .filter(|(_, &on)| on)
        .map(|(i, _)| partition.cells()[i].clone())
        .collect()
}

/// Cell slots of one component, in the order the generator wires them.
fn slot_count(kind: TowerKind, loop_len: usize, bar: usize) -> usize {
    match kind {
        TowerKind::Balloons => 2 * loop_len,
        TowerKind::Dumbbells => 2 * loop_len + bar,
    }
}

fn build_layouts(kind: TowerKind, specs: &[LevelSpec]) -> Result<Vec<Vec<Vec<Word>>>> {
    let first = specs
        .first()
        .ok_or_else(|| Error::Parameter("at least one level is required".into()))?;
    let loop_len = factorial(first.q)?;
    if first.q == 0 || first.components == 0 {
        return Err(Error::Parameter(
            "q and component counts must be positive".into(),
        ));
    }
    if kind == TowerKind::Dumbbells && first.bar == 0 {
        return Err(Error::Parameter(
            "dumbbell bars need at least one cell".into(),
        ));
    }
    let slots = slot_count(kind, loop_len, first.bar);
    let total = slots
        .checked_mul(first.components)
        .filter(|&k| k < 1 << 20)
        .ok_or_else(|| Error::Resource("too many cells requested".into()))?;
    if total < 1 << first.depth.min(40) || first.depth >= 40 || total >= 2 << first.depth {
        return Err(Error::Parameter(format!(
            "{total} cells cannot tile a partition of minimum depth {}",
            first.depth
        )));
    }
    let leaves = split_cell(&Word::empty(), total);
    let mut layouts = vec![leaves
        .chunks(slots)
        .map(<[Word]>::to_vec)
        .collect::<Vec<_>>()];
    for pair in specs.windows(2) {
        let (coarse, fine) = (&pair[0], &pair[1]);
        if fine.q != coarse.q {
            return Err(Error::Parameter(format!(
                "q must stay constant across levels ({} then {})",
                coarse.q, fine.q
            )));
        }
        if kind == TowerKind::Dumbbells && fine.bar != coarse.bar {
            return Err(Error::Parameter(
                "bar length must stay constant across levels".into(),
            ));
        }
        if fine.components % coarse.components != 0 || fine.components < 2 * coarse.components {
            return Err(Error::Parameter(format!(
                "{} components cannot strongly refine {}",
                fine.components, coarse.components
            )));
        }
        let m = fine.components / coarse.components;
        if total.saturating_mul(fine.components / first.components) >= 1 << 20 {
            return Err(Error::Resource("too many cells requested".into()));
        }
        let prev = layouts.last().expect("level one exists");
        let mut next = vec![Vec::with_capacity(slots); fine.components];
        for (c, comp) in prev.iter().enumerate() {
            for cell in comp {
                for (r, leaf) in split_cell(cell, m).into_iter().enumerate() {
                    next[c * m + r].push(leaf);
                }
            }
        }
        layouts.push(next);
    }
    for (layout, spec) in layouts.iter().zip(specs) {
        let depth = layout.iter().flatten().map(Word::len).min().unwrap_or(0);
        if depth != spec.depth {
            return Err(Error::Parameter(format!(
                "level with {} components has minimum depth {depth}, not {}",
                spec.components, spec.depth
            )));
        }
    }
    Ok(layouts)
}

fn balloon_rules(comps: &[Vec<Word>], loop_len: usize) -> Vec<(Word, Word)> {
    let mut rules = Vec::new();
    for comp in comps {
        let (v, wl) = comp.split_at(loop_len);
        let mut push = |cell: &Word, target: Word| {
            rules.push((cell.child(false), target.clone()));
            rules.push((cell.child(true), target));
        };
        for i in 0..loop_len - 1 {
            push(&v[i], v[i + 1].child(false));
        }
        push(&v[loop_len - 1], wl[0].child(true).child(false));
        for j in 0..loop_len {
            push(&wl[j], wl[(j + 1) % loop_len].child(false));
        }
    }
    rules
}

fn dumbbell_rules(comps: &[Vec<Word>], loop_len: usize) -> Vec<(Word, Word)> {
    let mut rules = Vec::new();
    for comp in comps {
        let u = &comp[..loop_len];
        let v = &comp[loop_len..comp.len() - loop_len];
        let wl = &comp[comp.len() - loop_len..];
        let u2 = &u[1 % loop_len];
        rules.push((u[0].child(false), u2.child(false)));
        rules.push((u[0].child(true).child(false), u2.child(true)));
        rules.push((u[0].child(true).child(true), v[0].clone()));
        for i in 1..loop_len {
            rules.push((u[i].clone(), u[(i + 1) % loop_len].clone()));
        }
        for i in 0..v.len() - 1 {
            rules.push((v[i].clone(), v[i + 1].clone()));
        }
        rules.push((v[v.len() - 1].clone(), wl[0].child(true).child(true)));
        for j in 0..loop_len - 1 {
            rules.push((wl[j].clone(), wl[j + 1].clone()));
        }
        let last = &wl[loop_len - 1];
        rules.push((last.child(false), wl[0].child(false)));
        rules.push((last.child(true), wl[0].child(true).child(false)));
    }
    rules
}

impl MapTower {
    /// Builds a continuous map whose graph at every requested level consists
    /// of strict balloons of type `(q!, q!)`.
    pub fn generate_balloons(specs: &[LevelSpec]) -> Result<MapTower> {
        Self::generate(TowerKind::Balloons, specs)
    }

    /// Builds a homeomorphism whose graph at every requested level consists
    /// of balanced dumbbells with plate weight `q!`.
    pub fn generate_dumbbells(specs: &[LevelSpec]) -> Result<MapTower> {
        Self::generate(TowerKind::Dumbbells, specs)
    }

    pub fn generate(kind: TowerKind, specs: &[LevelSpec]) -> Result<MapTower> {
        let layouts = build_layouts(kind, specs)?;
        let loop_len = factorial(specs[0].q)?;
        let finest = layouts.last().expect("nonempty");
        let rules = match kind {
            TowerKind::Balloons => balloon_rules(finest, loop_len),
            TowerKind::Dumbbells => dumbbell_rules(finest, loop_len),
        };
        let map = PrefixTableMap::new(rules)?;
        let levels = layouts
            .iter()
            .zip(specs)
            .map(|(layout, spec)| {
                Partition::from_cells(layout.iter().flatten().cloned().collect())
                    .map(|p| (spec.q, p))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::certify(kind, map, levels)
    }

    /// Checks every claimed level: shapes, strictness or loop witnesses, and
    /// strong refinement between consecutive levels.
    pub fn certify(
        kind: TowerKind,
        map: PrefixTableMap,
        levels: Vec<(usize, Partition)>,
    ) -> Result<MapTower> {
        if levels.is_empty() {
            return Err(Error::Parameter("a tower needs at least one level".into()));
        }
        let inverse = match kind {
            TowerKind::Dumbbells => Some(map.invert()?),
            TowerKind::Balloons => None,
        };
        for pair in levels.windows(2) {
            if !pair[1].1.strongly_refines(&pair[0].1) {
                return Err(Error::Parameter(
                    "levels must strongly refine each other".into(),
                ));
            }
        }
        let mut out = Vec::with_capacity(levels.len());
        let mut powers: Vec<(usize, PrefixTableMap)> = Vec::new();
        for (q, partition) in levels {
            let loop_len = factorial(q)?;
            let graph = PartitionDigraph::of(&map, &partition);
            let components = classify_components(&graph);
            let mut strictness = Vec::new();
            let mut loops = Vec::new();
            for comp in &components {
                match (kind, comp) {
                    (TowerKind::Balloons, ComponentShape::Balloon { path, cycle })
                        if path.len() == loop_len && cycle.len() == loop_len =>
                    {
                        strictness.extend(balloon_strictness(&map, path, cycle)?);
                    }
                    (TowerKind::Dumbbells, ComponentShape::Dumbbell { left, right, .. })
                        if left.len() == loop_len && right.len() == loop_len =>
                    {
                        let power = match powers.iter().find(|(k, _)| *k == loop_len) {
                            Some((_, p)) => p.clone(),
                            None => {
                                let p = map.power(loop_len);
                                powers.push((loop_len, p.clone()));
                                p
                            }
                        };
                        let depth = partition.max_depth();
                        let left = fixed_subcylinder(&power, &left[0], depth)?;
                        let right = fixed_subcylinder(&power, &right[0], depth)?;
                        loops.push(LoopWitness { left, right });
                    }
                    _ => {
                        let expected = match kind {
                            TowerKind::Balloons => ShapeKind::Balloon(loop_len, loop_len),
                            TowerKind::Dumbbells => ShapeKind::Dumbbell(loop_len, 0, loop_len),
                        };
                        return Err(Error::Parameter(format!(
                            "component {:?} is not of the declared shape {expected:?}",
                            comp.kind()
                        )));
                    }
                }
            }
            out.push(TowerLevel {
                q,
                loop_len,
                partition,
                graph,
                components,
                strictness,
                loops,
            });
        }
        Ok(MapTower {
            kind,
            map,
            inverse,
            levels: out,
        })
    }

    pub fn level(&self, n: usize) -> &TowerLevel {
        &self.levels[n]
    }

    pub fn finest(&self) -> &TowerLevel {
        self.levels.last().expect("towers have a level")
    }

    pub fn to_file(&self) -> MapFile {
        MapFile {
            kind: self.kind,
            rules: self.map.rules().to_vec(),
            levels: self
                .levels
                .iter()
                .map(|l| LevelFile {
                    q: l.q,
                    cells: l.partition.cells().to_vec(),
                })
                .collect(),
        }
    }

    pub fn from_file(file: &MapFile) -> Result<MapTower> {
        let map = PrefixTableMap::new(file.rules.clone())?;
        let levels = file
            .levels
            .iter()
            .map(|l| Partition::from_cells(l.cells.clone()).map(|p| (l.q, p)))
            .collect::<Result<Vec<_>>>()?;
        Self::certify(file.kind, map, levels)
    }
}

fn proper_inside(map: &PrefixTableMap, sources: &[&Word], target: &Word) -> Result<StrictWitness> {
    let image = normalize_cylinders(
        sources
            .iter()
            .flat_map(|s| map.image_of_cylinder(s))
            .collect(),
    );
    if !image.iter().all(|c| target.is_prefix_of(c)) {
        return Err(Error::Parameter(format!("image escapes the cell {target}")));
    }
    let missed = complement_within(target, &image)
        .into_iter()
        .min_by_key(Word::len)
        .ok_or_else(|| Error::Parameter(format!("image fills the cell {target}")))?;
    Ok(StrictWitness {
        target: target.clone(),
        missed,
    })
}

fn balloon_strictness(
    map: &PrefixTableMap,
    path: &[Word],
    cycle: &[Word],
) -> Result<Vec<StrictWitness>> {
    let mut out = Vec::new();
    for i in 0..path.len() - 1 {
        out.push(proper_inside(map, &[&path[i]], &path[i + 1])?);
    }
    out.push(proper_inside(
        map,
        &[&path[path.len() - 1], &cycle[cycle.len() - 1]],
        &cycle[0],
    )?);
    for j in 0..cycle.len() - 1 {
        out.push(proper_inside(map, &[&cycle[j]], &cycle[j + 1])?);
    }
    Ok(out)
}

/// A subcylinder `a` of `cell` with `power(a) = a`, searching along the
/// zero branch first and then breadth first a few levels deeper.
fn fixed_subcylinder(power: &PrefixTableMap, cell: &Word, depth: usize) -> Result<Word> {
    let is_fixed = |a: &Word| power.image_of_cylinder(a) == vec![a.clone()];
    let mut a = cell.clone();
    for _ in 0..=depth + 2 {
        a = a.child(false);
        if is_fixed(&a) {
            return Ok(a);
        }
    }
    let mut frontier = vec![cell.clone()];
    for _ in 0..6 {
        frontier = frontier
            .iter()
            .flat_map(|c| [c.child(false), c.child(true)])
            .collect();
        if let Some(a) = frontier.iter().find(|a| is_fixed(a)) {
            return Ok(a.clone());
        }
    }
    Err(Error::Parameter(format!("no loop witness inside {cell}")))
}
