use std::collections::{BTreeSet, HashSet};

use serde::Serialize;

use crate::cantor::{Partition, Word};

use super::table::PrefixTableMap;

/// `G(f, P)`: vertices are the cells of `P`, with an edge `A -> B` whenever
/// `f(A)` meets `B`.
#[derive(Clone, Debug)]
pub struct PartitionDigraph {
    partition: Partition,
    succ: Vec<Vec<usize>>,
}

impl PartitionDigraph {
    pub fn of(map: &PrefixTableMap, partition: &Partition) -> Self {
        let succ = partition
            .cells()
            .iter()
            .map(|a| {
                map.image_cells(a, partition)
                    .iter()
                    .map(|b| partition.index_of(b).expect("cell of the partition"))
                    .collect()
            })
            .collect();
        Self {
            partition: partition.clone(),
            succ,
        }
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn vertex_count(&self) -> usize {
        self.succ.len()
    }

    pub fn successors(&self, v: usize) -> &[usize] {
        &self.succ[v]
    }

    pub fn cell(&self, v: usize) -> &Word {
        &self.partition.cells()[v]
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.succ
            .iter()
            .enumerate()
            .flat_map(|(a, bs)| bs.iter().map(move |&b| (a, b)))
            .collect()
    }

    /// Edge list as cell pairs, in lexicographic order.
    pub fn cell_edges(&self) -> Vec<(Word, Word)> {
        self.edges()
            .into_iter()
            .map(|(a, b)| (self.cell(a).clone(), self.cell(b).clone()))
            .collect()
    }

    pub fn reachable_from(&self, v: usize) -> Vec<bool> {
        let mut seen = vec![false; self.vertex_count()];
        let mut stack = vec![v];
        seen[v] = true;
        while let Some(a) = stack.pop() {
            for &b in &self.succ[a] {
                if !seen[b] {
                    seen[b] = true;
                    stack.push(b);
                }
            }
        }
        seen
    }

    pub fn is_strongly_connected(&self) -> bool {
        if self.vertex_count() == 0 {
            return true;
        }
        if !self.reachable_from(0).iter().all(|&r| r) {
            return false;
        }
        let mut reversed = vec![Vec::new(); self.vertex_count()];
        for (a, b) in self.edges() {
            reversed[b].push(a);
        }
        let rev = PartitionDigraph {
            partition: self.partition.clone(),
            succ: reversed,
        };
        rev.reachable_from(0).iter().all(|&r| r)
    }

    /// Weakly connected components, each as a sorted vertex list, ordered by
    /// their smallest vertex.
    pub fn weak_components(&self) -> Vec<Vec<usize>> {
        let n = self.vertex_count();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for (a, b) in self.edges() {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra != rb {
                parent[ra.max(rb)] = ra.min(rb);
            }
        }
        let mut comps: Vec<Vec<usize>> = Vec::new();
        let mut slot = vec![usize::MAX; n];
        for v in 0..n {
            let r = find(&mut parent, v);
            if slot[r] == usize::MAX {
                slot[r] = comps.len();
                comps.push(Vec::new());
            }
            comps[slot[r]].push(v);
        }
        comps
    }
}

/// Shape of a weakly connected component of a partition digraph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ComponentShape {
    /// `v_1 -> ... -> v_n -> v_1`.
    Loop {
        cycle: Vec<Word>,
    },
    /// `v_1 -> ... -> v_s -> w_1 -> ... -> w_t -> w_1`.
    Balloon {
        path: Vec<Word>,
        cycle: Vec<Word>,
    },
    /// `u_1 -> ... -> u_r -> u_1`, `u_1 -> v_1 -> ... -> v_s -> w_1`,
    /// `w_1 -> ... -> w_t -> w_1`.
    Dumbbell {
        left: Vec<Word>,
        bar: Vec<Word>,
        right: Vec<Word>,
    },
    Other {
        cells: Vec<Word>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum ShapeKind {
    Loop(usize),
    Balloon(usize, usize),
    Dumbbell(usize, usize, usize),
    Other,
}

impl ComponentShape {
    pub fn kind(&self) -> ShapeKind {
        match self {
            Self::Loop { cycle } => ShapeKind::Loop(cycle.len()),
            Self::Balloon { path, cycle } => ShapeKind::Balloon(path.len(), cycle.len()),
            Self::Dumbbell { left, bar, right } => {
                ShapeKind::Dumbbell(left.len(), bar.len(), right.len())
            }
            Self::Other { .. } => ShapeKind::Other,
        }
    }

    pub fn cells(&self) -> Vec<Word> {
        match self {
            Self::Loop { cycle } => cycle.clone(),
            Self::Balloon { path, cycle } => path.iter().chain(cycle).cloned().collect(),
            Self::Dumbbell { left, bar, right } => {
                left.iter().chain(bar).chain(right).cloned().collect()
            }
            Self::Other { cells } => cells.clone(),
        }
    }
}

/// Classifies every weakly connected component of `graph`, comparing the
/// edge set literally against the candidate shape.
pub fn classify_components(graph: &PartitionDigraph) -> Vec<ComponentShape> {
    graph
        .weak_components()
        .iter()
        .map(|comp| classify(graph, comp))
        .collect()
}

fn classify(graph: &PartitionDigraph, comp: &[usize]) -> ComponentShape {
    let members: HashSet<usize> = comp.iter().copied().collect();
    let mut indeg = std::collections::HashMap::new();
    for &a in comp {
        for &b in graph.successors(a) {
            *indeg.entry(b).or_insert(0usize) += 1;
        }
    }
    let ind = |v: usize| indeg.get(&v).copied().unwrap_or(0);
    let outd = |v: usize| graph.successors(v).len();
    let actual: BTreeSet<(usize, usize)> = comp
        .iter()
        .flat_map(|&a| graph.successors(a).iter().map(move |&b| (a, b)))
        .collect();
    let cells = |vs: &[usize]| {
        vs.iter()
            .map(|&v| graph.cell(v).clone())
            .collect::<Vec<_>>()
    };
    let other = || ComponentShape::Other { cells: cells(comp) };
    // follow single out-edges from `start` until `stop` returns true
    let walk = |start: usize, stop: &dyn Fn(usize) -> bool| -> Option<Vec<usize>> {
        let mut out = Vec::new();
        let mut v = start;
        while !stop(v) {
            if out.len() > comp.len() || outd(v) != 1 {
                return None;
            }
            out.push(v);
            v = graph.successors(v)[0];
        }
        Some(out)
    };
    let cycle_edges = |cyc: &[usize]| -> Vec<(usize, usize)> {
        (0..cyc.len())
            .map(|i| (cyc[i], cyc[(i + 1) % cyc.len()]))
            .collect()
    };
    let path_edges = |p: &[usize], end: usize| -> Vec<(usize, usize)> {
        p.iter()
            .zip(p.iter().skip(1).chain(std::iter::once(&end)))
            .map(|(&a, &b)| (a, b))
            .collect()
    };
    let covers = |parts: &[&[usize]]| -> bool {
        let all: Vec<usize> = parts.iter().flat_map(|p| p.iter().copied()).collect();
        let set: HashSet<usize> = all.iter().copied().collect();
        set.len() == all.len() && set == members
    };

    if comp.iter().all(|&v| ind(v) == 1 && outd(v) == 1) {
        let start = comp[0];
        let first = graph.successors(start)[0];
        let Some(mut rest) = walk(first, &|v| v == start) else {
            return other();
        };
        let mut cycle = vec![start];
        cycle.append(&mut rest);
        if covers(&[&cycle]) {
            return ComponentShape::Loop {
                cycle: cells(&cycle),
            };
        }
        return other();
    }

    let sources: Vec<usize> = comp.iter().copied().filter(|&v| ind(v) == 0).collect();
    let merges: Vec<usize> = comp.iter().copied().filter(|&v| ind(v) == 2).collect();
    let splits: Vec<usize> = comp.iter().copied().filter(|&v| outd(v) == 2).collect();

    if sources.len() == 1 && merges.len() == 1 && splits.is_empty() {
        let (v1, w1) = (sources[0], merges[0]);
        let Some(path) = walk(v1, &|v| v == w1) else {
            return other();
        };
        let next = graph.successors(w1)[0];
        let Some(mut tail) = walk(next, &|v| v == w1) else {
            return other();
        };
        let mut cycle = vec![w1];
        cycle.append(&mut tail);
        let mut expected: BTreeSet<(usize, usize)> = path_edges(&path, w1).into_iter().collect();
        expected.extend(cycle_edges(&cycle));
        if covers(&[&path, &cycle]) && expected == actual {
            return ComponentShape::Balloon {
                path: cells(&path),
                cycle: cells(&cycle),
            };
        }
        return other();
    }

    if sources.is_empty() && merges.len() == 1 && splits.len() == 1 {
        let (u1, w1) = (splits[0], merges[0]);
        let succ = graph.successors(u1);
        for (a, b) in [(succ[0], succ[1]), (succ[1], succ[0])] {
            let left_tail = if a == u1 {
                Some(Vec::new())
            } else {
                walk(a, &|v| v == u1 || v == w1)
            };
            let Some(mut left_tail) = left_tail else {
                continue;
            };
            // the left walk must close at u1, not run into w1
            let closes = left_tail
                .last()
                .map_or(a == u1, |&l| graph.successors(l)[0] == u1);
            if !closes {
                continue;
            }
            let Some(bar) = walk(b, &|v| v == w1 || v == u1) else {
                continue;
            };
            if bar.is_empty() || bar.last().map(|&l| graph.successors(l)[0]) != Some(w1) {
                continue;
            }
            let next = graph.successors(w1)[0];
            let Some(mut right_tail) = walk(next, &|v| v == w1) else {
                continue;
            };
            let mut left = vec![u1];
            left.append(&mut left_tail);
            let mut right = vec![w1];
            right.append(&mut right_tail);
            let mut expected: BTreeSet<(usize, usize)> = cycle_edges(&left).into_iter().collect();
            expected.insert((u1, bar[0]));
            expected.extend(path_edges(&bar, w1));
            expected.extend(cycle_edges(&right));
            if covers(&[&left, &bar, &right]) && expected == actual {
                return ComponentShape::Dumbbell {
                    left: cells(&left),
                    bar: cells(&bar),
                    right: cells(&right),
                };
            }
        }
        return other();
    }

    other()
}
