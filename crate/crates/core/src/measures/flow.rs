//! Maximum flow on the bipartite transport network used by the Prohorov
//! flow backend.

use std::collections::VecDeque;

struct Edge {
    to: usize,
    cap: i128,
}

struct Network {
    edges: Vec<Edge>,
    adj: Vec<Vec<usize>>,
}

impl Network {
    fn new(n: usize) -> Self {
        Self {
            edges: Vec::new(),
            adj: vec![Vec::new(); n],
        }
    }

    fn add(&mut self, from: usize, to: usize, cap: i128) {
        self.adj[from].push(self.edges.len());
        self.edges.push(Edge { to, cap });
        self.adj[to].push(self.edges.len());
        self.edges.push(Edge { to: from, cap: 0 });
    }

    fn levels(&self, s: usize) -> Vec<usize> {
        let mut level = vec![usize::MAX; self.adj.len()];
        level[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &e in &self.adj[v] {
                let Edge { to, cap } = self.edges[e];
                if cap > 0 && level[to] == usize::MAX {
                    level[to] = level[v] + 1;
                    queue.push_back(to);
                }
            }
        }
        level
    }

    fn push(
        &mut self,
        v: usize,
        t: usize,
        limit: i128,
        level: &[usize],
        next: &mut [usize],
    ) -> i128 {
        if v == t {
            return limit;
        }
        while next[v] < self.adj[v].len() {
            let e = self.adj[v][next[v]];
            let Edge { to, cap } = self.edges[e];
            if cap > 0 && level[to] == level[v] + 1 {
                let pushed = self.push(to, t, limit.min(cap), level, next);
                if pushed > 0 {
                    self.edges[e].cap -= pushed;
                    self.edges[e ^ 1].cap += pushed;
                    return pushed;
                }
            }
            next[v] += 1;
        }
        0
    }

    fn max_flow(&mut self, s: usize, t: usize) -> i128 {
        let mut total = 0;
        loop {
            let level = self.levels(s);
            if level[t] == usize::MAX {
                return total;
            }
            let mut next = vec![0; self.adj.len()];
            loop {
                let pushed = self.push(s, t, i128::MAX, &level, &mut next);
                if pushed == 0 {
                    break;
                }
                total += pushed;
            }
        }
    }
}

/// Maximum flow from sources with supplies `left` to sinks with demands
/// `right` along the uncapacitated edges `links[i]`, together with the source
/// side of a minimum cut restricted to the left vertices.
pub(crate) fn bipartite_max_flow(
    left: &[i128],
    right: &[i128],
    links: &[Vec<usize>],
) -> (i128, Vec<bool>) {
    let (m, k) = (left.len(), right.len());
    let (s, t) = (m + k, m + k + 1);
    let unbounded = left.iter().sum::<i128>() + 1;
    let mut net = Network::new(m + k + 2);
    for (i, &cap) in left.iter().enumerate() {
        net.add(s, i, cap);
        for &j in &links[i] {
            net.add(i, m + j, unbounded);
        }
    }
    for (j, &cap) in right.iter().enumerate() {
        net.add(m + j, t, cap);
    }
    let flow = net.max_flow(s, t);
    let reach = net.levels(s);
    (flow, (0..m).map(|i| reach[i] != usize::MAX).collect())
}
