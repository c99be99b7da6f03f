//! Tree decompositions: heuristic construction, nice form, validation, and
//! the event decomposition of interval instances.

pub mod events;
mod nice;

use std::collections::{BTreeSet, VecDeque};

use thiserror::Error;

pub use nice::{
    make_nice, validate_nice, NiceFailure, NiceKind, NiceNode, NiceReport, NiceTreeDecomposition,
};

use crate::intersect::IntersectionGraph;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecompError {
    #[error("instance graph is not a path")]
    NotAPath,
    #[error("invalid input decomposition: {0}")]
    InvalidDecomposition(String),
}

/// Undirected graph on `0..n`; `edges` may contain parallel pairs, `adj` is simple.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AdjGraph {
    pub adj: Vec<BTreeSet<usize>>,
    pub edges: Vec<(usize, usize)>,
}

impl AdjGraph {
    pub fn new(n: usize) -> Self {
        AdjGraph {
            adj: vec![BTreeSet::new(); n],
            edges: Vec::new(),
        }
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut g = AdjGraph::new(n);
        for (u, v) in edges {
            g.add_edge(u, v);
        }
        g
    }

    /// Underlying simple graph of an intersection multigraph.
    pub fn from_intersection(ig: &IntersectionGraph) -> Self {
        AdjGraph::from_edges(ig.agent_count(), ig.simple_edges())
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        assert_ne!(u, v, "self-loop");
        self.adj[u].insert(v);
        self.adj[v].insert(u);
        self.edges.push((u.min(v), u.max(v)));
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }
}

/// Bags over vertex ids plus an undirected tree on bag indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeDecomposition {
    /// Sorted bags.
    pub bags: Vec<Vec<usize>>,
    pub tree: Vec<(usize, usize)>,
    pub root: usize,
}

impl TreeDecomposition {
    pub fn width(&self) -> isize {
        self.bags.iter().map(|b| b.len() as isize).max().unwrap_or(0) - 1
    }

    fn neighbors(&self) -> Vec<Vec<usize>> {
        let mut nb = vec![Vec::new(); self.bags.len()];
        for &(a, b) in &self.tree {
            nb[a].push(b);
            nb[b].push(a);
        }
        nb
    }

    /// Children lists when rooted at `root`; `None` if the tree is not a tree.
    pub fn rooted_children(&self) -> Option<Vec<Vec<usize>>> {
        let m = self.bags.len();
        if m == 0 || self.tree.len() + 1 != m || self.root >= m {
            return None;
        }
        let nb = self.neighbors();
        let mut children = vec![Vec::new(); m];
        let mut seen = vec![false; m];
        seen[self.root] = true;
        let mut queue = VecDeque::from([self.root]);
        let mut count = 1;
        while let Some(x) = queue.pop_front() {
            for &y in &nb[x] {
                if !seen[y] {
                    seen[y] = true;
                    count += 1;
                    children[x].push(y);
                    queue.push_back(y);
                }
            }
        }
        (count == m).then_some(children)
    }
}

/// Outcome of checking the three decomposition conditions.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DecompositionReport {
    pub not_a_tree: bool,
    pub missing_vertices: Vec<usize>,
    pub missing_edges: Vec<(usize, usize)>,
    /// `(vertex, node in one component, node in another)`.
    pub disconnected: Vec<(usize, usize, usize)>,
}

impl DecompositionReport {
    pub fn passed(&self) -> bool {
        !self.not_a_tree
            && self.missing_vertices.is_empty()
            && self.missing_edges.is_empty()
            && self.disconnected.is_empty()
    }
}

pub(crate) fn check_conditions(
    bags: &[Vec<usize>],
    tree: &[(usize, usize)],
    graph: &AdjGraph,
) -> DecompositionReport {
    let m = bags.len();
    let mut report = DecompositionReport::default();
    let mut nb = vec![Vec::new(); m];
    for &(a, b) in tree {
        nb[a].push(b);
        nb[b].push(a);
    }
    report.not_a_tree = m == 0 || tree.len() + 1 != m || {
        let mut seen = vec![false; m];
        seen[0] = true;
        let mut stack = vec![0];
        while let Some(x) = stack.pop() {
            for &y in &nb[x] {
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        seen.iter().any(|s| !s)
    };
    let contains = |t: usize, v: usize| bags[t].binary_search(&v).is_ok();
    for v in 0..graph.vertex_count() {
        let holders: Vec<usize> = (0..m).filter(|&t| contains(t, v)).collect();
        if holders.is_empty() {
            report.missing_vertices.push(v);
            continue;
        }
        let mut seen = BTreeSet::from([holders[0]]);
        let mut stack = vec![holders[0]];
        while let Some(x) = stack.pop() {
            for &y in &nb[x] {
                if contains(y, v) && seen.insert(y) {
                    stack.push(y);
                }
            }
        }
        if let Some(&other) = holders.iter().find(|t| !seen.contains(t)) {
            report.disconnected.push((v, holders[0], other));
        }
    }
    let mut checked = BTreeSet::new();
    for &(u, v) in &graph.edges {
        if checked.insert((u, v)) && !(0..m).any(|t| contains(t, u) && contains(t, v)) {
            report.missing_edges.push((u, v));
        }
    }
    report
}

pub fn validate_decomposition(td: &TreeDecomposition, graph: &AdjGraph) -> DecompositionReport {
    check_conditions(&td.bags, &td.tree, graph)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Heuristic {
    #[default]
    MinFill,
    MinDegree,
}

/// Greedy elimination decomposition; ties broken by smaller degree, then smaller id.
pub fn heuristic_decomposition(graph: &AdjGraph, heuristic: Heuristic) -> TreeDecomposition {
    let n = graph.vertex_count();
    if n == 0 {
        return TreeDecomposition {
            bags: vec![Vec::new()],
            tree: Vec::new(),
            root: 0,
        };
    }
    let mut adj = graph.adj.clone();
    let mut alive: BTreeSet<usize> = (0..n).collect();
    let mut order = Vec::with_capacity(n);
    let mut position = vec![0; n];
    let mut elim_bags: Vec<Vec<usize>> = Vec::with_capacity(n);
    while !alive.is_empty() {
        let fill = |v: usize| -> usize {
            let nb: Vec<usize> = adj[v].iter().copied().collect();
            let mut missing = 0;
            for (i, &x) in nb.iter().enumerate() {
                for &y in &nb[i + 1..] {
                    if !adj[x].contains(&y) {
                        missing += 1;
                    }
                }
            }
            missing
        };
        let v = *alive
            .iter()
            .min_by_key(|&&v| match heuristic {
                Heuristic::MinFill => (fill(v), adj[v].len(), v),
                Heuristic::MinDegree => (0, adj[v].len(), v),
            })
            .unwrap();
        let nb: Vec<usize> = adj[v].iter().copied().collect();
        for (i, &x) in nb.iter().enumerate() {
            for &y in &nb[i + 1..] {
                adj[x].insert(y);
                adj[y].insert(x);
            }
        }
        for &x in &nb {
            adj[x].remove(&v);
        }
        adj[v].clear();
        alive.remove(&v);
        position[v] = order.len();
        order.push(v);
        let mut bag = nb;
        bag.push(v);
        bag.sort_unstable();
        elim_bags.push(bag);
    }
    // Bag i (eliminating order[i]) hangs below the bag of its earliest-eliminated
    // remaining neighbour; component roots are chained together.
    let mut parent: Vec<Option<usize>> = vec![None; n];
    let mut roots = Vec::new();
    for i in 0..n {
        let v = order[i];
        let next = elim_bags[i]
            .iter()
            .filter(|&&x| x != v)
            .map(|&x| position[x])
            .min();
        match next {
            Some(j) => parent[i] = Some(j),
            None => roots.push(i),
        }
    }
    for w in roots.windows(2) {
        parent[w[0]] = Some(w[1]);
    }
    let root = *roots.last().unwrap();
    contract(elim_bags, parent, root)
}

/// Merges every bag that is a subset of an adjacent bag into that bag.
fn contract(bags: Vec<Vec<usize>>, parent: Vec<Option<usize>>, root: usize) -> TreeDecomposition {
    let m = bags.len();
    let mut alive = vec![true; m];
    let mut parent = parent;
    let subset = |a: &[usize], b: &[usize]| a.iter().all(|x| b.binary_search(x).is_ok());
    let mut root = root;
    loop {
        let mut changed = false;
        for i in 0..m {
            if !alive[i] {
                continue;
            }
            let Some(p) = parent[i] else { continue };
            if subset(&bags[i], &bags[p]) {
                // Child folds into parent.
                alive[i] = false;
                for q in parent.iter_mut() {
                    if *q == Some(i) {
                        *q = Some(p);
                    }
                }
                changed = true;
            } else if subset(&bags[p], &bags[i]) {
                // Parent folds into child; child takes parent's place.
                alive[p] = false;
                parent[i] = parent[p];
                for (j, q) in parent.iter_mut().enumerate() {
                    if *q == Some(p) && j != i {
                        *q = Some(i);
                    }
                }
                if root == p {
                    root = i;
                }
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let mut index = vec![usize::MAX; m];
    let mut out_bags = Vec::new();
    for i in 0..m {
        if alive[i] {
            index[i] = out_bags.len();
            out_bags.push(bags[i].clone());
        }
    }
    let tree = (0..m)
        .filter(|&i| alive[i])
        .filter_map(|i| parent[i].map(|p| (index[i], index[p])))
        .collect();
    TreeDecomposition {
        bags: out_bags,
        tree,
        root: index[root],
    }
}

pub fn min_fill_decomposition(graph: &AdjGraph) -> TreeDecomposition {
    heuristic_decomposition(graph, Heuristic::MinFill)
}

pub fn min_degree_decomposition(graph: &AdjGraph) -> TreeDecomposition {
    heuristic_decomposition(graph, Heuristic::MinDegree)
}

/// Exact treewidth by exhaustive search over elimination orders (tiny graphs only).
pub fn exact_treewidth(graph: &AdjGraph) -> usize {
    let n = graph.vertex_count();
    assert!(n <= 16, "exhaustive treewidth limited to 16 vertices");
    if n == 0 {
        return 0;
    }
    // Dynamic program over eliminated sets: best[S] = min over orders of S of max degree seen.
    let full = (1usize << n) - 1;
    let mut best = vec![usize::MAX; 1 << n];
    best[0] = 0;
    for set in 0..=full {
        if best[set] == usize::MAX {
            continue;
        }
        for v in 0..n {
            if set >> v & 1 == 1 {
                continue;
            }
            // Degree of v after eliminating `set`: vertices outside set ∪ {v}
            // reachable from v through `set`.
            let mut seen = 1usize << v;
            let mut stack = vec![v];
            let mut degree = 0;
            while let Some(x) = stack.pop() {
                for &y in &graph.adj[x] {
                    if seen >> y & 1 == 1 {
                        continue;
                    }
                    seen |= 1 << y;
                    if set >> y & 1 == 1 {
                        stack.push(y);
                    } else {
                        degree += 1;
                    }
                }
            }
            let next = set | 1 << v;
            let cost = best[set].max(degree);
            if cost < best[next] {
                best[next] = cost;
            }
        }
    }
    best[full]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_is_one_bag() {
        let g = AdjGraph::from_edges(3, [(0, 1), (1, 2), (0, 2)]);
        let td = min_fill_decomposition(&g);
        assert_eq!(td.bags, vec![vec![0, 1, 2]]);
        assert_eq!(td.width(), 2);
        assert!(validate_decomposition(&td, &g).passed());
    }

    #[test]
    fn tree_has_width_one() {
        let g = AdjGraph::from_edges(6, [(0, 1), (0, 2), (2, 3), (2, 4), (4, 5)]);
        for h in [Heuristic::MinFill, Heuristic::MinDegree] {
            let td = heuristic_decomposition(&g, h);
            assert_eq!(td.width(), 1);
            assert!(validate_decomposition(&td, &g).passed());
        }
    }

    #[test]
    fn disconnected_graph_and_isolated_vertices() {
        let g = AdjGraph::from_edges(5, [(0, 1), (3, 4)]);
        let td = min_fill_decomposition(&g);
        assert!(validate_decomposition(&td, &g).passed(), "{td:?}");
    }

    #[test]
    fn report_names_failures() {
        let g = AdjGraph::from_edges(3, [(0, 1), (1, 2)]);
        let td = TreeDecomposition {
            bags: vec![vec![0, 1], vec![2], vec![0]],
            tree: vec![(0, 1), (1, 2)],
            root: 0,
        };
        let r = validate_decomposition(&td, &g);
        assert_eq!(r.missing_edges, vec![(1, 2)]);
        assert_eq!(r.disconnected, vec![(0, 0, 2)]);
        assert!(!r.passed());
    }

    #[test]
    fn exact_treewidth_small_cases() {
        let cycle = AdjGraph::from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]);
        assert_eq!(exact_treewidth(&cycle), 2);
        let k4 = AdjGraph::from_edges(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        assert_eq!(exact_treewidth(&k4), 3);
        assert_eq!(min_fill_decomposition(&k4).width(), 3);
    }
}
