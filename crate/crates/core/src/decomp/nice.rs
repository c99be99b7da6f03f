use std::collections::BTreeSet;

use super::{check_conditions, AdjGraph, DecompError, DecompositionReport, TreeDecomposition};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NiceKind {
    Leaf,
    Introduce(usize),
    Forget(usize),
    /// Index into [`NiceTreeDecomposition::edges`].
    IntroduceEdge(usize),
    Join,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NiceNode {
    pub kind: NiceKind,
    /// Sorted.
    pub bag: Vec<usize>,
    pub children: Vec<usize>,
}

/// Nodes are stored in postorder; the root is the last node. Vertices in
/// `persistent` belong to every bag, including leaves and the root.
#[derive(Clone, Debug)]
pub struct NiceTreeDecomposition {
    pub nodes: Vec<NiceNode>,
    pub persistent: Vec<usize>,
    pub edges: Vec<(usize, usize)>,
    /// Node introducing each edge.
    pub edge_node: Vec<usize>,
    /// Smallest node index in each node's subtree.
    pub subtree_lo: Vec<usize>,
}

impl NiceTreeDecomposition {
    pub fn root(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn width(&self) -> isize {
        self.nodes.iter().map(|n| n.bag.len() as isize).max().unwrap_or(0) - 1
    }

    /// Whether edge `e` belongs to `E_t`.
    pub fn edge_below(&self, t: usize, e: usize) -> bool {
        let at = self.edge_node[e];
        self.subtree_lo[t] <= at && at <= t
    }
}

struct Builder<'a> {
    nodes: Vec<NiceNode>,
    graph: &'a AdjGraph,
    incident: Vec<Vec<usize>>,
    edge_node: Vec<usize>,
}

impl Builder<'_> {
    fn push(&mut self, kind: NiceKind, bag: Vec<usize>, children: Vec<usize>) -> usize {
        self.nodes.push(NiceNode {
            kind,
            bag,
            children,
        });
        self.nodes.len() - 1
    }

    fn introduce(&mut self, cur: usize, v: usize) -> usize {
        let mut bag = self.nodes[cur].bag.clone();
        let at = bag.binary_search(&v).unwrap_err();
        bag.insert(at, v);
        self.push(NiceKind::Introduce(v), bag, vec![cur])
    }

    /// Introduces every pending edge at `v` into the bag, then forgets `v`.
    fn forget(&mut self, mut cur: usize, v: usize) -> usize {
        for i in 0..self.incident[v].len() {
            let e = self.incident[v][i];
            let (a, b) = self.graph.edges[e];
            let other = if a == v { b } else { a };
            if self.edge_node[e] == usize::MAX
                && self.nodes[cur].bag.binary_search(&other).is_ok()
            {
                cur = self.push_edge(cur, e);
            }
        }
        let mut bag = self.nodes[cur].bag.clone();
        bag.retain(|&x| x != v);
        self.push(NiceKind::Forget(v), bag, vec![cur])
    }

    fn push_edge(&mut self, cur: usize, e: usize) -> usize {
        let bag = self.nodes[cur].bag.clone();
        let id = self.push(NiceKind::IntroduceEdge(e), bag, vec![cur]);
        self.edge_node[e] = id;
        id
    }
}

/// Converts `td` into nice form with one introduce-edge node per edge of
/// `graph`, placed directly below the forget node of whichever endpoint is
/// forgotten first. `persistent` is added to every bag.
pub fn make_nice(
    td: &TreeDecomposition,
    graph: &AdjGraph,
    persistent: &[usize],
) -> Result<NiceTreeDecomposition, DecompError> {
    let children = td
        .rooted_children()
        .ok_or_else(|| DecompError::InvalidDecomposition("root not in tree".into()))?;
    let persistent: Vec<usize> = persistent
        .iter()
        .copied()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let bags: Vec<Vec<usize>> = td
        .bags
        .iter()
        .map(|b| {
            b.iter()
                .chain(&persistent)
                .copied()
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect()
        })
        .collect();
    let report = check_conditions(&bags, &td.tree, graph);
    if !report.passed() {
        return Err(DecompError::InvalidDecomposition(format!("{report:?}")));
    }
    let mut incident = vec![Vec::new(); graph.vertex_count()];
    for (e, &(u, v)) in graph.edges.iter().enumerate() {
        incident[u].push(e);
        incident[v].push(e);
    }
    let mut b = Builder {
        nodes: Vec::new(),
        graph,
        incident,
        edge_node: vec![usize::MAX; graph.edges.len()],
    };

    // Binarize: extra children hang off copies of their parent bag.
    let (mut bags, mut children) = (bags, children);
    let mut x = 0;
    while x < children.len() {
        if children[x].len() > 2 {
            let rest = children[x].split_off(1);
            bags.push(bags[x].clone());
            children.push(rest);
            children[x].push(bags.len() - 1);
        }
        x += 1;
    }
    let mut parent = vec![None; bags.len()];
    for (x, cs) in children.iter().enumerate() {
        for &c in cs {
            parent[c] = Some(x);
        }
    }

    // Iterative postorder over the rooted decomposition.
    let mut built: Vec<usize> = vec![usize::MAX; bags.len()];
    let mut stack = vec![(td.root, false)];
    while let Some((x, expanded)) = stack.pop() {
        if !expanded {
            stack.push((x, true));
            for &c in children[x].iter().rev() {
                stack.push((c, false));
            }
            continue;
        }
        let branches: Vec<usize> = children[x].iter().map(|&c| built[c]).collect();
        let node = if branches.is_empty() {
            let mut cur = b.push(NiceKind::Leaf, persistent.clone(), Vec::new());
            for &v in &bags[x] {
                if persistent.binary_search(&v).is_err() {
                    cur = b.introduce(cur, v);
                }
            }
            cur
        } else {
            let mut cur = branches[0];
            for &other in &branches[1..] {
                let bag = bags[x].clone();
                cur = b.push(NiceKind::Join, bag, vec![cur, other]);
            }
            cur
        };
        // The chain up to the parent bag is emitted now, so every subtree
        // occupies a contiguous index range.
        let mut cur = node;
        if let Some(p) = parent[x] {
            for &v in &bags[x] {
                if bags[p].binary_search(&v).is_err() {
                    cur = b.forget(cur, v);
                }
            }
            for &v in &bags[p] {
                if bags[x].binary_search(&v).is_err() {
                    cur = b.introduce(cur, v);
                }
            }
        }
        built[x] = cur;
    }
    let mut cur = built[td.root];
    for &v in &bags[td.root] {
        if persistent.binary_search(&v).is_err() {
            cur = b.forget(cur, v);
        }
    }
    for e in 0..graph.edges.len() {
        if b.edge_node[e] == usize::MAX {
            cur = b.push_edge(cur, e);
        }
    }
    debug_assert_eq!(cur, b.nodes.len() - 1);

    let mut subtree_lo: Vec<usize> = (0..b.nodes.len()).collect();
    for t in 0..b.nodes.len() {
        for &c in &b.nodes[t].children {
            subtree_lo[t] = subtree_lo[t].min(subtree_lo[c]);
        }
    }
    let ntd = NiceTreeDecomposition {
        nodes: b.nodes,
        persistent,
        edges: graph.edges.clone(),
        edge_node: b.edge_node,
        subtree_lo,
    };
    for (t, node) in ntd.nodes.iter().enumerate() {
        if node.kind == NiceKind::Join {
            for (e, &(u, v)) in ntd.edges.iter().enumerate() {
                let internal =
                    node.bag.binary_search(&u).is_ok() && node.bag.binary_search(&v).is_ok();
                assert!(
                    !(internal && ntd.edge_below(t, e)),
                    "join bag holds an introduced edge"
                );
            }
        }
    }
    Ok(ntd)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NiceFailure {
    NotPostorder(usize),
    BadLeaf(usize),
    BadIntroduce(usize),
    BadForget(usize),
    BadIntroduceEdge(usize),
    BadJoin(usize),
    BadRoot,
    EdgeIntroduced { edge: (usize, usize), times: usize },
    JoinInternalEdge { node: usize, edge: (usize, usize) },
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NiceReport {
    pub base: DecompositionReport,
    pub failures: Vec<NiceFailure>,
}

impl NiceReport {
    pub fn passed(&self) -> bool {
        self.base.passed() && self.failures.is_empty()
    }
}

/// Checks the decomposition conditions plus every node-type relation. The
/// root and leaves must hold exactly the persistent vertices.
pub fn validate_nice(ntd: &NiceTreeDecomposition, graph: &AdjGraph) -> NiceReport {
    let nodes = &ntd.nodes;
    let bags: Vec<Vec<usize>> = nodes.iter().map(|n| n.bag.clone()).collect();
    let tree: Vec<(usize, usize)> = nodes
        .iter()
        .enumerate()
        .flat_map(|(t, n)| n.children.iter().map(move |&c| (c, t)))
        .collect();
    let mut report = NiceReport {
        base: check_conditions(&bags, &tree, graph),
        failures: Vec::new(),
    };
    let f = &mut report.failures;
    let without = |bag: &[usize], v: usize| -> Vec<usize> {
        bag.iter().copied().filter(|&x| x != v).collect()
    };
    let mut counts = vec![0usize; graph.edges.len()];
    let mut edge_at: Vec<Option<usize>> = vec![None; graph.edges.len()];
    for (t, node) in nodes.iter().enumerate() {
        if node.children.iter().any(|&c| c >= t) {
            f.push(NiceFailure::NotPostorder(t));
            continue;
        }
        let child = |i: usize| &nodes[node.children[i]].bag;
        match node.kind {
            NiceKind::Leaf => {
                if !node.children.is_empty() || node.bag != ntd.persistent {
                    f.push(NiceFailure::BadLeaf(t));
                }
            }
            NiceKind::Introduce(v) => {
                let ok = node.children.len() == 1
                    && node.bag.binary_search(&v).is_ok()
                    && child(0).binary_search(&v).is_err()
                    && without(&node.bag, v) == *child(0);
                if !ok {
                    f.push(NiceFailure::BadIntroduce(t));
                }
            }
            NiceKind::Forget(v) => {
                let ok = node.children.len() == 1
                    && child(0).binary_search(&v).is_ok()
                    && without(child(0), v) == node.bag;
                if !ok {
                    f.push(NiceFailure::BadForget(t));
                }
            }
            NiceKind::IntroduceEdge(e) => {
                let ok = e < graph.edges.len() && node.children.len() == 1 && node.bag == *child(0) && {
                    let (u, v) = graph.edges[e];
                    node.bag.binary_search(&u).is_ok() && node.bag.binary_search(&v).is_ok()
                };
                if ok {
                    counts[e] += 1;
                    edge_at[e] = Some(t);
                } else {
                    f.push(NiceFailure::BadIntroduceEdge(t));
                }
            }
            NiceKind::Join => {
                let ok =
                    node.children.len() == 2 && *child(0) == node.bag && *child(1) == node.bag;
                if !ok {
                    f.push(NiceFailure::BadJoin(t));
                }
            }
        }
    }
    if nodes.last().map(|n| &n.bag) != Some(&ntd.persistent) {
        f.push(NiceFailure::BadRoot);
    }
    for (e, &c) in counts.iter().enumerate() {
        if c != 1 {
            f.push(NiceFailure::EdgeIntroduced {
                edge: graph.edges[e],
                times: c,
            });
        }
    }
    let mut lo: Vec<usize> = (0..nodes.len()).collect();
    let mut size = vec![1usize; nodes.len()];
    for t in 0..nodes.len() {
        for &c in &nodes[t].children {
            if c < t {
                lo[t] = lo[t].min(lo[c]);
                size[t] += size[c];
            }
        }
        if lo[t] + size[t] != t + 1 {
            f.push(NiceFailure::NotPostorder(t));
        }
    }
    for (t, node) in nodes.iter().enumerate() {
        if node.kind != NiceKind::Join {
            continue;
        }
        for (e, &(u, v)) in graph.edges.iter().enumerate() {
            let inside = node.bag.binary_search(&u).is_ok() && node.bag.binary_search(&v).is_ok();
            if inside && edge_at[e].is_some_and(|at| lo[t] <= at && at < t) {
                f.push(NiceFailure::JoinInternalEdge {
                    node: t,
                    edge: (u, v),
                });
            }
        }
    }
    report
}
