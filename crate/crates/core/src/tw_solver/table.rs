//! DP keys, entries and the five node handlers.

use std::collections::{BTreeMap, HashMap};

use crate::decomp::NiceTreeDecomposition;
use crate::model::{AgentIdx, Rational};

use super::augment::AugmentedInstance;

/// A bag agent of degree 1: its psp `Â` (edge outside `E_t`) and npip `Ẑ`
/// (edge inside `E_t`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct End {
    pub agent: AgentIdx,
    pub psp: AgentIdx,
    pub npip: AgentIdx,
}

/// Bag agents missing from both `inner` and `ends` have degree 0.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TwDpKey {
    /// Degree-2 bag agents, sorted.
    pub inner: Vec<AgentIdx>,
    /// Degree-1 bag agents, sorted by agent.
    pub ends: Vec<End>,
    /// Path endpoint pairs `(min, max)`, sorted.
    pub pairs: Vec<(AgentIdx, AgentIdx)>,
}

impl TwDpKey {
    pub fn end(&self, a: AgentIdx) -> Option<&End> {
        self.ends
            .binary_search_by_key(&a, |e| e.agent)
            .ok()
            .map(|i| &self.ends[i])
    }

    pub fn degree(&self, a: AgentIdx) -> u8 {
        if self.inner.binary_search(&a).is_ok() {
            2
        } else if self.end(a).is_some() {
            1
        } else {
            0
        }
    }

    pub fn partner(&self, a: AgentIdx) -> Option<AgentIdx> {
        self.pairs.iter().find_map(|&(x, y)| {
            if x == a {
                Some(y)
            } else if y == a {
                Some(x)
            } else {
                None
            }
        })
    }

    fn normalize(&mut self) {
        self.inner.sort_unstable();
        self.ends.sort_unstable();
        for p in &mut self.pairs {
            *p = (p.0.min(p.1), p.0.max(p.1));
        }
        self.pairs.sort_unstable();
    }

    /// An end whose psp sits in the bag can only be completed if that agent
    /// is still free to take the connecting edge.
    fn completable(&self) -> bool {
        self.ends.iter().all(|e| {
            if self.inner.binary_search(&e.psp).is_ok() {
                return false;
            }
            self.end(e.psp).is_none_or(|o| o.psp == e.agent)
        })
    }
}

/// How an entry was obtained from its child entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Back {
    Leaf,
    /// Same forest as the child entry.
    Child(TwDpKey),
    /// Child forest plus the edge introduced at this node.
    Edge(TwDpKey),
    Join(TwDpKey, TwDpKey),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwDpEntry {
    pub cost: Rational,
    pub back: Back,
}

pub type TwTable = BTreeMap<TwDpKey, TwDpEntry>;

fn relax(table: &mut TwTable, key: TwDpKey, cost: Rational, back: Back) {
    match table.get(&key) {
        Some(old) if old.cost <= cost => {}
        _ => {
            table.insert(key, TwDpEntry { cost, back });
        }
    }
}

fn zero() -> Rational {
    Rational::from_integer(0.into())
}

/// The only forest on `{a_s, a_t}` without edges is empty.
pub fn handle_leaf() -> TwTable {
    let mut t = TwTable::new();
    t.insert(
        TwDpKey::default(),
        TwDpEntry {
            cost: zero(),
            back: Back::Leaf,
        },
    );
    t
}

/// The new agent has no edges yet, so it joins with degree 0.
pub fn handle_introduce(child: &TwTable) -> TwTable {
    child
        .iter()
        .map(|(k, e)| {
            (
                k.clone(),
                TwDpEntry {
                    cost: e.cost.clone(),
                    back: Back::Child(k.clone()),
                },
            )
        })
        .collect()
}

/// Keeps the child entries in which `v` has degree 0 or 2.
pub fn handle_forget(child: &TwTable, v: AgentIdx) -> TwTable {
    let mut out = TwTable::new();
    for (k, e) in child {
        if k.end(v).is_some() || k.ends.iter().any(|x| x.psp == v) {
            continue;
        }
        let mut key = k.clone();
        key.inner.retain(|&a| a != v);
        relax(&mut out, key, e.cost.clone(), Back::Child(k.clone()));
    }
    out
}

/// Whether the edge `{a, b}` lies in `E_t`. Virtual edges never do.
fn in_subtree(aug: &AugmentedInstance, ntd: &NiceTreeDecomposition, t: usize, a: AgentIdx, b: AgentIdx) -> bool {
    aug.edge_id(a, b).is_some_and(|e| ntd.edge_below(t, e))
}

/// psp choices for `x` when it gets its first edge, towards `y`, at node `t`.
fn psp_candidates(
    aug: &AugmentedInstance,
    ntd: &NiceTreeDecomposition,
    t: usize,
    key: &TwDpKey,
    x: AgentIdx,
    y: AgentIdx,
) -> Vec<AgentIdx> {
    if aug.is_terminal(x) {
        return vec![aug.virtual_of(x)];
    }
    aug.neighbors[x]
        .iter()
        .copied()
        .filter(|&z| z != y && !in_subtree(aug, ntd, t, x, z) && key.inner.binary_search(&z).is_err())
        .collect()
}

/// Node `t` introduces the edge `{u, v}`.
pub fn handle_introduce_edge(
    aug: &AugmentedInstance,
    ntd: &NiceTreeDecomposition,
    t: usize,
    child: &TwTable,
    u: AgentIdx,
    v: AgentIdx,
) -> TwTable {
    let mut out = TwTable::new();
    for (k, e) in child {
        // Edge unused: an end may no longer expect it as its psp edge.
        let stale = [(u, v), (v, u)]
            .iter()
            .any(|&(x, y)| k.end(x).is_some_and(|end| end.psp == y));
        if !stale {
            relax(&mut out, k.clone(), e.cost.clone(), Back::Child(k.clone()));
        }

        let (du, dv) = (k.degree(u), k.degree(v));
        if du == 2 || dv == 2 {
            continue;
        }
        if du == 1 && k.end(u).unwrap().psp != v {
            continue;
        }
        if dv == 1 && k.end(v).unwrap().psp != u {
            continue;
        }
        let mut base = k.clone();
        match (du, dv) {
            (0, 0) => base.pairs.push((u, v)),
            (1, 1) => {
                let (pu, pv) = (k.partner(u).unwrap(), k.partner(v).unwrap());
                if pu == v {
                    continue;
                }
                base.pairs.retain(|&(a, b)| a != u && b != u && a != v && b != v);
                base.pairs.push((pu, pv));
            }
            _ => {
                let (fresh, old) = if du == 0 { (u, v) } else { (v, u) };
                let w = k.partner(old).unwrap();
                base.pairs.retain(|&(a, b)| a != old && b != old);
                base.pairs.push((fresh, w));
            }
        }
        for (x, d) in [(u, du), (v, dv)] {
            if d == 1 {
                base.ends.retain(|end| end.agent != x);
                base.inner.push(x);
            }
        }
        base.normalize();
        // Agents reaching degree 1 pick a psp and pay their segment now.
        let fresh: Vec<(AgentIdx, AgentIdx)> = [(u, du, v), (v, dv, u)]
            .iter()
            .filter(|&&(_, d, _)| d == 0)
            .map(|&(x, _, y)| (x, y))
            .collect();
        let mut partial: Vec<(TwDpKey, Rational)> = vec![(base, e.cost.clone())];
        for &(x, y) in &fresh {
            let mut next = Vec::new();
            for (key, cost) in &partial {
                for z in psp_candidates(aug, ntd, t, key, x, y) {
                    let mut nk = key.clone();
                    nk.ends.push(End {
                        agent: x,
                        psp: z,
                        npip: y,
                    });
                    let c = cost + aug.seg_cost(z, x, y).expect("psp and npip are neighbours");
                    next.push((nk, c));
                }
            }
            partial = next;
        }
        for (mut key, cost) in partial {
            key.normalize();
            if key.completable() {
                relax(&mut out, key, cost, Back::Edge(k.clone()));
            }
        }
    }
    out
}

/// Bag positions of degree-1 and degree-2 agents.
fn masks(bag: &[AgentIdx], k: &TwDpKey) -> (u64, u64) {
    let bit = |a: AgentIdx| 1u64 << bag.binary_search(&a).expect("key agent in bag");
    let ones = k.ends.iter().fold(0, |m, e| m | bit(e.agent));
    let twos = k.inner.iter().fold(0, |m, &a| m | bit(a));
    (ones, twos)
}

/// Join node `t` with children `t1`, `t2`.
pub fn handle_join(
    aug: &AugmentedInstance,
    ntd: &NiceTreeDecomposition,
    t1: usize,
    t2: usize,
    c1: &TwTable,
    c2: &TwTable,
    bag: &[AgentIdx],
) -> TwTable {
    assert!(bag.len() <= 64, "bag too large for the join masks");
    let mut groups: HashMap<(u64, u64), Vec<(&TwDpKey, &TwDpEntry)>> = HashMap::new();
    for (k, e) in c2 {
        groups.entry(masks(bag, k)).or_default().push((k, e));
    }
    let mut out = TwTable::new();
    for (k1, e1) in c1 {
        let (o1, w1) = masks(bag, k1);
        for (&(o2, w2), entries) in &groups {
            if w1 & (o2 | w2) != 0 || w2 & o1 != 0 {
                continue;
            }
            for &(k2, e2) in entries {
                if let Some((key, cost)) = combine(aug, ntd, t1, t2, k1, k2) {
                    relax(&mut out, key, cost + &e1.cost + &e2.cost, Back::Join(k1.clone(), k2.clone()));
                }
            }
        }
    }
    out
}

/// Merges two child keys with compatible degrees; returns the parent key and
/// the cost correction for agents counted in both children.
fn combine(
    aug: &AugmentedInstance,
    ntd: &NiceTreeDecomposition,
    t1: usize,
    t2: usize,
    k1: &TwDpKey,
    k2: &TwDpKey,
) -> Option<(TwDpKey, Rational)> {
    let mut key = TwDpKey {
        inner: k1.inner.iter().chain(&k2.inner).copied().collect(),
        ..TwDpKey::default()
    };
    let mut correction = zero();
    let mut merged = Vec::new();
    for (ends, other, t_other) in [(&k1.ends, k2, t2), (&k2.ends, k1, t1)] {
        for e in ends.iter() {
            match other.end(e.agent) {
                Some(o) => {
                    if e.psp != o.npip || o.psp != e.npip {
                        return None;
                    }
                    if t_other == t2 {
                        merged.push(e.agent);
                        correction -= aug.seg_cost(e.npip, e.agent, e.psp).ok()?;
                    }
                }
                None => {
                    if in_subtree(aug, ntd, t_other, e.agent, e.psp) {
                        return None;
                    }
                    key.ends.push(*e);
                }
            }
        }
    }
    key.inner.extend(&merged);

    // Chain child paths through merged agents, alternating between children.
    let mut visited = Vec::new();
    let mut paired: Vec<AgentIdx> = Vec::new();
    let survivors: Vec<AgentIdx> = key.ends.iter().map(|e| e.agent).collect();
    for &start in &survivors {
        if paired.contains(&start) {
            continue;
        }
        let mut cur = start;
        let mut first = k1.end(start).is_some();
        loop {
            let next = if first { k1.partner(cur) } else { k2.partner(cur) }?;
            if survivors.contains(&next) {
                key.pairs.push((start, next));
                paired.extend([start, next]);
                break;
            }
            if !merged.contains(&next) || visited.contains(&next) {
                return None;
            }
            visited.push(next);
            cur = next;
            first = !first;
        }
    }
    // Merged agents missed by every walk close a cycle.
    if visited.len() != merged.len() {
        return None;
    }
    key.normalize();
    key.completable().then_some((key, correction))
}
