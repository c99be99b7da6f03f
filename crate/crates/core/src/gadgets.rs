//! Path instances encoding PartitionInto-k, and the 3-Partition transform.
//!
//! Layout from left to right: partition gadgets `P_1 … P_k`, then object
//! gadgets `O_n … O_1`. `s` is `c[1,1,1]` (coordinate 0), `t` is `o'[1,k-1]`.

use num::{BigInt, One, Zero};
use thiserror::Error;

use crate::model::{format_rational, AgentSpec, Instance, InstanceBuilder, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GadgetError {
    #[error("values must be positive and strictly decreasing")]
    NotDecreasing,
    #[error("need k >= 2, got {0}")]
    SmallK(usize),
    #[error("need a(n) >= 1")]
    BadFactor,
    #[error("3-Partition needs a multiple of three values, got {0}")]
    NotTriples(usize),
}

/// Coordinates, speeds and budget of one construction. Indices are 0-based
/// versions of the 1-based `i, j, l`.
#[derive(Clone, Debug, PartialEq)]
pub struct GadgetSpec {
    pub p: Vec<u64>,
    pub k: usize,
    pub a_n: u64,
    pub total: u64,
    /// `v_j'` (helper speed) per partition set.
    pub v_prime: Vec<Rational>,
    /// `v_j` (element speed) per partition set.
    pub v: Vec<Rational>,
    pub v_star: Rational,
    /// `c[i][j][l]`.
    pub c: Vec<Vec<Vec<Rational>>>,
    pub c_prime: Vec<Vec<Vec<Rational>>>,
    /// `o[i][j]` for `j < k - 1`.
    pub o: Vec<Vec<Rational>>,
    pub o_prime: Vec<Vec<Rational>>,
    /// `P³`.
    pub d: Rational,
    /// `P` is not a multiple of `k`, so no equal split exists.
    pub no_instance_by_divisibility: bool,
    pub counts: AgentCounts,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AgentCounts {
    pub element: usize,
    pub helper: usize,
    pub partition: usize,
    pub p_transition: usize,
    pub o_transition: usize,
    pub g_transition: usize,
}

impl AgentCounts {
    pub fn total(&self) -> usize {
        self.element + self.helper + self.partition + self.p_transition + self.o_transition + self.g_transition
    }
}

impl GadgetSpec {
    /// Metadata for the generator sidecar file.
    pub fn to_json(&self) -> serde_json::Value {
        let r = |x: &Rational| serde_json::Value::String(format_rational(x));
        serde_json::json!({
            "p": self.p,
            "k": self.k,
            "a_n": self.a_n,
            "P": self.total,
            "d": r(&self.d),
            "budget": r(&(self.d.clone() * Rational::from_integer(self.a_n.into()))),
            "v_prime": self.v_prime.iter().map(r).collect::<Vec<_>>(),
            "v": self.v.iter().map(r).collect::<Vec<_>>(),
            "v_star": r(&self.v_star),
            "no_instance_by_divisibility": self.no_instance_by_divisibility,
            "agents": {
                "element": self.counts.element,
                "helper": self.counts.helper,
                "partition": self.counts.partition,
                "p_transition": self.counts.p_transition,
                "o_transition": self.counts.o_transition,
                "g_transition": self.counts.g_transition,
                "total": self.counts.total(),
            },
        })
    }
}

fn big(n: u64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Speed tower `v_1' < v_1 < … < v_k' < v_k < v*`.
fn speeds(total: u64, k: usize, a_n: u64) -> (Vec<Rational>, Vec<Rational>, Rational) {
    let scale = big(total).pow(3) * big(a_n);
    let one = Rational::one();
    let mut v_prime = Vec::with_capacity(k);
    let mut v = Vec::with_capacity(k);
    for j in 0..k {
        let vp = if j == 0 {
            scale.clone() + &one
        } else {
            &v[j - 1] * &scale + &one
        };
        v.push(&vp * &scale + &one);
        v_prime.push(vp);
    }
    let v_star = &v[k - 1] * &scale + &one;
    (v_prime, v, v_star)
}

fn cname(prime: bool, i: usize, j: usize, l: usize) -> String {
    format!("c{}[{},{},{}]", if prime { "'" } else { "" }, i + 1, j + 1, l + 1)
}

fn oname(prime: bool, i: usize, j: usize) -> String {
    format!("o{}[{},{}]", if prime { "'" } else { "" }, i + 1, j + 1)
}

/// Builds the DDT-SP path instance for `p` (strictly decreasing) and `k`.
pub fn build_hardness_instance(p: &[u64], k: usize, a_n: u64) -> Result<(Instance, GadgetSpec), GadgetError> {
    if p.is_empty() || p.contains(&0) || p.windows(2).any(|w| w[0] <= w[1]) {
        return Err(GadgetError::NotDecreasing);
    }
    if k < 2 {
        return Err(GadgetError::SmallK(k));
    }
    if a_n == 0 {
        return Err(GadgetError::BadFactor);
    }
    let n = p.len();
    let total: u64 = p.iter().sum();
    let (v_prime, v, v_star) = speeds(total, k, a_n);
    let pl: Vec<usize> = p.iter().map(|&x| x as usize).collect();

    // Partition gadgets, left to right.
    let mut c = vec![vec![Vec::new(); k]; n];
    let mut c_prime = vec![vec![Vec::new(); k]; n];
    let mut prev_end: Option<Rational> = None;
    for j in 0..k {
        for i in 0..n {
            for l in 0..pl[i] {
                let start = if l > 0 {
                    &c_prime[i][j][l - 1] + &v[j]
                } else {
                    match &prev_end {
                        None => Rational::zero(),
                        Some(e) => e + &v_star,
                    }
                };
                c_prime[i][j].push(&start + &v_prime[j]);
                c[i][j].push(start);
            }
            prev_end = Some(c_prime[i][j][pl[i] - 1].clone());
        }
    }
    // Object gadgets O_n … O_1, each with k - 1 unit gaps.
    let mut o = vec![Vec::new(); n];
    let mut o_prime = vec![Vec::new(); n];
    let mut last = prev_end.expect("at least one gadget");
    for i in (0..n).rev() {
        for _ in 0..k - 1 {
            let start = &last + &v_star;
            let end = &start + Rational::one();
            o[i].push(start);
            o_prime[i].push(end.clone());
            last = end;
        }
    }

    let mut b = InstanceBuilder::new();
    let mut coords: Vec<(Rational, String)> = Vec::new();
    for i in 0..n {
        for j in 0..k {
            for l in 0..pl[i] {
                coords.push((c[i][j][l].clone(), cname(false, i, j, l)));
                coords.push((c_prime[i][j][l].clone(), cname(true, i, j, l)));
            }
        }
        for j in 0..k - 1 {
            coords.push((o[i][j].clone(), oname(false, i, j)));
            coords.push((o_prime[i][j].clone(), oname(true, i, j)));
        }
    }
    coords.sort();
    for (_, name) in &coords {
        b.vertex(name.clone());
    }
    for w in coords.windows(2) {
        b.edge(&w[0].1, &w[1].1, &w[1].0 - &w[0].0);
    }
    // Interval agents over coordinate ranges.
    let names_between = |lo: &Rational, hi: &Rational| -> Vec<String> {
        coords
            .iter()
            .filter(|(x, _)| x >= lo && x <= hi)
            .map(|(_, name)| name.clone())
            .collect()
    };
    let mut counts = AgentCounts::default();
    let add = |b: &mut InstanceBuilder, id: String, speed: &Rational, lo: &Rational, hi: &Rational| {
        b.agent(AgentSpec::new(id, speed.clone(), names_between(lo, hi)));
    };

    for i in 0..n {
        for j in 0..k {
            add(&mut b, format!("e[{},{}]", i + 1, j + 1), &v[j], &c[i][j][0], &o_prime[i][k - 2]);
            counts.element += 1;
        }
    }
    let divisible = total.is_multiple_of(k as u64);
    let helpers = if divisible { total - total / k as u64 } else { total - 1 };
    for j in 0..k {
        let (lo, hi) = (&c[0][j][0], &c_prime[n - 1][j][pl[n - 1] - 1]);
        for h in 0..helpers {
            add(&mut b, format!("h[{},{}]", j + 1, h + 1), &v_prime[j], lo, hi);
            counts.helper += 1;
        }
        for i in 0..n {
            for l in 0..pl[i] - 1 {
                add(
                    &mut b,
                    format!("pa[{},{},{}]", i + 1, j + 1, l + 1),
                    &v_star,
                    &c_prime[i][j][l],
                    &c[i][j][l + 1],
                );
                counts.partition += 1;
            }
        }
        for i in 0..n - 1 {
            add(
                &mut b,
                format!("pt[{},{}]", i + 1, j + 1),
                &v_star,
                &c_prime[i][j][pl[i] - 1],
                &c[i + 1][j][0],
            );
            counts.p_transition += 1;
        }
    }
    for i in 0..n {
        for j in 0..k.saturating_sub(2) {
            add(&mut b, format!("ot[{},{}]", i + 1, j + 1), &v_star, &o_prime[i][j], &o[i][j + 1]);
            counts.o_transition += 1;
        }
    }
    for j in 0..k - 1 {
        add(
            &mut b,
            format!("gt[P{},P{}]", j + 1, j + 2),
            &v_star,
            &c_prime[n - 1][j][pl[n - 1] - 1],
            &c[0][j + 1][0],
        );
        counts.g_transition += 1;
    }
    add(
        &mut b,
        format!("gt[P{},O{}]", k, n),
        &v_star,
        &c_prime[n - 1][k - 1][pl[n - 1] - 1],
        &o[n - 1][0],
    );
    counts.g_transition += 1;
    for i in (1..n).rev() {
        add(
            &mut b,
            format!("gt[O{},O{}]", i + 1, i),
            &v_star,
            &o_prime[i][k - 2],
            &o[i - 1][0],
        );
        counts.g_transition += 1;
    }

    let inst = b
        .build(&cname(false, 0, 0, 0), &oname(true, 0, k - 2))
        .expect("gadget construction is a valid path instance");
    let spec = GadgetSpec {
        p: p.to_vec(),
        k,
        a_n,
        total,
        v_prime,
        v,
        v_star,
        c,
        c_prime,
        o,
        o_prime,
        d: big(total).pow(3),
        no_instance_by_divisibility: !divisible,
        counts,
    };
    Ok((inst, spec))
}

/// `p_i' = p_i + P` with `k = m` for `3m` values.
pub fn three_to_kpartition(p: &[u64]) -> Result<(Vec<u64>, usize), GadgetError> {
    if p.is_empty() || !p.len().is_multiple_of(3) {
        return Err(GadgetError::NotTriples(p.len()));
    }
    let total: u64 = p.iter().sum();
    Ok((p.iter().map(|&x| x + total).collect(), p.len() / 3))
}

/// Exhaustive search for a split of `p` into `k` index sets of equal sum.
pub fn partition_into_k_checker(p: &[u64], k: usize) -> Option<Vec<Vec<usize>>> {
    if k == 0 {
        return None;
    }
    let total: u64 = p.iter().sum();
    if !total.is_multiple_of(k as u64) {
        return None;
    }
    let target = total / k as u64;
    let mut order: Vec<usize> = (0..p.len()).collect();
    order.sort_by(|&a, &b| p[b].cmp(&p[a]).then(a.cmp(&b)));
    let mut sums = vec![0u64; k];
    let mut sets = vec![Vec::new(); k];
    if place(p, &order, 0, target, &mut sums, &mut sets) {
        for s in &mut sets {
            s.sort_unstable();
        }
        Some(sets)
    } else {
        None
    }
}

fn place(p: &[u64], order: &[usize], at: usize, target: u64, sums: &mut [u64], sets: &mut [Vec<usize>]) -> bool {
    let Some(&x) = order.get(at) else {
        return sums.iter().all(|&s| s == target);
    };
    for j in 0..sums.len() {
        if sums[j] + p[x] > target {
            continue;
        }
        sums[j] += p[x];
        sets[j].push(x);
        if place(p, order, at + 1, target, sums, sets) {
            return true;
        }
        sets[j].pop();
        sums[j] -= p[x];
        // Empty sets are interchangeable.
        if sums[j] == 0 {
            break;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::int;

    #[test]
    fn speed_tower_for_small_instance() {
        let (inst, spec) = build_hardness_instance(&[3, 2, 1], 2, 1).unwrap();
        let want = [217i64, 46873, 10124569, 2186906905];
        assert_eq!(spec.v_prime[0], int(want[0]));
        assert_eq!(spec.v[0], int(want[1]));
        assert_eq!(spec.v_prime[1], int(want[2]));
        assert_eq!(spec.v[1], int(want[3]));
        assert_eq!(spec.v_star, int(472371891481));
        assert_eq!(spec.d, int(216));
        let c = &spec.counts;
        assert_eq!(
            (c.element, c.helper, c.partition, c.p_transition, c.o_transition, c.g_transition),
            (6, 6, 6, 4, 0, 4)
        );
        assert_eq!(inst.agent_count(), 26);
        assert!(inst.graph.is_path());
        assert!(!spec.no_instance_by_divisibility);
    }

    #[test]
    fn coordinates_follow_recurrences() {
        let (inst, spec) = build_hardness_instance(&[4, 2, 1], 3, 1).unwrap();
        assert_eq!(spec.c[0][0][0], int(0));
        assert_eq!(inst.graph.name(inst.source), "c[1,1,1]");
        assert_eq!(inst.graph.name(inst.target), "o'[1,2]");
        for i in 0..3 {
            for j in 0..3 {
                for l in 0..spec.c[i][j].len() {
                    assert_eq!(&spec.c_prime[i][j][l] - &spec.c[i][j][l], spec.v_prime[j]);
                    if l > 0 {
                        assert_eq!(&spec.c[i][j][l] - &spec.c_prime[i][j][l - 1], spec.v[j]);
                    }
                }
            }
            for j in 0..2 {
                assert_eq!(&spec.o_prime[i][j] - &spec.o[i][j], int(1));
            }
        }
        assert_eq!(spec.counts.o_transition, 3);
        assert!(spec.v_prime[0] < spec.v[0] && spec.v[2] < spec.v_star);
        // Edge lengths are the coordinate gaps, so s..t spans the whole line.
        let span: Rational = inst.graph.edges().iter().map(|e| e.len.clone()).sum();
        assert_eq!(span, spec.o_prime[0][1].clone());
    }

    #[test]
    fn indivisible_total_is_tagged() {
        let (inst, spec) = build_hardness_instance(&[2, 1], 2, 1).unwrap();
        assert!(spec.no_instance_by_divisibility);
        assert_eq!(spec.counts.helper, 2 * 2);
        assert_eq!(inst.agent_count(), spec.counts.total());
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(build_hardness_instance(&[1, 2], 2, 1).unwrap_err(), GadgetError::NotDecreasing);
        assert_eq!(build_hardness_instance(&[2, 2], 2, 1).unwrap_err(), GadgetError::NotDecreasing);
        assert_eq!(build_hardness_instance(&[2, 1], 1, 1).unwrap_err(), GadgetError::SmallK(1));
        assert!(three_to_kpartition(&[1, 2]).is_err());
    }

    #[test]
    fn kpartition_transform() {
        assert_eq!(
            three_to_kpartition(&[1, 2, 3, 4, 5, 6]).unwrap(),
            (vec![22, 23, 24, 25, 26, 27], 2)
        );
    }

    #[test]
    fn checker_examples() {
        assert_eq!(partition_into_k_checker(&[3, 2, 1], 2), Some(vec![vec![0], vec![1, 2]]));
        assert_eq!(partition_into_k_checker(&[5, 2, 1], 2), None);
        assert_eq!(partition_into_k_checker(&[22, 23, 24, 25, 26, 27], 2), None);
        assert_eq!(partition_into_k_checker(&[], 1), Some(vec![vec![]]));
    }
}
