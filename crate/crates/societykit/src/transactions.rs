//! Transactions: families of disjoint boundary-to-boundary paths in a
//! society, their crossing structure, and the extraction procedures that
//! refine a large transaction into a planar, crosscap, or crooked one.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::graph::{disjoint_paths, EdgeId, Graph, Linkage, Path, VertexId};
use crate::society::{Segment, Society, SocietyError};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TransactionError {
    #[error("linkage is not a transaction: {0}")]
    NotATransaction(String),
    #[error("path is not a boundary-to-boundary path: {0}")]
    NotABoundaryPath(String),
    #[error("transaction order {actual} is below the required {required}")]
    OrderTooSmall { required: usize, actual: usize },
    #[error("transaction too small to shrink")]
    TooSmall,
    #[error("transaction has a peripheral element")]
    NotCrooked,
    #[error("society error: {0}")]
    Society(#[from] SocietyError),
    #[error("witness search budget exceeded")]
    WitnessSearchBudgetExceeded,
    #[error("parameter p must be at least 4")]
    PTooSmall,
    #[error("linkage is not a handle transaction")]
    NotAHandle,
    #[error("a step guaranteed by the construction failed: {0}")]
    HypothesisViolated(String),
}

fn hyp(msg: impl Into<String>) -> TransactionError {
    TransactionError::HypothesisViolated(msg.into())
}

/// A linkage of boundary-to-boundary paths together with witness segments
/// `A`, `B`: disjoint, with every path having one endpoint in each.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transaction {
    linkage: Linkage,
    a: Segment,
    b: Segment,
}

impl Transaction {
    /// Validates the linkage against the society and finds witness segments.
    pub fn new(society: &Society, linkage: Linkage) -> Result<Self, TransactionError> {
        for p in linkage.paths() {
            check_omega_path(society, p)?;
        }
        let (a, b) = find_witness_segments(society, &linkage).ok_or_else(|| {
            TransactionError::NotATransaction(
                "no pair of disjoint witness segments splits the endpoints".into(),
            )
        })?;
        Ok(Transaction { linkage, a, b })
    }

    pub fn order(&self) -> usize {
        self.linkage.order()
    }

    pub fn paths(&self) -> &[Path] {
        self.linkage.paths()
    }

    pub fn linkage(&self) -> &Linkage {
        &self.linkage
    }

    pub fn witness_a(&self) -> &Segment {
        &self.a
    }

    pub fn witness_b(&self) -> &Segment {
        &self.b
    }

    /// Paths with endpoints ordered (A-endpoint, B-endpoint).
    pub fn oriented_endpoints(&self) -> Vec<(VertexId, VertexId)> {
        self.linkage
            .paths()
            .iter()
            .map(|p| {
                if self.a.contains(p.first()) {
                    (p.first(), p.last())
                } else {
                    (p.last(), p.first())
                }
            })
            .collect()
    }

    /// Sub-transaction on the given path indices (re-derives witnesses).
    pub fn subset(&self, society: &Society, keep: &[usize]) -> Result<Self, TransactionError> {
        let paths: Vec<Path> = keep.iter().map(|&i| self.paths()[i].clone()).collect();
        let linkage = Linkage::new(paths).expect("subset of a linkage is a linkage");
        Transaction::new(society, linkage)
    }
}

/// A path of length ≥ 1 with both endpoints on the boundary and no internal
/// boundary vertex.
pub fn check_omega_path(society: &Society, p: &Path) -> Result<(), TransactionError> {
    if p.is_trivial() {
        return Err(TransactionError::NotABoundaryPath(
            "length-zero path".into(),
        ));
    }
    if !society.omega_contains(p.first()) || !society.omega_contains(p.last()) {
        return Err(TransactionError::NotABoundaryPath(format!(
            "endpoints {} and {} must lie on the boundary",
            p.first(),
            p.last()
        )));
    }
    for &v in &p.vertices()[1..p.vertices().len() - 1] {
        if society.omega_contains(v) {
            return Err(TransactionError::NotABoundaryPath(format!(
                "internal vertex {v} lies on the boundary"
            )));
        }
    }
    Ok(())
}

/// Witness segments for a linkage of boundary paths: disjoint segments A, B
/// such that every path has one endpoint in each, trimmed to the endpoints
/// they cover.  Deterministic: first admissible split in boundary order.
fn find_witness_segments(society: &Society, linkage: &Linkage) -> Option<(Segment, Segment)> {
    if linkage.order() == 0 {
        return Some((society.empty_segment(), society.empty_segment()));
    }
    let omega = society.omega();
    let n = omega.len();
    // endpoint positions per path
    let mut pairs = Vec::new();
    for p in linkage.paths() {
        let i = society.position(p.first()).ok()?;
        let j = society.position(p.last()).ok()?;
        pairs.push((i, j));
    }
    // candidate arc A = positions s..=e (cyclically); B = complement
    let positions: BTreeSet<usize> = pairs.iter().flat_map(|&(i, j)| [i, j]).collect();
    let pos_list: Vec<usize> = positions.iter().copied().collect();
    let in_arc = |s: usize, e: usize, x: usize| -> bool {
        // is x in the cyclic interval [s, e]?
        if s <= e {
            (s..=e).contains(&x)
        } else {
            x >= s || x <= e
        }
    };
    for &s in &pos_list {
        for &e in &pos_list {
            let ok = pairs
                .iter()
                .all(|&(i, j)| in_arc(s, e, i) != in_arc(s, e, j));
            if !ok {
                continue;
            }
            // trim each side to the extreme endpoint positions it covers
            let a = society.segment_between(omega[s], omega[e]).ok()?;
            let b_positions: Vec<usize> = {
                let mut v: Vec<usize> = positions
                    .iter()
                    .copied()
                    .filter(|&x| !in_arc(s, e, x))
                    .collect();
                // order cyclically starting after e
                v.sort_by_key(|&x| (x + n - (e + 1) % n) % n);
                v
            };
            let b = society
                .segment_between(omega[b_positions[0]], omega[*b_positions.last().unwrap()])
                .ok()?;
            if a.is_disjoint(&b) {
                return Some((a, b));
            }
        }
    }
    None
}

/// Do two vertex-disjoint boundary paths cross (endpoints interleave)?
pub fn paths_cross(society: &Society, p: &Path, q: &Path) -> bool {
    let (p1, p2) = (p.first(), p.last());
    let (q1, q2) = (q.first(), q.last());
    society.in_cyclic_order(&[p1, q1, p2, q2]) || society.in_cyclic_order(&[p1, q2, p2, q1])
}

/// Symmetric, irreflexive crossing flags for every unordered path pair.
pub fn crossing_matrix(society: &Society, linkage: &Linkage) -> Vec<Vec<bool>> {
    let ps = linkage.paths();
    let n = ps.len();
    let mut m = vec![vec![false; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let c = paths_cross(society, &ps[i], &ps[j]);
            m[i][j] = c;
            m[j][i] = c;
        }
    }
    m
}

/// Indices of peripheral members: paths whose endpoints are spanned by a
/// segment containing no endpoint of any other member.
pub fn peripheral_elements(society: &Society, t: &Transaction) -> Vec<usize> {
    let ps = t.paths();
    let mut out = Vec::new();
    for (i, p) in ps.iter().enumerate() {
        let others: BTreeSet<VertexId> = ps
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .flat_map(|(_, q)| [q.first(), q.last()])
            .collect();
        if arc_interior_clear(society, p.first(), p.last(), &others)
            || arc_interior_clear(society, p.last(), p.first(), &others)
        {
            out.push(i);
        }
    }
    out
}

/// Does the boundary arc from `x` forward to `y` contain no vertex of
/// `blocked` strictly between them?
fn arc_interior_clear(
    society: &Society,
    x: VertexId,
    y: VertexId,
    blocked: &BTreeSet<VertexId>,
) -> bool {
    let seg = society
        .segment_between(x, y)
        .expect("endpoints on the boundary");
    let vs = seg.vertices();
    vs[1..vs.len().saturating_sub(1)]
        .iter()
        .all(|v| !blocked.contains(v))
}

pub fn is_crooked(society: &Society, t: &Transaction) -> bool {
    t.order() >= 1 && peripheral_elements(society, t).is_empty()
}

/// No two members cross.
pub fn is_planar_transaction(society: &Society, t: &Transaction) -> bool {
    let ps = t.paths();
    for i in 0..ps.len() {
        for j in (i + 1)..ps.len() {
            if paths_cross(society, &ps[i], &ps[j]) {
                return false;
            }
        }
    }
    true
}

/// Is the transaction a crosscap transaction (pairwise crossing, endpoints
/// in the pattern u₁..uₙ v₁..vₙ)?
pub fn is_crosscap_transaction(society: &Society, t: &Transaction) -> bool {
    let ps = t.paths();
    if ps.is_empty() {
        return false;
    }
    ps.iter().enumerate().all(|(i, p)| {
        ps.iter()
            .enumerate()
            .all(|(j, q)| i == j || paths_cross(society, p, q))
    })
}

/// Maximum transaction order with a witness (`None` when the maximum is 0).
///
/// Computed as the maximum over complementary boundary splits of the
/// disjoint-path count between the two sides, with all boundary vertices
/// forbidden as internal path vertices.
pub fn depth(society: &Society) -> (usize, Option<Transaction>) {
    let omega = society.omega();
    let n = omega.len();
    if n < 2 {
        return (0, None);
    }
    let all_omega = society.omega_set();
    let mut best: Option<Linkage> = None;
    let mut best_order = 0usize;
    for s in 0..n {
        for len in 1..n {
            let a: BTreeSet<VertexId> = (0..len).map(|k| omega[(s + k) % n]).collect();
            let b: BTreeSet<VertexId> = all_omega.difference(&a).copied().collect();
            if b.is_empty() {
                continue;
            }
            let (linkage, _) = disjoint_paths(society.graph(), &a, &b, &all_omega);
            if linkage.order() > best_order {
                best_order = linkage.order();
                best = Some(linkage);
            }
        }
    }
    match best {
        None => (0, None),
        Some(l) if l.order() == 0 => (0, None),
        Some(l) => {
            let t = Transaction::new(society, l)
                .expect("a split linkage is a transaction");
            (best_order, Some(t))
        }
    }
}

#[derive(Clone, Debug)]
pub enum PlanarOrCrooked {
    Planar(Transaction),
    Crooked(Transaction),
}

/// Refines a transaction of order ≥ p+q−2 into a planar transaction of
/// order p or a crooked transaction of order ≥ q (trimmed toward q when a
/// crooked sub-transaction of that order exists).
pub fn planar_or_crooked(
    society: &Society,
    t: &Transaction,
    p: usize,
    q: usize,
) -> Result<PlanarOrCrooked, TransactionError> {
    assert!(p >= 1 && q >= 2, "parameter preconditions");
    if t.order() < p + q - 2 {
        return Err(TransactionError::OrderTooSmall {
            required: p + q - 2,
            actual: t.order(),
        });
    }
    let mut stripped: Vec<usize> = Vec::new(); // indices into t.paths()
    let mut current: Vec<usize> = (0..t.order()).collect();
    let mut p_left = p;
    loop {
        if p_left == 1 {
            // planar result: the deterministically-first remaining element
            // plus everything stripped on the way down
            let mut keep = vec![current[0]];
            keep.extend(stripped.iter().copied());
            keep.sort_unstable();
            let result = t.subset(society, &keep)?;
            debug_assert!(is_planar_transaction(society, &result));
            debug_assert_eq!(result.order(), p);
            return Ok(PlanarOrCrooked::Planar(result));
        }
        let sub = t.subset(society, &current)?;
        if is_crooked(society, &sub) {
            let trimmed = trim_crooked(society, sub, q)?;
            debug_assert!(is_crooked(society, &trimmed));
            debug_assert!(trimmed.order() >= q);
            return Ok(PlanarOrCrooked::Crooked(trimmed));
        }
        // strip a peripheral element: a peripheral path crosses nothing, so
        // it stays planar-compatible with whatever the recursion returns
        let peripheral = peripheral_elements(society, &sub);
        let strip_local = *peripheral.first().expect("non-crooked has a peripheral");
        stripped.push(current[strip_local]);
        current.remove(strip_local);
        p_left -= 1;
    }
}

/// Shrinks a crooked transaction toward order `q` by repeated single-element
/// deletions (guaranteed while the order is ≥ 5); below order 5 a direct
/// subset search is tried, and a slightly larger crooked transaction may be
/// returned when no exact-order one exists.
fn trim_crooked(
    society: &Society,
    mut t: Transaction,
    q: usize,
) -> Result<Transaction, TransactionError> {
    while t.order() > q && t.order() >= 5 {
        t = shrink_crooked(society, &t)?;
    }
    if t.order() > q {
        // order ≤ 4 here; exhaustive subset search for an exact-order match
        let n = t.order();
        let indices: Vec<usize> = (0..n).collect();
        for combo in combinations(&indices, q) {
            let sub = t.subset(society, &combo)?;
            if is_crooked(society, &sub) {
                return Ok(sub);
            }
        }
    }
    Ok(t)
}

fn combinations(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if items.len() < k {
        return Vec::new();
    }
    let mut out = Vec::new();
    for (i, &x) in items.iter().enumerate() {
        for mut rest in combinations(&items[i + 1..], k - 1) {
            rest.insert(0, x);
            out.push(rest);
        }
    }
    out
}

/// Deletes one element from a crooked transaction of order ≥ 5 so that the
/// rest stays crooked.
pub fn shrink_crooked(
    society: &Society,
    t: &Transaction,
) -> Result<Transaction, TransactionError> {
    if t.order() <= 4 {
        return Err(TransactionError::TooSmall);
    }
    if !is_crooked(society, t) {
        return Err(TransactionError::NotCrooked);
    }
    for drop in 0..t.order() {
        let keep: Vec<usize> = (0..t.order()).filter(|&i| i != drop).collect();
        let sub = t.subset(society, &keep)?;
        if is_crooked(society, &sub) {
            return Ok(sub);
        }
    }
    unreachable!("a crooked transaction of order at least five always shrinks");
}

#[derive(Clone, Debug)]
pub enum MonotoneOutcome {
    Crosscap(Transaction),
    Planar(Transaction),
}

/// Erdős–Szekeres split: a transaction of order ≥ (s−1)(t−1)+1 contains a
/// crosscap transaction of order s or a planar transaction of order t,
/// found on the endpoint permutation between the two witness segments.
pub fn extract_monotone(
    society: &Society,
    t: &Transaction,
    s: usize,
    tt: usize,
) -> Result<MonotoneOutcome, TransactionError> {
    assert!(s >= 1 && tt >= 1);
    if t.order() < (s - 1) * (tt - 1) + 1 {
        return Err(TransactionError::OrderTooSmall {
            required: (s - 1) * (tt - 1) + 1,
            actual: t.order(),
        });
    }
    // order paths by A-endpoint along the boundary; rank B-endpoints likewise
    let oriented = t.oriented_endpoints();
    let mut order: Vec<usize> = (0..oriented.len()).collect();
    let apos = |i: usize| society.position(oriented[i].0).unwrap();
    let bpos = |i: usize| society.position(oriented[i].1).unwrap();
    // linearize positions within each witness arc
    let a_start = society.position(*t.witness_a().vertices().first().unwrap()).unwrap();
    let b_start = society.position(*t.witness_b().vertices().first().unwrap()).unwrap();
    let n = society.omega_len();
    let lin = |p: usize, start: usize| (p + n - start) % n;
    order.sort_by_key(|&i| lin(apos(i), a_start));
    let seq: Vec<usize> = order.iter().map(|&i| lin(bpos(i), b_start)).collect();
    // two chords with A-ends in arc order cross exactly when their B-ends
    // appear in the same direction, so an increasing run is pairwise
    // crossing and a decreasing run is pairwise non-crossing
    let lis = longest_monotone(&seq, true);
    if lis.len() >= s {
        let keep: Vec<usize> = lis[..s].iter().map(|&k| order[k]).collect();
        let sub = t.subset(society, &sorted(keep))?;
        debug_assert!(is_crosscap_transaction(society, &sub));
        return Ok(MonotoneOutcome::Crosscap(sub));
    }
    let lds = longest_monotone(&seq, false);
    assert!(
        lds.len() >= tt,
        "Erdős–Szekeres guarantees one of the two runs"
    );
    let keep: Vec<usize> = lds[..tt].iter().map(|&k| order[k]).collect();
    let sub = t.subset(society, &sorted(keep))?;
    debug_assert!(is_planar_transaction(society, &sub));
    Ok(MonotoneOutcome::Planar(sub))
}

fn sorted(mut v: Vec<usize>) -> Vec<usize> {
    v.sort_unstable();
    v
}

/// Longest strictly increasing (or decreasing) subsequence, as indices;
/// deterministic (lexicographically first among the longest).
fn longest_monotone(seq: &[usize], increasing: bool) -> Vec<usize> {
    let n = seq.len();
    if n == 0 {
        return Vec::new();
    }
    let cmp = |a: usize, b: usize| if increasing { a < b } else { a > b };
    let mut len = vec![1usize; n]; // best length ending at i
    let mut prev = vec![usize::MAX; n];
    for i in 0..n {
        for j in 0..i {
            if cmp(seq[j], seq[i]) && len[j] + 1 > len[i] {
                len[i] = len[j] + 1;
                prev[i] = j;
            }
        }
    }
    let best_end = (0..n).max_by_key(|&i| (len[i], usize::MAX - i)).unwrap();
    let mut out = Vec::new();
    let mut cur = best_end;
    loop {
        out.push(cur);
        if prev[cur] == usize::MAX {
            break;
        }
        cur = prev[cur];
    }
    out.reverse();
    out
}

/// A labeling of a transaction of order 2k as nested crosses: pairs
/// (P_i, Q_i) such that same-pair elements cross and cross-pair elements do
/// not (the twisted variant swaps both conditions).  Returns the pair list
/// or `None`.
pub fn nested_crosses_check(
    society: &Society,
    t: &Transaction,
    k: usize,
    twisted: bool,
) -> Option<Vec<(usize, usize)>> {
    if t.order() != 2 * k || k == 0 {
        return None;
    }
    let m = crossing_matrix(society, t.linkage());
    let n = 2 * k;
    // same-pair elements must relate one way, cross-pair the other; so the
    // required relation graph must be a perfect matching
    let want_same_pair = !twisted; // nested: cross within a pair
    let mut partner = vec![usize::MAX; n];
    for i in 0..n {
        let mates: Vec<usize> = (0..n)
            .filter(|&j| j != i && m[i][j] == want_same_pair)
            .collect();
        if mates.len() != 1 {
            return None;
        }
        partner[i] = mates[0];
    }
    let mut pairs = Vec::new();
    for i in 0..n {
        if partner[partner[i]] != i {
            return None;
        }
        if i < partner[i] {
            pairs.push((i, partner[i]));
        }
    }
    debug_assert_eq!(pairs.len(), k);
    Some(pairs)
}

/// Two disjoint boundary paths whose endpoints interleave.
#[derive(Clone, Debug)]
pub struct Cross {
    pub p: Path,
    pub q: Path,
}

#[derive(Clone, Debug)]
pub enum CrossResult {
    /// The society is crossless (equivalently, it fits in a disk).
    NoCross,
    /// A verified witness pair.
    Found(Cross),
    /// A cross exists, but the witness search ran out of budget.
    ExistsWitnessBudgetExceeded,
}

pub const DEFAULT_WITNESS_BUDGET: u64 = 1_000_000;

/// Decides cross existence via the disk-rendition construction, then
/// extracts a witness by a budgeted two-disjoint-paths search over
/// interleaved endpoint 4-tuples.
pub fn find_cross(society: &Society, budget: u64) -> CrossResult {
    if crate::renditions::rural_rendition(society).is_some() {
        return CrossResult::NoCross;
    }
    let omega = society.omega();
    let n = omega.len();
    let mut remaining = budget;
    for i in 0..n {
        for j in (i + 1)..n {
            for k in (j + 1)..n {
                for l in (k + 1)..n {
                    if let Some(cross) = witness_for_tuple(
                        society,
                        (omega[i], omega[j], omega[k], omega[l]),
                        &mut remaining,
                    ) {
                        return CrossResult::Found(cross);
                    }
                    if remaining == 0 {
                        return CrossResult::ExistsWitnessBudgetExceeded;
                    }
                }
            }
        }
    }
    // the rendition construction said "cross", so exhausting all tuples
    // without a witness would contradict it
    unreachable!("decision and witness search disagree on cross existence")
}

/// Searches for disjoint boundary paths a–c and b–d, counting every node
/// expansion against the budget.
fn witness_for_tuple(
    society: &Society,
    (a, b, c, d): (VertexId, VertexId, VertexId, VertexId),
    remaining: &mut u64,
) -> Option<Cross> {
    let g = society.graph();
    // enumerate simple a–c paths internally avoiding the boundary, and for
    // each check for a disjoint b–d path by BFS
    let mut stack: Vec<(Vec<VertexId>, Vec<crate::graph::EdgeId>)> =
        vec![(vec![a], Vec::new())];
    while let Some((vs, es)) = stack.pop() {
        if *remaining == 0 {
            return None;
        }
        *remaining -= 1;
        let last = *vs.last().unwrap();
        for &(e, w) in g.incident(last) {
            if vs.contains(&w) || es.contains(&e) {
                continue;
            }
            if w == c {
                let mut vs2 = vs.clone();
                vs2.push(w);
                let mut es2 = es.clone();
                es2.push(e);
                let p = Path::new(g, vs2, es2).expect("walk is a path");
                let used = p.vertex_set();
                let from = [b].into_iter().collect();
                let to = [d].into_iter().collect();
                if let Some(q) = g.shortest_path(&from, &to, |v| {
                    !used.contains(&v) && (v == b || v == d || !society.omega_contains(v))
                }) {
                    if !q.is_trivial() {
                        return Some(Cross { p, q });
                    }
                }
            } else if !society.omega_contains(w) {
                let mut vs2 = vs.clone();
                vs2.push(w);
                let mut es2 = es.clone();
                es2.push(e);
                stack.push((vs2, es2));
            }
        }
    }
    None
}

// ---------------------------------------------------------------------------
// Handle transactions
// ---------------------------------------------------------------------------

/// Element indices in label order paired with their oriented endpoints
/// (u_i, v_i).
pub type HandleLabeling = (Vec<usize>, Vec<(VertexId, VertexId)>);

/// A labeling of a transaction of order 2n as a handle of thickness n:
/// elements P₁..P₂ₙ with endpoints (u_i, v_i) such that the boundary order
/// is u₁,…,u₂ₙ, vₙ,…,v₁, v₂ₙ,…,vₙ₊₁.  Returns the element indices in label
/// order together with their oriented endpoints, or `None`.  The pattern is
/// matched up to rotation and reflection of the boundary.
pub fn handle_labeling(society: &Society, t: &Transaction) -> Option<HandleLabeling> {
    let m = t.order();
    if m == 0 {
        return Some((Vec::new(), Vec::new()));
    }
    if !m.is_multiple_of(2) {
        return None;
    }
    let n = m / 2;
    let mut slots: Vec<(usize, usize, VertexId)> = Vec::new();
    for (i, p) in t.paths().iter().enumerate() {
        for v in [p.first(), p.last()] {
            slots.push((society.position(v).ok()?, i, v));
        }
    }
    slots.sort_unstable();
    let forward: Vec<(usize, VertexId)> = slots.iter().map(|&(_, i, v)| (i, v)).collect();
    let mut backward = forward.clone();
    backward.reverse();
    for seq in [&forward, &backward] {
        for r in 0..(4 * n) {
            if let Some(out) = try_handle_rotation(t, seq, r, n) {
                return Some(out);
            }
        }
    }
    None
}

/// Matches the handle pattern with the u-block starting at slot `r`.
fn try_handle_rotation(
    t: &Transaction,
    seq: &[(usize, VertexId)],
    r: usize,
    n: usize,
) -> Option<HandleLabeling> {
    let total = 4 * n;
    let slot = |j: usize| seq[(r + j) % total];
    let mut order = Vec::with_capacity(2 * n);
    let mut ends = Vec::with_capacity(2 * n);
    let mut seen = BTreeSet::new();
    for j in 0..2 * n {
        let (path, u) = slot(j);
        if !seen.insert(path) {
            return None;
        }
        let p = &t.paths()[path];
        let v = if p.first() == u { p.last() } else { p.first() };
        order.push(path);
        ends.push((u, v));
    }
    for i in 0..n {
        if slot(2 * n + i) != (order[n - 1 - i], ends[n - 1 - i].1) {
            return None;
        }
        if slot(3 * n + i) != (order[2 * n - 1 - i], ends[2 * n - 1 - i].1) {
            return None;
        }
    }
    Some((order, ends))
}

pub fn is_handle_transaction(society: &Society, t: &Transaction) -> bool {
    t.order() >= 2 && t.order().is_multiple_of(2) && handle_labeling(society, t).is_some()
}

/// Is `t` a handle of thickness k whose endpoint pattern
/// s₁,…,s₂ₖ, tₖ,…,t₁, t₂ₖ,…,tₖ₊₁ appears in the *linear* order of the
/// segment `x` (in either direction)?
pub fn is_consistent_handle(x: &Segment, t: &Transaction) -> bool {
    let m = t.order();
    if m == 0 {
        return true;
    }
    if !m.is_multiple_of(2) {
        return false;
    }
    let k = m / 2;
    let xpos: BTreeMap<VertexId, usize> = x
        .vertices()
        .iter()
        .enumerate()
        .map(|(i, &v)| (v, i))
        .collect();
    let mut slots: Vec<(usize, usize, VertexId)> = Vec::new();
    for (i, p) in t.paths().iter().enumerate() {
        for v in [p.first(), p.last()] {
            let Some(&pos) = xpos.get(&v) else {
                return false;
            };
            slots.push((pos, i, v));
        }
    }
    slots.sort_unstable();
    let forward: Vec<(usize, VertexId)> = slots.iter().map(|&(_, i, v)| (i, v)).collect();
    let mut backward = forward.clone();
    backward.reverse();
    try_handle_rotation(t, &forward, 0, k).is_some()
        || try_handle_rotation(t, &backward, 0, k).is_some()
}

/// Extracts from a handle transaction of thickness 2k, all of whose
/// endpoints lie in the segment `x`, a sub-transaction that is a handle of
/// thickness k consistent with `x`: the second constituent's endpoints span
/// a minimal interval of `x`, at least half of the first constituent exits
/// that interval on one side, and those elements together with k elements of
/// the second constituent form the consistent handle.
pub fn consistent_handle(
    society: &Society,
    x: &Segment,
    h: &Transaction,
) -> Result<Transaction, TransactionError> {
    if h.order() == 0 {
        return h.subset(society, &[]);
    }
    if !h.order().is_multiple_of(4) {
        return Err(TransactionError::NotAHandle);
    }
    let (order, ends) =
        handle_labeling(society, h).ok_or(TransactionError::NotAHandle)?;
    let xpos: BTreeMap<VertexId, usize> = x
        .vertices()
        .iter()
        .enumerate()
        .map(|(i, &v)| (v, i))
        .collect();
    for &(u, v) in &ends {
        if !xpos.contains_key(&u) || !xpos.contains_key(&v) {
            return Err(TransactionError::NotAHandle);
        }
    }
    let n = h.order() / 2;
    let k = n / 2;
    let span = |c: &[usize]| -> (usize, usize) {
        let ps = c
            .iter()
            .flat_map(|&i| [xpos[&ends[i].0], xpos[&ends[i].1]]);
        let lo = ps.clone().min().unwrap();
        let hi = ps.max().unwrap();
        (lo, hi)
    };
    let c1: Vec<usize> = (0..n).collect();
    let c2: Vec<usize> = (n..2 * n).collect();
    // the constituent encountered first along x plays the outer role
    let (p1, p2) = if span(&c1).0 <= span(&c2).0 {
        (c1, c2)
    } else {
        (c2, c1)
    };
    let (y2_lo, y2_hi) = span(&p2);
    let mut left: Vec<(usize, usize)> = Vec::new();
    let mut right: Vec<(usize, usize)> = Vec::new();
    for &i in &p1 {
        let (pu, pv) = (xpos[&ends[i].0], xpos[&ends[i].1]);
        let inside = |p: usize| (y2_lo..=y2_hi).contains(&p);
        let out = match (inside(pu), inside(pv)) {
            (true, false) => pv,
            (false, true) => pu,
            _ => {
                return Err(hyp(
                    "a first-constituent element does not exit the second \
                     constituent's span exactly once",
                ))
            }
        };
        if out < y2_lo {
            left.push((out, i));
        } else {
            right.push((out, i));
        }
    }
    let side = if left.len() >= right.len() {
        &mut left
    } else {
        &mut right
    };
    if side.len() < k {
        return Err(hyp(
            "neither side of the span holds half of the first constituent",
        ));
    }
    side.sort_unstable();
    let chosen1: Vec<usize> = side.iter().take(k).map(|&(_, i)| i).collect();
    // complete with k elements of the inner constituent; verify, falling back
    // to an exhaustive subset search
    let p2_local: Vec<usize> = (0..p2.len()).collect();
    for combo in combinations(&p2_local, k) {
        let mut keep: Vec<usize> = chosen1.iter().map(|&i| order[i]).collect();
        keep.extend(combo.iter().map(|&j| order[p2[j]]));
        keep.sort_unstable();
        let sub = h.subset(society, &keep)?;
        if is_consistent_handle(x, &sub) {
            return Ok(sub);
        }
    }
    Err(hyp(
        "no completion of the majority side is consistent with the segment",
    ))
}

// ---------------------------------------------------------------------------
// The strong Erdős–Szekeres dichotomy
// ---------------------------------------------------------------------------

/// Parameters for [`strong_es`].  The required transaction order is
/// `(k+2q)·l·(k*+2q*)·l*·max(s,s*)`.
#[derive(Clone, Copy, Debug)]
pub struct StrongEsParams {
    pub k: usize,
    pub l: usize,
    pub k_star: usize,
    pub l_star: usize,
    pub q: usize,
    pub q_star: usize,
    pub s: usize,
    pub s_star: usize,
}

impl StrongEsParams {
    pub fn required_order(&self) -> usize {
        (self.k + 2 * self.q)
            * self.l
            * (self.k_star + 2 * self.q_star)
            * self.l_star
            * self.s.max(self.s_star)
    }
}

/// Certificates produced by [`strong_es`].  The `*Flipped` variants hold in
/// the society obtained by reversing the first segment (see
/// [`Society::flip`]); their transactions and linkages are stated relative
/// to that flipped society.
#[derive(Clone, Debug)]
pub enum StrongEsOutcome {
    /// A (k, l)-leap pattern: a planar transaction `p` plus the linkage `q`.
    Leap { p: Linkage, q: Linkage },
    LeapFlipped { p: Linkage, q: Linkage },
    /// q nested crosses: order 2q, elements cross exactly within a pair.
    NestedCrosses(Transaction),
    NestedCrossesFlipped(Transaction),
    /// A planar transaction of order s.
    Planar(Transaction),
    PlanarFlipped(Transaction),
}

/// The strong Erdős–Szekeres dichotomy for a transaction running between two
/// disjoint segments: a large transaction contains a leap pattern, nested
/// crosses, or a planar transaction — in the society itself or in the
/// society with the first segment reversed.
///
/// Requires `k, k*, q, q*, s, s* ≥ 1` and `l, l* ≥ 2`.
pub fn strong_es(
    society: &Society,
    t: &Transaction,
    x1: &Segment,
    x2: &Segment,
    params: StrongEsParams,
) -> Result<StrongEsOutcome, TransactionError> {
    assert!(
        params.k >= 1 && params.k_star >= 1 && params.q >= 1 && params.q_star >= 1,
        "pattern sizes must be positive"
    );
    assert!(params.l >= 2 && params.l_star >= 2, "leap lengths must be at least 2");
    assert!(params.s >= 1 && params.s_star >= 1, "planar orders must be positive");
    if t.order() < params.required_order() {
        return Err(TransactionError::OrderTooSmall {
            required: params.required_order(),
            actual: t.order(),
        });
    }
    for p in t.paths() {
        let ok = (x1.contains(p.first()) && x2.contains(p.last()))
            || (x1.contains(p.last()) && x2.contains(p.first()));
        if !ok {
            return Err(TransactionError::NotATransaction(
                "an element does not run between the two segments".into(),
            ));
        }
    }
    let m = crossing_matrix(society, t.linkage());
    let nelem = t.order();
    // i ≡ j when every third element crosses both or neither
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for i in 0..nelem {
        let found = classes.iter().position(|c| {
            let r = c[0];
            (0..nelem).all(|h| h == i || h == r || m[i][h] == m[r][h])
        });
        match found {
            Some(ci) => classes[ci].push(i),
            None => classes.push(vec![i]),
        }
    }
    // a large class is pairwise crossing or pairwise non-crossing, so it is
    // planar here or in the flipped society
    for c in &classes {
        let all_cross = c
            .iter()
            .enumerate()
            .all(|(a, &i)| c[a + 1..].iter().all(|&j| m[i][j]));
        let all_non = c
            .iter()
            .enumerate()
            .all(|(a, &i)| c[a + 1..].iter().all(|&j| !m[i][j]));
        if all_non && c.len() >= params.s {
            let sub = t.subset(society, &c[..params.s])?;
            if is_planar_transaction(society, &sub) {
                return Ok(StrongEsOutcome::Planar(sub));
            }
        }
        if all_cross && c.len() >= params.s_star {
            let flipped = society.flip(x1)?;
            let link = Linkage::new(
                c[..params.s_star]
                    .iter()
                    .map(|&i| t.paths()[i].clone())
                    .collect(),
            )
            .map_err(|e| TransactionError::NotATransaction(e.to_string()))?;
            let sub = Transaction::new(&flipped, link)?;
            if is_planar_transaction(&flipped, &sub) {
                return Ok(StrongEsOutcome::PlanarFlipped(sub));
            }
        }
    }
    // pairwise non-equivalent representatives
    let reps: Vec<usize> = classes.iter().map(|c| c[0]).collect();
    let sub = t.subset(society, &sorted(reps))?;
    let cc_order = (params.k_star + 2 * params.q_star) * params.l_star;
    let pl_order = (params.k + 2 * params.q) * params.l;
    if sub.order() < (cc_order - 1) * (pl_order - 1) + 1 {
        return Err(hyp("too few equivalence classes for the monotone split"));
    }
    let idx_of = |path: &Path| {
        t.paths()
            .iter()
            .position(|p| p == path)
            .expect("member of the input transaction")
    };
    match extract_monotone(society, &sub, cc_order, pl_order)? {
        MonotoneOutcome::Planar(p3) => {
            let idx: Vec<usize> = p3.paths().iter().map(idx_of).collect();
            let x1set = x1.vertex_set();
            let x1pos: BTreeMap<VertexId, usize> = x1
                .vertices()
                .iter()
                .enumerate()
                .map(|(i, &v)| (v, i))
                .collect();
            match planar_side(society, t, &idx, &x1set, &x1pos, params.k, params.l, params.q)? {
                SideOutcome::Leap { p, q } => Ok(StrongEsOutcome::Leap { p, q }),
                SideOutcome::Nested(n) => Ok(StrongEsOutcome::NestedCrosses(n)),
            }
        }
        MonotoneOutcome::Crosscap(cc) => {
            let flipped = society.flip(x1)?;
            let t_flip = Transaction::new(&flipped, t.linkage().clone())?;
            let idx: Vec<usize> = cc.paths().iter().map(idx_of).collect();
            let x1set = x1.vertex_set();
            let x1_flip = flipped.as_segment(&x1set)?;
            let x1pos: BTreeMap<VertexId, usize> = x1_flip
                .vertices()
                .iter()
                .enumerate()
                .map(|(i, &v)| (v, i))
                .collect();
            match planar_side(
                &flipped,
                &t_flip,
                &idx,
                &x1set,
                &x1pos,
                params.k_star,
                params.l_star,
                params.q_star,
            )? {
                SideOutcome::Leap { p, q } => Ok(StrongEsOutcome::LeapFlipped { p, q }),
                SideOutcome::Nested(n) => Ok(StrongEsOutcome::NestedCrossesFlipped(n)),
            }
        }
    }
}

enum SideOutcome {
    Leap { p: Linkage, q: Linkage },
    Nested(Transaction),
}

/// The case analysis over a planar family of order (2q+k)·l inside a larger
/// transaction: for every consecutive pair at distance l some element crosses
/// exactly one of the two; k long crossers give a leap pattern, q short
/// crossers on the same side give q nested crosses.
#[allow(clippy::too_many_arguments)]
fn planar_side(
    society: &Society,
    t: &Transaction,
    p3: &[usize],
    x1set: &BTreeSet<VertexId>,
    x1pos: &BTreeMap<VertexId, usize>,
    k: usize,
    l: usize,
    q: usize,
) -> Result<SideOutcome, TransactionError> {
    let m = crossing_matrix(society, t.linkage());
    let ends: Vec<(VertexId, VertexId)> = t
        .paths()
        .iter()
        .map(|p| {
            if x1set.contains(&p.first()) {
                (p.first(), p.last())
            } else {
                (p.last(), p.first())
            }
        })
        .collect();
    let mut p3s: Vec<usize> = p3.to_vec();
    p3s.sort_by_key(|&i| x1pos[&ends[i].0]);
    let p3set: BTreeSet<usize> = p3s.iter().copied().collect();
    debug_assert_eq!(p3s.len(), (2 * q + k) * l);
    let mut chosen: Vec<(usize, bool)> = Vec::new(); // (element, crosses right member)
    let mut used: BTreeSet<usize> = BTreeSet::new();
    for a in 0..(2 * q + k) {
        let i = p3s[a * l];
        let j = p3s[a * l + 1];
        let h = (0..t.order()).find(|&h| {
            h != i && h != j && !p3set.contains(&h) && !used.contains(&h) && m[h][i] != m[h][j]
        });
        let Some(h) = h else {
            return Err(hyp("no distinguishing element for a consecutive pair"));
        };
        used.insert(h);
        chosen.push((h, m[h][j]));
    }
    let cross_count = |h: usize| p3s.iter().filter(|&&x| m[h][x]).count();
    let mut longs: Vec<usize> = Vec::new();
    let mut short_right: Vec<(usize, usize)> = Vec::new();
    let mut short_left: Vec<(usize, usize)> = Vec::new();
    for (a, &(h, crosses_right)) in chosen.iter().enumerate() {
        if cross_count(h) >= l {
            longs.push(h);
        } else if crosses_right {
            short_right.push((h, p3s[a * l + 1]));
        } else {
            short_left.push((h, p3s[a * l]));
        }
    }
    let mk_linkage = |idx: &[usize]| {
        Linkage::new(idx.iter().map(|&i| t.paths()[i].clone()).collect())
            .map_err(|e| TransactionError::NotATransaction(e.to_string()))
    };
    if longs.len() >= k {
        let p_link = mk_linkage(&p3s)?;
        let q_link = mk_linkage(&longs[..k])?;
        if let Ok(lp) = crate::rerouting::LeapPattern::new(society, p_link, q_link, k, l) {
            return Ok(SideOutcome::Leap { p: lp.p, q: lp.q });
        }
    }
    for bucket in [&short_right, &short_left] {
        if bucket.len() < q {
            continue;
        }
        let local: Vec<usize> = (0..bucket.len()).collect();
        for combo in combinations(&local, q).into_iter().take(5000) {
            let mut keep: Vec<usize> = Vec::new();
            for &ci in &combo {
                let (h, partner) = bucket[ci];
                keep.push(h);
                keep.push(partner);
            }
            keep.sort_unstable();
            keep.dedup();
            if keep.len() != 2 * q {
                continue;
            }
            let sub = t.subset(society, &keep)?;
            if nested_crosses_check(society, &sub, q, false).is_some() {
                return Ok(SideOutcome::Nested(sub));
            }
        }
    }
    Err(hyp("no bucket of the case analysis yields a verifiable certificate"))
}

// ---------------------------------------------------------------------------
// The crooked-or-cylindrical dichotomy
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub enum Gm9Outcome {
    Crooked(Transaction),
    Rendition(crate::renditions::CylindricalRendition),
}

/// Either a crooked transaction of cardinality `p` or a cylindrical
/// rendition whose central cell carries a society of depth at most `6p`.
///
/// Recursive construction: a deep society has a transaction of order 6p+1,
/// which refines to a crooked transaction (done) or a planar one of order
/// 5p+3; the two side societies of the planar family either overlap, both
/// contain a cross, or one is crossless — the first two cases assemble a
/// crooked transaction directly, and in the last case the disk hanging off
/// the second element is peeled, the rest is solved recursively, and the
/// answer is either glued back (rendition) or rerouted off the peeled
/// boundary and lifted (crooked).
pub fn gm9(society: &Society, p: usize) -> Result<Gm9Outcome, TransactionError> {
    if p < 4 {
        return Err(TransactionError::PTooSmall);
    }
    gm9_inner(society, p)
}

fn gm9_inner(society: &Society, p: usize) -> Result<Gm9Outcome, TransactionError> {
    let (d, witness) = depth(society);
    if d <= 6 * p {
        return shallow_rendition(society).map(Gm9Outcome::Rendition);
    }
    let t = witness.expect("positive depth has a witness");
    let keep: Vec<usize> = (0..(6 * p + 1)).collect();
    let t = t.subset(society, &keep)?;
    let planar = match planar_or_crooked(society, &t, 5 * p + 3, p)? {
        PlanarOrCrooked::Crooked(c) => {
            debug_assert!(is_crooked(society, &c) && c.order() >= p);
            return Ok(Gm9Outcome::Crooked(c));
        }
        PlanarOrCrooked::Planar(pl) => pl,
    };
    // label P₀..P₅ₚ₊₂ by first-endpoint order along the witness segment
    let oriented = planar.oriented_endpoints();
    let apos: BTreeMap<VertexId, usize> = planar
        .witness_a()
        .vertices()
        .iter()
        .enumerate()
        .map(|(i, &v)| (v, i))
        .collect();
    let mut idx: Vec<usize> = (0..planar.order()).collect();
    idx.sort_by_key(|&i| apos[&oriented[i].0]);
    let paths: Vec<Path> = idx.iter().map(|&i| planar.paths()[i].clone()).collect();
    let ends: Vec<(VertexId, VertexId)> = idx.iter().map(|&i| oriented[i]).collect();
    let n_el = 5 * p + 3;
    let rev_paths: Vec<Path> = (0..n_el).map(|i| paths[n_el - 1 - i].clone()).collect();
    let rev_ends: Vec<(VertexId, VertexId)> = (0..n_el)
        .map(|i| {
            let (a, b) = ends[n_el - 1 - i];
            (b, a)
        })
        .collect();
    // the union of the family plus all boundary vertices
    let g = society.graph();
    let mut hv: BTreeSet<VertexId> = society.omega_set();
    let mut he: BTreeSet<EdgeId> = BTreeSet::new();
    for pp in &paths {
        hv.extend(pp.vertices());
        he.extend(pp.edges());
    }
    let h = g.subgraph(&hv, &he).map_err(|e| hyp(e.to_string()))?;
    let (soc1, v1) = gm9_side(society, &h, &paths, &ends, p)?;
    let (soc2, v2) = gm9_side(society, &h, &rev_paths, &rev_ends, p)?;
    if !v1.is_disjoint(&v2) {
        let mids: Vec<&Path> = paths[2 * p + 2..=3 * p].iter().collect();
        return gm9_overlap_crooked(society, &soc1, &soc2, &mids);
    }
    let r1 = crate::renditions::rural_rendition(&soc1).is_some();
    let r2 = crate::renditions::rural_rendition(&soc2).is_some();
    match (r1, r2) {
        (false, false) => {
            let mids: Vec<&Path> = paths[2 * p + 2..=(3 * p - 3)].iter().collect();
            gm9_two_cross_crooked(society, &soc1, &soc2, &mids)
        }
        (true, false) => gm9_peel(society, &paths, &ends, p),
        (false, true) => gm9_peel(society, &rev_paths, &rev_ends, p),
        (true, true) => {
            if v1.iter().next() <= v2.iter().next() {
                gm9_peel(society, &paths, &ends, p)
            } else {
                gm9_peel(society, &rev_paths, &rev_ends, p)
            }
        }
    }
}

/// A cylindrical rendition for a society of depth ≤ 6p: the rural rendition
/// when one exists, else the whole graph in a single vortex cell.
fn shallow_rendition(
    society: &Society,
) -> Result<crate::renditions::CylindricalRendition, TransactionError> {
    use crate::renditions::{assemble, rural_rendition, Cell, CylindricalRendition};
    if let Some(disk) = rural_rendition(society) {
        if !disk.cells.is_empty() {
            return CylindricalRendition::new(disk, 0).map_err(|e| hyp(e.to_string()));
        }
    }
    let cell = Cell {
        boundary: society.omega().to_vec(),
        vortex: true,
        sigma: society.graph().clone(),
    };
    let disk = assemble(society, vec![cell])
        .ok_or_else(|| hyp("single-cell rendition failed to assemble"))?;
    CylindricalRendition::new(disk, 0).map_err(|e| hyp(e.to_string()))
}

/// The side society spanned by P₀..P₂ₚ₊₁, the boundary arc from b₂ₚ₊₁ to
/// a₂ₚ₊₁, and the trimmed bridges attaching to it off P₂ₚ₊₁.
fn gm9_side(
    society: &Society,
    h: &Graph,
    paths: &[Path],
    ends: &[(VertexId, VertexId)],
    p: usize,
) -> Result<(Society, BTreeSet<VertexId>), TransactionError> {
    let g = society.graph();
    let k = 2 * p + 1;
    let seg = society.segment_between(ends[k].1, ends[k].0)?;
    let mut v1: BTreeSet<VertexId> = seg.vertex_set();
    let mut e1: BTreeSet<EdgeId> = BTreeSet::new();
    for pp in &paths[..=k] {
        v1.extend(pp.vertices());
        e1.extend(pp.edges());
    }
    let core = v1.clone();
    let ext: BTreeSet<VertexId> = paths[k].vertex_set();
    for b in crate::graph::h_bridges(g, h) {
        let touches = b
            .attachments
            .iter()
            .any(|a| core.contains(a) && !ext.contains(a));
        if !touches {
            continue;
        }
        let kept: BTreeSet<VertexId> = b
            .attachments
            .iter()
            .filter(|a| core.contains(a))
            .copied()
            .collect();
        let verts: BTreeSet<VertexId> = b.interior.union(&kept).copied().collect();
        for &e in &b.edges {
            let (u, w) = g.endpoints(e).expect("bridge edge in host");
            if verts.contains(&u) && verts.contains(&w) {
                e1.insert(e);
            }
        }
        v1.extend(verts);
    }
    let g1 = g.subgraph(&v1, &e1).map_err(|e| hyp(e.to_string()))?;
    let soc = Society::new(g1, seg.vertices().to_vec())?;
    Ok((soc, v1))
}

/// Crooked transaction from overlapping side societies: a connecting path
/// between the two boundary arcs plus the middle elements.
fn gm9_overlap_crooked(
    society: &Society,
    soc1: &Society,
    soc2: &Society,
    mids: &[&Path],
) -> Result<Gm9Outcome, TransactionError> {
    let u = soc1
        .graph()
        .union(soc2.graph())
        .map_err(|e| hyp(e.to_string()))?;
    let forb: BTreeSet<VertexId> = mids
        .iter()
        .flat_map(|p| p.vertices().iter().copied())
        .collect();
    let s1 = soc1.omega_set();
    let s2 = soc2.omega_set();
    let path = u
        .shortest_path(&s1, &s2, |v| {
            !forb.contains(&v)
                && (!society.omega_contains(v) || s1.contains(&v) || s2.contains(&v))
        })
        .ok_or_else(|| hyp("overlapping sides admit no connecting path"))?;
    let vs = path.vertices().to_vec();
    let last1 = vs
        .iter()
        .rposition(|v| s1.contains(v))
        .ok_or_else(|| hyp("connecting path misses the first arc"))?;
    let path = if last1 > 0 {
        path.subpath(vs[last1], path.last())
            .map_err(|e| hyp(e.to_string()))?
    } else {
        path
    };
    let mut members: Vec<Path> = mids.iter().map(|p| (*p).clone()).collect();
    members.push(path);
    let linkage = Linkage::new(members).map_err(|e| hyp(e.to_string()))?;
    let t = Transaction::new(society, linkage)?;
    if is_crooked(society, &t) {
        Ok(Gm9Outcome::Crooked(t))
    } else {
        Err(hyp("overlap construction is not crooked"))
    }
}

/// Crooked transaction from a cross on each side plus the middle elements.
fn gm9_two_cross_crooked(
    society: &Society,
    soc1: &Society,
    soc2: &Society,
    mids: &[&Path],
) -> Result<Gm9Outcome, TransactionError> {
    let mut members: Vec<Path> = mids.iter().map(|p| (*p).clone()).collect();
    for soc in [soc1, soc2] {
        match find_cross(soc, DEFAULT_WITNESS_BUDGET) {
            CrossResult::Found(c) => {
                members.push(c.p);
                members.push(c.q);
            }
            CrossResult::NoCross => return Err(hyp("expected a cross on both sides")),
            CrossResult::ExistsWitnessBudgetExceeded => {
                return Err(TransactionError::WitnessSearchBudgetExceeded)
            }
        }
    }
    let linkage = Linkage::new(members).map_err(|e| hyp(e.to_string()))?;
    let t = Transaction::new(society, linkage)?;
    if is_crooked(society, &t) {
        Ok(Gm9Outcome::Crooked(t))
    } else {
        Err(hyp("two-cross construction is not crooked"))
    }
}

/// Peels off the disk cut out of the society by P₁ and the short boundary
/// arc between its endpoints, recurses on the rest with P₁ as new boundary,
/// and either glues the renditions or lifts the crooked transaction.
fn gm9_peel(
    society: &Society,
    paths: &[Path],
    ends: &[(VertexId, VertexId)],
    p: usize,
) -> Result<Gm9Outcome, TransactionError> {
    use crate::renditions::{assemble, rural_rendition, validate_rendition, CylindricalRendition};
    let g = society.graph();
    let (a1, b1) = ends[1];
    // the short boundary arc runs from b₁ forward to a₁ (through b₀, a₀)
    let inner = society.segment_between(b1, a1)?;
    let inner_strict: BTreeSet<VertexId> = inner.vertices()[1..inner.len() - 1]
        .iter()
        .copied()
        .collect();
    let p1set = paths[1].vertex_set();
    let g_no_p1 = g.without_vertices(&p1set);
    let del = g_no_p1.reachable_from(inner_strict.iter().copied());
    // everything cut off by P₁ must stay inside the short arc on the
    // boundary; an escape around P₁ yields a crooked transaction instead
    if del
        .iter()
        .any(|v| society.omega_contains(*v) && !inner_strict.contains(v))
    {
        return gm9_escape_crooked(society, paths, ends, p, &inner_strict, &inner, &g_no_p1);
    }
    debug_assert!(inner_strict.contains(&ends[0].0) && inner_strict.contains(&ends[0].1));
    let mut jv: BTreeSet<VertexId> = del.clone();
    jv.extend(p1set.iter().copied());
    let je: BTreeSet<EdgeId> = g
        .edge_map()
        .iter()
        .filter(|(_, &(u, w))| del.contains(&u) || del.contains(&w))
        .map(|(&e, _)| e)
        .collect();
    let jg = g.subgraph(&jv, &je).map_err(|e| hyp(e.to_string()))?;
    let p1_b_to_a: Vec<VertexId> = if paths[1].first() == b1 {
        paths[1].vertices().to_vec()
    } else {
        paths[1].reversed().vertices().to_vec()
    };
    // the peeled disk's boundary: the short arc then P₁'s interior from a₁
    // back to b₁
    let mut omega_j: Vec<VertexId> = inner.vertices().to_vec();
    omega_j.extend(p1_b_to_a[1..p1_b_to_a.len() - 1].iter().rev());
    let j_soc = Society::new(jg, omega_j)?;
    let rho_j =
        rural_rendition(&j_soc).ok_or_else(|| hyp("the peeled disk society is not rural"))?;
    // the rest of the society, with P₁ replacing the short arc on the
    // boundary
    let g_star_graph = g.without_vertices(&del);
    let mut omega_star: Vec<VertexId> = p1_b_to_a.clone();
    let arc = society.segment_between(a1, b1)?;
    omega_star.extend(arc.vertices()[1..arc.len() - 1].iter().copied());
    let star = Society::new(g_star_graph, omega_star)?;
    match gm9_inner(&star, p)? {
        Gm9Outcome::Rendition(cyl) => {
            let mut cells = cyl.disk.cells.clone();
            cells.extend(rho_j.cells.iter().cloned());
            let disk = assemble(society, cells)
                .ok_or_else(|| hyp("gluing the peeled disk back failed"))?;
            let errs = validate_rendition(society, &disk);
            if !errs.is_empty() {
                return Err(hyp(format!("glued rendition invalid: {}", errs.join("; "))));
            }
            CylindricalRendition::new(disk, cyl.c0)
                .map(Gm9Outcome::Rendition)
                .map_err(|e| hyp(e.to_string()))
        }
        Gm9Outcome::Crooked(q) => gm9_lift_crooked(society, &star, paths, ends, p, q),
    }
}

/// A boundary-to-boundary path escapes around P₁; together with the
/// elements P₍ₚ₊₃₎..P₂ₚ₊₁ it forms a crooked transaction.
fn gm9_escape_crooked(
    society: &Society,
    paths: &[Path],
    _ends: &[(VertexId, VertexId)],
    p: usize,
    inner_strict: &BTreeSet<VertexId>,
    inner: &Segment,
    g_no_p1: &Graph,
) -> Result<Gm9Outcome, TransactionError> {
    let target: BTreeSet<VertexId> = society
        .omega_set()
        .difference(&inner.vertex_set())
        .copied()
        .collect();
    let path = g_no_p1
        .shortest_path(inner_strict, &target, |v| {
            !society.omega_contains(v) || inner_strict.contains(&v) || target.contains(&v)
        })
        .ok_or_else(|| hyp("no escaping path despite an escaping vertex"))?;
    let vs = path.vertices().to_vec();
    let last_in = vs
        .iter()
        .rposition(|v| inner_strict.contains(v))
        .ok_or_else(|| hyp("escaping path misses the short arc"))?;
    let path = if last_in > 0 {
        path.subpath(vs[last_in], path.last())
            .map_err(|e| hyp(e.to_string()))?
    } else {
        path
    };
    let mut members: Vec<Path> = paths[p + 3..=2 * p + 1].to_vec();
    members.push(path);
    let linkage = Linkage::new(members).map_err(|e| hyp(e.to_string()))?;
    let t = Transaction::new(society, linkage)?;
    if is_crooked(society, &t) {
        Ok(Gm9Outcome::Crooked(t))
    } else {
        Err(hyp("escape construction is not crooked"))
    }
}

/// Lifts a crooked transaction of the peeled society back to the full one,
/// first rerouting any member ending on P₁'s interior onto one of
/// P₂..P₍ₚ₊₂₎ while strictly shrinking the combined edge set.
fn gm9_lift_crooked(
    society: &Society,
    star: &Society,
    paths: &[Path],
    ends: &[(VertexId, VertexId)],
    p: usize,
    q: Transaction,
) -> Result<Gm9Outcome, TransactionError> {
    let y_interior: BTreeSet<VertexId> = paths[1]
        .vertices()
        .iter()
        .copied()
        .filter(|v| !society.omega_contains(*v))
        .collect();
    let edge_measure = |members: &[Path]| -> usize {
        let mut es: BTreeSet<EdgeId> = members
            .iter()
            .flat_map(|m| m.edges().iter().copied())
            .collect();
        for pp in &paths[2..=(p + 2)] {
            es.extend(pp.edges().iter().copied());
        }
        es.len()
    };
    let mut members: Vec<Path> = q.paths().to_vec();
    let mut measure = edge_measure(&members);
    let mut guard = 0usize;
    loop {
        let offender = members.iter().position(|m| {
            y_interior.contains(&m.first()) || y_interior.contains(&m.last())
        });
        let Some(oi) = offender else { break };
        guard += 1;
        if guard > society.graph().num_edges() * (p + 3) + 10 {
            return Err(hyp("rerouting off the peeled boundary did not terminate"));
        }
        let bad = members[oi].clone();
        let yp = if y_interior.contains(&bad.first()) {
            bad.last()
        } else {
            bad.first()
        };
        let mut improved = false;
        'candidates: for i in 2..=(p + 2) {
            let pi = if paths[i].first() == ends[i].0 {
                paths[i].clone()
            } else {
                paths[i].reversed()
            };
            let Some(xi) = pi.vertices().iter().position(|v| bad.contains(*v)) else {
                continue;
            };
            let x = pi.vertices()[xi];
            let Ok(r) = pi.subpath(ends[i].0, x) else { continue };
            let tail = match bad.subpath(x, yp) {
                Ok(t) => t,
                Err(_) => match bad.reversed().subpath(x, yp) {
                    Ok(t) => t,
                    Err(_) => continue,
                },
            };
            let Ok(new_path) = r.concat(&tail) else { continue };
            let mut cand = members.clone();
            cand[oi] = new_path;
            for a in 0..cand.len() {
                for b in (a + 1)..cand.len() {
                    if !cand[a].vertex_set().is_disjoint(&cand[b].vertex_set()) {
                        continue 'candidates;
                    }
                }
            }
            let Ok(link) = Linkage::new(cand.clone()) else { continue };
            let Ok(tstar) = Transaction::new(star, link) else { continue };
            if !is_crooked(star, &tstar) {
                continue;
            }
            let new_measure = edge_measure(&cand);
            if new_measure < measure {
                members = cand;
                measure = new_measure;
                improved = true;
                break;
            }
        }
        if !improved {
            return Err(hyp("could not reroute a member off the peeled boundary"));
        }
    }
    let linkage = Linkage::new(members).map_err(|e| hyp(e.to_string()))?;
    let t = Transaction::new(society, linkage)?;
    if is_crooked(society, &t) && t.order() >= p {
        Ok(Gm9Outcome::Crooked(t))
    } else {
        Err(hyp("lifted transaction is not crooked in the full society"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;

    /// Society whose graph is `n` boundary vertices 0..n plus chord edges.
    fn chord_society(n: u32, chords: &[(u32, u32)]) -> Society {
        let vertices: Vec<u32> = (0..n).collect();
        let edges = chords
            .iter()
            .enumerate()
            .map(|(i, &(u, v))| (i as u32, (u, v)));
        let g = Graph::new(vertices.clone(), edges).unwrap();
        Society::new(g, vertices).unwrap()
    }

    fn chord_transaction(soc: &Society, chords: &[(u32, u32)]) -> Transaction {
        let paths: Vec<Path> = chords
            .iter()
            .map(|&(u, v)| {
                let e = soc.graph().edge_between(u, v).unwrap();
                Path::new(soc.graph(), vec![u, v], vec![e]).unwrap()
            })
            .collect();
        Transaction::new(soc, Linkage::new(paths).unwrap()).unwrap()
    }

    /// Brute-force depth oracle: maximum, over all subsets of edges forming
    /// disjoint boundary paths with a witness split, of the family size.
    fn depth_oracle(soc: &Society) -> usize {
        // enumerate all boundary-to-boundary paths, then greedily search all
        // disjoint subsets (exponential; test graphs are tiny)
        let mut omega_paths: Vec<Path> = Vec::new();
        let omega: Vec<u32> = soc.omega().to_vec();
        for &u in &omega {
            for &v in &omega {
                if u >= v {
                    continue;
                }
                // all simple u–v paths internally avoiding the boundary
                let mut stack = vec![(vec![u], Vec::new())];
                while let Some((vs, es)) = stack.pop() {
                    let last = *vs.last().unwrap();
                    for &(e, w) in soc.graph().incident(last) {
                        if vs.contains(&w) || es.contains(&e) {
                            continue;
                        }
                        if w == v {
                            let mut vs2 = vs.clone();
                            vs2.push(w);
                            let mut es2 = es.clone();
                            es2.push(e);
                            omega_paths
                                .push(Path::new(soc.graph(), vs2, es2).unwrap());
                        } else if !soc.omega_contains(w) {
                            let mut vs2 = vs.clone();
                            vs2.push(w);
                            let mut es2 = es.clone();
                            es2.push(e);
                            stack.push((vs2, es2));
                        }
                    }
                }
            }
        }
        fn grow(
            soc: &Society,
            all: &[Path],
            from: usize,
            chosen: &mut Vec<Path>,
            best: &mut usize,
        ) {
            if chosen.len() > *best
                && Transaction::new(soc, Linkage::new(chosen.clone()).unwrap()).is_ok()
            {
                *best = chosen.len();
            }
            for i in from..all.len() {
                let cand = &all[i];
                let disjoint = chosen
                    .iter()
                    .all(|p| p.vertex_set().is_disjoint(&cand.vertex_set()));
                if disjoint {
                    chosen.push(cand.clone());
                    grow(soc, all, i + 1, chosen, best);
                    chosen.pop();
                }
            }
        }
        let mut best = 0;
        grow(soc, &omega_paths, 0, &mut Vec::new(), &mut best);
        best
    }

    #[test]
    fn depth_edgeless_is_zero() {
        let soc = chord_society(5, &[]);
        assert_eq!(depth(&soc), (0, None));
    }

    #[test]
    fn depth_k4_is_two() {
        let g = Graph::from_edge_list(&[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        let soc = Society::new(g, vec![0, 1, 2, 3]).unwrap();
        let (d, w) = depth(&soc);
        assert_eq!(d, 2);
        assert_eq!(w.unwrap().order(), 2);
        assert_eq!(depth_oracle(&soc), 2);
    }

    #[test]
    fn depth_parallel_chords() {
        // n parallel chords between opposite arcs of a 2n-cycle society
        for n in 1..=4u32 {
            let total = 2 * n;
            let mut edges: Vec<(u32, u32)> = (0..total).map(|i| (i, (i + 1) % total)).collect();
            for i in 0..n {
                edges.push((i, total - 1 - i));
            }
            let g = Graph::from_edge_list(&edges);
            let soc = Society::new(g, (0..total).collect()).unwrap();
            let (d, _) = depth(&soc);
            assert_eq!(depth_oracle(&soc), d, "oracle mismatch at n={n}");
            assert!(d >= n as usize);
        }
    }

    #[test]
    fn witness_segments_found() {
        let soc = chord_society(6, &[(0, 3), (1, 4)]);
        let t = chord_transaction(&soc, &[(0, 3), (1, 4)]);
        assert!(t.witness_a().is_disjoint(t.witness_b()));
        assert_eq!(t.order(), 2);
    }

    #[test]
    fn same_side_chords_rejected() {
        // three short chords hugging the boundary: any witness arc must pick
        // exactly one endpoint from each adjacent pair, which is impossible
        let soc = chord_society(6, &[(0, 1), (2, 3), (4, 5)]);
        let paths: Vec<Path> = [(0u32, 1u32), (2, 3), (4, 5)]
            .iter()
            .map(|&(u, v)| {
                let e = soc.graph().edge_between(u, v).unwrap();
                Path::new(soc.graph(), vec![u, v], vec![e]).unwrap()
            })
            .collect();
        let r = Transaction::new(&soc, Linkage::new(paths).unwrap());
        assert!(matches!(r, Err(TransactionError::NotATransaction(_))));
    }

    #[test]
    fn peripheral_of_singleton_and_planar_family() {
        let soc = chord_society(2, &[(0, 1)]);
        let t = chord_transaction(&soc, &[(0, 1)]);
        assert_eq!(peripheral_elements(&soc, &t), vec![0]);
        assert!(!is_crooked(&soc, &t));

        // planar family a1 a2 a3 b3 b2 b1: chords (0,5),(1,4),(2,3)
        let soc = chord_society(6, &[(0, 5), (1, 4), (2, 3)]);
        let t = chord_transaction(&soc, &[(0, 5), (1, 4), (2, 3)]);
        assert!(is_planar_transaction(&soc, &t));
        assert_eq!(peripheral_elements(&soc, &t), vec![0, 2]);
    }

    #[test]
    fn pairwise_crossing_is_crooked() {
        for q in 2..=4u32 {
            let chords: Vec<(u32, u32)> = (0..q).map(|i| (i, q + i)).collect();
            let soc = chord_society(2 * q, &chords);
            let t = chord_transaction(&soc, &chords);
            assert!(is_crosscap_transaction(&soc, &t));
            assert!(peripheral_elements(&soc, &t).is_empty());
            assert!(is_crooked(&soc, &t));
        }
    }

    #[test]
    fn planar_or_crooked_planar_branch() {
        // fully planar family of order p+q−2 → planar of order p
        let (p, q) = (3usize, 3usize);
        let n = (p + q - 2) as u32;
        let chords: Vec<(u32, u32)> = (0..n).map(|i| (i, 2 * n - 1 - i)).collect();
        let soc = chord_society(2 * n, &chords);
        let t = chord_transaction(&soc, &chords);
        match planar_or_crooked(&soc, &t, p, q).unwrap() {
            PlanarOrCrooked::Planar(pt) => {
                assert_eq!(pt.order(), p);
                assert!(is_planar_transaction(&soc, &pt));
            }
            PlanarOrCrooked::Crooked(_) => panic!("planar family must give planar branch"),
        }
    }

    #[test]
    fn planar_or_crooked_crooked_branch() {
        let q = 4u32;
        let chords: Vec<(u32, u32)> = (0..q).map(|i| (i, q + i)).collect();
        let soc = chord_society(2 * q, &chords);
        let t = chord_transaction(&soc, &chords);
        match planar_or_crooked(&soc, &t, 2, q as usize).unwrap() {
            PlanarOrCrooked::Crooked(ct) => {
                assert_eq!(ct.order(), q as usize);
                assert!(is_crooked(&soc, &ct));
            }
            PlanarOrCrooked::Planar(_) => panic!("pairwise crossing must give crooked branch"),
        }
    }

    #[test]
    fn planar_or_crooked_tight_family() {
        // planar family of order p−2 plus pairwise-crossing family of order
        // q−1, mutually non-crossing: order p+q−3 is below the threshold
        let (p, q) = (4usize, 3usize);
        // pairwise crossing block on positions 0..2(q−1); planar block nested
        // outside it
        let mut chords: Vec<(u32, u32)> = (0..(q as u32 - 1)).map(|i| (i, q as u32 - 1 + i)).collect();
        let m = (p - 2) as u32;
        let base = 2 * (q as u32 - 1);
        for i in 0..m {
            chords.push((base + i, base + 2 * m - 1 - i));
        }
        let n = base + 2 * m;
        let soc = chord_society(n, &chords);
        let t = chord_transaction(&soc, &chords);
        assert_eq!(t.order(), p + q - 3);
        let r = planar_or_crooked(&soc, &t, p, q);
        assert!(matches!(r, Err(TransactionError::OrderTooSmall { .. })));
    }

    #[test]
    fn shrink_crooked_examples() {
        let chords: Vec<(u32, u32)> = (0..5).map(|i| (i, 5 + i)).collect();
        let soc = chord_society(10, &chords);
        let t = chord_transaction(&soc, &chords);
        let s = shrink_crooked(&soc, &t).unwrap();
        assert_eq!(s.order(), 4);
        assert!(is_crooked(&soc, &s));

        let chords4: Vec<(u32, u32)> = (0..4).map(|i| (i, 4 + i)).collect();
        let soc4 = chord_society(8, &chords4);
        let t4 = chord_transaction(&soc4, &chords4);
        assert_eq!(shrink_crooked(&soc4, &t4), Err(TransactionError::TooSmall));
    }

    #[test]
    fn shrink_crooked_iterates_from_seven() {
        let chords: Vec<(u32, u32)> = (0..7).map(|i| (i, 7 + i)).collect();
        let soc = chord_society(14, &chords);
        let mut t = chord_transaction(&soc, &chords);
        while t.order() > 4 {
            t = shrink_crooked(&soc, &t).unwrap();
            assert!(is_crooked(&soc, &t));
        }
    }

    #[test]
    fn extract_monotone_identity_and_reversal() {
        // identity permutation = pairwise crossing chords
        let s = 3u32;
        let chords: Vec<(u32, u32)> = (0..s).map(|i| (i, s + i)).collect();
        let soc = chord_society(2 * s, &chords);
        let t = chord_transaction(&soc, &chords);
        match extract_monotone(&soc, &t, s as usize, 2).unwrap() {
            MonotoneOutcome::Crosscap(c) => assert_eq!(c.order(), s as usize),
            MonotoneOutcome::Planar(_) => panic!("identity must give crosscap"),
        }

        // reversal = nested planar chords
        let tt = 3u32;
        let chords: Vec<(u32, u32)> = (0..tt).map(|i| (i, 2 * tt - 1 - i)).collect();
        let soc = chord_society(2 * tt, &chords);
        let t = chord_transaction(&soc, &chords);
        match extract_monotone(&soc, &t, 2, tt as usize).unwrap() {
            MonotoneOutcome::Planar(p) => assert_eq!(p.order(), tt as usize),
            MonotoneOutcome::Crosscap(_) => panic!("reversal must give planar"),
        }
    }

    #[test]
    fn extract_monotone_two_one_four_three() {
        // permutation [2,1,4,3]: chords crossing in adjacent pairs
        // a-ends 0,1,2,3; b-ends ranked 2,1,4,3 along the far arc
        let chords = [(0u32, 5u32), (1, 4), (2, 7), (3, 6)];
        let soc = chord_society(8, &chords);
        let t = chord_transaction(&soc, &chords);
        let r = extract_monotone(&soc, &t, 3, 3);
        assert!(matches!(r, Err(TransactionError::OrderTooSmall { .. })));
        match extract_monotone(&soc, &t, 2, 2).unwrap() {
            MonotoneOutcome::Crosscap(c) => assert_eq!(c.order(), 2),
            MonotoneOutcome::Planar(p) => assert_eq!(p.order(), 2),
        }
    }

    #[test]
    fn nested_crosses_detection() {
        // k=1: a single cross
        let soc = chord_society(4, &[(0, 2), (1, 3)]);
        let t = chord_transaction(&soc, &[(0, 2), (1, 3)]);
        assert_eq!(nested_crosses_check(&soc, &t, 1, false), Some(vec![(0, 1)]));

        // planar transaction: no labeling
        let soc = chord_society(4, &[(0, 3), (1, 2)]);
        let t = chord_transaction(&soc, &[(0, 3), (1, 2)]);
        assert_eq!(nested_crosses_check(&soc, &t, 1, false), None);
        // but it is a twisted 1-nested crosses (the two do not cross)
        assert_eq!(nested_crosses_check(&soc, &t, 1, true), Some(vec![(0, 1)]));

        // hand-built 2-nested crosses: inner cross (0,2),(1,3) on one arc,
        // outer cross (4,6),(5,7) on the other; the blocks do not interact
        let chords = [(0u32, 2u32), (1, 3), (4, 6), (5, 7)];
        let soc = chord_society(8, &chords);
        let t = chord_transaction(&soc, &chords);
        let pairs = nested_crosses_check(&soc, &t, 2, false).unwrap();
        assert_eq!(pairs, vec![(0, 1), (2, 3)]);
    }

    /// Brute-force cross oracle: any two disjoint boundary paths with
    /// interleaved endpoints.
    fn cross_oracle(soc: &Society) -> bool {
        let mut omega_paths: Vec<Path> = Vec::new();
        for &u in soc.omega() {
            for &v in soc.omega() {
                if u >= v {
                    continue;
                }
                let mut stack = vec![(vec![u], Vec::new())];
                while let Some((vs, es)) = stack.pop() {
                    let last = *vs.last().unwrap();
                    for &(e, w) in soc.graph().incident(last) {
                        if vs.contains(&w) || es.contains(&e) {
                            continue;
                        }
                        if w == v {
                            let mut vs2 = vs.clone();
                            vs2.push(w);
                            let mut es2 = es.clone();
                            es2.push(e);
                            omega_paths.push(Path::new(soc.graph(), vs2, es2).unwrap());
                        } else if !soc.omega_contains(w) {
                            let mut vs2 = vs.clone();
                            vs2.push(w);
                            let mut es2 = es.clone();
                            es2.push(e);
                            stack.push((vs2, es2));
                        }
                    }
                }
            }
        }
        for i in 0..omega_paths.len() {
            for j in (i + 1)..omega_paths.len() {
                let (p, q) = (&omega_paths[i], &omega_paths[j]);
                if p.vertex_set().is_disjoint(&q.vertex_set())
                    && paths_cross(soc, p, q)
                {
                    return true;
                }
            }
        }
        false
    }

    #[test]
    fn cross_decision_matches_oracle_on_random_societies() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let mut found_some = 0;
        for _ in 0..80 {
            let n = rng.gen_range(4..8u32);
            let extra = rng.gen_range(0..3u32);
            let total = n + extra;
            let m = rng.gen_range(0..12);
            let mut edges = Vec::new();
            for _ in 0..m {
                let u = rng.gen_range(0..total);
                let v = rng.gen_range(0..total);
                if u != v {
                    edges.push((u, v));
                }
            }
            let g = Graph::new(
                0..total,
                edges.iter().enumerate().map(|(i, &p)| (i as u32, p)),
            )
            .unwrap();
            let soc = Society::new(g, (0..n).collect()).unwrap();
            let expected = cross_oracle(&soc);
            match find_cross(&soc, DEFAULT_WITNESS_BUDGET) {
                CrossResult::NoCross => assert!(!expected, "missed a cross"),
                CrossResult::Found(cross) => {
                    assert!(expected, "found a cross where the oracle sees none");
                    check_omega_path(&soc, &cross.p).unwrap();
                    check_omega_path(&soc, &cross.q).unwrap();
                    assert!(cross
                        .p
                        .vertex_set()
                        .is_disjoint(&cross.q.vertex_set()));
                    assert!(paths_cross(&soc, &cross.p, &cross.q));
                    found_some += 1;
                }
                CrossResult::ExistsWitnessBudgetExceeded => {
                    assert!(expected);
                }
            }
        }
        assert!(found_some > 5, "the corpus should contain real crosses");
    }

    #[test]
    fn cross_witness_budget_is_reported() {
        // a cross exists but zero budget forbids extracting it
        let soc = chord_society(4, &[(0, 2), (1, 3)]);
        assert!(matches!(
            find_cross(&soc, 0),
            CrossResult::ExistsWitnessBudgetExceeded
        ));
        assert!(matches!(
            find_cross(&soc, DEFAULT_WITNESS_BUDGET),
            CrossResult::Found(_)
        ));
    }

    #[test]
    fn depth_matches_oracle_on_random_societies() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for _ in 0..40 {
            let n = rng.gen_range(3..8u32);
            let extra = rng.gen_range(0..3u32);
            let total = n + extra;
            let mut edges = Vec::new();
            let m = rng.gen_range(0..10);
            for _ in 0..m {
                let u = rng.gen_range(0..total);
                let v = rng.gen_range(0..total);
                if u != v {
                    edges.push((u, v));
                }
            }
            let mut vertices: Vec<u32> = (0..total).collect();
            vertices.dedup();
            let g = Graph::new(
                vertices,
                edges
                    .iter()
                    .enumerate()
                    .map(|(i, &p)| (i as u32, p)),
            )
            .unwrap();
            let soc = Society::new(g, (0..n).collect()).unwrap();
            let (d, witness) = depth(&soc);
            assert_eq!(d, depth_oracle(&soc));
            if let Some(w) = witness {
                assert_eq!(w.order(), d);
            }
        }
    }

    // -- handles ----------------------------------------------------------

    #[test]
    fn handle_detection() {
        // a single cross is a handle of thickness 1
        let soc = chord_society(4, &[(0, 2), (1, 3)]);
        let t = chord_transaction(&soc, &[(0, 2), (1, 3)]);
        assert!(is_handle_transaction(&soc, &t));
        // a nested pair is not
        let soc = chord_society(4, &[(0, 3), (1, 2)]);
        let t = chord_transaction(&soc, &[(0, 3), (1, 2)]);
        assert!(!is_handle_transaction(&soc, &t));
    }

    /// Endpoints u₁,u₂,u₃,u₄,v₂,v₁,v₄,v₃ at positions 0..8.
    fn thickness_two_handle() -> (Society, Transaction) {
        let chords = [(0, 5), (1, 4), (2, 7), (3, 6)];
        let soc = chord_society(8, &chords);
        let t = chord_transaction(&soc, &chords);
        (soc, t)
    }

    #[test]
    fn thickness_two_handle_is_a_handle() {
        let (soc, t) = thickness_two_handle();
        assert!(is_handle_transaction(&soc, &t));
        let (order, ends) = handle_labeling(&soc, &t).unwrap();
        assert_eq!(order.len(), 4);
        assert_eq!(ends.len(), 4);
    }

    #[test]
    fn consistent_handle_halves_thickness() {
        let (soc, t) = thickness_two_handle();
        let x = soc.full_segment();
        let half = consistent_handle(&soc, &x, &t).unwrap();
        assert_eq!(half.order(), 2);
        assert!(is_consistent_handle(&x, &half));
        assert!(is_handle_transaction(&soc, &half));
    }

    #[test]
    fn consistent_handle_rejects_non_handles() {
        let chords = [(0, 7), (1, 6), (2, 5), (3, 4)];
        let soc = chord_society(8, &chords);
        let t = chord_transaction(&soc, &chords);
        assert_eq!(
            consistent_handle(&soc, &soc.full_segment(), &t),
            Err(TransactionError::NotAHandle)
        );
        // endpoints outside the segment are rejected as well
        let (soc2, t2) = thickness_two_handle();
        let x = soc2.segment_between(0, 6).unwrap();
        assert_eq!(
            consistent_handle(&soc2, &x, &t2),
            Err(TransactionError::NotAHandle)
        );
    }

    #[test]
    fn consistent_handle_empty_input() {
        let soc = chord_society(4, &[(0, 2)]);
        let t = Transaction::new(&soc, Linkage::empty()).unwrap();
        let out = consistent_handle(&soc, &soc.full_segment(), &t).unwrap();
        assert_eq!(out.order(), 0);
        assert!(is_consistent_handle(&soc.full_segment(), &out));
    }

    // -- the strong Erdős–Szekeres dichotomy -------------------------------

    fn small_params() -> StrongEsParams {
        StrongEsParams {
            k: 1,
            l: 2,
            k_star: 1,
            l_star: 2,
            q: 1,
            q_star: 1,
            s: 2,
            s_star: 2,
        }
    }

    #[test]
    fn strong_es_order_too_small() {
        let chords: Vec<(u32, u32)> = (0..71).map(|i| (i, 143 - i)).collect();
        let soc = chord_society(144, &chords);
        let t = chord_transaction(&soc, &chords);
        let x1 = soc.segment_between(0, 71).unwrap();
        let x2 = soc.segment_between(72, 143).unwrap();
        assert!(matches!(
            strong_es(&soc, &t, &x1, &x2, small_params()),
            Err(TransactionError::OrderTooSmall {
                required: 72,
                actual: 71
            })
        ));
    }

    #[test]
    fn strong_es_planar_outcome() {
        let chords: Vec<(u32, u32)> = (0..72).map(|i| (i, 143 - i)).collect();
        let soc = chord_society(144, &chords);
        let t = chord_transaction(&soc, &chords);
        let x1 = soc.segment_between(0, 71).unwrap();
        let x2 = soc.segment_between(72, 143).unwrap();
        match strong_es(&soc, &t, &x1, &x2, small_params()).unwrap() {
            StrongEsOutcome::Planar(p) => {
                assert_eq!(p.order(), 2);
                assert!(is_planar_transaction(&soc, &p));
            }
            other => panic!("expected a planar certificate, got {other:?}"),
        }
    }

    #[test]
    fn strong_es_planar_flipped_outcome() {
        let chords: Vec<(u32, u32)> = (0..72).map(|i| (i, 72 + i)).collect();
        let soc = chord_society(144, &chords);
        let t = chord_transaction(&soc, &chords);
        let x1 = soc.segment_between(0, 71).unwrap();
        let x2 = soc.segment_between(72, 143).unwrap();
        match strong_es(&soc, &t, &x1, &x2, small_params()).unwrap() {
            StrongEsOutcome::PlanarFlipped(p) => {
                assert_eq!(p.order(), 2);
                let flipped = soc.flip(&x1).unwrap();
                assert!(is_planar_transaction(&flipped, &p));
            }
            other => panic!("expected a flipped planar certificate, got {other:?}"),
        }
    }

    /// A nested family of six plus short or long crossers between two arcs.
    fn crosser_fixture(crossers: &[(u32, u32)]) -> (Society, Transaction, Vec<usize>) {
        let mut chords: Vec<(u32, u32)> = (0..6).map(|i| (2 * i, 59 - 2 * i)).collect();
        chords.extend(crossers.iter().copied());
        let soc = chord_society(60, &chords);
        let t = chord_transaction(&soc, &chords);
        (soc, t, (0..6).collect())
    }

    #[test]
    fn short_crossers_give_nested_crosses() {
        // each crosser meets exactly the second member of its pair
        let (soc, t, p3) = crosser_fixture(&[(3, 58), (7, 54), (11, 50)]);
        let x1 = soc.segment_between(0, 29).unwrap();
        let x1pos: std::collections::BTreeMap<VertexId, usize> = x1
            .vertices()
            .iter()
            .enumerate()
            .map(|(i, &v)| (v, i))
            .collect();
        match planar_side(&soc, &t, &p3, &x1.vertex_set(), &x1pos, 1, 2, 1).unwrap() {
            SideOutcome::Nested(n) => {
                assert_eq!(n.order(), 2);
                assert!(nested_crosses_check(&soc, &n, 1, false).is_some());
            }
            SideOutcome::Leap { .. } => panic!("expected nested crosses"),
        }
    }

    #[test]
    fn long_crosser_gives_leap_pattern() {
        // (9, 56) crosses three members of the nested family
        let (soc, t, p3) = crosser_fixture(&[(3, 58), (7, 54), (9, 56)]);
        let x1 = soc.segment_between(0, 29).unwrap();
        let x1pos: std::collections::BTreeMap<VertexId, usize> = x1
            .vertices()
            .iter()
            .enumerate()
            .map(|(i, &v)| (v, i))
            .collect();
        match planar_side(&soc, &t, &p3, &x1.vertex_set(), &x1pos, 1, 2, 1).unwrap() {
            SideOutcome::Leap { p, q } => {
                assert_eq!(p.order(), 6);
                assert_eq!(q.order(), 1);
                assert!(crate::rerouting::verify_leap(&soc, &p, &q, 1, 2, false));
            }
            SideOutcome::Nested(_) => panic!("expected a leap pattern"),
        }
    }

    // -- the crooked-or-cylindrical dichotomy ------------------------------

    #[test]
    fn gm9_rejects_small_p() {
        let soc = chord_society(4, &[(0, 2)]);
        assert!(matches!(gm9(&soc, 3), Err(TransactionError::PTooSmall)));
    }

    fn assert_valid_rendition(soc: &Society, r: &crate::renditions::CylindricalRendition, p: usize) {
        let errs = crate::renditions::validate_rendition(soc, &r.disk);
        assert!(errs.is_empty(), "rendition invalid: {errs:?}");
        let vortex = r.vortex_society().unwrap();
        assert!(depth(&vortex).0 <= 6 * p, "vortex society too deep");
    }

    #[test]
    fn gm9_rural_society_gets_rendition() {
        let soc = chord_society(8, &[(0, 4)]);
        match gm9(&soc, 4).unwrap() {
            Gm9Outcome::Rendition(r) => assert_valid_rendition(&soc, &r, 4),
            Gm9Outcome::Crooked(_) => panic!("rural society cannot be crooked"),
        }
    }

    #[test]
    fn gm9_shallow_crossed_society_gets_vortex_rendition() {
        // one cross: not rural, but depth 2 ≤ 24 puts everything in a vortex
        let soc = chord_society(48, &[(0, 24), (12, 36)]);
        match gm9(&soc, 4).unwrap() {
            Gm9Outcome::Rendition(r) => {
                assert_valid_rendition(&soc, &r, 4);
                assert_eq!(r.disk.cells[r.c0].sigma.num_edges(), 2);
            }
            Gm9Outcome::Crooked(_) => panic!("depth-2 society cannot be crooked"),
        }
    }

    #[test]
    fn gm9_pairwise_crossing_family_is_crooked() {
        let chords: Vec<(u32, u32)> = (0..25).map(|i| (i, 25 + i)).collect();
        let soc = chord_society(50, &chords);
        match gm9(&soc, 4).unwrap() {
            Gm9Outcome::Crooked(t) => {
                assert!(t.order() >= 4);
                assert!(is_crooked(&soc, &t));
            }
            Gm9Outcome::Rendition(_) => panic!("depth 25 > 24 and pairwise crossing"),
        }
    }

    #[test]
    fn gm9_deep_nested_family_peels_and_glues() {
        let chords: Vec<(u32, u32)> = (0..25).map(|i| (i, 49 - i)).collect();
        let soc = chord_society(50, &chords);
        match gm9(&soc, 4).unwrap() {
            Gm9Outcome::Rendition(r) => assert_valid_rendition(&soc, &r, 4),
            Gm9Outcome::Crooked(_) => panic!("a nested family is crossless"),
        }
    }
}
