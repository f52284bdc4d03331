//! Exchange and augmentation arguments: rerouting a cross onto an attaching
//! path, absorbing attachments into a crooked transaction, rooting
//! transactions and linkages onto a nest, rotating a transaction around the
//! nest, and building and maintaining diverse path families and leap
//! patterns.
//!
//! Every operation here re-verifies its target predicate on the value it
//! returns (crossing, crookedness, coterminality, the leap inequalities), so
//! a successful return is itself a checked certificate.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::graph::{
    disjoint_paths, Cycle, EdgeId, Graph, GraphError, Linkage, Path, VertexId,
};
use crate::renditions::{CylindricalRendition, RenditionError};
use crate::society::{Segment, Society, SocietyError};
use crate::transactions::{
    check_omega_path, is_crooked, is_planar_transaction, paths_cross, Cross,
    Transaction, TransactionError,
};

#[derive(Debug, Error)]
pub enum ReroutingError {
    #[error("{0} is an endpoint of the reference linkage")]
    EndpointOfP(VertexId),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("not a valid leap pattern: {0}")]
    NotALeap(String),
    #[error("graph error: {0}")]
    Graph(#[from] GraphError),
    #[error("society error: {0}")]
    Society(#[from] SocietyError),
    #[error("transaction error: {0}")]
    Transaction(#[from] TransactionError),
    #[error("rendition error: {0}")]
    Rendition(#[from] RenditionError),
}

fn pre(msg: impl Into<String>) -> ReroutingError {
    ReroutingError::PreconditionViolated(msg.into())
}

fn hyp(msg: impl Into<String>) -> ReroutingError {
    ReroutingError::HypothesisViolated(msg.into())
}

// ---------------------------------------------------------------------------
// Hooks

/// Split of a path `R` relative to a subgraph `H`: the maximal subpath inside
/// `H` at each endpoint (absent when that endpoint is not in `H`) and the
/// minimal middle piece covering everything else.  The three pieces overlap
/// only in single vertices and their union is `R`; when `R ⊆ H` the interior
/// is absent and both hooks are all of `R`.
#[derive(Clone, Debug)]
pub struct HookDecomposition {
    pub hook_first: Option<Path>,
    pub hook_last: Option<Path>,
    pub interior: Option<Path>,
}

impl HookDecomposition {
    /// Internal vertices of the interior piece.
    pub fn interior_internals(&self) -> BTreeSet<VertexId> {
        match &self.interior {
            None => BTreeSet::new(),
            Some(p) => {
                let vs = p.vertices();
                vs[1..vs.len().saturating_sub(1)].iter().copied().collect()
            }
        }
    }
}

/// Decomposes `r` into its two maximal end-subpaths lying in `h` (vertices
/// and edges both) and the minimal remaining middle piece.
pub fn hooks(h: &Graph, r: &Path) -> HookDecomposition {
    let vs = r.vertices();
    let es = r.edges();
    let n = vs.len();
    let in_h = |i: usize| h.contains_vertex(vs[i]);
    let edge_in_h = |i: usize| h.contains_edge(es[i]);

    // longest prefix run: vertices 0..=pe and edges 0..pe all in h
    let prefix_end = if !in_h(0) {
        None
    } else {
        let mut pe = 0;
        while pe + 1 < n && edge_in_h(pe) && in_h(pe + 1) {
            pe += 1;
        }
        Some(pe)
    };
    let suffix_start = if !in_h(n - 1) {
        None
    } else {
        let mut ss = n - 1;
        while ss > 0 && edge_in_h(ss - 1) && in_h(ss - 1) {
            ss -= 1;
        }
        Some(ss)
    };

    if prefix_end == Some(n - 1) {
        // the whole path lies in h
        return HookDecomposition {
            hook_first: Some(r.clone()),
            hook_last: Some(r.clone()),
            interior: None,
        };
    }
    let start = prefix_end.unwrap_or(0);
    let end = suffix_start.unwrap_or(n - 1);
    debug_assert!(start < end, "interior must be nontrivial when R ⊄ H");
    let slice = |lo: usize, hi: usize| -> Path {
        r.subpath(vs[lo], vs[hi]).expect("indices on the path")
    };
    HookDecomposition {
        hook_first: prefix_end.map(|pe| {
            if pe == 0 {
                Path::trivial(vs[0])
            } else {
                slice(0, pe)
            }
        }),
        hook_last: suffix_start.map(|ss| {
            if ss == n - 1 {
                Path::trivial(vs[n - 1])
            } else {
                slice(ss, n - 1)
            }
        }),
        interior: Some(slice(start, end)),
    }
}

// ---------------------------------------------------------------------------
// The separation metric d on boundary vertices

/// Is `v` strictly inside the boundary arc walked forward from `x` to `y`?
fn strictly_between(
    society: &Society,
    x: VertexId,
    y: VertexId,
    v: VertexId,
) -> Result<bool, SocietyError> {
    let n = society.omega_len();
    let px = society.position(x)?;
    let py = society.position(y)?;
    let pv = society.position(v)?;
    if px == py {
        return Ok(false);
    }
    let rel = (pv + n - px) % n;
    let rel_y = (py + n - px) % n;
    Ok(rel > 0 && rel < rel_y)
}

/// How many members of `p` have their endpoints in different maximal
/// boundary arcs of Ω − {x, y}?  Members with an endpoint at `x` or `y`
/// are not allowed; by convention the count is 0 when `x = y`.
pub fn d_metric(
    society: &Society,
    p: &Linkage,
    x: VertexId,
    y: VertexId,
) -> Result<usize, ReroutingError> {
    society.position(x)?;
    society.position(y)?;
    for member in p.paths() {
        for v in [member.first(), member.last()] {
            if v == x || v == y {
                return Err(ReroutingError::EndpointOfP(v));
            }
        }
    }
    if x == y {
        return Ok(0);
    }
    let mut count = 0;
    for member in p.paths() {
        let a = strictly_between(society, x, y, member.first())?;
        let b = strictly_between(society, x, y, member.last())?;
        if a != b {
            count += 1;
        }
    }
    Ok(count)
}

fn d_of_paths(
    society: &Society,
    paths: &[Path],
    x: VertexId,
    y: VertexId,
) -> Result<usize, ReroutingError> {
    let l = Linkage::new(paths.to_vec())?;
    d_metric(society, &l, x, y)
}

// ---------------------------------------------------------------------------
// Rerouting a cross

/// Given a cross `(P₁, P₂)` and a path `r` from a boundary vertex `w` to a
/// vertex `z` of one of the two, internally disjoint from both and from the
/// boundary, returns a new cross in which the member containing `z` has been
/// replaced by `r` together with one of its two halves at `z`.
pub fn cross_reroute(
    society: &Society,
    cross: &Cross,
    r: &Path,
) -> Result<Cross, ReroutingError> {
    let pv: [BTreeSet<VertexId>; 2] = [cross.p.vertex_set(), cross.q.vertex_set()];
    let ends = [r.first(), r.last()];
    let on_cross = |v: VertexId| pv[0].contains(&v) || pv[1].contains(&v);
    let (w, z) = match (on_cross(ends[0]), on_cross(ends[1])) {
        (false, true) => (ends[0], ends[1]),
        (true, false) => (ends[1], ends[0]),
        _ => {
            return Err(pre(
                "exactly one endpoint of the attachment must lie on the cross",
            ))
        }
    };
    if !society.omega_contains(w) {
        return Err(pre(format!("free endpoint {w} is not on the boundary")));
    }
    let internals = &r.vertices()[1..r.vertices().len().saturating_sub(1)];
    for &v in internals {
        if on_cross(v) || society.omega_contains(v) {
            return Err(pre(format!(
                "internal vertex {v} touches the cross or the boundary"
            )));
        }
    }
    let oriented = if r.first() == w { r.clone() } else { r.reversed() };
    let (hit, other) = if pv[0].contains(&z) {
        (&cross.p, &cross.q)
    } else {
        (&cross.q, &cross.p)
    };
    // both halves of the hit member at z, tried in order of their minimum
    // vertex id so the choice is deterministic when both succeed
    let mut halves = [hit.subpath(z, hit.first())?, hit.subpath(z, hit.last())?];
    for h in &mut halves {
        if h.first() != z {
            *h = h.reversed();
        }
    }
    halves.sort_by_key(|h| h.vertex_set().first().copied());
    let other_set = other.vertex_set();
    for half in &halves {
        let candidate = if half.is_trivial() {
            oriented.clone()
        } else {
            match oriented.concat(half) {
                Ok(c) => c,
                Err(_) => continue,
            }
        };
        if check_omega_path(society, &candidate).is_err() {
            continue;
        }
        if !candidate.vertex_set().is_disjoint(&other_set) {
            continue;
        }
        if paths_cross(society, &candidate, other) {
            return Ok(Cross {
                p: candidate,
                q: other.clone(),
            });
        }
    }
    Err(pre("no half of the hit member crosses the other member"))
}

// ---------------------------------------------------------------------------
// Absorbing attachments into a crooked transaction

/// The blocking configuration that arises when neither half of the attacked
/// member can absorb the attachment: two members `s1`, `s2` (indices into
/// the transaction) with endpoints `x1, y1` and `x2, y2` such that walking
/// the boundary forward one meets `u, x1, x2, v, y2, y1` in order (`u, v`
/// the attacked member's endpoints), every other member has one endpoint in
/// the arc `x1..x2` and the other in `y2..y1`, and the attachment's boundary
/// endpoint lies in one of those two arcs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Obstruction {
    pub s1: usize,
    pub s2: usize,
    pub x1: VertexId,
    pub y1: VertexId,
    pub x2: VertexId,
    pub y2: VertexId,
}

#[derive(Clone, Debug)]
pub enum AbsorbOutcome {
    Crooked(Transaction),
    Blocked(Obstruction),
}

/// Checks the attachment preconditions shared by the absorb operations and
/// returns `(w, z)`: the free boundary endpoint and the hit vertex.
fn attachment_endpoints(
    society: &Society,
    t: &Transaction,
    q: &Path,
) -> Result<(VertexId, VertexId), ReroutingError> {
    let tv: BTreeSet<VertexId> = t.linkage().vertex_set();
    let hits: Vec<VertexId> = q
        .vertices()
        .iter()
        .copied()
        .filter(|v| tv.contains(v))
        .collect();
    if hits.len() != 1 {
        return Err(pre(format!(
            "attachment must meet the transaction in exactly one vertex, met {}",
            hits.len()
        )));
    }
    let z = hits[0];
    if q.first() != z && q.last() != z {
        return Err(pre("the hit vertex must be an endpoint of the attachment"));
    }
    let w = if q.first() == z { q.last() } else { q.first() };
    if !society.omega_contains(w) {
        return Err(pre(format!("free endpoint {w} is not on the boundary")));
    }
    let vs = q.vertices();
    for &v in &vs[1..vs.len().saturating_sub(1)] {
        if society.omega_contains(v) {
            return Err(pre(format!(
                "internal attachment vertex {v} lies on the boundary"
            )));
        }
    }
    Ok((w, z))
}

/// Tries to replace member `p_idx` by one of its halves at `z` extended by
/// the attachment, returning the first replacement that stays crooked
/// (halves tried in order of minimum vertex id).
fn try_absorb(
    society: &Society,
    t: &Transaction,
    p_idx: usize,
    q: &Path,
    z: VertexId,
) -> Option<Transaction> {
    let p = &t.paths()[p_idx];
    let oriented = if q.first() == z { q.reversed() } else { q.clone() };
    let mut halves = [
        p.subpath(z, p.first()).ok()?,
        p.subpath(z, p.last()).ok()?,
    ];
    for h in &mut halves {
        if h.first() != z {
            *h = h.reversed();
        }
    }
    halves.sort_by_key(|h| h.vertex_set().first().copied());
    for half in &halves {
        let candidate = if half.is_trivial() {
            oriented.clone()
        } else {
            match oriented.concat(half) {
                Ok(c) => c,
                Err(_) => continue,
            }
        };
        if check_omega_path(society, &candidate).is_err() {
            continue;
        }
        let mut paths: Vec<Path> = Vec::new();
        for (i, other) in t.paths().iter().enumerate() {
            if i != p_idx {
                paths.push(other.clone());
            }
        }
        paths.push(candidate);
        let Ok(linkage) = Linkage::new(paths) else {
            continue;
        };
        let Ok(t2) = Transaction::new(society, linkage) else {
            continue;
        };
        if is_crooked(society, &t2) {
            return Some(t2);
        }
    }
    None
}

/// Absorbs a single attachment `q` (ending on member `p_idx`) into a crooked
/// transaction, or exhibits the blocking pair of members that prevents it.
/// When several blocking labelings exist the lexicographically least one by
/// `(x1, x2, y2, y1)` is returned; nothing forces a particular choice here,
/// so we pick the one that is easiest to reproduce.
pub fn crooked_absorb_one(
    society: &Society,
    t: &Transaction,
    p_idx: usize,
    q: &Path,
) -> Result<AbsorbOutcome, ReroutingError> {
    if !is_crooked(society, t) {
        return Err(pre("transaction is not crooked"));
    }
    if p_idx >= t.order() {
        return Err(pre("member index out of range"));
    }
    let p = &t.paths()[p_idx];
    if q.is_trivial() {
        let v = q.first();
        if v == p.first() || v == p.last() {
            // absorbing a trivial attachment at an endpoint changes nothing
            return Ok(AbsorbOutcome::Crooked(t.clone()));
        }
        return Err(pre("trivial attachment must sit at a member endpoint"));
    }
    let (w, z) = attachment_endpoints(society, t, q)?;
    if !p.contains(z) {
        return Err(pre("attachment does not end on the named member"));
    }
    if let Some(t2) = try_absorb(society, t, p_idx, q, z) {
        return Ok(AbsorbOutcome::Crooked(t2));
    }

    // neither half keeps the transaction crooked: find the blocking pair
    let mut best: Option<Obstruction> = None;
    let others: Vec<usize> = (0..t.order()).filter(|&i| i != p_idx).collect();
    for &(u, v) in &[(p.first(), p.last()), (p.last(), p.first())] {
        for &i in &others {
            for &j in &others {
                if i == j {
                    continue;
                }
                let si = &t.paths()[i];
                let sj = &t.paths()[j];
                for (x1, y1) in [(si.first(), si.last()), (si.last(), si.first())] {
                    for (x2, y2) in
                        [(sj.first(), sj.last()), (sj.last(), sj.first())]
                    {
                        if !society.in_cyclic_order(&[u, x1, x2, v, y2, y1]) {
                            continue;
                        }
                        let seg_x = society.segment_between(x1, x2)?;
                        let seg_y = society.segment_between(y2, y1)?;
                        let split_ok = others.iter().all(|&m| {
                            let s = &t.paths()[m];
                            let (a, b) = (s.first(), s.last());
                            (seg_x.contains(a) && seg_y.contains(b))
                                || (seg_x.contains(b) && seg_y.contains(a))
                        });
                        if !split_ok {
                            continue;
                        }
                        if !seg_x.contains(w) && !seg_y.contains(w) {
                            continue;
                        }
                        let cand = Obstruction {
                            s1: i,
                            s2: j,
                            x1,
                            y1,
                            x2,
                            y2,
                        };
                        let key = |o: &Obstruction| (o.x1, o.x2, o.y2, o.y1);
                        if best.as_ref().is_none_or(|b| key(&cand) < key(b)) {
                            best = Some(cand);
                        }
                    }
                }
            }
        }
    }
    match best {
        Some(o) => Ok(AbsorbOutcome::Blocked(o)),
        None => Err(hyp(
            "neither half absorbs the attachment and no blocking pair exists",
        )),
    }
}

/// Absorbs two disjoint attachments into a crooked transaction: either one
/// of them alone replaces a half of the member it hits, or both hit the same
/// member and replace it by its two outer pieces extended by the
/// attachments (growing the order by one).
pub fn crooked_absorb_two(
    society: &Society,
    t: &Transaction,
    q1: &Path,
    q2: &Path,
) -> Result<Transaction, ReroutingError> {
    if !is_crooked(society, t) {
        return Err(pre("transaction is not crooked"));
    }
    if !q1.vertex_set().is_disjoint(&q2.vertex_set()) {
        return Err(pre("the two attachments must be disjoint"));
    }
    let (_, z1) = attachment_endpoints(society, t, q1)?;
    let (_, z2) = attachment_endpoints(society, t, q2)?;
    let member_of = |z: VertexId| t.paths().iter().position(|p| p.contains(z));
    let i1 = member_of(z1).expect("hit vertex lies on a member");
    let i2 = member_of(z2).expect("hit vertex lies on a member");
    if let Some(t2) = try_absorb(society, t, i1, q1, z1) {
        return Ok(t2);
    }
    if let Some(t2) = try_absorb(society, t, i2, q2, z2) {
        return Ok(t2);
    }
    if i1 != i2 {
        return Err(hyp(
            "single absorptions failed but the attachments hit different members",
        ));
    }
    let p = &t.paths()[i1];
    let pos1 = p.position(z1).expect("z1 on member");
    let pos2 = p.position(z2).expect("z2 on member");
    // the attachment nearer p.first() takes the first-end piece
    let (qa, za, qb, zb) = if pos1 < pos2 {
        (q1, z1, q2, z2)
    } else {
        (q2, z2, q1, z1)
    };
    let extend = |q: &Path, z: VertexId, end: VertexId| -> Result<Path, ReroutingError> {
        let oriented = if q.first() == z { q.reversed() } else { q.clone() };
        let mut half = p.subpath(z, end)?;
        if half.first() != z {
            half = half.reversed();
        }
        let joined = if half.is_trivial() {
            oriented
        } else {
            oriented.concat(&half)?
        };
        check_omega_path(society, &joined)?;
        Ok(joined)
    };
    let m1 = extend(qa, za, p.first())?;
    let m2 = extend(qb, zb, p.last())?;
    let mut paths: Vec<Path> = Vec::new();
    for (i, other) in t.paths().iter().enumerate() {
        if i != i1 {
            paths.push(other.clone());
        }
    }
    paths.push(m1);
    paths.push(m2);
    let t2 = Transaction::new(society, Linkage::new(paths)?)?;
    if !is_crooked(society, &t2) {
        return Err(hyp("double replacement is not crooked"));
    }
    Ok(t2)
}

// ---------------------------------------------------------------------------
// Diverse path families

/// Disjoint paths with both endpoints in `X = ∪ parts` and no internal
/// vertex there, each carrying a designated *major* endpoint; the majors lie
/// in pairwise distinct parts.
#[derive(Clone, Debug)]
pub struct SDiverseFamily {
    parts: Vec<BTreeSet<VertexId>>,
    paths: Vec<Path>,
    majors: Vec<VertexId>,
}

impl SDiverseFamily {
    pub fn new(
        parts: Vec<BTreeSet<VertexId>>,
        paths: Vec<Path>,
        majors: Vec<VertexId>,
    ) -> Result<Self, ReroutingError> {
        for i in 0..parts.len() {
            for j in (i + 1)..parts.len() {
                if !parts[i].is_disjoint(&parts[j]) {
                    return Err(pre("partition classes overlap"));
                }
            }
        }
        if majors.len() != paths.len() {
            return Err(pre("one major endpoint per path required"));
        }
        let fam = SDiverseFamily {
            parts,
            paths,
            majors,
        };
        let x = fam.ground_set();
        let mut seen_parts = BTreeSet::new();
        for (p, &m) in fam.paths.iter().zip(&fam.majors) {
            if p.is_trivial() {
                return Err(pre("members must be nontrivial"));
            }
            if m != p.first() && m != p.last() {
                return Err(pre("major endpoint must be an endpoint of its path"));
            }
            for v in [p.first(), p.last()] {
                if !x.contains(&v) {
                    return Err(pre(format!("endpoint {v} is outside the ground set")));
                }
            }
            let vs = p.vertices();
            for &v in &vs[1..vs.len() - 1] {
                if x.contains(&v) {
                    return Err(pre(format!(
                        "internal vertex {v} lies in the ground set"
                    )));
                }
            }
            let part = fam.part_of(m).expect("major endpoint is in the ground set");
            if !seen_parts.insert(part) {
                return Err(pre("two major endpoints share a partition class"));
            }
        }
        for i in 0..fam.paths.len() {
            for j in (i + 1)..fam.paths.len() {
                if !fam.paths[i]
                    .vertex_set()
                    .is_disjoint(&fam.paths[j].vertex_set())
                {
                    return Err(pre("members must be pairwise disjoint"));
                }
            }
        }
        Ok(fam)
    }

    pub fn parts(&self) -> &[BTreeSet<VertexId>] {
        &self.parts
    }

    pub fn paths(&self) -> &[Path] {
        &self.paths
    }

    pub fn majors(&self) -> &[VertexId] {
        &self.majors
    }

    pub fn ground_set(&self) -> BTreeSet<VertexId> {
        self.parts.iter().flatten().copied().collect()
    }

    pub fn part_of(&self, v: VertexId) -> Option<usize> {
        self.parts.iter().position(|p| p.contains(&v))
    }

    pub fn vertex_set(&self) -> BTreeSet<VertexId> {
        self.paths.iter().flat_map(|p| p.vertex_set()).collect()
    }

    /// Are the two families' major endpoints distributed over the same
    /// partition classes, member by member?
    pub fn majority_equivalent(&self, other: &SDiverseFamily) -> bool {
        if self.majors.len() != other.majors.len() {
            return false;
        }
        self.majors
            .iter()
            .zip(&other.majors)
            .all(|(&a, &b)| self.part_of(a) == other.part_of(b))
    }
}

/// Splices an attachment `r` (from a ground-set vertex `x` to an internal
/// vertex `y` of one member, otherwise avoiding the family) into the family:
/// the hit member keeps the end whose part differs from `x`'s, and the major
/// endpoint stays in the same partition class.
pub fn diverse_exchange(
    fam: &SDiverseFamily,
    r: &Path,
) -> Result<SDiverseFamily, ReroutingError> {
    if r.is_trivial() {
        return Err(pre("attachment must have length at least one"));
    }
    let x_set = fam.ground_set();
    let fam_v = fam.vertex_set();
    let (x, y) = match (x_set.contains(&r.first()), x_set.contains(&r.last())) {
        (true, false) => (r.first(), r.last()),
        (false, true) => (r.last(), r.first()),
        _ => {
            return Err(pre(
                "exactly one attachment endpoint must lie in the ground set",
            ))
        }
    };
    let meet: Vec<VertexId> = r
        .vertices()
        .iter()
        .copied()
        .filter(|v| fam_v.contains(v))
        .collect();
    if meet != [y] {
        return Err(pre("attachment must meet the family only at its far end"));
    }
    let vs = r.vertices();
    for &v in &vs[1..vs.len() - 1] {
        if x_set.contains(&v) {
            return Err(pre(format!(
                "internal attachment vertex {v} lies in the ground set"
            )));
        }
    }
    let idx = fam
        .paths
        .iter()
        .position(|p| p.contains(y))
        .expect("y is a family vertex");
    let q = &fam.paths[idx];
    if y == q.first() || y == q.last() {
        return Err(pre("attachment must end at an internal member vertex"));
    }
    let t = fam.majors[idx];
    let s = if q.first() == t { q.last() } else { q.first() };
    let oriented = if r.first() == x { r.clone() } else { r.reversed() };
    // keep the end whose class the new endpoint does not share, so the major
    // endpoint's class is preserved
    let (kept_end, new_major) = if fam.part_of(x) != fam.part_of(t) {
        (t, t)
    } else {
        (s, x)
    };
    let mut tail = q.subpath(y, kept_end)?;
    if tail.first() != y {
        tail = tail.reversed();
    }
    let spliced = oriented.concat(&tail)?;
    let mut paths = fam.paths.clone();
    let mut majors = fam.majors.clone();
    paths[idx] = spliced;
    majors[idx] = new_major;
    let out = SDiverseFamily::new(fam.parts.clone(), paths, majors)?;
    debug_assert!(out.majority_equivalent(fam));
    Ok(out)
}

/// From a diverse family of `k−1` paths and `2k−1` disjoint paths from the
/// ground set to `y_set`, produces a majority-equivalent family together
/// with one ground-set–to–`y_set` path avoiding it, by repeated splicing.
pub fn augment_diverse(
    fam: &SDiverseFamily,
    y_set: &BTreeSet<VertexId>,
    r_fam: &Linkage,
) -> Result<(SDiverseFamily, Path), ReroutingError> {
    let x_set = fam.ground_set();
    if !x_set.is_disjoint(y_set) {
        return Err(pre("target set must avoid the ground set"));
    }
    if r_fam.order() != 2 * fam.paths.len() + 1 {
        return Err(pre(format!(
            "need {} connecting paths, got {}",
            2 * fam.paths.len() + 1,
            r_fam.order()
        )));
    }
    let mut oriented: Vec<Path> = Vec::new();
    for r in r_fam.paths() {
        let p = match (x_set.contains(&r.first()), y_set.contains(&r.last())) {
            (true, true) => r.clone(),
            _ if x_set.contains(&r.last()) && y_set.contains(&r.first()) => {
                r.reversed()
            }
            _ => {
                return Err(pre(
                    "every connecting path must run from the ground set to the target set",
                ))
            }
        };
        oriented.push(p);
    }
    let mut cur = fam.clone();
    let cap = oriented
        .iter()
        .map(|p| p.len())
        .sum::<usize>()
        .max(1)
        * (fam.paths.len() + 2)
        + 8;
    for _ in 0..cap {
        let cur_v = cur.vertex_set();
        let candidates: Vec<&Path> = oriented
            .iter()
            .filter(|r| !cur_v.contains(&r.first()))
            .collect();
        if candidates.is_empty() {
            return Err(hyp("every free connecting path start is already used"));
        }
        if let Some(clean) = candidates
            .iter()
            .find(|r| r.vertex_set().is_disjoint(&cur_v))
        {
            debug_assert!(cur.majority_equivalent(fam));
            return Ok((cur, (*clean).clone()));
        }
        let mut advanced = false;
        for r in &candidates {
            let vs = r.vertices();
            let hit = vs.iter().position(|v| cur_v.contains(v)).expect(
                "a non-clean candidate meets the family",
            );
            let v = vs[hit];
            // the attachment starts at the last ground-set vertex before the
            // first family vertex, so it is internally clean
            let start = vs[..hit]
                .iter()
                .rposition(|u| x_set.contains(u))
                .expect("the start vertex lies in the ground set");
            let piece = r.subpath(vs[start], v)?;
            match diverse_exchange(&cur, &piece) {
                Ok(next) => {
                    cur = next;
                    advanced = true;
                    break;
                }
                Err(ReroutingError::PreconditionViolated(_)) => continue,
                Err(e) => return Err(e),
            }
        }
        if !advanced {
            return Err(hyp(
                "no connecting path admits an exchange with the family",
            ));
        }
    }
    Err(hyp("splicing did not terminate within the edge budget"))
}

// ---------------------------------------------------------------------------
// Leap patterns

/// A planar transaction `p` together with a disjoint linkage `q` of `k`
/// boundary paths whose endpoints are pairwise far apart in the separation
/// metric of `p`: each member admits a labeling `(s_i, t_i)` with
/// `d(s_i, t_i) ≥ l` and `d(t_i, t_j) ≥ l` for `i ≠ j`.
#[derive(Clone, Debug)]
pub struct LeapPattern {
    pub p: Linkage,
    pub q: Linkage,
    pub k: usize,
    pub l: usize,
    /// One `(s_i, t_i)` labeling witnessing the distance conditions.
    pub labeling: Vec<(VertexId, VertexId)>,
}

impl LeapPattern {
    pub fn new(
        society: &Society,
        p: Linkage,
        q: Linkage,
        k: usize,
        l: usize,
    ) -> Result<Self, ReroutingError> {
        match leap_labeling(society, &p, &q, k, l) {
            Some(labeling) => Ok(LeapPattern {
                p,
                q,
                k,
                l,
                labeling,
            }),
            None => Err(ReroutingError::NotALeap(format!(
                "no endpoint labeling satisfies the ({k}, {l}) distance conditions"
            ))),
        }
    }
}

/// Finds an endpoint labeling witnessing the `(k, l)` conditions, checking
/// all structural clauses first.  Deterministic: orientations are tried in
/// binary-counter order over the members.
fn leap_labeling(
    society: &Society,
    p: &Linkage,
    q: &Linkage,
    k: usize,
    l: usize,
) -> Option<Vec<(VertexId, VertexId)>> {
    if q.order() != k || k == 0 || l == 0 {
        return None;
    }
    if !p.vertex_set().is_disjoint(&q.vertex_set()) {
        return None;
    }
    let t = Transaction::new(society, p.clone()).ok()?;
    if !is_planar_transaction(society, &t) {
        return None;
    }
    for member in q.paths() {
        check_omega_path(society, member).ok()?;
    }
    let d = |x: VertexId, y: VertexId| d_metric(society, p, x, y).ok();
    'mask: for mask in 0..(1usize << k) {
        let mut labels = Vec::with_capacity(k);
        for (i, member) in q.paths().iter().enumerate() {
            let (s, t) = if mask & (1 << i) == 0 {
                (member.first(), member.last())
            } else {
                (member.last(), member.first())
            };
            if d(s, t)? < l {
                continue 'mask;
            }
            labels.push((s, t));
        }
        for i in 0..k {
            for j in (i + 1)..k {
                if d(labels[i].1, labels[j].1)? < l {
                    continue 'mask;
                }
            }
        }
        return Some(labels);
    }
    None
}

/// Checks the `(k, l)` leap conditions for `(p, q)`.  In twisted mode the
/// check passes if some boundary segment containing exactly one endpoint of
/// every `p`-member can be flipped so that the plain conditions hold in the
/// flipped society.
pub fn verify_leap(
    society: &Society,
    p: &Linkage,
    q: &Linkage,
    k: usize,
    l: usize,
    twisted: bool,
) -> bool {
    if !twisted {
        return leap_labeling(society, p, q, k, l).is_some();
    }
    let omega = society.omega();
    let n = omega.len();
    for i in 0..n {
        for j in 0..n {
            let Ok(seg) = society.segment_between(omega[i], omega[j]) else {
                continue;
            };
            if seg.len() == n {
                continue;
            }
            let one_each = p.paths().iter().all(|m| {
                seg.contains(m.first()) != seg.contains(m.last())
            });
            if !one_each {
                continue;
            }
            let Ok(flipped) = society.flip(&seg) else {
                continue;
            };
            if leap_labeling(&flipped, p, q, k, l).is_some() {
                return true;
            }
        }
    }
    false
}

/// Deletes removable members of `p` until none can go, and checks the
/// resulting pattern against the `k(2l+1)` size bound.
pub fn minimalize_leap(
    society: &Society,
    pattern: &LeapPattern,
) -> Result<LeapPattern, ReroutingError> {
    let (k, l) = (pattern.k, pattern.l);
    if leap_labeling(society, &pattern.p, &pattern.q, k, l).is_none() {
        return Err(ReroutingError::NotALeap(
            "input does not satisfy its own distance conditions".into(),
        ));
    }
    let mut members: Vec<Path> = pattern.p.paths().to_vec();
    'shrink: loop {
        for i in 0..members.len() {
            let mut fewer = members.clone();
            fewer.remove(i);
            let cand = Linkage::new(fewer.clone())?;
            if leap_labeling(society, &cand, &pattern.q, k, l).is_some() {
                members = fewer;
                continue 'shrink;
            }
        }
        break;
    }
    let p = Linkage::new(members)?;
    if p.order() + pattern.q.order() > k * (2 * l + 1) {
        return Err(hyp(format!(
            "minimal pattern has {} paths, above the bound {}",
            p.order() + pattern.q.order(),
            k * (2 * l + 1)
        )));
    }
    LeapPattern::new(society, p, pattern.q.clone(), k, l)
}

// ---------------------------------------------------------------------------
// Minimum-cost disjoint paths (used to reduce a linkage against a reference
// edge set before augmentation)

/// `count` vertex-disjoint paths from `sources` to `sinks`, none with an
/// internal source or sink vertex, minimizing the number of edges used
/// outside `free`.  Successive-shortest-path flow on the split digraph.
fn min_cost_disjoint_paths(
    g: &Graph,
    sources: &BTreeSet<VertexId>,
    sinks: &BTreeSet<VertexId>,
    free: &BTreeSet<EdgeId>,
    count: usize,
) -> Option<Vec<Path>> {
    #[derive(Clone)]
    struct Arc {
        to: usize,
        cap: i64,
        cost: i64,
        rev: usize,
        edge: Option<(EdgeId, VertexId)>, // host edge and head vertex
    }
    let verts: Vec<VertexId> = g.vertices().collect();
    let index: BTreeMap<VertexId, usize> =
        verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let n = verts.len();
    let (s, t) = (2 * n, 2 * n + 1);
    let mut adj: Vec<Vec<Arc>> = vec![Vec::new(); 2 * n + 2];
    let add = |adj: &mut Vec<Vec<Arc>>,
                   from: usize,
                   to: usize,
                   cost: i64,
                   edge: Option<(EdgeId, VertexId)>| {
        let rf = adj[to].len();
        let rt = adj[from].len();
        adj[from].push(Arc {
            to,
            cap: 1,
            cost,
            rev: rf,
            edge,
        });
        adj[to].push(Arc {
            to: from,
            cap: 0,
            cost: -cost,
            rev: rt,
            edge: None,
        });
    };
    for (&v, &i) in &index {
        if sources.contains(&v) {
            add(&mut adj, s, 2 * i + 1, 0, None);
        } else if sinks.contains(&v) {
            add(&mut adj, 2 * i, t, 0, None);
        } else {
            add(&mut adj, 2 * i, 2 * i + 1, 0, None);
        }
    }
    for (&e, &(u, v)) in g.edge_map() {
        let (iu, iv) = (index[&u], index[&v]);
        let cost = if free.contains(&e) { 0 } else { 1 };
        add(&mut adj, 2 * iu + 1, 2 * iv, cost, Some((e, v)));
        add(&mut adj, 2 * iv + 1, 2 * iu, cost, Some((e, u)));
    }
    // successive shortest augmenting paths (Bellman–Ford handles the
    // negative residual costs; the graphs here are small)
    for _ in 0..count {
        let m = adj.len();
        let mut dist = vec![i64::MAX; m];
        let mut pred: Vec<Option<(usize, usize)>> = vec![None; m];
        dist[s] = 0;
        for _ in 0..m {
            let mut changed = false;
            for u in 0..m {
                if dist[u] == i64::MAX {
                    continue;
                }
                for (ai, a) in adj[u].iter().enumerate() {
                    if a.cap > 0 && dist[u] + a.cost < dist[a.to] {
                        dist[a.to] = dist[u] + a.cost;
                        pred[a.to] = Some((u, ai));
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        if dist[t] == i64::MAX {
            return None;
        }
        let mut node = t;
        while node != s {
            let (u, ai) = pred[node].expect("path back to the source");
            adj[u][ai].cap -= 1;
            let rev = adj[u][ai].rev;
            adj[node][rev].cap += 1;
            node = u;
        }
    }
    // decompose: follow saturated forward arcs from each used source
    let used: Vec<usize> = adj[s]
        .iter()
        .filter(|a| a.cap == 0)
        .map(|a| a.to)
        .collect();
    let mut paths = Vec::new();
    for start in used {
        let mut vertices = vec![verts[(start - 1) / 2]];
        let mut edges = Vec::new();
        let mut node = start; // an "out" node
        loop {
            let next = adj[node]
                .iter()
                .find(|a| a.cap == 0 && a.edge.is_some() || (a.cap == 0 && a.to == t))
                .expect("flow conservation");
            if next.to == t {
                break;
            }
            let (e, head) = next.edge.expect("forward host arc");
            edges.push(e);
            vertices.push(head);
            let in_node = next.to;
            if let Some(a) = adj[in_node].iter().find(|a| a.cap == 0 && a.to == t) {
                let _ = a;
                break;
            }
            // pass through the vertex capacity arc
            let through = adj[in_node]
                .iter()
                .find(|a| a.cap == 0 && a.to == in_node + 1)
                .expect("vertex capacity arc saturated");
            node = through.to;
        }
        paths.push(Path::new(g, vertices, edges).ok()?);
    }
    if paths.len() == count {
        Some(paths)
    } else {
        None
    }
}

// ---------------------------------------------------------------------------
// Leap augmentation

/// From a `(k−1, 2kl)` pattern and `2k−1` disjoint boundary-to-`z` paths,
/// produces a `(k−1, l)` pattern whose transaction is a subfamily of the
/// input's, together with one boundary-to-`z` path avoiding it.
///
/// The connecting linkage is first rerouted to use as few edges as possible
/// outside the pattern, then members of `p` separating close-together
/// endpoints are discarded, and finally the diverse-family augmentation runs
/// on the touched members.
pub fn augment_leap(
    society: &Society,
    pattern: &LeapPattern,
    l: usize,
    z: &BTreeSet<VertexId>,
    r_fam: &Linkage,
) -> Result<(LeapPattern, Path), ReroutingError> {
    let km1 = pattern.k;
    let k = km1 + 1;
    if l == 0 {
        return Err(pre("target distance must be at least 1"));
    }
    if pattern.l < 2 * k * l {
        return Err(pre(format!(
            "input pattern distance {} is below the required {}",
            pattern.l,
            2 * k * l
        )));
    }
    if leap_labeling(society, &pattern.p, &pattern.q, km1, pattern.l).is_none() {
        return Err(ReroutingError::NotALeap(
            "input does not satisfy its own distance conditions".into(),
        ));
    }
    if r_fam.order() != 2 * k - 1 {
        return Err(pre(format!(
            "need {} connecting paths, got {}",
            2 * k - 1,
            r_fam.order()
        )));
    }
    let omega_set = society.omega_set();
    if !z.is_disjoint(&omega_set) {
        return Err(pre("target set must avoid the boundary"));
    }
    for r in r_fam.paths() {
        let ok = (omega_set.contains(&r.first()) && z.contains(&r.last()))
            || (omega_set.contains(&r.last()) && z.contains(&r.first()));
        if !ok {
            return Err(pre(
                "every connecting path must run from the boundary to the target set",
            ));
        }
    }

    // reroute the connecting linkage through as many pattern edges as
    // possible; afterwards a member that merely brushes the pattern would
    // contradict minimality, which keeps the bookkeeping below small
    let mut free: BTreeSet<EdgeId> = pattern.p.edge_set();
    free.extend(pattern.q.edge_set());
    let reduced = min_cost_disjoint_paths(
        society.graph(),
        &omega_set,
        z,
        &free,
        2 * k - 1,
    )
    .ok_or_else(|| hyp("fewer connecting paths than hypothesized"))?;
    let r_vertices: BTreeSet<VertexId> =
        reduced.iter().flat_map(|p| p.vertex_set()).collect();

    // members of q touched by the rerouted linkage go through the diverse
    // augmentation; untouched ones survive unchanged
    let mut touched = Vec::new();
    let mut untouched = Vec::new();
    for (i, member) in pattern.q.paths().iter().enumerate() {
        if member.vertex_set().is_disjoint(&r_vertices) {
            untouched.push(i);
        } else {
            touched.push(i);
        }
    }
    let t_count = touched.len();
    let q_vertices = pattern.q.vertex_set();
    let mut r_prime: Vec<Path> = Vec::new();
    let mut r_spare: Vec<Path> = Vec::new();
    for p in &reduced {
        if p.vertex_set().is_disjoint(&q_vertices) {
            r_spare.push(p.clone());
        } else {
            r_prime.push(p.clone());
        }
    }
    if r_prime.len() > 2 * t_count + 1 {
        return Err(hyp(format!(
            "{} connecting paths touch the pattern after rerouting, more than {}",
            r_prime.len(),
            2 * t_count + 1
        )));
    }
    while r_prime.len() < 2 * t_count + 1 {
        r_prime.push(r_spare.pop().expect("enough spare connecting paths"));
    }

    // survivors of p: members untouched by the whole rerouted linkage
    let p0: Vec<Path> = pattern
        .p
        .paths()
        .iter()
        .filter(|m| m.vertex_set().is_disjoint(&r_vertices))
        .cloned()
        .collect();

    // boundary endpoints of the working paths
    let mut x_set: BTreeSet<VertexId> = q_vertices
        .intersection(&omega_set)
        .copied()
        .collect();
    for p in &r_prime {
        for v in [p.first(), p.last()] {
            if omega_set.contains(&v) {
                x_set.insert(v);
            }
        }
    }

    // drop members separating boundary endpoints that are close but not
    // coincident, until every pair is either together or at distance ≥ l
    let mut pa = p0;
    'descend: loop {
        for &x in &x_set {
            for &y in &x_set {
                let d = d_of_paths(society, &pa, x, y)?;
                if d > 0 && d < l {
                    pa.retain(|m| {
                        let a = strictly_between(society, x, y, m.first())
                            .unwrap_or(false);
                        let b = strictly_between(society, x, y, m.last())
                            .unwrap_or(false);
                        a == b
                    });
                    continue 'descend;
                }
            }
        }
        break;
    }

    // partition the boundary endpoints by zero distance
    let mut parts: Vec<BTreeSet<VertexId>> = Vec::new();
    for &x in &x_set {
        let mut placed = false;
        for part in parts.iter_mut() {
            let rep = *part.iter().next().expect("classes are nonempty");
            if d_of_paths(society, &pa, x, rep)? == 0 {
                part.insert(x);
                placed = true;
                break;
            }
        }
        if !placed {
            parts.push([x].into_iter().collect());
        }
    }

    let (q_new, r_clean) = if t_count == 0 {
        (
            pattern.q.paths().to_vec(),
            r_prime
                .first()
                .cloned()
                .expect("at least one connecting path"),
        )
    } else {
        let fam = SDiverseFamily::new(
            parts,
            touched.iter().map(|&i| pattern.q.paths()[i].clone()).collect(),
            touched.iter().map(|&i| pattern.labeling[i].1).collect(),
        )?;
        let y_set: BTreeSet<VertexId> = r_prime
            .iter()
            .map(|p| if z.contains(&p.last()) { p.last() } else { p.first() })
            .collect();
        let (fam2, clean) =
            augment_diverse(&fam, &y_set, &Linkage::new(r_prime)?)?;
        let mut q_new: Vec<Path> = fam2.paths().to_vec();
        for &i in &untouched {
            q_new.push(pattern.q.paths()[i].clone());
        }
        (q_new, clean)
    };

    let out = LeapPattern::new(
        society,
        Linkage::new(pa)?,
        Linkage::new(q_new)?,
        km1,
        l,
    )
    .map_err(|e| hyp(format!("augmented family misses the distance bound: {e}")))?;
    let out_v: BTreeSet<VertexId> = out
        .p
        .vertex_set()
        .union(&out.q.vertex_set())
        .copied()
        .collect();
    if !r_clean.vertex_set().is_disjoint(&out_v) {
        return Err(hyp("returned connecting path touches the new pattern"));
    }
    Ok((out, r_clean))
}

// ---------------------------------------------------------------------------
// Nest-relative operations: rooting, the coterminal descent, and rotation

/// The vertex set of the avoidance subgraph for rooting: the two guard
/// linkages plus every nest-cycle arc running between guard vertices without
/// meeting any of the four linkages internally.
fn rooting_guard_vertices(
    r_guards: &Linkage,
    all_linkages: &Linkage,
    nest: &[Cycle],
) -> BTreeSet<VertexId> {
    let rv = r_guards.vertex_set();
    let linkv = all_linkages.vertex_set();
    let mut j = rv.clone();
    for c in nest {
        let vs = c.vertices();
        let n = vs.len();
        let hits: Vec<usize> =
            (0..n).filter(|&i| linkv.contains(&vs[i])).collect();
        if hits.len() < 2 {
            continue;
        }
        for (idx, &a) in hits.iter().enumerate() {
            let b = hits[(idx + 1) % hits.len()];
            if rv.contains(&vs[a]) && rv.contains(&vs[b]) {
                let mut i = a;
                loop {
                    j.insert(vs[i]);
                    if i == b {
                        break;
                    }
                    i = (i + 1) % n;
                }
            }
        }
    }
    j
}

/// Reroutes a transaction of order `r` between the segments `x1` and `x2`
/// so that it is coterminal with the radial linkages `p1 ∪ p2` up to the
/// `r+1`-st nest cycle, staying inside the transaction, the two radial
/// linkages and the first `r` cycles minus the guard region around
/// `r1 ∪ r2`.
#[allow(clippy::too_many_arguments)]
pub fn root_transaction(
    society: &Society,
    rend: &CylindricalRendition,
    nest: &[Cycle],
    p1: &Linkage,
    p2: &Linkage,
    r1: &Linkage,
    r2: &Linkage,
    segments: (&Segment, &Segment, &Segment, &Segment),
    t: &Transaction,
) -> Result<Transaction, ReroutingError> {
    let (x1, y1, x2, y2) = segments;
    let r = p1.order();
    if r == 0 || p2.order() != r || t.order() != r {
        return Err(pre("the radial linkages and the transaction must share an order ≥ 1"));
    }
    if r1.order() != 2 || r2.order() != 2 {
        return Err(pre("each guard linkage must have exactly two members"));
    }
    if nest.len() < r + 1 {
        return Err(pre(format!(
            "need a nest of at least {} cycles, got {}",
            r + 1,
            nest.len()
        )));
    }
    let segs = [x1, y1, x2, y2];
    for (i, a) in segs.iter().enumerate() {
        for b in segs.iter().skip(i + 1) {
            if !a.is_disjoint(b) {
                return Err(pre("the four boundary segments must be disjoint"));
            }
        }
    }
    let reps: Vec<VertexId> = segs
        .iter()
        .map(|s| s.first().ok_or_else(|| pre("segments must be nonempty")))
        .collect::<Result<_, _>>()?;
    if !society.in_cyclic_order(&reps) {
        return Err(pre("segments must appear in the order X1, Y1, X2, Y2"));
    }
    let mut all_paths: Vec<Path> = Vec::new();
    for l in [p1, p2, r1, r2] {
        all_paths.extend(l.paths().iter().cloned());
    }
    let all = Linkage::new(all_paths)
        .map_err(|_| pre("the four linkages must be pairwise disjoint"))?;
    if !crate::renditions::orthogonality(
        society,
        rend,
        nest,
        &all,
        crate::renditions::OrthogonalityMode::Radial,
    ) {
        return Err(pre("the linkages are not radial and orthogonal to the nest"));
    }
    let endpoint_in = |l: &Linkage, s: &Segment| {
        l.paths()
            .iter()
            .all(|p| s.contains(p.first()) || s.contains(p.last()))
    };
    if !endpoint_in(p1, x1)
        || !endpoint_in(p2, x2)
        || !endpoint_in(r1, y1)
        || !endpoint_in(r2, y2)
    {
        return Err(pre("linkage endpoints do not match their segments"));
    }
    let guards = Linkage::new(
        r1.paths().iter().chain(r2.paths()).cloned().collect(),
    )?;
    let jv = rooting_guard_vertices(&guards, &all, nest);
    let tv = t.linkage().vertex_set();
    if !tv.is_disjoint(&jv) {
        return Err(pre("the transaction must avoid the guard region"));
    }
    for p in t.paths() {
        let ok = (x1.contains(p.first()) && x2.contains(p.last()))
            || (x2.contains(p.first()) && x1.contains(p.last()));
        if !ok {
            return Err(pre("the transaction must run from X1 to X2"));
        }
    }

    let g = society.graph();
    let mut h = Graph::empty();
    for p in p1.paths().iter().chain(p2.paths()) {
        h = h.union(&p.as_graph(g))?;
    }
    for c in nest.iter().take(r) {
        h = h.union(&c.as_graph(g))?;
    }
    let h = h.without_vertices(&jv);
    let comps = h.components();
    let side = |seg: &Segment| -> BTreeSet<VertexId> {
        comps
            .iter()
            .filter(|c| seg.vertices().iter().any(|v| c.contains(v)))
            .flatten()
            .copied()
            .collect()
    };
    let h1v = side(x1);
    let h2v = side(x2);
    let cr: BTreeSet<VertexId> = nest[r - 1].vertex_set();
    let a_set: BTreeSet<VertexId> = cr.intersection(&h1v).copied().collect();
    let b_set: BTreeSet<VertexId> = cr.intersection(&h2v).copied().collect();

    let mut gp = h.induced(&h1v).union(&h.induced(&h2v))?;
    for p in t.paths() {
        let vs = p.vertices();
        let interesting: Vec<usize> = (0..vs.len())
            .filter(|&i| a_set.contains(&vs[i]) || b_set.contains(&vs[i]))
            .collect();
        let mut piece: Option<Path> = None;
        for w in interesting.windows(2) {
            let (i, j) = (w[0], w[1]);
            let ai = a_set.contains(&vs[i]);
            let aj = a_set.contains(&vs[j]);
            if ai != aj {
                piece = Some(p.subpath(vs[i], vs[j])?);
                break;
            }
        }
        let piece = piece.ok_or_else(|| {
            hyp("a transaction member does not cross between the two sides")
        })?;
        gp = gp.union(&piece.as_graph(g))?;
    }

    let (linkage, _) = disjoint_paths(
        &gp,
        &x1.vertex_set(),
        &x2.vertex_set(),
        &society.omega_set(),
    );
    if linkage.order() < r {
        return Err(hyp(format!(
            "only {} disjoint rooted paths exist, need {}",
            linkage.order(),
            r
        )));
    }
    let chosen = Linkage::new(linkage.paths()[..r].to_vec())?;
    let q = Transaction::new(society, chosen)?;
    // the construction keeps Q inside the allowed vertex set
    debug_assert!({
        let mut allowed = tv.clone();
        allowed.extend(p1.vertex_set());
        allowed.extend(p2.vertex_set());
        for c in nest.iter().take(r) {
            allowed.extend(c.vertex_set().difference(&jv).copied());
        }
        q.linkage().vertex_set().is_subset(&allowed)
    });
    let p_all = Linkage::new(
        p1.paths().iter().chain(p2.paths()).cloned().collect(),
    )?;
    if !crate::renditions::coterminal(society, &rend.disk, &nest[r], q.linkage(), &p_all) {
        return Err(hyp("rerouted transaction is not coterminal with the radial linkages"));
    }
    Ok(q)
}

/// Reroutes a linkage of order `r` from `z` (inside the central cell) to the
/// boundary so that it is coterminal with the radial linkage `p1` up to the
/// `r+1`-st nest cycle.
pub fn root_linkage(
    society: &Society,
    rend: &CylindricalRendition,
    nest: &[Cycle],
    p1: &Linkage,
    z: &BTreeSet<VertexId>,
    t: &Linkage,
) -> Result<Linkage, ReroutingError> {
    let r = p1.order();
    if r == 0 || t.order() != r {
        return Err(pre("the radial linkage and the rerouted linkage must share an order ≥ 1"));
    }
    if nest.len() < r + 1 {
        return Err(pre(format!(
            "need a nest of at least {} cycles, got {}",
            r + 1,
            nest.len()
        )));
    }
    let central = &rend.disk.cells[rend.c0];
    if !z.iter().all(|v| central.sigma.contains_vertex(*v)) {
        return Err(pre("the source set must lie in the central cell"));
    }
    if !crate::renditions::orthogonality(
        society,
        rend,
        nest,
        p1,
        crate::renditions::OrthogonalityMode::Radial,
    ) {
        return Err(pre("the linkage is not radial and orthogonal to the nest"));
    }
    let omega_set = society.omega_set();
    for p in t.paths() {
        let ok = (z.contains(&p.first()) && omega_set.contains(&p.last()))
            || (z.contains(&p.last()) && omega_set.contains(&p.first()));
        if !ok {
            return Err(pre("every member must run from the source set to the boundary"));
        }
    }

    let g = society.graph();
    let mut h = Graph::empty();
    for p in p1.paths() {
        h = h.union(&p.as_graph(g))?;
    }
    for c in nest.iter().take(r) {
        h = h.union(&c.as_graph(g))?;
    }
    let c1v = nest[r - 1].vertex_set();
    let mut gp = h;
    for p in t.paths() {
        let oriented = if z.contains(&p.first()) { p.clone() } else { p.reversed() };
        let vs = oriented.vertices();
        // the piece from the source until the path first leaves the r-th disk
        let cut = vs
            .iter()
            .position(|v| c1v.contains(v))
            .unwrap_or(vs.len() - 1);
        let piece = oriented.subpath(vs[0], vs[cut])?;
        if piece.is_trivial() {
            gp = gp.union(&Graph::new([vs[0]], [])?)?;
        } else {
            gp = gp.union(&piece.as_graph(g))?;
        }
    }
    let x: BTreeSet<VertexId> = p1
        .paths()
        .iter()
        .flat_map(|p| [p.first(), p.last()])
        .filter(|v| omega_set.contains(v))
        .collect();
    let (linkage, _) = disjoint_paths(&gp, z, &x, &omega_set);
    if linkage.order() < r {
        return Err(hyp(format!(
            "only {} disjoint rooted paths exist, need {}",
            linkage.order(),
            r
        )));
    }
    let q = Linkage::new(linkage.paths()[..r].to_vec())?;
    if !crate::renditions::coterminal(society, &rend.disk, &nest[r], &q, p1) {
        return Err(hyp("rerouted linkage is not coterminal with the radial linkage"));
    }
    Ok(q)
}

/// Makes a crooked transaction coterminal with the radial linkage `p`
/// (of size `2r+6`) up to the `2r+7`-th nest cycle, by repeatedly absorbing
/// two attachment paths found in the static subgraph spanned by `p`, the
/// first `2r+6` cycles and the boundary.  Returns the transaction together
/// with the trace of the descent potential (total edges of the unhooked
/// interiors), which decreases strictly at every step.
pub fn crooked_coterminal(
    society: &Society,
    rend: &CylindricalRendition,
    nest: &[Cycle],
    p: &Linkage,
    r: usize,
    start: &Transaction,
) -> Result<(Transaction, Vec<usize>), ReroutingError> {
    if r == 0 {
        return Err(pre("the target order must be at least 1"));
    }
    if nest.len() < 2 * r + 7 {
        return Err(pre(format!(
            "need a nest of at least {} cycles, got {}",
            2 * r + 7,
            nest.len()
        )));
    }
    if p.order() != 2 * r + 6 {
        return Err(pre(format!(
            "need a radial linkage of {} members, got {}",
            2 * r + 6,
            p.order()
        )));
    }
    if !crate::renditions::orthogonality(
        society,
        rend,
        nest,
        p,
        crate::renditions::OrthogonalityMode::Radial,
    ) {
        return Err(pre("the linkage is not radial and orthogonal to the nest"));
    }
    if !is_crooked(society, start) || start.order() < r {
        return Err(pre(format!(
            "need a crooked transaction of order at least {r}"
        )));
    }
    let r_max = r.max(4);
    let mut q = start.clone();
    while q.order() > r_max {
        q = crate::transactions::shrink_crooked(society, &q)?;
    }

    let g = society.graph();
    let mut h = Graph::new(society.omega().iter().copied(), [])?;
    for member in p.paths() {
        h = h.union(&member.as_graph(g))?;
    }
    for c in nest.iter().take(2 * r + 6) {
        h = h.union(&c.as_graph(g))?;
    }
    let x: BTreeSet<VertexId> = p
        .vertex_set()
        .intersection(&society.omega_set())
        .copied()
        .collect();
    let level = &nest[2 * r + 6];

    let potential = |t: &Transaction| -> usize {
        let mut edges: BTreeSet<EdgeId> = BTreeSet::new();
        for member in t.paths() {
            if let Some(interior) = hooks(&h, member).interior {
                edges.extend(interior.edges().iter().copied());
            }
        }
        edges.len()
    };

    let mut trace = vec![potential(&q)];
    let cap = g.num_edges() + 2;
    for _ in 0..cap {
        if crate::renditions::coterminal(society, &rend.disk, level, q.linkage(), p) {
            return Ok((q, trace));
        }
        // attachment targets: internal vertices of the unhooked interiors
        // that the static subgraph can reach
        let mut targets: BTreeSet<VertexId> = BTreeSet::new();
        for member in q.paths() {
            targets.extend(
                hooks(&h, member)
                    .interior_internals()
                    .iter()
                    .filter(|v| h.contains_vertex(**v)),
            );
        }
        let qv = q.linkage().vertex_set();
        let sources: BTreeSet<VertexId> =
            x.difference(&qv).copied().collect();
        let (attachments, _) = disjoint_paths(&h, &sources, &targets, &qv);
        let usable: Vec<&Path> = attachments
            .paths()
            .iter()
            .filter(|a| !a.is_trivial())
            .collect();
        if usable.len() < 2 {
            return Err(hyp(
                "fewer than two attachment paths reach the unhooked interiors",
            ));
        }
        let mut next = crooked_absorb_two(society, &q, usable[0], usable[1])?;
        while next.order() > r_max {
            next = crate::transactions::shrink_crooked(society, &next)?;
        }
        if next.order() < r {
            return Err(hyp("absorption dropped the order below the target"));
        }
        let val = potential(&next);
        if val >= *trace.last().expect("trace is nonempty") {
            return Err(hyp("descent potential failed to decrease"));
        }
        trace.push(val);
        q = next;
    }
    Err(hyp("coterminal descent did not terminate"))
}

/// The single component of `cycle ∩ path-family member` as an index set of
/// cycle positions, or `None` if the member misses the cycle.
fn cycle_meet(cycle: &Cycle, member: &Path) -> Option<Vec<usize>> {
    let mv = member.vertex_set();
    let hits: Vec<usize> = (0..cycle.len())
        .filter(|&i| mv.contains(&cycle.vertices()[i]))
        .collect();
    if hits.is_empty() {
        None
    } else {
        Some(hits)
    }
}

/// Rotates a linkage of boundary paths coterminal with the radial linkage
/// `p` onto new endpoints: given the current endpoints `x_1..x_2p` (in
/// boundary order) and distinct targets `x'_1..x'_2p` (endpoints of `p`, in
/// boundary order), returns a linkage coterminal with `p` up to the
/// `4p+2`-nd nest cycle whose members pair the targets exactly as the input
/// paired the `x_i`.
pub fn rotate_transaction(
    society: &Society,
    rend: &CylindricalRendition,
    nest: &[Cycle],
    p: &Linkage,
    q: &Linkage,
    targets: &[VertexId],
) -> Result<Linkage, ReroutingError> {
    let g = society.graph();
    let pq = q.order();
    if pq == 0 {
        return Err(pre("the rotated linkage must be nonempty"));
    }
    if nest.len() < 4 * pq + 2 {
        return Err(pre(format!(
            "need a nest of at least {} cycles, got {}",
            4 * pq + 2,
            nest.len()
        )));
    }
    if p.order() < 4 * pq {
        return Err(pre(format!(
            "need a radial linkage of at least {} members, got {}",
            4 * pq,
            p.order()
        )));
    }
    if !crate::renditions::orthogonality(
        society,
        rend,
        nest,
        p,
        crate::renditions::OrthogonalityMode::Radial,
    ) {
        return Err(pre("the linkage is not radial and orthogonal to the nest"));
    }
    if !crate::renditions::coterminal(society, &rend.disk, &nest[0], q, p) {
        return Err(pre("the linkage is not coterminal with the radial linkage"));
    }
    if targets.len() != 2 * pq {
        return Err(pre(format!(
            "need {} target endpoints, got {}",
            2 * pq,
            targets.len()
        )));
    }
    if !society.in_cyclic_order(targets)
        && targets.len() > 2
    {
        return Err(pre("targets must be listed in boundary order"));
    }
    let p_ends: BTreeSet<VertexId> = p
        .paths()
        .iter()
        .flat_map(|m| [m.first(), m.last()])
        .collect();
    if !targets.iter().all(|t| p_ends.contains(t)) {
        return Err(pre("every target must be an endpoint of the radial linkage"));
    }

    // current endpoints x_1..x_2p in boundary order
    let mut xs: Vec<VertexId> = q
        .paths()
        .iter()
        .flat_map(|m| [m.first(), m.last()])
        .collect();
    xs.sort_by_key(|v| society.position(*v).unwrap_or(usize::MAX));
    let member_with_end = |x: VertexId| -> Result<&Path, ReroutingError> {
        p.paths()
            .iter()
            .find(|m| m.first() == x || m.last() == x)
            .ok_or_else(|| pre(format!("{x} is not an endpoint of the radial linkage")))
    };
    // orient each relevant radial member outward-in from its boundary end
    let oriented_from = |m: &Path, x: VertexId| -> Path {
        if m.first() == x {
            m.clone()
        } else {
            m.reversed()
        }
    };
    let first_hit = |m: &Path, cycle: &Cycle| -> Result<VertexId, ReroutingError> {
        let cv = cycle.vertex_set();
        m.vertices()
            .iter()
            .copied()
            .find(|v| cv.contains(v))
            .ok_or_else(|| hyp("a radial member misses a nest cycle"))
    };

    let c1 = &nest[0];
    let c_mid = &nest[2 * pq]; // C_{2p+1}
    let c_mid_out = &nest[2 * pq + 1]; // C_{2p+2}
    let c_in2 = &nest[1]; // C_2
    let c_out = &nest[4 * pq]; // C_{4p+1}

    let mut tails: Vec<Path> = Vec::new(); // P_i = x_i .. y_i
    let mut ys: Vec<VertexId> = Vec::new();
    let mut rs: Vec<Path> = Vec::new(); // R_i = y_i .. C_{2p+1}
    for &x in &xs {
        let m = oriented_from(member_with_end(x)?, x);
        let y = first_hit(&m, c1)?;
        let tail = m.subpath(x, y)?;
        let a = {
            let cv = c_mid.vertex_set();
            tail.vertices()
                .iter()
                .rev()
                .copied()
                .find(|v| cv.contains(v))
                .ok_or_else(|| hyp("a tail misses the middle nest cycle"))?
        };
        let r_i = tail.subpath(y, a)?;
        rs.push(if r_i.first() == y { r_i } else { r_i.reversed() });
        ys.push(y);
        tails.push(tail);
    }
    let mut ss: Vec<Path> = Vec::new(); // S_i = x'_i .. C_{2p+2}
    for &x in targets {
        let m = oriented_from(member_with_end(x)?, x);
        let b = first_hit(&m, c_mid_out)?;
        ss.push(m.subpath(x, b)?);
    }
    // the middle portion of every radial member, from C_2 out to C_{4p+1}
    let mut bars: Vec<Path> = Vec::new();
    for m in p.paths() {
        let om = oriented_from(m, if society.omega_contains(m.first()) { m.first() } else { m.last() });
        let inner = {
            let cv = c_in2.vertex_set();
            om.vertices()
                .iter()
                .rev()
                .copied()
                .find(|v| cv.contains(v))
                .ok_or_else(|| hyp("a radial member misses the second cycle"))?
        };
        let outer = first_hit(&om, c_out)?;
        bars.push(om.subpath(outer, inner)?);
    }

    // the guide path from y_1 to x'_1 through the middle cycle, chosen to
    // cross as few radial members as possible
    let x1 = xs[0];
    let x1p = targets[0];
    let guide: Path = if x1 == x1p {
        tails[0].clone()
    } else {
        let a = rs[0].last();
        let target_member = oriented_from(member_with_end(x1p)?, x1p);
        let b = first_hit(&target_member, c_mid)?;
        let (arc1, arc2) = c_mid.arcs(a, b)?;
        let count = |arc: &Path| {
            let av = arc.vertex_set();
            p.paths()
                .iter()
                .filter(|m| !m.vertex_set().is_disjoint(&av))
                .count()
        };
        let arc = if count(&arc1) <= count(&arc2) { arc1 } else { arc2 };
        let arc = if arc.first() == a { arc } else { arc.reversed() };
        let into = target_member.subpath(b, x1p)?;
        let into = if into.first() == b { into } else { into.reversed() };
        let head = rs[0].clone();
        let head = if head.first() == ys[0] { head } else { head.reversed() };
        head.concat(&arc).and_then(|h| h.concat(&into))?
    };
    let guide_v = guide.vertex_set();

    // per-cycle clockwise orientation: fixed on the middle cycle so that the
    // guide's arc runs from the target member to the first tail clockwise,
    // then propagated to the other cycles by matching the cyclic order of
    // the radial members
    let member_order = |cycle: &Cycle| -> Result<Vec<(usize, usize)>, ReroutingError> {
        let mut order: Vec<(usize, usize)> = Vec::new(); // (position, member)
        for (i, m) in p.paths().iter().enumerate() {
            let hits = cycle_meet(cycle, m)
                .ok_or_else(|| hyp("a radial member misses a nest cycle"))?;
            order.push((hits[0], i));
        }
        order.sort();
        Ok(order)
    };
    let ref_order: Vec<usize> = member_order(c_mid)?
        .into_iter()
        .map(|(_, m)| m)
        .collect();
    // is the middle cycle's listed direction clockwise?  walk the guide's
    // middle-cycle component from the target side to the tail side
    let mid_clockwise: bool = if x1 == x1p {
        true // either orientation works when the guide stays on one member
    } else {
        let a = rs[0].last();
        let vs = guide.vertices();
        let pa = vs.iter().position(|&v| v == a).expect("a on the guide");
        // the guide enters the middle-cycle arc at `a` and continues along
        // it toward the target member; deletions go on that side
        let nxt = vs[pa + 1];
        let cyc = c_mid.vertices();
        let n = cyc.len();
        let ia = cyc.iter().position(|&v| v == a).expect("a on the cycle");
        if nxt == cyc[(ia + 1) % n] {
            true
        } else if nxt == cyc[(ia + n - 1) % n] {
            false
        } else {
            return Err(hyp("the guide leaves the middle cycle irregularly"));
        }
    };
    let same_cyclic = |a: &[usize], b: &[usize]| -> bool {
        let n = a.len();
        (0..n).any(|shift| (0..n).all(|i| a[(i + shift) % n] == b[i]))
    };
    let clockwise_of = |cycle: &Cycle| -> Result<bool, ReroutingError> {
        let order: Vec<usize> = member_order(cycle)?
            .into_iter()
            .map(|(_, m)| m)
            .collect();
        let reversed: Vec<usize> = order.iter().rev().copied().collect();
        if same_cyclic(&order, &ref_order) {
            Ok(mid_clockwise)
        } else if same_cyclic(&reversed, &ref_order) {
            Ok(!mid_clockwise)
        } else {
            Err(hyp("nest cycles disagree on the radial member order"))
        }
    };

    // assemble the routing graph and apply the two deletion rules
    let mut hp = Graph::empty();
    for c in nest.iter().take(4 * pq + 1) {
        hp = hp.union(&c.as_graph(g))?;
    }
    for path in rs.iter().chain(ss.iter()).chain(bars.iter()) {
        hp = hp.union(&path.as_graph(g))?;
    }
    let mut deleted: BTreeSet<EdgeId> = BTreeSet::new();
    for (i, cycle) in nest.iter().enumerate().take(4 * pq + 1).skip(1) {
        let cw = clockwise_of(cycle)?;
        let vs = cycle.vertices();
        let n = vs.len();
        let in_guide: Vec<bool> = vs.iter().map(|v| guide_v.contains(v)).collect();
        if !in_guide.iter().any(|&b| b) {
            return Err(hyp(format!("the guide misses nest cycle {}", i + 1)));
        }
        // counterclockwise step in listed indices
        let step = |t: usize| if cw { (t + 1) % n } else { (t + n - 1) % n };
        let boundary = (0..n)
            .find(|&t| in_guide[t] && !in_guide[step(t)])
            .ok_or_else(|| hyp("the guide covers a whole nest cycle"))?;
        let edge_idx = if cw { boundary } else { (boundary + n - 1) % n };
        deleted.insert(cycle.edges()[edge_idx]);
    }
    let mid_pos_of = |bar: &Path| -> Option<(usize, usize)> {
        // positions of the bar's C_{2p+1} and C_{2p+2} hits (bar runs
        // outer-to-inner)
        let vmid = c_mid.vertex_set();
        let vout = c_mid_out.vertex_set();
        let vs = bar.vertices();
        let i_mid = vs.iter().rposition(|v| vmid.contains(v))?;
        let i_out = vs.iter().position(|v| vout.contains(v))?;
        Some((i_out.min(i_mid), i_mid.max(i_out)))
    };
    for bar in &bars {
        if bar.vertex_set().is_disjoint(&guide_v) {
            continue;
        }
        let Some((lo, hi)) = mid_pos_of(bar) else {
            continue;
        };
        let vs = bar.vertices();
        for e in lo..hi {
            let touches_guide =
                guide_v.contains(&vs[e]) || guide_v.contains(&vs[e + 1]);
            if touches_guide {
                deleted.insert(bar.edges()[e]);
            }
        }
    }
    let kept: Vec<(EdgeId, (VertexId, VertexId))> = hp
        .edge_map()
        .iter()
        .filter(|(e, _)| !deleted.contains(e))
        .map(|(&e, &pq_)| (e, pq_))
        .collect();
    let hp = Graph::new(hp.vertices(), kept)?;

    // route the replacement linkage and check the forced pairing
    let y_set: BTreeSet<VertexId> = ys.iter().copied().collect();
    let target_set: BTreeSet<VertexId> = targets.iter().copied().collect();
    let mut forbidden = y_set.clone();
    forbidden.extend(target_set.iter().copied());
    let (l, _) = disjoint_paths(&hp, &y_set, &target_set, &forbidden);
    if l.order() < 2 * pq {
        return Err(hyp(format!(
            "only {} rotation paths exist, need {}",
            l.order(),
            2 * pq
        )));
    }
    let mut leg: BTreeMap<VertexId, Path> = BTreeMap::new(); // keyed by y_i
    for path in l.paths() {
        let o = if y_set.contains(&path.first()) {
            path.clone()
        } else {
            path.reversed()
        };
        leg.insert(o.first(), o);
    }
    for (i, &y) in ys.iter().enumerate() {
        let path = leg
            .get(&y)
            .ok_or_else(|| hyp("a rotation path misses its source"))?;
        if path.last() != targets[i] {
            return Err(hyp(format!(
                "rotation paired {} with {}, expected {}",
                y,
                path.last(),
                targets[i]
            )));
        }
    }

    // splice: each member keeps its portion between the first nest cycle
    // and continues along the rotation paths to the new endpoints
    let idx_of_x: BTreeMap<VertexId, usize> =
        xs.iter().enumerate().map(|(i, &x)| (x, i)).collect();
    let mut out: Vec<Path> = Vec::new();
    for member in q.paths() {
        let i = idx_of_x[&member.first()];
        let j = idx_of_x[&member.last()];
        let middle = member.subpath(ys[i], ys[j])?;
        let middle = if middle.first() == ys[i] {
            middle
        } else {
            middle.reversed()
        };
        let li = leg[&ys[i]].reversed(); // x'_i .. y_i
        let lj = &leg[&ys[j]]; // y_j .. x'_j
        let spliced = li.concat(&middle).and_then(|s| s.concat(lj))?;
        check_omega_path(society, &spliced)?;
        out.push(spliced);
    }
    let q_new = Linkage::new(out)?;
    if !crate::renditions::coterminal(
        society,
        &rend.disk,
        &nest[4 * pq + 1],
        &q_new,
        p,
    ) {
        return Err(hyp("rotated linkage is not coterminal with the radial linkage"));
    }
    Ok(q_new)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;

    /// Adds edges to a graph, assigning ids above any existing ones.
    fn extend_graph(g: &Graph, extra: &[(u32, u32)]) -> Graph {
        let next = g.edge_map().keys().max().map_or(0, |e| e + 1);
        let verts: BTreeSet<u32> = extra.iter().flat_map(|&(u, v)| [u, v]).collect();
        let added = Graph::new(
            verts,
            extra
                .iter()
                .enumerate()
                .map(|(i, &(u, v))| (next + i as u32, (u, v))),
        )
        .unwrap();
        g.union(&added).unwrap()
    }

    /// A society on boundary 0..n-1 whose graph consists of one 2-edge path
    /// per chord, routed through a fresh internal vertex 100+i.
    fn chord_society(n: u32, chords: &[(u32, u32)]) -> (Society, Linkage) {
        let mut edges = Vec::new();
        for (i, &(u, v)) in chords.iter().enumerate() {
            let mid = 100 + i as u32;
            edges.push((u, mid));
            edges.push((mid, v));
        }
        let mut g = Graph::from_edge_list(&edges);
        // boundary vertices may be isolated
        g = g
            .union(&Graph::new(0..n, []).unwrap())
            .unwrap();
        let soc = Society::new(g.clone(), (0..n).collect()).unwrap();
        let paths = chords
            .iter()
            .enumerate()
            .map(|(i, &(u, v))| {
                let mid = 100 + i as u32;
                let e1 = g.edge_between(u, mid).unwrap();
                let e2 = g.edge_between(mid, v).unwrap();
                Path::new(&g, vec![u, mid, v], vec![e1, e2]).unwrap()
            })
            .collect();
        (soc, Linkage::new(paths).unwrap())
    }

    fn chord_path(soc: &Society, u: u32, mid: u32, v: u32) -> Path {
        let g = soc.graph();
        Path::new(
            g,
            vec![u, mid, v],
            vec![
                g.edge_between(u, mid).unwrap(),
                g.edge_between(mid, v).unwrap(),
            ],
        )
        .unwrap()
    }

    #[test]
    fn hooks_cover_the_three_shapes() {
        let g = Graph::from_edge_list(&[(0, 1), (1, 2), (2, 3), (3, 4)]);
        let r = Path::new(
            &g,
            vec![0, 1, 2, 3, 4],
            vec![0, 1, 2, 3],
        )
        .unwrap();
        // the whole path in H
        let d = hooks(&g, &r);
        assert!(d.interior.is_none());
        assert_eq!(d.hook_first.unwrap().vertices(), r.vertices());

        // H misses the middle vertex: both hooks nontrivial
        let h = g.without_vertices(&[2].into_iter().collect());
        let d = hooks(&h, &r);
        assert_eq!(d.hook_first.as_ref().unwrap().vertices(), &[0, 1]);
        assert_eq!(d.hook_last.as_ref().unwrap().vertices(), &[3, 4]);
        assert_eq!(d.interior.as_ref().unwrap().vertices(), &[1, 2, 3]);
        assert_eq!(
            d.interior_internals(),
            [2].into_iter().collect::<BTreeSet<_>>()
        );

        // H misses one endpoint: that hook is absent
        let h = g.without_vertices(&[0].into_iter().collect());
        let d = hooks(&h, &r);
        assert!(d.hook_first.is_none());
        assert_eq!(d.interior.as_ref().unwrap().first(), 0);

        // H contains the endpoint but not its edge: trivial hook
        let h = g
            .subgraph(g.vertex_set(), &[1u32, 2, 3].into_iter().collect())
            .unwrap();
        let d = hooks(&h, &r);
        assert!(d.hook_first.unwrap().is_trivial());
    }

    #[test]
    fn d_metric_counts_separating_members() {
        // three nested chords, all separating 0 from 4
        let (soc, p) = chord_society(8, &[(1, 7), (2, 6), (3, 5)]);
        assert_eq!(d_metric(&soc, &p, 0, 4).unwrap(), 3);
        assert_eq!(d_metric(&soc, &p, 4, 0).unwrap(), 3);
        assert_eq!(d_metric(&soc, &p, 0, 0).unwrap(), 0);
        // both endpoints of every chord on one side
        assert_eq!(d_metric(&soc, &p, 0, 0).unwrap(), 0);
        let (soc1, p1) = chord_society(6, &[(1, 3)]);
        assert_eq!(d_metric(&soc1, &p1, 2, 4).unwrap(), 1);
        assert_eq!(d_metric(&soc1, &p1, 4, 5).unwrap(), 0);
        assert!(matches!(
            d_metric(&soc1, &p1, 1, 4),
            Err(ReroutingError::EndpointOfP(1))
        ));
    }

    #[test]
    fn cross_reroute_picks_the_crossing_half() {
        // P1 = 0–6–3, P2 = 1–7–4, attachment from 2 to the middle of P1
        let mut edges = vec![(0, 6), (6, 3), (1, 7), (7, 4), (2, 8), (8, 6)];
        edges.extend([(5, 9)]); // keep vertex 5 on the boundary graph
        let g = Graph::from_edge_list(&edges);
        let soc = Society::new(g.clone(), vec![0, 1, 2, 3, 4, 5]).unwrap();
        let path = |vs: Vec<u32>| {
            let es = vs
                .windows(2)
                .map(|w| g.edge_between(w[0], w[1]).unwrap())
                .collect();
            Path::new(&g, vs, es).unwrap()
        };
        let cross = Cross {
            p: path(vec![0, 6, 3]),
            q: path(vec![1, 7, 4]),
        };
        let r = path(vec![2, 8, 6]);
        let out = cross_reroute(&soc, &cross, &r).unwrap();
        let ends: BTreeSet<u32> = [out.p.first(), out.p.last()].into();
        assert_eq!(ends, [0, 2].into());
        assert!(paths_cross(&soc, &out.p, &out.q));

        // degenerate: attachment ending at an endpoint of P1 absorbs as-is
        let g2 = Graph::from_edge_list(&[
            (0, 6),
            (6, 3),
            (1, 7),
            (7, 4),
            (2, 8),
            (8, 0),
            (5, 9),
        ]);
        let soc2 = Society::new(g2.clone(), vec![0, 1, 2, 3, 4, 5]).unwrap();
        let path2 = |vs: Vec<u32>| {
            let es = vs
                .windows(2)
                .map(|w| g2.edge_between(w[0], w[1]).unwrap())
                .collect();
            Path::new(&g2, vs, es).unwrap()
        };
        let cross2 = Cross {
            p: path2(vec![0, 6, 3]),
            q: path2(vec![1, 7, 4]),
        };
        let out2 = cross_reroute(&soc2, &cross2, &path2(vec![2, 8, 0])).unwrap();
        let ends2: BTreeSet<u32> = [out2.p.first(), out2.p.last()].into();
        assert_eq!(ends2, [0, 2].into());

        // symmetric: hitting P2 instead works the same way
        let g3 = Graph::from_edge_list(&[
            (0, 6),
            (6, 3),
            (1, 7),
            (7, 4),
            (2, 8),
            (8, 7),
            (5, 9),
        ]);
        let soc3 = Society::new(g3.clone(), vec![0, 1, 2, 3, 4, 5]).unwrap();
        let path3 = |vs: Vec<u32>| {
            let es = vs
                .windows(2)
                .map(|w| g3.edge_between(w[0], w[1]).unwrap())
                .collect();
            Path::new(&g3, vs, es).unwrap()
        };
        let cross3 = Cross {
            p: path3(vec![0, 6, 3]),
            q: path3(vec![1, 7, 4]),
        };
        let out3 = cross_reroute(&soc3, &cross3, &path3(vec![2, 8, 7])).unwrap();
        assert!(paths_cross(&soc3, &out3.p, &out3.q));
    }

    #[test]
    fn absorb_one_replaces_a_half() {
        // pairwise crossing members (0,4), (1,5), (2,6); attach from 7
        let (soc, p) = chord_society(8, &[(0, 4), (1, 5), (2, 6)]);
        let g = soc.graph();
        let mut g2 = g.clone();
        g2 = extend_graph(&g2, &[(7, 110), (110, 100)]);
        let soc = soc.with_graph(g2.clone());
        let t = Transaction::new(&soc, p).unwrap();
        assert!(is_crooked(&soc, &t));
        let q = Path::new(
            &g2,
            vec![7, 110, 100],
            vec![
                g2.edge_between(7, 110).unwrap(),
                g2.edge_between(110, 100).unwrap(),
            ],
        )
        .unwrap();
        match crooked_absorb_one(&soc, &t, 0, &q).unwrap() {
            AbsorbOutcome::Crooked(t2) => {
                assert!(is_crooked(&soc, &t2));
                assert_eq!(t2.order(), 3);
                let has_new = t2.paths().iter().any(|m| {
                    let e: BTreeSet<u32> = [m.first(), m.last()].into();
                    e == [4u32, 7].into()
                });
                assert!(has_new, "the half toward 4 should survive");
            }
            AbsorbOutcome::Blocked(_) => panic!("expected an absorption"),
        }
    }

    #[test]
    fn absorb_one_trivial_attachment_is_identity() {
        let (soc, p) = chord_society(8, &[(0, 4), (1, 5), (2, 6)]);
        let t = Transaction::new(&soc, p).unwrap();
        let q = Path::trivial(0);
        match crooked_absorb_one(&soc, &t, 0, &q).unwrap() {
            AbsorbOutcome::Crooked(t2) => assert_eq!(t2.order(), t.order()),
            AbsorbOutcome::Blocked(_) => panic!("trivial absorb must succeed"),
        }
    }

    /// Crooked transaction where no half-absorption works: P = (0,5) with
    /// parallel members (1,9) and (4,6); any attachment from the arc 1..4
    /// leaves one of them peripheral.
    fn blocked_fixture() -> (Society, Transaction) {
        let (soc, p) = chord_society(10, &[(0, 5), (1, 9), (4, 6)]);
        let t = Transaction::new(&soc, p).unwrap();
        assert!(is_crooked(&soc, &t));
        (soc, t)
    }

    #[test]
    fn absorb_one_reports_the_blocking_pair() {
        let (soc, t) = blocked_fixture();
        let g2 = extend_graph(soc.graph(), &[(2, 120), (120, 100)]);
        let soc = soc.with_graph(g2.clone());
        let q = Path::new(
            &g2,
            vec![2, 120, 100],
            vec![
                g2.edge_between(2, 120).unwrap(),
                g2.edge_between(120, 100).unwrap(),
            ],
        )
        .unwrap();
        match crooked_absorb_one(&soc, &t, 0, &q).unwrap() {
            AbsorbOutcome::Blocked(o) => {
                assert_eq!((o.x1, o.x2, o.y2, o.y1), (1, 4, 6, 9));
                assert!(soc.in_cyclic_order(&[0, o.x1, o.x2, 5, o.y2, o.y1]));
            }
            AbsorbOutcome::Crooked(_) => panic!("this attachment is blocked"),
        }
    }

    #[test]
    fn absorb_two_double_replacement_grows_the_order() {
        // same blocked shape, but the attacked member is long enough to
        // carry two attachment points
        let mut edges = vec![
            (0, 100),
            (100, 101),
            (101, 5), // the attacked member
            (1, 102),
            (102, 9),
            (4, 103),
            (103, 6),
            (2, 120),
            (120, 100),
            (3, 121),
            (121, 101),
        ];
        edges.extend([(7, 130), (8, 131)]); // keep 7, 8 present
        let g = Graph::from_edge_list(&edges);
        let soc = Society::new(g.clone(), (0..10).collect()).unwrap();
        let path = |vs: Vec<u32>| {
            let es = vs
                .windows(2)
                .map(|w| g.edge_between(w[0], w[1]).unwrap())
                .collect();
            Path::new(&g, vs, es).unwrap()
        };
        let t = Transaction::new(
            &soc,
            Linkage::new(vec![
                path(vec![0, 100, 101, 5]),
                path(vec![1, 102, 9]),
                path(vec![4, 103, 6]),
            ])
            .unwrap(),
        )
        .unwrap();
        assert!(is_crooked(&soc, &t));
        let q1 = path(vec![2, 120, 100]);
        let q2 = path(vec![3, 121, 101]);
        let t2 = crooked_absorb_two(&soc, &t, &q1, &q2).unwrap();
        assert!(is_crooked(&soc, &t2));
        assert_eq!(t2.order(), 4);
        // swapping the attachments is symmetric
        let t3 = crooked_absorb_two(&soc, &t, &q2, &q1).unwrap();
        assert_eq!(t3.order(), 4);
        assert!(is_crooked(&soc, &t3));
    }

    #[test]
    fn absorb_two_falls_back_to_a_single_absorption() {
        let (soc, p) = chord_society(8, &[(0, 4), (1, 5), (2, 6)]);
        let g2 = extend_graph(soc.graph(), &[
                (7, 110),
                (110, 100),
                (3, 111),
                (111, 101),
            ]);
        let soc = soc.with_graph(g2.clone());
        let t = Transaction::new(&soc, p).unwrap();
        let path = |vs: Vec<u32>| {
            let es = vs
                .windows(2)
                .map(|w| g2.edge_between(w[0], w[1]).unwrap())
                .collect();
            Path::new(&g2, vs, es).unwrap()
        };
        let t2 = crooked_absorb_two(
            &soc,
            &t,
            &path(vec![7, 110, 100]),
            &path(vec![3, 111, 101]),
        )
        .unwrap();
        assert!(is_crooked(&soc, &t2));
        assert_eq!(t2.order(), 3);
    }

    #[test]
    fn diverse_exchange_keeps_the_major_class() {
        // chain 0..5 plus an attachment 10–9–3 from a third class
        let g = Graph::from_edge_list(&[
            (0, 1),
            (1, 2),
            (2, 3),
            (3, 4),
            (4, 5),
            (10, 9),
            (9, 3),
        ]);
        let path = |vs: Vec<u32>| {
            let es = vs
                .windows(2)
                .map(|w| g.edge_between(w[0], w[1]).unwrap())
                .collect();
            Path::new(&g, vs, es).unwrap()
        };
        let parts: Vec<BTreeSet<u32>> =
            vec![[0].into(), [5].into(), [10].into()];
        let fam = SDiverseFamily::new(
            parts.clone(),
            vec![path(vec![0, 1, 2, 3, 4, 5])],
            vec![5],
        )
        .unwrap();
        let out = diverse_exchange(&fam, &path(vec![10, 9, 3])).unwrap();
        assert!(out.majority_equivalent(&fam));
        assert_eq!(out.majors(), &[5]);
        let ends: BTreeSet<u32> =
            [out.paths()[0].first(), out.paths()[0].last()].into();
        assert_eq!(ends, [10u32, 5].into());

        // same-class case: the splice runs toward the minor end and the new
        // endpoint becomes the major
        let g2 = Graph::from_edge_list(&[
            (0, 1),
            (1, 2),
            (2, 3),
            (3, 4),
            (4, 5),
            (7, 8),
            (8, 3),
        ]);
        let path2 = |vs: Vec<u32>| {
            let es = vs
                .windows(2)
                .map(|w| g2.edge_between(w[0], w[1]).unwrap())
                .collect();
            Path::new(&g2, vs, es).unwrap()
        };
        let fam2 = SDiverseFamily::new(
            vec![[0].into(), [5u32, 7].into()],
            vec![path2(vec![0, 1, 2, 3, 4, 5])],
            vec![5],
        )
        .unwrap();
        let out2 = diverse_exchange(&fam2, &path2(vec![7, 8, 3])).unwrap();
        assert!(out2.majority_equivalent(&fam2));
        assert_eq!(out2.majors(), &[7]);
        let ends2: BTreeSet<u32> =
            [out2.paths()[0].first(), out2.paths()[0].last()].into();
        assert_eq!(ends2, [7u32, 0].into());
    }

    #[test]
    fn augment_diverse_resolves_a_collision() {
        let g = Graph::from_edge_list(&[
            (0, 10),
            (10, 1), // the family member
            (0, 30),
            (30, 20), // clean connector blocked by its start 0
            (2, 11),
            (11, 10),
            (10, 12),
            (12, 21), // connector colliding at 10
            (1, 31),
            (31, 22), // connector starting at the major endpoint
        ]);
        let path = |vs: Vec<u32>| {
            let es = vs
                .windows(2)
                .map(|w| g.edge_between(w[0], w[1]).unwrap())
                .collect();
            Path::new(&g, vs, es).unwrap()
        };
        let fam = SDiverseFamily::new(
            vec![[0].into(), [1].into(), [2].into()],
            vec![path(vec![0, 10, 1])],
            vec![1],
        )
        .unwrap();
        let rs = Linkage::new(vec![
            path(vec![0, 30, 20]),
            path(vec![2, 11, 10, 12, 21]),
            path(vec![1, 31, 22]),
        ])
        .unwrap();
        let y: BTreeSet<u32> = [20, 21, 22].into();
        let (fam2, clean) = augment_diverse(&fam, &y, &rs).unwrap();
        assert!(fam2.majority_equivalent(&fam));
        assert!(clean
            .vertex_set()
            .is_disjoint(&fam2.vertex_set()));
        assert!(y.contains(&clean.first()) || y.contains(&clean.last()));
    }

    #[test]
    fn verify_leap_accepts_a_hand_built_pattern() {
        // planar members (1,6), (2,5); jumps (0,3) and (7,4)
        let (soc, p) = chord_society(8, &[(1, 6), (2, 5)]);
        let g2 = extend_graph(soc.graph(), &[
                (0, 200),
                (200, 3),
                (7, 201),
                (201, 4),
            ]);
        let soc = soc.with_graph(g2.clone());
        let q = Linkage::new(vec![
            chord_path(&soc, 0, 200, 3),
            chord_path(&soc, 7, 201, 4),
        ])
        .unwrap();
        assert!(verify_leap(&soc, &p, &q, 2, 1, false));
        assert!(verify_leap(&soc, &p, &q, 2, 2, false));
        assert!(!verify_leap(&soc, &p, &q, 2, 3, false));
        assert!(!verify_leap(&soc, &p, &q, 1, 1, false));
        // sharing a vertex with p is fatal
        let q_bad = Linkage::new(vec![
            chord_path(&soc, 0, 200, 3),
            chord_path(&soc, 7, 201, 4),
            chord_path(&soc, 1, 100, 6),
        ])
        .unwrap();
        assert!(!verify_leap(&soc, &p, &q_bad, 3, 1, false));
    }

    #[test]
    fn verify_leap_twisted_flips_a_segment() {
        // same pattern, but the boundary lists 1 and 2 in swapped order, so
        // the members cross until the segment [2,1] is flipped back
        let (plain, p) = chord_society(8, &[(1, 6), (2, 5)]);
        let g2 = extend_graph(plain.graph(), &[
                (0, 200),
                (200, 3),
                (7, 201),
                (201, 4),
            ]);
        let soc = Society::new(g2.clone(), vec![0, 2, 1, 3, 4, 5, 6, 7]).unwrap();
        let q = Linkage::new(vec![
            chord_path(&soc, 0, 200, 3),
            chord_path(&soc, 7, 201, 4),
        ])
        .unwrap();
        assert!(!verify_leap(&soc, &p, &q, 2, 1, false));
        assert!(verify_leap(&soc, &p, &q, 2, 1, true));
    }

    #[test]
    fn minimalize_leap_shrinks_a_padded_pattern() {
        // five nested separating members, one jump, l = 1: a single member
        // suffices, and the bound k(2l+1) = 3 holds
        let (soc, p) = chord_society(
            14,
            &[(1, 13), (2, 12), (3, 11), (4, 10), (5, 9)],
        );
        let g2 = extend_graph(soc.graph(), &[(0, 200), (200, 7)]);
        let soc = soc.with_graph(g2.clone());
        let q = Linkage::new(vec![chord_path(&soc, 0, 200, 7)]).unwrap();
        let pat = LeapPattern::new(&soc, p, q, 1, 1).unwrap();
        let min = minimalize_leap(&soc, &pat).unwrap();
        assert_eq!(min.p.order(), 1);
        assert!(min.p.order() + min.q.order() <= 3);
        // minimality: removing the last member breaks the pattern
        assert!(!verify_leap(
            &soc,
            &Linkage::empty(),
            &min.q,
            1,
            1,
            false
        ));
        // an already-minimal pattern comes back unchanged
        let again = minimalize_leap(&soc, &min).unwrap();
        assert_eq!(again.p.order(), 1);
    }

    /// Shared fixture for the leap augmentation: four nested members
    /// separating 0 from 5, one jump 0–5, and three connectors to {50,51,52}.
    fn augment_fixture(extra: &[(u32, u32)]) -> (Society, LeapPattern) {
        let (soc, p) = chord_society(11, &[(1, 9), (2, 8), (3, 7), (4, 6)]);
        let mut edges = vec![(0, 200), (200, 5)];
        edges.extend_from_slice(extra);
        let g2 = extend_graph(soc.graph(), &edges);
        let soc = soc.with_graph(g2.clone());
        let q = Linkage::new(vec![chord_path(&soc, 0, 200, 5)]).unwrap();
        let pat = LeapPattern::new(&soc, p, q, 1, 4).unwrap();
        (soc, pat)
    }

    #[test]
    fn augment_leap_with_disjoint_connectors_is_direct() {
        let (soc, pat) = augment_fixture(&[
            (10, 210),
            (210, 50),
            (0, 201),
            (201, 51),
            (9, 212),
            (212, 52),
        ]);
        let z: BTreeSet<u32> = [50, 51, 52].into();
        let rs = Linkage::new(vec![
            chord_path(&soc, 10, 210, 50),
            chord_path(&soc, 0, 201, 51),
            chord_path(&soc, 9, 212, 52),
        ])
        .unwrap();
        let (out, r) = augment_leap(&soc, &pat, 1, &z, &rs).unwrap();
        assert!(verify_leap(&soc, &out.p, &out.q, 1, 1, false));
        // the surviving members are a subfamily of the input's
        let orig: BTreeSet<Vec<u32>> = pat
            .p
            .paths()
            .iter()
            .map(|m| m.vertices().to_vec())
            .collect();
        assert!(out
            .p
            .paths()
            .iter()
            .all(|m| orig.contains(m.vertices())));
        let used: BTreeSet<u32> = out
            .p
            .vertex_set()
            .union(&out.q.vertex_set())
            .copied()
            .collect();
        assert!(r.vertex_set().is_disjoint(&used));
        assert!(z.contains(&r.first()) || z.contains(&r.last()));
    }

    #[test]
    fn augment_leap_splices_through_a_collision() {
        // the jump is longer (0–200–205–5) and two connectors must pass
        // through its interior to reach their targets
        let (soc, p) = chord_society(11, &[(1, 9), (2, 8), (3, 7), (4, 6)]);
        let g2 = extend_graph(soc.graph(), &[
                (0, 200),
                (200, 205),
                (205, 5),
                (0, 201),
                (201, 51),
                (10, 210),
                (210, 200),
                (200, 211),
                (211, 50),
                (9, 212),
                (212, 205),
                (205, 213),
                (213, 52),
            ]);
        let soc = soc.with_graph(g2.clone());
        let path = |vs: Vec<u32>| {
            let es = vs
                .windows(2)
                .map(|w| g2.edge_between(w[0], w[1]).unwrap())
                .collect();
            Path::new(&g2, vs, es).unwrap()
        };
        let q = Linkage::new(vec![path(vec![0, 200, 205, 5])]).unwrap();
        let pat = LeapPattern::new(&soc, p, q, 1, 4).unwrap();
        let z: BTreeSet<u32> = [50, 51, 52].into();
        let rs = Linkage::new(vec![
            path(vec![0, 201, 51]),
            path(vec![10, 210, 200, 211, 50]),
            path(vec![9, 212, 205, 213, 52]),
        ])
        .unwrap();
        let (out, r) = augment_leap(&soc, &pat, 1, &z, &rs).unwrap();
        assert!(verify_leap(&soc, &out.p, &out.q, 1, 1, false));
        let used: BTreeSet<u32> = out
            .p
            .vertex_set()
            .union(&out.q.vertex_set())
            .copied()
            .collect();
        assert!(r.vertex_set().is_disjoint(&used));
    }

    #[test]
    fn min_cost_paths_prefer_free_edges() {
        // two parallel routes from 0 to 3; only one is free
        let g = Graph::from_edge_list(&[(0, 1), (1, 3), (0, 2), (2, 3)]);
        let free: BTreeSet<u32> = [0u32, 1].into();
        let out = min_cost_disjoint_paths(
            &g,
            &[0].into(),
            &[3].into(),
            &free,
            1,
        )
        .unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].vertices(), &[0, 1, 3]);
        // asking for two paths uses both routes
        let out2 = min_cost_disjoint_paths(
            &g,
            &[0].into(),
            &[3].into(),
            &free,
            2,
        );
        // 0 and 3 each have vertex capacity one as source/sink, but both
        // routes start and end there, which the source/sink arcs allow only
        // once each — so two paths are impossible
        assert!(out2.is_none());
    }

    use crate::renditions::{assemble, validate_rendition, verify_nest, Cell};

    /// An annular grid: `m` concentric rings of `w` vertices each (vertex
    /// `i*w + j` is ring `i`, column `j`), ring 0 the boundary, full spokes
    /// between consecutive rings, and a vortex cell on the innermost ring
    /// whose sigma consists of the `w/2` antipodal chords.  Extra edges each
    /// get their own 2-node cell.  The nest is returned inside-out.
    fn rings(
        m: u32,
        w: u32,
        extra: &[(u32, u32)],
    ) -> (Society, CylindricalRendition, Vec<Cycle>) {
        assert!(w >= 4 && w.is_multiple_of(2) && m >= 2);
        let v = |i: u32, j: u32| i * w + j;
        let mut edges: Vec<(u32, u32)> = Vec::new();
        for i in 0..m {
            for j in 0..w {
                edges.push((v(i, j), v(i, (j + 1) % w)));
            }
        }
        for i in 0..m - 1 {
            for j in 0..w {
                edges.push((v(i, j), v(i + 1, j)));
            }
        }
        edges.extend_from_slice(extra);
        let n_flat = edges.len() as u32;
        for j in 0..w / 2 {
            edges.push((v(m - 1, j), v(m - 1, j + w / 2)));
        }
        let g = Graph::from_edge_list(&edges);
        let soc = Society::new(g.clone(), (0..w).collect()).unwrap();
        let mut cells = Vec::new();
        for e in 0..n_flat {
            let (a, b) = g.endpoints(e).unwrap();
            cells.push(Cell {
                boundary: vec![a, b],
                vortex: false,
                sigma: Graph::new([a, b], [(e, (a, b))]).unwrap(),
            });
        }
        let inner: Vec<u32> = (0..w).map(|j| v(m - 1, j)).collect();
        cells.push(Cell {
            boundary: inner.clone(),
            vortex: true,
            sigma: Graph::new(
                inner.iter().copied(),
                (0..w / 2)
                    .map(|j| (n_flat + j, (v(m - 1, j), v(m - 1, j + w / 2)))),
            )
            .unwrap(),
        });
        let c0 = cells.len() - 1;
        let disk = assemble(&soc, cells).expect("annular grid fits in a disk");
        assert!(validate_rendition(&soc, &disk).is_empty());
        let rend = CylindricalRendition::new(disk, c0).unwrap();
        let nest: Vec<Cycle> = (0..m)
            .rev()
            .map(|i| {
                let vs: Vec<u32> = (0..w).map(|j| v(i, j)).collect();
                let es: Vec<u32> = (0..w)
                    .map(|j| {
                        g.edge_between(v(i, j), v(i, (j + 1) % w)).unwrap()
                    })
                    .collect();
                Cycle::new(&g, vs, es).unwrap()
            })
            .collect();
        (soc, rend, nest)
    }

    fn vpath(g: &Graph, vs: Vec<u32>) -> Path {
        let es = vs
            .windows(2)
            .map(|w| g.edge_between(w[0], w[1]).unwrap())
            .collect();
        Path::new(g, vs, es).unwrap()
    }

    /// The full spoke column `j`, boundary inwards.
    fn column(g: &Graph, m: u32, w: u32, j: u32) -> Path {
        vpath(g, (0..m).map(|i| i * w + j).collect())
    }

    fn all_columns(g: &Graph, m: u32, w: u32) -> Linkage {
        Linkage::new((0..w).map(|j| column(g, m, w, j)).collect()).unwrap()
    }

    #[test]
    fn rings_fixture_has_a_valid_nest() {
        let (soc, rend, nest) = rings(4, 4, &[]);
        assert!(verify_nest(&soc, &rend, &nest));
        let p = all_columns(soc.graph(), 4, 4);
        assert!(crate::renditions::orthogonality(
            &soc,
            &rend,
            &nest,
            &p,
            crate::renditions::OrthogonalityMode::Radial,
        ));
    }

    #[test]
    fn root_linkage_reroutes_onto_the_spokes() {
        let (soc, rend, nest) = rings(4, 4, &[]);
        let g = soc.graph();
        let v = |i: u32, j: u32| i * 4 + j;
        let p1 = Linkage::new(vec![column(g, 4, 4, 0)]).unwrap();
        // a path leaving the central cell along column 2
        let z: BTreeSet<u32> = [v(3, 2)].into();
        let t = Linkage::new(vec![column(g, 4, 4, 2).reversed()]).unwrap();
        let q = root_linkage(&soc, &rend, &nest, &p1, &z, &t).unwrap();
        assert_eq!(q.order(), 1);
        let member = &q.paths()[0];
        let ends: BTreeSet<u32> = [member.first(), member.last()].into();
        assert_eq!(ends, [v(3, 2), 0].into());
        // the rerouted path leaves along the innermost ring, then follows
        // the spoke column 0
        assert!(member.vertex_set().contains(&v(3, 0)));
        assert!(member.vertex_set().contains(&v(1, 0)));

        // already coterminal: rooting is a no-op up to the choice of route
        let z0: BTreeSet<u32> = [v(3, 0)].into();
        let t0 = Linkage::new(vec![column(g, 4, 4, 0).reversed()]).unwrap();
        let q0 = root_linkage(&soc, &rend, &nest, &p1, &z0, &t0).unwrap();
        assert_eq!(q0.paths()[0].vertex_set(), t0.paths()[0].vertex_set());

        // a source outside the central cell is rejected
        let bad: BTreeSet<u32> = [v(2, 0)].into();
        assert!(matches!(
            root_linkage(&soc, &rend, &nest, &p1, &bad, &t),
            Err(ReroutingError::PreconditionViolated(_))
        ));
        // a nest shorter than r + 1 is rejected
        assert!(matches!(
            root_linkage(&soc, &rend, &nest[..1], &p1, &z, &t),
            Err(ReroutingError::PreconditionViolated(_))
        ));
    }

    #[test]
    fn root_transaction_drops_an_excursion() {
        // two radial pairs at columns {0,1} and {4,5}, guards at {2,3} and
        // {6,7}; the transaction wiggles through a parallel vertex 500
        // before settling onto the spokes
        let (soc, rend, nest) = rings(4, 8, &[(0, 500), (500, 8)]);
        let g = soc.graph();
        let v = |i: u32, j: u32| i * 8 + j;
        let col = |j| column(g, 4, 8, j);
        let p1 = Linkage::new(vec![col(0), col(1)]).unwrap();
        let p2 = Linkage::new(vec![col(4), col(5)]).unwrap();
        let r1 = Linkage::new(vec![col(2), col(3)]).unwrap();
        let r2 = Linkage::new(vec![col(6), col(7)]).unwrap();
        let x1 = soc.segment_between(0, 1).unwrap();
        let y1 = soc.segment_between(2, 3).unwrap();
        let x2 = soc.segment_between(4, 5).unwrap();
        let y2 = soc.segment_between(6, 7).unwrap();
        let t1 = vpath(
            g,
            vec![0, 500, v(1, 0), v(2, 0), v(3, 0), v(3, 4), v(2, 4), v(1, 4), 4],
        );
        let t2 = vpath(
            g,
            vec![1, v(1, 1), v(2, 1), v(3, 1), v(3, 5), v(2, 5), v(1, 5), 5],
        );
        let t =
            Transaction::new(&soc, Linkage::new(vec![t1, t2]).unwrap()).unwrap();
        let q = root_transaction(
            &soc,
            &rend,
            &nest,
            &p1,
            &p2,
            &r1,
            &r2,
            (&x1, &y1, &x2, &y2),
            &t,
        )
        .unwrap();
        assert_eq!(q.order(), 2);
        let qv = q.linkage().vertex_set();
        assert!(!qv.contains(&500), "the excursion vertex must be dropped");
        for member in q.paths() {
            let a = member.first().min(member.last());
            let b = member.first().max(member.last());
            assert!(a <= 1 && (4..=5).contains(&b));
        }
        // the guard columns stay untouched
        assert!(qv.is_disjoint(&r1.vertex_set()));
        assert!(qv.is_disjoint(&r2.vertex_set()));

        // a nest shorter than r + 1 is rejected
        assert!(matches!(
            root_transaction(
                &soc,
                &rend,
                &nest[..2],
                &p1,
                &p2,
                &r1,
                &r2,
                (&x1, &y1, &x2, &y2),
                &t,
            ),
            Err(ReroutingError::PreconditionViolated(_))
        ));
    }

    #[test]
    fn crooked_coterminal_absorbs_the_excursion() {
        // r = 2: ten spokes, twelve rings; the first member wiggles through
        // 500 between rings 0 and 1, so it is not coterminal with the spokes
        let (soc, rend, nest) = rings(12, 10, &[(0, 500), (500, 10)]);
        let g = soc.graph();
        let v = |i: u32, j: u32| i * 10 + j;
        let p = all_columns(g, 12, 10);
        let mut q1 = vec![0, 500];
        q1.extend((1..12).map(|i| v(i, 0)));
        q1.push(v(11, 5));
        q1.extend((0..11).rev().map(|i| v(i, 5)));
        let q1 = vpath(g, q1);
        let mut q2: Vec<u32> = (0..12).map(|i| v(i, 1)).collect();
        q2.push(v(11, 6));
        q2.extend((0..11).rev().map(|i| v(i, 6)));
        let q2 = vpath(g, q2);
        let start =
            Transaction::new(&soc, Linkage::new(vec![q1, q2]).unwrap())
                .unwrap();
        assert!(is_crooked(&soc, &start));
        let (q, trace) =
            crooked_coterminal(&soc, &rend, &nest, &p, 2, &start).unwrap();
        // one absorption: the excursion member is replaced from a spare
        // spoke, leaving only the two vortex chords unhooked
        assert_eq!(trace, vec![14, 2]);
        assert_eq!(q.order(), 2);
        let qv = q.linkage().vertex_set();
        assert!(!qv.contains(&500));
        assert!(!qv.contains(&0));
        let ends: BTreeSet<u32> = q
            .paths()
            .iter()
            .flat_map(|m| [m.first(), m.last()])
            .collect();
        assert!(ends.contains(&1) && ends.contains(&5) && ends.contains(&6));
        // columns 2-4 cannot reach column 0 without touching the
        // transaction, so the replacement end comes from the other side
        assert!(ends.iter().all(|e| ![2, 3, 4].contains(e)));

        // an already coterminal transaction descends in zero steps
        let s1 = {
            let mut vs: Vec<u32> = (0..12).map(|i| v(i, 0)).collect();
            vs.push(v(11, 5));
            vs.extend((0..11).rev().map(|i| v(i, 5)));
            vpath(g, vs)
        };
        let s2 = {
            let mut vs: Vec<u32> = (0..12).map(|i| v(i, 1)).collect();
            vs.push(v(11, 6));
            vs.extend((0..11).rev().map(|i| v(i, 6)));
            vpath(g, vs)
        };
        let settled =
            Transaction::new(&soc, Linkage::new(vec![s1, s2]).unwrap())
                .unwrap();
        let (q0, trace0) =
            crooked_coterminal(&soc, &rend, &nest, &p, 2, &settled).unwrap();
        assert_eq!(trace0, vec![2]);
        assert_eq!(
            q0.linkage().vertex_set(),
            settled.linkage().vertex_set()
        );
    }

    #[test]
    fn rotate_transaction_moves_the_endpoints() {
        let (soc, rend, nest) = rings(7, 4, &[]);
        let g = soc.graph();
        let v = |i: u32, j: u32| i * 4 + j;
        let p = all_columns(g, 7, 4);
        // one member: down column 0, across the vortex chord, up column 2
        let mut vs: Vec<u32> = (0..7).map(|i| v(i, 0)).collect();
        vs.push(v(6, 2));
        vs.extend((0..6).rev().map(|i| v(i, 2)));
        let q = Linkage::new(vec![vpath(g, vs)]).unwrap();
        let out =
            rotate_transaction(&soc, &rend, &nest, &p, &q, &[1, 3]).unwrap();
        assert_eq!(out.order(), 1);
        let member = &out.paths()[0];
        assert_eq!((member.first(), member.last()), (1, 3));
        // still runs through the vortex chord
        assert!(member.vertex_set().contains(&v(6, 0)));
        assert!(member.vertex_set().contains(&v(6, 2)));

        // rotating onto the current endpoints keeps the pairing
        let idm =
            rotate_transaction(&soc, &rend, &nest, &p, &q, &[0, 2]).unwrap();
        let m0 = &idm.paths()[0];
        assert_eq!(
            [m0.first(), m0.last()].into_iter().collect::<BTreeSet<_>>(),
            [0u32, 2].into()
        );

        // wrong number of targets
        assert!(matches!(
            rotate_transaction(&soc, &rend, &nest, &p, &q, &[1]),
            Err(ReroutingError::PreconditionViolated(_))
        ));
    }
}
