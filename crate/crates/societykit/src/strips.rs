//! Strip societies: the sub-society spanned by a monotone transaction
//! together with everything attached strictly between its two outermost
//! elements, plus isolation testing for such strips.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::graph::{h_bridges, EdgeId, GraphError, Path, VertexId};
use crate::society::{Segment, Society, SocietyError};
use crate::transactions::{is_crosscap_transaction, is_planar_transaction, Transaction};

#[derive(Debug, Error)]
pub enum StripError {
    #[error("transaction is not planar")]
    NotPlanar,
    #[error("strip construction needs a transaction of order at least two")]
    TooSmall,
    #[error("transaction is not a pairwise-crossing linkage between the given segments")]
    NotCrosscap,
    #[error("strip was not built from this society")]
    ProvenanceMismatch,
    #[error("society error: {0}")]
    Society(#[from] SocietyError),
    #[error("graph error: {0}")]
    Graph(#[from] GraphError),
}

/// The strip society carved out of a transaction, together with enough of
/// its provenance (parent society, ordered elements, endpoint segments) to
/// check isolation later.
#[derive(Clone, Debug)]
pub struct StripSociety {
    society: Society,
    /// The transaction elements ordered `P₁..Pₙ` along the first segment.
    paths: Vec<Path>,
    /// Minimal boundary segments holding the two endpoint families, in the
    /// parent boundary order.
    seg_a: Segment,
    seg_b: Segment,
    crosscap: bool,
    parent: Society,
}

impl StripSociety {
    pub fn society(&self) -> &Society {
        &self.society
    }

    /// `(P₁, Pₙ)`: the two outermost (external) elements.
    pub fn boundary_paths(&self) -> (&Path, &Path) {
        (
            self.paths.first().expect("order ≥ 2"),
            self.paths.last().expect("order ≥ 2"),
        )
    }

    /// All elements, ordered along the first endpoint segment.
    pub fn paths(&self) -> &[Path] {
        &self.paths
    }

    /// The minimal endpoint segments `(a₁Ωaₙ, …)` in parent boundary order.
    pub fn segments(&self) -> (&Segment, &Segment) {
        (&self.seg_a, &self.seg_b)
    }

    pub fn is_crosscap(&self) -> bool {
        self.crosscap
    }

    pub fn parent(&self) -> &Society {
        &self.parent
    }
}

/// Sorts the transaction elements by the position of their first endpoint
/// within `within` and returns `(ordered paths, oriented endpoint pairs)`.
fn order_paths(t: &Transaction, within: &Segment) -> (Vec<Path>, Vec<(VertexId, VertexId)>) {
    let oriented = t.oriented_endpoints();
    let mut idx: Vec<usize> = (0..t.order()).collect();
    let pos = |v: VertexId| {
        within
            .vertices()
            .iter()
            .position(|&w| w == v)
            .expect("endpoint lies in its witness segment")
    };
    idx.sort_by_key(|&i| pos(oriented[i].0));
    let paths = idx.iter().map(|&i| t.paths()[i].clone()).collect();
    let ends = idx.iter().map(|&i| oriented[i]).collect();
    (paths, ends)
}

/// Builds the strip society from the ordered elements and the two boundary
/// segments: the elements plus the segments form the core `H′`, and every
/// bridge of the rest of the graph that attaches to `H′` away from the two
/// external elements is added with its out-of-core attachments pruned.
fn assemble_strip(
    society: &Society,
    paths: Vec<Path>,
    seg_a: Segment,
    seg_b: Segment,
    omega1: Vec<VertexId>,
    crosscap: bool,
) -> Result<StripSociety, StripError> {
    let g = society.graph();

    // H: the union of the elements plus every boundary vertex, isolated.
    let mut h_vertices: BTreeSet<VertexId> = society.omega_set();
    let mut h_edges: BTreeSet<EdgeId> = BTreeSet::new();
    for p in &paths {
        h_vertices.extend(p.vertices());
        h_edges.extend(p.edges());
    }
    let h = g.subgraph(&h_vertices, &h_edges)?;

    // H′: the elements plus the two chosen boundary segments only.
    let mut core: BTreeSet<VertexId> = seg_a.vertex_set();
    core.extend(seg_b.vertices());
    for p in &paths {
        core.extend(p.vertices());
    }
    let mut external: BTreeSet<VertexId> = paths.first().expect("order ≥ 2").vertex_set();
    external.extend(paths.last().expect("order ≥ 2").vertices());

    let mut g1_vertices = core.clone();
    let mut g1_edges = h_edges;
    for b in h_bridges(g, &h) {
        if !b
            .attachments
            .iter()
            .any(|v| core.contains(v) && !external.contains(v))
        {
            continue;
        }
        g1_vertices.extend(&b.interior);
        g1_vertices.extend(b.attachments.iter().filter(|v| core.contains(v)));
        for &e in &b.edges {
            let (u, v) = g.endpoints(e)?;
            let keep = |w: VertexId| b.interior.contains(&w) || core.contains(&w);
            if keep(u) && keep(v) {
                g1_edges.insert(e);
            }
        }
    }
    let g1 = g.subgraph(&g1_vertices, &g1_edges)?;
    let strip_society = Society::new(g1, omega1)?;
    Ok(StripSociety {
        society: strip_society,
        paths,
        seg_a,
        seg_b,
        crosscap,
        parent: society.clone(),
    })
}

/// The strip society of a planar transaction of order at least two.  The
/// endpoint segments are derived from the transaction itself (they are
/// unique minimal for a planar transaction).
pub fn strip_society(society: &Society, t: &Transaction) -> Result<StripSociety, StripError> {
    if t.order() < 2 {
        return Err(StripError::TooSmall);
    }
    if !is_planar_transaction(society, t) {
        return Err(StripError::NotPlanar);
    }
    let (paths, ends) = order_paths(t, t.witness_a());
    let (a1, b1) = ends[0];
    let (an, bn) = *ends.last().expect("order ≥ 2");
    // Non-crossing elements keep the second endpoint family in the reverse
    // boundary order: a₁,…,aₙ,bₙ,…,b₁.
    let mut listed: Vec<VertexId> = ends.iter().map(|&(a, _)| a).collect();
    listed.extend(ends.iter().rev().map(|&(_, b)| b));
    debug_assert!(society.in_cyclic_order(&listed));
    let seg_a = society.segment_between(a1, an)?;
    let seg_b = society.segment_between(bn, b1)?;
    let mut omega1 = seg_a.vertices().to_vec();
    omega1.extend(seg_b.vertices());
    assemble_strip(society, paths, seg_a, seg_b, omega1, false)
}

/// The strip society of a crosscap (pairwise-crossing) transaction with
/// respect to a disjoint segment pair `(x1, x2)` for which the transaction
/// is an `x1`-to-`x2` linkage.  The second boundary arc enters the new
/// boundary order reversed.
pub fn strip_society_crosscap(
    society: &Society,
    t: &Transaction,
    x1: &Segment,
    x2: &Segment,
) -> Result<StripSociety, StripError> {
    if t.order() < 2 {
        return Err(StripError::TooSmall);
    }
    if !is_crosscap_transaction(society, t) || !x1.is_disjoint(x2) {
        return Err(StripError::NotCrosscap);
    }
    let mut oriented = Vec::new();
    for p in t.paths() {
        let (u, v) = (p.first(), p.last());
        if x1.contains(u) && x2.contains(v) {
            oriented.push((u, v));
        } else if x1.contains(v) && x2.contains(u) {
            oriented.push((v, u));
        } else {
            return Err(StripError::NotCrosscap);
        }
    }
    let pos = |v: VertexId| {
        x1.vertices()
            .iter()
            .position(|&w| w == v)
            .expect("endpoint checked to lie in x1")
    };
    let mut idx: Vec<usize> = (0..t.order()).collect();
    idx.sort_by_key(|&i| pos(oriented[i].0));
    let paths: Vec<Path> = idx.iter().map(|&i| t.paths()[i].clone()).collect();
    let ends: Vec<(VertexId, VertexId)> = idx.iter().map(|&i| oriented[i]).collect();
    let (a1, b1) = ends[0];
    let (an, bn) = *ends.last().expect("order ≥ 2");
    // Pairwise crossing keeps the second endpoint family in the same
    // boundary order: a₁,…,aₙ,b₁,…,bₙ.
    let mut listed: Vec<VertexId> = ends.iter().map(|&(a, _)| a).collect();
    listed.extend(ends.iter().map(|&(_, b)| b));
    debug_assert!(society.in_cyclic_order(&listed));
    let seg_a = society.segment_between(a1, an)?;
    let seg_b = society.segment_between(b1, bn)?;
    let mut omega1 = seg_a.vertices().to_vec();
    omega1.extend(seg_b.vertices().iter().rev());
    assemble_strip(society, paths, seg_a, seg_b, omega1, true)
}

/// Does no edge of the parent graph leave the strip except through the two
/// external elements?
pub fn is_isolated(society: &Society, strip: &StripSociety) -> Result<bool, StripError> {
    if strip.parent != *society {
        return Err(StripError::ProvenanceMismatch);
    }
    let inner = strip.society.graph().vertex_set();
    let (p1, pn) = strip.boundary_paths();
    let mut external = p1.vertex_set();
    external.extend(pn.vertices());
    for &(u, v) in society.graph().edge_map().values() {
        let protrudes = |x: VertexId, y: VertexId| {
            inner.contains(&x) && !external.contains(&x) && !inner.contains(&y)
        };
        if protrudes(u, v) || protrudes(v, u) {
            return Ok(false);
        }
    }
    Ok(true)
}
