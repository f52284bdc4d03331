//! Disk and cylindrical renditions of societies.
//!
//! A rendition presents a society as a collection of *cells* drawn in a
//! closed disk whose boundary carries Ω: each cell has at most three
//! boundary *nodes* (more only for flagged *vortex* cells) and owns a
//! subgraph σ(c); the cells partition the edge set and overlap only in
//! nodes.  All topology is combinatorial: a *skeleton* — a planar
//! embedding of the port-gadget graph, one rim of ports per cell — stands
//! in for the drawing, and containment questions (which side of a cycle's
//! track a cell lies on, whether nest disks are concentric) are answered by
//! face reachability in an embedding.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Cycle, EdgeId, Graph, GraphError, Linkage, Path, VertexId};
use crate::planarity::{
    cyclic_subsequence, embed_with_outer_cycle, Dart, Embedding, PlanarityError,
};
use crate::society::Society;
use crate::transactions::{Transaction, TransactionError};

#[derive(Debug, Error)]
pub enum RenditionError {
    #[error("the walk is not grounded: {0}")]
    NotGrounded(String),
    #[error("the walk uses an edge of a vortex cell")]
    VortexEdgeUsed,
    #[error("linkage is not orthogonal to the nest: {0}")]
    NotOrthogonal(String),
    #[error("a member has no edge in the central cell")]
    NotUnexposed,
    #[error("restriction level must be at least 2")]
    LevelTooSmall,
    #[error("a cell other than the designated one is a vortex")]
    NotCylindrical,
    #[error("rendition is not valid: {0}")]
    InvalidRendition(String),
    #[error("graph error: {0}")]
    Graph(#[from] GraphError),
    #[error("embedding error: {0}")]
    Planarity(#[from] PlanarityError),
    #[error("transaction error: {0}")]
    Transaction(#[from] TransactionError),
}

/// One cell: its cyclic boundary node sequence and the subgraph it owns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cell {
    pub boundary: Vec<VertexId>,
    pub vortex: bool,
    pub sigma: Graph,
}

/// A disk rendition: cells plus the port-gadget skeleton embedding.
///
/// Skeleton convention: every boundary node keeps its vertex id; each cell
/// contributes one fresh *port* vertex per boundary node, a leg edge from
/// port to node, and a rim cycle through its ports (a doubled edge for
/// 2-node cells); consecutive Ω nodes are joined by disk-boundary edges.
/// The skeleton must embed with Ω on the outer face in Ω order.
#[derive(Clone, Debug)]
pub struct DiskRendition {
    pub cells: Vec<Cell>,
    /// For each 2-node cell, the chosen rim side (0 = smaller rim edge id).
    pub tie_breaker: BTreeMap<usize, u8>,
    pub skeleton: Embedding,
    /// Skeleton port vertex → (cell index, boundary position).
    pub ports: BTreeMap<VertexId, (usize, usize)>,
}

impl DiskRendition {
    /// All boundary nodes across cells.
    pub fn nodes(&self) -> BTreeSet<VertexId> {
        self.cells
            .iter()
            .flat_map(|c| c.boundary.iter().copied())
            .collect()
    }

    /// Which cell owns each edge (meaningful once validated).
    pub fn cell_of_edge(&self) -> BTreeMap<EdgeId, usize> {
        let mut m = BTreeMap::new();
        for (i, c) in self.cells.iter().enumerate() {
            for e in c.sigma.edge_ids() {
                m.insert(e, i);
            }
        }
        m
    }

    pub fn vortex_cells(&self) -> Vec<usize> {
        self.cells
            .iter()
            .enumerate()
            .filter(|(_, c)| c.vortex)
            .map(|(i, _)| i)
            .collect()
    }
}

/// A disk rendition whose only permitted vortex is the designated cell.
#[derive(Clone, Debug)]
pub struct CylindricalRendition {
    pub disk: DiskRendition,
    pub c0: usize,
}

impl CylindricalRendition {
    pub fn new(disk: DiskRendition, c0: usize) -> Result<Self, RenditionError> {
        if c0 >= disk.cells.len() {
            return Err(RenditionError::InvalidRendition(format!(
                "no cell {c0}"
            )));
        }
        for (i, c) in disk.cells.iter().enumerate() {
            if i != c0 && c.vortex {
                return Err(RenditionError::NotCylindrical);
            }
        }
        Ok(CylindricalRendition { disk, c0 })
    }

    /// The society carried by the designated cell: its subgraph with the
    /// cell boundary as the cyclic order.
    pub fn vortex_society(&self) -> Result<Society, RenditionError> {
        let cell = &self.disk.cells[self.c0];
        Society::new(cell.sigma.clone(), cell.boundary.clone()).map_err(|e| {
            RenditionError::InvalidRendition(format!("vortex cell is not a society: {e}"))
        })
    }
}

/// One arc of a track: the cell it passes, its end nodes, and which side of
/// the cell boundary it runs along (2-node cells: the tie-breaker side;
/// 3-node cells: the boundary position of the avoided node).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrackArc {
    pub cell: usize,
    pub from: VertexId,
    pub to: VertexId,
    pub side: u8,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Track {
    pub arcs: Vec<TrackArc>,
    pub closed: bool,
}

/// Concentric grounded cycles listed inside-out.
#[derive(Clone, Debug)]
pub struct Nest {
    pub cycles: Vec<Cycle>,
}

// ---------------------------------------------------------------------------
// skeleton construction

/// The port-gadget graph of a cell list over a society, with disk-boundary
/// edges between consecutive Ω vertices.  Deterministic ids: ports are
/// numbered from one past the largest society vertex id, edge ids
/// sequentially from zero.
pub fn build_gadget(
    society: &Society,
    cells: &[Cell],
) -> (Graph, BTreeMap<VertexId, (usize, usize)>) {
    let mut vertices: BTreeSet<VertexId> = cells
        .iter()
        .flat_map(|c| c.boundary.iter().copied())
        .collect();
    vertices.extend(society.omega().iter().copied());
    let fresh0 = society
        .graph()
        .vertices()
        .max()
        .map(|v| v + 1)
        .unwrap_or(0)
        .max(vertices.iter().max().map(|v| v + 1).unwrap_or(0));
    let mut next_v = fresh0;
    let mut next_e: EdgeId = 0;
    let mut edges: Vec<(EdgeId, (VertexId, VertexId))> = Vec::new();
    let mut ports: BTreeMap<VertexId, (usize, usize)> = BTreeMap::new();
    let mut all_vertices: Vec<VertexId> = vertices.iter().copied().collect();
    for (i, c) in cells.iter().enumerate() {
        let k = c.boundary.len();
        if k == 0 {
            continue;
        }
        let cell_ports: Vec<VertexId> = (0..k)
            .map(|j| {
                let p = next_v;
                next_v += 1;
                ports.insert(p, (i, j));
                p
            })
            .collect();
        all_vertices.extend(cell_ports.iter().copied());
        for (j, &p) in cell_ports.iter().enumerate() {
            edges.push((next_e, (p, c.boundary[j])));
            next_e += 1;
        }
        match k {
            1 => {}
            2 => {
                // a doubled rim edge: the bigon's two sides
                edges.push((next_e, (cell_ports[0], cell_ports[1])));
                next_e += 1;
                edges.push((next_e, (cell_ports[0], cell_ports[1])));
                next_e += 1;
            }
            _ => {
                for j in 0..k {
                    edges.push((next_e, (cell_ports[j], cell_ports[(j + 1) % k])));
                    next_e += 1;
                }
            }
        }
    }
    let omega = society.omega();
    if omega.len() >= 3 {
        for i in 0..omega.len() {
            edges.push((next_e, (omega[i], omega[(i + 1) % omega.len()])));
            next_e += 1;
        }
    } else if omega.len() == 2 {
        edges.push((next_e, (omega[0], omega[1])));
    }
    let g = Graph::new(all_vertices, edges).expect("gadget ids are fresh");
    (g, ports)
}

/// Builds the skeleton for a cell list and wraps everything up; `None` when
/// the cells do not fit in a disk with Ω on the outside.
pub fn assemble(society: &Society, cells: Vec<Cell>) -> Option<DiskRendition> {
    let (gadget, ports) = build_gadget(society, &cells);
    let skeleton = embed_with_outer_cycle(&gadget, society.omega())?;
    let tie_breaker = cells
        .iter()
        .enumerate()
        .filter(|(_, c)| c.boundary.len() == 2)
        .map(|(i, _)| (i, 0u8))
        .collect();
    Some(DiskRendition {
        cells,
        tie_breaker,
        skeleton,
        ports,
    })
}

// ---------------------------------------------------------------------------
// validation

/// Checks every rendition axiom; the returned violations name the broken
/// one.  Empty list = valid.
pub fn validate_rendition(society: &Society, r: &DiskRendition) -> Vec<String> {
    let mut out = Vec::new();
    let g = society.graph();
    let nodes = r.nodes();

    for (i, c) in r.cells.iter().enumerate() {
        if c.boundary.len() > 3 && !c.vortex {
            out.push(format!(
                "(cell-size) cell {i} has {} boundary nodes but is not a vortex",
                c.boundary.len()
            ));
        }
        let distinct: BTreeSet<VertexId> = c.boundary.iter().copied().collect();
        if distinct.len() != c.boundary.len() {
            out.push(format!("(cell-boundary-distinct) cell {i} repeats a node"));
        }
        for &b in &c.boundary {
            if !c.sigma.contains_vertex(b) {
                out.push(format!(
                    "(boundary-in-sigma) node {b} of cell {i} missing from its subgraph"
                ));
            }
        }
        if !c.sigma.is_subgraph_of(g) {
            out.push(format!(
                "(sigma-subgraph) cell {i} subgraph is not a subgraph of the society"
            ));
        }
        if c.boundary.len() == 2 {
            match r.tie_breaker.get(&i) {
                Some(&s) if s < 2 => {}
                _ => out.push(format!("(tie-breaker) 2-node cell {i} lacks a side choice")),
            }
        }
    }

    // every edge in exactly one cell
    let mut owners: BTreeMap<EdgeId, usize> = BTreeMap::new();
    for (i, c) in r.cells.iter().enumerate() {
        for e in c.sigma.edge_ids() {
            if let Some(prev) = owners.insert(e, i) {
                out.push(format!(
                    "(edge-partition) edge {e} assigned to cells {prev} and {i}"
                ));
            }
        }
    }
    for e in g.edge_ids() {
        if !owners.contains_key(&e) {
            out.push(format!("(edge-partition) edge {e} assigned to no cell"));
        }
    }

    // every vertex covered
    let covered: BTreeSet<VertexId> = r
        .cells
        .iter()
        .flat_map(|c| c.sigma.vertices())
        .collect();
    for v in g.vertices() {
        if !covered.contains(&v) {
            out.push(format!("(vertex-cover) vertex {v} lies in no cell"));
        }
    }

    // cells overlap only in shared boundary nodes
    for i in 0..r.cells.len() {
        for j in (i + 1)..r.cells.len() {
            let vi = r.cells[i].sigma.vertex_set();
            let vj = r.cells[j].sigma.vertex_set();
            for &v in vi.intersection(vj) {
                if !r.cells[i].boundary.contains(&v) || !r.cells[j].boundary.contains(&v) {
                    out.push(format!(
                        "(overlap) vertex {v} shared by cells {i} and {j} is not a \
                         boundary node of both"
                    ));
                }
            }
        }
    }

    for &w in society.omega() {
        if !nodes.contains(&w) {
            out.push(format!("(omega-nodes) boundary vertex {w} is not a node"));
        }
    }

    // the skeleton is an embedding of the expected gadget with Ω outside
    let (gadget, _) = build_gadget(society, &r.cells);
    let sk = r.skeleton.graph();
    if sk.vertex_set() != gadget.vertex_set() || sk.edge_map() != gadget.edge_map() {
        out.push("(skeleton) stored skeleton is not the port-gadget graph".into());
    } else if !r.skeleton.is_planar_embedding() {
        out.push("(skeleton) stored rotation system is not planar".into());
    } else {
        let omega = society.omega();
        if omega.len() >= 3 {
            let ok = r.skeleton.outer_walks().iter().any(|w| {
                let verts = r.skeleton.walk_vertices(w);
                let rev: Vec<VertexId> = omega.iter().rev().copied().collect();
                cyclic_subsequence(&verts, omega) || cyclic_subsequence(&verts, &rev)
            });
            if !ok {
                out.push(
                    "(skeleton) boundary vertices are not on the outer face in Ω order"
                        .into(),
                );
            }
        }
    }

    out
}

// ---------------------------------------------------------------------------
// construction from a crossless society

/// A hidden piece of the society: an Ω-free set of vertices attached to the
/// rest through at most three vertices.
#[derive(Clone, Debug)]
struct Region {
    interior: BTreeSet<VertexId>,
    attachments: Vec<VertexId>,
}

struct Reduced {
    visible: Graph,
    regions: Vec<Region>,
    virtual_edges: BTreeSet<EdgeId>,
    gadget_legs: BTreeSet<EdgeId>,
    gadget_vertices: BTreeSet<VertexId>,
}

/// Repeatedly hides Ω-free components with at most three attachment
/// vertices, replacing each with a placeholder (a degree-3 hub vertex, a
/// virtual edge, or nothing) so that only the part of the society that must
/// actually be drawn remains visible.
fn reduce(society: &Society) -> Reduced {
    let omega = society.omega_set();
    let mut visible = society.graph().clone();
    let mut regions: Vec<Option<Region>> = Vec::new();
    let mut hub_of: BTreeMap<usize, VertexId> = BTreeMap::new();
    let mut vedge_of: BTreeMap<usize, EdgeId> = BTreeMap::new();
    let mut region_of_hub: BTreeMap<VertexId, usize> = BTreeMap::new();
    let mut region_of_vedge: BTreeMap<EdgeId, usize> = BTreeMap::new();
    let mut gadget_legs: BTreeSet<EdgeId> = BTreeSet::new();
    let mut next_v = visible.vertices().max().map(|v| v + 1).unwrap_or(0);
    let mut next_e = visible.edge_ids().max().map(|e| e + 1).unwrap_or(0);

    'search: loop {
        let verts: Vec<VertexId> = visible.vertices().collect();
        for s in 0..=3usize.min(verts.len()) {
            for cut in subsets(&verts, s) {
                let cut_set: BTreeSet<VertexId> = cut.iter().copied().collect();
                let rest = visible.without_vertices(&cut_set);
                for comp in rest.components() {
                    if comp.iter().any(|v| omega.contains(v)) {
                        continue;
                    }
                    let nb: BTreeSet<VertexId> = comp
                        .iter()
                        .flat_map(|&v| visible.incident(v).iter().map(|&(_, w)| w))
                        .filter(|w| !comp.contains(w))
                        .collect();
                    if nb.len() > 3 {
                        continue;
                    }

                    // regions forced into the new one
                    let mut absorb: BTreeSet<usize> = BTreeSet::new();
                    for &v in comp.iter().chain(nb.iter()) {
                        if let Some(&ri) = region_of_hub.get(&v) {
                            absorb.insert(ri);
                        }
                    }
                    for (&e, &ri) in &region_of_vedge {
                        let (u, w) = visible.endpoints(e).expect("virtual edge");
                        if comp.contains(&u) || comp.contains(&w) {
                            absorb.insert(ri);
                        }
                    }
                    let mut interior: BTreeSet<VertexId> = comp
                        .iter()
                        .copied()
                        .filter(|v| !region_of_hub.contains_key(v))
                        .collect();
                    let mut attach: BTreeSet<VertexId> = nb
                        .iter()
                        .copied()
                        .filter(|v| !region_of_hub.contains_key(v))
                        .collect();
                    for &ri in &absorb {
                        let rg = regions[ri].as_ref().expect("live region");
                        interior.extend(rg.interior.iter().copied());
                        attach.extend(rg.attachments.iter().copied());
                    }
                    attach.retain(|v| !interior.contains(v));
                    // a hidden vertex can no longer anchor another region
                    loop {
                        let mut grew = false;
                        for (ri, slot) in regions.iter().enumerate() {
                            let Some(rg) = slot else { continue };
                            if absorb.contains(&ri) {
                                continue;
                            }
                            if rg.attachments.iter().any(|a| interior.contains(a)) {
                                absorb.insert(ri);
                                interior.extend(rg.interior.iter().copied());
                                attach.extend(rg.attachments.iter().copied());
                                grew = true;
                            }
                        }
                        if !grew {
                            break;
                        }
                        attach.retain(|v| !interior.contains(v));
                    }
                    if attach.len() > 3 || interior.is_empty() {
                        continue;
                    }

                    // progress: visible vertices + live regions must shrink
                    let hubs_removed: BTreeSet<VertexId> = absorb
                        .iter()
                        .filter_map(|ri| hub_of.get(ri).copied())
                        .collect();
                    let removed_v = comp.len() + hubs_removed.difference(&comp).count();
                    let added_v = usize::from(attach.len() == 3);
                    if removed_v + absorb.len() <= added_v + 1 {
                        continue;
                    }

                    // apply the collapse
                    let vedges_removed: BTreeSet<EdgeId> = absorb
                        .iter()
                        .filter_map(|ri| vedge_of.get(ri).copied())
                        .collect();
                    let gone: BTreeSet<VertexId> =
                        comp.iter().copied().chain(hubs_removed).collect();
                    let keep_v: Vec<VertexId> =
                        visible.vertices().filter(|v| !gone.contains(v)).collect();
                    let mut keep_e: Vec<(EdgeId, (VertexId, VertexId))> = visible
                        .edge_map()
                        .iter()
                        .filter(|(e, (u, w))| {
                            !gone.contains(u)
                                && !gone.contains(w)
                                && !vedges_removed.contains(e)
                        })
                        .map(|(&e, &p)| (e, p))
                        .collect();
                    for &ri in &absorb {
                        regions[ri] = None;
                        hub_of.remove(&ri);
                        vedge_of.remove(&ri);
                    }
                    region_of_hub.retain(|_, ri| regions[*ri].is_some());
                    region_of_vedge.retain(|_, ri| regions[*ri].is_some());
                    gadget_legs.retain(|e| keep_e.iter().any(|(k, _)| k == e));

                    let attachments: Vec<VertexId> = attach.iter().copied().collect();
                    let new_ri = regions.len();
                    let mut keep_v = keep_v;
                    match attachments.len() {
                        3 => {
                            let hub = next_v;
                            next_v += 1;
                            keep_v.push(hub);
                            for &a in &attachments {
                                keep_e.push((next_e, (hub, a)));
                                gadget_legs.insert(next_e);
                                next_e += 1;
                            }
                            hub_of.insert(new_ri, hub);
                            region_of_hub.insert(hub, new_ri);
                        }
                        2 => {
                            keep_e.push((next_e, (attachments[0], attachments[1])));
                            vedge_of.insert(new_ri, next_e);
                            region_of_vedge.insert(next_e, new_ri);
                            next_e += 1;
                        }
                        _ => {}
                    }
                    regions.push(Some(Region {
                        interior,
                        attachments,
                    }));
                    visible = Graph::new(keep_v, keep_e).expect("collapse keeps ids distinct");
                    continue 'search;
                }
            }
        }
        break;
    }

    Reduced {
        visible,
        regions: regions.into_iter().flatten().collect(),
        virtual_edges: region_of_vedge.keys().copied().collect(),
        gadget_legs,
        gadget_vertices: region_of_hub.keys().copied().collect(),
    }
}

fn subsets(items: &[VertexId], k: usize) -> Vec<Vec<VertexId>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for (i, &x) in items.iter().enumerate() {
        for mut rest in subsets(&items[i + 1..], k - 1) {
            rest.insert(0, x);
            out.push(rest);
        }
    }
    out
}

/// A vortex-free disk rendition of the society, or `None` when it has none
/// (equivalently, when it has a cross).  Granularity is finest: every
/// visible edge is its own 2-node cell; hidden pieces become cells with at
/// most three boundary nodes.
pub fn rural_rendition(society: &Society) -> Option<DiskRendition> {
    let red = reduce(society);
    let g = society.graph();
    let mut cells: Vec<Cell> = Vec::new();

    for rg in &red.regions {
        let mut vs: BTreeSet<VertexId> = rg.interior.clone();
        vs.extend(rg.attachments.iter().copied());
        let es: Vec<(EdgeId, (VertexId, VertexId))> = g
            .edge_map()
            .iter()
            .filter(|(_, (u, w))| rg.interior.contains(u) || rg.interior.contains(w))
            .map(|(&e, &p)| (e, p))
            .collect();
        cells.push(Cell {
            boundary: rg.attachments.clone(),
            vortex: false,
            sigma: Graph::new(vs, es).expect("region subgraph"),
        });
    }

    for (&e, &(u, w)) in red.visible.edge_map() {
        if red.virtual_edges.contains(&e) || red.gadget_legs.contains(&e) {
            continue;
        }
        let boundary = if u == w { vec![u] } else { vec![u, w] };
        cells.push(Cell {
            boundary,
            vortex: false,
            sigma: Graph::new([u, w].into_iter().collect::<BTreeSet<_>>(), [(e, (u, w))])
                .expect("edge subgraph"),
        });
    }

    let covered: BTreeSet<VertexId> = cells
        .iter()
        .flat_map(|c| c.sigma.vertices())
        .collect();
    for v in red.visible.vertices() {
        if red.gadget_vertices.contains(&v) || covered.contains(&v) {
            continue;
        }
        let boundary = if society.omega_contains(v) {
            vec![v]
        } else {
            Vec::new()
        };
        cells.push(Cell {
            boundary,
            vortex: false,
            sigma: Graph::new([v], []).expect("single vertex"),
        });
    }

    let r = assemble(society, cells)?;
    debug_assert!(
        validate_rendition(society, &r).is_empty(),
        "constructed rendition must validate"
    );
    Some(r)
}

// ---------------------------------------------------------------------------
// groundedness and tracks

fn vortex_edges(r: &DiskRendition) -> BTreeSet<EdgeId> {
    r.cells
        .iter()
        .filter(|c| c.vortex)
        .flat_map(|c| c.sigma.edge_ids())
        .collect()
}

/// Both ends at nodes and at least one edge.
pub fn is_grounded_path(r: &DiskRendition, p: &Path) -> Result<bool, RenditionError> {
    let vx = vortex_edges(r);
    if p.edges().iter().any(|e| vx.contains(e)) {
        return Err(RenditionError::VortexEdgeUsed);
    }
    let nodes = r.nodes();
    Ok(!p.is_trivial() && nodes.contains(&p.first()) && nodes.contains(&p.last()))
}

/// Passes through at least two cells.
pub fn is_grounded_cycle(r: &DiskRendition, c: &Cycle) -> Result<bool, RenditionError> {
    let vx = vortex_edges(r);
    if c.edges().iter().any(|e| vx.contains(e)) {
        return Err(RenditionError::VortexEdgeUsed);
    }
    let owner = r.cell_of_edge();
    let cells: BTreeSet<usize> = c
        .edges()
        .iter()
        .filter_map(|e| owner.get(e).copied())
        .collect();
    Ok(cells.len() >= 2)
}

/// Runs of a walk through cells: (cell index, entry node, exit node).
type Runs = Vec<(usize, VertexId, VertexId)>;

/// Maximal same-cell runs of a closed edge walk, rotated so a run boundary
/// sits at position 0.
fn cycle_runs(r: &DiskRendition, c: &Cycle) -> Result<Runs, RenditionError> {
    let owner = r.cell_of_edge();
    let n = c.len();
    let cell_at = |i: usize| -> Result<usize, RenditionError> {
        owner.get(&c.edges()[i]).copied().ok_or_else(|| {
            RenditionError::InvalidRendition(format!(
                "edge {} belongs to no cell",
                c.edges()[i]
            ))
        })
    };
    let mut start = None;
    for i in 0..n {
        if cell_at(i)? != cell_at((i + n - 1) % n)? {
            start = Some(i);
            break;
        }
    }
    let Some(start) = start else {
        return Err(RenditionError::NotGrounded(
            "cycle stays within one cell".into(),
        ));
    };
    let nodes = r.nodes();
    let mut runs = Vec::new();
    let mut i = start;
    loop {
        let cell = cell_at(i)?;
        let from = c.vertices()[i];
        let mut j = i;
        while cell_at((j + 1) % n)? == cell && (j + 1) % n != start {
            j = (j + 1) % n;
        }
        let to = c.vertices()[(j + 1) % n];
        if !nodes.contains(&from) || !nodes.contains(&to) {
            return Err(RenditionError::NotGrounded(format!(
                "cycle enters cell {cell} away from a node"
            )));
        }
        if from == to {
            return Err(RenditionError::NotGrounded(format!(
                "cycle enters and leaves cell {cell} at the same node"
            )));
        }
        runs.push((cell, from, to));
        i = (j + 1) % n;
        if i == start {
            break;
        }
    }
    Ok(runs)
}

fn path_runs(
    r: &DiskRendition,
    p: &Path,
) -> Result<Runs, RenditionError> {
    let owner = r.cell_of_edge();
    let nodes = r.nodes();
    let mut runs = Vec::new();
    let mut i = 0;
    while i < p.len() {
        let cell = *owner.get(&p.edges()[i]).ok_or_else(|| {
            RenditionError::InvalidRendition(format!(
                "edge {} belongs to no cell",
                p.edges()[i]
            ))
        })?;
        let from = p.vertices()[i];
        let mut j = i;
        while j + 1 < p.len() && owner[&p.edges()[j + 1]] == cell {
            j += 1;
        }
        let to = p.vertices()[j + 1];
        if !nodes.contains(&from) || !nodes.contains(&to) {
            return Err(RenditionError::NotGrounded(format!(
                "path enters cell {cell} away from a node"
            )));
        }
        if from == to {
            return Err(RenditionError::NotGrounded(format!(
                "path enters and leaves cell {cell} at the same node"
            )));
        }
        runs.push((cell, from, to));
        i = j + 1;
    }
    Ok(runs)
}

fn arc_side(r: &DiskRendition, cell: usize, from: VertexId, to: VertexId) -> u8 {
    let b = &r.cells[cell].boundary;
    match b.len() {
        2 => r.tie_breaker.get(&cell).copied().unwrap_or(0),
        3 => b
            .iter()
            .position(|&v| v != from && v != to)
            .map(|p| p as u8)
            .unwrap_or(0),
        _ => 0,
    }
}

pub fn track_of_path(r: &DiskRendition, p: &Path) -> Result<Track, RenditionError> {
    if !is_grounded_path(r, p)? {
        return Err(RenditionError::NotGrounded("path is not grounded".into()));
    }
    let arcs = path_runs(r, p)?
        .into_iter()
        .map(|(cell, from, to)| TrackArc {
            cell,
            from,
            to,
            side: arc_side(r, cell, from, to),
        })
        .collect();
    Ok(Track {
        arcs,
        closed: false,
    })
}

pub fn track_of_cycle(r: &DiskRendition, c: &Cycle) -> Result<Track, RenditionError> {
    if !is_grounded_cycle(r, c)? {
        return Err(RenditionError::NotGrounded("cycle is not grounded".into()));
    }
    let arcs = cycle_runs(r, c)?
        .into_iter()
        .map(|(cell, from, to)| TrackArc {
            cell,
            from,
            to,
            side: arc_side(r, cell, from, to),
        })
        .collect();
    Ok(Track { arcs, closed: true })
}

// ---------------------------------------------------------------------------
// sides of a track: the flattened embedding

/// The flattened drawing used to answer side questions: every cell becomes
/// a star (fresh center joined to its boundary nodes), consecutive Ω nodes
/// are joined by disk-boundary edges, and the whole thing is embedded with
/// Ω outside.
struct Flat {
    graph: Graph,
    emb: Embedding,
    center: BTreeMap<usize, VertexId>,
}

fn flatten(society: &Society, r: &DiskRendition) -> Result<Flat, RenditionError> {
    let mut vertices: BTreeSet<VertexId> = r.nodes();
    vertices.extend(society.omega().iter().copied());
    let fresh0 = society
        .graph()
        .vertices()
        .max()
        .map(|v| v + 1)
        .unwrap_or(0);
    let mut next_v = fresh0;
    let mut next_e: EdgeId = 0;
    let mut edges: Vec<(EdgeId, (VertexId, VertexId))> = Vec::new();
    let mut center = BTreeMap::new();
    let mut all: Vec<VertexId> = vertices.iter().copied().collect();
    for (i, c) in r.cells.iter().enumerate() {
        if c.boundary.is_empty() {
            continue;
        }
        let w = next_v;
        next_v += 1;
        center.insert(i, w);
        all.push(w);
        for &b in &c.boundary {
            edges.push((next_e, (w, b)));
            next_e += 1;
        }
    }
    let omega = society.omega();
    if omega.len() >= 3 {
        for i in 0..omega.len() {
            edges.push((next_e, (omega[i], omega[(i + 1) % omega.len()])));
            next_e += 1;
        }
    } else if omega.len() == 2 {
        edges.push((next_e, (omega[0], omega[1])));
    }
    let graph = Graph::new(all, edges).map_err(|e| {
        RenditionError::InvalidRendition(format!("flattening failed: {e}"))
    })?;
    let emb = embed_with_outer_cycle(&graph, omega).ok_or_else(|| {
        RenditionError::InvalidRendition(
            "rendition does not flatten to a disk drawing".into(),
        )
    })?;
    Ok(Flat { graph, emb, center })
}

/// The flat edges a cycle's track traverses: for each run through cell `c`
/// from node `u` to node `v`, the star edges `u–w_c` and `w_c–v`.
fn flat_cut(
    flat: &Flat,
    runs: &[(usize, VertexId, VertexId)],
) -> Result<BTreeSet<EdgeId>, RenditionError> {
    let mut cut = BTreeSet::new();
    for &(cell, from, to) in runs {
        let w = *flat.center.get(&cell).ok_or_else(|| {
            RenditionError::InvalidRendition(format!("cell {cell} has no center"))
        })?;
        for x in [from, to] {
            let e = flat.graph.edge_between(w, x).ok_or_else(|| {
                RenditionError::InvalidRendition(format!(
                    "node {x} is not on the boundary of cell {cell}"
                ))
            })?;
            cut.insert(e);
        }
    }
    Ok(cut)
}

/// Faces on the bounded side of the cut (the side away from the outer
/// face), as indices into the raw orbit list.
fn inside_faces(
    flat: &Flat,
    cut: &BTreeSet<EdgeId>,
) -> Result<(Vec<Vec<Dart>>, BTreeSet<usize>), RenditionError> {
    let orbits = flat.emb.orbits()?;
    let mut face_of: BTreeMap<Dart, usize> = BTreeMap::new();
    for (i, orbit) in orbits.iter().enumerate() {
        for &d in orbit {
            face_of.insert(d, i);
        }
    }
    // union faces across every edge not on the cut
    let mut parent: Vec<usize> = (0..orbits.len()).collect();
    fn find(parent: &mut Vec<usize>, x: usize) -> usize {
        if parent[x] != x {
            let root = find(parent, parent[x]);
            parent[x] = root;
        }
        parent[x]
    }
    for e in flat.graph.edge_ids() {
        if cut.contains(&e) {
            continue;
        }
        let a = face_of[&Dart { edge: e, flip: false }];
        let b = face_of[&Dart { edge: e, flip: true }];
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        parent[ra] = rb;
    }
    let outer_roots: BTreeSet<usize> = flat
        .emb
        .outer_walks()
        .iter()
        .filter_map(|w| w.first())
        .map(|&d| find(&mut parent, face_of[&d]))
        .collect();
    let inside: BTreeSet<usize> = (0..orbits.len())
        .filter(|&i| !outer_roots.contains(&find(&mut parent, i)))
        .collect();
    if inside.is_empty() {
        return Err(RenditionError::NotGrounded(
            "track does not separate the disk".into(),
        ));
    }
    Ok((orbits, inside))
}

/// Cells strictly inside / traversed-by the cycle's track, per face
/// reachability in the flattened embedding.
fn classify_cells(
    society: &Society,
    r: &DiskRendition,
    c: &Cycle,
) -> Result<(BTreeSet<usize>, Runs), RenditionError> {
    let runs = cycle_runs(r, c)?;
    let flat = flatten(society, r)?;
    let cut = flat_cut(&flat, &runs)?;
    let (orbits, inside) = inside_faces(&flat, &cut)?;
    let traversed: BTreeSet<usize> = runs.iter().map(|&(c, _, _)| c).collect();
    let mut face_of: BTreeMap<Dart, usize> = BTreeMap::new();
    for (i, orbit) in orbits.iter().enumerate() {
        for &d in orbit {
            face_of.insert(d, i);
        }
    }
    let mut inner_cells = BTreeSet::new();
    for (i, cell) in r.cells.iter().enumerate() {
        if traversed.contains(&i) {
            inner_cells.insert(i);
            continue;
        }
        if cell.boundary.is_empty() {
            continue; // free-floating piece: kept outside by convention
        }
        let w = flat.center[&i];
        let d = flat.emb.rotation(w)[0];
        if inside.contains(&face_of[&d]) {
            inner_cells.insert(i);
        }
    }
    Ok((inner_cells, runs))
}

/// The two sides of a grounded cycle.
pub struct InnerOuter {
    pub inner: Graph,
    pub outer: Graph,
    pub inner_society: Society,
    /// Cells on the inner side, including those the track passes through.
    pub inside_cells: BTreeSet<usize>,
    pub traversed_cells: BTreeSet<usize>,
}

/// Splits the rendition along a grounded cycle's track.  Cells the track
/// passes through count as inner, so the inner graph contains the cycle;
/// the two sides partition the edges and share exactly the track nodes.
pub fn inner_outer(
    society: &Society,
    r: &DiskRendition,
    c: &Cycle,
) -> Result<InnerOuter, RenditionError> {
    let (inside_cells, runs) = classify_cells(society, r, c)?;
    let traversed: BTreeSet<usize> = runs.iter().map(|&(c, _, _)| c).collect();
    let track_nodes: Vec<VertexId> = runs.iter().map(|&(_, from, _)| from).collect();

    let mut inner_v: BTreeSet<VertexId> = track_nodes.iter().copied().collect();
    let mut inner_e: Vec<(EdgeId, (VertexId, VertexId))> = Vec::new();
    let mut outer_v: BTreeSet<VertexId> = track_nodes.iter().copied().collect();
    let mut outer_e: Vec<(EdgeId, (VertexId, VertexId))> = Vec::new();
    for (i, cell) in r.cells.iter().enumerate() {
        let (vs, es) = if inside_cells.contains(&i) {
            (&mut inner_v, &mut inner_e)
        } else {
            (&mut outer_v, &mut outer_e)
        };
        vs.extend(cell.sigma.vertices());
        es.extend(cell.sigma.edge_map().iter().map(|(&e, &p)| (e, p)));
    }
    let inner = Graph::new(inner_v, inner_e)?;
    let outer = Graph::new(outer_v, outer_e)?;
    let inner_society = Society::new(inner.clone(), track_nodes).map_err(|e| {
        RenditionError::InvalidRendition(format!("inner society: {e}"))
    })?;
    Ok(InnerOuter {
        inner,
        outer,
        inner_society,
        inside_cells,
        traversed_cells: traversed,
    })
}

/// Disjoint grounded cycles whose disks are concentric around the central
/// cell, listed inside-out.
pub fn verify_nest(
    society: &Society,
    r: &CylindricalRendition,
    cycles: &[Cycle],
) -> bool {
    for i in 0..cycles.len() {
        for j in (i + 1)..cycles.len() {
            if !cycles[i]
                .vertex_set()
                .is_disjoint(&cycles[j].vertex_set())
            {
                return false;
            }
        }
    }
    let mut prev: Option<BTreeSet<usize>> = None;
    for c in cycles {
        match is_grounded_cycle(&r.disk, c) {
            Ok(true) => {}
            _ => return false,
        }
        let Ok((inside, runs)) = classify_cells(society, &r.disk, c) else {
            return false;
        };
        let traversed: BTreeSet<usize> = runs.iter().map(|&(c, _, _)| c).collect();
        if !inside.contains(&r.c0) || traversed.contains(&r.c0) {
            return false;
        }
        if let Some(p) = &prev {
            if !p.is_subset(&inside) || p.iter().any(|c| traversed.contains(c)) {
                return false;
            }
        }
        prev = Some(inside);
    }
    true
}

/// The inner society of a grounded cycle together with the rendition the
/// disk inside its track induces on it.
pub fn restrict_to_disk(
    society: &Society,
    r: &DiskRendition,
    c: &Cycle,
) -> Result<(Society, DiskRendition), RenditionError> {
    let io = inner_outer(society, r, c)?;
    let cells: Vec<Cell> = io
        .inside_cells
        .iter()
        .map(|&i| r.cells[i].clone())
        .collect();
    let restricted = assemble(&io.inner_society, cells).ok_or_else(|| {
        RenditionError::InvalidRendition(
            "inner cells do not re-assemble into a disk".into(),
        )
    })?;
    Ok((io.inner_society, restricted))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrthogonalityMode {
    /// Each path meets each cycle in exactly one component and runs from Ω
    /// to the innermost disk with no internal Ω vertex.
    Radial,
    /// Each path meets each cycle in exactly two components.
    Transaction,
}

fn meet_components(g: &Graph, c: &Cycle, p: &Path) -> usize {
    let cv = c.vertex_set();
    let shared_v: BTreeSet<VertexId> =
        p.vertex_set().intersection(&cv).copied().collect();
    let ce = c.edge_set();
    let shared_e: Vec<(EdgeId, (VertexId, VertexId))> = p
        .edges()
        .iter()
        .filter(|e| ce.contains(e))
        .map(|&e| (e, g.endpoints(e).expect("shared edge")))
        .collect();
    match Graph::new(shared_v, shared_e) {
        Ok(meet) => meet.components().len(),
        Err(_) => 0,
    }
}

/// Does every member of the linkage meet every nest cycle the way the mode
/// demands?
pub fn orthogonality(
    society: &Society,
    r: &CylindricalRendition,
    nest: &[Cycle],
    l: &Linkage,
    mode: OrthogonalityMode,
) -> bool {
    let g = society.graph();
    let want = match mode {
        OrthogonalityMode::Radial => 1,
        OrthogonalityMode::Transaction => 2,
    };
    for p in l.paths() {
        for c in nest {
            if meet_components(g, c, p) != want {
                return false;
            }
        }
    }
    if mode == OrthogonalityMode::Radial {
        let Some(first_cycle) = nest.first() else {
            return false;
        };
        let Ok(io) = inner_outer(society, &r.disk, first_cycle) else {
            return false;
        };
        for p in l.paths() {
            let (a, b) = (p.first(), p.last());
            let oriented_ok = |s: VertexId, t: VertexId| {
                society.omega_contains(s) && io.inner.contains_vertex(t)
            };
            if !(oriented_ok(a, b) || oriented_ok(b, a)) {
                return false;
            }
            let vs = p.vertices();
            if vs[1..vs.len().saturating_sub(1)]
                .iter()
                .any(|&v| society.omega_contains(v))
            {
                return false;
            }
        }
    }
    true
}

/// Do `q` and some subset of `p` look identical from outside the cycle?
pub fn coterminal(
    society: &Society,
    r: &DiskRendition,
    c: &Cycle,
    q: &Linkage,
    p: &Linkage,
) -> bool {
    let Ok(io) = inner_outer(society, r, c) else {
        return false;
    };
    let h = &io.outer;
    let hv = h.vertex_set().clone();
    let he: BTreeSet<EdgeId> = h.edge_ids().collect();
    let target_v: BTreeSet<VertexId> =
        q.vertex_set().intersection(&hv).copied().collect();
    let target_e: BTreeSet<EdgeId> =
        q.edge_set().intersection(&he).copied().collect();
    let mut got_v: BTreeSet<VertexId> = BTreeSet::new();
    let mut got_e: BTreeSet<EdgeId> = BTreeSet::new();
    for path in p.paths() {
        let pv: BTreeSet<VertexId> = path
            .vertex_set()
            .intersection(&hv)
            .copied()
            .collect();
        let pe: BTreeSet<EdgeId> = path
            .edge_set()
            .intersection(&he)
            .copied()
            .collect();
        if pv.is_subset(&target_v) && pe.is_subset(&target_e) {
            got_v.extend(pv);
            got_e.extend(pe);
        }
    }
    got_v == target_v && got_e == target_e
}

/// Clips an orthogonal transaction that passes through the central cell
/// down to the inner society of the `i`-th nest cycle (1-based, `i ≥ 2`):
/// each member is replaced by its unique inner subpath that still carries a
/// central-cell edge.
pub fn restrict_transaction(
    society: &Society,
    r: &CylindricalRendition,
    nest: &[Cycle],
    t: &Transaction,
    i: usize,
) -> Result<(Society, Transaction), RenditionError> {
    if i < 2 {
        return Err(RenditionError::LevelTooSmall);
    }
    if i > nest.len() {
        return Err(RenditionError::NotOrthogonal(format!(
            "nest has no cycle {i}"
        )));
    }
    if !orthogonality(
        society,
        r,
        nest,
        t.linkage(),
        OrthogonalityMode::Transaction,
    ) {
        return Err(RenditionError::NotOrthogonal(
            "a member meets a nest cycle in the wrong number of pieces".into(),
        ));
    }
    let central: BTreeSet<EdgeId> = r.disk.cells[r.c0].sigma.edge_ids().collect();
    let io = inner_outer(society, &r.disk, &nest[i - 1])?;
    let omega_inner = io.inner_society.omega_set();
    let mut clipped = Vec::new();
    for q in t.paths() {
        if !q.edges().iter().any(|e| central.contains(e)) {
            return Err(RenditionError::NotUnexposed);
        }
        // maximal runs of q whose edges stay in the inner graph
        let mut runs: Vec<(usize, usize)> = Vec::new(); // edge index ranges
        let mut k = 0;
        while k < q.len() {
            if !io.inner.contains_edge(q.edges()[k]) {
                k += 1;
                continue;
            }
            let s = k;
            while k < q.len() && io.inner.contains_edge(q.edges()[k]) {
                k += 1;
            }
            runs.push((s, k));
        }
        let carrying: Vec<&(usize, usize)> = runs
            .iter()
            .filter(|(s, e)| q.edges()[*s..*e].iter().any(|x| central.contains(x)))
            .collect();
        let [(s, e)] = carrying.as_slice() else {
            return Err(RenditionError::NotOrthogonal(format!(
                "a member has {} inner subpaths through the central cell",
                carrying.len()
            )));
        };
        let vs: Vec<VertexId> = q.vertices()[*s..=*e].to_vec();
        let es: Vec<EdgeId> = q.edges()[*s..*e].to_vec();
        if !omega_inner.contains(vs.first().unwrap())
            || !omega_inner.contains(vs.last().unwrap())
        {
            return Err(RenditionError::NotOrthogonal(
                "a clipped member does not end on the inner boundary".into(),
            ));
        }
        clipped.push(Path::new(&io.inner, vs, es)?);
    }
    let linkage = Linkage::new(clipped)?;
    let restricted = Transaction::new(&io.inner_society, linkage)?;
    Ok((io.inner_society, restricted))
}

// ---------------------------------------------------------------------------
// certificates

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CellFile {
    pub id: usize,
    pub boundary: Vec<VertexId>,
    pub vortex: bool,
    pub sigma: SigmaFile,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SigmaFile {
    pub vertices: Vec<VertexId>,
    pub edges: Vec<(EdgeId, VertexId, VertexId)>,
}

/// The JSON certificate shape for a rendition.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RenditionFile {
    pub cells: Vec<CellFile>,
    pub tie_breaker: BTreeMap<String, u8>,
    pub skeleton_rotation: BTreeMap<String, Vec<(EdgeId, bool)>>,
}

impl DiskRendition {
    pub fn to_file(&self) -> RenditionFile {
        let cells = self
            .cells
            .iter()
            .enumerate()
            .map(|(id, c)| CellFile {
                id,
                boundary: c.boundary.clone(),
                vortex: c.vortex,
                sigma: SigmaFile {
                    vertices: c.sigma.vertices().collect(),
                    edges: c
                        .sigma
                        .edge_map()
                        .iter()
                        .map(|(&e, &(u, v))| (e, u, v))
                        .collect(),
                },
            })
            .collect();
        let tie_breaker = self
            .tie_breaker
            .iter()
            .map(|(&i, &s)| (i.to_string(), s))
            .collect();
        let skeleton_rotation = self
            .skeleton
            .rotations()
            .iter()
            .map(|(&v, rot)| {
                (
                    v.to_string(),
                    rot.iter().map(|d| (d.edge, d.flip)).collect(),
                )
            })
            .collect();
        RenditionFile {
            cells,
            tie_breaker,
            skeleton_rotation,
        }
    }

    /// Rebuilds a rendition from its certificate against a society,
    /// revalidating the skeleton rotation.
    pub fn from_file(
        society: &Society,
        file: &RenditionFile,
    ) -> Result<DiskRendition, RenditionError> {
        let mut cells = Vec::new();
        for (pos, cf) in file.cells.iter().enumerate() {
            if cf.id != pos {
                return Err(RenditionError::InvalidRendition(format!(
                    "cell ids must be 0..n in order, found {} at {pos}",
                    cf.id
                )));
            }
            let sigma = Graph::new(
                cf.sigma.vertices.iter().copied(),
                cf.sigma.edges.iter().map(|&(e, u, v)| (e, (u, v))),
            )
            .map_err(|e| {
                RenditionError::InvalidRendition(format!("cell {pos} subgraph: {e}"))
            })?;
            cells.push(Cell {
                boundary: cf.boundary.clone(),
                vortex: cf.vortex,
                sigma,
            });
        }
        let mut tie_breaker = BTreeMap::new();
        for (k, &s) in &file.tie_breaker {
            let i: usize = k.parse().map_err(|_| {
                RenditionError::InvalidRendition(format!("bad tie-breaker key {k}"))
            })?;
            tie_breaker.insert(i, s);
        }
        let (gadget, ports) = build_gadget(society, &cells);
        let mut rotation: BTreeMap<VertexId, Vec<Dart>> = BTreeMap::new();
        for (k, darts) in &file.skeleton_rotation {
            let v: VertexId = k.parse().map_err(|_| {
                RenditionError::InvalidRendition(format!("bad rotation key {k}"))
            })?;
            rotation.insert(
                v,
                darts
                    .iter()
                    .map(|&(edge, flip)| Dart { edge, flip })
                    .collect(),
            );
        }
        let skeleton = Embedding::from_rotation(gadget, rotation, Vec::new())?;
        // re-derive outer walks: accept the rotation, then recompute which
        // face realizes the boundary (validation rejects it if none does)
        let skeleton = {
            let orbits = skeleton.orbits()?;
            let omega = society.omega();
            let rev: Vec<VertexId> = omega.iter().rev().copied().collect();
            let mut outer = Vec::new();
            let mut comps_done: BTreeSet<VertexId> = BTreeSet::new();
            for orbit in &orbits {
                let verts = skeleton.walk_vertices(orbit);
                let comp_rep = *skeleton
                    .graph()
                    .reachable_from([verts[0]])
                    .iter()
                    .next()
                    .unwrap();
                if comps_done.contains(&comp_rep) {
                    continue;
                }
                if omega.len() < 3
                    || cyclic_subsequence(&verts, omega)
                    || cyclic_subsequence(&verts, &rev)
                {
                    comps_done.insert(comp_rep);
                    outer.push(orbit.clone());
                }
            }
            Embedding::from_rotation(
                skeleton.graph().clone(),
                skeleton.rotations().clone(),
                outer,
            )?
        };
        Ok(DiskRendition {
            cells,
            tie_breaker,
            skeleton,
            ports,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle_society(n: u32) -> Society {
        let edges: Vec<(u32, u32)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        let g = Graph::from_edge_list(&edges);
        Society::new(g, (0..n).collect()).unwrap()
    }

    #[test]
    fn four_cycle_renders() {
        let soc = cycle_society(4);
        let r = rural_rendition(&soc).unwrap();
        assert!(validate_rendition(&soc, &r).is_empty());
        assert_eq!(r.cells.len(), 4);
        assert!(r.cells.iter().all(|c| c.boundary.len() == 2 && !c.vortex));
    }

    #[test]
    fn k4_with_full_boundary_has_no_rendition() {
        let g = Graph::from_edge_list(&[(0, 1), (1, 2), (2, 3), (3, 0), (0, 2), (1, 3)]);
        let soc = Society::new(g, vec![0, 1, 2, 3]).unwrap();
        assert!(rural_rendition(&soc).is_none());
    }

    #[test]
    fn bare_cross_has_no_rendition() {
        let g = Graph::new(0..4u32, [(0u32, (0u32, 2u32)), (1, (1, 3))]).unwrap();
        let soc = Society::new(g, vec![0, 1, 2, 3]).unwrap();
        assert!(rural_rendition(&soc).is_none());
    }

    #[test]
    fn k4_with_three_boundary_vertices_renders() {
        let g = Graph::from_edge_list(&[(0, 1), (1, 2), (2, 3), (3, 0), (0, 2), (1, 3)]);
        let soc = Society::new(g, vec![0, 1, 2]).unwrap();
        let r = rural_rendition(&soc).unwrap();
        assert!(validate_rendition(&soc, &r).is_empty());
    }

    #[test]
    fn hidden_k5_renders_into_a_cell() {
        // Ω-triangle 0,1,2; K5 on 3..8 attached through the 3-cut {0,1,2}
        let mut edges = vec![(0, 1), (1, 2), (2, 0), (0, 3), (1, 4), (2, 5)];
        for u in 3..8u32 {
            for v in (u + 1)..8 {
                edges.push((u, v));
            }
        }
        let g = Graph::from_edge_list(&edges);
        let soc = Society::new(g, vec![0, 1, 2]).unwrap();
        let r = rural_rendition(&soc).unwrap();
        assert!(validate_rendition(&soc, &r).is_empty());
        let big = r
            .cells
            .iter()
            .find(|c| c.sigma.num_vertices() >= 5)
            .expect("the clique hides inside one cell");
        assert!(big.boundary.len() <= 3);
    }

    #[test]
    fn cube_with_antipodal_boundary_renders() {
        // 3-cube; Ω = two antipodal corners, which share no face of the
        // unique planar embedding — the whole graph must hide in a cell
        let edges = [
            (0, 1),
            (1, 2),
            (2, 3),
            (3, 0),
            (4, 5),
            (5, 6),
            (6, 7),
            (7, 4),
            (0, 4),
            (1, 5),
            (2, 6),
            (3, 7),
        ];
        let g = Graph::from_edge_list(&edges);
        let soc = Society::new(g, vec![0, 6]).unwrap();
        let r = rural_rendition(&soc).unwrap();
        assert!(validate_rendition(&soc, &r).is_empty());
    }

    #[test]
    fn empty_and_edgeless_societies() {
        let soc = Society::new(Graph::empty(), vec![]).unwrap();
        let r = rural_rendition(&soc).unwrap();
        assert!(validate_rendition(&soc, &r).is_empty());
        assert!(r.cells.is_empty());

        let g = Graph::new(0..3u32, []).unwrap();
        let soc = Society::new(g, vec![0, 1, 2]).unwrap();
        let r = rural_rendition(&soc).unwrap();
        assert!(validate_rendition(&soc, &r).is_empty());
        assert_eq!(r.cells.len(), 3); // one 1-node cell per boundary vertex
    }

    #[test]
    fn validate_flags_double_assignment() {
        let soc = cycle_society(3);
        let mut r = rural_rendition(&soc).unwrap();
        // assign edge 0 to a second cell
        let dup = r.cells[0].clone();
        r.cells.push(dup);
        let violations = validate_rendition(&soc, &r);
        assert!(violations.iter().any(|v| v.contains("(edge-partition)")));
    }

    #[test]
    fn certificate_round_trip() {
        let soc = cycle_society(5);
        let r = rural_rendition(&soc).unwrap();
        let file = r.to_file();
        let json = serde_json::to_string(&file).unwrap();
        let back: RenditionFile = serde_json::from_str(&json).unwrap();
        let r2 = DiskRendition::from_file(&soc, &back).unwrap();
        assert!(validate_rendition(&soc, &r2).is_empty());
        assert_eq!(r.cells.len(), r2.cells.len());
    }

    /// Two concentric 4-cycles joined by spokes, with a 4-node vortex cell
    /// inside the inner cycle carrying two crossing chords.
    ///
    /// Boundary: 0,1,2,3 (outer cycle); inner cycle: 10,11,12,13; spokes
    /// i — 10+i; vortex chords 10–12, 11–13.
    fn ladder() -> (Society, CylindricalRendition, Vec<Cycle>) {
        let edges = [
            (0, 1),
            (1, 2),
            (2, 3),
            (3, 0), // outer cycle: edges 0..4
            (10, 11),
            (11, 12),
            (12, 13),
            (13, 10), // inner cycle: edges 4..8
            (0, 10),
            (1, 11),
            (2, 12),
            (3, 13), // spokes: edges 8..12
            (10, 12),
            (11, 13), // vortex chords: edges 12, 13
        ];
        let g = Graph::from_edge_list(&edges);
        let soc = Society::new(g.clone(), vec![0, 1, 2, 3]).unwrap();
        let mut cells = Vec::new();
        for e in 0..12u32 {
            let (u, v) = g.endpoints(e).unwrap();
            cells.push(Cell {
                boundary: vec![u, v],
                vortex: false,
                sigma: Graph::new([u, v], [(e, (u, v))]).unwrap(),
            });
        }
        cells.push(Cell {
            boundary: vec![10, 11, 12, 13],
            vortex: true,
            sigma: Graph::new(
                [10, 11, 12, 13],
                [(12u32, (10u32, 12u32)), (13, (11, 13))],
            )
            .unwrap(),
        });
        let c0 = cells.len() - 1;
        let disk = assemble(&soc, cells).expect("ladder fits in a disk");
        assert!(validate_rendition(&soc, &disk).is_empty());
        let r = CylindricalRendition::new(disk, c0).unwrap();
        let inner = Cycle::new(&g, vec![10, 11, 12, 13], vec![4, 5, 6, 7]).unwrap();
        let outer = Cycle::new(&g, vec![0, 1, 2, 3], vec![0, 1, 2, 3]).unwrap();
        (soc, r, vec![inner, outer])
    }

    #[test]
    fn ladder_nest_verifies() {
        let (soc, r, nest) = ladder();
        assert!(verify_nest(&soc, &r, &nest));
        let swapped = vec![nest[1].clone(), nest[0].clone()];
        assert!(!verify_nest(&soc, &r, &swapped));
        // sharing a vertex
        let g = soc.graph();
        let bad = Cycle::new(g, vec![10, 11, 12, 13], vec![4, 5, 6, 7]).unwrap();
        assert!(!verify_nest(&soc, &r, &[nest[0].clone(), bad]));
    }

    #[test]
    fn ladder_inner_outer_partitions() {
        let (soc, r, nest) = ladder();
        let io = inner_outer(&soc, &r.disk, &nest[0]).unwrap();
        // inner: the inner cycle plus the vortex chords
        let inner_edges: BTreeSet<u32> = io.inner.edge_ids().collect();
        assert_eq!(inner_edges, (4..8).chain(12..14).collect());
        let outer_edges: BTreeSet<u32> = io.outer.edge_ids().collect();
        assert_eq!(outer_edges, (0..4).chain(8..12).collect());
        let shared: BTreeSet<u32> = io
            .inner
            .vertex_set()
            .intersection(io.outer.vertex_set())
            .copied()
            .collect();
        assert_eq!(shared, (10..14).collect());
        assert_eq!(io.inner_society.omega_len(), 4);
    }

    #[test]
    fn ladder_tracks_and_groundedness() {
        let (soc, r, nest) = ladder();
        let g = soc.graph();
        let t = track_of_cycle(&r.disk, &nest[0]).unwrap();
        assert!(t.closed);
        assert_eq!(t.arcs.len(), 4);
        let spoke = Path::new(g, vec![0, 10], vec![8]).unwrap();
        assert!(is_grounded_path(&r.disk, &spoke).unwrap());
        let tp = track_of_path(&r.disk, &spoke).unwrap();
        assert!(!tp.closed);
        assert_eq!(tp.arcs.len(), 1);
        // a path through the vortex is rejected
        let through = Path::new(g, vec![10, 12], vec![12]).unwrap();
        assert!(matches!(
            is_grounded_path(&r.disk, &through),
            Err(RenditionError::VortexEdgeUsed)
        ));
    }

    #[test]
    fn ladder_orthogonality() {
        let (soc, r, nest) = ladder();
        let g = soc.graph();
        let radial = Linkage::new(vec![
            Path::new(g, vec![0, 10], vec![8]).unwrap(),
            Path::new(g, vec![2, 12], vec![10]).unwrap(),
        ])
        .unwrap();
        assert!(orthogonality(
            &soc,
            &r,
            &nest,
            &radial,
            OrthogonalityMode::Radial
        ));
        // crossing transaction through the vortex
        let t = Linkage::new(vec![
            Path::new(g, vec![0, 10, 12, 2], vec![8, 12, 10]).unwrap(),
            Path::new(g, vec![1, 11, 13, 3], vec![9, 13, 11]).unwrap(),
        ])
        .unwrap();
        assert!(orthogonality(
            &soc,
            &r,
            &nest,
            &t,
            OrthogonalityMode::Transaction
        ));
        assert!(!orthogonality(
            &soc,
            &r,
            &nest,
            &t,
            OrthogonalityMode::Radial
        ));
        // a boundary-hugging path misses the inner cycle entirely
        let hug = Linkage::new(vec![Path::new(g, vec![0, 1], vec![0]).unwrap()]).unwrap();
        assert!(!orthogonality(
            &soc,
            &r,
            &nest,
            &hug,
            OrthogonalityMode::Radial
        ));
    }

    #[test]
    fn ladder_coterminal() {
        let (soc, r, nest) = ladder();
        let g = soc.graph();
        let spokes = Linkage::new(vec![
            Path::new(g, vec![0, 10], vec![8]).unwrap(),
            Path::new(g, vec![1, 11], vec![9]).unwrap(),
        ])
        .unwrap();
        assert!(coterminal(&soc, &r.disk, &nest[0], &spokes, &spokes));
        let other = Linkage::new(vec![Path::new(g, vec![2, 12], vec![10]).unwrap()]).unwrap();
        assert!(!coterminal(&soc, &r.disk, &nest[0], &spokes, &other));
        // subset selection: only the members matching q outside count
        let one = Linkage::new(vec![Path::new(g, vec![0, 10], vec![8]).unwrap()]).unwrap();
        assert!(coterminal(&soc, &r.disk, &nest[0], &one, &spokes));
    }

    #[test]
    fn ladder_restrict_to_disk() {
        let (soc, r, nest) = ladder();
        let (inner_soc, restricted) = restrict_to_disk(&soc, &r.disk, &nest[0]).unwrap();
        assert!(validate_rendition(&inner_soc, &restricted).is_empty());
        assert_eq!(restricted.cells.len(), 5); // four cycle edges + vortex
    }

    #[test]
    fn ladder_restrict_transaction() {
        let (soc, r, nest) = ladder();
        let g = soc.graph();
        let linkage = Linkage::new(vec![
            Path::new(g, vec![0, 10, 12, 2], vec![8, 12, 10]).unwrap(),
            Path::new(g, vec![1, 11, 13, 3], vec![9, 13, 11]).unwrap(),
        ])
        .unwrap();
        let t = Transaction::new(&soc, linkage).unwrap();
        assert!(matches!(
            restrict_transaction(&soc, &r, &nest, &t, 1),
            Err(RenditionError::LevelTooSmall)
        ));
        let (inner_soc, rt) = restrict_transaction(&soc, &r, &nest, &t, 2).unwrap();
        assert_eq!(rt.order(), 2);
        assert_eq!(inner_soc.omega_len(), 4);
    }

    #[test]
    fn trivial_one_vortex_rendition_validates() {
        // everything in a single vortex cell with Ω on its boundary
        let g = Graph::from_edge_list(&[(0, 1), (1, 2), (2, 3), (3, 0), (0, 2), (1, 3)]);
        let soc = Society::new(g.clone(), vec![0, 1, 2, 3]).unwrap();
        let cells = vec![Cell {
            boundary: vec![0, 1, 2, 3],
            vortex: true,
            sigma: g,
        }];
        let r = assemble(&soc, cells).unwrap();
        assert!(validate_rendition(&soc, &r).is_empty());
    }
}
