//! Multigraphs, paths, linkages, separations, bridges and minor models.
//!
//! Everything downstream is built on the types here.  Graphs are immutable
//! after construction: vertex and edge ids are opaque `u32`s, loops and
//! parallel edges are permitted, and all iteration is in ascending id order so
//! that every derived object is reproducible.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use thiserror::Error;

pub type VertexId = u32;
pub type EdgeId = u32;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("edge {0} has endpoint {1} outside the vertex set")]
    DanglingEndpoint(EdgeId, VertexId),
    #[error("vertex {0} is not in the graph")]
    NoSuchVertex(VertexId),
    #[error("edge {0} is not in the graph")]
    NoSuchEdge(EdgeId),
    #[error("path is malformed: {0}")]
    MalformedPath(String),
    #[error("cycle is malformed: {0}")]
    MalformedCycle(String),
    #[error("paths in a linkage must be pairwise vertex-disjoint (vertex {0} repeats)")]
    LinkageOverlap(VertexId),
    #[error("{0} and {1} disagree on edge {2}")]
    EdgeClash(VertexId, VertexId, EdgeId),
    #[error("there exist more than k disjoint X-Y paths")]
    MengerViolation,
    #[error("search budget exceeded")]
    BudgetExceeded,
}

/// An undirected multigraph with opaque vertex and edge ids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    vertices: BTreeSet<VertexId>,
    edges: BTreeMap<EdgeId, (VertexId, VertexId)>,
    adj: BTreeMap<VertexId, Vec<(EdgeId, VertexId)>>,
}

impl Graph {
    pub fn new(
        vertices: impl IntoIterator<Item = VertexId>,
        edges: impl IntoIterator<Item = (EdgeId, (VertexId, VertexId))>,
    ) -> Result<Self, GraphError> {
        let vertices: BTreeSet<VertexId> = vertices.into_iter().collect();
        let edges: BTreeMap<EdgeId, (VertexId, VertexId)> = edges.into_iter().collect();
        let mut adj: BTreeMap<VertexId, Vec<(EdgeId, VertexId)>> =
            vertices.iter().map(|&v| (v, Vec::new())).collect();
        for (&e, &(u, v)) in &edges {
            if !vertices.contains(&u) {
                return Err(GraphError::DanglingEndpoint(e, u));
            }
            if !vertices.contains(&v) {
                return Err(GraphError::DanglingEndpoint(e, v));
            }
            adj.get_mut(&u).unwrap().push((e, v));
            if u != v {
                adj.get_mut(&v).unwrap().push((e, u));
            }
        }
        for list in adj.values_mut() {
            list.sort_unstable();
        }
        Ok(Graph {
            vertices,
            edges,
            adj,
        })
    }

    /// Builds a graph from an endpoint list; edge ids are positions in the
    /// list and the vertex set is exactly the set of endpoints.
    pub fn from_edge_list(pairs: &[(VertexId, VertexId)]) -> Self {
        let vertices: BTreeSet<VertexId> =
            pairs.iter().flat_map(|&(u, v)| [u, v]).collect();
        Graph::new(
            vertices,
            pairs
                .iter()
                .enumerate()
                .map(|(i, &p)| (i as EdgeId, p)),
        )
        .expect("endpoints are vertices by construction")
    }

    pub fn empty() -> Self {
        Graph::new([], []).unwrap()
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_set(&self) -> &BTreeSet<VertexId> {
        &self.vertices
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.vertices.iter().copied()
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.edges.keys().copied()
    }

    pub fn edge_map(&self) -> &BTreeMap<EdgeId, (VertexId, VertexId)> {
        &self.edges
    }

    pub fn contains_vertex(&self, v: VertexId) -> bool {
        self.vertices.contains(&v)
    }

    pub fn contains_edge(&self, e: EdgeId) -> bool {
        self.edges.contains_key(&e)
    }

    pub fn endpoints(&self, e: EdgeId) -> Result<(VertexId, VertexId), GraphError> {
        self.edges.get(&e).copied().ok_or(GraphError::NoSuchEdge(e))
    }

    /// Incident (edge, other-endpoint) pairs in ascending edge-id order.
    /// A loop at `v` appears once, with the other endpoint equal to `v`.
    pub fn incident(&self, v: VertexId) -> &[(EdgeId, VertexId)] {
        self.adj.get(&v).map(|l| l.as_slice()).unwrap_or(&[])
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.incident(v)
            .iter()
            .map(|&(_, w)| if w == v { 2 } else { 1 })
            .sum()
    }

    pub fn distinct_neighbors(&self, v: VertexId) -> BTreeSet<VertexId> {
        self.incident(v)
            .iter()
            .filter(|&&(_, w)| w != v)
            .map(|&(_, w)| w)
            .collect()
    }

    /// The smallest-id edge joining `u` and `v`, if any.
    pub fn edge_between(&self, u: VertexId, v: VertexId) -> Option<EdgeId> {
        self.incident(u)
            .iter()
            .find(|&&(_, w)| w == v)
            .map(|&(e, _)| e)
    }

    pub fn induced(&self, keep: &BTreeSet<VertexId>) -> Graph {
        let vertices: BTreeSet<VertexId> =
            self.vertices.intersection(keep).copied().collect();
        let edges = self
            .edges
            .iter()
            .filter(|(_, &(u, v))| vertices.contains(&u) && vertices.contains(&v))
            .map(|(&e, &p)| (e, p));
        Graph::new(vertices.clone(), edges).unwrap()
    }

    pub fn without_vertices(&self, remove: &BTreeSet<VertexId>) -> Graph {
        let keep: BTreeSet<VertexId> =
            self.vertices.difference(remove).copied().collect();
        self.induced(&keep)
    }

    /// A subgraph given by explicit vertex and edge sets.
    pub fn subgraph(
        &self,
        vertices: &BTreeSet<VertexId>,
        edge_ids: &BTreeSet<EdgeId>,
    ) -> Result<Graph, GraphError> {
        for v in vertices {
            if !self.vertices.contains(v) {
                return Err(GraphError::NoSuchVertex(*v));
            }
        }
        let mut edges = Vec::new();
        for &e in edge_ids {
            let (u, v) = self.endpoints(e)?;
            if !vertices.contains(&u) {
                return Err(GraphError::DanglingEndpoint(e, u));
            }
            if !vertices.contains(&v) {
                return Err(GraphError::DanglingEndpoint(e, v));
            }
            edges.push((e, (u, v)));
        }
        Graph::new(vertices.iter().copied(), edges)
    }

    /// Is `self` a subgraph of `other` (compatible ids)?
    pub fn is_subgraph_of(&self, other: &Graph) -> bool {
        self.vertices.iter().all(|v| other.contains_vertex(*v))
            && self
                .edges
                .iter()
                .all(|(&e, &p)| other.edges.get(&e) == Some(&p))
    }

    /// Union of two subgraphs of a common host; edge ids must agree.
    pub fn union(&self, other: &Graph) -> Result<Graph, GraphError> {
        let mut edges = self.edges.clone();
        for (&e, &(u, v)) in &other.edges {
            if let Some(&(a, b)) = edges.get(&e) {
                if (a, b) != (u, v) {
                    return Err(GraphError::EdgeClash(u, v, e));
                }
            } else {
                edges.insert(e, (u, v));
            }
        }
        Graph::new(
            self.vertices.union(&other.vertices).copied(),
            edges,
        )
    }

    pub fn components(&self) -> Vec<BTreeSet<VertexId>> {
        let mut seen: BTreeSet<VertexId> = BTreeSet::new();
        let mut out = Vec::new();
        for &start in &self.vertices {
            if seen.contains(&start) {
                continue;
            }
            let comp = self.reachable_from([start]);
            seen.extend(comp.iter().copied());
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    pub fn reachable_from(
        &self,
        starts: impl IntoIterator<Item = VertexId>,
    ) -> BTreeSet<VertexId> {
        let mut seen: BTreeSet<VertexId> = starts
            .into_iter()
            .filter(|v| self.contains_vertex(*v))
            .collect();
        let mut queue: VecDeque<VertexId> = seen.iter().copied().collect();
        while let Some(v) = queue.pop_front() {
            for &(_, w) in self.incident(v) {
                if seen.insert(w) {
                    queue.push_back(w);
                }
            }
        }
        seen
    }

    /// Shortest path (by edge count, deterministic tie-break by id order) from
    /// any vertex of `from` to any vertex of `to` using only `allowed`
    /// vertices.  Vertices of `from` trivially in `to` yield length-0 paths.
    pub fn shortest_path(
        &self,
        from: &BTreeSet<VertexId>,
        to: &BTreeSet<VertexId>,
        allowed: impl Fn(VertexId) -> bool,
    ) -> Option<Path> {
        let mut pred: BTreeMap<VertexId, Option<(VertexId, EdgeId)>> = BTreeMap::new();
        let mut queue = VecDeque::new();
        for &s in from {
            if self.contains_vertex(s) && allowed(s) {
                pred.entry(s).or_insert(None);
                queue.push_back(s);
            }
        }
        let mut hit = None;
        'bfs: for &s in from {
            if pred.contains_key(&s) && to.contains(&s) {
                hit = Some(s);
                break 'bfs;
            }
        }
        while hit.is_none() {
            let Some(v) = queue.pop_front() else { break };
            for &(e, w) in self.incident(v) {
                if w == v || !allowed(w) || pred.contains_key(&w) {
                    continue;
                }
                pred.insert(w, Some((v, e)));
                if to.contains(&w) {
                    hit = Some(w);
                    break;
                }
                queue.push_back(w);
            }
        }
        let end = hit?;
        let mut vs = vec![end];
        let mut es = Vec::new();
        let mut cur = end;
        while let Some(&Some((p, e))) = pred.get(&cur) {
            vs.push(p);
            es.push(e);
            cur = p;
        }
        vs.reverse();
        es.reverse();
        Some(Path::new_unchecked(vs, es))
    }
}

/// A path: alternating vertex/edge sequence with distinct vertices.
/// Length 0 (a single vertex, no edges) is permitted.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Path {
    vertices: Vec<VertexId>,
    edges: Vec<EdgeId>,
}

impl Path {
    pub fn new(
        g: &Graph,
        vertices: Vec<VertexId>,
        edges: Vec<EdgeId>,
    ) -> Result<Self, GraphError> {
        if vertices.is_empty() {
            return Err(GraphError::MalformedPath("empty vertex sequence".into()));
        }
        if edges.len() + 1 != vertices.len() {
            return Err(GraphError::MalformedPath(
                "edge count must be one less than vertex count".into(),
            ));
        }
        let distinct: BTreeSet<VertexId> = vertices.iter().copied().collect();
        if distinct.len() != vertices.len() {
            return Err(GraphError::MalformedPath("repeated vertex".into()));
        }
        for (i, &e) in edges.iter().enumerate() {
            let (u, v) = g.endpoints(e)?;
            let (a, b) = (vertices[i], vertices[i + 1]);
            if (u, v) != (a, b) && (u, v) != (b, a) {
                return Err(GraphError::MalformedPath(format!(
                    "edge {e} does not join {a} and {b}"
                )));
            }
        }
        for &v in &vertices {
            if !g.contains_vertex(v) {
                return Err(GraphError::NoSuchVertex(v));
            }
        }
        Ok(Path { vertices, edges })
    }

    pub(crate) fn new_unchecked(vertices: Vec<VertexId>, edges: Vec<EdgeId>) -> Self {
        debug_assert_eq!(edges.len() + 1, vertices.len());
        Path { vertices, edges }
    }

    pub fn trivial(v: VertexId) -> Self {
        Path {
            vertices: vec![v],
            edges: Vec::new(),
        }
    }

    pub fn first(&self) -> VertexId {
        self.vertices[0]
    }

    pub fn last(&self) -> VertexId {
        *self.vertices.last().unwrap()
    }

    /// Number of edges.  A length-0 path still has one vertex, so there is
    /// deliberately no `is_empty`; see [`Path::is_trivial`].
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn edges(&self) -> &[EdgeId] {
        &self.edges
    }

    pub fn vertex_set(&self) -> BTreeSet<VertexId> {
        self.vertices.iter().copied().collect()
    }

    pub fn edge_set(&self) -> BTreeSet<EdgeId> {
        self.edges.iter().copied().collect()
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.vertices.contains(&v)
    }

    pub fn position(&self, v: VertexId) -> Option<usize> {
        self.vertices.iter().position(|&w| w == v)
    }

    pub fn reversed(&self) -> Path {
        let mut vs = self.vertices.clone();
        let mut es = self.edges.clone();
        vs.reverse();
        es.reverse();
        Path {
            vertices: vs,
            edges: es,
        }
    }

    /// Subpath between two vertices of the path, taken in path order
    /// regardless of the order the endpoints are given in.
    pub fn subpath(&self, x: VertexId, y: VertexId) -> Result<Path, GraphError> {
        let i = self
            .position(x)
            .ok_or(GraphError::MalformedPath(format!("{x} not on path")))?;
        let j = self
            .position(y)
            .ok_or(GraphError::MalformedPath(format!("{y} not on path")))?;
        let (lo, hi) = if i <= j { (i, j) } else { (j, i) };
        Ok(Path {
            vertices: self.vertices[lo..=hi].to_vec(),
            edges: self.edges[lo..hi].to_vec(),
        })
    }

    /// Concatenation; `self.last()` must equal `other.first()` and the paths
    /// must share no other vertex.
    pub fn concat(&self, other: &Path) -> Result<Path, GraphError> {
        if self.last() != other.first() {
            return Err(GraphError::MalformedPath(
                "concatenation endpoints do not match".into(),
            ));
        }
        let mine = self.vertex_set();
        for &v in &other.vertices[1..] {
            if mine.contains(&v) {
                return Err(GraphError::MalformedPath(format!(
                    "concatenation revisits vertex {v}"
                )));
            }
        }
        let mut vs = self.vertices.clone();
        vs.extend_from_slice(&other.vertices[1..]);
        let mut es = self.edges.clone();
        es.extend_from_slice(&other.edges);
        Ok(Path {
            vertices: vs,
            edges: es,
        })
    }

    /// The path as a graph (for unions and intersections).
    pub fn as_graph(&self, host: &Graph) -> Graph {
        let mut edges = Vec::new();
        for &e in &self.edges {
            edges.push((e, host.endpoints(e).expect("path edge in host")));
        }
        Graph::new(self.vertices.iter().copied(), edges).expect("path is a subgraph")
    }
}

/// A cycle: cyclic vertex sequence with `edges[i]` joining `vertices[i]` and
/// `vertices[(i+1) % n]`.  At least one edge; a single vertex with a loop and
/// two vertices with parallel edges are legal cycles.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Cycle {
    vertices: Vec<VertexId>,
    edges: Vec<EdgeId>,
}

impl Cycle {
    pub fn new(
        g: &Graph,
        vertices: Vec<VertexId>,
        edges: Vec<EdgeId>,
    ) -> Result<Self, GraphError> {
        if vertices.is_empty() || vertices.len() != edges.len() {
            return Err(GraphError::MalformedCycle(
                "need equally many vertices and edges, at least one each".into(),
            ));
        }
        let distinct: BTreeSet<VertexId> = vertices.iter().copied().collect();
        if distinct.len() != vertices.len() {
            return Err(GraphError::MalformedCycle("repeated vertex".into()));
        }
        let distinct_e: BTreeSet<EdgeId> = edges.iter().copied().collect();
        if distinct_e.len() != edges.len() {
            return Err(GraphError::MalformedCycle("repeated edge".into()));
        }
        let n = vertices.len();
        for i in 0..n {
            let (u, v) = g.endpoints(edges[i])?;
            let (a, b) = (vertices[i], vertices[(i + 1) % n]);
            if (u, v) != (a, b) && (u, v) != (b, a) {
                return Err(GraphError::MalformedCycle(format!(
                    "edge {} does not join {a} and {b}",
                    edges[i]
                )));
            }
        }
        Ok(Cycle { vertices, edges })
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn edges(&self) -> &[EdgeId] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn vertex_set(&self) -> BTreeSet<VertexId> {
        self.vertices.iter().copied().collect()
    }

    pub fn edge_set(&self) -> BTreeSet<EdgeId> {
        self.edges.iter().copied().collect()
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.vertices.contains(&v)
    }

    pub fn as_graph(&self, host: &Graph) -> Graph {
        let mut edges = Vec::new();
        for &e in &self.edges {
            edges.push((e, host.endpoints(e).expect("cycle edge in host")));
        }
        Graph::new(self.vertices.iter().copied(), edges).expect("cycle is a subgraph")
    }

    /// The two arcs of the cycle between distinct vertices `x` and `y`; the
    /// first returned path starts at `x` and follows the cycle orientation.
    pub fn arcs(&self, x: VertexId, y: VertexId) -> Result<(Path, Path), GraphError> {
        let n = self.vertices.len();
        let i = self
            .vertices
            .iter()
            .position(|&v| v == x)
            .ok_or(GraphError::MalformedCycle(format!("{x} not on cycle")))?;
        let j = self
            .vertices
            .iter()
            .position(|&v| v == y)
            .ok_or(GraphError::MalformedCycle(format!("{y} not on cycle")))?;
        if i == j {
            return Err(GraphError::MalformedCycle("arc endpoints equal".into()));
        }
        let walk = |from: usize, to: usize| {
            let mut vs = Vec::new();
            let mut es = Vec::new();
            let mut k = from;
            vs.push(self.vertices[k]);
            while k != to {
                es.push(self.edges[k]);
                k = (k + 1) % n;
                vs.push(self.vertices[k]);
            }
            Path::new_unchecked(vs, es)
        };
        Ok((walk(i, j), walk(j, i)))
    }
}

/// A family of pairwise vertex-disjoint paths.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Linkage {
    paths: Vec<Path>,
}

impl Linkage {
    pub fn new(paths: Vec<Path>) -> Result<Self, GraphError> {
        let mut seen: BTreeSet<VertexId> = BTreeSet::new();
        for p in &paths {
            for &v in p.vertices() {
                if !seen.insert(v) {
                    return Err(GraphError::LinkageOverlap(v));
                }
            }
        }
        Ok(Linkage { paths })
    }

    pub fn empty() -> Self {
        Linkage { paths: Vec::new() }
    }

    pub fn order(&self) -> usize {
        self.paths.len()
    }

    pub fn paths(&self) -> &[Path] {
        &self.paths
    }

    pub fn into_paths(self) -> Vec<Path> {
        self.paths
    }

    pub fn iter(&self) -> impl Iterator<Item = &Path> {
        self.paths.iter()
    }

    pub fn vertex_set(&self) -> BTreeSet<VertexId> {
        self.paths
            .iter()
            .flat_map(|p| p.vertices().iter().copied())
            .collect()
    }

    pub fn edge_set(&self) -> BTreeSet<EdgeId> {
        self.paths
            .iter()
            .flat_map(|p| p.edges().iter().copied())
            .collect()
    }

    pub fn contains_vertex(&self, v: VertexId) -> bool {
        self.paths.iter().any(|p| p.contains(v))
    }

    pub fn as_graph(&self, host: &Graph) -> Graph {
        let mut g = Graph::empty();
        for p in &self.paths {
            g = g.union(&p.as_graph(host)).expect("disjoint paths");
        }
        g
    }
}

/// A separation (A, B): `A ∪ B = V(G)` and no edge joins `A ∖ B` to `B ∖ A`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Separation {
    pub a: BTreeSet<VertexId>,
    pub b: BTreeSet<VertexId>,
}

impl Separation {
    pub fn order(&self) -> usize {
        self.a.intersection(&self.b).count()
    }

    pub fn boundary(&self) -> BTreeSet<VertexId> {
        self.a.intersection(&self.b).copied().collect()
    }

    pub fn is_valid(&self, g: &Graph) -> bool {
        if self.a.union(&self.b).count() != g.num_vertices()
            || !self.a.iter().all(|v| g.contains_vertex(*v))
            || !self.b.iter().all(|v| g.contains_vertex(*v))
        {
            return false;
        }
        g.edge_map().values().all(|&(u, v)| {
            let u_strict_a = self.a.contains(&u) && !self.b.contains(&u);
            let v_strict_a = self.a.contains(&v) && !self.b.contains(&v);
            let u_strict_b = self.b.contains(&u) && !self.a.contains(&u);
            let v_strict_b = self.b.contains(&v) && !self.a.contains(&v);
            !((u_strict_a && v_strict_b) || (u_strict_b && v_strict_a))
        })
    }
}

// ---------------------------------------------------------------------------
// Disjoint paths (Menger) via vertex-splitting unit-capacity flow.
// ---------------------------------------------------------------------------

struct FlowNet {
    // arcs stored as (to, cap); flow kept separately; arcs come in
    // even/odd residual pairs: arc 2i is forward, 2i+1 its reverse.
    to: Vec<usize>,
    cap: Vec<i64>,
    head: Vec<Vec<usize>>,
}

impl FlowNet {
    fn new(n: usize) -> Self {
        FlowNet {
            to: Vec::new(),
            cap: Vec::new(),
            head: vec![Vec::new(); n],
        }
    }

    fn add_arc(&mut self, from: usize, to: usize, cap: i64) -> usize {
        let idx = self.to.len();
        self.to.push(to);
        self.cap.push(cap);
        self.head[from].push(idx);
        self.to.push(from);
        self.cap.push(0);
        self.head[to].push(idx + 1);
        idx
    }

    /// Edmonds–Karp augmentation; returns the max-flow value.  Deterministic:
    /// arcs are explored in insertion order.
    fn max_flow(&mut self, s: usize, t: usize) -> i64 {
        let mut total = 0;
        loop {
            let mut pred: Vec<Option<usize>> = vec![None; self.head.len()];
            let mut seen = vec![false; self.head.len()];
            seen[s] = true;
            let mut queue = VecDeque::from([s]);
            'bfs: while let Some(v) = queue.pop_front() {
                for &a in &self.head[v] {
                    if self.cap[a] > 0 && !seen[self.to[a]] {
                        seen[self.to[a]] = true;
                        pred[self.to[a]] = Some(a);
                        if self.to[a] == t {
                            break 'bfs;
                        }
                        queue.push_back(self.to[a]);
                    }
                }
            }
            if !seen[t] {
                return total;
            }
            // unit augmentation (all our paths carry one unit)
            let mut v = t;
            while v != s {
                let a = pred[v].unwrap();
                self.cap[a] -= 1;
                self.cap[a ^ 1] += 1;
                v = self.to[a ^ 1];
            }
            total += 1;
        }
    }

    fn residual_reachable(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.head.len()];
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &a in &self.head[v] {
                if self.cap[a] > 0 && !seen[self.to[a]] {
                    seen[self.to[a]] = true;
                    queue.push_back(self.to[a]);
                }
            }
        }
        seen
    }
}

/// A maximum family of vertex-disjoint `X`–`Y` paths whose internal vertices
/// avoid `forbidden_internal`, together with a minimum separation of equal
/// order certifying maximality.
///
/// Degenerate endpoints: every `v ∈ X ∩ Y` is returned as a length-0 path.
/// Forbidden vertices outside `X ∪ Y` can appear on no admissible path and
/// are pruned before routing; the returned separation is a separation of the
/// graph with those vertices removed (for the common case
/// `forbidden_internal ⊆ X ∪ Y` it is a separation of `g` itself).
pub fn disjoint_paths(
    g: &Graph,
    x: &BTreeSet<VertexId>,
    y: &BTreeSet<VertexId>,
    forbidden_internal: &BTreeSet<VertexId>,
) -> (Linkage, Separation) {
    let x: BTreeSet<VertexId> = x.iter().filter(|v| g.contains_vertex(**v)).copied().collect();
    let y: BTreeSet<VertexId> = y.iter().filter(|v| g.contains_vertex(**v)).copied().collect();
    let shared: BTreeSet<VertexId> = x.intersection(&y).copied().collect();
    let endpoints: BTreeSet<VertexId> = x.union(&y).copied().collect();
    let unusable: BTreeSet<VertexId> = forbidden_internal
        .difference(&endpoints)
        .filter(|v| g.contains_vertex(**v))
        .copied()
        .collect();

    // Work graph: drop vertices that can never appear on an admissible path.
    let mut dropped = unusable.clone();
    dropped.extend(shared.iter().copied());
    let work = g.without_vertices(&dropped);
    let xs: BTreeSet<VertexId> = x.difference(&shared).copied().collect();
    let ys: BTreeSet<VertexId> = y.difference(&shared).copied().collect();

    let verts: Vec<VertexId> = work.vertices().collect();
    let index: BTreeMap<VertexId, usize> =
        verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let n = verts.len();
    let (source, sink) = (2 * n, 2 * n + 1);
    let big = n as i64 + 2;
    let mut net = FlowNet::new(2 * n + 2);

    let vin = |i: usize| 2 * i;
    let vout = |i: usize| 2 * i + 1;

    for i in 0..n {
        net.add_arc(vin(i), vout(i), 1);
    }
    let mut source_arcs: Vec<(VertexId, usize)> = Vec::new();
    for &v in &xs {
        source_arcs.push((v, net.add_arc(source, vin(index[&v]), big)));
    }
    let mut sink_arcs: BTreeMap<VertexId, usize> = BTreeMap::new();
    for &v in &ys {
        sink_arcs.insert(v, net.add_arc(vout(index[&v]), sink, big));
    }
    // adjacency arcs; an ordered arc u_out -> v_in exists unless u may only
    // end paths (forbidden and in Y only) or v may only start them
    // (forbidden and in X only).
    let may_have_successor =
        |v: VertexId| !(forbidden_internal.contains(&v) && ys.contains(&v));
    let may_have_predecessor =
        |v: VertexId| !(forbidden_internal.contains(&v) && xs.contains(&v));
    let mut arc_of_edge: Vec<(usize, VertexId, VertexId)> = Vec::new();
    for (&_e, &(u, v)) in work.edge_map() {
        if u == v {
            continue;
        }
        for (a, b) in [(u, v), (v, u)] {
            if may_have_successor(a) && may_have_predecessor(b) {
                let idx = net.add_arc(vout(index[&a]), vin(index[&b]), big);
                arc_of_edge.push((idx, a, b));
            }
        }
    }

    let flow = net.max_flow(source, sink);

    // Trace unit flows into paths.  Residual bookkeeping: a forward arc with
    // cap strictly below its original capacity carries flow.
    let mut adj_flow: BTreeMap<(VertexId, VertexId), i64> = BTreeMap::new();
    for &(idx, a, b) in &arc_of_edge {
        let used = big - net.cap[idx];
        if used > 0 {
            *adj_flow.entry((a, b)).or_insert(0) += used;
        }
    }
    // cancel opposite flows on the same unordered pair
    let pairs: Vec<(VertexId, VertexId)> = adj_flow.keys().copied().collect();
    for (a, b) in pairs {
        if a < b {
            let f1 = adj_flow.get(&(a, b)).copied().unwrap_or(0);
            let f2 = adj_flow.get(&(b, a)).copied().unwrap_or(0);
            let m = f1.min(f2);
            if m > 0 {
                *adj_flow.get_mut(&(a, b)).unwrap() -= m;
                *adj_flow.get_mut(&(b, a)).unwrap() -= m;
            }
        }
    }

    let mut sink_flow: BTreeMap<VertexId, i64> = sink_arcs
        .iter()
        .map(|(&v, &a)| (v, big - net.cap[a]))
        .collect();

    let mut paths: Vec<Path> = shared.iter().map(|&v| Path::trivial(v)).collect();
    for &(sv, arc) in &source_arcs {
        let starts = big - net.cap[arc];
        for _ in 0..starts {
            let mut vs = vec![sv];
            let mut es: Vec<EdgeId> = Vec::new();
            let mut cur = sv;
            loop {
                // terminate if this vertex sends a unit to the sink
                if let Some(f) = sink_flow.get_mut(&cur) {
                    if *f > 0 {
                        *f -= 1;
                        break;
                    }
                }
                // otherwise follow a flowed out-arc
                let nxt = adj_flow
                    .iter()
                    .find(|(&(a, _), &f)| a == cur && f > 0)
                    .map(|(&(_, b), _)| b)
                    .expect("flow conservation");
                *adj_flow.get_mut(&(cur, nxt)).unwrap() -= 1;
                es.push(work.edge_between(cur, nxt).expect("flow uses real edges"));
                vs.push(nxt);
                cur = nxt;
            }
            paths.push(Path::new_unchecked(vs, es));
        }
    }
    debug_assert_eq!(paths.len() as i64, flow + shared.len() as i64);

    // Leftmost minimum cut from residual reachability.
    let reach = net.residual_reachable(source);
    let mut a_side: BTreeSet<VertexId> = shared.clone();
    let mut boundary: BTreeSet<VertexId> = shared.clone();
    for (i, &v) in verts.iter().enumerate() {
        if reach[vin(i)] {
            a_side.insert(v);
            if !reach[vout(i)] {
                boundary.insert(v);
            }
        }
    }
    let mut b_side: BTreeSet<VertexId> = work
        .vertices()
        .filter(|v| !a_side.contains(v))
        .collect();
    b_side.extend(boundary.iter().copied());
    b_side.extend(shared.iter().copied());

    let linkage = Linkage::new(paths).expect("flow paths are vertex-disjoint");
    let sep = Separation {
        a: a_side,
        b: b_side,
    };
    debug_assert_eq!(linkage.order(), sep.order());
    (linkage, sep)
}

/// A minimum X–Y separation that avoids placing X-vertices on the boundary
/// whenever some minimum separation does; among those, the leftmost one.
fn preferred_min_separation(
    g: &Graph,
    x: &BTreeSet<VertexId>,
    y: &BTreeSet<VertexId>,
) -> Separation {
    let x: BTreeSet<VertexId> = x.iter().filter(|v| g.contains_vertex(**v)).copied().collect();
    let y: BTreeSet<VertexId> = y.iter().filter(|v| g.contains_vertex(**v)).copied().collect();
    let shared: BTreeSet<VertexId> = x.intersection(&y).copied().collect();
    let work = g.without_vertices(&shared);
    let xs: BTreeSet<VertexId> = x.difference(&shared).copied().collect();
    let ys: BTreeSet<VertexId> = y.difference(&shared).copied().collect();

    let verts: Vec<VertexId> = work.vertices().collect();
    let index: BTreeMap<VertexId, usize> =
        verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let n = verts.len();
    let (source, sink) = (2 * n, 2 * n + 1);
    let big = n as i64 + 2;
    let vin = |i: usize| 2 * i;
    let vout = |i: usize| 2 * i + 1;

    let build = |split_caps: &BTreeMap<VertexId, i64>| -> FlowNet {
        let mut net = FlowNet::new(2 * n + 2);
        for (i, &v) in verts.iter().enumerate() {
            let cap = split_caps.get(&v).copied().unwrap_or(1);
            net.add_arc(vin(i), vout(i), cap);
        }
        for &v in &xs {
            net.add_arc(source, vin(index[&v]), big);
        }
        for &v in &ys {
            net.add_arc(vout(index[&v]), sink, big);
        }
        for (&_e, &(u, v)) in work.edge_map() {
            if u != v {
                net.add_arc(vout(index[&u]), vin(index[&v]), big);
                net.add_arc(vout(index[&v]), vin(index[&u]), big);
            }
        }
        net
    };

    let mut caps: BTreeMap<VertexId, i64> = BTreeMap::new();
    let f = build(&caps).max_flow(source, sink);
    // Greedily make X-vertices uncuttable while the min-cut size is unchanged.
    for &v in &xs {
        caps.insert(v, big);
        let mut net = build(&caps);
        if net.max_flow(source, sink) > f {
            caps.remove(&v);
        }
    }
    let mut net = build(&caps);
    let got = net.max_flow(source, sink);
    debug_assert_eq!(got, f);
    let reach = net.residual_reachable(source);
    let mut a_side: BTreeSet<VertexId> = shared.clone();
    let mut boundary: BTreeSet<VertexId> = shared.clone();
    for (i, &v) in verts.iter().enumerate() {
        if reach[vin(i)] {
            a_side.insert(v);
            if !reach[vout(i)] {
                boundary.insert(v);
            }
        }
    }
    let mut b_side: BTreeSet<VertexId> = work
        .vertices()
        .filter(|v| !a_side.contains(v))
        .collect();
    b_side.extend(boundary.iter().copied());
    b_side.extend(shared.iter().copied());
    Separation {
        a: a_side,
        b: b_side,
    }
}

/// Outcome flag of [`leftmost_min_separation`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SeparationOutcome {
    /// `|A∩B| = k`, with `k` disjoint `(A∩B)`–`Y` paths inside `G[B]`.
    Saturated(Linkage),
    /// `|A∩B| < k` and `A∩B ⊆ Y`.
    Deficient,
}

/// Given that there are no `k+1` disjoint `X`–`Y` paths, produce a separation
/// `(A, B)` with `X ⊆ A`, `Y ⊆ B`, every boundary vertex reachable from `X`
/// inside `G[A]`, and exactly one of:
/// (i) `|A∩B| = k` with `k` disjoint `(A∩B)`–`Y` paths in `G[B]`, or
/// (ii) `|A∩B| < k` with `A∩B ⊆ Y`.
pub fn leftmost_min_separation(
    g: &Graph,
    x: &BTreeSet<VertexId>,
    y: &BTreeSet<VertexId>,
    k: usize,
) -> Result<(Separation, SeparationOutcome), GraphError> {
    let none = BTreeSet::new();
    let (max_linkage, _) = disjoint_paths(g, x, y, &none);
    if max_linkage.order() > k {
        return Err(GraphError::MengerViolation);
    }
    let start = preferred_min_separation(g, x, y);

    // Restrict A to the part reachable from X; a minimum separation keeps its
    // full boundary under this restriction.
    let restrict = |mut sep: Separation, g: &Graph, x: &BTreeSet<VertexId>| -> Separation {
        let ga = g.induced(&sep.a);
        let reach = ga.reachable_from(x.iter().copied());
        let lost: BTreeSet<VertexId> =
            sep.a.iter().filter(|v| !reach.contains(v)).copied().collect();
        sep.a = reach;
        sep.b.extend(lost);
        sep
    };

    let mut sep = restrict(start, g, x);

    loop {
        let boundary = sep.boundary();
        if boundary.len() == k {
            let gb = g.induced(&sep.b);
            let (paths, _) = disjoint_paths(&gb, &boundary, y, &none);
            debug_assert_eq!(paths.order(), k, "invariant (3) must hold at exit");
            return Ok((sep, SeparationOutcome::Saturated(paths)));
        }
        if boundary.iter().all(|v| y.contains(v)) {
            return Ok((sep, SeparationOutcome::Deficient));
        }
        // Grow: some boundary vertex v ∉ Y; follow its (A∩B)–Y path one step.
        let gb = g.induced(&sep.b);
        let (paths, _) = disjoint_paths(&gb, &boundary, y, &none);
        debug_assert_eq!(paths.order(), boundary.len(), "invariant (3)");
        let grower = paths
            .iter()
            .find(|p| !y.contains(&p.first()))
            .expect("some boundary vertex is outside Y");
        let xnext = grower.vertices()[1];
        sep.a.insert(xnext);

        // Re-establish invariant (3): full routing from the enlarged boundary.
        loop {
            let boundary = sep.boundary();
            let gb = g.induced(&sep.b);
            let (paths, inner) = disjoint_paths(&gb, &boundary, y, &none);
            if paths.order() == boundary.len() {
                break;
            }
            // Replace (A, B) by (A ∪ A*, B*) using the minimum separation of
            // G[B] between the boundary and Y; this strictly reduces order.
            debug_assert!(inner.order() < boundary.len());
            let mut new_a = sep.a.clone();
            new_a.extend(inner.a.iter().copied());
            sep = Separation {
                a: new_a,
                b: inner.b,
            };
            sep = restrict(sep, g, x);
        }
        sep = restrict(sep, g, x);
    }
}

// ---------------------------------------------------------------------------
// Bridges
// ---------------------------------------------------------------------------

/// An `H`-bridge of `G`: either a single edge of `G ∖ E(H)` with both
/// endpoints in `V(H)`, or a component of `G − V(H)` together with all edges
/// joining it to `V(H)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bridge {
    /// Interior vertices (empty for a trivial edge-bridge).
    pub interior: BTreeSet<VertexId>,
    /// Vertices of attachment: `V(bridge) ∩ V(H)`.
    pub attachments: BTreeSet<VertexId>,
    pub edges: BTreeSet<EdgeId>,
}

impl Bridge {
    pub fn vertices(&self) -> BTreeSet<VertexId> {
        self.interior.union(&self.attachments).copied().collect()
    }
}

pub fn h_bridges(g: &Graph, h: &Graph) -> Vec<Bridge> {
    let hv = h.vertex_set();
    let mut bridges = Vec::new();
    // trivial bridges: edges outside E(H) with both endpoints in V(H)
    for (&e, &(u, v)) in g.edge_map() {
        if !h.contains_edge(e) && hv.contains(&u) && hv.contains(&v) {
            bridges.push(Bridge {
                interior: BTreeSet::new(),
                attachments: [u, v].into_iter().collect(),
                edges: [e].into_iter().collect(),
            });
        }
    }
    // nontrivial bridges: components of G − V(H) plus their edges to V(H)
    let rest = g.without_vertices(hv);
    for comp in rest.components() {
        let mut edges: BTreeSet<EdgeId> = BTreeSet::new();
        let mut attachments: BTreeSet<VertexId> = BTreeSet::new();
        for (&e, &(u, v)) in g.edge_map() {
            let ui = comp.contains(&u);
            let vi = comp.contains(&v);
            if ui && vi || (ui && hv.contains(&v)) || (vi && hv.contains(&u)) {
                edges.insert(e);
                if ui && hv.contains(&v) {
                    attachments.insert(v);
                }
                if vi && hv.contains(&u) {
                    attachments.insert(u);
                }
            }
        }
        bridges.push(Bridge {
            interior: comp,
            attachments,
            edges,
        });
    }
    bridges.sort_by_key(|b| {
        (
            b.vertices().iter().next().copied(),
            b.edges.iter().next().copied(),
        )
    });
    bridges
}

// ---------------------------------------------------------------------------
// Minor models
// ---------------------------------------------------------------------------

/// A model of a `K_t` minor: pairwise disjoint connected branch sets plus a
/// witness edge for each pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinorModel {
    pub branch_sets: Vec<BTreeSet<VertexId>>,
    /// `(i, j) → edge` with `i < j`; the edge joins branch set `i` to `j`.
    pub witness_edges: BTreeMap<(usize, usize), EdgeId>,
}

impl MinorModel {
    /// Recomputes witness edges (smallest ids) for disjoint connected sets;
    /// `None` when some pair of sets has no joining edge.
    pub fn from_branch_sets(g: &Graph, branch_sets: Vec<BTreeSet<VertexId>>) -> Option<Self> {
        let t = branch_sets.len();
        let mut witness_edges = BTreeMap::new();
        for i in 0..t {
            for j in (i + 1)..t {
                let e = g
                    .edge_map()
                    .iter()
                    .find(|(_, &(u, v))| {
                        (branch_sets[i].contains(&u) && branch_sets[j].contains(&v))
                            || (branch_sets[i].contains(&v) && branch_sets[j].contains(&u))
                    })
                    .map(|(&e, _)| e)?;
                witness_edges.insert((i, j), e);
            }
        }
        Some(MinorModel {
            branch_sets,
            witness_edges,
        })
    }

    pub fn order(&self) -> usize {
        self.branch_sets.len()
    }
}

/// Checks disjointness, connectivity and witness edges of a model.
pub fn verify_minor_model(g: &Graph, model: &MinorModel) -> bool {
    let t = model.branch_sets.len();
    let mut seen: BTreeSet<VertexId> = BTreeSet::new();
    for set in &model.branch_sets {
        if set.is_empty() {
            return false;
        }
        for v in set {
            if !g.contains_vertex(*v) || !seen.insert(*v) {
                return false;
            }
        }
        if !g.induced(set).is_connected() {
            return false;
        }
    }
    for i in 0..t {
        for j in (i + 1)..t {
            let Some(&e) = model.witness_edges.get(&(i, j)) else {
                return false;
            };
            let Ok((u, v)) = g.endpoints(e) else {
                return false;
            };
            let joins = (model.branch_sets[i].contains(&u)
                && model.branch_sets[j].contains(&v))
                || (model.branch_sets[i].contains(&v) && model.branch_sets[j].contains(&u));
            if !joins {
                return false;
            }
        }
    }
    true
}

/// Search control for [`find_minor_model_bruteforce`].
#[derive(Clone, Copy, Debug)]
pub struct Budget {
    pub expansions: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            expansions: 1_000_000,
        }
    }
}

/// A test oracle: find a `K_t` minor model, or certify absence.
///
/// For `t ≤ 3` and for small graphs the answer is definitive.  For larger
/// instances a deterministic seeded search runs until the budget is spent;
/// spending the budget without an answer is the `BudgetExceeded` error (a
/// definite "absent" is only returned when the search space was exhausted).
pub fn find_minor_model_bruteforce(
    g: &Graph,
    t: usize,
    budget: Budget,
) -> Result<Option<MinorModel>, GraphError> {
    match t {
        0 => {
            return Ok(Some(MinorModel {
                branch_sets: Vec::new(),
                witness_edges: BTreeMap::new(),
            }))
        }
        1 => {
            return Ok(g.vertices().next().map(|v| MinorModel {
                branch_sets: vec![[v].into_iter().collect()],
                witness_edges: BTreeMap::new(),
            }))
        }
        2 => {
            for &(u, v) in g.edge_map().values() {
                if u != v {
                    let sets = vec![
                        [u].into_iter().collect(),
                        [v].into_iter().collect(),
                    ];
                    return Ok(MinorModel::from_branch_sets(g, sets));
                }
            }
            return Ok(None);
        }
        3 => return Ok(find_k3(g)),
        _ => {}
    }
    if g.num_vertices() <= 9 {
        return Ok(exhaustive_minor_search(g, t));
    }
    randomized_minor_search(g, t, budget)
}

/// `K_3` minor = cycle on ≥ 3 distinct vertices (loops and parallel edges
/// cannot help).  For every non-loop edge u–v, look for a u–v path avoiding
/// that edge through at least one further vertex.
fn find_k3(g: &Graph) -> Option<MinorModel> {
    for &(u, v) in g.edge_map().values() {
        if u == v {
            continue;
        }
        for w in g.distinct_neighbors(u) {
            if w == v {
                continue;
            }
            // path w → v avoiding u closes a cycle u–w–…–v–u on ≥ 3 vertices
            let from: BTreeSet<VertexId> = [w].into_iter().collect();
            let to: BTreeSet<VertexId> = [v].into_iter().collect();
            if let Some(p) = g.shortest_path(&from, &to, |z| z != u) {
                let mut mid = p.vertex_set();
                mid.remove(&v);
                let sets = vec![
                    [u].into_iter().collect::<BTreeSet<_>>(),
                    mid,
                    [v].into_iter().collect::<BTreeSet<_>>(),
                ];
                if let Some(m) = MinorModel::from_branch_sets(g, sets) {
                    if verify_minor_model(g, &m) {
                        return Some(m);
                    }
                }
            }
        }
    }
    None
}

/// Complete search on tiny graphs: assign each vertex to one of `t` sets or
/// to none, prune on connectivity early.
fn exhaustive_minor_search(g: &Graph, t: usize) -> Option<MinorModel> {
    let verts: Vec<VertexId> = g.vertices().collect();
    let n = verts.len();
    if n < t {
        return None;
    }
    let mut assign: Vec<Option<usize>> = vec![None; n];

    fn rec(
        g: &Graph,
        verts: &[VertexId],
        assign: &mut Vec<Option<usize>>,
        idx: usize,
        t: usize,
    ) -> Option<MinorModel> {
        let n = verts.len();
        if idx == n {
            let mut sets: Vec<BTreeSet<VertexId>> = vec![BTreeSet::new(); t];
            for (i, a) in assign.iter().enumerate() {
                if let Some(k) = a {
                    sets[*k].insert(verts[i]);
                }
            }
            if sets.iter().any(|s| s.is_empty()) {
                return None;
            }
            if sets.iter().any(|s| !g.induced(s).is_connected()) {
                return None;
            }
            let m = MinorModel::from_branch_sets(g, sets)?;
            if verify_minor_model(g, &m) {
                return Some(m);
            }
            return None;
        }
        // symmetry breaking: set k may only be opened after set k-1
        let used = assign[..idx]
            .iter()
            .flatten()
            .copied()
            .max()
            .map(|m| m + 1)
            .unwrap_or(0);
        for k in 0..t.min(used + 1) {
            assign[idx] = Some(k);
            if let Some(m) = rec(g, verts, assign, idx + 1, t) {
                return Some(m);
            }
        }
        assign[idx] = None;
        if n - idx > t.saturating_sub(used) {
            if let Some(m) = rec(g, verts, assign, idx + 1, t) {
                return Some(m);
            }
        }
        assign[idx] = None;
        None
    }

    rec(g, &verts, &mut assign, 0, t)
}

/// Seeded greedy search: plant `t` seeds, connect unsatisfied pairs with
/// shortest paths through free vertices, restart on failure.
fn randomized_minor_search(
    g: &Graph,
    t: usize,
    budget: Budget,
) -> Result<Option<MinorModel>, GraphError> {
    use rand::seq::SliceRandom;
    use rand::SeedableRng;

    let verts: Vec<VertexId> = g.vertices().collect();
    if verts.len() < t {
        return Ok(None);
    }
    let mut spent: u64 = 0;
    let mut attempt: u64 = 0;
    while spent < budget.expansions {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed_0000 + attempt);
        attempt += 1;
        let mut pool = verts.clone();
        pool.shuffle(&mut rng);
        let seeds: Vec<VertexId> = pool[..t].to_vec();
        let mut sets: Vec<BTreeSet<VertexId>> =
            seeds.iter().map(|&v| [v].into_iter().collect()).collect();
        let mut taken: BTreeMap<VertexId, usize> =
            seeds.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut ok = true;
        'pairs: for i in 0..t {
            for j in (i + 1)..t {
                spent += g.num_vertices() as u64;
                if spent >= budget.expansions {
                    return Err(GraphError::BudgetExceeded);
                }
                // already adjacent?
                let adjacent = g.edge_map().values().any(|&(u, v)| {
                    (taken.get(&u) == Some(&i) && taken.get(&v) == Some(&j))
                        || (taken.get(&u) == Some(&j) && taken.get(&v) == Some(&i))
                });
                if adjacent {
                    continue;
                }
                let from = sets[i].clone();
                let to = sets[j].clone();
                let path = g.shortest_path(&from, &to, |v| {
                    match taken.get(&v) {
                        None => true,
                        Some(&k) => k == i || k == j,
                    }
                });
                let Some(p) = path else {
                    ok = false;
                    break 'pairs;
                };
                // interior vertices: first half to i, second half to j
                let vs = p.vertices();
                let cut = vs.len() / 2;
                for (pos, &v) in vs.iter().enumerate() {
                    if taken.contains_key(&v) {
                        continue;
                    }
                    let side = if pos < cut { i } else { j };
                    sets[side].insert(v);
                    taken.insert(v, side);
                }
            }
        }
        if ok {
            if let Some(m) = MinorModel::from_branch_sets(g, sets) {
                if verify_minor_model(g, &m) {
                    return Ok(Some(m));
                }
            }
        }
    }
    Err(GraphError::BudgetExceeded)
}
