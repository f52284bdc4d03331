//! Societies: a multigraph with a cyclic order Ω on a subset of its vertices.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, VertexId};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SocietyError {
    #[error("vertex {0} appears more than once in omega")]
    OmegaRepeats(VertexId),
    #[error("omega vertex {0} is not a vertex of the graph")]
    OmegaNotInGraph(VertexId),
    #[error("vertex {0} is not a society vertex")]
    NotASocietyVertex(VertexId),
    #[error("the given vertex set is not a segment of omega")]
    NotASegment,
    #[error("malformed society file: {0}")]
    Malformed(String),
}

/// A contiguous arc of Ω, listed in Ω order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Segment {
    vertices: Vec<VertexId>,
}

impl Segment {
    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn first(&self) -> Option<VertexId> {
        self.vertices.first().copied()
    }

    pub fn last(&self) -> Option<VertexId> {
        self.vertices.last().copied()
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.vertices.contains(&v)
    }

    pub fn vertex_set(&self) -> BTreeSet<VertexId> {
        self.vertices.iter().copied().collect()
    }

    pub fn is_disjoint(&self, other: &Segment) -> bool {
        self.vertex_set().is_disjoint(&other.vertex_set())
    }
}

/// A society `(G, Ω)`.  The cyclic order is stored rotated so that the
/// smallest vertex id comes first, making serialized societies byte-stable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Society {
    graph: Graph,
    omega: Vec<VertexId>,
}

impl Society {
    pub fn new(graph: Graph, omega: Vec<VertexId>) -> Result<Self, SocietyError> {
        let mut seen = BTreeSet::new();
        for &v in &omega {
            if !graph.contains_vertex(v) {
                return Err(SocietyError::OmegaNotInGraph(v));
            }
            if !seen.insert(v) {
                return Err(SocietyError::OmegaRepeats(v));
            }
        }
        let omega = canonical_rotation(omega);
        Ok(Society { graph, omega })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn omega(&self) -> &[VertexId] {
        &self.omega
    }

    pub fn omega_len(&self) -> usize {
        self.omega.len()
    }

    pub fn omega_set(&self) -> BTreeSet<VertexId> {
        self.omega.iter().copied().collect()
    }

    pub fn omega_contains(&self, v: VertexId) -> bool {
        self.omega.contains(&v)
    }

    pub fn position(&self, v: VertexId) -> Result<usize, SocietyError> {
        self.omega
            .iter()
            .position(|&w| w == v)
            .ok_or(SocietyError::NotASocietyVertex(v))
    }

    pub fn succ(&self, v: VertexId) -> Result<VertexId, SocietyError> {
        let i = self.position(v)?;
        Ok(self.omega[(i + 1) % self.omega.len()])
    }

    pub fn pred(&self, v: VertexId) -> Result<VertexId, SocietyError> {
        let i = self.position(v)?;
        Ok(self.omega[(i + self.omega.len() - 1) % self.omega.len()])
    }

    /// The segment xΩy: walk forward from `x` to `y` inclusive.  When `y`
    /// immediately precedes `x` this is the whole of V(Ω) (the walk passes
    /// every vertex), and xΩx = {x}.
    pub fn segment_between(&self, x: VertexId, y: VertexId) -> Result<Segment, SocietyError> {
        let i = self.position(x)?;
        let j = self.position(y)?;
        let n = self.omega.len();
        let mut vertices = vec![self.omega[i]];
        let mut k = i;
        while k != j {
            k = (k + 1) % n;
            vertices.push(self.omega[k]);
        }
        Ok(Segment { vertices })
    }

    /// The whole of V(Ω) as a segment, in Ω order.
    pub fn full_segment(&self) -> Segment {
        Segment {
            vertices: self.omega.clone(),
        }
    }

    pub fn empty_segment(&self) -> Segment {
        Segment {
            vertices: Vec::new(),
        }
    }

    /// Checks whether `set` is a segment of Ω; if so, returns it in Ω order.
    pub fn as_segment(&self, set: &BTreeSet<VertexId>) -> Result<Segment, SocietyError> {
        for &v in set {
            self.position(v)?;
        }
        if set.is_empty() {
            return Ok(self.empty_segment());
        }
        let n = self.omega.len();
        if set.len() == n {
            return Ok(self.full_segment());
        }
        // find the unique start: a member whose predecessor is not a member
        let mut start = None;
        for &v in set {
            if !set.contains(&self.pred(v)?) {
                start = Some(v);
                break;
            }
        }
        let start = start.ok_or(SocietyError::NotASegment)?;
        let mut vertices = Vec::with_capacity(set.len());
        let mut k = self.position(start)?;
        for _ in 0..set.len() {
            let v = self.omega[k];
            if !set.contains(&v) {
                return Err(SocietyError::NotASegment);
            }
            vertices.push(v);
            k = (k + 1) % n;
        }
        if set.contains(&self.omega[k]) {
            return Err(SocietyError::NotASegment);
        }
        Ok(Segment { vertices })
    }

    /// Do the given (distinct, Ω-member) vertices appear in Ω in the cyclic
    /// order listed?
    pub fn in_cyclic_order(&self, seq: &[VertexId]) -> bool {
        let mut pos = Vec::with_capacity(seq.len());
        let mut seen = BTreeSet::new();
        for &v in seq {
            let Ok(p) = self.position(v) else {
                return false;
            };
            if !seen.insert(p) {
                return false;
            }
            pos.push(p);
        }
        if pos.len() <= 2 {
            return true;
        }
        let wraps = (0..pos.len())
            .filter(|&i| pos[(i + 1) % pos.len()] < pos[i])
            .count();
        wraps == 1
    }

    /// A new society with the segment `x` reversed in place.
    pub fn flip(&self, x: &Segment) -> Result<Society, SocietyError> {
        // re-validate the segment against this society
        let seg = self.as_segment(&x.vertex_set())?;
        if seg.vertices() != x.vertices() {
            return Err(SocietyError::NotASegment);
        }
        if seg.is_empty() || seg.len() == self.omega.len() {
            // reversing all of Ω or nothing
            let mut omega = self.omega.clone();
            if seg.len() == self.omega.len() {
                omega.reverse();
            }
            return Society::new(self.graph.clone(), omega);
        }
        let n = self.omega.len();
        let start = self.position(seg.first().unwrap())?;
        let mut omega = self.omega.clone();
        let idxs: Vec<usize> = (0..seg.len()).map(|k| (start + k) % n).collect();
        for (offset, &i) in idxs.iter().enumerate() {
            omega[i] = seg.vertices()[seg.len() - 1 - offset];
        }
        Society::new(self.graph.clone(), omega)
    }

    /// `(G − Z, Ω − Z)`.
    pub fn delete(&self, z: &BTreeSet<VertexId>) -> Society {
        let graph = self.graph.without_vertices(z);
        let omega = self
            .omega
            .iter()
            .filter(|v| !z.contains(v))
            .copied()
            .collect();
        Society::new(graph, omega).expect("deletion preserves validity")
    }

    /// Restriction to a subgraph: keeps Ω ∩ V(H) in order.
    pub fn with_graph(&self, graph: Graph) -> Society {
        let omega = self
            .omega
            .iter()
            .filter(|v| graph.contains_vertex(**v))
            .copied()
            .collect();
        Society::new(graph, omega).expect("omega filtered to graph")
    }
}

fn canonical_rotation(omega: Vec<VertexId>) -> Vec<VertexId> {
    if omega.is_empty() {
        return omega;
    }
    let min_pos = omega
        .iter()
        .enumerate()
        .min_by_key(|&(_, v)| v)
        .map(|(i, _)| i)
        .unwrap();
    let mut rotated = Vec::with_capacity(omega.len());
    rotated.extend_from_slice(&omega[min_pos..]);
    rotated.extend_from_slice(&omega[..min_pos]);
    rotated
}

/// Wire format: `{"vertices":[..],"edges":[[u,v],..],"omega":[..]}` with edge
/// ids given by list position.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SocietyFile {
    pub vertices: Vec<VertexId>,
    pub edges: Vec<(VertexId, VertexId)>,
    pub omega: Vec<VertexId>,
}

impl Society {
    pub fn from_file(file: &SocietyFile) -> Result<Society, SocietyError> {
        let graph = Graph::new(
            file.vertices.iter().copied(),
            file.edges
                .iter()
                .enumerate()
                .map(|(i, &p)| (i as u32, p)),
        )
        .map_err(|e| SocietyError::Malformed(e.to_string()))?;
        Society::new(graph, file.omega.clone())
    }

    pub fn to_file(&self) -> SocietyFile {
        SocietyFile {
            vertices: self.graph.vertices().collect(),
            edges: self.graph.edge_map().values().copied().collect(),
            omega: self.omega.clone(),
        }
    }

    pub fn from_json(s: &str) -> Result<Society, SocietyError> {
        let file: SocietyFile =
            serde_json::from_str(s).map_err(|e| SocietyError::Malformed(e.to_string()))?;
        Society::from_file(&file)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("society serializes")
    }
}
