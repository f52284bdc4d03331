//! Linear decompositions of a society along its boundary order: nested
//! prefix separations become bags whose consecutive overlaps are bounded by
//! the society's depth.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{disjoint_paths, Separation, VertexId};
use crate::society::Society;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum VortexError {
    #[error("the boundary is empty but the graph is not")]
    EmptyOmega,
    #[error("malformed decomposition certificate: {0}")]
    BadCertificate(String),
}

/// A labeling `v₁..vₙ` of the boundary in cyclic order together with bags
/// `X₁..Xₙ`: `vᵢ ∈ Xᵢ`, the bags cover every vertex and edge, and each
/// vertex occupies an interval of consecutive bags.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearDecomposition {
    order: Vec<VertexId>,
    bags: Vec<BTreeSet<VertexId>>,
}

impl LinearDecomposition {
    pub fn order(&self) -> &[VertexId] {
        &self.order
    }

    pub fn bags(&self) -> &[BTreeSet<VertexId>] {
        &self.bags
    }

    /// Maximum overlap of consecutive bags (0 for at most one bag).
    pub fn adhesion(&self) -> usize {
        (1..self.bags.len())
            .map(|i| self.bags[i - 1].intersection(&self.bags[i]).count())
            .max()
            .unwrap_or(0)
    }

    pub fn to_file(&self) -> LinearDecompositionFile {
        LinearDecompositionFile {
            order: self.order.clone(),
            bags: self
                .bags
                .iter()
                .map(|b| b.iter().copied().collect())
                .collect(),
        }
    }

    pub fn from_file(file: &LinearDecompositionFile) -> Result<Self, VortexError> {
        if file.order.len() != file.bags.len() {
            return Err(VortexError::BadCertificate(
                "order and bag counts differ".into(),
            ));
        }
        Ok(LinearDecomposition {
            order: file.order.clone(),
            bags: file
                .bags
                .iter()
                .map(|b| b.iter().copied().collect())
                .collect(),
        })
    }
}

/// Serialized decomposition certificate.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LinearDecompositionFile {
    pub order: Vec<VertexId>,
    pub bags: Vec<Vec<VertexId>>,
}

/// The nested prefix separations behind [`linear_decomposition`]: for each
/// boundary prefix, the minimum-order separation from the rest of the
/// boundary, ties broken by the smallest prefix side.
fn prefix_separations(society: &Society) -> Vec<Separation> {
    let omega = society.omega();
    let g = society.graph();
    let none = BTreeSet::new();
    (1..omega.len())
        .map(|i| {
            let prefix: BTreeSet<VertexId> = omega[..i].iter().copied().collect();
            let suffix: BTreeSet<VertexId> = omega[i..].iter().copied().collect();
            let (_, sep) = disjoint_paths(g, &prefix, &suffix, &none);
            sep
        })
        .collect()
}

/// Builds a linear decomposition whose adhesion is at most the society's
/// depth: bags are `Xᵢ = Aᵢ ∩ Bᵢ₋₁` for the nested minimum prefix
/// separations `(Aᵢ, Bᵢ)`, with `X₁ = A₁` and `Xₙ = Bₙ₋₁`.  Vertices
/// unreachable from the boundary land in the last bag.
pub fn linear_decomposition(society: &Society) -> Result<LinearDecomposition, VortexError> {
    let omega = society.omega().to_vec();
    let n = omega.len();
    if n == 0 {
        if society.graph().num_vertices() > 0 {
            return Err(VortexError::EmptyOmega);
        }
        return Ok(LinearDecomposition {
            order: Vec::new(),
            bags: Vec::new(),
        });
    }
    if n == 1 {
        return Ok(LinearDecomposition {
            order: omega,
            bags: vec![society.graph().vertex_set().clone()],
        });
    }
    let seps = prefix_separations(society);
    let mut bags = Vec::with_capacity(n);
    bags.push(seps[0].a.clone());
    for i in 1..n - 1 {
        bags.push(seps[i].a.intersection(&seps[i - 1].b).copied().collect());
    }
    bags.push(seps[n - 2].b.clone());
    Ok(LinearDecomposition { order: omega, bags })
}

/// Checks every clause of the definition, returning human-readable
/// violations (empty when valid).
pub fn validate_linear_decomposition(
    society: &Society,
    decomp: &LinearDecomposition,
) -> Vec<String> {
    let mut violations = Vec::new();
    let g = society.graph();
    let n = decomp.order.len();
    if decomp.bags.len() != n {
        violations.push(format!(
            "(shape) {} labels but {} bags",
            n,
            decomp.bags.len()
        ));
        return violations;
    }
    if decomp.order != society.omega()
        && !(n > 0 && society.in_cyclic_order(&decomp.order) && n == society.omega_len())
    {
        violations.push("(order) labels are not the boundary in cyclic order".into());
    }
    for (i, bag) in decomp.bags.iter().enumerate() {
        if !bag.contains(&decomp.order[i]) {
            violations.push(format!("(label) v{} missing from bag {}", i + 1, i + 1));
        }
        for &v in bag {
            if !g.contains_vertex(v) {
                violations.push(format!("(bag) bag {} holds foreign vertex {}", i + 1, v));
            }
        }
    }
    let covered: BTreeSet<VertexId> = decomp.bags.iter().flatten().copied().collect();
    for v in g.vertices() {
        if !covered.contains(&v) {
            violations.push(format!("(cover) vertex {v} in no bag"));
        }
    }
    for (&e, &(u, v)) in g.edge_map() {
        if !decomp
            .bags
            .iter()
            .any(|bag| bag.contains(&u) && bag.contains(&v))
        {
            violations.push(format!("(edge) edge {e} inside no bag"));
        }
    }
    for v in g.vertices() {
        let hits: Vec<usize> = decomp
            .bags
            .iter()
            .enumerate()
            .filter(|(_, bag)| bag.contains(&v))
            .map(|(i, _)| i)
            .collect();
        if let (Some(&first), Some(&last)) = (hits.first(), hits.last()) {
            if last - first + 1 != hits.len() {
                violations.push(format!("(interval) vertex {v} occupies a gapped bag set"));
            }
        }
    }
    violations
}
