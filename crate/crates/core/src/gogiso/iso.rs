use serde::{Deserialize, Serialize};

use super::graph::GraphOfGroups;
use super::group::{Elem, GroupMap};
use crate::error::{Error, Result};

/// An isomorphism `X' -> X` of graphs of groups on the same graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoGIsomorphism {
    /// `φ_v: Γ'_v -> Γ_v`.
    pub vertex_maps: Vec<GroupMap>,
    /// `φ_e: Γ'_e -> Γ_e`, one per oriented edge, with `φ_e = φ_ē`.
    pub edge_maps: Vec<GroupMap>,
    /// `γ_e ∈ Γ_{t(e)}`.
    pub attaching: Vec<Elem>,
}

/// Automorphisms `α_v` of the vertex groups of `X` and elements `g_e ∈ Γ_{t(e)}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtensionAdjustment {
    pub automorphisms: Vec<GroupMap>,
    pub elements: Vec<Elem>,
}

/// The first diagram found not to commute.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagramViolation {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vertex: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub edge: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generator: Option<usize>,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum DiagramCheck {
    Commutes,
    Violated(DiagramViolation),
}

impl DiagramCheck {
    pub fn commutes(&self) -> bool {
        matches!(self, DiagramCheck::Commutes)
    }

    pub fn violation(&self) -> Option<&DiagramViolation> {
        match self {
            DiagramCheck::Commutes => None,
            DiagramCheck::Violated(v) => Some(v),
        }
    }
}

fn violated(vertex: Option<usize>, edge: Option<usize>, generator: Option<usize>, reason: impl Into<String>) -> DiagramCheck {
    DiagramCheck::Violated(DiagramViolation { vertex, edge, generator, reason: reason.into() })
}

fn check_same_graph(x1: &GraphOfGroups, x2: &GraphOfGroups) -> Result<()> {
    let (a, b) = (&x1.graph, &x2.graph);
    if a.vertices != b.vertices || a.edges != b.edges {
        return Err(Error::Dimension("graphs of groups live on different graphs".into()));
    }
    Ok(())
}

/// Checks `φ_{t(e)} ∘ i'_e = ad_{γ_e} ∘ i_e ∘ φ_e` on the generators of every `Γ'_e`, after checking
/// that all vertex and edge maps are isomorphisms with `φ_e = φ_ē`.
pub fn verify_gog_isomorphism(x1: &GraphOfGroups, x2: &GraphOfGroups, phi: &GoGIsomorphism) -> Result<DiagramCheck> {
    check_same_graph(x1, x2)?;
    let g = &x2.graph;
    let ne = g.edges.len();
    if phi.vertex_maps.len() != g.vertices || phi.edge_maps.len() != ne || phi.attaching.len() != ne {
        return Err(Error::Dimension("isomorphism data has the wrong shape".into()));
    }
    for v in 0..g.vertices {
        let (s, t) = (x1.vertex_group(v), x2.vertex_group(v));
        if let Err(e) = phi.vertex_maps[v].check_hom(s, t) {
            return Ok(violated(Some(v), None, None, format!("vertex map is not a homomorphism: {e}")));
        }
        if !phi.vertex_maps[v].is_isomorphism(s, t)? {
            return Ok(violated(Some(v), None, None, "vertex map is not bijective"));
        }
    }
    for e in 0..ne {
        let (s, t) = (x1.edge_group(e), x2.edge_group(e));
        if phi.edge_maps[e] != phi.edge_maps[g.reverse(e)] {
            return Ok(violated(None, Some(e), None, "edge map differs from the map on the reverse edge"));
        }
        if let Err(err) = phi.edge_maps[e].check_hom(s, t) {
            return Ok(violated(None, Some(e), None, format!("edge map is not a homomorphism: {err}")));
        }
        if !phi.edge_maps[e].is_isomorphism(s, t)? {
            return Ok(violated(None, Some(e), None, "edge map is not bijective"));
        }
    }
    for e in 0..ne {
        let v = g.terminus(e);
        let (gv1, gv2) = (x1.vertex_group(v), x2.vertex_group(v));
        let gamma = match gv2.check(&phi.attaching[e]) {
            Ok(x) => x,
            Err(err) => return Ok(violated(Some(v), Some(e), None, format!("attaching element: {err}"))),
        };
        let ge1 = x1.edge_group(e);
        for (k, h) in ge1.generators().iter().enumerate() {
            let lhs = phi.vertex_maps[v].apply(gv1, gv2, &x1.attach(e, h));
            let rhs = gv2.ad(&gamma, &x2.attach(e, &phi.edge_maps[e].apply(ge1, x2.edge_group(e), h)));
            if lhs != rhs {
                return Ok(violated(Some(v), Some(e), Some(k), format!("square fails: {lhs:?} != {rhs:?}")));
            }
        }
    }
    Ok(DiagramCheck::Commutes)
}

/// `i_e^-1(ad_{g_e} α_{t(e)} ψ_{t(e)} i'_e(h))` for every generator `h` of `Γ'_e`, or the first generator
/// whose image leaves `i_e(Γ_e)`.
fn chased_images(
    x1: &GraphOfGroups,
    x2: &GraphOfGroups,
    psi: &[GroupMap],
    adj: &ExtensionAdjustment,
    e: usize,
) -> Result<std::result::Result<Vec<Elem>, usize>> {
    let v = x2.graph.terminus(e);
    let (gv1, gv2) = (x1.vertex_group(v), x2.vertex_group(v));
    let ge2 = x2.edge_group(e);
    let mut out = Vec::new();
    for (k, h) in x1.edge_group(e).generators().iter().enumerate() {
        let y = adj.automorphisms[v].apply(gv2, gv2, &psi[v].apply(gv1, gv2, &x1.attach(e, h)));
        let y = gv2.ad(&adj.elements[e], &y);
        match x2.attaching[e].preimage(ge2, gv2, &y)? {
            Some(x) => out.push(x),
            None => return Ok(Err(k)),
        }
    }
    Ok(Ok(out))
}

/// Checks both conditions of an extension adjustment with respect to `psi`: every `g_e` conjugates
/// `α ψ i'_e(Γ'_e)` onto `i_e(Γ_e)`, and the two chases through `e` and `ē` agree on generators.
pub fn verify_extension_adjustment(
    x1: &GraphOfGroups,
    x2: &GraphOfGroups,
    psi: &[GroupMap],
    adj: &ExtensionAdjustment,
) -> DiagramCheck {
    match check_adjustment(x1, x2, psi, adj) {
        Ok(c) => c,
        Err(e) => violated(None, None, None, e.to_string()),
    }
}

fn check_adjustment(x1: &GraphOfGroups, x2: &GraphOfGroups, psi: &[GroupMap], adj: &ExtensionAdjustment) -> Result<DiagramCheck> {
    check_same_graph(x1, x2)?;
    let g = &x2.graph;
    if psi.len() != g.vertices || adj.automorphisms.len() != g.vertices || adj.elements.len() != g.edges.len() {
        return Err(Error::Dimension("adjustment data has the wrong shape".into()));
    }
    for v in 0..g.vertices {
        let (s, t) = (x1.vertex_group(v), x2.vertex_group(v));
        if psi[v].check_hom(s, t).is_err() || !psi[v].is_isomorphism(s, t)? {
            return Ok(violated(Some(v), None, None, "ψ is not an isomorphism"));
        }
        if adj.automorphisms[v].check_hom(t, t).is_err() || !adj.automorphisms[v].is_isomorphism(t, t)? {
            return Ok(violated(Some(v), None, None, "α is not an automorphism"));
        }
    }
    let mut chased = Vec::with_capacity(g.edges.len());
    for e in 0..g.edges.len() {
        let vt = x2.vertex_group(g.terminus(e));
        if vt.check(&adj.elements[e]).is_err() {
            return Ok(violated(Some(g.terminus(e)), Some(e), None, "g_e is not an element of the terminal vertex group"));
        }
        let images = match chased_images(x1, x2, psi, adj, e)? {
            Ok(images) => images,
            Err(k) => return Ok(violated(Some(g.terminus(e)), Some(e), Some(k), "image is not conjugated into i_e(Γ_e)")),
        };
        let m = GroupMap::new(images);
        let (s, t) = (x1.edge_group(e), x2.edge_group(e));
        if m.check_hom(s, t).is_err() || !m.is_surjective(s, t)? {
            return Ok(violated(Some(g.terminus(e)), Some(e), None, "image is not all of i_e(Γ_e)"));
        }
        chased.push(m);
    }
    for e in g.edge_pairs() {
        let r = g.reverse(e);
        if let Some(k) = (0..chased[e].images.len()).find(|&k| chased[e].images[k] != chased[r].images[k]) {
            return Ok(violated(None, Some(e), Some(k), "the chases through e and ē disagree"));
        }
    }
    Ok(DiagramCheck::Commutes)
}

/// `φ_v = α_v ∘ ψ_v`, `φ_e` read off the chase, and `γ_e = g_e^-1`.
pub fn assemble_isomorphism(
    x1: &GraphOfGroups,
    x2: &GraphOfGroups,
    psi: &[GroupMap],
    adj: &ExtensionAdjustment,
) -> Result<GoGIsomorphism> {
    check_same_graph(x1, x2)?;
    let g = &x2.graph;
    let vertex_maps = (0..g.vertices)
        .map(|v| psi[v].then(x2.vertex_group(v), x2.vertex_group(v), &adj.automorphisms[v]))
        .collect();
    let mut edge_maps = Vec::with_capacity(g.edges.len());
    for e in 0..g.edges.len() {
        let images = chased_images(x1, x2, psi, adj, e)?
            .map_err(|k| Error::RelationViolated(format!("generator {k} of edge {e} leaves the attached subgroup")))?;
        edge_maps.push(GroupMap::new(images));
    }
    let attaching = (0..g.edges.len()).map(|e| x2.vertex_group(g.terminus(e)).inv(&adj.elements[e])).collect();
    Ok(GoGIsomorphism { vertex_maps, edge_maps, attaching })
}
