use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::decide::WhiteOrbitLists;
use super::graph::{Color, Edge, GraphOfGroups};
use super::group::{Elem, GroupHandle, GroupMap};
use crate::error::{Error, Result};
use crate::nilgroup::FiniteGroupTable;
use crate::pcp;
use crate::zmod::AbelianModule;

/// A group named in a `.gog` file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GroupSpec {
    Abelian {
        free_rank: usize,
        #[serde(default)]
        torsion: Vec<u64>,
    },
    /// A polycyclic presentation, either inline or in a `.pcp` file resolved by the caller.
    Pcp {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        file: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        text: Option<String>,
    },
    Finite {
        table: Vec<Vec<usize>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        labels: Option<Vec<String>>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexSpec {
    pub group: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub color: Option<Color>,
}

/// An edge pair: oriented edge `origin -> terminus` and its reverse.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeSpec {
    pub origin: usize,
    pub terminus: usize,
    pub group: String,
    /// Images of the edge-group generators in the terminus group.
    pub into_terminus: Vec<Elem>,
    /// Images of the edge-group generators in the origin group.
    pub into_origin: Vec<Elem>,
}

/// The on-disk `.gog` JSON document.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GogFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub groups: BTreeMap<String, GroupSpec>,
    pub vertices: Vec<VertexSpec>,
    #[serde(default)]
    pub edges: Vec<EdgeSpec>,
    /// Per white vertex, automorphisms given by generator images.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub white_orbits: BTreeMap<usize, Vec<Vec<Elem>>>,
}

/// A parsed `.gog` file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GogDocument {
    pub name: Option<String>,
    pub gog: GraphOfGroups,
    pub white_orbits: WhiteOrbitLists,
}

fn build_group(name: &str, spec: &GroupSpec, resolve: &dyn Fn(&str) -> Result<String>) -> Result<GroupHandle> {
    match spec {
        GroupSpec::Abelian { free_rank, torsion } => {
            let orders: Vec<num_bigint::BigInt> = torsion.iter().map(|&t| t.into()).collect();
            let m = AbelianModule::from_orders(&orders);
            let module = AbelianModule::new(free_rank + m.free_rank, m.invariant_factors)?;
            GroupHandle::abelian(module)
        }
        GroupSpec::Pcp { file, text } => {
            let text = match (file, text) {
                (Some(f), None) => resolve(f)?,
                (None, Some(t)) => t.clone(),
                _ => return Err(Error::Input(format!("group {name}: give exactly one of `file` and `text`"))),
            };
            Ok(GroupHandle::nilpotent(pcp::parse(&text)?))
        }
        GroupSpec::Finite { table, labels } => Ok(GroupHandle::finite(name, FiniteGroupTable::from_rows(table.clone(), labels.clone())?)),
    }
}

impl GogFile {
    /// Resolves group names and builds the validated graph of groups.
    pub fn build(&self, resolve: &dyn Fn(&str) -> Result<String>) -> Result<GogDocument> {
        let mut groups = BTreeMap::new();
        for (name, spec) in &self.groups {
            groups.insert(name.clone(), build_group(name, spec, resolve)?);
        }
        let lookup = |n: &str| groups.get(n).cloned().ok_or_else(|| Error::Input(format!("unknown group `{n}`")));
        let vertex_groups = self.vertices.iter().map(|v| lookup(&v.group)).collect::<Result<Vec<_>>>()?;
        let colors = match self.vertices.iter().filter(|v| v.color.is_some()).count() {
            0 => None,
            n if n == self.vertices.len() => Some(self.vertices.iter().map(|v| v.color.expect("counted")).collect()),
            _ => return Err(Error::Input("either every vertex or no vertex carries a color".into())),
        };
        let mut edges = Vec::new();
        for (k, e) in self.edges.iter().enumerate() {
            let g = lookup(&e.group)?;
            edges.push((e.origin, e.terminus, g, GroupMap::new(e.into_terminus.clone()), GroupMap::new(e.into_origin.clone())));
            if e.origin >= self.vertices.len() || e.terminus >= self.vertices.len() {
                return Err(Error::Input(format!("edge {k} refers to a missing vertex")));
            }
        }
        let gog = GraphOfGroups::from_pairs(vertex_groups, colors, edges)?;
        let white_orbits = self
            .white_orbits
            .iter()
            .map(|(&v, list)| (v, list.iter().map(|imgs| GroupMap::new(imgs.clone())).collect()))
            .collect();
        Ok(GogDocument { name: self.name.clone(), gog, white_orbits })
    }

    /// Serializes a graph of groups whose oriented edges come in pairs `(2k, 2k + 1)`, with every
    /// group inline.
    pub fn from_document(doc: &GogDocument) -> Result<GogFile> {
        let x = &doc.gog;
        let g = &x.graph;
        let mut groups: BTreeMap<String, GroupSpec> = BTreeMap::new();
        let mut named: Vec<(GroupHandle, String)> = Vec::new();
        let mut name_of = |h: &GroupHandle| -> String {
            if let Some((_, n)) = named.iter().find(|(k, _)| k == h) {
                return n.clone();
            }
            let base = h.name();
            let mut n = base.clone();
            let mut i = 1;
            while groups.contains_key(&n) {
                i += 1;
                n = format!("{base}_{i}");
            }
            groups.insert(n.clone(), spec_of(h));
            named.push((h.clone(), n.clone()));
            n
        };
        let vertices = (0..g.vertices)
            .map(|v| VertexSpec { group: name_of(x.vertex_group(v)), color: g.color(v) })
            .collect();
        let mut edges = Vec::new();
        for k in 0..g.edges.len() / 2 {
            let (e, r) = (2 * k, 2 * k + 1);
            if g.edges[e] != (Edge { origin: g.origin(e), terminus: g.terminus(e), reverse: r }) {
                return Err(Error::Input("oriented edges must come in consecutive pairs".into()));
            }
            edges.push(EdgeSpec {
                origin: g.origin(e),
                terminus: g.terminus(e),
                group: name_of(x.edge_group(e)),
                into_terminus: x.attaching[e].images.clone(),
                into_origin: x.attaching[r].images.clone(),
            });
        }
        let white_orbits = doc.white_orbits.iter().map(|(&v, l)| (v, l.iter().map(|m| m.images.clone()).collect())).collect();
        Ok(GogFile { name: doc.name.clone(), groups, vertices, edges, white_orbits })
    }
}

fn spec_of(h: &GroupHandle) -> GroupSpec {
    match h {
        GroupHandle::Abelian { module, .. } => GroupSpec::Abelian {
            free_rank: module.free_rank,
            torsion: module.invariant_factors.iter().map(|d| u64::try_from(d).expect("checked on construction")).collect(),
        },
        GroupHandle::Nilpotent(p) => GroupSpec::Pcp { file: None, text: Some(pcp::to_string(p)) },
        GroupHandle::Finite(f) => {
            let n = f.table.order();
            GroupSpec::Finite {
                table: (0..n).map(|a| (0..n).map(|b| f.table.mul(a, b)).collect()).collect(),
                labels: Some(f.table.labels().to_vec()),
            }
        }
    }
}

/// Parses `.gog` JSON; `resolve` maps a `.pcp` file reference to its text.
pub fn parse_gog(text: &str, resolve: &dyn Fn(&str) -> Result<String>) -> Result<GogDocument> {
    let file: GogFile = serde_json::from_str(text).map_err(|e| Error::Parse { line: e.line(), column: e.column(), message: e.to_string() })?;
    file.build(resolve)
}

impl GogDocument {
    pub fn to_json(&self) -> Result<String> {
        let file = GogFile::from_document(self)?;
        Ok(serde_json::to_string_pretty(&file).expect("serializable"))
    }
}

impl From<GraphOfGroups> for GogDocument {
    fn from(gog: GraphOfGroups) -> Self {
        GogDocument { name: None, gog, white_orbits: WhiteOrbitLists::new() }
    }
}
