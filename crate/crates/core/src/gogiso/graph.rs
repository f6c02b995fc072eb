use serde::{Deserialize, Serialize};

use super::group::{GroupHandle, GroupMap};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    Black,
    White,
}

/// An oriented edge `e` from `origin` to `terminus`, with `reverse` its opposite `ē`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub origin: usize,
    pub terminus: usize,
    pub reverse: usize,
}

/// A finite graph with a fix-point free edge involution.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Graph {
    pub vertices: usize,
    pub edges: Vec<Edge>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub colors: Option<Vec<Color>>,
}

impl Graph {
    pub fn new(vertices: usize, edges: Vec<Edge>, colors: Option<Vec<Color>>) -> Result<Self> {
        let g = Graph { vertices, edges, colors };
        g.validate()?;
        Ok(g)
    }

    /// Builds oriented edges `2k` (`a -> b`) and `2k + 1` (`b -> a`) from each pair `(a, b)`.
    pub fn from_pairs(vertices: usize, pairs: &[(usize, usize)], colors: Option<Vec<Color>>) -> Result<Self> {
        let mut edges = Vec::with_capacity(2 * pairs.len());
        for (k, &(a, b)) in pairs.iter().enumerate() {
            edges.push(Edge { origin: a, terminus: b, reverse: 2 * k + 1 });
            edges.push(Edge { origin: b, terminus: a, reverse: 2 * k });
        }
        Self::new(vertices, edges, colors)
    }

    pub fn validate(&self) -> Result<()> {
        for (i, e) in self.edges.iter().enumerate() {
            if e.origin >= self.vertices || e.terminus >= self.vertices || e.reverse >= self.edges.len() {
                return Err(Error::Input(format!("edge {i} refers to a missing vertex or edge")));
            }
            if e.reverse == i {
                return Err(Error::Input(format!("edge {i} is its own reverse")));
            }
            let r = self.edges[e.reverse];
            if r.reverse != i {
                return Err(Error::Input(format!("reversal is not an involution at edge {i}")));
            }
            if e.origin != r.terminus {
                return Err(Error::Input(format!("o(e) != t(ē) at edge {i}")));
            }
        }
        if let Some(c) = &self.colors {
            if c.len() != self.vertices {
                return Err(Error::Dimension(format!("{} colors for {} vertices", c.len(), self.vertices)));
            }
        }
        Ok(())
    }

    pub fn origin(&self, e: usize) -> usize {
        self.edges[e].origin
    }

    pub fn terminus(&self, e: usize) -> usize {
        self.edges[e].terminus
    }

    pub fn reverse(&self, e: usize) -> usize {
        self.edges[e].reverse
    }

    /// Edges with terminus `v`, in index order.
    pub fn link(&self, v: usize) -> Vec<usize> {
        (0..self.edges.len()).filter(|&e| self.edges[e].terminus == v).collect()
    }

    /// One oriented representative per edge pair: the smaller index.
    pub fn edge_pairs(&self) -> Vec<usize> {
        (0..self.edges.len()).filter(|&e| e < self.edges[e].reverse).collect()
    }

    pub fn color(&self, v: usize) -> Option<Color> {
        self.colors.as_ref().map(|c| c[v])
    }

    /// Checks that colors exist and every edge joins a black vertex to a white one.
    pub fn check_bipartite(&self) -> Result<()> {
        let c = self.colors.as_ref().ok_or_else(|| Error::Input("graph has no black/white coloring".into()))?;
        for (i, e) in self.edges.iter().enumerate() {
            if c[e.origin] == c[e.terminus] {
                return Err(Error::Input(format!("edge {i} joins two vertices of the same color")));
            }
        }
        Ok(())
    }

    /// A spanning forest, as edge-pair representatives chosen greedily in index order.
    pub fn spanning_forest(&self) -> Vec<usize> {
        let mut comp: Vec<usize> = (0..self.vertices).collect();
        fn find(c: &mut Vec<usize>, x: usize) -> usize {
            let mut r = x;
            while c[r] != r {
                r = c[r];
            }
            c[x] = r;
            r
        }
        let mut out = Vec::new();
        for e in self.edge_pairs() {
            let (a, b) = (find(&mut comp, self.origin(e)), find(&mut comp, self.terminus(e)));
            if a != b {
                comp[a] = b;
                out.push(e);
            }
        }
        out
    }
}

/// Bijections of vertices and oriented edges between two graphs.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GraphMap {
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
}

impl GraphMap {
    pub fn identity(g: &Graph) -> Self {
        GraphMap { vertices: (0..g.vertices).collect(), edges: (0..g.edges.len()).collect() }
    }

    /// Checks that this is an isomorphism `a -> b` respecting incidence, reversal and colors.
    pub fn is_isomorphism(&self, a: &Graph, b: &Graph) -> bool {
        if a.vertices != b.vertices || a.edges.len() != b.edges.len() {
            return false;
        }
        if self.vertices.len() != a.vertices || self.edges.len() != a.edges.len() {
            return false;
        }
        let bijective = |m: &[usize], n: usize| {
            let mut seen = vec![false; n];
            m.iter().all(|&x| x < n && !std::mem::replace(&mut seen[x], true))
        };
        if !bijective(&self.vertices, a.vertices) || !bijective(&self.edges, a.edges.len()) {
            return false;
        }
        let colors_ok = (0..a.vertices).all(|v| a.color(v) == b.color(self.vertices[v]));
        colors_ok
            && a.edges.iter().enumerate().all(|(i, e)| {
                let f = b.edges[self.edges[i]];
                f.origin == self.vertices[e.origin]
                    && f.terminus == self.vertices[e.terminus]
                    && f.reverse == self.edges[e.reverse]
            })
    }
}

/// All isomorphisms `a -> b`, found by backtracking over vertices then edge pairs, in
/// lexicographic order; at most `cap` are returned, with a flag telling whether the list is complete.
pub fn graph_isomorphisms(a: &Graph, b: &Graph, cap: usize) -> (Vec<GraphMap>, bool) {
    let mut out = Vec::new();
    if a.vertices != b.vertices || a.edges.len() != b.edges.len() {
        return (out, true);
    }
    let degree = |g: &Graph, v: usize| g.link(v).len();
    let mut vmap = vec![usize::MAX; a.vertices];
    let mut used = vec![false; b.vertices];
    let complete = assign_vertices(a, b, 0, &mut vmap, &mut used, &degree, cap, &mut out);
    (out, complete)
}

#[allow(clippy::too_many_arguments)]
fn assign_vertices(
    a: &Graph,
    b: &Graph,
    v: usize,
    vmap: &mut Vec<usize>,
    used: &mut Vec<bool>,
    degree: &dyn Fn(&Graph, usize) -> usize,
    cap: usize,
    out: &mut Vec<GraphMap>,
) -> bool {
    if v == a.vertices {
        let pairs = a.edge_pairs();
        let mut emap = vec![usize::MAX; a.edges.len()];
        let mut eused = vec![false; b.edges.len()];
        return assign_edges(a, b, &pairs, 0, vmap, &mut emap, &mut eused, cap, out);
    }
    for w in 0..b.vertices {
        if used[w] || a.color(v) != b.color(w) || degree(a, v) != degree(b, w) {
            continue;
        }
        vmap[v] = w;
        used[w] = true;
        let ok = assign_vertices(a, b, v + 1, vmap, used, degree, cap, out);
        used[w] = false;
        if !ok {
            return false;
        }
    }
    true
}

#[allow(clippy::too_many_arguments)]
fn assign_edges(
    a: &Graph,
    b: &Graph,
    pairs: &[usize],
    k: usize,
    vmap: &[usize],
    emap: &mut Vec<usize>,
    eused: &mut Vec<bool>,
    cap: usize,
    out: &mut Vec<GraphMap>,
) -> bool {
    if k == pairs.len() {
        if out.len() >= cap {
            return false;
        }
        out.push(GraphMap { vertices: vmap.to_vec(), edges: emap.clone() });
        return true;
    }
    let e = pairs[k];
    let (o, t) = (vmap[a.origin(e)], vmap[a.terminus(e)]);
    for f in 0..b.edges.len() {
        let fr = b.reverse(f);
        if eused[f] || eused[fr] || b.origin(f) != o || b.terminus(f) != t {
            continue;
        }
        emap[e] = f;
        emap[a.reverse(e)] = fr;
        eused[f] = true;
        eused[fr] = true;
        let ok = assign_edges(a, b, pairs, k + 1, vmap, emap, eused, cap, out);
        eused[f] = false;
        eused[fr] = false;
        if !ok {
            return false;
        }
    }
    true
}

/// A graph of groups: vertex groups, edge groups with `Γ_e = Γ_ē`, and injective attaching maps
/// `i_e: Γ_e -> Γ_{t(e)}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphOfGroups {
    pub graph: Graph,
    pub vertex_groups: Vec<GroupHandle>,
    /// Indexed by oriented edge; entries of `e` and `ē` are equal.
    pub edge_groups: Vec<GroupHandle>,
    pub attaching: Vec<GroupMap>,
}

impl GraphOfGroups {
    /// Validates shapes, `Γ_e = Γ_ē`, and that every attaching map is an injective homomorphism.
    pub fn new(
        graph: Graph,
        vertex_groups: Vec<GroupHandle>,
        edge_groups: Vec<GroupHandle>,
        attaching: Vec<GroupMap>,
    ) -> Result<Self> {
        graph.validate()?;
        if vertex_groups.len() != graph.vertices {
            return Err(Error::Dimension(format!("{} vertex groups for {} vertices", vertex_groups.len(), graph.vertices)));
        }
        let ne = graph.edges.len();
        if edge_groups.len() != ne || attaching.len() != ne {
            return Err(Error::Dimension(format!("edge data must have one entry per oriented edge ({ne})")));
        }
        for e in 0..ne {
            if edge_groups[e] != edge_groups[graph.reverse(e)] {
                return Err(Error::Input(format!("edge {e} and its reverse carry different groups")));
            }
            let (src, tgt) = (&edge_groups[e], &vertex_groups[graph.terminus(e)]);
            attaching[e].check_hom(src, tgt).map_err(|err| Error::Input(format!("attaching map of edge {e}: {err}")))?;
            if !attaching[e].is_injective(src, tgt)? {
                return Err(Error::Input(format!("attaching map of edge {e} is not injective")));
            }
        }
        Ok(GraphOfGroups { graph, vertex_groups, edge_groups, attaching })
    }

    /// Builds from one entry per edge pair: `(origin, terminus, group, map into terminus, map into origin)`.
    pub fn from_pairs(
        vertex_groups: Vec<GroupHandle>,
        colors: Option<Vec<Color>>,
        edges: Vec<(usize, usize, GroupHandle, GroupMap, GroupMap)>,
    ) -> Result<Self> {
        let pairs: Vec<(usize, usize)> = edges.iter().map(|(a, b, ..)| (*a, *b)).collect();
        let graph = Graph::from_pairs(vertex_groups.len(), &pairs, colors)?;
        let mut edge_groups = Vec::new();
        let mut attaching = Vec::new();
        for (_, _, g, into_t, into_o) in edges {
            edge_groups.push(g.clone());
            edge_groups.push(g);
            attaching.push(into_t);
            attaching.push(into_o);
        }
        Self::new(graph, vertex_groups, edge_groups, attaching)
    }

    pub fn vertex_group(&self, v: usize) -> &GroupHandle {
        &self.vertex_groups[v]
    }

    pub fn edge_group(&self, e: usize) -> &GroupHandle {
        &self.edge_groups[e]
    }

    /// `i_e(x)` in `Γ_{t(e)}`.
    pub fn attach(&self, e: usize, x: &[i64]) -> Vec<i64> {
        self.attaching[e].apply(&self.edge_groups[e], &self.vertex_groups[self.graph.terminus(e)], x)
    }

    /// The same data transported along a graph isomorphism `m: self.graph -> target graph`.
    pub fn relabel(&self, m: &GraphMap) -> Result<GraphOfGroups> {
        let n = self.graph.vertices;
        let ne = self.graph.edges.len();
        if m.vertices.len() != n || m.edges.len() != ne {
            return Err(Error::Dimension("graph map has the wrong shape".into()));
        }
        let mut edges = vec![Edge { origin: 0, terminus: 0, reverse: 0 }; ne];
        let mut vertex_groups: Vec<Option<GroupHandle>> = vec![None; n];
        let mut colors = self.graph.colors.clone();
        for v in 0..n {
            vertex_groups[m.vertices[v]] = Some(self.vertex_groups[v].clone());
            if let (Some(c), Some(orig)) = (colors.as_mut(), self.graph.colors.as_ref()) {
                c[m.vertices[v]] = orig[v];
            }
        }
        let mut edge_groups = self.edge_groups.clone();
        let mut attaching = self.attaching.clone();
        for (e, d) in self.graph.edges.iter().enumerate() {
            let f = m.edges[e];
            edges[f] = Edge { origin: m.vertices[d.origin], terminus: m.vertices[d.terminus], reverse: m.edges[d.reverse] };
            edge_groups[f] = self.edge_groups[e].clone();
            attaching[f] = self.attaching[e].clone();
        }
        let graph = Graph::new(n, edges, colors)?;
        let vertex_groups = vertex_groups.into_iter().collect::<Option<Vec<_>>>().ok_or_else(|| Error::Input("graph map is not bijective".into()))?;
        Ok(GraphOfGroups { graph, vertex_groups, edge_groups, attaching })
    }
}
