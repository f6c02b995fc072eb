use serde::Serialize;

use super::graph::GraphOfGroups;
use super::group::abelianize;
use crate::error::{Error, Result};
use crate::zmod::AbelianModule;

pub type Word = Vec<(usize, i64)>;

/// A finite presentation with named generators and relators as syllable words.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FinitePresentation {
    pub generators: Vec<String>,
    pub relators: Vec<Word>,
}

impl FinitePresentation {
    pub fn abelianization(&self) -> AbelianModule {
        abelianize(self.generators.len(), &self.relators)
    }

    pub fn format_word(&self, w: &[(usize, i64)]) -> String {
        if w.is_empty() {
            return "1".into();
        }
        w.iter()
            .map(|&(g, e)| if e == 1 { self.generators[g].clone() } else { format!("{}^{e}", self.generators[g]) })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// The fundamental group of a graph of groups relative to a maximal tree.
#[derive(Clone, Debug, Serialize)]
pub struct FundamentalPresentation {
    pub presentation: FinitePresentation,
    /// Index of the first generator of each vertex group.
    pub vertex_offsets: Vec<usize>,
    /// `(edge, generator)` for every edge pair outside the tree.
    pub stable_letters: Vec<(usize, usize)>,
    /// Edge-pair representatives of the tree.
    pub tree: Vec<usize>,
    pub abelianization: AbelianModule,
}

fn canonical_pair(x: &GraphOfGroups, e: usize) -> usize {
    e.min(x.graph.reverse(e))
}

/// Checks that `tree` (edges in either orientation) is a maximal tree, or a maximal forest when the
/// graph is disconnected, and returns its edge-pair representatives.
pub fn check_tree(x: &GraphOfGroups, tree: &[usize]) -> Result<Vec<usize>> {
    let g = &x.graph;
    let mut reps: Vec<usize> = Vec::with_capacity(tree.len());
    for &e in tree {
        if e >= g.edges.len() {
            return Err(Error::Input(format!("tree edge {e} does not exist")));
        }
        let r = canonical_pair(x, e);
        if reps.contains(&r) {
            return Err(Error::Input(format!("tree edge {e} is listed twice")));
        }
        reps.push(r);
    }
    let mut comp: Vec<usize> = (0..g.vertices).collect();
    fn find(c: &mut [usize], mut v: usize) -> usize {
        while c[v] != v {
            v = c[v];
        }
        v
    }
    for &e in &reps {
        let (a, b) = (find(&mut comp, g.origin(e)), find(&mut comp, g.terminus(e)));
        if a == b {
            return Err(Error::Input(format!("tree edge {e} closes a cycle")));
        }
        comp[a] = b;
    }
    if reps.len() != g.spanning_forest().len() {
        return Err(Error::Input("tree does not span the graph".into()));
    }
    reps.sort_unstable();
    Ok(reps)
}

/// Vertex generators, one stable letter per edge pair outside the tree, vertex relators, and the
/// relations `e i_e(h) e^-1 = i_ē(h)` for every generator `h` of `Γ_e`, with tree letters deleted.
pub fn fundamental_presentation(x: &GraphOfGroups, tree: &[usize]) -> Result<FundamentalPresentation> {
    let tree = check_tree(x, tree)?;
    let g = &x.graph;
    let mut generators = Vec::new();
    let mut vertex_offsets = Vec::with_capacity(g.vertices);
    let mut relators: Vec<Word> = Vec::new();
    for v in 0..g.vertices {
        let gv = x.vertex_group(v);
        let off = generators.len();
        vertex_offsets.push(off);
        generators.extend((0..gv.ngens()).map(|i| format!("v{v}_{i}")));
        relators.extend(gv.relators().into_iter().map(|w| shift(&w, off)));
    }
    let mut stable_letters = Vec::new();
    for e in g.edge_pairs() {
        let letter = if tree.contains(&e) {
            None
        } else {
            stable_letters.push((e, generators.len()));
            generators.push(format!("t{e}"));
            Some(generators.len() - 1)
        };
        let r = g.reverse(e);
        let (vt, vo) = (g.terminus(e), g.terminus(r));
        for h in x.edge_group(e).generators() {
            let a = shift(&x.vertex_group(vt).word(&x.attach(e, &h)), vertex_offsets[vt]);
            let b = shift(&x.vertex_group(vo).word(&x.attach(r, &h)), vertex_offsets[vo]);
            let mut w: Word = Vec::new();
            if let Some(t) = letter {
                w.push((t, 1));
            }
            w.extend(a);
            if let Some(t) = letter {
                w.push((t, -1));
            }
            w.extend(b.iter().rev().map(|&(s, k)| (s, -k)));
            relators.push(w);
        }
    }
    let presentation = FinitePresentation { generators, relators };
    let abelianization = presentation.abelianization();
    Ok(FundamentalPresentation { presentation, vertex_offsets, stable_letters, tree, abelianization })
}

fn shift(w: &[(usize, i64)], off: usize) -> Word {
    w.iter().map(|&(g, e)| (g + off, e)).collect()
}

/// Abelianization of the fundamental group, using the greedy maximal forest.
pub fn fundamental_abelianization(x: &GraphOfGroups) -> Result<AbelianModule> {
    Ok(fundamental_presentation(x, &x.graph.spanning_forest())?.abelianization)
}
