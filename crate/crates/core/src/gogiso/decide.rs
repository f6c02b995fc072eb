use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::graph::{graph_isomorphisms, Color, GraphMap, GraphOfGroups};
use super::group::{box_elements, dedupe, find_isomorphism, Elem, GroupHandle, GroupMap, IsoSearch, ELEMENT_CAP};
use super::iso::{assemble_isomorphism, verify_extension_adjustment, verify_gog_isomorphism, ExtensionAdjustment, GoGIsomorphism};
use super::presentation::fundamental_abelianization;
use crate::error::{Error, Result};
use crate::nilgroup::NilElement;
use crate::whitehead::{whitehead_abelian, whitehead_finite, whitehead_nilpotent, TupleSystem, Verdict, WhiteheadBudget};
use crate::zmod::AbelianModule;

/// Per white vertex of the target, a finite list of automorphisms realizing the orbit of its marking.
/// Vertices without an entry use the identity alone.
pub type WhiteOrbitLists = BTreeMap<usize, Vec<GroupMap>>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GogBudget {
    pub max_graph_isomorphisms: usize,
    pub max_branches: usize,
    pub whitehead: WhiteheadBudget,
    /// Exponent radius for vertex-isomorphism and white-conjugator searches in infinite nilpotent groups.
    pub search_radius: i64,
}

impl Default for GogBudget {
    fn default() -> Self {
        GogBudget { max_graph_isomorphisms: 1000, max_branches: 10_000, whitehead: WhiteheadBudget::default(), search_radius: 1 }
    }
}

impl GogBudget {
    pub fn with_level(level: usize) -> Self {
        GogBudget {
            max_graph_isomorphisms: 1000 * (level + 1),
            max_branches: 10_000 * (level + 1),
            whitehead: WhiteheadBudget::with_level(level),
            search_radius: 1 + level as i64,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GogRefutation {
    GraphsNotIsomorphic,
    Abelianization { source: AbelianModule, target: AbelianModule },
    /// Every graph isomorphism was ruled out; `reasons` has one line per graph isomorphism.
    Exhausted { graph_isomorphisms: usize, branches: usize, reasons: Vec<String> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GogReport {
    pub graph_isomorphisms: usize,
    pub branches: usize,
    pub unknown: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum GogVerdict {
    /// `isomorphism` maps `x1` relabeled along `graph_map` to `x2`.
    Equivalent { graph_map: GraphMap, psi: Vec<GroupMap>, adjustment: ExtensionAdjustment, isomorphism: GoGIsomorphism },
    NotEquivalent { refutation: GogRefutation },
    Unknown { report: GogReport },
}

impl GogVerdict {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, GogVerdict::Equivalent { .. })
    }

    pub fn is_not_equivalent(&self) -> bool {
        matches!(self, GogVerdict::NotEquivalent { .. })
    }

    pub fn is_unknown(&self) -> bool {
        matches!(self, GogVerdict::Unknown { .. })
    }
}

/// Outcome of one graph isomorphism or one branch below it.
enum Outcome {
    Found(Box<GogVerdict>),
    Refuted(String),
    Unknown(String),
}

/// Accumulates refutations and unknowns over the search.
#[derive(Default)]
struct Tally {
    branches: usize,
    refuted: Vec<String>,
    unknown: Vec<String>,
}

/// Decides whether `x1` and `x2` are isomorphic graphs of groups, returning a verified witness,
/// a refutation when every branch is closed by complete solvers, or `Unknown`.
///
/// White orbit lists are read relative to the vertex isomorphisms `ψ_w` found for the white vertices
/// (the identity when both sides carry the same group).
pub fn decide_gog_iso(x1: &GraphOfGroups, x2: &GraphOfGroups, white: &WhiteOrbitLists, budget: &GogBudget) -> Result<GogVerdict> {
    x1.graph.check_bipartite()?;
    x2.graph.check_bipartite()?;
    for (&w, list) in white {
        if w >= x2.graph.vertices || x2.graph.color(w) != Some(Color::White) {
            return Err(Error::Input(format!("orbit list given for vertex {w}, which is not a white vertex")));
        }
        let gw = x2.vertex_group(w);
        for a in list {
            a.check_hom(gw, gw)?;
            if !a.is_isomorphism(gw, gw)? {
                return Err(Error::Input(format!("orbit list of vertex {w} holds a non-automorphism")));
            }
        }
    }
    let (a1, a2) = (fundamental_abelianization(x1)?, fundamental_abelianization(x2)?);
    if a1 != a2 {
        return Ok(GogVerdict::NotEquivalent { refutation: GogRefutation::Abelianization { source: a1, target: a2 } });
    }
    let (maps, complete) = graph_isomorphisms(&x1.graph, &x2.graph, budget.max_graph_isomorphisms);
    if maps.is_empty() && complete {
        return Ok(GogVerdict::NotEquivalent { refutation: GogRefutation::GraphsNotIsomorphic });
    }
    let mut tally = Tally::default();
    if !complete {
        tally.unknown.push(format!("graph isomorphism enumeration stopped at {}", budget.max_graph_isomorphisms));
    }
    for m in &maps {
        let y1 = x1.relabel(m)?;
        match decide_on_graph(&y1, x2, m, white, budget, &mut tally)? {
            Outcome::Found(v) => return Ok(*v),
            Outcome::Refuted(r) => tally.refuted.push(r),
            Outcome::Unknown(r) => tally.unknown.push(r),
        }
    }
    if tally.unknown.is_empty() {
        Ok(GogVerdict::NotEquivalent {
            refutation: GogRefutation::Exhausted {
                graph_isomorphisms: maps.len(),
                branches: tally.branches,
                reasons: tally.refuted,
            },
        })
    } else {
        Ok(GogVerdict::Unknown { report: GogReport { graph_isomorphisms: maps.len(), branches: tally.branches, unknown: tally.unknown } })
    }
}

/// One option for the white end `ē` of an edge: the conjugator `g_ē` and the chased tuple in `Γ_e`.
#[derive(Clone)]
struct WhiteEnd {
    conjugator: Elem,
    tau: Vec<Elem>,
}

fn decide_on_graph(
    y1: &GraphOfGroups,
    x2: &GraphOfGroups,
    m: &GraphMap,
    white: &WhiteOrbitLists,
    budget: &GogBudget,
    tally: &mut Tally,
) -> Result<Outcome> {
    let g = &x2.graph;
    let mut psi = Vec::with_capacity(g.vertices);
    for v in 0..g.vertices {
        match find_isomorphism(y1.vertex_group(v), x2.vertex_group(v), budget.search_radius) {
            IsoSearch::Found(map) => psi.push(map),
            IsoSearch::NotIsomorphic(r) => return Ok(Outcome::Refuted(format!("graph map {:?}: vertex {v}: {r}", m.vertices))),
            IsoSearch::Unknown(r) => return Ok(Outcome::Unknown(format!("graph map {:?}: vertex {v}: {r}", m.vertices))),
        }
    }
    let whites: Vec<usize> = (0..g.vertices).filter(|&v| g.color(v) == Some(Color::White)).collect();
    let lists: Vec<Vec<GroupMap>> = whites
        .iter()
        .map(|&w| white.get(&w).cloned().unwrap_or_else(|| vec![GroupMap::identity(x2.vertex_group(w))]))
        .collect();
    if let Some(i) = lists.iter().position(Vec::is_empty) {
        return Ok(Outcome::Refuted(format!("graph map {:?}: white vertex {} has an empty orbit list", m.vertices, whites[i])));
    }
    let mut choice = vec![0usize; whites.len()];
    let mut unknown: Option<String> = None;
    let mut refuted = 0usize;
    loop {
        let alphas: BTreeMap<usize, &GroupMap> = whites.iter().zip(&choice).zip(&lists).map(|((&w, &i), l)| (w, &l[i])).collect();
        match decide_white_choice(y1, x2, &psi, &alphas, budget, tally)? {
            Outcome::Found(v) => {
                let GogVerdict::Equivalent { psi, adjustment, isomorphism, .. } = *v else { unreachable!() };
                return Ok(Outcome::Found(Box::new(GogVerdict::Equivalent { graph_map: m.clone(), psi, adjustment, isomorphism })));
            }
            Outcome::Refuted(_) => refuted += 1,
            Outcome::Unknown(r) => {
                unknown.get_or_insert(r);
            }
        }
        if !advance(&mut choice, &lists) {
            break;
        }
    }
    let label = format!("graph map {:?}", m.vertices);
    Ok(match unknown {
        Some(r) => Outcome::Unknown(format!("{label}: {r}")),
        None => Outcome::Refuted(format!("{label}: {refuted} white marking choices admit no extension adjustment")),
    })
}

fn advance(choice: &mut [usize], lists: &[Vec<GroupMap>]) -> bool {
    for (c, l) in choice.iter_mut().zip(lists).rev() {
        *c += 1;
        if *c < l.len() {
            return true;
        }
        *c = 0;
    }
    false
}

/// Options for the white end `r` (terminus white) of an edge pair, given `α_w`.
fn white_end_options(
    y1: &GraphOfGroups,
    x2: &GraphOfGroups,
    psi: &[GroupMap],
    alpha: &GroupMap,
    r: usize,
    radius: i64,
) -> Result<(Vec<WhiteEnd>, bool)> {
    let w = x2.graph.terminus(r);
    let (gw1, gw) = (y1.vertex_group(w), x2.vertex_group(w));
    let (ge1, ge) = (y1.edge_group(r), x2.edge_group(r));
    let base: Vec<Elem> = ge1
        .generators()
        .iter()
        .map(|h| alpha.apply(gw, gw, &psi[w].apply(gw1, gw, &y1.attach(r, h))))
        .collect();
    let (conjugators, complete) = match gw {
        GroupHandle::Finite(_) => (gw.elements(ELEMENT_CAP)?, true),
        _ if gw.pc().expect("polycyclic").is_abelian() => (vec![gw.identity()], true),
        _ => (box_elements(gw.ngens(), radius), false),
    };
    let mut out = Vec::new();
    for c in conjugators {
        let mut tau = Vec::with_capacity(base.len());
        for y in &base {
            match x2.attaching[r].preimage(ge, gw, &gw.ad(&c, y))? {
                Some(x) => tau.push(x),
                None => break,
            }
        }
        if tau.len() != base.len() {
            continue;
        }
        let map = GroupMap::new(tau.clone());
        if map.check_hom(ge1, ge).is_ok() && map.is_surjective(ge1, ge)? {
            out.push(WhiteEnd { conjugator: c, tau });
        }
    }
    Ok((out, complete))
}

fn decide_white_choice(
    y1: &GraphOfGroups,
    x2: &GraphOfGroups,
    psi: &[GroupMap],
    alphas: &BTreeMap<usize, &GroupMap>,
    budget: &GogBudget,
    tally: &mut Tally,
) -> Result<Outcome> {
    let g = &x2.graph;
    // edges whose terminus is white, in index order
    let white_ends: Vec<usize> = (0..g.edges.len()).filter(|&e| alphas.contains_key(&g.terminus(e))).collect();
    let mut options = Vec::with_capacity(white_ends.len());
    let mut complete = true;
    for &r in &white_ends {
        let (opts, c) = white_end_options(y1, x2, psi, alphas[&g.terminus(r)], r, budget.search_radius)?;
        complete &= c;
        if opts.is_empty() {
            let msg = format!("edge {r}: the white marking cannot be conjugated onto the attached subgroup");
            return Ok(if complete { Outcome::Refuted(msg) } else { Outcome::Unknown(msg) });
        }
        options.push(dedupe_ends(opts));
    }
    let mut pick = vec![0usize; white_ends.len()];
    let mut unknown: Option<String> = None;
    loop {
        tally.branches += 1;
        if tally.branches > budget.max_branches {
            return Ok(Outcome::Unknown(format!("branch budget {} exhausted", budget.max_branches)));
        }
        let ends: BTreeMap<usize, &WhiteEnd> = white_ends.iter().zip(&pick).zip(&options).map(|((&r, &i), o)| (r, &o[i])).collect();
        match solve_black_vertices(y1, x2, psi, alphas, &ends, budget)? {
            Outcome::Found(v) => return Ok(Outcome::Found(v)),
            Outcome::Refuted(_) => {}
            Outcome::Unknown(r) => {
                unknown.get_or_insert(r);
            }
        }
        if !advance_pick(&mut pick, &options) {
            break;
        }
    }
    Ok(match unknown {
        Some(r) => Outcome::Unknown(r),
        None if complete => Outcome::Refuted("every black vertex problem was refuted".into()),
        None => Outcome::Unknown("white conjugators in an infinite nilpotent group were only searched in a box".into()),
    })
}

fn dedupe_ends(opts: Vec<WhiteEnd>) -> Vec<WhiteEnd> {
    let taus = dedupe(opts.iter().map(|o| o.tau.clone()).collect());
    taus.into_iter().map(|t| opts.iter().find(|o| o.tau == t).expect("present").clone()).collect()
}

fn advance_pick(pick: &mut [usize], options: &[Vec<WhiteEnd>]) -> bool {
    for (c, l) in pick.iter_mut().zip(options).rev() {
        *c += 1;
        if *c < l.len() {
            return true;
        }
        *c = 0;
    }
    false
}

/// Runs the mixed Whitehead solver at every black vertex and assembles the witness.
fn solve_black_vertices(
    y1: &GraphOfGroups,
    x2: &GraphOfGroups,
    psi: &[GroupMap],
    alphas: &BTreeMap<usize, &GroupMap>,
    ends: &BTreeMap<usize, &WhiteEnd>,
    budget: &GogBudget,
) -> Result<Outcome> {
    let g = &x2.graph;
    let mut automorphisms: Vec<Option<GroupMap>> = (0..g.vertices).map(|v| alphas.get(&v).map(|a| (*a).clone())).collect();
    let mut elements: Vec<Option<Elem>> = vec![None; g.edges.len()];
    for (&r, end) in ends {
        elements[r] = Some(end.conjugator.clone());
    }
    for b in (0..g.vertices).filter(|&v| g.color(v) == Some(Color::Black)) {
        let (gb1, gb) = (y1.vertex_group(b), x2.vertex_group(b));
        let link = g.link(b);
        let mut source = Vec::with_capacity(link.len());
        let mut target = Vec::with_capacity(link.len());
        for &e in &link {
            let tau = &ends[&g.reverse(e)].tau;
            let gens = y1.edge_group(e).generators();
            source.push(gens.iter().map(|h| psi[b].apply(gb1, gb, &y1.attach(e, h))).collect::<Vec<_>>());
            target.push(tau.iter().map(|t| x2.attach(e, t)).collect::<Vec<_>>());
        }
        let verdict = match black_solve(gb, source, target, &budget.whitehead) {
            Ok(v) => v,
            Err(err) => return Ok(Outcome::Unknown(format!("vertex {b}: {err}"))),
        };
        match verdict {
            Verdict::Equivalent { witness } => {
                automorphisms[b] = Some(GroupMap::new(witness.automorphism.clone()));
                for (&e, c) in link.iter().zip(&witness.conjugators) {
                    elements[e] = Some(c.clone());
                }
            }
            Verdict::NotEquivalent { .. } => return Ok(Outcome::Refuted(format!("vertex {b}: mixed Whitehead problem refuted"))),
            Verdict::Unknown { .. } => return Ok(Outcome::Unknown(format!("vertex {b}: mixed Whitehead search exhausted its budget"))),
        }
    }
    let adjustment = ExtensionAdjustment {
        automorphisms: automorphisms
            .into_iter()
            .enumerate()
            .map(|(v, a)| a.unwrap_or_else(|| GroupMap::identity(x2.vertex_group(v))))
            .collect(),
        elements: elements
            .into_iter()
            .enumerate()
            .map(|(e, c)| c.unwrap_or_else(|| x2.vertex_group(g.terminus(e)).identity()))
            .collect(),
    };
    let check = verify_extension_adjustment(y1, x2, psi, &adjustment);
    if let Some(v) = check.violation() {
        return Err(Error::RelationViolated(format!("assembled adjustment fails: {}", v.reason)));
    }
    let isomorphism = assemble_isomorphism(y1, x2, psi, &adjustment)?;
    if let Some(v) = verify_gog_isomorphism(y1, x2, &isomorphism)?.violation() {
        return Err(Error::RelationViolated(format!("assembled isomorphism fails: {}", v.reason)));
    }
    Ok(Outcome::Found(Box::new(GogVerdict::Equivalent {
        graph_map: GraphMap { vertices: Vec::new(), edges: Vec::new() },
        psi: psi.to_vec(),
        adjustment,
        isomorphism,
    })))
}

fn black_solve(g: &GroupHandle, source: Vec<Vec<Elem>>, target: Vec<Vec<Elem>>, budget: &WhiteheadBudget) -> Result<Verdict> {
    match g {
        GroupHandle::Abelian { module, .. } => whitehead_abelian(module, &TupleSystem::new(source), &TupleSystem::new(target)),
        GroupHandle::Nilpotent(p) => {
            let wrap = |s: Vec<Vec<Elem>>| TupleSystem::new(s.into_iter().map(|t| t.into_iter().map(NilElement::from_exponents).collect()).collect());
            whitehead_nilpotent(p, &wrap(source), &wrap(target), budget)
        }
        GroupHandle::Finite(f) => {
            let wrap = |s: Vec<Vec<Elem>>| TupleSystem::new(s.into_iter().map(|t| t.into_iter().map(|x| x[0] as usize).collect()).collect());
            whitehead_finite(&f.table, &wrap(source), &wrap(target))
        }
    }
}
