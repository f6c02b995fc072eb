use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::finite::whitehead_finite_with_cap;
use super::verdict::{BudgetReport, Refutation, TupleSystem, Verdict, Witness};
use crate::error::{Error, Result};
use crate::nilgroup::{FiniteGroupTable, GroupHom, NilElement, PcPresentation, DEFAULT_AUT_CAP};
use crate::pcp;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WhiteheadBudget {
    /// Largest exponent size used for generator images.
    pub max_radius: i64,
    /// Cap on search nodes visited across all radii.
    pub max_candidates: usize,
    /// Largest finite quotient handed to the exhaustive solver.
    pub quotient_cap: usize,
    /// Exponents of the verbal quotients tried for refutation, in order.
    pub powers: Vec<i64>,
}

impl Default for WhiteheadBudget {
    fn default() -> Self {
        WhiteheadBudget {
            max_radius: 2,
            max_candidates: 2_000_000,
            quotient_cap: DEFAULT_AUT_CAP,
            powers: vec![2, 3, 4, 6, 8, 9, 12, 16, 18, 27],
        }
    }
}

impl WhiteheadBudget {
    /// A budget scaled by a single knob: radius `level`, candidates and quotient powers growing with it.
    pub fn with_level(level: usize) -> Self {
        let mut b = WhiteheadBudget::default();
        b.max_radius = level as i64;
        b.max_candidates = 200_000usize.saturating_mul(level.max(1));
        b
    }
}

fn check_elements(p: &PcPresentation, s: &TupleSystem<NilElement>) -> Result<()> {
    for x in s.elements() {
        if x.len() != p.len() {
            return Err(Error::Dimension(format!("element has {} exponents, group has {} generators", x.len(), p.len())));
        }
    }
    Ok(())
}

/// Image of a normal-form element under generator images.
fn apply_images(p: &PcPresentation, images: &[Option<NilElement>], x: &NilElement) -> NilElement {
    let mut out = p.identity();
    for (k, &e) in x.exponents().iter().enumerate() {
        if e != 0 {
            let img = images[k].as_ref().expect("image assigned");
            out = p.multiply(&out, &p.power(img, e));
        }
    }
    out
}

struct Search<'a> {
    p: &'a PcPresentation,
    s: &'a TupleSystem<NilElement>,
    t: &'a TupleSystem<NilElement>,
    radius: i64,
    nodes: usize,
    max_nodes: usize,
    values: Vec<Vec<i64>>,
}

impl Search<'_> {
    /// Candidate exponent values for coordinate `q`.
    fn range(&self, q: usize) -> Vec<i64> {
        match self.p.relative_order(q) {
            Some(o) => (0..o.min(self.radius + 1)).collect(),
            None => (-self.radius..=self.radius).collect(),
        }
    }

    fn vectors(&self) -> Vec<NilElement> {
        let ranges: Vec<Vec<i64>> = (0..self.p.len()).map(|q| self.range(q)).collect();
        let mut out = Vec::new();
        let mut cur = vec![0usize; ranges.len()];
        'outer: loop {
            out.push(NilElement::from_exponents(cur.iter().zip(&ranges).map(|(&i, r)| r[i]).collect()));
            for q in (0..cur.len()).rev() {
                cur[q] += 1;
                if cur[q] < ranges[q].len() {
                    continue 'outer;
                }
                cur[q] = 0;
            }
            break;
        }
        out
    }

    /// Relations whose left-hand side involves generator `i` and later ones.
    fn relations_hold(&self, images: &[Option<NilElement>], i: usize) -> bool {
        let p = self.p;
        let gi = images[i].as_ref().expect("assigned");
        if let Some(o) = p.relative_order(i) {
            let lhs = p.power(gi, o);
            if lhs != apply_images(p, images, p.power_relation(i)) {
                return false;
            }
        }
        for j in i + 1..p.len() {
            let gj = images[j].as_ref().expect("assigned");
            let lhs = p.conjugate(gj, gi);
            if lhs != apply_images(p, images, p.conj_relation(j, i)) {
                return false;
            }
        }
        true
    }

    /// Depth-first search assigning images from the last generator to the first.
    fn run(&mut self, images: &mut Vec<Option<NilElement>>, i: usize) -> Result<Option<Witness>> {
        let candidates = self.values.clone();
        for v in &candidates {
            if self.nodes >= self.max_nodes {
                return Ok(None);
            }
            self.nodes += 1;
            images[i] = Some(NilElement::from_exponents(v.clone()));
            if !self.relations_hold(images, i) {
                continue;
            }
            if i > 0 {
                if let Some(w) = self.run(images, i - 1)? {
                    return Ok(Some(w));
                }
                continue;
            }
            let full: Vec<NilElement> = images.iter().map(|x| x.clone().expect("assigned")).collect();
            if self.radius > 0 && full.iter().all(|x| x.exponents().iter().all(|e| e.abs() < self.radius)) {
                continue;
            }
            if let Some(w) = self.complete(full)? {
                return Ok(Some(w));
            }
        }
        images[i] = None;
        Ok(None)
    }

    fn complete(&self, full: Vec<NilElement>) -> Result<Option<Witness>> {
        let p = Arc::new(self.p.clone());
        let sigma = GroupHom::from_images(p.clone(), p.clone(), full)?;
        let mut conjugators = Vec::with_capacity(self.s.tuples.len());
        for (si, ti) in self.s.tuples.iter().zip(&self.t.tuples) {
            let img: Vec<NilElement> = si.iter().map(|x| sigma.apply(x)).collect();
            match self.p.solve_conjugation(ti, &img) {
                Some((g, _)) => conjugators.push(g.into_exponents()),
                None => return Ok(None),
            }
        }
        if !sigma.is_automorphism() {
            return Ok(None);
        }
        Ok(Some(Witness {
            automorphism: sigma.images.iter().map(|x| x.exponents().to_vec()).collect(),
            conjugators,
        }))
    }
}

/// Witness search at one radius; the identity is tried at radius 0.
fn search_radius(
    p: &PcPresentation,
    s: &TupleSystem<NilElement>,
    t: &TupleSystem<NilElement>,
    radius: i64,
    max_nodes: usize,
    nodes_used: &mut usize,
) -> Result<Option<Witness>> {
    let mut search = Search { p, s, t, radius, nodes: *nodes_used, max_nodes, values: Vec::new() };
    if radius == 0 {
        *nodes_used += 1;
        return search.complete(p.generators());
    }
    search.values = search.vectors().into_iter().map(NilElement::into_exponents).collect();
    let mut images = vec![None; p.len()];
    let out = if p.is_empty() { None } else { search.run(&mut images, p.len() - 1)? };
    *nodes_used = search.nodes;
    Ok(out)
}

/// Attempts a refutation in `N / N^k`. `Ok(None)` means the quotient did not separate the systems.
pub fn quotient_refutation(
    p: &PcPresentation,
    s: &TupleSystem<NilElement>,
    t: &TupleSystem<NilElement>,
    k: i64,
    cap: usize,
) -> Result<Option<Refutation>> {
    let v = p.verbal_power_subgroup(k, cap)?;
    let order = p.index(&v).ok_or(Error::IndexInfinite)?;
    if order > cap as u128 {
        return Err(Error::cap("refutation quotient", order, cap));
    }
    let q = p.quotient(&v)?;
    let table = FiniteGroupTable::from_pc(&q.presentation, cap)?;
    let project = |sys: &TupleSystem<NilElement>| -> (TupleSystem<usize>, Vec<Vec<Vec<i64>>>) {
        let mut idx = Vec::new();
        let mut exps = Vec::new();
        for tuple in &sys.tuples {
            let images: Vec<NilElement> = tuple.iter().map(|x| q.project(p, x)).collect();
            idx.push(images.iter().map(|x| table.index_of(x)).collect());
            exps.push(images.into_iter().map(NilElement::into_exponents).collect());
        }
        (TupleSystem::new(idx), exps)
    };
    let (qs, source) = project(s);
    let (qt, target) = project(t);
    match whitehead_finite_with_cap(&table.table, &qs, &qt, cap)? {
        Verdict::NotEquivalent { refutation: Refutation::Exhaustive { automorphisms } } => Ok(Some(Refutation::Quotient {
            power: k,
            order: order as u64,
            presentation: pcp::to_string(&q.presentation),
            source,
            target,
            automorphisms,
        })),
        _ => Ok(None),
    }
}

/// Interleaved witness search and finite-quotient refutation.
pub fn whitehead_nilpotent(
    p: &PcPresentation,
    s: &TupleSystem<NilElement>,
    t: &TupleSystem<NilElement>,
    budget: &WhiteheadBudget,
) -> Result<Verdict> {
    s.check_shape(t)?;
    check_elements(p, s)?;
    check_elements(p, t)?;
    let mut nodes = 0usize;
    let mut quotients = Vec::new();
    let mut skipped = Vec::new();
    let steps = (budget.max_radius as usize + 1).max(budget.powers.len());
    let mut radius_done = -1;
    for step in 0..steps {
        let r = step as i64;
        if r <= budget.max_radius && nodes < budget.max_candidates {
            if let Some(witness) = search_radius(p, s, t, r, budget.max_candidates, &mut nodes)? {
                return Ok(Verdict::Equivalent { witness });
            }
            if nodes < budget.max_candidates {
                radius_done = r;
            }
        }
        if let Some(&k) = budget.powers.get(step) {
            match quotient_refutation(p, s, t, k, budget.quotient_cap) {
                Ok(Some(refutation)) => return Ok(Verdict::NotEquivalent { refutation }),
                Ok(None) => {
                    let v = p.verbal_power_subgroup(k, budget.quotient_cap)?;
                    quotients.push((k, p.index(&v).map_or(0, |i| u64::try_from(i).unwrap_or(u64::MAX))));
                }
                Err(Error::CapExceeded { .. }) => skipped.push(k),
                Err(e) => return Err(e),
            }
        }
    }
    Ok(Verdict::Unknown {
        report: BudgetReport { radius: radius_done, candidates: nodes, quotients, skipped_powers: skipped },
    })
}

/// Re-checks an Equivalent witness by collection.
pub fn verify_nilpotent_witness(
    p: &PcPresentation,
    s: &TupleSystem<NilElement>,
    t: &TupleSystem<NilElement>,
    w: &Witness,
) -> Result<()> {
    let p = Arc::new(p.clone());
    let images = w.automorphism.iter().map(|v| NilElement::from_exponents(v.clone())).collect();
    let sigma = GroupHom::from_images(p.clone(), p.clone(), images)?;
    if !sigma.is_automorphism() {
        return Err(Error::RelationViolated("witness is not an automorphism".into()));
    }
    if w.conjugators.len() != s.tuples.len() {
        return Err(Error::Dimension("one conjugator per tuple is required".into()));
    }
    for ((si, ti), g) in s.tuples.iter().zip(&t.tuples).zip(&w.conjugators) {
        let g = NilElement::from_exponents(g.clone());
        p.check_len(&g)?;
        for (x, y) in si.iter().zip(ti) {
            if sigma.apply(x) != p.conjugate(y, &g) {
                return Err(Error::RelationViolated("witness does not carry the source tuple to the target".into()));
            }
        }
    }
    Ok(())
}

/// Re-derives a quotient refutation from the group and checks it with the exhaustive solver.
pub fn verify_refutation(
    p: &PcPresentation,
    s: &TupleSystem<NilElement>,
    t: &TupleSystem<NilElement>,
    refutation: &Refutation,
    cap: usize,
) -> Result<()> {
    match refutation {
        Refutation::Quotient { power, order, .. } => {
            let again = quotient_refutation(p, s, t, *power, cap.max(*order as usize))?;
            match again {
                Some(Refutation::Quotient { order: o, .. }) if o == *order => Ok(()),
                _ => Err(Error::RelationViolated("the quotient does not separate the systems".into())),
            }
        }
        Refutation::Invariant { .. } | Refutation::Exhaustive { .. } => {
            Err(Error::Input("only quotient refutations can be replayed for nilpotent groups".into()))
        }
    }
}
