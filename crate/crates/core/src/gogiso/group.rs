use std::collections::{HashSet, VecDeque};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nilgroup::{FiniteGroupTable, GroupHom, NilElement, PcPresentation, RelationKind};
use crate::zmod::{AbelianModule, AbelianPresentation, IntMatrix};

/// Elements are exponent vectors for polycyclic groups and `[index]` for tables.
pub type Elem = Vec<i64>;

/// Cap on the order of finite groups enumerated element by element.
pub const ELEMENT_CAP: usize = 4096;

/// Cap on the number of generator-image tuples tried by [`find_isomorphism`].
pub const ISO_SEARCH_CAP: usize = 1_000_000;

/// A finite group table with a fixed generating tuple and a word for every element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteHandle {
    pub name: String,
    pub table: FiniteGroupTable,
    pub gens: Vec<usize>,
    words: Vec<Vec<(usize, i64)>>,
}

impl FiniteHandle {
    pub fn new(name: &str, table: FiniteGroupTable) -> Self {
        let gens = table.generating_set();
        let mut words: Vec<Option<Vec<(usize, i64)>>> = vec![None; table.order()];
        words[0] = Some(Vec::new());
        let mut queue = VecDeque::from([0usize]);
        while let Some(x) = queue.pop_front() {
            for (k, &g) in gens.iter().enumerate() {
                let y = table.mul(x, g);
                if words[y].is_none() {
                    let mut w = words[x].clone().expect("visited");
                    w.push((k, 1));
                    words[y] = Some(w);
                    queue.push_back(y);
                }
            }
        }
        let words = words.into_iter().map(|w| w.expect("generating set spans")).collect();
        FiniteHandle { name: name.to_string(), table, gens, words }
    }
}

/// A vertex or edge group of a graph of groups.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupHandle {
    /// `Z^r ⊕ Z/d_1 ⊕ ...`, computed in through the matching polycyclic presentation.
    Abelian { module: AbelianModule, pc: Arc<PcPresentation> },
    Nilpotent(Arc<PcPresentation>),
    Finite(Arc<FiniteHandle>),
}

impl GroupHandle {
    pub fn abelian(module: AbelianModule) -> Result<Self> {
        let torsion: Vec<u64> = module
            .invariant_factors
            .iter()
            .map(|d| d.to_u64().ok_or_else(|| Error::Input(format!("torsion factor {d} is too large"))))
            .collect::<Result<_>>()?;
        let pc = PcPresentation::abelian(&abelian_name(&module), module.free_rank, &torsion)?;
        Ok(GroupHandle::Abelian { module, pc: Arc::new(pc) })
    }

    pub fn free_abelian(n: usize) -> Self {
        Self::abelian(AbelianModule::free(n)).expect("free abelian groups are valid")
    }

    pub fn nilpotent(p: PcPresentation) -> Self {
        GroupHandle::Nilpotent(Arc::new(p))
    }

    pub fn finite(name: &str, table: FiniteGroupTable) -> Self {
        GroupHandle::Finite(Arc::new(FiniteHandle::new(name, table)))
    }

    pub fn name(&self) -> String {
        match self {
            GroupHandle::Abelian { module, .. } => abelian_name(module),
            GroupHandle::Nilpotent(p) => p.name().to_string(),
            GroupHandle::Finite(f) => f.name.clone(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            GroupHandle::Abelian { .. } => "abelian",
            GroupHandle::Nilpotent(_) => "nilpotent",
            GroupHandle::Finite(_) => "finite",
        }
    }

    /// The polycyclic presentation behind abelian and nilpotent handles.
    pub fn pc(&self) -> Option<&Arc<PcPresentation>> {
        match self {
            GroupHandle::Abelian { pc, .. } | GroupHandle::Nilpotent(pc) => Some(pc),
            GroupHandle::Finite(_) => None,
        }
    }

    pub fn ngens(&self) -> usize {
        match self {
            GroupHandle::Finite(f) => f.gens.len(),
            _ => self.pc().expect("polycyclic").len(),
        }
    }

    pub fn generator(&self, i: usize) -> Elem {
        match self {
            GroupHandle::Finite(f) => vec![f.gens[i] as i64],
            _ => self.pc().expect("polycyclic").generator(i).into_exponents(),
        }
    }

    pub fn generators(&self) -> Vec<Elem> {
        (0..self.ngens()).map(|i| self.generator(i)).collect()
    }

    pub fn identity(&self) -> Elem {
        match self {
            GroupHandle::Finite(_) => vec![0],
            _ => vec![0; self.pc().expect("polycyclic").len()],
        }
    }

    /// Validates an element and brings it to normal form.
    pub fn check(&self, x: &[i64]) -> Result<Elem> {
        match self {
            GroupHandle::Finite(f) => match x {
                [i] if *i >= 0 && (*i as usize) < f.table.order() => Ok(vec![*i]),
                _ => Err(Error::Input(format!("{x:?} is not an element of {}", f.name))),
            },
            _ => {
                let p = self.pc().expect("polycyclic");
                let e = NilElement::from_exponents(x.to_vec());
                p.check_len(&e)?;
                Ok(p.normalize(&e).into_exponents())
            }
        }
    }

    pub fn mul(&self, a: &[i64], b: &[i64]) -> Elem {
        match self {
            GroupHandle::Finite(f) => vec![f.table.mul(a[0] as usize, b[0] as usize) as i64],
            _ => {
                let p = self.pc().expect("polycyclic");
                p.multiply(&nil(a), &nil(b)).into_exponents()
            }
        }
    }

    pub fn inv(&self, a: &[i64]) -> Elem {
        match self {
            GroupHandle::Finite(f) => vec![f.table.inv(a[0] as usize) as i64],
            _ => self.pc().expect("polycyclic").invert(&nil(a)).into_exponents(),
        }
    }

    pub fn pow(&self, a: &[i64], k: i64) -> Elem {
        match self {
            GroupHandle::Finite(f) => vec![f.table.pow(a[0] as usize, k) as i64],
            _ => self.pc().expect("polycyclic").power(&nil(a), k).into_exponents(),
        }
    }

    /// `g^-1 a g`.
    pub fn conj(&self, a: &[i64], g: &[i64]) -> Elem {
        self.mul(&self.mul(&self.inv(g), a), g)
    }

    /// `ad_g(a) = g a g^-1`.
    pub fn ad(&self, g: &[i64], a: &[i64]) -> Elem {
        self.mul(&self.mul(g, a), &self.inv(g))
    }

    pub fn is_identity(&self, a: &[i64]) -> bool {
        a.iter().all(|&x| x == 0)
    }

    /// A word in the generating tuple representing `x`.
    pub fn word(&self, x: &[i64]) -> Vec<(usize, i64)> {
        match self {
            GroupHandle::Finite(f) => f.words[x[0] as usize].clone(),
            _ => x.iter().enumerate().filter(|(_, &e)| e != 0).map(|(i, &e)| (i, e)).collect(),
        }
    }

    pub fn eval_word(&self, word: &[(usize, i64)], images: &[Elem]) -> Elem {
        word.iter().fold(self.identity(), |acc, &(g, e)| self.mul(&acc, &self.pow(&images[g], e)))
    }

    pub fn is_finite(&self) -> bool {
        match self {
            GroupHandle::Finite(_) => true,
            _ => self.pc().expect("polycyclic").is_finite(),
        }
    }

    pub fn order(&self) -> Option<u128> {
        match self {
            GroupHandle::Finite(f) => Some(f.table.order() as u128),
            _ => self.pc().expect("polycyclic").order(),
        }
    }

    /// Number of infinite cyclic factors in a polycyclic series.
    pub fn hirsch_length(&self) -> usize {
        match self {
            GroupHandle::Finite(_) => 0,
            _ => self.pc().expect("polycyclic").relative_orders().iter().filter(|o| o.is_none()).count(),
        }
    }

    pub fn elements(&self, cap: usize) -> Result<Vec<Elem>> {
        match self {
            GroupHandle::Finite(f) => {
                if f.table.order() > cap {
                    return Err(Error::cap("group elements", f.table.order(), cap));
                }
                Ok((0..f.table.order()).map(|i| vec![i as i64]).collect())
            }
            _ => {
                let p = self.pc().expect("polycyclic");
                let order = p.order().ok_or(Error::IndexInfinite)?;
                if order > cap as u128 {
                    return Err(Error::cap("group elements", order, cap));
                }
                let mut out = vec![Vec::new()];
                for i in 0..p.len() {
                    let m = p.relative_order(i).expect("finite");
                    out = out.into_iter().flat_map(|v: Vec<i64>| (0..m).map(move |e| [v.clone(), vec![e]].concat())).collect();
                }
                Ok(out)
            }
        }
    }

    /// Defining relators as words in the generating tuple.
    pub fn relators(&self) -> Vec<Vec<(usize, i64)>> {
        match self {
            GroupHandle::Finite(f) => {
                let mut out = Vec::new();
                for x in 0..f.table.order() {
                    for (k, &g) in f.gens.iter().enumerate() {
                        let y = f.table.mul(x, g);
                        let mut w = f.words[x].clone();
                        w.push((k, 1));
                        w.extend(f.words[y].iter().rev().map(|&(h, e)| (h, -e)));
                        if !cancels(&w) {
                            out.push(w);
                        }
                    }
                }
                out
            }
            _ => pc_relators(self.pc().expect("polycyclic")),
        }
    }

    /// The abelianization, from the exponent-sum matrix of the relators.
    pub fn abelianization(&self) -> AbelianModule {
        abelianize(self.ngens(), &self.relators())
    }
}

fn abelian_name(m: &AbelianModule) -> String {
    let mut parts = Vec::new();
    if m.free_rank > 0 {
        parts.push(if m.free_rank == 1 { "Z".to_string() } else { format!("Z^{}", m.free_rank) });
    }
    parts.extend(m.invariant_factors.iter().map(|d| format!("Z/{d}")));
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("+")
    }
}

fn nil(x: &[i64]) -> NilElement {
    NilElement::from_exponents(x.to_vec())
}

fn cancels(w: &[(usize, i64)]) -> bool {
    let mut stack: Vec<(usize, i64)> = Vec::new();
    for &(g, e) in w {
        match stack.last_mut() {
            Some((h, f)) if *h == g => {
                *f += e;
                if *f == 0 {
                    stack.pop();
                }
            }
            _ if e != 0 => stack.push((g, e)),
            _ => {}
        }
    }
    stack.is_empty()
}

fn inverse_word(w: &[(usize, i64)]) -> Vec<(usize, i64)> {
    w.iter().rev().map(|&(g, e)| (g, -e)).collect()
}

fn pc_relators(p: &PcPresentation) -> Vec<Vec<(usize, i64)>> {
    let n = p.len();
    let mut out = Vec::new();
    let mut conj_given = HashSet::new();
    for rel in p.relations() {
        let rhs = inverse_word(&rel.word);
        let mut w = match rel.kind {
            RelationKind::Pow => vec![(rel.i, p.relative_order(rel.i).expect("power relation on a finite generator"))],
            RelationKind::Conj => {
                conj_given.insert((rel.i, rel.j));
                vec![(rel.i, -1), (rel.j, 1), (rel.i, 1)]
            }
            RelationKind::ConjInv => vec![(rel.i, 1), (rel.j, 1), (rel.i, -1)],
        };
        w.extend(rhs);
        out.push(w);
    }
    for i in 0..n {
        if let Some(m) = p.relative_order(i) {
            if p.power_relation(i).is_identity() {
                out.push(vec![(i, m)]);
            }
        }
        for j in i + 1..n {
            if !conj_given.contains(&(i, j)) {
                out.push(vec![(i, -1), (j, -1), (i, 1), (j, 1)]);
            }
        }
    }
    out
}

/// `Z^n` modulo the exponent sums of the relators, in canonical form.
pub fn abelianize(n: usize, relators: &[Vec<(usize, i64)>]) -> AbelianModule {
    let rows: Vec<Vec<BigInt>> = relators
        .iter()
        .map(|w| {
            let mut r = vec![BigInt::from(0); n];
            for &(g, e) in w {
                r[g] += e;
            }
            r
        })
        .collect();
    let m = if rows.is_empty() { IntMatrix::zeros(1, n) } else { IntMatrix::from_rows(n, &rows) };
    AbelianPresentation::from_relations(n, &m).module
}

/// A homomorphism between handles, stored by the images of the source generating tuple.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroupMap {
    pub images: Vec<Elem>,
}

impl GroupMap {
    pub fn new(images: Vec<Elem>) -> Self {
        GroupMap { images }
    }

    pub fn identity(g: &GroupHandle) -> Self {
        GroupMap { images: g.generators() }
    }

    pub fn apply(&self, source: &GroupHandle, target: &GroupHandle, x: &[i64]) -> Elem {
        target.eval_word(&source.word(x), &self.images)
    }

    /// `other ∘ self`, where `self: a -> b` and `other: b -> c`.
    pub fn then(&self, b: &GroupHandle, c: &GroupHandle, other: &GroupMap) -> GroupMap {
        GroupMap { images: self.images.iter().map(|y| other.apply(b, c, y)).collect() }
    }

    /// Checks shape, membership of the images and every defining relator of the source.
    pub fn check_hom(&self, source: &GroupHandle, target: &GroupHandle) -> Result<()> {
        if self.images.len() != source.ngens() {
            return Err(Error::Dimension(format!(
                "{} images for {} generators of {}",
                self.images.len(),
                source.ngens(),
                source.name()
            )));
        }
        let images: Vec<Elem> = self.images.iter().map(|y| target.check(y)).collect::<Result<_>>()?;
        if let (Some(s), Some(t)) = (source.pc(), target.pc()) {
            GroupHom::from_images(s.clone(), t.clone(), images.iter().map(|y| nil(y)).collect())?;
            return Ok(());
        }
        for r in source.relators() {
            if !target.is_identity(&target.eval_word(&r, &images)) {
                return Err(Error::RelationViolated(format!("a relator of {} is not sent to the identity", source.name())));
            }
        }
        Ok(())
    }

    fn pc_hom(&self, source: &GroupHandle, target: &GroupHandle) -> Option<GroupHom> {
        let (s, t) = (source.pc()?, target.pc()?);
        GroupHom::from_images(s.clone(), t.clone(), self.images.iter().map(|y| nil(y)).collect()).ok()
    }

    /// Injectivity, exact for polycyclic pairs and by enumeration for finite sources.
    pub fn is_injective(&self, source: &GroupHandle, target: &GroupHandle) -> Result<bool> {
        if let Some(h) = self.pc_hom(source, target) {
            return Ok(h.is_injective());
        }
        if !source.is_finite() {
            return Ok(false);
        }
        let mut seen = HashSet::new();
        for x in source.elements(ELEMENT_CAP)? {
            if !seen.insert(self.apply(source, target, &x)) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn is_surjective(&self, source: &GroupHandle, target: &GroupHandle) -> Result<bool> {
        if let Some(h) = self.pc_hom(source, target) {
            return Ok(h.is_surjective());
        }
        if !target.is_finite() {
            return Ok(false);
        }
        let image: HashSet<Elem> = if source.is_finite() {
            source.elements(ELEMENT_CAP)?.iter().map(|x| self.apply(source, target, x)).collect()
        } else {
            closure(target, &self.images, ELEMENT_CAP)?
        };
        Ok(image.len() as u128 == target.order().expect("finite"))
    }

    pub fn is_isomorphism(&self, source: &GroupHandle, target: &GroupHandle) -> Result<bool> {
        Ok(self.is_injective(source, target)? && self.is_surjective(source, target)?)
    }

    /// Some `x` with `self(x) = y`, assuming `self` is injective.
    pub fn preimage(&self, source: &GroupHandle, target: &GroupHandle, y: &[i64]) -> Result<Option<Elem>> {
        if let Some(h) = self.pc_hom(source, target) {
            return Ok(h.preimage(&nil(y)).map(NilElement::into_exponents));
        }
        if !source.is_finite() {
            return Err(Error::Input(format!("map from {} is not injective", source.name())));
        }
        let y = target.check(y)?;
        Ok(source.elements(ELEMENT_CAP)?.into_iter().find(|x| self.apply(source, target, x) == y))
    }
}

/// The subgroup of a finite group generated by `gens`.
pub fn closure(g: &GroupHandle, gens: &[Elem], cap: usize) -> Result<HashSet<Elem>> {
    let mut seen: HashSet<Elem> = HashSet::from([g.identity()]);
    let mut queue = VecDeque::from([g.identity()]);
    while let Some(x) = queue.pop_front() {
        for s in gens {
            let y = g.mul(&x, s);
            if seen.insert(y.clone()) {
                if seen.len() > cap {
                    return Err(Error::cap("subgroup closure", seen.len(), cap));
                }
                queue.push_back(y);
            }
        }
    }
    Ok(seen)
}

/// Outcome of looking for an isomorphism between two vertex groups.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IsoSearch {
    Found(GroupMap),
    NotIsomorphic(String),
    Unknown(String),
}

/// Invariants compared before any search: kind-free order, Hirsch length and abelianization.
pub fn invariant_mismatch(a: &GroupHandle, b: &GroupHandle) -> Option<String> {
    if a.order() != b.order() {
        return Some(format!("orders differ: {:?} vs {:?}", a.order(), b.order()));
    }
    if a.hirsch_length() != b.hirsch_length() {
        return Some(format!("Hirsch lengths differ: {} vs {}", a.hirsch_length(), b.hirsch_length()));
    }
    let (x, y) = (a.abelianization(), b.abelianization());
    if x != y {
        return Some(format!("abelianizations differ: {x:?} vs {y:?}"));
    }
    None
}

/// Looks for an isomorphism `a -> b`: identity on equal data, exhaustive on small tables, and by
/// a bounded image search otherwise.
pub fn find_isomorphism(a: &GroupHandle, b: &GroupHandle, radius: i64) -> IsoSearch {
    if let Some(reason) = invariant_mismatch(a, b) {
        return IsoSearch::NotIsomorphic(reason);
    }
    match (a, b) {
        (GroupHandle::Abelian { .. }, GroupHandle::Abelian { .. }) => return IsoSearch::Found(GroupMap::identity(a)),
        (GroupHandle::Nilpotent(p), GroupHandle::Nilpotent(q)) if same_presentation(p, q) => {
            return IsoSearch::Found(GroupMap::identity(a))
        }
        (GroupHandle::Finite(f), GroupHandle::Finite(g)) if f.table == g.table => return IsoSearch::Found(GroupMap::identity(a)),
        _ => {}
    }
    let candidates: Vec<Elem> = if b.is_finite() {
        match b.elements(ELEMENT_CAP) {
            Ok(v) => v,
            Err(e) => return IsoSearch::Unknown(e.to_string()),
        }
    } else {
        box_elements(b.pc().expect("infinite groups are polycyclic").len(), radius)
    };
    let n = a.ngens();
    let space = (candidates.len() as f64).powi(n as i32);
    if space > ISO_SEARCH_CAP as f64 {
        return IsoSearch::Unknown(format!("isomorphism search space {space:.0} exceeds {ISO_SEARCH_CAP}"));
    }
    let mut images: Vec<Elem> = Vec::with_capacity(n);
    if let Some(m) = search_images(a, b, &candidates, &mut images) {
        return IsoSearch::Found(m);
    }
    if b.is_finite() {
        IsoSearch::NotIsomorphic("no generator images extend to an isomorphism".into())
    } else {
        IsoSearch::Unknown(format!("no isomorphism with image exponents in [-{radius}, {radius}]"))
    }
}

fn search_images(a: &GroupHandle, b: &GroupHandle, candidates: &[Elem], images: &mut Vec<Elem>) -> Option<GroupMap> {
    if images.len() == a.ngens() {
        let m = GroupMap::new(images.clone());
        return match m.check_hom(a, b) {
            Ok(()) if m.is_isomorphism(a, b).unwrap_or(false) => Some(m),
            _ => None,
        };
    }
    for c in candidates {
        images.push(c.clone());
        if let Some(m) = search_images(a, b, candidates, images) {
            return Some(m);
        }
        images.pop();
    }
    None
}

/// Exponent vectors in `[-r, r]^n`, by increasing total size.
pub(crate) fn box_elements(n: usize, r: i64) -> Vec<Elem> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out.into_iter().flat_map(|v: Vec<i64>| (-r..=r).map(move |e| [v.clone(), vec![e]].concat())).collect();
    }
    out.sort_by_key(|v| v.iter().map(|x| x.abs()).sum::<i64>());
    out
}

pub(crate) fn same_presentation(p: &PcPresentation, q: &PcPresentation) -> bool {
    p.relative_orders() == q.relative_orders() && p.relations() == q.relations()
}

/// Drops repeated items, keeping first occurrences in order.
pub(crate) fn dedupe<T: Clone + Eq + std::hash::Hash>(items: Vec<T>) -> Vec<T> {
    let mut seen = HashSet::new();
    items.into_iter().filter(|x| seen.insert(x.clone())).collect()
}
