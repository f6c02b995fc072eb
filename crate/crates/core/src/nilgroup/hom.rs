use std::sync::Arc;

use super::{NilElement, PcPresentation, Relation, Subgroup};
use crate::error::{Error, Result};

/// Homomorphism between polycyclic presentations, stored by generator images.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupHom {
    pub source: Arc<PcPresentation>,
    pub target: Arc<PcPresentation>,
    pub images: Vec<NilElement>,
}

/// Direct product `target × source` with the tracked graph of a homomorphism.
struct Graph {
    product: PcPresentation,
    sub: Subgroup,
    split: usize,
}

pub(crate) fn direct_product(a: &PcPresentation, b: &PcPresentation) -> PcPresentation {
    let na = a.len();
    let mut gens: Vec<(String, Option<u64>)> = Vec::new();
    for i in 0..na {
        gens.push((format!("l_{}", a.names[i]), a.relative_order(i).map(|o| o as u64)));
    }
    for i in 0..b.len() {
        gens.push((format!("r_{}", b.names[i]), b.relative_order(i).map(|o| o as u64)));
    }
    let shift = |rel: Relation, off: usize| Relation {
        kind: rel.kind,
        i: rel.i + off,
        j: rel.j + off,
        word: rel.word.into_iter().map(|(g, e)| (g + off, e)).collect(),
    };
    let mut rels: Vec<Relation> = a.relations().into_iter().map(|r| shift(r, 0)).collect();
    rels.extend(b.relations().into_iter().map(|r| shift(r, na)));
    PcPresentation::from_relations(&format!("{}_x_{}", a.name, b.name), gens, &rels)
        .expect("direct product of consistent presentations")
}

fn concat(a: &NilElement, b: &NilElement) -> NilElement {
    let mut v = a.exponents().to_vec();
    v.extend_from_slice(b.exponents());
    NilElement::from_exponents(v)
}

impl GroupHom {
    /// Builds a homomorphism, verifying every defining relation of the source.
    pub fn from_images(source: Arc<PcPresentation>, target: Arc<PcPresentation>, images: Vec<NilElement>) -> Result<Self> {
        if images.len() != source.len() {
            return Err(Error::Dimension(format!(
                "{} images for {} generators",
                images.len(),
                source.len()
            )));
        }
        for im in &images {
            target.check_len(im)?;
        }
        let images: Vec<NilElement> = images.iter().map(|x| target.normalize(x)).collect();
        let h = GroupHom { source, target, images };
        h.check_relations()?;
        Ok(h)
    }

    fn check_relations(&self) -> Result<()> {
        let s = &*self.source;
        let t = &*self.target;
        for i in 0..s.len() {
            if let Some(r) = s.relative_order(i) {
                let lhs = t.power(&self.images[i], r);
                let rhs = self.apply(&s.pow[i]);
                if lhs != rhs {
                    return Err(Error::RelationViolated(format!(
                        "{}^{} = {}",
                        s.names[i],
                        r,
                        s.format(&s.pow[i])
                    )));
                }
            }
            for j in i + 1..s.len() {
                let lhs = t.conjugate(&self.images[j], &self.images[i]);
                let rhs = self.apply(&s.conj[i][j]);
                if lhs != rhs {
                    return Err(Error::RelationViolated(format!(
                        "{} ^ {} = {}",
                        s.names[j],
                        s.names[i],
                        s.format(&s.conj[i][j])
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn identity(p: Arc<PcPresentation>) -> Self {
        let images = p.generators();
        GroupHom { source: p.clone(), target: p, images }
    }

    pub fn apply(&self, x: &NilElement) -> NilElement {
        let t = &*self.target;
        let mut acc = t.identity();
        for (i, &e) in x.exponents().iter().enumerate() {
            if e != 0 {
                acc = t.multiply(&acc, &t.power(&self.images[i], e));
            }
        }
        acc
    }

    /// `self ∘ other` (apply `other` first).
    pub fn compose(&self, other: &GroupHom) -> Result<GroupHom> {
        if *other.target != *self.source {
            return Err(Error::ParentMismatch);
        }
        let images = other.images.iter().map(|x| self.apply(x)).collect();
        Ok(GroupHom { source: other.source.clone(), target: self.target.clone(), images })
    }

    fn graph(&self) -> Graph {
        let product = direct_product(&self.target, &self.source);
        let gens: Vec<NilElement> = (0..self.source.len())
            .map(|i| concat(&self.images[i], &self.source.generator(i)))
            .collect();
        let sub = product.subgroup(&gens);
        Graph { product, sub, split: self.target.len() }
    }

    pub fn kernel(&self) -> Subgroup {
        let g = self.graph();
        let gens: Vec<NilElement> = g
            .sub
            .generators()
            .iter()
            .filter(|x| x.depth() >= g.split)
            .map(|x| NilElement::from_exponents(x.exponents()[g.split..].to_vec()))
            .collect();
        self.source.subgroup(&gens)
    }

    pub fn image(&self) -> Subgroup {
        self.target.subgroup(&self.images)
    }

    pub fn is_injective(&self) -> bool {
        self.kernel().is_trivial()
    }

    pub fn is_surjective(&self) -> bool {
        self.target.index(&self.image()) == Some(1)
    }

    pub fn is_automorphism(&self) -> bool {
        *self.source == *self.target && self.is_surjective() && self.is_injective()
    }

    /// Some preimage of `y`, `None` if `y` is not in the image.
    pub fn preimage(&self, y: &NilElement) -> Option<NilElement> {
        let g = self.graph();
        let start = concat(y, &self.source.identity());
        let rem = g.product.reduce_mod(&g.sub, &start);
        if rem.exponents()[..g.split].iter().any(|&e| e != 0) {
            return None;
        }
        // rem = (y, 1) * h^-1 with h = (y, w) in the graph, so w = rem_right^-1
        let right = NilElement::from_exponents(rem.exponents()[g.split..].to_vec());
        Some(self.source.invert(&right))
    }

    pub fn inverse(&self) -> Result<GroupHom> {
        if !self.is_injective() || !self.is_surjective() {
            return Err(Error::Input("homomorphism is not bijective".into()));
        }
        let g = self.graph();
        let mut images = Vec::with_capacity(self.target.len());
        for i in 0..self.target.len() {
            let start = concat(&self.target.generator(i), &self.source.identity());
            let rem = g.product.reduce_mod(&g.sub, &start);
            let right = NilElement::from_exponents(rem.exponents()[g.split..].to_vec());
            images.push(self.source.invert(&right));
        }
        Ok(GroupHom { source: self.target.clone(), target: self.source.clone(), images })
    }

    /// Conjugator `c` with `self(x) = c^-1 x c`, for endomorphisms.
    pub fn inner_conjugator(&self) -> Option<NilElement> {
        if *self.source != *self.target {
            return None;
        }
        self.source.inner_conjugator(&self.images)
    }

    pub fn is_inner(&self) -> bool {
        self.inner_conjugator().is_some()
    }

    /// `x -> c^-1 x c`.
    pub fn inner(p: Arc<PcPresentation>, c: &NilElement) -> GroupHom {
        let images = p.generators().iter().map(|x| p.conjugate(x, c)).collect();
        GroupHom { source: p.clone(), target: p, images }
    }

    /// Induced map on `G/K -> H/L` where `self(K) <= L`.
    pub fn induced_on_quotients(
        &self,
        src_q: &super::Quotient,
        tgt_q: &super::Quotient,
    ) -> Result<GroupHom> {
        for k in src_q.kernel.generators() {
            if !self.target.contains(&tgt_q.kernel, &self.apply(k)) {
                return Err(Error::Input("kernel is not mapped into kernel".into()));
            }
        }
        let images = src_q
            .positions
            .iter()
            .map(|&p| tgt_q.project(&self.target, &self.images[p]))
            .collect();
        GroupHom::from_images(
            Arc::new(src_q.presentation.clone()),
            Arc::new(tgt_q.presentation.clone()),
            images,
        )
    }
}
