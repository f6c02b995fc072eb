use std::collections::HashMap;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use super::{NilElement, PcPresentation, Relation};
use crate::error::{Error, Result};

/// Subgroup given by an induced polycyclic sequence in Hermite form: leading
/// positions strictly increase, leading exponents are positive and divide the
/// relative order, and entries above later leads are reduced.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Subgroup {
    gens: Vec<NilElement>,
}

impl Subgroup {
    pub fn generators(&self) -> &[NilElement] {
        &self.gens
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    /// Leading `(position, exponent)` of each generator.
    pub fn leads(&self) -> Vec<(usize, i64)> {
        self.gens.iter().map(|g| g.leading().expect("nontrivial induced generator")).collect()
    }

    fn entry_at(&self, p: usize) -> Option<&NilElement> {
        self.gens.iter().find(|g| g.depth() == p)
    }
}

fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    let e = a.extended_gcd(&b);
    (e.gcd, e.x, e.y)
}

/// Coset space data of a normal subgroup: the quotient presentation and coordinate maps.
#[derive(Clone, Debug)]
pub struct Quotient {
    pub presentation: PcPresentation,
    pub kernel: Subgroup,
    /// Positions of the parent generators that survive in the quotient.
    pub positions: Vec<usize>,
}

impl Quotient {
    /// Image of a parent element, given its canonical coset representative.
    fn coords_of_rep(&self, rep: &NilElement) -> NilElement {
        NilElement::from_exponents(self.positions.iter().map(|&p| rep[p]).collect())
    }

    pub fn project(&self, parent: &PcPresentation, x: &NilElement) -> NilElement {
        let rep = parent.reduce_mod(&self.kernel, x);
        self.coords_of_rep(&rep)
    }

    /// The canonical parent representative of a quotient element.
    pub fn lift(&self, parent_len: usize, q: &NilElement) -> NilElement {
        let mut e = NilElement::identity(parent_len);
        for (k, &p) in self.positions.iter().enumerate() {
            e.exps_mut()[p] = q[k];
        }
        e
    }
}

impl PcPresentation {
    pub fn whole_group(&self) -> Subgroup {
        Subgroup { gens: self.generators() }
    }

    pub fn trivial_subgroup(&self) -> Subgroup {
        Subgroup { gens: Vec::new() }
    }

    /// Subgroup generated by `gens`.
    pub fn subgroup(&self, gens: &[NilElement]) -> Subgroup {
        let mut table: Vec<Option<NilElement>> = vec![None; self.len()];
        self.close_into(&mut table, gens.to_vec());
        self.canonical_subgroup(table)
    }

    pub fn subgroup_join(&self, a: &Subgroup, b: &Subgroup) -> Subgroup {
        let mut gens = a.gens.clone();
        gens.extend(b.gens.iter().cloned());
        self.subgroup(&gens)
    }

    fn close_into(&self, table: &mut [Option<NilElement>], init: Vec<NilElement>) {
        let mut queue = init;
        while let Some(mut x) = queue.pop() {
            while let Some((p, e)) = x.leading() {
                match table[p].clone() {
                    None => {
                        let r = self.orders[p];
                        if r != 0 {
                            let (g, c, _) = ext_gcd(e, r);
                            if g != e {
                                x = self.power(&x, c);
                            }
                            queue.push(self.power(&x, r / g));
                        } else if e < 0 {
                            x = self.invert(&x);
                        }
                        self.push_products(table, &x, &mut queue);
                        table[p] = Some(x);
                        break;
                    }
                    Some(t) => {
                        let b = t[p];
                        if e % b == 0 {
                            x = self.multiply(&x, &self.power(&t, -(e / b)));
                            continue;
                        }
                        let (g, s, u) = ext_gcd(e, b);
                        let mut fresh = self.multiply(&self.power(&x, s), &self.power(&t, u));
                        if fresh[p] < 0 {
                            fresh = self.invert(&fresh);
                        }
                        debug_assert_eq!(fresh[p], g.abs());
                        let r = self.orders[p];
                        if r != 0 {
                            queue.push(self.power(&fresh, r / fresh[p]));
                        }
                        self.push_products(table, &fresh, &mut queue);
                        table[p] = Some(fresh);
                        queue.push(t);
                        queue.push(x);
                        break;
                    }
                }
            }
        }
    }

    fn push_products(&self, table: &[Option<NilElement>], x: &NilElement, queue: &mut Vec<NilElement>) {
        for t in table.iter().flatten() {
            queue.push(self.commutator(x, t));
            let ti = self.invert(t);
            queue.push(self.commutator(x, &ti));
            let xi = self.invert(x);
            queue.push(self.commutator(&xi, t));
        }
    }

    fn canonical_subgroup(&self, table: Vec<Option<NilElement>>) -> Subgroup {
        let mut gens: Vec<NilElement> = table.into_iter().flatten().collect();
        for i in (0..gens.len()).rev() {
            for l in i + 1..gens.len() {
                let (p, b) = gens[l].leading().expect("nontrivial");
                let q = Integer::div_floor(&gens[i][p], &b);
                if q != 0 {
                    let t = self.power(&gens[l], -q);
                    gens[i] = self.multiply(&gens[i], &t);
                }
            }
        }
        Subgroup { gens }
    }

    /// Canonical representative of the left coset `x * sub`.
    pub fn reduce_mod(&self, sub: &Subgroup, x: &NilElement) -> NilElement {
        let mut x = x.clone();
        for g in &sub.gens {
            let (p, b) = g.leading().expect("nontrivial");
            let q = Integer::div_floor(&x[p], &b);
            if q != 0 {
                x = self.multiply(&x, &self.power(g, -q));
            }
        }
        x
    }

    pub fn contains(&self, sub: &Subgroup, x: &NilElement) -> bool {
        self.reduce_mod(sub, x).is_identity()
    }

    pub fn is_subgroup_of(&self, a: &Subgroup, b: &Subgroup) -> bool {
        a.gens.iter().all(|g| self.contains(b, g))
    }

    /// `[G : sub]`, `None` when infinite.
    pub fn index(&self, sub: &Subgroup) -> Option<u128> {
        let mut idx: u128 = 1;
        for p in 0..self.len() {
            let f = match (sub.entry_at(p), self.orders[p]) {
                (Some(g), _) => g[p] as u128,
                (None, 0) => return None,
                (None, r) => r as u128,
            };
            idx = idx.checked_mul(f)?;
        }
        Some(idx)
    }

    /// `[b : a]` for `a <= b`, `None` when infinite.
    pub fn relative_index(&self, a: &Subgroup, b: &Subgroup) -> Option<u128> {
        let mut idx: u128 = 1;
        for p in 0..self.len() {
            let la = a.entry_at(p).map(|g| g[p]);
            let lb = b.entry_at(p).map(|g| g[p]);
            let f = match (la, lb) {
                (Some(x), Some(y)) => (x / y) as u128,
                (None, Some(y)) => {
                    if self.orders[p] == 0 {
                        return None;
                    }
                    (self.orders[p] / y) as u128
                }
                (None, None) => 1,
                (Some(_), None) => panic!("relative_index: a is not contained in b"),
            };
            idx = idx.checked_mul(f)?;
        }
        Some(idx)
    }

    pub fn is_normal(&self, sub: &Subgroup) -> bool {
        sub.gens
            .iter()
            .all(|s| (0..self.len()).all(|i| self.contains(sub, &self.commutator(s, &self.generator(i)))))
    }

    pub fn normal_closure(&self, gens: &[NilElement]) -> Subgroup {
        let mut s = self.subgroup(gens);
        loop {
            let mut extra = Vec::new();
            for g in &s.gens {
                for i in 0..self.len() {
                    let c = self.commutator(g, &self.generator(i));
                    if !self.contains(&s, &c) {
                        extra.push(c);
                    }
                }
            }
            if extra.is_empty() {
                return s;
            }
            extra.extend(s.gens.iter().cloned());
            s = self.subgroup(&extra);
        }
    }

    /// `[a, b]` as a subgroup: generated by commutators of generators, closed normally
    /// when both inputs are normal.
    pub fn commutator_subgroup(&self, a: &Subgroup, b: &Subgroup) -> Subgroup {
        let mut gens = Vec::new();
        for x in &a.gens {
            for y in &b.gens {
                gens.push(self.commutator(x, y));
            }
        }
        self.normal_closure(&gens)
    }

    /// Canonical left coset representatives of a finite-index subgroup.
    pub fn coset_representatives(&self, sub: &Subgroup, cap: usize) -> Result<Vec<NilElement>> {
        let idx = self.index(sub).ok_or(Error::IndexInfinite)?;
        if idx > cap as u128 {
            return Err(Error::cap("coset representatives", idx, cap));
        }
        let ranges: Vec<i64> = (0..self.len())
            .map(|p| match sub.entry_at(p) {
                Some(g) => g[p],
                None => self.orders[p],
            })
            .collect();
        let mut out = Vec::with_capacity(idx as usize);
        let mut cur = vec![0i64; self.len()];
        for _ in 0..idx {
            out.push(NilElement::from_exponents(cur.clone()));
            for p in (0..cur.len()).rev() {
                cur[p] += 1;
                if cur[p] < ranges[p] {
                    break;
                }
                cur[p] = 0;
            }
        }
        Ok(out)
    }

    /// `a ∩ b`, requiring `a` to have finite index (Schreier generators of the stabilizer).
    pub fn intersection(&self, a: &Subgroup, b: &Subgroup, cap: usize) -> Result<Subgroup> {
        let idx = self.index(a).ok_or(Error::IndexInfinite)?;
        if idx > cap as u128 {
            return Err(Error::cap("intersection orbit", idx, cap));
        }
        let mut transversal: HashMap<NilElement, NilElement> = HashMap::new();
        let start = self.identity();
        transversal.insert(self.reduce_mod(a, &start), start.clone());
        let mut frontier = vec![start];
        let mut schreier = Vec::new();
        while let Some(tau) = frontier.pop() {
            for y in &b.gens {
                let moved = self.multiply(y, &tau);
                let key = self.reduce_mod(a, &moved);
                match transversal.get(&key) {
                    Some(t) => {
                        let s = self.multiply(&self.invert(t), &moved);
                        if !s.is_identity() {
                            schreier.push(s);
                        }
                    }
                    None => {
                        transversal.insert(key, moved.clone());
                        frontier.push(moved);
                    }
                }
            }
        }
        Ok(self.subgroup(&schreier))
    }

    /// Quotient by a normal subgroup as a polycyclic presentation.
    pub fn quotient(&self, kernel: &Subgroup) -> Result<Quotient> {
        if !self.is_normal(kernel) {
            return Err(Error::NotNormal);
        }
        let mut positions = Vec::new();
        let mut gens = Vec::new();
        for p in 0..self.len() {
            let lead = kernel.entry_at(p).map(|g| g[p]);
            match (lead, self.orders[p]) {
                (Some(1), _) => {}
                (Some(b), _) => {
                    positions.push(p);
                    gens.push((self.names[p].clone(), Some(b as u64)));
                }
                (None, 0) => {
                    positions.push(p);
                    gens.push((self.names[p].clone(), None));
                }
                (None, r) => {
                    positions.push(p);
                    gens.push((self.names[p].clone(), Some(r as u64)));
                }
            }
        }
        let proto = Quotient {
            presentation: PcPresentation::abelian("tmp", 0, &[]).expect("empty presentation"),
            kernel: kernel.clone(),
            positions: positions.clone(),
        };
        let word = |x: &NilElement| -> Vec<(usize, i64)> {
            let q = proto.project(self, x);
            q.exponents().iter().enumerate().filter(|(_, &e)| e != 0).map(|(k, &e)| (k, e)).collect()
        };
        let mut rels = Vec::new();
        for (qi, &pi) in positions.iter().enumerate() {
            if let Some(ord) = gens[qi].1 {
                let w = word(&self.power(&self.generator(pi), ord as i64));
                if !w.is_empty() {
                    rels.push(Relation::pow(qi, w));
                }
            }
            for (qj, &pj) in positions.iter().enumerate().skip(qi + 1) {
                let c = self.conjugate(&self.generator(pj), &self.generator(pi));
                let w = word(&c);
                if w != vec![(qj, 1)] {
                    rels.push(Relation::conj(qj, qi, w));
                }
            }
        }
        let name = format!("{}_quotient", self.name);
        let presentation = PcPresentation::from_relations(&name, gens, &rels)?;
        Ok(Quotient { presentation, kernel: kernel.clone(), positions })
    }
}
