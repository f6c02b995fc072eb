use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{NilElement, PcPresentation};
use crate::error::{Error, Result};

/// Default cap on the order of groups handled by automorphism enumeration.
pub const DEFAULT_AUT_CAP: usize = 512;

/// Finite group given by its multiplication table. Element 0 is the identity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteGroupTable {
    order: usize,
    mult: Vec<u32>,
    inv: Vec<u32>,
    labels: Vec<String>,
}

/// A table built from a finite polycyclic presentation, with the element list.
#[derive(Clone, Debug)]
pub struct PcTable {
    pub table: FiniteGroupTable,
    pub elements: Vec<NilElement>,
    index: HashMap<NilElement, usize>,
}

impl PcTable {
    pub fn index_of(&self, x: &NilElement) -> usize {
        self.index[x]
    }
}

impl FiniteGroupTable {
    /// Validates a table: identity at 0, Latin square, inverses, associativity (Light's test on generators).
    pub fn from_rows(rows: Vec<Vec<usize>>, labels: Option<Vec<String>>) -> Result<Self> {
        let k = rows.len();
        if k == 0 || rows.iter().any(|r| r.len() != k || r.iter().any(|&x| x >= k)) {
            return Err(Error::Input("multiplication table must be a square table of element indices".into()));
        }
        let mut mult = Vec::with_capacity(k * k);
        for r in &rows {
            mult.extend(r.iter().map(|&x| x as u32));
        }
        let labels = labels.unwrap_or_else(|| (0..k).map(|i| format!("e{i}")).collect());
        if labels.len() != k {
            return Err(Error::Input("label count does not match the table".into()));
        }
        let mut t = FiniteGroupTable { order: k, mult, inv: vec![0; k], labels };
        for a in 0..k {
            if t.mul(0, a) != a || t.mul(a, 0) != a {
                return Err(Error::Input("element 0 is not the identity".into()));
            }
            let mut seen = vec![false; k];
            for b in 0..k {
                seen[t.mul(a, b)] = true;
            }
            if seen.iter().any(|s| !s) {
                return Err(Error::Input("table is not a Latin square".into()));
            }
        }
        for a in 0..k {
            t.inv[a] = (0..k).find(|&b| t.mul(a, b) == 0).expect("Latin square has inverses") as u32;
        }
        for g in t.generating_set() {
            for a in 0..k {
                for b in 0..k {
                    if t.mul(t.mul(a, g), b) != t.mul(a, t.mul(g, b)) {
                        return Err(Error::Input("table is not associative".into()));
                    }
                }
            }
        }
        Ok(t)
    }

    pub fn cyclic(n: usize) -> Self {
        let rows: Vec<Vec<usize>> = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        let labels = (0..n).map(|i| i.to_string()).collect();
        Self::from_rows(rows, Some(labels)).expect("cyclic group table")
    }

    pub fn from_pc(p: &PcPresentation, cap: usize) -> Result<PcTable> {
        let order = p.order().ok_or(Error::IndexInfinite)?;
        if order > cap as u128 {
            return Err(Error::cap("group table", order, cap));
        }
        let elements = p.coset_representatives(&p.trivial_subgroup(), cap)?;
        let index: HashMap<NilElement, usize> = elements.iter().cloned().enumerate().map(|(i, e)| (e, i)).collect();
        let k = elements.len();
        let mut mult = Vec::with_capacity(k * k);
        for a in &elements {
            for b in &elements {
                mult.push(index[&p.multiply(a, b)] as u32);
            }
        }
        let mut inv = vec![0u32; k];
        for (i, a) in elements.iter().enumerate() {
            inv[i] = index[&p.invert(a)] as u32;
        }
        let labels = elements.iter().map(|e| p.format(e)).collect();
        Ok(PcTable { table: FiniteGroupTable { order: k, mult, inv, labels }, elements, index })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn identity(&self) -> usize {
        0
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mult[a * self.order + b] as usize
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inv[a] as usize
    }

    /// `g^-1 a g`.
    pub fn conj(&self, a: usize, g: usize) -> usize {
        self.mul(self.mul(self.inv(g), a), g)
    }

    pub fn pow(&self, a: usize, k: i64) -> usize {
        let base = if k < 0 { self.inv(a) } else { a };
        let mut acc = 0;
        for _ in 0..k.unsigned_abs() {
            acc = self.mul(acc, base);
        }
        acc
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != 0 {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|a| (0..a).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    /// Elements of the subgroup generated by `gens`.
    pub fn closure(&self, gens: &[usize]) -> Vec<usize> {
        let mut seen = vec![false; self.order];
        seen[0] = true;
        let mut stack = vec![0usize];
        let mut out = vec![0usize];
        while let Some(x) = stack.pop() {
            for &g in gens {
                let y = self.mul(x, g);
                if !seen[y] {
                    seen[y] = true;
                    out.push(y);
                    stack.push(y);
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// A small generating set, picked greedily by decreasing element order.
    pub fn generating_set(&self) -> Vec<usize> {
        let mut by_order: Vec<usize> = (1..self.order).collect();
        by_order.sort_by_key(|&a| (std::cmp::Reverse(self.element_order(a)), a));
        let mut gens = Vec::new();
        let mut span = vec![0usize];
        for a in by_order {
            if span.len() == self.order {
                break;
            }
            if span.binary_search(&a).is_err() {
                gens.push(a);
                span = self.closure(&gens);
            }
        }
        gens
    }

    pub fn center(&self) -> Vec<usize> {
        (0..self.order).filter(|&a| (0..self.order).all(|b| self.mul(a, b) == self.mul(b, a))).collect()
    }

    /// Extends generator images to a full map, if it defines an injective homomorphism.
    pub fn extend_hom(&self, gens: &[usize], images: &[usize]) -> Option<Vec<usize>> {
        let mut map: Vec<Option<usize>> = vec![None; self.order];
        let mut used = vec![false; self.order];
        map[0] = Some(0);
        used[0] = true;
        let mut stack = vec![0usize];
        while let Some(x) = stack.pop() {
            let fx = map[x].expect("visited");
            for (&g, &h) in gens.iter().zip(images) {
                let y = self.mul(x, g);
                let fy = self.mul(fx, h);
                match map[y] {
                    Some(v) if v != fy => return None,
                    Some(_) => {}
                    None => {
                        if used[fy] {
                            return None;
                        }
                        used[fy] = true;
                        map[y] = Some(fy);
                        stack.push(y);
                    }
                }
            }
        }
        map.into_iter().collect()
    }

    /// All automorphisms, as permutations of element indices, in lexicographic order of generator images.
    pub fn automorphisms(&self, cap: usize) -> Result<Vec<Vec<usize>>> {
        if self.order > cap {
            return Err(Error::cap("automorphism enumeration", self.order, cap));
        }
        let gens = self.generating_set();
        let orders: Vec<usize> = (0..self.order).map(|a| self.element_order(a)).collect();
        let cands: Vec<Vec<usize>> =
            gens.iter().map(|&g| (0..self.order).filter(|&a| orders[a] == orders[g]).collect()).collect();
        let mut out = Vec::new();
        let mut chosen = Vec::with_capacity(gens.len());
        self.aut_search(&gens, &cands, &mut chosen, &mut out);
        Ok(out)
    }

    fn aut_search(&self, gens: &[usize], cands: &[Vec<usize>], chosen: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let t = chosen.len();
        if t == gens.len() {
            if let Some(m) = self.extend_hom(gens, chosen) {
                out.push(m);
            }
            return;
        }
        for &c in &cands[t] {
            chosen.push(c);
            // prune with the partial map on the subgroup generated so far
            let ok = self.partial_ok(&gens[..=t], chosen);
            if ok {
                self.aut_search(gens, cands, chosen, out);
            }
            chosen.pop();
        }
    }

    fn partial_ok(&self, gens: &[usize], images: &[usize]) -> bool {
        let mut map: HashMap<usize, usize> = HashMap::new();
        let mut used: HashMap<usize, usize> = HashMap::new();
        map.insert(0, 0);
        used.insert(0, 0);
        let mut stack = vec![0usize];
        while let Some(x) = stack.pop() {
            let fx = map[&x];
            for (&g, &h) in gens.iter().zip(images) {
                let y = self.mul(x, g);
                let fy = self.mul(fx, h);
                match map.get(&y) {
                    Some(&v) if v != fy => return false,
                    Some(_) => {}
                    None => {
                        if used.contains_key(&fy) {
                            return false;
                        }
                        used.insert(fy, y);
                        map.insert(y, fy);
                        stack.push(y);
                    }
                }
            }
        }
        true
    }

    /// `g` with `perm(x) = g^-1 x g` for all `x`, if any.
    pub fn inner_conjugator(&self, perm: &[usize]) -> Option<usize> {
        let gens = self.generating_set();
        (0..self.order).find(|&g| gens.iter().all(|&x| self.conj(x, g) == perm[x]))
    }

    pub fn inner_automorphism(&self, g: usize) -> Vec<usize> {
        (0..self.order).map(|x| self.conj(x, g)).collect()
    }
}

/// `Out(F)`: all automorphisms with the inner ones flagged.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OutFinite {
    pub automorphisms: Vec<Vec<usize>>,
    pub inner: Vec<bool>,
    pub aut_order: usize,
    pub inn_order: usize,
    pub out_order: usize,
}

pub fn out_finite(f: &FiniteGroupTable, cap: usize) -> Result<OutFinite> {
    let automorphisms = f.automorphisms(cap)?;
    let inn_order = f.order() / f.center().len();
    let mut inner_set = std::collections::HashSet::new();
    for g in 0..f.order() {
        inner_set.insert(f.inner_automorphism(g));
    }
    let inner = automorphisms.iter().map(|a| inner_set.contains(a)).collect();
    let aut_order = automorphisms.len();
    Ok(OutFinite { automorphisms, inner, aut_order, inn_order, out_order: aut_order / inn_order })
}
