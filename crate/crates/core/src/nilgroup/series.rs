use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::{NilElement, PcPresentation, Subgroup};
use crate::error::{Error, Result};
use crate::zmod::{AbelianPresentation, IntMatrix};

/// Default cap on the size of enumerated finite quotients.
pub const DEFAULT_QUOTIENT_CAP: usize = 1_000_000;
/// Default cap on the index bound of the low-index search.
pub const DEFAULT_LOW_INDEX_CAP: usize = 6;

/// Ascending chain `1 = ν0 < ν1 < ... < νm = N`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CentralSeries {
    pub terms: Vec<Subgroup>,
}

impl CentralSeries {
    /// Number of steps, i.e. the nilpotency class.
    pub fn length(&self) -> usize {
        self.terms.len() - 1
    }

    pub fn term(&self, i: usize) -> &Subgroup {
        &self.terms[i.min(self.terms.len() - 1)]
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorsionData {
    pub tau: Subgroup,
    pub elements: Vec<NilElement>,
    /// `G^m ∩ τ = 1`.
    pub m: i64,
    pub exponent: i64,
}

impl PcPresentation {
    pub fn upper_central_series(&self) -> CentralSeries {
        let whole = self.whole_group();
        let mut terms = vec![self.trivial_subgroup()];
        loop {
            let cur = terms.last().expect("nonempty").clone();
            if cur == whole {
                break;
            }
            let q = self.quotient(&cur).expect("series terms are normal");
            let z = q.presentation.center();
            let mut gens: Vec<NilElement> = z.generators().iter().map(|g| q.lift(self.len(), g)).collect();
            gens.extend(cur.generators().iter().cloned());
            let next = self.subgroup(&gens);
            assert!(next != cur, "presentation does not define a nilpotent group");
            terms.push(next);
        }
        CentralSeries { terms }
    }

    pub fn lower_central_series(&self) -> Vec<Subgroup> {
        let whole = self.whole_group();
        let mut terms = vec![whole.clone()];
        loop {
            let cur = terms.last().expect("nonempty").clone();
            if cur.is_trivial() {
                break;
            }
            let next = self.commutator_subgroup(&cur, &whole);
            assert!(next != cur, "presentation does not define a nilpotent group");
            terms.push(next);
        }
        terms
    }

    pub fn nilpotency_class(&self) -> usize {
        self.lower_central_series().len() - 1
    }

    /// Weight of each generator: the largest `k` with `g_i` in the `k`-th lower central term.
    pub fn weights(&self) -> Vec<usize> {
        let lcs = self.lower_central_series();
        (0..self.len())
            .map(|i| {
                let g = self.generator(i);
                lcs.iter().take_while(|t| self.contains(t, &g)).count()
            })
            .collect()
    }

    /// Coordinates of `x` in an abelian subgroup's induced generators.
    pub(crate) fn induced_coordinates(&self, sub: &Subgroup, x: &NilElement) -> Option<Vec<i64>> {
        let mut x = x.clone();
        let mut out = Vec::with_capacity(sub.len());
        for g in sub.generators() {
            let (p, b) = g.leading().expect("nontrivial");
            if x[p] % b != 0 {
                return None;
            }
            let k = x[p] / b;
            out.push(k);
            if k != 0 {
                x = self.multiply(&x, &self.power(g, -k));
            }
        }
        x.is_identity().then_some(out)
    }

    /// Presentation of an abelian subgroup on its induced generators.
    pub fn abelian_presentation_of(&self, sub: &Subgroup) -> AbelianPresentation {
        let gens = sub.generators();
        let s = gens.len();
        let mut rows = Vec::new();
        for (i, g) in gens.iter().enumerate() {
            let (p, b) = g.leading().expect("nontrivial");
            let r = self.orders[p];
            if r == 0 {
                continue;
            }
            let o = r / b;
            let w = self.power(g, o);
            let c = self.induced_coordinates(sub, &w).expect("power stays in the subgroup");
            let mut row: Vec<BigInt> = c.iter().map(|&k| BigInt::from(-k)).collect();
            row[i] += BigInt::from(o);
            rows.push(row);
        }
        AbelianPresentation::from_relations(s, &IntMatrix::from_rows(s, &rows))
    }

    /// Canonical coordinates of `x` in an abelian subgroup, `None` if `x` is outside it.
    pub fn abelian_coordinates(&self, sub: &Subgroup, pres: &AbelianPresentation, x: &NilElement) -> Option<Vec<BigInt>> {
        let c = self.induced_coordinates(sub, x)?;
        let c: Vec<BigInt> = c.into_iter().map(BigInt::from).collect();
        Some(pres.canon(&c))
    }

    /// The element of an abelian subgroup with the given canonical coordinates.
    pub fn abelian_element(&self, sub: &Subgroup, pres: &AbelianPresentation, y: &[BigInt]) -> NilElement {
        let x = pres.lift(y);
        let mut e = self.identity();
        for (g, k) in sub.generators().iter().zip(&x) {
            let k = k.to_i64().expect("coordinate fits");
            if k != 0 {
                e = self.multiply(&e, &self.power(g, k));
            }
        }
        e
    }

    /// Elements of finite order in an abelian subgroup.
    pub fn abelian_torsion(&self, sub: &Subgroup) -> Subgroup {
        let pres = self.abelian_presentation_of(sub);
        let module = &pres.module;
        let tgens: Vec<NilElement> =
            (module.free_rank..module.dim()).map(|q| self.abelian_element(sub, &pres, &module.unit(q))).collect();
        self.subgroup(&tgens)
    }

    /// The finite characteristic subgroup of elements of finite order.
    pub fn torsion_subgroup(&self) -> Subgroup {
        let mut t = self.trivial_subgroup();
        loop {
            let q = self.quotient(&t).expect("torsion subgroup is normal");
            let z = q.presentation.center();
            let zt = q.presentation.abelian_torsion(&z);
            if zt.is_trivial() {
                return t;
            }
            let mut gens: Vec<NilElement> = zt.generators().iter().map(|g| q.lift(self.len(), g)).collect();
            gens.extend(t.generators().iter().cloned());
            t = self.subgroup(&gens);
        }
    }

    /// All elements of a finite subgroup.
    pub fn subgroup_elements(&self, sub: &Subgroup, cap: usize) -> Result<Vec<NilElement>> {
        let orders: Vec<i64> = sub
            .generators()
            .iter()
            .map(|g| {
                let (p, b) = g.leading().expect("nontrivial");
                if self.orders[p] == 0 {
                    0
                } else {
                    self.orders[p] / b
                }
            })
            .collect();
        if orders.iter().any(|&o| o == 0) {
            return Err(Error::IndexInfinite);
        }
        let total = orders.iter().try_fold(1u128, |a, &o| a.checked_mul(o as u128)).unwrap_or(u128::MAX);
        if total > cap as u128 {
            return Err(Error::cap("subgroup elements", total, cap));
        }
        let mut out = vec![self.identity()];
        for (g, &o) in sub.generators().iter().zip(&orders).rev() {
            let mut next = Vec::with_capacity(out.len() * o as usize);
            let mut pw = self.identity();
            for _ in 0..o {
                for x in &out {
                    next.push(self.multiply(&pw, x));
                }
                pw = self.multiply(&pw, g);
            }
            out = next;
        }
        out.sort();
        Ok(out)
    }

    pub fn torsion_data(&self, cap: usize) -> Result<TorsionData> {
        let tau = self.torsion_subgroup();
        let elements = self.subgroup_elements(&tau, cap)?;
        let exponent = elements
            .iter()
            .map(|x| self.element_order(x).expect("torsion element"))
            .fold(1i64, |a, b| a.lcm(&b));
        if tau.is_trivial() {
            return Ok(TorsionData { tau, elements, m: 1, exponent });
        }
        for k in 1..=64i64 {
            let m = exponent * k;
            let v = self.verbal_power_subgroup(m, cap)?;
            if elements.iter().all(|x| x.is_identity() || !self.contains(&v, x)) {
                return Ok(TorsionData { tau, elements, m, exponent });
            }
        }
        Err(Error::BudgetExhausted("no exponent m found with G^m meeting the torsion trivially".into()))
    }

    /// Subgroup generated by all `k`-th powers.
    pub fn verbal_power_subgroup(&self, k: i64, cap: usize) -> Result<Subgroup> {
        if k <= 0 {
            return Err(Error::Input("power must be positive".into()));
        }
        if k == 1 {
            return Ok(self.whole_group());
        }
        let seeds: Vec<NilElement> = (0..self.len()).map(|i| self.power(&self.generator(i), k)).collect();
        let mut v = self.normal_closure(&seeds);
        loop {
            let reps = self.coset_representatives(&v, cap)?;
            let mut extra = Vec::new();
            for x in &reps {
                let y = self.power(x, k);
                if !self.contains(&v, &y) {
                    extra.push(y);
                }
            }
            if extra.is_empty() {
                return Ok(v);
            }
            extra.extend(v.generators().iter().cloned());
            v = self.normal_closure(&extra);
        }
    }

    /// All subgroups of index at most `d`, ordered by index then generators.
    pub fn low_index_subgroups(&self, d: usize, cap: usize) -> Result<Vec<Subgroup>> {
        if d > cap {
            return Err(Error::cap("low-index bound", d, cap));
        }
        let n = self.len();
        let mut out = Vec::new();
        let mut leads: Vec<Option<i64>> = vec![None; n];
        self.low_index_pivots(0, 1, d, &mut leads, &mut out);
        let mut keyed: Vec<(u128, Subgroup)> =
            out.into_iter().map(|s| (self.index(&s).expect("finite index"), s)).collect();
        keyed.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.generators().cmp(b.1.generators())));
        Ok(keyed.into_iter().map(|(_, s)| s).collect())
    }

    fn low_index_pivots(&self, p: usize, idx: usize, d: usize, leads: &mut Vec<Option<i64>>, out: &mut Vec<Subgroup>) {
        if p == self.len() {
            self.low_index_fill(leads, out);
            return;
        }
        let r = self.orders[p];
        if r != 0 && idx * (r as usize) <= d {
            leads[p] = None;
            self.low_index_pivots(p + 1, idx * r as usize, d, leads, out);
        }
        for b in 1..=d as i64 {
            if r != 0 && (r % b != 0 || b == r) {
                continue;
            }
            let f = b;
            if idx * (f as usize) > d {
                continue;
            }
            leads[p] = Some(b);
            self.low_index_pivots(p + 1, idx * f as usize, d, leads, out);
        }
        leads[p] = None;
    }

    fn low_index_fill(&self, leads: &[Option<i64>], out: &mut Vec<Subgroup>) {
        let n = self.len();
        // free slots: (row pivot, column q, range)
        let mut slots = Vec::new();
        for p in 0..n {
            if leads[p].is_none() {
                continue;
            }
            for q in p + 1..n {
                let range = leads[q].unwrap_or(self.orders[q]);
                if range > 1 {
                    slots.push((p, q, range));
                }
            }
        }
        let mut vals = vec![0i64; slots.len()];
        loop {
            let mut rows: Vec<Vec<i64>> = Vec::new();
            let mut row_of = vec![usize::MAX; n];
            for p in 0..n {
                if let Some(b) = leads[p] {
                    let mut r = vec![0i64; n];
                    r[p] = b;
                    row_of[p] = rows.len();
                    rows.push(r);
                }
            }
            for (k, &(p, q, _)) in slots.iter().enumerate() {
                rows[row_of[p]][q] = vals[k];
            }
            let gens: Vec<NilElement> = rows.into_iter().map(NilElement::from_exponents).collect();
            let sub = self.subgroup(&gens);
            if sub.generators() == gens.as_slice() {
                out.push(sub);
            }
            let mut k = 0;
            while k < slots.len() {
                vals[k] += 1;
                if vals[k] < slots[k].2 {
                    break;
                }
                vals[k] = 0;
                k += 1;
            }
            if k == slots.len() {
                break;
            }
        }
    }
}

pub fn quotient_cap_from_env() -> usize {
    std::env::var("NILCERT_QUOTIENT_CAP").ok().and_then(|s| s.parse().ok()).unwrap_or(DEFAULT_QUOTIENT_CAP)
}
