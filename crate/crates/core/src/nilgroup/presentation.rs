use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::NilElement;
use crate::error::{Error, Result};

/// Which defining relation a [`Relation`] supplies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RelationKind {
    /// `g_j ^ g_i = word`
    Conj,
    /// `g_j ^ (g_i^-1) = word`
    ConjInv,
    /// `g_i ^ order(g_i) = word`
    Pow,
}

/// A defining relation with its right-hand side as a word of `(generator, exponent)` syllables.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Relation {
    pub kind: RelationKind,
    /// The conjugating generator (or the powered one for `Pow`).
    pub i: usize,
    /// The conjugated generator; equal to `i` for `Pow`.
    pub j: usize,
    pub word: Vec<(usize, i64)>,
}

impl Relation {
    pub fn conj(j: usize, i: usize, word: Vec<(usize, i64)>) -> Self {
        Relation { kind: RelationKind::Conj, i, j, word }
    }

    pub fn conj_inv(j: usize, i: usize, word: Vec<(usize, i64)>) -> Self {
        Relation { kind: RelationKind::ConjInv, i, j, word }
    }

    pub fn pow(i: usize, word: Vec<(usize, i64)>) -> Self {
        Relation { kind: RelationKind::Pow, i, j: i, word }
    }
}

/// Consistent polycyclic presentation of a finitely generated nilpotent group.
///
/// Every conjugation relation has the shape `g_j ^ g_i = g_j * w` with `w` in
/// `g_{j+1}, ..., g_n`, and every power relation lands in `g_{i+1}, ..., g_n`,
/// so the defining series is central.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PcPresentation {
    pub(crate) name: String,
    pub(crate) names: Vec<String>,
    /// Relative orders, 0 for infinite.
    pub(crate) orders: Vec<i64>,
    pub(crate) conj: Vec<Vec<NilElement>>,
    pub(crate) conj_inv: Vec<Vec<NilElement>>,
    pub(crate) pow: Vec<NilElement>,
    pub(crate) commute: Vec<Vec<bool>>,
    pub(crate) explicit_inv: Vec<Vec<bool>>,
}

impl PcPresentation {
    /// Builds and consistency-checks a presentation. Missing conjugation relations
    /// mean the generators commute; missing power relations mean `g_i^m = 1`.
    pub fn from_relations(name: &str, gens: Vec<(String, Option<u64>)>, relations: &[Relation]) -> Result<Self> {
        let n = gens.len();
        let mut seen = HashSet::new();
        let mut names = Vec::with_capacity(n);
        let mut orders = Vec::with_capacity(n);
        for (g, o) in gens {
            if g.is_empty() || !seen.insert(g.clone()) {
                return Err(Error::InvalidPresentation(format!("duplicate or empty generator name '{g}'")));
            }
            let o = match o {
                None => 0,
                Some(m) if m >= 2 && m <= i64::MAX as u64 => m as i64,
                Some(m) => return Err(Error::InvalidPresentation(format!("relative order {m} of '{g}' must be at least 2"))),
            };
            names.push(g);
            orders.push(o);
        }
        let ident = NilElement::identity(n);
        let mut p = PcPresentation {
            name: name.to_string(),
            names,
            orders,
            conj: (0..n).map(|_| (0..n).map(|j| NilElement::generator(n, j)).collect()).collect(),
            conj_inv: (0..n).map(|_| (0..n).map(|j| NilElement::generator(n, j)).collect()).collect(),
            pow: vec![ident; n],
            commute: vec![vec![true; n]; n],
            explicit_inv: vec![vec![false; n]; n],
        };

        let mut by_i: Vec<Vec<&Relation>> = vec![Vec::new(); n];
        let mut keys = HashSet::new();
        for r in relations {
            if r.i >= n || r.j >= n || r.word.iter().any(|&(g, _)| g >= n) {
                return Err(Error::InvalidPresentation("relation refers to an unknown generator".into()));
            }
            match r.kind {
                RelationKind::Pow if p.orders[r.i] == 0 => {
                    return Err(Error::InvalidPresentation(format!(
                        "power relation for '{}' which has infinite order",
                        p.names[r.i]
                    )));
                }
                RelationKind::Conj | RelationKind::ConjInv if r.i >= r.j => {
                    return Err(Error::InvalidPresentation(format!(
                        "conjugation relation {} ^ {} must conjugate a later generator by an earlier one",
                        p.names[r.j], p.names[r.i]
                    )));
                }
                _ => {}
            }
            if !keys.insert((r.kind, r.i, r.j)) {
                return Err(Error::InvalidPresentation(format!(
                    "duplicate relation for {} and {}",
                    p.names[r.j], p.names[r.i]
                )));
            }
            by_i[r.i].push(r);
        }

        for i in (0..n).rev() {
            for r in &by_i[i] {
                let w = p.collect(&r.word);
                match r.kind {
                    RelationKind::Pow => {
                        if w.depth() <= i {
                            return Err(Error::InvalidPresentation(format!(
                                "power relation of '{}' must only involve later generators",
                                p.names[i]
                            )));
                        }
                        p.pow[i] = w;
                    }
                    RelationKind::Conj | RelationKind::ConjInv => {
                        let j = r.j;
                        if w.depth() != j || w[j] != 1 {
                            return Err(Error::InvalidPresentation(format!(
                                "conjugate of '{}' by '{}' must be '{}' times later generators",
                                p.names[j], p.names[i], p.names[j]
                            )));
                        }
                        if r.kind == RelationKind::Conj {
                            p.commute[i][j] = w == NilElement::generator(n, j);
                            p.conj[i][j] = w;
                        } else {
                            p.conj_inv[i][j] = w;
                            p.explicit_inv[i][j] = true;
                        }
                    }
                }
            }
            for j in i + 1..n {
                if p.explicit_inv[i][j] {
                    continue;
                }
                let inv = p.derive_conj_inv(i, j);
                p.conj_inv[i][j] = inv;
            }
            for j in i + 1..n {
                let back = p.conj_by_gen_power(&p.conj_inv[i][j], i, 1);
                if back != NilElement::generator(n, j) {
                    return Err(Error::Inconsistent(j, i, i));
                }
            }
        }
        p.check_consistency()?;
        Ok(p)
    }

    /// `y` with `y ^ g_i = g_j`, found coordinate by coordinate.
    fn derive_conj_inv(&self, i: usize, j: usize) -> NilElement {
        let n = self.len();
        let mut y = NilElement::generator(n, j);
        for l in j + 1..n {
            let f = self.conj_by_gen_power(&y, i, 1);
            let a = f[l];
            if a != 0 {
                y = self.multiply(&y, &NilElement::generator_power(n, l, -a));
            }
        }
        y
    }

    /// Free abelian times finite cyclic: `Z^free ⊕ Z/t1 ⊕ ...`.
    pub fn abelian(name: &str, free_rank: usize, torsion: &[u64]) -> Result<Self> {
        let mut gens = Vec::new();
        for i in 0..free_rank {
            gens.push((format!("a{}", i + 1), None));
        }
        for (k, &t) in torsion.iter().enumerate() {
            gens.push((format!("t{}", k + 1), Some(t)));
        }
        Self::from_relations(name, gens, &[])
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn gen_names(&self) -> &[String] {
        &self.names
    }

    pub fn gen_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|g| g == name)
    }

    /// Relative order of generator `i`, `None` when infinite.
    pub fn relative_order(&self, i: usize) -> Option<i64> {
        (self.orders[i] != 0).then_some(self.orders[i])
    }

    pub fn relative_orders(&self) -> Vec<Option<i64>> {
        (0..self.len()).map(|i| self.relative_order(i)).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.orders.iter().all(|&o| o != 0)
    }

    /// Group order for finite groups.
    pub fn order(&self) -> Option<u128> {
        if !self.is_finite() {
            return None;
        }
        self.orders.iter().try_fold(1u128, |acc, &o| acc.checked_mul(o as u128))
    }

    /// `g_j ^ g_i` for `i < j`.
    pub fn conj_relation(&self, j: usize, i: usize) -> &NilElement {
        &self.conj[i][j]
    }

    /// `g_j ^ (g_i^-1)` for `i < j`.
    pub fn conj_inv_relation(&self, j: usize, i: usize) -> &NilElement {
        &self.conj_inv[i][j]
    }

    pub fn power_relation(&self, i: usize) -> &NilElement {
        &self.pow[i]
    }

    pub fn has_explicit_inverse(&self, j: usize, i: usize) -> bool {
        self.explicit_inv[i][j]
    }

    pub fn identity(&self) -> NilElement {
        NilElement::identity(self.len())
    }

    pub fn generator(&self, i: usize) -> NilElement {
        NilElement::generator(self.len(), i)
    }

    pub fn generators(&self) -> Vec<NilElement> {
        (0..self.len()).map(|i| self.generator(i)).collect()
    }

    pub fn is_abelian(&self) -> bool {
        self.commute.iter().all(|row| row.iter().all(|&c| c))
    }

    /// Renames the presentation.
    pub fn with_name(mut self, name: &str) -> Self {
        self.name = name.to_string();
        self
    }

    /// Defining relations as words, in a canonical order.
    pub fn relations(&self) -> Vec<Relation> {
        let n = self.len();
        let mut out = Vec::new();
        for i in 0..n {
            if self.orders[i] != 0 && !self.pow[i].is_identity() {
                out.push(Relation::pow(i, self.word_of(&self.pow[i])));
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                if !self.commute[i][j] {
                    out.push(Relation::conj(j, i, self.word_of(&self.conj[i][j])));
                }
                if self.explicit_inv[i][j] {
                    out.push(Relation::conj_inv(j, i, self.word_of(&self.conj_inv[i][j])));
                }
            }
        }
        out
    }

    pub fn word_of(&self, e: &NilElement) -> Vec<(usize, i64)> {
        e.exponents().iter().enumerate().filter(|(_, &x)| x != 0).map(|(i, &x)| (i, x)).collect()
    }

    /// Human-readable normal form, e.g. `x y^-1 z^2`; the identity prints as `1`.
    pub fn format(&self, e: &NilElement) -> String {
        let parts: Vec<String> = self
            .word_of(e)
            .into_iter()
            .map(|(i, x)| if x == 1 { self.names[i].clone() } else { format!("{}^{}", self.names[i], x) })
            .collect();
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join(" ")
        }
    }

    pub fn check_len(&self, e: &NilElement) -> Result<()> {
        if e.len() == self.len() {
            Ok(())
        } else {
            Err(Error::ParentMismatch)
        }
    }

    /// Reduces finite coordinates of raw exponents through the power relations.
    pub fn normalize(&self, e: &NilElement) -> NilElement {
        let w = self.word_of(e);
        self.collect(&w)
    }
}
