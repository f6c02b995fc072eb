use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use super::qmatrix::{q, QMatrix};
use super::unitri::UniTriangular;
use crate::error::{Error, Result};
use crate::nilgroup::{NilElement, PcPresentation};

/// Default cap on the nilpotency class accepted by [`embed_matrix_group`].
pub const DEFAULT_CLASS_CAP: usize = 3;
/// Radius of the exponent box on which injectivity is certified.
pub const CERTIFIED_RADIUS: i64 = 3;
const BOX_BUDGET: usize = 16_807;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Construction {
    /// Exact embeddings for free abelian and Heisenberg-type groups.
    Curated,
    /// Right translation on polynomial functions in the exponent coordinates.
    Translation,
}

#[derive(Clone, Debug)]
enum Decoder {
    FirstRow,
    Heisenberg(i64),
    Linear { row: Vec<BigRational>, cols: Vec<Vec<BigRational>> },
}

/// A faithful unitriangular integer representation of a torsion-free nilpotent group.
#[derive(Clone, Debug, Serialize)]
pub struct Embedding {
    pub dim: usize,
    pub construction: Construction,
    pub images: Vec<UniTriangular>,
    /// Radius of the exponent box on which injectivity was certified.
    pub certified_radius: i64,
    #[serde(skip)]
    decoder: Decoder,
}

impl Embedding {
    pub fn apply(&self, x: &NilElement) -> UniTriangular {
        let mut acc = UniTriangular::identity(self.dim);
        for (i, &e) in x.exponents().iter().enumerate() {
            if e != 0 {
                acc = acc.mul(&self.images[i].pow(e));
            }
        }
        acc
    }

    pub fn apply_word(&self, word: &[(usize, i64)]) -> UniTriangular {
        let mut acc = UniTriangular::identity(self.dim);
        for &(g, e) in word {
            acc = acc.mul(&self.images[g].pow(e));
        }
        acc
    }

    /// Recovers exponents from a matrix in the image.
    pub fn decode(&self, m: &UniTriangular) -> Option<Vec<i64>> {
        let a = m.matrix();
        let to_i64 = |x: BigRational| -> Option<i64> {
            if x.is_integer() {
                i64::try_from(x.to_integer()).ok()
            } else {
                None
            }
        };
        match &self.decoder {
            Decoder::FirstRow => (1..self.dim).map(|j| to_i64(a[(0, j)].clone())).collect(),
            Decoder::Heisenberg(k) => {
                let xa = to_i64(&a[(0, 1)] / q(*k))?;
                let yb = to_i64(a[(1, 2)].clone())?;
                let zc = to_i64(&a[(0, 2)] - &a[(0, 1)] * &a[(1, 2)])?;
                Some(vec![xa, yb, zc])
            }
            Decoder::Linear { row, cols } => cols
                .iter()
                .map(|c| {
                    let mut acc = BigRational::zero();
                    for (i, r) in row.iter().enumerate() {
                        if r.is_zero() {
                            continue;
                        }
                        for (j, cj) in c.iter().enumerate() {
                            if !cj.is_zero() {
                                acc += r * &a[(i, j)] * cj;
                            }
                        }
                    }
                    to_i64(acc)
                })
                .collect(),
        }
    }

    /// Checks every defining relation of `p` on the images.
    pub fn verify_relations(&self, p: &PcPresentation) -> Result<()> {
        for i in 0..p.len() {
            if let Some(r) = p.relative_order(i) {
                let lhs = self.images[i].pow(r);
                if lhs != self.apply(p.power_relation(i)) {
                    return Err(Error::RelationViolated(format!("power relation of {}", p.gen_names()[i])));
                }
            }
            for j in i + 1..p.len() {
                let lhs = self.images[i].inverse().mul(&self.images[j]).mul(&self.images[i]);
                if lhs != self.apply(p.conj_relation(j, i)) {
                    let names = p.gen_names();
                    return Err(Error::RelationViolated(format!("{} ^ {}", names[j], names[i])));
                }
            }
        }
        Ok(())
    }

    /// Checks that `decode(apply(x)) = x` on every normal form with exponents in `[-r, r]`.
    pub fn certify_box(&self, n: usize, r: i64) -> bool {
        let powers: Vec<Vec<UniTriangular>> =
            self.images.iter().map(|g| (-r..=r).map(|e| g.pow(e)).collect()).collect();
        let mut exps = vec![0i64; n];
        self.certify_rec(0, r, &powers, &UniTriangular::identity(self.dim), &mut exps)
    }

    fn certify_rec(&self, i: usize, r: i64, powers: &[Vec<UniTriangular>], prefix: &UniTriangular, exps: &mut Vec<i64>) -> bool {
        if i == exps.len() {
            return self.decode(prefix).as_deref() == Some(exps.as_slice());
        }
        for e in -r..=r {
            exps[i] = e;
            let next = prefix.mul(&powers[i][(e + r) as usize]);
            if !self.certify_rec(i + 1, r, powers, &next, exps) {
                return false;
            }
        }
        exps[i] = 0;
        true
    }
}

/// Embeds a torsion-free nilpotent group into `Tr1(d, Z)`.
pub fn embed_matrix_group(p: &PcPresentation, class_cap: usize) -> Result<Embedding> {
    if !p.torsion_subgroup().is_trivial() {
        return Err(Error::TorsionPresent);
    }
    if (0..p.len()).any(|i| p.relative_order(i).is_some()) {
        return Err(Error::EmbeddingUnavailable(
            "torsion-free presentation with finite relative orders; rewrite it with infinite relative orders".into(),
        ));
    }
    let class = p.nilpotency_class();
    if class > class_cap {
        return Err(Error::ClassCap(class, class_cap));
    }
    let emb = match curated(p) {
        Some(e) => e,
        None => translation(p, false)?,
    };
    emb.verify_relations(p)
        .map_err(|e| Error::EmbeddingUnavailable(format!("constructed images fail a relation: {e}")))?;
    certify(emb, p.len())
}

fn certify(mut emb: Embedding, n: usize) -> Result<Embedding> {
    let mut r = CERTIFIED_RADIUS;
    while r > 0 && (2 * r as usize + 1).checked_pow(n as u32).map_or(true, |c| c > BOX_BUDGET) {
        r -= 1;
    }
    if !emb.certify_box(n, r) {
        return Err(Error::EmbeddingUnavailable("injectivity check failed on the exponent box".into()));
    }
    emb.certified_radius = r;
    Ok(emb)
}

fn curated(p: &PcPresentation) -> Option<Embedding> {
    let n = p.len();
    if p.is_abelian() {
        let images = (0..n).map(|k| UniTriangular::elementary(n + 1, 0, k + 1, q(1))).collect();
        return Some(Embedding {
            dim: n + 1,
            construction: Construction::Curated,
            images,
            certified_radius: 0,
            decoder: Decoder::FirstRow,
        });
    }
    if n != 3 {
        return None;
    }
    let c = p.conj_relation(1, 0).exponents();
    let k = -c[2];
    if c[0] != 0 || c[1] != 1 || k == 0 {
        return None;
    }
    if !p.conj_relation(2, 0).exponents().eq(&[0, 0, 1]) || !p.conj_relation(2, 1).exponents().eq(&[0, 0, 1]) {
        return None;
    }
    let images = vec![
        UniTriangular::elementary(3, 0, 1, q(k)),
        UniTriangular::elementary(3, 1, 2, q(1)),
        UniTriangular::elementary(3, 0, 2, q(1)),
    ];
    Some(Embedding { dim: 3, construction: Construction::Curated, images, certified_radius: 0, decoder: Decoder::Heisenberg(k) })
}

/// Weight of each generator: commutator tails of `g_i, g_j` only involve
/// generators of weight at least `w_i + w_j`.
fn presentation_weights(p: &PcPresentation) -> Vec<usize> {
    let n = p.len();
    let mut w = vec![1usize; n];
    for l in 0..n {
        for i in 0..l {
            for j in i + 1..l {
                if p.conj_relation(j, i)[l] != 0 {
                    w[l] = w[l].max(w[i] + w[j]);
                }
            }
        }
    }
    w
}

/// Exponent vectors of weighted degree at most `d`, sorted by degree descending.
fn monomials(w: &[usize], d: usize) -> Vec<(usize, Vec<u32>)> {
    fn rec(i: usize, w: &[usize], left: usize, cur: &mut Vec<u32>, out: &mut Vec<(usize, Vec<u32>)>, deg: usize) {
        if i == w.len() {
            out.push((deg, cur.clone()));
            return;
        }
        let mut a = 0u32;
        while (a as usize) * w[i] <= left {
            cur.push(a);
            rec(i + 1, w, left - a as usize * w[i], cur, out, deg + a as usize * w[i]);
            cur.pop();
            a += 1;
        }
    }
    let mut out = Vec::new();
    rec(0, w, d, &mut Vec::new(), &mut out, 0);
    out.sort_by(|a, b| b.0.cmp(&a.0).then_with(|| a.1.cmp(&b.1)));
    out
}

fn eval_monomial(m: &[u32], x: &[i64]) -> BigRational {
    let mut acc = BigInt::one();
    for (&a, &v) in m.iter().zip(x) {
        if a > 0 {
            acc *= num_traits::pow(BigInt::from(v), a as usize);
        }
    }
    BigRational::from_integer(acc)
}

fn eval_poly(coeffs: &[BigRational], monos: &[(usize, Vec<u32>)], x: &[i64]) -> BigRational {
    let mut acc = BigRational::zero();
    for (c, (_, m)) in coeffs.iter().zip(monos) {
        if !c.is_zero() {
            acc += c * eval_monomial(m, x);
        }
    }
    acc
}

struct Echelon {
    rows: Vec<Vec<BigRational>>,
    pivots: Vec<usize>,
}

impl Echelon {
    /// Reduces `v` against the basis; returns the residual.
    fn reduce(&self, v: &[BigRational]) -> Vec<BigRational> {
        let mut v = v.to_vec();
        for (r, &p) in self.rows.iter().zip(&self.pivots) {
            if !v[p].is_zero() {
                let f = v[p].clone();
                for (x, y) in v.iter_mut().zip(r) {
                    *x -= &f * y;
                }
            }
        }
        v
    }

    /// Inserts a nonzero residual, keeping the basis fully reduced.
    fn insert(&mut self, mut v: Vec<BigRational>) {
        let p = v.iter().position(|x| !x.is_zero()).expect("nonzero residual");
        let inv = v[p].recip();
        for x in v.iter_mut() {
            *x *= &inv;
        }
        for r in self.rows.iter_mut() {
            if !r[p].is_zero() {
                let f = r[p].clone();
                for (x, y) in r.iter_mut().zip(&v) {
                    *x -= &f * y;
                }
            }
        }
        self.rows.push(v);
        self.pivots.push(p);
    }
}

fn translation(p: &PcPresentation, full: bool) -> Result<Embedding> {
    let n = p.len();
    let w = presentation_weights(p);
    let d = w.iter().copied().max().unwrap_or(1);
    let monos = monomials(&w, d);
    let size = monos.len();

    let vander_rows: Vec<Vec<BigRational>> = monos
        .iter()
        .map(|(_, pt)| {
            let x: Vec<i64> = pt.iter().map(|&a| a as i64).collect();
            monos.iter().map(|(_, m)| eval_monomial(m, &x)).collect()
        })
        .collect();
    let vinv = QMatrix::from_rows(vander_rows)?
        .inverse()
        .ok_or_else(|| Error::EmbeddingUnavailable("interpolation system is singular".into()))?;
    let points: Vec<NilElement> =
        monos.iter().map(|(_, pt)| NilElement::from_exponents(pt.iter().map(|&a| a as i64).collect())).collect();
    let shifted: Vec<Vec<Vec<i64>>> = (0..n)
        .map(|s| {
            let g = p.generator(s);
            points.iter().map(|x| p.multiply(x, &g).exponents().to_vec()).collect()
        })
        .collect();

    let translate = |f: &[BigRational], s: usize| -> Vec<BigRational> {
        let values: Vec<BigRational> = shifted[s].iter().map(|y| eval_poly(f, &monos, y)).collect();
        (0..size)
            .map(|i| {
                let mut acc = BigRational::zero();
                for (j, v) in values.iter().enumerate() {
                    if !v.is_zero() {
                        acc += &vinv[(i, j)] * v;
                    }
                }
                acc
            })
            .collect()
    };

    let unit = |idx: usize| -> Vec<BigRational> {
        let mut v = vec![BigRational::zero(); size];
        v[idx] = BigRational::one();
        v
    };
    let mono_index = |m: &[u32]| monos.iter().position(|(_, x)| x == m).expect("monomial present");
    let constant = mono_index(&vec![0; n]);
    let coordinate: Vec<usize> = (0..n)
        .map(|k| {
            let mut m = vec![0u32; n];
            m[k] = 1;
            mono_index(&m)
        })
        .collect();

    let mut ech = Echelon { rows: Vec::new(), pivots: Vec::new() };
    let mut queue: Vec<Vec<BigRational>> = if full {
        (0..size).rev().map(unit).collect()
    } else {
        let mut q = vec![unit(constant)];
        q.extend(coordinate.iter().map(|&c| unit(c)));
        q
    };
    while let Some(v) = queue.pop() {
        let r = ech.reduce(&v);
        if r.iter().all(Zero::is_zero) {
            continue;
        }
        ech.insert(r);
        for s in 0..n {
            queue.push(translate(&v, s));
        }
    }
    let mut order: Vec<usize> = (0..ech.rows.len()).collect();
    order.sort_by_key(|&i| (monos[ech.pivots[i]].0, ech.pivots[i]));
    let basis: Vec<&Vec<BigRational>> = order.iter().map(|&i| &ech.rows[i]).collect();
    let pivots: Vec<usize> = order.iter().map(|&i| ech.pivots[i]).collect();
    let m = basis.len();

    let coords = |v: &[BigRational]| -> Result<Vec<BigRational>> {
        let c: Vec<BigRational> = pivots.iter().map(|&p| v[p].clone()).collect();
        let mut back = vec![BigRational::zero(); size];
        for (k, b) in c.iter().zip(&basis) {
            for (x, y) in back.iter_mut().zip(b.iter()) {
                *x += k * y;
            }
        }
        if back != v {
            return Err(Error::EmbeddingUnavailable("translated function left the invariant span".into()));
        }
        Ok(c)
    };

    let mut mats = Vec::with_capacity(n);
    for s in 0..n {
        let mut mat = QMatrix::zeros(m, m);
        for (j, b) in basis.iter().enumerate() {
            let c = coords(&translate(b, s))?;
            for (i, x) in c.into_iter().enumerate() {
                mat[(i, j)] = x;
            }
        }
        mats.push(mat);
    }

    // diagonal conjugation clearing denominators
    let mut dg = vec![BigInt::one(); m];
    for i in (0..m).rev() {
        let mut l = BigInt::one();
        for mat in &mats {
            for j in i + 1..m {
                let x = &mat[(i, j)] / BigRational::from_integer(dg[j].clone());
                l = l.lcm(x.denom());
            }
        }
        dg[i] = l;
    }
    let images = mats
        .iter()
        .map(|mat| {
            let mut out = mat.clone();
            for i in 0..m {
                for j in 0..m {
                    if !out[(i, j)].is_zero() {
                        out[(i, j)] = &mat[(i, j)] * BigRational::new(dg[i].clone(), dg[j].clone());
                    }
                }
            }
            UniTriangular::new(out).map_err(|e| Error::EmbeddingUnavailable(format!("translation matrix: {e}")))
        })
        .collect::<Result<Vec<_>>>()?;

    let row: Vec<BigRational> =
        basis.iter().zip(&dg).map(|(b, di)| &b[constant] / BigRational::from_integer(di.clone())).collect();
    let cols: Vec<Vec<BigRational>> = coordinate
        .iter()
        .map(|&c| {
            let v = coords(&unit(c)).expect("coordinate functions lie in the span");
            v.into_iter().zip(&dg).map(|(x, di)| x * BigRational::from_integer(di.clone())).collect()
        })
        .collect();
    Ok(Embedding { dim: m, construction: Construction::Translation, images, certified_radius: 0, decoder: Decoder::Linear { row, cols } })
}

/// Forces the generic construction even when a curated embedding exists.
pub fn embed_by_translation(p: &PcPresentation) -> Result<Embedding> {
    if (0..p.len()).any(|i| p.relative_order(i).is_some()) {
        return Err(Error::EmbeddingUnavailable("finite relative orders".into()));
    }
    let emb = translation(p, false)?;
    emb.verify_relations(p)?;
    certify(emb, p.len())
}

/// Right translation on all polynomials of bounded weighted degree; this space is also
/// invariant under composition with automorphisms.
pub fn embed_full_translation(p: &PcPresentation) -> Result<Embedding> {
    if (0..p.len()).any(|i| p.relative_order(i).is_some()) {
        return Err(Error::EmbeddingUnavailable("finite relative orders".into()));
    }
    let emb = translation(p, true)?;
    emb.verify_relations(p)?;
    certify(emb, p.len())
}
