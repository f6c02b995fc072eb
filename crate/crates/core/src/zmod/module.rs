use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::{hnf_basis, integer_kernel, smith, IntMatrix};
use crate::error::{Error, Result};

/// `Z^s ⊕ Z/n1 ⊕ ... ⊕ Z/nt` with `n1 | n2 | ... | nt`, each `ni >= 2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AbelianModule {
    pub free_rank: usize,
    pub invariant_factors: Vec<BigInt>,
}

impl AbelianModule {
    pub fn new(free_rank: usize, invariant_factors: Vec<BigInt>) -> Result<Self> {
        for w in invariant_factors.windows(2) {
            if !w[1].is_multiple_of(&w[0]) {
                return Err(Error::Dimension(format!("invariant factors {} and {} do not divide", w[0], w[1])));
            }
        }
        if invariant_factors.iter().any(|n| *n < BigInt::from(2)) {
            return Err(Error::Dimension("invariant factors must be at least 2".into()));
        }
        Ok(AbelianModule { free_rank, invariant_factors })
    }

    pub fn free(n: usize) -> Self {
        AbelianModule { free_rank: n, invariant_factors: Vec::new() }
    }

    pub fn trivial() -> Self {
        Self::free(0)
    }

    /// Module presented by arbitrary cyclic orders (0 meaning infinite), put in canonical form.
    pub fn from_orders(orders: &[BigInt]) -> Self {
        let rel = IntMatrix::diagonal(orders);
        AbelianPresentation::from_relations(orders.len(), &rel).module
    }

    pub fn dim(&self) -> usize {
        self.free_rank + self.invariant_factors.len()
    }

    pub fn torsion_len(&self) -> usize {
        self.invariant_factors.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.dim() == 0
    }

    pub fn is_finite(&self) -> bool {
        self.free_rank == 0
    }

    pub fn order(&self) -> Option<BigInt> {
        self.is_finite().then(|| self.invariant_factors.iter().product())
    }

    pub fn torsion_order(&self) -> BigInt {
        self.invariant_factors.iter().product()
    }

    /// Exponent of the torsion subgroup (1 when torsion-free).
    pub fn torsion_exponent(&self) -> BigInt {
        self.invariant_factors.last().cloned().unwrap_or_else(BigInt::one)
    }

    /// Cyclic order of coordinate `i`, 0 for a free coordinate.
    pub fn coordinate_order(&self, i: usize) -> BigInt {
        if i < self.free_rank {
            BigInt::zero()
        } else {
            self.invariant_factors[i - self.free_rank].clone()
        }
    }

    pub fn zero(&self) -> Vec<BigInt> {
        vec![BigInt::zero(); self.dim()]
    }

    pub fn unit(&self, i: usize) -> Vec<BigInt> {
        let mut v = self.zero();
        v[i] = BigInt::one();
        v
    }

    pub fn reduce(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.dim(), "element length does not match module");
        v.iter()
            .enumerate()
            .map(|(i, e)| if i < self.free_rank { e.clone() } else { e.mod_floor(&self.invariant_factors[i - self.free_rank]) })
            .collect()
    }

    pub fn add(&self, a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
        let s: Vec<BigInt> = a.iter().zip(b).map(|(x, y)| x + y).collect();
        self.reduce(&s)
    }

    pub fn neg(&self, a: &[BigInt]) -> Vec<BigInt> {
        let s: Vec<BigInt> = a.iter().map(|x| -x).collect();
        self.reduce(&s)
    }

    pub fn scale(&self, k: &BigInt, a: &[BigInt]) -> Vec<BigInt> {
        let s: Vec<BigInt> = a.iter().map(|x| x * k).collect();
        self.reduce(&s)
    }

    pub fn is_zero_elem(&self, a: &[BigInt]) -> bool {
        self.reduce(a).iter().all(Zero::is_zero)
    }

    /// Order of an element, `None` for elements of infinite order.
    pub fn element_order(&self, a: &[BigInt]) -> Option<BigInt> {
        let a = self.reduce(a);
        if a[..self.free_rank].iter().any(|e| !e.is_zero()) {
            return None;
        }
        let mut o = BigInt::one();
        for (i, n) in self.invariant_factors.iter().enumerate() {
            let e = &a[self.free_rank + i];
            o = o.lcm(&(n / n.gcd(e)));
        }
        Some(o)
    }

    /// One row per torsion coordinate: `ni` at that coordinate.
    pub fn relation_matrix(&self) -> IntMatrix {
        let t = self.torsion_len();
        let mut r = IntMatrix::zeros(t, self.dim());
        for (i, n) in self.invariant_factors.iter().enumerate() {
            r[(i, self.free_rank + i)] = n.clone();
        }
        r
    }

    pub fn whole(&self) -> Submodule {
        Submodule::new(self.clone(), &IntMatrix::identity(self.dim()))
    }

    pub fn zero_submodule(&self) -> Submodule {
        Submodule::new(self.clone(), &IntMatrix::zeros(0, self.dim()))
    }

    pub fn torsion_submodule(&self) -> Submodule {
        let idx: Vec<usize> = (self.free_rank..self.dim()).collect();
        Submodule::new(self.clone(), &IntMatrix::identity(self.dim()).select_rows(&idx))
    }

    /// Enumerates all elements of a finite module in colexicographic order.
    pub fn elements(&self, cap: usize) -> Result<Vec<Vec<BigInt>>> {
        if !self.is_finite() {
            return Err(Error::IndexInfinite);
        }
        let bounds = self.invariant_factors.clone();
        box_enumerate(&bounds, cap, "module elements")
    }
}

impl fmt::Display for AbelianModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        if self.free_rank > 0 {
            parts.push(if self.free_rank == 1 { "Z".into() } else { format!("Z^{}", self.free_rank) });
        }
        for n in &self.invariant_factors {
            parts.push(format!("Z/{}", n));
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// All integer vectors `y` with `0 <= y_i < bounds_i`, first coordinate varying fastest.
pub(crate) fn box_enumerate(bounds: &[BigInt], cap: usize, what: &'static str) -> Result<Vec<Vec<BigInt>>> {
    let total: BigInt = bounds.iter().product();
    if total > BigInt::from(cap) {
        return Err(Error::cap(what, total.to_string(), cap));
    }
    let total = total.to_usize().unwrap_or(0);
    let mut out = Vec::with_capacity(total);
    let mut cur = vec![BigInt::zero(); bounds.len()];
    for _ in 0..total {
        out.push(cur.clone());
        for i in 0..cur.len() {
            cur[i] += 1;
            if cur[i] < bounds[i] {
                break;
            }
            cur[i] = BigInt::zero();
        }
    }
    Ok(out)
}

/// Change of coordinates from a presentation `Z^n / rowspace(relations)` to a canonical module.
///
/// Row vector `x` in the presentation maps to `x * to_canon` (then reduced);
/// a canonical element `y` lifts to `y * from_canon`.
#[derive(Clone, Debug)]
pub struct AbelianPresentation {
    pub module: AbelianModule,
    pub to_canon: IntMatrix,
    pub from_canon: IntMatrix,
}

impl AbelianPresentation {
    pub fn from_relations(n: usize, relations: &IntMatrix) -> Self {
        assert_eq!(relations.cols(), n, "relation width mismatch");
        let s = smith(relations);
        let diag = s.diagonal();
        let mut free = Vec::new();
        let mut tors = Vec::new();
        for j in 0..n {
            let d = diag.get(j).cloned().unwrap_or_else(BigInt::zero);
            if d.is_zero() {
                free.push(j);
            } else if !d.is_one() {
                tors.push((j, d));
            }
        }
        let mut cols = free.clone();
        cols.extend(tors.iter().map(|(j, _)| *j));
        let module = AbelianModule { free_rank: free.len(), invariant_factors: tors.into_iter().map(|(_, d)| d).collect() };
        let to_canon = s.v.select_cols(&cols);
        let from_canon = s.v_inv.select_rows(&cols);
        AbelianPresentation { module, to_canon, from_canon }
    }

    pub fn canon(&self, x: &[BigInt]) -> Vec<BigInt> {
        self.module.reduce(&self.to_canon.left_mul_vec(x))
    }

    pub fn lift(&self, y: &[BigInt]) -> Vec<BigInt> {
        self.from_canon.left_mul_vec(y)
    }
}

/// A submodule, stored as the Hermite basis of its generators together with the ambient relations.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Submodule {
    ambient: AbelianModule,
    basis: IntMatrix,
}

impl Submodule {
    /// Rows of `gens` are ambient elements.
    pub fn new(ambient: AbelianModule, gens: &IntMatrix) -> Self {
        assert_eq!(gens.cols(), ambient.dim(), "generator length does not match ambient");
        let mut m = gens.clone();
        let rel = ambient.relation_matrix();
        for i in 0..rel.rows() {
            m.push_row(rel.row(i));
        }
        let basis = hnf_basis(&m);
        Submodule { ambient, basis }
    }

    pub fn from_generators(ambient: AbelianModule, gens: &[Vec<BigInt>]) -> Self {
        let dim = ambient.dim();
        Self::new(ambient, &IntMatrix::from_rows(dim, gens))
    }

    pub fn ambient(&self) -> &AbelianModule {
        &self.ambient
    }

    /// Hermite basis of the lattice (including ambient relations).
    pub fn basis(&self) -> &IntMatrix {
        &self.basis
    }

    /// Generators reduced into the ambient, with zero rows dropped.
    pub fn generators(&self) -> Vec<Vec<BigInt>> {
        (0..self.basis.rows())
            .map(|i| self.ambient.reduce(self.basis.row(i)))
            .filter(|v| v.iter().any(|e| !e.is_zero()))
            .collect()
    }

    fn pivots(&self) -> Vec<usize> {
        (0..self.basis.rows())
            .map(|i| self.basis.row(i).iter().position(|e| !e.is_zero()).expect("nonzero basis row"))
            .collect()
    }

    /// Canonical representative of `v` modulo this submodule.
    pub fn reduce(&self, v: &[BigInt]) -> Vec<BigInt> {
        let mut w = v.to_vec();
        for (i, p) in self.pivots().into_iter().enumerate() {
            let q = w[p].div_floor(&self.basis[(i, p)]);
            if !q.is_zero() {
                for (j, x) in w.iter_mut().enumerate() {
                    *x -= &q * &self.basis[(i, j)];
                }
            }
        }
        w
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        self.reduce(v).iter().all(Zero::is_zero)
    }

    pub fn is_subset_of(&self, other: &Submodule) -> bool {
        (0..self.basis.rows()).all(|i| other.contains(self.basis.row(i)))
    }

    /// Coordinates of a lattice vector in this basis, `None` if it is not in the lattice.
    pub fn coordinates(&self, v: &[BigInt]) -> Option<Vec<BigInt>> {
        let mut w = v.to_vec();
        let mut c = Vec::with_capacity(self.basis.rows());
        for (i, p) in self.pivots().into_iter().enumerate() {
            let (q, r) = w[p].div_rem(&self.basis[(i, p)]);
            if !r.is_zero() {
                return None;
            }
            for (j, x) in w.iter_mut().enumerate() {
                *x -= &q * &self.basis[(i, j)];
            }
            c.push(q);
        }
        w.iter().all(Zero::is_zero).then_some(c)
    }

    /// Rank of the lattice (free rank of the ambient image plus torsion-carrying rank).
    pub fn lattice_rank(&self) -> usize {
        self.basis.rows()
    }

    /// Free rank of the submodule as an abstract group.
    pub fn rank(&self) -> usize {
        self.lattice_rank() - self.ambient.torsion_len()
    }

    /// The submodule as an abstract abelian group.
    pub fn structure(&self) -> AbelianModule {
        let r = self.basis.rows();
        let rel_rows: Vec<Vec<BigInt>> = (0..self.ambient.torsion_len())
            .map(|i| self.coordinates(&self.ambient.relation_matrix().row_vec(i)).expect("relation lies in lattice"))
            .collect();
        let rel = IntMatrix::from_rows(r, &rel_rows);
        AbelianPresentation::from_relations(r, &rel).module
    }

    pub fn sum(&self, other: &Submodule) -> Submodule {
        let mut m = self.basis.clone();
        for i in 0..other.basis.rows() {
            m.push_row(other.basis.row(i));
        }
        Submodule::new(self.ambient.clone(), &m)
    }

    pub fn intersection(&self, other: &Submodule) -> Submodule {
        // x * A = y * B  <=>  (x, -y) in the left kernel of [A; B]
        let a = &self.basis;
        let b = &other.basis;
        let mut stacked = a.clone();
        for i in 0..b.rows() {
            stacked.push_row(b.row(i));
        }
        let ker = super::left_kernel(&stacked);
        let gens: Vec<Vec<BigInt>> =
            ker.iter().map(|k| a.left_mul_vec(&k[..a.rows()])).collect();
        Submodule::new(self.ambient.clone(), &IntMatrix::from_rows(self.ambient.dim(), &gens))
    }

    /// Index `[sup : self]`.
    pub fn index_in(&self, sup: &Submodule) -> Result<BigInt> {
        let c = self.coordinates_in(sup)?;
        if c.rows() != c.cols() {
            return Err(Error::IndexInfinite);
        }
        let d = c.det().abs();
        if d.is_zero() {
            return Err(Error::IndexInfinite);
        }
        Ok(d)
    }

    fn coordinates_in(&self, sup: &Submodule) -> Result<IntMatrix> {
        if self.ambient != sup.ambient {
            return Err(Error::ParentMismatch);
        }
        let mut rows = Vec::with_capacity(self.basis.rows());
        for i in 0..self.basis.rows() {
            rows.push(sup.coordinates(self.basis.row(i)).ok_or(Error::NotInSubgroup(format!("{:?}", self.basis.row(i))))?);
        }
        Ok(IntMatrix::from_rows(sup.basis.rows(), &rows))
    }
}

impl PartialOrd for Submodule {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        if self == other {
            Some(Ordering::Equal)
        } else if self.is_subset_of(other) {
            Some(Ordering::Less)
        } else if other.is_subset_of(self) {
            Some(Ordering::Greater)
        } else {
            None
        }
    }
}

/// Smallest direct summand containing `s` and the ambient torsion.
pub fn isolator(s: &Submodule) -> Submodule {
    let amb = s.ambient();
    let f = amb.free_rank;
    let proj: Vec<Vec<BigInt>> = (0..s.basis().rows()).map(|i| s.basis().row(i)[..f].to_vec()).collect();
    let b = IntMatrix::from_rows(f, &proj);
    let orth = integer_kernel(&b);
    let sat = if orth.is_empty() {
        IntMatrix::identity(f).to_rows()
    } else {
        integer_kernel(&IntMatrix::from_rows(f, &orth))
    };
    let mut gens: Vec<Vec<BigInt>> = sat
        .into_iter()
        .map(|mut r| {
            r.resize(amb.dim(), BigInt::zero());
            r
        })
        .collect();
    for i in f..amb.dim() {
        gens.push(amb.unit(i));
    }
    Submodule::from_generators(amb.clone(), &gens)
}

/// Representatives of `sup / sub`, reduced in the ambient and in colexicographic order of coset coordinates.
pub fn coset_representatives(sub: &Submodule, sup: &Submodule, cap: usize) -> Result<Vec<Vec<BigInt>>> {
    if !sub.is_subset_of(sup) {
        return Err(Error::NotInSubgroup("sub is not contained in sup".into()));
    }
    let c = sub.coordinates_in(sup)?;
    if c.rows() != c.cols() || c.det().is_zero() {
        return Err(Error::IndexInfinite);
    }
    let h = hnf_basis(&c);
    let bounds: Vec<BigInt> = (0..h.rows()).map(|i| h[(i, i)].clone()).collect();
    let ys = box_enumerate(&bounds, cap, "coset representatives")?;
    let amb = sup.ambient();
    Ok(ys.iter().map(|y| amb.reduce(&sup.basis().left_mul_vec(y))).collect())
}

/// One cyclic summand of `Hom(A, C)`: the map sending domain generator `from` to `step` times codomain generator `to`.
#[derive(Clone, Debug, PartialEq, Eq)]
struct HomComponent {
    from: usize,
    to: usize,
    step: BigInt,
    order: BigInt,
}

/// `Hom(A, C)` with explicit basis homomorphisms.
///
/// A homomorphism is an `A.dim() x C.dim()` matrix whose row `i` is the image of generator `i`.
#[derive(Clone, Debug)]
pub struct HomModule {
    pub domain: AbelianModule,
    pub codomain: AbelianModule,
    pub module: AbelianModule,
    components: Vec<HomComponent>,
    pres: AbelianPresentation,
}

pub fn hom_module(a: &AbelianModule, c: &AbelianModule) -> HomModule {
    let mut components = Vec::new();
    for i in 0..a.dim() {
        let ai = a.coordinate_order(i);
        for j in 0..c.dim() {
            let cj = c.coordinate_order(j);
            let comp = match (ai.is_zero(), cj.is_zero()) {
                (true, true) => HomComponent { from: i, to: j, step: BigInt::one(), order: BigInt::zero() },
                (true, false) => HomComponent { from: i, to: j, step: BigInt::one(), order: cj },
                (false, true) => continue,
                (false, false) => {
                    let g = ai.gcd(&cj);
                    if g.is_one() {
                        continue;
                    }
                    HomComponent { from: i, to: j, step: &cj / &g, order: g }
                }
            };
            components.push(comp);
        }
    }
    let orders: Vec<BigInt> = components.iter().map(|c| c.order.clone()).collect();
    let pres = AbelianPresentation::from_relations(orders.len(), &IntMatrix::diagonal(&orders));
    HomModule { domain: a.clone(), codomain: c.clone(), module: pres.module.clone(), components, pres }
}

impl HomModule {
    pub fn basis(&self) -> Vec<IntMatrix> {
        (0..self.module.dim()).map(|q| self.hom_from_coords(&self.module.unit(q))).collect()
    }

    pub fn hom_from_coords(&self, y: &[BigInt]) -> IntMatrix {
        let x = self.pres.lift(y);
        let mut m = IntMatrix::zeros(self.domain.dim(), self.codomain.dim());
        for (k, comp) in self.components.iter().enumerate() {
            m[(comp.from, comp.to)] += &x[k] * &comp.step;
        }
        self.reduce_hom(&m)
    }

    /// Reduces the image columns into the codomain.
    pub fn reduce_hom(&self, m: &IntMatrix) -> IntMatrix {
        let mut m = m.clone();
        for j in self.codomain.free_rank..self.codomain.dim() {
            m.reduce_col(j, &self.codomain.coordinate_order(j));
        }
        m
    }

    /// Checks that `m` defines a homomorphism `A -> C`.
    pub fn is_hom(&self, m: &IntMatrix) -> bool {
        if m.rows() != self.domain.dim() || m.cols() != self.codomain.dim() {
            return false;
        }
        (self.domain.free_rank..self.domain.dim()).all(|i| {
            let n = self.domain.coordinate_order(i);
            let img: Vec<BigInt> = m.row(i).iter().map(|e| e * &n).collect();
            self.codomain.is_zero_elem(&img)
        })
    }

    /// Coordinates of a homomorphism in the canonical module.
    pub fn coords(&self, m: &IntMatrix) -> Result<Vec<BigInt>> {
        if !self.is_hom(m) {
            return Err(Error::Dimension("matrix is not a homomorphism".into()));
        }
        let m = self.reduce_hom(m);
        let mut x = Vec::with_capacity(self.components.len());
        for comp in &self.components {
            let e = &m[(comp.from, comp.to)];
            let (q, r) = e.div_rem(&comp.step);
            debug_assert!(r.is_zero());
            x.push(q);
        }
        Ok(self.pres.canon(&x))
    }

    pub fn apply(&self, m: &IntMatrix, v: &[BigInt]) -> Vec<BigInt> {
        self.codomain.reduce(&m.left_mul_vec(v))
    }
}

impl fmt::Display for Submodule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let gens: Vec<String> = self
            .generators()
            .iter()
            .map(|g| format!("({})", g.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(",")))
            .collect();
        write!(f, "<{}> in {}", gens.join(", "), self.ambient)
    }
}
