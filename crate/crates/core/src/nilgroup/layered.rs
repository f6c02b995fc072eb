use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use super::{NilElement, PcPresentation, Subgroup};
use crate::zmod::{solve_integer, AbelianPresentation, IntMatrix};

/// Kernel and (optionally) a preimage for a homomorphism from a subgroup,
/// given on its induced generators, to `Z^m / diag(moduli)` (modulus 0 = Z).
pub(crate) struct AbelianHomSolution {
    pub kernel_gens: Vec<NilElement>,
    pub preimage: Option<NilElement>,
}

impl PcPresentation {
    /// Relative order of an induced generator inside its subgroup, `None` when infinite.
    fn induced_relative_order(&self, g: &NilElement) -> Option<i64> {
        let (p, b) = g.leading().expect("nontrivial");
        (self.orders[p] != 0).then(|| self.orders[p] / b)
    }

    pub(crate) fn abelian_hom_solve(
        &self,
        gens: &[NilElement],
        images: &[Vec<BigInt>],
        moduli: &[BigInt],
        target: Option<&[BigInt]>,
    ) -> AbelianHomSolution {
        let m = moduli.len();
        let s = gens.len();
        let rel_rows: Vec<Vec<BigInt>> = (0..m)
            .filter(|&k| !moduli[k].is_zero())
            .map(|k| {
                let mut r = vec![BigInt::zero(); m];
                r[k] = moduli[k].clone();
                r
            })
            .collect();

        let mut kernel_gens = Vec::new();
        for i in (0..s).rev() {
            let mut rows = rel_rows.clone();
            rows.extend(images[i + 1..].iter().cloned());
            let pres = AbelianPresentation::from_relations(m, &IntMatrix::from_rows(m, &rows));
            let canon = pres.canon(&images[i]);
            let e = match pres.module.element_order(&canon) {
                Some(e) => e,
                None => {
                    debug_assert!(self.induced_relative_order(&gens[i]).is_none());
                    continue;
                }
            };
            let e = e.to_i64().expect("kernel exponent fits");
            let scaled: Vec<BigInt> = images[i].iter().map(|v| v * e).collect();
            let y = self.abelian_preimage(&gens[i + 1..], &images[i + 1..], moduli, &scaled)
                .expect("multiple lies in the image lattice");
            let k = self.multiply(&self.power(&gens[i], e), &self.invert(&y));
            if !k.is_identity() {
                kernel_gens.push(k);
            }
        }
        let preimage = target.and_then(|t| self.abelian_preimage(gens, images, moduli, t));
        AbelianHomSolution { kernel_gens, preimage }
    }

    /// Some product of `gens` whose image is `target`.
    fn abelian_preimage(
        &self,
        gens: &[NilElement],
        images: &[Vec<BigInt>],
        moduli: &[BigInt],
        target: &[BigInt],
    ) -> Option<NilElement> {
        let m = moduli.len();
        if target.iter().all(Zero::is_zero) {
            return Some(self.identity());
        }
        // columns: images of gens, then modulus vectors
        let mut cols: Vec<Vec<BigInt>> = images.to_vec();
        for k in 0..m {
            if !moduli[k].is_zero() {
                let mut c = vec![BigInt::zero(); m];
                c[k] = moduli[k].clone();
                cols.push(c);
            }
        }
        if cols.is_empty() {
            return None;
        }
        let a = IntMatrix::from_rows(m, &cols).transpose();
        let sol = solve_integer(&a, target).particular?;
        let mut x = self.identity();
        for (g, k) in gens.iter().zip(&sol) {
            let k = k.to_i64().expect("preimage exponent fits");
            if k != 0 {
                x = self.multiply(&x, &self.power(g, k));
            }
        }
        Some(x)
    }

    /// Finds `g` with `g^-1 a_j g = b_j` for all `j`, together with the
    /// centralizer of the `b_j`. Solves one central layer of the
    /// defining series at a time.
    pub fn solve_conjugation(&self, a: &[NilElement], b: &[NilElement]) -> Option<(NilElement, Subgroup)> {
        assert_eq!(a.len(), b.len());
        let n = self.len();
        let m = a.len();
        let b_inv: Vec<NilElement> = b.iter().map(|x| self.invert(x)).collect();
        let mut g0 = self.identity();
        let mut cent = self.whole_group();
        for p in 0..n {
            let g0i = self.invert(&g0);
            let mut target = Vec::with_capacity(m);
            for j in 0..m {
                let conj = self.multiply(&self.multiply(&g0i, &a[j]), &g0);
                let t = self.multiply(&b_inv[j], &conj);
                if t.depth() < p {
                    return None;
                }
                target.push(BigInt::from(-t[p]));
            }
            let modulus = BigInt::from(self.orders[p]);
            let moduli = vec![modulus; m];
            let gens: Vec<NilElement> = cent.generators().to_vec();
            let images: Vec<Vec<BigInt>> = gens
                .iter()
                .map(|c| b_inv.iter().map(|bi| BigInt::from(self.commutator(c, bi)[p])).collect())
                .collect();
            let sol = self.abelian_hom_solve(&gens, &images, &moduli, Some(&target));
            let c = sol.preimage?;
            g0 = self.multiply(&g0, &c);
            let mut kgens = sol.kernel_gens;
            kgens.extend((p + 1..n).map(|q| self.generator(q)));
            cent = self.subgroup(&kgens);
        }
        Some((g0, cent))
    }

    pub fn centralizer(&self, elems: &[NilElement]) -> Subgroup {
        self.solve_conjugation(elems, elems).expect("identity conjugates").1
    }

    pub fn center(&self) -> Subgroup {
        self.centralizer(&self.generators())
    }

    /// Some `g` with `g^-1 a g = b`.
    pub fn conjugator(&self, a: &NilElement, b: &NilElement) -> Option<NilElement> {
        self.solve_conjugation(std::slice::from_ref(a), std::slice::from_ref(b)).map(|(g, _)| g)
    }

    /// Whether the map `g_i -> images[i]` equals `x -> c^-1 x c` for some `c`; returns `c`.
    pub fn inner_conjugator(&self, images: &[NilElement]) -> Option<NilElement> {
        self.solve_conjugation(&self.generators(), images).map(|(g, _)| g)
    }
}
