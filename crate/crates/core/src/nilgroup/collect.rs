use num_integer::Integer;

use super::{NilElement, PcPresentation};
use crate::error::{Error, Result};

fn checked(a: i64, b: i64) -> i64 {
    a.checked_add(b).expect("exponent overflow during collection")
}

impl PcPresentation {
    /// Normal form of a word of `(generator, exponent)` syllables.
    pub fn collect(&self, word: &[(usize, i64)]) -> NilElement {
        let mut u = self.identity();
        for &(g, e) in word {
            self.mul_gen_power(u.exps_mut(), g, e);
        }
        u
    }

    /// Parses and collects a word such as `x^2 z^-1` over the generator names.
    pub fn collect_str(&self, word: &str) -> Result<NilElement> {
        let w = crate::pcp::parse_word(word, &self.names).map_err(|(col, msg)| Error::Parse {
            line: 1,
            column: col,
            message: msg,
        })?;
        Ok(self.collect(&w))
    }

    /// `u <- u * g_k^e` in place.
    pub(crate) fn mul_gen_power(&self, u: &mut Vec<i64>, k: usize, e: i64) {
        if e == 0 {
            return;
        }
        let n = self.len();
        let nontrivial_suffix = (k + 1..n).any(|j| u[j] != 0 && !self.commute[k][j]);
        let mut tail: Option<NilElement> = None;
        if nontrivial_suffix {
            let mut s = NilElement::identity(n);
            for j in k + 1..n {
                s.exps_mut()[j] = std::mem::take(&mut u[j]);
            }
            tail = Some(self.conj_by_gen_power(&s, k, e));
        }
        u[k] = checked(u[k], e);
        let r = self.orders[k];
        if r != 0 && (u[k] < 0 || u[k] >= r) {
            let (q, rem) = u[k].div_mod_floor(&r);
            u[k] = rem;
            let pq = self.power(&self.pow[k], q);
            if !pq.is_identity() {
                // g_k^(qr) = pow^q, which must pass the (untouched or conjugated) suffix
                let rest = match tail.take() {
                    Some(t) => t,
                    None => {
                        let mut s = NilElement::identity(n);
                        for j in k + 1..n {
                            s.exps_mut()[j] = std::mem::take(&mut u[j]);
                        }
                        s
                    }
                };
                tail = Some(self.multiply(&pq, &rest));
            }
        }
        if let Some(t) = tail {
            for j in k + 1..n {
                u[j] = t[j];
            }
        }
    }

    /// `s ^ (g_k^e)` for `s` in the subgroup generated by `g_{k+1}, ...`.
    pub(crate) fn conj_by_gen_power(&self, s: &NilElement, k: usize, e: i64) -> NilElement {
        let n = self.len();
        let mut cur = s.clone();
        let table = if e > 0 { &self.conj[k] } else { &self.conj_inv[k] };
        if e.unsigned_abs() > 8 {
            return self.conj_by_squaring(s, k, table, e.unsigned_abs());
        }
        for _ in 0..e.unsigned_abs() {
            if (k + 1..n).all(|j| cur[j] == 0 || self.commute[k][j]) {
                break;
            }
            let mut img = NilElement::identity(n);
            for j in k + 1..n {
                let x = cur[j];
                if x == 0 {
                    continue;
                }
                if self.commute[k][j] {
                    self.mul_gen_power(img.exps_mut(), j, x);
                } else {
                    let pj = self.power(&table[j], x);
                    img = self.multiply(&img, &pj);
                }
            }
            cur = img;
        }
        cur
    }

    /// Same as the loop in [`Self::conj_by_gen_power`], with the automorphism raised to the `m`-th power by squaring.
    fn conj_by_squaring(&self, s: &NilElement, k: usize, table: &[NilElement], mut m: u64) -> NilElement {
        let n = self.len();
        let apply = |images: &[NilElement], x: &NilElement| {
            let mut out = self.identity();
            for j in k + 1..n {
                if x[j] != 0 {
                    out = self.multiply(&out, &self.power(&images[j], x[j]));
                }
            }
            out
        };
        let mut base: Vec<NilElement> =
            (0..n).map(|j| if j > k && !self.commute[k][j] { table[j].clone() } else { self.generator(j) }).collect();
        let mut acc = s.clone();
        while m > 0 {
            if m & 1 == 1 {
                acc = apply(&base, &acc);
            }
            m >>= 1;
            if m > 0 {
                base = (0..n).map(|j| if j > k { apply(&base, &base[j]) } else { base[j].clone() }).collect();
            }
        }
        acc
    }

    pub fn multiply(&self, a: &NilElement, b: &NilElement) -> NilElement {
        let mut u = a.clone();
        for (k, &e) in b.exponents().iter().enumerate() {
            if e != 0 {
                self.mul_gen_power(u.exps_mut(), k, e);
            }
        }
        u
    }

    pub fn invert(&self, a: &NilElement) -> NilElement {
        let mut u = self.identity();
        for k in (0..self.len()).rev() {
            if a[k] != 0 {
                self.mul_gen_power(u.exps_mut(), k, -a[k]);
            }
        }
        u
    }

    pub fn power(&self, a: &NilElement, k: i64) -> NilElement {
        let mut base = if k < 0 { self.invert(a) } else { a.clone() };
        let mut k = k.unsigned_abs();
        let mut acc = self.identity();
        if base.is_identity() {
            return acc;
        }
        if let Some((p, _)) = base.leading() {
            // single-syllable elements multiply directly
            if base.exponents()[p + 1..].iter().all(|&x| x == 0) && self.orders[p] == 0 {
                let e = base[p].checked_mul(k as i64).expect("exponent overflow during collection");
                return NilElement::generator_power(self.len(), p, e);
            }
        }
        while k > 0 {
            if k & 1 == 1 {
                acc = self.multiply(&acc, &base);
            }
            k >>= 1;
            if k > 0 {
                base = self.multiply(&base, &base);
            }
        }
        acc
    }

    /// `g^-1 a g`.
    pub fn conjugate(&self, a: &NilElement, g: &NilElement) -> NilElement {
        let t = self.multiply(&self.invert(g), a);
        self.multiply(&t, g)
    }

    /// `[a, b] = a^-1 b^-1 a b`.
    pub fn commutator(&self, a: &NilElement, b: &NilElement) -> NilElement {
        let ab = self.multiply(a, b);
        let ba = self.multiply(b, a);
        self.multiply(&self.invert(&ba), &ab)
    }

    pub fn try_multiply(&self, a: &NilElement, b: &NilElement) -> Result<NilElement> {
        self.check_len(a)?;
        self.check_len(b)?;
        Ok(self.multiply(a, b))
    }

    pub fn try_invert(&self, a: &NilElement) -> Result<NilElement> {
        self.check_len(a)?;
        Ok(self.invert(a))
    }

    pub fn try_commutator(&self, a: &NilElement, b: &NilElement) -> Result<NilElement> {
        self.check_len(a)?;
        self.check_len(b)?;
        Ok(self.commutator(a, b))
    }

    /// Order of an element, `None` when infinite.
    pub fn element_order(&self, a: &NilElement) -> Option<i64> {
        let mut x = a.clone();
        let mut order: i64 = 1;
        while let Some((p, e)) = x.leading() {
            let r = self.orders[p];
            if r == 0 {
                return None;
            }
            let m = r / e.gcd(&r);
            order = order.checked_mul(m)?;
            x = self.power(&x, m);
        }
        Some(order)
    }

    /// Checks all overlaps; returns the first failing generator triple.
    pub fn check_consistency(&self) -> Result<()> {
        let n = self.len();
        let g = |i: usize| self.generator(i);
        let gp = |i: usize, e: i64| NilElement::generator_power(n, i, e);
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let lhs = self.multiply(&self.multiply(&g(k), &g(j)), &g(i));
                    let rhs = self.multiply(&g(k), &self.multiply(&g(j), &g(i)));
                    if lhs != rhs {
                        return Err(Error::Inconsistent(k, j, i));
                    }
                }
            }
        }
        for i in 0..n {
            let ri = self.orders[i];
            for j in i + 1..n {
                let rj = self.orders[j];
                if rj != 0 {
                    let lhs = self.multiply(&self.pow[j], &g(i));
                    let rhs = self.multiply(&gp(j, rj - 1), &self.multiply(&g(j), &g(i)));
                    if lhs != rhs {
                        return Err(Error::Inconsistent(j, j, i));
                    }
                }
                if ri != 0 {
                    let lhs = self.multiply(&g(j), &self.pow[i]);
                    let rhs = self.multiply(&self.multiply(&g(j), &g(i)), &gp(i, ri - 1));
                    if lhs != rhs {
                        return Err(Error::Inconsistent(j, i, i));
                    }
                } else {
                    let lhs = self.multiply(&self.multiply(&g(j), &gp(i, -1)), &g(i));
                    if lhs != g(j) {
                        return Err(Error::Inconsistent(j, i, i));
                    }
                }
                if rj == 0 {
                    let lhs = self.multiply(&gp(j, -1), &self.multiply(&g(j), &g(i)));
                    if lhs != g(i) {
                        return Err(Error::Inconsistent(j, j, i));
                    }
                }
            }
            if ri != 0 {
                let lhs = self.multiply(&self.pow[i], &g(i));
                let rhs = self.multiply(&g(i), &self.pow[i]);
                if lhs != rhs {
                    return Err(Error::Inconsistent(i, i, i));
                }
            }
        }
        Ok(())
    }
}
