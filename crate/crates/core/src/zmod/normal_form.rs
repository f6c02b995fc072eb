use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::IntMatrix;

/// Row-style Hermite normal form: returns `(h, u)` with `u` unimodular and
/// `u * a = h`. Pivots are positive, entries above a pivot lie in
/// `[0, pivot)`, and zero rows sit at the bottom.
pub fn hnf(a: &IntMatrix) -> (IntMatrix, IntMatrix) {
    let m = a.rows();
    let n = a.cols();
    let mut h = a.clone();
    let mut u = IntMatrix::identity(m);
    let mut p = 0;
    for col in 0..n {
        if p == m {
            break;
        }
        loop {
            let best = (p..m)
                .filter(|&r| !h[(r, col)].is_zero())
                .min_by(|&x, &y| h[(x, col)].abs().cmp(&h[(y, col)].abs()));
            let Some(r) = best else { break };
            h.swap_rows(r, p);
            u.swap_rows(r, p);
            let mut residual = false;
            for r2 in p + 1..m {
                if h[(r2, col)].is_zero() {
                    continue;
                }
                let q = h[(r2, col)].div_floor(&h[(p, col)]);
                let neg = -q;
                h.add_row_multiple(r2, p, &neg);
                u.add_row_multiple(r2, p, &neg);
                if !h[(r2, col)].is_zero() {
                    residual = true;
                }
            }
            if !residual {
                break;
            }
        }
        if h[(p, col)].is_zero() {
            continue;
        }
        if h[(p, col)].is_negative() {
            h.negate_row(p);
            u.negate_row(p);
        }
        for r2 in 0..p {
            let q = h[(r2, col)].div_floor(&h[(p, col)]);
            if !q.is_zero() {
                let neg = -q;
                h.add_row_multiple(r2, p, &neg);
                u.add_row_multiple(r2, p, &neg);
            }
        }
        p += 1;
    }
    (h, u)
}

/// Nonzero rows of the Hermite normal form.
pub fn hnf_basis(a: &IntMatrix) -> IntMatrix {
    let (h, _) = hnf(a);
    let keep: Vec<usize> = (0..h.rows()).filter(|&i| h.row(i).iter().any(|e| !e.is_zero())).collect();
    h.select_rows(&keep)
}

/// Smith normal form with both transforms and the inverse of the right one.
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub d: IntMatrix,
    pub u: IntMatrix,
    pub v: IntMatrix,
    pub v_inv: IntMatrix,
}

impl SmithForm {
    pub fn rank(&self) -> usize {
        let k = self.d.rows().min(self.d.cols());
        (0..k).take_while(|&i| !self.d[(i, i)].is_zero()).count()
    }

    pub fn diagonal(&self) -> Vec<BigInt> {
        let k = self.d.rows().min(self.d.cols());
        (0..k).map(|i| self.d[(i, i)].clone()).collect()
    }
}

/// Smith normal form: `u * a * v = d` with `d` diagonal, `d1 | d2 | ...`, all `di >= 0`.
pub fn snf(a: &IntMatrix) -> (IntMatrix, IntMatrix, IntMatrix) {
    let s = smith(a);
    (s.d, s.u, s.v)
}

pub fn smith(a: &IntMatrix) -> SmithForm {
    let m = a.rows();
    let n = a.cols();
    let mut d = a.clone();
    let mut u = IntMatrix::identity(m);
    let mut v = IntMatrix::identity(n);
    let mut vi = IntMatrix::identity(n);

    // column op helpers keep v and its inverse in step
    fn col_add(d: &mut IntMatrix, v: &mut IntMatrix, vi: &mut IntMatrix, dst: usize, src: usize, k: &BigInt) {
        d.add_col_multiple(dst, src, k);
        v.add_col_multiple(dst, src, k);
        let neg = -k.clone();
        vi.add_row_multiple(src, dst, &neg);
    }
    fn col_swap(d: &mut IntMatrix, v: &mut IntMatrix, vi: &mut IntMatrix, a: usize, b: usize) {
        d.swap_cols(a, b);
        v.swap_cols(a, b);
        vi.swap_rows(a, b);
    }

    let k = m.min(n);
    for t in 0..k {
        let pick = |d: &IntMatrix| {
            let mut best: Option<(usize, usize)> = None;
            for i in t..m {
                for j in t..n {
                    if d[(i, j)].is_zero() {
                        continue;
                    }
                    match best {
                        Some((bi, bj)) if d[(bi, bj)].abs() <= d[(i, j)].abs() => {}
                        _ => best = Some((i, j)),
                    }
                }
            }
            best
        };
        let Some((pi, pj)) = pick(&d) else { break };
        d.swap_rows(pi, t);
        u.swap_rows(pi, t);
        col_swap(&mut d, &mut v, &mut vi, pj, t);
        loop {
            let mut clean = true;
            for i in t + 1..m {
                if d[(i, t)].is_zero() {
                    continue;
                }
                let q = -d[(i, t)].div_floor(&d[(t, t)]);
                d.add_row_multiple(i, t, &q);
                u.add_row_multiple(i, t, &q);
                if !d[(i, t)].is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..n {
                if d[(t, j)].is_zero() {
                    continue;
                }
                let q = -d[(t, j)].div_floor(&d[(t, t)]);
                col_add(&mut d, &mut v, &mut vi, j, t, &q);
                if !d[(t, j)].is_zero() {
                    clean = false;
                }
            }
            if !clean {
                // bring the smallest remaining entry of row/column t to the pivot
                let mut best = (t, t);
                for i in t + 1..m {
                    if !d[(i, t)].is_zero() && d[(i, t)].abs() < d[best].abs() {
                        best = (i, t);
                    }
                }
                for j in t + 1..n {
                    if !d[(t, j)].is_zero() && d[(t, j)].abs() < d[best].abs() {
                        best = (t, j);
                    }
                }
                if best.0 != t {
                    d.swap_rows(best.0, t);
                    u.swap_rows(best.0, t);
                } else if best.1 != t {
                    col_swap(&mut d, &mut v, &mut vi, best.1, t);
                }
                continue;
            }
            let bad = (t + 1..m)
                .flat_map(|i| (t + 1..n).map(move |j| (i, j)))
                .find(|&(i, j)| !d[(i, j)].is_multiple_of(&d[(t, t)]));
            match bad {
                Some((i, _)) => {
                    let one = BigInt::one();
                    d.add_row_multiple(t, i, &one);
                    u.add_row_multiple(t, i, &one);
                }
                None => break,
            }
        }
        if d[(t, t)].is_negative() {
            d.negate_row(t);
            u.negate_row(t);
        }
    }
    SmithForm { d, u, v, v_inv: vi }
}

/// Result of solving `a * x = b` over the integers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegerSolution {
    pub particular: Option<Vec<BigInt>>,
    /// Basis of the integer kernel of `a`, Hermite-reduced.
    pub kernel: Vec<Vec<BigInt>>,
}

/// Solves `a * x = b` for integer `x`.
pub fn solve_integer(a: &IntMatrix, b: &[BigInt]) -> IntegerSolution {
    assert_eq!(a.rows(), b.len(), "solve_integer: dimension mismatch");
    let n = a.cols();
    let s = smith(a);
    let r = s.rank();
    let c = s.u.mul_vec(b);
    let mut y = vec![BigInt::zero(); n];
    let mut ok = c[r..].iter().all(Zero::is_zero);
    if ok {
        for i in 0..r {
            let (q, rem) = c[i].div_rem(&s.d[(i, i)]);
            if !rem.is_zero() {
                ok = false;
                break;
            }
            y[i] = q;
        }
    }
    let particular = ok.then(|| s.v.mul_vec(&y));
    let kernel = if r < n {
        let cols: Vec<usize> = (r..n).collect();
        let k = s.v.select_cols(&cols).transpose();
        hnf_basis(&k).to_rows()
    } else {
        Vec::new()
    };
    IntegerSolution { particular, kernel }
}

/// Integer kernel of `a` (vectors `x` with `a * x = 0`), Hermite-reduced.
pub fn integer_kernel(a: &IntMatrix) -> Vec<Vec<BigInt>> {
    solve_integer(a, &vec![BigInt::zero(); a.rows()]).kernel
}

/// Integer left kernel of `a` (row vectors `x` with `x * a = 0`).
pub fn left_kernel(a: &IntMatrix) -> Vec<Vec<BigInt>> {
    integer_kernel(&a.transpose())
}
