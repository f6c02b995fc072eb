use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use super::unitri::{logm, StrictUpper, UniTriangular};
use crate::error::{Error, Result};

/// A rational Lie subalgebra of strictly upper triangular matrices.
#[derive(Clone, Debug, Serialize)]
pub struct LieSpan {
    pub basis: Vec<StrictUpper>,
    /// `structure[i][j][k]`: coefficient of `basis[k]` in `[basis[i], basis[j]]`.
    pub structure: Vec<Vec<Vec<BigRational>>>,
}

fn flatten(m: &StrictUpper) -> Vec<BigRational> {
    m.matrix().entries().to_vec()
}

/// Coordinates of `v` in the span of `vs`, by exact elimination.
fn solve_in_span(vs: &[Vec<BigRational>], v: &[BigRational]) -> Option<Vec<BigRational>> {
    let k = vs.len();
    let len = v.len();
    // columns are the basis vectors, last column the target
    let mut a: Vec<Vec<BigRational>> =
        (0..len).map(|r| vs.iter().map(|b| b[r].clone()).chain(std::iter::once(v[r].clone())).collect()).collect();
    let mut pivot_cols = Vec::new();
    let mut row = 0;
    for c in 0..k {
        let Some(p) = (row..len).find(|&r| !a[r][c].is_zero()) else { continue };
        a.swap(row, p);
        let inv = a[row][c].recip();
        for x in a[row].iter_mut() {
            *x *= &inv;
        }
        for r in 0..len {
            if r != row && !a[r][c].is_zero() {
                let f = a[r][c].clone();
                let src = a[row].clone();
                for (x, y) in a[r].iter_mut().zip(&src) {
                    *x -= &f * y;
                }
            }
        }
        pivot_cols.push(c);
        row += 1;
    }
    if a[row..].iter().any(|r| !r[k].is_zero()) {
        return None;
    }
    let mut out = vec![BigRational::zero(); k];
    for (i, &c) in pivot_cols.iter().enumerate() {
        out[c] = a[i][k].clone();
    }
    Some(out)
}

impl LieSpan {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn coordinates(&self, m: &StrictUpper) -> Option<Vec<BigRational>> {
        let vs: Vec<Vec<BigRational>> = self.basis.iter().map(flatten).collect();
        solve_in_span(&vs, &flatten(m))
    }

    pub fn contains(&self, m: &StrictUpper) -> bool {
        self.coordinates(m).is_some()
    }

    /// Re-expresses every pairwise bracket with the structure constants and checks for zero residual.
    pub fn verify_closure(&self) -> bool {
        let n = self.basis.first().map_or(0, StrictUpper::dim);
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                let br = self.basis[i].bracket(&self.basis[j]);
                let mut acc = StrictUpper::zero(n);
                for (c, b) in self.structure[i][j].iter().zip(&self.basis) {
                    if !c.is_zero() {
                        acc = acc.add(&b.scale(c));
                    }
                }
                if acc != br {
                    return false;
                }
            }
        }
        true
    }

    pub fn is_abelian(&self) -> bool {
        self.structure.iter().flatten().flatten().all(Zero::is_zero)
    }
}

/// The smallest rational Lie subalgebra containing the logarithms of `images`.
pub fn qlie_span(images: &[UniTriangular]) -> Result<LieSpan> {
    let n = images.first().map_or(0, UniTriangular::dim);
    if images.iter().any(|u| u.dim() != n) {
        return Err(Error::Dimension("images of different sizes".into()));
    }
    let mut basis: Vec<StrictUpper> = Vec::new();
    let mut flat: Vec<Vec<BigRational>> = Vec::new();
    let push = |m: StrictUpper, basis: &mut Vec<StrictUpper>, flat: &mut Vec<Vec<BigRational>>| {
        if m.is_zero() || solve_in_span(flat, &flatten(&m)).is_some() {
            return false;
        }
        flat.push(flatten(&m));
        basis.push(m);
        true
    };
    for u in images {
        push(logm(u), &mut basis, &mut flat);
    }
    let mut done = 0;
    while done < basis.len() {
        let i = done;
        for j in 0..i {
            let br = basis[j].bracket(&basis[i]);
            push(br, &mut basis, &mut flat);
        }
        done += 1;
    }
    let structure = (0..basis.len())
        .map(|i| {
            (0..basis.len())
                .map(|j| {
                    let br = basis[i].bracket(&basis[j]);
                    solve_in_span(&flat, &flatten(&br)).expect("span is bracket closed")
                })
                .collect()
        })
        .collect();
    let span = LieSpan { basis, structure };
    debug_assert!(span.verify_closure());
    Ok(span)
}
