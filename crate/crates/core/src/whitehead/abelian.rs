use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::verdict::{Refutation, TupleSystem, Verdict, Witness};
use crate::error::{Error, Result};
use crate::malcev::QMatrix;
use crate::nilgroup::{FiniteGroupTable, NilElement, PcPresentation};
use crate::zmod::{smith, solve_integer, AbelianModule, IntMatrix};

/// Largest torsion subgroup handled by the exhaustive torsion search.
pub const TORSION_CAP: usize = 4096;

fn big_rows(g: &AbelianModule, s: &TupleSystem<Vec<i64>>) -> Result<Vec<Vec<BigInt>>> {
    s.elements()
        .map(|v| {
            if v.len() != g.dim() {
                return Err(Error::Dimension(format!("element has {} coordinates, module has {}", v.len(), g.dim())));
            }
            Ok(g.reduce(&v.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>()))
        })
        .collect()
}

fn to_i64_rows(rows: &[Vec<BigInt>]) -> Result<Vec<Vec<i64>>> {
    rows.iter()
        .map(|r| r.iter().map(|x| x.to_i64().ok_or_else(|| Error::Input("coordinate overflow".into()))).collect())
        .collect()
}

/// Unimodular `u` (acting on row vectors) with `a_i u = b_i`, or the reason none exists.
fn free_part(a: &IntMatrix, b: &IntMatrix) -> std::result::Result<IntMatrix, String> {
    let r = a.cols();
    if a.rows() == 0 || r == 0 {
        return Ok(IntMatrix::identity(r));
    }
    let sa = smith(a);
    let sb = smith(b);
    let k = sa.rank();
    if k != sb.rank() {
        return Err(format!("free parts span lattices of ranks {} and {}", k, sb.rank()));
    }
    if k == 0 {
        return Ok(IntMatrix::identity(r));
    }
    let keep: Vec<usize> = (0..k).collect();
    let ca = QMatrix::from_int(&(a * &sa.v).select_cols(&keep));
    let cb = QMatrix::from_int(&(b * &sb.v).select_cols(&keep));
    let cat = ca.transpose();
    let gram = (&cat * &ca).inverse().expect("full column rank");
    let w = &(&gram * &cat) * &cb;
    if &ca * &w != cb {
        return Err("the integer relations among the free parts differ".into());
    }
    let w = w.to_int().ok_or("the induced map on saturations is not integral")?;
    if !w.det().abs().is_one() {
        return Err("the induced map on saturations is not invertible over Z".into());
    }
    let mut full = IntMatrix::identity(r);
    for i in 0..k {
        for j in 0..k {
            full[(i, j)] = w[(i, j)].clone();
        }
    }
    Ok(&(&sa.v * &full) * &sb.v_inv)
}

/// Solves `a_f Φ ≡ rhs` column by column modulo the torsion orders.
fn torsion_shift(a_free: &IntMatrix, rhs: &[Vec<BigInt>], orders: &[BigInt]) -> Option<IntMatrix> {
    let m = a_free.rows();
    let r = a_free.cols();
    let mut phi = IntMatrix::zeros(r, orders.len());
    for (j, d) in orders.iter().enumerate() {
        let mut sys = IntMatrix::zeros(m, r + m);
        for i in 0..m {
            for l in 0..r {
                sys[(i, l)] = a_free[(i, l)].clone();
            }
            sys[(i, r + i)] = d.clone();
        }
        let b: Vec<BigInt> = rhs.iter().map(|row| row[j].clone()).collect();
        let x = solve_integer(&sys, &b).particular?;
        for l in 0..r {
            phi[(l, j)] = x[l].mod_floor(d);
        }
    }
    Some(phi)
}

/// Decides whether an automorphism of `g` carries the concatenated tuple `s` to `t`.
pub fn whitehead_abelian(g: &AbelianModule, s: &TupleSystem<Vec<i64>>, t: &TupleSystem<Vec<i64>>) -> Result<Verdict> {
    s.check_shape(t)?;
    let a = big_rows(g, s)?;
    let b = big_rows(g, t)?;
    let r = g.free_rank;
    let orders = g.invariant_factors.clone();
    let torsion_order = g.torsion_order();
    if torsion_order > BigInt::from(TORSION_CAP) {
        return Err(Error::cap("torsion subgroup", torsion_order, TORSION_CAP));
    }
    let split = |rows: &[Vec<BigInt>]| -> (IntMatrix, Vec<Vec<BigInt>>) {
        let free: Vec<Vec<BigInt>> = rows.iter().map(|v| v[..r].to_vec()).collect();
        let tors: Vec<Vec<BigInt>> = rows.iter().map(|v| v[r..].to_vec()).collect();
        (IntMatrix::from_rows(r, &free), tors)
    };
    let (af, at) = split(&a);
    let (bf, bt) = split(&b);
    for (x, y) in a.iter().zip(&b) {
        if g.element_order(x) != g.element_order(y) {
            return Ok(Verdict::invariant("element orders differ"));
        }
    }
    let u = match free_part(&af, &bf) {
        Ok(u) => u,
        Err(reason) => return Ok(Verdict::invariant(reason)),
    };

    let tp = PcPresentation::abelian(
        "torsion",
        0,
        &orders.iter().map(|d| d.to_u64().expect("small torsion")).collect::<Vec<_>>(),
    )?;
    let table = FiniteGroupTable::from_pc(&tp, TORSION_CAP)?;
    let auts = table.table.automorphisms(TORSION_CAP)?;
    let to_el = |v: &[BigInt]| NilElement::from_exponents(v.iter().map(|x| x.to_i64().expect("small")).collect());
    for perm in &auts {
        let tau = |v: &[BigInt]| -> Vec<BigInt> {
            table.elements[perm[table.index_of(&to_el(v))]].exponents().iter().map(|&x| BigInt::from(x)).collect()
        };
        let rhs: Vec<Vec<BigInt>> = at
            .iter()
            .zip(&bt)
            .map(|(x, y)| {
                let tx = tau(x);
                y.iter().zip(&tx).zip(&orders).map(|((b, a), d)| (b - a).mod_floor(d)).collect()
            })
            .collect();
        let Some(phi) = torsion_shift(&af, &rhs, &orders) else { continue };
        let dim = g.dim();
        let mut rows = Vec::with_capacity(dim);
        for l in 0..r {
            let mut row: Vec<BigInt> = u.row_vec(l);
            row.extend(phi.row_vec(l));
            rows.push(row);
        }
        for j in 0..orders.len() {
            let mut row = vec![BigInt::zero(); r];
            row.extend(tau(&g.unit(r + j)[r..]));
            rows.push(row);
        }
        let witness = Witness {
            automorphism: to_i64_rows(&rows)?,
            conjugators: vec![vec![0; dim]; s.tuples.len()],
        };
        debug_assert!(verify_abelian_witness(g, s, t, &witness).is_ok());
        return Ok(Verdict::Equivalent { witness });
    }
    Ok(Verdict::NotEquivalent { refutation: Refutation::Exhaustive { automorphisms: auts.len() } })
}

fn apply_rows(g: &AbelianModule, m: &IntMatrix, v: &[BigInt]) -> Vec<BigInt> {
    g.reduce(&m.left_mul_vec(v))
}

/// Checks that the witness matrix is an automorphism of `g` sending `s` to `t`.
pub fn verify_abelian_witness(g: &AbelianModule, s: &TupleSystem<Vec<i64>>, t: &TupleSystem<Vec<i64>>, w: &Witness) -> Result<()> {
    let dim = g.dim();
    let r = g.free_rank;
    if w.automorphism.len() != dim || w.automorphism.iter().any(|row| row.len() != dim) {
        return Err(Error::Dimension("witness matrix has the wrong shape".into()));
    }
    let m = IntMatrix::from_rows(dim, &w.automorphism);
    for j in r..dim {
        let img: Vec<BigInt> = m.row(j).iter().map(|x| x * g.coordinate_order(j)).collect();
        if !g.is_zero_elem(&img) || m.row(j)[..r].iter().any(|x| !x.is_zero()) {
            return Err(Error::RelationViolated(format!("image of torsion generator {j} has the wrong order")));
        }
    }
    let free: Vec<Vec<BigInt>> = (0..r).map(|l| m.row(l)[..r].to_vec()).collect();
    if !IntMatrix::from_rows(r, &free).is_unimodular() {
        return Err(Error::RelationViolated("free block is not unimodular".into()));
    }
    let torsion = g.torsion_submodule();
    let elems = AbelianModule::from_orders(&g.invariant_factors).elements(TORSION_CAP)?;
    let mut seen = std::collections::HashSet::new();
    for e in &elems {
        let mut v = vec![BigInt::zero(); r];
        v.extend(e.iter().cloned());
        let img = apply_rows(g, &m, &v);
        debug_assert!(torsion.contains(&img));
        if !seen.insert(img) {
            return Err(Error::RelationViolated("map is not injective on the torsion".into()));
        }
    }
    for (x, y) in big_rows(g, s)?.iter().zip(big_rows(g, t)?) {
        if apply_rows(g, &m, x) != y {
            return Err(Error::RelationViolated("witness does not carry the source tuple to the target".into()));
        }
    }
    Ok(())
}
