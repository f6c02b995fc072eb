use super::verdict::{Refutation, TupleSystem, Verdict, Witness};
use crate::error::{Error, Result};
use crate::nilgroup::{FiniteGroupTable, DEFAULT_AUT_CAP};

fn check_elements(f: &FiniteGroupTable, s: &TupleSystem<usize>) -> Result<()> {
    if let Some(&x) = s.elements().find(|&&x| x >= f.order()) {
        return Err(Error::Input(format!("element {x} is outside a group of order {}", f.order())));
    }
    Ok(())
}

/// Some `g` with `g^-1 t_j g = img_j` for all `j`.
fn tuple_conjugator(f: &FiniteGroupTable, t: &[usize], img: &[usize]) -> Option<usize> {
    (0..f.order()).find(|&g| t.iter().zip(img).all(|(&x, &y)| f.conj(x, g) == y))
}

/// Exhaustive search over `Aut(F)` and conjugator tuples.
pub fn whitehead_finite(f: &FiniteGroupTable, s: &TupleSystem<usize>, t: &TupleSystem<usize>) -> Result<Verdict> {
    whitehead_finite_with_cap(f, s, t, DEFAULT_AUT_CAP)
}

pub fn whitehead_finite_with_cap(
    f: &FiniteGroupTable,
    s: &TupleSystem<usize>,
    t: &TupleSystem<usize>,
    cap: usize,
) -> Result<Verdict> {
    s.check_shape(t)?;
    check_elements(f, s)?;
    check_elements(f, t)?;
    let auts = f.automorphisms(cap)?;
    let gens = f.generating_set();
    'aut: for perm in &auts {
        let mut conjugators = Vec::with_capacity(s.tuples.len());
        for (si, ti) in s.tuples.iter().zip(&t.tuples) {
            let img: Vec<usize> = si.iter().map(|&x| perm[x]).collect();
            match tuple_conjugator(f, ti, &img) {
                Some(g) => conjugators.push(vec![g as i64]),
                None => continue 'aut,
            }
        }
        let automorphism = gens.iter().map(|&g| vec![perm[g] as i64]).collect();
        return Ok(Verdict::Equivalent { witness: Witness { automorphism, conjugators } });
    }
    Ok(Verdict::NotEquivalent { refutation: Refutation::Exhaustive { automorphisms: auts.len() } })
}

/// Re-checks a table witness: images of the generating set extend to an automorphism carrying `s` to conjugates of `t`.
pub fn verify_finite_witness(f: &FiniteGroupTable, s: &TupleSystem<usize>, t: &TupleSystem<usize>, w: &Witness) -> Result<()> {
    let gens = f.generating_set();
    let images: Vec<usize> = w
        .automorphism
        .iter()
        .map(|v| match v.as_slice() {
            [x] if (*x as usize) < f.order() && *x >= 0 => Ok(*x as usize),
            _ => Err(Error::Input("table witness entries must be single element indices".into())),
        })
        .collect::<Result<_>>()?;
    if images.len() != gens.len() || w.conjugators.len() != s.tuples.len() {
        return Err(Error::Dimension("witness has the wrong shape".into()));
    }
    let perm = f.extend_hom(&gens, &images).ok_or_else(|| Error::RelationViolated("images do not define an automorphism".into()))?;
    for ((si, ti), g) in s.tuples.iter().zip(&t.tuples).zip(&w.conjugators) {
        let g = match g.as_slice() {
            [x] if (*x as usize) < f.order() && *x >= 0 => *x as usize,
            _ => return Err(Error::Input("conjugator must be a single element index".into())),
        };
        if si.iter().zip(ti).any(|(&x, &y)| perm[x] != f.conj(y, g)) {
            return Err(Error::RelationViolated("witness does not carry the source tuple to the target".into()));
        }
    }
    Ok(())
}
