use std::sync::Arc;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nilgroup::{FiniteGroupTable, GroupHom, NilElement, PcPresentation, Subgroup};
use crate::zmod::{AbelianModule, IntMatrix};

/// Largest power tried when computing the outer order of a class.
pub const OUTER_ORDER_BOUND: u64 = 60;

/// Quotients up to this order are additionally checked by brute force over the multiplication table.
pub const TABLE_CHECK_CAP: usize = 729;

/// A class `[β] ∈ Out(N)` held through a verified representative automorphism.
#[derive(Clone, Debug)]
pub struct OuterAutoClass {
    pub representative: GroupHom,
    pub outer_order: Option<u64>,
}

impl PartialEq for OuterAutoClass {
    fn eq(&self, other: &Self) -> bool {
        self.same_class(other)
    }
}

impl OuterAutoClass {
    pub fn new(representative: GroupHom) -> Result<Self> {
        if !representative.is_automorphism() {
            return Err(Error::Input("representative is not an automorphism".into()));
        }
        let outer_order = outer_order(&representative, OUTER_ORDER_BOUND);
        Ok(OuterAutoClass { representative, outer_order })
    }

    pub fn presentation(&self) -> &Arc<PcPresentation> {
        &self.representative.source
    }

    pub fn is_trivial(&self) -> bool {
        self.representative.is_inner()
    }

    /// Whether `a b^-1` is inner.
    pub fn same_class(&self, other: &OuterAutoClass) -> bool {
        let Ok(inv) = other.representative.inverse() else { return false };
        match self.representative.compose(&inv) {
            Ok(c) => c.is_inner(),
            Err(_) => false,
        }
    }

    pub fn compose(&self, other: &OuterAutoClass) -> Result<OuterAutoClass> {
        OuterAutoClass::new(self.representative.compose(&other.representative)?)
    }
}

/// Smallest `d <= bound` with `a^d` inner.
pub fn outer_order(a: &GroupHom, bound: u64) -> Option<u64> {
    let mut power = a.clone();
    for d in 1..=bound {
        if power.is_inner() {
            return Some(d);
        }
        power = power.compose(a).ok()?;
    }
    None
}

/// An automorphism of the center, by its action on canonical generators.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CenterMap {
    pub module: AbelianModule,
    /// Row `i` is the image of canonical generator `i`.
    pub matrix: IntMatrix,
}

impl CenterMap {
    pub fn is_identity(&self) -> bool {
        (0..self.module.dim()).all(|i| {
            let d: Vec<BigInt> = self.matrix.row(i).iter().zip(self.module.unit(i)).map(|(a, b)| a - b).collect();
            self.module.is_zero_elem(&d)
        })
    }
}

/// The restriction of the class to `ν₁N`; inner automorphisms act trivially there.
pub fn restriction_r(a: &OuterAutoClass) -> CenterMap {
    let p = a.presentation();
    let center = p.center();
    let pres = p.abelian_presentation_of(&center);
    let module = pres.module.clone();
    let rows: Vec<Vec<BigInt>> = (0..module.dim())
        .map(|i| {
            let z = p.abelian_element(&center, &pres, &module.unit(i));
            let img = a.representative.apply(&z);
            p.abelian_coordinates(&center, &pres, &img).expect("the center is characteristic")
        })
        .collect();
    CenterMap { matrix: IntMatrix::from_rows(module.dim(), &rows), module }
}

/// The induced class on `N/ν₁N`.
pub fn projection_p(a: &OuterAutoClass) -> Result<OuterAutoClass> {
    let p = a.presentation();
    let q = p.quotient(&p.center())?;
    OuterAutoClass::new(a.representative.induced_on_quotients(&q, &q)?)
}

/// Evidence for or against survival of a class in a finite quotient.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurvivalEvidence {
    pub survives: bool,
    pub quotient_order: u128,
    /// Images of the quotient generators under the induced automorphism.
    pub images: Vec<Vec<i64>>,
    /// A conjugator realizing the induced map, when it is inner.
    pub conjugator: Option<Vec<i64>>,
    /// Whether the verdict was also confirmed on the full multiplication table.
    pub table_checked: bool,
}

/// Whether the class stays non-inner in the finite quotient `N / p0`.
pub fn survives(a: &OuterAutoClass, p0: &Subgroup, quotient_cap: usize) -> Result<SurvivalEvidence> {
    let p = a.presentation();
    if !p.is_normal(p0) {
        return Err(Error::NotNormal);
    }
    let order = p.index(p0).ok_or(Error::IndexInfinite)?;
    if order > quotient_cap as u128 {
        return Err(Error::cap("quotient", order, quotient_cap));
    }
    let q = p.quotient(p0)?;
    let induced = a.representative.induced_on_quotients(&q, &q)?;
    let conjugator = induced.inner_conjugator();
    let table_checked = if order as usize <= TABLE_CHECK_CAP {
        let brute = table_inner(&induced, order as usize)?;
        if brute != conjugator.is_some() {
            return Err(Error::Input("table check disagrees with the layered solver".into()));
        }
        true
    } else {
        false
    };
    Ok(SurvivalEvidence {
        survives: conjugator.is_none(),
        quotient_order: order,
        images: induced.images.iter().map(|x| x.exponents().to_vec()).collect(),
        conjugator: conjugator.map(NilElement::into_exponents),
        table_checked,
    })
}

/// Inner-ness of an automorphism of a finite presentation, by search over all elements.
pub(crate) fn table_inner(a: &GroupHom, cap: usize) -> Result<bool> {
    let t = FiniteGroupTable::from_pc(&a.source, cap)?;
    let perm: Vec<usize> = t.elements.iter().map(|x| t.index_of(&a.apply(x))).collect();
    Ok(t.table.inner_conjugator(&perm).is_some())
}
