use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nilgroup::{NilElement, PcPresentation, Subgroup};

/// Number of multiples of the base exponent tried before giving up.
pub const GOOD_ENOUGH_TRIES: i64 = 12;

/// A characteristic finite-index `P₀` with `P₀H/H ≤ K₀` and `P₀ ∩ H ≤ H₀`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoodEnough {
    pub subgroup: Subgroup,
    /// The power `k` of the verbal subgroup `N^k` used.
    pub power: i64,
    pub index: u128,
}

/// Smallest `m > 0` with `g^m ∈ sub`, searched up to `bound`.
fn order_modulo(p: &PcPresentation, sub: &Subgroup, g: &NilElement, bound: u128) -> Option<i64> {
    let mut x = g.clone();
    for m in 1..=bound.min(i64::MAX as u128) as i64 {
        if p.contains(sub, &x) {
            return Some(m);
        }
        x = p.multiply(&x, g);
    }
    None
}

/// `π^-1(K₀)` for `K₀` a subgroup of `p / h` (as built by [`PcPresentation::quotient`]).
pub fn quotient_preimage(p: &PcPresentation, h: &Subgroup, k0: &Subgroup) -> Result<Subgroup> {
    let q = p.quotient(h)?;
    let mut gens: Vec<NilElement> = k0.generators().iter().map(|g| q.lift(p.len(), g)).collect();
    gens.extend(h.generators().iter().cloned());
    Ok(p.subgroup(&gens))
}

pub fn good_enough_subgroup(p: &PcPresentation, h: &Subgroup, h0: &Subgroup, k0: &Subgroup, cap: usize) -> Result<GoodEnough> {
    if !p.is_normal(h) {
        return Err(Error::NotNormal);
    }
    if !p.is_subgroup_of(h0, h) {
        return Err(Error::NotInSubgroup("h0 is not contained in h".into()));
    }
    let rel = p.relative_index(h0, h).ok_or(Error::IndexInfinite)?;
    let q = p.quotient(h)?;
    if q.presentation.index(k0).is_none() {
        return Err(Error::IndexInfinite);
    }
    let mut base: i64 = 1;
    for g in h.generators() {
        let m = order_modulo(p, h0, g, rel).ok_or(Error::IndexInfinite)?;
        base = base.lcm(&m);
    }
    let pre = quotient_preimage(p, h, k0)?;
    for t in 1..=GOOD_ENOUGH_TRIES {
        let k = base * t;
        let v = p.verbal_power_subgroup(k, cap)?;
        let meet = p.intersection(&v, h, cap)?;
        if !meet.generators().iter().all(|g| p.contains(h0, g)) {
            continue;
        }
        let subgroup = p.intersection(&v, &pre, cap)?;
        verify_good_enough(p, h, h0, k0, &subgroup, cap)?;
        let index = p.index(&subgroup).ok_or(Error::IndexInfinite)?;
        return Ok(GoodEnough { subgroup, power: k, index });
    }
    Err(Error::BudgetExhausted(format!("no power subgroup up to exponent {} meets h inside h0", base * GOOD_ENOUGH_TRIES)))
}

/// Re-checks conditions (a) and (b) by membership.
pub fn verify_good_enough(
    p: &PcPresentation,
    h: &Subgroup,
    h0: &Subgroup,
    k0: &Subgroup,
    p0: &Subgroup,
    cap: usize,
) -> Result<()> {
    if !p.is_normal(p0) {
        return Err(Error::NotNormal);
    }
    let q = p.quotient(h)?;
    for g in p0.generators() {
        if !q.presentation.contains(k0, &q.project(p, g)) {
            return Err(Error::RelationViolated(format!("{} maps outside k0", p.format(g))));
        }
    }
    let meet = p.intersection(p0, h, cap)?;
    for g in meet.generators() {
        if !p.contains(h0, g) {
            return Err(Error::RelationViolated(format!("{} lies in p0 and h but not in h0", p.format(g))));
        }
    }
    Ok(())
}
