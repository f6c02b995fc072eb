use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use super::homstar::{HomStar, HomStarSpace};
use super::outer::{projection_p, restriction_r, OuterAutoClass};
use crate::error::{Error, Result};
use crate::nilgroup::PcPresentation;
use crate::zmod::{coset_representatives, isolator, Submodule};

/// Cap on the number of cosets of `S` in its isolator.
pub const DEFAULT_COSET_CAP: usize = 4096;

/// A non-trivial elusive class `[Ψ(f)]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElusiveClass {
    /// Coordinates of `f` in `Hom*(N, ν₁N)`.
    pub coords: Vec<BigInt>,
    /// Images of the generators under `Ψ(f)`.
    pub images: Vec<Vec<i64>>,
    pub outer_order: u64,
    /// `ξ` with `Ψ(f)^d = Ad_ξ`, where `d` is the outer order.
    pub power_conjugator: Vec<i64>,
}

#[derive(Clone, Debug)]
pub struct ElusiveReport {
    pub classes: Vec<ElusiveClass>,
    pub automorphisms: Vec<OuterAutoClass>,
    /// Number of cosets of `S` in its isolator, including `S` itself.
    pub cosets: usize,
    /// Non-trivial cosets whose automorphism coincided with an earlier class.
    pub collapsed: usize,
}

/// Generators of `S = Φ(ν₂N)` as a submodule of `Hom*(N, ν₁N)`.
pub fn phi_image(space: &HomStarSpace) -> Result<Submodule> {
    let gens: Vec<Vec<BigInt>> =
        space.nu2().generators().iter().map(|xi| space.phi(xi).map(|f| f.coords)).collect::<Result<_>>()?;
    Ok(Submodule::from_generators(space.hom_module().module.clone(), &gens))
}

pub fn elusive_elements(p: &PcPresentation) -> Result<Vec<OuterAutoClass>> {
    Ok(elusive_report(p, DEFAULT_COSET_CAP)?.automorphisms)
}

pub fn elusive_report(p: &PcPresentation, cap: usize) -> Result<ElusiveReport> {
    let space = HomStarSpace::new(Arc::new(p.clone()))?;
    let s = phi_image(&space)?;
    let s_hat = isolator(&s);
    let mut reps = coset_representatives(&s, &s_hat, cap)?;
    let cosets = reps.len();
    reps.sort();
    let mut classes: Vec<ElusiveClass> = Vec::new();
    let mut automorphisms: Vec<OuterAutoClass> = Vec::new();
    let mut collapsed = 0;
    for coords in reps {
        if s.contains(&coords) {
            continue;
        }
        let f = space.from_coords(&coords)?;
        let beta = space.psi(&f)?;
        if beta.is_inner() {
            return Err(Error::Input("a coset outside S produced an inner automorphism".into()));
        }
        let class = OuterAutoClass { representative: beta, outer_order: None };
        if automorphisms.iter().any(|c| c.same_class(&class)) {
            collapsed += 1;
            continue;
        }
        let (d, xi) = power_to_inner(&space, &s, &f, cosets)?;
        let class = OuterAutoClass { outer_order: Some(d), ..class };
        check_elusive(&class)?;
        classes.push(ElusiveClass {
            coords: f.coords.clone(),
            images: class.representative.images.iter().map(|x| x.exponents().to_vec()).collect(),
            outer_order: d,
            power_conjugator: xi,
        });
        automorphisms.push(class);
    }
    Ok(ElusiveReport { classes, automorphisms, cosets, collapsed })
}

/// Smallest `d` with `d f ∈ S`, with a conjugator for `Ψ(d f)`.
fn power_to_inner(space: &HomStarSpace, s: &Submodule, f: &HomStar, bound: usize) -> Result<(u64, Vec<i64>)> {
    let mut acc = f.clone();
    let mut d = BigInt::one();
    while d.to_usize().is_some_and(|x| x <= bound) {
        if s.contains(&acc.coords) {
            let power = space.psi(&acc)?;
            let xi = power
                .inner_conjugator()
                .ok_or_else(|| Error::Input("element of S did not give an inner automorphism".into()))?;
            return Ok((d.to_u64().expect("small"), xi.into_exponents()));
        }
        acc = space.add(&acc, f);
        d += 1;
    }
    Err(Error::Input("coset element has no multiple in S".into()))
}

fn check_elusive(class: &OuterAutoClass) -> Result<()> {
    if !projection_p(class)?.is_trivial() {
        return Err(Error::Input("elusive class has non-trivial image on the central quotient".into()));
    }
    if !restriction_r(class).is_identity() {
        return Err(Error::Input("elusive class acts non-trivially on the center".into()));
    }
    Ok(())
}
