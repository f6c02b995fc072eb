use std::sync::Arc;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nilgroup::{GroupHom, NilElement, PcPresentation, Quotient, Subgroup};
use crate::zmod::{hom_module, AbelianPresentation, HomModule, IntMatrix};

/// A homomorphism `N -> ν₁N` killing `ν₁N`, stored by its coordinates in `Hom(N/(ν₁N·[N,N]), ν₁N)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HomStar {
    pub coords: Vec<BigInt>,
}

/// The ambient data for `Hom*(N, ν₁N)` of a fixed presentation.
#[derive(Clone, Debug)]
pub struct HomStarSpace {
    parent: Arc<PcPresentation>,
    center: Subgroup,
    nu2: Subgroup,
    center_pres: AbelianPresentation,
    quotient: Quotient,
    quotient_pres: AbelianPresentation,
    homs: HomModule,
}

impl HomStarSpace {
    pub fn new(parent: Arc<PcPresentation>) -> Result<Self> {
        let ucs = parent.upper_central_series();
        let center = ucs.term(1).clone();
        let nu2 = if ucs.length() >= 2 { ucs.term(2).clone() } else { parent.whole_group() };
        let center_pres = parent.abelian_presentation_of(&center);
        let whole = parent.whole_group();
        let derived = parent.commutator_subgroup(&whole, &whole);
        let kernel = parent.subgroup_join(&center, &derived);
        let quotient = parent.quotient(&kernel)?;
        let qp = &quotient.presentation;
        let quotient_pres = qp.abelian_presentation_of(&qp.whole_group());
        let homs = hom_module(&quotient_pres.module, &center_pres.module);
        Ok(HomStarSpace { parent, center, nu2, center_pres, quotient, quotient_pres, homs })
    }

    pub fn parent(&self) -> &Arc<PcPresentation> {
        &self.parent
    }

    pub fn center(&self) -> &Subgroup {
        &self.center
    }

    /// `ν₂N`, the second term of the upper central series.
    pub fn nu2(&self) -> &Subgroup {
        &self.nu2
    }

    pub fn hom_module(&self) -> &HomModule {
        &self.homs
    }

    pub fn zero(&self) -> HomStar {
        HomStar { coords: self.homs.module.zero() }
    }

    pub fn add(&self, f: &HomStar, g: &HomStar) -> HomStar {
        HomStar { coords: self.homs.module.add(&f.coords, &g.coords) }
    }

    pub fn neg(&self, f: &HomStar) -> HomStar {
        HomStar { coords: self.homs.module.neg(&f.coords) }
    }

    pub fn scale(&self, k: i64, f: &HomStar) -> HomStar {
        HomStar { coords: self.homs.module.scale(&BigInt::from(k), &f.coords) }
    }

    pub fn from_coords(&self, coords: &[BigInt]) -> Result<HomStar> {
        if coords.len() != self.homs.module.dim() {
            return Err(Error::Dimension(format!("expected {} coordinates, got {}", self.homs.module.dim(), coords.len())));
        }
        Ok(HomStar { coords: self.homs.module.reduce(coords) })
    }

    pub fn matrix(&self, f: &HomStar) -> IntMatrix {
        self.homs.hom_from_coords(&f.coords)
    }

    /// Canonical coordinates of a central element.
    pub fn center_coordinates(&self, z: &NilElement) -> Option<Vec<BigInt>> {
        self.parent.abelian_coordinates(&self.center, &self.center_pres, z)
    }

    pub fn center_element(&self, y: &[BigInt]) -> NilElement {
        self.parent.abelian_element(&self.center, &self.center_pres, y)
    }

    pub fn center_presentation(&self) -> &AbelianPresentation {
        &self.center_pres
    }

    /// `f(x)` as an element of `ν₁N`.
    pub fn eval(&self, f: &HomStar, x: &NilElement) -> NilElement {
        let qx = self.quotient.project(&self.parent, x);
        let qp = &self.quotient.presentation;
        let a = qp
            .abelian_coordinates(&qp.whole_group(), &self.quotient_pres, &qx)
            .expect("every element lies in the whole group");
        let y = self.homs.apply(&self.matrix(f), &a);
        self.center_element(&y)
    }

    /// `x -> [x, ξ]` for `ξ ∈ ν₂N`.
    pub fn phi(&self, xi: &NilElement) -> Result<HomStar> {
        let p = &self.parent;
        if !p.contains(&self.nu2, xi) {
            return Err(Error::NotInSubgroup(format!("{} is not in the second center", p.format(xi))));
        }
        let n = self.quotient.presentation.len();
        let dim_a = self.quotient_pres.module.dim();
        let mut rows = Vec::with_capacity(dim_a);
        for k in 0..dim_a {
            let gens = self.quotient_pres.lift(&self.quotient_pres.module.unit(k));
            let mut qx = NilElement::identity(n);
            for (i, e) in gens.iter().enumerate() {
                let e: i64 = e.try_into().map_err(|_| Error::Input("coordinate overflow".into()))?;
                if e != 0 {
                    let g = self.quotient.presentation.generator(i);
                    qx = self.quotient.presentation.multiply(&qx, &self.quotient.presentation.power(&g, e));
                }
            }
            let x = self.quotient.lift(p.len(), &qx);
            let c = p.commutator(&x, xi);
            rows.push(self.center_coordinates(&c).expect("commutator with the second center is central"));
        }
        let m = IntMatrix::from_rows(self.center_pres.module.dim(), &rows);
        Ok(HomStar { coords: self.homs.coords(&m)? })
    }

    /// The automorphism `x -> x f(x)`.
    pub fn psi(&self, f: &HomStar) -> Result<GroupHom> {
        let p = &self.parent;
        let images = p.generators().iter().map(|g| p.multiply(g, &self.eval(f, g))).collect();
        GroupHom::from_images(p.clone(), p.clone(), images)
    }
}
