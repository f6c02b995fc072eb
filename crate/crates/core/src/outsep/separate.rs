use std::sync::Arc;

use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::elusive::{elusive_report, ElusiveClass, DEFAULT_COSET_CAP};
use super::goodenough::good_enough_subgroup;
use super::outer::{projection_p, restriction_r, survives, OuterAutoClass, SurvivalEvidence};
use crate::error::{Error, Result};
use crate::nilgroup::{GroupHom, NilElement, PcPresentation, Subgroup, DEFAULT_QUOTIENT_CAP};
use crate::pcp;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeparateOptions {
    /// Maximum number of chain steps `N_j` tried after `P₀`.
    pub max_steps: usize,
    pub quotient_cap: usize,
    pub coset_cap: usize,
}

impl Default for SeparateOptions {
    fn default() -> Self {
        SeparateOptions { max_steps: 8, quotient_cap: DEFAULT_QUOTIENT_CAP, coset_cap: DEFAULT_COSET_CAP }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertificateStatus {
    Complete,
    BudgetExhausted,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainStep {
    pub label: String,
    /// Exponent of the verbal power subgroup intersected in, if any.
    pub power: Option<i64>,
    pub generators: Vec<Vec<i64>>,
    pub index: u128,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurvivalRecord {
    pub class: usize,
    pub step: usize,
    pub evidence: SurvivalEvidence,
}

/// A characteristic finite-index subgroup separating the torsion of `Out(N)`, with the checks that justify it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CongruenceCertificate {
    pub group: String,
    pub presentation: String,
    pub status: CertificateStatus,
    /// Abelian input handled by the congruence-kernel argument for `GL(n, Z)`.
    pub base_case: bool,
    /// Exponent of the power subgroup used in the base case.
    pub exponent: Option<i64>,
    pub generators: Vec<Vec<i64>>,
    pub index: u128,
    pub chain: Vec<ChainStep>,
    pub elusive: Vec<ElusiveClass>,
    pub collapsed: usize,
    pub survival_log: Vec<SurvivalRecord>,
    /// Certificate for the central quotient, used to build `P₀`.
    pub quotient_certificate: Option<Box<CongruenceCertificate>>,
}

impl CongruenceCertificate {
    pub fn is_complete(&self) -> bool {
        self.status == CertificateStatus::Complete
    }

    pub fn subgroup(&self, p: &PcPresentation) -> Subgroup {
        let gens: Vec<NilElement> = self.generators.iter().map(|g| NilElement::from_exponents(g.clone())).collect();
        p.subgroup(&gens)
    }
}

fn gens_of(s: &Subgroup) -> Vec<Vec<i64>> {
    s.generators().iter().map(|g| g.exponents().to_vec()).collect()
}

fn step(p: &PcPresentation, label: &str, power: Option<i64>, s: &Subgroup) -> Result<ChainStep> {
    Ok(ChainStep {
        label: label.into(),
        power,
        generators: gens_of(s),
        index: p.index(s).ok_or(Error::IndexInfinite)?,
    })
}

/// Exponent of the torsion of an abelian subgroup times 3.
fn base_exponent(p: &PcPresentation, sub: &Subgroup) -> Result<i64> {
    let e = p.abelian_presentation_of(sub).module.torsion_exponent();
    e.to_i64().and_then(|e| e.checked_mul(3)).ok_or_else(|| Error::Input("torsion exponent overflow".into()))
}

fn class_of(p: &Arc<PcPresentation>, c: &ElusiveClass) -> Result<OuterAutoClass> {
    let images = c.images.iter().map(|x| NilElement::from_exponents(x.clone())).collect();
    let rep = GroupHom::from_images(p.clone(), p.clone(), images)?;
    Ok(OuterAutoClass { representative: rep, outer_order: Some(c.outer_order) })
}

pub fn separate_torsion(p: &PcPresentation, opts: &SeparateOptions) -> Result<CongruenceCertificate> {
    let cap = opts.quotient_cap;
    let mut cert = CongruenceCertificate {
        group: p.name().to_string(),
        presentation: pcp::to_string(p),
        status: CertificateStatus::Complete,
        base_case: false,
        exponent: None,
        generators: Vec::new(),
        index: 1,
        chain: vec![step(p, "N", None, &p.whole_group())?],
        elusive: Vec::new(),
        collapsed: 0,
        survival_log: Vec::new(),
        quotient_certificate: None,
    };
    if p.is_abelian() {
        let e = base_exponent(p, &p.whole_group())?;
        let s = p.verbal_power_subgroup(e, cap)?;
        cert.base_case = true;
        cert.exponent = Some(e);
        cert.chain.push(step(p, "N^e", Some(e), &s)?);
        cert.generators = gens_of(&s);
        cert.index = p.index(&s).ok_or(Error::IndexInfinite)?;
        return Ok(cert);
    }

    let center = p.center();
    let e1 = base_exponent(p, &center)?;
    let n0 = p.subgroup(&center.generators().iter().map(|g| p.power(g, e1)).collect::<Vec<_>>());
    let q = p.quotient(&center)?;
    let sub = separate_torsion(&q.presentation, opts)?;
    let k0 = sub.subgroup(&q.presentation);
    let sub_complete = sub.is_complete();
    cert.quotient_certificate = Some(Box::new(sub));
    if !sub_complete {
        cert.status = CertificateStatus::BudgetExhausted;
        return Ok(cert);
    }
    let ge = good_enough_subgroup(p, &center, &n0, &k0, cap)?;
    let p0 = ge.subgroup;
    cert.chain.push(step(p, "P0", Some(ge.power), &p0)?);

    let report = elusive_report(p, opts.coset_cap)?;
    cert.elusive = report.classes;
    cert.collapsed = report.collapsed;
    let mut current = p0.clone();
    if !report.automorphisms.is_empty() {
        let mut done = false;
        let mut lcm: i64 = 1;
        for j in 1..=opts.max_steps {
            lcm = lcm.lcm(&(j as i64));
            let b = lcm * 3;
            let idx_guess = p.index(&p0).unwrap_or(u128::MAX);
            if idx_guess > cap as u128 {
                break;
            }
            let v = match p.verbal_power_subgroup(b, cap) {
                Ok(v) => v,
                Err(Error::CapExceeded { .. }) => break,
                Err(e) => return Err(e),
            };
            let nj = p.intersection(&p0, &v, cap)?;
            let index = p.index(&nj).ok_or(Error::IndexInfinite)?;
            if index > cap as u128 {
                break;
            }
            cert.chain.push(step(p, &format!("N_{j}"), Some(b), &nj)?);
            let mut all = true;
            for (i, class) in report.automorphisms.iter().enumerate() {
                let evidence = survives(class, &nj, cap)?;
                all &= evidence.survives;
                cert.survival_log.push(SurvivalRecord { class: i, step: j, evidence });
            }
            current = nj;
            if all {
                done = true;
                break;
            }
        }
        if !done {
            cert.status = CertificateStatus::BudgetExhausted;
        }
    }
    cert.generators = gens_of(&current);
    cert.index = p.index(&current).ok_or(Error::IndexInfinite)?;
    Ok(cert)
}

/// Re-checks every claim recorded in a certificate against the presentation it carries.
pub fn verify_certificate(cert: &CongruenceCertificate, cap: usize) -> Result<()> {
    let p = Arc::new(pcp::parse(&cert.presentation)?);
    let s = cert.subgroup(&p);
    if !p.is_normal(&s) {
        return Err(Error::NotNormal);
    }
    if p.index(&s) != Some(cert.index) {
        return Err(Error::RelationViolated("recorded index does not match".into()));
    }
    if cert.base_case {
        let e = cert.exponent.ok_or_else(|| Error::Input("base case without exponent".into()))?;
        if !p.is_abelian() || e % 3 != 0 || p.verbal_power_subgroup(e, cap)? != s {
            return Err(Error::RelationViolated("base case subgroup is not the recorded power subgroup".into()));
        }
    }
    for c in &cert.elusive {
        let class = class_of(&p, c)?;
        if !class.representative.is_automorphism() || class.is_trivial() {
            return Err(Error::RelationViolated("elusive class is not a non-inner automorphism".into()));
        }
        if !projection_p(&class)?.is_trivial() || !restriction_r(&class).is_identity() {
            return Err(Error::RelationViolated("class is not elusive".into()));
        }
        if cert.is_complete() {
            let ev = survives(&class, &s, cap)?;
            if !ev.survives {
                return Err(Error::RelationViolated("elusive class dies in the final quotient".into()));
            }
        }
    }
    for r in cert.survival_log.iter().filter(|r| r.evidence.survives) {
        let c = cert.elusive.get(r.class).ok_or_else(|| Error::Input("log refers to an unknown class".into()))?;
        let st = cert.chain.iter().find(|s| s.label == format!("N_{}", r.step));
        let st = st.ok_or_else(|| Error::Input("log refers to an unknown chain step".into()))?;
        let sub = p.subgroup(&st.generators.iter().map(|g| NilElement::from_exponents(g.clone())).collect::<Vec<_>>());
        let ev = survives(&class_of(&p, c)?, &sub, cap)?;
        if ev.survives != r.evidence.survives || ev.quotient_order != r.evidence.quotient_order {
            return Err(Error::RelationViolated(format!("survival record for class {} at step {} does not replay", r.class, r.step)));
        }
    }
    if let Some(sub) = &cert.quotient_certificate {
        verify_certificate(sub, cap)?;
    }
    Ok(())
}
