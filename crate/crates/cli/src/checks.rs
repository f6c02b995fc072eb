use std::sync::Arc;

use nilcert::gogiso::{assemble_isomorphism, verify_extension_adjustment, verify_gog_isomorphism, GogVerdict, ELEMENT_CAP};
use nilcert::malcev::{embed_matrix_group, expm, logm, QMatrix, StrictUpper, UniTriangular};
use nilcert::nilgroup::{FiniteGroupTable, GroupHom, NilElement, PcPresentation};
use nilcert::outsep::{projection_p, restriction_r, verify_certificate, CongruenceCertificate, ElusiveClass, OuterAutoClass};
use nilcert::whitehead::{verify_abelian_witness, verify_finite_witness, verify_nilpotent_witness, verify_refutation, Refutation, Verdict};
use nilcert::zmod::AbelianModule;
use nilcert::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use crate::args::{Command, Options};
use crate::commands::{exponent_system, from_value, read_gog, read_pcp, table_system, whitehead_budget, Solver};
use crate::report::Inputs;
use crate::tuples::parse_tuples;

fn fail(msg: impl Into<String>) -> Error {
    Error::RelationViolated(msg.into())
}

fn elements(v: &Value, key: &str) -> Result<Vec<NilElement>> {
    let raw: Vec<Vec<i64>> = from_value(&v[key], key)?;
    Ok(raw.into_iter().map(NilElement::from_exponents).collect())
}

fn random_word(rng: &mut ChaCha8Rng, n: usize, len: usize) -> Vec<(usize, i64)> {
    (0..rng.gen_range(0..=len)).map(|_| (rng.gen_range(0..n), if rng.gen_bool(0.5) { 1 } else { -1 })).collect()
}

/// Independent checks of a result payload; returns one transcript line per check.
pub fn check(cmd: &Command, inputs: &Inputs, opts: &Options, result: &Value) -> Result<Vec<String>> {
    let mut log = Vec::new();
    match cmd {
        Command::Nf { pcp, words } => {
            let p = read_pcp(inputs, pcp)?;
            let forms = result["normal_forms"].as_array().ok_or_else(|| fail("missing normal forms"))?;
            if forms.len() != words.len() {
                return Err(fail("one normal form per word expected"));
            }
            for f in forms {
                let e = NilElement::from_exponents(from_value(&f["exponents"], "exponents")?);
                if p.normalize(&e) != e || p.collect(&p.word_of(&e)) != e {
                    return Err(fail(format!("{:?} is not a normal form", e.exponents())));
                }
            }
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            for _ in 0..20 {
                let (a, b) = (random_word(&mut rng, p.len(), 8), random_word(&mut rng, p.len(), 8));
                let ab: Vec<_> = a.iter().chain(&b).copied().collect();
                if p.collect(&ab) != p.multiply(&p.collect(&a), &p.collect(&b)) {
                    return Err(fail("collection is not multiplicative on a random pair"));
                }
            }
            log.push(format!("{} normal forms re-collected; 20 random products consistent", forms.len()));
        }
        Command::Ucs { pcp } => {
            let p = read_pcp(inputs, pcp)?;
            let raw: Vec<Vec<Vec<i64>>> = from_value(&result["terms"], "terms")?;
            let terms: Vec<_> = raw.into_iter().map(|g| p.subgroup(&g.into_iter().map(NilElement::from_exponents).collect::<Vec<_>>())).collect();
            if terms.first().map(|t| t.is_trivial()) != Some(true) || terms.last() != Some(&p.whole_group()) {
                return Err(fail("series does not run from 1 to the group"));
            }
            for w in terms.windows(2) {
                if !p.is_subgroup_of(&w[0], &w[1]) || !p.is_normal(&w[1]) {
                    return Err(fail("series is not an ascending chain of normal subgroups"));
                }
                if !p.is_subgroup_of(&p.commutator_subgroup(&p.whole_group(), &w[1]), &w[0]) {
                    return Err(fail("a layer is not central"));
                }
            }
            log.push(format!("{} terms form a central series ending at the group", terms.len()));
        }
        Command::Torsion { pcp } => {
            let p = read_pcp(inputs, pcp)?;
            let gens = elements(result, "generators")?;
            if gens.iter().any(|g| p.element_order(g).is_none()) {
                return Err(fail("a torsion generator has infinite order"));
            }
            let tau = p.subgroup(&gens);
            let elems = p.subgroup_elements(&tau, opts.table_cap())?;
            let m = result["m"].as_i64().ok_or_else(|| fail("missing m"))?;
            if result["order"].as_u64() != Some(elems.len() as u64) {
                return Err(fail("recorded order does not match"));
            }
            let v = p.verbal_power_subgroup(m, opts.table_cap())?;
            if elems.iter().any(|x| !x.is_identity() && p.contains(&v, x)) {
                return Err(fail("G^m meets the torsion subgroup"));
            }
            log.push(format!("torsion subgroup of order {} meets G^{m} trivially", elems.len()));
        }
        Command::Elusive { pcp } => {
            let p = Arc::new(read_pcp(inputs, pcp)?);
            let classes: Vec<ElusiveClass> = from_value(&result["elusive"], "elusive classes")?;
            for (k, c) in classes.iter().enumerate() {
                check_elusive_class(&p, c).map_err(|e| fail(format!("class {k}: {e}")))?;
            }
            log.push(format!("{} classes are non-inner, elusive, and of the recorded outer order", classes.len()));
        }
        Command::SeparateTorsion { .. } => {
            let cert: CongruenceCertificate = from_value(result, "certificate")?;
            verify_certificate(&cert, opts.table_cap())?;
            log.push(format!("certificate re-verified: index {}, {} survival records", cert.index, cert.survival_log.len()));
        }
        Command::Whitehead { pcp, tuples } => {
            let p = read_pcp(inputs, pcp)?;
            let tf = parse_tuples(&inputs.read(tuples)?, &p)?;
            let solver: Solver = from_value(&result["solver"], "solver")?;
            let verdict: Verdict = from_value(&result["verdict"], "verdict")?;
            match (&verdict, solver) {
                (Verdict::Equivalent { witness }, Solver::Abelian) => {
                    verify_abelian_witness(&AbelianModule::free(p.len()), &exponent_system(&tf.source), &exponent_system(&tf.target), witness)?
                }
                (Verdict::Equivalent { witness }, Solver::Finite) => {
                    let t = FiniteGroupTable::from_pc(&p, ELEMENT_CAP)?;
                    verify_finite_witness(&t.table, &table_system(&t, &tf.source), &table_system(&t, &tf.target), witness)?
                }
                (Verdict::Equivalent { witness }, Solver::Nilpotent) => verify_nilpotent_witness(&p, &tf.source, &tf.target, witness)?,
                (Verdict::NotEquivalent { refutation: r @ Refutation::Quotient { .. } }, _) => {
                    verify_refutation(&p, &tf.source, &tf.target, r, whitehead_budget(opts).quotient_cap)?
                }
                _ => {}
            }
            log.push(match verdict {
                Verdict::Equivalent { .. } => "witness carries the source system to the target".into(),
                Verdict::NotEquivalent { refutation: Refutation::Quotient { order, .. } } => {
                    format!("refutation re-derived in the quotient of order {order}")
                }
                Verdict::NotEquivalent { .. } => "refutation is exhaustive; checked by recomputation".into(),
                Verdict::Unknown { .. } => "no certificate to check".into(),
            });
        }
        Command::GogIso { source, target } => {
            let x1 = read_gog(inputs, source)?;
            let x2 = read_gog(inputs, target)?;
            let verdict: GogVerdict = from_value(result, "verdict")?;
            if let GogVerdict::Equivalent { graph_map, psi, adjustment, isomorphism } = &verdict {
                let y1 = x1.gog.relabel(graph_map)?;
                if let Some(v) = verify_gog_isomorphism(&y1, &x2.gog, isomorphism)?.violation() {
                    return Err(fail(format!("isomorphism diagram fails: {}", v.reason)));
                }
                if let Some(v) = verify_extension_adjustment(&y1, &x2.gog, psi, adjustment).violation() {
                    return Err(fail(format!("extension adjustment fails: {}", v.reason)));
                }
                if assemble_isomorphism(&y1, &x2.gog, psi, adjustment)? != *isomorphism {
                    return Err(fail("isomorphism is not assembled from the adjustment"));
                }
                log.push("isomorphism diagrams commute; adjustment verified; attaching elements are g_e^-1".into());
            } else {
                log.push("no witness to check".into());
            }
        }
        Command::Embed { pcp, class_cap } => {
            let p = read_pcp(inputs, pcp)?;
            let images: Vec<QMatrix> = from_value(&result["images"], "images")?;
            let emb = embed_matrix_group(&p, *class_cap)?;
            if emb.images.iter().map(|u| u.matrix().clone()).collect::<Vec<_>>() != images {
                return Err(fail("recorded images differ from the embedding"));
            }
            emb.verify_relations(&p)?;
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            for _ in 0..50 {
                let w = random_word(&mut rng, p.len(), 12);
                if emb.apply_word(&w) != emb.apply(&p.collect(&w)) {
                    return Err(fail("matrix product disagrees with collection on a random word"));
                }
            }
            log.push("relations hold in the images; 50 random words agree with collection".into());
        }
        Command::Expm { .. } => {
            let input = StrictUpper::new(from_value(&result["input"], "input")?)?;
            let output = UniTriangular::new(from_value(&result["output"], "output")?)?;
            if logm(&output) != input {
                return Err(fail("log of the output is not the input"));
            }
            log.push("log(exp(M)) = M".into());
        }
        Command::Logm { .. } => {
            let input = UniTriangular::new(from_value(&result["input"], "input")?)?;
            let output = StrictUpper::new(from_value(&result["output"], "output")?)?;
            if expm(&output) != input {
                return Err(fail("exp of the output is not the input"));
            }
            log.push("exp(log(U)) = U".into());
        }
        Command::Verify { .. } => {}
    }
    Ok(log)
}

fn check_elusive_class(p: &Arc<PcPresentation>, c: &ElusiveClass) -> Result<()> {
    let images = c.images.iter().map(|x| NilElement::from_exponents(x.clone())).collect();
    let rep = GroupHom::from_images(p.clone(), p.clone(), images)?;
    if !rep.is_automorphism() || rep.is_inner() {
        return Err(fail("not a non-inner automorphism"));
    }
    let class = OuterAutoClass::new(rep.clone())?;
    if !projection_p(&class)?.is_trivial() || !restriction_r(&class).is_identity() {
        return Err(fail("not elusive"));
    }
    let mut power = rep.clone();
    for d in 1..c.outer_order {
        if power.is_inner() {
            return Err(fail(format!("already inner at power {d}")));
        }
        power = power.compose(&rep)?;
    }
    let inner = GroupHom::inner(p.clone(), &NilElement::from_exponents(c.power_conjugator.clone()));
    if power.images != inner.images {
        return Err(fail("the recorded power conjugator does not realize the power"));
    }
    Ok(())
}
