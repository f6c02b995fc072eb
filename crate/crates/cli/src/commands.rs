use std::path::Path;

use nilcert::gogiso::{decide_gog_iso, parse_gog, GogBudget, GogDocument, GogVerdict, ELEMENT_CAP};
use nilcert::malcev::{embed_matrix_group, expm, logm, rational_from_str, rational_to_string, QMatrix, StrictUpper, UniTriangular};
use nilcert::nilgroup::{FiniteGroupTable, NilElement, PcPresentation, Subgroup, DEFAULT_AUT_CAP};
use nilcert::outsep::{elusive_report, separate_torsion, CertificateStatus, SeparateOptions, DEFAULT_COSET_CAP};
use nilcert::pcp;
use nilcert::whitehead::{whitehead_abelian, whitehead_finite_with_cap, whitehead_nilpotent, TupleSystem, Verdict, WhiteheadBudget};
use nilcert::zmod::AbelianModule;
use nilcert::{Error, Result};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::args::{Command, Options};
use crate::report::{Inputs, Status};
use crate::tuples::parse_tuples;

pub struct Outcome {
    pub result: Value,
    pub text: String,
    pub status: Status,
}

fn decided(result: Value, text: String) -> Outcome {
    Outcome { result, text, status: Status::Decided }
}

pub fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

pub fn from_value<T: for<'de> Deserialize<'de>>(v: &Value, what: &str) -> Result<T> {
    serde_json::from_value(v.clone()).map_err(|e| Error::Input(format!("malformed {what}: {e}")))
}

pub fn read_pcp(inputs: &Inputs, path: &Path) -> Result<PcPresentation> {
    pcp::parse(&inputs.read(path)?)
}

pub fn read_gog(inputs: &Inputs, path: &Path) -> Result<GogDocument> {
    let text = inputs.read(path)?;
    parse_gog(&text, &|name: &str| inputs.read_relative(path, name))
}

fn exps(gens: &[NilElement]) -> Vec<Vec<i64>> {
    gens.iter().map(|g| g.exponents().to_vec()).collect()
}

fn show_subgroup(p: &PcPresentation, s: &Subgroup) -> String {
    if s.is_trivial() {
        return "<1>".into();
    }
    let gens: Vec<String> = s.generators().iter().map(|g| p.format(g)).collect();
    format!("<{}>", gens.join(", "))
}

fn tuple_text(v: &[i64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(","))
}

pub fn parse_matrix(dim: usize, entries: &str) -> Result<QMatrix> {
    let rows: Vec<&str> = entries.split(';').collect();
    if rows.len() != dim {
        return Err(Error::Dimension(format!("expected {dim} rows, found {}", rows.len())));
    }
    let mut out = Vec::with_capacity(dim);
    for (i, row) in rows.iter().enumerate() {
        let cells = row
            .split_whitespace()
            .map(|c| rational_from_str(c).ok_or_else(|| Error::Input(format!("row {}: `{c}` is not a rational", i + 1))))
            .collect::<Result<Vec<_>>>()?;
        if cells.len() != dim {
            return Err(Error::Dimension(format!("row {} has {} entries, expected {dim}", i + 1, cells.len())));
        }
        out.push(cells);
    }
    QMatrix::from_rows(out)
}

pub fn format_matrix(m: &QMatrix) -> String {
    m.to_rows().iter().map(|r| r.iter().map(rational_to_string).collect::<Vec<_>>().join(" ")).collect::<Vec<_>>().join("; ")
}

/// Which Whitehead solver a presentation is routed to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Solver {
    Abelian,
    Finite,
    Nilpotent,
}

pub fn solver_for(p: &PcPresentation) -> Solver {
    if p.is_abelian() && !p.is_finite() && p.relative_orders().iter().all(Option::is_none) {
        Solver::Abelian
    } else if p.order().is_some_and(|n| n <= ELEMENT_CAP as u128) {
        Solver::Finite
    } else {
        Solver::Nilpotent
    }
}

pub fn whitehead_budget(opts: &Options) -> WhiteheadBudget {
    let mut b = opts.budget.map(WhiteheadBudget::with_level).unwrap_or_default();
    b.quotient_cap = opts.quotient_cap.unwrap_or(DEFAULT_AUT_CAP);
    b
}

pub fn table_system(t: &nilcert::nilgroup::PcTable, s: &TupleSystem<NilElement>) -> TupleSystem<usize> {
    TupleSystem::new(s.tuples.iter().map(|tu| tu.iter().map(|x| t.index_of(x)).collect()).collect())
}

pub fn exponent_system(s: &TupleSystem<NilElement>) -> TupleSystem<Vec<i64>> {
    TupleSystem::new(s.tuples.iter().map(|tu| tu.iter().map(|x| x.exponents().to_vec()).collect()).collect())
}

pub fn execute(cmd: &Command, inputs: &Inputs, opts: &Options) -> Result<Outcome> {
    match cmd {
        Command::Nf { pcp, words } => {
            let p = read_pcp(inputs, pcp)?;
            let mut forms = Vec::new();
            let mut text = String::new();
            for w in words {
                let word = pcp::parse_word(w, p.gen_names())
                    .map_err(|(c, m)| Error::Parse { line: 1, column: c, message: format!("in `{w}`: {m}") })?;
                let e = p.collect(&word);
                text.push_str(&format!("{} -> {}\n", if w.trim().is_empty() { "1" } else { w.trim() }, p.format(&e)));
                forms.push(json!({"word": w, "exponents": e.exponents(), "normal_form": p.format(&e)}));
            }
            Ok(decided(json!({"group": p.name(), "normal_forms": forms}), text))
        }
        Command::Ucs { pcp } => {
            let p = read_pcp(inputs, pcp)?;
            let series = p.upper_central_series();
            let mut text = format!("class {}\n", series.length());
            for (i, t) in series.terms.iter().enumerate() {
                text.push_str(&format!("nu_{i} = {}\n", show_subgroup(&p, t)));
            }
            let terms: Vec<Vec<Vec<i64>>> = series.terms.iter().map(|t| exps(t.generators())).collect();
            Ok(decided(json!({"group": p.name(), "class": series.length(), "terms": terms}), text))
        }
        Command::Torsion { pcp } => {
            let p = read_pcp(inputs, pcp)?;
            let td = p.torsion_data(opts.table_cap())?;
            let text = format!(
                "torsion subgroup {}\norder {}\nexponent {}\nm {}\n",
                show_subgroup(&p, &td.tau),
                td.elements.len(),
                td.exponent,
                td.m
            );
            let result = json!({
                "group": p.name(),
                "generators": exps(td.tau.generators()),
                "order": td.elements.len(),
                "exponent": td.exponent,
                "m": td.m,
            });
            Ok(decided(result, text))
        }
        Command::Elusive { pcp } => {
            let p = read_pcp(inputs, pcp)?;
            let report = elusive_report(&p, DEFAULT_COSET_CAP)?;
            let mut text = format!("{} elusive classes\n", report.classes.len());
            for (k, c) in report.classes.iter().enumerate() {
                let imgs: Vec<String> = c.images.iter().map(|x| p.format(&NilElement::from_exponents(x.clone()))).collect();
                text.push_str(&format!("class {k}: outer order {}, generators -> [{}]\n", c.outer_order, imgs.join(", ")));
            }
            Ok(decided(json!({"elusive": report.classes}), text))
        }
        Command::SeparateTorsion { pcp } => {
            let p = read_pcp(inputs, pcp)?;
            let mut so = SeparateOptions { quotient_cap: opts.table_cap(), ..SeparateOptions::default() };
            if let Some(b) = opts.budget {
                so.max_steps = b;
            }
            let cert = separate_torsion(&p, &so)?;
            let gens: Vec<String> = cert.generators.iter().map(|g| tuple_text(g)).collect();
            let status = match cert.status {
                CertificateStatus::Complete => Status::Decided,
                CertificateStatus::BudgetExhausted => Status::Unknown,
            };
            let text = format!(
                "status {}\nindex {}\nelusive classes {}\nsubgroup generators [{}]\n",
                if cert.is_complete() { "complete" } else { "budget-exhausted" },
                cert.index,
                cert.elusive.len(),
                gens.join(",")
            );
            Ok(Outcome { result: to_value(&cert), text, status })
        }
        Command::Whitehead { pcp, tuples } => {
            let p = read_pcp(inputs, pcp)?;
            let tf = parse_tuples(&inputs.read(tuples)?, &p)?;
            let solver = solver_for(&p);
            let verdict = match solver {
                Solver::Abelian => {
                    whitehead_abelian(&AbelianModule::free(p.len()), &exponent_system(&tf.source), &exponent_system(&tf.target))?
                }
                Solver::Finite => {
                    let t = FiniteGroupTable::from_pc(&p, ELEMENT_CAP)?;
                    let cap = opts.quotient_cap.unwrap_or(DEFAULT_AUT_CAP);
                    whitehead_finite_with_cap(&t.table, &table_system(&t, &tf.source), &table_system(&t, &tf.target), cap)?
                }
                Solver::Nilpotent => whitehead_nilpotent(&p, &tf.source, &tf.target, &whitehead_budget(opts))?,
            };
            let status = if verdict.is_unknown() { Status::Unknown } else { Status::Decided };
            let text = match &verdict {
                Verdict::Equivalent { witness } => format!("equivalent\nautomorphism {:?}\nconjugators {:?}\n", witness.automorphism, witness.conjugators),
                Verdict::NotEquivalent { refutation } => format!("not equivalent\n{}\n", serde_json::to_string(refutation).expect("serializable")),
                Verdict::Unknown { report } => format!("unknown\n{}\n", serde_json::to_string(report).expect("serializable")),
            };
            Ok(Outcome { result: json!({"solver": solver, "verdict": verdict}), text, status })
        }
        Command::GogIso { source, target } => {
            let x1 = read_gog(inputs, source)?;
            let x2 = read_gog(inputs, target)?;
            let white = if x2.white_orbits.is_empty() { &x1.white_orbits } else { &x2.white_orbits };
            let budget = opts.budget.map(GogBudget::with_level).unwrap_or_default();
            let verdict = decide_gog_iso(&x1.gog, &x2.gog, white, &budget)?;
            let status = if verdict.is_unknown() { Status::Unknown } else { Status::Decided };
            let text = match &verdict {
                GogVerdict::Equivalent { graph_map, .. } => format!("equivalent\ngraph map {:?}\n", graph_map.vertices),
                GogVerdict::NotEquivalent { refutation } => format!("not equivalent\n{}\n", serde_json::to_string(refutation).expect("serializable")),
                GogVerdict::Unknown { report } => format!("unknown\n{}\n", serde_json::to_string(report).expect("serializable")),
            };
            Ok(Outcome { result: to_value(&verdict), text, status })
        }
        Command::Embed { pcp, class_cap } => {
            let p = read_pcp(inputs, pcp)?;
            let emb = embed_matrix_group(&p, *class_cap)?;
            let mut text = format!("dimension {}\n", emb.dim);
            for (name, m) in p.gen_names().iter().zip(&emb.images) {
                text.push_str(&format!("{name}: {}\n", format_matrix(m.matrix())));
            }
            Ok(decided(to_value(&emb), text))
        }
        Command::Expm { dim, entries } => {
            let m = StrictUpper::new(parse_matrix(*dim, entries)?)?;
            let u = expm(&m);
            let text = format!("{}\n", format_matrix(u.matrix()));
            Ok(decided(json!({"dim": dim, "input": m.matrix(), "output": u.matrix()}), text))
        }
        Command::Logm { dim, entries } => {
            let u = UniTriangular::new(parse_matrix(*dim, entries)?)?;
            let m = logm(&u);
            let text = format!("{}\n", format_matrix(m.matrix()));
            Ok(decided(json!({"dim": dim, "input": u.matrix(), "output": m.matrix()}), text))
        }
        Command::Verify { .. } => Err(Error::Input("verify is not a computation".into())),
    }
}
