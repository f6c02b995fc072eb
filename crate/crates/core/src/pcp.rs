//! The line-oriented `.pcp` text format for polycyclic presentations.
//!
//! ```text
//! group heisenberg
//! gen x order inf
//! gen y order inf
//! gen z order inf
//! conj y ^ x = y z^-1
//! ```
//!
//! Relations: `conj <gj> ^ <gi> = <word>`, `conj <gj> ^ <gi>^-1 = <word>`,
//! `pow <gi> = <word>`. Words are whitespace-separated tokens `name` or
//! `name^k`; `1` denotes the empty word. `#` starts a comment.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::nilgroup::{PcPresentation, Relation, RelationKind};

fn err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, column, message: message.into() }
}

/// Parses one syllable token like `x`, `x^3` or `x^-1`.
fn parse_token(tok: &str, names: &[String]) -> std::result::Result<(usize, i64), String> {
    let (name, exp) = match tok.split_once('^') {
        Some((n, e)) => (n, e.parse::<i64>().map_err(|_| format!("bad exponent '{e}'"))?),
        None => (tok, 1),
    };
    let g = names.iter().position(|x| x == name).ok_or_else(|| format!("unknown generator '{name}'"))?;
    Ok((g, exp))
}

/// Parses a word; on failure returns the 1-based column within `word` and a message.
pub fn parse_word(word: &str, names: &[String]) -> std::result::Result<Vec<(usize, i64)>, (usize, String)> {
    let mut out = Vec::new();
    for (col, tok) in tokens(word) {
        if tok == "1" {
            continue;
        }
        out.push(parse_token(tok, names).map_err(|m| (col, m))?);
    }
    Ok(out)
}

/// Whitespace-separated tokens with their 1-based starting columns.
fn tokens(s: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in s.char_indices() {
        match (c.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(st)) => {
                out.push((s[..st].chars().count() + 1, &s[st..i]));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(st) = start {
        out.push((s[..st].chars().count() + 1, &s[st..]));
    }
    out
}

pub fn parse(text: &str) -> Result<PcPresentation> {
    let mut name: Option<String> = None;
    let mut gens: Vec<(String, Option<u64>)> = Vec::new();
    let mut names: Vec<String> = Vec::new();
    let mut rels: Vec<Relation> = Vec::new();
    let mut last_line = 0;
    for (ln, raw) in text.lines().enumerate() {
        let line_no = ln + 1;
        last_line = line_no;
        let line = raw.split('#').next().unwrap_or("");
        let toks = tokens(line);
        let Some(&(c0, kw)) = toks.first() else { continue };
        match kw {
            "group" => {
                if toks.len() != 2 {
                    return Err(err(line_no, c0, "expected 'group <name>'"));
                }
                if name.is_some() {
                    return Err(err(line_no, c0, "duplicate 'group' line"));
                }
                name = Some(toks[1].1.to_string());
            }
            "gen" => {
                if !rels.is_empty() {
                    return Err(err(line_no, c0, "generators must be declared before relations"));
                }
                if toks.len() != 4 || toks[2].1 != "order" {
                    return Err(err(line_no, c0, "expected 'gen <name> order (inf|m)'"));
                }
                let g = toks[1].1;
                if !g.chars().all(|c| c.is_alphanumeric() || c == '_') || g == "1" {
                    return Err(err(line_no, toks[1].0, format!("invalid generator name '{g}'")));
                }
                if names.iter().any(|x| x == g) {
                    return Err(err(line_no, toks[1].0, format!("duplicate generator '{g}'")));
                }
                let order = match toks[3].1 {
                    "inf" => None,
                    m => match m.parse::<u64>() {
                        Ok(v) if v >= 2 => Some(v),
                        _ => return Err(err(line_no, toks[3].0, format!("order must be 'inf' or an integer >= 2, got '{m}'"))),
                    },
                };
                names.push(g.to_string());
                gens.push((g.to_string(), order));
            }
            "conj" => {
                // conj gj ^ gi = word    |   conj gj ^ gi^-1 = word
                if toks.len() < 5 || toks[2].1 != "^" || toks[4].1 != "=" {
                    return Err(err(line_no, c0, "expected 'conj <gj> ^ <gi> = <word>'"));
                }
                let j = names
                    .iter()
                    .position(|x| x == toks[1].1)
                    .ok_or_else(|| err(line_no, toks[1].0, format!("unknown generator '{}'", toks[1].1)))?;
                let (gi, inv) = match toks[3].1.strip_suffix("^-1") {
                    Some(g) => (g, true),
                    None => (toks[3].1, false),
                };
                let i = names
                    .iter()
                    .position(|x| x == gi)
                    .ok_or_else(|| err(line_no, toks[3].0, format!("unknown generator '{gi}'")))?;
                if i >= j {
                    return Err(err(line_no, toks[3].0, "the conjugating generator must precede the conjugated one"));
                }
                let word = parse_rhs(&toks[5..], &names, line_no)?;
                rels.push(if inv { Relation::conj_inv(j, i, word) } else { Relation::conj(j, i, word) });
            }
            "pow" => {
                if toks.len() < 3 || toks[2].1 != "=" {
                    return Err(err(line_no, c0, "expected 'pow <gi> = <word>'"));
                }
                let i = names
                    .iter()
                    .position(|x| x == toks[1].1)
                    .ok_or_else(|| err(line_no, toks[1].0, format!("unknown generator '{}'", toks[1].1)))?;
                if gens[i].1.is_none() {
                    return Err(err(line_no, toks[1].0, format!("'{}' has infinite order", toks[1].1)));
                }
                let word = parse_rhs(&toks[3..], &names, line_no)?;
                rels.push(Relation::pow(i, word));
            }
            other => return Err(err(line_no, c0, format!("unknown keyword '{other}'"))),
        }
    }
    let name = name.ok_or_else(|| err(last_line.max(1), 1, "missing 'group <name>' line"))?;
    PcPresentation::from_relations(&name, gens, &rels)
}

fn parse_rhs(toks: &[(usize, &str)], names: &[String], line: usize) -> Result<Vec<(usize, i64)>> {
    let mut out = Vec::new();
    for &(col, t) in toks {
        if t == "1" {
            continue;
        }
        out.push(parse_token(t, names).map_err(|m| err(line, col, m))?);
    }
    Ok(out)
}

pub fn to_string(p: &PcPresentation) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "group {}", p.name());
    for (i, g) in p.gen_names().iter().enumerate() {
        match p.relative_order(i) {
            Some(m) => {
                let _ = writeln!(s, "gen {g} order {m}");
            }
            None => {
                let _ = writeln!(s, "gen {g} order inf");
            }
        }
    }
    let names = p.gen_names();
    let word = |w: &[(usize, i64)]| -> String {
        if w.is_empty() {
            return "1".into();
        }
        w.iter()
            .map(|&(g, e)| if e == 1 { names[g].clone() } else { format!("{}^{}", names[g], e) })
            .collect::<Vec<_>>()
            .join(" ")
    };
    for r in p.relations() {
        let _ = match r.kind {
            RelationKind::Pow => writeln!(s, "pow {} = {}", names[r.i], word(&r.word)),
            RelationKind::Conj => writeln!(s, "conj {} ^ {} = {}", names[r.j], names[r.i], word(&r.word)),
            RelationKind::ConjInv => writeln!(s, "conj {} ^ {}^-1 = {}", names[r.j], names[r.i], word(&r.word)),
        };
    }
    s
}

pub fn read_file(path: &std::path::Path) -> Result<PcPresentation> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
    parse(&text)
}
