//! The `.tuples` format for Whitehead instances:
//!
//! ```text
//! # one tuple per line, words separated by commas
//! source x, y
//! source z
//! target x z, y
//! target z^-1
//! ```

use nilcert::nilgroup::{NilElement, PcPresentation};
use nilcert::pcp::parse_word;
use nilcert::whitehead::TupleSystem;
use nilcert::{Error, Result};

pub struct TupleFile {
    pub source: TupleSystem<NilElement>,
    pub target: TupleSystem<NilElement>,
}

pub fn parse_tuples(text: &str, p: &PcPresentation) -> Result<TupleFile> {
    let (mut source, mut target) = (Vec::new(), Vec::new());
    for (k, raw) in text.lines().enumerate() {
        let line_no = k + 1;
        let line = raw.split('#').next().unwrap_or("");
        let trimmed = line.trim_start();
        if trimmed.is_empty() {
            continue;
        }
        let (keyword, rest) = trimmed.split_once(char::is_whitespace).unwrap_or((trimmed, ""));
        let list = match keyword {
            "source" => &mut source,
            "target" => &mut target,
            other => {
                let col = line.len() - trimmed.len() + 1;
                return Err(Error::Parse { line: line_no, column: col, message: format!("expected `source` or `target`, found `{other}`") });
            }
        };
        let mut offset = line.len() - rest.len();
        let mut tuple = Vec::new();
        if !rest.trim().is_empty() {
            for word in rest.split(',') {
                let w = parse_word(word, p.gen_names()).map_err(|(c, m)| Error::Parse { line: line_no, column: offset + c, message: m })?;
                tuple.push(p.collect(&w));
                offset += word.len() + 1;
            }
        }
        list.push(tuple);
    }
    let (source, target) = (TupleSystem::new(source), TupleSystem::new(target));
    source.check_shape(&target)?;
    Ok(TupleFile { source, target })
}
