use std::path::Path;

use nilcert::outsep::{verify_certificate, CongruenceCertificate};
use nilcert::{Error, Result};
use serde_json::{json, Value};

use crate::args::{Command, Options};
use crate::checks::check;
use crate::commands::{execute, Outcome};
use crate::report::{Inputs, RunReport, Status};

/// Re-verifies a run report from its recorded inputs, or a bare torsion-separation certificate.
pub fn verify(path: &Path, inputs: &Inputs, opts: &Options) -> Result<Outcome> {
    let text = inputs.read(path)?;
    let value: Value =
        serde_json::from_str(&text).map_err(|e| Error::Parse { line: e.line(), column: e.column(), message: e.to_string() })?;
    if value.get("arguments").is_none() {
        let cert: CongruenceCertificate =
            serde_json::from_value(value).map_err(|e| Error::Input(format!("neither a run report nor a certificate: {e}")))?;
        verify_certificate(&cert, opts.table_cap())?;
        let checks = vec![format!("certificate for {} re-verified", cert.group)];
        return Ok(done("certificate", checks));
    }
    let report: RunReport = serde_json::from_value(value).map_err(|e| Error::Input(format!("malformed run report: {e}")))?;
    if matches!(report.arguments, Command::Verify { .. }) {
        return Err(Error::Input("reports of verify runs are not re-verified".into()));
    }
    let replay = Inputs::replay(report.inputs.clone())?;
    let mut checks = vec![format!("{} input hashes match", report.inputs.len())];
    checks.extend(check(&report.arguments, &replay, &report.options, &report.result)?);
    // Certificates are checked above; everything else is also recomputed.
    if !matches!(report.arguments, Command::SeparateTorsion { .. }) {
        let again = execute(&report.arguments, &replay, &report.options)?;
        if again.result != report.result || again.status != report.status {
            return Err(Error::RelationViolated("recomputed result differs from the report".into()));
        }
        checks.push("recomputed result matches".into());
    }
    Ok(done(&report.command, checks))
}

fn done(what: &str, checks: Vec<String>) -> Outcome {
    let text = checks.iter().map(|c| format!("ok: {c}\n")).collect::<String>() + "verified\n";
    Outcome { result: json!({"verified": true, "subject": what, "checks": checks}), text, status: Status::Decided }
}
