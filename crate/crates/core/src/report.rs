//! Report documents for the command-line front end: canonical JSON with
//! sorted keys and rationals rendered as `p/q` strings, byte-identical
//! across runs for identical inputs.

use crate::forms::{
    builtin_catalog, check_nondegenerate, FormError, HermitianFormPack, NondegeneracyVerdict,
    NondegeneracyWitness,
};
use crate::quadric::{assemble_table, jacobi_check, weight3_nullcheck, AlgebraError, GradedAlgebraTable};
use crate::scalar::format_rat;
use crate::theorem::{certify_pack, PipelineError};
use serde_json::{json, Value};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error(transparent)]
    Form(#[from] FormError),
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<AlgebraError> for ReportError {
    fn from(e: AlgebraError) -> Self {
        ReportError::Pipeline(PipelineError::Algebra(e))
    }
}

/// Canonical rendering: object keys sorted, two-space indentation, trailing
/// newline. `serde_json`'s default map is ordered, so converting through
/// `Value` sorts every object.
pub fn canonical_json(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serialization");
    s.push('\n');
    s
}

fn verdict_json(verdict: &NondegeneracyVerdict) -> Value {
    let witness = match &verdict.witness {
        None => Value::Null,
        Some(NondegeneracyWitness::DependentCombination(c)) => json!({
            "kind": "dependent_combination",
            "coefficients": c.iter().map(format_rat).collect::<Vec<_>>(),
        }),
        Some(NondegeneracyWitness::KernelVector(z)) => json!({
            "kind": "kernel_vector",
            "entries": z
                .iter()
                .map(|e| vec![format_rat(&e.re), format_rat(&e.im)])
                .collect::<Vec<_>>(),
        }),
    };
    json!({
        "independent": verdict.independent,
        "trivial_kernel": verdict.trivial_kernel,
        "witness": witness,
    })
}

fn degenerate_document(command: &str, pack: &HermitianFormPack, v: &NondegeneracyVerdict) -> Value {
    json!({
        "command": command,
        "pack": pack.to_json_value(),
        "error": "degenerate form pack",
        "nondegeneracy": verdict_json(v),
        "overall_pass": false,
    })
}

fn constants_json(table: &GradedAlgebraTable) -> Value {
    let d = table.total_dim();
    let rows: Vec<Value> = (0..d)
        .map(|i| {
            (0..d)
                .map(|j| {
                    table
                        .constant(i, j)
                        .iter()
                        .map(format_rat)
                        .collect::<Vec<_>>()
                })
                .collect::<Vec<_>>()
                .into()
        })
        .collect();
    Value::Array(rows)
}

fn basis_json(table: &GradedAlgebraTable) -> Value {
    let levels: Vec<Value> = (-2..=2)
        .map(|level| {
            json!({
                "level": level,
                "fields": table
                    .fields_at(level)
                    .iter()
                    .map(|f| f.to_string())
                    .collect::<Vec<_>>(),
            })
        })
        .collect();
    Value::Array(levels)
}

/// `solve`: direct-side dimensions, basis fields, structure constants, and
/// the Jacobi / weight-3 audits.
pub fn solve_document(pack: &HermitianFormPack) -> Result<(Value, bool), ReportError> {
    let table = match assemble_table(pack) {
        Ok(t) => t,
        Err(AlgebraError::Degenerate(v)) => {
            return Ok((degenerate_document("solve", pack, &v), false));
        }
        Err(e) => return Err(e.into()),
    };
    let jacobi = jacobi_check(&table);
    let weight3 = weight3_nullcheck(pack)?;
    let pass = jacobi && weight3;
    let doc = json!({
        "command": "solve",
        "pack": pack.to_json_value(),
        "dims": table.dims().to_vec(),
        "total_dim": table.total_dim(),
        "basis": basis_json(&table),
        "structure_constants": constants_json(&table),
        "jacobi": jacobi,
        "weight3_trivial": weight3,
        "overall_pass": pass,
    });
    Ok((doc, pass))
}

/// `prolong`: tower dimensions and the identity-family certificate.
pub fn prolong_document(
    pack: &HermitianFormPack,
    max_level: usize,
) -> Result<(Value, bool), ReportError> {
    let verdict = check_nondegenerate(pack);
    if !verdict.passes() {
        return Ok((degenerate_document("prolong", pack, &verdict), false));
    }
    let table = assemble_table(pack)?;
    let (_, certificate) =
        crate::prolong::run_to_termination(table.truncation(), max_level).map_err(PipelineError::from)?;
    let pass = certificate.all_identities_hold();
    let doc = json!({
        "command": "prolong",
        "pack": pack.to_json_value(),
        "base_dims": certificate.base_dims.to_vec(),
        "tower_dims": certificate.level_dims,
        "termination_level": certificate.termination_level,
        "certificate": serde_json::to_value(&certificate).expect("certificate serialization"),
        "overall_pass": pass,
    });
    Ok((doc, pass))
}

fn verification_json(pack: &HermitianFormPack, max_level: usize) -> Result<(Value, bool), ReportError> {
    match certify_pack(pack, max_level) {
        Ok(run) => {
            let pass = run.report.overall_pass;
            let mut doc = serde_json::to_value(&run.report).expect("report serialization");
            let obj = doc.as_object_mut().expect("report is an object");
            obj.insert("pack".into(), pack.to_json_value());
            Ok((doc, pass))
        }
        Err(PipelineError::Algebra(AlgebraError::Degenerate(v))) => {
            Ok((degenerate_document("verify", pack, &v), false))
        }
        Err(e) => Err(e.into()),
    }
}

/// `verify`: the full two-pipeline isomorphism certification report.
pub fn verify_document(
    pack: &HermitianFormPack,
    max_level: usize,
) -> Result<(Value, bool), ReportError> {
    let (mut doc, pass) = verification_json(pack, max_level)?;
    if let Some(obj) = doc.as_object_mut() {
        obj.insert("command".into(), "verify".into());
    }
    Ok((doc, pass))
}

/// `catalog`: one verification entry per builtin pack, aggregated in catalog
/// order. Structure constants are elided unless requested.
pub fn catalog_document(
    suite: &str,
    max_level: usize,
    include_constants: bool,
) -> Result<(Value, bool), ReportError> {
    let entries = builtin_catalog(suite)?;
    let mut packs = Vec::with_capacity(entries.len());
    let mut all_pass = true;
    for entry in &entries {
        let (mut doc, pass) = verification_json(&entry.pack, max_level)?;
        if let Some(obj) = doc.as_object_mut() {
            obj.insert("name".into(), entry.name.clone().into());
            if include_constants {
                let table = assemble_table(&entry.pack)?;
                obj.insert("structure_constants".into(), constants_json(&table));
            }
        }
        all_pass &= pass;
        packs.push(doc);
    }
    let doc = json!({
        "command": "catalog",
        "suite": suite,
        "packs": packs,
        "overall_pass": all_pass,
    });
    Ok((doc, all_pass))
}

/// Writes canonical JSON to `out_path`, or to stdout when no path is given.
pub fn write_report(doc: &Value, out_path: Option<&std::path::Path>) -> Result<(), ReportError> {
    let text = canonical_json(doc);
    match out_path {
        Some(p) => std::fs::write(p, text).map_err(|e| {
            ReportError::Io(std::io::Error::new(
                e.kind(),
                format!("writing report to {}: {e}", p.display()),
            ))
        })?,
        None => {
            use std::io::Write;
            std::io::stdout().write_all(text.as_bytes())?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::builtin_catalog;

    #[test]
    fn canonical_json_sorts_keys_and_is_stable() {
        let doc = json!({"zeta": 1, "alpha": {"m": 2, "b": 3}});
        let s = canonical_json(&doc);
        let a = s.find("\"alpha\"").unwrap();
        let z = s.find("\"zeta\"").unwrap();
        assert!(a < z);
        let b = s.find("\"b\"").unwrap();
        let m = s.find("\"m\"").unwrap();
        assert!(b < m);
        assert!(s.ends_with('\n'));
        assert_eq!(s, canonical_json(&serde_json::from_str::<Value>(&s).unwrap()));
    }

    #[test]
    fn solve_reports_dimensions_and_passes() {
        let pack = builtin_catalog("heisenberg").unwrap()[0].pack.clone();
        let (doc, pass) = solve_document(&pack).unwrap();
        assert!(pass);
        assert_eq!(doc["dims"], json!([1, 2, 2, 2, 1]));
        assert_eq!(doc["total_dim"], json!(8));
        assert!(doc["structure_constants"].is_array());
    }

    #[test]
    fn degenerate_pack_reports_witness() {
        let pack = crate::forms::parse_form_pack(
            r#"{"n":2,"k":1,"mats":[[[["1/1","0/1"],["0/1","0/1"]],[["0/1","0/1"],["0/1","0/1"]]]]}"#,
        )
        .unwrap();
        let (doc, pass) = solve_document(&pack).unwrap();
        assert!(!pass);
        assert_eq!(doc["error"], json!("degenerate form pack"));
        assert_eq!(doc["nondegeneracy"]["witness"]["kind"], json!("kernel_vector"));
    }

    #[test]
    fn verify_document_embeds_pack_and_passes() {
        let pack = builtin_catalog("heisenberg").unwrap()[0].pack.clone();
        let (doc, pass) = verify_document(&pack, 6).unwrap();
        assert!(pass);
        assert_eq!(doc["dims_direct"], doc["dims_prolonged"]);
        assert_eq!(doc["pack"]["n"], json!(1));
        assert_eq!(doc["command"], json!("verify"));
    }

    #[test]
    fn catalog_document_is_deterministic() {
        let (a, pass_a) = catalog_document("heisenberg", 6, false).unwrap();
        let (b, pass_b) = catalog_document("heisenberg", 6, false).unwrap();
        assert!(pass_a && pass_b);
        assert_eq!(canonical_json(&a), canonical_json(&b));
    }
}
