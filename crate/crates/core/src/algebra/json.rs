//! Algebra JSON documents.
//!
//! Format: `{"labels":[...],"ops":[{"name":..,"arity":..,"table":[...]} |
//! {"name":..,"arity":..,"rule":"builtin:<id>"}]}`. Table-backed operations
//! round-trip by table; rule-backed ones by rule id, resolved by a caller
//! supplied resolver (see `crate::builtin_rule_resolver`).

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{FiniteAlgebra, OpKind, OpSym, Operation};

#[derive(Debug, Serialize, Deserialize)]
pub struct AlgebraDoc {
    pub labels: Vec<String>,
    pub ops: Vec<OpDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct OpDoc {
    pub name: String,
    pub arity: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub table: Option<Vec<u32>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rule: Option<String>,
}

#[derive(Debug, Error)]
pub enum JsonError {
    #[error("operation {0} is rule-backed by a non-builtin rule and too large to table")]
    NotDumpable(String),
    #[error("operation {0} has neither table nor rule")]
    MissingBody(String),
    #[error("operation {name}: cannot resolve rule `{rule}`")]
    UnknownRule { name: String, rule: String },
    #[error("operation {name}: table has {got} entries, expected {want}")]
    BadTable {
        name: String,
        got: usize,
        want: usize,
    },
    #[error("table entry {value} out of range for universe of size {size}")]
    EntryOutOfRange { value: u32, size: usize },
    #[error("json: {0}")]
    Serde(#[from] serde_json::Error),
}

/// Serializes an algebra. Builtin rules dump by id, other operations by
/// dense table when feasible.
pub fn dump(alg: &FiniteAlgebra) -> Result<AlgebraDoc, JsonError> {
    let mut ops = Vec::new();
    for (op_idx, op) in alg.ops().iter().enumerate() {
        let mut doc = OpDoc {
            name: op.sym.name.clone(),
            arity: op.sym.arity,
            table: None,
            rule: None,
        };
        match &op.kind {
            OpKind::Table(t) => doc.table = Some(t.clone()),
            OpKind::Rule { id, .. } if id.starts_with("builtin:") => {
                doc.rule = Some(id.clone());
            }
            OpKind::Rule { .. } => match alg.table_of(op_idx) {
                Some(t) => doc.table = Some(t),
                None => return Err(JsonError::NotDumpable(op.sym.name.clone())),
            },
        }
        ops.push(doc);
    }
    Ok(AlgebraDoc {
        labels: alg.labels().to_vec(),
        ops,
    })
}

pub fn dump_string(alg: &FiniteAlgebra) -> Result<String, JsonError> {
    Ok(serde_json::to_string_pretty(&dump(alg)?)?)
}

/// A resolver maps a rule id (plus the expected symbol and universe labels)
/// to a concrete operation.
pub type RuleResolver<'a> = dyn Fn(&str, &OpSym, &[String]) -> Option<Operation> + 'a;

pub fn load(doc: &AlgebraDoc, resolver: &RuleResolver) -> Result<FiniteAlgebra, JsonError> {
    let size = doc.labels.len();
    let mut ops = Vec::new();
    for op_doc in &doc.ops {
        let sym = OpSym {
            name: op_doc.name.clone(),
            arity: op_doc.arity,
        };
        if let Some(t) = &op_doc.table {
            let want = size.pow(op_doc.arity as u32);
            if t.len() != want {
                return Err(JsonError::BadTable {
                    name: op_doc.name.clone(),
                    got: t.len(),
                    want,
                });
            }
            if let Some(&bad) = t.iter().find(|&&v| v as usize >= size) {
                return Err(JsonError::EntryOutOfRange { value: bad, size });
            }
            ops.push(Operation {
                sym,
                kind: OpKind::Table(t.clone()),
                support: None,
            });
        } else if let Some(rule) = &op_doc.rule {
            match resolver(rule, &sym, &doc.labels) {
                Some(op) => ops.push(op),
                None => {
                    return Err(JsonError::UnknownRule {
                        name: op_doc.name.clone(),
                        rule: rule.clone(),
                    })
                }
            }
        } else {
            return Err(JsonError::MissingBody(op_doc.name.clone()));
        }
    }
    Ok(FiniteAlgebra::new(doc.labels.clone(), ops))
}

pub fn load_string(text: &str, resolver: &RuleResolver) -> Result<FiniteAlgebra, JsonError> {
    let doc: AlgebraDoc = serde_json::from_str(text)?;
    load(&doc, resolver)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::tests::flat_meet_algebra;

    #[test]
    fn table_round_trip() {
        let alg = flat_meet_algebra(&["0", "x", "y"]);
        let text = dump_string(&alg).unwrap();
        let loaded = load_string(&text, &|_, _, _| None).unwrap();
        assert_eq!(loaded.labels(), alg.labels());
        for x in 0..3 {
            for y in 0..3 {
                assert_eq!(loaded.meet_of(x, y), alg.meet_of(x, y));
            }
        }
    }

    #[test]
    fn unknown_rule_fails() {
        let text = r#"{"labels":["0"],"ops":[{"name":"f","arity":1,"rule":"builtin:nope"}]}"#;
        assert!(matches!(
            load_string(text, &|_, _, _| None),
            Err(JsonError::UnknownRule { .. })
        ));
    }

    #[test]
    fn bad_table_length_fails() {
        let text = r#"{"labels":["0","1"],"ops":[{"name":"meet","arity":2,"table":[0,0,0]}]}"#;
        assert!(matches!(
            load_string(text, &|_, _, _| None),
            Err(JsonError::BadTable { .. })
        ));
    }
}
