//! The bqpjson codec: a JSON interchange document carrying variable ids,
//! domain, scale/offset, terms, metadata and optionally a solution pool.
//!
//! Writes are deterministic: keys are emitted in sorted order, floats in
//! their shortest round-trip decimal form, one trailing newline.

use std::collections::BTreeMap;

use serde::Deserialize;
use serde_json::{json, Map, Value};

use crate::pbf::VarId;
use crate::samplers::{SampleSet, Timing};

use super::{Domain, FormatError, QuboInstance};

/// Metadata key used to round-trip the document's integer `id` field, which
/// has no slot of its own on the instance.
const ID_KEY: &str = "bqpjson_id";

#[derive(Deserialize)]
struct Doc {
    id: i64,
    version: String,
    variable_ids: Vec<VarId>,
    variable_domain: String,
    scale: f64,
    offset: f64,
    linear_terms: Vec<LinearTerm>,
    quadratic_terms: Vec<QuadraticTerm>,
    metadata: Map<String, Value>,
    #[serde(default)]
    solutions: Option<Vec<SolutionEntry>>,
}

#[derive(Deserialize)]
struct LinearTerm {
    id: VarId,
    coeff: f64,
}

#[derive(Deserialize)]
struct QuadraticTerm {
    id_head: VarId,
    id_tail: VarId,
    coeff: f64,
}

#[derive(Deserialize)]
struct SolutionEntry {
    #[allow(dead_code)]
    id: i64,
    assignment: Vec<i64>,
    evaluation: f64,
}

pub fn read_bqpjson(text: &str) -> Result<QuboInstance, FormatError> {
    let doc: Doc = serde_json::from_str(text).map_err(|e| FormatError::from_json(&e))?;

    let major = doc.version.split('.').next().unwrap_or("");
    if major != "1" {
        return Err(FormatError::UnsupportedVersion(doc.version));
    }
    let domain: Domain = doc.variable_domain.parse()?;

    let mut linear = BTreeMap::new();
    for term in &doc.linear_terms {
        if linear.insert(term.id, term.coeff).is_some() {
            return Err(FormatError::DuplicateTerm {
                kind: "linear",
                key: term.id.to_string(),
            });
        }
    }
    let mut quadratic = BTreeMap::new();
    for term in &doc.quadratic_terms {
        if term.id_head >= term.id_tail {
            return Err(FormatError::QuadraticOrder {
                head: term.id_head,
                tail: term.id_tail,
            });
        }
        if quadratic
            .insert((term.id_head, term.id_tail), term.coeff)
            .is_some()
        {
            return Err(FormatError::DuplicateTerm {
                kind: "quadratic",
                key: format!("({}, {})", term.id_head, term.id_tail),
            });
        }
    }

    let mut q = QuboInstance::new(
        domain,
        doc.variable_ids,
        linear,
        quadratic,
        doc.scale,
        doc.offset,
    )?;

    for (key, value) in &doc.metadata {
        match value {
            Value::String(s) => q.insert_metadata(key.clone(), s.clone()),
            _ => return Err(FormatError::MetadataValue(key.clone())),
        }
    }
    if doc.id != 0 {
        q.insert_metadata(ID_KEY, doc.id.to_string());
    }

    if let Some(entries) = doc.solutions {
        if !entries.is_empty() {
            let mut states = Vec::with_capacity(entries.len());
            for (index, entry) in entries.iter().enumerate() {
                let state: Vec<i8> = entry
                    .assignment
                    .iter()
                    .map(|&v| i8::try_from(v).unwrap_or(i8::MAX))
                    .collect();
                let computed = q.energy(&state)?;
                if (computed - entry.evaluation).abs()
                    > 1e-9 * entry.evaluation.abs().max(1.0)
                {
                    return Err(FormatError::EvaluationMismatch {
                        index,
                        stated: entry.evaluation,
                        computed,
                    });
                }
                states.push((state, 1));
            }
            let set = SampleSet::from_states(&q, states, Timing::zero(), BTreeMap::new())?;
            q.set_solutions(Some(set));
        }
    }
    Ok(q)
}

pub fn write_bqpjson(q: &QuboInstance) -> String {
    let id = q
        .metadata()
        .get(ID_KEY)
        .and_then(|s| s.parse::<i64>().ok())
        .unwrap_or(0);

    let linear_terms: Vec<Value> = q
        .linear()
        .iter()
        .map(|(&v, &c)| json!({ "id": v, "coeff": c }))
        .collect();
    let quadratic_terms: Vec<Value> = q
        .quadratic()
        .iter()
        .map(|(&(i, j), &c)| json!({ "id_head": i, "id_tail": j, "coeff": c }))
        .collect();

    let mut metadata = Map::new();
    for (key, value) in q.metadata() {
        if key != ID_KEY {
            metadata.insert(key.clone(), Value::String(value.clone()));
        }
    }

    let mut root = Map::new();
    root.insert("id".to_string(), json!(id));
    root.insert("version".to_string(), json!("1.0.0"));
    root.insert("variable_domain".to_string(), json!(q.domain().to_string()));
    root.insert("variable_ids".to_string(), json!(q.variable_ids()));
    root.insert("scale".to_string(), json!(q.scale()));
    root.insert("offset".to_string(), json!(q.offset()));
    root.insert("linear_terms".to_string(), Value::Array(linear_terms));
    root.insert("quadratic_terms".to_string(), Value::Array(quadratic_terms));
    root.insert("metadata".to_string(), Value::Object(metadata));
    if let Some(solutions) = q.solutions() {
        // One entry per read, so read counts survive the round trip.
        let mut entries = Vec::new();
        for sample in solutions.samples() {
            for _ in 0..sample.reads {
                entries.push(json!({
                    "id": entries.len() as u64,
                    "assignment": sample.state,
                    "evaluation": sample.value,
                }));
            }
        }
        root.insert("solutions".to_string(), Value::Array(entries));
    }

    let mut text = Value::Object(root).to_string();
    text.push('\n');
    text
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_document_round_trips() {
        let q = QuboInstance::new(
            Domain::Boolean,
            vec![0],
            [(0, 1.0)].into(),
            BTreeMap::new(),
            1.0,
            0.0,
        )
        .unwrap();
        let text = write_bqpjson(&q);
        // Golden serialization: sorted keys, shortest floats, one newline.
        assert_eq!(
            text,
            "{\"id\":0,\"linear_terms\":[{\"coeff\":1.0,\"id\":0}],\"metadata\":{},\
             \"offset\":0.0,\"quadratic_terms\":[],\"scale\":1.0,\
             \"variable_domain\":\"boolean\",\"variable_ids\":[0],\"version\":\"1.0.0\"}\n"
        );
        let back = read_bqpjson(&text).unwrap();
        assert_eq!(back, q);
        assert_eq!(write_bqpjson(&back), text);
    }

    #[test]
    fn head_not_below_tail_is_a_schema_error() {
        let text = r#"{"id":0,"version":"1.0.0","variable_ids":[0,1],
            "variable_domain":"boolean","scale":1.0,"offset":0.0,
            "linear_terms":[],"quadratic_terms":[{"id_head":1,"id_tail":1,"coeff":2.0}],
            "metadata":{}}"#;
        assert!(matches!(
            read_bqpjson(text),
            Err(FormatError::QuadraticOrder { head: 1, tail: 1 })
        ));
    }

    #[test]
    fn missing_key_is_diagnosed() {
        let text = r#"{"id":0,"version":"1.0.0"}"#;
        match read_bqpjson(text) {
            Err(FormatError::Json { message, .. }) => {
                assert!(message.contains("missing field"), "{message}");
            }
            other => panic!("unexpected: {other:?}"),
        }
    }

    #[test]
    fn nonpositive_scale_is_diagnosed() {
        let text = r#"{"id":0,"version":"1.0.0","variable_ids":[0],
            "variable_domain":"boolean","scale":0.0,"offset":0.0,
            "linear_terms":[],"quadratic_terms":[],"metadata":{}}"#;
        assert!(matches!(
            read_bqpjson(text),
            Err(FormatError::NonPositiveScale(_))
        ));
    }

    #[test]
    fn duplicate_variable_id_is_diagnosed() {
        let text = r#"{"id":0,"version":"1.0.0","variable_ids":[0,0],
            "variable_domain":"boolean","scale":1.0,"offset":0.0,
            "linear_terms":[],"quadratic_terms":[],"metadata":{}}"#;
        assert!(matches!(
            read_bqpjson(text),
            Err(FormatError::DuplicateVariable(0))
        ));
    }

    #[test]
    fn version_2_is_rejected() {
        let text = r#"{"id":0,"version":"2.0.0","variable_ids":[],
            "variable_domain":"boolean","scale":1.0,"offset":0.0,
            "linear_terms":[],"quadratic_terms":[],"metadata":{}}"#;
        assert!(matches!(
            read_bqpjson(text),
            Err(FormatError::UnsupportedVersion(v)) if v == "2.0.0"
        ));
    }

    #[test]
    fn solutions_block_populates_a_verified_pool() {
        let text = r#"{"id":7,"version":"1.2.0","variable_ids":[0,1],
            "variable_domain":"boolean","scale":1.0,"offset":0.0,
            "linear_terms":[{"id":0,"coeff":1.0}],
            "quadratic_terms":[{"id_head":0,"id_tail":1,"coeff":2.0}],
            "metadata":{"note":"x"},
            "solutions":[
              {"id":0,"assignment":[0,1],"evaluation":0.0},
              {"id":1,"assignment":[1,1],"evaluation":3.0},
              {"id":2,"assignment":[0,1],"evaluation":0.0}
            ]}"#;
        let q = read_bqpjson(text).unwrap();
        let solutions = q.solutions().unwrap();
        assert_eq!(solutions.len(), 2);
        assert_eq!(solutions.total_reads(), 3);
        assert_eq!(solutions.best().unwrap().state, vec![0, 1]);
        assert_eq!(solutions.best().unwrap().reads, 2);
        // Round trip keeps id, metadata and the expanded solution entries.
        let rewritten = write_bqpjson(&q);
        let back = read_bqpjson(&rewritten).unwrap();
        assert_eq!(back, q);
        assert_eq!(write_bqpjson(&back), rewritten);
    }

    #[test]
    fn solutions_with_wrong_evaluation_are_rejected() {
        let text = r#"{"id":0,"version":"1.0.0","variable_ids":[0],
            "variable_domain":"boolean","scale":1.0,"offset":0.0,
            "linear_terms":[{"id":0,"coeff":1.0}],"quadratic_terms":[],
            "metadata":{},
            "solutions":[{"id":0,"assignment":[1],"evaluation":5.0}]}"#;
        assert!(matches!(
            read_bqpjson(text),
            Err(FormatError::EvaluationMismatch { .. })
        ));
    }
}
