//! Model file format: one JSON document with sorted keys, newline
//! terminated. Polynomials are stored as `linear` / `quadratic` /
//! `constant` blocks; constraint constants are folded into `rhs` on write.

use std::collections::BTreeMap;

use serde::Deserialize;
use serde_json::{json, Map, Value};

use crate::pbf::{PseudoBooleanFunction as Pbf, VarId};

use super::{Constraint, Model, ModelError, Relation, Sense, VarKind, Variable};

#[derive(Deserialize)]
struct ModelDoc {
    variables: Vec<VariableDoc>,
    sense: String,
    objective: PolynomialDoc,
    #[serde(default)]
    constraints: Vec<ConstraintDoc>,
    #[serde(default)]
    metadata: BTreeMap<String, String>,
}

#[derive(Deserialize)]
struct VariableDoc {
    id: VarId,
    kind: String,
    lower: f64,
    upper: f64,
    #[serde(default)]
    name: Option<String>,
}

#[derive(Deserialize, Default)]
struct PolynomialDoc {
    #[serde(default)]
    linear: Vec<(VarId, f64)>,
    #[serde(default)]
    quadratic: Vec<(VarId, VarId, f64)>,
    #[serde(default)]
    constant: f64,
}

impl PolynomialDoc {
    fn build(&self) -> Pbf {
        let mut f = Pbf::constant(self.constant);
        for &(v, c) in &self.linear {
            f.add_term(&[v], c);
        }
        for &(i, j, c) in &self.quadratic {
            f.add_term(&[i, j], c);
        }
        f
    }
}

#[derive(Deserialize)]
struct ConstraintDoc {
    relation: String,
    #[serde(default)]
    rhs: f64,
    #[serde(default)]
    linear: Vec<(VarId, f64)>,
    #[serde(default)]
    quadratic: Vec<(VarId, VarId, f64)>,
    #[serde(default)]
    members: Vec<VarId>,
}

pub fn read_model(text: &str) -> Result<Model, ModelError> {
    let doc: ModelDoc = serde_json::from_str(text).map_err(|e| ModelError::Json {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;

    let sense = match doc.sense.as_str() {
        "min" => Sense::Min,
        "max" => Sense::Max,
        other => return Err(ModelError::UnknownSense(other.to_string())),
    };

    let mut model = Model::new(sense);
    for v in doc.variables {
        let kind = match v.kind.as_str() {
            "binary" => VarKind::Binary,
            "integer" => VarKind::Integer,
            "continuous" => VarKind::Continuous,
            other => return Err(ModelError::UnknownKind(other.to_string())),
        };
        model.variables.push(Variable {
            id: v.id,
            kind,
            lower: v.lower,
            upper: v.upper,
            name: v.name,
        });
    }
    model.objective = doc.objective.build();
    for c in doc.constraints {
        let relation = match c.relation.as_str() {
            "eq" => Relation::Eq,
            "le" => Relation::Le,
            "ge" => Relation::Ge,
            "sos1" => {
                model.constraints.push(Constraint::Sos1 { members: c.members });
                continue;
            }
            other => return Err(ModelError::UnknownRelation(other.to_string())),
        };
        let lhs = PolynomialDoc {
            linear: c.linear,
            quadratic: c.quadratic,
            constant: 0.0,
        }
        .build();
        model.constraints.push(Constraint::Algebraic {
            lhs,
            relation,
            rhs: c.rhs,
        });
    }
    model.metadata = doc.metadata;
    Ok(model)
}

fn polynomial_value(f: &Pbf) -> Value {
    let mut linear = Vec::new();
    let mut quadratic = Vec::new();
    let mut constant = 0.0;
    for (key, c) in f.terms() {
        match key {
            [] => constant = c,
            [v] => linear.push(json!([v, c])),
            [a, b] => quadratic.push(json!([a, b, c])),
            _ => unreachable!("model polynomials are degree <= 2"),
        }
    }
    json!({ "constant": constant, "linear": linear, "quadratic": quadratic })
}

pub fn write_model(m: &Model) -> String {
    let variables: Vec<Value> = m
        .variables
        .iter()
        .map(|v| {
            let mut entry = Map::new();
            entry.insert("id".to_string(), json!(v.id));
            entry.insert("kind".to_string(), json!(v.kind.to_string()));
            entry.insert("lower".to_string(), json!(v.lower));
            entry.insert("upper".to_string(), json!(v.upper));
            if let Some(name) = &v.name {
                entry.insert("name".to_string(), json!(name));
            }
            Value::Object(entry)
        })
        .collect();

    let constraints: Vec<Value> = m
        .constraints
        .iter()
        .map(|c| match c {
            Constraint::Algebraic { lhs, relation, rhs } => {
                let mut body = match polynomial_value(lhs) {
                    Value::Object(map) => map,
                    _ => unreachable!(),
                };
                // The lhs constant has no slot of its own; fold it into rhs.
                let constant = body
                    .remove("constant")
                    .and_then(|v| v.as_f64())
                    .unwrap_or(0.0);
                body.insert("relation".to_string(), json!(relation.to_string()));
                body.insert("rhs".to_string(), json!(rhs - constant));
                Value::Object(body)
            }
            Constraint::Sos1 { members } => json!({ "members": members, "relation": "sos1" }),
        })
        .collect();

    let root = json!({
        "constraints": constraints,
        "metadata": m.metadata,
        "objective": polynomial_value(&m.objective),
        "sense": m.sense.to_string(),
        "variables": variables,
    });
    let mut text = root.to_string();
    text.push('\n');
    text
}
