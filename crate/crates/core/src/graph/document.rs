//! Scene-graph document model and strict schema validation.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use std::fmt;

/// Object position: a `[row, col]` cell for grid domains, or a
/// `column_X, level_Y` string for blocks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SgPosition {
    Cell([i64; 2]),
    Text(String),
}

impl SgPosition {
    pub fn cell(c: (i32, i32)) -> Self {
        SgPosition::Cell([c.0 as i64, c.1 as i64])
    }

    pub fn as_cell(&self) -> Option<(i32, i32)> {
        match self {
            SgPosition::Cell(c) => Some((c[0] as i32, c[1] as i32)),
            SgPosition::Text(_) => None,
        }
    }

    pub fn to_value(&self) -> Value {
        serde_json::to_value(self).expect("position serializes")
    }

    pub fn from_value(v: &Value) -> Option<Self> {
        serde_json::from_value(v.clone()).ok()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SgObject {
    pub name: String,
    #[serde(rename = "type")]
    pub kind: String,
    pub state: String,
    pub position: SgPosition,
    pub properties: Map<String, Value>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SgRelationship {
    pub relationship: String,
    pub subject: String,
    pub object: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct SgEnvironment {
    #[serde(default)]
    pub global_constraints: Value,
    #[serde(default)]
    pub valid_actions: Vec<String>,
    #[serde(default)]
    pub boundary_conditions: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SgStateChange {
    pub entity: String,
    pub property: String,
    pub old_value: Value,
    pub new_value: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SgHistoryEntry {
    pub step: u64,
    pub action: String,
    pub affected_entities: Vec<String>,
    pub state_changes: Vec<SgStateChange>,
    pub validity: bool,
}

/// Structured state document: objects, relationships, environment
/// constraints, and the per-action simulation history.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneGraph {
    pub objects: Vec<SgObject>,
    pub relationships: Vec<SgRelationship>,
    #[serde(default)]
    pub environment: SgEnvironment,
    #[serde(default)]
    pub action_history: Vec<SgHistoryEntry>,
}

impl SceneGraph {
    /// The same graph with its action history removed; used for the
    /// commutation check between environment and graph simulation.
    pub fn without_history(&self) -> SceneGraph {
        SceneGraph { action_history: Vec::new(), ..self.clone() }
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("scene graph serializes")
    }
}

/// A path-addressed schema violation, e.g. `/objects/3/position`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemaError {
    pub path: String,
    pub message: String,
}

impl fmt::Display for SchemaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

const OBJECT_KEYS: [&str; 5] = ["name", "type", "state", "position", "properties"];
const RELATIONSHIP_KEYS: [&str; 3] = ["relationship", "subject", "object"];
const ENVIRONMENT_KEYS: [&str; 3] = ["global_constraints", "valid_actions", "boundary_conditions"];
const HISTORY_KEYS: [&str; 5] = ["step", "action", "affected_entities", "state_changes", "validity"];
const CHANGE_KEYS: [&str; 4] = ["entity", "property", "old_value", "new_value"];

/// Strictly validates an externally produced document against the scene
/// graph schema. `environment` and `action_history` may be omitted (initial
/// graphs routinely lack them); everything else is checked key by key, and
/// all errors are reported with their JSON path.
pub fn validate_document(doc: &Value) -> Result<SceneGraph, Vec<SchemaError>> {
    // Producers sometimes wrap the graph under a single key such as
    // "initial_scene_graph"; unwrap one level when unambiguous.
    let doc = unwrap_single_wrapper(doc);
    let mut errors = Vec::new();
    let root = match doc.as_object() {
        Some(o) => o,
        None => {
            return Err(vec![SchemaError {
                path: "/".into(),
                message: "document must be a JSON object".into(),
            }])
        }
    };

    for key in root.keys() {
        if !["objects", "relationships", "environment", "action_history"].contains(&key.as_str()) {
            errors.push(SchemaError {
                path: format!("/{key}"),
                message: "unexpected key".into(),
            });
        }
    }
    for key in ["objects", "relationships"] {
        if !root.contains_key(key) {
            errors.push(SchemaError {
                path: format!("/{key}"),
                message: "missing required key".into(),
            });
        }
    }

    let mut names = Vec::new();
    if let Some(objects) = root.get("objects") {
        match objects.as_array() {
            None => errors.push(SchemaError {
                path: "/objects".into(),
                message: "must be an array".into(),
            }),
            Some(arr) => {
                for (i, obj) in arr.iter().enumerate() {
                    check_keys(obj, &OBJECT_KEYS, &format!("/objects/{i}"), &mut errors);
                    if let Some(name) = obj.get("name").and_then(Value::as_str) {
                        if names.contains(&name.to_string()) {
                            errors.push(SchemaError {
                                path: format!("/objects/{i}/name"),
                                message: format!("duplicate object name {name:?}"),
                            });
                        }
                        names.push(name.to_string());
                    }
                    if let Some(pos) = obj.get("position") {
                        if SgPosition::from_value(pos).is_none() {
                            errors.push(SchemaError {
                                path: format!("/objects/{i}/position"),
                                message: "must be a [row, col] pair or a string".into(),
                            });
                        }
                    }
                }
            }
        }
    }

    if let Some(rels) = root.get("relationships") {
        match rels.as_array() {
            None => errors.push(SchemaError {
                path: "/relationships".into(),
                message: "must be an array".into(),
            }),
            Some(arr) => {
                for (i, rel) in arr.iter().enumerate() {
                    check_keys(rel, &RELATIONSHIP_KEYS, &format!("/relationships/{i}"), &mut errors);
                    for end in ["subject", "object"] {
                        if let Some(name) = rel.get(end).and_then(Value::as_str) {
                            if !names.iter().any(|n| n == name) {
                                errors.push(SchemaError {
                                    path: format!("/relationships/{i}/{end}"),
                                    message: format!("references unknown object {name:?}"),
                                });
                            }
                        }
                    }
                }
            }
        }
    }

    if let Some(env) = root.get("environment") {
        if env.as_object().is_none() {
            errors.push(SchemaError {
                path: "/environment".into(),
                message: "must be an object".into(),
            });
        } else {
            for key in env.as_object().unwrap().keys() {
                if !ENVIRONMENT_KEYS.contains(&key.as_str()) {
                    errors.push(SchemaError {
                        path: format!("/environment/{key}"),
                        message: "unexpected key".into(),
                    });
                }
            }
        }
    }

    if let Some(history) = root.get("action_history") {
        match history.as_array() {
            None => errors.push(SchemaError {
                path: "/action_history".into(),
                message: "must be an array".into(),
            }),
            Some(arr) => {
                let mut prev_step: Option<u64> = None;
                for (i, entry) in arr.iter().enumerate() {
                    check_keys(entry, &HISTORY_KEYS, &format!("/action_history/{i}"), &mut errors);
                    if let Some(step) = entry.get("step").and_then(Value::as_u64) {
                        if prev_step.is_some_and(|p| step <= p) {
                            errors.push(SchemaError {
                                path: format!("/action_history/{i}/step"),
                                message: "steps must be strictly increasing".into(),
                            });
                        }
                        prev_step = Some(step);
                    }
                    if let Some(changes) = entry.get("state_changes").and_then(Value::as_array) {
                        for (j, change) in changes.iter().enumerate() {
                            check_keys(
                                change,
                                &CHANGE_KEYS,
                                &format!("/action_history/{i}/state_changes/{j}"),
                                &mut errors,
                            );
                        }
                    }
                }
            }
        }
    }

    if !errors.is_empty() {
        return Err(errors);
    }
    serde_json::from_value(Value::Object(root.clone())).map_err(|e| {
        vec![SchemaError { path: "/".into(), message: format!("deserialization failed: {e}") }]
    })
}

fn unwrap_single_wrapper(doc: &Value) -> &Value {
    if let Some(obj) = doc.as_object() {
        if obj.len() == 1 {
            let inner = obj.values().next().unwrap();
            if inner.as_object().is_some_and(|o| o.contains_key("objects")) {
                return inner;
            }
        }
    }
    doc
}

fn check_keys(value: &Value, expected: &[&str], path: &str, errors: &mut Vec<SchemaError>) {
    let obj = match value.as_object() {
        Some(o) => o,
        None => {
            errors.push(SchemaError { path: path.into(), message: "must be an object".into() });
            return;
        }
    };
    for key in expected {
        if !obj.contains_key(*key) {
            errors.push(SchemaError {
                path: format!("{path}/{key}"),
                message: "missing required key".into(),
            });
        }
    }
    for key in obj.keys() {
        if !expected.contains(&key.as_str()) {
            errors.push(SchemaError {
                path: format!("{path}/{key}"),
                message: "unexpected key".into(),
            });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn minimal_doc() -> Value {
        json!({
            "objects": [
                {"name": "agent", "type": "green_circle", "state": "active",
                 "position": [5, 0], "properties": {}},
                {"name": "goal", "type": "blue_circle", "state": "target",
                 "position": [2, 4], "properties": {}},
            ],
            "relationships": [],
        })
    }

    #[test]
    fn accepts_minimal_document() {
        let sg = validate_document(&minimal_doc()).unwrap();
        assert_eq!(sg.objects.len(), 2);
        assert!(sg.action_history.is_empty());
    }

    #[test]
    fn accepts_wrapped_document() {
        let doc = json!({"initial_scene_graph": minimal_doc()});
        assert!(validate_document(&doc).is_ok());
    }

    #[test]
    fn missing_relationships_is_one_error_at_path() {
        let mut doc = minimal_doc();
        doc.as_object_mut().unwrap().remove("relationships");
        let errors = validate_document(&doc).unwrap_err();
        assert_eq!(errors.len(), 1);
        assert_eq!(errors[0].path, "/relationships");
    }

    #[test]
    fn dangling_relationship_is_a_referential_error() {
        let mut doc = minimal_doc();
        doc["relationships"] = json!([
            {"relationship": "on_top", "subject": "block_9", "object": "agent"}
        ]);
        let errors = validate_document(&doc).unwrap_err();
        assert!(errors.iter().any(|e| e.path == "/relationships/0/subject"));
    }

    #[test]
    fn extra_keys_are_rejected() {
        let mut doc = minimal_doc();
        doc.as_object_mut().unwrap().insert("notes".into(), json!("hi"));
        let errors = validate_document(&doc).unwrap_err();
        assert!(errors.iter().any(|e| e.path == "/notes"));
    }

    #[test]
    fn non_increasing_history_steps_are_rejected() {
        let mut doc = minimal_doc();
        let entry = json!({"step": 0, "action": "x", "affected_entities": [],
                           "state_changes": [], "validity": true});
        doc.as_object_mut()
            .unwrap()
            .insert("action_history".into(), json!([entry, entry]));
        let errors = validate_document(&doc).unwrap_err();
        assert!(errors.iter().any(|e| e.path == "/action_history/1/step"));
    }
}
