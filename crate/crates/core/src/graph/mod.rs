//! Scene graphs: deterministic construction from environment states,
//! incremental update per action, similarity scoring, and strict schema
//! validation of externally produced documents.
//!
//! The document layout follows the benchmark's published schema: `objects`,
//! `relationships`, `environment`, and `action_history`, with blocks
//! positions written as `column_X, level_Y` strings (1-indexed, matching the
//! published walkthrough) and grid positions as `[row, col]` arrays.

mod document;
mod similarity;

pub use document::{
    validate_document, SceneGraph, SchemaError, SgEnvironment, SgHistoryEntry, SgObject,
    SgPosition, SgRelationship, SgStateChange,
};
pub use similarity::{similarity, DistanceHint, SimilarityBreakdown, SimilarityScore};

use crate::env::{
    blocks::NUM_COLUMNS, ActionRecord, BlocksLayout, BlocksState, Domain, EnvState, MazeLayout,
    MazeState, ShuffleState,
};
use serde_json::{json, Map, Value};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("scene graphs are not defined for the {0} domain")]
    Unsupported(Domain),
    #[error("cannot interpret scene graph: {0}")]
    Malformed(String),
    #[error("cross-domain comparison: {0} vs {1}")]
    CrossDomain(Domain, Domain),
}

/// Deterministically builds the scene graph describing `state`. The graph
/// carries no action history; history accumulates through [`update`].
pub fn from_state(state: &EnvState) -> Result<SceneGraph, GraphError> {
    match state {
        EnvState::Maze(s) => Ok(maze_graph(s)),
        EnvState::Blocks(s) => Ok(blocks_graph(s)),
        EnvState::Shuffle(s) => Ok(shuffle_graph(s)),
        EnvState::Freetext(_) => Err(GraphError::Unsupported(Domain::Freetext)),
    }
}

/// Best-effort domain detection for cross-domain checks.
pub fn sniff_domain(sg: &SceneGraph) -> Option<Domain> {
    if sg.objects.iter().any(|o| o.kind == "block") {
        return Some(Domain::Blocks);
    }
    if sg.objects.iter().any(|o| o.kind == "image_patch") {
        return Some(Domain::Shuffle);
    }
    if sg.objects.iter().any(|o| o.name == "agent" || o.name == "goal") {
        return Some(Domain::Maze);
    }
    None
}

/// Reconstructs the environment state a graph describes.
pub fn to_state(sg: &SceneGraph) -> Result<EnvState, GraphError> {
    match sniff_domain(sg) {
        Some(Domain::Maze) => maze_from_graph(sg).map(EnvState::Maze),
        Some(Domain::Blocks) => blocks_from_graph(sg).map(EnvState::Blocks),
        Some(Domain::Shuffle) => shuffle_from_graph(sg).map(EnvState::Shuffle),
        _ => Err(GraphError::Malformed("unrecognized object set".into())),
    }
}

/// Simulates one action on the graph, mirroring the environment's apply
/// semantics. Faults are recorded in the appended history entry (validity
/// false), never thrown.
pub fn update(sg: &SceneGraph, action: &ActionRecord) -> Result<SceneGraph, GraphError> {
    let state = to_state(sg)?;
    let step = sg.action_history.len();
    let outcome = state
        .apply(action, step)
        .map_err(|e| GraphError::Malformed(format!("action does not fit the graph: {e}")))?;
    let validity = outcome.is_ok();
    let next_state = outcome.state();
    let mut next = from_state(&next_state)?;

    let mut state_changes = Vec::new();
    let mut affected = Vec::new();
    for obj in &next.objects {
        if let Some(old) = sg.objects.iter().find(|o| o.name == obj.name) {
            if old.position != obj.position {
                affected.push(obj.name.clone());
                state_changes.push(SgStateChange {
                    entity: obj.name.clone(),
                    property: "position".to_string(),
                    old_value: old.position.to_value(),
                    new_value: obj.position.to_value(),
                });
            }
            if old.state != obj.state {
                state_changes.push(SgStateChange {
                    entity: obj.name.clone(),
                    property: "state".to_string(),
                    old_value: Value::String(old.state.clone()),
                    new_value: Value::String(obj.state.clone()),
                });
            }
        }
    }

    next.action_history = sg.action_history.clone();
    next.action_history.push(SgHistoryEntry {
        step: step as u64,
        action: action.text.clone(),
        affected_entities: affected,
        state_changes,
        validity,
    });
    Ok(next)
}

/// The graph as it was before its last history entry, obtained by undoing
/// that entry's recorded state changes. `None` when the history is empty.
pub fn previous_graph(sg: &SceneGraph) -> Option<SceneGraph> {
    let last = sg.action_history.last()?;
    let mut prev = sg.clone();
    for change in &last.state_changes {
        if let Some(obj) = prev.objects.iter_mut().find(|o| o.name == change.entity) {
            match change.property.as_str() {
                "position" => {
                    if let Some(p) = SgPosition::from_value(&change.old_value) {
                        obj.position = p;
                    }
                }
                "state" => {
                    if let Some(s) = change.old_value.as_str() {
                        obj.state = s.to_string();
                    }
                }
                _ => {}
            }
        }
    }
    prev.action_history.pop();
    // Positions moved back; derived relationships must follow.
    if let Ok(state) = to_state(&prev) {
        if let Ok(rebuilt) = from_state(&state) {
            prev.relationships = rebuilt.relationships;
            prev.objects = rebuilt.objects;
        }
    }
    Some(prev)
}

fn maze_graph(s: &MazeState) -> SceneGraph {
    let mut objects = vec![
        SgObject {
            name: "agent".into(),
            kind: "green_circle".into(),
            state: "active".into(),
            position: SgPosition::cell(s.agent),
            properties: Map::new(),
        },
        SgObject {
            name: "goal".into(),
            kind: "blue_circle".into(),
            state: "target".into(),
            position: SgPosition::cell(s.layout.goal),
            properties: Map::new(),
        },
    ];
    for (i, &obstacle) in s.layout.obstacles.iter().enumerate() {
        objects.push(SgObject {
            name: format!("obstacle_{}", i + 1),
            kind: "red_rectangle".into(),
            state: "blocking".into(),
            position: SgPosition::cell(obstacle),
            properties: Map::new(),
        });
    }
    SceneGraph {
        objects,
        relationships: Vec::new(),
        environment: SgEnvironment {
            global_constraints: json!({
                "grid_dimensions": [s.layout.rows, s.layout.cols],
                "coordinates": "(0,0) is top-left",
            }),
            valid_actions: ["move_up", "move_down", "move_left", "move_right"]
                .iter()
                .map(|s| s.to_string())
                .collect(),
            boundary_conditions: vec![
                "agent must remain within the grid".to_string(),
                "only horizontal and vertical movements are allowed".to_string(),
            ],
        },
        action_history: Vec::new(),
    }
}

fn blocks_graph(s: &BlocksState) -> SceneGraph {
    let mut objects = Vec::with_capacity(s.layout.num_blocks);
    for id in 0..s.layout.num_blocks as u32 {
        let (col, level) = block_position(&s.columns, id);
        objects.push(SgObject {
            name: format!("block_{id}"),
            kind: "block".into(),
            state: if level == 0 { "resting".into() } else { "stacked".into() },
            position: SgPosition::Text(format!("column_{}, level_{}", col + 1, level + 1)),
            properties: {
                let mut m = Map::new();
                let color = s.layout.colors.get(&id).cloned().unwrap_or_default();
                m.insert("color".into(), Value::String(color));
                m
            },
        });
    }
    let mut relationships = Vec::new();
    for col in &s.columns {
        for pair in col.windows(2) {
            relationships.push(SgRelationship {
                relationship: "on_top".into(),
                subject: format!("block_{}", pair[1]),
                object: format!("block_{}", pair[0]),
            });
        }
    }
    let bottoms: Vec<(usize, u32)> = s
        .columns
        .iter()
        .enumerate()
        .filter_map(|(c, col)| col.first().map(|&b| (c, b)))
        .collect();
    for pair in bottoms.windows(2) {
        if pair[1].0 == pair[0].0 + 1 {
            relationships.push(SgRelationship {
                relationship: "beside".into(),
                subject: format!("block_{}", pair[0].1),
                object: format!("block_{}", pair[1].1),
            });
        }
    }
    SceneGraph {
        objects,
        relationships,
        environment: SgEnvironment {
            global_constraints: json!({ "columns": NUM_COLUMNS }),
            valid_actions: vec!["move".into(), "stack".into(), "unstack".into()],
            boundary_conditions: vec![
                "blocks must remain within 5 columns".to_string(),
                "only one block can be moved at a time".to_string(),
            ],
        },
        action_history: Vec::new(),
    }
}

fn shuffle_graph(s: &ShuffleState) -> SceneGraph {
    let mut objects = Vec::with_capacity(s.tile_count());
    for tile in 0..s.tile_count() {
        let cell_idx = s.perm.iter().position(|&t| t == tile).expect("perm is a bijection");
        objects.push(SgObject {
            name: format!("tile_{tile}"),
            kind: "image_patch".into(),
            state: "placed".into(),
            position: SgPosition::cell(s.index_cell(cell_idx)),
            properties: {
                let mut m = Map::new();
                let home = s.index_cell(tile);
                m.insert("home".into(), json!([home.0, home.1]));
                m
            },
        });
    }
    SceneGraph {
        objects,
        relationships: Vec::new(),
        environment: SgEnvironment {
            global_constraints: json!({
                "grid_dimensions": [s.tile_rows, s.tile_cols],
                "coordinates": "(0,0) is top-left",
            }),
            valid_actions: vec!["swap".into()],
            boundary_conditions: vec!["patches swap only within the grid".to_string()],
        },
        action_history: Vec::new(),
    }
}

fn block_position(columns: &[Vec<u32>], id: u32) -> (usize, usize) {
    for (c, col) in columns.iter().enumerate() {
        if let Some(level) = col.iter().position(|&b| b == id) {
            return (c, level);
        }
    }
    unreachable!("block id {id} missing from columns")
}

fn maze_from_graph(sg: &SceneGraph) -> Result<MazeState, GraphError> {
    let dims = sg.environment.global_constraints.get("grid_dimensions");
    let (rows, cols) = match dims.and_then(Value::as_array) {
        Some(d) if d.len() == 2 => (
            d[0].as_u64().ok_or_else(|| GraphError::Malformed("bad grid rows".into()))? as usize,
            d[1].as_u64().ok_or_else(|| GraphError::Malformed("bad grid cols".into()))? as usize,
        ),
        _ => return Err(GraphError::Malformed("missing grid_dimensions".into())),
    };
    let cell_of = |name: &str| -> Result<(i32, i32), GraphError> {
        sg.objects
            .iter()
            .find(|o| o.name == name)
            .and_then(|o| o.position.as_cell())
            .ok_or_else(|| GraphError::Malformed(format!("object {name} missing or not a cell")))
    };
    let agent = cell_of("agent")?;
    let goal = cell_of("goal")?;
    let obstacles = sg
        .objects
        .iter()
        .filter(|o| o.name.starts_with("obstacle"))
        .filter_map(|o| o.position.as_cell())
        .collect();
    // Constructed directly: mid-simulation the agent may sit inside an
    // obstacle, which the layout constructor would reject.
    let layout = MazeLayout { rows, cols, obstacles, start: agent, goal };
    Ok(MazeState { layout, agent, violations: Vec::new() })
}

fn blocks_from_graph(sg: &SceneGraph) -> Result<BlocksState, GraphError> {
    let mut placed: Vec<(usize, usize, u32, String)> = Vec::new();
    for obj in sg.objects.iter().filter(|o| o.kind == "block") {
        let id: u32 = obj
            .name
            .strip_prefix("block_")
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| GraphError::Malformed(format!("bad block name {}", obj.name)))?;
        let text = match &obj.position {
            SgPosition::Text(t) => t.clone(),
            _ => return Err(GraphError::Malformed(format!("block {id} position not text"))),
        };
        let (col, level) = parse_block_position(&text)
            .ok_or_else(|| GraphError::Malformed(format!("bad block position {text:?}")))?;
        let color =
            obj.properties.get("color").and_then(Value::as_str).unwrap_or_default().to_string();
        placed.push((col, level, id, color));
    }
    let num_blocks = placed.len();
    let mut columns = vec![Vec::new(); NUM_COLUMNS];
    placed.sort_unstable();
    let mut colors = std::collections::BTreeMap::new();
    for (col, level, id, color) in placed {
        if col >= NUM_COLUMNS || level != columns[col].len() {
            return Err(GraphError::Malformed(format!(
                "block {id} at column {col} level {level} leaves a gap"
            )));
        }
        columns[col].push(id);
        colors.insert(id, color);
    }
    let layout = BlocksLayout { num_columns: NUM_COLUMNS, num_blocks, colors };
    Ok(BlocksState { layout, columns, violations: Vec::new() })
}

/// Parses `column_X, level_Y` (1-indexed) into 0-indexed column and level.
fn parse_block_position(text: &str) -> Option<(usize, usize)> {
    let (col_part, level_part) = text.split_once(", ")?;
    let col: usize = col_part.strip_prefix("column_")?.parse().ok()?;
    let level: usize = level_part.strip_prefix("level_")?.parse().ok()?;
    Some((col.checked_sub(1)?, level.checked_sub(1)?))
}

fn shuffle_from_graph(sg: &SceneGraph) -> Result<ShuffleState, GraphError> {
    let dims = sg.environment.global_constraints.get("grid_dimensions");
    let (rows, cols) = match dims.and_then(Value::as_array) {
        Some(d) if d.len() == 2 => (
            d[0].as_u64().ok_or_else(|| GraphError::Malformed("bad tile rows".into()))? as usize,
            d[1].as_u64().ok_or_else(|| GraphError::Malformed("bad tile cols".into()))? as usize,
        ),
        _ => return Err(GraphError::Malformed("missing grid_dimensions".into())),
    };
    let mut perm = vec![usize::MAX; rows * cols];
    for obj in sg.objects.iter().filter(|o| o.kind == "image_patch") {
        let tile: usize = obj
            .name
            .strip_prefix("tile_")
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| GraphError::Malformed(format!("bad tile name {}", obj.name)))?;
        let cell = obj
            .position
            .as_cell()
            .ok_or_else(|| GraphError::Malformed(format!("tile {tile} position not a cell")))?;
        let idx = cell.0 as usize * cols + cell.1 as usize;
        if idx >= perm.len() || tile >= perm.len() {
            return Err(GraphError::Malformed(format!("tile {tile} outside the grid")));
        }
        perm[idx] = tile;
    }
    if !crate::env::shuffle::is_permutation(&perm) {
        return Err(GraphError::Malformed("tiles do not form a permutation".into()));
    }
    Ok(ShuffleState { tile_rows: rows, tile_cols: cols, perm, violations: Vec::new() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::ActionRecord;

    fn walkthrough_maze() -> EnvState {
        let layout = MazeLayout::new(6, 5, [(3, 2), (2, 2)].into_iter().collect(), (5, 0), (2, 4))
            .unwrap();
        EnvState::Maze(MazeState::initial(layout))
    }

    fn walkthrough_blocks() -> EnvState {
        let layout = BlocksLayout::new(8).unwrap();
        let columns = vec![vec![2], vec![0, 7], vec![1, 6, 5], vec![3], vec![4]];
        EnvState::Blocks(BlocksState::new(layout, columns))
    }

    #[test]
    fn maze_graph_matches_walkthrough_positions() {
        let sg = from_state(&walkthrough_maze()).unwrap();
        let pos = |name: &str| {
            sg.objects.iter().find(|o| o.name == name).unwrap().position.as_cell().unwrap()
        };
        assert_eq!(pos("agent"), (5, 0));
        assert_eq!(pos("goal"), (2, 4));
        assert_eq!(pos("obstacle_1"), (2, 2));
        assert_eq!(pos("obstacle_2"), (3, 2));
    }

    #[test]
    fn blocks_graph_has_walkthrough_relationships() {
        let sg = from_state(&walkthrough_blocks()).unwrap();
        let has = |rel: &str, subject: &str, object: &str| {
            sg.relationships
                .iter()
                .any(|r| r.relationship == rel && r.subject == subject && r.object == object)
        };
        assert!(has("on_top", "block_7", "block_0"));
        assert!(has("on_top", "block_5", "block_6"));
        let b5 = sg.objects.iter().find(|o| o.name == "block_5").unwrap();
        assert_eq!(b5.position, SgPosition::Text("column_3, level_3".into()));
    }

    #[test]
    fn identity_shuffle_tiles_sit_at_home() {
        let sg = from_state(&EnvState::Shuffle(ShuffleState::identity(3, 3))).unwrap();
        for (i, obj) in sg.objects.iter().enumerate() {
            let cell = obj.position.as_cell().unwrap();
            assert_eq!(cell, ((i / 3) as i32, (i % 3) as i32));
        }
    }

    #[test]
    fn update_moves_block_and_drops_none() {
        // Move block 0 from (0-indexed) column 1 to column 4: block 7 was on
        // top of block 0, so this is recorded as an invalid nontop move.
        let sg = from_state(&walkthrough_blocks()).unwrap();
        let bad = update(&sg, &ActionRecord::block_move(0, 1, 4)).unwrap();
        assert!(!bad.action_history.last().unwrap().validity);

        // A clean top move: block 3 from column 3 onto column 4.
        let good = update(&sg, &ActionRecord::block_move(3, 3, 4)).unwrap();
        let entry = good.action_history.last().unwrap();
        assert!(entry.validity);
        assert_eq!(entry.affected_entities, vec!["block_3".to_string()]);
        let b3 = good.objects.iter().find(|o| o.name == "block_3").unwrap();
        assert_eq!(b3.position, SgPosition::Text("column_5, level_2".into()));
        assert_eq!(b3.state, "stacked");
    }

    #[test]
    fn unknown_block_leaves_positions_alone() {
        let sg = from_state(&walkthrough_blocks()).unwrap();
        let next = update(&sg, &ActionRecord::block_move(9, 1, 2)).unwrap();
        assert!(!next.action_history.last().unwrap().validity);
        for (a, b) in sg.objects.iter().zip(next.objects.iter()) {
            assert_eq!(a.position, b.position);
        }
    }

    #[test]
    fn maze_revert_after_diagonal_fault() {
        // Diagonal fault leaves the agent in place; the textual revert then
        // mismatches its source. Two history entries, agent at the pre-error
        // cell throughout.
        let initial = walkthrough_maze();
        let sg = from_state(&initial).unwrap();
        let after_error = update(&sg, &ActionRecord::maze_move((5, 0), (4, 1))).unwrap();
        let after_revert = update(&after_error, &ActionRecord::maze_move((4, 1), (5, 0))).unwrap();
        assert_eq!(after_revert.action_history.len(), 2);
        assert!(after_revert.action_history.iter().all(|e| !e.validity));
        let agent = after_revert.objects.iter().find(|o| o.name == "agent").unwrap();
        assert_eq!(agent.position.as_cell().unwrap(), (5, 0));
    }

    #[test]
    fn previous_graph_undoes_the_last_entry() {
        let sg = from_state(&walkthrough_blocks()).unwrap();
        let next = update(&sg, &ActionRecord::block_move(3, 3, 4)).unwrap();
        let prev = previous_graph(&next).unwrap();
        assert_eq!(prev.objects, sg.objects);
        assert!(prev.action_history.is_empty());
    }

    #[test]
    fn graph_state_round_trip() {
        for state in [walkthrough_maze(), walkthrough_blocks()] {
            let sg = from_state(&state).unwrap();
            let back = to_state(&sg).unwrap();
            assert!(back.at_goal(&state) || state.at_goal(&back));
        }
    }
}
