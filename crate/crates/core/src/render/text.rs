//! Text-only serialization of maze and blocks states.
//!
//! Maze states become a row-major character grid (`.` free, `#` obstacle,
//! `S` agent, `G` goal); blocks states list each column bottom to top. Both
//! parse back exactly. Shuffle and free-text instances have no faithful
//! text form.

use crate::env::{BlocksLayout, BlocksState, Domain, EnvState, MazeLayout, MazeState};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TextFormatError {
    #[error("text serialization is not supported for the {0} domain")]
    Unsupported(Domain),
    #[error("state cannot be drawn as a character grid: {0}")]
    Unrepresentable(String),
    #[error("cannot parse text state: {0}")]
    Parse(String),
}

pub fn text_serialize(state: &EnvState) -> Result<String, TextFormatError> {
    match state {
        EnvState::Maze(s) => maze_to_text(s),
        EnvState::Blocks(s) => Ok(blocks_to_text(s)),
        other => Err(TextFormatError::Unsupported(other.domain())),
    }
}

fn maze_to_text(s: &MazeState) -> Result<String, TextFormatError> {
    if !s.layout.in_grid(s.agent) {
        return Err(TextFormatError::Unrepresentable("agent is outside the grid".into()));
    }
    if s.layout.obstacles.contains(&s.agent) {
        return Err(TextFormatError::Unrepresentable("agent is inside an obstacle".into()));
    }
    let mut lines = Vec::with_capacity(s.layout.rows);
    for r in 0..s.layout.rows as i32 {
        let mut line = String::with_capacity(s.layout.cols);
        for c in 0..s.layout.cols as i32 {
            let cell = (r, c);
            line.push(if cell == s.agent {
                'S'
            } else if cell == s.layout.goal {
                'G'
            } else if s.layout.obstacles.contains(&cell) {
                '#'
            } else {
                '.'
            });
        }
        lines.push(line);
    }
    Ok(lines.join("\n"))
}

/// Parses a character grid back into a maze state. `S` marks the agent (and
/// the layout start); a missing `G` means the agent is sitting on the goal.
pub fn parse_maze_text(text: &str) -> Result<MazeState, TextFormatError> {
    let lines: Vec<&str> = text.lines().collect();
    if lines.is_empty() {
        return Err(TextFormatError::Parse("empty grid".into()));
    }
    let cols = lines[0].chars().count();
    if lines.iter().any(|l| l.chars().count() != cols) {
        return Err(TextFormatError::Parse("ragged grid rows".into()));
    }
    let mut agent = None;
    let mut goal = None;
    let mut obstacles = std::collections::BTreeSet::new();
    for (r, line) in lines.iter().enumerate() {
        for (c, ch) in line.chars().enumerate() {
            let cell = (r as i32, c as i32);
            match ch {
                'S' => {
                    if agent.replace(cell).is_some() {
                        return Err(TextFormatError::Parse("multiple agents".into()));
                    }
                }
                'G' => {
                    if goal.replace(cell).is_some() {
                        return Err(TextFormatError::Parse("multiple goals".into()));
                    }
                }
                '#' => {
                    obstacles.insert(cell);
                }
                '.' => {}
                other => return Err(TextFormatError::Parse(format!("unknown cell {other:?}"))),
            }
        }
    }
    let agent = agent.ok_or_else(|| TextFormatError::Parse("no agent cell".into()))?;
    let goal = goal.unwrap_or(agent);
    // Constructed directly: the grid carries no independent start marker, so
    // the agent cell doubles as the start.
    let layout = MazeLayout { rows: lines.len(), cols, obstacles, start: agent, goal };
    Ok(MazeState { layout, agent, violations: Vec::new() })
}

fn blocks_to_text(s: &BlocksState) -> String {
    s.columns
        .iter()
        .enumerate()
        .map(|(i, col)| {
            let ids: Vec<String> = col.iter().map(|b| b.to_string()).collect();
            if ids.is_empty() {
                format!("col{i}:")
            } else {
                format!("col{i}: {}", ids.join(" "))
            }
        })
        .collect::<Vec<_>>()
        .join(" | ")
}

/// Parses a per-column listing back into a state; the layout supplies the
/// colors, which the text omits.
pub fn parse_blocks_text(text: &str, layout: &BlocksLayout) -> Result<BlocksState, TextFormatError> {
    let mut columns = Vec::new();
    for (i, part) in text.split(" | ").enumerate() {
        let prefix = format!("col{i}:");
        let rest = part
            .strip_prefix(&prefix)
            .ok_or_else(|| TextFormatError::Parse(format!("expected {prefix:?} in {part:?}")))?;
        let ids: Result<Vec<u32>, _> = rest.split_whitespace().map(str::parse).collect();
        columns.push(ids.map_err(|e| TextFormatError::Parse(format!("bad block id: {e}")))?);
    }
    if columns.len() != layout.num_columns {
        return Err(TextFormatError::Parse(format!(
            "expected {} columns, found {}",
            layout.num_columns,
            columns.len()
        )));
    }
    let seen: usize = columns.iter().map(Vec::len).sum();
    if seen != layout.num_blocks {
        return Err(TextFormatError::Parse(format!(
            "expected {} blocks, found {seen}",
            layout.num_blocks
        )));
    }
    Ok(BlocksState { layout: layout.clone(), columns, violations: Vec::new() })
}
