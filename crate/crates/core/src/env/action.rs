//! Canonical action text grammar: parsing and rendering.
//!
//! Action texts are bit-exact interfaces. The three synthetic grammars are
//! `[r, c] -> [r', c']` for maze transitions, `Move block B from column X to
//! column Y` for blocks, and `Swap patch at position (r, c) with patch at
//! position (r', c')` for shuffle. Anything else is free text.

use super::Domain;
use regex::Regex;
use serde::{Deserialize, Serialize};
use std::sync::LazyLock;
use thiserror::Error;

/// A grid coordinate as `(row, col)`. Signed so that out-of-grid references
/// (e.g. `[-1, 0]`) stay representable.
pub type Cell = (i32, i32);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ActionParseError {
    #[error("text does not match the {domain:?} action grammar: {text:?}")]
    Grammar { domain: Domain, text: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ActionPayload {
    MazeMove { from: Cell, to: Cell },
    BlockMove { block_id: u32, from_col: i32, to_col: i32 },
    TileSwap { a: Cell, b: Cell },
    FreeText { text: String },
}

/// One domain action together with its canonical human-readable rendering.
///
/// The text always round-trips: `ActionRecord::parse(domain, &record.text)`
/// reconstructs an identical payload.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ActionWire", into = "ActionWire")]
pub struct ActionRecord {
    pub domain: Domain,
    pub payload: ActionPayload,
    pub text: String,
}

/// Serialized form: datasets store only the domain and the canonical text,
/// the payload is reconstructed by the parser on load.
#[derive(Serialize, Deserialize)]
struct ActionWire {
    domain: Domain,
    text: String,
}

impl From<ActionRecord> for ActionWire {
    fn from(a: ActionRecord) -> Self {
        ActionWire { domain: a.domain, text: a.text }
    }
}

impl TryFrom<ActionWire> for ActionRecord {
    type Error = ActionParseError;
    fn try_from(w: ActionWire) -> Result<Self, Self::Error> {
        ActionRecord::parse(w.domain, &w.text)
    }
}

static MAZE_RE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"^\[(-?\d+), (-?\d+)\] -> \[(-?\d+), (-?\d+)\]$").unwrap()
});
static BLOCKS_RE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"^Move block (\d+) from column (-?\d+) to column (-?\d+)$").unwrap()
});
static SHUFFLE_RE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(
        r"^Swap patch at position \((-?\d+), (-?\d+)\) with patch at position \((-?\d+), (-?\d+)\)$",
    )
    .unwrap()
});

impl ActionRecord {
    pub fn maze_move(from: Cell, to: Cell) -> Self {
        ActionRecord {
            domain: Domain::Maze,
            text: format!("[{}, {}] -> [{}, {}]", from.0, from.1, to.0, to.1),
            payload: ActionPayload::MazeMove { from, to },
        }
    }

    pub fn block_move(block_id: u32, from_col: i32, to_col: i32) -> Self {
        ActionRecord {
            domain: Domain::Blocks,
            text: format!("Move block {block_id} from column {from_col} to column {to_col}"),
            payload: ActionPayload::BlockMove { block_id, from_col, to_col },
        }
    }

    pub fn tile_swap(a: Cell, b: Cell) -> Self {
        ActionRecord {
            domain: Domain::Shuffle,
            text: format!(
                "Swap patch at position ({}, {}) with patch at position ({}, {})",
                a.0, a.1, b.0, b.1
            ),
            payload: ActionPayload::TileSwap { a, b },
        }
    }

    pub fn free_text(text: impl Into<String>) -> Self {
        let text = text.into();
        ActionRecord {
            domain: Domain::Freetext,
            payload: ActionPayload::FreeText { text: text.clone() },
            text,
        }
    }

    /// Parses canonical action text for the given domain.
    pub fn parse(domain: Domain, text: &str) -> Result<Self, ActionParseError> {
        let grammar = || ActionParseError::Grammar { domain, text: text.to_string() };
        match domain {
            Domain::Maze => {
                let c = MAZE_RE.captures(text).ok_or_else(grammar)?;
                let n = |i: usize| c[i].parse::<i32>().unwrap();
                Ok(Self::maze_move((n(1), n(2)), (n(3), n(4))))
            }
            Domain::Blocks => {
                let c = BLOCKS_RE.captures(text).ok_or_else(grammar)?;
                let block_id = c[1].parse::<u32>().map_err(|_| grammar())?;
                Ok(Self::block_move(
                    block_id,
                    c[2].parse::<i32>().unwrap(),
                    c[3].parse::<i32>().unwrap(),
                ))
            }
            Domain::Shuffle => {
                let c = SHUFFLE_RE.captures(text).ok_or_else(grammar)?;
                let n = |i: usize| c[i].parse::<i32>().unwrap();
                Ok(Self::tile_swap((n(1), n(2)), (n(3), n(4))))
            }
            Domain::Freetext => Ok(Self::free_text(text)),
        }
    }

    /// The exact inverse action, where one exists. Maze transitions and tile
    /// swaps are involutive; block moves swap source and destination columns.
    /// Free text has no inverse.
    pub fn inverse(&self) -> Option<ActionRecord> {
        match &self.payload {
            ActionPayload::MazeMove { from, to } => Some(Self::maze_move(*to, *from)),
            ActionPayload::BlockMove { block_id, from_col, to_col } => {
                Some(Self::block_move(*block_id, *to_col, *from_col))
            }
            ActionPayload::TileSwap { a, b } => Some(Self::tile_swap(*a, *b)),
            ActionPayload::FreeText { .. } => None,
        }
    }
}
