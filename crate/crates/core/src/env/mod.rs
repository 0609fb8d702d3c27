//! Deterministic state machines and optimal solvers for the three synthetic
//! planning domains (maze navigation, blocks rearrangement, tile shuffle).
//!
//! All types are immutable values; `apply` and `solve` are pure functions and
//! safe to call concurrently.

pub mod action;
pub mod blocks;
pub mod maze;
pub mod shuffle;

pub use action::{ActionParseError, ActionPayload, ActionRecord, Cell};
pub use blocks::{BlocksLayout, BlocksState};
pub use maze::{MazeLayout, MazeState};
pub use shuffle::ShuffleState;

use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    Maze,
    Blocks,
    Shuffle,
    Freetext,
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Domain::Maze => "maze",
            Domain::Blocks => "blocks",
            Domain::Shuffle => "shuffle",
            Domain::Freetext => "freetext",
        };
        f.write_str(s)
    }
}

/// Closed list of fault kinds an illegal action can record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    DiagonalMove,
    OutOfGrid,
    IntoObstacle,
    PreconditionMismatch,
    NontopBlock,
    InvalidColumn,
    MidairPlacement,
    UnknownObject,
    InvalidTile,
}

impl ViolationKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ViolationKind::DiagonalMove => "diagonal_move",
            ViolationKind::OutOfGrid => "out_of_grid",
            ViolationKind::IntoObstacle => "into_obstacle",
            ViolationKind::PreconditionMismatch => "precondition_mismatch",
            ViolationKind::NontopBlock => "nontop_block",
            ViolationKind::InvalidColumn => "invalid_column",
            ViolationKind::MidairPlacement => "midair_placement",
            ViolationKind::UnknownObject => "unknown_object",
            ViolationKind::InvalidTile => "invalid_tile",
        }
    }
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Machine-readable record of an illegal action, attached during simulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ViolationTag {
    pub kind: ViolationKind,
    pub step_index: usize,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EnvError {
    #[error("action domain {action} does not match state domain {state}")]
    DomainMismatch { state: Domain, action: Domain },
    #[error("states do not share a layout")]
    LayoutMismatch,
    #[error("goal is unreachable from the given state")]
    Unsolvable,
    #[error("operation is not supported for the {0} domain")]
    Unsupported(Domain),
}

/// Free-text world description for externally curated instances. There is no
/// simulator behind it; only the text travels through the pipeline.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FreeTextState {
    pub description: String,
}

/// Tagged per-domain world state together with its static layout.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "domain", rename_all = "snake_case")]
pub enum EnvState {
    Maze(MazeState),
    Blocks(BlocksState),
    Shuffle(ShuffleState),
    Freetext(FreeTextState),
}

/// Result of applying an action: either the successor state, or a fault
/// carrying the violation kind and the post-fault state.
///
/// Physically impossible actions leave the state unchanged; possible but
/// forbidden ones (entering an obstacle) do change it. Either way the fault
/// state carries a freshly recorded [`ViolationTag`].
#[derive(Debug, Clone, PartialEq)]
pub enum ApplyOutcome {
    Ok(EnvState),
    Fault { kind: ViolationKind, state: EnvState },
}

impl ApplyOutcome {
    /// The resulting state, fault or not.
    pub fn state(self) -> EnvState {
        match self {
            ApplyOutcome::Ok(s) | ApplyOutcome::Fault { state: s, .. } => s,
        }
    }

    pub fn state_ref(&self) -> &EnvState {
        match self {
            ApplyOutcome::Ok(s) | ApplyOutcome::Fault { state: s, .. } => s,
        }
    }

    pub fn fault_kind(&self) -> Option<ViolationKind> {
        match self {
            ApplyOutcome::Ok(_) => None,
            ApplyOutcome::Fault { kind, .. } => Some(*kind),
        }
    }

    pub fn is_ok(&self) -> bool {
        matches!(self, ApplyOutcome::Ok(_))
    }
}

impl EnvState {
    pub fn domain(&self) -> Domain {
        match self {
            EnvState::Maze(_) => Domain::Maze,
            EnvState::Blocks(_) => Domain::Blocks,
            EnvState::Shuffle(_) => Domain::Shuffle,
            EnvState::Freetext(_) => Domain::Freetext,
        }
    }

    pub fn violations(&self) -> &[ViolationTag] {
        match self {
            EnvState::Maze(s) => &s.violations,
            EnvState::Blocks(s) => &s.violations,
            EnvState::Shuffle(s) => &s.violations,
            EnvState::Freetext(_) => &[],
        }
    }

    /// Every action that applies cleanly from this state, in canonical order.
    pub fn legal_actions(&self) -> Vec<ActionRecord> {
        match self {
            EnvState::Maze(s) => maze::legal_actions(s),
            EnvState::Blocks(s) => blocks::legal_actions(s),
            EnvState::Shuffle(s) => shuffle::legal_actions(s),
            EnvState::Freetext(_) => Vec::new(),
        }
    }

    /// Applies `action`, recording `step` into the violation tag on fault.
    /// A domain mismatch is a hard error, not a fault.
    pub fn apply(&self, action: &ActionRecord, step: usize) -> Result<ApplyOutcome, EnvError> {
        match (self, &action.payload) {
            (EnvState::Maze(s), ActionPayload::MazeMove { from, to }) => {
                Ok(maze::apply(s, *from, *to, step))
            }
            (EnvState::Blocks(s), ActionPayload::BlockMove { block_id, from_col, to_col }) => {
                Ok(blocks::apply(s, *block_id, *from_col, *to_col, step))
            }
            (EnvState::Shuffle(s), ActionPayload::TileSwap { a, b }) => {
                Ok(shuffle::apply(s, *a, *b, step))
            }
            (EnvState::Freetext(_), _) => Err(EnvError::Unsupported(Domain::Freetext)),
            _ => Err(EnvError::DomainMismatch { state: self.domain(), action: action.domain }),
        }
    }

    /// Minimum-length legal plan from this state to `goal`. Deterministic:
    /// ties are broken by the fixed per-domain expansion order.
    pub fn solve(&self, goal: &EnvState) -> Result<Vec<ActionRecord>, EnvError> {
        match (self, goal) {
            (EnvState::Maze(a), EnvState::Maze(b)) => {
                if a.layout != b.layout {
                    return Err(EnvError::LayoutMismatch);
                }
                maze::solve(&a.layout, a.agent, b.agent)
            }
            (EnvState::Blocks(a), EnvState::Blocks(b)) => {
                if a.layout != b.layout {
                    return Err(EnvError::LayoutMismatch);
                }
                blocks::solve(&a.columns, &b.columns)
            }
            (EnvState::Shuffle(a), EnvState::Shuffle(b)) => shuffle::solve(a, b),
            (EnvState::Freetext(_), _) => Err(EnvError::Unsupported(Domain::Freetext)),
            _ => Err(EnvError::LayoutMismatch),
        }
    }

    /// `solve` length, or `None` when the goal is unreachable.
    pub fn distance_to_goal(&self, goal: &EnvState) -> Result<Option<usize>, EnvError> {
        match (self, goal) {
            (EnvState::Maze(a), EnvState::Maze(b)) => {
                if a.layout != b.layout {
                    return Err(EnvError::LayoutMismatch);
                }
                Ok(maze::distance(&a.layout, a.agent, b.agent))
            }
            (EnvState::Blocks(a), EnvState::Blocks(b)) => {
                if a.layout != b.layout {
                    return Err(EnvError::LayoutMismatch);
                }
                Ok(blocks::distance(&a.columns, &b.columns))
            }
            (EnvState::Shuffle(a), EnvState::Shuffle(b)) => {
                if a.tile_rows != b.tile_rows || a.tile_cols != b.tile_cols {
                    return Err(EnvError::LayoutMismatch);
                }
                Ok(shuffle::distance(a, b))
            }
            (EnvState::Freetext(_), _) => Err(EnvError::Unsupported(Domain::Freetext)),
            _ => Err(EnvError::LayoutMismatch),
        }
    }

    /// Positional equality, ignoring recorded violations.
    pub fn at_goal(&self, goal: &EnvState) -> bool {
        match (self, goal) {
            (EnvState::Maze(a), EnvState::Maze(b)) => a.agent == b.agent,
            (EnvState::Blocks(a), EnvState::Blocks(b)) => a.columns == b.columns,
            (EnvState::Shuffle(a), EnvState::Shuffle(b)) => a.perm == b.perm,
            _ => false,
        }
    }

    /// Folds a sequence of actions, recording faults as it goes; never fails
    /// on illegal actions, only on domain mismatches.
    pub fn simulate(&self, actions: &[ActionRecord]) -> Result<EnvState, EnvError> {
        let mut state = self.clone();
        for (step, action) in actions.iter().enumerate() {
            state = state.apply(action, step)?.state();
        }
        Ok(state)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn maze_state() -> EnvState {
        let layout =
            MazeLayout::new(3, 3, std::collections::BTreeSet::new(), (0, 0), (2, 2)).unwrap();
        EnvState::Maze(MazeState { layout, agent: (1, 0), violations: Vec::new() })
    }

    #[test]
    fn diagonal_move_faults_and_stays_put() {
        let s = maze_state();
        let outcome = s.apply(&ActionRecord::maze_move((1, 0), (2, 1)), 0).unwrap();
        assert_eq!(outcome.fault_kind(), Some(ViolationKind::DiagonalMove));
        match outcome.state() {
            EnvState::Maze(m) => {
                assert_eq!(m.agent, (1, 0));
                assert_eq!(m.violations.len(), 1);
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn adjacent_obstacle_move_enters_the_cell() {
        let layout =
            MazeLayout::new(3, 3, [(2, 0)].into_iter().collect(), (0, 0), (2, 2)).unwrap();
        let s = EnvState::Maze(MazeState { layout, agent: (1, 0), violations: Vec::new() });
        let outcome = s.apply(&ActionRecord::maze_move((1, 0), (2, 0)), 3).unwrap();
        assert_eq!(outcome.fault_kind(), Some(ViolationKind::IntoObstacle));
        match outcome.state() {
            EnvState::Maze(m) => {
                assert_eq!(m.agent, (2, 0));
                assert_eq!(m.violations[0].step_index, 3);
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn source_mismatch_is_a_precondition_fault() {
        let s = maze_state();
        let outcome = s.apply(&ActionRecord::maze_move((2, 1), (1, 1)), 0).unwrap();
        assert_eq!(outcome.fault_kind(), Some(ViolationKind::PreconditionMismatch));
    }

    #[test]
    fn out_of_scene_source_is_unknown_object() {
        let s = maze_state();
        let outcome = s.apply(&ActionRecord::maze_move((7, 7), (7, 6)), 0).unwrap();
        assert_eq!(outcome.fault_kind(), Some(ViolationKind::UnknownObject));
    }

    #[test]
    fn moving_out_of_the_grid_faults() {
        let layout =
            MazeLayout::new(3, 3, std::collections::BTreeSet::new(), (0, 0), (2, 2)).unwrap();
        let s = EnvState::Maze(MazeState::initial(layout));
        let outcome = s.apply(&ActionRecord::maze_move((0, 0), (-1, 0)), 0).unwrap();
        assert_eq!(outcome.fault_kind(), Some(ViolationKind::OutOfGrid));
        match outcome.state() {
            EnvState::Maze(m) => assert_eq!(m.agent, (0, 0)),
            _ => unreachable!(),
        }
    }

    #[test]
    fn blocks_move_lands_on_top() {
        let layout = BlocksLayout::new(8).unwrap();
        let columns = vec![vec![2], vec![0, 7], vec![1, 6, 5], vec![3], vec![4]];
        let s = EnvState::Blocks(BlocksState::new(layout, columns));
        // Generic top-block move: block 3 sits alone on column 3.
        let outcome = s.apply(&ActionRecord::block_move(3, 3, 4), 0).unwrap();
        assert!(outcome.is_ok());
        match outcome.state() {
            EnvState::Blocks(b) => {
                assert_eq!(b.columns[3], Vec::<u32>::new());
                assert_eq!(b.columns[4], vec![4, 3]);
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn blocks_fault_taxonomy() {
        let layout = BlocksLayout::new(8).unwrap();
        let columns = vec![vec![2], vec![0, 7], vec![1, 6, 5], vec![3], vec![4]];
        let s = EnvState::Blocks(BlocksState::new(layout, columns));
        let kind = |a: &ActionRecord| s.apply(a, 0).unwrap().fault_kind();
        assert_eq!(kind(&ActionRecord::block_move(9, 1, 2)), Some(ViolationKind::UnknownObject));
        assert_eq!(kind(&ActionRecord::block_move(2, 0, 7)), Some(ViolationKind::InvalidColumn));
        assert_eq!(
            kind(&ActionRecord::block_move(2, 1, 2)),
            Some(ViolationKind::PreconditionMismatch)
        );
        assert_eq!(kind(&ActionRecord::block_move(0, 1, 2)), Some(ViolationKind::NontopBlock));
    }

    #[test]
    fn domain_mismatch_is_a_hard_error() {
        let s = maze_state();
        let err = s.apply(&ActionRecord::block_move(0, 0, 1), 0).unwrap_err();
        assert!(matches!(err, EnvError::DomainMismatch { .. }));
    }

    #[test]
    fn solve_identity_is_empty() {
        let s = maze_state();
        assert!(s.solve(&s).unwrap().is_empty());
        assert_eq!(s.distance_to_goal(&s).unwrap(), Some(0));
    }

    #[test]
    fn unreachable_goal_is_an_explicit_error() {
        // Goal walled off by obstacles.
        let layout = MazeLayout::new(
            4,
            4,
            [(2, 3), (3, 2)].into_iter().collect(),
            (0, 0),
            (3, 3),
        )
        .unwrap();
        let initial = EnvState::Maze(MazeState::initial(layout.clone()));
        let goal = EnvState::Maze(MazeState::goal_state(layout));
        assert_eq!(initial.solve(&goal).unwrap_err(), EnvError::Unsolvable);
        assert_eq!(initial.distance_to_goal(&goal).unwrap(), None);
    }
}
