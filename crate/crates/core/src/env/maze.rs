//! Maze navigation: layout, state machine, and breadth-first solver.

use super::action::{ActionRecord, Cell};
use super::{ApplyOutcome, EnvError, ViolationKind, ViolationTag};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LayoutError {
    #[error("grid dimension out of range: {0} (expected 3..=8)")]
    DimensionOutOfRange(usize),
    #[error("too many obstacles: {0} (at most 5)")]
    TooManyObstacles(usize),
    #[error("start and goal must differ")]
    StartEqualsGoal,
    #[error("{what} must be inside the grid and off obstacles")]
    BadMarker { what: &'static str },
}

/// Static maze layout. `(0, 0)` is the top-left cell.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MazeLayout {
    pub rows: usize,
    pub cols: usize,
    pub obstacles: BTreeSet<Cell>,
    pub start: Cell,
    pub goal: Cell,
}

impl MazeLayout {
    pub fn new(
        rows: usize,
        cols: usize,
        obstacles: BTreeSet<Cell>,
        start: Cell,
        goal: Cell,
    ) -> Result<Self, LayoutError> {
        if !(3..=8).contains(&rows) {
            return Err(LayoutError::DimensionOutOfRange(rows));
        }
        if !(3..=8).contains(&cols) {
            return Err(LayoutError::DimensionOutOfRange(cols));
        }
        if obstacles.len() > 5 {
            return Err(LayoutError::TooManyObstacles(obstacles.len()));
        }
        if start == goal {
            return Err(LayoutError::StartEqualsGoal);
        }
        let layout = MazeLayout { rows, cols, obstacles, start, goal };
        if !layout.in_grid(start) || layout.obstacles.contains(&start) {
            return Err(LayoutError::BadMarker { what: "start" });
        }
        if !layout.in_grid(goal) || layout.obstacles.contains(&goal) {
            return Err(LayoutError::BadMarker { what: "goal" });
        }
        Ok(layout)
    }

    pub fn in_grid(&self, c: Cell) -> bool {
        c.0 >= 0 && c.1 >= 0 && (c.0 as usize) < self.rows && (c.1 as usize) < self.cols
    }

    pub fn is_free(&self, c: Cell) -> bool {
        self.in_grid(c) && !self.obstacles.contains(&c)
    }

    /// Whether an obstacle-free 4-connected path exists from start to goal.
    pub fn has_path(&self) -> bool {
        distance_map(self, self.start)[cell_index(self, self.goal)].is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MazeState {
    pub layout: MazeLayout,
    pub agent: Cell,
    pub violations: Vec<ViolationTag>,
}

impl MazeState {
    pub fn initial(layout: MazeLayout) -> Self {
        let agent = layout.start;
        MazeState { layout, agent, violations: Vec::new() }
    }

    pub fn goal_state(layout: MazeLayout) -> Self {
        let agent = layout.goal;
        MazeState { layout, agent, violations: Vec::new() }
    }
}

/// Neighbor expansion order is fixed (up, down, left, right) so that plans
/// are deterministic for golden files.
pub(crate) const NEIGHBOR_DELTAS: [(i32, i32); 4] = [(-1, 0), (1, 0), (0, -1), (0, 1)];

pub(crate) fn legal_actions(state: &MazeState) -> Vec<ActionRecord> {
    NEIGHBOR_DELTAS
        .iter()
        .map(|d| (state.agent.0 + d.0, state.agent.1 + d.1))
        .filter(|&to| state.layout.is_free(to))
        .map(|to| ActionRecord::maze_move(state.agent, to))
        .collect()
}

pub(crate) fn apply(state: &MazeState, from: Cell, to: Cell, step: usize) -> ApplyOutcome {
    let fault = |kind: ViolationKind, agent: Cell| {
        let mut next = state.clone();
        next.agent = agent;
        next.violations.push(ViolationTag { kind, step_index: step });
        ApplyOutcome::Fault { kind, state: super::EnvState::Maze(next) }
    };
    if !state.layout.in_grid(from) {
        // The transition references a source cell that is not in the scene.
        return fault(ViolationKind::UnknownObject, state.agent);
    }
    if from != state.agent {
        return fault(ViolationKind::PreconditionMismatch, state.agent);
    }
    if !state.layout.in_grid(to) {
        return fault(ViolationKind::OutOfGrid, state.agent);
    }
    if (from.0 - to.0).abs() + (from.1 - to.1).abs() != 1 {
        return fault(ViolationKind::DiagonalMove, state.agent);
    }
    if state.layout.obstacles.contains(&to) {
        // The move is physically possible, so the agent does end up inside
        // the obstacle cell and must back out.
        return fault(ViolationKind::IntoObstacle, to);
    }
    let mut next = state.clone();
    next.agent = to;
    ApplyOutcome::Ok(super::EnvState::Maze(next))
}

fn cell_index(layout: &MazeLayout, c: Cell) -> usize {
    c.0 as usize * layout.cols + c.1 as usize
}

/// Breadth-first distances from `from` to every free cell (and to `from`
/// itself even when it sits on an obstacle, which happens after an
/// `into_obstacle` fault).
pub fn distance_map(layout: &MazeLayout, from: Cell) -> Vec<Option<usize>> {
    let mut dist = vec![None; layout.rows * layout.cols];
    if !layout.in_grid(from) {
        return dist;
    }
    dist[cell_index(layout, from)] = Some(0);
    let mut queue = std::collections::VecDeque::from([from]);
    while let Some(cur) = queue.pop_front() {
        let d = dist[cell_index(layout, cur)].unwrap();
        for delta in NEIGHBOR_DELTAS {
            let next = (cur.0 + delta.0, cur.1 + delta.1);
            if layout.is_free(next) && dist[cell_index(layout, next)].is_none() {
                dist[cell_index(layout, next)] = Some(d + 1);
                queue.push_back(next);
            }
        }
    }
    dist
}

pub(crate) fn distance(layout: &MazeLayout, from: Cell, to: Cell) -> Option<usize> {
    if !layout.in_grid(from) || !layout.in_grid(to) {
        return None;
    }
    distance_map(layout, from)[cell_index(layout, to)]
}

/// Minimum-length plan from `from` to `to`, canonical under the fixed
/// neighbor order.
pub(crate) fn solve(layout: &MazeLayout, from: Cell, to: Cell) -> Result<Vec<ActionRecord>, EnvError> {
    if from == to {
        return Ok(Vec::new());
    }
    if !layout.in_grid(from) || !layout.in_grid(to) {
        return Err(EnvError::Unsolvable);
    }
    let mut parent: Vec<Option<Cell>> = vec![None; layout.rows * layout.cols];
    let mut seen = vec![false; layout.rows * layout.cols];
    seen[cell_index(layout, from)] = true;
    let mut queue = std::collections::VecDeque::from([from]);
    while let Some(cur) = queue.pop_front() {
        for delta in NEIGHBOR_DELTAS {
            let next = (cur.0 + delta.0, cur.1 + delta.1);
            if !layout.is_free(next) || seen[cell_index(layout, next)] {
                continue;
            }
            seen[cell_index(layout, next)] = true;
            parent[cell_index(layout, next)] = Some(cur);
            if next == to {
                let mut cells = vec![next];
                let mut at = next;
                while let Some(p) = parent[cell_index(layout, at)] {
                    cells.push(p);
                    at = p;
                }
                cells.reverse();
                return Ok(cells
                    .windows(2)
                    .map(|w| ActionRecord::maze_move(w[0], w[1]))
                    .collect());
            }
            queue.push_back(next);
        }
    }
    Err(EnvError::Unsolvable)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn layout(rows: usize, cols: usize, obstacles: &[Cell], start: Cell, goal: Cell) -> MazeLayout {
        MazeLayout::new(rows, cols, obstacles.iter().copied().collect(), start, goal).unwrap()
    }

    /// The 6x5 grid from the worked walkthrough: start (5,0), goal (2,4),
    /// obstacles at (3,2) and (2,2).
    pub(crate) fn walkthrough_layout() -> MazeLayout {
        layout(6, 5, &[(3, 2), (2, 2)], (5, 0), (2, 4))
    }

    #[test]
    fn corner_legal_actions() {
        let s = MazeState::initial(layout(3, 3, &[], (0, 0), (2, 2)));
        let actions = legal_actions(&s);
        let texts: Vec<&str> = actions.iter().map(|a| a.text.as_str()).collect();
        assert_eq!(texts, vec!["[0, 0] -> [1, 0]", "[0, 0] -> [0, 1]"]);
    }

    #[test]
    fn walkthrough_plan_length_is_seven() {
        let l = walkthrough_layout();
        let plan = solve(&l, l.start, l.goal).unwrap();
        assert_eq!(plan.len(), 7);
        assert_eq!(plan[0].text, "[5, 0] -> [4, 0]");
    }

    #[test]
    fn layout_rejects_bad_markers() {
        assert!(MazeLayout::new(3, 3, BTreeSet::new(), (0, 0), (0, 0)).is_err());
        assert!(MazeLayout::new(2, 3, BTreeSet::new(), (0, 0), (1, 1)).is_err());
        let obs: BTreeSet<Cell> = [(0, 0)].into_iter().collect();
        assert!(MazeLayout::new(3, 3, obs, (0, 0), (1, 1)).is_err());
    }

    #[test]
    fn fully_enclosed_agent_has_no_legal_actions() {
        // Agent boxed in by obstacles and the grid border.
        let l = layout(4, 4, &[(0, 1), (1, 0), (1, 2), (2, 1)], (1, 1), (3, 3));
        let s = MazeState::initial(l);
        assert!(legal_actions(&s).is_empty());
    }
}
