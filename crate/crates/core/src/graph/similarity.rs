//! Oracle similarity between a scene graph and the goal graph.
//!
//! The score is `clamp(100·goal_match − 30·violations − 30·regressed, 0, 100)`.
//! `goal_match` starts from the fraction of goal objects whose position
//! matches (order-insensitive, by name). A caller-supplied distance hint
//! upgrades a not-yet-matching graph to full goal match when the remaining
//! solve distance strictly decreased — a clean optimal step therefore scores
//! 100 while illegal or non-progressing steps score at most 70, the
//! separation the error-detection threshold of 0.75 relies on.

use super::{sniff_domain, GraphError, SceneGraph};
use serde::{Deserialize, Serialize};

/// Remaining solve distances before and after the step (or option) under
/// evaluation, supplied by callers that can see the environment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistanceHint {
    pub remaining_before: usize,
    pub remaining_after: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityBreakdown {
    pub goal_match_percent: f64,
    pub violation_count: usize,
    pub distance_regressed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityScore {
    /// Final score in `[0, 100]`.
    pub value: f64,
    pub breakdown: SimilarityBreakdown,
}

pub const VIOLATION_PENALTY: f64 = 30.0;
pub const REGRESSION_PENALTY: f64 = 30.0;

pub fn similarity(
    sg: &SceneGraph,
    goal: &SceneGraph,
    hint: Option<DistanceHint>,
) -> Result<SimilarityScore, GraphError> {
    if let (Some(a), Some(b)) = (sniff_domain(sg), sniff_domain(goal)) {
        if a != b {
            return Err(GraphError::CrossDomain(a, b));
        }
    }
    let total = goal.objects.len().max(1);
    let matched = goal
        .objects
        .iter()
        .filter(|g| {
            sg.objects.iter().any(|o| o.name == g.name && o.position == g.position)
        })
        .count();
    let raw = matched as f64 / total as f64;
    let violations = sg.action_history.iter().filter(|e| !e.validity).count();
    let progressed = hint.map(|h| h.remaining_after < h.remaining_before);
    let goal_match = if raw >= 1.0 {
        1.0
    } else if progressed == Some(true) {
        1.0
    } else {
        raw
    };
    let regressed = raw < 1.0 && progressed == Some(false);
    let value = (100.0 * goal_match
        - VIOLATION_PENALTY * violations as f64
        - REGRESSION_PENALTY * if regressed { 1.0 } else { 0.0 })
    .clamp(0.0, 100.0);
    Ok(SimilarityScore {
        value,
        breakdown: SimilarityBreakdown {
            goal_match_percent: 100.0 * goal_match,
            violation_count: violations,
            distance_regressed: regressed,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{BlocksLayout, BlocksState, EnvState, MazeLayout, MazeState, ShuffleState};
    use crate::graph::{from_state, update, SgHistoryEntry};

    fn maze() -> EnvState {
        let layout = MazeLayout::new(6, 5, [(3, 2), (2, 2)].into_iter().collect(), (5, 0), (2, 4))
            .unwrap();
        EnvState::Maze(MazeState::initial(layout))
    }

    #[test]
    fn identity_with_clean_history_scores_100() {
        let sg = from_state(&maze()).unwrap();
        let score = similarity(&sg, &sg, None).unwrap();
        assert_eq!(score.value, 100.0);
        assert!(!score.breakdown.distance_regressed);
    }

    #[test]
    fn one_violation_with_full_goal_match_scores_70() {
        let mut sg = from_state(&maze()).unwrap();
        sg.action_history.push(SgHistoryEntry {
            step: 0,
            action: "[5, 0] -> [3, 0]".into(),
            affected_entities: vec![],
            state_changes: vec![],
            validity: false,
        });
        let score = similarity(&sg, &sg.without_history(), None).unwrap();
        assert_eq!(score.value, 70.0);
        assert_eq!(score.breakdown.violation_count, 1);
    }

    #[test]
    fn progress_hint_upgrades_goal_match() {
        let initial = maze();
        let goal = EnvState::Maze(match &initial {
            EnvState::Maze(s) => MazeState::goal_state(s.layout.clone()),
            _ => unreachable!(),
        });
        let sg = update(
            &from_state(&initial).unwrap(),
            &crate::env::ActionRecord::maze_move((5, 0), (4, 0)),
        )
        .unwrap();
        let goal_sg = from_state(&goal).unwrap();
        let on_track = DistanceHint { remaining_before: 7, remaining_after: 6 };
        assert_eq!(similarity(&sg, &goal_sg, Some(on_track)).unwrap().value, 100.0);
        let stalled = DistanceHint { remaining_before: 7, remaining_after: 7 };
        let score = similarity(&sg, &goal_sg, Some(stalled)).unwrap();
        // 3 of 4 objects match, minus the regression penalty.
        assert_eq!(score.value, 75.0 - 30.0);
        assert!(score.breakdown.distance_regressed);
    }

    #[test]
    fn goal_match_is_order_insensitive() {
        let sg = from_state(&maze()).unwrap();
        let mut shuffled = sg.clone();
        shuffled.objects.reverse();
        assert_eq!(similarity(&shuffled, &sg, None).unwrap().value, 100.0);
    }

    #[test]
    fn cross_domain_comparison_errors() {
        let m = from_state(&maze()).unwrap();
        let b = from_state(&EnvState::Blocks(BlocksState::new(
            BlocksLayout::new(3).unwrap(),
            vec![vec![0, 1, 2], vec![], vec![], vec![], vec![]],
        )))
        .unwrap();
        assert!(similarity(&m, &b, None).is_err());
        let s = from_state(&EnvState::Shuffle(ShuffleState::identity(2, 2))).unwrap();
        assert!(similarity(&b, &s, None).is_err());
    }

    #[test]
    fn score_respects_formula_invariant() {
        let sg = from_state(&maze()).unwrap();
        let goal = sg.clone();
        for hint in [None, Some(DistanceHint { remaining_before: 3, remaining_after: 2 })] {
            let s = similarity(&sg, &goal, hint).unwrap();
            let expected = (s.breakdown.goal_match_percent
                - 30.0 * s.breakdown.violation_count as f64
                - 30.0 * if s.breakdown.distance_regressed { 1.0 } else { 0.0 })
            .clamp(0.0, 100.0);
            assert_eq!(s.value, expected);
        }
    }
}
