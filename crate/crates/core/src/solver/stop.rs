use serde::{Deserialize, Serialize};

use super::{IterationRecord, SolverConfig};

/// Number of iterations over which objective stagnation is measured.
pub const STAGNATION_WINDOW: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StopDecision {
    Continue,
    Converged,
    Exhausted,
}

/// Converged when the constraint holds within the feasibility slack and the
/// objective moved by at most `objective_rel_tol` (relative) over the last
/// [`STAGNATION_WINDOW`] iterations; exhausted at `max_iterations`.
pub fn check_stop(history: &[IterationRecord], config: &SolverConfig) -> StopDecision {
    let Some(last) = history.last() else {
        return StopDecision::Continue;
    };
    let feasible = last.constraint_norm <= (1.0 + config.feasibility_slack) * config.epsilon;
    if feasible && history.len() >= 2 {
        let lag = STAGNATION_WINDOW.min(history.len() - 1);
        let before = history[history.len() - 1 - lag].objective;
        let now = last.objective;
        if (now - before).abs() <= config.objective_rel_tol * now.abs().max(before.abs()) {
            return StopDecision::Converged;
        }
    }
    if last.k >= config.max_iterations {
        StopDecision::Exhausted
    } else {
        StopDecision::Continue
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(k: usize, objective: f64, constraint_norm: f64) -> IterationRecord {
        IterationRecord {
            k,
            objective,
            constraint_norm,
            primal_residual: 0.0,
            wall_time: 0.0,
            mse: None,
        }
    }

    fn config() -> SolverConfig {
        SolverConfig {
            epsilon: 1.0,
            max_iterations: 50,
            ..SolverConfig::default()
        }
    }

    #[test]
    fn feasible_and_flat_is_converged() {
        let h: Vec<_> = (1..=6).map(|k| record(k, 3.0, 0.5)).collect();
        assert_eq!(check_stop(&h, &config()), StopDecision::Converged);
    }

    #[test]
    fn budget_exhausted_while_infeasible() {
        let h: Vec<_> = (45..=50).map(|k| record(k, 3.0, 2.0)).collect();
        assert_eq!(check_stop(&h, &config()), StopDecision::Exhausted);
    }

    #[test]
    fn decreasing_objective_continues() {
        let h: Vec<_> = (1..=6).map(|k| record(k, 100.0 * 0.9f64.powi(k as i32), 0.5)).collect();
        assert_eq!(check_stop(&h, &config()), StopDecision::Continue);
    }

    #[test]
    fn slack_allows_slightly_infeasible() {
        let h: Vec<_> = (1..=6).map(|k| record(k, 3.0, 1.005)).collect();
        assert_eq!(check_stop(&h, &config()), StopDecision::Converged);
        let h: Vec<_> = (1..=6).map(|k| record(k, 3.0, 1.02)).collect();
        assert_eq!(check_stop(&h, &config()), StopDecision::Continue);
    }

    #[test]
    fn single_record_cannot_show_stagnation() {
        assert_eq!(check_stop(&[record(1, 0.0, 0.0)], &config()), StopDecision::Continue);
        assert_eq!(check_stop(&[], &config()), StopDecision::Continue);
    }
}
