use ndarray::{Array1, ArrayView1, Zip};

use super::{ProximalFunction, Role};
use crate::error::{Error, Result};
use crate::vector::distance;

/// Relative slack under which a point already counts as inside the ball.
/// Keeps projection exactly idempotent under rounding.
const INSIDE_SLACK: f64 = 1e-12;

/// The closed ball {s : ‖s − y‖₂ ≤ ε}.
#[derive(Debug, Clone, PartialEq)]
pub struct BallConstraint {
    center: Array1<f64>,
    radius: f64,
}

impl BallConstraint {
    pub fn new(center: Array1<f64>, radius: f64) -> Result<Self> {
        if !(radius >= 0.0) || !radius.is_finite() {
            return Err(Error::domain(format!("ball radius must be non-negative, got {radius}")));
        }
        Ok(BallConstraint { center, radius })
    }

    pub fn center(&self) -> &Array1<f64> {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Orthogonal projection onto the ball; independent of any penalty
    /// parameter.
    pub fn project(&self, s: ArrayView1<f64>) -> Result<Array1<f64>> {
        if s.len() != self.center.len() {
            return Err(Error::shape("ball projection input", self.center.len(), s.len()));
        }
        let dist = distance(s, self.center.view());
        if dist <= self.radius * (1.0 + INSIDE_SLACK) {
            return Ok(s.to_owned());
        }
        let scale = self.radius / dist;
        let mut out = Array1::zeros(s.len());
        Zip::from(&mut out)
            .and(&s)
            .and(&self.center)
            .for_each(|o, &s, &y| *o = y + scale * (s - y));
        Ok(out)
    }
}

impl ProximalFunction for BallConstraint {
    fn prox(&mut self, s: ArrayView1<f64>, _mu: f64) -> Result<Array1<f64>> {
        self.project(s)
    }
    fn role(&self) -> Role {
        Role::Constraint
    }
    fn measure(&self, v: ArrayView1<f64>) -> f64 {
        distance(v, self.center.view())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn interior_point_is_unchanged() {
        let b = BallConstraint::new(array![0.0, 0.0], 1.0).unwrap();
        let s = array![0.3, -0.4];
        assert_eq!(b.project(s.view()).unwrap(), s);
    }

    #[test]
    fn radial_scaling() {
        let b = BallConstraint::new(array![0.0, 0.0], 1.0).unwrap();
        let p = b.project(array![3.0, 4.0].view()).unwrap();
        assert!((p[0] - 0.6).abs() < 1e-15 && (p[1] - 0.8).abs() < 1e-15);
    }

    #[test]
    fn zero_radius_collapses_to_center() {
        let b = BallConstraint::new(array![1.0, 2.0], 0.0).unwrap();
        assert_eq!(b.project(array![5.0, -3.0].view()).unwrap(), array![1.0, 2.0]);
    }

    #[test]
    fn negative_radius_is_rejected() {
        assert!(BallConstraint::new(array![0.0], -1.0).is_err());
    }

    #[test]
    fn matches_grid_search() {
        let b = BallConstraint::new(array![1.0, 1.0], 0.5).unwrap();
        let s = array![2.0, 1.0];
        let mut best = (f64::INFINITY, 0.0, 0.0);
        let steps = 1000;
        for i in 0..=steps {
            for j in 0..=steps {
                let x = 0.5 + i as f64 * 1e-3;
                let y = 0.5 + j as f64 * 1e-3;
                if (x - 1.0).powi(2) + (y - 1.0).powi(2) > 0.25 {
                    continue;
                }
                let f = 0.5 * ((x - 2.0).powi(2) + (y - 1.0).powi(2));
                if f < best.0 {
                    best = (f, x, y);
                }
            }
        }
        let p = b.project(s.view()).unwrap();
        assert!((best.1 - 1.5).abs() < 2e-3 && (best.2 - 1.0).abs() < 2e-3);
        assert!((p[0] - best.1).abs() < 2e-3 && (p[1] - best.2).abs() < 2e-3);
    }
}
