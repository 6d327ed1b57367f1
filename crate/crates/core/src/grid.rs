//! Inclusive, evenly spaced 1-D grids.

use crate::error::{Error, Result};

/// `start, start + step, …` up to `stop` inclusive.
///
/// Values are computed as `start + i * step`, never by accumulation, so a
/// grid point does not depend on how many points precede it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    start: f64,
    stop: f64,
    step: f64,
    len: usize,
}

/// Slack, in steps, allowed when deciding whether `stop` is on the grid.
const ENDPOINT_SLACK: f64 = 1e-9;

impl Grid {
    pub fn new(start: f64, stop: f64, step: f64) -> Result<Self> {
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::InvalidStep { step });
        }
        if !(start.is_finite() && stop.is_finite() && start <= stop) {
            return Err(Error::InvalidRange { start, stop });
        }
        let len = libm::floor((stop - start) / step + ENDPOINT_SLACK) as usize + 1;
        Ok(Grid {
            start,
            stop,
            step,
            len,
        })
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn stop(&self) -> f64 {
        self.stop
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn value(&self, i: usize) -> f64 {
        self.start + i as f64 * self.step
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.len).map(|i| self.value(i))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transistor_grid_has_981_points() {
        let g = Grid::new(0.2, 10.0, 0.01).unwrap();
        assert_eq!(g.len(), 981);
        assert_eq!(g.value(0), 0.2);
        assert!((g.value(980) - 10.0).abs() < 1e-12);
    }

    #[test]
    fn detuning_grid() {
        assert_eq!(Grid::new(1.0, 10.0, 0.025).unwrap().len(), 361);
    }

    #[test]
    fn single_point_and_errors() {
        assert_eq!(Grid::new(3.0, 3.0, 1.0).unwrap().len(), 1);
        assert!(Grid::new(0.0, 1.0, 0.0).is_err());
        assert!(Grid::new(0.0, 1.0, -0.1).is_err());
        assert!(Grid::new(2.0, 1.0, 0.1).is_err());
    }

    #[test]
    fn stop_not_on_grid_is_excluded() {
        let g = Grid::new(0.0, 1.05, 0.1).unwrap();
        assert_eq!(g.len(), 11);
    }
}
