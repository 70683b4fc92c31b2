//! Uniform sampling grids shared by every representation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform 1-D grid including both endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniformGrid {
    pub min: f64,
    pub max: f64,
    pub n_points: usize,
}

impl UniformGrid {
    pub fn new(min: f64, max: f64, n_points: usize) -> Result<Self> {
        let grid = Self { min, max, n_points };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.min.is_finite() && self.max.is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "bounds must be finite, got [{}, {}]",
                self.min, self.max
            )));
        }
        if self.n_points < 2 {
            return Err(Error::InvalidGrid(format!(
                "need at least 2 points, got {}",
                self.n_points
            )));
        }
        if self.max <= self.min {
            return Err(Error::InvalidGrid(format!(
                "max ({}) must exceed min ({})",
                self.max, self.min
            )));
        }
        Ok(())
    }

    pub fn step(&self) -> f64 {
        (self.max - self.min) / (self.n_points - 1) as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        // Pin the last node to `max` exactly.
        if i + 1 == self.n_points {
            self.max
        } else {
            self.min + i as f64 * self.step()
        }
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.point(i)).collect()
    }

    /// Largest distance of the grid from the origin.
    pub fn half_width(&self) -> f64 {
        self.min.abs().max(self.max.abs())
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.min && x <= self.max
    }
}

/// Uniform 2-D (q, p) grid, stored row-major over q then p.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlaneGrid {
    pub q: UniformGrid,
    pub p: UniformGrid,
}

impl PlaneGrid {
    pub fn new(q: UniformGrid, p: UniformGrid) -> Result<Self> {
        q.validate()?;
        p.validate()?;
        Ok(Self { q, p })
    }

    pub fn square(half_width: f64, n: usize) -> Result<Self> {
        let axis = UniformGrid::new(-half_width, half_width, n)?;
        Ok(Self { q: axis, p: axis })
    }

    pub fn len(&self) -> usize {
        self.q.n_points * self.p.n_points
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, iq: usize, ip: usize) -> usize {
        iq * self.p.n_points + ip
    }

    /// All nodes in storage order.
    pub fn nodes(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        (0..self.q.n_points)
            .flat_map(move |iq| (0..self.p.n_points).map(move |ip| (self.q.point(iq), self.p.point(ip))))
    }
}

impl Default for PlaneGrid {
    /// [−8, 8]² with 256 × 256 nodes.
    fn default() -> Self {
        let axis = UniformGrid {
            min: -8.0,
            max: 8.0,
            n_points: 256,
        };
        Self { q: axis, p: axis }
    }
}
