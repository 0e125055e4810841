use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geom::{GridSize, Vec2, Vec3};

/// A real-valued field over the pixel grid, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarGrid {
    pub size: GridSize,
    pub values: Vec<f64>,
}

impl ScalarGrid {
    pub fn zeros(size: GridSize) -> Self {
        Self::filled(size, 0.0)
    }

    pub fn filled(size: GridSize, value: f64) -> Self {
        Self {
            size,
            values: vec![value; size.len()],
        }
    }

    pub fn from_fn(size: GridSize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut values = Vec::with_capacity(size.len());
        for row in 0..size.height {
            for col in 0..size.width {
                values.push(f(col, row));
            }
        }
        Self { size, values }
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.size.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.size.height
    }

    #[inline]
    pub fn at(&self, col: usize, row: usize) -> f64 {
        self.values[row * self.size.width + col]
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Central-difference gradient at `(col, row)`, one-sided on borders.
    pub fn gradient(&self, col: usize, row: usize) -> Vec2 {
        let w = self.size.width;
        let h = self.size.height;
        let v = |c: usize, r: usize| self.values[r * w + c];
        let gx = if w < 2 {
            0.0
        } else if col == 0 {
            v(1, row) - v(0, row)
        } else if col == w - 1 {
            v(col, row) - v(col - 1, row)
        } else {
            0.5 * (v(col + 1, row) - v(col - 1, row))
        };
        let gy = if h < 2 {
            0.0
        } else if row == 0 {
            v(col, 1) - v(col, 0)
        } else if row == h - 1 {
            v(col, row) - v(col, row - 1)
        } else {
            0.5 * (v(col, row + 1) - v(col, row - 1))
        };
        Vec2::new(gx, gy)
    }
}

pub(crate) fn check_size(left: GridSize, right: GridSize) -> Result<()> {
    if left == right {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            left_width: left.width,
            left_height: left.height,
            right_width: right.width,
            right_height: right.height,
        })
    }
}

/// Where a structural normal came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Provenance {
    #[default]
    Empty,
    LowFreq,
    /// High-frequency normal owned by the line with this id.
    HighFreq(u32),
}

/// A field of unit normals with z > 0.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalGrid {
    pub size: GridSize,
    pub normals: Vec<Vec3>,
    pub provenance: Vec<Provenance>,
}

impl NormalGrid {
    pub fn flat(size: GridSize, provenance: Provenance) -> Self {
        Self {
            size,
            normals: vec![Vec3::UP; size.len()],
            provenance: vec![provenance; size.len()],
        }
    }

    #[inline]
    pub fn at(&self, col: usize, row: usize) -> Vec3 {
        self.normals[row * self.size.width + col]
    }
}

/// Normal of the height field with gradient `g`, z-term scaled by `1/eta`.
#[inline]
pub(crate) fn gradient_normal(g: Vec2, eta: f64) -> Vec3 {
    let inv_eta = 1.0 / eta;
    Vec3::new(-g.x, -g.y, inv_eta)
        .normalized()
        .unwrap_or(Vec3::UP)
}
