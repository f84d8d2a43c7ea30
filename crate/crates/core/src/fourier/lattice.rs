//! Truncated frequency lattices.
//!
//! A field stores its coefficients on a cube `{ j in Z^d : |j|_inf <= E }`
//! where the extent `E` starts at the base cutoff `K` and grows under exact
//! products. Storage is row-major with the last axis fastest.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Base lattice of a computation: dimension, per-axis cutoff, padding budget.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub dim: usize,
    pub k_max: usize,
    pub pad_factor: usize,
}

impl LatticeSpec {
    pub fn new(dim: usize, k_max: usize, pad_factor: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidSpec("dimension must be at least 1".into()));
        }
        if k_max == 0 {
            return Err(Error::InvalidSpec("cutoff K must be at least 1".into()));
        }
        if pad_factor < 2 {
            return Err(Error::InvalidSpec("pad_factor must be at least 2".into()));
        }
        Ok(Self {
            dim,
            k_max,
            pad_factor,
        })
    }

    /// Largest extent an exact product chain may reach: `pad_factor * K`.
    pub fn budget(&self) -> usize {
        self.pad_factor * self.k_max
    }

    /// Per-axis size of the dense synthesis grid, the smallest odd integer
    /// `>= pad_factor * (2K + 1)`.
    pub fn synthesis_grid(&self) -> usize {
        let n = self.pad_factor * (2 * self.k_max + 1);
        n | 1
    }

    pub fn base_shape(&self) -> BoxShape {
        BoxShape::new(self.dim, self.k_max)
    }
}

impl std::fmt::Display for LatticeSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(d={}, K={}, pad={})", self.dim, self.k_max, self.pad_factor)
    }
}

/// Cube of frequencies `|j|_inf <= extent` in `dim` dimensions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BoxShape {
    pub dim: usize,
    pub extent: usize,
}

impl BoxShape {
    pub fn new(dim: usize, extent: usize) -> Self {
        Self { dim, extent }
    }

    pub fn side(&self) -> usize {
        2 * self.extent + 1
    }

    pub fn len(&self) -> usize {
        self.side().pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, j: &[i64]) -> bool {
        let e = self.extent as i64;
        j.len() == self.dim && j.iter().all(|&c| -e <= c && c <= e)
    }

    /// Flat index of `j`, or `None` when `j` is outside the cube.
    pub fn index_of(&self, j: &[i64]) -> Option<usize> {
        if !self.contains(j) {
            return None;
        }
        let e = self.extent as i64;
        let side = self.side();
        Some(
            j.iter()
                .fold(0usize, |acc, &c| acc * side + (c + e) as usize),
        )
    }

    /// Writes the frequency of flat index `idx` into `out`.
    pub fn point_into(&self, mut idx: usize, out: &mut [i64]) {
        let side = self.side();
        let e = self.extent as i64;
        for c in out.iter_mut().rev() {
            *c = (idx % side) as i64 - e;
            idx /= side;
        }
    }

    pub fn point(&self, idx: usize) -> Vec<i64> {
        let mut p = vec![0; self.dim];
        self.point_into(idx, &mut p);
        p
    }

    /// All frequencies, flattened `len * dim`.
    pub fn points(&self) -> Vec<i64> {
        let mut out = vec![0; self.len() * self.dim];
        for (idx, chunk) in out.chunks_mut(self.dim).enumerate() {
            self.point_into(idx, chunk);
        }
        out
    }

    /// `|j|^2` for every lattice point, in storage order.
    pub fn norms_sq(&self) -> Vec<i64> {
        self.points()
            .chunks(self.dim)
            .map(|p| p.iter().map(|c| c * c).sum())
            .collect()
    }

    /// Flat index of `-j` for every `j`.
    pub fn negation_map(&self) -> Vec<usize> {
        let n = self.len();
        (0..n).map(|i| n - 1 - i).collect()
    }
}
