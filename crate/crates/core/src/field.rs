//! The simulation state: one Hermitian 2×2 matrix per grid node.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::lattice::BrillouinGrid;
use crate::spin2::HermitianMatrix2;

/// Tolerance of the Fermi-property check on an accepted state.
pub const FERMI_TOLERANCE: f64 = 1e-9;

/// The Wigner function `k_j ↦ W(k_j)` at kinetic time `time`.
#[derive(Clone, Debug, PartialEq)]
pub struct WignerField {
    grid: BrillouinGrid,
    values: Vec<HermitianMatrix2>,
    pub time: f64,
}

impl WignerField {
    pub fn new(grid: BrillouinGrid, values: Vec<HermitianMatrix2>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                found: values.len(),
            });
        }
        Ok(WignerField {
            grid,
            values,
            time: 0.0,
        })
    }

    /// Evaluates `f(k_j)` at every node.
    pub fn from_fn<F: FnMut(f64) -> HermitianMatrix2>(grid: BrillouinGrid, mut f: F) -> Self {
        let values = grid.momenta().map(&mut f).collect();
        WignerField {
            grid,
            values,
            time: 0.0,
        }
    }

    pub fn uniform(grid: BrillouinGrid, value: HermitianMatrix2) -> Self {
        WignerField {
            grid,
            values: alloc::vec![value; grid.len()],
            time: 0.0,
        }
    }

    #[inline]
    pub fn grid(&self) -> &BrillouinGrid {
        &self.grid
    }

    #[inline]
    pub fn values(&self) -> &[HermitianMatrix2] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [HermitianMatrix2] {
        &mut self.values
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.values.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    #[inline]
    pub fn at(&self, j: usize) -> &HermitianMatrix2 {
        &self.values[j]
    }

    pub fn with_time(mut self, time: f64) -> Self {
        self.time = time;
        self
    }

    pub fn ensure_same_grid(&self, other: &BrillouinGrid) -> Result<()> {
        if self.grid != *other {
            return Err(Error::GridMismatch {
                expected: other.len(),
                found: self.grid.len(),
            });
        }
        Ok(())
    }

    /// `self + scale · increment`, keeping the time stamp.
    pub fn add_scaled(&self, scale: f64, increment: &[HermitianMatrix2]) -> Result<Self> {
        if increment.len() != self.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                found: increment.len(),
            });
        }
        let values = self
            .values
            .iter()
            .zip(increment)
            .map(|(w, d)| w.add_scaled(scale, d))
            .collect();
        Ok(WignerField {
            grid: self.grid,
            values,
            time: self.time,
        })
    }

    /// Applies `f` to every node value.
    pub fn map<F: FnMut(usize, &HermitianMatrix2) -> HermitianMatrix2>(&self, mut f: F) -> Self {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(j, w)| f(j, w))
            .collect();
        WignerField {
            grid: self.grid,
            values,
            time: self.time,
        }
    }

    /// Largest entry modulus of `self − other` over all nodes.
    pub fn max_abs_diff(&self, other: &WignerField) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (*a - *b).max_abs())
            .fold(0.0, f64::max)
    }

    /// Smallest and largest eigenvalue over the grid, with their nodes.
    pub fn spectral_range(&self) -> ((usize, f64), (usize, f64)) {
        let mut lo = (0, f64::INFINITY);
        let mut hi = (0, f64::NEG_INFINITY);
        for (j, w) in self.values.iter().enumerate() {
            let (up, down) = w.eigenvalues();
            if down < lo.1 {
                lo = (j, down);
            }
            if up > hi.1 {
                hi = (j, up);
            }
        }
        (lo, hi)
    }

    /// Checks `−tol ≤ W(k) ≤ 1 + tol` at every node.
    pub fn check_fermi(&self, tol: f64) -> Result<()> {
        for (node, w) in self.values.iter().enumerate() {
            let (up, down) = w.eigenvalues();
            // Written so that NaN fails as well.
            if !(down >= -tol) {
                return Err(Error::FermiViolation {
                    node,
                    eigenvalue: down,
                    time: self.time,
                });
            }
            if !(up <= 1.0 + tol) {
                return Err(Error::FermiViolation {
                    node,
                    eigenvalue: up,
                    time: self.time,
                });
            }
        }
        Ok(())
    }

    /// Grid average `(1/n) Σ_j W(k_j)`.
    pub fn mean(&self) -> HermitianMatrix2 {
        let sum = self
            .values
            .iter()
            .fold(HermitianMatrix2::ZERO, |acc, w| acc + *w);
        sum.scale(self.grid.weight())
    }
}

/// Largest entry modulus over a per-node increment.
pub fn max_entry_norm(values: &[HermitianMatrix2]) -> f64 {
    values.iter().map(|v| v.max_abs()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_wrong_length() {
        let grid = BrillouinGrid::new(8).unwrap();
        let err = WignerField::new(grid, alloc::vec![HermitianMatrix2::ZERO; 7]).unwrap_err();
        assert_eq!(
            err,
            Error::LengthMismatch {
                expected: 8,
                found: 7
            }
        );
    }

    #[test]
    fn fermi_check_flags_out_of_range_eigenvalues() {
        let grid = BrillouinGrid::new(4).unwrap();
        let mut f = WignerField::uniform(grid, HermitianMatrix2::scalar(0.5));
        assert!(f.check_fermi(FERMI_TOLERANCE).is_ok());
        f.values_mut()[2] = HermitianMatrix2::diagonal(1.1, 0.2);
        match f.check_fermi(FERMI_TOLERANCE) {
            Err(Error::FermiViolation {
                node, eigenvalue, ..
            }) => {
                assert_eq!(node, 2);
                assert!((eigenvalue - 1.1).abs() < 1e-15);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn mean_of_uniform_field() {
        let grid = BrillouinGrid::new(16).unwrap();
        let w = HermitianMatrix2::diagonal(0.3, 0.6);
        let m = WignerField::uniform(grid, w).mean();
        assert!((m - w).max_abs() < 1e-15);
    }
}
