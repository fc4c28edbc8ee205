//! Brillouin-zone grid, dispersion relations and collision-manifold kinematics.
//!
//! Momenta live on the unit circle `[0, 1)`. Hot loops address them by
//! integer grid index so that sums such as `k₃ + k₄ − k₁` wrap exactly.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};

/// Mollifier width used by default for both collision operators.
pub const DEFAULT_EPSILON: f64 = 0.5;

/// Uniform grid `k_j = j/n` with trapezoid weight `1/n`.
///
/// `n` is a positive multiple of 4, so `¼`, `½`, `¾` are nodes and the
/// reflection `k ↦ ½ − k` permutes the nodes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BrillouinGrid {
    n: usize,
}

impl BrillouinGrid {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || n % 4 != 0 {
            return Err(Error::InvalidGrid { n });
        }
        Ok(BrillouinGrid { n })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn weight(&self) -> f64 {
        1.0 / self.n as f64
    }

    #[inline]
    pub fn momentum(&self, j: usize) -> f64 {
        j as f64 / self.n as f64
    }

    /// `j mod n` for any signed index.
    #[inline]
    pub fn wrap(&self, j: isize) -> usize {
        j.rem_euclid(self.n as isize) as usize
    }

    /// Index of `½ − k_j`.
    #[inline]
    pub fn reflect(&self, j: usize) -> usize {
        (self.n / 2 + self.n - j % self.n) % self.n
    }

    /// Index of `k₂ = k₃ + k₄ − k₁ mod 1`.
    #[inline]
    pub fn partner(&self, k1: usize, k3: usize, k4: usize) -> usize {
        (k3 + k4 + self.n - k1) % self.n
    }

    /// Nodes with `|k| < ¼`, in increasing order of `k ∈ (−¼, ¼)`.
    ///
    /// Together with their reflections and the two fixed points `¼`, `¾`
    /// they cover the grid exactly once.
    pub fn inner_half(&self) -> Vec<usize> {
        let q = (self.n / 4) as isize;
        (-q + 1..q).map(|j| self.wrap(j)).collect()
    }

    /// The two nodes fixed by the reflection, `k = ¼` and `k = ¾`.
    pub fn reflection_fixed_points(&self) -> [usize; 2] {
        [self.n / 4, 3 * self.n / 4]
    }

    pub fn momenta(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |j| self.momentum(j))
    }
}

/// Band structure of the chain.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Dispersion {
    #[default]
    NearestNeighbor,
    NextNearestNeighbor,
}

impl Dispersion {
    pub fn eval(&self, k: f64) -> f64 {
        match self {
            Dispersion::NearestNeighbor => omega(k),
            Dispersion::NextNearestNeighbor => omega_nnn(k),
        }
    }

    /// `ω(k₁) + ω(k₂) − ω(k₃) − ω(k₄)` with `k₂ = k₃ + k₄ − k₁`.
    pub fn energy_balance(&self, k1: f64, k3: f64, k4: f64) -> f64 {
        let k2 = k3 + k4 - k1;
        self.eval(k1) + self.eval(k2) - self.eval(k3) - self.eval(k4)
    }
}

/// Nearest-neighbor band `1 − cos 2πk`.
pub fn omega(k: f64) -> f64 {
    1.0 - libm::cos(2.0 * PI * k)
}

/// Band with an added next-nearest-neighbor hopping term.
pub fn omega_nnn(k: f64) -> f64 {
    1.0 - libm::cos(2.0 * PI * k) - 0.5 * libm::cos(4.0 * PI * k)
}

/// Factorized energy balance of the nearest-neighbor band after momentum
/// conservation has eliminated `k₂`.
pub fn omega_bar(k1: f64, k3: f64, k4: f64) -> f64 {
    4.0 * libm::sin(PI * (k1 - k3)) * libm::sin(PI * (k1 - k4)) * libm::cos(PI * (k3 + k4))
}

/// Mollified inverse Jacobian of the energy delta along `γ₂` and `γ_diag`:
/// `(4π²(sin 2πk₃ − sin 2πk₁)² + ε²)^(−1/2)`.
pub fn jacobian_weight(k1: f64, k3: f64, eps: f64) -> f64 {
    let d = libm::sin(2.0 * PI * k3) - libm::sin(2.0 * PI * k1);
    1.0 / libm::sqrt(4.0 * PI * PI * d * d + eps * eps)
}

/// Mollified principal value `ω̄/(ω̄² + ε²)`.
#[inline]
pub fn mollified_inverse(omega_bar: f64, eps: f64) -> f64 {
    omega_bar / (omega_bar * omega_bar + eps * eps)
}

/// Which branch of the nearest-neighbor collision manifold a node lies on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Contour {
    /// `k₃ = k₁`
    Gamma1,
    /// `k₄ = k₁`
    Gamma2,
    /// `k₃ + k₄ = ½`
    Diagonal,
}

impl Contour {
    pub fn label(&self) -> &'static str {
        match self {
            Contour::Gamma1 => "gamma1",
            Contour::Gamma2 => "gamma2",
            Contour::Diagonal => "gamma_diag",
        }
    }
}

/// On-grid `(k₃, k₄)` index pairs of the three contours for a fixed `k₁`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ManifoldContours {
    pub k1: usize,
    pub gamma1: Vec<(usize, usize)>,
    pub gamma2: Vec<(usize, usize)>,
    pub diagonal: Vec<(usize, usize)>,
}

impl ManifoldContours {
    pub fn get(&self, c: Contour) -> &[(usize, usize)] {
        match c {
            Contour::Gamma1 => &self.gamma1,
            Contour::Gamma2 => &self.gamma2,
            Contour::Diagonal => &self.diagonal,
        }
    }
}

pub fn manifold_contours(k1: usize, grid: &BrillouinGrid) -> ManifoldContours {
    let n = grid.len();
    let k1 = k1 % n;
    ManifoldContours {
        k1,
        gamma1: (0..n).map(|m| (k1, m)).collect(),
        gamma2: (0..n).map(|m| (m, k1)).collect(),
        diagonal: (0..n).map(|m| (m, grid.reflect(m))).collect(),
    }
}

/// Samples `ω̄(k₁; k₃, k₄)` on a `resolution × resolution` lattice of `[0,1)²`
/// for contour plots. Rows are `(k₃, k₄, ω̄)`.
pub fn energy_balance_samples(dispersion: Dispersion, k1: f64, resolution: usize) -> Vec<[f64; 3]> {
    let step = 1.0 / resolution as f64;
    let mut out = Vec::with_capacity(resolution * resolution);
    for a in 0..resolution {
        for b in 0..resolution {
            let (k3, k4) = (a as f64 * step, b as f64 * step);
            out.push([k3, k4, dispersion.energy_balance(k1, k3, k4)]);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn rejects_grids_not_divisible_by_four() {
        for n in [0, 2, 6, 10, 66] {
            assert_eq!(BrillouinGrid::new(n), Err(Error::InvalidGrid { n }));
        }
        assert!(BrillouinGrid::new(64).is_ok());
    }

    #[test]
    fn omega_examples() {
        assert_abs_diff_eq!(omega(0.0), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(omega(0.5), 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(omega(0.25), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(omega_nnn(0.0), -0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(omega_nnn(0.5), 1.5, epsilon = 1e-15);
        assert_abs_diff_eq!(omega_nnn(0.25), 1.5, epsilon = 1e-15);
    }

    #[test]
    fn omega_bar_examples() {
        assert_eq!(omega_bar(0.3, 0.3, 0.9), 0.0);
        assert_abs_diff_eq!(omega_bar(0.1, 0.2, 0.3), 0.0, epsilon = 1e-15);
        // k1 = 0, k3 = k4 = 1/8: both routes give √2 − 1.
        let want = core::f64::consts::SQRT_2 - 1.0;
        assert_abs_diff_eq!(omega_bar(0.0, 0.125, 0.125), want, epsilon = 1e-12);
        let direct = omega(0.0) + omega(0.25) - 2.0 * omega(0.125);
        assert_abs_diff_eq!(direct, want, epsilon = 1e-12);
    }

    #[test]
    fn jacobian_examples() {
        assert_abs_diff_eq!(jacobian_weight(0.3, 0.3, 0.5), 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(jacobian_weight(0.1, 0.4, 0.5), 2.0, epsilon = 1e-12);
        let want = 1.0 / libm::sqrt(4.0 * PI * PI + 0.25);
        assert_abs_diff_eq!(jacobian_weight(0.0, 0.25, 0.5), want, epsilon = 1e-15);
        assert_abs_diff_eq!(want, 0.1586534, epsilon = 1e-7);
    }

    #[test]
    fn contours_at_k1_23_over_64() {
        let grid = BrillouinGrid::new(64).unwrap();
        let c = manifold_contours(23, &grid);
        assert_eq!(c.diagonal.len(), 64);
        assert_eq!(c.diagonal[0], (0, 32));
        assert_eq!(c.diagonal[1], (1, 31));
        // γ₁ ∩ γ_diag is the single point p₁ = (k₁, ½ − k₁).
        let p1: Vec<_> = c.gamma1.iter().filter(|p| c.diagonal.contains(p)).collect();
        assert_eq!(p1, [&(23, 9)]);
        for contour in [Contour::Gamma1, Contour::Gamma2, Contour::Diagonal] {
            for &(a, b) in c.get(contour) {
                let w = omega_bar(grid.momentum(23), grid.momentum(a), grid.momentum(b));
                assert!(w.abs() < 1e-12, "{contour:?} node ({a},{b}) has ω̄ = {w}");
            }
        }
    }

    #[test]
    fn reflection_is_an_involution_on_the_grid() {
        for n in [4, 16, 64, 128] {
            let grid = BrillouinGrid::new(n).unwrap();
            for j in 0..n {
                let r = grid.reflect(j);
                assert_eq!(grid.reflect(r), j);
                let k = 0.5 - grid.momentum(j);
                assert_abs_diff_eq!(grid.momentum(r), k.rem_euclid(1.0), epsilon = 1e-15);
            }
            let mut seen = alloc::vec![0u8; n];
            for j in grid.inner_half() {
                seen[j] += 1;
                seen[grid.reflect(j)] += 1;
            }
            for j in grid.reflection_fixed_points() {
                assert_eq!(grid.reflect(j), j);
                seen[j] += 1;
            }
            assert!(seen.iter().all(|&c| c == 1));
        }
    }

    #[test]
    fn nnn_samples_have_expected_shape() {
        let s = energy_balance_samples(Dispersion::NextNearestNeighbor, 23.0 / 64.0, 8);
        assert_eq!(s.len(), 64);
        // γ₁ persists for any dispersion.
        let row = s.iter().find(|r| r[0] == 0.375 && r[1] == 0.125).unwrap();
        let direct = Dispersion::NextNearestNeighbor.energy_balance(23.0 / 64.0, 0.375, 0.125);
        assert_eq!(row[2], direct);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(2000))]

        #[test]
        fn factorized_balance_matches_direct(k1 in -2.0f64..2.0, k3 in -2.0f64..2.0, k4 in -2.0f64..2.0) {
            let direct = Dispersion::NearestNeighbor.energy_balance(k1, k3, k4);
            prop_assert!((omega_bar(k1, k3, k4) - direct).abs() < 1e-12);
        }

        #[test]
        fn omega_is_even_and_periodic(k in -3.0f64..3.0) {
            prop_assert!((omega(k) - omega(-k)).abs() < 1e-12);
            prop_assert!((omega(k) - omega(k + 1.0)).abs() < 1e-12);
            prop_assert!((omega_nnn(k) - omega_nnn(-k)).abs() < 1e-12);
            prop_assert!((0.0..=2.0).contains(&omega(k)));
        }
    }

    #[test]
    fn factorized_balance_on_many_random_triples() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100_000 {
            let (k1, k3, k4): (f64, f64, f64) = (rng.gen(), rng.gen(), rng.gen());
            let direct = Dispersion::NearestNeighbor.energy_balance(k1, k3, k4);
            assert!((omega_bar(k1, k3, k4) - direct).abs() < 1e-12);
        }
    }
}
