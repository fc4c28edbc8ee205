//! Built-in initial fields: perturbations of Fermi-Dirac states and an
//! explicit non-thermal matrix function.

use core::f64::consts::PI;

use crate::field::WignerField;
use crate::lattice::BrillouinGrid;
use crate::spin2::{conjugate_by_expi, HermitianMatrix2, C64};

/// The Euler-Mascheroni constant.
#[allow(clippy::excessive_precision)]
pub const EULER_GAMMA: f64 = 0.5772156649015328606065120900824024310422;

/// `τ = σ_x − σ_y + ½σ_z`.
pub fn tau() -> HermitianMatrix2 {
    HermitianMatrix2::from_pauli(0.0, [1.0, -1.0, 0.5])
}

/// `¼ e^{−2πiτk} σ_z e^{2πiτk} − τ/18`.
///
/// Traceless, with vanishing grid sum on every grid with more than 3 nodes.
pub fn rotated_pauli(k: f64) -> HermitianMatrix2 {
    let t = tau();
    conjugate_by_expi(&HermitianMatrix2::pauli_z(), &t, 2.0 * PI * k).scale(0.25)
        - t.scale(1.0 / 18.0)
}

/// `¼ (e^{−64 sin²(π(k−¾))} − e^{−64 sin²(π(k−¼))}) e^{−2πiσ_x k} σ_z e^{2πiσ_x k}`.
pub fn gaussian_window(k: f64) -> HermitianMatrix2 {
    let bump = |c: f64| {
        let s = libm::sin(PI * (k - c));
        libm::exp(-64.0 * s * s)
    };
    let amplitude = 0.25 * (bump(0.75) - bump(0.25));
    conjugate_by_expi(
        &HermitianMatrix2::pauli_z(),
        &HermitianMatrix2::pauli_x(),
        2.0 * PI * k,
    )
    .scale(amplitude)
}

/// `sin z` for complex `z`.
fn complex_sin(z: C64) -> C64 {
    C64::new(
        libm::sin(z.re) * libm::cosh(z.im),
        libm::cos(z.re) * libm::sinh(z.im),
    )
}

/// The explicit non-thermal initial matrix
///
/// ```text
/// (2/5) [ ½e^{−cos(4π(k−γ))} + ¼                 ¼ sin(e^{2πik})                        ]
///       [ ¼ sin(e^{−2πik})      ¼ erf(cos 2πk) + ½ + arctan(sin(2πk − 1/5)) + π/4 ]
/// ```
pub fn nonthermal(k: f64) -> HermitianMatrix2 {
    let up = 0.5 * libm::exp(-libm::cos(4.0 * PI * (k - EULER_GAMMA))) + 0.25;
    let phase = C64::new(libm::cos(2.0 * PI * k), libm::sin(2.0 * PI * k));
    let off = complex_sin(phase) * 0.25;
    let down = 0.25 * libm::erf(libm::cos(2.0 * PI * k))
        + 0.5
        + libm::atan(libm::sin(2.0 * PI * k - 0.2))
        + PI / 4.0;
    HermitianMatrix2::new(up, down, off).scale(0.4)
}

/// `base + V` node by node.
pub fn perturbed<F: Fn(f64) -> HermitianMatrix2>(base: &WignerField, v: F) -> WignerField {
    let grid = *base.grid();
    base.map(|j, w| *w + v(grid.momentum(j)))
}

/// The explicit non-thermal field on a grid.
pub fn nonthermal_field(grid: &BrillouinGrid) -> WignerField {
    WignerField::from_fn(*grid, nonthermal)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perturbations_are_traceless_with_zero_grid_sum() {
        let grid = BrillouinGrid::new(64).unwrap();
        for v in [
            rotated_pauli as fn(f64) -> HermitianMatrix2,
            gaussian_window,
        ] {
            let mut sum = HermitianMatrix2::ZERO;
            for k in grid.momenta() {
                let m = v(k);
                assert!(m.trace().abs() < 1e-12);
                sum += m;
            }
            assert!(sum.scale(grid.weight()).max_abs() < 1e-10);
        }
    }

    #[test]
    fn gaussian_window_has_imaginary_off_diagonal() {
        for j in 0..16 {
            assert!(gaussian_window(j as f64 / 16.0).off.re.abs() < 1e-15);
        }
    }

    #[test]
    fn nonthermal_matches_direct_evaluation_at_zero() {
        let w = nonthermal(0.0);
        let expected = 0.4 * (0.5 * (-(-4.0 * PI * EULER_GAMMA).cos()).exp() + 0.25);
        assert!((w.up - expected).abs() < 1e-15);
        // sin(1) at k = 0, purely real.
        assert!((w.off.re - 0.1 * 1f64.sin()).abs() < 1e-15 && w.off.im.abs() < 1e-15);
        let down = 0.4 * (0.25 * libm::erf(1.0) + 0.5 + (-(0.2f64.sin())).atan() + PI / 4.0);
        assert!((w.down - down).abs() < 1e-15);
    }

    #[test]
    fn nonthermal_field_is_strictly_fermi() {
        let f = nonthermal_field(&BrillouinGrid::new(64).unwrap());
        let ((_, lo), (_, hi)) = f.spectral_range();
        assert!(lo > 0.0 && hi < 1.0);
    }
}
