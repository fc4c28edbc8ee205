//! Collision operators of the spatially homogeneous Hubbard-chain kinetic
//! equation, discretized on the grid with mollified singular kernels.
//!
//! * [`CollisionKernel::dissipative`] integrates the gain/loss integrand
//!   along the contours `γ₂` and `γ_diag` of the collision manifold.
//! * [`CollisionKernel::effective_hamiltonian`] is the mollified principal
//!   value double integral over `(k₃, k₄)`; it is the `O(n³)` part of a step.
//! * [`CollisionKernel::conservative`] is the Vlasov term `−i[H_eff, W]`.
//!
//! `k₂ = k₃ + k₄ − k₁` is always resolved in integer index arithmetic, so
//! every quadrature node is an exact grid point.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::field::WignerField;
use crate::lattice::{jacobian_weight, omega, BrillouinGrid, DEFAULT_EPSILON};
use crate::spin2::{HermitianMatrix2, Mat2};

/// Allowed anti-Hermitian residue of the accumulated effective Hamiltonian,
/// for fields with entries of order one.
pub const HERMITICITY_TOLERANCE: f64 = 1e-12;

/// Mollifier widths and contour toggles.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CollisionKernelConfig {
    /// Width of the mollified inverse Jacobian in the dissipative operator.
    pub eps_d: f64,
    /// Width of the mollified principal value in the effective Hamiltonian.
    pub eps_c: f64,
    pub include_gamma2: bool,
    pub include_diagonal: bool,
}

impl Default for CollisionKernelConfig {
    fn default() -> Self {
        CollisionKernelConfig {
            eps_d: DEFAULT_EPSILON,
            eps_c: DEFAULT_EPSILON,
            include_gamma2: true,
            include_diagonal: true,
        }
    }
}

impl CollisionKernelConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, value) in [("eps_d", self.eps_d), ("eps_c", self.eps_c)] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::InvalidParameter { name, value });
            }
        }
        Ok(())
    }
}

/// The quartic part of the symmetrized dissipative integrand,
/// `−W̃₁W₃W̃₂W₄ − W₄W̃₂W₃W̃₁ + W₁W̃₃W₂W̃₄ + W̃₄W₂W̃₃W₁`.
///
/// The four summands pair into `X + X†`, so the result is Hermitian exactly.
pub fn a_quad(
    w1: &HermitianMatrix2,
    w2: &HermitianMatrix2,
    w3: &HermitianMatrix2,
    w4: &HermitianMatrix2,
) -> HermitianMatrix2 {
    let (m1, m2, m3, m4) = (w1.to_mat(), w2.to_mat(), w3.to_mat(), w4.to_mat());
    let (t1, t2, t3, t4) = (
        w1.complement().to_mat(),
        w2.complement().to_mat(),
        w3.complement().to_mat(),
        w4.complement().to_mat(),
    );
    let x = m1 * t3 * m2 * t4 - t1 * m3 * t2 * m4;
    x.plus_adjoint()
}

/// The trace part of the symmetrized dissipative integrand,
/// `(W̃₁W₃ + W₃W̃₁) tr[W̃₂W₄] − (W₁W̃₃ + W̃₃W₁) tr[W₂W̃₄]`.
pub fn a_tr(
    w1: &HermitianMatrix2,
    w2: &HermitianMatrix2,
    w3: &HermitianMatrix2,
    w4: &HermitianMatrix2,
) -> HermitianMatrix2 {
    let (t1, t3) = (w1.complement(), w3.complement());
    let gain = (t1.to_mat() * w3.to_mat()).plus_adjoint();
    let loss = (w1.to_mat() * t3.to_mat()).plus_adjoint();
    let g = w2.complement().trace_product(w4);
    let l = w2.trace_product(&w4.complement());
    gain.scale(g) - loss.scale(l)
}

/// Precomputed quadrature tables for one grid and kernel configuration.
#[derive(Clone, Debug)]
pub struct CollisionKernel {
    grid: BrillouinGrid,
    config: CollisionKernelConfig,
    omega: Vec<f64>,
    /// Row-major `n × n` table of the mollified Jacobian `J(k₁, k₃)`.
    jacobian: Vec<f64>,
}

impl CollisionKernel {
    pub fn new(grid: BrillouinGrid, config: CollisionKernelConfig) -> Result<Self> {
        config.validate()?;
        let n = grid.len();
        let omega = grid.momenta().map(omega).collect();
        let mut jacobian = Vec::with_capacity(n * n);
        for i in 0..n {
            for m in 0..n {
                jacobian.push(jacobian_weight(
                    grid.momentum(i),
                    grid.momentum(m),
                    config.eps_d,
                ));
            }
        }
        Ok(CollisionKernel {
            grid,
            config,
            omega,
            jacobian,
        })
    }

    pub fn grid(&self) -> &BrillouinGrid {
        &self.grid
    }

    pub fn config(&self) -> &CollisionKernelConfig {
        &self.config
    }

    /// Mollified Jacobian weight between nodes `k1` and `k3`.
    #[inline]
    pub fn jacobian(&self, k1: usize, k3: usize) -> f64 {
        self.jacobian[k1 * self.grid.len() + k3]
    }

    /// Dispersion `ω(k_j)` at a node.
    #[inline]
    pub fn omega(&self, j: usize) -> f64 {
        self.omega[j]
    }

    /// `ω₁ + ω₂ − ω₃ − ω₄` from the node table, with `k₂` on-grid.
    ///
    /// Grouped as `(ω₁ + ω₂) − (ω₃ + ω₄)` so the value is bit-identical under
    /// `k₃ ↔ k₄`.
    #[inline]
    pub fn energy_balance(&self, k1: usize, k3: usize, k4: usize) -> f64 {
        let k2 = self.grid.partner(k1, k3, k4);
        (self.omega[k1] + self.omega[k2]) - (self.omega[k3] + self.omega[k4])
    }

    /// The dissipative collision operator `C_d[W]` at every node.
    pub fn dissipative(&self, field: &WignerField) -> Result<Vec<HermitianMatrix2>> {
        field.ensure_same_grid(&self.grid)?;
        let w = field.values();
        let n = self.grid.len();
        let prefactor = PI * self.grid.weight();
        Ok(per_node(n, |i| {
            let w1 = &w[i];
            let mut acc = HermitianMatrix2::ZERO;
            if self.config.include_gamma2 {
                // γ₂: k₄ = k₁, hence k₂ = k₃; only the trace part survives.
                for (m, wm) in w.iter().enumerate() {
                    acc += a_tr(w1, wm, wm, w1).scale(self.jacobian(i, m));
                }
            }
            if self.config.include_diagonal {
                // γ_diag: k₄ = ½ − k₃, hence k₂ = ½ − k₁.
                let w2 = &w[self.grid.reflect(i)];
                for (m, w3) in w.iter().enumerate() {
                    let w4 = &w[self.grid.reflect(m)];
                    let term = a_quad(w1, w2, w3, w4) + a_tr(w1, w2, w3, w4);
                    acc += term.scale(self.jacobian(i, m));
                }
            }
            acc.scale(prefactor)
        }))
    }

    /// The mollified effective Hamiltonian `H_eff[W]` at every node.
    ///
    /// The integrand `W₃W₄ − W₂W₃ − W₃W₂ − tr[W₄]W₃ + tr[W₂]W₃ + W₂` is
    /// expanded in Pauli components `W = p₀ + p·σ`. Its anti-Hermitian part
    /// `i(p₃ × p₄)·σ` cancels between `(k₃, k₄)` and `(k₄, k₃)`; the residue
    /// is accumulated and checked rather than dropped.
    pub fn effective_hamiltonian(&self, field: &WignerField) -> Result<Vec<HermitianMatrix2>> {
        field.ensure_same_grid(&self.grid)?;
        let n = self.grid.len();
        let pauli: Vec<[f64; 4]> = field
            .values()
            .iter()
            .map(|w| {
                let (s, v) = w.to_pauli();
                [s, v[0], v[1], v[2]]
            })
            .collect();
        let eps2 = self.config.eps_c * self.config.eps_c;
        let norm = self.grid.weight() * self.grid.weight();
        let rows = per_node(n, |i| {
            let mut scalar = 0.0;
            let mut vector = [0.0f64; 3];
            let mut anti = [0.0f64; 3];
            let om1 = self.omega[i];
            for (a, p) in pauli.iter().enumerate() {
                let om3 = self.omega[a];
                // c = a + b − i (mod n), advanced incrementally with b.
                let mut c = (a + n - i) % n;
                for (b, q) in pauli.iter().enumerate() {
                    let r = &pauli[c];
                    let bal = (om1 + self.omega[c]) - (om3 + self.omega[b]);
                    let wgt = bal / (bal * bal + eps2);

                    let pq = p[1] * q[1] + p[2] * q[2] + p[3] * q[3];
                    let rp = r[1] * p[1] + r[2] * p[2] + r[3] * p[3];
                    scalar += wgt * (-p[0] * q[0] + pq - 2.0 * rp + r[0]);
                    for d in 0..3 {
                        vector[d] += wgt
                            * (p[0] * q[d + 1] - q[0] * p[d + 1] - 2.0 * p[0] * r[d + 1]
                                + r[d + 1]);
                    }
                    anti[0] += wgt * (p[2] * q[3] - p[3] * q[2]);
                    anti[1] += wgt * (p[3] * q[1] - p[1] * q[3]);
                    anti[2] += wgt * (p[1] * q[2] - p[2] * q[1]);

                    c += 1;
                    if c == n {
                        c = 0;
                    }
                }
            }
            let defect =
                norm * libm::sqrt(anti[0] * anti[0] + anti[1] * anti[1] + anti[2] * anti[2]);
            let h = HermitianMatrix2::from_pauli(
                norm * scalar,
                [norm * vector[0], norm * vector[1], norm * vector[2]],
            );
            (h, defect)
        });
        // The integrand is quadratic in W; scale the round-off allowance with it.
        let magnitude = crate::field::max_entry_norm(field.values());
        let tolerance = HERMITICITY_TOLERANCE * (1.0 + magnitude * magnitude);
        let mut out = Vec::with_capacity(n);
        for (node, (h, defect)) in rows.into_iter().enumerate() {
            if !(defect <= tolerance) {
                return Err(Error::NonHermitian { node, defect });
            }
            out.push(h);
        }
        Ok(out)
    }

    /// The conservative collision operator `−i[H_eff(k), W(k)]` at every node.
    pub fn conservative(&self, field: &WignerField) -> Result<Vec<HermitianMatrix2>> {
        let h = self.effective_hamiltonian(field)?;
        Ok(commutator_term(&h, field))
    }

    /// Full right-hand side `C_c[W] + C_d[W]`.
    pub fn collision(&self, field: &WignerField) -> Result<Vec<HermitianMatrix2>> {
        let c = self.conservative(field)?;
        let d = self.dissipative(field)?;
        Ok(c.into_iter().zip(d).map(|(a, b)| a + b).collect())
    }
}

/// `−i[h_j, W_j]` node by node.
pub fn commutator_term(h: &[HermitianMatrix2], field: &WignerField) -> Vec<HermitianMatrix2> {
    h.iter()
        .zip(field.values())
        .map(|(h, w)| HermitianMatrix2::minus_i_commutator(h, w))
        .collect()
}

/// Evaluates `f` for every node index; the outer loop carries no cross-node
/// writes, so it runs on the rayon pool when the `parallel` feature is on.
#[cfg(feature = "parallel")]
pub(crate) fn per_node<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn per_node<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n).map(f).collect()
}

/// `m` as a Hermitian matrix when its anti-Hermitian part is below `tol`.
pub fn hermitian_or_err(node: usize, m: &Mat2, tol: f64) -> Result<HermitianMatrix2> {
    HermitianMatrix2::from_mat(m, tol).ok_or(Error::NonHermitian {
        node,
        defect: m.hermiticity_defect(),
    })
}
