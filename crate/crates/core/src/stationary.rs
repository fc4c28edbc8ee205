//! Stationary states: Fermi-Dirac equilibria, the general non-thermal family
//! `λ_σ(k) = (e^{f(k) − a_σ} + 1)^{−1}` with `f(k) = −f(½ − k)`, and the
//! inverse problem of predicting `(f, a↑, a↓)` from the conserved quantities
//! of an initial field.
//!
//! The inverse problem is the minimization of the strictly convex function
//!
//! ```text
//! Φ(f, a) = Σ_σ [ Σ_{j free} L(a_σ, f_j) + L(a_σ, 0) ] − n Σ_σ (ε_σ − ½) a_σ + Σ_{j free} h_j f_j
//! L(a, f) = log(cosh a + cosh f)
//! ```
//!
//! over the `n/2 − 1` nodes with `|k| < ¼` and the two `a_σ`. Its gradient is
//! the residual of the `h(k)` and spin-eigenvalue matching conditions.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::field::WignerField;
use crate::lattice::{BrillouinGrid, Dispersion};
use crate::observables::{charges, ConservedCharges};
use crate::spin2::{eig2, inner, projector, HermitianMatrix2, Mat2, C64};

/// Orthonormality tolerance of a [`SpinBasis`].
pub const BASIS_TOLERANCE: f64 = 1e-12;

/// Antisymmetry tolerance of a stationary `f` on the grid.
pub const ANTISYMMETRY_TOLERANCE: f64 = 1e-12;

/// `(e^x + 1)^{−1}` without overflow for large `|x|`.
#[inline]
pub fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        let e = libm::exp(-x);
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + libm::exp(x))
    }
}

/// `log(p / (1 − p))`, the inverse of `a ↦ logistic(−a)`.
#[inline]
pub fn logit(p: f64) -> f64 {
    libm::log(p) - libm::log1p(-p)
}

/// An orthonormal pair `(|↑⟩, |↓⟩)` in `C²`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpinBasis {
    vectors: [[C64; 2]; 2],
}

impl Default for SpinBasis {
    fn default() -> Self {
        Self::canonical()
    }
}

impl SpinBasis {
    pub fn canonical() -> Self {
        let (one, zero) = (C64::new(1.0, 0.0), C64::new(0.0, 0.0));
        SpinBasis {
            vectors: [[one, zero], [zero, one]],
        }
    }

    pub fn new(up: [C64; 2], down: [C64; 2]) -> Result<Self> {
        let defect = (inner(up, up).re - 1.0)
            .abs()
            .max((inner(down, down).re - 1.0).abs())
            .max(inner(up, down).norm());
        if !(defect <= BASIS_TOLERANCE) {
            return Err(Error::InvalidParameter {
                name: "basis",
                value: defect,
            });
        }
        Ok(SpinBasis {
            vectors: [up, down],
        })
    }

    /// The columns of a unitary.
    pub fn from_unitary(u: &Mat2) -> Result<Self> {
        Self::new([u.0[0][0], u.0[1][0]], [u.0[0][1], u.0[1][1]])
    }

    pub fn up(&self) -> [C64; 2] {
        self.vectors[0]
    }

    pub fn down(&self) -> [C64; 2] {
        self.vectors[1]
    }

    pub fn vectors(&self) -> [[C64; 2]; 2] {
        self.vectors
    }

    /// Unitary with `|↑⟩`, `|↓⟩` as columns.
    pub fn unitary(&self) -> Mat2 {
        Mat2::from_columns(self.vectors[0], self.vectors[1])
    }

    /// `λ↑ |↑⟩⟨↑| + λ↓ |↓⟩⟨↓|`.
    pub fn diagonal(&self, up: f64, down: f64) -> HermitianMatrix2 {
        projector(self.vectors[0]).scale(up) + projector(self.vectors[1]).scale(down)
    }

    /// `W` expressed in this basis, `U† W U`.
    pub fn components(&self, w: &HermitianMatrix2) -> HermitianMatrix2 {
        w.conjugated(&self.unitary())
    }
}

/// Inverse temperature, spin-resolved chemical potentials and spin axis of
/// a Fermi-Dirac state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FermiDiracParams {
    pub beta: f64,
    pub mu_up: f64,
    pub mu_down: f64,
    pub basis: SpinBasis,
}

/// `W(k) = Σ_σ (e^{β(ω(k) − μ_σ)} + 1)^{−1} |σ⟩⟨σ|`.
pub fn fermi_dirac(
    params: &FermiDiracParams,
    grid: &BrillouinGrid,
    dispersion: Dispersion,
) -> WignerField {
    WignerField::from_fn(*grid, |k| {
        let w = dispersion.eval(k);
        params.basis.diagonal(
            logistic(params.beta * (w - params.mu_up)),
            logistic(params.beta * (w - params.mu_down)),
        )
    })
}

/// A member of the stationary family, stored on the grid.
#[derive(Clone, Debug, PartialEq)]
pub struct StationaryState {
    f: Vec<f64>,
    pub a_up: f64,
    pub a_down: f64,
    pub basis: SpinBasis,
}

impl StationaryState {
    /// Validates `f(k_j) = −f(½ − k_j)` on the grid.
    pub fn new(f: Vec<f64>, a_up: f64, a_down: f64, basis: SpinBasis) -> Result<Self> {
        let grid = BrillouinGrid::new(f.len())?;
        for j in 0..f.len() {
            let defect = (f[j] + f[grid.reflect(j)]).abs();
            if !(defect <= ANTISYMMETRY_TOLERANCE) {
                return Err(Error::NotAntisymmetric { node: j, defect });
            }
        }
        for (name, value) in [("a_up", a_up), ("a_down", a_down)] {
            if !value.is_finite() {
                return Err(Error::InvalidParameter { name, value });
            }
        }
        Ok(StationaryState {
            f,
            a_up,
            a_down,
            basis,
        })
    }

    /// Builds `f` from its values on [`BrillouinGrid::inner_half`], extended
    /// by exact antisymmetry.
    pub fn from_inner_half(
        grid: &BrillouinGrid,
        inner: &[f64],
        a_up: f64,
        a_down: f64,
        basis: SpinBasis,
    ) -> Result<Self> {
        let nodes = grid.inner_half();
        if inner.len() != nodes.len() {
            return Err(Error::LengthMismatch {
                expected: nodes.len(),
                found: inner.len(),
            });
        }
        let mut f = vec![0.0; grid.len()];
        for (&j, &v) in nodes.iter().zip(inner) {
            f[j] = v;
            f[grid.reflect(j)] = -v;
        }
        Self::new(f, a_up, a_down, basis)
    }

    /// Samples a function of `k`, antisymmetrized exactly on the grid.
    pub fn from_fn<F: Fn(f64) -> f64>(
        grid: &BrillouinGrid,
        f: F,
        a_up: f64,
        a_down: f64,
        basis: SpinBasis,
    ) -> Result<Self> {
        let inner: Vec<f64> = grid
            .inner_half()
            .iter()
            .map(|&j| f(grid.momentum(j)))
            .collect();
        Self::from_inner_half(grid, &inner, a_up, a_down, basis)
    }

    /// The Fermi-Dirac state as `f = −β cos 2πk`, `a_σ = β(μ_σ − 1)`.
    pub fn from_fermi_dirac(params: &FermiDiracParams, grid: &BrillouinGrid) -> Result<Self> {
        let beta = params.beta;
        Self::from_fn(
            grid,
            |k| -beta * libm::cos(2.0 * PI * k),
            beta * (params.mu_up - 1.0),
            beta * (params.mu_down - 1.0),
            params.basis,
        )
    }

    pub fn f(&self) -> &[f64] {
        &self.f
    }

    pub fn grid(&self) -> BrillouinGrid {
        BrillouinGrid::new(self.f.len()).expect("validated on construction")
    }

    pub fn a(&self) -> [f64; 2] {
        [self.a_up, self.a_down]
    }

    /// `(λ↑(k_j), λ↓(k_j))`.
    pub fn eigenvalues(&self, j: usize) -> (f64, f64) {
        (
            logistic(self.f[j] - self.a_up),
            logistic(self.f[j] - self.a_down),
        )
    }

    /// The collision invariants `Φ_σ(k_j) = log(λ̃_σ/λ_σ) = f(k_j) − a_σ`.
    pub fn collision_invariants(&self, j: usize) -> (f64, f64) {
        (self.f[j] - self.a_up, self.f[j] - self.a_down)
    }
}

/// The field of a stationary state.
pub fn build_stationary(st: &StationaryState, grid: &BrillouinGrid) -> Result<WignerField> {
    if st.f.len() != grid.len() {
        return Err(Error::GridMismatch {
            expected: grid.len(),
            found: st.f.len(),
        });
    }
    let values = (0..grid.len())
        .map(|j| {
            let (up, down) = st.eigenvalues(j);
            st.basis.diagonal(up, down)
        })
        .collect();
    WignerField::new(*grid, values)
}

/// Newton controls for [`predict_stationary`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PredictConfig {
    /// Stop once every matching residual is below this.
    pub tolerance: f64,
    /// Residual still accepted when Newton stalls at round-off.
    pub acceptable: f64,
    pub max_iterations: usize,
    /// Eigenvalues of the initial field closer than this to 0 or 1 are
    /// rejected as (near-)pure.
    pub purity_margin: f64,
}

impl Default for PredictConfig {
    fn default() -> Self {
        PredictConfig {
            tolerance: 1e-13,
            acceptable: 1e-10,
            max_iterations: 100,
            purity_margin: 1e-12,
        }
    }
}

/// Solver result together with its diagnostics.
#[derive(Clone, Debug, PartialEq)]
pub struct Prediction {
    pub state: StationaryState,
    /// Eigenvalues `(ε↑, ε↓)` of the conserved spin matrix.
    pub spin_eigenvalues: [f64; 2],
    pub iterations: usize,
    /// Largest residual of the `h(k)` matching conditions.
    pub h_residual: f64,
    /// Largest residual of the spin-eigenvalue matching conditions.
    pub spin_residual: f64,
    /// Smallest pivot met while factorizing the Hessian.
    pub min_pivot: f64,
}

/// `log cosh x` without overflow.
#[inline]
fn log_cosh(x: f64) -> f64 {
    let a = x.abs();
    a + libm::log1p(libm::exp(-2.0 * a)) - core::f64::consts::LN_2
}

/// `sech² x` without overflow.
#[inline]
fn sech2(x: f64) -> f64 {
    let e = libm::exp(-2.0 * x.abs());
    4.0 * e / ((1.0 + e) * (1.0 + e))
}

/// The convex free energy of the inverse problem for fixed data
/// `(h on the inner half, ε↑, ε↓)`.
///
/// Variables are packed as `[f_free..., a↑, a↓]`.
#[derive(Clone, Debug, PartialEq)]
pub struct FreeEnergy {
    n: usize,
    h: Vec<f64>,
    eps: [f64; 2],
}

/// Blocks of the Hessian `[[D, B], [Bᵀ, C]]` with `D` diagonal and `C`
/// diagonal (the two `a_σ` do not couple).
#[derive(Clone, Debug, PartialEq)]
pub struct HessianBlocks {
    pub d: Vec<f64>,
    pub b: Vec<[f64; 2]>,
    pub c: [f64; 2],
}

impl HessianBlocks {
    /// Dense symmetric matrix, for diagnostics.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let m = self.d.len();
        let mut out = vec![vec![0.0; m + 2]; m + 2];
        for j in 0..m {
            out[j][j] = self.d[j];
            for s in 0..2 {
                out[j][m + s] = self.b[j][s];
                out[m + s][j] = self.b[j][s];
            }
        }
        out[m][m] = self.c[0];
        out[m + 1][m + 1] = self.c[1];
        out
    }
}

impl FreeEnergy {
    /// `h` holds `tr W(k) − tr W(½ − k)` on [`BrillouinGrid::inner_half`].
    pub fn new(n: usize, h: Vec<f64>, eps: [f64; 2]) -> Self {
        FreeEnergy { n, h, eps }
    }

    pub fn dimension(&self) -> usize {
        self.h.len() + 2
    }

    fn split<'a>(&self, x: &'a [f64]) -> (&'a [f64], [f64; 2]) {
        let m = self.h.len();
        (&x[..m], [x[m], x[m + 1]])
    }

    /// `L(a, f) = log(cosh a + cosh f) = log 2 + log cosh u + log cosh v`
    /// with `u = (a + f)/2`, `v = (a − f)/2`.
    fn l(a: f64, f: f64) -> f64 {
        core::f64::consts::LN_2 + log_cosh(0.5 * (a + f)) + log_cosh(0.5 * (a - f))
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        let (f, a) = self.split(x);
        let mut total = 0.0;
        for s in 0..2 {
            let mut part = Self::l(a[s], 0.0);
            for &fj in f {
                part += Self::l(a[s], fj);
            }
            total += part - self.n as f64 * (self.eps[s] - 0.5) * a[s];
        }
        total + f.iter().zip(&self.h).map(|(fj, hj)| fj * hj).sum::<f64>()
    }

    /// Model `h(k_j)` on the inner half for given `(f, a)`.
    pub fn model_h(f: &[f64], a: [f64; 2]) -> Vec<f64> {
        f.iter()
            .map(|&fj| {
                a.iter()
                    .map(|&s| logistic(fj - s) - logistic(-fj - s))
                    .sum()
            })
            .collect()
    }

    /// Model `(1/n) Σ_j λ_σ(k_j)` for given `(f, a)`.
    pub fn model_eps(&self, f: &[f64], a: [f64; 2]) -> [f64; 2] {
        let mut out = [0.0; 2];
        for s in 0..2 {
            let mut sum = 2.0 * logistic(-a[s]);
            for &fj in f {
                sum += logistic(fj - a[s]) + logistic(-fj - a[s]);
            }
            out[s] = sum / self.n as f64;
        }
        out
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let (f, a) = self.split(x);
        let mut g = Vec::with_capacity(self.dimension());
        for (&fj, &hj) in f.iter().zip(&self.h) {
            let mut dfj = hj;
            for &s in &a {
                dfj += 0.5 * (libm::tanh(0.5 * (s + fj)) - libm::tanh(0.5 * (s - fj)));
            }
            g.push(dfj);
        }
        for s in 0..2 {
            let mut da = libm::tanh(0.5 * a[s]);
            for &fj in f {
                da += 0.5 * (libm::tanh(0.5 * (a[s] + fj)) + libm::tanh(0.5 * (a[s] - fj)));
            }
            g.push(da - self.n as f64 * (self.eps[s] - 0.5));
        }
        g
    }

    pub fn hessian(&self, x: &[f64]) -> HessianBlocks {
        let (f, a) = self.split(x);
        let mut d = Vec::with_capacity(f.len());
        let mut b = Vec::with_capacity(f.len());
        let mut c = [0.0; 2];
        for s in 0..2 {
            c[s] = 0.5 * sech2(0.5 * a[s]);
        }
        for &fj in f {
            let mut djj = 0.0;
            let mut bj = [0.0; 2];
            for s in 0..2 {
                let su = sech2(0.5 * (a[s] + fj));
                let sv = sech2(0.5 * (a[s] - fj));
                djj += 0.25 * (su + sv);
                bj[s] = 0.25 * (su - sv);
                c[s] += 0.25 * (su + sv);
            }
            d.push(djj);
            b.push(bj);
        }
        HessianBlocks { d, b, c }
    }

    /// Solves `H δ = −g` by eliminating the diagonal `f` block. Returns the
    /// step and the smallest pivot; fails if a pivot is not positive.
    pub fn newton_step(&self, x: &[f64], iteration: usize) -> Result<(Vec<f64>, f64)> {
        let g = self.gradient(x);
        let hb = self.hessian(x);
        let m = hb.d.len();
        let mut min_pivot = f64::INFINITY;
        let mut schur = [[hb.c[0], 0.0], [0.0, hb.c[1]]];
        let mut rhs = [-g[m], -g[m + 1]];
        for j in 0..m {
            let dj = hb.d[j];
            min_pivot = min_pivot.min(dj);
            if !(dj > 0.0) {
                return Err(Error::NotConvex {
                    iteration,
                    pivot: dj,
                });
            }
            for s in 0..2 {
                rhs[s] += hb.b[j][s] * g[j] / dj;
                for t in 0..2 {
                    schur[s][t] -= hb.b[j][s] * hb.b[j][t] / dj;
                }
            }
        }
        let p0 = schur[0][0];
        let det = schur[0][0] * schur[1][1] - schur[0][1] * schur[1][0];
        let p1 = det / p0;
        min_pivot = min_pivot.min(p0).min(p1);
        if !(p0 > 0.0 && p1 > 0.0) {
            return Err(Error::NotConvex {
                iteration,
                pivot: p0.min(p1),
            });
        }
        let da = [
            (schur[1][1] * rhs[0] - schur[0][1] * rhs[1]) / det,
            (schur[0][0] * rhs[1] - schur[1][0] * rhs[0]) / det,
        ];
        let mut step = Vec::with_capacity(m + 2);
        for j in 0..m {
            step.push((-g[j] - hb.b[j][0] * da[0] - hb.b[j][1] * da[1]) / hb.d[j]);
        }
        step.push(da[0]);
        step.push(da[1]);
        Ok((step, min_pivot))
    }

    /// Largest matching residual: `h` per node and `ε_σ` per spin.
    pub fn residual(&self, x: &[f64]) -> (f64, f64) {
        let g = self.gradient(x);
        let m = self.h.len();
        let rh = g[..m].iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        let re = g[m..].iter().fold(0.0f64, |acc, v| acc.max(v.abs())) / self.n as f64;
        (rh, re)
    }

    /// Minimizes by damped Newton from `x0`.
    pub fn minimize(&self, x0: Vec<f64>, cfg: &PredictConfig) -> Result<(Vec<f64>, usize, f64)> {
        let mut x = x0;
        let mut value = self.value(&x);
        let mut min_pivot = f64::INFINITY;
        for iteration in 0..cfg.max_iterations {
            let (rh, re) = self.residual(&x);
            if rh.max(re) < cfg.tolerance {
                return Ok((x, iteration, min_pivot));
            }
            let (step, pivot) = self.newton_step(&x, iteration)?;
            min_pivot = min_pivot.min(pivot);
            let g = self.gradient(&x);
            let decrease = -g.iter().zip(&step).map(|(a, b)| a * b).sum::<f64>();
            if decrease < 1e-10 * (1.0 + value.abs()) {
                // Inside the quadratic basin the objective no longer resolves
                // the progress; take the full step while the residual shrinks.
                let trial: Vec<f64> = x.iter().zip(&step).map(|(xi, si)| xi + si).collect();
                let (th, te) = self.residual(&trial);
                if th.max(te) < rh.max(re) {
                    value = self.value(&trial);
                    x = trial;
                    continue;
                }
                if rh.max(re) < cfg.acceptable {
                    return Ok((x, iteration, min_pivot));
                }
                return Err(Error::NoConvergence {
                    iterations: iteration,
                    gradient_norm: rh.max(re),
                });
            }
            let mut t = 1.0;
            let mut accepted = false;
            for _ in 0..60 {
                let trial: Vec<f64> = x.iter().zip(&step).map(|(xi, si)| xi + t * si).collect();
                let tv = self.value(&trial);
                if tv <= value {
                    x = trial;
                    value = tv;
                    accepted = true;
                    break;
                }
                t *= 0.5;
            }
            if !accepted {
                return Err(Error::NoConvergence {
                    iterations: iteration,
                    gradient_norm: rh.max(re),
                });
            }
        }
        let (rh, re) = self.residual(&x);
        if rh.max(re) < cfg.acceptable {
            return Ok((x, cfg.max_iterations, min_pivot));
        }
        Err(Error::NoConvergence {
            iterations: cfg.max_iterations,
            gradient_norm: rh.max(re),
        })
    }
}

/// Orders the eigenvectors of the conserved spin matrix so that `|↑⟩` is the
/// one with the larger weight on the first canonical axis (ties: larger
/// eigenvalue). A spin matrix already diagonal keeps the canonical labels.
pub fn spin_eigenbasis(spin: &HermitianMatrix2) -> (SpinBasis, [f64; 2]) {
    let e = eig2(spin);
    let w0 = e.vectors[0][0].norm_sqr();
    let w1 = e.vectors[1][0].norm_sqr();
    let (i, j) = if w1 > w0 { (1, 0) } else { (0, 1) };
    let basis = SpinBasis {
        vectors: [e.vectors[i], e.vectors[j]],
    };
    (basis, [e.values[i], e.values[j]])
}

/// Predicts the stationary state reached from `initial`, with default controls.
pub fn predict_stationary(initial: &WignerField) -> Result<Prediction> {
    predict_stationary_with(initial, &PredictConfig::default())
}

/// Predicts the stationary state reached from `initial`: the member of the
/// stationary family sharing its spin matrix and its `h(k)` profile.
pub fn predict_stationary_with(initial: &WignerField, cfg: &PredictConfig) -> Result<Prediction> {
    let ((_, lo), (_, hi)) = initial.spectral_range();
    if !(lo > cfg.purity_margin && hi < 1.0 - cfg.purity_margin) {
        return Err(Error::DegenerateInput {
            reason: "initial eigenvalues must lie strictly inside (0, 1)",
        });
    }
    let grid = *initial.grid();
    let ConservedCharges {
        spin, h_profile, ..
    } = charges(initial);
    let (basis, eps) = spin_eigenbasis(&spin);
    let nodes = grid.inner_half();
    let h: Vec<f64> = nodes.iter().map(|&j| h_profile[j]).collect();
    let problem = FreeEnergy::new(grid.len(), h, eps);

    let mut x0: Vec<f64> = problem.h.iter().map(|hj| -0.5 * hj).collect();
    x0.push(logit(eps[0]));
    x0.push(logit(eps[1]));
    let (x, iterations, min_pivot) = problem.minimize(x0, cfg)?;

    let m = nodes.len();
    let a = [x[m], x[m + 1]];
    let f = &x[..m];
    let model_h = FreeEnergy::model_h(f, a);
    let h_residual = model_h
        .iter()
        .zip(&problem.h)
        .fold(0.0f64, |acc, (p, q)| acc.max((p - q).abs()));
    let model_eps = problem.model_eps(f, a);
    let spin_residual = (model_eps[0] - eps[0])
        .abs()
        .max((model_eps[1] - eps[1]).abs());
    let state = StationaryState::from_inner_half(&grid, f, a[0], a[1], basis)?;
    Ok(Prediction {
        state,
        spin_eigenvalues: eps,
        iterations,
        h_residual,
        spin_residual,
        min_pivot,
    })
}
