//! Entropy, entropy production, conserved charges, distances, Bloch curves
//! and decay-rate fitting.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::collision::CollisionKernel;
use crate::error::{Error, Result};
use crate::field::WignerField;
use crate::lattice::{omega, BrillouinGrid};
use crate::spin2::{bloch, eig2, inner, BlochVector, EigenDecomposition2, HermitianMatrix2, Mat2};

/// Eigenvalues are clamped into `[CLAMP, 1 − CLAMP]` before taking logs.
pub const CLAMP: f64 = 1e-12;

/// Tolerance of the antisymmetry check on a user-supplied charge weight.
pub const CHARGE_ANTISYMMETRY_TOLERANCE: f64 = 1e-12;

#[inline]
fn xlogx(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * libm::log(x)
    }
}

#[inline]
fn clamp(x: f64) -> f64 {
    x.clamp(CLAMP, 1.0 - CLAMP)
}

/// `S[W] = −(1/n) Σ_j tr[W log W + W̃ log W̃]` with `W̃ = 1 − W`.
pub fn entropy(field: &WignerField) -> f64 {
    let sum: f64 = field
        .values()
        .iter()
        .map(|w| {
            let (a, b) = w.eigenvalues();
            xlogx(a) + xlogx(1.0 - a) + xlogx(b) + xlogx(1.0 - b)
        })
        .sum();
    -sum * field.grid().weight()
}

/// Entropy production `σ[W] = −(1/n) Σ_j tr[(log W − log W̃) C_d[W](k_j)]`.
///
/// Only the dissipative part contributes: the commutator term is traceless
/// against any function of `W(k)`.
pub fn entropy_production_trace_form(field: &WignerField, kernel: &CollisionKernel) -> Result<f64> {
    let cd = kernel.dissipative(field)?;
    let mut sum = 0.0;
    for (w, c) in field.values().iter().zip(&cd) {
        let e = eig2(w);
        let g = e.map(|x| {
            let x = clamp(x);
            libm::log(x) - libm::log(1.0 - x)
        });
        sum += g.trace_product(c);
    }
    Ok(-sum * field.grid().weight())
}

/// `(x − y) log(x / y)` for `x, y > 0`; non-negative.
#[inline]
fn gain_loss(x: f64, y: f64) -> f64 {
    (x - y) * (libm::log(x) - libm::log(y))
}

struct Spectral {
    values: [f64; 2],
    vectors: [[crate::spin2::C64; 2]; 2],
}

impl From<EigenDecomposition2> for Spectral {
    fn from(e: EigenDecomposition2) -> Self {
        Spectral {
            values: [clamp(e.values[0]), clamp(e.values[1])],
            vectors: e.vectors,
        }
    }
}

/// Entropy production as a manifestly non-negative sum over collision
/// quadruples and eigenbasis labels: each term is a product of
/// `(x − y) log(x/y) ≥ 0` with a non-negative overlap factor.
pub fn entropy_production(field: &WignerField, kernel: &CollisionKernel) -> Result<f64> {
    field.ensure_same_grid(kernel.grid())?;
    let grid = *field.grid();
    let n = grid.len();
    let spec: Vec<Spectral> = field.values().iter().map(|w| eig2(w).into()).collect();
    let cfg = *kernel.config();

    let rows = crate::collision::per_node(n, |i| {
        let mut gamma2 = 0.0;
        let mut diagonal = 0.0;
        for m in 0..n {
            let jac = kernel.jacobian(i, m);
            if cfg.include_gamma2 {
                // Quadruple (k₁, k₂, k₃, k₄) = (i, m, m, i).
                let (p, q) = (&spec[i], &spec[m]);
                let mut acc = 0.0;
                for s1 in 0..2 {
                    for s2 in 0..2 {
                        for s3 in 0..2 {
                            let o13 = inner(p.vectors[s1], q.vectors[s3]).norm_sqr();
                            for s4 in 0..2 {
                                let o24 = inner(q.vectors[s2], p.vectors[s4]).norm_sqr();
                                let (e1, e2, e3, e4) =
                                    (p.values[s1], q.values[s2], q.values[s3], p.values[s4]);
                                let x = (1.0 - e1) * (1.0 - e2) * e3 * e4;
                                let y = e1 * e2 * (1.0 - e3) * (1.0 - e4);
                                acc += 0.5 * gain_loss(x, y) * o13 * o24;
                            }
                        }
                    }
                }
                gamma2 += jac * acc;
            }
            if cfg.include_diagonal {
                let k2 = grid.reflect(i);
                let k4 = grid.reflect(m);
                let s = [&spec[i], &spec[k2], &spec[m], &spec[k4]];
                let mut acc = 0.0;
                for s1 in 0..2 {
                    for s2 in 0..2 {
                        for s3 in 0..2 {
                            for s4 in 0..2 {
                                let v = [
                                    s[0].vectors[s1],
                                    s[1].vectors[s2],
                                    s[2].vectors[s3],
                                    s[3].vectors[s4],
                                ];
                                let amp = inner(v[0], v[2]) * inner(v[1], v[3])
                                    - inner(v[0], v[3]) * inner(v[1], v[2]);
                                let (e1, e2, e3, e4) = (
                                    s[0].values[s1],
                                    s[1].values[s2],
                                    s[2].values[s3],
                                    s[3].values[s4],
                                );
                                let x = (1.0 - e1) * (1.0 - e2) * e3 * e4;
                                let y = e1 * e2 * (1.0 - e3) * (1.0 - e4);
                                acc += 0.25 * gain_loss(x, y) * amp.norm_sqr();
                            }
                        }
                    }
                }
                diagonal += jac * acc;
            }
        }
        gamma2 + diagonal
    });
    let total: f64 = rows.iter().sum();
    Ok(PI * grid.weight() * grid.weight() * total)
}

/// Spin matrix, energy and the `h(k)` profile.
#[derive(Clone, Debug, PartialEq)]
pub struct ConservedCharges {
    /// `(1/n) Σ_j W(k_j)`.
    pub spin: HermitianMatrix2,
    /// `(1/n) Σ_j ω(k_j) tr W(k_j)`.
    pub energy: f64,
    /// `h(k_j) = tr W(k_j) − tr W(½ − k_j)`.
    pub h_profile: Vec<f64>,
}

impl ConservedCharges {
    /// Largest relative deviation of spin, energy and `h` from `reference`.
    ///
    /// Each quantity is normalized by the magnitude of its reference value
    /// (floored at 1 for the `h` profile and energy, which may vanish).
    pub fn relative_drift(&self, reference: &ConservedCharges) -> ChargeDrift {
        let spin_scale = reference.spin.max_abs().max(f64::MIN_POSITIVE);
        let spin = (self.spin - reference.spin).max_abs() / spin_scale;
        let energy = (self.energy - reference.energy).abs() / reference.energy.abs().max(1.0);
        let h_scale = reference
            .h_profile
            .iter()
            .fold(1.0f64, |a, v| a.max(v.abs()));
        let h = self
            .h_profile
            .iter()
            .zip(&reference.h_profile)
            .fold(0.0f64, |a, (x, y)| a.max((x - y).abs()))
            / h_scale;
        ChargeDrift {
            spin,
            energy,
            h_profile: h,
        }
    }
}

/// Relative drift of each conserved quantity.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ChargeDrift {
    pub spin: f64,
    pub energy: f64,
    pub h_profile: f64,
}

impl ChargeDrift {
    pub fn max(&self) -> f64 {
        self.spin.max(self.energy).max(self.h_profile)
    }
}

pub fn charges(field: &WignerField) -> ConservedCharges {
    let grid = field.grid();
    let w = field.values();
    let energy = grid
        .momenta()
        .zip(w)
        .map(|(k, wj)| omega(k) * wj.trace())
        .sum::<f64>()
        * grid.weight();
    let h_profile = (0..grid.len())
        .map(|j| w[j].trace() - w[grid.reflect(j)].trace())
        .collect();
    ConservedCharges {
        spin: field.mean(),
        energy,
        h_profile,
    }
}

/// `(1/n) Σ_j g(k_j) tr W(k_j)` for a weight with `g(k) = −g(½ − k)`.
pub fn g_charge(field: &WignerField, g: &[f64]) -> Result<f64> {
    let grid = field.grid();
    if g.len() != grid.len() {
        return Err(Error::LengthMismatch {
            expected: grid.len(),
            found: g.len(),
        });
    }
    for j in 0..g.len() {
        let defect = (g[j] + g[grid.reflect(j)]).abs();
        if defect > CHARGE_ANTISYMMETRY_TOLERANCE {
            return Err(Error::NotAntisymmetric { node: j, defect });
        }
    }
    Ok(g.iter()
        .zip(field.values())
        .map(|(gj, w)| gj * w.trace())
        .sum::<f64>()
        * grid.weight())
}

/// Which matrix entries a distance measures.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum DistancePart {
    #[default]
    All,
    Diagonal,
    OffDiagonal,
}

/// `sqrt((1/n) Σ_j ‖A_j − B_j‖²)` over the selected entries.
///
/// Entries are read in the basis given by the columns of `basis`; the full
/// norm is basis independent.
pub fn hs_distance(
    a: &WignerField,
    b: &WignerField,
    part: DistancePart,
    basis: &Mat2,
) -> Result<f64> {
    b.ensure_same_grid(a.grid())?;
    let mut sum = 0.0;
    for (x, y) in a.values().iter().zip(b.values()) {
        let d = (*x - *y).conjugated(basis);
        sum += match part {
            DistancePart::All => d.hs_norm_sqr(),
            DistancePart::Diagonal => d.up * d.up + d.down * d.down,
            DistancePart::OffDiagonal => 2.0 * d.off.norm_sqr(),
        };
    }
    Ok(libm::sqrt(sum * a.grid().weight()))
}

/// Largest entry modulus of `A_j − B_j` over all nodes.
pub fn max_entry_distance(a: &WignerField, b: &WignerField) -> Result<f64> {
    b.ensure_same_grid(a.grid())?;
    Ok(a.max_abs_diff(b))
}

/// All distance measures at once.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Distances {
    pub all: f64,
    pub diagonal: f64,
    pub off_diagonal: f64,
    pub max_entry: f64,
}

pub fn distances(a: &WignerField, b: &WignerField, basis: &Mat2) -> Result<Distances> {
    Ok(Distances {
        all: hs_distance(a, b, DistancePart::All, basis)?,
        diagonal: hs_distance(a, b, DistancePart::Diagonal, basis)?,
        off_diagonal: hs_distance(a, b, DistancePart::OffDiagonal, basis)?,
        max_entry: max_entry_distance(a, b)?,
    })
}

pub fn bloch_curve(field: &WignerField) -> Vec<BlochVector> {
    field.values().iter().map(bloch).collect()
}

/// Least-squares line through `(t, log v)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecayFit {
    /// `−slope`; positive for decay.
    pub rate: f64,
    pub intercept: f64,
    /// Root-mean-square residual of the log values.
    pub residual: f64,
    /// Coefficient of determination of the semilog fit.
    pub r_squared: f64,
    /// Number of samples used.
    pub samples: usize,
}

/// Default fraction of trailing samples used by [`fit_decay_rate`].
pub const DEFAULT_FIT_WINDOW: f64 = 0.5;

/// Fits `v ≈ e^{intercept − rate·t}` on the last `window` fraction of samples.
pub fn fit_decay_rate(times: &[f64], values: &[f64], window: f64) -> Result<DecayFit> {
    if times.len() != values.len() {
        return Err(Error::LengthMismatch {
            expected: times.len(),
            found: values.len(),
        });
    }
    if !(window > 0.0 && window <= 1.0) {
        return Err(Error::InvalidParameter {
            name: "window",
            value: window,
        });
    }
    let len = times.len();
    let count = libm::ceil(window * len as f64) as usize;
    if count < 2 {
        return Err(Error::InvalidFit {
            reason: "fewer than two samples in the fit window",
        });
    }
    let start = len - count;
    let t = &times[start..];
    let v = &values[start..];
    if v.iter().any(|x| !(*x > 0.0)) {
        return Err(Error::InvalidFit {
            reason: "non-positive value in the fit window",
        });
    }
    let y: Vec<f64> = v.iter().map(|x| libm::log(*x)).collect();
    let m = count as f64;
    let tm = t.iter().sum::<f64>() / m;
    let ym = y.iter().sum::<f64>() / m;
    let mut stt = 0.0;
    let mut sty = 0.0;
    let mut syy = 0.0;
    for (ti, yi) in t.iter().zip(&y) {
        stt += (ti - tm) * (ti - tm);
        sty += (ti - tm) * (yi - ym);
        syy += (yi - ym) * (yi - ym);
    }
    if stt == 0.0 {
        return Err(Error::InvalidFit {
            reason: "all fit times coincide",
        });
    }
    let slope = sty / stt;
    let intercept = ym - slope * tm;
    let sse: f64 = t
        .iter()
        .zip(&y)
        .map(|(ti, yi)| {
            let r = yi - (intercept + slope * ti);
            r * r
        })
        .sum();
    let r_squared = if syy > 0.0 { 1.0 - sse / syy } else { 1.0 };
    Ok(DecayFit {
        rate: -slope,
        intercept,
        residual: libm::sqrt(sse / m),
        r_squared,
        samples: count,
    })
}

/// Observables sampled along a trajectory; all series share one length.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TrajectoryRecord {
    pub times: Vec<f64>,
    pub entropy: Vec<f64>,
    pub entropy_production: Vec<f64>,
    pub charges: Vec<ConservedCharges>,
    /// Distances to the target state, if one was given.
    pub distances: Vec<Distances>,
    pub snapshots: Vec<WignerField>,
}

impl TrajectoryRecord {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Samples `g` on a grid, for use with [`g_charge`].
pub fn sample_weight<F: Fn(f64) -> f64>(grid: &BrillouinGrid, g: F) -> Vec<f64> {
    grid.momenta().map(g).collect()
}
