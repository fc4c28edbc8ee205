//! Closed-form algebra for 2×2 complex matrices acting on spin space.
//!
//! [`HermitianMatrix2`] stores four real degrees of freedom and is therefore
//! Hermitian by construction. Products of Hermitian matrices are generally
//! not Hermitian, so intermediate expressions use the general [`Mat2`].

use core::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_complex::Complex64;

/// Complex scalar used throughout the crate.
pub type C64 = Complex64;

/// Eigenvalue splittings below this are treated as degenerate.
pub const DEGENERACY_THRESHOLD: f64 = 1e-14;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// A general complex 2×2 matrix, row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2(pub [[C64; 2]; 2]);

impl Mat2 {
    pub const ZERO: Mat2 = Mat2([[ZERO, ZERO], [ZERO, ZERO]]);
    pub const IDENTITY: Mat2 = Mat2([[ONE, ZERO], [ZERO, ONE]]);

    pub fn new(a: C64, b: C64, c: C64, d: C64) -> Self {
        Mat2([[a, b], [c, d]])
    }

    pub fn trace(&self) -> C64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn det(&self) -> C64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Mat2 {
        let m = &self.0;
        Mat2([
            [m[0][0].conj(), m[1][0].conj()],
            [m[0][1].conj(), m[1][1].conj()],
        ])
    }

    pub fn scale(&self, s: f64) -> Mat2 {
        let m = &self.0;
        Mat2([[m[0][0] * s, m[0][1] * s], [m[1][0] * s, m[1][1] * s]])
    }

    pub fn scale_c(&self, s: C64) -> Mat2 {
        let m = &self.0;
        Mat2([[m[0][0] * s, m[0][1] * s], [m[1][0] * s, m[1][1] * s]])
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Largest entry modulus of `M - M†`, zero for Hermitian input.
    pub fn hermiticity_defect(&self) -> f64 {
        (*self - self.adjoint()).max_abs()
    }

    /// `M + M†`, which is Hermitian for every `M`.
    pub fn plus_adjoint(&self) -> HermitianMatrix2 {
        let m = &self.0;
        HermitianMatrix2 {
            up: 2.0 * m[0][0].re,
            down: 2.0 * m[1][1].re,
            off: m[0][1] + m[1][0].conj(),
        }
    }

    /// The Hermitian part `(M + M†)/2`.
    pub fn hermitian_part(&self) -> HermitianMatrix2 {
        let h = self.plus_adjoint();
        h.scale(0.5)
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: [C64; 2]) -> [C64; 2] {
        let m = &self.0;
        [
            m[0][0] * v[0] + m[0][1] * v[1],
            m[1][0] * v[0] + m[1][1] * v[1],
        ]
    }

    /// Builds the matrix whose columns are `c0` and `c1`.
    pub fn from_columns(c0: [C64; 2], c1: [C64; 2]) -> Mat2 {
        Mat2([[c0[0], c1[0]], [c0[1], c1[1]]])
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, o: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &o.0);
        Mat2([
            [a[0][0] + b[0][0], a[0][1] + b[0][1]],
            [a[1][0] + b[1][0], a[1][1] + b[1][1]],
        ])
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, o: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &o.0);
        Mat2([
            [a[0][0] - b[0][0], a[0][1] - b[0][1]],
            [a[1][0] - b[1][0], a[1][1] - b[1][1]],
        ])
    }
}

impl Neg for Mat2 {
    type Output = Mat2;
    fn neg(self) -> Mat2 {
        self.scale(-1.0)
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &o.0);
        Mat2([
            [
                a[0][0] * b[0][0] + a[0][1] * b[1][0],
                a[0][0] * b[0][1] + a[0][1] * b[1][1],
            ],
            [
                a[1][0] * b[0][0] + a[1][1] * b[1][0],
                a[1][0] * b[0][1] + a[1][1] * b[1][1],
            ],
        ])
    }
}

impl AddAssign for Mat2 {
    fn add_assign(&mut self, o: Mat2) {
        *self = *self + o;
    }
}

impl SubAssign for Mat2 {
    fn sub_assign(&mut self, o: Mat2) {
        *self = *self - o;
    }
}

/// A 2×2 complex Hermitian matrix
///
/// ```text
/// [ up        off ]
/// [ conj(off) down ]
/// ```
///
/// `off` is the `|↑⟩⟨↓|` component.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct HermitianMatrix2 {
    pub up: f64,
    pub down: f64,
    pub off: C64,
}

impl HermitianMatrix2 {
    pub const ZERO: HermitianMatrix2 = HermitianMatrix2 {
        up: 0.0,
        down: 0.0,
        off: ZERO,
    };
    pub const IDENTITY: HermitianMatrix2 = HermitianMatrix2 {
        up: 1.0,
        down: 1.0,
        off: ZERO,
    };

    pub const fn new(up: f64, down: f64, off: C64) -> Self {
        HermitianMatrix2 { up, down, off }
    }

    pub const fn diagonal(up: f64, down: f64) -> Self {
        HermitianMatrix2 {
            up,
            down,
            off: ZERO,
        }
    }

    pub const fn scalar(c: f64) -> Self {
        HermitianMatrix2 {
            up: c,
            down: c,
            off: ZERO,
        }
    }

    pub const fn pauli_x() -> Self {
        HermitianMatrix2 {
            up: 0.0,
            down: 0.0,
            off: ONE,
        }
    }

    pub const fn pauli_y() -> Self {
        HermitianMatrix2 {
            up: 0.0,
            down: 0.0,
            off: C64 { re: 0.0, im: -1.0 },
        }
    }

    pub const fn pauli_z() -> Self {
        HermitianMatrix2 {
            up: 1.0,
            down: -1.0,
            off: ZERO,
        }
    }

    /// `scalar·1 + v·σ`.
    pub fn from_pauli(scalar: f64, v: [f64; 3]) -> Self {
        HermitianMatrix2 {
            up: scalar + v[2],
            down: scalar - v[2],
            off: C64::new(v[0], -v[1]),
        }
    }

    /// Returns `(scalar, v)` such that `self = scalar·1 + v·σ`.
    pub fn to_pauli(&self) -> (f64, [f64; 3]) {
        (
            0.5 * (self.up + self.down),
            [self.off.re, -self.off.im, 0.5 * (self.up - self.down)],
        )
    }

    /// Accepts a general matrix if it is Hermitian within `tol` (max-entry).
    pub fn from_mat(m: &Mat2, tol: f64) -> Option<Self> {
        if m.hermiticity_defect() > tol {
            return None;
        }
        Some(m.hermitian_part())
    }

    pub fn to_mat(&self) -> Mat2 {
        Mat2([
            [C64::new(self.up, 0.0), self.off],
            [self.off.conj(), C64::new(self.down, 0.0)],
        ])
    }

    pub fn trace(&self) -> f64 {
        self.up + self.down
    }

    pub fn det(&self) -> f64 {
        self.up * self.down - self.off.norm_sqr()
    }

    /// `1 - self`.
    pub fn complement(&self) -> Self {
        HermitianMatrix2 {
            up: 1.0 - self.up,
            down: 1.0 - self.down,
            off: -self.off,
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        HermitianMatrix2 {
            up: self.up * s,
            down: self.down * s,
            off: self.off * s,
        }
    }

    /// `self + s·other`.
    pub fn add_scaled(&self, s: f64, other: &Self) -> Self {
        HermitianMatrix2 {
            up: self.up + s * other.up,
            down: self.down + s * other.down,
            off: self.off + other.off * s,
        }
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.up.abs().max(self.down.abs()).max(self.off.norm())
    }

    /// Squared Hilbert–Schmidt norm `tr[M²]`.
    pub fn hs_norm_sqr(&self) -> f64 {
        self.up * self.up + self.down * self.down + 2.0 * self.off.norm_sqr()
    }

    /// `tr[self · other]`, real for two Hermitian matrices.
    pub fn trace_product(&self, other: &Self) -> f64 {
        self.up * other.up + self.down * other.down + 2.0 * (self.off * other.off.conj()).re
    }

    /// Eigenvalues `(ε↑, ε↓)` with `ε↑ ≥ ε↓`.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let (s, v) = self.to_pauli();
        let r = norm3(v);
        (s + r, s - r)
    }

    pub fn eig(&self) -> EigenDecomposition2 {
        eig2(self)
    }

    pub fn bloch(&self) -> BlochVector {
        bloch(self)
    }

    /// `U† · self · U`.
    pub fn conjugated(&self, u: &Mat2) -> Self {
        (u.adjoint() * self.to_mat() * *u).hermitian_part()
    }

    /// `−i[h, self]`, computed from the Pauli cross product so the result is
    /// exactly Hermitian and traceless.
    pub fn minus_i_commutator(h: &Self, w: &Self) -> Self {
        let (_, hv) = h.to_pauli();
        let (_, wv) = w.to_pauli();
        let c = cross(hv, wv);
        HermitianMatrix2::from_pauli(0.0, [2.0 * c[0], 2.0 * c[1], 2.0 * c[2]])
    }
}

impl Add for HermitianMatrix2 {
    type Output = HermitianMatrix2;
    fn add(self, o: Self) -> Self {
        HermitianMatrix2 {
            up: self.up + o.up,
            down: self.down + o.down,
            off: self.off + o.off,
        }
    }
}

impl Sub for HermitianMatrix2 {
    type Output = HermitianMatrix2;
    fn sub(self, o: Self) -> Self {
        HermitianMatrix2 {
            up: self.up - o.up,
            down: self.down - o.down,
            off: self.off - o.off,
        }
    }
}

impl Neg for HermitianMatrix2 {
    type Output = HermitianMatrix2;
    fn neg(self) -> Self {
        self.scale(-1.0)
    }
}

impl Mul<f64> for HermitianMatrix2 {
    type Output = HermitianMatrix2;
    fn mul(self, s: f64) -> Self {
        self.scale(s)
    }
}

impl AddAssign for HermitianMatrix2 {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl SubAssign for HermitianMatrix2 {
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl From<HermitianMatrix2> for Mat2 {
    fn from(h: HermitianMatrix2) -> Mat2 {
        h.to_mat()
    }
}

/// Spectral decomposition `ε↑ |↑⟩⟨↑| + ε↓ |↓⟩⟨↓|` with `ε↑ ≥ ε↓`.
///
/// Each eigenvector has its largest-magnitude component real and positive
/// (ties resolved toward the first component).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigenDecomposition2 {
    pub values: [f64; 2],
    pub vectors: [[C64; 2]; 2],
}

impl EigenDecomposition2 {
    pub fn up(&self) -> f64 {
        self.values[0]
    }

    pub fn down(&self) -> f64 {
        self.values[1]
    }

    /// Orthogonal projector onto eigenvector `index` (0 = ↑, 1 = ↓).
    pub fn projector(&self, index: usize) -> HermitianMatrix2 {
        projector(self.vectors[index])
    }

    /// Applies a real function to the eigenvalues.
    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> HermitianMatrix2 {
        self.projector(0).scale(f(self.values[0])) + self.projector(1).scale(f(self.values[1]))
    }

    pub fn reconstruct(&self) -> HermitianMatrix2 {
        self.map(|x| x)
    }

    /// Unitary whose columns are the eigenvectors.
    pub fn unitary(&self) -> Mat2 {
        Mat2::from_columns(self.vectors[0], self.vectors[1])
    }
}

/// `|v⟩⟨v|`.
pub fn projector(v: [C64; 2]) -> HermitianMatrix2 {
    HermitianMatrix2 {
        up: v[0].norm_sqr(),
        down: v[1].norm_sqr(),
        off: v[0] * v[1].conj(),
    }
}

/// `⟨a|b⟩`.
pub fn inner(a: [C64; 2], b: [C64; 2]) -> C64 {
    a[0].conj() * b[0] + a[1].conj() * b[1]
}

fn normalize_phase(v: [C64; 2]) -> [C64; 2] {
    let (n0, n1) = (v[0].norm(), v[1].norm());
    let pivot = if n0 >= n1 { v[0] } else { v[1] };
    let len = libm::sqrt(v[0].norm_sqr() + v[1].norm_sqr());
    // Multiply by conj(pivot)/|pivot| to make the pivot real positive.
    let phase = pivot.conj() / (pivot.norm() * len);
    [v[0] * phase, v[1] * phase]
}

/// Closed-form eigendecomposition of a 2×2 Hermitian matrix.
pub fn eig2(m: &HermitianMatrix2) -> EigenDecomposition2 {
    let (s, v) = m.to_pauli();
    let r = norm3(v);
    if 2.0 * r < DEGENERACY_THRESHOLD {
        return EigenDecomposition2 {
            values: [s, s],
            vectors: [[ONE, ZERO], [ZERO, ONE]],
        };
    }
    let n = [v[0] / r, v[1] / r, v[2] / r];
    // +1 eigenvector of n·σ, picking the better-conditioned of the two forms.
    let up = if n[2] >= 0.0 {
        [C64::new(1.0 + n[2], 0.0), C64::new(n[0], n[1])]
    } else {
        [C64::new(n[0], -n[1]), C64::new(1.0 - n[2], 0.0)]
    };
    let up = normalize_phase(up);
    let down = normalize_phase([-up[1].conj(), up[0].conj()]);
    EigenDecomposition2 {
        values: [s + r, s - r],
        vectors: [up, down],
    }
}

/// Bloch coordinates `r_i = tr[m σ_i]`, so that `m = ½(1 + r·σ)` for unit trace.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub fn norm(&self) -> f64 {
        norm3([self.x, self.y, self.z])
    }

    /// `½(1 + r·σ)`.
    pub fn to_matrix(&self) -> HermitianMatrix2 {
        HermitianMatrix2::from_pauli(0.5, [0.5 * self.x, 0.5 * self.y, 0.5 * self.z])
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }
}

pub fn bloch(m: &HermitianMatrix2) -> BlochVector {
    BlochVector {
        x: 2.0 * m.off.re,
        y: -2.0 * m.off.im,
        z: m.up - m.down,
    }
}

/// `exp(−i h s) · m · exp(+i h s)`.
///
/// With `h = h₀ + |h| n·σ` the conjugation rotates the Bloch vector of `m`
/// about `n` by the angle `2|h|s` (Rodrigues); the scalar part of `h` only
/// contributes a global phase.
pub fn conjugate_by_expi(m: &HermitianMatrix2, h: &HermitianMatrix2, s: f64) -> HermitianMatrix2 {
    let (_, hv) = h.to_pauli();
    let hn = norm3(hv);
    let angle = 2.0 * hn * s;
    if hn == 0.0 || angle == 0.0 {
        return *m;
    }
    let n = [hv[0] / hn, hv[1] / hn, hv[2] / hn];
    let (m0, r) = m.to_pauli();
    let (sin, cos) = (libm::sin(angle), libm::cos(angle));
    let nxr = cross(n, r);
    let ndr = dot(n, r);
    let rot = [
        r[0] * cos + nxr[0] * sin + n[0] * ndr * (1.0 - cos),
        r[1] * cos + nxr[1] * sin + n[1] * ndr * (1.0 - cos),
        r[2] * cos + nxr[2] * sin + n[2] * ndr * (1.0 - cos),
    ];
    HermitianMatrix2::from_pauli(m0, rot)
}

/// The unitary `exp(−i h s)` in closed form.
pub fn expi(h: &HermitianMatrix2, s: f64) -> Mat2 {
    let (h0, hv) = h.to_pauli();
    let hn = norm3(hv);
    let phase = C64::new(libm::cos(h0 * s), -libm::sin(h0 * s));
    if hn == 0.0 {
        return Mat2::IDENTITY.scale_c(phase);
    }
    let (sin, cos) = (libm::sin(hn * s), libm::cos(hn * s));
    // cos(θ)·1 − i sin(θ) n·σ
    let n = [hv[0] / hn, hv[1] / hn, hv[2] / hn];
    let u = Mat2([
        [
            C64::new(cos, -sin * n[2]),
            C64::new(-sin * n[1], -sin * n[0]),
        ],
        [C64::new(sin * n[1], -sin * n[0]), C64::new(cos, sin * n[2])],
    ]);
    u.scale_c(phase)
}

pub(crate) fn norm3(v: [f64; 3]) -> f64 {
    libm::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2])
}

pub(crate) fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}
