//! Closed-form complex linear algebra on 2x2 and 3x3 matrices, plus a fixed
//! RK4 step. Everything else in the crate is built on these primitives.
//!
//! Basis conventions are fixed once, globally:
//! * qubit matrices index the excited-state doublet `(e, f)`, with
//!   `sigma_z = |f><f| - |e><e|` (so `sigma_z = diag(-1, +1)`);
//! * qutrit matrices index `(g, e, f)`.
//!
//! All functions are pure; none mutate shared state.

use num_complex::Complex;
use thiserror::Error;

use crate::scalar::Real;

/// Complex number over the generic scalar.
pub type C<T> = Complex<T>;

/// Eigenvalue coalescence threshold, relative to `max(1, ||M||)`.
const DEGENERACY_TOL: f64 = 1e-12;

/// Smallest `|det|` accepted by the matrix logarithm.
const SINGULAR_TOL: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum MatError {
    /// Determinant magnitude below threshold; no logarithm exists.
    #[error("matrix is numerically singular")]
    Singular,
    /// Coalescing eigenvalues with a non-scalar residual: the matrix is not
    /// diagonalizable. For a propagator this signals an exceptional point.
    #[error("matrix is defective (coalescing eigenvalues, non-scalar residual)")]
    Defective,
}

// ---------------------------------------------------------------------------
// 2x2 matrices
// ---------------------------------------------------------------------------

/// Dense 2x2 complex matrix in the `(e, f)` basis: row/column 0 is `|e>`,
/// row/column 1 is `|f>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2<T> {
    pub m: [[C<T>; 2]; 2],
}

impl<T: Real> Mat2<T> {
    pub fn from_rows(m: [[C<T>; 2]; 2]) -> Self {
        Mat2 { m }
    }

    pub fn zero() -> Self {
        let z = C::new(T::zero(), T::zero());
        Mat2 {
            m: [[z, z], [z, z]],
        }
    }

    pub fn identity() -> Self {
        let z = C::new(T::zero(), T::zero());
        let o = C::new(T::one(), T::zero());
        Mat2 {
            m: [[o, z], [z, o]],
        }
    }

    pub fn diag(a: C<T>, b: C<T>) -> Self {
        let z = C::new(T::zero(), T::zero());
        Mat2 {
            m: [[a, z], [z, b]],
        }
    }

    /// `sigma_x = |e><f| + |f><e|`.
    pub fn sigma_x() -> Self {
        let z = C::new(T::zero(), T::zero());
        let o = C::new(T::one(), T::zero());
        Mat2 {
            m: [[z, o], [o, z]],
        }
    }

    /// `sigma_y` in the `(e, f)` ordering, chosen so that the Pauli
    /// decomposition below is its inverse.
    pub fn sigma_y() -> Self {
        let z = C::new(T::zero(), T::zero());
        let i = C::new(T::zero(), T::one());
        Mat2 {
            m: [[z, -i], [i, z]],
        }
    }

    /// `sigma_z = |f><f| - |e><e| = diag(-1, +1)`.
    pub fn sigma_z() -> Self {
        let z = C::new(T::zero(), T::zero());
        let o = C::new(T::one(), T::zero());
        Mat2 {
            m: [[-o, z], [z, o]],
        }
    }

    pub fn trace(&self) -> C<T> {
        self.m[0][0] + self.m[1][1]
    }

    pub fn det(&self) -> C<T> {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Mat2 {
            m: [
                [self.m[0][0].conj(), self.m[1][0].conj()],
                [self.m[0][1].conj(), self.m[1][1].conj()],
            ],
        }
    }

    /// Entrywise complex conjugate (no transpose).
    pub fn conj(&self) -> Self {
        Mat2 {
            m: [
                [self.m[0][0].conj(), self.m[0][1].conj()],
                [self.m[1][0].conj(), self.m[1][1].conj()],
            ],
        }
    }

    pub fn scaled(&self, z: C<T>) -> Self {
        let mut out = *self;
        for row in out.m.iter_mut() {
            for e in row.iter_mut() {
                *e = *e * z;
            }
        }
        out
    }

    /// Largest entry magnitude.
    pub fn max_norm(&self) -> T {
        let mut best = T::zero();
        for row in &self.m {
            for e in row {
                let n = e.norm_sqr();
                if n > best {
                    best = n;
                }
            }
        }
        best.sqrt()
    }

    pub fn max_diff(&self, other: &Self) -> T {
        (*self - *other).max_norm()
    }

    pub fn is_finite(&self) -> bool {
        self.m
            .iter()
            .flatten()
            .all(|e| e.re.is_finite() && e.im.is_finite())
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: [C<T>; 2]) -> [C<T>; 2] {
        [
            self.m[0][0] * v[0] + self.m[0][1] * v[1],
            self.m[1][0] * v[0] + self.m[1][1] * v[1],
        ]
    }

    /// Similarity transform into the `sigma_x` eigenbasis
    /// `|+x> = (|f> + |e>)/sqrt(2)`, `|-x> = (|f> - |e>)/sqrt(2)`;
    /// index 0 is `+x`, index 1 is `-x`.
    pub fn to_x_basis(&self) -> Self {
        let h = T::of(0.5);
        let [[a, b], [c, d]] = self.m;
        Mat2 {
            m: [
                [(a + b + c + d) * h, (-a + b - c + d) * h],
                [(-a - b + c + d) * h, (a - b - c + d) * h],
            ],
        }
    }
}

impl<T: Real> std::ops::Add for Mat2<T> {
    type Output = Mat2<T>;
    fn add(self, rhs: Mat2<T>) -> Mat2<T> {
        let mut out = self;
        for (r, row) in out.m.iter_mut().enumerate() {
            for (c, e) in row.iter_mut().enumerate() {
                *e = *e + rhs.m[r][c];
            }
        }
        out
    }
}

impl<T: Real> std::ops::Sub for Mat2<T> {
    type Output = Mat2<T>;
    fn sub(self, rhs: Mat2<T>) -> Mat2<T> {
        let mut out = self;
        for (r, row) in out.m.iter_mut().enumerate() {
            for (c, e) in row.iter_mut().enumerate() {
                *e = *e - rhs.m[r][c];
            }
        }
        out
    }
}

impl<T: Real> std::ops::Neg for Mat2<T> {
    type Output = Mat2<T>;
    fn neg(self) -> Mat2<T> {
        let mut out = self;
        for row in out.m.iter_mut() {
            for e in row.iter_mut() {
                *e = -*e;
            }
        }
        out
    }
}

impl<T: Real> std::ops::Mul for Mat2<T> {
    type Output = Mat2<T>;
    fn mul(self, rhs: Mat2<T>) -> Mat2<T> {
        let a = &self.m;
        let b = &rhs.m;
        Mat2 {
            m: [
                [
                    a[0][0] * b[0][0] + a[0][1] * b[1][0],
                    a[0][0] * b[0][1] + a[0][1] * b[1][1],
                ],
                [
                    a[1][0] * b[0][0] + a[1][1] * b[1][0],
                    a[1][0] * b[0][1] + a[1][1] * b[1][1],
                ],
            ],
        }
    }
}

// ---------------------------------------------------------------------------
// Pauli decomposition
// ---------------------------------------------------------------------------

/// Coefficients of `M = h0 I + hx sigma_x + hy sigma_y + hz sigma_z`.
///
/// For a Hamiltonian the components carry rad/us.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliCoeffs<T> {
    pub h0: C<T>,
    pub hx: C<T>,
    pub hy: C<T>,
    pub hz: C<T>,
}

impl<T: Real> PauliCoeffs<T> {
    /// `hx^2 + hy^2 + hz^2` (complex in general).
    pub fn h_sq(&self) -> C<T> {
        self.hx * self.hx + self.hy * self.hy + self.hz * self.hz
    }

    /// Largest component magnitude among `(hx, hy, hz)`.
    pub fn max_component(&self) -> T {
        self.hx.norm().max(self.hy.norm()).max(self.hz.norm())
    }

    /// Rebuild the matrix; exact inverse of [`pauli_decompose`].
    pub fn to_matrix(&self) -> Mat2<T> {
        let i = C::new(T::zero(), T::one());
        Mat2 {
            m: [
                [self.h0 - self.hz, self.hx - i * self.hy],
                [self.hx + i * self.hy, self.h0 + self.hz],
            ],
        }
    }
}

/// Decompose a 2x2 matrix onto `{I, sigma_x, sigma_y, sigma_z}`.
///
/// With the `(e, f)` ordering and `sigma_z = diag(-1, +1)`:
/// `h0 = tr(M)/2`, `hx = (M01 + M10)/2`, `hy = i (M01 - M10)/2`,
/// `hz = (M11 - M00)/2`.
pub fn pauli_decompose<T: Real>(m: &Mat2<T>) -> PauliCoeffs<T> {
    let half = T::of(0.5);
    let i = C::new(T::zero(), T::one());
    PauliCoeffs {
        h0: (m.m[0][0] + m.m[1][1]) * half,
        hx: (m.m[0][1] + m.m[1][0]) * half,
        hy: i * (m.m[0][1] - m.m[1][0]) * half,
        hz: (m.m[1][1] - m.m[0][0]) * half,
    }
}

// ---------------------------------------------------------------------------
// Matrix exponential / logarithm / eigensystem
// ---------------------------------------------------------------------------

/// `cosh(w)` and `sinh(w)/w` from `w^2`, branch-free: both are even in `w`,
/// so either square root works.
fn cosh_sinhc<T: Real>(w_sq: C<T>) -> (C<T>, C<T>) {
    let one = C::new(T::one(), T::zero());
    if w_sq.norm() < T::of(1e-8) {
        // sinh(w)/w = 1 + w^2/6 + w^4/120 + O(w^6)
        let c6 = T::of(1.0 / 6.0);
        let c120 = T::of(1.0 / 120.0);
        let ch = one + w_sq * T::of(0.5) + w_sq * w_sq * T::of(1.0 / 24.0);
        let shc = one + w_sq * c6 + w_sq * w_sq * c120;
        return (ch, shc);
    }
    let w = w_sq.sqrt();
    (w.cosh(), w.sinh() / w)
}

/// Matrix exponential `e^M`, in closed form.
///
/// The trace is factored out as a scalar exponential; the traceless part `D`
/// satisfies `D^2 = w^2 I`, giving `e^M = e^{tr M / 2} (cosh(w) I + sinh(w)/w D)`.
pub fn expm2<T: Real>(m: &Mat2<T>) -> Mat2<T> {
    let half = T::of(0.5);
    let s = m.trace() * half;
    let d = *m - Mat2::diag(s, s);
    // w^2 = hx^2 + hy^2 + hz^2 = -det(D) for traceless D
    let w_sq = d.m[0][1] * d.m[1][0] - d.m[0][0] * d.m[1][1];
    let (ch, shc) = cosh_sinhc(w_sq);
    let es = s.exp();
    let mut out = Mat2::zero();
    for r in 0..2 {
        for c in 0..2 {
            let id = if r == c {
                ch
            } else {
                C::new(T::zero(), T::zero())
            };
            out.m[r][c] = es * (id + shc * d.m[r][c]);
        }
    }
    out
}

/// Principal matrix logarithm of an invertible 2x2 matrix.
///
/// Eigenvalue logs take the principal branch (imaginary part in `(-pi, pi]`),
/// so `expm2(logm2(M)) == M` to roundoff. Fails with [`MatError::Singular`]
/// below the determinant floor and with [`MatError::Defective`] when the
/// eigenvalues coalesce around a non-scalar matrix.
pub fn logm2<T: Real>(m: &Mat2<T>) -> Result<Mat2<T>, MatError> {
    if m.det().norm() <= T::of(SINGULAR_TOL) {
        return Err(MatError::Singular);
    }
    let half = T::of(0.5);
    let scale = T::one().max(m.max_norm());
    let tol = T::of(DEGENERACY_TOL) * scale;

    let s = m.trace() * half;
    let d = *m - Mat2::diag(s, s);
    let w_sq = d.m[0][1] * d.m[1][0] - d.m[0][0] * d.m[1][1];
    let w = w_sq.sqrt();

    let two = T::of(2.0);
    if w.norm() * two < tol {
        if d.max_norm() <= tol {
            // scalar matrix: log is a scalar log
            let l = s.ln();
            return Ok(Mat2::diag(l, l));
        }
        return Err(MatError::Defective);
    }

    let l1 = (s + w).ln();
    let l2 = (s - w).ln();
    let alpha = (l1 + l2) * half;

    // beta = (log l1 - log l2) / (2w); series form when the eigenvalues are
    // close AND on the same side of the branch cut.
    let z = w / s;
    let crosses_cut = s.re < T::zero() && ((s + w).im >= T::zero()) != ((s - w).im >= T::zero());
    let beta = if z.norm() < T::of(1e-4) && !crosses_cut {
        let z2 = z * z;
        let one = C::new(T::one(), T::zero());
        (one + z2 * T::of(1.0 / 3.0) + z2 * z2 * T::of(0.2)) / s
    } else {
        (l1 - l2) / (w * two)
    };

    let mut out = Mat2::zero();
    for r in 0..2 {
        for c in 0..2 {
            let id = if r == c {
                alpha
            } else {
                C::new(T::zero(), T::zero())
            };
            out.m[r][c] = id + beta * d.m[r][c];
        }
    }
    Ok(out)
}

/// Eigensystem of a 2x2 matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eig2<T> {
    /// Eigenvalues sorted by real part, ties broken by imaginary part.
    pub values: [C<T>; 2],
    /// Normalized eigenvectors, `vectors[k]` belonging to `values[k]`.
    pub vectors: [[C<T>; 2]; 2],
    /// Set when the eigenvalues coalesce around a non-scalar matrix.
    pub defective: bool,
}

/// Closed-form eigensystem via the numerically stable quadratic formula
/// (large root by sign-matched discriminant, small root from the product).
pub fn eig2<T: Real>(m: &Mat2<T>) -> Eig2<T> {
    let half = T::of(0.5);
    let [[a, b], [c, d]] = m.m;
    let s = (a + d) * half;
    let dif = (a - d) * half;
    let mut w = (dif * dif + b * c).sqrt();
    // align w with s so that s + w has the larger magnitude
    if (s.conj() * w).re < T::zero() {
        w = -w;
    }
    let det = m.det();
    let big = s + w;
    let small = if big.norm() > T::zero() {
        det / big
    } else {
        s - w
    };

    let scale = T::one().max(m.max_norm());
    let tol = T::of(DEGENERACY_TOL) * scale;
    let gap = (big - small).norm();
    let off_scalar = (*m - Mat2::diag(s, s)).max_norm();
    let defective = gap < tol && off_scalar > tol;

    let (l1, l2) = if (big.re, big.im) <= (small.re, small.im) {
        (big, small)
    } else {
        (small, big)
    };

    let vec_for = |l: C<T>| -> [C<T>; 2] {
        let u1 = [b, l - a];
        let u2 = [l - d, c];
        let n1 = u1[0].norm_sqr() + u1[1].norm_sqr();
        let n2 = u2[0].norm_sqr() + u2[1].norm_sqr();
        let u = if n1 >= n2 { u1 } else { u2 };
        let n = (u[0].norm_sqr() + u[1].norm_sqr()).sqrt();
        if n > T::zero() {
            [u[0] / n, u[1] / n]
        } else {
            // diagonal matrix: eigenvectors are the basis vectors
            let z = C::new(T::zero(), T::zero());
            let o = C::new(T::one(), T::zero());
            if (l - a).norm() <= (l - d).norm() {
                [o, z]
            } else {
                [z, o]
            }
        }
    };

    Eig2 {
        values: [l1, l2],
        vectors: [vec_for(l1), vec_for(l2)],
        defective,
    }
}

// ---------------------------------------------------------------------------
// 3x3 matrices
// ---------------------------------------------------------------------------

/// Dense 3x3 complex matrix in the `(g, e, f)` basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat3<T> {
    pub m: [[C<T>; 3]; 3],
}

impl<T: Real> Mat3<T> {
    pub fn from_rows(m: [[C<T>; 3]; 3]) -> Self {
        Mat3 { m }
    }

    pub fn zero() -> Self {
        let z = C::new(T::zero(), T::zero());
        Mat3 { m: [[z; 3]; 3] }
    }

    pub fn identity() -> Self {
        let mut out = Self::zero();
        for k in 0..3 {
            out.m[k][k] = C::new(T::one(), T::zero());
        }
        out
    }

    /// `scale * |r><c|`.
    pub fn unit(r: usize, c: usize, scale: C<T>) -> Self {
        let mut out = Self::zero();
        out.m[r][c] = scale;
        out
    }

    pub fn trace(&self) -> C<T> {
        self.m[0][0] + self.m[1][1] + self.m[2][2]
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zero();
        for r in 0..3 {
            for c in 0..3 {
                out.m[r][c] = self.m[c][r].conj();
            }
        }
        out
    }

    pub fn scaled(&self, z: C<T>) -> Self {
        let mut out = *self;
        for row in out.m.iter_mut() {
            for e in row.iter_mut() {
                *e = *e * z;
            }
        }
        out
    }

    pub fn scaled_re(&self, x: T) -> Self {
        self.scaled(C::new(x, T::zero()))
    }

    pub fn max_norm(&self) -> T {
        let mut best = T::zero();
        for row in &self.m {
            for e in row {
                let n = e.norm_sqr();
                if n > best {
                    best = n;
                }
            }
        }
        best.sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.m
            .iter()
            .flatten()
            .all(|e| e.re.is_finite() && e.im.is_finite())
    }

    /// `(M + M^dagger)/2`.
    pub fn hermitized(&self) -> Self {
        let half = T::of(0.5);
        let adj = self.adjoint();
        let mut out = Self::zero();
        for r in 0..3 {
            for c in 0..3 {
                out.m[r][c] = (self.m[r][c] + adj.m[r][c]) * half;
            }
        }
        out
    }

    /// Largest deviation from Hermiticity, `max |M - M^dagger|`.
    pub fn hermiticity_defect(&self) -> T {
        (*self - self.adjoint()).max_norm()
    }
}

impl<T: Real> std::ops::Add for Mat3<T> {
    type Output = Mat3<T>;
    fn add(self, rhs: Mat3<T>) -> Mat3<T> {
        let mut out = self;
        for (r, row) in out.m.iter_mut().enumerate() {
            for (c, e) in row.iter_mut().enumerate() {
                *e = *e + rhs.m[r][c];
            }
        }
        out
    }
}

impl<T: Real> std::ops::Sub for Mat3<T> {
    type Output = Mat3<T>;
    fn sub(self, rhs: Mat3<T>) -> Mat3<T> {
        let mut out = self;
        for (r, row) in out.m.iter_mut().enumerate() {
            for (c, e) in row.iter_mut().enumerate() {
                *e = *e - rhs.m[r][c];
            }
        }
        out
    }
}

impl<T: Real> std::ops::Mul for Mat3<T> {
    type Output = Mat3<T>;
    fn mul(self, rhs: Mat3<T>) -> Mat3<T> {
        let mut out = Mat3::zero();
        for r in 0..3 {
            for c in 0..3 {
                let mut acc = C::new(T::zero(), T::zero());
                for k in 0..3 {
                    acc = acc + self.m[r][k] * rhs.m[k][c];
                }
                out.m[r][c] = acc;
            }
        }
        out
    }
}

/// `[a, b] = ab - ba`.
pub fn commutator3<T: Real>(a: &Mat3<T>, b: &Mat3<T>) -> Mat3<T> {
    *a * *b - *b * *a
}

/// Smallest eigenvalue of a Hermitian 3x3 matrix (trigonometric closed form).
pub fn min_eigenvalue_hermitian<T: Real>(m: &Mat3<T>) -> T {
    let third = T::of(1.0 / 3.0);
    let q = m.trace().re * third;
    let p1 = m.m[0][1].norm_sqr() + m.m[0][2].norm_sqr() + m.m[1][2].norm_sqr();
    let d0 = m.m[0][0].re - q;
    let d1 = m.m[1][1].re - q;
    let d2 = m.m[2][2].re - q;
    let p2 = d0 * d0 + d1 * d1 + d2 * d2 + T::of(2.0) * p1;
    if p2 <= T::zero() {
        return q; // scalar matrix
    }
    let p = (p2 * T::of(1.0 / 6.0)).sqrt();
    let mut b = *m;
    for k in 0..3 {
        b.m[k][k] = b.m[k][k] - C::new(q, T::zero());
    }
    let b = b.scaled_re(T::one() / p);
    let det_b = b.m[0][0] * (b.m[1][1] * b.m[2][2] - b.m[1][2] * b.m[2][1])
        - b.m[0][1] * (b.m[1][0] * b.m[2][2] - b.m[1][2] * b.m[2][0])
        + b.m[0][2] * (b.m[1][0] * b.m[2][1] - b.m[1][1] * b.m[2][0]);
    let r = (det_b.re * T::of(0.5)).max(-T::one()).min(T::one());
    let phi = r.acos() * third;
    // smallest root of the characteristic cubic
    q + T::of(2.0) * p * (phi + T::of(2.0) * T::PI() * third).cos()
}

// ---------------------------------------------------------------------------
// RK4
// ---------------------------------------------------------------------------

/// One classical RK4 step for a matrix ODE `drho/dt = deriv(t, rho)`.
///
/// The output is re-Hermitized, `rho <- (rho + rho^dagger)/2`, to suppress
/// drift when integrating density matrices.
pub fn rk4_step<T, F>(deriv: F, rho: &Mat3<T>, t: T, dt: T) -> Mat3<T>
where
    T: Real,
    F: Fn(T, &Mat3<T>) -> Mat3<T>,
{
    debug_assert!(dt > T::zero());
    let half = T::of(0.5);
    let sixth = T::of(1.0 / 6.0);
    let two = T::of(2.0);

    let k1 = deriv(t, rho);
    let k2 = deriv(t + dt * half, &(*rho + k1.scaled_re(dt * half)));
    let k3 = deriv(t + dt * half, &(*rho + k2.scaled_re(dt * half)));
    let k4 = deriv(t + dt, &(*rho + k3.scaled_re(dt)));

    let incr = (k1 + k2.scaled_re(two) + k3.scaled_re(two) + k4).scaled_re(dt * sixth);
    (*rho + incr).hermitized()
}

// ---------------------------------------------------------------------------
