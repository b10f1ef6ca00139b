//! Saturation as a linear differential inclusion, and the Ξ certificate matrix
//! shared by the learner and the verifier.
//!
//! For a sign pattern `E_j` (diagonal, 0/1) and its complement `E_j⁻ = I − E_j`,
//!
//! ```text
//!     ⎡ τQ       0       Mᵀ ⎤
//! Ξ = ⎢ 0     (1−τ)I     0  ⎥ ,   M = AQ + B E_j Y + B E_j⁻ Z.
//!     ⎣ M        0       Q  ⎦
//! ```

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::model::InputBox;

/// Largest admissible actuator count for sign enumeration.
pub const MAX_SIGN_ACTUATORS: usize = 16;

/// All `2^p` diagonal 0/1 patterns, binary ordered: bit `i` of `j` is `E_j[i, i]`.
#[derive(Clone, Debug, PartialEq)]
pub struct SignMatrixSet {
    p: usize,
    diagonals: Vec<DVector<f64>>,
}

impl SignMatrixSet {
    pub fn p(&self) -> usize {
        self.p
    }

    pub fn len(&self) -> usize {
        self.diagonals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diagonals.is_empty()
    }

    pub fn diagonal(&self, j: usize) -> &DVector<f64> {
        &self.diagonals[j]
    }

    /// `E_j` as a dense p×p matrix.
    pub fn matrix(&self, j: usize) -> DMatrix<f64> {
        DMatrix::from_diagonal(&self.diagonals[j])
    }

    /// `E_j⁻ = I − E_j`.
    pub fn complement(&self, j: usize) -> DMatrix<f64> {
        DMatrix::from_diagonal(&self.diagonals[j].map(|v| 1.0 - v))
    }
}

pub fn enumerate_sign_matrices(p: usize) -> Result<SignMatrixSet> {
    if p == 0 || p > MAX_SIGN_ACTUATORS {
        return Err(Error::Config(format!(
            "sign enumeration needs 1 <= p <= {MAX_SIGN_ACTUATORS}, got {p}"
        )));
    }
    let diagonals = (0..1usize << p)
        .map(|j| DVector::from_fn(p, |i, _| ((j >> i) & 1) as f64))
        .collect();
    Ok(SignMatrixSet { p, diagonals })
}

/// Componentwise `sign(u_i) min(ū_i, |u_i|)`.
pub fn saturate(u: &DVector<f64>, bounds: &InputBox) -> DVector<f64> {
    u.zip_map(bounds.u_max(), |v, m| v.clamp(-m, m))
}

/// Symmetric 3n×3n certificate matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct XiMatrix(DMatrix<f64>);

impl XiMatrix {
    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.0
    }

    pub fn min_eig(&self) -> f64 {
        sym_min_eig(&self.0)
    }
}

fn check_shape(context: &'static str, m: &DMatrix<f64>, rows: usize, cols: usize) -> Result<()> {
    if m.shape() != (rows, cols) {
        return Err(Error::Dimension {
            context,
            expected: format!("{rows}x{cols}"),
            got: format!("{}x{}", m.nrows(), m.ncols()),
        });
    }
    Ok(())
}

/// Assembles Ξ for one Jacobian pair and sign pattern `e` (p×p diagonal).
#[allow(clippy::too_many_arguments)]
pub fn build_xi(
    q: &DMatrix<f64>,
    y: &DMatrix<f64>,
    z: &DMatrix<f64>,
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    e: &DMatrix<f64>,
    tau: f64,
) -> Result<XiMatrix> {
    let n = q.nrows();
    let p = y.nrows();
    check_shape("Xi: Q", q, n, n)?;
    check_shape("Xi: Y", y, p, n)?;
    check_shape("Xi: Z", z, p, n)?;
    check_shape("Xi: A", a, n, n)?;
    check_shape("Xi: B", b, n, p)?;
    check_shape("Xi: E", e, p, p)?;
    if !(0.0..=1.0).contains(&tau) {
        return Err(Error::Config(format!("tau must lie in [0, 1], got {tau}")));
    }
    let e_bar = DMatrix::identity(p, p) - e;
    let m = a * q + b * (e * y + e_bar * z);
    Ok(XiMatrix(assemble(q, &m, tau)))
}

/// Upper triangle first, then mirrored.
fn assemble(q: &DMatrix<f64>, m: &DMatrix<f64>, tau: f64) -> DMatrix<f64> {
    let n = q.nrows();
    let mut xi = DMatrix::zeros(3 * n, 3 * n);
    for c in 0..n {
        for r in 0..=c {
            xi[(r, c)] = tau * q[(r, c)];
            xi[(2 * n + r, 2 * n + c)] = q[(r, c)];
        }
        xi[(n + c, n + c)] = 1.0 - tau;
        for r in 0..n {
            // (1,3) block is Mᵀ.
            xi[(r, 2 * n + c)] = m[(c, r)];
        }
    }
    for c in 0..3 * n {
        for r in (c + 1)..3 * n {
            xi[(r, c)] = xi[(c, r)];
        }
    }
    xi
}

/// Precomputed candidate `(Q, Y, Z)` for fast evaluation of `min_j λ_min(Ξ_j)`.
#[derive(Clone, Debug)]
pub struct XiEvaluator {
    q: DMatrix<f64>,
    tau: f64,
    /// `E_j Y + E_j⁻ Z` per sign pattern.
    w: Vec<DMatrix<f64>>,
}

impl XiEvaluator {
    pub fn new(
        q: &DMatrix<f64>,
        y: &DMatrix<f64>,
        z: &DMatrix<f64>,
        signs: &SignMatrixSet,
        tau: f64,
    ) -> Result<Self> {
        let n = q.nrows();
        let p = signs.p();
        check_shape("candidate Q", q, n, n)?;
        check_shape("candidate Y", y, p, n)?;
        check_shape("candidate Z", z, p, n)?;
        if !(0.0..=1.0).contains(&tau) {
            return Err(Error::Config(format!("tau must lie in [0, 1], got {tau}")));
        }
        let w = (0..signs.len())
            .map(|j| {
                let d = signs.diagonal(j);
                DMatrix::from_fn(p, n, |r, c| d[r] * y[(r, c)] + (1.0 - d[r]) * z[(r, c)])
            })
            .collect();
        Ok(Self { q: q.clone(), tau, w })
    }

    pub fn sign_count(&self) -> usize {
        self.w.len()
    }

    /// `‖Q‖`, the sensitivity of every `Ξ_j` to a change in `A`.
    pub fn q_norm(&self) -> f64 {
        op_norm(&self.q)
    }

    /// `max_j ‖E_j Y + E_j⁻ Z‖`, the sensitivity of `min_j Ξ_j` to a change in `B`.
    pub fn gain_norm(&self) -> f64 {
        self.w.iter().map(op_norm).fold(0.0, f64::max)
    }

    /// `λ_min(Ξ_j(A, B))`.
    pub fn eval(&self, a: &DMatrix<f64>, b: &DMatrix<f64>, j: usize) -> f64 {
        let m = a * &self.q + b * &self.w[j];
        sym_min_eig(&assemble(&self.q, &m, self.tau))
    }

    /// Minimum over all sign patterns; ties go to the lowest `j`.
    pub fn min_over_signs(&self, a: &DMatrix<f64>, b: &DMatrix<f64>) -> (f64, usize) {
        let aq = a * &self.q;
        let mut best = (f64::INFINITY, 0);
        for (j, w) in self.w.iter().enumerate() {
            let m = &aq + b * w;
            let v = sym_min_eig(&assemble(&self.q, &m, self.tau));
            if v < best.0 {
                best = (v, j);
            }
        }
        best
    }
}

/// Smallest eigenvalue of a symmetric matrix; fails on asymmetric input.
pub fn min_eig(m: &DMatrix<f64>) -> Result<f64> {
    if !m.is_square() {
        return Err(Error::Contract(format!("min_eig needs a square matrix, got {}x{}", m.nrows(), m.ncols())));
    }
    let scale = m.amax().max(1.0);
    for c in 0..m.ncols() {
        for r in (c + 1)..m.nrows() {
            if (m[(r, c)] - m[(c, r)]).abs() > 1e-9 * scale {
                return Err(Error::Contract(format!(
                    "min_eig input is not symmetric at ({r}, {c}): {} vs {}",
                    m[(r, c)],
                    m[(c, r)]
                )));
            }
        }
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::Contract("min_eig input has non-finite entries".into()));
    }
    Ok(sym_min_eig(m))
}

fn sym_min_eig(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() {
        return f64::INFINITY;
    }
    m.symmetric_eigenvalues().min()
}

/// Operator 2-norm (largest singular value).
pub fn op_norm(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().max()
}
