//! Semidefinite programs over matrix variables with affine PSD constraints and
//! a linear objective to maximize, solved by an interior-point backend.
//!
//! Constraints are written block-wise as `F(x) = F₀ + Σ x_k F_k ⪰ 0`. Only the
//! upper triangle of each `F` is stored; blocks placed below the diagonal are
//! transposed into it.

use std::collections::BTreeMap;
use std::io::Write;
use std::sync::Once;

use clarabel::algebra::CscMatrix;
use clarabel::solver::{DefaultSettings, DefaultSolver, IPSolver, SolverStatus, SupportedConeT};
use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::ldi::min_eig;

/// Default feasibility and duality-gap tolerance.
pub const DEFAULT_TOL: f64 = 1e-8;

/// Handle to a matrix variable inside an [`SdpProblem`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct MatVar {
    offset: usize,
    rows: usize,
    cols: usize,
    symmetric: bool,
}

impl MatVar {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    /// Number of scalar unknowns the variable occupies.
    pub fn len(&self) -> usize {
        if self.symmetric {
            self.rows * (self.rows + 1) / 2
        } else {
            self.rows * self.cols
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Scalar index of entry `(r, c)`.
    pub fn entry(&self, r: usize, c: usize) -> usize {
        debug_assert!(r < self.rows && c < self.cols);
        if self.symmetric {
            let (lo, hi) = if r <= c { (r, c) } else { (c, r) };
            self.offset + hi * (hi + 1) / 2 + lo
        } else {
            self.offset + r * self.cols + c
        }
    }
}

/// One affine PSD constraint, stored as its upper triangle.
#[derive(Clone, Debug)]
pub struct Lmi {
    name: String,
    dim: usize,
    constant: BTreeMap<(usize, usize), f64>,
    /// `(row, col, scalar, coefficient)` with `row <= col`.
    terms: BTreeMap<(usize, usize, usize), f64>,
}

impl Lmi {
    pub fn new(name: impl Into<String>, dim: usize) -> Self {
        Self { name: name.into(), dim, constant: BTreeMap::new(), terms: BTreeMap::new() }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Maps a block-local entry into the stored upper triangle, or `None` for
    /// the redundant lower half of a diagonal block.
    fn place(&self, row0: usize, col0: usize, i: usize, j: usize) -> Option<(usize, usize)> {
        let (r, c) = (row0 + i, col0 + j);
        debug_assert!(r < self.dim && c < self.dim, "block exceeds constraint dimension");
        if row0 == col0 {
            (i <= j).then_some((r, c))
        } else if row0 < col0 {
            Some((r, c))
        } else {
            Some((c, r))
        }
    }

    fn check_block(&self, row0: usize, col0: usize, rows: usize, cols: usize) {
        assert!(row0 + rows <= self.dim && col0 + cols <= self.dim, "block exceeds constraint dimension");
        if row0 != col0 {
            let disjoint = row0 + rows <= col0 || col0 + cols <= row0;
            assert!(disjoint, "off-diagonal block straddles the diagonal");
        } else {
            assert_eq!(rows, cols, "diagonal block must be square");
        }
    }

    /// Adds a constant block at `(row0, col0)`.
    pub fn add_constant(&mut self, row0: usize, col0: usize, m: &DMatrix<f64>) -> &mut Self {
        self.check_block(row0, col0, m.nrows(), m.ncols());
        for j in 0..m.ncols() {
            for i in 0..m.nrows() {
                if m[(i, j)] != 0.0 {
                    if let Some(k) = self.place(row0, col0, i, j) {
                        *self.constant.entry(k).or_insert(0.0) += m[(i, j)];
                    }
                }
            }
        }
        self
    }

    /// Adds `scale · I` on the diagonal block starting at `start`.
    pub fn add_identity(&mut self, start: usize, size: usize, scale: f64) -> &mut Self {
        self.check_block(start, start, size, size);
        if scale == 0.0 {
            return self;
        }
        for i in 0..size {
            *self.constant.entry((start + i, start + i)).or_insert(0.0) += scale;
        }
        self
    }

    /// Adds `scale · L X R` at `(row0, col0)`; `None` stands for an identity factor.
    pub fn add_var(
        &mut self,
        row0: usize,
        col0: usize,
        left: Option<&DMatrix<f64>>,
        var: MatVar,
        right: Option<&DMatrix<f64>>,
        scale: f64,
    ) -> &mut Self {
        let rows = left.map_or(var.rows, |l| {
            assert_eq!(l.ncols(), var.rows, "left factor does not match variable");
            l.nrows()
        });
        let cols = right.map_or(var.cols, |r| {
            assert_eq!(r.nrows(), var.cols, "right factor does not match variable");
            r.ncols()
        });
        self.check_block(row0, col0, rows, cols);
        // Block entry (i, j) = Σ_{a,b} L[i,a] X[a,b] R[b,j].
        for i in 0..rows {
            for j in 0..cols {
                let Some(slot) = self.place(row0, col0, i, j) else { continue };
                let a_range: Vec<(usize, f64)> = match left {
                    None => vec![(i, 1.0)],
                    Some(l) => (0..var.rows).map(|a| (a, l[(i, a)])).filter(|(_, v)| *v != 0.0).collect(),
                };
                let b_range: Vec<(usize, f64)> = match right {
                    None => vec![(j, 1.0)],
                    Some(r) => (0..var.cols).map(|b| (b, r[(b, j)])).filter(|(_, v)| *v != 0.0).collect(),
                };
                for &(a, la) in &a_range {
                    for &(b, rb) in &b_range {
                        let k = var.entry(a, b);
                        *self.terms.entry((slot.0, slot.1, k)).or_insert(0.0) += scale * la * rb;
                    }
                }
            }
        }
        self
    }

    /// Value of the full symmetric matrix at the scalar assignment `x`.
    pub fn evaluate(&self, x: &[f64]) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (&(r, c), &v) in &self.constant {
            m[(r, c)] += v;
        }
        for (&(r, c, k), &v) in &self.terms {
            m[(r, c)] += v * x[k];
        }
        for c in 0..self.dim {
            for r in (c + 1)..self.dim {
                m[(r, c)] = m[(c, r)];
            }
        }
        m
    }

    fn max_scalar(&self) -> Option<usize> {
        self.terms.keys().map(|k| k.2).max()
    }
}

/// Solver verdict for an [`SdpProblem`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SdpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    /// Solver breakdown; not evidence of infeasibility.
    NumericalFailure,
}

/// Maximize a linear objective subject to affine PSD and linear equality constraints.
#[derive(Clone, Debug, Default)]
pub struct SdpProblem {
    vars: Vec<(String, MatVar)>,
    scalars: usize,
    lmis: Vec<Lmi>,
    equalities: Vec<(Vec<(usize, f64)>, f64)>,
    objective: BTreeMap<usize, f64>,
}

impl SdpProblem {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_var(&mut self, name: impl Into<String>, rows: usize, cols: usize, symmetric: bool) -> MatVar {
        assert!(!symmetric || rows == cols, "symmetric variable must be square");
        let var = MatVar { offset: self.scalars, rows, cols, symmetric };
        self.scalars += var.len();
        self.vars.push((name.into(), var));
        var
    }

    pub fn add_lmi(&mut self, lmi: Lmi) -> usize {
        self.lmis.push(lmi);
        self.lmis.len() - 1
    }

    /// `Σ coef · x[k] = rhs` over scalar indices from [`MatVar::entry`].
    pub fn add_equality(&mut self, terms: Vec<(usize, f64)>, rhs: f64) {
        self.equalities.push((terms, rhs));
    }

    /// Adds `coef · trace(var)` to the objective.
    pub fn maximize_trace(&mut self, var: MatVar, coef: f64) {
        assert_eq!(var.rows, var.cols, "trace needs a square variable");
        for i in 0..var.rows {
            *self.objective.entry(var.entry(i, i)).or_insert(0.0) += coef;
        }
    }

    /// Adds `coef · var[r, c]` to the objective.
    pub fn maximize_entry(&mut self, var: MatVar, r: usize, c: usize, coef: f64) {
        *self.objective.entry(var.entry(r, c)).or_insert(0.0) += coef;
    }

    pub fn scalar_count(&self) -> usize {
        self.scalars
    }

    pub fn lmis(&self) -> &[Lmi] {
        &self.lmis
    }

    pub fn constraint_count(&self) -> usize {
        self.lmis.len()
    }

    pub fn equality_count(&self) -> usize {
        self.equalities.len()
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective.iter().map(|(k, c)| c * x[*k]).sum()
    }

    fn validate(&self) -> Result<()> {
        if self.objective.values().all(|c| *c == 0.0) {
            return Err(Error::Contract("SDP objective references no variable".into()));
        }
        for lmi in &self.lmis {
            if lmi.dim == 0 {
                return Err(Error::Contract(format!("constraint '{}' has dimension 0", lmi.name)));
            }
            if lmi.max_scalar().is_some_and(|k| k >= self.scalars) {
                return Err(Error::Contract(format!("constraint '{}' references an unknown variable", lmi.name)));
            }
        }
        if self.equalities.iter().flat_map(|e| e.0.iter()).any(|(k, _)| *k >= self.scalars) {
            return Err(Error::Contract("equality references an unknown variable".into()));
        }
        Ok(())
    }

    /// Plain-text sparse dump: one `kind block row col var coef` line per entry.
    ///
    /// `kind` is `C` for the constant term (var `-`), `F` for a variable
    /// coefficient, `E` for equality rows (block = equality index, row/col 0),
    /// `O` for objective coefficients.
    pub fn write_triplets<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "# scalars {} constraints {} equalities {}", self.scalars, self.lmis.len(), self.equalities.len())?;
        for (name, v) in &self.vars {
            writeln!(w, "# var {name} offset {} rows {} cols {} symmetric {}", v.offset, v.rows, v.cols, v.symmetric)?;
        }
        for (k, c) in &self.objective {
            writeln!(w, "O - 0 0 {k} {c:e}")?;
        }
        for (b, lmi) in self.lmis.iter().enumerate() {
            writeln!(w, "# constraint {b} {} dim {}", lmi.name, lmi.dim)?;
            for (&(r, c), v) in &lmi.constant {
                writeln!(w, "C {b} {r} {c} - {v:e}")?;
            }
            for (&(r, c, k), v) in &lmi.terms {
                writeln!(w, "F {b} {r} {c} {k} {v:e}")?;
            }
        }
        for (e, (terms, rhs)) in self.equalities.iter().enumerate() {
            for (k, v) in terms {
                writeln!(w, "E {e} 0 0 {k} {v:e}")?;
            }
            writeln!(w, "E {e} 0 0 - {rhs:e}")?;
        }
        Ok(())
    }
}

/// Outcome of [`solve_sdp`].
#[derive(Clone, Debug)]
pub struct SdpSolution {
    pub status: SdpStatus,
    /// Objective value when Optimal.
    pub objective: Option<f64>,
    /// Minimum eigenvalue of every constraint at the returned point (Optimal only).
    pub residuals: Vec<f64>,
    pub iterations: u32,
    values: Vec<f64>,
}

impl SdpSolution {
    /// Value of a matrix variable; symmetric variables come back full.
    pub fn value(&self, var: MatVar) -> DMatrix<f64> {
        DMatrix::from_fn(var.rows, var.cols, |r, c| self.values[var.entry(r, c)])
    }

    pub fn scalars(&self) -> &[f64] {
        &self.values
    }

    pub fn min_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

static BLAS_THREADS: Once = Once::new();

extern "C" {
    fn openblas_set_num_threads(num_threads: std::os::raw::c_int);
}

/// Pins BLAS to one thread: solves run concurrently from the verifier's pool
/// and results must not depend on BLAS scheduling.
fn init_blas() {
    BLAS_THREADS.call_once(|| unsafe { openblas_set_num_threads(1) });
}

fn svec_index(r: usize, c: usize) -> usize {
    c * (c + 1) / 2 + r
}

/// Solves `problem` with feasibility and gap tolerance `tol`.
pub fn solve_sdp(problem: &SdpProblem, tol: f64) -> Result<SdpSolution> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::Config(format!("solver tolerance must be positive, got {tol}")));
    }
    problem.validate()?;
    init_blas();

    let n = problem.scalars;
    let mut rows_i = Vec::new();
    let mut cols_j = Vec::new();
    let mut vals = Vec::new();
    let mut b = Vec::new();
    let mut cones = Vec::new();

    // Equalities: s = rhs - a·x ∈ {0}.
    if !problem.equalities.is_empty() {
        for (terms, rhs) in &problem.equalities {
            let row = b.len();
            for &(k, v) in terms {
                rows_i.push(row);
                cols_j.push(k);
                vals.push(v);
            }
            b.push(*rhs);
        }
        cones.push(SupportedConeT::ZeroConeT(problem.equalities.len()));
    }

    // PSD blocks: s = svec(F₀) - Σ x_k svec(F_k) with √2 on off-diagonals.
    for lmi in &problem.lmis {
        let base = b.len();
        let len = lmi.dim * (lmi.dim + 1) / 2;
        b.resize(base + len, 0.0);
        for (&(r, c), &v) in &lmi.constant {
            let s = if r == c { 1.0 } else { std::f64::consts::SQRT_2 };
            b[base + svec_index(r, c)] += s * v;
        }
        for (&(r, c, k), &v) in &lmi.terms {
            let s = if r == c { 1.0 } else { std::f64::consts::SQRT_2 };
            rows_i.push(base + svec_index(r, c));
            cols_j.push(k);
            vals.push(-s * v);
        }
        if lmi.dim == 1 {
            match cones.last_mut() {
                Some(SupportedConeT::NonnegativeConeT(d)) => *d += 1,
                _ => cones.push(SupportedConeT::NonnegativeConeT(1)),
            }
        } else {
            cones.push(SupportedConeT::PSDTriangleConeT(lmi.dim));
        }
    }
    let m = b.len();
    let a = CscMatrix::new_from_triplets(m, n, rows_i, cols_j, vals);
    let p = CscMatrix::zeros((n, n));
    let mut q = vec![0.0; n];
    for (&k, &c) in &problem.objective {
        q[k] = -c;
    }

    let settings = DefaultSettings::<f64> {
        verbose: false,
        tol_feas: tol,
        tol_gap_abs: tol,
        tol_gap_rel: tol,
        max_iter: 400,
        ..DefaultSettings::default()
    };
    let mut solver = DefaultSolver::new(&p, &q, &a, &b, &cones, settings)
        .map_err(|e| Error::NumericalFailure(format!("solver setup failed: {e:?}")))?;
    solver.solve();
    let sol = &solver.solution;

    let mut out = SdpSolution {
        status: SdpStatus::NumericalFailure,
        objective: None,
        residuals: Vec::new(),
        iterations: sol.iterations,
        values: sol.x.clone(),
    };
    let accept = |out: &mut SdpSolution| -> Result<()> {
        out.residuals = problem
            .lmis
            .iter()
            .map(|l| min_eig(&l.evaluate(&out.values)))
            .collect::<Result<_>>()?;
        out.objective = Some(problem.objective_value(&out.values));
        Ok(())
    };
    match sol.status {
        SolverStatus::Solved => {
            out.status = SdpStatus::Optimal;
            accept(&mut out)?;
        }
        SolverStatus::AlmostSolved => {
            accept(&mut out)?;
            let eq_ok = problem.equalities.iter().all(|(t, rhs)| {
                let v: f64 = t.iter().map(|(k, c)| c * out.values[*k]).sum();
                (v - rhs).abs() <= 10.0 * tol * (1.0 + rhs.abs())
            });
            if out.min_residual() >= -10.0 * tol && eq_ok {
                out.status = SdpStatus::Optimal;
            } else {
                out.residuals.clear();
                out.objective = None;
            }
        }
        SolverStatus::PrimalInfeasible => out.status = SdpStatus::Infeasible,
        SolverStatus::DualInfeasible => out.status = SdpStatus::Unbounded,
        other => log::debug!("conic backend stopped with {other:?}"),
    }
    if out.status != SdpStatus::Optimal {
        out.values.iter_mut().for_each(|v| *v = f64::NAN);
    }
    Ok(out)
}

/// Verdict of [`LinearProgram::maximize`].
#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Optimal { value: f64, x: DVector<f64> },
    Infeasible,
    Unbounded,
}

/// `max cᵀx s.t. A x ≤ b`, optionally with `E x = f`, expressed through the SDP adapter.
#[derive(Clone, Debug)]
pub struct LinearProgram {
    c: DVector<f64>,
    a: DMatrix<f64>,
    b: DVector<f64>,
    eq: Option<(DMatrix<f64>, DVector<f64>)>,
}

impl LinearProgram {
    pub fn new(c: DVector<f64>, a: DMatrix<f64>, b: DVector<f64>) -> Result<Self> {
        if a.ncols() != c.len() || a.nrows() != b.len() {
            return Err(Error::Dimension {
                context: "linear program",
                expected: format!("{}x{}", b.len(), c.len()),
                got: format!("{}x{}", a.nrows(), a.ncols()),
            });
        }
        Ok(Self { c, a, b, eq: None })
    }

    pub fn with_equalities(mut self, e: DMatrix<f64>, f: DVector<f64>) -> Result<Self> {
        if e.ncols() != self.c.len() || e.nrows() != f.len() {
            return Err(Error::Dimension {
                context: "linear program equalities",
                expected: format!("{}x{}", f.len(), self.c.len()),
                got: format!("{}x{}", e.nrows(), e.ncols()),
            });
        }
        self.eq = Some((e, f));
        Ok(self)
    }

    pub fn maximize(&self, tol: f64) -> Result<LpOutcome> {
        let n = self.c.len();
        let mut sdp = SdpProblem::new();
        let x = sdp.add_var("x", 1, n, false);
        for i in 0..self.a.nrows() {
            let mut lmi = Lmi::new(format!("row {i}"), 1);
            lmi.add_identity(0, 1, self.b[i]);
            let coef = DMatrix::from_fn(n, 1, |k, _| -self.a[(i, k)]);
            lmi.add_var(0, 0, None, x, Some(&coef), 1.0);
            sdp.add_lmi(lmi);
        }
        if let Some((e, f)) = &self.eq {
            for i in 0..e.nrows() {
                let terms = (0..n).filter(|k| e[(i, *k)] != 0.0).map(|k| (x.entry(0, k), e[(i, k)])).collect();
                sdp.add_equality(terms, f[i]);
            }
        }
        for k in 0..n {
            if self.c[k] != 0.0 {
                sdp.maximize_entry(x, 0, k, self.c[k]);
            }
        }
        let sol = solve_sdp(&sdp, tol)?;
        Ok(match sol.status {
            SdpStatus::Optimal => {
                let xv = sol.value(x).transpose().column(0).into_owned();
                LpOutcome::Optimal { value: self.c.dot(&xv), x: xv }
            }
            SdpStatus::Infeasible => LpOutcome::Infeasible,
            SdpStatus::Unbounded => LpOutcome::Unbounded,
            SdpStatus::NumericalFailure => {
                return Err(Error::NumericalFailure("linear program did not converge".into()))
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn bounded_trace(lower: f64, upper: Option<f64>) -> (SdpProblem, MatVar) {
        let mut p = SdpProblem::new();
        let q = p.add_var("Q", 2, 2, true);
        let mut lo = Lmi::new("Q - lower I", 2);
        lo.add_var(0, 0, None, q, None, 1.0).add_identity(0, 2, -lower);
        p.add_lmi(lo);
        if let Some(u) = upper {
            let mut hi = Lmi::new("upper I - Q", 2);
            hi.add_identity(0, 2, u).add_var(0, 0, None, q, None, -1.0);
            p.add_lmi(hi);
        }
        p.maximize_trace(q, 1.0);
        (p, q)
    }

    #[test]
    fn trace_bounded_by_identity() {
        let (p, q) = bounded_trace(0.0, Some(1.0));
        let sol = solve_sdp(&p, DEFAULT_TOL).unwrap();
        assert_eq!(sol.status, SdpStatus::Optimal);
        assert_relative_eq!(sol.objective.unwrap(), 2.0, epsilon = 1e-6);
        assert_relative_eq!(sol.value(q), DMatrix::identity(2, 2), epsilon = 1e-6);
        assert_eq!(sol.residuals.len(), 2);
        assert!(sol.min_residual() >= -10.0 * DEFAULT_TOL);
    }

    #[test]
    fn contradictory_bounds_are_infeasible() {
        let (p, _) = bounded_trace(2.0, Some(1.0));
        assert_eq!(solve_sdp(&p, DEFAULT_TOL).unwrap().status, SdpStatus::Infeasible);
    }

    #[test]
    fn missing_upper_bound_is_unbounded() {
        let (p, _) = bounded_trace(0.0, None);
        assert_eq!(solve_sdp(&p, DEFAULT_TOL).unwrap().status, SdpStatus::Unbounded);
    }

    #[test]
    fn rejects_empty_objective_and_bad_tol() {
        let mut p = SdpProblem::new();
        let q = p.add_var("Q", 1, 1, true);
        let mut l = Lmi::new("q", 1);
        l.add_var(0, 0, None, q, None, 1.0);
        p.add_lmi(l);
        assert!(solve_sdp(&p, DEFAULT_TOL).is_err());
        p.maximize_trace(q, 1.0);
        assert!(solve_sdp(&p, 0.0).is_err());
    }

    #[test]
    fn lower_blocks_are_transposed_into_upper() {
        // [[1, x], [x, 1]] ⪰ 0 written with the variable in the lower block; max x = 1.
        let mut p = SdpProblem::new();
        let x = p.add_var("x", 1, 1, false);
        let mut l = Lmi::new("2x2", 2);
        l.add_identity(0, 2, 1.0).add_var(1, 0, None, x, None, 1.0);
        p.add_lmi(l);
        p.maximize_entry(x, 0, 0, 1.0);
        let sol = solve_sdp(&p, DEFAULT_TOL).unwrap();
        assert_relative_eq!(sol.objective.unwrap(), 1.0, epsilon = 1e-6);
        let m = p.lmis()[0].evaluate(sol.scalars());
        assert_eq!(m, m.transpose());
    }

    #[test]
    fn spectral_norm_bound_on_rectangular_variable() {
        // max Y11 + Y12 s.t. ‖Y‖ ≤ 1 gives √2.
        let mut p = SdpProblem::new();
        let y = p.add_var("Y", 1, 2, false);
        let mut l = Lmi::new("norm", 3);
        l.add_identity(0, 1, 1.0).add_identity(1, 2, 1.0).add_var(0, 1, None, y, None, 1.0);
        p.add_lmi(l);
        p.maximize_entry(y, 0, 0, 1.0);
        p.maximize_entry(y, 0, 1, 1.0);
        let sol = solve_sdp(&p, DEFAULT_TOL).unwrap();
        assert_relative_eq!(sol.objective.unwrap(), std::f64::consts::SQRT_2, epsilon = 1e-6);
    }

    #[test]
    fn linear_program_with_equality() {
        // max x + y s.t. x, y ≤ 1, x - y = 0.5 → x = 1, y = 0.5.
        let lp = LinearProgram::new(
            DVector::from_vec(vec![1.0, 1.0]),
            DMatrix::identity(2, 2),
            DVector::from_vec(vec![1.0, 1.0]),
        )
        .unwrap()
        .with_equalities(DMatrix::from_row_slice(1, 2, &[1.0, -1.0]), DVector::from_vec(vec![0.5]))
        .unwrap();
        match lp.maximize(DEFAULT_TOL).unwrap() {
            LpOutcome::Optimal { value, x } => {
                assert_relative_eq!(value, 1.5, epsilon = 1e-6);
                assert_relative_eq!(x[1], 0.5, epsilon = 1e-6);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn triplet_dump_lists_every_entry() {
        let (p, _) = bounded_trace(0.0, Some(1.0));
        let mut buf = Vec::new();
        p.write_triplets(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().filter(|l| l.starts_with('O')).count(), 2);
        assert_eq!(text.lines().filter(|l| l.starts_with('F')).count(), 6);
        assert_eq!(text.lines().filter(|l| l.starts_with('C')).count(), 2);
    }
}
