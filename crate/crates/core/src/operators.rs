//! Dense complex operator algebra on small Hilbert spaces.
//!
//! Everything here works on `CMat = DMatrix<Complex<f64>>`. Spectral
//! decompositions of Hermitian operators go through nalgebra's tridiagonal
//! `SymmetricEigen`; general matrix exponentials use scaling-and-squaring
//! with a degree-13 Padé approximant (Liouvillians are non-normal, so the
//! eigendecomposition route is reserved for test oracles).
//!
//! Tolerances: algebraic identities 1e-12, spectral reconstructions 1e-10,
//! matrix-exponential checks 1e-9 (double precision, dim ≤ 4, Liouville ≤ 16).

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

use crate::error::{QresError, Result};
use crate::C64;

pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

/// Hermiticity / algebraic identity tolerance.
pub const HERM_TOL: f64 = 1e-12;
/// Spectral reconstruction tolerance.
pub const SPECTRAL_TOL: f64 = 1e-10;
/// Smallest admissible eigenvalue of a density operator.
pub const PSD_TOL: f64 = -1e-10;

pub fn c(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

pub fn cr(re: f64) -> C64 {
    Complex::new(re, 0.0)
}

pub fn identity(dim: usize) -> CMat {
    CMat::identity(dim, dim)
}

pub fn zeros(dim: usize) -> CMat {
    CMat::zeros(dim, dim)
}

/// |i⟩⟨j| in dimension `dim`.
pub fn unit_matrix(dim: usize, i: usize, j: usize) -> CMat {
    let mut m = zeros(dim);
    m[(i, j)] = cr(1.0);
    m
}

/// Column vector |i⟩.
pub fn basis_ket(dim: usize, i: usize) -> CVec {
    let mut v = CVec::zeros(dim);
    v[i] = cr(1.0);
    v
}

/// Outer product |u⟩⟨v|.
pub fn outer(u: &CVec, v: &CVec) -> CMat {
    u * v.adjoint()
}

pub fn dagger(a: &CMat) -> CMat {
    a.adjoint()
}

pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

pub fn anticommutator(a: &CMat, b: &CMat) -> CMat {
    a * b + b * a
}

/// Hilbert–Schmidt inner product ⟨A, B⟩ = Tr[A†B].
pub fn hs_inner(a: &CMat, b: &CMat) -> Result<C64> {
    if a.nrows() != b.nrows() || a.ncols() != b.ncols() {
        return Err(QresError::DimensionMismatch(format!(
            "hs_inner: {}x{} vs {}x{}",
            a.nrows(),
            a.ncols(),
            b.nrows(),
            b.ncols()
        )));
    }
    Ok(a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum())
}

pub fn frobenius_norm(a: &CMat) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

pub fn trace(a: &CMat) -> C64 {
    a.diagonal().iter().sum()
}

/// Largest absolute deviation from Hermiticity, max_ij |A_ij − conj(A_ji)|.
pub fn hermiticity_defect(a: &CMat) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    worst
}

/// (A + A†)/2.
pub fn hermitian_part(a: &CMat) -> CMat {
    (a + a.adjoint()).scale(0.5)
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// Hermitian eigendecomposition, eigenvalues sorted descending.
///
/// Returns `(λ, V)` with A = V diag(λ) V† and V†V = 1. Rejects inputs whose
/// Hermiticity defect exceeds `HERM_TOL` scaled by the matrix magnitude.
pub fn eig_hermitian(a: &CMat) -> Result<(Vec<f64>, CMat)> {
    let scale = frobenius_norm(a).max(1.0);
    let defect = hermiticity_defect(a);
    if defect > HERM_TOL * scale {
        return Err(QresError::Validation(format!(
            "eig_hermitian: input not Hermitian, max asymmetry {defect:.3e}"
        )));
    }
    let n = a.nrows();
    let sym = nalgebra::SymmetricEigen::new(hermitian_part(a));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| sym.eigenvalues[j].partial_cmp(&sym.eigenvalues[i]).unwrap());
    let vals: Vec<f64> = order.iter().map(|&i| sym.eigenvalues[i]).collect();
    let mut vecs = zeros(n);
    for (col, &i) in order.iter().enumerate() {
        vecs.set_column(col, &sym.eigenvectors.column(i));
    }
    Ok((vals, vecs))
}

/// Operator norm and trace norm (largest singular value, sum of singular values).
pub fn schatten_norms(a: &CMat) -> (f64, f64) {
    let sv = a.clone().singular_values();
    let op = sv.iter().cloned().fold(0.0f64, f64::max);
    let tr = sv.iter().sum();
    (op, tr)
}

pub fn op_norm(a: &CMat) -> f64 {
    schatten_norms(a).0
}

pub fn trace_norm(a: &CMat) -> f64 {
    schatten_norms(a).1
}

/// Row-stacked vectorization of a square matrix.
#[derive(Debug, Clone)]
pub struct VectorizedOperator {
    pub dim: usize,
    pub column: CVec,
}

/// vec(A) in row-stacking order: entry (i, j) lands at position i·d + j.
pub fn vec_op(a: &CMat) -> VectorizedOperator {
    let d = a.nrows();
    let mut v = CVec::zeros(d * d);
    for i in 0..d {
        for j in 0..d {
            v[i * d + j] = a[(i, j)];
        }
    }
    VectorizedOperator { dim: d, column: v }
}

/// Inverse of [`vec_op`]. Fails when the length is not a perfect square.
pub fn unvec(v: &CVec) -> Result<CMat> {
    let len = v.len();
    let d = (len as f64).sqrt().round() as usize;
    if d * d != len {
        return Err(QresError::DimensionMismatch(format!(
            "unvec: length {len} is not a perfect square"
        )));
    }
    let mut m = zeros(d);
    for i in 0..d {
        for j in 0..d {
            m[(i, j)] = v[i * d + j];
        }
    }
    Ok(m)
}

/// exp(A·t) by scaling-and-squaring with the degree-13 Padé approximant
/// (Higham 2005 θ thresholds). Works for arbitrary complex square A.
pub fn matrix_exp(a: &CMat, t: f64) -> CMat {
    expm(&a.scale(t))
}

pub fn expm(a: &CMat) -> CMat {
    let n = a.nrows();
    // 1-norm = max column absolute sum
    let norm1 = (0..n)
        .map(|j| (0..n).map(|i| a[(i, j)].norm()).sum::<f64>())
        .fold(0.0f64, f64::max);
    if norm1 == 0.0 {
        return identity(n);
    }

    const THETA3: f64 = 1.495_585_217_958_292e-2;
    const THETA5: f64 = 2.539_398_330_063_23e-1;
    const THETA7: f64 = 9.504_178_996_162_932e-1;
    const THETA9: f64 = 2.097_847_961_257_068;
    const THETA13: f64 = 5.371_920_351_148_152;

    let a2 = a * a;
    if norm1 <= THETA3 {
        return pade_solve(&pade_uv(a, &[&a2], &B3));
    }
    let a4 = &a2 * &a2;
    if norm1 <= THETA5 {
        return pade_solve(&pade_uv(a, &[&a2, &a4], &B5));
    }
    let a6 = &a4 * &a2;
    if norm1 <= THETA7 {
        return pade_solve(&pade_uv(a, &[&a2, &a4, &a6], &B7));
    }
    if norm1 <= THETA9 {
        let a8 = &a6 * &a2;
        return pade_solve(&pade_uv(a, &[&a2, &a4, &a6, &a8], &B9));
    }

    // scale so that ‖A/2^s‖₁ ≤ θ₁₃, Padé-13, then square back
    let s = ((norm1 / THETA13).log2().ceil() as i32).max(0);
    let a_s = a.scale(0.5f64.powi(s));
    let a2 = &a_s * &a_s;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let mut r = pade_solve(&pade13_uv(&a_s, &a2, &a4, &a6));
    for _ in 0..s {
        r = &r * &r;
    }
    r
}

const B3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const B5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const B7: [f64; 8] = [17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0];
const B9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const B13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// U (odd part, pre-multiplied by A) and V (even part) of the Padé numerator.
fn pade_uv(a: &CMat, powers: &[&CMat], b: &[f64]) -> (CMat, CMat) {
    let n = a.nrows();
    let mut u_inner = identity(n).scale(b[1]);
    let mut v = identity(n).scale(b[0]);
    for (k, p) in powers.iter().enumerate() {
        u_inner += p.scale(b[2 * k + 3]);
        v += p.scale(b[2 * k + 2]);
    }
    (a * u_inner, v)
}

fn pade13_uv(a: &CMat, a2: &CMat, a4: &CMat, a6: &CMat) -> (CMat, CMat) {
    let n = a.nrows();
    let id = identity(n);
    let u_inner = a6 * (a6.scale(B13[13]) + a4.scale(B13[11]) + a2.scale(B13[9]))
        + a6.scale(B13[7])
        + a4.scale(B13[5])
        + a2.scale(B13[3])
        + id.scale(B13[1]);
    let v = a6 * (a6.scale(B13[12]) + a4.scale(B13[10]) + a2.scale(B13[8]))
        + a6.scale(B13[6])
        + a4.scale(B13[4])
        + a2.scale(B13[2])
        + id.scale(B13[0]);
    (a * u_inner, v)
}

/// Solve (V − U) R = (V + U) for R.
fn pade_solve((u, v): &(CMat, CMat)) -> CMat {
    let denom = v - u;
    let numer = v + u;
    denom
        .lu()
        .solve(&numer)
        .expect("Padé denominator singular: input norm outside scaling range")
}

/// Self-adjoint readout operator. `povm` asserts 0 ≤ M ≤ 1.
#[derive(Debug, Clone)]
pub struct HermitianObservable {
    matrix: CMat,
    povm: bool,
}

impl HermitianObservable {
    pub fn new(matrix: CMat) -> Result<Self> {
        Self::build(matrix, false)
    }

    /// Validates the POVM-element constraint 0 ≤ M ≤ 1 in addition to Hermiticity.
    pub fn new_povm(matrix: CMat) -> Result<Self> {
        Self::build(matrix, true)
    }

    fn build(matrix: CMat, povm: bool) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(QresError::Validation("observable must be square".into()));
        }
        if matrix.iter().any(|x| !x.re.is_finite() || !x.im.is_finite()) {
            return Err(QresError::Validation("observable has non-finite entries".into()));
        }
        let defect = hermiticity_defect(&matrix);
        if defect > HERM_TOL * frobenius_norm(&matrix).max(1.0) {
            return Err(QresError::Validation(format!(
                "observable not Hermitian, max asymmetry {defect:.3e}"
            )));
        }
        if povm {
            let (vals, _) = eig_hermitian(&matrix)?;
            let lo = vals.last().copied().unwrap_or(0.0);
            let hi = vals.first().copied().unwrap_or(0.0);
            if lo < -HERM_TOL || hi > 1.0 + HERM_TOL {
                return Err(QresError::Validation(format!(
                    "POVM element violates 0 ≤ M ≤ 1: spectrum [{lo:.3e}, {hi:.3e}]"
                )));
            }
        }
        Ok(Self { matrix, povm })
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn is_povm(&self) -> bool {
        self.povm
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn op_norm(&self) -> f64 {
        op_norm(&self.matrix)
    }
}

/// Positive, unit-trace Hermitian matrix.
#[derive(Debug, Clone)]
pub struct DensityOperator {
    matrix: CMat,
}

impl DensityOperator {
    pub fn new(matrix: CMat) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(QresError::Validation("state must be square".into()));
        }
        let defect = hermiticity_defect(&matrix);
        if defect > HERM_TOL * frobenius_norm(&matrix).max(1.0) {
            return Err(QresError::Validation(format!(
                "state not Hermitian, max asymmetry {defect:.3e}"
            )));
        }
        let tr = trace(&matrix);
        if (tr - cr(1.0)).norm() > 1e-12 {
            return Err(QresError::Validation(format!(
                "state trace {} ≠ 1",
                tr.re
            )));
        }
        let (vals, _) = eig_hermitian(&matrix)?;
        let min = vals.last().copied().unwrap_or(0.0);
        if min < PSD_TOL {
            return Err(QresError::Validation(format!(
                "state has negative eigenvalue {min:.3e}"
            )));
        }
        Ok(Self { matrix })
    }

    pub fn pure(psi: &CVec) -> Result<Self> {
        let norm = psi.norm();
        if norm == 0.0 {
            return Err(QresError::Validation("zero vector is not a state".into()));
        }
        let normalized = psi.unscale(norm);
        Self::new(outer(&normalized, &normalized))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: identity(dim).scale(1.0 / dim as f64),
        }
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }
}

/// Orthonormal Hermitian basis of the d² real vector space of Hermitian
/// d×d matrices: E_ii, (E_ij + E_ji)/√2, i(E_ij − E_ji)/√2.
pub fn hermitian_basis(dim: usize) -> Vec<CMat> {
    let mut basis = Vec::with_capacity(dim * dim);
    for i in 0..dim {
        basis.push(unit_matrix(dim, i, i));
    }
    let inv_sqrt2 = 1.0 / 2.0f64.sqrt();
    for i in 0..dim {
        for j in (i + 1)..dim {
            let sym = (unit_matrix(dim, i, j) + unit_matrix(dim, j, i)).scale(inv_sqrt2);
            let mut asym = (unit_matrix(dim, i, j) - unit_matrix(dim, j, i)).scale(inv_sqrt2);
            asym *= c(0.0, 1.0);
            basis.push(sym);
            basis.push(asym);
        }
    }
    basis
}
