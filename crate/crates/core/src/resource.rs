//! Resource-destroying maps: dephasing, finite-group twirl, replacement.
//!
//! A resource-destroying map G fixes every free state and sends every state
//! into the free set; together these force idempotence G∘G = G. The module
//! also computes the resource radius R_G = max_ρ ‖ρ − G(ρ)‖₁ and the
//! subspace pair (V_G, V_G^⊥) with V_G = span{ρ − G(ρ)} that controls when
//! the instantaneous rate vanishes.

use crate::channels::{cptp_check, induced_one_norm, SuperOperator};
use crate::error::{QresError, Result};
use crate::operators::{
    cr, frobenius_norm, eig_hermitian, hermitian_basis, hermitian_part, hs_inner, identity,
    kron, outer, trace_norm, unit_matrix, CMat, CVec, DensityOperator,
};
use crate::sampling::Sampler;

pub const IDEMPOTENCE_TOL: f64 = 1e-10;
pub const FIXPOINT_TOL: f64 = 1e-10;
pub const FREE_DISTANCE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapKind {
    Dephasing,
    Twirl,
    Replacement,
    Custom,
}

/// Linear idempotent map with free-set metadata.
#[derive(Debug, Clone)]
pub struct ResourceDestroyingMap {
    pub superop: SuperOperator,
    pub free_extreme_points: Vec<DensityOperator>,
    pub self_adjoint: bool,
    pub cptp: bool,
    pub kind: MapKind,
}

/// Orthonormal Hermitian bases of V_G and its Hilbert–Schmidt orthocomplement.
#[derive(Debug, Clone)]
pub struct FreeSubspaces {
    pub basis_span: Vec<CMat>,
    pub basis_perp: Vec<CMat>,
}

impl FreeSubspaces {
    /// Project a Hermitian operator onto V_G.
    pub fn project_span(&self, x: &CMat) -> CMat {
        project_onto(&self.basis_span, x)
    }

    pub fn project_perp(&self, x: &CMat) -> CMat {
        project_onto(&self.basis_perp, x)
    }
}

fn project_onto(basis: &[CMat], x: &CMat) -> CMat {
    let dim = x.nrows();
    basis.iter().fold(CMat::zeros(dim, dim), |acc, b| {
        let coef = hs_inner(b, x).expect("matched dims");
        acc + b.map(|e| e * coef)
    })
}

/// Result of the structural audit in [`ResourceDestroyingMap::verify`].
#[derive(Debug, Clone)]
pub struct RdmReport {
    pub idempotence_residual: f64,
    pub fixpoint_residual: f64,
    pub max_free_distance: f64,
    pub linearity_residual: f64,
    pub idempotent: bool,
    pub fixes_free_points: bool,
    pub image_in_free_set: bool,
    pub linear: bool,
}

impl RdmReport {
    pub fn all_pass(&self) -> bool {
        self.idempotent && self.fixes_free_points && self.image_in_free_set && self.linear
    }
}

/// Restart-count-annotated lower estimate of the resource radius.
#[derive(Debug, Clone, Copy)]
pub struct RadiusEstimate {
    pub value: f64,
    pub restarts: usize,
}

impl ResourceDestroyingMap {
    /// Complete dephasing G(ρ) = Σ |i⟩⟨i| ρ |i⟩⟨i| in the given orthonormal basis.
    pub fn dephasing(basis: &[CVec]) -> Result<Self> {
        let dim = basis.len();
        if dim == 0 {
            return Err(QresError::Validation("empty dephasing basis".into()));
        }
        for (i, u) in basis.iter().enumerate() {
            if u.len() != dim {
                return Err(QresError::Validation("dephasing basis must be complete".into()));
            }
            for (j, v) in basis.iter().enumerate() {
                let overlap = u.dotc(v);
                let expect = if i == j { cr(1.0) } else { cr(0.0) };
                if (overlap - expect).norm() > 1e-12 {
                    return Err(QresError::Validation(format!(
                        "basis not orthonormal: ⟨{i}|{j}⟩ deviates by {:.3e}",
                        (overlap - expect).norm()
                    )));
                }
            }
        }
        let projectors: Vec<CMat> = basis.iter().map(|k| outer(k, k)).collect();
        let matrix = projectors
            .iter()
            .fold(CMat::zeros(dim * dim, dim * dim), |acc, p| {
                acc + kron(p, &p.transpose())
            });
        let free = projectors
            .iter()
            .map(|p| DensityOperator::new(p.clone()).expect("projector state"))
            .collect();
        Ok(Self {
            superop: SuperOperator { dim, matrix },
            free_extreme_points: free,
            self_adjoint: true,
            cptp: true,
            kind: MapKind::Dephasing,
        })
    }

    /// Site-basis dephasing in dimension `dim`.
    pub fn site_dephasing(dim: usize) -> Self {
        let basis: Vec<CVec> = (0..dim).map(|i| crate::operators::basis_ket(dim, i)).collect();
        Self::dephasing(&basis).expect("computational basis is orthonormal")
    }

    /// Finite-group twirl G(ρ) = (1/|G|) Σ U ρ U†.
    ///
    /// The list must be closed under multiplication up to a global phase
    /// (phases cancel in the conjugation).
    pub fn twirl(unitaries: &[CMat]) -> Result<Self> {
        if unitaries.is_empty() {
            return Err(QresError::Validation("empty unitary list".into()));
        }
        let dim = unitaries[0].nrows();
        for u in unitaries {
            if u.nrows() != dim || u.ncols() != dim {
                return Err(QresError::DimensionMismatch("twirl unitaries".into()));
            }
            if frobenius_norm(&(u.adjoint() * u - identity(dim))) > 1e-10 {
                return Err(QresError::Validation("twirl element is not unitary".into()));
            }
        }
        for (i, a) in unitaries.iter().enumerate() {
            for (j, b) in unitaries.iter().enumerate() {
                let prod = a * b;
                let found = unitaries.iter().any(|u| projectively_equal(&prod, u, 1e-10));
                if !found {
                    return Err(QresError::NotAGroup(i, j));
                }
            }
        }
        let n = unitaries.len() as f64;
        let matrix = unitaries
            .iter()
            .fold(CMat::zeros(dim * dim, dim * dim), |acc, u| {
                acc + kron(u, &u.map(|x| x.conj()))
            })
            .unscale(n);
        let superop = SuperOperator { dim, matrix };
        let residual = idempotence_residual(&superop);
        if residual > IDEMPOTENCE_TOL {
            return Err(QresError::Validation(format!(
                "twirl not idempotent, residual {residual:.3e}"
            )));
        }
        // extreme free points reachable from basis projectors, deduplicated
        let mut free: Vec<DensityOperator> = Vec::new();
        for i in 0..dim {
            let img = hermitian_part(&superop.apply_mat(&unit_matrix(dim, i, i)));
            if free
                .iter()
                .all(|f| frobenius_norm(&(f.matrix() - &img)) > 1e-10)
            {
                free.push(DensityOperator::new(img)?);
            }
        }
        Ok(Self {
            superop,
            free_extreme_points: free,
            self_adjoint: true,
            cptp: true,
            kind: MapKind::Twirl,
        })
    }

    /// Replacement channel G(ρ) = Tr\[ρ\]·σ for the singleton free set {σ}.
    /// Self-adjoint exactly when σ is maximally mixed.
    pub fn replacement(sigma: DensityOperator) -> Self {
        let dim = sigma.dim();
        let vec_sigma = crate::operators::vec_op(sigma.matrix()).column;
        let vec_id = crate::operators::vec_op(&identity(dim)).column;
        // L = vec(σ) · vec(1)ᵀ picks out the trace of the input
        let matrix = &vec_sigma * vec_id.transpose();
        let self_adjoint =
            frobenius_norm(&(sigma.matrix() - identity(dim).scale(1.0 / dim as f64))) < 1e-10;
        Self {
            superop: SuperOperator { dim, matrix },
            free_extreme_points: vec![sigma],
            self_adjoint,
            cptp: true,
            kind: MapKind::Replacement,
        }
    }

    /// Wrap a user-supplied linear map, enforcing idempotence.
    pub fn custom(
        superop: SuperOperator,
        free_extreme_points: Vec<DensityOperator>,
        self_adjoint: bool,
    ) -> Result<Self> {
        let residual = idempotence_residual(&superop);
        if residual > IDEMPOTENCE_TOL {
            return Err(QresError::Validation(format!(
                "custom map not idempotent, residual {residual:.3e}"
            )));
        }
        let report = cptp_check(&superop);
        Ok(Self {
            superop,
            free_extreme_points,
            self_adjoint,
            cptp: report.is_cp && report.is_tp,
            kind: MapKind::Custom,
        })
    }

    /// Wrap without validation. Only for diagnostics on defective candidates.
    pub fn custom_unchecked(
        superop: SuperOperator,
        free_extreme_points: Vec<DensityOperator>,
        self_adjoint: bool,
        cptp: bool,
    ) -> Self {
        Self {
            superop,
            free_extreme_points,
            self_adjoint,
            cptp,
            kind: MapKind::Custom,
        }
    }

    pub fn dim(&self) -> usize {
        self.superop.dim
    }

    pub fn apply_mat(&self, x: &CMat) -> CMat {
        self.superop.apply_mat(x)
    }

    pub fn apply(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        DensityOperator::new(hermitian_part(&self.apply_mat(rho.matrix())))
    }

    /// Hilbert–Schmidt adjoint G†.
    pub fn adjoint(&self) -> SuperOperator {
        self.superop.adjoint()
    }

    /// id − G as a superoperator.
    pub fn complement(&self) -> SuperOperator {
        SuperOperator::identity(self.dim())
            .sub(&self.superop)
            .expect("same dim")
    }

    /// Resource radius R_G = max_ρ ‖ρ − G(ρ)‖₁, attained on pure states by
    /// convexity. Reported with the restart count of the optimizer.
    pub fn resource_radius(&self, restarts: usize, sampler: &mut Sampler) -> RadiusEstimate {
        let est = induced_one_norm(&self.complement(), restarts, sampler);
        RadiusEstimate {
            value: est.value,
            restarts: est.restarts,
        }
    }

    /// V_G = span{(id − G)(ρ)} (image of id − G on Hermitian operators,
    /// orthonormalized) and its orthocomplement V_G^⊥.
    pub fn subspaces(&self) -> FreeSubspaces {
        let dim = self.dim();
        let comp = self.complement();
        let images: Vec<CMat> = hermitian_basis(dim)
            .into_iter()
            .map(|b| hermitian_part(&comp.apply_mat(&b)))
            .collect();
        let basis_span = gram_schmidt(&images, 1e-10);
        let mut perp_candidates: Vec<CMat> = Vec::new();
        for b in hermitian_basis(dim) {
            let residual = &b - project_onto(&basis_span, &b);
            perp_candidates.push(residual);
        }
        let basis_perp = gram_schmidt(&perp_candidates, 1e-10);
        FreeSubspaces {
            basis_span,
            basis_perp,
        }
    }

    /// Structural audit: idempotence, free-point fixing, image-in-free-set
    /// distance, and linearity on random affine combinations. Diagnostic
    /// only, never errors.
    pub fn verify(&self, n_samples: usize, sampler: &mut Sampler) -> RdmReport {
        let dim = self.dim();
        let idempotence_residual = idempotence_residual(&self.superop);
        let fixpoint_residual = self
            .free_extreme_points
            .iter()
            .map(|f| frobenius_norm(&(self.apply_mat(f.matrix()) - f.matrix())))
            .fold(0.0f64, f64::max);
        let extremes: Vec<&CMat> = self.free_extreme_points.iter().map(|f| f.matrix()).collect();
        let mut max_free_distance = 0.0f64;
        let mut linearity_residual = 0.0f64;
        for k in 0..n_samples {
            let rho = if k % 2 == 0 {
                sampler.pure_state(dim)
            } else {
                sampler.mixed_state(dim)
            };
            let image = hermitian_part(&self.apply_mat(rho.matrix()));
            if !extremes.is_empty() {
                max_free_distance =
                    max_free_distance.max(trace_distance_to_simplex(&image, &extremes));
            }
            let other = sampler.mixed_state(dim);
            let a = sampler.uniform(-0.5, 1.5);
            let combo = rho.matrix().scale(a) + other.matrix().scale(1.0 - a);
            let lhs = self.apply_mat(&combo);
            let rhs =
                self.apply_mat(rho.matrix()).scale(a) + self.apply_mat(other.matrix()).scale(1.0 - a);
            linearity_residual = linearity_residual.max(frobenius_norm(&(lhs - rhs)));
        }
        RdmReport {
            idempotence_residual,
            fixpoint_residual,
            max_free_distance,
            linearity_residual,
            idempotent: idempotence_residual <= IDEMPOTENCE_TOL,
            fixes_free_points: fixpoint_residual <= FIXPOINT_TOL,
            image_in_free_set: max_free_distance <= FREE_DISTANCE_TOL,
            linear: linearity_residual <= 1e-10,
        }
    }
}

fn idempotence_residual(s: &SuperOperator) -> f64 {
    frobenius_norm(&(&s.matrix * &s.matrix - &s.matrix))
}

/// A =? e^{iφ} B for some global phase.
fn projectively_equal(a: &CMat, b: &CMat, tol: f64) -> bool {
    let overlap = hs_inner(b, a).expect("same dims");
    let scale = frobenius_norm(b).powi(2);
    if scale == 0.0 {
        return frobenius_norm(a) < tol;
    }
    let phase = overlap / scale;
    if (phase.norm() - 1.0).abs() > tol {
        return false;
    }
    frobenius_norm(&(a - b.map(|x| x * phase))) < tol * (1.0 + frobenius_norm(b))
}

/// Gram–Schmidt over the real span of Hermitian matrices.
fn gram_schmidt(vectors: &[CMat], tol: f64) -> Vec<CMat> {
    let mut basis: Vec<CMat> = Vec::new();
    for v in vectors {
        let mut r = v.clone();
        for b in &basis {
            let coef = hs_inner(b, &r).expect("same dims");
            r -= b.map(|e| e * coef);
        }
        let n = frobenius_norm(&r);
        if n > tol {
            basis.push(r.unscale(n));
        }
    }
    basis
}

/// Trace distance ‖A − Σ w_k S_k‖₁ minimized over the probability simplex.
///
/// A Hilbert–Schmidt least-squares fit (projected onto the simplex) seeds a
/// projected subgradient descent, followed by a shrinking pattern search
/// along the simplex edge directions e_i − e_j down to step 1e-9.
pub fn trace_distance_to_simplex(a: &CMat, extremes: &[&CMat]) -> f64 {
    let k = extremes.len();
    if k == 1 {
        return trace_norm(&(a - extremes[0]));
    }
    let objective = |w: &[f64]| {
        let mix = extremes
            .iter()
            .zip(w)
            .fold(CMat::zeros(a.nrows(), a.ncols()), |acc, (s, &wi)| {
                acc + s.scale(wi)
            });
        trace_norm(&(a - mix))
    };

    // warm start: unconstrained least squares in the extreme-point span
    let gram = nalgebra::DMatrix::<f64>::from_fn(k, k, |i, j| {
        hs_inner(extremes[i], extremes[j]).expect("same dims").re
    });
    let rhs = nalgebra::DVector::<f64>::from_fn(k, |i, _| {
        hs_inner(extremes[i], a).expect("same dims").re
    });
    let mut w = match gram.clone().lu().solve(&rhs) {
        Some(sol) => project_simplex(sol.as_slice()),
        None => vec![1.0 / k as f64; k],
    };

    let mut best = objective(&w);
    for t in 0..200 {
        let mix = extremes
            .iter()
            .zip(&w)
            .fold(CMat::zeros(a.nrows(), a.ncols()), |acc, (s, &wi)| {
                acc + s.scale(wi)
            });
        let x = hermitian_part(&(a - mix));
        let (vals, vecs) = eig_hermitian(&x).expect("Hermitian difference");
        let dim = a.nrows();
        let mut sign = CMat::zeros(dim, dim);
        for (idx, &lam) in vals.iter().enumerate() {
            let v = vecs.column(idx).clone_owned();
            let p = &v * v.adjoint();
            sign += if lam >= 0.0 { p } else { -p };
        }
        // subgradient of the trace norm in w_k is −⟨sgn(X), S_k⟩
        let grad: Vec<f64> = extremes
            .iter()
            .map(|s| -hs_inner(&sign, s).expect("same dims").re)
            .collect();
        let step = 0.3 / ((t + 1) as f64).sqrt();
        let proposal: Vec<f64> = w.iter().zip(&grad).map(|(wi, g)| wi - step * g).collect();
        let candidate = project_simplex(&proposal);
        let val = objective(&candidate);
        if val < best {
            best = val;
            w = candidate;
        }
    }

    // pattern search along edge directions, geometrically shrinking step
    let mut step: f64 = 0.25;
    while step > 1e-10 {
        let mut improved = true;
        while improved {
            improved = false;
            for i in 0..k {
                for j in 0..k {
                    if i == j {
                        continue;
                    }
                    let mut cand = w.clone();
                    let delta = step.min(cand[j]);
                    if delta <= 0.0 {
                        continue;
                    }
                    cand[i] += delta;
                    cand[j] -= delta;
                    let val = objective(&cand);
                    if val < best - 1e-15 {
                        best = val;
                        w = cand;
                        improved = true;
                    }
                }
            }
        }
        step *= 0.35;
    }
    best
}

/// Euclidean projection onto {w ≥ 0, Σw = 1}.
fn project_simplex(v: &[f64]) -> Vec<f64> {
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        cumsum += x;
        let candidate = (cumsum - 1.0) / (i + 1) as f64;
        if x - candidate > 0.0 {
            theta = candidate;
        }
    }
    v.iter().map(|&x| (x - theta).max(0.0)).collect()
}
