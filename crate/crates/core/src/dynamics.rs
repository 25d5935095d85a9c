//! GKLS generators, Schrödinger/Heisenberg propagation, the instantaneous
//! rate Γ_M(t), and the variation/Dini/time/feasibility bound suite.
//!
//! A generator L(ρ) = −i\[H,ρ\] + Σ γ_k (L_k ρ L_k† − ½{L_k†L_k, ρ}) is stored
//! as its row-stacked Liouville matrix together with an independently built
//! Heisenberg adjoint (duality-checked at construction). Negative rates are
//! rejected: every bound here assumes the CP-divisible regime where each
//! Λ_t = e^{tL} is a channel.

use crate::channels::{cptp_check, induced_one_norm, QuantumChannel, SuperOperator};
use crate::error::{QresError, Result};
use crate::impact::capacity_superop;
use crate::operators::{
    frobenius_norm, hermitian_part, hermiticity_defect, identity, kron, matrix_exp, op_norm,
    unvec, vec_op, CMat, DensityOperator, HermitianObservable,
};
use crate::quad;
use crate::resource::{FreeSubspaces, ResourceDestroyingMap};
use crate::sampling::Sampler;

/// Time-independent GKLS generator with cached Liouville forms.
#[derive(Debug, Clone)]
pub struct LindbladGenerator {
    pub hamiltonian: CMat,
    pub jumps: Vec<(CMat, f64)>,
    pub liouville: SuperOperator,
    pub adjoint_liouville: SuperOperator,
}

impl LindbladGenerator {
    /// Build from Hamiltonian and (jump operator, rate ≥ 0) pairs.
    pub fn new(hamiltonian: CMat, jumps: Vec<(CMat, f64)>) -> Result<Self> {
        let dim = hamiltonian.nrows();
        if hamiltonian.ncols() != dim {
            return Err(QresError::Validation("Hamiltonian must be square".into()));
        }
        let defect = hermiticity_defect(&hamiltonian);
        if defect > 1e-12 * frobenius_norm(&hamiltonian).max(1.0) {
            return Err(QresError::Validation(format!(
                "Hamiltonian not Hermitian, max asymmetry {defect:.3e}"
            )));
        }
        for (index, (op, rate)) in jumps.iter().enumerate() {
            if op.nrows() != dim || op.ncols() != dim {
                return Err(QresError::DimensionMismatch(format!("jump operator {index}")));
            }
            if *rate < 0.0 {
                return Err(QresError::NegativeRate { index, rate: *rate });
            }
        }
        let id = identity(dim);
        let h_part = (kron(&hamiltonian, &id) - kron(&id, &hamiltonian.transpose()))
            .map(|x| x * crate::operators::c(0.0, -1.0));
        let mut liou = h_part.clone();
        let mut adj = h_part.map(|x| -x);
        for (op, rate) in &jumps {
            let opd_op = op.adjoint() * op;
            let sink = (kron(&opd_op, &id) + kron(&id, &opd_op.transpose())).scale(0.5);
            liou += (kron(op, &op.map(|x| x.conj())) - &sink).scale(*rate);
            adj += (kron(&op.adjoint(), &op.transpose()) - &sink).scale(*rate);
        }
        // the Heisenberg form must agree with the Hilbert–Schmidt adjoint
        let scale = frobenius_norm(&liou).max(1.0);
        let dual_defect = frobenius_norm(&(&adj - liou.adjoint()));
        if dual_defect > 1e-10 * scale {
            return Err(QresError::Validation(format!(
                "adjoint generator fails duality check, residual {dual_defect:.3e}"
            )));
        }
        Ok(Self {
            hamiltonian,
            jumps,
            liouville: SuperOperator { dim, matrix: liou },
            adjoint_liouville: SuperOperator { dim, matrix: adj },
        })
    }

    pub fn zero(dim: usize) -> Self {
        Self::new(CMat::zeros(dim, dim), vec![]).expect("zero generator")
    }

    pub fn dim(&self) -> usize {
        self.liouville.dim
    }

    /// L(ρ).
    pub fn apply(&self, x: &CMat) -> CMat {
        self.liouville.apply_mat(x)
    }

    /// L†(M).
    pub fn apply_adjoint(&self, x: &CMat) -> CMat {
        self.adjoint_liouville.apply_mat(x)
    }

    /// Liouville matrix of Λ_t = e^{tL}.
    pub fn propagator(&self, t: f64) -> SuperOperator {
        SuperOperator {
            dim: self.dim(),
            matrix: matrix_exp(&self.liouville.matrix, t),
        }
    }

    /// Λ_t as a verified channel (t ≥ 0 keeps the semigroup CPTP).
    pub fn propagate(&self, t: f64) -> Result<QuantumChannel> {
        if t < 0.0 {
            return Err(QresError::Validation(format!(
                "propagation time {t} < 0 voids the CPTP guarantee"
            )));
        }
        QuantumChannel::from_liouville(self.propagator(t), format!("exp({t}·L)"))
    }

    /// Heisenberg evolution Λ_t†(M) = e^{tL†}(M).
    pub fn heisenberg(&self, m: &HermitianObservable, t: f64) -> Result<HermitianObservable> {
        let evolved = unvec(
            &(matrix_exp(&self.adjoint_liouville.matrix, t) * vec_op(m.matrix()).column),
        )?;
        HermitianObservable::new(hermitian_part(&evolved))
    }

    fn heisenberg_mat(&self, x: &CMat, t: f64) -> CMat {
        unvec(&(matrix_exp(&self.adjoint_liouville.matrix, t) * vec_op(x).column))
            .expect("square by construction")
    }

    /// GKLS-form rate ceiling 2 R_G ‖M‖_∞ (‖H‖_∞ + Σ γ_k‖L_k‖_∞²).
    pub fn gkls_rate_bound(&self, radius: f64, m_norm: f64) -> f64 {
        let dissipator_strength: f64 = self
            .jumps
            .iter()
            .map(|(op, rate)| rate * op_norm(op).powi(2))
            .sum();
        2.0 * radius * m_norm * (op_norm(&self.hamiltonian) + dissipator_strength)
    }
}

/// C_M(Λ_t) along the semigroup.
pub fn capacity_at(
    gen: &LindbladGenerator,
    g: &ResourceDestroyingMap,
    m: &HermitianObservable,
    t: f64,
) -> Result<f64> {
    Ok(capacity_superop(&gen.propagator(t), g, m, "Λ_t")?.capacity)
}

/// Instantaneous rate Γ_M(t) = ‖(id − G†)(Λ_t†(L†(M)))‖_∞ for linear CPTP G.
pub fn gamma_rate(
    gen: &LindbladGenerator,
    g: &ResourceDestroyingMap,
    m: &HermitianObservable,
    t: f64,
) -> Result<f64> {
    if !g.cptp {
        return Err(QresError::NonLinearMap(
            "spectral rate needs a linear CPTP resource-destroying map; use gamma_rate_sampled".into(),
        ));
    }
    let flow = gen.apply_adjoint(m.matrix());
    let pulled = gen.heisenberg_mat(&flow, t);
    let b = hermitian_part(&(&pulled - g.adjoint().apply_mat(&pulled)));
    Ok(op_norm(&b))
}

/// Sampled lower bound on Γ_M(t) for an arbitrary state-to-state baseline.
pub fn gamma_rate_sampled(
    gen: &LindbladGenerator,
    baseline: &dyn Fn(&DensityOperator) -> DensityOperator,
    m: &HermitianObservable,
    t: f64,
    n_samples: usize,
    sampler: &mut Sampler,
) -> Result<f64> {
    let dim = gen.dim();
    let lambda = gen.propagator(t);
    let mut best = 0.0f64;
    for k in 0..(2 * n_samples) {
        let rho = if k % 2 == 0 {
            sampler.pure_state(dim)
        } else {
            sampler.mixed_state(dim)
        };
        let dev = rho.matrix() - baseline(&rho).matrix();
        let flow = gen.apply(&lambda.apply_mat(&dev));
        best = best.max(crate::operators::hs_inner(m.matrix(), &flow)?.re.abs());
    }
    Ok(best)
}

/// Outcome of the rate-vanishing criterion: Γ_M(t) = 0 exactly when
/// Λ_t†(L†(M)) is Hilbert–Schmidt orthogonal to V_G = span{ρ − G(ρ)}.
#[derive(Debug, Clone, Copy)]
pub struct RateVanishing {
    pub vanishes: bool,
    /// ‖projection onto V_G‖_F of the evolved flow observable.
    pub span_residual: f64,
    pub gamma: f64,
}

pub fn gamma_zero_predicate(
    gen: &LindbladGenerator,
    g: &ResourceDestroyingMap,
    subspaces: &FreeSubspaces,
    m: &HermitianObservable,
    t: f64,
) -> Result<RateVanishing> {
    let flow = gen.apply_adjoint(m.matrix());
    let pulled = hermitian_part(&gen.heisenberg_mat(&flow, t));
    let span_residual = frobenius_norm(&subspaces.project_span(&pulled));
    let gamma = gamma_rate(gen, g, m, t)?;
    let vanishes = span_residual < 1e-10;
    // the subspace criterion and the spectral rate must agree
    if vanishes != (gamma < 1e-9) {
        return Err(QresError::Validation(format!(
            "rate-vanishing criterion disagrees with Γ: residual {span_residual:.3e}, Γ {gamma:.3e}"
        )));
    }
    Ok(RateVanishing {
        vanishes,
        span_residual,
        gamma,
    })
}

/// Variation bound data: lhs = |C_M(Λ_{t₂}) − C_M(Λ_{t₁})| and the
/// adaptive-Simpson integral of Γ_M over [t₁, t₂].
pub fn variation_bound(
    gen: &LindbladGenerator,
    g: &ResourceDestroyingMap,
    m: &HermitianObservable,
    t1: f64,
    t2: f64,
    quad_tol: f64,
) -> Result<(f64, f64)> {
    if t2 < t1 {
        return Err(QresError::Validation("variation bound needs t1 ≤ t2".into()));
    }
    let lhs = (capacity_at(gen, g, m, t2)? - capacity_at(gen, g, m, t1)?).abs();
    let integrand = |s: f64| gamma_rate(gen, g, m, s).expect("rate evaluation");
    let integral = quad::integrate(&integrand, t1, t2, quad_tol)?;
    Ok((lhs, integral))
}

#[derive(Debug, Clone, Copy)]
pub struct DiniEntry {
    pub h: f64,
    pub forward_quotient: f64,
    pub backward_quotient: f64,
    /// Γ_M(t) + L_lip·h.
    pub bound: f64,
    pub within: bool,
}

#[derive(Debug, Clone)]
pub struct DiniReport {
    pub t: f64,
    pub gamma: f64,
    /// Estimated Lipschitz constant of Γ near t (drives the slack model).
    pub lipschitz_estimate: f64,
    pub entries: Vec<DiniEntry>,
    pub all_within: bool,
}

/// One-sided difference quotients of C_M(Λ_t) against Γ_M(t) + slack(h).
///
/// |C(t±h) − C(t)|/h ≤ max_{[t,t±h]} Γ ≤ Γ(t) + L·h, where L bounds |Γ'|
/// via the second flow moment ‖(id − G†)(Λ_s†(L†(L†(M))))‖_∞.
pub fn dini_check(
    gen: &LindbladGenerator,
    g: &ResourceDestroyingMap,
    m: &HermitianObservable,
    t: f64,
    h_list: &[f64],
) -> Result<DiniReport> {
    if h_list.is_empty() || h_list.iter().any(|&h| h <= 0.0) {
        return Err(QresError::Validation("h_list must be positive".into()));
    }
    let h_max = h_list.iter().cloned().fold(0.0f64, f64::max);
    let gamma = gamma_rate(gen, g, m, t)?;
    let flow2 = gen.apply_adjoint(&gen.apply_adjoint(m.matrix()));
    let mut lipschitz = 0.0f64;
    for k in 0..=8 {
        let s = (t - h_max + 2.0 * h_max * k as f64 / 8.0).max(0.0);
        let pulled = gen.heisenberg_mat(&flow2, s);
        let b = hermitian_part(&(&pulled - g.adjoint().apply_mat(&pulled)));
        lipschitz = lipschitz.max(op_norm(&b));
    }
    lipschitz *= 1.5;
    let c_t = capacity_at(gen, g, m, t)?;
    let mut entries = Vec::with_capacity(h_list.len());
    let mut all_within = true;
    for &h in h_list {
        let forward = (capacity_at(gen, g, m, t + h)? - c_t) / h;
        let backward = if t - h >= 0.0 {
            (c_t - capacity_at(gen, g, m, t - h)?) / h
        } else {
            0.0
        };
        let bound = gamma + lipschitz * h;
        let within = forward.abs() <= bound + 1e-9 && backward.abs() <= bound + 1e-9;
        all_within &= within;
        entries.push(DiniEntry {
            h,
            forward_quotient: forward,
            backward_quotient: backward,
            bound,
            within,
        });
    }
    Ok(DiniReport {
        t,
        gamma,
        lipschitz_estimate: lipschitz,
        entries,
        all_within,
    })
}

/// Bundled bound-chain evaluation over a time grid.
#[derive(Debug, Clone)]
pub struct BoundReport {
    pub time_grid: Vec<f64>,
    pub capacity_series: Vec<f64>,
    pub gamma_series: Vec<f64>,
    /// Cumulative ∫_{t₁}^{t} Γ_M.
    pub variation_integral_series: Vec<f64>,
    /// c_{M,G} · L_max · (t − t₁).
    pub uniform_bound_series: Vec<f64>,
    /// c_{M,G} = ‖M‖_∞ · R_G.
    pub c_mg: f64,
    /// Estimated sup_s ‖L_s‖₁→₁ (restart-based lower estimate).
    pub l_max: f64,
    /// Target change in C_M this report was evaluated for.
    pub target: f64,
    /// ΔC*/(c_{M,G}·L_max); infinite when the denominator vanishes.
    pub min_time: f64,
    /// T_max · c_{M,G} · L_max with T_max = t₂ − t₁.
    pub feasibility_ceiling: f64,
    pub feasible: bool,
    /// GKLS-form rate ceiling 2 R_G ‖M‖_∞ (‖H‖_∞ + Σ γ‖L‖_∞²).
    pub gkls_rate_bound: f64,
}

/// Time/feasibility bound chain on `n_grid` uniform points of [t₁, t₂].
#[allow(clippy::too_many_arguments)]
pub fn time_feasibility(
    gen: &LindbladGenerator,
    g: &ResourceDestroyingMap,
    m: &HermitianObservable,
    t1: f64,
    t2: f64,
    target: f64,
    n_grid: usize,
    quad_tol: f64,
    restarts: usize,
    sampler: &mut Sampler,
) -> Result<BoundReport> {
    if t2 < t1 {
        return Err(QresError::Validation("time window needs t1 ≤ t2".into()));
    }
    if target < 0.0 {
        return Err(QresError::Validation("target change must be ≥ 0".into()));
    }
    let n = n_grid.max(2);
    let radius = g.resource_radius(restarts, sampler).value;
    let c_mg = m.op_norm() * radius;
    // time-independent generator: a single norm estimate covers the window
    let l_max = induced_one_norm(&gen.liouville, restarts, sampler).value;

    let mut time_grid = Vec::with_capacity(n);
    let mut capacity_series = Vec::with_capacity(n);
    let mut gamma_series = Vec::with_capacity(n);
    let mut variation_integral_series = Vec::with_capacity(n);
    let mut uniform_bound_series = Vec::with_capacity(n);
    let mut cumulative = 0.0;
    let step = (t2 - t1) / (n - 1) as f64;
    let integrand = |s: f64| gamma_rate(gen, g, m, s).expect("rate evaluation");
    for i in 0..n {
        let t = t1 + step * i as f64;
        time_grid.push(t);
        capacity_series.push(capacity_at(gen, g, m, t)?);
        gamma_series.push(gamma_rate(gen, g, m, t)?);
        if i > 0 {
            cumulative += quad::integrate(&integrand, t - step, t, quad_tol)?;
        }
        variation_integral_series.push(cumulative);
        uniform_bound_series.push(c_mg * l_max * (t - t1));
    }
    let denom = c_mg * l_max;
    let min_time = if target == 0.0 {
        0.0
    } else if denom > 0.0 {
        target / denom
    } else {
        f64::INFINITY
    };
    let feasibility_ceiling = (t2 - t1) * denom;
    Ok(BoundReport {
        time_grid,
        capacity_series,
        gamma_series,
        variation_integral_series,
        uniform_bound_series,
        c_mg,
        l_max,
        target,
        min_time,
        feasibility_ceiling,
        feasible: target <= feasibility_ceiling + 1e-12,
        gkls_rate_bound: gen.gkls_rate_bound(radius, m.op_norm()),
    })
}

/// Λ_t for a time-dependent generator family, by RK4 on dΛ/dt = L_t ∘ Λ_t
/// with step halving until two resolutions agree within `tol`.
pub fn propagate_time_dependent(
    builder: &dyn Fn(f64) -> LindbladGenerator,
    t: f64,
    tol: f64,
) -> Result<SuperOperator> {
    let dim = builder(0.0).dim();
    if t == 0.0 {
        return Ok(SuperOperator::identity(dim));
    }
    // step scale from the generator magnitude at a few probe times
    let probe = (0..=4)
        .map(|k| frobenius_norm(&builder(t * k as f64 / 4.0).liouville.matrix))
        .fold(0.0f64, f64::max)
        .max(1e-12);
    let mut h = (1e-3f64).min(0.01 / probe).min(t);
    let mut prev = rk4_run(builder, t, h, dim);
    for _ in 0..8 {
        h *= 0.5;
        let fine = rk4_run(builder, t, h, dim);
        let err = frobenius_norm(&(&fine - &prev));
        if err < tol {
            return Ok(SuperOperator { dim, matrix: fine });
        }
        prev = fine;
    }
    Err(QresError::Quadrature(format!(
        "time-dependent propagation did not reach tolerance {tol:.1e} (achieved {:.3e})",
        frobenius_norm(&prev) * f64::EPSILON
    )))
}

fn rk4_run(builder: &dyn Fn(f64) -> LindbladGenerator, t: f64, h: f64, dim: usize) -> CMat {
    let steps = (t / h).ceil() as usize;
    let h = t / steps as f64;
    let mut lambda = CMat::identity(dim * dim, dim * dim);
    let mut s = 0.0;
    for _ in 0..steps {
        let l1 = builder(s).liouville.matrix;
        let l2 = builder(s + 0.5 * h).liouville.matrix;
        let l4 = builder(s + h).liouville.matrix;
        let k1 = &l1 * &lambda;
        let k2 = &l2 * (&lambda + k1.scale(0.5 * h));
        let k3 = &l2 * (&lambda + k2.scale(0.5 * h));
        let k4 = &l4 * (&lambda + k3.scale(h));
        lambda += (k1 + k2.scale(2.0) + k3.scale(2.0) + k4).scale(h / 6.0);
        s += h;
    }
    lambda
}

/// Second-order Magnus stepping Λ ← exp(h·L_{t+h/2})·Λ, for stiff families.
pub fn propagate_magnus2(
    builder: &dyn Fn(f64) -> LindbladGenerator,
    t: f64,
    steps: usize,
) -> SuperOperator {
    let dim = builder(0.0).dim();
    let steps = steps.max(1);
    let h = t / steps as f64;
    let mut lambda = CMat::identity(dim * dim, dim * dim);
    for k in 0..steps {
        let mid = h * (k as f64 + 0.5);
        lambda = matrix_exp(&builder(mid).liouville.matrix, h) * lambda;
    }
    SuperOperator { dim, matrix: lambda }
}

/// Every propagated channel on the grid passes the CPTP check.
pub fn propagated_cptp_on_grid(gen: &LindbladGenerator, times: &[f64]) -> bool {
    times.iter().all(|&t| {
        let report = cptp_check(&gen.propagator(t));
        report.is_cp && report.is_tp
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{basis_ket, c, cr, hs_inner, outer, unit_matrix, CVec};
    use approx::assert_relative_eq;

    fn pauli_x() -> CMat {
        CMat::from_row_slice(2, 2, &[cr(0.0), cr(1.0), cr(1.0), cr(0.0)])
    }

    fn decay_generator(gamma: f64) -> LindbladGenerator {
        // |1⟩ → |0⟩ amplitude decay
        LindbladGenerator::new(CMat::zeros(2, 2), vec![(unit_matrix(2, 0, 1), gamma)]).unwrap()
    }

    /// Three-level donor-acceptor generator; basis (g, D, A) = (0, 1, 2).
    fn dimer_generator(delta: f64, j: f64, gphi: f64, gd: f64, ga: f64) -> LindbladGenerator {
        let mut h = CMat::zeros(3, 3);
        h[(1, 1)] = cr(delta / 2.0);
        h[(2, 2)] = cr(-delta / 2.0);
        h[(1, 2)] = cr(j);
        h[(2, 1)] = cr(j);
        LindbladGenerator::new(
            h,
            vec![
                (unit_matrix(3, 1, 1), gphi),
                (unit_matrix(3, 2, 2), gphi),
                (unit_matrix(3, 0, 1), gd),
                (unit_matrix(3, 0, 2), ga),
            ],
        )
        .unwrap()
    }

    fn acceptor() -> HermitianObservable {
        HermitianObservable::new_povm(unit_matrix(3, 2, 2)).unwrap()
    }

    #[test]
    fn zero_generator_and_negative_rate() {
        let z = LindbladGenerator::zero(3);
        assert!(frobenius_norm(&z.liouville.matrix) == 0.0);
        let err = LindbladGenerator::new(CMat::zeros(2, 2), vec![(pauli_x(), -0.1)]).unwrap_err();
        assert!(matches!(err, QresError::NegativeRate { index: 0, .. }));
    }

    #[test]
    fn three_channel_decay_matches_block_formula() {
        let (gx, gy, gz) = (0.3, 0.7, 1.1);
        let x = pauli_x();
        let y = CMat::from_row_slice(2, 2, &[cr(0.0), c(0.0, -1.0), c(0.0, 1.0), cr(0.0)]);
        let z = CMat::from_row_slice(2, 2, &[cr(1.0), cr(0.0), cr(0.0), cr(-1.0)]);
        let gen = LindbladGenerator::new(
            CMat::zeros(2, 2),
            vec![(x.clone(), gx), (y.clone(), gy), (z.clone(), gz)],
        )
        .unwrap();
        let expected = [(x, gx), (y, gy), (z, gz)]
            .iter()
            .fold(CMat::zeros(4, 4), |acc, (s, g)| {
                acc + (kron(s, &s.transpose()) - identity(4)).scale(*g)
            });
        assert!(frobenius_norm(&(&gen.liouville.matrix - expected)) < 1e-12);
    }

    #[test]
    fn generator_is_trace_preserving_and_dual() {
        let mut s = Sampler::seed_from_u64(1);
        let gen = dimer_generator(130.0, 100.0, 2.0, 5.0, 5.0);
        for _ in 0..50 {
            let rho = s.mixed_state(3);
            let flow = gen.apply(rho.matrix());
            assert!(crate::operators::trace(&flow).norm() < 1e-11);
            let m = s.hermitian(3);
            let lhs = hs_inner(&m, &flow).unwrap();
            let rhs = hs_inner(&gen.apply_adjoint(&m), rho.matrix()).unwrap();
            assert!((lhs - rhs).norm() < 1e-11);
        }
    }

    #[test]
    fn propagation_identity_and_exponential_decay() {
        let gen = decay_generator(0.8);
        let id = gen.propagate(0.0).unwrap();
        assert!(frobenius_norm(&(id.liouville_matrix() - identity(4))) < 1e-14);
        // excited population halves at t = ln2/γ
        let t_half = std::f64::consts::LN_2 / 0.8;
        let excited = DensityOperator::pure(&basis_ket(2, 1)).unwrap();
        let out = gen.propagate(t_half).unwrap().apply(&excited).unwrap();
        assert_relative_eq!(out.matrix()[(1, 1)].re, 0.5, epsilon = 1e-12);
        assert!(gen.propagate(-0.1).is_err());
    }

    #[test]
    fn heisenberg_duality_on_random_inputs() {
        let gen = dimer_generator(50.0, 80.0, 3.0, 4.0, 6.0);
        let mut s = Sampler::seed_from_u64(2);
        for _ in 0..20 {
            let rho = s.mixed_state(3);
            let m = HermitianObservable::new(s.hermitian(3)).unwrap();
            let t = s.uniform(0.0, 0.05);
            let lhs = hs_inner(m.matrix(), &gen.propagator(t).apply_mat(rho.matrix())).unwrap();
            let rhs = hs_inner(gen.heisenberg(&m, t).unwrap().matrix(), rho.matrix()).unwrap();
            assert!((lhs - rhs).norm() < 1e-9);
        }
    }

    #[test]
    fn propagated_channels_stay_cptp() {
        let gen = dimer_generator(130.0, 100.0, 7.0, 5.0, 5.0);
        let times: Vec<f64> = (0..25).map(|i| i as f64 * 0.01).collect();
        assert!(propagated_cptp_on_grid(&gen, &times));
    }

    #[test]
    fn gamma_vanishes_for_identity_readout() {
        let gen = dimer_generator(130.0, 100.0, 0.0, 5.0, 5.0);
        let g = ResourceDestroyingMap::site_dephasing(3);
        let m = HermitianObservable::new(identity(3)).unwrap();
        assert!(gamma_rate(&gen, &g, &m, 0.37).unwrap() < 1e-12);
    }

    #[test]
    fn gamma_at_resonance_start_equals_coupling() {
        // Δ=0, γφ=0: Γ(0) = |J|; the detuned generator gives the same t=0 value
        let g = ResourceDestroyingMap::site_dephasing(3);
        for delta in [0.0, 130.0] {
            let gen = dimer_generator(delta, 100.0, 0.0, 5.0, 5.0);
            let rate = gamma_rate(&gen, &g, &acceptor(), 0.0).unwrap();
            assert_relative_eq!(rate, 100.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn rate_vanishing_predicate_cases() {
        let g = ResourceDestroyingMap::site_dephasing(3);
        let sub = g.subspaces();
        // pure-dephasing generator keeps diagonal observables diagonal
        let deph = LindbladGenerator::new(
            CMat::zeros(3, 3),
            vec![(unit_matrix(3, 1, 1), 2.0), (unit_matrix(3, 2, 2), 2.0)],
        )
        .unwrap();
        let r = gamma_zero_predicate(&deph, &g, &sub, &acceptor(), 0.4).unwrap();
        assert!(r.vanishes && r.gamma < 1e-12);

        // coherent coupling makes the flow leave the diagonal subspace
        let gen = dimer_generator(130.0, 100.0, 0.0, 5.0, 5.0);
        let r = gamma_zero_predicate(&gen, &g, &sub, &acceptor(), 0.013).unwrap();
        assert!(!r.vanishes && r.gamma > 1.0);

        // trivial map: V_G = {0}, every flow is orthogonal to it
        let id_map = crate::resource::ResourceDestroyingMap::custom_unchecked(
            SuperOperator::identity(3),
            vec![],
            true,
            true,
        );
        let sub_id = id_map.subspaces();
        let r = gamma_zero_predicate(&gen, &id_map, &sub_id, &acceptor(), 0.013).unwrap();
        assert!(r.vanishes);
    }

    #[test]
    fn variation_bound_holds_and_degenerates() {
        let gen = dimer_generator(130.0, 100.0, 0.0, 5.0, 5.0);
        let g = ResourceDestroyingMap::site_dephasing(3);
        let m = acceptor();
        let (lhs, integral) = variation_bound(&gen, &g, &m, 0.02, 0.02, 1e-9).unwrap();
        assert_eq!((lhs, integral), (0.0, 0.0));
        for (t1, t2) in [(0.0, 0.01), (0.0, 0.05), (0.01, 0.04)] {
            let (lhs, integral) = variation_bound(&gen, &g, &m, t1, t2, 1e-9).unwrap();
            assert!(lhs <= integral + 1e-9 + 1e-9, "({t1},{t2}): {lhs} vs {integral}");
        }
    }

    #[test]
    fn variation_bound_zero_rate_interval() {
        // diagonal decay without coherent coupling: Γ ≡ 0 and C stays 0
        let g = ResourceDestroyingMap::site_dephasing(3);
        let gen = dimer_generator(130.0, 0.0, 0.0, 5.0, 5.0);
        let (lhs, integral) = variation_bound(&gen, &g, &acceptor(), 0.0, 0.3, 1e-10).unwrap();
        assert!(lhs < 1e-12 && integral < 1e-10);
    }

    #[test]
    fn dini_quotients_below_rate_plus_slack() {
        let gen = dimer_generator(0.0, 100.0, 0.0, 5.0, 5.0);
        let g = ResourceDestroyingMap::site_dephasing(3);
        let m = acceptor();
        let hs: Vec<f64> = vec![1e-3, 5e-4, 2.5e-4, 1e-4, 1e-5];
        // smooth point
        let rep = dini_check(&gen, &g, &m, 0.003, &hs).unwrap();
        assert!(rep.all_within, "{rep:?}");
        // fold of |sin(2Jt)| at t = π/(2J): left/right slopes differ in sign
        let t_kink = std::f64::consts::PI / 200.0;
        let rep = dini_check(&gen, &g, &m, t_kink, &hs).unwrap();
        assert!(rep.all_within, "{rep:?}");
        let last = rep.entries.last().unwrap();
        assert!(
            (last.forward_quotient - last.backward_quotient).abs() > 50.0,
            "kink should split the one-sided quotients: {last:?}"
        );
        // smooth region: Richardson-extrapolated |dC/dt| stays below Γ
        // (here |dC/dt| = Γ exactly, so allow the O(h²·(2J)³) residual)
        let rep = dini_check(&gen, &g, &m, 0.002, &[2e-5, 1e-5]).unwrap();
        let q2 = rep.entries[0].forward_quotient;
        let q1 = rep.entries[1].forward_quotient;
        let extrapolated = 2.0 * q1 - q2;
        assert!(extrapolated.abs() <= rep.gamma + 1e-3);
    }

    #[test]
    fn time_feasibility_report_is_consistent() {
        let gen = dimer_generator(0.0, 100.0, 0.0, 5.0, 5.0);
        let g = ResourceDestroyingMap::site_dephasing(3);
        let m = acceptor();
        let mut s = Sampler::seed_from_u64(3);
        let report = time_feasibility(&gen, &g, &m, 0.0, 0.05, 0.3, 40, 1e-9, 24, &mut s).unwrap();
        // variation bound between every ordered grid pair
        for i in 0..report.time_grid.len() {
            for j in (i + 1)..report.time_grid.len() {
                let dc = (report.capacity_series[j] - report.capacity_series[i]).abs();
                let dv = report.variation_integral_series[j] - report.variation_integral_series[i];
                assert!(dc <= dv + 1e-8, "pair ({i},{j}): {dc} vs {dv}");
            }
        }
        // integral below the uniform line, rates below both ceilings
        for i in 0..report.time_grid.len() {
            assert!(report.variation_integral_series[i] <= report.uniform_bound_series[i] + 1e-8);
            assert!(report.gamma_series[i] <= report.c_mg * report.l_max + 1e-8);
            assert!(report.gamma_series[i] <= report.gkls_rate_bound + 1e-8);
        }
        // absolute-continuity proxy: total variation of the capacity series
        // never exceeds the full rate integral
        let total_variation: f64 = report
            .capacity_series
            .windows(2)
            .map(|w| (w[1] - w[0]).abs())
            .sum();
        assert!(
            total_variation <= *report.variation_integral_series.last().unwrap() + 1e-8,
            "total variation {total_variation}"
        );
        assert!(report.min_time > 0.0);
        assert_relative_eq!(
            report.min_time,
            report.target / (report.c_mg * report.l_max),
            epsilon = 1e-12
        );

        let zero_target = time_feasibility(&gen, &g, &m, 0.0, 0.05, 0.0, 8, 1e-9, 8, &mut s).unwrap();
        assert_eq!(zero_target.min_time, 0.0);
        assert!(zero_target.feasible);

        let hopeless = time_feasibility(&gen, &g, &m, 0.0, 1e-4, 10.0, 8, 1e-9, 8, &mut s).unwrap();
        assert!(!hopeless.feasible);
    }

    #[test]
    fn time_dependent_constant_family_matches_semigroup() {
        let gen = decay_generator(0.9);
        let builder = |_: f64| decay_generator(0.9);
        let td = propagate_time_dependent(&builder, 0.7, 1e-9).unwrap();
        let exact = gen.propagator(0.7);
        assert!(frobenius_norm(&(&td.matrix - &exact.matrix)) < 1e-9);
        let m2 = propagate_magnus2(&builder, 0.7, 400);
        assert!(frobenius_norm(&(&m2.matrix - &exact.matrix)) < 1e-7);
    }

    #[test]
    fn time_dependent_ramped_dephasing_has_gaussian_coherence_decay() {
        // γ(t) = 2t dephasing on the projector pair: ρ01(t) = e^{−∫γ} ρ01(0) = e^{−t²}ρ01(0)
        let builder = |t: f64| {
            LindbladGenerator::new(
                CMat::zeros(2, 2),
                vec![
                    (unit_matrix(2, 0, 0), 2.0 * t.max(0.0)),
                    (unit_matrix(2, 1, 1), 2.0 * t.max(0.0)),
                ],
            )
            .unwrap()
        };
        let t = 0.8;
        let lam = propagate_time_dependent(&builder, t, 1e-10).unwrap();
        let plus = outer(
            &CVec::from_vec(vec![cr(1.0), cr(1.0)]).unscale(2.0f64.sqrt()),
            &CVec::from_vec(vec![cr(1.0), cr(1.0)]).unscale(2.0f64.sqrt()),
        );
        let out = lam.apply_mat(&plus);
        assert_relative_eq!(out[(0, 1)].re, 0.5 * (-t * t).exp(), epsilon = 1e-8);
    }

    #[test]
    fn gamma_dominated_by_norm_ceilings_on_grid() {
        let gen = dimer_generator(130.0, 100.0, 0.0, 5.0, 5.0);
        let g = ResourceDestroyingMap::site_dephasing(3);
        let m = acceptor();
        let mut s = Sampler::seed_from_u64(4);
        let radius = g.resource_radius(16, &mut s).value;
        let l_est = induced_one_norm(&gen.liouville, 24, &mut s).value;
        for i in 0..20 {
            let t = i as f64 * 0.005;
            let rate = gamma_rate(&gen, &g, &m, t).unwrap();
            assert!(rate <= m.op_norm() * radius * l_est + 1e-8);
            assert!(rate <= gen.gkls_rate_bound(radius, m.op_norm()) + 1e-8);
        }
    }
}
