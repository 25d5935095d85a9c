//! Static impact functionals for a fixed channel, resource-destroying map,
//! and readout observable.
//!
//! The impact functional C_M(Λ) = sup_ρ |Tr[M(Λ(ρ) − Λ(G(ρ)))]| reduces, for
//! linear Hermiticity-preserving G, to the operator norm of
//! B = (id − G†)(Λ†(M)); the optimal states are eigenstates of B with
//! extremal eigenvalue. The module also provides the unpaired benchmark
//! Π_M(Λ), the divergence-projected functional used when no
//! resource-destroying map exists, sampled convex-geometry checks (support
//! function / polar membership), and the binary hypothesis-testing layer.

use crate::channels::{QuantumChannel, SuperOperator};
use crate::error::{QresError, Result};
use crate::operators::{
    cr, eig_hermitian, frobenius_norm, hermitian_part, hs_inner, identity, op_norm, outer,
    trace_norm, CMat, DensityOperator, HermitianObservable,
};
use crate::resource::ResourceDestroyingMap;
use crate::sampling::Sampler;

/// B = (id − G†)(Λ†(M)); Hermitian for Hermiticity-preserving G.
#[derive(Debug, Clone)]
pub struct ImpactOperator {
    pub operator: CMat,
    pub channel_label: String,
    pub map_label: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Spectral,
    Sampled,
}

#[derive(Debug, Clone)]
pub struct ImpactResult {
    /// max(plus, minus) = ‖B‖_∞ for the spectral method.
    pub capacity: f64,
    /// Maximal enhancement sup_ρ ΔY ≥ 0.
    pub plus: f64,
    /// Maximal suppression sup_ρ(−ΔY) ≥ 0.
    pub minus: f64,
    /// State attaining ±capacity (spectral: extremal eigenprojector of B;
    /// tie between λ_max and −λ_min reports the λ_max eigenstate).
    pub optimizer: DensityOperator,
    pub method: Method,
    /// λ_max(B) = −λ_min(B) within 1e-12.
    pub degenerate_extremes: bool,
    /// For idempotent G: capacity vanishes iff Λ†(M) lies in im(G†).
    pub vanishes: Option<bool>,
}

/// Yield difference ΔY(ρ) = Tr[M(Λ(ρ) − Λ(G(ρ)))].
pub fn delta_yield(
    ch: &QuantumChannel,
    g: &ResourceDestroyingMap,
    m: &HermitianObservable,
    rho: &DensityOperator,
) -> Result<f64> {
    if ch.dim != g.dim() || ch.dim != m.dim() || ch.dim != rho.dim() {
        return Err(QresError::DimensionMismatch("delta_yield operands".into()));
    }
    let dev = ch.apply_mat(rho.matrix()) - ch.apply_mat(&g.apply_mat(rho.matrix()));
    Ok(hs_inner(m.matrix(), &dev)?.re)
}

/// Same with an arbitrary state-to-state baseline (possibly non-linear).
pub fn delta_yield_callable(
    ch: &QuantumChannel,
    baseline: &dyn Fn(&DensityOperator) -> DensityOperator,
    m: &HermitianObservable,
    rho: &DensityOperator,
) -> Result<f64> {
    let free = baseline(rho);
    let dev = ch.apply_mat(rho.matrix()) - ch.apply_mat(free.matrix());
    Ok(hs_inner(m.matrix(), &dev)?.re)
}

/// B = (id − G†)(Λ†(M)) for a channel given as a superoperator.
pub fn impact_operator_superop(
    s: &SuperOperator,
    g: &ResourceDestroyingMap,
    m: &HermitianObservable,
    label: &str,
) -> Result<ImpactOperator> {
    if s.dim != g.dim() || s.dim != m.dim() {
        return Err(QresError::DimensionMismatch("impact operator operands".into()));
    }
    let pulled = s.adjoint().apply_mat(m.matrix());
    let b = &pulled - g.adjoint().apply_mat(&pulled);
    let defect = crate::operators::hermiticity_defect(&b);
    if defect > 1e-11 * frobenius_norm(&b).max(1.0) {
        return Err(QresError::NonLinearMap(format!(
            "impact operator not Hermitian (defect {defect:.3e}); map must be linear and Hermiticity preserving"
        )));
    }
    Ok(ImpactOperator {
        operator: hermitian_part(&b),
        channel_label: label.to_string(),
        map_label: format!("{:?}", g.kind),
    })
}

pub fn impact_operator(
    ch: &QuantumChannel,
    g: &ResourceDestroyingMap,
    m: &HermitianObservable,
) -> Result<ImpactOperator> {
    impact_operator_superop(ch.superoperator(), g, m, &ch.label)
}

/// Spectral evaluation of the impact functional for a linear map.
pub fn capacity(
    ch: &QuantumChannel,
    g: &ResourceDestroyingMap,
    m: &HermitianObservable,
) -> Result<ImpactResult> {
    capacity_superop(ch.superoperator(), g, m, &ch.label)
}

/// Spectral evaluation for an arbitrary Hermiticity-preserving superoperator
/// (used for resource parts of decompositions, which are not channels).
pub fn capacity_superop(
    s: &SuperOperator,
    g: &ResourceDestroyingMap,
    m: &HermitianObservable,
    label: &str,
) -> Result<ImpactResult> {
    let dim = s.dim;
    // M = α1 with trace-preserving G gives ΔY ≡ 0; skip the eigensolve
    let alpha = crate::operators::trace(m.matrix()) / cr(dim as f64);
    let uniform_defect = frobenius_norm(&(m.matrix() - identity(dim).map(|e| e * alpha)));
    if g.cptp && uniform_defect < 1e-13 * m.op_norm().max(1.0) {
        return Ok(ImpactResult {
            capacity: 0.0,
            plus: 0.0,
            minus: 0.0,
            optimizer: DensityOperator::maximally_mixed(dim),
            method: Method::Spectral,
            degenerate_extremes: true,
            vanishes: Some(true),
        });
    }
    let b = impact_operator_superop(s, g, m, label)?;
    let (vals, vecs) = eig_hermitian(&b.operator)?;
    let lmax = vals[0];
    let lmin = vals[dim - 1];
    let plus = lmax.max(0.0);
    let minus = (-lmin).max(0.0);
    let cap = plus.max(minus);
    let degenerate = (lmax + lmin).abs() <= 1e-12;
    let col = if plus >= minus || degenerate { 0 } else { dim - 1 };
    let ket = vecs.column(col).clone_owned();
    let optimizer = DensityOperator::new(outer(&ket, &ket))?;
    let idempotent =
        frobenius_norm(&(&g.superop.matrix * &g.superop.matrix - &g.superop.matrix)) < 1e-10;
    Ok(ImpactResult {
        capacity: cap,
        plus,
        minus,
        optimizer,
        method: Method::Spectral,
        degenerate_extremes: degenerate,
        vanishes: idempotent.then_some(cap < 1e-12 * m.op_norm().max(1.0)),
    })
}

/// Sampled lower bound on the impact functional for an arbitrary baseline
/// map. Scans n pure and n mixed inputs; for linear baselines the result
/// lies within sampling error below the spectral value.
pub fn capacity_sampled(
    ch: &QuantumChannel,
    baseline: &dyn Fn(&DensityOperator) -> DensityOperator,
    m: &HermitianObservable,
    n_samples: usize,
    sampler: &mut Sampler,
) -> Result<ImpactResult> {
    let dim = ch.dim;
    let mut plus = 0.0f64;
    let mut minus = 0.0f64;
    let mut best = 0.0f64;
    let mut optimizer = DensityOperator::maximally_mixed(dim);
    for k in 0..(2 * n_samples) {
        let rho = if k % 2 == 0 {
            sampler.pure_state(dim)
        } else {
            sampler.mixed_state(dim)
        };
        let dy = delta_yield_callable(ch, baseline, m, &rho)?;
        plus = plus.max(dy);
        minus = minus.max(-dy);
        if dy.abs() > best {
            best = dy.abs();
            optimizer = rho;
        }
    }
    Ok(ImpactResult {
        capacity: plus.max(minus),
        plus,
        minus,
        optimizer,
        method: Method::Sampled,
        degenerate_extremes: false,
        vanishes: None,
    })
}

/// Unpaired benchmark Π_M(Λ): optimal yield over all states minus optimal
/// yield over the free extreme points. Always ≤ C_M(Λ) and ≥ 0 (up to
/// round-off) for a nonempty free set.
pub fn pi_advantage(
    ch: &QuantumChannel,
    free_extreme_points: &[DensityOperator],
    m: &HermitianObservable,
) -> Result<f64> {
    if free_extreme_points.is_empty() {
        return Err(QresError::Validation("empty free-state list".into()));
    }
    let pulled = ch.adjoint_apply_mat(m.matrix());
    let global = op_norm(&hermitian_part(&pulled));
    // |Tr[MΛσ]| is convex in σ, so the free optimum sits on an extreme point
    let free_best = free_extreme_points
        .iter()
        .map(|sigma| hs_inner(&pulled, sigma.matrix()).expect("matched dims").re.abs())
        .fold(0.0f64, f64::max);
    Ok(global - free_best)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Divergence {
    TraceDistance,
    RelativeEntropy,
}

fn divergence_value(div: Divergence, rho: &CMat, sigma: &CMat) -> f64 {
    match div {
        Divergence::TraceDistance => 0.5 * trace_norm(&(rho - sigma)),
        Divergence::RelativeEntropy => relative_entropy(rho, sigma),
    }
}

/// S(ρ‖σ) = Tr[ρ ln ρ] − Tr[ρ ln σ]; +∞ when supp ρ ⊄ supp σ.
pub fn relative_entropy(rho: &CMat, sigma: &CMat) -> f64 {
    let (rvals, _) = eig_hermitian(&hermitian_part(rho)).expect("Hermitian state");
    let mut s = 0.0;
    for &l in &rvals {
        if l > 1e-14 {
            s += l * l.ln();
        }
    }
    let (svals, svecs) = eig_hermitian(&hermitian_part(sigma)).expect("Hermitian state");
    for (j, &w) in svals.iter().enumerate() {
        let v = svecs.column(j).clone_owned();
        let pop = hs_inner(&outer(&v, &v), rho).expect("matched dims").re;
        if w > 1e-14 {
            s -= pop * w.ln();
        } else if pop > 1e-12 {
            return f64::INFINITY;
        }
    }
    s
}

/// Closest-free-state machinery: simplex grid plus shrinking pattern-search
/// refinement; returns the refined minimizer together with every candidate
/// within the optimistic tie window of the minimum.
fn closest_free_states(
    rho: &CMat,
    extremes: &[DensityOperator],
    div: Divergence,
    grid_resolution: usize,
) -> Vec<CMat> {
    let k = extremes.len();
    let mix = |w: &[f64]| -> CMat {
        extremes
            .iter()
            .zip(w)
            .fold(CMat::zeros(rho.nrows(), rho.ncols()), |acc, (s, &wi)| {
                acc + s.matrix().scale(wi)
            })
    };
    let f = |w: &[f64]| divergence_value(div, rho, &mix(w));

    // cap the grid so high resolutions with many extreme points stay tractable
    let mut res = grid_resolution.max(1);
    while compositions_count(res, k) > 200_000 && res > 2 {
        res /= 2;
    }
    let mut best_w = vec![1.0 / k as f64; k];
    let mut best = f(&best_w);
    let mut grid_hits: Vec<(Vec<f64>, f64)> = Vec::new();
    enumerate_compositions(res, k, &mut |w| {
        let val = f(w);
        grid_hits.push((w.to_vec(), val));
        if val < best {
            best = val;
            best_w = w.to_vec();
        }
    });

    // local refinement from the best grid point
    let (w_ref, d_min) = pattern_search_simplex(&f, best_w, 1.0 / res as f64, 1e-10);

    const TIE_WINDOW: f64 = 1e-9;
    let mut out = vec![mix(&w_ref)];
    for (w, val) in grid_hits {
        if val <= d_min + TIE_WINDOW {
            let candidate = mix(&w);
            if out
                .iter()
                .all(|existing| frobenius_norm(&(existing - &candidate)) > 1e-12)
            {
                out.push(candidate);
            }
        }
    }
    out
}

fn compositions_count(res: usize, k: usize) -> usize {
    // C(res + k − 1, k − 1)
    let mut num = 1usize;
    for i in 0..(k - 1) {
        num = num.saturating_mul(res + 1 + i) / (i + 1);
    }
    num
}

fn enumerate_compositions(res: usize, k: usize, visit: &mut impl FnMut(&[f64])) {
    let mut parts = vec![0usize; k];
    fn rec(res_left: usize, idx: usize, parts: &mut Vec<usize>, res: usize, visit: &mut impl FnMut(&[f64])) {
        if idx == parts.len() - 1 {
            parts[idx] = res_left;
            let w: Vec<f64> = parts.iter().map(|&p| p as f64 / res as f64).collect();
            visit(&w);
            return;
        }
        for p in 0..=res_left {
            parts[idx] = p;
            rec(res_left - p, idx + 1, parts, res, visit);
        }
    }
    rec(res, 0, &mut parts, res, visit);
}

/// Shrinking pattern search over the probability simplex along edge
/// directions e_i − e_j.
pub(crate) fn pattern_search_simplex(
    f: &dyn Fn(&[f64]) -> f64,
    w0: Vec<f64>,
    initial_step: f64,
    final_step: f64,
) -> (Vec<f64>, f64) {
    let k = w0.len();
    let mut w = w0;
    let mut best = f(&w);
    let mut step = initial_step.max(final_step);
    while step > final_step {
        let mut improved = true;
        while improved {
            improved = false;
            for i in 0..k {
                for j in 0..k {
                    if i == j {
                        continue;
                    }
                    let delta = step.min(w[j]);
                    if delta <= 0.0 {
                        continue;
                    }
                    let mut cand = w.clone();
                    cand[i] += delta;
                    cand[j] -= delta;
                    let val = f(&cand);
                    if val < best - 1e-16 {
                        best = val;
                        w = cand;
                        improved = true;
                    }
                }
            }
        }
        step *= 0.35;
    }
    (w, best)
}

/// Divergence-projected impact functional for theories without a
/// resource-destroying map: each sampled state is paired with its closest
/// free state(s), ties resolved optimistically (largest yield change among
/// near-minimizers). Lower-bound semantics: sampling can only undershoot.
pub fn projected_capacity(
    ch: &QuantumChannel,
    free_extreme_points: &[DensityOperator],
    div: Divergence,
    m: &HermitianObservable,
    grid_resolution: usize,
    n_samples: usize,
    sampler: &mut Sampler,
) -> Result<(f64, Vec<(DensityOperator, DensityOperator)>)> {
    if free_extreme_points.is_empty() {
        return Err(QresError::Validation("empty free-state list".into()));
    }
    let dim = ch.dim;
    if dim > 4 {
        return Err(QresError::Unsupported(
            "projected functional grid search limited to dim ≤ 4".into(),
        ));
    }
    let mut value = 0.0f64;
    let mut pairs = Vec::new();
    for kidx in 0..n_samples {
        let rho = if kidx_is_pure(kidx) {
            sampler.pure_state(dim)
        } else {
            sampler.mixed_state(dim)
        };
        let minimizers = closest_free_states(rho.matrix(), free_extreme_points, div, grid_resolution);
        let out_rho = ch.apply_mat(rho.matrix());
        let mut best_here = -1.0f64;
        let mut best_sigma = minimizers[0].clone();
        for sigma in &minimizers {
            let dy = hs_inner(m.matrix(), &(&out_rho - ch.apply_mat(sigma)))?.re.abs();
            if dy > best_here {
                best_here = dy;
                best_sigma = sigma.clone();
            }
        }
        value = value.max(best_here);
        pairs.push((
            rho,
            DensityOperator::new(hermitian_part(&best_sigma))?,
        ));
    }
    Ok((value, pairs))
}

fn kidx_is_pure(k: usize) -> bool {
    k.is_multiple_of(2)
}

/// Sampled analogue of the instantaneous rate for the divergence-projected
/// setting: max over samples and near-minimizers of |Tr[M L(Λ(ρ − π(ρ)))]|.
/// No spectral shortcut exists without a resource-destroying map.
#[allow(clippy::too_many_arguments)]
pub fn projected_rate(
    lambda_t: &SuperOperator,
    generator: &SuperOperator,
    free_extreme_points: &[DensityOperator],
    div: Divergence,
    m: &HermitianObservable,
    grid_resolution: usize,
    n_samples: usize,
    sampler: &mut Sampler,
) -> Result<f64> {
    if free_extreme_points.is_empty() {
        return Err(QresError::Validation("empty free-state list".into()));
    }
    let dim = lambda_t.dim;
    let mut value = 0.0f64;
    for kidx in 0..n_samples {
        let rho = if kidx_is_pure(kidx) {
            sampler.pure_state(dim)
        } else {
            sampler.mixed_state(dim)
        };
        let minimizers = closest_free_states(rho.matrix(), free_extreme_points, div, grid_resolution);
        for sigma in &minimizers {
            let flow = generator.apply_mat(&lambda_t.apply_mat(&(rho.matrix() - sigma)));
            value = value.max(hs_inner(m.matrix(), &flow)?.re.abs());
        }
    }
    Ok(value)
}

/// Sampled convex-geometry audit: support-function consistency and polar
/// membership of the readout.
#[derive(Debug, Clone)]
pub struct GeometryReport {
    /// max over sampled deviations ±O of ⟨M, O⟩; optimizer deviation included.
    pub sampled_support: f64,
    pub capacity: f64,
    /// sampled support never exceeds the capacity (within 1e-12)
    pub support_bounded: bool,
    /// optimizer deviation pushes the sampled support up to the capacity
    pub support_attained: bool,
    /// C_M ≤ 1, i.e. M lies in the polar of the deviation body
    pub polar_member: bool,
    /// every sampled slab condition |⟨M, O⟩| ≤ 1 holds
    pub polar_member_sampled: bool,
    /// |C_M − 1| < 1e-9: M sits on the polar boundary
    pub polar_boundary: bool,
    pub consistent: bool,
}

pub fn geometry_checks(
    ch: &QuantumChannel,
    g: &ResourceDestroyingMap,
    m: &HermitianObservable,
    n_samples: usize,
    sampler: &mut Sampler,
) -> Result<GeometryReport> {
    let dim = ch.dim;
    let spectral = capacity(ch, g, m)?;
    let deviation = |rho: &CMat| ch.apply_mat(rho) - ch.apply_mat(&g.apply_mat(rho));
    let mut sampled_support = f64::NEG_INFINITY;
    let mut polar_member_sampled = true;
    let mut states: Vec<CMat> = Vec::with_capacity(n_samples + 1);
    for k in 0..n_samples {
        states.push(if k % 2 == 0 {
            sampler.pure_state(dim).matrix().clone()
        } else {
            sampler.mixed_state(dim).matrix().clone()
        });
    }
    states.push(spectral.optimizer.matrix().clone());
    for rho in &states {
        let o = deviation(rho);
        let overlap = hs_inner(m.matrix(), &o)?.re;
        sampled_support = sampled_support.max(overlap).max(-overlap);
        if overlap.abs() > 1.0 {
            polar_member_sampled = false;
        }
    }
    let support_bounded = sampled_support <= spectral.capacity + 1e-12;
    let support_attained = sampled_support >= spectral.capacity - 1e-10;
    let polar_member = spectral.capacity <= 1.0;
    let polar_boundary = (spectral.capacity - 1.0).abs() < 1e-9;
    // the sampled slab test can only miss violations, never invent them
    let consistent = support_bounded && (polar_member || !polar_member_sampled || polar_boundary);
    Ok(GeometryReport {
        sampled_support,
        capacity: spectral.capacity,
        support_bounded,
        support_attained,
        polar_member,
        polar_member_sampled,
        polar_boundary,
        consistent,
    })
}

/// Binary hypothesis test: was the input ρ (H₁) or its free counterpart
/// G(ρ) (H₀)? Measured through the fixed pair (Λ, M) with equal priors.
#[derive(Debug, Clone)]
pub struct HypothesisReport {
    pub p0: f64,
    pub p1: f64,
    /// |ΔY(ρ)| = |p₁ − p₀|.
    pub bias: f64,
    /// Optimal single-shot success probability ½ + bias/2.
    pub p_succ: f64,
    pub n: u64,
    pub trials: u64,
    /// exp(−n·bias²/2), the n-shot threshold-rule error bound.
    pub hoeffding_bound: f64,
    pub empirical_error: f64,
    /// 3σ Monte-Carlo slack on the empirical error at this trial count.
    pub statistical_slack: f64,
}

/// Monte-Carlo simulation of the n-shot threshold rule at τ = (p₀+p₁)/2.
/// The rule depends on the outcome string only through the success count,
/// so each trial draws a single binomial.
pub fn hypothesis_test(
    ch: &QuantumChannel,
    g: &ResourceDestroyingMap,
    m: &HermitianObservable,
    rho: &DensityOperator,
    n: u64,
    trials: u64,
    sampler: &mut Sampler,
) -> Result<HypothesisReport> {
    if !m.is_povm() {
        return Err(QresError::Validation(
            "hypothesis test needs a POVM element (0 ≤ M ≤ 1); probabilities undefined otherwise".into(),
        ));
    }
    if n == 0 {
        return Err(QresError::Validation("shot count must be ≥ 1".into()));
    }
    let p0 = hs_inner(m.matrix(), &ch.apply_mat(&g.apply_mat(rho.matrix())))?
        .re
        .clamp(0.0, 1.0);
    let p1 = hs_inner(m.matrix(), &ch.apply_mat(rho.matrix()))?.re.clamp(0.0, 1.0);
    let bias = (p1 - p0).abs();
    let tau = 0.5 * (p0 + p1);
    let mut errors = 0u64;
    for _ in 0..trials {
        let truth_is_resourceful = sampler.bernoulli(0.5);
        let p = if truth_is_resourceful { p1 } else { p0 };
        let successes = sampler.binomial(n, p);
        let mean = successes as f64 / n as f64;
        let decide_resourceful = if p1 >= p0 { mean >= tau } else { mean <= tau };
        if decide_resourceful != truth_is_resourceful {
            errors += 1;
        }
    }
    let empirical_error = errors as f64 / trials as f64;
    let hoeffding_bound = (-0.5 * n as f64 * bias * bias).exp();
    let b = hoeffding_bound.min(1.0);
    let statistical_slack = 3.0 * (b * (1.0 - b) / trials as f64).sqrt();
    Ok(HypothesisReport {
        p0,
        p1,
        bias,
        p_succ: 0.5 + 0.5 * bias,
        n,
        trials,
        hoeffding_bound,
        empirical_error,
        statistical_slack,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::random_channel;
    use crate::operators::{basis_ket, c, unit_matrix, CVec};
    use approx::assert_relative_eq;

    /// Coherent donor-acceptor mixing on span{|g⟩,|D⟩,|A⟩}; indices (0,1,2).
    fn mixing_unitary(theta: f64) -> CMat {
        let (c_, s_) = (theta.cos(), theta.sin());
        CMat::from_row_slice(
            3,
            3,
            &[
                cr(1.0),
                cr(0.0),
                cr(0.0),
                cr(0.0),
                cr(c_),
                cr(-s_),
                cr(0.0),
                cr(s_),
                cr(c_),
            ],
        )
    }

    fn acceptor_projector() -> HermitianObservable {
        HermitianObservable::new_povm(unit_matrix(3, 2, 2)).unwrap()
    }

    fn site3() -> ResourceDestroyingMap {
        ResourceDestroyingMap::site_dephasing(3)
    }

    #[test]
    fn delta_yield_vanishes_for_identity_readout_and_fixed_points() {
        let mut s = Sampler::seed_from_u64(1);
        let ch = random_channel(&mut s, 3, 3);
        let g = site3();
        let m_id = HermitianObservable::new(identity(3)).unwrap();
        let rho = s.mixed_state(3);
        assert!(delta_yield(&ch, &g, &m_id, &rho).unwrap().abs() < 1e-12);

        // diagonal states are fixed by site dephasing
        let diag = DensityOperator::new(
            unit_matrix(3, 0, 0).scale(0.2) + unit_matrix(3, 1, 1).scale(0.3) + unit_matrix(3, 2, 2).scale(0.5),
        )
        .unwrap();
        let m = HermitianObservable::new(s.hermitian(3)).unwrap();
        assert!(delta_yield(&ch, &g, &m, &diag).unwrap().abs() < 1e-12);
    }

    #[test]
    fn delta_yield_mixing_on_plus_state() {
        let ch = QuantumChannel::unitary(&mixing_unitary(std::f64::consts::FRAC_PI_4), "mix").unwrap();
        let plus_da = DensityOperator::pure(&CVec::from_vec(vec![cr(0.0), cr(1.0), cr(1.0)])).unwrap();
        let dy = delta_yield(&ch, &site3(), &acceptor_projector(), &plus_da).unwrap();
        assert_relative_eq!(dy, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn delta_yield_equals_impact_operator_expectation() {
        let mut s = Sampler::seed_from_u64(2);
        let g = site3();
        for _ in 0..50 {
            let ch = random_channel(&mut s, 3, 4);
            let m = HermitianObservable::new(s.hermitian(3)).unwrap();
            let rho = s.mixed_state(3);
            let dy = delta_yield(&ch, &g, &m, &rho).unwrap();
            let b = impact_operator(&ch, &g, &m).unwrap();
            let via_b = hs_inner(&b.operator, rho.matrix()).unwrap().re;
            assert!((dy - via_b).abs() < 1e-11);
        }
    }

    #[test]
    fn impact_operator_spectrum_for_mixing_channel() {
        for theta in [0.3, std::f64::consts::FRAC_PI_4, 1.2] {
            let ch = QuantumChannel::unitary(&mixing_unitary(theta), "mix").unwrap();
            let b = impact_operator(&ch, &site3(), &acceptor_projector()).unwrap();
            let (vals, _) = eig_hermitian(&b.operator).unwrap();
            let expect = (2.0 * theta).sin().abs() / 2.0;
            assert_relative_eq!(vals[0], expect, epsilon = 1e-12);
            assert_relative_eq!(vals[2], -expect, epsilon = 1e-12);
            assert!(vals[1].abs() < 1e-12);
        }
    }

    #[test]
    fn impact_operator_zero_for_invariant_readout() {
        // Λ = id and M diagonal in the dephasing basis pull back into im(G†)
        let ch = QuantumChannel::identity(3);
        let m = HermitianObservable::new(
            unit_matrix(3, 0, 0).scale(0.3) + unit_matrix(3, 2, 2).scale(0.9),
        )
        .unwrap();
        let b = impact_operator(&ch, &site3(), &m).unwrap();
        assert!(frobenius_norm(&b.operator) < 1e-13);
    }

    #[test]
    fn capacity_of_mixing_channel_and_optimizer_consistency() {
        let g = site3();
        let m = acceptor_projector();
        let ch = QuantumChannel::unitary(&mixing_unitary(std::f64::consts::FRAC_PI_4), "mix").unwrap();
        let res = capacity(&ch, &g, &m).unwrap();
        assert_relative_eq!(res.capacity, 0.5, epsilon = 1e-12);
        assert!(res.degenerate_extremes);
        assert_eq!(res.vanishes, Some(false));
        let dy = delta_yield(&ch, &g, &m, &res.optimizer).unwrap();
        assert_relative_eq!(dy.abs(), res.capacity, epsilon = 1e-9);

        let free = QuantumChannel::unitary(&mixing_unitary(0.0), "id").unwrap();
        let zero = capacity(&free, &g, &m).unwrap();
        assert!(zero.capacity < 1e-13);
        assert_eq!(zero.vanishes, Some(true));
    }

    #[test]
    fn capacity_short_circuits_uniform_readout() {
        let mut s = Sampler::seed_from_u64(3);
        let ch = random_channel(&mut s, 3, 3);
        let m = HermitianObservable::new(identity(3).scale(0.7)).unwrap();
        let res = capacity(&ch, &site3(), &m).unwrap();
        assert_eq!(res.capacity, 0.0);
        assert_eq!(res.vanishes, Some(true));
    }

    #[test]
    fn capacity_optimizer_reproduces_extremal_yield_on_random_channels() {
        let mut s = Sampler::seed_from_u64(4);
        let g = site3();
        for _ in 0..100 {
            let ch = random_channel(&mut s, 3, 4);
            let m = HermitianObservable::new(s.hermitian(3)).unwrap();
            let res = capacity(&ch, &g, &m).unwrap();
            let dy = delta_yield(&ch, &g, &m, &res.optimizer).unwrap();
            assert!(
                (dy.abs() - res.capacity).abs() < 1e-9,
                "optimizer yield {dy} vs capacity {}",
                res.capacity
            );
            assert!((res.capacity - res.plus.max(res.minus)).abs() < 1e-12);
        }
    }

    #[test]
    fn sampled_capacity_brackets_spectral_value() {
        let mut s = Sampler::seed_from_u64(5);
        let g = site3();
        let m = acceptor_projector();
        let ch = QuantumChannel::unitary(&mixing_unitary(std::f64::consts::FRAC_PI_4), "mix").unwrap();
        let spectral = capacity(&ch, &g, &m).unwrap().capacity;
        let g_for_closure = g.clone();
        let baseline = move |rho: &DensityOperator| g_for_closure.apply(rho).expect("dephased state");
        let sampled = capacity_sampled(&ch, &baseline, &m, 10_000, &mut s).unwrap();
        assert!(sampled.capacity <= spectral + 1e-11);
        assert!(spectral - sampled.capacity < 0.02, "gap {}", spectral - sampled.capacity);
        assert_eq!(sampled.method, Method::Sampled);
    }

    #[test]
    fn sampled_capacity_identity_baseline_is_zero() {
        let mut s = Sampler::seed_from_u64(6);
        let ch = random_channel(&mut s, 3, 3);
        let m = HermitianObservable::new(s.hermitian(3)).unwrap();
        let baseline = |rho: &DensityOperator| rho.clone();
        let res = capacity_sampled(&ch, &baseline, &m, 500, &mut s).unwrap();
        assert!(res.capacity < 1e-12);
    }

    #[test]
    fn mixed_samples_never_beat_pure_for_linear_baseline() {
        let mut s = Sampler::seed_from_u64(7);
        let g = site3();
        let m = acceptor_projector();
        let ch = QuantumChannel::unitary(&mixing_unitary(0.9), "mix").unwrap();
        let g2 = g.clone();
        let baseline = move |rho: &DensityOperator| g2.apply(rho).expect("dephased");
        let mut best_pure = 0.0f64;
        let mut best_mixed = 0.0f64;
        for _ in 0..2000 {
            let p = s.pure_state(3);
            let x = s.mixed_state(3);
            best_pure = best_pure.max(delta_yield_callable(&ch, &baseline, &m, &p).unwrap().abs());
            best_mixed = best_mixed.max(delta_yield_callable(&ch, &baseline, &m, &x).unwrap().abs());
        }
        assert!(best_mixed <= best_pure + 1e-12);
    }

    #[test]
    fn pi_bounded_by_capacity() {
        let g = site3();
        let m = acceptor_projector();
        // identity channel with diagonal readout: no advantage at all
        let ch_id = QuantumChannel::identity(3);
        let pi_id = pi_advantage(&ch_id, &g.free_extreme_points, &m).unwrap();
        assert!(pi_id.abs() < 1e-12);

        let ch = QuantumChannel::unitary(&mixing_unitary(std::f64::consts::FRAC_PI_4), "mix").unwrap();
        let pi = pi_advantage(&ch, &g.free_extreme_points, &m).unwrap();
        let cap = capacity(&ch, &g, &m).unwrap().capacity;
        assert!(pi <= cap + 1e-12);
        assert!(pi >= -1e-12);

        let mut s = Sampler::seed_from_u64(8);
        for _ in 0..200 {
            let ch = random_channel(&mut s, 3, 3);
            let m = HermitianObservable::new(s.hermitian(3)).unwrap();
            let pi = pi_advantage(&ch, &g.free_extreme_points, &m).unwrap();
            let cap = capacity(&ch, &g, &m).unwrap().capacity;
            assert!(pi <= cap + 1e-12);
            assert!(pi >= -1e-12);
        }
    }

    #[test]
    fn projected_capacity_free_input_contributes_nothing() {
        let g = site3();
        let ch = QuantumChannel::unitary(&mixing_unitary(0.6), "mix").unwrap();
        let m = acceptor_projector();
        // a state already in the free set has itself as closest free state
        let rho = DensityOperator::new(
            unit_matrix(3, 0, 0).scale(0.1) + unit_matrix(3, 1, 1).scale(0.4) + unit_matrix(3, 2, 2).scale(0.5),
        )
        .unwrap();
        let minimizers = closest_free_states(rho.matrix(), &g.free_extreme_points, Divergence::TraceDistance, 100);
        let d = divergence_value(Divergence::TraceDistance, rho.matrix(), &minimizers[0]);
        assert!(d < 1e-8);
        let dy = hs_inner(
            m.matrix(),
            &(ch.apply_mat(rho.matrix()) - ch.apply_mat(&minimizers[0])),
        )
        .unwrap()
        .re
        .abs();
        assert!(dy < 1e-7);
    }

    #[test]
    fn projected_capacity_trace_distance_qubit_plus() {
        // closest diagonal state to |+⟩⟨+| in trace distance is at distance 1/2
        let g = ResourceDestroyingMap::site_dephasing(2);
        let plus = DensityOperator::pure(&CVec::from_vec(vec![cr(1.0), cr(1.0)])).unwrap();
        let minimizers =
            closest_free_states(plus.matrix(), &g.free_extreme_points, Divergence::TraceDistance, 200);
        let d = divergence_value(Divergence::TraceDistance, plus.matrix(), &minimizers[0]);
        assert_relative_eq!(d, 0.5, epsilon = 1e-6);
    }

    #[test]
    fn projected_capacity_relative_entropy_matches_dephasing() {
        // the closest incoherent state under relative entropy is diag(ρ),
        // so the projected functional reproduces the dephasing-based one
        let g = site3();
        let ch = QuantumChannel::unitary(&mixing_unitary(0.7), "mix").unwrap();
        let m = acceptor_projector();
        let mut s = Sampler::seed_from_u64(10);
        for _ in 0..20 {
            let rho = s.mixed_state(3);
            let minimizers =
                closest_free_states(rho.matrix(), &g.free_extreme_points, Divergence::RelativeEntropy, 60);
            let dephased = g.apply_mat(rho.matrix());
            assert!(
                frobenius_norm(&(&minimizers[0] - &dephased)) < 1e-6,
                "relative-entropy minimizer should be the dephased state"
            );
        }
        let (value, pairs) = projected_capacity(
            &ch,
            &g.free_extreme_points,
            Divergence::RelativeEntropy,
            &m,
            60,
            40,
            &mut s,
        )
        .unwrap();
        assert_eq!(pairs.len(), 40);
        let spectral = capacity(&ch, &g, &m).unwrap().capacity;
        assert!(value <= spectral + 1e-6);
    }

    #[test]
    fn geometry_supports_and_polar_membership() {
        let g = site3();
        let ch = QuantumChannel::unitary(&mixing_unitary(std::f64::consts::FRAC_PI_4), "mix").unwrap();
        let mut s = Sampler::seed_from_u64(11);

        // M = 0: trivial member of the polar with zero support
        let zero_m = HermitianObservable::new(CMat::zeros(3, 3)).unwrap();
        let rep = geometry_checks(&ch, &g, &zero_m, 100, &mut s).unwrap();
        assert!(rep.sampled_support.abs() < 1e-14 && rep.polar_member && rep.consistent);

        let m = acceptor_projector();
        let rep = geometry_checks(&ch, &g, &m, 500, &mut s).unwrap();
        assert!(rep.support_bounded && rep.support_attained && rep.consistent);
        assert!(rep.polar_member);

        // rescale M so the capacity sits exactly on the polar boundary
        let cap = capacity(&ch, &g, &m).unwrap().capacity;
        let m_scaled = HermitianObservable::new(m.matrix().scale(1.0 / cap)).unwrap();
        let rep = geometry_checks(&ch, &g, &m_scaled, 200, &mut s).unwrap();
        assert!(rep.polar_boundary, "capacity {}", rep.capacity);
    }

    #[test]
    fn hypothesis_free_input_is_random_guessing() {
        let g = site3();
        let ch = QuantumChannel::unitary(&mixing_unitary(0.8), "mix").unwrap();
        let m = acceptor_projector();
        let mut s = Sampler::seed_from_u64(12);
        let free = DensityOperator::pure(&basis_ket(3, 1)).unwrap();
        let rep = hypothesis_test(&ch, &g, &m, &free, 100, 10_000, &mut s).unwrap();
        assert!(rep.bias < 1e-12);
        assert_relative_eq!(rep.p_succ, 0.5, epsilon = 1e-12);
        assert_relative_eq!(rep.hoeffding_bound, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn hypothesis_optimizer_reaches_three_quarters() {
        let g = site3();
        let m = acceptor_projector();
        let ch = QuantumChannel::unitary(&mixing_unitary(std::f64::consts::FRAC_PI_4), "mix").unwrap();
        let res = capacity(&ch, &g, &m).unwrap();
        let mut s = Sampler::seed_from_u64(13);
        let rep = hypothesis_test(&ch, &g, &m, &res.optimizer, 1, 1000, &mut s).unwrap();
        assert_relative_eq!(rep.p_succ, 0.75, epsilon = 1e-12);
        assert!((rep.p_succ - (0.5 + 0.5 * rep.bias)).abs() < 1e-12);
    }

    #[test]
    fn hypothesis_error_within_hoeffding_plus_slack() {
        let g = site3();
        let m = acceptor_projector();
        let ch = QuantumChannel::unitary(&mixing_unitary(std::f64::consts::FRAC_PI_4), "mix").unwrap();
        let res = capacity(&ch, &g, &m).unwrap();
        let mut s = Sampler::seed_from_u64(14);
        for n in [1u64, 10, 100, 1000] {
            let rep = hypothesis_test(&ch, &g, &m, &res.optimizer, n, 100_000, &mut s).unwrap();
            assert!(
                rep.empirical_error <= rep.hoeffding_bound + rep.statistical_slack,
                "n={n}: {} > {} + {}",
                rep.empirical_error,
                rep.hoeffding_bound,
                rep.statistical_slack
            );
        }
        // n=1000 with bias 1/2: bound e^{−125} is numerically zero
        let rep = hypothesis_test(&ch, &g, &m, &res.optimizer, 1000, 100_000, &mut s).unwrap();
        assert!(rep.hoeffding_bound < 1e-50);
        assert_eq!(rep.empirical_error, 0.0);
    }

    #[test]
    fn hypothesis_rejects_non_povm_readout() {
        let g = site3();
        let ch = QuantumChannel::identity(3);
        let m = HermitianObservable::new(unit_matrix(3, 2, 2).scale(3.0)).unwrap();
        let mut s = Sampler::seed_from_u64(15);
        let rho = s.mixed_state(3);
        assert!(hypothesis_test(&ch, &g, &m, &rho, 10, 100, &mut s).is_err());
    }

    #[test]
    fn projected_rate_tracks_spectral_rate_for_entropy_projection() {
        // with relative entropy the closest incoherent state is diag(ρ), so
        // the sampled projected rate sits below the spectral Γ and climbs
        // toward it as the sample pool grows
        let g = site3();
        let mut h = CMat::zeros(3, 3);
        h[(1, 2)] = cr(5.0);
        h[(2, 1)] = cr(5.0);
        let gen = crate::dynamics::LindbladGenerator::new(h, vec![(unit_matrix(3, 0, 1), 1.0)])
            .unwrap();
        let m = acceptor_projector();
        let t = 0.08;
        let spectral = crate::dynamics::gamma_rate(&gen, &g, &m, t).unwrap();
        let lambda_t = gen.propagator(t);
        let mut s = Sampler::seed_from_u64(16);
        let sampled = projected_rate(
            &lambda_t,
            &gen.liouville,
            &g.free_extreme_points,
            Divergence::RelativeEntropy,
            &m,
            40,
            80,
            &mut s,
        )
        .unwrap();
        assert!(sampled <= spectral + 1e-6, "{sampled} vs {spectral}");
        assert!(sampled >= 0.3 * spectral, "{sampled} vs {spectral}");
    }

    #[test]
    fn relative_entropy_basics() {
        let rho = DensityOperator::maximally_mixed(2);
        assert!(relative_entropy(rho.matrix(), rho.matrix()).abs() < 1e-12);
        let pure0 = outer(&basis_ket(2, 0), &basis_ket(2, 0));
        let pure1 = outer(&basis_ket(2, 1), &basis_ket(2, 1));
        assert!(relative_entropy(&pure0, &pure1).is_infinite());
        let s = relative_entropy(&pure0, rho.matrix());
        assert_relative_eq!(s, std::f64::consts::LN_2, epsilon = 1e-12);
        let _ = c(0.0, 0.0);
    }
}
