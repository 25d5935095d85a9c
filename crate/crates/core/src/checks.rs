//! Randomized invariant suites, named by what they verify.
//!
//! Every check draws its instances from an explicit seed, records the worst
//! residual it saw, and passes or fails against the tolerance stated in its
//! description. The CLI `verify` command runs all of them; the acceptance
//! tests reuse the same functions with pinned seeds.

use crate::channels::{cptp_check, induced_one_norm, random_channel, QuantumChannel};
use crate::dynamics::{gamma_rate, variation_bound, LindbladGenerator};
use crate::impact::{capacity, capacity_superop, pi_advantage};
use crate::operators::{cr, frobenius_norm, CMat, HermitianObservable};
use crate::resource::ResourceDestroyingMap;
use crate::sampling::Sampler;

#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub worst_residual: f64,
    pub tolerance: f64,
    pub seed: u64,
    pub samples: usize,
}

impl CheckResult {
    fn evaluate(name: &'static str, worst: f64, tol: f64, seed: u64, samples: usize) -> Self {
        Self {
            name,
            passed: worst <= tol,
            worst_residual: worst,
            tolerance: tol,
            seed,
            samples,
        }
    }
}

fn site3() -> ResourceDestroyingMap {
    ResourceDestroyingMap::site_dephasing(3)
}

fn random_observable(s: &mut Sampler, dim: usize) -> HermitianObservable {
    HermitianObservable::new(s.hermitian(dim)).expect("Hermitian by construction")
}

/// C_M(Σ p_k Λ_k) ≤ Σ p_k C_M(Λ_k) + 1e-10.
pub fn convexity_in_the_channel(seed: u64, samples: usize) -> CheckResult {
    let mut s = Sampler::seed_from_u64(seed);
    let g = site3();
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..samples {
        let a = random_channel(&mut s, 3, 3);
        let b = random_channel(&mut s, 3, 2);
        let m = random_observable(&mut s, 3);
        let w = s.uniform(0.0, 1.0);
        let mixed = QuantumChannel::mix(&[w, 1.0 - w], &[a.clone(), b.clone()]).expect("mix");
        let lhs = capacity(&mixed, &g, &m).expect("capacity").capacity;
        let rhs = w * capacity(&a, &g, &m).expect("capacity").capacity
            + (1.0 - w) * capacity(&b, &g, &m).expect("capacity").capacity;
        worst = worst.max(lhs - rhs);
    }
    CheckResult::evaluate("capacity convexity under channel mixing", worst, 1e-10, seed, samples)
}

/// Subadditivity C_{aM₁+bM₂} ≤ |a|C_{M₁} + |b|C_{M₂} + 1e-10 and absolute
/// homogeneity |C_{aM} − |a|C_M| ≤ 1e-11.
pub fn seminorm_in_the_readout(seed: u64, samples: usize) -> CheckResult {
    let mut s = Sampler::seed_from_u64(seed);
    let g = site3();
    let mut sub_worst = f64::NEG_INFINITY;
    let mut homog_worst = f64::NEG_INFINITY;
    for _ in 0..samples {
        let ch = random_channel(&mut s, 3, 3);
        let m1 = random_observable(&mut s, 3);
        let m2 = random_observable(&mut s, 3);
        let (a, b) = (s.uniform(-2.0, 2.0), s.uniform(-2.0, 2.0));
        let combo = HermitianObservable::new(m1.matrix().scale(a) + m2.matrix().scale(b))
            .expect("Hermitian combination");
        let c_combo = capacity(&ch, &g, &combo).expect("capacity").capacity;
        let c1 = capacity(&ch, &g, &m1).expect("capacity").capacity;
        let c2 = capacity(&ch, &g, &m2).expect("capacity").capacity;
        sub_worst = sub_worst.max(c_combo - (a.abs() * c1 + b.abs() * c2));
        let scaled = HermitianObservable::new(m1.matrix().scale(a)).expect("Hermitian");
        let c_scaled = capacity(&ch, &g, &scaled).expect("capacity").capacity;
        homog_worst = homog_worst.max((c_scaled - a.abs() * c1).abs());
    }
    CheckResult {
        name: "capacity seminorm in the readout",
        passed: sub_worst <= 1e-10 && homog_worst <= 1e-11,
        worst_residual: sub_worst.max(homog_worst),
        tolerance: 1e-10,
        seed,
        samples,
    }
}

/// C_M(Λ₂∘Λ₁) = C_{Λ₂†(M)}(Λ₁) within 1e-11.
pub fn heisenberg_pullback_identity(seed: u64, samples: usize) -> CheckResult {
    let mut s = Sampler::seed_from_u64(seed);
    let g = site3();
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..samples {
        let inner = random_channel(&mut s, 3, 3);
        let outer = random_channel(&mut s, 3, 2);
        let m = random_observable(&mut s, 3);
        let composed = outer.compose(&inner).expect("compose");
        let lhs = capacity(&composed, &g, &m).expect("capacity").capacity;
        let pulled = outer.adjoint_apply(&m).expect("adjoint");
        let rhs = capacity(&inner, &g, &pulled).expect("capacity").capacity;
        worst = worst.max((lhs - rhs).abs());
    }
    CheckResult::evaluate("heisenberg pullback identity", worst, 1e-11, seed, samples)
}

/// C_M(Λ₂∘Λ₁) ≤ C_M(Λ₁) + C_{ΔM}(Λ₁) ≤ C_M(Λ₁) + ‖ΔM‖_∞·R_G, within 1e-10.
pub fn post_processing_bounds(seed: u64, samples: usize) -> CheckResult {
    let mut s = Sampler::seed_from_u64(seed);
    let g = site3();
    let radius = g.resource_radius(32, &mut s).value;
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..samples {
        let inner = random_channel(&mut s, 3, 3);
        let outer = random_channel(&mut s, 3, 2);
        let m = random_observable(&mut s, 3);
        let composed = outer.compose(&inner).expect("compose");
        let lhs = capacity(&composed, &g, &m).expect("capacity").capacity;
        let base = capacity(&inner, &g, &m).expect("capacity").capacity;
        let pulled = outer.adjoint_apply(&m).expect("adjoint");
        let delta_m = HermitianObservable::new(pulled.matrix() - m.matrix()).expect("Hermitian");
        let c_delta = capacity(&inner, &g, &delta_m).expect("capacity").capacity;
        worst = worst.max(lhs - (base + c_delta));
        worst = worst.max(c_delta - delta_m.op_norm() * radius);
    }
    CheckResult::evaluate("post-processing bounds with resource radius", worst, 1e-10, seed, samples)
}

/// Mixtures of dephasing-commuting unitaries (diagonal phases, basis
/// permutations) are covariant pre-processings: C_M(Λ₂∘Λ₁) ≤ C_M(Λ₂) + 1e-10.
pub fn pre_processing_with_covariant_channels(seed: u64, samples: usize) -> CheckResult {
    let mut s = Sampler::seed_from_u64(seed);
    let g = site3();
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..samples {
        let covariant = random_covariant_channel(&mut s, 3);
        let outer = random_channel(&mut s, 3, 3);
        let m = random_observable(&mut s, 3);
        let composed = outer.compose(&covariant).expect("compose");
        let lhs = capacity(&composed, &g, &m).expect("capacity").capacity;
        let rhs = capacity(&outer, &g, &m).expect("capacity").capacity;
        worst = worst.max(lhs - rhs);
    }
    CheckResult::evaluate("pre-processing with covariant channels", worst, 1e-10, seed, samples)
}

/// Random convex mixture of diagonal-phase unitaries and basis permutations,
/// all of which commute with the site dephasing.
pub fn random_covariant_channel(s: &mut Sampler, dim: usize) -> QuantumChannel {
    let n = 3;
    let mut channels = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for _ in 0..n {
        let u = if s.bernoulli(0.5) {
            CMat::from_fn(dim, dim, |i, j| {
                if i == j {
                    crate::operators::c(0.0, s.uniform(0.0, std::f64::consts::TAU)).exp()
                } else {
                    cr(0.0)
                }
            })
        } else {
            let shift = (s.random_u64() as usize) % dim;
            CMat::from_fn(dim, dim, |i, j| {
                if (i + shift) % dim == j {
                    cr(1.0)
                } else {
                    cr(0.0)
                }
            })
        };
        channels.push(QuantumChannel::unitary(&u, "cov").expect("unitary"));
        weights.push(s.uniform(0.05, 1.0));
    }
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    QuantumChannel::mix(&weights, &channels).expect("mixture")
}

/// C_{M̃_j}(Λ) ≤ Σ_i V_{ji} C_{M_i}(Λ) + 1e-10 for column-stochastic V.
pub fn classical_coarse_graining(seed: u64, samples: usize) -> CheckResult {
    let mut s = Sampler::seed_from_u64(seed);
    let g = site3();
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..samples {
        let ch = random_channel(&mut s, 3, 3);
        let povm = s.povm(3, 3);
        let caps: Vec<f64> = povm
            .iter()
            .map(|m| capacity(&ch, &g, m).expect("capacity").capacity)
            .collect();
        // column-stochastic 3×3 matrix
        let mut v = [[0.0f64; 3]; 3];
        for col in 0..3 {
            let mut total = 0.0;
            for row in v.iter_mut() {
                row[col] = s.uniform(0.0, 1.0);
                total += row[col];
            }
            for row in v.iter_mut() {
                row[col] /= total;
            }
        }
        for row in &v {
            let coarse = povm
                .iter()
                .zip(row)
                .fold(CMat::zeros(3, 3), |acc, (m, &w)| acc + m.matrix().scale(w));
            let coarse_m = HermitianObservable::new(coarse).expect("Hermitian");
            let lhs = capacity(&ch, &g, &coarse_m).expect("capacity").capacity;
            let rhs: f64 = caps.iter().zip(row).map(|(c, &w)| w * c).sum();
            worst = worst.max(lhs - rhs);
        }
    }
    CheckResult::evaluate("classical coarse-graining of the readout", worst, 1e-10, seed, samples)
}

/// |C_M(Λ₁) − C_M(Λ₂)| ≤ 2‖M‖_∞·d·‖Λ₁−Λ₂‖₁→₁ + 1e-9, with the restarted
/// pure-state estimate standing in for the exact induced norm.
pub fn lipschitz_continuity_surrogate(seed: u64, samples: usize) -> CheckResult {
    let mut s = Sampler::seed_from_u64(seed);
    let g = site3();
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..samples {
        let a = random_channel(&mut s, 3, 3);
        let b = random_channel(&mut s, 3, 3);
        let m = random_observable(&mut s, 3);
        let ca = capacity(&a, &g, &m).expect("capacity").capacity;
        let cb = capacity(&b, &g, &m).expect("capacity").capacity;
        let diff = a.superoperator().sub(b.superoperator()).expect("same dim");
        let est = induced_one_norm(&diff, 16, &mut s).value;
        worst = worst.max((ca - cb).abs() - 2.0 * m.op_norm() * 3.0 * est);
    }
    CheckResult::evaluate("lipschitz continuity (diamond-norm surrogate)", worst, 1e-9, seed, samples)
}

/// Channels of the form Λ∘G cannot see the resource: capacity < 1e-10.
pub fn resource_blindness(seed: u64, samples: usize) -> CheckResult {
    let mut s = Sampler::seed_from_u64(seed);
    let g = site3();
    let g_channel = QuantumChannel::from_liouville(g.superop.clone(), "G").expect("dephasing is CPTP");
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..samples {
        let ch = random_channel(&mut s, 3, 3);
        let blind = ch.compose(&g_channel).expect("compose");
        let m = random_observable(&mut s, 3);
        worst = worst.max(capacity(&blind, &g, &m).expect("capacity").capacity);
    }
    CheckResult::evaluate("resource blindness of dephased channels", worst, 1e-10, seed, samples)
}

/// Π_M(Λ) ≤ C_M(Λ) + 1e-12 and Π_M(Λ) ≥ −1e-12.
pub fn unpaired_benchmark_bounded(seed: u64, samples: usize) -> CheckResult {
    let mut s = Sampler::seed_from_u64(seed);
    let g = site3();
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..samples {
        let ch = random_channel(&mut s, 3, 3);
        let m = random_observable(&mut s, 3);
        let pi = pi_advantage(&ch, &g.free_extreme_points, &m).expect("benchmark");
        let cap = capacity(&ch, &g, &m).expect("capacity").capacity;
        worst = worst.max(pi - cap).max(-pi);
    }
    CheckResult::evaluate("unpaired benchmark below capacity", worst, 1e-12, seed, samples)
}

/// C_M(Λ) = C_M(Λ_res) = C_M(Λ̃_res) within 1e-10.
pub fn decomposition_capacity_equality(seed: u64, samples: usize) -> CheckResult {
    let mut s = Sampler::seed_from_u64(seed);
    let g = site3();
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..samples {
        let ch = random_channel(&mut s, 3, 3);
        let m = random_observable(&mut s, 3);
        let eq = crate::decomposition::capacity_equality_check(&ch, &g, &m).expect("split");
        worst = worst
            .max((eq.full.capacity - eq.res.capacity).abs())
            .max((eq.full.capacity - eq.res_tilde.capacity).abs());
    }
    CheckResult::evaluate("decomposition capacity equality", worst, 1e-10, seed, samples)
}

/// Random GKLS generator in dimension `dim` with `n_jumps` jump operators.
pub fn random_generator(s: &mut Sampler, dim: usize, n_jumps: usize) -> LindbladGenerator {
    let h = s.hermitian(dim);
    let jumps: Vec<(CMat, f64)> = (0..n_jumps)
        .map(|_| (s.ginibre(dim).scale(0.5), s.uniform(0.0, 1.0)))
        .collect();
    LindbladGenerator::new(h, jumps).expect("nonnegative rates")
}

/// |C_M(Λ_{t₂}) − C_M(Λ_{t₁})| ≤ ∫Γ + 1e-8 on random GKLS models (d = 2, 3).
pub fn variation_bound_random_generators(seed: u64, samples: usize) -> CheckResult {
    let mut s = Sampler::seed_from_u64(seed);
    let mut worst = f64::NEG_INFINITY;
    for k in 0..samples {
        let dim = if k % 2 == 0 { 2 } else { 3 };
        let g = ResourceDestroyingMap::site_dephasing(dim);
        let gen = random_generator(&mut s, dim, 2);
        let m = random_observable(&mut s, dim);
        let scale = 1.0 / frobenius_norm(&gen.liouville.matrix).max(1.0);
        let t1 = s.uniform(0.0, 0.3) * scale;
        let t2 = t1 + s.uniform(0.0, 1.0) * scale;
        let (lhs, integral) = variation_bound(&gen, &g, &m, t1, t2, 1e-9).expect("quadrature");
        worst = worst.max(lhs - integral);
    }
    CheckResult::evaluate("variation bound on random generators", worst, 1e-8, seed, samples)
}

/// Γ_M(t) ≤ ‖M‖_∞·R_G·‖L‖₁→₁ + 1e-8 along random generators.
pub fn rate_bounded_by_norm_ceiling(seed: u64, samples: usize) -> CheckResult {
    let mut s = Sampler::seed_from_u64(seed);
    let mut worst = f64::NEG_INFINITY;
    for k in 0..samples {
        let dim = if k % 2 == 0 { 2 } else { 3 };
        let g = ResourceDestroyingMap::site_dephasing(dim);
        let radius = g.resource_radius(16, &mut s).value;
        let gen = random_generator(&mut s, dim, 2);
        let m = random_observable(&mut s, dim);
        let l_est = induced_one_norm(&gen.liouville, 24, &mut s).value;
        let scale = 1.0 / frobenius_norm(&gen.liouville.matrix).max(1.0);
        for i in 0..8 {
            let t = i as f64 * 0.1 * scale;
            let rate = gamma_rate(&gen, &g, &m, t).expect("rate");
            worst = worst.max(rate - m.op_norm() * radius * l_est);
        }
    }
    CheckResult::evaluate("rate below the uniform norm ceiling", worst, 1e-8, seed, samples)
}

/// Kraus and Liouville application paths agree within 1e-11.
pub fn kraus_liouville_agreement(seed: u64, samples: usize) -> CheckResult {
    let mut s = Sampler::seed_from_u64(seed);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..samples {
        let ch = random_channel(&mut s, 3, 4);
        let rho = s.mixed_state(3);
        let via_liou = ch.apply_mat(rho.matrix());
        let via_kraus = ch.apply_kraus_path(rho.matrix()).expect("Kraus stored");
        worst = worst.max(frobenius_norm(&(via_liou - via_kraus)));
    }
    CheckResult::evaluate("kraus vs liouville application", worst, 1e-11, seed, samples)
}

/// Convex mixtures of channels pass the CPTP check.
pub fn mixtures_stay_cptp(seed: u64, samples: usize) -> CheckResult {
    let mut s = Sampler::seed_from_u64(seed);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..samples {
        let a = random_channel(&mut s, 3, 2);
        let b = random_channel(&mut s, 3, 4);
        let w = s.uniform(0.0, 1.0);
        let mixed = QuantumChannel::mix(&[w, 1.0 - w], &[a, b]).expect("mix");
        let report = cptp_check(mixed.superoperator());
        worst = worst
            .max(-report.min_choi_eigenvalue)
            .max(report.tp_residual);
    }
    CheckResult::evaluate("channel mixtures stay CPTP", worst, 1e-9, seed, samples)
}

/// Capacity optimizer reproduces ±capacity through the yield difference.
pub fn optimizer_attains_capacity(seed: u64, samples: usize) -> CheckResult {
    let mut s = Sampler::seed_from_u64(seed);
    let g = site3();
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..samples {
        let ch = random_channel(&mut s, 3, 3);
        let m = random_observable(&mut s, 3);
        let res = capacity(&ch, &g, &m).expect("capacity");
        let dy = crate::impact::delta_yield(&ch, &g, &m, &res.optimizer).expect("yield");
        worst = worst.max((dy.abs() - res.capacity).abs());
    }
    CheckResult::evaluate("capacity optimizer attains the extremal yield", worst, 1e-9, seed, samples)
}

/// Capacity of a superoperator difference of equal channels vanishes, and
/// the spectral value never drops below a sampled lower bound.
pub fn sampled_capacity_is_lower_bound(seed: u64, samples: usize) -> CheckResult {
    let mut s = Sampler::seed_from_u64(seed);
    let g = site3();
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..samples.min(20) {
        let ch = random_channel(&mut s, 3, 3);
        let m = random_observable(&mut s, 3);
        let spectral = capacity(&ch, &g, &m).expect("capacity").capacity;
        let g2 = g.clone();
        let baseline =
            move |rho: &crate::operators::DensityOperator| g2.apply(rho).expect("dephased");
        let sampled =
            crate::impact::capacity_sampled(&ch, &baseline, &m, 200, &mut s).expect("sampled");
        worst = worst.max(sampled.capacity - spectral);
    }
    CheckResult::evaluate("sampled capacity below spectral value", worst, 1e-11, seed, samples.min(20))
}

/// Identity on the Liouville level: split blocks recompose the channel.
pub fn split_blocks_recompose(seed: u64, samples: usize) -> CheckResult {
    let mut s = Sampler::seed_from_u64(seed);
    let g = site3();
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..samples {
        let ch = random_channel(&mut s, 3, 3);
        let split = crate::decomposition::split_channel(&ch, &g).expect("split");
        let sum = split.free.add(&split.res).expect("same dim");
        worst = worst.max(frobenius_norm(&(&sum.matrix - ch.liouville_matrix())));
        let grg = g
            .superop
            .compose(&split.res.compose(&g.superop).expect("compose"))
            .expect("compose");
        worst = worst.max(grg.frobenius_norm());
    }
    CheckResult::evaluate("split blocks recompose the channel", worst, 1e-11, seed, samples)
}

/// Capacity of the resource part computed directly on the superoperator
/// agrees with the channel value (consistency of the non-channel path).
pub fn superoperator_capacity_consistency(seed: u64, samples: usize) -> CheckResult {
    let mut s = Sampler::seed_from_u64(seed);
    let g = site3();
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..samples {
        let ch = random_channel(&mut s, 3, 3);
        let m = random_observable(&mut s, 3);
        let via_channel = capacity(&ch, &g, &m).expect("capacity").capacity;
        let via_superop = capacity_superop(ch.superoperator(), &g, &m, "s")
            .expect("capacity")
            .capacity;
        worst = worst.max((via_channel - via_superop).abs());
    }
    CheckResult::evaluate("superoperator capacity consistency", worst, 1e-12, seed, samples)
}

/// Run the whole suite with one base seed; each check gets a derived seed.
pub fn run_all(seed: u64, samples: usize) -> Vec<CheckResult> {
    let n = samples;
    vec![
        convexity_in_the_channel(seed ^ 0x01, n),
        seminorm_in_the_readout(seed ^ 0x02, n),
        heisenberg_pullback_identity(seed ^ 0x03, n),
        post_processing_bounds(seed ^ 0x04, n),
        pre_processing_with_covariant_channels(seed ^ 0x05, n),
        classical_coarse_graining(seed ^ 0x06, n.max(3) / 3),
        lipschitz_continuity_surrogate(seed ^ 0x07, n.min(100)),
        resource_blindness(seed ^ 0x08, n),
        unpaired_benchmark_bounded(seed ^ 0x09, n),
        decomposition_capacity_equality(seed ^ 0x0a, n),
        variation_bound_random_generators(seed ^ 0x0b, n.min(100)),
        rate_bounded_by_norm_ceiling(seed ^ 0x0c, n.min(60)),
        kraus_liouville_agreement(seed ^ 0x0d, n),
        mixtures_stay_cptp(seed ^ 0x0e, n),
        optimizer_attains_capacity(seed ^ 0x0f, n),
        sampled_capacity_is_lower_bound(seed ^ 0x10, n),
        split_blocks_recompose(seed ^ 0x11, n),
        superoperator_capacity_consistency(seed ^ 0x12, n),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_suite_passes_with_small_samples() {
        for r in run_all(7, 40) {
            assert!(
                r.passed,
                "{} failed: residual {:.3e} > {:.1e} (seed {})",
                r.name, r.worst_residual, r.tolerance, r.seed
            );
        }
    }

    #[test]
    fn suite_verdicts_stable_under_reduced_samples() {
        let full: Vec<bool> = run_all(11, 60).iter().map(|r| r.passed).collect();
        let reduced: Vec<bool> = run_all(11, 15).iter().map(|r| r.passed).collect();
        assert_eq!(full, reduced);
    }

    #[test]
    fn covariant_channel_commutes_with_dephasing() {
        let mut s = Sampler::seed_from_u64(3);
        let g = site3();
        for _ in 0..20 {
            let ch = random_covariant_channel(&mut s, 3);
            let lg = ch.superoperator().compose(&g.superop).unwrap();
            let gl = g.superop.compose(ch.superoperator()).unwrap();
            assert!(frobenius_norm(&(&lg.matrix - &gl.matrix)) < 1e-12);
        }
    }
}
