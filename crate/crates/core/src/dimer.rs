//! Fully analytic donor–acceptor dimer on span{|g⟩, |D⟩, |A⟩} (indices
//! 0, 1, 2): coherent mixing with detuning Δ and coupling J, excited-state
//! dephasing γφ, and decay γ_D, γ_A to the ground state.
//!
//! Everything the generic modules compute numerically exists here in closed
//! form: the one-step capacity, the Heisenberg coherence trajectory y(t)
//! with C_M(Λ_t) = |y(t)| and Γ_M(t) = |dy/dt|, and the variation/time/
//! feasibility envelopes in the two solvable regimes (γφ = 0 with symmetric
//! lifetimes, and Δ = 0 with arbitrary dephasing). These serve as oracles
//! for the spectral-norm and quadrature machinery.

use num_complex::Complex;

use crate::channels::QuantumChannel;
use crate::dynamics::LindbladGenerator;
use crate::error::{QresError, Result};
use crate::operators::{c, cr, matrix_exp, unit_matrix, CMat, HermitianObservable};
use crate::C64;

/// Donor-acceptor mixing angle θ = ½·arctan(2J/Δ); π/4 on resonance.
pub fn mixing_angle(detuning: f64, coupling: f64) -> f64 {
    0.5 * (2.0 * coupling).atan2(detuning)
}

#[derive(Debug, Clone, Copy)]
pub struct DimerParams {
    pub detuning: f64,
    pub coupling: f64,
    pub dephasing_rate: f64,
    pub decay_donor: f64,
    pub decay_acceptor: f64,
    /// Mixing angle of the one-step unitary; defaults to ½·arctan(2J/Δ).
    pub theta: Option<f64>,
    /// Finite-time phase-damping parameter η ∈ [0, 1].
    pub eta: f64,
    /// Finite-time decay probabilities ∈ [0, 1].
    pub p_donor: f64,
    pub p_acceptor: f64,
}

impl DimerParams {
    pub fn new(detuning: f64, coupling: f64, dephasing_rate: f64, decay_donor: f64, decay_acceptor: f64) -> Self {
        Self {
            detuning,
            coupling,
            dephasing_rate,
            decay_donor,
            decay_acceptor,
            theta: None,
            eta: 1.0,
            p_donor: 0.0,
            p_acceptor: 0.0,
        }
    }

    /// Tie the finite-time parameters to the rates over one step:
    /// η = e^{−γφ·Δt}, p_j = 1 − e^{−γ_j·Δt}.
    pub fn with_step(mut self, dt: f64) -> Self {
        self.eta = (-self.dephasing_rate * dt).exp();
        self.p_donor = 1.0 - (-self.decay_donor * dt).exp();
        self.p_acceptor = 1.0 - (-self.decay_acceptor * dt).exp();
        self
    }

    pub fn with_theta(mut self, theta: f64) -> Self {
        self.theta = Some(theta);
        self
    }

    pub fn with_damping(mut self, eta: f64, p_donor: f64, p_acceptor: f64) -> Self {
        self.eta = eta;
        self.p_donor = p_donor;
        self.p_acceptor = p_acceptor;
        self
    }

    pub fn theta(&self) -> f64 {
        self.theta
            .unwrap_or_else(|| mixing_angle(self.detuning, self.coupling))
    }

    pub fn validate(&self) -> Result<()> {
        for (label, rate) in [
            ("dephasing", self.dephasing_rate),
            ("donor decay", self.decay_donor),
            ("acceptor decay", self.decay_acceptor),
        ] {
            if rate.is_nan() || rate < 0.0 {
                return Err(QresError::Validation(format!("{label} rate {rate} < 0")));
            }
        }
        for (label, p) in [
            ("eta", self.eta),
            ("p_donor", self.p_donor),
            ("p_acceptor", self.p_acceptor),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(QresError::Validation(format!("{label} = {p} outside [0, 1]")));
            }
        }
        if !self.detuning.is_finite() || !self.coupling.is_finite() {
            return Err(QresError::Validation("non-finite model parameters".into()));
        }
        Ok(())
    }

    /// Residuals of the finite-time consistency relations at step Δt.
    pub fn step_consistency(&self, dt: f64) -> (f64, f64, f64) {
        (
            (self.eta - (-self.dephasing_rate * dt).exp()).abs(),
            (self.p_donor - (1.0 - (-self.decay_donor * dt).exp())).abs(),
            (self.p_acceptor - (1.0 - (-self.decay_acceptor * dt).exp())).abs(),
        )
    }
}

/// Readout in the block form μ_g|g⟩⟨g| + μ_D|D⟩⟨D| + μ_A|A⟩⟨A| + (ν|D⟩⟨A| + h.c.).
#[derive(Debug, Clone, Copy)]
pub struct ObservableCoeffs {
    pub mu_g: f64,
    pub mu_d: f64,
    pub mu_a: f64,
    pub nu: C64,
}

impl ObservableCoeffs {
    pub fn acceptor() -> Self {
        Self {
            mu_g: 0.0,
            mu_d: 0.0,
            mu_a: 1.0,
            nu: cr(0.0),
        }
    }

    pub fn matrix(&self) -> CMat {
        let mut m = CMat::zeros(3, 3);
        m[(0, 0)] = cr(self.mu_g);
        m[(1, 1)] = cr(self.mu_d);
        m[(2, 2)] = cr(self.mu_a);
        m[(1, 2)] = self.nu;
        m[(2, 1)] = self.nu.conj();
        m
    }

    pub fn observable(&self) -> Result<HermitianObservable> {
        HermitianObservable::new(self.matrix())
    }

    pub fn povm_observable(&self) -> Result<HermitianObservable> {
        HermitianObservable::new_povm(self.matrix())
    }
}

/// All artifacts of the model: Hamiltonian, one-step unitary and Kraus
/// chain, and the continuous-time generator.
#[derive(Debug, Clone)]
pub struct DimerModel {
    pub params: DimerParams,
    pub hamiltonian: CMat,
    /// Unitary channel of the mixing rotation U_θ.
    pub mixing_channel: QuantumChannel,
    /// One-step process: amplitude damping ∘ phase damping ∘ mixing.
    pub step_channel: QuantumChannel,
    pub generator: LindbladGenerator,
}

pub fn hamiltonian(params: &DimerParams) -> CMat {
    let mut h = CMat::zeros(3, 3);
    h[(1, 1)] = cr(params.detuning / 2.0);
    h[(2, 2)] = cr(-params.detuning / 2.0);
    h[(1, 2)] = cr(params.coupling);
    h[(2, 1)] = cr(params.coupling);
    h
}

/// U_θ = |g⟩⟨g| + cosθ(|D⟩⟨D| + |A⟩⟨A|) + sinθ(|A⟩⟨D| − |D⟩⟨A|).
pub fn mixing_unitary(theta: f64) -> CMat {
    let (co, si) = (theta.cos(), theta.sin());
    let mut u = CMat::zeros(3, 3);
    u[(0, 0)] = cr(1.0);
    u[(1, 1)] = cr(co);
    u[(2, 2)] = cr(co);
    u[(2, 1)] = cr(si);
    u[(1, 2)] = cr(-si);
    u
}

/// Combined phase-damping/amplitude-damping Kraus set {K_00, K_10, K_01,
/// K_02, K_11, K_12} with parameters (η, p_D, p_A).
pub fn damping_kraus(eta: f64, p_d: f64, p_a: f64) -> Vec<CMat> {
    let g = |i| unit_matrix(3, 0, i);
    let proj = |i| unit_matrix(3, i, i);
    let k00 = g(0)
        + proj(1).scale(((1.0 + eta) * (1.0 - p_d) / 2.0).sqrt())
        + proj(2).scale(((1.0 + eta) * (1.0 - p_a) / 2.0).sqrt());
    let k10 = proj(1).scale(((1.0 - eta) * (1.0 - p_d) / 2.0).sqrt())
        - proj(2).scale(((1.0 - eta) * (1.0 - p_a) / 2.0).sqrt());
    let k01 = g(1).scale((p_d * (1.0 + eta) / 2.0).sqrt());
    let k02 = g(2).scale((p_a * (1.0 + eta) / 2.0).sqrt());
    let k11 = g(1).scale((p_d * (1.0 - eta) / 2.0).sqrt());
    let k12 = g(2).scale(-(p_a * (1.0 - eta) / 2.0).sqrt());
    vec![k00, k10, k01, k02, k11, k12]
}

impl DimerModel {
    pub fn build(params: DimerParams) -> Result<Self> {
        params.validate()?;
        let h = hamiltonian(&params);
        let theta = params.theta();
        let u = mixing_unitary(theta);
        let mixing_channel = QuantumChannel::unitary(&u, "mixing")?;
        let kraus: Vec<CMat> = damping_kraus(params.eta, params.p_donor, params.p_acceptor)
            .into_iter()
            .map(|k| k * &u)
            .collect();
        let step_channel = QuantumChannel::from_kraus(kraus, "damped-mixing")?;
        let generator = LindbladGenerator::new(
            h.clone(),
            vec![
                (unit_matrix(3, 1, 1), params.dephasing_rate),
                (unit_matrix(3, 2, 2), params.dephasing_rate),
                (unit_matrix(3, 0, 1), params.decay_donor),
                (unit_matrix(3, 0, 2), params.decay_acceptor),
            ],
        )?;
        Ok(Self {
            params,
            hamiltonian: h,
            mixing_channel,
            step_channel,
            generator,
        })
    }

    /// Lie–Trotter step e^{−iHΔt}-then-damping with η(Δt), p(Δt) from the
    /// rates; agrees with e^{ΔtL} to first order on the population/DA block.
    pub fn trotter_step(&self, dt: f64) -> Result<QuantumChannel> {
        let p = self.params.with_step(dt);
        let u = matrix_exp(&self.hamiltonian.map(|x| x * c(0.0, -1.0)), dt);
        let kraus: Vec<CMat> = damping_kraus(p.eta, p.p_donor, p.p_acceptor)
            .into_iter()
            .map(|k| k * &u)
            .collect();
        QuantumChannel::from_kraus(kraus, "trotter-step")
    }
}

/// One-step capacity of the damped mixing chain with site dephasing: the
/// surviving D–A coherence of the pulled-back readout is
/// cos2θ·Re(w) + ½·sin2θ·s + i·Im(w) with w = η·ν·√((1−p_D)(1−p_A)) and
/// s = μ_A(1−p_A) − μ_D(1−p_D) + μ_g(p_A−p_D); the capacity is its modulus.
/// For real ν this is the familiar |cos2θ·ην√((1−p_D)(1−p_A)) + ½sin2θ·s|.
pub fn capacity_closed_form(params: &DimerParams, m: &ObservableCoeffs) -> f64 {
    let theta = params.theta();
    let w = m.nu
        * Complex::new(
            params.eta * ((1.0 - params.p_donor) * (1.0 - params.p_acceptor)).sqrt(),
            0.0,
        );
    let s = m.mu_a * (1.0 - params.p_acceptor) - m.mu_d * (1.0 - params.p_donor)
        + m.mu_g * (params.p_acceptor - params.p_donor);
    let re = (2.0 * theta).cos() * w.re + 0.5 * (2.0 * theta).sin() * s;
    (re * re + w.im * w.im).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Underdamped,
    Critical,
    Overdamped,
}

/// Switchover band around γφ = 4|J| inside which the dedicated critical
/// closed form replaces the 1/ω and 1/κ expressions.
const CRITICAL_BAND: f64 = 1e-6;

pub fn regime(params: &DimerParams) -> Regime {
    let j4 = 4.0 * params.coupling.abs();
    let gap = params.dephasing_rate - j4;
    if gap.abs() < CRITICAL_BAND * params.coupling.abs().max(1.0) {
        Regime::Critical
    } else if gap < 0.0 {
        Regime::Underdamped
    } else {
        Regime::Overdamped
    }
}

/// One point of the Heisenberg coherence trajectory: Λ_t†(M) parametrized
/// as x_g|g⟩⟨g| + x_D|D⟩⟨D| + x_A|A⟩⟨A| + (y|D⟩⟨A| + h.c.) with y = u + iv.
#[derive(Debug, Clone, Copy)]
pub struct TrajectoryPoint {
    pub t: f64,
    pub u: f64,
    pub v: f64,
    pub x_d: f64,
    pub x_a: f64,
    /// Population difference s = x_A − x_D.
    pub s: f64,
    /// Total excited weight N = x_A + x_D.
    pub total: f64,
    /// C_M(Λ_t) = |y(t)| = √(u² + v²).
    pub capacity: f64,
    /// Γ_M(t) = |dy/dt|.
    pub rate: f64,
}

#[derive(Debug, Clone)]
pub struct CoherenceTrajectory {
    pub regime: Regime,
    pub points: Vec<TrajectoryPoint>,
}

fn require(cond: bool, what: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(QresError::RegimeMismatch(what.to_string()))
    }
}

/// Closed-form trajectory point for γφ = 0 and symmetric lifetimes
/// γ_D = γ_A = γ; generalised Rabi frequency Ω = √(4J² + Δ²).
pub fn zero_dephasing_point(
    params: &DimerParams,
    m: &ObservableCoeffs,
    t: f64,
) -> Result<TrajectoryPoint> {
    require(params.dephasing_rate == 0.0, "zero-dephasing form needs γφ = 0")?;
    require(
        params.decay_donor == params.decay_acceptor,
        "zero-dephasing form needs symmetric lifetimes γ_D = γ_A",
    )?;
    let (delta, j, gamma) = (params.detuning, params.coupling, params.decay_donor);
    let omega = (4.0 * j * j + delta * delta).sqrt();
    let (re_nu, im_nu) = (m.nu.re, m.nu.im);
    let pop = m.mu_a - m.mu_d;
    let env = (-gamma * t).exp();
    let (u, v, s) = if omega == 0.0 {
        (env * re_nu, env * im_nu, env * pop)
    } else {
        let (sin, cos) = (omega * t).sin_cos();
        let drive = delta * re_nu + j * pop;
        let u = env * (re_nu - delta * im_nu * sin / omega + delta * drive * (cos - 1.0) / (omega * omega));
        let v = env * (im_nu * cos + drive * sin / omega);
        let s = env
            * (pop - 4.0 * j * im_nu * sin / omega + 4.0 * j * drive * (cos - 1.0) / (omega * omega));
        (u, v, s)
    };
    let total = 2.0 * m.mu_g + (m.mu_a + m.mu_d - 2.0 * m.mu_g) * env;
    // dy/dt from the coupled equations with ξ = γ
    let du = -delta * v - gamma * u;
    let dv = delta * u + j * s - gamma * v;
    Ok(TrajectoryPoint {
        t,
        u,
        v,
        x_d: 0.5 * (total - s),
        x_a: 0.5 * (total + s),
        s,
        total,
        capacity: u.hypot(v),
        rate: du.hypot(dv),
    })
}

/// Printed closed form of Γ for M = |A⟩⟨A| in the γφ = 0, symmetric case.
pub fn rate_zero_dephasing_acceptor(params: &DimerParams, t: f64) -> Result<f64> {
    require(params.dephasing_rate == 0.0, "closed-form rate needs γφ = 0")?;
    require(
        params.decay_donor == params.decay_acceptor,
        "closed-form rate needs symmetric lifetimes",
    )?;
    let (delta, j, gamma) = (params.detuning, params.coupling, params.decay_donor);
    let omega = (4.0 * j * j + delta * delta).sqrt();
    if omega == 0.0 {
        return Ok(0.0);
    }
    let (sin, cos) = (omega * t).sin_cos();
    let first = delta * (gamma * (cos - 1.0) / (omega * omega) + sin / omega);
    let second = cos - gamma * sin / omega;
    Ok((-gamma * t).exp() * j.abs() * (first * first + second * second).sqrt())
}

/// Closed-form trajectory point for Δ = 0 and symmetric lifetimes, any γφ;
/// regime-dispatched between trigonometric, polynomial-critical, and
/// hyperbolic solutions of the damped coherence oscillator.
pub fn zero_detuning_point(
    params: &DimerParams,
    m: &ObservableCoeffs,
    t: f64,
) -> Result<TrajectoryPoint> {
    require(params.detuning == 0.0, "zero-detuning form needs Δ = 0")?;
    require(
        params.decay_donor == params.decay_acceptor,
        "zero-detuning form needs symmetric lifetimes γ_D = γ_A",
    )?;
    let (j, gphi, gamma) = (params.coupling, params.dephasing_rate, params.decay_donor);
    let xi = gphi + gamma;
    let zeta = 0.5 * (gamma + xi);
    let (re_nu, im_nu) = (m.nu.re, m.nu.im);
    let pop = m.mu_a - m.mu_d;
    let u = re_nu * (-xi * t).exp();
    let env = (-zeta * t).exp();
    let v_slope = 2.0 * j * pop - gphi * im_nu;
    let s_slope = gphi * pop - 8.0 * j * im_nu;
    let (v, s) = match regime(params) {
        Regime::Underdamped => {
            let omega = 0.5 * (16.0 * j * j - gphi * gphi).sqrt();
            let (sin, cos) = (omega * t).sin_cos();
            (
                env * (im_nu * cos + v_slope * sin / (2.0 * omega)),
                env * (pop * cos + s_slope * sin / (2.0 * omega)),
            )
        }
        Regime::Critical => (
            env * (im_nu + 0.5 * v_slope * t),
            env * (pop + 0.5 * s_slope * t),
        ),
        Regime::Overdamped => {
            let kappa = 0.5 * (gphi * gphi - 16.0 * j * j).sqrt();
            let (sinh, cosh) = ((kappa * t).sinh(), (kappa * t).cosh());
            (
                env * (im_nu * cosh + v_slope * sinh / (2.0 * kappa)),
                env * (pop * cosh + s_slope * sinh / (2.0 * kappa)),
            )
        }
    };
    let total = 2.0 * m.mu_g + (m.mu_a + m.mu_d - 2.0 * m.mu_g) * (-gamma * t).exp();
    Ok(TrajectoryPoint {
        t,
        u,
        v,
        x_d: 0.5 * (total - s),
        x_a: 0.5 * (total + s),
        s,
        total,
        capacity: u.hypot(v),
        rate: (xi * u).hypot(j * s - xi * v),
    })
}

pub fn trajectory_zero_dephasing(
    params: &DimerParams,
    m: &ObservableCoeffs,
    times: &[f64],
) -> Result<CoherenceTrajectory> {
    let points = times
        .iter()
        .map(|&t| zero_dephasing_point(params, m, t))
        .collect::<Result<Vec<_>>>()?;
    Ok(CoherenceTrajectory {
        regime: regime(params),
        points,
    })
}

pub fn trajectory_zero_detuning(
    params: &DimerParams,
    m: &ObservableCoeffs,
    times: &[f64],
) -> Result<CoherenceTrajectory> {
    let points = times
        .iter()
        .map(|&t| zero_detuning_point(params, m, t))
        .collect::<Result<Vec<_>>>()?;
    Ok(CoherenceTrajectory {
        regime: regime(params),
        points,
    })
}

/// Analytic certificate for the induced 1→1 norm of the generator:
/// ‖L‖₁→₁ ≤ 2‖H‖_∞ + 2Σγ_k‖L_k‖_∞² = √(4J² + Δ²) + 4γφ + 2(γ_D + γ_A);
/// reduces to √(4J² + Δ²) + 4γ for γφ = 0 and symmetric lifetimes.
pub fn l_one_one_certificate(params: &DimerParams) -> f64 {
    let omega = (4.0 * params.coupling * params.coupling + params.detuning * params.detuning).sqrt();
    omega + 4.0 * params.dephasing_rate + 2.0 * (params.decay_donor + params.decay_acceptor)
}

/// Resonance variation envelope (Δ = 0, γφ = 0, symmetric γ, M = |A⟩⟨A|):
/// |ΔC| ≤ (|J|/γ)·√(1 + γ²/4J²)·(e^{−γt₁} − e^{−γt₂}).
pub fn variation_envelope_resonance(params: &DimerParams, t1: f64, t2: f64) -> Result<f64> {
    resonance_preconditions(params)?;
    let (j, gamma) = (params.coupling.abs(), params.decay_donor);
    let amp = rabi_envelope_amplitude(j, gamma);
    if gamma == 0.0 {
        return Ok(j * amp_over_j(j, gamma) * (t2 - t1) * j);
    }
    Ok(amp / gamma * ((-gamma * t1).exp() - (-gamma * t2).exp()))
}

fn rabi_envelope_amplitude(j: f64, gamma: f64) -> f64 {
    j * (1.0 + gamma * gamma / (4.0 * j * j)).sqrt()
}

fn amp_over_j(j: f64, gamma: f64) -> f64 {
    (1.0 + gamma * gamma / (4.0 * j * j)).sqrt().max(0.0) / j.max(f64::MIN_POSITIVE)
}

/// Resonance feasibility ceiling (|ΔC| must stay strictly below this for any
/// t₂ ≥ t₁): (|J|/γ)·e^{−γt₁}·√(1 + γ²/4J²).
pub fn feasibility_ceiling_resonance(params: &DimerParams, t1: f64) -> Result<f64> {
    resonance_preconditions(params)?;
    let (j, gamma) = (params.coupling.abs(), params.decay_donor);
    if gamma == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(rabi_envelope_amplitude(j, gamma) / gamma * (-gamma * t1).exp())
}

/// Resonance minimal-time bound: Δτ* ≥ (1/γ)·ln(1 − γe^{γt₁}|ΔC*|/(|J|√(1+γ²/4J²)))⁻¹.
/// `None` when the target exceeds the feasibility ceiling.
pub fn min_time_resonance(params: &DimerParams, t1: f64, target: f64) -> Result<Option<f64>> {
    resonance_preconditions(params)?;
    if target < 0.0 {
        return Err(QresError::Validation("target must be ≥ 0".into()));
    }
    let (j, gamma) = (params.coupling.abs(), params.decay_donor);
    if gamma == 0.0 {
        return Ok(Some(target / rabi_envelope_amplitude(j, gamma)));
    }
    let x = gamma * (gamma * t1).exp() * target / rabi_envelope_amplitude(j, gamma);
    if x >= 1.0 {
        return Ok(None);
    }
    Ok(Some((1.0 / (1.0 - x)).ln() / gamma))
}

fn resonance_preconditions(params: &DimerParams) -> Result<()> {
    require(params.detuning == 0.0, "resonance bounds need Δ = 0")?;
    require(params.dephasing_rate == 0.0, "resonance bounds need γφ = 0")?;
    require(
        params.decay_donor == params.decay_acceptor,
        "resonance bounds need symmetric lifetimes",
    )?;
    require(params.coupling != 0.0, "resonance bounds need J ≠ 0")
}

/// Envelope constants of the zero-detuning bound:
/// a = J(μ_A−μ_D) − ξ·Im ν and b = [Im ν(ξγφ − 8J²) − J(μ_A−μ_D)(γ+ξ)]/(2ω or 2κ),
/// giving |Js − ξv| ≤ e^{−ζt}·√(a² + b²) (underdamped) or e^{(κ−ζ)t}·√(a² + b²).
fn zero_detuning_envelope(params: &DimerParams, m: &ObservableCoeffs) -> Result<(f64, f64, f64, Regime)> {
    require(params.detuning == 0.0, "zero-detuning bounds need Δ = 0")?;
    require(
        params.decay_donor == params.decay_acceptor,
        "zero-detuning bounds need symmetric lifetimes",
    )?;
    let (j, gphi, gamma) = (params.coupling, params.dephasing_rate, params.decay_donor);
    let xi = gphi + gamma;
    let zeta = 0.5 * (gamma + xi);
    let pop = m.mu_a - m.mu_d;
    let a = j * pop - xi * m.nu.im;
    let numerator = m.nu.im * (xi * gphi - 8.0 * j * j) - j * pop * (gamma + xi);
    match regime(params) {
        Regime::Underdamped => {
            let omega = 0.5 * (16.0 * j * j - gphi * gphi).sqrt();
            let b = numerator / (2.0 * omega);
            Ok(((a * a + b * b).sqrt(), zeta, 0.0, Regime::Underdamped))
        }
        Regime::Overdamped => {
            let kappa = 0.5 * (gphi * gphi - 16.0 * j * j).sqrt();
            let b = numerator / (2.0 * kappa);
            Ok(((a * a + b * b).sqrt(), zeta, kappa, Regime::Overdamped))
        }
        Regime::Critical => Err(QresError::RegimeMismatch(
            "zero-detuning envelopes are printed for γφ ≠ 4|J| only (1/ω and 1/κ blow up)".into(),
        )),
    }
}

/// Zero-detuning variation envelope for a general block readout:
/// |ΔC| ≤ |Re ν|(e^{−ξt₁} − e^{−ξt₂}) + R/δ·(e^{−δt₁} − e^{−δt₂}) with
/// δ = ζ (underdamped) or ζ − κ (overdamped).
pub fn variation_envelope_zero_detuning(
    params: &DimerParams,
    m: &ObservableCoeffs,
    t1: f64,
    t2: f64,
) -> Result<f64> {
    let (r_env, zeta, kappa, _) = zero_detuning_envelope(params, m)?;
    let xi = params.dephasing_rate + params.decay_donor;
    // ∫|ξu| integrates to |Re ν|(e^{−ξt₁} − e^{−ξt₂}) exactly
    let first = if xi > 0.0 {
        m.nu.re.abs() * ((-xi * t1).exp() - (-xi * t2).exp())
    } else {
        0.0
    };
    let rate = zeta - kappa;
    let second = if rate > 0.0 {
        r_env / rate * ((-rate * t1).exp() - (-rate * t2).exp())
    } else {
        r_env * (t2 - t1)
    };
    Ok(first + second)
}

/// Zero-detuning feasibility ceiling for readouts with Re ν = 0
/// (the printed minimal-time algebra needs the first envelope term absent).
pub fn feasibility_ceiling_zero_detuning(
    params: &DimerParams,
    m: &ObservableCoeffs,
    t1: f64,
) -> Result<f64> {
    require(
        m.nu.re.abs() < 1e-12,
        "zero-detuning ceiling is printed for Re ν = 0 readouts",
    )?;
    let (r_env, zeta, kappa, _) = zero_detuning_envelope(params, m)?;
    let rate = zeta - kappa;
    if rate <= 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(r_env / rate * (-rate * t1).exp())
}

/// Zero-detuning minimal-time bound; `None` when the target exceeds the
/// feasibility ceiling.
pub fn min_time_zero_detuning(
    params: &DimerParams,
    m: &ObservableCoeffs,
    t1: f64,
    target: f64,
) -> Result<Option<f64>> {
    require(
        m.nu.re.abs() < 1e-12,
        "zero-detuning minimal time is printed for Re ν = 0 readouts",
    )?;
    if target < 0.0 {
        return Err(QresError::Validation("target must be ≥ 0".into()));
    }
    let (r_env, zeta, kappa, _) = zero_detuning_envelope(params, m)?;
    let rate = zeta - kappa;
    if rate <= 0.0 {
        return Ok(Some(target / r_env));
    }
    let x = rate * target * (rate * t1).exp() / r_env;
    if x >= 1.0 {
        return Ok(None);
    }
    Ok(Some((1.0 / (1.0 - x)).ln() / rate))
}

/// Bundled closed-form bound evaluation for the CLI.
#[derive(Debug, Clone)]
pub struct DimerBounds {
    pub regime: Regime,
    /// √(4J² + Δ²) + 4γφ + 2(γ_D + γ_A).
    pub l_norm_certificate: f64,
    /// Resonance-branch (Δ=0, γφ=0) quantities, when applicable.
    pub resonance_envelope: Option<f64>,
    pub resonance_ceiling: Option<f64>,
    pub resonance_min_time: Option<Option<f64>>,
    /// Zero-detuning branch quantities, when applicable.
    pub detuning_free_envelope: Option<f64>,
    pub detuning_free_ceiling: Option<f64>,
    pub detuning_free_min_time: Option<Option<f64>>,
}

pub fn closed_form_bounds(
    params: &DimerParams,
    m: &ObservableCoeffs,
    t1: f64,
    t2: f64,
    target: f64,
) -> DimerBounds {
    DimerBounds {
        regime: regime(params),
        l_norm_certificate: l_one_one_certificate(params),
        resonance_envelope: variation_envelope_resonance(params, t1, t2).ok(),
        resonance_ceiling: feasibility_ceiling_resonance(params, t1).ok(),
        resonance_min_time: min_time_resonance(params, t1, target).ok(),
        detuning_free_envelope: variation_envelope_zero_detuning(params, m, t1, t2).ok(),
        detuning_free_ceiling: feasibility_ceiling_zero_detuning(params, m, t1).ok(),
        detuning_free_min_time: min_time_zero_detuning(params, m, t1, target).ok(),
    }
}
