//! Seeded random generation of states, observables, unitaries, and channels.
//!
//! Pure states are Haar-uniform (normalized complex Gaussian), mixed states
//! follow the Hilbert–Schmidt measure (Ginibre G G†/Tr). RNG state is explicit
//! and never shared, so every draw is reproducible from the seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::operators::{cr, eig_hermitian, outer, CMat, CVec, DensityOperator, HermitianObservable};
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleKind {
    PureState,
    MixedState,
    Hermitian,
    PovmElement,
}

/// Value produced by the kind-dispatched sampler entry point.
#[derive(Debug, Clone)]
pub enum Sampled {
    State(DensityOperator),
    Observable(HermitianObservable),
}

pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn seed_from_u64(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Derive an independent stream for a parallel worker.
    pub fn stream(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { rng }
    }

    fn gaussian(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    fn gaussian_c(&mut self) -> C64 {
        C64::new(self.gaussian(), self.gaussian())
    }

    /// Square matrix of i.i.d. standard complex Gaussians.
    pub fn ginibre(&mut self, dim: usize) -> CMat {
        CMat::from_fn(dim, dim, |_, _| self.gaussian_c())
    }

    /// Haar-uniform unit vector.
    pub fn pure_ket(&mut self, dim: usize) -> CVec {
        loop {
            let v = CVec::from_fn(dim, |_, _| self.gaussian_c());
            let n = v.norm();
            if n > 1e-12 {
                return v.unscale(n);
            }
        }
    }

    pub fn pure_state(&mut self, dim: usize) -> DensityOperator {
        let psi = self.pure_ket(dim);
        DensityOperator::new(outer(&psi, &psi)).expect("pure projector is a valid state")
    }

    /// Hilbert–Schmidt-measure mixed state, G G†/Tr[G G†].
    pub fn mixed_state(&mut self, dim: usize) -> DensityOperator {
        loop {
            let g = self.ginibre(dim);
            let m = &g * g.adjoint();
            let tr: C64 = m.diagonal().iter().sum();
            if tr.re > 1e-10 {
                return DensityOperator::new(m.unscale(tr.re)).expect("Ginibre state is valid");
            }
        }
    }

    /// GUE-style random Hermitian matrix, (G + G†)/2.
    pub fn hermitian(&mut self, dim: usize) -> CMat {
        let g = self.ginibre(dim);
        (&g + g.adjoint()).scale(0.5)
    }

    /// Haar-distributed unitary via QR of a Ginibre matrix with phase fixing.
    pub fn unitary(&mut self, dim: usize) -> CMat {
        let g = self.ginibre(dim);
        let qr = g.qr();
        let r = qr.r();
        let mut q = qr.q();
        for j in 0..dim {
            let d = r[(j, j)];
            let phase = if d.norm() > 0.0 { d / d.norm() } else { cr(1.0) };
            for i in 0..dim {
                q[(i, j)] *= phase;
            }
        }
        q
    }

    /// Random effect 0 ≤ M ≤ 1: Haar basis with uniform eigenvalues in \[0,1\].
    pub fn povm_element(&mut self, dim: usize) -> HermitianObservable {
        let u = self.unitary(dim);
        let evals = CMat::from_fn(dim, dim, |i, j| {
            if i == j {
                cr(self.rng.random::<f64>())
            } else {
                cr(0.0)
            }
        });
        HermitianObservable::new_povm(&u * evals * u.adjoint()).expect("spectrum in [0,1]")
    }

    /// Random POVM with `outcomes` elements: random PSD operators normalized
    /// by the symmetric square root of their sum.
    pub fn povm(&mut self, dim: usize, outcomes: usize) -> Vec<HermitianObservable> {
        let raw: Vec<CMat> = (0..outcomes)
            .map(|_| {
                let g = self.ginibre(dim);
                &g * g.adjoint()
            })
            .collect();
        let total = raw.iter().fold(CMat::zeros(dim, dim), |acc, m| acc + m);
        let s = inv_sqrt_psd(&total);
        raw.into_iter()
            .map(|m| {
                let e = &s * m * &s;
                // symmetrize away round-off before validation
                let e = (&e + e.adjoint()).scale(0.5);
                HermitianObservable::new_povm(e).expect("normalized effect")
            })
            .collect()
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.rng.random::<f64>()
    }

    pub fn random_u64(&mut self) -> u64 {
        self.rng.random()
    }

    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.rng.random::<f64>() < p
    }

    /// Binomial draw, number of successes in n Bernoulli(p) trials.
    pub fn binomial(&mut self, n: u64, p: f64) -> u64 {
        use rand_distr::{Binomial, Distribution};
        Binomial::new(n, p.clamp(0.0, 1.0))
            .expect("valid binomial parameters")
            .sample(&mut self.rng)
    }

    /// Kind-dispatched entry point matching the CLI sampler options.
    pub fn sample(&mut self, kind: SampleKind, dim: usize) -> Sampled {
        match kind {
            SampleKind::PureState => Sampled::State(self.pure_state(dim)),
            SampleKind::MixedState => Sampled::State(self.mixed_state(dim)),
            SampleKind::Hermitian => Sampled::Observable(
                HermitianObservable::new(self.hermitian(dim)).expect("Hermitian by construction"),
            ),
            SampleKind::PovmElement => Sampled::Observable(self.povm_element(dim)),
        }
    }
}

/// S^{-1/2} for a positive definite Hermitian S.
fn inv_sqrt_psd(s: &CMat) -> CMat {
    let (vals, v) = eig_hermitian(s).expect("PSD input is Hermitian");
    let dim = s.nrows();
    let d = CMat::from_fn(dim, dim, |i, j| {
        if i == j {
            cr(1.0 / vals[i].max(1e-300).sqrt())
        } else {
            cr(0.0)
        }
    });
    &v * d * v.adjoint()
}
