//! Config schema and conversion into validated core objects.
//!
//! The file format is TOML with nested sections for model, map, observable,
//! and run options. Unknown keys are rejected. Complex matrices are given as
//! row-major lists of [re, im] pairs, e.g.
//! `hamiltonian = [[[0.0,0.0],[1.0,0.0]],[[1.0,0.0],[0.0,0.0]]]`.

use serde::Deserialize;

use qres_core::dimer::{DimerModel, DimerParams, ObservableCoeffs};
use qres_core::operators::{c, CMat, CVec, DensityOperator, HermitianObservable};
use qres_core::{LindbladGenerator, QuantumChannel, ResourceDestroyingMap};

use crate::CliError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelSection,
    pub map: MapSection,
    pub observable: ObservableSection,
    #[serde(default)]
    pub run: RunSection,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub kind: ModelKind,
    // dimer parameters
    pub detuning: Option<f64>,
    pub coupling: Option<f64>,
    pub dephasing_rate: Option<f64>,
    pub decay_donor: Option<f64>,
    pub decay_acceptor: Option<f64>,
    pub theta: Option<f64>,
    pub eta: Option<f64>,
    pub p_donor: Option<f64>,
    pub p_acceptor: Option<f64>,
    // custom generator
    pub dim: Option<usize>,
    pub hamiltonian: Option<MatrixSpec>,
    #[serde(default)]
    pub jump: Vec<JumpSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Dimer,
    Custom,
}

pub type MatrixSpec = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JumpSpec {
    pub operator: MatrixSpec,
    pub rate: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapSection {
    pub kind: MapKindSpec,
    pub basis: Option<Vec<Vec<[f64; 2]>>>,
    pub unitaries: Option<Vec<MatrixSpec>>,
    pub sigma: Option<MatrixSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapKindSpec {
    SiteDephasing,
    Dephasing,
    Twirl,
    Replacement,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObservableSection {
    pub kind: ObservableKind,
    pub mu_g: Option<f64>,
    pub mu_d: Option<f64>,
    pub mu_a: Option<f64>,
    /// [re, im] of the D–A coherence coefficient.
    pub nu: Option<[f64; 2]>,
    pub matrix: Option<MatrixSpec>,
    /// Enforce 0 ≤ M ≤ 1 at parse time.
    #[serde(default)]
    pub povm: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObservableKind {
    Coeffs,
    Matrix,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunSection {
    pub seed: u64,
    pub t_start: f64,
    pub t_end: f64,
    pub grid_points: usize,
    pub theta_points: usize,
    pub restarts: usize,
    pub samples: usize,
    pub target: f64,
    pub quad_tol: f64,
    pub shots: Vec<u64>,
    pub trials: u64,
}

impl Default for RunSection {
    fn default() -> Self {
        Self {
            seed: 7,
            t_start: 0.0,
            t_end: 1.0,
            grid_points: 200,
            theta_points: 181,
            restarts: 32,
            samples: 200,
            target: 0.1,
            quad_tol: 1e-9,
            shots: vec![1, 10, 100, 1000],
            trials: 100_000,
        }
    }
}

/// Everything a command needs, fully validated.
pub struct Prepared {
    pub dim: usize,
    pub generator: LindbladGenerator,
    pub channel: QuantumChannel,
    pub map: ResourceDestroyingMap,
    pub observable: HermitianObservable,
    /// Present when the model is the built-in dimer.
    pub dimer: Option<(DimerParams, DimerModel)>,
    /// Present when the observable was given in coefficient form.
    pub coeffs: Option<ObservableCoeffs>,
    pub run: RunSectionOwned,
}

/// Run options after the CLI seed override.
#[derive(Debug, Clone)]
pub struct RunSectionOwned {
    pub seed: u64,
    pub t_start: f64,
    pub t_end: f64,
    pub grid_points: usize,
    pub theta_points: usize,
    pub restarts: usize,
    pub target: f64,
    pub quad_tol: f64,
    pub shots: Vec<u64>,
    pub trials: u64,
}

pub fn parse(path: &std::path::Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn matrix_from_spec(spec: &MatrixSpec, what: &str) -> Result<CMat, CliError> {
    let n = spec.len();
    if n == 0 || spec.iter().any(|row| row.len() != n) {
        return Err(CliError::Config(format!("{what}: matrix must be square and nonempty")));
    }
    let mut m = CMat::zeros(n, n);
    for (i, row) in spec.iter().enumerate() {
        for (j, &[re, im]) in row.iter().enumerate() {
            m[(i, j)] = c(re, im);
        }
    }
    Ok(m)
}

fn ket_from_spec(spec: &[[f64; 2]]) -> CVec {
    CVec::from_fn(spec.len(), |i, _| c(spec[i][0], spec[i][1]))
}

impl RunConfig {
    pub fn prepare(self, seed_override: Option<u64>) -> Result<Prepared, CliError> {
        let (dim, generator, channel, dimer) = self.build_model()?;
        let map = self.build_map(dim)?;
        let (observable, coeffs) = self.build_observable(dim)?;
        if map.dim() != dim || observable.dim() != dim {
            return Err(CliError::Config(format!(
                "dimension mismatch: model {dim}, map {}, observable {}",
                map.dim(),
                observable.dim()
            )));
        }
        let r = &self.run;
        if r.t_end < r.t_start {
            return Err(CliError::Config("run.t_end must be ≥ run.t_start".into()));
        }
        if r.grid_points < 2 {
            return Err(CliError::Config("run.grid_points must be ≥ 2".into()));
        }
        if r.trials == 0 || r.shots.contains(&0) {
            return Err(CliError::Config("run.trials and run.shots entries must be ≥ 1".into()));
        }
        Ok(Prepared {
            dim,
            generator,
            channel,
            map,
            observable,
            dimer,
            coeffs,
            run: RunSectionOwned {
                seed: seed_override.unwrap_or(r.seed),
                t_start: r.t_start,
                t_end: r.t_end,
                grid_points: r.grid_points,
                theta_points: r.theta_points,
                restarts: r.restarts,
                target: r.target,
                quad_tol: r.quad_tol,
                shots: r.shots.clone(),
                trials: r.trials,
            },
        })
    }

    #[allow(clippy::type_complexity)]
    fn build_model(
        &self,
    ) -> Result<(usize, LindbladGenerator, QuantumChannel, Option<(DimerParams, DimerModel)>), CliError>
    {
        match self.model.kind {
            ModelKind::Dimer => {
                let m = &self.model;
                let mut params = DimerParams::new(
                    m.detuning.unwrap_or(0.0),
                    m.coupling
                        .ok_or_else(|| CliError::Config("model.coupling required for the dimer".into()))?,
                    m.dephasing_rate.unwrap_or(0.0),
                    m.decay_donor.unwrap_or(0.0),
                    m.decay_acceptor.unwrap_or(0.0),
                );
                if let Some(theta) = m.theta {
                    params = params.with_theta(theta);
                }
                params = params.with_damping(
                    m.eta.unwrap_or(1.0),
                    m.p_donor.unwrap_or(0.0),
                    m.p_acceptor.unwrap_or(0.0),
                );
                let model = DimerModel::build(params)
                    .map_err(|e| CliError::Config(format!("model: {e}")))?;
                Ok((
                    3,
                    model.generator.clone(),
                    model.step_channel.clone(),
                    Some((params, model)),
                ))
            }
            ModelKind::Custom => {
                let m = &self.model;
                let h_spec = m
                    .hamiltonian
                    .as_ref()
                    .ok_or_else(|| CliError::Config("model.hamiltonian required for custom models".into()))?;
                let h = matrix_from_spec(h_spec, "model.hamiltonian")?;
                let dim = m.dim.unwrap_or(h.nrows());
                if dim != h.nrows() {
                    return Err(CliError::Config("model.dim disagrees with the Hamiltonian".into()));
                }
                let mut jumps = Vec::with_capacity(m.jump.len());
                for (k, j) in m.jump.iter().enumerate() {
                    let op = matrix_from_spec(&j.operator, &format!("model.jump[{k}].operator"))?;
                    if op.nrows() != dim {
                        return Err(CliError::Config(format!("model.jump[{k}] has wrong dimension")));
                    }
                    jumps.push((op, j.rate));
                }
                let generator = LindbladGenerator::new(h, jumps)
                    .map_err(|e| CliError::Config(format!("model: {e}")))?;
                let channel = generator
                    .propagate(self.run.t_end.max(0.0))
                    .map_err(|e| CliError::Config(format!("model propagation: {e}")))?;
                Ok((dim, generator, channel, None))
            }
        }
    }

    fn build_map(&self, dim: usize) -> Result<ResourceDestroyingMap, CliError> {
        let m = &self.map;
        match m.kind {
            MapKindSpec::SiteDephasing => Ok(ResourceDestroyingMap::site_dephasing(dim)),
            MapKindSpec::Dephasing => {
                let basis = m
                    .basis
                    .as_ref()
                    .ok_or_else(|| CliError::Config("map.basis required for kind = \"dephasing\"".into()))?;
                let kets: Vec<CVec> = basis.iter().map(|k| ket_from_spec(k)).collect();
                ResourceDestroyingMap::dephasing(&kets)
                    .map_err(|e| CliError::Config(format!("map: {e}")))
            }
            MapKindSpec::Twirl => {
                let specs = m
                    .unitaries
                    .as_ref()
                    .ok_or_else(|| CliError::Config("map.unitaries required for kind = \"twirl\"".into()))?;
                let us = specs
                    .iter()
                    .enumerate()
                    .map(|(k, u)| matrix_from_spec(u, &format!("map.unitaries[{k}]")))
                    .collect::<Result<Vec<_>, _>>()?;
                ResourceDestroyingMap::twirl(&us).map_err(|e| CliError::Config(format!("map: {e}")))
            }
            MapKindSpec::Replacement => {
                let spec = m
                    .sigma
                    .as_ref()
                    .ok_or_else(|| CliError::Config("map.sigma required for kind = \"replacement\"".into()))?;
                let sigma = DensityOperator::new(matrix_from_spec(spec, "map.sigma")?)
                    .map_err(|e| CliError::Config(format!("map.sigma: {e}")))?;
                Ok(ResourceDestroyingMap::replacement(sigma))
            }
        }
    }

    fn build_observable(
        &self,
        dim: usize,
    ) -> Result<(HermitianObservable, Option<ObservableCoeffs>), CliError> {
        let o = &self.observable;
        match o.kind {
            ObservableKind::Coeffs => {
                if dim != 3 {
                    return Err(CliError::Config(
                        "observable.kind = \"coeffs\" needs the three-level dimer model".into(),
                    ));
                }
                let nu = o.nu.unwrap_or([0.0, 0.0]);
                let coeffs = ObservableCoeffs {
                    mu_g: o.mu_g.unwrap_or(0.0),
                    mu_d: o.mu_d.unwrap_or(0.0),
                    mu_a: o.mu_a.unwrap_or(0.0),
                    nu: c(nu[0], nu[1]),
                };
                let obs = if o.povm {
                    coeffs.povm_observable()
                } else {
                    coeffs.observable()
                }
                .map_err(|e| CliError::Config(format!("observable: {e}")))?;
                Ok((obs, Some(coeffs)))
            }
            ObservableKind::Matrix => {
                let spec = o
                    .matrix
                    .as_ref()
                    .ok_or_else(|| CliError::Config("observable.matrix required for kind = \"matrix\"".into()))?;
                let m = matrix_from_spec(spec, "observable.matrix")?;
                let obs = if o.povm {
                    HermitianObservable::new_povm(m)
                } else {
                    HermitianObservable::new(m)
                }
                .map_err(|e| CliError::Config(format!("observable: {e}")))?;
                Ok((obs, None))
            }
        }
    }
}
