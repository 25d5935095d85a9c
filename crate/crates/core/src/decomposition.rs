//! Free/resourceful splitting of channels and generators.
//!
//! For a linear idempotent G, any map T splits into four blocks
//! T = GTG + G⊥TG⊥ + G⊥TG + GTG⊥ with G⊥ = id − G. The free part is
//! T_free = GTG (the component acting inside the free sector) and
//! T_res = T − T_free carries everything the impact functional can see:
//! C_M(Λ) = C_M(Λ_res) = C_M(Λ̃_res) with Λ̃_res = Λ − Λ∘G. The cross blocks
//! classify resource generation (G⊥ΛG) and activation (GΛG⊥), and the
//! projected generator G L G drives the free dynamics exactly when
//! G∘L∘G⊥∘Λ_t∘G vanishes.

use crate::channels::{cptp_check, QuantumChannel, SuperOperator};
use crate::dynamics::LindbladGenerator;
use crate::error::{QresError, Result};
use crate::impact::{capacity_superop, ImpactResult};
use crate::operators::{frobenius_norm, matrix_exp, HermitianObservable};
use crate::resource::ResourceDestroyingMap;

/// Frobenius threshold for the yes/no block predicates.
pub const BLOCK_TOL: f64 = 1e-10;
/// Threshold on the compatibility residual series.
pub const COMPATIBILITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct SplitChannel {
    /// G∘Λ∘G.
    pub free: SuperOperator,
    /// Λ − free.
    pub res: SuperOperator,
    /// G⊥∘Λ∘G⊥.
    pub block_res_res: SuperOperator,
    /// G⊥∘Λ∘G: sends free inputs into resourceful directions.
    pub block_generating: SuperOperator,
    /// G∘Λ∘G⊥: converts resourceful content back into the free sector.
    pub block_activating: SuperOperator,
    /// CPTP verdict on the free part (G CPTP ⇒ true for channels).
    pub free_is_cptp: bool,
    /// Trace-preservation residual of the res part; nonzero means the res
    /// part is not a channel on its own.
    pub res_tp_residual: f64,
}

fn require_idempotent(g: &ResourceDestroyingMap) -> Result<()> {
    let m = &g.superop.matrix;
    let residual = frobenius_norm(&(m * m - m));
    if residual > 1e-10 {
        return Err(QresError::Validation(format!(
            "resource-destroying map not idempotent (residual {residual:.3e})"
        )));
    }
    Ok(())
}

/// Split an arbitrary linear map with respect to an idempotent G.
pub fn split_superop(s: &SuperOperator, g: &ResourceDestroyingMap) -> Result<SplitChannel> {
    if s.dim != g.dim() {
        return Err(QresError::DimensionMismatch("split operands".into()));
    }
    require_idempotent(g)?;
    let gs = &g.superop;
    let gperp = g.complement();
    let free = gs.compose(&s.compose(gs)?)?;
    let res = s.sub(&free)?;
    let block_res_res = gperp.compose(&s.compose(&gperp)?)?;
    let block_generating = gperp.compose(&s.compose(gs)?)?;
    let block_activating = gs.compose(&s.compose(&gperp)?)?;
    let free_report = cptp_check(&free);
    let res_report = cptp_check(&res);
    Ok(SplitChannel {
        free,
        res,
        block_res_res,
        block_generating,
        block_activating,
        free_is_cptp: free_report.is_cp && free_report.is_tp,
        res_tp_residual: res_report.tp_residual,
    })
}

pub fn split_channel(ch: &QuantumChannel, g: &ResourceDestroyingMap) -> Result<SplitChannel> {
    split_superop(ch.superoperator(), g)
}

pub fn split_generator(gen: &LindbladGenerator, g: &ResourceDestroyingMap) -> Result<SplitChannel> {
    split_superop(&gen.liouville, g)
}

/// The full, resource-part, and trimmed-resource capacities, which agree for
/// linear idempotent G, together with the map-level comparison of
/// Λ_res = Λ − GΛG against Λ̃_res = Λ − ΛG.
#[derive(Debug, Clone)]
pub struct CapacityEquality {
    pub full: ImpactResult,
    pub res: ImpactResult,
    pub res_tilde: ImpactResult,
    /// ‖Λ∘G − G∘Λ∘G‖_F; zero exactly when the two residual maps coincide.
    pub map_gap: f64,
    pub maps_equal: bool,
}

pub fn capacity_equality_check(
    ch: &QuantumChannel,
    g: &ResourceDestroyingMap,
    m: &HermitianObservable,
) -> Result<CapacityEquality> {
    require_idempotent(g)?;
    let split = split_channel(ch, g)?;
    let tilde = ch
        .superoperator()
        .sub(&ch.superoperator().compose(&g.superop)?)?;
    let full = capacity_superop(ch.superoperator(), g, m, &ch.label)?;
    let res = capacity_superop(&split.res, g, m, "res")?;
    let res_tilde = capacity_superop(&tilde, g, m, "res~")?;
    let lambda_g = ch.superoperator().compose(&g.superop)?;
    let map_gap = frobenius_norm(&(&lambda_g.matrix - &split.free.matrix));
    Ok(CapacityEquality {
        full,
        res,
        res_tilde,
        map_gap,
        maps_equal: map_gap < 1e-11,
    })
}

#[derive(Debug, Clone, Copy)]
pub struct CrossBlockFlags {
    pub non_generating: bool,
    pub non_activating: bool,
    pub covariant: bool,
    pub generating_norm: f64,
    pub activating_norm: f64,
    pub commutator_norm: f64,
}

/// Classify a channel by its cross blocks; covariance must coincide with
/// "non-generating and non-activating", and the direct commutator check
/// enforces that consistency.
pub fn cross_block_flags(ch: &QuantumChannel, g: &ResourceDestroyingMap) -> Result<CrossBlockFlags> {
    let split = split_channel(ch, g)?;
    let generating_norm = split.block_generating.frobenius_norm();
    let activating_norm = split.block_activating.frobenius_norm();
    let commutator_norm = {
        let lg = ch.superoperator().compose(&g.superop)?;
        let gl = g.superop.compose(ch.superoperator())?;
        frobenius_norm(&(&lg.matrix - &gl.matrix))
    };
    let non_generating = generating_norm < BLOCK_TOL;
    let non_activating = activating_norm < BLOCK_TOL;
    let covariant = commutator_norm < BLOCK_TOL;
    if covariant != (non_generating && non_activating) {
        return Err(QresError::Validation(format!(
            "cross-block flags inconsistent: commutator {commutator_norm:.3e}, \
             generating {generating_norm:.3e}, activating {activating_norm:.3e}"
        )));
    }
    Ok(CrossBlockFlags {
        non_generating,
        non_activating,
        covariant,
        generating_norm,
        activating_norm,
        commutator_norm,
    })
}

/// Does the projected generator G L G drive the projected dynamics G Λ_t G?
#[derive(Debug, Clone)]
pub struct CompatibilityReport {
    pub times: Vec<f64>,
    /// ‖G∘L∘G⊥∘Λ_t∘G‖_F, the obstruction term in the projected equation.
    pub residual_series: Vec<f64>,
    /// ‖e^{tL_free}∘G − G∘Λ_t∘G‖_F, the integrated cross-validation.
    pub ode_gap_series: Vec<f64>,
    pub max_residual: f64,
    pub max_ode_gap: f64,
    pub compatible: bool,
}

/// Evaluate the compatibility residual on 128 uniform points plus endpoints.
pub fn compatibility_check(
    gen: &LindbladGenerator,
    g: &ResourceDestroyingMap,
    t_start: f64,
    t_end: f64,
) -> Result<CompatibilityReport> {
    if t_end < t_start {
        return Err(QresError::Validation("compatibility window needs t_start ≤ t_end".into()));
    }
    require_idempotent(g)?;
    let gs = &g.superop;
    let gperp = g.complement();
    // G∘L∘G⊥, fixed for a time-independent generator
    let glgp = gs.compose(&gen.liouville.compose(&gperp)?)?;
    let l_free = gs.compose(&gen.liouville.compose(gs)?)?;
    let n_total = 130usize;
    let mut times = Vec::with_capacity(n_total);
    let mut residual_series = Vec::with_capacity(n_total);
    let mut ode_gap_series = Vec::with_capacity(n_total);
    let mut max_residual = 0.0f64;
    let mut max_ode_gap = 0.0f64;
    for i in 0..n_total {
        let t = t_start + (t_end - t_start) * i as f64 / (n_total - 1) as f64;
        let lambda_t = gen.propagator(t);
        let obstruction = glgp.compose(&lambda_t.compose(gs)?)?;
        let residual = obstruction.frobenius_norm();
        // solution of dX/dt = L_free X with X(0) = G, against G Λ_t G
        let projected = gs.compose(&lambda_t.compose(gs)?)?;
        let driven = matrix_exp(&l_free.matrix, t) * &gs.matrix;
        let gap = frobenius_norm(&(driven - &projected.matrix));
        max_residual = max_residual.max(residual);
        max_ode_gap = max_ode_gap.max(gap);
        times.push(t);
        residual_series.push(residual);
        ode_gap_series.push(gap);
    }
    Ok(CompatibilityReport {
        times,
        residual_series,
        ode_gap_series,
        max_residual,
        max_ode_gap,
        compatible: max_residual < COMPATIBILITY_TOL,
    })
}
