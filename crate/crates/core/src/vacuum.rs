//! Vacuum propagation.
//!
//! Two independent routes to `P(α → β)`: the closed-form double sum over
//! mass states, and explicit propagation of the flavor state through
//! `U · M · U^dagger`. They must agree to rounding.

use nalgebra::Vector3;

use crate::error::{OscError, Result};
use crate::linalg::{cis, diag3, CMat3, C64};
use crate::params::{oscillation_phase, Baseline, Flavor, OscParams};
use crate::pmns::{build_pmns, PmnsMatrix};

/// Negative probabilities down to this value are rounding and get clamped.
pub const CLAMP_TOLERANCE: f64 = 1e-9;

/// Mass-state phases `(0, φ21, φ31)` for a baseline.
pub fn mass_phases(params: &OscParams, baseline: &Baseline) -> [f64; 3] {
    [
        0.0,
        oscillation_phase(params.dm2_21, baseline),
        oscillation_phase(params.dm2_31, baseline),
    ]
}

/// `diag(1, exp(-i φ21), exp(-i φ31))`.
pub fn vacuum_phase_matrix(params: &OscParams, baseline: &Baseline) -> CMat3 {
    let [p1, p2, p3] = mass_phases(params, baseline);
    diag3([cis(-p1), cis(-p2), cis(-p3)])
}

/// `U · diag(exp(-i φ_k)) · U^dagger` for arbitrary mixing and phases.
pub fn evolution_from_mixing(mixing: &PmnsMatrix, phases: [f64; 3]) -> CMat3 {
    let u = mixing.matrix();
    let m = diag3([cis(-phases[0]), cis(-phases[1]), cis(-phases[2])]);
    u * m * u.adjoint()
}

/// Vacuum evolution operator in the flavor basis.
pub fn evolution_operator(params: &OscParams, baseline: &Baseline) -> CMat3 {
    evolution_from_mixing(&build_pmns(params), mass_phases(params, baseline))
}

/// Flavor-basis state after propagating `initial` over `baseline`.
pub fn propagate(params: &OscParams, baseline: &Baseline, initial: Flavor) -> Result<Vector3<C64>> {
    let a = initial.active_index()?;
    Ok(evolution_operator(params, baseline).column(a).into_owned())
}

/// Accepts rounding noise just outside `[0, 1]`, rejects anything larger.
pub fn clamp_probability(p: f64) -> Result<f64> {
    if !p.is_finite() || !(-CLAMP_TOLERANCE..=1.0 + CLAMP_TOLERANCE).contains(&p) {
        return Err(OscError::ProbabilityOutOfRange { value: p });
    }
    Ok(p.clamp(0.0, 1.0))
}

/// Double sum `Σ_ij U*_αi U_βi U_αj U*_βj exp(-i (φ_i - φ_j))`.
pub fn closed_form_from_mixing(
    mixing: &PmnsMatrix,
    phases: [f64; 3],
    alpha: Flavor,
    beta: Flavor,
) -> Result<f64> {
    let a = alpha.active_index()?;
    let b = beta.active_index()?;
    let u = mixing.matrix();
    let mut sum = C64::new(0.0, 0.0);
    for i in 0..3 {
        for j in 0..3 {
            let w = u[(a, i)].conj() * u[(b, i)] * u[(a, j)] * u[(b, j)].conj();
            sum += w * cis(-(phases[i] - phases[j]));
        }
    }
    if sum.im.abs() >= CLAMP_TOLERANCE {
        return Err(OscError::ComplexProbability(sum.im.abs()));
    }
    clamp_probability(sum.re)
}

/// `|<β| U M U^dagger |α>|^2` for arbitrary mixing and phases.
pub fn propagated_from_mixing(
    mixing: &PmnsMatrix,
    phases: [f64; 3],
    alpha: Flavor,
    beta: Flavor,
) -> Result<f64> {
    let a = alpha.active_index()?;
    let b = beta.active_index()?;
    clamp_probability(evolution_from_mixing(mixing, phases)[(b, a)].norm_sqr())
}

pub fn probability_closed_form(
    params: &OscParams,
    baseline: &Baseline,
    alpha: Flavor,
    beta: Flavor,
) -> Result<f64> {
    closed_form_from_mixing(
        &build_pmns(params),
        mass_phases(params, baseline),
        alpha,
        beta,
    )
}

pub fn probability_via_propagation(
    params: &OscParams,
    baseline: &Baseline,
    alpha: Flavor,
    beta: Flavor,
) -> Result<f64> {
    propagated_from_mixing(
        &build_pmns(params),
        mass_phases(params, baseline),
        alpha,
        beta,
    )
}

/// All nine probabilities, `table[α][β] = P(α → β)`, via propagation.
pub fn probability_table(params: &OscParams, baseline: &Baseline) -> Result<[[f64; 3]; 3]> {
    let s = evolution_operator(params, baseline);
    let mut out = [[0.0; 3]; 3];
    for (a, row) in out.iter_mut().enumerate() {
        for (b, p) in row.iter_mut().enumerate() {
            *p = clamp_probability(s[(b, a)].norm_sqr())?;
        }
    }
    Ok(out)
}
