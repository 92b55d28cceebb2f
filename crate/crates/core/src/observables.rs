//! Phase decomposition of the mode Loschmidt amplitude, the dynamical
//! topological order parameter, and the double-mode entanglement entropy.

use std::f64::consts::{PI, TAU};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::model::MomentumGrid;
use crate::quench::{delta_k, ModeQuenchData, QuenchCache, QuenchSpec};
use crate::squeeze::{canonical_angle, SqueezeSpec};

/// Below this modulus the phase of `G_k` is treated as undefined.
pub const PHASE_FLOOR: f64 = 1e-12;
/// Largest rounding residue tolerated by [`dtop_winding`].
pub const WINDING_RESIDUE_MAX: f64 = 0.1;

/// `φ^dyn_k(t) = (|A_k|² - |B_k|²) ε̃_k t = Δ_k ε̃_k t`.
pub fn dynamical_phase(k: f64, q: &QuenchSpec, s: &SqueezeSpec, t: f64) -> f64 {
    let m = ModeQuenchData::new(k, q, s);
    m.delta * m.eps_post * t
}

/// Reduce to `[0, 2π)`. Values within 1e-12 below `2π` map to 0.
pub fn canonical_geometric(phi: f64) -> f64 {
    let p = phi.rem_euclid(TAU);
    if p >= TAU - 1e-12 {
        0.0
    } else {
        p
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseSeries {
    pub k: f64,
    pub times: Vec<f64>,
    pub phi_total: Vec<f64>,
    pub phi_dyn: Vec<f64>,
    /// In `[0, 2π)`.
    pub phi_geo: Vec<f64>,
    /// Samples where `|G_k| < 1e-12`; their total phase is interpolated.
    pub flagged: Vec<bool>,
}

fn check_phase_times(times: &[f64]) -> Result<()> {
    match times.first() {
        None => return invalid("time list is empty"),
        Some(&t0) if t0 != 0.0 => {
            return invalid(format!("phase series must start at t = 0, got {t0}"))
        }
        _ => {}
    }
    if times.iter().any(|t| !t.is_finite()) || times.windows(2).any(|w| w[1] <= w[0]) {
        return invalid("times must be finite and strictly increasing");
    }
    Ok(())
}

/// Phase velocity `Im(G'/G)`.
fn phase_velocity(m: &ModeQuenchData, t: f64) -> f64 {
    let g = m.loschmidt(t);
    (m.loschmidt_derivative(t) * g.conj()).im / g.norm_sqr()
}

/// `arg G_k(t)` unwrapped along `times` (which start at 0).
///
/// Each step takes the principal increment of `arg G` plus the multiple of
/// `2π` closest to the increment predicted by the phase velocity. A step over
/// which the velocity allows a change of `π` or more is rejected with
/// [`Error::RefineGrid`]. Returns the phases and the flags of samples with
/// `|G_k| < 1e-12`, which are bridged by linear interpolation.
pub fn total_phase_flagged(
    k: f64,
    q: &QuenchSpec,
    s: &SqueezeSpec,
    times: &[f64],
) -> Result<(Vec<f64>, Vec<bool>)> {
    check_phase_times(times)?;
    let m = ModeQuenchData::new(k, q, s);
    let g: Vec<_> = times.iter().map(|&t| m.loschmidt(t)).collect();
    let flagged: Vec<bool> = g.iter().map(|z| z.norm() < PHASE_FLOOR).collect();
    let mut phase = vec![0.0; times.len()];
    let mut prev: Option<(usize, f64)> = None;
    for i in 0..times.len() {
        if flagged[i] {
            continue;
        }
        let omega = phase_velocity(&m, times[i]);
        if let Some((p, omega_p)) = prev {
            let step = times[i] - times[p];
            let fastest = omega.abs().max(omega_p.abs());
            if fastest * step >= PI {
                return Err(Error::RefineGrid {
                    t0: times[p],
                    t1: times[i],
                    step,
                    required_dt: PI / fastest,
                });
            }
            let principal = canonical_angle(g[i].arg() - g[p].arg());
            let predicted = 0.5 * (omega + omega_p) * step;
            let branch = ((predicted - principal) / TAU).round();
            phase[i] = phase[p] + principal + TAU * branch;
        } else {
            phase[i] = g[i].arg();
        }
        prev = Some((i, omega));
    }
    bridge_flagged(times, &mut phase, &flagged);
    Ok((phase, flagged))
}

fn bridge_flagged(times: &[f64], phase: &mut [f64], flagged: &[bool]) {
    let n = phase.len();
    let mut i = 0;
    while i < n {
        if !flagged[i] {
            i += 1;
            continue;
        }
        let start = i;
        while i < n && flagged[i] {
            i += 1;
        }
        let left = start.checked_sub(1);
        let right = (i < n).then_some(i);
        for j in start..i {
            phase[j] = match (left, right) {
                (Some(l), Some(r)) => {
                    let w = (times[j] - times[l]) / (times[r] - times[l]);
                    phase[l] + w * (phase[r] - phase[l])
                }
                (Some(l), None) => phase[l],
                (None, Some(r)) => phase[r],
                (None, None) => 0.0,
            };
        }
    }
}

pub fn total_phase(k: f64, q: &QuenchSpec, s: &SqueezeSpec, times: &[f64]) -> Result<Vec<f64>> {
    total_phase_flagged(k, q, s, times).map(|(phase, _)| phase)
}

/// `φ^G = (φ_total - φ^dyn) mod 2π`, in `[0, 2π)`.
pub fn geometric_phase(k: f64, q: &QuenchSpec, s: &SqueezeSpec, times: &[f64]) -> Result<Vec<f64>> {
    phase_series(k, q, s, times).map(|p| p.phi_geo)
}

pub fn phase_series(k: f64, q: &QuenchSpec, s: &SqueezeSpec, times: &[f64]) -> Result<PhaseSeries> {
    let (phi_total, flagged) = total_phase_flagged(k, q, s, times)?;
    let m = ModeQuenchData::new(k, q, s);
    let phi_dyn: Vec<f64> = times.iter().map(|t| m.delta * m.eps_post * t).collect();
    let phi_geo = phi_total
        .iter()
        .zip(&phi_dyn)
        .map(|(a, b)| canonical_geometric(a - b))
        .collect();
    Ok(PhaseSeries {
        k,
        times: times.to_vec(),
        phi_total,
        phi_dyn,
        phi_geo,
        flagged,
    })
}

/// `φ^G_k(t)` from the principal value of `arg G_k(t) - Δ_k ε̃_k t`; no
/// time history is needed.
fn pointwise_geometric(m: &ModeQuenchData, t: f64) -> f64 {
    canonical_angle(m.loschmidt(t).arg() - m.delta * m.eps_post * t)
}

/// Winding of `φ^G_k(t)` around the closed momentum loop and its rounding
/// residue.
fn winding_raw(cache: &QuenchCache, t: f64) -> (i64, f64) {
    let phases: Vec<f64> = cache
        .modes()
        .iter()
        .map(|m| pointwise_geometric(m, t))
        .collect();
    let n = phases.len();
    // adjacent increments plus the segment closing the loop
    let total: f64 = (0..n)
        .map(|j| canonical_angle(phases[(j + 1) % n] - phases[j]))
        .sum();
    let turns = total / TAU;
    let nu = turns.round();
    (nu as i64, (turns - nu).abs())
}

/// Dynamical topological order parameter `ν(t)`: the winding number of the
/// Pancharatnam phase across the momentum grid.
pub fn dtop_winding(q: &QuenchSpec, s: &SqueezeSpec, t: f64, grid: &MomentumGrid) -> Result<i64> {
    if !t.is_finite() {
        return invalid(format!("time must be finite, got {t}"));
    }
    if grid.is_empty() {
        return invalid("momentum grid is empty");
    }
    let (nu, residue) = winding_raw(&QuenchCache::new(q, s, grid), t);
    if residue > WINDING_RESIDUE_MAX {
        return Err(Error::WindingResidue { t, residue });
    }
    Ok(nu)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WindingSeries {
    pub times: Vec<f64>,
    pub nu: Vec<i64>,
}

impl WindingSeries {
    /// Times `t_i` with `ν(t_i) ≠ ν(t_{i-1})`.
    pub fn jump_times(&self) -> Vec<f64> {
        self.nu
            .windows(2)
            .zip(self.times.iter().skip(1))
            .filter(|(w, _)| w[0] != w[1])
            .map(|(_, t)| *t)
            .collect()
    }
}

pub fn winding_series(
    q: &QuenchSpec,
    s: &SqueezeSpec,
    grid: &MomentumGrid,
    times: &[f64],
) -> Result<WindingSeries> {
    if grid.is_empty() {
        return invalid("momentum grid is empty");
    }
    if times.iter().any(|t| !t.is_finite()) {
        return invalid("times must be finite");
    }
    let cache = QuenchCache::new(q, s, grid);
    let nu = times
        .par_iter()
        .map(|&t| {
            let (nu, residue) = winding_raw(&cache, t);
            if residue > WINDING_RESIDUE_MAX {
                Err(Error::WindingResidue { t, residue })
            } else {
                Ok(nu)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(WindingSeries {
        times: times.to_vec(),
        nu,
    })
}

/// Von Neumann entropy of `ρ_k = diag((1+Δ)/2, (1-Δ)/2)` in nats.
pub fn mode_entropy(delta: f64) -> Result<f64> {
    if !delta.is_finite() || delta.abs() > 1.0 + 1e-12 {
        return invalid(format!("|delta| must not exceed 1, got {delta}"));
    }
    let d = delta.clamp(-1.0, 1.0);
    let term = |p: f64| if p > 0.0 { -p * p.ln() } else { 0.0 };
    Ok(term(0.5 * (1.0 + d)) + term(0.5 * (1.0 - d)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntropyProfile {
    pub momenta: Vec<f64>,
    pub entropy: Vec<f64>,
}

impl EntropyProfile {
    /// `(k, S_k)` at the largest entropy on the grid.
    pub fn argmax(&self) -> Option<(f64, f64)> {
        self.momenta
            .iter()
            .zip(&self.entropy)
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(k, s)| (*k, *s))
    }
}

pub fn entropy_profile(q: &QuenchSpec, s: &SqueezeSpec, grid: &MomentumGrid) -> EntropyProfile {
    let entropy = grid
        .momenta()
        .iter()
        .map(|&k| mode_entropy(delta_k(k, q, s)).expect("|Δ_k| ≤ 1 up to rounding"))
        .collect();
    EntropyProfile {
        momenta: grid.momenta().to_vec(),
        entropy,
    }
}
