//! Double-mode squeezing `S_k(ξ) = exp(ξ* η_{-k}η_k - ξ η_k^†η_{-k}^†)` with
//! `ξ = r e^{iφ}`, acting in the two-state subspace
//! `{|0_k 0_{-k}⟩, |1_k 1_{-k}⟩}` of the pre-quench Bogoliubov vacuum.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::model::{bogoliubov_angle, XYParams};
use crate::numeric::simpson_converged;
use crate::pauli::Mat2;

/// Squeezing strength `r ≥ 0` and direction `φ ∈ (-π, π]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqueezeSpec {
    r: f64,
    phi: f64,
}

impl SqueezeSpec {
    /// Negative strengths are folded via `(r, φ) → (-r, φ + π)`.
    pub fn new(r: f64, phi: f64) -> Result<Self> {
        if !r.is_finite() || !phi.is_finite() {
            return invalid(format!(
                "squeeze parameters must be finite (r = {r}, phi = {phi})"
            ));
        }
        let (r, phi) = if r < 0.0 { (-r, phi + PI) } else { (r, phi) };
        Ok(Self {
            r,
            phi: canonical_angle(phi),
        })
    }

    pub fn none() -> Self {
        Self { r: 0.0, phi: 0.0 }
    }

    /// `r = π/4, φ = 0`, where every mode pair is maximally entangled.
    pub fn universal() -> Self {
        Self {
            r: PI / 4.0,
            phi: 0.0,
        }
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn xi(&self) -> C64 {
        C64::from_polar(self.r, self.phi)
    }

    /// Whether `S(ξ) = S(ξ*)`, i.e. `sin φ · sin r = 0` up to rounding.
    pub fn preserves_phs(&self) -> bool {
        (self.phi.sin() * self.r.sin()).abs() < 1e-12
    }
}

/// Reduce an angle to `(-π, π]`.
pub fn canonical_angle(phi: f64) -> f64 {
    let p = phi.rem_euclid(TAU);
    if p > PI {
        p - TAU
    } else {
        p
    }
}

/// Amplitudes on `|0_k 0_{-k}⟩` and `|1_k 1_{-k}⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModePairState {
    pub a0: C64,
    pub a1: C64,
}

impl ModePairState {
    pub fn norm_sqr(&self) -> f64 {
        self.a0.norm_sqr() + self.a1.norm_sqr()
    }
}

/// `[[cos r, e^{iφ} sin r], [-e^{-iφ} sin r, cos r]]`.
///
/// Summing the series of `e^{M_k}` with `M_k = [[0, ξ*], [-ξ, 0]]` gives this
/// matrix with `φ → -φ`; the squeezed vacuum is the first column of the
/// series, see [`squeeze_vacuum`].
pub fn squeeze_matrix(s: &SqueezeSpec) -> Mat2 {
    let (c, sn) = (s.r.cos(), s.r.sin());
    let e = C64::from_polar(1.0, s.phi);
    Mat2::new(C64::from(c), e * sn, -e.conj() * sn, C64::from(c))
}

pub fn squeeze_vacuum(s: &SqueezeSpec) -> ModePairState {
    ModePairState {
        a0: C64::from(s.r.cos()),
        a1: -C64::from_polar(s.r.sin(), s.phi),
    }
}

/// Particle-hole image `C S(ξ) C⁻¹ = S(ξ*)`.
///
/// `C` maps the pair operators `η_{-k}η_k` and `η_k^†η_{-k}^†` onto
/// themselves, so on the real basis `{|0_k 0_{-k}⟩, |1_k 1_{-k}⟩}` it acts
/// as entrywise complex conjugation. Sandwiching with a pair-space `σ^x`
/// instead would give `S(-ξ)`.
pub fn phs_conjugate_matrix(s: &SqueezeSpec) -> Mat2 {
    squeeze_matrix(s).map(|z| z.conj())
}

/// Real-space pairing kernel `J(d) = (1/2π) ∫_0^π θ_k sin(k d) dk`.
///
/// Simpson quadrature from 4096 panels, doubled until successive estimates
/// agree to 1e-10. The interval is split where `h + cos k = 0`, which is
/// where `θ_k` varies fastest (and jumps when `γ = 0`).
pub fn pairing_amplitude(d: i64, p: &XYParams) -> Result<f64> {
    if d <= 0 {
        return invalid(format!("pairing separation must be >= 1, got {d}"));
    }
    let df = d as f64;
    let integrand = |k: f64| bogoliubov_angle(k, p) * (k * df).sin();
    let mut cuts = vec![0.0];
    if p.h.abs() < 1.0 {
        cuts.push((-p.h).acos());
    }
    cuts.push(PI);
    let mut total = 0.0;
    for w in cuts.windows(2) {
        // the sin(kd) oscillation needs a few panels per period
        let min_panels = 4096.max(16 * d as usize);
        // one-sided limits at the cuts, where θ_k may jump when γ = 0
        let (a, b) = (w[0], w[1]);
        let nudge = 1e-14 * (b - a);
        let piece = |k: f64| integrand(k.clamp(a + nudge, b - nudge));
        total += simpson_converged(&piece, a, b, min_panels, 1 << 24, 1e-10)?;
    }
    Ok(total / TAU)
}
