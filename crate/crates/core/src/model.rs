//! Single-particle data of the transverse-field XY chain.
//!
//! In the Nambu basis `(c_k, c_{-k}^†)` every momentum pair `k > 0` carries
//! the Bloch matrix `-(h + cos k) σ^z - γ sin k σ^y`, diagonalized by the
//! Bogoliubov rotation with `tan 2θ_k = γ sin k / (h + cos k)`.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::pauli::{sigma_y, sigma_z, Mat2};

/// Parameters `(h, γ)` of the XY chain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct XYParams {
    pub h: f64,
    pub gamma: f64,
}

impl XYParams {
    pub fn new(h: f64, gamma: f64) -> Result<Self> {
        if !h.is_finite() || !gamma.is_finite() {
            return invalid(format!(
                "XY parameters must be finite (h = {h}, gamma = {gamma})"
            ));
        }
        Ok(Self { h, gamma })
    }

    /// Transverse-field Ising limit `γ = 1`.
    pub fn ising(h: f64) -> Self {
        Self { h, gamma: 1.0 }
    }

    pub fn bogoliubov_angle(&self, k: f64) -> f64 {
        bogoliubov_angle(k, self)
    }

    pub fn energy(&self, k: f64) -> f64 {
        quasiparticle_energy(k, self)
    }

    /// Smallest and largest quasiparticle energy over `k ∈ [0, π]`.
    ///
    /// `ε_k²` is a quadratic in `cos k`, so the extrema sit at `cos k = ±1`
    /// or at the vertex when it falls inside.
    pub fn energy_extrema(&self) -> EnergyExtrema {
        let (h, g2) = (self.h, self.gamma * self.gamma);
        let eps2 = |c: f64| ((1.0 - g2) * c * c + 2.0 * h * c + h * h + g2).max(0.0);
        let mut candidates = vec![(-1.0, eps2(-1.0)), (1.0, eps2(1.0))];
        let curvature = 1.0 - g2;
        if curvature.abs() > 1e-15 {
            let vertex = -h / curvature;
            if vertex > -1.0 && vertex < 1.0 {
                candidates.push((vertex, eps2(vertex)));
            }
        }
        let lo = candidates
            .iter()
            .cloned()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        let hi = candidates
            .iter()
            .cloned()
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        EnergyExtrema {
            k_min: lo.0.acos(),
            min: lo.1.sqrt(),
            k_max: hi.0.acos(),
            max: hi.1.sqrt(),
        }
    }
}

/// Band edges of `ε_k` on `[0, π]` and where they occur.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyExtrema {
    pub k_min: f64,
    pub min: f64,
    pub k_max: f64,
    pub max: f64,
}

/// `θ_k = ½ atan2(γ sin k, h + cos k)`, in `(-π/2, π/2]`.
///
/// At the degenerate point `(h + cos k, γ sin k) = (0, 0)` this returns 0.
pub fn bogoliubov_angle(k: f64, p: &XYParams) -> f64 {
    let y = p.gamma * k.sin();
    let x = p.h + k.cos();
    if x == 0.0 && y == 0.0 {
        return 0.0;
    }
    0.5 * y.atan2(x)
}

/// `ε_k = sqrt((h + cos k)² + γ² sin² k)`.
pub fn quasiparticle_energy(k: f64, p: &XYParams) -> f64 {
    (p.h + k.cos()).hypot(p.gamma * k.sin())
}

/// Bloch Hamiltonian `-(h + cos k) σ^z - γ sin k σ^y`.
pub fn bloch_matrix(k: f64, p: &XYParams) -> Mat2 {
    sigma_z() * C64::from(-(p.h + k.cos())) + sigma_y() * C64::from(-p.gamma * k.sin())
}

/// Positive momenta `(2m - 1)π/N`, `m = 1..N/2`, of an `N`-site chain in
/// the even fermion-parity (antiperiodic) sector.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumGrid {
    n_sites: usize,
    momenta: Vec<f64>,
}

impl MomentumGrid {
    pub fn new(n_sites: usize) -> Result<Self> {
        if n_sites < 2 || !n_sites.is_multiple_of(2) {
            return invalid(format!(
                "number of sites must be even and >= 2, got {n_sites}"
            ));
        }
        let momenta = (1..=n_sites / 2)
            .map(|m| (2 * m - 1) as f64 * PI / n_sites as f64)
            .collect();
        Ok(Self { n_sites, momenta })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn momenta(&self) -> &[f64] {
        &self.momenta
    }

    pub fn len(&self) -> usize {
        self.momenta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.momenta.is_empty()
    }

    /// Spacing `2π/N` between neighbouring momenta.
    pub fn spacing(&self) -> f64 {
        2.0 * PI / self.n_sites as f64
    }
}

pub fn build_grid(n_sites: usize) -> Result<MomentumGrid> {
    MomentumGrid::new(n_sites)
}

/// Static data of one momentum mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeStaticData {
    pub k: f64,
    pub theta: f64,
    pub epsilon: f64,
    /// `(h + cos k, γ sin k) = (0, 0)`: the angle is undefined there.
    pub gapless: bool,
}

impl ModeStaticData {
    pub fn new(k: f64, p: &XYParams) -> Self {
        let gapless = p.h + k.cos() == 0.0 && p.gamma * k.sin() == 0.0;
        Self {
            k,
            theta: bogoliubov_angle(k, p),
            epsilon: quasiparticle_energy(k, p),
            gapless,
        }
    }
}
