//! Overlap of the squeezed pre-quench state with post-quench eigenstates.
//!
//! Per mode pair the squeezed state decomposes as
//! `A_k |0̃ 0̃⟩ + B_k |1̃ 1̃⟩` in the post-quench quasiparticle basis, which
//! fixes the Loschmidt amplitude `|A_k|² e^{iε̃t} + |B_k|² e^{-iε̃t}`.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::model::{bogoliubov_angle, quasiparticle_energy, MomentumGrid, XYParams};
use crate::squeeze::SqueezeSpec;

/// Pre- and post-quench Hamiltonian parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuenchSpec {
    pub pre: XYParams,
    pub post: XYParams,
}

impl QuenchSpec {
    pub fn new(pre: XYParams, post: XYParams) -> Self {
        Self { pre, post }
    }

    /// Both sides at anisotropy `γ = 1`.
    pub fn ising(h0: f64, h1: f64) -> Self {
        Self::new(XYParams::ising(h0), XYParams::ising(h1))
    }

    /// Bogoliubov-angle mismatch `α_k = θ̃_k - θ_k`.
    pub fn alpha(&self, k: f64) -> f64 {
        bogoliubov_angle(k, &self.post) - bogoliubov_angle(k, &self.pre)
    }
}

/// `Δ_k = cos 2r cos 2α - sin 2r sin 2α sin φ`.
pub fn delta_from_alpha(alpha: f64, s: &SqueezeSpec) -> f64 {
    let (s2r, c2r) = (2.0 * s.r()).sin_cos();
    let (s2a, c2a) = (2.0 * alpha).sin_cos();
    c2r * c2a - s2r * s2a * s.phi().sin()
}

/// `(A, B)` for a given angle mismatch.
pub fn amplitudes_from_alpha(alpha: f64, s: &SqueezeSpec) -> (C64, C64) {
    let (sr, cr) = s.r().sin_cos();
    let (sa, ca) = alpha.sin_cos();
    let e = C64::from_polar(1.0, s.phi());
    let i = C64::i();
    let a = cr * ca + i * e * (sr * sa);
    let b = -i * (cr * sa) - e * (sr * ca);
    (a, b)
}

/// Everything the time evolution of one mode pair needs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeQuenchData {
    pub k: f64,
    pub theta_pre: f64,
    pub theta_post: f64,
    pub alpha: f64,
    pub eps_post: f64,
    pub a: C64,
    pub b: C64,
    pub delta: f64,
}

impl ModeQuenchData {
    pub fn new(k: f64, q: &QuenchSpec, s: &SqueezeSpec) -> Self {
        let theta_pre = bogoliubov_angle(k, &q.pre);
        let theta_post = bogoliubov_angle(k, &q.post);
        let alpha = theta_post - theta_pre;
        let (a, b) = amplitudes_from_alpha(alpha, s);
        Self {
            k,
            theta_pre,
            theta_post,
            alpha,
            eps_post: quasiparticle_energy(k, &q.post),
            a,
            b,
            delta: delta_from_alpha(alpha, s),
        }
    }

    /// `(|A|², |B|²)`.
    pub fn weights(&self) -> (f64, f64) {
        (self.a.norm_sqr(), self.b.norm_sqr())
    }

    pub fn loschmidt(&self, t: f64) -> C64 {
        let (wa, wb) = self.weights();
        let phase = C64::from_polar(1.0, self.eps_post * t);
        wa * phase + wb * phase.conj()
    }

    /// `dG/dt`.
    pub fn loschmidt_derivative(&self, t: f64) -> C64 {
        let (wa, wb) = self.weights();
        let phase = C64::from_polar(1.0, self.eps_post * t);
        C64::i() * self.eps_post * (wa * phase - wb * phase.conj())
    }
}

pub fn overlap_amplitudes(k: f64, q: &QuenchSpec, s: &SqueezeSpec) -> (C64, C64) {
    amplitudes_from_alpha(q.alpha(k), s)
}

pub fn delta_k(k: f64, q: &QuenchSpec, s: &SqueezeSpec) -> f64 {
    delta_from_alpha(q.alpha(k), s)
}

pub fn mode_loschmidt(k: f64, q: &QuenchSpec, s: &SqueezeSpec, t: f64) -> C64 {
    ModeQuenchData::new(k, q, s).loschmidt(t)
}

/// Per-mode data over a momentum grid, built once and reused for every time.
#[derive(Debug, Clone)]
pub struct QuenchCache {
    n_sites: usize,
    modes: Vec<ModeQuenchData>,
}

impl QuenchCache {
    pub fn new(q: &QuenchSpec, s: &SqueezeSpec, grid: &MomentumGrid) -> Self {
        Self {
            n_sites: grid.n_sites(),
            modes: grid
                .momenta()
                .iter()
                .map(|&k| ModeQuenchData::new(k, q, s))
                .collect(),
        }
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn modes(&self) -> &[ModeQuenchData] {
        &self.modes
    }
}
