//! Brute-force references for the momentum-space formulas: a propagator on
//! the two-state even block of one mode pair, and exact diagonalization of
//! the spin chain with the squeeze built from Jordan-Wigner fermions.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dqpt::{find_peaks, RateSeries, RateSign, DEFAULT_PROMINENCE};
use crate::error::{invalid, Error, Result};
use crate::model::{MomentumGrid, XYParams};
use crate::pauli::{sigma_x, Mat2};
use crate::quench::{mode_loschmidt, QuenchSpec};
use crate::squeeze::{pairing_amplitude, SqueezeSpec};

/// Largest chain handled by the dense spin-chain oracle.
pub const MAX_ED_SITES: usize = 12;

/// `H^even_k` on `{|0_k 0_{-k}⟩, c_k^† c_{-k}^† |0_k 0_{-k}⟩}`:
/// `[[h + cos k, -iγ sin k], [iγ sin k, -(h + cos k)]]`.
pub fn even_block_hamiltonian(k: f64, p: &XYParams) -> Mat2 {
    let d = p.h + k.cos();
    let o = p.gamma * k.sin();
    Mat2::new(
        C64::from(d),
        C64::new(0.0, -o),
        C64::new(0.0, o),
        C64::from(-d),
    )
}

/// Ground vector of a 2×2 Hermitian matrix and its energy.
fn ground_vector(h: &Mat2) -> (nalgebra::Vector2<C64>, f64) {
    let eig = SymmetricEigen::new(*h);
    let j = if eig.eigenvalues[0] <= eig.eigenvalues[1] {
        0
    } else {
        1
    };
    (eig.eigenvectors.column(j).into_owned(), eig.eigenvalues[j])
}

/// Unitary `[g, σ^x g]` whose columns are the pair vacuum `|0̂⟩` of `h` and
/// the state `|1̂1̂⟩` that it is paired with.
fn vacuum_frame(h: &Mat2) -> Mat2 {
    let (g, _) = ground_vector(h);
    let partner = sigma_x() * g;
    Mat2::from_columns(&[g, partner])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeFockFrame {
    pub k: f64,
    pub h_even_pre: Mat2,
    pub h_even_post: Mat2,
}

impl ModeFockFrame {
    pub fn new(k: f64, q: &QuenchSpec) -> Self {
        Self {
            k,
            h_even_pre: even_block_hamiltonian(k, &q.pre),
            h_even_post: even_block_hamiltonian(k, &q.post),
        }
    }

    /// Squeezed pair state `cos r |0̂⟩ - e^{iφ} sin r |1̂1̂⟩`.
    pub fn squeezed_state(&self, s: &SqueezeSpec) -> nalgebra::Vector2<C64> {
        let w = vacuum_frame(&self.h_even_pre);
        let (sr, cr) = s.r().sin_cos();
        w.column(0) * C64::from(cr) - w.column(1) * C64::from_polar(sr, s.phi())
    }

    /// `⟨ψ|e^{-i H^even_post t}|ψ⟩`, the exponential taken by eigendecomposition.
    pub fn loschmidt(&self, s: &SqueezeSpec, t: f64) -> C64 {
        let psi = self.squeezed_state(s);
        let eig = SymmetricEigen::new(self.h_even_post);
        let v = eig.eigenvectors;
        let phases = Mat2::from_diagonal(&eig.eigenvalues.map(|e| C64::from_polar(1.0, -e * t)));
        let u = v * phases * v.adjoint();
        psi.dotc(&(u * psi))
    }
}

pub fn fock_mode_oracle(k: f64, q: &QuenchSpec, s: &SqueezeSpec, t: f64) -> C64 {
    ModeFockFrame::new(k, q).loschmidt(s, t)
}

/// Largest `|fock_mode_oracle - mode_loschmidt|` over random samples with
/// `k ∈ (0, π)`, `h ∈ [-2, 2]`, `γ ∈ [-1.5, 1.5]`, `r ∈ [0, 2π)`,
/// `φ ∈ [-π, π)`, `t ∈ [0, 20)`.
pub fn fock_oracle_max_error(samples: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..samples)
        .map(|_| {
            let k = rng.gen_range(1e-6..PI - 1e-6);
            let mut params =
                || XYParams::new(rng.gen_range(-2.0..2.0), rng.gen_range(-1.5..1.5)).unwrap();
            let q = QuenchSpec::new(params(), params());
            let s = SqueezeSpec::new(rng.gen_range(0.0..2.0 * PI), rng.gen_range(-PI..PI)).unwrap();
            let t = rng.gen_range(0.0..20.0);
            (fock_mode_oracle(k, &q, &s, t) - mode_loschmidt(k, &q, &s, t)).norm()
        })
        .fold(0.0, f64::max)
}

/// How the real-space squeeze generator is assembled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum SqueezeKernel {
    /// `Σ_k (ξ* η_{-k}η_k - ξ η_k^†η_{-k}^†)` over the chain's own momentum
    /// grid, rewritten in site fermions.
    #[default]
    MomentumSum,
    /// `Σ_{x<y} (J_xy σ⁺_x σ⁺_y Π_{m=x}^{y-1}(-σ^z_m) - h.c.)` with the
    /// infinite-chain pairing amplitude `J_xy`.
    PairingIntegral,
}

impl SqueezeKernel {
    pub fn as_str(&self) -> &'static str {
        match self {
            SqueezeKernel::MomentumSum => "momentum-sum",
            SqueezeKernel::PairingIntegral => "pairing-integral",
        }
    }
}

/// `c_n` (or `c_n^†`) with `c_n = Π_{m<n}(-σ^z_m) σ⁻_n` on a basis state
/// whose bit `n` is set when site `n` is spin up (occupied).
fn apply_fermion(state: usize, n: usize, dagger: bool) -> Option<(f64, usize)> {
    let occupied = (state >> n) & 1 == 1;
    if occupied == dagger {
        return None;
    }
    let below = (state & ((1usize << n) - 1)).count_ones();
    let sign = if below.is_multiple_of(2) { 1.0 } else { -1.0 };
    Some((sign, state ^ (1 << n)))
}

/// Quadratic fermion operator
/// `c0 + Σ hop_mn c_m^† c_n + Σ create_mn c_m^† c_n^† + Σ annihilate_mn c_n c_m`.
struct Quadratic {
    n: usize,
    constant: C64,
    hop: Vec<C64>,
    create: Vec<C64>,
    annihilate: Vec<C64>,
}

impl Quadratic {
    fn act(&self, state: usize, out: &mut Vec<(usize, C64)>) {
        out.clear();
        out.push((state, self.constant));
        let n = self.n;
        for m in 0..n {
            for l in 0..n {
                let idx = m * n + l;
                if let Some((s1, a)) = apply_fermion(state, l, false) {
                    if let Some((s2, b)) = apply_fermion(a, m, true) {
                        out.push((b, self.hop[idx] * (s1 * s2)));
                    }
                }
                if let Some((s1, a)) = apply_fermion(state, l, true) {
                    if let Some((s2, b)) = apply_fermion(a, m, true) {
                        out.push((b, self.create[idx] * (s1 * s2)));
                    }
                }
                // c_l c_m: c_m acts first
                if let Some((s1, a)) = apply_fermion(state, m, false) {
                    if let Some((s2, b)) = apply_fermion(a, l, false) {
                        out.push((b, self.annihilate[idx] * (s1 * s2)));
                    }
                }
            }
        }
    }
}

/// The momentum-sum squeeze generator in site fermions.
///
/// Per mode pair the generator is `W M W^†` on the c-fermion even block,
/// with `M = [[0, ξ*], [-ξ, 0]]` and `W = [|0̂⟩, |1̂1̂⟩]`. Writing the result
/// as `x (1 - n_k - n_{-k}) + y c_k^†c_{-k}^† + z c_{-k}c_k` and Fourier
/// transforming with `c_k = N^{-1/2} Σ_n e^{ikn} c_n` gives the kernels.
fn momentum_sum_generator(n: usize, pre: &XYParams, s: &SqueezeSpec) -> Result<Quadratic> {
    let grid = MomentumGrid::new(n)?;
    let xi = s.xi();
    let m = Mat2::new(C64::from(0.0), xi.conj(), -xi, C64::from(0.0));
    let mut q = Quadratic {
        n,
        constant: C64::from(0.0),
        hop: vec![C64::from(0.0); n * n],
        create: vec![C64::from(0.0); n * n],
        annihilate: vec![C64::from(0.0); n * n],
    };
    let nf = n as f64;
    for &k in grid.momenta() {
        let w = vacuum_frame(&even_block_hamiltonian(k, pre));
        let mc = w * m * w.adjoint();
        let (x, y, z) = (mc[(0, 0)], mc[(1, 0)], mc[(0, 1)]);
        q.constant += x;
        for a in 0..n {
            for b in 0..n {
                let d = b as f64 - a as f64;
                let idx = a * n + b;
                q.hop[idx] -= x * (2.0 / nf * (k * d).cos());
                q.create[idx] += y * C64::from_polar(1.0 / nf, k * d);
                q.annihilate[idx] += z * C64::from_polar(1.0 / nf, -k * d);
            }
        }
    }
    Ok(q)
}

/// Spin-language string generator with amplitudes `J_{y-x}`.
fn pairing_integral_action(state: usize, n: usize, j: &[f64], out: &mut Vec<(usize, C64)>) {
    out.clear();
    for x in 0..n {
        for y in x + 1..n {
            let amp = j[y - x];
            let string = |st: usize| {
                let ups = (x..y).filter(|m| (st >> m) & 1 == 1).count();
                if ups % 2 == 0 {
                    1.0
                } else {
                    -1.0
                }
            };
            let (bx, by) = ((state >> x) & 1, (state >> y) & 1);
            if bx == 0 && by == 0 {
                out.push((state | (1 << x) | (1 << y), C64::from(amp * string(state))));
            }
            if bx == 1 && by == 1 {
                let lowered = state & !(1 << x) & !(1 << y);
                out.push((lowered, C64::from(-amp * string(lowered))));
            }
        }
    }
}

fn popcount_parity(state: usize) -> usize {
    (state.count_ones() % 2) as usize
}

/// Basis states of one fermion-parity sector and the inverse index map.
fn sector(n: usize, parity: usize) -> (Vec<usize>, Vec<usize>) {
    let states: Vec<usize> = (0..1usize << n)
        .filter(|&s| popcount_parity(s) == parity)
        .collect();
    let mut index = vec![usize::MAX; 1 << n];
    for (i, &s) in states.iter().enumerate() {
        index[s] = i;
    }
    (states, index)
}

/// Periodic spin Hamiltonian restricted to one parity sector.
fn spin_hamiltonian(n: usize, p: &XYParams, states: &[usize], index: &[usize]) -> DMatrix<f64> {
    let dim = states.len();
    let mut h = DMatrix::zeros(dim, dim);
    for (i, &st) in states.iter().enumerate() {
        let ups = st.count_ones() as f64;
        h[(i, i)] = -0.5 * p.h * (2.0 * ups - n as f64);
        for a in 0..n {
            let b = (a + 1) % n;
            let flipped = st ^ (1 << a) ^ (1 << b);
            let same = ((st >> a) & 1) == ((st >> b) & 1);
            // XX flips both spins with weight 1; YY with -1 (equal) or +1 (opposite)
            let amp = if same { -0.5 * p.gamma } else { -0.5 };
            h[(index[flipped], i)] += amp;
        }
    }
    h
}

fn check_sites(n_sites: usize) -> Result<()> {
    if !n_sites.is_multiple_of(2) || !(4..=MAX_ED_SITES).contains(&n_sites) {
        return invalid(format!(
            "spin-chain oracle needs an even number of sites in [4, {MAX_ED_SITES}], got {n_sites}"
        ));
    }
    Ok(())
}

/// Dense even-parity-sector operators of an `N`-site chain.
#[derive(Debug, Clone)]
pub struct SpinChainFrame {
    pub n_sites: usize,
    pub kernel: SqueezeKernel,
    pub quench: QuenchSpec,
    /// Basis states (bit set = spin up) of the even sector.
    pub states: Vec<usize>,
    pub h_pre: DMatrix<f64>,
    pub h_post: DMatrix<f64>,
    pub squeeze_generator: DMatrix<C64>,
    /// `‖[G, P]‖_F` for the fermion parity `P`, from the generator's action
    /// on the full Hilbert space.
    pub generator_parity_commutator: f64,
}

impl SpinChainFrame {
    pub fn new(
        q: &QuenchSpec,
        s: &SqueezeSpec,
        n_sites: usize,
        kernel: SqueezeKernel,
    ) -> Result<Self> {
        check_sites(n_sites)?;
        let n = n_sites;
        let (states, index) = sector(n, 0);
        let dim = states.len();
        let action: Box<dyn Fn(usize, &mut Vec<(usize, C64)>)> = match kernel {
            SqueezeKernel::MomentumSum => {
                let quad = momentum_sum_generator(n, &q.pre, s)?;
                Box::new(move |st, out| quad.act(st, out))
            }
            SqueezeKernel::PairingIntegral => {
                let mut j = vec![0.0; n];
                for (d, slot) in j.iter_mut().enumerate().skip(1) {
                    *slot = pairing_amplitude(d as i64, &q.pre)?;
                }
                Box::new(move |st, out| pairing_integral_action(st, n, &j, out))
            }
        };
        let mut g = DMatrix::zeros(dim, dim);
        let mut leak = 0.0;
        let mut buf = Vec::new();
        for st in 0..1usize << n {
            action(st, &mut buf);
            let from_parity = popcount_parity(st);
            for &(target, amp) in &buf {
                if popcount_parity(target) != from_parity {
                    leak += amp.norm_sqr();
                } else if from_parity == 0 {
                    g[(index[target], index[st])] += amp;
                }
            }
        }
        Ok(Self {
            n_sites: n,
            kernel,
            quench: *q,
            h_pre: spin_hamiltonian(n, &q.pre, &states, &index),
            h_post: spin_hamiltonian(n, &q.post, &states, &index),
            states,
            squeeze_generator: g,
            // PG - GP moves each parity-changing entry with weight ±2
            generator_parity_commutator: 2.0 * leak.sqrt(),
        })
    }

    /// Largest deviation from Hermiticity of the Hamiltonians and from
    /// anti-Hermiticity of the generator.
    pub fn hermiticity_error(&self) -> f64 {
        let h = (&self.h_pre - self.h_pre.transpose())
            .amax()
            .max((&self.h_post - self.h_post.transpose()).amax());
        let g = (&self.squeeze_generator + self.squeeze_generator.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        h.max(g)
    }

    /// `exp(G)` from the eigendecomposition of the Hermitian `iG`.
    pub fn squeeze_unitary(&self) -> DMatrix<C64> {
        let k = self.squeeze_generator.map(|z| z * C64::i());
        let eig = SymmetricEigen::new(k);
        let phases = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| C64::from_polar(1.0, -l)));
        &eig.eigenvectors * phases * eig.eigenvectors.adjoint()
    }

    /// Ground state of the pre-quench chain in the even sector and its energy.
    pub fn ground_state(&self) -> (DVector<f64>, f64) {
        let eig = SymmetricEigen::new(self.h_pre.clone());
        let j = eig.eigenvalues.imin();
        (eig.eigenvectors.column(j).into_owned(), eig.eigenvalues[j])
    }
}

/// Outcome of [`parity_sector_check`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParityReport {
    /// `⟨Π_n σ^z_n⟩` in the pre-quench ground state.
    pub ground_parity: f64,
    pub even_energy: f64,
    pub odd_energy: f64,
    pub generator_parity_commutator: f64,
}

/// Confirms that the pre-quench ground state lies in the even sector, where
/// the antiperiodic momentum grid applies.
pub fn parity_sector_check(frame: &SpinChainFrame) -> Result<ParityReport> {
    let n = frame.n_sites;
    let (ground, even_energy) = frame.ground_state();
    let (odd_states, odd_index) = sector(n, 1);
    let h_odd = spin_hamiltonian(n, &frame.quench.pre, &odd_states, &odd_index);
    let odd_energy = h_odd.symmetric_eigenvalues().min();
    if odd_energy < even_energy - 1e-10 {
        return Err(Error::SectorMismatch {
            n_sites: n,
            even_energy,
            odd_energy,
        });
    }
    // Π σ^z = (-1)^{#down}
    let ground_parity = frame
        .states
        .iter()
        .zip(ground.iter())
        .map(|(&st, a)| {
            let downs = n - st.count_ones() as usize;
            a * a * if downs.is_multiple_of(2) { 1.0 } else { -1.0 }
        })
        .sum();
    Ok(ParityReport {
        ground_parity,
        even_energy,
        odd_energy,
        generator_parity_commutator: frame.generator_parity_commutator,
    })
}

/// Amplitudes and rate of the spin-chain Loschmidt echo.
#[derive(Debug, Clone)]
pub struct SpinEdRun {
    pub amplitudes: Vec<C64>,
    pub rate: RateSeries,
    /// `‖exp(G)^† exp(G) - 1‖_max`.
    pub unitarity_error: f64,
    pub parity: ParityReport,
}

pub fn spin_ed_run(
    q: &QuenchSpec,
    s: &SqueezeSpec,
    times: &[f64],
    n_sites: usize,
    kernel: SqueezeKernel,
) -> Result<SpinEdRun> {
    if times.is_empty() || times.iter().any(|t| !t.is_finite()) {
        return invalid("times must be a non-empty list of finite values");
    }
    let frame = SpinChainFrame::new(q, s, n_sites, kernel)?;
    let parity = parity_sector_check(&frame)?;
    let (ground, _) = frame.ground_state();
    let u = frame.squeeze_unitary();
    let dim = u.nrows();
    let unitarity_error = (u.adjoint() * &u - DMatrix::<C64>::identity(dim, dim))
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    let psi = &u * ground.map(C64::from);
    let post = SymmetricEigen::new(frame.h_post.clone());
    let weights: Vec<f64> = post
        .eigenvectors
        .column_iter()
        .map(|v| v.map(C64::from).dotc(&psi).norm_sqr())
        .collect();
    let amplitudes: Vec<C64> = times
        .iter()
        .map(|&t| {
            weights
                .iter()
                .zip(post.eigenvalues.iter())
                .map(|(w, e)| C64::from_polar(*w, -e * t))
                .sum()
        })
        .collect();
    let values: Vec<f64> = amplitudes
        .iter()
        .map(|a| -2.0 / n_sites as f64 * a.norm().max(crate::dqpt::LOG_FLOOR).ln())
        .collect();
    let peaks = find_peaks(times, &values, DEFAULT_PROMINENCE);
    Ok(SpinEdRun {
        amplitudes,
        rate: RateSeries {
            times: times.to_vec(),
            values,
            sign: RateSign::Conventional,
            peaks,
        },
        unitarity_error,
        parity,
    })
}

/// Per-site rate `-(2/N) ln|⟨ψ^s|e^{-iH̃t}|ψ^s⟩|` of the `N`-site chain, with
/// the squeeze built by the momentum-sum kernel.
pub fn spin_ed_rate(
    q: &QuenchSpec,
    s: &SqueezeSpec,
    times: &[f64],
    n_sites: usize,
) -> Result<RateSeries> {
    spin_ed_run(q, s, times, n_sites, SqueezeKernel::MomentumSum).map(|r| r.rate)
}
