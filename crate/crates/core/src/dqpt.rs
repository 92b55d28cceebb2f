//! DQPT diagnostics: the rate function and its peaks, Fisher-zero lines,
//! critical momenta and times, and the `Δ(r, φ)` control map.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::model::{quasiparticle_energy, MomentumGrid};
use crate::numeric::{bisect, golden_section_min};
use crate::quench::{delta_from_alpha, delta_k, ModeQuenchData, QuenchCache, QuenchSpec};
use crate::squeeze::SqueezeSpec;

/// Per-mode floor on `|G_k|` before taking logarithms.
pub const LOG_FLOOR: f64 = 1e-300;
/// Default sign-change scan resolution over `k ∈ (0, π)`.
pub const DEFAULT_RESOLUTION: usize = 4096;
/// Default minimum prominence for rate-function peaks.
pub const DEFAULT_PROMINENCE: f64 = 1e-3;

/// Sign convention of the rate function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum RateSign {
    /// `λ = -(2/N) Σ ln|G_k| ≥ 0`; nonanalyticities show up as maxima.
    #[default]
    Conventional,
    /// `λ = +(2/N) Σ ln|G_k| ≤ 0`, the formula as literally written.
    Literal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateOptions {
    pub sign: RateSign,
    pub prominence: f64,
}

impl Default for RateOptions {
    fn default() -> Self {
        Self {
            sign: RateSign::Conventional,
            prominence: DEFAULT_PROMINENCE,
        }
    }
}

/// A local maximum and its topographic prominence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Peak {
    pub index: usize,
    pub time: f64,
    pub value: f64,
    pub prominence: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateSeries {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub sign: RateSign,
    /// Peaks of the conventional-sign series, left to right.
    pub peaks: Vec<Peak>,
}

impl RateSeries {
    pub fn peak_times(&self) -> Vec<f64> {
        self.peaks.iter().map(|p| p.time).collect()
    }

    /// The `count` most prominent peaks, returned in time order.
    pub fn dominant_peaks(&self, count: usize) -> Vec<Peak> {
        let mut peaks = self.peaks.clone();
        peaks.sort_by(|a, b| {
            b.prominence
                .total_cmp(&a.prominence)
                .then(a.index.cmp(&b.index))
        });
        peaks.truncate(count);
        peaks.sort_by_key(|p| p.index);
        peaks
    }

    /// Values in the conventional (nonnegative) sign.
    fn conventional_values(&self) -> Vec<f64> {
        match self.sign {
            RateSign::Conventional => self.values.clone(),
            RateSign::Literal => self.values.iter().map(|v| -v).collect(),
        }
    }
}

fn check_times(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return invalid("time list is empty");
    }
    if times.iter().any(|t| !t.is_finite()) {
        return invalid("time list contains non-finite values");
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return invalid("times must be strictly increasing");
    }
    Ok(())
}

/// `λ(t) = -(2/N) Σ_{k>0} ln|G_k(t)|`, with `|G_k|` floored at [`LOG_FLOOR`].
pub fn rate_function(
    q: &QuenchSpec,
    s: &SqueezeSpec,
    grid: &MomentumGrid,
    times: &[f64],
    opts: &RateOptions,
) -> Result<RateSeries> {
    if grid.is_empty() {
        return invalid("momentum grid is empty");
    }
    check_times(times)?;
    let cache = QuenchCache::new(q, s, grid);
    let values = rate_values(&cache, times, opts.sign);
    let mut series = RateSeries {
        times: times.to_vec(),
        values,
        sign: opts.sign,
        peaks: Vec::new(),
    };
    series.peaks = find_peaks(
        &series.times,
        &series.conventional_values(),
        opts.prominence,
    );
    Ok(series)
}

/// Rate values from a prebuilt cache; each time is independent.
pub fn rate_values(cache: &QuenchCache, times: &[f64], sign: RateSign) -> Vec<f64> {
    let prefactor = match sign {
        RateSign::Conventional => -2.0 / cache.n_sites() as f64,
        RateSign::Literal => 2.0 / cache.n_sites() as f64,
    };
    times
        .par_iter()
        .map(|&t| {
            let log_sum: f64 = cache
                .modes()
                .iter()
                .map(|m| m.loschmidt(t).norm().max(LOG_FLOOR).ln())
                .sum();
            prefactor * log_sum
        })
        .collect()
}

/// Times of local maxima whose prominence is at least `prominence`.
pub fn detect_peaks(series: &RateSeries, prominence: f64) -> Vec<f64> {
    find_peaks(&series.times, &series.conventional_values(), prominence)
        .into_iter()
        .map(|p| p.time)
        .collect()
}

/// Local maxima with prominence `≥ min_prominence`, left to right.
///
/// The prominence of a peak is its height above the higher of the two
/// lowest points reached before the series climbs above the peak on either
/// side (or ends). Flat tops report their middle sample.
pub fn find_peaks(times: &[f64], values: &[f64], min_prominence: f64) -> Vec<Peak> {
    let n = values.len();
    let mut peaks = Vec::new();
    let mut i = 1;
    while i + 1 < n {
        if values[i] > values[i - 1] {
            let mut j = i;
            while j + 1 < n && values[j + 1] == values[i] {
                j += 1;
            }
            if j + 1 < n && values[j + 1] < values[i] {
                let top = values[i];
                let mut left_min = top;
                let mut l = i;
                while l > 0 && values[l - 1] <= top {
                    l -= 1;
                    left_min = left_min.min(values[l]);
                }
                let mut right_min = top;
                let mut r = j;
                while r + 1 < n && values[r + 1] <= top {
                    r += 1;
                    right_min = right_min.min(values[r]);
                }
                let prominence = top - left_min.max(right_min);
                if prominence >= min_prominence {
                    let index = (i + j) / 2;
                    peaks.push(Peak {
                        index,
                        time: times[index],
                        value: top,
                        prominence,
                    });
                }
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }
    peaks
}

/// Why a Fisher-zero sample has no finite coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ZeroFlag {
    Bounded,
    /// `|B_k| → 0`: `τ → -∞`.
    TauNegInfinite,
    /// `|A_k| → 0`: `τ → +∞`.
    TauPosInfinite,
    /// `ε̃_k → 0`: both coordinates diverge.
    Gapless,
}

impl ZeroFlag {
    pub fn as_str(&self) -> &'static str {
        match self {
            ZeroFlag::Bounded => "bounded",
            ZeroFlag::TauNegInfinite => "tau_neg_inf",
            ZeroFlag::TauPosInfinite => "tau_pos_inf",
            ZeroFlag::Gapless => "gapless",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FisherSample {
    pub k: f64,
    pub tau: f64,
    pub t: f64,
    pub flag: ZeroFlag,
}

/// Branch `n` of the zeros `z_n(k) = [ln(|B_k|²/|A_k|²) + i(2n+1)π] / (2ε̃_k)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FisherZeroLine {
    pub n: i64,
    pub samples: Vec<FisherSample>,
}

impl FisherZeroLine {
    pub fn bounded(&self) -> impl Iterator<Item = &FisherSample> {
        self.samples.iter().filter(|s| s.flag == ZeroFlag::Bounded)
    }
}

const ZERO_AMPLITUDE: f64 = 1e-12;

pub fn fisher_zero_line(
    n: i64,
    q: &QuenchSpec,
    s: &SqueezeSpec,
    k_samples: &[f64],
) -> Result<FisherZeroLine> {
    if let Some(k) = k_samples.iter().find(|k| !(**k > 0.0 && **k < PI)) {
        return invalid(format!("Fisher-zero momenta must lie in (0, π), got {k}"));
    }
    let samples = k_samples
        .iter()
        .map(|&k| {
            let m = ModeQuenchData::new(k, q, s);
            let branch = (2 * n + 1) as f64 * PI;
            let (abs_a, abs_b) = (m.a.norm(), m.b.norm());
            if m.eps_post <= 1e-12 {
                FisherSample {
                    k,
                    tau: f64::NAN,
                    t: f64::INFINITY * branch.signum(),
                    flag: ZeroFlag::Gapless,
                }
            } else if abs_b < ZERO_AMPLITUDE {
                FisherSample {
                    k,
                    tau: f64::NEG_INFINITY,
                    t: branch / (2.0 * m.eps_post),
                    flag: ZeroFlag::TauNegInfinite,
                }
            } else if abs_a < ZERO_AMPLITUDE {
                FisherSample {
                    k,
                    tau: f64::INFINITY,
                    t: branch / (2.0 * m.eps_post),
                    flag: ZeroFlag::TauPosInfinite,
                }
            } else {
                let (wa, wb) = m.weights();
                FisherSample {
                    k,
                    tau: (wb / wa).ln() / (2.0 * m.eps_post),
                    t: branch / (2.0 * m.eps_post),
                    flag: ZeroFlag::Bounded,
                }
            }
        })
        .collect();
    Ok(FisherZeroLine { n, samples })
}

/// Where Fisher zeros cross the real-time axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum CriticalTime {
    /// An isolated critical momentum `k` on branch `n`.
    Point { k: f64, n: u32, t: f64 },
    /// Every mode is critical: branch `n` covers `[t_min, t_max]`.
    Window { n: u32, t_min: f64, t_max: f64 },
}

impl CriticalTime {
    /// Times at which nonanalyticities are expected.
    pub fn edges(&self) -> Vec<f64> {
        match *self {
            CriticalTime::Point { t, .. } => vec![t],
            CriticalTime::Window { t_min, t_max, .. } => vec![t_min, t_max],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Default)]
pub struct CriticalSet {
    pub momenta: Vec<f64>,
    pub times: Vec<CriticalTime>,
    pub all_modes_critical: bool,
}

impl CriticalSet {
    /// All isolated critical times and window edges, sorted.
    pub fn time_list(&self) -> Vec<f64> {
        let mut ts: Vec<f64> = self.times.iter().flat_map(|c| c.edges()).collect();
        ts.sort_by(f64::total_cmp);
        ts
    }
}

/// `cos 2α_k` and `sin 2α_k` tabulated on the midpoint grid
/// `k_j = π (j + ½) / M`; `α` does not depend on the squeeze, so one table
/// serves a whole `(r, φ)` scan.
#[derive(Debug, Clone)]
pub struct AlphaTable {
    quench: QuenchSpec,
    momenta: Vec<f64>,
    cos2a: Vec<f64>,
    sin2a: Vec<f64>,
}

impl AlphaTable {
    pub fn new(q: &QuenchSpec, resolution: usize) -> Self {
        let m = resolution.max(2);
        let momenta: Vec<f64> = (0..m).map(|j| PI * (j as f64 + 0.5) / m as f64).collect();
        let (sin2a, cos2a) = momenta
            .iter()
            .map(|&k| (2.0 * q.alpha(k)).sin_cos())
            .unzip();
        Self {
            quench: *q,
            momenta,
            cos2a,
            sin2a,
        }
    }

    pub fn momenta(&self) -> &[f64] {
        &self.momenta
    }

    /// `Δ_k` on the table grid.
    pub fn deltas(&self, s: &SqueezeSpec) -> Vec<f64> {
        let (s2r, c2r) = (2.0 * s.r()).sin_cos();
        let sp = s.phi().sin();
        self.cos2a
            .iter()
            .zip(&self.sin2a)
            .map(|(c, sn)| c2r * c - s2r * sn * sp)
            .collect()
    }

    fn delta_at(&self, k: f64, s: &SqueezeSpec) -> f64 {
        delta_from_alpha(self.quench.alpha(k), s)
    }

    /// Bracket around grid index `j`, clipped to `[0, π]`.
    fn bracket(&self, j: usize) -> (f64, f64) {
        let dk = PI / self.momenta.len() as f64;
        (
            (self.momenta[j] - dk).max(0.0),
            (self.momenta[j] + dk).min(PI),
        )
    }

    /// Sign-change roots of `Δ_k`, refined by bisection to `|interval| < 1e-12`.
    /// Tangential zeros found by golden-section refinement of local minima
    /// of `|Δ_k|` are included when they reach `|Δ| < 1e-10`.
    pub fn roots(&self, s: &SqueezeSpec) -> Vec<f64> {
        let d = self.deltas(s);
        let f = |k: f64| self.delta_at(k, s);
        let mut roots = Vec::new();
        for j in 0..d.len() {
            if d[j] == 0.0 {
                roots.push(self.momenta[j]);
                continue;
            }
            if j + 1 < d.len() && d[j] * d[j + 1] < 0.0 {
                let k = bisect(f, self.momenta[j], self.momenta[j + 1], 1e-12);
                // a jump of the Bogoliubov angle also flips the sign
                if f(k).abs() < 1e-10 {
                    roots.push(k);
                }
                continue;
            }
            let is_local_min = (j == 0 || d[j].abs() < d[j - 1].abs())
                && (j + 1 == d.len() || d[j].abs() <= d[j + 1].abs());
            let near_sign_change =
                (j > 0 && d[j - 1] * d[j] <= 0.0) || (j + 1 < d.len() && d[j] * d[j + 1] <= 0.0);
            if is_local_min && !near_sign_change && d[j].abs() < 1e-6 {
                let (a, b) = self.bracket(j);
                let (k, v) = golden_section_min(|k| f(k).abs(), a, b, 1e-12);
                if v < 1e-10 && k > 0.0 && k < PI {
                    roots.push(k);
                }
            }
        }
        roots
    }

    /// `min_k |Δ_k|`: grid scan, then bisection on any sign change and
    /// golden-section refinement around the grid minimum.
    pub fn min_abs_delta(&self, s: &SqueezeSpec) -> f64 {
        let d = self.deltas(s);
        let f = |k: f64| self.delta_at(k, s);
        let (j_min, grid_min) = d
            .iter()
            .map(|v| v.abs())
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        let mut best = grid_min;
        if best == 0.0 {
            return 0.0;
        }
        for j in 0..d.len() - 1 {
            if d[j] * d[j + 1] < 0.0 {
                let k = bisect(f, self.momenta[j], self.momenta[j + 1], 1e-12);
                best = best.min(f(k).abs());
            }
        }
        let (a, b) = self.bracket(j_min);
        let (_, v) = golden_section_min(|k| f(k).abs(), a, b, 1e-12);
        best.min(v)
    }
}

/// Isolated roots of `Δ_k` on `(0, π)`; sets `all_modes_critical` (and
/// leaves `momenta` empty) when `max_k |Δ_k| < 1e-10`.
pub fn critical_momenta(q: &QuenchSpec, s: &SqueezeSpec) -> CriticalSet {
    critical_momenta_with(q, s, DEFAULT_RESOLUTION)
}

pub fn critical_momenta_with(q: &QuenchSpec, s: &SqueezeSpec, resolution: usize) -> CriticalSet {
    let table = AlphaTable::new(q, resolution);
    let max_abs = table.deltas(s).iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if max_abs < 1e-10 {
        return CriticalSet {
            momenta: Vec::new(),
            times: Vec::new(),
            all_modes_critical: true,
        };
    }
    CriticalSet {
        momenta: table.roots(s),
        times: Vec::new(),
        all_modes_critical: false,
    }
}

/// Fills in `t_c = (2n+1)π / (2 ε̃_{k'})` for `n = 0..=n_max`, or the window
/// edges `(2n+1)π / (2 max ε̃)`, `(2n+1)π / (2 min ε̃)` when every mode is
/// critical.
pub fn critical_times(cs: &CriticalSet, q: &QuenchSpec, n_max: u32) -> Result<CriticalSet> {
    let mut out = cs.clone();
    out.times.clear();
    if cs.all_modes_critical {
        let ex = q.post.energy_extrema();
        if ex.min <= 1e-12 {
            return Err(Error::GaplessCritical { k: ex.k_min });
        }
        for n in 0..=n_max {
            let branch = (2 * n + 1) as f64 * PI / 2.0;
            out.times.push(CriticalTime::Window {
                n,
                t_min: branch / ex.max,
                t_max: branch / ex.min,
            });
        }
        return Ok(out);
    }
    for &k in &cs.momenta {
        let eps = quasiparticle_energy(k, &q.post);
        if eps <= 1e-12 {
            return Err(Error::GaplessCritical { k });
        }
        for n in 0..=n_max {
            out.times.push(CriticalTime::Point {
                k,
                n,
                t: (2 * n + 1) as f64 * PI / (2.0 * eps),
            });
        }
    }
    Ok(out)
}

/// `Δ(r, φ) = min_k |Δ_k|`.
pub fn delta_criterion(q: &QuenchSpec, s: &SqueezeSpec) -> f64 {
    AlphaTable::new(q, DEFAULT_RESOLUTION).min_abs_delta(s)
}

/// `Δ(r, φ)` over a rectangular grid; `delta[i][j]` belongs to
/// `(r_values[i], phi_values[j])`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeltaMap {
    pub r_values: Vec<f64>,
    pub phi_values: Vec<f64>,
    pub delta: Vec<Vec<f64>>,
}

impl DeltaMap {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.delta[i][j]
    }
}

pub fn delta_scan(q: &QuenchSpec, r_grid: &[f64], phi_grid: &[f64]) -> Result<DeltaMap> {
    delta_scan_with(q, r_grid, phi_grid, DEFAULT_RESOLUTION)
}

pub fn delta_scan_with(
    q: &QuenchSpec,
    r_grid: &[f64],
    phi_grid: &[f64],
    resolution: usize,
) -> Result<DeltaMap> {
    for (name, grid) in [("r", r_grid), ("phi", phi_grid)] {
        if grid.is_empty() {
            return invalid(format!("{name} grid is empty"));
        }
        if grid.iter().any(|v| !v.is_finite()) || grid.windows(2).any(|w| w[1] < w[0]) {
            return invalid(format!("{name} grid must be finite and sorted"));
        }
    }
    let table = AlphaTable::new(q, resolution);
    let cells: Vec<f64> = (0..r_grid.len() * phi_grid.len())
        .into_par_iter()
        .map(|idx| {
            let (i, j) = (idx / phi_grid.len(), idx % phi_grid.len());
            let s = SqueezeSpec::new(r_grid[i], phi_grid[j]).expect("finite grid values");
            table.min_abs_delta(&s)
        })
        .collect();
    let delta = cells.chunks(phi_grid.len()).map(|c| c.to_vec()).collect();
    Ok(DeltaMap {
        r_values: r_grid.to_vec(),
        phi_values: phi_grid.to_vec(),
        delta,
    })
}

/// `Δ_k` at an arbitrary momentum; re-exported for callers that only need
/// the scalar.
pub fn delta_at(k: f64, q: &QuenchSpec, s: &SqueezeSpec) -> f64 {
    delta_k(k, q, s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::XYParams;
    use crate::numeric::linspace;

    fn spec(r: f64, phi: f64) -> SqueezeSpec {
        SqueezeSpec::new(r, phi).unwrap()
    }

    /// Unsqueezed Ising quench: `cos k* = -(1 + h0 h1) / (h0 + h1)` for the
    /// `h + cos k` dispersion.
    fn ising_critical_k(h0: f64, h1: f64) -> f64 {
        (-(1.0 + h0 * h1) / (h0 + h1)).acos()
    }

    #[test]
    fn peaks_of_synthetic_series() {
        let times = linspace(0.0, 2.0, 201);
        assert!(find_peaks(&times, &vec![0.3; 201], 1e-3).is_empty());
        let spike: Vec<f64> = times
            .iter()
            .map(|t| (0.5 - 5.0 * (t - 1.0).abs()).max(0.0))
            .collect();
        let peaks = find_peaks(&times, &spike, 0.1);
        assert_eq!(peaks.len(), 1);
        assert!((peaks[0].time - 1.0).abs() < 1e-12);
        assert!((peaks[0].prominence - 0.5).abs() < 1e-12);
    }

    #[test]
    fn peak_prominence_uses_higher_base() {
        let t: Vec<f64> = (0..7).map(|i| i as f64).collect();
        let v = [0.0, 2.0, 1.0, 3.0, 0.5, 0.6, 0.0];
        let peaks = find_peaks(&t, &v, 0.0);
        let got: Vec<(usize, f64)> = peaks.iter().map(|p| (p.index, p.prominence)).collect();
        assert_eq!(got.len(), 3);
        assert_eq!(got[0].0, 1);
        assert!((got[0].1 - 1.0).abs() < 1e-15);
        assert_eq!(got[1].0, 3);
        assert!((got[1].1 - 3.0).abs() < 1e-15);
        assert_eq!(got[2].0, 5);
        assert!((got[2].1 - 0.1).abs() < 1e-12);
        assert_eq!(find_peaks(&t, &v, 0.5).len(), 2);
    }

    #[test]
    fn plateau_peak_reports_middle() {
        let t: Vec<f64> = (0..7).map(|i| i as f64).collect();
        let v = [0.0, 1.0, 2.0, 2.0, 2.0, 1.0, 0.0];
        let peaks = find_peaks(&t, &v, 0.5);
        assert_eq!(peaks.len(), 1);
        assert_eq!(peaks[0].index, 3);
    }

    #[test]
    fn rate_vanishes_without_quench() {
        let p = XYParams::new(0.6, 0.8).unwrap();
        let q = QuenchSpec::new(p, p);
        let grid = MomentumGrid::new(200).unwrap();
        let times = linspace(0.0, 10.0, 101);
        let series = rate_function(
            &q,
            &SqueezeSpec::none(),
            &grid,
            &times,
            &RateOptions::default(),
        )
        .unwrap();
        assert!(series.values.iter().all(|v| v.abs() < 1e-14));
        assert!(series.peaks.is_empty());
    }

    #[test]
    fn rate_rejects_bad_times() {
        let grid = MomentumGrid::new(8).unwrap();
        let q = QuenchSpec::ising(1.5, 0.5);
        let s = SqueezeSpec::none();
        let o = RateOptions::default();
        assert!(rate_function(&q, &s, &grid, &[], &o).is_err());
        assert!(rate_function(&q, &s, &grid, &[0.0, 1.0, 1.0], &o).is_err());
        assert!(rate_function(&q, &s, &grid, &[0.0, f64::NAN], &o).is_err());
    }

    #[test]
    fn literal_sign_flips_values() {
        let grid = MomentumGrid::new(100).unwrap();
        let q = QuenchSpec::ising(1.5, 0.5);
        let times = linspace(0.0, 3.0, 301);
        let conv = rate_function(
            &q,
            &SqueezeSpec::none(),
            &grid,
            &times,
            &RateOptions::default(),
        )
        .unwrap();
        let lit = rate_function(
            &q,
            &SqueezeSpec::none(),
            &grid,
            &times,
            &RateOptions {
                sign: RateSign::Literal,
                ..Default::default()
            },
        )
        .unwrap();
        for (a, b) in conv.values.iter().zip(&lit.values) {
            assert_eq!(*a, -*b);
        }
        assert_eq!(conv.peak_times(), lit.peak_times());
    }

    #[test]
    fn ising_quench_peaks_at_critical_times() {
        let q = QuenchSpec::ising(1.5, 0.5);
        let grid = MomentumGrid::new(2000).unwrap();
        let times = linspace(0.0, 5.0, 2000);
        let dt = times[1] - times[0];
        let series = rate_function(
            &q,
            &SqueezeSpec::none(),
            &grid,
            &times,
            &RateOptions::default(),
        )
        .unwrap();
        let cs = critical_times(&critical_momenta(&q, &SqueezeSpec::none()), &q, 3).unwrap();
        let tcs = cs.time_list();
        assert!((tcs[0] - 2.565_099_66).abs() < 1e-8);
        let peaks = series.peak_times();
        assert!(!peaks.is_empty());
        assert!((peaks[0] - tcs[0]).abs() <= dt);
        for p in &peaks {
            assert!(
                tcs.iter().any(|t| (t - p).abs() <= dt),
                "peak {p} far from {tcs:?}"
            );
        }
    }

    #[test]
    fn critical_momentum_matches_closed_form() {
        let q = QuenchSpec::ising(1.5, 0.5);
        let cs = critical_momenta(&q, &SqueezeSpec::none());
        assert_eq!(cs.momenta.len(), 1);
        assert!(!cs.all_modes_critical);
        assert!((cs.momenta[0] - ising_critical_k(1.5, 0.5)).abs() < 1e-11);
        assert!((PI - cs.momenta[0] - 0.505_360_5).abs() < 1e-7);
    }

    #[test]
    fn intra_phase_quench_has_no_critical_momentum() {
        let q = QuenchSpec::ising(0.8, 0.2);
        assert!(critical_momenta(&q, &SqueezeSpec::none())
            .momenta
            .is_empty());
        assert!(delta_criterion(&q, &SqueezeSpec::none()) > 0.1);
    }

    #[test]
    fn universal_point_flags_all_modes() {
        for q in [QuenchSpec::ising(1.5, 0.5), QuenchSpec::ising(0.8, 0.2)] {
            let cs = critical_momenta(&q, &SqueezeSpec::universal());
            assert!(cs.all_modes_critical && cs.momenta.is_empty());
            assert_eq!(
                delta_criterion(&q, &SqueezeSpec::universal()),
                delta_criterion(&q, &SqueezeSpec::universal())
            );
            assert!(delta_criterion(&q, &SqueezeSpec::universal()) < 1e-15);
        }
    }

    #[test]
    fn critical_time_examples() {
        let q = QuenchSpec::ising(1.5, 0.5);
        let cs = critical_times(&critical_momenta(&q, &SqueezeSpec::none()), &q, 1).unwrap();
        let t0 = PI / (2.0 * 0.375f64.sqrt());
        match (cs.times[0], cs.times[1]) {
            (CriticalTime::Point { n: 0, t: a, .. }, CriticalTime::Point { n: 1, t: b, .. }) => {
                assert!((a - t0).abs() < 1e-10);
                assert!((b - 3.0 * a).abs() < 1e-12);
            }
            other => panic!("unexpected {other:?}"),
        }

        let q = QuenchSpec::ising(0.8, 0.2);
        let cs = critical_times(&critical_momenta(&q, &SqueezeSpec::universal()), &q, 0).unwrap();
        match cs.times[0] {
            CriticalTime::Window { n: 0, t_min, t_max } => {
                assert!((t_min - PI / 2.4).abs() < 1e-14);
                assert!((t_max - PI / 1.6).abs() < 1e-14);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn gapless_critical_mode_is_an_error() {
        // post-quench at h = 1 closes the gap at k = π
        let q = QuenchSpec::ising(0.5, 1.0);
        let cs = critical_momenta(&q, &SqueezeSpec::universal());
        assert!(matches!(
            critical_times(&cs, &q, 0),
            Err(Error::GaplessCritical { .. })
        ));
        let forged = CriticalSet {
            momenta: vec![PI],
            ..Default::default()
        };
        assert!(matches!(
            critical_times(&forged, &q, 0),
            Err(Error::GaplessCritical { .. })
        ));
    }

    #[test]
    fn xx_limit_quench_is_critical_without_squeezing() {
        let q = QuenchSpec::new(
            XYParams::new(0.2, 0.1).unwrap(),
            XYParams::new(0.8, 0.1).unwrap(),
        );
        assert!(delta_criterion(&q, &SqueezeSpec::none()) < 1e-12);
        assert!(!critical_momenta(&q, &SqueezeSpec::none())
            .momenta
            .is_empty());
    }

    #[test]
    fn fisher_zero_examples() {
        let ks = linspace(0.01, PI - 0.01, 200);
        let q = QuenchSpec::ising(0.3, 1.7);
        let line = fisher_zero_line(0, &q, &SqueezeSpec::universal(), &ks).unwrap();
        assert!(line
            .samples
            .iter()
            .all(|s| s.flag == ZeroFlag::Bounded && s.tau.abs() < 1e-12));

        let q = QuenchSpec::ising(1.5, 0.5);
        let line = fisher_zero_line(0, &q, &SqueezeSpec::none(), &ks).unwrap();
        let kstar = ising_critical_k(1.5, 0.5);
        let below: Vec<_> = line.bounded().filter(|s| s.k < kstar - 1e-3).collect();
        let above: Vec<_> = line.bounded().filter(|s| s.k > kstar + 1e-3).collect();
        assert!(line.samples.iter().all(|s| s.t > 0.0));
        assert!(below.iter().all(|s| s.tau < 0.0) && above.iter().all(|s| s.tau > 0.0));

        let p = XYParams::ising(0.7);
        let line = fisher_zero_line(2, &QuenchSpec::new(p, p), &SqueezeSpec::none(), &ks).unwrap();
        assert!(line
            .samples
            .iter()
            .all(|s| s.flag == ZeroFlag::TauNegInfinite));
        assert_eq!(line.bounded().count(), 0);

        assert!(fisher_zero_line(0, &q, &SqueezeSpec::none(), &[0.0]).is_err());
    }

    #[test]
    fn fisher_zero_branch_spacing() {
        let ks = linspace(0.1, 3.0, 17);
        let q = QuenchSpec::ising(1.5, 0.5);
        let s = spec(0.4, 1.0);
        let z0 = fisher_zero_line(0, &q, &s, &ks).unwrap();
        let z2 = fisher_zero_line(2, &q, &s, &ks).unwrap();
        for (a, b) in z0.samples.iter().zip(&z2.samples) {
            assert!((b.t - 5.0 * a.t).abs() < 1e-12);
            assert_eq!(a.tau, b.tau);
            let eps = quasiparticle_energy(a.k, &q.post);
            assert!((a.t - PI / (2.0 * eps)).abs() < 1e-14);
        }
    }

    #[test]
    fn gapless_post_quench_sample_is_flagged() {
        let q = QuenchSpec::new(
            XYParams::ising(0.5),
            XYParams::new(-(1.0f64).cos(), 0.0).unwrap(),
        );
        let line = fisher_zero_line(0, &q, &spec(0.3, 0.2), &[1.0, 2.0]).unwrap();
        assert_eq!(line.samples[0].flag, ZeroFlag::Gapless);
        assert_eq!(line.samples[1].flag, ZeroFlag::Bounded);
    }

    #[test]
    fn delta_symmetries_at_the_mode_level() {
        let q = QuenchSpec::new(
            XYParams::new(0.3, 0.6).unwrap(),
            XYParams::new(1.4, 0.9).unwrap(),
        );
        for k in linspace(0.05, 3.0, 40) {
            for r in linspace(0.0, 1.5, 7) {
                for phi in linspace(-3.0, 3.0, 7) {
                    let d = delta_k(k, &q, &spec(r, phi));
                    assert!((delta_k(k, &q, &spec(r + PI / 2.0, phi)) + d).abs() < 1e-12);
                    assert!((delta_k(k, &q, &spec(r, PI - phi)) - d).abs() < 1e-15);
                    assert!(
                        (delta_k(k, &q, &spec(PI / 2.0 - r, -phi)).abs() - d.abs()).abs() < 1e-12
                    );
                }
            }
        }
    }

    #[test]
    fn scan_is_deterministic_and_shaped() {
        let q = QuenchSpec::ising(0.8, 0.2);
        let rs = linspace(0.0, PI / 2.0, 9);
        let ps = linspace(-PI, PI, 7);
        let a = delta_scan_with(&q, &rs, &ps, 512).unwrap();
        let b = delta_scan_with(&q, &rs, &ps, 512).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.delta.len(), 9);
        assert!(a
            .delta
            .iter()
            .all(|row| row.len() == 7 && row.iter().all(|v| *v >= 0.0)));
        for (i, r) in rs.iter().enumerate() {
            for (j, p) in ps.iter().enumerate() {
                let direct = AlphaTable::new(&q, 512).min_abs_delta(&spec(*r, *p));
                assert_eq!(a.get(i, j), direct);
            }
        }
        assert!(delta_scan(&q, &[], &ps).is_err());
        assert!(delta_scan(&q, &[1.0, 0.0], &ps).is_err());
    }

    #[test]
    fn min_abs_delta_matches_brute_force() {
        // dense independent scan as the oracle
        for (q, s) in [
            (QuenchSpec::ising(0.8, 0.2), SqueezeSpec::none()),
            (QuenchSpec::ising(0.8, 0.2), spec(0.3, -1.2)),
            (
                QuenchSpec::new(
                    XYParams::new(0.2, 0.1).unwrap(),
                    XYParams::new(0.8, 0.1).unwrap(),
                ),
                spec(0.6, 0.7),
            ),
        ] {
            let brute = (1..400_000)
                .map(|i| delta_k(PI * i as f64 / 400_000.0, &q, &s).abs())
                .fold(f64::INFINITY, f64::min);
            let fast = delta_criterion(&q, &s);
            assert!(fast <= brute + 1e-12);
            assert!(brute - fast < 1e-5, "brute {brute} fast {fast}");
        }
    }
}
