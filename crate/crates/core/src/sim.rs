//! Euler-Maruyama particle engine with absorption and blow-up detection.
//!
//! Produces survivor histograms (evidence for quasi-stationary behavior),
//! absorption-time statistics, and exit frequencies. All randomness is
//! counter-based per (seed, particle, step), so ensembles are bit-reproducible
//! regardless of how many worker threads run them.

use crate::model::{ModelKind, ModelSpec};
use crate::rng::NormalStream;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum SimError {
    #[error("invalid simulation config: {reason}")]
    InvalidConfig { reason: String },
    #[error("unsupported model for this operation: {reason}")]
    UnsupportedModel { reason: String },
}

fn default_dt() -> f64 {
    0.01
}

fn default_n_particles() -> usize {
    100_000
}

fn default_blowup() -> f64 {
    1e6
}

fn default_bins() -> usize {
    50
}

fn default_range() -> (f64, f64) {
    (0.0, 2.0)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimConfig {
    #[serde(default = "default_dt")]
    pub dt: f64,
    pub horizon: f64,
    #[serde(default = "default_n_particles")]
    pub n_particles: usize,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default = "default_blowup")]
    pub blowup_threshold: f64,
    #[serde(default)]
    pub snapshot_times: Vec<f64>,
    #[serde(default = "default_bins")]
    pub histogram_bins: usize,
    #[serde(default = "default_range")]
    pub histogram_range: (f64, f64),
}

impl SimConfig {
    /// Step-and-snapshot config with library defaults for everything else.
    pub fn new(dt: f64, horizon: f64, n_particles: usize, master_seed: u64) -> Self {
        SimConfig {
            dt,
            horizon,
            n_particles,
            master_seed,
            blowup_threshold: default_blowup(),
            snapshot_times: Vec::new(),
            histogram_bins: default_bins(),
            histogram_range: default_range(),
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let fail = |reason: String| Err(SimError::InvalidConfig { reason });
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return fail(format!("dt = {} must be a positive real", self.dt));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return fail(format!("horizon = {} must be a positive real", self.horizon));
        }
        if self.dt > self.horizon {
            return fail(format!("dt = {} exceeds horizon = {}", self.dt, self.horizon));
        }
        if self.n_particles == 0 {
            return fail("n_particles must be at least 1".into());
        }
        if !(self.blowup_threshold > 0.0) {
            return fail(format!("blowup_threshold = {} must be positive", self.blowup_threshold));
        }
        if self.histogram_bins == 0 {
            return fail("histogram_bins must be at least 1".into());
        }
        let (lo, hi) = self.histogram_range;
        if !(lo < hi) {
            return fail(format!("histogram_range ({lo}, {hi}) must satisfy lo < hi"));
        }
        for w in self.snapshot_times.windows(2) {
            if w[0] > w[1] {
                return fail(format!("snapshot_times must be sorted, got {} before {}", w[0], w[1]));
            }
        }
        if let (Some(&first), Some(&last)) = (self.snapshot_times.first(), self.snapshot_times.last()) {
            if first < 0.0 || last > self.horizon {
                return fail(format!(
                    "snapshot_times must lie in [0, {}], got range [{first}, {last}]",
                    self.horizon
                ));
            }
        }
        Ok(())
    }

    fn n_steps(&self) -> u64 {
        (self.horizon / self.dt).ceil() as u64
    }
}

/// Terminal state of one particle at the horizon.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExitLabel {
    /// Hit the singular point at zero.
    AbsorbedAtZero,
    /// Hit the lower singular point (saddle-node: -sqrt(a)).
    ExitLeft,
    /// Hit the upper singular point (saddle-node: +sqrt(a)).
    ExitRight,
    /// Left [-blowup_threshold, blowup_threshold] or became non-finite.
    BlownUp,
    /// Still running at the horizon.
    Alive,
}

impl ExitLabel {
    /// Whether the particle reached a singular point (any of the three
    /// absorbing labels).
    pub fn is_absorbed(self) -> bool {
        matches!(self, ExitLabel::AbsorbedAtZero | ExitLabel::ExitLeft | ExitLabel::ExitRight)
    }
}

/// One simulated trajectory, reduced to its terminal event and snapshots.
#[derive(Debug, Clone, PartialEq)]
pub struct PathRecord {
    pub label: ExitLabel,
    /// Absorption/blow-up time, or the horizon if still alive. Absorption
    /// times are linearly interpolated within the crossing step.
    pub time: f64,
    pub terminal_state: f64,
    /// Minimum of |x| along the discrete path (including the start).
    pub min_abs: f64,
    /// State at each requested snapshot time while alive, None afterwards.
    pub snapshots: Vec<Option<f64>>,
}

/// Absorbing barriers seen from x0: (point, label on hitting, sign of the
/// side x0 starts on).
fn absorption_barriers(model: &ModelSpec, x0: f64) -> Vec<(f64, ExitLabel, f64)> {
    let points = model.singular_points();
    let top = points.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    points
        .iter()
        .filter(|&&b| b != x0)
        .map(|&b| {
            let label = if b == 0.0 {
                ExitLabel::AbsorbedAtZero
            } else if b == top {
                ExitLabel::ExitRight
            } else {
                ExitLabel::ExitLeft
            };
            (b, label, if x0 > b { 1.0 } else { -1.0 })
        })
        .collect()
}

/// Simulate one particle: x_{n+1} = x_n + drift(x_n) dt + diffusion(x_n)
/// sqrt(dt) xi_n with xi_n from the counter-based stream keyed by
/// (master_seed, particle_index, n).
///
/// A particle is absorbed at the first step whose endpoint lands on or
/// crosses a singular point (seen from its starting side), with the crossing
/// time interpolated linearly inside the step; afterwards the path is
/// constant at that point. Blow-up is declared when |x| exceeds
/// `blowup_threshold` or the state stops being finite.
pub fn euler_maruyama_path(model: &ModelSpec, x0: f64, cfg: &SimConfig, particle_index: u64) -> PathRecord {
    debug_assert!(x0.is_finite());
    let stream = NormalStream::new(cfg.master_seed, particle_index);
    let barriers = absorption_barriers(model, x0);
    let times = &cfg.snapshot_times;
    let mut snapshots = vec![None; times.len()];
    let mut next_snap = 0;

    // Starting exactly on a singular point means the particle never moves.
    let points = model.singular_points();
    if points.contains(&x0) {
        let top = points.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let label = if x0 == 0.0 {
            ExitLabel::AbsorbedAtZero
        } else if x0 == top {
            ExitLabel::ExitRight
        } else {
            ExitLabel::ExitLeft
        };
        return PathRecord { label, time: 0.0, terminal_state: x0, min_abs: x0.abs(), snapshots };
    }

    let mut x = x0;
    let mut min_abs = x0.abs();
    while next_snap < times.len() && times[next_snap] <= 0.0 {
        snapshots[next_snap] = Some(x);
        next_snap += 1;
    }

    let sqrt_dt = cfg.dt.sqrt();
    let noiseless = model.sigma() == 0.0;
    for n in 0..cfg.n_steps() {
        let t = n as f64 * cfg.dt;
        // Skipping the draw when sigma = 0 makes the path the plain Euler
        // ODE iteration bit-for-bit.
        let noise = if noiseless { 0.0 } else { model.diffusion(x) * sqrt_dt * stream.normal(n) };
        let x_next = x + model.drift(x) * cfg.dt + noise;
        let t_next = (n + 1) as f64 * cfg.dt;
        if !x_next.is_finite() || x_next.abs() > cfg.blowup_threshold {
            return PathRecord {
                label: ExitLabel::BlownUp,
                time: t_next,
                terminal_state: x_next,
                min_abs,
                snapshots,
            };
        }
        for &(b, label, side) in &barriers {
            if side * (x_next - b) <= 0.0 {
                let frac = if x_next == x { 1.0 } else { ((x - b) / (x - x_next)).clamp(0.0, 1.0) };
                return PathRecord {
                    label,
                    time: t + cfg.dt * frac,
                    terminal_state: b,
                    min_abs: min_abs.min(b.abs()),
                    snapshots,
                };
            }
        }
        x = x_next;
        min_abs = min_abs.min(x.abs());
        while next_snap < times.len() && times[next_snap] <= t_next + 1e-9 {
            snapshots[next_snap] = Some(x);
            next_snap += 1;
        }
    }
    PathRecord {
        label: ExitLabel::Alive,
        time: cfg.horizon,
        terminal_state: x,
        min_abs,
        snapshots,
    }
}

/// Initial condition for an ensemble: a point mass or a deterministic
/// per-particle uniform sample.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Initial {
    Point { x0: f64 },
    Uniform { lo: f64, hi: f64 },
}

impl Initial {
    fn sample(&self, master_seed: u64, particle_index: u64) -> f64 {
        match *self {
            Initial::Point { x0 } => x0,
            Initial::Uniform { lo, hi } => {
                // Counter at the top of the range; path noise counts up from 0.
                let u = NormalStream::new(master_seed, particle_index).uniform01(u64::MAX);
                lo + (hi - lo) * u
            }
        }
    }
}

/// Histogram over the survivors (particles not yet absorbed or blown up) at
/// one snapshot time, normalized to a probability mass function. Values
/// outside the configured range are clamped into the edge bins so the masses
/// always sum to 1 when any survivor exists.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SnapshotHistogram {
    pub time: f64,
    pub survivor_count: usize,
    pub bin_edges: Vec<f64>,
    pub masses: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParticleOutcome {
    pub label: ExitLabel,
    pub time: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct LabelCounts {
    pub absorbed_at_zero: usize,
    pub exit_left: usize,
    pub exit_right: usize,
    pub blown_up: usize,
    pub alive: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct EnsembleStats {
    pub histograms: Vec<SnapshotHistogram>,
    /// Terminal label and event time per particle, indexed by particle.
    pub outcomes: Vec<ParticleOutcome>,
    pub counts: LabelCounts,
}

impl EnsembleStats {
    /// Times at which absorbed particles hit a singular point.
    pub fn absorption_times(&self) -> Vec<f64> {
        self.outcomes
            .iter()
            .filter(|o| o.label.is_absorbed())
            .map(|o| o.time)
            .collect()
    }
}

fn bin_edges(cfg: &SimConfig) -> Vec<f64> {
    let (lo, hi) = cfg.histogram_range;
    let width = (hi - lo) / cfg.histogram_bins as f64;
    (0..=cfg.histogram_bins).map(|i| lo + width * i as f64).collect()
}

/// Run `cfg.n_particles` independent paths and aggregate.
///
/// Work is parallel over particles; per-particle results are reduced in
/// particle-index order, so the output is identical for any thread count.
pub fn ensemble_run(model: &ModelSpec, initial: Initial, cfg: &SimConfig) -> Result<EnsembleStats, SimError> {
    cfg.validate()?;
    let records: Vec<PathRecord> = (0..cfg.n_particles)
        .into_par_iter()
        .map(|i| {
            let idx = i as u64;
            let x0 = initial.sample(cfg.master_seed, idx);
            euler_maruyama_path(model, x0, cfg, idx)
        })
        .collect();

    let (lo, hi) = cfg.histogram_range;
    let width = (hi - lo) / cfg.histogram_bins as f64;
    let mut histograms = Vec::with_capacity(cfg.snapshot_times.len());
    for (j, &time) in cfg.snapshot_times.iter().enumerate() {
        let mut counts = vec![0usize; cfg.histogram_bins];
        let mut survivors = 0usize;
        for rec in &records {
            if let Some(x) = rec.snapshots[j] {
                survivors += 1;
                let bin = (((x - lo) / width).floor() as i64).clamp(0, cfg.histogram_bins as i64 - 1);
                counts[bin as usize] += 1;
            }
        }
        let masses = counts
            .iter()
            .map(|&c| if survivors > 0 { c as f64 / survivors as f64 } else { 0.0 })
            .collect();
        histograms.push(SnapshotHistogram {
            time,
            survivor_count: survivors,
            bin_edges: bin_edges(cfg),
            masses,
        });
    }

    let mut counts = LabelCounts::default();
    let outcomes = records
        .iter()
        .map(|r| {
            match r.label {
                ExitLabel::AbsorbedAtZero => counts.absorbed_at_zero += 1,
                ExitLabel::ExitLeft => counts.exit_left += 1,
                ExitLabel::ExitRight => counts.exit_right += 1,
                ExitLabel::BlownUp => counts.blown_up += 1,
                ExitLabel::Alive => counts.alive += 1,
            }
            ParticleOutcome { label: r.label, time: r.time }
        })
        .collect();
    Ok(EnsembleStats { histograms, outcomes, counts })
}

/// Fixed point of the noiseless local dynamics lambda*x + mu*x^{1+kappa}
/// (requires lambda > 0 and mu < 0).
pub fn noiseless_fixed_point(model: &ModelSpec) -> Option<f64> {
    if model.kind() == ModelKind::SaddleNode {
        return if model.a() > 0.0 { Some(model.a().sqrt()) } else { None };
    }
    if model.lambda() > 0.0 && model.mu() < 0.0 {
        Some((model.lambda() / -model.mu()).powf(1.0 / model.kappa()))
    } else {
        None
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct AbsorptionTimeEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub n_absorbed: usize,
    /// Fraction of particles still alive (or blown up) at the horizon; their
    /// absorption times are censored, biasing the mean low.
    pub censored_fraction: f64,
    pub biased_low: bool,
}

/// Sample mean and standard error of the absorption time, starting from `x0`
/// (default: the noiseless fixed point). Estimates with more than half the
/// sample censored at the horizon carry the `biased_low` flag.
pub fn mean_absorption_time(
    model: &ModelSpec,
    x0: Option<f64>,
    cfg: &SimConfig,
) -> Result<AbsorptionTimeEstimate, SimError> {
    let x0 = match x0.or_else(|| noiseless_fixed_point(model)) {
        Some(v) => v,
        None => {
            return Err(SimError::UnsupportedModel {
                reason: "no default initial condition: the noiseless dynamics has no stable fixed point"
                    .into(),
            })
        }
    };
    let stats = ensemble_run(model, Initial::Point { x0 }, cfg)?;
    let times = stats.absorption_times();
    let n = times.len();
    let censored_fraction = 1.0 - n as f64 / cfg.n_particles as f64;
    if n == 0 {
        return Ok(AbsorptionTimeEstimate {
            mean: f64::NAN,
            stderr: f64::NAN,
            n_absorbed: 0,
            censored_fraction,
            biased_low: true,
        });
    }
    let mean = times.iter().sum::<f64>() / n as f64;
    let var = times.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0).max(1.0);
    Ok(AbsorptionTimeEstimate {
        mean,
        stderr: var.sqrt() / (n as f64).sqrt(),
        n_absorbed: n,
        censored_fraction,
        biased_low: censored_fraction > 0.5,
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ExitFrequency {
    pub x0: f64,
    pub n_right: usize,
    pub n_left: usize,
    /// Paths neither converged nor absorbed by the horizon (plus blow-ups).
    pub n_unresolved: usize,
    /// Fraction of resolved paths that reached the upper point first.
    pub frequency_right: f64,
    /// Binomial standard error over the resolved paths.
    pub stderr: f64,
}

/// Radius and dwell time of the convergence rule used when alpha = 1, where
/// the singular points are never hit: a path counts as converged once it
/// stays within `CONVERGE_RADIUS` of one of them for `CONVERGE_DWELL` time
/// units.
pub const CONVERGE_RADIUS: f64 = 1e-3;
pub const CONVERGE_DWELL: f64 = 10.0;

fn converged_label(model: &ModelSpec, x0: f64, cfg: &SimConfig, particle_index: u64) -> ExitLabel {
    let stream = NormalStream::new(cfg.master_seed, particle_index);
    let r = model.a().sqrt();
    let sqrt_dt = cfg.dt.sqrt();
    let mut x = x0;
    let mut target: Option<(f64, f64)> = None; // (point, entry time)
    for n in 0..cfg.n_steps() {
        let noise = model.diffusion(x) * sqrt_dt * stream.normal(n);
        x = x + model.drift(x) * cfg.dt + noise;
        let t_next = (n + 1) as f64 * cfg.dt;
        if !x.is_finite() || x.abs() > cfg.blowup_threshold {
            return ExitLabel::BlownUp;
        }
        let near = if (x - r).abs() <= CONVERGE_RADIUS {
            Some(r)
        } else if (x + r).abs() <= CONVERGE_RADIUS {
            Some(-r)
        } else {
            None
        };
        match (near, target) {
            (Some(p), Some((q, entered))) if p == q => {
                if t_next - entered >= CONVERGE_DWELL {
                    return if p > 0.0 { ExitLabel::ExitRight } else { ExitLabel::ExitLeft };
                }
            }
            (Some(p), _) => target = Some((p, t_next)),
            (None, _) => target = None,
        }
    }
    ExitLabel::Alive
}

/// Per-initial-condition frequency of reaching the upper singular point
/// +sqrt(a) of a saddle-node model with a > 0.
///
/// For alpha < 1 the points are hit in finite time and hits are counted; at
/// alpha = 1 they are unreachable and the dwell rule above decides instead.
pub fn exit_frequencies(
    model: &ModelSpec,
    x0_grid: &[f64],
    cfg: &SimConfig,
) -> Result<Vec<ExitFrequency>, SimError> {
    cfg.validate()?;
    if model.kind() != ModelKind::SaddleNode || model.a() <= 0.0 {
        return Err(SimError::UnsupportedModel {
            reason: "exit frequencies require a saddle-node model with a > 0".into(),
        });
    }
    if model.alpha() > 1.0 {
        return Err(SimError::UnsupportedModel {
            reason: format!(
                "alpha = {} > 1: the singular points are neither reached nor approached closely",
                model.alpha()
            ),
        });
    }
    let dwell_rule = model.alpha() == 1.0;
    let mut out = Vec::with_capacity(x0_grid.len());
    for (g, &x0) in x0_grid.iter().enumerate() {
        // Distinct particle indices per grid point keep the noise streams of
        // different initial conditions independent.
        let base = (g * cfg.n_particles) as u64;
        let labels: Vec<ExitLabel> = (0..cfg.n_particles)
            .into_par_iter()
            .map(|i| {
                let idx = base + i as u64;
                if dwell_rule {
                    converged_label(model, x0, cfg, idx)
                } else {
                    euler_maruyama_path(model, x0, cfg, idx).label
                }
            })
            .collect();
        let n_right = labels.iter().filter(|&&l| l == ExitLabel::ExitRight).count();
        let n_left = labels.iter().filter(|&&l| l == ExitLabel::ExitLeft).count();
        let n_unresolved = labels.len() - n_right - n_left;
        let resolved = n_right + n_left;
        let frequency_right = if resolved > 0 { n_right as f64 / resolved as f64 } else { f64::NAN };
        let stderr = if resolved > 0 {
            (frequency_right * (1.0 - frequency_right) / resolved as f64).sqrt()
        } else {
            f64::NAN
        };
        out.push(ExitFrequency { x0, n_right, n_left, n_unresolved, frequency_right, stderr });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn pitchfork(lambda: f64, sigma: f64, alpha: f64) -> ModelSpec {
        ModelSpec::pitchfork(lambda, sigma, alpha).unwrap()
    }

    #[test]
    fn zero_noise_path_is_the_euler_ode_iteration() {
        let model = pitchfork(1.0, 0.0, 0.75);
        let cfg = SimConfig::new(0.01, 5.0, 1, 0);
        let rec = euler_maruyama_path(&model, 0.5, &cfg, 0);
        let mut x = 0.5_f64;
        for _ in 0..cfg.n_steps() {
            x = x + (x - x * x * x) * 0.01;
        }
        assert_eq!(rec.label, ExitLabel::Alive);
        assert_eq!(rec.terminal_state.to_bits(), x.to_bits());
    }

    #[test]
    fn zero_noise_terminal_error_is_first_order_in_dt() {
        // dx = (x - x^3) dt from x0 = 0.5 has x(t)^2 = 1 / (1 + 3 e^{-2t}).
        let model = pitchfork(1.0, 0.0, 0.75);
        let t_end = 2.0_f64;
        let exact = (1.0 / (1.0 + 3.0 * (-2.0 * t_end).exp())).sqrt();
        let run = |dt: f64| {
            let cfg = SimConfig::new(dt, t_end, 1, 0);
            (euler_maruyama_path(&model, 0.5, &cfg, 0).terminal_state - exact).abs()
        };
        let e1 = run(0.02);
        let e2 = run(0.01);
        assert!(e2 <= e1 * 0.5 * 1.2, "halving dt: error {e1} -> {e2}");
    }

    #[test]
    fn same_particle_same_path() {
        let model = pitchfork(0.5, 1.0, 0.75);
        let cfg = SimConfig::new(0.01, 2.0, 1, 99);
        let a = euler_maruyama_path(&model, 1.0, &cfg, 17);
        let b = euler_maruyama_path(&model, 1.0, &cfg, 17);
        assert_eq!(a, b);
    }

    #[test]
    fn absorption_time_is_interpolated_inside_the_step() {
        // Strong inward drift with alpha < 1 crosses zero quickly.
        let model = pitchfork(-10.0, 1.0, 0.6);
        let cfg = SimConfig::new(0.01, 50.0, 1, 4);
        let rec = euler_maruyama_path(&model, 0.3, &cfg, 2);
        assert_eq!(rec.label, ExitLabel::AbsorbedAtZero);
        assert_eq!(rec.terminal_state, 0.0);
        // Strictly inside some step, not on the grid.
        assert!((rec.time / cfg.dt).fract() > 0.0);
    }

    #[test]
    fn high_alpha_paths_never_touch_zero() {
        let model = pitchfork(-1.0, 1.0, 1.2);
        let cfg = SimConfig::new(0.01, 50.0, 1, 11);
        for idx in 0..20 {
            let rec = euler_maruyama_path(&model, 1.0, &cfg, idx);
            assert_eq!(rec.label, ExitLabel::Alive);
            assert!(rec.min_abs > 0.0);
        }
    }

    #[test]
    fn saddle_node_paths_exit_through_a_labeled_side() {
        let model = ModelSpec::saddle_node(1.0, 0.5, 0.75).unwrap();
        let mut cfg = SimConfig::new(0.01, 200.0, 200, 7);
        cfg.histogram_range = (-1.0, 1.0);
        let stats = ensemble_run(&model, Initial::Point { x0: 0.3 }, &cfg).unwrap();
        assert_eq!(stats.counts.alive, 0);
        assert_eq!(stats.counts.absorbed_at_zero, 0);
        assert!(stats.counts.exit_right > stats.counts.exit_left);
        assert_eq!(stats.counts.exit_right + stats.counts.exit_left, 200);
    }

    #[test]
    fn blow_up_is_detected_for_negative_a() {
        let model = ModelSpec::saddle_node(-0.5, 0.5, 0.75).unwrap();
        let cfg = SimConfig::new(0.001, 50.0, 50, 21);
        let stats = ensemble_run(&model, Initial::Point { x0: 0.0 }, &cfg).unwrap();
        assert_eq!(stats.counts.blown_up, 50);
        assert!(stats.outcomes.iter().all(|o| o.time < 50.0));
    }

    #[test]
    fn survivor_histograms_are_pmfs_with_nonincreasing_counts() {
        let model = ModelSpec::subcritical_pitchfork(-0.5, 0.5, 0.6).unwrap();
        let mut cfg = SimConfig::new(0.01, 10.0, 2_000, 5);
        cfg.snapshot_times = vec![1.0, 2.0, 4.0, 6.0, 8.0, 10.0];
        cfg.histogram_range = (0.0, 1.5);
        let stats = ensemble_run(&model, Initial::Point { x0: 1.0 }, &cfg).unwrap();
        let mut prev = usize::MAX;
        for h in &stats.histograms {
            assert!(h.survivor_count <= prev);
            prev = h.survivor_count;
            if h.survivor_count > 0 {
                let total: f64 = h.masses.iter().sum();
                assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
            }
        }
        assert!(stats.counts.absorbed_at_zero > 0);
    }

    #[test]
    fn ensemble_is_identical_across_thread_counts() {
        let model = pitchfork(0.5, 0.8, 0.6);
        let mut cfg = SimConfig::new(0.01, 5.0, 500, 123);
        cfg.snapshot_times = vec![2.5, 5.0];
        let run_with = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
            pool.install(|| ensemble_run(&model, Initial::Point { x0: 1.0 }, &cfg).unwrap())
        };
        let a = run_with(1);
        let b = run_with(4);
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }

    #[test]
    fn mean_absorption_time_defaults_to_the_fixed_point() {
        let model = pitchfork(1.0, 0.8, 0.6);
        assert_eq!(noiseless_fixed_point(&model), Some(1.0));
        let cfg = SimConfig::new(0.01, 200.0, 400, 9);
        let est = mean_absorption_time(&model, None, &cfg).unwrap();
        assert!(est.n_absorbed > 300, "absorbed {}", est.n_absorbed);
        assert!(est.mean > 0.0 && est.stderr > 0.0);
        assert!(!est.biased_low);
    }

    #[test]
    fn quadrupling_particles_halves_the_standard_error() {
        let model = pitchfork(1.0, 0.8, 0.6);
        let small = SimConfig::new(0.01, 400.0, 300, 31);
        let large = SimConfig { n_particles: 1_200, ..small.clone() };
        let a = mean_absorption_time(&model, None, &small).unwrap();
        let b = mean_absorption_time(&model, None, &large).unwrap();
        let ratio = a.stderr / b.stderr;
        assert!((1.4..2.9).contains(&ratio), "stderr ratio {ratio}");
    }

    #[test]
    fn exit_frequency_saturates_near_the_stable_point() {
        let model = ModelSpec::saddle_node(1.0, 0.5, 0.75).unwrap();
        let cfg = SimConfig::new(0.01, 200.0, 300, 77);
        // -sqrt(a) repels, so even starting nearby most paths cross to the
        // right; the frequency should still grow monotonically with x0 and
        // saturate next to the attracting point.
        let rows = exit_frequencies(&model, &[-0.99, -0.9, 0.95], &cfg).unwrap();
        let f: Vec<f64> = rows.iter().map(|r| r.frequency_right).collect();
        assert!(f[0] < f[1] && f[1] < f[2], "frequencies {f:?} not increasing in x0");
        assert!(rows[2].frequency_right > 0.97, "at x0=0.95: {}", rows[2].frequency_right);
    }

    #[test]
    fn exit_frequencies_reject_unsupported_models() {
        let cfg = SimConfig::new(0.01, 10.0, 10, 0);
        let pf = pitchfork(1.0, 0.5, 0.75);
        assert!(exit_frequencies(&pf, &[0.5], &cfg).is_err());
        let sn = ModelSpec::saddle_node(1.0, 0.5, 1.5).unwrap();
        assert!(exit_frequencies(&sn, &[0.5], &cfg).is_err());
    }

    #[test]
    fn alpha_one_paths_converge_under_the_dwell_rule() {
        let model = ModelSpec::saddle_node(4.0, 0.8, 1.0).unwrap();
        let cfg = SimConfig::new(0.01, 100.0, 100, 13);
        let rows = exit_frequencies(&model, &[1.0], &cfg).unwrap();
        let r = &rows[0];
        assert!(r.n_right + r.n_left > 90, "resolved {} of 100", r.n_right + r.n_left);
        assert!(r.frequency_right >= 0.4);
    }

    #[test]
    fn uniform_initial_condition_is_deterministic_and_in_range() {
        let init = Initial::Uniform { lo: 0.2, hi: 0.8 };
        for i in 0..100 {
            let x = init.sample(5, i);
            assert!((0.2..=0.8).contains(&x));
            assert_eq!(x.to_bits(), init.sample(5, i).to_bits());
        }
    }

    #[test]
    fn config_validation_catches_bad_fields() {
        let mut cfg = SimConfig::new(0.0, 1.0, 10, 0);
        assert!(cfg.validate().is_err());
        cfg.dt = 0.1;
        cfg.snapshot_times = vec![2.0];
        assert!(cfg.validate().is_err());
        cfg.snapshot_times = vec![0.5, 0.2];
        assert!(cfg.validate().is_err());
        cfg.snapshot_times = vec![0.2, 0.5];
        assert!(cfg.validate().is_ok());
    }
}
