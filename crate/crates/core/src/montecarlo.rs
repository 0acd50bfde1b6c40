//! Replicated distributional experiments: simulate fields, evaluate the
//! normalized statistic across a grid of lags, pair each path with a draw
//! from its mixed-Gaussian limit, and aggregate the comparison.
//!
//! The limit sample is paired: path `i` contributes
//! `c_q * sqrt(limit_scale_i) * Z_i` with `limit_scale_i` computed from the
//! same simulated field and `Z_i` a standard Gaussian from a stream
//! disjoint from the path stream. Reports are bit-reproducible from
//! `(config, master_seed)`: path `i` always consumes stream
//! `(master_seed, i)` regardless of scheduling, and all reductions run in
//! path order after the parallel section.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{positive, Error, Result};
use crate::hermite::limit_constant;
use crate::path_sim::{
    local_time_field, simulate_besq0_stream, simulate_brownian_stream, BesqZeroField,
    LocalTimeField,
};
use crate::rng::{stream_rng, StreamTag};
use crate::stats::{normalized_statistic, Domain, SpatialField, StatisticRequest};

/// Which random field a replicated experiment simulates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentMode {
    /// Brownian local time at a fixed horizon `t`.
    FixedTime,
    /// The stopping-time field: a BESQ(0) process on the half line.
    Tau,
}

/// Full description of one replicated experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub mode: ExperimentMode,
    /// Time horizon (fixed-time mode).
    pub t: f64,
    /// BESQ(0) start level (tau mode).
    pub besq_start: f64,
    /// Spatial truncation of the BESQ(0) field (tau mode).
    pub max_extent: f64,
    /// Moment order `q >= 2`.
    pub q: u32,
    /// Weight power `r` in `Y = L^r`.
    pub r: u32,
    /// Strictly decreasing spatial lags, each a multiple of `bin_width`.
    pub h_list: Vec<f64>,
    /// Time step of the Brownian simulation (fixed-time mode).
    pub dt: f64,
    /// Spatial bin width of the simulated fields.
    pub bin_width: f64,
    /// Number of replicated paths.
    pub n_paths: usize,
    /// Master seed; path `i` uses streams derived from `(seed, i)`.
    pub master_seed: u64,
    /// Maximum parallelism (0 = automatic). Execution detail only: it is
    /// never serialized and never affects results.
    #[serde(skip_serializing)]
    pub workers: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            mode: ExperimentMode::FixedTime,
            t: 1.0,
            besq_start: 1.0,
            max_extent: 100.0,
            q: 2,
            r: 0,
            h_list: vec![0.4, 0.2, 0.1, 0.05],
            dt: 1e-4,
            bin_width: 0.01,
            n_paths: 4000,
            master_seed: 1,
            workers: 0,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_paths < 2 {
            return Err(Error::config("n_paths must be >= 2"));
        }
        if self.q < 2 || self.q > crate::stats::MAX_STATISTIC_ORDER {
            return Err(Error::config(format!(
                "q must be in 2..={}, got {}",
                crate::stats::MAX_STATISTIC_ORDER,
                self.q
            )));
        }
        if self.r > crate::stats::MAX_WEIGHT_POWER {
            return Err(Error::config(format!(
                "r must be <= {}, got {}",
                crate::stats::MAX_WEIGHT_POWER,
                self.r
            )));
        }
        if !positive(self.bin_width) {
            return Err(Error::config("bin_width must be positive"));
        }
        match self.mode {
            ExperimentMode::FixedTime => {
                if !positive(self.t) {
                    return Err(Error::config("t must be positive in fixed-time mode"));
                }
                if !positive(self.dt) || self.dt > self.t {
                    return Err(Error::config("need 0 < dt <= t"));
                }
            }
            ExperimentMode::Tau => {
                if !positive(self.besq_start) {
                    return Err(Error::config("besq_start must be positive in tau mode"));
                }
                if !positive(self.max_extent) {
                    return Err(Error::config("max_extent must be positive"));
                }
            }
        }
        if self.h_list.is_empty() {
            return Err(Error::config("h_list must not be empty"));
        }
        for w in self.h_list.windows(2) {
            if w[1] >= w[0] || w[1].is_nan() {
                return Err(Error::config("h_list must be strictly decreasing"));
            }
        }
        for &h in &self.h_list {
            let ratio = h / self.bin_width;
            let m = ratio.round();
            if !positive(h) || m < 1.0 || (ratio - m).abs() > 1e-9 * m {
                return Err(Error::config(format!(
                    "h = {h} is not an integer multiple of bin_width {}",
                    self.bin_width
                )));
            }
        }
        Ok(())
    }

    fn request(&self, h: f64) -> StatisticRequest {
        StatisticRequest::new(self.q, h, self.r)
    }
}

/// A simulated field of either mode.
#[derive(Debug, Clone)]
pub enum SimulatedField {
    Brownian(LocalTimeField),
    Besq(BesqZeroField),
}

impl SpatialField for SimulatedField {
    fn bin_width(&self) -> f64 {
        match self {
            SimulatedField::Brownian(f) => f.bin_width(),
            SimulatedField::Besq(f) => f.bin_width(),
        }
    }
    fn values(&self) -> &[f64] {
        match self {
            SimulatedField::Brownian(f) => f.values(),
            SimulatedField::Besq(f) => f.values(),
        }
    }
    fn domain(&self) -> Domain {
        match self {
            SimulatedField::Brownian(f) => f.domain(),
            SimulatedField::Besq(f) => f.domain(),
        }
    }
    fn observed_bins(&self) -> Option<usize> {
        match self {
            SimulatedField::Brownian(f) => f.observed_bins(),
            SimulatedField::Besq(f) => f.observed_bins(),
        }
    }
}

/// Source of per-path fields; implemented by the two simulation modes and
/// by degenerate stubs in tests.
pub trait FieldGenerator: Sync {
    fn generate(&self, config: &ExperimentConfig, path_index: usize) -> Result<SimulatedField>;
}

/// The mode-dispatching generator used by [`run_experiment`].
struct ModeGenerator;

impl FieldGenerator for ModeGenerator {
    fn generate(&self, config: &ExperimentConfig, path_index: usize) -> Result<SimulatedField> {
        match config.mode {
            ExperimentMode::FixedTime => {
                let path = simulate_brownian_stream(
                    config.t,
                    config.dt,
                    config.master_seed,
                    path_index as u64,
                )?;
                Ok(SimulatedField::Brownian(local_time_field(
                    &path,
                    config.bin_width,
                )?))
            }
            ExperimentMode::Tau => Ok(SimulatedField::Besq(simulate_besq0_stream(
                config.besq_start,
                config.bin_width,
                config.max_extent,
                config.master_seed,
                path_index as u64,
            )?)),
        }
    }
}

/// Statistic values of one path at one lag.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PathStatistic {
    pub h: f64,
    pub s_q: f64,
    pub r_qh: f64,
    pub t_q: f64,
    /// `sum_j L(j)^q Y(j)^2 dx` over the interval the statistic ran on
    /// (lag-independent for complete fields).
    pub limit_scale: f64,
    /// `c_q * sqrt(limit_scale) * z`, the paired mixed-Gaussian sample.
    pub limit_sample: f64,
}

/// Everything recorded for one path.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathRecord {
    pub path_id: usize,
    pub per_h: Vec<PathStatistic>,
    /// The independent Gaussian factor of the paired limit samples.
    pub z: f64,
}

/// Aggregated comparison at one lag.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HSummary {
    pub h: f64,
    /// Two-sample KS distance between the `T_q` sample and the paired
    /// limit sample.
    pub ks_stat: f64,
    /// `Var(T_q) / (c_q^2 * mean(limit_scale))`.
    pub var_ratio: f64,
    pub mean_t: f64,
    pub mean_s: f64,
    /// Standard error of `mean_s`.
    pub stderr: f64,
}

/// Full outcome of a replicated experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub per_h: Vec<HSummary>,
    pub paths: Vec<PathRecord>,
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn sample_variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64
}

/// Run a replicated experiment with the mode-appropriate simulator.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    run_with_generator(config, &ModeGenerator)
}

/// Run a replicated experiment with an explicit field source.
pub fn run_with_generator<G: FieldGenerator>(
    config: &ExperimentConfig,
    generator: &G,
) -> Result<ExperimentReport> {
    config.validate()?;
    let c_q = limit_constant(config.q)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| Error::config(format!("failed to build worker pool: {e}")))?;

    let paths: Vec<PathRecord> = pool.install(|| {
        (0..config.n_paths)
            .into_par_iter()
            .map(|i| {
                let field = generator.generate(config, i).map_err(|e| e.at_path(i))?;
                let z: f64 = stream_rng(config.master_seed, i as u64, StreamTag::Limit)
                    .sample(StandardNormal);
                let mut per_h = Vec::with_capacity(config.h_list.len());
                for &h in &config.h_list {
                    let res = normalized_statistic(&field, &config.request(h))
                        .map_err(|e| e.at_path(i))?;
                    per_h.push(PathStatistic {
                        h,
                        s_q: res.s_q,
                        r_qh: res.r_qh,
                        t_q: res.t_q,
                        limit_scale: res.limit_scale,
                        limit_sample: c_q * res.limit_scale.sqrt() * z,
                    });
                }
                Ok(PathRecord {
                    path_id: i,
                    per_h,
                    z,
                })
            })
            .collect::<Result<Vec<_>>>()
    })?;

    // paths are already ordered by index; aggregate sequentially
    let mut per_h = Vec::with_capacity(config.h_list.len());
    for (hi, &h) in config.h_list.iter().enumerate() {
        let t_sample: Vec<f64> = paths.iter().map(|p| p.per_h[hi].t_q).collect();
        let s_sample: Vec<f64> = paths.iter().map(|p| p.per_h[hi].s_q).collect();
        let limit_sample: Vec<f64> = paths.iter().map(|p| p.per_h[hi].limit_sample).collect();
        let mean_scale = mean(
            &paths
                .iter()
                .map(|p| p.per_h[hi].limit_scale)
                .collect::<Vec<_>>(),
        );
        let ks_stat = ks_two_sample(&t_sample, &limit_sample)?;
        let limit_var = c_q * c_q * mean_scale;
        let var_ratio = if limit_var > 0.0 {
            sample_variance(&t_sample) / limit_var
        } else {
            0.0
        };
        per_h.push(HSummary {
            h,
            ks_stat,
            var_ratio,
            mean_t: mean(&t_sample),
            mean_s: mean(&s_sample),
            stderr: (sample_variance(&s_sample) / s_sample.len() as f64).sqrt(),
        });
    }
    Ok(ExperimentReport {
        config: config.clone(),
        per_h,
        paths,
    })
}

/// Two-sample Kolmogorov-Smirnov statistic: the sup distance between the
/// empirical distribution functions, by merge scan of the sorted samples.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::domain("KS statistic needs non-empty samples"));
    }
    let mut xs = a.to_vec();
    let mut ys = b.to_vec();
    xs.sort_by(f64::total_cmp);
    ys.sort_by(f64::total_cmp);
    let (n, m) = (xs.len() as f64, ys.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = 0.0f64;
    while i < xs.len() && j < ys.len() {
        let v = xs[i].min(ys[j]);
        while i < xs.len() && xs[i] <= v {
            i += 1;
        }
        while j < ys.len() && ys[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    Ok(d)
}

/// One row of the `q = 2` expectation scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExpectationRow {
    pub h: f64,
    pub mean_s: f64,
    pub stderr: f64,
    /// `mean_s - 4 t h`; shrinks like `h^2`.
    pub deviation: f64,
}

/// Monte Carlo scan of `E[S_2(h)]` against the exact first-order value
/// `4 t h`. Requires `q = 2`, `r = 0`, fixed-time mode.
pub fn expectation_scan(
    config: &ExperimentConfig,
) -> Result<(ExperimentReport, Vec<ExpectationRow>)> {
    if config.q != 2 || config.r != 0 || config.mode != ExperimentMode::FixedTime {
        return Err(Error::config(
            "expectation scan requires q = 2, r = 0, fixed-time mode",
        ));
    }
    let report = run_experiment(config)?;
    let rows = report
        .per_h
        .iter()
        .map(|s| ExpectationRow {
            h: s.h,
            mean_s: s.mean_s,
            stderr: s.stderr,
            deviation: s.mean_s - 4.0 * config.t * s.h,
        })
        .collect();
    Ok((report, rows))
}

/// One row of the compensator-fluctuation probe for `q >= 4`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConjectureRow {
    pub h: f64,
    /// `Var((R_{q,h} - mean R_{q,h}) / h^{(q+1)/2})`.
    pub var_r_normalized: f64,
    pub var_t: f64,
    pub mean_r: f64,
    /// Standard error of `mean_r`.
    pub stderr_r: f64,
}

/// Descriptive probe of whether the compensator's own fluctuations matter
/// at the CLT scale. No pass/fail verdict; emits the centered, normalized
/// compensator variance next to `Var(T_q)`.
pub fn conjecture_probe(
    config: &ExperimentConfig,
) -> Result<(ExperimentReport, Vec<ConjectureRow>)> {
    if config.q < 4 {
        return Err(Error::config("conjecture probe requires q >= 4"));
    }
    let report = run_experiment(config)?;
    let mut rows = Vec::with_capacity(config.h_list.len());
    for (hi, &h) in config.h_list.iter().enumerate() {
        let r_sample: Vec<f64> = report.paths.iter().map(|p| p.per_h[hi].r_qh).collect();
        let t_sample: Vec<f64> = report.paths.iter().map(|p| p.per_h[hi].t_q).collect();
        let norm = h.powf((config.q as f64 + 1.0) / 2.0);
        let var_r = sample_variance(&r_sample);
        rows.push(ConjectureRow {
            h,
            var_r_normalized: var_r / (norm * norm),
            var_t: sample_variance(&t_sample),
            mean_r: mean(&r_sample),
            stderr_r: (var_r / r_sample.len() as f64).sqrt(),
        });
    }
    Ok((report, rows))
}
