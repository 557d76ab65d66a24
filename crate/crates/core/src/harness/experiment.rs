//! Fluctuation experiments: distances `D_n <= H_n <= W_n` between random
//! vertex pairs, centred by `2 ln ln n / |ln(tau - 2)|`.

use std::io::Write;

use rand::Rng;
use serde::Serialize;

use super::config::ExperimentConfig;
use super::stats::nearest_rank_sorted;
use crate::distributions::sample_degrees;
use crate::error::{Error, Result};
use crate::fpp::{assign_weights, weight_distance, WeightMode};
use crate::graph::HalfEdgeGraph;
use crate::layers::{excess_budget, greedy_layer_path, make_schedule, LayerSchedule, PathStatus};
use crate::percolation::{policy_from_excess_law, thinning_view_percolate, PercolationPolicy};
use crate::rng::{replication_seed, stream, stream_rng};
pub use crate::CSV_VERSION;

/// Pair draws allowed per replication before giving up.
pub const MAX_PAIR_DRAWS: usize = 10_000;

/// `2 ln ln n / |ln(tau - 2)|`.
pub fn centering(n: u64, tau: f64) -> f64 {
    2.0 * (n as f64).ln().ln() / (tau - 2.0).ln().abs()
}

/// Layer-walk diagnostics of one replication.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LayerDiagnostics {
    pub b_n: usize,
    pub budget: f64,
    /// Whether the walk from `u` got stuck; `None` when `u` starts below `y_0`.
    pub stuck: Option<bool>,
    /// Excess weight picked up by the walk, when it ran.
    pub path_excess: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentRecord {
    pub n: u64,
    pub rep: usize,
    pub seed: u64,
    pub u: usize,
    pub v: usize,
    /// Pair draws rejected because `u = v` or the pair was disconnected.
    pub resamples: usize,
    pub d: usize,
    pub h: usize,
    pub w: f64,
    pub centering: f64,
    pub residual_d: f64,
    pub residual_h: f64,
    pub residual_w: f64,
    pub layers: Option<LayerDiagnostics>,
}

impl ExperimentRecord {
    /// `D <= H <= W` (every edge weighs at least one).
    pub fn ordered(&self) -> bool {
        self.d <= self.h && (self.h as f64) <= self.w
    }
}

struct LayerSetup {
    schedule: LayerSchedule<f64>,
    policy: PercolationPolicy<f64>,
    budget: f64,
}

fn layer_setup(cfg: &ExperimentConfig, n: u64) -> Result<Option<LayerSetup>> {
    let Some(l) = &cfg.layers else {
        return Ok(None);
    };
    let tau = cfg.tau();
    let schedule = make_schedule(l.k, tau, l.gamma, l.b, n, l.alpha)?;
    let policy = policy_from_excess_law(&cfg.weight, l.cp, cfg.gamma_p().expect("layers present"))?;
    let budget = excess_budget(&schedule, &policy)?.total;
    Ok(Some(LayerSetup {
        schedule,
        policy,
        budget,
    }))
}

/// One replication at size `n`.
pub fn run_replication(cfg: &ExperimentConfig, n: u64, rep: usize) -> Result<ExperimentRecord> {
    let setup = layer_setup(cfg, n)?;
    replication(cfg, n, rep, setup.as_ref())
}

fn replication(cfg: &ExperimentConfig, n: u64, rep: usize, setup: Option<&LayerSetup>) -> Result<ExperimentRecord> {
    let seed = replication_seed(cfg.seed, n, rep as u64);
    let degrees: Vec<usize> = sample_degrees(&cfg.degree, n as usize, seed)?
        .into_iter()
        .map(|d| d as usize)
        .collect();
    let g = HalfEdgeGraph::build(&degrees, seed)?;
    let weights = assign_weights(&g, &cfg.weight, cfg.mode, seed);
    let mut rng = stream_rng(seed, stream::PAIR_CHOICE);
    let nv = g.vertex_count();
    let mut resamples = 0;
    let (u, v, path) = loop {
        if resamples >= MAX_PAIR_DRAWS {
            return Err(Error::Invariant(format!(
                "no connected pair after {MAX_PAIR_DRAWS} draws at n = {n}"
            )));
        }
        let u = rng.random_range(0..nv);
        let v = rng.random_range(0..nv);
        if u != v {
            if let Some(p) = weight_distance(&g, &weights, u, v)? {
                break (u, v, p);
            }
        }
        resamples += 1;
    };
    let d = g.graph_distance(u, v)?.expect("connected by a weighted path");
    let c = centering(n, cfg.tau());
    let layers = setup.map(|s| layer_walk(&g, &weights, s, u)).transpose()?;
    let record = ExperimentRecord {
        n,
        rep,
        seed,
        u,
        v,
        resamples,
        d,
        h: path.hopcount,
        w: path.weight,
        centering: c,
        residual_d: d as f64 - c,
        residual_h: path.hopcount as f64 - c,
        residual_w: path.weight - c,
        layers,
    };
    if !record.ordered() {
        return Err(Error::Invariant(format!(
            "D = {} H = {} W = {} out of order at n = {n}, rep {rep}",
            record.d, record.h, record.w
        )));
    }
    Ok(record)
}

fn layer_walk(
    g: &HalfEdgeGraph,
    weights: &crate::fpp::WeightAssignment<f64>,
    setup: &LayerSetup,
    u: usize,
) -> Result<LayerDiagnostics> {
    // per-half-edge weights give the thinning view; otherwise walk the plain graph
    let walk = match weights.mode() {
        WeightMode::PerHalfEdge => {
            let pg = thinning_view_percolate(g, weights, &setup.policy)?;
            greedy_layer_path(&pg, u, &setup.schedule, Some(weights))
        }
        WeightMode::PerEdge => greedy_layer_path(g, u, &setup.schedule, Some(weights)),
    };
    let (stuck, path_excess) = match walk {
        Ok(p) => (Some(p.status == PathStatus::Stuck), Some(p.total_excess())),
        Err(Error::StartBelowThreshold { .. }) => (None, None),
        Err(e) => return Err(e),
    };
    Ok(LayerDiagnostics {
        b_n: setup.schedule.b_n(),
        budget: setup.budget,
        stuck,
        path_excess,
    })
}

/// All replications over the grid, in `(n, rep)` order.
pub fn run_fluctuation_experiment(cfg: &ExperimentConfig) -> Result<Vec<ExperimentRecord>> {
    let cfg = cfg.clone().validated()?;
    let mut records = Vec::with_capacity(cfg.n_grid.len() * cfg.replications);
    for &n in &cfg.n_grid {
        let setup = layer_setup(&cfg, n)?;
        for rep in 0..cfg.replications {
            records.push(replication(&cfg, n, rep, setup.as_ref())?);
        }
    }
    Ok(records)
}

fn opt<T: ToString>(x: Option<T>) -> String {
    x.map_or_else(String::new, |v| v.to_string())
}

/// Versioned CSV: the schema comment, a header row, one row per record.
pub fn write_records_csv<W: Write>(records: &[ExperimentRecord], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{CSV_VERSION}")?;
    writeln!(
        out,
        "n,rep,seed,u,v,resamples,D,H,W,centering,residual_D,residual_H,residual_W,b_n,budget,stuck,path_excess"
    )?;
    for r in records {
        let l = r.layers.as_ref();
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.n,
            r.rep,
            r.seed,
            r.u,
            r.v,
            r.resamples,
            r.d,
            r.h,
            r.w,
            r.centering,
            r.residual_d,
            r.residual_h,
            r.residual_w,
            opt(l.map(|l| l.b_n)),
            opt(l.map(|l| l.budget)),
            opt(l.and_then(|l| l.stuck)),
            opt(l.and_then(|l| l.path_excess)),
        )?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    ResidualD,
    ResidualH,
    ResidualW,
}

impl Metric {
    pub const ALL: [Metric; 3] = [Metric::ResidualD, Metric::ResidualH, Metric::ResidualW];

    pub fn of(self, r: &ExperimentRecord) -> f64 {
        match self {
            Metric::ResidualD => r.residual_d,
            Metric::ResidualH => r.residual_h,
            Metric::ResidualW => r.residual_w,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuantileRow {
    pub n: u64,
    pub metric: Metric,
    pub p: f64,
    pub value: f64,
}

/// Nearest-rank quantiles of every residual, per `n` in increasing order.
pub fn quantile_summary(records: &[ExperimentRecord], probs: &[f64]) -> Result<Vec<QuantileRow>> {
    if records.is_empty() {
        return Err(Error::EmptyInput);
    }
    if let Some(p) = probs.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::param(format!("probability {p} outside [0, 1]")));
    }
    let mut ns: Vec<u64> = records.iter().map(|r| r.n).collect();
    ns.sort_unstable();
    ns.dedup();
    let mut rows = Vec::new();
    for n in ns {
        for metric in Metric::ALL {
            let mut xs: Vec<f64> = records.iter().filter(|r| r.n == n).map(|r| metric.of(r)).collect();
            xs.sort_by(f64::total_cmp);
            for &p in probs {
                rows.push(QuantileRow {
                    n,
                    metric,
                    p,
                    value: nearest_rank_sorted(&xs, p),
                });
            }
        }
    }
    Ok(rows)
}

/// Summary of `residual_W` at one grid point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridStat {
    pub n: u64,
    pub median: f64,
    pub q05: f64,
    pub q25: f64,
    pub q75: f64,
    pub q95: f64,
    pub iqr: f64,
}

pub fn grid_stats(records: &[ExperimentRecord]) -> Result<Vec<GridStat>> {
    let rows = quantile_summary(records, &[0.05, 0.25, 0.5, 0.75, 0.95])?;
    let w: Vec<&QuantileRow> = rows.iter().filter(|r| r.metric == Metric::ResidualW).collect();
    Ok(w.chunks(5)
        .map(|c| GridStat {
            n: c[0].n,
            q05: c[0].value,
            q25: c[1].value,
            median: c[2].value,
            q75: c[3].value,
            q95: c[4].value,
            iqr: c[3].value - c[1].value,
        })
        .collect())
}

/// Explosive vs conservative comparison of `residual_W` over a shared grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DichotomySummary {
    pub tau: f64,
    pub replications: usize,
    pub explosive_weight: String,
    pub conservative_weight: String,
    pub explosive: Vec<GridStat>,
    pub conservative: Vec<GridStat>,
    /// Largest over smallest explosive IQR across the grid.
    pub explosive_iqr_ratio: f64,
    /// Spread of the explosive medians across the grid.
    pub explosive_median_range: f64,
    pub conservative_medians_increasing: bool,
}

impl DichotomySummary {
    /// Tightness proxy: IQR ratio and median spread within the given bands,
    /// and strictly increasing conservative medians.
    pub fn passes(&self, max_iqr_ratio: f64, max_median_range: f64) -> bool {
        self.explosive_iqr_ratio <= max_iqr_ratio
            && self.explosive_median_range <= max_median_range
            && self.conservative_medians_increasing
    }
}

pub struct DichotomyRun {
    pub summary: DichotomySummary,
    pub explosive_records: Vec<ExperimentRecord>,
    pub conservative_records: Vec<ExperimentRecord>,
}

pub fn run_dichotomy_comparison(explosive: &ExperimentConfig, conservative: &ExperimentConfig) -> Result<DichotomyRun> {
    if explosive.n_grid != conservative.n_grid {
        return Err(Error::MismatchedGrids(format!(
            "{:?} vs {:?}",
            explosive.n_grid, conservative.n_grid
        )));
    }
    if explosive.tau() != conservative.tau() {
        return Err(Error::MismatchedGrids(format!(
            "tau {} vs {}",
            explosive.tau(),
            conservative.tau()
        )));
    }
    if explosive.replications != conservative.replications {
        return Err(Error::MismatchedGrids(format!(
            "replications {} vs {}",
            explosive.replications, conservative.replications
        )));
    }
    let explosive_records = run_fluctuation_experiment(explosive)?;
    let conservative_records = run_fluctuation_experiment(conservative)?;
    let ex = grid_stats(&explosive_records)?;
    let co = grid_stats(&conservative_records)?;
    let iqrs: Vec<f64> = ex.iter().map(|s| s.iqr).collect();
    let (lo, hi) = iqrs
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    let meds: Vec<f64> = ex.iter().map(|s| s.median).collect();
    let (mlo, mhi) = meds
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    let summary = DichotomySummary {
        tau: explosive.tau(),
        replications: explosive.replications,
        explosive_weight: super::config::format_weight_spec(&explosive.weight),
        conservative_weight: super::config::format_weight_spec(&conservative.weight),
        explosive_iqr_ratio: if lo > 0.0 { hi / lo } else { f64::INFINITY },
        explosive_median_range: mhi - mlo,
        conservative_medians_increasing: co.windows(2).all(|w| w[1].median > w[0].median),
        explosive: ex,
        conservative: co,
    };
    Ok(DichotomyRun {
        summary,
        explosive_records,
        conservative_records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::ExcessWeightLaw;

    #[test]
    fn centering_at_one_hundred_thousand() {
        let c = centering(100_000, 2.5);
        let expected = 2.0 * (100_000f64.ln()).ln() / 2f64.ln();
        assert_eq!(c, expected);
        assert!((c - 7.051).abs() < 1e-3);
        assert!(centering(16, 2.5) > 0.0);
    }

    #[test]
    fn small_experiment_is_ordered_and_deterministic() {
        let cfg = ExperimentConfig::new(vec![200, 400], 3, 2.5, ExcessWeightLaw::Uniform01, 5);
        let a = run_fluctuation_experiment(&cfg).unwrap();
        assert_eq!(a.len(), 6);
        assert!(a.iter().all(ExperimentRecord::ordered));
        for r in &a {
            assert_eq!(r.residual_w, r.w - r.centering);
            assert_eq!(r.residual_d, r.d as f64 - r.centering);
        }
        let b = run_fluctuation_experiment(&cfg).unwrap();
        let (mut x, mut y) = (Vec::new(), Vec::new());
        write_records_csv(&a, &mut x).unwrap();
        write_records_csv(&b, &mut y).unwrap();
        assert_eq!(x, y);
        assert!(String::from_utf8(x).unwrap().starts_with("#fppcm-v1\nn,rep,seed,"));
        assert_eq!(run_replication(&cfg, 400, 2).unwrap(), a[5]);
    }

    #[test]
    fn quantiles_of_single_record() {
        let cfg = ExperimentConfig::new(vec![100], 1, 2.5, ExcessWeightLaw::Uniform01, 1);
        let recs = run_fluctuation_experiment(&cfg).unwrap();
        let rows = quantile_summary(&recs, &[0.1, 0.5, 0.9]).unwrap();
        assert_eq!(rows.len(), 9);
        assert!(rows
            .iter()
            .filter(|r| r.metric == Metric::ResidualW)
            .all(|r| r.value == recs[0].residual_w));
        assert!(quantile_summary(&[], &[0.5]).is_err());
    }

    #[test]
    fn dichotomy_rejects_mismatched_grids() {
        let a = ExperimentConfig::new(vec![100, 200], 2, 2.5, ExcessWeightLaw::Uniform01, 1);
        let b = ExperimentConfig::new(vec![100, 300], 2, 2.5, ExcessWeightLaw::DoubleExponential, 1);
        assert!(matches!(
            run_dichotomy_comparison(&a, &b),
            Err(Error::MismatchedGrids(_))
        ));
        let same = run_dichotomy_comparison(&a, &a).unwrap();
        assert_eq!(same.summary.explosive, same.summary.conservative);
    }
}
