//! Monte Carlo driver: instances x schemes x realizations.
//!
//! Instances run in parallel; everything inside an instance is serial and
//! results are merged in instance order, so the report does not depend on
//! the thread count.

mod overhead;
mod stats;

pub use overhead::{count_overhead, OverheadCounters};
pub use stats::{aggregate_stats, nearest_rank, Aggregate};

use std::sync::Arc;

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::assignment::{run_proposed, PilotAssignment, ServiceCluster};
use crate::baselines::{run_random, scalable_pilot_assignment};
use crate::channel::ChannelSampler;
use crate::config::{Scheme, SimConfig};
use crate::error::{Error, Result};
use crate::phy::{
    fractional_power_allocation, partially_overlapping, pilot_noise, pmmse_with_overlap,
    uplink_sinr, DownlinkAccumulator, EstimationStatistics, UplinkAccumulator,
};
use crate::rng::{instance_seed, rng_for, stream};
use crate::tensor::Grid;
use crate::topology::{hex, NetworkInstance};

/// Output of any scheme on one instance.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeOutcome {
    pub scheme: Scheme,
    pub controller_of: Vec<usize>,
    pub pilots: PilotAssignment,
    pub cluster: ServiceCluster,
    pub overhead: OverheadCounters,
}

/// Runs one scheme's assignment with the pilot count and algorithm settings
/// of `config`. Randomized schemes draw from their own stream under `rng_seed`.
pub fn run_scheme(
    scheme: Scheme,
    lsfc: &Grid<f64>,
    config: &SimConfig,
    rng_seed: u64,
) -> Result<SchemeOutcome> {
    let mut rng = rng_for(rng_seed, &[stream::SCHEME, scheme.stream_id()]);
    let n_pilots = config.n_pilots;
    Ok(match scheme {
        Scheme::Proposed => {
            let out = run_proposed(
                lsfc,
                n_pilots,
                config.max_pilot_iterations(),
                config.controller_gap_scale,
                &mut rng,
            )?;
            SchemeOutcome {
                scheme,
                controller_of: out.controllers.controller_of.clone(),
                overhead: count_overhead(&out.trace),
                pilots: out.pilots,
                cluster: out.cluster,
            }
        }
        Scheme::Random => {
            let out = run_random(lsfc, n_pilots, &mut rng)?;
            SchemeOutcome {
                scheme,
                controller_of: out.controller_of,
                pilots: out.pilots,
                cluster: out.cluster,
                overhead: OverheadCounters::default(),
            }
        }
        Scheme::Scalable => {
            let out = scalable_pilot_assignment(lsfc, n_pilots)?;
            SchemeOutcome {
                scheme,
                controller_of: out.controller_of,
                pilots: out.pilots,
                cluster: out.cluster,
                overhead: OverheadCounters::default(),
            }
        }
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct UeRecord {
    pub scheme: Scheme,
    pub instance: usize,
    pub ue: usize,
    pub pilot: usize,
    pub controller_ap: usize,
    pub n_serving_aps: usize,
    pub se_ul: f64,
    pub se_dl: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchemeInstanceResult {
    pub scheme: Scheme,
    pub records: Vec<UeRecord>,
    pub overhead: OverheadCounters,
    /// Downlink UEs whose denominator had to be clamped.
    pub dl_clamped: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InstanceResult {
    pub index: usize,
    pub seed: u64,
    pub digest: String,
    pub schemes: Vec<SchemeInstanceResult>,
}

/// Uplink SE, downlink SE and the number of clamped downlink UEs.
pub type SchemeSe = (Vec<f64>, Vec<f64>, usize);

/// SE per UE for an already assigned instance, using the realizations and
/// pilot noise rooted at `seed`.
pub fn evaluate_outcomes(
    config: &SimConfig,
    instance: &NetworkInstance,
    outcomes: &[SchemeOutcome],
    seed: u64,
) -> Result<Vec<SchemeSe>> {
    let n_ues = instance.n_ues();
    let sampler = ChannelSampler::new(instance)?;
    let ul_power = vec![config.ul_power_mw; n_ues];

    struct Eval<'a> {
        outcome: &'a SchemeOutcome,
        stats: Arc<EstimationStatistics>,
        overlap: Vec<Vec<usize>>,
        rho: Grid<f64>,
        ul: UplinkAccumulator,
        dl: DownlinkAccumulator,
    }
    let mut evals = outcomes
        .iter()
        .map(|o| {
            Ok(Eval {
                outcome: o,
                stats: Arc::new(EstimationStatistics::new(
                    instance,
                    &o.pilots.pilot_of,
                    config.n_pilots,
                    &ul_power,
                )?),
                overlap: partially_overlapping(&o.cluster),
                rho: fractional_power_allocation(&o.cluster, &instance.lsfc, config.dl_power_mw),
                ul: UplinkAccumulator::new(n_ues),
                dl: DownlinkAccumulator::new(n_ues),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    for r in 0..config.n_realizations {
        let h = sampler.realization(seed, r).h;
        let noise = pilot_noise(
            seed,
            r,
            config.n_pilots,
            instance.n_aps(),
            instance.n_antennas,
            instance.noise_power,
        );
        for e in evals.iter_mut() {
            let est = e.stats.estimate(&h, &noise);
            let cluster = &e.outcome.cluster;
            let v = pmmse_with_overlap(&est, cluster, &e.overlap)?;
            e.ul.push(&uplink_sinr(&est, &v, cluster));
            e.dl.push(&h, &v, cluster, &e.rho);
        }
    }
    let prelog = config.prelog();
    evals
        .into_iter()
        .map(|e| {
            let dl = e.dl.finish(instance.noise_power, prelog)?;
            Ok((e.ul.finish(prelog), dl.se, dl.clamped))
        })
        .collect()
}

pub fn evaluate_instance(config: &SimConfig, index: usize) -> Result<InstanceResult> {
    let seed = instance_seed(config.seed, index);
    evaluate_seeded(config, index, seed).map_err(|e| e.in_instance(seed))
}

fn evaluate_seeded(config: &SimConfig, index: usize, seed: u64) -> Result<InstanceResult> {
    let instance = NetworkInstance::generate(config, seed)?;
    let outcomes = config
        .scheme
        .schemes()
        .into_iter()
        .map(|s| run_scheme(s, &instance.lsfc, config, seed))
        .collect::<Result<Vec<_>>>()?;
    let se = evaluate_outcomes(config, &instance, &outcomes, seed)?;

    let schemes = outcomes
        .iter()
        .zip(se)
        .map(|(o, (ul, dl, clamped))| {
            let records = (0..instance.n_ues())
                .map(|t| UeRecord {
                    scheme: o.scheme,
                    instance: index,
                    ue: t,
                    pilot: o.pilots.pilot_of[t],
                    controller_ap: o.controller_of[t],
                    n_serving_aps: o.cluster.serving_aps[t].len(),
                    se_ul: ul[t],
                    se_dl: dl[t],
                })
                .collect();
            SchemeInstanceResult {
                scheme: o.scheme,
                records,
                overhead: o.overhead,
                dl_clamped: clamped,
            }
        })
        .collect();
    Ok(InstanceResult {
        index,
        seed,
        digest: instance.digest(),
        schemes,
    })
}

/// Pooled results of one scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct SEReport {
    pub scheme: Scheme,
    pub records: Vec<UeRecord>,
    pub per_ue_se_ul: Vec<f64>,
    pub per_ue_se_dl: Vec<f64>,
    pub ul: Aggregate,
    pub dl: Aggregate,
    /// Sum over instances.
    pub overhead: OverheadCounters,
    pub per_instance_overhead: Vec<OverheadCounters>,
    pub dl_clamped: usize,
}

impl SEReport {
    pub fn avg_ul(&self) -> f64 {
        self.ul.mean
    }

    pub fn avg_dl(&self) -> f64 {
        self.dl.mean
    }

    pub fn p10_ul(&self) -> f64 {
        self.ul.p10
    }

    pub fn p10_dl(&self) -> f64 {
        self.dl.p10
    }

    pub fn alg1_iters_mean(&self) -> f64 {
        mean_of(
            self.per_instance_overhead
                .iter()
                .map(|o| o.alg1_outer_iterations),
        )
    }

    pub fn alg2_iters_mean(&self) -> f64 {
        mean_of(self.per_instance_overhead.iter().map(|o| o.alg2_iterations))
    }
}

fn mean_of(it: impl ExactSizeIterator<Item = usize>) -> f64 {
    let n = it.len();
    if n == 0 {
        return 0.0;
    }
    it.sum::<usize>() as f64 / n as f64
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub config: SimConfig,
    pub reports: Vec<SEReport>,
    /// One per instance, shared by every scheme.
    pub instance_digests: Vec<String>,
}

impl ExperimentReport {
    pub fn report(&self, scheme: Scheme) -> Option<&SEReport> {
        self.reports.iter().find(|r| r.scheme == scheme)
    }

    /// SHA-256 over every per-UE record and counter.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        for d in &self.instance_digests {
            h.update(d.as_bytes());
        }
        for r in &self.reports {
            h.update(r.scheme.name().as_bytes());
            for u in &r.records {
                for x in [u.instance, u.ue, u.pilot, u.controller_ap, u.n_serving_aps] {
                    h.update((x as u64).to_le_bytes());
                }
                h.update(u.se_ul.to_bits().to_le_bytes());
                h.update(u.se_dl.to_bits().to_le_bytes());
            }
            for o in &r.per_instance_overhead {
                for x in [
                    o.ue_to_ap_requests,
                    o.ap_to_ue_responses,
                    o.ap_cpu_pilot_messages,
                    o.alg1_outer_iterations,
                    o.alg2_iterations,
                    o.fallback_count,
                    o.candidate_fallbacks,
                ] {
                    h.update((x as u64).to_le_bytes());
                }
            }
            h.update((r.dl_clamped as u64).to_le_bytes());
        }
        hex(&h.finalize())
    }
}

pub fn merge_instances(
    config: &SimConfig,
    instances: Vec<InstanceResult>,
) -> Result<ExperimentReport> {
    let schemes = config.scheme.schemes();
    let mut reports = Vec::with_capacity(schemes.len());
    for (k, &scheme) in schemes.iter().enumerate() {
        let mut records = Vec::new();
        let mut per_instance_overhead = Vec::with_capacity(instances.len());
        let mut overhead = OverheadCounters::default();
        let mut dl_clamped = 0;
        for inst in &instances {
            let s = &inst.schemes[k];
            debug_assert_eq!(s.scheme, scheme);
            records.extend(s.records.iter().cloned());
            per_instance_overhead.push(s.overhead);
            overhead.add(&s.overhead);
            dl_clamped += s.dl_clamped;
        }
        let per_ue_se_ul: Vec<f64> = records.iter().map(|r| r.se_ul).collect();
        let per_ue_se_dl: Vec<f64> = records.iter().map(|r| r.se_dl).collect();
        reports.push(SEReport {
            scheme,
            ul: aggregate_stats(&per_ue_se_ul)?,
            dl: aggregate_stats(&per_ue_se_dl)?,
            records,
            per_ue_se_ul,
            per_ue_se_dl,
            overhead,
            per_instance_overhead,
            dl_clamped,
        });
    }
    Ok(ExperimentReport {
        config: config.clone(),
        reports,
        instance_digests: instances.into_iter().map(|i| i.digest).collect(),
    })
}

/// Runs every instance on the current rayon pool.
pub fn run_experiment(config: &SimConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let instances = (0..config.n_instances)
        .into_par_iter()
        .map(|i| evaluate_instance(config, i))
        .collect::<Result<Vec<_>>>()?;
    merge_instances(config, instances)
}

pub fn run_experiment_serial(config: &SimConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let instances = (0..config.n_instances)
        .map(|i| evaluate_instance(config, i))
        .collect::<Result<Vec<_>>>()?;
    merge_instances(config, instances)
}

/// Runs on a dedicated pool of `threads` workers.
pub fn run_experiment_with_threads(config: &SimConfig, threads: usize) -> Result<ExperimentReport> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Precondition(format!("thread pool: {e}")))?;
    pool.install(|| run_experiment(config))
}
