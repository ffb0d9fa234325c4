use std::sync::Arc;

use cellfree::assignment::ServiceCluster;
use cellfree::channel::{complex_gaussian, ChannelSampler};
use cellfree::config::SimConfig;
use cellfree::harness::{evaluate_outcomes, run_scheme, SchemeOutcome};
use cellfree::linalg::CMatrix;
use cellfree::phy::{
    fractional_power_allocation, mr_combining, pilot_noise, pmmse_combining, uplink_sinr,
    DownlinkAccumulator, EstimationStatistics,
};
use cellfree::rng::rng_for;
use cellfree::tensor::{Grid, LinkTensor, C64};
use cellfree::topology::NetworkInstance;
use cellfree::Scheme;
use rand::Rng;

fn scalar(v: f64) -> CMatrix {
    CMatrix::from_element(1, 1, C64::new(v, 0.0))
}

#[test]
fn two_ue_scalar_uplink_matches_direct_formula() {
    let mut rng = rng_for(77, &[]);
    for trial in 0..50 {
        let beta = [rng.random_range(0.1..2.0), rng.random_range(0.1..2.0)];
        let tau = [rng.random_range(0.5..3.0), rng.random_range(0.5..3.0)];
        let sigma2 = rng.random_range(0.1..1.0);
        let n_pilots = 2;
        let pilots = if trial % 2 == 0 { [0, 0] } else { [0, 1] };
        let corr = Grid::from_rows(vec![vec![scalar(beta[0])], vec![scalar(beta[1])]]);
        let stats = Arc::new(
            EstimationStatistics::from_correlations(&corr, &pilots, n_pilots, &tau, sigma2)
                .unwrap(),
        );

        let mut h = LinkTensor::zeros(2, 1, 1);
        let mut noise = LinkTensor::zeros(2, 1, 1);
        for t in 0..2 {
            h.get_mut(t, 0)[0] = complex_gaussian(&mut rng, beta[t]);
            noise.get_mut(t, 0)[0] = complex_gaussian(&mut rng, sigma2);
        }
        let est = stats.estimate(&h, &noise);
        let cluster = ServiceCluster::from_matrix(Grid::from_rows(vec![vec![true], vec![true]]));
        let v = pmmse_combining(&est, &cluster).unwrap();
        let sinr = uplink_sinr(&est, &v, &cluster);

        // Direct evaluation.
        let a = |t: usize| n_pilots as f64 * tau[t];
        let psi = |p: usize| -> f64 {
            (0..2)
                .filter(|&t| pilots[t] == p)
                .map(|t| a(t) * beta[t])
                .sum::<f64>()
                + sigma2
        };
        let y = |p: usize| -> C64 {
            (0..2)
                .filter(|&t| pilots[t] == p)
                .map(|t| h.get(t, 0)[0] * a(t).sqrt())
                .sum::<C64>()
                + noise.get(p, 0)[0]
        };
        let hhat: Vec<C64> = (0..2)
            .map(|t| y(pilots[t]) * (a(t).sqrt() * beta[t] / psi(pilots[t])))
            .collect();
        let c: Vec<f64> = (0..2)
            .map(|t| beta[t] - a(t) * beta[t] * beta[t] / psi(pilots[t]))
            .collect();
        let err: f64 = (0..2).map(|j| tau[j] * c[j]).sum();
        for t in 0..2 {
            let j = 1 - t;
            let expect = tau[t] * hhat[t].norm_sqr() / (tau[j] * hhat[j].norm_sqr() + err + sigma2);
            assert!(
                (sinr[t] - expect).abs() <= 1e-12 * expect.max(1.0),
                "trial {trial} ue {t}: {} vs {expect}",
                sinr[t]
            );
        }
    }
}

fn small_config(n_aps: usize, n_ues: usize, n_pilots: usize) -> SimConfig {
    SimConfig {
        n_aps,
        n_ues,
        n_pilots,
        area_side_m: 300.0,
        n_realizations: 20,
        ..Default::default()
    }
}

#[test]
fn pmmse_beats_mr_with_full_clusters() {
    let cfg = small_config(3, 4, 2);
    for seed in 0..100u64 {
        let inst = NetworkInstance::generate(&cfg, seed).unwrap();
        let power = vec![cfg.ul_power_mw; 4];
        let stats = Arc::new(EstimationStatistics::new(&inst, &[0, 1, 0, 1], 2, &power).unwrap());
        let h = ChannelSampler::new(&inst).unwrap().realization(seed, 0).h;
        let est = stats.estimate(&h, &pilot_noise(seed, 0, 2, 3, 4, inst.noise_power));
        let cluster = ServiceCluster::from_matrix(Grid::from_fn(4, 3, |_, _| true));
        let p = uplink_sinr(&est, &pmmse_combining(&est, &cluster).unwrap(), &cluster);
        let m = uplink_sinr(&est, &mr_combining(&est, &cluster), &cluster);
        for t in 0..4 {
            assert!(
                p[t] >= m[t] * (1.0 - 1e-9),
                "seed {seed} ue {t}: {} < {}",
                p[t],
                m[t]
            );
        }
    }
}

#[test]
fn orthogonal_pilots_beat_single_shared_pilot_downlink() {
    let cfg = small_config(4, 3, 3);
    let prelog = cfg.prelog();
    let n_real = 40;
    let mut wins = 0;
    let trials = 100;
    for seed in 0..trials {
        let inst = NetworkInstance::generate(&cfg, seed).unwrap();
        let sampler = ChannelSampler::new(&inst).unwrap();
        let cluster = ServiceCluster::from_matrix(Grid::from_fn(3, 4, |_, _| true));
        let rho = fractional_power_allocation(&cluster, &inst.lsfc, cfg.dl_power_mw);
        let power = vec![cfg.ul_power_mw; 3];
        let mut total = [0.0; 2];
        for (k, pilots) in [[0, 1, 2], [0, 0, 0]].iter().enumerate() {
            let stats = Arc::new(EstimationStatistics::new(&inst, pilots, 3, &power).unwrap());
            let mut dl = DownlinkAccumulator::new(3);
            for r in 0..n_real {
                let h = sampler.realization(seed, r).h;
                let est = stats.estimate(&h, &pilot_noise(seed, r, 3, 4, 4, inst.noise_power));
                let v = pmmse_combining(&est, &cluster).unwrap();
                dl.push(&h, &v, &cluster, &rho);
            }
            total[k] = dl.finish(inst.noise_power, prelog).unwrap().se.iter().sum();
        }
        if total[0] > total[1] {
            wins += 1;
        }
    }
    assert!(wins >= 95, "orthogonal pilots won {wins}/{trials}");
}

#[test]
fn evaluation_ignores_scheme_label() {
    let cfg = small_config(4, 6, 3);
    let inst = NetworkInstance::generate(&cfg, 5).unwrap();
    let outcome = run_scheme(Scheme::Scalable, &inst.lsfc, &cfg, 5).unwrap();
    let relabeled = SchemeOutcome {
        scheme: Scheme::Proposed,
        overhead: Default::default(),
        ..outcome.clone()
    };
    let a = evaluate_outcomes(&cfg, &inst, &[outcome], 5).unwrap();
    let b = evaluate_outcomes(&cfg, &inst, &[relabeled], 5).unwrap();
    assert_eq!(a, b);
}

#[test]
fn se_values_nonnegative_and_finite() {
    let cfg = small_config(5, 8, 3);
    for seed in 0..10 {
        let inst = NetworkInstance::generate(&cfg, seed).unwrap();
        let outcomes: Vec<SchemeOutcome> = Scheme::ALL
            .iter()
            .map(|&s| run_scheme(s, &inst.lsfc, &cfg, seed).unwrap())
            .collect();
        for (ul, dl, _) in evaluate_outcomes(&cfg, &inst, &outcomes, seed).unwrap() {
            assert!(ul.iter().chain(&dl).all(|x| x.is_finite() && *x >= 0.0));
        }
    }
}

#[test]
fn fractional_power_sums_to_budget() {
    let cfg = small_config(6, 10, 3);
    for seed in 0..1000 {
        let inst = NetworkInstance::generate(&cfg, seed).unwrap();
        let out = run_scheme(Scheme::Scalable, &inst.lsfc, &cfg, seed).unwrap();
        let rho = fractional_power_allocation(&out.cluster, &inst.lsfc, cfg.dl_power_mw);
        for (m, served) in out.cluster.served_ues.iter().enumerate() {
            let s: f64 = (0..cfg.n_ues).map(|t| rho[(t, m)]).sum();
            if served.is_empty() {
                assert_eq!(s, 0.0);
            } else {
                assert!((s - cfg.dl_power_mw).abs() <= 1e-9 * cfg.dl_power_mw);
            }
        }
    }
}

#[test]
fn sample_covariance_converges() {
    let cfg = small_config(1, 1, 1);
    let inst = NetworkInstance::generate(&cfg, 8).unwrap();
    let sampler = ChannelSampler::new(&inst).unwrap();
    let r = &inst.corr[(0, 0)];
    let n = 10_000;
    let mut acc = CMatrix::zeros(4, 4);
    for i in 0..n {
        let h = sampler.realization(8, i).h;
        let v = cellfree::linalg::CVector::from_column_slice(h.get(0, 0));
        acc += &v * v.adjoint();
    }
    acc /= C64::new(n as f64, 0.0);
    assert!((acc - r).norm() < 0.1 * r.norm());
}
