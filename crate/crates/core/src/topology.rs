//! Network geometry, large-scale fading and instance construction.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use sha2::{Digest, Sha256};

use crate::config::SimConfig;
use crate::correlation::LocalScattering;
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::rng::{rng_for, stream};
use crate::tensor::Grid;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

/// AP and UE positions on the square `[0, area_side_m]^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Geometry {
    pub ap_positions: Vec<Point>,
    pub ue_positions: Vec<Point>,
    pub ap_height_m: f64,
}

impl Geometry {
    pub fn n_aps(&self) -> usize {
        self.ap_positions.len()
    }

    pub fn n_ues(&self) -> usize {
        self.ue_positions.len()
    }

    /// 3-D distance including the AP height offset.
    pub fn distance(&self, ue: usize, ap: usize) -> f64 {
        let (u, a) = (self.ue_positions[ue], self.ap_positions[ap]);
        let (dx, dy) = (u.x - a.x, u.y - a.y);
        (dx * dx + dy * dy + self.ap_height_m * self.ap_height_m).sqrt()
    }

    /// Azimuth of UE `ue` seen from AP `ap`, radians.
    pub fn azimuth(&self, ue: usize, ap: usize) -> f64 {
        let (u, a) = (self.ue_positions[ue], self.ap_positions[ap]);
        (u.y - a.y).atan2(u.x - a.x)
    }
}

/// Draws AP then UE positions uniformly over the square. APs come from their
/// own stream so they do not move when only the UE count changes.
pub fn generate_topology(config: &SimConfig, instance_seed: u64) -> Result<Geometry> {
    config.validate()?;
    let side = config.area_side_m;
    let draw = |tag: u64, n: usize| {
        let mut rng = rng_for(instance_seed, &[tag]);
        (0..n)
            .map(|_| Point {
                x: rng.random::<f64>() * side,
                y: rng.random::<f64>() * side,
            })
            .collect::<Vec<_>>()
    };
    Ok(Geometry {
        ap_positions: draw(stream::AP_POSITIONS, config.n_aps),
        ue_positions: draw(stream::UE_POSITIONS, config.n_ues),
        ap_height_m: config.ap_height_m,
    })
}

/// Median path loss in dB (negative) at `distance_m`.
pub fn pathloss_db(intercept_db: f64, slope_db: f64, distance_m: f64) -> f64 {
    intercept_db - slope_db * distance_m.log10()
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// `T x M` linear-scale large-scale fading coefficients, with i.i.d.
/// log-normal shadowing per link.
pub fn compute_lsfc<R: Rng + ?Sized>(
    geometry: &Geometry,
    config: &SimConfig,
    rng: &mut R,
) -> Grid<f64> {
    let shadow = Normal::new(0.0, config.shadow_sigma_db).expect("validated sigma");
    Grid::from_fn(geometry.n_ues(), geometry.n_aps(), |t, m| {
        let mut db = pathloss_db(
            config.pathloss_intercept_db,
            config.pathloss_slope_db,
            geometry.distance(t, m),
        );
        if config.shadow_sigma_db > 0.0 {
            db += shadow.sample(rng);
        }
        db_to_linear(db)
    })
}

/// Geometry plus LSFC, which is all the assignment algorithms look at.
pub fn generate_lsfc_only(config: &SimConfig, instance_seed: u64) -> Result<(Geometry, Grid<f64>)> {
    let geometry = generate_topology(config, instance_seed)?;
    let mut rng = rng_for(instance_seed, &[stream::SHADOWING]);
    let lsfc = compute_lsfc(&geometry, config, &mut rng);
    Ok((geometry, lsfc))
}

#[derive(Debug, Clone)]
pub struct NetworkInstance {
    pub geometry: Geometry,
    /// `beta[(t, m)]`, linear scale.
    pub lsfc: Grid<f64>,
    /// Spatial correlation `R_{t,m}`, including `beta`.
    pub corr: Grid<CMatrix>,
    /// Noise power in mW.
    pub noise_power: f64,
    pub n_antennas: usize,
}

impl NetworkInstance {
    pub fn generate(config: &SimConfig, instance_seed: u64) -> Result<Self> {
        let (geometry, lsfc) = generate_lsfc_only(config, instance_seed)?;
        let scattering = LocalScattering::new(config.n_antennas, config.asd_deg.to_radians());
        Self::from_parts(geometry, lsfc, &scattering, config.noise_power_mw())
    }

    pub fn from_parts(
        geometry: Geometry,
        lsfc: Grid<f64>,
        scattering: &LocalScattering,
        noise_power: f64,
    ) -> Result<Self> {
        let corr = build_correlation(&geometry, &lsfc, scattering)?;
        Ok(NetworkInstance {
            geometry,
            lsfc,
            corr,
            noise_power,
            n_antennas: scattering.n_antennas(),
        })
    }

    pub fn n_ues(&self) -> usize {
        self.lsfc.rows()
    }

    pub fn n_aps(&self) -> usize {
        self.lsfc.cols()
    }

    /// SHA-256 over positions and LSFC bits.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        for p in self
            .geometry
            .ap_positions
            .iter()
            .chain(&self.geometry.ue_positions)
        {
            h.update(p.x.to_bits().to_le_bytes());
            h.update(p.y.to_bits().to_le_bytes());
        }
        for b in self.lsfc.iter() {
            h.update(b.to_bits().to_le_bytes());
        }
        hex(&h.finalize())
    }
}

pub(crate) fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// `R_{t,m} = beta_{t,m} * Sigma(theta_{t,m})` for every link.
pub fn build_correlation(
    geometry: &Geometry,
    lsfc: &Grid<f64>,
    scattering: &LocalScattering,
) -> Result<Grid<CMatrix>> {
    let mut out = Vec::with_capacity(lsfc.rows());
    for t in 0..lsfc.rows() {
        let mut row = Vec::with_capacity(lsfc.cols());
        for m in 0..lsfc.cols() {
            let beta = lsfc[(t, m)];
            if !(beta > 0.0 && beta.is_finite()) {
                return Err(Error::Numerical(format!(
                    "non-positive LSFC {beta} at ({t}, {m})"
                )));
            }
            row.push(scattering.normalized(geometry.azimuth(t, m)).scale(beta));
        }
        out.push(row);
    }
    Ok(Grid::from_rows(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{hermitian_defect, hermitian_eigenvalues};

    #[test]
    fn pathloss_reference_distances() {
        assert!((pathloss_db(-30.5, 36.7, 10.0) - (-67.2)).abs() < 1e-12);
        assert!((pathloss_db(-30.5, 36.7, 100.0) - (-103.9)).abs() < 1e-12);
    }

    #[test]
    fn positions_inside_square_and_deterministic() {
        let cfg = SimConfig {
            area_side_m: 2000.0,
            n_aps: 100,
            n_ues: 100,
            ..SimConfig::default()
        };
        let g = generate_topology(&cfg, 1).unwrap();
        assert_eq!(g.n_aps(), 100);
        assert_eq!(g.n_ues(), 100);
        for p in g.ap_positions.iter().chain(&g.ue_positions) {
            assert!((0.0..=2000.0).contains(&p.x) && (0.0..=2000.0).contains(&p.y));
        }
        assert_eq!(g, generate_topology(&cfg, 1).unwrap());
        assert_ne!(g, generate_topology(&cfg, 2).unwrap());
    }

    #[test]
    fn zero_area_is_a_config_error() {
        let cfg = SimConfig {
            area_side_m: 0.0,
            ..SimConfig::default()
        };
        assert!(matches!(
            generate_topology(&cfg, 1),
            Err(Error::InvalidConfig {
                key: "area_side_m",
                ..
            })
        ));
    }

    #[test]
    fn aps_do_not_move_with_ue_count() {
        let a = generate_topology(
            &SimConfig {
                n_ues: 30,
                ..SimConfig::default()
            },
            9,
        )
        .unwrap();
        let b = generate_topology(
            &SimConfig {
                n_ues: 50,
                ..SimConfig::default()
            },
            9,
        )
        .unwrap();
        assert_eq!(a.ap_positions, b.ap_positions);
    }

    #[test]
    fn no_shadowing_is_deterministic_in_distance() {
        let cfg = SimConfig {
            shadow_sigma_db: 0.0,
            ..SimConfig::default()
        };
        let g = generate_topology(&cfg, 3).unwrap();
        let mut r1 = rng_for(1, &[]);
        let mut r2 = rng_for(2, &[]);
        let a = compute_lsfc(&g, &cfg, &mut r1);
        let b = compute_lsfc(&g, &cfg, &mut r2);
        assert_eq!(a, b);
        let expected = db_to_linear(pathloss_db(-30.5, 36.7, g.distance(0, 0)));
        assert_eq!(a[(0, 0)], expected);
    }

    #[test]
    fn instance_correlation_invariants() {
        let cfg = SimConfig {
            n_aps: 6,
            n_ues: 5,
            ..SimConfig::default()
        };
        let inst = NetworkInstance::generate(&cfg, 11).unwrap();
        let a = cfg.n_antennas as f64;
        for t in 0..inst.n_ues() {
            for m in 0..inst.n_aps() {
                let r = &inst.corr[(t, m)];
                let beta = inst.lsfc[(t, m)];
                assert!(beta > 0.0);
                assert!((r.trace().re / a - beta).abs() <= 1e-9 * beta);
                assert!(hermitian_defect(r) < 1e-12 * r.norm());
                assert!(hermitian_eigenvalues(r)[0] >= -1e-10 * r.norm());
            }
        }
    }

    #[test]
    fn correlation_scales_with_beta() {
        let cfg = SimConfig {
            n_aps: 3,
            n_ues: 3,
            ..SimConfig::default()
        };
        let (g, lsfc) = generate_lsfc_only(&cfg, 5).unwrap();
        let s = LocalScattering::new(cfg.n_antennas, cfg.asd_deg.to_radians());
        let base = build_correlation(&g, &lsfc, &s).unwrap();
        let scaled = build_correlation(&g, &lsfc.map(|b| b * 8.0), &s).unwrap();
        for (a, b) in base.iter().zip(scaled.iter()) {
            assert_eq!(a.scale(8.0), *b);
        }
    }
}
