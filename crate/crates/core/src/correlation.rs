//! Local scattering spatial correlation for a half-wavelength ULA.
//!
//! The normalized correlation between antennas `r` and `c` is
//! `E[exp(j*pi*(c - r)*sin(theta + delta))]` with `delta ~ N(0, asd^2)`.
//! The expectation is a Gaussian-weighted integral, evaluated here with
//! Gauss-Hermite quadrature. Nodes and weights depend only on the ASD, so they
//! are computed once and reused for every link.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::linalg::CMatrix;
use crate::tensor::C64;

#[derive(Debug, Clone)]
pub struct LocalScattering {
    n_antennas: usize,
    /// Angular offsets in radians.
    offsets: Vec<f64>,
    /// Probability weights, summing to one.
    weights: Vec<f64>,
}

impl LocalScattering {
    pub fn new(n_antennas: usize, asd_rad: f64) -> Self {
        assert!(n_antennas >= 1);
        assert!(asd_rad >= 0.0 && asd_rad.is_finite());
        if asd_rad == 0.0 || n_antennas == 1 {
            return LocalScattering {
                n_antennas,
                offsets: vec![0.0],
                weights: vec![1.0],
            };
        }
        let spread = PI * (n_antennas - 1) as f64 * asd_rad;
        let n_nodes = (64 + 16 * spread.ceil() as usize).min(400);
        let (nodes, weights) = gauss_hermite(n_nodes);
        let offsets = nodes
            .iter()
            .map(|x| asd_rad * std::f64::consts::SQRT_2 * x)
            .collect();
        let total: f64 = weights.iter().sum();
        LocalScattering {
            n_antennas,
            offsets,
            weights: weights.iter().map(|w| w / total).collect(),
        }
    }

    pub fn n_antennas(&self) -> usize {
        self.n_antennas
    }

    /// Unit-diagonal Hermitian Toeplitz correlation for nominal azimuth `theta`.
    pub fn normalized(&self, theta: f64) -> CMatrix {
        let a = self.n_antennas;
        let mut first_row = vec![C64::new(0.0, 0.0); a];
        for (&delta, &w) in self.offsets.iter().zip(&self.weights) {
            let step = C64::from_polar(1.0, PI * (theta + delta).sin());
            let mut phase = C64::new(w, 0.0);
            for entry in first_row.iter_mut() {
                *entry += phase;
                phase *= step;
            }
        }
        first_row[0] = C64::new(1.0, 0.0);
        CMatrix::from_fn(a, a, |r, c| {
            if c >= r {
                first_row[c - r]
            } else {
                first_row[r - c].conj()
            }
        })
    }
}

/// Steering vector `a_n = exp(-j*pi*n*sin(theta))`, for which
/// `a a^H` is the zero-spread limit of [`LocalScattering::normalized`].
pub fn steering_vector(n_antennas: usize, theta: f64) -> Vec<C64> {
    (0..n_antennas)
        .map(|n| C64::from_polar(1.0, -PI * n as f64 * theta.sin()))
        .collect()
}

/// Physicists' Gauss-Hermite nodes and weights (weight `exp(-x^2)`) via the
/// Golub-Welsch eigenvalue method.
fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    let jacobi = DMatrix::<f64>::from_fn(n, n, |i, j| {
        if i + 1 == j || j + 1 == i {
            (i.max(j) as f64 / 2.0).sqrt()
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(jacobi);
    let sqrt_pi = PI.sqrt();
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|k| {
            let v0 = eig.eigenvectors[(0, k)];
            (eig.eigenvalues[k], sqrt_pi * v0 * v0)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}
