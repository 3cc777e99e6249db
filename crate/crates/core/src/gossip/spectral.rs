//! The expected one-step averaging operator and its second eigenvalue.

use serde::{Deserialize, Serialize};

use crate::gossip::GossipNetwork;

/// Off-diagonal Frobenius norm at which Jacobi sweeps stop.
pub const JACOBI_TOLERANCE: f64 = 1e-12;
const MAX_SWEEPS: usize = 100;

/// `W = Σ_{{i,i'}} P_{ii'} (I − ½ (eᵢ − eᵢ')(eᵢ − eᵢ')ᵀ)`, stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixingMatrix {
    m: usize,
    w: Vec<f64>,
}

impl MixingMatrix {
    pub fn build(network: &GossipNetwork) -> Self {
        let m = network.m();
        let mut w = vec![0.0; m * m];
        for k in 0..m {
            w[k * m + k] = 1.0;
        }
        for (&(i, j), &p) in network.edges().iter().zip(network.probs()) {
            let h = 0.5 * p;
            w[i * m + i] -= h;
            w[j * m + j] -= h;
            w[i * m + j] += h;
            w[j * m + i] += h;
        }
        Self { m, w }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.w[i * self.m + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.w
    }

    pub fn row_sums(&self) -> Vec<f64> {
        self.w.chunks_exact(self.m).map(|r| r.iter().sum()).collect()
    }

    pub fn column_sums(&self) -> Vec<f64> {
        (0..self.m).map(|j| (0..self.m).map(|i| self.get(i, j)).sum()).collect()
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        (0..self.m).all(|i| (0..i).all(|j| (self.get(i, j) - self.get(j, i)).abs() <= tol))
    }

    /// All eigenvalues, largest first.
    pub fn eigenvalues(&self) -> Vec<f64> {
        symmetric_eigenvalues(&self.w, self.m)
    }

    /// Second largest eigenvalue; `1` exactly when the network is
    /// disconnected, up to rounding.
    pub fn lambda2(&self) -> f64 {
        self.eigenvalues().get(1).copied().unwrap_or(0.0)
    }
}

/// Eigenvalues of a symmetric `m × m` row-major matrix by cyclic Jacobi
/// rotations, sorted in descending order.
pub fn symmetric_eigenvalues(matrix: &[f64], m: usize) -> Vec<f64> {
    assert_eq!(matrix.len(), m * m, "matrix must be m×m");
    let mut a = matrix.to_vec();
    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a, m) < JACOBI_TOLERANCE {
            break;
        }
        for p in 0..m {
            for q in p + 1..m {
                rotate(&mut a, m, p, q);
            }
        }
    }
    let mut eig: Vec<f64> = (0..m).map(|k| a[k * m + k]).collect();
    eig.sort_by(|x, y| y.total_cmp(x));
    eig
}

fn off_diagonal_norm(a: &[f64], m: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..m {
        for j in 0..m {
            if i != j {
                s += a[i * m + j] * a[i * m + j];
            }
        }
    }
    s.sqrt()
}

/// Zeroes `a[p][q]` with the rotation `A ← Jᵀ A J`.
fn rotate(a: &mut [f64], m: usize, p: usize, q: usize) {
    let apq = a[p * m + q];
    if apq == 0.0 {
        return;
    }
    let (app, aqq) = (a[p * m + p], a[q * m + q]);
    let tau = (aqq - app) / (2.0 * apq);
    let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    for k in 0..m {
        let (akp, akq) = (a[k * m + p], a[k * m + q]);
        a[k * m + p] = c * akp - s * akq;
        a[k * m + q] = s * akp + c * akq;
    }
    for k in 0..m {
        let (apk, aqk) = (a[p * m + k], a[q * m + k]);
        a[p * m + k] = c * apk - s * aqk;
        a[q * m + k] = s * apk + c * aqk;
    }
    a[p * m + q] = 0.0;
    a[q * m + p] = 0.0;
}
