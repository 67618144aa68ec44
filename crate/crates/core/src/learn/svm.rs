//! Soft-margin SVM trained by SMO on the dual problem.

use serde::{Deserialize, Serialize};

use super::dataset::Dataset;
use super::LearnError;

pub const DEFAULT_TOLERANCE: f64 = 1e-3;
/// Iteration cap, in multiples of the training-set size.
pub const MAX_PASSES: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kernel {
    Linear,
    Rbf,
    Poly,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SvmParams {
    pub c: f64,
    pub gamma: f64,
    pub kernel: Kernel,
    /// Polynomial degree; ignored by the other kernels.
    pub degree: u32,
    /// Stop once the maximal KKT violation drops below this.
    #[serde(default = "default_tol")]
    pub tol: f64,
}

fn default_tol() -> f64 {
    DEFAULT_TOLERANCE
}

impl SvmParams {
    pub fn new(kernel: Kernel, c: f64, gamma: f64, degree: u32) -> Self {
        SvmParams {
            c,
            gamma,
            kernel,
            degree,
            tol: DEFAULT_TOLERANCE,
        }
    }

    pub fn kernel_value(&self, a: &[f64], b: &[f64]) -> f64 {
        match self.kernel {
            Kernel::Linear => dot(a, b),
            Kernel::Rbf => {
                let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
                (-self.gamma * d2).exp()
            }
            Kernel::Poly => (self.gamma * dot(a, b)).powi(self.degree as i32),
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmModel {
    pub params: SvmParams,
    pub support_vectors: Vec<Vec<f64>>,
    /// αᵢ yᵢ for each support vector, yᵢ ∈ {−1, +1}.
    pub dual_coef: Vec<f64>,
    pub bias: f64,
    /// Maximal KKT violation at exit.
    pub kkt_violation: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl SvmModel {
    /// f(x) = Σ αᵢ yᵢ K(xᵢ, x) + b
    pub fn decision(&self, x: &[f64]) -> f64 {
        self.support_vectors
            .iter()
            .zip(&self.dual_coef)
            .map(|(sv, c)| c * self.params.kernel_value(sv, x))
            .sum::<f64>()
            + self.bias
    }

    pub fn predict(&self, x: &[f64]) -> u8 {
        u8::from(self.decision(x) > 0.0)
    }
}

/// Trained SVM plus the full dual vector, for inspection in tests.
pub struct SvmSolution {
    pub model: SvmModel,
    pub alpha: Vec<f64>,
}

pub fn svm_train(data: &Dataset, params: &SvmParams) -> Result<SvmModel, LearnError> {
    Ok(svm_solve(data, params)?.model)
}

/// SMO with maximal-violating-pair working-set selection.
pub fn svm_solve(data: &Dataset, params: &SvmParams) -> Result<SvmSolution, LearnError> {
    let gram = gram_matrix(&data.x, params);
    svm_solve_gram(data, params, &gram)
}

/// Row-major n × n kernel matrix. Depends on the kernel, gamma and degree
/// only, so it can be shared across values of C.
pub fn gram_matrix(x: &[Vec<f64>], params: &SvmParams) -> Vec<f64> {
    let n = x.len();
    let mut k = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let v = params.kernel_value(&x[i], &x[j]);
            k[i * n + j] = v;
            k[j * n + i] = v;
        }
    }
    k
}

/// As [`svm_solve`] with a precomputed [`gram_matrix`] of `data.x`.
pub fn svm_solve_gram(data: &Dataset, params: &SvmParams, k: &[f64]) -> Result<SvmSolution, LearnError> {
    data.require_both_classes()?;
    if !(params.c > 0.0) || !(params.gamma > 0.0) || params.tol <= 0.0 {
        return Err(LearnError::InvalidParams(format!("{params:?}")));
    }
    let n = data.len();
    if k.len() != n * n {
        return Err(LearnError::Shape(format!("gram matrix has {} entries for {n} rows", k.len())));
    }
    let c = params.c;
    let y: Vec<f64> = data.y.iter().map(|&l| if l == 1 { 1.0 } else { -1.0 }).collect();
    if k.iter().any(|v| !v.is_finite()) {
        return Err(LearnError::NonFinite);
    }
    let q = |i: usize, j: usize| y[i] * y[j] * k[i * n + j];

    let mut alpha = vec![0.0; n];
    let mut grad = vec![-1.0; n];
    let max_iter = MAX_PASSES.saturating_mul(n.max(1));
    let mut iterations = 0;
    let mut violation;
    loop {
        // i maximises −y G over I_up, j minimises it over I_low
        let mut gmax = f64::NEG_INFINITY;
        let mut gmin = f64::INFINITY;
        let (mut bi, mut bj) = (usize::MAX, usize::MAX);
        for t in 0..n {
            let v = -y[t] * grad[t];
            let up = (y[t] > 0.0 && alpha[t] < c) || (y[t] < 0.0 && alpha[t] > 0.0);
            let low = (y[t] > 0.0 && alpha[t] > 0.0) || (y[t] < 0.0 && alpha[t] < c);
            if up && v > gmax {
                gmax = v;
                bi = t;
            }
            if low && v < gmin {
                gmin = v;
                bj = t;
            }
        }
        violation = gmax - gmin;
        if violation < params.tol || bi == usize::MAX || bj == usize::MAX || iterations >= max_iter {
            break;
        }
        iterations += 1;
        let (i, j) = (bi, bj);
        let (old_i, old_j) = (alpha[i], alpha[j]);
        let quad = {
            let v = k[i * n + i] + k[j * n + j] - 2.0 * k[i * n + j];
            if v > 0.0 { v } else { 1e-12 }
        };
        if y[i] != y[j] {
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > 0.0 {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if alpha[j] > c {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > c {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > c {
                if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }
        let (di, dj) = (alpha[i] - old_i, alpha[j] - old_j);
        for t in 0..n {
            grad[t] += q(t, i) * di + q(t, j) * dj;
        }
    }

    // offset from free vectors, or the midpoint of the feasible interval
    let mut free_sum = 0.0;
    let mut free_n = 0usize;
    let mut ub = f64::INFINITY;
    let mut lb = f64::NEG_INFINITY;
    for t in 0..n {
        let yg = y[t] * grad[t];
        if alpha[t] >= c {
            if y[t] < 0.0 { ub = ub.min(yg) } else { lb = lb.max(yg) }
        } else if alpha[t] <= 0.0 {
            if y[t] > 0.0 { ub = ub.min(yg) } else { lb = lb.max(yg) }
        } else {
            free_n += 1;
            free_sum += yg;
        }
    }
    let rho = if free_n > 0 { free_sum / free_n as f64 } else { (ub + lb) / 2.0 };

    let mut support_vectors = Vec::new();
    let mut dual_coef = Vec::new();
    for t in 0..n {
        if alpha[t] > 0.0 {
            support_vectors.push(data.x[t].clone());
            dual_coef.push(alpha[t] * y[t]);
        }
    }
    Ok(SvmSolution {
        model: SvmModel {
            params: *params,
            support_vectors,
            dual_coef,
            bias: -rho,
            kkt_violation: violation,
            iterations,
            converged: violation < params.tol,
        },
        alpha,
    })
}
