use minilp::{ComparisonOp, OptimizationDirection, Problem};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{ExtremalDecomposition, ExtremalFamily, Rank1Povm, MIXTURE_TOL};
use crate::error::{Error, Result};
use crate::linalg::{ldp, lstsq};

/// Rule selecting one mixture when several reproduce the target.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TieBreak {
    /// Lexicographically smallest `(μ_1, μ_2, …)`.
    #[default]
    LexMin,
    /// Smallest Euclidean norm of `μ`.
    MinNorm,
}

/// Mixture weights with the default [`TieBreak::LexMin`] rule.
pub fn mixture_weights(target: &Rank1Povm, family: &ExtremalFamily) -> Result<ExtremalDecomposition> {
    mixture_weights_with(target, family, TieBreak::LexMin)
}

/// Finds `μ ≥ 0`, `Σμ = 1` with `Σ_λ μ_λ s_a^λ = s_a` for every outcome `a`.
/// Target outcome `a` must use the family's projector `a`.
pub fn mixture_weights_with(
    target: &Rank1Povm,
    family: &ExtremalFamily,
    tie: TieBreak,
) -> Result<ExtremalDecomposition> {
    let k = family.projectors().len();
    if target.len() != k {
        return Err(Error::DimensionMismatch { expected: k, found: target.len() });
    }
    for (a, t) in target.terms().iter().enumerate() {
        if t.weight > 1e-12 && !t.projector.same_ray(&family.projectors()[a], 1e-8) {
            return Err(Error::DecompositionInfeasible(format!(
                "outcome {a} uses a projector outside the family"
            )));
        }
    }
    let l = family.len();
    if l == 0 {
        return Err(Error::DecompositionInfeasible("family has no extremal measurement".into()));
    }
    let (a, b) = system(target, family);
    let mu = match tie {
        TieBreak::LexMin => lexmin(&a, &b),
        TieBreak::MinNorm => min_norm(&a, &b),
    }
    .ok_or_else(|| Error::DecompositionInfeasible("no convex mixture reproduces the target".into()))?;
    let residual = (&a * DVector::from_column_slice(&mu) - &b).amax();
    if residual > MIXTURE_TOL {
        return Err(Error::DecompositionInfeasible(format!("residual {residual:e}")));
    }
    Ok(ExtremalDecomposition { mu, extremals: family.extremals().to_vec(), residual })
}

/// Rows: one per outcome, then normalisation.
fn system(target: &Rank1Povm, family: &ExtremalFamily) -> (DMatrix<f64>, DVector<f64>) {
    let k = target.len();
    let l = family.len();
    let mut a = DMatrix::zeros(k + 1, l);
    let mut b = DVector::zeros(k + 1);
    for (lam, e) in family.extremals().iter().enumerate() {
        for (&s, &w) in e.support.iter().zip(&e.weights) {
            a[(s, lam)] = w;
        }
        a[(k, lam)] = 1.0;
    }
    for (i, t) in target.terms().iter().enumerate() {
        b[i] = t.weight;
    }
    b[k] = 1.0;
    (a, b)
}

fn lp_min(a: &DMatrix<f64>, b: &DVector<f64>, objective: usize, caps: &[f64]) -> Option<f64> {
    let mut p = Problem::new(OptimizationDirection::Minimize);
    let vars: Vec<_> = (0..a.ncols())
        .map(|j| {
            let cap = caps.get(j).copied().unwrap_or(f64::INFINITY);
            p.add_var(if j == objective { 1.0 } else { 0.0 }, (0.0, cap))
        })
        .collect();
    for i in 0..a.nrows() {
        let expr: Vec<_> = (0..a.ncols())
            .filter(|&j| a[(i, j)] != 0.0)
            .map(|j| (vars[j], a[(i, j)]))
            .collect();
        p.add_constraint(expr, ComparisonOp::Eq, b[i]);
    }
    p.solve().ok().map(|s| *s.var_value(vars[objective]))
}

/// Sequence of LPs fixing `μ_1`, then `μ_2`, …; the resulting vertex is
/// re-solved exactly on its support.
fn lexmin(a: &DMatrix<f64>, b: &DVector<f64>) -> Option<Vec<f64>> {
    let l = a.ncols();
    let mut caps = Vec::with_capacity(l);
    for j in 0..l {
        let v = lp_min(a, b, j, &caps)?;
        caps.push(v.max(0.0) + 1e-11);
    }
    let mu: Vec<f64> = caps.iter().map(|c| (c - 1e-11).max(0.0)).collect();
    Some(polish(a, b, mu))
}

fn min_norm(a: &DMatrix<f64>, b: &DVector<f64>) -> Option<Vec<f64>> {
    let (m, l) = (a.nrows(), a.ncols());
    // a μ ≥ b, −a μ ≥ −b, μ ≥ 0
    let mut g = DMatrix::zeros(2 * m + l, l);
    let mut h = DVector::zeros(2 * m + l);
    for i in 0..m {
        for j in 0..l {
            g[(i, j)] = a[(i, j)];
            g[(m + i, j)] = -a[(i, j)];
        }
        h[i] = b[i];
        h[m + i] = -b[i];
    }
    for j in 0..l {
        g[(2 * m + j, j)] = 1.0;
    }
    let x = ldp(&g, &h)?;
    Some(polish(a, b, x.iter().map(|v| v.max(0.0)).collect()))
}

/// Exact minimum-norm re-solve restricted to the support of `mu`; kept only
/// if it stays non-negative and improves the residual.
fn polish(a: &DMatrix<f64>, b: &DVector<f64>, mu: Vec<f64>) -> Vec<f64> {
    let support: Vec<usize> = (0..mu.len()).filter(|&j| mu[j] > 1e-10).collect();
    let sub = DMatrix::from_fn(a.nrows(), support.len(), |i, j| a[(i, support[j])]);
    let (x, r) = lstsq(&sub, b);
    let before = (a * DVector::from_column_slice(&mu) - b).norm();
    if r <= before && x.iter().all(|&v| v >= -1e-13) {
        let mut out = vec![0.0; mu.len()];
        for (k, &j) in support.iter().enumerate() {
            out[j] = x[k].max(0.0);
        }
        out
    } else {
        mu
    }
}
