//! Davidson's extension of the Bradley-Terry model to ties.
//!
//! `P(i beats j) = π_i / (π_i + π_j + θ√(π_i π_j))` and
//! `P(tie) = θ√(π_i π_j) / (same)`. The fit maximizes the likelihood by
//! Newton's method on `β = log π` (last item pinned to 0) and `λ = log θ`.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::{sum_statistics, tie_counts, BenchError};
use crate::ufg::PosetSample;

const GRADIENT_TOLERANCE: f64 = 1e-8;
const MAX_ITERATIONS: usize = 200;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DavidsonModel {
    /// Positive, summing to 1.
    pub worths: Vec<f64>,
    /// Tie discrimination; 0 when no ties were observed.
    pub theta: f64,
    pub iterations: usize,
    pub gradient_norm: f64,
}

impl DavidsonModel {
    /// `(P(i beats j), P(tie))`.
    pub fn prob(&self, i: usize, j: usize) -> (f64, f64) {
        davidson_prob(self.worths[i], self.worths[j], self.theta)
    }
}

/// Win and tie probabilities for worths `pi`, `pj`; scale invariant.
pub fn davidson_prob(pi: f64, pj: f64, theta: f64) -> (f64, f64) {
    let tie = theta * (pi * pj).sqrt();
    let denom = pi + pj + tie;
    (pi / denom, tie / denom)
}

struct Pair {
    i: usize,
    j: usize,
    wins: f64,
    losses: f64,
    ties: f64,
}

/// Log-likelihood, gradient and Hessian at `x = (β_0..β_{k-2}, [λ])`.
fn evaluate(
    pairs: &[Pair],
    k: usize,
    with_ties: bool,
    x: &DVector<f64>,
) -> (f64, DVector<f64>, DMatrix<f64>) {
    let dim = x.len();
    let beta = |i: usize| if i + 1 < k { x[i] } else { 0.0 };
    let lambda = if with_ties { x[dim - 1] } else { 0.0 };
    let mut ll = 0.0;
    let mut grad = DVector::zeros(dim);
    let mut hess = DMatrix::zeros(dim, dim);
    for p in pairs {
        // Each outcome contributes a linear predictor and its sparse feature vector.
        let mut outcomes: Vec<(f64, f64, Vec<(usize, f64)>)> = vec![
            (p.wins, beta(p.i), vec![(p.i, 1.0)]),
            (p.losses, beta(p.j), vec![(p.j, 1.0)]),
        ];
        if with_ties {
            outcomes.push((
                p.ties,
                lambda + 0.5 * (beta(p.i) + beta(p.j)),
                vec![(p.i, 0.5), (p.j, 0.5), (k, 1.0)],
            ));
        }
        let to_dim = |c: usize| {
            if c == k {
                Some(dim - 1)
            } else if c + 1 < k {
                Some(c)
            } else {
                None
            }
        };
        let n: f64 = outcomes.iter().map(|o| o.0).sum();
        let top = outcomes
            .iter()
            .map(|o| o.1)
            .fold(f64::NEG_INFINITY, f64::max);
        let lse = top + outcomes.iter().map(|o| (o.1 - top).exp()).sum::<f64>().ln();
        let mut mean = DVector::zeros(dim);
        let mut second = DMatrix::zeros(dim, dim);
        for (count, eta, feats) in &outcomes {
            let prob = (eta - lse).exp();
            ll += count * eta;
            let dense: Vec<(usize, f64)> = feats
                .iter()
                .filter_map(|&(c, v)| to_dim(c).map(|d| (d, v)))
                .collect();
            for &(a, va) in &dense {
                grad[a] += count * va;
                mean[a] += prob * va;
                for &(b, vb) in &dense {
                    second[(a, b)] += prob * va * vb;
                }
            }
        }
        ll -= n * lse;
        grad -= &mean * n;
        hess -= (second - &mean * mean.transpose()) * n;
    }
    (ll, grad, hess)
}

fn strongly_connected(adj: &[Vec<bool>]) -> bool {
    let k = adj.len();
    let reach = |forward: bool| {
        let mut seen = vec![false; k];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for v in 0..k {
                let edge = if forward { adj[u][v] } else { adj[v][u] };
                if edge && !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen.into_iter().all(|s| s)
    };
    reach(true) && reach(false)
}

/// Maximum-likelihood fit from `wins[i][j]` (times `i` beat `j`) and
/// symmetric `ties[i][j]`.
pub fn davidson_fit(wins: &[Vec<u64>], ties: &[Vec<u64>]) -> Result<DavidsonModel, BenchError> {
    let k = wins.len();
    if k < 2 || wins.iter().chain(ties).any(|r| r.len() != k) || ties.len() != k {
        return Err(BenchError::Shape(
            "win and tie matrices must be square with at least two rows".into(),
        ));
    }
    if (0..k).any(|i| (0..k).any(|j| ties[i][j] != ties[j][i])) {
        return Err(BenchError::Shape("tie matrix must be symmetric".into()));
    }
    for i in 0..k {
        if (0..k).all(|j| i == j || wins[i][j] + wins[j][i] == 0) {
            return Err(BenchError::Degenerate(format!(
                "item {i} has no strict comparison"
            )));
        }
    }
    // A finite maximum needs every item to gain credit against every other, possibly indirectly.
    let adj: Vec<Vec<bool>> = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| i != j && (wins[i][j] > 0 || ties[i][j] > 0))
                .collect()
        })
        .collect();
    if !strongly_connected(&adj) {
        return Err(BenchError::Degenerate(
            "comparison graph is not strongly connected".into(),
        ));
    }
    let with_ties = (0..k).any(|i| (0..k).any(|j| ties[i][j] > 0));
    let pairs: Vec<Pair> = (0..k)
        .flat_map(|i| (i + 1..k).map(move |j| (i, j)))
        .map(|(i, j)| Pair {
            i,
            j,
            wins: wins[i][j] as f64,
            losses: wins[j][i] as f64,
            ties: ties[i][j] as f64,
        })
        .filter(|p| p.wins + p.losses + p.ties > 0.0)
        .collect();
    let dim = k - 1 + usize::from(with_ties);
    let mut x = DVector::zeros(dim);
    let (mut ll, mut grad, mut hess) = evaluate(&pairs, k, with_ties, &x);
    let mut iterations = 0;
    while grad.norm() > GRADIENT_TOLERANCE {
        if iterations == MAX_ITERATIONS {
            return Err(BenchError::Degenerate(format!(
                "no convergence, gradient norm {:.3e}",
                grad.norm()
            )));
        }
        iterations += 1;
        let step = (-&hess)
            .cholesky()
            .map(|c| c.solve(&grad))
            .ok_or_else(|| BenchError::Degenerate("information matrix is singular".into()))?;
        let mut t = 1.0;
        loop {
            let cand = &x + &step * t;
            let (cl, cg, ch) = evaluate(&pairs, k, with_ties, &cand);
            // Accept any non-decrease: near the optimum rounding makes gains vanish.
            if cl >= ll - 1e-12 * ll.abs() || t < 1e-10 {
                x = cand;
                (ll, grad, hess) = (cl, cg, ch);
                break;
            }
            t *= 0.5;
        }
    }
    let beta: Vec<f64> = (0..k).map(|i| if i + 1 < k { x[i] } else { 0.0 }).collect();
    let top = beta.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let raw: Vec<f64> = beta.iter().map(|b| (b - top).exp()).collect();
    let total: f64 = raw.iter().sum();
    Ok(DavidsonModel {
        worths: raw.iter().map(|w| w / total).collect(),
        theta: if with_ties { x[dim - 1].exp() } else { 0.0 },
        iterations,
        gradient_norm: grad.norm(),
    })
}

/// Fit on a poset sample: `(a, b)` in a poset is a win of `a`, incomparable pairs are ties.
pub fn davidson_fit_sample(sample: &PosetSample) -> Result<DavidsonModel, BenchError> {
    let stats = sum_statistics(sample);
    let mut wins = stats.matrix;
    for (i, row) in wins.iter_mut().enumerate() {
        row[i] = 0;
    }
    davidson_fit(&wins, &tie_counts(sample))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_counts_give_equal_worths() {
        let wins = vec![vec![0, 5, 5], vec![5, 0, 5], vec![5, 5, 0]];
        let ties = vec![vec![0, 2, 2], vec![2, 0, 2], vec![2, 2, 0]];
        let m = davidson_fit(&wins, &ties).unwrap();
        for w in &m.worths {
            assert!((w - 1.0 / 3.0).abs() < 1e-12);
        }
        assert!(m.gradient_norm <= GRADIENT_TOLERANCE);
    }

    #[test]
    fn never_winning_item_is_degenerate() {
        let wins = vec![vec![0, 3], vec![0, 0]];
        let ties = vec![vec![0, 0], vec![0, 0]];
        assert!(matches!(
            davidson_fit(&wins, &ties),
            Err(BenchError::Degenerate(_))
        ));
    }

    #[test]
    fn probability_limits() {
        assert_eq!(davidson_prob(0.5, 0.5, 0.0), (0.5, 0.0));
        let (w, t) = davidson_prob(1.0, 1e-12, 0.0);
        assert!(w > 1.0 - 1e-11 && t == 0.0);
    }
}
