use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::ExtremalFamily;
use crate::error::Result;
use crate::linalg::lstsq;
use crate::qmath::measure::{check_product_completeness, ProductRank1Effect};
use crate::qmath::ComplexMatrix;

const MAX_SUBSETS: usize = 1 << 16;

/// Sub-family of extremals whose mixture weights are linear in the sender's
/// state: `μ_λ(ψ) = Tr[ψ N_λ]` with `N_λ ⪰ 0`. The sender then measures
/// `{N_λ}` and sends the outcome.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearReduction {
    /// Indices into the family's extremals.
    pub subset: Vec<usize>,
    pub operators: Vec<ComplexMatrix>,
    pub cost_bits: u32,
}

pub(crate) fn bits_for(n: usize) -> u32 {
    if n <= 1 {
        0
    } else {
        usize::BITS - (n - 1).leading_zeros()
    }
}

/// Searches sub-families in order of size for operators solving
/// `Σ_λ s_a^λ N_λ = p_a P_{u_a}` for every outcome `a`. The first positive
/// semidefinite solution found is returned.
pub fn linear_reduction(
    joint: &[ProductRank1Effect],
    family: &ExtremalFamily,
) -> Result<Option<LinearReduction>> {
    check_product_completeness(joint)?;
    let da = joint[0].factors[0].dim();
    let k = joint.len();
    let targets: Vec<Vec<f64>> = joint
        .iter()
        .map(|e| e.factors[0].projector().scale(e.weight).hermitian_coords())
        .collect();
    let l = family.len();
    let mut tried = 0;
    for size in 1..=l {
        for subset in combinations(l, size) {
            tried += 1;
            if tried > MAX_SUBSETS {
                return Ok(None);
            }
            let s = DMatrix::from_fn(k, size, |a, j| family.extremals()[subset[j]].weight_of(a));
            let mut coords = vec![vec![0.0; da * da]; size];
            let mut ok = true;
            for c in 0..da * da {
                let t = DVector::from_fn(k, |a, _| targets[a][c]);
                let (x, r) = lstsq(&s, &t);
                if r > 1e-9 {
                    ok = false;
                    break;
                }
                for j in 0..size {
                    coords[j][c] = x[j];
                }
            }
            if !ok {
                continue;
            }
            let operators: Vec<ComplexMatrix> = coords
                .iter()
                .map(|v| ComplexMatrix::from_hermitian_coords(da, v))
                .collect();
            if operators.iter().all(|n| n.hermitian_eigenvalues()[0] >= -1e-10) {
                return Ok(Some(LinearReduction { cost_bits: bits_for(size), subset, operators }));
            }
        }
    }
    Ok(None)
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        let Some(i) = (0..k).rev().find(|&i| cur[i] < n - k + i) else {
            return out;
        };
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bit_counts() {
        assert_eq!(bits_for(1), 0);
        assert_eq!(bits_for(2), 1);
        assert_eq!(bits_for(4), 2);
        assert_eq!(bits_for(5), 3);
    }

    #[test]
    fn combinations_in_lexicographic_order() {
        assert_eq!(
            combinations(4, 2),
            vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]
        );
        assert_eq!(combinations(3, 3), vec![vec![0, 1, 2]]);
        assert_eq!(combinations(3, 1).len(), 3);
    }
}
