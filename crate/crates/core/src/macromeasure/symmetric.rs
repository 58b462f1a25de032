use super::build::{build_v, build_w};
use super::matrix::{Convention, MatrixKind, MeasureMatrix};
use super::optimize::{ascend, seeded_restart, OptimizeOptions};
use crate::error::{Error, Result};
use crate::linalg::{sym_max_eig, RMat};
use crate::spincore::{DensityMatrix, OperatorKind, SystemDescriptor};

type M3 = nalgebra::Matrix3<f64>;

/// `N·λ_max(D + (N−1)O)` with `D` the on-site block and `O` the block
/// between sites 0 and 1: the best uniform field of a permutation-symmetric
/// matrix. Only a lower bound on the maximum, which can split the sites.
pub fn symmetric_value(m: &MeasureMatrix) -> f64 {
    symmetric_value_from_blocks(m.num_sites(), &m.block(0, 0), &m.block(0, 1.min(m.num_sites() - 1)))
}

pub(crate) fn symmetric_value_from_blocks(n: usize, d: &M3, o: &M3) -> f64 {
    let mut s = if n == 1 { *d } else { d + o * (n - 1) as f64 };
    s = (s + s.transpose()) * 0.5;
    let m = RMat::from_fn(3, 3, |a, b| s[(a, b)]);
    n as f64 * sym_max_eig(&m).0
}

/// Form of a field that repeats `α_g` on `w_g` sites, one block row per group.
fn grouped(w: &[f64], b: &M3, o: &M3) -> RMat {
    RMat::from_fn(3 * w.len(), 3 * w.len(), |r, c| {
        let (g, h, x, y) = (r / 3, c / 3, r % 3, c % 3);
        let pair = w[g] * w[h] * o[(x, y)];
        if g == h {
            pair + w[g] * b[(x, y)]
        } else {
            pair
        }
    })
}

/// Maximum over per-site unit vectors of the permutation-symmetric form with
/// on-site block `d` and pair block `o`, without forming the state.
///
/// Takes the best of the uniform field, every two-group split `n₁ + n₂ = N`
/// and a free ascent of all `N` sites from the best split.
pub(crate) fn symmetric_optimum(n: usize, d: &M3, o: &M3, opts: &OptimizeOptions) -> Result<f64> {
    if opts.restarts == 0 {
        return Err(Error::invalid("at least one restart is needed"));
    }
    let d = (d + d.transpose()) * 0.5;
    let o = (o + o.transpose()) * 0.5;
    let uniform = symmetric_value_from_blocks(n, &d, &o);
    if n == 1 {
        return Ok(uniform);
    }
    let b = d - o;
    let probe = OptimizeOptions { restarts: opts.restarts.min(16), ..*opts };
    let mut best = f64::NEG_INFINITY;
    let mut start = Vec::new();
    for n1 in 1..=n / 2 {
        let m = grouped(&[n1 as f64, (n - n1) as f64], &b, &o);
        for k in 0..probe.restarts {
            let r = seeded_restart(&m, k, &probe);
            if r.value > best {
                best = r.value;
                start = (0..n).map(|i| if i < n1 { r.alpha[0] } else { r.alpha[1] }).collect();
            }
        }
    }
    let polished = ascend(&grouped(&vec![1.0; n], &b, &o), &start, opts).value;
    Ok(uniform.max(best).max(polished))
}

fn swapped_index(desc: &SystemDescriptor, idx: usize, i: usize, j: usize) -> usize {
    let (di, dj) = (desc.digit(idx, i), desc.digit(idx, j));
    idx - di * desc.stride(i) - dj * desc.stride(j) + dj * desc.stride(i) + di * desc.stride(j)
}

/// Checks invariance under every adjacent transposition of sites.
pub fn check_permutation_symmetric(rho: &DensityMatrix, tol: f64) -> Result<()> {
    let desc = rho.descriptor();
    let m = rho.matrix();
    for i in 0..desc.num_sites().saturating_sub(1) {
        let perm: Vec<usize> = (0..desc.dim()).map(|k| swapped_index(desc, k, i, i + 1)).collect();
        for c in 0..desc.dim() {
            for r in 0..desc.dim() {
                if (m[(perm[r], perm[c])] - m[(r, c)]).norm() > tol {
                    return Err(Error::invalid(format!(
                        "state is not symmetric under exchanging sites {i} and {}",
                        i + 1
                    )));
                }
            }
        }
    }
    Ok(())
}

/// ℐ (`V`) or ℱ (`W`) of a permutation-symmetric state from its on-site and
/// pair blocks.
pub fn symmetric_measure(
    rho: &DensityMatrix,
    kind: MatrixKind,
    convention: Convention,
    opts: &OptimizeOptions,
) -> Result<f64> {
    check_permutation_symmetric(rho, 1e-9)?;
    let op = OperatorKind::default_for(rho.descriptor());
    let m = match kind {
        MatrixKind::V => build_v(rho, op, convention)?,
        MatrixKind::W => build_w(rho, op, convention)?,
    };
    let n = m.num_sites();
    symmetric_optimum(n, &m.block(0, 0), &m.block(0, 1.min(n - 1)), opts)
}
