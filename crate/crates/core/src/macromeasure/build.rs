//! Construction of the `V` (ℐ) and `W` (ℱ) matrices.
//!
//! Traces are taken in the native local basis (Pauli for spin 1/2, spin
//! matrices otherwise) and rescaled to spin units, so the matrices do not
//! depend on the [`OperatorKind`] label.

use super::matrix::{Convention, MatrixKind, MeasureMatrix};
use super::spectral::SpectralDecomposition;
use crate::error::Result;
use crate::linalg::{self, dotc, C64, CMat, Op, RMat, I, ONE, ZERO};
use crate::spincore::{site_basis, DensityMatrix, OperatorKind, SiteOp, SystemDescriptor};

/// Native basis and the factor turning its squared traces into spin units.
fn native(desc: &SystemDescriptor) -> (OperatorKind, f64) {
    let k = OperatorKind::default_for(desc);
    (k, 1.0 / (k.scale() * k.scale()))
}

fn site_ops(desc: &SystemDescriptor) -> Result<Vec<SiteOp>> {
    let (k, _) = native(desc);
    let basis = site_basis(desc, k)?;
    let mut ops = Vec::with_capacity(3 * desc.num_sites());
    for i in 0..desc.num_sites() {
        for b in &basis {
            ops.push(SiteOp::new(desc, i, b.clone())?);
        }
    }
    Ok(ops)
}

fn v_scale(desc: &SystemDescriptor, convention: Convention, purity: f64) -> f64 {
    let (_, unit) = native(desc);
    convention.factor() * unit / (desc.num_sites() as f64 * desc.spin() * purity)
}

fn w_scale(desc: &SystemDescriptor, convention: Convention) -> f64 {
    let (_, unit) = native(desc);
    convention.factor() * unit / (2.0 * desc.num_sites() as f64 * desc.spin())
}

// Pauli phase of (ρσ_a)_{u,v} = ρ_{u, v⊕f_a} φ_a(v_i), indexed [a][bit].
const PHASE: [[C64; 2]; 3] = [
    [ONE, ONE],
    [I, C64::new(0.0, -1.0)],
    [ONE, C64::new(-1.0, 0.0)],
];
// whether σ_a flips the bit
const FLIPS: [usize; 3] = [1, 1, 0];

/// `V = c·Re(Tr[ρ²XY] − Tr[ρXρY])`.
pub fn build_v(rho: &DensityMatrix, kind: OperatorKind, convention: Convention) -> Result<MeasureMatrix> {
    let desc = *rho.descriptor();
    kind.check(&desc)?;
    convention.check(&desc)?;
    let t = if desc.is_qubit() {
        v_traces_qubit(rho.matrix(), desc.num_sites())
    } else {
        v_traces_generic(rho.matrix(), &desc)?
    };
    let s = v_scale(&desc, convention, rho.purity());
    Ok(MeasureMatrix::new(MatrixKind::V, desc, kind, convention, t * s))
}

/// Real part of `Tr[ρ²σ_a^iσ_b^j] − Tr[ρσ_a^iρσ_b^j]` for all site pairs,
/// `O(N² D²)` without forming any `D×D` product.
pub(crate) fn v_traces_qubit(rho: &CMat, n: usize) -> RMat {
    let d = 1usize << n;
    let data = rho.as_slice();
    let col = |c: usize| &data[c * d..(c + 1) * d];
    let bit = |i: usize| 1usize << (n - 1 - i);

    // (ρ²)_{p, p⊕m} for m = 0, single bits and bit pairs
    let mut masks: Vec<usize> = vec![0];
    masks.extend((0..n).map(bit));
    for i in 0..n {
        for j in i + 1..n {
            masks.push(bit(i) | bit(j));
        }
    }
    let mask_index = |m: usize| masks.iter().position(|&x| x == m).unwrap();
    let mut e: Vec<Vec<C64>> = Vec::with_capacity(masks.len());
    for &m in &masks {
        let mut row = vec![ZERO; d];
        for p in 0..d {
            let q = p ^ m;
            row[p] = if q < p { row[q].conj() } else { dotc(col(p), col(q)) };
        }
        e.push(row);
    }

    let npairs = n * (n + 1) / 2;
    let pair = |i: usize, j: usize| i * n - i * (i + 1) / 2 + j;
    // acc2[pair][fa][fb][v_i][u_j]
    let mut acc2 = vec![[[[[ZERO; 2]; 2]; 2]; 2]; npairs];
    for u in 0..d {
        let cu = col(u);
        for i in 0..n {
            let bi = bit(i);
            let q = split_sums(cu, cu, bi);
            for j in i..n {
                let bj = bit(j);
                let uj = (u & bj != 0) as usize;
                let r = split_sums(cu, col(u ^ bj), bi);
                let a = &mut acc2[pair(i, j)];
                for fa in 0..2 {
                    for c in 0..2 {
                        a[fa][0][c][uj] += q[fa][c];
                        a[fa][1][c][uj] += r[fa][c];
                    }
                }
            }
        }
    }

    let mut t = RMat::zeros(3 * n, 3 * n);
    for i in 0..n {
        for j in i..n {
            let (bi, bj) = (bit(i), bit(j));
            // acc1[fa][fb][v_i][v_j]
            let mut acc1 = [[[[ZERO; 2]; 2]; 2]; 2];
            for fa in 0..2 {
                for fb in 0..2 {
                    let m = (fa * bi) ^ (fb * bj);
                    let row = &e[mask_index(m)];
                    for v in 0..d {
                        let ci = (v & bi != 0) as usize;
                        let cj = (v & bj != 0) as usize;
                        acc1[fa][fb][ci][cj] += row[v ^ (fa * bi)];
                    }
                }
            }
            let a2 = &acc2[pair(i, j)];
            for a in 0..3 {
                for b in 0..3 {
                    let (fa, fb) = (FLIPS[a], FLIPS[b]);
                    let mut t1 = ZERO;
                    let mut t2 = ZERO;
                    for c in 0..2 {
                        for dd in 0..2 {
                            t1 += PHASE[a][c].conj() * PHASE[b][dd] * acc1[fa][fb][c][dd];
                            t2 += PHASE[a][c] * PHASE[b][dd] * a2[fa][fb][c][dd];
                        }
                    }
                    let v = (t1 - t2).re;
                    t[(3 * i + a, 3 * j + b)] = v;
                    t[(3 * j + b, 3 * i + a)] = v;
                }
            }
        }
    }
    t
}

/// `out[fa][c] = Σ_{v: v_i = c} conj(x[v ⊕ fa·b]) y[v]` for a single bit `b`.
fn split_sums(x: &[C64], y: &[C64], b: usize) -> [[C64; 2]; 2] {
    let mut out = [[ZERO; 2]; 2];
    let d = x.len();
    let mut start = 0;
    while start < d {
        let lo = start..start + b;
        let hi = start + b..start + 2 * b;
        out[0][0] += dotc(&x[lo.clone()], &y[lo.clone()]);
        out[0][1] += dotc(&x[hi.clone()], &y[hi.clone()]);
        out[1][0] += dotc(&x[hi.clone()], &y[lo.clone()]);
        out[1][1] += dotc(&x[lo], &y[hi]);
        start += 2 * b;
    }
    out
}

fn v_traces_generic(rho: &CMat, desc: &SystemDescriptor) -> Result<RMat> {
    let ops = site_ops(desc)?;
    let m = ops.len();
    let r: Vec<CMat> = ops.iter().map(|op| op.right_mul(rho)).collect();
    let rt: Vec<CMat> = r.iter().map(|x| x.transpose()).collect();
    let mut t = RMat::zeros(m, m);
    for x in 0..m {
        for y in x..m {
            let t1 = dotc(r[x].as_slice(), r[y].as_slice());
            let t2: C64 = r[x].iter().zip(rt[y].iter()).map(|(a, b)| a * b).sum();
            let v = (t1 - t2).re;
            t[(x, y)] = v;
            t[(y, x)] = v;
        }
    }
    Ok(t)
}

/// `Re Tr[ρ{X,Y}]` for all native operator pairs of a dense state.
fn anticommutator_traces(rho: &CMat, desc: &SystemDescriptor) -> Result<RMat> {
    let n = desc.num_sites();
    let mut t = RMat::zeros(3 * n, 3 * n);
    if desc.is_qubit() {
        let d = desc.dim();
        let bit = |i: usize| 1usize << (n - 1 - i);
        for i in 0..n {
            for j in i..n {
                for a in 0..3 {
                    for b in 0..3 {
                        let (fa, fb) = (FLIPS[a] * bit(i), FLIPS[b] * bit(j));
                        let mut s = ZERO;
                        for v in 0..d {
                            let x = v ^ fb;
                            let ph = PHASE[a][(x & bit(i) != 0) as usize] * PHASE[b][(v & bit(j) != 0) as usize];
                            s += rho[(v, v ^ fa ^ fb)] * ph;
                        }
                        let val = 2.0 * s.re;
                        t[(3 * i + a, 3 * j + b)] = val;
                        t[(3 * j + b, 3 * i + a)] = val;
                    }
                }
            }
        }
    } else {
        let ops = site_ops(desc)?;
        for (x, ox) in ops.iter().enumerate() {
            let rx = ox.right_mul(rho);
            for (y, oy) in ops.iter().enumerate().skip(x) {
                let val = 2.0 * oy.trace_right(&rx).re;
                t[(x, y)] = val;
                t[(y, x)] = val;
            }
        }
    }
    Ok(t)
}

/// `K_kl = π_kπ_l/(π_k+π_l)`, zero when `π_k+π_l ≤ 1e-14`.
fn k_weights(p: &[f64]) -> RMat {
    RMat::from_fn(p.len(), p.len(), |k, l| {
        let s = p[k] + p[l];
        if s <= 1e-14 {
            0.0
        } else {
            p[k] * p[l] / s
        }
    })
}

/// Real part of `Σ_kl w_kl A^X_kl conj(A^Y_kl)` for nonnegative weights, from
/// columns `vec(√w ∘ A^X)` via one Hermitian rank-k update.
fn weighted_gram(stack: &CMat) -> RMat {
    linalg::gram_cols(stack).map(|z| z.re)
}

/// Writes `vec(√w ∘ A)` into `stack[:, col]`; `A` holds rows `row0..` of the
/// full `r×r` matrix.
fn push_weighted(stack: &mut CMat, col: usize, a: &CMat, sqrt_w: &RMat, row0: usize) {
    let mut dst = stack.column_mut(col);
    let rows = a.nrows();
    for l in 0..a.ncols() {
        for k in 0..rows {
            dst[l * rows + k] = a[(k, l)] * sqrt_w[(row0 + k, l)];
        }
    }
}

// Upper bound on the weighted operator stack; larger problems are chunked by rows.
const STACK_BYTES: usize = 512 << 20;

fn split_rows(u: &CMat, b: usize) -> (CMat, CMat) {
    let d = u.nrows();
    let rows0: Vec<usize> = (0..d).filter(|v| v & b == 0).collect();
    let u0 = CMat::from_fn(d / 2, u.ncols(), |k, c| u[(rows0[k], c)]);
    let u1 = CMat::from_fn(d / 2, u.ncols(), |k, c| u[(rows0[k] | b, c)]);
    (u0, u1)
}

/// `Re Σ_kl K_kl A^X_kl conj(A^Y_kl)` over all Pauli operators, with
/// `A^X = U†XU` formed from half-size products (`U0`/`U1` hold the rows whose
/// bit `i` is 0/1).
fn pauli_gram_qubit(u: &CMat, sqrt_k: &RMat, n: usize, budget: usize) -> RMat {
    let r = u.ncols();
    let cols = 3 * n;
    let chunk = (budget / (16 * r * cols)).max(1);
    if chunk >= r {
        let mut stack = CMat::zeros(r * r, cols);
        for i in 0..n {
            let (u0, u1) = split_rows(u, 1 << (n - 1 - i));
            let g0 = linalg::gram_cols(&u0);
            let c = linalg::gemm(&u0, Op::H, &u1, Op::N);
            let ch = c.adjoint();
            push_weighted(&mut stack, 3 * i, &(&c + &ch), sqrt_k, 0);
            push_weighted(&mut stack, 3 * i + 1, &((&ch - &c) * I), sqrt_k, 0);
            let az = g0 * C64::new(2.0, 0.0) - CMat::identity(r, r);
            push_weighted(&mut stack, 3 * i + 2, &az, sqrt_k, 0);
        }
        return weighted_gram(&stack);
    }
    let mut g = RMat::zeros(cols, cols);
    for k0 in (0..r).step_by(chunk) {
        let kc = chunk.min(r - k0);
        let mut stack = CMat::zeros(kc * r, cols);
        for i in 0..n {
            let (u0, u1) = split_rows(u, 1 << (n - 1 - i));
            let u0c = u0.columns(k0, kc).into_owned();
            let u1c = u1.columns(k0, kc).into_owned();
            // rows k0.. of U0†U0, U0†U1 and U1†U0
            let g0 = linalg::gemm(&u0c, Op::H, &u0, Op::N);
            let c1 = linalg::gemm(&u0c, Op::H, &u1, Op::N);
            let c2 = linalg::gemm(&u1c, Op::H, &u0, Op::N);
            push_weighted(&mut stack, 3 * i, &(&c1 + &c2), sqrt_k, k0);
            push_weighted(&mut stack, 3 * i + 1, &((&c2 - &c1) * I), sqrt_k, k0);
            let mut az = g0 * C64::new(2.0, 0.0);
            for k in 0..kc {
                az[(k, k0 + k)] -= ONE;
            }
            push_weighted(&mut stack, 3 * i + 2, &az, sqrt_k, k0);
        }
        g += weighted_gram(&stack);
    }
    g
}

/// `W = c·(Re Tr[ρ{X,Y}] − 4 Re Σ K_kl X_kl Y_lk)`, which equals
/// `c·Re Σ_kl (π_k−π_l)²/(π_k+π_l) X_kl Y_lk`.
pub fn build_w(rho: &DensityMatrix, kind: OperatorKind, convention: Convention) -> Result<MeasureMatrix> {
    let desc = *rho.descriptor();
    kind.check(&desc)?;
    convention.check(&desc)?;
    if !desc.is_qubit() {
        let spec = SpectralDecomposition::from_density(rho)?;
        return build_w_spectral(&spec, kind, convention);
    }
    let n = desc.num_sites();
    let (w, u) = linalg::eigh(rho.matrix())?;
    let p: Vec<f64> = w.iter().map(|x| x.max(0.0)).collect();
    let sqrt_k = k_weights(&p).map(f64::sqrt);
    let g = pauli_gram_qubit(&u, &sqrt_k, n, STACK_BYTES);
    drop(u);
    let tr = anticommutator_traces(rho.matrix(), &desc)?;
    let s = w_scale(&desc, convention);
    Ok(MeasureMatrix::new(MatrixKind::W, desc, kind, convention, (tr - g * 4.0) * s))
}

/// Per-operator data of a spectral state: `X|k⟩` scaled by `√c_k` and `U†XU`.
fn spectral_blocks(
    spec: &SpectralDecomposition,
    col_weights: &[f64],
    pair_weights: &RMat,
) -> Result<(RMat, RMat)> {
    let desc = spec.descriptor();
    let ops = site_ops(desc)?;
    let u = spec.vectors();
    let (d, r) = (u.nrows(), u.ncols());
    let m = ops.len();
    let sqrt_c: Vec<f64> = col_weights.iter().map(|c| c.max(0.0).sqrt()).collect();
    let sqrt_w = pair_weights.map(|x| x.max(0.0).sqrt());
    let mut zstack = CMat::zeros(d * r, m);
    let mut astack = CMat::zeros(r * r, m);
    for (x, op) in ops.iter().enumerate() {
        let xu = op.left_mul(u);
        {
            let mut dst = zstack.column_mut(x);
            for k in 0..r {
                for row in 0..d {
                    dst[k * d + row] = xu[(row, k)] * sqrt_c[k];
                }
            }
        }
        let a = linalg::gemm(u, Op::H, &xu, Op::N);
        push_weighted(&mut astack, x, &a, &sqrt_w, 0);
    }
    Ok((weighted_gram(&zstack), weighted_gram(&astack)))
}

/// `V` from a spectral decomposition: `Σ π_k²⟨Xk|Yk⟩ − Σ π_kπ_l X_kl Y_lk`.
pub fn build_v_spectral(
    spec: &SpectralDecomposition,
    kind: OperatorKind,
    convention: Convention,
) -> Result<MeasureMatrix> {
    let desc = *spec.descriptor();
    kind.check(&desc)?;
    convention.check(&desc)?;
    let p = spec.weights();
    let sq: Vec<f64> = p.iter().map(|x| x * x).collect();
    let pp = RMat::from_fn(p.len(), p.len(), |k, l| p[k] * p[l]);
    let (diag, cross) = spectral_blocks(spec, &sq, &pp)?;
    let s = v_scale(&desc, convention, spec.purity());
    Ok(MeasureMatrix::new(MatrixKind::V, desc, kind, convention, (diag - cross) * s))
}

/// `W` from a spectral decomposition; the complement of a truncated basis
/// enters through `⟨k|XY|k⟩`.
pub fn build_w_spectral(
    spec: &SpectralDecomposition,
    kind: OperatorKind,
    convention: Convention,
) -> Result<MeasureMatrix> {
    let desc = *spec.descriptor();
    kind.check(&desc)?;
    convention.check(&desc)?;
    let p = spec.weights();
    let (diag, cross) = spectral_blocks(spec, p, &k_weights(p))?;
    let s = w_scale(&desc, convention);
    Ok(MeasureMatrix::new(MatrixKind::W, desc, kind, convention, (diag * 2.0 - cross * 4.0) * s))
}

/// Something both matrices can be built from.
pub trait QuadraticSource: Sync {
    fn descriptor(&self) -> &SystemDescriptor;
    fn build_v(&self, convention: Convention) -> Result<MeasureMatrix>;
    fn build_w(&self, convention: Convention) -> Result<MeasureMatrix>;
}

impl QuadraticSource for DensityMatrix {
    fn descriptor(&self) -> &SystemDescriptor {
        DensityMatrix::descriptor(self)
    }
    fn build_v(&self, convention: Convention) -> Result<MeasureMatrix> {
        build_v(self, OperatorKind::default_for(self.descriptor()), convention)
    }
    fn build_w(&self, convention: Convention) -> Result<MeasureMatrix> {
        build_w(self, OperatorKind::default_for(self.descriptor()), convention)
    }
}

impl QuadraticSource for SpectralDecomposition {
    fn descriptor(&self) -> &SystemDescriptor {
        SpectralDecomposition::descriptor(self)
    }
    fn build_v(&self, convention: Convention) -> Result<MeasureMatrix> {
        build_v_spectral(self, OperatorKind::default_for(self.descriptor()), convention)
    }
    fn build_w(&self, convention: Convention) -> Result<MeasureMatrix> {
        build_w_spectral(self, OperatorKind::default_for(self.descriptor()), convention)
    }
}
