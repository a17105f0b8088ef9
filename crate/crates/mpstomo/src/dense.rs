//! Brute-force dense conversions and the sequential-SVD compressor.
//!
//! These back the test oracles and the desk-scale thermal-state pipeline.
//! Size guards are hard errors: the dense paths exist to keep the tensor
//! contractions honest, not to scale.

use crate::error::{Error, Result};
use crate::linalg::{CMat, ZERO};
use crate::tensor::{
    mpo_phys_index, MatrixProductDensityOperator, MatrixProductOperator, MatrixProductState,
    SiteTensor, MPO_PHYS_DIM,
};
use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

pub const MAX_DENSE_VECTOR_SITES: usize = 12;
pub const MAX_DENSE_MATRIX_SITES: usize = 8;

/// All 2^N amplitudes, index bit-big-endian (site 0 = most significant bit).
pub fn dense_state_vector(mps: &MatrixProductState) -> Result<Vec<C64>> {
    let n = mps.n_sites();
    if n > MAX_DENSE_VECTOR_SITES {
        return Err(Error::SizeGuard(format!(
            "dense state vector needs n_sites <= {MAX_DENSE_VECTOR_SITES}, got {n}"
        )));
    }
    let mut out = vec![ZERO; 1 << n];
    // DFS with a stack of left partial products reused across shared prefixes.
    let mut stack: Vec<CMat> = Vec::with_capacity(n + 1);
    let d0 = mps.site(0).left_dim();
    stack.push(CMat::identity(d0));
    let mut bits = vec![0u8; n];
    enumerate_rec(mps, 0, &mut bits, &mut stack, &mut out);
    Ok(out)
}

fn enumerate_rec(
    mps: &MatrixProductState,
    depth: usize,
    bits: &mut [u8],
    stack: &mut Vec<CMat>,
    out: &mut [C64],
) {
    let n = mps.n_sites();
    if depth == n {
        let idx = bits.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize);
        out[idx] = stack.last().unwrap().trace();
        return;
    }
    for b in 0..2u8 {
        bits[depth] = b;
        let m = stack.last().unwrap().mul(&mps.site(depth).matrix(b as usize));
        stack.push(m);
        enumerate_rec(mps, depth + 1, bits, stack, out);
        stack.pop();
    }
}

/// The full 2^N × 2^N operator matrix, row = ket index, col = bra index.
pub fn dense_operator_matrix(mpo: &MatrixProductOperator) -> Result<DMatrix<C64>> {
    let n = mpo.n_sites();
    if n > MAX_DENSE_MATRIX_SITES {
        return Err(Error::SizeGuard(format!(
            "dense operator matrix needs n_sites <= {MAX_DENSE_MATRIX_SITES}, got {n}"
        )));
    }
    let dim = 1usize << n;
    let mut out = DMatrix::from_element(dim, dim, ZERO);
    let d0 = mpo.site(0).left_dim();
    let mut stack: Vec<CMat> = vec![CMat::identity(d0)];
    let mut ps = vec![0usize; n];
    dense_mpo_rec(mpo, 0, &mut ps, &mut stack, &mut out);
    Ok(out)
}

fn dense_mpo_rec(
    mpo: &MatrixProductOperator,
    depth: usize,
    ps: &mut [usize],
    stack: &mut Vec<CMat>,
    out: &mut DMatrix<C64>,
) {
    let n = mpo.n_sites();
    if depth == n {
        let mut ket = 0usize;
        let mut bra = 0usize;
        for &p in ps.iter() {
            ket = (ket << 1) | (p >> 1);
            bra = (bra << 1) | (p & 1);
        }
        out[(ket, bra)] = stack.last().unwrap().trace();
        return;
    }
    for p in 0..MPO_PHYS_DIM {
        ps[depth] = p;
        let m = stack.last().unwrap().mul(&mpo.site(depth).matrix(p));
        stack.push(m);
        dense_mpo_rec(mpo, depth + 1, ps, stack, out);
        stack.pop();
    }
}

pub fn dense_density_matrix(mpdo: &MatrixProductDensityOperator) -> Result<DMatrix<C64>> {
    dense_operator_matrix(&mpdo.to_mpo())
}

/// Factorize a dense 2^N × 2^N operator into an open-boundary MPO by
/// sequential SVDs, truncating singular values below `tol` × σ_max and capping
/// bond dimensions at `chi_max`. Returns the MPO and the relative
/// reconstruction error ‖ρ − ρ̂‖₂/‖ρ‖₂ (computed exactly, not estimated).
pub fn mpo_from_dense(
    rho: &DMatrix<C64>,
    chi_max: usize,
    tol: f64,
) -> Result<(MatrixProductOperator, f64)> {
    let dim = rho.nrows();
    if rho.ncols() != dim {
        return Err(Error::Argument("operator matrix must be square".into()));
    }
    let n = dim.trailing_zeros() as usize;
    if dim == 0 || (1usize << n) != dim {
        return Err(Error::Argument(format!(
            "operator dimension {dim} is not a power of two"
        )));
    }
    if n > MAX_DENSE_VECTOR_SITES {
        return Err(Error::SizeGuard(format!(
            "mpo_from_dense needs n_sites <= {MAX_DENSE_VECTOR_SITES}, got {n}"
        )));
    }
    if chi_max == 0 {
        return Err(Error::Argument("chi_max must be >= 1".into()));
    }

    // Regroup entries into per-site physical indices p_i = 2 s_i + s'_i,
    // big-endian in i: v[p_1 ... p_N].
    let mut v = vec![ZERO; dim * dim];
    for ket in 0..dim {
        for bra in 0..dim {
            let mut pidx = 0usize;
            for i in 0..n {
                let s = (ket >> (n - 1 - i)) & 1;
                let sp = (bra >> (n - 1 - i)) & 1;
                pidx = pidx * 4 + mpo_phys_index(s, sp);
            }
            v[pidx] = rho[(ket, bra)];
        }
    }

    let norm_rho = rho.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let mut sites = Vec::with_capacity(n);
    let mut chi_left = 1usize;
    let mut rest = v; // shape (chi_left * 4, 4^{remaining})
    for i in 0..n - 1 {
        let rows = chi_left * 4;
        let cols = rest.len() / rows;
        // nalgebra is column-major; build the matrix transposed from our
        // row-major buffer via from_row_iterator.
        let m = DMatrix::from_row_iterator(rows, cols, rest.iter().copied());
        let svd = m.svd(true, true);
        let u = svd.u.as_ref().expect("svd with u");
        let vt = svd.v_t.as_ref().expect("svd with v_t");
        let sv = &svd.singular_values;
        let smax = sv.iter().fold(0.0f64, |a, &b| a.max(b));
        let mut keep = sv.iter().filter(|&&s| s > tol * smax).count();
        keep = keep.clamp(1, chi_max.min(sv.len()));
        let mut site = SiteTensor::zeros(MPO_PHYS_DIM, chi_left, keep);
        for l in 0..chi_left {
            for p in 0..4 {
                for r in 0..keep {
                    site.set(p, l, r, u[(l * 4 + p, r)]);
                }
            }
        }
        sites.push(site);
        // remainder = diag(kept σ) · Vt, row-major (keep × cols)
        let mut next = vec![ZERO; keep * cols];
        for r in 0..keep {
            let s = C64::new(sv[r], 0.0);
            for c in 0..cols {
                next[r * cols + c] = s * vt[(r, c)];
            }
        }
        rest = next;
        chi_left = keep;
        let _ = i;
    }
    // Last site: shape (chi_left, 4) holds the remaining physical index.
    let mut last = SiteTensor::zeros(MPO_PHYS_DIM, chi_left, 1);
    for l in 0..chi_left {
        for p in 0..4 {
            last.set(p, l, 0, rest[l * 4 + p]);
        }
    }
    sites.push(last);
    let mpo = MatrixProductOperator::new(sites)?;

    // Exact relative reconstruction error: materialize ρ̂ in the same
    // permuted layout and diff. The algebraic ‖ρ‖² − 2Re⟨ρ̂,ρ⟩ + ‖ρ̂‖² route
    // cancels catastrophically once the error is below √ε.
    let vhat = expand_permuted(&mpo, n);
    let mut err_sq = 0.0f64;
    for ket in 0..dim {
        for bra in 0..dim {
            let mut pidx = 0usize;
            for i in 0..n {
                let s = (ket >> (n - 1 - i)) & 1;
                let sp = (bra >> (n - 1 - i)) & 1;
                pidx = pidx * 4 + mpo_phys_index(s, sp);
            }
            err_sq += (vhat[pidx] - rho[(ket, bra)]).norm_sqr();
        }
    }
    let rel = if norm_rho > 0.0 { err_sq.sqrt() / norm_rho } else { 0.0 };
    Ok((mpo, rel))
}

/// Expand an MPO into the flat 4^N tensor over per-site physical indices
/// (big-endian), by sweeping from the right: O(χ²·4^N).
fn expand_permuted(mpo: &MatrixProductOperator, n: usize) -> Vec<C64> {
    // right[r, tail] for sites i..N-1; starts as the 1×1 closure.
    let mut right: Vec<C64> = vec![C64::new(1.0, 0.0)];
    let mut tail_len = 1usize;
    for i in (0..n).rev() {
        let site = mpo.site(i);
        let (li, ri) = (site.left_dim(), site.right_dim());
        let mut next = vec![ZERO; li * 4 * tail_len];
        for l in 0..li {
            for p in 0..MPO_PHYS_DIM {
                let out_row = &mut next[(l * 4 + p) * tail_len..(l * 4 + p + 1) * tail_len];
                for r in 0..ri {
                    let a = site.get(p, l, r);
                    if a == ZERO {
                        continue;
                    }
                    let rrow = &right[r * tail_len..(r + 1) * tail_len];
                    for (o, &rv) in out_row.iter_mut().zip(rrow) {
                        *o += a * rv;
                    }
                }
            }
        }
        right = next;
        tail_len *= 4;
    }
    right
}
