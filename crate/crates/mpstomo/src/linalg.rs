//! Small dense complex matrices backing the tensor contractions.
//!
//! Bond dimensions in this crate are tiny (χ ≤ 10, so transfer matrices stay
//! below ~100×100); a hand-rolled row-major kernel beats a general-purpose
//! BLAS dispatch at these sizes and keeps the hot loops allocation-free.

use num_complex::Complex64 as C64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// Row-major complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CMat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<C64>,
}

impl CMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMat { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMat::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = ONE;
        }
        m
    }

    pub fn from_rows(rows: &[&[C64]]) -> Self {
        let r = rows.len();
        let c = rows[0].len();
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c);
            data.extend_from_slice(row);
        }
        CMat { rows: r, cols: c, data }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }

    pub fn trace(&self) -> C64 {
        debug_assert_eq!(self.rows, self.cols);
        (0..self.rows).map(|i| self.at(i, i)).sum()
    }

    pub fn mul(&self, rhs: &CMat) -> CMat {
        let mut out = CMat::zeros(self.rows, rhs.cols);
        self.mul_into(rhs, &mut out);
        out
    }

    pub fn mul_into(&self, rhs: &CMat, out: &mut CMat) {
        assert_eq!(self.cols, rhs.rows);
        out.resize_uninit(self.rows, rhs.cols);
        mul_slices(
            &self.data, self.rows, self.cols, &rhs.data, rhs.cols, &mut out.data,
        );
    }

    /// Tr(self · rhs) without materializing the product.
    pub fn trace_mul(&self, rhs: &CMat) -> C64 {
        assert_eq!(self.cols, rhs.rows);
        assert_eq!(self.rows, rhs.cols);
        let mut acc = ZERO;
        for i in 0..self.rows {
            let row = &self.data[i * self.cols..(i + 1) * self.cols];
            for (j, &a) in row.iter().enumerate() {
                acc += a * rhs.at(j, i);
            }
        }
        acc
    }

    pub fn scale(&mut self, f: C64) {
        for v in &mut self.data {
            *v *= f;
        }
    }

    pub fn axpy(&mut self, alpha: C64, other: &CMat) {
        debug_assert_eq!(self.data.len(), other.data.len());
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += alpha * *b;
        }
    }

    pub fn conj(&self) -> CMat {
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v.conj()).collect(),
        }
    }

    pub fn dagger(&self) -> CMat {
        let mut out = CMat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                *out.at_mut(j, i) = self.at(i, j).conj();
            }
        }
        out
    }

    pub fn kron(&self, rhs: &CMat) -> CMat {
        let mut out = CMat::zeros(self.rows * rhs.rows, self.cols * rhs.cols);
        for i1 in 0..self.rows {
            for j1 in 0..self.cols {
                let a = self.at(i1, j1);
                if a == ZERO {
                    continue;
                }
                for i2 in 0..rhs.rows {
                    for j2 in 0..rhs.cols {
                        *out.at_mut(i1 * rhs.rows + i2, j1 * rhs.cols + j2) = a * rhs.at(i2, j2);
                    }
                }
            }
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    fn resize_uninit(&mut self, rows: usize, cols: usize) {
        self.rows = rows;
        self.cols = cols;
        self.data.resize(rows * cols, ZERO);
    }
}

/// out = a · b with a: m×k, b: k×n, all row-major. i-k-j loop order keeps the
/// inner loop contiguous in both b and out.
pub fn mul_slices(a: &[C64], m: usize, k: usize, b: &[C64], n: usize, out: &mut [C64]) {
    debug_assert_eq!(a.len(), m * k);
    debug_assert_eq!(b.len(), k * n);
    debug_assert_eq!(out.len(), m * n);
    out.fill(ZERO);
    for i in 0..m {
        let arow = &a[i * k..(i + 1) * k];
        let orow = &mut out[i * n..(i + 1) * n];
        for (kk, &aik) in arow.iter().enumerate() {
            if aik == ZERO {
                continue;
            }
            let brow = &b[kk * n..(kk + 1) * n];
            for (o, &bv) in orow.iter_mut().zip(brow) {
                *o += aik * bv;
            }
        }
    }
}

/// Product of a cyclic chain of matrices followed by a trace.
pub fn ring_trace(mats: &[&CMat]) -> C64 {
    debug_assert!(!mats.is_empty());
    if mats.len() == 1 {
        return mats[0].trace();
    }
    let mut acc = mats[0].clone();
    let mut scratch = CMat::zeros(0, 0);
    for m in &mats[1..mats.len() - 1] {
        acc.mul_into(m, &mut scratch);
        std::mem::swap(&mut acc, &mut scratch);
    }
    acc.trace_mul(mats[mats.len() - 1])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn mul_and_trace() {
        let a = CMat::from_rows(&[&[c(1.0, 0.0), c(0.0, 1.0)], &[c(2.0, 0.0), c(0.0, 0.0)]]);
        let b = CMat::from_rows(&[&[c(0.0, 1.0), c(1.0, 0.0)], &[c(1.0, 0.0), c(0.0, -1.0)]]);
        let ab = a.mul(&b);
        assert_eq!(ab.at(0, 0), c(0.0, 2.0));
        assert_eq!(ab.at(0, 1), c(2.0, 0.0));
        assert_eq!(ab.at(1, 0), c(0.0, 2.0));
        assert_eq!(ab.at(1, 1), c(2.0, 0.0));
        assert_eq!(a.trace_mul(&b), ab.trace());
    }

    #[test]
    fn kron_dims() {
        let a = CMat::identity(2);
        let b = CMat::from_rows(&[&[c(3.0, 0.0)]]);
        let k = a.kron(&b);
        assert_eq!((k.rows, k.cols), (2, 2));
        assert_eq!(k.at(1, 1), c(3.0, 0.0));
    }
}
