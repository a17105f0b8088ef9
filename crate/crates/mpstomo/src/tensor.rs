//! Matrix-product containers and their contraction primitives.
//!
//! Every amplitude and operator entry in this crate is a trace over the bond
//! space of a product of per-site matrices; open boundaries are the special
//! case of boundary dimension 1. Site tensors are stored dense with index
//! order (phys, left, right), row-major.

use crate::error::{Error, Result};
use crate::linalg::{ring_trace, CMat, ONE, ZERO};
use num_complex::Complex64 as C64;

pub const QUBIT_DIM: usize = 2;
/// MPO physical index linearization: p = 2·s + s' for the |s⟩⟨s'| component.
pub const MPO_PHYS_DIM: usize = 4;

#[inline]
pub fn mpo_phys_index(ket: usize, bra: usize) -> usize {
    2 * ket + bra
}

/// One site of an MPS or MPO: a stack of `phys_dim` matrices of shape
/// left_dim × right_dim.
#[derive(Clone, Debug, PartialEq)]
pub struct SiteTensor {
    phys_dim: usize,
    left_dim: usize,
    right_dim: usize,
    data: Vec<C64>,
}

impl SiteTensor {
    pub fn zeros(phys_dim: usize, left_dim: usize, right_dim: usize) -> Self {
        SiteTensor {
            phys_dim,
            left_dim,
            right_dim,
            data: vec![ZERO; phys_dim * left_dim * right_dim],
        }
    }

    pub fn from_matrices(mats: &[CMat]) -> Self {
        let left = mats[0].rows;
        let right = mats[0].cols;
        let mut t = SiteTensor::zeros(mats.len(), left, right);
        for (p, m) in mats.iter().enumerate() {
            assert_eq!((m.rows, m.cols), (left, right), "ragged site matrices");
            t.data[p * left * right..(p + 1) * left * right].copy_from_slice(&m.data);
        }
        t
    }

    pub fn phys_dim(&self) -> usize {
        self.phys_dim
    }
    pub fn left_dim(&self) -> usize {
        self.left_dim
    }
    pub fn right_dim(&self) -> usize {
        self.right_dim
    }

    #[inline]
    pub fn get(&self, p: usize, l: usize, r: usize) -> C64 {
        self.data[(p * self.left_dim + l) * self.right_dim + r]
    }

    #[inline]
    pub fn set(&mut self, p: usize, l: usize, r: usize, v: C64) {
        self.data[(p * self.left_dim + l) * self.right_dim + r] = v;
    }

    /// The l×r matrix for one physical value, as a borrowed CMat view copy.
    pub fn matrix(&self, p: usize) -> CMat {
        let n = self.left_dim * self.right_dim;
        CMat {
            rows: self.left_dim,
            cols: self.right_dim,
            data: self.data[p * n..(p + 1) * n].to_vec(),
        }
    }

    /// Raw row-major slice of the matrix for one physical value.
    #[inline]
    pub fn matrix_slice(&self, p: usize) -> &[C64] {
        let n = self.left_dim * self.right_dim;
        &self.data[p * n..(p + 1) * n]
    }

    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    pub fn entries_mut(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    /// Apply a single-site operator: C^s ← Σ_{s'} op[s, s'] C^{s'}.
    pub fn map_phys(&self, op: &CMat) -> SiteTensor {
        assert_eq!(op.rows, self.phys_dim);
        assert_eq!(op.cols, self.phys_dim);
        let mut out = SiteTensor::zeros(self.phys_dim, self.left_dim, self.right_dim);
        let n = self.left_dim * self.right_dim;
        for s in 0..self.phys_dim {
            for sp in 0..self.phys_dim {
                let w = op.at(s, sp);
                if w == ZERO {
                    continue;
                }
                for e in 0..n {
                    out.data[s * n + e] += w * self.data[sp * n + e];
                }
            }
        }
        out
    }
}

fn check_chain(sites: &[SiteTensor], phys: usize) -> Result<()> {
    for (i, s) in sites.iter().enumerate() {
        if s.phys_dim != phys {
            return Err(Error::Argument(format!(
                "site {i}: phys_dim {} != {phys}",
                s.phys_dim
            )));
        }
        if !s.is_finite() {
            return Err(Error::Integrity(format!("site {i}: non-finite entry")));
        }
        let next = &sites[(i + 1) % sites.len()];
        if s.right_dim != next.left_dim {
            return Err(Error::Argument(format!(
                "bond mismatch between site {i} (right {}) and site {} (left {})",
                s.right_dim,
                (i + 1) % sites.len(),
                next.left_dim
            )));
        }
    }
    Ok(())
}

/// Pure state ψ_s = Tr(C₁^{s₁} ⋯ C_N^{s_N}).
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixProductState {
    sites: Vec<SiteTensor>, // length 1 when translationally invariant
    ti: bool,
    n_sites: usize,
}

impl MatrixProductState {
    pub fn new(sites: Vec<SiteTensor>) -> Result<Self> {
        if sites.len() < 2 {
            return Err(Error::Argument("an MPS needs at least 2 sites".into()));
        }
        check_chain(&sites, QUBIT_DIM)?;
        let n = sites.len();
        Ok(MatrixProductState { sites, ti: false, n_sites: n })
    }

    pub fn new_ti(site: SiteTensor, n_sites: usize) -> Result<Self> {
        if n_sites < 2 {
            return Err(Error::Argument("an MPS needs at least 2 sites".into()));
        }
        if site.left_dim != site.right_dim {
            return Err(Error::Argument(
                "a translationally invariant site tensor must be square".into(),
            ));
        }
        check_chain(std::slice::from_ref(&site), QUBIT_DIM)?;
        Ok(MatrixProductState { sites: vec![site], ti: true, n_sites })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn is_ti(&self) -> bool {
        self.ti
    }

    #[inline]
    pub fn site(&self, i: usize) -> &SiteTensor {
        if self.ti {
            &self.sites[0]
        } else {
            &self.sites[i]
        }
    }

    pub fn stored_sites(&self) -> &[SiteTensor] {
        &self.sites
    }

    pub fn max_bond(&self) -> usize {
        self.sites.iter().map(|s| s.right_dim).max().unwrap_or(0)
    }

    pub fn is_real(&self) -> bool {
        self.sites
            .iter()
            .all(|s| s.entries().iter().all(|v| v.im == 0.0))
    }

    /// ψ_s for one bit string, O(N χ³).
    pub fn amplitude(&self, bits: &[u8]) -> Result<C64> {
        if bits.len() != self.n_sites {
            return Err(Error::Argument(format!(
                "bit string length {} != n_sites {}",
                bits.len(),
                self.n_sites
            )));
        }
        if let Some(&b) = bits.iter().find(|&&b| b > 1) {
            return Err(Error::Argument(format!("invalid bit value {b}")));
        }
        let mats: Vec<CMat> = (0..self.n_sites)
            .map(|i| self.site(i).matrix(bits[i] as usize))
            .collect();
        let refs: Vec<&CMat> = mats.iter().collect();
        Ok(ring_trace(&refs))
    }

    /// ⟨self|other⟩ = Σ_s conj(self_s)·other_s via transfer contraction.
    pub fn inner(&self, other: &MatrixProductState) -> Result<C64> {
        if self.n_sites != other.n_sites {
            return Err(Error::Argument(format!(
                "site count mismatch: {} vs {}",
                self.n_sites, other.n_sites
            )));
        }
        let transfers: Vec<CMat> = (0..self.n_sites)
            .map(|i| pair_transfer(self.site(i), other.site(i), true))
            .collect();
        let refs: Vec<&CMat> = transfers.iter().collect();
        Ok(ring_trace(&refs))
    }

    pub fn norm_sq(&self) -> f64 {
        self.inner(self).expect("matching site counts").re
    }

    /// Apply a 2×2 operator on site `i` (returns a non-TI copy).
    pub fn apply_one_site(&self, i: usize, op: &CMat) -> MatrixProductState {
        let mut sites: Vec<SiteTensor> = (0..self.n_sites).map(|j| self.site(j).clone()).collect();
        sites[i] = sites[i].map_phys(op);
        MatrixProductState { sites, ti: false, n_sites: self.n_sites }
    }
}

/// Operator entries ρ_{s,s'} = Tr(A₁^{s₁s₁'} ⋯ A_N^{s_Ns_N'}), with the pair
/// (s, s') linearized as p = 2s + s'.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixProductOperator {
    sites: Vec<SiteTensor>,
    ti: bool,
    n_sites: usize,
}

impl MatrixProductOperator {
    pub fn new(sites: Vec<SiteTensor>) -> Result<Self> {
        check_chain(&sites, MPO_PHYS_DIM)?;
        let n = sites.len();
        Ok(MatrixProductOperator { sites, ti: false, n_sites: n })
    }

    pub fn new_ti(site: SiteTensor, n_sites: usize) -> Result<Self> {
        if site.left_dim != site.right_dim {
            return Err(Error::Argument(
                "a translationally invariant site tensor must be square".into(),
            ));
        }
        check_chain(std::slice::from_ref(&site), MPO_PHYS_DIM)?;
        Ok(MatrixProductOperator { sites: vec![site], ti: true, n_sites })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn is_ti(&self) -> bool {
        self.ti
    }

    #[inline]
    pub fn site(&self, i: usize) -> &SiteTensor {
        if self.ti {
            &self.sites[0]
        } else {
            &self.sites[i]
        }
    }

    pub fn stored_sites(&self) -> &[SiteTensor] {
        &self.sites
    }

    pub fn max_bond(&self) -> usize {
        self.sites.iter().map(|s| s.right_dim).max().unwrap_or(0)
    }

    /// Tr ρ: contract with s = s' on every site.
    pub fn trace(&self) -> C64 {
        let mats: Vec<CMat> = (0..self.n_sites)
            .map(|i| {
                let site = self.site(i);
                let mut m = site.matrix(mpo_phys_index(0, 0));
                m.axpy(ONE, &site.matrix(mpo_phys_index(1, 1)));
                m
            })
            .collect();
        let refs: Vec<&CMat> = mats.iter().collect();
        ring_trace(&refs)
    }

    /// Hilbert-Schmidt inner product Tr(self† · other).
    pub fn hs_inner(&self, other: &MatrixProductOperator) -> Result<C64> {
        if self.n_sites != other.n_sites {
            return Err(Error::Argument(format!(
                "site count mismatch: {} vs {}",
                self.n_sites, other.n_sites
            )));
        }
        let transfers: Vec<CMat> = (0..self.n_sites)
            .map(|i| pair_transfer(self.site(i), other.site(i), true))
            .collect();
        let refs: Vec<&CMat> = transfers.iter().collect();
        Ok(ring_trace(&refs))
    }

    pub fn purity(&self) -> f64 {
        self.hs_inner(self).expect("same operator").re
    }
}

/// Locally purified density operator: per site a stack of κ Kraus slices of
/// qubit matrices C_{k}^{s}, generating A^{ss'} = Σ_k C_k^s ⊗ (C_k^{s'})*.
#[derive(Clone, Debug, PartialEq)]
pub struct KrausSite {
    kappa: usize,
    left_dim: usize,
    right_dim: usize,
    // data[(k, s, l, r)] = ((k*2 + s)*left + l)*right + r
    data: Vec<C64>,
}

impl KrausSite {
    pub fn zeros(kappa: usize, left_dim: usize, right_dim: usize) -> Self {
        KrausSite {
            kappa,
            left_dim,
            right_dim,
            data: vec![ZERO; kappa * QUBIT_DIM * left_dim * right_dim],
        }
    }

    pub fn kappa(&self) -> usize {
        self.kappa
    }
    pub fn left_dim(&self) -> usize {
        self.left_dim
    }
    pub fn right_dim(&self) -> usize {
        self.right_dim
    }

    /// Lift one MPS site tensor to a κ = 1 Kraus stack.
    pub fn from_pure_site(t: &SiteTensor) -> KrausSite {
        let mut k = KrausSite::zeros(1, t.left_dim(), t.right_dim());
        let n = QUBIT_DIM * t.left_dim() * t.right_dim();
        k.data[..n].copy_from_slice(t.entries());
        k
    }

    #[inline]
    pub fn get(&self, k: usize, s: usize, l: usize, r: usize) -> C64 {
        self.data[((k * QUBIT_DIM + s) * self.left_dim + l) * self.right_dim + r]
    }

    #[inline]
    pub fn set(&mut self, k: usize, s: usize, l: usize, r: usize, v: C64) {
        self.data[((k * QUBIT_DIM + s) * self.left_dim + l) * self.right_dim + r] = v;
    }

    /// Row-major l×r matrix C_k^s.
    pub fn matrix_slice(&self, k: usize, s: usize) -> &[C64] {
        let n = self.left_dim * self.right_dim;
        let off = (k * QUBIT_DIM + s) * n;
        &self.data[off..off + n]
    }

    pub fn matrix(&self, k: usize, s: usize) -> CMat {
        CMat {
            rows: self.left_dim,
            cols: self.right_dim,
            data: self.matrix_slice(k, s).to_vec(),
        }
    }

    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    pub fn entries_mut(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    /// The induced MPO tensor A^{ss'} = Σ_k C_k^s ⊗ (C_k^{s'})*, with bond
    /// pair (l₁, l₂) linearized as l₁·left + l₂.
    pub fn induced_mpo_site(&self) -> SiteTensor {
        let (li, ri) = (self.left_dim, self.right_dim);
        let mut out = SiteTensor::zeros(MPO_PHYS_DIM, li * li, ri * ri);
        for s in 0..QUBIT_DIM {
            for sp in 0..QUBIT_DIM {
                let p = mpo_phys_index(s, sp);
                for k in 0..self.kappa {
                    let a = self.matrix_slice(k, s);
                    let b = self.matrix_slice(k, sp);
                    for l1 in 0..li {
                        for r1 in 0..ri {
                            let av = a[l1 * ri + r1];
                            if av == ZERO {
                                continue;
                            }
                            for l2 in 0..li {
                                for r2 in 0..ri {
                                    let v = av * b[l2 * ri + r2].conj();
                                    let cur = out.get(p, l1 * li + l2, r1 * ri + r2);
                                    out.set(p, l1 * li + l2, r1 * ri + r2, cur + v);
                                }
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MatrixProductDensityOperator {
    sites: Vec<KrausSite>,
    ti: bool,
    n_sites: usize,
}

impl MatrixProductDensityOperator {
    pub fn new(sites: Vec<KrausSite>) -> Result<Self> {
        if sites.len() < 2 {
            return Err(Error::Argument("an MPDO needs at least 2 sites".into()));
        }
        for (i, s) in sites.iter().enumerate() {
            if !s.is_finite() {
                return Err(Error::Integrity(format!("site {i}: non-finite entry")));
            }
            let next = &sites[(i + 1) % sites.len()];
            if s.right_dim != next.left_dim {
                return Err(Error::Argument(format!("bond mismatch at site {i}")));
            }
        }
        let n = sites.len();
        Ok(MatrixProductDensityOperator { sites, ti: false, n_sites: n })
    }

    pub fn new_ti(site: KrausSite, n_sites: usize) -> Result<Self> {
        if site.left_dim != site.right_dim {
            return Err(Error::Argument(
                "a translationally invariant site tensor must be square".into(),
            ));
        }
        if !site.is_finite() {
            return Err(Error::Integrity("non-finite entry".into()));
        }
        Ok(MatrixProductDensityOperator { sites: vec![site], ti: true, n_sites })
    }

    /// Lift a pure state to κ = 1.
    pub fn from_pure(mps: &MatrixProductState) -> Self {
        MatrixProductDensityOperator {
            sites: mps.stored_sites().iter().map(KrausSite::from_pure_site).collect(),
            ti: mps.is_ti(),
            n_sites: mps.n_sites(),
        }
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn is_ti(&self) -> bool {
        self.ti
    }

    pub fn kappa(&self) -> usize {
        self.sites[0].kappa
    }

    #[inline]
    pub fn site(&self, i: usize) -> &KrausSite {
        if self.ti {
            &self.sites[0]
        } else {
            &self.sites[i]
        }
    }

    pub fn stored_sites(&self) -> &[KrausSite] {
        &self.sites
    }

    pub fn max_bond(&self) -> usize {
        self.sites.iter().map(|s| s.right_dim).max().unwrap_or(0)
    }

    /// The induced MPO with bond dimension χ².
    pub fn to_mpo(&self) -> MatrixProductOperator {
        MatrixProductOperator {
            sites: self.sites.iter().map(|s| s.induced_mpo_site()).collect(),
            ti: self.ti,
            n_sites: self.n_sites,
        }
    }
}

/// Transfer matrix T[(la,lb),(ra,rb)] = Σ_p f(a^p[la,ra]) · b^p[lb,rb], where
/// f = conj when `conj_a` is set. Shared by inner products, HS inner products
/// and the doubled-layer derivative contractions.
pub fn pair_transfer(a: &SiteTensor, b: &SiteTensor, conj_a: bool) -> CMat {
    assert_eq!(a.phys_dim(), b.phys_dim());
    let (la, ra) = (a.left_dim(), a.right_dim());
    let (lb, rb) = (b.left_dim(), b.right_dim());
    let mut t = CMat::zeros(la * lb, ra * rb);
    for p in 0..a.phys_dim() {
        let am = a.matrix_slice(p);
        let bm = b.matrix_slice(p);
        for i1 in 0..la {
            for j1 in 0..ra {
                let av = if conj_a { am[i1 * ra + j1].conj() } else { am[i1 * ra + j1] };
                if av == ZERO {
                    continue;
                }
                for i2 in 0..lb {
                    let row = (i1 * lb + i2) * (ra * rb);
                    for j2 in 0..rb {
                        t.data[row + j1 * rb + j2] += av * bm[i2 * rb + j2];
                    }
                }
            }
        }
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states;
    use approx::assert_abs_diff_eq;

    #[test]
    fn ghz_amplitudes() {
        let ghz = states::ghz_state(3).unwrap();
        assert_abs_diff_eq!(ghz.amplitude(&[0, 0, 0]).unwrap().re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(ghz.amplitude(&[0, 1, 0]).unwrap().re, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(ghz.amplitude(&[1, 1, 1]).unwrap().re, 1.0, epsilon = 1e-15);
        assert!(ghz.amplitude(&[0, 0]).is_err());
    }

    #[test]
    fn cluster_amplitude_direct_product() {
        // Tr([[0,0],[1,1]]^3) = 1
        let cl = states::cluster_state(3).unwrap();
        assert_abs_diff_eq!(cl.amplitude(&[0, 0, 0]).unwrap().re, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn ghz_inner_is_two() {
        let ghz = states::ghz_state(3).unwrap();
        let v = ghz.inner(&ghz).unwrap();
        assert_abs_diff_eq!(v.re, 2.0, epsilon = 1e-13);
        assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-13);
    }

    #[test]
    fn ghz_mpo_trace_is_two() {
        let ghz = states::ghz_state(4).unwrap();
        let mpo = MatrixProductDensityOperator::from_pure(&ghz).to_mpo();
        assert_abs_diff_eq!(mpo.trace().re, 2.0, epsilon = 1e-13);
    }

    #[test]
    fn maximally_mixed_purity() {
        // I/2 on one site of a 2-qubit chain x I/2: purity (1/2)^2, trace 1.
        let mut k = KrausSite::zeros(2, 1, 1);
        let half = C64::new(0.5f64.sqrt(), 0.0);
        k.set(0, 0, 0, 0, half);
        k.set(1, 1, 0, 0, half);
        let mpdo = MatrixProductDensityOperator::new(vec![k.clone(), k]).unwrap();
        let mpo = mpdo.to_mpo();
        assert_abs_diff_eq!(mpo.trace().re, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(mpo.purity(), 0.25, epsilon = 1e-14);
    }
}
