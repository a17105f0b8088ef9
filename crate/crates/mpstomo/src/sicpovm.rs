//! Single-qubit SIC-POVM effects and the outcome-probability MPO.
//!
//! The four effects M_m = |φ_m⟩⟨φ_m| turn an operator chain A^{ss'} into
//! outcome tensors B^m = Σ_{ss'} M_m[s', s] · A^{ss'}, so the full outcome
//! distribution P(m) = Tr(B₁^{m₁}⋯B_N^{m_N}) stays in MPO form and the chain
//! of conditionals P(m_i | m_{<i}) is exact.

use crate::error::{Error, Result};
use crate::linalg::{CMat, ONE, ZERO};
use crate::states::AnyState;
use crate::tensor::{mpo_phys_index, SiteTensor, QUBIT_DIM};
use num_complex::Complex64 as C64;
use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::sync::atomic::{AtomicU64, Ordering};

pub const N_OUTCOMES: usize = 4;

/// The four SIC effect matrices and the qubit→ququart mapping unitary.
#[derive(Clone, Debug)]
pub struct SicEffects {
    pub effects: [CMat; N_OUTCOMES],
    pub mapping_unitary: CMat,
}

impl SicEffects {
    /// The fixed tetrahedral SIC: φ₁ = |0⟩/√2, φ_{2..4} = |0⟩/√6 + ω^k|1⟩/√3.
    pub fn standard() -> Self {
        let vecs = sic_vectors();
        let effects = vecs.map(|phi| {
            let mut m = CMat::zeros(2, 2);
            for a in 0..2 {
                for b in 0..2 {
                    *m.at_mut(a, b) = phi[a] * phi[b].conj();
                }
            }
            m
        });
        let s2 = FRAC_1_SQRT_2;
        let s3 = 1.0 / 3.0f64.sqrt();
        let s6 = 1.0 / 6.0f64.sqrt();
        let w = C64::from_polar(s3, 2.0 * PI / 3.0);
        let r = |x: f64| C64::new(x, 0.0);
        let mapping_unitary = CMat::from_rows(&[
            &[r(s2), ZERO, ZERO, r(s2)],
            &[r(s6), r(s3), r(s3), -r(s6)],
            &[r(s6), w.conj(), w, -r(s6)],
            &[r(s6), w, w.conj(), -r(s6)],
        ]);
        SicEffects { effects, mapping_unitary }
    }

    /// Effects conjugated by a single-qubit unitary: M_m ← U† M_m U. Measuring
    /// a locally rotated state with the standard effects is equivalent to
    /// measuring the unrotated state with these.
    pub fn conjugated(&self, u: &CMat) -> Self {
        let ud = u.dagger();
        let effects = self.effects.clone().map(|m| ud.mul(&m).mul(u));
        SicEffects { effects: effects.try_into().unwrap(), mapping_unitary: self.mapping_unitary.clone() }
    }

    /// ‖Σ_m M_m − 1‖_max.
    pub fn completeness_residue(&self) -> f64 {
        let mut sum = CMat::zeros(2, 2);
        for m in &self.effects {
            sum.axpy(ONE, m);
        }
        sum.axpy(-ONE, &CMat::identity(2));
        sum.max_abs()
    }

    /// max_{ij} |Tr(M_i M_j) − (2δ_ij + 1)/12|.
    pub fn symmetry_residue(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..N_OUTCOMES {
            for j in 0..N_OUTCOMES {
                let t = self.effects[i].mul(&self.effects[j]).trace();
                let want = if i == j { 0.25 } else { 1.0 / 12.0 };
                worst = worst.max((t - C64::new(want, 0.0)).norm());
            }
        }
        worst
    }

    /// ‖U†U − 1‖_max of the mapping unitary.
    pub fn unitarity_residue(&self) -> f64 {
        let mut m = self.mapping_unitary.dagger().mul(&self.mapping_unitary);
        m.axpy(-ONE, &CMat::identity(4));
        m.max_abs()
    }
}

pub fn sic_vectors() -> [[C64; 2]; N_OUTCOMES] {
    let s2 = FRAC_1_SQRT_2;
    let s3 = 1.0 / 3.0f64.sqrt();
    let s6 = 1.0 / 6.0f64.sqrt();
    let w = 2.0 * PI / 3.0;
    [
        [C64::new(s2, 0.0), ZERO],
        [C64::new(s6, 0.0), C64::new(s3, 0.0)],
        [C64::new(s6, 0.0), C64::from_polar(s3, w)],
        [C64::new(s6, 0.0), C64::from_polar(s3, -w)],
    ]
}

/// One site of the outcome-probability chain: the four B^m matrices and their
/// marginal sum 𝓑 = Σ_m B^m.
#[derive(Clone, Debug)]
pub struct ProbSite {
    pub b: [CMat; N_OUTCOMES],
    pub marginal: CMat,
}

/// The outcome distribution P(m) = Tr(B₁^{m₁}⋯B_N^{m_N}) in chain form, with
/// cached suffix products of the marginal tensors for O(N) conditional sweeps.
#[derive(Debug)]
pub struct ProbabilityMpo {
    sites: Vec<ProbSite>, // length 1 when TI
    ti: bool,
    n_sites: usize,
    /// suffix[i] = 𝓑_i ⋯ 𝓑_{N-1}; suffix[N] = identity.
    suffixes: Vec<CMat>,
    trace: f64,
    /// Relative floor below which negative chain values are clamped to zero.
    floor: f64,
    clamped: AtomicU64,
}

impl ProbabilityMpo {
    pub fn from_state(state: &AnyState) -> Result<Self> {
        Self::with_effects(state, &SicEffects::standard())
    }

    pub fn with_effects(state: &AnyState, effects: &SicEffects) -> Result<Self> {
        let (mpo_sites, ti, n_sites): (Vec<SiteTensor>, bool, usize) = match state {
            AnyState::Pure(s) => (
                s.stored_sites()
                    .iter()
                    .map(|t| crate::tensor::KrausSite::from_pure_site(t).induced_mpo_site())
                    .collect(),
                s.is_ti(),
                s.n_sites(),
            ),
            AnyState::Mixed(s) => (
                s.stored_sites().iter().map(|t| t.induced_mpo_site()).collect(),
                s.is_ti(),
                s.n_sites(),
            ),
            AnyState::Operator(o) => (
                o.stored_sites().to_vec(),
                o.is_ti(),
                o.n_sites(),
            ),
        };
        let sites: Vec<ProbSite> = mpo_sites.iter().map(|t| prob_site(t, effects)).collect();
        let mut suffixes = vec![CMat::identity(site_at(&sites, ti, 0).marginal.rows); n_sites + 1];
        // suffix[n] = I sized by site 0's left dim (= site n-1's right dim, cyclically)
        for i in (0..n_sites).rev() {
            suffixes[i] = site_at(&sites, ti, i).marginal.mul(&suffixes[i + 1]);
        }
        let trace = suffixes[0].trace();
        if trace.im.abs() > 1e-9 * trace.re.abs().max(1.0) {
            return Err(Error::Integrity(format!(
                "state trace has imaginary residue {}",
                trace.im
            )));
        }
        Ok(ProbabilityMpo {
            sites,
            ti,
            n_sites,
            suffixes,
            trace: trace.re,
            floor: 1e-12,
            clamped: AtomicU64::new(0),
        })
    }

    pub fn with_floor(mut self, floor: f64) -> Self {
        self.floor = floor;
        self
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    /// Tr ρ as contracted from the marginal chain.
    pub fn trace(&self) -> f64 {
        self.trace
    }

    pub fn clamp_count(&self) -> u64 {
        self.clamped.load(Ordering::Relaxed)
    }

    #[inline]
    pub fn site(&self, i: usize) -> &ProbSite {
        if self.ti {
            &self.sites[0]
        } else {
            &self.sites[i]
        }
    }

    #[inline]
    pub fn suffix(&self, i: usize) -> &CMat {
        &self.suffixes[i]
    }

    pub fn bond_dim(&self) -> usize {
        self.sites[0].marginal.rows
    }

    fn check_outcomes(&self, m: &[u8]) -> Result<()> {
        if let Some(&q) = m.iter().find(|&&q| q as usize >= N_OUTCOMES) {
            return Err(Error::Argument(format!("invalid outcome symbol {q}")));
        }
        Ok(())
    }

    /// Unnormalized P(m); small negative chain values are clamped to zero and
    /// counted, values below −floor·Tr(ρ) are an integrity error.
    pub fn probability(&self, m: &[u8]) -> Result<f64> {
        if m.len() != self.n_sites {
            return Err(Error::Argument(format!(
                "outcome string length {} != n_sites {}",
                m.len(),
                self.n_sites
            )));
        }
        self.check_outcomes(m)?;
        let mats: Vec<&CMat> = m.iter().enumerate().map(|(i, &q)| &self.site(i).b[q as usize]).collect();
        let v = crate::linalg::ring_trace(&mats).re;
        self.clamp(v)
    }

    fn clamp(&self, v: f64) -> Result<f64> {
        if v >= 0.0 {
            return Ok(v);
        }
        if v >= -self.floor * self.trace.abs() {
            self.clamped.fetch_add(1, Ordering::Relaxed);
            Ok(0.0)
        } else {
            Err(Error::Integrity(format!(
                "negative probability {v} below floor (trace {})",
                self.trace
            )))
        }
    }

    /// The four unnormalized chain values at position `prefix.len()` given the
    /// prefix, plus their normalized distribution.
    pub fn conditional_distribution(
        &self,
        prefix: &[u8],
    ) -> Result<([f64; N_OUTCOMES], [f64; N_OUTCOMES])> {
        if prefix.len() >= self.n_sites {
            return Err(Error::Argument(format!(
                "prefix length {} must be < n_sites {}",
                prefix.len(),
                self.n_sites
            )));
        }
        self.check_outcomes(prefix)?;
        let d0 = self.site(0).b[0].rows;
        let mut left = CMat::identity(d0);
        let mut scratch = CMat::zeros(0, 0);
        for (i, &q) in prefix.iter().enumerate() {
            left.mul_into(&self.site(i).b[q as usize], &mut scratch);
            std::mem::swap(&mut left, &mut scratch);
        }
        let mut vals = [0.0f64; N_OUTCOMES];
        self.site_values(prefix.len(), &left, &mut vals)?;
        let sum: f64 = vals.iter().sum();
        if sum <= 0.0 {
            return Err(Error::Integrity(
                "conditional distribution has non-positive normalization".into(),
            ));
        }
        let normalized = vals.map(|v| v / sum);
        Ok((vals, normalized))
    }

    /// Unnormalized values Tr(L · B_i^m · suffix_{i+1}) for m = 0..3.
    /// `left` is the accumulated prefix product (d₀ × left_dim of site i).
    pub(crate) fn site_values(
        &self,
        i: usize,
        left: &CMat,
        out: &mut [f64; N_OUTCOMES],
    ) -> Result<()> {
        let suffix = &self.suffixes[i + 1];
        let site = self.site(i);
        let mut tmp = CMat::zeros(0, 0);
        for q in 0..N_OUTCOMES {
            left.mul_into(&site.b[q], &mut tmp);
            let v = tmp.trace_mul(suffix).re;
            out[q] = self.clamp(v)?;
        }
        Ok(())
    }

    /// ln P(m) for an outcome string (unnormalized chain value).
    pub fn log_probability(&self, m: &[u8]) -> Result<f64> {
        let p = self.probability(m)?;
        if p <= 0.0 {
            return Err(Error::Integrity(format!(
                "outcome {:?} has non-positive probability {p}",
                m
            )));
        }
        Ok(p.ln())
    }
}

fn site_at<'a>(sites: &'a [ProbSite], ti: bool, i: usize) -> &'a ProbSite {
    if ti {
        &sites[0]
    } else {
        &sites[i]
    }
}

/// B^m = Σ_{ss'} M_m[s', s] · A^{2s+s'}, 𝓑 = Σ_m B^m.
fn prob_site(mpo_site: &SiteTensor, effects: &SicEffects) -> ProbSite {
    let rows = mpo_site.left_dim();
    let cols = mpo_site.right_dim();
    let b: [CMat; N_OUTCOMES] = std::array::from_fn(|m| {
        let mut acc = CMat::zeros(rows, cols);
        for s in 0..QUBIT_DIM {
            for sp in 0..QUBIT_DIM {
                let w = effects.effects[m].at(sp, s);
                if w == ZERO {
                    continue;
                }
                acc.axpy(w, &mpo_site.matrix(mpo_phys_index(s, sp)));
            }
        }
        acc
    });
    let mut marginal = CMat::zeros(rows, cols);
    for m in &b {
        marginal.axpy(ONE, m);
    }
    ProbSite { b, marginal }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{self, AnyState};
    use crate::tensor::{MatrixProductState, SiteTensor};
    use approx::assert_abs_diff_eq;

    fn product_state(amps: [C64; 2], n: usize) -> MatrixProductState {
        let mut t = SiteTensor::zeros(2, 1, 1);
        t.set(0, 0, 0, amps[0]);
        t.set(1, 0, 0, amps[1]);
        MatrixProductState::new_ti(t, n).unwrap()
    }

    #[test]
    fn effect_algebra() {
        let e = SicEffects::standard();
        assert!(e.completeness_residue() < 1e-14);
        assert!(e.symmetry_residue() < 1e-14);
        assert!(e.unitarity_residue() < 1e-14);
    }

    #[test]
    fn zero_state_distribution() {
        let st = AnyState::Pure(product_state([C64::new(1.0, 0.0), ZERO], 2));
        let p = ProbabilityMpo::from_state(&st).unwrap();
        let (_, norm) = p.conditional_distribution(&[]).unwrap();
        assert_abs_diff_eq!(norm[0], 0.5, epsilon = 1e-14);
        for q in 1..4 {
            assert_abs_diff_eq!(norm[q], 1.0 / 6.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn plus_state_distribution() {
        let a = C64::new(FRAC_1_SQRT_2, 0.0);
        let st = AnyState::Pure(product_state([a, a], 2));
        let p = ProbabilityMpo::from_state(&st).unwrap();
        let (_, norm) = p.conditional_distribution(&[]).unwrap();
        // direct single-qubit evaluation with ρ = |+><+|
        assert_abs_diff_eq!(norm[0], 0.25, epsilon = 1e-4);
        assert_abs_diff_eq!(norm[1], 0.4857, epsilon = 1e-4);
        assert_abs_diff_eq!(norm[2], 0.1321, epsilon = 1e-4);
        assert_abs_diff_eq!(norm[3], 0.1321, epsilon = 1e-4);
    }

    #[test]
    fn product_zero_chain_probability() {
        let st = AnyState::Pure(product_state([C64::new(1.0, 0.0), ZERO], 3));
        let p = ProbabilityMpo::from_state(&st).unwrap();
        assert_abs_diff_eq!(p.probability(&[0, 0, 0]).unwrap(), 0.125, epsilon = 1e-14);
    }

    #[test]
    fn ghz2_completeness() {
        let st = AnyState::Pure(states::ghz_state(2).unwrap());
        let p = ProbabilityMpo::from_state(&st).unwrap();
        let mut total = 0.0;
        for a in 0..4u8 {
            for b in 0..4u8 {
                total += p.probability(&[a, b]).unwrap();
            }
        }
        assert_abs_diff_eq!(total, 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p.trace(), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn conditionals_normalize() {
        let st = AnyState::Pure(states::ghz_state(3).unwrap());
        let p = ProbabilityMpo::from_state(&st).unwrap();
        for prefix in [vec![], vec![0u8], vec![1, 2]] {
            let (_, norm) = p.conditional_distribution(&prefix).unwrap();
            assert_abs_diff_eq!(norm.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
        }
    }
}
