//! Target-state factories with deterministic seeding.
//!
//! Random entries are drawn from a ChaCha8 stream seeded by the user seed, in
//! a fixed (site, kraus, phys, left, right) order with the real part drawn
//! before the imaginary part, so a `StateSpec` pins the state bit-exactly.

use crate::dense::mpo_from_dense;
use crate::error::{Error, Result};
use crate::tensor::{
    KrausSite, MatrixProductDensityOperator, MatrixProductOperator, MatrixProductState, SiteTensor,
    QUBIT_DIM,
};
use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Realness {
    Real,
    Complex,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateKind {
    RandomMps,
    RandomMpdo,
    Cluster,
    Ghz,
    GeneralizedGhz,
    PhaseGhz,
    ThermalIsing,
}

/// Everything needed to rebuild a target state deterministically.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StateSpec {
    pub kind: StateKind,
    pub n_sites: usize,
    #[serde(default)]
    pub chi: usize,
    #[serde(default)]
    pub kappa: usize,
    #[serde(default = "default_realness")]
    pub realness: Realness,
    #[serde(default)]
    pub rot_gamma: f64,
    #[serde(default)]
    pub phi1: f64,
    #[serde(default)]
    pub phi2: f64,
    #[serde(default)]
    pub field_b: f64,
    #[serde(default)]
    pub temperature: f64,
    #[serde(default)]
    pub seed: u64,
    /// Bond cap for the thermal-state compressor.
    #[serde(default = "default_chi_max")]
    pub chi_max: usize,
    /// Relative singular-value cutoff for the thermal-state compressor.
    #[serde(default = "default_tol")]
    pub tol: f64,
}

fn default_realness() -> Realness {
    Realness::Real
}
fn default_chi_max() -> usize {
    64
}
fn default_tol() -> f64 {
    1e-10
}

/// A target state of any of the three container kinds.
#[derive(Clone, Debug)]
pub enum AnyState {
    Pure(MatrixProductState),
    Mixed(MatrixProductDensityOperator),
    Operator(MatrixProductOperator),
}

impl AnyState {
    pub fn n_sites(&self) -> usize {
        match self {
            AnyState::Pure(s) => s.n_sites(),
            AnyState::Mixed(s) => s.n_sites(),
            AnyState::Operator(s) => s.n_sites(),
        }
    }

    /// The induced operator form (κ=1 lifting for pure states).
    pub fn to_mpo(&self) -> MatrixProductOperator {
        match self {
            AnyState::Pure(s) => MatrixProductDensityOperator::from_pure(s).to_mpo(),
            AnyState::Mixed(s) => s.to_mpo(),
            AnyState::Operator(o) => o.clone(),
        }
    }

    pub fn trace(&self) -> C64 {
        match self {
            AnyState::Pure(s) => C64::new(s.norm_sq(), 0.0),
            _ => self.to_mpo().trace(),
        }
    }
}

fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    rng.gen_range(-1.0..=1.0)
}

/// Random MPS with square χ×χ matrices at every site, entries i.i.d. uniform
/// on [−1, 1] (imaginary parts too when complex).
pub fn random_mps(n: usize, chi: usize, realness: Realness, seed: u64) -> Result<MatrixProductState> {
    if n < 2 || chi < 1 {
        return Err(Error::Argument(format!("need n >= 2 and chi >= 1, got n={n} chi={chi}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sites = Vec::with_capacity(n);
    for _ in 0..n {
        let mut t = SiteTensor::zeros(QUBIT_DIM, chi, chi);
        for s in 0..QUBIT_DIM {
            for l in 0..chi {
                for r in 0..chi {
                    let re = uniform(&mut rng);
                    let im = match realness {
                        Realness::Real => 0.0,
                        Realness::Complex => uniform(&mut rng),
                    };
                    t.set(s, l, r, C64::new(re, im));
                }
            }
        }
        sites.push(t);
    }
    MatrixProductState::new(sites)
}

/// Random MPDO with complex χ×χ matrices across κ Kraus slices.
pub fn random_mpdo(n: usize, chi: usize, kappa: usize, seed: u64) -> Result<MatrixProductDensityOperator> {
    if n < 2 || chi < 1 || kappa < 1 {
        return Err(Error::Argument(format!(
            "need n >= 2, chi >= 1, kappa >= 1, got n={n} chi={chi} kappa={kappa}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sites = Vec::with_capacity(n);
    for _ in 0..n {
        let mut t = KrausSite::zeros(kappa, chi, chi);
        for k in 0..kappa {
            for s in 0..QUBIT_DIM {
                for l in 0..chi {
                    for r in 0..chi {
                        let re = uniform(&mut rng);
                        let im = uniform(&mut rng);
                        t.set(k, s, l, r, C64::new(re, im));
                    }
                }
            }
        }
        sites.push(t);
    }
    MatrixProductDensityOperator::new(sites)
}

fn diag_ti_state(n: usize, c0: [C64; 2], c1: [C64; 2]) -> Result<MatrixProductState> {
    let mut t = SiteTensor::zeros(QUBIT_DIM, 2, 2);
    t.set(0, 0, 0, c0[0]);
    t.set(0, 1, 1, c0[1]);
    t.set(1, 0, 0, c1[0]);
    t.set(1, 1, 1, c1[1]);
    MatrixProductState::new_ti(t, n)
}

/// 1D cluster state on a ring: C⁰ = [[0,0],[1,1]], C¹ = [[1,−1],[0,0]].
pub fn cluster_state(n: usize) -> Result<MatrixProductState> {
    if n < 3 {
        return Err(Error::Argument(format!("cluster state needs n >= 3, got {n}")));
    }
    let one = C64::new(1.0, 0.0);
    let mut t = SiteTensor::zeros(QUBIT_DIM, 2, 2);
    t.set(0, 1, 0, one);
    t.set(0, 1, 1, one);
    t.set(1, 0, 0, one);
    t.set(1, 0, 1, -one);
    MatrixProductState::new_ti(t, n)
}

/// GHZ state |0…0⟩ + |1…1⟩ (unnormalized): C⁰ = diag(1,0), C¹ = diag(0,1).
pub fn ghz_state(n: usize) -> Result<MatrixProductState> {
    if n < 2 {
        return Err(Error::Argument(format!("GHZ needs n >= 2, got {n}")));
    }
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    diag_ti_state(n, [one, zero], [zero, one])
}

/// GHZ rotated by U_γ on every site: C⁰ = diag(cos γ, sin γ),
/// C¹ = diag(−sin γ, cos γ).
pub fn generalized_ghz(n: usize, rot_gamma: f64) -> Result<MatrixProductState> {
    if n < 2 {
        return Err(Error::Argument(format!("GHZ needs n >= 2, got {n}")));
    }
    let (s, c) = rot_gamma.sin_cos();
    diag_ti_state(
        n,
        [C64::new(c, 0.0), C64::new(s, 0.0)],
        [C64::new(-s, 0.0), C64::new(c, 0.0)],
    )
}

/// Phase-decorated GHZ e^{iNφ₁}|0…0⟩ + e^{iNφ₂}|1…1⟩:
/// C⁰ = diag(e^{iφ₁}, 0), C¹ = diag(0, e^{iφ₂}).
pub fn phase_ghz(n: usize, phi1: f64, phi2: f64) -> Result<MatrixProductState> {
    if n < 2 {
        return Err(Error::Argument(format!("GHZ needs n >= 2, got {n}")));
    }
    let zero = C64::new(0.0, 0.0);
    diag_ti_state(
        n,
        [C64::from_polar(1.0, phi1), zero],
        [zero, C64::from_polar(1.0, phi2)],
    )
}

pub const MAX_THERMAL_SITES: usize = 10;

/// Dense thermal state of the open-chain quantum Ising model
/// H = Σ_j σ^z_j σ^z_{j+1} + B Σ_j σ^x_j, ρ_T = e^{−H/T}/Tr(e^{−H/T}).
pub fn thermal_ising_dense(n: usize, field_b: f64, temperature: f64) -> Result<DMatrix<C64>> {
    if !(2..=MAX_THERMAL_SITES).contains(&n) {
        return Err(Error::SizeGuard(format!(
            "thermal Ising dense path needs 2 <= n <= {MAX_THERMAL_SITES}, got {n}"
        )));
    }
    if temperature <= 0.0 {
        return Err(Error::Argument("temperature must be positive".into()));
    }
    let dim = 1usize << n;
    let mut h = DMatrix::<f64>::zeros(dim, dim);
    let zsign = |state: usize, j: usize| -> f64 {
        if (state >> (n - 1 - j)) & 1 == 0 {
            1.0
        } else {
            -1.0
        }
    };
    for state in 0..dim {
        for j in 0..n - 1 {
            h[(state, state)] += zsign(state, j) * zsign(state, j + 1);
        }
        for j in 0..n {
            let flipped = state ^ (1 << (n - 1 - j));
            h[(state, flipped)] += field_b;
        }
    }
    let eig = nalgebra::SymmetricEigen::new(h);
    let weights: Vec<f64> = eig
        .eigenvalues
        .iter()
        .map(|&e| (-e / temperature).exp())
        .collect();
    let z: f64 = weights.iter().sum();
    let mut rho = DMatrix::<C64>::zeros(dim, dim);
    for (k, &w) in weights.iter().enumerate() {
        let col = eig.eigenvectors.column(k);
        let f = w / z;
        for i in 0..dim {
            let vi = col[i];
            if vi == 0.0 {
                continue;
            }
            for j in 0..dim {
                rho[(i, j)] += C64::new(f * vi * col[j], 0.0);
            }
        }
    }
    Ok(rho)
}

/// Thermal Ising target compressed into an MPO; returns the MPO and the
/// relative reconstruction error of the compression.
pub fn thermal_ising_mpo(
    n: usize,
    field_b: f64,
    temperature: f64,
    chi_max: usize,
    tol: f64,
) -> Result<(MatrixProductOperator, f64)> {
    let rho = thermal_ising_dense(n, field_b, temperature)?;
    mpo_from_dense(&rho, chi_max, tol)
}

/// Build any target state from its spec.
pub fn build(spec: &StateSpec) -> Result<AnyState> {
    match spec.kind {
        StateKind::RandomMps => Ok(AnyState::Pure(random_mps(
            spec.n_sites,
            spec.chi,
            spec.realness,
            spec.seed,
        )?)),
        StateKind::RandomMpdo => Ok(AnyState::Mixed(random_mpdo(
            spec.n_sites,
            spec.chi,
            spec.kappa,
            spec.seed,
        )?)),
        StateKind::Cluster => Ok(AnyState::Pure(cluster_state(spec.n_sites)?)),
        StateKind::Ghz => Ok(AnyState::Pure(ghz_state(spec.n_sites)?)),
        StateKind::GeneralizedGhz => Ok(AnyState::Pure(generalized_ghz(
            spec.n_sites,
            spec.rot_gamma,
        )?)),
        StateKind::PhaseGhz => Ok(AnyState::Pure(phase_ghz(spec.n_sites, spec.phi1, spec.phi2)?)),
        StateKind::ThermalIsing => {
            let (mpo, _err) = thermal_ising_mpo(
                spec.n_sites,
                spec.field_b,
                spec.temperature,
                spec.chi_max,
                spec.tol,
            )?;
            Ok(AnyState::Operator(mpo))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::{dense_density_matrix, dense_state_vector};
    use approx::assert_abs_diff_eq;

    #[test]
    fn random_mps_deterministic() {
        let a = random_mps(4, 2, Realness::Real, 7).unwrap();
        let b = random_mps(4, 2, Realness::Real, 7).unwrap();
        assert_eq!(a, b);
        let c = random_mps(4, 2, Realness::Real, 8).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn random_mps_real_has_zero_imag() {
        let a = random_mps(5, 3, Realness::Real, 1).unwrap();
        assert!(a.is_real());
        let b = random_mps(5, 3, Realness::Complex, 1).unwrap();
        assert!(!b.is_real());
    }

    #[test]
    fn ghz3_dense() {
        let v = dense_state_vector(&ghz_state(3).unwrap()).unwrap();
        let expect = [1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0];
        for (a, e) in v.iter().zip(expect) {
            assert_abs_diff_eq!(a.re, e, epsilon = 1e-15);
        }
    }

    #[test]
    fn phase_ghz_dense() {
        let n = 3;
        let (p1, p2) = (0.3, -0.8);
        let v = dense_state_vector(&phase_ghz(n, p1, p2).unwrap()).unwrap();
        let want0 = C64::from_polar(1.0, n as f64 * p1);
        let want7 = C64::from_polar(1.0, n as f64 * p2);
        assert_abs_diff_eq!((v[0] - want0).norm(), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!((v[7] - want7).norm(), 0.0, epsilon = 1e-14);
        for k in 1..7 {
            assert_abs_diff_eq!(v[k].norm(), 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn generalized_ghz_matches_rotation_oracle() {
        // The printed site matrices carry the rotation with a per-site sign
        // on the s = 1 entries: the state equals Z^{⊗N} U_γ^{⊗N} |GHZ⟩.
        let n = 4;
        let gamma = 0.3;
        let v = dense_state_vector(&generalized_ghz(n, gamma).unwrap()).unwrap();
        let ghz = dense_state_vector(&ghz_state(n).unwrap()).unwrap();
        let (s, c) = gamma.sin_cos();
        let u = [[c, -s], [s, c]];
        let dim = 1 << n;
        let mut rotated = vec![C64::new(0.0, 0.0); dim];
        for (idx, r) in rotated.iter_mut().enumerate() {
            for (src, &amp) in ghz.iter().enumerate() {
                if amp == C64::new(0.0, 0.0) {
                    continue;
                }
                let mut w = 1.0;
                for site in 0..n {
                    let bi = (idx >> (n - 1 - site)) & 1;
                    let bs = (src >> (n - 1 - site)) & 1;
                    w *= u[bi][bs];
                }
                let z_layer = if (idx as u32).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
                *r += amp * C64::new(z_layer * w, 0.0);
            }
        }
        for (a, b) in v.iter().zip(&rotated) {
            assert_abs_diff_eq!((a - b).norm(), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn generalized_ghz_at_zero_equals_ghz() {
        assert_eq!(generalized_ghz(5, 0.0).unwrap(), ghz_state(5).unwrap());
        assert_eq!(phase_ghz(5, 0.0, 0.0).unwrap(), ghz_state(5).unwrap());
    }

    #[test]
    fn cluster_equals_ring_cz_circuit() {
        // The printed site matrices generate the ring-CZ cluster state with a
        // Z on every site folded in: amp(s) ∝ (−1)^{Σ s_i}(−1)^{Σ s_i s_{i+1}},
        // i.e. the CZ ring applied to |−⟩^{⊗N}.
        let n = 4;
        let v = dense_state_vector(&cluster_state(n).unwrap()).unwrap();
        let dim = 1 << n;
        let mut circuit = vec![0.0f64; dim];
        for (idx, c) in circuit.iter_mut().enumerate() {
            let mut sign = if (idx as u32).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
            for i in 0..n {
                let a = (idx >> (n - 1 - i)) & 1;
                let b = (idx >> (n - 1 - (i + 1) % n)) & 1;
                if a & b == 1 {
                    sign = -sign;
                }
            }
            *c = sign;
        }
        // equal up to global scale: overlap² = |v|² |circuit|²
        let dot: C64 = v
            .iter()
            .zip(&circuit)
            .map(|(a, &b)| a.conj() * C64::new(b, 0.0))
            .sum();
        let na: f64 = v.iter().map(|a| a.norm_sqr()).sum();
        let nb: f64 = circuit.iter().map(|b| b * b).sum();
        assert_abs_diff_eq!(dot.norm_sqr() / (na * nb), 1.0, epsilon = 1e-12);
        // all amplitudes in {−1, 0, +1}
        for a in &v {
            assert!(a.im == 0.0 && (a.re.abs() < 1e-15 || (a.re.abs() - 1.0).abs() < 1e-15));
        }
    }

    #[test]
    fn cluster_stabilizer_expectations() {
        // σ^x_i σ^z_{i−1} σ^z_{i+1} has expectation −1 on every ring site for
        // this sign convention of the cluster tensors.
        let n = 5;
        let psi = cluster_state(n).unwrap();
        let norm = psi.norm_sq();
        let x = crate::linalg::CMat::from_rows(&[
            &[C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
            &[C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
        ]);
        let z = crate::linalg::CMat::from_rows(&[
            &[C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
            &[C64::new(0.0, 0.0), C64::new(-1.0, 0.0)],
        ]);
        for i in 0..n {
            let shifted = psi
                .apply_one_site(i, &x)
                .apply_one_site((i + n - 1) % n, &z)
                .apply_one_site((i + 1) % n, &z);
            let val = psi.inner(&shifted).unwrap().re / norm;
            assert_abs_diff_eq!(val, -1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn random_mpdo_psd_and_kappa_one_rank_one() {
        let rho = dense_density_matrix(&random_mpdo(4, 2, 2, 1).unwrap()).unwrap();
        let herm = (&rho - rho.adjoint()).norm();
        assert!(herm < 1e-12, "hermiticity residue {herm}");
        let eig = nalgebra::SymmetricEigen::new(rho);
        let min = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(min > -1e-10, "min eigenvalue {min}");

        let rho1 = dense_density_matrix(&random_mpdo(4, 2, 1, 3).unwrap()).unwrap();
        let eig1 = nalgebra::SymmetricEigen::new(rho1);
        let mut evs: Vec<f64> = eig1.eigenvalues.iter().cloned().collect();
        evs.sort_by(|a, b| b.partial_cmp(a).unwrap());
        assert!(evs[1].abs() < 1e-10 * evs[0], "second eigenvalue {} vs {}", evs[1], evs[0]);
    }

    #[test]
    fn thermal_limits() {
        // T -> infinity: maximally mixed.
        let rho = thermal_ising_dense(4, 1.0, 1e9).unwrap();
        let dim = 16.0;
        for i in 0..16 {
            for j in 0..16 {
                let want = if i == j { 1.0 / dim } else { 0.0 };
                assert_abs_diff_eq!(rho[(i, j)].re, want, epsilon = 1e-6);
            }
        }
        // trace exactly 1 after normalization
        let rho2 = thermal_ising_dense(6, 1.0, 2.0).unwrap();
        let tr: C64 = (0..64).map(|i| rho2[(i, i)]).sum();
        assert_abs_diff_eq!(tr.re, 1.0, epsilon = 1e-14);
        // guard
        assert!(matches!(
            thermal_ising_dense(12, 1.0, 2.0),
            Err(Error::SizeGuard(_))
        ));
    }

    #[test]
    fn thermal_purity_matches_eigensolve_oracle() {
        let (n, b, t) = (4, 1.0, 2.0);
        let rho = thermal_ising_dense(n, b, t).unwrap();
        let purity: f64 = rho.iter().map(|z| z.norm_sqr()).sum();
        // independent oracle: purity = Σ e^{−2E/T} / (Σ e^{−E/T})²
        let dim = 1usize << n;
        let mut h = DMatrix::<f64>::zeros(dim, dim);
        let zs = |st: usize, j: usize| if (st >> (n - 1 - j)) & 1 == 0 { 1.0 } else { -1.0 };
        for st in 0..dim {
            for j in 0..n - 1 {
                h[(st, st)] += zs(st, j) * zs(st, j + 1);
            }
            for j in 0..n {
                h[(st, st ^ (1 << (n - 1 - j)))] += b;
            }
        }
        let es = nalgebra::SymmetricEigen::new(h).eigenvalues;
        let z1: f64 = es.iter().map(|&e| (-e / t).exp()).sum();
        let z2: f64 = es.iter().map(|&e| (-2.0 * e / t).exp()).sum();
        assert_abs_diff_eq!(purity, z2 / (z1 * z1), epsilon = 1e-12 * z2 / (z1 * z1));
    }

    #[test]
    fn thermal_compression_roundtrip() {
        let (mpo, err) = thermal_ising_mpo(6, 1.0, 2.0, 64, 1e-10).unwrap();
        assert!(err < 1e-8, "reconstruction err {err}");
        assert_abs_diff_eq!(mpo.trace().re, 1.0, epsilon = 1e-10);
    }
}
