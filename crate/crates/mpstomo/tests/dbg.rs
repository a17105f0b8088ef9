use mpstomo::dense::dense_state_vector;
use mpstomo::io::*;
use mpstomo::states::{self, AnyState};
use mpstomo::C64;

#[test]
fn dbg_roundtrip() {
    let st = AnyState::Pure(states::random_mps(2, 2, states::Realness::Real, 9).unwrap());
    let json = state_to_json(&st).unwrap();
    let back = state_from_json(&json).unwrap();
    let json2 = state_to_json(&back).unwrap();
    assert_eq!(json, json2);
}

#[test]
fn dbg_cluster4() {
    let n = 4;
    let v = dense_state_vector(&states::cluster_state(n).unwrap()).unwrap();
    let dim = 1 << n;
    let mut circuit = vec![0.0f64; dim];
    for (idx, c) in circuit.iter_mut().enumerate() {
        let mut sign = 1.0;
        for i in 0..n {
            let a = (idx >> (n - 1 - i)) & 1;
            let b = (idx >> (n - 1 - (i + 1) % n)) & 1;
            if a & b == 1 {
                sign = -sign;
            }
        }
        *c = sign;
    }
    println!("mps:     {:?}", v.iter().map(|z| z.re).collect::<Vec<_>>());
    println!("circuit: {circuit:?}");
}

#[test]
fn dbg_gghz() {
    let n = 2;
    let gamma = 0.3f64;
    let v = dense_state_vector(&states::generalized_ghz(n, gamma).unwrap()).unwrap();
    let ghz = dense_state_vector(&states::ghz_state(n).unwrap()).unwrap();
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
            *r += amp * C64::new(w, 0.0);
        }
    }
    println!("mps:     {:?}", v.iter().map(|z| z.re).collect::<Vec<_>>());
    println!("rotated: {:?}", rotated.iter().map(|z| z.re).collect::<Vec<_>>());
}

#[test]
fn dbg_thermal() {
    let rho = states::thermal_ising_dense(6, 1.0, 2.0).unwrap();
    for tol in [1e-10, 1e-12, 0.0] {
        let (mpo, err) = mpstomo::dense::mpo_from_dense(&rho, 64, tol).unwrap();
        let back = mpstomo::dense::dense_operator_matrix(&mpo).unwrap();
        let direct = (&back - &rho).norm() / rho.norm();
        println!(
            "tol={tol:e} fold_err={err:.3e} direct_err={direct:.3e} max_bond={}",
            mpo.max_bond()
        );
    }
}
