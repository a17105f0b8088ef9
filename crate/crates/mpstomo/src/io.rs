//! File formats: state JSON documents and sample files.
//!
//! State schema v1: `{format_version, kind: "mps"|"mpdo"|"mpo", n_sites, chi,
//! kappa, ti, sites: [[[ [re,im], ... ]]]}` with entries in (phys, left,
//! right) row-major order; `sites[i][k]` is the k-th Kraus slice of site i
//! (MPS and MPO use a single slice). TI states store one shared site.
//! Open-boundary MPOs carry a `site_dims` array of per-site (left, right)
//! bond dims; square-bond states omit it. Floats round-trip bit-exactly.
//!
//! Sample files: header `#mpstomo-samples v1 n=<N> seed=<seed> state=<digest>`
//! followed by one quart string per line.

use crate::error::{Error, Result};
use crate::sampler::SampleSet;
use crate::states::AnyState;
use crate::tensor::{
    KrausSite, MatrixProductDensityOperator, MatrixProductOperator, MatrixProductState, SiteTensor,
    MPO_PHYS_DIM, QUBIT_DIM,
};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const STATE_FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StateFile {
    pub format_version: u32,
    pub kind: String,
    pub n_sites: usize,
    pub chi: usize,
    pub kappa: usize,
    pub ti: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub site_dims: Option<Vec<(usize, usize)>>,
    pub sites: Vec<Vec<Vec<(f64, f64)>>>,
}

fn pack_entries(entries: &[C64]) -> Vec<(f64, f64)> {
    entries.iter().map(|z| (z.re, z.im)).collect()
}

fn unpack_entries(pairs: &[(f64, f64)]) -> Vec<C64> {
    pairs.iter().map(|&(re, im)| C64::new(re, im)).collect()
}

pub fn to_state_file(state: &AnyState) -> Result<StateFile> {
    match state {
        AnyState::Pure(mps) => {
            let chi = require_uniform_bond(
                mps.stored_sites().iter().map(|s| (s.left_dim(), s.right_dim())),
            )?;
            Ok(StateFile {
                format_version: STATE_FORMAT_VERSION,
                kind: "mps".into(),
                n_sites: mps.n_sites(),
                chi,
                kappa: 1,
                ti: mps.is_ti(),
                site_dims: None,
                sites: mps
                    .stored_sites()
                    .iter()
                    .map(|s| vec![pack_entries(s.entries())])
                    .collect(),
            })
        }
        AnyState::Mixed(mpdo) => {
            let chi = require_uniform_bond(
                mpdo.stored_sites().iter().map(|s| (s.left_dim(), s.right_dim())),
            )?;
            Ok(StateFile {
                format_version: STATE_FORMAT_VERSION,
                kind: "mpdo".into(),
                n_sites: mpdo.n_sites(),
                chi,
                kappa: mpdo.kappa(),
                ti: mpdo.is_ti(),
                site_dims: None,
                sites: mpdo
                    .stored_sites()
                    .iter()
                    .map(|s| {
                        (0..s.kappa())
                            .map(|k| {
                                let mut entries =
                                    Vec::with_capacity(QUBIT_DIM * s.left_dim() * s.right_dim());
                                for sp in 0..QUBIT_DIM {
                                    for l in 0..s.left_dim() {
                                        for r in 0..s.right_dim() {
                                            let z = s.get(k, sp, l, r);
                                            entries.push((z.re, z.im));
                                        }
                                    }
                                }
                                entries
                            })
                            .collect()
                    })
                    .collect(),
            })
        }
        AnyState::Operator(mpo) => {
            let dims: Vec<(usize, usize)> = mpo
                .stored_sites()
                .iter()
                .map(|s| (s.left_dim(), s.right_dim()))
                .collect();
            let uniform = dims.iter().all(|&(l, r)| l == dims[0].0 && r == dims[0].0);
            let chi = dims.iter().map(|&(l, r)| l.max(r)).max().unwrap_or(1);
            Ok(StateFile {
                format_version: STATE_FORMAT_VERSION,
                kind: "mpo".into(),
                n_sites: mpo.n_sites(),
                chi,
                kappa: 1,
                ti: mpo.is_ti(),
                site_dims: if uniform { None } else { Some(dims) },
                sites: mpo
                    .stored_sites()
                    .iter()
                    .map(|s| vec![pack_entries(s.entries())])
                    .collect(),
            })
        }
    }
}

fn require_uniform_bond(dims: impl Iterator<Item = (usize, usize)>) -> Result<usize> {
    let dims: Vec<(usize, usize)> = dims.collect();
    let chi = dims[0].0;
    if dims.iter().any(|&(l, r)| l != chi || r != chi) {
        return Err(Error::Argument(
            "state format v1 stores mps/mpdo with uniform square bonds only".into(),
        ));
    }
    Ok(chi)
}

pub fn from_state_file(file: &StateFile) -> Result<AnyState> {
    if file.format_version != STATE_FORMAT_VERSION {
        return Err(Error::Argument(format!(
            "unsupported state format version {}",
            file.format_version
        )));
    }
    let expect_sites = if file.ti { 1 } else { file.n_sites };
    if file.sites.len() != expect_sites {
        return Err(Error::Argument(format!(
            "expected {expect_sites} stored sites, found {}",
            file.sites.len()
        )));
    }
    match file.kind.as_str() {
        "mps" => {
            let sites: Vec<SiteTensor> = file
                .sites
                .iter()
                .map(|slices| site_from_entries(slices, QUBIT_DIM, file.chi, file.chi))
                .collect::<Result<_>>()?;
            if file.ti {
                MatrixProductState::new_ti(sites.into_iter().next().unwrap(), file.n_sites)
                    .map(AnyState::Pure)
            } else {
                MatrixProductState::new(sites).map(AnyState::Pure)
            }
        }
        "mpdo" => {
            let sites: Vec<KrausSite> = file
                .sites
                .iter()
                .map(|slices| {
                    if slices.len() != file.kappa {
                        return Err(Error::Argument(format!(
                            "expected {} kraus slices, found {}",
                            file.kappa,
                            slices.len()
                        )));
                    }
                    let mut site = KrausSite::zeros(file.kappa, file.chi, file.chi);
                    for (k, slice) in slices.iter().enumerate() {
                        let entries = unpack_entries(slice);
                        if entries.len() != QUBIT_DIM * file.chi * file.chi {
                            return Err(Error::Argument("kraus slice length mismatch".into()));
                        }
                        let mut it = entries.into_iter();
                        for sp in 0..QUBIT_DIM {
                            for l in 0..file.chi {
                                for r in 0..file.chi {
                                    site.set(k, sp, l, r, it.next().unwrap());
                                }
                            }
                        }
                    }
                    Ok(site)
                })
                .collect::<Result<_>>()?;
            if file.ti {
                MatrixProductDensityOperator::new_ti(
                    sites.into_iter().next().unwrap(),
                    file.n_sites,
                )
                .map(AnyState::Mixed)
            } else {
                MatrixProductDensityOperator::new(sites).map(AnyState::Mixed)
            }
        }
        "mpo" => {
            let dims: Vec<(usize, usize)> = match &file.site_dims {
                Some(d) => {
                    if d.len() != expect_sites {
                        return Err(Error::Argument("site_dims length mismatch".into()));
                    }
                    d.clone()
                }
                None => vec![(file.chi, file.chi); expect_sites],
            };
            let sites: Vec<SiteTensor> = file
                .sites
                .iter()
                .zip(&dims)
                .map(|(slices, &(l, r))| site_from_entries(slices, MPO_PHYS_DIM, l, r))
                .collect::<Result<_>>()?;
            if file.ti {
                MatrixProductOperator::new_ti(sites.into_iter().next().unwrap(), file.n_sites)
                    .map(AnyState::Operator)
            } else {
                MatrixProductOperator::new(sites).map(AnyState::Operator)
            }
        }
        other => Err(Error::Argument(format!("unknown state kind {other:?}"))),
    }
}

fn site_from_entries(
    slices: &[Vec<(f64, f64)>],
    phys: usize,
    left: usize,
    right: usize,
) -> Result<SiteTensor> {
    if slices.len() != 1 {
        return Err(Error::Argument(format!(
            "expected a single tensor slice, found {}",
            slices.len()
        )));
    }
    let entries = unpack_entries(&slices[0]);
    if entries.len() != phys * left * right {
        return Err(Error::Argument(format!(
            "site entry count {} != {}x{}x{}",
            entries.len(),
            phys,
            left,
            right
        )));
    }
    let mut t = SiteTensor::zeros(phys, left, right);
    t.entries_mut().copy_from_slice(&entries);
    Ok(t)
}

pub fn state_to_json(state: &AnyState) -> Result<String> {
    Ok(serde_json::to_string_pretty(&to_state_file(state)?)?)
}

pub fn state_from_json(json: &str) -> Result<AnyState> {
    let file: StateFile = serde_json::from_str(json)?;
    from_state_file(&file)
}

/// Digest identifying a state: SHA-256 of its canonical JSON document.
pub fn state_digest(state: &AnyState) -> Result<String> {
    let json = serde_json::to_string(&to_state_file(state)?)?;
    let mut h = Sha256::new();
    h.update(json.as_bytes());
    Ok(hex::encode(h.finalize()))
}

pub fn digest_bytes(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(bytes);
    hex::encode(h.finalize())
}

pub fn write_state(path: &std::path::Path, state: &AnyState) -> Result<()> {
    std::fs::write(path, state_to_json(state)? + "\n")?;
    Ok(())
}

pub fn read_state(path: &std::path::Path) -> Result<AnyState> {
    state_from_json(&std::fs::read_to_string(path)?)
}

pub fn samples_to_string(set: &SampleSet) -> String {
    let mut out = format!(
        "#mpstomo-samples v1 n={} seed={} state={}\n",
        set.n_sites, set.seed, set.state_digest
    );
    for outcome in &set.outcomes {
        for &q in outcome {
            out.push((b'0' + q) as char);
        }
        out.push('\n');
    }
    out
}

pub fn samples_from_string(text: &str) -> Result<SampleSet> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Argument("empty sample file".into()))?;
    let rest = header
        .strip_prefix("#mpstomo-samples v1 ")
        .ok_or_else(|| Error::Argument(format!("bad sample header {header:?}")))?;
    let mut n_sites = None;
    let mut seed = None;
    let mut digest = None;
    for field in rest.split_whitespace() {
        match field.split_once('=') {
            Some(("n", v)) => n_sites = v.parse::<usize>().ok(),
            Some(("seed", v)) => seed = v.parse::<u64>().ok(),
            Some(("state", v)) => digest = Some(v.to_string()),
            _ => return Err(Error::Argument(format!("bad header field {field:?}"))),
        }
    }
    let n_sites = n_sites.ok_or_else(|| Error::Argument("header missing n".into()))?;
    let seed = seed.ok_or_else(|| Error::Argument("header missing seed".into()))?;
    let digest = digest.ok_or_else(|| Error::Argument("header missing state digest".into()))?;
    let mut outcomes = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        if line.len() != n_sites {
            return Err(Error::Argument(format!(
                "line {}: expected {} symbols, found {}",
                lineno + 2,
                n_sites,
                line.len()
            )));
        }
        let mut row = Vec::with_capacity(n_sites);
        for ch in line.bytes() {
            if !(b'0'..=b'3').contains(&ch) {
                return Err(Error::Argument(format!(
                    "line {}: invalid outcome symbol {:?}",
                    lineno + 2,
                    ch as char
                )));
            }
            row.push(ch - b'0');
        }
        outcomes.push(row);
    }
    Ok(SampleSet { n_sites, outcomes, seed, state_digest: digest })
}

pub fn write_samples(path: &std::path::Path, set: &SampleSet) -> Result<()> {
    std::fs::write(path, samples_to_string(set))?;
    Ok(())
}

pub fn read_samples(path: &std::path::Path) -> Result<SampleSet> {
    samples_from_string(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states;

    #[test]
    fn mps_roundtrip_bit_exact() {
        let st = AnyState::Pure(states::random_mps(4, 2, states::Realness::Complex, 9).unwrap());
        let json = state_to_json(&st).unwrap();
        let back = state_from_json(&json).unwrap();
        let json2 = state_to_json(&back).unwrap();
        assert_eq!(json, json2);
        match (st, back) {
            (AnyState::Pure(a), AnyState::Pure(b)) => assert_eq!(a, b),
            _ => panic!("kind changed in roundtrip"),
        }
    }

    #[test]
    fn mpdo_roundtrip() {
        let st = AnyState::Mixed(states::random_mpdo(3, 2, 2, 4).unwrap());
        let back = state_from_json(&state_to_json(&st).unwrap()).unwrap();
        match (st, back) {
            (AnyState::Mixed(a), AnyState::Mixed(b)) => assert_eq!(a, b),
            _ => panic!("kind changed in roundtrip"),
        }
    }

    #[test]
    fn mpo_roundtrip_with_site_dims() {
        let (mpo, _) = states::thermal_ising_mpo(4, 1.0, 2.0, 16, 1e-10).unwrap();
        let st = AnyState::Operator(mpo);
        let back = state_from_json(&state_to_json(&st).unwrap()).unwrap();
        match (st, back) {
            (AnyState::Operator(a), AnyState::Operator(b)) => assert_eq!(a, b),
            _ => panic!("kind changed in roundtrip"),
        }
    }

    #[test]
    fn sample_file_roundtrip() {
        let set = SampleSet {
            n_sites: 3,
            outcomes: vec![vec![0, 1, 2], vec![3, 3, 0]],
            seed: 77,
            state_digest: "abcd".into(),
        };
        let text = samples_to_string(&set);
        assert!(text.starts_with("#mpstomo-samples v1 n=3 seed=77 state=abcd\n"));
        let back = samples_from_string(&text).unwrap();
        assert_eq!(set, back);
    }
}
