//! Exact autoregressive sampling of the SIC outcome distribution.
//!
//! Samples are drawn site by site from the chain of conditionals. The sample
//! index space is split into fixed-size blocks, each driven by its own
//! ChaCha stream, so results are bit-identical regardless of worker count.

use crate::error::{Error, Result};
use crate::linalg::CMat;
use crate::sicpovm::{ProbabilityMpo, N_OUTCOMES};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Samples per deterministic RNG block; fixed so the partition does not
/// depend on the worker count.
pub const SAMPLE_BLOCK: usize = 1024;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SampleSet {
    pub n_sites: usize,
    pub outcomes: Vec<Vec<u8>>,
    pub seed: u64,
    pub state_digest: String,
}

impl SampleSet {
    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    /// Unique outcome strings with multiplicities, in first-seen order.
    pub fn dedup(&self) -> Vec<(Vec<u8>, usize)> {
        let mut order: Vec<(Vec<u8>, usize)> = Vec::new();
        let mut index: std::collections::HashMap<&[u8], usize> = std::collections::HashMap::new();
        for m in &self.outcomes {
            if let Some(&i) = index.get(m.as_slice()) {
                order[i].1 += 1;
            } else {
                index.insert(m.as_slice(), order.len());
                order.push((m.clone(), 1));
            }
        }
        // HashMap iteration never observed; order vector is deterministic.
        order
    }
}

/// Draw `count` i.i.d. samples from P(m)/Tr ρ.
pub fn sample(
    pmpo: &ProbabilityMpo,
    count: usize,
    seed: u64,
    state_digest: &str,
) -> Result<SampleSet> {
    if count == 0 {
        return Err(Error::Argument("sample count must be >= 1".into()));
    }
    if pmpo.trace() <= 0.0 {
        return Err(Error::Integrity(format!(
            "cannot sample from a state with Tr rho = {} <= 0",
            pmpo.trace()
        )));
    }
    let n_blocks = count.div_ceil(SAMPLE_BLOCK);
    let blocks: Result<Vec<Vec<Vec<u8>>>> = (0..n_blocks)
        .into_par_iter()
        .map(|b| {
            let lo = b * SAMPLE_BLOCK;
            let hi = ((b + 1) * SAMPLE_BLOCK).min(count);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b as u64 + 1);
            let mut out = Vec::with_capacity(hi - lo);
            let mut walker = Walker::new(pmpo);
            for _ in lo..hi {
                out.push(walker.draw(&mut rng)?);
            }
            Ok(out)
        })
        .collect();
    let mut outcomes = Vec::with_capacity(count);
    for block in blocks? {
        outcomes.extend(block);
    }
    Ok(SampleSet {
        n_sites: pmpo.n_sites(),
        outcomes,
        seed,
        state_digest: state_digest.to_string(),
    })
}

/// Per-thread sampling state: the running left prefix product.
struct Walker<'a> {
    pmpo: &'a ProbabilityMpo,
    left: CMat,
    next: CMat,
    vals: [f64; N_OUTCOMES],
}

impl<'a> Walker<'a> {
    fn new(pmpo: &'a ProbabilityMpo) -> Self {
        let d0 = pmpo.suffix(pmpo.n_sites()).rows;
        Walker {
            pmpo,
            left: CMat::identity(d0),
            next: CMat::zeros(d0, d0),
            vals: [0.0; N_OUTCOMES],
        }
    }

    fn draw(&mut self, rng: &mut ChaCha8Rng) -> Result<Vec<u8>> {
        let n = self.pmpo.n_sites();
        let d0 = self.pmpo.suffix(n).rows;
        self.left = CMat::identity(d0);
        let mut string = Vec::with_capacity(n);
        for i in 0..n {
            self.pmpo.site_values(i, &self.left, &mut self.vals)?;
            let total: f64 = self.vals.iter().sum();
            if total <= 0.0 {
                return Err(Error::Integrity(
                    "conditional distribution vanished during sampling".into(),
                ));
            }
            let u: f64 = rng.gen::<f64>() * total;
            let mut acc = 0.0;
            let mut q = N_OUTCOMES - 1;
            for (m, &v) in self.vals.iter().enumerate() {
                acc += v;
                if u < acc {
                    q = m;
                    break;
                }
            }
            string.push(q as u8);
            self.left.mul_into(&self.pmpo.site(i).b[q], &mut self.next);
            std::mem::swap(&mut self.left, &mut self.next);
        }
        Ok(string)
    }
}
