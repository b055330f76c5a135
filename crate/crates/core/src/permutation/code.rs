use num_complex::Complex64;

use super::qam::Constellation;
use crate::error::{Error, Result};

/// A unit-length code for `L` parallel subchannels: message `m` is sent as
/// `points[perms[l][m]]` on block `l`. Block 0 always uses the identity, which
/// only fixes the message labelling.
#[derive(Debug, Clone, PartialEq)]
pub struct PermutationCode {
    constellation: Constellation,
    perms: Vec<Vec<usize>>,
}

impl PermutationCode {
    pub fn new(constellation: Constellation, perms: Vec<Vec<usize>>) -> Result<Self> {
        let k = constellation.len();
        if perms.is_empty() {
            return Err(Error::InvalidCode("a code needs at least one block".into()));
        }
        for (b, perm) in perms.iter().enumerate() {
            if perm.len() != k {
                return Err(Error::InvalidCode(format!("permutation {b} has {} entries, expected {k}", perm.len())));
            }
            let mut seen = vec![false; k];
            for &v in perm {
                if v >= k || std::mem::replace(&mut seen[v], true) {
                    return Err(Error::InvalidCode(format!("permutation {b} is not a bijection")));
                }
            }
        }
        if perms[0].iter().enumerate().any(|(i, &v)| i != v) {
            return Err(Error::InvalidCode("the first permutation must be the identity".into()));
        }
        Ok(Self { constellation, perms })
    }

    /// The repetition code: identity permutation on every block.
    pub fn identity(constellation: Constellation, blocks: usize) -> Result<Self> {
        let id: Vec<usize> = (0..constellation.len()).collect();
        Self::new(constellation, vec![id; blocks])
    }

    pub fn constellation(&self) -> &Constellation {
        &self.constellation
    }

    pub fn perms(&self) -> &[Vec<usize>] {
        &self.perms
    }

    /// `L`.
    pub fn blocks(&self) -> usize {
        self.perms.len()
    }

    /// Number of messages `2^(L R)`.
    pub fn messages(&self) -> usize {
        self.constellation.len()
    }

    /// Total bits carried by one codeword, `L R`.
    pub fn bits(&self) -> u32 {
        self.constellation.bits()
    }

    #[inline]
    pub fn symbol(&self, block: usize, message: usize) -> Complex64 {
        self.constellation.points()[self.perms[block][message]]
    }

    pub fn encode(&self, message: usize) -> Result<Vec<Complex64>> {
        if message >= self.messages() {
            return Err(Error::Range(format!("message {message} out of range for {} messages", self.messages())));
        }
        Ok((0..self.blocks()).map(|b| self.symbol(b, message)).collect())
    }

    /// For every prefix length `l = 1..=L` (index `l - 1`), the minimum over
    /// message pairs of `prod_{k<l} |x_k(m) - x_k(m')|`.
    pub fn prefix_min_product_distances(&self) -> Vec<f64> {
        let k = self.messages();
        let mut mins = vec![f64::INFINITY; self.blocks()];
        for a in 0..k {
            for b in a + 1..k {
                let mut prod = 1.0;
                for (block, min) in mins.iter_mut().enumerate() {
                    prod *= (self.symbol(block, a) - self.symbol(block, b)).norm();
                    if prod < *min {
                        *min = prod;
                    }
                }
            }
        }
        mins
    }

    /// Product-distance part of the universality evidence; the decay
    /// estimate is filled in by simulation.
    pub fn evidence(&self) -> UniversalityEvidence {
        let min_product_distance = self.prefix_min_product_distances();
        let worst_subset =
            min_product_distance.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).map(|(i, _)| i + 1).unwrap_or(1);
        UniversalityEvidence {
            min_product_distance,
            worst_subset,
            decay_estimate: None,
            decay_by_prefix: vec![None; self.blocks()],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UniversalityEvidence {
    /// Minimum product distance over the prefix `{1..l}`, at index `l - 1`.
    pub min_product_distance: Vec<f64>,
    /// Prefix length with the smallest minimum product distance.
    pub worst_subset: usize,
    /// Empirical `delta` in `P(error | no outage) ~ exp(-eta^delta)`, pooled
    /// over stopping blocks.
    pub decay_estimate: Option<f64>,
    pub decay_by_prefix: Vec<Option<f64>>,
}

impl UniversalityEvidence {
    /// Prefixes whose codewords are pairwise distinct.
    pub fn decodable_prefixes(&self) -> Vec<usize> {
        self.min_product_distance.iter().enumerate().filter(|(_, d)| **d > 0.0).map(|(i, _)| i + 1).collect()
    }
}
