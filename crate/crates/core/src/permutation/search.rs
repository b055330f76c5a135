//! Permutation search maximizing the minimum product distance of every
//! decoding prefix.
//!
//! The objective is compared lexicographically over prefixes, longest first.
//! For each prefix it ranks the minimum product distance first and then the
//! number of message pairs attaining it (fewer is better). The second key
//! matters: for 4-QAM over two blocks no permutation raises the minimum
//! above the repetition code's, but some halve its multiplicity. Everything is
//! evaluated exactly on the integer QAM grid using squared distances, so ties
//! are genuine ties and are broken by the lexicographically smallest
//! permutation tuple.

use std::cmp::Reverse;

use itertools::Itertools;
use rand::seq::SliceRandom;

use super::code::{PermutationCode, UniversalityEvidence};
use super::qam::{build_qam, Constellation};
use crate::error::{Error, Result};
use crate::rng::{Purpose, TrialStreams};

/// Largest alphabet and block count searched exhaustively.
pub const EXHAUSTIVE_MAX_POINTS: usize = 8;
pub const EXHAUSTIVE_MAX_BLOCKS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchOptions {
    /// Maximum number of objective evaluations.
    pub budget: u64,
    /// Seed of the randomized search; unused by exhaustive search.
    pub seed: u64,
    /// Independent hill-climbing restarts sharing the budget.
    pub restarts: u32,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self { budget: 2_000_000, seed: 0, restarts: 8 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome {
    pub code: PermutationCode,
    pub evidence: UniversalityEvidence,
    pub exhaustive: bool,
    pub evaluations: u64,
}

/// Per prefix, longest first: squared minimum product distance on the integer
/// grid and the number of pairs attaining it.
type Objective = Vec<(u128, Reverse<u64>)>;

struct Evaluator {
    dist2: Vec<Vec<u64>>,
    blocks: usize,
}

impl Evaluator {
    fn new(lattice: &[(i32, i32)], blocks: usize) -> Self {
        let dist2 = lattice
            .iter()
            .map(|&(ax, ay)| lattice.iter().map(|&(bx, by)| ((ax - bx).pow(2) + (ay - by).pow(2)) as u64).collect())
            .collect();
        Self { dist2, blocks }
    }

    fn eval(&self, perms: &[&[usize]]) -> Objective {
        let k = self.dist2.len();
        let mut mins = vec![(u128::MAX, 0u64); self.blocks];
        for a in 0..k {
            for b in a + 1..k {
                let mut prod: u128 = 1;
                for (perm, (min, count)) in perms.iter().zip(mins.iter_mut()) {
                    prod *= self.dist2[perm[a]][perm[b]] as u128;
                    if prod < *min {
                        *min = prod;
                        *count = 1;
                    } else if prod == *min {
                        *count += 1;
                    }
                }
            }
        }
        mins.iter().rev().map(|&(d, c)| (d, Reverse(c))).collect()
    }
}

/// Replaces `best` when `cand` has a larger objective, or an equal one with a
/// smaller permutation tuple.
fn improves(cand: &(Objective, Vec<Vec<usize>>), best: &Option<(Objective, Vec<Vec<usize>>)>) -> bool {
    match best {
        None => true,
        Some((obj, perms)) => cand.0 > *obj || (cand.0 == *obj && cand.1 < *perms),
    }
}

fn factorial_pow(n: usize, exp: usize) -> Option<u64> {
    let f = (1..=n as u64).try_fold(1u64, |acc, x| acc.checked_mul(x))?;
    (0..exp).try_fold(1u64, |acc, _| acc.checked_mul(f))
}

/// Searches for a code with `blocks` blocks over `2^bits`-QAM.
///
/// Exhaustive when the alphabet has at most 8 points, `blocks <= 3`, and the
/// `(2^bits)!^(blocks-1)` candidates fit the budget; otherwise randomized
/// restarts with pairwise-swap hill climbing.
pub fn search_permutation_code(blocks: usize, bits: u32, opts: &SearchOptions) -> Result<SearchOutcome> {
    if blocks == 0 {
        return Err(Error::Range("a code needs at least one block".into()));
    }
    if opts.budget == 0 {
        return Err(Error::Budget("budget must allow at least one evaluation".into()));
    }
    let constellation = build_qam(bits)?;
    let k = constellation.len();
    let lattice = constellation.lattice().expect("built QAM carries its grid").to_vec();
    let eval = Evaluator::new(&lattice, blocks);

    let candidates = factorial_pow(k, blocks - 1);
    let exhaustive =
        k <= EXHAUSTIVE_MAX_POINTS && blocks <= EXHAUSTIVE_MAX_BLOCKS && candidates.is_some_and(|c| c <= opts.budget);

    let (perms, evaluations) = if exhaustive {
        exhaustive_search(&eval, k, blocks)
    } else {
        if k < 2 {
            return Err(Error::Budget("nothing to search".into()));
        }
        randomized_search(&eval, k, blocks, opts)
    };
    finish(constellation, perms, exhaustive, evaluations)
}

fn finish(
    constellation: Constellation,
    perms: Vec<Vec<usize>>,
    exhaustive: bool,
    evaluations: u64,
) -> Result<SearchOutcome> {
    let code = PermutationCode::new(constellation, perms)?;
    let evidence = code.evidence();
    Ok(SearchOutcome { code, evidence, exhaustive, evaluations })
}

fn exhaustive_search(eval: &Evaluator, k: usize, blocks: usize) -> (Vec<Vec<usize>>, u64) {
    let identity: Vec<usize> = (0..k).collect();
    // itertools yields permutations of a sorted range in lexicographic order,
    // and the odometer below walks tuples lexicographically, so the first
    // maximizer found is the smallest tuple.
    let all: Vec<Vec<usize>> = (0..k).permutations(k).collect();
    let free = blocks - 1;
    let mut idx = vec![0usize; free];
    let mut best: Option<(Objective, Vec<usize>)> = None;
    let mut evaluations = 0u64;
    loop {
        let mut refs: Vec<&[usize]> = Vec::with_capacity(blocks);
        refs.push(&identity);
        refs.extend(idx.iter().map(|&i| all[i].as_slice()));
        let obj = eval.eval(&refs);
        evaluations += 1;
        if best.as_ref().is_none_or(|(b, _)| obj > *b) {
            best = Some((obj, idx.clone()));
        }
        // advance the odometer, last position fastest
        let mut pos = free;
        loop {
            if pos == 0 {
                let (_, winner) = best.expect("at least one candidate");
                let mut perms = vec![identity.clone()];
                perms.extend(winner.iter().map(|&i| all[i].clone()));
                return (perms, evaluations);
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < all.len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

fn hill_climb(
    eval: &Evaluator,
    k: usize,
    blocks: usize,
    budget: u64,
    streams: &TrialStreams,
    restart: u64,
) -> ((Objective, Vec<Vec<usize>>), u64) {
    let mut rng = streams.trial(restart);
    let mut perms: Vec<Vec<usize>> = (0..blocks).map(|_| (0..k).collect()).collect();
    for p in perms.iter_mut().skip(1) {
        p.shuffle(&mut rng);
    }
    let score = |perms: &[Vec<usize>]| {
        let refs: Vec<&[usize]> = perms.iter().map(Vec::as_slice).collect();
        eval.eval(&refs)
    };
    let mut current = score(&perms);
    let mut used = 1u64;
    'climb: loop {
        let mut improved = false;
        for b in 1..blocks {
            for i in 0..k {
                for j in i + 1..k {
                    if used >= budget {
                        break 'climb;
                    }
                    perms[b].swap(i, j);
                    let cand = score(&perms);
                    used += 1;
                    if cand > current {
                        current = cand;
                        improved = true;
                    } else {
                        perms[b].swap(i, j);
                    }
                }
            }
        }
        if !improved {
            break;
        }
    }
    ((current, perms), used)
}

fn randomized_search(eval: &Evaluator, k: usize, blocks: usize, opts: &SearchOptions) -> (Vec<Vec<usize>>, u64) {
    let restarts = opts.restarts.max(1) as u64;
    let per_restart = (opts.budget / restarts).max(1);
    let streams = TrialStreams::new(opts.seed, Purpose::Search);

    #[cfg(feature = "parallel")]
    let results: Vec<_> = {
        use rayon::prelude::*;
        (0..restarts).into_par_iter().map(|r| hill_climb(eval, k, blocks, per_restart, &streams, r)).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let results: Vec<_> = (0..restarts).map(|r| hill_climb(eval, k, blocks, per_restart, &streams, r)).collect();

    let mut best = None;
    let mut evaluations = 0;
    for (cand, used) in results {
        evaluations += used;
        if improves(&cand, &best) {
            best = Some(cand);
        }
    }
    (best.expect("at least one restart").1, evaluations)
}
