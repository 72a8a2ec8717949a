//! Brute-force reference checks.
//!
//! Two independent tests decide whether the `(1, s)` balls of two words
//! intersect: one materializes both balls, the other looks for deletions
//! `i`, `i'` after which the words are within Hamming distance `2s`. Both are
//! kept so they can be checked against each other.
//!
//! The sieve code `C_r` collects every word of length `n` with checksum `r`;
//! by the separation property of the checksum it corrects one deletion and
//! `s` substitutions.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;

use crate::bitstring::{ball_down, up_candidates, BitString};
use crate::checksum::{f_checksum, Checksum, ChecksumParams};
use crate::codec::recover_by_checksum;
use crate::error::{Error, Result, Stage};
use crate::precode::BchCode;

/// Default ceiling on `n` for exhaustive enumeration of `{0,1}^n`.
pub const DEFAULT_MAX_N: usize = 22;

fn check_pair(x: &BitString, x2: &BitString) -> Result<()> {
    if x.len() != x2.len() {
        return Err(Error::LengthMismatch { expected: x.len(), actual: x2.len() });
    }
    if x.len() < 2 {
        return Err(Error::TooShort { len: x.len(), min: 2 });
    }
    Ok(())
}

/// Intersection test by materializing both balls.
pub fn balls_intersect(x: &BitString, x2: &BitString, s: usize) -> Result<bool> {
    check_pair(x, x2)?;
    let a = ball_down(x, s)?;
    let b = ball_down(x2, s)?;
    Ok(a.intersection(&b).next().is_some())
}

/// Intersection test through deletion alignments: some `i`, `i'` leave the
/// two shortened words within Hamming distance `2s`.
///
/// Runs in `O(L^2)` using prefix counts of aligned, left-shifted and
/// right-shifted disagreements.
pub fn balls_intersect_remark1(x: &BitString, x2: &BitString, s: usize) -> Result<bool> {
    check_pair(x, x2)?;
    let len = x.len();
    let a = x.as_slice();
    let b = x2.as_slice();
    // same[t]: mismatches of a[p] vs b[p] for p < t.
    // ahead[t]: mismatches of a[p + 1] vs b[p] for p < t.
    // behind[t]: mismatches of a[p] vs b[p + 1] for p < t.
    let mut same = vec![0usize; len + 1];
    let mut ahead = vec![0usize; len];
    let mut behind = vec![0usize; len];
    for p in 0..len {
        same[p + 1] = same[p] + usize::from(a[p] != b[p]);
    }
    for p in 0..len - 1 {
        ahead[p + 1] = ahead[p] + usize::from(a[p + 1] != b[p]);
        behind[p + 1] = behind[p] + usize::from(a[p] != b[p + 1]);
    }
    let budget = 2 * s;
    for i in 0..len {
        for j in 0..len {
            let distance = if i <= j {
                // Index t of the shortened words: a skips i, b skips j.
                same[i] + (ahead[j] - ahead[i]) + (same[len] - same[j + 1])
            } else {
                same[j] + (behind[i] - behind[j]) + (same[len] - same[i + 1])
            };
            if distance <= budget {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// First pair (in sorted order) of distinct codewords whose balls intersect,
/// or `None` when the codebook corrects one deletion and `s` substitutions.
pub fn verify_code(codebook: &[BitString], s: usize) -> Result<Option<(BitString, BitString)>> {
    let words: Vec<&BitString> = codebook.iter().collect::<BTreeSet<_>>().into_iter().collect();
    if let Some(first) = words.first() {
        if let Some(bad) = words.iter().find(|w| w.len() != first.len()) {
            return Err(Error::LengthMismatch { expected: first.len(), actual: bad.len() });
        }
        if first.len() < 2 {
            return Ok(if words.len() > 1 { Some((words[0].clone(), words[1].clone())) } else { None });
        }
    }
    let witness = (0..words.len()).into_par_iter().find_map_first(|i| {
        words[i + 1..].iter().find_map(|other| {
            match balls_intersect_remark1(words[i], other, s) {
                Ok(true) => Some((words[i].clone(), (*other).clone())),
                _ => None,
            }
        })
    });
    Ok(witness)
}

/// Codewords of the pre-code whose balls meet the ball of `c`, by testing
/// every codeword. Only practical for small `k`.
pub fn definitional_neighborhood(c: &BitString, code: &BchCode) -> Result<BTreeSet<BitString>> {
    let mut out = BTreeSet::new();
    for x in BitString::all_of_length(code.k()) {
        let other = code.encode_h(&x)?;
        if balls_intersect_remark1(c, &other, code.s())? {
            out.insert(other);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeparationReport {
    pub len: usize,
    pub s: usize,
    pub strings: usize,
    pub buckets: usize,
    /// Same-checksum pairs that needed a ball test.
    pub pairs_checked: usize,
    pub violations: Vec<(BitString, BitString)>,
}

/// Exhaustive search for distinct words of length `len` with intersecting
/// balls and equal checksums. Words are bucketed by checksum first so only
/// same-bucket pairs are tested.
pub fn separation_sweep(len: usize, s: usize) -> Result<SeparationReport> {
    let buckets = bucket_by_checksum(len, s)?;
    let mut pairs_checked = 0;
    let mut violations = Vec::new();
    for members in buckets.values() {
        for (i, x) in members.iter().enumerate() {
            for other in &members[i + 1..] {
                pairs_checked += 1;
                if balls_intersect_remark1(x, other, s)? {
                    violations.push((x.clone(), other.clone()));
                }
            }
        }
    }
    Ok(SeparationReport { len, s, strings: 1 << len, buckets: buckets.len(), pairs_checked, violations })
}

/// All of `{0,1}^len` grouped by checksum; members of each bucket are sorted.
pub fn bucket_by_checksum(len: usize, s: usize) -> Result<BTreeMap<Checksum, Vec<BitString>>> {
    let params = ChecksumParams::new(len, s)?;
    let mut buckets: BTreeMap<Checksum, Vec<BitString>> = BTreeMap::new();
    for x in BitString::all_of_length(len) {
        buckets.entry(f_checksum(&x, &params)?).or_default().push(x);
    }
    Ok(buckets)
}

/// The largest checksum class of `{0,1}^n`.
#[derive(Debug, Clone)]
pub struct SieveCode {
    params: ChecksumParams,
    residue: Checksum,
    codebook: Vec<BitString>,
    nonempty_buckets: usize,
}

impl SieveCode {
    pub fn n(&self) -> usize {
        self.params.len()
    }

    pub fn s(&self) -> usize {
        self.params.s()
    }

    pub fn residue(&self) -> &Checksum {
        &self.residue
    }

    pub fn codebook(&self) -> &[BitString] {
        &self.codebook
    }

    pub fn nonempty_buckets(&self) -> usize {
        self.nonempty_buckets
    }

    /// `ceil(2^n / #nonempty buckets)`, which the largest bucket must reach.
    pub fn pigeonhole_bound(&self) -> usize {
        (1usize << self.n()).div_ceil(self.nonempty_buckets)
    }

    pub fn params(&self) -> &ChecksumParams {
        &self.params
    }
}

/// Buckets `{0,1}^n` by checksum and keeps the largest bucket (ties go to
/// the smallest checksum). Refuses `n > max_n`.
pub fn sieve_cr(n: usize, s: usize, max_n: usize) -> Result<SieveCode> {
    if n > max_n {
        return Err(Error::TooLarge { n, max: max_n });
    }
    let params = ChecksumParams::new(n, s)?;
    let buckets = bucket_by_checksum(n, s)?;
    let nonempty_buckets = buckets.len();
    let (residue, codebook) = buckets
        .into_iter()
        .fold(None::<(Checksum, Vec<BitString>)>, |best, (r, members)| match best {
            Some((_, ref b)) if b.len() >= members.len() => best,
            _ => Some((r, members)),
        })
        .expect("at least one bucket");
    Ok(SieveCode { params, residue, codebook, nonempty_buckets })
}

/// Recovers a sieve codeword from a word in its ball.
pub fn decode_cr(y: &BitString, code: &SieveCode) -> Result<BitString> {
    recover_by_checksum(y, &code.residue, &code.params, Stage::Sieve)
}

/// Reference decoder for the sieve code that filters the materialized
/// candidate set.
pub fn decode_cr_naive(y: &BitString, code: &SieveCode) -> Result<BitString> {
    if y.len() + 1 != code.n() {
        return Err(Error::LengthMismatch { expected: code.n() - 1, actual: y.len() });
    }
    let survivors: Vec<BitString> = up_candidates(y, code.s())
        .into_iter()
        .filter(|z| f_checksum(z, &code.params).map(|f| f == code.residue).unwrap_or(false))
        .collect();
    match survivors.len() {
        0 => Err(Error::NoSurvivor { stage: Stage::Sieve }),
        1 => Ok(survivors.into_iter().next().unwrap()),
        count => Err(Error::MultipleSurvivors { stage: Stage::Sieve, count }),
    }
}
