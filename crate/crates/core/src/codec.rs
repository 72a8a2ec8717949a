//! The end-to-end systematic code.
//!
//! A codeword is `(h(x), g(h(x)), Rep(f(g(h(x)))))` where the inner checksum
//! `f` is taken with block length `n1`, the length of the tag. Segment
//! lengths are `n0`, `n1` and `fold * n2`.
//!
//! A received word of length `n - 1` is cut into three windows that each miss
//! exactly one symbol of their segment: the symbols at the two segment
//! boundaries are discarded. A word of length `n` (substitutions only) has its
//! last symbol dropped first so the same path applies.

use std::collections::BTreeSet;

use num_traits::ToPrimitive;

use crate::bitstring::{for_each_flip_set, for_each_insertion, BitString};
use crate::checksum::{self, first_component, f_checksum, Checksum, ChecksumParams};
use crate::compress::{Compressor, Neighborhood, SyndromeTag};
use crate::error::{Error, Result, Stage};
use crate::precode::BchCode;
use crate::repcode::RepBlock;

/// Every length derived from `(k, s)`.
#[derive(Debug, Clone)]
pub struct CodecParams {
    k: usize,
    s: usize,
    compressor: Compressor,
    inner: ChecksumParams,
    rep: RepBlock,
}

impl CodecParams {
    pub fn derive(k: usize, s: usize) -> Result<Self> {
        let code = BchCode::select_params(k, s)?;
        let compressor = Compressor::new(code)?;
        let inner = ChecksumParams::new(compressor.tag_len(), s)?;
        let rep = RepBlock::new(s, inner.packed_width())?;
        let params = CodecParams { k, s, compressor, inner, rep };
        for len in [params.n0(), params.n1(), params.repetition_len()] {
            if len <= s {
                return Err(Error::InvalidParams(format!("segment of length {len} is not longer than s = {s}")));
            }
        }
        Ok(params)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn code(&self) -> &BchCode {
        self.compressor.code()
    }

    pub fn compressor(&self) -> &Compressor {
        &self.compressor
    }

    /// Checksum parameters for the tag segment (`L = n1`).
    pub fn inner_checksum(&self) -> &ChecksumParams {
        &self.inner
    }

    pub fn rep(&self) -> &RepBlock {
        &self.rep
    }

    pub fn n0(&self) -> usize {
        self.code().n0()
    }

    /// Bits per tag field.
    pub fn w_p(&self) -> usize {
        self.compressor.field_width()
    }

    pub fn n1(&self) -> usize {
        self.compressor.tag_len()
    }

    /// Checksum payload bits, before repetition.
    pub fn n2(&self) -> usize {
        self.inner.packed_width()
    }

    pub fn fold(&self) -> usize {
        self.rep.fold()
    }

    pub fn repetition_len(&self) -> usize {
        self.rep.encoded_len()
    }

    pub fn n(&self) -> usize {
        self.n0() + self.n1() + self.repetition_len()
    }

    pub fn redundancy(&self) -> usize {
        self.n() - self.k
    }

    /// `(3s + 4) log2 n`, the leading term of the asymptotic redundancy.
    pub fn reference_redundancy(&self) -> f64 {
        (3 * self.s + 4) as f64 * (self.n() as f64).log2()
    }
}

/// Shorthand for [`CodecParams::derive`].
pub fn derive_params(k: usize, s: usize) -> Result<CodecParams> {
    CodecParams::derive(k, s)
}

/// An encoded word with its segment boundaries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Codeword {
    bits: BitString,
    n0: usize,
    n1: usize,
}

impl Codeword {
    pub fn bits(&self) -> &BitString {
        &self.bits
    }

    pub fn into_bits(self) -> BitString {
        self.bits
    }

    pub fn precode_segment(&self) -> BitString {
        self.bits.substring(0..self.n0)
    }

    pub fn tag_segment(&self) -> BitString {
        self.bits.substring(self.n0..self.n0 + self.n1)
    }

    pub fn repetition_segment(&self) -> BitString {
        self.bits.substring(self.n0 + self.n1..self.bits.len())
    }
}

/// Encoder output together with the intermediate tag and neighborhood.
#[derive(Debug, Clone)]
pub struct EncodeTrace {
    pub codeword: Codeword,
    pub tag: SyndromeTag,
    pub neighborhood: Neighborhood,
}

pub fn encode(x: &BitString, params: &CodecParams) -> Result<Codeword> {
    encode_traced(x, params).map(|t| t.codeword)
}

pub fn encode_traced(x: &BitString, params: &CodecParams) -> Result<EncodeTrace> {
    if x.len() != params.k {
        return Err(Error::LengthMismatch { expected: params.k, actual: x.len() });
    }
    let h = params.code().encode_h(x)?;
    let (tag, neighborhood) = params.compressor.tag_with_neighborhood(&h)?;
    let tag_bits = tag.packed();
    let (_, checksum_bits) = checksum::pack(&f_checksum(&tag_bits, &params.inner)?, &params.inner)?;
    let repeated = params.rep.encode(&checksum_bits)?;

    let mut bits = h;
    bits.extend_from(&tag_bits);
    bits.extend_from(&repeated);
    debug_assert_eq!(bits.len(), params.n());
    Ok(EncodeTrace { codeword: Codeword { bits, n0: params.n0(), n1: params.n1() }, tag, neighborhood })
}

/// Cuts a word of length `n - 1` into windows of lengths `n0 - 1`, `n1 - 1`
/// and `fold * n2 - 1`, dropping the symbols at positions `n0` and `n0 + n1`.
pub fn split(y: &BitString, params: &CodecParams) -> Result<(BitString, BitString, BitString)> {
    let n = params.n();
    if y.len() + 1 != n {
        return Err(Error::LengthMismatch { expected: n - 1, actual: y.len() });
    }
    let (n0, n1) = (params.n0(), params.n1());
    Ok((
        y.substring(0..n0 - 1),
        y.substring(n0..n0 + n1 - 1),
        y.substring(n0 + n1..n - 1),
    ))
}

/// Intermediate results of each decoding stage.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodeTrace {
    /// Packed checksum of the tag, from the repetition segment.
    pub checksum_bits: BitString,
    /// Recovered tag segment.
    pub tag_bits: BitString,
    /// Recovered pre-code codeword.
    pub precode_word: BitString,
    pub message: BitString,
}

pub fn decode(y: &BitString, params: &CodecParams) -> Result<BitString> {
    decode_traced(y, params).map(|t| t.message)
}

pub fn decode_traced(y: &BitString, params: &CodecParams) -> Result<DecodeTrace> {
    let n = params.n();
    let normalized;
    let y = if y.len() == n {
        normalized = y.substring(0..n - 1);
        &normalized
    } else if y.len() + 1 == n {
        y
    } else {
        return Err(Error::LengthMismatch { expected: n - 1, actual: y.len() });
    };
    let (y1, y2, y3) = split(y, params)?;

    let checksum_bits = params.rep.decode(&y3)?;
    let target = checksum::unpack_bits(&checksum_bits, &params.inner)?;
    let tag_bits = recover_by_checksum(&y2, &target, &params.inner, Stage::Checksum)?;
    let tag = SyndromeTag::unpack(&tag_bits, params.w_p())?;
    let precode_word = params.compressor.recover_from_tag(&y1, &tag)?;
    let message = params.code().extract_info(&precode_word)?;
    Ok(DecodeTrace { checksum_bits, tag_bits, precode_word, message })
}

/// The unique `z` with `y` in `B_{1,s}(z)` and `f(z) = target`.
///
/// Candidates are screened on the first checksum component, updated
/// incrementally per flip, before the full comparison.
pub fn recover_by_checksum(
    y: &BitString,
    target: &Checksum,
    params: &ChecksumParams,
    stage: Stage,
) -> Result<BitString> {
    let len = params.len();
    if y.len() + 1 != len {
        return Err(Error::LengthMismatch { expected: len - 1, actual: y.len() });
    }
    let m1 = (params.orders() * len) as i64;
    let want = target.components()[0].to_i64().ok_or(Error::ValueOutOfRange)?;
    let mut survivors: BTreeSet<BitString> = BTreeSet::new();
    for_each_insertion(y, |z, inserted| {
        let base = first_component(z, params) as i64;
        let mut candidate = z.clone();
        for_each_flip_set(len, params.s(), Some(inserted), |flips| {
            let shift: i64 = flips
                .iter()
                .map(|&p| if candidate.bit(p) == 1 { -(p as i64 + 1) } else { p as i64 + 1 })
                .sum();
            if (base + shift).rem_euclid(m1) != want {
                return;
            }
            for &p in flips {
                candidate.flip(p);
            }
            if f_checksum(&candidate, params).map(|f| f == *target).unwrap_or(false) {
                survivors.insert(candidate.clone());
            }
            for &p in flips {
                candidate.flip(p);
            }
        });
    });
    match survivors.len() {
        0 => Err(Error::NoSurvivor { stage }),
        1 => Ok(survivors.into_iter().next().unwrap()),
        count => Err(Error::MultipleSurvivors { stage, count }),
    }
}
