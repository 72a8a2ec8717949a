//! Syndrome compression of the pre-code checksum.
//!
//! For a pre-code codeword `c`, the confusable set `N(c)` holds every
//! codeword whose `(1, s)` error ball meets the ball of `c`. The checksum `f`
//! (with `L = n0`) already separates these codewords, so it is enough to
//! store `M(f(c))` modulo the smallest `P(c)` that divides none of the
//! differences `|M(f(c)) - M(f(c'))|`. The tag `g(c)` is the pair
//! `(M(f(c)) mod P(c), P(c))`, both fields written big-endian in
//! `w_P = ceil((s + 2) log2 n0) + 8` bits.

use std::collections::{BTreeSet, HashSet};

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::bitstring::{for_each_flip_set, for_each_insertion, BitString};
use crate::checksum::{packed_checksum, packed_checksum_u128, ChecksumParams};
use crate::error::{Error, Result, Stage};
use crate::precode::BchCode;

/// Extra bits on top of `ceil((s + 2) log2 n0)` in each tag field.
pub const SLACK_BITS: usize = 8;

/// `ceil((s + 2) log2 n0) + SLACK_BITS`, in exact integer arithmetic.
pub fn field_width(n0: usize, s: usize) -> usize {
    let power = BigUint::from(n0).pow(s as u32 + 2);
    (power - 1u32).bits() as usize + SLACK_BITS
}

/// `2 n0^2 sum_{s' <= s} C(n0 - 1, s')`, the counting bound on `|N(c)|`.
pub fn neighborhood_bound(n0: usize, s: usize) -> BigUint {
    let mut binomial = BigUint::one();
    let mut sum = BigUint::zero();
    for i in 0..=s {
        if i > 0 {
            binomial = binomial * BigUint::from(n0 - i) / BigUint::from(i);
        }
        sum += &binomial;
    }
    BigUint::from(2u32) * BigUint::from(n0).pow(2) * sum
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyndromeTag {
    residue: BigUint,
    modulus: BigUint,
    field_width: usize,
}

impl SyndromeTag {
    pub fn new(residue: BigUint, modulus: BigUint, field_width: usize) -> Result<Self> {
        if modulus.is_zero() || residue >= modulus {
            return Err(Error::ValueOutOfRange);
        }
        if modulus.bits() as usize > field_width {
            return Err(Error::ModulusOverflow { width: field_width });
        }
        Ok(SyndromeTag { residue, modulus, field_width })
    }

    pub fn residue(&self) -> &BigUint {
        &self.residue
    }

    pub fn modulus(&self) -> &BigUint {
        &self.modulus
    }

    pub fn field_width(&self) -> usize {
        self.field_width
    }

    /// Residue then modulus, each big-endian in `field_width` bits.
    pub fn packed(&self) -> BitString {
        let mut out = BitString::from_biguint(&self.residue, self.field_width).expect("residue fits");
        out.extend_from(&BitString::from_biguint(&self.modulus, self.field_width).expect("modulus fits"));
        out
    }

    pub fn unpack(bits: &BitString, field_width: usize) -> Result<Self> {
        if bits.len() != 2 * field_width {
            return Err(Error::LengthMismatch { expected: 2 * field_width, actual: bits.len() });
        }
        let residue = bits.substring(0..field_width).to_biguint();
        let modulus = bits.substring(field_width..2 * field_width).to_biguint();
        SyndromeTag::new(residue, modulus, field_width)
    }
}

/// The confusable set of a codeword.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Neighborhood {
    center: BitString,
    members: BTreeSet<BitString>,
}

impl Neighborhood {
    pub fn center(&self) -> &BitString {
        &self.center
    }

    /// All members, the center included.
    pub fn members(&self) -> &BTreeSet<BitString> {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn others(&self) -> impl Iterator<Item = &BitString> {
        self.members.iter().filter(move |m| **m != self.center)
    }
}

/// Enumerates `N(c)`: delete one symbol of `c`, insert one symbol, flip at
/// most `s` positions other than the inserted one, then bounded-distance
/// decode with radius `s`.
pub fn neighborhood(c: &BitString, code: &BchCode) -> Result<Neighborhood> {
    if !code.is_codeword(c)? {
        return Err(Error::NotACodeword);
    }
    let s = code.s();
    let mut found: HashSet<BitString> = HashSet::new();
    for i in 0..c.len() {
        if i > 0 && c.bit(i) == c.bit(i - 1) {
            continue;
        }
        let mut shortened = c.clone().into_inner();
        shortened.remove(i);
        let shortened = BitString::from(shortened.as_slice());
        for_each_insertion(&shortened, |z, inserted| {
            let base = code.syndrome(z);
            for_each_flip_set(z.len(), s, Some(inserted), |flips| {
                let syn = flips.iter().fold(base, |acc, &p| acc ^ code.position_syndrome(p));
                if let Some(pattern) = code.coset_leader(syn) {
                    let mut member = z.clone();
                    for &p in flips.iter().chain(pattern) {
                        member.flip(p);
                    }
                    found.insert(member);
                }
            });
        });
    }
    debug_assert!(found.contains(c));
    Ok(Neighborhood { center: c.clone(), members: found.into_iter().collect() })
}

/// Smallest integer `P >= 1` dividing no element of `diffs`.
pub fn smallest_non_divisor(diffs: &[BigUint], limit_bits: usize) -> Result<BigUint> {
    if diffs.iter().any(Zero::is_zero) {
        return Err(Error::ChecksumCollision);
    }
    if diffs.is_empty() {
        return Ok(BigUint::one());
    }
    let limit: u128 = if limit_bits >= 64 { u64::MAX as u128 } else { 1u128 << limit_bits };
    if let Some(mut small) = diffs.iter().map(|d| d.to_u64()).collect::<Option<Vec<u64>>>() {
        return scan_u64(&mut small, limit, limit_bits).map(BigUint::from);
    }
    let mut p: u128 = 1;
    loop {
        p += 1;
        if p >= limit {
            return Err(Error::ModulusOverflow { width: limit_bits });
        }
        let big_p = BigUint::from(p);
        if !diffs.iter().any(|d| (d % &big_p).is_zero()) {
            return Ok(big_p);
        }
    }
}

/// Divisibility by a fixed `p = q 2^shift` (`q` odd) without division:
/// `d` is a multiple of `q` iff `d q^{-1} mod 2^64 <= (2^64 - 1) / q`.
struct Divisor {
    shift: u32,
    inverse: u64,
    bound: u64,
}

impl Divisor {
    fn new(p: u64) -> Self {
        let shift = p.trailing_zeros();
        let q = p >> shift;
        // Newton iteration doubles the number of correct low bits each step.
        let mut inverse = q;
        for _ in 0..5 {
            inverse = inverse.wrapping_mul(2u64.wrapping_sub(q.wrapping_mul(inverse)));
        }
        Divisor { shift, inverse, bound: u64::MAX / q }
    }

    fn divides(&self, d: u64) -> bool {
        d.trailing_zeros() >= self.shift && (d >> self.shift).wrapping_mul(self.inverse) <= self.bound
    }
}

/// Trial division with move-to-front: a difference that rules out one
/// candidate tends to rule out the next few as well.
fn scan_u64(diffs: &mut [u64], limit: u128, limit_bits: usize) -> Result<u64> {
    let mut p: u64 = 1;
    loop {
        p += 1;
        if p as u128 >= limit {
            return Err(Error::ModulusOverflow { width: limit_bits });
        }
        let divisor = Divisor::new(p);
        match diffs.iter().position(|&d| divisor.divides(d)) {
            None => return Ok(p),
            Some(0) => {}
            Some(i) => diffs[..=i].rotate_right(1),
        }
    }
}

/// `P(c)` for a neighborhood centred at `c`.
pub fn find_modulus(nbhd: &Neighborhood, checksum: &ChecksumParams, field_width: usize) -> Result<BigUint> {
    let diffs: Vec<BigUint> = if let Some(center) = packed_checksum_u128(nbhd.center(), checksum)? {
        let mut small = Vec::with_capacity(nbhd.len());
        for other in nbhd.others() {
            let value = packed_checksum_u128(other, checksum)?.expect("same parameters");
            small.push(value.abs_diff(center));
        }
        small.sort_unstable();
        small.dedup();
        small.into_iter().map(BigUint::from).collect()
    } else {
        let center = packed_checksum(nbhd.center(), checksum)?;
        let mut set = BTreeSet::new();
        for other in nbhd.others() {
            let value = packed_checksum(other, checksum)?;
            set.insert(if value > center { &value - &center } else { &center - &value });
        }
        set.into_iter().collect()
    };
    smallest_non_divisor(&diffs, field_width)
}

/// True when every other member of the neighborhood has a different packed
/// checksum than the center modulo `modulus`.
pub fn separates(nbhd: &Neighborhood, modulus: &BigUint, checksum: &ChecksumParams) -> Result<bool> {
    let center = packed_checksum(nbhd.center(), checksum)? % modulus;
    for other in nbhd.others() {
        if packed_checksum(other, checksum)? % modulus == center {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Builds `g(c)` from the pre-code and the checksum parameters for `L = n0`.
#[derive(Debug, Clone)]
pub struct Compressor {
    code: BchCode,
    checksum: ChecksumParams,
    field_width: usize,
}

impl Compressor {
    pub fn new(code: BchCode) -> Result<Self> {
        let checksum = ChecksumParams::new(code.n0(), code.s())?;
        let field_width = field_width(code.n0(), code.s());
        Ok(Compressor { code, checksum, field_width })
    }

    pub fn code(&self) -> &BchCode {
        &self.code
    }

    pub fn checksum(&self) -> &ChecksumParams {
        &self.checksum
    }

    pub fn field_width(&self) -> usize {
        self.field_width
    }

    /// Tag length `n1 = 2 w_P`.
    pub fn tag_len(&self) -> usize {
        2 * self.field_width
    }

    pub fn neighborhood(&self, c: &BitString) -> Result<Neighborhood> {
        neighborhood(c, &self.code)
    }

    /// The tag of `c` together with the neighborhood it was computed from.
    pub fn tag_with_neighborhood(&self, c: &BitString) -> Result<(SyndromeTag, Neighborhood)> {
        let nbhd = self.neighborhood(c)?;
        let modulus = find_modulus(&nbhd, &self.checksum, self.field_width)?;
        let residue = packed_checksum(c, &self.checksum)? % &modulus;
        let tag = SyndromeTag::new(residue, modulus, self.field_width)?;
        Ok((tag, nbhd))
    }

    pub fn g_tag(&self, c: &BitString) -> Result<SyndromeTag> {
        self.tag_with_neighborhood(c).map(|(tag, _)| tag)
    }

    /// Recovers the codeword `c` from its tag and any `y1` in `B_{1,s}(c)`.
    pub fn recover_from_tag(&self, y1: &BitString, tag: &SyndromeTag) -> Result<BitString> {
        let n0 = self.code.n0();
        if y1.len() + 1 != n0 {
            return Err(Error::LengthMismatch { expected: n0 - 1, actual: y1.len() });
        }
        let mut survivors: BTreeSet<BitString> = BTreeSet::new();
        let mut failure = None;
        for_each_insertion(y1, |z, inserted| {
            let base = self.code.syndrome(z);
            let mut candidate = z.clone();
            for_each_flip_set(n0, self.code.s(), Some(inserted), |flips| {
                if failure.is_some() {
                    return;
                }
                let syn = flips.iter().fold(base, |acc, &p| acc ^ self.code.position_syndrome(p));
                if syn != 0 {
                    return;
                }
                for &p in flips {
                    candidate.flip(p);
                }
                match packed_checksum(&candidate, &self.checksum) {
                    Ok(value) if &value % tag.modulus() == *tag.residue() => {
                        survivors.insert(candidate.clone());
                    }
                    Ok(_) => {}
                    Err(e) => failure = Some(e),
                }
                for &p in flips {
                    candidate.flip(p);
                }
            });
        });
        if let Some(e) = failure {
            return Err(e);
        }
        match survivors.len() {
            0 => Err(Error::NoSurvivor { stage: Stage::Tag }),
            1 => Ok(survivors.into_iter().next().unwrap()),
            count => Err(Error::MultipleSurvivors { stage: Stage::Tag, count }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitstring::{corrupt, delete_at};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn big(v: &[u64]) -> Vec<BigUint> {
        v.iter().map(|&x| BigUint::from(x)).collect()
    }

    #[test]
    fn width_examples() {
        // ceil(3 log2 7) = ceil(8.42) = 9.
        assert_eq!(field_width(7, 1), 17);
        // ceil(4 log2 26) = ceil(18.80) = 19.
        assert_eq!(field_width(26, 2), 27);
        // Exact powers of two: 8^3 = 2^9 needs exactly 9 bits for the ceiling.
        assert_eq!(field_width(8, 1), 9 + SLACK_BITS);
    }

    #[test]
    fn bound_examples() {
        assert_eq!(neighborhood_bound(7, 1), BigUint::from(2u32 * 49 * 7));
        assert_eq!(neighborhood_bound(26, 2), BigUint::from(2u32 * 676 * 326));
    }

    #[test]
    fn modulus_search_examples() {
        assert_eq!(smallest_non_divisor(&[], 17).unwrap(), BigUint::one());
        assert_eq!(smallest_non_divisor(&big(&[6]), 17).unwrap(), BigUint::from(4u32));
        assert_eq!(smallest_non_divisor(&big(&[2, 3, 4, 6, 12]), 17).unwrap(), BigUint::from(5u32));
        assert!(matches!(smallest_non_divisor(&big(&[0, 3]), 17), Err(Error::ChecksumCollision)));
        // 1..=4 all divide 12, and 5 is not representable in 2 bits.
        assert!(matches!(smallest_non_divisor(&big(&[12]), 2), Err(Error::ModulusOverflow { .. })));
        let huge = BigUint::from(1u32) << 200u32;
        assert_eq!(smallest_non_divisor(&[huge], 17).unwrap(), BigUint::from(3u32));
    }

    #[test]
    fn divisibility_test_matches_remainder() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for p in 1..2000u64 {
            let divisor = Divisor::new(p);
            for d in (0..300u64).chain((0..50).map(|_| rng.gen::<u64>() >> rng.gen_range(0..40))) {
                assert_eq!(divisor.divides(d), d % p == 0, "p={p} d={d}");
            }
        }
    }

    #[test]
    fn tag_layout() {
        let tag = SyndromeTag::new(BigUint::from(5u32), BigUint::from(9u32), 5).unwrap();
        assert_eq!(tag.packed().to_string(), "0010101001");
        assert_eq!(SyndromeTag::unpack(&tag.packed(), 5).unwrap(), tag);
        assert!(SyndromeTag::new(BigUint::from(9u32), BigUint::from(9u32), 5).is_err());
        assert!(SyndromeTag::new(BigUint::zero(), BigUint::zero(), 5).is_err());
        assert!(matches!(
            SyndromeTag::new(BigUint::zero(), BigUint::from(40u32), 5),
            Err(Error::ModulusOverflow { .. })
        ));
    }

    #[test]
    fn neighborhood_contains_center() {
        let comp = Compressor::new(BchCode::select_params(4, 1).unwrap()).unwrap();
        for x in BitString::all_of_length(4) {
            let c = comp.code().encode_h(&x).unwrap();
            let nbhd = comp.neighborhood(&c).unwrap();
            assert!(nbhd.members().contains(&c));
            assert!(nbhd.members().iter().all(|m| comp.code().is_codeword(m).unwrap()));
        }
        let mut not_codeword = comp.code().encode_h(&"1010".parse().unwrap()).unwrap();
        not_codeword.flip(0);
        assert!(matches!(comp.neighborhood(&not_codeword), Err(Error::NotACodeword)));
    }

    #[test]
    fn zero_codeword_tag() {
        let comp = Compressor::new(BchCode::select_params(4, 1).unwrap()).unwrap();
        let tag = comp.g_tag(&BitString::zeros(7)).unwrap();
        assert!(tag.residue().is_zero());
        assert_eq!(tag.packed().len(), 34);
        assert_eq!(comp.g_tag(&BitString::zeros(7)).unwrap().packed(), tag.packed());
    }

    #[test]
    fn every_tag_separates_its_neighborhood() {
        let comp = Compressor::new(BchCode::select_params(4, 1).unwrap()).unwrap();
        for x in BitString::all_of_length(4) {
            let c = comp.code().encode_h(&x).unwrap();
            let (tag, nbhd) = comp.tag_with_neighborhood(&c).unwrap();
            assert!(tag.residue() < tag.modulus());
            assert!((tag.modulus().bits() as usize) < comp.field_width());
            assert!(separates(&nbhd, tag.modulus(), comp.checksum()).unwrap());
        }
    }

    #[test]
    fn recover_clean_deletions_and_single_flips() {
        let comp = Compressor::new(BchCode::select_params(4, 1).unwrap()).unwrap();
        for x in BitString::all_of_length(4) {
            let c = comp.code().encode_h(&x).unwrap();
            let tag = comp.g_tag(&c).unwrap();
            for i in 1..=c.len() {
                let y = delete_at(&c, i).unwrap();
                for_each_flip_set(y.len(), 1, None, |flips| {
                    let mut z = y.clone();
                    for &p in flips {
                        z.flip(p);
                    }
                    assert_eq!(comp.recover_from_tag(&z, &tag).unwrap(), c);
                });
            }
        }
    }

    #[test]
    fn recover_sampled_k16_s2() {
        let comp = Compressor::new(BchCode::select_params(16, 2).unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for trial in 0..200 {
            let x = BitString::from_bools((0..16).map(|_| rng.gen_bool(0.5)));
            let c = comp.code().encode_h(&x).unwrap();
            // Reuse tags across a few corruptions to keep the test quick.
            let tag = comp.g_tag(&c).unwrap();
            let y = corrupt(&c, 2, trial).unwrap();
            assert_eq!(comp.recover_from_tag(&y, &tag).unwrap(), c);
        }
    }

    #[test]
    fn recover_rejects_wrong_length() {
        let comp = Compressor::new(BchCode::select_params(4, 1).unwrap()).unwrap();
        let tag = comp.g_tag(&BitString::zeros(7)).unwrap();
        assert!(matches!(comp.recover_from_tag(&BitString::zeros(7), &tag), Err(Error::LengthMismatch { .. })));
    }
}
