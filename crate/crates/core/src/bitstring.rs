//! Bit sequences, single-symbol edits, error balls and a seeded corruption channel.
//!
//! Edit operations take 1-based positions, matching the usual convention of
//! writing `x = (x_1, ..., x_L)`. Slices returned by [`BitString::as_slice`]
//! are 0-based as usual in Rust.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::Zero;
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// A finite binary sequence. Every stored symbol is 0 or 1.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString(Vec<u8>);

impl BitString {
    pub fn new() -> Self {
        BitString(Vec::new())
    }

    pub fn zeros(len: usize) -> Self {
        BitString(vec![0; len])
    }

    /// Builds a string from symbols, rejecting anything other than 0 or 1.
    pub fn from_bits(bits: Vec<u8>) -> Result<Self> {
        if let Some(bad) = bits.iter().position(|&b| b > 1) {
            return Err(Error::Parse(format!("symbol {} at index {} is not a bit", bits[bad], bad)));
        }
        Ok(BitString(bits))
    }

    pub fn from_bools<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        BitString(bits.into_iter().map(u8::from).collect())
    }

    /// Fixed-width big-endian binary representation of `value`.
    pub fn from_biguint(value: &BigUint, width: usize) -> Result<Self> {
        if value.bits() as usize > width {
            return Err(Error::ValueOutOfRange);
        }
        let bits = (0..width)
            .rev()
            .map(|i| u8::from(value.bit(i as u64)))
            .collect();
        Ok(BitString(bits))
    }

    /// Interprets the string as a big-endian unsigned integer.
    pub fn to_biguint(&self) -> BigUint {
        let mut value = BigUint::zero();
        for &b in &self.0 {
            value <<= 1u32;
            if b == 1 {
                value += 1u32;
            }
        }
        value
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<u8> {
        self.0
    }

    /// Symbol at 0-based index `idx`.
    #[inline]
    pub fn bit(&self, idx: usize) -> u8 {
        self.0[idx]
    }

    /// Flips the symbol at 0-based index `idx` in place.
    #[inline]
    pub fn flip(&mut self, idx: usize) {
        self.0[idx] ^= 1;
    }

    pub fn push(&mut self, bit: u8) {
        debug_assert!(bit <= 1);
        self.0.push(bit);
    }

    pub fn extend_from(&mut self, other: &BitString) {
        self.0.extend_from_slice(&other.0);
    }

    /// Substring covering the 0-based half-open range.
    pub fn substring(&self, range: std::ops::Range<usize>) -> BitString {
        BitString(self.0[range].to_vec())
    }

    pub fn weight(&self) -> usize {
        self.0.iter().filter(|&&b| b == 1).count()
    }

    pub fn hamming_distance(&self, other: &BitString) -> Result<usize> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch { expected: self.len(), actual: other.len() });
        }
        Ok(self.0.iter().zip(&other.0).filter(|(a, b)| a != b).count())
    }

    /// All strings of length `len`, in lexicographic order.
    pub fn all_of_length(len: usize) -> impl Iterator<Item = BitString> {
        assert!(len < 64, "cannot enumerate 2^{len} strings");
        (0u64..1 << len).map(move |v| {
            BitString((0..len).rev().map(|i| ((v >> i) & 1) as u8).collect())
        })
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.0.iter().map(|&b| if b == 1 { '1' } else { '0' }).collect();
        f.write_str(&s)
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .enumerate()
            .map(|(i, c)| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                other => Err(Error::Parse(format!("unexpected character {other:?} at column {}", i + 1))),
            })
            .collect::<Result<Vec<u8>>>()
            .map(BitString)
    }
}

impl From<&[u8]> for BitString {
    fn from(bits: &[u8]) -> Self {
        BitString(bits.iter().map(|&b| b & 1).collect())
    }
}

/// Removes the symbol at 1-based position `pos`.
pub fn delete_at(x: &BitString, pos: usize) -> Result<BitString> {
    if pos == 0 || pos > x.len() {
        return Err(Error::PositionOutOfRange { pos, len: x.len() });
    }
    let mut bits = x.0.clone();
    bits.remove(pos - 1);
    Ok(BitString(bits))
}

/// Inserts `bit` so that it lands at 1-based position `pos`.
pub fn insert_at(x: &BitString, pos: usize, bit: u8) -> Result<BitString> {
    if pos == 0 || pos > x.len() + 1 {
        return Err(Error::PositionOutOfRange { pos, len: x.len() });
    }
    let mut bits = x.0.clone();
    bits.insert(pos - 1, bit & 1);
    Ok(BitString(bits))
}

/// Flips every 1-based position in `positions`.
pub fn substitute(x: &BitString, positions: &BTreeSet<usize>) -> Result<BitString> {
    let mut out = x.clone();
    for &pos in positions {
        if pos == 0 || pos > x.len() {
            return Err(Error::PositionOutOfRange { pos, len: x.len() });
        }
        out.flip(pos - 1);
    }
    Ok(out)
}

/// The ball `B_{1,s}(x)`: every string reachable from `x` by exactly one
/// deletion followed by at most `s` substitutions.
pub fn ball_down(x: &BitString, s: usize) -> Result<BTreeSet<BitString>> {
    if x.len() < 2 {
        return Err(Error::TooShort { len: x.len(), min: 2 });
    }
    let mut ball = BTreeSet::new();
    // Deleting anywhere inside a run gives the same string.
    for i in 0..x.len() {
        if i > 0 && x.bit(i) == x.bit(i - 1) {
            continue;
        }
        let mut y = x.clone();
        y.0.remove(i);
        for_each_flip_set(y.len(), s, None, |flips| {
            let mut z = y.clone();
            for &p in flips {
                z.flip(p);
            }
            ball.insert(z);
        });
    }
    Ok(ball)
}

/// Whether `y` lies in `B_{1,s}(x)`, without building the ball: some
/// deletion from `x` leaves a word within Hamming distance `s` of `y`.
pub fn in_ball_down(x: &BitString, y: &BitString, s: usize) -> bool {
    if x.len() < 2 || y.len() + 1 != x.len() {
        return false;
    }
    let (a, b) = (x.as_slice(), y.as_slice());
    // Deleting index i compares a[..i] with b[..i] and a[i+1..] with b[i..].
    let mut suffix = vec![0usize; b.len() + 1];
    for t in (0..b.len()).rev() {
        suffix[t] = suffix[t + 1] + usize::from(a[t + 1] != b[t]);
    }
    let mut prefix = 0;
    for i in 0..a.len() {
        if prefix + suffix[i] <= s {
            return true;
        }
        if i < b.len() {
            prefix += usize::from(a[i] != b[i]);
        }
    }
    false
}

/// Every `z` of length `|y| + 1` whose ball `B_{1,s}(z)` contains `y`.
pub fn up_candidates(y: &BitString, s: usize) -> BTreeSet<BitString> {
    let mut out = BTreeSet::new();
    for_each_up_candidate(y, s, |z| {
        out.insert(z.clone());
    });
    out
}

/// Visits every (possibly repeated) element of [`up_candidates`]: each
/// distinct single insertion into `y`, followed by every flip set of size at
/// most `s` that avoids the inserted position.
pub fn for_each_up_candidate<F: FnMut(&BitString)>(y: &BitString, s: usize, mut visit: F) {
    for_each_insertion(y, |base, inserted| {
        let mut z = base.clone();
        for_each_flip_set(z.len(), s, Some(inserted), |flips| {
            for &p in flips {
                z.flip(p);
            }
            visit(&z);
            for &p in flips {
                z.flip(p);
            }
        });
    });
}

/// Visits each distinct string obtained by inserting one symbol into `y`,
/// together with the 0-based index of the inserted symbol.
pub fn for_each_insertion<F: FnMut(&BitString, usize)>(y: &BitString, mut visit: F) {
    for bit in 0..=1u8 {
        for pos in 0..=y.len() {
            // Inserting `bit` right after an equal symbol duplicates the
            // insertion one position earlier.
            if pos > 0 && y.bit(pos - 1) == bit {
                continue;
            }
            let mut z = y.0.clone();
            z.insert(pos, bit);
            visit(&BitString(z), pos);
        }
    }
}

/// Visits every set of at most `max` distinct 0-based positions in
/// `0..len`, skipping `exclude`. Each set is passed in increasing order,
/// starting with the empty set.
pub fn for_each_flip_set<F: FnMut(&[usize])>(len: usize, max: usize, exclude: Option<usize>, mut visit: F) {
    fn rec<F: FnMut(&[usize])>(
        start: usize,
        len: usize,
        remaining: usize,
        exclude: Option<usize>,
        stack: &mut Vec<usize>,
        visit: &mut F,
    ) {
        visit(stack);
        if remaining == 0 {
            return;
        }
        for p in start..len {
            if Some(p) == exclude {
                continue;
            }
            stack.push(p);
            rec(p + 1, len, remaining - 1, exclude, stack, visit);
            stack.pop();
        }
    }
    let mut stack = Vec::with_capacity(max);
    rec(0, len, max, exclude, &mut stack, &mut visit);
}

/// Seeded channel: one uniformly chosen deletion, then `s'` uniform in
/// `[0, s]` distinct substitutions on the shortened string.
pub fn corrupt(x: &BitString, s: usize, seed: u64) -> Result<BitString> {
    if x.len() < 2 {
        return Err(Error::TooShort { len: x.len(), min: 2 });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let del = rng.gen_range(0..x.len());
    let mut y = x.clone();
    y.0.remove(del);
    let count = rng.gen_range(0..=s.min(y.len()));
    for p in index::sample(&mut rng, y.len(), count) {
        y.flip(p);
    }
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    fn set(items: &[&str]) -> BTreeSet<BitString> {
        items.iter().map(|s| bs(s)).collect()
    }

    #[test]
    fn delete_examples() {
        assert_eq!(delete_at(&bs("011"), 1).unwrap(), bs("11"));
        assert_eq!(delete_at(&bs("00"), 2).unwrap(), bs("0"));
        assert_eq!(delete_at(&bs("10110"), 3).unwrap(), bs("1010"));
        assert!(matches!(delete_at(&bs("01"), 0), Err(Error::PositionOutOfRange { .. })));
        assert!(matches!(delete_at(&bs("01"), 3), Err(Error::PositionOutOfRange { .. })));
    }

    #[test]
    fn insert_examples() {
        assert_eq!(insert_at(&bs("11"), 1, 0).unwrap(), bs("011"));
        assert_eq!(insert_at(&bs(""), 1, 1).unwrap(), bs("1"));
        assert_eq!(insert_at(&bs("10"), 3, 0).unwrap(), bs("100"));
        assert!(insert_at(&bs("10"), 4, 0).is_err());
    }

    #[test]
    fn substitute_examples() {
        assert_eq!(substitute(&bs("000"), &[2].into()).unwrap(), bs("010"));
        assert_eq!(substitute(&bs("1011"), &BTreeSet::new()).unwrap(), bs("1011"));
        assert_eq!(substitute(&bs("1100"), &[1, 4].into()).unwrap(), bs("0101"));
        assert!(substitute(&bs("1100"), &[5].into()).is_err());
    }

    #[test]
    fn ball_examples() {
        assert_eq!(ball_down(&bs("01"), 0).unwrap(), set(&["0", "1"]));
        assert_eq!(ball_down(&bs("00"), 0).unwrap(), set(&["0"]));
        assert_eq!(ball_down(&bs("00"), 1).unwrap(), set(&["0", "1"]));
        assert!(matches!(ball_down(&bs("1"), 1), Err(Error::TooShort { .. })));
    }

    #[test]
    fn up_candidate_examples() {
        assert_eq!(up_candidates(&bs("0"), 0), set(&["00", "01", "10"]));
        assert_eq!(up_candidates(&bs(""), 0), set(&["0", "1"]));
        assert_eq!(up_candidates(&bs("1"), 1), set(&["00", "01", "10", "11"]));
    }

    #[test]
    fn distinct_insertions_number_len_plus_two() {
        for len in 0..9 {
            for y in BitString::all_of_length(len) {
                let mut seen = BTreeSet::new();
                let mut visits = 0;
                for_each_insertion(&y, |z, _| {
                    visits += 1;
                    seen.insert(z.clone());
                });
                assert_eq!(visits, len + 2);
                assert_eq!(seen.len(), len + 2);
            }
        }
    }

    #[test]
    fn flip_sets_count_binomials() {
        let mut count = 0;
        for_each_flip_set(6, 2, None, |_| count += 1);
        assert_eq!(count, 1 + 6 + 15);
        let mut count = 0;
        for_each_flip_set(6, 2, Some(3), |f| {
            assert!(!f.contains(&3));
            count += 1;
        });
        assert_eq!(count, 1 + 5 + 10);
    }

    #[test]
    fn up_down_duality_exhaustive() {
        for s in 0..=2 {
            for len in 0..=6 {
                for y in BitString::all_of_length(len) {
                    let up = up_candidates(&y, s);
                    for z in BitString::all_of_length(len + 1) {
                        let in_ball = z.len() >= 2 && ball_down(&z, s).unwrap().contains(&y);
                        let in_ball = in_ball || (z.len() == 1);
                        assert_eq!(up.contains(&z), in_ball, "y={y} z={z} s={s}");
                        if z.len() >= 2 {
                            assert_eq!(in_ball_down(&z, &y, s), in_ball);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn clean_ball_size_counts_runs() {
        for len in 2..=10 {
            for x in BitString::all_of_length(len) {
                let runs = 1 + x.as_slice().windows(2).filter(|w| w[0] != w[1]).count();
                let ball = ball_down(&x, 0).unwrap();
                assert_eq!(ball.len(), runs);
                assert_eq!(ball.len() == len, runs == len);
            }
        }
    }

    #[test]
    fn corrupt_zero_budget_is_a_deletion() {
        let x = bs("1101001110");
        for seed in 0..50 {
            let y = corrupt(&x, 0, seed).unwrap();
            assert!((1..=x.len()).any(|i| delete_at(&x, i).unwrap() == y));
        }
    }

    #[test]
    fn corrupt_example_all_zeros() {
        let y = corrupt(&bs("0000"), 1, 7).unwrap();
        assert_eq!(y.len(), 3);
        assert!(y.weight() <= 1);
        assert!(ball_down(&bs("0000"), 1).unwrap().contains(&y));
    }

    #[test]
    fn corrupt_is_deterministic() {
        let x = bs("0110100111010");
        assert_eq!(corrupt(&x, 2, 99).unwrap(), corrupt(&x, 2, 99).unwrap());
        assert!(corrupt(&bs("1"), 1, 0).is_err());
    }

    #[test]
    fn biguint_round_trip() {
        let x = bs("0010110");
        assert_eq!(x.to_biguint(), BigUint::from(22u32));
        assert_eq!(BitString::from_biguint(&BigUint::from(22u32), 7).unwrap(), x);
        assert!(BitString::from_biguint(&BigUint::from(22u32), 4).is_err());
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!("0120".parse::<BitString>().is_err());
        assert!(BitString::from_bits(vec![0, 2]).is_err());
        assert_eq!(bs("0110").to_string(), "0110");
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_bits(max: usize) -> impl Strategy<Value = BitString> {
            proptest::collection::vec(0u8..=1, 0..max).prop_map(BitString)
        }

        proptest! {
            #[test]
            fn delete_undoes_insert(x in arb_bits(40), pos_seed in any::<usize>(), bit in 0u8..=1) {
                let pos = pos_seed % (x.len() + 1) + 1;
                let z = insert_at(&x, pos, bit).unwrap();
                prop_assert_eq!(z.bit(pos - 1), bit);
                prop_assert_eq!(delete_at(&z, pos).unwrap(), x);
            }

            #[test]
            fn corrupt_lands_in_ball(x in arb_bits(14), s in 0usize..3, seed in any::<u64>()) {
                prop_assume!(x.len() >= 2);
                let y = corrupt(&x, s, seed).unwrap();
                prop_assert!(ball_down(&x, s).unwrap().contains(&y));
            }

            #[test]
            fn intersection_is_symmetric(
                (x, y) in (2usize..9).prop_flat_map(|n| {
                    let v = proptest::collection::vec(0u8..=1, n);
                    (v.clone().prop_map(BitString), v.prop_map(BitString))
                }),
                s in 0usize..2,
            ) {
                let bx = ball_down(&x, s).unwrap();
                let by = ball_down(&y, s).unwrap();
                prop_assert_eq!(bx.intersection(&by).next().is_some(), by.intersection(&bx).next().is_some());
            }
        }
    }
}
