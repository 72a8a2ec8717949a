//! Shortened systematic binary BCH pre-code with minimum distance `2s + 1`.
//!
//! The unshortened code is the narrow-sense primitive BCH code of length
//! `2^m - 1` whose generator is the least common multiple of the minimal
//! polynomials of `alpha, alpha^2, ..., alpha^(2s)`. A message `x` of `k` bits
//! is padded with `k' - k` leading zeros, encoded systematically as
//! `(0, x, p)`, and the zeros are dropped, giving `h(x) = (x, p)` of length
//! `n0 = k + deg(g)`.
//!
//! Word position 1 carries the coefficient of `z^(n0 - 1)`, so a word is a
//! codeword exactly when the generator divides its polynomial.

use std::collections::{BTreeSet, HashMap};

use num_bigint::BigUint;

use crate::bitstring::{for_each_flip_set, BitString};
use crate::error::{Error, Result};
use crate::gf::{self, GaloisField};

#[derive(Debug, Clone)]
pub struct BchCode {
    s: usize,
    k: usize,
    field: GaloisField,
    generator: u128,
    kprime: usize,
    n0: usize,
    /// Remainder of `z^(n0 - 1 - i)` modulo the generator, for each index `i`.
    position_syndromes: Vec<u128>,
    /// Error pattern of weight at most `s` for each correctable syndrome.
    coset_leaders: HashMap<u128, Vec<usize>>,
}

/// `n0 - k <= s (log2(n0) + 2)`, decided in exact integer arithmetic.
pub fn satisfies_redundancy_bound(n0: usize, k: usize, s: usize) -> bool {
    if n0 < k {
        return false;
    }
    let r = n0 - k;
    if r <= 2 * s {
        return true;
    }
    // r - 2s <= s log2(n0)  <=>  2^(r - 2s) <= n0^s
    BigUint::from(1u32) << (r - 2 * s) <= BigUint::from(n0).pow(s as u32)
}

/// Generator of the narrow-sense BCH code with designed distance `2s + 1`.
pub fn bch_generator(field: &GaloisField, s: usize) -> Result<u128> {
    let mut seen: BTreeSet<Vec<u32>> = BTreeSet::new();
    let mut generator = 1u128;
    // Even powers share a coset with an odd one, so alpha^1, alpha^3, ...,
    // alpha^(2s-1) cover every required root.
    for i in (1..2 * s as u32).step_by(2) {
        let coset = field.cyclotomic_coset(i);
        if seen.insert(coset) {
            generator = gf::poly_mul(generator, field.minimal_polynomial(i))?;
        }
    }
    Ok(generator)
}

impl BchCode {
    /// Picks the smallest `m >= 3` whose code has dimension at least `k` and
    /// whose shortened length exceeds `2s + 1`.
    pub fn select_params(k: usize, s: usize) -> Result<Self> {
        if k == 0 || s == 0 {
            return Err(Error::InvalidParams("message length and budget must be positive".into()));
        }
        for m in gf::MIN_DEGREE..=gf::MAX_DEGREE {
            let field = GaloisField::new(m)?;
            let full_length = field.order() as usize;
            let generator = match bch_generator(&field, s) {
                Ok(g) => g,
                Err(_) => continue,
            };
            let redundancy = gf::poly_degree(generator).unwrap_or(0) as usize;
            if redundancy >= full_length {
                continue;
            }
            let kprime = full_length - redundancy;
            if kprime < k || k + redundancy <= 2 * s + 1 {
                continue;
            }
            return Self::build(k, s, field, generator);
        }
        Err(Error::InvalidParams(format!("no BCH code with m <= {} fits k = {k}, s = {s}", gf::MAX_DEGREE)))
    }

    fn build(k: usize, s: usize, field: GaloisField, generator: u128) -> Result<Self> {
        let redundancy = gf::poly_degree(generator).unwrap_or(0) as usize;
        let full_length = field.order() as usize;
        let kprime = full_length - redundancy;
        let n0 = k + redundancy;
        if !satisfies_redundancy_bound(n0, k, s) {
            return Err(Error::InvalidParams(format!(
                "n0 = {n0} violates the pre-code redundancy bound for k = {k}, s = {s}"
            )));
        }

        let mut position_syndromes = vec![0u128; n0];
        let mut power = 1u128;
        for slot in position_syndromes.iter_mut().rev() {
            *slot = power;
            power = gf::poly_rem(power << 1, generator);
        }

        let mut coset_leaders = HashMap::new();
        let mut collision = false;
        for_each_flip_set(n0, s, None, |pattern| {
            let syn = pattern.iter().fold(0u128, |acc, &p| acc ^ position_syndromes[p]);
            if coset_leaders.insert(syn, pattern.to_vec()).is_some() {
                collision = true;
            }
        });
        if collision {
            return Err(Error::InvalidParams("error patterns of weight <= s share a syndrome".into()));
        }

        Ok(BchCode { s, k, field, generator, kprime, n0, position_syndromes, coset_leaders })
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn m(&self) -> u32 {
        self.field.degree()
    }

    pub fn primitive_poly(&self) -> u32 {
        self.field.primitive_poly()
    }

    pub fn field(&self) -> &GaloisField {
        &self.field
    }

    /// Unshortened length `2^m - 1`.
    pub fn full_length(&self) -> usize {
        self.field.order() as usize
    }

    /// Dimension of the unshortened code.
    pub fn kprime(&self) -> usize {
        self.kprime
    }

    pub fn n0(&self) -> usize {
        self.n0
    }

    /// Generator polynomial as a bit mask, bit `i` = coefficient of `z^i`.
    pub fn generator(&self) -> u128 {
        self.generator
    }

    /// Generator coefficients from the highest degree down.
    pub fn generator_coefficients(&self) -> Vec<u8> {
        let deg = gf::poly_degree(self.generator).unwrap_or(0);
        (0..=deg).rev().map(|d| ((self.generator >> d) & 1) as u8).collect()
    }

    pub fn parity_len(&self) -> usize {
        self.n0 - self.k
    }

    /// Syndrome contribution of a 1 at 0-based index `idx`.
    #[inline]
    pub fn position_syndrome(&self, idx: usize) -> u128 {
        self.position_syndromes[idx]
    }

    /// Remainder of the word's polynomial modulo the generator.
    pub fn syndrome(&self, c: &BitString) -> u128 {
        c.as_slice()
            .iter()
            .zip(&self.position_syndromes)
            .filter(|(&b, _)| b == 1)
            .fold(0u128, |acc, (_, &syn)| acc ^ syn)
    }

    /// The correctable error pattern (0-based indices) for a syndrome, if any.
    pub fn coset_leader(&self, syndrome: u128) -> Option<&[usize]> {
        self.coset_leaders.get(&syndrome).map(Vec::as_slice)
    }

    fn check_len(&self, len: usize, expected: usize) -> Result<()> {
        if len != expected {
            return Err(Error::LengthMismatch { expected, actual: len });
        }
        Ok(())
    }

    /// `h(x) = (x, p)`.
    pub fn encode_h(&self, x: &BitString) -> Result<BitString> {
        self.check_len(x.len(), self.k)?;
        let parity = x
            .as_slice()
            .iter()
            .enumerate()
            .filter(|(_, &b)| b == 1)
            .fold(0u128, |acc, (i, _)| acc ^ self.position_syndromes[i]);
        let mut c = x.clone();
        for d in (0..self.parity_len()).rev() {
            c.push(((parity >> d) & 1) as u8);
        }
        debug_assert_eq!(self.syndrome(&c), 0);
        Ok(c)
    }

    pub fn is_codeword(&self, c: &BitString) -> Result<bool> {
        self.check_len(c.len(), self.n0)?;
        Ok(self.syndrome(c) == 0)
    }

    /// Checks membership through the defining roots `alpha, ..., alpha^(2s)`
    /// rather than through the generator.
    pub fn has_designed_roots(&self, c: &BitString) -> Result<bool> {
        self.check_len(c.len(), self.n0)?;
        let poly = c
            .as_slice()
            .iter()
            .rev()
            .enumerate()
            .filter(|(_, &b)| b == 1)
            .fold(0u128, |acc, (d, _)| acc | (1u128 << d));
        Ok((1..=2 * self.s as u64).all(|e| self.field.eval_at_alpha_pow(poly, e) == 0))
    }

    /// The unique codeword within Hamming distance `s`, if there is one.
    pub fn bounded_decode(&self, z: &BitString) -> Result<Option<BitString>> {
        self.check_len(z.len(), self.n0)?;
        Ok(self.coset_leader(self.syndrome(z)).map(|pattern| {
            let mut c = z.clone();
            for &p in pattern {
                c.flip(p);
            }
            c
        }))
    }

    /// The systematic part of a codeword.
    pub fn extract_info(&self, c: &BitString) -> Result<BitString> {
        if !self.is_codeword(c)? {
            return Err(Error::NotACodeword);
        }
        Ok(c.substring(0..self.k))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    fn all_codewords(code: &BchCode) -> Vec<BitString> {
        BitString::all_of_length(code.k()).map(|x| code.encode_h(&x).unwrap()).collect()
    }

    #[test]
    fn select_params_examples() {
        let c = BchCode::select_params(4, 1).unwrap();
        assert_eq!((c.m(), c.full_length(), c.kprime(), c.n0()), (3, 7, 4, 7));
        assert_eq!(c.generator(), 0b1011);

        let c = BchCode::select_params(11, 1).unwrap();
        assert_eq!((c.m(), c.full_length(), c.kprime(), c.n0()), (4, 15, 11, 15));
        assert_eq!(c.generator(), 0b10011);

        let c = BchCode::select_params(5, 2).unwrap();
        assert_eq!((c.m(), c.kprime(), c.n0()), (4, 7, 13));
        assert_eq!(gf::poly_degree(c.generator()), Some(8));
        assert_eq!(c.generator_coefficients(), vec![1, 1, 1, 0, 1, 0, 0, 0, 1]);
    }

    #[test]
    fn select_params_keeps_length_above_2s_plus_1() {
        // m = 3 would give the length-7 repetition code, which is not longer than 2s+1.
        let c = BchCode::select_params(1, 3).unwrap();
        assert_eq!(c.m(), 4);
        assert!(c.n0() > 7);
        assert!(BchCode::select_params(0, 1).is_err());
    }

    #[test]
    fn encode_example_hamming_7_4() {
        let c = BchCode::select_params(4, 1).unwrap();
        assert_eq!(c.encode_h(&bs("1000")).unwrap(), bs("1000101"));
        assert_eq!(c.encode_h(&bs("0000")).unwrap(), bs("0000000"));
        assert!(matches!(c.encode_h(&bs("100")), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn codewords_have_designed_roots() {
        for (k, s) in [(4, 1), (5, 2), (9, 3), (16, 2)] {
            let code = BchCode::select_params(k, s).unwrap();
            for x in BitString::all_of_length(k).step_by(7) {
                let c = code.encode_h(&x).unwrap();
                assert!(code.is_codeword(&c).unwrap());
                assert!(code.has_designed_roots(&c).unwrap());
                assert_eq!(code.extract_info(&c).unwrap(), x);
            }
        }
    }

    #[test]
    fn single_flips_leave_the_code() {
        let code = BchCode::select_params(4, 1).unwrap();
        for c in all_codewords(&code) {
            for i in 0..code.n0() {
                let mut z = c.clone();
                z.flip(i);
                assert!(!code.is_codeword(&z).unwrap());
                assert!(matches!(code.extract_info(&z), Err(Error::NotACodeword)));
            }
        }
    }

    #[test]
    fn minimum_distance_exhaustive() {
        for s in 1..=3 {
            for k in 1..=8 {
                let code = BchCode::select_params(k, s).unwrap();
                let words = all_codewords(&code);
                for (i, a) in words.iter().enumerate() {
                    for b in &words[i + 1..] {
                        assert!(a.hamming_distance(b).unwrap() > 2 * s, "k={k} s={s}");
                    }
                }
            }
        }
    }

    #[test]
    fn minimum_distance_weight_one_differences() {
        for (k, s) in [(16, 2), (40, 2), (64, 3)] {
            let code = BchCode::select_params(k, s).unwrap();
            for i in 0..k {
                let mut x = BitString::zeros(k);
                x.flip(i);
                assert!(code.encode_h(&x).unwrap().weight() > 2 * s);
            }
        }
    }

    #[test]
    fn bounded_decode_complete_and_sound() {
        for (k, s) in [(4, 1), (5, 2)] {
            let code = BchCode::select_params(k, s).unwrap();
            for c in all_codewords(&code) {
                for_each_flip_set(code.n0(), s, None, |pattern| {
                    let mut z = c.clone();
                    for &p in pattern {
                        z.flip(p);
                    }
                    assert_eq!(code.bounded_decode(&z).unwrap(), Some(c.clone()));
                });
            }
        }
    }

    #[test]
    fn bounded_decode_rejects_distant_words() {
        let code = BchCode::select_params(4, 1).unwrap();
        let words = all_codewords(&code);
        let mut rejected = 0;
        for z in BitString::all_of_length(7) {
            let nearest = words.iter().map(|c| c.hamming_distance(&z).unwrap()).min().unwrap();
            match code.bounded_decode(&z).unwrap() {
                Some(c) => {
                    assert!(c.hamming_distance(&z).unwrap() <= 1);
                    assert!(code.is_codeword(&c).unwrap());
                }
                None => {
                    assert!(nearest >= 2);
                    rejected += 1;
                }
            }
        }
        // The (7,4) Hamming code is perfect: every word is within distance 1.
        assert_eq!(rejected, 0);

        let code = BchCode::select_params(5, 2).unwrap();
        let words = all_codewords(&code);
        let mut z = words[3].clone();
        z.flip(0);
        z.flip(1);
        z.flip(2);
        let nearest = words.iter().map(|c| c.hamming_distance(&z).unwrap()).min().unwrap();
        assert_eq!(code.bounded_decode(&z).unwrap().is_none(), nearest > 2);
        assert!(nearest >= 2);
    }

    #[test]
    fn redundancy_bound_holds_on_grid() {
        for s in 1..=3 {
            for k in 1..=64 {
                let code = BchCode::select_params(k, s).unwrap();
                assert!(satisfies_redundancy_bound(code.n0(), k, s));
                let n0 = code.n0() as f64;
                assert!((code.n0() - k) as f64 <= s as f64 * (n0.log2() + 2.0) + 1e-9);
            }
        }
    }

    #[test]
    fn redundancy_bound_arithmetic() {
        // s = 1, n0 = 7: 7 - 4 = 3 <= log2(7) + 2.
        assert!(satisfies_redundancy_bound(7, 4, 1));
        // r = 5 > log2(7) + 2 ~ 4.81.
        assert!(!satisfies_redundancy_bound(7, 2, 1));
    }
}
