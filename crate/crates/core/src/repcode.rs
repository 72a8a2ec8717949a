//! Repetition wrapper for the final checksum segment.
//!
//! Each payload bit is repeated `2s + 2` times. The decoder is given a word
//! that lost exactly one symbol and may carry up to `s` substitutions. It
//! tries every block as the one that lost a symbol, majority-decodes all
//! blocks under that hypothesis, and accepts the hypothesis when the total
//! number of minority symbols is at most `s`.

use crate::bitstring::BitString;
use crate::error::{Error, Result, Stage};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RepBlock {
    s: usize,
    msg_len: usize,
}

impl RepBlock {
    pub fn new(s: usize, msg_len: usize) -> Result<Self> {
        if s == 0 {
            return Err(Error::InvalidParams("substitution budget must be at least 1".into()));
        }
        if msg_len == 0 {
            return Err(Error::EmptyMessage);
        }
        Ok(RepBlock { s, msg_len })
    }

    pub fn fold(&self) -> usize {
        2 * self.s + 2
    }

    pub fn msg_len(&self) -> usize {
        self.msg_len
    }

    pub fn encoded_len(&self) -> usize {
        self.fold() * self.msg_len
    }

    pub fn encode(&self, u: &BitString) -> Result<BitString> {
        if u.len() != self.msg_len {
            return Err(Error::LengthMismatch { expected: self.msg_len, actual: u.len() });
        }
        rep_encode(u, self.fold())
    }

    pub fn decode(&self, y: &BitString) -> Result<BitString> {
        rep_decode(y, self.fold(), self.msg_len, self.s)
    }
}

pub fn rep_encode(u: &BitString, fold: usize) -> Result<BitString> {
    if u.is_empty() {
        return Err(Error::EmptyMessage);
    }
    let mut out = BitString::new();
    for &b in u.as_slice() {
        for _ in 0..fold {
            out.push(b);
        }
    }
    Ok(out)
}

/// Majority bit of a block (ties go to 0) and the number of symbols
/// disagreeing with it.
fn majority(block: &[u8]) -> (u8, usize) {
    let ones = block.iter().filter(|&&b| b == 1).count();
    let zeros = block.len() - ones;
    if ones > zeros {
        (1, zeros)
    } else {
        (0, ones)
    }
}

/// Decodes a repetition codeword that lost exactly one symbol and suffered at
/// most `s` substitutions. Returns the message of the first feasible
/// hypothesis after checking every feasible hypothesis agrees with it.
pub fn rep_decode(y: &BitString, fold: usize, msg_len: usize, s: usize) -> Result<BitString> {
    if msg_len == 0 {
        return Err(Error::EmptyMessage);
    }
    let expected = fold * msg_len - 1;
    if y.len() != expected {
        return Err(Error::LengthMismatch { expected, actual: y.len() });
    }
    let bits = y.as_slice();
    let mut accepted: Option<BitString> = None;
    for short in 0..msg_len {
        let mut message = BitString::new();
        let mut mismatches = 0;
        let mut start = 0;
        for block in 0..msg_len {
            let size = if block == short { fold - 1 } else { fold };
            let (bit, minority) = majority(&bits[start..start + size]);
            message.push(bit);
            mismatches += minority;
            start += size;
            if mismatches > s {
                break;
            }
        }
        if mismatches > s {
            continue;
        }
        match &accepted {
            None => accepted = Some(message),
            Some(first) if *first != message => {
                return Err(Error::MultipleSurvivors { stage: Stage::Repetition, count: 2 });
            }
            Some(_) => {}
        }
    }
    accepted.ok_or(Error::NoSurvivor { stage: Stage::Repetition })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitstring::{delete_at, for_each_flip_set};

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn encode_examples() {
        assert_eq!(rep_encode(&bs("10"), 4).unwrap(), bs("11110000"));
        assert_eq!(rep_encode(&bs("0"), 6).unwrap(), bs("000000"));
        assert!(matches!(rep_encode(&bs(""), 4), Err(Error::EmptyMessage)));
        let block = RepBlock::new(2, 3).unwrap();
        assert_eq!(block.fold(), 6);
        assert_eq!(block.encode(&bs("101")).unwrap().len(), block.encoded_len());
    }

    #[test]
    fn last_symbol_dropped() {
        let u = bs("10110");
        let y = delete_at(&rep_encode(&u, 4).unwrap(), 20).unwrap();
        assert_eq!(rep_decode(&y, 4, 5, 1).unwrap(), u);
    }

    #[test]
    fn deletion_in_first_block_with_any_flip() {
        let y = bs("1110000");
        for i in 0..7 {
            let mut z = y.clone();
            z.flip(i);
            assert_eq!(rep_decode(&z, 4, 2, 1).unwrap(), bs("10"), "flip at {i}");
        }
    }

    #[test]
    fn tied_block_rejects_hypothesis() {
        // Every hypothesis sees a 2-vs-2 (or worse) block, exceeding s = 1.
        let y = bs("1100111");
        assert!(matches!(rep_decode(&y, 4, 2, 1), Err(Error::NoSurvivor { stage: Stage::Repetition })));
        // With s = 2 and fold 6, a 3-vs-3 block costs 3 > 2.
        let y = bs("11100011111");
        assert!(rep_decode(&y, 6, 2, 2).is_err());
    }

    #[test]
    fn wrong_length_rejected() {
        assert!(matches!(rep_decode(&bs("1111000"), 4, 3, 1), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn clean_deletion_round_trip() {
        for s in 1..=3 {
            let fold = 2 * s + 2;
            for len in 1..=6 {
                for u in BitString::all_of_length(len) {
                    let c = rep_encode(&u, fold).unwrap();
                    for i in 1..=c.len() {
                        let y = delete_at(&c, i).unwrap();
                        assert_eq!(rep_decode(&y, fold, len, s).unwrap(), u);
                    }
                }
            }
        }
    }

    #[test]
    fn exhaustive_small_messages() {
        for s in 1..=2 {
            let fold = 2 * s + 2;
            for len in 1..=3 {
                for u in BitString::all_of_length(len) {
                    let c = rep_encode(&u, fold).unwrap();
                    for i in 1..=c.len() {
                        let y = delete_at(&c, i).unwrap();
                        for_each_flip_set(y.len(), s, None, |flips| {
                            let mut z = y.clone();
                            for &p in flips {
                                z.flip(p);
                            }
                            assert_eq!(rep_decode(&z, fold, len, s).unwrap(), u);
                        });
                    }
                }
            }
        }
    }
}
