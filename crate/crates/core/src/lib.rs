//! Systematic codes correcting one deletion together with up to `s` substitutions.
//!
//! A message `x` of `k` bits is encoded as three concatenated segments:
//!
//! 1. `h(x)`: a shortened systematic BCH codeword of minimum distance `2s + 1`
//!    ([`precode`]),
//! 2. `g(h(x))`: a compressed syndrome tag that singles out `h(x)` among all
//!    codewords whose error balls intersect its own ([`compress`]),
//! 3. a `(2s + 2)`-fold repetition of the higher-order checksum of the tag
//!    ([`checksum`], [`repcode`]).
//!
//! Decoding runs the stages in reverse: the repetition segment yields the
//! checksum of the tag, the checksum pins down the tag, and the tag pins down
//! the BCH codeword ([`codec`]). The [`oracle`] module holds brute-force
//! reference implementations used to verify the construction.

pub mod bitstring;
pub mod checksum;
pub mod cli;
pub mod codec;
pub mod compress;
mod error;
pub mod gf;
pub mod oracle;
pub mod precode;
pub mod repcode;

pub use bitstring::BitString;
pub use checksum::{Checksum, ChecksumParams};
pub use codec::{CodecParams, Codeword};
pub use compress::{Neighborhood, SyndromeTag};
pub use error::{Error, Result, Stage};
pub use precode::BchCode;
pub use repcode::RepBlock;
