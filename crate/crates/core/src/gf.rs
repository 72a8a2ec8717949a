//! GF(2^m) arithmetic and binary polynomials, enough to build BCH generators.
//!
//! Binary polynomials are stored as `u128` bit masks: bit `i` is the
//! coefficient of `x^i`.

use crate::error::{Error, Result};

/// Primitive polynomials for `m = 3..=16`, the usual minimal-weight choices.
pub const PRIMITIVE_POLYS: [(u32, u32); 14] = [
    (3, 0xB),      // x^3 + x + 1
    (4, 0x13),     // x^4 + x + 1
    (5, 0x25),     // x^5 + x^2 + 1
    (6, 0x43),     // x^6 + x + 1
    (7, 0x89),     // x^7 + x^3 + 1
    (8, 0x11D),    // x^8 + x^4 + x^3 + x^2 + 1
    (9, 0x211),    // x^9 + x^4 + 1
    (10, 0x409),   // x^10 + x^3 + 1
    (11, 0x805),   // x^11 + x^2 + 1
    (12, 0x1053),  // x^12 + x^6 + x^4 + x + 1
    (13, 0x201B),  // x^13 + x^4 + x^3 + x + 1
    (14, 0x4443),  // x^14 + x^10 + x^6 + x + 1
    (15, 0x8003),  // x^15 + x + 1
    (16, 0x1100B), // x^16 + x^12 + x^3 + x + 1
];

pub const MIN_DEGREE: u32 = 3;
pub const MAX_DEGREE: u32 = 16;

/// The field GF(2^m) with exp/log tables over a primitive element `alpha`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GaloisField {
    m: u32,
    primitive: u32,
    exp: Vec<u32>,
    log: Vec<u32>,
}

impl GaloisField {
    /// Field built from the tabulated primitive polynomial of degree `m`.
    pub fn new(m: u32) -> Result<Self> {
        let primitive = PRIMITIVE_POLYS
            .iter()
            .find(|(deg, _)| *deg == m)
            .map(|(_, p)| *p)
            .ok_or_else(|| Error::InvalidParams(format!("no primitive polynomial tabulated for m = {m}")))?;
        Self::with_polynomial(m, primitive)
    }

    /// Fails if `primitive` does not generate the full multiplicative group.
    pub fn with_polynomial(m: u32, primitive: u32) -> Result<Self> {
        if m == 0 || m > MAX_DEGREE || primitive >> m != 1 {
            return Err(Error::InvalidParams(format!("bad field polynomial {primitive:#x} for m = {m}")));
        }
        let order = (1u32 << m) - 1;
        let mut exp = vec![0u32; order as usize];
        let mut log = vec![u32::MAX; 1 << m];
        let mut a = 1u32;
        for (i, slot) in exp.iter_mut().enumerate() {
            if log[a as usize] != u32::MAX {
                return Err(Error::InvalidParams(format!("{primitive:#x} is not primitive")));
            }
            *slot = a;
            log[a as usize] = i as u32;
            a <<= 1;
            if a >> m != 0 {
                a ^= primitive;
            }
        }
        Ok(GaloisField { m, primitive, exp, log })
    }

    pub fn degree(&self) -> u32 {
        self.m
    }

    pub fn primitive_poly(&self) -> u32 {
        self.primitive
    }

    /// Multiplicative group order `2^m - 1`.
    pub fn order(&self) -> u32 {
        (1 << self.m) - 1
    }

    /// `alpha^e`.
    pub fn alpha_pow(&self, e: u64) -> u32 {
        self.exp[(e % self.order() as u64) as usize]
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        let e = (self.log[a as usize] + self.log[b as usize]) % self.order();
        self.exp[e as usize]
    }

    /// The cyclotomic coset `{i 2^j mod (2^m - 1)}`, sorted.
    pub fn cyclotomic_coset(&self, i: u32) -> Vec<u32> {
        let n = self.order();
        let mut coset = Vec::new();
        let mut e = i % n;
        while !coset.contains(&e) {
            coset.push(e);
            e = (e * 2) % n;
        }
        coset.sort_unstable();
        coset
    }

    /// Minimal polynomial of `alpha^i` over GF(2).
    pub fn minimal_polynomial(&self, i: u32) -> u128 {
        // Coefficients in GF(2^m), lowest degree first.
        let mut poly: Vec<u32> = vec![1];
        for e in self.cyclotomic_coset(i) {
            let root = self.alpha_pow(e as u64);
            let mut next = vec![0u32; poly.len() + 1];
            for (d, &c) in poly.iter().enumerate() {
                next[d + 1] ^= c;
                next[d] ^= self.mul(c, root);
            }
            poly = next;
        }
        poly.iter().enumerate().fold(0u128, |acc, (d, &c)| {
            debug_assert!(c <= 1, "minimal polynomial has a coefficient outside GF(2)");
            acc | ((c as u128) << d)
        })
    }

    /// Evaluates a binary polynomial at `alpha^e`.
    pub fn eval_at_alpha_pow(&self, poly: u128, e: u64) -> u32 {
        let mut acc = 0u32;
        for d in 0..128u64 {
            if (poly >> d) & 1 == 1 {
                acc ^= self.alpha_pow(d * e);
            }
        }
        acc
    }
}

pub fn poly_degree(p: u128) -> Option<u32> {
    if p == 0 {
        None
    } else {
        Some(127 - p.leading_zeros())
    }
}

/// Carry-less product; fails on overflow past degree 127.
pub fn poly_mul(a: u128, b: u128) -> Result<u128> {
    let (Some(da), Some(db)) = (poly_degree(a), poly_degree(b)) else {
        return Ok(0);
    };
    if da + db > 127 {
        return Err(Error::InvalidParams("generator polynomial degree exceeds 127".into()));
    }
    let mut out = 0u128;
    for d in 0..=db {
        if (b >> d) & 1 == 1 {
            out ^= a << d;
        }
    }
    Ok(out)
}

pub fn poly_rem(mut a: u128, modulus: u128) -> u128 {
    let dm = poly_degree(modulus).expect("division by the zero polynomial");
    while let Some(da) = poly_degree(a) {
        if da < dm {
            break;
        }
        a ^= modulus << (da - dm);
    }
    a
}
