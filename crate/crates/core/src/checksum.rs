//! Higher-order weighted checksums and their mixed-radix packing.
//!
//! For a block length `L` and budget `s`, the checksum of `x` has `2s + 1`
//! components; component `j` is the inner product of `x` with the partial
//! power sums `a^(j)_i = 1^(j-1) + ... + i^(j-1)`, reduced modulo
//! `m_j = (2s + 1) L^j`. The components are packed into a single integer in
//! the mixed radix `(m_1, m_2, ...)` and written big-endian in
//! `ceil(log2(m_1 m_2 ... m_{2s+1}))` bits.
//!
//! The positional weights are `1, m_1, m_1 m_2, ...`. This is the standard
//! mixed-radix system and realizes a bijection onto `[0, prod m_j)`.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::bitstring::BitString;
use crate::error::{Error, Result};

/// Block length and budget of a checksum, with the derived moduli.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChecksumParams {
    len: usize,
    s: usize,
    moduli: Vec<BigUint>,
    radix: Vec<BigUint>,
    capacity: BigUint,
    packed_width: usize,
    weights: Vec<Vec<BigUint>>,
    machine: Option<Machine>,
}

/// Weights reduced modulo each `m_j`, kept when the capacity fits in `u128`.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Machine {
    weights: Vec<Vec<u64>>,
    moduli: Vec<u64>,
    radix: Vec<u128>,
}

impl Machine {
    fn build(moduli: &[BigUint], radix: &[BigUint], capacity: &BigUint, weights: &[Vec<BigUint>]) -> Option<Self> {
        if capacity.bits() > 127 {
            return None;
        }
        let small: Vec<u64> = moduli.iter().map(|m| m.to_u64()).collect::<Option<_>>()?;
        if small.iter().any(|&m| m >= 1 << 62) {
            return None;
        }
        let reduced = weights
            .iter()
            .zip(moduli)
            .map(|(ws, m)| ws.iter().map(|w| (w % m).to_u64()).collect::<Option<Vec<u64>>>())
            .collect::<Option<_>>()?;
        let radix = radix.iter().map(|r| r.to_u128()).collect::<Option<_>>()?;
        Some(Machine { weights: reduced, moduli: small, radix })
    }
}

/// The components `r_1, ..., r_{2s+1}` of a checksum.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Checksum(Vec<BigUint>);

impl Checksum {
    /// Wraps raw components. Range checks happen in [`pack`].
    pub fn new(components: Vec<BigUint>) -> Self {
        Checksum(components)
    }

    pub fn components(&self) -> &[BigUint] {
        &self.0
    }
}

impl ChecksumParams {
    /// Requires `len > 2s + 1` and `s >= 1`.
    pub fn new(len: usize, s: usize) -> Result<Self> {
        if s == 0 {
            return Err(Error::InvalidParams("substitution budget must be at least 1".into()));
        }
        if len <= 2 * s + 1 {
            return Err(Error::InvalidParams(format!(
                "block length {len} must exceed 2s+1 = {}",
                2 * s + 1
            )));
        }
        let orders = 2 * s + 1;
        let base = BigUint::from(orders);
        let l = BigUint::from(len);
        let mut moduli = Vec::with_capacity(orders);
        let mut power = BigUint::one();
        for _ in 0..orders {
            power *= &l;
            moduli.push(&base * &power);
        }
        let mut radix = Vec::with_capacity(orders);
        let mut acc = BigUint::one();
        for m in &moduli {
            radix.push(acc.clone());
            acc *= m;
        }
        let capacity = acc;
        let packed_width = (&capacity - 1u32).bits() as usize;
        let weights: Vec<Vec<BigUint>> = (1..=orders).map(|j| partial_power_sums(j, len)).collect();
        let machine = Machine::build(&moduli, &radix, &capacity, &weights);
        Ok(ChecksumParams { len, s, moduli, radix, capacity, packed_width, weights, machine })
    }

    /// Block length `L`.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn s(&self) -> usize {
        self.s
    }

    /// Number of components, `2s + 1`.
    pub fn orders(&self) -> usize {
        2 * self.s + 1
    }

    /// `m_j = (2s + 1) L^j` for `j = 1..=2s+1`.
    pub fn moduli(&self) -> &[BigUint] {
        &self.moduli
    }

    /// `prod_j m_j`, the number of distinct checksums.
    pub fn capacity(&self) -> &BigUint {
        &self.capacity
    }

    /// Bits needed to hold any packed checksum.
    pub fn packed_width(&self) -> usize {
        self.packed_width
    }

    /// `(s+1)(2s+1) log2 L + (2s+1) log2(2s+1)`, whose ceiling is
    /// [`packed_width`](Self::packed_width).
    pub fn xi(&self) -> f64 {
        let s = self.s as f64;
        (s + 1.0) * (2.0 * s + 1.0) * (self.len as f64).log2() + (2.0 * s + 1.0) * (2.0 * s + 1.0).log2()
    }

    /// Cached weight vector `a^(j)` for `j` in `1..=2s+1`.
    pub fn weight_vector(&self, j: usize) -> Result<&[BigUint]> {
        if j == 0 || j > self.orders() {
            return Err(Error::OrderOutOfRange { order: j, max: self.orders() });
        }
        Ok(&self.weights[j - 1])
    }
}

/// `a^(j)_i = sum_{l=1}^{i} l^(j-1)` for `i = 1..=len`.
pub fn weight_vector(j: usize, len: usize, s: usize) -> Result<Vec<BigUint>> {
    if j == 0 || j > 2 * s + 1 {
        return Err(Error::OrderOutOfRange { order: j, max: 2 * s + 1 });
    }
    Ok(partial_power_sums(j, len))
}

fn partial_power_sums(j: usize, len: usize) -> Vec<BigUint> {
    let mut acc = BigUint::zero();
    (1..=len)
        .map(|l| {
            acc += BigUint::from(l).pow(j as u32 - 1);
            acc.clone()
        })
        .collect()
}

/// The checksum `f(x)` for `|x| = L`.
pub fn f_checksum(x: &BitString, params: &ChecksumParams) -> Result<Checksum> {
    if x.len() != params.len {
        return Err(Error::LengthMismatch { expected: params.len, actual: x.len() });
    }
    let components = params
        .weights
        .iter()
        .zip(&params.moduli)
        .map(|(weights, m)| {
            let dot: BigUint = x
                .as_slice()
                .iter()
                .zip(weights)
                .filter(|(&b, _)| b == 1)
                .map(|(_, w)| w)
                .sum();
            dot % m
        })
        .collect();
    Ok(Checksum(components))
}

/// First checksum component `sum_i i x_i mod (2s+1)L` in machine arithmetic.
/// Used as a cheap prefilter before the full comparison.
pub fn first_component(x: &BitString, params: &ChecksumParams) -> u64 {
    let m1 = (params.orders() * params.len) as u64;
    let dot: u64 = x
        .as_slice()
        .iter()
        .enumerate()
        .filter(|(_, &b)| b == 1)
        .map(|(i, _)| i as u64 + 1)
        .sum();
    dot % m1
}

/// Mixed-radix value `M(r)` and its big-endian encoding in `packed_width` bits.
pub fn pack(r: &Checksum, params: &ChecksumParams) -> Result<(BigUint, BitString)> {
    let value = pack_value(r, params)?;
    let bits = BitString::from_biguint(&value, params.packed_width)?;
    Ok((value, bits))
}

pub fn pack_value(r: &Checksum, params: &ChecksumParams) -> Result<BigUint> {
    if r.0.len() != params.orders() {
        return Err(Error::LengthMismatch { expected: params.orders(), actual: r.0.len() });
    }
    let mut value = BigUint::zero();
    for (index, ((digit, m), w)) in r.0.iter().zip(&params.moduli).zip(&params.radix).enumerate() {
        if digit >= m {
            return Err(Error::ComponentOutOfRange { index: index + 1 });
        }
        value += digit * w;
    }
    Ok(value)
}

/// Inverse of [`pack_value`] by successive division.
pub fn unpack_value(value: &BigUint, params: &ChecksumParams) -> Result<Checksum> {
    if value >= &params.capacity {
        return Err(Error::ValueOutOfRange);
    }
    let mut rest = value.clone();
    let mut digits = Vec::with_capacity(params.orders());
    for m in &params.moduli {
        digits.push(&rest % m);
        rest /= m;
    }
    Ok(Checksum(digits))
}

pub fn unpack_bits(bits: &BitString, params: &ChecksumParams) -> Result<Checksum> {
    if bits.len() != params.packed_width {
        return Err(Error::LengthMismatch { expected: params.packed_width, actual: bits.len() });
    }
    unpack_value(&bits.to_biguint(), params)
}

/// `M(f(x))`.
pub fn packed_checksum(x: &BitString, params: &ChecksumParams) -> Result<BigUint> {
    match packed_checksum_u128(x, params)? {
        Some(v) => Ok(BigUint::from(v)),
        None => pack_value(&f_checksum(x, params)?, params),
    }
}

/// `M(f(x))` in machine arithmetic, or `None` when the capacity exceeds
/// 127 bits.
pub fn packed_checksum_u128(x: &BitString, params: &ChecksumParams) -> Result<Option<u128>> {
    if x.len() != params.len {
        return Err(Error::LengthMismatch { expected: params.len, actual: x.len() });
    }
    let Some(machine) = &params.machine else {
        return Ok(None);
    };
    let mut value = 0u128;
    for ((weights, &m), &r) in machine.weights.iter().zip(&machine.moduli).zip(&machine.radix) {
        // Each weight is below 2^62, so 2^64 of them fit in a u128 sum.
        let dot: u128 = x.as_slice().iter().zip(weights).filter(|(&b, _)| b == 1).map(|(_, &w)| w as u128).sum();
        value += (dot % m as u128) * r;
    }
    Ok(Some(value))
}
