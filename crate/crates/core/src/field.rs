//! Arithmetic in GF(2^r) over a polynomial basis.
//!
//! Elements are coordinate bit-vectors: bit `i` is the coefficient of `x^i`
//! modulo the field polynomial. Addition is XOR. For `r <= 16` products go
//! through exp/log tables built from a primitive element; above that a
//! carry-less multiply followed by reduction is used.
//!
//! The absolute trace `tr: GF(2^r) -> GF(2)` is GF(2)-linear, so it is stored
//! as a mask over the basis: `tr(x) = parity(x & mask)`, where bit `i` of the
//! mask is `tr(x^i)` computed from the Frobenius sum.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported extension degree.
pub const MAX_DEGREE: u32 = 20;

/// Largest degree for which exp/log tables are built.
pub const TABLE_MAX_DEGREE: u32 = 16;

/// An element of GF(2^r), stored as its polynomial-basis coordinates.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FieldElement(u32);

impl FieldElement {
    pub const ZERO: Self = FieldElement(0);
    pub const ONE: Self = FieldElement(1);

    /// Wraps raw coordinates without checking them against a field.
    pub const fn from_bits(bits: u32) -> Self {
        FieldElement(bits)
    }

    pub const fn bits(self) -> u32 {
        self.0
    }

    pub const fn index(self) -> usize {
        self.0 as usize
    }

    pub const fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#x}", self.0)
    }
}

/// Bit-encoded polynomials over GF(2): bit `i` is the coefficient of `x^i`.
pub mod poly {
    /// Degree of `p`, or `None` for the zero polynomial.
    pub fn degree(p: u64) -> Option<u32> {
        (p != 0).then(|| 63 - p.leading_zeros())
    }

    /// Remainder of `a` modulo `b`. Panics if `b` is zero.
    pub fn rem(mut a: u64, b: u64) -> u64 {
        let db = degree(b).expect("division by the zero polynomial");
        while let Some(da) = degree(a) {
            if da < db {
                break;
            }
            a ^= b << (da - db);
        }
        a
    }

    /// Smallest (by encoding) divisor of `p` with degree in `1..=deg(p)/2`.
    ///
    /// Such a divisor exists iff `p` is reducible, and the smallest one is
    /// necessarily irreducible.
    pub fn smallest_factor(p: u64) -> Option<u64> {
        let d = degree(p)?;
        (2u64..1 << (d / 2 + 1)).find(|&f| rem(p, f) == 0)
    }

    pub fn is_irreducible(p: u64) -> bool {
        matches!(degree(p), Some(d) if d >= 1) && smallest_factor(p).is_none()
    }

    /// Lexicographically smallest irreducible polynomial of degree `r`.
    pub fn smallest_irreducible(r: u32) -> u64 {
        let lo = 1u64 << r;
        (lo..lo << 1)
            .find(|&p| is_irreducible(p))
            .expect("irreducible polynomials exist in every degree")
    }
}

/// Extension degree plus field polynomial.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "FieldSpecRepr", into = "FieldSpecRepr")]
pub struct FieldSpec {
    r: u32,
    modulus: u64,
}

#[derive(Serialize, Deserialize)]
struct FieldSpecRepr {
    r: u32,
    modulus_hex: String,
}

impl TryFrom<FieldSpecRepr> for FieldSpec {
    type Error = Error;

    fn try_from(repr: FieldSpecRepr) -> Result<Self> {
        let modulus = parse_hex(&repr.modulus_hex)?;
        FieldSpec::new(repr.r, Some(modulus))
    }
}

impl From<FieldSpec> for FieldSpecRepr {
    fn from(spec: FieldSpec) -> Self {
        FieldSpecRepr {
            r: spec.r,
            modulus_hex: format!("{:#x}", spec.modulus),
        }
    }
}

/// Parses a hex integer with or without a `0x` prefix.
pub fn parse_hex(s: &str) -> Result<u64> {
    let digits = s.trim().trim_start_matches("0x").trim_start_matches("0X");
    u64::from_str_radix(digits, 16).map_err(|e| Error::Domain(format!("bad hex {s:?}: {e}")))
}

impl FieldSpec {
    /// Validates `r` and the modulus. Without a modulus the smallest
    /// irreducible polynomial of degree `r` is chosen.
    pub fn new(r: u32, modulus: Option<u64>) -> Result<Self> {
        if !(1..=MAX_DEGREE).contains(&r) {
            return Err(Error::Bounds {
                what: "r",
                value: r as u64,
                min: 1,
                max: MAX_DEGREE as u64,
            });
        }
        let modulus = match modulus {
            None => poly::smallest_irreducible(r),
            Some(m) => {
                let got = poly::degree(m).unwrap_or(0);
                if m == 0 || got != r {
                    return Err(Error::DegreeMismatch {
                        modulus: m,
                        expected: r,
                        got,
                    });
                }
                if let Some(factor) = poly::smallest_factor(m) {
                    return Err(Error::ReducibleModulus { modulus: m, factor });
                }
                m
            }
        };
        Ok(FieldSpec { r, modulus })
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn q(&self) -> u32 {
        1 << self.r
    }
}

struct LogTables {
    /// `exp[k] = g^k` for `0 <= k < 2(q-1)`, doubled so sums of logs need no reduction.
    exp: Vec<u32>,
    /// `log[x]` for nonzero `x`; `log[0]` is unused.
    log: Vec<u32>,
}

/// A concrete realization of GF(2^r). Immutable after construction.
pub struct FieldCtx {
    spec: FieldSpec,
    trace_mask: u32,
    generator: FieldElement,
    tables: Option<LogTables>,
}

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldCtx")
            .field("r", &self.spec.r)
            .field("modulus", &format_args!("{:#x}", self.spec.modulus))
            .field("generator", &self.generator)
            .field("tables", &self.tables.is_some())
            .finish()
    }
}

impl FieldCtx {
    pub fn new(r: u32, modulus: Option<u64>) -> Result<Self> {
        Ok(Self::from_spec(FieldSpec::new(r, modulus)?))
    }

    pub fn from_spec(spec: FieldSpec) -> Self {
        let mut ctx = FieldCtx {
            spec,
            trace_mask: 0,
            generator: FieldElement::ONE,
            tables: None,
        };
        ctx.trace_mask = (0..spec.r)
            .filter(|&i| ctx.trace_by_frobenius(FieldElement(1 << i)) == 1)
            .fold(0, |m, i| m | 1 << i);
        ctx.generator = ctx.find_generator();
        if spec.r <= TABLE_MAX_DEGREE {
            ctx.tables = Some(ctx.build_tables());
        }
        ctx
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.spec
    }

    pub fn r(&self) -> u32 {
        self.spec.r
    }

    pub fn q(&self) -> u32 {
        self.spec.q()
    }

    pub fn has_tables(&self) -> bool {
        self.tables.is_some()
    }

    /// The primitive element used for the exp/log tables.
    pub fn generator(&self) -> FieldElement {
        self.generator
    }

    pub fn element(&self, bits: u64) -> Result<FieldElement> {
        if bits < self.q() as u64 {
            Ok(FieldElement(bits as u32))
        } else {
            Err(Error::InvalidElement { bits, r: self.r() })
        }
    }

    /// All elements in increasing bit-encoding.
    pub fn elements(&self) -> impl DoubleEndedIterator<Item = FieldElement> + ExactSizeIterator {
        (0..self.q()).map(FieldElement)
    }

    /// All nonzero elements in increasing bit-encoding.
    pub fn nonzero(&self) -> impl DoubleEndedIterator<Item = FieldElement> + ExactSizeIterator {
        (1..self.q()).map(FieldElement)
    }

    #[inline]
    pub fn add(&self, x: FieldElement, y: FieldElement) -> FieldElement {
        FieldElement(x.0 ^ y.0)
    }

    #[inline]
    pub fn mul(&self, x: FieldElement, y: FieldElement) -> FieldElement {
        if x.0 == 0 || y.0 == 0 {
            return FieldElement::ZERO;
        }
        match &self.tables {
            Some(t) => FieldElement(t.exp[(t.log[x.index()] + t.log[y.index()]) as usize]),
            None => self.mul_slow(x, y),
        }
    }

    #[inline]
    pub fn square(&self, x: FieldElement) -> FieldElement {
        self.mul(x, x)
    }

    pub fn pow(&self, x: FieldElement, mut e: u64) -> FieldElement {
        let mut base = x;
        let mut acc = FieldElement::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.square(base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, x: FieldElement) -> Result<FieldElement> {
        if x.is_zero() {
            return Err(Error::DivisionByZero { r: self.r() });
        }
        Ok(match &self.tables {
            Some(t) => {
                let n = self.q() - 1;
                FieldElement(t.exp[((n - t.log[x.index()]) % n) as usize])
            }
            None => self.pow(x, self.q() as u64 - 2),
        })
    }

    /// The unique square root, `x^(2^(r-1))`.
    pub fn sqrt(&self, x: FieldElement) -> FieldElement {
        (1..self.r()).fold(x, |y, _| self.square(y))
    }

    /// Absolute trace to GF(2), via the basis mask.
    #[inline]
    pub fn trace(&self, x: FieldElement) -> u8 {
        ((x.0 & self.trace_mask).count_ones() & 1) as u8
    }

    /// Absolute trace computed as `x + x^2 + ... + x^(2^(r-1))`.
    pub fn trace_by_frobenius(&self, x: FieldElement) -> u8 {
        let mut acc = FieldElement::ZERO;
        let mut y = x;
        for _ in 0..self.r() {
            acc = FieldElement(acc.0 ^ y.0);
            y = self.mul_slow(y, y);
        }
        debug_assert!(acc.0 <= 1, "trace left the prime field");
        acc.0 as u8
    }

    /// Canonical additive character `(-1)^tr(x)`.
    #[inline]
    pub fn lambda(&self, x: FieldElement) -> i32 {
        1 - 2 * self.trace(x) as i32
    }

    /// Discrete logarithm base [`Self::generator`]; `None` for zero or without tables.
    pub fn log(&self, x: FieldElement) -> Option<u32> {
        if x.is_zero() {
            return None;
        }
        self.tables.as_ref().map(|t| t.log[x.index()])
    }

    /// `generator^k`.
    pub fn exp(&self, k: u64) -> FieldElement {
        let n = (self.q() - 1) as u64;
        match &self.tables {
            Some(t) => FieldElement(t.exp[(k % n) as usize]),
            None => self.pow(self.generator, k % n),
        }
    }

    fn mul_slow(&self, x: FieldElement, y: FieldElement) -> FieldElement {
        let a = x.0 as u64;
        let mut b = y.0 as u64;
        let mut prod = 0u64;
        let mut shift = 0;
        while b != 0 {
            if b & 1 == 1 {
                prod ^= a << shift;
            }
            b >>= 1;
            shift += 1;
        }
        let r = self.spec.r;
        for bit in (r..2 * r).rev() {
            if prod >> bit & 1 == 1 {
                prod ^= self.spec.modulus << (bit - r);
            }
        }
        FieldElement(prod as u32)
    }

    fn pow_slow(&self, x: FieldElement, mut e: u64) -> FieldElement {
        let mut base = x;
        let mut acc = FieldElement::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_slow(acc, base);
            }
            base = self.mul_slow(base, base);
            e >>= 1;
        }
        acc
    }

    fn find_generator(&self) -> FieldElement {
        let order = (self.q() - 1) as u64;
        let primes = prime_factors(order);
        (1..self.q())
            .map(FieldElement)
            .find(|&g| {
                primes
                    .iter()
                    .all(|&p| self.pow_slow(g, order / p) != FieldElement::ONE)
            })
            .expect("multiplicative group of a finite field is cyclic")
    }

    fn build_tables(&self) -> LogTables {
        let q = self.q() as usize;
        let n = q - 1;
        let mut exp = vec![0u32; 2 * n];
        let mut log = vec![0u32; q];
        let mut x = FieldElement::ONE;
        for k in 0..n {
            exp[k] = x.0;
            exp[k + n] = x.0;
            log[x.index()] = k as u32;
            x = self.mul_slow(x, self.generator);
        }
        LogTables { exp, log }
    }
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const OMEGA: FieldElement = FieldElement(0b10);
    const OMEGA2: FieldElement = FieldElement(0b11);

    fn gf4() -> FieldCtx {
        FieldCtx::new(2, None).unwrap()
    }

    #[test]
    fn default_moduli() {
        assert_eq!(FieldSpec::new(2, None).unwrap().modulus(), 0b111);
        assert_eq!(FieldSpec::new(3, None).unwrap().modulus(), 0b1011);
        assert_eq!(FieldSpec::new(4, None).unwrap().modulus(), 0b10011);
        assert_eq!(FieldSpec::new(8, None).unwrap().modulus(), 0x11b);
    }

    #[test]
    fn modulus_validation() {
        assert!(FieldSpec::new(3, Some(0b1011)).is_ok());
        // x^4+x^3+x^2+x+1 is irreducible but not primitive.
        let ctx = FieldCtx::new(4, Some(0b11111)).unwrap();
        assert_eq!(ctx.pow(ctx.generator(), 15), FieldElement::ONE);
        assert_ne!(ctx.generator(), FieldElement(0b10));
        assert_eq!(
            FieldSpec::new(2, Some(0b110)),
            Err(Error::ReducibleModulus {
                modulus: 0b110,
                factor: 0b10
            })
        );
        assert_eq!(
            FieldSpec::new(4, Some(0b10101)),
            Err(Error::ReducibleModulus {
                modulus: 0b10101,
                factor: 0b111
            })
        );
        assert!(matches!(
            FieldSpec::new(3, Some(0b111)),
            Err(Error::DegreeMismatch { .. })
        ));
        assert!(matches!(FieldSpec::new(0, None), Err(Error::Bounds { .. })));
        assert!(matches!(
            FieldSpec::new(21, None),
            Err(Error::Bounds { .. })
        ));
    }

    #[test]
    fn spec_json() {
        let spec = FieldSpec::new(3, Some(0b1101)).unwrap();
        let json = serde_json::to_string(&spec).unwrap();
        assert_eq!(json, r#"{"r":3,"modulus_hex":"0xd"}"#);
        let back: FieldSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, spec);
        assert!(serde_json::from_str::<FieldSpec>(r#"{"r":2,"modulus_hex":"6"}"#).is_err());
    }

    #[test]
    fn gf4_trace_and_character() {
        let f = gf4();
        assert_eq!(f.trace(FieldElement::ZERO), 0);
        assert_eq!(f.trace(FieldElement::ONE), 0);
        assert_eq!(f.trace(OMEGA), 1);
        assert_eq!(f.lambda(FieldElement::ZERO), 1);
        assert_eq!(f.lambda(OMEGA), -1);
        let gf8 = FieldCtx::new(3, Some(0b1011)).unwrap();
        assert_eq!(gf8.lambda(FieldElement::ONE), -1);
    }

    #[test]
    fn gf4_inverse_and_sqrt() {
        let f = gf4();
        assert_eq!(f.mul(OMEGA, OMEGA), OMEGA2);
        assert_eq!(f.inv(OMEGA).unwrap(), OMEGA2);
        assert_eq!(f.sqrt(FieldElement::ZERO), FieldElement::ZERO);
        assert_eq!(f.sqrt(FieldElement::ONE), FieldElement::ONE);
        assert_eq!(f.sqrt(OMEGA), OMEGA2);
        assert_eq!(
            f.inv(FieldElement::ZERO),
            Err(Error::DivisionByZero { r: 2 })
        );
    }

    #[test]
    fn gf2_is_degenerate_but_valid() {
        let f = FieldCtx::new(1, None).unwrap();
        assert_eq!(f.q(), 2);
        assert_eq!(f.generator(), FieldElement::ONE);
        assert_eq!(f.inv(FieldElement::ONE).unwrap(), FieldElement::ONE);
        assert_eq!(f.trace(FieldElement::ONE), 1);
    }

    #[test]
    fn trace_mask_matches_frobenius_sum() {
        for r in 1..=10 {
            let f = FieldCtx::new(r, None).unwrap();
            for x in f.elements() {
                assert_eq!(f.trace(x), f.trace_by_frobenius(x), "r={r} x={x}");
            }
        }
    }

    #[test]
    fn log_tables_are_consistent() {
        for r in [1, 2, 5, 8, 12] {
            let f = FieldCtx::new(r, None).unwrap();
            for k in 0..f.q() - 1 {
                let x = f.exp(k as u64);
                assert_eq!(f.log(x), Some(k));
            }
            assert_eq!(f.exp((f.q() - 1) as u64), FieldElement::ONE);
        }
    }

    #[test]
    fn table_free_arithmetic_agrees() {
        // r = 17 uses carry-less multiplication; spot-check against identities.
        let f = FieldCtx::new(17, None).unwrap();
        assert!(!f.has_tables());
        let x = FieldElement(0x1_2345);
        let y = FieldElement(0x0_beef);
        assert_eq!(f.mul(f.inv(x).unwrap(), x), FieldElement::ONE);
        assert_eq!(f.square(f.sqrt(y)), y);
        assert_eq!(f.pow(x, (f.q() - 1) as u64), FieldElement::ONE);
        assert_eq!(f.trace(x), f.trace_by_frobenius(x));
    }

    #[test]
    fn trace_is_balanced_and_characters_orthogonal() {
        for r in 1..=8 {
            let f = FieldCtx::new(r, None).unwrap();
            let ones = f.elements().filter(|&x| f.trace(x) == 1).count();
            assert_eq!(ones as u32, f.q() / 2);
            for c in f.elements() {
                let s: i64 = f.elements().map(|x| f.lambda(f.mul(c, x)) as i64).sum();
                assert_eq!(s, if c.is_zero() { f.q() as i64 } else { 0 });
            }
        }
    }

    #[test]
    fn sqrt_is_inverse_of_squaring() {
        for r in [1, 3, 6, 9] {
            let f = FieldCtx::new(r, None).unwrap();
            let mut seen = vec![false; f.q() as usize];
            for x in f.elements() {
                let s = f.sqrt(x);
                assert_eq!(f.square(s), x);
                assert!(!std::mem::replace(&mut seen[s.index()], true));
            }
        }
    }

    #[test]
    fn trace_multiset_is_modulus_independent() {
        for (a, b) in [(0x13, 0x19), (0x13, 0x1f), (0x25, 0x3d)] {
            let r = poly::degree(a).unwrap();
            let fa = FieldCtx::new(r, Some(a)).unwrap();
            let fb = FieldCtx::new(r, Some(b)).unwrap();
            let count = |f: &FieldCtx| f.elements().filter(|&x| f.trace(x) == 1).count();
            assert_eq!(count(&fa), count(&fb));
        }
    }

    proptest! {
        #[test]
        fn trace_is_additive_and_frobenius_invariant(r in 1u32..=12, x in any::<u32>(), y in any::<u32>()) {
            let f = FieldCtx::new(r, None).unwrap();
            let x = FieldElement(x % f.q());
            let y = FieldElement(y % f.q());
            prop_assert_eq!(f.trace(f.add(x, y)), f.trace(x) ^ f.trace(y));
            prop_assert_eq!(f.trace(f.square(x)), f.trace(x));
        }

        #[test]
        fn field_axioms(r in 1u32..=16, x in any::<u32>(), y in any::<u32>(), z in any::<u32>()) {
            let f = FieldCtx::new(r, None).unwrap();
            let (x, y, z) = (FieldElement(x % f.q()), FieldElement(y % f.q()), FieldElement(z % f.q()));
            prop_assert_eq!(f.mul(x, f.add(y, z)), f.add(f.mul(x, y), f.mul(x, z)));
            prop_assert_eq!(f.mul(f.mul(x, y), z), f.mul(x, f.mul(y, z)));
            prop_assert_eq!(f.mul(x, y), f.mul_slow(x, y));
            if !x.is_zero() {
                prop_assert_eq!(f.mul(x, f.inv(x).unwrap()), FieldElement::ONE);
            }
        }
    }
}
