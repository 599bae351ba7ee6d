//! Kloosterman sums over GF(2^r) and their trace-restricted power moments.
//!
//! Characters are written `psi(x) = lambda(c x)` with `c != 0`; `c = 1` is
//! the canonical character.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{violation, Error, Result};
use crate::field::{FieldCtx, FieldElement};
use crate::matrix::Matrix;

/// Largest exponent accepted by [`MomentTable::compute`].
pub const MAX_MOMENT: u32 = 16;

/// Enumeration bound for [`gl_kloosterman_bruteforce`]: `q^(t^2) <= 2^24`.
pub const GL_BRUTEFORCE_LIMIT: u128 = 1 << 24;

/// `K(psi; a) = sum over nonzero alpha of lambda(c (alpha + a / alpha))`, by direct summation.
pub fn kloosterman(ctx: &FieldCtx, c: FieldElement, a: FieldElement) -> Result<i64> {
    if c.is_zero() {
        return Err(Error::TrivialCharacter);
    }
    if a.is_zero() {
        return Err(Error::Domain(
            "Kloosterman sum needs a nonzero argument".into(),
        ));
    }
    let sum = ctx
        .nonzero()
        .map(|alpha| {
            let inv = ctx.inv(alpha).expect("alpha is nonzero");
            let arg = ctx.add(alpha, ctx.mul(a, inv));
            ctx.lambda(ctx.mul(c, arg)) as i64
        })
        .sum();
    Ok(sum)
}

/// `K(psi; a)` for every nonzero `a` under a fixed character.
///
/// With `alpha = g^i` and `a = g^k`, `K(a) = sum_i s(i) s(k - i)` where
/// `s(i) = lambda(c g^i)`, a cyclic self-convolution over the exponents.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KloostermanTable {
    c: FieldElement,
    q: u32,
    values: Vec<i64>,
}

impl KloostermanTable {
    pub fn new(ctx: &FieldCtx, c: FieldElement) -> Result<Self> {
        if c.is_zero() {
            return Err(Error::TrivialCharacter);
        }
        if !ctx.has_tables() {
            return Err(Error::Size {
                what: "Kloosterman table degree",
                size: ctx.r() as u128,
                limit: crate::field::TABLE_MAX_DEGREE as u128,
            });
        }
        let n = (ctx.q() - 1) as usize;
        let signs: Vec<i32> = (0..n)
            .map(|i| ctx.lambda(ctx.mul(c, ctx.exp(i as u64))))
            .collect();
        // reversed[m] = signs[(n - 1 - m) mod n] over 2n entries, so that
        // signs[(k - i) mod n] = reversed[n - 1 - k + i].
        let reversed: Vec<i32> = (0..2 * n).map(|m| signs[(2 * n - 1 - m) % n]).collect();
        let by_log: Vec<i64> = (0..n)
            .into_par_iter()
            .map(|k| {
                let window = &reversed[n - 1 - k..2 * n - 1 - k];
                signs.iter().zip(window).map(|(x, y)| x * y).sum::<i32>() as i64
            })
            .collect();
        let mut values = vec![0i64; ctx.q() as usize];
        for (k, v) in by_log.into_iter().enumerate() {
            debug_assert!(v * v <= 4 * ctx.q() as i64, "Weil bound violated");
            values[ctx.exp(k as u64).index()] = v;
        }
        Ok(KloostermanTable {
            c,
            q: ctx.q(),
            values,
        })
    }

    /// Table for the canonical character.
    pub fn canonical(ctx: &FieldCtx) -> Result<Self> {
        Self::new(ctx, FieldElement::ONE)
    }

    pub fn c(&self) -> FieldElement {
        self.c
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    /// Panics for `a = 0`.
    #[inline]
    pub fn get(&self, a: FieldElement) -> i64 {
        assert!(!a.is_zero(), "Kloosterman sum needs a nonzero argument");
        self.values[a.index()]
    }

    /// `(a, K(psi; a))` over nonzero `a` in increasing encoding.
    pub fn iter(&self) -> impl Iterator<Item = (FieldElement, i64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .skip(1)
            .map(|(a, &v)| (FieldElement::from_bits(a as u32), v))
    }

    fn require_canonical(&self) -> Result<()> {
        if self.c == FieldElement::ONE {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "identity is stated for the canonical character, table has c = {}",
                self.c
            )))
        }
    }
}

/// Power moments `MK^h`, `T0K^h`, `T1K^h` for `0 <= h <= h_max`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "MomentTableRepr", into = "MomentTableRepr")]
pub struct MomentTable {
    q: u32,
    mk: Vec<BigInt>,
    t0k: Vec<BigInt>,
    t1k: Vec<BigInt>,
}

#[derive(Serialize, Deserialize)]
struct MomentTableRepr {
    q: u32,
    h: Vec<u32>,
    #[serde(rename = "MK")]
    mk: Vec<String>,
    #[serde(rename = "T0K")]
    t0k: Vec<String>,
    #[serde(rename = "T1K")]
    t1k: Vec<String>,
}

impl From<MomentTable> for MomentTableRepr {
    fn from(t: MomentTable) -> Self {
        let strings = |v: &[BigInt]| v.iter().map(BigInt::to_string).collect();
        MomentTableRepr {
            q: t.q,
            h: (0..t.mk.len() as u32).collect(),
            mk: strings(&t.mk),
            t0k: strings(&t.t0k),
            t1k: strings(&t.t1k),
        }
    }
}

impl TryFrom<MomentTableRepr> for MomentTable {
    type Error = Error;

    fn try_from(repr: MomentTableRepr) -> Result<Self> {
        let parse = |v: &[String]| {
            v.iter()
                .map(|s| {
                    s.parse::<BigInt>()
                        .map_err(|e| Error::InconsistentInput(format!("moment {s:?}: {e}")))
                })
                .collect::<Result<Vec<_>>>()
        };
        let table = MomentTable {
            q: repr.q,
            mk: parse(&repr.mk)?,
            t0k: parse(&repr.t0k)?,
            t1k: parse(&repr.t1k)?,
        };
        let n = table.mk.len();
        if table.t0k.len() != n || table.t1k.len() != n || repr.h.len() != n {
            return Err(Error::InconsistentInput(
                "moment columns differ in length".into(),
            ));
        }
        Ok(table)
    }
}

impl MomentTable {
    /// Brute-force moments over all nonzero `a`, split by `tr(a)`.
    pub fn compute(ctx: &FieldCtx, table: &KloostermanTable, h_max: u32) -> Result<Self> {
        if h_max > MAX_MOMENT {
            return Err(Error::Size {
                what: "moment exponent",
                size: h_max as u128,
                limit: MAX_MOMENT as u128,
            });
        }
        // K takes O(sqrt q) distinct values; power each once.
        let mut histogram: BTreeMap<(u8, i64), u64> = BTreeMap::new();
        for (a, k) in table.iter() {
            *histogram.entry((ctx.trace(a), k)).or_default() += 1;
        }
        let len = h_max as usize + 1;
        let mut t0k = vec![BigInt::zero(); len];
        let mut t1k = vec![BigInt::zero(); len];
        for (&(tr, k), &count) in &histogram {
            let column = if tr == 0 { &mut t0k } else { &mut t1k };
            let base = BigInt::from(k);
            let mut power = BigInt::one();
            for slot in column.iter_mut() {
                *slot += &power * count;
                power *= &base;
            }
        }
        let mk = t0k.iter().zip(&t1k).map(|(a, b)| a + b).collect();
        Ok(MomentTable {
            q: ctx.q(),
            mk,
            t0k,
            t1k,
        })
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn h_max(&self) -> u32 {
        self.mk.len() as u32 - 1
    }

    pub fn mk(&self, h: u32) -> &BigInt {
        &self.mk[h as usize]
    }

    pub fn t0k(&self, h: u32) -> &BigInt {
        &self.t0k[h as usize]
    }

    pub fn t1k(&self, h: u32) -> &BigInt {
        &self.t1k[h as usize]
    }
}

/// Canonical moments for `h <= h_max`.
pub fn moments(ctx: &FieldCtx, h_max: u32) -> Result<MomentTable> {
    MomentTable::compute(ctx, &KloostermanTable::canonical(ctx)?, h_max)
}

/// `K_GL(t,q)(lambda; a)` from the three-term recursion in `t`.
pub fn gl_kloosterman(ctx: &FieldCtx, t: u32, a: FieldElement) -> Result<BigInt> {
    let k1 = BigInt::from(kloosterman(ctx, FieldElement::ONE, a)?);
    let q = BigInt::from(ctx.q());
    let mut prev = BigInt::one();
    if t == 0 {
        return Ok(prev);
    }
    let mut cur = k1.clone();
    for s in 2..=t {
        let q_s1 = q.pow(s - 1);
        let next = &q_s1 * &cur * &k1 + q.pow(2 * s - 2) * (&q_s1 - 1u32) * &prev;
        prev = std::mem::replace(&mut cur, next);
    }
    Ok(cur)
}

/// `sum over w in GL(t,q) of lambda(Tr w + a Tr w^-1)` by exhaustive enumeration.
pub fn gl_kloosterman_bruteforce(ctx: &FieldCtx, t: u32, a: FieldElement) -> Result<BigInt> {
    if a.is_zero() {
        return Err(Error::Domain(
            "GL Kloosterman sum needs a nonzero argument".into(),
        ));
    }
    let total = (ctx.q() as u128).checked_pow(t * t).unwrap_or(u128::MAX);
    if total > GL_BRUTEFORCE_LIMIT {
        return Err(Error::Size {
            what: "GL(t,q) enumeration q^(t^2)",
            size: total,
            limit: GL_BRUTEFORCE_LIMIT,
        });
    }
    let n = t as usize;
    let sum: i64 = (0..total as u64)
        .into_par_iter()
        .filter_map(|idx| {
            let w = Matrix::from_index(ctx, n, idx);
            let inv = w.inverse(ctx)?;
            let arg = ctx.add(w.trace(), ctx.mul(a, inv.trace()));
            Some(ctx.lambda(arg) as i64)
        })
        .sum();
    Ok(BigInt::from(sum))
}

/// `sum over nonzero a of lambda(a beta) K(lambda; a)`, checked against
/// `q lambda(1/beta) + 1` (beta != 0) or `1` (beta = 0).
pub fn fourier_identity_check(
    ctx: &FieldCtx,
    table: &KloostermanTable,
    beta: FieldElement,
) -> Result<i64> {
    table.require_canonical()?;
    let lhs: i64 = table
        .iter()
        .map(|(a, k)| ctx.lambda(ctx.mul(a, beta)) as i64 * k)
        .sum();
    let rhs = match ctx.inv(beta) {
        Ok(inv) => ctx.q() as i64 * ctx.lambda(inv) as i64 + 1,
        Err(_) => 1,
    };
    if lhs != rhs {
        return Err(violation(
            format!("Fourier identity at beta = {beta}"),
            lhs,
            rhs,
        ));
    }
    Ok(lhs)
}

/// Checks `K(lambda; a^(2^s)) = K(lambda; a)` for all nonzero `a` and `0 <= s < r`.
/// Returns the number of `(a, s)` pairs checked.
pub fn frobenius_invariance_check(ctx: &FieldCtx, table: &KloostermanTable) -> Result<u64> {
    table.require_canonical()?;
    let mut checked = 0;
    for (a, k) in table.iter() {
        let mut power = a;
        for s in 0..ctx.r() {
            let ks = table.get(power);
            if ks != k {
                return Err(violation(format!("K(a^(2^{s})) = K(a) at a = {a}"), ks, k));
            }
            power = ctx.square(power);
            checked += 1;
        }
    }
    Ok(checked)
}
