//! Stirling numbers, the Pless power moment identity and the two moment
//! recursions derived from it.
//!
//! Everything is evaluated over exact rationals. Results that must be
//! integers are checked for integrality instead of being rounded.

use num_bigint::{BigInt, BigUint};
use num_integer::binomial;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::charsums::{KloostermanTable, MomentTable};
use crate::codes::{
    code_length, d_sequence, weight_distribution_dp, DualSpectrum, Mode, WeightDistribution,
};
use crate::error::{violation, Error, Result};
use crate::field::FieldCtx;
use crate::groups::GroupKind;

/// Largest odd exponent accepted by [`t1k_recursion`].
pub const T1K_MAX_H: u32 = 13;

/// Largest exponent accepted by [`pless_check`].
pub const PLESS_MAX_H: u32 = 12;

/// `S(h, t)` for `0 <= t <= h <= h_max`, filled by the row recurrence
/// `S(h, t) = t S(h-1, t) + S(h-1, t-1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StirlingTable {
    rows: Vec<Vec<BigUint>>,
}

impl StirlingTable {
    pub fn new(h_max: u32) -> Self {
        let mut rows: Vec<Vec<BigUint>> = vec![vec![BigUint::one()]];
        for h in 1..=h_max as usize {
            let prev = &rows[h - 1];
            let row = (0..=h)
                .map(|t| {
                    let keep = prev.get(t).map(|s| s * t).unwrap_or_default();
                    let split = if t > 0 {
                        prev[t - 1].clone()
                    } else {
                        BigUint::zero()
                    };
                    keep + split
                })
                .collect();
            rows.push(row);
        }
        StirlingTable { rows }
    }

    pub fn h_max(&self) -> u32 {
        self.rows.len() as u32 - 1
    }

    /// `S(h, t)`, zero for `t > h`. Panics if `h > h_max`.
    pub fn get(&self, h: u32, t: u32) -> BigUint {
        self.rows[h as usize]
            .get(t as usize)
            .cloned()
            .unwrap_or_default()
    }
}

/// `S(h, t) = (1/t!) sum_{j=0..t} (-1)^(t-j) binom(t, j) j^h`.
pub fn stirling2(h: i64, t: i64) -> Result<BigUint> {
    if h < 0 || t < 0 {
        return Err(Error::Domain(format!(
            "S({h}, {t}) needs nonnegative arguments"
        )));
    }
    if t > h {
        return Ok(BigUint::zero());
    }
    let mut sum = BigInt::zero();
    for j in 0..=t {
        let term = BigInt::from(binomial(BigUint::from(t as u64), BigUint::from(j as u64)))
            * BigInt::from(j).pow(h as u32);
        if (t - j) % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    let factorial: BigInt = (1..=t).map(BigInt::from).product();
    let (quot, rem) = num_integer::Integer::div_rem(&sum, &factorial);
    if !rem.is_zero() || quot.is_negative() {
        return Err(Error::Internal(format!(
            "S({h}, {t}) = {sum}/{factorial} is not a count"
        )));
    }
    Ok(quot.to_biguint().expect("nonnegative"))
}

fn big(x: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(x.into())
}

fn factorial(n: u32) -> BigInt {
    (1..=n).map(BigInt::from).product()
}

/// `binom(n - j, n - t)` with the convention that it vanishes unless `j <= t <= n`.
fn tail_binomial(n: u64, j: u32, t: u32) -> BigInt {
    if t as u64 > n || j > t {
        return BigInt::zero();
    }
    BigInt::from(binomial(
        BigUint::from(n - j as u64),
        BigUint::from(n - t as u64),
    ))
}

/// `base^e` for a possibly negative exponent.
fn rational_pow(base: u64, e: i64) -> BigRational {
    let p = big(BigInt::from(base).pow(e.unsigned_abs() as u32));
    if e >= 0 {
        p
    } else {
        p.recip()
    }
}

/// The Pless identity for an `[n, k]` code `B` over an alphabet of size `s`,
/// given the weight counts `B^perp_j` of its dual for `j <= h`:
/// `sum_{j <= min(n,h)} (-1)^j B^perp_j sum_{t=j..h} t! S(h,t) s^(k-t) (s-1)^(t-j) binom(n-j, n-t)`.
pub fn pless_rhs(
    alphabet: u64,
    k: u32,
    n: u64,
    dual_counts: &[BigUint],
    h: u32,
    stirling: &StirlingTable,
) -> BigRational {
    let mut total = BigRational::zero();
    for j in 0..=h.min(n.min(u32::MAX as u64) as u32) {
        let count = match dual_counts.get(j as usize) {
            Some(c) if !c.is_zero() => BigInt::from(c.clone()),
            _ => continue,
        };
        let mut inner = BigRational::zero();
        for t in j..=h {
            let coeff = factorial(t)
                * BigInt::from(stirling.get(h, t))
                * tail_binomial(n, j, t)
                * BigInt::from(alphabet - 1).pow(t - j);
            inner += big(coeff) * rational_pow(alphabet, k as i64 - t as i64);
        }
        let term = big(count) * inner;
        if j % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    total
}

/// `sum_j j^h B_j` over a dual spectrum.
pub fn power_moment(spectrum: &DualSpectrum, h: u32) -> BigInt {
    spectrum
        .counts
        .iter()
        .map(|(&w, &c)| BigInt::from(w).pow(h) * c)
        .sum()
}

/// Pless identity for the dual of `C(G)` (dimension `r`, binary, length `N`),
/// whose own dual is `C(G)` with weight distribution `primal`. Returns the
/// common value of both sides.
pub fn pless_check(
    ctx: &FieldCtx,
    spectrum: &DualSpectrum,
    primal: &WeightDistribution,
    h: u32,
) -> Result<BigInt> {
    if h > PLESS_MAX_H {
        return Err(Error::Size {
            what: "Pless exponent",
            size: h as u128,
            limit: PLESS_MAX_H as u128,
        });
    }
    let needed = (h as usize).min(primal.n());
    if primal.max_weight() < needed {
        return Err(Error::Domain(format!(
            "Pless identity at h = {h} needs C_j for j <= {needed}, have {}",
            primal.max_weight()
        )));
    }
    let lhs = power_moment(spectrum, h);
    let stirling = StirlingTable::new(h);
    let rhs = pless_rhs(2, ctx.r(), primal.n() as u64, primal.counts(), h, &stirling);
    if big(lhs.clone()) != rhs {
        return Err(violation(format!("Pless identity at h = {h}"), lhs, rhs));
    }
    Ok(lhs)
}

/// `sum_{j <= min(n,h)} (-1)^j counts_j sum_{t=j..h} t! S(h,t) 2^(shift-t) binom(n-j, n-t)`,
/// the right-hand side shape shared by both moment recursions.
fn weighted_code_sum(
    counts: &[BigInt],
    n: u64,
    h: u32,
    shift: i64,
    stirling: &StirlingTable,
) -> BigRational {
    let mut total = BigRational::zero();
    for j in 0..=h.min(n.min(u32::MAX as u64) as u32) {
        let c = &counts[j as usize];
        if c.is_zero() {
            continue;
        }
        let mut inner = BigRational::zero();
        for t in j..=h {
            let coeff = factorial(t) * BigInt::from(stirling.get(h, t)) * tail_binomial(n, j, t);
            inner += big(coeff) * rational_pow(2, shift - t as i64);
        }
        let term = big(c.clone()) * inner;
        if j % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    total
}

fn signed(counts: &[BigUint]) -> Vec<BigInt> {
    counts.iter().cloned().map(BigInt::from).collect()
}

/// Counts beyond the code length are zero, so only `min(n, h) + 1` entries are needed.
fn require_len(what: &str, len: usize, n: u64, h: u32) -> Result<()> {
    let needed = (h as u64).min(n);
    if (len as u64) <= needed {
        return Err(Error::Domain(format!(
            "{what} needs entries 0..={needed}, have {len}"
        )));
    }
    Ok(())
}

/// `MK^0 ..= MK^h_max` solved from
/// `(q/2)^h sum_{j=0..h} (-1)^j binom(h,j) (q^2-1)^(h-j) MK^j
///    = q sum_j (-1)^j C^_j sum_{t=j..h} t! S(h,t) 2^-t binom(N-j, N-t)`,
/// isolating the `j = h` term and starting from `MK^0 = q - 1`.
///
/// `sp_counts` are the `C(Sp(2,q))` weight counts `C^_j` for `j <= h_max`.
/// Values are returned as rationals so that a broken input shows up as a
/// non-integer rather than an error.
pub fn mk_recursion_sequence(
    q: u64,
    sp_counts: &[BigUint],
    h_max: u32,
) -> Result<Vec<BigRational>> {
    let n = code_length(q);
    require_len("C(Sp(2,q)) weight counts", sp_counts.len(), n, h_max)?;
    let chat = signed(sp_counts);
    let stirling = StirlingTable::new(h_max);
    let q2m1 = BigInt::from(q * q - 1);
    let mut mk = vec![big(q - 1)];
    for h in 1..=h_max {
        let rhs = big(q) * weighted_code_sum(&chat, n, h, 0, &stirling);
        let scale = rational_pow(q, h as i64) * rational_pow(2, -(h as i64));
        let mut rest = BigRational::zero();
        for (j, value) in mk.iter().enumerate() {
            let coeff = BigInt::from(binomial(h as u64, j as u64)) * q2m1.pow(h - j as u32);
            let term = big(coeff) * value;
            if j % 2 == 0 {
                rest += term;
            } else {
                rest -= term;
            }
        }
        let isolated = rhs / scale - rest;
        mk.push(if h % 2 == 0 { isolated } else { -isolated });
    }
    Ok(mk)
}

/// `T1K^h` for odd `h <= h_max` from
/// `T1K^h = - sum_{j odd, j <= h-2} binom(h,j) (q^2-1)^(h-j) T1K^j
///          + q^(1-h) sum_j (-1)^j D_j sum_{t=j..h} t! S(h,t) 2^(h-t-1) binom(N-j, N-t)`.
pub fn t1k_recursion_sequence(q: u64, d: &[BigInt], h_max: u32) -> Result<Vec<(u32, BigRational)>> {
    let n = code_length(q);
    require_len("D_j sequence", d.len(), n, h_max)?;
    let stirling = StirlingTable::new(h_max);
    let q2m1 = BigInt::from(q * q - 1);
    let mut out: Vec<(u32, BigRational)> = Vec::new();
    for h in (1..=h_max).step_by(2) {
        let mut value =
            rational_pow(q, 1 - h as i64) * weighted_code_sum(d, n, h, h as i64 - 1, &stirling);
        for (j, lower) in &out {
            let coeff = BigInt::from(binomial(h as u64, *j as u64)) * q2m1.pow(h - j);
            value -= big(coeff) * lower;
        }
        out.push((h, value));
    }
    Ok(out)
}

fn integral(what: String, x: &BigRational) -> Result<BigInt> {
    if x.is_integer() {
        Ok(x.to_integer())
    } else {
        Err(violation(what, x, "an integer"))
    }
}

/// `MK^h` from the Sp(2,q) code recursion.
pub fn mk_recursion(ctx: &FieldCtx, h: u32) -> Result<BigInt> {
    if h == 0 {
        return Err(Error::Domain("the MK recursion starts at h = 1".into()));
    }
    let chat = weight_distribution_dp(ctx, GroupKind::Sp2, Mode::Truncated(h as usize))?;
    let seq = mk_recursion_sequence(ctx.q() as u64, chat.counts(), h)?;
    let mut last = BigInt::zero();
    for (j, x) in seq.iter().enumerate() {
        last = integral(format!("MK^{j} from the Sp(2,q) recursion"), x)?;
    }
    Ok(last)
}

/// `T1K^h` for every odd `h <= h_max_odd`, from `D_j = C_j - C^_j`.
pub fn t1k_recursion(ctx: &FieldCtx, h_max_odd: u32) -> Result<Vec<(u32, BigInt)>> {
    if h_max_odd.is_multiple_of(2) || h_max_odd > T1K_MAX_H {
        return Err(Error::Domain(format!(
            "T1K recursion needs an odd h_max <= {T1K_MAX_H}, got {h_max_odd}"
        )));
    }
    let d = d_sequence(ctx, h_max_odd as usize)?;
    t1k_recursion_sequence(ctx.q() as u64, &d, h_max_odd)?
        .into_iter()
        .map(|(h, x)| Ok((h, integral(format!("T1K^{h} from the D_j recursion"), &x)?)))
        .collect()
}

/// `(1 + (-1)^r q/2, (-1)^(r+1) q/2)`, the trace-zero and trace-one first moments.
pub fn first_moment_closed_forms(r: u32) -> (i64, i64) {
    let half = 1i64 << (r - 1);
    let sign = if r.is_multiple_of(2) { 1 } else { -1 };
    (1 + sign * half, -sign * half)
}

/// [`first_moment_closed_forms`] checked against brute-force first moments.
pub fn first_moment_check(ctx: &FieldCtx, table: &KloostermanTable) -> Result<(i64, i64)> {
    let moments = MomentTable::compute(ctx, table, 1)?;
    let (t0, t1) = first_moment_closed_forms(ctx.r());
    if *moments.t0k(1) != BigInt::from(t0) {
        return Err(violation("T0K closed form", moments.t0k(1), t0));
    }
    if *moments.t1k(1) != BigInt::from(t1) {
        return Err(violation("T1K closed form", moments.t1k(1), t1));
    }
    Ok((t0, t1))
}
