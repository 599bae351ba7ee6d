//! The binary trace-vector codes `C(G) = { u in GF(2)^N : u . v = 0 }`,
//! where `v = (Tr g_1, ..., Tr g_N)` lists the traces of a group `G` of
//! order `N = q(q^2 - 1)`, for `G` either O(3,q) or Sp(2,q).
//!
//! The dual is `{ c(a) = (tr(a Tr g_i))_i : a in GF(q) }`, of dimension `r`.
//! Weight distributions of `C(G)` are computed two ways:
//!
//! * combinatorially, counting compositions `{nu_beta}` of `j` with
//!   `sum nu_beta * beta = 0`, weighted by `prod binom(n(beta), nu_beta)`;
//! * by the binary MacWilliams transform of the dual weight spectrum.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use sha2::{Digest, Sha256};

use crate::charsums::KloostermanTable;
use crate::error::{violation, Error, Result};
use crate::field::{FieldCtx, FieldElement};
use crate::groups::{enumerate_sl2, lift_to_o3, GroupKind, TraceDistribution};

/// Largest `r` for which the explicit trace vector is materialized.
pub const TRACE_VECTOR_MAX_DEGREE: u32 = 10;

/// Largest code length for a full weight distribution.
pub const FULL_MAX_LENGTH: usize = 600;

/// Largest weight for a truncated weight distribution.
pub const TRUNCATED_MAX_WEIGHT: usize = 64;

/// `N = q(q^2 - 1)`.
pub fn code_length(q: u64) -> u64 {
    q * (q * q - 1)
}

/// Traces of the group elements in a fixed order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceVector {
    kind: GroupKind,
    entries: Vec<FieldElement>,
}

/// Traces of all elements, in lexicographic order of the underlying SL(2,q)
/// matrix.
pub fn build_trace_vector(ctx: &FieldCtx, kind: GroupKind) -> Result<TraceVector> {
    if ctx.r() > TRACE_VECTOR_MAX_DEGREE {
        return Err(Error::Size {
            what: "trace vector degree r",
            size: ctx.r() as u128,
            limit: TRACE_VECTOR_MAX_DEGREE as u128,
        });
    }
    let entries = enumerate_sl2(ctx)
        .map(|w| match kind {
            GroupKind::Sp2 => w.trace(),
            GroupKind::O3 => lift_to_o3(ctx, &w).trace,
        })
        .collect();
    Ok(TraceVector { kind, entries })
}

impl TraceVector {
    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[FieldElement] {
        &self.entries
    }

    /// The same multiset in a seeded random order.
    pub fn shuffled(&self, seed: u64) -> TraceVector {
        let mut entries = self.entries.clone();
        entries.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        TraceVector {
            kind: self.kind,
            entries,
        }
    }

    pub fn distribution(&self, ctx: &FieldCtx) -> TraceDistribution {
        let mut counts = vec![0u64; ctx.q() as usize];
        for t in &self.entries {
            counts[t.index()] += 1;
        }
        TraceDistribution::from_counts(self.kind, counts)
    }
}

/// `c(a) = (tr(a v_1), ..., tr(a v_N))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualCodeword {
    a: FieldElement,
    len: usize,
    words: Vec<u64>,
    weight: u64,
}

impl DualCodeword {
    pub fn a(&self) -> FieldElement {
        self.a
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn weight(&self) -> u64 {
        self.weight
    }

    pub fn bit(&self, i: usize) -> u8 {
        (self.words[i / 64] >> (i % 64) & 1) as u8
    }

    fn digest(&self) -> [u8; 32] {
        let mut hasher = Sha256::new();
        for w in &self.words {
            hasher.update(w.to_le_bytes());
        }
        hasher.finalize().into()
    }
}

/// Dual codeword weight predicted from Kloosterman sums:
/// `(q/2)((q^2 - 1) - lambda(a) K(lambda; a))` for O(3,q) and
/// `(q/2)((q^2 - 1) - K(lambda; a))` for Sp(2,q); zero at `a = 0`.
pub fn expected_dual_weight(
    ctx: &FieldCtx,
    kind: GroupKind,
    table: &KloostermanTable,
    a: FieldElement,
) -> u64 {
    if a.is_zero() {
        return 0;
    }
    let q = ctx.q() as i64;
    let k = match kind {
        GroupKind::O3 => ctx.lambda(a) as i64 * table.get(a),
        GroupKind::Sp2 => table.get(a),
    };
    (q / 2 * (q * q - 1 - k)) as u64
}

/// Builds `c(a)` bit by bit and checks its popcount against [`expected_dual_weight`].
pub fn dual_codeword(
    ctx: &FieldCtx,
    tv: &TraceVector,
    table: &KloostermanTable,
    a: FieldElement,
) -> Result<DualCodeword> {
    // tr(a * beta) depends only on beta.
    let bit_of: Vec<u64> = ctx
        .elements()
        .map(|beta| ctx.trace(ctx.mul(a, beta)) as u64)
        .collect();
    let len = tv.len();
    let mut words = vec![0u64; len.div_ceil(64)];
    for (i, t) in tv.entries().iter().enumerate() {
        words[i / 64] |= bit_of[t.index()] << (i % 64);
    }
    let weight = words.iter().map(|w| w.count_ones() as u64).sum();
    let expected = expected_dual_weight(ctx, tv.kind(), table, a);
    if weight != expected {
        return Err(violation(
            format!("{} dual codeword weight at a = {a}", tv.kind()),
            weight,
            expected,
        ));
    }
    Ok(DualCodeword {
        a,
        len,
        words,
        weight,
    })
}

/// Weight enumerator of a dual code: weight to number of codewords.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DualSpectrum {
    pub n: usize,
    pub dim: u32,
    pub counts: BTreeMap<u64, u64>,
}

impl DualSpectrum {
    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }
}

/// Weights of all `q` dual codewords by explicit construction; fails if two
/// values of `a` give the same codeword.
pub fn dual_weight_spectrum(
    ctx: &FieldCtx,
    tv: &TraceVector,
    table: &KloostermanTable,
) -> Result<DualSpectrum> {
    let words = ctx
        .elements()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|a| dual_codeword(ctx, tv, table, a).map(|c| (c.weight(), c.digest())))
        .collect::<Result<Vec<_>>>()?;
    let mut seen: HashMap<[u8; 32], u32> = HashMap::new();
    let mut counts = BTreeMap::new();
    for (a, (weight, digest)) in words.into_iter().enumerate() {
        if let Some(&first) = seen.get(&digest) {
            return Err(Error::Injectivity {
                first,
                second: a as u32,
            });
        }
        seen.insert(digest, a as u32);
        *counts.entry(weight).or_default() += 1;
    }
    Ok(DualSpectrum {
        n: tv.len(),
        dim: ctx.r(),
        counts,
    })
}

/// Dual spectrum from [`expected_dual_weight`] alone, with no enumeration.
pub fn analytic_dual_spectrum(
    ctx: &FieldCtx,
    kind: GroupKind,
    table: &KloostermanTable,
) -> DualSpectrum {
    let mut counts = BTreeMap::new();
    for a in ctx.elements() {
        *counts
            .entry(expected_dual_weight(ctx, kind, table, a))
            .or_default() += 1;
    }
    DualSpectrum {
        n: code_length(ctx.q() as u64) as usize,
        dim: ctx.r(),
        counts,
    }
}

/// How much of a weight distribution is computed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Full,
    /// Counts for weights `0..=j_max` only.
    Truncated(usize),
}

/// Number of codewords of each weight.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightDistribution {
    n: usize,
    mode: Mode,
    counts: Vec<BigUint>,
}

impl WeightDistribution {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// Largest weight with a stored count.
    pub fn max_weight(&self) -> usize {
        self.counts.len() - 1
    }

    pub fn counts(&self) -> &[BigUint] {
        &self.counts
    }

    /// Panics beyond [`Self::max_weight`].
    pub fn get(&self, j: usize) -> &BigUint {
        &self.counts[j]
    }

    pub fn total(&self) -> BigUint {
        self.counts.iter().sum()
    }

    /// Restriction to weights `0..=j_max`.
    pub fn truncate(&self, j_max: usize) -> WeightDistribution {
        let end = j_max.min(self.max_weight());
        WeightDistribution {
            n: self.n,
            mode: Mode::Truncated(j_max),
            counts: self.counts[..=end].to_vec(),
        }
    }

    pub fn is_symmetric(&self) -> bool {
        self.mode == Mode::Full && (0..=self.n).all(|j| self.counts[j] == self.counts[self.n - j])
    }

    /// Two-column `j,count` CSV, zero rows omitted.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("j,count\n");
        for (j, c) in self.counts.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
            let _ = writeln!(out, "{j},{c}");
        }
        out
    }
}

impl Serialize for WeightDistribution {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let counts: BTreeMap<usize, String> = self
            .counts
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(j, c)| (j, c.to_string()))
            .collect();
        let mut s = serializer.serialize_struct("WeightDistribution", 4)?;
        s.serialize_field("n", &self.n)?;
        match self.mode {
            Mode::Full => {
                s.serialize_field("mode", "full")?;
                s.skip_field("j_max")?;
            }
            Mode::Truncated(j) => {
                s.serialize_field("mode", "truncated")?;
                s.serialize_field("j_max", &j)?;
            }
        }
        s.serialize_field("counts", &counts)?;
        s.end()
    }
}

/// `binom(m, 0..=limit)`.
fn binomial_row(m: u64, limit: usize) -> Vec<BigUint> {
    let top = limit.min(m as usize);
    let mut row = Vec::with_capacity(top + 1);
    let mut b = BigUint::one();
    row.push(b.clone());
    for k in 0..top as u64 {
        b = b * (m - k) / (k + 1);
        row.push(b.clone());
    }
    row
}

/// Adds `x * y` into `acc`, keeping degrees `<= cap`.
fn convolve_into(acc: &mut [BigUint], x: &[BigUint], y: &[BigUint], cap: usize) {
    for (i, xi) in x.iter().enumerate().take(cap + 1) {
        if xi.is_zero() {
            continue;
        }
        for (k, yk) in y.iter().enumerate().take(cap - i + 1) {
            if !yk.is_zero() {
                acc[i + k] += xi * yk;
            }
        }
    }
}

/// Weight distribution of `C(G)` from the trace counts `n(beta)`.
///
/// State `(s, d)` counts partial compositions of total `d` whose field sum
/// `sum nu_beta * beta` is `s`. Since `nu * beta` is `beta` or `0` as `nu` is
/// odd or even, each `beta` splits `binom(n(beta), nu)` into its even and odd
/// parts: the even part keeps the state, the odd part moves it by `beta`.
pub fn weight_distribution_from_counts(
    ctx: &FieldCtx,
    dist: &TraceDistribution,
    mode: Mode,
) -> Result<WeightDistribution> {
    let n = dist.total() as usize;
    let cap = match mode {
        Mode::Full => {
            if n > FULL_MAX_LENGTH {
                return Err(Error::Size {
                    what: "full weight distribution length",
                    size: n as u128,
                    limit: FULL_MAX_LENGTH as u128,
                });
            }
            n
        }
        Mode::Truncated(j) => {
            if j > TRUNCATED_MAX_WEIGHT {
                return Err(Error::Size {
                    what: "truncated weight bound",
                    size: j as u128,
                    limit: TRUNCATED_MAX_WEIGHT as u128,
                });
            }
            j.min(n)
        }
    };
    let q = ctx.q() as usize;
    let mut states: Vec<Vec<BigUint>> = vec![vec![BigUint::zero(); cap + 1]; q];
    states[0][0] = BigUint::one();
    let mut reach = 0usize;
    for (beta, m) in dist.iter().filter(|&(_, m)| m > 0) {
        let row = binomial_row(m, cap);
        let even: Vec<BigUint> = row
            .iter()
            .enumerate()
            .map(|(k, b)| {
                if k % 2 == 0 {
                    b.clone()
                } else {
                    BigUint::zero()
                }
            })
            .collect();
        let odd: Vec<BigUint> = row
            .iter()
            .enumerate()
            .map(|(k, b)| {
                if k % 2 == 1 {
                    b.clone()
                } else {
                    BigUint::zero()
                }
            })
            .collect();
        let live = reach.min(cap) + 1;
        states = (0..q)
            .into_par_iter()
            .map(|s| {
                let mut next = vec![BigUint::zero(); cap + 1];
                convolve_into(&mut next, &states[s][..live], &even, cap);
                convolve_into(&mut next, &states[s ^ beta.index()][..live], &odd, cap);
                next
            })
            .collect();
        reach += m as usize;
    }
    let mut counts = std::mem::take(&mut states[0]);
    if let Mode::Truncated(j) = mode {
        counts.resize(j.min(n) + 1, BigUint::zero());
    }
    Ok(WeightDistribution { n, mode, counts })
}

/// Weight distribution of `C(O(3,q))` or `C(Sp(2,q))` from the closed-form
/// trace counts.
pub fn weight_distribution_dp(
    ctx: &FieldCtx,
    kind: GroupKind,
    mode: Mode,
) -> Result<WeightDistribution> {
    weight_distribution_from_counts(ctx, &TraceDistribution::closed_form(ctx, kind), mode)
}

/// Binary Krawtchouk values `K_j(w; n)` for `j = 0..=n`, by the three-term
/// recurrence `(j+1) K_{j+1} = (n - 2w) K_j - (n - j + 1) K_{j-1}`.
pub fn krawtchouk(n: usize, w: usize) -> Vec<BigInt> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(BigInt::one());
    if n == 0 {
        return out;
    }
    let lead = BigInt::from(n as i64 - 2 * w as i64);
    out.push(lead.clone());
    for j in 1..n {
        let numer = &lead * &out[j] - BigInt::from(n - j + 1) * &out[j - 1];
        let (quot, rem) = numer.div_rem(&BigInt::from(j + 1));
        assert!(rem.is_zero(), "Krawtchouk recurrence must divide exactly");
        out.push(quot);
    }
    out
}

/// Full weight distribution of the dual of a code with the given spectrum:
/// `counts[j] = 2^-k sum_w A_w K_j(w; n)`.
pub fn macwilliams(
    spectrum: &BTreeMap<u64, u64>,
    n: usize,
    dual_dim: u32,
) -> Result<WeightDistribution> {
    let size = BigUint::one() << dual_dim;
    let total: BigUint = spectrum.values().map(|&c| BigUint::from(c)).sum();
    if total != size {
        return Err(Error::InconsistentInput(format!(
            "spectrum has {total} words, expected 2^{dual_dim}"
        )));
    }
    if let Some((&w, _)) = spectrum.iter().find(|(&w, _)| w as usize > n) {
        return Err(Error::InconsistentInput(format!(
            "weight {w} exceeds length {n}"
        )));
    }
    let mut sums = vec![BigInt::zero(); n + 1];
    for (&w, &count) in spectrum.iter().filter(|(_, &c)| c > 0) {
        for (slot, k) in sums.iter_mut().zip(krawtchouk(n, w as usize)) {
            *slot += k * count;
        }
    }
    let divisor = BigInt::from_biguint(Sign::Plus, size);
    let counts = sums
        .into_iter()
        .enumerate()
        .map(|(j, s)| {
            let (quot, rem) = s.div_rem(&divisor);
            if !rem.is_zero() || quot.is_negative() {
                return Err(Error::InconsistentInput(format!(
                    "MacWilliams count at weight {j} is {s}/{divisor}"
                )));
            }
            Ok(quot.to_biguint().expect("nonnegative"))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(WeightDistribution {
        n,
        mode: Mode::Full,
        counts,
    })
}

/// Checks `counts[0] = 1`, the total `2^(N - r)` and `C_j = C_{N-j}`.
pub fn check_full_distribution(dist: &WeightDistribution, r: u32) -> Result<()> {
    if dist.mode() != Mode::Full {
        return Err(Error::Domain("distribution is truncated".into()));
    }
    if !dist.get(0).is_one() {
        return Err(violation("single zero codeword", dist.get(0), 1));
    }
    let expected = BigUint::one() << (dist.n() - r as usize);
    if dist.total() != expected {
        return Err(violation("codeword total 2^(N-r)", dist.total(), expected));
    }
    if let Some(j) = (0..=dist.n()).find(|&j| dist.get(j) != dist.get(dist.n() - j)) {
        return Err(violation(
            format!("C_{j} = C_{}", dist.n() - j),
            dist.get(j),
            dist.get(dist.n() - j),
        ));
    }
    Ok(())
}

/// `D_j = C_j - C^_j` over the common range of two distributions.
pub fn d_sequence_from(o3: &WeightDistribution, sp2: &WeightDistribution) -> Vec<BigInt> {
    o3.counts()
        .iter()
        .zip(sp2.counts())
        .map(|(c, h)| BigInt::from(c.clone()) - BigInt::from(h.clone()))
        .collect()
}

/// `D_j` for `j <= j_max` from truncated distributions of both codes.
pub fn d_sequence(ctx: &FieldCtx, j_max: usize) -> Result<Vec<BigInt>> {
    let o3 = weight_distribution_dp(ctx, GroupKind::O3, Mode::Truncated(j_max))?;
    let sp2 = weight_distribution_dp(ctx, GroupKind::Sp2, Mode::Truncated(j_max))?;
    Ok(d_sequence_from(&o3, &sp2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_integer::binomial;

    const OMEGA: FieldElement = FieldElement::from_bits(0b10);

    fn gf(r: u32) -> FieldCtx {
        FieldCtx::new(r, None).unwrap()
    }

    fn spectrum(pairs: &[(u64, u64)]) -> BTreeMap<u64, u64> {
        pairs.iter().copied().collect()
    }

    #[test]
    fn trace_vectors() {
        let f = gf(1);
        assert_eq!(build_trace_vector(&f, GroupKind::O3).unwrap().len(), 6);
        let f = gf(2);
        let o3 = build_trace_vector(&f, GroupKind::O3).unwrap();
        assert_eq!(o3.len(), 60);
        assert_eq!(o3.distribution(&f).counts(), &[20, 16, 12, 12]);
        let sp = build_trace_vector(&f, GroupKind::Sp2).unwrap();
        assert_eq!(sp.distribution(&f).counts(), &[16, 20, 12, 12]);
        assert!(matches!(
            build_trace_vector(&gf(11), GroupKind::O3),
            Err(Error::Size { .. })
        ));
    }

    #[test]
    fn dual_codewords_gf4() {
        let f = gf(2);
        let t = KloostermanTable::canonical(&f).unwrap();
        let tv = build_trace_vector(&f, GroupKind::O3).unwrap();
        let zero = dual_codeword(&f, &tv, &t, FieldElement::ZERO).unwrap();
        assert_eq!(zero.weight(), 0);
        assert!((0..60).all(|i| zero.bit(i) == 0));
        assert_eq!(
            dual_codeword(&f, &tv, &t, FieldElement::ONE)
                .unwrap()
                .weight(),
            24
        );
        let c = dual_codeword(&f, &tv, &t, OMEGA).unwrap();
        assert_eq!(c.weight(), 28);
        assert_eq!(c.len(), 60);
        let ones = (0..60).filter(|&i| c.bit(i) == 1).count();
        assert_eq!(ones, 28);
    }

    #[test]
    fn dual_spectra_gf4() {
        let f = gf(2);
        let t = KloostermanTable::canonical(&f).unwrap();
        let o3 = build_trace_vector(&f, GroupKind::O3).unwrap();
        let sp = build_trace_vector(&f, GroupKind::Sp2).unwrap();
        assert_eq!(
            dual_weight_spectrum(&f, &o3, &t).unwrap().counts,
            spectrum(&[(0, 1), (24, 1), (28, 2)])
        );
        assert_eq!(
            dual_weight_spectrum(&f, &sp, &t).unwrap().counts,
            spectrum(&[(0, 1), (24, 1), (32, 2)])
        );
        let f2 = gf(1);
        let t2 = KloostermanTable::canonical(&f2).unwrap();
        let s = dual_weight_spectrum(&f2, &build_trace_vector(&f2, GroupKind::O3).unwrap(), &t2)
            .unwrap();
        assert_eq!(s.total(), 2);
    }

    #[test]
    fn spectrum_is_order_independent() {
        let f = gf(3);
        let t = KloostermanTable::canonical(&f).unwrap();
        for kind in GroupKind::ALL {
            let tv = build_trace_vector(&f, kind).unwrap();
            let base = dual_weight_spectrum(&f, &tv, &t).unwrap();
            for seed in [1, 7, 42] {
                let shuffled = tv.shuffled(seed);
                assert_ne!(shuffled.entries(), tv.entries());
                assert_eq!(dual_weight_spectrum(&f, &shuffled, &t).unwrap(), base);
            }
            assert_eq!(analytic_dual_spectrum(&f, kind, &t), base);
        }
    }

    #[test]
    fn corrupted_trace_vector_breaks_weight_formula() {
        let f = gf(2);
        let t = KloostermanTable::canonical(&f).unwrap();
        let mut tv = build_trace_vector(&f, GroupKind::O3).unwrap();
        tv.entries[0] = f.add(tv.entries[0], OMEGA);
        assert!(dual_weight_spectrum(&f, &tv, &t).is_err());
    }

    #[test]
    fn dp_small_values_gf4() {
        let f = gf(2);
        let c = weight_distribution_dp(&f, GroupKind::O3, Mode::Truncated(2)).unwrap();
        assert_eq!(c.get(0), &BigUint::one());
        assert_eq!(c.get(1), &BigUint::from(20u32));
        assert_eq!(c.get(2), &BigUint::from(190u32 + 120 + 66 + 66));
        let chat = weight_distribution_dp(&f, GroupKind::Sp2, Mode::Truncated(1)).unwrap();
        assert_eq!(chat.get(1), &BigUint::from(16u32));
    }

    /// Direct enumeration of the compositions for a tiny field.
    #[test]
    fn dp_matches_composition_enumeration_gf2() {
        let f = gf(1);
        for kind in GroupKind::ALL {
            let dist = TraceDistribution::closed_form(&f, kind);
            let (n0, n1) = (
                dist.count(FieldElement::ZERO),
                dist.count(FieldElement::ONE),
            );
            let full = weight_distribution_dp(&f, kind, Mode::Full).unwrap();
            for j in 0..=6u64 {
                let mut expected = 0u64;
                for nu1 in (0..=j.min(n1)).step_by(2) {
                    let nu0 = j - nu1;
                    if nu0 <= n0 {
                        expected += binomial(n0, nu0) * binomial(n1, nu1);
                    }
                }
                assert_eq!(
                    full.get(j as usize),
                    &BigUint::from(expected),
                    "{kind} j={j}"
                );
            }
        }
    }

    #[test]
    fn dp_equals_macwilliams_small_fields() {
        for r in 1..=2 {
            let f = gf(r);
            let t = KloostermanTable::canonical(&f).unwrap();
            for kind in GroupKind::ALL {
                let dp = weight_distribution_dp(&f, kind, Mode::Full).unwrap();
                let spec = analytic_dual_spectrum(&f, kind, &t);
                let mw = macwilliams(&spec.counts, spec.n, spec.dim).unwrap();
                assert_eq!(dp, mw);
                check_full_distribution(&dp, r).unwrap();
                let trunc = weight_distribution_dp(&f, kind, Mode::Truncated(9)).unwrap();
                assert_eq!(trunc, dp.truncate(9));
            }
        }
    }

    #[test]
    fn dp_guards() {
        let f = gf(4);
        assert!(matches!(
            weight_distribution_dp(&f, GroupKind::O3, Mode::Full),
            Err(Error::Size { .. })
        ));
        assert!(matches!(
            weight_distribution_dp(&f, GroupKind::O3, Mode::Truncated(65)),
            Err(Error::Size { .. })
        ));
    }

    #[test]
    fn macwilliams_trivial_cases() {
        let rep = macwilliams(&spectrum(&[(0, 1), (2, 1)]), 2, 1).unwrap();
        assert_eq!(
            rep.counts(),
            &[BigUint::one(), BigUint::zero(), BigUint::one()]
        );
        let whole = macwilliams(&spectrum(&[(0, 1)]), 7, 0).unwrap();
        for j in 0..=7 {
            assert_eq!(whole.get(j), &BigUint::from(binomial(7u64, j as u64)));
        }
        assert!(matches!(
            macwilliams(&spectrum(&[(0, 1), (1, 2)]), 3, 1),
            Err(Error::InconsistentInput(_))
        ));
        // No linear code has two weight-1 words and no zero word.
        assert!(matches!(
            macwilliams(&spectrum(&[(1, 2)]), 2, 1),
            Err(Error::InconsistentInput(_))
        ));
    }

    #[test]
    fn macwilliams_gf4_low_weights() {
        let mw = macwilliams(&spectrum(&[(0, 1), (24, 1), (28, 2)]), 60, 2).unwrap();
        assert_eq!(mw.get(1), &BigUint::from(20u32));
        assert_eq!(mw.get(2), &BigUint::from(442u32));
    }

    #[test]
    fn krawtchouk_matches_explicit_sum() {
        for n in 0..=12usize {
            for w in 0..=n {
                let rec = krawtchouk(n, w);
                for j in 0..=n {
                    let explicit: i64 = (0..=j)
                        .map(|i| {
                            let sign = if i % 2 == 0 { 1 } else { -1 };
                            let a = if i <= w {
                                binomial(w as i64, i as i64)
                            } else {
                                0
                            };
                            let b = if j - i <= n - w {
                                binomial((n - w) as i64, (j - i) as i64)
                            } else {
                                0
                            };
                            sign * a * b
                        })
                        .sum();
                    assert_eq!(rec[j], BigInt::from(explicit), "n={n} w={w} j={j}");
                }
            }
        }
    }

    #[test]
    fn d_sequence_values() {
        let d4 = d_sequence(&gf(2), 3).unwrap();
        assert_eq!(d4[0], BigInt::zero());
        assert_eq!(d4[1], BigInt::from(4));
        let d8 = d_sequence(&gf(3), 3).unwrap();
        assert_eq!(d8[1], BigInt::from(-8));
    }

    #[test]
    fn json_and_csv() {
        let rep = macwilliams(&spectrum(&[(0, 1), (2, 1)]), 2, 1).unwrap();
        assert_eq!(
            serde_json::to_string(&rep).unwrap(),
            r#"{"n":2,"mode":"full","counts":{"0":"1","2":"1"}}"#
        );
        assert_eq!(rep.to_csv(), "j,count\n0,1\n2,1\n");
        let t = weight_distribution_dp(&gf(2), GroupKind::O3, Mode::Truncated(1)).unwrap();
        assert_eq!(
            serde_json::to_string(&t).unwrap(),
            r#"{"n":60,"mode":"truncated","j_max":1,"counts":{"0":"1","1":"20"}}"#
        );
    }
}
