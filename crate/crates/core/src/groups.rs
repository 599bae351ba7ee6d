//! SL(2,q) = Sp(2,q), its isomorphic copy O(3,q), trace distributions, and
//! Gauss sums of the matrix trace.
//!
//! O(3,q) preserves the quadratic form `theta(x) = x1 x2 + x3^2`. Its elements
//! have the shape
//!
//! ```text
//! [ A B 0 ]
//! [ C D 0 ]
//! [ g h 1 ]
//! ```
//!
//! with `g^2 = AC`, `h^2 = BD` and `AD + BC = 1`, so dropping the last row and
//! column is an isomorphism onto SL(2,q). Every element is reached by lifting
//! an SL(2,q) element with the unique characteristic-2 square roots, and the
//! lift adds exactly 1 to the trace.

use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::ser::SerializeMap;
use serde::{Deserialize, Serialize, Serializer};

use crate::charsums::{gl_kloosterman, KloostermanTable};
use crate::error::{violation, Error, Result};
use crate::field::{FieldCtx, FieldElement};
use crate::matrix::Matrix;

/// Which of the two isomorphic groups a trace statistic refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupKind {
    O3,
    Sp2,
}

impl GroupKind {
    pub const ALL: [GroupKind; 2] = [GroupKind::O3, GroupKind::Sp2];

    pub fn name(self) -> &'static str {
        match self {
            GroupKind::O3 => "o3",
            GroupKind::Sp2 => "sp2",
        }
    }
}

impl fmt::Display for GroupKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GroupKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "o3" => Ok(GroupKind::O3),
            "sp2" | "sl2" => Ok(GroupKind::Sp2),
            other => Err(Error::Domain(format!(
                "unknown group {other:?} (expected o3 or sp2)"
            ))),
        }
    }
}

/// A 2x2 matrix `[[a, b], [c, d]]` of determinant 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sl2Element {
    pub a: FieldElement,
    pub b: FieldElement,
    pub c: FieldElement,
    pub d: FieldElement,
}

impl Sl2Element {
    pub fn det(&self, ctx: &FieldCtx) -> FieldElement {
        ctx.add(ctx.mul(self.a, self.d), ctx.mul(self.b, self.c))
    }

    pub fn trace(&self) -> FieldElement {
        FieldElement::from_bits(self.a.bits() ^ self.d.bits())
    }

    pub fn to_matrix(&self) -> Matrix {
        Matrix::new(2, vec![self.a, self.b, self.c, self.d])
    }
}

/// Every SL(2,q) element with the given top-left entry, lexicographically.
pub fn sl2_with_first_entry(
    ctx: &FieldCtx,
    a: FieldElement,
) -> Box<dyn Iterator<Item = Sl2Element> + Send + '_> {
    if a.is_zero() {
        // bc = 1, d free.
        Box::new(ctx.nonzero().flat_map(move |b| {
            let c = ctx.inv(b).expect("b is nonzero");
            ctx.elements().map(move |d| Sl2Element { a, b, c, d })
        }))
    } else {
        let a_inv = ctx.inv(a).expect("a is nonzero");
        Box::new(ctx.elements().flat_map(move |b| {
            ctx.elements().map(move |c| {
                let d = ctx.mul(ctx.add(FieldElement::ONE, ctx.mul(b, c)), a_inv);
                Sl2Element { a, b, c, d }
            })
        }))
    }
}

/// All of SL(2,q), each element once, ordered lexicographically by `(a, b, c, d)`.
pub fn enumerate_sl2(ctx: &FieldCtx) -> impl Iterator<Item = Sl2Element> + '_ {
    ctx.elements()
        .flat_map(move |a| sl2_with_first_entry(ctx, a))
}

/// An element of O(3,q) in block form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct O3Element {
    pub a: FieldElement,
    pub b: FieldElement,
    pub c: FieldElement,
    pub d: FieldElement,
    pub g: FieldElement,
    pub h: FieldElement,
    pub trace: FieldElement,
}

/// The unique O(3,q) element projecting onto `w`.
pub fn lift_to_o3(ctx: &FieldCtx, w: &Sl2Element) -> O3Element {
    let g = ctx.sqrt(ctx.mul(w.a, w.c));
    let h = ctx.sqrt(ctx.mul(w.b, w.d));
    let trace = ctx.add(w.trace(), FieldElement::ONE);
    O3Element {
        a: w.a,
        b: w.b,
        c: w.c,
        d: w.d,
        g,
        h,
        trace,
    }
}

impl O3Element {
    pub fn to_matrix(&self) -> Matrix {
        let z = FieldElement::ZERO;
        Matrix::new(
            3,
            vec![
                self.a,
                self.b,
                z,
                self.c,
                self.d,
                z,
                self.g,
                self.h,
                FieldElement::ONE,
            ],
        )
    }

    /// Drops the last row and column.
    pub fn project(&self) -> Sl2Element {
        Sl2Element {
            a: self.a,
            b: self.b,
            c: self.c,
            d: self.d,
        }
    }

    /// Checks the block relations, that the stored trace is the matrix trace,
    /// and that the 3x3 matrix preserves `theta` on every basis vector and the
    /// associated bilinear form on every basis pair.
    pub fn validate(&self, ctx: &FieldCtx) -> Result<()> {
        let m = self.to_matrix();
        let ac_gg = ctx.add(ctx.mul(self.a, self.c), ctx.square(self.g));
        let bd_hh = ctx.add(ctx.mul(self.b, self.d), ctx.square(self.h));
        let ad_cb = ctx.add(ctx.mul(self.a, self.d), ctx.mul(self.c, self.b));
        if !ac_gg.is_zero() || !bd_hh.is_zero() || ad_cb != FieldElement::ONE {
            return Err(violation(
                "O(3,q) block relations",
                format!("{self:?}"),
                "AC=g^2, BD=h^2, AD+CB=1",
            ));
        }
        if m.trace() != self.trace {
            return Err(violation("O(3,q) trace", m.trace(), self.trace));
        }
        let theta = |x: [FieldElement; 3]| ctx.add(ctx.mul(x[0], x[1]), ctx.square(x[2]));
        let polar = |x: [FieldElement; 3], y: [FieldElement; 3]| {
            ctx.add(ctx.mul(x[0], y[1]), ctx.mul(x[1], y[0]))
        };
        let column = |j: usize| [m.get(0, j), m.get(1, j), m.get(2, j)];
        let unit = |j: usize| {
            let mut e = [FieldElement::ZERO; 3];
            e[j] = FieldElement::ONE;
            e
        };
        for i in 0..3 {
            if theta(column(i)) != theta(unit(i)) {
                return Err(violation(
                    format!("theta preserved on e{}", i + 1),
                    theta(column(i)),
                    theta(unit(i)),
                ));
            }
            for j in i + 1..3 {
                if polar(column(i), column(j)) != polar(unit(i), unit(j)) {
                    return Err(violation(
                        format!("polar form preserved on (e{}, e{})", i + 1, j + 1),
                        polar(column(i), column(j)),
                        polar(unit(i), unit(j)),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Number of group elements with each trace value, indexed by element encoding.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceDistribution {
    kind: GroupKind,
    counts: Vec<u64>,
}

impl TraceDistribution {
    /// Single pass over the group, split by top-left entry across threads.
    pub fn enumerate(ctx: &FieldCtx, kind: GroupKind) -> Self {
        let q = ctx.q() as usize;
        let counts = ctx
            .elements()
            .collect::<Vec<_>>()
            .into_par_iter()
            .map(|a| {
                let mut local = vec![0u64; q];
                for w in sl2_with_first_entry(ctx, a) {
                    let t = match kind {
                        GroupKind::Sp2 => w.trace(),
                        GroupKind::O3 => lift_to_o3(ctx, &w).trace,
                    };
                    local[t.index()] += 1;
                }
                local
            })
            .reduce(
                || vec![0u64; q],
                |mut acc, local| {
                    acc.iter_mut().zip(local).for_each(|(x, y)| *x += y);
                    acc
                },
            );
        TraceDistribution { kind, counts }
    }

    /// Closed-form counts: for O(3,q), `q^2` at `beta = 1`, otherwise
    /// `q^2 + q` or `q^2 - q` as `tr(1/(beta + 1))` is 0 or 1. The Sp(2,q)
    /// counts are the same shifted by one.
    pub fn closed_form(ctx: &FieldCtx, kind: GroupKind) -> Self {
        let q = ctx.q() as u64;
        let shift = match kind {
            GroupKind::O3 => FieldElement::ONE,
            GroupKind::Sp2 => FieldElement::ZERO,
        };
        let counts = ctx
            .elements()
            .map(|beta| match ctx.inv(ctx.add(beta, shift)) {
                Err(_) => q * q,
                Ok(x) if ctx.trace(x) == 0 => q * q + q,
                Ok(_) => q * q - q,
            })
            .collect();
        TraceDistribution { kind, counts }
    }

    pub fn from_counts(kind: GroupKind, counts: Vec<u64>) -> Self {
        TraceDistribution { kind, counts }
    }

    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    pub fn count(&self, beta: FieldElement) -> u64 {
        self.counts[beta.index()]
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// `(beta, n(beta))` in increasing encoding.
    pub fn iter(&self) -> impl Iterator<Item = (FieldElement, u64)> + '_ {
        self.counts
            .iter()
            .enumerate()
            .map(|(b, &n)| (FieldElement::from_bits(b as u32), n))
    }

    /// `sum of n(beta) * beta` in the field; an element occurring an even
    /// number of times cancels.
    pub fn weighted_sum(&self) -> FieldElement {
        let bits = self
            .iter()
            .filter(|&(_, n)| n % 2 == 1)
            .fold(0, |acc, (b, _)| acc ^ b.bits());
        FieldElement::from_bits(bits)
    }

    /// `sum over w of lambda(a Tr w) = sum over beta of n(beta) lambda(a beta)`.
    pub fn character_sum(&self, ctx: &FieldCtx, a: FieldElement) -> i64 {
        self.iter()
            .map(|(beta, n)| n as i64 * ctx.lambda(ctx.mul(a, beta)) as i64)
            .sum()
    }
}

impl Serialize for TraceDistribution {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.counts.len()))?;
        for (beta, n) in self.iter() {
            map.serialize_entry(&beta.to_string(), &n)?;
        }
        map.end()
    }
}

/// Enumerated trace distribution, checked against the closed form.
pub fn trace_distribution(ctx: &FieldCtx, kind: GroupKind) -> Result<TraceDistribution> {
    let dist = TraceDistribution::enumerate(ctx, kind);
    let expected = TraceDistribution::closed_form(ctx, kind);
    for (beta, n) in dist.iter() {
        if n != expected.count(beta) {
            return Err(violation(
                format!("{kind} trace count at beta = {beta}"),
                n,
                expected.count(beta),
            ));
        }
    }
    Ok(dist)
}

/// `sum over w of lambda(a Tr w)` from the trace distribution, checked
/// against `lambda(a) q K(lambda; a)` for O(3,q) and `q K(lambda; a)` for Sp(2,q).
pub fn gauss_sum_bruteforce(
    ctx: &FieldCtx,
    dist: &TraceDistribution,
    kloosterman: &KloostermanTable,
    a: FieldElement,
) -> Result<i64> {
    if a.is_zero() {
        return Err(Error::Domain(
            "Gauss sum needs a nonzero character parameter".into(),
        ));
    }
    if kloosterman.c() != FieldElement::ONE {
        return Err(Error::Domain(
            "Gauss sum check needs the canonical Kloosterman table".into(),
        ));
    }
    let lhs = dist.character_sum(ctx, a);
    let qk = ctx.q() as i64 * kloosterman.get(a);
    let rhs = match dist.kind() {
        GroupKind::O3 => ctx.lambda(a) as i64 * qk,
        GroupKind::Sp2 => qk,
    };
    if lhs != rhs {
        return Err(violation(
            format!("{} Gauss sum at a = {a}", dist.kind()),
            lhs,
            rhs,
        ));
    }
    Ok(lhs)
}

/// Largest `n` accepted by [`gauss_sum_formula`].
pub const GAUSS_FORMULA_MAX_N: u32 = 3;

/// Closed-form `sum over w in O(2n+1,q) of lambda(Tr w)`, which is
/// `lambda(1)` times the same sum over Sp(2n,q).
pub fn gauss_sum_formula(ctx: &FieldCtx, n: u32) -> Result<BigInt> {
    if !(1..=GAUSS_FORMULA_MAX_N).contains(&n) {
        return Err(Error::Bounds {
            what: "n",
            value: n as u64,
            min: 1,
            max: GAUSS_FORMULA_MAX_N as u64,
        });
    }
    let q = ctx.q() as u64;
    let qb = BigInt::from(q);
    let mut sum = BigInt::zero();
    for k in (0..=n).step_by(2) {
        let mut term = qb.pow(k * n - k * k / 4) * BigInt::from(qbinom(n as i64, k as i64, q));
        for j in 1..=k / 2 {
            term *= qb.pow(2 * j - 1) - 1u32;
        }
        term *= gl_kloosterman(ctx, n - k, FieldElement::ONE)?;
        sum += term;
    }
    Ok(ctx.lambda(FieldElement::ONE) * qb.pow(n * (n + 1) / 2) * sum)
}

/// Gaussian binomial `[n choose r]_q`; zero outside `0 <= r <= n`.
pub fn qbinom(n: i64, r: i64, q: u64) -> BigUint {
    assert!(q >= 2, "q-binomial needs q >= 2");
    if r < 0 || r > n {
        return BigUint::zero();
    }
    let qb = BigUint::from(q);
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for j in 0..r {
        num *= qb.pow((n - j) as u32) - 1u32;
        den *= qb.pow((r - j) as u32) - 1u32;
    }
    let (quot, rem) = num.div_rem(&den);
    assert!(rem.is_zero(), "q-binomial division must be exact");
    quot
}

/// `|Sp(2n,q)| = |O(2n+1,q)| = q^(n^2) prod_{j=1..n} (q^(2j) - 1)`.
pub fn group_order(n: u32, q: u64) -> BigUint {
    let qb = BigUint::from(q);
    (1..=n).fold(qb.pow(n * n), |acc, j| acc * (qb.pow(2 * j) - 1u32))
}

/// `J = [[0, I], [I, 0]]` of size `2n`.
pub fn symplectic_form(n: usize) -> Matrix {
    let mut j = Matrix::zero(2 * n);
    for i in 0..n {
        j.set(i, n + i, FieldElement::ONE);
        j.set(n + i, i, FieldElement::ONE);
    }
    j
}

/// Whether `w^T J w = J`.
pub fn is_symplectic(ctx: &FieldCtx, w: &Matrix) -> bool {
    let j = symplectic_form(w.size() / 2);
    w.transpose().mul(ctx, &j.mul(ctx, w)) == j
}

/// Enumeration bound for [`symplectic_by_filter`]: `q^(4 n^2) <= 2^24`.
pub const SYMPLECTIC_FILTER_LIMIT: u128 = 1 << 24;

/// Sp(2n,q) by testing every `2n x 2n` matrix.
pub fn symplectic_by_filter(ctx: &FieldCtx, n: u32) -> Result<Vec<Matrix>> {
    let dim = 2 * n as usize;
    let total = (ctx.q() as u128)
        .checked_pow((dim * dim) as u32)
        .unwrap_or(u128::MAX);
    if total > SYMPLECTIC_FILTER_LIMIT {
        return Err(Error::Size {
            what: "Sp(2n,q) candidate matrices q^(4n^2)",
            size: total,
            limit: SYMPLECTIC_FILTER_LIMIT,
        });
    }
    Ok((0..total as u64)
        .into_par_iter()
        .map(|idx| Matrix::from_index(ctx, dim, idx))
        .filter(|w| is_symplectic(ctx, w))
        .collect())
}

/// Sp(2n,q) as the closure of symplectic transvections `x -> x + c B(x, v) v`
/// with `v` in `{e_i} U {e_i + e_j}` and `c` in the polynomial basis.
///
/// Experimental: the result is only trusted when its size equals
/// [`group_order`], which is checked here. Needs `4 n^2 r <= 64` so that
/// elements pack into a `u64`.
pub fn symplectic_by_closure(ctx: &FieldCtx, n: u32) -> Result<Vec<Matrix>> {
    let dim = 2 * n as usize;
    let bits = (dim * dim) as u32 * ctx.r();
    if bits > 64 {
        return Err(Error::Size {
            what: "packed Sp(2n,q) element bits",
            size: bits as u128,
            limit: 64,
        });
    }
    let r = ctx.r();
    let mask = (1u64 << r) - 1;
    let pack = |m: &Matrix| {
        m.entries().iter().enumerate().fold(0u64, |acc, (i, e)| {
            acc | (e.bits() as u64) << (i as u32 * r)
        })
    };
    let unpack = |key: u64| {
        let entries = (0..dim * dim)
            .map(|i| FieldElement::from_bits((key >> (i as u32 * r) & mask) as u32))
            .collect();
        Matrix::new(dim, entries)
    };

    let form = symplectic_form(n as usize);
    let mut vectors: Vec<Vec<FieldElement>> = Vec::new();
    for i in 0..dim {
        let mut v = vec![FieldElement::ZERO; dim];
        v[i] = FieldElement::ONE;
        vectors.push(v.clone());
        for j in i + 1..dim {
            let mut w = v.clone();
            w[j] = FieldElement::ONE;
            vectors.push(w);
        }
    }
    let mut generators = Vec::new();
    for v in &vectors {
        // row vector v^T J
        let vj: Vec<FieldElement> = (0..dim)
            .map(|col| {
                (0..dim).fold(FieldElement::ZERO, |acc, k| {
                    ctx.add(acc, ctx.mul(v[k], form.get(k, col)))
                })
            })
            .collect();
        for k in 0..r {
            let c = FieldElement::from_bits(1 << k);
            let mut t = Matrix::identity(dim);
            for row in 0..dim {
                for col in 0..dim {
                    let extra = ctx.mul(c, ctx.mul(v[row], vj[col]));
                    t.set(row, col, ctx.add(t.get(row, col), extra));
                }
            }
            debug_assert!(is_symplectic(ctx, &t));
            generators.push(t);
        }
    }

    let identity = Matrix::identity(dim);
    let mut seen: HashSet<u64> = HashSet::from([pack(&identity)]);
    let mut queue = VecDeque::from([identity]);
    while let Some(m) = queue.pop_front() {
        for t in &generators {
            let next = m.mul(ctx, t);
            if seen.insert(pack(&next)) {
                queue.push_back(next);
            }
        }
    }
    let expected = group_order(n, ctx.q() as u64);
    if BigUint::from(seen.len()) != expected {
        return Err(violation(
            "Sp(2n,q) transvection closure order",
            seen.len(),
            expected,
        ));
    }
    let mut keys: Vec<u64> = seen.into_iter().collect();
    keys.sort_unstable();
    Ok(keys.into_iter().map(unpack).collect())
}

/// `sum over w of lambda(Tr w)`.
pub fn trace_character_sum(ctx: &FieldCtx, elements: &[Matrix]) -> i64 {
    elements.iter().map(|w| ctx.lambda(w.trace()) as i64).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    const OMEGA: FieldElement = FieldElement::from_bits(0b10);
    const OMEGA2: FieldElement = FieldElement::from_bits(0b11);

    fn gf(r: u32) -> FieldCtx {
        FieldCtx::new(r, None).unwrap()
    }

    #[test]
    fn sl2_counts_and_order() {
        for r in 1..=6 {
            let f = gf(r);
            let q = f.q() as u64;
            let elems: Vec<_> = enumerate_sl2(&f).collect();
            assert_eq!(elems.len() as u64, q * (q * q - 1));
            assert!(
                elems.windows(2).all(|w| w[0] < w[1]),
                "not strictly lexicographic"
            );
            assert!(elems.iter().all(|w| w.det(&f) == FieldElement::ONE));
        }
        assert_eq!(enumerate_sl2(&gf(1)).count(), 6);
        assert_eq!(enumerate_sl2(&gf(2)).count(), 60);
        assert_eq!(enumerate_sl2(&gf(3)).count(), 504);
    }

    #[test]
    fn filter_enumeration_agrees_with_sl2() {
        for r in 1..=3 {
            let f = gf(r);
            let mut by_filter: Vec<Sl2Element> = symplectic_by_filter(&f, 1)
                .unwrap()
                .iter()
                .map(|m| Sl2Element {
                    a: m.get(0, 0),
                    b: m.get(0, 1),
                    c: m.get(1, 0),
                    d: m.get(1, 1),
                })
                .collect();
            by_filter.sort();
            let direct: Vec<_> = enumerate_sl2(&f).collect();
            assert_eq!(by_filter, direct);
        }
    }

    #[test]
    fn lift_examples() {
        let f = gf(2);
        let id = Sl2Element {
            a: FieldElement::ONE,
            b: FieldElement::ZERO,
            c: FieldElement::ZERO,
            d: FieldElement::ONE,
        };
        let l = lift_to_o3(&f, &id);
        assert_eq!(
            (l.g, l.h, l.trace),
            (FieldElement::ZERO, FieldElement::ZERO, FieldElement::ONE)
        );
        assert_eq!(l.to_matrix(), Matrix::identity(3));
        let diag = Sl2Element {
            a: OMEGA,
            b: FieldElement::ZERO,
            c: FieldElement::ZERO,
            d: OMEGA2,
        };
        let l = lift_to_o3(&f, &diag);
        assert_eq!(
            (l.g, l.h, l.trace),
            (FieldElement::ZERO, FieldElement::ZERO, FieldElement::ZERO)
        );
    }

    #[test]
    fn lifts_are_valid_and_injective() {
        for r in 1..=5 {
            let f = gf(r);
            let mut seen = HashSet::new();
            for w in enumerate_sl2(&f) {
                let l = lift_to_o3(&f, &w);
                l.validate(&f).unwrap();
                assert_eq!(l.trace, f.add(w.trace(), FieldElement::ONE));
                assert_eq!(l.project(), w);
                assert!(seen.insert(l.to_matrix()));
            }
        }
    }

    #[test]
    fn lift_is_a_homomorphism() {
        let f = gf(3);
        let elems: Vec<_> = enumerate_sl2(&f).step_by(7).collect();
        for x in &elems {
            for y in elems.iter().step_by(5) {
                let prod = x.to_matrix().mul(&f, &y.to_matrix());
                let xy = Sl2Element {
                    a: prod.get(0, 0),
                    b: prod.get(0, 1),
                    c: prod.get(1, 0),
                    d: prod.get(1, 1),
                };
                let lifted = lift_to_o3(&f, x)
                    .to_matrix()
                    .mul(&f, &lift_to_o3(&f, y).to_matrix());
                assert_eq!(lifted, lift_to_o3(&f, &xy).to_matrix());
            }
        }
    }

    #[test]
    fn validate_rejects_non_isometries() {
        let f = gf(2);
        let w = enumerate_sl2(&f).nth(17).unwrap();
        let mut l = lift_to_o3(&f, &w);
        l.g = f.add(l.g, FieldElement::ONE);
        assert!(l.validate(&f).is_err());
    }

    #[test]
    fn gf4_trace_distributions() {
        let f = gf(2);
        let o3 = trace_distribution(&f, GroupKind::O3).unwrap();
        assert_eq!(o3.counts(), &[20, 16, 12, 12]);
        let sp = trace_distribution(&f, GroupKind::Sp2).unwrap();
        assert_eq!(sp.counts(), &[16, 20, 12, 12]);
        assert_eq!(
            serde_json::to_string(&o3).unwrap(),
            r#"{"0x0":20,"0x1":16,"0x2":12,"0x3":12}"#
        );
    }

    #[test]
    fn trace_distribution_invariants() {
        for r in 1..=6 {
            let f = gf(r);
            let q = f.q() as u64;
            let o3 = trace_distribution(&f, GroupKind::O3).unwrap();
            let sp = trace_distribution(&f, GroupKind::Sp2).unwrap();
            assert_eq!(o3.total(), q * (q * q - 1));
            assert!(o3.counts().iter().all(|&n| n > 0));
            for beta in f.elements() {
                assert_eq!(sp.count(beta), o3.count(f.add(beta, FieldElement::ONE)));
            }
            assert_eq!(o3.weighted_sum(), FieldElement::ZERO);
            assert_eq!(sp.weighted_sum(), FieldElement::ZERO);
        }
    }

    #[test]
    fn gauss_sums_gf4() {
        let f = gf(2);
        let k = KloostermanTable::canonical(&f).unwrap();
        let o3 = TraceDistribution::enumerate(&f, GroupKind::O3);
        let sp = TraceDistribution::enumerate(&f, GroupKind::Sp2);
        assert_eq!(
            gauss_sum_bruteforce(&f, &o3, &k, FieldElement::ONE).unwrap(),
            12
        );
        assert_eq!(gauss_sum_bruteforce(&f, &o3, &k, OMEGA).unwrap(), 4);
        assert_eq!(
            gauss_sum_bruteforce(&f, &sp, &k, FieldElement::ONE).unwrap(),
            12
        );
        let bad = TraceDistribution::from_counts(GroupKind::O3, vec![20, 16, 13, 11]);
        assert!(matches!(
            gauss_sum_bruteforce(&f, &bad, &k, OMEGA),
            Err(Error::IdentityViolation { .. })
        ));
    }

    #[test]
    fn gauss_formula_n1_matches_bruteforce() {
        for r in 1..=6 {
            let f = gf(r);
            let k = KloostermanTable::canonical(&f).unwrap();
            let o3 = TraceDistribution::enumerate(&f, GroupKind::O3);
            let brute = gauss_sum_bruteforce(&f, &o3, &k, FieldElement::ONE).unwrap();
            assert_eq!(gauss_sum_formula(&f, 1).unwrap(), BigInt::from(brute));
        }
        assert_eq!(gauss_sum_formula(&gf(2), 1).unwrap(), 12.into());
    }

    #[test]
    fn sp4_over_gf2() {
        let f = gf(1);
        let sp4 = symplectic_by_filter(&f, 2).unwrap();
        assert_eq!(sp4.len(), 720);
        let o5 = f.lambda(FieldElement::ONE) as i64 * trace_character_sum(&f, &sp4);
        // Oracle computed by hand from the closed form: -(8 * (6 + 8)).
        assert_eq!(o5, -112);
        assert_eq!(gauss_sum_formula(&f, 2).unwrap(), BigInt::from(o5));
    }

    #[test]
    fn transvection_closure_small_cases() {
        for r in 1..=3 {
            let f = gf(r);
            let closure = symplectic_by_closure(&f, 1).unwrap();
            assert_eq!(
                closure.len() as u64,
                f.q() as u64 * (f.q() as u64 * f.q() as u64 - 1)
            );
        }
        let f = gf(1);
        let mut closure = symplectic_by_closure(&f, 2).unwrap();
        let mut filtered = symplectic_by_filter(&f, 2).unwrap();
        let key = |m: &Matrix| m.entries().iter().map(|e| e.bits()).collect::<Vec<_>>();
        closure.sort_by_key(key);
        filtered.sort_by_key(key);
        assert_eq!(closure, filtered);
    }

    #[test]
    #[ignore = "builds all 979200 elements of Sp(4,4); run with --ignored"]
    fn gauss_formula_sp4_over_gf4() {
        let f = gf(2);
        let sp4 = symplectic_by_closure(&f, 2).unwrap();
        let brute = f.lambda(FieldElement::ONE) as i64 * trace_character_sum(&f, &sp4);
        assert_eq!(gauss_sum_formula(&f, 2).unwrap(), BigInt::from(brute));
    }

    #[test]
    #[ignore = "enumerates SL(2,q) up to q = 1024; run with --ignored --release"]
    fn sl2_order_up_to_1024() {
        for r in 7..=10 {
            let f = gf(r);
            let count: u64 = f
                .elements()
                .collect::<Vec<_>>()
                .into_par_iter()
                .map(|a| sl2_with_first_entry(&f, a).count() as u64)
                .sum();
            assert_eq!(BigUint::from(count), group_order(1, f.q() as u64));
        }
    }

    #[test]
    fn qbinom_values() {
        assert_eq!(qbinom(5, 0, 3), BigUint::one());
        assert_eq!(qbinom(2, 1, 4), BigUint::from(5u32));
        assert_eq!(qbinom(3, 1, 2), BigUint::from(7u32));
        assert_eq!(qbinom(2, 2, 4), BigUint::one());
        assert_eq!(qbinom(2, 3, 4), BigUint::zero());
        assert_eq!(qbinom(2, -1, 4), BigUint::zero());
        // [4 choose 2]_2 counts 2-dim subspaces of GF(2)^4.
        assert_eq!(qbinom(4, 2, 2), BigUint::from(35u32));
    }

    #[test]
    fn group_orders() {
        assert_eq!(group_order(1, 4), BigUint::from(60u32));
        assert_eq!(group_order(2, 2), BigUint::from(720u32));
        assert_eq!(group_order(1, 2), BigUint::from(6u32));
        assert_eq!(group_order(2, 4), BigUint::from(979_200u32));
    }

    #[test]
    fn group_kind_parsing() {
        assert_eq!("O3".parse::<GroupKind>().unwrap(), GroupKind::O3);
        assert_eq!("sp2".parse::<GroupKind>().unwrap(), GroupKind::Sp2);
        assert!("gl2".parse::<GroupKind>().is_err());
    }
}
