//! The verification sweep: every exact identity the library knows, checked
//! against an independent computation for each field degree in a sweep.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use rayon::prelude::*;

use crate::charsums::{
    fourier_identity_check, frobenius_invariance_check, gl_kloosterman, gl_kloosterman_bruteforce,
    KloostermanTable, MomentTable, GL_BRUTEFORCE_LIMIT, MAX_MOMENT,
};
use crate::codes::{
    analytic_dual_spectrum, build_trace_vector, check_full_distribution, d_sequence_from,
    dual_weight_spectrum, macwilliams, weight_distribution_from_counts, Mode, WeightDistribution,
};
use crate::error::{Error, Result};
use crate::field::{FieldCtx, MAX_DEGREE};
use crate::groups::{
    gauss_sum_bruteforce, gauss_sum_formula, symplectic_by_filter, trace_character_sum,
    trace_distribution, GroupKind, TraceDistribution,
};
use crate::identities::{
    first_moment_check, mk_recursion_sequence, pless_check, t1k_recursion_sequence, PLESS_MAX_H,
    T1K_MAX_H,
};
use crate::report::{Row, VerificationReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Check {
    TraceMoments,
    Frobenius,
    Fourier,
    TraceCounts,
    GaussSum,
    GaussFormula,
    GlKloosterman,
    DualSpectrum,
    Weights,
    Pless,
    MkRecursion,
    T1kRecursion,
}

impl Check {
    pub const ALL: [Check; 12] = [
        Check::TraceMoments,
        Check::Frobenius,
        Check::Fourier,
        Check::TraceCounts,
        Check::GaussSum,
        Check::GaussFormula,
        Check::GlKloosterman,
        Check::DualSpectrum,
        Check::Weights,
        Check::Pless,
        Check::MkRecursion,
        Check::T1kRecursion,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::TraceMoments => "trace-moments",
            Check::Frobenius => "frobenius",
            Check::Fourier => "fourier",
            Check::TraceCounts => "trace-counts",
            Check::GaussSum => "gauss-sum",
            Check::GaussFormula => "gauss-formula",
            Check::GlKloosterman => "gl-kloosterman",
            Check::DualSpectrum => "dual-spectrum",
            Check::Weights => "weights",
            Check::Pless => "pless",
            Check::MkRecursion => "mk-recursion",
            Check::T1kRecursion => "t1k-recursion",
        }
    }

    /// Largest degree `r` at which the check runs; beyond it rows are skipped.
    pub fn max_degree(self) -> u32 {
        match self {
            Check::TraceMoments => 12,
            Check::Frobenius | Check::Fourier => 10,
            Check::TraceCounts | Check::GaussSum | Check::GaussFormula => 8,
            Check::GlKloosterman => 10,
            Check::DualSpectrum => 6,
            Check::Weights | Check::Pless => 3,
            Check::MkRecursion | Check::T1kRecursion => 8,
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Check {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Check::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Check::ALL.iter().map(|c| c.name()).collect();
                Error::Domain(format!(
                    "unknown check {s:?}; expected one of {}",
                    names.join(", ")
                ))
            })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteConfig {
    pub sweep: Vec<u32>,
    pub h_max: u32,
    /// Empty means every check.
    pub only: Vec<Check>,
    /// Reduction polynomial; only valid when every swept degree matches it.
    pub modulus: Option<u64>,
    /// Shuffles the group enumeration order used to build codewords.
    pub seed_order: Option<u64>,
    /// Adds one to `D_j` at this index before the T1K recursion (test hook).
    pub inject_fault: Option<usize>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            sweep: vec![2, 3, 4, 5],
            h_max: 9,
            only: Vec::new(),
            modulus: None,
            seed_order: None,
            inject_fault: None,
        }
    }
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<()> {
        if self.sweep.is_empty() {
            return Err(Error::Domain("empty sweep".into()));
        }
        for &r in &self.sweep {
            if !(1..=MAX_DEGREE).contains(&r) {
                return Err(Error::Bounds {
                    what: "r",
                    value: r as u64,
                    min: 1,
                    max: MAX_DEGREE as u64,
                });
            }
            if let Some(m) = self.modulus {
                FieldCtx::new(r, Some(m))?;
            }
        }
        if self.h_max > MAX_MOMENT {
            return Err(Error::Bounds {
                what: "h_max",
                value: self.h_max as u64,
                min: 0,
                max: MAX_MOMENT as u64,
            });
        }
        Ok(())
    }

    fn enabled(&self, check: Check) -> bool {
        self.only.is_empty() || self.only.contains(&check)
    }
}

/// Runs every enabled check for every degree in the sweep. Degrees run
/// concurrently; rows come out ordered by sweep position, then check.
pub fn run_suite(config: &SuiteConfig) -> Result<VerificationReport> {
    config.validate()?;
    let per_r: Vec<Vec<Row>> = config
        .sweep
        .par_iter()
        .map(|&r| run_degree(config, r))
        .collect();
    Ok(VerificationReport {
        rows: per_r.into_iter().flatten().collect(),
    })
}

/// Shared, lazily computed inputs for one field.
struct Degree {
    ctx: FieldCtx,
    table: OnceLock<Result<KloostermanTable>>,
    dists: [OnceLock<Result<TraceDistribution>>; 2],
}

impl Degree {
    fn table(&self) -> Result<&KloostermanTable> {
        self.table
            .get_or_init(|| KloostermanTable::canonical(&self.ctx))
            .as_ref()
            .map_err(Clone::clone)
    }

    /// Enumerated where feasible, closed form otherwise.
    fn dist(&self, kind: GroupKind) -> Result<&TraceDistribution> {
        let slot = &self.dists[kind as usize];
        slot.get_or_init(|| {
            if self.ctx.r() <= Check::TraceCounts.max_degree() {
                trace_distribution(&self.ctx, kind)
            } else {
                Ok(TraceDistribution::closed_form(&self.ctx, kind))
            }
        })
        .as_ref()
        .map_err(Clone::clone)
    }

    fn distribution(&self, kind: GroupKind, mode: Mode) -> Result<WeightDistribution> {
        weight_distribution_from_counts(&self.ctx, self.dist(kind)?, mode)
    }
}

fn run_degree(config: &SuiteConfig, r: u32) -> Vec<Row> {
    let ctx = match FieldCtx::new(r, config.modulus) {
        Ok(ctx) => ctx,
        Err(e) => return vec![Row::new(r, "field", "construction").fail(e)],
    };
    let deg = Degree {
        ctx,
        table: OnceLock::new(),
        dists: [OnceLock::new(), OnceLock::new()],
    };
    let mut rows = Vec::new();
    for check in Check::ALL.into_iter().filter(|&c| config.enabled(c)) {
        if r > check.max_degree() {
            rows.push(Row::new(r, check.name(), "-").skip(format!("r > {}", check.max_degree())));
            continue;
        }
        let before = rows.len();
        if let Err(e) = run_check(config, &deg, check, &mut rows) {
            rows.push(Row::new(r, check.name(), "-").fail(e));
        }
        if rows.len() == before {
            rows.push(Row::new(r, check.name(), "-").skip("nothing to check at this degree"));
        }
    }
    rows
}

fn outcome<T: fmt::Display>(row: Row, result: Result<T>) -> Row {
    match result {
        Ok(v) => row.pass(v),
        Err(e) => row.fail(e),
    }
}

fn run_check(config: &SuiteConfig, deg: &Degree, check: Check, rows: &mut Vec<Row>) -> Result<()> {
    let ctx = &deg.ctx;
    let r = ctx.r();
    let q = ctx.q() as u64;
    let name = check.name();
    match check {
        Check::TraceMoments => {
            let row = Row::new(r, name, "brute-force first moments vs closed form").with_h(1);
            rows.push(outcome(
                row,
                first_moment_check(ctx, deg.table()?).map(|(t0, t1)| format!("T0K={t0} T1K={t1}")),
            ));
        }
        Check::Frobenius => {
            let row = Row::new(r, name, "K(a^(2^s)) = K(a), all a, s");
            rows.push(outcome(
                row,
                frobenius_invariance_check(ctx, deg.table()?).map(|n| format!("{n} pairs")),
            ));
        }
        Check::Fourier => {
            let table = deg.table()?;
            let result = ctx
                .elements()
                .try_for_each(|beta| fourier_identity_check(ctx, table, beta).map(drop))
                .map(|_| format!("{q} values of beta"));
            rows.push(outcome(
                Row::new(r, name, "sum_a lambda(a beta) K(a)"),
                result,
            ));
        }
        Check::TraceCounts => {
            for kind in GroupKind::ALL {
                let dist = deg.dist(kind)?;
                rows.push(
                    Row::new(r, name, format!("{kind} enumeration vs closed form"))
                        .pass(dist.total()),
                );
                let min = dist.iter().map(|(_, n)| n).min().unwrap_or(0);
                rows.push(
                    Row::new(r, name, format!("{kind} every count positive"))
                        .compare(min > 0, true),
                );
                rows.push(
                    Row::new(r, name, format!("{kind} sum n(beta) beta"))
                        .compare(dist.weighted_sum(), crate::field::FieldElement::ZERO),
                );
            }
        }
        Check::GaussSum => {
            let table = deg.table()?;
            for kind in GroupKind::ALL {
                let dist = deg.dist(kind)?;
                let result = ctx
                    .nonzero()
                    .try_for_each(|a| gauss_sum_bruteforce(ctx, dist, table, a).map(drop))
                    .map(|_| format!("{} values of a", q - 1));
                rows.push(outcome(
                    Row::new(r, name, format!("{kind} trace distribution vs q K(a)")),
                    result,
                ));
            }
        }
        Check::GaussFormula => {
            let o3 = deg.dist(GroupKind::O3)?;
            let brute = o3.character_sum(ctx, crate::field::FieldElement::ONE);
            rows.push(
                Row::new(r, name, "n=1 closed form vs O(3,q) enumeration")
                    .compare(gauss_sum_formula(ctx, 1)?, brute),
            );
            if r == 1 {
                let sp4 = symplectic_by_filter(ctx, 2)?;
                let brute = ctx.lambda(crate::field::FieldElement::ONE) as i64
                    * trace_character_sum(ctx, &sp4);
                rows.push(
                    Row::new(
                        r,
                        name,
                        format!("n=2 closed form vs {} elements of Sp(4,q)", sp4.len()),
                    )
                    .compare(gauss_sum_formula(ctx, 2)?, brute),
                );
            }
        }
        Check::GlKloosterman => {
            for t in 1..=3u32 {
                let work = (q as u128).pow(t * t) * (q as u128 - 1);
                if work > GL_BRUTEFORCE_LIMIT * 4 {
                    continue;
                }
                let mut recursion = Vec::new();
                let mut brute = Vec::new();
                for a in ctx.nonzero() {
                    recursion.push(gl_kloosterman(ctx, t, a)?);
                    brute.push(gl_kloosterman_bruteforce(ctx, t, a)?);
                }
                rows.push(
                    Row::new(r, name, format!("t={t} recursion vs GL(t,q) sum, all a"))
                        .compare(join(&recursion), join(&brute)),
                );
            }
        }
        Check::DualSpectrum => {
            let table = deg.table()?;
            for kind in GroupKind::ALL {
                let mut tv = build_trace_vector(ctx, kind)?;
                if let Some(seed) = config.seed_order {
                    tv = tv.shuffled(seed);
                }
                let explicit = dual_weight_spectrum(ctx, &tv, table)?;
                let analytic = analytic_dual_spectrum(ctx, kind, table);
                rows.push(
                    Row::new(
                        r,
                        name,
                        format!("{kind} explicit codewords vs Kloosterman weights"),
                    )
                    .compare(
                        spectrum_string(&explicit.counts),
                        spectrum_string(&analytic.counts),
                    ),
                );
                rows.push(
                    Row::new(r, name, format!("{kind} distinct dual codewords"))
                        .compare(explicit.total(), q),
                );
            }
        }
        Check::Weights => {
            let table = deg.table()?;
            for kind in GroupKind::ALL {
                let dp = deg.distribution(kind, Mode::Full)?;
                let spectrum = analytic_dual_spectrum(ctx, kind, table);
                let mw = macwilliams(&spectrum.counts, spectrum.n, spectrum.dim)?;
                rows.push(
                    Row::new(r, name, format!("{kind} DP vs MacWilliams"))
                        .compare(join(dp.counts()), join(mw.counts())),
                );
                rows.push(outcome(
                    Row::new(
                        r,
                        name,
                        format!("{kind} C_0 = 1, total 2^(N-r), C_j = C_(N-j)"),
                    ),
                    check_full_distribution(&dp, r).map(|_| dp.total()),
                ));
                let j_max = (config.h_max as usize).min(dp.n());
                let truncated = deg.distribution(kind, Mode::Truncated(j_max))?;
                rows.push(
                    Row::new(
                        r,
                        name,
                        format!("{kind} truncated DP vs full, j <= {j_max}"),
                    )
                    .compare(join(truncated.counts()), join(dp.truncate(j_max).counts())),
                );
            }
        }
        Check::Pless => {
            let table = deg.table()?;
            for kind in GroupKind::ALL {
                let spectrum = analytic_dual_spectrum(ctx, kind, table);
                let primal = deg.distribution(kind, Mode::Full)?;
                for h in 0..=config.h_max.min(PLESS_MAX_H) {
                    let row = Row::new(r, name, format!("{kind} dual power moment")).with_h(h);
                    rows.push(outcome(row, pless_check(ctx, &spectrum, &primal, h)));
                }
            }
        }
        Check::MkRecursion => {
            let h_max = config.h_max;
            if h_max == 0 {
                return Ok(());
            }
            let brute = MomentTable::compute(ctx, deg.table()?, h_max)?;
            let chat = deg.distribution(GroupKind::Sp2, Mode::Truncated(h_max as usize))?;
            let seq = mk_recursion_sequence(q, chat.counts(), h_max)?;
            for h in 1..=h_max {
                rows.push(
                    Row::new(r, name, "Sp(2,q) code recursion vs brute force")
                        .with_h(h)
                        .compare(&seq[h as usize], brute.mk(h)),
                );
            }
        }
        Check::T1kRecursion => {
            let h_max = config.h_max.min(T1K_MAX_H);
            let h_max = if h_max.is_multiple_of(2) {
                h_max.saturating_sub(1)
            } else {
                h_max
            };
            if h_max == 0 {
                return Ok(());
            }
            let brute = MomentTable::compute(ctx, deg.table()?, h_max)?;
            let o3 = deg.distribution(GroupKind::O3, Mode::Truncated(h_max as usize))?;
            let sp2 = deg.distribution(GroupKind::Sp2, Mode::Truncated(h_max as usize))?;
            let mut d = d_sequence_from(&o3, &sp2);
            if let Some(j) = config.inject_fault {
                if let Some(slot) = d.get_mut(j) {
                    *slot += 1;
                }
            }
            for (h, value) in t1k_recursion_sequence(q, &d, h_max)? {
                rows.push(
                    Row::new(r, name, "D_j recursion vs brute force")
                        .with_h(h)
                        .compare(&value, brute.t1k(h)),
                );
            }
        }
    }
    Ok(())
}

fn join<T: fmt::Display>(xs: &[T]) -> String {
    xs.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

fn spectrum_string(counts: &std::collections::BTreeMap<u64, u64>) -> String {
    counts
        .iter()
        .map(|(w, c)| format!("{w}:{c}"))
        .collect::<Vec<_>>()
        .join(",")
}
