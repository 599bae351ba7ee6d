use std::collections::BTreeMap;
use std::fmt::Write as _;

use kloosterman_core::charsums::{KloostermanTable, MomentTable};
use kloosterman_core::codes::{
    analytic_dual_spectrum, build_trace_vector, d_sequence_from, dual_weight_spectrum,
    weight_distribution_from_counts, DualSpectrum, Mode, WeightDistribution,
};
use kloosterman_core::field::parse_hex;
use kloosterman_core::groups::{
    gauss_sum_bruteforce, gauss_sum_formula, symplectic_by_filter, trace_character_sum,
    trace_distribution, SYMPLECTIC_FILTER_LIMIT,
};
use kloosterman_core::identities::{mk_recursion_sequence, t1k_recursion_sequence, T1K_MAX_H};
use kloosterman_core::{
    run_suite, Check, FieldCtx, FieldElement, GroupKind, SuiteConfig, TraceDistribution,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::{json, Value};

use crate::{Cli, CodeChoice, Command, Failure, Format, Global};

/// Degrees up to which group elements are enumerated rather than counted
/// by formula, and codewords are built explicitly.
const ENUMERATE_MAX_DEGREE: u32 = 8;
const EXPLICIT_CODEWORDS_MAX_DEGREE: u32 = 6;

const SCHEMA: &str = "1";

pub struct Output {
    pub text: String,
    pub passed: bool,
}

pub fn run(cli: &Cli) -> Result<Output, Failure> {
    let g = &cli.global;
    match &cli.command {
        Command::Kloosterman => kloosterman(g),
        Command::Moments { cross_check } => moments(g, *cross_check),
        Command::Gauss { n, code } => gauss(g, *n, *code),
        Command::Weights { full, jmax, code } => weights(g, *full, *jmax, *code),
        Command::Verify {
            sweep,
            only,
            inject_fault,
        } => verify(g, sweep.as_deref(), only.as_deref(), *inject_fault),
    }
}

fn degree(g: &Global) -> Result<Option<u32>, Failure> {
    match (g.r, g.q) {
        (Some(r), _) => Ok(Some(r)),
        (None, Some(q)) if q >= 2 && q.is_power_of_two() => Ok(Some(q.trailing_zeros())),
        (None, Some(q)) => Err(Failure::Config(format!(
            "q = {q} is not a power of two >= 2"
        ))),
        (None, None) => Ok(None),
    }
}

fn modulus(g: &Global) -> Result<Option<u64>, Failure> {
    g.modulus
        .as_deref()
        .map(parse_hex)
        .transpose()
        .map_err(Failure::from)
}

fn field(g: &Global) -> Result<FieldCtx, Failure> {
    let r = degree(g)?.ok_or_else(|| Failure::Config("one of --r or --q is required".into()))?;
    Ok(FieldCtx::new(r, modulus(g)?)?)
}

fn distribution(ctx: &FieldCtx, kind: GroupKind) -> Result<TraceDistribution, Failure> {
    if ctx.r() <= ENUMERATE_MAX_DEGREE {
        Ok(trace_distribution(ctx, kind)?)
    } else {
        Ok(TraceDistribution::closed_form(ctx, kind))
    }
}

fn document(body: Value) -> String {
    let mut doc = serde_json::Map::new();
    doc.insert("schema".into(), json!(SCHEMA));
    if let Value::Object(fields) = body {
        doc.extend(fields);
    }
    let mut s = serde_json::to_string_pretty(&doc).expect("JSON values always serialize");
    s.push('\n');
    s
}

fn csv(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = headers.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

fn table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = headers.iter().map(|h| h.len()).collect();
    for row in rows {
        for (w, c) in widths.iter_mut().zip(row) {
            *w = (*w).max(c.len());
        }
    }
    let line = |cells: Vec<&str>| {
        let padded: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:>w$}"))
            .collect();
        padded.join("  ") + "\n"
    };
    let mut out = line(headers.to_vec());
    for row in rows {
        out += &line(row.iter().map(String::as_str).collect());
    }
    out
}

fn render(
    format: Format,
    json_body: impl FnOnce() -> Value,
    headers: &[&str],
    rows: &[Vec<String>],
) -> String {
    match format {
        Format::Json => document(json_body()),
        Format::Csv => csv(headers, rows),
        Format::Table => table(headers, rows),
    }
}

fn kloosterman(g: &Global) -> Result<Output, Failure> {
    let ctx = field(g)?;
    let k = KloostermanTable::canonical(&ctx)?;
    let rows: Vec<Vec<String>> = k
        .iter()
        .map(|(a, v)| vec![a.to_string(), ctx.trace(a).to_string(), v.to_string()])
        .collect();
    let body = || {
        let values: Vec<Value> = k
            .iter()
            .map(|(a, v)| json!({ "a": a.to_string(), "trace": ctx.trace(a), "k": v }))
            .collect();
        json!({ "field": ctx.spec(), "kloosterman": values })
    };
    let text = render(g.format, body, &["a", "tr_a", "K"], &rows);
    Ok(Output { text, passed: true })
}

fn moments(g: &Global, cross_check: bool) -> Result<Output, Failure> {
    let ctx = field(g)?;
    let q = ctx.q() as u64;
    let table_k = KloostermanTable::canonical(&ctx)?;
    let m = MomentTable::compute(&ctx, &table_k, g.hmax)?;
    let mut mk_rec: BTreeMap<u32, BigRational> = BTreeMap::new();
    let mut t1k_rec: BTreeMap<u32, BigRational> = BTreeMap::new();
    if cross_check && g.hmax >= 1 {
        let jmax = g.hmax as usize;
        let sp2 = weight_distribution_from_counts(
            &ctx,
            &distribution(&ctx, GroupKind::Sp2)?,
            Mode::Truncated(jmax),
        )?;
        for (h, v) in mk_recursion_sequence(q, sp2.counts(), g.hmax)?
            .into_iter()
            .enumerate()
            .skip(1)
        {
            mk_rec.insert(h as u32, v);
        }
        let odd_max = g.hmax.min(T1K_MAX_H);
        let odd_max = if odd_max.is_multiple_of(2) {
            odd_max - 1
        } else {
            odd_max
        };
        let o3 = weight_distribution_from_counts(
            &ctx,
            &distribution(&ctx, GroupKind::O3)?,
            Mode::Truncated(jmax),
        )?;
        t1k_rec.extend(t1k_recursion_sequence(
            q,
            &d_sequence_from(&o3, &sp2),
            odd_max,
        )?);
    }
    let matches = |rec: &BTreeMap<u32, BigRational>, h: u32, brute: &BigInt| {
        rec.get(&h)
            .map(|v| *v == BigRational::from_integer(brute.clone()))
    };
    let mut passed = true;
    let mut rows = Vec::new();
    for h in 0..=g.hmax {
        let mut row = vec![
            h.to_string(),
            m.mk(h).to_string(),
            m.t0k(h).to_string(),
            m.t1k(h).to_string(),
        ];
        if cross_check {
            for (rec, brute) in [(&mk_rec, m.mk(h)), (&t1k_rec, m.t1k(h))] {
                row.push(
                    rec.get(&h)
                        .map(ToString::to_string)
                        .unwrap_or_else(|| "-".into()),
                );
                passed &= matches(rec, h, brute) != Some(false);
            }
        }
        rows.push(row);
    }
    let mut headers = vec!["h", "MK", "T0K", "T1K"];
    if cross_check {
        headers.extend(["MK_recursion", "T1K_recursion"]);
    }
    let body = || {
        let mut v = json!({ "field": ctx.spec(), "moments": &m });
        if cross_check {
            let list = |rec: &BTreeMap<u32, BigRational>,
                        pick: fn(&MomentTable, u32) -> &BigInt| {
                rec.iter()
                    .map(|(h, v)| {
                        json!({ "h": h, "value": v.to_string(), "match": matches(rec, *h, pick(&m, *h)) == Some(true) })
                    })
                    .collect::<Vec<_>>()
            };
            v["cross_check"] = json!({
                "MK": list(&mk_rec, MomentTable::mk),
                "T1K": list(&t1k_rec, MomentTable::t1k),
                "passed": passed,
            });
        }
        v
    };
    let text = render(g.format, body, &headers, &rows);
    Ok(Output { text, passed })
}

fn gauss(g: &Global, n: u32, code: CodeChoice) -> Result<Output, Failure> {
    let ctx = field(g)?;
    let q = ctx.q() as u128;
    let lambda1 = ctx.lambda(FieldElement::ONE) as i64;
    let formula = gauss_sum_formula(&ctx, n)?;
    let mut rows = Vec::new();
    let mut per_kind = serde_json::Map::new();
    let brute: Option<BigInt> = if n == 1 {
        let k = KloostermanTable::canonical(&ctx)?;
        let mut at_one = None;
        for kind in code.kinds() {
            let dist = distribution(&ctx, kind)?;
            let mut sums = Vec::new();
            for a in ctx.nonzero() {
                let s = gauss_sum_bruteforce(&ctx, &dist, &k, a)?;
                rows.push(vec![kind.to_string(), a.to_string(), s.to_string()]);
                sums.push(json!({ "a": a.to_string(), "sum": s }));
            }
            // Both groups give the same value once the O(3,q) shift by lambda(1) is undone.
            let s1 = dist.character_sum(&ctx, FieldElement::ONE);
            at_one = Some(match kind {
                GroupKind::O3 => s1,
                GroupKind::Sp2 => lambda1 * s1,
            });
            per_kind.insert(kind.name().to_string(), Value::Array(sums));
        }
        at_one.map(BigInt::from)
    } else if q
        .checked_pow(4 * n * n)
        .is_some_and(|size| size <= SYMPLECTIC_FILTER_LIMIT)
    {
        let group = symplectic_by_filter(&ctx, n)?;
        Some(BigInt::from(lambda1 * trace_character_sum(&ctx, &group)))
    } else {
        None
    };
    let passed = brute.as_ref().is_none_or(|b| *b == formula);
    rows.push(vec![
        "formula".into(),
        FieldElement::ONE.to_string(),
        format!(
            "{formula} (brute force: {})",
            brute
                .as_ref()
                .map(ToString::to_string)
                .unwrap_or_else(|| "-".into())
        ),
    ]);
    let body = || {
        json!({
            "field": ctx.spec(),
            "n": n,
            "formula": formula.to_string(),
            "brute_force": brute.as_ref().map(ToString::to_string),
            "match": passed,
            "sums": per_kind,
        })
    };
    let text = render(g.format, body, &["group", "a", "sum"], &rows);
    Ok(Output { text, passed })
}

fn spectrum(ctx: &FieldCtx, kind: GroupKind, seed: Option<u64>) -> Result<DualSpectrum, Failure> {
    let k = KloostermanTable::canonical(ctx)?;
    if ctx.r() > EXPLICIT_CODEWORDS_MAX_DEGREE {
        return Ok(analytic_dual_spectrum(ctx, kind, &k));
    }
    let mut tv = build_trace_vector(ctx, kind)?;
    if let Some(seed) = seed {
        tv = tv.shuffled(seed);
    }
    Ok(dual_weight_spectrum(ctx, &tv, &k)?)
}

fn weights(
    g: &Global,
    full: bool,
    jmax: Option<usize>,
    code: CodeChoice,
) -> Result<Output, Failure> {
    let ctx = field(g)?;
    let mode = if full {
        Mode::Full
    } else {
        Mode::Truncated(jmax.unwrap_or(g.hmax as usize))
    };
    let kinds = code.kinds();
    let mut spectra = Vec::new();
    let mut dists: Vec<WeightDistribution> = Vec::new();
    for &kind in &kinds {
        spectra.push(spectrum(&ctx, kind, g.seed_order)?);
        dists.push(weight_distribution_from_counts(
            &ctx,
            &distribution(&ctx, kind)?,
            mode,
        )?);
    }
    let d = (kinds.len() == 2).then(|| d_sequence_from(&dists[0], &dists[1]));

    let mut headers: Vec<String> = kinds.iter().map(|k| format!("C_{}", k.name())).collect();
    headers.insert(0, "j".into());
    if d.is_some() {
        headers.push("D".into());
    }
    let rows: Vec<Vec<String>> = (0..=dists[0].max_weight())
        .map(|j| {
            let mut row = vec![j.to_string()];
            row.extend(dists.iter().map(|w| w.get(j).to_string()));
            if let Some(d) = &d {
                row.push(d[j].to_string());
            }
            row
        })
        .collect();
    let header_refs: Vec<&str> = headers.iter().map(String::as_str).collect();
    let text = match g.format {
        Format::Json => {
            let mut codes = serde_json::Map::new();
            for ((kind, s), w) in kinds.iter().zip(&spectra).zip(&dists) {
                let spec: BTreeMap<String, u64> =
                    s.counts.iter().map(|(w, c)| (w.to_string(), *c)).collect();
                codes.insert(
                    kind.name().into(),
                    json!({ "dual_spectrum": spec, "distribution": w }),
                );
            }
            let mut body = json!({ "field": ctx.spec(), "length": dists[0].n(), "codes": codes });
            if let Some(d) = &d {
                body["D"] = json!(d.iter().map(ToString::to_string).collect::<Vec<_>>());
            }
            document(body)
        }
        Format::Csv => csv(&header_refs, &rows),
        Format::Table => {
            let mut out = String::new();
            for (kind, s) in kinds.iter().zip(&spectra) {
                let parts: Vec<String> = s.counts.iter().map(|(w, c)| format!("{w}:{c}")).collect();
                let _ = writeln!(out, "dual spectrum {kind}: {{{}}}", parts.join(", "));
            }
            let _ = writeln!(out, "length N = {}", dists[0].n());
            out + &table(&header_refs, &rows)
        }
    };
    Ok(Output { text, passed: true })
}

fn parse_sweep(s: &str) -> Result<Vec<u32>, Failure> {
    let bad = |part: &str| Failure::Config(format!("bad sweep element {part:?}"));
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if let Some((lo, hi)) = part.split_once("..") {
            let hi = hi.strip_prefix('=').unwrap_or(hi);
            let lo: u32 = lo.trim().parse().map_err(|_| bad(part))?;
            let hi: u32 = hi.trim().parse().map_err(|_| bad(part))?;
            if lo > hi {
                return Err(bad(part));
            }
            out.extend(lo..=hi);
        } else {
            out.push(part.parse().map_err(|_| bad(part))?);
        }
    }
    if out.is_empty() {
        return Err(Failure::Config("empty sweep".into()));
    }
    Ok(out)
}

fn verify(
    g: &Global,
    sweep: Option<&str>,
    only: Option<&str>,
    inject_fault: Option<usize>,
) -> Result<Output, Failure> {
    let sweep = match (sweep, degree(g)?) {
        (Some(s), _) => parse_sweep(s)?,
        (None, Some(r)) => vec![r],
        (None, None) => SuiteConfig::default().sweep,
    };
    let only = only
        .map(|s| {
            s.split(',')
                .map(|c| c.trim().parse::<Check>())
                .collect::<Result<Vec<_>, _>>()
        })
        .transpose()?
        .unwrap_or_default();
    let config = SuiteConfig {
        sweep,
        h_max: g.hmax,
        only,
        modulus: modulus(g)?,
        seed_order: g.seed_order,
        inject_fault,
    };
    let report = run_suite(&config)?;
    let passed = report.passed();
    let text = match g.format {
        Format::Json => document(json!({ "passed": passed, "rows": report.rows })),
        Format::Csv => report.to_csv(),
        Format::Table => report.to_table(),
    };
    Ok(Output { text, passed })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_syntax() {
        assert_eq!(parse_sweep("2,3,4,5").unwrap(), vec![2, 3, 4, 5]);
        assert_eq!(parse_sweep("2..5").unwrap(), vec![2, 3, 4, 5]);
        assert_eq!(parse_sweep("1, 3..=4,7").unwrap(), vec![1, 3, 4, 7]);
        assert!(parse_sweep("5..2").is_err());
        assert!(parse_sweep("x").is_err());
        assert!(parse_sweep("").is_err());
    }

    #[test]
    fn renderers() {
        let rows = vec![vec!["1".to_string(), "-1".to_string()]];
        assert_eq!(csv(&["a", "K"], &rows), "a,K\n1,-1\n");
        assert_eq!(table(&["a", "K"], &rows), "a   K\n1  -1\n");
        assert!(document(json!({})).contains("\"schema\": \"1\""));
    }
}
