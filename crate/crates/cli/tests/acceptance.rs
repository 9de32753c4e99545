//! Acceptance criteria. Prints one pass/fail line per criterion and exits
//! nonzero if any criterion fails.

#[path = "../../core/tests/support/brute.rs"]
mod brute;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::Instant;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use szlenk::calculus::{
    c_space_index, direct_sum_index, frount_m, sigma, Atom, DirectSum, EpsProfile, Family,
    FamilyProfile, NormSeq, SpaceDoc, SpaceExpr, SumExponent, Summands, Verdict,
};
use szlenk::engine::{sz_eps, BqPoint, FanSet, FanSetDoc};
use szlenk::ordinal::{parse_ordinal, Ordinal};
use szlenk::rational::{QPow, Rational};
use szlenk_cli::report::Report;

type Verdicts = Result<String, String>;

fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn o(s: &str) -> Ordinal {
    parse_ordinal(s).expect("valid ordinal")
}

fn rng(tag: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0x5a5a_0000 + tag)
}

fn draw(r: &mut ChaCha8Rng, lo: i64, hi: i64) -> i64 {
    r.random_range(lo..=hi)
}

fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data")
}

/// Exact check of `(2^q − 1)·ε^q·M ≥ 8^q·d^q·(m − 1)` for integer `d`, `q`.
fn frount_holds(d: i64, eps_q: &Rational, q: u32, m: u64, big: u64) -> bool {
    let two = BigInt::from(2).pow(q) - BigInt::one();
    let lhs = Rational::from_integer(two) * eps_q * Rational::from_integer(big.into());
    let rhs = BigInt::from(8).pow(q) * BigInt::from(d).pow(q) * BigInt::from(m - 1);
    lhs >= Rational::from_integer(rhs)
}

fn sigma_and_frount() -> Verdicts {
    let mut r = rng(1);
    for _ in 0..20 {
        let c = rat(draw(&mut r, 1, 16), draw(&mut r, 1, 16));
        let b = &c + rat(draw(&mut r, 1, 32), draw(&mut r, 1, 16));
        let a = &b * rat(draw(&mut r, 0, 8), 16);
        let d = [rat(1, 1), rat(3, 2), rat(2, 1), rat(7, 3)][r.random_range(0..4)].clone();
        let s = sigma(&a, &b, &c, &d).map_err(|e| e.to_string())?;
        if s != 1 {
            return Err(format!("sigma({a}, {b}, {c}, {d}) = {s}"));
        }
    }
    for _ in 0..50 {
        let d = draw(&mut r, 1, 4);
        let q = draw(&mut r, 1, 3) as u32;
        let m = draw(&mut r, 2, 6) as u64;
        let eps_q = rat(draw(&mut r, 1, 32), draw(&mut r, 1, 16));
        let big = frount_m(&rat(d, 1), &eps_q, &Rational::from_integer(q.into()), m)
            .map_err(|e| e.to_string())?;
        let minimal = big == m || !frount_holds(d, &eps_q, q, m, big - 1);
        if big < m || !frount_holds(d, &eps_q, q, m, big) || !minimal {
            return Err(format!("frount d={d} eps_q={eps_q} q={q} m={m} gave {big}"));
        }
    }
    Ok("20 sigma instances equal 1; 50 frount values minimal".into())
}

fn c_space_table() -> Verdicts {
    let mut rows = Vec::new();
    for n in 1..=5u64 {
        rows.push((Ordinal::omega_pow(Ordinal::nat(n)), Ordinal::omega()));
    }
    rows.push((o("w^w"), o("w^2")));
    for a in 1..=3u64 {
        let alpha = Ordinal::nat(a);
        rows.push((
            Ordinal::omega_pow(Ordinal::omega_pow(alpha.clone())),
            Ordinal::omega_pow(alpha.succ()),
        ));
    }
    for (gamma, want) in &rows {
        let got = c_space_index(gamma);
        if got != *want {
            return Err(format!("C({gamma}+1): got {got}, want {want}"));
        }
    }
    Ok(format!("{} rows reproduced", rows.len()))
}

fn eval_doc(name: &str) -> Result<szlenk::calculus::Evaluation, String> {
    let text = fs::read_to_string(data_dir().join(name)).map_err(|e| e.to_string())?;
    let doc = SpaceDoc::from_json(&text).map_err(|e| e.to_string())?;
    direct_sum_index(&doc.expr).map_err(|e| e.to_string())
}

fn direct_sum_counterexample() -> Verdicts {
    let ev = eval_doc("space_c0_ladder_family.json")?;
    let sz = ev.verdict.index().cloned().ok_or("ladder sum reported non-Asplund")?;
    let sup = match ev.summand_sup {
        Some(Verdict::Index(s)) => s,
        other => return Err(format!("summand sup {other:?}")),
    };
    if sz != o("w^2") || sup != Ordinal::omega() || sz <= sup {
        return Err(format!("ladder family: index {sz}, summand sup {sup}"));
    }
    let ev = eval_doc("space_c0_threshold_family.json")?;
    if ev.verdict != Verdict::Index(o("w^2")) {
        return Err(format!("threshold family: {}", ev.verdict));
    }
    Ok(format!("index {sz} > summand sup {sup}"))
}

fn random_summand(r: &mut ChaCha8Rng, i: usize) -> SpaceExpr {
    if r.random_bool(0.5) {
        let k = draw(r, 0, 3) as u64;
        let gamma = match draw(r, 0, 2) {
            0 => Ordinal::nat(k + 1),
            1 => Ordinal::omega_pow(Ordinal::nat(k + 1)).mul_nat(draw(r, 1, 3) as u64),
            _ => Ordinal::omega_pow(Ordinal::omega_pow(Ordinal::nat(k))),
        };
        SpaceExpr::Cspace { gamma }
    } else {
        let slope = Ordinal::omega_pow(Ordinal::nat(draw(r, 0, 2) as u64));
        let offset = Ordinal::nat(draw(r, 1, 3) as u64);
        let profile = EpsProfile::ladder(slope, offset, rat(draw(r, 1, 8), 4), rat(1, draw(r, 2, 4)));
        SpaceExpr::Atom(Atom {
            name: format!("T{i}"),
            norm: Rational::one(),
            compact: false,
            profile,
        })
    }
}

fn finite_sums() -> Verdicts {
    let mut r = rng(4);
    let mut checked = 0;
    for _ in 0..100 {
        let items: Vec<SpaceExpr> = (0..draw(&mut r, 1, 4) as usize)
            .map(|i| random_summand(&mut r, i))
            .collect();
        let p = match draw(&mut r, 0, 2) {
            0 => SumExponent::Zero,
            1 => SumExponent::Finite(rat(3, 2)),
            _ => SumExponent::Finite(rat(2, 1)),
        };
        let mut max = Ordinal::zero();
        for s in &items {
            let v = direct_sum_index(s).map_err(|e| e.to_string())?.verdict;
            max = max.max(v.index().cloned().ok_or("summand reported non-Asplund")?);
        }
        let e = SpaceExpr::Sum(DirectSum {
            p,
            summands: Summands::List(items),
        });
        let got = direct_sum_index(&e).map_err(|e| e.to_string())?.verdict;
        if max.is_power_of_omega() {
            checked += 1;
            if got != Verdict::Index(max.clone()) {
                return Err(format!("{e:?}: got {got}, max {max}"));
            }
        }
    }
    if checked < 50 {
        return Err(format!("only {checked} instances had a power-of-omega maximum"));
    }
    Ok(format!("{checked} of 100 instances with a power-of-omega maximum agree"))
}

fn gate() -> Verdicts {
    let mut r = rng(5);
    let mut not_asplund = 0;
    let mut compact = 0;
    for _ in 0..50 {
        let (norms, c0) = match draw(&mut r, 0, 3) {
            0 => (NormSeq::Const(Rational::zero()), true),
            1 => (NormSeq::Const(rat(draw(&mut r, 1, 4), 2)), false),
            2 => {
                let ratio = rat(draw(&mut r, 1, 4), 4);
                let c0 = ratio < Rational::one();
                (NormSeq::Geometric { first: Rational::one(), ratio }, c0)
            }
            _ => (NormSeq::Harmonic { scale: rat(draw(&mut r, 1, 3), 1) }, true),
        };
        let summands_compact = r.random_bool(0.5);
        let profile = if summands_compact {
            EpsProfile::compact()
        } else {
            EpsProfile::ladder(Ordinal::one(), Ordinal::one(), Rational::one(), rat(1, 2))
        };
        let p = ["1", "inf", "0", "2"][r.random_range(0..4)];
        let extreme = p == "1" || p == "inf";
        let e = SpaceExpr::Sum(DirectSum {
            p: p.parse().expect("valid exponent"),
            summands: Summands::Family(Family {
                name: "T".into(),
                norms,
                profile: FamilyProfile::Uniform(profile),
            }),
        });
        let ev = direct_sum_index(&e).map_err(|e| e.to_string())?;
        let want_na = extreme && !c0;
        let want_compact = summands_compact && c0;
        if (ev.verdict == Verdict::NotAsplund) != want_na || ev.compact != want_compact {
            return Err(format!("{e:?}: verdict {}, compact {}", ev.verdict, ev.compact));
        }
        if want_compact && ev.verdict != Verdict::Index(Ordinal::one()) {
            return Err(format!("{e:?}: compact sum with index {}", ev.verdict));
        }
        not_asplund += want_na as usize;
        compact += want_compact as usize;
    }
    Ok(format!("50 instances ({not_asplund} not Asplund, {compact} compact)"))
}

fn depth_fans() -> Verdicts {
    let mut checked = 0;
    for n in 0..=6usize {
        for w in [rat(1, 2), rat(1, 1), rat(5, 3)] {
            let two_w = &w * rat(2, 1);
            for eps_q in [rat(1, 16), w.clone() / rat(2, 1), w.clone(), &two_w - rat(1, 16)] {
                let set = FanSet::depth_fan(n, QPow::new(w.clone()).expect("positive"));
                let sz = sz_eps(&set, &QPow::new(eps_q.clone()).expect("positive"))
                    .map_err(|e| e.to_string())?;
                let oracle = brute::sz(&set, &eps_q) as u64;
                if sz != Ordinal::nat(n as u64 + 1) || oracle != n as u64 + 1 {
                    return Err(format!("DepthFan({n}, {w}) at {eps_q}: engine {sz}, brute force {oracle}"));
                }
                checked += 1;
            }
            // At the tail diameter itself the apexes die one step early.
            if n > 0 {
                let set = FanSet::depth_fan(n, QPow::new(w.clone()).expect("positive"));
                let sz = sz_eps(&set, &QPow::new(two_w.clone()).expect("positive"))
                    .map_err(|e| e.to_string())?;
                if sz.as_nat() != Some(brute::sz(&set, &two_w) as u64) {
                    return Err(format!("DepthFan({n}, {w}) at the boundary disagrees"));
                }
            }
        }
    }
    Ok(format!("{checked} (n, w, eps) triples match the brute-force expander"))
}

const SUITES: [(&str, u64); 9] = [
    ("unionlemma1", 200),
    ("unionlemma2", 200),
    ("techlem1", 200),
    ("techlem2", 100),
    ("techlema", 100),
    ("tvl", 100),
    ("postdoc2", 50),
    ("lecondsast", 20),
    ("punibound_finite", 100),
];

fn run_suite(name: &str, samples: u64) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_szlenk"))
        .env_remove("SZLENK_LOG")
        .args(["verify", name, "--samples", &samples.to_string(), "--seed", "1"])
        .output()
        .map_err(|e| e.to_string())?;
    match out.status.code() {
        Some(0) | Some(1) => Ok(out.stdout),
        _ => Err(format!("{name}: {}", String::from_utf8_lossy(&out.stderr))),
    }
}

fn lemma_suites(first_runs: &mut Vec<Vec<u8>>) -> Verdicts {
    let mut lines = Vec::new();
    let mut bad = Vec::new();
    for (name, samples) in SUITES {
        let bytes = run_suite(name, samples)?;
        let report: Report = serde_json::from_slice(&bytes).map_err(|e| e.to_string())?;
        let t = report.totals;
        if t.cases as u64 != samples || t.failed != 0 {
            bad.push(format!("{name} {}/{}", t.passed, t.cases));
        }
        if name == "lecondsast" {
            let points: u64 = report
                .cases
                .iter()
                .map(|c| c.input["points"].as_u64().unwrap_or(0))
                .sum();
            if points < 10_000 {
                bad.push(format!("lecondsast sampled only {points} points"));
            }
        }
        lines.push(format!("{name} {}/{}", t.passed, t.cases));
        first_runs.push(bytes);
    }
    if bad.is_empty() {
        Ok(lines.join(", "))
    } else {
        Err(bad.join(", "))
    }
}

fn round_trip(path: &Path, text: &str) -> Result<(), String> {
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or_default();
    let err = |e: String| format!("{name}: {e}");
    if name.starts_with("set_") {
        let doc = FanSetDoc::from_json(text).map_err(|e| err(e.to_string()))?;
        let s = doc.to_json();
        let back = FanSetDoc::from_json(&s).map_err(|e| err(e.to_string()))?;
        if back != doc || back.to_json() != s {
            return Err(err("fan set document changed".into()));
        }
    } else if name.starts_with("space_") {
        let doc = SpaceDoc::from_json(text).map_err(|e| err(e.to_string()))?;
        let s = doc.to_json();
        let back = SpaceDoc::from_json(&s).map_err(|e| err(e.to_string()))?;
        if back != doc || back.to_json() != s {
            return Err(err("space document changed".into()));
        }
    } else if name.starts_with("points_") {
        let pts: Vec<BqPoint> = serde_json::from_str(text).map_err(|e| err(e.to_string()))?;
        let s = serde_json::to_string(&pts).map_err(|e| err(e.to_string()))?;
        let back: Vec<BqPoint> = serde_json::from_str(&s).map_err(|e| err(e.to_string()))?;
        if back != pts {
            return Err(err("point list changed".into()));
        }
    } else {
        return Err(err("unknown document kind".into()));
    }
    Ok(())
}

fn determinism(first_runs: &[Vec<u8>]) -> Verdicts {
    for ((name, samples), first) in SUITES.iter().zip(first_runs) {
        for _ in 0..2 {
            if run_suite(name, *samples)? != *first {
                return Err(format!("{name} report differs between runs"));
            }
        }
    }
    let mut docs = 0;
    let mut entries: Vec<_> = fs::read_dir(data_dir())
        .map_err(|e| e.to_string())?
        .filter_map(Result::ok)
        .map(|e| e.path())
        .collect();
    entries.sort();
    for path in entries {
        let text = fs::read_to_string(&path).map_err(|e| e.to_string())?;
        round_trip(&path, &text)?;
        docs += 1;
    }
    for first in first_runs {
        let r: Report = serde_json::from_slice(first).map_err(|e| e.to_string())?;
        let back: Report =
            serde_json::from_str(&r.to_json()).map_err(|e| e.to_string())?;
        if back != r || back.to_json().as_bytes() != &first[..] {
            return Err("report does not round-trip".into());
        }
        docs += 1;
    }
    if docs < 30 {
        return Err(format!("corpus has only {docs} documents"));
    }
    Ok(format!("{} suites x3 byte-identical; {docs} documents round-trip", first_runs.len()))
}

fn main() -> ExitCode {
    let mut first_runs = Vec::new();
    let mut failed = 0;
    let mut line = |n: usize, title: &str, start: Instant, v: Verdicts| {
        let ms = start.elapsed().as_millis();
        match v {
            Ok(msg) => println!("criterion {n} PASS ({title}): {msg} [{ms} ms]"),
            Err(msg) => {
                failed += 1;
                println!("criterion {n} FAIL ({title}): {msg} [{ms} ms]");
            }
        }
    };
    let t = Instant::now();
    line(1, "sigma and frount", t, sigma_and_frount());
    let t = Instant::now();
    line(2, "C-space table", t, c_space_table());
    let t = Instant::now();
    line(3, "c0-sum counterexample", t, direct_sum_counterexample());
    let t = Instant::now();
    line(4, "finite sums", t, finite_sums());
    let t = Instant::now();
    line(5, "l1/linf gate", t, gate());
    let t = Instant::now();
    line(6, "depth fans vs brute force", t, depth_fans());
    let t = Instant::now();
    let v = lemma_suites(&mut first_runs);
    line(7, "lemma suites", t, v);
    let t = Instant::now();
    let v = determinism(&first_runs);
    line(8, "determinism and round-trip", t, v);
    if failed == 0 {
        println!("acceptance: all 8 criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} criteria failed");
        ExitCode::FAILURE
    }
}
