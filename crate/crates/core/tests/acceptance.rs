//! Acceptance run: every criterion at its stated size and time limit, one
//! PASS/FAIL line each. Exits non-zero if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use gapforge::bounds::dcd2_check;
use gapforge::debruijn::{verify_sequence, window_sequence};
use gapforge::extremal::{ratio_main2, sharp_pair, subset_sharp_example};
use gapforge::numeric::{certify, e_bracket, resolve_alpha, AlphaSpec, Rat};
use gapforge::sets::has_distinct_consecutive_r_diffs;
use gapforge::sidon::mian_chowla;
use gapforge::sweep::{run_sweep, Suite, SweepConfig, SweepReport};
use gapforge::threegap::{breakpoint_soundness, breakpoint_table, neighbor_frame, orbit};

const SEED: u64 = 0x5eed_2025;

type Outcome = Result<String, String>;

/// id, name, time limit, check
type Criterion = (u32, &'static str, Duration, fn() -> Outcome);

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

/// Every trial ran and passed.
fn sweep_clean(rep: &SweepReport) -> Result<(), String> {
    if let Some(f) = rep.failures().next() {
        return Err(format!(
            "{} of {} trials failed; first: trial {} {} {}",
            rep.failed,
            rep.trials,
            f.index,
            f.note.clone().unwrap_or_default(),
            serde_json::to_string(&f.witness).unwrap_or_default()
        ));
    }
    ensure(rep.skipped == 0, format!("{} trials skipped", rep.skipped))
}

fn sweep(suite: Suite, trials: u64, adjust: impl FnOnce(&mut SweepConfig)) -> Result<SweepReport, String> {
    let mut cfg = SweepConfig::new(suite, trials, SEED);
    adjust(&mut cfg);
    run_sweep(&cfg).map_err(|e| e.to_string())
}

fn c1_example() -> Outcome {
    let spec: AlphaSpec = "dec:0.301029995663981:15".parse().map_err(|e| format!("{e}"))?;
    let alpha = resolve_alpha(&spec, 100).map_err(|e| e.to_string())?;
    let o = orbit(&alpha, 100).map_err(|e| e.to_string())?;
    let frame = neighbor_frame(&o, 3).map_err(|e| e.to_string())?;
    ensure(frame.left == [74, 84, 94], format!("L = {:?}", frame.left))?;
    ensure(frame.right == [11, 21, 31], format!("R = {:?}", frame.right))?;
    let table = breakpoint_table(&o, 3).map_err(|e| e.to_string())?;
    ensure(table.breakpoints == [1, 71, 74, 81, 84, 91, 94], format!("breakpoints {:?}", table.breakpoints))?;
    let want = vec![(1, 70), (71, 73), (74, 80), (81, 83), (84, 90), (91, 93), (94, 100)];
    ensure(table.intervals() == want, format!("intervals {:?}", table.intervals()))?;
    ensure(breakpoint_soundness(&o, &table).holds, "lookup disagrees with direct d_3")?;
    Ok(format!("alpha = {alpha}, breakpoints {:?}", table.breakpoints))
}

fn c2_steinhaus() -> Outcome {
    let rep = sweep(Suite::Steinhaus, 500, |c| {
        c.caps.n = 3000;
        c.caps.r = 5;
    })?;
    sweep_clean(&rep)?;
    Ok(format!("{} trials, max |D_r| = {}", rep.passed, rep.summary_f64("max_distinct").unwrap_or(f64::NAN)))
}

fn c3_breakpoints() -> Outcome {
    let rep = sweep(Suite::Breakpoint, 100, |c| {
        c.caps.n = 2000;
        c.caps.r = 4;
    })?;
    sweep_clean(&rep)?;
    Ok(format!(
        "{} tables, {} labels checked at most per table",
        rep.passed,
        rep.summary_f64("max_checked").unwrap_or(0.0)
    ))
}

fn c4_sequences() -> Outcome {
    let mut cases = 0;
    for m in 2..=6usize {
        for r in 1..=4usize {
            let k = m * (m - 1).pow(r as u32);
            if k > 10_000 {
                continue;
            }
            let alphabet: Vec<i64> = (1..=m as i64).collect();
            let seq = window_sequence(&alphabet, r).map_err(|e| e.to_string())?;
            let rep = verify_sequence(&seq.symbols, &alphabet, r);
            ensure(rep.all_pass(), format!("|S| = {m}, r = {r}: {rep:?}"))?;
            ensure(seq.len() == k, format!("|S| = {m}, r = {r}: length {} != {k}", seq.len()))?;
            cases += 1;
        }
    }
    Ok(format!("{cases} (|S|, r) pairs"))
}

fn c5_sharpness() -> Outcome {
    let four = Rat::from(4i64);
    let mut cases = 0;
    let mut lowest = f64::INFINITY;
    for size in 4..=10usize {
        for r in 1..=3usize {
            let k = size * (size - 1).pow(r as u32);
            if k > 10_000 {
                continue;
            }
            let sidon = mian_chowla(size);
            let p = sharp_pair(&sidon, r).map_err(|e| e.to_string())?;
            let tag = format!("|S| = {size}, r = {r}");
            ensure(p.k == k, format!("{tag}: k = {}", p.k))?;
            ensure(has_distinct_consecutive_r_diffs(&p.a, r).unwrap_or(false), format!("{tag}: repeated window"))?;
            ensure(p.sumset_size <= 2 * k * size, format!("{tag}: |A+B| = {} > 2k|S|", p.sumset_size))?;
            // (2e)^{-r} <= ratio  <=>  (2e)^r |A+B| >= |A| |B|^{1/(r+1)}
            let lower = certify(|bits| {
                let ratio = ratio_at(&p, r, bits);
                let c = e_bracket(bits).scale(&Rat::from(2i64)).powi(r as u32).recip();
                if ratio.lo >= c.hi {
                    Some(true)
                } else if ratio.hi < c.lo {
                    Some(false)
                } else {
                    None
                }
            })
            .map_err(|e| e.to_string())?;
            ensure(lower, format!("{tag}: ratio below (2e)^-r"))?;
            let upper = certify(|bits| ratio_at(&p, r, bits).le(&four)).map_err(|e| e.to_string())?;
            ensure(upper, format!("{tag}: ratio above 4"))?;
            lowest = lowest.min(ratio_main2(&p.a, &p.b, r).approx());
            cases += 1;
        }
    }
    Ok(format!("{cases} pairs, smallest ratio {lowest:.4}"))
}

fn ratio_at(p: &gapforge::extremal::PlanarPair, r: usize, bits: u32) -> gapforge::Bracket {
    gapforge::bounds::main2_ratio(p.sumset_size, p.a.len(), p.b.len(), r, bits)
}

fn c6_dcd() -> Outcome {
    let rep = sweep(Suite::Dcd, 1000, |c| {
        c.caps.k = 200;
        c.caps.l = 50;
        c.caps.r = 3;
    })?;
    sweep_clean(&rep)?;
    Ok(format!("{} trials, max lhs/rhs = {:.4}", rep.passed, rep.summary_f64("max_ratio").unwrap_or(f64::NAN)))
}

fn c7_dcd2() -> Outcome {
    let rep = sweep(Suite::Dcd2, 300, |c| c.caps.r = 3)?;
    sweep_clean(&rep)?;
    let mut floor = f64::INFINITY;
    let mut cases = 0;
    for m in 2..=5 {
        for r in 1..=3 {
            let ex = subset_sharp_example(m, r).map_err(|e| e.to_string())?;
            let check = dcd2_check(&ex.a, &ex.b, r).map_err(|e| e.to_string())?;
            ensure(check.holds, format!("m = {m}, r = {r}: bound fails"))?;
            cases += 1;
            if ex.a.len() > r {
                floor = floor.min(check.ratio.approx());
            }
        }
    }
    Ok(format!("{} random, {cases} sharp instances; sharp ratio floor {floor:.4}", rep.passed))
}

fn c8_returning() -> Outcome {
    let rep = sweep(Suite::Returning, 200, |c| {
        c.caps.q = 10_000;
        c.caps.t_max = 100_000;
        c.caps.r = 4;
    })?;
    sweep_clean(&rep)?;
    let with_d2 = rep.records.iter().filter(|t| !t.metrics["d2_case"].is_null()).count();
    Ok(format!("{} trials, {with_d2} with a d2 case", rep.passed))
}

fn c9_duality() -> Outcome {
    let rep = sweep(Suite::Duality, 100, |c| {
        c.caps.q = 1000;
        c.caps.r = 3;
    })?;
    sweep_clean(&rep)?;
    let literal = rep.summary.get("count_unrotated_equal").and_then(|v| v.as_u64()).unwrap_or(0);
    Ok(format!("{} trials; unrotated identity held in {literal}", rep.passed))
}

fn c10_reversal() -> Outcome {
    let rep = sweep(Suite::Reversal, 100, |c| c.caps.n = 2000)?;
    sweep_clean(&rep)?;
    Ok(format!("{} orbits", rep.passed))
}

fn c11_multishift_multidim() -> Outcome {
    let shifts = sweep(Suite::Multishift, 100, |_| {})?;
    sweep_clean(&shifts)?;
    let dims = sweep(Suite::Multidim, 100, |_| {})?;
    sweep_clean(&dims)?;
    let floor = dims.summary_f64("min_ratio").unwrap_or(0.0);
    ensure(floor > 0.0, "multidim ratio floor not positive")?;
    Ok(format!("{} multishift, {} multidim; ratio floor {floor:.4}", shifts.passed, dims.passed))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        (1, "log10(2) breakpoint example", Duration::from_secs(1), c1_example),
        (2, "generalized Steinhaus sweep", Duration::from_secs(60), c2_steinhaus),
        (3, "breakpoint soundness", Duration::from_secs(120), c3_breakpoints),
        (4, "repetition-free sequences", Duration::from_secs(30), c4_sequences),
        (5, "sharp pairs", Duration::from_secs(120), c5_sharpness),
        (6, "counting inequality", Duration::from_secs(60), c6_dcd),
        (7, "subset bound", Duration::from_secs(60), c7_dcd2),
        (8, "returning times", Duration::from_secs(180), c8_returning),
        (9, "rational duality", Duration::from_secs(30), c9_duality),
        (10, "reversal symmetry", Duration::from_secs(30), c10_reversal),
        (11, "multi-shift and multidim", Duration::from_secs(60), c11_multishift_multidim),
    ];
    let mut failed = 0;
    for (id, name, limit, run) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".to_string()));
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > limit => Err(format!("{detail}; exceeded {:.0?} limit", limit)),
            other => other,
        };
        let (status, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {id:>2} {status} {name}: {detail} [{:.2}s]", elapsed.as_secs_f64());
    }
    println!("{} of 11 criteria passed", 11 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
