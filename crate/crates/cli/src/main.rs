//! `gapforge` command line. Every command writes one JSON report tagged with
//! the report schema. Exit status: 0 when every check passes, 1 when a check
//! fails, 2 on usage or input errors.

mod input;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use gapforge::bounds::{dcd2_check, dcd_counting_check, fp_check, main2_check};
use gapforge::debruijn::{verify_sequence, window_sequence};
use gapforge::extremal::{ratio_main2, self_sumset_report, sharp_pair, subset_sharp_example};
use gapforge::numeric::{resolve_alpha, AlphaSpec, Rat};
use gapforge::returning::{
    d1_partition, d2_partition, duality_check, empirical_r_diffs, match_partition, returning_times, slater_pair,
};
use gapforge::sets::SortedSet;
use gapforge::sidon::{is_sidon, mian_chowla};
use gapforge::sweep::{run_sweep, run_trial, Suite, SweepConfig, SweepReport, REPORT_SCHEMA};
use gapforge::threegap::{
    breakpoint_soundness, breakpoint_table, cyclic_r_diffs, neighbor_frame, orbit, reversal_check,
};
use serde_json::{json, Value};

use crate::input::{as_integers, read_alphabet, read_set};
use crate::output::{envelope, sweep_csv, write_json, write_text};

#[derive(Parser)]
#[command(name = "gapforge", version, about = "Gap structure of sumsets, orbits and returning times")]
struct Cli {
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Sequence with distinct cyclic (r+1)-windows and no equal neighbours.
    Debruijn {
        /// Alphabet size m (meaning 1..=m) or a set.
        #[arg(long)]
        alphabet: String,
        #[arg(long)]
        r: usize,
    },
    /// Greedy Sidon set, or a Sidon test of a given set.
    Sidon {
        #[arg(long, required_unless_present = "check")]
        n: Option<usize>,
        #[arg(long)]
        check: Option<String>,
    },
    /// Sharp pairs for the sumset lower bounds.
    Extremal {
        /// Size of the Sidon set the planar pair is built from.
        #[arg(long, required_unless_present = "m")]
        sidon_size: Option<usize>,
        /// Build the subset example over the alphabet 1..=m instead.
        #[arg(long, conflicts_with = "sidon_size")]
        m: Option<usize>,
        #[arg(long)]
        r: usize,
        /// Also write A and B to this file.
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// r-differences of the orbit {n alpha}, 1 <= n <= N.
    Threegap {
        /// `p/q`, `cf:[a0,a1,...]`, or `dec:VALUE:DIGITS`.
        #[arg(long, required_unless_present = "sweep")]
        alpha: Option<String>,
        #[arg(long, default_value_t = 100)]
        n: u64,
        #[arg(long, default_value_t = 1)]
        r: usize,
        /// Include the neighbour frame and breakpoint table.
        #[arg(long)]
        table: bool,
        /// Run the random steinhaus and breakpoint suites instead.
        #[arg(long)]
        sweep: bool,
        #[arg(long, default_value_t = 100)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Returning times of {t theta} to [0, phi).
    Returning {
        #[arg(long)]
        theta: String,
        #[arg(long)]
        phi: String,
        #[arg(long, default_value_t = 1)]
        r: usize,
        #[arg(long, default_value_t = 100_000)]
        tmax: u64,
    },
    /// Orbit/returning-time duality for alpha = p/q.
    Duality {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        r: usize,
    },
    /// Seeded random verification sweep, or a single check on given sets.
    Verify(VerifyArgs),
}

#[derive(clap::Args)]
struct VerifyArgs {
    #[arg(long)]
    suite: String,
    #[arg(long, default_value_t = 100)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Alias of --out.
    #[arg(long)]
    json: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Rerun one trial by index.
    #[arg(long)]
    replay: Option<u64>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    l: Option<usize>,
    #[arg(long)]
    n: Option<u64>,
    #[arg(long)]
    tmax: Option<u64>,
    #[arg(long)]
    r: Option<usize>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    q: Option<u64>,
    /// Check this A instead of sampling (requires --b).
    #[arg(long, requires = "b")]
    a: Option<String>,
    #[arg(long, requires = "a")]
    b: Option<String>,
}

/// Finished command: the verdict and what to print.
struct Report {
    pass: bool,
    text: String,
}

impl Report {
    fn json(command: &str, pass: bool, payload: Value) -> Result<Report> {
        let mut text = serde_json::to_string_pretty(&envelope(command, pass, payload))?;
        text.push('\n');
        Ok(Report { pass, text })
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = cli.out.clone();
    if let Command::Verify(v) = &cli.command {
        out = out.or_else(|| v.json.clone());
    }
    match run(cli.command).and_then(|rep| write_text(out.as_deref(), &rep.text).map(|_| rep.pass)) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<Report> {
    match command {
        Command::Debruijn { alphabet, r } => debruijn(&alphabet, r),
        Command::Sidon { n, check } => sidon(n, check.as_deref()),
        Command::Extremal { sidon_size, m, r, emit } => extremal(sidon_size, m, r, emit),
        Command::Threegap { alpha, n, r, table, sweep, trials, seed } => {
            if sweep {
                threegap_sweep(n, r, trials, seed)
            } else {
                threegap(alpha.as_deref().expect("clap enforces --alpha"), n, r, table)
            }
        }
        Command::Returning { theta, phi, r, tmax } => returning(&theta, &phi, r, tmax),
        Command::Duality { p, q, n, r } => {
            let rep = duality_check(p, q, n, r)?;
            Report::json("duality", rep.holds, serde_json::to_value(rep)?)
        }
        Command::Verify(v) => verify(v),
    }
}

fn debruijn(alphabet: &str, r: usize) -> Result<Report> {
    let alphabet = read_alphabet(alphabet)?;
    let seq = window_sequence(&alphabet, r)?;
    let check = verify_sequence(&seq.symbols, &alphabet, r);
    Report::json(
        "debruijn",
        check.all_pass(),
        json!({ "r": r, "alphabet": alphabet, "length": seq.len(), "sequence": seq.symbols, "verification": check }),
    )
}

fn sidon(n: Option<usize>, check: Option<&str>) -> Result<Report> {
    if let Some(arg) = check {
        let set = as_integers(&read_set(arg)?).context("Sidon sets hold integers")?;
        let collision = is_sidon(&set).err();
        return Report::json("sidon", collision.is_none(), json!({ "set": set, "collision": collision }));
    }
    let set = mian_chowla(n.expect("clap enforces --n"));
    let pass = is_sidon(set.as_slice()).is_ok();
    Report::json("sidon", pass, json!({ "set": set }))
}

fn extremal(sidon_size: Option<usize>, m: Option<usize>, r: usize, emit: Option<PathBuf>) -> Result<Report> {
    let (a, b, payload, pass) = if let Some(m) = m {
        let ex = subset_sharp_example(m, r)?;
        let check = dcd2_check(&ex.a, &ex.b, r)?;
        let payload = json!({
            "mode": "subset",
            "m": m,
            "r": r,
            "sequence": ex.sequence,
            "a_len": ex.a.len(),
            "b_len": ex.b.len(),
            "bound": check,
        });
        (ex.a, ex.b, payload, check.holds)
    } else {
        let size = sidon_size.expect("clap enforces --sidon-size");
        let sidon = mian_chowla(size);
        let pair = sharp_pair(&sidon, r)?;
        let ratio = ratio_main2(&pair.a, &pair.b, r);
        let pass = pair.sumset_size <= pair.sumset_cap();
        let payload = json!({
            "mode": "planar",
            "sidon": pair.sidon,
            "r": r,
            "k": pair.k,
            "modulus": pair.modulus,
            "a_len": pair.a.len(),
            "b_len": pair.b.len(),
            "sumset_size": pair.sumset_size,
            "planar_sumset_size": pair.planar_sumset_size,
            "sumset_cap": pair.sumset_cap(),
            "ratio": ratio,
            "ratio_approx": ratio.approx(),
            "self_sumset": self_sumset_report(&pair.a, &pair.b, r),
        });
        (pair.a, pair.b, payload, pass)
    };
    if let Some(path) = &emit {
        write_json(Some(path), &json!({ "schema": REPORT_SCHEMA, "r": r, "a": a, "b": b }))?;
    }
    Report::json("extremal", pass, payload)
}

fn parse_alpha(spec: &str, n: u64) -> Result<(AlphaSpec, Rat)> {
    let spec: AlphaSpec = spec.parse().with_context(|| format!("bad alpha `{spec}`"))?;
    let alpha = resolve_alpha(&spec, n)?;
    Ok((spec, alpha))
}

fn threegap(alpha: &str, n: u64, r: usize, table: bool) -> Result<Report> {
    let (spec, alpha) = parse_alpha(alpha, n)?;
    let o = orbit(&alpha, n)?;
    let tuples = cyclic_r_diffs(&o, r)?;
    let bound = if r == 1 { 3 } else { 2 * r + 1 };
    let reversal = reversal_check(&o);
    let mut pass = tuples.len() <= bound && reversal.holds;
    let mut payload = json!({
        "alpha_spec": spec,
        "alpha": alpha,
        "n": n,
        "r": r,
        "distinct": tuples.len(),
        "bound": bound,
        "tuples": tuples,
        "reversal": reversal,
    });
    if table {
        let frame = neighbor_frame(&o, r)?;
        let t = breakpoint_table(&o, r)?;
        let sound = breakpoint_soundness(&o, &t);
        pass &= sound.holds;
        let intervals: Vec<Value> = t
            .intervals()
            .into_iter()
            .zip(&t.tuples)
            .map(|((lo, hi), tuple)| json!({ "from": lo, "to": hi, "tuple": tuple }))
            .collect();
        payload["frame"] = serde_json::to_value(&frame)?;
        payload["breakpoints"] = serde_json::to_value(&t.breakpoints)?;
        payload["intervals"] = Value::Array(intervals);
        payload["soundness"] = serde_json::to_value(&sound)?;
    }
    Report::json("threegap", pass, payload)
}

fn threegap_sweep(n: u64, r: usize, trials: u64, seed: u64) -> Result<Report> {
    let mut reports = Vec::new();
    for suite in [Suite::Steinhaus, Suite::Breakpoint] {
        let mut cfg = SweepConfig::new(suite, trials, seed);
        cfg.caps.n = n;
        cfg.caps.r = r;
        reports.push(run_sweep(&cfg)?);
    }
    let pass = reports.iter().all(SweepReport::all_pass);
    Report::json("threegap", pass, json!({ "sweeps": reports }))
}

fn returning(theta: &str, phi: &str, r: usize, tmax: u64) -> Result<Report> {
    let theta: Rat = theta.parse().with_context(|| format!("bad theta `{theta}`"))?;
    let phi: Rat = phi.parse().with_context(|| format!("bad phi `{phi}`"))?;
    let pair = slater_pair(&theta, &phi)?;
    let ret = returning_times(&theta, &phi, tmax)?;
    let d1 = d1_partition(&pair);
    let d1_match = match_partition(&ret, &d1);
    let mut pass = pair.invariants_hold && d1_match.holds();
    let d2 = match d2_partition(&pair) {
        Ok((case, part)) => {
            let m = match_partition(&ret, &part);
            pass &= m.holds();
            json!({ "case": case, "partition": part, "match": m })
        }
        Err(e) => json!({ "case": null, "note": e.to_string() }),
    };
    let diffs = empirical_r_diffs(&ret, r)?;
    pass &= diffs.holds;
    Report::json(
        "returning",
        pass,
        json!({
            "theta": theta,
            "phi": phi,
            "t_max": tmax,
            "returns": ret.times.len(),
            "boundary_hits": ret.boundary_hits,
            "slater": pair,
            "d1": { "partition": d1, "match": d1_match },
            "d2": d2,
            "r_diffs": diffs,
        }),
    )
}

fn verify(v: VerifyArgs) -> Result<Report> {
    let suite: Suite = v.suite.parse()?;
    let mut cfg = SweepConfig::new(suite, v.trials, v.seed);
    let c = &mut cfg.caps;
    c.k = v.k.unwrap_or(c.k);
    c.l = v.l.unwrap_or(c.l);
    c.n = v.n.unwrap_or(c.n);
    c.t_max = v.tmax.unwrap_or(c.t_max);
    c.r = v.r.unwrap_or(c.r);
    c.d = v.d.unwrap_or(c.d);
    c.q = v.q.unwrap_or(c.q);
    cfg.validate()?;
    if let (Some(a), Some(b)) = (&v.a, &v.b) {
        return verify_sets(suite, a, b, &cfg);
    }
    if let Some(index) = v.replay {
        if index >= cfg.trials {
            bail!("replay index {index} outside 0..{}", cfg.trials);
        }
        let record = run_trial(&cfg, index);
        let pass = record.status != gapforge::sweep::Status::Fail;
        return Report::json("verify", pass, json!({ "config": cfg, "record": record }));
    }
    let report = run_sweep(&cfg)?;
    let pass = report.all_pass();
    match v.format {
        Format::Csv => Ok(Report { pass, text: sweep_csv(std::slice::from_ref(&report))? }),
        Format::Json => Report::json("verify", pass, serde_json::to_value(&report)?),
    }
}

fn verify_sets(suite: Suite, a: &str, b: &str, cfg: &SweepConfig) -> Result<Report> {
    let a = read_set(a)?;
    let b = read_set(b)?;
    let r = cfg.caps.r;
    let (pass, result) = match suite {
        Suite::Fp => {
            let ints = |s: &[Rat]| as_integers(s).context("fp sets hold integers");
            let rep = fp_check(&ints(&a)?, &ints(&b)?, cfg.caps.q, r)?;
            (rep.holds(), serde_json::to_value(&rep)?)
        }
        Suite::Dcd | Suite::Main2 | Suite::Dcd2 => {
            let sa = SortedSet::from_unsorted(a);
            let sb = SortedSet::from_unsorted(b);
            match suite {
                Suite::Dcd => {
                    let rep = dcd_counting_check(&sa, &sb, r)?;
                    (rep.holds(), serde_json::to_value(&rep)?)
                }
                Suite::Main2 => {
                    let rep = main2_check(&sa, &sb, r)?;
                    (rep.holds, serde_json::to_value(&rep)?)
                }
                _ => {
                    let rep = dcd2_check(&sa, &sb, r)?;
                    (rep.holds, serde_json::to_value(&rep)?)
                }
            }
        }
        other => bail!("suite `{other}` does not take --a/--b; use dcd, main2, dcd2 or fp"),
    };
    Report::json("verify", pass, json!({ "suite": suite, "r": r, "result": result }))
}
