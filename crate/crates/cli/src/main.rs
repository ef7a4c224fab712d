//! `siegel`: apply operators to expansion files, run verification suites,
//! print weight tables, play with binary quadratic forms, compute defects.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use siegel_core::bqf::{self, Bqf};
use siegel_core::io;
use siegel_core::qexp::expr::{evaluate_expr, parse_expr};
use siegel_core::rootdata::{self, LocalSelmerData, WeightClass};
use siegel_core::verify::{run_suite, Suite};

#[derive(Parser)]
#[command(name = "siegel", version, about = "Siegel q-expansions, quadratic forms and weight tables mod p^m")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Apply a primitive, T/T2/Q2 or an operator expression to an expansion file.
    Apply {
        #[arg(long)]
        op: String,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a verification suite; exits nonzero if any check fails.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 5)]
        p: u64,
        #[arg(long, default_value_t = 20)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the JSON report here as well.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Weight tables.
    Tables {
        #[arg(long, value_enum)]
        table: Table,
        /// Half-open range a..b for the weight entries.
        #[arg(long, default_value = "0..8")]
        range: String,
        #[arg(long, default_value_t = 5)]
        p: u64,
    },
    /// Neighbors, orbit cycle or reduction of a form m,r,n.
    Bqf {
        #[arg(long, allow_hyphen_values = true)]
        form: String,
        #[arg(long, default_value_t = 5)]
        p: u64,
        #[arg(long, value_enum)]
        action: BqfAction,
    },
    /// Tor dimensions, defect and square presentation of a module file.
    Defect {
        #[arg(long)]
        module: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Table {
    Weights,
    Vanishing,
    Serre,
    Selmer,
}

#[derive(Clone, Copy, ValueEnum)]
enum BqfAction {
    Neighbors,
    Orbit,
    Reduce,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.cmd {
        Cmd::Apply { op, input, out } => {
            let f = io::load_expansion(&input)?;
            let e = parse_expr(&op, f.ctx(), f.weight())?;
            let g = evaluate_expr(&e, &f)?;
            io::save_expansion(&g, &out)?;
            println!("wrote {} ({} coefficients, precision {})", out.display(), g.len(), g.precision());
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Verify { suite, p, trials, seed, out } => {
            let suite: Suite = suite.parse()?;
            let report = run_suite(suite, p, trials, seed)?;
            for c in &report.checks {
                println!("{c}");
            }
            if let Some(path) = out {
                let s = serde_json::to_string_pretty(&report)? + "\n";
                std::fs::write(&path, s).with_context(|| path.display().to_string())?;
            }
            Ok(if report.passed() { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
        Cmd::Tables { table, range, p } => {
            let (lo, hi) = parse_range(&range)?;
            for line in tables(table, lo, hi, p)? {
                println!("{line}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Bqf { form, p, action } => {
            let q = parse_form(&form)?;
            println!("{}", serde_json::to_string_pretty(&bqf_action(&q, p, action)?)?);
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Defect { module } => {
            let m = io::load_module(&module)?;
            let t = m.tor_dims();
            let d = m.defect_balanced();
            let pres = m.square_presentation().ok().map(|s| json!({"d": s.d, "ring_dim": s.ring_dim, "relations": s.relations}));
            let out = json!({"t0": t.t0, "t1": t.t1, "defect": d.d, "balanced": d.balanced, "presentation": pres});
            println!("{}", serde_json::to_string_pretty(&out)?);
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn parse_range(s: &str) -> Result<(i64, i64)> {
    let (a, b) = s.split_once("..").context("range must look like a..b")?;
    let (a, b): (i64, i64) = (a.trim().parse()?, b.trim().parse()?);
    if a >= b {
        bail!("empty range {s}");
    }
    Ok((a, b))
}

fn parse_form(s: &str) -> Result<Bqf> {
    let xs: Vec<i64> = s.split(',').map(|x| x.trim().parse()).collect::<std::result::Result<_, _>>().context("form must be m,r,n")?;
    match xs.as_slice() {
        [m, r, n] => Ok(Bqf::new(*m, *r, *n)),
        _ => bail!("form must have three entries, got {s}"),
    }
}

fn set_str(s: &std::collections::BTreeSet<u8>) -> String {
    let items: Vec<String> = s.iter().map(|i| i.to_string()).collect();
    format!("{{{}}}", items.join(","))
}

fn tables(table: Table, lo: i64, hi: i64, p: u64) -> Result<Vec<String>> {
    let mut out = Vec::new();
    match table {
        Table::Weights => {
            out.push("a,b,class,chambers,lds_family".into());
            for a in lo..hi {
                for b in lo..hi {
                    let info = rootdata::chamber_classify(a, b);
                    let class = match info.class {
                        WeightClass::Regular => "regular",
                        WeightClass::Lds => "lds",
                        WeightClass::Degenerate => "degenerate",
                    };
                    let ch: Vec<String> = info.chambers.iter().map(|c| format!("{c:?}")).collect();
                    let fam = rootdata::lds_family(a, b).map(|f| f.to_string()).unwrap_or_default();
                    out.push(format!("{a},{b},{class},{},{fam}", ch.join(" ")));
                }
            }
        }
        Table::Vanishing => {
            out.push(format!("a,b,vanishing_degrees (p = {p})"));
            for a in lo..hi {
                for b in lo..=a.min(hi - 1) {
                    out.push(format!("{a},{b},{}", set_str(&rootdata::lan_suh_vanishing(a, b, p))));
                }
            }
        }
        Table::Serre => {
            out.push("a,b,dual_a,dual_b,fixed".into());
            for a in lo..hi {
                for b in lo..=a.min(hi - 1) {
                    let (da, db) = rootdata::serre_dual_weight(a, b);
                    out.push(format!("{a},{b},{da},{db},{}", (da, db) == (a, b)));
                }
            }
        }
        Table::Selmer => {
            let data = LocalSelmerData::STANDARD;
            out.push("dual_dim,n_q,tangent_dim,ledger".into());
            for dual in lo.max(0)..hi {
                for n_q in lo.max(0)..hi {
                    let t = rootdata::gw_tangent_dim(dual, n_q)?;
                    out.push(format!("{dual},{n_q},{t},{}", rootdata::gw_ledger(dual, n_q, &data)));
                }
            }
        }
    }
    Ok(out)
}

fn bqf_action(q: &Bqf, p: u64, action: BqfAction) -> Result<serde_json::Value> {
    Ok(match action {
        BqfAction::Neighbors => {
            let nb = bqf::neighbors(q, p);
            json!({"form": q.to_string(), "p": p, "neighbors": nb})
        }
        BqfAction::Orbit => {
            let o = bqf::orbit_cycle(q, p)?;
            let ps = (p as i128).pow(o.s);
            let target = (ps * q.m as i128, ps * q.r as i128, ps * q.n as i128);
            let ok = [o.a, o.b].iter().all(|a| a.det() == ps && bqf::conjugate(a, q) == target);
            if !ok {
                bail!("orbit matrices for {q} fail A Q A^T = p^s Q");
            }
            json!({"form": q.to_string(), "p": p, "s": o.s, "a": o.a, "b": o.b, "identity_checked": ok})
        }
        BqfAction::Reduce => {
            let (r, g) = bqf::reduce_form(q)?;
            json!({"form": q.to_string(), "reduced": r.to_string(), "matrix": g})
        }
    })
}
