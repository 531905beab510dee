//! Command-line front end. Output goes to a caller-supplied writer so the
//! whole surface can be driven in-process.
//!
//! Exit codes: 0 success, 1 a verified property failed, 2 invalid input,
//! 3 factorization budget exhausted, 4 capacity limit.

use std::io::{self, Write};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::arith::FactorBudget;
use crate::classify::{classify_with, ClassificationReport, Witness};
use crate::error::{Error, Result};
use crate::order::{coset_partition, order_profile_with};
use crate::repunit::{make_repunit, stepwise_factor, StepwiseStatus};
use crate::search::{
    compose_over_psp_with, enumerate_over_psp_with, order_table, order_table_bfile, search_bfile, write_bfile,
    ComposeOptions,
};
use crate::verify::{self, Suite};
use crate::wieferich::{scan_wieferich, wieferich_order_capped, DEFAULT_MAX_ORDER};

pub const BUDGET_ENV: &str = "OPPK_BUDGET";

/// Default ceiling for `repunit --factor`; covers the full square-root
/// scan of every repunit below 2^64.
pub const DEFAULT_FACTOR_BOUND: u128 = 1 << 32;

#[derive(Debug, Parser)]
#[command(name = "oppk", version, about = "Overpseudoprimes, multiplicative orders and Wieferich primes")]
pub struct Cli {
    /// Base a.
    #[arg(long, global = true, default_value_t = 2)]
    pub base: u128,
    /// Emit JSON lines instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Worker threads; 0 lets rayon decide.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fermat, strong, super and overpseudoprime verdicts for n.
    Classify { n: u128 },
    /// Order profile of n, or a table of orders of successive odd moduli.
    Order {
        n: Option<u128>,
        /// Number of table entries (moduli 1, 3, 5, ...).
        #[arg(long, conflicts_with = "n")]
        table: Option<u64>,
        /// Print the table as a b-file.
        #[arg(long, requires = "table")]
        bfile: bool,
    },
    /// Orbits of x -> a x on 1..n-1.
    Cosets {
        #[arg(long)]
        modulus: u128,
    },
    /// Wieferich primes up to --max-p, or the order of a single prime.
    Wieferich {
        #[arg(long, required_unless_present = "prime")]
        max_p: Option<u128>,
        #[arg(long, conflicts_with = "max_p")]
        prime: Option<u128>,
        #[arg(long, default_value_t = DEFAULT_MAX_ORDER)]
        max_order: u32,
    },
    /// (a^p - 1)/(a - 1), optionally factored through its order-p divisors.
    Repunit {
        #[arg(long)]
        exponent: u128,
        #[arg(long)]
        factor: bool,
        /// Largest candidate divisor tried by --factor.
        #[arg(long, default_value_t = DEFAULT_FACTOR_BOUND)]
        bound: u128,
    },
    /// Overpseudoprimes below --limit, or products of primes sharing the
    /// order --compose.
    Search {
        #[arg(long, required_unless_present = "compose")]
        limit: Option<u128>,
        #[arg(long, conflicts_with = "compose")]
        bfile: bool,
        /// Target order h for composition.
        #[arg(long, conflicts_with = "limit", requires = "pool_bound")]
        compose: Option<u128>,
        #[arg(long)]
        pool_bound: Option<u128>,
        #[arg(long)]
        with_powers: bool,
        #[arg(long, default_value_t = 20)]
        max_pool: usize,
    },
    /// Rerun worked examples or sweep identities over a range.
    Verify {
        #[arg(long, value_enum)]
        suite: SuiteArg,
        #[arg(long)]
        limit: Option<u128>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    Examples,
    Theorems,
}

/// Parses an `OPPK_BUDGET` value (rho iterations per factorization).
pub fn parse_budget(value: Option<&str>) -> Result<FactorBudget> {
    match value {
        Some(v) => v
            .trim()
            .parse()
            .map(FactorBudget::new)
            .map_err(|_| Error::InvalidInput(format!("{BUDGET_ENV} must be a non-negative integer, got {v:?}"))),
        None => Ok(FactorBudget::default()),
    }
}

/// Parses `args`, runs the command and returns the exit code. Diagnostics go
/// to `err`.
pub fn main_with<I, T, W, E>(args: I, out: &mut W, err: &mut E) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
    W: Write + Send,
    E: Write,
{
    let budget = std::env::var(BUDGET_ENV).ok();
    main_with_budget(args, budget.as_deref(), out, err)
}

/// [`main_with`] with the budget variable passed in rather than read from
/// the environment.
pub fn main_with_budget<I, T, W, E>(args: I, budget: Option<&str>, out: &mut W, err: &mut E) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
    W: Write + Send,
    E: Write,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return code;
        }
    };
    let result = parse_budget(budget).and_then(|budget| {
        if cli.threads == 0 {
            execute(&cli, budget, out)
        } else {
            rayon::ThreadPoolBuilder::new()
                .num_threads(cli.threads)
                .build()
                .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?
                .install(|| execute(&cli, budget, out))
        }
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn io_err(e: io::Error) -> Error {
    Error::Capacity(format!("write failed: {e}"))
}

fn emit_json<W: Write, T: Serialize>(out: &mut W, value: &T) -> Result<()> {
    let line = serde_json::to_string(value).map_err(|e| Error::InvalidInput(e.to_string()))?;
    writeln!(out, "{line}").map_err(io_err)
}

fn require_base(a: u128) -> Result<()> {
    if a < 2 {
        return Err(Error::InvalidInput("base must be at least 2".into()));
    }
    Ok(())
}

/// Runs a parsed command.
pub fn execute<W: Write>(cli: &Cli, budget: FactorBudget, out: &mut W) -> Result<i32> {
    let a = cli.base;
    let json = cli.json;
    match &cli.command {
        Command::Classify { n } => {
            let report = classify_with(*n, a, budget)?;
            if json {
                emit_json(out, &report)?;
            } else {
                write_report(out, &report).map_err(io_err)?;
            }
        }
        Command::Order { n, table, bfile } => match (n, table) {
            (_, Some(count)) => {
                let entries = order_table(a, *count)?;
                if *bfile {
                    write_bfile(out, order_table_bfile(&entries)).map_err(io_err)?;
                } else if json {
                    for e in &entries {
                        emit_json(out, e)?;
                    }
                } else {
                    for e in &entries {
                        let order = e.order.map_or("-".to_string(), |h| h.to_string());
                        writeln!(out, "{} {} {order}", e.index, e.modulus).map_err(io_err)?;
                    }
                }
            }
            (Some(n), None) => {
                let profile = order_profile_with(a, *n, budget)?;
                if json {
                    emit_json(out, &profile)?;
                } else {
                    writeln!(out, "n={} base={a} h={} r={}", profile.modulus, profile.h, profile.r).map_err(io_err)?;
                    writeln!(out, "factorization={}", profile.factorization).map_err(io_err)?;
                    for t in &profile.prime_power_orders {
                        writeln!(out, "h({}^{})={}", t.prime, t.exponent, t.order).map_err(io_err)?;
                    }
                }
            }
            (None, None) => return Err(Error::InvalidInput("give n or --table".into())),
        },
        Command::Cosets { modulus } => {
            let p = coset_partition(a, *modulus)?;
            if json {
                emit_json(out, &p)?;
            } else {
                write!(out, "{p}").map_err(io_err)?;
                writeln!(out, "r={} h={}", p.count(), p.lcm_of_sizes()).map_err(io_err)?;
            }
        }
        Command::Wieferich {
            max_p,
            prime,
            max_order,
        } => {
            let records = match (prime, max_p) {
                (Some(p), _) => vec![wieferich_order_capped(*p, a, *max_order)?],
                (None, Some(m)) => scan_wieferich(a, *m)?,
                (None, None) => return Err(Error::InvalidInput("give --max-p or --prime".into())),
            };
            for r in &records {
                if json {
                    emit_json(out, r)?;
                } else {
                    writeln!(out, "{} {}", r.p, r.order_w).map_err(io_err)?;
                }
            }
        }
        Command::Repunit {
            exponent,
            factor,
            bound,
        } => {
            require_base(a)?;
            if !*factor {
                let r = make_repunit(a, *exponent)?;
                if json {
                    emit_json(
                        out,
                        &json!({"base": a, "exponent": exponent, "value": r.value.to_string()}),
                    )?;
                } else {
                    writeln!(out, "{}", r.value).map_err(io_err)?;
                }
                return Ok(0);
            }
            let s = stepwise_factor(a, *exponent, *bound)?;
            let cofactor = match &s.status {
                StepwiseStatus::Complete => None,
                StepwiseStatus::Inconclusive { cofactor } => Some(cofactor.to_string()),
            };
            if json {
                let factors: Vec<_> = s.factors.iter().map(|(q, e)| json!([q.to_string(), e])).collect();
                emit_json(
                    out,
                    &json!({
                        "base": a,
                        "exponent": exponent,
                        "value": s.repunit.value.to_string(),
                        "factors": factors,
                        "complete": s.is_complete(),
                        "unresolved_cofactor": cofactor,
                        "scanned_to": s.scanned_to,
                    }),
                )?;
            } else {
                writeln!(out, "{} = {s}", s.repunit.value).map_err(io_err)?;
                if !s.is_complete() {
                    writeln!(out, "# inconclusive: no divisor found up to {}", s.scanned_to).map_err(io_err)?;
                }
            }
        }
        Command::Search {
            limit,
            bfile,
            compose,
            pool_bound,
            with_powers,
            max_pool,
        } => {
            if let Some(h) = compose {
                let options = ComposeOptions {
                    with_powers: *with_powers,
                    max_pool: *max_pool,
                };
                let bound = pool_bound.ok_or_else(|| Error::InvalidInput("--compose needs --pool-bound".into()))?;
                let found = compose_over_psp_with(a, bound, *h, options)?;
                let mut failed = false;
                for c in &found {
                    failed |= !c.verified;
                    let factors = c
                        .factors
                        .iter()
                        .map(|&(p, e)| if e == 1 { p.to_string() } else { format!("{p}^{e}") })
                        .collect::<Vec<_>>();
                    if json {
                        emit_json(
                            out,
                            &json!({
                                "value": c.value.to_string(),
                                "factors": c.factors,
                                "native": c.native,
                                "verified": c.verified,
                            }),
                        )?;
                    } else {
                        let flag = if c.native { "" } else { " (beyond u128)" };
                        writeln!(out, "{} = {}{flag}", c.value, factors.join(" * ")).map_err(io_err)?;
                    }
                }
                return Ok(if failed { 1 } else { 0 });
            }
            let limit = limit.ok_or_else(|| Error::InvalidInput("give --limit or --compose".into()))?;
            let result = enumerate_over_psp_with(a, limit, budget)?;
            if *bfile {
                write_bfile(out, search_bfile(&result)).map_err(io_err)?;
                for n in &result.unresolved {
                    writeln!(out, "# n={n} unresolved (factorization budget)").map_err(io_err)?;
                }
            } else if json {
                emit_json(out, &result)?;
            } else {
                for h in &result.hits {
                    writeln!(out, "{} h={} r={} {}", h.n, h.h, h.r, h.factorization).map_err(io_err)?;
                }
                for n in &result.unresolved {
                    writeln!(out, "# unresolved {n}").map_err(io_err)?;
                }
            }
            if !result.unresolved.is_empty() {
                return Ok(3);
            }
        }
        Command::Verify { suite, limit } => {
            let suite = match suite {
                SuiteArg::Examples => Suite::Examples,
                SuiteArg::Theorems => Suite::Theorems,
            };
            let report = verify::run(suite, *limit)?;
            if json {
                emit_json(out, &report)?;
            } else {
                for c in &report.checks {
                    writeln!(out, "{c}").map_err(io_err)?;
                }
                let failed = report.checks.iter().filter(|c| !c.ok()).count();
                writeln!(out, "{} checks, {failed} failed", report.checks.len()).map_err(io_err)?;
            }
            return Ok(if report.ok() { 0 } else { 1 });
        }
    }
    Ok(0)
}

fn flag(v: Option<bool>) -> &'static str {
    match v {
        Some(true) => "true",
        Some(false) => "false",
        None => "n/a",
    }
}

fn write_report<W: Write>(out: &mut W, r: &ClassificationReport) -> io::Result<()> {
    writeln!(out, "n={} base={}", r.n, r.base)?;
    writeln!(out, "factorization={}", r.factorization)?;
    writeln!(out, "prime={} squarefree={}", r.is_prime, r.squarefree)?;
    writeln!(out, "h={} r={}", r.h, r.r)?;
    writeln!(out, "fermat_psp={}", flag(r.fermat_psp))?;
    writeln!(out, "strong_psp={}", flag(r.strong_psp))?;
    writeln!(out, "super_psp={}", flag(r.super_psp))?;
    writeln!(out, "over_psp={}", flag(r.over_psp))?;
    for w in &r.witnesses {
        match w {
            Witness::FermatResidue { residue } => writeln!(out, "witness: a^(n-1) = {residue} (mod n)")?,
            Witness::SuperViolation { divisor, order } => {
                writeln!(out, "witness: divisor {divisor} has order {order}, which does not divide {}", divisor - 1)?
            }
            Witness::OrderMismatch {
                divisor,
                order,
                modulus_order,
            } => writeln!(out, "witness: h({divisor})={order} but h(n)={modulus_order}")?,
        }
    }
    Ok(())
}
