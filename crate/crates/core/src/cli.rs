//! The `twostack` command line.

use std::fmt::Display;
use std::io::{self, Write};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::canonical::{canonicalize, in_l};
use crate::encoding::{in_lk, parse_word, Depth, Letter, Word};
use crate::grammar::{pda_to_grammar, reduce, to_bnf, to_json, Grammar};
use crate::machine::{enumerate_perms, run, run_reversed, run_trace, MachineConfig};
use crate::pda::{accepts, build_m, count_accepted, export, trace};
use crate::series::{
    asymptotic_estimate, coefficients_closed_form, coefficients_from_grammar, relative_error,
    CountSequence,
};
use crate::verify::{cross_check, VerifyOptions};

#[derive(Parser, Debug)]
#[command(
    name = "twostack",
    version,
    about = "Permutations generated by a depth-2 stack followed by an infinite stack"
)]
pub struct Cli {
    /// Print words with ρ, λ, μ instead of r, l, m.
    #[arg(long, global = true)]
    pub unicode: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run a word on the machine and print the permutation.
    Simulate {
        #[arg(value_parser = word_arg)]
        word: Word,
        /// Depth of the first stack.
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u32).range(1..))]
        k: u32,
        /// Print every configuration.
        #[arg(long)]
        trace: bool,
        #[arg(long)]
        json: bool,
    },
    /// Read a word right to left with the stacks swapped.
    Reverse {
        #[arg(value_parser = word_arg)]
        word: Word,
    },
    /// Print the canonical form of a word and its permutation.
    Canon {
        #[arg(value_parser = word_arg)]
        word: Word,
    },
    /// Test membership in a language.
    Member {
        #[arg(value_parser = word_arg)]
        word: Word,
        #[arg(long, value_enum)]
        lang: Lang,
    },
    /// List the permutations of length n the machine generates.
    Enumerate {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u32).range(1..))]
        k: u32,
    },
    /// The pushdown automaton.
    Pda {
        #[command(subcommand)]
        action: PdaAction,
    },
    /// The grammar obtained from the automaton.
    Grammar {
        #[command(subcommand)]
        action: GrammarAction,
    },
    /// Print c_0..c_{n-max} as CSV.
    Count {
        #[arg(long)]
        n_max: usize,
        #[arg(long, value_enum)]
        method: Method,
        #[arg(long)]
        json: bool,
    },
    /// Compare c_n with the asymptotic estimate.
    Asymptotics {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        #[arg(long)]
        json: bool,
    },
    /// Cross-check every pipeline. Exits 0 iff everything agrees.
    Verify {
        #[arg(long)]
        quick: bool,
        #[arg(long)]
        json: bool,
        /// Print stage timings to standard error.
        #[arg(long)]
        timings: bool,
    },
}

#[derive(Subcommand, Debug)]
pub enum PdaAction {
    /// Print the transition table as JSON.
    Export,
    /// Print the configurations visited on a `$`-terminated word.
    Trace {
        #[arg(value_parser = word_arg)]
        word: Word,
    },
}

#[derive(Subcommand, Debug)]
pub enum GrammarAction {
    Export {
        #[arg(long, value_enum, default_value_t = GrammarFormat::Bnf)]
        format: GrammarFormat,
        /// Skip the reduction.
        #[arg(long)]
        raw: bool,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Lang {
    #[value(name = "L")]
    L,
    #[value(name = "L2inf")]
    L2Inf,
    #[value(name = "pda")]
    Pda,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Brute,
    Pda,
    Grammar,
    Closed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GrammarFormat {
    Bnf,
    Json,
}

fn word_arg(s: &str) -> Result<Word, String> {
    parse_word(s).map_err(|e| e.to_string())
}

/// A failure inside a pipeline; printed on standard error, exit code 1.
#[derive(Debug)]
pub struct DomainError(String);

impl<E: Display> From<E> for DomainError {
    fn from(e: E) -> Self {
        DomainError(e.to_string())
    }
}

#[derive(Serialize)]
struct SequenceDocument<'a> {
    sequence: &'a CountSequence,
    order: Option<usize>,
    pipeline: Method,
}

#[derive(Serialize)]
struct AsymptoticsDocument {
    n: u64,
    exact: String,
    estimate: String,
    relative_error: f64,
}

pub fn main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match execute(&cli, &mut out) {
        Ok(code) => code,
        Err(DomainError(msg)) => {
            let _ = out.flush();
            eprintln!("error: {msg}");
            1
        }
    }
}

fn show(w: &Word, unicode: bool) -> String {
    if unicode {
        w.to_unicode()
    } else {
        w.to_string()
    }
}

fn show_letter(l: Letter, unicode: bool) -> char {
    if unicode {
        l.unicode()
    } else {
        l.ascii()
    }
}

fn list(v: &[usize]) -> String {
    let items: Vec<String> = v.iter().map(usize::to_string).collect();
    format!("[{}]", items.join(","))
}

fn config_line(step: usize, letter: Option<char>, c: &MachineConfig) -> String {
    format!(
        "{step:>3} {} next={} A={} B={} out={}",
        letter.unwrap_or('-'),
        c.input_next,
        list(&c.stack_a),
        list(&c.stack_b),
        list(&c.output)
    )
}

fn json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}

/// Runs a parsed command, writing data to `out`. Returns the exit code.
pub fn execute(cli: &Cli, out: &mut impl Write) -> Result<i32, DomainError> {
    let unicode = cli.unicode;
    match &cli.command {
        Command::Simulate {
            word,
            k,
            trace,
            json: as_json,
        } => {
            let k = *k as usize;
            if *trace {
                let configs = run_trace(word.letters(), k)?;
                if *as_json {
                    writeln!(out, "{}", json(&configs))?;
                } else {
                    for (i, c) in configs.iter().enumerate() {
                        let letter = i
                            .checked_sub(1)
                            .map(|j| show_letter(word.letters()[j], unicode));
                        writeln!(out, "{}", config_line(i, letter, c))?;
                    }
                }
            } else {
                let p = run(word.letters(), k, None)?;
                if *as_json {
                    writeln!(out, "{}", json(&p))?;
                } else {
                    writeln!(out, "{p}")?;
                }
            }
        }
        Command::Reverse { word } => {
            writeln!(out, "{}", run_reversed(word.letters())?)?;
        }
        Command::Canon { word } => {
            let c = canonicalize(word.letters())?;
            let p = run(c.letters(), 2, None)?;
            writeln!(out, "{} {p}", show(&c, unicode))?;
        }
        Command::Member { word, lang } => {
            let member = match lang {
                Lang::L => in_l(word.letters()),
                Lang::L2Inf => in_lk(word.letters(), Depth::Bounded(2)),
                Lang::Pda => {
                    let input = if word.contains_dollar() {
                        word.clone()
                    } else {
                        word.with_dollar()
                    };
                    accepts(&build_m(), input.letters())?
                }
            };
            writeln!(out, "{member}")?;
        }
        Command::Enumerate { n, k } => {
            for p in enumerate_perms(*n, *k as usize) {
                writeln!(out, "{p}")?;
            }
        }
        Command::Pda { action } => {
            let m = build_m();
            match action {
                PdaAction::Export => writeln!(out, "{}", json(&export(&m)))?,
                PdaAction::Trace { word } => {
                    let configs = trace(&m, word.letters())?;
                    for (i, c) in configs.iter().enumerate() {
                        let letter = i
                            .checked_sub(1)
                            .map(|j| show_letter(word.letters()[j], unicode));
                        writeln!(out, "{i:>3} {} {c}", letter.unwrap_or('-'))?;
                    }
                    let accepted = accepts(&m, word.letters())?;
                    if accepted {
                        writeln!(out, "accepted")?;
                    } else {
                        writeln!(out, "rejected after {} letters", configs.len() - 1)?;
                    }
                }
            }
        }
        Command::Grammar {
            action: GrammarAction::Export { format, raw },
        } => {
            let g = build_grammar(*raw)?;
            match format {
                GrammarFormat::Bnf => write!(out, "{}", to_bnf(&g, unicode))?,
                GrammarFormat::Json => writeln!(out, "{}", to_json(&g))?,
            }
        }
        Command::Count {
            n_max,
            method,
            json: as_json,
        } => {
            let (seq, order) = count(*n_max, *method)?;
            if *as_json {
                let doc = SequenceDocument {
                    sequence: &seq,
                    order,
                    pipeline: *method,
                };
                writeln!(out, "{}", json(&doc))?;
            } else {
                write!(out, "{}", seq.to_csv())?;
            }
        }
        Command::Asymptotics { n, json: as_json } => {
            let seq = coefficients_closed_form(*n as usize)?;
            let exact = &seq.values()[*n as usize];
            let doc = AsymptoticsDocument {
                n: *n,
                exact: exact.to_string(),
                estimate: scientific(*n),
                relative_error: relative_error(exact, *n),
            };
            if *as_json {
                writeln!(out, "{}", json(&doc))?;
            } else {
                writeln!(out, "n {}", doc.n)?;
                writeln!(out, "exact {}", doc.exact)?;
                writeln!(out, "estimate {}", doc.estimate)?;
                writeln!(out, "relative_error {:.6e}", doc.relative_error)?;
            }
        }
        Command::Verify {
            quick,
            json: as_json,
            timings,
        } => {
            let opts = if *quick {
                VerifyOptions::quick()
            } else {
                VerifyOptions::default()
            };
            let report = cross_check(&opts);
            if *as_json {
                writeln!(out, "{}", report.to_json())?;
            } else {
                write!(out, "{}", report.to_text())?;
            }
            if *timings {
                for t in &report.timings {
                    eprintln!("{:<16} {:>9.3}s", t.stage, t.seconds);
                }
            }
            return Ok(if report.passed() { 0 } else { 1 });
        }
    }
    Ok(0)
}

fn build_grammar(raw: bool) -> Result<Grammar, DomainError> {
    let g = pda_to_grammar(&build_m())?;
    Ok(if raw { g } else { reduce(&g)? })
}

fn count(n_max: usize, method: Method) -> Result<(CountSequence, Option<usize>), DomainError> {
    Ok(match method {
        Method::Brute => (
            CountSequence(
                (0..=n_max)
                    .map(|n| enumerate_perms(n, 2).len().into())
                    .collect(),
            ),
            None,
        ),
        Method::Pda => {
            let m = build_m();
            (
                CountSequence(
                    (0..=n_max)
                        .map(|n| count_accepted(&m, 3 * n + 1).into())
                        .collect(),
                ),
                None,
            )
        }
        Method::Grammar => {
            let g = build_grammar(false)?;
            (coefficients_from_grammar(&g, n_max)?, Some(3 * n_max + 1))
        }
        Method::Closed => (coefficients_closed_form(n_max)?, Some(n_max + 1)),
    })
}

/// The estimate as `d.dddddde±x`, computed through its logarithm so large
/// `n` does not overflow.
fn scientific(n: u64) -> String {
    let e = asymptotic_estimate(n);
    if e.is_finite() {
        return format!("{e:.6e}");
    }
    let log10 = crate::series::ln_estimate(n) / std::f64::consts::LN_10;
    let exp = log10.floor();
    format!("{:.6}e{}", 10f64.powf(log10 - exp), exp as i64)
}
