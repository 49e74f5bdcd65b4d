//! Argument definitions and command implementations. Commands write to
//! the given streams and return the process exit code, so tests can run
//! them in-process.

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use qlp_core::semantics::least_model;
use qlp_core::{
    check_answer, emit_text, parse_answer, parse_goal, parse_program, solve, translate_program, Dialect, Domain,
    InitialGoal, Program, SearchConfig, Selection, Verdict,
};

use crate::record::OutputRecord;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NO_ANSWER: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_UNKNOWN: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "qlp", version, about = "Qualified logic programming: solve goals, build models, translate programs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Select {
    Leftmost,
    Rightmost,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DialectArg {
    Generic,
    #[value(name = "toy_like")]
    ToyLike,
}

fn domain_flag(s: &str) -> Result<Domain, String> {
    s.parse().map_err(|e: qlp_core::DomainError| e.to_string())
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Enumerate computed answers of a goal
    Solve {
        program: PathBuf,
        goal: String,
        /// b, u, w or prod:<d1>,<d2>
        #[arg(long, default_value = "u", value_parser = domain_flag)]
        domain: Domain,
        #[arg(long)]
        max_answers: Option<usize>,
        /// Resolution steps allowed along one branch
        #[arg(long, default_value_t = 10_000)]
        max_depth: usize,
        #[arg(long, value_enum, default_value_t = Select::Leftmost)]
        select: Select,
        /// Print each resolution step before the answer it leads to
        #[arg(long)]
        trace: bool,
        /// One JSON record per line
        #[arg(long)]
        json: bool,
    },
    /// Dump the least model restricted to terms of bounded depth
    Model {
        program: PathBuf,
        #[arg(long, default_value = "u", value_parser = domain_flag)]
        domain: Domain,
        /// Maximal term depth of the ground universe
        #[arg(long, default_value_t = 2)]
        depth: usize,
        #[arg(long, default_value_t = 10)]
        iters: usize,
    },
    /// Print the program as constrained clauses
    Translate {
        program: PathBuf,
        #[arg(long, default_value = "u", value_parser = domain_flag)]
        domain: Domain,
        #[arg(long, value_enum, default_value_t = DialectArg::Generic)]
        dialect: DialectArg,
    },
    /// Decide whether an answer solves a goal
    Check {
        program: PathBuf,
        goal: String,
        /// `X = adam | W = 0.5`
        answer: String,
        #[arg(long, default_value = "u", value_parser = domain_flag)]
        domain: Domain,
        /// Maximal height of the proof trees searched
        #[arg(long, default_value_t = 6)]
        oracle_depth: usize,
    },
}

pub fn load_program(path: &Path, domain: &Domain) -> Result<Program> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    parse_program(&text, domain).map_err(|e| anyhow::anyhow!("{}:{e}", path.display()))
}

fn load_goal(text: &str, domain: &Domain) -> Result<InitialGoal> {
    parse_goal(text, domain).map_err(|e| anyhow::anyhow!("goal:{e}"))
}

/// Runs a parsed command. Input errors are reported on `err` with exit
/// code 2.
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match execute(cli, out, err) {
        Ok(code) => code,
        // a reader such as `head` closing the pipe is not an input error
        Err(e) if is_broken_pipe(&e) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "qlp: {e:#}");
            EXIT_USAGE
        }
    }
}

fn is_broken_pipe(e: &anyhow::Error) -> bool {
    e.downcast_ref::<std::io::Error>().is_some_and(|io| io.kind() == std::io::ErrorKind::BrokenPipe)
}

fn execute(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    match cli.command {
        Command::Solve {
            program,
            goal,
            domain,
            max_answers,
            max_depth,
            select,
            trace,
            json,
        } => {
            let program = load_program(&program, &domain)?;
            let goal = load_goal(&goal, &domain)?;
            let config = SearchConfig {
                selection: match select {
                    Select::Leftmost => Selection::Leftmost,
                    Select::Rightmost => Selection::Rightmost,
                },
                max_depth: Some(max_depth),
                max_answers,
                trace,
                ..SearchConfig::default()
            };
            cmd_solve(&program, &goal, config, json, out, err)
        }
        Command::Model {
            program,
            domain,
            depth,
            iters,
        } => {
            let program = load_program(&program, &domain)?;
            let (frag, _) = least_model(&program, depth, iters);
            out.write_all(frag.dump().as_bytes())?;
            Ok(EXIT_OK)
        }
        Command::Translate {
            program,
            domain,
            dialect,
        } => {
            let program = load_program(&program, &domain)?;
            let dialect = match dialect {
                DialectArg::Generic => Dialect::Generic,
                DialectArg::ToyLike => Dialect::ToyLike,
            };
            out.write_all(emit_text(&translate_program(&program), dialect).as_bytes())?;
            Ok(EXIT_OK)
        }
        Command::Check {
            program,
            goal,
            answer,
            domain,
            oracle_depth,
        } => {
            let program = load_program(&program, &domain)?;
            let goal = load_goal(&goal, &domain)?;
            let (theta, rho) = parse_answer(&answer, &domain).map_err(|e| anyhow::anyhow!("answer:{e}"))?;
            let (word, code) = match check_answer(&program, &goal, &theta, &rho, oracle_depth) {
                Verdict::Valid => ("valid", EXIT_OK),
                Verdict::Invalid => ("invalid", EXIT_NO_ANSWER),
                Verdict::Unknown => ("unknown", EXIT_UNKNOWN),
            };
            writeln!(out, "{word}")?;
            Ok(code)
        }
    }
}

/// Prints answers in arrival order, then the end record. Trace lines go to
/// `out` as `%` comments, or to `trace_out` when records are JSON.
pub fn cmd_solve(
    program: &Program,
    goal: &InitialGoal,
    config: SearchConfig,
    json: bool,
    out: &mut dyn Write,
    trace_out: &mut dyn Write,
) -> Result<i32> {
    let mut solver = solve(program, goal, config)?;
    let mut shown = 0;
    let mut answers = 0;
    let emit = |out: &mut dyn Write, record: &OutputRecord| -> std::io::Result<()> {
        if json {
            writeln!(out, "{}", record.to_json())
        } else {
            writeln!(out, "{record}")
        }
    };
    loop {
        let next = solver.next();
        // trace lines precede the answer they lead to
        for line in &solver.trace()[shown..] {
            if json {
                writeln!(trace_out, "{line}")?;
            } else {
                writeln!(out, "% {line}")?;
            }
        }
        shown = solver.trace().len();
        match next {
            Some(answer) => {
                answers += 1;
                emit(out, &OutputRecord::answer(&answer))?;
            }
            None => break,
        }
    }
    emit(out, &OutputRecord::end(solver.status(), solver.steps()))?;
    Ok(if answers > 0 { EXIT_OK } else { EXIT_NO_ANSWER })
}
