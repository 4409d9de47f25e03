use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use vondyck::corpus::{
    bundled_corpus, load_corpus, run_corpus, CorpusFilter, SimplicityPolicy, VerifyOptions,
    DEFAULT_MC_SEED, DEFAULT_MC_TRIALS,
};
use vondyck::matgrp::{find_epimorphism, EpiBudget, EpiError};
use vondyck::permgrp::{
    PermError, PermutationGroup, SimplicityMode, SimplicityVerdict, DEFAULT_SIMPLICITY_CAP,
};
use vondyck::todd_coxeter::{
    enumerate_with, CosetTable, EnumerationError, EnumerationLimits, Strategy,
};
use vondyck::vondyck::{check_divisibility, genus, pairwise_coprime, surface_invariants};
use vondyck::words::{parse_presentation, parse_word, Presentation, Word};
use vondyck::zlinalg::abelianization;

const MISMATCH: u8 = 1;
const USAGE: u8 = 2;
const BUDGET: u8 = 3;

#[derive(Parser)]
#[command(
    name = "vondyck",
    version,
    about = "Coset enumeration and verification of von Dyck group factors"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Budget {
    /// Maximum number of cosets allocated at once.
    #[arg(long, default_value_t = 5_000_000)]
    max_cosets: usize,
    /// Wall-clock budget in seconds.
    #[arg(long)]
    max_seconds: Option<f64>,
}

impl Budget {
    fn limits(&self) -> EnumerationLimits {
        EnumerationLimits {
            max_cosets: self.max_cosets.max(1),
            max_seconds: self.max_seconds,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Hlt,
    Lookahead,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Det,
    Mc,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate cosets of a subgroup (trivial by default).
    Enumerate {
        presentation: String,
        /// Subgroup generators, comma separated.
        #[arg(long, value_delimiter = ',')]
        subgroup: Vec<String>,
        #[arg(long, value_enum, default_value = "lookahead")]
        strategy: StrategyArg,
        /// Print the closed coset table.
        #[arg(long)]
        dump: bool,
        #[command(flatten)]
        budget: Budget,
    },
    /// Order of the group, cross-checked on its regular representation.
    Order {
        presentation: String,
        #[command(flatten)]
        budget: Budget,
    },
    /// Invariant factors of the abelianization.
    Abelianize { presentation: String },
    /// Decide simplicity of a finite presented group.
    Simple {
        presentation: String,
        #[arg(long, value_enum, default_value = "det")]
        mode: ModeArg,
        #[arg(long, default_value_t = DEFAULT_MC_TRIALS)]
        trials: u32,
        #[arg(long, default_value_t = DEFAULT_MC_SEED)]
        seed: u64,
        /// Largest order accepted by the deterministic test.
        #[arg(long, default_value_t = DEFAULT_SIMPLICITY_CAP)]
        cap: u64,
        #[command(flatten)]
        budget: Budget,
    },
    /// Search for an epimorphism onto PSL(2, q).
    Epi {
        presentation: String,
        #[arg(long)]
        q: u32,
        #[arg(long, default_value_t = 127)]
        max_q: u32,
    },
    /// Genus of the surface tessellated by a factor of D(2,3,n).
    Genus {
        #[arg(long)]
        order: u64,
        #[arg(long)]
        n: u32,
    },
    /// Work with the presentation corpus.
    Corpus {
        #[command(subcommand)]
        command: CorpusCommand,
    },
}

#[derive(Subcommand)]
enum CorpusCommand {
    /// Verify corpus entries and print one line per entry.
    Run {
        /// Restrict to one value of n, written `n=K`.
        #[arg(long, value_parser = parse_n_filter)]
        filter: Option<u32>,
        #[arg(long)]
        max_order: Option<u64>,
        /// Also run entries above the default order threshold.
        #[arg(long)]
        stretch: bool,
        /// Include entries flagged as suspected typos.
        #[arg(long)]
        typos: bool,
        /// Only these entry ids.
        #[arg(long = "id")]
        ids: Vec<String>,
        #[arg(long)]
        jobs: Option<usize>,
        /// Write the reports as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Corpus file; the bundled corpus by default.
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_MC_TRIALS)]
        trials: u32,
        #[arg(long, default_value_t = DEFAULT_MC_SEED)]
        seed: u64,
        #[command(flatten)]
        budget: Budget,
    },
    /// List entry ids with their expected orders.
    List {
        #[arg(long)]
        corpus: Option<PathBuf>,
    },
}

fn parse_n_filter(s: &str) -> Result<u32, String> {
    s.strip_prefix("n=")
        .ok_or_else(|| format!("expected n=K, got `{s}`"))?
        .parse()
        .map_err(|e| format!("bad n in `{s}`: {e}"))
}

type Outcome = Result<(), (u8, String)>;

fn usage(e: impl ToString) -> (u8, String) {
    (USAGE, e.to_string())
}

fn presentation(text: &str) -> Result<Presentation, (u8, String)> {
    parse_presentation(text)
        .map_err(|e| usage(format!("{e}\n  {text}\n  {}^", " ".repeat(e.position))))
}

fn run_enumeration(
    p: &Presentation,
    subgroup: &[Word],
    strategy: Strategy,
    budget: &Budget,
) -> Result<CosetTable, (u8, String)> {
    enumerate_with(p, subgroup, &budget.limits(), strategy).map_err(|e| match e {
        EnumerationError::LimitExceeded { .. } => (BUDGET, e.to_string()),
        _ => usage(e),
    })
}

fn regular_group(p: &Presentation, budget: &Budget) -> Result<PermutationGroup, (u8, String)> {
    let table = run_enumeration(p, &[], Strategy::default(), budget)?;
    let gens = table
        .generator_actions()
        .map_err(|e| (MISMATCH, e.to_string()))?;
    PermutationGroup::new(table.live_count(), gens).map_err(|e| (MISMATCH, e.to_string()))
}

fn perm_error(e: PermError) -> (u8, String) {
    match e {
        PermError::BudgetExceeded { .. } => (BUDGET, e.to_string()),
        _ => (MISMATCH, e.to_string()),
    }
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Enumerate {
            presentation: text,
            subgroup,
            strategy,
            dump,
            budget,
        } => {
            let p = presentation(&text)?;
            let h = subgroup
                .iter()
                .map(|w| parse_word(w, p.generator_names()).map_err(usage))
                .collect::<Result<Vec<_>, _>>()?;
            let strategy = match strategy {
                StrategyArg::Hlt => Strategy::Hlt,
                StrategyArg::Lookahead => Strategy::HltLookahead,
            };
            let table = run_enumeration(&p, &h, strategy, &budget)?;
            let stats = table.stats();
            println!("index {}", table.live_count());
            println!(
                "defined {} max live {} coincidences {} lookaheads {}",
                stats.total_defined, stats.max_live, stats.coincidences, stats.lookaheads
            );
            if dump {
                print!("{}", table.dump());
            }
            if !table.validate(&p, &h).is_valid() {
                return Err((MISMATCH, "table failed validation".into()));
            }
        }
        Command::Order {
            presentation: text,
            budget,
        } => {
            let p = presentation(&text)?;
            let g = regular_group(&p, &budget)?;
            let order = g.order();
            println!("{order}");
            if order != g.degree().into() {
                return Err((
                    MISMATCH,
                    format!("regular image has order {order}, {} cosets", g.degree()),
                ));
            }
        }
        Command::Abelianize { presentation: text } => {
            println!("{}", abelianization(&presentation(&text)?));
        }
        Command::Simple {
            presentation: text,
            mode,
            trials,
            seed,
            cap,
            budget,
        } => {
            let p = presentation(&text)?;
            let g = regular_group(&p, &budget)?;
            let mode = match mode {
                ModeArg::Det => SimplicityMode::Deterministic { cap },
                ModeArg::Mc => SimplicityMode::MonteCarlo { trials, seed },
            };
            match g.is_simple(mode).map_err(perm_error)? {
                SimplicityVerdict::Simple => println!("simple (order {})", g.order()),
                SimplicityVerdict::ProbablySimple { trials } => {
                    println!("probably simple (order {}, {trials} trials)", g.order())
                }
                SimplicityVerdict::NotSimple {
                    witness,
                    normal_subgroup_order,
                } => println!(
                    "not simple: normal closure of an element of order {} has order {normal_subgroup_order}",
                    witness.order()
                ),
            }
        }
        Command::Epi {
            presentation: text,
            q,
            max_q,
        } => {
            let p = presentation(&text)?;
            let budget = EpiBudget {
                max_q,
                ..EpiBudget::default()
            };
            match find_epimorphism(&p, q, &budget) {
                Ok(Some(e)) => {
                    println!("a -> {}\nb -> {}\nimage order {}", e.a, e.b, e.image_order)
                }
                Ok(None) => return Err((MISMATCH, format!("no epimorphism onto PSL(2, {q})"))),
                Err(e @ EpiError::BudgetExhausted { .. }) => return Err((BUDGET, e.to_string())),
                Err(e) => return Err(usage(e)),
            }
        }
        Command::Genus { order, n } => {
            let s = surface_invariants(order, n);
            println!("genus {}", genus(order, n));
            println!(
                "faces {} edges {} vertices {} euler characteristic {}",
                s.faces, s.edges, s.vertices, s.euler_characteristic
            );
            println!("12n divides order: {}", check_divisibility(order, n));
            println!("2, 3, n pairwise coprime: {}", pairwise_coprime(n));
            if !s.is_integral() {
                return Err((MISMATCH, "surface counts are not integers".into()));
            }
        }
        Command::Corpus { command } => return corpus(command),
    }
    Ok(())
}

fn entries(path: Option<PathBuf>) -> Result<Vec<vondyck::corpus::CorpusEntry>, (u8, String)> {
    match path {
        Some(p) => load_corpus(p).map_err(usage),
        None => Ok(bundled_corpus()),
    }
}

fn corpus(command: CorpusCommand) -> Outcome {
    match command {
        CorpusCommand::List { corpus } => {
            for e in entries(corpus)? {
                println!(
                    "{:<24} n={:<3} {:>9} {}",
                    e.id, e.n, e.expected_order, e.claimed_group
                );
            }
            Ok(())
        }
        CorpusCommand::Run {
            filter,
            max_order,
            stretch,
            typos,
            ids,
            jobs,
            json,
            corpus,
            trials,
            seed,
            budget,
        } => {
            let entries = entries(corpus)?;
            let filter = CorpusFilter {
                n: filter,
                max_order,
                ids,
                include_typo_suspects: typos,
                stretch,
            };
            let opts = VerifyOptions {
                limits: budget.limits(),
                simplicity: SimplicityPolicy::Auto { trials, seed },
                ..VerifyOptions::default()
            };
            let run = run_corpus(&entries, &filter, &opts, jobs);
            for r in &run.reports {
                let status = if !r.completed() {
                    "skip"
                } else if r.has_mismatch() {
                    "FAIL"
                } else {
                    "ok"
                };
                let order = r.order_found.map_or("-".to_string(), |o| o.to_string());
                let extra = match &r.budget_outcome {
                    vondyck::corpus::BudgetOutcome::Skipped { reason } => reason.clone(),
                    _ => format!("{:?}", r.simplicity_result),
                };
                println!(
                    "{status:<4} {:<24} {order:>9} {:>7.2}s {extra}",
                    r.id, r.elapsed
                );
            }
            println!("{}", run.summary);
            if let Some(path) = json {
                let text = serde_json::to_string_pretty(&run).map_err(usage)?;
                std::fs::write(&path, text).map_err(usage)?;
            }
            match run.summary.exit_code() {
                0 => Ok(()),
                c => Err((c as u8, "corpus run did not fully succeed".into())),
            }
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err((code, message)) => {
            eprintln!("error: {message}");
            ExitCode::from(code)
        }
    }
}
