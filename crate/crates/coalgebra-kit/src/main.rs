//! Thin command-line front end; all the work happens in the library's `cli`
//! module.

use clap::{Parser, Subcommand};

use coalgebra_kit::cli::{emit_report, run, Command, Options};

#[derive(Parser, Debug)]
#[command(
    name = "coalgebra-kit",
    about = "Canonical trees, bisimilarity, behavioral metrics, Hausdorff liftings, and terminal-coalgebra chains on finite data",
    version
)]
struct Args {
    /// Emit machine-readable JSON (with a schema_version field).
    #[arg(long, global = true)]
    json: bool,

    /// Cap on elements per chain level / lifted space (also honors the
    /// COALGEBRA_KIT_BUDGET environment variable).
    #[arg(long, global = true)]
    budget: Option<usize>,

    /// Run every whitespace-separated command line from a file.
    #[arg(long, value_name = "FILE")]
    batch: Option<std::path::PathBuf>,

    #[command(subcommand)]
    verb: Option<Verb>,
}

#[derive(Subcommand, Debug)]
enum Verb {
    /// Collapse a tree to its canonical strongly extensional form.
    Canonize {
        /// Tree in bracket or JSON-array form (inline, @file, or path).
        tree: String,
    },
    /// Check two graphs for bisimilarity (exit 0 = bisimilar, 1 = not).
    Bisim { left: String, right: String },
    /// Behavioral distance between two graphs (labelled or unlabelled).
    Distance {
        left: String,
        right: String,
        /// Label distance for the labelled case (e.g. "1/2"); defaults to
        /// the alphabet's distance table.
        #[arg(long)]
        delta: Option<String>,
    },
    /// Iterate the terminal-coalgebra chain of a functor expression.
    Chain {
        /// Functor expression, e.g. "Pf", "Pf(C2 * Id)", "Hd".
        functor: String,
        depth: usize,
        /// Print carrier sizes only.
        #[arg(long)]
        sizes_only: bool,
    },
    /// Cardinality class n(F) of a functor expression.
    Classify { functor: String },
    /// Depth-bounded tree unfolding of a graph.
    Unfold {
        graph: String,
        /// Unfolding depth.
        #[arg(long, default_value_t = 12)]
        depth: usize,
    },
    /// Hausdorff distance between two subsets of a finite metric space.
    Hausdorff {
        space: String,
        left: String,
        right: String,
    },
    /// Quotient a graph by its largest bisimulation.
    Minimize { graph: String },
}

fn to_command(verb: Verb) -> Command {
    match verb {
        Verb::Canonize { tree } => Command::Canonize { tree },
        Verb::Bisim { left, right } => Command::Bisim { left, right },
        Verb::Distance { left, right, delta } => Command::Distance { left, right, delta },
        Verb::Chain {
            functor,
            depth,
            sizes_only,
        } => Command::Chain {
            functor,
            depth,
            sizes_only,
        },
        Verb::Classify { functor } => Command::Classify { functor },
        Verb::Unfold { graph, depth } => Command::Unfold { graph, depth },
        Verb::Hausdorff { space, left, right } => Command::Hausdorff { space, left, right },
        Verb::Minimize { graph } => Command::Minimize { graph },
    }
}

fn budget_from(args_budget: Option<usize>) -> usize {
    args_budget
        .or_else(|| {
            std::env::var("COALGEBRA_KIT_BUDGET")
                .ok()
                .and_then(|v| v.parse().ok())
        })
        .unwrap_or(coalgebra_kit::DEFAULT_SIZE_BUDGET)
}

fn run_one(verb: Verb, json: bool, budget: usize) -> i32 {
    let opts = Options { budget };
    match run(&to_command(verb), &opts) {
        Ok(outcome) => {
            println!("{}", emit_report(&outcome, json));
            outcome.exit_code
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn main() {
    let args = Args::parse();
    let budget = budget_from(args.budget);

    if let Some(batch) = &args.batch {
        let content = match std::fs::read_to_string(batch) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("error: {}: {e}", batch.display());
                std::process::exit(2);
            }
        };
        let mut worst = 0;
        for line in content.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let argv = std::iter::once("coalgebra-kit").chain(line.split_whitespace());
            match Args::try_parse_from(argv) {
                Ok(sub) => match sub.verb {
                    Some(verb) => {
                        let code = run_one(
                            verb,
                            sub.json || args.json,
                            budget_from(sub.budget.or(args.budget)),
                        );
                        worst = worst.max(code);
                    }
                    None => {
                        eprintln!("error: batch line has no verb: {line}");
                        worst = worst.max(2);
                    }
                },
                Err(e) => {
                    eprintln!("error: batch line {line:?}: {e}");
                    worst = worst.max(2);
                }
            }
        }
        std::process::exit(worst);
    }

    match args.verb {
        Some(verb) => std::process::exit(run_one(verb, args.json, budget)),
        None => {
            eprintln!("error: missing a verb; try --help");
            std::process::exit(2);
        }
    }
}
