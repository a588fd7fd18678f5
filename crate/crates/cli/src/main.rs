//! Command-line interface for the free S-act category toolkit.
//!
//! Every command prints a JSON document to standard output and a short
//! human-readable summary to standard error. Exit codes: 0 when all checks
//! pass, 1 when a verified mathematical check fails (the counterexample is
//! part of the JSON output), 2 for usage, parse, or budget errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use sact_core::act::enumerate_homs;
use sact_core::catalog::{classify_catalog, generate_monoids};
use sact_core::category::{
    check_functoriality, enumerate_category_automorphisms, semi_inner_certificate, twisted_functor,
    verify_certificate, TruncatedFunctor, TruncatedSkeleton,
};
use sact_core::monoid::MonoidAutomorphism;
use sact_core::suite::run_theorem_suite;
use sact_core::unary::{
    permutation_twist, signature_perfectness, verify_letter_permutation_rigidity, UnarySignature,
};
use sact_core::{Budget, FiniteMonoid};

#[derive(Parser)]
#[command(
    name = "sact",
    version,
    about = "Finite monoids, free acts, and the automorphisms of their category"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    budget: BudgetArgs,
}

#[derive(Args)]
struct BudgetArgs {
    /// Largest hom-set the tool will materialize.
    #[arg(long, global = true)]
    max_homset: Option<usize>,
    /// Wall-clock limit; expiry aborts with a partial result where supported.
    #[arg(long, global = true)]
    timeout_secs: Option<u64>,
}

impl BudgetArgs {
    fn build(&self) -> Budget {
        let mut budget = match self.timeout_secs {
            Some(secs) => Budget::with_timeout_secs(secs),
            None => Budget::default(),
        };
        if let Some(max_homset) = self.max_homset {
            budget.max_homset = max_homset;
        }
        budget
    }
}

#[derive(Subcommand)]
enum Command {
    /// Multiplication-table checks and automorphism groups.
    Monoid {
        #[command(subcommand)]
        cmd: MonoidCmd,
    },
    /// Exhaustive catalogs of small monoids up to isomorphism.
    Catalog {
        #[command(subcommand)]
        cmd: CatalogCmd,
    },
    /// Free acts and their homomorphisms.
    Act {
        #[command(subcommand)]
        cmd: ActCmd,
    },
    /// Endofunctors of the truncated category of free acts.
    Functor {
        #[command(subcommand)]
        cmd: FunctorCmd,
    },
    /// End-to-end verification runs.
    Suite {
        #[command(subcommand)]
        cmd: SuiteCmd,
    },
    /// Unary algebras over truncated word monoids.
    Unary {
        #[command(subcommand)]
        cmd: UnaryCmd,
    },
}

#[derive(Subcommand)]
enum MonoidCmd {
    /// Check the monoid laws on a multiplication table.
    Validate { file: PathBuf },
    /// List all automorphisms.
    Aut { file: PathBuf },
    /// Compute the outer automorphism group.
    Out { file: PathBuf },
}

#[derive(Subcommand)]
enum CatalogCmd {
    /// Generate all monoids of one order up to isomorphism.
    Generate {
        #[arg(long)]
        order: usize,
        /// Also classify each entry (automorphism structure, perfectness).
        #[arg(long)]
        classify: bool,
        /// Truncation used for the category-level cross-check.
        #[arg(long, default_value_t = 2)]
        max_rank: usize,
    },
}

#[derive(Subcommand)]
enum ActCmd {
    /// List all homomorphisms between two free acts.
    Homs {
        #[arg(long)]
        monoid: PathBuf,
        #[arg(short)]
        n: usize,
        #[arg(short)]
        m: usize,
    },
}

#[derive(Subcommand)]
enum FunctorCmd {
    /// Build the functor twisting every hom by a monoid automorphism.
    Twist {
        #[arg(long)]
        monoid: PathBuf,
        /// JSON file with {"image": [..]}.
        #[arg(long)]
        sigma: PathBuf,
        #[arg(long, default_value_t = 2)]
        max_rank: usize,
    },
    /// Enumerate every automorphism of the truncated category.
    Enumerate {
        #[arg(long)]
        monoid: PathBuf,
        #[arg(long, default_value_t = 2)]
        max_rank: usize,
        /// Skip the search over object permutations.
        #[arg(long)]
        assume_stable: bool,
    },
    /// Find and verify a semi-inner certificate for a functor.
    Certify {
        #[arg(long)]
        monoid: PathBuf,
        /// JSON file in the functor wire format.
        #[arg(long)]
        functor: PathBuf,
    },
}

#[derive(Subcommand)]
enum SuiteCmd {
    /// Run the full verification pipeline for one monoid.
    Run {
        #[arg(long)]
        monoid: PathBuf,
        #[arg(long, default_value_t = 2)]
        max_rank: usize,
    },
}

#[derive(Subcommand)]
enum UnaryCmd {
    /// Count the product-preserving bijections of the truncated word monoid.
    Rigidity {
        #[arg(short)]
        k: usize,
        /// Word-length truncation; defaults per symbol count.
        #[arg(short = 'L', long = "L")]
        l: Option<usize>,
    },
    /// Decide perfectness of the unary variety with k operation symbols.
    Perfect {
        #[arg(short)]
        k: usize,
    },
    /// Build a letterwise permutation twist and check its equation.
    Twist {
        #[arg(short)]
        k: usize,
        #[arg(short = 'L', long = "L")]
        l: Option<usize>,
        /// Comma-separated permutation of 0..k, e.g. "1,0".
        #[arg(long)]
        pi: String,
        #[arg(long, default_value_t = 2)]
        max_rank: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let budget = cli.budget.build();
    match run(cli.command, &budget) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command, budget: &Budget) -> Result<ExitCode, String> {
    match command {
        Command::Monoid { cmd } => run_monoid(cmd, budget),
        Command::Catalog { cmd } => run_catalog(cmd, budget),
        Command::Act { cmd } => run_act(cmd, budget),
        Command::Functor { cmd } => run_functor(cmd, budget),
        Command::Suite { cmd } => run_suite(cmd, budget),
        Command::Unary { cmd } => run_unary(cmd, budget),
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path, what: &str) -> Result<T, String> {
    let text = fs::read_to_string(path)
        .map_err(|e| format!("cannot read {what} file {}: {e}", path.display()))?;
    serde_json::from_str(&text)
        .map_err(|e| format!("cannot parse {what} file {}: {e}", path.display()))
}

fn emit(value: &serde_json::Value) {
    println!(
        "{}",
        serde_json::to_string_pretty(value).expect("serializable output")
    );
}

fn to_value<T: serde::Serialize>(value: &T) -> serde_json::Value {
    serde_json::to_value(value).expect("serializable output")
}

fn run_monoid(cmd: MonoidCmd, budget: &Budget) -> Result<ExitCode, String> {
    match cmd {
        MonoidCmd::Validate { file } => {
            // Parse the raw shape by hand so a law violation is a check
            // failure with a witness, not a parse error.
            let raw: serde_json::Value = read_json(&file, "monoid")?;
            let table: Vec<Vec<usize>> = serde_json::from_value(raw["table"].clone())
                .map_err(|e| format!("monoid file needs a \"table\" array: {e}"))?;
            let identity: usize = serde_json::from_value(raw["identity"].clone())
                .map_err(|e| format!("monoid file needs an \"identity\" index: {e}"))?;
            match FiniteMonoid::validate(table, identity) {
                Ok(m) => {
                    emit(&json!({
                        "valid": true,
                        "order": m.order(),
                        "commutative": m.is_commutative(),
                        "units": m.units(),
                        "monoid": to_value(&m),
                    }));
                    eprintln!("valid monoid of order {}", m.order());
                    Ok(ExitCode::SUCCESS)
                }
                Err(e) => {
                    emit(&json!({ "valid": false, "violation": e.to_string() }));
                    eprintln!("not a monoid: {e}");
                    Ok(ExitCode::from(1))
                }
            }
        }
        MonoidCmd::Aut { file } => {
            let m: FiniteMonoid = read_json(&file, "monoid")?;
            let automorphisms = m.automorphisms(budget).map_err(|e| e.to_string())?;
            emit(&json!({
                "order": m.order(),
                "count": automorphisms.len(),
                "automorphisms": to_value(&automorphisms),
            }));
            eprintln!("{} automorphism(s)", automorphisms.len());
            Ok(ExitCode::SUCCESS)
        }
        MonoidCmd::Out { file } => {
            let m: FiniteMonoid = read_json(&file, "monoid")?;
            let outer = m.outer_group(budget).map_err(|e| e.to_string())?;
            emit(&to_value(&outer));
            eprintln!("outer group of order {}", outer.order);
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn run_catalog(cmd: CatalogCmd, budget: &Budget) -> Result<ExitCode, String> {
    match cmd {
        CatalogCmd::Generate {
            order,
            classify,
            max_rank,
        } => {
            let catalog = generate_monoids(order, budget).map_err(|e| e.to_string())?;
            let mut output = json!({
                "order": order,
                "count": catalog.len(),
                "representatives": to_value(&catalog.representatives),
            });
            if classify {
                let entries: Vec<serde_json::Value> = classify_catalog(&catalog, max_rank, budget)
                    .into_iter()
                    .map(|entry| match entry {
                        Ok(e) => to_value(&e),
                        Err(e) => json!({ "error": e.to_string() }),
                    })
                    .collect();
                output["classification"] = serde_json::Value::Array(entries);
            }
            emit(&output);
            eprintln!("{} monoid(s) of order {order}", catalog.len());
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn run_act(cmd: ActCmd, budget: &Budget) -> Result<ExitCode, String> {
    match cmd {
        ActCmd::Homs { monoid, n, m } => {
            let s: FiniteMonoid = read_json(&monoid, "monoid")?;
            let homs = enumerate_homs(&s, n, m, budget).map_err(|e| e.to_string())?;
            emit(&json!({
                "monoid_order": s.order(),
                "source_rank": n,
                "target_rank": m,
                "count": homs.len(),
                "homs": to_value(&homs),
            }));
            eprintln!("{} homomorphism(s) from F_{n} to F_{m}", homs.len());
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn run_functor(cmd: FunctorCmd, budget: &Budget) -> Result<ExitCode, String> {
    match cmd {
        FunctorCmd::Twist {
            monoid,
            sigma,
            max_rank,
        } => {
            let m: FiniteMonoid = read_json(&monoid, "monoid")?;
            let raw: serde_json::Value = read_json(&sigma, "automorphism")?;
            let image: Vec<usize> = serde_json::from_value(raw["image"].clone())
                .map_err(|e| format!("automorphism file needs an \"image\" array: {e}"))?;
            let sigma = MonoidAutomorphism::from_image(&m, image).map_err(|e| e.to_string())?;
            let skel = TruncatedSkeleton::new(m, max_rank, budget).map_err(|e| e.to_string())?;
            let phi = twisted_functor(&skel, &sigma).map_err(|e| e.to_string())?;
            emit(&to_value(&phi));
            eprintln!("twist functor over ranks 1..={max_rank}");
            Ok(ExitCode::SUCCESS)
        }
        FunctorCmd::Enumerate {
            monoid,
            max_rank,
            assume_stable,
        } => {
            let m: FiniteMonoid = read_json(&monoid, "monoid")?;
            let skel = TruncatedSkeleton::new(m, max_rank, budget).map_err(|e| e.to_string())?;
            let functors = enumerate_category_automorphisms(&skel, budget, assume_stable)
                .map_err(|e| e.to_string())?;
            emit(&json!({
                "max_rank": max_rank,
                "count": functors.len(),
                "automorphisms": to_value(&functors),
            }));
            eprintln!("{} category automorphism(s)", functors.len());
            Ok(ExitCode::SUCCESS)
        }
        FunctorCmd::Certify { monoid, functor } => {
            let m: FiniteMonoid = read_json(&monoid, "monoid")?;
            let phi: TruncatedFunctor = read_json(&functor, "functor")?;
            let skel =
                TruncatedSkeleton::new(m, phi.max_rank, budget).map_err(|e| e.to_string())?;
            let violations = check_functoriality(&skel, &phi);
            if !violations.is_empty() {
                let listed: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
                emit(&json!({ "certified": false, "functor_violations": listed }));
                eprintln!("not a functor: {} violation(s)", violations.len());
                return Ok(ExitCode::from(1));
            }
            match semi_inner_certificate(&skel, &phi, budget).map_err(|e| e.to_string())? {
                Some(cert) => {
                    verify_certificate(&skel, &phi, &cert)
                        .map_err(|e| format!("certificate failed re-verification: {e}"))?;
                    emit(&json!({ "certified": true, "certificate": to_value(&cert) }));
                    eprintln!("semi-inner via automorphism {:?}", cert.sigma.image);
                    Ok(ExitCode::SUCCESS)
                }
                None => {
                    emit(&json!({ "certified": false, "functor": to_value(&phi) }));
                    eprintln!("exhaustive search found no semi-inner decomposition");
                    Ok(ExitCode::from(1))
                }
            }
        }
    }
}

fn run_suite(cmd: SuiteCmd, budget: &Budget) -> Result<ExitCode, String> {
    match cmd {
        SuiteCmd::Run { monoid, max_rank } => {
            let m: FiniteMonoid = read_json(&monoid, "monoid")?;
            let report = run_theorem_suite(&m, max_rank, budget).map_err(|e| e.to_string())?;
            emit(&to_value(&report));
            eprintln!(
                "automorphisms: {}, semi-inner: {}, outer order: {}, matches monoid: {}",
                report.automorphism_count,
                report.all_semi_inner,
                report.outer_order,
                report.outer_matches_monoid
            );
            if !report.complete {
                eprintln!("run incomplete: deadline expired");
                return Ok(ExitCode::from(2));
            }
            let pass = report.object_stable && report.all_semi_inner && report.outer_matches_monoid;
            Ok(if pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
    }
}

fn run_unary(cmd: UnaryCmd, budget: &Budget) -> Result<ExitCode, String> {
    match cmd {
        UnaryCmd::Rigidity { k, l } => {
            let sig = signature_for(k, l)?;
            let report =
                verify_letter_permutation_rigidity(sig, budget).map_err(|e| e.to_string())?;
            emit(&to_value(&report));
            let factorial: usize = (1..=k).product();
            eprintln!(
                "{} product-preserving bijection(s), expected {factorial}",
                report.bijection_count
            );
            let pass = report.bijection_count == factorial && report.all_letter_induced;
            Ok(if pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        UnaryCmd::Perfect { k } => {
            let report = signature_perfectness(k, budget).map_err(|e| e.to_string())?;
            emit(&to_value(&report));
            eprintln!(
                "{}",
                if report.perfect {
                    "perfect"
                } else {
                    "not perfect"
                }
            );
            Ok(ExitCode::SUCCESS)
        }
        UnaryCmd::Twist { k, l, pi, max_rank } => {
            let sig = signature_for(k, l)?;
            let pi: Vec<usize> = pi
                .split(',')
                .map(|part| part.trim().parse::<usize>())
                .collect::<Result<_, _>>()
                .map_err(|e| format!("cannot parse --pi: {e}"))?;
            let (_, report) =
                permutation_twist(sig, &pi, max_rank, budget).map_err(|e| e.to_string())?;
            emit(&to_value(&report));
            eprintln!("checked {} equation instance(s)", report.checked_elements);
            Ok(if report.equation_holds {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
    }
}

fn signature_for(k: usize, l: Option<usize>) -> Result<UnarySignature, String> {
    match l {
        Some(l) => UnarySignature::new(k, l),
        None => UnarySignature::default_for(k),
    }
    .map_err(|e| e.to_string())
}
