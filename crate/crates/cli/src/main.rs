//! `ranklab`: every verifier, oracle, generator, and search from the
//! library as a subcommand over JSON instance files.
//!
//! One JSON document per run on standard output. Exit codes: 0 for clean
//! verdicts (including `not_applicable`, failed premises, and obstructions),
//! 1 when a counterexample or a contradiction with a verified statement
//! turns up, 2 for invalid input.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use ranklab::error::Error;
use ranklab::jsonio::{self, ParsedInstance};
use ranklab::{
    build_chain, certify_uniqueness, check_general_position, check_lemma_conditions,
    classify_2d_subspace, minimal_zero_partition, product_sum_pair, reduction_pairing,
    search_counterexamples, tensor_rank, tight_example, unique_decomposition_check,
    verify_conjecture_instance, verify_rank_version, verify_two_dim_case, zero_sum_subsets,
    DenseTensor, FieldSpec, LemmaCheck, ProductVectorSet, RankBound, Result, Scalar, SearchSpace,
    SearchTarget, SymmetryOptions, VerdictStatus,
};

#[derive(Parser)]
#[command(name = "ranklab", version, about = "Exact tensor rank laboratory")]
struct Cli {
    /// Cap on exhaustive work (candidate tuples, subsets) per operation.
    #[arg(long, global = true, default_value_t = ranklab::DEFAULT_BUDGET)]
    budget: u64,

    /// Worker threads for the parallel sweeps; defaults to all cores.
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// Seed for pseudo-random instance generation. Accepted everywhere for
    /// script stability; the current subcommands are all deterministic and
    /// ignore it.
    #[arg(long, global = true)]
    #[allow(dead_code)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check that every choice of d_j mode-j factors spans d_j dimensions.
    CheckGp {
        #[arg(long = "in")]
        input: PathBuf,
        /// Requested dimensions, one per mode: --request 2,2,2
        #[arg(long, value_delimiter = ',', required = true)]
        request: Vec<usize>,
    },
    /// Certify unique decomposability from the per-mode Kruskal ranks.
    KruskalCert {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Exact tensor rank by flattening bounds plus exhaustive search,
    /// with a witness decomposition. With --unique, also enumerate every
    /// decomposition at that rank.
    Rank {
        #[arg(long = "in")]
        input: PathBuf,
        /// Largest rank to consider before giving up.
        #[arg(long)]
        max_r: Option<usize>,
        /// Check uniqueness of the decomposition at the found rank.
        #[arg(long)]
        unique: bool,
    },
    /// List every nonempty subset with zero sum.
    ZeroSubsets {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Partition a zero-sum family into irreducible zero-sum blocks.
    Partition {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Order two block families into an overlapping chain cover.
    Chain {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Classify the plane spanned by two tensors by its product lines.
    ClassifySubspace {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Decide whether a weighted sum of two product vectors stays a
    /// product vector.
    ProductPair {
        #[arg(long = "in")]
        input: PathBuf,
        /// Coefficients a1,a2 in the instance's field; default 1,1.
        #[arg(long, value_delimiter = ',')]
        coeffs: Option<Vec<String>>,
    },
    /// Emit the n-vector zero-sum family that meets the two-dimensional
    /// bound with equality.
    TightGen {
        #[arg(long)]
        n: usize,
        /// Ground field: Q or a prime in {2, 3, 5, 7}.
        #[arg(long, default_value = "Q")]
        field: String,
    },
    /// Verify one statement on one instance. Targets: conj13, thm32,
    /// thm41, conj52.
    Verify {
        #[arg(long)]
        target: String,
        #[arg(long = "in")]
        input: PathBuf,
        /// Stated total rank, required by the rank-relative targets
        /// thm41 and conj52.
        #[arg(long)]
        r: Option<usize>,
    },
    /// Sweep every multiset instance of a finite space, hunting for
    /// counterexamples to one target statement.
    Search {
        #[arg(long)]
        target: String,
        /// Ground field: a prime in {2, 3, 5, 7}.
        #[arg(long, default_value = "2")]
        field: String,
        /// Mode dimensions at the largest mode count: --dims 2,2,2
        #[arg(long, value_delimiter = ',', required = true)]
        dims: Vec<usize>,
        #[arg(long, default_value_t = 1)]
        m_min: usize,
        #[arg(long)]
        m_max: usize,
        #[arg(long, default_value_t = 2)]
        n_min: usize,
        #[arg(long)]
        n_max: usize,
        /// Scan every multiset instead of one representative per
        /// relabeling orbit.
        #[arg(long)]
        no_orbit_reduction: bool,
    },
    /// Try to pair two equal-sum decompositions vector by vector.
    Pairing {
        #[arg(long)]
        xs: PathBuf,
        #[arg(long)]
        ys: PathBuf,
    },
}

fn read_instance(path: &Path) -> Result<ParsedInstance> {
    let text = fs::read_to_string(path).map_err(|e| Error::Parse {
        location: path.display().to_string(),
        message: e.to_string(),
    })?;
    jsonio::parse_instance(&text)
}

fn vectors_only(instance: ParsedInstance) -> Result<ProductVectorSet> {
    match instance {
        ParsedInstance::Vectors(s) => Ok(s),
        _ => Err(Error::InvalidArgument(
            "this command needs an instance with a \"vectors\" payload".into(),
        )),
    }
}

fn parse_field_token(token: &str) -> Result<FieldSpec> {
    if token.eq_ignore_ascii_case("q") {
        return Ok(FieldSpec::Rationals);
    }
    let p: u64 = token
        .parse()
        .map_err(|_| Error::InvalidArgument(format!("field must be Q or a prime, got {token}")))?;
    FieldSpec::prime(p)
}

fn parse_verify_target(token: &str) -> Result<SearchTarget> {
    jsonio::parse_target(token).ok_or_else(|| {
        Error::InvalidArgument(format!(
            "unknown target {token}; expected conj13, thm32, thm41 or conj52"
        ))
    })
}

fn verdict_exit(status: VerdictStatus) -> u8 {
    if status == VerdictStatus::Counterexample {
        1
    } else {
        0
    }
}

fn execute(command: &Command, budget: u64) -> Result<(Value, u8)> {
    match command {
        Command::CheckGp { input, request } => {
            let s = vectors_only(read_instance(input)?)?;
            let report = check_general_position(&s, request)?;
            Ok((jsonio::general_position_to_value(&report), 0))
        }
        Command::KruskalCert { input } => {
            let s = vectors_only(read_instance(input)?)?;
            let cert = certify_uniqueness(&s)?;
            Ok((jsonio::certificate_to_value(&cert), 0))
        }
        Command::Rank { input, max_r, unique } => {
            let t: DenseTensor = match read_instance(input)? {
                ParsedInstance::Vectors(s) => s.sum_all(),
                ParsedInstance::Tensor(t) => t,
                ParsedInstance::Tensors(_) => {
                    return Err(Error::InvalidArgument(
                        "rank takes a single tensor or a vector family".into(),
                    ))
                }
            };
            let cap = max_r.unwrap_or_else(|| t.signature().entry_count());
            let result = tensor_rank(&t, cap, budget)?;
            let mut doc = jsonio::rank_result_to_value(&result);
            if *unique {
                let uniqueness = unique_decomposition_check(&t, result.rank, budget)?;
                doc["uniqueness"] = jsonio::uniqueness_to_value(&uniqueness);
            }
            Ok((doc, 0))
        }
        Command::ZeroSubsets { input } => {
            let s = vectors_only(read_instance(input)?)?;
            let subsets = zero_sum_subsets(&s)?;
            Ok((jsonio::subsets_to_value(&subsets), 0))
        }
        Command::Partition { input } => {
            let s = vectors_only(read_instance(input)?)?;
            let partition = minimal_zero_partition(&s)?;
            Ok((jsonio::partition_to_value(&partition), 0))
        }
        Command::Chain { input } => {
            let text = fs::read_to_string(input).map_err(|e| Error::Parse {
                location: input.display().to_string(),
                message: e.to_string(),
            })?;
            let problem = jsonio::parse_chain_problem(&text)?;
            let conditions = check_lemma_conditions(&problem);
            let doc = match &conditions {
                LemmaCheck::Ok => {
                    let chain = build_chain(&problem)?;
                    json!({
                        "conditions": jsonio::lemma_check_to_value(&conditions),
                        "chain": jsonio::chain_to_value(&chain),
                    })
                }
                LemmaCheck::Violation { .. } => json!({
                    "conditions": jsonio::lemma_check_to_value(&conditions),
                }),
            };
            Ok((doc, 0))
        }
        Command::ClassifySubspace { input } => {
            let (t1, t2) = match read_instance(input)? {
                ParsedInstance::Tensors(ts) if ts.len() == 2 => (ts[0].clone(), ts[1].clone()),
                ParsedInstance::Vectors(s) if s.len() == 2 => {
                    (s.vector(0).expand(), s.vector(1).expand())
                }
                _ => {
                    return Err(Error::InvalidArgument(
                        "classify-subspace needs exactly two tensors".into(),
                    ))
                }
            };
            let category = classify_2d_subspace(&t1, &t2)?;
            Ok((jsonio::subspace_to_value(&category), 0))
        }
        Command::ProductPair { input, coeffs } => {
            let s = vectors_only(read_instance(input)?)?;
            if s.len() != 2 {
                return Err(Error::InvalidArgument(format!(
                    "product-pair needs exactly two vectors, got {}",
                    s.len()
                )));
            }
            let field = s.signature().field();
            let (a1, a2) = match coeffs {
                None => (Scalar::one(field), Scalar::one(field)),
                Some(pair) if pair.len() == 2 => {
                    (Scalar::parse(field, &pair[0])?, Scalar::parse(field, &pair[1])?)
                }
                Some(pair) => {
                    return Err(Error::InvalidArgument(format!(
                        "--coeffs takes two values, got {}",
                        pair.len()
                    )))
                }
            };
            let sum = product_sum_pair(s.vector(0), s.vector(1), &a1, &a2)?;
            Ok((jsonio::pair_sum_to_value(&sum), 0))
        }
        Command::TightGen { n, field } => {
            let field = parse_field_token(field)?;
            let s = tight_example(*n, field)?;
            Ok((jsonio::set_to_value(&s), 0))
        }
        Command::Verify { target, input, r } => {
            let parsed_target = parse_verify_target(target)?;
            let s = vectors_only(read_instance(input)?)?;
            let verdict = match parsed_target {
                SearchTarget::Subset => verify_conjecture_instance(&s)?,
                SearchTarget::TwoDim => verify_two_dim_case(&s)?,
                kind @ (SearchTarget::RankModeCount | SearchTarget::RankSpanSum) => {
                    let r = r.ok_or_else(|| {
                        Error::InvalidArgument(format!("--r is required for {target}"))
                    })?;
                    let bound = if kind == SearchTarget::RankModeCount {
                        RankBound::ModeCount
                    } else {
                        RankBound::SpanSum
                    };
                    verify_rank_version(&s, r, bound, budget)?
                }
            };
            let code = verdict_exit(verdict.status);
            Ok((jsonio::verdict_to_value(&verdict), code))
        }
        Command::Search { target, field, dims, m_min, m_max, n_min, n_max, no_orbit_reduction } => {
            let target = parse_verify_target(target)?;
            let space = SearchSpace::new(
                parse_field_token(field)?,
                dims.clone(),
                (*m_min, *m_max),
                (*n_min, *n_max),
                SymmetryOptions { fix_first_vector_orbit: !no_orbit_reduction },
            )?;
            let report = search_counterexamples(&space, target, budget)?;
            let code = if report.counterexamples.is_empty() { 0 } else { 1 };
            Ok((jsonio::search_report_to_value(&report, &space), code))
        }
        Command::Pairing { xs, ys } => {
            let xs = vectors_only(read_instance(xs)?)?;
            let ys = vectors_only(read_instance(ys)?)?;
            let outcome = reduction_pairing(&xs, &ys)?;
            Ok((jsonio::pairing_to_value(&outcome), 0))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.workers {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(|e| Error::InvalidArgument(format!("worker pool: {e}")))
            .and_then(|pool| pool.install(|| execute(&cli.command, cli.budget))),
        None => execute(&cli.command, cli.budget),
    };
    match outcome {
        Ok((doc, code)) => {
            println!("{}", serde_json::to_string_pretty(&doc).expect("serializable document"));
            ExitCode::from(code)
        }
        Err(e) => {
            // A contradiction with a verified statement is a finding, not
            // an input problem; everything else at this level is.
            let code = match &e {
                Error::ContradictionDetected(_) | Error::Stalled => 1,
                _ => 2,
            };
            println!(
                "{}",
                serde_json::to_string_pretty(&jsonio::error_to_value(&e))
                    .expect("serializable document")
            );
            ExitCode::from(code)
        }
    }
}
