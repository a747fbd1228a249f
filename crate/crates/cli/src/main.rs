use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use fpfix::analysis::{self, ChainParams, StableImage};
use fpfix::folding::DEFAULT_MAX_VERTICES;
use fpfix::report::{self, Format, Record};
use fpfix::verify::{self, VerifyParams};
use fpfix::{catalog, formats, Endomorphism, Error, Signature, SubgroupGraph};

const EXIT_FINDINGS: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_CAP: u8 = 3;

#[derive(Parser)]
#[command(name = "fpfix")]
#[command(about = "Endomorphisms of free products of finite groups and a free group")]
#[command(version)]
struct Cli {
    /// Output format
    #[arg(long, global = true, value_enum, default_value = "text")]
    format: OutputFormat,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Text,
    Machine,
}

#[derive(clap::Args)]
struct GroupArg {
    /// Signature file
    #[arg(short = 'g', long = "group", visible_alias = "g")]
    group: PathBuf,
}

#[derive(clap::Args)]
struct MapArgs {
    #[command(flatten)]
    group: GroupArg,

    /// Endomorphism file
    #[arg(short = 'e', long = "endo", visible_alias = "e")]
    endo: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Print the normal form of a word
    Normalize {
        #[command(flatten)]
        group: GroupArg,
        #[arg(short = 'w', long)]
        word: String,
    },
    /// Kurosh decomposition of the subgroup generated by a word list
    Rank {
        #[command(flatten)]
        group: GroupArg,
        /// File with one generator word per line
        #[arg(short = 's', long = "subgroup")]
        subgroup: PathBuf,
    },
    /// Iterated images φ^k(G) with their Kurosh ranks
    Chain {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long, default_value_t = analysis::DEFAULT_MAX_K)]
        max_k: usize,
    },
    /// Stable image, when the chain stabilizes within the cutoff
    Stable {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long, default_value_t = analysis::DEFAULT_MAX_K)]
        max_k: usize,
    },
    /// Bounded search for the fixed subgroup
    Fix {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long, default_value_t = analysis::DEFAULT_FIX_LEN)]
        max_len: usize,
        #[arg(long, default_value_t = analysis::DEFAULT_FIX_EXP)]
        max_exp: i64,
    },
    /// Centralizer of a word
    Centralizer {
        #[command(flatten)]
        group: GroupArg,
        #[arg(short = 'w', long)]
        word: String,
    },
    /// Seeded property checks
    Verify {
        /// Built-in signature name, or `all`
        #[arg(long, conflicts_with = "group")]
        catalog: Option<String>,
        /// Signature file
        #[arg(short = 'g', long = "group", visible_alias = "g")]
        group: Option<PathBuf>,
        #[arg(long, default_value_t = 100)]
        iters: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Run iterations on one thread
        #[arg(long)]
        serial: bool,
    },
}

/// An error tied to the input it came from.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }
}

fn classify(e: Error, source: Option<&Path>) -> Failure {
    let code = match e {
        Error::CapExceeded { .. } => EXIT_CAP,
        _ => EXIT_INPUT,
    };
    let message = match source {
        Some(p) => format!("{}: {e}", p.display()),
        None => e.to_string(),
    };
    Failure { code, message }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn load_signature(path: &Path) -> Result<Signature, Failure> {
    formats::parse_signature(&read(path)?).map_err(|e| classify(e, Some(path)))
}

fn load_map(args: &MapArgs) -> Result<(Signature, Endomorphism), Failure> {
    let sig = load_signature(&args.group.group)?;
    let phi = formats::parse_endomorphism(&sig, &read(&args.endo)?).map_err(|e| classify(e, Some(&args.endo)))?;
    Ok((sig, phi))
}

fn max_vertices() -> Result<usize, Failure> {
    match std::env::var("FPFIX_MAX_VERTICES") {
        Ok(v) => v
            .trim()
            .parse()
            .ok()
            .filter(|&n: &usize| n > 0)
            .ok_or_else(|| Failure::input(format!("FPFIX_MAX_VERTICES: expected a positive integer, found `{v}`"))),
        Err(_) => Ok(DEFAULT_MAX_VERTICES),
    }
}

fn run(cli: Cli) -> Result<(Vec<Record>, bool), Failure> {
    let caps = max_vertices()?;
    let plain = |e: Error| classify(e, None);
    let chain_params = |max_k: usize| -> Result<ChainParams, Failure> {
        if max_k == 0 {
            return Err(Failure::input("--max-k must be positive"));
        }
        Ok(ChainParams {
            max_vertices: caps,
            ..ChainParams::with_max_k(max_k)
        })
    };
    match cli.command {
        Command::Normalize { group, word } => {
            let sig = load_signature(&group.group)?;
            let w = sig.parse_word(&word).map_err(|e| Failure::input(format!("word: {e}")))?;
            Ok((vec![report::word_record(&sig, &w)], false))
        }
        Command::Rank { group, subgroup } => {
            let sig = load_signature(&group.group)?;
            let gens = formats::parse_generators(&sig, &read(&subgroup)?).map_err(|e| classify(e, Some(&subgroup)))?;
            let graph = SubgroupGraph::from_generators_capped(&sig, &gens, caps).map_err(plain)?;
            Ok((report::rank_records(&graph).map_err(plain)?, false))
        }
        Command::Chain { map, max_k } => {
            let (sig, phi) = load_map(&map)?;
            let chain = analysis::image_chain(&phi, &chain_params(max_k)?).map_err(plain)?;
            Ok((report::chain_records(&sig, &chain), false))
        }
        Command::Stable { map, max_k } => {
            let (sig, phi) = load_map(&map)?;
            match analysis::stable_image(&phi, &chain_params(max_k)?).map_err(plain)? {
                StableImage::Stabilized { k, graph } => {
                    let onto = analysis::verify_stable_automorphism(&phi, &graph).map_err(plain)?;
                    Ok((report::stable_records(&sig, k, &graph, onto).map_err(plain)?, false))
                }
                StableImage::NotStabilized(chain) => {
                    let mut recs = vec![Record::new("stable").field("stabilized_at", "none")];
                    recs.extend(report::chain_records(&sig, &chain));
                    Ok((recs, false))
                }
            }
        }
        Command::Fix { map, max_len, max_exp } => {
            if max_len == 0 || max_exp <= 0 {
                return Err(Failure::input("--max-len and --max-exp must be positive"));
            }
            let (sig, phi) = load_map(&map)?;
            let fix = analysis::fix_report(&phi, max_len, max_exp).map_err(plain)?;
            let flagged = fix.needs_inspection();
            Ok((report::fix_records(&sig, &fix), flagged))
        }
        Command::Centralizer { group, word } => {
            let sig = load_signature(&group.group)?;
            let w = sig.parse_word(&word).map_err(|e| Failure::input(format!("word: {e}")))?;
            let graph = analysis::centralizer(&sig, &w).map_err(plain)?;
            Ok((report::rank_records(&graph).map_err(plain)?, false))
        }
        Command::Verify {
            catalog: name,
            group,
            iters,
            seed,
            serial,
        } => {
            let cat: Vec<(String, Signature)> = match (name.as_deref(), group) {
                (_, Some(path)) => {
                    let stem = path
                        .file_stem()
                        .map_or_else(|| "input".to_string(), |s| s.to_string_lossy().into_owned());
                    vec![(stem, load_signature(&path)?)]
                }
                (None | Some("all"), None) => catalog::all()
                    .into_iter()
                    .map(|(n, s)| (n.to_string(), s))
                    .collect(),
                (Some(n), None) => {
                    let sig = catalog::by_name(n).ok_or_else(|| {
                        Failure::input(format!("unknown catalog `{n}`; known: all, {}", catalog::NAMES.join(", ")))
                    })?;
                    vec![(n.to_string(), sig)]
                }
            };
            let params = VerifyParams {
                chain: ChainParams {
                    max_vertices: caps,
                    ..VerifyParams::default().chain
                },
                parallel: !serial,
                ..VerifyParams::default()
            };
            let report = verify::verify_suite(&cat, iters, seed, &params);
            Ok((report::verify_records(&report), !report.is_clean()))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = match cli.format {
        OutputFormat::Text => Format::Text,
        OutputFormat::Machine => Format::Machine,
    };
    let bare_word = matches!(cli.command, Command::Normalize { .. }) && matches!(format, Format::Text);
    match run(cli) {
        Ok((records, flagged)) => {
            let out = if bare_word {
                format!("{}\n", records[0].get("word").unwrap_or_default())
            } else {
                report::render(&records, format)
            };
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(out.as_bytes());
            if flagged {
                ExitCode::from(EXIT_FINDINGS)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
