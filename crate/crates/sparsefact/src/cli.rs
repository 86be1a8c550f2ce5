//! Command-line interface: generation, factorization, completion,
//! closability, enumeration, and chain verification over JSON files.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 incompatible
//! completion, 3 stalled completion, 4 search budget exceeded, 5 chains not
//! scale-equivalent.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::emd::{emd_complete, EmdOutcome};
use crate::fixtures;
use crate::hier::{
    hierarchical_factorize, make_tree, verify_s_unique_recovery, FactorChain, FactorizeMode,
    PartitioningTree, TreeSpec,
};
use crate::json::{
    self, ChainManifestJson, CertificateJson, CompletionJson, MatrixJson, ResidualJson,
    ScalingChainJson,
};
use crate::matrix::ComplexMatrix;
use crate::oracle::{enumerate_partitions_with_budget, DEFAULT_NODE_BUDGET};
use crate::supports::{butterfly_support, closure, SupportFamilySpec};
use crate::tol::TolerancePolicy;
use crate::transforms::{bit_reversal_perm, butterfly_factors, gen_transform, TransformKind};
use crate::{Error, Result};

const EXIT_OK: u8 = 0;
const EXIT_USAGE: u8 = 1;
const EXIT_INCOMPATIBLE: u8 = 2;
const EXIT_STALLED: u8 = 3;
const EXIT_BUDGET: u8 = 4;
const EXIT_NOT_EQUIVALENT: u8 = 5;

/// Print a line to stdout, tolerating a closed pipe.
fn emit(text: &str) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{text}");
}

#[derive(Parser)]
#[command(
    name = "sparsefact",
    version,
    about = "Sparse matrix factorization with fixed supports: completion, \
             butterfly factorization, and uniqueness certification"
)]
struct Cli {
    #[command(flatten)]
    globals: Globals,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Globals {
    /// Relative tolerance for comparisons.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tolerance: f64,
    /// Magnitudes at or below this count as zero.
    #[arg(long, global = true, default_value_t = 1e-12)]
    zero_threshold: f64,
    /// Seed for random fixture generation.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a transform matrix or a butterfly factor chain.
    Gen {
        /// dft | dct2 | dst2 | hadamard | butterfly-chain |
        /// random-butterfly-chain
        #[arg(long)]
        kind: String,
        /// Matrix size N.
        #[arg(long)]
        size: usize,
        /// Output file for single-matrix kinds.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Output directory for chain kinds.
        #[arg(long)]
        out_dir: Option<PathBuf>,
        /// Fold the bit-reversal permutation into the innermost factor.
        #[arg(long)]
        dft_bit_reversal: bool,
    },
    /// Hierarchically factorize a matrix under butterfly supports.
    Factorize {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        layers: usize,
        /// left-comb | right-comb | balanced | path to an explicit tree file
        #[arg(long, default_value = "balanced")]
        tree: String,
        /// Treat the input as a fast transform with the bit reversal folded
        /// into the innermost support.
        #[arg(long)]
        dft_bit_reversal: bool,
        /// exact | svd
        #[arg(long, default_value = "exact")]
        mode: String,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Complete a decomposition from fixed rank-one supports.
    Complete {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        tuple: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Decide closability of a support tuple.
    Closability {
        #[arg(long)]
        tuple: PathBuf,
    },
    /// Enumerate all rank-one partitions of a matrix support.
    Enumerate {
        #[arg(long)]
        matrix: PathBuf,
        /// Row budget per block (left factor column sparsity).
        #[arg(long)]
        left_sparsity: usize,
        /// Column budget per block (right factor column sparsity).
        #[arg(long)]
        right_sparsity: usize,
        /// Number of blocks; defaults to the matrix column count.
        #[arg(long)]
        rank: Option<usize>,
        /// Branch-node budget for the search.
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Check two factor chains for diagonal scale equivalence.
    Verify {
        /// Directory holding the reference chain's manifest.json.
        #[arg(long)]
        original: PathBuf,
        /// Directory holding the candidate chain's manifest.json.
        #[arg(long)]
        recovered: PathBuf,
    },
}

/// Run the CLI on `args` (without the program name) and return the exit
/// code.
pub fn run(args: &[String]) -> u8 {
    let with_name = std::iter::once("sparsefact".to_string()).chain(args.iter().cloned());
    let cli = match Cli::try_parse_from(with_name) {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let tol = match TolerancePolicy::new(cli.globals.zero_threshold, cli.globals.tolerance) {
        Ok(tol) => tol,
        Err(err) => {
            eprintln!("error: {err}");
            return EXIT_USAGE;
        }
    };
    match dispatch(cli.command, &cli.globals, &tol) {
        Ok(code) => code,
        Err(Error::BudgetExceeded { budget }) => {
            eprintln!("error: search budget of {budget} nodes exceeded");
            EXIT_BUDGET
        }
        Err(err) => {
            eprintln!("error: {err}");
            EXIT_USAGE
        }
    }
}

fn dispatch(command: Command, globals: &Globals, tol: &TolerancePolicy) -> Result<u8> {
    match command {
        Command::Gen {
            kind,
            size,
            out,
            out_dir,
            dft_bit_reversal,
        } => gen(&kind, size, out, out_dir, dft_bit_reversal, globals.seed),
        Command::Factorize {
            matrix,
            layers,
            tree,
            dft_bit_reversal,
            mode,
            out_dir,
        } => factorize(&matrix, layers, &tree, dft_bit_reversal, &mode, &out_dir, tol),
        Command::Complete { matrix, tuple, out } => complete(&matrix, &tuple, &out, tol),
        Command::Closability { tuple } => closability(&tuple),
        Command::Enumerate {
            matrix,
            left_sparsity,
            right_sparsity,
            rank,
            budget,
        } => enumerate(&matrix, left_sparsity, right_sparsity, rank, budget, tol),
        Command::Verify {
            original,
            recovered,
        } => verify(&original, &recovered, tol),
    }
}

fn gen(
    kind: &str,
    size: usize,
    out: Option<PathBuf>,
    out_dir: Option<PathBuf>,
    dft_bit_reversal: bool,
    seed: u64,
) -> Result<u8> {
    match kind {
        "dft" | "dct2" | "dst2" | "hadamard" => {
            let kind = TransformKind::parse(kind)?;
            let out = out.ok_or_else(|| {
                Error::InvalidInput("single-matrix kinds require --out".into())
            })?;
            json::write_matrix(&out, &gen_transform(kind, size)?)?;
            Ok(EXIT_OK)
        }
        "butterfly-chain" | "random-butterfly-chain" => {
            let dir = out_dir.ok_or_else(|| {
                Error::InvalidInput("chain kinds require --out-dir".into())
            })?;
            let layers = crate::transforms::layers_for(size)?;
            let factors = if kind == "butterfly-chain" {
                let mut chain = butterfly_factors(layers)?;
                if dft_bit_reversal {
                    let r = bit_reversal_perm(size)?;
                    let innermost = chain.pop().expect("layers >= 1").permute_cols(&r)?;
                    chain.push(innermost);
                }
                chain
            } else {
                let mut rng = fixtures::rng(seed);
                fixtures::random_butterfly_chain(&mut rng, layers, dft_bit_reversal)?
            };
            write_chain(&dir, &factors, layers, dft_bit_reversal, None, None, None)?;
            Ok(EXIT_OK)
        }
        other => Err(Error::InvalidInput(format!(
            "unknown generation kind '{other}'"
        ))),
    }
}

/// Write factors (leftmost first) as factor_<layer>.json plus manifest.json.
fn write_chain(
    dir: &Path,
    factors: &[ComplexMatrix],
    layers: usize,
    dft_bit_reversal: bool,
    tree: Option<&str>,
    mode: Option<&str>,
    residuals: Option<&[(usize, f64)]>,
) -> Result<()> {
    std::fs::create_dir_all(dir)
        .map_err(|e| Error::InvalidInput(format!("{}: {e}", dir.display())))?;
    let mut names = Vec::with_capacity(factors.len());
    for (offset, factor) in factors.iter().enumerate() {
        let level = layers - offset;
        let name = format!("factor_{level}.json");
        json::write_matrix(&dir.join(&name), factor)?;
        names.push(name);
    }
    let manifest = ChainManifestJson {
        n: factors[0].rows(),
        layers,
        dft_bit_reversal,
        factors: names,
        tree: tree.map(str::to_string),
        mode: mode.map(str::to_string),
        residuals: residuals.map(|rs| {
            rs.iter()
                .map(|&(level, relative_error)| ResidualJson {
                    level,
                    relative_error,
                })
                .collect()
        }),
    };
    json::write_manifest(&dir.join("manifest.json"), &manifest)
}

fn parse_tree(tree: &str, layers: usize) -> Result<(PartitioningTree, String)> {
    let (spec, label) = match tree {
        "left-comb" => (TreeSpec::LeftComb, "left-comb".to_string()),
        "right-comb" => (TreeSpec::RightComb, "right-comb".to_string()),
        "balanced" => (TreeSpec::Balanced, "balanced".to_string()),
        path => (
            TreeSpec::Explicit(json::read_tree(Path::new(path))?),
            "explicit".to_string(),
        ),
    };
    Ok((make_tree(spec, 1, layers)?, label))
}

fn factorize(
    matrix: &Path,
    layers: usize,
    tree: &str,
    dft_bit_reversal: bool,
    mode: &str,
    out_dir: &Path,
    tol: &TolerancePolicy,
) -> Result<u8> {
    let z = json::read_matrix(matrix)?;
    let (tree, tree_label) = parse_tree(tree, layers)?;
    let mode_value = match mode {
        "exact" => FactorizeMode::Exact,
        "svd" => FactorizeMode::SvdProject,
        other => {
            return Err(Error::InvalidInput(format!(
                "unknown mode '{other}', expected exact or svd"
            )))
        }
    };
    let chain = hierarchical_factorize(&z, &tree, layers, mode_value, dft_bit_reversal, tol)?;
    write_chain(
        out_dir,
        chain.factors(),
        layers,
        dft_bit_reversal,
        Some(&tree_label),
        Some(mode),
        Some(chain.residuals()),
    )?;
    Ok(EXIT_OK)
}

fn complete(matrix: &Path, tuple: &Path, out: &Path, tol: &TolerancePolicy) -> Result<u8> {
    let z = json::read_matrix(matrix)?;
    let supports = json::read_tuple(tuple)?;
    let outcome = emd_complete(&z, &supports, tol)?;
    let (report, code) = match outcome {
        EmdOutcome::Complete(contributions) => {
            let matrices = contributions.matrices()?;
            let report = CompletionJson {
                outcome: "complete".to_string(),
                cell: None,
                contributions: matrices.iter().map(MatrixJson::from_matrix).collect(),
                missing: None,
            };
            (report, EXIT_OK)
        }
        EmdOutcome::Incompatible { row, col } => (
            CompletionJson {
                outcome: "incompatible".to_string(),
                cell: Some([row, col]),
                contributions: Vec::new(),
                missing: None,
            },
            EXIT_INCOMPATIBLE,
        ),
        EmdOutcome::Stalled(state) => (
            CompletionJson {
                outcome: "stalled".to_string(),
                cell: None,
                contributions: Vec::new(),
                missing: Some(state.missing_count()),
            },
            EXIT_STALLED,
        ),
    };
    let text = json::pretty(&report)? + "\n";
    std::fs::write(out, text).map_err(|e| Error::InvalidInput(format!("{}: {e}", out.display())))?;
    Ok(code)
}

fn closability(tuple: &Path) -> Result<u8> {
    let supports = json::read_tuple(tuple)?;
    let graphs = crate::supports::observable_graphs(&supports);
    let (closed, steps) = closure(&graphs);
    let closable = closed.all_complete();
    emit(&serde_json::json!({ "closable": closable, "steps": steps }).to_string());
    Ok(EXIT_OK)
}

fn enumerate(
    matrix: &Path,
    left_sparsity: usize,
    right_sparsity: usize,
    rank: Option<usize>,
    budget: Option<u64>,
    tol: &TolerancePolicy,
) -> Result<u8> {
    let z = json::read_matrix(matrix)?;
    let fam = SupportFamilySpec {
        m: z.rows(),
        n: z.cols(),
        r: rank.unwrap_or(z.cols()),
        a: left_sparsity,
        b: right_sparsity,
    };
    let cert = enumerate_partitions_with_budget(
        &z,
        &fam,
        budget.unwrap_or(DEFAULT_NODE_BUDGET),
        tol,
    )?;
    emit(&json::pretty(&CertificateJson::from_certificate(&cert))?);
    Ok(EXIT_OK)
}

fn verify(original: &Path, recovered: &Path, tol: &TolerancePolicy) -> Result<u8> {
    let (orig_manifest, orig_factors) = json::read_chain(original)?;
    let (rec_manifest, rec_factors) = json::read_chain(recovered)?;
    if orig_factors.len() != rec_factors.len() {
        return Err(Error::InvalidInput(format!(
            "chain lengths differ: {} factors against {}",
            orig_factors.len(),
            rec_factors.len()
        )));
    }
    let layers = orig_manifest.layers;
    let original_chain = build_chain(orig_factors, layers, orig_manifest.dft_bit_reversal)?;
    let recovered_chain = build_chain(rec_factors, layers, rec_manifest.dft_bit_reversal)?;
    match verify_s_unique_recovery(&original_chain, &recovered_chain, tol) {
        Some(witness) => {
            emit(&json::pretty(&ScalingChainJson::from_witness(&witness))?);
            Ok(EXIT_OK)
        }
        None => {
            emit(&json::pretty(&ScalingChainJson::not_equivalent())?);
            Ok(EXIT_NOT_EQUIVALENT)
        }
    }
}

fn build_chain(
    factors: Vec<ComplexMatrix>,
    layers: usize,
    dft_bit_reversal: bool,
) -> Result<FactorChain> {
    let n = factors[0].rows();
    let mut supports = Vec::with_capacity(factors.len());
    for offset in 0..factors.len() {
        let level = layers - offset;
        let mut mask = butterfly_support(level, layers)?;
        if dft_bit_reversal && level == 1 {
            mask = mask.permute_cols(&bit_reversal_perm(n)?)?;
        }
        supports.push(mask);
    }
    FactorChain::new(factors, supports)
}
