//! `phylo`: command-line access to phylo-core.
//!
//! Exit codes: 0 success, 1 invalid input, 2 internal invariant violation,
//! 3 numeric non-convergence. Results go to stdout, diagnostics to stderr.

use std::fs;
use std::io::Read;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use thiserror::Error;

use phylo_core::coalgebra::{w_membership, Coalgebra, CoalgebraError, LeafTensor};
use phylo_core::json::{
    decomposition_from_json, distribution_from_json, generator_from_json, generator_to_json, matrix_to_json,
    mixed_from_json, mixed_to_json, tensor_to_json, DecompositionJson, JsonError,
};
use phylo_core::markov::{jukes_cantor, limit_operator, simulate_branching, MarkovError};
use phylo_core::newick::{parse_newick, parse_newick_extended, serialize_newick, NewickError};
use phylo_core::operad::{reduce_coproduct_tree, reduce_with_order, to_phylo, MoveOrder, OperadError};
use phylo_core::perm::Permutation;
use phylo_core::space::{
    bhv_distance, decompose, decompose1, enumerate_binary_topologies, orthant_census, shape_from_clusters,
    DistanceMode, SpaceError,
};
use phylo_core::tree::{Mode, PlanarTree};

const DEFAULT_TOL: f64 = 1e-10;

#[derive(Error, Debug)]
enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
    #[error("{0}")]
    NoConvergence(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 1,
            CliError::Invariant(_) => 2,
            CliError::NoConvergence(_) => 3,
        }
    }
}

impl From<MarkovError> for CliError {
    fn from(e: MarkovError) -> Self {
        match e {
            MarkovError::NoConvergence { .. } => CliError::NoConvergence(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<CoalgebraError> for CliError {
    fn from(e: CoalgebraError) -> Self {
        match e {
            CoalgebraError::Markov(m) => m.into(),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<JsonError> for CliError {
    fn from(e: JsonError) -> Self {
        match e {
            JsonError::Markov(m) => m.into(),
            JsonError::Coalgebra(c) => c.into(),
            _ => CliError::Input(e.to_string()),
        }
    }
}

macro_rules! input_errors {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Input(e.to_string())
            }
        }
    )*};
}
input_errors!(NewickError, OperadError, SpaceError, phylo_core::perm::PermutationError);

#[derive(Parser)]
#[command(name = "phylo", version, about = "Phylogenetic trees as operations of an operad")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exact4,
    Cone,
    Auto,
}

#[derive(Subcommand)]
enum Command {
    /// Check a Newick tree and report its size.
    Validate { tree: String },
    /// Print the canonical Newick form.
    Canon { tree: String },
    /// Graft the root of B onto leaf `--at` of A.
    Compose {
        #[arg(long)]
        at: usize,
        a: String,
        b: String,
    },
    /// Relabel leaves by a permutation given as images, e.g. "2,3,1".
    Act {
        #[arg(long)]
        perm: String,
        tree: String,
    },
    /// Reduce a Com/length-labelled tree (JSON) to normal form.
    Reduce {
        input: String,
        /// Choose redexes at random with this seed instead of bottom-up.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Split a tree into its metric tree and external lengths.
    Decompose { tree: String },
    /// Inverse of `decompose`.
    Recompose { input: String },
    /// List binary topologies on n leaves and count faces of each dimension.
    Topologies {
        #[arg(long)]
        n: usize,
    },
    /// Tree-space distance between the metric parts of two trees.
    Dist {
        #[arg(long, value_enum, default_value = "auto")]
        mode: ModeArg,
        x: String,
        y: String,
    },
    /// Joint leaf distribution of a tree under a Markov model.
    Evaluate {
        #[arg(long)]
        model: String,
        #[arg(long)]
        root: String,
        /// Accept `inf` lengths.
        #[arg(long)]
        extended: bool,
        tree: String,
    },
    /// The t → ∞ limit of exp(tH).
    Limit {
        #[arg(long)]
        model: String,
    },
    /// Jukes–Cantor generator.
    Jc {
        #[arg(long)]
        mu: f64,
        #[arg(long, default_value_t = 4)]
        k: usize,
    },
    /// Sample leaf states by simulating the chain along the tree.
    Simulate {
        #[arg(long)]
        model: String,
        #[arg(long)]
        root: String,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        samples: u64,
        tree: String,
    },
    /// Whether every external edge has length `inf`.
    Wcheck { tree: String },
}

fn read(path: &str) -> Result<String, CliError> {
    if path == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| CliError::Input(format!("stdin: {e}")))?;
        return Ok(s);
    }
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("{path}: {e}")))
}

fn tolerance() -> Result<f64, CliError> {
    match std::env::var("PHYLO_TOL") {
        Err(_) => Ok(DEFAULT_TOL),
        Ok(s) => match s.trim().parse::<f64>() {
            Ok(t) if t > 0.0 && t.is_finite() => Ok(t),
            _ => Err(CliError::Input(format!("PHYLO_TOL={s} is not a positive number"))),
        },
    }
}

fn check_normalized(t: &LeafTensor, tol: f64) -> Result<(), CliError> {
    let s = t.sum();
    if (s - 1.0).abs() > tol || t.data().iter().any(|&x| x < -tol) {
        return Err(CliError::Invariant(format!("tensor sums to {s}")));
    }
    Ok(())
}

fn run(cmd: Command) -> Result<String, CliError> {
    let tol = tolerance()?;
    Ok(match cmd {
        Command::Validate { tree } => {
            let t = parse_newick(&read(&tree)?)?;
            eprintln!("ok: {} leaves, {} internal edges", t.leaf_count(), t.internal_edges().len());
            json!({
                "valid": true,
                "leaves": t.leaf_count(),
                "internal_edges": t.internal_edges().len(),
                "canonical": serialize_newick(&t),
            })
            .to_string()
        }
        Command::Canon { tree } => serialize_newick(&parse_newick(&read(&tree)?)?),
        Command::Compose { at, a, b } => {
            let a = parse_newick(&read(&a)?)?;
            let b = parse_newick(&read(&b)?)?;
            serialize_newick(&a.compose(at, &b)?)
        }
        Command::Act { perm, tree } => {
            let images = perm
                .split(',')
                .map(|s| s.trim().parse::<usize>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| CliError::Input(format!("--perm: {e}")))?;
            let sigma = Permutation::from_images(images)?;
            serialize_newick(&parse_newick(&read(&tree)?)?.act(&sigma)?)
        }
        Command::Reduce { input, seed } => {
            let t = mixed_from_json(&read(&input)?)?;
            let r = match seed {
                None => reduce_coproduct_tree(&t)?,
                Some(s) => {
                    let mut rng = ChaCha8Rng::seed_from_u64(s);
                    reduce_with_order(&t, MoveOrder::Random(&mut rng))?
                }
            };
            let newick = to_phylo(&r.tree).map(|p| serialize_newick(&p)).ok();
            json!({
                "normal_form": mixed_to_json(&r.tree),
                "moves": r.moves.len(),
                "newick": newick,
            })
            .to_string()
        }
        Command::Decompose { tree } => {
            let t = parse_newick(&read(&tree)?)?;
            let d = if t.leaf_count() == 1 {
                let (m, l) = decompose1(&t)?;
                DecompositionJson::from_parts(&m, vec![l])
            } else {
                let (m, ext) = decompose(&t)?;
                DecompositionJson::from_parts(&m, ext.values().to_vec())
            };
            serde_json::to_string(&d).map_err(|e| CliError::Invariant(e.to_string()))?
        }
        Command::Recompose { input } => serialize_newick(&decomposition_from_json(&read(&input)?)?.recompose()?),
        Command::Topologies { n } => {
            let tops = enumerate_binary_topologies(n)?;
            let census = orthant_census(n)?;
            let list: Vec<Value> = tops
                .iter()
                .map(|o| {
                    let shape = shape_from_clusters(n, o.axes()).expect("enumerated axes are compatible");
                    let t = PlanarTree::from_shape(&shape).expect("valid shape").representative(Mode::Unordered);
                    json!({ "clusters": o.axes(), "shape": newick_shape(&t) })
                })
                .collect();
            json!({ "n": n, "count": tops.len(), "faces_by_dimension": census, "topologies": list }).to_string()
        }
        Command::Dist { mode, x, y } => {
            let mode = match mode {
                ModeArg::Exact4 => DistanceMode::Exact4,
                ModeArg::Cone => DistanceMode::Cone,
                ModeArg::Auto => DistanceMode::Auto,
            };
            let (mx, _) = decompose(&parse_newick(&read(&x)?)?)?;
            let (my, _) = decompose(&parse_newick(&read(&y)?)?)?;
            json!({ "distance": bhv_distance(&mx, &my, mode)? }).to_string()
        }
        Command::Evaluate {
            model,
            root,
            extended,
            tree,
        } => {
            let g = generator_from_json(&read(&model)?)?;
            let f = distribution_from_json(&read(&root)?)?;
            let c = Coalgebra::new(g);
            let text = read(&tree)?;
            let t = if extended {
                c.evaluate_extended(&parse_newick_extended(&text)?, &f)?
            } else {
                c.evaluate(&parse_newick(&text)?, &f)?
            };
            check_normalized(&t, tol)?;
            tensor_to_json(&t).to_string()
        }
        Command::Limit { model } => {
            let p = limit_operator(&generator_from_json(&read(&model)?)?)?;
            for (col, c) in p.matrix().column_iter().enumerate() {
                let s: f64 = c.iter().sum();
                if (s - 1.0).abs() > tol {
                    return Err(CliError::Invariant(format!("column {col} of the limit sums to {s}")));
                }
            }
            matrix_to_json(p.states(), p.matrix()).to_string()
        }
        Command::Jc { mu, k } => generator_to_json(&jukes_cantor(mu, k)?).to_string(),
        Command::Simulate {
            model,
            root,
            seed,
            samples,
            tree,
        } => {
            let g = generator_from_json(&read(&model)?)?;
            let f = distribution_from_json(&read(&root)?)?;
            let t = parse_newick(&read(&tree)?)?;
            let j = simulate_branching(&t, &g, &f, seed, samples)?;
            let labels = j.states.labels();
            let counts: Vec<Value> = j
                .counts
                .iter()
                .map(|(tuple, c)| json!({ "leaves": tuple.iter().map(|&x| &labels[x]).collect::<Vec<_>>(), "count": c }))
                .collect();
            json!({ "states": labels, "n": j.leaves, "samples": j.samples, "seed": seed, "counts": counts }).to_string()
        }
        Command::Wcheck { tree } => {
            let t = parse_newick_extended(&read(&tree)?)?;
            json!({ "w_member": w_membership(&t) }).to_string()
        }
    })
}

/// Newick text of an unlabelled-length shape.
fn newick_shape(t: &PlanarTree) -> String {
    use phylo_core::tree::Source;
    fn go(t: &PlanarTree, e: phylo_core::tree::EdgeId, out: &mut String) {
        match t.source(e) {
            Source::Leaf(k) => out.push_str(&k.to_string()),
            Source::Vertex(v) => {
                out.push('(');
                for (i, &c) in t.children(v).iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    go(t, c, out);
                }
                out.push(')');
            }
        }
    }
    let mut s = String::new();
    go(t, t.root_edge(), &mut s);
    s.push(';');
    s
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = std::panic::catch_unwind(|| run(cli.command));
    match outcome {
        Ok(Ok(out)) => {
            println!("{out}");
            ExitCode::SUCCESS
        }
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
        Err(_) => {
            eprintln!("error: internal invariant violated (panic)");
            ExitCode::from(2)
        }
    }
}
