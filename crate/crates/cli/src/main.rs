//! `btdist`: distance formulas on the building of `SL_d(Q_p)` from the
//! command line. Every command prints one JSON document on stdout.

mod input;
mod verify;

use std::fs::File;
use std::io::BufWriter;
use std::process::ExitCode;

use btdist::apartments2::{intersection_range, shared_edges, Apartment2};
use btdist::building::{bfs_distance, BfsMode, BuildingGraph};
use btdist::invariants::{
    directed_distance_b1, distance, distance_b1, m_table, relative_coordinates, vertex_label,
};
use btdist::linalg::{canonical_vertex_key, localized_form, smith_valuations};
use btdist::multivertex::{
    hall_certificate, min_total_on_apartment, normalize_at, steiner_lower_bound, tree_bound_3,
    VertexTuple,
};
use btdist::MatrixRep;
use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use input::{parse_box, InputError, Loader};

#[derive(Parser)]
#[command(name = "btdist", version, about = "Distance formulas on the Bruhat-Tits building of SL_d(Q_p)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Ctx {
    /// The prime p.
    #[arg(long)]
    p: Option<u64>,
    /// The dimension d.
    #[arg(long)]
    d: Option<usize>,
}

#[derive(Args, Clone)]
struct Two {
    #[command(flatten)]
    ctx: Ctx,
    /// Matrix file for A, or `identity`.
    #[arg(long)]
    a: String,
    /// Matrix file for B, or `identity`.
    #[arg(long)]
    b: String,
}

#[derive(Args, Clone)]
struct One {
    #[command(flatten)]
    ctx: Ctx,
    /// Matrix file for A, or `identity`.
    #[arg(long)]
    a: String,
}

#[derive(Subcommand)]
enum Command {
    /// Graph distance between the vertices of A and B.
    Dist {
        #[command(flatten)]
        two: Two,
        /// plain, b1 (label steps ±1) or b1dir (from A to B, label steps +1).
        #[arg(long, default_value = "plain")]
        mode: BfsMode,
    },
    /// The table m_{A:i,B:d-i}, i = 0..d.
    Mtable(Two),
    /// Localized form of A with its permutation (1-based) and exponents.
    Localize(One),
    /// Relative coordinates of A with respect to B.
    Coords(Two),
    /// Type label ν(det A) mod d.
    Label(One),
    /// p-adic valuations of the elementary divisors of A.
    Smith(One),
    /// Cyclic lower bound on the smallest total distance to a tuple.
    Steiner {
        #[command(flatten)]
        ctx: Ctx,
        /// JSON file holding a list of matrices.
        #[arg(long)]
        tuple: String,
        #[arg(long, default_value_t = 1)]
        i: usize,
    },
    /// Smallest total distance over an apartment box for diagonal members.
    MinTotal {
        #[command(flatten)]
        ctx: Ctx,
        #[arg(long)]
        tuple: String,
        /// Exponent bounds `lo:hi` or `lo1:hi1,…,lod:hid`.
        #[arg(long = "box", allow_hyphen_values = true)]
        bx: String,
        /// Number of random descent starts.
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Bounds on a minimal tree through three vertices.
    Tree3 {
        #[command(flatten)]
        two: Two,
        /// Matrix file for C, or `identity`.
        #[arg(long)]
        c: String,
    },
    /// Edges shared by the apartments with bases A and B (d = 2).
    SharedEdges(Two),
    /// Breadth-first distance between A and B, next to the formula value.
    Oracle {
        #[command(flatten)]
        two: Two,
        #[arg(long, default_value_t = 6)]
        radius: u64,
        #[arg(long, default_value = "plain")]
        mode: BfsMode,
        /// Write the ball of `radius` around A as a tab-separated edge list.
        #[arg(long)]
        dump: Option<String>,
    },
    /// Randomized formula-versus-oracle suite.
    Verify {
        #[command(flatten)]
        ctx: Ctx,
        #[arg(long, default_value_t = 6)]
        radius: u64,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn loader(c: &Ctx) -> Loader {
    Loader::new(c.p, c.d)
}

fn pair(t: &Two) -> Result<(MatrixRep, MatrixRep), InputError> {
    let mut m = loader(&t.ctx).matrices(&[&t.a, &t.b])?;
    let b = m.pop().expect("two");
    Ok((m.pop().expect("two"), b))
}

fn single(o: &One) -> Result<MatrixRep, InputError> {
    Ok(loader(&o.ctx).matrices(&[&o.a])?.remove(0))
}

fn formula_distance(a: &MatrixRep, b: &MatrixRep, mode: BfsMode) -> btdist::Result<u64> {
    match mode {
        BfsMode::Plain => distance(a, b),
        BfsMode::B1Undirected => distance_b1(a, b),
        BfsMode::B1Directed => directed_distance_b1(a, b),
    }
}

fn one_based(v: &[usize]) -> Vec<usize> {
    v.iter().map(|x| x + 1).collect()
}

/// The JSON result and whether the command succeeded; only `verify` can
/// report failure without an input error.
fn execute(cmd: Command) -> Result<(Value, bool), InputError> {
    Ok(match cmd {
        Command::Dist { two, mode } => {
            let (a, b) = pair(&two)?;
            (json!({ "distance": formula_distance(&a, &b, mode)? }), true)
        }
        Command::Mtable(two) => {
            let (a, b) = pair(&two)?;
            (json!({ "m": m_table(&a, &b)?.m }), true)
        }
        Command::Localize(one) => {
            let a = single(&one)?;
            let lf = localized_form(&a);
            let value = json!({
                "localized": lf.localized.to_file().entries,
                "transform": lf.transform.to_file().entries,
                "pi": one_based(&lf.pi),
                "alpha": lf.alpha,
            });
            (value, true)
        }
        Command::Coords(two) => {
            let (a, b) = pair(&two)?;
            (json!({ "coordinates": relative_coordinates(&a, &b)? }), true)
        }
        Command::Label(one) => (json!({ "label": vertex_label(&single(&one)?) }), true),
        Command::Smith(one) => (json!({ "smith_valuations": smith_valuations(&single(&one)?) }), true),
        Command::Steiner { ctx, tuple, i } => {
            let t = VertexTuple::new(loader(&ctx).tuple(&tuple)?)?;
            let b = steiner_lower_bound(&t, i)?;
            let value = json!({
                "value": b.value,
                "permutation": one_based(&b.permutation),
                "per_term": b.per_term,
            });
            (value, true)
        }
        Command::MinTotal { ctx, tuple, bx, trials, seed } => {
            let t = VertexTuple::new(loader(&ctx).tuple(&tuple)?)?;
            let bx = parse_box(&bx, t.ctx().d())?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let min = min_total_on_apartment(&t, &bx, trials, &mut rng)?;
            let bound = steiner_lower_bound(&t, 1)?;
            let exps = normalize_at(&t.diagonal_exponents()?, &min.minimizer);
            let normalized = VertexTuple::diagonal(t.ctx(), &exps)?;
            let hall = match hall_certificate(&normalized, &vec![0; t.ctx().d()]) {
                Ok(c) => json!({
                    "matching": one_based(&c.matching),
                    "witnesses": one_based(&c.relation_witnesses),
                }),
                Err(e) => json!({ "error": e.to_string() }),
            };
            let value = json!({
                "minimizer": min.minimizer,
                "value": min.value,
                "bound": bound.value,
                "local_minima_global": min.local_minima_are_global(),
                "hall": hall,
            });
            (value, true)
        }
        Command::Tree3 { two, c } => {
            let m = loader(&two.ctx).matrices(&[&two.a, &two.b, &c])?;
            let tb = tree_bound_3(&m[0], &m[1], &m[2])?;
            let perimeter = distance(&m[0], &m[1])? + distance(&m[1], &m[2])? + distance(&m[2], &m[0])?;
            let value = json!({
                "lambda1": tb.lambda1,
                "lambda2": tb.lambda2,
                "bound": tb.bound,
                "perimeter": perimeter,
            });
            (value, true)
        }
        Command::SharedEdges(two) => {
            let (a, b) = pair(&two)?;
            let (pa, pb) = (Apartment2::new(a.clone())?, Apartment2::new(b.clone())?);
            let count = shared_edges(&pa, &pb)?;
            // relative to B's apartment: vertex i is diag(p^i, 1)·B
            let range = intersection_range(&Apartment2::new(a.mul(&b.inverse())?)?)?;
            (json!({ "shared_edges": count.to_string(), "intersection": range }), true)
        }
        Command::Oracle { two, radius, mode, dump } => {
            let (a, b) = pair(&two)?;
            let ctx = a.ctx();
            let (ka, kb) = (canonical_vertex_key(&a), canonical_vertex_key(&b));
            let found = bfs_distance(&ka, &kb, ctx, radius, mode);
            let mut value = json!({
                "bfs_distance": found,
                "formula": formula_distance(&a, &b, mode)?,
                "radius": radius,
            });
            if let Some(path) = dump {
                let g = BuildingGraph::explore(ctx, ka, radius);
                let file = File::create(&path).map_err(|e| InputError(format!("{path}: {e}")))?;
                g.dump(BufWriter::new(file)).map_err(|e| InputError(format!("{path}: {e}")))?;
                value["dumped_vertices"] = json!(g.vertices.len());
                value["dumped_edges"] = json!(g.edge_count());
            }
            (value, true)
        }
        Command::Verify { ctx, radius, trials, seed } => {
            let c = loader(&ctx).ctx()?;
            let report = verify::run(c, radius, trials, seed);
            let ok = report.failures == 0;
            (serde_json::to_value(report).expect("plain struct"), ok)
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok((value, ok)) => {
            println!("{value}");
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
