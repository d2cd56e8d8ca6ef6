//! Command-line front end.
//!
//! Exit codes: 0 success, 1 rejected certificate or failed self-test, 2 malformed input,
//! dimension mismatch or size cap, 3 model violation or failed recovery.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chow::{
    certify_non_overlapping_lower_bound, degree2_chow_lower_bound, is_totally_non_overlapping,
    verify, ChowDecomposition,
};
use crate::engine::{inverse_via_gradient, DifferentialComputer, InputKind};
use crate::error::{Error, Result};
use crate::graphs::{parse_graph_set, transform_set, write_graph_set, Graph, Transform};
use crate::listings::{
    content_lines, lagrange_interpolant, lex_bits, listing_constant_functions,
    listing_cyclic_group, listing_determinant, listing_from_truth_table, listing_functional_graphs,
    listing_graph_isomorphism, listing_permanent, parse_bits, FunctionTable, Limits, TruthTable,
};
use crate::multipoly::{parse_poly, write_poly, Layout, MultiPoly, VarTable};

#[derive(Parser, Debug)]
#[command(
    name = "diffcomp",
    version,
    about = "Differential computers over additive listings"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a listing and write it in the polynomial text format.
    Build {
        kind: BuildKind,
        #[arg(long)]
        n: Option<usize>,
        /// Graph file (for `iso`).
        #[arg(long)]
        graph: Option<PathBuf>,
        /// Truth-table file (for `truth-table` and `lagrange`).
        #[arg(long)]
        table: Option<PathBuf>,
        /// Output path; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Execute a listing on one input.
    Run {
        listing: PathBuf,
        input: PathBuf,
        #[arg(long, value_enum)]
        kind: RunKind,
        /// Exponent parameter; defaults to the order of the listing's coefficients.
        #[arg(long)]
        order: Option<u64>,
    },
    /// Check that a Chow decomposition expands to a listing.
    Verify {
        decomposition: PathBuf,
        listing: PathBuf,
    },
    /// Print Chow rank bounds for a listing.
    Bound {
        listing: PathBuf,
        #[arg(long)]
        certificate: Option<PathBuf>,
    },
    /// Transform a graph set and check restriction recovery.
    Transform {
        graphset: PathBuf,
        #[arg(long, value_enum)]
        mode: TransformMode,
        /// Images of 0 and 1 under f: Z_2 → Z_2, e.g. "0 1".
        #[arg(long)]
        f: Option<String>,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Run seeded randomized consistency checks.
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum BuildKind {
    TruthTable,
    Functional,
    Permanent,
    Determinant,
    Iso,
    Constants,
    Cyclic,
    Lagrange,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum RunKind {
    Vector,
    Matrix,
    Functional,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TransformMode {
    #[value(name = "T")]
    T,
    #[value(name = "Tf")]
    Tf,
}

enum Failure {
    Reject(String),
    Recovery(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::ModelViolation { .. } | Error::InternalInconsistency(_) => 3,
        _ => 2,
    }
}

/// Parse `std::env::args`, dispatch, and return the process exit code.
pub fn main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(Failure::Reject(msg)) => {
            eprintln!("diffcomp: {msg}");
            1
        }
        Err(Failure::Recovery(msg)) => {
            eprintln!("diffcomp: {msg}");
            3
        }
        Err(Failure::Lib(e)) => {
            eprintln!("diffcomp: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(command: Command) -> std::result::Result<(), Failure> {
    match command {
        Command::Build {
            kind,
            n,
            graph,
            table,
            out,
        } => {
            let text = cmd_build(kind, n, graph.as_deref(), table.as_deref())?;
            emit(out.as_deref(), &text)?;
            Ok(())
        }
        Command::Run {
            listing,
            input,
            kind,
            order,
        } => {
            let (bit, scalar) = cmd_run(&listing, &input, kind, order)?;
            println!("{}", u8::from(bit));
            println!("scalar {scalar}");
            Ok(())
        }
        Command::Verify {
            decomposition,
            listing,
        } => cmd_verify(&decomposition, &listing),
        Command::Bound {
            listing,
            certificate,
        } => cmd_bound(&listing, certificate.as_deref()),
        Command::Transform {
            graphset,
            mode,
            f,
            out_dir,
        } => cmd_transform(&graphset, mode, f.as_deref(), &out_dir),
        Command::Selftest { seed } => cmd_selftest(seed),
    }
}

fn read(path: &Path) -> Result<String> {
    Ok(fs::read_to_string(path)?)
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn required<T>(value: Option<T>, flag: &str, kind: BuildKind) -> Result<T> {
    value.ok_or_else(|| Error::Domain(format!("build {kind:?} needs --{flag}")))
}

fn cmd_build(
    kind: BuildKind,
    n: Option<usize>,
    graph: Option<&Path>,
    table: Option<&Path>,
) -> Result<String> {
    let limits = Limits::from_env();
    let matrix = |p: MultiPoly, n: usize| write_poly(&p, &VarTable::matrix('a', n));
    Ok(match kind {
        BuildKind::TruthTable => {
            let t = TruthTable::parse(&read(required(table, "table", kind)?)?)?;
            write_poly(
                &listing_from_truth_table(&t),
                &VarTable::vector('a', t.arity()),
            )
        }
        BuildKind::Lagrange => {
            let t = TruthTable::parse(&read(required(table, "table", kind)?)?)?;
            write_poly(
                &lagrange_interpolant(&t)?,
                &VarTable::vector('y', t.arity()),
            )
        }
        BuildKind::Iso => {
            let g = Graph::parse(&read(required(graph, "graph", kind)?)?)?;
            matrix(listing_graph_isomorphism(&g, &limits)?, g.n())
        }
        BuildKind::Functional => {
            let n = required(n, "n", kind)?;
            matrix(listing_functional_graphs(n, &limits)?, n)
        }
        BuildKind::Permanent => {
            let n = required(n, "n", kind)?;
            matrix(listing_permanent(n, &limits)?, n)
        }
        BuildKind::Determinant => {
            let n = required(n, "n", kind)?;
            matrix(listing_determinant(n, &limits)?, n)
        }
        BuildKind::Constants => {
            let n = required(n, "n", kind)?;
            matrix(listing_constant_functions(n), n)
        }
        BuildKind::Cyclic => {
            let n = required(n, "n", kind)?;
            matrix(listing_cyclic_group(n), n)
        }
    })
}

fn matrix_side(table: &VarTable) -> Result<usize> {
    match table.layout() {
        Layout::Matrix(n) => Ok(n),
        Layout::Vector(_) => Err(Error::DimensionMismatch(
            "matrix and functional inputs need a listing in a_{i,j} variables".into(),
        )),
    }
}

fn cmd_run(
    listing: &Path,
    input: &Path,
    kind: RunKind,
    order: Option<u64>,
) -> Result<(bool, crate::CycloRational)> {
    let (program, table) = parse_poly(&read(listing)?)?;
    let order = order.unwrap_or_else(|| program.coefficient_order());
    let input_text = read(input)?;
    let out = match kind {
        RunKind::Vector => {
            let Layout::Vector(n) = table.layout() else {
                return Err(Error::DimensionMismatch(
                    "vector inputs need a listing in a_i variables".into(),
                ));
            };
            let (ln, line) = content_lines(&input_text)
                .next()
                .ok_or_else(|| Error::parse(1, "missing input bitstring"))?;
            let bits = parse_bits(line).ok_or_else(|| Error::parse(ln, "expected a bitstring"))?;
            if bits.len() != n {
                return Err(Error::DimensionMismatch(format!(
                    "input has {} bits, listing has arity {n}",
                    bits.len()
                )));
            }
            DifferentialComputer::new(program, InputKind::Vector, n, order)?.run_vector(&bits)?
        }
        RunKind::Matrix => {
            let n = matrix_side(&table)?;
            let g = Graph::parse(&input_text)?;
            if g.n() != n {
                return Err(Error::DimensionMismatch(format!(
                    "input is {0}×{0}, listing expects {n}×{n}",
                    g.n()
                )));
            }
            DifferentialComputer::new(program, InputKind::Matrix, n, order)?.run_matrix(&g)?
        }
        RunKind::Functional => {
            let n = matrix_side(&table)?;
            let g = FunctionTable::parse(&input_text)?;
            if g.n() != n {
                return Err(Error::DimensionMismatch(format!(
                    "input is a function on Z_{}, listing expects Z_{n}",
                    g.n()
                )));
            }
            DifferentialComputer::new(program, InputKind::Functional, n, order)?
                .run_functional(&g)?
        }
    };
    Ok((out.bit, out.scalar))
}

fn load_pair(decomposition: &Path, listing: &Path) -> Result<(ChowDecomposition, MultiPoly)> {
    let c = ChowDecomposition::parse(&read(decomposition)?)?;
    let (p, _) = parse_poly(&read(listing)?)?;
    if p.nvars() != c.nvars() {
        return Err(Error::DimensionMismatch(format!(
            "decomposition has {} variables, listing has {}",
            c.nvars(),
            p.nvars()
        )));
    }
    Ok((c, p))
}

fn cmd_verify(decomposition: &Path, listing: &Path) -> std::result::Result<(), Failure> {
    let (c, p) = load_pair(decomposition, listing)?;
    println!("rho {} d {} n {}", c.rho(), c.degree(), c.nvars());
    if !verify(&c, &p) {
        println!("reject");
        return Err(Failure::Reject(
            "decomposition does not expand to the listing".into(),
        ));
    }
    println!("accept");
    if let Ok(lower) = certify_non_overlapping_lower_bound(&p) {
        if lower == c.rho() {
            println!("matches non-overlapping lower bound {lower}");
        }
    }
    Ok(())
}

fn cmd_bound(listing: &Path, certificate: Option<&Path>) -> std::result::Result<(), Failure> {
    let (p, _) = parse_poly(&read(listing)?)?;
    let upper = p.term_count();
    let exact = is_totally_non_overlapping(&p)
        .witness
        .is_some()
        .then(|| certify_non_overlapping_lower_bound(&p))
        .transpose()?;
    let lower = [
        usize::from(!p.is_zero()),
        degree2_chow_lower_bound(&p).unwrap_or(0),
        exact.unwrap_or(0),
    ]
    .into_iter()
    .max()
    .unwrap_or(0);
    let mut line = format!("lower {lower} upper {upper}");
    if let Some(e) = exact {
        line += &format!(" exact {e}");
    }
    if let Some(path) = certificate {
        let c = ChowDecomposition::parse(&read(path)?)?;
        if c.nvars() != p.nvars() || !verify(&c, &p) {
            println!("{line}");
            return Err(Failure::Reject(
                "certificate does not expand to the listing".into(),
            ));
        }
        line += &format!(" certificate {}", c.rho());
    }
    println!("{line}");
    Ok(())
}

fn parse_f(text: Option<&str>) -> Result<FunctionTable> {
    let text = text.ok_or_else(|| Error::Domain("mode Tf needs --f".into()))?;
    let images = text
        .split(|c: char| c.is_whitespace() || c == ',')
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<usize>()
                .map_err(|_| Error::parse(1, format!("bad image `{s}` in --f")))
        })
        .collect::<Result<Vec<_>>>()?;
    if images.len() != 2 {
        return Err(Error::Domain("--f must give the images of 0 and 1".into()));
    }
    FunctionTable::new(images)
}

fn cmd_transform(
    graphset: &Path,
    mode: TransformMode,
    f: Option<&str>,
    out_dir: &Path,
) -> std::result::Result<(), Failure> {
    let graphs = parse_graph_set(&read(graphset)?)?;
    let n = graphs
        .first()
        .map(Graph::n)
        .ok_or_else(|| Error::parse(1, "empty graph set"))?;
    let transform = match mode {
        TransformMode::T => Transform::T,
        TransformMode::Tf => Transform::Tf(parse_f(f)?),
    };
    let out = transform_set(&graphs, &transform)?;
    let width = transform.image_size(n);
    let images: Vec<Graph> = out.graphs.iter().map(FunctionTable::to_graph).collect();
    fs::create_dir_all(out_dir).map_err(Error::from)?;
    let write = |name: &str, text: &str| -> Result<()> { Ok(fs::write(out_dir.join(name), text)?) };
    write("graphs.txt", &write_graph_set(&images))?;
    write(
        "before.poly",
        &write_poly(&out.before, &VarTable::matrix('a', n)),
    )?;
    write(
        "after.poly",
        &write_poly(&out.after, &VarTable::matrix('a', width)),
    )?;
    let recovered = out.recover(&transform, n)?;
    let ok = recovered == out.before;
    let verdict = if ok { "recovery ok" } else { "recovery failed" };
    write("verdict.txt", &format!("{verdict}\n"))?;
    println!(
        "{} graphs on {n} vertices -> {} on {width}",
        graphs.len(),
        images.len()
    );
    println!("{verdict}");
    if ok {
        Ok(())
    } else {
        Err(Failure::Recovery(
            "restricted listing differs from the original".into(),
        ))
    }
}

fn cmd_selftest(seed: u64) -> std::result::Result<(), Failure> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = 0usize;
    for _ in 0..50 {
        let n = rng.gen_range(1..=3usize);
        let order = [1u64, 2, 4][rng.gen_range(0..3)];
        let mut t = TruthTable::new(n, order)?;
        for idx in 0..1u64 << n {
            if rng.gen_bool(0.5) {
                t.insert(&lex_bits(idx, n), rng.gen_range(0..order))?;
            }
        }
        let dc =
            DifferentialComputer::new(listing_from_truth_table(&t), InputKind::Vector, n, order)?;
        for idx in 0..1u64 << n {
            let bits = lex_bits(idx, n);
            if dc.run_vector(&bits)?.bit != t.value(&bits) {
                return Err(Failure::Reject(format!(
                    "selftest seed {seed}: run_vector mismatch"
                )));
            }
            checks += 1;
        }
    }
    for _ in 0..20 {
        let n = rng.gen_range(1..=3usize);
        let m: Vec<Vec<BigRational>> = (0..n)
            .map(|_| {
                (0..n)
                    .map(|_| BigRational::from_integer(rng.gen_range(-4..=4i64).into()))
                    .collect()
            })
            .collect();
        let inv = match inverse_via_gradient(&m) {
            Ok(inv) => inv,
            Err(Error::Singular) => continue,
            Err(e) => return Err(e.into()),
        };
        let identity = (0..n).all(|i| {
            (0..n).all(|j| {
                let entry: BigRational = (0..n).map(|k| &m[i][k] * &inv[k][j]).sum();
                entry == BigRational::from_integer(u8::from(i == j).into())
            })
        });
        if !identity {
            return Err(Failure::Reject(format!(
                "selftest seed {seed}: inverse mismatch"
            )));
        }
        checks += 1;
    }
    println!("selftest seed {seed}: {checks} checks passed");
    Ok(())
}
