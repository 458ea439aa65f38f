//! `wallcross`: command-line front end with JSON input and output.
//!
//! Exit codes: 0 on success, 2 on invalid input, 3 when a budget, cap or
//! numerical tolerance is exceeded.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use wallcross::bifurcation::{self, BifurcationError, CurveLedger, KuranishiNormalForm};
use wallcross::covers::{self, CoverError, CoverType, EnumerationOptions};
use wallcross::groups::{self, GroupError, DEFAULT_ORDER_CAP};
use wallcross::gvseries::{self, BpsTable, GvError, GwTable};
use wallcross::specflow::{self, CrossingOptions, OperatorPath, OperatorSpec, Sheet, SpecflowError};
use wallcross::walls::{Generators, WallError, WallType, WallTypeSpec};

#[derive(Parser)]
#[command(name = "wallcross", version, about = "Wall-crossing computations for embedded curve counts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Io {
    /// Input JSON file (`-` for stdin).
    #[arg(short, long, default_value = "-")]
    input: PathBuf,
    /// Output file; stdout when absent.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Re-check module invariants on this instance.
    #[arg(long)]
    verify: bool,
    /// Add a generation timestamp to the output.
    #[arg(long)]
    timestamps: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Branched covers of the torus and higher genus surfaces.
    #[command(subcommand)]
    Covers(CoversCmd),
    /// Wall types.
    #[command(subcommand)]
    Walls(WallsCmd),
    /// Finite permutation groups.
    #[command(subcommand)]
    Groups(GroupsCmd),
    /// Cauchy–Riemann operators on the torus.
    #[command(subcommand)]
    Specflow(SpecflowCmd),
    /// Bifurcation normal forms and curve ledgers.
    #[command(subcommand)]
    Bifurcate(BifurcateCmd),
    /// Gopakumar–Vafa series.
    #[command(subcommand)]
    Gv(GvCmd),
}

#[derive(Subcommand)]
enum CoversCmd {
    /// All monodromy classes of a cover type `{g, d, profile}`.
    Enumerate {
        #[command(flatten)]
        io: Io,
        #[arg(long, default_value_t = 8)]
        cap_degree: usize,
        /// Maximum number of search nodes.
        #[arg(long, default_value_t = 100_000_000)]
        cap_nodes: u64,
        /// Shuffles the search order (the output is unaffected).
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Subcommand)]
enum WallsCmd {
    /// Classifies a wall type `{g, d, profile, group, stabilizer, k, c, A}`.
    Classify {
        #[command(flatten)]
        io: Io,
        #[arg(long, default_value_t = DEFAULT_ORDER_CAP)]
        cap_order: usize,
    },
}

#[derive(Subcommand)]
enum GroupsCmd {
    /// Complex and real character table of `{generators}`.
    Table {
        #[command(flatten)]
        io: Io,
        #[arg(long, default_value_t = DEFAULT_ORDER_CAP)]
        cap_order: usize,
    },
}

#[derive(Args, Clone, Copy)]
struct Numerics {
    /// Relative singular-value threshold.
    #[arg(long, default_value_t = specflow::DEFAULT_TOL)]
    tol: f64,
    /// Fourier truncation order (default from the operator support).
    #[arg(long)]
    truncation: Option<usize>,
}

impl Numerics {
    fn options(self) -> CrossingOptions {
        CrossingOptions {
            truncation: self.truncation,
            tol: self.tol,
            ..Default::default()
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SheetArg {
    Base,
    #[value(name = "10")]
    E10,
    #[value(name = "01")]
    E01,
    #[value(name = "11")]
    E11,
    /// The three anti-invariant sheets.
    Covers,
}

#[derive(Subcommand)]
enum SpecflowCmd {
    /// Spectral-flow sign of an invertible operator.
    Sign {
        #[command(flatten)]
        io: Io,
        #[command(flatten)]
        num: Numerics,
    },
    /// Linear wall-crossing number along a path to a complex-linear operator.
    W21 {
        #[command(flatten)]
        io: Io,
        #[command(flatten)]
        num: Numerics,
    },
    /// Crossing log of a path, one JSON object per line.
    Path {
        #[command(flatten)]
        io: Io,
        #[command(flatten)]
        num: Numerics,
        #[arg(long, value_enum, default_value = "covers")]
        sheet: SheetArg,
    },
}

#[derive(Subcommand)]
enum BifurcateCmd {
    /// Zeros of `ς(t − cς^n)` and the net change across `t = 0`.
    Model {
        #[arg(short = 'c', long, allow_hyphen_values = true)]
        c: f64,
        #[arg(short = 'n', long)]
        n: u32,
        #[arg(long, default_value_t = 1)]
        gamma: u32,
        #[arg(short = 't', long, allow_hyphen_values = true)]
        t: f64,
        /// Sign of the wall, for the net change.
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        wall_sign: i32,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Replays the events of a ledger and reports `Gr` before and after.
    Ledger {
        #[command(flatten)]
        io: Io,
    },
}

#[derive(Subcommand)]
enum GvCmd {
    /// BPS table to GW table.
    Forward {
        #[command(flatten)]
        io: Io,
        /// Highest `t`-order kept in the series.
        #[arg(long, default_value_t = gvseries::DEFAULT_T_MAX)]
        window: i32,
    },
    /// GW table to BPS table, with an integrality report.
    Invert {
        #[command(flatten)]
        io: Io,
        #[arg(long, default_value_t = gvseries::DEFAULT_T_MAX)]
        window: i32,
    },
    /// `Σ_{k|d} k⁻³ n[d/k][0]` for a BPS table.
    Genus0 {
        #[command(flatten)]
        io: Io,
        #[arg(short = 'd', long, default_value_t = 2)]
        degree: usize,
    },
    /// Euler number after a list of crossings `{e, crossings: [{sign, aut}]}`.
    Eulercross {
        #[command(flatten)]
        io: Io,
    },
}

/// Error with its exit code.
#[derive(Debug)]
struct Failure {
    code: u8,
    error: anyhow::Error,
}

type Outcome<T> = Result<T, Failure>;

fn invalid(e: impl Into<anyhow::Error>) -> Failure {
    Failure { code: 2, error: e.into() }
}

fn budget(e: impl Into<anyhow::Error>) -> Failure {
    Failure { code: 3, error: e.into() }
}

fn from_cover(e: CoverError) -> Failure {
    match e {
        CoverError::DegreeCapExceeded { .. } | CoverError::BudgetExceeded(_) => budget(e),
        _ => invalid(e),
    }
}

fn from_group(e: GroupError) -> Failure {
    match e {
        GroupError::OrderCapExceeded(_) => budget(e),
        _ => invalid(e),
    }
}

fn from_wall(e: WallError) -> Failure {
    match e {
        WallError::Cover(c) => from_cover(c),
        WallError::Group(g) => from_group(g),
        _ => invalid(e),
    }
}

fn from_specflow(e: SpecflowError) -> Failure {
    match e {
        SpecflowError::Invalid(_) | SpecflowError::EndpointNotRigid(_) => invalid(e),
        _ => budget(e),
    }
}

fn from_gv(e: GvError) -> Failure {
    match e {
        GvError::WindowTooSmall { .. } => budget(e),
        _ => invalid(e),
    }
}

fn from_bif(e: BifurcationError) -> Failure {
    invalid(e)
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Outcome<T> {
    let text = if path == Path::new("-") {
        std::io::read_to_string(std::io::stdin()).context("reading stdin").map_err(invalid)?
    } else {
        fs::read_to_string(path)
            .with_context(|| format!("reading {}", path.display()))
            .map_err(invalid)?
    };
    serde_json::from_str(&text)
        .with_context(|| format!("parsing {}", path.display()))
        .map_err(invalid)
}

fn stamp(mut v: Value, io: &Io) -> Value {
    if io.timestamps {
        let secs = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        if let Value::Object(m) = &mut v {
            m.insert("generated_at".into(), json!(secs));
        }
    }
    v
}

fn emit(out: Option<&Path>, text: &str) -> Outcome<()> {
    match out {
        Some(p) => fs::write(p, text)
            .with_context(|| format!("writing {}", p.display()))
            .map_err(invalid),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(invalid)
        }
    }
}

fn emit_json(io: &Io, v: Value) -> Outcome<()> {
    let v = stamp(v, io);
    let mut text = serde_json::to_string_pretty(&v).map_err(invalid)?;
    text.push('\n');
    emit(io.output.as_deref(), &text)
}

fn to_value<T: Serialize>(v: &T) -> Outcome<Value> {
    serde_json::to_value(v).map_err(invalid)
}

fn verification_failed(msg: String) -> Failure {
    budget(anyhow::anyhow!("verification failed: {msg}"))
}

fn covers_enumerate(io: &Io, cap_degree: usize, cap_nodes: u64, seed: Option<u64>) -> Outcome<()> {
    let t: CoverType = read_json(&io.input)?;
    let options = EnumerationOptions {
        degree_cap: cap_degree,
        node_cap: cap_nodes,
        seed,
        parallel: true,
    };
    let inv = t.derive_invariants().map_err(from_cover)?;
    let classes = covers::enumerate_covers(&t, None, &options).map_err(from_cover)?;
    if io.verify {
        for c in &classes {
            c.representative.validate().map_err(from_cover)?;
            if c.representative.profile() != t.profile.entries() {
                return Err(verification_failed("representative has the wrong profile".into()));
            }
            let g = covers::cover_groups(&c.representative).map_err(from_cover)?;
            if g.aut_order != c.aut_order || g.group.order() != c.group_order {
                return Err(verification_failed("group data disagree with recomputation".into()));
            }
        }
    }
    emit_json(
        io,
        json!({
            "type": t,
            "invariants": inv,
            "count": classes.len(),
            "classes": classes,
            "verified": io.verify,
        }),
    )
}

fn walls_classify(io: &Io, cap_order: usize) -> Outcome<()> {
    let spec: WallTypeSpec = read_json(&io.input)?;
    let w = WallType::from_spec(&spec, cap_order).map_err(from_wall)?;
    let status = w.is_elementary().map_err(from_wall)?;
    let shape = w.ker_coker_shape().ok();
    let multiple = match w.k_irrep() {
        Some(_) => w
            .multiple_cover_criterion()
            .map_err(from_wall)?
            .map(|h| h.order()),
        None => None,
    };
    if io.verify {
        w.table.validate().map_err(from_group)?;
    }
    emit_json(
        io,
        json!({
            "status": status,
            "r": w.r(),
            "codim": w.codim(),
            "codim_one": w.is_codim_one().map_err(from_wall)?,
            "fixed_dim_k": w.fixed_dim_k().map_err(from_wall)?,
            "ker_coker_shape": shape,
            "aut_order": w.aut_order(),
            "descends_to_overgroup_of_order": multiple,
            "label": w.label,
        }),
    )
}

fn groups_table(io: &Io, cap_order: usize) -> Outcome<()> {
    let gens: Generators = read_json(&io.input)?;
    let degree = gens.generators.iter().map(|p| p.degree()).max().unwrap_or(1);
    let table = groups::character_table(degree, &gens.generators, cap_order).map_err(from_group)?;
    if io.verify {
        table.validate().map_err(from_group)?;
    }
    emit_json(io, table.to_json())
}

fn specflow_sign(io: &Io, num: Numerics) -> Outcome<()> {
    let op: OperatorSpec = read_json(&io.input)?;
    let s = specflow::sign(&op, &num.options()).map_err(from_specflow)?;
    if io.verify && !op.is_complex_linear() {
        let path = specflow::sign_reference_path(&op);
        let again = specflow::sign_path(&path, Sheet::BASE, &num.options()).map_err(from_specflow)?;
        if again != s {
            return Err(verification_failed("sign differs along the reference path".into()));
        }
    }
    emit_json(io, json!({ "sign": s, "complex_linear": op.is_complex_linear() }))
}

fn specflow_w21(io: &Io, num: Numerics) -> Outcome<()> {
    let path: OperatorPath = read_json(&io.input)?;
    let report = specflow::w21_detailed(&path, &num.options()).map_err(from_specflow)?;
    if io.verify {
        let back = specflow::anti_invariant_flow(&path.reversed(), &num.options()).map_err(from_specflow)?;
        if back.total != -report.total {
            return Err(verification_failed("reversed path does not negate the count".into()));
        }
    }
    let per_cover: Vec<Value> = report
        .per_cover
        .iter()
        .map(|(eps, w)| json!({ "cover": eps, "w": w }))
        .collect();
    emit_json(
        io,
        json!({ "w21": report.total, "per_cover": per_cover, "crossings": report.crossings.len() }),
    )
}

fn specflow_path(io: &Io, num: Numerics, sheet: SheetArg) -> Outcome<()> {
    let path: OperatorPath = read_json(&io.input)?;
    let sheets: Vec<Sheet> = match sheet {
        SheetArg::Base => vec![Sheet::BASE],
        SheetArg::E10 => vec![Sheet::anti_invariant([1, 0]).map_err(from_specflow)?],
        SheetArg::E01 => vec![Sheet::anti_invariant([0, 1]).map_err(from_specflow)?],
        SheetArg::E11 => vec![Sheet::anti_invariant([1, 1]).map_err(from_specflow)?],
        SheetArg::Covers => Sheet::COVERS
            .iter()
            .map(|&e| Sheet::anti_invariant(e))
            .collect::<Result<_, _>>()
            .map_err(from_specflow)?,
    };
    let mut all = Vec::new();
    for s in sheets {
        all.extend(specflow::detect_crossings(&path, s, &num.options()).map_err(from_specflow)?);
    }
    all.sort_by(|a, b| a.t.total_cmp(&b.t));
    let mut text = String::new();
    for c in &all {
        let v = stamp(to_value(c)?, io);
        text.push_str(&serde_json::to_string(&v).map_err(invalid)?);
        text.push('\n');
    }
    emit(io.output.as_deref(), &text)
}

fn bifurcate_model(c: f64, n: u32, gamma: u32, t: f64, wall_sign: i32, output: Option<&Path>) -> Outcome<()> {
    let f = KuranishiNormalForm::new(c, n, gamma).map_err(from_bif)?;
    if t == 0.0 || !t.is_finite() {
        return Err(invalid(anyhow::anyhow!("t must be finite and nonzero")));
    }
    let zeros = bifurcation::zeros_of_model(&f, t);
    let net = bifurcation::net_change(&f, wall_sign).map_err(from_bif)?;
    let v = json!({
        "model": f,
        "t": t,
        "orbits": zeros.len(),
        "zeros": zeros,
        "net_change": net.to_string(),
    });
    let mut text = serde_json::to_string_pretty(&v).map_err(invalid)?;
    text.push('\n');
    emit(output, &text)
}

fn bifurcate_ledger(io: &Io) -> Outcome<()> {
    let ledger: CurveLedger = read_json(&io.input)?;
    let events = ledger.events.clone();
    let start = CurveLedger {
        events: Vec::new(),
        ..ledger
    };
    let report = bifurcation::replay(&start, &events).map_err(from_bif)?;
    if io.verify && !report.invariant {
        return Err(verification_failed("Gr changed across the events".into()));
    }
    emit_json(io, to_value(&report)?)
}

fn gv_forward(io: &Io, window: i32) -> Outcome<()> {
    let n: BpsTable = read_json(&io.input)?;
    let gw = gvseries::gw_from_bps(&n, window).map_err(from_gv)?;
    if io.verify {
        let back = gvseries::bps_from_gw(&gw, window).map_err(from_gv)?;
        if back.to_table().as_ref() != Some(&n) {
            return Err(verification_failed("inversion does not recover the input".into()));
        }
    }
    emit_json(io, to_value(&gw)?)
}

fn gv_invert(io: &Io, window: i32) -> Outcome<()> {
    let gw: GwTable = read_json(&io.input)?;
    let inv = gvseries::bps_from_gw(&gw, window).map_err(from_gv)?;
    if io.verify {
        if let Some(t) = inv.to_table() {
            if gvseries::gw_from_bps(&t, window).map_err(from_gv)? != gw {
                return Err(verification_failed("forward transform does not recover the input".into()));
            }
        }
    }
    emit_json(io, to_value(&inv)?)
}

fn gv_genus0(io: &Io, degree: usize) -> Outcome<()> {
    let n: BpsTable = read_json(&io.input)?;
    let v = gvseries::genus0_relation(&n, degree).map_err(from_gv)?;
    emit_json(io, json!({ "d": degree, "gw0": gvseries::format_rational(&v) }))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EulerCrossing {
    sign: i32,
    aut: u64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EulerInput {
    e: String,
    #[serde(default)]
    crossings: Vec<EulerCrossing>,
}

fn gv_eulercross(io: &Io) -> Outcome<()> {
    let input: EulerInput = read_json(&io.input)?;
    let e = gvseries::parse_rational(&input.e).map_err(from_gv)?;
    let list: Vec<(i32, u64)> = input.crossings.iter().map(|c| (c.sign, c.aut)).collect();
    let after = gvseries::euler_wallcross(&e, &list).map_err(from_gv)?;
    emit_json(
        io,
        json!({ "e_before": gvseries::format_rational(&e), "e_after": gvseries::format_rational(&after) }),
    )
}

fn run(cli: Cli) -> Outcome<()> {
    match cli.command {
        Command::Covers(CoversCmd::Enumerate {
            io,
            cap_degree,
            cap_nodes,
            seed,
        }) => covers_enumerate(&io, cap_degree, cap_nodes, seed),
        Command::Walls(WallsCmd::Classify { io, cap_order }) => walls_classify(&io, cap_order),
        Command::Groups(GroupsCmd::Table { io, cap_order }) => groups_table(&io, cap_order),
        Command::Specflow(SpecflowCmd::Sign { io, num }) => specflow_sign(&io, num),
        Command::Specflow(SpecflowCmd::W21 { io, num }) => specflow_w21(&io, num),
        Command::Specflow(SpecflowCmd::Path { io, num, sheet }) => specflow_path(&io, num, sheet),
        Command::Bifurcate(BifurcateCmd::Model {
            c,
            n,
            gamma,
            t,
            wall_sign,
            output,
        }) => bifurcate_model(c, n, gamma, t, wall_sign, output.as_deref()),
        Command::Bifurcate(BifurcateCmd::Ledger { io }) => bifurcate_ledger(&io),
        Command::Gv(GvCmd::Forward { io, window }) => gv_forward(&io, window),
        Command::Gv(GvCmd::Invert { io, window }) => gv_invert(&io, window),
        Command::Gv(GvCmd::Genus0 { io, degree }) => gv_genus0(&io, degree),
        Command::Gv(GvCmd::Eulercross { io }) => gv_eulercross(&io),
    }
}

fn configure_threads() -> Outcome<()> {
    if let Ok(v) = std::env::var("WALLCROSS_THREADS") {
        let n: usize = v
            .parse()
            .with_context(|| format!("WALLCROSS_THREADS={v:?} is not a thread count"))
            .map_err(invalid)?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(invalid)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match configure_threads().and_then(|_| run(cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
