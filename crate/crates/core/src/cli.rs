//! Command-line surface. `run` parses arguments, dispatches to a
//! subcommand and writes its report; the binary is a thin wrapper.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use crate::error::{LabError, Result};
use crate::linalg::op_norm;
use crate::mq::{block_evaluate, build_mq_poly, mq_agler_upper, MqSpec};
use crate::operator::{agler_ratio_search, diagonal_family, eval_poly, random_commuting_tuple, AglerSearchOptions, STRICT_RADIUS};
use crate::poly::{bohr_radius_estimate, sup_norm_torus_with, SparsePoly, SupNormOptions};
use crate::radii::{assemble_report_in, BoundReport};
use crate::report::{emit_table, OutputFormat, Table};
use crate::rng::stream;
use crate::series::Precision;
use crate::steiner::{ck_upper, greedy_steiner, rational_to_f64, steiner_bounds, DixonConstants, GreedyMode};
use crate::transfer::{quadrature_check, random_colligation, verify_lemma, GRID_CAP};

pub const THREADS_ENV: &str = "RADII_LAB_THREADS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INVARIANT: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "radii-lab", version, about = "Bohr, Bohr-Agler and Schur-Agler radius laboratory")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone)]
pub struct GlobalOpts {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Markdown)]
    pub format: OutputFormat,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Arithmetic for series evaluation.
    #[arg(long, global = true, default_value = "double")]
    pub precision: Precision,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Bound reports for K_d, KA_d and SA_d.
    Radii(RadiiArgs),
    /// Bohr radius of a polynomial read from JSON.
    Bohr(BohrArgs),
    /// Build and check a Maurizi-Queffelec polynomial.
    Mq(MqArgs),
    /// Random search for a large ||f(T)|| / ||f||_inf.
    AglerSearch(AglerArgs),
    /// Coefficient estimate for random isometric realizations.
    Transfer(TransferArgs),
    /// Partial Steiner system bounds and greedy construction.
    Steiner(SteinerArgs),
    /// Constants of the Dixon-type estimate.
    Constants(ConstantsArgs),
}

#[derive(Debug, Args)]
pub struct RadiiArgs {
    #[arg(long, conflicts_with = "d_range", required_unless_present = "d_range")]
    pub d: Option<u64>,
    /// Inclusive range `A:B`.
    #[arg(long = "d-range")]
    pub d_range: Option<String>,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct BohrArgs {
    #[arg(long)]
    pub poly: PathBuf,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct MqArgs {
    #[arg(long)]
    pub q: usize,
    #[arg(long)]
    pub m: usize,
    /// Compare block and naive evaluation and check the norm bound on
    /// random tuples.
    #[arg(long)]
    pub verify: bool,
    #[arg(long)]
    pub emit: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 50)]
    pub trials: usize,
}

#[derive(Debug, Args)]
pub struct AglerArgs {
    #[arg(long)]
    pub poly: PathBuf,
    #[arg(long, default_value_t = 10_000)]
    pub budget: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Comma-separated matrix sizes.
    #[arg(long, default_value = "4,6,8", value_delimiter = ',')]
    pub dims: Vec<usize>,
    /// Divide by the l1 norm (certified) instead of the sup-norm estimate.
    #[arg(long)]
    pub certify: bool,
    /// Allow operators of norm exactly 1.
    #[arg(long)]
    pub allow_boundary: bool,
    /// Write the best tuple as JSON.
    #[arg(long)]
    pub emit_witness: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TransferArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub d: usize,
    /// Comma-separated block dimensions, one per variable.
    #[arg(long, value_delimiter = ',')]
    pub blocks: Vec<usize>,
    #[arg(long, default_value_t = 6)]
    pub kmax: u32,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    /// Also run the roots-of-unity quadrature check for each k.
    #[arg(long)]
    pub quadrature: bool,
}

#[derive(Debug, Args)]
pub struct SteinerArgs {
    #[arg(long)]
    pub t: u64,
    #[arg(long)]
    pub k: u64,
    #[arg(long)]
    pub d: u64,
    #[arg(long)]
    pub construct: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct ConstantsArgs {
    #[arg(long)]
    pub k: u64,
    #[arg(long)]
    pub d: u64,
    #[arg(long, default_value_t = 1.0)]
    pub kappa: f64,
    /// Constant of the crude `c k (e/2)^k d^{(k-2)/2}` form.
    #[arg(long)]
    pub c: Option<f64>,
    /// Use the kappa bound for B_1 instead of the exact value 1.
    #[arg(long)]
    pub no_b1_exact: bool,
}

/// A command result: a JSON document and a table view of it.
struct Output {
    json: serde_json::Value,
    table: Table,
    /// Invariant violations found while running (exit code 2).
    violations: Vec<String>,
}

impl Output {
    fn render(&self, format: OutputFormat) -> Result<String> {
        match format {
            OutputFormat::Json => Ok(serde_json::to_string_pretty(&self.json)? + "\n"),
            OutputFormat::Csv => self.table.to_csv(),
            OutputFormat::Markdown => Ok(self.table.to_markdown()),
        }
    }
}

fn kv_table(pairs: &[(&str, String)]) -> Table {
    let mut t = Table::new(&["key", "value"]);
    for (k, v) in pairs {
        t.push(vec![k.to_string(), v.clone()]);
    }
    t
}

fn to_json<T: Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("plain data serializes")
}

fn parse_range(s: &str) -> Result<(u64, u64)> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| LabError::Parse(format!("range {s:?} must look like A:B")))?;
    let parse = |x: &str| {
        x.trim()
            .parse::<u64>()
            .map_err(|e| LabError::Parse(format!("bad range bound {x:?}: {e}")))
    };
    let (a, b) = (parse(a)?, parse(b)?);
    if a == 0 || a > b {
        return Err(LabError::Parse(format!("range {s:?} must satisfy 1 <= A <= B")));
    }
    Ok((a, b))
}

fn read_poly(path: &PathBuf) -> Result<SparsePoly> {
    SparsePoly::from_json(&std::fs::read_to_string(path)?)
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(LabError::domain(format!("tol must be positive, got {tol}")));
    }
    Ok(())
}

fn cmd_radii(args: &RadiiArgs, g: &GlobalOpts) -> Result<String> {
    check_tol(args.tol)?;
    let ds: Vec<u64> = match (&args.d, &args.d_range) {
        (Some(d), _) => vec![*d],
        (None, Some(r)) => {
            let (a, b) = parse_range(r)?;
            (a..=b).collect()
        }
        (None, None) => return Err(LabError::Parse("need --d or --d-range".into())),
    };
    use rayon::prelude::*;
    let reports = ds
        .par_iter()
        .map(|&d| assemble_report_in(g.precision, d, args.tol))
        .collect::<Result<Vec<BoundReport>>>()?;
    emit_table(&reports, g.format)
}

fn cmd_bohr(args: &BohrArgs) -> Result<Output> {
    check_tol(args.tol)?;
    let f = read_poly(&args.poly)?;
    let sup = sup_norm_torus_with(&f, &SupNormOptions::default())?;
    let br = bohr_radius_estimate(&f, args.tol)?;
    let table = kv_table(&[
        ("dim", f.dim().to_string()),
        ("terms", f.len().to_string()),
        ("l1_norm", format!("{}", f.l1_norm())),
        ("sup_norm_lower", format!("{}", sup.lower)),
        ("bohr_radius", format!("{}", br.radius)),
        ("capped", br.capped.to_string()),
    ]);
    Ok(Output {
        json: json!({
            "dim": f.dim(),
            "terms": f.len(),
            "l1_norm": f.l1_norm(),
            "sup_norm_lower": sup.lower,
            "bohr_radius": br,
        }),
        table,
        violations: Vec::new(),
    })
}

fn cmd_mq(args: &MqArgs) -> Result<Output> {
    let spec = MqSpec::new(args.q, args.m)?;
    let p = build_mq_poly(&spec)?;
    if let Some(path) = &args.emit {
        std::fs::write(path, p.to_json())?;
    }
    let upper = mq_agler_upper(&spec);
    let l1 = p.l1_norm();
    let mut pairs = vec![
        ("q", spec.q.to_string()),
        ("m", spec.m.to_string()),
        ("variables", spec.variables().to_string()),
        ("terms", p.len().to_string()),
        ("l1_norm", format!("{l1}")),
        ("agler_upper", format!("{upper}")),
        ("l1_over_agler_upper", format!("{}", l1 / upper)),
    ];
    let mut doc = json!({
        "q": spec.q,
        "m": spec.m,
        "variables": spec.variables(),
        "terms": p.len(),
        "l1_norm": l1,
        "agler_upper": upper,
    });
    let mut violations = Vec::new();
    if args.verify {
        let mut rng = stream(args.seed, 0);
        let mut max_norm: f64 = 0.0;
        let mut max_gap: f64 = 0.0;
        for trial in 0..args.trials {
            let t = if trial % 2 == 0 {
                diagonal_family(&mut rng, spec.variables(), 3, STRICT_RADIUS)
            } else {
                random_commuting_tuple(&mut rng, spec.variables(), 8, STRICT_RADIUS)
            };
            let fast = block_evaluate(&spec, &t)?;
            let slow = eval_poly(&p, &t)?;
            max_gap = max_gap.max(crate::linalg::max_abs(&(&fast - slow)));
            max_norm = max_norm.max(op_norm(&fast));
        }
        if max_gap > 1e-8 {
            violations.push(format!("block and naive evaluation differ by {max_gap:e}"));
        }
        if max_norm > upper + 1e-6 {
            violations.push(format!("||P(T)|| = {max_norm} exceeds {upper}"));
        }
        pairs.push(("verify_trials", args.trials.to_string()));
        pairs.push(("max_block_naive_gap", format!("{max_gap:e}")));
        pairs.push(("max_norm", format!("{max_norm}")));
        doc["verify"] = json!({
            "trials": args.trials,
            "max_block_naive_gap": max_gap,
            "max_norm": max_norm,
            "passed": violations.is_empty(),
        });
    }
    Ok(Output {
        json: doc,
        table: kv_table(&pairs),
        violations,
    })
}

fn cmd_agler(args: &AglerArgs) -> Result<Output> {
    let f = read_poly(&args.poly)?;
    let opts = AglerSearchOptions {
        budget: args.budget,
        seed: args.seed,
        dims: args.dims.clone(),
        certify: args.certify,
        allow_boundary: args.allow_boundary,
        ..AglerSearchOptions::default()
    };
    let res = agler_ratio_search(&f, &opts)?;
    if let Some(path) = &args.emit_witness {
        std::fs::write(path, res.witness.to_json())?;
    }
    let table = kv_table(&[
        ("ratio", format!("{}", res.ratio)),
        ("witness_norm", format!("{}", res.witness_norm)),
        ("denominator", format!("{}", res.denominator)),
        ("denominator_kind", if args.certify { "l1" } else { "sup_lower" }.into()),
        ("witness_size", res.witness.n().to_string()),
        ("evaluations", res.evaluations.to_string()),
        ("budget_exhausted", res.budget_exhausted.to_string()),
    ]);
    Ok(Output {
        json: json!({
            "ratio": res.ratio,
            "witness_norm": res.witness_norm,
            "denominator": res.denominator,
            "certified": args.certify,
            "sup_lower": res.sup_lower,
            "witness_size": res.witness.n(),
            "evaluations": res.evaluations,
            "budget_exhausted": res.budget_exhausted,
        }),
        table,
        violations: Vec::new(),
    })
}

fn cmd_transfer(args: &TransferArgs) -> Result<Output> {
    check_tol(args.tol)?;
    if args.blocks.len() != args.d {
        return Err(LabError::domain(format!(
            "--blocks lists {} dimensions but --d is {}",
            args.blocks.len(),
            args.d
        )));
    }
    let col = random_colligation(args.seed, &args.blocks)?;
    let rep = verify_lemma(&col, args.kmax, args.tol)?;
    let mut violations: Vec<String> = rep
        .violations(args.tol)
        .iter()
        .map(|r| format!("S_{} = {} exceeds {}", r.k, r.s_k, r.bound))
        .collect();
    if !rep.chain.holds {
        violations.push(format!("l1 chain: {} > {}", rep.chain.truncated, rep.chain.rhs));
    }
    let mut cols = vec!["k", "S_k", "bound", "margin"];
    if args.quadrature {
        cols.extend(["quadrature", "exact_integral", "B_norm_sq"]);
    }
    let mut table = Table::new(&cols);
    let mut quad = Vec::new();
    for row in &rep.rows {
        let mut cells = vec![
            row.k.to_string(),
            format!("{}", row.s_k),
            format!("{}", row.bound),
            format!("{}", row.margin),
        ];
        if args.quadrature {
            let grid = (2 * row.k as u128 + 1).pow(col.d() as u32);
            if grid <= GRID_CAP {
                let q = quadrature_check(&col, row.k)?;
                if !q.agrees(1e-10) || !q.within_bound(args.tol) {
                    violations.push(format!("quadrature check failed at k = {}", row.k));
                }
                cells.extend([format!("{}", q.quadrature), format!("{}", q.exact), format!("{}", q.bound)]);
                quad.push(Some(q));
            } else {
                cells.extend(["skipped".into(), "skipped".into(), "skipped".into()]);
                quad.push(None);
            }
        }
        table.push(cells);
    }
    let mut doc = json!({
        "seed": args.seed,
        "d": args.d,
        "blocks": args.blocks,
        "f0_modulus": rep.f0_modulus,
        "rows": rep.rows,
        "l1_chain": rep.chain,
        "violations": violations,
    });
    if args.quadrature {
        doc["quadrature"] = to_json(&quad);
    }
    Ok(Output {
        json: doc,
        table,
        violations,
    })
}

fn cmd_steiner(args: &SteinerArgs) -> Result<Output> {
    let b = steiner_bounds(args.t, args.k, args.d)?;
    let mut pairs = vec![
        ("t", args.t.to_string()),
        ("k", args.k.to_string()),
        ("d", args.d.to_string()),
        ("upper", b.upper.to_string()),
        ("dixon_lower", b.dixon_lower.to_string()),
        ("crude_lower", b.crude_lower.as_ref().map_or("n/a".into(), |c| c.to_string())),
    ];
    let mut doc = json!({
        "t": args.t, "k": args.k, "d": args.d,
        "upper": b.upper.to_string(),
        "upper_float": rational_to_f64(&b.upper),
        "dixon_lower": b.dixon_lower.to_string(),
        "dixon_lower_float": rational_to_f64(&b.dixon_lower),
        "crude_lower": b.crude_lower.as_ref().map(|c| c.to_string()),
        "crude_lower_float": b.crude_lower.as_ref().map(rational_to_f64),
    });
    let mut violations = Vec::new();
    if args.construct {
        let g = greedy_steiner(args.t, args.k, args.d, args.seed)?;
        g.system.validate()?;
        if g.mode == GreedyMode::Exhaustive {
            let need = b.dixon_lower.ceil();
            if num_rational::BigRational::from_integer(g.system.len().into()) < need {
                violations.push(format!("greedy found {} blocks, below {}", g.system.len(), need));
            }
        }
        pairs.push(("greedy_mode", format!("{:?}", g.mode).to_lowercase()));
        pairs.push(("greedy_blocks", g.system.len().to_string()));
        doc["greedy"] = to_json(&g);
    }
    Ok(Output {
        json: doc,
        table: kv_table(&pairs),
        violations,
    })
}

fn cmd_constants(args: &ConstantsArgs) -> Result<Output> {
    let consts = DixonConstants {
        kappa: args.kappa,
        b1_exact: !args.no_b1_exact,
        ..DixonConstants::default()
    };
    let ck = ck_upper(args.k, args.d, &consts, None, args.c)?;
    let mut pairs = vec![
        ("k", args.k.to_string()),
        ("d", args.d.to_string()),
        ("G_C", format!("[{}, {}]", consts.g_lo, consts.g_hi)),
        ("kappa", format!("{}{}", consts.kappa, if consts.kappa_normalized() { " (normalized)" } else { "" })),
        ("B_k-1", format!("{}", ck.b_used)),
        ("Pol_k", format!("{}", ck.pol)),
        ("C_k(d) upper", format!("{}", ck.value)),
        ("kappa_dependent", ck.kappa_dependent.to_string()),
    ];
    if let Some(c) = ck.crude {
        pairs.push(("crude form", format!("{c}")));
    }
    Ok(Output {
        json: json!({ "constants": consts, "ck_upper": ck }),
        table: kv_table(&pairs),
        violations: Vec::new(),
    })
}

fn configure_threads() {
    if let Some(n) = std::env::var(THREADS_ENV).ok().and_then(|v| v.parse::<usize>().ok()) {
        if n > 0 {
            // Fails only if a pool already exists, which keeps its size.
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

fn exit_code_for(err: &LabError) -> i32 {
    if err.is_invariant_violation() {
        EXIT_INVARIANT
    } else {
        EXIT_USAGE
    }
}

fn dispatch(cli: &Cli) -> Result<(String, Vec<String>)> {
    let g = &cli.global;
    let out = match &cli.command {
        Command::Radii(a) => return cmd_radii(a, g).map(|s| (s, Vec::new())),
        Command::Bohr(a) => cmd_bohr(a)?,
        Command::Mq(a) => cmd_mq(a)?,
        Command::AglerSearch(a) => cmd_agler(a)?,
        Command::Transfer(a) => cmd_transfer(a)?,
        Command::Steiner(a) => cmd_steiner(a)?,
        Command::Constants(a) => cmd_constants(a)?,
    };
    Ok((out.render(g.format)?, out.violations))
}

/// Runs the CLI on `args` (including the program name) and returns the
/// exit code: 0 on success, 1 on usage or domain errors, 2 when an
/// invariant check fails.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{text}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(stderr, "{text}");
                    EXIT_USAGE
                }
            };
        }
    };
    configure_threads();
    match dispatch(&cli) {
        Ok((text, violations)) => {
            let written = match &cli.global.out {
                Some(path) => std::fs::write(path, &text).map_err(LabError::from),
                None => stdout.write_all(text.as_bytes()).map_err(LabError::from),
            };
            if let Err(e) = written {
                let _ = writeln!(stderr, "error: {e}");
                return EXIT_USAGE;
            }
            if violations.is_empty() {
                EXIT_OK
            } else {
                for v in &violations {
                    let _ = writeln!(stderr, "invariant violated: {v}");
                }
                EXIT_INVARIANT
            }
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code_for(&e)
        }
    }
}
