//! Command-line front end: bound queries, code construction, extremal
//! family generation, verification sweeps, and figure-data emission.
//!
//! Exit codes: 0 success, 2 usage or domain error, 3 rejected resource
//! budget, 4 verification failure.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::bounds::{self, BoundValue};
use crate::dist::ProbabilityMultiset;
use crate::extremal::{self, ExtremalFamily};
use crate::huffman::{build_huffman, CodeTree, NodeId};
use crate::oracle::{self, SearchConstraint, SearchMode};
use crate::{Error, Result};

#[derive(Parser)]
#[command(
    name = "redlab",
    version,
    about = "Huffman redundancy bounds, extremal families, and exhaustive verifiers"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the closed-form redundancy bounds at p.
    Bounds {
        p: f64,
        /// Alphabet size for the D-ary lower bound.
        #[arg(short = 'D', long = "radix")]
        radix: Option<u32>,
        /// Emit one JSON record instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Build a Huffman code and report lengths, L, H, and R.
    Huffman {
        /// Distribution file: one probability per line, '#' comments.
        file: Option<PathBuf>,
        /// Inline comma-separated probabilities.
        #[arg(short = 'v', long = "values")]
        values: Option<String>,
        #[arg(short = 'D', long = "radix", default_value_t = 2)]
        radix: u32,
        /// Print the code tree.
        #[arg(long)]
        tree: bool,
    },
    /// Emit an extremal distribution with measured and target redundancy.
    Extremal {
        /// One of: upper, backbone, pn1, pn2, dary.
        family: String,
        p: f64,
        /// Tail weight for the upper family.
        #[arg(long, default_value_t = 1e-4)]
        eps: f64,
        /// Depth override for the backbone families.
        #[arg(short = 'm', long)]
        m: Option<u32>,
        /// Alphabet size for the dary family.
        #[arg(short = 'D', long = "radix")]
        radix: Option<u32>,
    },
    /// Run a verification suite against the brute-force oracle.
    Verify {
        /// One of: sandwich, tightness, kkt, johnsen, equalize, eq24.
        suite: String,
        /// Grid denominator.
        #[arg(long)]
        q: Option<u32>,
        /// Symbol budget.
        #[arg(long)]
        n: Option<usize>,
        /// Depth for the kkt suite (default: sweep 2..=10).
        #[arg(long)]
        m: Option<u32>,
        #[arg(long, default_value_t = 200_000)]
        iterations: u64,
        #[arg(long, default_value_t = 0.1)]
        step: f64,
        /// Worker threads; output is identical for any value.
        #[arg(long, env = "REDLAB_WORKERS")]
        workers: Option<usize>,
    },
    /// Write figure data as CSV.
    Figure {
        /// One of: fig2, fig4, fig5.
        figure: String,
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
        /// Output path (default: <figure>.csv).
        #[arg(short = 'o', long = "out")]
        out: Option<PathBuf>,
    },
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::GridTooFine(_) => 3,
        Error::NoConvergence(_) => 4,
        _ => 2,
    }
}

/// Parses arguments from the environment, runs the command, and returns
/// the process exit code.
pub fn run() -> i32 {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(command: Command) -> Result<i32> {
    match command {
        Command::Bounds { p, radix, json } => cmd_bounds(p, radix, json),
        Command::Huffman {
            file,
            values,
            radix,
            tree,
        } => cmd_huffman(file, values, radix, tree),
        Command::Extremal {
            family,
            p,
            eps,
            m,
            radix,
        } => cmd_extremal(&family, p, eps, m, radix),
        Command::Verify {
            suite,
            q,
            n,
            m,
            iterations,
            step,
            workers,
        } => cmd_verify(&suite, q, n, m, iterations, step, workers),
        Command::Figure { figure, step, out } => cmd_figure(&figure, step, out),
    }
}

fn cmd_bounds(p: f64, radix: Option<u32>, json: bool) -> Result<i32> {
    if !(p > 0.0 && p < 1.0) || !p.is_finite() {
        eprintln!("p must be in (0,1)");
        return Ok(2);
    }
    let mut records: Vec<BoundValue> = vec![
        bounds::r_max(p)?,
        bounds::r_ub(p)?,
        bounds::f_p1(p)?,
        bounds::r_min(p)?,
    ];
    if p <= 0.5 {
        records.push(bounds::r_min_pn(p)?);
    }
    if let Some(d) = radix {
        records.push(bounds::r_min_d(p, d)?);
    }
    if json {
        let record = serde_json::json!({ "p": p, "bounds": records });
        println!("{record}");
        return Ok(0);
    }
    println!("p        = {p:.6}");
    for rec in &records {
        let mut line = format!("{:8} = {:.6}", rec.bound.as_str(), rec.value);
        if let Some(m) = rec.witness_m {
            let _ = write!(line, "  (m={m}, {})", rec.branch);
        } else {
            let _ = write!(line, "  [{}]", rec.branch);
        }
        println!("{line}");
    }
    Ok(0)
}

fn parse_inline(values: &str) -> Result<ProbabilityMultiset> {
    let mut probs = Vec::new();
    for (i, field) in values.split(',').enumerate() {
        let field = field.trim();
        if field.is_empty() {
            continue;
        }
        let v: f64 = field.parse().map_err(|_| Error::Parse {
            line: i + 1,
            msg: format!("not a number: {field:?}"),
        })?;
        probs.push(v);
    }
    ProbabilityMultiset::new(&probs)
}

fn dump_tree(tree: &CodeTree, id: NodeId, symbols: &HashMap<NodeId, Option<usize>>, indent: usize) {
    let pad = "  ".repeat(indent);
    let prob = tree.node_prob(id).expect("node exists");
    if tree.is_internal(id).expect("node exists") {
        println!("{pad}* {prob:.6}");
        for child in tree.children(id).expect("internal node") {
            dump_tree(tree, child, symbols, indent + 1);
        }
    } else {
        match symbols.get(&id) {
            Some(Some(s)) => println!("{pad}- {prob:.6}  (symbol {s})"),
            _ => println!("{pad}- {prob:.6}  (dummy)"),
        }
    }
}

fn cmd_huffman(
    file: Option<PathBuf>,
    values: Option<String>,
    radix: u32,
    tree: bool,
) -> Result<i32> {
    let dist = match (&file, &values) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(path)?;
            ProbabilityMultiset::parse(&text)?
        }
        (None, Some(v)) => parse_inline(v)?,
        _ => {
            eprintln!("provide exactly one of: a distribution file, or -v values");
            return Ok(2);
        }
    };
    let code = build_huffman(&dist, radix)?;
    let lengths: Vec<String> = code
        .code_lengths()
        .as_slice()
        .iter()
        .map(|l| l.to_string())
        .collect();
    let entropy = dist.entropy(radix)?;
    let avg = code.average_length();
    println!("n = {}  D = {}  dummies = {}", dist.len(), radix, code.dummy_count());
    println!("lengths: {}", lengths.join(" "));
    println!("L = {avg:.6}");
    println!("H = {entropy:.6}");
    println!("R = {:.6}", avg - entropy);
    if tree {
        let symbols: HashMap<NodeId, Option<usize>> = code
            .leaves()
            .into_iter()
            .map(|(id, symbol, _)| (id, symbol))
            .collect();
        println!("tree:");
        dump_tree(&code, code.root(), &symbols, 1);
    }
    Ok(0)
}

fn cmd_extremal(
    family: &str,
    p: f64,
    eps: f64,
    m: Option<u32>,
    radix: Option<u32>,
) -> Result<i32> {
    let member: ExtremalFamily = match family {
        "upper" => extremal::upper_family(p, eps)?,
        "backbone" => extremal::backbone(p, m)?,
        "pn1" => extremal::pn_family_1(p)?,
        "pn2" => extremal::pn_family_2(p)?,
        "dary" => extremal::dary_backbone(p, radix.unwrap_or(3), m)?,
        other => {
            eprintln!("unknown family {other:?}; expected upper, backbone, pn1, pn2, or dary");
            return Ok(2);
        }
    };
    print!("{}", member.dist.to_text());
    println!("# family   = {}", member.family.as_str());
    println!("# p        = {p}");
    if let Some(eps) = member.eps {
        println!("# eps      = {eps}");
    }
    if let Some(m) = member.m {
        println!("# m        = {m}");
    }
    if member.radix != 2 {
        println!("# D        = {}", member.radix);
    }
    println!("# feasible = {}", member.feasible);
    println!("# measured R = {:.6}", member.measured()?);
    println!("# target R   = {:.6}", member.target());
    Ok(0)
}

fn cmd_verify(
    suite: &str,
    q: Option<u32>,
    n: Option<usize>,
    m: Option<u32>,
    iterations: u64,
    step: f64,
    workers: Option<usize>,
) -> Result<i32> {
    if let Some(w) = workers {
        if w > 0 {
            // Ignore the error when a pool already exists; output does not
            // depend on the worker count.
            let _ = rayon::ThreadPoolBuilder::new().num_threads(w).build_global();
        }
    }
    match suite {
        "sandwich" => verify_sandwich(q.unwrap_or(32), n.unwrap_or(5)),
        "tightness" => verify_tightness(q.unwrap_or(32), n.unwrap_or(5)),
        "kkt" => verify_kkt(m, iterations, step),
        "johnsen" => verify_johnsen(q.unwrap_or(10), n.unwrap_or(5)),
        "equalize" => verify_equalize(),
        "eq24" => verify_eq24(),
        other => {
            eprintln!(
                "unknown suite {other:?}; expected sandwich, tightness, kkt, johnsen, equalize, or eq24"
            );
            Ok(2)
        }
    }
}

fn verify_sandwich(q: u32, n: usize) -> Result<i32> {
    let mut violations = 0u32;
    let mut builds = 0u64;
    let mut worst_lower = f64::INFINITY;
    let mut worst_upper = f64::INFINITY;
    for p_num in 1..q {
        let p = f64::from(p_num) / f64::from(q);
        let lo = oracle::search_extremal(p_num, q, n, SearchMode::Min, SearchConstraint::ContainsP)?;
        let hi = oracle::search_extremal(p_num, q, n, SearchMode::Max, SearchConstraint::ContainsP)?;
        builds += lo.examined + hi.examined;
        let lower_slack = lo.value - bounds::r_min(p)?.value;
        let upper_slack = bounds::r_max(p)?.value - hi.value;
        if lower_slack < -1e-9 || upper_slack < -1e-9 {
            violations += 1;
            println!("violation at p={p_num}/{q}: min={:.9} max={:.9}", lo.value, hi.value);
        }
        worst_lower = worst_lower.min(lower_slack);
        worst_upper = worst_upper.min(upper_slack);
    }
    println!(
        "sandwich q={q} N<={n}: {} grid points, {builds} code builds, violations={violations}",
        q - 1
    );
    println!("worst slack above r_min = {worst_lower:.3e}");
    println!("worst slack below r_max = {worst_upper:.3e}");
    if violations == 0 {
        println!("PASS");
        Ok(0)
    } else {
        println!("FAIL");
        Ok(4)
    }
}

fn verify_tightness(q: u32, n: usize) -> Result<i32> {
    let mut checked = 0u32;
    let mut skipped = 0u32;
    let mut failures = 0u32;
    let mut worst = 0.0f64;
    for p_num in 1..q {
        let p = f64::from(p_num) / f64::from(q);
        let bound = bounds::r_min(p)?;
        let m = bound.witness_m.expect("r_min reports its depth");
        let on_grid = (q - p_num) % (2u32.pow(m) - 1) == 0;
        if !on_grid || (m as usize + 1) > n {
            skipped += 1;
            continue;
        }
        checked += 1;
        let lo = oracle::search_extremal(p_num, q, n, SearchMode::Min, SearchConstraint::ContainsP)?;
        let gap = (lo.value - bound.value).abs();
        worst = worst.max(gap);
        if gap > 1e-9 {
            failures += 1;
            println!("miss at p={p_num}/{q}: search {:.12} vs bound {:.12}", lo.value, bound.value);
        }
    }
    println!("tightness q={q} N<={n}: {checked} on-grid points checked, {skipped} skipped");
    println!("worst achievement gap = {worst:.3e}");
    if failures == 0 {
        println!("PASS");
        Ok(0)
    } else {
        println!("FAIL");
        Ok(4)
    }
}

fn verify_kkt(m: Option<u32>, iterations: u64, step: f64) -> Result<i32> {
    let depths: Vec<u32> = match m {
        Some(m) => vec![m],
        None => (2..=10).collect(),
    };
    let mut failures = 0u32;
    for m in depths {
        match oracle::kkt_verify(m, iterations, step) {
            Ok(report) => {
                println!(
                    "m={m}: max deviation {:.3e}, objective gap {:.3e}, {} iterations",
                    report.max_deviation, report.objective_gap, report.iterations_used
                );
                if report.max_deviation >= 1e-6 || report.objective_gap >= 1e-6 {
                    failures += 1;
                }
            }
            Err(Error::NoConvergence(msg)) => {
                println!("m={m}: no convergence ({msg})");
                failures += 1;
            }
            Err(e) => return Err(e),
        }
    }
    if failures == 0 {
        println!("PASS");
        Ok(0)
    } else {
        println!("FAIL");
        Ok(4)
    }
}

fn verify_johnsen(q: u32, n: usize) -> Result<i32> {
    let report = oracle::johnsen_verify(q, n)?;
    println!(
        "johnsen q={q} N<={n}: {} distributions with a symbol at or above 0.4",
        report.checked
    );
    match &report.counterexample {
        None => {
            println!("all give that symbol a one-letter codeword");
            println!("PASS");
            Ok(0)
        }
        Some(parts) => {
            println!("counterexample: {parts:?}/{q}");
            println!("FAIL");
            Ok(4)
        }
    }
}

fn verify_equalize() -> Result<i32> {
    let mut failures = 0u32;
    let cases: Vec<(&str, ProbabilityMultiset, u32, f64, bool)> = vec![
        (
            "three symbols, top fixed",
            ProbabilityMultiset::new(&[0.5, 0.3, 0.2])?,
            3,
            0.5,
            false,
        ),
        (
            "three symbols, max fixed",
            ProbabilityMultiset::new(&[0.4, 0.35, 0.25])?,
            3,
            0.4,
            false,
        ),
        (
            "ternary backbone",
            extremal::dary_backbone(0.1, 3, Some(2))?.dist,
            3,
            0.1,
            true,
        ),
        (
            "binary backbone p=0.3",
            extremal::backbone(0.3, None)?.dist,
            2,
            0.3,
            true,
        ),
        (
            "binary backbone p=0.45",
            extremal::backbone(0.45, None)?.dist,
            2,
            0.45,
            true,
        ),
    ];
    for (name, dist, radix, p, expect_fixed) in cases {
        let outcome = oracle::equalize_verify(&dist, radix, p)?;
        println!(
            "{name}: R {:.6} -> {:.6}, already equalized: {}",
            outcome.redundancy_before, outcome.redundancy_after, outcome.already_equalized
        );
        if outcome.already_equalized != expect_fixed
            || outcome.redundancy_after > outcome.redundancy_before + 1e-9
        {
            failures += 1;
        }
    }
    if failures == 0 {
        println!("PASS");
        Ok(0)
    } else {
        println!("FAIL");
        Ok(4)
    }
}

fn verify_eq24() -> Result<i32> {
    let report = oracle::search_extremal(4, 40, 6, SearchMode::Min, SearchConstraint::MinIsP)?;
    let floor_term = bounds::depth_term(0.1, 3, 2);
    let ceil_term = bounds::depth_term(0.1, 4, 2);
    println!("least-likely-symbol grid minimum (p=4/40, N<=6): {:.6}", report.value);
    println!("witness: {:?}/40", report.witness);
    println!("first-term candidate, floor depth m=3: {floor_term:.6}");
    println!("first-term candidate, ceil depth  m=4: {ceil_term:.6}");
    let floor_sound = report.value >= floor_term - 1e-9;
    let ceil_refuted = report.value < ceil_term - 1e-9;
    println!(
        "floor form {} the grid minimum",
        if floor_sound { "stays below" } else { "EXCEEDS" }
    );
    println!(
        "ceil form {} the grid minimum",
        if ceil_refuted { "exceeds" } else { "stays below" }
    );
    if floor_sound && ceil_refuted {
        println!("PASS: the floor form is the sound lower bound");
        Ok(0)
    } else {
        println!("FAIL");
        Ok(4)
    }
}

fn figure_grid(step: f64, stop: f64) -> Vec<f64> {
    let count = (stop / step).round() as u64;
    (1..=count).map(|k| (k as f64 * step).min(stop)).collect()
}

fn fig2(step: f64) -> Result<String> {
    let mut out = String::from("p,r_max,r_ub,f_p1\n");
    for p in figure_grid(step, 1.0) {
        if p >= 1.0 {
            break;
        }
        let _ = writeln!(
            out,
            "{:.6},{:.6},{:.6},{:.6}",
            p,
            bounds::r_max(p)?.value,
            bounds::r_ub(p)?.value,
            bounds::f_p1(p)?.value
        );
    }
    Ok(out)
}

fn fig4(step: f64) -> Result<String> {
    let mut out = String::from("p,r_min,r_max\n");
    for k in 1..=3u32 {
        let _ = writeln!(out, "# beta_{k},{:.6}", bounds::beta(k));
    }
    for p in figure_grid(step, 1.0) {
        if p >= 1.0 {
            break;
        }
        let _ = writeln!(
            out,
            "{:.6},{:.6},{:.6}",
            p,
            bounds::r_min(p)?.value,
            bounds::r_max(p)?.value
        );
    }
    Ok(out)
}

fn fig5(step: f64) -> Result<String> {
    let mut out = String::from("p,r_min,r_min_pN\n");
    for p in figure_grid(step, 0.5) {
        let _ = writeln!(
            out,
            "{:.6},{:.6},{:.6}",
            p,
            bounds::r_min(p)?.value,
            bounds::r_min_pn(p)?.value
        );
    }
    Ok(out)
}

fn cmd_figure(figure: &str, step: f64, out: Option<PathBuf>) -> Result<i32> {
    if !(step > 0.0 && step < 0.5) || !step.is_finite() {
        eprintln!("step must be in (0, 0.5)");
        return Ok(2);
    }
    let (name, body) = match figure {
        "fig2" => ("fig2.csv", fig2(step)?),
        "fig4" => ("fig4.csv", fig4(step)?),
        "fig5" => ("fig5.csv", fig5(step)?),
        other => {
            eprintln!("unknown figure {other:?}; expected fig2, fig4, or fig5");
            return Ok(2);
        }
    };
    let path = out.unwrap_or_else(|| PathBuf::from(name));
    std::fs::write(&path, &body)?;
    let rows = body.lines().count() - 1;
    println!("wrote {} ({rows} rows)", path.display());
    Ok(0)
}

/// Emits the CSV body for a figure without touching the filesystem;
/// used by the golden-file tests.
pub fn figure_csv(figure: &str, step: f64) -> Result<String> {
    match figure {
        "fig2" => fig2(step),
        "fig4" => fig4(step),
        "fig5" => fig5(step),
        other => Err(Error::BadConstraint(format!("unknown figure {other:?}"))),
    }
}
