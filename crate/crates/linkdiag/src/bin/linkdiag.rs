//! Command-line front end. One subcommand per invocation; JSON artifacts on
//! stdout or written atomically with `--out`. Exit codes: 0 success, 2 when
//! input cannot even be parsed, 3 for domain errors, 4 when a budget is
//! exceeded.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::exit;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use linkdiag::census::{
    enumerate_diagrams_opts, evaluate_constants, parse_rational, regularity_budget,
    CensusOptions, DEFAULT_CENSUS_BUDGET,
};
use linkdiag::diagram::{emit_pd, parse_pd, Diagram, DiagramJson};
use linkdiag::error::LinkError;
use linkdiag::invariants::{jones_opts, kauffman_bracket_opts, DEFAULT_BRACKET_BUDGET};
use linkdiag::moves::normalize_writhe;
use linkdiag::satellite::{annular_embed, cable_signed, entangle, verify_zero_framing, AnnularDiagram, SatelliteResult};
use linkdiag::structure::{
    companion_disk_at, enumerate_cut_circles, extract_tangle, find_companion_disk,
    is_prime_diagram, split_connected_sum,
};

#[derive(Parser)]
#[command(
    name = "linkdiag",
    version,
    about = "Link diagram toolkit: validation, moves, structure, satellites, invariants, census"
)]
struct Cli {
    /// Line-oriented key=value file supplying defaults for absent flags.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Seed for randomized drivers. Accepted everywhere so scripted callers
    /// can pass it uniformly; the shipped pipelines are deterministic.
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,

    /// Pretty-print the JSON artifact.
    #[arg(long, global = true)]
    pretty: bool,

    /// Write the artifact to this file (atomically) instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,

    #[command(subcommand)]
    cmd: Cmd,
}

/// Diagram input: a PD code argument or a file (PD text, or diagram JSON if
/// it starts with '{').
#[derive(Args, Clone)]
struct InputArgs {
    /// PD code, e.g. "X(1,4,2,5) X(3,6,4,1) X(5,2,6,3)".
    code: Option<String>,

    /// Read the diagram from this file instead.
    #[arg(long = "in", value_name = "FILE")]
    input: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse and validate a diagram, reporting its basic combinatorics.
    Validate(InputArgs),
    /// Crossing signs, writhe and the linking matrix.
    Writhe(InputArgs),
    /// Kink a knot diagram until its writhe is zero; reports the move trace.
    Normalize(InputArgs),
    /// Decide diagram primality; reports the witness circle if composite.
    Prime(InputArgs),
    /// Split a knot diagram into prime connected-sum factors.
    Split(InputArgs),
    /// Find (or validate, with --face/--a1/--a2) a companion disk and cut
    /// the diagram into its inside and outside tangles.
    Disk {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, requires = "a1", requires = "a2")]
        face: Option<usize>,
        #[arg(long, requires = "face")]
        a1: Option<usize>,
        #[arg(long, requires = "face")]
        a2: Option<usize>,
    },
    /// Kauffman bracket state sum.
    Bracket {
        #[command(flatten)]
        input: InputArgs,
        /// Maximum crossings admitted to the 2^n state sum.
        #[arg(long, default_value_t = DEFAULT_BRACKET_BUDGET)]
        budget: usize,
        /// Worker threads; 0 picks the available parallelism.
        #[arg(long, default_value_t = 0)]
        threads: usize,
    },
    /// Jones polynomial (writhe-normalized bracket), in the variable t.
    Jones {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, default_value_t = DEFAULT_BRACKET_BUDGET)]
        budget: usize,
        #[arg(long, default_value_t = 0)]
        threads: usize,
    },
    /// Entangle an annular pattern with a companion knot: normalize the
    /// companion's writhe, double it, splice the pattern's marked arcs
    /// through the corridor.
    Entangle {
        /// Pattern file: annular JSON ({"code", "form"}), or a plain
        /// diagram to embed through its first companion disk.
        #[arg(long, value_name = "FILE")]
        pattern: PathBuf,
        /// Companion knot (PD text or diagram JSON).
        #[arg(long, value_name = "FILE")]
        companion: PathBuf,
        /// Keep the raw splice output instead of cancelling the kink
        /// quadruples.
        #[arg(long)]
        no_reduce: bool,
    },
    /// Close a blackboard-framed double of the companion into one curve
    /// with a single clasp crossing (4 cr + 1 crossings exactly).
    Cable {
        #[arg(long, value_name = "FILE")]
        companion: PathBuf,
        /// Clasp with the negative crossing instead of the positive one.
        #[arg(long)]
        negative_clasp: bool,
    },
    /// Wrapping and winding numbers of an annular diagram.
    Wrapping {
        /// Annular JSON, or a plain diagram to embed through its first
        /// companion disk.
        #[arg(long, value_name = "FILE")]
        annular: PathBuf,
    },
    /// Enumerate small diagram classes and tabulate prime counts and
    /// link-class lower bounds. `--out` names the census table file
    /// (bit-exact, verified and appended on reruns); the JSON summary
    /// always goes to stdout.
    Census {
        #[arg(long, value_name = "N")]
        max_n: usize,
        /// Worker threads; 0 picks the available parallelism. The table is
        /// byte-identical for every choice.
        #[arg(long, default_value_t = 0)]
        workers: usize,
        /// Keep a diagram and its mirror image as distinct classes.
        #[arg(long)]
        chiral: bool,
        /// Enumeration cap on the crossing count.
        #[arg(long, default_value_t = DEFAULT_CENSUS_BUDGET)]
        budget: usize,
    },
    /// Evaluate the growth and threshold constants exactly; every
    /// comparison is rational arithmetic.
    Bounds,
    /// Upper bound for the prime knots failing x-regularity: the strongly
    /// prime factor count divided by 152 x.
    Budget {
        /// Fraction in (0, 1], e.g. 3/4 or 0.75.
        #[arg(long)]
        x: String,
        /// Count of strongly prime factor knots observed.
        #[arg(long)]
        card: u64,
    },
}

enum CliError {
    /// Input that never became a diagram: exit 2.
    Usage(String),
    /// A well-posed request the domain refused: exit 3 or 4.
    Domain(LinkError),
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Domain(e) => e.exit_code(),
            CliError::Io(_) => 3,
        }
    }
    fn message(&self) -> String {
        match self {
            CliError::Usage(m) => m.clone(),
            CliError::Domain(e) => e.to_string(),
            CliError::Io(m) => m.clone(),
        }
    }
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => {}
        Err(e) => {
            eprintln!("linkdiag: {}", e.message());
            exit(e.exit_code());
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let config = match &cli.config {
        Some(path) => load_config(path)?,
        None => BTreeMap::new(),
    };
    let mut out = cli
        .out
        .clone()
        .or_else(|| config.get("out").map(PathBuf::from));
    let pretty = cli.pretty
        || config
            .get("pretty")
            .is_some_and(|v| v == "1" || v == "true");

    // The census table claims --out for itself (the .csk file); every other
    // artifact is JSON.
    let value = dispatch(&cli.cmd, &config, &mut out)?;
    emit_artifact(&value, out.as_deref(), pretty)
}

fn dispatch(
    cmd: &Cmd,
    config: &BTreeMap<String, String>,
    out: &mut Option<PathBuf>,
) -> Result<Value, CliError> {
    match cmd {
        Cmd::Validate(input) => {
            let d = load_diagram(input, config)?;
            Ok(json!({
                "crossings": d.n_crossings(),
                "edges": d.n_edges(),
                "components": d.n_components(),
                "free_loops": d.free_loops(),
                "faces": d.face_count(),
                "connected": d.is_connected(),
                "writhe": d.writhe(),
                "signs": d.signs(),
                "code": emit_pd(&d),
            }))
        }
        Cmd::Writhe(input) => {
            let d = load_diagram(input, config)?;
            let lm = d.linking_matrix();
            Ok(json!({
                "writhe": d.writhe(),
                "signs": d.signs(),
                "linking_matrix": lm.entries,
                "abs_linking": lm.abs_off_diagonal(),
            }))
        }
        Cmd::Normalize(input) => {
            let d = load_diagram(input, config)?;
            let before = d.writhe();
            let (nd, trace) = normalize_writhe(&d).map_err(CliError::Domain)?;
            Ok(json!({
                "code": emit_pd(&nd),
                "writhe_before": before,
                "writhe_after": nd.writhe(),
                "moves": trace,
            }))
        }
        Cmd::Prime(input) => {
            let d = load_diagram(input, config)?;
            let circles = enumerate_cut_circles(&d).map_err(CliError::Domain)?;
            let (prime, witness) = is_prime_diagram(&d).map_err(CliError::Domain)?;
            Ok(json!({
                "prime": prime,
                "witness": witness,
                "cut_circles": circles.len(),
            }))
        }
        Cmd::Split(input) => {
            let d = load_diagram(input, config)?;
            let factors = split_connected_sum(&d).map_err(CliError::Domain)?;
            Ok(json!({
                "factors": factors.iter().map(emit_pd).collect::<Vec<_>>(),
                "crossings": factors.iter().map(Diagram::n_crossings).collect::<Vec<_>>(),
            }))
        }
        Cmd::Disk { input, face, a1, a2 } => {
            let d = load_diagram(input, config)?;
            let disk = match (face, a1, a2) {
                (Some(f), Some(a1), Some(a2)) => {
                    companion_disk_at(&d, *f, *a1, *a2).map_err(CliError::Domain)?
                }
                _ => find_companion_disk(&d).map_err(CliError::Domain)?,
            };
            let (inside, outside) = extract_tangle(&d, &disk).map_err(CliError::Domain)?;
            Ok(json!({
                "face": disk.face,
                "a1": disk.a1,
                "a2": disk.a2,
                "inside": inside,
                "outside": outside,
            }))
        }
        Cmd::Bracket {
            input,
            budget,
            threads,
        } => {
            let d = load_diagram(input, config)?;
            let budget = num_override(config, "budget", *budget)?;
            let threads = num_override(config, "threads", *threads)?;
            let b = kauffman_bracket_opts(&d, budget, threads).map_err(CliError::Domain)?;
            Ok(json!({
                "bracket": b.text("A"),
                "terms": b,
                "writhe": d.writhe(),
            }))
        }
        Cmd::Jones {
            input,
            budget,
            threads,
        } => {
            let d = load_diagram(input, config)?;
            let budget = num_override(config, "budget", *budget)?;
            let threads = num_override(config, "threads", *threads)?;
            let p = jones_opts(&d, budget, threads).map_err(CliError::Domain)?;
            Ok(json!({
                "jones": p.text_half_exponents("t"),
                "terms": p,
            }))
        }
        Cmd::Entangle {
            pattern,
            companion,
            no_reduce,
        } => {
            let pat = load_annular(pattern)?;
            let comp = load_diagram_file(companion)?;
            let r = entangle(&pat, &comp, !no_reduce).map_err(CliError::Domain)?;
            Ok(satellite_json(&r))
        }
        Cmd::Cable {
            companion,
            negative_clasp,
        } => {
            let comp = load_diagram_file(companion)?;
            let r = cable_signed(&comp, !negative_clasp).map_err(CliError::Domain)?;
            Ok(satellite_json(&r))
        }
        Cmd::Wrapping { annular } => {
            let a = load_annular(annular)?;
            Ok(json!({
                "wrapping": a.wrapping_number(),
                "winding": a.winding(),
                "total_winding": a.total_winding(),
                "form": a.form(),
            }))
        }
        Cmd::Census {
            max_n,
            workers,
            chiral,
            budget,
        } => {
            let opts = CensusOptions {
                workers: num_override(config, "workers", *workers)?,
                budget: num_override(config, "budget", *budget)?,
                mirror_identified: !chiral,
            };
            let table = enumerate_diagrams_opts(*max_n, &opts).map_err(CliError::Domain)?;
            if let Some(path) = out.take() {
                table.save_csk(&path).map_err(CliError::Domain)?;
            }
            Ok(json!({
                "mirror_identified": table.mirror_identified,
                "generator": table.generator,
                "rows": table.rows,
            }))
        }
        Cmd::Bounds => {
            let r = evaluate_constants();
            Ok(serde_json::to_value(r).expect("json"))
        }
        Cmd::Budget { x, card } => {
            let x = parse_rational(x).map_err(|e| CliError::Usage(e.to_string()))?;
            let b = regularity_budget(*card, &x).map_err(CliError::Domain)?;
            Ok(json!({
                "x": rational_text(&x),
                "strongly_prime_count": card,
                "budget": rational_text(&b),
            }))
        }
    }
}

fn satellite_json(r: &SatelliteResult) -> Value {
    json!({
        "code": emit_pd(&r.output),
        "raw_crossings": r.raw_crossings,
        "reduced_crossings": r.reduced_crossings,
        "pattern_crossings": r.pattern_crossings,
        "companion_crossings": r.companion_crossings,
        "doubled_crossings": r.doubled_crossings,
        "double_linking": r.double_linking,
        "framing": verify_zero_framing(r),
        "wrapping": r.wrapping,
        "reliable": r.reliable,
        "components": r.output.n_components(),
        "trace": r.trace,
    })
}

fn rational_text(r: &num_rational::BigRational) -> String {
    use num_traits::One;
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Annular input: JSON with a `form` field is the annular format; anything
/// else is a plain diagram embedded through its first companion disk.
fn load_annular(path: &Path) -> Result<AnnularDiagram, CliError> {
    let text = read_input(path)?;
    let trimmed = text.trim_start();
    if trimmed.starts_with('{') {
        let v: Value = serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        if v.get("form").is_some() {
            return serde_json::from_value(v)
                .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())));
        }
    }
    let d = if trimmed.starts_with('{') {
        DiagramJson::from_str(&text)
    } else {
        parse_pd(&text)
    }
    .map_err(|e| CliError::Usage(e.to_string()))?;
    let disk = find_companion_disk(&d).map_err(CliError::Domain)?;
    annular_embed(&d, &disk).map_err(CliError::Domain)
}

fn load_diagram_file(path: &Path) -> Result<Diagram, CliError> {
    let text = read_input(path)?;
    parse_diagram_text(&text)
}

/// PD text, or diagram JSON when the first byte says so.
fn parse_diagram_text(text: &str) -> Result<Diagram, CliError> {
    let parsed = if text.trim_start().starts_with('{') {
        DiagramJson::from_str(text)
    } else {
        parse_pd(text)
    };
    parsed.map_err(|e| CliError::Usage(e.to_string()))
}

/// Recognized config keys; anything else is rejected up front.
const CONFIG_KEYS: &[&str] = &[
    "in", "out", "pretty", "budget", "threads", "seed", "face", "a1", "a2", "workers",
];

fn load_config(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))?;
    let mut map = BTreeMap::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(CliError::Usage(format!(
                "config {}:{}: expected key=value",
                path.display(),
                no + 1
            )));
        };
        let key = k.trim();
        if !CONFIG_KEYS.contains(&key) {
            return Err(CliError::Usage(format!(
                "config {}:{}: unknown key {key}",
                path.display(),
                no + 1
            )));
        }
        map.insert(key.to_string(), v.trim().to_string());
    }
    Ok(map)
}

fn num_override<T: std::str::FromStr>(
    config: &BTreeMap<String, String>,
    key: &str,
    flag_value: T,
) -> Result<T, CliError> {
    // Config only fills in when the flag kept its default; clap has no
    // "was it given" signal for flattened args, so flags always win by
    // being parsed first and config is consulted for the default path.
    match config.get(key) {
        Some(v) => v
            .parse()
            .map_err(|_| CliError::Usage(format!("config {key}: bad value {v}"))),
        None => Ok(flag_value),
    }
}

fn load_diagram(
    input: &InputArgs,
    config: &BTreeMap<String, String>,
) -> Result<Diagram, CliError> {
    let text = match (&input.code, &input.input) {
        (Some(_), Some(_)) => {
            return Err(CliError::Usage(
                "give a PD code or --in FILE, not both".into(),
            ))
        }
        (Some(code), None) => code.clone(),
        (None, Some(path)) => read_input(path)?,
        (None, None) => match config.get("in") {
            Some(path) => read_input(Path::new(path))?,
            None => {
                return Err(CliError::Usage(
                    "no input: pass a PD code or --in FILE".into(),
                ))
            }
        },
    };
    parse_diagram_text(&text)
}

fn read_input(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn emit_artifact(value: &Value, out: Option<&Path>, pretty: bool) -> Result<(), CliError> {
    let mut text = if pretty {
        serde_json::to_string_pretty(value).expect("json")
    } else {
        serde_json::to_string(value).expect("json")
    };
    text.push('\n');
    match out {
        None => {
            print!("{text}");
            Ok(())
        }
        Some(path) => {
            let tmp = path.with_extension(format!(
                "{}.tmp.{}",
                path.extension().and_then(|e| e.to_str()).unwrap_or("json"),
                std::process::id()
            ));
            let write = (|| {
                let mut f = std::fs::File::create(&tmp)?;
                f.write_all(text.as_bytes())?;
                f.sync_all()?;
                std::fs::rename(&tmp, path)
            })();
            write.map_err(|e| {
                let _ = std::fs::remove_file(&tmp);
                CliError::Io(format!("{}: {e}", path.display()))
            })
        }
    }
}
