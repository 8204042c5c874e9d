//! Command-line front end. Every command prints (or writes to `--out`) a document that embeds
//! the resolved configuration, and returns 0 on success, 1 when a verification fails and 2 on
//! usage or input errors.

use std::fs;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::analytic::{arch_factor_limit, assemble_rhs, GAMMA_C_RESIDUE};
use crate::boundary::{coordinate_change, ledger_check, torsion_order, CoordChange, DivisorLedger, LatticeE};
use crate::hecke::{double_coset_consistent, mab_representatives, pairwise_distinct, ramified_place};
use crate::localzeta::{
    compare_series, ieta_series, lfactor_inert, lfactor_ramified, lfactor_split, zeta_series_inert, zeta_series_split,
    SatakeData,
};
use crate::quadfield::{parse_rational, Discriminant, FieldElem};
use crate::suites::{run_all, run_suite, suite_by_key, CriterionReport, Role, SuiteConfig, SUITES};
use crate::symlaurent::{LaurentPoly, RatFunc};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Smallest series orders that leave five surplus equations for reconstruction.
pub const MIN_INERT_ORDER: usize = 11;
pub const MIN_SPLIT_ORDER: usize = 11;
pub const MIN_RAMIFIED_ORDER: usize = 10;

#[derive(Parser, Debug)]
#[command(name = "picard", version, about = "Verification suites for local zeta integrals, Hecke cosets, boundary geometry and limit formulae")]
pub struct Cli {
    /// TOML file with configuration keys; flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Working precision in decimal digits (values above 15 are clamped).
    #[arg(long, global = true)]
    pub precision: Option<u32>,
    /// Series truncation order for the symbolic suites.
    #[arg(long, global = true)]
    pub order: Option<usize>,
    /// Seed for the sampled suites
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Write output here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Worker threads for `verify all`.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run one verification suite, or all of them.
    Verify {
        /// inert, split, ramified, reconstruct, unipotent, hecke, klf, fe, gamma0, arch, boundary, norms or all
        suite: String,
    },
    /// Hecke operators at a ramified place
    #[command(subcommand)]
    Hecke(HeckeCommand),
    /// Divisor ledgers and torsion orders on the boundary
    #[command(subcommand)]
    Boundary(BoundaryCommand),
    /// Closed-form local factor at one place, with its series check.
    Lfactor {
        #[arg(long, value_enum)]
        place: PlaceKind,
        /// "symbolic", or assignments such as "a=2,n1=1/3".
        #[arg(long, default_value = "symbolic")]
        satake: String,
    },
    /// Right-hand side of the fine regulator formula.
    Assemble(AssembleArgs),
}

#[derive(Subcommand, Debug)]
pub enum HeckeCommand {
    /// The p^2+1 left-coset representatives of K t K at a ramified place.
    Cosets {
        #[arg(long)]
        p: u64,
        #[arg(long = "D")]
        disc: u64,
    },
}

#[derive(Subcommand, Debug)]
pub enum BoundaryCommand {
    /// Check a divisor ledger given as JSON lines.
    Ledger {
        #[arg(long = "in")]
        input: PathBuf,
        /// JSON lines of {"curve", "cusp", "global"}; entries may also sit in the main file.
        #[arg(long)]
        pushforward: Option<PathBuf>,
    },
    /// Order of u modulo a lattice in E.
    Torsion {
        /// u as "a,b" meaning a + b delta.
        #[arg(long)]
        u: String,
        /// Generators separated by ';', each "a,b".
        #[arg(long)]
        lattice: String,
        #[arg(long = "D")]
        disc: u64,
        /// Also report the order after rescaling by this element.
        #[arg(long)]
        rescale: Option<String>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PlaceKind {
    Inert,
    Split,
    Ramified,
}

#[derive(Args, Debug)]
pub struct AssembleArgs {
    #[arg(long = "D")]
    pub disc: u64,
    /// Fine-split Satake parameters alpha_p, each "re" or "re,im"; repeatable.
    #[arg(long)]
    pub alpha: Vec<String>,
    /// L'(0).
    #[arg(long)]
    pub lprime: f64,
    /// Period W multiplying the right-hand side, "re" or "re,im".
    #[arg(long, default_value = "1")]
    pub whittaker: String,
}

/// Everything that determines an output, recorded verbatim in it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    #[serde(flatten)]
    pub suite: SuiteConfig,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub jobs: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig { suite: SuiteConfig::default(), format: Format::Text, out: None, jobs: 1 }
    }
}

#[derive(Debug)]
struct UsageError(String);

impl<E: std::fmt::Display> From<E> for UsageError {
    fn from(e: E) -> Self {
        UsageError(e.to_string())
    }
}

pub fn resolve_config(cli: &Cli) -> Result<RunConfig, String> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            toml::from_str::<RunConfig>(&text).map_err(|e| format!("{}: {e}", path.display()))?
        }
        None => RunConfig::default(),
    };
    if let Some(p) = cli.precision {
        cfg.suite.digits = p;
    }
    if let Some(s) = cli.seed {
        cfg.suite.seed = s;
    }
    if let Some(f) = cli.format {
        cfg.format = f;
    }
    if let Some(o) = &cli.out {
        cfg.out = Some(o.clone());
    }
    if let Some(j) = cli.jobs {
        cfg.jobs = j;
    }
    if let Some(order) = cli.order {
        match &cli.command {
            Command::Verify { suite } if suite == "inert" => cfg.suite.inert_order = order,
            Command::Verify { suite } if suite == "split" => cfg.suite.split_order = order,
            Command::Verify { suite } if suite == "ramified" => cfg.suite.ramified_order = order,
            Command::Lfactor { place, .. } => match place {
                PlaceKind::Inert => cfg.suite.inert_order = order,
                PlaceKind::Split => cfg.suite.split_order = order,
                PlaceKind::Ramified => cfg.suite.ramified_order = order,
            },
            _ => {
                cfg.suite.inert_order = order;
                cfg.suite.split_order = order;
                cfg.suite.ramified_order = order;
            }
        }
    }
    let s = &cfg.suite;
    if s.inert_order < MIN_INERT_ORDER || s.split_order < MIN_SPLIT_ORDER || s.ramified_order < MIN_RAMIFIED_ORDER {
        return Err(format!(
            "series orders must be at least {MIN_INERT_ORDER} (inert), {MIN_SPLIT_ORDER} (split), {MIN_RAMIFIED_ORDER} (ramified)"
        ));
    }
    if s.digits == 0 {
        return Err("precision must be positive".into());
    }
    Ok(cfg)
}

/// Parse arguments and run; returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let cfg = match resolve_config(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    match dispatch(&cli.command, &cfg) {
        Ok((doc, pass)) => match emit(&doc, &cfg) {
            Ok(()) => {
                if pass {
                    EXIT_OK
                } else {
                    EXIT_FAILED
                }
            }
            Err(e) => {
                eprintln!("error: {e}");
                EXIT_USAGE
            }
        },
        Err(UsageError(e)) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

/// A rendered result: JSON body, CSV rows and a text rendering.
struct Document {
    json: Value,
    csv: Vec<Vec<String>>,
    csv_header: Vec<&'static str>,
    text: String,
}

fn dispatch(cmd: &Command, cfg: &RunConfig) -> Result<(Document, bool), UsageError> {
    match cmd {
        Command::Verify { suite } => verify(suite, cfg),
        Command::Hecke(HeckeCommand::Cosets { p, disc }) => hecke_cosets(*p, *disc, cfg),
        Command::Boundary(BoundaryCommand::Ledger { input, pushforward }) => ledger(input, pushforward.as_deref(), cfg),
        Command::Boundary(BoundaryCommand::Torsion { u, lattice, disc, rescale }) => torsion(u, lattice, *disc, rescale.as_deref(), cfg),
        Command::Lfactor { place, satake } => lfactor(*place, satake, cfg),
        Command::Assemble(args) => assemble(args, cfg),
    }
}

fn emit(doc: &Document, cfg: &RunConfig) -> std::io::Result<()> {
    let mut body = Vec::new();
    match cfg.format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut body, &doc.json)?;
            body.push(b'\n');
        }
        Format::Csv => {
            writeln!(body, "# config = {}", serde_json::to_string(cfg)?)?;
            let mut w = csv::Writer::from_writer(&mut body);
            w.write_record(&doc.csv_header)?;
            for r in &doc.csv {
                w.write_record(r)?;
            }
            w.flush()?;
        }
        Format::Text => {
            body.extend_from_slice(doc.text.as_bytes());
            writeln!(body, "config: {}", serde_json::to_string(cfg)?)?;
        }
    }
    match &cfg.out {
        Some(path) => fs::write(path, body),
        None => std::io::stdout().write_all(&body),
    }
}

fn with_config(cfg: &RunConfig, command: &str, mut result: Value) -> Value {
    if let Value::Object(map) = &mut result {
        map.insert("command".into(), json!(command));
        map.insert("config".into(), serde_json::to_value(cfg).expect("config serializes"));
    }
    result
}

pub const RESIDUAL_HEADER: [&str; 8] = ["test", "z", "s", "N", "w", "residual", "tolerance", "pass"];

fn report_line(r: &CriterionReport) -> String {
    let mut line = format!("{} criterion {:>2} {:<12} {:>9.1} ms", if r.pass { "PASS" } else { "FAIL" }, r.id, r.key, r.elapsed_ms);
    for c in r.checks.iter().filter(|c| c.role == Role::Criterion && !c.pass) {
        match c.value {
            Some(v) => line.push_str(&format!("\n    failed: {} ({v:.3e} > {:.0e})", c.name, c.tolerance.unwrap_or(0.0))),
            None => line.push_str(&format!("\n    failed: {} [{}]", c.name, c.detail)),
        }
    }
    line
}

fn verify(key: &str, cfg: &RunConfig) -> Result<(Document, bool), UsageError> {
    let reports = if key == "all" {
        run_all(&cfg.suite, cfg.jobs)
    } else {
        let suite = suite_by_key(key).ok_or_else(|| {
            let keys: Vec<&str> = SUITES.iter().map(|s| s.key).collect();
            UsageError(format!("unknown suite '{key}'; expected one of {} or all", keys.join(", ")))
        })?;
        vec![run_suite(suite, &cfg.suite)]
    };
    let pass = reports.iter().all(|r| r.pass);
    let failures: Vec<Value> = reports
        .iter()
        .flat_map(|r| {
            r.checks.iter().filter(|c| !c.pass).map(move |c| {
                json!({ "criterion": r.id, "check": c.name, "role": c.role, "value": c.value, "tolerance": c.tolerance, "detail": c.detail })
            })
        })
        .collect();
    let summary: Vec<Value> = reports
        .iter()
        .map(|r| json!({ "id": r.id, "key": r.key, "title": r.title, "pass": r.pass, "elapsed_ms": r.elapsed_ms }))
        .collect();
    let mut csv = Vec::new();
    for r in &reports {
        for row in &r.rows {
            csv.push(vec![
                row.test.clone(),
                row.z.clone(),
                row.s.clone(),
                row.level.to_string(),
                row.w.clone(),
                format!("{:e}", row.residual),
                format!("{:e}", row.tolerance),
                row.pass.to_string(),
            ]);
        }
        for c in &r.checks {
            csv.push(vec![
                format!("{}:{}", r.key, c.name),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                c.value.map(|v| format!("{v:e}")).unwrap_or_default(),
                c.tolerance.map(|v| format!("{v:e}")).unwrap_or_default(),
                c.pass.to_string(),
            ]);
        }
    }
    let mut text: String = reports.iter().map(|r| report_line(r) + "\n").collect();
    text.push_str(&format!("{} of {} criteria pass\n", reports.iter().filter(|r| r.pass).count(), reports.len()));
    let body = json!({ "pass": pass, "summary": summary, "failures": failures, "reports": reports });
    Ok((Document { json: with_config(cfg, &format!("verify {key}"), body), csv, csv_header: RESIDUAL_HEADER.to_vec(), text }, pass))
}

fn hecke_cosets(p: u64, d: u64, cfg: &RunConfig) -> Result<(Document, bool), UsageError> {
    let disc = Discriminant::new(d)?;
    let reps = mab_representatives(p, disc)?;
    let place = ramified_place(p, disc)?;
    let distinct = pairwise_distinct(&reps, &place)?;
    let consistent = double_coset_consistent(&reps, &place)?;
    let count_ok = reps.len() as u64 == p * p + 1;
    let pass = distinct && consistent && count_ok;
    let csv = reps
        .iter()
        .enumerate()
        .map(|(i, r)| vec![i.to_string(), format!("{:?}", r.label), r.g.to_string().replace('\n', " ")])
        .collect();
    let text = format!(
        "{} representatives (expected {}), distinct = {distinct}, double coset consistent = {consistent}\n",
        reps.len(),
        p * p + 1
    );
    let body = json!({ "p": p, "D": d, "count": reps.len(), "distinct": distinct, "consistent": consistent, "pass": pass, "representatives": reps });
    Ok((Document { json: with_config(cfg, "hecke cosets", body), csv, csv_header: vec!["index", "label", "matrix"], text }, pass))
}

fn ledger(input: &Path, pushforward: Option<&Path>, cfg: &RunConfig) -> Result<(Document, bool), UsageError> {
    let mut ledger = DivisorLedger::new();
    // a single file may mix entry lines and pushforward lines
    let text = fs::read_to_string(input).map_err(|e| format!("{}: {e}", input.display()))?;
    let (entries, maps): (Vec<&str>, Vec<&str>) = text.lines().filter(|l| !l.trim().is_empty()).partition(|l| !l.contains("\"global\""));
    ledger.read_entries(entries.join("\n").as_bytes())?;
    ledger.read_pushforward(maps.join("\n").as_bytes())?;
    if let Some(path) = pushforward {
        let f = fs::File::open(path).map_err(|e| format!("{}: {e}", path.display()))?;
        ledger.read_pushforward(BufReader::new(f))?;
    }
    let report = ledger_check(&ledger);
    let pass = report.ok_2a && report.ok_2b;
    let mut csv: Vec<Vec<String>> = report.deg_per_curve.iter().map(|(c, d)| vec!["degree".into(), c.clone(), d.to_string()]).collect();
    csv.extend(report.pushforward.iter().map(|(g, d)| vec!["pushforward".into(), g.clone(), d.to_string()]));
    csv.extend(report.unmapped.iter().map(|(c, p)| vec!["unmapped".into(), format!("{c}/{p}"), String::new()]));
    let text = format!(
        "degree zero on every curve: {}\npushforward zero: {}\nunmapped cusps: {}\n",
        report.ok_2a,
        report.ok_2b,
        report.unmapped.len()
    );
    let body = json!({ "pass": pass, "report": report });
    Ok((Document { json: with_config(cfg, "boundary ledger", body), csv, csv_header: vec!["kind", "key", "value"], text }, pass))
}

fn parse_elem(s: &str, disc: Discriminant) -> Result<FieldElem, UsageError> {
    let (a, b) = s.split_once(',').unwrap_or((s, "0"));
    Ok(FieldElem::new(parse_rational(a)?, parse_rational(b)?, disc))
}

fn torsion(u: &str, lattice: &str, d: u64, rescale: Option<&str>, cfg: &RunConfig) -> Result<(Document, bool), UsageError> {
    let disc = Discriminant::new(d)?;
    let u = parse_elem(u, disc)?;
    let gens = lattice.split(';').map(|g| parse_elem(g, disc)).collect::<Result<Vec<_>, _>>()?;
    let l = LatticeE::from_generators(&gens, disc);
    let order = torsion_order(&u, &l)?;
    let mut body = json!({ "u": u, "lattice": l.to_json(), "order": order.to_string() });
    let mut text = format!("order {order}\n");
    let mut csv = vec![vec!["original".to_string(), order.to_string()]];
    let mut pass = true;
    if let Some(a) = rescale {
        let a = parse_elem(a, disc)?;
        let (u2, l2) = coordinate_change(&u, &l, &CoordChange::Rescale(a))?;
        let order2 = torsion_order(&u2, &l2)?;
        pass = order2 == order;
        body["rescaled_order"] = json!(order2.to_string());
        body["invariant"] = json!(pass);
        text.push_str(&format!("order after rescaling {order2}\n"));
        csv.push(vec!["rescaled".into(), order2.to_string()]);
    }
    body["pass"] = json!(pass);
    Ok((Document { json: with_config(cfg, "boundary torsion", body), csv, csv_header: vec!["lattice", "order"], text }, pass))
}

fn parse_assignments(spec: &str) -> Result<Vec<(String, LaurentPoly)>, UsageError> {
    if spec.trim() == "symbolic" {
        return Ok(Vec::new());
    }
    spec.split(',')
        .map(|kv| {
            let (k, v) = kv.split_once('=').ok_or_else(|| UsageError(format!("expected name=value, got '{kv}'")))?;
            Ok((k.trim().to_string(), LaurentPoly::parse(v.trim())?))
        })
        .collect()
}

fn lfactor(place: PlaceKind, satake: &str, cfg: &RunConfig) -> Result<(Document, bool), UsageError> {
    let s = &cfg.suite;
    let (factor, series): (RatFunc, _) = match place {
        PlaceKind::Inert => {
            let d = SatakeData::symbolic_inert().strict()?;
            (lfactor_inert(&d)?, zeta_series_inert(&d, s.inert_order)?)
        }
        PlaceKind::Split => {
            let d = SatakeData::symbolic_split().strict()?;
            (lfactor_split(&d)?, zeta_series_split(&d, s.split_order)?)
        }
        PlaceKind::Ramified => (lfactor_ramified(), ieta_series(s.ramified_order)),
    };
    let check = compare_series(&series, &factor)?;
    let assignments = parse_assignments(satake)?;
    let named: Vec<(&str, LaurentPoly)> = assignments.iter().map(|(k, v)| (k.as_str(), v.clone())).collect();
    let shown = if named.is_empty() { factor } else { factor.substitute_named(&named)? };
    let pass = check.equal;
    let text = format!("{shown}\nseries check to order {}: {}\n", check.order, check.equal);
    let body = json!({
        "place": { "kind": place, "satake": satake },
        "factor": { "num": shown.num().to_string(), "den": shown.den().to_string() },
        "series_check": check,
        "pass": pass,
    });
    let csv = vec![vec![shown.num().to_string(), shown.den().to_string(), check.order.to_string(), check.equal.to_string()]];
    Ok((Document { json: with_config(cfg, "lfactor", body), csv, csv_header: vec!["num", "den", "order", "equal"], text }, pass))
}

fn parse_complex(s: &str) -> Result<Complex64, UsageError> {
    let (re, im) = s.split_once(',').unwrap_or((s, "0"));
    Ok(Complex64::new(re.trim().parse()?, im.trim().parse()?))
}

fn assemble(args: &AssembleArgs, cfg: &RunConfig) -> Result<(Document, bool), UsageError> {
    Discriminant::new(args.disc)?;
    let alphas = args.alpha.iter().map(|a| parse_complex(a)).collect::<Result<Vec<_>, _>>()?;
    let period = parse_complex(&args.whittaker)?;
    let rhs = assemble_rhs(args.disc, &alphas, args.lprime, period)?;
    // the s -> 0 limit of the archimedean factor times L(s) carries Res Gamma_C = 2 and Gamma_C(1)^2
    let product: Complex64 = alphas.iter().map(|a| 1.0 - a).product();
    let limit = period * arch_factor_limit(args.disc)? * product * args.lprime;
    let text = format!("displayed form: {rhs}\nfrom the archimedean limit: {limit}\n");
    let body = json!({
        "D": args.disc,
        "rhs": [rhs.re, rhs.im],
        "rhs_from_limit": [limit.re, limit.im],
        "gamma_c_residue": GAMMA_C_RESIDUE,
        "pass": true,
    });
    let csv = vec![vec![rhs.re.to_string(), rhs.im.to_string(), limit.re.to_string(), limit.im.to_string()]];
    Ok((Document { json: with_config(cfg, "assemble", body), csv, csv_header: vec!["re", "im", "limit_re", "limit_im"], text }, true))
}
