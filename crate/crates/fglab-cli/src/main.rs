//! Command-line front end: builds laws, operations, Chern towers and gamma
//! reports, and emits them as JSON, CSV or text.
//!
//! Exit codes: 0 success, 1 input error, 2 a computed result contradicts an
//! expected statement, 3 a cap or the memory budget was too small.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fglab::addops::{self, Caps, SolverConfig};
use fglab::arith::{format_rational, vp};
use fglab::chern::{self, ChernTower, TowerCaps};
use fglab::fgl::{self, FormalGroupLaw, HeightVerdict, LawKind, LawSpec, MoravaSpec};
use fglab::gamma::{self, CellularModule, GradedReport, OperationConstants};
use fglab::{Error, Prime, QSeries};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "fglab", version, about = "Exact computations with formal group laws and Morava K-theory operations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write the result here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format; each command has its own default.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Formal group laws.
    #[command(subcommand)]
    Fgl(FglCommand),
    /// Additive operations.
    #[command(subcommand)]
    Ops(OpsCommand),
    /// Chern classes and their constants.
    #[command(subcommand)]
    Chern(ChernCommand),
    /// Gamma-filtration bounds.
    #[command(subcommand)]
    Gamma(GammaCommand),
}

#[derive(Args, Clone, Copy)]
struct Theory {
    #[arg(long, default_value_t = 2)]
    p: u64,
    #[arg(long, default_value_t = 1)]
    n: u32,
}

#[derive(Args, Clone, Copy)]
struct CapArgs {
    #[arg(long)]
    cap_arity: Option<u32>,
    #[arg(long)]
    cap_degree: Option<u32>,
}

#[derive(Subcommand)]
enum FglCommand {
    /// Logarithm, axioms, height and typicality of a law.
    Show {
        /// Law description in JSON; defaults to the standard Morava law for --p and --n.
        #[arg(long)]
        spec: Option<PathBuf>,
        #[command(flatten)]
        theory: Theory,
        #[arg(long, default_value_t = 16)]
        cap_degree: u32,
    },
    /// The strict isomorphism exp_1(log_2(x)) and its integrality.
    Iso {
        #[arg(long)]
        first: PathBuf,
        #[arg(long)]
        second: PathBuf,
        /// Prime for specs that name none.
        #[arg(long)]
        p: Option<u64>,
        #[arg(long, default_value_t = 16)]
        cap_degree: u32,
    },
    /// Specializes the universal p-typical logarithm to BP{n}.
    BpnCheck {
        #[command(flatten)]
        theory: Theory,
        /// Number of Araki generators.
        #[arg(long, default_value_t = 4)]
        generators: usize,
        #[arg(long, default_value_t = 17)]
        cap_degree: u32,
    },
}

#[derive(Subcommand)]
enum OpsCommand {
    /// Integral generator with prescribed leading codimension.
    Generator {
        #[command(flatten)]
        theory: Theory,
        /// n of a Morava target; the additive (Chow) target when absent.
        #[arg(long)]
        target_n: Option<u32>,
        #[arg(long, default_value_t = 1)]
        lead: u32,
        #[command(flatten)]
        caps: CapArgs,
    },
    /// d_i from the integrality search beside the closed recursion.
    Dtable {
        #[command(flatten)]
        theory: Theory,
        #[arg(long, default_value_t = 6)]
        max: u32,
    },
    /// Required leading valuation of a generator as the caps grow.
    Nonexistence {
        #[command(flatten)]
        theory: Theory,
        #[arg(long, default_value_t = 1)]
        target_n: u32,
        #[arg(long, default_value_t = 1)]
        lead: u32,
        /// Square caps to try, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "4,8,16")]
        caps: Vec<u32>,
    },
}

#[derive(Subcommand)]
enum ChernCommand {
    /// a_i, e_j, h_j, f_j from the self tower, with their valuation checks.
    Constants {
        #[command(flatten)]
        theory: Theory,
        #[arg(long)]
        max_index: Option<u32>,
        #[command(flatten)]
        caps: CapArgs,
        /// Adams index for the χ constants; defaults to 3 at p = 2 and a primitive root mod p² otherwise.
        #[arg(long)]
        k: Option<i64>,
    },
    /// Symbols and diagonal data of the Chern tower.
    Tower {
        #[command(flatten)]
        theory: Theory,
        /// n of a Morava target; the additive (Chow) target when absent.
        #[arg(long)]
        target_n: Option<u32>,
        #[arg(long)]
        max_index: Option<u32>,
        #[command(flatten)]
        caps: CapArgs,
    },
}

#[derive(Subcommand)]
enum GammaCommand {
    /// Graded bounds for a cellular module given in JSON.
    Compute {
        #[arg(long)]
        variety: PathBuf,
        /// Largest degree to report; defaults to p^n.
        #[arg(long)]
        max_degree: Option<u32>,
        #[arg(long)]
        k: Option<i64>,
    },
    /// Graded bounds for the split Pfister quadric.
    Pfister {
        #[command(flatten)]
        theory: Theory,
        #[arg(long)]
        k: Option<i64>,
        /// Emit the module description instead of the report.
        #[arg(long)]
        dump_variety: bool,
    },
}

/// A rendered result and the expected statements it contradicts.
struct Outcome {
    body: String,
    failures: Vec<String>,
}

impl Outcome {
    fn ok(body: String) -> Self {
        Outcome { body, failures: Vec::new() }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Ok(raw) = std::env::var("FGLAB_MAX_MEMORY_MB") {
        match raw.parse::<u64>() {
            Ok(mb) => fglab::series::set_memory_limit_mb(Some(mb)),
            Err(_) => {
                eprintln!("fglab: FGLAB_MAX_MEMORY_MB must be a whole number of megabytes, got {raw:?}");
                return ExitCode::from(1);
            }
        }
    }
    let (context, result) = run(&cli);
    match result {
        Ok(outcome) => {
            if let Err(e) = emit(cli.out.as_deref(), &outcome.body) {
                eprintln!("fglab {context}: cannot write output: {e}");
                return ExitCode::from(1);
            }
            if outcome.failures.is_empty() {
                ExitCode::SUCCESS
            } else {
                for f in &outcome.failures {
                    eprintln!("fglab {context}: assertion failed: {f}");
                }
                ExitCode::from(2)
            }
        }
        Err(e) => {
            eprintln!("fglab {context}: {e}");
            ExitCode::from(e.kind().exit_code() as u8)
        }
    }
}

fn emit(out: Option<&Path>, body: &str) -> std::io::Result<()> {
    match out {
        Some(path) => fs::write(path, body),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn run(cli: &Cli) -> (&'static str, Result<Outcome, Error>) {
    let f = cli.format;
    match &cli.command {
        Command::Fgl(FglCommand::Show { spec, theory, cap_degree }) => ("fgl show", fgl_show(spec.as_deref(), *theory, *cap_degree, f)),
        Command::Fgl(FglCommand::Iso { first, second, p, cap_degree }) => ("fgl iso", fgl_iso(first, second, *p, *cap_degree, f)),
        Command::Fgl(FglCommand::BpnCheck { theory, generators, cap_degree }) => {
            ("fgl bpn-check", bpn_check(*theory, *generators, *cap_degree, f))
        }
        Command::Ops(OpsCommand::Generator { theory, target_n, lead, caps }) => {
            ("ops generator", ops_generator(*theory, *target_n, *lead, *caps, f))
        }
        Command::Ops(OpsCommand::Dtable { theory, max }) => ("ops dtable", ops_dtable(*theory, *max, f)),
        Command::Ops(OpsCommand::Nonexistence { theory, target_n, lead, caps }) => {
            ("ops nonexistence", ops_nonexistence(*theory, *target_n, *lead, caps, f))
        }
        Command::Chern(ChernCommand::Constants { theory, max_index, caps, k }) => {
            ("chern constants", chern_constants(*theory, *max_index, *caps, *k, f))
        }
        Command::Chern(ChernCommand::Tower { theory, target_n, max_index, caps }) => {
            ("chern tower", chern_tower(*theory, *target_n, *max_index, *caps, f))
        }
        Command::Gamma(GammaCommand::Compute { variety, max_degree, k }) => ("gamma compute", gamma_compute(variety, *max_degree, *k, f)),
        Command::Gamma(GammaCommand::Pfister { theory, k, dump_variety }) => {
            ("gamma pfister", gamma_pfister(*theory, *k, *dump_variety, f))
        }
    }
}

fn prime(p: u64) -> Result<Prime, Error> {
    Ok(Prime::new(p)?)
}

fn q_of(theory: Theory) -> Result<u32, Error> {
    if theory.n == 0 {
        return Err(Error::Input("--n must be positive".into()));
    }
    theory
        .p
        .checked_pow(theory.n)
        .and_then(|q| u32::try_from(q).ok())
        .ok_or_else(|| Error::Input(format!("p^n = {}^{} is too large", theory.p, theory.n)))
}

fn morava(theory: Theory, cap: u32) -> Result<FormalGroupLaw, Error> {
    Ok(FormalGroupLaw::morava(&MoravaSpec::standard(prime(theory.p)?, theory.n), cap)?)
}

fn target_law(p: Prime, target_n: Option<u32>, cap: u32) -> Result<FormalGroupLaw, Error> {
    Ok(match target_n {
        Some(m) => FormalGroupLaw::morava(&MoravaSpec::standard(p, m), cap)?,
        None => FormalGroupLaw::additive(p, cap),
    })
}

fn read_spec(path: &Path) -> Result<LawSpec, Error> {
    let text = fs::read_to_string(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Input(format!("{}: {e}", path.display())))
}

fn unsupported(format: Format) -> Error {
    let name = match format {
        Format::Json => "json",
        Format::Csv => "csv",
        Format::Text => "text",
    };
    Error::Input(format!("this command does not support --format {name}"))
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

fn csv_string(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("CSV of UTF-8 fields")
}

fn text_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for r in rows {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(c.chars().count());
        }
    }
    let line = |cells: Vec<&str>| {
        let parts: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        format!("{}\n", parts.join("  ").trim_end())
    };
    let mut out = line(header.to_vec());
    for r in rows {
        out.push_str(&line(r.iter().map(String::as_str).collect()));
    }
    out
}

fn table(format: Format, header: &[&str], rows: &[Vec<String>]) -> String {
    match format {
        Format::Csv => csv_string(header, rows),
        Format::Text => text_table(header, rows),
        Format::Json => {
            let objects: Vec<Value> = rows
                .iter()
                .map(|r| Value::Object(header.iter().zip(r).map(|(h, c)| (h.to_string(), Value::String(c.clone()))).collect()))
                .collect();
            pretty(&Value::Array(objects))
        }
    }
}

/// A univariate series as "x + 1/2*x^2 + ...".
fn format_univariate(s: &QSeries) -> String {
    let var = s.vars().first().cloned().unwrap_or_else(|| "x".into());
    let mut out = String::new();
    for (e, c) in s.terms() {
        let power = match e[0] {
            0 => String::new(),
            1 => var.clone(),
            k => format!("{var}^{k}"),
        };
        let coef = format_rational(c);
        let term = match (coef.as_str(), power.is_empty()) {
            (_, true) => coef.clone(),
            ("1", false) => power,
            ("-1", false) => format!("-{power}"),
            (_, false) => format!("{coef}*{power}"),
        };
        if out.is_empty() {
            out = term;
        } else if let Some(rest) = term.strip_prefix('-') {
            out.push_str(&format!(" - {rest}"));
        } else {
            out.push_str(&format!(" + {term}"));
        }
    }
    if out.is_empty() {
        "0".into()
    } else {
        out
    }
}

fn valuation_string(x: &fglab::Rational, p: Prime) -> String {
    match vp(x, p).finite() {
        Some(v) => v.to_string(),
        None => "inf".into(),
    }
}

fn fgl_show(spec: Option<&Path>, theory: Theory, cap: u32, format: Option<Format>) -> Result<Outcome, Error> {
    let law = match spec {
        Some(path) => read_spec(path)?.build(Some(theory.p), cap)?,
        None => morava(theory, cap)?,
    };
    let p = law.prime();
    let axioms = law.check_axioms()?;
    let height = match law.height_mod_p()? {
        HeightVerdict::Finite(h) => json!(h),
        HeightVerdict::Infinite => json!("infinite"),
        HeightVerdict::CapLimited => json!("beyond cap"),
    };
    let kind = match law.kind() {
        LawKind::Morava(m) => json!({"morava": {"n": m.n}}),
        LawKind::Additive => json!("additive"),
        LawKind::Log => json!("log"),
        LawKind::Multiplicative { beta } => json!({"multiplicative": {"beta": format_rational(beta)}}),
    };
    let pn_typical = match law.morava_spec() {
        Some(m) => json!(law.is_pn_typical(m.n)?),
        None => Value::Null,
    };
    let p_series = law.m_series(p.get() as i64)?;
    let gradable = law.morava_spec().map(|m| p_series.is_pn_gradable(p, m.n));
    let mut failures = Vec::new();
    if !axioms.all() {
        failures.push(format!("axiom check failed: {axioms:?}"));
    }
    let report = json!({
        "p": p.get(),
        "cap": law.cap(),
        "kind": kind,
        "log": format_univariate(law.log()),
        "p_series": format_univariate(&p_series),
        "axioms": {
            "commutative": axioms.commutative,
            "unital": axioms.unital,
            "associative": axioms.associative,
            "log_exp_inverse": axioms.log_exp_inverse,
            "log_additive": axioms.log_additive,
        },
        "height_mod_p": height,
        "p_typical": law.is_p_typical(),
        "pn_typical": pn_typical,
        "p_series_pn_gradable": gradable,
    });
    let body = match format.unwrap_or(Format::Json) {
        Format::Json => pretty(&report),
        Format::Text => {
            let obj = report.as_object().expect("report is an object");
            obj.iter().map(|(k, v)| format!("{k}: {v}\n")).collect()
        }
        Format::Csv => return Err(unsupported(Format::Csv)),
    };
    Ok(Outcome { body, failures })
}

fn fgl_iso(first: &Path, second: &Path, p: Option<u64>, cap: u32, format: Option<Format>) -> Result<Outcome, Error> {
    let f1 = read_spec(first)?.build(p, cap)?;
    let f2 = read_spec(second)?.build(p, cap)?;
    let iso = fgl::strict_iso(&f1, &f2)?;
    let witness = fgl::iso_is_integral(&iso.gamma, f1.prime());
    let report = json!({
        "gamma": format_univariate(&iso.gamma),
        "verified": iso.verified,
        "integral": witness.is_none(),
        "witness": witness.map(|(e, c)| json!({"exponent": e, "coefficient": format_rational(&c)})),
    });
    let failures = if iso.verified { vec![] } else { vec!["γ does not intertwine the two laws".into()] };
    let body = match format.unwrap_or(Format::Json) {
        Format::Json => pretty(&report),
        Format::Text => format!("gamma = {}\nintegral: {}\n", report["gamma"].as_str().unwrap_or_default(), report["integral"]),
        Format::Csv => return Err(unsupported(Format::Csv)),
    };
    Ok(Outcome { body, failures })
}

fn bpn_check(theory: Theory, generators: usize, cap: u32, format: Option<Format>) -> Result<Outcome, Error> {
    q_of(theory)?;
    let r = fgl::bpn_check(theory.n, generators, prime(theory.p)?, cap);
    let report = json!({
        "p": theory.p,
        "n": theory.n,
        "generators": generators,
        "cap": cap,
        "exponents": r.exponents,
        "violations": r.violations,
        "pass": r.pass,
    });
    let failures = if r.pass { vec![] } else { vec![format!("surviving exponents outside p^(nk): {:?}", r.violations)] };
    let body = match format.unwrap_or(Format::Json) {
        Format::Json => pretty(&report),
        Format::Text => format!("exponents: {:?}\npass: {}\n", r.exponents, r.pass),
        Format::Csv => return Err(unsupported(Format::Csv)),
    };
    Ok(Outcome { body, failures })
}

fn ops_generator(theory: Theory, target_n: Option<u32>, lead: u32, caps: CapArgs, format: Option<Format>) -> Result<Outcome, Error> {
    let q = q_of(theory)?;
    let arity = caps.cap_arity.unwrap_or(lead.max(q + 2));
    let degree = caps.cap_degree.unwrap_or(arity.max(lead + 2 * (q - 1)));
    let source = morava(theory, degree)?;
    let target = target_law(source.prime(), target_n, degree)?;
    let op = addops::solve_generator(&source, &target, lead, Caps { arity, degree }, SolverConfig::default())?;
    if let Err(w) = op.is_integral() {
        return Err(Error::Assertion(format!(
            "solved operation is not integral at arity {}, monomial {:?}: {}",
            w.arity,
            w.monomial,
            format_rational(&w.coefficient)
        )));
    }
    let t = op.to_table()?;
    match format.unwrap_or(Format::Json) {
        Format::Json => Ok(Outcome::ok(pretty(&serde_json::to_value(&t).expect("table serializes")))),
        f => {
            let p = op.prime();
            let rows: Vec<Vec<String>> =
                op.lambda.iter().map(|(d, l)| vec![d.to_string(), format_rational(l), valuation_string(l, p)]).collect();
            Ok(Outcome::ok(table(f, &["codim", "lambda", "vp"], &rows)))
        }
    }
}

fn ops_dtable(theory: Theory, max: u32, format: Option<Format>) -> Result<Outcome, Error> {
    let q = q_of(theory)?;
    let p = prime(theory.p)?;
    let recursion = addops::d_recursion(p, theory.n, max);
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for i in 1..=max {
        let cap = i + 2 * (q - 1);
        let searched = addops::d_constant(p, theory.n, i, Caps::square(cap))?;
        let closed = &recursion[i as usize - 1];
        let agree = searched == *closed;
        if !agree {
            failures.push(format!("d_{i}: search gives {}, recursion gives {}", format_rational(&searched), format_rational(closed)));
        }
        rows.push(vec![i.to_string(), format_rational(&searched), format_rational(closed), agree.to_string()]);
    }
    let body = table(format.unwrap_or(Format::Csv), &["index", "d_search", "d_recursion", "agree"], &rows);
    Ok(Outcome { body, failures })
}

fn ops_nonexistence(theory: Theory, target_n: u32, lead: u32, caps: &[u32], format: Option<Format>) -> Result<Outcome, Error> {
    q_of(theory)?;
    let top = caps.iter().copied().max().ok_or_else(|| Error::Input("--caps is empty".into()))?;
    let source = morava(theory, top)?;
    let target = morava(Theory { p: theory.p, n: target_n }, top)?;
    let seq = addops::required_leading_valuation(&source, &target, lead, caps, SolverConfig::default())?;
    let shown = |v: &Option<u32>| v.map_or("none".to_string(), |e| e.to_string());
    let strictly_increasing = seq.windows(2).all(|w| matches!((w[0], w[1]), (Some(a), Some(b)) if a < b));
    let constant = seq.windows(2).all(|w| w[0] == w[1]);
    match format.unwrap_or(Format::Json) {
        Format::Json => Ok(Outcome::ok(pretty(&json!({
            "p": theory.p,
            "source_n": theory.n,
            "target_n": target_n,
            "lead": lead,
            "caps": caps,
            "leading_valuation": seq,
            "strictly_increasing": strictly_increasing,
            "constant": constant,
        })))),
        f => {
            let rows: Vec<Vec<String>> = caps.iter().zip(&seq).map(|(c, v)| vec![c.to_string(), shown(v)]).collect();
            Ok(Outcome::ok(table(f, &["cap", "leading_valuation"], &rows)))
        }
    }
}

fn tower_caps(theory: Theory, max_index: Option<u32>, caps: CapArgs, default_arity: u32) -> Result<TowerCaps, Error> {
    let q = q_of(theory)?;
    let max_index = max_index.unwrap_or(2 * q);
    let arity = caps.cap_arity.unwrap_or(default_arity);
    let degree = caps.cap_degree.unwrap_or(arity);
    if max_index == 0 || arity == 0 || degree == 0 {
        return Err(Error::Input("caps must be positive".into()));
    }
    Ok(TowerCaps { max_index, arity, degree })
}

fn chern_constants(
    theory: Theory,
    max_index: Option<u32>,
    caps: CapArgs,
    k: Option<i64>,
    format: Option<Format>,
) -> Result<Outcome, Error> {
    let q = q_of(theory)?;
    let caps = tower_caps(theory, max_index, caps, 2 * q + 3)?;
    let law = morava(theory, caps.degree)?;
    let tower = ChernTower::build(&law, &law, caps, SolverConfig::default())?;
    let k = k.unwrap_or_else(|| chern::default_chi_k(law.prime()));
    let p = law.prime();
    let rows: Vec<Vec<String>> = chern::constants_table(&tower, k)?
        .into_iter()
        .map(|r| vec![r.index.to_string(), r.name, format_rational(&r.value), valuation_string(&r.value, p), r.caps])
        .collect();
    let failures =
        chern::constant_claims(&tower, k)?.into_iter().filter(|c| !c.holds).map(|c| format!("{}: {}", c.name, c.detail)).collect();
    let body = table(format.unwrap_or(Format::Csv), &["index", "constant-name", "value", "vp", "caps"], &rows);
    Ok(Outcome { body, failures })
}

fn chern_tower(
    theory: Theory,
    target_n: Option<u32>,
    max_index: Option<u32>,
    caps: CapArgs,
    format: Option<Format>,
) -> Result<Outcome, Error> {
    let q = q_of(theory)?;
    let caps = tower_caps(theory, max_index, caps, 6.max(2 * q))?;
    let source = morava(theory, caps.degree)?;
    let target = target_law(source.prime(), target_n, caps.degree)?;
    let tower = ChernTower::build(&source, &target, caps, SolverConfig::default())?;
    let mut failures = Vec::new();
    if !tower.degree_support_holds() {
        failures.push("a symbol has a monomial below its index".into());
    }
    if !tower.grading_support_holds() {
        failures.push("a symbol has a monomial outside its grading class".into());
    }
    if target_n.is_none() {
        if let Err(e) = tower.cross_check_mu_b(&chern::mu_and_b(source.prime(), theory.n, caps.max_index)) {
            failures.push(e.to_string());
        }
    }
    let tables = tower.to_tables()?;
    match format.unwrap_or(Format::Json) {
        Format::Json => {
            let classes: Vec<Value> = tables
                .iter()
                .enumerate()
                .map(|(i, t)| {
                    json!({
                        "index": i + 1,
                        "polynomial": tower.polynomials[i].to_string(),
                        "theta": t,
                        "path": format!("{:?}", tower.paths[i]).to_lowercase(),
                    })
                })
                .collect();
            let report = json!({
                "p": theory.p,
                "n": theory.n,
                "target": target_n.map_or(json!("additive"), |m| json!({"morava": {"n": m}})),
                "caps": caps.describe(),
                "classes": classes,
            });
            Ok(Outcome { body: pretty(&report), failures })
        }
        f => {
            let p = source.prime();
            let mut rows = Vec::new();
            for (i, th) in tower.thetas.iter().enumerate() {
                for (d, l) in &th.lambda {
                    rows.push(vec![(i + 1).to_string(), d.to_string(), format_rational(l), valuation_string(l, p)]);
                }
            }
            Ok(Outcome { body: table(f, &["index", "codim", "lambda", "vp"], &rows), failures })
        }
    }
}

fn render_report(report: &GradedReport, format: Option<Format>) -> Result<String, Error> {
    match format.unwrap_or(Format::Json) {
        Format::Json => Ok(pretty(&serde_json::to_value(report).expect("report serializes"))),
        f => {
            let rows: Vec<Vec<String>> =
                report.degrees.iter().map(|d| vec![d.degree.to_string(), d.free_rank.to_string(), d.torsion.join(" ")]).collect();
            Ok(table(f, &["degree", "free_rank", "torsion"], &rows))
        }
    }
}

fn gamma_compute(variety: &Path, max_degree: Option<u32>, k: Option<i64>, format: Option<Format>) -> Result<Outcome, Error> {
    let text = fs::read_to_string(variety).map_err(|e| Error::Input(format!("{}: {e}", variety.display())))?;
    let module = CellularModule::from_json(&text)?;
    let q = q_of(Theory { p: module.p, n: module.n })?;
    let constants = OperationConstants::for_module(&module, k, SolverConfig::default())?;
    let report = gamma::graded_report(&module, &constants, max_degree.unwrap_or(q))?;
    Ok(Outcome::ok(render_report(&report, format)?))
}

fn gamma_pfister(theory: Theory, k: Option<i64>, dump_variety: bool, format: Option<Format>) -> Result<Outcome, Error> {
    if theory.p != 2 {
        return Err(Error::Input("Pfister quadrics are defined at p = 2".into()));
    }
    let q = q_of(theory)?;
    let module = gamma::pfister(theory.n);
    if dump_variety {
        return Ok(Outcome::ok(format!("{}\n", module.to_json())));
    }
    let constants = OperationConstants::for_module(&module, k, SolverConfig::default())?;
    let report = gamma::graded_report(&module, &constants, q)?;
    let mut failures = Vec::new();
    for d in &report.degrees {
        let expected_torsion: Vec<String> = if d.degree == q { vec!["2".into()] } else { vec![] };
        if d.free_rank != 1 || d.torsion != expected_torsion {
            failures.push(format!(
                "gr^{}: free rank {} with torsion {:?}, expected rank 1 with torsion {:?}",
                d.degree, d.free_rank, d.torsion, expected_torsion
            ));
        }
    }
    Ok(Outcome { body: render_report(&report, format)?, failures })
}
