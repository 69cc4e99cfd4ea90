//! Command-line front end.
//!
//! [`run`] parses arguments, executes one subcommand and returns the exit
//! code together with everything that would be printed, so the binary is a
//! thin wrapper and tests can drive commands in-process.
//!
//! Exit codes: 0 success, 1 a recomputed checklist failed, 2 bad input or a
//! violated hypothesis, 3 a negative mathematical answer.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde_json::{json, Map, Value};

use crate::code::{Budget, LinearCode, DEFAULT_ENUM_CAP, DEFAULT_ORACLE_CAP};
use crate::codefile::{parse_code_file, write_code_file};
use crate::error::Error;
use crate::expand::{
    all_pass, best_expansion, enumerate_expansions, expand_euclidean, expand_hermitian,
    random_self_orthogonal, selfdual_obstruction, tower, try_expand_boundary, Check,
    ExpansionReport,
};
use crate::gf::{make_field, parse_field_spec, Fe, Field};
use crate::linalg::{InnerForm, VecF};

pub const SCHEMA_VERSION: u32 = 1;
pub const CAP_ENV: &str = "SOXPAND_CAP";

#[derive(Parser, Debug)]
#[command(name = "soxpand", version, about = "Expand self-orthogonal linear codes over finite fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Inner product: euclidean or hermitian.
    #[arg(long, global = true, default_value = "euclidean")]
    inner: InnerForm,
    /// Seed for randomized choices; without it every choice is canonical.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Let `tower` try the n = 2k+2 boundary step.
    #[arg(long, global = true)]
    attempt_boundary: bool,
    /// Print a JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Input code file.
    #[arg(long = "in", global = true, value_name = "FILE")]
    input: Option<PathBuf>,
    /// Write the resulting code to FILE.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Length, for the zero code or `random`.
    #[arg(long, global = true)]
    n: Option<usize>,
    /// Dimension, for `random` and `obstruction`.
    #[arg(long, global = true)]
    k: Option<usize>,
    /// Field as p^m.
    #[arg(long, global = true, value_name = "p^m")]
    field: Option<String>,
    /// Worker threads for exhaustive searches.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Dual code under the chosen inner product.
    Dual,
    /// Check self-orthogonality; exits 3 if the code is not self-orthogonal.
    Verify,
    /// One expansion step.
    Expand,
    /// Expand repeatedly until the hypotheses fail.
    Tower,
    /// Exhaustive minimum distance.
    Mindist,
    /// All self-orthogonal one-step supersets.
    Enumerate,
    /// The superset with the largest minimum distance.
    Best,
    /// A seeded random self-orthogonal [n,k] code.
    Random,
    /// Decide the Euclidean n = 2k+2 case in odd characteristic.
    Boundary,
    /// Whether self-dual [2k+2,k+1] codes over GF(q) cannot exist.
    Obstruction,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Dual => "dual",
            Command::Verify => "verify",
            Command::Expand => "expand",
            Command::Tower => "tower",
            Command::Mindist => "mindist",
            Command::Enumerate => "enumerate",
            Command::Best => "best",
            Command::Random => "random",
            Command::Boundary => "boundary",
            Command::Obstruction => "obstruction",
        }
    }
}

/// Exit code and captured output of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Failure {
    code: i32,
    msg: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NoExpansion(_) => 3,
            _ => 2,
        };
        Failure {
            code,
            msg: e.to_string(),
        }
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        msg: msg.into(),
    }
}

/// Ordered report; rendered as `key: value` lines or as a JSON object.
struct Report {
    entries: Vec<(&'static str, Value)>,
    checks: Vec<Check>,
    code: Option<LinearCode>,
    exit: i32,
}

impl Report {
    fn new() -> Self {
        Report {
            entries: Vec::new(),
            checks: Vec::new(),
            code: None,
            exit: 0,
        }
    }

    fn put(&mut self, key: &'static str, value: impl Into<Value>) {
        self.entries.push((key, value.into()));
    }

    fn render_text(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.entries {
            match v {
                Value::String(t) => writeln!(s, "{k}: {t}"),
                Value::Null => writeln!(s, "{k}: -"),
                Value::Array(items) if items.iter().all(Value::is_object) => {
                    let _ = writeln!(s, "{k}:");
                    for item in items {
                        let line: Vec<String> = item
                            .as_object()
                            .unwrap()
                            .iter()
                            .map(|(ik, iv)| format!("{ik}={}", text_value(iv)))
                            .collect();
                        let _ = writeln!(s, "  {}", line.join(" "));
                    }
                    Ok(())
                }
                other => writeln!(s, "{k}: {}", text_value(other)),
            }
            .unwrap();
        }
        if !self.checks.is_empty() {
            s.push_str("checklist:\n");
            for c in &self.checks {
                let _ = writeln!(s, "  {}: {}", c.name, if c.pass { "pass" } else { "FAIL" });
            }
        }
        if let Some(code) = &self.code {
            s.push_str("code:\n");
            for line in write_code_file(code).lines() {
                let _ = writeln!(s, "  {line}");
            }
        }
        s
    }

    fn render_json(&self) -> String {
        let mut obj = Map::new();
        obj.insert("schema".into(), json!(SCHEMA_VERSION));
        for (k, v) in &self.entries {
            obj.insert((*k).into(), v.clone());
        }
        if !self.checks.is_empty() {
            obj.insert("checklist".into(), json!(self.checks));
            obj.insert("all_pass".into(), json!(all_pass(&self.checks)));
        }
        if let Some(code) = &self.code {
            obj.insert("code".into(), code_json(code));
        }
        let mut s = serde_json::to_string_pretty(&Value::Object(obj)).expect("report serializes");
        s.push('\n');
        s
    }
}

fn text_value(v: &Value) -> String {
    match v {
        Value::String(t) => t.clone(),
        Value::Null => "-".into(),
        Value::Array(items) => {
            let parts: Vec<String> = items.iter().map(text_value).collect();
            format!("({})", parts.join(","))
        }
        other => other.to_string(),
    }
}

fn params(c: &LinearCode) -> String {
    format!("[{},{}]", c.n(), c.k())
}

fn fe_list(xs: &[Fe]) -> Value {
    json!(xs.iter().map(|x| x.value()).collect::<Vec<_>>())
}

fn vec_json(v: &VecF) -> Value {
    json!(v.values())
}

fn code_json(c: &LinearCode) -> Value {
    json!({
        "field": c.ctx().name(),
        "n": c.n(),
        "k": c.k(),
        "rows": c.generator().values(),
    })
}

fn distance_json(c: &LinearCode, budget: &Budget) -> Result<Value, Failure> {
    match c.min_distance_with(budget) {
        Ok(d) => Ok(json!(d)),
        Err(Error::ZeroCode) => Ok(Value::Null),
        Err(e) => Err(e.into()),
    }
}

struct Ctx {
    cli: Cli,
    argv: Vec<String>,
    budget: Budget,
}

impl Ctx {
    fn field(&self) -> Result<Field, Failure> {
        let spec = self
            .cli
            .field
            .as_deref()
            .ok_or_else(|| usage("--field p^m is required"))?;
        let (p, m) = parse_field_spec(spec)?;
        Ok(make_field(p, m)?)
    }

    fn input_code(&self) -> Result<LinearCode, Failure> {
        if let Some(path) = &self.cli.input {
            let text = std::fs::read_to_string(path)
                .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
            return parse_code_file(&text).map_err(|e| usage(format!("{}: {e}", path.display())));
        }
        match (&self.cli.field, self.cli.n) {
            (Some(_), Some(n)) => Ok(LinearCode::zero(&self.field()?, n)?),
            _ => Err(usage("an input code is required: --in FILE, or --field p^m --n N for the zero code")),
        }
    }

    fn header(&self, r: &mut Report, command: Command, f: Option<&Field>) {
        r.put("command", command.name());
        r.put("argv", self.argv.join(" "));
        if let Some(f) = f {
            r.put("field", f.name());
            r.put("modulus", f.modulus_string());
        }
    }

    fn form(&self, r: &mut Report) {
        r.put("form", self.cli.inner.to_string());
    }
}

fn budget_from_env(threads: usize) -> Result<Budget, Failure> {
    let mut budget = Budget {
        enum_cap: DEFAULT_ENUM_CAP,
        oracle_cap: DEFAULT_ORACLE_CAP,
        threads: threads.max(1),
    };
    if let Ok(raw) = std::env::var(CAP_ENV) {
        let cap: u64 = raw
            .trim()
            .parse()
            .map_err(|_| usage(format!("{CAP_ENV} must be a non-negative integer, found '{raw}'")))?;
        budget.enum_cap = cap;
        budget.oracle_cap = cap;
    }
    Ok(budget)
}

/// Runs one invocation. `args` includes the program name.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome { code, stdout: String::new(), stderr: text }
            } else {
                Outcome { code, stdout: text, stderr: String::new() }
            };
        }
    };
    let budget = match budget_from_env(cli.threads) {
        Ok(b) => b,
        Err(f) => return failure(f),
    };
    let argv = args
        .iter()
        .skip(1)
        .map(|a| a.to_string_lossy().into_owned())
        .collect();
    let ctx = Ctx { cli, argv, budget };
    match dispatch(&ctx) {
        Ok(report) => finish(&ctx, report),
        Err(f) => failure(f),
    }
}

fn failure(f: Failure) -> Outcome {
    Outcome {
        code: f.code,
        stdout: String::new(),
        stderr: format!("error: {}\n", f.msg),
    }
}

fn finish(ctx: &Ctx, mut report: Report) -> Outcome {
    if !all_pass(&report.checks) {
        report.exit = 1;
    }
    let mut stderr = String::new();
    if let (Some(path), Some(code)) = (&ctx.cli.out, &report.code) {
        if report.exit == 0 {
            if let Err(e) = std::fs::write(path, write_code_file(code)) {
                return failure(usage(format!("cannot write {}: {e}", path.display())));
            }
        }
    }
    if report.exit == 1 {
        stderr.push_str("error: verification checklist failed\n");
    }
    let stdout = if ctx.cli.json {
        report.render_json()
    } else {
        report.render_text()
    };
    Outcome {
        code: report.exit,
        stdout,
        stderr,
    }
}

fn dispatch(ctx: &Ctx) -> Result<Report, Failure> {
    let command = ctx.cli.command;
    match command {
        Command::Dual => cmd_dual(ctx),
        Command::Verify => cmd_verify(ctx),
        Command::Expand => cmd_expand(ctx),
        Command::Tower => cmd_tower(ctx),
        Command::Mindist => cmd_mindist(ctx),
        Command::Enumerate => cmd_enumerate(ctx),
        Command::Best => cmd_best(ctx),
        Command::Random => cmd_random(ctx),
        Command::Boundary => cmd_boundary(ctx),
        Command::Obstruction => cmd_obstruction(ctx),
    }
}

fn cmd_dual(ctx: &Ctx) -> Result<Report, Failure> {
    let c = ctx.input_code()?;
    let form = ctx.cli.inner;
    let mut r = Report::new();
    ctx.header(&mut r, Command::Dual, Some(c.ctx()));
    ctx.form(&mut r);
    let d = c.dual(form)?;
    r.put("input", params(&c));
    r.put("output", params(&d));
    r.checks = vec![
        Check { name: "dimension", pass: d.k() == c.n() - c.k() },
        Check { name: "involution", pass: d.dual(form)? == c },
    ];
    r.code = Some(d);
    Ok(r)
}

fn cmd_verify(ctx: &Ctx) -> Result<Report, Failure> {
    let c = ctx.input_code()?;
    let form = ctx.cli.inner;
    let mut r = Report::new();
    ctx.header(&mut r, Command::Verify, Some(c.ctx()));
    ctx.form(&mut r);
    let so = c.is_self_orthogonal(form)?;
    r.put("input", params(&c));
    r.put("self_orthogonal", so);
    r.put("self_dual", c.is_self_dual(form)?);
    if !so {
        r.exit = 3;
    }
    Ok(r)
}

fn step_entries(r: &mut Report, step: &ExpansionReport) {
    r.put("branch", step.branch.as_str());
    r.put("solver_witness", fe_list(&step.solver_witness));
    r.put("new_vector", vec_json(&step.new_vector));
}

fn cmd_expand(ctx: &Ctx) -> Result<Report, Failure> {
    let c = ctx.input_code()?;
    let mut r = Report::new();
    ctx.header(&mut r, Command::Expand, Some(c.ctx()));
    ctx.form(&mut r);
    r.put("seed", json!(ctx.cli.seed));
    let step = match ctx.cli.inner {
        InnerForm::Hermitian => expand_hermitian(&c, ctx.cli.seed)?,
        InnerForm::Euclidean => expand_euclidean(&c, ctx.cli.seed)?,
    };
    r.put("input", params(&step.input));
    r.put("output", params(&step.output));
    step_entries(&mut r, &step);
    r.checks = step.checks()?;
    r.code = Some(step.output);
    Ok(r)
}

fn cmd_tower(ctx: &Ctx) -> Result<Report, Failure> {
    let c = ctx.input_code()?;
    let mut r = Report::new();
    ctx.header(&mut r, Command::Tower, Some(c.ctx()));
    ctx.form(&mut r);
    r.put("seed", json!(ctx.cli.seed));
    let t = tower(&c, ctx.cli.inner, ctx.cli.seed, ctx.cli.attempt_boundary)?;
    r.put("input", params(&t.start));
    r.put("output", params(&t.terminal));
    r.put("l", t.l);
    r.put("r_steps", t.r_steps);
    let steps: Vec<Value> = t
        .steps
        .iter()
        .map(|s| {
            json!({
                "k": s.output.k(),
                "branch": s.branch.as_str(),
                "solver_witness": fe_list(&s.solver_witness),
                "new_vector": vec_json(&s.new_vector),
            })
        })
        .collect();
    r.put("steps", steps);
    match &t.boundary {
        Some(b) => {
            r.put("boundary_attempted", true);
            r.put("boundary_expandable", b.expandable);
            r.put("square_class_witness", b.square_class_witness.value());
        }
        None => r.put("boundary_attempted", false),
    }
    r.checks = t.checks()?;
    r.code = Some(t.terminal);
    Ok(r)
}

fn cmd_mindist(ctx: &Ctx) -> Result<Report, Failure> {
    let c = ctx.input_code()?;
    let mut r = Report::new();
    ctx.header(&mut r, Command::Mindist, Some(c.ctx()));
    r.put("input", params(&c));
    r.put("distance", distance_json(&c, &ctx.budget)?);
    Ok(r)
}

fn expansion_checks(c: &LinearCode, e: &LinearCode, form: InnerForm) -> Result<Vec<Check>, Failure> {
    Ok(vec![
        Check { name: "dimension", pass: e.k() == c.k() + 1 },
        Check { name: "subcode", pass: c.is_subcode_of(e)? },
        Check { name: "self-orthogonal", pass: e.is_self_orthogonal(form)? },
    ])
}

fn cmd_enumerate(ctx: &Ctx) -> Result<Report, Failure> {
    let c = ctx.input_code()?;
    let form = ctx.cli.inner;
    let mut r = Report::new();
    ctx.header(&mut r, Command::Enumerate, Some(c.ctx()));
    ctx.form(&mut r);
    let all = enumerate_expansions(&c, form, &ctx.budget)?;
    r.put("input", params(&c));
    r.put("count", all.len());
    let mut pass = true;
    for e in &all {
        pass &= all_pass(&expansion_checks(&c, e, form)?);
    }
    r.put(
        "expansions",
        all.iter()
            .map(|e| json!({ "rows": text_rows(e) }))
            .collect::<Vec<_>>(),
    );
    r.checks = vec![Check { name: "all-expansions-valid", pass }];
    if all.is_empty() {
        r.exit = 3;
    }
    Ok(r)
}

fn text_rows(c: &LinearCode) -> String {
    c.generator()
        .row_vecs()
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn cmd_best(ctx: &Ctx) -> Result<Report, Failure> {
    let c = ctx.input_code()?;
    let form = ctx.cli.inner;
    let mut r = Report::new();
    ctx.header(&mut r, Command::Best, Some(c.ctx()));
    ctx.form(&mut r);
    let (best, d) = best_expansion(&c, form, &ctx.budget)?;
    r.put("input", params(&c));
    r.put("output", params(&best));
    r.put("distance", d);
    let mut checks = expansion_checks(&c, &best, form)?;
    checks.push(Check { name: "distance", pass: best.min_distance_with(&ctx.budget)? == d });
    r.checks = checks;
    r.code = Some(best);
    Ok(r)
}

fn cmd_random(ctx: &Ctx) -> Result<Report, Failure> {
    let f = ctx.field()?;
    let form = ctx.cli.inner;
    let n = ctx.cli.n.ok_or_else(|| usage("--n is required"))?;
    let k = ctx.cli.k.ok_or_else(|| usage("--k is required"))?;
    let seed = ctx.cli.seed.unwrap_or(0);
    let mut r = Report::new();
    ctx.header(&mut r, Command::Random, Some(&f));
    ctx.form(&mut r);
    r.put("seed", seed);
    let c = random_self_orthogonal(&f, n, k, form, seed)?;
    r.put("output", params(&c));
    r.checks = vec![
        Check { name: "dimension", pass: c.k() == k },
        Check { name: "self-orthogonal", pass: c.is_self_orthogonal(form)? },
    ];
    r.code = Some(c);
    Ok(r)
}

fn cmd_boundary(ctx: &Ctx) -> Result<Report, Failure> {
    let c = ctx.input_code()?;
    let mut r = Report::new();
    ctx.header(&mut r, Command::Boundary, Some(c.ctx()));
    r.put("form", InnerForm::Euclidean.to_string());
    r.put("seed", json!(ctx.cli.seed));
    let v = try_expand_boundary(&c, ctx.cli.seed)?;
    let f = c.ctx();
    r.put("input", params(&c));
    r.put("square_class_witness", v.square_class_witness.value());
    r.put("witness_is_square", f.is_square(v.square_class_witness));
    r.put("expandable", v.expandable);
    match &v.step {
        Some(step) => {
            r.put("output", params(&step.output));
            step_entries(&mut r, step);
            let mut checks = step.checks()?;
            checks.push(Check {
                name: "self-dual",
                pass: step.output.is_self_dual(InnerForm::Euclidean)?,
            });
            r.checks = checks;
            r.code = Some(step.output.clone());
        }
        None => {
            r.checks = vec![Check {
                name: "witness-non-square",
                pass: !f.is_square(v.square_class_witness),
            }];
            r.exit = 3;
        }
    }
    Ok(r)
}

fn cmd_obstruction(ctx: &Ctx) -> Result<Report, Failure> {
    let spec = ctx
        .cli
        .field
        .as_deref()
        .ok_or_else(|| usage("--field p^m is required"))?;
    let (p, m) = parse_field_spec(spec)?;
    let k = ctx.cli.k.ok_or_else(|| usage("--k is required"))?;
    let q = p
        .checked_pow(m)
        .ok_or_else(|| usage(format!("{p}^{m} is too large")))?;
    let obstructed = selfdual_obstruction(q, k)?;
    let mut r = Report::new();
    ctx.header(&mut r, Command::Obstruction, None);
    r.put("field", format!("{p}^{m}"));
    r.put("q", q);
    r.put("k", k);
    r.put("n", 2 * k + 2);
    r.put("obstructed", obstructed);
    Ok(r)
}
