//! Command-line driver: parses JSON inputs, runs one library operation, and writes JSON, a
//! plain-text table, or a DOT rendering.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use num_traits::One;
use serde_json::Value;

use crate::diagram::{Color, Diagram, DiagramSum, Flavor, Owner, Truncation};
use crate::error::{Error, Result};
use crate::gluing::pair;
use crate::integrals::{
    check_gaussian_identity, check_prop_main, check_translation_invariance, closed_pairing_instances, fg_integrate,
    nd_integrate, reduce_mod_span, Report,
};
use crate::linalg::{det_bareiss, det_leibniz, QuadraticForm, Rational};
use crate::random::{color_names, random_diagram, random_symmetric, rng};
use crate::series::{gaussian_part, split_gaussian, Integrand, PerturbedGaussian};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "jacobi", version, about = "Exact diagrammatic integration over uni-trivalent diagrams")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Human-readable output instead of JSON.
    #[arg(long, global = true)]
    pub pretty: bool,
    /// Worker threads for pairings (default: available parallelism).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Drop output terms above this degree.
    #[arg(long, global = true)]
    pub degree_bound: Option<u32>,
    /// Drop output terms with more legs of one color than this.
    #[arg(long, global = true)]
    pub legs_bound: Option<u32>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Pair the dual-colored legs of LEFT with the matching legs of RIGHT in all ways.
    Pair { left: PathBuf, right: PathBuf },
    /// Formal Gaussian integral of a perturbed Gaussian or integrand (needs --degree-bound).
    IntegrateFg { input: PathBuf },
    /// Negative-dimensional integral over the input's colors.
    IntegrateNd {
        input: PathBuf,
        #[arg(long)]
        m: u32,
        /// Replace each circle by -2m.
        #[arg(long)]
        reduce: bool,
    },
    /// Reduce a sum of closed diagrams modulo the span of P_{m+1} on small contexts.
    Reduce {
        input: PathBuf,
        #[arg(long)]
        m: u32,
    },
    /// Determinant of a quadratic form (exact elimination, or the Leibniz oracle).
    Det {
        input: PathBuf,
        #[arg(long)]
        leibniz: bool,
    },
    /// Run an identity check on one input, or on a seeded random corpus.
    Check {
        kind: CheckKind,
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        m: u32,
        /// Seed for the random corpus used when no input is given.
        #[arg(long)]
        seed: Option<u64>,
        /// Size of the random corpus.
        #[arg(long, default_value_t = 10)]
        count: usize,
    },
    /// Print a sum or diagram as a table, or as DOT.
    Render {
        input: PathBuf,
        #[arg(long)]
        dot: bool,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CheckKind {
    Gaussian,
    Translation,
    PropMain,
}

/// Any of the accepted input documents, recognized by their top-level fields.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Input {
    Diagram(Diagram),
    Sum(DiagramSum),
    Form(QuadraticForm),
    Gaussian(PerturbedGaussian),
    Integrand(Integrand),
}

impl Input {
    pub fn from_json(v: &Value) -> Result<Self> {
        let obj = v.as_object().ok_or_else(|| parse_err("", "top level must be an object"))?;
        let has = |k: &str| obj.contains_key(k);
        if has("exp_of") {
            Integrand::from_json(v).map(Input::Integrand)
        } else if has("form") {
            PerturbedGaussian::from_json(v).map(Input::Gaussian)
        } else if has("entries") {
            QuadraticForm::from_json(v).map(Input::Form)
        } else if has("terms") {
            DiagramSum::from_json(v).map(Input::Sum)
        } else if has("legs") || has("vertices") || has("edges") {
            Diagram::from_json(v).map(Input::Diagram)
        } else {
            Err(parse_err("", "expected one of: exp_of, form, entries, terms, legs"))
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            Input::Diagram(_) => "diagram",
            Input::Sum(_) => "sum",
            Input::Form(_) => "quadratic form",
            Input::Gaussian(_) => "perturbed Gaussian",
            Input::Integrand(_) => "integrand",
        }
    }

    fn into_sum(self) -> Result<DiagramSum> {
        match self {
            Input::Sum(s) => Ok(s),
            Input::Diagram(d) => DiagramSum::from_diagram(&d, Rational::one()),
            other => Err(parse_err("", &format!("expected a sum or diagram, got a {}", other.kind()))),
        }
    }

    fn into_gaussian(self) -> Result<PerturbedGaussian> {
        match self {
            Input::Gaussian(g) => Ok(g),
            Input::Form(f) => Ok(PerturbedGaussian::pure(f)),
            Input::Integrand(i) => split_gaussian(&i),
            other => Err(parse_err("", &format!("expected a perturbed Gaussian, got a {}", other.kind()))),
        }
    }

    fn into_form(self) -> Result<QuadraticForm> {
        match self {
            Input::Form(f) => Ok(f),
            Input::Gaussian(g) => Ok(g.form().clone()),
            other => Err(parse_err("", &format!("expected a quadratic form, got a {}", other.kind()))),
        }
    }
}

fn parse_err(path: &str, message: &str) -> Error {
    Error::Parse { path: path.into(), message: message.into() }
}

/// Reads and strictly parses an input file. Errors name the file and the offending field.
pub fn parse_input(path: &Path) -> Result<Input> {
    let file = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| parse_err(&file, &e.to_string()))?;
    let v: Value = serde_json::from_str(&text).map_err(|e| parse_err(&file, &e.to_string()))?;
    Input::from_json(&v).map_err(|e| match e {
        Error::Parse { path: p, message } if p.is_empty() => parse_err(&file, &message),
        Error::Parse { path: p, message } => parse_err(&format!("{file}: {p}"), &message),
        other => parse_err(&file, &other.to_string()),
    })
}

/// Plain colors carried by the legs of a sum, in order.
fn plain_colors(s: &DiagramSum) -> Vec<Color> {
    let set: BTreeSet<Color> =
        s.terms().flat_map(|t| t.diagram.legs().iter().map(|l| l.color.clone())).filter(|c| c.flavor == Flavor::Plain).collect();
    set.into_iter().collect()
}

/// What a command produced, before formatting.
enum Output {
    Sum(DiagramSum),
    Scalar(String),
    Report(Report),
    Reports(Vec<Report>),
    Reduction { residual: DiagramSum, member: bool, rank: usize, generators: usize },
    Text(String),
}

impl Output {
    fn exit_code(&self) -> i32 {
        let failed = match self {
            Output::Report(r) => !r.equal,
            Output::Reports(rs) => rs.iter().any(|r| !r.equal),
            _ => false,
        };
        if failed {
            EXIT_CHECK_FAILED
        } else {
            EXIT_OK
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Output::Sum(s) => s.to_json(),
            Output::Scalar(v) => Value::String(v.clone()),
            Output::Report(r) => r.to_json(),
            Output::Reports(rs) => Value::Array(rs.iter().map(Report::to_json).collect()),
            Output::Reduction { residual, member, rank, generators } => serde_json::json!({
                "residual": residual.to_json(),
                "member": member,
                "rank": rank,
                "generators": generators,
            }),
            Output::Text(t) => Value::String(t.clone()),
        }
    }

    fn to_pretty(&self) -> String {
        match self {
            Output::Sum(s) => sum_table(s),
            Output::Scalar(v) => format!("{v}\n"),
            Output::Report(r) => report_text(r),
            Output::Reports(rs) => rs.iter().map(report_text).collect::<Vec<_>>().join("\n"),
            Output::Reduction { residual, member, rank, generators } => {
                format!("member: {member}\nrank: {rank} of {generators} generators\nresidual:\n{}", sum_table(residual))
            }
            Output::Text(t) => t.clone(),
        }
    }
}

/// One line per term: coefficient, then the diagram summary.
pub fn sum_table(s: &DiagramSum) -> String {
    if s.is_empty() {
        return "0\n".into();
    }
    let rows: Vec<(String, String)> = s.terms().map(|t| (t.coeff.to_string(), t.diagram.to_string())).collect();
    let width = rows.iter().map(|(c, _)| c.len()).max().unwrap_or(0);
    let mut out = String::new();
    for (c, d) in rows {
        let _ = writeln!(out, "{c:>width$}  {d}");
    }
    out
}

fn report_text(r: &Report) -> String {
    let mut out = format!("{} (m = {}): {}\n", r.check, r.m, if r.equal { "equal" } else { "NOT equal" });
    if let Some(n) = r.relations {
        let _ = writeln!(out, "relation instances used: {n}");
    }
    let _ = write!(out, "lhs:\n{}rhs:\n{}", sum_table(&r.lhs), sum_table(&r.rhs));
    if !r.residual.is_empty() {
        let _ = write!(out, "residual:\n{}", sum_table(&r.residual));
    }
    out
}

fn dot_label(c: &Color) -> String {
    c.to_string().replace('"', "\\\"")
}

/// DOT rendering: one cluster per term labeled by its coefficient. Trivalent vertices are points,
/// legs are labeled boxes, circles are loose loops. Each edge end at a trivalent vertex is
/// annotated with its position (0, 1, 2) in that vertex's cyclic order.
pub fn render_dot(s: &DiagramSum) -> String {
    let mut out = String::from("graph sum {\n  node [fontsize=10];\n");
    for (ti, t) in s.terms().enumerate() {
        let d = &t.diagram;
        let _ = writeln!(out, "  subgraph cluster_{ti} {{\n    label=\"{}\";", t.coeff);
        let node = |h: usize| -> String {
            match d.owner(h) {
                Owner::Leg(i) => format!("t{ti}_l{i}"),
                Owner::Vertex(v, _) => format!("t{ti}_v{v}"),
            }
        };
        for (i, l) in d.legs().iter().enumerate() {
            let _ = writeln!(out, "    t{ti}_l{i} [shape=box, label=\"{}\"];", dot_label(&l.color));
        }
        for v in 0..d.vertices().len() {
            let _ = writeln!(out, "    t{ti}_v{v} [shape=point];");
        }
        let slot = |h: usize| -> Option<usize> {
            match d.owner(h) {
                Owner::Vertex(_, i) => Some(usize::from(i)),
                Owner::Leg(_) => None,
            }
        };
        for (a, b) in d.edges() {
            let mut attrs = Vec::new();
            if let Some(i) = slot(a) {
                attrs.push(format!("taillabel=\"{i}\""));
            }
            if let Some(i) = slot(b) {
                attrs.push(format!("headlabel=\"{i}\""));
            }
            let _ = writeln!(out, "    {} -- {} [{}];", node(a), node(b), attrs.join(", "));
        }
        for c in 0..d.circles() {
            let _ = writeln!(out, "    t{ti}_o{c} [shape=circle, label=\"\", width=0.3];");
        }
        if d.vertex_count() == 0 && d.circles() == 0 {
            let _ = writeln!(out, "    t{ti}_empty [shape=plaintext, label=\"1\"];");
        }
        out.push_str("  }\n");
    }
    out.push_str("}\n");
    out
}

/// Output truncation from the global bound flags.
fn output_bound(cli: &Cli) -> Option<Truncation> {
    let t = Truncation { max_degree: cli.degree_bound, max_legs_per_color: cli.legs_bound };
    (!t.is_unbounded()).then_some(t)
}

fn bounded(s: DiagramSum, bound: Option<Truncation>) -> DiagramSum {
    match bound {
        Some(t) => s.truncated(t),
        None => s,
    }
}

/// `∫^(m)` of whatever the input describes, before any output truncation.
fn integrate_nd_input(input: Input, m: u32, reduce: bool) -> Result<DiagramSum> {
    let legs = Truncation::legs(2 * m);
    let (integrand, colors) = match input {
        Input::Integrand(i) => {
            let colors = i.colors.iter().map(Color::plain).collect();
            (i.expand(Some(legs))?, colors)
        }
        Input::Form(f) => {
            let colors = f.colors().iter().map(Color::plain).collect();
            (gaussian_part(&f, 1, Flavor::Plain, Some(legs))?, colors)
        }
        Input::Gaussian(g) => {
            let p = g.perturbation().filtered(|d| legs.admits(&d.grade())).without_truncation();
            let gauss = gaussian_part(g.form(), 1, Flavor::Plain, Some(legs))?.without_truncation();
            (p.mul(&gauss)?, g.colors())
        }
        other => {
            let s = other.into_sum()?;
            let colors = plain_colors(&s);
            (s, colors)
        }
    };
    nd_integrate(&integrand, &colors, m, reduce)
}

fn random_checks(kind: CheckKind, m: u32, seed: u64, count: usize) -> Result<Vec<Report>> {
    let mut r = rng(seed);
    match kind {
        CheckKind::Gaussian => (0..count)
            .map(|i| check_gaussian_identity(&random_symmetric(&mut r, 1 + i % 3, -3, 3), m))
            .collect(),
        CheckKind::Translation => {
            let colors: Vec<Color> = color_names(2).iter().map(Color::plain).collect();
            (0..count)
                .map(|_| {
                    let d = random_diagram(&mut r, &colors, 2 * m as usize + 2, 8);
                    check_translation_invariance(&d, &colors, m)
                })
                .collect()
        }
        CheckKind::PropMain => Err(parse_err("check prop-main", "needs an input file; there is no random corpus")),
    }
}

fn execute(cli: &Cli) -> Result<Output> {
    let bound = output_bound(cli);
    Ok(match &cli.command {
        Command::Pair { left, right } => {
            let (l, r) = (parse_input(left)?.into_sum()?, parse_input(right)?.into_sum()?);
            let duals: BTreeSet<Color> = l
                .terms()
                .flat_map(|t| t.diagram.legs().iter().map(|g| g.color.clone()))
                .filter(|c| c.flavor.is_dual())
                .map(|c| c.dual_color())
                .collect();
            let colors: Vec<Color> = duals.into_iter().collect();
            Output::Sum(bounded(pair(&l, &r, &colors)?, bound))
        }
        Command::IntegrateFg { input } => {
            let g = parse_input(input)?.into_gaussian()?;
            let d = cli.degree_bound.ok_or_else(|| parse_err("--degree-bound", "integrate-fg needs a degree bound"))?;
            Output::Sum(bounded(fg_integrate(&g, d)?, bound))
        }
        Command::IntegrateNd { input, m, reduce } => {
            Output::Sum(bounded(integrate_nd_input(parse_input(input)?, *m, *reduce)?, bound))
        }
        Command::Reduce { input, m } => {
            let s = bounded(parse_input(input)?.into_sum()?, bound);
            let trivalent = s.terms().map(|t| t.diagram.grade().trivalent as usize).max().unwrap_or(0);
            let gens = closed_pairing_instances(*m + 1, trivalent)?;
            let sums: Vec<DiagramSum> = gens.iter().map(|g| g.expansion.clone()).collect();
            let red = reduce_mod_span(&s, &sums)?;
            Output::Reduction { residual: red.residual, member: red.member, rank: red.rank, generators: sums.len() }
        }
        Command::Det { input, leibniz } => {
            let f = parse_input(input)?.into_form()?;
            let v = if *leibniz { det_leibniz(&f)? } else { det_bareiss(&f) };
            Output::Scalar(v.to_string())
        }
        Command::Check { kind, input, m, seed, count } => match (input, seed) {
            (Some(path), _) => {
                let inp = parse_input(path)?;
                let report = match kind {
                    CheckKind::Gaussian => check_gaussian_identity(&inp.into_form()?, *m)?,
                    CheckKind::PropMain => check_prop_main(&inp.into_gaussian()?, *m)?,
                    CheckKind::Translation => {
                        let s = inp.into_sum()?;
                        let mut terms = s.terms();
                        let (Some(t), None) = (terms.next(), terms.next()) else {
                            return Err(parse_err("check translation", "input must be a single diagram"));
                        };
                        let colors = plain_colors(&s);
                        check_translation_invariance(&t.diagram, &colors, *m)?
                    }
                };
                Output::Report(report)
            }
            (None, Some(seed)) => Output::Reports(random_checks(*kind, *m, *seed, *count)?),
            (None, None) => return Err(parse_err("check", "give an input file or --seed")),
        },
        Command::Render { input, dot } => {
            let s = bounded(parse_input(input)?.into_sum()?, bound);
            if *dot {
                Output::Text(render_dot(&s))
            } else {
                Output::Text(sum_table(&s))
            }
        }
    })
}

/// Runs the command line `args` (program name first), writing results to `out` and diagnostics
/// to `err`. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            return code;
        }
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        pool = pool.num_threads(n);
    }
    let result = match pool.build() {
        Ok(p) => p.install(|| execute(&cli)),
        Err(e) => Err(parse_err("--threads", &e.to_string())),
    };
    match result {
        Ok(output) => {
            let text = if cli.pretty || matches!(output, Output::Text(_)) {
                output.to_pretty()
            } else {
                let mut s = serde_json::to_string(&output.to_json()).expect("JSON output serializes");
                s.push('\n');
                s
            };
            if out.write_all(text.as_bytes()).is_err() {
                return EXIT_INPUT;
            }
            output.exit_code()
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INPUT
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::strut;
    use crate::linalg::rat;

    #[test]
    fn recognizes_inputs() {
        let f = QuadraticForm::identity(&["x"]);
        assert!(matches!(Input::from_json(&f.to_json()).unwrap(), Input::Form(_)));
        let d = strut(Color::plain("x"), Color::plain("y"));
        assert!(matches!(Input::from_json(&d.to_json()).unwrap(), Input::Diagram(_)));
        let s = DiagramSum::from_diagram(&d, Rational::one()).unwrap();
        assert!(matches!(Input::from_json(&s.to_json()).unwrap(), Input::Sum(_)));
        assert!(Input::from_json(&serde_json::json!({"nothing": 1})).is_err());
    }

    #[test]
    fn unknown_subcommand_is_input_error() {
        let (mut o, mut e) = (Vec::new(), Vec::new());
        assert_eq!(run(["jacobi", "frobnicate"], &mut o, &mut e), EXIT_INPUT);
        assert_eq!(run(["jacobi", "--help"], &mut o, &mut e), EXIT_OK);
    }

    #[test]
    fn unequal_reports_exit_with_one() {
        let f = QuadraticForm::identity(&["x"]);
        let mut r = check_gaussian_identity(&f, 1).unwrap();
        assert_eq!(Output::Report(r.clone()).exit_code(), EXIT_OK);
        r.equal = false;
        assert_eq!(Output::Report(r.clone()).exit_code(), EXIT_CHECK_FAILED);
        let ok = check_gaussian_identity(&f, 2).unwrap();
        assert_eq!(Output::Reports(vec![ok, r]).exit_code(), EXIT_CHECK_FAILED);
    }

    #[test]
    fn dot_has_one_cluster_per_term() {
        let mut s = DiagramSum::new();
        s.add_diagram(&strut(Color::plain("x"), Color::plain("x")), Rational::one()).unwrap();
        s.add_diagram(&Diagram::circles_only(1), rat(2)).unwrap();
        let dot = render_dot(&s);
        assert_eq!(dot.matches("subgraph cluster_").count(), 2);
        assert!(dot.starts_with("graph sum {"));
    }
}
