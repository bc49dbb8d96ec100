//! `edge-eta`: classification, heat-trace expansions and eta/rho invariants
//! from a JSON descriptor.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 invalid input (diagnostic JSON
//! on stderr), 3 numerical failure (partial results flagged on stdout).

// `!(x > 0.0)` is used on purpose so that NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use clap::{Parser, Subcommand, ValueEnum};
use edge_eta::classify::{classify_boundary_case, classify_eta, classify_rho, ClassifyError};
use edge_eta::eta::{eta_auto, rho_aps, rho_cheeger_gromov_model, EtaError, EtaOptions};
use edge_eta::geometry::{
    operator_parity, suggest_scaling, witt_check_with, GeometryError, LinkSpectrum, OperatorParity,
    WITT_TOLERANCE,
};
use edge_eta::heat::{
    fit_expansion, log_grid, mellin_check, min_time, power_template, sample_traces, slot_label,
    template_from_skeleton, HeatError, MellinOptions, Slot, TraceFunction, TraceSample,
};
use edge_eta::index::{
    fmt_rational, geometric_vanishing, heat_trace_family, int, rat, smooth_skeleton, Parity,
    Skeleton, TraceKind, DEFAULT_CAP,
};
use edge_eta::io::{
    build_spectrum, csv_string, format_f64_17, format_f64_6, read_descriptor, table,
    to_json_string, write_spectrum_csv, Descriptor, IoError, SpectrumSource, ZeroCache,
};
use edge_eta::spectra::{SpectraError, Spectrum};
use serde::Serialize;
use serde_json::{json, Value};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(
    name = "edge-eta",
    version,
    about = "Eta and rho invariants on spaces with edge singularities"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    config: RunConfig,
}

#[derive(clap::Args, Debug)]
struct RunConfig {
    /// JSON descriptor of the space, operator and spectrum.
    #[arg(long, global = true)]
    descriptor: Option<PathBuf>,
    /// Spectral cutoff (on the scale of the Dirac eigenvalues).
    #[arg(long, global = true, default_value_t = 100.0)]
    cutoff: f64,
    /// Lower end of the t-grid (defaults to the smallest time the cutoff supports).
    #[arg(long, global = true)]
    tmin: Option<f64>,
    /// Upper end of the t-grid and of the small-t fit window [default: 0.1].
    #[arg(long, global = true)]
    tmax: Option<f64>,
    /// Grid points per decade of t.
    #[arg(long, global = true)]
    points: Option<usize>,
    /// Tolerance: pole threshold for `eta`, pass threshold for `mellin`,
    /// borderline band for `witt`.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Directory for the persistent Bessel-zero cache.
    #[arg(long, global = true, env = "EDGE_ETA_CACHE")]
    cache_dir: Option<PathBuf>,
    /// Compute every Bessel zero afresh and write nothing.
    #[arg(long, global = true)]
    no_cache: bool,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Regularity of the eta invariant (and rho, when twists are given).
    Classify,
    /// Predicted exponents and log powers of the heat-trace expansions.
    Skeleton,
    /// Materialize the model spectrum up to the cutoff.
    Spectrum {
        /// Also write `<path>` (CSV) and `<path>.json` (sidecar).
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Heat and odd heat traces on a log grid, with expansion fits.
    Trace {
        #[arg(long, value_enum, default_value_t = Which::Both)]
        kind: Which,
        /// Number of expansion terms to fit.
        #[arg(long, default_value_t = 4)]
        terms: usize,
    },
    /// Eta invariant of the descriptor's spectrum.
    Eta,
    /// Rho invariants for the descriptor's twists.
    Rho,
    /// Mellin identity between the heat trace and the eta function.
    Mellin {
        /// Values of s to check.
        #[arg(long = "s", value_delimiter = ',', default_values_t = vec![0.5, 1.0, 1.5])]
        s: Vec<f64>,
    },
    /// Witt condition on every link spectrum in the descriptor.
    Witt,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Which {
    Heat,
    Odd,
    Both,
}

#[derive(Debug)]
enum Failure {
    Validation {
        message: String,
        stratum: Option<String>,
    },
    Numerical {
        message: String,
        partial: Value,
    },
    Io(String),
}

impl Failure {
    fn invalid(message: impl Into<String>) -> Self {
        Failure::Validation {
            message: message.into(),
            stratum: None,
        }
    }

    fn numerical(message: impl Into<String>) -> Self {
        Failure::Numerical {
            message: message.into(),
            partial: Value::Null,
        }
    }

    fn with_partial(self, partial: Value) -> Self {
        match self {
            Failure::Numerical { message, .. } => Failure::Numerical { message, partial },
            other => other,
        }
    }
}

impl From<GeometryError> for Failure {
    fn from(e: GeometryError) -> Self {
        let stratum = match &e {
            GeometryError::InvalidStratum { stratum, .. } => Some(stratum.clone()),
            _ => None,
        };
        Failure::Validation {
            message: e.to_string(),
            stratum,
        }
    }
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        match e {
            IoError::Read { .. } | IoError::Write { .. } => Failure::Io(e.to_string()),
            IoError::Geometry(g) => g.into(),
            IoError::Spectra(s) => s.into(),
            other => Failure::invalid(other.to_string()),
        }
    }
}

impl From<SpectraError> for Failure {
    fn from(e: SpectraError) -> Self {
        match e {
            SpectraError::Domain(_) => Failure::invalid(e.to_string()),
            _ => Failure::numerical(e.to_string()),
        }
    }
}

impl From<ClassifyError> for Failure {
    fn from(e: ClassifyError) -> Self {
        match e {
            ClassifyError::Geometry(g) => g.into(),
            other => Failure::invalid(other.to_string()),
        }
    }
}

impl From<HeatError> for Failure {
    fn from(e: HeatError) -> Self {
        match e {
            HeatError::Domain(_) => Failure::invalid(e.to_string()),
            HeatError::Eta(inner) => (*inner).into(),
            _ => Failure::numerical(e.to_string()),
        }
    }
}

impl From<EtaError> for Failure {
    fn from(e: EtaError) -> Self {
        match e {
            EtaError::Domain(_) => Failure::invalid(e.to_string()),
            EtaError::Heat(h) => h.into(),
            _ => Failure::numerical(e.to_string()),
        }
    }
}

/// A table cell; numbers get 17 digits in CSV and 6 in tables.
enum Cell {
    Num(f64),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => format_f64_17(*x),
            Cell::Text(s) => s.clone(),
        }
    }

    fn table(&self) -> String {
        match self {
            Cell::Num(x) => format_f64_6(*x),
            Cell::Text(s) => s.clone(),
        }
    }
}

fn text(s: impl ToString) -> Cell {
    Cell::Text(s.to_string())
}

fn opt_num(x: Option<f64>) -> Cell {
    x.map_or_else(|| text(""), Cell::Num)
}

struct Report {
    json: Value,
    headers: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
}

impl Report {
    fn render(&self, format: Format) -> String {
        match format {
            Format::Json => to_json_string(&self.json),
            Format::Csv => {
                let rows: Vec<Vec<String>> = self
                    .rows
                    .iter()
                    .map(|r| r.iter().map(Cell::csv).collect())
                    .collect();
                csv_string(&self.headers, &rows)
            }
            Format::Table => {
                let rows: Vec<Vec<String>> = self
                    .rows
                    .iter()
                    .map(|r| r.iter().map(Cell::table).collect())
                    .collect();
                table(&self.headers, &rows)
            }
        }
    }
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report types serialize")
}

struct Context {
    config: RunConfig,
    descriptor: Option<Descriptor>,
    base_dir: PathBuf,
    cache: ZeroCache,
}

impl Context {
    fn descriptor(&self) -> Result<&Descriptor, Failure> {
        self.descriptor
            .as_ref()
            .ok_or_else(|| Failure::invalid("this command needs --descriptor"))
    }

    fn source(&self) -> Result<&SpectrumSource, Failure> {
        self.descriptor()?
            .spectrum
            .as_ref()
            .ok_or_else(|| Failure::invalid("descriptor has no \"spectrum\" entry"))
    }

    fn spectrum(&self) -> Result<Spectrum, Failure> {
        Ok(build_spectrum(
            self.source()?,
            self.config.cutoff,
            &self.cache,
            &self.base_dir,
        )?)
    }

    /// Odd-trace skeleton matching the descriptor: the first edge stratum,
    /// or the interior branch alone when there are no edges.
    fn odd_skeleton(&self) -> Result<Skeleton, Failure> {
        let d = self.descriptor()?;
        let m = d.manifold.m;
        let Some(edge) = d.manifold.edges.first() else {
            return Ok(smooth_skeleton(m, TraceKind::OddTrace, int(DEFAULT_CAP)));
        };
        let parity = operator_parity(&d.operator, m, edge.b)?
            .as_parity()
            .ok_or_else(|| {
                Failure::invalid("operator parity is unclassified; declare it in the descriptor")
            })?;
        heat_trace_family(m, edge.b, edge.f, parity, TraceKind::OddTrace)
            .map_err(|e| Failure::invalid(e.to_string()))
    }

    fn eta_options(&self) -> EtaOptions {
        let mut o = EtaOptions::default();
        if let Some(t) = self.config.tmin {
            o.t_min = t;
        }
        if let Some(t) = self.config.tmax {
            o.t_max = t;
        }
        if let Some(p) = self.config.points {
            o.points_per_decade = p;
        }
        if let Some(t) = self.config.tol {
            o.pole_tol = t;
        }
        o
    }
}

fn check_config(c: &RunConfig) -> Result<(), Failure> {
    if !(c.cutoff >= 1.0) {
        return Err(Failure::invalid(format!(
            "--cutoff must be at least 1, got {}",
            c.cutoff
        )));
    }
    for (name, v) in [("--tol", c.tol), ("--tmin", c.tmin), ("--tmax", c.tmax)] {
        if let Some(v) = v {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Failure::invalid(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
    }
    if let (Some(a), Some(b)) = (c.tmin, c.tmax) {
        if a >= b {
            return Err(Failure::invalid(format!(
                "--tmin {a} must be below --tmax {b}"
            )));
        }
    }
    if c.points == Some(0) {
        return Err(Failure::invalid("--points must be positive"));
    }
    Ok(())
}

fn run(cli: Cli) -> Result<String, Failure> {
    check_config(&cli.config)?;
    let descriptor = cli
        .config
        .descriptor
        .as_deref()
        .map(read_descriptor)
        .transpose()?;
    let base_dir = cli
        .config
        .descriptor
        .as_deref()
        .and_then(Path::parent)
        .map(Path::to_path_buf)
        .unwrap_or_default();
    let cache = match (&cli.config.cache_dir, cli.config.no_cache) {
        (Some(dir), false) => ZeroCache::open(dir)?,
        _ => ZeroCache::in_memory(),
    };
    let format = cli.config.format;
    let ctx = Context {
        config: cli.config,
        descriptor,
        base_dir,
        cache,
    };
    let report = match cli.command {
        Command::Classify => classify(&ctx),
        Command::Skeleton => skeleton(&ctx),
        Command::Spectrum { output } => spectrum(&ctx, output.as_deref()),
        Command::Trace { kind, terms } => trace(&ctx, kind, terms),
        Command::Eta => eta(&ctx),
        Command::Rho => rho(&ctx),
        Command::Mellin { s } => mellin(&ctx, &s),
        Command::Witt => witt(&ctx),
    };
    // zeros computed before a numerical failure are still worth keeping
    ctx.cache.persist()?;
    Ok(report?.render(format))
}

fn classify(ctx: &Context) -> Result<Report, Failure> {
    let d = ctx.descriptor()?;
    let status = classify_eta(&d.manifold, &d.operator)?;
    let boundary = classify_boundary_case(&d.manifold)?;
    let rho = d
        .twists
        .map(|t| classify_rho(&d.manifold, &d.operator, t.ranks))
        .transpose()?;
    let mut rows: Vec<Vec<Cell>> = status
        .strata
        .iter()
        .map(|s| {
            vec![
                text(format!("edges[{}]", s.index)),
                text(s.b),
                text(s.f),
                text(s.parity),
                text(s.verdict),
                text(&s.reason),
            ]
        })
        .collect();
    rows.push(vec![
        text("overall"),
        text(""),
        text(""),
        text(""),
        text(status.verdict),
        text(status.reasons.join("; ")),
    ]);
    let mut json = json!({ "eta": to_value(&status), "boundary": to_value(&boundary) });
    if let Some(r) = rho {
        json["rho"] = to_value(&r);
    }
    Ok(Report {
        json,
        headers: vec!["stratum", "b", "f", "parity", "verdict", "reason"],
        rows,
    })
}

fn skeleton(ctx: &Context) -> Result<Report, Failure> {
    let d = ctx.descriptor()?;
    let m = d.manifold.m;
    let cap = int(DEFAULT_CAP);
    let mut entries = Vec::new();
    let mut rows = Vec::new();
    let mut push =
        |label: String, skel: Skeleton, refined: Option<Skeleton>, rows: &mut Vec<Vec<Cell>>| {
            let terms = |s: &Skeleton| -> String {
                let labels: Vec<String> = s
                    .terms()
                    .into_iter()
                    .map(|(g, p)| slot_label(&Slot::new(g, p)))
                    .collect();
                if labels.is_empty() {
                    "0".into()
                } else {
                    labels.join(" + ")
                }
            };
            rows.push(vec![
                text(&label),
                text(skel.parity),
                text(skel.kind),
                text(terms(&skel)),
                text(refined.as_ref().map(terms).unwrap_or_default()),
            ]);
            let mut e = json!({ "stratum": label, "skeleton": to_value(&skel) });
            if let Some(r) = refined {
                e["geometric"] = to_value(&r);
            }
            entries.push(e);
        };
    if d.manifold.edges.is_empty() {
        for kind in [TraceKind::Trace, TraceKind::OddTrace] {
            push(
                "interior".into(),
                smooth_skeleton(m, kind, cap),
                None,
                &mut rows,
            );
        }
    }
    for (i, e) in d.manifold.edges.iter().enumerate() {
        let parities = match operator_parity(&d.operator, m, e.b)? {
            OperatorParity::Even => vec![Parity::Even],
            OperatorParity::Odd => vec![Parity::Odd],
            OperatorParity::Unclassified => vec![Parity::Even, Parity::Odd],
        };
        for parity in parities {
            for kind in [TraceKind::Trace, TraceKind::OddTrace] {
                let skel = heat_trace_family(m, e.b, e.f, parity, kind).map_err(|err| {
                    Failure::Validation {
                        message: err.to_string(),
                        stratum: Some(format!("edges[{i}] (b={}, f={})", e.b, e.f)),
                    }
                })?;
                let refined = (kind == TraceKind::OddTrace && d.operator.kind.is_geometric())
                    .then(|| geometric_vanishing(&skel, d.operator.kind))
                    .transpose()
                    .map_err(|err| Failure::invalid(err.to_string()))?;
                push(format!("edges[{i}]"), skel, refined, &mut rows);
            }
        }
    }
    Ok(Report {
        json: json!({ "m": m, "cap": fmt_rational(&cap), "skeletons": entries }),
        headers: vec!["stratum", "parity", "kind", "terms", "geometric"],
        rows,
    })
}

fn spectrum(ctx: &Context, output: Option<&Path>) -> Result<Report, Failure> {
    let spec = ctx.spectrum()?;
    if let Some(path) = output {
        write_spectrum_csv(&spec, path)?;
    }
    let rows = spec
        .entries
        .iter()
        .map(|e| vec![Cell::Num(e.lambda), text(e.multiplicity)])
        .collect();
    let json = json!({
        "kernel_dim": spec.kernel_dim,
        "cutoff": spec.cutoff.is_finite().then_some(spec.cutoff),
        "total_multiplicity": spec.total_multiplicity(),
        "symmetric": spec.is_symmetric(),
        "tail": to_value(&spec.tail),
        "lattice": to_value(&spec.lattice),
        "entries": to_value(&spec.entries),
    });
    Ok(Report {
        json,
        headers: vec!["lambda", "multiplicity"],
        rows,
    })
}

fn trace(ctx: &Context, which: Which, terms: usize) -> Result<Report, Failure> {
    let spec = ctx.spectrum()?;
    let m = ctx.descriptor()?.manifold.m as i64;
    let floor = min_time(&spec);
    let t_max = ctx.config.tmax.unwrap_or(1e-1);
    let t_min = ctx.config.tmin.unwrap_or(floor.min(t_max / 10.0));
    let per_decade = ctx.config.points.unwrap_or(20);
    let grid = log_grid(t_min, t_max, per_decade);
    // keep what the cutoff supports; the rest is reported as a failure
    let supported: Vec<f64> = grid.iter().copied().filter(|&t| t >= floor).collect();
    let mut kinds = Vec::new();
    if which != Which::Odd {
        kinds.push(("heat", TraceFunction::Heat));
    }
    if which != Which::Heat {
        kinds.push(("odd", TraceFunction::OddHeat));
    }
    let mut json = json!({ "t_min_supported": floor, "points_per_decade": per_decade });
    let mut series: Vec<Vec<TraceSample>> = Vec::new();
    let mut failure: Option<Failure> = None;
    for (name, f) in &kinds {
        let samples = sample_traces(&spec, &supported, *f)?;
        json[*name] = json!({ "samples": to_value(&samples) });
        let template = match f {
            TraceFunction::Heat => {
                power_template(&(0..terms as i64).map(|k| rat(k - m, 2)).collect::<Vec<_>>())
            }
            TraceFunction::OddHeat => template_from_skeleton(&ctx.odd_skeleton()?, terms),
        };
        match fit_expansion(&samples, &template) {
            Ok(model) => json[*name]["fit"] = to_value(&model),
            Err(e) => failure = failure.or(Some(e.into())),
        }
        series.push(samples);
    }
    if supported.len() < grid.len() {
        failure = failure.or(Some(Failure::numerical(
            HeatError::TailUnbounded {
                t: grid[0],
                t_min: floor,
                cutoff: spec.cutoff,
            }
            .to_string(),
        )));
    }
    if let Some(f) = failure {
        return Err(f.with_partial(json));
    }
    let mut headers = vec!["t"];
    for (name, _) in &kinds {
        headers.push(name);
        headers.push(if *name == "heat" {
            "heat_bound"
        } else {
            "odd_bound"
        });
    }
    let rows = supported
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            let mut r = vec![Cell::Num(t)];
            for s in &series {
                r.push(Cell::Num(s[i].value));
                r.push(Cell::Num(s[i].truncation_bound));
            }
            r
        })
        .collect();
    Ok(Report {
        json,
        headers,
        rows,
    })
}

fn eta(ctx: &Context) -> Result<Report, Failure> {
    let spec = ctx.spectrum()?;
    let skel = ctx.odd_skeleton()?;
    let result = eta_auto(&spec, &skel, &ctx.eta_options())?;
    let rows = vec![vec![
        opt_num(result.value),
        Cell::Num(result.error_bound),
        text(to_value(&result.method).as_str().unwrap_or_default()),
        text(result.regular),
    ]];
    Ok(Report {
        json: to_value(&result),
        headers: vec!["eta", "error_bound", "method", "regular"],
        rows,
    })
}

fn rho(ctx: &Context) -> Result<Report, Failure> {
    let d = ctx.descriptor()?;
    let t = d
        .twists
        .ok_or_else(|| Failure::invalid("descriptor has no \"twists\" entry"))?;
    let status = classify_rho(&d.manifold, &d.operator, t.ranks)?;
    let aps = rho_aps(t.alpha, t.beta)?;
    let cg = rho_cheeger_gromov_model(t.alpha)?;
    let rows = [&aps, &cg]
        .iter()
        .map(|r| {
            vec![
                text(to_value(&r.flavor).as_str().unwrap_or_default()),
                Cell::Num(r.value),
                Cell::Num(r.error_bound),
                Cell::Num(r.components.0),
                Cell::Num(r.components.1),
            ]
        })
        .collect();
    Ok(Report {
        json: json!({ "status": to_value(&status), "aps": to_value(&aps), "cheeger_gromov": to_value(&cg) }),
        headers: vec!["flavor", "rho", "error_bound", "first", "second"],
        rows,
    })
}

fn mellin(ctx: &Context, s_values: &[f64]) -> Result<Report, Failure> {
    let spec = ctx.spectrum()?;
    let tol = ctx.config.tol.unwrap_or(1e-4);
    let mut opts = MellinOptions::default();
    if let Some(p) = ctx.config.points {
        opts.points_per_decade = p;
    }
    let mut checks = Vec::new();
    for &s in s_values {
        match mellin_check(&spec, s, opts) {
            Ok(c) => checks.push(c),
            Err(e) => {
                return Err(Failure::from(e).with_partial(json!({ "checks": to_value(&checks) })))
            }
        }
    }
    let pass = checks.iter().all(|c| c.difference.abs() <= tol);
    let rows = checks
        .iter()
        .map(|c| {
            vec![
                Cell::Num(c.s),
                Cell::Num(c.lhs),
                Cell::Num(c.rhs),
                Cell::Num(c.difference),
                Cell::Num(c.lhs_error),
                text(c.difference.abs() <= tol),
            ]
        })
        .collect();
    Ok(Report {
        json: json!({ "tol": tol, "pass": pass, "checks": to_value(&checks) }),
        headers: vec!["s", "lhs", "rhs", "difference", "lhs_error", "pass"],
        rows,
    })
}

fn witt(ctx: &Context) -> Result<Report, Failure> {
    let d = ctx.descriptor()?;
    let tol = ctx.config.tol.unwrap_or(WITT_TOLERANCE);
    let mut links: Vec<(String, &LinkSpectrum)> = d
        .manifold
        .edges
        .iter()
        .enumerate()
        .filter_map(|(i, e)| {
            e.link_spectrum
                .as_ref()
                .map(|l| (format!("edges[{i}] (b={}, f={})", e.b, e.f), l))
        })
        .collect();
    if let Some(SpectrumSource::SpinCone { link, .. }) = &d.spectrum {
        links.push(("spectrum.spin_cone.link".into(), link));
    }
    let mut entries = Vec::new();
    let mut rows = Vec::new();
    for (label, link) in links {
        let report = witt_check_with(&d.operator, link, tol);
        let scaling = (!report.pass).then(|| suggest_scaling(&d.operator, link));
        let mut e = json!({ "stratum": label, "report": to_value(&report) });
        match &scaling {
            Some(Ok(c)) => e["suggested_scaling"] = json!(c),
            Some(Err(err)) => e["scaling_error"] = json!(err.to_string()),
            None => {}
        }
        rows.push(vec![
            text(&label),
            text(report.pass),
            opt_num(report.witness),
            Cell::Num(report.gap_radius),
            opt_num(scaling.and_then(Result::ok)),
        ]);
        entries.push(e);
    }
    let pass = entries.iter().all(|e| e["report"]["pass"] == json!(true));
    Ok(Report {
        json: json!({ "pass": pass, "links": entries }),
        headers: vec![
            "stratum",
            "pass",
            "witness",
            "gap_radius",
            "suggested_scaling",
        ],
        rows,
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Validation { message, stratum }) => {
            let diag = json!({ "error": "validation", "message": message, "stratum": stratum });
            eprint!("{}", to_json_string(&diag));
            ExitCode::from(2)
        }
        Err(Failure::Numerical { message, partial }) => {
            let out = json!({ "status": "numerical_failure", "error": message, "partial": true, "results": partial });
            print!("{}", to_json_string(&out));
            eprintln!("edge-eta: numerical failure: {message}");
            ExitCode::from(3)
        }
        Err(Failure::Io(message)) => {
            eprintln!("edge-eta: {message}");
            ExitCode::from(1)
        }
    }
}
