//! Command-line front end: system files in, JSON reports and CSV data out.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use thiserror::Error;

use torint::certify::{self, CertifyError, CertifyOptions, Tag};
use torint::constructions::{
    self, ConstructionError, ConstructionOptions, ConstructionOutcome,
};
use torint::expr::{parse, Expr, ParseError};
use torint::flow::{self, FlowError, ReturnTimeClass};
use torint::fourier::Axis;
use torint::geometry::{FiberedSystem, GeometryError, OneForm2, VectorField2, VolumeForm2};
use torint::search::{self, SearchError, SearchOptions, SearchResult};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_FAIL: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: invalid system file: {source}")]
    Json {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error("{path}: {field}: {source}\n  {text}\n  {caret}^", caret = " ".repeat(source.position()))]
    Expr {
        path: PathBuf,
        field: String,
        text: String,
        source: ParseError,
    },
    #[error("{path}: {source}")]
    System {
        path: PathBuf,
        source: GeometryError,
    },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Certify(#[from] CertifyError),
    #[error(transparent)]
    Construction(#[from] ConstructionError),
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error(transparent)]
    Flow(#[from] FlowError),
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    pub dx: String,
    pub dy: String,
}

#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ClaimsSpec {
    #[serde(default)]
    pub symmetries: Vec<FieldSpec>,
    pub one_form: Option<FieldSpec>,
    pub g: Option<String>,
    pub h: Option<String>,
    pub lambda: Option<String>,
    #[serde(rename = "Y")]
    pub y: Option<FieldSpec>,
}

/// The JSON system file.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SystemFile {
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub m: usize,
    #[serde(rename = "U", default)]
    pub u: Vec<[f64; 2]>,
    #[serde(rename = "X")]
    pub x: FieldSpec,
    #[serde(default)]
    pub first_integrals: Vec<String>,
    pub volume_density: Option<String>,
    #[serde(default)]
    pub claims: ClaimsSpec,
}

/// A system file with every expression parsed.
#[derive(Clone, Debug)]
pub struct LoadedSystem {
    pub path: PathBuf,
    pub system: FiberedSystem,
    pub symmetries: Vec<VectorField2>,
    pub one_form: Option<OneForm2>,
    pub g: Option<Expr>,
    pub h: Option<Expr>,
    pub lambda: Option<Expr>,
    pub y: Option<VectorField2>,
}

impl LoadedSystem {
    pub fn volume(&self) -> VolumeForm2 {
        self.system.volume.clone().unwrap_or_else(VolumeForm2::standard)
    }
}

pub fn load_system(path: &Path) -> Result<LoadedSystem, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let file: SystemFile = serde_json::from_str(&text).map_err(|source| CliError::Json {
        path: path.to_path_buf(),
        source,
    })?;
    file.resolve(path)
}

impl SystemFile {
    pub fn resolve(&self, path: &Path) -> Result<LoadedSystem, CliError> {
        let m = self.m;
        let expr = |field: &str, text: &str| -> Result<Expr, CliError> {
            parse(text, m).map_err(|source| CliError::Expr {
                path: path.to_path_buf(),
                field: field.to_string(),
                text: text.to_string(),
                source,
            })
        };
        let vf = |field: &str, f: &FieldSpec| -> Result<VectorField2, CliError> {
            Ok(VectorField2::new(
                expr(&format!("{field}.dx"), &f.dx)?,
                expr(&format!("{field}.dy"), &f.dy)?,
            ))
        };
        let field = vf("X", &self.x)?;
        let integrals = self
            .first_integrals
            .iter()
            .enumerate()
            .map(|(i, s)| expr(&format!("first_integrals[{i}]"), s))
            .collect::<Result<Vec<_>, _>>()?;
        let volume = match &self.volume_density {
            Some(s) => Some(VolumeForm2::new(expr("volume_density", s)?)),
            None => None,
        };
        let bounds = self.u.iter().map(|b| (b[0], b[1])).collect();
        let system = FiberedSystem::new(m, bounds, field, integrals, volume).map_err(|source| {
            CliError::System {
                path: path.to_path_buf(),
                source,
            }
        })?;
        let c = &self.claims;
        let opt = |field: &str, s: &Option<String>| s.as_ref().map(|t| expr(field, t)).transpose();
        Ok(LoadedSystem {
            path: path.to_path_buf(),
            system,
            symmetries: c
                .symmetries
                .iter()
                .enumerate()
                .map(|(i, f)| vf(&format!("claims.symmetries[{i}]"), f))
                .collect::<Result<_, _>>()?,
            one_form: c
                .one_form
                .as_ref()
                .map(|f| -> Result<OneForm2, CliError> {
                    Ok(OneForm2::new(
                        expr("claims.one_form.dx", &f.dx)?,
                        expr("claims.one_form.dy", &f.dy)?,
                    ))
                })
                .transpose()?,
            g: opt("claims.g", &c.g)?,
            h: opt("claims.h", &c.h)?,
            lambda: opt("claims.lambda", &c.lambda)?,
            y: c.y.as_ref().map(|f| vf("claims.Y", f)).transpose()?,
        })
    }
}

#[derive(Debug, Parser)]
#[command(name = "torint", version, about = "Integrability diagnostics for vector fields on fibered 2-tori")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Debug, Args)]
pub struct Common {
    /// System file (JSON).
    pub system: PathBuf,
    /// Collocation grid size for checks and searches.
    #[arg(long)]
    pub grid: Option<usize>,
    /// Fourier band K of the searches.
    #[arg(long)]
    pub band: Option<usize>,
    /// Residual tolerance for hypothesis and conclusion checks.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Relative singular-value threshold of the kernel searches.
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Local error bound of the integrator.
    #[arg(long)]
    pub ode_tol: Option<f64>,
    /// Integration horizon (rotation, drift validation).
    #[arg(long)]
    pub horizon: Option<f64>,
    /// Number of initial conditions (sections, rotation, drift validation).
    #[arg(long)]
    pub seeds: Option<usize>,
    /// Fiber point c_1,...,c_m; defaults to the center of U.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub fiber: Option<Vec<f64>>,
    /// Report path.
    #[arg(long, default_value = "report.json")]
    pub out: PathBuf,
    /// Directory for CSV output.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum AxisArg {
    X,
    Y,
}

impl From<AxisArg> for Axis {
    fn from(a: AxisArg) -> Self {
        match a {
            AxisArg::X => Axis::X,
            AxisArg::Y => Axis::Y,
        }
    }
}

#[derive(Clone, Debug, Subcommand)]
pub enum Command {
    /// Check an invariant volume, the declared first integrals and |X| > 0.
    CheckEj(Common),
    /// Check the claimed symmetries against the declared first integrals.
    CheckB(Common),
    /// Run all searches and sections and tag the system.
    Classify(Common),
    /// Search for dynamical symmetries independent of X.
    FindSymmetry(Common),
    /// Search for nontrivial first integrals.
    FindIntegral(Common),
    /// Search for a positive invariant density.
    FindDensity(Common),
    /// Rotation vector and ratio from several initial conditions.
    Rotation(Common),
    /// Return times to a section and the constant-return-time test.
    Poincare {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "y")]
        axis: AxisArg,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        level: f64,
        /// Returns per seed.
        #[arg(long, default_value_t = flow::SECTION_RETURNS)]
        returns: usize,
    },
    /// Run one of the constructions on the claims of a system file.
    #[command(subcommand)]
    Construct(Construct),
}

#[derive(Clone, Debug, Subcommand)]
pub enum Construct {
    /// Invariant volume from X and a commuting independent Y.
    Volume(Common),
    /// Symmetry from an invariant one-form and volume.
    SymmetryFromForm(Common),
    /// Z = X + h Y from [X,Y] = g Y and X(h) = -g h.
    LiePointI(Common),
    /// Z = h X + Y from [X,Y] = g X and X(h) = -g.
    LiePointIi(Common),
    /// First integral from a volume-preserving pair with [X,Y] = lambda X.
    IntegralFromPair(Common),
}

impl Command {
    pub fn common(&self) -> &Common {
        match self {
            Command::CheckEj(c)
            | Command::CheckB(c)
            | Command::Classify(c)
            | Command::FindSymmetry(c)
            | Command::FindIntegral(c)
            | Command::FindDensity(c)
            | Command::Rotation(c)
            | Command::Poincare { common: c, .. } => c,
            Command::Construct(k) => match k {
                Construct::Volume(c)
                | Construct::SymmetryFromForm(c)
                | Construct::LiePointI(c)
                | Construct::LiePointIi(c)
                | Construct::IntegralFromPair(c) => c,
            },
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Command::CheckEj(_) => "check-ej",
            Command::CheckB(_) => "check-b",
            Command::Classify(_) => "classify",
            Command::FindSymmetry(_) => "find-symmetry",
            Command::FindIntegral(_) => "find-integral",
            Command::FindDensity(_) => "find-density",
            Command::Rotation(_) => "rotation",
            Command::Poincare { .. } => "poincare",
            Command::Construct(k) => match k {
                Construct::Volume(_) => "construct volume",
                Construct::SymmetryFromForm(_) => "construct symmetry-from-form",
                Construct::LiePointI(_) => "construct lie-point-i",
                Construct::LiePointIi(_) => "construct lie-point-ii",
                Construct::IntegralFromPair(_) => "construct integral-from-pair",
            },
        }
    }
}

/// A finished run: the report and whether it passed.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub report: Value,
    pub pass: bool,
    pub summary: String,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.pass {
            EXIT_PASS
        } else {
            EXIT_FAIL
        }
    }
}

/// Report skeleton: every section is present, empty when unused.
struct Report {
    command: &'static str,
    system: String,
    options: Value,
    hypotheses: Value,
    residuals: Value,
    kernel_reports: Vec<Value>,
    rotation: Value,
    sections: Vec<Value>,
    classification: Value,
}

impl Report {
    fn new(command: &'static str, sys: &LoadedSystem, options: Value) -> Self {
        Self {
            command,
            system: sys.path.display().to_string(),
            options,
            hypotheses: json!([]),
            residuals: json!([]),
            kernel_reports: Vec::new(),
            rotation: Value::Null,
            sections: Vec::new(),
            classification: Value::Null,
        }
    }

    fn finish(self, pass: bool, summary: String) -> Outcome {
        let report = json!({
            "tool": "torint",
            "version": env!("CARGO_PKG_VERSION"),
            "command": self.command,
            "system": self.system,
            "options": self.options,
            "hypotheses": self.hypotheses,
            "residuals": self.residuals,
            "kernel_reports": self.kernel_reports,
            "rotation": self.rotation,
            "sections": self.sections,
            "classification": self.classification,
            "result": {
                "pass": pass,
                "exit_code": if pass { EXIT_PASS } else { EXIT_FAIL },
                "summary": summary,
            },
        });
        Outcome {
            report,
            pass,
            summary,
        }
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

/// Resolved numeric settings shared by all commands.
#[derive(Clone, Debug, Serialize)]
struct Settings {
    grid: usize,
    tol: f64,
    fiber: Vec<f64>,
    search: SearchOptions,
    horizon: Option<f64>,
    seeds: Option<usize>,
}

impl Settings {
    fn new(c: &Common, sys: &LoadedSystem) -> Result<Self, CliError> {
        let m = sys.system.m;
        if let Some(f) = &c.fiber {
            if f.len() != m {
                return Err(CliError::Usage(format!(
                    "--fiber has {} values but the system has m = {m}",
                    f.len()
                )));
            }
        }
        let mut search = SearchOptions::default();
        if let Some(g) = c.grid {
            search.grid = g;
        }
        if let Some(b) = c.band {
            search.band = b;
        }
        if let Some(t) = c.threshold {
            search.threshold = t;
        }
        if let Some(t) = c.ode_tol {
            search.integrator_tol = t;
        }
        if let Some(h) = c.horizon {
            search.drift_horizon = h;
        }
        if let Some(n) = c.seeds {
            search.drift_seeds = n;
        }
        let grid = c.grid.unwrap_or(search::DEFAULT_GRID);
        if grid < 4 {
            return Err(CliError::Usage(format!("--grid {grid} is too small")));
        }
        if 2 * search.band > search.grid {
            return Err(CliError::Usage(format!(
                "--band {} needs --grid of at least {}",
                search.band,
                2 * search.band
            )));
        }
        let tol = c.tol.unwrap_or(certify::CHECK_TOL);
        if !(tol > 0.0) {
            return Err(CliError::Usage(format!("--tol must be positive, got {tol}")));
        }
        Ok(Self {
            grid,
            tol,
            fiber: c.fiber.clone().unwrap_or_else(|| sys.system.center()),
            search,
            horizon: c.horizon,
            seeds: c.seeds,
        })
    }

    fn certify(&self) -> CertifyOptions {
        let mut o = CertifyOptions {
            grid: self.grid,
            tol: self.tol,
            fiber: Some(self.fiber.clone()),
            search: self.search,
            ..Default::default()
        };
        if let Some(h) = self.horizon {
            o.rotation_horizon = h;
        }
        if let Some(n) = self.seeds {
            o.section_seeds = n;
        }
        o
    }

    fn construction(&self, sys: &FiberedSystem) -> ConstructionOptions {
        ConstructionOptions {
            grid: self.grid,
            hypothesis_tol: self.tol,
            conclusion_tol: self.tol,
            fibers: Some(self.certify().fibers(sys)),
        }
    }
}

pub fn run(cmd: &Command) -> Result<Outcome, CliError> {
    let common = cmd.common();
    let sys = load_system(&common.system)?;
    let s = Settings::new(common, &sys)?;
    let mut r = Report::new(cmd.name(), &sys, to_value(&s));
    let x = &sys.system.field;
    let outcome = match cmd {
        Command::CheckEj(_) => {
            let mut cert = certify::check_ej(&sys.system, &sys.volume(), &s.certify())?;
            cert.system = r.system.clone();
            if sys.system.volume.is_none() {
                cert.notes.push("no volume_density declared; checked dx^dy".into());
            }
            r.hypotheses = to_value(&cert.verdicts);
            r.residuals = to_value(&cert.residuals);
            r.classification = json!({ "certificate": cert_meta(&cert) });
            let summary = format!("check-ej: {}", pass_word(cert.pass));
            r.finish(cert.pass, summary)
        }
        Command::CheckB(_) => {
            let mut cert = certify::check_b(&sys.system, &sys.symmetries, &s.certify())?;
            cert.system = r.system.clone();
            r.hypotheses = to_value(&cert.verdicts);
            r.residuals = to_value(&cert.residuals);
            r.classification = json!({ "certificate": cert_meta(&cert) });
            let summary = format!("check-b (k = {}): {}", 1 + sys.symmetries.len(), pass_word(cert.pass));
            r.finish(cert.pass, summary)
        }
        Command::Classify(_) => classify(&sys, &s, r, common.csv.as_deref())?,
        Command::FindSymmetry(_) => {
            let res = search::find_symmetries(x, &s.fiber, s.search)?;
            finish_search(r, res, "find-symmetry", "independent symmetries")
        }
        Command::FindIntegral(_) => {
            let res = search::find_first_integrals(x, &s.fiber, s.search)?;
            finish_search(r, res, "find-integral", "first integrals")
        }
        Command::FindDensity(_) => {
            let res = search::find_invariant_density(x, &s.fiber, s.search)?;
            finish_search(r, res, "find-density", "densities")
        }
        Command::Rotation(_) => rotation(&sys, &s, r, common.csv.as_deref())?,
        Command::Poincare {
            axis,
            level,
            returns,
            ..
        } => poincare(&sys, &s, r, (*axis).into(), *level, *returns, common.csv.as_deref())?,
        Command::Construct(k) => construct(k, &sys, &s, r)?,
    };
    Ok(outcome)
}

fn pass_word(pass: bool) -> &'static str {
    if pass {
        "pass"
    } else {
        "fail"
    }
}

fn cert_meta(c: &certify::Certificate) -> Value {
    json!({
        "theorem": c.theorem,
        "system": c.system,
        "claims": c.claims,
        "grid": c.grid,
        "fibers": c.fibers,
        "pass": c.pass,
        "notes": c.notes,
    })
}

fn finish_search(mut r: Report, res: SearchResult, name: &str, what: &str) -> Outcome {
    let found = res.found();
    let summary = format!(
        "{name}: kernel dimension {}, {} {what}",
        res.kernel.dimension,
        if found { "found" } else { "no" }
    );
    r.kernel_reports.push(to_value(&res));
    r.finish(found, summary)
}

fn write_csv<F>(dir: &Path, name: &str, f: F) -> Result<(), CliError>
where
    F: FnOnce(&mut fs::File) -> std::io::Result<()>,
{
    let path = dir.join(name);
    let io = |source| CliError::Io {
        path: path.clone(),
        source,
    };
    fs::create_dir_all(dir).map_err(io)?;
    let mut file = fs::File::create(&path).map_err(io)?;
    f(&mut file).map_err(io)
}

fn classify(sys: &LoadedSystem, s: &Settings, mut r: Report, csv: Option<&Path>) -> Result<Outcome, CliError> {
    let c = certify::classify(&sys.system, &s.certify())?;
    let ev = &c.evidence;
    if let Some(cert) = &ev.ej {
        r.hypotheses = to_value(&cert.verdicts);
        r.residuals = to_value(&cert.residuals);
    }
    r.kernel_reports = vec![
        to_value(&ev.density),
        to_value(&ev.first_integrals),
        to_value(&ev.symmetries),
    ];
    r.rotation = to_value(&ev.rotation);
    r.sections = ev.sections.iter().map(to_value).collect();
    if let Some(dir) = csv {
        for sec in &ev.sections {
            if let Some(sd) = &sec.data {
                let name = match sec.axis {
                    Axis::X => "section_x.csv",
                    Axis::Y => "section_y.csv",
                };
                write_csv(dir, name, |f| sd.write_csv(f))?;
            }
        }
    }
    r.classification = json!({
        "tag": c.tag,
        "reason": c.reason,
        "fiber": c.fiber,
        "band": c.band,
        "cross_consistent": c.cross_consistent,
        "notes": c.notes,
        "volume_certificate": ev.ej.as_ref().map(|c| {
            let mut m = cert_meta(c);
            m["system"] = json!(r.system);
            m
        }),
    });
    let pass = c.tag != Tag::Inconclusive;
    let summary = format!("classify: {}", c.tag);
    Ok(r.finish(pass, summary))
}

fn rotation(sys: &LoadedSystem, s: &Settings, mut r: Report, csv: Option<&Path>) -> Result<Outcome, CliError> {
    let x = &sys.system.field;
    let horizon = s.horizon.unwrap_or(flow::ROTATION_HORIZON);
    let n = s.seeds.unwrap_or(1).max(1);
    let starts: Vec<[f64; 2]> = std::iter::once([0.0, 0.0])
        .chain(search::drift_seeds(n - 1))
        .collect();
    let tol = s.search.integrator_tol;
    let mut estimates = Vec::new();
    for p in &starts {
        estimates.push(flow::rotation_vector(x, &s.fiber, *p, horizon, tol)?);
    }
    if let Some(dir) = csv {
        let traj = flow::integrate(x, &s.fiber, starts[0], horizon, tol)?;
        write_csv(dir, "trajectory.csv", |f| traj.write_csv(f))?;
    }
    let ratios: Vec<f64> = estimates.iter().filter_map(|e| e.ratio).collect();
    let spread = if ratios.is_empty() {
        None
    } else {
        let max = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
        Some(max - min)
    };
    let summary = match ratios.first() {
        Some(q) => format!("rotation: ratio {q:.12} over {} seeds", estimates.len()),
        None => "rotation: y does not complete two turns; time averages only".to_string(),
    };
    r.rotation = json!({
        "horizon": horizon,
        "estimates": estimates,
        "ratio_spread": spread,
    });
    Ok(r.finish(true, summary))
}

fn poincare(
    sys: &LoadedSystem,
    s: &Settings,
    mut r: Report,
    axis: Axis,
    level: f64,
    returns: usize,
    csv: Option<&Path>,
) -> Result<Outcome, CliError> {
    let seeds = s.seeds.unwrap_or(flow::SECTION_SEEDS);
    let sd = flow::poincare_section(
        &sys.system.field,
        &s.fiber,
        axis,
        level,
        seeds,
        returns,
        s.search.integrator_tol,
    )?;
    let verdict = flow::constant_return_time_test(&sd, flow::CONSTANT_RETURN_TOL);
    if let Some(dir) = csv {
        write_csv(dir, "section.csv", |f| sd.write_csv(f))?;
    }
    let pass = verdict.class == ReturnTimeClass::Constant;
    let summary = format!(
        "poincare: {} return times, spread {:.3e}, {}",
        verdict.summary.count,
        verdict.summary.spread,
        to_value(&verdict.class).as_str().unwrap_or_default()
    );
    r.sections.push(json!({
        "axis": axis,
        "level": level,
        "verdict": verdict,
        "min_normal_speed": sd.min_normal_speed,
        "return_map": sd.return_map(),
    }));
    Ok(r.finish(pass, summary))
}

fn require<'a, T>(v: &'a Option<T>, what: &str) -> Result<&'a T, CliError> {
    v.as_ref()
        .ok_or_else(|| CliError::Usage(format!("system file has no claims.{what}")))
}

fn construct(k: &Construct, sys: &LoadedSystem, s: &Settings, mut r: Report) -> Result<Outcome, CliError> {
    let fs = &sys.system;
    let o = s.construction(fs);
    let mut extra = Map::new();
    let out: ConstructionOutcome = match k {
        Construct::Volume(_) => constructions::volume_from_frame(fs, require(&sys.y, "Y")?, &o)?,
        Construct::SymmetryFromForm(_) => {
            let alpha = require(&sys.one_form, "one_form")?;
            let mu = sys.volume();
            let c1 = constructions::check_condition_i(fs, alpha, &mu, &o)?;
            let c2 = constructions::check_condition_ii(fs, alpha, &o)?;
            extra.insert("condition_i".into(), to_value(&c1));
            extra.insert("condition_ii".into(), to_value(&c2));
            constructions::symmetry_from_one_form(fs, alpha, &mu, &o)?
        }
        Construct::LiePointI(_) => constructions::lie_point_combine_i(
            fs,
            require(&sys.y, "Y")?,
            require(&sys.g, "g")?,
            require(&sys.h, "h")?,
            &o,
        )?,
        Construct::LiePointIi(_) => constructions::lie_point_combine_ii(
            fs,
            require(&sys.y, "Y")?,
            require(&sys.g, "g")?,
            require(&sys.h, "h")?,
            &o,
        )?,
        Construct::IntegralFromPair(_) => constructions::first_integral_from_pair(
            fs,
            require(&sys.y, "Y")?,
            &sys.volume(),
            sys.lambda.as_ref(),
            &o,
        )?,
    };
    r.hypotheses = to_value(&out.hypotheses);
    r.residuals = to_value(&out.conclusions);
    let mut cls = Map::new();
    cls.insert("construction".into(), json!(out.construction));
    cls.insert("produced".into(), to_value(&out.produced));
    cls.insert("classification".into(), to_value(&out.classification));
    cls.insert("inconsistent".into(), json!(out.inconsistent));
    cls.insert("notes".into(), to_value(&out.notes));
    cls.extend(extra);
    r.classification = Value::Object(cls);
    let pass = out.pass();
    let mut summary = format!("{}: {}", out.construction, pass_word(pass));
    if let Some(c) = &out.classification {
        summary.push_str(&format!(" ({c})"));
    }
    let failed = out.failed_hypotheses();
    if !failed.is_empty() {
        summary.push_str(&format!("; failed hypotheses: {}", failed.join(", ")));
    }
    Ok(r.finish(pass, summary))
}

/// Write the report with a trailing newline.
pub fn write_report(path: &Path, report: &Value) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(report).expect("report serializes");
    text.push('\n');
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}
