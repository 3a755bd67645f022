//! Config-driven experiment runner behind the `framelab` binary.
//!
//! A config names an experiment `kind`, a `seed`, and a `parameters` table.
//! It may be TOML or JSON:
//!
//! ```toml
//! kind = "carleson"
//! seed = 7
//!
//! [parameters]
//! alpha = 2.0
//! K = 10
//! orbit_length = 80
//! ```
//!
//! Command-line values take precedence over the file, and the file over the
//! per-kind defaults. Every run yields a [`RunReport`] whose verdicts are named
//! after the invariant they check; [`write_outputs`] stores `report.json`, the
//! kind's CSV tables and JSON artifacts, and `timing.json` (wall time is kept out
//! of `report.json` so that reports are byte-for-byte reproducible).

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::approxrep::{self, ScheduleKind};
use crate::builtins;
use crate::carleson;
use crate::error::{Error, Result};
use crate::frames::{self, Frame};
use crate::hypercyclic;
use crate::linalg;
use crate::orbitrep;
use crate::seqspace::{self, OperatorSpec, SeqVec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Carleson,
    Represent,
    Approximate,
    Hypercyclic,
    Diagnostics,
}

impl Kind {
    pub const ALL: [Kind; 5] = [
        Kind::Carleson,
        Kind::Represent,
        Kind::Approximate,
        Kind::Hypercyclic,
        Kind::Diagnostics,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Kind::Carleson => "carleson",
            Kind::Represent => "represent",
            Kind::Approximate => "approximate",
            Kind::Hypercyclic => "hypercyclic",
            Kind::Diagnostics => "diagnostics",
        }
    }

    fn allowed(self) -> &'static [&'static str] {
        match self {
            Kind::Carleson => &["alpha", "K", "orbit_length", "drop", "samples"],
            Kind::Represent => &["frame", "samples"],
            Kind::Approximate => &["frame", "lambda", "j", "epsilon", "N", "schedule", "samples"],
            Kind::Hypercyclic => &["frame", "a", "j", "epsilon", "sections"],
            Kind::Diagnostics => &["frame", "a", "j", "epsilon", "orbit_length", "sections"],
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Kind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Kind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| config_err("kind", format!("unknown kind `{s}`")))
    }
}

fn config_err(field: &str, reason: impl Into<String>) -> Error {
    Error::Config {
        field: field.to_string(),
        reason: reason.into(),
    }
}

/// Kind-specific parameters; unset fields take per-kind defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Parameters {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(rename = "K", default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orbit_length: Option<usize>,
    /// Number of leading orbit elements removed in the robustness check.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub drop: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    /// Tolerance exponent: `ε = 2^{-j}`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    /// Dyadic exponent with `B ≤ 2^N`.
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<ScheduleKind>,
    /// Builtin call such as `onb(8)`, or a path to a frame JSON file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frame: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sections: Option<Vec<usize>>,
    /// Random vectors drawn for sampled inequality checks.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
}

impl Parameters {
    fn set_fields(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        let mut note = |name, set: bool| {
            if set {
                out.push(name)
            }
        };
        note("alpha", self.alpha.is_some());
        note("K", self.k.is_some());
        note("orbit_length", self.orbit_length.is_some());
        note("drop", self.drop.is_some());
        note("lambda", self.lambda.is_some());
        note("j", self.j.is_some());
        note("epsilon", self.epsilon.is_some());
        note("N", self.n.is_some());
        note("schedule", self.schedule.is_some());
        note("frame", self.frame.is_some());
        note("a", self.a.is_some());
        note("sections", self.sections.is_some());
        note("samples", self.samples.is_some());
        out
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<Kind>,
    #[serde(default)]
    pub parameters: Parameters,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Directory that relative frame paths are resolved against.
    #[serde(skip)]
    pub base_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(kind: Kind) -> Self {
        ExperimentConfig {
            kind: Some(kind),
            ..Default::default()
        }
    }

    /// Parses JSON when the text starts with `{`, TOML otherwise.
    pub fn parse(text: &str) -> Result<Self> {
        let parsed = if text.trim_start().starts_with('{') {
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("config: {e}")))
        } else {
            toml::from_str(text).map_err(|e| Error::Parse(format!("config: {}", e.message())))
        };
        parsed.map_err(|e| match e {
            Error::Parse(msg) => match unknown_field(&msg) {
                Some(field) => config_err(&field, "unknown field"),
                None => Error::Parse(msg),
            },
            other => other,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let mut cfg = Self::parse(&text)?;
        cfg.base_dir = path.parent().map(Path::to_path_buf);
        Ok(cfg)
    }

    /// Applies command-line values; a kind that contradicts the file is an error.
    pub fn with_overrides(mut self, kind: Option<Kind>, output: Option<PathBuf>, seed: Option<u64>) -> Result<Self> {
        if let Some(k) = kind {
            match self.kind {
                Some(existing) if existing != k => {
                    return Err(config_err(
                        "kind",
                        format!("config declares `{existing}` but `{k}` was requested"),
                    ));
                }
                _ => self.kind = Some(k),
            }
        }
        if output.is_some() {
            self.output = output;
        }
        if seed.is_some() {
            self.seed = seed;
        }
        Ok(self)
    }

    pub fn output_dir(&self) -> PathBuf {
        self.output.clone().unwrap_or_else(|| PathBuf::from("framelab-out"))
    }
}

fn unknown_field(msg: &str) -> Option<String> {
    let rest = &msg[msg.find("unknown field `")? + "unknown field `".len()..];
    Some(rest[..rest.find('`')?].to_string())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub invariant: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub kind: Kind,
    pub seed: u64,
    /// Parameters after defaults were filled in.
    pub parameters: Parameters,
    pub measured: serde_json::Value,
    pub verdicts: Vec<Verdict>,
    pub passed: bool,
    #[serde(skip)]
    pub wall_time: Duration,
    /// Extra files `(name, contents)` written next to `report.json`.
    #[serde(skip)]
    pub artifacts: Vec<(String, String)>,
}

impl RunReport {
    pub fn verdict(&self, invariant: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.invariant == invariant)
    }

    pub fn failed(&self) -> Vec<&str> {
        self.verdicts.iter().filter(|v| !v.pass).map(|v| v.invariant.as_str()).collect()
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }
}

struct Checks(Vec<Verdict>);

impl Checks {
    fn add(&mut self, invariant: &str, pass: bool, detail: impl Into<String>) {
        self.0.push(Verdict {
            invariant: invariant.to_string(),
            pass,
            detail: detail.into(),
        });
    }
}

struct Outcome {
    parameters: Parameters,
    measured: serde_json::Value,
    checks: Checks,
    artifacts: Vec<(String, String)>,
}

/// Runs the experiment. Invalid parameters fail before any computation.
pub fn run(config: &ExperimentConfig) -> Result<RunReport> {
    let kind = config.kind.ok_or_else(|| config_err("kind", "missing"))?;
    validate(kind, &config.parameters)?;
    let seed = config.seed.unwrap_or(0);
    let start = Instant::now();
    let ctx = Ctx {
        seed,
        base_dir: config.base_dir.clone(),
    };
    let outcome = match kind {
        Kind::Carleson => run_carleson(&ctx, &config.parameters)?,
        Kind::Represent => run_represent(&ctx, &config.parameters)?,
        Kind::Approximate => run_approximate(&ctx, &config.parameters)?,
        Kind::Hypercyclic => run_hypercyclic(&ctx, &config.parameters)?,
        Kind::Diagnostics => run_diagnostics(&ctx, &config.parameters)?,
    };
    let verdicts = outcome.checks.0;
    Ok(RunReport {
        kind,
        seed,
        parameters: outcome.parameters,
        measured: outcome.measured,
        passed: verdicts.iter().all(|v| v.pass),
        verdicts,
        wall_time: start.elapsed(),
        artifacts: outcome.artifacts,
    })
}

/// Writes `report.json`, the artifacts, and `timing.json` into `dir`.
pub fn write_outputs(report: &RunReport, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("report.json"), report.to_json_string()?)?;
    for (name, contents) in &report.artifacts {
        std::fs::write(dir.join(name), contents)?;
    }
    let timing = json!({ "wall_time_s": report.wall_time.as_secs_f64() });
    std::fs::write(dir.join("timing.json"), serde_json::to_string_pretty(&timing)? + "\n")?;
    Ok(())
}

fn validate(kind: Kind, p: &Parameters) -> Result<()> {
    let allowed = kind.allowed();
    if let Some(field) = p.set_fields().into_iter().find(|f| !allowed.contains(f)) {
        return Err(config_err(field, format!("not a parameter of kind `{kind}`")));
    }
    let positive = |field: &str, v: Option<usize>| match v {
        Some(0) => Err(config_err(field, "must be positive")),
        _ => Ok(()),
    };
    positive("orbit_length", p.orbit_length)?;
    positive("samples", p.samples)?;
    if let Some(alpha) = p.alpha {
        if !(alpha > 1.0) || !alpha.is_finite() {
            return Err(config_err("alpha", format!("must be a finite number > 1, got {alpha}")));
        }
    }
    if let Some(k) = p.k {
        if k < 2 {
            return Err(config_err("K", format!("must be at least 2, got {k}")));
        }
    }
    if let Some(lambda) = p.lambda {
        if !(lambda > 1.0) || !lambda.is_finite() {
            return Err(config_err("lambda", format!("must be a finite number > 1, got {lambda}")));
        }
    }
    if let Some(a) = p.a {
        if !(a > 1.0) || !a.is_finite() {
            return Err(config_err("a", format!("must be a finite number > 1, got {a}")));
        }
    }
    if p.j.is_some() && p.epsilon.is_some() {
        return Err(config_err("epsilon", "give either `j` or `epsilon`, not both"));
    }
    if p.j == Some(0) {
        return Err(config_err("j", "must be positive"));
    }
    if let Some(eps) = p.epsilon {
        if !(eps > 0.0) || !eps.is_finite() {
            return Err(config_err("epsilon", format!("must be a finite number > 0, got {eps}")));
        }
    }
    if p.n == Some(0) {
        return Err(config_err("N", "must be positive"));
    }
    if p.n.is_some() && p.schedule == Some(ScheduleKind::General) {
        return Err(config_err("N", "only used by dyadic schedules"));
    }
    if let Some(sections) = &p.sections {
        if sections.is_empty() {
            return Err(config_err("sections", "must not be empty"));
        }
    }
    if let (Some(drop), Some(m)) = (p.drop, p.orbit_length) {
        if drop >= m {
            return Err(config_err("drop", format!("must be below orbit_length {m}")));
        }
    }
    Ok(())
}

struct Ctx {
    seed: u64,
    base_dir: Option<PathBuf>,
}

impl Ctx {
    fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }

    fn frame(&self, source: &str) -> Result<Frame> {
        if source.contains('(') {
            return builtins::parse_builtin(source).map_err(|e| config_err("frame", e.to_string()));
        }
        let path = match &self.base_dir {
            Some(dir) if Path::new(source).is_relative() => dir.join(source),
            _ => PathBuf::from(source),
        };
        let text =
            std::fs::read_to_string(&path).map_err(|e| config_err("frame", format!("{}: {e}", path.display())))?;
        Frame::from_json_str(&text).map_err(|e| config_err("frame", format!("{}: {e}", path.display())))
    }
}

fn random_vector(rng: &mut ChaCha8Rng, dim: usize) -> Vec<Complex64> {
    (0..dim)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect()
}

fn epsilon_of(p: &Parameters) -> f64 {
    match (p.epsilon, p.j) {
        (Some(e), _) => e,
        (None, Some(j)) => 2f64.powi(-(j as i32)),
        (None, None) => 0.125,
    }
}

fn csv_table(header: &[&str], rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(header).map_err(io)?;
    for row in rows {
        w.write_record(row).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn json_string<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn run_carleson(ctx: &Ctx, p: &Parameters) -> Result<Outcome> {
    let alpha = p.alpha.unwrap_or(2.0);
    let k = p.k.unwrap_or(10);
    let m = p.orbit_length.unwrap_or(80);
    let drop = p.drop.unwrap_or(3).min(m.saturating_sub(1));
    let samples = p.samples.unwrap_or(16);
    let resolved = Parameters {
        alpha: Some(alpha),
        k: Some(k),
        orbit_length: Some(m),
        drop: Some(drop),
        samples: Some(samples),
        ..Default::default()
    };

    let seq = carleson::geometric_lambda(alpha, k)?;
    let ratio = carleson::ratio_test(&seq)?;
    let inf = seq.carleson_inf()?;
    let sys = carleson::build_default_system(&seq)?;
    let orbit = orbitrep::generate_orbit(&sys.op, &sys.phi, m)?;
    let frame = Frame::with_ambient(format!("carleson({alpha},{k},{m})"), orbit.frame.elements().to_vec(), k)?;
    let bounds = frames::frame_bounds(&frame);
    let excess = frames::excess(&frame);
    let dropped = frames::frame_bounds(&frame.slice(drop..m)?);
    let hardy = orbitrep::hardy_intertwine_check(&orbit, m - 1)?;

    let mut rng = ctx.rng();
    let mut worst_low: f64 = f64::INFINITY;
    let mut worst_high: f64 = 0.0;
    for _ in 0..samples {
        let f = SeqVec::from_dense(&random_vector(&mut rng, k));
        let ratio = frame.bessel_sum(&f) / f.norm_sq();
        worst_low = worst_low.min(ratio);
        worst_high = worst_high.max(ratio);
    }
    let sampled_ok = worst_low >= bounds.lower * (1.0 - 1e-9) - bounds.upper * 1e-13
        && worst_high <= bounds.upper * (1.0 + 1e-12);

    let mut rows = Vec::new();
    for len in 1..=m {
        let prefix = frame.slice(0..len)?;
        let b = frames::frame_bounds(&prefix);
        rows.push(vec![
            len.to_string(),
            num(b.ambient_lower()),
            num(b.upper),
            frames::excess(&prefix).to_string(),
        ]);
    }

    let mut checks = Checks(Vec::new());
    checks.add("ratio_test", ratio.passes, format!("c_max = {}", ratio.c_max));
    checks.add("carleson_inf_positive", inf > 0.0, format!("inf = {inf:e}"));
    checks.add(
        "orbit_is_frame",
        bounds.spans_ambient && bounds.lower > 0.0,
        format!("A = {:e}, B = {:e}", bounds.ambient_lower(), bounds.upper),
    );
    checks.add(
        "excess_equals_length_minus_dim",
        m >= k && excess == m - k,
        format!("excess = {excess}, M - K = {}", m as i64 - k as i64),
    );
    checks.add(
        "frame_after_removing_prefix",
        dropped.spans_ambient,
        format!("A = {:e} after removing {drop}", dropped.ambient_lower()),
    );
    checks.add(
        "hardy_intertwining",
        hardy.residual <= 1e-10,
        format!("residual = {:e}", hardy.residual),
    );
    checks.add(
        "frame_inequality_sampled",
        sampled_ok,
        format!("{samples} samples, ratio range [{worst_low:e}, {worst_high:e}]"),
    );

    let measured = json!({
        "c_max": ratio.c_max,
        "ratio_strength": ratio.strength,
        "asymptotics": ratio.asymptotics,
        "carleson_inf": inf,
        "frame_bounds": bounds,
        "excess": excess,
        "dropped": drop,
        "dropped_bounds": dropped,
        "hardy": hardy,
        "sampled_ratio_range": [worst_low, worst_high],
    });
    let artifacts = vec![
        ("bounds.csv".to_string(), csv_table(&["m", "lower", "upper", "excess"], &rows)?),
        ("frame.json".to_string(), frame.to_json_string()? + "\n"),
        ("sequence.json".to_string(), json_string(&seq.to_json())?),
    ];
    Ok(Outcome {
        parameters: resolved,
        measured,
        checks,
        artifacts,
    })
}

fn run_represent(ctx: &Ctx, p: &Parameters) -> Result<Outcome> {
    let source = p.frame.clone().unwrap_or_else(|| "onb(6)".to_string());
    let samples = p.samples.unwrap_or(16);
    let resolved = Parameters {
        frame: Some(source.clone()),
        samples: Some(samples),
        ..Default::default()
    };
    let frame = ctx.frame(&source)?;
    let dual = orbitrep::truncation_dual(&frame)?;
    let rep = orbitrep::representation_operator(&frame, &dual)?;
    let scale = frame.elements().iter().map(SeqVec::norm).fold(1.0, f64::max);

    let op = rep.as_operator();
    let len = frame.len();
    let synth_norm = linalg::spectral_norm(frame.synthesis());
    let mut rng = ctx.rng();
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let mut c = random_vector(&mut rng, len);
        c[len - 1] = Complex64::new(0.0, 0.0);
        let combo = |shift: usize| {
            c.iter()
                .zip(&frame.elements()[shift..])
                .fold(SeqVec::zero(), |acc, (ck, fk)| acc.combine(Complex64::new(1.0, 0.0), fk, *ck))
        };
        let lhs = seqspace::apply(&op, &combo(0))?;
        let c_norm = c.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        worst = worst.max(lhs.sub(&combo(1)).norm() / (synth_norm * c_norm));
    }

    let mut checks = Checks(Vec::new());
    checks.add(
        "representation_residual",
        rep.residual <= 1e-9 * scale,
        format!("residual = {:e}", rep.residual),
    );
    checks.add(
        "kernel_shift_invariance",
        rep.kernel_invariant(),
        format!("distance = {:e}, kernel dim = {}", rep.kernel.distance, rep.kernel.kernel_dim),
    );
    checks.add(
        "norm_within_bounds",
        rep.norm_within_bounds(1e-9),
        format!("|T| = {}, bounds [{}, {}]", rep.norm, rep.norm_bounds.0, rep.norm_bounds.1),
    );
    checks.add(
        "intertwining_sampled",
        worst <= 1e-9,
        format!("{samples} samples, worst relative defect {worst:e}"),
    );

    let measured = json!({
        "frame_label": frame.label(),
        "length": len,
        "frame_bounds": rep.frame_bounds,
        "excess": frames::excess(&frame),
        "norm": rep.norm,
        "norm_bounds": rep.norm_bounds,
        "residual": rep.residual,
        "tail_indicator": rep.tail_indicator,
        "kernel": rep.kernel,
        "sampled_defect": worst,
    });
    let mut rows = Vec::new();
    for (i, row) in rep.matrix.row_iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            if *v != Complex64::new(0.0, 0.0) {
                rows.push(vec![(i + 1).to_string(), (j + 1).to_string(), num(v.re), num(v.im)]);
            }
        }
    }
    let artifacts = vec![
        ("operator.csv".to_string(), csv_table(&["row", "col", "re", "im"], &rows)?),
        ("frame.json".to_string(), frame.to_json_string()? + "\n"),
    ];
    Ok(Outcome {
        parameters: resolved,
        measured,
        checks,
        artifacts,
    })
}

fn run_approximate(ctx: &Ctx, p: &Parameters) -> Result<Outcome> {
    let source = p.frame.clone().unwrap_or_else(|| "onb(8)".to_string());
    let lambda = p.lambda.unwrap_or(std::f64::consts::SQRT_2);
    let schedule = p.schedule.unwrap_or(if lambda == std::f64::consts::SQRT_2 {
        ScheduleKind::Dyadic
    } else {
        ScheduleKind::General
    });
    let samples = p.samples.unwrap_or(16);
    let epsilon = epsilon_of(p);
    let resolved = Parameters {
        frame: Some(source.clone()),
        lambda: Some(lambda),
        j: p.j.or(if p.epsilon.is_none() { Some(3) } else { None }),
        epsilon: p.epsilon,
        n: p.n,
        schedule: Some(schedule),
        samples: Some(samples),
        ..Default::default()
    };
    let frame = ctx.frame(&source)?;
    let r = approxrep::approx_suborbit_pipeline_with(&frame, lambda, epsilon, schedule, p.n)?;
    let report = &r.report;

    let dim = frame.ambient_dim().max(r.approx.ambient_dim());
    let diff = frame.synthesis_in(dim) - r.approx.synthesis_in(dim);
    let mut rng = ctx.rng();
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let c = nalgebra::DVector::from_vec(random_vector(&mut rng, frame.len()));
        worst = worst.max((&diff * &c).norm_squared() / c.norm_squared());
    }

    let mut checks = Checks(Vec::new());
    let failing: Vec<usize> = r.certificates.iter().filter(|c| !c.passes).map(|c| c.k).collect();
    checks.add(
        "per_element_certificates",
        failing.is_empty(),
        format!("{} elements, failing k = {failing:?}", r.certificates.len()),
    );
    checks.add(
        "synthesis_gap_within_sqrt_epsilon",
        report.synthesis_gap <= epsilon.sqrt() + r.tail_bound,
        format!("|U - U~| = {:e}, sqrt(eps) = {:e}", report.synthesis_gap, epsilon.sqrt()),
    );
    checks.add(
        "bounds_within_interval",
        report.bounds_within,
        format!(
            "bounds ({:e}, {:e}) in ({:e}, {:e})",
            report.approx_bounds.0, report.approx_bounds.1, report.bound_interval.0, report.bound_interval.1
        ),
    );
    checks.add(
        "excess_preserved",
        report.excess_match == Some(true),
        format!("excess {} -> {}", report.excess_reference, report.excess_approx),
    );
    checks.add(
        "frame_operator_perturbation",
        report.frame_op_gap <= report.frame_op_bound + 1e-12
            && report.inv_frame_op_gap <= report.inv_frame_op_bound + 1e-12,
        format!(
            "|S - S~| = {:e} <= {:e}, |S^-1 - S~^-1| = {:e} <= {:e}",
            report.frame_op_gap, report.frame_op_bound, report.inv_frame_op_gap, report.inv_frame_op_bound
        ),
    );
    checks.add(
        "approximation_sampled",
        worst <= epsilon * (1.0 + 1e-12),
        format!("{samples} samples, worst |(U - U~)c|^2/|c|^2 = {worst:e}"),
    );

    let rows: Vec<Vec<String>> = r
        .certificates
        .iter()
        .map(|c| {
            vec![
                c.k.to_string(),
                c.alpha.to_string(),
                num(c.error_sq),
                num(c.error_bound),
                num(c.eps_over_2k),
            ]
        })
        .collect();
    let measured = json!({
        "frame_label": frame.label(),
        "epsilon": epsilon,
        "schedule": r.schedule,
        "dyadic": r.dyadic,
        "tail_bound": r.tail_bound,
        "errors": r.certificates,
        "report": report,
        "sampled_gap_sq": worst,
    });
    let artifacts = vec![
        (
            "errors.csv".to_string(),
            csv_table(&["k", "alpha_k", "error_sq", "error_bound", "eps_over_2k"], &rows)?,
        ),
        ("pipeline.json".to_string(), json_string(&r.to_json())?),
        ("approx_frame.json".to_string(), r.approx.to_json_string()? + "\n"),
    ];
    Ok(Outcome {
        parameters: resolved,
        measured,
        checks,
        artifacts,
    })
}

fn section_rows(sections: &[(usize, frames::FrameBounds)]) -> Vec<Vec<String>> {
    sections
        .iter()
        .map(|(n, b)| vec![n.to_string(), b.span_dim.to_string(), num(b.lower), num(b.upper), num(b.ratio())])
        .collect()
}

fn hypercyclic_defaults(p: &Parameters, orbit_length: bool) -> Parameters {
    Parameters {
        frame: Some(p.frame.clone().unwrap_or_else(|| "onb(10)".to_string())),
        a: Some(p.a.unwrap_or(2.0)),
        j: p.j.or(if p.epsilon.is_none() { Some(3) } else { None }),
        epsilon: p.epsilon,
        sections: Some(p.sections.clone().unwrap_or_else(|| vec![20, 200])),
        orbit_length: if orbit_length {
            Some(p.orbit_length.unwrap_or(50))
        } else {
            None
        },
        ..Default::default()
    }
}

fn run_hypercyclic(ctx: &Ctx, p: &Parameters) -> Result<Outcome> {
    let resolved = hypercyclic_defaults(p, false);
    let (a, epsilon) = (resolved.a.unwrap_or(2.0), epsilon_of(p));
    let frame = ctx.frame(resolved.frame.as_deref().unwrap_or_default())?;
    let plan = hypercyclic::plan_hypercyclic_vector(frame.elements(), a, epsilon)?;
    let suborbit = plan.suborbit()?;
    let check = frames::epsilon_approx_check(&frame, &suborbit, epsilon)?;
    let sections = hypercyclic::orbit_section_bounds(&plan.phi, a, resolved.sections.as_deref().unwrap_or_default())?;
    let scale = frame.elements().iter().map(SeqVec::norm).fold(1.0, f64::max);

    let mut checks = Checks(Vec::new());
    checks.add(
        "certified_errors_within_tolerance",
        plan.within_tolerances(),
        format!("errors {:?}", plan.certified_errors),
    );
    checks.add(
        "exact_on_support",
        plan.on_support_defect <= 1e-12 * scale,
        format!("defect = {:e}", plan.on_support_defect),
    );
    checks.add(
        "suborbit_epsilon_approximation",
        check.verdict,
        format!("|U - U~| = {:e}", check.synthesis_gap),
    );
    checks.add(
        "excess_preserved",
        check.excess_match == Some(true),
        format!("excess {} -> {}", check.excess_reference, check.excess_approx),
    );

    let measured = json!({
        "frame_label": frame.label(),
        "epsilon": epsilon,
        "alphas": plan.alphas,
        "certified_errors": plan.certified_errors,
        "leakage_bounds": plan.leakage_bounds,
        "tolerances": plan.tolerances(),
        "on_support_defect": plan.on_support_defect,
        "approximation": check,
        "sections": sections.iter().map(|(n, b)| json!({"n": n, "bounds": b, "ratio": b.ratio()})).collect::<Vec<_>>(),
    });
    let artifacts = vec![
        ("plan.json".to_string(), json_string(&plan.to_json())?),
        (
            "sections.csv".to_string(),
            csv_table(&["n", "span_dim", "lower", "upper", "ratio"], &section_rows(&sections))?,
        ),
    ];
    Ok(Outcome {
        parameters: resolved,
        measured,
        checks,
        artifacts,
    })
}

fn run_diagnostics(ctx: &Ctx, p: &Parameters) -> Result<Outcome> {
    let resolved = hypercyclic_defaults(p, true);
    let (a, epsilon) = (resolved.a.unwrap_or(2.0), epsilon_of(p));
    let n_max = resolved.orbit_length.unwrap_or(50);
    let section_list = resolved.sections.clone().unwrap_or_default();
    let frame = ctx.frame(resolved.frame.as_deref().unwrap_or_default())?;

    let isometry = orbitrep::decay_diagnostic(&OperatorSpec::RightShift, &SeqVec::basis(1), n_max)?;
    let contraction = orbitrep::decay_diagnostic(&OperatorSpec::scaled_right_shift(a)?, &SeqVec::basis(1), n_max)?;
    let plan = hypercyclic::plan_hypercyclic_vector(frame.elements(), a, epsilon)?;
    let sections = hypercyclic::orbit_section_bounds(&plan.phi, a, &section_list)?;
    let first = sections.first().map(|(_, b)| b.ratio()).unwrap_or(f64::NAN);
    let last = sections.last().map(|(_, b)| b.ratio()).unwrap_or(f64::NAN);
    let growth = last / first;

    let mut checks = Checks(Vec::new());
    checks.add(
        "isometry_orbit_norms_constant",
        isometry.trend == orbitrep::Trend::Constant,
        format!("trend {:?}", isometry.trend),
    );
    checks.add(
        "contraction_orbit_norms_decrease",
        contraction.trend == orbitrep::Trend::StrictlyDecreasing,
        format!("trend {:?}", contraction.trend),
    );
    checks.add(
        "section_condition_growth",
        sections.len() < 2 || growth >= 10.0,
        format!("B/A grows by {growth:e} across sections {section_list:?}"),
    );

    let rows: Vec<Vec<String>> = (0..=n_max)
        .map(|n| vec![n.to_string(), num(isometry.norms[n]), num(contraction.norms[n])])
        .collect();
    let measured = json!({
        "isometry": isometry,
        "contraction": contraction,
        "alphas": plan.alphas,
        "sections": sections.iter().map(|(n, b)| json!({"n": n, "bounds": b, "ratio": b.ratio()})).collect::<Vec<_>>(),
        "section_ratio_growth": growth,
    });
    let artifacts = vec![
        (
            "decay.csv".to_string(),
            csv_table(&["n", "right_shift_norm", "scaled_right_shift_norm"], &rows)?,
        ),
        (
            "sections.csv".to_string(),
            csv_table(&["n", "span_dim", "lower", "upper", "ratio"], &section_rows(&sections))?,
        ),
    ];
    Ok(Outcome {
        parameters: resolved,
        measured,
        checks,
        artifacts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_kind(kind: Kind, params: Parameters) -> RunReport {
        let cfg = ExperimentConfig {
            kind: Some(kind),
            parameters: params,
            ..Default::default()
        };
        run(&cfg).unwrap()
    }

    #[test]
    fn parses_toml_and_json() {
        let toml_cfg = ExperimentConfig::parse("kind = \"carleson\"\nseed = 3\n[parameters]\nalpha = 2.0\nK = 10\n").unwrap();
        let json_cfg =
            ExperimentConfig::parse(r#"{"kind": "carleson", "seed": 3, "parameters": {"alpha": 2.0, "K": 10}}"#).unwrap();
        assert_eq!(toml_cfg, json_cfg);
        assert_eq!(toml_cfg.parameters.k, Some(10));
    }

    #[test]
    fn unknown_and_misplaced_fields_are_named() {
        let err = ExperimentConfig::parse("kind = \"carleson\"\n[parameters]\nalpah = 2.0\n").unwrap_err();
        assert!(matches!(&err, Error::Config { field, .. } if field == "alpah"), "{err}");
        let cfg = ExperimentConfig::parse("kind = \"represent\"\n[parameters]\nalpha = 2.0\n").unwrap();
        let err = run(&cfg).unwrap_err();
        assert!(matches!(&err, Error::Config { field, .. } if field == "alpha"), "{err}");
        let cfg = ExperimentConfig::parse("kind = \"carleson\"\n[parameters]\nK = 1\n").unwrap();
        assert!(matches!(run(&cfg), Err(Error::Config { field, .. }) if field == "K"));
    }

    #[test]
    fn overrides_take_precedence() {
        let cfg = ExperimentConfig::parse("kind = \"carleson\"\nseed = 3\n").unwrap();
        let cfg = cfg.with_overrides(Some(Kind::Carleson), Some("x".into()), Some(9)).unwrap();
        assert_eq!((cfg.seed, cfg.output_dir()), (Some(9), PathBuf::from("x")));
        let err = ExperimentConfig::new(Kind::Represent).with_overrides(Some(Kind::Carleson), None, None);
        assert!(matches!(err, Err(Error::Config { field, .. }) if field == "kind"));
    }

    #[test]
    fn carleson_example() {
        let r = run_kind(
            Kind::Carleson,
            Parameters {
                alpha: Some(2.0),
                k: Some(10),
                orbit_length: Some(80),
                ..Default::default()
            },
        );
        assert!(r.passed, "{:?}", r.failed());
        assert_eq!(r.measured["excess"], 70);
        assert_eq!(r.measured["c_max"], 0.5);
        assert!(r.measured["frame_bounds"]["lower"].as_f64().unwrap() > 0.0);
    }

    #[test]
    fn approximate_example() {
        let r = run_kind(
            Kind::Approximate,
            Parameters {
                frame: Some("onb(8)".into()),
                j: Some(3),
                ..Default::default()
            },
        );
        assert!(r.passed, "{:?}", r.failed());
        assert!(r.artifacts.iter().any(|(n, _)| n == "errors.csv"));
    }

    #[test]
    fn represent_example() {
        let r = run_kind(Kind::Represent, Parameters::default());
        assert!(r.passed, "{:?}", r.failed());
        assert_eq!(r.measured["residual"], 0.0);
        assert_eq!(r.measured["norm"], 1.0);
    }

    #[test]
    fn represent_flags_duplicates() {
        let dir = tempfile::tempdir().unwrap();
        let f = Frame::new(
            "dup",
            vec![SeqVec::basis(1), SeqVec::basis(1), SeqVec::basis(2), SeqVec::basis(3)],
        )
        .unwrap();
        std::fs::write(dir.path().join("dup.json"), f.to_json_string().unwrap()).unwrap();
        let cfg = ExperimentConfig {
            kind: Some(Kind::Represent),
            parameters: Parameters {
                frame: Some("dup.json".into()),
                ..Default::default()
            },
            base_dir: Some(dir.path().to_path_buf()),
            ..Default::default()
        };
        let r = run(&cfg).unwrap();
        assert!(!r.passed);
        assert!(r.failed().contains(&"kernel_shift_invariance"));
    }

    #[test]
    fn hypercyclic_and_diagnostics_pass() {
        assert!(run_kind(Kind::Hypercyclic, Parameters::default()).passed);
        let r = run_kind(Kind::Diagnostics, Parameters::default());
        assert!(r.passed, "{:?}", r.failed());
    }

    #[test]
    fn report_is_deterministic() {
        let params = Parameters {
            k: Some(6),
            orbit_length: Some(20),
            ..Default::default()
        };
        let a = run_kind(Kind::Carleson, params.clone()).to_json_string().unwrap();
        let b = run_kind(Kind::Carleson, params).to_json_string().unwrap();
        assert_eq!(a, b);
        assert!(!a.contains("wall_time"));
    }
}
