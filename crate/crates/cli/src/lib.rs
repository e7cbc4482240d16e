//! Command implementations behind the `berkdyn` binary.
//!
//! Every command returns an [`Outcome`]: the text to print and the exit code.
//! Exit codes are 0 on success, 1 when a certificate is rejected and 2 on
//! input or arithmetic errors.

use std::fmt::Write as _;
use std::io::Read as _;
use std::path::{Path, PathBuf};

use berkdyn_core::berk_points::{BerkPoint, Interval};
use berkdyn_core::entropy::{
    first_return_gf, gurevich_entropy, gurevich_entropy_at, measure_entropy, solve_masses, truncation_profile,
    verify_interval_null, AlgebraicLog, ExactLogCombo, MeasureSolution, QPoly, RatFn,
};
use berkdyn_core::ext_field::FieldSpec;
use berkdyn_core::julia_struct::{
    build_partition, emit_dendrite, piece_degree, verify_infinite_branching, verify_theorem_a, MarkovSystem,
    TheoremACertificate, TheoremAReport,
};
use berkdyn_core::map_action::RationalMap;
use berkdyn_core::rational::format_rational;
use serde_json::{json, Value};
use thiserror::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_REJECTED: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

/// Environment variable overriding the bundled example directory.
pub const EXAMPLES_ENV: &str = "BERKDYN_EXAMPLES";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },

    #[error("{0}: invalid JSON: {1}")]
    Json(String, serde_json::Error),

    #[error("{0}")]
    Config(String),

    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Core(#[from] berkdyn_core::error::Error),
}

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Json,
    Text,
    Dot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Which {
    Measure,
    Topological,
    #[default]
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Method {
    #[default]
    Gf,
    Truncate,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Self { code: EXIT_OK, stdout }
    }
}

/// The bundled example directory, or the one named by `BERKDYN_EXAMPLES`.
pub fn examples_dir() -> PathBuf {
    std::env::var_os(EXAMPLES_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| Path::new(env!("CARGO_MANIFEST_DIR")).join("data"))
}

/// Reads a document from a file, or from stdin when `path` is `-`.
pub fn read_document(path: &str) -> Result<Value> {
    let text = if path == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|source| CliError::Io { path: "<stdin>".into(), source })?;
        s
    } else {
        std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.into(), source })?
    };
    serde_json::from_str(&text).map_err(|e| CliError::Json(path.into(), e))
}

/// Parses an argument that is either inline JSON, `-` for stdin, or a path.
pub fn read_inline(arg: &str) -> Result<Value> {
    let t = arg.trim_start();
    if t.starts_with('{') || t.starts_with('[') {
        serde_json::from_str(arg).map_err(|e| CliError::Json("argument".into(), e))
    } else {
        read_document(arg)
    }
}

/// A field, a map and optional certificate and Markov-system documents.
///
/// ```json
/// { "field": {"p": 3, "e": 6},
///   "map": {"template": "sextic", "a": "3", "b": "-1"},
///   "certificate": "certificate.json",
///   "system": "system.json" }
/// ```
///
/// Relative document paths resolve against the config's directory.
#[derive(Debug, Clone)]
pub struct Session {
    pub field: FieldSpec,
    pub map: RationalMap,
    pub certificate: Option<String>,
    pub system: Option<String>,
}

impl Session {
    pub fn load(path: Option<&str>) -> Result<Self> {
        let path = match path {
            Some(p) => p.to_string(),
            None => examples_dir().join("sextic.json").to_string_lossy().into_owned(),
        };
        let base = if path == "-" { None } else { Path::new(&path).parent().map(Path::to_path_buf) };
        Self::from_json(&read_document(&path)?, base.as_deref())
    }

    pub fn from_json(v: &Value, base: Option<&Path>) -> Result<Self> {
        let fv = v.get("field").ok_or_else(|| CliError::Config("config needs a \"field\" object".into()))?;
        let num = |k: &str| {
            fv.get(k)
                .and_then(Value::as_u64)
                .ok_or_else(|| CliError::Config(format!("field needs a positive integer \"{k}\"")))
        };
        let e = u32::try_from(num("e")?).map_err(|_| CliError::Config("ramification index too large".into()))?;
        let field = FieldSpec::new(num("p")?, e)?;
        let map = RationalMap::from_json(
            field,
            v.get("map").ok_or_else(|| CliError::Config("config needs a \"map\" object".into()))?,
        )?;
        let doc = |k: &str| -> Result<Option<String>> {
            match v.get(k) {
                None | Some(Value::Null) => Ok(None),
                Some(Value::String(s)) if s == "-" => Ok(Some(s.clone())),
                Some(Value::String(s)) => {
                    let p = Path::new(s);
                    let full = match base {
                        Some(b) if p.is_relative() => b.join(p),
                        _ => p.to_path_buf(),
                    };
                    Ok(Some(full.to_string_lossy().into_owned()))
                }
                Some(other) => Err(CliError::Config(format!("\"{k}\" must be a path, got {other}"))),
            }
        };
        Ok(Self { field, map, certificate: doc("certificate")?, system: doc("system")? })
    }

    /// The Markov system from `override_path`, the config, or the partition
    /// built from the map, in that order.
    pub fn system(&self, override_path: Option<&str>) -> Result<MarkovSystem> {
        match override_path.map(str::to_string).or_else(|| self.system.clone()) {
            Some(p) => Ok(MarkovSystem::from_json(&read_document(&p)?)?),
            None => Ok(build_partition(&self.map)?),
        }
    }

    pub fn certificate(&self, override_path: Option<&str>) -> Result<TheoremACertificate> {
        let path = override_path
            .map(str::to_string)
            .or_else(|| self.certificate.clone())
            .ok_or_else(|| CliError::Usage("no certificate given and none named by the config".into()))?;
        Ok(TheoremACertificate::from_json(self.field, &read_document(&path)?)?)
    }
}

/// `x` rounded to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// Rounds every float in a JSON document to 12 significant digits.
pub fn round_floats(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(x) = n.as_f64().and_then(|x| serde_json::Number::from_f64(round12(x))) {
                *n = x;
            }
        }
        Value::Array(a) => a.iter_mut().for_each(round_floats),
        Value::Object(o) => o.values_mut().for_each(round_floats),
        _ => {}
    }
}

fn render(mut v: Value, format: Format, text: impl FnOnce(&Value) -> String) -> Result<String> {
    round_floats(&mut v);
    match format {
        Format::Json => Ok(serde_json::to_string_pretty(&v).expect("serializable") + "\n"),
        Format::Text => Ok(text(&v)),
        Format::Dot => Err(CliError::Usage("DOT output is only available for dendrite".into())),
    }
}

fn rat_list(p: &QPoly) -> Value {
    Value::Array(p.coeffs().iter().map(|c| json!(format_rational(c))).collect())
}

fn ratfn_json(f: &RatFn) -> Value {
    json!({ "num": rat_list(&f.num), "den": rat_list(&f.den), "display": f.to_string() })
}

pub fn cmd_point_image(s: &Session, point: &Value, format: Format) -> Result<Outcome> {
    let x = BerkPoint::from_json(s.field, point)?;
    let m = s.map.image_point(&x)?;
    let doc = json!({
        "point": x.to_json(),
        "image": m.image.to_json(),
        "local_degree": m.local_degree,
        "reduction": m.reduction.as_ref().map(|r| r.to_string()),
    });
    let text = format!("{} -> {}  (local degree {})\n", x, m.image, m.local_degree);
    Ok(Outcome::ok(render(doc, format, |_| text)?))
}

pub fn cmd_segment_image(s: &Session, a: &Value, b: &Value, format: Format) -> Result<Outcome> {
    let iv = Interval::new(BerkPoint::from_json(s.field, a)?, BerkPoint::from_json(s.field, b)?)?;
    let img = s.map.image_segment(&iv)?;
    let ends = |i: &Interval| json!([i.a.to_json(), i.b.to_json()]);
    let pieces: Vec<Value> = img
        .pieces
        .iter()
        .map(|p| {
            json!({
                "source": ends(&p.source),
                "image": ends(&p.image),
                "expansion": p.expansion,
                "orientation": p.orientation,
            })
        })
        .collect();
    let mut text = String::new();
    for p in &img.pieces {
        let _ = writeln!(text, "{} -> {}  x{}  orientation {:+}", p.source, p.image, p.expansion, p.orientation);
    }
    Ok(Outcome::ok(render(json!({ "segment": ends(&iv), "pieces": pieces }), format, |_| text)?))
}

fn report_json(rep: &TheoremAReport) -> Value {
    json!({
        "passed": rep.passed(),
        "failures": rep.failures(),
        "checks": {
            "structure": rep.structure,
            "a": rep.a,
            "b": rep.b,
            "c": rep.c,
            "d": rep.d,
        },
    })
}

pub fn cmd_verify(s: &Session, certificate: Option<&str>, format: Format) -> Result<Outcome> {
    let cert = s.certificate(certificate)?;
    let rep = verify_theorem_a(&s.map, &cert)?;
    let mut doc = report_json(&rep);
    if rep.passed() {
        let pieces = cert
            .subdivision
            .iter()
            .map(|p| Ok((p.b, piece_degree(&s.map, &p.interval, p.b)?)))
            .collect::<Result<Vec<_>>>()?;
        let iv_null = verify_interval_null(&pieces, s.map.degree());
        doc["interval_null"] = json!({ "coefficient": format_rational(&iv_null.coefficient), "null": iv_null.null });
    }
    let mut text = String::new();
    for (name, c) in [("structure", &rep.structure), ("a", &rep.a), ("b", &rep.b), ("c", &rep.c), ("d", &rep.d)] {
        let _ = writeln!(text, "{name:>9}: {}  {}", if c.pass { "PASS" } else { "FAIL" }, c.detail);
    }
    let _ = writeln!(text, "{}", if rep.passed() { "certificate accepted" } else { "certificate rejected" });
    let code = if rep.passed() { EXIT_OK } else { EXIT_REJECTED };
    Ok(Outcome { code, stdout: render(doc, format, |_| text)? })
}

const MAX_PERIOD: u32 = 12;

pub fn cmd_branching(s: &Session, point: &Value, period: Option<u32>, format: Format) -> Result<Outcome> {
    let y = BerkPoint::from_json(s.field, point)?;
    let period = match period {
        Some(n) => n,
        None => {
            let mut cur = y.clone();
            let mut found = None;
            for n in 1..=MAX_PERIOD {
                cur = s.map.image_point(&cur)?.image;
                if cur.same_point(&y) {
                    found = Some(n);
                    break;
                }
            }
            found.ok_or(berkdyn_core::error::Error::NotPeriodic)?
        }
    };
    let rep = verify_infinite_branching(&s.map, &y, period)?;
    let doc = json!({ "point": y.to_json(), "period": period, "holds": rep.holds, "class": rep.class, "reduction": rep.reduction });
    let text = format!(
        "{y}: period {period}, return reduction {} ({:?}), infinite branching {}\n",
        rep.reduction,
        rep.class,
        if rep.holds { "holds" } else { "fails" }
    );
    Ok(Outcome::ok(render(doc, format, |_| text)?))
}

pub fn cmd_partition(s: &Session, format: Format) -> Result<Outcome> {
    let sys = build_partition(&s.map)?;
    let mut text = format!("d = {}\n", sys.d);
    for st in &sys.states {
        let _ = writeln!(
            text,
            "{:<8} deg {}  -> {}{}",
            st.name,
            st.degree,
            st.image.join(", "),
            if st.countable { "  (countable)" } else { "" }
        );
    }
    for f in &sys.families {
        let _ =
            writeln!(text, "family {} -> {}: {} x {}^k states at depth k", f.entry, f.target, f.multiplicity, f.branch);
    }
    Ok(Outcome::ok(render(sys.to_json(), format, |_| text)?))
}

pub fn cmd_masses(s: &Session, system: Option<&str>, format: Format) -> Result<Outcome> {
    let sys = s.system(system)?;
    let m = solve_masses(&sys)?;
    let mut text = String::new();
    for (n, q) in &m.core_masses {
        let _ = writeln!(text, "{n:<8} {}", format_rational(q));
    }
    for f in &m.families {
        let _ = writeln!(text, "family {} -> {}: total {}", f.entry, f.target, format_rational(&f.total));
    }
    let _ = writeln!(text, "total    {}", format_rational(&m.total_check));
    Ok(Outcome::ok(render(m.to_json(), format, |_| text)?))
}

#[derive(Debug, Clone, Default)]
pub struct EntropyArgs {
    pub which: Which,
    pub method: Method,
    pub depth: Option<u32>,
    pub system: Option<String>,
    pub state: Option<String>,
}

/// The results document: `h_mu`, `h_top`, `masses` and `checks`, each
/// present when the selected quantities need them.
pub fn entropy_document(sys: &MarkovSystem, args: &EntropyArgs) -> Result<Value> {
    let mut doc = serde_json::Map::new();
    let mut h_mu: Option<(ExactLogCombo, MeasureSolution)> = None;
    if args.which != Which::Topological {
        let m = solve_masses(sys)?;
        let h = measure_entropy(sys, &m);
        doc.insert("h_mu".into(), json!({ "exact": h.to_json(), "display": h.to_string(), "nats": h.nats }));
        h_mu = Some((h, m));
    }
    let mut h_top: Option<AlgebraicLog> = None;
    if args.which != Which::Measure {
        match args.method {
            Method::Gf => {
                let g = match &args.state {
                    Some(st) => gurevich_entropy_at(sys, st)?,
                    None => gurevich_entropy(sys)?,
                };
                doc.insert("h_top".into(), g.to_json());
                h_top = Some(g);
            }
            Method::Truncate => {
                let depth = args.depth.unwrap_or(12);
                let prof = truncation_profile(sys, depth);
                let monotone = prof.windows(2).all(|w| w[0] <= w[1]);
                doc.insert(
                    "h_top".into(),
                    json!({ "method": "truncate", "depths": (0..=depth).collect::<Vec<_>>(), "nats": prof, "monotone": monotone }),
                );
            }
        }
    }
    let mut checks = serde_json::Map::new();
    if let Some((h, m)) = &h_mu {
        doc.insert("masses".into(), m.to_json());
        checks.insert("total_mass".into(), json!(format_rational(&m.total_check)));
        if let Some(g) = &h_top {
            checks.insert("sandwich".into(), json!(h.nats <= g.nats + 1e-9));
        }
    }
    if !checks.is_empty() {
        doc.insert("checks".into(), Value::Object(checks));
    }
    Ok(Value::Object(doc))
}

fn entropy_text(v: &Value) -> String {
    let mut out = String::new();
    if let Some(h) = v.get("h_mu") {
        let _ = writeln!(out, "h_mu  = {} = {}", h["display"].as_str().unwrap_or(""), h["nats"]);
    }
    if let Some(h) = v.get("h_top") {
        if h.get("method").is_some() {
            if let (Some(ds), Some(ns)) = (h["depths"].as_array(), h["nats"].as_array()) {
                for (d, n) in ds.iter().zip(ns) {
                    let _ = writeln!(out, "h_top[depth {d}] = {n}");
                }
            }
        } else {
            let _ = writeln!(
                out,
                "h_top = log λ = {}, λ = {} root of minpoly {} in [{}, {}]",
                h["nats"],
                h["lambda"],
                h["minpoly"],
                h["interval"][0].as_str().unwrap_or(""),
                h["interval"][1].as_str().unwrap_or("")
            );
        }
    }
    if let Some(c) = v.get("checks") {
        let _ = writeln!(out, "checks: {c}");
    }
    out
}

pub fn cmd_entropy(s: &Session, args: &EntropyArgs, format: Format) -> Result<Outcome> {
    let sys = s.system(args.system.as_deref())?;
    Ok(Outcome::ok(render(entropy_document(&sys, args)?, format, entropy_text)?))
}

pub fn cmd_dendrite(s: &Session, system: Option<&str>, depth: usize, format: Format) -> Result<Outcome> {
    let sys = s.system(system)?;
    let d = emit_dendrite(&sys, depth)?;
    let out = match format {
        Format::Dot => d.to_dot(),
        Format::Json => serde_json::to_string_pretty(&d.to_json()).expect("serializable") + "\n",
        Format::Text => {
            let mut t = String::new();
            for n in &d.nodes {
                let _ = writeln!(t, "{}{}", "  ".repeat(n.depth), n.label);
            }
            t
        }
    };
    Ok(Outcome::ok(out))
}

pub fn cmd_shift_gf(s: &Session, system: Option<&str>, state: Option<&str>, format: Format) -> Result<Outcome> {
    let sys = s.system(system)?;
    let state = match state {
        Some(st) => st.to_string(),
        None => {
            let i =
                *sys.uncountable().first().ok_or_else(|| CliError::Usage("system has no uncountable state".into()))?;
            sys.states[i].name.clone()
        }
    };
    let f = first_return_gf(&sys, &state)?;
    let one_minus = RatFn::one().sub(&f);
    let series: Vec<String> = f.series(12).iter().map(format_rational).collect();
    let doc = json!({
        "state": state,
        "first_return": ratfn_json(&f),
        "one_minus_first_return": ratfn_json(&one_minus),
        "series": series,
    });
    let text = format!("F_{state}(z) = {f}\n1 - F(z) = {one_minus}\nseries: {}\n", series.join(", "));
    Ok(Outcome::ok(render(doc, format, |_| text)?))
}

/// Formats an error for stderr and maps it to exit code 2.
pub fn error_outcome(e: &CliError) -> (i32, String) {
    (EXIT_ERROR, format!("berkdyn: error: {e}\n"))
}
