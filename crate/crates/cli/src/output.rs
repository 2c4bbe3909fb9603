//! Report assembly: one JSON value and the matching text lines per command.

use serde_json::{json, Map, Value};

use iwasawa_descent::padic::PadicNumber;
use iwasawa_descent::Error;

/// Bumped whenever a field of the machine-readable report changes meaning.
pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputMode {
    Text,
    Json,
}

pub struct Report {
    pub json: Map<String, Value>,
    pub text: Vec<String>,
    /// False when an asserted identity failed.
    pub ok: bool,
}

impl Report {
    pub fn new() -> Self {
        Report { json: Map::new(), text: Vec::new(), ok: true }
    }

    pub fn set(&mut self, key: &str, v: Value) {
        self.json.insert(key.to_string(), v);
    }

    pub fn line(&mut self, s: impl Into<String>) {
        self.text.push(s.into());
    }

    pub fn fail(&mut self, why: impl Into<String>) {
        self.ok = false;
        self.text.push(format!("FAILED: {}", why.into()));
    }
}

/// A rational matching `x` whose height uses at most half of the known digits.
pub fn small_rational(x: &PadicNumber) -> Option<String> {
    if x.is_zero() {
        return Some("0".into());
    }
    let (a, b) = x.rational_reconstruction()?;
    let height = (a.magnitude() * b.magnitude()).bits() as f64;
    let budget = x.rel_precision() as f64 * (x.prime() as f64).log2() / 2.0;
    if height > budget {
        return None;
    }
    Some(if b == 1.into() { a.to_string() } else { format!("{a}/{b}") })
}

/// `a/b (digits)` when a small rational matches, else the digits alone.
pub fn show(x: &PadicNumber) -> String {
    match small_rational(x) {
        Some(q) if !x.is_zero() => format!("{q} ({x})"),
        _ => x.to_string(),
    }
}

pub fn padic(x: &PadicNumber) -> Value {
    let rational = small_rational(x);
    if x.is_zero() {
        return json!({ "zero": true, "abs_precision": x.abs_precision(), "rational": rational });
    }
    json!({
        "zero": false,
        "valuation": x.valuation(),
        "unit": x.unit_digits().to_string(),
        "rel_precision": x.rel_precision(),
        "abs_precision": x.abs_precision(),
        "rational": rational,
    })
}

/// Exit status for a library error.
pub fn error_code(e: &Error) -> i32 {
    match e {
        Error::Disagreement(_) | Error::MismatchBeyondPrecision(_) => 1,
        Error::Parse(_)
        | Error::Invalid(_)
        | Error::InconsistentDims(_)
        | Error::NotAComplex(_)
        | Error::UnsupportedPrime { .. }
        | Error::UnsupportedCharacterOrder { .. } => 2,
        _ => 3,
    }
}

pub fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::DivisionByZero => "DivisionByZero",
        Error::PrecisionExhausted(_) => "PrecisionExhausted",
        Error::NotASquare(_) => "NotASquare",
        Error::NotAUnit(_) => "NotAUnit",
        Error::IndeterminateAtPrecision(_) => "IndeterminateAtPrecision",
        Error::PoleAtZero => "PoleAtZero",
        Error::NotAComplex(_) => "NotAComplex",
        Error::InconsistentDims(_) => "InconsistentDims",
        Error::MismatchBeyondPrecision(_) => "MismatchBeyondPrecision",
        Error::NotTorsion(_) => "NotTorsion",
        Error::NotSemisimple(_) => "NotSemisimple",
        Error::NotSemisimpleOverR(_) => "NotSemisimpleOverR",
        Error::UnsupportedCharacterOrder { .. } => "UnsupportedCharacterOrder",
        Error::NotSemisimpleAtRho(_) => "NotSemisimpleAtRho",
        Error::MissingComponent(_) => "MissingComponent",
        Error::PoleWindowTooSmall(_) => "PoleWindowTooSmall",
        Error::PoleAtOne => "PoleAtOne",
        Error::NonConvergence(_) => "NonConvergence",
        Error::UnsupportedPrime { .. } => "UnsupportedPrime",
        Error::Disagreement(_) => "Disagreement",
        Error::Parse(_) => "ParseError",
        Error::Invalid(_) => "Invalid",
    }
}

/// Wraps a command's fields in the versioned envelope.
pub fn envelope(command: &str, config: Value, body: Map<String, Value>, ok: bool) -> Value {
    json!({
        "version": FORMAT_VERSION,
        "command": command,
        "config": config,
        "ok": ok,
        "result": Value::Object(body),
    })
}

pub fn error_envelope(command: &str, config: Value, e: &Error) -> Value {
    json!({
        "version": FORMAT_VERSION,
        "command": command,
        "config": config,
        "ok": false,
        "error": { "kind": error_kind(e), "message": e.to_string() },
    })
}
