//! Risk register: classification types, validation and the JSON file format.
//!
//! A register is loaded in two steps. [`load_register`] turns the JSON text
//! into a [`RiskRegister`] without checking value ranges, so that the
//! `validate` command can report every problem at once. [`parse_register`]
//! additionally requires the register to pass [`validate_register`].

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use thiserror::Error;

/// Coarse risk areas. `Custom` covers anything outside the built-in list.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RiskKind {
    Technology,
    Cost,
    Schedule,
    Scope,
    People,
    Requirements,
    Estimation,
    Tools,
    Organizational,
    Custom(String),
}

impl RiskKind {
    pub const BUILTIN: [RiskKind; 9] = [
        RiskKind::Technology,
        RiskKind::Cost,
        RiskKind::Schedule,
        RiskKind::Scope,
        RiskKind::People,
        RiskKind::Requirements,
        RiskKind::Estimation,
        RiskKind::Tools,
        RiskKind::Organizational,
    ];

    /// Canonical display name; for `Custom` this is the label itself.
    pub fn name(&self) -> &str {
        match self {
            RiskKind::Technology => "Technology",
            RiskKind::Cost => "Cost",
            RiskKind::Schedule => "Schedule",
            RiskKind::Scope => "Scope",
            RiskKind::People => "People",
            RiskKind::Requirements => "Requirements",
            RiskKind::Estimation => "Estimation",
            RiskKind::Tools => "Tools",
            RiskKind::Organizational => "Organizational",
            RiskKind::Custom(label) => label,
        }
    }

    /// Matches a label against the built-in names and synonyms, ignoring case
    /// and surrounding whitespace.
    fn builtin_for(label: &str) -> Option<RiskKind> {
        let folded = label.trim().to_lowercase();
        let kind = match folded.as_str() {
            "technology" | "technology risk" => RiskKind::Technology,
            "cost" | "cost risk" => RiskKind::Cost,
            "schedule" | "schedule risk" => RiskKind::Schedule,
            "scope" => RiskKind::Scope,
            "people" => RiskKind::People,
            "requirements" => RiskKind::Requirements,
            "estimation" => RiskKind::Estimation,
            "tools" => RiskKind::Tools,
            "organizational" => RiskKind::Organizational,
            _ => return None,
        };
        Some(kind)
    }
}

impl fmt::Display for RiskKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub const DEFAULT_SEVERITY_WEIGHT: f64 = 1.0;

#[derive(Debug, Clone, PartialEq)]
pub struct RiskType {
    pub kind: RiskKind,
    /// Multiplier in (0, 1] applied to the impact of every risk of this kind.
    pub severity_weight: f64,
}

impl RiskType {
    pub fn new(kind: RiskKind) -> Self {
        RiskType {
            kind,
            severity_weight: DEFAULT_SEVERITY_WEIGHT,
        }
    }

    pub fn with_weight(kind: RiskKind, severity_weight: f64) -> Self {
        RiskType {
            kind,
            severity_weight,
        }
    }
}

/// Maps a type label to its risk kind. Unknown labels become `Custom`.
pub fn classify_type(label: &str) -> Result<RiskKind, RegisterError> {
    let trimmed = label.trim();
    if trimmed.is_empty() {
        return Err(RegisterError::EmptyTypeLabel);
    }
    Ok(RiskKind::builtin_for(trimmed).unwrap_or_else(|| RiskKind::Custom(trimmed.to_string())))
}

/// Probability of occurrence in percent, strictly inside (0, 100).
///
/// Zero means the event never happens and 100 means it is a certainty (a
/// defect, not a risk); neither belongs in a register.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Probability(f64);

impl Probability {
    pub fn new(percent: f64) -> Result<Self, Violation> {
        match probability_violation(percent) {
            Some(v) => Err(v),
            None => Ok(Probability(percent)),
        }
    }

    pub fn percent(self) -> f64 {
        self.0
    }

    pub fn fraction(self) -> f64 {
        self.0 / 100.0
    }
}

fn probability_violation(percent: f64) -> Option<Violation> {
    let code = if percent.is_nan() {
        ViolationCode::ProbabilityNotANumber
    } else if percent <= 0.0 {
        ViolationCode::ProbabilityNonOccurrence
    } else if percent >= 100.0 {
        ViolationCode::ProbabilityCertainty
    } else {
        return None;
    };
    Some(Violation::new(
        code,
        format!("probability must satisfy 0 < x < 100 (got {percent})"),
    ))
}

/// Ordinal frequency classes, lowest to highest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FrequencyClass {
    /// Will probably not occur during a transformation cycle.
    Unlikely = 1,
    /// Remotely possible, at most once per cycle.
    Seldom = 2,
    /// Occurs sporadically.
    Occasional = 3,
    /// Occurs several times over a cycle.
    Likely = 4,
    /// Very often or continuously.
    Frequent = 5,
}

impl FrequencyClass {
    pub const ALL: [FrequencyClass; 5] = [
        FrequencyClass::Unlikely,
        FrequencyClass::Seldom,
        FrequencyClass::Occasional,
        FrequencyClass::Likely,
        FrequencyClass::Frequent,
    ];

    pub fn ordinal(self) -> u8 {
        self as u8
    }

    pub fn name(self) -> &'static str {
        match self {
            FrequencyClass::Unlikely => "Unlikely",
            FrequencyClass::Seldom => "Seldom",
            FrequencyClass::Occasional => "Occasional",
            FrequencyClass::Likely => "Likely",
            FrequencyClass::Frequent => "Frequent",
        }
    }

    pub fn from_label(label: &str) -> Option<Self> {
        let label = label.trim();
        Self::ALL
            .into_iter()
            .find(|f| f.name().eq_ignore_ascii_case(label))
    }
}

impl fmt::Display for FrequencyClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Observed occurrences per period, e.g. 7 per hour.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Rate {
    pub count: f64,
    pub period: String,
}

impl Rate {
    pub fn new(count: f64, period: impl Into<String>) -> Self {
        Rate {
            count,
            period: period.into(),
        }
    }
}

impl fmt::Display for Rate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.count, self.period)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mitigation {
    pub description: String,
    pub post_frequency: FrequencyClass,
    pub post_rate: Option<Rate>,
}

/// One register entry.
///
/// Fields are plain data; [`validate_risk`] checks the numeric invariants.
#[derive(Debug, Clone, PartialEq)]
pub struct Risk {
    pub id: String,
    pub title: String,
    pub risk_type: RiskType,
    /// Percent; must lie strictly inside (0, 100) for the risk to be valid.
    pub probability: f64,
    pub frequency: FrequencyClass,
    /// Rate observed before mitigation. Informational only, never changes
    /// the declared frequency class.
    pub observed_rate: Option<Rate>,
    pub mitigation: Option<Mitigation>,
    pub phase: Option<String>,
}

impl Risk {
    pub fn new(
        id: impl Into<String>,
        title: impl Into<String>,
        kind: RiskKind,
        probability: f64,
        frequency: FrequencyClass,
    ) -> Self {
        Risk {
            id: id.into(),
            title: title.into(),
            risk_type: RiskType::new(kind),
            probability,
            frequency,
            observed_rate: None,
            mitigation: None,
            phase: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RiskRegister {
    pub project_name: String,
    pub risks: Vec<Risk>,
}

impl RiskRegister {
    pub fn new(project_name: impl Into<String>, risks: Vec<Risk>) -> Self {
        RiskRegister {
            project_name: project_name.into(),
            risks,
        }
    }

    pub fn get(&self, id: &str) -> Option<&Risk> {
        self.risks.iter().find(|r| r.id == id)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ViolationCode {
    EmptyId,
    IdContainsWhitespace,
    ProbabilityNonOccurrence,
    ProbabilityCertainty,
    ProbabilityNotANumber,
    SeverityWeightOutOfRange,
    EmptyCustomLabel,
    ReservedCustomLabel,
    NegativeRate,
    DuplicateId,
    DuplicateCustomLabel,
    InconsistentTypeWeight,
}

impl ViolationCode {
    pub fn as_str(self) -> &'static str {
        match self {
            ViolationCode::EmptyId => "empty-id",
            ViolationCode::IdContainsWhitespace => "id-whitespace",
            ViolationCode::ProbabilityNonOccurrence => "probability-non-occurrence",
            ViolationCode::ProbabilityCertainty => "probability-certainty",
            ViolationCode::ProbabilityNotANumber => "probability-nan",
            ViolationCode::SeverityWeightOutOfRange => "severity-weight-range",
            ViolationCode::EmptyCustomLabel => "empty-custom-label",
            ViolationCode::ReservedCustomLabel => "reserved-custom-label",
            ViolationCode::NegativeRate => "negative-rate",
            ViolationCode::DuplicateId => "duplicate-id",
            ViolationCode::DuplicateCustomLabel => "duplicate-custom-label",
            ViolationCode::InconsistentTypeWeight => "inconsistent-type-weight",
        }
    }
}

impl fmt::Display for ViolationCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub code: ViolationCode,
    pub message: String,
}

impl Violation {
    fn new(code: ViolationCode, message: impl Into<String>) -> Self {
        Violation {
            code,
            message: message.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {}", self.code, self.message)
    }
}

/// A violation tied to its position in a register.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegisterViolation {
    /// e.g. `risks[2] (R3)` or `type_weights`.
    pub location: String,
    pub violation: Violation,
}

impl fmt::Display for RegisterViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.location, self.violation)
    }
}

#[derive(Debug, Error)]
pub enum RegisterError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{path}: {message}")]
    Schema { path: String, message: String },
    #[error("{path}: unknown key (use --lenient to ignore)")]
    UnknownKey { path: String },
    #[error("{path}: unknown frequency label {label:?} (expected one of Unlikely, Seldom, Occasional, Likely, Frequent)")]
    UnknownFrequency { path: String, label: String },
    #[error("risk type label is empty")]
    EmptyTypeLabel,
    #[error("register failed validation:\n{}", render_violations(.0))]
    Invalid(Vec<RegisterViolation>),
}

fn render_violations(vs: &[RegisterViolation]) -> String {
    vs.iter()
        .map(|v| format!("  {v}"))
        .collect::<Vec<_>>()
        .join("\n")
}

/// Returns every invariant the risk violates; empty means the risk is
/// admissible for assessment. Register-wide rules (unique ids) are checked by
/// [`validate_register`].
pub fn validate_risk(risk: &Risk) -> Vec<Violation> {
    let mut out = Vec::new();
    if risk.id.trim().is_empty() {
        out.push(Violation::new(ViolationCode::EmptyId, "risk id must be nonempty"));
    } else if risk.id.chars().any(char::is_whitespace) {
        out.push(Violation::new(
            ViolationCode::IdContainsWhitespace,
            format!("risk id {:?} must be a single token", risk.id),
        ));
    }
    if let Some(v) = probability_violation(risk.probability) {
        out.push(v);
    }
    let w = risk.risk_type.severity_weight;
    if !(w > 0.0 && w <= 1.0) {
        out.push(Violation::new(
            ViolationCode::SeverityWeightOutOfRange,
            format!(
                "severity weight for type {} must satisfy 0 < w <= 1 (got {w})",
                risk.risk_type.kind
            ),
        ));
    }
    if let RiskKind::Custom(label) = &risk.risk_type.kind {
        if label.trim().is_empty() {
            out.push(Violation::new(
                ViolationCode::EmptyCustomLabel,
                "custom risk type label must be nonempty",
            ));
        } else if let Some(builtin) = RiskKind::builtin_for(label) {
            out.push(Violation::new(
                ViolationCode::ReservedCustomLabel,
                format!("custom label {label:?} names the built-in type {builtin}"),
            ));
        }
    }
    let rates = risk
        .observed_rate
        .iter()
        .map(|r| ("observed rate", r))
        .chain(
            risk.mitigation
                .iter()
                .filter_map(|m| m.post_rate.as_ref())
                .map(|r| ("post-mitigation rate", r)),
        );
    for (what, rate) in rates {
        if !(rate.count >= 0.0) {
            out.push(Violation::new(
                ViolationCode::NegativeRate,
                format!("{what} must be >= 0 (got {})", rate.count),
            ));
        }
    }
    out
}

/// Validates each risk plus the register-wide rules.
pub fn validate_register(register: &RiskRegister) -> Vec<RegisterViolation> {
    let mut out = Vec::new();
    let mut seen_ids: HashMap<&str, usize> = HashMap::new();
    let mut custom_labels: HashMap<String, &str> = HashMap::new();
    let mut weights: HashMap<&RiskKind, f64> = HashMap::new();

    for (i, risk) in register.risks.iter().enumerate() {
        let location = risk_location(i, &risk.id);
        for violation in validate_risk(risk) {
            out.push(RegisterViolation {
                location: location.clone(),
                violation,
            });
        }
        if !risk.id.is_empty() {
            if let Some(first) = seen_ids.insert(&risk.id, i) {
                seen_ids.insert(&risk.id, first);
                out.push(RegisterViolation {
                    location: location.clone(),
                    violation: Violation::new(
                        ViolationCode::DuplicateId,
                        format!("risk id {:?} already used by risks[{first}]", risk.id),
                    ),
                });
            }
        }
        if let RiskKind::Custom(label) = &risk.risk_type.kind {
            let folded = label.trim().to_lowercase();
            match custom_labels.get(&folded) {
                Some(existing) if *existing != label => out.push(RegisterViolation {
                    location: location.clone(),
                    violation: Violation::new(
                        ViolationCode::DuplicateCustomLabel,
                        format!("custom label {label:?} differs only in case from {existing:?}"),
                    ),
                }),
                Some(_) => {}
                None => {
                    custom_labels.insert(folded, label);
                }
            }
        }
        let w = risk.risk_type.severity_weight;
        match weights.get(&risk.risk_type.kind) {
            Some(&prev) if prev != w => out.push(RegisterViolation {
                location: location.clone(),
                violation: Violation::new(
                    ViolationCode::InconsistentTypeWeight,
                    format!(
                        "type {} has weight {w} here but {prev} on an earlier risk",
                        risk.risk_type.kind
                    ),
                ),
            }),
            Some(_) => {}
            None => {
                weights.insert(&risk.risk_type.kind, w);
            }
        }
    }
    out
}

fn risk_location(index: usize, id: &str) -> String {
    if id.is_empty() {
        format!("risks[{index}]")
    } else {
        format!("risks[{index}] ({id})")
    }
}

/// Emitted when a plan leaves a risk occurring more often than before.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MitigationWarning {
    pub risk_id: String,
    pub pre: FrequencyClass,
    pub post: FrequencyClass,
}

impl fmt::Display for MitigationWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "warning: mitigation for {} raises frequency from {} to {}",
            self.risk_id, self.pre, self.post
        )
    }
}

pub fn mitigation_warning(risk: &Risk) -> Option<MitigationWarning> {
    let plan = risk.mitigation.as_ref()?;
    (plan.post_frequency > risk.frequency).then(|| MitigationWarning {
        risk_id: risk.id.clone(),
        pre: risk.frequency,
        post: plan.post_frequency,
    })
}

/// Attaches a mitigation plan, replacing any previous one. Only the
/// mitigation field changes.
pub fn apply_mitigation(risk: &Risk, plan: Mitigation) -> (Risk, Option<MitigationWarning>) {
    let mut mitigated = risk.clone();
    mitigated.mitigation = Some(plan);
    let warning = mitigation_warning(&mitigated);
    (mitigated, warning)
}

pub fn mitigation_warnings(register: &RiskRegister) -> Vec<MitigationWarning> {
    register.risks.iter().filter_map(mitigation_warning).collect()
}

// ---------------------------------------------------------------------------
// File format

const TOP_KEYS: &[&str] = &["project", "type_weights", "risks", "factors", "edges"];
const RISK_KEYS: &[&str] = &[
    "id",
    "title",
    "type",
    "probability",
    "frequency",
    "observed_rate",
    "mitigation",
    "phase",
];
const MITIGATION_KEYS: &[&str] = &["description", "post_frequency", "post_rate"];
const RATE_KEYS: &[&str] = &["count", "period"];

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ParseOptions {
    /// Ignore unknown keys instead of rejecting them.
    pub lenient: bool,
}

#[derive(Deserialize)]
struct RawRisk {
    id: String,
    #[serde(default)]
    title: String,
    #[serde(rename = "type")]
    type_label: String,
    probability: f64,
    frequency: String,
    #[serde(default)]
    observed_rate: Option<RawRate>,
    #[serde(default)]
    mitigation: Option<RawMitigation>,
    #[serde(default)]
    phase: Option<String>,
}

#[derive(Deserialize)]
struct RawMitigation {
    #[serde(default)]
    description: String,
    post_frequency: String,
    #[serde(default)]
    post_rate: Option<RawRate>,
}

#[derive(Deserialize)]
struct RawRate {
    count: f64,
    period: String,
}

impl From<RawRate> for Rate {
    fn from(r: RawRate) -> Self {
        Rate::new(r.count, r.period)
    }
}

/// Parses JSON text into a value, mapping syntax errors to line/column.
pub(crate) fn parse_json(text: &str) -> Result<Value, RegisterError> {
    serde_json::from_str(text).map_err(|e| RegisterError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

pub(crate) fn check_keys(
    obj: &Map<String, Value>,
    allowed: &[&str],
    path: &str,
    options: ParseOptions,
) -> Result<(), RegisterError> {
    if options.lenient {
        return Ok(());
    }
    match obj.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(key) => Err(RegisterError::UnknownKey {
            path: if path.is_empty() {
                key.clone()
            } else {
                format!("{path}.{key}")
            },
        }),
        None => Ok(()),
    }
}

fn schema(path: impl Into<String>, message: impl fmt::Display) -> RegisterError {
    RegisterError::Schema {
        path: path.into(),
        message: message.to_string(),
    }
}

fn frequency_at(path: String, label: &str) -> Result<FrequencyClass, RegisterError> {
    FrequencyClass::from_label(label).ok_or_else(|| RegisterError::UnknownFrequency {
        path,
        label: label.to_string(),
    })
}

/// Checks a nested rate object's keys (it sits below the risk's own keys).
fn check_rate_keys(
    parent: &Map<String, Value>,
    key: &str,
    path: &str,
    options: ParseOptions,
) -> Result<(), RegisterError> {
    if let Some(Value::Object(rate)) = parent.get(key) {
        check_keys(rate, RATE_KEYS, &format!("{path}.{key}"), options)?;
    }
    Ok(())
}

/// Reads a register file into memory without enforcing value ranges.
///
/// Structural problems (bad JSON, missing or mistyped keys, unknown keys in
/// strict mode, unrecognized frequency labels) are errors. Range problems
/// such as a probability of 100 are left for [`validate_register`].
pub fn load_register(text: &str, options: ParseOptions) -> Result<RiskRegister, RegisterError> {
    let root = parse_json(text)?;
    let Value::Object(top) = root else {
        return Err(schema("$", "register must be a JSON object"));
    };
    check_keys(&top, TOP_KEYS, "", options)?;

    let project_name = match top.get("project") {
        Some(Value::String(s)) => s.clone(),
        Some(_) => return Err(schema("project", "expected a string")),
        None => return Err(schema("project", "missing key")),
    };

    let mut weights: Vec<(RiskKind, f64)> = Vec::new();
    match top.get("type_weights") {
        None | Some(Value::Null) => {}
        Some(Value::Object(map)) => {
            for (label, value) in map {
                let path = format!("type_weights.{label}");
                let kind = classify_type(label).map_err(|e| schema(&path, e))?;
                let w = value
                    .as_f64()
                    .ok_or_else(|| schema(&path, "expected a number"))?;
                if weights.iter().any(|(k, _)| kind_matches(k, &kind)) {
                    return Err(schema(&path, format!("weight for type {kind} given twice")));
                }
                weights.push((kind, w));
            }
        }
        Some(_) => return Err(schema("type_weights", "expected an object")),
    }

    let risks_value = top
        .get("risks")
        .ok_or_else(|| schema("risks", "missing key"))?;
    let Value::Array(items) = risks_value else {
        return Err(schema("risks", "expected an array"));
    };

    let mut risks = Vec::with_capacity(items.len());
    for (i, item) in items.iter().enumerate() {
        let path = format!("risks[{i}]");
        let Value::Object(obj) = item else {
            return Err(schema(path, "expected an object"));
        };
        check_keys(obj, RISK_KEYS, &path, options)?;
        check_rate_keys(obj, "observed_rate", &path, options)?;
        if let Some(Value::Object(m)) = obj.get("mitigation") {
            let mpath = format!("{path}.mitigation");
            check_keys(m, MITIGATION_KEYS, &mpath, options)?;
            check_rate_keys(m, "post_rate", &mpath, options)?;
        }
        let raw: RawRisk = RawRisk::deserialize(item).map_err(|e| schema(&path, e))?;
        risks.push(risk_from_raw(raw, &path, &weights)?);
    }

    Ok(RiskRegister {
        project_name,
        risks,
    })
}

fn kind_matches(a: &RiskKind, b: &RiskKind) -> bool {
    match (a, b) {
        (RiskKind::Custom(x), RiskKind::Custom(y)) => x.to_lowercase() == y.to_lowercase(),
        _ => a == b,
    }
}

fn risk_from_raw(
    raw: RawRisk,
    path: &str,
    weights: &[(RiskKind, f64)],
) -> Result<Risk, RegisterError> {
    // An empty label still loads so that validation can report it.
    let kind = classify_type(&raw.type_label).unwrap_or(RiskKind::Custom(String::new()));
    let severity_weight = weights
        .iter()
        .find(|(k, _)| kind_matches(k, &kind))
        .map_or(DEFAULT_SEVERITY_WEIGHT, |(_, w)| *w);
    let frequency = frequency_at(format!("{path}.frequency"), &raw.frequency)?;
    let mitigation = raw
        .mitigation
        .map(|m| -> Result<Mitigation, RegisterError> {
            Ok(Mitigation {
                description: m.description,
                post_frequency: frequency_at(
                    format!("{path}.mitigation.post_frequency"),
                    &m.post_frequency,
                )?,
                post_rate: m.post_rate.map(Rate::from),
            })
        })
        .transpose()?;
    Ok(Risk {
        id: raw.id,
        title: raw.title,
        risk_type: RiskType::with_weight(kind, severity_weight),
        probability: raw.probability,
        frequency,
        observed_rate: raw.observed_rate.map(Rate::from),
        mitigation,
        phase: raw.phase,
    })
}

/// Loads and validates a register. Every returned risk passes
/// [`validate_risk`] and ids are unique.
pub fn parse_register(text: &str, options: ParseOptions) -> Result<RiskRegister, RegisterError> {
    let register = load_register(text, options)?;
    let violations = validate_register(&register);
    if violations.is_empty() {
        Ok(register)
    } else {
        Err(RegisterError::Invalid(violations))
    }
}

/// Serializes a register back to the file format. Non-default type weights
/// are written to `type_weights` in first-use order.
pub fn to_json(register: &RiskRegister) -> String {
    let mut top = Map::new();
    top.insert("project".into(), Value::String(register.project_name.clone()));

    let mut weights: BTreeMap<String, f64> = BTreeMap::new();
    for risk in &register.risks {
        if risk.risk_type.severity_weight != DEFAULT_SEVERITY_WEIGHT {
            weights
                .entry(risk.risk_type.kind.name().to_string())
                .or_insert(risk.risk_type.severity_weight);
        }
    }
    if !weights.is_empty() {
        let map = weights
            .into_iter()
            .map(|(k, w)| (k, number(w)))
            .collect::<Map<_, _>>();
        top.insert("type_weights".into(), Value::Object(map));
    }

    let risks = register.risks.iter().map(risk_to_value).collect();
    top.insert("risks".into(), Value::Array(risks));

    let mut text = serde_json::to_string_pretty(&Value::Object(top))
        .expect("register values are always representable");
    text.push('\n');
    text
}

fn number(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

fn rate_to_value(rate: &Rate) -> Value {
    let mut m = Map::new();
    m.insert("count".into(), number(rate.count));
    m.insert("period".into(), Value::String(rate.period.clone()));
    Value::Object(m)
}

fn risk_to_value(risk: &Risk) -> Value {
    let mut m = Map::new();
    m.insert("id".into(), Value::String(risk.id.clone()));
    m.insert("title".into(), Value::String(risk.title.clone()));
    m.insert(
        "type".into(),
        Value::String(risk.risk_type.kind.name().to_string()),
    );
    m.insert("probability".into(), number(risk.probability));
    m.insert(
        "frequency".into(),
        Value::String(risk.frequency.name().to_string()),
    );
    if let Some(rate) = &risk.observed_rate {
        m.insert("observed_rate".into(), rate_to_value(rate));
    }
    if let Some(plan) = &risk.mitigation {
        let mut pm = Map::new();
        pm.insert("description".into(), Value::String(plan.description.clone()));
        pm.insert(
            "post_frequency".into(),
            Value::String(plan.post_frequency.name().to_string()),
        );
        if let Some(rate) = &plan.post_rate {
            pm.insert("post_rate".into(), rate_to_value(rate));
        }
        m.insert("mitigation".into(), Value::Object(pm));
    }
    if let Some(phase) = &risk.phase {
        m.insert("phase".into(), Value::String(phase.clone()));
    }
    Value::Object(m)
}
