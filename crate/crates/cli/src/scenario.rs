use crate::CliError;
use nucont_core::contour::CauchyContour;
use nucont_core::models::TruncationSpec;
use nucont_core::nu::{Checker, FamilySpec, OperatorSequence};
use nucont_core::spectral::{GridSpec, SpectralConfig};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::collections::BTreeMap;

/// Tolerance overrides shared by all checkers of a scenario.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Tolerance of the ν-classification gate (default 1e-6).
    pub classification: Option<f64>,
    /// Multiplies every checker tolerance (default 1).
    pub scale: Option<f64>,
}

fn default_n_range() -> [usize; 2] {
    [1, 64]
}

/// A self-contained experiment: one family and the checkers run on it.
/// Checker parameters `grid`, `contour` and `alt_contour` may name an
/// entry of `grids` / `contours` instead of spelling it out.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default)]
    pub description: String,
    #[serde(default)]
    pub family: Option<FamilySpec>,
    #[serde(default = "default_n_range")]
    pub n_range: [usize; 2],
    #[serde(default)]
    pub truncation: Option<TruncationSpec>,
    #[serde(default)]
    pub grids: BTreeMap<String, GridSpec>,
    #[serde(default)]
    pub contours: BTreeMap<String, CauchyContour>,
    pub checkers: Vec<Checker>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub spectral: SpectralConfig,
    /// Built to fail: the corpus expects exit status 1.
    #[serde(default)]
    pub negative_control: bool,
}

/// JSON pointer of a serde path, e.g. `/checkers/0/eps`.
fn pointer(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for seg in path.iter() {
        match seg {
            Segment::Seq { index } => out.push_str(&format!("/{index}")),
            Segment::Map { key } => out.push_str(&format!("/{key}")),
            Segment::Enum { .. } | Segment::Unknown => {}
        }
    }
    if out.is_empty() {
        out.push('/');
    }
    out
}

/// Replaces named `grid` / `contour` / `alt_contour` references inside
/// checker objects with their definitions.
fn resolve_references(doc: &mut Value) -> Result<(), CliError> {
    let grids = doc.get("grids").cloned().unwrap_or(Value::Null);
    let contours = doc.get("contours").cloned().unwrap_or(Value::Null);
    let Some(Value::Array(checkers)) = doc.get_mut("checkers") else {
        return Ok(());
    };
    for (i, ch) in checkers.iter_mut().enumerate() {
        let Value::Object(map) = ch else { continue };
        for (key, table, what) in [
            ("grid", &grids, "grids"),
            ("contour", &contours, "contours"),
            ("alt_contour", &contours, "contours"),
        ] {
            if let Some(Value::String(name)) = map.get(key) {
                let def = table.get(name.as_str()).cloned().ok_or_else(|| CliError::Parse {
                    path: format!("/checkers/{i}/{key}"),
                    message: format!("no entry {name:?} in {what}"),
                })?;
                map.insert(key.to_string(), def);
            }
        }
    }
    Ok(())
}

/// Checkers are internally tagged, so serde loses the path below
/// `/checkers/i`. Recover the field by dropping one key at a time: the key
/// whose removal cures the error (or turns it into "missing field") is the
/// culprit.
fn blame_checker_field(doc: &Value, path: &str) -> Option<String> {
    let rest = path.strip_prefix("/checkers/")?;
    let i: usize = rest.parse().ok()?;
    let Value::Object(map) = doc.get("checkers")?.get(i)? else {
        return None;
    };
    map.keys().filter(|k| *k != "checker").find_map(|k| {
        let mut probe = map.clone();
        probe.remove(k);
        match serde_json::from_value::<Checker>(Value::Object(probe)) {
            Ok(_) => Some(k.clone()),
            Err(e) if e.to_string().contains(&format!("missing field `{k}`")) => Some(k.clone()),
            Err(_) => None,
        }
    })
}

/// Parses and validates a scenario document.
pub fn parse_scenario(text: &str) -> Result<Scenario, CliError> {
    let mut doc: Value = serde_json::from_str(text).map_err(|e| CliError::Parse {
        path: "/".into(),
        message: e.to_string(),
    })?;
    resolve_references(&mut doc)?;
    let s: Scenario = serde_path_to_error::deserialize(doc.clone()).map_err(|e| {
        let mut path = pointer(e.path());
        if let Some(field) = blame_checker_field(&doc, &path) {
            path = format!("{path}/{field}");
        }
        CliError::Parse {
            path,
            message: e.inner().to_string(),
        }
    })?;
    s.validate()?;
    Ok(s)
}

impl Scenario {
    /// Builds the family with the given seed.
    pub fn sequence(&self, seed: u64) -> Result<Option<OperatorSequence>, CliError> {
        self.family
            .as_ref()
            .map(|f| OperatorSequence::from_spec(f, (self.n_range[0], self.n_range[1]), seed))
            .transpose()
            .map_err(|e| CliError::Validation(format!("family: {e}")))
    }

    /// Semantic checks: cross-references, checker hypotheses decidable from
    /// the parameters, and truncation contracts.
    pub fn validate(&self) -> Result<(), CliError> {
        let v = |m: String| CliError::Validation(m);
        if self.name.is_empty() || !self.name.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_') {
            return Err(v(format!("scenario name {:?} must be nonempty [A-Za-z0-9_-]", self.name)));
        }
        if self.checkers.is_empty() {
            return Err(v("scenario lists no checkers".into()));
        }
        self.spectral.validate().map_err(|e| v(format!("spectral: {e}")))?;
        for (name, g) in &self.grids {
            g.validate().map_err(|e| v(format!("grids/{name}: {e}")))?;
        }
        for (k, x) in [("classification", self.tolerances.classification), ("scale", self.tolerances.scale)] {
            if let Some(x) = x {
                if !(x.is_finite() && x > 0.0) {
                    return Err(v(format!("tolerances/{k} must be positive, got {x}")));
                }
            }
        }
        let seq = self.sequence(self.seed)?;
        if let (Some(t), Some(seq)) = (self.truncation, &seq) {
            let lower = seq
                .limit()
                .bandwidth()
                .map_err(|e| v(format!("family limit: {e}")))?
                .0;
            t.shape_for(seq.limit().dim(), lower)
                .map_err(|e| v(format!("truncation: {e}")))?;
        }
        for (i, ch) in self.checkers.iter().enumerate() {
            ch.validate()
                .map_err(|e| v(format!("checkers/{i} ({}): {e}", ch.name())))?;
            if ch.needs_family() && seq.is_none() {
                return Err(v(format!("checkers/{i} ({}) needs a family", ch.name())));
            }
            if let (Checker::ApLimsup { truncation, .. }, Some(seq)) = (ch, &seq) {
                let t = truncation.or(self.truncation).ok_or_else(|| {
                    v(format!("checkers/{i} (ap-limsup) needs a truncation"))
                })?;
                let lower = seq.limit().bandwidth().map_err(|e| v(e.to_string()))?.0;
                t.shape_for(seq.limit().dim(), lower)
                    .map_err(|e| v(format!("checkers/{i} truncation: {e}")))?;
                if t.extra_rows.is_none() {
                    return Err(v(format!("checkers/{i} (ap-limsup) needs a rectangular truncation")));
                }
            }
        }
        Ok(())
    }
}
