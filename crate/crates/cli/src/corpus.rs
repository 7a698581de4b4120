//! Built-in scenarios, embedded from `scenarios/` at compile time.

use crate::{parse_scenario, CliError, Scenario};

/// `(name, document)` in name order.
pub const BUILTIN: &[(&str, &str)] = &[
    ("ap-limsup-nonfredholm", include_str!("../scenarios/ap-limsup-nonfredholm.json")),
    ("component-migration", include_str!("../scenarios/component-migration.json")),
    ("component-persistence", include_str!("../scenarios/component-persistence.json")),
    ("corrupted-projection", include_str!("../scenarios/corrupted-projection.json")),
    ("diagonal-commuting", include_str!("../scenarios/diagonal-commuting.json")),
    ("diagonal-isolated", include_str!("../scenarios/diagonal-isolated.json")),
    ("finite-commuting-unmet", include_str!("../scenarios/finite-commuting-unmet.json")),
    ("iso-liminf", include_str!("../scenarios/iso-liminf.json")),
    ("matrix-theorems", include_str!("../scenarios/matrix-theorems.json")),
    ("nilpotent-demo", include_str!("../scenarios/nilpotent-demo.json")),
    ("nonuniqueness-invertible", include_str!("../scenarios/nonuniqueness-invertible.json")),
    ("projector-family", include_str!("../scenarios/projector-family.json")),
    ("random-upper-semicontinuity", include_str!("../scenarios/random-upper-semicontinuity.json")),
    ("resolvent-identity", include_str!("../scenarios/resolvent-identity.json")),
    ("shift-ap-limsup", include_str!("../scenarios/shift-ap-limsup.json")),
    ("shift-index-continuity", include_str!("../scenarios/shift-index-continuity.json")),
    ("shift-perturbed-ap-limsup", include_str!("../scenarios/shift-perturbed-ap-limsup.json")),
    ("spectral-projection", include_str!("../scenarios/spectral-projection.json")),
    ("toeplitz-alternating", include_str!("../scenarios/toeplitz-alternating.json")),
    ("toeplitz-index", include_str!("../scenarios/toeplitz-index.json")),
    ("toeplitz-weyl", include_str!("../scenarios/toeplitz-weyl.json")),
];

pub fn builtin(name: &str) -> Option<&'static str> {
    BUILTIN.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

/// Every built-in scenario, parsed.
pub fn all() -> Result<Vec<Scenario>, CliError> {
    BUILTIN.iter().map(|(_, t)| parse_scenario(t)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_parses_and_names_match_files() {
        for (name, text) in BUILTIN {
            let s = parse_scenario(text).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(&s.name, name);
        }
    }

    #[test]
    fn three_negative_controls() {
        let neg: Vec<String> = all().unwrap().into_iter().filter(|s| s.negative_control).map(|s| s.name).collect();
        assert_eq!(neg, ["component-migration", "corrupted-projection", "nonuniqueness-invertible"]);
    }
}
