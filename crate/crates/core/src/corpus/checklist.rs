//! Clause checklist enforcing the tier semantics of prompt texts.
//!
//! Short prompts carry only the request, Medium adds functionality, use
//! cases, documentation and type hints, Long adds edge cases, argument
//! handling and data types. Detection is by regex per clause, so the prose
//! itself stays free-form.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::OnceLock;

use regex::Regex;
use serde::Deserialize;

use super::Tier;

#[derive(Debug, Deserialize)]
struct ChecklistFile {
    clauses: Vec<ClauseFile>,
    tiers: BTreeMap<Tier, TierRule>,
}

#[derive(Debug, Deserialize)]
struct ClauseFile {
    id: String,
    pattern: String,
}

#[derive(Debug, Clone, Deserialize)]
pub struct TierRule {
    pub required: BTreeSet<String>,
    pub forbidden: BTreeSet<String>,
}

#[derive(Debug)]
pub struct Checklist {
    clauses: Vec<(String, Regex)>,
    tiers: BTreeMap<Tier, TierRule>,
}

impl Checklist {
    pub fn from_json(text: &str) -> Result<Self, String> {
        let file: ChecklistFile = serde_json::from_str(text).map_err(|e| e.to_string())?;
        let mut clauses = Vec::new();
        for c in file.clauses {
            let re = Regex::new(&c.pattern).map_err(|e| format!("clause {}: {e}", c.id))?;
            clauses.push((c.id, re));
        }
        let known: BTreeSet<&str> = clauses.iter().map(|(id, _)| id.as_str()).collect();
        for tier in Tier::ALL {
            let rule = file.tiers.get(&tier).ok_or_else(|| format!("tier {tier} has no rule"))?;
            for id in rule.required.iter().chain(&rule.forbidden) {
                if !known.contains(id.as_str()) {
                    return Err(format!("tier {tier} names unknown clause {id}"));
                }
            }
        }
        Ok(Checklist { clauses, tiers: file.tiers })
    }

    pub fn builtin() -> &'static Checklist {
        static CELL: OnceLock<Checklist> = OnceLock::new();
        CELL.get_or_init(|| {
            Checklist::from_json(include_str!("../../data/checklist.json")).expect("bundled checklist is valid")
        })
    }

    pub fn rule(&self, tier: Tier) -> &TierRule {
        &self.tiers[&tier]
    }

    /// Clause ids detected in `text`.
    pub fn clauses_in(&self, text: &str) -> BTreeSet<String> {
        self.clauses.iter().filter(|(_, re)| re.is_match(text)).map(|(id, _)| id.clone()).collect()
    }

    /// Every violation for one task's three prompt texts.
    pub fn check(&self, task_id: &str, entry_point: &str, texts: &BTreeMap<Tier, String>) -> Vec<String> {
        let mut out = Vec::new();
        let mut found = BTreeMap::new();
        let entry =
            Regex::new(&format!(r"\b{}\b", regex::escape(entry_point))).expect("escaped name is a valid pattern");
        for (tier, text) in texts {
            let present = self.clauses_in(text);
            let rule = self.rule(*tier);
            for missing in rule.required.difference(&present) {
                out.push(format!("{task_id}/{tier}: missing required clause '{missing}'"));
            }
            for extra in rule.forbidden.intersection(&present) {
                out.push(format!("{task_id}/{tier}: clause '{extra}' belongs to a longer tier"));
            }
            if !entry.is_match(text) {
                out.push(format!("{task_id}/{tier}: entry point '{entry_point}' is not named"));
            }
            found.insert(*tier, present);
        }
        if let (Some(medium), Some(long)) = (found.get(&Tier::Medium), found.get(&Tier::Long)) {
            for clause in medium.difference(long) {
                out.push(format!("{task_id}: long prompt lacks medium clause '{clause}' (tier-superset violation)"));
            }
        }
        out
    }
}
