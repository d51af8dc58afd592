//! Translation of changed file paths into architectural entity names.

use glob::{MatchOptions, Pattern};
use serde::{Deserialize, Serialize};

use super::IngestError;
use crate::model::EntityId;

/// One path rewriting rule. `match` is a plain path prefix unless it contains
/// glob metacharacters, in which case it is matched as a glob against the
/// whole path (`*` stays within a directory, `**` crosses directories).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathRule {
    #[serde(rename = "match")]
    pub pattern: String,
    #[serde(default)]
    pub strip_prefix: String,
    #[serde(default)]
    pub strip_suffix: String,
    #[serde(default)]
    pub separator_replacement: Option<(char, char)>,
}

impl PathRule {
    pub fn java(root: &str) -> Self {
        Self {
            pattern: format!("{root}**/*.java"),
            strip_prefix: root.to_string(),
            strip_suffix: ".java".to_string(),
            separator_replacement: Some(('/', '.')),
        }
    }
}

#[derive(Debug, Clone)]
enum Matcher {
    Prefix(String),
    Glob(Pattern),
}

const GLOB_OPTIONS: MatchOptions = MatchOptions {
    case_sensitive: true,
    require_literal_separator: true,
    require_literal_leading_dot: false,
};

impl Matcher {
    fn matches(&self, path: &str) -> bool {
        match self {
            Matcher::Prefix(prefix) => path.starts_with(prefix.as_str()),
            Matcher::Glob(pattern) => pattern.matches_with(path, GLOB_OPTIONS),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RulesFile {
    rules: Vec<PathRule>,
}

/// An ordered, validated rule list; the first matching rule wins.
#[derive(Debug, Clone)]
pub struct PathRules {
    rules: Vec<(PathRule, Matcher)>,
}

impl PathRules {
    pub fn new(rules: Vec<PathRule>) -> Result<Self, IngestError> {
        let compiled = rules
            .into_iter()
            .enumerate()
            .map(|(index, rule)| {
                if rule.pattern.is_empty() {
                    return Err(IngestError::InvalidRule {
                        index,
                        message: "empty `match`".into(),
                    });
                }
                let matcher = if rule.pattern.contains(['*', '?', '[']) {
                    let pattern = Pattern::new(&rule.pattern).map_err(|e| IngestError::InvalidRule {
                        index,
                        message: e.to_string(),
                    })?;
                    Matcher::Glob(pattern)
                } else {
                    Matcher::Prefix(rule.pattern.clone())
                };
                Ok((rule, matcher))
            })
            .collect::<Result<_, _>>()?;
        Ok(Self { rules: compiled })
    }

    /// Java source trees: `src/main/java/`, `src/java/`, then `src/`.
    pub fn java_default() -> Self {
        Self::new(vec![
            PathRule::java("src/main/java/"),
            PathRule::java("src/java/"),
            PathRule::java("src/"),
        ])
        .expect("built-in rules are valid")
    }

    /// Reads a TOML document with an ordered `rules` array.
    pub fn from_toml(text: &str) -> Result<Self, IngestError> {
        let file: RulesFile = toml::from_str(text).map_err(|e| IngestError::Config(e.to_string()))?;
        Self::new(file.rules)
    }

    pub fn rules(&self) -> impl Iterator<Item = &PathRule> {
        self.rules.iter().map(|(rule, _)| rule)
    }
}

impl Default for PathRules {
    fn default() -> Self {
        Self::java_default()
    }
}

/// Entity name for `path` under the first matching rule, or `None` when no
/// rule matches or the rewrite leaves nothing.
pub fn path_to_entity(path: &str, rules: &PathRules) -> Option<EntityId> {
    let path = path.trim().trim_start_matches("./");
    let (rule, _) = rules.rules.iter().find(|(_, m)| m.matches(path))?;
    let mut name = path.strip_prefix(rule.strip_prefix.as_str()).unwrap_or(path);
    if !rule.strip_suffix.is_empty() {
        name = name.strip_suffix(rule.strip_suffix.as_str()).unwrap_or(name);
    }
    let name = match rule.separator_replacement {
        Some((from, to)) => name.replace(from, &to.to_string()),
        None => name.to_string(),
    };
    EntityId::new(name).ok()
}
