//! Architecture snapshots, entities, components and architectural changes.
//!
//! A snapshot is read from a line-oriented cluster file where every record
//! has the shape `contain <component> <entity>`. Components partition the
//! entity set of a snapshot: an entity may belong to at most one component.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Prefix reserved for the empty components introduced by balancing.
pub const DUMMY_PREFIX: &str = "__dummy_";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("entity `{entity}` appears in both `{first}` and `{second}`")]
    PartitionViolation {
        entity: String,
        first: String,
        second: String,
    },
    #[error("duplicate component `{0}`")]
    DuplicateComponent(String),
    #[error("invalid entity name {0:?}")]
    InvalidEntity(String),
    #[error("component name `{0}` uses the reserved prefix `{DUMMY_PREFIX}`")]
    ReservedName(String),
    #[error("change `{id}`: {message}")]
    MalformedChange { id: String, message: String },
}

/// Canonical identifier of a code entity, e.g. a fully qualified class name.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct EntityId(String);

impl EntityId {
    pub fn new(name: impl Into<String>) -> Result<Self, ModelError> {
        let name = name.into();
        if name.is_empty() || name.trim() != name {
            return Err(ModelError::InvalidEntity(name));
        }
        Ok(Self(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for EntityId {
    type Error = ModelError;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        Self::new(value)
    }
}

impl From<EntityId> for String {
    fn from(value: EntityId) -> Self {
        value.0
    }
}

impl fmt::Display for EntityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Component {
    pub name: String,
    pub entities: BTreeSet<EntityId>,
}

impl Component {
    pub fn new(name: impl Into<String>, entities: impl IntoIterator<Item = EntityId>) -> Self {
        Self {
            name: name.into(),
            entities: entities.into_iter().collect(),
        }
    }

    /// Empty placeholder component used to balance two snapshots.
    pub fn dummy(index: usize) -> Self {
        Self {
            name: format!("{DUMMY_PREFIX}{index}"),
            entities: BTreeSet::new(),
        }
    }

    pub fn is_dummy(&self) -> bool {
        self.name.starts_with(DUMMY_PREFIX)
    }

    pub fn len(&self) -> usize {
        self.entities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entities.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArchitectureSnapshot {
    pub version: String,
    components: Vec<Component>,
}

impl ArchitectureSnapshot {
    /// Builds a snapshot, checking that component names are unique and that
    /// no entity belongs to two components.
    pub fn new(version: impl Into<String>, components: Vec<Component>) -> Result<Self, ModelError> {
        let mut names = BTreeSet::new();
        let mut owner: HashMap<&EntityId, &str> = HashMap::new();
        for component in &components {
            if component.is_dummy() {
                return Err(ModelError::ReservedName(component.name.clone()));
            }
            if !names.insert(component.name.as_str()) {
                return Err(ModelError::DuplicateComponent(component.name.clone()));
            }
            for entity in &component.entities {
                if let Some(first) = owner.insert(entity, &component.name) {
                    return Err(ModelError::PartitionViolation {
                        entity: entity.to_string(),
                        first: first.to_string(),
                        second: component.name.clone(),
                    });
                }
            }
        }
        Ok(Self {
            version: version.into(),
            components,
        })
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn component(&self, name: &str) -> Option<&Component> {
        self.components.iter().find(|c| c.name == name)
    }

    /// Union of all component entity sets.
    pub fn entity_universe(&self) -> BTreeSet<EntityId> {
        self.components
            .iter()
            .flat_map(|c| c.entities.iter().cloned())
            .collect()
    }

    /// Renders the snapshot back into the cluster-file format.
    pub fn to_snapshot_text(&self) -> String {
        let mut out = String::new();
        for component in &self.components {
            for entity in &component.entities {
                out.push_str("contain ");
                out.push_str(&component.name);
                out.push(' ');
                out.push_str(entity.as_str());
                out.push('\n');
            }
        }
        out
    }
}

/// Parses a cluster file (`contain <component> <entity>` per line).
///
/// Blank lines and lines starting with `#` are skipped. Repeating an identical
/// record is harmless; placing one entity in two components is an error.
pub fn parse_snapshot(text: &str, version: &str) -> Result<ArchitectureSnapshot, ModelError> {
    let mut order: Vec<String> = Vec::new();
    let mut members: BTreeMap<String, BTreeSet<EntityId>> = BTreeMap::new();
    let mut owner: HashMap<String, String> = HashMap::new();

    for (index, raw) in text.lines().enumerate() {
        let line_no = index + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        let [keyword, component, entity] = tokens[..] else {
            return Err(ModelError::Syntax {
                line: line_no,
                message: format!("expected 3 fields, found {}", tokens.len()),
            });
        };
        if keyword != "contain" {
            return Err(ModelError::Syntax {
                line: line_no,
                message: format!("unknown relation `{keyword}`"),
            });
        }
        if component.starts_with(DUMMY_PREFIX) {
            return Err(ModelError::ReservedName(component.to_string()));
        }
        match owner.get(entity) {
            Some(existing) if existing != component => {
                return Err(ModelError::PartitionViolation {
                    entity: entity.to_string(),
                    first: existing.clone(),
                    second: component.to_string(),
                });
            }
            Some(_) => continue,
            None => {}
        }
        owner.insert(entity.to_string(), component.to_string());
        if !members.contains_key(component) {
            order.push(component.to_string());
        }
        members
            .entry(component.to_string())
            .or_default()
            .insert(EntityId::new(entity)?);
    }

    let components = order
        .into_iter()
        .map(|name| {
            let entities = members.remove(&name).unwrap_or_default();
            Component { name, entities }
        })
        .collect();
    ArchitectureSnapshot::new(version, components)
}

/// Ordered pair of version labels, `from` being the older one.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VersionPair {
    pub from: String,
    pub to: String,
}

impl VersionPair {
    pub fn new(from: impl Into<String>, to: impl Into<String>) -> Self {
        Self {
            from: from.into(),
            to: to.into(),
        }
    }
}

impl fmt::Display for VersionPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.from, self.to)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum DeltaKind {
    AddEntity,
    RemoveEntity,
}

/// A single entity addition or removal. Relocations are a removal in the
/// source change plus an addition in the destination change.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Delta {
    pub kind: DeltaKind,
    pub entity: EntityId,
}

impl Delta {
    pub fn add(entity: EntityId) -> Self {
        Self {
            kind: DeltaKind::AddEntity,
            entity,
        }
    }

    pub fn remove(entity: EntityId) -> Self {
        Self {
            kind: DeltaKind::RemoveEntity,
            entity,
        }
    }

    pub fn mirrored(&self) -> Self {
        let kind = match self.kind {
            DeltaKind::AddEntity => DeltaKind::RemoveEntity,
            DeltaKind::RemoveEntity => DeltaKind::AddEntity,
        };
        Self {
            kind,
            entity: self.entity.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ChangeKind {
    ComponentAdded,
    ComponentRemoved,
    ComponentModified,
}

impl ChangeKind {
    pub fn verb(self) -> &'static str {
        match self {
            ChangeKind::ComponentAdded => "added",
            ChangeKind::ComponentRemoved => "removed",
            ChangeKind::ComponentModified => "modified",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArchitecturalChange {
    pub id: String,
    pub kind: ChangeKind,
    pub source_component: Option<String>,
    pub target_component: Option<String>,
    pub deltas: BTreeSet<Delta>,
    pub version_pair: VersionPair,
}

impl ArchitecturalChange {
    /// Checks the structural invariants of a change: non-empty deltas, and
    /// added/removed components carrying only additions/removals.
    pub fn validate(&self) -> Result<(), ModelError> {
        let fail = |message: &str| {
            Err(ModelError::MalformedChange {
                id: self.id.clone(),
                message: message.to_string(),
            })
        };
        if self.deltas.is_empty() {
            return fail("no deltas");
        }
        match self.kind {
            ChangeKind::ComponentAdded => {
                if self.source_component.is_some() || self.target_component.is_none() {
                    return fail("added component must name only a target");
                }
                if self.removed_count() > 0 {
                    return fail("added component carries removals");
                }
            }
            ChangeKind::ComponentRemoved => {
                if self.target_component.is_some() || self.source_component.is_none() {
                    return fail("removed component must name only a source");
                }
                if self.added_count() > 0 {
                    return fail("removed component carries additions");
                }
            }
            ChangeKind::ComponentModified => {
                if self.source_component.is_none() || self.target_component.is_none() {
                    return fail("modified component must name source and target");
                }
            }
        }
        Ok(())
    }

    pub fn added_count(&self) -> usize {
        self.deltas.iter().filter(|d| d.kind == DeltaKind::AddEntity).count()
    }

    pub fn removed_count(&self) -> usize {
        self.deltas.iter().filter(|d| d.kind == DeltaKind::RemoveEntity).count()
    }

    /// Entities touched by any delta of this change.
    pub fn entities(&self) -> impl Iterator<Item = &EntityId> {
        self.deltas.iter().map(|d| &d.entity)
    }

    /// Component name used when describing the change to a reader.
    pub fn display_component(&self) -> String {
        match (&self.source_component, &self.target_component) {
            (Some(a), Some(b)) if a != b => format!("{a} -> {b}"),
            (_, Some(b)) => b.clone(),
            (Some(a), None) => a.clone(),
            (None, None) => String::from("?"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(names: &[&str]) -> BTreeSet<EntityId> {
        names.iter().map(|n| EntityId::new(*n).unwrap()).collect()
    }

    #[test]
    fn parses_components_in_order() {
        let snap = parse_snapshot("contain C1 a\ncontain C1 b\ncontain C2 c", "1.0").unwrap();
        assert_eq!(snap.version, "1.0");
        assert_eq!(snap.components().len(), 2);
        assert_eq!(snap.components()[0].name, "C1");
        assert_eq!(snap.components()[0].entities, ids(&["a", "b"]));
        assert_eq!(snap.components()[1].entities, ids(&["c"]));
    }

    #[test]
    fn rejects_entity_in_two_components() {
        let err = parse_snapshot("contain C1 a\ncontain C2 a", "1.0").unwrap_err();
        assert_eq!(
            err,
            ModelError::PartitionViolation {
                entity: "a".into(),
                first: "C1".into(),
                second: "C2".into()
            }
        );
    }

    #[test]
    fn empty_file_gives_empty_snapshot() {
        let snap = parse_snapshot("", "1.0").unwrap();
        assert!(snap.components().is_empty());
        assert!(snap.entity_universe().is_empty());
    }

    #[test]
    fn tolerates_repeats_comments_and_extra_spaces() {
        let text = "# header\n\ncontain   C1  a\ncontain C1 a\n\tcontain C1 b  \n";
        let snap = parse_snapshot(text, "v").unwrap();
        assert_eq!(snap.components()[0].entities, ids(&["a", "b"]));
    }

    #[test]
    fn reports_line_number_of_bad_record() {
        let err = parse_snapshot("contain C1 a\ncontain C1\n", "v").unwrap_err();
        assert!(matches!(err, ModelError::Syntax { line: 2, .. }), "{err}");
        let err = parse_snapshot("contain C1 a b\n", "v").unwrap_err();
        assert!(matches!(err, ModelError::Syntax { line: 1, .. }));
        let err = parse_snapshot("\nreferences C1 a\n", "v").unwrap_err();
        assert!(matches!(err, ModelError::Syntax { line: 2, .. }));
    }

    #[test]
    fn reserved_dummy_names_are_rejected() {
        let err = parse_snapshot("contain __dummy_0 a\n", "v").unwrap_err();
        assert!(matches!(err, ModelError::ReservedName(_)));
    }

    #[test]
    fn universe_is_union_of_components() {
        let snap = parse_snapshot("contain C1 a\ncontain C1 b\ncontain C2 c", "v").unwrap();
        assert_eq!(snap.entity_universe(), ids(&["a", "b", "c"]));

        let with_dummy = ArchitectureSnapshot {
            version: "v".into(),
            components: vec![Component::new("C1", ids(&["a"])), Component::dummy(0)],
        };
        assert_eq!(with_dummy.entity_universe(), ids(&["a"]));
    }

    #[test]
    fn entity_names_must_be_trimmed_and_non_empty() {
        assert!(EntityId::new("").is_err());
        assert!(EntityId::new(" a").is_err());
        assert!(EntityId::new("org.a.B").is_ok());
        assert!(serde_json::from_str::<EntityId>("\"\"").is_err());
    }

    #[test]
    fn change_validation() {
        let vp = VersionPair::new("1", "2");
        let mut change = ArchitecturalChange {
            id: "x".into(),
            kind: ChangeKind::ComponentAdded,
            source_component: None,
            target_component: Some("C".into()),
            deltas: [Delta::add(EntityId::new("a").unwrap())].into(),
            version_pair: vp,
        };
        assert!(change.validate().is_ok());
        change.deltas.insert(Delta::remove(EntityId::new("b").unwrap()));
        assert!(change.validate().is_err());
        change.deltas.clear();
        assert!(change.validate().is_err());
    }
}
