//! Invariant checks for the domain types. Violations are data: `validate`
//! never fails, it reports.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use chrono::Datelike;

use crate::model::entities::{
    AnnotationRecord, AnnotationScheme, AnnotatorId, Message, ParticipantEntity, Person, PersonFacts,
    Situation, ValueDomain,
};
use crate::model::term::{Iri, Literal, Triple};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Violation {
    pub field: String,
    pub rule: String,
}

impl Violation {
    pub fn new(field: impl Into<String>, rule: impl Into<String>) -> Self {
        Violation {
            field: field.into(),
            rule: rule.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.rule)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn push(&mut self, field: impl Into<String>, rule: impl Into<String>) {
        self.violations.push(Violation::new(field, rule));
    }

    fn extend_prefixed(&mut self, prefix: &str, other: ValidationReport) {
        for v in other.violations {
            self.push(format!("{prefix}.{}", v.field), v.rule);
        }
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

pub trait Validate {
    fn validate(&self) -> ValidationReport;
}

// Terms are validated at construction; a constructed value always passes.
impl Validate for Iri {
    fn validate(&self) -> ValidationReport {
        ValidationReport::default()
    }
}

impl Validate for Literal {
    fn validate(&self) -> ValidationReport {
        ValidationReport::default()
    }
}

impl Validate for Triple {
    fn validate(&self) -> ValidationReport {
        ValidationReport::default()
    }
}

/// Checks a raw string against the IRI invariants.
pub fn validate_iri_str(value: &str) -> ValidationReport {
    let mut report = ValidationReport::default();
    if let Err(e) = Iri::new(value) {
        report.push("value", e.to_string());
    }
    report
}

impl Validate for Message {
    fn validate(&self) -> ValidationReport {
        let mut r = ValidationReport::default();
        if self.id.is_empty() {
            r.push("id", "must be non-empty");
        }
        if self.text.is_empty() {
            r.push("text", "must be non-empty");
        }
        if self.corpus_ids.is_empty() {
            r.push("corpusIds", "must contain at least one corpus");
        }
        if self.corpus_ids.iter().any(|c| c.is_empty()) {
            r.push("corpusIds", "corpus identifiers must be non-empty");
        }
        r
    }
}

impl Validate for AnnotationScheme {
    fn validate(&self) -> ValidationReport {
        let mut r = ValidationReport::default();
        if self.name.trim().is_empty() {
            r.push("name", "must be non-empty");
        }
        match &self.domain {
            ValueDomain::Binary => {}
            ValueDomain::Categorical(labels) => {
                if labels.is_empty() {
                    r.push("valueDomain", "categorical label set must be non-empty");
                }
                let distinct: HashSet<&String> = labels.iter().collect();
                if distinct.len() != labels.len() {
                    r.push("valueDomain", "categorical labels must be duplicate-free");
                }
                if labels.iter().any(|l| l.is_empty()) {
                    r.push("valueDomain", "categorical labels must be non-empty");
                }
            }
            ValueDomain::IntegerScale { min, max } => {
                if min >= max {
                    r.push("valueDomain", format!("integer scale needs min < max (got {min}..{max})"));
                }
            }
        }
        r
    }
}

impl Validate for AnnotatorId {
    fn validate(&self) -> ValidationReport {
        let mut r = ValidationReport::default();
        if let AnnotatorId::Individual(id) = self {
            let ok = id
                .strip_prefix("annotator_")
                .is_some_and(|n| !n.is_empty() && n.bytes().all(|b| b.is_ascii_digit()));
            if !ok {
                r.push("annotator", format!("`{id}` does not match annotator_<n>"));
            }
        }
        r
    }
}

impl Validate for AnnotationRecord {
    fn validate(&self) -> ValidationReport {
        let mut r = ValidationReport::default();
        if self.message_ref.is_empty() {
            r.push("messageRef", "must be non-empty");
        }
        r.extend_prefixed("scheme", self.scheme.validate());
        if !self.scheme.contains(&self.value) {
            r.push(
                "value",
                format!("value out of domain: `{}` not in scheme `{}`", self.value, self.scheme.name),
            );
        }
        for v in self.annotator.validate().violations {
            r.violations.push(v);
        }
        r
    }
}

/// Collection-level check: one judgment per (message, scheme, annotator).
pub fn validate_records(records: &[AnnotationRecord]) -> ValidationReport {
    let mut r = ValidationReport::default();
    let mut seen = HashSet::new();
    for (i, rec) in records.iter().enumerate() {
        r.extend_prefixed(&format!("records[{i}]"), rec.validate());
        let key = (&rec.message_ref, &rec.scheme.name, &rec.annotator);
        if !seen.insert(key) {
            r.push(
                format!("records[{i}]"),
                format!(
                    "duplicate judgment for (message `{}`, scheme `{}`, annotator `{}`)",
                    rec.message_ref, rec.scheme.name, rec.annotator
                ),
            );
        }
    }
    r
}

pub const MIN_BIRTH_YEAR: i32 = 1850;

impl Validate for PersonFacts {
    fn validate(&self) -> ValidationReport {
        let mut r = ValidationReport::default();
        if let Some(year) = self.birth_year {
            let current = chrono::Utc::now().year();
            if !(MIN_BIRTH_YEAR..=current).contains(&year) {
                r.push("birthYear", format!("{year} outside [{MIN_BIRTH_YEAR}, {current}]"));
            }
        }
        if self.gender.as_deref().is_some_and(|g| g.trim().is_empty()) {
            r.push("gender", "must be non-empty when present");
        }
        r
    }
}

impl Validate for Person {
    fn validate(&self) -> ValidationReport {
        let mut r = ValidationReport::default();
        if self.id.is_empty() {
            r.push("id", "must be non-empty");
        }
        if let Some(handle) = &self.handle {
            if !handle.starts_with('@') || handle.len() < 2 {
                r.push("handle", format!("handle missing \"@\": `{handle}`"));
            }
        }
        if let Some(pid) = &self.platform_id {
            if pid.is_empty() {
                r.push("platformId", "must be non-empty when present");
            }
        }
        if let Some(facts) = &self.facts {
            r.extend_prefixed("facts", facts.validate());
        }
        r
    }
}

impl Validate for Situation {
    fn validate(&self) -> ValidationReport {
        let mut r = ValidationReport::default();
        if self.id.is_empty() {
            r.push("id", "must be non-empty");
        }
        if !self.participants.iter().any(|p| p.entity.is_message()) {
            r.push("participants", "at least one message participant required");
        }
        let keys: BTreeSet<&str> = self.participants.iter().map(|p| p.entity.key()).collect();
        for (i, p) in self.participants.iter().enumerate() {
            let field = format!("participants[{i}]");
            let is_message = p.entity.is_message();
            if p.role.applies_to_messages() != is_message {
                let what = if is_message { "a message" } else { "an agent" };
                r.push(&field, format!("role {} cannot attach to {what}", p.role.local_name()));
            }
            if let Some(target) = &p.target {
                if !keys.contains(target.as_str()) {
                    r.push(&field, format!("target `{target}` is not a participant of the situation"));
                }
            }
            match &p.entity {
                ParticipantEntity::Message(m) => r.extend_prefixed(&field, m.validate()),
                ParticipantEntity::Person(person) => r.extend_prefixed(&field, person.validate()),
                ParticipantEntity::Group(_) => {}
            }
        }
        r
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::model::entities::{AnnotationValue, Genre, Participant, Role};

    fn intensity() -> Arc<AnnotationScheme> {
        Arc::new(AnnotationScheme::new("intensity", ValueDomain::IntegerScale { min: 0, max: 4 }))
    }

    fn record(value: i64, annotator: AnnotatorId) -> AnnotationRecord {
        AnnotationRecord {
            message_ref: "m1".into(),
            scheme: intensity(),
            value: AnnotationValue::Int(value),
            annotator,
        }
    }

    #[test]
    fn value_out_of_domain() {
        let report = record(5, AnnotatorId::GoldStandard).validate();
        assert_eq!(report.violations.len(), 1);
        assert_eq!(report.violations[0].field, "value");
        assert!(report.violations[0].rule.contains("out of domain"));
    }

    #[test]
    fn well_formed_record_passes() {
        assert!(record(3, AnnotatorId::individual(1)).validate().is_ok());
    }

    #[test]
    fn handle_without_at() {
        let mut p = Person::new("usr_1");
        p.handle = Some("ckyenge".into());
        let report = p.validate();
        assert_eq!(report.violations.len(), 1);
        assert_eq!(report.violations[0].field, "handle");
        assert!(report.violations[0].rule.contains("missing \"@\""));
    }

    #[test]
    fn annotator_pattern() {
        assert!(AnnotatorId::Individual("annotator_12".into()).validate().is_ok());
        assert!(!AnnotatorId::Individual("mario.rossi".into()).validate().is_ok());
        assert!(!AnnotatorId::Individual("annotator_".into()).validate().is_ok());
        assert!(AnnotatorId::GoldStandard.validate().is_ok());
    }

    #[test]
    fn duplicate_judgment_rejected() {
        let records = vec![
            record(1, AnnotatorId::individual(1)),
            record(2, AnnotatorId::individual(1)),
            record(2, AnnotatorId::individual(2)),
        ];
        let report = validate_records(&records);
        assert_eq!(report.violations.len(), 1);
        assert_eq!(report.violations[0].field, "records[1]");
    }

    #[test]
    fn scheme_invariants() {
        let bad_scale = AnnotationScheme::new("x", ValueDomain::IntegerScale { min: 4, max: 4 });
        assert!(!bad_scale.validate().is_ok());
        let dup = AnnotationScheme::new("x", ValueDomain::Categorical(vec!["a".into(), "a".into()]));
        assert!(!dup.validate().is_ok());
        let empty = AnnotationScheme::new("x", ValueDomain::Categorical(vec![]));
        assert!(!empty.validate().is_ok());
    }

    #[test]
    fn birth_year_bounds() {
        let facts = PersonFacts {
            birth_year: Some(1849),
            ..Default::default()
        };
        assert!(!facts.validate().is_ok());
        let facts = PersonFacts {
            birth_year: Some(1985),
            ..Default::default()
        };
        assert!(facts.validate().is_ok());
    }

    #[test]
    fn situation_rules() {
        let msg = Message::new("m1", "testo", Genre::Tweet, "c");
        let person = Person::new("@ckyenge");
        let ok = Situation {
            id: "s1".into(),
            participants: vec![
                Participant {
                    entity: ParticipantEntity::Message(msg.clone()),
                    role: Role::HateSpeechMessage,
                    target: Some("@ckyenge".into()),
                },
                Participant {
                    entity: ParticipantEntity::Person(person.clone()),
                    role: Role::Addressee,
                    target: None,
                },
            ],
        };
        assert!(ok.validate().is_ok(), "{}", ok.validate());

        let mut dangling = ok.clone();
        dangling.participants.pop();
        assert!(!dangling.validate().is_ok());

        let mut swapped = ok.clone();
        swapped.participants[0].role = Role::Addressee;
        swapped.participants[1].role = Role::HateSpeechMessage;
        assert_eq!(swapped.validate().violations.len(), 2);

        let no_message = Situation {
            id: "s2".into(),
            participants: vec![Participant {
                entity: ParticipantEntity::Person(person),
                role: Role::Target,
                target: None,
            }],
        };
        assert!(!no_message.validate().is_ok());
    }
}
