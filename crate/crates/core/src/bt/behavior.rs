use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Whether a leaf is a condition (`?`) or an action (`!`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LeafKind {
    Condition,
    Action,
}

/// A leaf behavior: a template with its brick and position parameters.
///
/// The textual form is the behavior's display name, e.g. `picked a?`,
/// `a at pos p?`, `put a on b!`. Conditions end in `?`, actions in `!`.
/// Equality is structural over template and parameters.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BehaviorId {
    /// `picked a?`
    Picked { brick: String },
    /// `a at pos p?`
    AtPos { brick: String, position: String },
    /// `a on b?`
    On { upper: String, lower: String },
    /// `gripper empty?`
    GripperEmpty,
    /// `pick a!`
    Pick { brick: String },
    /// `place on a!`
    PlaceOn { support: String },
    /// `place at pos p!`
    PlaceAt { position: String },
    /// `put a on b!`
    PutOn { brick: String, support: String },
    /// `put a at pos p!`
    PutAt { brick: String, position: String },
    /// `apply force a!`
    ApplyForce { brick: String },
}

impl BehaviorId {
    pub fn kind(&self) -> LeafKind {
        match self {
            BehaviorId::Picked { .. } | BehaviorId::AtPos { .. } | BehaviorId::On { .. } | BehaviorId::GripperEmpty => {
                LeafKind::Condition
            }
            _ => LeafKind::Action,
        }
    }

    pub fn is_condition(&self) -> bool {
        self.kind() == LeafKind::Condition
    }

    pub fn is_action(&self) -> bool {
        self.kind() == LeafKind::Action
    }

    /// Brick ids referenced by this behavior, in parameter order.
    pub fn bricks(&self) -> Vec<&str> {
        match self {
            BehaviorId::Picked { brick }
            | BehaviorId::AtPos { brick, .. }
            | BehaviorId::Pick { brick }
            | BehaviorId::PutAt { brick, .. }
            | BehaviorId::ApplyForce { brick } => alloc::vec![brick.as_str()],
            BehaviorId::On { upper, lower } => alloc::vec![upper.as_str(), lower.as_str()],
            BehaviorId::PlaceOn { support } => alloc::vec![support.as_str()],
            BehaviorId::PutOn { brick, support } => alloc::vec![brick.as_str(), support.as_str()],
            BehaviorId::GripperEmpty | BehaviorId::PlaceAt { .. } => Vec::new(),
        }
    }

    /// Position id referenced by this behavior, if any.
    pub fn position(&self) -> Option<&str> {
        match self {
            BehaviorId::AtPos { position, .. }
            | BehaviorId::PlaceAt { position }
            | BehaviorId::PutAt { position, .. } => Some(position),
            _ => None,
        }
    }

    pub fn picked(brick: &str) -> Self {
        BehaviorId::Picked { brick: brick.into() }
    }

    pub fn at_pos(brick: &str, position: &str) -> Self {
        BehaviorId::AtPos { brick: brick.into(), position: position.into() }
    }

    pub fn on(upper: &str, lower: &str) -> Self {
        BehaviorId::On { upper: upper.into(), lower: lower.into() }
    }

    pub fn pick(brick: &str) -> Self {
        BehaviorId::Pick { brick: brick.into() }
    }

    pub fn place_on(support: &str) -> Self {
        BehaviorId::PlaceOn { support: support.into() }
    }

    pub fn place_at(position: &str) -> Self {
        BehaviorId::PlaceAt { position: position.into() }
    }

    pub fn put_on(brick: &str, support: &str) -> Self {
        BehaviorId::PutOn { brick: brick.into(), support: support.into() }
    }

    pub fn put_at(brick: &str, position: &str) -> Self {
        BehaviorId::PutAt { brick: brick.into(), position: position.into() }
    }

    pub fn apply_force(brick: &str) -> Self {
        BehaviorId::ApplyForce { brick: brick.into() }
    }
}

impl fmt::Display for BehaviorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BehaviorId::Picked { brick } => write!(f, "picked {brick}?"),
            BehaviorId::AtPos { brick, position } => write!(f, "{brick} at pos {position}?"),
            BehaviorId::On { upper, lower } => write!(f, "{upper} on {lower}?"),
            BehaviorId::GripperEmpty => f.write_str("gripper empty?"),
            BehaviorId::Pick { brick } => write!(f, "pick {brick}!"),
            BehaviorId::PlaceOn { support } => write!(f, "place on {support}!"),
            BehaviorId::PlaceAt { position } => write!(f, "place at pos {position}!"),
            BehaviorId::PutOn { brick, support } => write!(f, "put {brick} on {support}!"),
            BehaviorId::PutAt { brick, position } => write!(f, "put {brick} at pos {position}!"),
            BehaviorId::ApplyForce { brick } => write!(f, "apply force {brick}!"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum BehaviorParseError {
    #[error("behavior name must end in '?' or '!': {0:?}")]
    MissingSuffix(String),
    #[error("invalid identifier {0:?} (allowed: letters, digits, '_', '-', '.')")]
    BadIdentifier(String),
    #[error("unknown behavior template: {0:?}")]
    UnknownTemplate(String),
}

/// Identifiers for bricks and positions.
pub fn is_valid_identifier(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'))
}

impl FromStr for BehaviorId {
    type Err = BehaviorParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (body, kind) = if let Some(body) = s.strip_suffix('?') {
            (body, LeafKind::Condition)
        } else if let Some(body) = s.strip_suffix('!') {
            (body, LeafKind::Action)
        } else {
            return Err(BehaviorParseError::MissingSuffix(s.to_string()));
        };
        let tokens: Vec<&str> = body.split(' ').collect();
        let id = |t: &str| -> Result<String, BehaviorParseError> {
            if is_valid_identifier(t) {
                Ok(t.to_string())
            } else {
                Err(BehaviorParseError::BadIdentifier(t.to_string()))
            }
        };
        let unknown = || BehaviorParseError::UnknownTemplate(s.to_string());
        match (kind, tokens.as_slice()) {
            (LeafKind::Condition, ["gripper", "empty"]) => Ok(BehaviorId::GripperEmpty),
            (LeafKind::Condition, ["picked", a]) => Ok(BehaviorId::Picked { brick: id(a)? }),
            (LeafKind::Condition, [a, "on", b]) => Ok(BehaviorId::On { upper: id(a)?, lower: id(b)? }),
            (LeafKind::Condition, [a, "at", "pos", p]) => Ok(BehaviorId::AtPos { brick: id(a)?, position: id(p)? }),
            (LeafKind::Action, ["pick", a]) => Ok(BehaviorId::Pick { brick: id(a)? }),
            (LeafKind::Action, ["place", "on", a]) => Ok(BehaviorId::PlaceOn { support: id(a)? }),
            (LeafKind::Action, ["apply", "force", a]) => Ok(BehaviorId::ApplyForce { brick: id(a)? }),
            (LeafKind::Action, ["place", "at", "pos", p]) => Ok(BehaviorId::PlaceAt { position: id(p)? }),
            (LeafKind::Action, ["put", a, "on", b]) => Ok(BehaviorId::PutOn { brick: id(a)?, support: id(b)? }),
            (LeafKind::Action, ["put", a, "at", "pos", p]) => Ok(BehaviorId::PutAt { brick: id(a)?, position: id(p)? }),
            _ => Err(unknown()),
        }
    }
}

impl Serialize for BehaviorId {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BehaviorId {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    #[test]
    fn display_and_parse_every_template() {
        let all = [
            BehaviorId::picked("a"),
            BehaviorId::at_pos("a", "p"),
            BehaviorId::on("a", "b"),
            BehaviorId::GripperEmpty,
            BehaviorId::pick("a"),
            BehaviorId::place_on("a"),
            BehaviorId::place_at("p"),
            BehaviorId::put_on("a", "b"),
            BehaviorId::put_at("a", "p"),
            BehaviorId::apply_force("a"),
        ];
        for b in all {
            let text = b.to_string();
            assert_eq!(text.parse::<BehaviorId>().unwrap(), b, "{text}");
        }
        assert_eq!(BehaviorId::at_pos("a", "p").to_string(), "a at pos p?");
        assert_eq!(BehaviorId::put_on("a", "b").to_string(), "put a on b!");
    }

    #[test]
    fn kinds_follow_suffix() {
        assert!(BehaviorId::picked("a").is_condition());
        assert!(BehaviorId::apply_force("a").is_action());
    }

    #[test]
    fn rejects_malformed_names() {
        assert!(matches!("picked a".parse::<BehaviorId>(), Err(BehaviorParseError::MissingSuffix(_))));
        assert!(matches!("x".parse::<BehaviorId>(), Err(BehaviorParseError::MissingSuffix(_))));
        assert!(matches!("jump a!".parse::<BehaviorId>(), Err(BehaviorParseError::UnknownTemplate(_))));
        assert!(matches!("pick a b!".parse::<BehaviorId>(), Err(BehaviorParseError::UnknownTemplate(_))));
        // an action template with a condition suffix
        assert!("pick a?".parse::<BehaviorId>().is_err());
        assert!(matches!("picked a\"?".parse::<BehaviorId>(), Err(BehaviorParseError::BadIdentifier(_))));
    }

    #[test]
    fn equality_covers_params() {
        assert_ne!(BehaviorId::on("a", "b"), BehaviorId::on("b", "a"));
        assert_eq!(BehaviorId::on("a", "b"), "a on b?".parse().unwrap());
    }
}
