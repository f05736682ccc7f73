//! Program states over a fixed, ordered domain of variables.
//!
//! The domain never changes during an execution: updating a variable that is
//! not in the domain is a no-op, and looking one up in a partial state yields
//! a hole. Two partial states are only comparable when their domains are the
//! same sequence of names.

use std::fmt;
use std::sync::Arc;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("variable `{0}` occurs more than once in the state")]
pub struct DuplicateVariable(pub String);

/// Ordered variable names shared between all states of one execution.
#[derive(Clone, Debug, Eq)]
pub struct Domain(Arc<[String]>);

impl Domain {
    pub fn new<I, S>(names: I) -> Result<Self, DuplicateVariable>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        for (i, name) in names.iter().enumerate() {
            if names[..i].contains(name) {
                return Err(DuplicateVariable(name.clone()));
            }
        }
        Ok(Domain(names.into()))
    }

    pub fn empty() -> Self {
        Domain(Arc::from(Vec::<String>::new()))
    }

    pub fn names(&self) -> &[String] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.0.iter().position(|n| n == name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index_of(name).is_some()
    }
}

impl PartialEq for Domain {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}

impl std::hash::Hash for Domain {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.0.hash(state)
    }
}

/// A total state: every variable of the domain holds a natural.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct State {
    domain: Domain,
    values: Vec<u64>,
}

/// A state whose entries may be holes (`None`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PartialState {
    domain: Domain,
    values: Vec<Option<u64>>,
}

impl State {
    pub fn new<I, S>(entries: I) -> Result<Self, DuplicateVariable>
    where
        I: IntoIterator<Item = (S, u64)>,
        S: Into<String>,
    {
        let (names, values): (Vec<String>, Vec<u64>) = entries.into_iter().map(|(n, v)| (n.into(), v)).unzip();
        Ok(State {
            domain: Domain::new(names)?,
            values,
        })
    }

    pub fn from_parts(domain: Domain, values: Vec<u64>) -> Self {
        assert_eq!(domain.len(), values.len(), "state arity mismatch");
        State { domain, values }
    }

    pub fn empty() -> Self {
        State {
            domain: Domain::empty(),
            values: Vec::new(),
        }
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<u64> {
        self.domain.index_of(name).map(|i| self.values[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u64)> + '_ {
        self.domain
            .names()
            .iter()
            .map(String::as_str)
            .zip(self.values.iter().copied())
    }

    /// Replaces the binding of `name`; a no-op when `name` is not in the domain.
    pub fn update(&self, name: &str, value: u64) -> State {
        let mut next = self.clone();
        next.update_in_place(name, value);
        next
    }

    pub fn update_in_place(&mut self, name: &str, value: u64) {
        if let Some(i) = self.domain.index_of(name) {
            self.values[i] = value;
        }
    }

    pub fn partialize(&self) -> PartialState {
        PartialState {
            domain: self.domain.clone(),
            values: self.values.iter().copied().map(Some).collect(),
        }
    }

    /// The empty partial state over the same domain.
    pub fn blank(&self) -> PartialState {
        PartialState::blank(&self.domain)
    }
}

impl PartialState {
    pub fn new<I, S>(entries: I) -> Result<Self, DuplicateVariable>
    where
        I: IntoIterator<Item = (S, Option<u64>)>,
        S: Into<String>,
    {
        let (names, values): (Vec<String>, Vec<Option<u64>>) = entries.into_iter().map(|(n, v)| (n.into(), v)).unzip();
        Ok(PartialState {
            domain: Domain::new(names)?,
            values,
        })
    }

    pub fn from_parts(domain: Domain, values: Vec<Option<u64>>) -> Self {
        assert_eq!(domain.len(), values.len(), "state arity mismatch");
        PartialState { domain, values }
    }

    /// Every variable of `domain` mapped to a hole.
    pub fn blank(domain: &Domain) -> Self {
        PartialState {
            domain: domain.clone(),
            values: vec![None; domain.len()],
        }
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn values(&self) -> &[Option<u64>] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_blank(&self) -> bool {
        self.values.iter().all(Option::is_none)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, Option<u64>)> + '_ {
        self.domain
            .names()
            .iter()
            .map(String::as_str)
            .zip(self.values.iter().copied())
    }

    /// The bound value, or `None` (a hole) when unbound or not in the domain.
    pub fn lookup(&self, name: &str) -> Option<u64> {
        self.domain.index_of(name).and_then(|i| self.values[i])
    }

    /// Replaces the binding of `name`; a no-op when `name` is not in the domain.
    pub fn update(&self, name: &str, value: Option<u64>) -> PartialState {
        let mut next = self.clone();
        next.update_in_place(name, value);
        next
    }

    pub fn update_in_place(&mut self, name: &str, value: Option<u64>) {
        if let Some(i) = self.domain.index_of(name) {
            self.values[i] = value;
        }
    }

    pub fn blank_copy(&self) -> PartialState {
        PartialState::blank(&self.domain)
    }

    /// The total state, if no entry is a hole.
    pub fn to_total(&self) -> Option<State> {
        Some(State {
            domain: self.domain.clone(),
            values: self.values.iter().copied().collect::<Option<Vec<_>>>()?,
        })
    }
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (name, value)) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{name} = {value}")?;
        }
        Ok(())
    }
}

impl fmt::Display for PartialState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (name, value)) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            match value {
                Some(v) => write!(f, "{name} = {v}")?,
                None => write!(f, "{name} = _")?,
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct Entry<V> {
    name: String,
    value: V,
}

impl Serialize for State {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.iter().map(|(name, value)| Entry {
            name: name.to_owned(),
            value,
        }))
    }
}

impl<'de> Deserialize<'de> for State {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let entries = Vec::<Entry<u64>>::deserialize(deserializer)?;
        State::new(entries.into_iter().map(|e| (e.name, e.value))).map_err(D::Error::custom)
    }
}

impl Serialize for PartialState {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.iter().map(|(name, value)| Entry {
            name: name.to_owned(),
            value,
        }))
    }
}

impl<'de> Deserialize<'de> for PartialState {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let entries = Vec::<Entry<Option<u64>>>::deserialize(deserializer)?;
        PartialState::new(entries.into_iter().map(|e| (e.name, e.value))).map_err(D::Error::custom)
    }
}
