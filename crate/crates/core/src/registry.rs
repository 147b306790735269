//! Name-keyed registries of interchangeable strategies.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Strategies of one kind, registered under unique names.
pub struct Registry<T: ?Sized> {
    kind: &'static str,
    default: Option<&'static str>,
    entries: BTreeMap<&'static str, Box<T>>,
}

impl<T: ?Sized> Registry<T> {
    pub fn new(kind: &'static str) -> Self {
        Registry { kind, default: None, entries: BTreeMap::new() }
    }

    /// Registers a strategy; the first one registered becomes the default.
    ///
    /// Panics on a duplicate name.
    pub fn register(&mut self, name: &'static str, strategy: Box<T>) -> &mut Self {
        assert!(self.entries.insert(name, strategy).is_none(), "duplicate {} `{name}`", self.kind);
        self.default.get_or_insert(name);
        self
    }

    pub fn get(&self, name: &str) -> Result<&T> {
        self.entries.get(name).map(|b| &**b).ok_or_else(|| Error::UnknownName {
            kind: self.kind,
            name: name.to_owned(),
            available: self.names().collect::<Vec<_>>().join(", "),
        })
    }

    pub fn default_name(&self) -> Option<&'static str> {
        self.default
    }

    pub fn get_default(&self) -> Option<&T> {
        self.default.and_then(|n| self.entries.get(n)).map(|b| &**b)
    }

    /// Looks up `name`, or the default when `None`.
    pub fn resolve(&self, name: Option<&str>) -> Result<&T> {
        match name {
            Some(n) => self.get(n),
            None => self.get_default().ok_or_else(|| Error::invalid(format!("no {} registered", self.kind))),
        }
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.entries.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}
