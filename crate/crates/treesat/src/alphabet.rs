//! Ranked many-sorted alphabets with a control/stack symbol split.
//!
//! One sort is distinguished as `conf`, the sort of whole configurations.
//! Control symbols are exactly the symbols producing `conf`, and no symbol
//! consumes `conf`, so a control symbol can only ever sit at the root of a
//! well-sorted term. Everything downstream (root rewriting, deep transitions
//! applying at roots only) leans on that structural fact.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use thiserror::Error;

/// Name of the distinguished configuration sort. Always declared.
pub const CONF_SORT: &str = "conf";

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct SortId(pub u32);

/// Symbol ids are assigned in lexicographic name order, so ordering ids
/// orders symbols by name. Canonical term ordering relies on this.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct SymbolId(pub u32);

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum SymbolKind {
    Control,
    Stack,
}

impl fmt::Display for SymbolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SymbolKind::Control => write!(f, "control"),
            SymbolKind::Stack => write!(f, "stack"),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Symbol {
    pub name: String,
    pub args: Vec<SortId>,
    pub result: SortId,
    pub kind: SymbolKind,
}

impl Symbol {
    pub fn arity(&self) -> usize {
        self.args.len()
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AlphabetError {
    #[error("duplicate symbol `{0}`")]
    DuplicateSymbol(String),
    #[error("duplicate sort `{0}`")]
    DuplicateSort(String),
    #[error("sort `{0}` is not declared")]
    UnknownSort(String),
    #[error("control symbol `{0}` must have result sort `conf`")]
    ControlResult(String),
    #[error("stack symbol `{0}` must not have result sort `conf`")]
    StackResult(String),
    #[error("symbol `{0}` takes `conf` as an argument")]
    ConfArgument(String),
    #[error("`{0}` is not a valid identifier")]
    BadIdentifier(String),
}

pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// An immutable ranked alphabet. Built through [`AlphabetBuilder`], which is
/// where all invariants are enforced.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RankedAlphabet {
    sorts: Vec<String>,
    sort_ids: BTreeMap<String, SortId>,
    symbols: Vec<Symbol>,
    symbol_ids: BTreeMap<String, SymbolId>,
    by_result: BTreeMap<SortId, Vec<SymbolId>>,
    conf: SortId,
}

impl RankedAlphabet {
    pub fn builder() -> AlphabetBuilder {
        AlphabetBuilder::new()
    }

    pub fn conf_sort(&self) -> SortId {
        self.conf
    }

    pub fn sort_name(&self, id: SortId) -> &str {
        &self.sorts[id.0 as usize]
    }

    pub fn sort_id(&self, name: &str) -> Option<SortId> {
        self.sort_ids.get(name).copied()
    }

    pub fn sorts(&self) -> impl Iterator<Item = (SortId, &str)> {
        self.sorts
            .iter()
            .enumerate()
            .map(|(i, n)| (SortId(i as u32), n.as_str()))
    }

    pub fn symbol(&self, id: SymbolId) -> &Symbol {
        &self.symbols[id.0 as usize]
    }

    pub fn symbol_id(&self, name: &str) -> Option<SymbolId> {
        self.symbol_ids.get(name).copied()
    }

    pub fn symbols(&self) -> impl Iterator<Item = (SymbolId, &Symbol)> {
        self.symbols
            .iter()
            .enumerate()
            .map(|(i, s)| (SymbolId(i as u32), s))
    }

    /// Symbols whose result sort is `sort`, in name order.
    pub fn symbols_with_result(&self, sort: SortId) -> &[SymbolId] {
        self.by_result.get(&sort).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn is_control(&self, id: SymbolId) -> bool {
        self.symbol(id).kind == SymbolKind::Control
    }
}

#[derive(Default)]
pub struct AlphabetBuilder {
    sorts: Vec<String>,
    symbols: Vec<(String, Vec<String>, String, SymbolKind)>,
}

impl AlphabetBuilder {
    pub fn new() -> Self {
        AlphabetBuilder {
            sorts: vec![CONF_SORT.to_string()],
            symbols: Vec::new(),
        }
    }

    pub fn sort(mut self, name: &str) -> Self {
        if name != CONF_SORT {
            self.sorts.push(name.to_string());
        }
        self
    }

    pub fn symbol(mut self, name: &str, args: &[&str], result: &str, kind: SymbolKind) -> Self {
        self.symbols.push((
            name.to_string(),
            args.iter().map(|s| s.to_string()).collect(),
            result.to_string(),
            kind,
        ));
        self
    }

    /// Control symbol: result sort is `conf`.
    pub fn control(self, name: &str, args: &[&str]) -> Self {
        self.symbol(name, args, CONF_SORT, SymbolKind::Control)
    }

    pub fn stack(self, name: &str, args: &[&str], result: &str) -> Self {
        self.symbol(name, args, result, SymbolKind::Stack)
    }

    pub fn finish(self) -> Result<RankedAlphabet, AlphabetError> {
        let mut seen = BTreeSet::new();
        for s in &self.sorts {
            if !is_identifier(s) {
                return Err(AlphabetError::BadIdentifier(s.clone()));
            }
            if !seen.insert(s.clone()) {
                return Err(AlphabetError::DuplicateSort(s.clone()));
            }
        }
        let mut sorts: Vec<String> = seen.into_iter().collect();
        sorts.sort();
        let sort_ids: BTreeMap<String, SortId> = sorts
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), SortId(i as u32)))
            .collect();
        let conf = sort_ids[CONF_SORT];

        let mut defs = self.symbols;
        defs.sort_by(|a, b| a.0.cmp(&b.0));
        let mut symbols = Vec::with_capacity(defs.len());
        let mut symbol_ids = BTreeMap::new();
        let mut by_result: BTreeMap<SortId, Vec<SymbolId>> = BTreeMap::new();
        for (name, args, result, kind) in defs {
            if !is_identifier(&name) {
                return Err(AlphabetError::BadIdentifier(name));
            }
            if symbol_ids.contains_key(&name) {
                return Err(AlphabetError::DuplicateSymbol(name));
            }
            let result_id = *sort_ids
                .get(&result)
                .ok_or_else(|| AlphabetError::UnknownSort(result.clone()))?;
            if kind == SymbolKind::Control && result_id != conf {
                return Err(AlphabetError::ControlResult(name));
            }
            if kind == SymbolKind::Stack && result_id == conf {
                return Err(AlphabetError::StackResult(name));
            }
            let mut arg_ids = Vec::with_capacity(args.len());
            for a in &args {
                let aid = *sort_ids
                    .get(a)
                    .ok_or_else(|| AlphabetError::UnknownSort(a.clone()))?;
                if aid == conf {
                    return Err(AlphabetError::ConfArgument(name));
                }
                arg_ids.push(aid);
            }
            let id = SymbolId(symbols.len() as u32);
            symbol_ids.insert(name.clone(), id);
            by_result.entry(result_id).or_default().push(id);
            symbols.push(Symbol {
                name,
                args: arg_ids,
                result: result_id,
                kind,
            });
        }

        Ok(RankedAlphabet {
            sorts,
            sort_ids,
            symbols,
            symbol_ids,
            by_result,
            conf,
        })
    }
}
