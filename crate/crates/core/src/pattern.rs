//! Symbols and patterns, the only knowledge representation the learner uses.

use std::fmt;

use crate::error::{Error, Result};

pub const LEFT_BRACKET: &str = "<";
pub const RIGHT_BRACKET: &str = ">";
pub const CLASS_PREFIX: char = '%';

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IdKind {
    LeftBracket,
    RightBracket,
    ClassSymbol,
    Discriminator,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Role {
    /// Content symbol.
    C,
    /// Identification symbol.
    Id(IdKind),
}

/// Classify a token by the ID-symbol namespace. Anything outside it is a C-symbol.
pub fn role_of_name(name: &str) -> Role {
    match name {
        LEFT_BRACKET => Role::Id(IdKind::LeftBracket),
        RIGHT_BRACKET => Role::Id(IdKind::RightBracket),
        _ if is_class_name(name) => Role::Id(IdKind::ClassSymbol),
        _ if !name.is_empty() && name.bytes().all(|b| b.is_ascii_digit()) => {
            Role::Id(IdKind::Discriminator)
        }
        _ => Role::C,
    }
}

fn is_class_name(name: &str) -> bool {
    name.starts_with(CLASS_PREFIX) && name.len() > 1
}

/// True when `name` would be read back as an ID-symbol.
pub fn in_id_namespace(name: &str) -> bool {
    name.starts_with(CLASS_PREFIX) || role_of_name(name) != Role::C
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Symbol {
    name: String,
    role: Role,
    provenance: Option<usize>,
}

impl Symbol {
    pub fn new(name: impl Into<String>, role: Role) -> Result<Self> {
        let name = name.into();
        if name.is_empty() || name.chars().any(char::is_whitespace) {
            return Err(Error::InvalidArgument(format!(
                "symbol name {name:?} is empty or contains whitespace"
            )));
        }
        Ok(Symbol {
            name,
            role,
            provenance: None,
        })
    }

    /// A symbol whose role is inferred from its name.
    pub fn parse(name: &str) -> Result<Self> {
        Symbol::new(name, role_of_name(name))
    }

    pub fn content(name: impl Into<String>) -> Result<Self> {
        Symbol::new(name, Role::C)
    }

    pub fn left_bracket() -> Self {
        Symbol::id(LEFT_BRACKET.to_string(), IdKind::LeftBracket)
    }

    pub fn right_bracket() -> Self {
        Symbol::id(RIGHT_BRACKET.to_string(), IdKind::RightBracket)
    }

    pub fn class(number: u32) -> Self {
        Symbol::id(format!("{CLASS_PREFIX}{number}"), IdKind::ClassSymbol)
    }

    pub fn discriminator(number: u32) -> Self {
        Symbol::id(number.to_string(), IdKind::Discriminator)
    }

    fn id(name: String, kind: IdKind) -> Self {
        Symbol {
            name,
            role: Role::Id(kind),
            provenance: None,
        }
    }

    pub fn with_provenance(mut self, index: usize) -> Self {
        self.provenance = Some(index);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn role(&self) -> Role {
        self.role
    }

    pub fn id_kind(&self) -> Option<IdKind> {
        match self.role {
            Role::Id(kind) => Some(kind),
            Role::C => None,
        }
    }

    pub fn is_id(&self) -> bool {
        matches!(self.role, Role::Id(_))
    }

    pub fn is_content(&self) -> bool {
        self.role == Role::C
    }

    pub fn is(&self, kind: IdKind) -> bool {
        self.role == Role::Id(kind)
    }

    pub fn provenance(&self) -> Option<usize> {
        self.provenance
    }

    /// Symbols match on name alone.
    pub fn matches(&self, other: &Symbol) -> bool {
        self.name == other.name
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PatternId(pub u32);

impl PatternId {
    pub const UNASSIGNED: PatternId = PatternId(u32::MAX);
}

impl fmt::Display for PatternId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Origin {
    NewInput,
    SelfCopy,
    DerivedSegment,
    DerivedAbstract,
}

/// A slot `< %c >` inside an abstract pattern, by position of its left bracket.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Slot {
    pub start: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Pattern {
    pub id: PatternId,
    symbols: Vec<Symbol>,
    pub frequency: u64,
    pub origin: Origin,
    pub encoding_cost: Option<f64>,
}

/// Build a pattern. Its id stays unassigned until it is added to a corpus or
/// repository, both of which hand out sequential ids.
pub fn make_pattern(symbols: Vec<Symbol>, origin: Origin) -> Result<Pattern> {
    if symbols.is_empty() {
        return Err(Error::InvalidArgument(
            "a pattern needs at least one symbol".into(),
        ));
    }
    let pattern = Pattern {
        id: PatternId::UNASSIGNED,
        symbols,
        frequency: 0,
        origin,
        encoding_cost: None,
    };
    if origin != Origin::NewInput {
        pattern.check_wrapped()?;
    }
    Ok(pattern)
}

impl Pattern {
    /// Build without the shape check applied to derived patterns. Used for
    /// tidied grammars, whose patterns may have lost their class symbol.
    pub(crate) fn unchecked(symbols: Vec<Symbol>, origin: Origin) -> Result<Pattern> {
        if symbols.is_empty() {
            return Err(Error::InvalidArgument(
                "a pattern needs at least one symbol".into(),
            ));
        }
        Ok(Pattern {
            id: PatternId::UNASSIGNED,
            symbols,
            frequency: 0,
            origin,
            encoding_cost: None,
        })
    }

    /// Parse a whitespace separated line, inferring roles from the namespace.
    pub fn parse_line(line: &str, origin: Origin) -> Result<Pattern> {
        let symbols = line
            .split_whitespace()
            .map(Symbol::parse)
            .collect::<Result<Vec<_>>>()?;
        make_pattern(symbols, origin)
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn content(&self) -> impl Iterator<Item = &Symbol> + '_ {
        self.symbols.iter().filter(|s| s.is_content())
    }

    pub fn content_names(&self) -> Vec<&str> {
        self.content().map(Symbol::name).collect()
    }

    /// The pattern's own class symbol, i.e. the one directly after its left bracket.
    pub fn class_symbol(&self) -> Option<&str> {
        match self.symbols.as_slice() {
            [first, second, ..] if first.is(IdKind::LeftBracket) && second.is(IdKind::ClassSymbol) => {
                Some(second.name())
            }
            _ => None,
        }
    }

    /// The pattern's own discriminator, if it carries one at top level.
    pub fn discriminator(&self) -> Option<&str> {
        let body = self.top_level_ids();
        body.into_iter()
            .map(|i| &self.symbols[i])
            .find(|s| s.is(IdKind::Discriminator))
            .map(Symbol::name)
    }

    /// Slots `< %c >` nested inside this pattern, left to right.
    pub fn slots(&self) -> Vec<Slot> {
        let n = self.symbols.len();
        let mut out = Vec::new();
        let mut i = 1;
        while i + 3 < n {
            if self.is_slot_at(i) {
                out.push(Slot { start: i });
                i += 3;
            } else {
                i += 1;
            }
        }
        out
    }

    pub fn is_slot_at(&self, i: usize) -> bool {
        i > 0
            && i + 3 < self.symbols.len()
            && self.symbols[i].is(IdKind::LeftBracket)
            && self.symbols[i + 1].is(IdKind::ClassSymbol)
            && self.symbols[i + 2].is(IdKind::RightBracket)
    }

    /// Class names referenced by this pattern's slots.
    pub fn slot_classes(&self) -> Vec<&str> {
        self.slots()
            .into_iter()
            .map(|s| self.symbols[s.start + 1].name())
            .collect()
    }

    /// Positions of ID-symbols that are not part of a nested slot.
    fn top_level_ids(&self) -> Vec<usize> {
        let mut in_slot = vec![false; self.symbols.len()];
        for slot in self.slots() {
            in_slot[slot.start..slot.start + 3].fill(true);
        }
        (0..self.symbols.len())
            .filter(|&i| !in_slot[i] && self.symbols[i].is_id())
            .collect()
    }

    fn check_wrapped(&self) -> Result<()> {
        let n = self.symbols.len();
        let bad = |why: &str| {
            Err(Error::InvalidArgument(format!(
                "pattern `{}` {why}",
                self.to_line()
            )))
        };
        if n < 3
            || !self.symbols[0].is(IdKind::LeftBracket)
            || !self.symbols[n - 1].is(IdKind::RightBracket)
        {
            return bad("must begin with `<` and end with `>`");
        }
        let top = self.top_level_ids();
        let classes = top
            .iter()
            .filter(|&&i| self.symbols[i].is(IdKind::ClassSymbol))
            .count();
        let discriminators = top
            .iter()
            .filter(|&&i| self.symbols[i].is(IdKind::Discriminator))
            .count();
        if classes != 1 {
            return bad("must carry exactly one class symbol");
        }
        if discriminators > 1 {
            return bad("carries more than one discriminator");
        }
        if top.iter().any(|&i| {
            i != 0 && i != n - 1 && self.symbols[i].id_kind().is_some_and(|k| {
                matches!(k, IdKind::LeftBracket | IdKind::RightBracket)
            })
        }) {
            return bad("has an unbalanced bracket");
        }
        Ok(())
    }

    pub fn to_line(&self) -> String {
        let mut out = String::new();
        for (i, s) in self.symbols.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            out.push_str(s.name());
        }
        out
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_line())
    }
}
