//! Grammars (scored subsets of Old), their canonical form and tidying.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::pattern::{IdKind, Origin, Pattern, PatternId, Symbol};
use crate::repository::Repository;

#[derive(Debug, Clone, PartialEq)]
pub struct Grammar {
    pub members: BTreeSet<PatternId>,
    /// Grammar size in bits.
    pub g: f64,
    /// Encoded size of New in bits.
    pub e: f64,
    /// `g + e`.
    pub t: f64,
}

impl Grammar {
    pub fn new(members: BTreeSet<PatternId>, g: f64, e: f64) -> Self {
        Grammar { members, g, e, t: g + e }
    }

    pub fn empty() -> Self {
        Grammar::new(BTreeSet::new(), 0.0, 0.0)
    }

    pub fn patterns<'r>(&self, repo: &'r Repository) -> Result<Vec<&'r Pattern>> {
        self.members.iter().map(|&id| repo.get(id)).collect()
    }
}

/// A grammar with ID names renumbered by first use, for structural comparison.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalForm {
    pub lines: Vec<String>,
}

impl CanonicalForm {
    /// Patterns that contain exactly these C-symbol sequences, ignoring order.
    pub fn content_set(&self) -> BTreeSet<String> {
        self.lines
            .iter()
            .map(|l| {
                l.split_whitespace()
                    .filter(|t| crate::pattern::role_of_name(t) == crate::pattern::Role::C)
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect()
    }

    /// Load the form back as a repository fragment holding the whole grammar.
    pub fn to_repository(&self) -> Result<(Grammar, Repository)> {
        let mut repo = Repository::new();
        let mut members = BTreeSet::new();
        for line in &self.lines {
            members.insert(repo.add(parse_member(line)?));
        }
        Ok((Grammar::new(members, 0.0, 0.0), repo))
    }
}

/// Parse one grammar line, checking only that it is wrapped in brackets.
pub(crate) fn parse_member(line: &str) -> Result<Pattern> {
    let symbols = line
        .split_whitespace()
        .map(Symbol::parse)
        .collect::<Result<Vec<_>>>()?;
    let wrapped = symbols.len() >= 2
        && symbols[0].is(IdKind::LeftBracket)
        && symbols[symbols.len() - 1].is(IdKind::RightBracket);
    let depth_ok = symbols.iter().try_fold(0i64, |depth, s| {
        let d = match s.id_kind() {
            Some(IdKind::LeftBracket) => depth + 1,
            Some(IdKind::RightBracket) => depth - 1,
            _ => depth,
        };
        (d >= 0).then_some(d)
    }) == Some(0);
    if !wrapped || !depth_ok {
        return Err(Error::InvalidArgument(format!(
            "`{line}` is not a bracketed pattern"
        )));
    }
    let p = Pattern::unchecked(symbols, Origin::DerivedSegment)?;
    let origin = if p.slots().is_empty() {
        Origin::DerivedSegment
    } else {
        Origin::DerivedAbstract
    };
    Pattern::unchecked(p.symbols().to_vec(), origin)
}

/// Ordering that does not depend on ID names: C content, length, then the
/// symbol sequence with every class and discriminator masked.
fn structural_key(p: &Pattern) -> (String, usize, String) {
    let masked: Vec<&str> = p
        .symbols()
        .iter()
        .map(|s| match s.id_kind() {
            Some(IdKind::ClassSymbol) => "%",
            Some(IdKind::Discriminator) => "#",
            _ => s.name(),
        })
        .collect();
    (p.content_names().join(" "), p.len(), masked.join(" "))
}

#[derive(Default)]
struct Renamer {
    classes: BTreeMap<String, String>,
    discriminators: BTreeMap<String, String>,
}

impl Renamer {
    fn rename(&mut self, s: &Symbol) -> String {
        match s.id_kind() {
            Some(IdKind::ClassSymbol) => {
                let next = format!("%{}", self.classes.len() + 1);
                self.classes.entry(s.name().to_string()).or_insert(next).clone()
            }
            Some(IdKind::Discriminator) => {
                let next = (self.discriminators.len() + 1).to_string();
                self.discriminators
                    .entry(s.name().to_string())
                    .or_insert(next)
                    .clone()
            }
            _ => s.name().to_string(),
        }
    }
}

pub fn canonicalize(grammar: &Grammar, repo: &Repository) -> Result<CanonicalForm> {
    let mut patterns = grammar.patterns(repo)?;
    patterns.sort_by_cached_key(|p| structural_key(p));
    let mut renamer = Renamer::default();
    let lines = patterns
        .iter()
        .map(|p| {
            p.symbols()
                .iter()
                .map(|s| renamer.rename(s))
                .collect::<Vec<_>>()
                .join(" ")
        })
        .collect();
    Ok(CanonicalForm { lines })
}

/// Drop class symbols no slot refers to, then renumber classes densely by
/// first use (abstract patterns first, slot order) and discriminators per
/// class from 0. Abstract patterns are listed last.
pub fn tidy_grammar(grammar: &Grammar, repo: &Repository) -> Result<(Grammar, Repository)> {
    let patterns = grammar.patterns(repo)?;
    let referenced: BTreeSet<&str> = patterns.iter().flat_map(|p| p.slot_classes()).collect();
    let defined: BTreeSet<&str> = patterns.iter().filter_map(|p| p.class_symbol()).collect();
    if let Some(missing) = referenced.iter().find(|c| !defined.contains(*c)) {
        return Err(Error::Integrity(format!(
            "class {missing} is referenced but has no member in the grammar"
        )));
    }

    let mut order = patterns.clone();
    order.sort_by_cached_key(|p| (p.slots().is_empty(), structural_key(p)));
    let mut class_names: BTreeMap<&str, u32> = BTreeMap::new();
    for p in &order {
        for c in p.slot_classes() {
            let next = class_names.len() as u32 + 1;
            class_names.entry(c).or_insert(next);
        }
    }
    for p in &order {
        if let Some(c) = p.class_symbol().filter(|c| referenced.contains(c)) {
            let next = class_names.len() as u32 + 1;
            class_names.entry(c).or_insert(next);
        }
    }

    let mut tidied: Vec<(Option<u32>, bool, Vec<Symbol>)> = Vec::new();
    for p in &order {
        let own_class = p.class_symbol().filter(|c| referenced.contains(c));
        let slots: BTreeSet<usize> = p.slots().iter().flat_map(|s| s.start..s.start + 3).collect();
        let mut symbols = Vec::with_capacity(p.len());
        for (i, s) in p.symbols().iter().enumerate() {
            if s.is(IdKind::ClassSymbol) {
                if slots.contains(&i) || own_class == Some(s.name()) {
                    symbols.push(Symbol::class(class_names[s.name()]));
                }
            } else {
                symbols.push(s.clone());
            }
        }
        tidied.push((own_class.map(|c| class_names[c]), !p.slots().is_empty(), symbols));
    }
    tidied.sort_by_key(|(class, is_abstract, _)| (*is_abstract, *class));

    let mut next_disc: BTreeMap<Option<u32>, u32> = BTreeMap::new();
    let mut out = Repository::new();
    let mut members = BTreeSet::new();
    for (class, is_abstract, symbols) in tidied {
        let mut symbols = symbols;
        let slots: BTreeSet<usize> = {
            let tmp = Pattern::unchecked(symbols.clone(), Origin::DerivedSegment)?;
            tmp.slots().iter().flat_map(|s| s.start..s.start + 3).collect()
        };
        for (i, s) in symbols.iter_mut().enumerate() {
            if s.is(IdKind::Discriminator) && !slots.contains(&i) {
                let n = next_disc.entry(class).or_insert(0);
                *s = Symbol::discriminator(*n);
                *n += 1;
            }
        }
        let origin = if is_abstract {
            Origin::DerivedAbstract
        } else {
            Origin::DerivedSegment
        };
        members.insert(out.add(Pattern::unchecked(symbols, origin)?));
    }
    let tidy = Grammar::new(members, grammar.g, grammar.e);
    check_references(&tidy, &out)?;
    Ok((tidy, out))
}

/// Every slot class has at least one member.
pub fn check_references(grammar: &Grammar, repo: &Repository) -> Result<()> {
    let patterns = grammar.patterns(repo)?;
    let defined: BTreeSet<&str> = patterns.iter().filter_map(|p| p.class_symbol()).collect();
    for p in &patterns {
        for c in p.slot_classes() {
            if !defined.contains(c) {
                return Err(Error::Integrity(format!("`{p}` refers to undefined class {c}")));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grammar_of(lines: &[&str]) -> (Grammar, Repository) {
        let mut repo = Repository::new();
        let mut members = BTreeSet::new();
        for l in lines {
            members.insert(repo.add(parse_member(l).unwrap()));
        }
        (Grammar::new(members, 0.0, 0.0), repo)
    }

    const FIG7ISH: [&str; 7] = [
        "< %7 3 t h a t >",
        "< %7 4 s o m e >",
        "< %9 18 b o y >",
        "< %9 19 g i r l >",
        "< %8 5 r u n s >",
        "< %8 6 w a l k s >",
        "< %10 220 < %7 > < %9 > < %8 > >",
    ];

    #[test]
    fn renaming_invariance() {
        let (g1, r1) = grammar_of(&["< %7 1 a b >", "< %9 2 c >", "< %3 5 < %7 > < %9 > >"]);
        let (g2, r2) = grammar_of(&["< %21 8 a b >", "< %4 9 c >", "< %30 0 < %21 > < %4 > >"]);
        assert_eq!(canonicalize(&g1, &r1).unwrap(), canonicalize(&g2, &r2).unwrap());
    }

    #[test]
    fn member_order_does_not_matter() {
        let (g1, r1) = grammar_of(&FIG7ISH);
        let mut shuffled = FIG7ISH;
        shuffled.reverse();
        shuffled.swap(1, 4);
        let (g2, r2) = grammar_of(&shuffled);
        assert_eq!(canonicalize(&g1, &r1).unwrap(), canonicalize(&g2, &r2).unwrap());
    }

    #[test]
    fn content_sensitive() {
        let (g1, r1) = grammar_of(&["< %7 1 a b >"]);
        let (g2, r2) = grammar_of(&["< %7 1 a c >"]);
        assert_ne!(canonicalize(&g1, &r1).unwrap(), canonicalize(&g2, &r2).unwrap());
    }

    #[test]
    fn dangling_member() {
        let (mut g, r) = grammar_of(&["< %7 1 a b >"]);
        g.members.insert(PatternId(99));
        assert!(matches!(canonicalize(&g, &r), Err(Error::DanglingPattern(_))));
    }

    #[test]
    fn tidy_fig7ish() {
        let (g, r) = grammar_of(&FIG7ISH);
        let (t, tr) = tidy_grammar(&g, &r).unwrap();
        let lines: Vec<String> = t.patterns(&tr).unwrap().iter().map(|p| p.to_line()).collect();
        assert_eq!(
            lines,
            [
                "< %1 0 s o m e >",
                "< %1 1 t h a t >",
                "< %2 0 b o y >",
                "< %2 1 g i r l >",
                "< %3 0 r u n s >",
                "< %3 1 w a l k s >",
                "< 0 < %1 > < %2 > < %3 > >",
            ]
        );
        let (t2, tr2) = tidy_grammar(&t, &tr).unwrap();
        let again: Vec<String> = t2.patterns(&tr2).unwrap().iter().map(|p| p.to_line()).collect();
        assert_eq!(lines, again);
    }

    #[test]
    fn tidy_rejects_broken_reference() {
        let (g, r) = grammar_of(&["< %3 5 < %7 > >"]);
        assert!(tidy_grammar(&g, &r).is_err());
    }
}
