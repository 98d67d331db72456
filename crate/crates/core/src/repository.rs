//! New (the corpus), Old (the repository) and the ID-symbol allocator.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::pattern::{Origin, Pattern, PatternId, Symbol};

/// The patterns presented as New, in presentation order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Corpus {
    patterns: Vec<Pattern>,
}

impl Corpus {
    pub fn new(patterns: Vec<Pattern>) -> Result<Self> {
        if patterns.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        let patterns = patterns
            .into_iter()
            .enumerate()
            .map(|(i, mut p)| {
                if p.origin != Origin::NewInput {
                    return Err(Error::InvalidArgument(format!(
                        "corpus pattern `{p}` is not a New input pattern"
                    )));
                }
                p.id = PatternId(i as u32);
                Ok(p)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Corpus { patterns })
    }

    /// Build from lines of space separated content symbols.
    pub fn from_lines<'a>(lines: impl IntoIterator<Item = &'a str>) -> Result<Self> {
        let patterns = lines
            .into_iter()
            .filter(|l| !l.trim().is_empty())
            .map(|l| {
                let symbols = l
                    .split_whitespace()
                    .map(Symbol::content)
                    .collect::<Result<Vec<_>>>()?;
                crate::pattern::make_pattern(symbols, Origin::NewInput)
            })
            .collect::<Result<Vec<_>>>()?;
        Corpus::new(patterns)
    }

    pub fn patterns(&self) -> &[Pattern] {
        &self.patterns
    }

    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    /// Corpus restricted to the given presentation-order range.
    pub fn slice(&self, range: std::ops::Range<usize>) -> Result<Corpus> {
        Corpus::new(self.patterns[range].to_vec())
    }
}

/// Old: an append-only, insertion-ordered pattern store.
#[derive(Debug, Clone, Default)]
pub struct Repository {
    patterns: Vec<Pattern>,
    index: BTreeMap<PatternId, usize>,
    next_id: u32,
}

impl Repository {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, mut pattern: Pattern) -> PatternId {
        let id = PatternId(self.next_id);
        self.next_id += 1;
        pattern.id = id;
        self.index.insert(id, self.patterns.len());
        self.patterns.push(pattern);
        id
    }

    pub fn get(&self, id: PatternId) -> Result<&Pattern> {
        self.index
            .get(&id)
            .map(|&i| &self.patterns[i])
            .ok_or(Error::DanglingPattern(id))
    }

    pub fn get_mut(&mut self, id: PatternId) -> Result<&mut Pattern> {
        match self.index.get(&id) {
            Some(&i) => Ok(&mut self.patterns[i]),
            None => Err(Error::DanglingPattern(id)),
        }
    }

    pub fn contains(&self, id: PatternId) -> bool {
        self.index.contains_key(&id)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Pattern> + '_ {
        self.patterns.iter()
    }

    pub fn iter_mut(&mut self) -> impl Iterator<Item = &mut Pattern> + '_ {
        self.patterns.iter_mut()
    }

    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    /// Drop every pattern not in `keep`. Ids of survivors are unchanged.
    pub fn retain(&mut self, keep: impl Fn(PatternId) -> bool) {
        self.patterns.retain(|p| keep(p.id));
        self.index = self
            .patterns
            .iter()
            .enumerate()
            .map(|(i, p)| (p.id, i))
            .collect();
    }

    /// Members of each class, in insertion order.
    pub fn classes(&self) -> BTreeMap<&str, Vec<PatternId>> {
        let mut out: BTreeMap<&str, Vec<PatternId>> = BTreeMap::new();
        for p in &self.patterns {
            if let Some(class) = p.class_symbol() {
                out.entry(class).or_default().push(p.id);
            }
        }
        out
    }
}

/// Hands out class symbols `%k` and discriminators. Never reissues either.
#[derive(Debug, Clone)]
pub struct IdAllocator {
    next_class_number: u32,
    next_discriminator: u32,
}

impl Default for IdAllocator {
    fn default() -> Self {
        IdAllocator {
            next_class_number: 1,
            next_discriminator: 0,
        }
    }
}

impl IdAllocator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn next_class(&mut self) -> Symbol {
        let k = self.next_class_number;
        self.next_class_number += 1;
        Symbol::class(k)
    }

    pub fn next_discriminator(&mut self) -> Symbol {
        let d = self.next_discriminator;
        self.next_discriminator += 1;
        Symbol::discriminator(d)
    }

    pub fn next_class_number(&self) -> u32 {
        self.next_class_number
    }

    pub fn next_discriminator_value(&self) -> u32 {
        self.next_discriminator
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_assigns_presentation_order() {
        let c = Corpus::from_lines(["a b", "", "c"]).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c.patterns()[1].id, PatternId(1));
        assert!(matches!(Corpus::from_lines(["  "]), Err(Error::EmptyCorpus)));
    }

    #[test]
    fn repository_ids_are_sequential() {
        let mut repo = Repository::new();
        let c = Corpus::from_lines(["a b", "c d"]).unwrap();
        let a = repo.add(c.patterns()[0].clone());
        let b = repo.add(c.patterns()[1].clone());
        assert_eq!((a, b), (PatternId(0), PatternId(1)));
        repo.retain(|id| id == b);
        assert!(repo.get(a).is_err());
        assert_eq!(repo.get(b).unwrap().to_line(), "c d");
    }

    #[test]
    fn allocator_is_strictly_increasing() {
        let mut alloc = IdAllocator::new();
        let names: Vec<String> = (0..3).map(|_| alloc.next_class().name().to_string()).collect();
        assert_eq!(names, ["%1", "%2", "%3"]);
        assert_eq!(alloc.next_discriminator().name(), "0");
        assert_eq!(alloc.next_discriminator().name(), "1");
    }
}
