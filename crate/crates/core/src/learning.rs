//! Deriving candidate patterns from alignments: segments for runs of matched
//! and unmatched C-symbols, classes of alternatives, and abstract patterns
//! recording the order of the runs.

use std::collections::{BTreeMap, BTreeSet};

use crate::alignment::{
    add_self_copy, create_multiple_alignments, Alignment, AlignmentParams, Cell,
};
use crate::coding::CodingModel;
use crate::error::{Error, Result};
use crate::pattern::{make_pattern, IdKind, Origin, Pattern, PatternId, Symbol};
use crate::repository::{IdAllocator, Repository};

/// Patterns derived from one alignment.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DerivedBatch {
    /// Segment patterns filling the slots, reused or new, in slot order.
    pub segments: Vec<PatternId>,
    /// One abstract pattern, or two when a gap is empty on one side.
    pub abstracts: Vec<PatternId>,
    /// Patterns this batch actually added to Old.
    pub added: Vec<PatternId>,
    /// Row-0 and composite C-sequences the batch was derived from.
    pub new_content: Vec<String>,
    pub old_content: Vec<String>,
}

impl DerivedBatch {
    pub fn is_empty(&self) -> bool {
        self.segments.is_empty() && self.abstracts.is_empty()
    }
}

/// One unit of the left-to-right structure: a matched run or a gap.
struct Unit {
    class: String,
    in_new: bool,
    in_old: bool,
}

struct Run {
    new: std::ops::Range<usize>,
    old: std::ops::Range<usize>,
    row: usize,
}

/// Split the alignment into row 0 and a composite of every Old row's
/// C-symbols in column order, then find the maximal matched runs. A run
/// stays within one Old row.
fn runs(alignment: &Alignment) -> (Vec<String>, Vec<Cell>, Vec<Run>) {
    let new: Vec<String> = alignment.rows()[0]
        .symbols
        .iter()
        .map(|s| s.name().to_string())
        .collect();
    let mut composite: Vec<Cell> = Vec::new();
    let mut partner: Vec<Option<usize>> = vec![None; new.len()];
    for col in alignment.columns() {
        let old_content = col
            .iter()
            .find(|c| c.row > 0 && alignment.symbol(**c).is_content())
            .copied();
        if let Some(cell) = old_content {
            if let Some(n) = col.iter().find(|c| c.row == 0) {
                partner[n.pos] = Some(composite.len());
            }
            composite.push(cell);
        }
    }
    let mut out: Vec<Run> = Vec::new();
    for (i, p) in partner.iter().enumerate() {
        let Some(k) = *p else { continue };
        let row = composite[k].row;
        match out.last_mut() {
            Some(r) if r.new.end == i && r.old.end == k && r.row == row => {
                r.new.end = i + 1;
                r.old.end = k + 1;
            }
            _ => out.push(Run {
                new: i..i + 1,
                old: k..k + 1,
                row,
            }),
        }
    }
    (new, composite, out)
}

struct Deriver<'a> {
    repo: &'a mut Repository,
    alloc: &'a mut IdAllocator,
    batch: DerivedBatch,
}

impl Deriver<'_> {
    fn add(&mut self, symbols: Vec<Symbol>, origin: Origin) -> Result<PatternId> {
        let id = self.repo.add(make_pattern(symbols, origin)?);
        self.batch.added.push(id);
        Ok(id)
    }

    fn new_segment(&mut self, class: &Symbol, content: &[String]) -> Result<PatternId> {
        let mut symbols = vec![Symbol::left_bracket(), class.clone(), self.alloc.next_discriminator()];
        for name in content {
            symbols.push(Symbol::content(name.as_str())?);
        }
        symbols.push(Symbol::right_bracket());
        self.add(symbols, Origin::DerivedSegment)
    }

    fn find_segment(&self, content: &[String]) -> Option<PatternId> {
        self.repo
            .iter()
            .find(|p| p.origin == Origin::DerivedSegment && p.content_names() == content)
            .map(|p| p.id)
    }

    /// A segment standing alone in its slot: reuse an identical one, else make one.
    fn single(&mut self, content: &[String]) -> Result<(PatternId, String)> {
        let id = match self.find_segment(content) {
            Some(id) => id,
            None => {
                let class = self.alloc.next_class();
                self.new_segment(&class, content)?
            }
        };
        let class = class_of(self.repo.get(id)?)?;
        Ok((id, class))
    }

    /// Two alternatives for one gap, sharing a class.
    fn alternatives(&mut self, a: &[String], b: &[String]) -> Result<(Vec<PatternId>, String)> {
        let wanted: BTreeSet<Vec<&str>> = [a, b]
            .iter()
            .map(|v| v.iter().map(String::as_str).collect())
            .collect();
        let existing = self.repo.classes().into_iter().find_map(|(class, members)| {
            let segments: Vec<&Pattern> = members
                .iter()
                .filter_map(|&id| self.repo.get(id).ok())
                .filter(|p| p.origin == Origin::DerivedSegment)
                .collect();
            let have: BTreeSet<Vec<&str>> = segments.iter().map(|p| p.content_names()).collect();
            (segments.len() == members.len() && have == wanted && segments.len() == 2).then(|| {
                let mut ids: Vec<PatternId> = segments.iter().map(|p| p.id).collect();
                ids.sort_by_key(|&id| {
                    let names = self.repo.get(id).map(|p| p.content_names().join(" ")).unwrap_or_default();
                    names != a.join(" ")
                });
                (ids, class.to_string())
            })
        });
        if let Some(found) = existing {
            return Ok(found);
        }
        let class = self.alloc.next_class();
        let first = self.new_segment(&class, a)?;
        let second = self.new_segment(&class, b)?;
        Ok((vec![first, second], class.name().to_string()))
    }

    /// A segment joining an existing class: reuse a member with this content,
    /// else add one.
    fn member(&mut self, class: &str, content: &[String]) -> Result<PatternId> {
        if let Some(p) = self.repo.iter().find(|p| {
            p.origin == Origin::DerivedSegment && p.class_symbol() == Some(class) && p.content_names() == content
        }) {
            return Ok(p.id);
        }
        let class = Symbol::parse(class)?;
        self.new_segment(&class, content)
    }

    fn abstract_pattern(&mut self, classes: &[&str]) -> Result<PatternId> {
        if let Some(p) = self.repo.iter().find(|p| {
            p.origin == Origin::DerivedAbstract && p.slot_classes() == classes
        }) {
            return Ok(p.id);
        }
        let mut symbols = vec![
            Symbol::left_bracket(),
            self.alloc.next_class(),
            self.alloc.next_discriminator(),
        ];
        for &class in classes {
            symbols.push(Symbol::left_bracket());
            symbols.push(Symbol::parse(class)?);
            symbols.push(Symbol::right_bracket());
        }
        symbols.push(Symbol::right_bracket());
        self.add(symbols, Origin::DerivedAbstract)
    }
}

/// Class of the first unfilled slot `< %c >` of an Old row lying wholly
/// between columns `lo` (exclusive, `None` for the start) and `hi` (exclusive).
fn open_slot(alignment: &Alignment, column_of: &[Vec<usize>], lo: Option<usize>, hi: usize) -> Option<String> {
    let inside = |c: usize| lo.is_none_or(|lo| c > lo) && c < hi && alignment.columns()[c].len() == 1;
    let mut found: Vec<(usize, String)> = Vec::new();
    for (r, row) in alignment.rows().iter().enumerate().skip(1) {
        let symbols = &row.symbols;
        for q in 1..symbols.len().saturating_sub(3) {
            let is_slot = symbols[q].is(IdKind::LeftBracket)
                && symbols[q + 1].is(IdKind::ClassSymbol)
                && symbols[q + 2].is(IdKind::RightBracket);
            if is_slot && (q..q + 3).all(|p| inside(column_of[r][p])) {
                found.push((column_of[r][q], symbols[q + 1].name().to_string()));
            }
        }
    }
    found.into_iter().min().map(|(_, class)| class)
}

fn class_of(p: &Pattern) -> Result<String> {
    p.class_symbol()
        .map(str::to_string)
        .ok_or_else(|| Error::Integrity(format!("segment `{p}` has no class symbol")))
}

/// Derive segments, classes and abstract patterns from `alignment` and add
/// them to Old. ID-symbols of Old rows are ignored: only the C-symbols of
/// row 0 and of the Old rows (read as one composite row) are compared.
pub fn derive_patterns(
    alignment: &Alignment,
    repo: &mut Repository,
    alloc: &mut IdAllocator,
) -> Result<DerivedBatch> {
    if alignment.row_count() < 2 {
        return Err(Error::InvalidArgument(
            "pattern derivation needs at least two rows".into(),
        ));
    }
    let (new, composite, runs) = runs(alignment);
    if runs.is_empty() {
        return Ok(DerivedBatch::default());
    }
    let old: Vec<String> = composite
        .iter()
        .map(|c| alignment.symbol(*c).name().to_string())
        .collect();
    let row_content: BTreeMap<usize, usize> = composite.iter().fold(BTreeMap::new(), |mut m, c| {
        *m.entry(c.row).or_default() += 1;
        m
    });

    let mut d = Deriver {
        repo,
        alloc,
        batch: DerivedBatch {
            new_content: new.clone(),
            old_content: old.clone(),
            ..DerivedBatch::default()
        },
    };
    let mut units: Vec<Unit> = Vec::new();
    let column_of = alignment.column_index();
    let new_column = |pos: usize| column_of[0][pos];
    let gap = |d: &mut Deriver,
               units: &mut Vec<Unit>,
               a: &[String],
               b: &[String],
               slot: Option<String>|
     -> Result<()> {
        let (ids, class) = match (a.is_empty(), b.is_empty()) {
            (true, true) => return Ok(()),
            (false, true) if slot.is_some() => {
                let class = slot.expect("checked");
                let id = d.member(&class, a)?;
                d.batch.segments.push(id);
                units.push(Unit {
                    class,
                    in_new: true,
                    in_old: true,
                });
                return Ok(());
            }
            (false, true) => d.single(a).map(|(id, c)| (vec![id], c))?,
            (true, false) => d.single(b).map(|(id, c)| (vec![id], c))?,
            (false, false) if a == b => d.single(a).map(|(id, c)| (vec![id], c))?,
            (false, false) => d.alternatives(a, b)?,
        };
        d.batch.segments.extend(ids);
        units.push(Unit {
            class,
            in_new: !a.is_empty(),
            in_old: !b.is_empty(),
        });
        Ok(())
    };

    let (mut new_at, mut old_at) = (0, 0);
    for run in &runs {
        let lo = (new_at > 0).then(|| new_column(new_at - 1));
        let slot = open_slot(alignment, &column_of, lo, new_column(run.new.start));
        gap(&mut d, &mut units, &new[new_at..run.new.start], &old[old_at..run.old.start], slot)?;
        let content = &new[run.new.clone()];
        let row = &alignment.rows()[run.row];
        let whole_row = row_content[&run.row] == run.old.len();
        let (id, class) = match row.source {
            crate::alignment::RowSource::Old(pid) if whole_row && d.repo.get(pid)?.class_symbol().is_some() => {
                let p = d.repo.get(pid)?;
                (pid, class_of(p)?)
            }
            _ => d.single(content)?,
        };
        d.batch.segments.push(id);
        units.push(Unit {
            class,
            in_new: true,
            in_old: true,
        });
        new_at = run.new.end;
        old_at = run.old.end;
    }
    let lo = (new_at > 0).then(|| new_column(new_at - 1));
    let slot = open_slot(alignment, &column_of, lo, alignment.columns().len());
    gap(&mut d, &mut units, &new[new_at..], &old[old_at..], slot)?;

    let for_new: Vec<&str> = units.iter().filter(|u| u.in_new).map(|u| u.class.as_str()).collect();
    let for_old: Vec<&str> = units.iter().filter(|u| u.in_old).map(|u| u.class.as_str()).collect();
    let first = d.abstract_pattern(&for_new)?;
    d.batch.abstracts.push(first);
    if for_old != for_new {
        let second = d.abstract_pattern(&for_old)?;
        d.batch.abstracts.push(second);
    }
    Ok(d.batch)
}

/// One pass of the learning loop for the current pattern from New: copy it
/// into Old, align it, and derive patterns from the best few alignments.
/// Only one of several equally good match sets is tried per pattern, so the
/// best few are not near copies of one another.
pub fn process_new_pattern(
    cpfn: &Pattern,
    repo: &mut Repository,
    params: &AlignmentParams,
    model: &CodingModel,
    alloc: &mut IdAllocator,
) -> Result<Vec<Alignment>> {
    let copy = add_self_copy(cpfn, repo, alloc)?;
    let params = AlignmentParams {
        tied_match_sets: 1,
        ..params.clone()
    };
    let mut alignments = create_multiple_alignments(cpfn, repo, &params, model, Some(copy))?;
    alignments.truncate(params.best_few);
    for a in &alignments {
        derive_patterns(a, repo, alloc)?;
    }
    Ok(alignments)
}
