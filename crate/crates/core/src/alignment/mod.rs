//! Multiple alignments between the current pattern from New (row 0) and
//! patterns from Old (rows 1..).

mod search;

use std::cmp::Ordering;
use std::collections::BTreeMap;

pub use search::{
    add_self_copy, create_multiple_alignments, full_alignments, pairwise_align, AlignmentParams, MatchSet,
};

use crate::coding::Scores;
use crate::error::{Error, Result};
use crate::pattern::{Pattern, PatternId, Symbol};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RowSource {
    New(PatternId),
    Old(PatternId),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub source: RowSource,
    pub symbols: Vec<Symbol>,
}

/// A position in one row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cell {
    pub row: usize,
    pub pos: usize,
}

/// Cells sharing a column, at most one per row, sorted by row.
pub type Column = Vec<Cell>;

/// Per row: its source and the `(position, other source, other position)`
/// matches it takes part in.
pub type Signature = Vec<(RowSource, Vec<(usize, RowSource, usize)>)>;

#[derive(Debug, Clone, PartialEq)]
pub struct Alignment {
    rows: Vec<Row>,
    columns: Vec<Column>,
    scores: Scores,
    /// Old pattern that is a copy of row 0 and must never match it index for index.
    self_copy: Option<PatternId>,
}

impl Alignment {
    /// A one-row alignment holding only the CPFN, every symbol in its own column.
    pub fn new(cpfn: &Pattern, self_copy: Option<PatternId>) -> Self {
        Alignment {
            rows: vec![Row {
                source: RowSource::New(cpfn.id),
                symbols: cpfn.symbols().to_vec(),
            }],
            columns: (0..cpfn.len()).map(|pos| vec![Cell { row: 0, pos }]).collect(),
            scores: Scores::default(),
            self_copy,
        }
    }

    /// Assemble and validate an alignment from explicit parts.
    pub fn from_parts(rows: Vec<Row>, columns: Vec<Column>) -> Result<Self> {
        let mut columns = columns;
        for c in &mut columns {
            c.sort();
        }
        let a = Alignment {
            rows,
            columns,
            scores: Scores::default(),
            self_copy: None,
        };
        a.validate()?;
        Ok(a)
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn scores(&self) -> Scores {
        self.scores
    }

    pub(crate) fn set_scores(&mut self, scores: Scores) {
        self.scores = scores;
    }

    pub fn self_copy(&self) -> Option<PatternId> {
        self.self_copy
    }

    pub fn symbol(&self, cell: Cell) -> &Symbol {
        &self.rows[cell.row].symbols[cell.pos]
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    /// Pattern ids of rows 1.., in row order (repeats included).
    pub fn old_pattern_ids(&self) -> Vec<PatternId> {
        self.rows[1..]
            .iter()
            .filter_map(|r| match r.source {
                RowSource::Old(id) => Some(id),
                RowSource::New(_) => None,
            })
            .collect()
    }

    /// `column_of[row][pos]`.
    pub fn column_index(&self) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = self.rows.iter().map(|r| vec![0; r.symbols.len()]).collect();
        for (ci, col) in self.columns.iter().enumerate() {
            for cell in col {
                out[cell.row][cell.pos] = ci;
            }
        }
        out
    }

    /// Check the structural invariants: equal names per column, one cell per
    /// row per column, every position exactly once, positions increasing
    /// left to right within each row, row 0 from New and the rest from Old.
    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Integrity(format!("invalid alignment: {m}")));
        if self.rows.is_empty() || !matches!(self.rows[0].source, RowSource::New(_)) {
            return fail("row 0 must hold the pattern from New".into());
        }
        if let Some(r) = self.rows[1..].iter().position(|r| !matches!(r.source, RowSource::Old(_))) {
            return fail(format!("row {} is not from Old", r + 1));
        }
        let mut last: Vec<Option<usize>> = vec![None; self.rows.len()];
        let mut seen: Vec<usize> = vec![0; self.rows.len()];
        for (ci, col) in self.columns.iter().enumerate() {
            if col.is_empty() {
                return fail(format!("column {ci} is empty"));
            }
            let name = match self.rows.get(col[0].row).and_then(|r| r.symbols.get(col[0].pos)) {
                Some(s) => s.name(),
                None => return fail(format!("column {ci} points outside the rows")),
            };
            for (k, cell) in col.iter().enumerate() {
                if k > 0 && col[k - 1].row == cell.row {
                    return fail(format!("column {ci} holds row {} twice", cell.row));
                }
                let Some(sym) = self.rows.get(cell.row).and_then(|r| r.symbols.get(cell.pos)) else {
                    return fail(format!("column {ci} points outside the rows"));
                };
                if sym.name() != name {
                    return fail(format!("column {ci} mixes `{name}` and `{}`", sym.name()));
                }
                if last[cell.row].is_some_and(|p| p >= cell.pos) {
                    return fail(format!("row {} is out of order at column {ci}", cell.row));
                }
                last[cell.row] = Some(cell.pos);
                seen[cell.row] += 1;
            }
        }
        for (r, row) in self.rows.iter().enumerate() {
            if seen[r] != row.symbols.len() {
                return fail(format!("row {r} is not fully placed"));
            }
        }
        if let Some(copy) = self.self_copy {
            for col in &self.columns {
                let from_new = col.iter().find(|c| c.row == 0);
                let from_copy = col
                    .iter()
                    .find(|c| self.rows[c.row].source == RowSource::Old(copy));
                if let (Some(n), Some(c)) = (from_new, from_copy) {
                    if self.symbol(*c).provenance() == Some(n.pos) {
                        return fail("a New symbol is matched to its own copy".into());
                    }
                }
            }
        }
        Ok(())
    }

    /// Every New symbol is matched and so is every C-symbol of every Old row.
    pub fn is_full(&self) -> bool {
        self.rows.len() >= 2
            && self.columns.iter().all(|col| {
                col.len() >= 2
                    || !(col[0].row == 0 || self.symbol(col[0]).is_content())
            })
    }

    /// Number of rows each Old pattern occupies.
    pub fn count_max_occurrences(&self) -> BTreeMap<PatternId, usize> {
        let mut out = BTreeMap::new();
        for id in self.old_pattern_ids() {
            *out.entry(id).or_insert(0) += 1;
        }
        out
    }

    /// Row-order independent description of the matches, used to spot duplicates.
    pub fn signature(&self) -> Signature {
        let mut per_row: Vec<Vec<(usize, RowSource, usize)>> = vec![Vec::new(); self.rows.len()];
        for col in &self.columns {
            for a in col {
                for b in col {
                    if a.row != b.row {
                        per_row[a.row].push((a.pos, self.rows[b.row].source, b.pos));
                    }
                }
            }
        }
        let mut sig: Vec<_> = self
            .rows
            .iter()
            .zip(per_row)
            .map(|(r, mut m)| {
                m.sort();
                (r.source, m)
            })
            .collect();
        sig.sort();
        sig
    }

    /// Best first: higher CD, then fewer rows, then earlier pattern ids.
    pub fn rank(&self, other: &Alignment) -> Ordering {
        other
            .scores
            .cd
            .total_cmp(&self.scores.cd)
            .then(self.rows.len().cmp(&other.rows.len()))
            .then_with(|| {
                let mut a = self.old_pattern_ids();
                let mut b = other.old_pattern_ids();
                a.sort();
                b.sort();
                a.cmp(&b)
            })
            .then_with(|| self.signature().cmp(&other.signature()))
    }

    /// Add `pattern` as a new row, joining the columns named in `matches`.
    /// Unmatched symbols get fresh columns: leading ones just before the first
    /// matched column, the rest just after the preceding matched column.
    pub fn extend(&self, pattern: &Pattern, matches: &MatchSet) -> Alignment {
        let row = self.rows.len();
        let n = pattern.len();
        let m = self.columns.len();
        let mut target_col: Vec<Option<usize>> = vec![None; n];
        for &(j, c) in &matches.pairs {
            target_col[j] = Some(c);
        }
        let mut before: Vec<Vec<usize>> = vec![Vec::new(); m + 1];
        let mut after: Vec<Vec<usize>> = vec![Vec::new(); m + 1];
        let first = matches.pairs.first().map(|&(_, c)| c).unwrap_or(m);
        let mut anchor: Option<usize> = None;
        for (j, &target) in target_col.iter().enumerate() {
            match (target, anchor) {
                (Some(c), _) => anchor = Some(c),
                (None, Some(a)) => after[a].push(j),
                (None, None) => before[first].push(j),
            }
        }
        let mut columns = Vec::with_capacity(m + n);
        let push_new = |cols: &mut Vec<Column>, js: &[usize]| {
            cols.extend(js.iter().map(|&pos| vec![Cell { row, pos }]));
        };
        for c in 0..m {
            push_new(&mut columns, &before[c]);
            let mut col = self.columns[c].clone();
            if let Some(&(j, _)) = matches.pairs.iter().find(|&&(_, cc)| cc == c) {
                col.push(Cell { row, pos: j });
            }
            columns.push(col);
            push_new(&mut columns, &after[c]);
        }
        push_new(&mut columns, &before[m]);
        let mut rows = self.rows.clone();
        rows.push(Row {
            source: RowSource::Old(pattern.id),
            symbols: pattern.symbols().to_vec(),
        });
        Alignment {
            rows,
            columns,
            scores: Scores::default(),
            self_copy: self.self_copy,
        }
    }
}
