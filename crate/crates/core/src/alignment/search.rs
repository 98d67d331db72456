//! Construction of multiple alignments: the self-copy of the CPFN, a pairwise
//! dynamic program between an alignment and one Old pattern, and the
//! iterative beam search that grows alignments row by row.

use std::collections::BTreeSet;

use super::{Alignment, Cell};
use crate::coding::{compute_scores, symbol_cost, CodingModel};
use crate::error::{Error, Result};
use crate::pattern::{make_pattern, IdKind, Origin, Pattern, PatternId, Symbol};
use crate::repository::{IdAllocator, Repository};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlignmentParams {
    /// Alignments kept per cycle.
    pub beam_width: usize,
    /// Alignments handed to pattern derivation.
    pub best_few: usize,
    /// Rows added at most, one per cycle.
    pub max_cycles: usize,
    /// Shortest run of matched New symbols worth keeping.
    pub min_hit_len: usize,
    /// Rows one Old pattern may occupy in a single alignment.
    pub max_appearances: usize,
    /// Equally good match sets offered per Old pattern and driver.
    pub tied_match_sets: usize,
}

impl Default for AlignmentParams {
    fn default() -> Self {
        AlignmentParams {
            beam_width: 10,
            best_few: 2,
            max_cycles: 6,
            min_hit_len: 1,
            max_appearances: 4,
            tied_match_sets: 10,
        }
    }
}

impl AlignmentParams {
    pub fn validate(&self) -> Result<()> {
        let all_positive = [
            self.beam_width,
            self.best_few,
            self.max_cycles,
            self.min_hit_len,
            self.max_appearances,
            self.tied_match_sets,
        ]
        .iter()
        .all(|&v| v > 0);
        if !all_positive {
            return Err(Error::InvalidArgument("alignment parameters must be positive".into()));
        }
        if self.best_few > self.beam_width {
            return Err(Error::InvalidArgument("best_few cannot exceed beam_width".into()));
        }
        Ok(())
    }
}

/// Copy the CPFN into Old as `< %k d c1 ... cn >`, each copied symbol
/// remembering its index in the CPFN.
pub fn add_self_copy(cpfn: &Pattern, repo: &mut Repository, alloc: &mut IdAllocator) -> Result<PatternId> {
    if cpfn.origin != Origin::NewInput {
        return Err(Error::InvalidArgument("only New patterns are self-copied".into()));
    }
    let mut symbols = Vec::with_capacity(cpfn.len() + 4);
    symbols.push(Symbol::left_bracket());
    symbols.push(alloc.next_class());
    symbols.push(alloc.next_discriminator());
    symbols.extend(
        cpfn.symbols()
            .iter()
            .enumerate()
            .map(|(i, s)| s.clone().with_provenance(i)),
    );
    symbols.push(Symbol::right_bracket());
    Ok(repo.add(make_pattern(symbols, Origin::SelfCopy)?))
}

/// Matches between a target pattern and the columns of a driver alignment:
/// `(target position, column index)` pairs in increasing order of both.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchSet {
    pub pairs: Vec<(usize, usize)>,
    /// Bits gained by the matches, before the target's own ID cost.
    pub gain: f64,
}


struct Pairwise<'a> {
    driver: &'a Alignment,
    target: &'a Pattern,
    column_of: Vec<Vec<usize>>,
    target_cost: Vec<f64>,
    column_cost: Vec<f64>,
    exclude_self: bool,
}

fn slot_at(symbols: &[Symbol], i: usize) -> bool {
    i > 0
        && i + 3 < symbols.len()
        && symbols[i].is(IdKind::LeftBracket)
        && symbols[i + 1].is(IdKind::ClassSymbol)
        && symbols[i + 2].is(IdKind::RightBracket)
}

fn wrapped(symbols: &[Symbol]) -> bool {
    symbols.len() >= 3
        && symbols[0].is(IdKind::LeftBracket)
        && symbols[1].is(IdKind::ClassSymbol)
        && symbols[symbols.len() - 1].is(IdKind::RightBracket)
}

impl<'a> Pairwise<'a> {
    fn new(driver: &'a Alignment, target: &'a Pattern, model: &CodingModel) -> Result<Self> {
        let target_cost = target
            .symbols()
            .iter()
            .map(|s| symbol_cost(model, s.name()))
            .collect::<Result<Vec<_>>>()?;
        let column_cost = driver
            .columns()
            .iter()
            .map(|col| symbol_cost(model, driver.symbol(col[0]).name()))
            .collect::<Result<Vec<_>>>()?;
        Ok(Pairwise {
            driver,
            target,
            column_of: driver.column_index(),
            target_cost,
            column_cost,
            exclude_self: driver.self_copy() == Some(target.id),
        })
    }

    fn open(&self, c: usize) -> Option<Cell> {
        let col = &self.driver.columns()[c];
        (col.len() == 1).then(|| col[0])
    }

    fn can_match(&self, j: usize, c: usize) -> bool {
        let t = &self.target.symbols()[j];
        let Some(cell) = self.open(c) else { return false };
        cell.row == 0
            && t.is_content()
            && self.driver.symbol(cell).matches(t)
            && !(self.exclude_self && t.provenance() == Some(cell.pos))
    }

    /// Target slot `< %c >` at `j` resolved by an Old row starting at column `c`.
    /// Returns the columns of that row's class symbol and closing bracket.
    fn reference(&self, j: usize, c: usize) -> Option<(usize, usize)> {
        if !slot_at(self.target.symbols(), j) {
            return None;
        }
        let cell = self.open(c)?;
        let row = &self.driver.rows()[cell.row].symbols;
        if cell.row == 0 || cell.pos != 0 || !wrapped(row) || !row[1].matches(&self.target.symbols()[j + 1]) {
            return None;
        }
        let c1 = self.column_of[cell.row][1];
        let c2 = self.column_of[cell.row][row.len() - 1];
        (self.open(c1).is_some() && self.open(c2).is_some()).then_some((c1, c2))
    }

    fn triple_gain(&self, js: [usize; 3], cs: [usize; 3]) -> f64 {
        js.iter().map(|&j| self.target_cost[j]).sum::<f64>()
            + cs.iter().map(|&c| self.column_cost[c]).sum::<f64>()
    }

    /// Best match sets of `target[jl..jh]` against `columns[cl..ch]`: most
    /// bits gained, then most pairs, so symbols that cost nothing still match.
    /// Up to `limit` equally good sets are returned, each once.
    fn solve(&self, jl: usize, jh: usize, cl: usize, ch: usize, limit: usize) -> Vec<MatchSet> {
        let table = Table::fill(self, jl, jh, cl, ch);
        let mut out = Vec::new();
        let mut pairs = Vec::new();
        let mut budget = 64 * limit.max(1);
        table.trace(self, jl, cl, false, &mut pairs, &mut out, limit, &mut budget);
        out
    }

    /// The target as the filler of an Old row's slot: its brackets and class
    /// join the slot and its body must fit between the slot's class and `>`.
    fn as_filler(&self) -> Vec<MatchSet> {
        let t = self.target.symbols();
        let n = t.len();
        if !wrapped(t) {
            return Vec::new();
        }
        let mut out = Vec::new();
        for (r, row) in self.driver.rows().iter().enumerate().skip(1) {
            for q in 1..row.symbols.len() {
                if !slot_at(&row.symbols, q) || !row.symbols[q + 1].matches(&t[1]) {
                    continue;
                }
                let cs = [
                    self.column_of[r][q],
                    self.column_of[r][q + 1],
                    self.column_of[r][q + 2],
                ];
                if cs.iter().any(|&c| self.open(c).is_none()) {
                    continue;
                }
                for inner in self.solve(2, n - 1, cs[1] + 1, cs[2], 2) {
                    let mut pairs = vec![(0, cs[0]), (1, cs[1])];
                    pairs.extend(inner.pairs);
                    pairs.push((n - 1, cs[2]));
                    out.push(MatchSet {
                        pairs,
                        gain: inner.gain + self.triple_gain([0, 1, n - 1], cs),
                    });
                }
            }
        }
        out
    }

    /// Drop runs of consecutive New matches shorter than `min_len`.
    fn prune_short_hits(&self, ms: MatchSet, min_len: usize) -> MatchSet {
        if min_len <= 1 {
            return ms;
        }
        let is_new = |&(_, c): &(usize, usize)| self.open(c).is_some_and(|cell| cell.row == 0);
        let new_pos = |c: usize| self.driver.columns()[c][0].pos;
        let mut keep = vec![true; ms.pairs.len()];
        let mut i = 0;
        while i < ms.pairs.len() {
            if !is_new(&ms.pairs[i]) {
                i += 1;
                continue;
            }
            let mut k = i + 1;
            while k < ms.pairs.len()
                && is_new(&ms.pairs[k])
                && ms.pairs[k].0 == ms.pairs[k - 1].0 + 1
                && new_pos(ms.pairs[k].1) == new_pos(ms.pairs[k - 1].1) + 1
            {
                k += 1;
            }
            if k - i < min_len {
                keep[i..k].fill(false);
            }
            i = k;
        }
        let mut gain = ms.gain;
        let mut pairs = Vec::new();
        for (p, k) in ms.pairs.into_iter().zip(keep) {
            if k {
                pairs.push(p);
            } else {
                gain -= self.target_cost[p.0];
            }
        }
        MatchSet { pairs, gain }
    }
}

/// Value of the best match set from each `(target position, column)` on:
/// bits gained and number of pairs.
struct Table {
    best: Vec<(f64, usize)>,
    jl: usize,
    jh: usize,
    cl: usize,
    ch: usize,
}

fn better(x: (f64, usize), y: (f64, usize)) -> bool {
    x.0 > y.0 + 1e-9 || ((x.0 - y.0).abs() <= 1e-9 && x.1 > y.1)
}

fn same(x: (f64, usize), y: (f64, usize)) -> bool {
    !better(x, y) && !better(y, x)
}

impl Table {
    fn at(&self, j: usize, c: usize) -> (f64, usize) {
        self.best[(j - self.jl) * (self.ch - self.cl + 1) + (c - self.cl)]
    }

    fn matched(pw: &Pairwise, j: usize, rest: (f64, usize)) -> (f64, usize) {
        (pw.target_cost[j] + rest.0, rest.1 + 1)
    }

    fn referenced(pw: &Pairwise, j: usize, cs: [usize; 3], rest: (f64, usize)) -> (f64, usize) {
        (pw.triple_gain([j, j + 1, j + 2], cs) + rest.0, rest.1 + 3)
    }

    fn fill(pw: &Pairwise, jl: usize, jh: usize, cl: usize, ch: usize) -> Table {
        let w = ch - cl + 1;
        let mut t = Table { best: vec![(0.0, 0); w * (jh - jl + 1)], jl, jh, cl, ch };
        for j in (jl..jh).rev() {
            for c in (cl..ch).rev() {
                let mut b = t.at(j, c + 1);
                let down = t.at(j + 1, c);
                if better(down, b) {
                    b = down;
                }
                if pw.can_match(j, c) {
                    let v = Self::matched(pw, j, t.at(j + 1, c + 1));
                    if better(v, b) {
                        b = v;
                    }
                }
                if j + 3 <= jh {
                    if let Some((c1, c2)) = pw.reference(j, c).filter(|&(_, c2)| c2 < ch) {
                        let v = Self::referenced(pw, j, [c, c1, c2], t.at(j + 3, c2 + 1));
                        if better(v, b) {
                            b = v;
                        }
                    }
                }
                t.best[(j - jl) * w + (c - cl)] = b;
            }
        }
        t
    }

    /// Walk every optimal path from `(j, c)`, latest columns first. Between
    /// two matches the columns are skipped before the target, so each set is
    /// reached once.
    #[allow(clippy::too_many_arguments)]
    fn trace(
        &self,
        pw: &Pairwise,
        j: usize,
        c: usize,
        skipped_target: bool,
        pairs: &mut Vec<(usize, usize)>,
        out: &mut Vec<MatchSet>,
        limit: usize,
        budget: &mut usize,
    ) {
        if out.len() >= limit || *budget == 0 {
            return;
        }
        *budget -= 1;
        let here = self.at(j, c);
        if j == self.jh || c == self.ch || here.1 == 0 {
            out.push(MatchSet { pairs: pairs.clone(), gain: self.at(self.jl, self.cl).0 });
            return;
        }
        if !skipped_target && same(self.at(j, c + 1), here) {
            self.trace(pw, j, c + 1, false, pairs, out, limit, budget);
        }
        if same(self.at(j + 1, c), here) {
            self.trace(pw, j + 1, c, true, pairs, out, limit, budget);
        }
        if pw.can_match(j, c) && same(Self::matched(pw, j, self.at(j + 1, c + 1)), here) {
            pairs.push((j, c));
            self.trace(pw, j + 1, c + 1, false, pairs, out, limit, budget);
            pairs.pop();
        }
        if j + 3 <= self.jh {
            if let Some((c1, c2)) = pw.reference(j, c).filter(|&(_, c2)| c2 < self.ch) {
                if same(Self::referenced(pw, j, [c, c1, c2], self.at(j + 3, c2 + 1)), here) {
                    pairs.extend([(j, c), (j + 1, c1), (j + 2, c2)]);
                    self.trace(pw, j + 3, c2 + 1, false, pairs, out, limit, budget);
                    pairs.truncate(pairs.len() - 3);
                }
            }
        }
    }
}

/// Candidate match sets between `driver` and `target`, best first. New
/// symbols match equal-named C-symbols of the target; a target slot
/// `< %c >` matches the brackets and class of an Old row of class `%c`;
/// a wrapped target may itself fill an open slot of an Old row. A symbol of
/// the CPFN never matches its own copy.
pub fn pairwise_align(
    driver: &Alignment,
    target: &Pattern,
    params: &AlignmentParams,
    model: &CodingModel,
) -> Result<Vec<MatchSet>> {
    if target.is_empty() || driver.columns().is_empty() {
        return Ok(Vec::new());
    }
    let pw = Pairwise::new(driver, target, model)?;
    let mut out = pw.solve(0, target.len(), 0, driver.columns().len(), params.tied_match_sets);
    out.extend(pw.as_filler());
    let mut out: Vec<MatchSet> = out
        .into_iter()
        .map(|ms| pw.prune_short_hits(ms, params.min_hit_len))
        .filter(|ms| !ms.pairs.is_empty())
        .collect();
    out.sort_by(|a, b| b.gain.total_cmp(&a.gain).then_with(|| a.pairs.cmp(&b.pairs)));
    out.dedup_by(|a, b| a.pairs == b.pairs);
    out.truncate(params.beam_width);
    Ok(out)
}

/// Beam search for multiple alignments of `cpfn` against Old. Each cycle
/// extends the alignments that entered the beam in the previous cycle by one
/// more Old row; the search stops when nothing new enters the beam or after
/// `max_cycles`. Returns the best `beam_width` alignments met, best first.
pub fn create_multiple_alignments(
    cpfn: &Pattern,
    repo: &Repository,
    params: &AlignmentParams,
    model: &CodingModel,
    self_copy: Option<PatternId>,
) -> Result<Vec<Alignment>> {
    let mut out = explore(cpfn, repo, params, model, self_copy, false)?;
    out.truncate(params.beam_width);
    Ok(out)
}

/// As [`create_multiple_alignments`], keeping only full alignments.
pub fn full_alignments(
    cpfn: &Pattern,
    repo: &Repository,
    params: &AlignmentParams,
    model: &CodingModel,
) -> Result<Vec<Alignment>> {
    let mut out: Vec<Alignment> = explore(cpfn, repo, params, model, None, true)?
        .into_iter()
        .filter(Alignment::is_full)
        .collect();
    out.truncate(params.beam_width);
    Ok(out)
}

/// Every alignment the beam met, sorted by rank. The beam itself is ordered
/// by CD plus the bits still recoverable by references, so partial parses
/// survive long enough to be completed. With `full_only`, alignments with an
/// unmatched C-symbol in an Old row are dropped: nothing can match it later.
fn explore(
    cpfn: &Pattern,
    repo: &Repository,
    params: &AlignmentParams,
    model: &CodingModel,
    self_copy: Option<PatternId>,
    full_only: bool,
) -> Result<Vec<Alignment>> {
    let referenced: BTreeSet<&str> = repo.iter().flat_map(|p| p.slot_classes()).collect();
    let outlook = |a: &Alignment| -> Result<f64> { Ok(a.scores().cd + open_references(a, &referenced, model)?) };
    let mut met = Vec::new();
    let mut beam: Vec<(f64, usize)> = Vec::new();
    let mut seen = BTreeSet::new();
    let mut frontier = vec![Alignment::new(cpfn, self_copy)];
    for _ in 0..params.max_cycles {
        let first_fresh = met.len();
        for driver in &frontier {
            let uses = driver.count_max_occurrences();
            for target in repo.iter() {
                let used = uses.get(&target.id).copied().unwrap_or(0);
                let cap = if self_copy == Some(target.id) { 1 } else { params.max_appearances };
                if used >= cap {
                    continue;
                }
                for ms in pairwise_align(driver, target, params, model)? {
                    let mut a = driver.extend(target, &ms);
                    debug_assert!(a.validate().is_ok(), "{:?}", a.validate());
                    if full_only && has_stranded_content(&a) {
                        continue;
                    }
                    let scores = compute_scores(&a, model)?;
                    a.set_scores(scores);
                    if seen.insert(a.signature()) {
                        beam.push((outlook(&a)?, met.len()));
                        met.push(a);
                    }
                }
            }
        }
        if met.len() == first_fresh {
            break;
        }
        beam.sort_by(|(x, i), (y, k)| y.total_cmp(x).then_with(|| met[*i].rank(&met[*k])));
        beam.truncate(params.beam_width);
        frontier = beam
            .iter()
            .filter(|(_, i)| *i >= first_fresh)
            .map(|(_, i)| met[*i].clone())
            .collect();
        if frontier.is_empty() {
            break;
        }
    }
    met.sort_by(Alignment::rank);
    Ok(met)
}

fn has_stranded_content(a: &Alignment) -> bool {
    a.columns()
        .iter()
        .any(|col| col.len() == 1 && col[0].row > 0 && a.symbol(col[0]).is_content())
}

/// Bits an alignment could still recover: the bracket and class symbols of
/// Old rows whose class some pattern in Old refers to but which no row
/// references yet. Used to rank partial parses in the beam, never as a score.
fn open_references(a: &Alignment, referenced: &BTreeSet<&str>, model: &CodingModel) -> Result<f64> {
    let column_of = a.column_index();
    let mut bonus = 0.0;
    for (r, row) in a.rows().iter().enumerate().skip(1) {
        let s = &row.symbols;
        if !wrapped(s) || !referenced.contains(s[1].name()) {
            continue;
        }
        let last = s.len() - 1;
        if [0, 1, last].iter().all(|&p| a.columns()[column_of[r][p]].len() == 1) {
            bonus += symbol_cost(model, s[0].name())?
                + symbol_cost(model, s[1].name())?
                + symbol_cost(model, s[last].name())?;
        }
    }
    Ok(bonus)
}
