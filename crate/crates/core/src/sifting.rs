//! Sifting and sorting: count how often Old patterns take part in full
//! alignments, recompute symbol costs from those counts, and build
//! alternative grammars stage by stage, keeping those with the lowest
//! `T = G + E`.

use std::collections::{BTreeMap, BTreeSet};

use crate::alignment::{full_alignments, Alignment, AlignmentParams};
use crate::coding::{
    compile_alphabet, encoded_size, pattern_cost, raw_cost, recompute_costs, CodingModel,
    CostMode, Encoding,
};
use crate::error::{Error, Result};
use crate::grammar::{tidy_grammar, Grammar};
use crate::learning::process_new_pattern;
use crate::pattern::PatternId;
use crate::repository::{Corpus, IdAllocator, Repository};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchParams {
    /// Alternative grammars kept after each stage.
    pub grammar_beam: usize,
    /// Candidate member sets tried per New pattern.
    pub max_members_per_stage: usize,
    /// Count frequencies from the learning-phase alignments instead of
    /// aligning every New pattern again.
    pub reuse_learning_alignments: bool,
}

impl Default for SearchParams {
    fn default() -> Self {
        SearchParams {
            grammar_beam: 8,
            max_members_per_stage: 8,
            reuse_learning_alignments: false,
        }
    }
}

impl SearchParams {
    pub fn validate(&self) -> Result<()> {
        if self.grammar_beam == 0 || self.max_members_per_stage == 0 {
            return Err(Error::InvalidArgument("search parameters must be positive".into()));
        }
        Ok(())
    }
}

/// Cumulative figures for the best grammar after `pattern` New patterns.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsRow {
    pub pattern: usize,
    pub g: f64,
    pub e: f64,
    pub t: f64,
    pub original: f64,
    pub compression: f64,
}

/// Zero every frequency, align each New pattern against Old, keep the full
/// alignments, and add to each pattern the most rows it occupies in any one
/// of them. Returns the full alignments per New pattern; a pattern with none
/// contributes nothing.
pub fn count_frequencies(
    corpus: &Corpus,
    repo: &mut Repository,
    params: &AlignmentParams,
    model: &CodingModel,
) -> Result<Vec<Vec<Alignment>>> {
    let mut full = Vec::with_capacity(corpus.len());
    for cpfn in corpus.patterns() {
        full.push(full_alignments(cpfn, repo, params, model)?);
    }
    apply_counts(repo, &full)?;
    Ok(full)
}

/// Frequencies from alignments already at hand.
pub fn apply_counts(repo: &mut Repository, full: &[Vec<Alignment>]) -> Result<()> {
    for p in repo.iter_mut() {
        p.frequency = 0;
    }
    for alignments in full {
        let mut most: BTreeMap<PatternId, usize> = BTreeMap::new();
        for a in alignments {
            for (id, n) in a.count_max_occurrences() {
                let m = most.entry(id).or_default();
                *m = (*m).max(n);
            }
        }
        for (id, n) in most {
            repo.get_mut(id)?.frequency += n as u64;
        }
    }
    Ok(())
}

#[derive(Debug, Clone)]
struct Lineage {
    members: BTreeSet<PatternId>,
    g: f64,
    e: f64,
    history: Vec<(f64, f64)>,
}

impl Lineage {
    fn t(&self) -> f64 {
        self.g + self.e
    }
}

/// Scoring data for the staged search, fixed once costs are known.
#[derive(Debug, Clone)]
pub struct StageData {
    pub encodings: Vec<Vec<Encoding>>,
    pub raw: Vec<f64>,
    pub pattern_costs: BTreeMap<PatternId, f64>,
}

impl StageData {
    pub fn new(
        corpus: &Corpus,
        full: &[Vec<Alignment>],
        repo: &Repository,
        model: &CodingModel,
    ) -> Result<Self> {
        let mut encodings = Vec::with_capacity(corpus.len());
        for i in 0..corpus.len() {
            let mut enc = full
                .get(i)
                .map(|v| v.iter().map(|a| Encoding::of(a, model)).collect::<Result<Vec<_>>>())
                .transpose()?
                .unwrap_or_default();
            enc.sort_by(|a, b| a.cost.total_cmp(&b.cost).then_with(|| a.patterns.cmp(&b.patterns)));
            enc.dedup_by(|a, b| a.patterns == b.patterns);
            encodings.push(enc);
        }
        let raw = corpus
            .patterns()
            .iter()
            .map(|p| raw_cost(model, p))
            .collect::<Result<Vec<_>>>()?;
        let pattern_costs = repo
            .iter()
            .map(|p| Ok((p.id, pattern_cost(model, p)?)))
            .collect::<Result<_>>()?;
        Ok(StageData { encodings, raw, pattern_costs })
    }

    pub fn g(&self, members: &BTreeSet<PatternId>) -> Result<f64> {
        members
            .iter()
            .try_fold(0.0, |acc, id| {
                Ok(acc + self.pattern_costs.get(id).copied().ok_or(Error::DanglingPattern(*id))?)
            })
    }

    /// `E` over New patterns `0..k`.
    pub fn e(&self, members: &BTreeSet<PatternId>, k: usize) -> f64 {
        (0..k)
            .map(|i| encoded_size(members, &self.encodings[i], self.raw[i]))
            .fold(0.0, |acc, v| acc + v)
    }

    pub fn t(&self, members: &BTreeSet<PatternId>, k: usize) -> Result<f64> {
        Ok(self.g(members)? + self.e(members, k))
    }
}

/// Staged beam search over grammars. Stage k extends every surviving grammar
/// with the Old patterns of one of New pattern k's full alignments (or with
/// nothing) and scores it over New patterns `1..=k`. Returns the final
/// grammars sorted by `T`, and the per-stage metrics of the best one.
pub fn compile_alternative_grammars(
    data: &StageData,
    params: &SearchParams,
) -> Result<(Vec<Grammar>, Vec<MetricsRow>)> {
    let mut beam = vec![Lineage {
        members: BTreeSet::new(),
        g: 0.0,
        e: 0.0,
        history: Vec::new(),
    }];
    let stages = data.raw.len();
    for k in 0..stages {
        let mut options: Vec<&BTreeSet<PatternId>> = data.encodings[k]
            .iter()
            .map(|e| &e.patterns)
            .take(params.max_members_per_stage)
            .collect();
        let empty = BTreeSet::new();
        options.push(&empty);
        let mut next: BTreeMap<BTreeSet<PatternId>, Lineage> = BTreeMap::new();
        for state in &beam {
            for option in &options {
                let members: BTreeSet<PatternId> = state.members.union(option).copied().collect();
                if next.contains_key(&members) {
                    continue;
                }
                let g = data.g(&members)?;
                let e = data.e(&members, k + 1);
                let mut history = state.history.clone();
                history.push((g, e));
                next.insert(members.clone(), Lineage { members, g, e, history });
            }
        }
        beam = next.into_values().collect();
        beam.sort_by(|a, b| {
            a.t()
                .total_cmp(&b.t())
                .then(a.members.len().cmp(&b.members.len()))
                .then_with(|| a.members.cmp(&b.members))
        });
        beam.truncate(params.grammar_beam);
    }
    let best = &beam[0];
    let mut original = 0.0;
    let metrics = best
        .history
        .iter()
        .enumerate()
        .map(|(i, &(g, e))| {
            original += data.raw[i];
            MetricsRow {
                pattern: i + 1,
                g,
                e,
                t: g + e,
                original,
                compression: (g + e) / original,
            }
        })
        .collect();
    let grammars = beam
        .into_iter()
        .map(|l| Grammar::new(l.members, l.g, l.e))
        .collect();
    Ok((grammars, metrics))
}

#[derive(Debug, Clone)]
pub struct SiftOutcome {
    /// Alternative grammars, best first, as subsets of Old.
    pub grammars: Vec<Grammar>,
    /// The best grammar after tidying, with its own pattern store.
    pub tidied: (Grammar, Repository),
    pub metrics: Vec<MetricsRow>,
    /// Model after frequency counting.
    pub model: CodingModel,
    /// Full alignments per New pattern.
    pub full_alignments: Vec<Vec<Alignment>>,
}

/// Count frequencies, recompute costs, compile grammars and tidy the best.
pub fn sifting_and_sorting(
    corpus: &Corpus,
    repo: &mut Repository,
    align: &AlignmentParams,
    search: &SearchParams,
    mode: CostMode,
    model: &CodingModel,
    learning_alignments: Option<&[Vec<Alignment>]>,
) -> Result<SiftOutcome> {
    let full = match learning_alignments.filter(|_| search.reuse_learning_alignments) {
        Some(found) => {
            let full: Vec<Vec<Alignment>> = found
                .iter()
                .map(|v| v.iter().filter(|a| a.is_full()).cloned().collect())
                .collect();
            apply_counts(repo, &full)?;
            full
        }
        None => count_frequencies(corpus, repo, align, model)?,
    };
    let model = recompute_costs(repo, corpus, mode)?;
    let data = StageData::new(corpus, &full, repo, &model)?;
    let (grammars, metrics) = compile_alternative_grammars(&data, search)?;
    let tidied = tidy_grammar(&grammars[0], repo)?;
    Ok(SiftOutcome {
        grammars,
        tidied,
        metrics,
        model,
        full_alignments: full,
    })
}

#[derive(Debug, Clone, Default)]
pub struct RunParams {
    pub align: AlignmentParams,
    pub search: SearchParams,
    pub mode: CostMode,
    /// Purge Old down to the best grammar after every batch of this many New patterns.
    pub batch_size: Option<usize>,
    /// Cost of learner-introduced symbols before the first sifting; the
    /// rarest New symbol plus one bit when unset.
    pub provisional_cost: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub sift: SiftOutcome,
    pub repo: Repository,
    /// Alignments selected while learning, per New pattern.
    pub learning_alignments: Vec<Vec<Alignment>>,
}

/// The whole pipeline: alphabet, learning over every New pattern, then
/// sifting and sorting.
pub fn sp70_run(corpus: &Corpus, params: &RunParams) -> Result<RunOutcome> {
    params.align.validate()?;
    params.search.validate()?;
    if params.batch_size == Some(0) {
        return Err(Error::InvalidArgument("batch size must be positive".into()));
    }
    let alphabet = compile_alphabet(corpus, params.mode)?;
    let fallback = match params.provisional_cost {
        Some(c) if c.is_finite() && c > 0.0 => c,
        Some(c) => return Err(Error::InvalidArgument(format!("provisional cost must be positive, got {c}"))),
        None => alphabet.provisional_fallback(),
    };
    let model = alphabet.with_fallback(Some(fallback));
    let mut repo = Repository::new();
    let mut alloc = IdAllocator::new();
    let mut learning = Vec::with_capacity(corpus.len());

    let batch = params.batch_size.unwrap_or(corpus.len());
    let mut start = 0;
    while start < corpus.len() {
        let end = (start + batch).min(corpus.len());
        for cpfn in &corpus.patterns()[start..end] {
            learning.push(process_new_pattern(cpfn, &mut repo, &params.align, &model, &mut alloc)?);
        }
        if end < corpus.len() {
            let seen = corpus.slice(0..end)?;
            let mut scratch = repo.clone();
            let sift = sifting_and_sorting(
                &seen,
                &mut scratch,
                &params.align,
                &params.search,
                params.mode,
                &model,
                Some(&learning),
            )?;
            let keep = &sift.grammars[0].members;
            repo.retain(|id| keep.contains(&id));
        }
        start = end;
    }

    let sift = sifting_and_sorting(
        corpus,
        &mut repo,
        &params.align,
        &params.search,
        params.mode,
        &model,
        Some(&learning),
    )?;
    Ok(RunOutcome {
        sift,
        repo,
        learning_alignments: learning,
    })
}
