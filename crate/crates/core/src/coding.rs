//! Bit accounting: symbol costs, pattern costs, alignment scores and the
//! grammar size `G`, encoded size `E` and total `T = G + E`.

use std::collections::{BTreeMap, BTreeSet};

use crate::alignment::Alignment;
use crate::error::{Error, Result};
use crate::pattern::{Pattern, PatternId};
use crate::repository::{Corpus, Repository};

/// How a probability is turned into a code length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CostMode {
    /// `-log2 p`, fractional bits.
    #[default]
    Ideal,
    /// Shannon-Fano-Elias word length `ceil(log2 1/p) + 1`.
    Sfe,
}

impl CostMode {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "ideal" => Some(CostMode::Ideal),
            "sfe" => Some(CostMode::Sfe),
            _ => None,
        }
    }

    /// Code length for a symbol seen `frequency` times out of `total`.
    pub fn cost(self, frequency: u64, total: u64) -> f64 {
        debug_assert!(frequency > 0 && frequency <= total);
        match self {
            CostMode::Ideal => -(frequency as f64 / total as f64).log2(),
            CostMode::Sfe => (ceil_log2_ratio(total, frequency) + 1) as f64,
        }
    }
}

/// `ceil(log2(total / frequency))` in exact integer arithmetic.
fn ceil_log2_ratio(total: u64, frequency: u64) -> u32 {
    let (t, f) = (total as u128, frequency as u128);
    let mut k = 0;
    while f << k < t {
        k += 1;
    }
    k
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Entry {
    pub frequency: u64,
    pub probability: f64,
    pub cost: f64,
}

/// Symbol type -> (frequency, probability, cost).
#[derive(Debug, Clone, PartialEq)]
pub struct CodingModel {
    entries: BTreeMap<String, Entry>,
    total_count: u64,
    mode: CostMode,
    fallback: Option<f64>,
}

impl CodingModel {
    /// Build a model from raw counts. Zero counts are dropped.
    pub fn from_frequencies(
        frequencies: impl IntoIterator<Item = (String, u64)>,
        mode: CostMode,
    ) -> Result<Self> {
        let counts: BTreeMap<String, u64> = frequencies
            .into_iter()
            .filter(|&(_, f)| f > 0)
            .fold(BTreeMap::new(), |mut m, (k, f)| {
                *m.entry(k).or_default() += f;
                m
            });
        let total_count: u64 = counts.values().sum();
        if total_count == 0 {
            return Err(Error::DegenerateModel);
        }
        let entries = counts
            .into_iter()
            .map(|(name, frequency)| {
                let entry = Entry {
                    frequency,
                    probability: frequency as f64 / total_count as f64,
                    cost: mode.cost(frequency, total_count),
                };
                (name, entry)
            })
            .collect();
        Ok(CodingModel {
            entries,
            total_count,
            mode,
            fallback: None,
        })
    }

    /// Cost charged for symbols the model has never seen. `None` makes them an error.
    pub fn with_fallback(mut self, fallback: Option<f64>) -> Self {
        self.fallback = fallback;
        self
    }

    /// Provisional cost for learner-introduced symbols: the rarest known symbol plus one bit.
    pub fn provisional_fallback(&self) -> f64 {
        self.entries
            .values()
            .map(|e| e.cost)
            .fold(0.0, f64::max)
            + 1.0
    }

    pub fn entry(&self, name: &str) -> Option<&Entry> {
        self.entries.get(name)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, &Entry)> + '_ {
        self.entries.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn total_count(&self) -> u64 {
        self.total_count
    }

    pub fn mode(&self) -> CostMode {
        self.mode
    }

    pub fn fallback(&self) -> Option<f64> {
        self.fallback
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// One entry per distinct symbol in New; the fallback is disabled.
pub fn compile_alphabet(corpus: &Corpus, mode: CostMode) -> Result<CodingModel> {
    if corpus.is_empty() {
        return Err(Error::InvalidArgument("empty corpus".into()));
    }
    CodingModel::from_frequencies(
        corpus
            .patterns()
            .iter()
            .flat_map(|p| p.symbols().iter().map(|s| (s.name().to_string(), 1))),
        mode,
    )
}

pub fn symbol_cost(model: &CodingModel, name: &str) -> Result<f64> {
    match (model.entries.get(name), model.fallback) {
        (Some(e), _) => Ok(e.cost),
        (None, Some(cost)) => Ok(cost),
        (None, None) => Err(Error::UnknownSymbol(name.to_string())),
    }
}

pub fn pattern_cost(model: &CodingModel, pattern: &Pattern) -> Result<f64> {
    pattern
        .symbols()
        .iter()
        .map(|s| symbol_cost(model, s.name()))
        .sum()
}

/// Cost of a pattern's C-symbols only, i.e. what it costs to send it uncompressed.
pub fn raw_cost(model: &CodingModel, pattern: &Pattern) -> Result<f64> {
    pattern.content().map(|s| symbol_cost(model, s.name())).sum()
}

/// Rebuild the model from pattern frequencies in Old plus the symbols of New,
/// and refresh every pattern's cached encoding cost. Symbols of patterns with
/// zero frequency fall back to the rarest-plus-one-bit cost.
pub fn recompute_costs(repo: &mut Repository, corpus: &Corpus, mode: CostMode) -> Result<CodingModel> {
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    for p in repo.iter() {
        if p.frequency == 0 {
            continue;
        }
        for s in p.symbols() {
            *counts.entry(s.name().to_string()).or_default() += p.frequency;
        }
    }
    for p in corpus.patterns() {
        for s in p.symbols() {
            *counts.entry(s.name().to_string()).or_default() += 1;
        }
    }
    let model = CodingModel::from_frequencies(counts, mode)?;
    let fallback = model.provisional_fallback();
    let model = model.with_fallback(Some(fallback));
    for p in repo.iter_mut() {
        p.encoding_cost = Some(pattern_cost(&model, p)?);
    }
    Ok(model)
}

/// Compression scores of an alignment.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Scores {
    /// Bits of New covered by Old.
    pub b_n: f64,
    /// Bits of the residual identifying code.
    pub b_e: f64,
    /// Compression difference `b_n - b_e`.
    pub cd: f64,
}

/// `B_N`: row-0 symbols in matched columns. `B_E`: ID-symbols of Old rows not
/// matched to another Old row. Stores and returns the scores.
pub fn score_alignment(alignment: &mut Alignment, model: &CodingModel) -> Result<Scores> {
    let scores = compute_scores(alignment, model)?;
    alignment.set_scores(scores);
    Ok(scores)
}

pub(crate) fn compute_scores(alignment: &Alignment, model: &CodingModel) -> Result<Scores> {
    let mut b_n = 0.0;
    let mut b_e = 0.0;
    for column in alignment.columns() {
        let old_cells = column.iter().filter(|c| c.row > 0).count();
        for cell in column {
            let symbol = alignment.symbol(*cell);
            if cell.row == 0 {
                if old_cells > 0 {
                    b_n += symbol_cost(model, symbol.name())?;
                }
            } else if symbol.is_id() && old_cells == 1 {
                b_e += symbol_cost(model, symbol.name())?;
            }
        }
    }
    Ok(Scores {
        b_n,
        b_e,
        cd: b_n - b_e,
    })
}

/// Grammar size: the summed cost of every member pattern, ID- and C-symbols alike.
pub fn grammar_g(members: &BTreeSet<PatternId>, repo: &Repository, model: &CodingModel) -> Result<f64> {
    members
        .iter()
        .try_fold(0.0, |acc, &id| Ok(acc + pattern_cost(model, repo.get(id)?)?))
}

/// An alignment reduced to what grammar scoring needs.
#[derive(Debug, Clone, PartialEq)]
pub struct Encoding {
    pub patterns: BTreeSet<PatternId>,
    pub cost: f64,
}

impl Encoding {
    pub fn of(alignment: &Alignment, model: &CodingModel) -> Result<Self> {
        Ok(Encoding {
            patterns: alignment.old_pattern_ids().into_iter().collect(),
            cost: compute_scores(alignment, model)?.b_e,
        })
    }
}

/// Encoded size of one New pattern: cheapest encoding using only `members`,
/// or its raw cost when none qualifies.
pub fn encoded_size(members: &BTreeSet<PatternId>, encodings: &[Encoding], raw: f64) -> f64 {
    encodings
        .iter()
        .filter(|e| e.patterns.is_subset(members))
        .map(|e| e.cost)
        .fold(raw, f64::min)
}

/// `E` over the whole corpus given each New pattern's full alignments.
pub fn grammar_e(
    members: &BTreeSet<PatternId>,
    full_alignments: &[Vec<Alignment>],
    corpus: &Corpus,
    model: &CodingModel,
) -> Result<f64> {
    let mut total = 0.0;
    for (i, pattern) in corpus.patterns().iter().enumerate() {
        let encodings = full_alignments
            .get(i)
            .map(|v| v.iter().map(|a| Encoding::of(a, model)).collect::<Result<Vec<_>>>())
            .transpose()?
            .unwrap_or_default();
        total += encoded_size(members, &encodings, raw_cost(model, pattern)?);
    }
    Ok(total)
}
