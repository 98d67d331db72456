//! Generators and helpers shared by the integration tests.
#![allow(dead_code)]

use proptest::prelude::*;
use proptest::test_runner::TestCaseError;
use sp70::alignment::{create_multiple_alignments, full_alignments};
use sp70::coding::{compile_alphabet, CodingModel, Encoding};
use sp70::io::{format_grammar, format_metrics, parse_grammar};
use sp70::learning::process_new_pattern;
use sp70::sifting::{compile_alternative_grammars, StageData};
use sp70::{
    canonicalize, tidy_grammar, Alignment, AlignmentParams, CostMode, Corpus, Grammar, IdAllocator, Origin,
    Pattern, PatternId, Repository, SearchParams,
};

pub const FIG6: [&str; 8] = [
    "thatboyruns",
    "thatgirlruns",
    "thatboywalks",
    "thatgirlwalks",
    "someboyruns",
    "somegirlruns",
    "someboywalks",
    "somegirlwalks",
];

/// Letters separated by spaces, the token form `Corpus::from_lines` takes.
pub fn spaced(word: &str) -> String {
    word.chars().map(String::from).collect::<Vec<_>>().join(" ")
}

pub fn fig6_corpus(n: usize) -> Corpus {
    let lines: Vec<String> = FIG6[..n].iter().map(|s| spaced(s)).collect();
    Corpus::from_lines(lines.iter().map(String::as_str)).unwrap()
}

pub fn model_for(corpus: &Corpus, mode: CostMode) -> CodingModel {
    let m = compile_alphabet(corpus, mode).unwrap();
    let fallback = m.provisional_fallback();
    m.with_fallback(Some(fallback))
}

pub fn word(alphabet: &'static [&'static str], len: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Vec<String>> {
    prop::collection::vec(prop::sample::select(alphabet), len)
        .prop_map(|v| v.into_iter().map(String::from).collect())
}

pub fn corpus(
    alphabet: &'static [&'static str],
    sentences: std::ops::RangeInclusive<usize>,
    len: std::ops::RangeInclusive<usize>,
) -> impl Strategy<Value = Corpus> {
    prop::collection::vec(word(alphabet, len), sentences).prop_map(|s| {
        let lines: Vec<String> = s.iter().map(|w| w.join(" ")).collect();
        Corpus::from_lines(lines.iter().map(String::as_str)).unwrap()
    })
}

/// Grammar lines: classes of segments, then abstract patterns whose slots
/// refer only to classes that exist.
pub fn grammar_lines(alphabet: &'static [&'static str]) -> impl Strategy<Value = Vec<String>> {
    let classes = prop::collection::vec(prop::collection::vec(word(alphabet, 1..=4), 1..=3), 1..=4);
    (classes, any::<u64>()).prop_flat_map(move |(classes, seed)| {
        let n = classes.len();
        let abstracts = prop::collection::vec(
            (prop::collection::vec(0..n, 1..=3), prop::bool::ANY, prop::collection::vec(prop::sample::select(alphabet), 0..=1)),
            0..=2,
        );
        (Just(classes), abstracts, Just(seed))
    })
    .prop_map(|(classes, abstracts, seed)| {
        let mut lines = Vec::new();
        let mut disc = seed % 5;
        for (k, members) in classes.iter().enumerate() {
            for m in members {
                lines.push(format!("< %{} {} {} >", 10 + 3 * k, disc, m.join(" ")));
                disc += 1;
            }
        }
        for (i, (slots, with_disc, extra)) in abstracts.iter().enumerate() {
            let mut parts = vec!["<".to_string()];
            parts.push(format!("%{}", 90 + i));
            if *with_disc {
                parts.push(disc.to_string());
                disc += 1;
            }
            for (j, &k) in slots.iter().enumerate() {
                parts.push(format!("< %{} >", 10 + 3 * k));
                if j == 0 {
                    parts.extend(extra.iter().map(|s| s.to_string()));
                }
            }
            parts.push(">".into());
            lines.push(parts.join(" "));
        }
        lines
    })
}

pub fn repo_from_lines(lines: &[String]) -> (Grammar, Repository) {
    let mut repo = Repository::new();
    let members = lines
        .iter()
        .map(|l| {
            let origin = if l.matches('<').count() > 1 { Origin::DerivedAbstract } else { Origin::DerivedSegment };
            repo.add(Pattern::parse_line(l, origin).unwrap())
        })
        .collect();
    (Grammar::new(members, 0.0, 0.0), repo)
}

pub const ABCD: &[&str] = &["a", "b", "c", "d"];

/// Scoring tables for the staged search: per-pattern costs, raw sentence
/// costs and, per sentence, encodings as (pattern ids, cost).
pub fn stage_data() -> impl Strategy<Value = StageData> {
    let stage = (10.0f64..100.0).prop_flat_map(|raw| {
        let enc = (prop::collection::btree_set(0u32..6, 1..=3), 0.0..raw);
        (Just(raw), prop::collection::vec(enc, 0..=4))
    });
    (prop::collection::vec(1.0f64..50.0, 6), prop::collection::vec(stage, 1..=3)).prop_map(|(costs, stages)| {
        StageData {
            pattern_costs: costs.iter().enumerate().map(|(i, &c)| (PatternId(i as u32), c)).collect(),
            raw: stages.iter().map(|s| s.0).collect(),
            encodings: stages
                .into_iter()
                .map(|(_, encs)| {
                    encs.into_iter()
                        .map(|(ids, cost)| Encoding { patterns: ids.into_iter().map(PatternId).collect(), cost })
                        .collect()
                })
                .collect(),
        }
    })
}

/// Every alignment produced for the sentence against the grammar, and by
/// one learning pass over it, is structurally valid and scored consistently.
pub fn alignments_are_valid(corpus: &Corpus, lines: &[String]) -> Result<(), TestCaseError> {
    let (_, mut repo) = repo_from_lines(lines);
    let model = model_for(corpus, CostMode::Ideal);
    let params = AlignmentParams::default();
    let cpfn = &corpus.patterns()[0];
    let check = |a: &Alignment| -> Result<(), TestCaseError> {
        prop_assert!(a.validate().is_ok(), "{:?}", a.validate());
        let s = a.scores();
        prop_assert!((s.cd - (s.b_n - s.b_e)).abs() < 1e-9);
        Ok(())
    };
    for a in create_multiple_alignments(cpfn, &repo, &params, &model, None).unwrap() {
        check(&a)?;
    }
    for a in full_alignments(cpfn, &repo, &params, &model).unwrap() {
        check(&a)?;
        prop_assert!(a.is_full());
    }
    let mut alloc = IdAllocator::new();
    for _ in 0..100 {
        alloc.next_class();
    }
    for a in process_new_pattern(cpfn, &mut repo, &params, &model, &mut alloc).unwrap() {
        check(&a)?;
    }
    Ok(())
}

/// Scores of every grammar the staged search keeps, checked against sums
/// computed here.
pub fn totals_add_up(data: &StageData) -> Result<(), TestCaseError> {
    let (grammars, metrics) = compile_alternative_grammars(data, &SearchParams::default()).unwrap();
    let stages = data.raw.len();
    for g in &grammars {
        prop_assert_eq!(g.t, g.g + g.e);
        let size: f64 = g.members.iter().map(|id| data.pattern_costs[id]).sum();
        prop_assert!((g.g - size).abs() < 1e-9);
        let encoded: f64 = (0..stages)
            .map(|k| {
                data.encodings[k]
                    .iter()
                    .filter(|e| e.patterns.is_subset(&g.members))
                    .map(|e| e.cost)
                    .fold(data.raw[k], f64::min)
            })
            .sum();
        prop_assert!((g.e - encoded).abs() < 1e-9);
    }
    prop_assert_eq!(metrics.len(), stages);
    let csv = format_metrics(&metrics);
    for (row, line) in metrics.iter().zip(csv.lines().skip(1)) {
        prop_assert_eq!(row.t, row.g + row.e);
        let f: Vec<f64> = line.split(',').map(|v| v.parse().unwrap()).collect();
        prop_assert_eq!(f.len(), 6);
        prop_assert!((f[3] - (f[1] + f[2])).abs() <= 0.0101);
        prop_assert_eq!(format!("{:.2}", f[5]), format!("{:.2}", row.t / row.original));
    }
    Ok(())
}

pub fn round_trip(lines: &[String]) -> Result<(), TestCaseError> {
    let (g, repo) = repo_from_lines(lines);
    let (tg, trepo) = tidy_grammar(&g, &repo).unwrap();
    for (g, repo) in [(&g, &repo), (&tg, &trepo)] {
        let text = format_grammar(g, repo).unwrap();
        let (g2, r2) = parse_grammar(&text).unwrap();
        prop_assert_eq!(format_grammar(&g2, &r2).unwrap(), text);
    }
    Ok(())
}

pub fn canonical_is_idempotent(lines: &[String]) -> Result<(), TestCaseError> {
    let (g, repo) = repo_from_lines(lines);
    let c = canonicalize(&g, &repo).unwrap();
    let (g2, r2) = c.to_repository().unwrap();
    prop_assert_eq!(canonicalize(&g2, &r2).unwrap(), c);
    Ok(())
}

pub fn tidy_is_idempotent(lines: &[String]) -> Result<(), TestCaseError> {
    let (g, repo) = repo_from_lines(lines);
    let (g1, r1) = tidy_grammar(&g, &repo).unwrap();
    let (g2, r2) = tidy_grammar(&g1, &r1).unwrap();
    prop_assert_eq!(format_grammar(&g2, &r2).unwrap(), format_grammar(&g1, &r1).unwrap());
    Ok(())
}
