mod common;

use common::*;
use sp70::alignment::create_multiple_alignments;
use sp70::io::{format_metrics, parse_corpus, Tokenization};
use sp70::pattern::IdKind;
use sp70::{sp70_run, CostMode, Origin, RunParams};

#[test]
fn fig6_run_reports_every_stage() {
    let out = sp70_run(&fig6_corpus(8), &RunParams::default()).unwrap();
    let m = &out.sift.metrics;
    assert_eq!(m.len(), 8);
    assert!((m[0].compression - 1.0).abs() <= 0.05, "{}", m[0].compression);
    for row in m {
        assert_eq!(row.t, row.g + row.e);
    }
    let best = &out.sift.grammars[0];
    assert_eq!(best.t, m[7].t);
    assert!(best.t <= m[7].original + 1e-9);
    let csv = format_metrics(m);
    assert_eq!(csv.lines().count(), 9);
    assert!(csv.lines().nth(1).unwrap().ends_with(",1.00"));
}

#[test]
fn two_sentences_give_word_classes() {
    let out = sp70_run(&fig6_corpus(2), &RunParams::default()).unwrap();
    let segment = |w: &str| {
        out.repo
            .iter()
            .find(|p| p.origin == Origin::DerivedSegment && p.content_names().concat() == w)
            .unwrap_or_else(|| panic!("no segment {w}"))
    };
    let class = |w: &str| segment(w).class_symbol().unwrap().to_string();
    assert_eq!(class("girl"), class("boy"));
    let wanted = [class("that"), class("boy"), class("runs")];
    assert!(out
        .repo
        .iter()
        .any(|p| p.origin == Origin::DerivedAbstract && p.slot_classes() == wanted));
}

#[test]
fn a_sentence_never_matches_its_own_copy() {
    for line in ["thatboyruns", "abab", "aaaa", "t"] {
        let corpus = parse_corpus(line, Tokenization::Chars).unwrap();
        let out = sp70_run(&corpus, &RunParams::default()).unwrap();
        for a in &out.learning_alignments[0] {
            a.validate().unwrap();
            let copy = a.self_copy().unwrap();
            for col in a.columns() {
                let new = col.iter().find(|c| c.row == 0);
                let own = col.iter().find(|c| a.rows()[c.row].source == sp70::alignment::RowSource::Old(copy));
                if let (Some(n), Some(c)) = (new, own) {
                    assert_ne!(a.symbol(*c).provenance(), Some(n.pos));
                }
            }
        }
    }
}

#[test]
fn only_the_off_index_t_matches_in_that() {
    let corpus = parse_corpus("that", Tokenization::Chars).unwrap();
    let out = sp70_run(&corpus, &RunParams::default()).unwrap();
    let best = &out.learning_alignments[0][0];
    let matched: Vec<&str> = best
        .columns()
        .iter()
        .filter(|col| col.len() > 1 && col[0].row == 0)
        .map(|col| best.symbol(col[0]).name())
        .collect();
    assert_eq!(matched, ["t"]);
}

#[test]
fn batching_purges_old_and_still_runs() {
    let corpus = fig6_corpus(8);
    let params = RunParams { batch_size: Some(4), ..RunParams::default() };
    let out = sp70_run(&corpus, &params).unwrap();
    assert_eq!(out.sift.metrics.len(), 8);
    assert!(out.sift.grammars[0].t <= out.sift.metrics[7].original + 1e-9);
}

#[test]
fn sfe_costs_are_whole_bits() {
    let params = RunParams { mode: CostMode::Sfe, ..RunParams::default() };
    let out = sp70_run(&fig6_corpus(3), &params).unwrap();
    for (_, e) in out.sift.model.entries() {
        assert_eq!(e.cost.fract(), 0.0);
    }
    for row in &out.sift.metrics {
        assert_eq!(row.t, row.g + row.e);
    }
}

#[test]
fn repeated_sentences_are_cheaper_with_a_grammar() {
    let corpus = parse_corpus("abcdefgh\nabcdefgh\nabcdefgh\nabcdefgh\n", Tokenization::Chars).unwrap();
    let out = sp70_run(&corpus, &RunParams::default()).unwrap();
    let last = out.sift.metrics.last().unwrap();
    assert!(last.compression < 1.0, "{last:?}");
    assert!(!out.sift.tidied.0.members.is_empty());
}

#[test]
fn learned_alignments_use_only_old_rows_below_row_zero() {
    let corpus = fig6_corpus(3);
    let out = sp70_run(&corpus, &RunParams::default()).unwrap();
    let model = model_for(&corpus, CostMode::Ideal);
    let again = create_multiple_alignments(&corpus.patterns()[2], &out.repo, &Default::default(), &model, None).unwrap();
    for a in again {
        a.validate().unwrap();
        assert!(a.rows()[1..].iter().all(|r| r.symbols[0].is(IdKind::LeftBracket)));
    }
}
