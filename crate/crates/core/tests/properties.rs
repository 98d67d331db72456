mod common;

use common::*;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn alignments_validate(corpus in corpus(ABCD, 1..=1, 1..=6), lines in grammar_lines(ABCD)) {
        alignments_are_valid(&corpus, &lines)?;
    }

    #[test]
    fn t_is_g_plus_e(data in stage_data()) {
        totals_add_up(&data)?;
    }

    #[test]
    fn grammar_text_round_trips(lines in grammar_lines(ABCD)) {
        round_trip(&lines)?;
    }

    #[test]
    fn canonicalize_idempotent(lines in grammar_lines(ABCD)) {
        canonical_is_idempotent(&lines)?;
    }

    #[test]
    fn tidy_idempotent(lines in grammar_lines(ABCD)) {
        tidy_is_idempotent(&lines)?;
    }
}
