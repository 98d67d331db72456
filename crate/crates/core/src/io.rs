//! Corpus loading, grammar files, metrics CSV and alignment rendering.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::alignment::Alignment;
use crate::error::{Error, Result};
use crate::grammar::{parse_member, Grammar};
use crate::pattern::{in_id_namespace, make_pattern, Origin, Symbol};
use crate::repository::{Corpus, Repository};
use crate::sifting::MetricsRow;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Tokenization {
    /// Every non-whitespace character is a symbol.
    #[default]
    Chars,
    /// Every whitespace separated token is a symbol.
    WhitespaceTokens,
}

impl Tokenization {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "chars" => Some(Tokenization::Chars),
            "tokens" | "whitespace_tokens" => Some(Tokenization::WhitespaceTokens),
            _ => None,
        }
    }
}

pub fn parse_corpus(text: &str, tokenization: Tokenization) -> Result<Corpus> {
    let mut patterns = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let tokens: Vec<String> = match tokenization {
            Tokenization::Chars => line
                .chars()
                .filter(|c| !c.is_whitespace())
                .map(String::from)
                .collect(),
            Tokenization::WhitespaceTokens => line.split_whitespace().map(String::from).collect(),
        };
        if tokens.is_empty() {
            continue;
        }
        let symbols = tokens
            .into_iter()
            .map(|t| {
                if in_id_namespace(&t) {
                    Err(Error::NamespaceCollision { line: i + 1, token: t })
                } else {
                    Symbol::content(t)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        patterns.push(make_pattern(symbols, Origin::NewInput)?);
    }
    if patterns.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    Corpus::new(patterns)
}

/// One pattern per line; blank lines are skipped.
pub fn load_corpus(path: impl AsRef<Path>, tokenization: Tokenization) -> Result<Corpus> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_corpus(&text, tokenization)
}

pub fn format_grammar(grammar: &Grammar, repo: &Repository) -> Result<String> {
    let mut out = String::new();
    for p in grammar.patterns(repo)? {
        out.push_str(&p.to_line());
        out.push('\n');
    }
    Ok(out)
}

pub fn parse_grammar(text: &str) -> Result<(Grammar, Repository)> {
    let mut repo = Repository::new();
    let mut members = std::collections::BTreeSet::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let p = parse_member(line).map_err(|e| Error::Parse {
            line: i + 1,
            message: e.to_string(),
        })?;
        members.insert(repo.add(p));
    }
    Ok((Grammar::new(members, 0.0, 0.0), repo))
}

pub fn save_grammar(grammar: &Grammar, repo: &Repository, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, format_grammar(grammar, repo)?).map_err(|e| Error::io(path, e))
}

pub fn load_grammar(path: impl AsRef<Path>) -> Result<(Grammar, Repository)> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_grammar(&text)
}

pub const METRICS_HEADER: &str = "pattern,G,E,T,original,compression";

pub fn format_metrics(rows: &[MetricsRow]) -> String {
    let mut out = String::from(METRICS_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{:.2},{:.2},{:.2},{:.2},{:.2}",
            r.pattern, r.g, r.e, r.t, r.original, r.compression
        );
    }
    out
}

pub fn emit_metrics(rows: &[MetricsRow], path: impl AsRef<Path>) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::InvalidArgument("no metrics rows to write".into()));
    }
    let path = path.as_ref();
    fs::write(path, format_metrics(rows)).map_err(|e| Error::io(path, e))
}

/// Fixed-width text rendering: one line per row, labelled with the row number
/// on both sides, with connector lines between rows. A matched column draws
/// `|` from its top cell to its bottom cell, through any row it skips.
pub fn render_alignment(alignment: &Alignment) -> String {
    let rows = alignment.row_count();
    let label = (rows - 1).to_string().len();
    let mut x = Vec::with_capacity(alignment.columns().len());
    let mut width = 0;
    for col in alignment.columns() {
        x.push(width);
        width += alignment.symbol(col[0]).name().chars().count() + 1;
    }
    let mut grid: Vec<Vec<char>> = vec![vec![' '; width]; 2 * rows - 1];
    for (ci, col) in alignment.columns().iter().enumerate() {
        let name: Vec<char> = alignment.symbol(col[0]).name().chars().collect();
        for cell in col {
            for (k, ch) in name.iter().enumerate() {
                grid[2 * cell.row][x[ci] + k] = *ch;
            }
        }
        if col.len() >= 2 {
            let top = col.first().map(|c| c.row).unwrap_or(0);
            let bottom = col.last().map(|c| c.row).unwrap_or(0);
            for line in &mut grid[2 * top + 1..2 * bottom] {
                if line[x[ci]] == ' ' {
                    line[x[ci]] = '|';
                }
            }
        }
    }
    let mut out = String::new();
    for (i, line) in grid.iter().enumerate() {
        let body: String = line.iter().collect();
        if i % 2 == 0 {
            let r = i / 2;
            let _ = writeln!(out, "{r:<label$} {body}{r}");
        } else {
            let _ = writeln!(out, "{:<label$} {}", "", body.trim_end());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;
    use crate::alignment::{create_multiple_alignments, AlignmentParams};
    use crate::coding::{compile_alphabet, CostMode};
    use crate::pattern::Pattern;

    const FIG6: &str = "that boy runs\nthat girl runs\nthat boy walks\nthat girl walks\n\
                        some boy runs\nsome girl runs\nsome boy walks\nsome girl walks\n";

    #[test]
    fn chars_corpus() {
        let c = parse_corpus(FIG6, Tokenization::Chars).unwrap();
        assert_eq!(c.len(), 8);
        assert_eq!(c.patterns()[0].content_names().join(" "), "t h a t b o y r u n s");
    }

    #[test]
    fn blank_lines_skipped() {
        let spaced = FIG6.replace('\n', "\n\n  \n");
        let a = parse_corpus(FIG6, Tokenization::Chars).unwrap();
        let b = parse_corpus(&spaced, Tokenization::Chars).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn token_corpus_and_collisions() {
        let c = parse_corpus("the cat\nthe dog\n", Tokenization::WhitespaceTokens).unwrap();
        assert_eq!(c.patterns()[1].content_names(), ["the", "dog"]);
        for bad in ["the <", "a > b", "%1 x", "a 12"] {
            let e = parse_corpus(bad, Tokenization::WhitespaceTokens).unwrap_err();
            assert!(matches!(e, Error::NamespaceCollision { line: 1, .. }), "{bad}: {e}");
        }
        let e = parse_corpus("ok\nab<c\n", Tokenization::Chars).unwrap_err();
        assert!(matches!(e, Error::NamespaceCollision { line: 2, .. }));
        assert!(matches!(parse_corpus("\n \n", Tokenization::Chars), Err(Error::EmptyCorpus)));
    }

    #[test]
    fn load_from_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("fig6.txt");
        fs::write(&path, FIG6).unwrap();
        assert_eq!(load_corpus(&path, Tokenization::Chars).unwrap().len(), 8);
        assert!(matches!(
            load_corpus(dir.path().join("missing"), Tokenization::Chars),
            Err(Error::Io { .. })
        ));
    }

    const GRAMMAR: &str = "< %1 0 s o m e >\n< %1 1 t h a t >\n< %2 0 b o y >\n< %2 1 g i r l >\n\
                           < %3 0 r u n s >\n< %3 1 w a l k s >\n< %4 0 < %1 > < %2 > < %3 > >\n";

    #[test]
    fn grammar_round_trip_is_byte_identical() {
        let (g, repo) = parse_grammar(GRAMMAR).unwrap();
        assert_eq!(g.members.len(), 7);
        let once = format_grammar(&g, &repo).unwrap();
        assert_eq!(once, GRAMMAR);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.txt");
        save_grammar(&g, &repo, &path).unwrap();
        let (g2, repo2) = load_grammar(&path).unwrap();
        assert_eq!(format_grammar(&g2, &repo2).unwrap(), once);
    }

    #[test]
    fn malformed_grammar_line() {
        let text = "< %1 0 s o m e >\n< %1 b o y\n";
        match parse_grammar(text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn metrics_csv() {
        let rows = vec![
            MetricsRow { pattern: 1, g: 10.0, e: 2.5, t: 12.5, original: 12.0, compression: 12.5 / 12.0 },
            MetricsRow { pattern: 2, g: 10.0, e: 5.0, t: 15.0, original: 24.0, compression: 0.625 },
        ];
        let csv = format_metrics(&rows);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], METRICS_HEADER);
        assert_eq!(lines[1], "1,10.00,2.50,12.50,12.00,1.04");
        for line in &lines[1..] {
            let fields: Vec<f64> = line.split(',').map(|f| f.parse().unwrap()).collect();
            assert_eq!(fields.len(), 6);
        }
        assert!(emit_metrics(&[], tempfile::tempdir().unwrap().path().join("m.csv")).is_err());
    }

    /// Recover the column structure of a rendering: for every symbol on a row
    /// line, its x position; cells at the same x belong to one column. A `|`
    /// on a row line is a connector passing through that row.
    fn reparse(text: &str, rows: usize) -> BTreeSet<Vec<(usize, usize)>> {
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2 * rows - 1);
        let label = (rows - 1).to_string().len() + 1;
        let mut by_x: std::collections::BTreeMap<usize, Vec<(usize, usize)>> = Default::default();
        for r in 0..rows {
            let line = lines[2 * r];
            assert!(line.starts_with(&format!("{r:<width$}", width = label - 1)));
            assert!(line.ends_with(&r.to_string()));
            let body = &line[label..line.len() - r.to_string().len()];
            let mut pos = 0;
            let mut x = 0;
            for token in body.split(' ') {
                if !token.is_empty() && token != "|" {
                    by_x.entry(x).or_default().push((r, pos));
                    pos += 1;
                }
                x += token.len() + 1;
            }
        }
        by_x.into_values().collect()
    }

    #[test]
    fn rendering_round_trip() {
        let corpus = parse_corpus("that girl runs\n", Tokenization::Chars).unwrap();
        let model = compile_alphabet(&corpus, CostMode::Ideal).unwrap().with_fallback(Some(5.0));
        let mut repo = Repository::new();
        for line in ["< %1 0 t h a t >", "< %2 1 g i r l >", "< %3 2 r u n s >", "< %4 3 < %1 > < %2 > < %3 > >"] {
            repo.add(Pattern::parse_line(line, Origin::DerivedSegment).unwrap());
        }
        let found =
            create_multiple_alignments(&corpus.patterns()[0], &repo, &AlignmentParams::default(), &model, None)
                .unwrap();
        assert!(!found.is_empty());
        for a in &found {
            let text = render_alignment(a);
            let expected: BTreeSet<Vec<(usize, usize)>> = a
                .columns()
                .iter()
                .map(|col| {
                    let mut cells: Vec<(usize, usize)> = col.iter().map(|c| (c.row, c.pos)).collect();
                    cells.sort();
                    cells
                })
                .collect();
            assert_eq!(reparse(&text, a.row_count()), expected, "\n{text}");
            // Connectors only between cells of matched columns.
            for (i, line) in text.lines().enumerate().filter(|(i, _)| i % 2 == 1) {
                assert!(line.chars().all(|ch| ch == ' ' || ch == '|'), "line {i}: {line}");
            }
        }
    }

    #[test]
    fn tokenization_names() {
        assert_eq!(Tokenization::parse("chars"), Some(Tokenization::Chars));
        assert_eq!(Tokenization::parse("tokens"), Some(Tokenization::WhitespaceTokens));
        assert_eq!(Tokenization::parse("words"), None);
    }
}
