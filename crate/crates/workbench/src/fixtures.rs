//! Bundled English→German data for the stub providers and the harness demo.

use postedit_core::doc::tokenize;
use postedit_core::{Error, Result};

/// `english<TAB>german[<TAB>association]`
pub const LEXICON: &str = include_str!("../fixtures/lexicon.tsv");
/// `english<TAB>german` sentence pairs; trains the n-gram scorer.
pub const CORPUS: &str = include_str!("../fixtures/corpus.tsv");
/// `source<TAB>mt<TAB>post-edit`, MT from the dictionary stub.
pub const TRIPLETS: &str = include_str!("../fixtures/triplets.tsv");
/// 100 triplets whose MT differs from the post-edit by substitutions and
/// missing words only.
pub const ORACLE_TRIPLETS: &str = include_str!("../fixtures/oracle_triplets.tsv");

/// Parses two-column sentence pairs; blank and `#` lines are skipped.
pub fn parse_corpus(text: &str) -> Result<Vec<(Vec<String>, Vec<String>)>> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((src, tgt)) = line.split_once('\t') else {
            return Err(Error::precondition(format!("corpus line {}: expected two columns", n + 1)));
        };
        let (src, tgt) = (tokenize(src), tokenize(tgt));
        if src.is_empty() || tgt.is_empty() {
            return Err(Error::precondition(format!("corpus line {}: empty sentence", n + 1)));
        }
        out.push((src, tgt));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use postedit_core::harness::parse_triplets;

    #[test]
    fn bundled_files_parse() {
        assert_eq!(parse_corpus(CORPUS).unwrap().len(), 40);
        assert_eq!(parse_triplets(TRIPLETS).unwrap().len(), 30);
        assert_eq!(parse_triplets(ORACLE_TRIPLETS).unwrap().len(), 100);
        assert!(postedit_core::lexicon::Lexicon::from_tsv(LEXICON).unwrap().len() > 100);
    }

    #[test]
    fn corpus_errors_name_the_line() {
        let err = parse_corpus("a\tb\n\nno tab here\n").unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");
    }
}
