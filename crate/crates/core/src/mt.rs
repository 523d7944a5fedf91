//! Machine translation provider contract and the dictionary stub.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::Result;
use crate::lexicon::{capitalize_like, split_punctuation, Lexicon};

pub trait Translator {
    /// Translates one sentence given as words; returns target words.
    fn translate(&self, source: &[String]) -> Result<Vec<String>>;
}

impl<T: Translator + ?Sized> Translator for &T {
    fn translate(&self, source: &[String]) -> Result<Vec<String>> {
        (**self).translate(source)
    }
}

/// Word-by-word translation through the best lexicon entry; unknown words
/// pass through unchanged. Punctuation and initial capitals are carried over.
#[derive(Debug, Clone)]
pub struct DictionaryTranslator {
    lexicon: Lexicon,
}

impl DictionaryTranslator {
    pub fn new(lexicon: Lexicon) -> Self {
        Self { lexicon }
    }

    fn translate_word(&self, word: &str) -> String {
        let (pre, core, post) = split_punctuation(word);
        match self.lexicon.best_translation(core) {
            Some(t) if !core.is_empty() => format!("{pre}{}{post}", capitalize_like(core, t)),
            _ => String::from(word),
        }
    }
}

impl Translator for DictionaryTranslator {
    fn translate(&self, source: &[String]) -> Result<Vec<String>> {
        Ok(source.iter().map(|w| self.translate_word(w)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::doc::tokenize;

    #[test]
    fn translates_known_words_and_passes_unknown() {
        let lex = Lexicon::from_tsv("the\tder\ndog\thund\nbarks\tbellt").unwrap();
        let mt = DictionaryTranslator::new(lex);
        let out = mt.translate(&tokenize("The dog barks loudly.")).unwrap();
        assert_eq!(out, tokenize("Der hund bellt loudly."));
        let out = mt.translate(&tokenize("(dog)")).unwrap();
        assert_eq!(out, tokenize("(hund)"));
    }
}
