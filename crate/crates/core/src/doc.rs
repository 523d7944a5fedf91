//! Documents as ordered segments of words interleaved with formatting tags.
//!
//! The concrete markup is a small inline syntax: `<s ID>` … `</s ID>` for a
//! paired style spanning words, and `<x ID/>` for a standalone inline element
//! such as an equation or an image. Words are whitespace-separated tokens with
//! punctuation left attached. Tags sit on word boundaries: a tag glued to word
//! characters on both sides is rejected.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StyleId(pub u32);

impl fmt::Display for StyleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TagKind {
    Open,
    Close,
    Unpaired,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FormattingTag {
    pub kind: TagKind,
    pub style: StyleId,
}

impl FormattingTag {
    pub fn open(style: u32) -> Self {
        Self { kind: TagKind::Open, style: StyleId(style) }
    }

    pub fn close(style: u32) -> Self {
        Self { kind: TagKind::Close, style: StyleId(style) }
    }

    pub fn unpaired(style: u32) -> Self {
        Self { kind: TagKind::Unpaired, style: StyleId(style) }
    }
}

impl fmt::Display for FormattingTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            TagKind::Open => write!(f, "<s {}>", self.style),
            TagKind::Close => write!(f, "</s {}>", self.style),
            TagKind::Unpaired => write!(f, "<x {}/>", self.style),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Item {
    Word(String),
    Tag(FormattingTag),
}

impl Item {
    pub fn word(w: impl Into<String>) -> Self {
        Item::Word(w.into())
    }
}

/// Style id → opaque descriptor ("bold", "footnote", ...).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StyleTable(BTreeMap<StyleId, String>);

impl StyleTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, id: StyleId, descriptor: impl Into<String>) {
        self.0.insert(id, descriptor.into());
    }

    pub fn contains(&self, id: StyleId) -> bool {
        self.0.contains_key(&id)
    }

    pub fn descriptor(&self, id: StyleId) -> Option<&str> {
        self.0.get(&id).map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (StyleId, &str)> {
        self.0.iter().map(|(k, v)| (*k, v.as_str()))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl FromIterator<(u32, String)> for StyleTable {
    fn from_iter<I: IntoIterator<Item = (u32, String)>>(iter: I) -> Self {
        StyleTable(iter.into_iter().map(|(k, v)| (StyleId(k), v)).collect())
    }
}

/// A standalone tag with the context needed to re-anchor it in a translation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnpairedAnchor {
    pub style: StyleId,
    /// The word immediately before the tag, if any.
    pub preceding_word: Option<usize>,
    /// Paired styles enclosing the tag, outermost first.
    pub enclosing: Vec<StyleId>,
}

/// One sentence: words interleaved with formatting tags.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TaggedSegment {
    items: Vec<Item>,
    index: usize,
}

impl TaggedSegment {
    /// Builds a segment after checking that paired tags nest properly.
    pub fn from_items(items: Vec<Item>) -> Result<Self> {
        check_nesting(&items)?;
        for item in &items {
            if let Item::Word(w) = item {
                if w.is_empty() || w.chars().any(|c| c.is_whitespace() || c == '<') {
                    return Err(Error::precondition(format!("invalid word token {w:?}")));
                }
            }
        }
        Ok(Self { items, index: 0 })
    }

    /// A tag-free segment from plain words.
    pub fn from_words<S: AsRef<str>>(words: &[S]) -> Result<Self> {
        Self::from_items(words.iter().map(|w| Item::word(w.as_ref())).collect())
    }

    pub fn with_index(mut self, index: usize) -> Self {
        self.index = index;
        self
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn items(&self) -> &[Item] {
        &self.items
    }

    pub fn into_items(self) -> Vec<Item> {
        self.items
    }

    pub fn word_count(&self) -> usize {
        self.items.iter().filter(|i| matches!(i, Item::Word(_))).count()
    }

    pub fn tags(&self) -> impl Iterator<Item = &FormattingTag> {
        self.items.iter().filter_map(|i| match i {
            Item::Tag(t) => Some(t),
            Item::Word(_) => None,
        })
    }

    /// Every tag with the word position it binds to: the index of the word
    /// that follows it, or the word count for tags after the last word.
    pub fn tag_positions(&self) -> Vec<(usize, FormattingTag)> {
        let mut out = Vec::new();
        let mut words_seen = 0;
        for item in &self.items {
            match item {
                Item::Word(_) => words_seen += 1,
                Item::Tag(t) => out.push((words_seen, *t)),
            }
        }
        out
    }

    /// For each word, the paired styles enclosing it, outermost first.
    pub fn word_style_stacks(&self) -> Vec<Vec<StyleId>> {
        let mut stack: Vec<StyleId> = Vec::new();
        let mut out = Vec::new();
        for item in &self.items {
            match item {
                Item::Word(_) => out.push(stack.clone()),
                Item::Tag(t) => match t.kind {
                    TagKind::Open => stack.push(t.style),
                    TagKind::Close => {
                        if let Some(pos) = stack.iter().rposition(|s| *s == t.style) {
                            stack.remove(pos);
                        }
                    }
                    TagKind::Unpaired => {}
                },
            }
        }
        out
    }

    /// Unpaired tags in document order with their preceding word and the
    /// paired styles around them.
    pub fn unpaired_anchors(&self) -> Vec<UnpairedAnchor> {
        let mut stack: Vec<StyleId> = Vec::new();
        let mut words_seen = 0usize;
        let mut out = Vec::new();
        for item in &self.items {
            match item {
                Item::Word(_) => words_seen += 1,
                Item::Tag(t) => match t.kind {
                    TagKind::Open => stack.push(t.style),
                    TagKind::Close => {
                        if let Some(pos) = stack.iter().rposition(|s| *s == t.style) {
                            stack.remove(pos);
                        }
                    }
                    TagKind::Unpaired => out.push(UnpairedAnchor {
                        style: t.style,
                        preceding_word: words_seen.checked_sub(1),
                        enclosing: stack.clone(),
                    }),
                },
            }
        }
        out
    }

    pub fn words(&self) -> Vec<String> {
        strip_tags(self)
    }

    /// Replaces words `start..end` with `words`, keeping every tag. With
    /// `start == end` the words are inserted right after word `start - 1`
    /// (at the very front for 0), so they join that word's styles. A
    /// replacement may not straddle a tag, and the segment may not lose its
    /// last word.
    pub fn replace_words<S: AsRef<str>>(&self, start: usize, end: usize, words: &[S]) -> Result<TaggedSegment> {
        let positions: Vec<usize> = self
            .items
            .iter()
            .enumerate()
            .filter(|(_, it)| matches!(it, Item::Word(_)))
            .map(|(i, _)| i)
            .collect();
        if start > end || end > positions.len() {
            return Err(Error::precondition(format!(
                "word range {start}..{end} is invalid for {} words",
                positions.len()
            )));
        }
        let fresh = words.iter().map(|w| Item::word(w.as_ref()));
        let mut items = self.items.clone();
        if start == end {
            if words.is_empty() {
                return Err(Error::precondition("nothing to insert"));
            }
            let at = if start == 0 { 0 } else { positions[start - 1] + 1 };
            items.splice(at..at, fresh);
        } else {
            let (first, last) = (positions[start], positions[end - 1]);
            if items[first..=last].iter().any(|it| matches!(it, Item::Tag(_))) {
                return Err(Error::precondition("edit crosses a formatting tag"));
            }
            if words.is_empty() && end - start == positions.len() {
                return Err(Error::precondition("a segment needs at least one word"));
            }
            items.splice(first..=last, fresh);
        }
        Ok(TaggedSegment::from_items(items)?.with_index(self.index))
    }
}

impl fmt::Display for TaggedSegment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&serialize_tagged_text(self))
    }
}

fn check_nesting(items: &[Item]) -> Result<()> {
    let mut stack: Vec<StyleId> = Vec::new();
    for item in items {
        if let Item::Tag(t) = item {
            match t.kind {
                TagKind::Open => stack.push(t.style),
                TagKind::Close => match stack.pop() {
                    Some(open) if open == t.style => {}
                    Some(open) => {
                        return Err(Error::MalformedMarkup {
                            offset: 0,
                            reason: format!("closing style {} while style {open} is open", t.style),
                        })
                    }
                    None => {
                        return Err(Error::MalformedMarkup {
                            offset: 0,
                            reason: format!("closing style {} that was never opened", t.style),
                        })
                    }
                },
                TagKind::Unpaired => {}
            }
        }
    }
    if let Some(open) = stack.last() {
        return Err(Error::MalformedMarkup {
            offset: 0,
            reason: format!("style {open} is never closed"),
        });
    }
    Ok(())
}

/// Parses tag markup into a segment. Every style id must exist in `styles`
/// and the segment must contain at least one word.
pub fn parse_tagged_text(text: &str, styles: &StyleTable) -> Result<TaggedSegment> {
    let bytes = text.as_bytes();
    let mut items = Vec::new();
    let mut stack: Vec<StyleId> = Vec::new();
    let mut word_start: Option<usize> = None;
    // A tag directly followed a word with no whitespace in between.
    let mut glued_after_word = false;
    let mut i = 0;
    while i < bytes.len() {
        let c = text[i..].chars().next().unwrap_or('\0');
        if c.is_whitespace() {
            if let Some(start) = word_start.take() {
                items.push(Item::Word(text[start..i].to_string()));
            }
            glued_after_word = false;
            i += c.len_utf8();
        } else if c == '<' {
            if let Some(start) = word_start.take() {
                items.push(Item::Word(text[start..i].to_string()));
                glued_after_word = true;
            }
            let (tag, len) = parse_tag(&text[i..]).ok_or_else(|| Error::MalformedMarkup {
                offset: i,
                reason: "invalid tag syntax".to_string(),
            })?;
            if !styles.contains(tag.style) {
                return Err(Error::UnknownStyle(tag.style.0));
            }
            match tag.kind {
                TagKind::Open => stack.push(tag.style),
                TagKind::Close => match stack.pop() {
                    Some(open) if open == tag.style => {}
                    Some(open) => {
                        return Err(Error::MalformedMarkup {
                            offset: i,
                            reason: format!("closing style {} crosses open style {open}", tag.style),
                        })
                    }
                    None => {
                        return Err(Error::MalformedMarkup {
                            offset: i,
                            reason: format!("closing style {} that was never opened", tag.style),
                        })
                    }
                },
                TagKind::Unpaired => {}
            }
            items.push(Item::Tag(tag));
            i += len;
        } else {
            if word_start.is_none() {
                if glued_after_word {
                    return Err(Error::MalformedMarkup {
                        offset: i,
                        reason: "tag inside a word".to_string(),
                    });
                }
                word_start = Some(i);
            }
            i += c.len_utf8();
        }
    }
    if let Some(start) = word_start {
        items.push(Item::Word(text[start..].to_string()));
    }
    if let Some(open) = stack.last() {
        return Err(Error::MalformedMarkup {
            offset: text.len(),
            reason: format!("style {open} is never closed"),
        });
    }
    if !items.iter().any(|i| matches!(i, Item::Word(_))) {
        return Err(Error::MalformedMarkup {
            offset: 0,
            reason: "segment has no words".to_string(),
        });
    }
    Ok(TaggedSegment { items, index: 0 })
}

/// Recognises `<s N>`, `</s N>` and `<x N/>` at the start of `s`.
fn parse_tag(s: &str) -> Option<(FormattingTag, usize)> {
    let b = s.as_bytes();
    let mut i = 1;
    let closing = b.get(i) == Some(&b'/');
    if closing {
        i += 1;
    }
    let letter = *b.get(i)?;
    i += 1;
    let kind = match (letter, closing) {
        (b's', false) => TagKind::Open,
        (b's', true) => TagKind::Close,
        (b'x', false) => TagKind::Unpaired,
        _ => return None,
    };
    let spaces = b[i..].iter().take_while(|c| **c == b' ').count();
    if spaces == 0 {
        return None;
    }
    i += spaces;
    let digits = b[i..].iter().take_while(|c| c.is_ascii_digit()).count();
    if digits == 0 {
        return None;
    }
    let id: u32 = s[i..i + digits].parse().ok()?;
    i += digits;
    i += b[i..].iter().take_while(|c| **c == b' ').count();
    if kind == TagKind::Unpaired {
        if b.get(i) != Some(&b'/') {
            return None;
        }
        i += 1;
    }
    if b.get(i) != Some(&b'>') {
        return None;
    }
    Some((FormattingTag { kind, style: StyleId(id) }, i + 1))
}

/// Renders a segment as markup. Open tags hug the following item and close
/// tags hug the preceding one; everything else is separated by one space.
pub fn serialize_tagged_text(segment: &TaggedSegment) -> String {
    let mut out = String::new();
    let mut prev: Option<&Item> = None;
    for item in &segment.items {
        if let Some(p) = prev {
            let prev_open = matches!(p, Item::Tag(t) if t.kind == TagKind::Open);
            let cur_close = matches!(item, Item::Tag(t) if t.kind == TagKind::Close);
            if !prev_open && !cur_close {
                out.push(' ');
            }
        }
        match item {
            Item::Word(w) => out.push_str(w),
            Item::Tag(t) => out.push_str(&t.to_string()),
        }
        prev = Some(item);
    }
    out
}

/// The words of a segment in order, tags removed.
pub fn strip_tags(segment: &TaggedSegment) -> Vec<String> {
    segment
        .items
        .iter()
        .filter_map(|i| match i {
            Item::Word(w) => Some(w.clone()),
            Item::Tag(_) => None,
        })
        .collect()
}

/// Splits plain text into words on whitespace.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split_whitespace().map(ToString::to_string).collect()
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DocumentMeta {
    pub title: String,
    pub source_lang: String,
    pub target_lang: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub segments: Vec<TaggedSegment>,
    pub styles: StyleTable,
    pub meta: DocumentMeta,
}

impl Document {
    /// Parses every markup string against the style table; segment indices
    /// follow input order.
    pub fn parse<S: AsRef<str>>(markup: &[S], styles: StyleTable, meta: DocumentMeta) -> Result<Self> {
        if markup.is_empty() {
            return Err(Error::precondition("document has no segments"));
        }
        let segments = markup
            .iter()
            .enumerate()
            .map(|(n, text)| parse_tagged_text(text.as_ref(), &styles).map(|s| s.with_index(n)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { segments, styles, meta })
    }

    pub fn markup(&self) -> Vec<String> {
        self.segments.iter().map(serialize_tagged_text).collect()
    }
}
