mod oracles;

use postedit_core::doc::{parse_tagged_text, serialize_tagged_text, strip_tags, Document, DocumentMeta};
use postedit_core::Error;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn markup_round_trips_on_random_segments() {
    let styles = oracles::style_table(4);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..500 {
        let seg = oracles::random_segment(&mut rng, 8, 4, false);
        let text = serialize_tagged_text(&seg);
        let back = parse_tagged_text(&text, &styles).unwrap_or_else(|e| panic!("{text}: {e}"));
        assert_eq!(back, seg, "{text}");
        assert_eq!(serialize_tagged_text(&back), text);
    }
}

#[test]
fn whitespace_variants_parse_to_the_same_segment() {
    let styles = oracles::style_table(3);
    let a = parse_tagged_text("The <s 1>big</s 1> dog <x 2/> barks", &styles).unwrap();
    let b = parse_tagged_text("  The  <s 1> big </s 1>   dog<x 2/> barks ", &styles).unwrap();
    assert_eq!(a, b);
    assert_eq!(strip_tags(&a), ["The", "big", "dog", "barks"]);
}

#[test]
fn malformed_markup_is_rejected() {
    let styles = oracles::style_table(3);
    for bad in [
        "a <s 1>b",
        "a </s 1> b",
        "<s 1>a <s 2>b</s 1></s 2>",
        "a <s 9>b</s 9>",
        "a <x 1> b",
        "a <y 1/> b",
        "a<x 1/>b",
        "<x 1/>",
        "",
    ] {
        let err = parse_tagged_text(bad, &styles);
        assert!(
            matches!(err, Err(Error::MalformedMarkup { .. } | Error::UnknownStyle(_) | Error::Precondition(_))),
            "{bad:?} gave {err:?}"
        );
    }
    assert!(matches!(parse_tagged_text("a <s 9>b</s 9>", &styles), Err(Error::UnknownStyle(9))));
}

#[test]
fn documents_keep_segment_order() {
    let doc = Document::parse(&["a <s 1>b</s 1>", "c"], oracles::style_table(1), DocumentMeta::default()).unwrap();
    assert_eq!(doc.segments[1].index(), 1);
    assert_eq!(doc.markup(), ["a <s 1>b</s 1>", "c"]);
    let none: [&str; 0] = [];
    assert!(Document::parse(&none, oracles::style_table(1), DocumentMeta::default()).is_err());
}
