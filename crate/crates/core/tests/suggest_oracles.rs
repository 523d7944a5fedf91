mod oracles;

use std::collections::BTreeMap;

use oracles::ToyScorer;
use postedit_core::doc::tokenize;
use postedit_core::qe::gold_corrections;
use postedit_core::subword::{detokenize, subword_segment, CharGroupSegmenter};
use postedit_core::suggest::{fill_masks_beam, make_masked_variants, suggest, OracleScorer, Span, SuggestConfig};
use proptest::prelude::*;

fn vocab(n: usize) -> Vec<String> {
    ["a", "b", "##c", "d", "##e"][..n].iter().map(|s| s.to_string()).collect()
}

#[test]
fn wide_beam_equals_exhaustive_search() {
    let seg = CharGroupSegmenter::default();
    let src = subword_segment(&tokenize("s t"), &seg).unwrap();
    let tgt = subword_segment(&tokenize("x y z"), &seg).unwrap();
    let started = std::time::Instant::now();
    for v in 1..=5 {
        for salt in 0..6 {
            let scorer = ToyScorer { vocab: vocab(v), salt };
            for variant in make_masked_variants(&src, &tgt, Span::replacement(1, 2), 3).unwrap() {
                let masks = variant.mask_count();
                let k = v.pow(masks as u32);
                let beam = fill_masks_beam(&variant, &scorer, k).unwrap();
                let all = oracles::enumerate_fills(&variant, &scorer, &scorer.vocab);
                assert_eq!(beam.len(), all.len());
                for (b, (tokens, lp)) in beam.iter().zip(&all) {
                    assert_eq!(&b.tokens, tokens);
                    assert_eq!(b.log_prob, *lp);
                }
            }
        }
    }
    assert!(started.elapsed().as_secs_f64() < 5.0);
}

#[test]
fn suggest_equals_brute_force_ranking() {
    // m = 2, k = 5, two tokens that collide after detokenization
    let seg = CharGroupSegmenter::default();
    let src = subword_segment(&tokenize("s"), &seg).unwrap();
    let tgt = subword_segment(&tokenize("p a q"), &seg).unwrap();
    for salt in 0..20 {
        let scorer = ToyScorer { vocab: vec!["a".into(), "##a".into()], salt };
        for span in [Span::replacement(1, 2), Span::gap(1)] {
            let got = suggest(&src, &tgt, span, &SuggestConfig::new(2, 5).unwrap(), &scorer).unwrap();

            let mut best: BTreeMap<String, (f64, usize)> = BTreeMap::new();
            for variant in make_masked_variants(&src, &tgt, span, 2).unwrap() {
                for (tokens, lp) in oracles::enumerate_fills(&variant, &scorer, &scorer.vocab) {
                    let text = detokenize(&tokens, "##");
                    if span.kind == postedit_core::suggest::SpanKind::Replacement && text == "a" {
                        continue;
                    }
                    let e = best.entry(text).or_insert((f64::NEG_INFINITY, 0));
                    if lp > e.0 {
                        *e = (lp, tokens.len());
                    }
                }
            }
            let mut want: Vec<(String, f64)> = best.into_iter().map(|(t, (lp, _))| (t, lp)).collect();
            want.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
            want.truncate(5);
            let got: Vec<(String, f64)> = got.into_iter().map(|c| (c.text, c.joint_log_prob)).collect();
            assert_eq!(got, want);
        }
    }
}

#[test]
fn oracle_scorer_reconstructs_reference_spans() {
    let seg = CharGroupSegmenter::default();
    let cases = [
        ("the cat sat", "the dog sat", "the cat sat", 1, 2),
        ("a house", "a big green home", "a home", 1, 2),
        ("guten Morgen", "guten Tag", "guten Morgen", 1, 2),
    ];
    for (source, pe, mt, start, end) in cases {
        let (mt_w, pe_w) = (tokenize(mt), tokenize(pe));
        let gold = gold_corrections(&mt_w, &pe_w).unwrap();
        let mt_map = subword_segment(&mt_w, &seg).unwrap();
        let scorer = OracleScorer::new(&mt_map, &gold, &seg).unwrap();
        let src = subword_segment(&tokenize(source), &seg).unwrap();
        let got = suggest(&src, &mt_map, Span::replacement(start, end), &SuggestConfig::default(), &scorer).unwrap();
        let mut fill: Vec<String> = gold.gap_fills[start].clone();
        fill.extend(gold.word_fills[start].iter().cloned());
        assert_eq!(got[0].text, fill.join(" "), "{mt} → {pe}");
        assert_eq!(got[0].joint_log_prob, 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn top_one_never_worsens_with_wider_beams_up_to_two_masks(salt in any::<u64>(), v in 2usize..=5, masks in 1usize..=2) {
        let seg = CharGroupSegmenter::default();
        let src = subword_segment(&tokenize("s"), &seg).unwrap();
        let tgt = subword_segment(&tokenize("x y"), &seg).unwrap();
        let variant = &make_masked_variants(&src, &tgt, Span::gap(1), masks).unwrap()[masks - 1];
        let scorer = ToyScorer { vocab: vocab(v), salt };
        let mut prev = f64::NEG_INFINITY;
        for k in 1..=6 {
            let top = fill_masks_beam(variant, &scorer, k).unwrap()[0].log_prob;
            prop_assert!(top >= prev);
            prev = top;
        }
    }

    #[test]
    fn suggestions_are_unique_sorted_and_bounded(salt in any::<u64>(), k in 1usize..=6, m in 1usize..=3) {
        let seg = CharGroupSegmenter::default();
        let src = subword_segment(&tokenize("s"), &seg).unwrap();
        let tgt = subword_segment(&tokenize("x yy z"), &seg).unwrap();
        let scorer = ToyScorer { vocab: vocab(4), salt };
        let out = suggest(&src, &tgt, Span::replacement(1, 2), &SuggestConfig::new(m, k).unwrap(), &scorer).unwrap();
        prop_assert!(out.len() <= k);
        prop_assert!(out.windows(2).all(|w| w[0].joint_log_prob >= w[1].joint_log_prob));
        let mut texts: Vec<&str> = out.iter().map(|c| c.text.as_str()).collect();
        texts.sort();
        texts.dedup();
        prop_assert_eq!(texts.len(), out.len());
        prop_assert!(out.iter().all(|c| c.text != "yy" && c.joint_log_prob <= 0.0));
    }
}
