mod oracles;

use postedit_core::metrics::ter;
use postedit_core::qe::{derive_gold_labels, gold_corrections, QeLabel};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn corrections_reconstruct_the_post_edit() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..500 {
        let mt = oracles::random_sentence(&mut rng, 1, 10, 8);
        let pe = oracles::random_sentence(&mut rng, 1, 10, 8);
        let gold = gold_corrections(&mt, &pe).unwrap();
        assert_eq!(gold.reconstruct(), pe, "mt {mt:?}");

        let labels = derive_gold_labels(&mt, &pe).unwrap();
        assert_eq!(labels.words().len(), mt.len());
        assert_eq!(labels.gaps().len(), mt.len() + 1);
        for (i, l) in labels.word_labels().iter().enumerate() {
            let kept = gold.word_fills[i].len() == 1 && gold.word_fills[i][0] == mt[i];
            assert_eq!(*l == QeLabel::Ok, kept);
        }
        for (g, l) in labels.gap_labels().iter().enumerate() {
            assert_eq!(*l == QeLabel::Bad, !gold.gap_fills[g].is_empty());
        }
    }
}

#[test]
fn ok_words_are_exact_matches_in_the_script() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..200 {
        let mt = oracles::random_sentence(&mut rng, 1, 10, 5);
        let pe = oracles::random_sentence(&mut rng, 1, 10, 5);
        let labels = derive_gold_labels(&mt, &pe).unwrap();
        let bad = labels.word_labels().iter().filter(|l| **l == QeLabel::Bad).count();
        let script = ter(&mt, &pe).unwrap().script;
        // every non-matched MT word is BAD; moved words are BAD even if matched
        assert!(bad >= script.substitutions() + script.deletions());
        assert_eq!(mt == pe, bad == 0 && labels.gap_labels().iter().all(|l| *l == QeLabel::Ok));
    }
}

#[test]
fn moved_words_are_bad_at_their_origin() {
    let mt = ["c", "a", "b"];
    let pe = ["a", "b", "c"];
    let labels = derive_gold_labels(&mt, &pe).unwrap();
    assert_eq!(labels.word_labels(), [QeLabel::Bad, QeLabel::Ok, QeLabel::Ok]);
    assert_eq!(labels.gap_labels(), [QeLabel::Ok, QeLabel::Ok, QeLabel::Ok, QeLabel::Bad]);
}
