use proptest::prelude::*;

use scenetext::corpus::{parse_record, BBox, OcrToken, Record};
use scenetext::metrics::{anls, bleu4, cider, levenshtein, normalize_answer, rouge_l_corpus, CaptionItem};
use scenetext::objective::{build_splitcap_at, build_splitocr_at, ObjectiveConfig};
use scenetext::order::order_tokens;

fn token() -> impl Strategy<Value = OcrToken> {
    ("[A-Za-z0-9]{1,6}", 0.0..500.0f64, 0.0..300.0f64, 1.0..60.0f64, 1.0..30.0f64, 0.0..=1.0f64).prop_map(
        |(text, x, y, w, h, conf)| {
            let mut t = OcrToken::new(text, BBox::new(x, y, w, h).unwrap());
            t.confidence = conf;
            t
        },
    )
}

fn record() -> impl Strategy<Value = Record> {
    (
        "[a-z0-9_]{1,12}",
        prop::collection::vec(token(), 0..12),
        prop::option::of("[a-z ]{0,40}[a-z]"),
    )
        .prop_map(|(id, ocr, caption)| {
            let mut r = Record::new(id);
            r.ocr = ocr;
            r.caption = caption;
            r
        })
}

fn caption_items(max: usize) -> impl Strategy<Value = Vec<CaptionItem>> {
    prop::collection::vec(
        ("[a-d ]{0,20}", prop::collection::vec("[a-d]{1,3}( [a-d]{1,3}){0,6}", 1..4)),
        2..max,
    )
    .prop_map(|v| {
        v.into_iter()
            .map(|(c, refs)| CaptionItem::new(c, refs).unwrap())
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn record_json_round_trips(r in record()) {
        prop_assert_eq!(parse_record(&r.to_json_line()).unwrap(), r);
    }

    #[test]
    fn ordering_is_a_permutation(tokens in prop::collection::vec(token(), 0..25), threshold in 0.05..=1.0f64) {
        let ordered = order_tokens(&tokens, threshold);
        let key = |t: &OcrToken| format!("{:?}", t);
        let mut a: Vec<String> = tokens.iter().map(key).collect();
        let mut b: Vec<String> = ordered.tokens.iter().map(key).collect();
        a.sort();
        b.sort();
        prop_assert_eq!(a, b);
        let mut rev = tokens.clone();
        rev.reverse();
        prop_assert_eq!(order_tokens(&rev, threshold), ordered);
    }

    #[test]
    fn splitocr_identity_for_every_k(r in record()) {
        let cfg = ObjectiveConfig::default();
        let full = order_tokens(&r.ocr, cfg.overlap_threshold).texts();
        for k in 0..full.len() {
            let ex = build_splitocr_at(&r, k, &cfg).unwrap();
            prop_assert_eq!(&ex.input_ocr[..], &full[..k]);
            prop_assert!(!ex.target.is_empty());
            let mut rebuilt = ex.input_ocr.clone();
            rebuilt.push(ex.target.clone());
            prop_assert_eq!(rebuilt.join(" "), full.join(" "));
        }
    }

    #[test]
    fn splitcap_identity_for_every_k(r in record()) {
        let cfg = ObjectiveConfig::default();
        let Some(caption) = r.caption.as_deref() else { return Ok(()) };
        let words: Vec<&str> = caption.split_whitespace().collect();
        for k in 0..words.len() {
            let ex = build_splitcap_at(&r, k, &cfg).unwrap();
            prop_assert_eq!(&ex.input_caption_prefix, &words[..k].join(" "));
            prop_assert_eq!(&ex.target, &words[k..].join(" "));
        }
    }

    #[test]
    fn levenshtein_is_a_metric(a in "[ab日]{0,12}", b in "[ab日]{0,12}", c in "[ab日]{0,12}") {
        prop_assert_eq!(levenshtein(&a, &b), levenshtein(&b, &a));
        prop_assert_eq!(levenshtein(&a, &a), 0);
        prop_assert_eq!(levenshtein(&a, &b) == 0, a == b);
        prop_assert!(levenshtein(&a, &c) <= levenshtein(&a, &b) + levenshtein(&b, &c));
        prop_assert!(levenshtein(&a, &b) <= a.chars().count().max(b.chars().count()));
    }

    #[test]
    fn anls_is_bounded(p in "[a-cA-C ]{0,10}", golds in prop::collection::vec("[a-c ]{0,10}", 1..4), tau in 0.0..=1.0f64) {
        let s = anls(&p, &golds, tau).unwrap();
        prop_assert!((0.0..=1.0).contains(&s));
        prop_assert!(s == 0.0 || s >= tau);
        prop_assert_eq!(anls(&golds[0], &golds, tau).unwrap(), 1.0);
    }

    #[test]
    fn answer_normalization_is_idempotent(s in "[a-zA-Z .,!?'\"]{0,30}") {
        let once = normalize_answer(&s);
        prop_assert_eq!(normalize_answer(&once), once.clone());
        prop_assert_eq!(normalize_answer(&format!("  {s}  ")), once);
    }

    #[test]
    fn corpus_metrics_ignore_item_order(items in caption_items(8)) {
        let mut rev = items.clone();
        rev.reverse();
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-9 * a.abs().max(1.0);
        prop_assert!(close(cider(&items).unwrap(), cider(&rev).unwrap()));
        prop_assert!(close(bleu4(&items).unwrap(), bleu4(&rev).unwrap()));
        prop_assert!(close(rouge_l_corpus(&items).unwrap(), rouge_l_corpus(&rev).unwrap()));
    }

    #[test]
    fn caption_metrics_ignore_case_and_spacing(items in caption_items(6)) {
        let shouted: Vec<CaptionItem> = items
            .iter()
            .map(|it| CaptionItem::new(format!(" {}  ", it.candidate.to_uppercase()), it.references.clone()).unwrap())
            .collect();
        prop_assert_eq!(cider(&items).unwrap(), cider(&shouted).unwrap());
        prop_assert_eq!(bleu4(&items).unwrap(), bleu4(&shouted).unwrap());
        prop_assert_eq!(rouge_l_corpus(&items).unwrap(), rouge_l_corpus(&shouted).unwrap());
    }
}
