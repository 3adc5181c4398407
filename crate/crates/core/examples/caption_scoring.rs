//! CIDEr-D, BLEU-4 and ROUGE-L over a small caption set.
//!
//! ```text
//! cargo run --example caption_scoring
//! ```

use scenetext::metrics::{bleu4, cider, cider_per_item, rouge_l, rouge_l_corpus, CaptionItem};

fn main() {
    let items = vec![
        CaptionItem::new(
            "a red stop sign on main street",
            vec![
                "a red stop sign at the corner of main street".into(),
                "stop sign on main street".into(),
            ],
        )
        .unwrap(),
        CaptionItem::new(
            "a coffee shop with an open sign",
            vec!["a coffee shop front with an open sign".into()],
        )
        .unwrap(),
        CaptionItem::new("a bottle", vec!["a bottle of cola on a wooden table".into()]).unwrap(),
        CaptionItem::new(
            "a city bus on route 42 to downtown",
            vec!["a city bus on route 42 to downtown".into()],
        )
        .unwrap(),
    ];

    let per_item = cider_per_item(&items).unwrap();
    for (it, c) in items.iter().zip(&per_item) {
        println!("{:<36} cider={c:6.3} rougeL={:.3}", it.candidate, rouge_l(it).unwrap());
    }
    println!("corpus: cider={:.4} bleu4={:.4} rougeL={:.4}",
        cider(&items).unwrap(),
        bleu4(&items).unwrap(),
        rouge_l_corpus(&items).unwrap()
    );
}
