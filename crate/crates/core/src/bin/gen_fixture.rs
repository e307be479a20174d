//! Generates the bundled fixture corpus: a fully synthetic two-window
//! document set with planted, testable properties.
//!
//! Window A (16 documents, 1984–1986):
//!   - exactly 60 stems occur more than 10 times: 5 planted top words,
//!     51 mid-frequency cluster words, the diet/drink/soft satellite,
//!     and "regulation", which lives alone in one document and becomes
//!     an isolate;
//!   - "diet" appears only in three periphery documents, apart from the
//!     main cluster.
//!
//! Window B (8 documents, 2004–2006):
//!   - "diet" is the most frequent word and co-occurs with the whole
//!     core, so the A→B comparison must report it moved coreward;
//!   - "aspartame-infused" (a compound of the known stem "aspartame")
//!     and "splenda" occur only here and must be detected as emerging.
//!
//! Counts are planted exactly; the seeded generator only shuffles word
//! order, picks plural surface forms, and sprinkles stopwords and
//! numerals that the pipeline removes. Running the generator twice
//! produces byte-identical files. After writing the corpus it runs the
//! real pipeline as a self-check and refreshes the golden reports.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use framescope::config::RunConfig;
use framescope::diachrony::Verdict;
use framescope::pipeline::{run_compare, run_map};
use framescope::textprep::stem_plural;

const FIXTURE_SEED: u64 = 7;

/// Top words of window A, in planted frequency order.
const A_TOP: &[(&str, u32)] = &[
    ("sweetener", 46),
    ("aspartame", 42),
    ("food", 40),
    ("product", 38),
    ("sugar", 36),
];

/// Mid-frequency cluster words of window A; totals descend from 34 to 11.
const A_MID: &[&str] = &[
    "saccharin",
    "cyclamate",
    "fda",
    "safety",
    "study",
    "approval",
    "cancer",
    "market",
    "consumer",
    "research",
    "health",
    "industry",
    "brand",
    "taste",
    "calorie",
    "test",
    "label",
    "additive",
    "agency",
    "board",
    "petition",
    "rat",
    "tumor",
    "brain",
    "seizure",
    "risk",
    "report",
    "scientist",
    "drug",
    "company",
    "searle",
    "monsanto",
    "soda",
    "beverage",
    "candy",
    "gum",
    "dessert",
    "tabletop",
    "packet",
    "equal",
    "nutrasweet",
    "acid",
    "amino",
    "phenylalanine",
    "warning",
    "review",
    "hearing",
    "evidence",
    "complaint",
    "symptom",
    "headache",
];

/// Below-cutoff words retained in the vocabulary report only.
const A_FILLER: &[&str] = &[
    "editor",
    "column",
    "reader",
    "letter",
    "kitchen",
    "recipe",
    "chef",
    "restaurant",
    "menu",
    "breakfast",
    "magazine",
    "television",
    "radio",
    "interview",
    "journalist",
    "photo",
    "page",
    "section",
];

/// Window B core: full-document-support words, "diet" on top.
const B_CORE: &[(&str, u32)] = &[
    ("diet", 44),
    ("food", 40),
    ("sweetener", 38),
    ("sugar", 34),
    ("product", 32),
    ("health", 30),
    ("aspartame", 26),
    ("market", 18),
    ("obesity", 16),
    ("calorie", 15),
    ("benefit", 14),
    ("drink", 14),
    ("soda", 13),
    ("study", 13),
    ("consumer", 12),
    ("label", 12),
    ("company", 12),
    ("taste", 12),
    ("research", 11),
    ("brand", 11),
    ("cancer", 11),
    ("safety", 11),
    ("review", 11),
    ("packet", 11),
    ("beverage", 11),
    ("acid", 11),
];

/// The emerging-metaphor cluster, only in the last four B documents.
const B_JOVI: &[(&str, [u32; 4])] = &[
    ("aspartame-infused", [3, 3, 3, 3]),
    ("ballad", [4, 3, 3, 2]),
    ("music", [4, 3, 3, 3]),
    ("song", [3, 3, 3, 2]),
];

/// The sucralose cluster, only in the first four B documents.
const B_SPLENDA: &[(&str, [u32; 4])] = &[
    ("splenda", [5, 5, 5, 5]),
    ("sucralose", [6, 6, 6, 6]),
    ("mcneil", [3, 3, 3, 3]),
    ("tate", [3, 3, 3, 2]),
    ("lyle", [3, 3, 3, 2]),
];

const B_FILLER: &[&str] = &[
    "advertisement",
    "campaign",
    "shopper",
    "aisle",
    "supermarket",
    "coupon",
    "checkout",
];

const STOPWORD_POOL: &[&str] = &[
    "the", "of", "and", "to", "in", "for", "that", "is", "was", "with", "by", "from", "this",
    "which", "an", "a", "has", "have", "their", "some",
];

fn fnv1a(s: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in s.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

fn stem_rng(stem: &str) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(FIXTURE_SEED ^ fnv1a(stem))
}

/// Splits `total` across `n_docs` documents: an even base everywhere,
/// remainder scattered by the stem's own generator. Small totals end up
/// in a scattered subset of documents.
fn spread(stem: &str, total: u32, n_docs: usize) -> Vec<u32> {
    let mut rng = stem_rng(stem);
    let base = total / n_docs as u32;
    let mut counts = vec![base; n_docs];
    let rem = total - base * n_docs as u32;
    for _ in 0..rem {
        let idx = rng.gen_range(0..n_docs);
        counts[idx] += 1;
    }
    counts
}

fn pluralizable(stem: &str) -> bool {
    stem.len() >= 4 && !stem.contains('-') && stem_plural(&format!("{stem}s")) == stem
}

/// Turns a per-document stem→count table into display text: shuffled
/// word order, occasional plural surfaces, stopwords and numerals mixed
/// in, sentence casing and punctuation. None of it changes the counts
/// the pipeline will see.
fn render_doc(doc_id: &str, counts: &BTreeMap<&str, u32>) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(FIXTURE_SEED ^ fnv1a(doc_id));
    let mut tokens: Vec<String> = Vec::new();
    for (stem, &c) in counts {
        let plural_ok = pluralizable(stem);
        for _ in 0..c {
            if plural_ok && rng.gen_ratio(1, 4) {
                tokens.push(format!("{stem}s"));
            } else {
                tokens.push((*stem).to_string());
            }
        }
    }
    tokens.shuffle(&mut rng);

    let mut with_noise: Vec<String> = Vec::new();
    for (i, t) in tokens.into_iter().enumerate() {
        if i > 0 && rng.gen_ratio(1, 4) {
            with_noise.push(STOPWORD_POOL[rng.gen_range(0..STOPWORD_POOL.len())].to_string());
        }
        if i > 0 && rng.gen_ratio(1, 40) {
            with_noise.push(["1985", "2", "100"][rng.gen_range(0..3)].to_string());
        }
        with_noise.push(t);
    }

    let mut out = String::new();
    let mut sentence_len = 0usize;
    let mut sentence_cap = rng.gen_range(7..=13);
    for (i, word) in with_noise.iter().enumerate() {
        if sentence_len == 0 {
            let mut chars = word.chars();
            if let Some(first) = chars.next() {
                out.push_str(&first.to_uppercase().to_string());
                out.push_str(chars.as_str());
            }
        } else {
            out.push(' ');
            out.push_str(word);
        }
        sentence_len += 1;
        let last = i + 1 == with_noise.len();
        if sentence_len >= sentence_cap || last {
            out.push('.');
            if !last {
                out.push(' ');
            }
            sentence_len = 0;
            sentence_cap = rng.gen_range(7..=13);
        } else if rng.gen_ratio(1, 12) {
            out.push(',');
        }
    }
    out.push('\n');
    out
}

struct DocPlan {
    file_stem: String,
    counts: BTreeMap<&'static str, u32>,
}

fn plan_window_a() -> Vec<DocPlan> {
    let mut docs: Vec<DocPlan> = (0..16)
        .map(|i| {
            let year = 1984 + i / 6;
            let month = 1 + (i * 5) % 12;
            let day = 1 + (i * 7) % 27;
            DocPlan {
                file_stem: format!("{year}-{month:02}-{day:02}_a{:02}", i + 1),
                counts: BTreeMap::new(),
            }
        })
        .collect();

    // cluster words live in documents a01..a12
    for (stem, total) in A_TOP {
        for (d, c) in spread(stem, *total, 12).into_iter().enumerate() {
            if c > 0 {
                docs[d].counts.insert(stem, c);
            }
        }
    }
    for (idx, stem) in A_MID.iter().enumerate() {
        let total = 34 - (idx as u32 * 23) / 50;
        for (d, c) in spread(stem, total, 12).into_iter().enumerate() {
            if c > 0 {
                docs[d].counts.insert(stem, c);
            }
        }
    }
    // the diet satellite: documents a13..a15 only
    for (stem, per_doc) in [
        ("diet", [6u32, 5, 5]),
        ("drink", [5, 5, 4]),
        ("soft", [4, 4, 5]),
    ] {
        for (k, c) in per_doc.into_iter().enumerate() {
            docs[12 + k].counts.insert(stem, c);
        }
    }
    // the isolate: alone in a16
    docs[15].counts.insert("regulation", 12);
    // below-cutoff fillers anywhere
    for (idx, stem) in A_FILLER.iter().enumerate() {
        let total = 2 + (idx as u32 * 7) % 9;
        for (d, c) in spread(stem, total, 16).into_iter().enumerate() {
            if c > 0 {
                *docs[d].counts.entry(stem).or_insert(0) += c;
            }
        }
    }
    docs
}

fn plan_window_b() -> Vec<DocPlan> {
    let mut docs: Vec<DocPlan> = (0..8)
        .map(|i| {
            let year = 2004 + i / 3;
            let month = 1 + (i * 5) % 12;
            let day = 1 + (i * 9) % 27;
            DocPlan {
                file_stem: format!("{year}-{month:02}-{day:02}_b{:02}", i + 1),
                counts: BTreeMap::new(),
            }
        })
        .collect();

    for (stem, total) in B_CORE {
        for (d, c) in spread(stem, *total, 8).into_iter().enumerate() {
            if c > 0 {
                docs[d].counts.insert(stem, c);
            }
        }
    }
    for (stem, per_doc) in B_JOVI {
        for (k, c) in per_doc.iter().enumerate() {
            docs[4 + k].counts.insert(stem, *c);
        }
    }
    for (stem, per_doc) in B_SPLENDA {
        for (k, c) in per_doc.iter().enumerate() {
            docs[k].counts.insert(stem, *c);
        }
    }
    for (idx, stem) in B_FILLER.iter().enumerate() {
        let total = 2 + (idx as u32 * 5) % 8;
        for (d, c) in spread(stem, total, 8).into_iter().enumerate() {
            if c > 0 {
                *docs[d].counts.entry(stem).or_insert(0) += c;
            }
        }
    }
    docs
}

const CONFIG_JSON: &str = r#"{
  "input_dir": "fixtures/corpus",
  "min_occurrences": 10,
  "vocab_cap": 100,
  "seed": 42,
  "windows": [
    { "label": "A", "start": "1984-01-01", "end": "1986-12-31" },
    { "label": "B", "start": "2004-01-01", "end": "2006-12-31" }
  ]
}
"#;

fn self_check(fixtures: &Path) -> (String, String) {
    let mut config = RunConfig::from_json(CONFIG_JSON).expect("fixture config parses");
    config.input_dir = fixtures.join("corpus");

    let scratch = std::env::temp_dir().join(format!("framescope-fixture-{}", std::process::id()));
    let a = run_map(&config, "A", &scratch).expect("window A maps");
    let b = run_map(&config, "B", &scratch).expect("window B maps");

    assert_eq!(a.report.document_count, 16, "window A document count");
    assert_eq!(a.report.vocabulary_size, 60, "window A included stems");
    assert!(a.report.isolates_removed >= 1, "window A isolate planted");
    assert_eq!(b.report.document_count, 8, "window B document count");

    let compare = run_compare(&a.snapshot_path, &b.snapshot_path, &["diet".to_string()])
        .expect("snapshots comparable");
    let diet = compare
        .diff
        .trajectories
        .iter()
        .find(|t| t.stem == "diet")
        .expect("diet tracked");
    assert_eq!(
        diet.verdict,
        Verdict::MovedCoreward,
        "diet drift A→B\n{}",
        compare.table
    );
    let infused = compare
        .diff
        .emerging
        .iter()
        .find(|e| e.stem == "aspartame-infused")
        .expect("aspartame-infused emerges");
    assert!(infused.is_compound, "aspartame-infused is a compound");
    let splenda = compare
        .diff
        .emerging
        .iter()
        .find(|e| e.stem == "splenda")
        .expect("splenda emerges");
    assert!(!splenda.is_compound, "splenda is a simple word");

    let same = run_compare(&a.snapshot_path, &a.snapshot_path, &["diet".to_string()])
        .expect("self-comparison");
    assert!(same
        .diff
        .trajectories
        .iter()
        .all(|t| t.verdict == Verdict::Stable));
    assert!(same.diff.emerging.is_empty());

    println!("self-check passed:");
    print!("{}", a.report.to_text());
    println!("diet verdict A->B: {}", diet.verdict);

    let report_a = std::fs::read_to_string(a.out_dir.join("report.txt")).unwrap();
    let report_b = std::fs::read_to_string(b.out_dir.join("report.txt")).unwrap();
    let _ = std::fs::remove_dir_all(&scratch);
    (report_a, report_b)
}

fn main() {
    let fixtures = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("fixtures"));
    let corpus = fixtures.join("corpus");
    let golden = fixtures.join("golden");
    std::fs::create_dir_all(&corpus).expect("create corpus dir");
    std::fs::create_dir_all(&golden).expect("create golden dir");

    let mut files = 0usize;
    for plan in plan_window_a().iter().chain(plan_window_b().iter()) {
        let text = render_doc(&plan.file_stem, &plan.counts);
        std::fs::write(corpus.join(format!("{}.txt", plan.file_stem)), text)
            .expect("write document");
        files += 1;
    }
    std::fs::write(fixtures.join("config.json"), CONFIG_JSON).expect("write config");
    println!("wrote {files} documents to {}", corpus.display());

    let (report_a, report_b) = self_check(&fixtures);
    std::fs::write(golden.join("window_a_report.txt"), report_a).expect("write golden A");
    std::fs::write(golden.join("window_b_report.txt"), report_b).expect("write golden B");
    println!("golden reports refreshed in {}", golden.display());
}
