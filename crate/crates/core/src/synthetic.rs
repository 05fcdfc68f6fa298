//! Planted-signal generators for tests, benchmarks and demos.
//!
//! Sentences are drawn from a neutral filler vocabulary. A sentence planted
//! with a dimension has a few slots, each filled with one of that
//! dimension's anchor keywords with probability `keyword_rate`.

use chrono::{Duration, NaiveDate, TimeZone, Utc};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{Message, Source};
use crate::dimension::Dimension;
use crate::resources::Resources;
use crate::text::Sentence;

const FILLER: &[&str] = &[
    "the", "a", "we", "they", "went", "to", "store", "after", "lunch", "then", "it", "was", "on", "table", "with",
    "some", "people", "from", "town", "about", "weather", "today", "yesterday", "morning", "evening", "train",
    "station", "car", "road", "window", "door", "kitchen", "paper", "report", "meeting", "office", "file", "folder",
    "number", "list", "box", "chair", "river", "bridge", "city", "street", "corner", "bus", "ticket", "walk", "coffee",
    "tea", "water", "bread", "garden", "tree", "rain", "cloud", "sun", "week", "month", "year", "monday", "friday",
    "and", "or", "of", "in", "at", "by", "for", "this", "that", "there", "here", "next", "last", "other", "same",
    "small", "large", "blue", "green", "red", "old", "new", "left", "right", "up", "down", "over", "under", "into",
    "around", "again", "still", "just", "also", "only", "once", "twice", "three", "four", "five", "six", "page",
    "phone", "call", "email", "note", "plan", "schedule", "project", "update", "draft", "copy", "print", "send",
];

#[derive(Debug, Clone, PartialEq)]
pub struct PlantedConfig {
    pub sentences: usize,
    /// Share of sentences planted with some dimension, spread evenly over
    /// the ten dimensions.
    pub positive_fraction: f64,
    pub keyword_rate: f64,
    pub slots: usize,
    pub min_filler: usize,
    pub max_filler: usize,
    pub seed: u64,
}

impl Default for PlantedConfig {
    fn default() -> Self {
        PlantedConfig {
            sentences: 2000,
            positive_fraction: 0.5,
            keyword_rate: 0.8,
            slots: 3,
            min_filler: 5,
            max_filler: 10,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PlantedCorpus {
    pub texts: Vec<String>,
    /// Dimension planted in each sentence, if any.
    pub planted: Vec<Option<Dimension>>,
}

impl PlantedCorpus {
    pub fn labels(&self, d: Dimension) -> Vec<bool> {
        self.planted.iter().map(|p| *p == Some(d)).collect()
    }

    pub fn sentences(&self) -> Vec<Sentence> {
        self.texts.iter().map(|t| Sentence::from_text(t)).collect()
    }
}

fn keywords(resources: &Resources, d: Dimension) -> &[String] {
    resources.anchors.get(&d).map(Vec::as_slice).unwrap_or(&[])
}

/// One sentence; keyword slots are spread among the filler words.
pub fn planted_sentence(rng: &mut impl Rng, dimension: Option<Dimension>, config: &PlantedConfig, resources: &Resources) -> String {
    let n = rng.gen_range(config.min_filler..=config.max_filler);
    let mut words: Vec<&str> = (0..n).map(|_| *FILLER.choose(rng).expect("filler")).collect();
    let slots: Vec<&str> = (0..config.slots)
        .map(|_| match dimension {
            Some(d) if rng.gen_bool(config.keyword_rate) => {
                keywords(resources, d).choose(rng).map_or("thing", String::as_str)
            }
            _ => *FILLER.choose(rng).expect("filler"),
        })
        .collect();
    for w in slots {
        let at = rng.gen_range(0..=words.len());
        words.insert(at, w);
    }
    let mut s = words.join(" ");
    if let Some(first) = s.get_mut(0..1) {
        first.make_ascii_uppercase();
    }
    s.push('.');
    s
}

pub fn planted_corpus(config: &PlantedConfig, resources: &Resources) -> PlantedCorpus {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let positives = (config.sentences as f64 * config.positive_fraction).round() as usize;
    let mut planted: Vec<Option<Dimension>> =
        (0..config.sentences).map(|i| (i < positives).then(|| Dimension::ALL[i % Dimension::ALL.len()])).collect();
    planted.shuffle(&mut rng);
    let texts = planted.iter().map(|&d| planted_sentence(&mut rng, d, config, resources)).collect();
    PlantedCorpus { texts, planted }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StreamConfig {
    pub weeks: usize,
    /// First week's Monday.
    pub start: NaiveDate,
    pub per_week: usize,
    /// Planted messages per week for each listed dimension.
    pub background: Vec<(Dimension, usize)>,
    /// Extra planted messages in one week: (week index, dimension, count).
    pub burst: Option<(usize, Dimension, usize)>,
    pub seed: u64,
}

/// Weekly message stream. Every week reuses the same texts (same seed), so
/// without a burst each dimension's weekly rate is exactly constant.
pub fn message_stream(config: &StreamConfig, resources: &Resources) -> Vec<Message> {
    let planted_cfg = PlantedConfig { keyword_rate: 1.0, ..PlantedConfig::default() };
    let mut out = Vec::new();
    for week in 0..config.weeks {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let mut plan: Vec<Option<Dimension>> = Vec::new();
        for &(d, n) in &config.background {
            plan.extend(std::iter::repeat_n(Some(d), n));
        }
        plan.resize(config.per_week.max(plan.len()), None);
        if let Some((w, d, extra)) = config.burst {
            if w == week {
                plan.extend(std::iter::repeat_n(Some(d), extra));
            }
        }
        let monday = Utc.from_utc_datetime(&config.start.and_hms_opt(9, 0, 0).expect("valid time"));
        for (i, d) in plan.into_iter().enumerate() {
            out.push(Message {
                id: format!("w{week}-m{i}"),
                author: format!("user{}", i % 7),
                recipient: None,
                timestamp: Some(monday + Duration::weeks(week as i64) + Duration::minutes(i as i64 * 37)),
                text: planted_sentence(&mut rng, d, &planted_cfg, resources),
                group: None,
                source: Source::Email,
            });
        }
    }
    out
}

/// Messages exchanged by `u` and `v` in alternating directions. `plan` gives
/// the planted dimension (or none) of each message in order.
pub fn pair_messages(plan: &[Option<Dimension>], seed: u64, resources: &Resources) -> Vec<Message> {
    let cfg = PlantedConfig { keyword_rate: 1.0, ..PlantedConfig::default() };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    plan.iter()
        .enumerate()
        .map(|(i, &d)| {
            let (a, b) = if i % 2 == 0 { ("u", "v") } else { ("v", "u") };
            Message {
                id: format!("pair-{i}"),
                author: a.into(),
                recipient: Some(b.into()),
                timestamp: None,
                text: planted_sentence(&mut rng, d, &cfg, resources),
                group: None,
                source: Source::Dialog,
            }
        })
        .collect()
}
