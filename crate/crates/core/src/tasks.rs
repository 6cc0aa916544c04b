//! Balanced binary classification tasks, one per wheel group.
//!
//! Positives are every item carrying the group; negatives are an equal-size
//! sample without replacement from items that do not carry it. The combined
//! pool is shuffled and cut into train/valid/test as
//! `train = ⌊0.8n⌋`, `valid = ⌊(n − train)/2⌋`, `test = rest`.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rand::seq::{index, SliceRandom};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytics::groups_of;
use crate::corpus::TweetRecord;
use crate::error::{Error, Result};
use crate::seed::{derive_rng, DERIVATION_RULE};
use crate::wheel::{parse_emotion, Emotion8, Label};

pub const PARTITIONS: [&str; 3] = ["train", "valid", "test"];

/// Published per-group split sizes (train, valid, test).
pub const PUBLISHED_SPLITS: [(Emotion8, usize, usize, usize); 8] = [
    (Emotion8::Aggressiveness, 4209, 526, 527),
    (Emotion8::Optimism, 11902, 1488, 1488),
    (Emotion8::Love, 2569, 321, 322),
    (Emotion8::Submission, 6092, 762, 762),
    (Emotion8::Awe, 7324, 916, 916),
    (Emotion8::Disapproval, 5931, 741, 742),
    (Emotion8::Remorse, 7732, 967, 967),
    (Emotion8::Contempt, 3763, 470, 471),
];

pub fn published_split(g: Emotion8) -> (usize, usize, usize) {
    let (_, tr, va, te) = PUBLISHED_SPLITS.iter().find(|row| row.0 == g).unwrap();
    (*tr, *va, *te)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TaskExample {
    pub id: String,
    pub text: String,
    pub label: u8,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NegativePolicy {
    /// As many negatives as positives.
    #[default]
    Balanced,
    /// Every non-positive item becomes a negative.
    KeepAll,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaskSplit {
    pub emotion: String,
    pub seed: u64,
    pub policy: NegativePolicy,
    pub train: Vec<TaskExample>,
    pub valid: Vec<TaskExample>,
    pub test: Vec<TaskExample>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SplitCounts {
    pub train: usize,
    pub valid: usize,
    pub test: usize,
    pub positives: usize,
    pub negatives: usize,
}

/// Partition sizes for a pool of `n` examples.
pub fn split_sizes(n: usize) -> (usize, usize, usize) {
    let train = n * 8 / 10;
    let rest = n - train;
    let valid = rest / 2;
    (train, valid, rest - valid)
}

impl TaskSplit {
    pub fn partitions(&self) -> [(&'static str, &[TaskExample]); 3] {
        [
            ("train", &self.train),
            ("valid", &self.valid),
            ("test", &self.test),
        ]
    }

    pub fn all(&self) -> impl Iterator<Item = &TaskExample> {
        self.train.iter().chain(&self.valid).chain(&self.test)
    }

    pub fn counts(&self) -> SplitCounts {
        let positives = self.all().filter(|e| e.label == 1).count();
        SplitCounts {
            train: self.train.len(),
            valid: self.valid.len(),
            test: self.test.len(),
            positives,
            negatives: self.all().count() - positives,
        }
    }

    pub fn manifest(&self) -> serde_json::Value {
        serde_json::json!({
            "emotion": self.emotion,
            "seed": self.seed,
            "counts": self.counts(),
            "negative_policy": self.policy,
            "generator": DERIVATION_RULE,
            "generator_label": self.emotion,
            "split_rule": "train = floor(0.8 n); valid = floor((n - train) / 2); test = n - train - valid",
            "version": crate::VERSION,
        })
    }

    /// Writes `<emotion>.<partition>.jsonl` and `<emotion>.manifest.json`.
    pub fn write_dir(&self, dir: &Path) -> Result<()> {
        for (name, examples) in self.partitions() {
            let path = dir.join(format!("{}.{name}.jsonl", self.emotion));
            let mut w = BufWriter::new(File::create(path)?);
            write_partition(examples, &mut w)?;
            w.flush()?;
        }
        let path = dir.join(format!("{}.manifest.json", self.emotion));
        let mut w = BufWriter::new(File::create(path)?);
        serde_json::to_writer_pretty(&mut w, &self.manifest())?;
        w.write_all(b"\n")?;
        w.flush()?;
        Ok(())
    }
}

pub fn write_partition<W: Write>(examples: &[TaskExample], mut w: W) -> Result<()> {
    for e in examples {
        serde_json::to_writer(&mut w, e)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawExample {
    id: String,
    text: String,
    label: u8,
}

/// Reads one partition file; each error carries its line number.
pub fn read_partition<R: BufRead>(reader: R) -> Result<Vec<TaskExample>> {
    let mut out = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let at = |message: String| Error::Parse {
            line: lineno,
            message,
        };
        let line = line.map_err(|e| at(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let raw: RawExample = serde_json::from_str(&line).map_err(|e| at(e.to_string()))?;
        if raw.label > 1 {
            return Err(at(format!("label must be 0 or 1, found {}", raw.label)));
        }
        out.push(TaskExample {
            id: raw.id,
            text: raw.text,
            label: raw.label,
        });
    }
    Ok(out)
}

fn build_task(
    name: &str,
    positives: Vec<TaskExample>,
    candidates: Vec<TaskExample>,
    seed: u64,
    policy: NegativePolicy,
) -> Result<TaskSplit> {
    let mut rng = derive_rng(seed, name);
    let negatives: Vec<TaskExample> = match policy {
        NegativePolicy::Balanced => {
            if candidates.len() < positives.len() {
                return Err(Error::InsufficientNegatives {
                    task: name.to_string(),
                    needed: positives.len(),
                    available: candidates.len(),
                });
            }
            index::sample(&mut rng, candidates.len(), positives.len())
                .into_iter()
                .map(|i| candidates[i].clone())
                .collect()
        }
        NegativePolicy::KeepAll => candidates,
    };
    let mut pool = positives;
    pool.extend(negatives);
    pool.shuffle(&mut rng);
    let (train, valid, _) = split_sizes(pool.len());
    let test = pool.split_off(train + valid);
    let valid_part = pool.split_off(train);
    Ok(TaskSplit {
        emotion: name.to_string(),
        seed,
        policy,
        train: pool,
        valid: valid_part,
        test,
    })
}

/// Built tasks along with items excluded for lacking labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryTasks {
    pub tasks: Vec<TaskSplit>,
    pub warnings: Vec<String>,
}

/// One task per wheel group from a labeled corpus. Items without labels are
/// left out entirely.
pub fn build_binary_tasks(
    corpus: &[TweetRecord],
    seed: u64,
    policy: NegativePolicy,
) -> Result<BinaryTasks> {
    let mut warnings = Vec::new();
    let labeled: Vec<(&TweetRecord, BTreeSet<Emotion8>)> = corpus
        .iter()
        .filter_map(|t| {
            t.labels
                .as_ref()
                .filter(|l| !l.is_empty())
                .map(|l| (t, groups_of(l)))
        })
        .collect();
    let skipped = corpus.len() - labeled.len();
    if skipped > 0 {
        warnings.push(format!("{skipped} items without labels were excluded"));
    }

    let tasks = Emotion8::ALL
        .par_iter()
        .map(|&g| {
            let (pos, neg): (Vec<_>, Vec<_>) =
                labeled.iter().partition(|(_, groups)| groups.contains(&g));
            let example = |t: &TweetRecord, label| TaskExample {
                id: t.id.clone(),
                text: t.text.clone(),
                label,
            };
            build_task(
                g.name(),
                pos.iter().map(|(t, _)| example(t, 1)).collect(),
                neg.iter().map(|(t, _)| example(t, 0)).collect(),
                seed,
                policy,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    for t in &tasks {
        if t.counts().positives == 0 {
            warnings.push(format!("task `{}` has no positives", t.emotion));
        }
    }
    Ok(BinaryTasks { tasks, warnings })
}

/// An item of a single-label dataset.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassItem {
    pub id: String,
    pub text: String,
    pub class: String,
}

/// One balanced binary task per class: the class's items against an equal
/// sample drawn from every other class.
pub fn split_multiclass(
    items: &[ClassItem],
    classes: &[String],
    seed: u64,
    policy: NegativePolicy,
) -> Result<BinaryTasks> {
    let mut warnings = Vec::new();
    let mut tasks = Vec::new();
    for class in classes {
        let (pos, neg): (Vec<&ClassItem>, Vec<&ClassItem>) =
            items.iter().partition(|i| &i.class == class);
        if pos.is_empty() {
            warnings.push(format!("class `{class}` has no items; task skipped"));
            continue;
        }
        let example = |i: &ClassItem, label| TaskExample {
            id: i.id.clone(),
            text: i.text.clone(),
            label,
        };
        tasks.push(build_task(
            class,
            pos.into_iter().map(|i| example(i, 1)).collect(),
            neg.into_iter().map(|i| example(i, 0)).collect(),
            seed,
            policy,
        )?);
    }
    Ok(BinaryTasks { tasks, warnings })
}

/// The wheel group a task name refers to. Fine-grained names (as used by
/// single-label emotion datasets) map to their group.
pub fn task_group(name: &str) -> Option<Emotion8> {
    match parse_emotion(name).ok()? {
        Label::Group(g) => Some(g),
        Label::Fine(e) => Some(e.group()),
    }
}

/// Pairs tasks from two task sets that refer to the same wheel group.
pub fn align_tasks<'a>(
    left: &'a [TaskSplit],
    right: &'a [TaskSplit],
) -> Vec<(Emotion8, &'a TaskSplit, &'a TaskSplit)> {
    let by_group: BTreeMap<Emotion8, &TaskSplit> = right
        .iter()
        .filter_map(|t| task_group(&t.emotion).map(|g| (g, t)))
        .collect();
    left.iter()
        .filter_map(|t| {
            let g = task_group(&t.emotion)?;
            by_group.get(&g).map(|r| (g, t, *r))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub property: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SplitReport {
    pub emotion: String,
    pub checks: Vec<Check>,
}

impl SplitReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Checks disjointness, 80/10/10 sizing (±1 item), aggregate balance, and
/// optionally exact expected counts.
pub fn verify_split(
    emotion: &str,
    train: &[TaskExample],
    valid: &[TaskExample],
    test: &[TaskExample],
    expected: Option<(usize, usize, usize)>,
) -> SplitReport {
    let mut checks = Vec::new();

    let mut seen: HashSet<&str> = HashSet::new();
    let mut overlaps = BTreeSet::new();
    for e in train.iter().chain(valid).chain(test) {
        if !seen.insert(&e.id) {
            overlaps.insert(e.id.clone());
        }
    }
    checks.push(Check {
        property: "disjoint".into(),
        passed: overlaps.is_empty(),
        detail: if overlaps.is_empty() {
            "no id appears twice".into()
        } else {
            format!(
                "{} repeated ids, e.g. `{}`",
                overlaps.len(),
                overlaps.first().unwrap()
            )
        },
    });

    let n = train.len() + valid.len() + test.len();
    let within = |got: usize, frac: f64| (got as f64 - frac * n as f64).abs() <= 1.0;
    let ratio_ok = within(train.len(), 0.8) && within(valid.len(), 0.1) && within(test.len(), 0.1);
    checks.push(Check {
        property: "ratio".into(),
        passed: ratio_ok,
        detail: format!("{}/{}/{} of {n}", train.len(), valid.len(), test.len()),
    });

    let positives = train
        .iter()
        .chain(valid)
        .chain(test)
        .filter(|e| e.label == 1)
        .count();
    checks.push(Check {
        property: "balance".into(),
        passed: positives * 2 == n,
        detail: format!("{positives} positive, {} negative", n - positives),
    });

    if let Some((tr, va, te)) = expected {
        let got = (train.len(), valid.len(), test.len());
        checks.push(Check {
            property: "expected_counts".into(),
            passed: got == (tr, va, te),
            detail: format!(
                "expected {tr}/{va}/{te}, found {}/{}/{}",
                got.0, got.1, got.2
            ),
        });
    }
    SplitReport {
        emotion: emotion.to_string(),
        checks,
    }
}

/// Reads `<emotion>.{train,valid,test}.jsonl` from `dir` and verifies them.
pub fn verify_split_dir(
    dir: &Path,
    emotion: &str,
    expected: Option<(usize, usize, usize)>,
) -> Result<SplitReport> {
    let mut parts = Vec::new();
    for name in PARTITIONS {
        let path = dir.join(format!("{emotion}.{name}.jsonl"));
        let file = File::open(&path)?;
        let examples = read_partition(BufReader::new(file)).map_err(|e| match e {
            Error::Parse { line, message } => Error::Parse {
                line,
                message: format!("{}: {message}", path.display()),
            },
            other => other,
        })?;
        parts.push(examples);
    }
    Ok(verify_split(
        emotion, &parts[0], &parts[1], &parts[2], expected,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wheel::Emotion24;

    fn labeled(n_pos: usize, n_neg: usize) -> Vec<TweetRecord> {
        let mut out = Vec::new();
        for i in 0..n_pos {
            out.push(TweetRecord::new(&format!("p{i}"), "x").with_labels([Emotion24::Joy]));
        }
        for i in 0..n_neg {
            out.push(TweetRecord::new(&format!("n{i}"), "y").with_labels([Emotion24::Grief]));
        }
        out
    }

    #[test]
    fn split_rule_reproduces_published_sizes() {
        for (_, tr, va, te) in PUBLISHED_SPLITS {
            assert_eq!(split_sizes(tr + va + te), (tr, va, te));
        }
        assert_eq!(split_sizes(20), (16, 2, 2));
        assert_eq!(split_sizes(0), (0, 0, 0));
        assert_eq!(split_sizes(1), (0, 0, 1));
    }

    #[test]
    fn ten_positives_make_twenty_examples() {
        let corpus = labeled(10, 12);
        let built = build_binary_tasks(&corpus, 3, NegativePolicy::Balanced);
        // remorse has 12 positives and only 10 candidates
        assert!(matches!(
            built,
            Err(Error::InsufficientNegatives {
                needed: 12,
                available: 10,
                ..
            })
        ));

        let corpus = labeled(10, 10);
        let built = build_binary_tasks(&corpus, 3, NegativePolicy::Balanced).unwrap();
        let love = built.tasks.iter().find(|t| t.emotion == "love").unwrap();
        let c = love.counts();
        assert_eq!((c.train, c.valid, c.test), (16, 2, 2));
        assert_eq!((c.positives, c.negatives), (10, 10));
    }

    #[test]
    fn multi_label_item_is_never_a_negative_for_its_group() {
        let mut corpus = labeled(3, 3);
        for i in 0..5 {
            corpus.push(TweetRecord::new(&format!("f{i}"), "w").with_labels([Emotion24::Fear]));
        }
        corpus.push(TweetRecord::new("both", "z").with_labels([Emotion24::Joy, Emotion24::Anger]));
        let built = build_binary_tasks(&corpus, 9, NegativePolicy::Balanced).unwrap();
        let love = built.tasks.iter().find(|t| t.emotion == "love").unwrap();
        let both = love.all().find(|e| e.id == "both").unwrap();
        assert_eq!(both.label, 1);
        let agg = built
            .tasks
            .iter()
            .find(|t| t.emotion == "aggressiveness")
            .unwrap();
        assert!(agg.all().filter(|e| e.id == "both").all(|e| e.label == 1));
    }

    #[test]
    fn keep_all_negatives() {
        let corpus = labeled(2, 7);
        let built = build_binary_tasks(&corpus, 1, NegativePolicy::KeepAll).unwrap();
        let love = built.tasks.iter().find(|t| t.emotion == "love").unwrap();
        assert_eq!(love.counts().negatives, 7);
    }

    #[test]
    fn unlabeled_items_are_excluded() {
        let mut corpus = labeled(2, 2);
        corpus.push(TweetRecord::new("u", "nothing"));
        let built = build_binary_tasks(&corpus, 1, NegativePolicy::Balanced).unwrap();
        assert!(built.tasks.iter().all(|t| t.all().all(|e| e.id != "u")));
        assert!(built.warnings.iter().any(|w| w.contains("1 items")));
    }

    fn class_items(sizes: &[(&str, usize)]) -> Vec<ClassItem> {
        sizes.iter()
            .flat_map(|(c, n)| {
                (0..*n).map(move |i| ClassItem {
                    id: format!("{c}{i}"),
                    text: String::new(),
                    class: c.to_string(),
                })
            })
            .collect()
    }

    #[test]
    fn multiclass_examples() {
        // b's five positives cannot be matched by a's three items
        let items = class_items(&[("a", 3), ("b", 5)]);
        let classes = vec!["a".to_string(), "b".to_string()];
        let err = split_multiclass(&items, &classes, 5, NegativePolicy::Balanced).unwrap_err();
        assert!(matches!(
            err,
            Error::InsufficientNegatives {
                needed: 5,
                available: 3,
                ..
            }
        ));

        let items = class_items(&[("a", 3), ("b", 5), ("c", 2)]);
        let out = split_multiclass(&items, &classes, 5, NegativePolicy::Balanced).unwrap();
        assert_eq!(out.tasks[0].counts().positives, 3);
        assert_eq!(out.tasks[0].counts().negatives, 3);
        assert_eq!(out.tasks.len(), 2);
        assert_eq!(out.tasks[1].counts().positives, 5);
        assert_eq!(out.tasks[1].counts().negatives, 5);

        let single = class_items(&[("a", 4)]);
        assert!(
            split_multiclass(&single, &["a".to_string()], 5, NegativePolicy::Balanced).is_err()
        );

        let with_missing = vec!["a".to_string(), "zzz".to_string()];
        let out = split_multiclass(&items, &with_missing, 5, NegativePolicy::Balanced).unwrap();
        assert_eq!(out.tasks.len(), 1);
        assert_eq!(out.warnings.len(), 1);
    }

    #[test]
    fn eight_balanced_classes() {
        let names = [
            "joy",
            "trust",
            "fear",
            "surprise",
            "sadness",
            "disgust",
            "anger",
            "anticipation",
        ];
        let sizes: Vec<(&str, usize)> = names.iter().map(|n| (*n, 10)).collect();
        let items = class_items(&sizes);
        let classes: Vec<String> = names.iter().map(|s| s.to_string()).collect();
        let multi = split_multiclass(&items, &classes, 11, NegativePolicy::Balanced).unwrap();
        for t in &multi.tasks {
            assert_eq!((t.counts().positives, t.counts().negatives), (10, 10));
        }
        // each primary maps onto exactly one wheel group
        let corpus = labeled(10, 10);
        let binary = build_binary_tasks(&corpus, 1, NegativePolicy::Balanced).unwrap();
        let aligned = align_tasks(&multi.tasks, &binary.tasks);
        assert_eq!(aligned.len(), 8);
        let groups: BTreeSet<_> = aligned.iter().map(|a| a.0).collect();
        assert_eq!(groups.len(), 8);
    }

    fn ex(id: &str, label: u8) -> TaskExample {
        TaskExample {
            id: id.into(),
            text: String::new(),
            label,
        }
    }

    #[test]
    fn verify_hand_built_fixture() {
        let all: Vec<TaskExample> = (0..20).map(|i| ex(&i.to_string(), (i % 2) as u8)).collect();
        let r = verify_split(
            "love",
            &all[..16],
            &all[16..18],
            &all[18..],
            Some((16, 2, 2)),
        );
        assert!(r.passed(), "{r:?}");

        let mut test = all[18..].to_vec();
        test[0].id = "0".into();
        let r = verify_split("love", &all[..16], &all[16..18], &test, None);
        let disjoint = r.checks.iter().find(|c| c.property == "disjoint").unwrap();
        assert!(!disjoint.passed);
    }

    #[test]
    fn partition_parse_errors_carry_line() {
        let input = "{\"id\":\"a\",\"text\":\"t\",\"label\":1}\n{\"id\":\"b\",\"text\":\"t\",\"label\":2}\n";
        assert!(matches!(
            read_partition(input.as_bytes()),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            read_partition("nope".as_bytes()),
            Err(Error::Parse { line: 1, .. })
        ));
    }
}
