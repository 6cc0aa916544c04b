//! Plutchik Emotion Agreement (PEA) at pair, item, worker and corpus level,
//! worker filtering, label aggregation, and comparison metrics.

mod alpha;
mod table;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::wheel::{pair_score, Emotion24};

pub use alpha::{jaccard_distance, krippendorff_alpha, nominal_distance, AlphaEstimate};
pub use table::{AnnotationRecord, AnnotationTable};

pub type EmotionSet = BTreeSet<Emotion24>;

/// Default PEA cut-off for worker filtering; scores at or below it are dropped.
pub const DEFAULT_THRESHOLD: f64 = 0.55;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ItemId(pub String);

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct WorkerId(pub String);

impl From<&str> for ItemId {
    fn from(s: &str) -> Self {
        ItemId(s.to_string())
    }
}

impl From<&str> for WorkerId {
    fn from(s: &str) -> Self {
        WorkerId(s.to_string())
    }
}

impl std::fmt::Display for ItemId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::fmt::Display for WorkerId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

/// Whether worker-to-worker agreement is taken from the scored worker's side
/// only, or averaged over both directions.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    #[default]
    Directed,
    Symmetric,
}

/// How the corpus mean is formed from worker-level scores.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Weighting {
    /// Unweighted mean of per-worker means.
    #[default]
    Worker,
    /// Mean over every (item, worker) score.
    WorkerItem,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeaOptions {
    pub variant: Variant,
    pub weighting: Weighting,
}

/// Mean over `x` of the best wheel match each of its emotions finds in `y`.
///
/// Not symmetric: `directed_agreement({joy}, {joy, grief})` is 1 while the
/// reverse is 0.5.
pub fn directed_agreement(x: &EmotionSet, y: &EmotionSet) -> Result<f64> {
    if x.is_empty() {
        return Err(Error::EmptySet("x"));
    }
    if y.is_empty() {
        return Err(Error::EmptySet("y"));
    }
    let total: f64 = x
        .iter()
        .map(|&a| {
            y.iter()
                .map(|&b| pair_score(a, b))
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .sum();
    Ok(total / x.len() as f64)
}

pub fn symmetric_agreement(x: &EmotionSet, y: &EmotionSet) -> Result<f64> {
    Ok((directed_agreement(x, y)? + directed_agreement(y, x)?) / 2.0)
}

pub fn agreement(x: &EmotionSet, y: &EmotionSet, variant: Variant) -> Result<f64> {
    match variant {
        Variant::Directed => directed_agreement(x, y),
        Variant::Symmetric => symmetric_agreement(x, y),
    }
}

/// Per-worker PEA on one item: each worker's mean agreement with every other
/// worker on the item. `None` when the item has fewer than two annotators.
pub fn per_item_pea(
    annotations: &BTreeMap<WorkerId, EmotionSet>,
    variant: Variant,
) -> Result<Option<BTreeMap<WorkerId, f64>>> {
    if annotations.len() < 2 {
        return Ok(None);
    }
    let others = (annotations.len() - 1) as f64;
    let mut scores = BTreeMap::new();
    for (w, set) in annotations {
        let mut sum = 0.0;
        for (v, other) in annotations {
            if v != w {
                sum += agreement(set, other, variant)?;
            }
        }
        scores.insert(w.clone(), sum / others);
    }
    Ok(Some(scores))
}

/// Worker- and corpus-level PEA over a whole annotation table.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AgreementReport {
    pub per_item_per_worker: BTreeMap<(ItemId, WorkerId), f64>,
    pub per_worker: BTreeMap<WorkerId, f64>,
    pub corpus_mean: f64,
    pub dropped_workers: BTreeSet<WorkerId>,
    pub items_scored: usize,
    pub items_skipped: usize,
    pub options: PeaOptions,
    pub warnings: Vec<String>,
}

pub fn corpus_pea(table: &AnnotationTable, options: PeaOptions) -> Result<AgreementReport> {
    let mut report = AgreementReport {
        options,
        ..Default::default()
    };
    let mut by_worker: BTreeMap<WorkerId, Vec<f64>> = BTreeMap::new();
    for (item, annotations) in table.items() {
        match per_item_pea(annotations, options.variant)? {
            Some(scores) => {
                report.items_scored += 1;
                for (worker, score) in scores {
                    by_worker.entry(worker.clone()).or_default().push(score);
                    report
                        .per_item_per_worker
                        .insert((item.clone(), worker), score);
                }
            }
            None => report.items_skipped += 1,
        }
    }
    if report.items_scored == 0 {
        report
            .warnings
            .push("no item has two or more annotators; report is empty".to_string());
        return Ok(report);
    }
    report.per_worker = by_worker
        .into_iter()
        .map(|(w, scores)| (w, mean(&scores)))
        .collect();
    report.corpus_mean = match options.weighting {
        Weighting::Worker => mean(&report.per_worker.values().copied().collect::<Vec<_>>()),
        Weighting::WorkerItem => mean(
            &report
                .per_item_per_worker
                .values()
                .copied()
                .collect::<Vec<_>>(),
        ),
    };
    Ok(report)
}

fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.iter().sum::<f64>() / values.len() as f64
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct WorkerFilter {
    pub kept: BTreeSet<WorkerId>,
    pub dropped: BTreeSet<WorkerId>,
}

/// Single-pass quality filter: workers scoring at or below `threshold` are
/// dropped. Workers never scored (only on single-annotator items) appear in
/// neither set.
pub fn filter_workers(report: &AgreementReport, threshold: f64) -> Result<WorkerFilter> {
    if !(0.0..=1.0).contains(&threshold) {
        return Err(Error::InvalidParameter(format!(
            "threshold {threshold} outside [0, 1]"
        )));
    }
    let (dropped, kept): (Vec<_>, Vec<_>) = report
        .per_worker
        .iter()
        .partition(|(_, &score)| score <= threshold);
    Ok(WorkerFilter {
        kept: kept.into_iter().map(|(w, _)| w.clone()).collect(),
        dropped: dropped.into_iter().map(|(w, _)| w.clone()).collect(),
    })
}

impl AgreementReport {
    /// Mean of the original per-worker scores restricted to `workers`.
    pub fn mean_over(&self, workers: &BTreeSet<WorkerId>) -> f64 {
        let scores: Vec<f64> = self
            .per_worker
            .iter()
            .filter(|(w, _)| workers.contains(*w))
            .map(|(_, s)| *s)
            .collect();
        mean(&scores)
    }

    pub fn is_empty(&self) -> bool {
        self.per_worker.is_empty()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let items: Vec<_> = self
            .per_item_per_worker
            .iter()
            .map(|((item, worker), score)| {
                serde_json::json!({ "item_id": item, "worker_id": worker, "pea": score })
            })
            .collect();
        serde_json::json!({
            "corpus_mean": self.corpus_mean,
            "per_worker": self.per_worker.iter().map(|(w, s)| (w.0.clone(), *s)).collect::<BTreeMap<_, _>>(),
            "per_item_per_worker": items,
            "dropped_workers": self.dropped_workers,
            "items_scored": self.items_scored,
            "items_skipped": self.items_skipped,
            "variant": self.options.variant,
            "weighting": self.options.weighting,
            "warnings": self.warnings,
        })
    }

    /// Human-readable summary on the ×100 scale.
    pub fn render_table(&self) -> String {
        let width = self
            .per_worker
            .keys()
            .map(|w| w.0.len())
            .max()
            .unwrap_or(0)
            .max("worker".len());
        let mut out = String::new();
        let _ = writeln!(out, "{:<width$}  {:>6}  status", "worker", "PEA");
        for (worker, score) in &self.per_worker {
            let status = if self.dropped_workers.contains(worker) {
                "dropped"
            } else {
                "kept"
            };
            let _ = writeln!(
                out,
                "{:<width$}  {:>6.1}  {status}",
                worker.0,
                score * 100.0
            );
        }
        let _ = writeln!(out, "{:<width$}  {:>6.1}", "mean", self.corpus_mean * 100.0);
        out
    }
}

/// Item labels after voting, with items whose label set came out empty.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AggregatedLabels {
    pub labels: BTreeMap<ItemId, EmotionSet>,
    pub flagged_empty: BTreeSet<ItemId>,
}

/// An emotion is kept for an item when at least `min_votes` workers chose it.
pub fn aggregate_labels(table: &AnnotationTable, min_votes: usize) -> Result<AggregatedLabels> {
    if min_votes == 0 {
        return Err(Error::InvalidParameter(
            "min_votes must be at least 1".into(),
        ));
    }
    let mut out = AggregatedLabels::default();
    for (item, annotations) in table.items() {
        let mut votes: BTreeMap<Emotion24, usize> = BTreeMap::new();
        for set in annotations.values() {
            for &e in set {
                *votes.entry(e).or_default() += 1;
            }
        }
        let labels: EmotionSet = votes
            .into_iter()
            .filter(|&(_, n)| n >= min_votes)
            .map(|(e, _)| e)
            .collect();
        if labels.is_empty() {
            out.flagged_empty.insert(item.clone());
        }
        out.labels.insert(item.clone(), labels);
    }
    Ok(out)
}

/// |A ∩ B| / |A ∪ B|; undefined for two empty sets.
pub fn jaccard<T: Ord>(a: &BTreeSet<T>, b: &BTreeSet<T>) -> Result<f64> {
    if a.is_empty() && b.is_empty() {
        return Err(Error::InvalidParameter(
            "jaccard similarity of two empty sets is undefined".into(),
        ));
    }
    let inter = a.intersection(b).count();
    let union = a.len() + b.len() - inter;
    Ok(inter as f64 / union as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wheel::Emotion24::*;
    use proptest::prelude::*;

    fn set(items: &[Emotion24]) -> EmotionSet {
        items.iter().copied().collect()
    }

    fn item(workers: &[(&str, &[Emotion24])]) -> BTreeMap<WorkerId, EmotionSet> {
        workers
            .iter()
            .map(|(w, s)| (WorkerId::from(*w), set(s)))
            .collect()
    }

    #[test]
    fn directed_examples() {
        assert_eq!(directed_agreement(&set(&[Joy]), &set(&[Joy])).unwrap(), 1.0);
        assert_eq!(
            directed_agreement(&set(&[Ecstasy, Grief]), &set(&[Serenity])).unwrap(),
            0.5
        );
        assert_eq!(
            directed_agreement(&set(&[Joy]), &set(&[Joy, Grief])).unwrap(),
            1.0
        );
        assert_eq!(
            directed_agreement(&set(&[Joy, Grief]), &set(&[Joy])).unwrap(),
            0.5
        );
    }

    #[test]
    fn empty_sets_are_rejected() {
        let e = directed_agreement(&set(&[]), &set(&[Joy])).unwrap_err();
        assert!(matches!(e, Error::EmptySet("x")));
        let e = directed_agreement(&set(&[Joy]), &set(&[])).unwrap_err();
        assert!(matches!(e, Error::EmptySet("y")));
    }

    #[test]
    fn symmetric_examples() {
        assert_eq!(
            symmetric_agreement(&set(&[Joy]), &set(&[Joy])).unwrap(),
            1.0
        );
        assert_eq!(
            symmetric_agreement(&set(&[Joy]), &set(&[Joy, Grief])).unwrap(),
            0.75
        );
        assert_eq!(
            symmetric_agreement(&set(&[Ecstasy]), &set(&[Grief])).unwrap(),
            0.0
        );
    }

    #[test]
    fn per_item_three_workers() {
        let annotations = item(&[("w1", &[Joy]), ("w2", &[Joy]), ("w3", &[Grief])]);
        let scores = per_item_pea(&annotations, Variant::Directed)
            .unwrap()
            .unwrap();
        assert_eq!(scores[&WorkerId::from("w1")], 0.5);
        assert_eq!(scores[&WorkerId::from("w2")], 0.5);
        assert_eq!(scores[&WorkerId::from("w3")], 0.0);
    }

    #[test]
    fn per_item_is_mean_of_directed_pairs() {
        let annotations = item(&[
            ("w1", &[Joy, Anger]),
            ("w2", &[Fear]),
            ("w3", &[Interest, Trust]),
        ]);
        let scores = per_item_pea(&annotations, Variant::Directed)
            .unwrap()
            .unwrap();
        let w1 = &annotations[&WorkerId::from("w1")];
        let expected = 0.5
            * (directed_agreement(w1, &annotations[&WorkerId::from("w2")]).unwrap()
                + directed_agreement(w1, &annotations[&WorkerId::from("w3")]).unwrap());
        assert_eq!(scores[&WorkerId::from("w1")], expected);
    }

    #[test]
    fn single_annotator_is_skipped() {
        let annotations = item(&[("w1", &[Joy])]);
        assert!(per_item_pea(&annotations, Variant::Directed)
            .unwrap()
            .is_none());
    }

    fn table(rows: &[(&str, &str, &[Emotion24])]) -> AnnotationTable {
        let mut t = AnnotationTable::default();
        for (i, w, e) in rows {
            t.insert(AnnotationRecord::new(i, w, e.iter().copied()))
                .unwrap();
        }
        t
    }

    #[test]
    fn corpus_mean_over_workers() {
        let t = table(&[
            ("a", "w1", &[Joy]),
            ("a", "w2", &[Joy]),
            ("b", "w1", &[Joy, Grief]),
            ("b", "w2", &[Joy]),
            ("c", "w3", &[Fear]),
        ]);
        let report = corpus_pea(&t, PeaOptions::default()).unwrap();
        assert_eq!(report.items_scored, 2);
        assert_eq!(report.items_skipped, 1);
        // w1 scores 1.0 on a and 0.5 on b
        assert_eq!(report.per_worker[&WorkerId::from("w1")], 0.75);
        assert_eq!(report.per_worker[&WorkerId::from("w2")], 1.0);
        assert_eq!(report.corpus_mean, 0.875);

        let weighted = corpus_pea(
            &t,
            PeaOptions {
                weighting: Weighting::WorkerItem,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(weighted.corpus_mean, (1.0 + 1.0 + 0.5 + 1.0) / 4.0);
    }

    #[test]
    fn corpus_without_shared_items_is_empty() {
        let t = table(&[("a", "w1", &[Joy]), ("b", "w2", &[Fear])]);
        let report = corpus_pea(&t, PeaOptions::default()).unwrap();
        assert!(report.is_empty());
        assert_eq!(report.warnings.len(), 1);
    }

    #[test]
    fn filter_threshold_is_inclusive() {
        let mut report = AgreementReport::default();
        report.per_worker.insert("a".into(), 0.55);
        report.per_worker.insert("b".into(), 0.56);
        let f = filter_workers(&report, DEFAULT_THRESHOLD).unwrap();
        assert!(f.dropped.contains(&WorkerId::from("a")));
        assert!(f.kept.contains(&WorkerId::from("b")));

        let empty = filter_workers(&AgreementReport::default(), 0.55).unwrap();
        assert!(empty.kept.is_empty() && empty.dropped.is_empty());
        assert!(filter_workers(&report, 1.5).is_err());
    }

    #[test]
    fn aggregation_examples() {
        let t = table(&[("a", "1", &[Joy]), ("a", "2", &[Joy]), ("a", "3", &[Joy])]);
        assert_eq!(
            aggregate_labels(&t, 2).unwrap().labels[&ItemId::from("a")],
            set(&[Joy])
        );

        let t = table(&[("a", "1", &[Joy]), ("a", "2", &[Grief])]);
        let agg = aggregate_labels(&t, 2).unwrap();
        assert!(agg.labels[&ItemId::from("a")].is_empty());
        assert!(agg.flagged_empty.contains(&ItemId::from("a")));

        let t = table(&[
            ("a", "1", &[Joy]),
            ("a", "2", &[Joy, Grief]),
            ("a", "3", &[Grief]),
        ]);
        assert_eq!(
            aggregate_labels(&t, 1).unwrap().labels[&ItemId::from("a")],
            set(&[Joy, Grief])
        );
        assert!(aggregate_labels(&t, 0).is_err());
    }

    #[test]
    fn jaccard_examples() {
        assert_eq!(jaccard(&set(&[Joy]), &set(&[Joy])).unwrap(), 1.0);
        assert_eq!(jaccard(&set(&[Joy, Grief]), &set(&[Joy])).unwrap(), 0.5);
        assert_eq!(jaccard(&set(&[Joy]), &set(&[Fear])).unwrap(), 0.0);
        assert!(jaccard::<Emotion24>(&set(&[]), &set(&[])).is_err());
    }

    fn emotion_set() -> impl Strategy<Value = EmotionSet> {
        proptest::collection::btree_set((0usize..24).prop_map(|i| Emotion24::ALL[i]), 1..6)
    }

    proptest! {
        #[test]
        fn scores_in_unit_interval(x in emotion_set(), y in emotion_set()) {
            let d = directed_agreement(&x, &y).unwrap();
            prop_assert!((0.0..=1.0).contains(&d));
            let s = symmetric_agreement(&x, &y).unwrap();
            prop_assert!((0.0..=1.0).contains(&s));
            prop_assert_eq!(directed_agreement(&x, &x).unwrap(), 1.0);
        }

        #[test]
        fn superset_never_decreases(x in emotion_set(), y in emotion_set(), extra in emotion_set()) {
            let bigger: EmotionSet = y.union(&extra).copied().collect();
            prop_assert!(directed_agreement(&x, &bigger).unwrap() >= directed_agreement(&x, &y).unwrap());
        }

        #[test]
        fn identical_sets_give_full_item_score(s in emotion_set(), n in 2usize..6) {
            let annotations: BTreeMap<WorkerId, EmotionSet> =
                (0..n).map(|i| (WorkerId(i.to_string()), s.clone())).collect();
            let scores = per_item_pea(&annotations, Variant::Directed).unwrap().unwrap();
            prop_assert!(scores.values().all(|&v| v == 1.0));
        }

        #[test]
        fn filter_partitions_workers(scores in proptest::collection::vec(0.0f64..=1.0, 0..20), threshold in 0.0f64..=1.0) {
            let mut report = AgreementReport::default();
            for (i, s) in scores.iter().enumerate() {
                report.per_worker.insert(WorkerId(i.to_string()), *s);
            }
            let f = filter_workers(&report, threshold).unwrap();
            prop_assert!(f.kept.is_disjoint(&f.dropped));
            prop_assert_eq!(f.kept.len() + f.dropped.len(), scores.len());
        }

        #[test]
        fn min_votes_one_is_union(sets in proptest::collection::vec(emotion_set(), 1..6)) {
            let mut t = AnnotationTable::default();
            for (i, s) in sets.iter().enumerate() {
                t.insert(AnnotationRecord::new("x", &i.to_string(), s.iter().copied())).unwrap();
            }
            let union: EmotionSet = sets.iter().flatten().copied().collect();
            prop_assert_eq!(&aggregate_labels(&t, 1).unwrap().labels[&ItemId::from("x")], &union);
        }
    }
}
