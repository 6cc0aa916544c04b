//! Interpretable scale for PEA: a random-annotation baseline, interpretation
//! bands, and A/B pair construction for human validation.

use std::collections::BTreeMap;
use std::io::Write;

use rand::seq::index;
use rayon::prelude::*;
use serde::Serialize;

use crate::agreement::{
    agreement, corpus_pea, AnnotationRecord, AnnotationTable, EmotionSet, ItemId, PeaOptions,
    Variant, WorkerId,
};
use crate::error::{Error, Result};
use crate::seed::derive_rng;
use crate::wheel::{Emotion24, Emotion8};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BaselineParams {
    pub n_annotations: usize,
    pub emotions_per_annotation: usize,
    pub workers_per_item: usize,
    pub bins: usize,
}

impl Default for BaselineParams {
    fn default() -> Self {
        BaselineParams {
            n_annotations: 5000,
            emotions_per_annotation: 3,
            workers_per_item: 5,
            bins: 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HistogramBin {
    pub low: f64,
    pub high: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CalibrationResult {
    pub seed: u64,
    pub params: BaselineParams,
    /// Per-worker PEA, in worker-id order.
    pub scores: Vec<f64>,
    pub mean: f64,
    pub histogram: Vec<HistogramBin>,
    pub warnings: Vec<String>,
}

/// Fixed-width bins over [0, 1]; a score of exactly 1 lands in the last bin.
pub fn histogram(scores: &[f64], bins: usize) -> Vec<HistogramBin> {
    let mut counts = vec![0usize; bins];
    for &s in scores {
        let i = ((s * bins as f64).floor() as usize).min(bins - 1);
        counts[i] += 1;
    }
    counts
        .into_iter()
        .enumerate()
        .map(|(i, count)| HistogramBin {
            low: i as f64 / bins as f64,
            high: (i + 1) as f64 / bins as f64,
            count,
        })
        .collect()
}

pub fn write_histogram_csv<W: Write>(bins: &[HistogramBin], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["bin_low", "bin_high", "count"])?;
    for b in bins {
        out.write_record([b.low.to_string(), b.high.to_string(), b.count.to_string()])?;
    }
    out.flush()?;
    Ok(())
}

/// Synthetic annotation table: each item gets `workers_per_item` distinct
/// workers, each picking a uniform random subset of `emotions_per_annotation`
/// wheel groups (materialized as each group's middle-intensity emotion).
pub fn random_annotations(params: &BaselineParams, seed: u64) -> Result<AnnotationTable> {
    let k = params.emotions_per_annotation;
    if !(1..=8).contains(&k) {
        return Err(Error::InvalidParameter(format!(
            "emotions_per_annotation must be in 1..=8, got {k}"
        )));
    }
    if params.workers_per_item < 2 {
        return Err(Error::InvalidParameter(
            "workers_per_item must be at least 2".into(),
        ));
    }
    let items = params.n_annotations / params.workers_per_item;
    if items == 0 {
        return Err(Error::InvalidParameter(
            "n_annotations smaller than workers_per_item".into(),
        ));
    }
    let records: Vec<Vec<AnnotationRecord>> = (0..items)
        .into_par_iter()
        .map(|i| {
            let mut rng = derive_rng(seed, &format!("item-{i}"));
            let item = format!("r{i:06}");
            (0..params.workers_per_item)
                .map(|j| {
                    let emotions: Vec<Emotion24> = index::sample(&mut rng, 8, k)
                        .into_iter()
                        .map(|g| Emotion8::ALL[g].representative())
                        .collect();
                    AnnotationRecord::new(&item, &format!("{item}-w{j}"), emotions)
                })
                .collect()
        })
        .collect();
    AnnotationTable::from_records(records.into_iter().flatten())
}

pub fn random_baseline(params: BaselineParams, seed: u64) -> Result<CalibrationResult> {
    if params.bins == 0 {
        return Err(Error::InvalidParameter("bins must be at least 1".into()));
    }
    let table = random_annotations(&params, seed)?;
    let mut warnings = Vec::new();
    let used = table.len();
    if used != params.n_annotations {
        warnings.push(format!(
            "{} annotations do not divide into items of {}; generated {used}",
            params.n_annotations, params.workers_per_item
        ));
    }
    let report = corpus_pea(&table, PeaOptions::default())?;
    let scores: Vec<f64> = report.per_worker.values().copied().collect();
    Ok(CalibrationResult {
        seed,
        params,
        histogram: histogram(&scores, params.bins),
        mean: report.corpus_mean,
        scores,
        warnings,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Band {
    None,
    Poor,
    Moderate,
    High,
}

impl Band {
    pub fn label(self) -> &'static str {
        match self {
            Band::None => "no agreement",
            Band::Poor => "poor agreement",
            Band::Moderate => "moderate agreement",
            Band::High => "high agreement",
        }
    }
}

/// Bands on the ×100 scale: [0,25) none, [25,50) poor, [50,75) moderate,
/// [75,100] high.
pub fn interpret(score: f64) -> Result<Band> {
    if !(0.0..=1.0).contains(&score) {
        return Err(Error::InvalidParameter(format!(
            "score {score} outside [0, 1]"
        )));
    }
    Ok(if score < 0.25 {
        Band::None
    } else if score < 0.5 {
        Band::Poor
    } else if score < 0.75 {
        Band::Moderate
    } else {
        Band::High
    })
}

/// Two annotation pairs on one item sharing a worker:
/// A = (shared, first) and B = (shared, second).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct AbPair {
    pub item_id: ItemId,
    pub shared_worker: WorkerId,
    pub first: WorkerId,
    pub second: WorkerId,
}

impl AbPair {
    pub fn pair_a(&self) -> (&WorkerId, &WorkerId) {
        (&self.shared_worker, &self.first)
    }

    pub fn pair_b(&self) -> (&WorkerId, &WorkerId) {
        (&self.shared_worker, &self.second)
    }
}

/// m · C(m − 1, 2): pairs available on an item with `m` workers.
pub fn ab_pair_count(m: usize) -> usize {
    if m < 3 {
        return 0;
    }
    m * (m - 1) * (m - 2) / 2
}

/// Every choice of shared worker and unordered pair of co-annotators.
pub fn enumerate_ab_pairs(table: &AnnotationTable) -> Vec<AbPair> {
    let mut out = Vec::new();
    for (item, annotations) in table.items() {
        let workers: Vec<&WorkerId> = annotations.keys().collect();
        for shared in &workers {
            let others: Vec<&WorkerId> = workers.iter().copied().filter(|w| w != shared).collect();
            for (i, first) in others.iter().enumerate() {
                for second in &others[i + 1..] {
                    out.push(AbPair {
                        item_id: item.clone(),
                        shared_worker: (*shared).clone(),
                        first: (*first).clone(),
                        second: (*second).clone(),
                    });
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HitSample {
    pub batches: Vec<Vec<AbPair>>,
    pub warnings: Vec<String>,
}

/// Samples `n_sample` pairs without replacement and chunks them into HITs.
pub fn sample_hits(
    pairs: &[AbPair],
    n_sample: usize,
    pairs_per_hit: usize,
    seed: u64,
) -> Result<HitSample> {
    if pairs.is_empty() {
        return Err(Error::InsufficientData("A/B pair pool is empty".into()));
    }
    if pairs_per_hit == 0 {
        return Err(Error::InvalidParameter(
            "pairs_per_hit must be at least 1".into(),
        ));
    }
    if n_sample > pairs.len() {
        return Err(Error::InvalidParameter(format!(
            "cannot sample {n_sample} pairs from a pool of {}",
            pairs.len()
        )));
    }
    let mut rng = derive_rng(seed, "hits");
    let chosen: Vec<AbPair> = index::sample(&mut rng, pairs.len(), n_sample)
        .into_iter()
        .map(|i| pairs[i].clone())
        .collect();
    let mut warnings = Vec::new();
    if !n_sample.is_multiple_of(pairs_per_hit) {
        warnings.push(format!(
            "{n_sample} pairs do not divide into HITs of {pairs_per_hit}; last HIT has {}",
            n_sample % pairs_per_hit
        ));
    }
    let batches = chosen
        .chunks(pairs_per_hit)
        .map(<[AbPair]>::to_vec)
        .collect();
    Ok(HitSample { batches, warnings })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HitPairView {
    pub item_id: ItemId,
    pub item_text: String,
    pub annotations_a: [EmotionSet; 2],
    pub annotations_b: [EmotionSet; 2],
}

/// Worker-facing HIT file body.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HitFile {
    pub hit_id: String,
    pub pairs: Vec<HitPairView>,
}

fn lookup<'a>(
    table: &'a AnnotationTable,
    item: &ItemId,
    worker: &WorkerId,
) -> Result<&'a EmotionSet> {
    table
        .get(item, worker)
        .ok_or_else(|| Error::MissingAnnotation {
            item: item.0.clone(),
            worker: worker.0.clone(),
        })
}

pub fn hit_files(
    sample: &HitSample,
    table: &AnnotationTable,
    texts: &BTreeMap<String, String>,
) -> Result<Vec<HitFile>> {
    sample
        .batches
        .iter()
        .enumerate()
        .map(|(i, batch)| {
            let pairs = batch
                .iter()
                .map(|p| {
                    Ok(HitPairView {
                        item_id: p.item_id.clone(),
                        item_text: texts.get(&p.item_id.0).cloned().unwrap_or_default(),
                        annotations_a: [
                            lookup(table, &p.item_id, &p.shared_worker)?.clone(),
                            lookup(table, &p.item_id, &p.first)?.clone(),
                        ],
                        annotations_b: [
                            lookup(table, &p.item_id, &p.shared_worker)?.clone(),
                            lookup(table, &p.item_id, &p.second)?.clone(),
                        ],
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(HitFile {
                hit_id: format!("hit-{i:04}"),
                pairs,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Ranking {
    #[serde(rename = "A_higher")]
    AHigher,
    #[serde(rename = "same")]
    Same,
    #[serde(rename = "B_higher")]
    BHigher,
}

/// Which annotation pair PEA scores higher. Differences within 1e-12 tie.
pub fn pea_rank(pair: &AbPair, table: &AnnotationTable, variant: Variant) -> Result<Ranking> {
    let shared = lookup(table, &pair.item_id, &pair.shared_worker)?;
    let first = lookup(table, &pair.item_id, &pair.first)?;
    let second = lookup(table, &pair.item_id, &pair.second)?;
    let a = agreement(shared, first, variant)?;
    let b = agreement(shared, second, variant)?;
    Ok(if (a - b).abs() <= 1e-12 {
        Ranking::Same
    } else if a > b {
        Ranking::AHigher
    } else {
        Ranking::BHigher
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wheel::Emotion24::*;

    fn small_params() -> BaselineParams {
        BaselineParams {
            n_annotations: 500,
            ..Default::default()
        }
    }

    #[test]
    fn baseline_is_deterministic() {
        let a = random_baseline(small_params(), 42).unwrap();
        let b = random_baseline(small_params(), 42).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.scores.len(), 500);
        assert_eq!(a.histogram.iter().map(|b| b.count).sum::<usize>(), 500);
        let mean = a.scores.iter().sum::<f64>() / a.scores.len() as f64;
        assert!((mean - a.mean).abs() < 1e-12);
        assert_ne!(
            random_baseline(small_params(), 43).unwrap().scores,
            a.scores
        );
    }

    #[test]
    fn selecting_everything_saturates() {
        let params = BaselineParams {
            emotions_per_annotation: 8,
            ..small_params()
        };
        let r = random_baseline(params, 1).unwrap();
        assert!(r.scores.iter().all(|&s| s == 1.0));
    }

    #[test]
    fn baseline_parameter_checks() {
        let bad = BaselineParams {
            emotions_per_annotation: 9,
            ..Default::default()
        };
        assert!(random_baseline(bad, 0).is_err());
        let bad = BaselineParams {
            workers_per_item: 1,
            ..Default::default()
        };
        assert!(random_baseline(bad, 0).is_err());
        let uneven = BaselineParams {
            n_annotations: 12,
            ..Default::default()
        };
        assert_eq!(random_baseline(uneven, 0).unwrap().warnings.len(), 1);
    }

    #[test]
    fn bands() {
        assert_eq!(interpret(0.30).unwrap().label(), "poor agreement");
        assert_eq!(interpret(0.657).unwrap(), Band::Moderate);
        assert_eq!(interpret(1.0).unwrap(), Band::High);
        assert_eq!(interpret(0.0).unwrap(), Band::None);
        assert_eq!(interpret(0.25).unwrap(), Band::Poor);
        assert_eq!(interpret(0.5).unwrap(), Band::Moderate);
        assert_eq!(interpret(0.75).unwrap(), Band::High);
        assert!(interpret(1.01).is_err());
        assert!(interpret(f64::NAN).is_err());
        let mut last = Band::None;
        for i in 0..=1000 {
            let b = interpret(i as f64 / 1000.0).unwrap();
            assert!(b >= last);
            last = b;
        }
    }

    fn table_with_workers(m: usize) -> AnnotationTable {
        AnnotationTable::from_records(
            (0..m).map(|w| AnnotationRecord::new("t", &format!("w{w}"), [Joy])),
        )
        .unwrap()
    }

    #[test]
    fn pair_counts() {
        assert_eq!(enumerate_ab_pairs(&table_with_workers(3)).len(), 3);
        assert_eq!(enumerate_ab_pairs(&table_with_workers(5)).len(), 30);
        assert_eq!(ab_pair_count(5), 30);
        assert_eq!(ab_pair_count(2), 0);
        for p in enumerate_ab_pairs(&table_with_workers(4)) {
            assert!(
                p.first != p.second && p.first != p.shared_worker && p.second != p.shared_worker
            );
        }
    }

    #[test]
    fn hit_batching() {
        let pairs = enumerate_ab_pairs(&table_with_workers(4));
        assert_eq!(pairs.len(), 12);
        let s = sample_hits(&pairs, 12, 10, 7).unwrap();
        assert_eq!(s.batches.iter().map(Vec::len).collect::<Vec<_>>(), [10, 2]);
        assert_eq!(s.warnings.len(), 1);
        assert_eq!(sample_hits(&pairs, 12, 10, 7).unwrap(), s);
        assert!(sample_hits(&[], 1, 10, 7).is_err());
        assert!(sample_hits(&pairs, 13, 10, 7).is_err());

        let texts = BTreeMap::from([("t".to_string(), "hello".to_string())]);
        let files = hit_files(&s, &table_with_workers(4), &texts).unwrap();
        assert_eq!(files[1].hit_id, "hit-0001");
        assert_eq!(files[0].pairs[0].item_text, "hello");
    }

    #[test]
    fn ranking() {
        let t = AnnotationTable::from_records([
            AnnotationRecord::new("i", "s", [Joy]),
            AnnotationRecord::new("i", "x", [Joy]),
            AnnotationRecord::new("i", "y", [Grief]),
        ])
        .unwrap();
        let pair = |first: &str, second: &str| AbPair {
            item_id: "i".into(),
            shared_worker: "s".into(),
            first: first.into(),
            second: second.into(),
        };
        assert_eq!(
            pea_rank(&pair("x", "y"), &t, Variant::Symmetric).unwrap(),
            Ranking::AHigher
        );
        assert_eq!(
            pea_rank(&pair("y", "x"), &t, Variant::Symmetric).unwrap(),
            Ranking::BHigher
        );
        assert_eq!(
            pea_rank(&pair("x", "x"), &t, Variant::Symmetric).unwrap(),
            Ranking::Same
        );
        assert!(pea_rank(&pair("x", "nobody"), &t, Variant::Symmetric).is_err());
    }
}
