use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use std::path::Path;

use pea_core::agreement::{
    aggregate_labels, corpus_pea, filter_workers as split_workers, AnnotationTable, PeaOptions,
    Variant, Weighting,
};
use pea_core::analytics::{
    cooccurrence, emotion_distribution, jsd as divergence, top_k_density, write_distribution_csv,
    LogBase, SubwordVocab, TokenCounts, TokenDistribution, Tokenizer,
};
use pea_core::calibration::{
    enumerate_ab_pairs, hit_files, interpret, random_baseline, sample_hits, write_histogram_csv,
    BaselineParams,
};
use pea_core::corpus::{
    dedup, lexicon_filter, read_tweets_jsonl, render_stats_table, stats_by_source,
    write_tweets_jsonl, DedupKey, Lexicon, TweetRecord,
};
use pea_core::tasks::{build_binary_tasks, published_split, verify_split_dir, NegativePolicy};
use pea_core::Emotion8;
use serde_json::json;

use crate::manifest::{create, create_dir, finish, open, resolve_seed, Failure, Manifest};
use crate::{
    AbPairsArgs, AggregateArgs, CalibrateArgs, CooccurArgs, DistributionArgs, FilterWorkersArgs,
    JsdArgs, LexfilterArgs, LogBaseArg, PeaArgs, PreprocessArgs, StatsArgs, TasksBuildArgs,
    TasksVerifyArgs,
};

fn read_tweets(path: &Path) -> Result<Vec<TweetRecord>, Failure> {
    read_tweets_jsonl(open(path)?).map_err(|e| Failure::at(path, e))
}

fn read_annotations(path: &Path) -> Result<AnnotationTable, Failure> {
    AnnotationTable::read_jsonl(open(path)?).map_err(|e| Failure::at(path, e))
}

fn write_tweets(tweets: &[TweetRecord], path: &Path) -> Result<(), Failure> {
    let mut w = create(path)?;
    write_tweets_jsonl(tweets, &mut w)?;
    finish(w, path)
}

fn write_json(value: &serde_json::Value, path: &Path) -> Result<(), Failure> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(pea_core::Error::from)?;
    w.write_all(b"\n").map_err(pea_core::Error::from)?;
    finish(w, path)
}

fn labeled_sets(
    tweets: &[TweetRecord],
) -> impl Iterator<Item = (&TweetRecord, &pea_core::agreement::EmotionSet)> {
    tweets
        .iter()
        .filter_map(|t| t.labels.as_ref().map(|l| (t, l)))
}

fn source_of(t: &TweetRecord) -> String {
    t.source.clone().unwrap_or_else(|| "-".to_string())
}

fn variant(symmetric: bool) -> Variant {
    if symmetric {
        Variant::Symmetric
    } else {
        Variant::Directed
    }
}

pub fn preprocess(a: PreprocessArgs) -> Result<(), Failure> {
    let tweets = read_tweets(&a.input)?;
    let read = tweets.len();
    let key = if a.raw_dedup {
        DedupKey::Raw
    } else {
        DedupKey::Normalized
    };
    let kept = dedup(tweets, key);
    write_tweets(&kept, &a.output)?;
    Manifest::new("preprocess")
        .input(&a.input)
        .output(&a.output)
        .parameters(json!({ "dedup": if a.raw_dedup { "raw" } else { "normalized" } }))
        .results(
            json!({ "read": read, "kept": kept.len(), "duplicates_removed": read - kept.len() }),
        )
        .write(&a.output)
}

pub fn lexfilter(a: LexfilterArgs) -> Result<(), Failure> {
    let tweets = read_tweets(&a.input)?;
    let read = tweets.len();
    let lexicon = Lexicon::read_tsv(open(&a.lexicon)?).map_err(|e| Failure::at(&a.lexicon, e))?;
    let filtered = lexicon_filter(tweets, &lexicon);
    write_tweets(&filtered.kept, &a.output)?;
    Manifest::new("lexfilter")
        .input(&a.input)
        .input(&a.lexicon)
        .output(&a.output)
        .parameters(json!({ "ignored_categories": pea_core::corpus::SENTIMENT_CATEGORIES }))
        .results(
            json!({ "read": read, "kept": filtered.kept.len(), "lexicon_words": lexicon.len() }),
        )
        .warnings(filtered.warnings)
        .write(&a.output)
}

pub fn stats(a: StatsArgs) -> Result<(), Failure> {
    let mut corpus = Vec::new();
    let mut manifest = Manifest::new("stats");
    for path in &a.input {
        let stem = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        for mut t in read_tweets(path)? {
            t.source.get_or_insert_with(|| stem.clone());
            corpus.push(t);
        }
        manifest = manifest.input(path);
    }
    let rows = stats_by_source(&corpus);
    write_json(
        &serde_json::to_value(&rows).map_err(pea_core::Error::from)?,
        &a.output,
    )?;
    print!("{}", render_stats_table(&rows));
    manifest
        .output(&a.output)
        .parameters(json!({ "source_default": "file stem" }))
        .results(json!({ "tweets": corpus.len() }))
        .write(&a.output)
}

pub fn pea(a: PeaArgs) -> Result<(), Failure> {
    let table = read_annotations(&a.input)?;
    let options = PeaOptions {
        variant: variant(a.symmetric),
        weighting: if a.worker_item {
            Weighting::WorkerItem
        } else {
            Weighting::Worker
        },
    };
    let report = corpus_pea(&table, options)?;
    write_json(&report.to_json(), &a.output)?;
    print!("{}", report.render_table());
    Manifest::new("pea")
        .input(&a.input)
        .output(&a.output)
        .parameters(json!({ "variant": options.variant, "weighting": options.weighting }))
        .results(json!({
            "corpus_mean": report.corpus_mean,
            "workers": report.per_worker.len(),
            "items_scored": report.items_scored,
            "items_skipped": report.items_skipped,
        }))
        .warnings(report.warnings.clone())
        .write(&a.output)
}

pub fn filter_workers(a: FilterWorkersArgs) -> Result<(), Failure> {
    let table = read_annotations(&a.input)?;
    let options = PeaOptions {
        variant: variant(a.symmetric),
        ..Default::default()
    };
    let before = corpus_pea(&table, options)?;
    let split = split_workers(&before, a.threshold)?;
    let filtered = table.without_workers(&split.dropped);
    let mut w = create(&a.output)?;
    filtered.write_jsonl(&mut w)?;
    finish(w, &a.output)?;
    let mut warnings = before.warnings.clone();
    let after = if filtered.is_empty() {
        warnings.push("every worker was dropped".into());
        None
    } else {
        Some(corpus_pea(&filtered, options)?.corpus_mean)
    };
    println!(
        "kept {} workers, dropped {} (threshold {})",
        split.kept.len(),
        split.dropped.len(),
        a.threshold
    );
    Manifest::new("filter-workers")
        .input(&a.input)
        .output(&a.output)
        .parameters(json!({ "threshold": a.threshold, "variant": options.variant, "rule": "drop if pea <= threshold" }))
        .results(json!({
            "kept": split.kept,
            "dropped": split.dropped,
            "pea_before": before.corpus_mean,
            "pea_kept_workers": before.mean_over(&split.kept),
            "pea_after_rescore": after,
        }))
        .warnings(warnings)
        .write(&a.output)
}

pub fn aggregate(a: AggregateArgs) -> Result<(), Failure> {
    let table = read_annotations(&a.input)?;
    let agg = aggregate_labels(&table, a.min_votes)?;
    let mut warnings: Vec<String> = agg
        .flagged_empty
        .iter()
        .map(|item| {
            format!(
                "item `{item}` has no emotion with {} votes; omitted",
                a.min_votes
            )
        })
        .collect();
    let mut manifest = Manifest::new("aggregate").input(&a.input);
    let written = match &a.tweets {
        Some(path) => {
            manifest = manifest.input(path);
            let mut out = Vec::new();
            let mut matched = BTreeSet::new();
            for mut t in read_tweets(path)? {
                let id = pea_core::agreement::ItemId(t.id.clone());
                if let Some(labels) = agg.labels.get(&id).filter(|l| !l.is_empty()) {
                    t.labels = Some(labels.clone());
                    matched.insert(id);
                    out.push(t);
                }
            }
            for item in agg.labels.keys() {
                if !matched.contains(item) && !agg.flagged_empty.contains(item) {
                    warnings.push(format!("item `{item}` has no tweet text; omitted"));
                }
            }
            write_tweets(&out, &a.output)?;
            out.len()
        }
        None => {
            let mut w = create(&a.output)?;
            let mut n = 0;
            for (item, labels) in agg.labels.iter().filter(|(_, l)| !l.is_empty()) {
                serde_json::to_writer(&mut w, &json!({ "item_id": item, "emotions": labels }))
                    .map_err(pea_core::Error::from)?;
                w.write_all(b"\n").map_err(pea_core::Error::from)?;
                n += 1;
            }
            finish(w, &a.output)?;
            n
        }
    };
    manifest
        .output(&a.output)
        .parameters(json!({ "min_votes": a.min_votes }))
        .results(json!({ "items": agg.labels.len(), "written": written, "flagged_empty": agg.flagged_empty }))
        .warnings(warnings)
        .write(&a.output)
}

pub fn distribution(a: DistributionArgs) -> Result<(), Failure> {
    let tweets = read_tweets(&a.input)?;
    let mut by_source: BTreeMap<String, Vec<&pea_core::agreement::EmotionSet>> = BTreeMap::new();
    for (t, labels) in labeled_sets(&tweets) {
        by_source.entry(source_of(t)).or_default().push(labels);
        by_source.entry("all".into()).or_default().push(labels);
    }
    let rows: BTreeMap<_, _> = by_source
        .into_iter()
        .map(|(k, sets)| (k, emotion_distribution(sets)))
        .collect();
    let mut w = create(&a.output)?;
    write_distribution_csv(&rows, &mut w)?;
    finish(w, &a.output)?;
    let unlabeled = tweets.iter().filter(|t| t.labels.is_none()).count();
    Manifest::new("distribution")
        .input(&a.input)
        .output(&a.output)
        .parameters(json!({ "unit": "fine-grained emotion" }))
        .results(json!({ "sources": rows.len(), "unlabeled_skipped": unlabeled }))
        .write(&a.output)
}

pub fn cooccur(a: CooccurArgs) -> Result<(), Failure> {
    let tweets = read_tweets(&a.input)?;
    let matrix = cooccurrence(labeled_sets(&tweets).map(|(_, l)| l));
    let mut w = create(&a.output)?;
    matrix.write_csv(&mut w)?;
    finish(w, &a.output)?;
    print!("{}", matrix.render_lower());
    Manifest::new("cooccur")
        .input(&a.input)
        .output(&a.output)
        .parameters(json!({ "unit": "wheel group", "diagonal": "items containing the group" }))
        .results(json!({ "items": labeled_sets(&tweets).count() }))
        .write(&a.output)
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "corpus".into())
}

pub fn jsd(a: JsdArgs) -> Result<(), Failure> {
    let tokenizer = match &a.vocab {
        Some(path) => Tokenizer::Subword {
            vocab: SubwordVocab::read(open(path)?).map_err(|e| Failure::at(path, e))?,
            lowercase: a.lowercase,
        },
        None => Tokenizer::Whitespace,
    };
    let base = match a.log_base {
        LogBaseArg::Two => LogBase::Two,
        LogBaseArg::E => LogBase::E,
    };
    let ta = read_tweets(&a.input)?;
    let tb = read_tweets(&a.other)?;
    let ca = TokenCounts::from_texts(ta.iter().map(|t| t.text.as_str()), &tokenizer);
    let cb = TokenCounts::from_texts(tb.iter().map(|t| t.text.as_str()), &tokenizer);
    let value = divergence(
        &TokenDistribution::from_counts(&ca).map_err(|e| Failure::at(&a.input, e))?,
        &TokenDistribution::from_counts(&cb).map_err(|e| Failure::at(&a.other, e))?,
        base,
    );
    let density = top_k_density(&ca, &cb, a.top_k)?;
    let mut w = create(&a.output)?;
    density.write_csv(&mut w, &stem(&a.input), &stem(&a.other))?;
    finish(w, &a.output)?;
    println!("jsd = {value:.6}");
    let mut manifest = Manifest::new("jsd").input(&a.input).input(&a.other);
    if let Some(v) = &a.vocab {
        manifest = manifest.input(v);
    }
    manifest
        .output(&a.output)
        .parameters(json!({
            "tokenizer": if a.vocab.is_some() { "subword" } else { "whitespace" },
            "lowercase": a.lowercase,
            "log_base": base,
            "top_k": a.top_k,
        }))
        .results(json!({ "jsd": value, "tokens_a": ca.total(), "tokens_b": cb.total() }))
        .warnings(density.warnings)
        .write(&a.output)
}

pub fn tasks_build(a: TasksBuildArgs) -> Result<(), Failure> {
    let tweets = read_tweets(&a.input)?;
    let seed = resolve_seed(a.seed);
    let policy = if a.keep_all_negatives {
        NegativePolicy::KeepAll
    } else {
        NegativePolicy::Balanced
    };
    let built = build_binary_tasks(&tweets, seed.0, policy)?;
    create_dir(&a.output)?;
    let mut counts = BTreeMap::new();
    for task in &built.tasks {
        task.write_dir(&a.output)
            .map_err(|e| Failure::at(&a.output, e))?;
        counts.insert(task.emotion.clone(), task.counts());
    }
    Manifest::new("tasks-build")
        .input(&a.input)
        .output(&a.output)
        .parameters(json!({ "negative_policy": policy }))
        .seed(seed)
        .results(json!({ "tasks": counts }))
        .warnings(built.warnings)
        .write(&a.output)
}

pub fn tasks_verify(a: TasksVerifyArgs) -> Result<(), Failure> {
    let groups: Vec<Emotion8> = if a.emotion.is_empty() {
        Emotion8::ALL.to_vec()
    } else {
        a.emotion
            .iter()
            .map(|e| e.parse::<Emotion8>())
            .collect::<Result<_, _>>()?
    };
    let mut reports = Vec::new();
    for g in groups {
        let expected = a.published.then(|| published_split(g));
        reports.push(verify_split_dir(&a.input, g.name(), expected)?);
    }
    let failed: Vec<&str> = reports
        .iter()
        .filter(|r| !r.passed())
        .map(|r| r.emotion.as_str())
        .collect();
    write_json(
        &serde_json::to_value(&reports).map_err(pea_core::Error::from)?,
        &a.output,
    )?;
    for r in &reports {
        println!(
            "{:<16} {}",
            r.emotion,
            if r.passed() { "ok" } else { "FAILED" }
        );
    }
    Manifest::new("tasks-verify")
        .input(&a.input)
        .output(&a.output)
        .parameters(json!({ "published_counts": a.published }))
        .results(json!({ "passed": failed.is_empty(), "failed": failed }))
        .write(&a.output)?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::data(
            "verification",
            format!("split checks failed for {}", failed.join(", ")),
        ))
    }
}

pub fn calibrate(a: CalibrateArgs) -> Result<(), Failure> {
    let seed = resolve_seed(a.seed);
    let params = BaselineParams {
        n_annotations: a.annotations,
        emotions_per_annotation: a.emotions,
        workers_per_item: a.workers,
        bins: a.bins,
    };
    let result = random_baseline(params, seed.0)?;
    let mut w = create(&a.output)?;
    write_histogram_csv(&result.histogram, &mut w)?;
    finish(w, &a.output)?;
    let band = interpret(result.mean)?;
    println!(
        "random-annotator mean PEA = {:.4} ({})",
        result.mean,
        band.label()
    );
    Manifest::new("calibrate")
        .output(&a.output)
        .parameters(serde_json::to_value(params).map_err(pea_core::Error::from)?)
        .seed(seed)
        .results(
            json!({ "mean": result.mean, "workers": result.scores.len(), "band": band.label() }),
        )
        .warnings(result.warnings)
        .write(&a.output)
}

pub fn ab_pairs(a: AbPairsArgs) -> Result<(), Failure> {
    let table = read_annotations(&a.input)?;
    let mut manifest = Manifest::new("ab-pairs").input(&a.input);
    let texts: BTreeMap<String, String> = match &a.tweets {
        Some(path) => {
            manifest = manifest.input(path);
            read_tweets(path)?
                .into_iter()
                .map(|t| (t.id, t.text))
                .collect()
        }
        None => BTreeMap::new(),
    };
    let seed = resolve_seed(a.seed);
    let pool = enumerate_ab_pairs(&table);
    let sample = sample_hits(&pool, a.sample, a.per_hit, seed.0)?;
    let files = hit_files(&sample, &table, &texts)?;
    create_dir(&a.output)?;
    let index_path = a.output.join("pairs.jsonl");
    let mut index = create(&index_path)?;
    for (hit, batch) in files.iter().zip(&sample.batches) {
        let path = a.output.join(format!("{}.json", hit.hit_id));
        write_json(
            &serde_json::to_value(hit).map_err(pea_core::Error::from)?,
            &path,
        )?;
        for pair in batch {
            serde_json::to_writer(&mut index, &json!({ "hit_id": hit.hit_id, "pair": pair }))
                .map_err(pea_core::Error::from)?;
            index.write_all(b"\n").map_err(pea_core::Error::from)?;
        }
    }
    finish(index, &index_path)?;
    let mut warnings = sample.warnings;
    if a.tweets.is_none() {
        warnings.push("no tweet file given; item_text left empty".into());
    }
    manifest
        .output(&a.output)
        .parameters(json!({ "sample": a.sample, "pairs_per_hit": a.per_hit }))
        .seed(seed)
        .results(json!({ "pool": pool.len(), "hits": files.len() }))
        .warnings(warnings)
        .write(&a.output)
}
