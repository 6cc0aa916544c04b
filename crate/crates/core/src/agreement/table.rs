use std::collections::{BTreeMap, BTreeSet};
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::{EmotionSet, ItemId, WorkerId};
use crate::error::{Error, Result};
use crate::wheel::Emotion24;

/// One worker's emotion set for one item.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotationRecord {
    pub item_id: ItemId,
    pub worker_id: WorkerId,
    pub emotions: EmotionSet,
}

impl AnnotationRecord {
    pub fn new(
        item_id: &str,
        worker_id: &str,
        emotions: impl IntoIterator<Item = Emotion24>,
    ) -> Self {
        AnnotationRecord {
            item_id: item_id.into(),
            worker_id: worker_id.into(),
            emotions: emotions.into_iter().collect(),
        }
    }
}

/// Wire shape of an annotation line. Labels are parsed by hand so unknown
/// names surface with the offending string.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRecord {
    item_id: String,
    worker_id: String,
    emotions: Vec<String>,
}

/// All annotations, keyed item → worker → emotion set.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AnnotationTable {
    items: BTreeMap<ItemId, BTreeMap<WorkerId, EmotionSet>>,
}

impl AnnotationTable {
    /// Adds a record. Empty sets and repeated (item, worker) pairs are errors.
    pub fn insert(&mut self, record: AnnotationRecord) -> Result<()> {
        if record.emotions.is_empty() {
            return Err(Error::EmptySet("emotions"));
        }
        let workers = self.items.entry(record.item_id.clone()).or_default();
        if workers.contains_key(&record.worker_id) {
            return Err(Error::DuplicateAnnotation {
                item: record.item_id.0,
                worker: record.worker_id.0,
            });
        }
        workers.insert(record.worker_id, record.emotions);
        Ok(())
    }

    pub fn from_records(records: impl IntoIterator<Item = AnnotationRecord>) -> Result<Self> {
        let mut table = AnnotationTable::default();
        for r in records {
            table.insert(r)?;
        }
        Ok(table)
    }

    /// Reads JSON-lines `{item_id, worker_id, emotions}`. Blank lines are
    /// skipped; every error carries its 1-based line number.
    pub fn read_jsonl<R: BufRead>(reader: R) -> Result<Self> {
        let mut table = AnnotationTable::default();
        for (idx, line) in reader.lines().enumerate() {
            let lineno = idx + 1;
            let line = line.map_err(|e| Error::Parse {
                line: lineno,
                message: e.to_string(),
            })?;
            if line.trim().is_empty() {
                continue;
            }
            let at = |message: String| Error::Parse {
                line: lineno,
                message,
            };
            let raw: RawRecord = serde_json::from_str(&line).map_err(|e| at(e.to_string()))?;
            let emotions = raw
                .emotions
                .iter()
                .map(|s| s.parse::<Emotion24>())
                .collect::<Result<EmotionSet>>()
                .map_err(|e| at(e.to_string()))?;
            table
                .insert(AnnotationRecord {
                    item_id: ItemId(raw.item_id),
                    worker_id: WorkerId(raw.worker_id),
                    emotions,
                })
                .map_err(|e| at(e.to_string()))?;
        }
        Ok(table)
    }

    pub fn write_jsonl<W: Write>(&self, mut w: W) -> Result<()> {
        for record in self.records() {
            serde_json::to_writer(&mut w, &record)?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn items(&self) -> impl Iterator<Item = (&ItemId, &BTreeMap<WorkerId, EmotionSet>)> {
        self.items.iter()
    }

    pub fn item(&self, id: &ItemId) -> Option<&BTreeMap<WorkerId, EmotionSet>> {
        self.items.get(id)
    }

    pub fn get(&self, item: &ItemId, worker: &WorkerId) -> Option<&EmotionSet> {
        self.items.get(item).and_then(|w| w.get(worker))
    }

    pub fn records(&self) -> impl Iterator<Item = AnnotationRecord> + '_ {
        self.items.iter().flat_map(|(item, workers)| {
            workers
                .iter()
                .map(move |(worker, emotions)| AnnotationRecord {
                    item_id: item.clone(),
                    worker_id: worker.clone(),
                    emotions: emotions.clone(),
                })
        })
    }

    pub fn workers(&self) -> BTreeSet<WorkerId> {
        self.items
            .values()
            .flat_map(|w| w.keys().cloned())
            .collect()
    }

    pub fn len(&self) -> usize {
        self.items.values().map(BTreeMap::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn item_count(&self) -> usize {
        self.items.len()
    }

    /// Copy of the table without any annotation by `dropped` workers. Items
    /// left with no annotators disappear.
    pub fn without_workers(&self, dropped: &BTreeSet<WorkerId>) -> Self {
        let items = self
            .items
            .iter()
            .filter_map(|(item, workers)| {
                let kept: BTreeMap<_, _> = workers
                    .iter()
                    .filter(|(w, _)| !dropped.contains(*w))
                    .map(|(w, s)| (w.clone(), s.clone()))
                    .collect();
                (!kept.is_empty()).then(|| (item.clone(), kept))
            })
            .collect();
        AnnotationTable { items }
    }

    /// Per-item value lists for reliability coefficients, in worker order.
    pub fn units(&self) -> Vec<Vec<EmotionSet>> {
        self.items
            .values()
            .map(|w| w.values().cloned().collect())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_and_dedups_sets() {
        let input = r#"{"item_id":"t1","worker_id":"a","emotions":["joy","Joy","anyce"]}

{"item_id":"t1","worker_id":"b","emotions":["grief"]}
"#;
        let t = AnnotationTable::read_jsonl(input.as_bytes()).unwrap();
        assert_eq!(t.len(), 2);
        let a = t.get(&"t1".into(), &"a".into()).unwrap();
        assert_eq!(a.len(), 2);
    }

    #[test]
    fn duplicate_pair_is_an_error_with_line() {
        let input = "{\"item_id\":\"t1\",\"worker_id\":\"a\",\"emotions\":[\"joy\"]}\n\
                     {\"item_id\":\"t1\",\"worker_id\":\"a\",\"emotions\":[\"fear\"]}\n";
        match AnnotationTable::read_jsonl(input.as_bytes()) {
            Err(Error::Parse { line, message }) => {
                assert_eq!(line, 2);
                assert!(message.contains("duplicate"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_and_empty_labels() {
        let bad = r#"{"item_id":"t1","worker_id":"a","emotions":["happyness"]}"#;
        let err = AnnotationTable::read_jsonl(bad.as_bytes()).unwrap_err();
        assert!(err.to_string().contains("happyness"));
        let empty = r#"{"item_id":"t1","worker_id":"a","emotions":[]}"#;
        assert!(AnnotationTable::read_jsonl(empty.as_bytes()).is_err());
        let group = r#"{"item_id":"t1","worker_id":"a","emotions":["love"]}"#;
        assert!(AnnotationTable::read_jsonl(group.as_bytes()).is_err());
    }

    #[test]
    fn jsonl_round_trip() {
        let mut t = AnnotationTable::default();
        t.insert(AnnotationRecord::new(
            "x",
            "w",
            [Emotion24::Fear, Emotion24::Joy],
        ))
        .unwrap();
        t.insert(AnnotationRecord::new("y", "w", [Emotion24::Rage]))
            .unwrap();
        let mut buf = Vec::new();
        t.write_jsonl(&mut buf).unwrap();
        assert_eq!(AnnotationTable::read_jsonl(&buf[..]).unwrap(), t);
    }

    #[test]
    fn dropping_workers() {
        let t = AnnotationTable::from_records([
            AnnotationRecord::new("x", "a", [Emotion24::Joy]),
            AnnotationRecord::new("x", "b", [Emotion24::Joy]),
            AnnotationRecord::new("y", "b", [Emotion24::Joy]),
        ])
        .unwrap();
        let dropped = [WorkerId::from("b")].into();
        let kept = t.without_workers(&dropped);
        assert_eq!(kept.len(), 1);
        assert_eq!(kept.item_count(), 1);
    }
}
