//! Descriptive analyses over labeled corpora: fine-grained emotion counts,
//! wheel-group co-occurrence, and Jensen–Shannon divergence between token
//! distributions.

mod tokenize;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::io::Write;

use serde::Serialize;

use crate::agreement::EmotionSet;
use crate::error::{Error, Result};
use crate::wheel::{Emotion24, Emotion8};

pub use tokenize::{SubwordVocab, Tokenizer, CONTINUATION, UNKNOWN};

/// Count of items carrying each fine-grained emotion.
pub fn emotion_distribution<'a, I>(label_sets: I) -> BTreeMap<Emotion24, u64>
where
    I: IntoIterator<Item = &'a EmotionSet>,
{
    let mut counts: BTreeMap<Emotion24, u64> = Emotion24::ALL.iter().map(|&e| (e, 0)).collect();
    for set in label_sets {
        for e in set {
            *counts.get_mut(e).unwrap() += 1;
        }
    }
    counts
}

/// Symmetric 8×8 item-count matrix over wheel groups. The diagonal counts
/// items whose group set contains that group.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct CooccurrenceMatrix {
    pub counts: [[u64; 8]; 8],
}

fn group_index(g: Emotion8) -> usize {
    Emotion8::ALL.iter().position(|&x| x == g).unwrap()
}

impl CooccurrenceMatrix {
    pub fn get(&self, a: Emotion8, b: Emotion8) -> u64 {
        self.counts[group_index(a)][group_index(b)]
    }

    pub fn merge(mut self, other: &CooccurrenceMatrix) -> Self {
        for i in 0..8 {
            for j in 0..8 {
                self.counts[i][j] += other.counts[i][j];
            }
        }
        self
    }

    pub fn is_symmetric(&self) -> bool {
        (0..8).all(|i| (0..8).all(|j| self.counts[i][j] == self.counts[j][i]))
    }

    /// Full matrix as CSV with group abbreviations as headers.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let mut header = vec![""];
        header.extend(Emotion8::ALL.iter().map(|g| g.abbrev()));
        out.write_record(&header)?;
        for (i, g) in Emotion8::ALL.iter().enumerate() {
            let mut row = vec![g.abbrev().to_string()];
            row.extend(self.counts[i].iter().map(u64::to_string));
            out.write_record(&row)?;
        }
        out.flush()?;
        Ok(())
    }

    /// Lower triangle (diagonal included) for reading at a terminal.
    pub fn render_lower(&self) -> String {
        let mut out = String::from("     ");
        for g in Emotion8::ALL {
            let _ = write!(out, " {:>6}", g.abbrev());
        }
        out.push('\n');
        for (i, g) in Emotion8::ALL.iter().enumerate() {
            let _ = write!(out, "{:<5}", g.abbrev());
            for j in 0..8 {
                if j <= i {
                    let _ = write!(out, " {:>6}", self.counts[i][j]);
                } else {
                    let _ = write!(out, " {:>6}", "");
                }
            }
            out.push('\n');
        }
        out
    }
}

pub fn groups_of(set: &EmotionSet) -> BTreeSet<Emotion8> {
    set.iter().map(|e| e.group()).collect()
}

pub fn cooccurrence<'a, I>(label_sets: I) -> CooccurrenceMatrix
where
    I: IntoIterator<Item = &'a EmotionSet>,
{
    let mut m = CooccurrenceMatrix::default();
    for set in label_sets {
        let groups: Vec<usize> = groups_of(set).into_iter().map(group_index).collect();
        for (a, &i) in groups.iter().enumerate() {
            m.counts[i][i] += 1;
            for &j in &groups[a + 1..] {
                m.counts[i][j] += 1;
                m.counts[j][i] += 1;
            }
        }
    }
    m
}

/// Distribution rows as CSV: one row per named series, one column per
/// fine-grained emotion abbreviation.
pub fn write_distribution_csv<W: Write>(
    rows: &BTreeMap<String, BTreeMap<Emotion24, u64>>,
    w: W,
) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let mut header = vec!["source"];
    header.extend(Emotion24::ALL.iter().map(|e| e.abbrev()));
    out.write_record(&header)?;
    for (name, counts) in rows {
        let mut row = vec![name.clone()];
        row.extend(Emotion24::ALL.iter().map(|e| counts[e].to_string()));
        out.write_record(&row)?;
    }
    out.flush()?;
    Ok(())
}

/// Raw token occurrence counts.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TokenCounts {
    pub counts: BTreeMap<String, u64>,
}

impl TokenCounts {
    pub fn from_texts<'a>(texts: impl IntoIterator<Item = &'a str>, tokenizer: &Tokenizer) -> Self {
        let mut counts = BTreeMap::new();
        for text in texts {
            for tok in tokenizer.tokenize(text) {
                *counts.entry(tok).or_insert(0u64) += 1;
            }
        }
        TokenCounts { counts }
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn merge(mut self, other: &TokenCounts) -> Self {
        for (t, n) in &other.counts {
            *self.counts.entry(t.clone()).or_insert(0) += n;
        }
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TokenDistribution {
    probs: BTreeMap<String, f64>,
}

impl TokenDistribution {
    /// Validates non-negativity and that the mass sums to 1 within 1e-9.
    pub fn new(probs: BTreeMap<String, f64>) -> Result<Self> {
        if let Some((t, p)) = probs
            .iter()
            .find(|(_, p)| p.is_nan() || **p < 0.0 || !p.is_finite())
        {
            return Err(Error::InvalidDistribution(format!(
                "token `{t}` has probability {p}"
            )));
        }
        let total: f64 = probs.values().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {total}"
            )));
        }
        Ok(TokenDistribution { probs })
    }

    pub fn from_counts(counts: &TokenCounts) -> Result<Self> {
        let total = counts.total();
        if total == 0 {
            return Err(Error::InvalidDistribution("no tokens".into()));
        }
        let probs = counts
            .counts
            .iter()
            .filter(|(_, &n)| n > 0)
            .map(|(t, &n)| (t.clone(), n as f64 / total as f64))
            .collect();
        TokenDistribution::new(probs)
    }

    pub fn probs(&self) -> &BTreeMap<String, f64> {
        &self.probs
    }

    pub fn get(&self, token: &str) -> f64 {
        self.probs.get(token).copied().unwrap_or(0.0)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LogBase {
    #[default]
    Two,
    E,
}

impl LogBase {
    fn log(self, x: f64) -> f64 {
        match self {
            LogBase::Two => x.log2(),
            LogBase::E => x.ln(),
        }
    }
}

/// Jensen–Shannon divergence, ½KL(A‖M) + ½KL(B‖M) with M = ½(A + B).
/// Bounded by 1 in base 2.
pub fn jsd(a: &TokenDistribution, b: &TokenDistribution, base: LogBase) -> f64 {
    let support: BTreeSet<&String> = a.probs.keys().chain(b.probs.keys()).collect();
    let mut total = 0.0;
    for tok in support {
        let p = a.get(tok);
        let q = b.get(tok);
        let m = (p + q) / 2.0;
        let mut term = 0.0;
        if p > 0.0 {
            term += p * base.log(p / m);
        }
        if q > 0.0 {
            term += q * base.log(q / m);
        }
        total += term / 2.0;
    }
    total.max(0.0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityRow {
    pub token: String,
    pub density_a: f64,
    pub density_b: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityTable {
    pub rows: Vec<DensityRow>,
    pub warnings: Vec<String>,
}

/// Densities of the `k` most frequent tokens shared by both corpora, each
/// side normalized over that shared set, ordered by combined count.
pub fn top_k_density(a: &TokenCounts, b: &TokenCounts, k: usize) -> Result<DensityTable> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    let mut shared: Vec<(&String, u64, u64)> = a
        .counts
        .iter()
        .filter(|(_, &n)| n > 0)
        .filter_map(|(t, &na)| b.counts.get(t).filter(|&&nb| nb > 0).map(|&nb| (t, na, nb)))
        .collect();
    let mut warnings = Vec::new();
    if shared.len() < k {
        warnings.push(format!(
            "only {} shared tokens, fewer than k = {k}; using all of them",
            shared.len()
        ));
    }
    shared.sort_by(|x, y| (y.1 + y.2).cmp(&(x.1 + x.2)).then_with(|| x.0.cmp(y.0)));
    shared.truncate(k);
    let sum_a: u64 = shared.iter().map(|r| r.1).sum();
    let sum_b: u64 = shared.iter().map(|r| r.2).sum();
    let rows = shared
        .into_iter()
        .map(|(t, na, nb)| DensityRow {
            token: t.clone(),
            density_a: na as f64 / sum_a as f64,
            density_b: nb as f64 / sum_b as f64,
        })
        .collect();
    Ok(DensityTable { rows, warnings })
}

impl DensityTable {
    pub fn write_csv<W: Write>(&self, w: W, label_a: &str, label_b: &str) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record([
            format!("token_{label_a}"),
            format!("density_{label_a}"),
            format!("token_{label_b}"),
            format!("density_{label_b}"),
        ])?;
        for r in &self.rows {
            out.write_record([
                r.token.clone(),
                r.density_a.to_string(),
                r.token.clone(),
                r.density_b.to_string(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wheel::Emotion24::*;
    use proptest::prelude::*;

    fn set(items: &[Emotion24]) -> EmotionSet {
        items.iter().copied().collect()
    }

    fn dist(pairs: &[(&str, f64)]) -> TokenDistribution {
        TokenDistribution::new(pairs.iter().map(|(t, p)| (t.to_string(), *p)).collect()).unwrap()
    }

    fn counts(pairs: &[(&str, u64)]) -> TokenCounts {
        TokenCounts {
            counts: pairs.iter().map(|(t, n)| (t.to_string(), *n)).collect(),
        }
    }

    #[test]
    fn distribution_counts() {
        let sets = [set(&[Joy, Anger])];
        let d = emotion_distribution(&sets);
        assert_eq!(d[&Joy], 1);
        assert_eq!(d[&Anger], 1);
        assert_eq!(d.values().sum::<u64>(), 2);
        let empty: [EmotionSet; 0] = [];
        assert!(emotion_distribution(&empty).values().all(|&n| n == 0));
    }

    #[test]
    fn cooccurrence_pairs() {
        let sets = [set(&[Joy, Interest]), set(&[Joy, Ecstasy])];
        let m = cooccurrence(&sets);
        assert_eq!(m.get(Emotion8::Love, Emotion8::Optimism), 1);
        assert_eq!(m.get(Emotion8::Optimism, Emotion8::Love), 1);
        // two love items; the second has one group only
        assert_eq!(m.get(Emotion8::Love, Emotion8::Love), 2);
        assert!(m.is_symmetric());
    }

    #[test]
    fn cooccurrence_csv_header() {
        let m = cooccurrence(&[set(&[Rage])]);
        let mut buf = Vec::new();
        m.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with(",agrsv,optsm,love,sbmsn,awe,dspvl,rmrse,cntmp\n"));
        assert!(text.contains("agrsv,1,0,0"));
        assert!(m.render_lower().lines().count() == 9);
    }

    #[test]
    fn jsd_examples() {
        let a = dist(&[("x", 0.5), ("y", 0.5)]);
        let b = dist(&[("z", 1.0)]);
        assert_eq!(jsd(&a, &a, LogBase::Two), 0.0);
        assert!((jsd(&a, &b, LogBase::Two) - 1.0).abs() < 1e-12);
        assert!((jsd(&a, &b, LogBase::E) - std::f64::consts::LN_2).abs() < 1e-12);
    }

    #[test]
    fn distribution_validation() {
        assert!(TokenDistribution::new([("a".to_string(), 0.7)].into()).is_err());
        assert!(
            TokenDistribution::new([("a".to_string(), -0.5), ("b".to_string(), 1.5)].into())
                .is_err()
        );
        assert!(TokenDistribution::from_counts(&TokenCounts::default()).is_err());
    }

    #[test]
    fn toy_density_by_hand() {
        // shared {a, b}; a: 2+1=3, b: 1+3=4, c only in A
        let a = counts(&[("a", 2), ("b", 1), ("c", 5)]);
        let b = counts(&[("a", 1), ("b", 3), ("d", 2)]);
        let t = top_k_density(&a, &b, 10).unwrap();
        assert_eq!(t.warnings.len(), 1);
        assert_eq!(t.rows.len(), 2);
        assert_eq!(t.rows[0].token, "b");
        assert_eq!(t.rows[0].density_a, 1.0 / 3.0);
        assert_eq!(t.rows[0].density_b, 3.0 / 4.0);
        assert_eq!(t.rows[1].density_a, 2.0 / 3.0);
        assert_eq!(t.rows[1].density_b, 1.0 / 4.0);

        let top1 = top_k_density(&a, &b, 1).unwrap();
        assert_eq!(top1.rows.len(), 1);
        assert_eq!(top1.rows[0].density_a, 1.0);

        let same = top_k_density(&a, &a, 5).unwrap();
        assert!(same.rows.iter().all(|r| r.density_a == r.density_b));
        assert!(top_k_density(&a, &b, 0).is_err());
    }

    fn count_map() -> impl Strategy<Value = TokenCounts> {
        proptest::collection::btree_map("[a-f]{1,2}", 1u64..50, 1..12)
            .prop_map(|counts| TokenCounts { counts })
    }

    proptest! {
        #[test]
        fn jsd_properties(a in count_map(), b in count_map()) {
            let da = TokenDistribution::from_counts(&a).unwrap();
            let db = TokenDistribution::from_counts(&b).unwrap();
            let ab = jsd(&da, &db, LogBase::Two);
            prop_assert_eq!(ab, jsd(&db, &da, LogBase::Two));
            prop_assert!((0.0..=1.0 + 1e-12).contains(&ab));
            prop_assert!(jsd(&da, &da, LogBase::Two).abs() < 1e-12);
        }

        #[test]
        fn cooccurrence_is_symmetric_and_merges(
            sets in proptest::collection::vec(proptest::collection::btree_set((0usize..24).prop_map(|i| Emotion24::ALL[i]), 0..5), 0..20),
            split in 0usize..20,
        ) {
            let m = cooccurrence(&sets);
            prop_assert!(m.is_symmetric());
            let cut = split.min(sets.len());
            let merged = cooccurrence(&sets[..cut]).merge(&cooccurrence(&sets[cut..]));
            prop_assert_eq!(merged, m);
            let dist = emotion_distribution(&sets);
            prop_assert_eq!(dist.values().sum::<u64>(), sets.iter().map(|s| s.len() as u64).sum::<u64>());
        }
    }
}
