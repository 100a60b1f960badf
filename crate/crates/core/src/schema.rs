//! Hierarchical label space, distributional labels, and annotation aggregation.
//!
//! A post carries five label blocks: the binary `lonely` block and four
//! fine-grained blocks (duration, context, interpersonal, interaction). Each
//! block is a probability vector built from annotator vote fractions. For
//! posts that are purely non-lonely the fine-grained blocks are all-zero,
//! which makes them drop out of the training objective.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::CandidateKind;
use crate::error::{Error, Result};

/// Tolerance on `Σ values = 1` for a non-zero distributional label.
pub const SUM_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Category {
    Lonely,
    Duration,
    Context,
    Interpersonal,
    Interaction,
}

const LONELY_LABELS: &[&str] = &["non-lonely", "lonely"];
const DURATION_LABELS: &[&str] = &["transient", "enduring", "ambiguous", "na"];
const CONTEXT_LABELS: &[&str] = &["social", "physical", "somatic", "romantic", "na"];
const INTERPERSONAL_LABELS: &[&str] = &["romantic", "friendship", "family", "peers", "na"];
const INTERACTION_LABELS: &[&str] = &[
    "seek-advice",
    "provide-support",
    "seek-validation-affirmation",
    "reach-out",
    "non-directed",
];

impl Category {
    pub const ALL: [Category; 5] = [
        Category::Lonely,
        Category::Duration,
        Category::Context,
        Category::Interpersonal,
        Category::Interaction,
    ];

    pub const FINE_GRAINED: [Category; 4] = [
        Category::Duration,
        Category::Context,
        Category::Interpersonal,
        Category::Interaction,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Category::Lonely => "lonely",
            Category::Duration => "duration",
            Category::Context => "context",
            Category::Interpersonal => "interpersonal",
            Category::Interaction => "interaction",
        }
    }

    /// Position of the block in schema order.
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn labels(self) -> &'static [&'static str] {
        match self {
            Category::Lonely => LONELY_LABELS,
            Category::Duration => DURATION_LABELS,
            Category::Context => CONTEXT_LABELS,
            Category::Interpersonal => INTERPERSONAL_LABELS,
            Category::Interaction => INTERACTION_LABELS,
        }
    }

    pub fn size(self) -> usize {
        self.labels().len()
    }

    pub fn has_na(self) -> bool {
        matches!(
            self,
            Category::Duration | Category::Context | Category::Interpersonal
        )
    }

    /// The NA label is always the last entry of a block that has one.
    pub fn na_index(self) -> Option<usize> {
        self.has_na().then(|| self.size() - 1)
    }

    pub fn label_index(self, label: &str) -> Result<usize> {
        self.labels()
            .iter()
            .position(|l| *l == label)
            .ok_or_else(|| Error::UnknownLabel {
                category: self.name(),
                label: label.to_string(),
            })
    }

    pub fn is_fine_grained(self) -> bool {
        self != Category::Lonely
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Category {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Category::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::UnknownCategory(s.to_string()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CategoryBlock {
    pub category: Category,
    pub labels: &'static [&'static str],
    pub has_na: bool,
}

/// The five-block hierarchical label space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelSchema {
    blocks: Vec<CategoryBlock>,
}

impl Default for LabelSchema {
    fn default() -> Self {
        Self::standard()
    }
}

impl LabelSchema {
    pub fn standard() -> Self {
        let blocks = Category::ALL
            .iter()
            .map(|&category| CategoryBlock {
                category,
                labels: category.labels(),
                has_na: category.has_na(),
            })
            .collect();
        Self { blocks }
    }

    pub fn blocks(&self) -> &[CategoryBlock] {
        &self.blocks
    }

    pub fn total_dim(&self) -> usize {
        self.blocks.iter().map(|b| b.labels.len()).sum()
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.labels.len()).collect()
    }

    /// Start offset of `category` in the concatenated 21-dim layout.
    pub fn offset(&self, category: Category) -> usize {
        self.blocks
            .iter()
            .take_while(|b| b.category != category)
            .map(|b| b.labels.len())
            .sum()
    }

    /// Stable 64-bit FNV-1a fingerprint over block and label names.
    pub fn fingerprint(&self) -> u64 {
        let mut h = crate::rng::Fnv64::new();
        for block in &self.blocks {
            h.write(block.category.name().as_bytes());
            h.write(&[0xff]);
            for label in block.labels {
                h.write(label.as_bytes());
                h.write(&[0x00]);
            }
        }
        h.finish()
    }
}

/// A probability vector over one block's labels, or the all-zero vector.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DistributionalLabel {
    category: Category,
    values: Vec<f64>,
}

impl DistributionalLabel {
    pub fn new(category: Category, values: Vec<f64>) -> Result<Self> {
        let invalid = |reason: String| Error::InvalidDistribution {
            block: category.name(),
            reason,
        };
        if values.len() != category.size() {
            return Err(invalid(format!(
                "expected {} values, got {}",
                category.size(),
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(invalid(format!("entry {v} is negative or non-finite")));
        }
        let all_zero = values.iter().all(|&v| v == 0.0);
        let sum: f64 = values.iter().sum();
        if !all_zero && (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(invalid(format!("entries sum to {sum}")));
        }
        Ok(Self { category, values })
    }

    pub fn zeros(category: Category) -> Self {
        Self {
            category,
            values: vec![0.0; category.size()],
        }
    }

    pub fn one_hot(category: Category, index: usize) -> Result<Self> {
        let mut values = vec![0.0; category.size()];
        *values
            .get_mut(index)
            .ok_or_else(|| Error::InvalidDistribution {
                block: category.name(),
                reason: format!("index {index} out of range"),
            })? = 1.0;
        Ok(Self { category, values })
    }

    pub fn category(&self) -> Category {
        self.category
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }
}

/// Renormalizes a block over its non-NA labels.
pub fn normalize_drop_na(label: &DistributionalLabel) -> Result<Vec<f64>> {
    let category = label.category();
    let na = category
        .na_index()
        .ok_or(Error::NoNaLabel(category.name()))?;
    drop_na_values(category, &label.values()[..na])
}

/// Same as [`normalize_drop_na`] for a raw block vector of a category with NA.
pub fn drop_na_values(category: Category, non_na: &[f64]) -> Result<Vec<f64>> {
    let mass: f64 = non_na.iter().sum();
    if mass <= 0.0 {
        return Err(Error::NaOnly(category.name()));
    }
    Ok(non_na.iter().map(|v| v / mass).collect())
}

/// The full five-block target for one post.
#[derive(Clone, Debug, PartialEq)]
pub struct PostLabelSet {
    pub lonely: DistributionalLabel,
    pub fine_grained: [DistributionalLabel; 4],
}

impl PostLabelSet {
    pub fn new(
        lonely: DistributionalLabel,
        fine_grained: [DistributionalLabel; 4],
    ) -> Result<Self> {
        if lonely.category() != Category::Lonely {
            return Err(Error::InvalidArgument(format!(
                "lonely slot holds a {} block",
                lonely.category()
            )));
        }
        for (slot, label) in Category::FINE_GRAINED.iter().zip(&fine_grained) {
            if *slot != label.category() {
                return Err(Error::InvalidArgument(format!(
                    "fine-grained slot {slot} holds a {} block",
                    label.category()
                )));
            }
        }
        let set = Self {
            lonely,
            fine_grained,
        };
        if set.is_pure_nonlonely() && set.fine_grained.iter().any(|l| !l.is_zero()) {
            return Err(Error::InvalidDistribution {
                block: "lonely",
                reason: "pure non-lonely post must have all-zero fine-grained labels".into(),
            });
        }
        Ok(set)
    }

    /// Label set of a post retained as non-lonely.
    pub fn nonlonely() -> Self {
        Self {
            lonely: DistributionalLabel {
                category: Category::Lonely,
                values: vec![1.0, 0.0],
            },
            fine_grained: Category::FINE_GRAINED.map(DistributionalLabel::zeros),
        }
    }

    /// Builds a label set from a flat vector in schema order (21 entries).
    pub fn from_flat(flat: &[f64]) -> Result<Self> {
        let schema = LabelSchema::standard();
        if flat.len() != schema.total_dim() {
            return Err(Error::Shape(format!(
                "expected {} label values, got {}",
                schema.total_dim(),
                flat.len()
            )));
        }
        let block = |c: Category| {
            let off = schema.offset(c);
            DistributionalLabel::new(c, flat[off..off + c.size()].to_vec())
        };
        Self::new(
            block(Category::Lonely)?,
            [
                block(Category::Duration)?,
                block(Category::Context)?,
                block(Category::Interpersonal)?,
                block(Category::Interaction)?,
            ],
        )
    }

    pub fn block(&self, category: Category) -> &DistributionalLabel {
        match category {
            Category::Lonely => &self.lonely,
            c => &self.fine_grained[c.index() - 1],
        }
    }

    pub fn blocks(&self) -> impl Iterator<Item = &DistributionalLabel> {
        std::iter::once(&self.lonely).chain(self.fine_grained.iter())
    }

    pub fn to_flat(&self) -> Vec<f64> {
        self.blocks()
            .flat_map(|b| b.values().iter().copied())
            .collect()
    }

    pub fn is_pure_nonlonely(&self) -> bool {
        self.lonely.values() == [1.0, 0.0]
    }

    /// True when the fine-grained targets carry mass (the post was retained as lonely).
    pub fn has_fine_grained(&self) -> bool {
        self.fine_grained.iter().all(|l| !l.is_zero())
    }
}

/// One annotator's judgement of one post. Fine-grained choices are label
/// indices into their block, in [`Category::FINE_GRAINED`] order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnnotationRecord {
    pub post_id: String,
    pub annotator_id: String,
    pub lonely: bool,
    pub choices: [Option<usize>; 4],
}

/// Wire form of an annotation line.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AnnotationLine {
    pub post_id: String,
    pub annotator_id: String,
    pub lonely: bool,
    #[serde(default)]
    pub duration: Option<String>,
    #[serde(default)]
    pub context: Option<String>,
    #[serde(default)]
    pub interpersonal: Option<String>,
    #[serde(default)]
    pub interaction: Option<String>,
}

impl TryFrom<AnnotationLine> for AnnotationRecord {
    type Error = Error;

    fn try_from(line: AnnotationLine) -> Result<Self> {
        let raw = [
            line.duration,
            line.context,
            line.interpersonal,
            line.interaction,
        ];
        let mut choices = [None; 4];
        for ((slot, category), value) in choices.iter_mut().zip(Category::FINE_GRAINED).zip(raw) {
            *slot = value.map(|v| category.label_index(&v)).transpose()?;
        }
        Ok(Self {
            post_id: line.post_id,
            annotator_id: line.annotator_id,
            lonely: line.lonely,
            choices,
        })
    }
}

impl From<&AnnotationRecord> for AnnotationLine {
    fn from(r: &AnnotationRecord) -> Self {
        let name =
            |i: usize| r.choices[i].map(|c| Category::FINE_GRAINED[i].labels()[c].to_string());
        Self {
            post_id: r.post_id.clone(),
            annotator_id: r.annotator_id.clone(),
            lonely: r.lonely,
            duration: name(0),
            context: name(1),
            interpersonal: name(2),
            interaction: name(3),
        }
    }
}

impl AnnotationRecord {
    pub fn choice(&self, category: Category) -> Option<usize> {
        match category {
            Category::Lonely => Some(usize::from(self.lonely)),
            c => self.choices[c.index() - 1],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiscardReason {
    /// A lonely candidate whose majority judged it non-lonely.
    MajorityNonlonely,
    /// A non-lonely candidate whose majority judged it lonely.
    MajorityLonely,
    /// Even split between lonely and non-lonely votes.
    NoMajority,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Aggregation {
    Retained(PostLabelSet),
    Discarded(DiscardReason),
}

/// Turns one post's annotation records into its distributional targets.
///
/// Lonely candidates are kept when a strict majority votes lonely; the lonely
/// block is then the vote fraction and each fine-grained block is the vote
/// fraction among the lonely-voting annotators. Non-lonely candidates are kept
/// when a strict majority votes non-lonely, with a `(1, 0)` lonely block and
/// all-zero fine-grained blocks. Ties are discarded.
pub fn aggregate_annotations(
    records: &[AnnotationRecord],
    kind: CandidateKind,
) -> Result<Aggregation> {
    let first = records
        .first()
        .ok_or_else(|| Error::Annotation("empty record list".into()))?;
    if let Some(other) = records.iter().find(|r| r.post_id != first.post_id) {
        return Err(Error::Annotation(format!(
            "records span multiple posts ({:?} and {:?})",
            first.post_id, other.post_id
        )));
    }
    for r in records.iter().filter(|r| r.lonely) {
        if let Some(i) = r.choices.iter().position(Option::is_none) {
            return Err(Error::Annotation(format!(
                "annotator {:?} labeled post {:?} lonely without a {} choice",
                r.annotator_id,
                r.post_id,
                Category::FINE_GRAINED[i]
            )));
        }
    }

    let total = records.len();
    let lonely_votes = records.iter().filter(|r| r.lonely).count();
    let nonlonely_votes = total - lonely_votes;
    let majority_lonely = 2 * lonely_votes > total;
    let majority_nonlonely = 2 * nonlonely_votes > total;

    match kind {
        CandidateKind::Excluded => Err(Error::InvalidArgument(format!(
            "post {:?} was excluded by the candidate filter",
            first.post_id
        ))),
        _ if !majority_lonely && !majority_nonlonely => {
            Ok(Aggregation::Discarded(DiscardReason::NoMajority))
        }
        CandidateKind::Lonely if majority_nonlonely => {
            Ok(Aggregation::Discarded(DiscardReason::MajorityNonlonely))
        }
        CandidateKind::Nonlonely if majority_lonely => {
            Ok(Aggregation::Discarded(DiscardReason::MajorityLonely))
        }
        CandidateKind::Nonlonely => Ok(Aggregation::Retained(PostLabelSet::nonlonely())),
        CandidateKind::Lonely => {
            let n = total as f64;
            let lonely = DistributionalLabel::new(
                Category::Lonely,
                vec![nonlonely_votes as f64 / n, lonely_votes as f64 / n],
            )?;
            let voters: Vec<&AnnotationRecord> = records.iter().filter(|r| r.lonely).collect();
            let fine = |slot: usize| -> Result<DistributionalLabel> {
                let category = Category::FINE_GRAINED[slot];
                let mut counts = vec![0usize; category.size()];
                for r in &voters {
                    // presence checked above
                    counts[r.choices[slot].expect("lonely record has every choice")] += 1;
                }
                let denom = voters.len() as f64;
                DistributionalLabel::new(
                    category,
                    counts.iter().map(|&c| c as f64 / denom).collect(),
                )
            };
            Ok(Aggregation::Retained(PostLabelSet::new(
                lonely,
                [fine(0)?, fine(1)?, fine(2)?, fine(3)?],
            )?))
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct AggregateReport {
    pub retained: BTreeMap<String, PostLabelSet>,
    pub discarded: BTreeMap<String, DiscardReason>,
    /// Posts with annotations but no candidate kind (absent from the posts file or excluded).
    pub unmatched: Vec<String>,
}

/// Groups records by post and aggregates each post with its candidate kind.
pub fn aggregate_corpus(
    records: &[AnnotationRecord],
    kinds: &BTreeMap<String, CandidateKind>,
) -> Result<AggregateReport> {
    let mut by_post: BTreeMap<&str, Vec<AnnotationRecord>> = BTreeMap::new();
    for r in records {
        by_post.entry(&r.post_id).or_default().push(r.clone());
    }
    let mut report = AggregateReport::default();
    for (post_id, recs) in by_post {
        match kinds.get(post_id) {
            Some(kind @ (CandidateKind::Lonely | CandidateKind::Nonlonely)) => {
                match aggregate_annotations(&recs, *kind)? {
                    Aggregation::Retained(set) => {
                        report.retained.insert(post_id.to_string(), set);
                    }
                    Aggregation::Discarded(reason) => {
                        report.discarded.insert(post_id.to_string(), reason);
                    }
                }
            }
            _ => report.unmatched.push(post_id.to_string()),
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairAgreement {
    pub annotator_a: String,
    pub annotator_b: String,
    pub shared: usize,
    pub matches: usize,
    pub agreement: f64,
}

fn labels_by_annotator(
    records: &[AnnotationRecord],
    category: Category,
) -> BTreeMap<&str, BTreeMap<&str, usize>> {
    let mut out: BTreeMap<&str, BTreeMap<&str, usize>> = BTreeMap::new();
    for r in records {
        if let Some(choice) = r.choice(category) {
            out.entry(r.annotator_id.as_str())
                .or_default()
                .insert(r.post_id.as_str(), choice);
        }
    }
    out
}

fn compare(a: &BTreeMap<&str, usize>, b: &BTreeMap<&str, usize>) -> (usize, usize) {
    a.iter()
        .filter_map(|(post, la)| b.get(post).map(|lb| la == lb))
        .fold((0, 0), |(shared, matches), same| {
            (shared + 1, matches + usize::from(same))
        })
}

/// Exact-match rate of two annotators over posts both labeled in `category`.
pub fn interrater_agreement(
    records: &[AnnotationRecord],
    category: Category,
    annotator_a: &str,
    annotator_b: &str,
) -> Result<f64> {
    let by = labels_by_annotator(records, category);
    let empty = BTreeMap::new();
    let (shared, matches) = compare(
        by.get(annotator_a).unwrap_or(&empty),
        by.get(annotator_b).unwrap_or(&empty),
    );
    if shared == 0 {
        return Err(Error::NoSharedPosts(annotator_a.into(), annotator_b.into()));
    }
    Ok(matches as f64 / shared as f64)
}

/// Agreement for every annotator pair sharing at least one post in `category`.
pub fn pairwise_agreement(records: &[AnnotationRecord], category: Category) -> Vec<PairAgreement> {
    let by = labels_by_annotator(records, category);
    let ids: BTreeSet<&str> = by.keys().copied().collect();
    let ids: Vec<&str> = ids.into_iter().collect();
    let mut out = Vec::new();
    for (i, a) in ids.iter().enumerate() {
        for b in &ids[i + 1..] {
            let (shared, matches) = compare(&by[a], &by[b]);
            if shared > 0 {
                out.push(PairAgreement {
                    annotator_a: a.to_string(),
                    annotator_b: b.to_string(),
                    shared,
                    matches,
                    agreement: matches as f64 / shared as f64,
                });
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(post: &str, ann: &str, lonely: bool, choices: [Option<usize>; 4]) -> AnnotationRecord {
        AnnotationRecord {
            post_id: post.into(),
            annotator_id: ann.into(),
            lonely,
            choices,
        }
    }

    fn lonely_rec(ann: &str, interaction: usize) -> AnnotationRecord {
        rec(
            "p",
            ann,
            true,
            [Some(0), Some(1), Some(4), Some(interaction)],
        )
    }

    #[test]
    fn schema_layout() {
        let schema = LabelSchema::standard();
        assert_eq!(schema.total_dim(), 21);
        assert_eq!(schema.block_sizes(), vec![2, 4, 5, 5, 5]);
        assert_eq!(schema.offset(Category::Duration), 2);
        assert_eq!(schema.offset(Category::Interaction), 16);
        for block in schema.blocks() {
            let unique: BTreeSet<_> = block.labels.iter().collect();
            assert_eq!(unique.len(), block.labels.len());
        }
        assert!(!Category::Interaction.has_na());
        assert!(!Category::Lonely.has_na());
        assert_eq!(Category::Context.na_index(), Some(4));
    }

    #[test]
    fn distributional_label_invariants() {
        assert!(DistributionalLabel::new(Category::Lonely, vec![0.5, 0.5]).is_ok());
        assert!(DistributionalLabel::new(Category::Lonely, vec![0.0, 0.0]).is_ok());
        assert!(DistributionalLabel::new(Category::Lonely, vec![0.5, 0.4]).is_err());
        assert!(DistributionalLabel::new(Category::Lonely, vec![1.5, -0.5]).is_err());
        assert!(DistributionalLabel::new(Category::Lonely, vec![1.0]).is_err());
    }

    #[test]
    fn pure_nonlonely_requires_zero_fine_grained() {
        let lonely = DistributionalLabel::new(Category::Lonely, vec![1.0, 0.0]).unwrap();
        let mut fine = Category::FINE_GRAINED.map(DistributionalLabel::zeros);
        fine[0] = DistributionalLabel::one_hot(Category::Duration, 0).unwrap();
        assert!(PostLabelSet::new(lonely, fine).is_err());
    }

    #[test]
    fn figure_vote_pattern() {
        // two annotators chose seek-advice, one seek-validation-affirmation
        let records = vec![lonely_rec("a", 0), lonely_rec("b", 0), lonely_rec("c", 2)];
        let Aggregation::Retained(set) =
            aggregate_annotations(&records, CandidateKind::Lonely).unwrap()
        else {
            panic!("expected retained");
        };
        assert_eq!(
            set.block(Category::Interaction).values(),
            &[2.0 / 3.0, 0.0, 1.0 / 3.0, 0.0, 0.0]
        );
        assert_eq!(set.lonely.values(), &[0.0, 1.0]);
    }

    #[test]
    fn nonlonely_candidate_retained() {
        let records: Vec<_> = ["a", "b", "c"]
            .iter()
            .map(|a| rec("p", a, false, [None; 4]))
            .collect();
        let out = aggregate_annotations(&records, CandidateKind::Nonlonely).unwrap();
        assert_eq!(out, Aggregation::Retained(PostLabelSet::nonlonely()));
    }

    #[test]
    fn lonely_candidate_minority_discarded() {
        let records = vec![
            lonely_rec("a", 0),
            rec("p", "b", false, [None; 4]),
            rec("p", "c", false, [None; 4]),
        ];
        assert_eq!(
            aggregate_annotations(&records, CandidateKind::Lonely).unwrap(),
            Aggregation::Discarded(DiscardReason::MajorityNonlonely)
        );
    }

    #[test]
    fn fine_grained_fractions_use_lonely_voters_only() {
        let records = vec![
            lonely_rec("a", 0),
            lonely_rec("b", 3),
            rec("p", "c", false, [None; 4]),
        ];
        let Aggregation::Retained(set) =
            aggregate_annotations(&records, CandidateKind::Lonely).unwrap()
        else {
            panic!("expected retained");
        };
        assert_eq!(set.lonely.values(), &[1.0 / 3.0, 2.0 / 3.0]);
        assert_eq!(
            set.block(Category::Interaction).values(),
            &[0.5, 0.0, 0.0, 0.5, 0.0]
        );
    }

    #[test]
    fn even_split_discarded() {
        let records = vec![lonely_rec("a", 0), rec("p", "b", false, [None; 4])];
        for kind in [CandidateKind::Lonely, CandidateKind::Nonlonely] {
            assert_eq!(
                aggregate_annotations(&records, kind).unwrap(),
                Aggregation::Discarded(DiscardReason::NoMajority)
            );
        }
    }

    #[test]
    fn aggregation_errors() {
        assert!(aggregate_annotations(&[], CandidateKind::Lonely).is_err());
        let mixed = vec![lonely_rec("a", 0), rec("q", "b", true, [Some(0); 4])];
        assert!(aggregate_annotations(&mixed, CandidateKind::Lonely).is_err());
        let missing = vec![rec("p", "a", true, [Some(0), None, Some(0), Some(0)])];
        assert!(aggregate_annotations(&missing, CandidateKind::Lonely).is_err());
    }

    #[test]
    fn drop_na_examples() {
        let d = DistributionalLabel::new(
            Category::Duration,
            vec![1.0 / 3.0, 1.0 / 3.0, 0.0, 1.0 / 3.0],
        )
        .unwrap();
        let out = normalize_drop_na(&d).unwrap();
        assert!((out[0] - 0.5).abs() < 1e-12 && (out[1] - 0.5).abs() < 1e-12 && out[2] == 0.0);

        let d = DistributionalLabel::one_hot(Category::Duration, 0).unwrap();
        assert_eq!(normalize_drop_na(&d).unwrap(), vec![1.0, 0.0, 0.0]);

        let d =
            DistributionalLabel::new(Category::Context, vec![0.5, 0.25, 0.0, 0.0, 0.25]).unwrap();
        let out = normalize_drop_na(&d).unwrap();
        let expected = [2.0 / 3.0, 1.0 / 3.0, 0.0, 0.0];
        for (o, e) in out.iter().zip(expected) {
            assert!((o - e).abs() < 1e-12);
        }

        let na_only = DistributionalLabel::one_hot(Category::Context, 4).unwrap();
        assert!(matches!(normalize_drop_na(&na_only), Err(Error::NaOnly(_))));
        let no_na = DistributionalLabel::one_hot(Category::Interaction, 0).unwrap();
        assert!(matches!(
            normalize_drop_na(&no_na),
            Err(Error::NoNaLabel(_))
        ));
    }

    #[test]
    fn agreement_counts() {
        let mk = |post: &str, ann: &str, d: usize| {
            rec(post, ann, true, [Some(d), Some(0), Some(0), Some(0)])
        };
        let records = vec![
            mk("1", "x", 0),
            mk("1", "y", 0),
            mk("2", "x", 1),
            mk("2", "y", 1),
            mk("3", "x", 2),
            mk("3", "y", 0),
            mk("4", "z", 0),
        ];
        let a = interrater_agreement(&records, Category::Duration, "x", "y").unwrap();
        assert!((a - 2.0 / 3.0).abs() < 1e-15);
        assert!(interrater_agreement(&records, Category::Duration, "x", "z").is_err());

        let same: Vec<_> = records
            .iter()
            .filter(|r| r.post_id != "3")
            .cloned()
            .collect();
        assert_eq!(
            interrater_agreement(&same, Category::Duration, "x", "y").unwrap(),
            1.0
        );

        let pairs = pairwise_agreement(&records, Category::Duration);
        assert_eq!(pairs.len(), 1);
        assert_eq!((pairs[0].shared, pairs[0].matches), (3, 2));

        let disagree = vec![
            mk("1", "x", 0),
            mk("1", "y", 1),
            mk("2", "x", 2),
            mk("2", "y", 3),
        ];
        assert_eq!(
            interrater_agreement(&disagree, Category::Duration, "x", "y").unwrap(),
            0.0
        );
    }

    #[test]
    fn wire_round_trip_rejects_unknown_labels() {
        let line: AnnotationLine = serde_json::from_str(
            r#"{"post_id":"p","annotator_id":"a","lonely":true,"duration":"enduring","context":"social","interpersonal":"na","interaction":"reach-out"}"#,
        )
        .unwrap();
        let r = AnnotationRecord::try_from(line).unwrap();
        assert_eq!(r.choices, [Some(1), Some(0), Some(4), Some(3)]);
        let bad: AnnotationLine = serde_json::from_str(
            r#"{"post_id":"p","annotator_id":"a","lonely":true,"duration":"Enduring"}"#,
        )
        .unwrap();
        assert!(AnnotationRecord::try_from(bad).is_err());
    }
}
