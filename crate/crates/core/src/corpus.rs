//! Posts, candidate routing, stratified sampling, features, and dataset splits.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use chrono::{DateTime, Datelike};
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;

use crate::error::{Error, Result};
use crate::rng::{stream_rng, Fnv64, Stream};
use crate::schema::{Category, PostLabelSet};

/// Minimum whitespace-token count of title + body for a post to be considered.
pub const MIN_WORDS: usize = 25;

pub const DEFAULT_KEYWORDS: &[&str] = &[
    "alone", "lonely", "lonesome", "loner", "loneli", "loneness", "isolated", "left out",
];

pub const DEFAULT_LONELINESS_SUBREDDITS: &[&str] = &["lonely", "loneliness"];

/// Embedding width of the base transformer encoder the models were sized for.
pub const PAPER_EMBEDDING_DIM: usize = 768;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Post {
    pub id: String,
    pub subreddit: String,
    pub created_utc: i64,
    pub title: String,
    pub body: String,
}

impl Post {
    pub fn text(&self) -> String {
        format!("{} {}", self.title, self.body)
    }

    pub fn word_count(&self) -> usize {
        self.title.split_whitespace().count() + self.body.split_whitespace().count()
    }

    pub fn month_index(&self) -> Result<i64> {
        month_index(self.created_utc)
    }

    pub fn era(&self) -> Result<Era> {
        let dt = DateTime::from_timestamp(self.created_utc, 0)
            .ok_or_else(|| Error::InvalidArgument(format!("bad timestamp {}", self.created_utc)))?;
        Ok(if dt.year() < 2020 {
            Era::PrePandemic
        } else {
            Era::Pandemic
        })
    }
}

/// Months since January 2018 (January 2018 is 0, March 2020 is 26).
pub fn month_index(created_utc: i64) -> Result<i64> {
    if created_utc <= 0 {
        return Err(Error::InvalidArgument(format!(
            "created_utc must be positive, got {created_utc}"
        )));
    }
    let dt = DateTime::from_timestamp(created_utc, 0)
        .ok_or_else(|| Error::InvalidArgument(format!("bad timestamp {created_utc}")))?;
    Ok(i64::from(dt.year() - 2018) * 12 + i64::from(dt.month0()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Era {
    PrePandemic,
    Pandemic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CandidateKind {
    #[serde(rename = "lonely-candidate")]
    Lonely,
    #[serde(rename = "nonlonely-candidate")]
    Nonlonely,
    Excluded,
}

impl CandidateKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CandidateKind::Lonely => "lonely-candidate",
            CandidateKind::Nonlonely => "nonlonely-candidate",
            CandidateKind::Excluded => "excluded",
        }
    }
}

/// Subreddit set and keyword list used to route posts into annotation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateFilter {
    pub loneliness_subreddits: BTreeSet<String>,
    pub keywords: Vec<String>,
}

impl Default for CandidateFilter {
    fn default() -> Self {
        Self {
            loneliness_subreddits: DEFAULT_LONELINESS_SUBREDDITS
                .iter()
                .map(|s| s.to_string())
                .collect(),
            keywords: DEFAULT_KEYWORDS.iter().map(|s| s.to_string()).collect(),
        }
    }
}

fn normalize_subreddit(name: &str) -> String {
    let name = name.trim();
    let name = name
        .strip_prefix("r/")
        .or_else(|| name.strip_prefix("/r/"))
        .unwrap_or(name);
    name.to_lowercase()
}

impl CandidateFilter {
    pub fn classify(&self, post: &Post) -> CandidateKind {
        candidate_filter(post, &self.loneliness_subreddits, &self.keywords)
    }
}

/// Routes a post: too short → excluded; loneliness forum or keyword hit →
/// lonely candidate; otherwise non-lonely candidate. Keywords match as
/// case-insensitive substrings of title and body.
pub fn candidate_filter(
    post: &Post,
    loneliness_subreddits: &BTreeSet<String>,
    keywords: &[String],
) -> CandidateKind {
    if post.word_count() < MIN_WORDS {
        return CandidateKind::Excluded;
    }
    let sub = normalize_subreddit(&post.subreddit);
    if loneliness_subreddits
        .iter()
        .any(|s| normalize_subreddit(s) == sub)
    {
        return CandidateKind::Lonely;
    }
    let text = format!("{}\n{}", post.title, post.body).to_lowercase();
    if keywords.iter().any(|k| text.contains(&k.to_lowercase())) {
        CandidateKind::Lonely
    } else {
        CandidateKind::Nonlonely
    }
}

/// Splits `target` across strata in proportion to their populations using
/// largest-remainder rounding. Ties on the remainder go to the earlier stratum.
pub fn allocate_largest_remainder(populations: &[usize], target: usize) -> Result<Vec<usize>> {
    let total: usize = populations.iter().sum();
    if target > total {
        return Err(Error::InvalidArgument(format!(
            "target {target} exceeds population {total}"
        )));
    }
    if total == 0 {
        return Ok(vec![0; populations.len()]);
    }
    // exact integer quotas: target * n / total
    let mut counts: Vec<usize> = populations.iter().map(|&n| target * n / total).collect();
    let mut remainders: Vec<(usize, usize)> = populations
        .iter()
        .enumerate()
        .map(|(i, &n)| (target * n % total, i))
        .collect();
    remainders.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    let short = target - counts.iter().sum::<usize>();
    for &(_, i) in remainders.iter().take(short) {
        counts[i] += 1;
    }
    Ok(counts)
}

/// Proportional stratified sample without replacement. Returns the chosen
/// indices in ascending order.
pub fn stratified_sample<T, K, F>(
    items: &[T],
    strata_of: F,
    target_n: usize,
    seed: u64,
) -> Result<Vec<usize>>
where
    K: Ord,
    F: Fn(&T) -> K,
{
    if target_n > items.len() {
        return Err(Error::InvalidArgument(format!(
            "target_n {target_n} exceeds population {}",
            items.len()
        )));
    }
    let mut strata: BTreeMap<K, Vec<usize>> = BTreeMap::new();
    for (i, item) in items.iter().enumerate() {
        strata.entry(strata_of(item)).or_default().push(i);
    }
    let populations: Vec<usize> = strata.values().map(Vec::len).collect();
    let counts = allocate_largest_remainder(&populations, target_n)?;
    let mut rng = stream_rng(seed, Stream::Sample);
    let mut chosen = Vec::with_capacity(target_n);
    for (members, &take) in strata.values().zip(&counts) {
        let mut members = members.clone();
        members.shuffle(&mut rng);
        chosen.extend_from_slice(&members[..take]);
    }
    chosen.sort_unstable();
    Ok(chosen)
}

/// Stratum used for annotation sampling: forum and pre/post-2020 era.
pub fn post_stratum(post: &Post) -> (String, Era) {
    (
        normalize_subreddit(&post.subreddit),
        post.era().unwrap_or(Era::PrePandemic),
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Validation,
    Test,
}

impl Split {
    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Validation => "validation",
            Split::Test => "test",
        }
    }
}

impl std::str::FromStr for Split {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "train" => Ok(Split::Train),
            "validation" => Ok(Split::Validation),
            "test" => Ok(Split::Test),
            other => Err(Error::InvalidArgument(format!("unknown split {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitAssignment {
    pub assignments: BTreeMap<String, Split>,
    pub seed: u64,
}

impl SplitAssignment {
    pub fn ids(&self, split: Split) -> Vec<&str> {
        self.assignments
            .iter()
            .filter(|(_, s)| **s == split)
            .map(|(id, _)| id.as_str())
            .collect()
    }

    pub fn count(&self, split: Split) -> usize {
        self.assignments.values().filter(|s| **s == split).count()
    }
}

/// 70/20/10 split with floor sizes for train and validation. The id list is
/// sorted before the seeded shuffle so the result does not depend on input order.
pub fn split_dataset<S: AsRef<str>>(ids: &[S], seed: u64) -> Result<SplitAssignment> {
    let n = ids.len();
    if n < 10 {
        return Err(Error::InvalidArgument(format!(
            "need at least 10 examples to split, got {n}"
        )));
    }
    let mut sorted: Vec<&str> = ids.iter().map(AsRef::as_ref).collect();
    sorted.sort_unstable();
    if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::DuplicateId(w[0].to_string()));
    }
    sorted.shuffle(&mut stream_rng(seed, Stream::Split));
    let n_train = 7 * n / 10;
    let n_val = 2 * n / 10;
    let assignments = sorted
        .into_iter()
        .enumerate()
        .map(|(i, id)| {
            let split = if i < n_train {
                Split::Train
            } else if i < n_train + n_val {
                Split::Validation
            } else {
                Split::Test
            };
            (id.to_string(), split)
        })
        .collect();
    Ok(SplitAssignment { assignments, seed })
}

#[derive(Clone, Debug, PartialEq)]
pub struct FeatureVector {
    pub post_id: String,
    pub values: Vec<f32>,
}

impl FeatureVector {
    pub fn dim(&self) -> usize {
        self.values.len()
    }
}

/// Signed feature hashing of lowercased whitespace tokens, L2-normalized.
pub fn hash_featurize(post: &Post, dim: usize, seed: u64) -> Result<FeatureVector> {
    if dim == 0 {
        return Err(Error::InvalidArgument("hash dim must be positive".into()));
    }
    let mut acc = vec![0.0f64; dim];
    let text = post.text().to_lowercase();
    for token in text.split_whitespace() {
        let mut h = Fnv64::with_seed(seed);
        h.write(token.as_bytes());
        let hash = h.finish();
        let bucket = (hash % dim as u64) as usize;
        let sign = if hash >> 63 == 0 { 1.0 } else { -1.0 };
        acc[bucket] += sign;
    }
    let norm = acc.iter().map(|v| v * v).sum::<f64>().sqrt();
    let values = if norm > 0.0 {
        acc.iter().map(|v| (v / norm) as f32).collect()
    } else {
        vec![0.0; dim]
    };
    Ok(FeatureVector {
        post_id: post.id.clone(),
        values,
    })
}

#[derive(Deserialize)]
struct EmbeddingLine<'a> {
    id: String,
    #[serde(borrow)]
    v: Vec<&'a RawValue>,
}

/// Loads `{"id", "v"}` rows. Each float is parsed straight from its decimal
/// text as f32 so shortest-repr output round-trips bit for bit.
pub fn load_embeddings(path: &Path) -> Result<BTreeMap<String, FeatureVector>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = BTreeMap::new();
    let mut expected: Option<usize> = None;
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let parse_err = |message: String| Error::Parse {
            path: path.to_path_buf(),
            line: i + 1,
            message,
        };
        let row: EmbeddingLine =
            serde_json::from_str(&line).map_err(|e| parse_err(e.to_string()))?;
        let values = row
            .v
            .iter()
            .map(|raw| {
                let text = raw.get();
                text.parse::<f32>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| parse_err(format!("not a finite float: {text}")))
            })
            .collect::<Result<Vec<f32>>>()?;
        if values.is_empty() {
            return Err(parse_err(format!("empty vector for {:?}", row.id)));
        }
        match expected {
            None => expected = Some(values.len()),
            Some(d) if d != values.len() => {
                return Err(Error::MixedDims {
                    id: row.id,
                    expected: d,
                    found: values.len(),
                })
            }
            _ => {}
        }
        if out.contains_key(&row.id) {
            return Err(Error::DuplicateId(row.id));
        }
        out.insert(
            row.id.clone(),
            FeatureVector {
                post_id: row.id,
                values,
            },
        );
    }
    Ok(out)
}

/// Writes embeddings with shortest round-trip float formatting.
pub fn write_embeddings<'a, I>(path: &Path, features: I) -> Result<()>
where
    I: IntoIterator<Item = &'a FeatureVector>,
{
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    for fv in features {
        let id = serde_json::to_string(&fv.post_id)
            .map_err(|e| Error::InvalidArgument(e.to_string()))?;
        let values: Vec<String> = fv.values.iter().map(|v| format!("{v:?}")).collect();
        writeln!(w, "{{\"id\":{id},\"v\":[{}]}}", values.join(","))
            .map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Wire form of one labeled-dataset line.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetRow {
    pub post_id: String,
    pub lonely: Vec<f64>,
    pub duration: Vec<f64>,
    pub context: Vec<f64>,
    pub interpersonal: Vec<f64>,
    pub interaction: Vec<f64>,
    pub month_index: i64,
}

impl DatasetRow {
    pub fn new(post_id: &str, labels: &PostLabelSet, month_index: i64) -> Self {
        let block = |c: Category| labels.block(c).values().to_vec();
        Self {
            post_id: post_id.to_string(),
            lonely: block(Category::Lonely),
            duration: block(Category::Duration),
            context: block(Category::Context),
            interpersonal: block(Category::Interpersonal),
            interaction: block(Category::Interaction),
            month_index,
        }
    }

    pub fn labels(&self) -> Result<PostLabelSet> {
        let flat: Vec<f64> = [
            &self.lonely,
            &self.duration,
            &self.context,
            &self.interpersonal,
            &self.interaction,
        ]
        .iter()
        .flat_map(|b| b.iter().copied())
        .collect();
        PostLabelSet::from_flat(&flat).map_err(|e| match e {
            Error::Shape(m) => Error::Shape(format!("post {:?}: {m}", self.post_id)),
            other => other,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LabeledExample {
    pub post_id: String,
    pub features: FeatureVector,
    pub labels: PostLabelSet,
    pub month_index: i64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct DropReport {
    pub missing_features: usize,
    pub missing_labels: usize,
}

/// Joins posts with their labels and features, dropping posts that lack either.
pub fn join(
    posts: &[Post],
    labels: &BTreeMap<String, PostLabelSet>,
    features: &BTreeMap<String, FeatureVector>,
) -> Result<(Vec<LabeledExample>, DropReport)> {
    let mut report = DropReport::default();
    let mut out = Vec::new();
    let mut dim: Option<usize> = None;
    for post in posts {
        let Some(label) = labels.get(&post.id) else {
            report.missing_labels += 1;
            continue;
        };
        let Some(fv) = features.get(&post.id) else {
            report.missing_features += 1;
            continue;
        };
        check_dim(&mut dim, fv)?;
        out.push(LabeledExample {
            post_id: post.id.clone(),
            features: fv.clone(),
            labels: label.clone(),
            month_index: post.month_index()?,
        });
    }
    out.sort_by(|a, b| a.post_id.cmp(&b.post_id));
    Ok((out, report))
}

/// Joins labeled-dataset rows with features (month index comes from the row).
pub fn join_dataset(
    rows: &[DatasetRow],
    features: &BTreeMap<String, FeatureVector>,
) -> Result<(Vec<LabeledExample>, DropReport)> {
    let mut report = DropReport::default();
    let mut out = Vec::new();
    let mut dim: Option<usize> = None;
    let mut seen = BTreeSet::new();
    for row in rows {
        if !seen.insert(row.post_id.as_str()) {
            return Err(Error::DuplicateId(row.post_id.clone()));
        }
        let Some(fv) = features.get(&row.post_id) else {
            report.missing_features += 1;
            continue;
        };
        check_dim(&mut dim, fv)?;
        out.push(LabeledExample {
            post_id: row.post_id.clone(),
            features: fv.clone(),
            labels: row.labels()?,
            month_index: row.month_index,
        });
    }
    out.sort_by(|a, b| a.post_id.cmp(&b.post_id));
    Ok((out, report))
}

fn check_dim(dim: &mut Option<usize>, fv: &FeatureVector) -> Result<()> {
    match *dim {
        None => *dim = Some(fv.dim()),
        Some(d) if d != fv.dim() => {
            return Err(Error::MixedDims {
                id: fv.post_id.clone(),
                expected: d,
                found: fv.dim(),
            })
        }
        _ => {}
    }
    if let Some(v) = fv.values.iter().find(|v| !v.is_finite()) {
        return Err(Error::NonFinite(format!(
            "feature {v} in post {:?}",
            fv.post_id
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn post(id: &str, sub: &str, words: usize, extra: &str) -> Post {
        let body: Vec<String> = (0..words).map(|i| format!("w{i}")).collect();
        Post {
            id: id.into(),
            subreddit: sub.into(),
            created_utc: 1_580_000_000,
            title: extra.into(),
            body: body.join(" "),
        }
    }

    #[test]
    fn filter_examples() {
        let f = CandidateFilter::default();
        assert_eq!(
            f.classify(&post("a", "college", 24, "")),
            CandidateKind::Excluded
        );
        assert_eq!(
            f.classify(&post("b", "college", 29, "isolated")),
            CandidateKind::Lonely
        );
        assert_eq!(
            f.classify(&post("c", "lonely", 30, "")),
            CandidateKind::Lonely
        );
        assert_eq!(
            f.classify(&post("d", "r/Loneliness", 30, "")),
            CandidateKind::Lonely
        );
        assert_eq!(
            f.classify(&post("e", "college", 30, "")),
            CandidateKind::Nonlonely
        );
        // stem keyword matches inside longer words, any case
        assert_eq!(
            f.classify(&post("f", "college", 30, "LONELINESS")),
            CandidateKind::Lonely
        );
        assert_eq!(
            f.classify(&post("g", "youngadults", 30, "felt left out")),
            CandidateKind::Lonely
        );
    }

    #[test]
    fn month_index_anchor() {
        // 2018-01-01T00:00:00Z and 2020-03-15
        assert_eq!(month_index(1_514_764_800).unwrap(), 0);
        assert_eq!(month_index(1_584_230_400).unwrap(), 26);
        assert!(month_index(0).is_err());
    }

    #[test]
    fn largest_remainder_examples() {
        assert_eq!(
            allocate_largest_remainder(&[80, 20], 10).unwrap(),
            vec![8, 2]
        );
        assert_eq!(
            allocate_largest_remainder(&[70, 20, 10], 10).unwrap(),
            vec![7, 2, 1]
        );
        assert_eq!(
            allocate_largest_remainder(&[1, 1, 1], 2).unwrap(),
            vec![1, 1, 0]
        );
        assert!(allocate_largest_remainder(&[1, 1], 3).is_err());
    }

    #[test]
    fn stratified_sample_examples() {
        let items: Vec<u8> = (0..100).map(|i| u8::from(i >= 80)).collect();
        let chosen = stratified_sample(&items, |x| *x, 10, 3).unwrap();
        assert_eq!(chosen.iter().filter(|&&i| items[i] == 0).count(), 8);
        assert_eq!(chosen.iter().filter(|&&i| items[i] == 1).count(), 2);
        assert_eq!(chosen, stratified_sample(&items, |x| *x, 10, 3).unwrap());
        let all = stratified_sample(&items, |x| *x, 100, 3).unwrap();
        assert_eq!(all, (0..100).collect::<Vec<_>>());
        assert!(stratified_sample(&items, |x| *x, 101, 3).is_err());
    }

    #[test]
    fn split_sizes() {
        for (n, sizes) in [(1000, (700, 200, 100)), (10, (7, 2, 1))] {
            let ids: Vec<String> = (0..n).map(|i| format!("p{i}")).collect();
            let s = split_dataset(&ids, 9).unwrap();
            assert_eq!(
                (
                    s.count(Split::Train),
                    s.count(Split::Validation),
                    s.count(Split::Test)
                ),
                sizes
            );
            assert_eq!(s, split_dataset(&ids, 9).unwrap());
        }
        let few: Vec<String> = (0..9).map(|i| i.to_string()).collect();
        assert!(split_dataset(&few, 1).is_err());
    }

    #[test]
    fn hash_features() {
        let p = post("x", "college", 30, "Hello");
        let a = hash_featurize(&p, 64, 5).unwrap();
        assert_eq!(a, hash_featurize(&p, 64, 5).unwrap());
        let norm: f64 = a
            .values
            .iter()
            .map(|v| f64::from(*v).powi(2))
            .sum::<f64>()
            .sqrt();
        assert!((norm - 1.0).abs() < 1e-6);

        let empty = Post {
            title: String::new(),
            body: "   ".into(),
            ..p.clone()
        };
        assert!(hash_featurize(&empty, 16, 5)
            .unwrap()
            .values
            .iter()
            .all(|v| *v == 0.0));

        let mut reordered = p.clone();
        let mut toks: Vec<&str> = p.body.split_whitespace().collect();
        toks.reverse();
        reordered.body = format!("{}   ", toks.join(" "));
        assert_eq!(hash_featurize(&reordered, 64, 5).unwrap().values, a.values);
        assert!(hash_featurize(&p, 0, 5).is_err());
    }

    #[test]
    fn embeddings_errors() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("e.jsonl");
        let mut f = File::create(&path).unwrap();
        writeln!(f, r#"{{"id":"a","v":[0.1,0.2]}}"#).unwrap();
        writeln!(f, r#"{{"id":"b","v":[0.1,0.2]}}"#).unwrap();
        writeln!(f, r#"{{"id":"c","v":[0.1]}}"#).unwrap();
        drop(f);
        match load_embeddings(&path) {
            Err(Error::MixedDims { id, .. }) => assert_eq!(id, "c"),
            other => panic!("expected mixed dims, got {other:?}"),
        }

        std::fs::write(
            &path,
            "{\"id\":\"a\",\"v\":[1]}\n{\"id\":\"a\",\"v\":[2]}\n",
        )
        .unwrap();
        assert!(matches!(load_embeddings(&path), Err(Error::DuplicateId(_))));

        std::fs::write(
            &path,
            "{\"id\":\"a\",\"v\":[1]}\n{\"id\":\"b\",\"v\":[2,}\n",
        )
        .unwrap();
        assert!(matches!(
            load_embeddings(&path),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn join_reports_drops() {
        let posts = vec![
            post("a", "c", 30, ""),
            post("b", "c", 30, ""),
            post("c", "c", 30, ""),
        ];
        let labels: BTreeMap<_, _> = posts
            .iter()
            .map(|p| (p.id.clone(), PostLabelSet::nonlonely()))
            .collect();
        let features: BTreeMap<_, _> = ["a", "b"]
            .iter()
            .map(|id| {
                (
                    id.to_string(),
                    FeatureVector {
                        post_id: id.to_string(),
                        values: vec![1.0; 4],
                    },
                )
            })
            .collect();
        let (examples, report) = join(&posts, &labels, &features).unwrap();
        assert_eq!(examples.len(), 2);
        assert_eq!(
            report,
            DropReport {
                missing_features: 1,
                missing_labels: 0
            }
        );
    }
}
