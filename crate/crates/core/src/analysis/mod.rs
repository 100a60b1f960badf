//! Corpus-level analyses over label sets or model predictions.

mod its;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use its::{
    design_row, its_fit, least_squares, write_its_csv, write_series_csv, ItsFit,
    DEFAULT_INTERVENTION_MONTH, TERMS,
};

use crate::error::{Error, Result};
use crate::io::{csv_err, csv_writer};
use crate::metrics::{argmax, BlockDistributions};
use crate::schema::{drop_na_values, Category, PostLabelSet};

/// One post as seen by the analyses: five block distributions plus metadata.
#[derive(Clone, Debug, PartialEq)]
pub struct AnalysisPost {
    pub post_id: String,
    pub subreddit: Option<String>,
    pub month_index: i64,
    pub lonely: bool,
    pub blocks: BlockDistributions,
}

impl AnalysisPost {
    /// From gold labels: lonely when the post carries fine-grained targets.
    pub fn from_labels(
        post_id: &str,
        subreddit: Option<&str>,
        month_index: i64,
        labels: &PostLabelSet,
    ) -> Self {
        Self {
            post_id: post_id.to_string(),
            subreddit: subreddit.map(str::to_string),
            month_index,
            lonely: labels.has_fine_grained(),
            blocks: labels.blocks().map(|b| b.values().to_vec()).collect(),
        }
    }

    /// From predicted blocks: lonely when the lonely block favors "lonely".
    pub fn from_prediction(
        post_id: &str,
        subreddit: Option<&str>,
        month_index: i64,
        blocks: BlockDistributions,
    ) -> Result<Self> {
        if blocks.len() != Category::ALL.len()
            || Category::ALL
                .iter()
                .any(|c| blocks[c.index()].len() != c.size())
        {
            return Err(Error::Shape(format!(
                "post {post_id:?}: prediction does not match the label schema"
            )));
        }
        Ok(Self {
            post_id: post_id.to_string(),
            subreddit: subreddit.map(str::to_string),
            month_index,
            lonely: blocks[0][1] > blocks[0][0],
            blocks,
        })
    }

    pub fn block(&self, category: Category) -> &[f64] {
        &self.blocks[category.index()]
    }
}

/// How posts are partitioned into groups.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Grouping {
    /// Every post in one group named `all`.
    All,
    /// One group per subreddit.
    BySubreddit,
    /// Posts from the listed subreddits, pooled into one group.
    Subreddits(BTreeSet<String>),
}

impl Grouping {
    pub fn group_of(&self, post: &AnalysisPost) -> Option<String> {
        match self {
            Grouping::All => Some("all".into()),
            Grouping::BySubreddit => post.subreddit.clone(),
            Grouping::Subreddits(set) => post
                .subreddit
                .as_ref()
                .filter(|s| set.contains(*s))
                .map(|_| set.iter().cloned().collect::<Vec<_>>().join("+")),
        }
    }

    fn needs_subreddit(&self) -> bool {
        !matches!(self, Grouping::All)
    }
}

impl FromStr for Grouping {
    type Err = Error;

    /// Accepts `all`, `subreddit`, or `subreddit=a,b,...`.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "all" => Ok(Grouping::All),
            "subreddit" => Ok(Grouping::BySubreddit),
            other => {
                let list = other
                    .strip_prefix("subreddit=")
                    .ok_or_else(|| Error::InvalidArgument(format!("unknown grouping {other:?}")))?;
                let set: BTreeSet<String> = list
                    .split(',')
                    .map(|v| v.trim().to_string())
                    .filter(|v| !v.is_empty())
                    .collect();
                if set.is_empty() {
                    return Err(Error::InvalidArgument(
                        "empty subreddit list in grouping".into(),
                    ));
                }
                Ok(Grouping::Subreddits(set))
            }
        }
    }
}

impl fmt::Display for Grouping {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Grouping::All => f.write_str("all"),
            Grouping::BySubreddit => f.write_str("subreddit"),
            Grouping::Subreddits(set) => {
                write!(
                    f,
                    "subreddit={}",
                    set.iter().cloned().collect::<Vec<_>>().join(",")
                )
            }
        }
    }
}

fn grouped<'a>(
    posts: &'a [AnalysisPost],
    grouping: &Grouping,
) -> Result<BTreeMap<String, Vec<&'a AnalysisPost>>> {
    let mut groups: BTreeMap<String, Vec<&AnalysisPost>> = BTreeMap::new();
    for post in posts {
        if grouping.needs_subreddit() && post.subreddit.is_none() {
            return Err(Error::InvalidArgument(format!(
                "grouping {grouping} needs a subreddit for post {:?}",
                post.post_id
            )));
        }
        if let Some(g) = grouping.group_of(post) {
            groups.entry(g).or_default().push(post);
        }
    }
    Ok(groups)
}

/// Non-NA labels of a category, in block order.
pub fn reported_labels(category: Category) -> &'static [&'static str] {
    let labels = category.labels();
    match category.na_index() {
        Some(na) => &labels[..na],
        None => labels,
    }
}

/// Block distribution with NA removed and the rest renormalized; blocks
/// without NA are only renormalized.
fn without_na(category: Category, values: &[f64]) -> Result<Vec<f64>> {
    match category.na_index() {
        Some(na) => drop_na_values(category, &values[..na]),
        None => {
            let mass: f64 = values.iter().sum();
            if mass <= 0.0 {
                return Err(Error::Empty(format!("{category} block has no mass")));
            }
            Ok(values.iter().map(|v| v / mass).collect())
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompositionRow {
    pub group: String,
    pub category: Category,
    pub n_posts: usize,
    /// Percentages over the non-NA labels of `category`.
    pub percentages: Vec<f64>,
}

/// Per group and fine-grained category: the mean distribution over the
/// group's lonely posts, with NA removed, as percentages.
pub fn composition_table(
    posts: &[AnalysisPost],
    grouping: &Grouping,
) -> Result<Vec<CompositionRow>> {
    let groups = grouped(posts, grouping)?;
    if groups.is_empty() {
        return Err(Error::Empty("no posts fall in any group".into()));
    }
    let mut rows = Vec::new();
    for (group, members) in groups {
        let lonely: Vec<&AnalysisPost> = members.into_iter().filter(|p| p.lonely).collect();
        if lonely.is_empty() {
            return Err(Error::Empty(format!("group {group:?} has no lonely posts")));
        }
        for category in Category::FINE_GRAINED {
            let mut mean = vec![0.0; category.size()];
            for post in &lonely {
                for (m, v) in mean.iter_mut().zip(post.block(category)) {
                    *m += v;
                }
            }
            let n = lonely.len() as f64;
            mean.iter_mut().for_each(|m| *m /= n);
            let normalized = without_na(category, &mean)
                .map_err(|e| Error::InvalidArgument(format!("group {group:?}: {e}")))?;
            rows.push(CompositionRow {
                group: group.clone(),
                category,
                n_posts: lonely.len(),
                percentages: normalized.iter().map(|v| v * 100.0).collect(),
            });
        }
    }
    Ok(rows)
}

pub fn write_composition_csv(path: &Path, rows: &[CompositionRow]) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["group", "category", "label", "percent", "n_posts"])
        .map_err(|e| csv_err(path, e))?;
    for row in rows {
        for (label, pct) in reported_labels(row.category).iter().zip(&row.percentages) {
            w.write_record([
                row.group.clone(),
                row.category.to_string(),
                label.to_string(),
                format!("{pct:.6}"),
                row.n_posts.to_string(),
            ])
            .map_err(|e| csv_err(path, e))?;
        }
    }
    w.flush().map_err(|e| Error::io(path, e))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConditionMode {
    /// Weight each post by its (NA-dropped) mass on the condition label.
    #[default]
    Soft,
    /// Count a post when the condition label is its argmax, using its argmax interaction label.
    Argmax,
}

impl FromStr for ConditionMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "soft" => Ok(ConditionMode::Soft),
            "argmax" => Ok(ConditionMode::Argmax),
            other => Err(Error::InvalidArgument(format!(
                "unknown condition mode {other:?}"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Conditional {
    pub category: Category,
    pub label: usize,
    /// Distribution over interaction labels.
    pub distribution: Vec<f64>,
    /// Total condition mass behind the estimate.
    pub weight: f64,
}

/// Distribution of interaction labels among lonely posts conditioned on
/// label `label` of `category` (duration, context or interpersonal).
pub fn coping_conditionals(
    posts: &[AnalysisPost],
    category: Category,
    label: usize,
    mode: ConditionMode,
) -> Result<Conditional> {
    let na = category.na_index().ok_or_else(|| {
        Error::InvalidArgument(format!(
            "conditioning category must have an NA label, got {category}"
        ))
    })?;
    if label >= na {
        return Err(Error::InvalidArgument(format!(
            "condition label index {label} is not a non-NA {category} label"
        )));
    }
    let k = Category::Interaction.size();
    let mut numer = vec![0.0; k];
    let mut denom = 0.0;
    for post in posts.iter().filter(|p| p.lonely) {
        let interaction = post.block(Category::Interaction);
        let Ok(condition) = drop_na_values(category, &post.block(category)[..na]) else {
            continue;
        };
        let a_mass: f64 = interaction.iter().sum();
        if a_mass <= 0.0 {
            continue;
        }
        match mode {
            ConditionMode::Soft => {
                let d = condition[label];
                for (n, a) in numer.iter_mut().zip(interaction) {
                    *n += d * a / a_mass;
                }
                denom += d;
            }
            ConditionMode::Argmax => {
                if argmax(&condition) == label {
                    numer[argmax(interaction)] += 1.0;
                    denom += 1.0;
                }
            }
        }
    }
    if denom <= 0.0 {
        return Err(Error::Empty(format!(
            "no mass on {category} label {:?}",
            category.labels()[label]
        )));
    }
    Ok(Conditional {
        category,
        label,
        distribution: numer.iter().map(|n| n / denom).collect(),
        weight: denom,
    })
}

/// Conditionals for every non-NA label of `category`; labels without mass are skipped.
pub fn coping_table(
    posts: &[AnalysisPost],
    category: Category,
    mode: ConditionMode,
) -> Result<Vec<Conditional>> {
    let na = category.na_index().ok_or_else(|| {
        Error::InvalidArgument(format!(
            "conditioning category must have an NA label, got {category}"
        ))
    })?;
    let mut out = Vec::new();
    for label in 0..na {
        match coping_conditionals(posts, category, label, mode) {
            Ok(c) => out.push(c),
            Err(Error::Empty(msg)) => log::warn!("{msg}; skipped"),
            Err(e) => return Err(e),
        }
    }
    if out.is_empty() {
        return Err(Error::Empty(format!("no {category} label carries mass")));
    }
    Ok(out)
}

pub fn write_coping_csv(path: &Path, rows: &[Conditional]) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record([
        "condition_category",
        "condition_label",
        "interaction_label",
        "probability",
        "weight",
    ])
    .map_err(|e| csv_err(path, e))?;
    for row in rows {
        for (label, p) in Category::Interaction.labels().iter().zip(&row.distribution) {
            w.write_record([
                row.category.to_string(),
                row.category.labels()[row.label].to_string(),
                label.to_string(),
                format!("{p:.6}"),
                format!("{:.6}", row.weight),
            ])
            .map_err(|e| csv_err(path, e))?;
        }
    }
    w.flush().map_err(|e| Error::io(path, e))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SeriesPoint {
    pub month: i64,
    /// `None` when the month has no eligible posts.
    pub value: Option<f64>,
    pub n_posts: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ItsSeries {
    pub intervention_month: i64,
    /// Consecutive months, strictly increasing.
    pub points: Vec<SeriesPoint>,
}

impl ItsSeries {
    /// Months that carry a value.
    pub fn observed(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.points
            .iter()
            .filter_map(|p| p.value.map(|v| (p.month, v)))
    }
}

/// Monthly mean mass on `label` of `category` over the lonely posts of the
/// group(s) selected by `grouping`, after dropping NA. Posts whose block is
/// all NA do not count; a month left without posts is reported as missing.
pub fn monthly_proportions(
    posts: &[AnalysisPost],
    category: Category,
    label: usize,
    grouping: &Grouping,
    intervention_month: i64,
) -> Result<ItsSeries> {
    if category == Category::Lonely {
        return Err(Error::InvalidArgument(
            "monthly proportions need a fine-grained category".into(),
        ));
    }
    if category.na_index() == Some(label) || label >= category.size() {
        return Err(Error::InvalidArgument(format!(
            "label index {label} is not a non-NA {category} label"
        )));
    }
    let groups = grouped(posts, grouping)?;
    let members: Vec<&AnalysisPost> = groups
        .values()
        .flatten()
        .copied()
        .filter(|p| p.lonely)
        .collect();
    if members.is_empty() {
        return Err(Error::Empty(format!(
            "no lonely posts in grouping {grouping}"
        )));
    }
    let mut months: BTreeMap<i64, (f64, usize, usize)> = BTreeMap::new();
    for post in members {
        let entry = months.entry(post.month_index).or_default();
        entry.2 += 1;
        match without_na(category, post.block(category)) {
            Ok(dist) => {
                entry.0 += dist[label];
                entry.1 += 1;
            }
            Err(Error::NaOnly(_) | Error::Empty(_)) => {}
            Err(e) => return Err(e),
        }
    }
    let first = *months.keys().next().expect("non-empty");
    let last = *months.keys().next_back().expect("non-empty");
    let points = (first..=last)
        .map(|month| {
            let (sum, n, total) = months.get(&month).copied().unwrap_or_default();
            if n == 0 {
                if total > 0 {
                    log::warn!(
                        "month {month}: all {total} posts have only NA {category} mass; excluded"
                    );
                } else {
                    log::warn!("month {month}: no posts; excluded");
                }
            }
            SeriesPoint {
                month,
                value: (n > 0).then(|| sum / n as f64),
                n_posts: n,
            }
        })
        .collect();
    Ok(ItsSeries {
        intervention_month,
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn post(id: &str, sub: &str, month: i64, blocks: [&[f64]; 5]) -> AnalysisPost {
        AnalysisPost {
            post_id: id.into(),
            subreddit: Some(sub.into()),
            month_index: month,
            lonely: true,
            blocks: blocks.iter().map(|b| b.to_vec()).collect(),
        }
    }

    const L: &[f64] = &[0.0, 1.0];
    const DUR_NA: &[f64] = &[0.0, 0.0, 0.0, 1.0];
    const CTX: &[f64] = &[1.0, 0.0, 0.0, 0.0, 0.0];
    const INTER: &[f64] = &[0.0, 0.0, 0.0, 0.0, 1.0];

    #[test]
    fn composition_drops_na_after_averaging() {
        let posts = vec![
            post(
                "a",
                "college",
                0,
                [L, &[1.0, 0.0, 0.0, 0.0], CTX, CTX, INTER],
            ),
            post(
                "b",
                "college",
                0,
                [L, &[0.0, 0.5, 0.0, 0.5], CTX, CTX, INTER],
            ),
        ];
        let rows = composition_table(&posts, &Grouping::All).unwrap();
        let duration = rows
            .iter()
            .find(|r| r.category == Category::Duration)
            .unwrap();
        let expected = [200.0 / 3.0, 100.0 / 3.0, 0.0];
        for (a, b) in duration.percentages.iter().zip(expected) {
            assert!((a - b).abs() < 1e-9);
        }
        for row in &rows {
            assert!((row.percentages.iter().sum::<f64>() - 100.0).abs() < 1e-6);
        }
    }

    #[test]
    fn composition_rejects_all_na_group() {
        let posts = vec![post("a", "x", 0, [L, DUR_NA, CTX, CTX, INTER])];
        assert!(composition_table(&posts, &Grouping::All).is_err());
    }

    #[test]
    fn composition_by_subreddit_ignores_nonlonely() {
        let mut quiet = post(
            "c",
            "teenagers",
            0,
            [L, &[1.0, 0.0, 0.0, 0.0], CTX, CTX, INTER],
        );
        quiet.lonely = false;
        let posts = vec![
            post(
                "a",
                "college",
                0,
                [L, &[0.0, 1.0, 0.0, 0.0], CTX, CTX, INTER],
            ),
            quiet,
        ];
        let err = composition_table(&posts, &Grouping::BySubreddit).unwrap_err();
        assert!(err.to_string().contains("teenagers"));
        let rows = composition_table(&posts, &"subreddit=college".parse().unwrap()).unwrap();
        assert_eq!(rows.len(), 4);
        assert_eq!(rows[0].percentages, vec![0.0, 100.0, 0.0]);
    }

    #[test]
    fn conditional_weighted_case() {
        let posts = vec![
            post(
                "a",
                "x",
                0,
                [
                    L,
                    &[2.0 / 3.0, 1.0 / 3.0, 0.0, 0.0],
                    CTX,
                    CTX,
                    &[1.0 / 3.0, 0.0, 0.0, 0.0, 2.0 / 3.0],
                ],
            ),
            post(
                "b",
                "x",
                0,
                [
                    L,
                    &[1.0 / 3.0, 2.0 / 3.0, 0.0, 0.0],
                    CTX,
                    CTX,
                    &[1.0, 0.0, 0.0, 0.0, 0.0],
                ],
            ),
        ];
        let c = coping_conditionals(&posts, Category::Duration, 0, ConditionMode::Soft).unwrap();
        assert!((c.distribution[0] - 5.0 / 9.0).abs() < 1e-12);
        assert!((c.distribution.iter().sum::<f64>() - 1.0).abs() < 1e-9);

        let mut with_dup = posts.clone();
        with_dup.push(post(
            "z",
            "x",
            0,
            [L, &[0.0, 1.0, 0.0, 0.0], CTX, CTX, INTER],
        ));
        let d = coping_conditionals(&with_dup, Category::Duration, 0, ConditionMode::Soft).unwrap();
        assert_eq!(c.distribution, d.distribution);

        let hard =
            coping_conditionals(&posts, Category::Duration, 0, ConditionMode::Argmax).unwrap();
        assert_eq!(hard.distribution, vec![0.0, 0.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn conditional_errors() {
        let posts = vec![post(
            "a",
            "x",
            0,
            [L, &[0.0, 1.0, 0.0, 0.0], CTX, CTX, INTER],
        )];
        assert!(coping_conditionals(&posts, Category::Duration, 0, ConditionMode::Soft).is_err());
        assert!(
            coping_conditionals(&posts, Category::Interaction, 0, ConditionMode::Soft).is_err()
        );
        assert!(coping_conditionals(&posts, Category::Duration, 3, ConditionMode::Soft).is_err());
    }

    #[test]
    fn monthly_series_means_and_gaps() {
        let phys = |m: f64| vec![1.0 - m, m, 0.0, 0.0, 0.0];
        let ctx_na: &[f64] = &[0.0, 0.0, 0.0, 0.0, 1.0];
        let half = phys(0.5);
        let none = phys(0.0);
        let posts = vec![
            post("a", "x", 3, [L, DUR_NA, &half, CTX, INTER]),
            post("b", "x", 3, [L, DUR_NA, &none, CTX, INTER]),
            post("c", "x", 4, [L, DUR_NA, ctx_na, CTX, INTER]),
            post("d", "x", 6, [L, DUR_NA, &half, CTX, INTER]),
        ];
        let s = monthly_proportions(&posts, Category::Context, 1, &Grouping::All, 26).unwrap();
        let months: Vec<i64> = s.points.iter().map(|p| p.month).collect();
        assert_eq!(months, vec![3, 4, 5, 6]);
        assert_eq!(s.points[0].value, Some(0.25));
        assert_eq!(s.points[1].value, None);
        assert_eq!(s.points[2].value, None);
        assert_eq!(s.observed().count(), 2);
        assert!(monthly_proportions(&posts, Category::Context, 4, &Grouping::All, 26).is_err());
    }

    #[test]
    fn grouping_round_trips() {
        for text in ["all", "subreddit", "subreddit=a,b"] {
            let g: Grouping = text.parse().unwrap();
            assert_eq!(g.to_string(), text);
        }
        assert!("region".parse::<Grouping>().is_err());
    }
}
