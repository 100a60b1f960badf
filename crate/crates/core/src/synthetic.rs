//! Seeded synthetic datasets whose labels follow known linear rules.
//!
//! Features are standard normal. A post is lonely when `w · x > 0`; each
//! fine-grained block's majority label is `argmax(W_c x)`. Targets mimic three
//! annotators: two pick the rule label and one the runner-up, giving vote
//! fractions (2/3, 1/3). Lonely posts near the lonely boundary get a
//! (1/3, 2/3) lonely block instead of (0, 1).
//!
//! Feature vectors are redrawn until they clear every decision boundary by `margin` standard deviations of the score, so the classes are
//! linearly separable with a margin.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::corpus::{FeatureVector, LabeledExample, Post};
use crate::error::{Error, Result};
use crate::rng::{stream_rng, Stream};
use crate::schema::{AnnotationLine, Category, DistributionalLabel, PostLabelSet};

/// Lonely posts whose normalized score falls below this get a split lonely block.
pub const BORDERLINE_SCORE: f64 = 0.5;

const MAX_DRAWS: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SyntheticSpec {
    pub n: usize,
    pub dim: usize,
    pub seed: u64,
    pub margin: f64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            n: 1000,
            dim: 32,
            seed: 0,
            margin: 0.25,
        }
    }
}

/// The generating rule, kept so tests can score against it directly.
#[derive(Clone, Debug)]
pub struct LinearRule {
    pub lonely: Vec<f64>,
    /// One weight matrix per fine-grained block, rows = labels.
    pub blocks: Vec<Vec<Vec<f64>>>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl LinearRule {
    /// `w · x / ‖w‖`, a standard normal variable for standard normal `x`.
    pub fn lonely_score(&self, x: &[f64]) -> f64 {
        dot(&self.lonely, x) / norm(&self.lonely)
    }

    fn block_scores(&self, slot: usize, x: &[f64]) -> Vec<f64> {
        self.blocks[slot]
            .iter()
            .map(|w| dot(w, x) / norm(w))
            .collect()
    }

    /// Rule label and runner-up for fine-grained block `slot`.
    pub fn ranked(&self, slot: usize, x: &[f64]) -> (usize, usize) {
        let scores = self.block_scores(slot, x);
        let mut idx: Vec<usize> = (0..scores.len()).collect();
        idx.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
        (idx[0], idx[1])
    }

    /// Smallest normalized distance from `x` to any rule boundary.
    pub fn margin(&self, x: &[f64]) -> f64 {
        (0..self.blocks.len())
            .map(|slot| {
                let scores = self.block_scores(slot, x);
                let (top, second) = self.ranked(slot, x);
                scores[top] - scores[second]
            })
            .fold(self.lonely_score(x).abs(), f64::min)
    }
}

fn norm(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

pub fn synthetic_dataset(spec: &SyntheticSpec) -> Result<(Vec<LabeledExample>, LinearRule)> {
    if spec.n == 0 || spec.dim == 0 || !(spec.margin >= 0.0 && spec.margin < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "synthetic spec needs n, dim ≥ 1 and margin in [0, 1), got {spec:?}"
        )));
    }
    let mut rng = stream_rng(spec.seed, Stream::Synthetic);
    let mut normal_vec =
        |n: usize| -> Vec<f64> { (0..n).map(|_| rng.sample(StandardNormal)).collect() };
    let rule = LinearRule {
        lonely: normal_vec(spec.dim),
        blocks: Category::FINE_GRAINED
            .iter()
            .map(|c| (0..c.size()).map(|_| normal_vec(spec.dim)).collect())
            .collect(),
    };
    let mut xs = Vec::with_capacity(spec.n);
    while xs.len() < spec.n {
        let x = (0..MAX_DRAWS)
            .map(|_| normal_vec(spec.dim))
            .find(|x| rule.margin(x) >= spec.margin)
            .ok_or_else(|| {
                Error::InvalidArgument(format!("margin {} is unattainable", spec.margin))
            })?;
        xs.push(x);
    }

    let mut out = Vec::with_capacity(spec.n);
    for (i, x) in xs.iter().enumerate() {
        let score = rule.lonely_score(x);
        let labels = if score > 0.0 {
            let lonely = if score < BORDERLINE_SCORE {
                vec![1.0 / 3.0, 2.0 / 3.0]
            } else {
                vec![0.0, 1.0]
            };
            let fine = |slot: usize| {
                let c = Category::FINE_GRAINED[slot];
                let (top, second) = rule.ranked(slot, x);
                let mut v = vec![0.0; c.size()];
                v[top] = 2.0 / 3.0;
                v[second] = 1.0 / 3.0;
                DistributionalLabel::new(c, v)
            };
            PostLabelSet::new(
                DistributionalLabel::new(Category::Lonely, lonely)?,
                [fine(0)?, fine(1)?, fine(2)?, fine(3)?],
            )?
        } else {
            PostLabelSet::nonlonely()
        };
        out.push(LabeledExample {
            post_id: format!("syn{i:05}"),
            features: FeatureVector {
                post_id: format!("syn{i:05}"),
                values: x.iter().map(|v| *v as f32).collect(),
            },
            labels,
            month_index: (i % 36) as i64,
        });
    }
    Ok((out, rule))
}

const DEMO_SUBREDDITS: [&str; 4] = ["college", "lonely", "loneliness", "teenagers"];
const FILLER: [&str; 12] = [
    "today", "really", "think", "people", "week", "feel", "just", "school", "night", "some",
    "talk", "know",
];
/// Unix time of 2018-01-01T00:00:00Z.
const JAN_2018: i64 = 1_514_764_800;
const MONTH_SECS: i64 = 2_629_746;

/// A seeded toy corpus: posts over 48 months from four forums, each with three
/// annotators. Lonely posts mention loneliness and one cue word per
/// fine-grained block (the label name itself), so hashed features carry signal.
pub fn synthetic_corpus(n_posts: usize, seed: u64) -> (Vec<Post>, Vec<AnnotationLine>) {
    let mut rng = stream_rng(seed, Stream::Synthetic);
    let mut posts = Vec::with_capacity(n_posts);
    let mut annotations = Vec::with_capacity(3 * n_posts);
    for i in 0..n_posts {
        let subreddit = DEMO_SUBREDDITS[rng.random_range(0..DEMO_SUBREDDITS.len())];
        let lonely = rng.random_bool(if subreddit.starts_with("lonel") {
            0.85
        } else {
            0.4
        });
        let truth: [usize; 4] = Category::FINE_GRAINED.map(|c| {
            let non_na = c.na_index().unwrap_or(c.size());
            rng.random_range(0..non_na)
        });
        let mut words: Vec<&str> = (0..30)
            .map(|_| FILLER[rng.random_range(0..FILLER.len())])
            .collect();
        if lonely {
            words.push("lonely");
            for (c, &t) in Category::FINE_GRAINED.iter().zip(&truth) {
                words.push(c.labels()[t]);
            }
        }
        let month = rng.random_range(0..48i64);
        let id = format!("p{i:05}");
        posts.push(Post {
            id: id.clone(),
            subreddit: subreddit.to_string(),
            created_utc: JAN_2018
                + month * MONTH_SECS
                + rng.random_range(86_400..MONTH_SECS - 86_400),
            title: format!("post {i}"),
            body: words.join(" "),
        });
        for a in 0..3 {
            let says_lonely = if rng.random_bool(0.85) {
                lonely
            } else {
                !lonely
            };
            let pick = |rng: &mut rand_chacha::ChaCha8Rng, slot: usize| -> Option<String> {
                let c = Category::FINE_GRAINED[slot];
                let label = if rng.random_bool(0.7) {
                    truth[slot]
                } else {
                    rng.random_range(0..c.size())
                };
                says_lonely.then(|| c.labels()[label].to_string())
            };
            annotations.push(AnnotationLine {
                post_id: id.clone(),
                annotator_id: format!("a{a}"),
                lonely: says_lonely,
                duration: pick(&mut rng, 0),
                context: pick(&mut rng, 1),
                interpersonal: pick(&mut rng, 2),
                interaction: pick(&mut rng, 3),
            });
        }
    }
    (posts, annotations)
}
