use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;

use super::config::{missing, FeatureSource, RunConfig};
use super::manifest::ManifestBuilder;
use crate::analysis::{
    composition_table, coping_table, its_fit, monthly_proportions, write_composition_csv,
    write_coping_csv, write_its_csv, write_series_csv, AnalysisPost,
};
use crate::corpus::{
    hash_featurize, join_dataset, load_embeddings, post_stratum, split_dataset, stratified_sample,
    write_embeddings, CandidateFilter, CandidateKind, DatasetRow, FeatureVector, LabeledExample,
    Post, Split, SplitAssignment,
};
use crate::error::{Error, Result};
use crate::io::{csv_err, csv_writer, read_jsonl, write_jsonl};
use crate::metrics::{argmax, evaluate_run, summarize, write_eval_csv, BlockDistributions};
use crate::models::{
    self, load_checkpoint, save_checkpoint, Checkpoint, Model, ModelKind, TrainConfig,
};
use crate::schema::{pairwise_agreement, AnnotationLine, AnnotationRecord, Category};
use crate::synthetic::synthetic_corpus;

fn read_posts(cfg: &RunConfig, manifest: &mut ManifestBuilder) -> Result<Vec<Post>> {
    let path = RunConfig::require(&cfg.posts, "--posts")?;
    manifest.input(path);
    let posts: Vec<Post> = read_jsonl(path)?;
    let mut seen = std::collections::BTreeSet::new();
    for p in &posts {
        if !seen.insert(p.id.as_str()) {
            return Err(Error::DuplicateId(p.id.clone()));
        }
    }
    Ok(posts)
}

fn read_dataset(path: &Path, manifest: &mut ManifestBuilder) -> Result<Vec<DatasetRow>> {
    manifest.input(path);
    read_jsonl(path)
}

fn write_csv_rows(
    path: &Path,
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(header).map_err(|e| csv_err(path, e))?;
    for row in rows {
        w.write_record(&row).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

fn enum_name(value: impl serde::Serialize) -> String {
    serde_json::to_value(value)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default()
}

pub fn filter(cfg: &RunConfig) -> Result<()> {
    let mut manifest = ManifestBuilder::new("filter", cfg);
    let posts = read_posts(cfg, &mut manifest)?;
    let out = cfg.out_dir()?;
    let filter = CandidateFilter::default();
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    let mut rows = Vec::with_capacity(posts.len());
    for post in &posts {
        let kind = filter.classify(post);
        *counts.entry(kind.as_str()).or_default() += 1;
        rows.push(vec![
            post.id.clone(),
            post.subreddit.clone(),
            kind.as_str().to_string(),
            post.month_index()?.to_string(),
        ]);
    }
    write_csv_rows(
        &out.join("candidates.csv"),
        &["post_id", "subreddit", "kind", "month_index"],
        rows,
    )?;
    manifest.output("candidates.csv");
    manifest.summary("counts", &counts);
    manifest.write(out)
}

pub fn sample(cfg: &RunConfig) -> Result<()> {
    let mut manifest = ManifestBuilder::new("sample", cfg);
    let posts = read_posts(cfg, &mut manifest)?;
    let target_n = *RunConfig::require(&cfg.target_n, "--target-n")?;
    let out = cfg.out_dir()?;
    let filter = CandidateFilter::default();
    let candidates: Vec<&Post> = posts
        .iter()
        .filter(|p| filter.classify(p) != CandidateKind::Excluded)
        .collect();
    let chosen = stratified_sample(&candidates, |p| post_stratum(p), target_n, cfg.seed())?;
    let picked: Vec<&Post> = chosen.iter().map(|&i| candidates[i]).collect();
    write_jsonl(&out.join("sample.jsonl"), picked)?;
    manifest.output("sample.jsonl");
    manifest.summary("candidates", candidates.len());
    manifest.summary("sampled", chosen.len());
    manifest.write(out)
}

pub fn aggregate(cfg: &RunConfig) -> Result<()> {
    let mut manifest = ManifestBuilder::new("aggregate", cfg);
    let posts = read_posts(cfg, &mut manifest)?;
    let ann_path = RunConfig::require(&cfg.annotations, "--annotations")?;
    manifest.input(ann_path);
    let lines: Vec<AnnotationLine> = read_jsonl(ann_path)?;
    let records = lines
        .into_iter()
        .map(AnnotationRecord::try_from)
        .collect::<Result<Vec<_>>>()?;
    let out = cfg.out_dir()?;

    let filter = CandidateFilter::default();
    let kinds: BTreeMap<String, CandidateKind> = posts
        .iter()
        .map(|p| (p.id.clone(), filter.classify(p)))
        .collect();
    let months: BTreeMap<&str, i64> = posts
        .iter()
        .map(|p| Ok((p.id.as_str(), p.month_index()?)))
        .collect::<Result<_>>()?;
    let report = crate::schema::aggregate_corpus(&records, &kinds)?;
    if !report.unmatched.is_empty() {
        log::warn!(
            "{} annotated posts are missing from the posts file or excluded",
            report.unmatched.len()
        );
    }
    let rows: Vec<DatasetRow> = report
        .retained
        .iter()
        .map(|(id, labels)| DatasetRow::new(id, labels, months[id.as_str()]))
        .collect();
    write_jsonl(&out.join("dataset.jsonl"), &rows)?;
    write_csv_rows(
        &out.join("discarded.csv"),
        &["post_id", "reason"],
        report
            .discarded
            .iter()
            .map(|(id, r)| vec![id.clone(), enum_name(r)]),
    )?;
    let mut agreement = Vec::new();
    for category in Category::ALL {
        for pair in pairwise_agreement(&records, category) {
            agreement.push(vec![
                category.to_string(),
                pair.annotator_a,
                pair.annotator_b,
                pair.shared.to_string(),
                pair.matches.to_string(),
                format!("{:.6}", pair.agreement),
            ]);
        }
    }
    write_csv_rows(
        &out.join("agreement.csv"),
        &[
            "category",
            "annotator_a",
            "annotator_b",
            "shared",
            "matches",
            "agreement",
        ],
        agreement,
    )?;
    for name in ["dataset.jsonl", "discarded.csv", "agreement.csv"] {
        manifest.output(name);
    }
    let mut reasons: BTreeMap<String, usize> = BTreeMap::new();
    for r in report.discarded.values() {
        *reasons.entry(enum_name(r)).or_default() += 1;
    }
    manifest.summary("retained", rows.len());
    manifest.summary(
        "retained_lonely",
        report
            .retained
            .values()
            .filter(|l| l.has_fine_grained())
            .count(),
    );
    manifest.summary("discarded", &reasons);
    manifest.summary("unmatched", report.unmatched.len());
    manifest.write(out)
}

pub fn featurize(cfg: &RunConfig) -> Result<()> {
    let mut manifest = ManifestBuilder::new("featurize", cfg);
    let posts = read_posts(cfg, &mut manifest)?;
    let out = cfg.out_dir()?;
    let features = posts
        .iter()
        .map(|p| hash_featurize(p, cfg.hash_dim(), cfg.seed()))
        .collect::<Result<Vec<_>>>()?;
    write_embeddings(&out.join("embeddings.jsonl"), &features)?;
    manifest.output("embeddings.jsonl");
    manifest.summary("dim", cfg.hash_dim());
    manifest.summary("rows", features.len());
    manifest.write(out)
}

fn write_split(path: &Path, split: &SplitAssignment) -> Result<()> {
    write_csv_rows(
        path,
        &["post_id", "split"],
        split
            .assignments
            .iter()
            .map(|(id, s)| vec![id.clone(), s.as_str().to_string()]),
    )
}

#[derive(Deserialize)]
struct SplitRow {
    post_id: String,
    split: Split,
}

fn read_split(path: &Path, seed: u64) -> Result<SplitAssignment> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| csv_err(path, e))?;
    let mut assignments = BTreeMap::new();
    for (i, row) in reader.deserialize::<SplitRow>().enumerate() {
        let row = row.map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: i + 2,
            message: e.to_string(),
        })?;
        if assignments.insert(row.post_id.clone(), row.split).is_some() {
            return Err(Error::DuplicateId(row.post_id));
        }
    }
    Ok(SplitAssignment { assignments, seed })
}

pub fn split(cfg: &RunConfig) -> Result<()> {
    let mut manifest = ManifestBuilder::new("split", cfg);
    let rows = read_dataset(
        RunConfig::require(&cfg.dataset, "--dataset")?,
        &mut manifest,
    )?;
    let out = cfg.out_dir()?;
    let ids: Vec<&str> = rows.iter().map(|r| r.post_id.as_str()).collect();
    let split = split_dataset(&ids, cfg.seed())?;
    write_split(&out.join("split.csv"), &split)?;
    manifest.output("split.csv");
    for s in [Split::Train, Split::Validation, Split::Test] {
        manifest.summary(s.as_str(), split.count(s));
    }
    manifest.write(out)
}

/// Features keyed by post id, from an embeddings file or hashed from posts.
fn load_features(
    cfg: &RunConfig,
    hash_seed: u64,
    manifest: &mut ManifestBuilder,
) -> Result<BTreeMap<String, FeatureVector>> {
    match cfg.feature_source() {
        FeatureSource::Embeddings => {
            let path = RunConfig::require(&cfg.embeddings, "--embeddings")?;
            manifest.input(path);
            load_embeddings(path)
        }
        FeatureSource::Hash => {
            let posts = read_posts(cfg, manifest).map_err(|e| match e {
                Error::InvalidArgument(_) => missing("--posts (or --embeddings) for features"),
                other => other,
            })?;
            posts
                .iter()
                .map(|p| Ok((p.id.clone(), hash_featurize(p, cfg.hash_dim(), hash_seed)?)))
                .collect()
        }
    }
}

fn train_config(cfg: &RunConfig, kind: ModelKind) -> TrainConfig {
    let mut tc = TrainConfig::for_kind(kind);
    tc.seed = cfg.seed();
    if let Some(v) = cfg.epochs {
        tc.epochs = v;
    }
    if let Some(v) = cfg.batch_size {
        tc.batch_size = v;
    }
    if let Some(v) = cfg.lr {
        tc.base_lr = v;
    }
    if let Some(v) = cfg.warmup_ratio {
        tc.warmup_ratio = v;
    }
    if let Some(v) = cfg.patience {
        tc.patience = v;
    }
    if let Some(v) = cfg.beta {
        tc.beta = v;
    }
    tc
}

pub fn train(cfg: &RunConfig) -> Result<()> {
    let mut manifest = ManifestBuilder::new("train", cfg);
    let kind = cfg.model_kind()?;
    let rows = read_dataset(
        RunConfig::require(&cfg.dataset, "--dataset")?,
        &mut manifest,
    )?;
    let features = load_features(cfg, cfg.seed(), &mut manifest)?;
    let (examples, dropped) = join_dataset(&rows, &features)?;
    if dropped.missing_features > 0 {
        log::warn!(
            "{} labeled posts have no features and were dropped",
            dropped.missing_features
        );
    }
    let split = match &cfg.split {
        Some(path) => {
            manifest.input(path);
            read_split(path, cfg.seed())?
        }
        None => {
            let ids: Vec<&str> = examples.iter().map(|e| e.post_id.as_str()).collect();
            split_dataset(&ids, cfg.seed())?
        }
    };
    let pick = |s: Split| -> Vec<LabeledExample> {
        examples
            .iter()
            .filter(|e| split.assignments.get(&e.post_id) == Some(&s))
            .cloned()
            .collect()
    };
    let (train_set, val_set) = (pick(Split::Train), pick(Split::Validation));
    let out = cfg.out_dir()?;
    let tc = train_config(cfg, kind);
    let outcome = models::train(kind, &train_set, &val_set, &tc)?;

    save_checkpoint(
        &out.join("model.ckpt"),
        &Checkpoint {
            model: outcome.model.clone(),
            seed: cfg.seed(),
        },
    )?;
    write_csv_rows(
        &out.join("train_log.csv"),
        &[
            "epoch",
            "train_loss",
            "val_loss",
            "val_accuracy",
            "lr",
            "improved",
        ],
        outcome.log.iter().map(|l| {
            vec![
                l.epoch.to_string(),
                format!("{:.8}", l.train_loss),
                format!("{:.8}", l.val_loss),
                format!("{:.6}", l.val_accuracy),
                format!("{:.8e}", l.lr),
                l.improved.to_string(),
            ]
        }),
    )?;
    write_split(&out.join("split.csv"), &split)?;
    for name in ["model.ckpt", "train_log.csv", "split.csv"] {
        manifest.output(name);
    }
    manifest.summary("train_config", &tc);
    manifest.summary("model", kind.as_str());
    manifest.summary("input_dim", outcome.model.input_dim());
    manifest.summary("n_train", train_set.len());
    manifest.summary("n_validation", val_set.len());
    manifest.summary("dropped_missing_features", dropped.missing_features);
    manifest.summary("best_epoch", outcome.best_epoch);
    manifest.summary("best_val_accuracy", outcome.best_val_accuracy);
    manifest.summary("stopped_early", outcome.stopped_early);
    manifest.write(out)
}

/// Posts to score with their month and forum, from a dataset or a posts file.
struct Targets {
    ids: Vec<(String, i64, Option<String>)>,
}

fn prediction_targets(cfg: &RunConfig, manifest: &mut ManifestBuilder) -> Result<Targets> {
    let posts = match &cfg.posts {
        Some(_) => Some(read_posts(cfg, manifest)?),
        None => None,
    };
    let mut ids: Vec<(String, i64, Option<String>)> = match (&cfg.dataset, posts) {
        (Some(path), posts) => {
            let subreddits: BTreeMap<String, String> = posts
                .unwrap_or_default()
                .into_iter()
                .map(|p| (p.id, p.subreddit))
                .collect();
            read_dataset(path, manifest)?
                .into_iter()
                .map(|r| {
                    let sub = subreddits.get(&r.post_id).cloned();
                    (r.post_id, r.month_index, sub)
                })
                .collect()
        }
        (None, Some(posts)) => posts
            .into_iter()
            .map(|p| Ok((p.id.clone(), p.month_index()?, Some(p.subreddit))))
            .collect::<Result<_>>()?,
        (None, None) => return Err(missing("--dataset or --posts")),
    };
    if let Some(subset) = cfg.subset {
        let path = cfg
            .split
            .as_ref()
            .ok_or_else(|| missing("--split (needed by --subset)"))?;
        manifest.input(path);
        let split = read_split(path, cfg.seed())?;
        ids.retain(|(id, _, _)| split.assignments.get(id) == Some(&subset));
    }
    ids.sort();
    Ok(Targets { ids })
}

fn checkpoint_and_beta(
    cfg: &RunConfig,
    manifest: &mut ManifestBuilder,
) -> Result<(Checkpoint, Option<f64>)> {
    let path = RunConfig::require(&cfg.checkpoint, "--checkpoint")?;
    manifest.input(path);
    let ckpt = load_checkpoint(path)?;
    let kind = ckpt.model.kind();
    if let Some(requested) = cfg.model {
        if requested != kind {
            return Err(Error::InvalidArgument(format!(
                "--model {requested} but the checkpoint holds a {kind} model"
            )));
        }
    }
    let beta = match kind {
        ModelKind::EmbedMlp if cfg.beta.is_some() => {
            return Err(Error::InvalidArgument(
                "--beta applies only to hdln checkpoints".into(),
            ))
        }
        ModelKind::EmbedMlp => None,
        ModelKind::Hdln => Some(cfg.beta.unwrap_or(0.0)),
    };
    Ok((ckpt, beta))
}

fn blocks_row(id: &str, month: i64, blocks: &BlockDistributions) -> DatasetRow {
    DatasetRow {
        post_id: id.to_string(),
        lonely: blocks[0].clone(),
        duration: blocks[1].clone(),
        context: blocks[2].clone(),
        interpersonal: blocks[3].clone(),
        interaction: blocks[4].clone(),
        month_index: month,
    }
}

fn row_blocks(row: &DatasetRow) -> BlockDistributions {
    vec![
        row.lonely.clone(),
        row.duration.clone(),
        row.context.clone(),
        row.interpersonal.clone(),
        row.interaction.clone(),
    ]
}

pub fn predict(cfg: &RunConfig) -> Result<()> {
    let mut manifest = ManifestBuilder::new("predict", cfg);
    let (ckpt, beta) = checkpoint_and_beta(cfg, &mut manifest)?;
    let targets = prediction_targets(cfg, &mut manifest)?;
    let features = load_features(cfg, ckpt.seed, &mut manifest)?;
    let out = cfg.out_dir()?;
    let mut rows = Vec::with_capacity(targets.ids.len());
    let mut missing_features = 0usize;
    let mut lonely = 0usize;
    for (id, month, _) in &targets.ids {
        let Some(fv) = features.get(id) else {
            missing_features += 1;
            continue;
        };
        let pred = ckpt.model.predict(&fv.values, beta)?;
        lonely += usize::from(pred.predicted_lonely());
        rows.push(blocks_row(id, *month, pred.blocks()));
    }
    if missing_features > 0 {
        log::warn!("{missing_features} posts have no features and were skipped");
    }
    write_jsonl(&out.join("predictions.jsonl"), &rows)?;
    manifest.output("predictions.jsonl");
    manifest.summary("model", ckpt.model.kind().as_str());
    manifest.summary("beta", beta);
    manifest.summary("predicted", rows.len());
    manifest.summary("predicted_lonely", lonely);
    manifest.summary("missing_features", missing_features);
    manifest.write(out)
}

pub fn eval(cfg: &RunConfig) -> Result<()> {
    let mut manifest = ManifestBuilder::new("eval", cfg);
    let dataset = read_dataset(
        RunConfig::require(&cfg.dataset, "--dataset")?,
        &mut manifest,
    )?;
    if cfg.predictions.is_empty() {
        return Err(missing("--predictions"));
    }
    let subset = match (cfg.subset, &cfg.split) {
        (Some(s), Some(path)) => {
            manifest.input(path);
            Some((s, read_split(path, cfg.seed())?))
        }
        (Some(_), None) => return Err(missing("--split (needed by --subset)")),
        _ => None,
    };
    let targets: BTreeMap<String, crate::schema::PostLabelSet> = dataset
        .iter()
        .filter(|r| {
            subset
                .as_ref()
                .is_none_or(|(s, split)| split.assignments.get(&r.post_id) == Some(s))
        })
        .map(|r| Ok((r.post_id.clone(), r.labels()?)))
        .collect::<Result<_>>()?;
    let out = cfg.out_dir()?;
    let mut runs = Vec::new();
    let mut scored = Vec::new();
    for path in &cfg.predictions {
        manifest.input(path);
        let preds: Vec<DatasetRow> = read_jsonl(path)?;
        let (mut p, mut t) = (Vec::new(), Vec::new());
        for row in &preds {
            if let Some(target) = targets.get(&row.post_id) {
                p.push(row_blocks(row));
                t.push(target.clone());
            }
        }
        if p.is_empty() {
            return Err(Error::Empty(format!(
                "{} shares no posts with the dataset",
                path.display()
            )));
        }
        scored.push(p.len());
        runs.push(evaluate_run(&p, &t)?);
    }
    let rows = summarize(&runs)?;
    write_eval_csv(&out.join("eval.csv"), &rows)?;
    manifest.output("eval.csv");
    manifest.summary("runs", runs.len());
    manifest.summary("scored_posts", &scored);
    manifest.summary(
        "binary",
        runs.iter()
            .map(|r| serde_json::to_value(r.binary).unwrap_or_default())
            .collect::<Vec<_>>(),
    );
    manifest.write(out)
}

/// Posts for the corpus analyses: predictions if given, else gold labels.
fn analysis_posts(cfg: &RunConfig, manifest: &mut ManifestBuilder) -> Result<Vec<AnalysisPost>> {
    let subreddits: BTreeMap<String, String> = match &cfg.posts {
        Some(_) => read_posts(cfg, manifest)?
            .into_iter()
            .map(|p| (p.id, p.subreddit))
            .collect(),
        None => BTreeMap::new(),
    };
    let sub = |id: &str| subreddits.get(id).map(String::as_str);
    match (cfg.predictions.as_slice(), &cfg.dataset) {
        ([path], _) => {
            manifest.input(path);
            read_jsonl::<DatasetRow>(path)?
                .iter()
                .map(|r| {
                    AnalysisPost::from_prediction(
                        &r.post_id,
                        sub(&r.post_id),
                        r.month_index,
                        row_blocks(r),
                    )
                })
                .collect()
        }
        ([], Some(path)) => read_dataset(path, manifest)?
            .iter()
            .map(|r| {
                Ok(AnalysisPost::from_labels(
                    &r.post_id,
                    sub(&r.post_id),
                    r.month_index,
                    &r.labels()?,
                ))
            })
            .collect(),
        ([], None) => Err(missing("--dataset or --predictions")),
        _ => Err(Error::InvalidArgument(
            "analyses take a single --predictions file".into(),
        )),
    }
}

pub fn compose(cfg: &RunConfig) -> Result<()> {
    let mut manifest = ManifestBuilder::new("compose", cfg);
    let posts = analysis_posts(cfg, &mut manifest)?;
    let out = cfg.out_dir()?;
    let rows = composition_table(&posts, &cfg.grouping()?)?;
    write_composition_csv(&out.join("composition.csv"), &rows)?;
    manifest.output("composition.csv");
    manifest.summary("groups", rows.len() / Category::FINE_GRAINED.len());
    manifest.write(out)
}

pub fn coping(cfg: &RunConfig) -> Result<()> {
    let mut manifest = ManifestBuilder::new("coping", cfg);
    let posts = analysis_posts(cfg, &mut manifest)?;
    let out = cfg.out_dir()?;
    let mode = cfg.mode.unwrap_or_default();
    let categories: Vec<Category> = match cfg.category {
        Some(c) => vec![c],
        None => vec![
            Category::Duration,
            Category::Context,
            Category::Interpersonal,
        ],
    };
    let mut rows = Vec::new();
    for c in categories {
        rows.extend(coping_table(&posts, c, mode)?);
    }
    write_coping_csv(&out.join("coping.csv"), &rows)?;
    manifest.output("coping.csv");
    manifest.summary("mode", mode);
    manifest.write(out)
}

pub fn its(cfg: &RunConfig) -> Result<()> {
    let mut manifest = ManifestBuilder::new("its", cfg);
    let category = *RunConfig::require(&cfg.category, "--category")?;
    let label = category.label_index(RunConfig::require(&cfg.label, "--label")?)?;
    let posts = analysis_posts(cfg, &mut manifest)?;
    let out = cfg.out_dir()?;
    let series = monthly_proportions(
        &posts,
        category,
        label,
        &cfg.grouping()?,
        cfg.intervention_month(),
    )?;
    let fit = its_fit(&series)?;
    write_its_csv(&out.join("its_fit.csv"), &fit)?;
    write_series_csv(&out.join("its_series.csv"), &series, &fit)?;
    manifest.output("its_fit.csv");
    manifest.output("its_series.csv");
    manifest.summary("observed_months", fit.observed.len());
    manifest.summary("missing_months", series.points.len() - fit.observed.len());
    manifest.summary("b2", fit.coefficients[2]);
    manifest.summary("b2_p_value", fit.p_values[2]);
    manifest.write(out)
}

pub fn export_embeddings(cfg: &RunConfig) -> Result<()> {
    let mut manifest = ManifestBuilder::new("export-embeddings", cfg);
    let (ckpt, beta) = checkpoint_and_beta(cfg, &mut manifest)?;
    let targets = prediction_targets(cfg, &mut manifest)?;
    let features = load_features(cfg, ckpt.seed, &mut manifest)?;
    let out = cfg.out_dir()?;
    let model: &Model = &ckpt.model;
    let mut rows = Vec::new();
    let mut width = None;
    for (id, month, subreddit) in &targets.ids {
        let Some(fv) = features.get(id) else { continue };
        let rep = model.representation(&fv.values)?;
        let pred = model.predict(&fv.values, beta)?;
        width.get_or_insert(rep.len());
        let mut row = vec![
            id.clone(),
            subreddit.clone().unwrap_or_default(),
            month.to_string(),
            u8::from(pred.predicted_lonely()).to_string(),
        ];
        for c in Category::FINE_GRAINED {
            row.push(c.labels()[argmax(&pred.blocks()[c.index()])].to_string());
        }
        row.extend(rep.iter().map(|v| format!("{v:.6}")));
        rows.push(row);
    }
    let width = width.ok_or_else(|| Error::Empty("no posts with features to export".into()))?;
    let mut header: Vec<String> = ["post_id", "subreddit", "month_index", "predicted_lonely"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    header.extend(Category::FINE_GRAINED.iter().map(|c| c.to_string()));
    header.extend((0..width).map(|i| format!("h{i}")));
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    write_csv_rows(&out.join("representations.csv"), &header_refs, rows)?;
    manifest.output("representations.csv");
    manifest.summary("width", width);
    manifest.write(out)
}

pub fn demo_corpus(cfg: &RunConfig) -> Result<()> {
    let mut manifest = ManifestBuilder::new("demo-corpus", cfg);
    let n = cfg.target_n.unwrap_or(400);
    let out = cfg.out_dir()?;
    let (posts, annotations) = synthetic_corpus(n, cfg.seed());
    write_jsonl(&out.join("posts.jsonl"), &posts)?;
    write_jsonl(&out.join("annotations.jsonl"), &annotations)?;
    manifest.output("posts.jsonl");
    manifest.output("annotations.jsonl");
    manifest.summary("posts", posts.len());
    manifest.write(out)
}
