//! Question-type classification and type-to-preset routing.
//!
//! A bag-of-words multinomial logistic regression predicts the question
//! type from its text; a routing table fitted on per-type validation
//! accuracies then maps the type to the best preset.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io;
use crate::preset::{make_preset, Preset, PresetName};

pub const DEFAULT_TYPES: [&str; 7] = [
    "plotQA",
    "needle",
    "ego",
    "count",
    "order",
    "anomaly_reco",
    "topic_reasoning",
];

pub const DEFAULT_EPOCHS: usize = 10;
pub const DEFAULT_LEARNING_RATE: f64 = 0.5;

/// Lowercases and splits on every non-alphanumeric character.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Featurization {
    pub lowercase: bool,
    pub split: String,
    pub features: String,
}

impl Default for Featurization {
    fn default() -> Self {
        Featurization {
            lowercase: true,
            split: "non_alphanumeric".into(),
            features: "token_counts".into(),
        }
    }
}

/// A labeled question.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Example {
    pub label: String,
    pub text: String,
}

impl Example {
    pub fn new(label: impl Into<String>, text: impl Into<String>) -> Self {
        Example {
            label: label.into(),
            text: text.into(),
        }
    }
}

/// Parses `type<TAB>question` lines. Blank lines are skipped.
pub fn parse_tsv(text: &str) -> Result<Vec<Example>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(n, line)| {
            let (label, question) = line.split_once('\t').ok_or_else(|| {
                Error::Format(format!("line {}: expected `type<TAB>question`", n + 1))
            })?;
            if label.is_empty() {
                return Err(Error::Format(format!("line {}: empty type", n + 1)));
            }
            Ok(Example::new(label, question))
        })
        .collect()
}

pub fn read_tsv(path: &Path) -> Result<Vec<Example>> {
    parse_tsv(&io::read_to_string(path)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub types: Vec<String>,
    pub epochs: usize,
    pub learning_rate: f64,
    pub seed: u64,
    /// Permute the examples before training. Only the gradient summation
    /// order changes, so this is off by default.
    pub shuffle: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            types: DEFAULT_TYPES.iter().map(|s| s.to_string()).collect(),
            epochs: DEFAULT_EPOCHS,
            learning_rate: DEFAULT_LEARNING_RATE,
            seed: 0,
            shuffle: false,
        }
    }
}

impl TrainConfig {
    pub fn with_types<S: AsRef<str>>(mut self, types: &[S]) -> Self {
        self.types = types.iter().map(|s| s.as_ref().to_string()).collect();
        self
    }
}

/// Trained classifier. `weights` is `types x (vocabulary + 1)` row-major,
/// the last column holding the bias.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuestionTypeModel {
    pub types: Vec<String>,
    pub vocabulary: BTreeMap<String, usize>,
    pub weights: Vec<f64>,
    pub featurization: Featurization,
}

/// Sparse token-count features.
type Features = Vec<(usize, f64)>;

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub label: String,
    pub class: usize,
    pub probabilities: Vec<f64>,
}

impl QuestionTypeModel {
    fn width(&self) -> usize {
        self.vocabulary.len() + 1
    }

    pub fn read(path: &Path) -> Result<Self> {
        let model: QuestionTypeModel = io::read_json(path)?;
        model.check()?;
        Ok(model)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        io::write_json(path, self)
    }

    fn check(&self) -> Result<()> {
        if self.types.is_empty() {
            return Err(Error::Format("model declares no types".into()));
        }
        if self.weights.len() != self.types.len() * self.width() {
            return Err(Error::Format(format!(
                "model has {} weights, expected {} x {}",
                self.weights.len(),
                self.types.len(),
                self.width()
            )));
        }
        let width = self.vocabulary.len();
        if self.vocabulary.values().any(|&c| c >= width) {
            return Err(Error::Format("vocabulary column out of range".into()));
        }
        Ok(())
    }

    fn featurize(&self, text: &str) -> Features {
        let mut counts: BTreeMap<usize, f64> = BTreeMap::new();
        for tok in tokenize(text) {
            if let Some(&col) = self.vocabulary.get(&tok) {
                *counts.entry(col).or_default() += 1.0;
            }
        }
        counts.into_iter().collect()
    }

    fn scores_into(&self, x: &Features, out: &mut [f64]) {
        let width = self.width();
        let bias = width - 1;
        for (k, s) in out.iter_mut().enumerate() {
            let row = &self.weights[k * width..(k + 1) * width];
            *s = row[bias] + x.iter().map(|&(c, v)| row[c] * v).sum::<f64>();
        }
    }

    fn probabilities(&self, x: &Features) -> Vec<f64> {
        let mut s = vec![0.0; self.types.len()];
        self.scores_into(x, &mut s);
        softmax_in_place(&mut s);
        s
    }

    /// Most probable type; ties go to the earlier type. Out-of-vocabulary
    /// tokens are ignored.
    pub fn predict(&self, text: &str) -> Prediction {
        let probabilities = self.probabilities(&self.featurize(text));
        let class = argmax(&probabilities);
        Prediction {
            label: self.types[class].clone(),
            class,
            probabilities,
        }
    }

    pub fn class_of(&self, label: &str) -> Option<usize> {
        self.types.iter().position(|t| t == label)
    }
}

pub fn predict_type(model: &QuestionTypeModel, text: &str) -> Prediction {
    model.predict(text)
}

fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate().skip(1) {
        if x > v[best] {
            best = i;
        }
    }
    best
}

/// Numerically stable softmax.
pub fn softmax_in_place(v: &mut [f64]) {
    let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut total = 0.0;
    for x in v.iter_mut() {
        *x = (*x - max).exp();
        total += *x;
    }
    for x in v.iter_mut() {
        *x /= total;
    }
}

fn mean_cross_entropy(model: &QuestionTypeModel, data: &[(Features, usize)]) -> f64 {
    let mut s = vec![0.0; model.types.len()];
    let total: f64 = data
        .iter()
        .map(|(x, y)| {
            model.scores_into(x, &mut s);
            let max = s.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let lse = max + s.iter().map(|v| (v - max).exp()).sum::<f64>().ln();
            lse - s[*y]
        })
        .sum();
    total / data.len() as f64
}

fn gradient(model: &QuestionTypeModel, data: &[(Features, usize)]) -> Vec<f64> {
    let width = model.width();
    let bias = width - 1;
    let mut grad = vec![0.0; model.weights.len()];
    let scale = 1.0 / data.len() as f64;
    for (x, y) in data {
        let mut p = model.probabilities(x);
        p[*y] -= 1.0;
        for (k, &err) in p.iter().enumerate() {
            let row = &mut grad[k * width..(k + 1) * width];
            row[bias] += err * scale;
            for &(c, v) in x {
                row[c] += err * v * scale;
            }
        }
    }
    grad
}

/// Training output: the model and the mean cross-entropy after each epoch.
#[derive(Debug, Clone)]
pub struct TrainedClassifier {
    pub model: QuestionTypeModel,
    pub epoch_losses: Vec<f64>,
}

/// Full-batch gradient descent on mean cross-entropy from zero weights.
/// A step that would raise the loss is retried at half the learning rate,
/// so the per-epoch loss never increases.
pub fn train_classifier(examples: &[Example], config: &TrainConfig) -> Result<TrainedClassifier> {
    if config.epochs < 1 {
        return Err(Error::Parameter("epochs must be at least 1".into()));
    }
    if !(config.learning_rate > 0.0 && config.learning_rate.is_finite()) {
        return Err(Error::Parameter(format!(
            "learning rate must be positive, got {}",
            config.learning_rate
        )));
    }
    let types = config.types.clone();
    if types.is_empty() {
        return Err(Error::Parameter("at least one type must be declared".into()));
    }
    if types.iter().collect::<BTreeSet<_>>().len() != types.len() {
        return Err(Error::Parameter("declared types contain duplicates".into()));
    }
    let class_of = |label: &str| types.iter().position(|t| t == label);
    for ex in examples {
        if class_of(&ex.label).is_none() {
            return Err(Error::Parameter(format!(
                "example labeled `{}` is not a declared type",
                ex.label
            )));
        }
    }
    for t in &types {
        if !examples.iter().any(|e| &e.label == t) {
            return Err(Error::MissingClass(t.clone()));
        }
    }

    let vocab_set: BTreeSet<String> = examples.iter().flat_map(|e| tokenize(&e.text)).collect();
    if vocab_set.is_empty() {
        return Err(Error::DegenerateData("no tokens in the training text".into()));
    }
    let vocabulary: BTreeMap<String, usize> =
        vocab_set.into_iter().enumerate().map(|(i, t)| (t, i)).collect();
    let mut model = QuestionTypeModel {
        weights: vec![0.0; types.len() * (vocabulary.len() + 1)],
        types,
        vocabulary,
        featurization: Featurization::default(),
    };

    let mut order: Vec<&Example> = examples.iter().collect();
    if config.shuffle {
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(config.seed));
    }
    let data: Vec<(Features, usize)> = order
        .iter()
        .map(|e| (model.featurize(&e.text), model.class_of(&e.label).expect("checked")))
        .collect();

    let mut lr = config.learning_rate;
    let mut loss = mean_cross_entropy(&model, &data);
    let mut epoch_losses = Vec::with_capacity(config.epochs);
    for _ in 0..config.epochs {
        let grad = gradient(&model, &data);
        let current = model.weights.clone();
        loop {
            for (w, (&w0, g)) in model.weights.iter_mut().zip(current.iter().zip(&grad)) {
                *w = w0 - lr * g;
            }
            let candidate = mean_cross_entropy(&model, &data);
            if candidate <= loss {
                loss = candidate;
                break;
            }
            lr *= 0.5;
            if lr < 1e-12 {
                model.weights = current;
                break;
            }
        }
        epoch_losses.push(loss);
    }
    Ok(TrainedClassifier {
        model,
        epoch_losses,
    })
}

/// Accuracy and confusion counts (rows = true type, columns = predicted).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub types: Vec<String>,
    pub correct: usize,
    pub total: usize,
    pub accuracy: f64,
    pub confusion: Vec<Vec<usize>>,
}

pub fn evaluate(model: &QuestionTypeModel, examples: &[Example]) -> Result<Evaluation> {
    let k = model.types.len();
    let mut confusion = vec![vec![0usize; k]; k];
    for ex in examples {
        let truth = model
            .class_of(&ex.label)
            .ok_or_else(|| Error::Parameter(format!("unknown type `{}` in evaluation data", ex.label)))?;
        confusion[truth][model.predict(&ex.text).class] += 1;
    }
    let correct = (0..k).map(|i| confusion[i][i]).sum();
    let total = examples.len();
    Ok(Evaluation {
        types: model.types.clone(),
        correct,
        total,
        accuracy: if total == 0 { 0.0 } else { correct as f64 / total as f64 },
        confusion,
    })
}

/// Validation accuracy of each preset for one type.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PresetAccuracies {
    pub relevance_only: f64,
    pub relevance_oriented: f64,
    pub coverage_oriented: f64,
    pub coverage_only: f64,
}

impl PresetAccuracies {
    pub fn get(&self, p: PresetName) -> f64 {
        match p {
            PresetName::RelevanceOnly => self.relevance_only,
            PresetName::RelevanceOriented => self.relevance_oriented,
            PresetName::CoverageOriented => self.coverage_oriented,
            PresetName::CoverageOnly => self.coverage_only,
        }
    }

    /// Best preset; ties resolved in declaration order of [`PresetName`].
    pub fn best(&self) -> PresetName {
        let mut best = PresetName::ALL[0];
        for p in PresetName::ALL.into_iter().skip(1) {
            if self.get(p) > self.get(best) {
                best = p;
            }
        }
        best
    }
}

/// Per-type accuracy rows, possibly with missing cells.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct AccuracyTable {
    pub rows: Vec<(String, [Option<f64>; 4])>,
}

impl AccuracyTable {
    pub fn push(&mut self, label: impl Into<String>, cells: [Option<f64>; 4]) {
        self.rows.push((label.into(), cells));
    }

    /// Parses CSV with header `type` plus the four preset names, in any
    /// column order. Absent columns and empty cells become missing values.
    pub fn parse_csv(text: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let headers = reader.headers()?.clone();
        let type_col = headers
            .iter()
            .position(|h| h == "type")
            .ok_or_else(|| Error::Format("accuracy table has no `type` column".into()))?;
        let mut preset_cols = [None; 4];
        for (i, h) in headers.iter().enumerate() {
            if i == type_col {
                continue;
            }
            let p: PresetName = h
                .parse()
                .map_err(|_| Error::Format(format!("unexpected accuracy column `{h}`")))?;
            preset_cols[p as usize] = Some(i);
        }
        let mut table = AccuracyTable::default();
        let mut seen = BTreeSet::new();
        for (line, record) in reader.records().enumerate() {
            let record = record?;
            let label = record.get(type_col).unwrap_or("").to_string();
            if label.is_empty() {
                return Err(Error::Format(format!("row {}: empty type", line + 2)));
            }
            if !seen.insert(label.clone()) {
                return Err(Error::Format(format!("type `{label}` appears twice")));
            }
            let mut cells = [None; 4];
            for (slot, col) in cells.iter_mut().zip(preset_cols) {
                let Some(raw) = col.and_then(|c| record.get(c)).filter(|s| !s.is_empty()) else {
                    continue;
                };
                let v: f64 = raw.parse().map_err(|_| {
                    Error::Format(format!("row {}: `{raw}` is not a number", line + 2))
                })?;
                if !(0.0..=1.0).contains(&v) {
                    return Err(Error::Format(format!(
                        "row {}: accuracy {v} outside [0, 1]",
                        line + 2
                    )));
                }
                *slot = Some(v);
            }
            table.push(label, cells);
        }
        Ok(table)
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        Self::parse_csv(&io::read_to_string(path)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoutingTable {
    pub mapping: BTreeMap<String, PresetName>,
    pub provenance: BTreeMap<String, PresetAccuracies>,
}

impl RoutingTable {
    pub fn read(path: &Path) -> Result<Self> {
        let table: RoutingTable = io::read_json(path)?;
        if table.mapping.keys().ne(table.provenance.keys()) {
            return Err(Error::Format(
                "routing table mapping and provenance cover different types".into(),
            ));
        }
        Ok(table)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        io::write_json(path, self)
    }

    pub fn preset_for(&self, label: &str) -> Result<PresetName> {
        self.mapping
            .get(label)
            .copied()
            .ok_or_else(|| Error::RoutingGap(label.to_string()))
    }

    /// Errors unless every type in `types` has an entry.
    pub fn check_covers<S: AsRef<str>>(&self, types: &[S]) -> Result<()> {
        for t in types {
            if !self.mapping.contains_key(t.as_ref()) {
                return Err(Error::IncompleteTable(format!(
                    "no accuracies for type `{}`",
                    t.as_ref()
                )));
            }
        }
        Ok(())
    }
}

/// Picks the best preset per type.
pub fn fit_routing(table: &AccuracyTable) -> Result<RoutingTable> {
    let mut mapping = BTreeMap::new();
    let mut provenance = BTreeMap::new();
    for (label, cells) in &table.rows {
        let mut v = [0.0; 4];
        for (i, cell) in cells.iter().enumerate() {
            v[i] = cell.ok_or_else(|| {
                Error::IncompleteTable(format!(
                    "type `{label}` has no accuracy for {}",
                    PresetName::ALL[i]
                ))
            })?;
        }
        let acc = PresetAccuracies {
            relevance_only: v[0],
            relevance_oriented: v[1],
            coverage_oriented: v[2],
            coverage_only: v[3],
        };
        if mapping.insert(label.clone(), acc.best()).is_some() {
            return Err(Error::Format(format!("type `{label}` appears twice")));
        }
        provenance.insert(label.clone(), acc);
    }
    if mapping.is_empty() {
        return Err(Error::IncompleteTable("accuracy table has no rows".into()));
    }
    Ok(RoutingTable {
        mapping,
        provenance,
    })
}

/// Predicts the type of `text` and returns its routed preset.
pub fn route(
    model: &QuestionTypeModel,
    table: &RoutingTable,
    text: &str,
    lambda: f64,
) -> Result<(Prediction, Preset)> {
    let prediction = model.predict(text);
    let preset = route_oracle(table, &prediction.label, lambda)?;
    Ok((prediction, preset))
}

/// Routes a caller-supplied (ground-truth) type, bypassing the classifier.
pub fn route_oracle(table: &RoutingTable, label: &str, lambda: f64) -> Result<Preset> {
    make_preset(table.preset_for(label)?, lambda)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokenizer_rules() {
        assert_eq!(tokenize("How MANY dogs?? (3-legged)"), vec!["how", "many", "dogs", "3", "legged"]);
        assert!(tokenize(" ,;- ").is_empty());
    }

    #[test]
    fn tsv_parsing() {
        let ex = parse_tsv("count\tHow many cars?\n\nneedle\tWhat is in the clip?\n").unwrap();
        assert_eq!(ex, vec![Example::new("count", "How many cars?"), Example::new("needle", "What is in the clip?")]);
        assert!(matches!(parse_tsv("no tab here"), Err(Error::Format(_))));
    }

    fn two_class() -> (Vec<Example>, TrainConfig) {
        let mut ex = Vec::new();
        for i in 0..50 {
            ex.push(Example::new("a", format!("alpha apple {} video", i % 3)));
            ex.push(Example::new("b", format!("beta banana {} video", i % 3)));
        }
        (ex, TrainConfig::default().with_types(&["a", "b"]))
    }

    #[test]
    fn separable_two_class_fits_exactly() {
        let (ex, cfg) = two_class();
        let trained = train_classifier(&ex, &cfg).unwrap();
        let eval = evaluate(&trained.model, &ex).unwrap();
        assert_eq!(eval.accuracy, 1.0);
        assert_eq!(trained.epoch_losses.len(), 10);
        for w in trained.epoch_losses.windows(2) {
            assert!(w[1] <= w[0] + 1e-6);
        }
        assert_eq!(trained.model.predict("apple").label, "a");
        assert_eq!(trained.model.predict("banana banana").label, "b");
    }

    #[test]
    fn one_step_raises_correct_class() {
        let ex = vec![
            Example::new("x", "red"),
            Example::new("y", "green"),
            Example::new("z", "blue"),
        ];
        let cfg = TrainConfig {
            epochs: 1,
            ..TrainConfig::default().with_types(&["x", "y", "z"])
        };
        let model = train_classifier(&ex, &cfg).unwrap().model;
        for e in &ex {
            let p = model.predict(&e.text);
            assert_eq!(p.label, e.label);
            assert!(p.probabilities[p.class] > 1.0 / 3.0);
        }
    }

    #[test]
    fn training_errors() {
        let ex: Vec<Example> = (0..5).map(|i| Example::new("count", format!("how many {i}"))).collect();
        assert!(matches!(train_classifier(&ex, &TrainConfig::default()), Err(Error::MissingClass(_))));
        let ex = vec![Example::new("a", "?!"), Example::new("b", "...")];
        let cfg = TrainConfig::default().with_types(&["a", "b"]);
        assert!(matches!(train_classifier(&ex, &cfg), Err(Error::DegenerateData(_))));
        let cfg0 = TrainConfig { epochs: 0, ..cfg };
        assert!(matches!(train_classifier(&ex, &cfg0), Err(Error::Parameter(_))));
    }

    #[test]
    fn empty_text_uses_bias() {
        let model = QuestionTypeModel {
            types: vec!["a".into(), "b".into(), "c".into()],
            vocabulary: [("w".to_string(), 0)].into_iter().collect(),
            weights: vec![5.0, 0.1, 0.0, 0.2, -1.0, 0.3],
            featurization: Featurization::default(),
        };
        let p = model.predict("");
        assert_eq!(p.label, "c");
        assert!((p.probabilities.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert_eq!(model.predict("unknown words").label, "c");
        assert_eq!(model.predict("w").label, "a");
    }

    fn table(rows: &[(&str, [f64; 4])]) -> AccuracyTable {
        let mut t = AccuracyTable::default();
        for (l, v) in rows {
            t.push(*l, v.map(Some));
        }
        t
    }

    #[test]
    fn routing_argmax_and_ties() {
        let t = table(&[
            ("topic_reasoning", [0.60, 0.62, 0.68, 0.70]),
            ("needle", [0.5, 0.5, 0.5, 0.5]),
            ("count", [0.4, 0.45, 0.45, 0.3]),
        ]);
        let r = fit_routing(&t).unwrap();
        assert_eq!(r.mapping["topic_reasoning"], PresetName::CoverageOnly);
        assert_eq!(r.mapping["needle"], PresetName::RelevanceOnly);
        assert_eq!(r.mapping["count"], PresetName::RelevanceOriented);
        assert_eq!(r.provenance["count"].coverage_oriented, 0.45);
    }

    #[test]
    fn routing_incomplete_table() {
        let mut t = AccuracyTable::default();
        t.push("count", [Some(0.1), Some(0.2), None, Some(0.3)]);
        assert!(matches!(fit_routing(&t), Err(Error::IncompleteTable(_))));
        let csv = "type,relevance_only,relevance_oriented,coverage_oriented\ncount,0.1,0.2,0.3\n";
        let parsed = AccuracyTable::parse_csv(csv).unwrap();
        let err = fit_routing(&parsed).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn csv_parsing() {
        let csv = "type,relevance_only,relevance_oriented,coverage_oriented,coverage_only\n\
                   count,0.5,0.6,0.55,0.4\nneedle,0.7,0.6,0.5,0.4\n";
        let t = AccuracyTable::parse_csv(csv).unwrap();
        assert_eq!(t.rows.len(), 2);
        assert_eq!(t.rows[0].1, [Some(0.5), Some(0.6), Some(0.55), Some(0.4)]);
        assert!(AccuracyTable::parse_csv("type,bogus\nx,1\n").is_err());
        assert!(AccuracyTable::parse_csv("type,relevance_only\nx,abc\n").is_err());
        assert!(AccuracyTable::parse_csv("type,relevance_only\nx,1.5\n").is_err());
        assert!(AccuracyTable::parse_csv("type,relevance_only\nx,1\nx,1\n").is_err());
    }

    #[test]
    fn route_composes_and_reports_gaps() {
        let model = QuestionTypeModel {
            types: vec!["count".into(), "needle".into()],
            vocabulary: [("many".to_string(), 0)].into_iter().collect(),
            weights: vec![2.0, 0.0, -2.0, 0.5],
            featurization: Featurization::default(),
        };
        let t = fit_routing(&table(&[("count", [0.1, 0.9, 0.2, 0.3])])).unwrap();
        let (pred, preset) = route(&model, &t, "how many", 0.5).unwrap();
        assert_eq!(pred.label, "count");
        assert_eq!((preset.alpha, preset.beta), (1.0, 0.5));
        assert!(matches!(route(&model, &t, "", 0.5), Err(Error::RoutingGap(l)) if l == "needle"));
        assert!(matches!(route_oracle(&t, "needle", 0.5), Err(Error::RoutingGap(_))));
        assert_eq!(route_oracle(&t, "count", 0.5).unwrap().name, PresetName::RelevanceOriented);
    }
}
