//! Intrinsic evaluation suite: diversity metrics over document embeddings,
//! realism proxies over text, and the fixed-size subsampling protocol.

pub mod judge;

use crate::gateway::{Embedder, EmbeddingVector, GatewayError};
use crate::vecmath::{cosine_similarity, norm};
use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use regex::Regex;
use serde::{Deserialize, Serialize};
use std::sync::LazyLock;
use thiserror::Error;

pub const GRID_BINS: usize = 5;
pub const SUBSAMPLE_THRESHOLD: usize = 1000;
pub const SUBSAMPLE_REPEATS: usize = 5;

/// Hyperlink pattern: an explicit http/https scheme followed by a
/// non-whitespace run. Bare domains without a scheme do not count.
static LINK_PATTERN: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"https?://\S+").expect("valid pattern"));

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Corpus {
    pub documents: Vec<String>,
}

impl Corpus {
    pub fn new(documents: Vec<String>) -> Self {
        Self { documents }
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }
}

/// One evaluated corpus, in reporting column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusMetrics {
    pub pairwise_correlation: f64,
    pub remote_clique: f64,
    pub entropy: f64,
    pub avg_links: f64,
    pub avg_length: f64,
    pub n_docs: usize,
}

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("need at least 2 vectors, got {0}")]
    TooFewVectors(usize),
    #[error("vectors must share a dimension >= 2 (vector {index} has {dim})")]
    DimensionMismatch { index: usize, dim: usize },
    #[error("vector {0} has constant coordinates; correlation undefined")]
    DegenerateVector(usize),
    #[error("vector {0} has zero norm; cosine distance undefined")]
    ZeroVector(usize),
    #[error(transparent)]
    Gateway(#[from] GatewayError),
}

fn check_dims(embeddings: &[EmbeddingVector]) -> Result<usize, MetricsError> {
    if embeddings.len() < 2 {
        return Err(MetricsError::TooFewVectors(embeddings.len()));
    }
    let dim = embeddings[0].dim();
    for (index, e) in embeddings.iter().enumerate() {
        if e.dim() != dim || e.dim() < 2 {
            return Err(MetricsError::DimensionMismatch { index, dim: e.dim() });
        }
    }
    Ok(dim)
}

/// Mean Pearson correlation over all unordered pairs, computed across vector
/// coordinates. Each vector is standardized once; the pair correlation is
/// then a dot product.
pub fn pairwise_correlation(embeddings: &[EmbeddingVector]) -> Result<f64, MetricsError> {
    let dim = check_dims(embeddings)?;
    let mut standardized: Vec<Vec<f64>> = Vec::with_capacity(embeddings.len());
    for (index, e) in embeddings.iter().enumerate() {
        let mean = e.values.iter().map(|&x| x as f64).sum::<f64>() / dim as f64;
        let mut centered: Vec<f64> = e.values.iter().map(|&x| x as f64 - mean).collect();
        let ss: f64 = centered.iter().map(|x| x * x).sum();
        if ss == 0.0 {
            return Err(MetricsError::DegenerateVector(index));
        }
        let scale = ss.sqrt();
        for x in &mut centered {
            *x /= scale;
        }
        standardized.push(centered);
    }
    let n = standardized.len();
    let mut total = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            total += standardized[i]
                .iter()
                .zip(&standardized[j])
                .map(|(a, b)| a * b)
                .sum::<f64>();
        }
    }
    Ok(total / (n * (n - 1) / 2) as f64)
}

/// Mean pairwise cosine distance (1 - cosine similarity), range [0, 2].
pub fn remote_clique(embeddings: &[EmbeddingVector]) -> Result<f64, MetricsError> {
    check_dims(embeddings)?;
    for (index, e) in embeddings.iter().enumerate() {
        if norm(&e.values) == 0.0 {
            return Err(MetricsError::ZeroVector(index));
        }
    }
    let n = embeddings.len();
    let mut total = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            total += 1.0 - cosine_similarity(&embeddings[i].values, &embeddings[j].values);
        }
    }
    Ok(total / (n * (n - 1) / 2) as f64)
}

/// Project embeddings onto their top-2 principal components.
///
/// Deterministic sign convention: within each component, the coordinate of
/// largest magnitude (first such index on ties) is made positive. Components
/// with (numerically) zero variance project to 0, so a degenerate cloud
/// collapses to a single point.
pub fn project_2d(embeddings: &[EmbeddingVector]) -> Result<Vec<[f64; 2]>, MetricsError> {
    let dim = check_dims(embeddings)?;
    let n = embeddings.len();
    let mut data = DMatrix::<f64>::zeros(n, dim);
    for (i, e) in embeddings.iter().enumerate() {
        for (j, &x) in e.values.iter().enumerate() {
            data[(i, j)] = x as f64;
        }
    }
    for j in 0..dim {
        let mean = data.column(j).sum() / n as f64;
        for i in 0..n {
            data[(i, j)] -= mean;
        }
    }

    // eigen-decompose whichever Gram product is smaller
    let components: Vec<Vec<f64>> = if dim <= n {
        let cov = data.transpose() * &data;
        top_components_from(&cov, 2)
    } else {
        let gram = &data * data.transpose();
        top_components_from(&gram, 2)
            .into_iter()
            .map(|u| {
                // map the n-space eigenvector back to feature space
                let u = nalgebra::DVector::from_vec(u);
                let v = data.transpose() * u;
                let norm = v.norm();
                if norm > 0.0 { (v / norm).iter().copied().collect() } else { vec![0.0; dim] }
            })
            .collect()
    };

    let mut scores = vec![[0.0f64; 2]; n];
    for (axis, component) in components.iter().enumerate().take(2) {
        let mut v = component.clone();
        let vnorm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        let lead = (0..v.len())
            .max_by(|&a, &b| v[a].abs().partial_cmp(&v[b].abs()).unwrap())
            .unwrap();
        if v[lead] < 0.0 {
            for x in &mut v {
                *x = -*x;
            }
        }
        for i in 0..n {
            scores[i][axis] = (0..v.len()).map(|j| data[(i, j)] * v[j]).sum();
        }
    }
    Ok(scores)
}

/// Top-`count` unit eigenvectors of a symmetric PSD matrix, by descending
/// eigenvalue; numerically-zero eigenvalues yield zero vectors.
fn top_components_from(matrix: &DMatrix<f64>, count: usize) -> Vec<Vec<f64>> {
    let size = matrix.nrows();
    let scale = matrix.iter().map(|x| x.abs()).fold(0.0f64, f64::max);
    let eigen = SymmetricEigen::new(matrix.clone());
    let mut order: Vec<usize> = (0..size).collect();
    order.sort_by(|&a, &b| eigen.eigenvalues[b].partial_cmp(&eigen.eigenvalues[a]).unwrap());
    order
        .into_iter()
        .take(count)
        .map(|idx| {
            if eigen.eigenvalues[idx] <= scale * 1e-12 {
                vec![0.0; size]
            } else {
                eigen.eigenvectors.column(idx).iter().copied().collect()
            }
        })
        .collect()
}

/// Bin index along one axis: 5 equal-width bins spanning [min, max], with
/// the max edge inclusive.
fn bin_index(x: f64, min: f64, max: f64) -> usize {
    if max <= min {
        return 0;
    }
    let idx = ((x - min) / (max - min) * GRID_BINS as f64).floor() as isize;
    idx.clamp(0, GRID_BINS as isize - 1) as usize
}

/// Shannon-Wiener entropy of the 2D projection binned into a 5x5 grid
/// (natural log). An all-identical cloud occupies one cell and scores 0.
pub fn entropy_grid(embeddings: &[EmbeddingVector]) -> Result<f64, MetricsError> {
    let points = project_2d(embeddings)?;
    entropy_of_projection(&points)
}

/// Entropy of already-projected points; shared by the metric and the CLI.
pub fn entropy_of_projection(points: &[[f64; 2]]) -> Result<f64, MetricsError> {
    if points.len() < 2 {
        return Err(MetricsError::TooFewVectors(points.len()));
    }
    let (mut min_x, mut max_x) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut min_y, mut max_y) = (f64::INFINITY, f64::NEG_INFINITY);
    for p in points {
        min_x = min_x.min(p[0]);
        max_x = max_x.max(p[0]);
        min_y = min_y.min(p[1]);
        max_y = max_y.max(p[1]);
    }
    let mut counts = [[0usize; GRID_BINS]; GRID_BINS];
    for p in points {
        counts[bin_index(p[0], min_x, max_x)][bin_index(p[1], min_y, max_y)] += 1;
    }
    let total = points.len() as f64;
    let mut h = 0.0;
    for row in &counts {
        for &c in row {
            if c > 0 {
                let p = c as f64 / total;
                h -= p * p.ln();
            }
        }
    }
    Ok(h)
}

/// Mean count per document of explicit-scheme hyperlinks.
pub fn avg_links(corpus: &Corpus) -> Result<f64, MetricsError> {
    if corpus.is_empty() {
        return Err(MetricsError::EmptyCorpus);
    }
    let total: usize = corpus
        .documents
        .iter()
        .map(|doc| LINK_PATTERN.find_iter(doc).count())
        .sum();
    Ok(total as f64 / corpus.len() as f64)
}

/// Mean character (unicode scalar) count per document.
pub fn avg_length(corpus: &Corpus) -> Result<f64, MetricsError> {
    if corpus.is_empty() {
        return Err(MetricsError::EmptyCorpus);
    }
    let total: usize = corpus.documents.iter().map(|doc| doc.chars().count()).sum();
    Ok(total as f64 / corpus.len() as f64)
}

/// Embed every document and compute all five metrics.
pub fn compute_all(corpus: &Corpus, embedder: &dyn Embedder) -> Result<CorpusMetrics, MetricsError> {
    if corpus.is_empty() {
        return Err(MetricsError::EmptyCorpus);
    }
    let embeddings: Vec<EmbeddingVector> = corpus
        .documents
        .iter()
        .map(|doc| embedder.embed(doc))
        .collect::<Result<_, _>>()?;
    Ok(CorpusMetrics {
        pairwise_correlation: pairwise_correlation(&embeddings)?,
        remote_clique: remote_clique(&embeddings)?,
        entropy: entropy_grid(&embeddings)?,
        avg_links: avg_links(corpus)?,
        avg_length: avg_length(corpus)?,
        n_docs: corpus.len(),
    })
}

/// The subsampling protocol: corpora at or under `threshold` documents are
/// evaluated once in full; larger corpora are sampled `repeats` times
/// without replacement at size `threshold` and the metrics averaged.
pub fn subsampled_eval(
    corpus: &Corpus,
    embedder: &dyn Embedder,
    threshold: usize,
    repeats: usize,
    seed: u64,
) -> Result<CorpusMetrics, MetricsError> {
    if corpus.is_empty() {
        return Err(MetricsError::EmptyCorpus);
    }
    if corpus.len() <= threshold {
        return compute_all(corpus, embedder);
    }
    let mut acc = CorpusMetrics {
        pairwise_correlation: 0.0,
        remote_clique: 0.0,
        entropy: 0.0,
        avg_links: 0.0,
        avg_length: 0.0,
        n_docs: corpus.len(),
    };
    for r in 0..repeats {
        let mut rng = ChaCha8Rng::seed_from_u64(crate::hashing::splitmix64(seed ^ r as u64));
        let mut indices: Vec<usize> = (0..corpus.len()).collect();
        for i in 0..threshold {
            let j = rng.gen_range(i..indices.len());
            indices.swap(i, j);
        }
        let sample = Corpus::new(
            indices[..threshold]
                .iter()
                .map(|&i| corpus.documents[i].clone())
                .collect(),
        );
        let m = compute_all(&sample, embedder)?;
        acc.pairwise_correlation += m.pairwise_correlation;
        acc.remote_clique += m.remote_clique;
        acc.entropy += m.entropy;
        acc.avg_links += m.avg_links;
        acc.avg_length += m.avg_length;
    }
    let k = repeats as f64;
    acc.pairwise_correlation /= k;
    acc.remote_clique /= k;
    acc.entropy /= k;
    acc.avg_links /= k;
    acc.avg_length /= k;
    Ok(acc)
}

/// Render rows as an aligned table in the reporting column order.
pub fn render_table(rows: &[(String, CorpusMetrics)]) -> String {
    let name_width = rows
        .iter()
        .map(|(name, _)| name.chars().count())
        .chain(std::iter::once("Dataset".len()))
        .max()
        .unwrap_or(7);
    let mut out = String::new();
    out.push_str(&format!(
        "{:<name_width$}  {:>16} {:>14} {:>11} {:>11} {:>12} {:>8}\n",
        "Dataset", "Pairwise Corr.", "Remote-Clique", "Entropy", "Avg. #Links", "Avg. Length", "Docs"
    ));
    for (name, m) in rows {
        out.push_str(&format!(
            "{:<name_width$}  {:>16.4} {:>14.4} {:>11.4} {:>11.4} {:>12.2} {:>8}\n",
            name, m.pairwise_correlation, m.remote_clique, m.entropy, m.avg_links, m.avg_length, m.n_docs
        ));
    }
    out
}
