//! Relational graph convolution: forward pass, loss and analytic backward pass.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::{Adjacency, Mat};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerParams {
    pub w_self: Mat,
    /// One matrix per relation.
    pub w_rel: Vec<Mat>,
}

impl LayerParams {
    fn zeros_like(&self) -> LayerParams {
        LayerParams {
            w_self: Mat::zeros(self.w_self.rows, self.w_self.cols),
            w_rel: self.w_rel.iter().map(|w| Mat::zeros(w.rows, w.cols)).collect(),
        }
    }

    fn mats(&self) -> impl Iterator<Item = &Mat> {
        std::iter::once(&self.w_self).chain(self.w_rel.iter())
    }

    fn mats_mut(&mut self) -> impl Iterator<Item = &mut Mat> {
        std::iter::once(&mut self.w_self).chain(self.w_rel.iter_mut())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rgcn {
    pub layers: Vec<LayerParams>,
    pub dropout: f64,
    pub seed: u64,
}

/// Intermediate values kept for the backward pass.
#[derive(Debug, Clone)]
pub struct LayerCache {
    /// Layer input after dropout.
    input: Mat,
    /// A_r · input for each relation.
    aggregated: Vec<Mat>,
    /// Pre-activation.
    z: Mat,
    /// Inverted-dropout scale per input element, when dropout ran.
    mask: Option<Mat>,
}

fn glorot(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Mat {
    let limit = (6.0 / (rows + cols) as f64).sqrt();
    let mut m = Mat::zeros(rows, cols);
    for x in &mut m.data {
        *x = rng.gen_range(-limit..limit);
    }
    m
}

impl Rgcn {
    /// Layer widths are `input → hidden → … → classes` over `n_layers` layers.
    pub fn new(input: usize, hidden: usize, classes: usize, n_layers: usize, relations: usize, dropout: f64, seed: u64) -> Rgcn {
        let n_layers = n_layers.max(1);
        let mut dims = vec![input];
        dims.extend(std::iter::repeat_n(hidden, n_layers - 1));
        dims.push(classes);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let layers = dims
            .windows(2)
            .map(|d| LayerParams {
                w_self: glorot(&mut rng, d[0], d[1]),
                w_rel: (0..relations).map(|_| glorot(&mut rng, d[0], d[1])).collect(),
            })
            .collect();
        Rgcn { layers, dropout, seed }
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].w_self.rows
    }

    pub fn classes(&self) -> usize {
        self.layers.last().map_or(0, |l| l.w_self.cols)
    }

    pub fn relation_count(&self) -> usize {
        self.layers[0].w_rel.len()
    }

    fn check(&self, x: &Mat, rel: &[Adjacency]) -> Result<(), ModelError> {
        if x.cols != self.input_dim() {
            return Err(ModelError::Dimension(format!("features have {} columns, model expects {}", x.cols, self.input_dim())));
        }
        if rel.len() != self.relation_count() {
            return Err(ModelError::Dimension(format!("graph has {} relations, model expects {}", rel.len(), self.relation_count())));
        }
        if let Some(a) = rel.iter().find(|a| a.len() != x.rows) {
            return Err(ModelError::Dimension(format!("adjacency over {} nodes, features over {}", a.len(), x.rows)));
        }
        for pair in self.layers.windows(2) {
            if pair[0].w_self.cols != pair[1].w_self.rows {
                return Err(ModelError::Dimension("layer widths do not chain".into()));
            }
        }
        Ok(())
    }

    /// Logits N×C. `dropout_rng` enables train-mode dropout on hidden activations.
    pub fn forward(&self, x: &Mat, rel: &[Adjacency], dropout_rng: Option<&mut ChaCha8Rng>) -> Result<Mat, ModelError> {
        Ok(self.forward_cached(x, rel, dropout_rng)?.0)
    }

    pub fn forward_cached(
        &self,
        x: &Mat,
        rel: &[Adjacency],
        mut dropout_rng: Option<&mut ChaCha8Rng>,
    ) -> Result<(Mat, Vec<LayerCache>), ModelError> {
        self.check(x, rel)?;
        let last = self.layers.len() - 1;
        let mut h = x.clone();
        let mut caches = Vec::with_capacity(self.layers.len());
        for (l, layer) in self.layers.iter().enumerate() {
            let mask = match dropout_rng.as_deref_mut() {
                Some(rng) if l > 0 && self.dropout > 0.0 => {
                    let keep = 1.0 - self.dropout;
                    let mut m = Mat::zeros(h.rows, h.cols);
                    for v in &mut m.data {
                        *v = if rng.gen::<f64>() < keep { 1.0 / keep } else { 0.0 };
                    }
                    for (a, b) in h.data.iter_mut().zip(&m.data) {
                        *a *= b;
                    }
                    Some(m)
                }
                _ => None,
            };
            let aggregated: Vec<Mat> = rel.iter().map(|a| a.aggregate(&h)).collect();
            let mut z = h.matmul(&layer.w_self);
            for (ah, w) in aggregated.iter().zip(&layer.w_rel) {
                z.add_assign(&ah.matmul(w));
            }
            let mut out = z.clone();
            if l < last {
                out.map_inplace(|v| v.max(0.0));
            }
            caches.push(LayerCache {
                input: h,
                aggregated,
                z,
                mask,
            });
            h = out;
        }
        Ok((h, caches))
    }

    /// Gradients of the loss with respect to every parameter, given dL/dlogits.
    pub fn backward(&self, caches: &[LayerCache], rel: &[Adjacency], dlogits: Mat) -> Vec<LayerParams> {
        let last = self.layers.len() - 1;
        let mut grads: Vec<LayerParams> = self.layers.iter().map(LayerParams::zeros_like).collect();
        let mut dout = dlogits;
        for l in (0..=last).rev() {
            let cache = &caches[l];
            let layer = &self.layers[l];
            let mut dz = dout;
            if l < last {
                for (g, z) in dz.data.iter_mut().zip(&cache.z.data) {
                    if *z <= 0.0 {
                        *g = 0.0;
                    }
                }
            }
            grads[l].w_self = cache.input.t_matmul(&dz);
            for (r, ah) in cache.aggregated.iter().enumerate() {
                grads[l].w_rel[r] = ah.t_matmul(&dz);
            }
            if l == 0 {
                break;
            }
            let mut dh = dz.matmul_t(&layer.w_self);
            for (a, w) in rel.iter().zip(&layer.w_rel) {
                dh.add_assign(&a.aggregate_transpose(&dz.matmul_t(w)));
            }
            if let Some(mask) = &cache.mask {
                for (g, m) in dh.data.iter_mut().zip(&mask.data) {
                    *g *= m;
                }
            }
            dout = dh;
        }
        grads
    }

    /// Mean cross-entropy over `targets` and its gradient. `dropout_seed`
    /// fixes the dropout mask; `None` runs in evaluation mode.
    pub fn loss_and_grad(
        &self,
        x: &Mat,
        rel: &[Adjacency],
        targets: &[(usize, usize)],
        dropout_seed: Option<u64>,
    ) -> Result<(f64, Vec<LayerParams>), ModelError> {
        let mut rng = dropout_seed.map(ChaCha8Rng::seed_from_u64);
        let (logits, caches) = self.forward_cached(x, rel, rng.as_mut())?;
        let (loss, dlogits) = cross_entropy(&logits, targets);
        Ok((loss, self.backward(&caches, rel, dlogits)))
    }

    pub fn loss(&self, x: &Mat, rel: &[Adjacency], targets: &[(usize, usize)], dropout_seed: Option<u64>) -> Result<f64, ModelError> {
        let mut rng = dropout_seed.map(ChaCha8Rng::seed_from_u64);
        let logits = self.forward(x, rel, rng.as_mut())?;
        Ok(cross_entropy(&logits, targets).0)
    }

    pub fn param_count(&self) -> usize {
        self.layers.iter().flat_map(LayerParams::mats).map(|m| m.data.len()).sum()
    }

    /// Parameters flattened layer by layer, self weight before relation weights.
    pub fn params(&self) -> Vec<f64> {
        self.layers.iter().flat_map(LayerParams::mats).flat_map(|m| m.data.iter().copied()).collect()
    }

    pub fn set_param(&mut self, mut k: usize, v: f64) {
        for m in self.layers.iter_mut().flat_map(LayerParams::mats_mut) {
            if k < m.data.len() {
                m.data[k] = v;
                return;
            }
            k -= m.data.len();
        }
        panic!("parameter index out of range");
    }

    pub fn step(&mut self, grads: &[LayerParams], lr: f64) {
        for (p, g) in self.layers.iter_mut().zip(grads) {
            for (pm, gm) in p.mats_mut().zip(g.mats()) {
                pm.sub_scaled(lr, gm);
            }
        }
    }

    pub fn is_finite(&self) -> bool {
        self.layers.iter().flat_map(LayerParams::mats).all(Mat::is_finite)
    }
}

/// Flattens gradients in the same order as [`Rgcn::params`].
pub fn flatten(grads: &[LayerParams]) -> Vec<f64> {
    grads.iter().flat_map(LayerParams::mats).flat_map(|m| m.data.iter().copied()).collect()
}

/// Row-wise softmax with max subtraction.
pub fn softmax(logits: &Mat) -> Mat {
    let mut p = logits.clone();
    for r in 0..p.rows {
        let row = p.row_mut(r);
        let m = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut s = 0.0;
        for v in row.iter_mut() {
            *v = (*v - m).exp();
            s += *v;
        }
        for v in row.iter_mut() {
            *v /= s;
        }
    }
    p
}

/// Mean cross-entropy over (node, class) targets and dL/dlogits.
pub fn cross_entropy(logits: &Mat, targets: &[(usize, usize)]) -> (f64, Mat) {
    let p = softmax(logits);
    let mut grad = Mat::zeros(logits.rows, logits.cols);
    if targets.is_empty() {
        return (0.0, grad);
    }
    let n = targets.len() as f64;
    let mut loss = 0.0;
    for &(i, c) in targets {
        let row = logits.row(i);
        let m = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lse = m + row.iter().map(|v| (v - m).exp()).sum::<f64>().ln();
        loss += lse - row[c];
        for (k, g) in grad.row_mut(i).iter_mut().enumerate() {
            *g += (p.get(i, k) - if k == c { 1.0 } else { 0.0 }) / n;
        }
    }
    (loss / n, grad)
}

/// Index of the largest value; the lowest index wins ties.
pub fn argmax(row: &[f64]) -> usize {
    let mut best = 0;
    for (k, &v) in row.iter().enumerate().skip(1) {
        if v > row[best] {
            best = k;
        }
    }
    best
}
