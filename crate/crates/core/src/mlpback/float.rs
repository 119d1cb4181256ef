use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::rng::uniform01;
use crate::{keyed_rng, seeded_rng, Error, Result};

/// Layer widths of the back-end network.
pub const MLP_DIMS: [usize; 4] = [32, 74, 100, 4];

const SHUFFLE_DOMAIN: u64 = 0x5348_5546; // "SHUF"

/// Fully connected layer; `w` is row-major `[out][in]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseLayer<T> {
    pub n_in: usize,
    pub n_out: usize,
    pub w: Vec<T>,
    pub b: Vec<T>,
}

impl<T: Float> DenseLayer<T> {
    pub fn zeros(n_in: usize, n_out: usize) -> Self {
        Self {
            n_in,
            n_out,
            w: vec![T::zero(); n_in * n_out],
            b: vec![T::zero(); n_out],
        }
    }

    fn apply(&self, x: &[T], out: &mut Vec<T>) {
        out.clear();
        for o in 0..self.n_out {
            let row = &self.w[o * self.n_in..(o + 1) * self.n_in];
            let mut acc = self.b[o];
            for (w, v) in row.iter().zip(x) {
                acc = acc + *w * *v;
            }
            out.push(acc);
        }
    }
}

/// Float MLP with rectified hidden layers and a linear logit layer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FloatMlp<T> {
    pub layers: Vec<DenseLayer<T>>,
}

/// Per-layer pre-activations of one forward pass; the last entry holds the
/// logits.
#[derive(Debug, Clone)]
pub struct Trace<T> {
    pub input: Vec<T>,
    pub pre: Vec<Vec<T>>,
    pub post: Vec<Vec<T>>,
}

impl<T: Float> FloatMlp<T> {
    /// He-uniform weights, zero biases.
    pub fn init(dims: &[usize], seed: u64) -> Self {
        let mut rng = seeded_rng(seed);
        let layers = dims
            .windows(2)
            .map(|d| {
                let mut layer = DenseLayer::zeros(d[0], d[1]);
                let limit = (6.0 / d[0] as f64).sqrt();
                for w in &mut layer.w {
                    *w = T::from((2.0 * uniform01(&mut rng) - 1.0) * limit).expect("float");
                }
                layer
            })
            .collect();
        Self { layers }
    }

    pub fn dims(&self) -> Vec<usize> {
        let mut d = vec![self.layers[0].n_in];
        d.extend(self.layers.iter().map(|l| l.n_out));
        d
    }

    pub fn forward_trace(&self, x: &[T]) -> Trace<T> {
        let mut pre = Vec::with_capacity(self.layers.len());
        let mut post: Vec<Vec<T>> = Vec::with_capacity(self.layers.len());
        let last = self.layers.len() - 1;
        for (i, layer) in self.layers.iter().enumerate() {
            let mut z = Vec::new();
            layer.apply(post.last().map_or(x, |v| v.as_slice()), &mut z);
            let a = if i < last { z.iter().map(|&v| relu(v)).collect() } else { z.clone() };
            pre.push(z);
            post.push(a);
        }
        Trace {
            input: x.to_vec(),
            pre,
            post,
        }
    }

    pub fn logits(&self, x: &[T]) -> Vec<T> {
        self.forward_trace(x).post.pop().unwrap_or_default()
    }

    pub fn predict(&self, x: &[T]) -> usize {
        argmax(&self.logits(x))
    }

    pub fn accuracy(&self, xs: &[Vec<T>], ys: &[usize]) -> f64 {
        if xs.is_empty() {
            return 0.0;
        }
        let hits = xs.iter().zip(ys).filter(|(x, &y)| self.predict(x) == y).count();
        hits as f64 / xs.len() as f64
    }

    /// Mean cross-entropy over a batch and its gradient, accumulated in
    /// sample order.
    pub fn loss_and_grad(&self, xs: &[&[T]], ys: &[usize]) -> (T, Vec<DenseLayer<T>>) {
        let mut grads: Vec<DenseLayer<T>> = self.layers.iter().map(|l| DenseLayer::zeros(l.n_in, l.n_out)).collect();
        let n = T::from(xs.len()).expect("float");
        let mut loss = T::zero();
        for (x, &y) in xs.iter().zip(ys) {
            let t = self.forward_trace(x);
            let logits = t.post.last().expect("layers");
            let (lse, probs) = log_softmax_parts(logits);
            loss = loss + (lse - logits[y]) / n;
            let mut delta: Vec<T> = probs.iter().enumerate().map(|(k, &p)| {
                let target = if k == y { T::one() } else { T::zero() };
                (p - target) / n
            }).collect();
            for li in (0..self.layers.len()).rev() {
                let layer = &self.layers[li];
                let input = if li == 0 { &t.input } else { &t.post[li - 1] };
                let g = &mut grads[li];
                for o in 0..layer.n_out {
                    g.b[o] = g.b[o] + delta[o];
                    let row = &mut g.w[o * layer.n_in..(o + 1) * layer.n_in];
                    for (gw, &a) in row.iter_mut().zip(input) {
                        *gw = *gw + delta[o] * a;
                    }
                }
                if li > 0 {
                    let mut back = vec![T::zero(); layer.n_in];
                    for o in 0..layer.n_out {
                        let row = &layer.w[o * layer.n_in..(o + 1) * layer.n_in];
                        for (bk, &w) in back.iter_mut().zip(row) {
                            *bk = *bk + w * delta[o];
                        }
                    }
                    for (bk, &z) in back.iter_mut().zip(&t.pre[li - 1]) {
                        if z <= T::zero() {
                            *bk = T::zero();
                        }
                    }
                    delta = back;
                }
            }
        }
        (loss, grads)
    }

    pub fn mean_loss(&self, xs: &[Vec<T>], ys: &[usize]) -> T {
        let n = T::from(xs.len()).expect("float");
        xs.iter().zip(ys).fold(T::zero(), |acc, (x, &y)| {
            let logits = self.logits(x);
            let (lse, _) = log_softmax_parts(&logits);
            acc + (lse - logits[y]) / n
        })
    }

    fn step(&mut self, grads: &[DenseLayer<T>], lr: T) {
        for (layer, g) in self.layers.iter_mut().zip(grads) {
            for (w, gw) in layer.w.iter_mut().zip(&g.w) {
                *w = *w - lr * *gw;
            }
            for (b, gb) in layer.b.iter_mut().zip(&g.b) {
                *b = *b - lr * *gb;
            }
        }
    }
}

/// Rectifier that lets NaN through, so divergence stays visible.
fn relu<T: Float>(v: T) -> T {
    if v < T::zero() { T::zero() } else { v }
}

fn log_softmax_parts<T: Float>(logits: &[T]) -> (T, Vec<T>) {
    let max = logits.iter().fold(T::neg_infinity(), |m, &v| m.max(v));
    let exps: Vec<T> = logits.iter().map(|&v| (v - max).exp()).collect();
    let sum = exps.iter().fold(T::zero(), |a, &e| a + e);
    (max + sum.ln(), exps.iter().map(|&e| e / sum).collect())
}

/// Index of the largest value, lowest index on ties.
pub fn argmax<T: PartialOrd + Copy>(values: &[T]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate().skip(1) {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainConfig {
    pub lr: f64,
    pub epochs: usize,
    pub batch: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            lr: 0.05,
            epochs: 200,
            batch: 64,
            seed: 0,
        }
    }
}

/// Mean training loss after each epoch (entry 0 is the initial model).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainingCurve {
    pub loss: Vec<f64>,
}

/// Mini-batch gradient descent on cross-entropy. Each epoch visits the
/// samples in a permutation drawn from a stream keyed by `(seed, epoch)`.
pub fn train_mlp<T: Float>(
    xs: &[Vec<T>],
    ys: &[usize],
    dims: &[usize],
    cfg: &TrainConfig,
) -> Result<(FloatMlp<T>, TrainingCurve)> {
    if xs.is_empty() || xs.len() != ys.len() {
        return Err(Error::InvalidInput("training set empty or labels mismatched".into()));
    }
    if dims.len() < 2 || xs.iter().any(|x| x.len() != dims[0]) {
        return Err(Error::InvalidInput(format!("inputs must have {} features", dims[0])));
    }
    if ys.iter().any(|&y| y >= *dims.last().expect("dims")) {
        return Err(Error::InvalidInput("label outside the output layer".into()));
    }
    if cfg.batch == 0 || !(cfg.lr > 0.0) {
        return Err(Error::Config("batch must be positive and lr > 0".into()));
    }
    let mut model = FloatMlp::init(dims, cfg.seed);
    let lr = T::from(cfg.lr).expect("float");
    let mut curve = TrainingCurve {
        loss: vec![model.mean_loss(xs, ys).to_f64().unwrap_or(f64::NAN)],
    };
    let mut order: Vec<usize> = (0..xs.len()).collect();
    for epoch in 1..=cfg.epochs {
        let mut rng = keyed_rng(cfg.seed, SHUFFLE_DOMAIN, epoch as u64, 0);
        for i in (1..order.len()).rev() {
            let j = (uniform01(&mut rng) * (i + 1) as f64) as usize;
            order.swap(i, j.min(i));
        }
        let mut epoch_loss = 0.0;
        for chunk in order.chunks(cfg.batch) {
            let bx: Vec<&[T]> = chunk.iter().map(|&i| xs[i].as_slice()).collect();
            let by: Vec<usize> = chunk.iter().map(|&i| ys[i]).collect();
            let (loss, grads) = model.loss_and_grad(&bx, &by);
            let loss = loss.to_f64().unwrap_or(f64::NAN);
            if !loss.is_finite() {
                return Err(Error::Divergence { epoch, loss });
            }
            epoch_loss += loss * chunk.len() as f64 / xs.len() as f64;
            model.step(&grads, lr);
        }
        curve.loss.push(epoch_loss);
    }
    Ok((model, curve))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::standard_normal;

    fn blobs(n_per: usize, dim: usize, seed: u64, spread: f64) -> (Vec<Vec<f64>>, Vec<usize>) {
        let mut rng = seeded_rng(seed);
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for i in 0..4 * n_per {
            let c = i % 4;
            let x = (0..dim)
                .map(|d| if d % 4 == c { 0.8 } else { 0.0 } + spread * standard_normal(&mut rng))
                .collect();
            xs.push(x);
            ys.push(c);
        }
        (xs, ys)
    }

    /// Central differences on a 4-sample batch, every weight and bias.
    #[test]
    fn gradient_matches_finite_differences() {
        let dims = [6, 5, 7, 4];
        let model = FloatMlp::<f64>::init(&dims, 3);
        let (xs, ys) = blobs(1, 6, 5, 0.3);
        let bx: Vec<&[f64]> = xs.iter().map(|x| x.as_slice()).collect();
        let (_, grads) = model.loss_and_grad(&bx, &ys);
        let h = 1e-6;
        let mut checked = 0;
        for li in 0..model.layers.len() {
            let nw = model.layers[li].w.len();
            for k in 0..nw + model.layers[li].b.len() {
                let eval = |delta: f64| {
                    let mut m = model.clone();
                    if k < nw {
                        m.layers[li].w[k] += delta;
                    } else {
                        m.layers[li].b[k - nw] += delta;
                    }
                    m.loss_and_grad(&bx, &ys).0
                };
                let fd = (eval(h) - eval(-h)) / (2.0 * h);
                let g = if k < nw { grads[li].w[k] } else { grads[li].b[k - nw] };
                let scale = g.abs().max(fd.abs());
                assert!((g - fd).abs() <= 1e-4 * scale + 1e-9, "layer {li} param {k}: {g} vs {fd}");
                checked += 1;
            }
        }
        assert_eq!(checked, 6 * 5 + 5 + 5 * 7 + 7 + 7 * 4 + 4);
    }

    /// Averaged over initializations, an untrained model is at chance.
    #[test]
    fn zero_epochs_is_chance() {
        let (xs, ys) = blobs(250, 32, 1, 0.05);
        let seeds = 20;
        let mut total = 0.0;
        for seed in 0..seeds {
            let cfg = TrainConfig { epochs: 0, seed, ..TrainConfig::default() };
            let (m, curve) = train_mlp(&xs, &ys, &MLP_DIMS, &cfg).unwrap();
            assert_eq!(m, FloatMlp::init(&MLP_DIMS, seed));
            assert_eq!(curve.loss.len(), 1);
            total += m.accuracy(&xs, &ys);
        }
        let acc = total / seeds as f64;
        assert!((acc - 0.25).abs() <= 0.05, "accuracy {acc}");
    }

    #[test]
    fn separable_data_trains_quickly() {
        let (xs, ys) = blobs(100, 32, 2, 0.02);
        let cfg = TrainConfig { epochs: 50, ..TrainConfig::default() };
        let (m, curve) = train_mlp(&xs, &ys, &MLP_DIMS, &cfg).unwrap();
        assert!(m.accuracy(&xs, &ys) >= 0.99);
        assert!(curve.loss.last().unwrap() < &curve.loss[0]);
    }

    #[test]
    fn training_is_deterministic() {
        let (xs, ys) = blobs(20, 32, 4, 0.1);
        let cfg = TrainConfig { epochs: 3, ..TrainConfig::default() };
        let a = train_mlp(&xs, &ys, &MLP_DIMS, &cfg).unwrap();
        let b = train_mlp(&xs, &ys, &MLP_DIMS, &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn divergence_reports_epoch() {
        let (mut xs, ys) = blobs(10, 32, 4, 0.1);
        xs[0] = vec![f64::NAN; 32];
        let err = train_mlp(&xs, &ys, &MLP_DIMS, &TrainConfig::default()).unwrap_err();
        assert!(matches!(err, Error::Divergence { epoch: 1, .. }), "{err:?}");
    }

    #[test]
    fn f32_model_trains() {
        let (xs, ys) = blobs(50, 32, 2, 0.02);
        let xs: Vec<Vec<f32>> = xs.iter().map(|x| x.iter().map(|&v| v as f32).collect()).collect();
        let cfg = TrainConfig { epochs: 30, ..TrainConfig::default() };
        let (m, _) = train_mlp(&xs, &ys, &MLP_DIMS, &cfg).unwrap();
        assert!(m.accuracy(&xs, &ys) >= 0.99);
    }

    #[test]
    fn argmax_ties_go_low() {
        assert_eq!(argmax(&[1, 3, 3, 2]), 1);
        assert_eq!(argmax(&[0, 0, 0, 0]), 0);
    }
}
