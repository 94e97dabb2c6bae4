//! Small fully connected network with hand-written backprop, plus Adam.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Feedforward net: tanh on hidden layers, identity scalar output.
///
/// Parameters are stored flat, layer by layer, each layer as a row-major
/// `out x in` weight matrix followed by its `out` biases.
#[derive(Debug, Clone, PartialEq)]
pub struct SurrogateNet {
    widths: Vec<usize>,
    params: Vec<f64>,
}

struct Cache {
    /// Post-activation outputs of every layer, `acts[0]` is the input.
    acts: Vec<Vec<f64>>,
}

impl SurrogateNet {
    /// Glorot-uniform weights, zero biases.
    pub fn new(input: usize, hidden: &[usize], seed: u64) -> Self {
        assert!(input >= 1 && hidden.iter().all(|&h| h >= 1));
        let mut widths = vec![input];
        widths.extend_from_slice(hidden);
        widths.push(1);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut params = Vec::new();
        for l in 0..widths.len() - 1 {
            let (n_in, n_out) = (widths[l], widths[l + 1]);
            let limit = (6.0 / (n_in + n_out) as f64).sqrt();
            params.extend((0..n_in * n_out).map(|_| rng.random_range(-limit..limit)));
            params.extend(std::iter::repeat_n(0.0, n_out));
        }
        Self { widths, params }
    }

    pub fn input_dim(&self) -> usize {
        self.widths[0]
    }

    pub fn widths(&self) -> &[usize] {
        &self.widths
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    pub fn num_params(&self) -> usize {
        self.params.len()
    }

    pub fn is_finite(&self) -> bool {
        self.params.iter().all(|p| p.is_finite())
    }

    fn layers(&self) -> usize {
        self.widths.len() - 1
    }

    /// Offset of layer `l`'s weights in the flat parameter vector.
    fn offset(&self, l: usize) -> usize {
        (0..l).map(|k| (self.widths[k] + 1) * self.widths[k + 1]).sum()
    }

    fn run(&self, x: &[f64]) -> Cache {
        assert_eq!(x.len(), self.input_dim());
        let mut acts = vec![x.to_vec()];
        for l in 0..self.layers() {
            let (n_in, n_out) = (self.widths[l], self.widths[l + 1]);
            let off = self.offset(l);
            let w = &self.params[off..off + n_in * n_out];
            let b = &self.params[off + n_in * n_out..off + (n_in + 1) * n_out];
            let input = &acts[l];
            let last = l + 1 == self.layers();
            let out: Vec<f64> = (0..n_out)
                .map(|j| {
                    let z = b[j] + w[j * n_in..(j + 1) * n_in].iter().zip(input).map(|(w, a)| w * a).sum::<f64>();
                    if last {
                        z
                    } else {
                        z.tanh()
                    }
                })
                .collect();
            acts.push(out);
        }
        Cache { acts }
    }

    pub fn forward(&self, x: &[f64]) -> f64 {
        self.run(x).acts.last().unwrap()[0]
    }

    /// Backpropagates `dout` (d loss / d output) through a cached pass.
    /// Accumulates parameter gradients into `grad` if given and returns
    /// d loss / d input.
    fn backward(&self, cache: &Cache, dout: f64, mut grad: Option<&mut [f64]>) -> Vec<f64> {
        let mut delta = vec![dout];
        for l in (0..self.layers()).rev() {
            let (n_in, n_out) = (self.widths[l], self.widths[l + 1]);
            let off = self.offset(l);
            let input = &cache.acts[l];
            if let Some(g) = grad.as_deref_mut() {
                for j in 0..n_out {
                    let row = &mut g[off + j * n_in..off + (j + 1) * n_in];
                    for (gi, a) in row.iter_mut().zip(input) {
                        *gi += delta[j] * a;
                    }
                    g[off + n_in * n_out + j] += delta[j];
                }
            }
            let w = &self.params[off..off + n_in * n_out];
            let mut prev = vec![0.0; n_in];
            for j in 0..n_out {
                for (p, wij) in prev.iter_mut().zip(&w[j * n_in..(j + 1) * n_in]) {
                    *p += delta[j] * wij;
                }
            }
            if l > 0 {
                // input to this layer is tanh output of the previous one
                for (p, a) in prev.iter_mut().zip(input) {
                    *p *= 1.0 - a * a;
                }
            }
            delta = prev;
        }
        delta
    }

    /// dQ/dx at `x`.
    pub fn input_gradient(&self, x: &[f64]) -> Vec<f64> {
        let cache = self.run(x);
        self.backward(&cache, 1.0, None)
    }

    /// Mean squared error over a batch and its gradient with respect to
    /// the parameters.
    pub fn loss_and_gradient(&self, xs: &[Vec<f64>], ys: &[f64]) -> (f64, Vec<f64>) {
        assert_eq!(xs.len(), ys.len());
        assert!(!xs.is_empty());
        let n = xs.len() as f64;
        let mut grad = vec![0.0; self.params.len()];
        let mut loss = 0.0;
        for (x, &y) in xs.iter().zip(ys) {
            let cache = self.run(x);
            let err = cache.acts.last().unwrap()[0] - y;
            loss += err * err;
            self.backward(&cache, 2.0 * err / n, Some(&mut grad));
        }
        (loss / n, grad)
    }
}

/// Adam optimiser for minimisation over a flat parameter vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Adam {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    m: Vec<f64>,
    v: Vec<f64>,
    t: i32,
}

impl Adam {
    pub fn new(dim: usize, lr: f64) -> Self {
        Self {
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            m: vec![0.0; dim],
            v: vec![0.0; dim],
            t: 0,
        }
    }

    /// One descent step along `grad`.
    pub fn step(&mut self, params: &mut [f64], grad: &[f64]) {
        assert_eq!(params.len(), self.m.len());
        assert_eq!(grad.len(), self.m.len());
        self.t = self.t.saturating_add(1);
        let c1 = 1.0 - self.beta1.powi(self.t);
        let c2 = 1.0 - self.beta2.powi(self.t);
        for i in 0..params.len() {
            self.m[i] = self.beta1 * self.m[i] + (1.0 - self.beta1) * grad[i];
            self.v[i] = self.beta2 * self.v[i] + (1.0 - self.beta2) * grad[i] * grad[i];
            let m_hat = self.m[i] / c1;
            let v_hat = self.v[i] / c2;
            params[i] -= self.lr * m_hat / (v_hat.sqrt() + self.eps);
        }
    }
}
