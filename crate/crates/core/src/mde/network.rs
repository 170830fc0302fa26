use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::math;

pub const HIDDEN_UNITS: usize = 64;

/// Two hidden ReLU layers and a scalar linear output.
///
/// Parameters live in one flat buffer laid out as
/// `[w1 (h×n), b1 (h), w2 (h×h), b2 (h), w3 (h), b3 (1)]`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    inputs: usize,
    hidden: usize,
    params: Vec<f64>,
}

/// Activations kept from a forward pass for backpropagation.
#[derive(Debug, Clone)]
pub(crate) struct Trace {
    h1: Vec<f64>,
    h2: Vec<f64>,
}

impl Mlp {
    pub fn param_count(inputs: usize, hidden: usize) -> usize {
        hidden * inputs + hidden + hidden * hidden + hidden + hidden + 1
    }

    /// He-uniform initialisation with zero biases.
    pub fn new(inputs: usize, hidden: usize, rng: &mut impl Rng) -> Self {
        let mut params = vec![0.0; Self::param_count(inputs, hidden)];
        let mut net = Mlp { inputs, hidden, params: Vec::new() };
        let (w1, _, w2, _, w3, _) = net.offsets();
        uniform_fill(&mut params[w1.0..w1.1], math::sqrt(6.0 / inputs as f64), rng);
        uniform_fill(&mut params[w2.0..w2.1], math::sqrt(6.0 / hidden as f64), rng);
        uniform_fill(&mut params[w3.0..w3.1], math::sqrt(3.0 / hidden as f64), rng);
        net.params = params;
        net
    }

    pub fn from_params(inputs: usize, hidden: usize, params: Vec<f64>) -> Option<Self> {
        (inputs > 0 && hidden > 0 && params.len() == Self::param_count(inputs, hidden))
            .then_some(Mlp { inputs, hidden, params })
    }

    pub fn inputs(&self) -> usize {
        self.inputs
    }

    pub fn hidden(&self) -> usize {
        self.hidden
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    pub(crate) fn set_output_bias(&mut self, b: f64) {
        let last = self.params.len() - 1;
        self.params[last] = b;
    }

    #[allow(clippy::type_complexity)]
    fn offsets(&self) -> ((usize, usize), usize, (usize, usize), usize, (usize, usize), usize) {
        let (n, h) = (self.inputs, self.hidden);
        let w1 = (0, h * n);
        let b1 = w1.1;
        let w2 = (b1 + h, b1 + h + h * h);
        let b2 = w2.1;
        let w3 = (b2 + h, b2 + 2 * h);
        let b3 = w3.1;
        (w1, b1, w2, b2, w3, b3)
    }

    pub fn forward(&self, x: &[f64]) -> f64 {
        self.forward_traced(x).0
    }

    pub(crate) fn forward_traced(&self, x: &[f64]) -> (f64, Trace) {
        debug_assert_eq!(x.len(), self.inputs);
        let (n, h) = (self.inputs, self.hidden);
        let (w1, b1, w2, b2, w3, b3) = self.offsets();
        let p = &self.params;
        let mut h1 = vec![0.0; h];
        for (j, out) in h1.iter_mut().enumerate() {
            let row = &p[w1.0 + j * n..w1.0 + (j + 1) * n];
            let z: f64 = p[b1 + j] + row.iter().zip(x).map(|(w, v)| w * v).sum::<f64>();
            *out = z.max(0.0);
        }
        let mut h2 = vec![0.0; h];
        for (j, out) in h2.iter_mut().enumerate() {
            let row = &p[w2.0 + j * h..w2.0 + (j + 1) * h];
            let z: f64 = p[b2 + j] + row.iter().zip(&h1).map(|(w, v)| w * v).sum::<f64>();
            *out = z.max(0.0);
        }
        let y = p[b3] + p[w3.0..w3.1].iter().zip(&h2).map(|(w, v)| w * v).sum::<f64>();
        (y, Trace { h1, h2 })
    }

    /// Accumulates `dy · ∂y/∂params` into `grad`.
    pub(crate) fn backward(&self, x: &[f64], trace: &Trace, dy: f64, grad: &mut [f64]) {
        let (n, h) = (self.inputs, self.hidden);
        let (w1, b1, w2, b2, w3, b3) = self.offsets();
        let p = &self.params;
        grad[b3] += dy;
        let mut d2 = vec![0.0; h];
        for j in 0..h {
            grad[w3.0 + j] += dy * trace.h2[j];
            if trace.h2[j] > 0.0 {
                d2[j] = dy * p[w3.0 + j];
            }
        }
        let mut d1 = vec![0.0; h];
        for j in 0..h {
            if d2[j] == 0.0 {
                continue;
            }
            grad[b2 + j] += d2[j];
            let base = w2.0 + j * h;
            for k in 0..h {
                grad[base + k] += d2[j] * trace.h1[k];
                d1[k] += d2[j] * p[base + k];
            }
        }
        for j in 0..h {
            if trace.h1[j] <= 0.0 || d1[j] == 0.0 {
                continue;
            }
            grad[b1 + j] += d1[j];
            let base = w1.0 + j * n;
            for k in 0..n {
                grad[base + k] += d1[j] * x[k];
            }
        }
    }
}

fn uniform_fill(p: &mut [f64], bound: f64, rng: &mut impl Rng) {
    for v in p {
        *v = rng.random_range(-bound..bound);
    }
}

/// Adam with coupled L2 weight decay (`g += λ·θ`).
#[derive(Debug, Clone)]
pub(crate) struct Adam {
    lr: f64,
    weight_decay: f64,
    beta1: f64,
    beta2: f64,
    eps: f64,
    m: Vec<f64>,
    v: Vec<f64>,
    t: i32,
}

impl Adam {
    pub(crate) fn new(len: usize, lr: f64, weight_decay: f64) -> Self {
        Adam {
            lr,
            weight_decay,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            m: vec![0.0; len],
            v: vec![0.0; len],
            t: 0,
        }
    }

    pub(crate) fn step(&mut self, params: &mut [f64], grad: &[f64]) {
        self.t += 1;
        let c1 = 1.0 - math::powf(self.beta1, self.t as f64);
        let c2 = 1.0 - math::powf(self.beta2, self.t as f64);
        for i in 0..params.len() {
            let g = grad[i] + self.weight_decay * params[i];
            self.m[i] = self.beta1 * self.m[i] + (1.0 - self.beta1) * g;
            self.v[i] = self.beta2 * self.v[i] + (1.0 - self.beta2) * g * g;
            let m_hat = self.m[i] / c1;
            let v_hat = self.v[i] / c2;
            params[i] -= self.lr * m_hat / (math::sqrt(v_hat) + self.eps);
        }
    }
}
