//! Sequential policy over the architecture decisions.
//!
//! The recurrent policy feeds the embedding of the previous choice (a learned
//! start vector for the first decision) through one tanh cell and reads each
//! decision's logits off the hidden state:
//!
//! ```text
//! h_t = tanh(W_xh x_t + W_hh h_{t-1} + b_h)
//! z_t = W_out_t h_t + b_out_t
//! ```
//!
//! The factorized policy keeps only `b_out_t`, so decisions are independent.
//! Both are trained by REINFORCE on
//! `J = (r - b) * sum_t log p_t(a_t) + entropy_coef * sum_t H(p_t)`.

use rand::distributions::Distribution;
use rand::distributions::Uniform;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::model::softmax;
use crate::{HdcError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyKind {
    #[default]
    Recurrent,
    Factorized,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ControllerConfig {
    pub policy: PolicyKind,
    pub hidden: usize,
    pub embed: usize,
    pub lr: f64,
    pub baseline_decay: f64,
    pub entropy_coef: f64,
    /// Half-width of the uniform initialization of recurrent weights.
    pub init_scale: f64,
    /// Start the output layers at zero so the initial policy is uniform.
    pub zero_output: bool,
}

impl Default for ControllerConfig {
    fn default() -> Self {
        Self {
            policy: PolicyKind::Recurrent,
            hidden: 64,
            embed: 16,
            lr: 0.01,
            baseline_decay: 0.9,
            entropy_coef: 0.01,
            init_scale: 0.1,
            zero_output: true,
        }
    }
}

/// Offsets of every parameter block in the flat parameter vector.
#[derive(Debug, Clone, PartialEq)]
struct Layout {
    h0: usize,
    x0: usize,
    // emb[t] embeds the choice made at decision t-1; emb[0] is unused.
    emb: Vec<usize>,
    w_xh: usize,
    w_hh: usize,
    b_h: usize,
    w_out: Vec<usize>,
    b_out: Vec<usize>,
    total: usize,
}

impl Layout {
    fn new(policy: PolicyKind, arities: &[usize], hidden: usize, embed: usize) -> Self {
        let mut next = 0;
        let mut take = |n: usize| {
            let at = next;
            next += n;
            at
        };
        let recurrent = policy == PolicyKind::Recurrent;
        let (h, e) = if recurrent { (hidden, embed) } else { (0, 0) };
        let h0 = take(h);
        let x0 = take(e);
        let emb = (0..arities.len())
            .map(|t| if t == 0 { 0 } else { take(arities[t - 1] * e) })
            .collect();
        let w_xh = take(h * e);
        let w_hh = take(h * h);
        let b_h = take(h);
        let w_out = arities.iter().map(|&a| take(a * h)).collect();
        let b_out = arities.iter().map(|&a| take(a)).collect();
        Self { h0, x0, emb, w_xh, w_hh, b_h, w_out, b_out, total: next }
    }
}

/// Choices and per-decision log-probabilities of one sampled architecture.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledPath {
    pub choices: Vec<usize>,
    pub log_probs: Vec<f64>,
}

impl SampledPath {
    pub fn log_prob(&self) -> f64 {
        self.log_probs.iter().sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UpdateInfo {
    pub advantage: f64,
    /// Baseline used for the advantage (before this update folded in).
    pub baseline: f64,
}

struct Trace {
    xs: Vec<Vec<f64>>,
    // hs[0] is the start state, hs[t + 1] the state at decision t.
    hs: Vec<Vec<f64>>,
    probs: Vec<Vec<f64>>,
    actions: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Controller {
    config: ControllerConfig,
    arities: Vec<usize>,
    layout: Layout,
    params: Vec<f64>,
    baseline: f64,
    updates: u64,
}

impl Controller {
    pub fn new<R: Rng>(config: ControllerConfig, arities: &[usize], rng: &mut R) -> Result<Self> {
        if arities.is_empty() || arities.contains(&0) {
            return Err(HdcError::InvalidConfig {
                field: "arities",
                reason: format!("{arities:?} has an empty decision"),
            });
        }
        if config.policy == PolicyKind::Recurrent && (config.hidden == 0 || config.embed == 0) {
            return Err(HdcError::InvalidConfig {
                field: "controller_hidden",
                reason: "hidden and embedding widths must be positive".into(),
            });
        }
        let layout = Layout::new(config.policy, arities, config.hidden, config.embed);
        let mut params = vec![0.0; layout.total];
        if config.init_scale > 0.0 {
            let u = Uniform::new_inclusive(-config.init_scale, config.init_scale);
            let out_start = layout.w_out.first().copied().unwrap_or(layout.total);
            let end = if config.zero_output { out_start } else { layout.total };
            for p in &mut params[..end] {
                *p = u.sample(rng);
            }
        }
        Ok(Self {
            config,
            arities: arities.to_vec(),
            layout,
            params,
            baseline: 0.0,
            updates: 0,
        })
    }

    pub(crate) fn from_parts(
        config: ControllerConfig,
        arities: Vec<usize>,
        params: Vec<f64>,
        baseline: f64,
        updates: u64,
    ) -> Result<Self> {
        let layout = Layout::new(config.policy, &arities, config.hidden, config.embed);
        if layout.total != params.len() {
            return Err(HdcError::Format(format!(
                "expected {} controller parameters, found {}",
                layout.total,
                params.len()
            )));
        }
        Ok(Self { config, arities, layout, params, baseline, updates })
    }

    pub fn config(&self) -> &ControllerConfig {
        &self.config
    }

    pub fn arities(&self) -> &[usize] {
        &self.arities
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    pub fn baseline(&self) -> f64 {
        self.baseline
    }

    pub fn updates(&self) -> u64 {
        self.updates
    }

    fn recurrent(&self) -> bool {
        self.config.policy == PolicyKind::Recurrent
    }

    fn run(&self, mut choose: impl FnMut(usize, &[f64]) -> usize) -> Trace {
        let (h, e) = (self.config.hidden, self.config.embed);
        let p = &self.params;
        let l = &self.layout;
        let steps = self.arities.len();
        let mut tr = Trace {
            xs: Vec::with_capacity(steps),
            hs: Vec::with_capacity(steps + 1),
            probs: Vec::with_capacity(steps),
            actions: Vec::with_capacity(steps),
        };
        if self.recurrent() {
            tr.hs.push(p[l.h0..l.h0 + h].to_vec());
        }
        for t in 0..steps {
            let a = self.arities[t];
            let logits: Vec<f64> = if self.recurrent() {
                let x = if t == 0 {
                    p[l.x0..l.x0 + e].to_vec()
                } else {
                    let row = l.emb[t] + tr.actions[t - 1] * e;
                    p[row..row + e].to_vec()
                };
                let prev = &tr.hs[t];
                let mut hid = vec![0.0; h];
                for (i, hv) in hid.iter_mut().enumerate() {
                    let wx = &p[l.w_xh + i * e..l.w_xh + (i + 1) * e];
                    let wh = &p[l.w_hh + i * h..l.w_hh + (i + 1) * h];
                    let pre: f64 = p[l.b_h + i]
                        + wx.iter().zip(&x).map(|(w, v)| w * v).sum::<f64>()
                        + wh.iter().zip(prev).map(|(w, v)| w * v).sum::<f64>();
                    *hv = pre.tanh();
                }
                let z = (0..a)
                    .map(|k| {
                        let w = &p[l.w_out[t] + k * h..l.w_out[t] + (k + 1) * h];
                        p[l.b_out[t] + k] + w.iter().zip(&hid).map(|(w, v)| w * v).sum::<f64>()
                    })
                    .collect();
                tr.xs.push(x);
                tr.hs.push(hid);
                z
            } else {
                p[l.b_out[t]..l.b_out[t] + a].to_vec()
            };
            let probs = softmax(&logits);
            let action = choose(t, &probs);
            tr.probs.push(probs);
            tr.actions.push(action);
        }
        tr
    }

    fn path(tr: &Trace) -> SampledPath {
        SampledPath {
            log_probs: tr.probs.iter().zip(&tr.actions).map(|(p, &a)| p[a].ln()).collect(),
            choices: tr.actions.clone(),
        }
    }

    /// Sample one choice per decision.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> SampledPath {
        Self::path(&self.run(|_, probs| {
            let u: f64 = rng.gen();
            let mut cum = 0.0;
            for (k, &p) in probs.iter().enumerate() {
                cum += p;
                if u < cum {
                    return k;
                }
            }
            probs.len() - 1
        }))
    }

    /// Most likely choice at every step.
    pub fn greedy(&self) -> SampledPath {
        Self::path(&self.run(|_, probs| crate::model::metrics::argmax(probs)))
    }

    /// Per-step distributions along a fixed path.
    pub fn distributions(&self, choices: &[usize]) -> Vec<Vec<f64>> {
        self.run(|t, _| choices[t]).probs
    }

    /// Monte-Carlo estimate of the marginal probability that `decision`
    /// takes `choice`, averaging the exact conditional over sampled prefixes.
    pub fn marginal<R: Rng>(&self, decision: usize, choice: usize, samples: usize, rng: &mut R) -> f64 {
        let mut total = 0.0;
        for _ in 0..samples {
            let path = self.sample(rng);
            total += self.distributions(&path.choices)[decision][choice];
        }
        total / samples as f64
    }

    /// The REINFORCE objective for a fixed path.
    pub fn objective(&self, choices: &[usize], advantage: f64, entropy_coef: f64) -> f64 {
        let probs = self.distributions(choices);
        probs
            .iter()
            .zip(choices)
            .map(|(p, &a)| advantage * p[a].ln() + entropy_coef * entropy(p))
            .sum()
    }

    /// Exact gradient of [`Controller::objective`] by backpropagation.
    pub fn gradient(&self, choices: &[usize], advantage: f64, entropy_coef: f64) -> Vec<f64> {
        let tr = self.run(|t, _| choices[t]);
        let (h, e) = (self.config.hidden, self.config.embed);
        let p = &self.params;
        let l = &self.layout;
        let mut g = vec![0.0; p.len()];
        let mut dh_next = vec![0.0; h];

        for t in (0..self.arities.len()).rev() {
            let probs = &tr.probs[t];
            let a = tr.actions[t];
            let ent = entropy(probs);
            let dz: Vec<f64> = probs
                .iter()
                .enumerate()
                .map(|(k, &pk)| {
                    let onehot = if k == a { 1.0 } else { 0.0 };
                    let dent = if pk > 0.0 { -pk * (pk.ln() + ent) } else { 0.0 };
                    advantage * (onehot - pk) + entropy_coef * dent
                })
                .collect();
            for (k, &d) in dz.iter().enumerate() {
                g[l.b_out[t] + k] += d;
            }
            if !self.recurrent() {
                continue;
            }

            let hid = &tr.hs[t + 1];
            let mut dh = dh_next.clone();
            for (k, &d) in dz.iter().enumerate() {
                let row = l.w_out[t] + k * h;
                for i in 0..h {
                    g[row + i] += d * hid[i];
                    dh[i] += p[row + i] * d;
                }
            }
            let da: Vec<f64> = dh.iter().zip(hid).map(|(d, v)| d * (1.0 - v * v)).collect();
            let x = &tr.xs[t];
            let prev = &tr.hs[t];
            let x_at = if t == 0 { l.x0 } else { l.emb[t] + tr.actions[t - 1] * e };
            dh_next = vec![0.0; h];
            for (i, &d) in da.iter().enumerate() {
                g[l.b_h + i] += d;
                for j in 0..e {
                    g[l.w_xh + i * e + j] += d * x[j];
                    g[x_at + j] += p[l.w_xh + i * e + j] * d;
                }
                for j in 0..h {
                    g[l.w_hh + i * h + j] += d * prev[j];
                    dh_next[j] += p[l.w_hh + i * h + j] * d;
                }
            }
        }
        if self.recurrent() {
            for i in 0..h {
                g[l.h0 + i] += dh_next[i];
            }
        }
        g
    }

    /// One REINFORCE step for a sampled path and its reward, then fold the
    /// reward into the moving-average baseline.
    pub fn update(&mut self, path: &SampledPath, reward: f64) -> Result<UpdateInfo> {
        if !reward.is_finite() {
            return Err(HdcError::NonFiniteReward(reward));
        }
        let baseline = self.baseline;
        let advantage = reward - baseline;
        if self.config.lr != 0.0 && (advantage != 0.0 || self.config.entropy_coef != 0.0) {
            let g = self.gradient(&path.choices, advantage, self.config.entropy_coef);
            for (p, d) in self.params.iter_mut().zip(g) {
                *p += self.config.lr * d;
            }
        }
        let decay = self.config.baseline_decay;
        self.baseline = decay * baseline + (1.0 - decay) * reward;
        self.updates += 1;
        Ok(UpdateInfo { advantage, baseline })
    }
}

fn entropy(p: &[f64]) -> f64 {
    -p.iter().filter(|&&x| x > 0.0).map(|&x| x * x.ln()).sum::<f64>()
}
