//! Rate RNN with manual backpropagation through time, plus its task.
//!
//! The task is a one-choice spatial inference problem on a 3x3 grid: a goal
//! appears in one of the four corners, then after a delay two candidate
//! locations (edge midpoints) light up, and the network must pick the one
//! nearer the goal. Chance is 25%. Inputs are 18 channels (9 goal cells +
//! 9 option cells), all corrupted with Gaussian noise at every step.
//!
//! The cell is a plain tanh RNN read out at the final step. Gradients are
//! computed by hand-unrolled reverse mode; the structural penalty from
//! [`crate::constraints`] applies to the recurrent matrix only.

use crate::constraints::{
    constraint_loss, penalty_gradient, total_loss, ConstraintContext, RegularizerKind,
};
use crate::error::{Error, Result};
use crate::numerics::RandomSource;
use crate::Matrix;

/// Input channels: 9 goal cells then 9 option cells.
pub const INPUT_CHANNELS: usize = 18;
/// Output classes, one per edge midpoint.
pub const CLASSES: usize = 4;
/// Steps per trial.
pub const TRIAL_STEPS: usize = 50;
/// Goal cue window (half-open, 0-indexed).
pub const GOAL_PHASE: std::ops::Range<usize> = 0..20;
/// Silent delay window.
pub const DELAY_PHASE: std::ops::Range<usize> = 20..30;
/// Choice-option window.
pub const CHOICE_PHASE: std::ops::Range<usize> = 30..50;
/// Input noise level (standard deviation, every channel, every step).
pub const INPUT_NOISE_SD: f64 = 0.1;

/// Goal positions: the four grid corners, as (row, col).
pub const GOAL_CELLS: [(usize, usize); 4] = [(0, 0), (0, 2), (2, 0), (2, 2)];
/// Choice options: the four edge midpoints; a trial's target class is an
/// index into this array.
pub const OPTION_CELLS: [(usize, usize); 4] = [(0, 1), (1, 0), (1, 2), (2, 1)];

fn cell_channel(cell: (usize, usize)) -> usize {
    cell.0 * 3 + cell.1
}

/// Squared grid distance; exact integers make tie detection exact.
fn dist2(a: (usize, usize), b: (usize, usize)) -> usize {
    let dr = a.0.abs_diff(b.0);
    let dc = a.1.abs_diff(b.1);
    dr * dr + dc * dc
}

/// A batch of trials: step-major inputs plus one target class per trial.
#[derive(Debug, Clone)]
pub struct TrialBatch {
    /// `TRIAL_STEPS` matrices, each `trials x INPUT_CHANNELS`.
    pub inputs: Vec<Matrix>,
    /// Target class per trial, an index into [`OPTION_CELLS`].
    pub targets: Vec<usize>,
}

impl TrialBatch {
    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    /// The sub-batch of trials `lo..hi` (copies the slice out).
    pub fn slice(&self, lo: usize, hi: usize) -> TrialBatch {
        let inputs = self
            .inputs
            .iter()
            .map(|m| Matrix::from_fn(hi - lo, INPUT_CHANNELS, |i, j| m.get(lo + i, j)))
            .collect();
        TrialBatch {
            inputs,
            targets: self.targets[lo..hi].to_vec(),
        }
    }
}

/// Generate `n` trials with the default noise level.
pub fn generate_trials(rng: &mut RandomSource, n: usize) -> TrialBatch {
    generate_trials_with_noise(rng, n, INPUT_NOISE_SD)
}

/// Generate `n` trials with an explicit noise level (0 exposes the raw
/// encoding; tests use it to check the phase layout).
pub fn generate_trials_with_noise(rng: &mut RandomSource, n: usize, noise_sd: f64) -> TrialBatch {
    let mut inputs = vec![Matrix::zeros(n, INPUT_CHANNELS); TRIAL_STEPS];
    let mut targets = Vec::with_capacity(n);
    for trial in 0..n {
        let goal = GOAL_CELLS[rng.next_below(4) as usize];
        // Two distinct options; pairs equidistant from the goal carry no
        // signal, so they are rejected and resampled.
        let (a, b) = loop {
            let a = rng.next_below(4) as usize;
            let mut b = rng.next_below(3) as usize;
            if b >= a {
                b += 1;
            }
            if dist2(goal, OPTION_CELLS[a]) != dist2(goal, OPTION_CELLS[b]) {
                break (a, b);
            }
        };
        let target = if dist2(goal, OPTION_CELLS[a]) < dist2(goal, OPTION_CELLS[b]) {
            a
        } else {
            b
        };
        targets.push(target);

        let goal_ch = cell_channel(goal);
        let opt_ch_a = 9 + cell_channel(OPTION_CELLS[a]);
        let opt_ch_b = 9 + cell_channel(OPTION_CELLS[b]);
        for (t, step) in inputs.iter_mut().enumerate() {
            let row = step.row_mut(trial);
            if GOAL_PHASE.contains(&t) {
                row[goal_ch] = 1.0;
            }
            if CHOICE_PHASE.contains(&t) {
                row[opt_ch_a] = 1.0;
                row[opt_ch_b] = 1.0;
            }
            if noise_sd > 0.0 {
                for v in row.iter_mut() {
                    *v += noise_sd * rng.next_normal::<f64>();
                }
            }
        }
    }
    TrialBatch { inputs, targets }
}

/// The network: one recurrent tanh layer, inputs and readout dense over all
/// hidden neurons.
#[derive(Debug, Clone)]
pub struct RateRnn {
    pub w_in: Matrix,     // N x 18
    pub w_rec: Matrix,    // N x N, the spatially constrained matrix
    pub b: Vec<f64>,      // N
    pub w_out: Matrix,    // 4 x N
    pub b_out: Vec<f64>,  // 4
}

/// Gradients for every parameter, same shapes as the fields of [`RateRnn`].
#[derive(Debug, Clone)]
pub struct RateGrads {
    pub w_in: Matrix,
    pub w_rec: Matrix,
    pub b: Vec<f64>,
    pub w_out: Matrix,
    pub b_out: Vec<f64>,
}

impl RateRnn {
    /// Hidden size.
    pub fn n(&self) -> usize {
        self.w_rec.rows()
    }

    /// Fresh network: orthogonal recurrent matrix scaled to spectral radius
    /// 0.9, uniform `+-1/sqrt(fan_in)` input/output maps, zero biases.
    pub fn init(rng: &mut RandomSource, n: usize) -> Result<RateRnn> {
        let w_rec = random_orthogonal(rng, n)?.scale(0.9);
        let kin = 1.0 / (INPUT_CHANNELS as f64).sqrt();
        let w_in = Matrix::from_fn(n, INPUT_CHANNELS, |_, _| (rng.next_f64() * 2.0 - 1.0) * kin);
        let kout = 1.0 / (n as f64).sqrt();
        let w_out = Matrix::from_fn(CLASSES, n, |_, _| (rng.next_f64() * 2.0 - 1.0) * kout);
        Ok(RateRnn {
            w_in,
            w_rec,
            b: vec![0.0; n],
            w_out,
            b_out: vec![0.0; CLASSES],
        })
    }

    /// Parameter arrays in checkpoint order, with shapes.
    pub fn param_shapes(&self) -> Vec<(&'static str, Vec<usize>)> {
        let n = self.n();
        vec![
            ("w_in", vec![n, INPUT_CHANNELS]),
            ("w_rec", vec![n, n]),
            ("b", vec![n]),
            ("w_out", vec![CLASSES, n]),
            ("b_out", vec![CLASSES]),
        ]
    }

    pub fn params(&self) -> Vec<(&'static str, &[f64])> {
        vec![
            ("w_in", self.w_in.data()),
            ("w_rec", self.w_rec.data()),
            ("b", &self.b),
            ("w_out", self.w_out.data()),
            ("b_out", &self.b_out),
        ]
    }

    pub fn params_mut(&mut self) -> Vec<(&'static str, &mut [f64])> {
        vec![
            ("w_in", self.w_in.data_mut()),
            ("w_rec", self.w_rec.data_mut()),
            ("b", &mut self.b),
            ("w_out", self.w_out.data_mut()),
            ("b_out", &mut self.b_out),
        ]
    }
}

impl RateGrads {
    fn zeros_like(net: &RateRnn) -> RateGrads {
        RateGrads {
            w_in: Matrix::zeros(net.w_in.rows(), net.w_in.cols()),
            w_rec: Matrix::zeros(net.w_rec.rows(), net.w_rec.cols()),
            b: vec![0.0; net.b.len()],
            w_out: Matrix::zeros(net.w_out.rows(), net.w_out.cols()),
            b_out: vec![0.0; net.b_out.len()],
        }
    }

    /// Gradient arrays in the same order as [`RateRnn::params`].
    pub fn slices(&self) -> Vec<&[f64]> {
        vec![
            self.w_in.data(),
            self.w_rec.data(),
            &self.b,
            self.w_out.data(),
            &self.b_out,
        ]
    }
}

/// Haar-ish orthogonal matrix: QR of a Gaussian matrix with the sign of R's
/// diagonal folded into Q (all eigenvalue moduli are exactly 1).
fn random_orthogonal(rng: &mut RandomSource, n: usize) -> Result<Matrix> {
    let g = Matrix::from_fn(n, n, |_, _| rng.next_normal::<f64>());
    let (mut q, r) = crate::numerics::qr_decompose(&g)?;
    for j in 0..n {
        if r.get(j, j) < 0.0 {
            for i in 0..n {
                let v = q.get(i, j);
                q.set(i, j, -v);
            }
        }
    }
    Ok(q)
}

/// Cached forward pass: hidden states for every step (index 0 is the zero
/// initial state) plus final-step logits.
#[derive(Debug)]
pub struct RateForward {
    /// `TRIAL_STEPS + 1` matrices, each `trials x N`.
    pub hidden: Vec<Matrix>,
    /// `trials x CLASSES`.
    pub logits: Matrix,
}

fn step_preactivation(net: &RateRnn, x: &Matrix, h_prev: &Matrix) -> Result<Matrix> {
    let mut pre = x.matmul_bt(&net.w_in)?;
    pre.axpy(1.0, &h_prev.matmul_bt(&net.w_rec)?)?;
    for i in 0..pre.rows() {
        let row = pre.row_mut(i);
        for (v, b) in row.iter_mut().zip(&net.b) {
            *v += b;
        }
    }
    Ok(pre)
}

/// Full forward pass with cached hidden states (training path).
pub fn forward(net: &RateRnn, batch: &TrialBatch) -> Result<RateForward> {
    let n_trials = batch.len();
    let mut hidden = Vec::with_capacity(TRIAL_STEPS + 1);
    hidden.push(Matrix::zeros(n_trials, net.n()));
    for x in &batch.inputs {
        let pre = step_preactivation(net, x, hidden.last().expect("nonempty"))?;
        hidden.push(pre.map(f64::tanh));
    }
    let logits = readout(net, hidden.last().expect("nonempty"))?;
    if !logits.is_finite() {
        return Err(Error::Diverged("rate forward produced non-finite logits".into()));
    }
    Ok(RateForward { hidden, logits })
}

/// Memory-light forward pass returning only the final logits (evaluation
/// path; keeps a single hidden matrix alive).
pub fn forward_logits(net: &RateRnn, batch: &TrialBatch) -> Result<Matrix> {
    let mut h = Matrix::zeros(batch.len(), net.n());
    for x in &batch.inputs {
        h = step_preactivation(net, x, &h)?.map(f64::tanh);
    }
    let logits = readout(net, &h)?;
    if !logits.is_finite() {
        return Err(Error::Diverged("rate forward produced non-finite logits".into()));
    }
    Ok(logits)
}

fn readout(net: &RateRnn, h_last: &Matrix) -> Result<Matrix> {
    let mut logits = h_last.matmul_bt(&net.w_out)?;
    for i in 0..logits.rows() {
        let row = logits.row_mut(i);
        for (v, b) in row.iter_mut().zip(&net.b_out) {
            *v += b;
        }
    }
    Ok(logits)
}

/// Mean softmax cross-entropy and its gradient with respect to the logits.
pub fn cross_entropy(logits: &Matrix, targets: &[usize]) -> Result<(f64, Matrix)> {
    let n = logits.rows();
    if n != targets.len() {
        return Err(Error::DimMismatch(format!(
            "{n} logit rows vs {} targets",
            targets.len()
        )));
    }
    if n == 0 {
        return Err(Error::EmptyInput("cross_entropy"));
    }
    let classes = logits.cols();
    let mut grad = Matrix::zeros(n, classes);
    let mut loss = 0.0;
    for i in 0..n {
        let t = targets[i];
        if t >= classes {
            return Err(Error::InvalidArg(format!(
                "target class {t} out of range for {classes} classes"
            )));
        }
        let row = logits.row(i);
        let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut sum = 0.0;
        for &v in row {
            sum += (v - max).exp();
        }
        loss += sum.ln() + max - row[t];
        let g = grad.row_mut(i);
        for (j, &v) in row.iter().enumerate() {
            g[j] = (v - max).exp() / sum / n as f64;
        }
        g[t] -= 1.0 / n as f64;
    }
    Ok((loss / n as f64, grad))
}

/// Reverse-mode gradients of the mean task loss (no penalty term).
fn backward(net: &RateRnn, batch: &TrialBatch, fwd: &RateForward, dlogits: &Matrix) -> Result<RateGrads> {
    let mut g = RateGrads::zeros_like(net);
    let h_last = &fwd.hidden[TRIAL_STEPS];
    g.w_out = dlogits.tr_matmul(h_last)?;
    g.b_out = dlogits.col_sums();
    let mut dh = dlogits.matmul(&net.w_out)?;
    for t in (1..=TRIAL_STEPS).rev() {
        let h_t = &fwd.hidden[t];
        // d(pre) through tanh': 1 - h^2.
        let da = dh.zip_map(h_t, |d, h| d * (1.0 - h * h))?;
        g.w_in.axpy(1.0, &da.tr_matmul(&batch.inputs[t - 1])?)?;
        g.w_rec.axpy(1.0, &da.tr_matmul(&fwd.hidden[t - 1])?)?;
        for (acc, v) in g.b.iter_mut().zip(da.col_sums()) {
            *acc += v;
        }
        dh = da.matmul(&net.w_rec)?;
    }
    Ok(g)
}

/// Loss components of one training step.
#[derive(Debug, Clone, Copy)]
pub struct LossBreakdown {
    pub total: f64,
    pub task: f64,
    pub constraint: f64,
}

/// Combined objective and gradients for one batch.
///
/// The penalty applies to `w_rec` only, through the gradient-stopped
/// multiplier contract of [`crate::constraints::constraint_loss`].
pub fn task_loss_and_grads(
    net: &RateRnn,
    batch: &TrialBatch,
    gamma: f64,
    kind: RegularizerKind,
    ctx: &ConstraintContext,
) -> Result<(LossBreakdown, RateGrads)> {
    let fwd = forward(net, batch)?;
    let (task, dlogits) = cross_entropy(&fwd.logits, &batch.targets)?;
    let mut grads = backward(net, batch, &fwd, &dlogits)?;
    let (constraint, multiplier) = constraint_loss(&net.w_rec, kind, ctx)?;
    if gamma > 0.0 {
        grads
            .w_rec
            .axpy(gamma, &penalty_gradient(&net.w_rec, &multiplier)?)?;
    }
    let total = total_loss(task, gamma, constraint)?;
    if !total.is_finite() {
        return Err(Error::Diverged(format!("non-finite training loss {total}")));
    }
    Ok((
        LossBreakdown {
            total,
            task,
            constraint,
        },
        grads,
    ))
}

/// Fraction of trials whose argmax logit is the target.
pub fn accuracy(net: &RateRnn, batch: &TrialBatch) -> Result<f64> {
    let logits = forward_logits(net, batch)?;
    let mut correct = 0usize;
    for (i, &t) in batch.targets.iter().enumerate() {
        let row = logits.row(i);
        let mut best = 0;
        for (j, &v) in row.iter().enumerate() {
            if v > row[best] {
                best = j;
            }
        }
        if best == t {
            correct += 1;
        }
    }
    Ok(correct as f64 / batch.len().max(1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::build_lattice;
    use crate::oracles;

    fn zero_net(n: usize) -> RateRnn {
        RateRnn {
            w_in: Matrix::zeros(n, INPUT_CHANNELS),
            w_rec: Matrix::zeros(n, n),
            b: vec![0.0; n],
            w_out: Matrix::zeros(CLASSES, n),
            b_out: vec![0.0; CLASSES],
        }
    }

    #[test]
    fn noiseless_trials_have_the_documented_phase_layout() {
        let mut rng = RandomSource::new(42);
        let batch = generate_trials_with_noise(&mut rng, 64, 0.0);
        for trial in 0..64 {
            for (t, step) in batch.inputs.iter().enumerate() {
                let row = step.row(trial);
                let goal_on: Vec<usize> = (0..9).filter(|&c| row[c] == 1.0).collect();
                let opts_on: Vec<usize> = (9..18).filter(|&c| row[c] == 1.0).collect();
                assert!(row.iter().all(|&v| v == 0.0 || v == 1.0));
                if GOAL_PHASE.contains(&t) {
                    assert_eq!(goal_on.len(), 1);
                    assert!(opts_on.is_empty());
                } else if DELAY_PHASE.contains(&t) {
                    assert!(goal_on.is_empty() && opts_on.is_empty());
                } else {
                    assert!(goal_on.is_empty());
                    assert_eq!(opts_on.len(), 2);
                    // Target is one of the two presented options.
                    let target_ch = 9 + cell_channel(OPTION_CELLS[batch.targets[trial]]);
                    assert!(opts_on.contains(&target_ch));
                }
            }
        }
    }

    #[test]
    fn target_is_strictly_nearer_option() {
        // Geometry spot checks: goal (0,0) prefers (0,1) over (1,2)
        // (distance 1 vs sqrt 5), and the (0,1)/(1,0) pair ties.
        assert_eq!(dist2((0, 0), (0, 1)), 1);
        assert_eq!(dist2((0, 0), (1, 2)), 5);
        assert_eq!(dist2((0, 0), (1, 0)), 1);

        let mut rng = RandomSource::new(7);
        let batch = generate_trials_with_noise(&mut rng, 512, 0.0);
        for trial in 0..512 {
            let opts: Vec<usize> = (9..18)
                .filter(|&c| batch.inputs[CHOICE_PHASE.start].get(trial, c) == 1.0)
                .map(|c| c - 9)
                .collect();
            let goal: Vec<usize> = (0..9)
                .filter(|&c| batch.inputs[0].get(trial, c) == 1.0)
                .collect();
            let g = (goal[0] / 3, goal[0] % 3);
            let cells: Vec<(usize, usize)> = opts.iter().map(|&c| (c / 3, c % 3)).collect();
            let d: Vec<usize> = cells.iter().map(|&c| dist2(g, c)).collect();
            assert_ne!(d[0], d[1], "equidistant pair survived resampling");
            let winner = if d[0] < d[1] { cells[0] } else { cells[1] };
            assert_eq!(OPTION_CELLS[batch.targets[trial]], winner);
        }
    }

    #[test]
    fn label_marginals_are_near_uniform() {
        let mut rng = RandomSource::new(11);
        let batch = generate_trials(&mut rng, 10_000);
        let mut counts = [0usize; CLASSES];
        for &t in &batch.targets {
            counts[t] += 1;
        }
        for c in counts {
            let frac = c as f64 / 10_000.0;
            assert!((frac - 0.25).abs() < 0.02, "marginal {frac}");
        }
    }

    #[test]
    fn generation_is_deterministic_per_seed() {
        let a = generate_trials(&mut RandomSource::new(9), 32);
        let b = generate_trials(&mut RandomSource::new(9), 32);
        assert_eq!(a.targets, b.targets);
        for (x, y) in a.inputs.iter().zip(&b.inputs) {
            assert_eq!(x, y);
        }
    }

    #[test]
    fn zero_net_logits_are_zero_and_loss_is_ln4() {
        let net = zero_net(12);
        let mut rng = RandomSource::new(3);
        let batch = generate_trials(&mut rng, 40);
        let logits = forward_logits(&net, &batch).unwrap();
        assert!(logits.data().iter().all(|&v| v == 0.0));
        let (loss, _) = cross_entropy(&logits, &batch.targets).unwrap();
        assert!((loss - 4.0f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn bias_only_net_always_picks_the_biased_class() {
        let mut net = zero_net(8);
        net.b_out = vec![1.0, 0.0, 0.0, 0.0];
        let mut rng = RandomSource::new(5);
        let batch = generate_trials(&mut rng, 400);
        let expected = batch.targets.iter().filter(|&&t| t == 0).count() as f64 / 400.0;
        assert_eq!(accuracy(&net, &batch).unwrap(), expected);
    }

    #[test]
    fn hidden_states_stay_inside_tanh_range() {
        let mut rng = RandomSource::new(21);
        let net = RateRnn::init(&mut rng, 30).unwrap();
        let batch = generate_trials(&mut rng, 16);
        let fwd = forward(&net, &batch).unwrap();
        for h in &fwd.hidden {
            assert!(h.data().iter().all(|&v| v.abs() < 1.0));
        }
    }

    #[test]
    fn orthogonal_init_has_spectral_radius_point_nine() {
        let mut rng = RandomSource::new(2);
        let net = RateRnn::init(&mut rng, 40).unwrap();
        let spec = crate::numerics::eigenvalues(&net.w_rec).unwrap();
        let radius = spec.spectral_radius();
        assert!((radius - 0.9).abs() < 1e-8, "radius {radius}");
        // And all moduli sit on the same circle.
        for m in spec.moduli() {
            assert!((m - 0.9).abs() < 1e-8);
        }
    }

    #[test]
    fn chance_accuracy_for_zero_net() {
        let net = zero_net(10);
        let mut rng = RandomSource::new(13);
        let batch = generate_trials(&mut rng, 10_000);
        let acc = accuracy(&net, &batch).unwrap();
        assert!((acc - 0.25).abs() < 0.02, "accuracy {acc}");
    }

    #[test]
    fn gradients_match_finite_differences_with_frozen_penalty() {
        let n = 5;
        let gamma = 0.05;
        let kind = RegularizerKind::SpaceComm;
        let ctx = ConstraintContext::new(build_lattice((n, 1, 1)).unwrap());
        let mut rng = RandomSource::new(99);
        let net = RateRnn::init(&mut rng, n).unwrap();
        let batch = generate_trials(&mut rng, 3);

        let (_, grads) = task_loss_and_grads(&net, &batch, gamma, kind, &ctx).unwrap();
        let (_, multiplier) = constraint_loss(&net.w_rec, kind, &ctx).unwrap();

        // Flatten parameters; the finite-difference objective rebuilds a net
        // from the flat vector and freezes the penalty multiplier.
        let flat: Vec<f64> = net.params().iter().flat_map(|(_, s)| s.iter().copied()).collect();
        let template = net.clone();
        let f = |x: &[f64]| {
            let mut candidate = template.clone();
            let mut off = 0;
            for (_, slice) in candidate.params_mut() {
                slice.copy_from_slice(&x[off..off + slice.len()]);
                off += slice.len();
            }
            let fwd = forward(&candidate, &batch).unwrap();
            let (task, _) = cross_entropy(&fwd.logits, &batch.targets).unwrap();
            let penalty: f64 = candidate
                .w_rec
                .data()
                .iter()
                .zip(multiplier.data())
                .map(|(&w, &m)| w.abs() * m)
                .sum();
            task + gamma * penalty
        };
        let numeric = oracles::finite_difference_gradient(f, &flat, 1e-5);
        let analytic: Vec<f64> = grads.slices().concat();
        let err = oracles::max_relative_gradient_error(&analytic, &numeric, 1e-7).unwrap();
        assert!(err <= 1e-4, "max relative gradient error {err}");
    }

    #[test]
    fn zero_gamma_gradients_equal_pure_task_gradients() {
        let n = 6;
        let ctx = ConstraintContext::new(build_lattice((n, 1, 1)).unwrap());
        let mut rng = RandomSource::new(4);
        let net = RateRnn::init(&mut rng, n).unwrap();
        let batch = generate_trials(&mut rng, 5);
        let (_, g0) = task_loss_and_grads(&net, &batch, 0.0, RegularizerKind::SpaceComm, &ctx).unwrap();
        let fwd = forward(&net, &batch).unwrap();
        let (_, dlogits) = cross_entropy(&fwd.logits, &batch.targets).unwrap();
        let pure = backward(&net, &batch, &fwd, &dlogits).unwrap();
        assert_eq!(g0.w_rec, pure.w_rec);
        assert_eq!(g0.w_in, pure.w_in);
    }
}
