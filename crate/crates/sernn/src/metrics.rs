//! Network outcome measures: entropies, spectral summaries, modularity,
//! distance-weight coupling, and the flat records/CSV table the sweep
//! harness aggregates them into.
//!
//! Every measure is a pure function of the recurrent weight matrix (plus the
//! lattice where distances matter), so records are reproducible from
//! checkpoints alone.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::constraints::{communicability, RegularizerKind, DEFAULT_STRENGTH_FLOOR};
use crate::embedding::DistanceLattice;
use crate::error::{Error, Result};
use crate::numerics::{eigenvalues, pearson, pearson_r, RandomSource};
use crate::training::NetworkCheckpoint;
use crate::{Matrix, Spectrum};

/// Weight Shannon entropy with the per-row `1/N` prefactor.
///
/// Entry probabilities are global: `p_ij = |m_ij| / sum |m|` over all
/// entries, diagonal included. The `1/N` scaling makes the all-ones maximum
/// `2 log2(N) / N` rather than `2 log2(N)`; comparisons are relative, so the
/// convention only has to stay fixed.
pub fn shannon_entropy(m: &Matrix) -> Result<f64> {
    m.require_square()?;
    let total: f64 = m.data().iter().map(|v| v.abs()).sum();
    if total <= 0.0 {
        return Err(Error::ZeroWeight("entropy of an all-zero matrix is undefined"));
    }
    let mut h = 0.0;
    for &v in m.data() {
        let p = v.abs() / total;
        if p > 0.0 {
            h -= p * p.log2();
        }
    }
    Ok(h / m.rows() as f64)
}

/// Entropy of the eigenvalue modulus distribution `p_i = |l_i| / sum |l|`.
///
/// An all-zero (nilpotent) spectrum carries no information and returns 0.
pub fn spectral_entropy(spec: &Spectrum) -> f64 {
    let moduli = spec.moduli();
    let total: f64 = moduli.iter().sum();
    if total <= 0.0 {
        return 0.0;
    }
    let mut h = 0.0;
    for &m in &moduli {
        let p = m / total;
        if p > 0.0 {
            h -= p * p.log2();
        }
    }
    h
}

/// Spectral radius: the largest eigenvalue modulus.
pub fn leading_eigenvalue(spec: &Spectrum) -> f64 {
    spec.spectral_radius()
}

/// Share of total eigenvalue modulus that is imaginary: `sum |Im| / sum |l|`.
/// All-zero spectra return 0.
pub fn imag_fraction(spec: &Spectrum) -> f64 {
    let total: f64 = spec.moduli().iter().sum();
    if total <= 0.0 {
        return 0.0;
    }
    let imag: f64 = spec.im().iter().map(|v| v.abs()).sum();
    imag / total
}

/// Sum of absolute weights.
pub fn total_weight(w: &Matrix) -> f64 {
    w.data().iter().map(|v| v.abs()).sum()
}

/// Antisymmetry share `|W - Wt| / (|W - Wt| + |W + Wt|)` in Frobenius norms:
/// 0 for symmetric, 1 for antisymmetric matrices.
pub fn symmetry_index(w: &Matrix) -> Result<f64> {
    w.require_square()?;
    let wt = w.transpose();
    let anti = w.sub(&wt)?.frobenius_norm();
    let sym = w.add(&wt)?.frobenius_norm();
    if anti + sym <= 0.0 {
        return Err(Error::ZeroWeight("symmetry index of an all-zero matrix is undefined"));
    }
    Ok(anti / (anti + sym))
}

// ---------------------------------------------------------------------------
// Modularity.

/// Pairs whose permutation-test null distribution is estimated on a fixed
/// subsample rather than the full pair set; keeps 10,000-shuffle p-values
/// affordable for 100-node matrices (9,900 pairs) on one core.
const CORRELATION_P_SUBSAMPLE: usize = 2000;

/// Groups this small are split by exhaustive enumeration instead of the
/// power-iteration + fine-tuning heuristic, making each bisection exact.
const EXACT_SPLIT_LIMIT: usize = 14;

/// Maximum-modularity partition of the weighted directed graph `|W|` (zero
/// diagonal), resolution 1.
///
/// Q = (1/m) sum_ij [A_ij - k_out_i k_in_j / m] delta(c_i, c_j), maximized
/// by recursive spectral bisection of the symmetrized modularity matrix with
/// single-flip fine-tuning after each split. Groups of at most
/// [`EXACT_SPLIT_LIMIT`] nodes are bisected exhaustively. Deterministic for
/// a fixed input.
///
/// A matrix with weight only on the diagonal has no edges to cluster; it
/// gets Q = 0 with every node in its own community. A fully zero matrix is
/// an error.
pub fn modularity_q(w: &Matrix) -> Result<(f64, Vec<usize>)> {
    w.require_square()?;
    let n = w.rows();
    if total_weight(w) <= 0.0 {
        return Err(Error::ZeroWeight("modularity of an all-zero matrix is undefined"));
    }
    let a = Matrix::from_fn(n, n, |i, j| if i == j { 0.0 } else { w.get(i, j).abs() });
    let k_out = a.row_sums();
    let k_in = a.col_sums();
    let m: f64 = k_out.iter().sum();
    if m <= 0.0 {
        return Ok((0.0, (0..n).collect()));
    }

    // Symmetrized modularity matrix; partition scores below use
    // s' B s / (4m) = directed Q difference, and the final Q divides by 2m.
    let mut b = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let dir_ij = a.get(i, j) - k_out[i] * k_in[j] / m;
            let dir_ji = a.get(j, i) - k_out[j] * k_in[i] / m;
            b.set(i, j, dir_ij + dir_ji);
        }
    }

    let mut labels = vec![0usize; n];
    let mut next_label = 1usize;
    let mut stack: Vec<Vec<usize>> = vec![(0..n).collect()];
    while let Some(group) = stack.pop() {
        let ng = group.len();
        if ng < 2 {
            continue;
        }
        // Subgroup modularity matrix with Newman's diagonal correction, so a
        // split is scored inside the group without claiming weight that
        // crossing edges already spent. (For the full graph the row sums are
        // zero and the correction vanishes.)
        let mut bg = Matrix::from_fn(ng, ng, |i, j| b.get(group[i], group[j]));
        for i in 0..ng {
            let row_sum: f64 = (0..ng).map(|j| bg.get(i, j)).sum();
            let d = bg.get(i, i);
            bg.set(i, i, d - row_sum);
        }

        let signs = if ng <= EXACT_SPLIT_LIMIT {
            best_split_exhaustive(&bg)
        } else {
            let mut s = leading_eigenvector_signs(&bg);
            fine_tune_split(&bg, &mut s);
            s
        };
        let gain = split_score(&bg, &signs);
        if gain <= 1e-10 || signs.iter().all(|&s| s == signs[0]) {
            continue;
        }
        let (mut plus, mut minus) = (Vec::new(), Vec::new());
        for (i, &node) in group.iter().enumerate() {
            if signs[i] > 0 {
                plus.push(node);
            } else {
                minus.push(node);
            }
        }
        for &node in &minus {
            labels[node] = next_label;
        }
        next_label += 1;
        stack.push(plus);
        stack.push(minus);
    }

    canonicalize(&mut labels);
    let mut q = 0.0;
    for i in 0..n {
        for j in 0..n {
            if labels[i] == labels[j] {
                q += b.get(i, j);
            }
        }
    }
    Ok((q / (2.0 * m), labels))
}

/// `s' Bg s` for a +-1 sign vector; positive means the split helps.
fn split_score(bg: &Matrix, signs: &[i8]) -> f64 {
    let ng = signs.len();
    let mut total = 0.0;
    for i in 0..ng {
        let si = signs[i] as f64;
        for j in 0..ng {
            total += si * signs[j] as f64 * bg.get(i, j);
        }
    }
    total
}

/// Exhaustive best bisection for small groups; node 0 is pinned to `+1`
/// (signs are symmetric), ties keep the first maximum found.
fn best_split_exhaustive(bg: &Matrix) -> Vec<i8> {
    let ng = bg.rows();
    let mut best = vec![1i8; ng];
    let mut best_score = split_score(bg, &best);
    let mut signs = vec![1i8; ng];
    for mask in 1u32..(1 << (ng - 1)) {
        for i in 1..ng {
            signs[i] = if mask & (1 << (i - 1)) != 0 { -1 } else { 1 };
        }
        let score = split_score(bg, &signs);
        if score > best_score {
            best_score = score;
            best.copy_from_slice(&signs);
        }
    }
    best
}

/// Signs of the leading eigenvector of the symmetric matrix `bg`, via power
/// iteration on the Gershgorin-shifted matrix (positive semidefinite, so the
/// dominant direction is the most-positive eigenvalue's). The start vector
/// comes from a fixed stream: deterministic output for a fixed input.
fn leading_eigenvector_signs(bg: &Matrix) -> Vec<i8> {
    let ng = bg.rows();
    let shift = (0..ng)
        .map(|i| (0..ng).map(|j| bg.get(i, j).abs()).sum::<f64>())
        .fold(0.0f64, f64::max);
    let mut rng = RandomSource::new(0x6d0d_5eed);
    let mut v: Vec<f64> = (0..ng).map(|_| rng.next_f64() - 0.5).collect();
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    for x in &mut v {
        *x /= norm;
    }
    let mut next = vec![0.0; ng];
    for _ in 0..1000 {
        for i in 0..ng {
            let mut acc = shift * v[i];
            for j in 0..ng {
                acc += bg.get(i, j) * v[j];
            }
            next[i] = acc;
        }
        let norm = next.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm <= 0.0 {
            break;
        }
        let mut delta = 0.0f64;
        for i in 0..ng {
            next[i] /= norm;
            delta = delta.max((next[i] - v[i]).abs());
        }
        std::mem::swap(&mut v, &mut next);
        if delta < 1e-13 {
            break;
        }
    }
    v.iter().map(|&x| if x < 0.0 { -1 } else { 1 }).collect()
}

/// Kernighan-Lin-style refinement: repeated passes in which every node is
/// flipped once, greedily by exact score change, keeping the best
/// configuration seen. The diagonal never affects a flip (s_i^2 = 1), so
/// deltas use off-diagonal terms only.
fn fine_tune_split(bg: &Matrix, signs: &mut Vec<i8>) {
    let ng = signs.len();
    let mut best = signs.clone();
    let mut best_score = split_score(bg, signs);
    for _pass in 0..50 {
        let mut current = best.clone();
        let mut score = best_score;
        // bs[i] = sum_j!=i Bg_ij s_j, maintained across flips.
        let mut bs: Vec<f64> = (0..ng)
            .map(|i| {
                (0..ng)
                    .filter(|&j| j != i)
                    .map(|j| bg.get(i, j) * current[j] as f64)
                    .sum()
            })
            .collect();
        let mut flipped = vec![false; ng];
        let before_pass = best_score;
        for _ in 0..ng {
            let mut pick = usize::MAX;
            let mut pick_delta = f64::NEG_INFINITY;
            for i in 0..ng {
                if flipped[i] {
                    continue;
                }
                let delta = -4.0 * current[i] as f64 * bs[i];
                if delta > pick_delta {
                    pick_delta = delta;
                    pick = i;
                }
            }
            current[pick] = -current[pick];
            flipped[pick] = true;
            score += pick_delta;
            for j in 0..ng {
                if j != pick {
                    bs[j] += 2.0 * bg.get(j, pick) * current[pick] as f64;
                }
            }
            if score > best_score + 1e-12 {
                best_score = score;
                best = current.clone();
            }
        }
        if best_score <= before_pass + 1e-12 {
            break;
        }
    }
    *signs = best;
}

/// Relabel communities in first-appearance order: node 0's community is 0,
/// the next new community seen is 1, and so on.
fn canonicalize(labels: &mut [usize]) {
    let mut map: Vec<Option<usize>> = vec![None; labels.len()];
    let mut next = 0usize;
    for l in labels.iter_mut() {
        let slot = &mut map[*l];
        *l = match slot {
            Some(v) => *v,
            None => {
                *slot = Some(next);
                next += 1;
                next - 1
            }
        };
    }
}

// ---------------------------------------------------------------------------
// Distance-weight coupling.

/// Pearson correlation between connection probability `p_ij = |w_ij|/sum|w|`
/// and distance, over off-diagonal pairs with `p_ij > 0`.
///
/// Needs at least 3 surviving pairs. `r` uses every pair; the permutation
/// p-value estimates its null on a fixed-seed subsample of at most
/// [`CORRELATION_P_SUBSAMPLE`] pairs, which keeps full-table analysis inside
/// the single-core budget without touching the correlation itself.
pub fn distance_weight_correlation(w: &Matrix, lattice: &DistanceLattice) -> Result<(f64, f64)> {
    w.require_square()?;
    let n = w.rows();
    if n != lattice.len() {
        return Err(Error::DimMismatch(format!(
            "weights are {n}x{n} but the lattice has {} sites",
            lattice.len()
        )));
    }
    let total = total_weight(w);
    if total <= 0.0 {
        return Err(Error::ZeroWeight("distance correlation of an all-zero matrix"));
    }
    let d = lattice.distances();
    let mut ps = Vec::new();
    let mut ds = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let p = w.get(i, j).abs() / total;
            if p > 0.0 {
                ps.push(p);
                ds.push(d.get(i, j));
            }
        }
    }
    if ps.len() < 3 {
        return Err(Error::EmptyInput(
            "fewer than 3 positive off-diagonal weights for distance correlation",
        ));
    }
    // Uniform weights leave only rounding residue after mean subtraction,
    // which the variance check cannot distinguish from real signal.
    if ps.windows(2).all(|w| w[0] == w[1]) {
        return Err(Error::DegenerateVariance("distance correlation of uniform weights"));
    }
    let r = pearson_r(&ps, &ds)?;
    let p = if ps.len() <= CORRELATION_P_SUBSAMPLE {
        pearson(&ps, &ds)?.1
    } else {
        let mut idx: Vec<u32> = (0..ps.len() as u32).collect();
        RandomSource::new(0x5ab5_eed0).shuffle(&mut idx);
        let take: Vec<usize> = idx[..CORRELATION_P_SUBSAMPLE].iter().map(|&i| i as usize).collect();
        let sub_p: Vec<f64> = take.iter().map(|&i| ps[i]).collect();
        let sub_d: Vec<f64> = take.iter().map(|&i| ds[i]).collect();
        pearson(&sub_p, &sub_d)?.1
    };
    Ok((r, p))
}

// ---------------------------------------------------------------------------
// Records and the table.

/// One analyzed checkpoint, flattened for the sweep table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricRecord {
    pub kind: RegularizerKind,
    pub gamma: f64,
    pub seed: u64,
    pub epoch: usize,
    pub accuracy: f64,
    pub q: f64,
    pub h_w: f64,
    pub h_c: f64,
    pub h_lambda: f64,
    pub lambda_max: f64,
    pub total_weight: f64,
    pub sym_index: f64,
    pub imag_fraction: f64,
    /// Blank when fewer than 3 positive off-diagonal weights survive.
    pub dist_corr_r: Option<f64>,
    pub dist_corr_p: Option<f64>,
}

/// Every metric for one checkpoint's recurrent matrix.
pub fn analyze_checkpoint(
    checkpoint: &NetworkCheckpoint,
    lattice: &DistanceLattice,
) -> Result<MetricRecord> {
    let w = checkpoint.array_as_matrix("w_rec")?;
    let spec = eigenvalues(&w)?;
    let comm = communicability(&w, DEFAULT_STRENGTH_FLOOR)?;
    let (q, _) = modularity_q(&w)?;
    let dist = match distance_weight_correlation(&w, lattice) {
        Ok((r, p)) => (Some(r), Some(p)),
        Err(Error::EmptyInput(_)) | Err(Error::DegenerateVariance(_)) => (None, None),
        Err(e) => return Err(e),
    };
    let m = &checkpoint.manifest;
    Ok(MetricRecord {
        kind: m.kind,
        gamma: m.gamma,
        seed: m.seed,
        epoch: m.epoch,
        accuracy: m.accuracy,
        q,
        h_w: shannon_entropy(&w)?,
        h_c: shannon_entropy(&comm)?,
        h_lambda: spectral_entropy(&spec),
        lambda_max: leading_eigenvalue(&spec),
        total_weight: total_weight(&w),
        sym_index: symmetry_index(&w)?,
        imag_fraction: imag_fraction(&spec),
        dist_corr_r: dist.0,
        dist_corr_p: dist.1,
    })
}

pub const METRICS_CSV_HEADER: &str = "kind,gamma,seed,epoch,accuracy,q,h_w,h_c,h_lambda,\
lambda_max,total_weight,sym_index,imag_fraction,dist_corr_r,dist_corr_p";

/// In-memory sweep table with canonical (kind, gamma, seed, epoch) ordering.
#[derive(Debug, Clone, Default)]
pub struct MetricsTable {
    pub records: Vec<MetricRecord>,
}

fn fmt_float(x: f64) -> String {
    // Shortest exponent form that parses back to the identical f64, so a
    // table survives a CSV round trip bit-for-bit.
    format!("{x:e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_float).unwrap_or_default()
}

impl MetricsTable {
    pub fn new(records: Vec<MetricRecord>) -> MetricsTable {
        let mut t = MetricsTable { records };
        t.sort();
        t
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn push(&mut self, record: MetricRecord) {
        self.records.push(record);
    }

    pub fn sort(&mut self) {
        self.records.sort_by(|a, b| {
            (a.kind.as_str(), a.gamma, a.seed, a.epoch)
                .partial_cmp(&(b.kind.as_str(), b.gamma, b.seed, b.epoch))
                .expect("finite gammas")
        });
    }

    /// Serialize floats in shortest round-trip exponent form; `None` stays
    /// blank.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut out = String::with_capacity(self.records.len() * 220 + 200);
        out.push_str(METRICS_CSV_HEADER);
        out.push('\n');
        for r in &self.records {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                r.kind.as_str(),
                fmt_float(r.gamma),
                r.seed,
                r.epoch,
                fmt_float(r.accuracy),
                fmt_float(r.q),
                fmt_float(r.h_w),
                fmt_float(r.h_c),
                fmt_float(r.h_lambda),
                fmt_float(r.lambda_max),
                fmt_float(r.total_weight),
                fmt_float(r.sym_index),
                fmt_float(r.imag_fraction),
                fmt_opt(r.dist_corr_r),
                fmt_opt(r.dist_corr_p),
            )
            .expect("writing to a String cannot fail");
        }
        std::fs::write(path, out).map_err(|e| Error::io(path, e))
    }

    pub fn read_csv(path: &Path) -> Result<MetricsTable> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut lines = text.lines();
        match lines.next() {
            Some(h) if h == METRICS_CSV_HEADER => {}
            other => {
                return Err(Error::format(
                    path,
                    format!("unexpected metrics header: {other:?}"),
                ))
            }
        }
        let mut records = Vec::new();
        for (lineno, line) in lines.enumerate() {
            if line.is_empty() {
                continue;
            }
            let cells: Vec<&str> = line.split(',').collect();
            if cells.len() != 15 {
                return Err(Error::format(
                    path,
                    format!("line {}: expected 15 cells, found {}", lineno + 2, cells.len()),
                ));
            }
            let f = |i: usize| -> Result<f64> {
                cells[i]
                    .parse::<f64>()
                    .map_err(|e| Error::format(path, format!("line {}: {e}", lineno + 2)))
            };
            let opt = |i: usize| -> Result<Option<f64>> {
                if cells[i].is_empty() {
                    Ok(None)
                } else {
                    f(i).map(Some)
                }
            };
            records.push(MetricRecord {
                kind: cells[0].parse()?,
                gamma: f(1)?,
                seed: cells[2]
                    .parse()
                    .map_err(|e| Error::format(path, format!("line {}: {e}", lineno + 2)))?,
                epoch: cells[3]
                    .parse()
                    .map_err(|e| Error::format(path, format!("line {}: {e}", lineno + 2)))?,
                accuracy: f(4)?,
                q: f(5)?,
                h_w: f(6)?,
                h_c: f(7)?,
                h_lambda: f(8)?,
                lambda_max: f(9)?,
                total_weight: f(10)?,
                sym_index: f(11)?,
                imag_fraction: f(12)?,
                dist_corr_r: opt(13)?,
                dist_corr_p: opt(14)?,
            });
        }
        Ok(MetricsTable { records })
    }
}
