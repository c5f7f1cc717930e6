//! Independent reference implementations used to validate the fast
//! numeric kernels.
//!
//! Everything in this module favors obviousness over speed and shares no
//! code with the kernels it checks: the exponential is a plain truncated
//! Taylor series, eigenvalues come from characteristic-polynomial roots,
//! determinants from cofactor expansion, and modularity from exhaustive
//! partition search. The `selftest` CLI subcommand and the acceptance
//! suite both drive these.

use crate::error::Result;
use crate::numerics::DenseMatrix;

/// Truncated Taylor series for the matrix exponential:
/// `sum_{k=0}^{terms} A^k / k!`. Accurate to well below 1e-10 relative
/// error for 1-norms up to about 10 when `terms` is 100.
pub fn taylor_matrix_exp(a: &DenseMatrix<f64>, terms: usize) -> DenseMatrix<f64> {
    let n = a.rows();
    let mut sum = DenseMatrix::<f64>::identity(n);
    let mut term = DenseMatrix::<f64>::identity(n);
    for k in 1..=terms {
        term = term.matmul(a).expect("square term");
        term.scale_in_place(1.0 / k as f64);
        sum.axpy(1.0, &term).expect("same shape");
    }
    sum
}

/// Determinant by cofactor expansion along the first row. Exponential in
/// the matrix order; intended for n <= 8.
pub fn determinant(a: &DenseMatrix<f64>) -> f64 {
    let n = a.rows();
    assert!(a.is_square() && n > 0, "determinant oracle needs a square matrix");
    if n == 1 {
        return a.get(0, 0);
    }
    if n == 2 {
        return a.get(0, 0) * a.get(1, 1) - a.get(0, 1) * a.get(1, 0);
    }
    let mut det = 0.0;
    for j in 0..n {
        let pivot = a.get(0, j);
        if pivot == 0.0 {
            continue;
        }
        let minor = DenseMatrix::from_fn(n - 1, n - 1, |r, c| {
            a.get(r + 1, if c < j { c } else { c + 1 })
        });
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        det += sign * pivot * determinant(&minor);
    }
    det
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct C64 {
    re: f64,
    im: f64,
}

impl C64 {
    fn new(re: f64, im: f64) -> Self {
        C64 { re, im }
    }

    fn add(self, o: C64) -> C64 {
        C64::new(self.re + o.re, self.im + o.im)
    }

    fn sub(self, o: C64) -> C64 {
        C64::new(self.re - o.re, self.im - o.im)
    }

    fn mul(self, o: C64) -> C64 {
        C64::new(
            self.re * o.re - self.im * o.im,
            self.re * o.im + self.im * o.re,
        )
    }

    fn div(self, o: C64) -> C64 {
        let d = o.re * o.re + o.im * o.im;
        C64::new(
            (self.re * o.re + self.im * o.im) / d,
            (self.im * o.re - self.re * o.im) / d,
        )
    }

    fn scale(self, s: f64) -> C64 {
        C64::new(self.re * s, self.im * s)
    }
}

/// Roots of `x^3 + c2 x^2 + c1 x + c0` by Cardano's method with a few
/// complex Newton polish steps.
fn cubic_roots(c2: f64, c1: f64, c0: f64) -> [C64; 3] {
    // Depressed form t^3 + p t + q with x = t - c2/3.
    let p = c1 - c2 * c2 / 3.0;
    let q = 2.0 * c2 * c2 * c2 / 27.0 - c2 * c1 / 3.0 + c0;
    let shift = -c2 / 3.0;
    let disc = 0.25 * q * q + p * p * p / 27.0;

    let mut roots = if p == 0.0 && q == 0.0 {
        [C64::new(0.0, 0.0); 3]
    } else if disc > 0.0 {
        // One real root, one conjugate pair.
        let sq = disc.sqrt();
        let u = (-0.5 * q + sq).cbrt();
        let v = (-0.5 * q - sq).cbrt();
        let real = u + v;
        let re_pair = -0.5 * real;
        let im_pair = 0.5 * 3.0f64.sqrt() * (u - v);
        [
            C64::new(real, 0.0),
            C64::new(re_pair, im_pair),
            C64::new(re_pair, -im_pair),
        ]
    } else {
        // Three real roots by the trigonometric form (p < 0 here).
        let m = 2.0 * (-p / 3.0).sqrt();
        let arg = (3.0 * q / (p * m)).clamp(-1.0, 1.0);
        let phi = arg.acos() / 3.0;
        let two_thirds_pi = 2.0 * std::f64::consts::PI / 3.0;
        [
            C64::new(m * phi.cos(), 0.0),
            C64::new(m * (phi - two_thirds_pi).cos(), 0.0),
            C64::new(m * (phi - 2.0 * two_thirds_pi).cos(), 0.0),
        ]
    };

    for r in &mut roots {
        let mut z = C64::new(r.re + shift, r.im);
        // Newton refinement on the original cubic.
        for _ in 0..4 {
            let f = z
                .mul(z)
                .mul(z)
                .add(z.mul(z).scale(c2))
                .add(z.scale(c1))
                .add(C64::new(c0, 0.0));
            let df = z.mul(z).scale(3.0).add(z.scale(2.0 * c2)).add(C64::new(c1, 0.0));
            if df.re == 0.0 && df.im == 0.0 {
                break;
            }
            z = z.sub(f.div(df));
        }
        *r = z;
    }
    // A conjugate pair may have drifted apart by independent polishing;
    // re-symmetrize so the multiset is exactly conjugate-closed.
    if roots[1].im != 0.0 || roots[2].im != 0.0 {
        let re = 0.5 * (roots[1].re + roots[2].re);
        let im = 0.5 * (roots[1].im - roots[2].im);
        roots[1] = C64::new(re, im);
        roots[2] = C64::new(re, -im);
    }
    roots
}

/// Eigenvalues of a 3x3 matrix from its characteristic polynomial
/// `lambda^3 - tr lambda^2 + m2 lambda - det`, where `m2` is the sum of
/// principal 2x2 minors. Returned as (re, im) pairs in no particular
/// order.
pub fn charpoly_eigenvalues_3x3(a: &DenseMatrix<f64>) -> [(f64, f64); 3] {
    assert_eq!((a.rows(), a.cols()), (3, 3), "charpoly oracle is 3x3 only");
    let tr = a.get(0, 0) + a.get(1, 1) + a.get(2, 2);
    let m2 = a.get(0, 0) * a.get(1, 1) - a.get(0, 1) * a.get(1, 0)
        + a.get(0, 0) * a.get(2, 2)
        - a.get(0, 2) * a.get(2, 0)
        + a.get(1, 1) * a.get(2, 2)
        - a.get(1, 2) * a.get(2, 1);
    let det = determinant(a);
    let roots = cubic_roots(-tr, m2, -det);
    [
        (roots[0].re, roots[0].im),
        (roots[1].re, roots[1].im),
        (roots[2].re, roots[2].im),
    ]
}

/// Greedy minimum-distance matching between two equal-size eigenvalue
/// multisets; returns the largest matched distance. Small sets only (the
/// assignment is brute-forced over permutations).
pub fn spectrum_match_distance(got: &[(f64, f64)], want: &[(f64, f64)]) -> f64 {
    assert_eq!(got.len(), want.len());
    let n = got.len();
    assert!(n <= 4, "permutation matching is factorial");
    let dist = |a: (f64, f64), b: (f64, f64)| ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best = f64::INFINITY;
    permute(&mut perm, 0, &mut |p: &[usize]| {
        let worst = (0..n)
            .map(|i| dist(got[i], want[p[i]]))
            .fold(0.0f64, f64::max);
        if worst < best {
            best = worst;
        }
    });
    best
}

fn permute(items: &mut Vec<usize>, k: usize, visit: &mut impl FnMut(&[usize])) {
    if k == items.len() {
        visit(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permute(items, k + 1, visit);
        items.swap(k, i);
    }
}

/// Directed modularity of a fixed partition, computed from first
/// principles on `|W|` with the diagonal removed:
/// `Q = (1/m) sum_ij [A_ij - r k_out_i k_in_j / m] delta(c_i, c_j)`.
pub fn partition_modularity(w: &DenseMatrix<f64>, communities: &[usize], resolution: f64) -> f64 {
    let n = w.rows();
    assert!(w.is_square() && communities.len() == n);
    let a = DenseMatrix::from_fn(n, n, |i, j| if i == j { 0.0 } else { w.get(i, j).abs() });
    let k_out = a.row_sums();
    let k_in = a.col_sums();
    let m: f64 = k_out.iter().sum();
    assert!(m > 0.0, "modularity oracle needs edges");
    let mut q = 0.0;
    for i in 0..n {
        for j in 0..n {
            if communities[i] == communities[j] {
                q += a.get(i, j) - resolution * k_out[i] * k_in[j] / m;
            }
        }
    }
    q / m
}

/// All set partitions of `{0..n-1}` as restricted-growth strings.
pub fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    assert!(n > 0 && n <= 10, "partition enumeration explodes past n = 10");
    let mut out = Vec::new();
    let mut current = vec![0usize; n];
    fn rec(current: &mut Vec<usize>, pos: usize, max_used: usize, out: &mut Vec<Vec<usize>>) {
        if pos == current.len() {
            out.push(current.clone());
            return;
        }
        for label in 0..=max_used + 1 {
            current[pos] = label;
            rec(current, pos + 1, max_used.max(label), out);
        }
    }
    if n == 1 {
        return vec![vec![0]];
    }
    current[0] = 0;
    rec(&mut current, 1, 0, &mut out);
    out
}

/// Exhaustive-search modularity maximum over every partition (n <= 8).
pub fn brute_force_modularity(w: &DenseMatrix<f64>, resolution: f64) -> (f64, Vec<usize>) {
    let n = w.rows();
    assert!(n <= 8, "brute force limited to 8 nodes");
    let mut best_q = f64::NEG_INFINITY;
    let mut best_partition = vec![0; n];
    for partition in set_partitions(n) {
        let q = partition_modularity(w, &partition, resolution);
        if q > best_q {
            best_q = q;
            best_partition = partition;
        }
    }
    (best_q, best_partition)
}

/// Central finite-difference gradient of a scalar function.
pub fn finite_difference_gradient(
    mut f: impl FnMut(&[f64]) -> f64,
    x: &[f64],
    step: f64,
) -> Vec<f64> {
    let mut grad = Vec::with_capacity(x.len());
    let mut probe = x.to_vec();
    for i in 0..x.len() {
        let saved = probe[i];
        probe[i] = saved + step;
        let hi = f(&probe);
        probe[i] = saved - step;
        let lo = f(&probe);
        probe[i] = saved;
        grad.push((hi - lo) / (2.0 * step));
    }
    grad
}

/// Largest relative deviation between an analytic gradient and its finite
/// difference counterpart. The floor keeps near-zero entries from
/// manufacturing huge ratios out of roundoff.
pub fn max_relative_gradient_error(analytic: &[f64], numeric: &[f64], floor: f64) -> Result<f64> {
    assert_eq!(analytic.len(), numeric.len());
    let mut worst = 0.0f64;
    for (&a, &n) in analytic.iter().zip(numeric) {
        let denom = a.abs().max(n.abs()).max(floor);
        worst = worst.max((a - n).abs() / denom);
    }
    Ok(worst)
}
