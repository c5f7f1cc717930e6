use super::rng::RandomSource;
use super::{lit, Real};
use crate::error::{Error, Result};

/// Permutation count behind every reported correlation p-value. With the
/// add-one rule below, the smallest reportable p is about 1e-4.
const PERMUTATIONS: usize = 10_000;

/// Fixed seed of the permutation stream. Baking it in keeps analysis
/// output a pure function of the data.
const PERMUTATION_SEED: u64 = 0x7065_7261_6d75_7465;

pub fn mean<T: Real>(xs: &[T]) -> T {
    let mut s = T::zero();
    for &x in xs {
        s += x;
    }
    s / lit(xs.len() as f64)
}

/// Median (average of the two central order statistics for even lengths).
pub fn median<T: Real>(xs: &[T]) -> Result<T> {
    if xs.is_empty() {
        return Err(Error::EmptyInput("median"));
    }
    let mut v = xs.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
    let n = v.len();
    Ok(if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / lit(2.0)
    })
}

/// Standard error of the mean (sample standard deviation over sqrt n).
/// Undefined for fewer than two observations.
pub fn standard_error<T: Real>(xs: &[T]) -> Option<T> {
    let n = xs.len();
    if n < 2 {
        return None;
    }
    let m = mean(xs);
    let mut ss = T::zero();
    for &x in xs {
        let d = x - m;
        ss += d * d;
    }
    let var = ss / lit((n - 1) as f64);
    Some((var / lit(n as f64)).sqrt())
}

fn centered_moments<T: Real>(x: &[T], y: &[T]) -> Result<(Vec<T>, Vec<T>, T, T)> {
    if x.len() != y.len() {
        return Err(Error::DimMismatch(format!(
            "correlation inputs of length {} and {}",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 3 {
        return Err(Error::EmptyInput("correlation needs at least 3 points"));
    }
    if x.iter().chain(y.iter()).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("correlation input"));
    }
    let (mx, my) = (mean(x), mean(y));
    let cx: Vec<T> = x.iter().map(|&v| v - mx).collect();
    let cy: Vec<T> = y.iter().map(|&v| v - my).collect();
    let mut sx = T::zero();
    let mut sy = T::zero();
    for &v in &cx {
        sx += v * v;
    }
    for &v in &cy {
        sy += v * v;
    }
    if sx == T::zero() || sy == T::zero() {
        return Err(Error::DegenerateVariance("correlation"));
    }
    Ok((cx, cy, sx, sy))
}

/// Pearson correlation coefficient.
pub fn pearson_r<T: Real>(x: &[T], y: &[T]) -> Result<T> {
    let (cx, cy, sx, sy) = centered_moments(x, y)?;
    let mut cross = T::zero();
    for (&a, &b) in cx.iter().zip(&cy) {
        cross += a * b;
    }
    Ok(cross / (sx * sy).sqrt())
}

/// Pearson correlation with a one-sided permutation-test p-value.
///
/// The observed direction sets the side: 10,000 shuffles of `x` against
/// `y` are scored on how often the permuted r is at least as extreme in
/// that direction, and p = (hits + 1) / (shuffles + 1). The shuffle
/// stream is internally seeded, so the result depends only on the data.
pub fn pearson<T: Real>(x: &[T], y: &[T]) -> Result<(T, T)> {
    let (cx, cy, sx, sy) = centered_moments(x, y)?;
    let denom = (sx * sy).sqrt();
    let mut cross = T::zero();
    for (&a, &b) in cx.iter().zip(&cy) {
        cross += a * b;
    }
    let r = cross / denom;

    // Only the cross term varies under permutation, so compare raw cross
    // products instead of recomputing r each time.
    let mut rng = RandomSource::new(PERMUTATION_SEED);
    let mut perm: Vec<u32> = (0..cx.len() as u32).collect();
    let positive = r >= T::zero();
    let mut hits = 0usize;
    for _ in 0..PERMUTATIONS {
        rng.shuffle(&mut perm);
        let mut c = T::zero();
        for (&pi, &b) in perm.iter().zip(&cy) {
            c += cx[pi as usize] * b;
        }
        if (positive && c >= cross) || (!positive && c <= cross) {
            hits += 1;
        }
    }
    let p = lit::<T>((hits + 1) as f64 / (PERMUTATIONS + 1) as f64);
    Ok((r, p))
}

/// Midranks of a sample (ties share the average of their rank block).
fn midranks<T: Real>(values: &[T]) -> Vec<T> {
    let n = values.len();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("finite values"));
    let mut ranks = vec![T::zero(); n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && values[idx[j + 1]] == values[idx[i]] {
            j += 1;
        }
        // Ranks are 1-based; the block i..=j shares the average rank.
        let avg = lit::<T>((i + j + 2) as f64 / 2.0);
        for k in i..=j {
            ranks[idx[k]] = avg;
        }
        i = j + 1;
    }
    ranks
}

/// Mann-Whitney U test.
///
/// Returns `(U_a, p)` where `U_a` counts pairs won by `a` (ties at half
/// weight) and `p` is the one-sided normal-approximation probability, tie
/// corrected and continuity corrected, for the alternative that `a` runs
/// *smaller* than `b`. Callers testing the opposite direction swap the
/// arguments.
pub fn mann_whitney<T: Real>(a: &[T], b: &[T]) -> Result<(T, T)> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyInput("mann_whitney"));
    }
    if a.iter().chain(b.iter()).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("mann_whitney input"));
    }
    let na = a.len();
    let nb = b.len();
    let mut combined: Vec<T> = Vec::with_capacity(na + nb);
    combined.extend_from_slice(a);
    combined.extend_from_slice(b);
    let ranks = midranks(&combined);
    let mut ra = T::zero();
    for &r in &ranks[..na] {
        ra += r;
    }
    let u_a = ra - lit::<T>((na * (na + 1)) as f64 / 2.0);

    let n = na + nb;
    let mu = lit::<T>((na * nb) as f64 / 2.0);
    // Tie correction over rank blocks of the combined sample.
    let mut sorted = combined.clone();
    sorted.sort_by(|x, y| x.partial_cmp(y).expect("finite values"));
    let mut tie_term = 0.0f64;
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && sorted[j + 1] == sorted[i] {
            j += 1;
        }
        let t = (j - i + 1) as f64;
        tie_term += t * t * t - t;
        i = j + 1;
    }
    let nf = n as f64;
    let var = (na * nb) as f64 / 12.0 * ((nf + 1.0) - tie_term / (nf * (nf - 1.0)));
    if var <= 0.0 {
        // Every observation tied: no evidence either way.
        return Ok((u_a, lit(0.5)));
    }
    let sigma = lit::<T>(var.sqrt());
    let half = lit::<T>(0.5);
    let cc = if u_a < mu {
        half
    } else if u_a > mu {
        -half
    } else {
        T::zero()
    };
    let z = (u_a - mu + cc) / sigma;
    let p = normal_cdf(z.to_f64().expect("z fits in f64"));
    Ok((u_a, lit(p)))
}

/// Spearman rank correlation (midranks, then Pearson on the ranks).
pub fn spearman_rho<T: Real>(x: &[T], y: &[T]) -> Result<T> {
    let rx = midranks(x);
    let ry = midranks(y);
    pearson_r(&rx, &ry)
}

/// Standard normal CDF via the Abramowitz-Stegun 7.1.26 erf polynomial
/// (absolute error below 1.5e-7, ample for threshold tests).
pub fn normal_cdf(z: f64) -> f64 {
    if z == 0.0 {
        // The polynomial coefficients sum to 1 - 1e-9, so pin the midpoint.
        return 0.5;
    }
    let x = z / std::f64::consts::SQRT_2;
    let (sign, x) = if x < 0.0 { (-1.0, -x) } else { (1.0, x) };
    let t = 1.0 / (1.0 + 0.3275911 * x);
    let poly = t
        * (0.254829592 + t * (-0.284496736 + t * (1.421413741 + t * (-1.453152027 + t * 1.061405429))));
    let erf = 1.0 - poly * (-x * x).exp();
    0.5 * (1.0 + sign * erf)
}
