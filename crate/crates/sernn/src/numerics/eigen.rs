use super::matrix::DenseMatrix;
use super::{lit, Real};
use crate::error::{Error, Result};

/// Eigenvalue multiset of a real square matrix, kept as parallel real and
/// imaginary parts.
///
/// Entries are sorted by ascending real part, then ascending absolute
/// imaginary part, then ascending imaginary part, which keeps conjugate
/// pairs adjacent (negative-imaginary member first) and makes the order a
/// pure function of the values.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexSpectrum<T> {
    re: Vec<T>,
    im: Vec<T>,
}

impl<T: Real> ComplexSpectrum<T> {
    pub fn from_parts(re: Vec<T>, im: Vec<T>) -> Self {
        assert_eq!(re.len(), im.len(), "mismatched spectrum parts");
        let mut s = ComplexSpectrum { re, im };
        s.sort_canonical();
        s
    }

    fn sort_canonical(&mut self) {
        let mut idx: Vec<usize> = (0..self.re.len()).collect();
        idx.sort_by(|&a, &b| {
            let key = |i: usize| (self.re[i], self.im[i].abs(), self.im[i]);
            key(a).partial_cmp(&key(b)).expect("finite eigenvalues")
        });
        self.re = idx.iter().map(|&i| self.re[i]).collect();
        self.im = idx.iter().map(|&i| self.im[i]).collect();
    }

    pub fn len(&self) -> usize {
        self.re.len()
    }

    pub fn is_empty(&self) -> bool {
        self.re.is_empty()
    }

    pub fn re(&self) -> &[T] {
        &self.re
    }

    pub fn im(&self) -> &[T] {
        &self.im
    }

    pub fn iter(&self) -> impl Iterator<Item = (T, T)> + '_ {
        self.re.iter().copied().zip(self.im.iter().copied())
    }

    pub fn modulus(&self, i: usize) -> T {
        self.re[i].hypot(self.im[i])
    }

    pub fn moduli(&self) -> Vec<T> {
        (0..self.len()).map(|i| self.modulus(i)).collect()
    }

    /// Largest eigenvalue modulus; zero for an empty spectrum.
    pub fn spectral_radius(&self) -> T {
        let mut best = T::zero();
        for i in 0..self.len() {
            let m = self.modulus(i);
            if m > best {
                best = m;
            }
        }
        best
    }
}

#[inline]
fn sign_of<T: Real>(a: T, b: T) -> T {
    if b >= T::zero() {
        a.abs()
    } else {
        -a.abs()
    }
}

/// Eigenvalues of a real square matrix.
///
/// Pipeline: diagonal balancing, reduction to upper Hessenberg form by
/// stabilized elementary similarity transforms, then the Francis
/// double-shift QR iteration (eigenvalues only). The iteration gets a
/// total budget of `100 * n` sweeps and fails loudly if it ever runs out;
/// in practice a handful of sweeps per eigenvalue suffices.
pub fn eigenvalues<T: Real>(m: &DenseMatrix<T>) -> Result<ComplexSpectrum<T>> {
    let n = m.require_square()?;
    if n == 0 {
        return Err(Error::EmptyInput("eigenvalues"));
    }
    m.require_finite("eigenvalues input")?;
    let mut a = m.clone();
    balance(&mut a);
    hessenberg(&mut a);
    let (re, im) = hqr(&mut a, 100 * n)?;
    Ok(ComplexSpectrum::from_parts(re, im))
}

/// Iterative row/column scaling by powers of two so row and column norms
/// meet; a similarity transform, so the spectrum is untouched while the
/// QR iteration gets better-conditioned input.
fn balance<T: Real>(a: &mut DenseMatrix<T>) {
    let n = a.rows();
    let radix = lit::<T>(2.0);
    let sqrdx = radix * radix;
    let point95 = lit::<T>(0.95);
    loop {
        let mut done = true;
        for i in 0..n {
            let mut r = T::zero();
            let mut c = T::zero();
            for j in 0..n {
                if j != i {
                    c += a.get(j, i).abs();
                    r += a.get(i, j).abs();
                }
            }
            if c != T::zero() && r != T::zero() {
                let mut g = r / radix;
                let mut f = T::one();
                let s = c + r;
                let mut c_scaled = c;
                while c_scaled < g {
                    f *= radix;
                    c_scaled *= sqrdx;
                }
                g = r * radix;
                while c_scaled > g {
                    f /= radix;
                    c_scaled /= sqrdx;
                }
                if (c_scaled + r) / f < point95 * s {
                    done = false;
                    let ginv = T::one() / f;
                    for j in 0..n {
                        let v = a.get(i, j) * ginv;
                        a.set(i, j, v);
                    }
                    for j in 0..n {
                        let v = a.get(j, i) * f;
                        a.set(j, i, v);
                    }
                }
            }
        }
        if done {
            break;
        }
    }
}

/// Reduction to upper Hessenberg form by pivoted elementary similarity
/// transforms. Entries below the first subdiagonal become workspace junk
/// conceptually; they are zeroed here so downstream code can treat the
/// matrix as genuinely Hessenberg.
fn hessenberg<T: Real>(a: &mut DenseMatrix<T>) {
    let n = a.rows();
    for m in 1..n.saturating_sub(1) {
        let mut x = T::zero();
        let mut pivot = m;
        for i in m..n {
            if a.get(i, m - 1).abs() > x.abs() {
                x = a.get(i, m - 1);
                pivot = i;
            }
        }
        if pivot != m {
            for j in m - 1..n {
                let tmp = a.get(pivot, j);
                a.set(pivot, j, a.get(m, j));
                a.set(m, j, tmp);
            }
            for i in 0..n {
                let tmp = a.get(i, pivot);
                a.set(i, pivot, a.get(i, m));
                a.set(i, m, tmp);
            }
        }
        if x != T::zero() {
            for i in m + 1..n {
                let mut y = a.get(i, m - 1);
                if y != T::zero() {
                    y /= x;
                    a.set(i, m - 1, y);
                    for j in m..n {
                        let v = a.get(i, j) - y * a.get(m, j);
                        a.set(i, j, v);
                    }
                    for j in 0..n {
                        let v = a.get(j, m) + y * a.get(j, i);
                        a.set(j, m, v);
                    }
                }
            }
        }
    }
    for i in 2..n {
        for j in 0..i - 1 {
            a.set(i, j, T::zero());
        }
    }
}

/// Francis double-shift QR on an upper Hessenberg matrix; returns the
/// eigenvalues as (real, imaginary) vectors. `budget` caps the total
/// number of QR sweeps across all deflations.
#[allow(clippy::many_single_char_names)]
fn hqr<T: Real>(mat: &mut DenseMatrix<T>, budget: usize) -> Result<(Vec<T>, Vec<T>)> {
    let n = mat.rows();
    let mut wr = vec![T::zero(); n];
    let mut wi = vec![T::zero(); n];

    let mut anorm = T::zero();
    for i in 0..n {
        for j in i.saturating_sub(1)..n {
            anorm += mat.get(i, j).abs();
        }
    }
    if anorm == T::zero() {
        // The zero matrix never deflates through the small-subdiagonal
        // test below; its spectrum is all zeros anyway.
        return Ok((wr, wi));
    }

    let a = |m: &DenseMatrix<T>, i: isize, j: isize| m.get(i as usize, j as usize);
    let quarter = lit::<T>(0.75);
    let half = lit::<T>(0.5);

    let mut sweeps = 0usize;
    let mut nn: isize = n as isize - 1;
    let mut t = T::zero();
    while nn >= 0 {
        let mut its = 0usize;
        loop {
            // Look for a single small subdiagonal element to split at.
            let mut l = 0isize;
            let mut ll = nn;
            while ll >= 1 {
                let mut s = a(mat, ll - 1, ll - 1).abs() + a(mat, ll, ll).abs();
                if s == T::zero() {
                    s = anorm;
                }
                if a(mat, ll, ll - 1).abs() + s == s {
                    l = ll;
                    break;
                }
                ll -= 1;
            }
            let mut x = a(mat, nn, nn);
            if l == nn {
                // One real eigenvalue peeled off.
                wr[nn as usize] = x + t;
                wi[nn as usize] = T::zero();
                nn -= 1;
                break;
            }
            let y = a(mat, nn - 1, nn - 1);
            let mut w = a(mat, nn, nn - 1) * a(mat, nn - 1, nn);
            if l == nn - 1 {
                // Terminal 2x2 block: real pair or conjugate pair.
                let p = half * (y - x);
                let q = p * p + w;
                let mut z = q.abs().sqrt();
                x += t;
                if q >= T::zero() {
                    z = p + sign_of(z, p);
                    let lead = x + z;
                    wr[(nn - 1) as usize] = lead;
                    wr[nn as usize] = if z != T::zero() { x - w / z } else { lead };
                    wi[(nn - 1) as usize] = T::zero();
                    wi[nn as usize] = T::zero();
                } else {
                    wr[(nn - 1) as usize] = x + p;
                    wr[nn as usize] = x + p;
                    wi[nn as usize] = z;
                    wi[(nn - 1) as usize] = -z;
                }
                nn -= 2;
                break;
            }

            sweeps += 1;
            if sweeps > budget {
                return Err(Error::EigenNoConvergence { sweeps });
            }
            let mut p;
            let mut q;
            let mut r;
            if its > 0 && its % 10 == 0 {
                // Exceptional shift to break symmetric stalls.
                t += x;
                for i in 0..=nn {
                    let v = a(mat, i, i) - x;
                    mat.set(i as usize, i as usize, v);
                }
                let s = a(mat, nn, nn - 1).abs() + a(mat, nn - 1, nn - 2).abs();
                x = quarter * s;
                let y2 = x;
                w = lit::<T>(-0.4375) * s * s;
                // y is only read below through p/q/r seeds; fold in here.
                let z = a(mat, nn - 2, nn - 2);
                let mut m = nn - 2;
                let (pp, qq, rr) = seed_shift(mat, m, x, y2, w, z);
                p = pp;
                q = qq;
                r = rr;
                while m > l {
                    if shift_converged(mat, m, p, q, r) {
                        break;
                    }
                    m -= 1;
                    let z = a(mat, m, m);
                    let (pp, qq, rr) = seed_shift(mat, m, x, y2, w, z);
                    p = pp;
                    q = qq;
                    r = rr;
                }
                its += 1;
                francis_sweep(mat, l, m, nn, p, q, r);
                continue;
            }
            its += 1;
            let mut m = nn - 2;
            let z = a(mat, m, m);
            let (pp, qq, rr) = seed_shift(mat, m, x, y, w, z);
            p = pp;
            q = qq;
            r = rr;
            while m > l {
                if shift_converged(mat, m, p, q, r) {
                    break;
                }
                m -= 1;
                let z = a(mat, m, m);
                let (pp, qq, rr) = seed_shift(mat, m, x, y, w, z);
                p = pp;
                q = qq;
                r = rr;
            }
            francis_sweep(mat, l, m, nn, p, q, r);
        }
    }
    Ok((wr, wi))
}

/// First column of (H - s1)(H - s2) at row `m`, normalized; the implicit
/// double-shift seed.
#[inline]
fn seed_shift<T: Real>(
    mat: &DenseMatrix<T>,
    m: isize,
    x: T,
    y: T,
    w: T,
    z: T,
) -> (T, T, T) {
    let (mu, wu) = (m as usize, (m + 1) as usize);
    let r = x - z;
    let s = y - z;
    let mut p = (r * s - w) / mat.get(wu, mu) + mat.get(mu, wu);
    let mut q = mat.get(wu, wu) - z - r - s;
    let mut rr = mat.get((m + 2) as usize, wu);
    let scale = p.abs() + q.abs() + rr.abs();
    if scale != T::zero() {
        p /= scale;
        q /= scale;
        rr /= scale;
    }
    (p, q, rr)
}

/// Lookahead test: two consecutive small subdiagonals let the sweep start
/// at row `m` instead of running all the way down to `l`.
#[inline]
fn shift_converged<T: Real>(mat: &DenseMatrix<T>, m: isize, p: T, q: T, r: T) -> bool {
    let mu = m as usize;
    let u = mat.get(mu, mu - 1).abs() * (q.abs() + r.abs());
    let v = p.abs()
        * (mat.get(mu - 1, mu - 1).abs() + mat.get(mu, mu).abs() + mat.get(mu + 1, mu + 1).abs());
    u + v == v
}

/// One implicit double-shift QR sweep over rows `m..=nn`, restoring the
/// Hessenberg profile behind the rotating 3x3 bulge.
#[allow(clippy::many_single_char_names)]
fn francis_sweep<T: Real>(
    mat: &mut DenseMatrix<T>,
    l: isize,
    m: isize,
    nn: isize,
    p0: T,
    q0: T,
    r0: T,
) {
    for i in m + 2..=nn {
        mat.set(i as usize, (i - 2) as usize, T::zero());
        if i != m + 2 {
            mat.set(i as usize, (i - 3) as usize, T::zero());
        }
    }
    let mut p = p0;
    let mut q = q0;
    let mut r = r0;
    for k in m..nn {
        if k != m {
            p = mat.get(k as usize, (k - 1) as usize);
            q = mat.get((k + 1) as usize, (k - 1) as usize);
            r = if k != nn - 1 {
                mat.get((k + 2) as usize, (k - 1) as usize)
            } else {
                T::zero()
            };
        }
        let x = p.abs() + q.abs() + r.abs();
        if k != m && x != T::zero() {
            p /= x;
            q /= x;
            r /= x;
        }
        let s = sign_of((p * p + q * q + r * r).sqrt(), p);
        if s == T::zero() {
            continue;
        }
        if k == m {
            if l != m {
                let v = -mat.get(k as usize, (k - 1) as usize);
                mat.set(k as usize, (k - 1) as usize, v);
            }
        } else {
            mat.set(k as usize, (k - 1) as usize, -s * x);
        }
        p += s;
        let x = p / s;
        let y = q / s;
        let z = r / s;
        q /= p;
        r /= p;
        for j in k..=nn {
            let (ku, ju) = (k as usize, j as usize);
            let mut pp = mat.get(ku, ju) + q * mat.get(ku + 1, ju);
            if k != nn - 1 {
                pp += r * mat.get(ku + 2, ju);
                let v = mat.get(ku + 2, ju) - pp * z;
                mat.set(ku + 2, ju, v);
            }
            let v = mat.get(ku + 1, ju) - pp * y;
            mat.set(ku + 1, ju, v);
            let v = mat.get(ku, ju) - pp * x;
            mat.set(ku, ju, v);
        }
        let mmin = if nn < k + 3 { nn } else { k + 3 };
        for i in l..=mmin {
            let (iu, ku) = (i as usize, k as usize);
            let mut pp = x * mat.get(iu, ku) + y * mat.get(iu, ku + 1);
            if k != nn - 1 {
                pp += z * mat.get(iu, ku + 2);
                let v = mat.get(iu, ku + 2) - pp * r;
                mat.set(iu, ku + 2, v);
            }
            let v = mat.get(iu, ku + 1) - pp * q;
            mat.set(iu, ku + 1, v);
            let v = mat.get(iu, ku) - pp;
            mat.set(iu, ku, v);
        }
    }
}

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues in descending order and the matching eigenvectors
/// as columns. Deterministic: fixed sweep order, rotation applied whenever
/// the off-diagonal entry is nonzero above the sweep threshold.
pub fn symmetric_eigen<T: Real>(m: &DenseMatrix<T>) -> Result<(Vec<T>, DenseMatrix<T>)> {
    let n = m.require_square()?;
    if n == 0 {
        return Err(Error::EmptyInput("symmetric_eigen"));
    }
    m.require_finite("symmetric_eigen input")?;
    let mut a = m.clone();
    let mut v = DenseMatrix::<T>::identity(n);
    let fro = a.frobenius_norm();
    if fro == T::zero() {
        return Ok((vec![T::zero(); n], v));
    }
    let tol = fro * T::epsilon();
    let max_sweeps = 100;
    for sweep in 0..max_sweeps {
        let mut off = T::zero();
        for i in 0..n {
            for j in i + 1..n {
                off += a.get(i, j) * a.get(i, j);
            }
        }
        if off.sqrt() <= tol {
            break;
        }
        if sweep == max_sweeps - 1 {
            return Err(Error::EigenNoConvergence { sweeps: max_sweeps });
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let g = a.get(p, q);
                if g.abs() <= tol * T::epsilon() {
                    continue;
                }
                let app = a.get(p, p);
                let aqq = a.get(q, q);
                let theta = (aqq - app) / (lit::<T>(2.0) * g);
                let t_rot = if theta.abs() > lit::<T>(1e150) {
                    (lit::<T>(2.0) * theta).recip()
                } else {
                    let s = if theta >= T::zero() { T::one() } else { -T::one() };
                    s / (theta.abs() + (theta * theta + T::one()).sqrt())
                };
                let c = (t_rot * t_rot + T::one()).sqrt().recip();
                let s = t_rot * c;
                let tau = s / (T::one() + c);
                a.set(p, p, app - t_rot * g);
                a.set(q, q, aqq + t_rot * g);
                a.set(p, q, T::zero());
                a.set(q, p, T::zero());
                for r in 0..n {
                    if r != p && r != q {
                        let arp = a.get(r, p);
                        let arq = a.get(r, q);
                        let new_p = arp - s * (arq + tau * arp);
                        let new_q = arq + s * (arp - tau * arq);
                        a.set(r, p, new_p);
                        a.set(p, r, new_p);
                        a.set(r, q, new_q);
                        a.set(q, r, new_q);
                    }
                }
                for r in 0..n {
                    let vrp = v.get(r, p);
                    let vrq = v.get(r, q);
                    v.set(r, p, vrp - s * (vrq + tau * vrp));
                    v.set(r, q, vrq + s * (vrp - tau * vrq));
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        a.get(j, j)
            .partial_cmp(&a.get(i, i))
            .expect("finite eigenvalues")
            .then(i.cmp(&j))
    });
    let values = order.iter().map(|&i| a.get(i, i)).collect();
    let mut vectors = DenseMatrix::<T>::zeros(n, n);
    for (new_col, &old_col) in order.iter().enumerate() {
        for r in 0..n {
            vectors.set(r, new_col, v.get(r, old_col));
        }
    }
    Ok((values, vectors))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::RandomSource;

    fn assert_spectrum_close(spec: &ComplexSpectrum<f64>, expected: &[(f64, f64)], tol: f64) {
        assert_eq!(spec.len(), expected.len());
        let mut exp = ComplexSpectrum::from_parts(
            expected.iter().map(|e| e.0).collect(),
            expected.iter().map(|e| e.1).collect(),
        );
        // Pair canonically-sorted entries; identical multisets line up.
        for i in 0..spec.len() {
            assert!(
                (spec.re()[i] - exp.re[i]).abs() < tol && (spec.im()[i] - exp.im[i]).abs() < tol,
                "eigenvalue {i}: got ({}, {}), want ({}, {})",
                spec.re()[i],
                spec.im()[i],
                exp.re[i],
                exp.im[i]
            );
        }
        exp.sort_canonical();
    }

    #[test]
    fn diagonal_matrix_spectrum() {
        let d = DenseMatrix::from_rows(&[
            vec![3.0, 0.0, 0.0],
            vec![0.0, -1.0, 0.0],
            vec![0.0, 0.0, 0.5],
        ])
        .unwrap();
        let s = eigenvalues(&d).unwrap();
        assert_spectrum_close(&s, &[(3.0, 0.0), (-1.0, 0.0), (0.5, 0.0)], 1e-12);
    }

    #[test]
    fn rotation_block_gives_conjugate_pair() {
        let r = DenseMatrix::from_rows(&[vec![0.0, 1.0], vec![-1.0, 0.0]]).unwrap();
        let s = eigenvalues(&r).unwrap();
        assert_spectrum_close(&s, &[(0.0, 1.0), (0.0, -1.0)], 1e-12);
        assert!((s.spectral_radius() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn companion_matrix_of_cubic() {
        // lambda^3 - 6 lambda^2 + 11 lambda - 6 = (l-1)(l-2)(l-3).
        let c = DenseMatrix::from_rows(&[
            vec![6.0, -11.0, 6.0],
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
        ])
        .unwrap();
        let s = eigenvalues(&c).unwrap();
        assert_spectrum_close(&s, &[(1.0, 0.0), (2.0, 0.0), (3.0, 0.0)], 1e-9);
    }

    #[test]
    fn one_by_one_matrix() {
        let m = DenseMatrix::from_rows(&[vec![4.25f64]]).unwrap();
        let s = eigenvalues(&m).unwrap();
        assert_eq!(s.len(), 1);
        assert!((s.re()[0] - 4.25).abs() < 1e-15);
    }

    #[test]
    fn zero_matrix_spectrum_is_zero() {
        let s = eigenvalues(&DenseMatrix::<f64>::zeros(5, 5)).unwrap();
        assert!(s.re().iter().all(|&x| x == 0.0));
        assert!(s.im().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn trace_and_determinant_invariants() {
        let mut rng = RandomSource::new(17);
        for _ in 0..20 {
            let a = DenseMatrix::from_fn(5, 5, |_, _| rng.next_normal::<f64>());
            let s = eigenvalues(&a).unwrap();
            let trace: f64 = s.re().iter().sum();
            assert!(
                (trace - a.trace().unwrap()).abs() < 1e-8 * 5.0,
                "trace mismatch"
            );
            // Product of eigenvalues as a complex product; imaginary part
            // must cancel and the real part must match the determinant.
            let (mut pr, mut pi) = (1.0f64, 0.0f64);
            for (re, im) in s.iter() {
                let (nr, ni) = (pr * re - pi * im, pr * im + pi * re);
                pr = nr;
                pi = ni;
            }
            let det = crate::oracles::determinant(&a);
            assert!(pi.abs() < 1e-7, "imaginary residue in eigenvalue product");
            assert!(
                (pr - det).abs() < 1e-7 * det.abs().max(1.0),
                "det {det} vs product {pr}"
            );
        }
    }

    #[test]
    fn conjugate_pairs_cancel_exactly() {
        let mut rng = RandomSource::new(23);
        for _ in 0..10 {
            let a = DenseMatrix::from_fn(7, 7, |_, _| rng.next_normal::<f64>());
            let s = eigenvalues(&a).unwrap();
            let im_sum: f64 = s.im().iter().sum();
            assert_eq!(im_sum, 0.0, "conjugate pairs must cancel exactly");
        }
    }

    #[test]
    fn symmetric_matrix_has_real_spectrum() {
        let mut rng = RandomSource::new(29);
        let raw = DenseMatrix::from_fn(20, 20, |_, _| rng.next_normal::<f64>());
        let sym = raw.add(&raw.transpose()).unwrap().scale(0.5);
        let s = eigenvalues(&sym).unwrap();
        let max_im = s.im().iter().fold(0.0f64, |m, &x| m.max(x.abs()));
        assert!(max_im <= 1e-8, "max imaginary part {max_im}");
    }

    #[test]
    fn jacobi_matches_hqr_on_symmetric_input() {
        let mut rng = RandomSource::new(31);
        let raw = DenseMatrix::from_fn(8, 8, |_, _| rng.next_normal::<f64>());
        let sym = raw.add(&raw.transpose()).unwrap().scale(0.5);
        let (vals, vecs) = symmetric_eigen(&sym).unwrap();
        // Residuals A v = lambda v.
        for k in 0..8 {
            for i in 0..8 {
                let mut av = 0.0;
                for j in 0..8 {
                    av += sym.get(i, j) * vecs.get(j, k);
                }
                assert!((av - vals[k] * vecs.get(i, k)).abs() < 1e-10);
            }
        }
        // Same multiset as the general solver.
        let mut hqr_vals: Vec<f64> = eigenvalues(&sym).unwrap().re().to_vec();
        hqr_vals.sort_by(|a, b| b.partial_cmp(a).unwrap());
        for (a, b) in vals.iter().zip(&hqr_vals) {
            assert!((a - b).abs() < 1e-9, "jacobi {a} vs hqr {b}");
        }
        // Descending order.
        for w in vals.windows(2) {
            assert!(w[0] >= w[1]);
        }
    }

    #[test]
    fn rejects_non_square_and_non_finite() {
        let rect = DenseMatrix::<f64>::zeros(2, 3);
        assert!(matches!(
            eigenvalues(&rect),
            Err(Error::NotSquare { .. })
        ));
        let mut bad = DenseMatrix::<f64>::zeros(2, 2);
        bad.set(0, 1, f64::INFINITY);
        assert!(matches!(eigenvalues(&bad), Err(Error::NonFinite(_))));
    }

    #[test]
    fn spectrum_ordering_is_canonical() {
        let s = ComplexSpectrum::from_parts(vec![1.0, -1.0, 1.0, 1.0], vec![2.0, 0.0, -2.0, 0.0]);
        assert_eq!(s.re(), &[-1.0, 1.0, 1.0, 1.0]);
        assert_eq!(s.im(), &[0.0, 0.0, -2.0, 2.0]);
    }
}
