//! Dense symmetric eigensolver, a pivoting linear solver and QR least squares.
//!
//! Matrices are row-major `n × n` slices. The eigensolver reduces to
//! tridiagonal form with Householder reflections and then runs implicit QL
//! with Wilkinson-style shifts.

use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

/// Eigen-decomposition of a real symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymmetricEigen<T> {
    /// Eigenvalues in ascending order.
    pub values: Vec<T>,
    /// Column `j` (entries `vectors[i * n + j]`) is the normalised eigenvector
    /// of `values[j]`; present only when requested.
    pub vectors: Option<Vec<T>>,
    pub n: usize,
}

impl<T: Real> SymmetricEigen<T> {
    pub fn vector(&self, j: usize) -> Option<Vec<T>> {
        let n = self.n;
        self.vectors.as_ref().map(|z| (0..n).map(|i| z[i * n + j]).collect())
    }
}

/// Diagonalises the symmetric matrix `a` (only the lower triangle is read; it is
/// overwritten as workspace).
pub fn symmetric_eigen<T: Real>(a: &mut [T], n: usize, want_vectors: bool) -> Result<SymmetricEigen<T>> {
    assert_eq!(a.len(), n * n, "matrix storage does not match dimension");
    if n == 0 {
        return Ok(SymmetricEigen {
            values: vec![],
            vectors: want_vectors.then(Vec::new),
            n,
        });
    }
    let (mut d, mut e, mut z) = tridiagonalize(a, n, want_vectors);
    tridiagonal_ql(&mut d, &mut e, z.as_deref_mut(), n)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].partial_cmp(&d[j]).unwrap_or(std::cmp::Ordering::Equal));
    let values = order.iter().map(|&i| d[i]).collect();
    let vectors = z.map(|z| {
        let mut sorted = vec![T::zero(); n * n];
        for (new, &old) in order.iter().enumerate() {
            for i in 0..n {
                sorted[i * n + new] = z[i * n + old];
            }
        }
        sorted
    });
    Ok(SymmetricEigen { values, vectors, n })
}

/// Householder reduction to tridiagonal form. Returns the diagonal, the
/// off-diagonal (`e[i]` couples `i` and `i+1`, `e[n-1] = 0`) and optionally the
/// accumulated orthogonal transform.
fn tridiagonalize<T: Real>(a: &mut [T], n: usize, want_q: bool) -> (Vec<T>, Vec<T>, Option<Vec<T>>) {
    let mut d = vec![T::zero(); n];
    let mut e = vec![T::zero(); n];
    let mut betas = vec![T::zero(); n];
    let mut p = vec![T::zero(); n];
    let mut v = vec![T::zero(); n];

    for k in 0..n.saturating_sub(2) {
        let s = k + 1;
        let norm = (s..n).map(|i| a[i * n + k] * a[i * n + k]).sum::<T>().sqrt();
        d[k] = a[k * n + k];
        if norm == T::zero() {
            e[k] = T::zero();
            betas[k] = T::zero();
            continue;
        }
        let x0 = a[s * n + k];
        let alpha = if x0 > T::zero() { -norm } else { norm };
        for i in s..n {
            v[i] = a[i * n + k];
        }
        v[s] -= alpha;
        let vnorm2: T = (s..n).map(|i| v[i] * v[i]).sum();
        e[k] = alpha;
        if vnorm2 == T::zero() {
            betas[k] = T::zero();
            continue;
        }
        let beta = lit::<T>(2.0) / vnorm2;
        betas[k] = beta;
        // Keep the reflector in the (now unused) column below the diagonal.
        for i in s..n {
            a[i * n + k] = v[i];
        }
        // p = beta A v from the lower triangle only, walking rows so both
        // halves of the product stay contiguous
        p[s..n].iter_mut().for_each(|x| *x = T::zero());
        for i in s..n {
            let vi = v[i];
            let row = &a[i * n + s..i * n + i];
            // four partial sums break the add dependency chain
            let mut acc = [T::zero(); 4];
            let (rc, vc, pc) = (
                row.chunks_exact(4),
                v[s..i].chunks_exact(4),
                p[s..i].chunks_exact_mut(4),
            );
            let (rr, vr) = (rc.remainder(), vc.remainder());
            for ((x, vj), pj) in rc.zip(vc).zip(pc) {
                for l in 0..4 {
                    acc[l] += x[l] * vj[l];
                    pj[l] += x[l] * vi;
                }
            }
            let tail = i - s - rr.len();
            let mut sum = a[i * n + i] * vi + (acc[0] + acc[1]) + (acc[2] + acc[3]);
            for (l, (&x, &vj)) in rr.iter().zip(vr).enumerate() {
                sum += x * vj;
                p[s + tail + l] += x * vi;
            }
            p[i] += sum;
        }
        for x in &mut p[s..n] {
            *x *= beta;
        }
        let kk = lit::<T>(0.5) * beta * (s..n).map(|i| p[i] * v[i]).sum::<T>();
        for i in s..n {
            p[i] -= kk * v[i];
        }
        for i in s..n {
            let (vi, wi) = (v[i], p[i]);
            let row = &mut a[i * n + s..i * n + i + 1];
            for ((x, &vj), &wj) in row.iter_mut().zip(&v[s..=i]).zip(&p[s..=i]) {
                *x -= vi * wj + wi * vj;
            }
        }
    }
    if n >= 2 {
        d[n - 2] = a[(n - 2) * n + n - 2];
        e[n - 2] = a[(n - 1) * n + n - 2];
    }
    d[n - 1] = a[(n - 1) * n + n - 1];
    e[n - 1] = T::zero();

    let q = want_q.then(|| {
        let mut q = vec![T::zero(); n * n];
        for i in 0..n {
            q[i * n + i] = T::one();
        }
        let mut t = vec![T::zero(); n];
        for k in (0..n.saturating_sub(2)).rev() {
            let beta = betas[k];
            if beta == T::zero() {
                continue;
            }
            let s = k + 1;
            t[s..n].iter_mut().for_each(|x| *x = T::zero());
            for i in s..n {
                let vi = a[i * n + k];
                for j in s..n {
                    t[j] += vi * q[i * n + j];
                }
            }
            for i in s..n {
                let vi = beta * a[i * n + k];
                for j in s..n {
                    q[i * n + j] -= vi * t[j];
                }
            }
        }
        q
    });
    (d, e, q)
}

/// Implicit QL on a symmetric tridiagonal matrix; rotations are applied to the
/// columns of `z` when given.
fn tridiagonal_ql<T: Real>(d: &mut [T], e: &mut [T], mut z: Option<&mut [T]>, n: usize) -> Result<()> {
    let eps = T::epsilon();
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= eps * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::NotConverged {
                    what: "tridiagonal QL".into(),
                    best: d[l].to_f64().unwrap_or(f64::NAN),
                    bound: e[l].abs().to_f64().unwrap_or(f64::NAN),
                });
            }
            let mut g = (d[l + 1] - d[l]) / (lit::<T>(2.0) * e[l]);
            let mut r = g.hypot(T::one());
            g = d[m] - d[l] + e[l] / (g + if g >= T::zero() { r.abs() } else { -r.abs() });
            let (mut s, mut c, mut p) = (T::one(), T::one(), T::zero());
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == T::zero() {
                    d[i + 1] -= p;
                    e[m] = T::zero();
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + lit::<T>(2.0) * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if let Some(z) = z.as_deref_mut() {
                    for k in 0..n {
                        let f = z[k * n + i + 1];
                        z[k * n + i + 1] = s * z[k * n + i] + c * f;
                        z[k * n + i] = c * z[k * n + i] - s * f;
                    }
                }
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = T::zero();
        }
    }
    Ok(())
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
pub fn solve_linear<T: Real>(a: &[T], b: &[T], n: usize) -> Result<Vec<T>> {
    assert_eq!(a.len(), n * n);
    assert_eq!(b.len(), n);
    let mut m = a.to_vec();
    let mut x = b.to_vec();
    let scale = m.iter().fold(T::zero(), |acc, v| acc.max(v.abs()));
    for col in 0..n {
        let (piv, big) = (col..n)
            .map(|r| (r, m[r * n + col].abs()))
            .fold((col, -T::one()), |acc, it| if it.1 > acc.1 { it } else { acc });
        if !(big > scale * T::epsilon() * lit(16.0)) {
            return Err(Error::Singular(format!("zero pivot in column {col}")));
        }
        if piv != col {
            for j in 0..n {
                m.swap(col * n + j, piv * n + j);
            }
            x.swap(col, piv);
        }
        for r in col + 1..n {
            let f = m[r * n + col] / m[col * n + col];
            if f == T::zero() {
                continue;
            }
            for j in col..n {
                let v = m[col * n + j];
                m[r * n + j] -= f * v;
            }
            let v = x[col];
            x[r] -= f * v;
        }
    }
    for col in (0..n).rev() {
        let mut acc = x[col];
        for j in col + 1..n {
            acc -= m[col * n + j] * x[j];
        }
        x[col] = acc / m[col * n + col];
    }
    Ok(x)
}

/// Minimises `|A x - b|` for a row-major `rows × cols` matrix with
/// `rows >= cols`, by Householder QR after scaling the columns to unit norm.
pub fn least_squares<T: Real>(a: &[T], b: &[T], rows: usize, cols: usize) -> Result<Vec<T>> {
    assert_eq!(a.len(), rows * cols, "matrix storage does not match dimension");
    assert_eq!(b.len(), rows, "right-hand side does not match rows");
    if rows < cols {
        return Err(Error::Singular(format!("{rows} equations for {cols} unknowns")));
    }
    let mut q = a.to_vec();
    let mut y = b.to_vec();
    let mut scale = vec![T::one(); cols];
    for (j, sc) in scale.iter_mut().enumerate() {
        let norm = (0..rows).map(|i| q[i * cols + j] * q[i * cols + j]).sum::<T>().sqrt();
        if norm > T::zero() {
            *sc = norm;
            for i in 0..rows {
                q[i * cols + j] /= norm;
            }
        }
    }
    for k in 0..cols {
        let norm = (k..rows).map(|i| q[i * cols + k] * q[i * cols + k]).sum::<T>().sqrt();
        if norm <= T::epsilon() * lit(64.0) {
            return Err(Error::Singular(format!("column {k} is linearly dependent")));
        }
        let alpha = if q[k * cols + k] > T::zero() { -norm } else { norm };
        let mut v: Vec<T> = (k..rows).map(|i| q[i * cols + k]).collect();
        v[0] -= alpha;
        let vv: T = v.iter().map(|x| *x * *x).sum();
        let beta = lit::<T>(2.0) / vv;
        for j in k..cols {
            let dot: T = (k..rows).map(|i| v[i - k] * q[i * cols + j]).sum();
            for i in k..rows {
                q[i * cols + j] -= beta * dot * v[i - k];
            }
        }
        let dot: T = (k..rows).map(|i| v[i - k] * y[i]).sum();
        for i in k..rows {
            y[i] -= beta * dot * v[i - k];
        }
    }
    let mut x = vec![T::zero(); cols];
    for k in (0..cols).rev() {
        let s: T = (k + 1..cols).map(|j| q[k * cols + j] * x[j]).sum();
        x[k] = (y[k] - s) / q[k * cols + k];
    }
    for (xj, sc) in x.iter_mut().zip(&scale) {
        *xj /= *sc;
    }
    Ok(x)
}
