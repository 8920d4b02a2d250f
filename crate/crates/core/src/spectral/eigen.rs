//! Eigenvalues and eigenvectors of the chain Hamiltonian.
//!
//! Mid-spectrum eigenvalues of `H` are extremely ill-conditioned (condition
//! numbers around 1e13 on 201 sites), so a general complex solver scatters
//! the `E <-> -E*` pairs by ~1e-3. Instead we use the fact that `iH` is
//! similar, through `D = diag(i^l)`, to the real tridiagonal matrix
//!
//! ```text
//! B = D^-1 (iH) D,   B_kk = -Im H_kk,   B_k,k+1 = -t,   B_k+1,k = t
//! ```
//!
//! (`t` the real hopping). Real Hessenberg QR returns real eigenvalues and
//! exactly conjugate pairs of `B`; with `E = -i lambda` those become the
//! purely imaginary and the exactly paired eigenvalues of `H`.
//! Eigenvectors then come from complex tridiagonal inverse iteration.

use num_complex::Complex64;

use crate::chain::Hamiltonian;
use crate::error::{Error, Result};

/// Row-major dense real matrix used by the QR sweep.
struct Dense {
    n: usize,
    a: Vec<f64>,
}

impl Dense {
    fn zeros(n: usize) -> Self {
        Self { n, a: vec![0.0; n * n] }
    }

    #[inline]
    fn get(&self, i: isize, j: isize) -> f64 {
        self.a[i as usize * self.n + j as usize]
    }

    #[inline]
    fn set(&mut self, i: isize, j: isize, v: f64) {
        self.a[i as usize * self.n + j as usize] = v;
    }

    #[inline]
    fn sub(&mut self, i: isize, j: isize, v: f64) {
        self.a[i as usize * self.n + j as usize] -= v;
    }
}

fn sign(a: f64, b: f64) -> f64 {
    if b >= 0.0 {
        a.abs()
    } else {
        -a.abs()
    }
}

const MAX_SWEEPS_PER_EIGENVALUE: usize = 60;

/// Eigenvalues `(re, im)` of a real upper Hessenberg matrix by the Francis
/// double-shift QR algorithm. Complex eigenvalues come out as exact
/// conjugate pairs. The matrix is destroyed.
fn hessenberg_qr(h: &mut Dense) -> Result<Vec<(f64, f64)>> {
    let n = h.n as isize;
    let mut wr = vec![0.0; h.n];
    let mut wi = vec![0.0; h.n];
    let mut anorm = 0.0;
    for i in 0..n {
        for j in (i - 1).max(0)..n {
            anorm += h.get(i, j).abs();
        }
    }
    let mut nn = n - 1;
    let mut shift = 0.0;
    while nn >= 0 {
        let mut its = 0;
        loop {
            // look for a single small subdiagonal element
            let mut l = nn;
            while l >= 1 {
                let mut s = h.get(l - 1, l - 1).abs() + h.get(l, l).abs();
                if s == 0.0 {
                    s = anorm;
                }
                if h.get(l, l - 1).abs() <= f64::EPSILON * s {
                    h.set(l, l - 1, 0.0);
                    break;
                }
                l -= 1;
            }
            let mut x = h.get(nn, nn);
            if l == nn {
                wr[nn as usize] = x + shift;
                wi[nn as usize] = 0.0;
                nn -= 1;
                break;
            }
            let mut y = h.get(nn - 1, nn - 1);
            let mut w = h.get(nn, nn - 1) * h.get(nn - 1, nn);
            if l == nn - 1 {
                let p = 0.5 * (y - x);
                let q = p * p + w;
                let mut z = q.abs().sqrt();
                x += shift;
                let (a, b) = ((nn - 1) as usize, nn as usize);
                if q >= 0.0 {
                    z = p + sign(z, p);
                    wr[a] = x + z;
                    wr[b] = if z != 0.0 { x - w / z } else { x + z };
                    wi[a] = 0.0;
                    wi[b] = 0.0;
                } else {
                    wr[a] = x + p;
                    wr[b] = x + p;
                    wi[a] = -z;
                    wi[b] = z;
                }
                nn -= 2;
                break;
            }
            if its == MAX_SWEEPS_PER_EIGENVALUE {
                return Err(Error::NoConvergence {
                    worst_residual: h.get(nn, nn - 1).abs(),
                });
            }
            if its > 0 && its % 10 == 0 {
                // exceptional shift
                shift += x;
                for i in 0..=nn {
                    h.sub(i, i, x);
                }
                let s = h.get(nn, nn - 1).abs() + h.get(nn - 1, nn - 2).abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            its += 1;
            // look for two consecutive small subdiagonal elements
            let mut m = nn - 2;
            let (mut p, mut q, mut r);
            loop {
                let z = h.get(m, m);
                let rr = x - z;
                let ss = y - z;
                p = (rr * ss - w) / h.get(m + 1, m) + h.get(m, m + 1);
                q = h.get(m + 1, m + 1) - z - rr - ss;
                r = h.get(m + 2, m + 1);
                let s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let u = h.get(m, m - 1).abs() * (q.abs() + r.abs());
                let v = p.abs() * (h.get(m - 1, m - 1).abs() + z.abs() + h.get(m + 1, m + 1).abs());
                if u <= f64::EPSILON * v {
                    break;
                }
                m -= 1;
            }
            for i in (m + 2)..=nn {
                h.set(i, i - 2, 0.0);
                if i != m + 2 {
                    h.set(i, i - 3, 0.0);
                }
            }
            // double QR step on rows l..nn and columns m..nn
            let mut k = m;
            while k < nn {
                if k != m {
                    p = h.get(k, k - 1);
                    q = h.get(k + 1, k - 1);
                    r = if k != nn - 1 { h.get(k + 2, k - 1) } else { 0.0 };
                    x = p.abs() + q.abs() + r.abs();
                    if x != 0.0 {
                        p /= x;
                        q /= x;
                        r /= x;
                    }
                }
                let s = sign((p * p + q * q + r * r).sqrt(), p);
                if s != 0.0 {
                    if k == m {
                        if l != m {
                            let v = h.get(k, k - 1);
                            h.set(k, k - 1, -v);
                        }
                    } else {
                        h.set(k, k - 1, -s * x);
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    let z = r / s;
                    q /= p;
                    r /= p;
                    for j in k..=nn {
                        let mut pp = h.get(k, j) + q * h.get(k + 1, j);
                        if k != nn - 1 {
                            pp += r * h.get(k + 2, j);
                            h.sub(k + 2, j, pp * z);
                        }
                        h.sub(k + 1, j, pp * y);
                        h.sub(k, j, pp * x);
                    }
                    let mmin = if nn < k + 3 { nn } else { k + 3 };
                    for i in l..=mmin {
                        let mut pp = x * h.get(i, k) + y * h.get(i, k + 1);
                        if k != nn - 1 {
                            pp += z * h.get(i, k + 2);
                            h.sub(i, k + 2, pp * r);
                        }
                        h.sub(i, k + 1, pp * q);
                        h.sub(i, k, pp);
                    }
                }
                k += 1;
            }
        }
    }
    Ok(wr.into_iter().zip(wi).collect())
}

/// All eigenvalues of a Hamiltonian whose diagonal is purely imaginary and
/// whose hopping is real (the anti-PT-symmetric family). The result is
/// closed under `E -> -E*` exactly.
pub(crate) fn paired_eigenvalues(h: &Hamiltonian) -> Result<Vec<Complex64>> {
    let n = h.dim();
    let t = h.off_diagonal();
    let mut b = Dense::zeros(n);
    for k in 0..n as isize {
        b.set(k, k, -h.diagonal()[k as usize].im);
        if (k as usize) + 1 < n {
            b.set(k, k + 1, -t);
            b.set(k + 1, k, t);
        }
    }
    let lambdas = hessenberg_qr(&mut b)?;
    // E = -i lambda
    Ok(lambdas
        .into_iter()
        .map(|(re, im)| Complex64::new(im, -re))
        .collect())
}

/// LU factorisation with partial pivoting of the tridiagonal `H - sigma`.
struct TridiagonalLu {
    // upper factor: main, first and second superdiagonals
    u0: Vec<Complex64>,
    u1: Vec<Complex64>,
    u2: Vec<Complex64>,
    mult: Vec<Complex64>,
    swapped: Vec<bool>,
}

impl TridiagonalLu {
    fn new(h: &Hamiltonian, sigma: Complex64) -> Self {
        let n = h.dim();
        let t = Complex64::new(h.off_diagonal(), 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let floor = f64::EPSILON * h.spectral_radius_estimate().max(1.0);
        let mut u0: Vec<Complex64> = h.diagonal().iter().map(|&d| d - sigma).collect();
        let mut u1 = vec![if n > 1 { t } else { zero }; n];
        let mut u2 = vec![zero; n];
        let mut mult = vec![zero; n];
        let mut swapped = vec![false; n];
        if n > 0 {
            u1[n - 1] = zero;
        }
        for k in 0..n.saturating_sub(1) {
            // row k+1 currently holds (t, d_{k+1} - sigma, t) in columns k..k+2
            let sub = t;
            let mut below = [u0[k + 1], if k + 2 < n { t } else { zero }];
            if sub.norm() > u0[k].norm() {
                swapped[k] = true;
                let row_k = [u0[k], u1[k], u2[k]];
                u0[k] = sub;
                u1[k] = below[0];
                u2[k] = below[1];
                let f = row_k[0] / u0[k];
                mult[k] = f;
                below = [row_k[1] - f * u1[k], row_k[2] - f * u2[k]];
            } else {
                if u0[k].norm() < floor {
                    u0[k] = Complex64::new(floor, 0.0);
                }
                let f = sub / u0[k];
                mult[k] = f;
                below = [below[0] - f * u1[k], below[1] - f * u2[k]];
            }
            u0[k + 1] = below[0];
            u1[k + 1] = below[1];
        }
        if n > 0 && u0[n - 1].norm() < floor {
            u0[n - 1] = Complex64::new(floor, 0.0);
        }
        Self { u0, u1, u2, mult, swapped }
    }

    fn solve(&self, rhs: &mut [Complex64]) {
        let n = rhs.len();
        for k in 0..n.saturating_sub(1) {
            if self.swapped[k] {
                rhs.swap(k, k + 1);
            }
            let f = self.mult[k];
            let v = rhs[k];
            rhs[k + 1] -= f * v;
        }
        for k in (0..n).rev() {
            let mut acc = rhs[k];
            if k + 1 < n {
                acc -= self.u1[k] * rhs[k + 1];
            }
            if k + 2 < n {
                acc -= self.u2[k] * rhs[k + 2];
            }
            rhs[k] = acc / self.u0[k];
        }
    }
}

fn normalize(v: &mut [Complex64]) -> f64 {
    let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    if norm > 0.0 && norm.is_finite() {
        for x in v.iter_mut() {
            *x /= norm;
        }
    }
    norm
}

/// Deterministic, generic starting vector.
fn seed_vector(n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|k| {
            let x = k as f64;
            Complex64::new(1.0 + 0.5 * (1.618_033_988_75 * x).sin(), 0.5 * (std::f64::consts::SQRT_2 * x + 0.3).cos())
        })
        .collect()
}

const INVERSE_ITERATIONS: usize = 8;

/// Right eigenvector of `h` for the eigenvalue `energy` by inverse
/// iteration. Returns the unit-norm vector and its residual.
pub(crate) fn inverse_iteration(h: &Hamiltonian, energy: Complex64, tol: f64) -> (Vec<Complex64>, f64) {
    let lu = TridiagonalLu::new(h, energy);
    let mut v = seed_vector(h.dim());
    normalize(&mut v);
    let mut best = (v.clone(), f64::INFINITY);
    for _ in 0..INVERSE_ITERATIONS {
        lu.solve(&mut v);
        if normalize(&mut v) == 0.0 || v.iter().any(|x| !x.is_finite()) {
            break;
        }
        let res = h.residual(energy, &v);
        if res < best.1 {
            best = (v.clone(), res);
        }
        if res <= 0.01 * tol {
            break;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{build_hamiltonian, ChainParams};

    #[test]
    fn qr_on_small_known_matrices() {
        // rotation-like block with eigenvalues 1 +- 2i, and a real 3.
        let mut m = Dense::zeros(3);
        let rows = [[1.0, -2.0, 0.5], [2.0, 1.0, 0.1], [0.0, 0.0, 3.0]];
        for (i, r) in rows.iter().enumerate() {
            for (j, &x) in r.iter().enumerate() {
                m.set(i as isize, j as isize, x);
            }
        }
        let mut ev = hessenberg_qr(&mut m).unwrap();
        ev.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
        let expect = [(1.0, -2.0), (1.0, 2.0), (3.0, 0.0)];
        for (g, e) in ev.iter().zip(expect) {
            assert!((g.0 - e.0).abs() < 1e-12 && (g.1 - e.1).abs() < 1e-12, "{ev:?}");
        }
    }

    #[test]
    fn qr_on_symmetric_tridiagonal() {
        // -1 2 -1 stencil on 10 points: 2 - 2 cos(k pi / 11)
        let n = 10;
        let mut m = Dense::zeros(n);
        for k in 0..n as isize {
            m.set(k, k, 2.0);
            if k + 1 < n as isize {
                m.set(k, k + 1, -1.0);
                m.set(k + 1, k, -1.0);
            }
        }
        let mut ev: Vec<f64> = hessenberg_qr(&mut m).unwrap().iter().map(|e| e.0).collect();
        ev.sort_by(f64::total_cmp);
        for (k, e) in ev.iter().enumerate() {
            let exact = 2.0 - 2.0 * ((k + 1) as f64 * std::f64::consts::PI / 11.0).cos();
            assert!((e - exact).abs() < 1e-12);
        }
    }

    #[test]
    fn trace_is_preserved() {
        let p = ChainParams::new(1.0, 0.02, 20).unwrap();
        let h = build_hamiltonian(&p);
        let ev = paired_eigenvalues(&h).unwrap();
        let tr: Complex64 = h.diagonal().iter().sum();
        let s: Complex64 = ev.iter().sum();
        assert!((tr - s).norm() < 1e-10);
    }

    #[test]
    fn lu_solve_matches_matvec() {
        let p = ChainParams::new(1.0, 0.05, 6).unwrap();
        let h = build_hamiltonian(&p);
        let sigma = Complex64::new(0.3, -0.2);
        let lu = TridiagonalLu::new(&h, sigma);
        let x = seed_vector(h.dim());
        let mut b = vec![Complex64::new(0.0, 0.0); h.dim()];
        h.apply_into(&x, &mut b);
        for (bi, xi) in b.iter_mut().zip(&x) {
            *bi -= sigma * xi;
        }
        lu.solve(&mut b);
        for (a, e) in b.iter().zip(&x) {
            assert!((a - e).norm() < 1e-12);
        }
    }
}
