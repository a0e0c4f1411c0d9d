#![allow(dead_code, clippy::needless_range_loop)]

use nalgebra::{SMatrix, Vector4};
use nuosc::linalg::{CMat3, CMat4, C64};
use nuosc::OscParams;
use rand::Rng;
use rand_distr::StandardNormal;

pub fn gaussian_c64<R: Rng>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-random 4×4 unitary from the QR decomposition of a Ginibre matrix.
pub fn haar_unitary4<R: Rng>(rng: &mut R) -> CMat4 {
    let g = CMat4::from_fn(|_, _| gaussian_c64(rng));
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    let mut fix = CMat4::zeros();
    for k in 0..4 {
        fix[(k, k)] = r[(k, k)] / r[(k, k)].norm();
    }
    q * fix
}

pub fn random_pure<R: Rng>(rng: &mut R) -> Vector4<C64> {
    let v = Vector4::from_fn(|_, _| gaussian_c64(rng));
    v / C64::new(v.norm(), 0.0)
}

/// `G G† / tr(G G†)` for Ginibre `G`; full rank almost surely.
pub fn random_density<R: Rng>(rng: &mut R) -> CMat4 {
    let g = CMat4::from_fn(|_, _| gaussian_c64(rng));
    let m = g * g.adjoint();
    let tr = m.trace().re;
    let mut rho = m / C64::new(tr, 0.0);
    for k in 0..4 {
        rho[(k, k)].im = 0.0;
    }
    rho
}

pub fn random_params<R: Rng>(rng: &mut R) -> OscParams {
    let tau = std::f64::consts::TAU;
    OscParams {
        theta12: rng.random_range(0.0..tau),
        theta13: rng.random_range(0.0..tau),
        theta23: rng.random_range(0.0..tau),
        delta: rng.random_range(-tau..tau),
        dm2_21: rng.random_range(1e-6..1e-3),
        dm2_31: rng.random_range(-5e-3..5e-3),
        antineutrino: rng.random_bool(0.5),
    }
}

/// Real symmetric embedding `[[Re A, −Im A], [Im A, Re A]]`; an algebra
/// homomorphism, so functions of `A` can be computed on the embedding.
fn embed<const N: usize>(a: &SMatrix<C64, N, N>) -> Vec<Vec<f64>> {
    let n2 = 2 * N;
    let mut m = vec![vec![0.0; n2]; n2];
    for r in 0..N {
        for c in 0..N {
            let z = a[(r, c)];
            m[r][c] = z.re;
            m[r][c + N] = -z.im;
            m[r + N][c] = z.im;
            m[r + N][c + N] = z.re;
        }
    }
    m
}

/// Cyclic Jacobi eigen-solver for small real symmetric matrices.
/// Returns (eigenvalues, eigenvectors as columns).
pub fn jacobi(mut a: Vec<Vec<f64>>) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.len();
    let mut v = vec![vec![0.0; n]; n];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let vkp = row[p];
                    let vkq = row[q];
                    row[p] = c * vkp - s * vkq;
                    row[q] = s * vkp + c * vkq;
                }
            }
        }
    }
    ((0..n).map(|i| a[i][i]).collect(), v)
}

/// Hermitian eigenvalues (ascending) via the real embedding.
pub fn oracle_eigenvalues<const N: usize>(h: &SMatrix<C64, N, N>) -> Vec<f64> {
    let (mut vals, _) = jacobi(embed(h));
    vals.sort_by(f64::total_cmp);
    // Every eigenvalue appears twice in the embedding.
    vals.into_iter().step_by(2).collect()
}

/// PSD square root via the real embedding.
pub fn oracle_sqrt<const N: usize>(h: &SMatrix<C64, N, N>) -> SMatrix<C64, N, N> {
    let (vals, vecs) = jacobi(embed(h));
    let n2 = 2 * N;
    let mut s = vec![vec![0.0; n2]; n2];
    for i in 0..n2 {
        for j in 0..n2 {
            s[i][j] = (0..n2)
                .map(|k| vecs[i][k] * vals[k].max(0.0).sqrt() * vecs[j][k])
                .sum();
        }
    }
    SMatrix::from_fn(|r, c| C64::new(s[r][c], s[r + N][c]))
}

/// Uhlmann fidelity computed only with the oracle square root.
pub fn oracle_fidelity(rho: &CMat4, sigma: &CMat4) -> f64 {
    let s = oracle_sqrt(rho);
    let inner = s * sigma * s;
    let tr: f64 = oracle_eigenvalues(&inner)
        .iter()
        .map(|v| v.max(0.0).sqrt())
        .sum();
    tr * tr
}

/// `exp(−i t H)` by scaling and squaring a Taylor series.
pub fn expm_i(h: &CMat3, t: f64) -> CMat3 {
    let a = h * C64::new(0.0, -t);
    let norm: f64 = a.iter().map(|z| z.norm()).sum();
    let squarings = (norm.max(1.0).log2().ceil() as i32 + 4).max(0);
    let scaled = a / C64::new(2f64.powi(squarings), 0.0);
    let mut term = CMat3::identity();
    let mut sum = CMat3::identity();
    for k in 1..30 {
        term = term * scaled / C64::new(k as f64, 0.0);
        sum += term;
    }
    for _ in 0..squarings {
        sum = sum * sum;
    }
    sum
}
