//! Test-only reference implementations. Nothing here calls into the crate's
//! factorization or prediction code.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub type Dense = Vec<Vec<f64>>;

/// Gauss-Jordan inverse with partial pivoting.
pub fn invert(a: &Dense) -> Dense {
    let n = a.len();
    let mut m: Dense = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&x, &y| m[x][col].abs().total_cmp(&m[y][col].abs()))
            .unwrap();
        m.swap(col, pivot);
        let p = m[col][col];
        assert!(p != 0.0, "singular matrix in oracle");
        for v in m[col].iter_mut() {
            *v /= p;
        }
        for row in 0..n {
            if row != col {
                let f = m[row][col];
                if f != 0.0 {
                    for k in 0..2 * n {
                        m[row][k] -= f * m[col][k];
                    }
                }
            }
        }
    }
    m.into_iter().map(|r| r[n..].to_vec()).collect()
}

pub fn matvec(a: &Dense, x: &[f64]) -> Vec<f64> {
    a.iter().map(|r| r.iter().zip(x).map(|(p, q)| p * q).sum()).collect()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| p * q).sum()
}

pub fn correlation(a: &[f64], b: &[f64], theta: &[f64]) -> f64 {
    let s: f64 = a
        .iter()
        .zip(b)
        .zip(theta)
        .map(|((x, y), t)| (x - y).powi(2) / t)
        .sum();
    (-s).exp()
}

pub fn basis_row(x: &[f64], linear: bool) -> Vec<f64> {
    let mut f = vec![1.0];
    if linear {
        f.extend_from_slice(x);
    }
    f
}

/// Dense-inverse GPR: forms C_N, inverts it explicitly, and evaluates the
/// bordered-covariance posterior with a GLS mean function. The nugget is part
/// of the kernel, `σ²(ρ + jitter·δ)`.
pub struct DenseOracle {
    pub x: Dense,
    pub t: Vec<f64>,
    pub sigma_sq: f64,
    pub theta: Vec<f64>,
    pub linear: bool,
    pub jitter: f64,
    c_inv: Dense,
    a_inv: Dense,
    beta: Vec<f64>,
    resid_weights: Vec<f64>,
}

impl DenseOracle {
    pub fn new(x: Dense, t: Vec<f64>, sigma_sq: f64, theta: Vec<f64>, jitter: f64, linear: bool) -> Self {
        let n = x.len();
        let c: Dense = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let v = sigma_sq * correlation(&x[i], &x[j], &theta);
                        if i == j { v + jitter * sigma_sq } else { v }
                    })
                    .collect()
            })
            .collect();
        let c_inv = invert(&c);
        let f: Dense = x.iter().map(|r| basis_row(r, linear)).collect();
        let p = f[0].len();
        let cf: Vec<Vec<f64>> = (0..p)
            .map(|k| matvec(&c_inv, &f.iter().map(|r| r[k]).collect::<Vec<_>>()))
            .collect();
        let a: Dense = (0..p)
            .map(|i| (0..p).map(|j| (0..n).map(|r| f[r][i] * cf[j][r]).sum()).collect())
            .collect();
        let a_inv = invert(&a);
        let ft_cinv_t: Vec<f64> = (0..p).map(|k| dot(&cf[k], &t)).collect();
        let beta = matvec(&a_inv, &ft_cinv_t);
        let resid: Vec<f64> = (0..n).map(|r| t[r] - dot(&f[r], &beta)).collect();
        let resid_weights = matvec(&c_inv, &resid);
        DenseOracle { x, t, sigma_sq, theta, linear, jitter, c_inv, a_inv, beta, resid_weights }
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    pub fn predict(&self, x_new: &[f64]) -> (f64, f64) {
        let k: Vec<f64> = self
            .x
            .iter()
            .map(|r| {
                let c = self.sigma_sq * correlation(r, x_new, &self.theta);
                if r.as_slice() == x_new { c + self.jitter * self.sigma_sq } else { c }
            })
            .collect();
        let f_new = basis_row(x_new, self.linear);
        let mean = dot(&f_new, &self.beta) + dot(&k, &self.resid_weights);
        let cik = matvec(&self.c_inv, &k);
        let f: Dense = self.x.iter().map(|r| basis_row(r, self.linear)).collect();
        let u: Vec<f64> = (0..f_new.len())
            .map(|c| f_new[c] - (0..f.len()).map(|r| f[r][c] * cik[r]).sum::<f64>())
            .collect();
        let var = self.sigma_sq * (1.0 + self.jitter) - dot(&k, &cik) + dot(&u, &matvec(&self.a_inv, &u));
        (mean, var)
    }
}

/// Brute-force profile log likelihood via the dense inverse and an LU determinant.
pub fn dense_profile_log_likelihood(x: &Dense, t: &[f64], theta: &[f64], jitter: f64) -> f64 {
    let n = x.len();
    let r: Dense = (0..n)
        .map(|i| (0..n).map(|j| correlation(&x[i], &x[j], theta) + if i == j { jitter } else { 0.0 }).collect())
        .collect();
    let r_inv = invert(&r);
    let ones = vec![1.0; n];
    let ri1 = matvec(&r_inv, &ones);
    let beta = dot(&ri1, t) / dot(&ri1, &ones);
    let e: Vec<f64> = t.iter().map(|v| v - beta).collect();
    let q = dot(&e, &matvec(&r_inv, &e));
    let s2 = q / n as f64;
    let logdet = nalgebra::DMatrix::from_fn(n, n, |i, j| r[i][j]).determinant().ln();
    -0.5 * (n as f64 * (1.0 + s2.ln() + (2.0 * std::f64::consts::PI).ln()) + logdet)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_points(rng: &mut ChaCha8Rng, n: usize, d: usize, lo: f64, hi: f64) -> Dense {
    (0..n).map(|_| (0..d).map(|_| rng.gen_range(lo..hi)).collect()).collect()
}

/// Draws targets from a zero-mean GP with the given kernel using nalgebra's
/// Cholesky (plus a tiny nugget).
pub fn sample_gp(rng: &mut ChaCha8Rng, x: &Dense, sigma_sq: f64, theta: &[f64], nugget: f64) -> Vec<f64> {
    let n = x.len();
    let c = nalgebra::DMatrix::from_fn(n, n, |i, j| {
        sigma_sq * correlation(&x[i], &x[j], theta) + if i == j { nugget } else { 0.0 }
    });
    let l = c.cholesky().expect("sampling covariance positive definite").unpack();
    let z = nalgebra::DVector::from_fn(n, |_, _| StandardNormal.sample(rng));
    (l * z).iter().copied().collect()
}

pub fn min_eigenvalue(m: &Dense) -> f64 {
    let n = m.len();
    let a = nalgebra::DMatrix::from_fn(n, n, |i, j| m[i][j]);
    a.symmetric_eigen().eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
}

/// One random regression problem with a query point.
#[derive(Clone, Debug)]
pub struct Instance {
    pub x: Dense,
    pub t: Vec<f64>,
    pub theta: Vec<f64>,
    pub sigma_sq: f64,
    pub linear: bool,
    pub query: Vec<f64>,
}

/// Largest-to-smallest eigenvalue ratio of the correlation matrix.
pub fn condition_number(x: &Dense, theta: &[f64]) -> f64 {
    let n = x.len();
    let a = nalgebra::DMatrix::from_fn(n, n, |i, j| correlation(&x[i], &x[j], theta));
    let ev = a.symmetric_eigen().eigenvalues;
    let hi = ev.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = ev.iter().copied().fold(f64::INFINITY, f64::min);
    if lo <= 0.0 { f64::INFINITY } else { hi / lo }
}

pub const MAX_CONDITION: f64 = 1e5;

/// N in 2..=12, d in 1..=3, θ log-uniform in [0.1, 10], σ² in [0.5, 2],
/// inputs uniform on [0, 4]^d. Draws whose correlation matrix has condition
/// number above [`MAX_CONDITION`] are redrawn: past that point neither the
/// oracle nor the model is accurate to 1e-8 and the comparison is noise.
pub fn random_instance(seed: u64) -> Instance {
    let mut r = rng(seed);
    loop {
        let d = r.gen_range(1..=3usize);
        let n = r.gen_range(2..=12usize);
        let theta: Vec<f64> = (0..d).map(|_| 10f64.powf(r.gen_range(-1.0..=1.0))).collect();
        let sigma_sq = r.gen_range(0.5..=2.0);
        let x = random_points(&mut r, n, d, 0.0, 4.0);
        let t: Vec<f64> = (0..n).map(|_| r.gen_range(-3.0..3.0)).collect();
        let linear = n > d && r.gen_bool(0.5);
        let query: Vec<f64> = (0..d).map(|_| r.gen_range(-1.0..5.0)).collect();
        if condition_number(&x, &theta) <= MAX_CONDITION {
            return Instance { x, t, theta, sigma_sq, linear, query };
        }
    }
}
