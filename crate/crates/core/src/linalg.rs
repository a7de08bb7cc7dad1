//! Dense linear-algebra kernels shared by the dynamics modules: matrix
//! exponential, continuous Lyapunov solver, spectra and small helpers.

use nalgebra::{DMatrix, DVector, Schur, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{GlmeError, Result};

pub type RMat = DMatrix<f64>;
pub type CMat = DMatrix<Complex64>;
pub type RVec = DVector<f64>;

pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Largest absolute entry.
pub fn max_abs(m: &RMat) -> f64 {
    m.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

pub fn max_abs_c(m: &CMat) -> f64 {
    m.iter().fold(0.0_f64, |acc, x| acc.max(x.norm()))
}

pub fn max_abs_diff(a: &RMat, b: &RMat) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .fold(0.0_f64, |acc, (x, y)| acc.max((x - y).abs()))
}

pub fn symmetrize(m: &RMat) -> RMat {
    (m + m.transpose()) * 0.5
}

pub fn antisymmetrize(m: &RMat) -> RMat {
    (m - m.transpose()) * 0.5
}

pub fn to_complex(m: &RMat) -> CMat {
    m.map(|x| c64(x, 0.0))
}

pub fn re_part(m: &CMat) -> RMat {
    m.map(|z| z.re)
}

pub fn im_part(m: &CMat) -> RMat {
    m.map(|z| z.im)
}

fn one_norm(m: &RMat) -> f64 {
    (0..m.ncols())
        .map(|j| m.column(j).iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Induced infinity norm (max absolute row sum).
pub fn inf_norm(m: &RMat) -> f64 {
    (0..m.nrows())
        .map(|i| m.row(i).iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

const PADE3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const PADE5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const PADE7: [f64; 8] = [
    17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0,
];
const PADE9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

// Backward-error bounds for the degree-m diagonal Padé approximants.
const THETA: [(usize, f64); 4] = [
    (3, 1.495585217958292e-2),
    (5, 2.539_398_330_063_23e-1),
    (7, 9.504178996162932e-1),
    (9, 2.097847961257068e0),
];
const THETA13: f64 = 5.371920351148152;

/// Matrix exponential by scaling and squaring with diagonal Padé
/// approximants of degree 3..13.
pub fn expm(a: &RMat) -> RMat {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "expm requires a square matrix");
    if n == 0 {
        return RMat::zeros(0, 0);
    }
    let norm = one_norm(a);
    let eye = RMat::identity(n, n);

    for &(m, theta) in THETA.iter() {
        if norm <= theta {
            let coeffs: &[f64] = match m {
                3 => &PADE3,
                5 => &PADE5,
                7 => &PADE7,
                _ => &PADE9,
            };
            return pade_low(a, coeffs, &eye);
        }
    }

    let s = if norm > THETA13 {
        (norm / THETA13).log2().ceil().max(0.0) as i32
    } else {
        0
    };
    let scaled = a * 2f64.powi(-s);
    let mut r = pade13(&scaled, &eye);
    for _ in 0..s {
        r = &r * &r;
    }
    r
}

fn pade_solve(u: RMat, v: RMat) -> RMat {
    let p = &v + &u;
    let q = &v - &u;
    q.lu().solve(&p).expect("Padé denominator is nonsingular within the theta bounds")
}

fn pade_low(a: &RMat, b: &[f64], eye: &RMat) -> RMat {
    let a2 = a * a;
    let mut odd = eye * b[1];
    let mut even = eye * b[0];
    let mut power = eye.clone();
    for k in 1..b.len() / 2 {
        power = &power * &a2;
        odd += &power * b[2 * k + 1];
        even += &power * b[2 * k];
    }
    pade_solve(a * odd, even)
}

fn pade13(a: &RMat, eye: &RMat) -> RMat {
    let b = &PADE13;
    let a2 = a * a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let inner_u = &a6 * b[13] + &a4 * b[11] + &a2 * b[9];
    let u = a * (&a6 * inner_u + &a6 * b[7] + &a4 * b[5] + &a2 * b[3] + eye * b[1]);
    let inner_v = &a6 * b[12] + &a4 * b[10] + &a2 * b[8];
    let v = &a6 * inner_v + &a6 * b[6] + &a4 * b[4] + &a2 * b[2] + eye * b[0];
    pade_solve(u, v)
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &CMat) -> Vec<f64> {
    let mut ev: Vec<f64> = SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

/// Eigenvalues of a real symmetric matrix, ascending.
pub fn symmetric_eigenvalues(m: &RMat) -> Vec<f64> {
    let mut ev: Vec<f64> = SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

/// Complex eigenvalues of a general real matrix.
pub fn eigenvalues(m: &RMat) -> Vec<Complex64> {
    m.clone().complex_eigenvalues().iter().copied().collect()
}

/// Largest real part over the spectrum.
pub fn spectral_abscissa(m: &RMat) -> f64 {
    eigenvalues(m)
        .iter()
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Residual `‖A X + X Aᵀ + Q‖_max`.
pub fn lyapunov_residual(a: &RMat, x: &RMat, q: &RMat) -> f64 {
    max_abs(&(a * x + x * a.transpose() + q))
}

/// Largest dimension routed to the Kronecker fallback.
pub const KRONECKER_MAX_DIM: usize = 20;

/// Solve the continuous algebraic Lyapunov equation `A X + X Aᵀ + Q = 0`.
///
/// Bartels–Stewart on the real Schur form of `A`; when the Schur iteration
/// fails or the residual is poor, small problems fall back to the dense
/// Kronecker system.
pub fn solve_lyapunov(a: &RMat, q: &RMat) -> Result<RMat> {
    let n = a.nrows();
    if a.ncols() != n || q.shape() != (n, n) {
        return Err(GlmeError::structural(
            "lyapunov",
            format!("A is {:?}, Q is {:?}", a.shape(), q.shape()),
        ));
    }
    let scale = max_abs(a).max(max_abs(q)).max(1.0);
    let accept = 1e-12 * scale;

    let schur = bartels_stewart(a, q);
    if let Ok(x) = &schur {
        if lyapunov_residual(a, x, q) <= accept {
            return schur;
        }
    }
    if n <= KRONECKER_MAX_DIM {
        let x = lyapunov_kronecker(a, q)?;
        match &schur {
            Ok(xs) if lyapunov_residual(a, xs, q) <= lyapunov_residual(a, &x, q) => {
                return schur;
            }
            _ => return Ok(x),
        }
    }
    schur
}

/// Vectorized solve `(I ⊗ A + A ⊗ I) vec X = -vec Q`.
pub fn lyapunov_kronecker(a: &RMat, q: &RMat) -> Result<RMat> {
    let n = a.nrows();
    let nn = n * n;
    let mut big = RMat::zeros(nn, nn);
    // column-major vec: index(i, j) = i + n j
    for j in 0..n {
        for i in 0..n {
            let row = i + n * j;
            for k in 0..n {
                big[(row, k + n * j)] += a[(i, k)];
                big[(row, i + n * k)] += a[(j, k)];
            }
        }
    }
    let rhs = RVec::from_iterator(nn, q.iter().map(|x| -x));
    let sol = big
        .lu()
        .solve(&rhs)
        .ok_or_else(|| GlmeError::numerical("lyapunov", "Kronecker system is singular"))?;
    Ok(RMat::from_column_slice(n, n, sol.as_slice()))
}

pub(crate) fn schur_blocks(t: &RMat) -> Vec<(usize, usize)> {
    let n = t.nrows();
    let mut blocks = Vec::new();
    let mut i = 0;
    while i < n {
        if i + 1 < n {
            let sub = t[(i + 1, i)].abs();
            let diag = t[(i, i)].abs() + t[(i + 1, i + 1)].abs();
            if sub > f64::EPSILON * diag.max(f64::MIN_POSITIVE) && sub > 0.0 {
                blocks.push((i, 2));
                i += 2;
                continue;
            }
        }
        blocks.push((i, 1));
        i += 1;
    }
    blocks
}

fn bartels_stewart(a: &RMat, q: &RMat) -> Result<RMat> {
    let n = a.nrows();
    let schur = Schur::try_new(a.clone(), f64::EPSILON, 10_000)
        .ok_or_else(|| GlmeError::numerical("lyapunov", "real Schur iteration did not converge"))?;
    let (u, t) = schur.unpack();
    // T Y + Y Tᵀ = C with C = -Uᵀ Q U
    let c = -(u.transpose() * q * &u);
    let blocks = schur_blocks(&t);
    let mut y = RMat::zeros(n, n);

    for bi in (0..blocks.len()).rev() {
        let (i0, p) = blocks[bi];
        for bj in (0..blocks.len()).rev() {
            let (j0, r) = blocks[bj];
            let mut rhs = c.view((i0, j0), (p, r)).clone_owned();
            // subtract Σ_{k>i} T_ik Y_kj
            let tail_i = i0 + p;
            if tail_i < n {
                rhs -= t.view((i0, tail_i), (p, n - tail_i)) * y.view((tail_i, j0), (n - tail_i, r));
            }
            // subtract Σ_{l>j} Y_il T_jlᵀ
            let tail_j = j0 + r;
            if tail_j < n {
                rhs -= y.view((i0, tail_j), (p, n - tail_j))
                    * t.view((j0, tail_j), (r, n - tail_j)).transpose();
            }
            let tii = t.view((i0, i0), (p, p)).clone_owned();
            let tjj = t.view((j0, j0), (r, r)).clone_owned();
            let block = small_sylvester(&tii, &tjj, &rhs)?;
            y.view_mut((i0, j0), (p, r)).copy_from(&block);
        }
    }
    Ok(&u * y * u.transpose())
}

/// Solve `P Y + Y Rᵀ = C` for blocks of size at most 2.
fn small_sylvester(p: &RMat, r: &RMat, c: &RMat) -> Result<RMat> {
    let (np, nr) = (p.nrows(), r.nrows());
    let dim = np * nr;
    let mut m = RMat::zeros(dim, dim);
    for j in 0..nr {
        for i in 0..np {
            let row = i + np * j;
            for k in 0..np {
                m[(row, k + np * j)] += p[(i, k)];
            }
            for l in 0..nr {
                m[(row, i + np * l)] += r[(j, l)];
            }
        }
    }
    let rhs = RVec::from_column_slice(c.as_slice());
    let lu = m.lu();
    let sol = lu.solve(&rhs).ok_or_else(|| {
        GlmeError::numerical(
            "lyapunov",
            "eigenvalues of A sum to zero; Lyapunov operator is singular",
        )
    })?;
    if sol.iter().any(|x| !x.is_finite()) {
        return Err(GlmeError::numerical("lyapunov", "non-finite Schur block solution"));
    }
    Ok(RMat::from_column_slice(np, nr, sol.as_slice()))
}

/// Gauss–Legendre nodes and weights on [-1, 1] (Golub–Welsch).
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    let mut jacobi = RMat::zeros(order, order);
    for k in 1..order {
        let kf = k as f64;
        let beta = kf / (4.0 * kf * kf - 1.0).sqrt();
        jacobi[(k, k - 1)] = beta;
        jacobi[(k - 1, k)] = beta;
    }
    let eig = SymmetricEigen::new(jacobi);
    let mut pairs: Vec<(f64, f64)> = (0..order)
        .map(|i| {
            let v0 = eig.eigenvectors[(0, i)];
            (eig.eigenvalues[i], 2.0 * v0 * v0)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}
