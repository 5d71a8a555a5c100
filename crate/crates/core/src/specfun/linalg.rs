use num_complex::Complex64;

use super::SpecfunError;

const HERMITIAN_TOL: f64 = 1e-12;

/// Dense square matrix equal to its own conjugate transpose, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    order: usize,
    entries: Vec<Complex64>,
}

impl HermitianMatrix {
    pub fn new(order: usize, entries: Vec<Complex64>) -> Result<Self, SpecfunError> {
        if order == 0 || entries.len() != order * order {
            return Err(SpecfunError::Shape {
                expected: order * order,
                actual: entries.len(),
            });
        }
        for i in 0..order {
            for j in i..order {
                let dev = (entries[i * order + j] - entries[j * order + i].conj()).norm();
                if !(dev <= HERMITIAN_TOL) {
                    return Err(SpecfunError::NotHermitian {
                        row: i,
                        col: j,
                        deviation: dev,
                    });
                }
            }
        }
        Ok(Self { order, entries })
    }

    /// Builds a real symmetric Toeplitz matrix whose first row is `row`.
    pub fn symmetric_toeplitz(row: &[f64]) -> Result<Self, SpecfunError> {
        let order = row.len();
        let mut entries = Vec::with_capacity(order * order);
        for i in 0..order {
            for j in 0..order {
                entries.push(Complex64::new(row[i.abs_diff(j)], 0.0));
            }
        }
        Self::new(order, entries)
    }

    pub fn identity(order: usize) -> Self {
        let mut entries = vec![Complex64::new(0.0, 0.0); order * order];
        for i in 0..order {
            entries[i * order + i] = Complex64::new(1.0, 0.0);
        }
        Self { order, entries }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.order + col]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    /// tr(A·A). For a Hermitian matrix this is the squared Frobenius norm.
    pub fn trace_of_square(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }
}

/// Lower-triangular factor produced by [`cholesky`], stored row-major with
/// explicit zeros above the diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct LowerTriangular {
    order: usize,
    entries: Vec<Complex64>,
    jitter: f64,
}

impl LowerTriangular {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.order + col]
    }

    /// Diagonal loading that was added before the factorization succeeded.
    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    /// Computes `G · v` into `out`.
    pub fn apply(&self, v: &[Complex64], out: &mut [Complex64]) {
        let n = self.order;
        assert_eq!(v.len(), n);
        assert_eq!(out.len(), n);
        for (i, o) in out.iter_mut().enumerate() {
            let row = &self.entries[i * n..i * n + i + 1];
            *o = row.iter().zip(&v[..=i]).map(|(g, x)| g * x).sum();
        }
    }

    /// G · Gᴴ, row-major.
    pub fn reconstruct(&self) -> Vec<Complex64> {
        let n = self.order;
        let mut out = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in 0..n {
                let k_max = i.min(j);
                out[i * n + j] = (0..=k_max).map(|k| self.get(i, k) * self.get(j, k).conj()).sum();
            }
        }
        out
    }
}

/// Cholesky factor G with G·Gᴴ = R.
///
/// Semi-definite inputs are retried with increasing diagonal loading, capped
/// at `1e-12 · order`. A pivot that stays non-positive at the cap is reported
/// as [`SpecfunError::NotPositiveSemidefinite`].
pub fn cholesky(r: &HermitianMatrix) -> Result<LowerTriangular, SpecfunError> {
    let n = r.order;
    let cap = 1e-12 * n as f64;
    let mut jitter = 0.0;
    loop {
        match factor(r, jitter) {
            Ok(entries) => {
                return Ok(LowerTriangular {
                    order: n,
                    entries,
                    jitter,
                })
            }
            Err((index, pivot)) => {
                if jitter >= cap {
                    return Err(SpecfunError::NotPositiveSemidefinite { index, pivot });
                }
                jitter = if jitter == 0.0 {
                    cap * 1e-4
                } else {
                    (jitter * 10.0).min(cap)
                };
            }
        }
    }
}

fn factor(r: &HermitianMatrix, jitter: f64) -> Result<Vec<Complex64>, (usize, f64)> {
    let n = r.order;
    let mut l = vec![Complex64::new(0.0, 0.0); n * n];
    for j in 0..n {
        let mut d = r.get(j, j).re + jitter;
        for k in 0..j {
            d -= l[j * n + k].norm_sqr();
        }
        if !(d > 0.0) {
            return Err((j, d));
        }
        let ljj = d.sqrt();
        l[j * n + j] = Complex64::new(ljj, 0.0);
        for i in j + 1..n {
            let mut s = r.get(i, j);
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k].conj();
            }
            l[i * n + j] = s / ljj;
        }
    }
    Ok(l)
}
