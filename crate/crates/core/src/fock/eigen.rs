//! Cyclic Jacobi eigensolver for dense complex Hermitian matrices.

use num::complex::Complex64;

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// Column k (row-major `vectors[i * n + k]`) belongs to `values[k]`.
    pub vectors: Vec<Complex64>,
    pub dim: usize,
}

impl HermitianEigen {
    pub fn vector(&self, k: usize) -> Vec<Complex64> {
        (0..self.dim).map(|i| self.vectors[i * self.dim + k]).collect()
    }
}

const MAX_SWEEPS: usize = 100;

/// Diagonalizes the row-major Hermitian matrix `a` (n×n) by cyclic complex
/// Jacobi rotations. Only the Hermitian part of the input is used.
pub fn jacobi_hermitian(a: &[Complex64], n: usize) -> HermitianEigen {
    assert_eq!(a.len(), n * n);
    let mut m: Vec<Complex64> = a.to_vec();
    let mut v = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        v[i * n + i] = Complex64::new(1.0, 0.0);
        m[i * n + i] = Complex64::new(m[i * n + i].re, 0.0);
        for j in 0..i {
            let h = (m[i * n + j] + m[j * n + i].conj()) * 0.5;
            m[i * n + j] = h;
            m[j * n + i] = h.conj();
        }
    }

    let scale = m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let threshold = f64::EPSILON * f64::EPSILON * scale * scale;
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i * n + j].norm_sqr())
            .sum();
        if off <= threshold || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut m, &mut v, n, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[i * n + i].re.total_cmp(&m[j * n + j].re));
    let values = order.iter().map(|&k| m[k * n + k].re).collect();
    let mut vectors = vec![Complex64::new(0.0, 0.0); n * n];
    for (dst, &src) in order.iter().enumerate() {
        for i in 0..n {
            vectors[i * n + dst] = v[i * n + src];
        }
    }
    HermitianEigen {
        values,
        vectors,
        dim: n,
    }
}

/// Zeroes m[p][q] with the unitary J = diag(1, e^{−iφ})·R(θ) acting on
/// columns p, q, then applies J† on rows.
fn rotate(m: &mut [Complex64], v: &mut [Complex64], n: usize, p: usize, q: usize) {
    let g = m[p * n + q];
    let abs = g.norm();
    if abs == 0.0 {
        return;
    }
    let phase = g / abs;
    let app = m[p * n + p].re;
    let aqq = m[q * n + q].re;
    let tau: f64 = (aqq - app) / (2.0 * abs);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let pc = phase.conj();
    let (jpp, jpq) = (Complex64::new(c, 0.0), Complex64::new(s, 0.0));
    let (jqp, jqq) = (-pc * s, pc * c);

    for k in 0..n {
        let (x, y) = (m[k * n + p], m[k * n + q]);
        m[k * n + p] = x * jpp + y * jqp;
        m[k * n + q] = x * jpq + y * jqq;
    }
    for k in 0..n {
        let (x, y) = (m[p * n + k], m[q * n + k]);
        m[p * n + k] = jpp.conj() * x + jqp.conj() * y;
        m[q * n + k] = jpq.conj() * x + jqq.conj() * y;
    }
    m[p * n + q] = Complex64::new(0.0, 0.0);
    m[q * n + p] = Complex64::new(0.0, 0.0);
    m[p * n + p].im = 0.0;
    m[q * n + q].im = 0.0;

    for k in 0..n {
        let (x, y) = (v[k * n + p], v[k * n + q]);
        v[k * n + p] = x * jpp + y * jqp;
        v[k * n + q] = x * jpq + y * jqq;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn residual(a: &[Complex64], n: usize, eig: &HermitianEigen) -> f64 {
        (0..n)
            .map(|k| {
                let v = eig.vector(k);
                (0..n)
                    .map(|i| {
                        let av: Complex64 = (0..n).map(|j| a[i * n + j] * v[j]).sum();
                        (av - v[i] * eig.values[k]).norm_sqr()
                    })
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn diagonal_input() {
        let a = vec![
            c(2.0, 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(1.0, 0.0),
        ];
        assert_eq!(jacobi_hermitian(&a, 3).values, vec![0.0, 1.0, 2.0]);
    }

    #[test]
    fn pauli_x_and_y() {
        let x = vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)];
        let e = jacobi_hermitian(&x, 2);
        assert!((e.values[0] + 1.0).abs() < 1e-15 && (e.values[1] - 1.0).abs() < 1e-15);
        let y = vec![c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)];
        let e = jacobi_hermitian(&y, 2);
        assert!((e.values[0] + 1.0).abs() < 1e-15 && (e.values[1] - 1.0).abs() < 1e-15);
        assert!(residual(&y, 2, &e) < 1e-14);
    }

    fn hermitian(n: usize) -> impl Strategy<Value = Vec<Complex64>> {
        prop::collection::vec((-5.0f64..5.0, -5.0f64..5.0), n * n).prop_map(move |raw| {
            let mut a = vec![c(0.0, 0.0); n * n];
            for i in 0..n {
                for j in 0..=i {
                    let (re, im) = raw[i * n + j];
                    if i == j {
                        a[i * n + i] = c(re, 0.0);
                    } else {
                        a[i * n + j] = c(re, im);
                        a[j * n + i] = c(re, -im);
                    }
                }
            }
            a
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn residuals_and_trace(a in (1usize..=12).prop_flat_map(hermitian)) {
            let n = (a.len() as f64).sqrt() as usize;
            let eig = jacobi_hermitian(&a, n);
            let norm = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt().max(1.0);
            prop_assert!(residual(&a, n, &eig) <= 1e-9 * norm);
            let trace: f64 = (0..n).map(|i| a[i * n + i].re).sum();
            prop_assert!((eig.values.iter().sum::<f64>() - trace).abs() < 1e-9 * norm);
            prop_assert!(eig.values.windows(2).all(|w| w[0] <= w[1]));
        }
    }
}
