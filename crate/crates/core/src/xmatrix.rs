//! Exact n×n matrices over Q(σ): generalized Pauli matrices, the
//! unnormalized Fourier matrix F = √n·W, and the reversal permutation
//! K = W².

use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::boson::{BosonPolynomial, ModeMonomial};
use crate::cyclo::{CycloField, CycloScalar, Rational};
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct ExactMatrix {
    n: usize,
    field: Arc<CycloField>,
    /// Row-major.
    entries: Vec<CycloScalar>,
}

impl PartialEq for ExactMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.entries == other.entries
    }
}

impl Eq for ExactMatrix {}

impl ExactMatrix {
    pub fn from_fn(n: usize, field: &Arc<CycloField>, f: impl Fn(usize, usize) -> CycloScalar) -> Self {
        let entries = (0..n * n).map(|k| f(k / n, k % n)).collect();
        Self {
            n,
            field: Arc::clone(field),
            entries,
        }
    }

    pub fn identity(n: usize, field: &Arc<CycloField>) -> Self {
        Self::from_fn(n, field, |i, j| if i == j { field.one() } else { field.zero() })
    }

    /// 0/1 matrix with a one at (i, j) exactly when `pred(i, j)`.
    fn indicator(n: u32, pred: impl Fn(usize, usize) -> bool) -> Result<Self> {
        let field = CycloField::new(n)?;
        let (one, zero) = (field.one(), field.zero());
        Ok(Self::from_fn(n as usize, &field, |i, j| {
            if pred(i, j) {
                one.clone()
            } else {
                zero.clone()
            }
        }))
    }

    /// Cyclic shift Σ₁: entry (i, j) is 1 iff i ≡ j + 1 (mod n).
    pub fn sigma1(n: u32) -> Result<Self> {
        let m = n as usize;
        Self::indicator(n, |i, j| i == (j + 1) % m)
    }

    /// Clock matrix Σ₃ = diag(1, σ, …, σⁿ⁻¹).
    pub fn sigma3(n: u32) -> Result<Self> {
        let field = CycloField::new(n)?;
        Ok(Self::from_fn(n as usize, &field, |i, j| {
            if i == j {
                field.sigma_power(i as i64)
            } else {
                field.zero()
            }
        }))
    }

    /// F with F_{jk} = σ^{−jk} (0-based), so W = F/√n.
    pub fn fourier_unnormalized(n: u32) -> Result<Self> {
        let field = CycloField::new(n)?;
        Ok(Self::from_fn(n as usize, &field, |j, k| {
            field.sigma_power(-((j * k) as i64))
        }))
    }

    /// K = W²: fixes the first index and reverses the rest.
    pub fn reversal_permutation(n: u32) -> Result<Self> {
        let m = n as usize;
        Self::indicator(n, |i, j| (i + j) % m == 0)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> u32 {
        self.field.order()
    }

    pub fn field(&self) -> &Arc<CycloField> {
        &self.field
    }

    pub fn get(&self, i: usize, j: usize) -> &CycloScalar {
        &self.entries[i * self.n + j]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[CycloScalar]> {
        self.entries.chunks(self.n)
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.n, self.n, other.n, other.n
            )));
        }
        if self.order() != other.order() {
            return Err(Error::OrderMismatch {
                left: self.order(),
                right: other.order(),
            });
        }
        Ok(())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let n = self.n;
        Ok(Self::from_fn(n, &self.field, |i, k| {
            let mut acc = self.field.zero();
            for j in 0..n {
                let (a, b) = (self.get(i, j), other.get(j, k));
                if !a.is_zero() && !b.is_zero() {
                    acc = &acc + &(a * b);
                }
            }
            acc
        }))
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::identity(self.n, &self.field), |acc, _| {
            acc.mul(self).expect("same shape")
        })
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.n, &self.field, |i, j| self.get(j, i).conjugate())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, &self.field, |i, j| self.get(j, i).clone())
    }

    pub fn scale_rational(&self, r: &Rational) -> Self {
        Self::from_fn(self.n, &self.field, |i, j| self.get(i, j).scale(r))
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.n, &self.field)
    }

    /// Σ_{k,l} P_kl α_k α_l, an annihilator-only quadratic. The two orderings
    /// of a pair are the same monomial, so P and Pᵗ give the same result.
    pub fn quadratic_form(&self) -> BosonPolynomial {
        let n = self.n;
        let mut p = BosonPolynomial::zero(n, &self.field);
        for k in 0..n {
            for l in 0..n {
                let c = self.get(k, l);
                if c.is_zero() {
                    continue;
                }
                let mut ann = vec![0; n];
                ann[k] += 1;
                ann[l] += 1;
                p.add_term(ModeMonomial::new(vec![0; n], ann).expect("n >= 1"), c.clone());
            }
        }
        p
    }

    /// Σ_{i,j} P_ij a_i† a_j.
    pub fn bilinear_form(&self) -> BosonPolynomial {
        let n = self.n;
        let mut p = BosonPolynomial::zero(n, &self.field);
        for i in 0..n {
            for j in 0..n {
                let c = self.get(i, j);
                if !c.is_zero() {
                    p.add_term(ModeMonomial::pair(n, i, 1, j, 1), c.clone());
                }
            }
        }
        p
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    n: usize,
    rows: Vec<Vec<CycloScalar>>,
}

impl Serialize for ExactMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        MatrixRepr {
            n: self.n,
            rows: self.rows().map(<[CycloScalar]>::to_vec).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ExactMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = MatrixRepr::deserialize(deserializer)?;
        let n = repr.n;
        if repr.rows.len() != n || repr.rows.iter().any(|r| r.len() != n) || n == 0 {
            return Err(D::Error::custom("matrix must be square with n rows of n entries"));
        }
        let field = Arc::clone(repr.rows[0][0].field());
        if repr.rows.iter().flatten().any(|c| c.order() != field.order()) {
            return Err(D::Error::custom("matrix entries have mixed orders"));
        }
        let entries = repr.rows.into_iter().flatten().collect();
        Ok(Self { n, field, entries })
    }
}
