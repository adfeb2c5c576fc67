//! Exact arithmetic in the cyclotomic field Q(σ), σ = exp(2πi/n).
//!
//! Elements are stored as rational polynomials in σ of degree below φ(n),
//! fully reduced modulo the n-th cyclotomic polynomial Φₙ. The reduction is
//! canonical, so two scalars are equal exactly when their coefficient vectors
//! are.

use std::fmt;
use std::num::NonZeroU32;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::Arc;

use num::complex::Complex64;
use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always kept in lowest terms with a positive
/// denominator.
pub type Rational = BigRational;

/// Parses `"p/q"` or a bare integer. Decimal and exponent notation are
/// rejected so that couplings stay exact.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let trimmed = text.trim();
    if trimmed.is_empty() || trimmed.contains(['.', 'e', 'E']) {
        return Err(Error::InvalidRational(text.to_string()));
    }
    Rational::from_str(trimmed).map_err(|_| Error::InvalidRational(text.to_string()))
}

pub fn rational(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

/// Coefficients of Φₙ, lowest degree first, via
/// Φₙ = (xⁿ − 1) / ∏_{d | n, d < n} Φ_d.
pub fn cyclotomic_polynomial(n: NonZeroU32) -> Vec<BigInt> {
    let n = n.get() as usize;
    let mut numerator = vec![BigInt::zero(); n + 1];
    numerator[0] = -BigInt::one();
    numerator[n] = BigInt::one();
    for d in (1..n).filter(|d| n.is_multiple_of(*d)) {
        let divisor = cyclotomic_polynomial(NonZeroU32::new(d as u32).unwrap());
        numerator = div_exact_monic(&numerator, &divisor);
    }
    numerator
}

/// Quotient of `num / den` for monic `den`; the remainder must vanish.
fn div_exact_monic(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let dd = den.len() - 1;
    debug_assert!(den[dd].is_one());
    let mut rem = num.to_vec();
    let qlen = num.len() - dd;
    let mut quot = vec![BigInt::zero(); qlen];
    for k in (0..qlen).rev() {
        let c = rem[k + dd].clone();
        if c.is_zero() {
            continue;
        }
        for (i, d) in den.iter().enumerate() {
            rem[k + i] -= &c * d;
        }
        quot[k] = c;
    }
    debug_assert!(rem.iter().all(Zero::is_zero), "inexact cyclotomic division");
    quot
}

/// Shared reduction data for one field order.
#[derive(Debug)]
pub struct CycloField {
    order: u32,
    modulus: Vec<BigInt>,
    /// σᵏ mod Φₙ for k in 0..n.
    powers: Vec<Vec<BigInt>>,
}

impl CycloField {
    pub fn new(order: u32) -> Result<Arc<Self>> {
        if order < 2 {
            return Err(Error::InvalidOrder(order));
        }
        let modulus = cyclotomic_polynomial(NonZeroU32::new(order).unwrap());
        let degree = modulus.len() - 1;
        let mut powers = Vec::with_capacity(order as usize);
        let mut current = vec![BigInt::zero(); degree];
        current[0] = BigInt::one();
        for _ in 0..order {
            powers.push(current.clone());
            // multiply by σ, folding the top coefficient back through Φₙ
            let top = current.pop().unwrap();
            current.insert(0, BigInt::zero());
            if !top.is_zero() {
                for (c, m) in current.iter_mut().zip(&modulus) {
                    *c -= &top * m;
                }
            }
        }
        Ok(Arc::new(Self { order, modulus, powers }))
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// φ(n), the dimension of the field over Q.
    pub fn degree(&self) -> usize {
        self.modulus.len() - 1
    }

    pub fn modulus(&self) -> &[BigInt] {
        &self.modulus
    }

    pub fn zero(self: &Arc<Self>) -> CycloScalar {
        CycloScalar {
            field: Arc::clone(self),
            coeffs: vec![Rational::zero(); self.degree()],
        }
    }

    pub fn one(self: &Arc<Self>) -> CycloScalar {
        self.from_rational(Rational::one())
    }

    pub fn from_rational(self: &Arc<Self>, r: Rational) -> CycloScalar {
        let mut s = self.zero();
        s.coeffs[0] = r;
        s
    }

    pub fn from_integer(self: &Arc<Self>, k: i64) -> CycloScalar {
        self.from_rational(Rational::from_integer(k.into()))
    }

    /// σᵏ for any integer k (taken mod n).
    pub fn sigma_power(self: &Arc<Self>, k: i64) -> CycloScalar {
        let e = k.rem_euclid(self.order as i64) as usize;
        CycloScalar {
            field: Arc::clone(self),
            coeffs: self.powers[e].iter().cloned().map(Rational::from_integer).collect(),
        }
    }

    /// cos(2πk/n) = (σᵏ + σ⁻ᵏ)/2.
    pub fn cos_two_pi(self: &Arc<Self>, k: i64) -> CycloScalar {
        (&self.sigma_power(k) + &self.sigma_power(-k)).scale(&rational(1, 2))
    }

    /// Reduces Σ c_e σ^e (exponents taken mod n) to canonical form.
    pub fn reduce_cyclic(self: &Arc<Self>, cyclic: &[Rational]) -> CycloScalar {
        self.reduce_terms(cyclic.iter().enumerate())
    }

    /// Sparse form of [`reduce_cyclic`](Self::reduce_cyclic).
    pub fn reduce_terms<'a>(self: &Arc<Self>, terms: impl IntoIterator<Item = (usize, &'a Rational)>) -> CycloScalar {
        let degree = self.degree();
        let n = self.order as usize;
        let mut coeffs = vec![Rational::zero(); degree];
        for (e, c) in terms {
            if c.is_zero() {
                continue;
            }
            let e = e % n;
            if e < degree {
                coeffs[e] += c;
            } else {
                for (acc, p) in coeffs.iter_mut().zip(&self.powers[e]) {
                    if !p.is_zero() {
                        *acc += c * p;
                    }
                }
            }
        }
        CycloScalar {
            field: Arc::clone(self),
            coeffs,
        }
    }

    /// Builds a scalar from canonical coefficients (length φ(n)).
    pub fn from_coeffs(self: &Arc<Self>, coeffs: Vec<Rational>) -> Result<CycloScalar> {
        if coeffs.len() != self.degree() {
            return Err(Error::LengthMismatch(coeffs.len(), self.degree()));
        }
        Ok(CycloScalar {
            field: Arc::clone(self),
            coeffs,
        })
    }
}

/// σᵏ in the field of order n.
pub fn sigma_power(n: u32, k: i64) -> Result<CycloScalar> {
    Ok(CycloField::new(n)?.sigma_power(k))
}

/// An element of Q(σ).
#[derive(Clone)]
pub struct CycloScalar {
    field: Arc<CycloField>,
    coeffs: Vec<Rational>,
}

impl CycloScalar {
    pub fn field(&self) -> &Arc<CycloField> {
        &self.field
    }

    pub fn order(&self) -> u32 {
        self.field.order
    }

    /// Coefficient of σᵏ, k < φ(n).
    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(Zero::is_zero)
    }

    /// The rational value when the scalar lies in Q.
    pub fn as_rational(&self) -> Option<&Rational> {
        self.coeffs[1..].iter().all(Zero::is_zero).then(|| &self.coeffs[0])
    }

    fn check_order(&self, other: &Self) -> Result<()> {
        if self.order() != other.order() {
            return Err(Error::OrderMismatch {
                left: self.order(),
                right: other.order(),
            });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_order(other)?;
        Ok(self.add_same_field(other))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.check_order(other)?;
        Ok(self.add_same_field(&-other))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check_order(other)?;
        Ok(self.mul_same_field(other))
    }

    fn add_same_field(&self, other: &Self) -> Self {
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Self {
            field: Arc::clone(&self.field),
            coeffs,
        }
    }

    fn mul_same_field(&self, other: &Self) -> Self {
        let n = self.field.order as usize;
        let mut cyclic = vec![Rational::zero(); n];
        for (i, a) in self.coeffs.iter().enumerate().filter(|(_, a)| !a.is_zero()) {
            for (j, b) in other.coeffs.iter().enumerate().filter(|(_, b)| !b.is_zero()) {
                cyclic[(i + j) % n] += a * b;
            }
        }
        self.field.reduce_cyclic(&cyclic)
    }

    pub fn scale(&self, r: &Rational) -> Self {
        Self {
            field: Arc::clone(&self.field),
            coeffs: self.coeffs.iter().map(|c| c * r).collect(),
        }
    }

    /// Complex conjugation, the automorphism σ ↦ σⁿ⁻¹.
    pub fn conjugate(&self) -> Self {
        let n = self.field.order as usize;
        let mut cyclic = vec![Rational::zero(); n];
        for (k, c) in self.coeffs.iter().enumerate() {
            cyclic[(n - k) % n] = c.clone();
        }
        self.field.reduce_cyclic(&cyclic)
    }

    pub fn to_complex(&self) -> Complex64 {
        let n = self.field.order as f64;
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| {
                let theta = 2.0 * std::f64::consts::PI * k as f64 / n;
                Complex64::from_polar(1.0, theta) * c.to_f64().unwrap_or(f64::NAN)
            })
            .sum()
    }
}

impl PartialEq for CycloScalar {
    fn eq(&self, other: &Self) -> bool {
        self.order() == other.order() && self.coeffs == other.coeffs
    }
}

impl Eq for CycloScalar {}

// The operator impls panic on mixed orders; use the checked_* methods when
// the operands come from different sources.
impl Add for &CycloScalar {
    type Output = CycloScalar;
    fn add(self, rhs: Self) -> CycloScalar {
        self.checked_add(rhs).expect("scalar order mismatch")
    }
}

impl Sub for &CycloScalar {
    type Output = CycloScalar;
    fn sub(self, rhs: Self) -> CycloScalar {
        self.checked_sub(rhs).expect("scalar order mismatch")
    }
}

impl Mul for &CycloScalar {
    type Output = CycloScalar;
    fn mul(self, rhs: Self) -> CycloScalar {
        self.checked_mul(rhs).expect("scalar order mismatch")
    }
}

impl Neg for &CycloScalar {
    type Output = CycloScalar;
    fn neg(self) -> CycloScalar {
        CycloScalar {
            field: Arc::clone(&self.field),
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Neg for CycloScalar {
    type Output = CycloScalar;
    fn neg(self) -> CycloScalar {
        -&self
    }
}

impl fmt::Debug for CycloScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CycloScalar[n={}]({})", self.order(), self)
    }
}

impl fmt::Display for CycloScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let mag = c.abs();
            match k {
                0 => write!(f, "{mag}")?,
                _ => {
                    if !mag.is_one() {
                        write!(f, "{mag}*")?;
                    }
                    if k == 1 {
                        f.write_str("σ")?;
                    } else {
                        write!(f, "σ^{k}")?;
                    }
                }
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

/// An element of the group algebra Q[x]/(xⁿ − 1), stored sparsely.
///
/// Reduction to Q(σ) is a ring homomorphism from this algebra, so long
/// products can be accumulated here with plain exponent arithmetic and
/// reduced mod Φₙ once at the end.
#[derive(Clone, Debug, PartialEq)]
pub struct CyclicSum {
    order: u32,
    /// (exponent, coefficient), sorted by exponent, no zero coefficients.
    terms: Vec<(u32, Rational)>,
}

impl CyclicSum {
    pub fn zero(n: u32) -> Self {
        Self {
            order: n,
            terms: Vec::new(),
        }
    }

    pub fn one(n: u32) -> Self {
        Self::power(n, 0, Rational::one())
    }

    /// c·xᵉ.
    pub fn power(n: u32, e: i64, c: Rational) -> Self {
        let terms = if c.is_zero() {
            Vec::new()
        } else {
            vec![(e.rem_euclid(n as i64) as u32, c)]
        };
        Self { order: n, terms }
    }

    /// Lifts the canonical representative of a scalar.
    pub fn lift(s: &CycloScalar) -> Self {
        let terms = s
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| (k as u32, c.clone()))
            .collect();
        Self {
            order: s.order(),
            terms,
        }
    }

    fn from_unsorted(order: u32, mut raw: Vec<(u32, Rational)>) -> Self {
        raw.sort_by_key(|(e, _)| *e);
        let mut terms: Vec<(u32, Rational)> = Vec::with_capacity(raw.len());
        for (e, c) in raw {
            match terms.last_mut() {
                Some((last, acc)) if *last == e => *acc += c,
                _ => terms.push((e, c)),
            }
        }
        terms.retain(|(_, c)| !c.is_zero());
        Self { order, terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.order;
        let mut raw = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (i, a) in &self.terms {
            for (j, b) in &other.terms {
                raw.push(((i + j) % n, a * b));
            }
        }
        if raw.len() <= 1 {
            return Self { order: n, terms: raw };
        }
        Self::from_unsorted(n, raw)
    }

    pub fn add_assign(&mut self, other: &Self) {
        if other.terms.is_empty() {
            return;
        }
        if self.terms.len() == 1 && other.terms.len() == 1 && self.terms[0].0 == other.terms[0].0 {
            self.terms[0].1 += &other.terms[0].1;
            if self.terms[0].1.is_zero() {
                self.terms.clear();
            }
            return;
        }
        let mut raw = std::mem::take(&mut self.terms);
        raw.extend(other.terms.iter().cloned());
        *self = Self::from_unsorted(self.order, raw);
    }

    pub fn scale(&self, r: &Rational) -> Self {
        if r.is_zero() {
            return Self::zero(self.order);
        }
        Self {
            order: self.order,
            terms: self.terms.iter().map(|(e, c)| (*e, c * r)).collect(),
        }
    }

    pub fn reduce(&self, field: &Arc<CycloField>) -> CycloScalar {
        field.reduce_terms(self.terms.iter().map(|(e, c)| (*e as usize, c)))
    }
}

#[derive(Serialize, Deserialize)]
struct ScalarRepr {
    n: u32,
    coeffs: Vec<[String; 2]>,
}

pub(crate) fn rational_to_pair(r: &Rational) -> [String; 2] {
    [r.numer().to_string(), r.denom().to_string()]
}

pub(crate) fn rational_from_pair(pair: &[String; 2]) -> Result<Rational> {
    let num = BigInt::from_str(&pair[0]).map_err(|_| Error::Malformed(pair[0].clone()))?;
    let den = BigInt::from_str(&pair[1]).map_err(|_| Error::Malformed(pair[1].clone()))?;
    if den.is_zero() {
        return Err(Error::Malformed("zero denominator".into()));
    }
    Ok(Rational::new(num, den))
}

impl Serialize for CycloScalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        ScalarRepr {
            n: self.order(),
            coeffs: self.coeffs.iter().map(rational_to_pair).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CycloScalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = ScalarRepr::deserialize(deserializer)?;
        let field = CycloField::new(repr.n).map_err(D::Error::custom)?;
        let coeffs = repr
            .coeffs
            .iter()
            .map(rational_from_pair)
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        field.from_coeffs(coeffs).map_err(D::Error::custom)
    }
}
