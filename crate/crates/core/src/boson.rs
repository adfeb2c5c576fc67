//! Normal-ordered polynomials in bosonic modes.
//!
//! A [`BosonPolynomial`] is a finite sum of monomials
//! `∏ a_i†^{p_i} ∏ a_i^{q_i}` with coefficients in Q(σ). Every value is kept
//! in normal order, so polynomial equality is plain map equality. Modes are
//! indexed from 0 in the API; display output numbers them from 1.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use num::{BigInt, One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cyclo::{CyclicSum, CycloField, CycloScalar, Rational};
use crate::error::{Error, Result};
use crate::hamiltonian::Representation;
use crate::xmatrix::ExactMatrix;

/// `∏_i a_i†^{creators[i]} · ∏_i a_i^{annihilators[i]}`.
///
/// Ordering is lexicographic on `(creators, annihilators)`, which fixes the
/// iteration and serialization order of polynomial terms.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ModeMonomial {
    creators: Vec<u32>,
    annihilators: Vec<u32>,
}

impl ModeMonomial {
    pub fn new(creators: Vec<u32>, annihilators: Vec<u32>) -> Result<Self> {
        if creators.len() != annihilators.len() {
            return Err(Error::ModeMismatch {
                left: creators.len(),
                right: annihilators.len(),
            });
        }
        if creators.is_empty() {
            return Err(Error::Malformed("monomial needs at least one mode".into()));
        }
        Ok(Self { creators, annihilators })
    }

    pub fn identity(n_modes: usize) -> Self {
        Self {
            creators: vec![0; n_modes],
            annihilators: vec![0; n_modes],
        }
    }

    /// a_i†
    pub fn creation(n_modes: usize, i: usize) -> Self {
        let mut m = Self::identity(n_modes);
        m.creators[i] = 1;
        m
    }

    /// a_i
    pub fn annihilation(n_modes: usize, i: usize) -> Self {
        let mut m = Self::identity(n_modes);
        m.annihilators[i] = 1;
        m
    }

    /// a_i†^p a_j^q.
    pub fn pair(n_modes: usize, i: usize, p: u32, j: usize, q: u32) -> Self {
        let mut m = Self::identity(n_modes);
        m.creators[i] += p;
        m.annihilators[j] += q;
        m
    }

    pub fn n_modes(&self) -> usize {
        self.creators.len()
    }

    pub fn creators(&self) -> &[u32] {
        &self.creators
    }

    pub fn annihilators(&self) -> &[u32] {
        &self.annihilators
    }

    pub fn creator_count(&self) -> u32 {
        self.creators.iter().sum()
    }

    pub fn annihilator_count(&self) -> u32 {
        self.annihilators.iter().sum()
    }

    pub fn degree(&self) -> u32 {
        self.creator_count() + self.annihilator_count()
    }

    pub fn is_identity(&self) -> bool {
        self.degree() == 0
    }

    /// Swaps creator and annihilator exponents; this is the adjoint of a
    /// normal-ordered monomial and is again normal-ordered.
    pub fn adjoint(&self) -> Self {
        Self {
            creators: self.annihilators.clone(),
            annihilators: self.creators.clone(),
        }
    }

    pub fn display_with<'a>(&'a self, label: &'a str) -> impl fmt::Display + 'a {
        MonomialDisplay { monomial: self, label }
    }
}

struct MonomialDisplay<'a> {
    monomial: &'a ModeMonomial,
    label: &'a str,
}

impl fmt::Display for MonomialDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = self.monomial;
        if m.is_identity() {
            return f.write_str("1");
        }
        let mut parts = Vec::new();
        for (dagger, exps) in [("†", &m.creators), ("", &m.annihilators)] {
            for (i, &e) in exps.iter().enumerate().filter(|(_, e)| **e > 0) {
                let mut s = format!("{}{}{}", self.label, i + 1, dagger);
                if e > 1 {
                    s.push_str(&format!("^{e}"));
                }
                parts.push(s);
            }
        }
        f.write_str(&parts.join(" "))
    }
}

impl fmt::Display for ModeMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.display_with("a").fmt(f)
    }
}

fn merge_sums(
    mut acc: HashMap<ModeMonomial, CyclicSum>,
    mut part: HashMap<ModeMonomial, CyclicSum>,
) -> HashMap<ModeMonomial, CyclicSum> {
    if acc.len() < part.len() {
        std::mem::swap(&mut acc, &mut part);
    }
    for (k, v) in part {
        acc.entry(k).and_modify(|a| a.add_assign(&v)).or_insert(v);
    }
    acc
}

fn factorial(k: u32) -> BigInt {
    (1..=k).fold(BigInt::one(), |acc, i| acc * i)
}

fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    (0..k).fold(BigInt::one(), |acc, i| acc * (n - i) / (i + 1))
}

/// Normal-ordered expansion of `m1 · m2` with integer coefficients.
///
/// Per mode, a^q a†^p = Σ_k k!·C(q,k)·C(p,k)·a†^{p−k} a^{q−k}; distinct modes
/// commute, so the full expansion is the Cartesian product of the per-mode
/// expansions.
pub fn normal_order_product(m1: &ModeMonomial, m2: &ModeMonomial) -> Result<Vec<(ModeMonomial, BigInt)>> {
    if m1.n_modes() != m2.n_modes() {
        return Err(Error::ModeMismatch {
            left: m1.n_modes(),
            right: m2.n_modes(),
        });
    }
    let n = m1.n_modes();
    let mut out = vec![(ModeMonomial::identity(n), BigInt::one())];
    for i in 0..n {
        let (p1, q1) = (m1.creators[i], m1.annihilators[i]);
        let (p2, q2) = (m2.creators[i], m2.annihilators[i]);
        let per_mode: Vec<(u32, u32, BigInt)> = (0..=q1.min(p2))
            .map(|k| {
                (
                    p1 + p2 - k,
                    q1 + q2 - k,
                    factorial(k) * binomial(q1, k) * binomial(p2, k),
                )
            })
            .collect();
        if per_mode.len() == 1 {
            for (m, _) in out.iter_mut() {
                m.creators[i] = per_mode[0].0;
                m.annihilators[i] = per_mode[0].1;
            }
            continue;
        }
        let mut next = Vec::with_capacity(out.len() * per_mode.len());
        for (m, c) in &out {
            for (p, q, w) in &per_mode {
                let mut m = m.clone();
                m.creators[i] = *p;
                m.annihilators[i] = *q;
                next.push((m, c * w));
            }
        }
        out = next;
    }
    Ok(out)
}

/// Normal-ordered expansion of `m1 · m2` as a polynomial over `field`.
pub fn monomial_product(m1: &ModeMonomial, m2: &ModeMonomial, field: &Arc<CycloField>) -> Result<BosonPolynomial> {
    let mut p = BosonPolynomial::zero(m1.n_modes(), field);
    for (m, c) in normal_order_product(m1, m2)? {
        p.add_term(m, field.from_rational(Rational::from_integer(c)));
    }
    Ok(p)
}

/// Finite linear combination of normal-ordered monomials.
#[derive(Clone, Debug)]
pub struct BosonPolynomial {
    n_modes: usize,
    field: Arc<CycloField>,
    terms: BTreeMap<ModeMonomial, CycloScalar>,
}

impl PartialEq for BosonPolynomial {
    fn eq(&self, other: &Self) -> bool {
        self.n_modes == other.n_modes && self.order() == other.order() && self.terms == other.terms
    }
}

impl Eq for BosonPolynomial {}

impl BosonPolynomial {
    pub fn zero(n_modes: usize, field: &Arc<CycloField>) -> Self {
        Self {
            n_modes,
            field: Arc::clone(field),
            terms: BTreeMap::new(),
        }
    }

    pub fn identity(n_modes: usize, field: &Arc<CycloField>) -> Self {
        Self::monomial(ModeMonomial::identity(n_modes), field.one())
    }

    pub fn monomial(m: ModeMonomial, coeff: CycloScalar) -> Self {
        let mut p = Self::zero(m.n_modes(), coeff.field());
        p.add_term(m, coeff);
        p
    }

    /// Builds a polynomial from (monomial, coefficient) pairs, summing repeats.
    pub fn from_terms(
        n_modes: usize,
        field: &Arc<CycloField>,
        terms: impl IntoIterator<Item = (ModeMonomial, CycloScalar)>,
    ) -> Result<Self> {
        let mut p = Self::zero(n_modes, field);
        for (m, c) in terms {
            p.check_monomial(&m)?;
            p.check_scalar(&c)?;
            p.add_term(m, c);
        }
        Ok(p)
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn field(&self) -> &Arc<CycloField> {
        &self.field
    }

    /// Order of the cyclotomic field holding the coefficients.
    pub fn order(&self) -> u32 {
        self.field.order()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in canonical (lexicographic) order.
    pub fn terms(&self) -> impl Iterator<Item = (&ModeMonomial, &CycloScalar)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &ModeMonomial) -> Option<&CycloScalar> {
        self.terms.get(m)
    }

    /// Adds `coeff·m`, dropping the entry if it cancels. Caller guarantees
    /// matching mode count and field.
    pub(crate) fn add_term(&mut self, m: ModeMonomial, coeff: CycloScalar) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get() + &coeff;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    /// Replaces the coefficient of `m` (removing it when zero).
    pub fn set_coefficient(&mut self, m: ModeMonomial, coeff: CycloScalar) -> Result<()> {
        self.check_monomial(&m)?;
        self.check_scalar(&coeff)?;
        if coeff.is_zero() {
            self.terms.remove(&m);
        } else {
            self.terms.insert(m, coeff);
        }
        Ok(())
    }

    fn check_monomial(&self, m: &ModeMonomial) -> Result<()> {
        if m.n_modes() != self.n_modes {
            return Err(Error::ModeMismatch {
                left: self.n_modes,
                right: m.n_modes(),
            });
        }
        Ok(())
    }

    fn check_scalar(&self, s: &CycloScalar) -> Result<()> {
        if s.order() != self.order() {
            return Err(Error::OrderMismatch {
                left: self.order(),
                right: s.order(),
            });
        }
        Ok(())
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.n_modes != other.n_modes {
            return Err(Error::ModeMismatch {
                left: self.n_modes,
                right: other.n_modes,
            });
        }
        if self.order() != other.order() {
            return Err(Error::OrderMismatch {
                left: self.order(),
                right: other.order(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.map_coeffs(|c| -c)
    }

    pub fn scale(&self, s: &CycloScalar) -> Result<Self> {
        self.check_scalar(s)?;
        if s.is_zero() {
            return Ok(Self::zero(self.n_modes, &self.field));
        }
        Ok(self.map_coeffs(|c| c * s))
    }

    pub fn scale_rational(&self, r: &Rational) -> Self {
        if r.is_zero() {
            return Self::zero(self.n_modes, &self.field);
        }
        self.map_coeffs(|c| c.scale(r))
    }

    fn map_coeffs(&self, f: impl Fn(&CycloScalar) -> CycloScalar) -> Self {
        Self {
            n_modes: self.n_modes,
            field: Arc::clone(&self.field),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), f(c))).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = Self::zero(self.n_modes, &self.field);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let c = c1 * c2;
                for (m, w) in normal_order_product(m1, m2)? {
                    let coeff = if w.is_one() {
                        c.clone()
                    } else {
                        c.scale(&Rational::from_integer(w))
                    };
                    out.add_term(m, coeff);
                }
            }
        }
        Ok(out)
    }

    /// Hermitian adjoint: swaps creator/annihilator exponents and conjugates
    /// coefficients.
    pub fn adjoint(&self) -> Self {
        Self {
            n_modes: self.n_modes,
            field: Arc::clone(&self.field),
            terms: self.terms.iter().map(|(m, c)| (m.adjoint(), c.conjugate())).collect(),
        }
    }

    pub fn is_hermitian(&self) -> bool {
        self.adjoint() == *self
    }

    /// `[self, other] = self·other − other·self`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.mul(other)?.sub(&other.mul(self)?)
    }

    /// True when every term has as many creators as annihilators.
    pub fn conserves_number(&self) -> bool {
        self.terms.keys().all(|m| m.creator_count() == m.annihilator_count())
    }

    /// Image of `self` under the linear mode map `a_i ↦ √s · Σ_j M_ij b_j`
    /// (and `a_i† ↦ √s · Σ_j conj(M_ij) b_j†`), with `√s` never formed.
    ///
    /// Each monomial of degree d picks up `s^{d/2}`, so every monomial must
    /// have even degree. Unitarity of `√s·M` is not checked; without it the
    /// result is still the formal image but the new modes fail the CCR.
    pub fn substitute_even(&self, matrix: &ExactMatrix, s: &Rational) -> Result<Self> {
        if matrix.n() != self.n_modes {
            return Err(Error::DimensionMismatch(format!(
                "{}-mode polynomial, {}x{} matrix",
                self.n_modes,
                matrix.n(),
                matrix.n()
            )));
        }
        if matrix.order() != self.order() {
            return Err(Error::OrderMismatch {
                left: self.order(),
                right: matrix.order(),
            });
        }
        if let Some(m) = self.terms.keys().find(|m| m.degree() % 2 == 1) {
            return Err(Error::OddDegree(m.clone()));
        }

        let n = self.n_modes;
        let order = self.order();
        let images = |conj: bool| -> Vec<Vec<(usize, CyclicSum)>> {
            (0..n)
                .map(|i| {
                    (0..n)
                        .filter_map(|j| {
                            let e = matrix.get(i, j);
                            let e = if conj { e.conjugate() } else { e.clone() };
                            (!e.is_zero()).then(|| (j, CyclicSum::lift(&e)))
                        })
                        .collect()
                })
                .collect()
        };
        let annihilator_images = images(false);
        let creator_images = images(true);

        let expand = |m: &ModeMonomial, c: &CycloScalar| -> HashMap<ModeMonomial, CyclicSum> {
            let mut states: HashMap<ModeMonomial, CyclicSum> = HashMap::new();
            states.insert(ModeMonomial::identity(n), CyclicSum::lift(c));
            let factors = m
                .creators
                .iter()
                .enumerate()
                .flat_map(|(i, &p)| std::iter::repeat_n((i, true), p as usize))
                .chain(
                    m.annihilators
                        .iter()
                        .enumerate()
                        .flat_map(|(i, &q)| std::iter::repeat_n((i, false), q as usize)),
                );
            // Creator images all precede annihilator images, so every
            // expanded product is already normal-ordered.
            for (i, is_creator) in factors {
                let image = if is_creator {
                    &creator_images[i]
                } else {
                    &annihilator_images[i]
                };
                let mut next: HashMap<ModeMonomial, CyclicSum> = HashMap::with_capacity(states.len() * image.len());
                for (key, value) in &states {
                    for (j, e) in image {
                        let mut key = key.clone();
                        if is_creator {
                            key.creators[*j] += 1;
                        } else {
                            key.annihilators[*j] += 1;
                        }
                        let v = value.mul(e);
                        next.entry(key).and_modify(|acc| acc.add_assign(&v)).or_insert(v);
                    }
                }
                states = next;
            }
            states
        };

        let terms: Vec<(&ModeMonomial, &CycloScalar)> = self.terms.iter().collect();
        let accumulated = terms
            .par_iter()
            .fold(HashMap::new, |acc, (m, c)| merge_sums(acc, expand(m, c)))
            .reduce(HashMap::new, merge_sums);

        let mut out = Self::zero(n, &self.field);
        let mut weights: HashMap<u32, Rational> = HashMap::new();
        for (m, v) in accumulated {
            if v.is_zero() {
                continue;
            }
            let half = m.degree() / 2;
            let w = weights.entry(half).or_insert_with(|| s.pow(half as i32));
            let coeff = v.scale(w).reduce(&self.field);
            debug_assert_eq!(coeff.order(), order);
            out.add_term(m, coeff);
        }
        Ok(out)
    }

    pub fn to_document(&self, rep: Representation) -> PolynomialDocument {
        PolynomialDocument {
            n_modes: self.n_modes,
            rep,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| TermDocument {
                    creators: m.creators.clone(),
                    annihilators: m.annihilators.clone(),
                    coeff: c.clone(),
                })
                .collect(),
        }
    }

    /// Rebuilds a polynomial from its JSON document. An empty polynomial
    /// takes its field order from the mode count.
    pub fn from_document(doc: &PolynomialDocument) -> Result<(Self, Representation)> {
        let field = match doc.terms.first() {
            Some(t) => Arc::clone(t.coeff.field()),
            None => CycloField::new(doc.n_modes as u32)?,
        };
        let terms = doc
            .terms
            .iter()
            .map(|t| {
                Ok((
                    ModeMonomial::new(t.creators.clone(), t.annihilators.clone())?,
                    t.coeff.clone(),
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((Self::from_terms(doc.n_modes, &field, terms)?, doc.rep))
    }

    pub fn display_with<'a>(&'a self, label: &'a str) -> impl fmt::Display + 'a {
        PolynomialDisplay { poly: self, label }
    }
}

struct PolynomialDisplay<'a> {
    poly: &'a BosonPolynomial,
    label: &'a str,
}

impl fmt::Display for PolynomialDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return f.write_str("0");
        }
        for (k, (m, c)) in self.poly.terms.iter().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "({c}) {}", m.display_with(self.label))?;
        }
        Ok(())
    }
}

impl fmt::Display for BosonPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.display_with("a").fmt(f)
    }
}

/// Σ_i a_i†a_i.
pub fn total_number(n_modes: usize, field: &Arc<CycloField>) -> BosonPolynomial {
    let mut p = BosonPolynomial::zero(n_modes, field);
    for i in 0..n_modes {
        p.add_term(ModeMonomial::pair(n_modes, i, 1, i, 1), field.one());
    }
    p
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TermDocument {
    pub creators: Vec<u32>,
    pub annihilators: Vec<u32>,
    pub coeff: CycloScalar,
}

/// JSON form of a polynomial; terms appear in canonical order.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PolynomialDocument {
    pub n_modes: usize,
    pub rep: Representation,
    pub terms: Vec<TermDocument>,
}
