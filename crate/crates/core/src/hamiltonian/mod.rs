//! Bose–Hubbard ring Hamiltonian in the site and flow representations.
//!
//! Site form:
//!
//! ```text
//! H = −J Σ_i (a_{i+1}† a_i + h.c.) + (U/2) Σ_i a_i†² a_i²,   a_{n+1} ≡ a_1
//! ```
//!
//! Flow modes are α = W†a with W = F/√n. In these modes the hopping is
//! diagonal, `−2J Σ_k cos(2πk/n) α_k†α_k`, and the on-site interaction is
//!
//! ```text
//! Σ_i a_i†² a_i² = (1/n) Σ_j Q_j† Q_j,   Q_j = αᵗ K Σ₁ʲ α,   K = W².
//! ```
//!
//! Everything here is exact; [`verify_fundamental_formula`] and
//! [`verify_flow_representation`] check the identities term by term for a
//! given ring size.

mod golden;

use std::sync::Arc;

use num::One;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boson::{BosonPolynomial, ModeMonomial, PolynomialDocument};
use crate::cyclo::{parse_rational, CycloField, CycloScalar, Rational};
use crate::error::{Error, Result};
use crate::xmatrix::ExactMatrix;

pub use golden::{transcribed_special_case, SpecialCase, SPECIAL_CASE_SIZES};

/// Which set of modes a polynomial is written in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Representation {
    Site,
    Flow,
}

impl Representation {
    /// Mode symbol used in text output.
    pub fn label(self) -> &'static str {
        match self {
            Representation::Site => "a",
            Representation::Flow => "α",
        }
    }
}

/// Ring size and exact couplings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HamiltonianParams {
    n: u32,
    hopping: Rational,
    interaction: Rational,
}

impl HamiltonianParams {
    pub fn new(n: u32, hopping: Rational, interaction: Rational) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidOrder(n));
        }
        Ok(Self {
            n,
            hopping,
            interaction,
        })
    }

    /// Convenience constructor for `J = j_num/j_den`, `U = u_num/u_den`.
    pub fn from_ratios(n: u32, j: (i64, i64), u: (i64, i64)) -> Result<Self> {
        Self::new(n, crate::cyclo::rational(j.0, j.1), crate::cyclo::rational(u.0, u.1))
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn modes(&self) -> usize {
        self.n as usize
    }

    /// J
    pub fn hopping(&self) -> &Rational {
        &self.hopping
    }

    /// U
    pub fn interaction(&self) -> &Rational {
        &self.interaction
    }

    pub fn field(&self) -> Arc<CycloField> {
        CycloField::new(self.n).expect("n >= 2 checked at construction")
    }
}

fn field_for(n: u32) -> Result<Arc<CycloField>> {
    CycloField::new(n)
}

/// Σ_i a_i†² a_i².
pub fn onsite_interaction(n: u32) -> Result<BosonPolynomial> {
    let field = field_for(n)?;
    let m = n as usize;
    BosonPolynomial::from_terms(
        m,
        &field,
        (0..m).map(|i| (ModeMonomial::pair(m, i, 2, i, 2), field.one())),
    )
}

/// Σ_i a_{i+1}† a_i = a†Σ₁a.
fn ring_hop(n: u32) -> Result<BosonPolynomial> {
    Ok(ExactMatrix::sigma1(n)?.bilinear_form())
}

fn site_hopping(params: &HamiltonianParams) -> Result<BosonPolynomial> {
    let hop = ring_hop(params.n)?;
    Ok(hop.add(&hop.adjoint())?.scale_rational(&-params.hopping.clone()))
}

fn site_interaction(params: &HamiltonianParams) -> Result<BosonPolynomial> {
    Ok(onsite_interaction(params.n)?.scale_rational(&(&params.interaction / Rational::from_integer(2.into()))))
}

/// Site Hamiltonian, assembled from the Σ₁ sandwich `−J(a†Σ₁a + h.c.)`.
pub fn build_site(params: &HamiltonianParams) -> Result<BosonPolynomial> {
    site_hopping(params)?.add(&site_interaction(params)?)
}

/// Site Hamiltonian written out bond by bond, `Σ_{i=1}^{n} a_{i+1}†a_i`.
/// At n = 2 both terms of the sum land on the same bond and are kept.
pub fn build_site_explicit(params: &HamiltonianParams) -> Result<BosonPolynomial> {
    let field = params.field();
    let m = params.modes();
    let minus_j = field.from_rational(-params.hopping.clone());
    let half_u = field.from_rational(&params.interaction / Rational::from_integer(2.into()));
    let mut terms = Vec::new();
    for i in 0..m {
        let next = (i + 1) % m;
        terms.push((ModeMonomial::pair(m, next, 1, i, 1), minus_j.clone()));
        terms.push((ModeMonomial::pair(m, i, 1, next, 1), minus_j.clone()));
        terms.push((ModeMonomial::pair(m, i, 2, i, 2), half_u.clone()));
    }
    BosonPolynomial::from_terms(m, &field, terms)
}

/// Diagonal flow hopping `−2J Σ_k cos(2πk/n) α_k†α_k`, with the cosines kept
/// exactly as (σᵏ + σ⁻ᵏ)/2.
pub fn build_flow_hopping(params: &HamiltonianParams) -> Result<BosonPolynomial> {
    let field = params.field();
    let m = params.modes();
    let scale = Rational::from_integer((-2).into()) * &params.hopping;
    let terms = (0..m).map(|k| {
        (
            ModeMonomial::pair(m, k, 1, k, 1),
            field.cos_two_pi(k as i64).scale(&scale),
        )
    });
    BosonPolynomial::from_terms(m, &field, terms)
}

/// The pair forms Q_j = αᵗ K Σ₁ʲ α for j = 0..n.
pub fn pair_forms(n: u32) -> Result<Vec<BosonPolynomial>> {
    let k = ExactMatrix::reversal_permutation(n)?;
    let shift = ExactMatrix::sigma1(n)?;
    let mut power = ExactMatrix::identity(n as usize, k.field());
    let mut forms = Vec::with_capacity(n as usize);
    for _ in 0..n {
        forms.push(k.mul(&power)?.quadratic_form());
        power = power.mul(&shift)?;
    }
    Ok(forms)
}

/// Right-hand side of the on-site identity, `(1/n) Σ_j Q_j† Q_j`.
pub fn fundamental_formula_flow_side(n: u32) -> Result<BosonPolynomial> {
    let forms = pair_forms(n)?;
    let squares = forms
        .par_iter()
        .map(|q| q.adjoint().mul(q))
        .collect::<Result<Vec<_>>>()?;
    let field = field_for(n)?;
    let mut total = BosonPolynomial::zero(n as usize, &field);
    for s in &squares {
        total = total.add(s)?;
    }
    Ok(total.scale_rational(&Rational::new(One::one(), n.into())))
}

/// `(U/2)(1/n) Σ_j Q_j† Q_j`.
pub fn build_flow_interaction(params: &HamiltonianParams) -> Result<BosonPolynomial> {
    let half_u = &params.interaction / Rational::from_integer(2.into());
    Ok(fundamental_formula_flow_side(params.n)?.scale_rational(&half_u))
}

pub fn build_flow(params: &HamiltonianParams) -> Result<BosonPolynomial> {
    build_flow_hopping(params)?.add(&build_flow_interaction(params)?)
}

/// Rewrites a flow-mode polynomial in site modes via α_k = (1/√n) Σ_i σ^{ki} a_i.
pub fn flow_to_site(p: &BosonPolynomial) -> Result<BosonPolynomial> {
    let n = p.n_modes() as u32;
    let f_dagger = ExactMatrix::fourier_unnormalized(n)?.adjoint();
    p.substitute_even(&f_dagger, &Rational::new(One::one(), n.into()))
}

/// First coefficient disagreement between two polynomials.
#[derive(Clone, Debug, PartialEq)]
pub struct Mismatch {
    pub monomial: ModeMonomial,
    pub lhs: CycloScalar,
    pub rhs: CycloScalar,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerificationReport {
    pub identity: String,
    pub n: u32,
    pub passed: bool,
    pub first_mismatch: Option<Mismatch>,
    /// Term counts of the two sides.
    pub term_counts: (usize, usize),
}

impl VerificationReport {
    /// Compares two polynomials coefficient by coefficient and records the
    /// lexicographically first monomial where they differ.
    pub fn compare(identity: &str, n: u32, lhs: &BosonPolynomial, rhs: &BosonPolynomial) -> Self {
        let first_mismatch = first_mismatch(lhs, rhs);
        Self {
            identity: identity.to_string(),
            n,
            passed: first_mismatch.is_none(),
            first_mismatch,
            term_counts: (lhs.len(), rhs.len()),
        }
    }

    pub fn to_document(&self) -> ReportDocument {
        ReportDocument {
            identity: self.identity.clone(),
            n: self.n,
            passed: self.passed,
            mismatch: self.first_mismatch.as_ref().map(|m| MismatchDocument {
                monomial: m.monomial.clone(),
                lhs: m.lhs.clone(),
                rhs: m.rhs.clone(),
            }),
            term_counts: [self.term_counts.0, self.term_counts.1],
        }
    }
}

impl std::fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let status = if self.passed { "passed" } else { "FAILED" };
        write!(
            f,
            "n={} {}: {} ({} vs {} terms)",
            self.n, self.identity, status, self.term_counts.0, self.term_counts.1
        )?;
        if let Some(m) = &self.first_mismatch {
            write!(f, "; first mismatch at {}: lhs {} rhs {}", m.monomial, m.lhs, m.rhs)?;
        }
        Ok(())
    }
}

fn first_mismatch(lhs: &BosonPolynomial, rhs: &BosonPolynomial) -> Option<Mismatch> {
    if lhs.n_modes() != rhs.n_modes() || lhs.order() != rhs.order() {
        let field = lhs.field();
        return Some(Mismatch {
            monomial: ModeMonomial::identity(lhs.n_modes()),
            lhs: field.zero(),
            rhs: field.zero(),
        });
    }
    let zero = lhs.field().zero();
    let mut l = lhs.terms().peekable();
    let mut r = rhs.terms().peekable();
    loop {
        let (m, a, b) = match (l.peek(), r.peek()) {
            (None, None) => return None,
            (Some(&(m, a)), None) => {
                l.next();
                (m, a, &zero)
            }
            (None, Some(&(m, b))) => {
                r.next();
                (m, &zero, b)
            }
            (Some(&(ml, a)), Some(&(mr, b))) => match ml.cmp(mr) {
                std::cmp::Ordering::Less => {
                    l.next();
                    (ml, a, &zero)
                }
                std::cmp::Ordering::Greater => {
                    r.next();
                    (mr, &zero, b)
                }
                std::cmp::Ordering::Equal => {
                    l.next();
                    r.next();
                    (ml, a, b)
                }
            },
        };
        if a != b {
            return Some(Mismatch {
                monomial: m.clone(),
                lhs: a.clone(),
                rhs: b.clone(),
            });
        }
    }
}

pub const FUNDAMENTAL_FORMULA: &str = "fundamental-formula";
pub const HOPPING_IDENTITY: &str = "flow-hopping";
pub const INTERACTION_IDENTITY: &str = "flow-interaction";
pub const FLOW_REPRESENTATION: &str = "flow-representation";

/// Checks `Σ a_i†²a_i² = (1/n) Σ_j Q_j†Q_j` exactly after rewriting the
/// right side in site modes. The report's lhs is the site side.
pub fn verify_fundamental_formula(n: u32) -> Result<VerificationReport> {
    let flow = fundamental_formula_flow_side(n)?;
    verify_fundamental_formula_with(n, &flow)
}

/// Same check with a caller-supplied flow-side polynomial.
pub fn verify_fundamental_formula_with(n: u32, flow_side: &BosonPolynomial) -> Result<VerificationReport> {
    let site = onsite_interaction(n)?;
    let image = flow_to_site(flow_side)?;
    Ok(VerificationReport::compare(FUNDAMENTAL_FORMULA, n, &site, &image))
}

/// Checks that the flow Hamiltonian rewritten in site modes equals the site
/// Hamiltonian. The hopping and interaction identities are checked first so
/// a failure names the offending piece.
pub fn verify_flow_representation(params: &HamiltonianParams) -> Result<VerificationReport> {
    verify_flow_candidate(params, &build_flow(params)?)
}

/// Full-representation check against an arbitrary flow polynomial.
pub fn verify_flow_candidate(params: &HamiltonianParams, flow: &BosonPolynomial) -> Result<VerificationReport> {
    let n = params.n;
    let hopping = VerificationReport::compare(
        HOPPING_IDENTITY,
        n,
        &site_hopping(params)?,
        &flow_to_site(&build_flow_hopping(params)?)?,
    );
    if !hopping.passed {
        return Ok(hopping);
    }
    let interaction = VerificationReport::compare(
        INTERACTION_IDENTITY,
        n,
        &site_interaction(params)?,
        &flow_to_site(&build_flow_interaction(params)?)?,
    );
    if !interaction.passed {
        return Ok(interaction);
    }
    Ok(VerificationReport::compare(
        FLOW_REPRESENTATION,
        n,
        &build_site(params)?,
        &flow_to_site(flow)?,
    ))
}

/// Runs [`verify_fundamental_formula`] for each n in the range, in parallel,
/// returning reports in ascending n.
pub fn verify_fundamental_formula_range(ns: std::ops::RangeInclusive<u32>) -> Result<Vec<VerificationReport>> {
    let ns: Vec<u32> = ns.collect();
    ns.par_iter().map(|&n| verify_fundamental_formula(n)).collect()
}

/// A Hamiltonian polynomial together with its representation and couplings.
#[derive(Clone, Debug)]
pub struct Hamiltonian {
    pub params: HamiltonianParams,
    pub rep: Representation,
    pub poly: BosonPolynomial,
}

impl Hamiltonian {
    pub fn build(params: &HamiltonianParams, rep: Representation) -> Result<Self> {
        let poly = match rep {
            Representation::Site => build_site(params)?,
            Representation::Flow => build_flow(params)?,
        };
        Ok(Self {
            params: params.clone(),
            rep,
            poly,
        })
    }

    pub fn to_document(&self) -> HamiltonianDocument {
        HamiltonianDocument {
            polynomial: self.poly.to_document(self.rep),
            params: ParamsDocument {
                n: self.params.n,
                hopping: rational_text(&self.params.hopping),
                interaction: rational_text(&self.params.interaction),
            },
        }
    }

    pub fn from_document(doc: &HamiltonianDocument) -> Result<Self> {
        let (poly, rep) = BosonPolynomial::from_document(&doc.polynomial)?;
        let params = HamiltonianParams::new(
            doc.params.n,
            parse_rational(&doc.params.hopping)?,
            parse_rational(&doc.params.interaction)?,
        )?;
        if poly.n_modes() != params.modes() {
            return Err(Error::ModeMismatch {
                left: poly.n_modes(),
                right: params.modes(),
            });
        }
        Ok(Self { params, rep, poly })
    }
}

fn rational_text(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ParamsDocument {
    pub n: u32,
    #[serde(rename = "J")]
    pub hopping: String,
    #[serde(rename = "U")]
    pub interaction: String,
}

/// Polynomial JSON plus a `params` block.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HamiltonianDocument {
    #[serde(flatten)]
    pub polynomial: PolynomialDocument,
    pub params: ParamsDocument,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MismatchDocument {
    pub monomial: ModeMonomial,
    pub lhs: CycloScalar,
    pub rhs: CycloScalar,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReportDocument {
    pub identity: String,
    pub n: u32,
    pub passed: bool,
    pub mismatch: Option<MismatchDocument>,
    pub term_counts: [usize; 2],
}

/// Returns a copy of `p` with the coefficient of `m` shifted by `delta`.
/// Used to build deliberately wrong inputs for negative controls.
pub fn perturb_coefficient(p: &BosonPolynomial, m: &ModeMonomial, delta: &Rational) -> Result<BosonPolynomial> {
    let field = p.field();
    let current = p.coefficient(m).cloned().unwrap_or_else(|| field.zero());
    let mut out = p.clone();
    out.set_coefficient(m.clone(), &current + &field.from_rational(delta.clone()))?;
    Ok(out)
}
