//! Hand-transcribed flow Hamiltonians for rings of 3, 4 and 5 sites.
//!
//! The expressions are entered exactly as they are usually printed:
//!
//! ```text
//! H = J·c·Σ_k h_k α_k†α_k + (U/d)·Σ_g w_g (G_g)† G_g
//! ```
//!
//! where each group `G_g` is a short sum of annihilator pairs. None of this
//! data is derived from the builders; it is golden input to compare them
//! against.

use std::sync::Arc;

use crate::boson::{BosonPolynomial, ModeMonomial};
use crate::cyclo::{rational, CycloField, CycloScalar, Rational};
use crate::error::{Error, Result};

use super::HamiltonianParams;

/// Ring sizes with a transcribed expression.
pub const SPECIAL_CASE_SIZES: [u32; 3] = [3, 4, 5];

/// Hopping weight `rational + root5·√5`.
#[derive(Clone, Copy, Debug)]
struct Weight {
    rational: i64,
    root5: i64,
}

/// (weight, [(coefficient, i, j)]) with each group Σ c·α_i α_j.
type Groups = &'static [(i64, &'static [(i64, usize, usize)])];

const fn w(rational: i64) -> Weight {
    Weight { rational, root5: 0 }
}

const fn w5(rational: i64, root5: i64) -> Weight {
    Weight { rational, root5 }
}

/// One transcribed Hamiltonian. Mode indices are 1-based as printed.
#[derive(Clone, Debug)]
pub struct SpecialCase {
    pub n: u32,
    /// Prefactor multiplying J in front of the hopping bracket.
    pub hopping_prefactor: (i64, i64),
    hopping: &'static [(usize, Weight)],
    /// Denominator d of the U/d interaction prefactor.
    pub interaction_denominator: i64,
    groups: Groups,
}

const N3: SpecialCase = SpecialCase {
    n: 3,
    hopping_prefactor: (-1, 1),
    hopping: &[(1, w(2)), (2, w(-1)), (3, w(-1))],
    interaction_denominator: 6,
    groups: &[
        (1, &[(1, 1, 1), (2, 2, 3)]),
        (1, &[(1, 2, 2), (2, 1, 3)]),
        (1, &[(1, 3, 3), (2, 1, 2)]),
    ],
};

const N4: SpecialCase = SpecialCase {
    n: 4,
    hopping_prefactor: (-2, 1),
    hopping: &[(1, w(1)), (3, w(-1))],
    interaction_denominator: 8,
    groups: &[
        (1, &[(1, 1, 1), (2, 2, 4), (1, 3, 3)]),
        (1, &[(1, 2, 2), (2, 1, 3), (1, 4, 4)]),
        (4, &[(1, 1, 2), (1, 3, 4)]),
        (4, &[(1, 1, 4), (1, 2, 3)]),
    ],
};

const N5: SpecialCase = SpecialCase {
    n: 5,
    hopping_prefactor: (-1, 2),
    hopping: &[
        (1, w(4)),
        (2, w5(-1, 1)),
        (5, w5(-1, 1)),
        (3, w5(-1, -1)),
        (4, w5(-1, -1)),
    ],
    interaction_denominator: 10,
    groups: &[
        (1, &[(1, 1, 1), (2, 2, 5), (2, 3, 4)]),
        (1, &[(1, 3, 3), (2, 1, 5), (2, 2, 4)]),
        (1, &[(1, 5, 5), (2, 1, 4), (2, 2, 3)]),
        (1, &[(1, 2, 2), (2, 1, 3), (2, 4, 5)]),
        (1, &[(1, 4, 4), (2, 1, 2), (2, 3, 5)]),
    ],
};

impl SpecialCase {
    pub fn get(n: u32) -> Result<&'static SpecialCase> {
        match n {
            3 => Ok(&N3),
            4 => Ok(&N4),
            5 => Ok(&N5),
            _ => Err(Error::UnsupportedSpecialCase(n)),
        }
    }

    fn weight(&self, field: &Arc<CycloField>, w: Weight) -> CycloScalar {
        let mut s = field.from_integer(w.rational);
        if w.root5 != 0 {
            s = &s + &root_five(field).scale(&rational(w.root5, 1));
        }
        s
    }

    pub fn polynomial(&self, hopping: &Rational, interaction: &Rational) -> Result<BosonPolynomial> {
        let field = CycloField::new(self.n)?;
        let m = self.n as usize;

        let hop_scale = rational(self.hopping_prefactor.0, self.hopping_prefactor.1) * hopping;
        let hop_terms = self.hopping.iter().map(|&(k, wt)| {
            (
                ModeMonomial::pair(m, k - 1, 1, k - 1, 1),
                self.weight(&field, wt).scale(&hop_scale),
            )
        });
        let mut total = BosonPolynomial::from_terms(m, &field, hop_terms)?;

        let int_scale = interaction / Rational::from_integer(self.interaction_denominator.into());
        for &(weight, group) in self.groups {
            let pairs = group.iter().map(|&(c, i, j)| {
                let mut ann = vec![0; m];
                ann[i - 1] += 1;
                ann[j - 1] += 1;
                (
                    ModeMonomial::new(vec![0; m], ann).expect("m >= 1"),
                    field.from_integer(c),
                )
            });
            let g = BosonPolynomial::from_terms(m, &field, pairs)?;
            let square = g.adjoint().mul(&g)?;
            total = total.add(&square.scale_rational(&(&int_scale * Rational::from_integer(weight.into()))))?;
        }
        Ok(total)
    }
}

/// √5 inside Q(ζ₅): σ + σ⁴ = 2cos(72°) = (√5 − 1)/2, so √5 = 1 + 2(σ + σ⁴).
fn root_five(field: &Arc<CycloField>) -> CycloScalar {
    assert_eq!(field.order(), 5, "√5 is only encoded in Q(ζ₅)");
    &field.one() + &(&field.sigma_power(1) + &field.sigma_power(4)).scale(&rational(2, 1))
}

/// The transcribed flow Hamiltonian for `params.n() ∈ {3, 4, 5}`.
pub fn transcribed_special_case(params: &HamiltonianParams) -> Result<BosonPolynomial> {
    SpecialCase::get(params.n())?.polynomial(params.hopping(), params.interaction())
}
