//! Fixed-particle-number Fock sectors, sparse operator matrices, and
//! spectral comparison.
//!
//! This layer is floating point. It takes exact polynomials from
//! [`crate::boson`], evaluates their coefficients with
//! [`CycloScalar::to_complex`](crate::cyclo::CycloScalar::to_complex), and
//! only accepts number-conserving operators, so each N-particle sector is
//! represented without truncation.

mod eigen;

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use num::complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boson::BosonPolynomial;
use crate::error::{Error, Result};

pub use eigen::{jacobi_hermitian, HermitianEigen};

/// Entries with magnitude below this are not stored.
pub const PRUNE_TOLERANCE: f64 = 1e-14;
/// Maximum |A − A†| accepted by [`hermitian_eigenvalues`].
pub const HERMITIAN_TOLERANCE: f64 = 1e-12;

/// Occupation numbers m_1..m_n.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FockState(pub Vec<u32>);

impl FockState {
    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }
}

/// All occupation vectors of `n_modes` modes holding `particles` bosons, in
/// ascending lexicographic order.
#[derive(Clone, Debug)]
pub struct FockBasis {
    n_modes: usize,
    particles: u32,
    states: Vec<FockState>,
    index: HashMap<FockState, usize>,
}

pub fn enumerate_basis(n_modes: usize, particles: u32) -> FockBasis {
    fn fill(prefix: &mut Vec<u32>, remaining: u32, slots: usize, out: &mut Vec<FockState>) {
        if slots == 1 {
            prefix.push(remaining);
            out.push(FockState(prefix.clone()));
            prefix.pop();
            return;
        }
        for k in 0..=remaining {
            prefix.push(k);
            fill(prefix, remaining - k, slots - 1, out);
            prefix.pop();
        }
    }
    let mut states = Vec::new();
    if n_modes > 0 {
        fill(&mut Vec::with_capacity(n_modes), particles, n_modes, &mut states);
    }
    let index = states.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
    FockBasis {
        n_modes,
        particles,
        states,
        index,
    }
}

impl FockBasis {
    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn particles(&self) -> u32 {
        self.particles
    }

    pub fn states(&self) -> &[FockState] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn index_of(&self, state: &FockState) -> Option<usize> {
        self.index.get(state).copied()
    }
}

/// Applies a†^p a^q (per mode) to a basis state; returns the image state and
/// the product of square-root factors, or `None` when the state is
/// annihilated.
pub fn apply_monomial(creators: &[u32], annihilators: &[u32], state: &[u32]) -> Option<(Vec<u32>, f64)> {
    let mut out = state.to_vec();
    // product of the integer ladder factors; one square root at the end
    let mut weight = 1.0f64;
    for (i, m) in out.iter_mut().enumerate() {
        let q = annihilators[i];
        if q > *m {
            return None;
        }
        for k in 0..q {
            weight *= (*m - k) as f64;
        }
        *m -= q;
        let p = creators[i];
        for k in 1..=p {
            weight *= (*m + k) as f64;
        }
        *m += p;
    }
    Some((out, weight.sqrt()))
}

/// Square complex matrix stored as a sorted coordinate map.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseOperator {
    dim: usize,
    entries: BTreeMap<(usize, usize), Complex64>,
}

impl SparseOperator {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            entries: BTreeMap::new(),
        }
    }

    pub fn from_entries(dim: usize, entries: impl IntoIterator<Item = ((usize, usize), Complex64)>) -> Result<Self> {
        let mut op = Self::new(dim);
        for ((r, c), v) in entries {
            if r >= dim || c >= dim {
                return Err(Error::DimensionMismatch(format!(
                    "entry ({r}, {c}) outside {dim}x{dim}"
                )));
            }
            op.add(r, c, v);
        }
        op.prune();
        Ok(op)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Row-major iteration over stored entries.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        self.entries.iter().map(|(&(r, c), &v)| (r, c, v))
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries.get(&(row, col)).copied().unwrap_or_default()
    }

    fn add(&mut self, row: usize, col: usize, v: Complex64) {
        *self.entries.entry((row, col)).or_default() += v;
    }

    fn prune(&mut self) {
        self.entries.retain(|_, v| v.norm() >= PRUNE_TOLERANCE);
    }

    pub fn to_dense(&self) -> Vec<Complex64> {
        let mut dense = vec![Complex64::default(); self.dim * self.dim];
        for (&(r, c), &v) in &self.entries {
            dense[r * self.dim + c] = v;
        }
        dense
    }

    pub fn adjoint(&self) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|(&(r, c), v)| ((c, r), v.conj())).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(format!("{} vs {}", self.dim, other.dim)));
        }
        let mut rows: Vec<Vec<(usize, Complex64)>> = vec![Vec::new(); other.dim];
        for (&(r, c), &v) in &other.entries {
            rows[r].push((c, v));
        }
        let mut out = Self::new(self.dim);
        for (&(r, k), &a) in &self.entries {
            for &(c, b) in &rows[k] {
                out.add(r, c, a * b);
            }
        }
        out.prune();
        Ok(out)
    }

    /// Largest |A_ij − A_ji*| over all entries.
    pub fn hermitian_deviation(&self) -> f64 {
        self.entries
            .iter()
            .map(|(&(r, c), &v)| (v - self.get(c, r).conj()).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let keys: std::collections::BTreeSet<_> = self.entries.keys().chain(other.entries.keys()).collect();
        keys.into_iter()
            .map(|&(r, c)| (self.get(r, c) - other.get(r, c)).norm())
            .fold(0.0, f64::max)
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// `row col re im` per line, 0-based, row-major.
    pub fn to_coordinate_text(&self) -> String {
        let mut out = String::new();
        for (&(r, c), v) in &self.entries {
            writeln!(out, "{r} {c} {} {}", v.re, v.im).unwrap();
        }
        out
    }

    pub fn to_document(&self) -> MatrixDocument {
        MatrixDocument {
            dim: self.dim,
            entries: self.entries.iter().map(|(&(r, c), v)| (r, c, v.re, v.im)).collect(),
        }
    }
}

/// JSON wrapper `{ "dim": d, "entries": [[r, c, re, im], ...] }`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatrixDocument {
    pub dim: usize,
    pub entries: Vec<(usize, usize, f64, f64)>,
}

/// Matrix of a number-conserving polynomial on a fixed-N basis.
pub fn operator_matrix(p: &BosonPolynomial, basis: &FockBasis) -> Result<SparseOperator> {
    if p.n_modes() != basis.n_modes() {
        return Err(Error::ModeMismatch {
            left: p.n_modes(),
            right: basis.n_modes(),
        });
    }
    if let Some((m, _)) = p.terms().find(|(m, _)| m.creator_count() != m.annihilator_count()) {
        return Err(Error::SectorViolation(m.clone()));
    }
    let terms: Vec<_> = p.terms().map(|(m, c)| (m, c.to_complex())).collect();
    let columns: Vec<Vec<(usize, usize, Complex64)>> = basis
        .states()
        .par_iter()
        .enumerate()
        .map(|(col, state)| {
            let mut out = Vec::new();
            for (m, coeff) in &terms {
                if let Some((image, amp)) = apply_monomial(m.creators(), m.annihilators(), &state.0) {
                    let row = basis
                        .index_of(&FockState(image))
                        .expect("number-conserving image stays in sector");
                    out.push((row, col, coeff * amp));
                }
            }
            out
        })
        .collect();
    SparseOperator::from_entries(basis.len(), columns.into_iter().flatten().map(|(r, c, v)| ((r, c), v)))
}

/// Ascending eigenvalues of a Hermitian operator.
pub fn hermitian_eigenvalues(a: &SparseOperator) -> Result<Vec<f64>> {
    Ok(hermitian_eigen(a)?.values)
}

pub fn hermitian_eigen(a: &SparseOperator) -> Result<HermitianEigen> {
    let deviation = a.hermitian_deviation();
    if deviation > HERMITIAN_TOLERANCE {
        return Err(Error::NotHermitian(deviation));
    }
    Ok(jacobi_hermitian(&a.to_dense(), a.dim()))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralComparison {
    pub max_deviation: f64,
    pub within_tolerance: bool,
}

/// Max elementwise deviation between two ascending spectra.
pub fn spectra_match(s1: &[f64], s2: &[f64], tol: f64) -> Result<SpectralComparison> {
    if s1.len() != s2.len() {
        return Err(Error::LengthMismatch(s1.len(), s2.len()));
    }
    let max_deviation = s1.iter().zip(s2).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    Ok(SpectralComparison {
        max_deviation,
        within_tolerance: max_deviation < tol,
    })
}

/// Spectrum of a polynomial restricted to the N-particle sector.
pub fn sector_spectrum(p: &BosonPolynomial, particles: u32) -> Result<Vec<f64>> {
    let basis = enumerate_basis(p.n_modes(), particles);
    hermitian_eigenvalues(&operator_matrix(p, &basis)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boson::ModeMonomial;
    use crate::cyclo::CycloField;
    use crate::hamiltonian::{build_site, HamiltonianParams};
    use std::sync::Arc;

    fn field() -> Arc<CycloField> {
        CycloField::new(2).unwrap()
    }

    fn single(m: ModeMonomial) -> BosonPolynomial {
        BosonPolynomial::monomial(m, field().one())
    }

    fn diag(op: &SparseOperator) -> Vec<f64> {
        (0..op.dim()).map(|i| op.get(i, i).re).collect()
    }

    #[test]
    fn basis_enumeration() {
        let b = enumerate_basis(2, 2);
        let states: Vec<_> = b.states().iter().map(|s| s.0.clone()).collect();
        assert_eq!(states, vec![vec![0, 2], vec![1, 1], vec![2, 0]]);
        assert_eq!(enumerate_basis(3, 2).len(), 6);
        assert_eq!(enumerate_basis(3, 6).len(), 28);
        assert_eq!(enumerate_basis(4, 4).len(), 35);
        assert_eq!(enumerate_basis(3, 0).len(), 1);
        let b = enumerate_basis(4, 3);
        assert!(b.states().windows(2).all(|w| w[0] < w[1]));
        assert!(b.states().iter().all(|s| s.total() == 3));
    }

    #[test]
    fn number_operator_matrix() {
        let b = enumerate_basis(2, 2);
        let op = operator_matrix(&single(ModeMonomial::pair(2, 0, 1, 0, 1)), &b).unwrap();
        assert_eq!(diag(&op), vec![0.0, 1.0, 2.0]);
        let op = operator_matrix(&single(ModeMonomial::pair(2, 0, 2, 0, 2)), &b).unwrap();
        assert_eq!(diag(&op), vec![0.0, 0.0, 2.0]);
        assert_eq!(op.entries().count(), 1);
    }

    #[test]
    fn hop_matrix_element() {
        let b = enumerate_basis(2, 1);
        let op = operator_matrix(&single(ModeMonomial::pair(2, 1, 1, 0, 1)), &b).unwrap();
        // basis is [(0,1), (1,0)]; a2†a1 maps (1,0) -> (0,1)
        assert_eq!(op.entries().collect::<Vec<_>>(), vec![(0, 1, Complex64::new(1.0, 0.0))]);
    }

    #[test]
    fn sector_violation_rejected() {
        let b = enumerate_basis(2, 2);
        let r = operator_matrix(&single(ModeMonomial::creation(2, 0)), &b);
        assert!(matches!(r, Err(Error::SectorViolation(_))));
    }

    #[test]
    fn non_hermitian_rejected() {
        let op = SparseOperator::from_entries(2, [((0, 1), Complex64::new(1.0, 0.0))]).unwrap();
        assert!(matches!(hermitian_eigenvalues(&op), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn simple_spectra() {
        let one = Complex64::new(1.0, 0.0);
        let op = SparseOperator::from_entries(3, [((1, 1), one), ((2, 2), one * 2.0)]).unwrap();
        assert_eq!(hermitian_eigenvalues(&op).unwrap(), vec![0.0, 1.0, 2.0]);
        let x = SparseOperator::from_entries(2, [((0, 1), one), ((1, 0), one)]).unwrap();
        let ev = hermitian_eigenvalues(&x).unwrap();
        assert!((ev[0] + 1.0).abs() < 1e-15 && (ev[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn two_site_doubled_hopping_spectrum() {
        let h = build_site(&HamiltonianParams::from_ratios(2, (1, 1), (0, 1)).unwrap()).unwrap();
        let ev = sector_spectrum(&h, 1).unwrap();
        assert!((ev[0] + 2.0).abs() < 1e-12 && (ev[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn spectra_match_basics() {
        let s = [0.0, 1.5, 2.0];
        let r = spectra_match(&s, &s, 1e-9).unwrap();
        assert_eq!(r.max_deviation, 0.0);
        assert!(r.within_tolerance);
        let r = spectra_match(&s, &[0.0, 1.5, 2.1], 1e-9).unwrap();
        assert!(!r.within_tolerance);
        assert!((r.max_deviation - 0.1).abs() < 1e-12);
        assert!(matches!(
            spectra_match(&s, &s[..2], 1e-9),
            Err(Error::LengthMismatch(3, 2))
        ));
    }

    #[test]
    fn exports() {
        let op = SparseOperator::from_entries(
            2,
            [((1, 0), Complex64::new(0.5, -1.0)), ((0, 1), Complex64::new(0.5, 1.0))],
        )
        .unwrap();
        assert_eq!(op.to_coordinate_text(), "0 1 0.5 1\n1 0 0.5 -1\n");
        let json = serde_json::to_string(&op.to_document()).unwrap();
        assert_eq!(json, r#"{"dim":2,"entries":[[0,1,0.5,1.0],[1,0,0.5,-1.0]]}"#);
    }

    #[test]
    fn pruning_drops_cancelled_entries() {
        let one = Complex64::new(1.0, 0.0);
        let op = SparseOperator::from_entries(2, [((0, 0), one), ((0, 0), -one), ((1, 1), one * 1e-16)]).unwrap();
        assert_eq!(op.entries().count(), 0);
        assert!(SparseOperator::from_entries(2, [((2, 0), one)]).is_err());
    }
}
