//! Acceptance suite. Runs every primary criterion, prints one line per
//! criterion and exits non-zero if any of them fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use bosonflow::cyclo::rational;
use bosonflow::fock::{sector_spectrum, spectra_match};
use bosonflow::hamiltonian::{
    build_flow, build_flow_hopping, build_flow_interaction, build_site, fundamental_formula_flow_side,
    perturb_coefficient, transcribed_special_case, verify_flow_representation, verify_fundamental_formula,
    verify_fundamental_formula_with, SPECIAL_CASE_SIZES,
};
use bosonflow::{
    enumerate_basis, monomial_product, total_number, BosonPolynomial, CycloField, ExactMatrix, HamiltonianParams,
    ModeMonomial,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn fundamental_formula() -> Outcome {
    let start = Instant::now();
    for n in 2..=8 {
        let report = verify_fundamental_formula(n).map_err(|e| e.to_string())?;
        if !report.passed {
            return Err(report.to_string());
        }
    }
    let elapsed = start.elapsed();
    if elapsed >= Duration::from_secs(60) {
        return Err(format!("n=2..8 exact but took {elapsed:.2?}"));
    }
    Ok(format!("n=2..8 exact in {elapsed:.2?}"))
}

fn golden_cases() -> Outcome {
    for n in SPECIAL_CASE_SIZES {
        for (j, u) in [((1, 1), (1, 1)), ((2, 3), (5, 7))] {
            let p = HamiltonianParams::from_ratios(n, j, u).map_err(|e| e.to_string())?;
            let built = build_flow(&p).map_err(|e| e.to_string())?;
            let golden = transcribed_special_case(&p).map_err(|e| e.to_string())?;
            if built != golden {
                return Err(format!("n={n} J={j:?} U={u:?} differs from transcription"));
            }
        }
    }
    Ok("n=3,4,5 at (1,1) and (2/3,5/7)".into())
}

fn flow_representation() -> Outcome {
    for n in 2..=6 {
        for (j, u) in [((1, 1), (1, 1)), ((2, 3), (5, 7))] {
            let p = HamiltonianParams::from_ratios(n, j, u).map_err(|e| e.to_string())?;
            let report = verify_flow_representation(&p).map_err(|e| e.to_string())?;
            if !report.passed {
                return Err(report.to_string());
            }
        }
    }
    Ok("n=2..6 at (1,1) and (2/3,5/7)".into())
}

fn matrix_identities() -> Outcome {
    for n in 2..=12u32 {
        let e = |r: bosonflow::Result<ExactMatrix>| r.map_err(|e| e.to_string());
        let f = e(ExactMatrix::fourier_unnormalized(n))?;
        let s1 = e(ExactMatrix::sigma1(n))?;
        let s3 = e(ExactMatrix::sigma3(n))?;
        let k = e(ExactMatrix::reversal_permutation(n))?;
        let field = f.field().clone();
        let n_scalar = field.from_integer(n.into());
        let times_n = |m: &ExactMatrix| ExactMatrix::from_fn(m.n(), &field, |i, j| m.get(i, j) * &n_scalar);
        let id = ExactMatrix::identity(n as usize, &field);

        let checks = [
            ("FF† = nI", e(f.mul(&f.adjoint()))? == times_n(&id)),
            ("F² = nK", e(f.mul(&f))? == times_n(&k)),
            ("FΣ₃F† = nΣ₁", e(e(f.mul(&s3))?.mul(&f.adjoint()))? == times_n(&s1)),
            ("Σ₁ⁿ = I", s1.pow(n).is_identity()),
        ];
        if let Some((name, _)) = checks.iter().find(|(_, ok)| !ok) {
            return Err(format!("{name} fails at n={n}"));
        }
    }
    Ok("FF† = nI, F² = nK, FΣ₃F† = nΣ₁, Σ₁ⁿ = I for n=2..12".into())
}

fn conservation_and_hermiticity() -> Outcome {
    for n in 2..=6 {
        let field = CycloField::new(n).map_err(|e| e.to_string())?;
        let number = total_number(n as usize, &field);
        for (j, u) in [((1, 1), (1, 1)), ((2, 3), (5, 7))] {
            let p = HamiltonianParams::from_ratios(n, j, u).map_err(|e| e.to_string())?;
            for (label, h) in [("site", build_site(&p)), ("flow", build_flow(&p))] {
                let h = h.map_err(|e| e.to_string())?;
                if !h.is_hermitian() {
                    return Err(format!("{label} H is not Hermitian at n={n}"));
                }
                let c = number.commutator(&h).map_err(|e| e.to_string())?;
                if !c.is_zero() {
                    return Err(format!("[N, H] ≠ 0 for {label} at n={n}"));
                }
            }
        }
    }
    Ok("H = H† and [N, H] = 0 for site and flow, n=2..6".into())
}

fn spectral_equivalence() -> Outcome {
    let mut worst = 0.0f64;
    let mut slowest = Duration::ZERO;
    for (n, particles, dim) in [(2u32, 4u32, 5usize), (3, 3, 10), (3, 6, 28), (4, 4, 35)] {
        let start = Instant::now();
        let p = HamiltonianParams::from_ratios(n, (1, 1), (7, 10)).map_err(|e| e.to_string())?;
        let basis = enumerate_basis(n as usize, particles);
        if basis.len() != dim {
            return Err(format!(
                "(n,N)=({n},{particles}) sector has dimension {}, expected {dim}",
                basis.len()
            ));
        }
        let site =
            sector_spectrum(&build_site(&p).map_err(|e| e.to_string())?, particles).map_err(|e| e.to_string())?;
        let flow =
            sector_spectrum(&build_flow(&p).map_err(|e| e.to_string())?, particles).map_err(|e| e.to_string())?;
        let cmp = spectra_match(&site, &flow, 1e-9).map_err(|e| e.to_string())?;
        let elapsed = start.elapsed();
        if !cmp.within_tolerance {
            return Err(format!("(n,N)=({n},{particles}) deviation {:e}", cmp.max_deviation));
        }
        if elapsed >= Duration::from_secs(10) {
            return Err(format!("(n,N)=({n},{particles}) took {elapsed:.2?}"));
        }
        worst = worst.max(cmp.max_deviation);
        slowest = slowest.max(elapsed);
    }
    Ok(format!("max deviation {worst:.2e}, slowest run {slowest:.2?}"))
}

// ---- normal-ordering oracle ---------------------------------------------

const CUTOFF: u32 = 8;

/// A ladder word in application order (rightmost operator first).
/// `(mode, true)` raises, `(mode, false)` lowers.
fn ladder_word(m: &ModeMonomial) -> Vec<(usize, bool)> {
    let mut word = Vec::new();
    for (i, &q) in m.annihilators().iter().enumerate() {
        word.extend(std::iter::repeat_n((i, false), q as usize));
    }
    for (i, &p) in m.creators().iter().enumerate() {
        word.extend(std::iter::repeat_n((i, true), p as usize));
    }
    word
}

fn monomials(n_modes: usize, max_degree: u32) -> Vec<ModeMonomial> {
    let slots = 2 * n_modes;
    let mut out = Vec::new();
    let mut exps = vec![0u32; slots];
    loop {
        if exps.iter().sum::<u32>() <= max_degree {
            out.push(ModeMonomial::new(exps[..n_modes].to_vec(), exps[n_modes..].to_vec()).unwrap());
        }
        let mut k = 0;
        loop {
            if k == slots {
                return out;
            }
            exps[k] += 1;
            if exps[k] <= max_degree {
                break;
            }
            exps[k] = 0;
            k += 1;
        }
    }
}

fn all_states(n_modes: usize) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    for _ in 0..n_modes {
        out = out
            .into_iter()
            .flat_map(|s| (0..=CUTOFF).map(move |k| [s.clone(), vec![k]].concat()))
            .collect();
    }
    out
}

fn normal_ordering_oracle() -> Outcome {
    let mut pairs = 0usize;
    let mut compared = 0usize;
    let mut worst = 0.0f64;
    for n_modes in 1..=3usize {
        let field = CycloField::new(2).map_err(|e| e.to_string())?;
        let monos = monomials(n_modes, 4);
        let words: Vec<_> = monos.iter().map(ladder_word).collect();
        let states = all_states(n_modes);
        for (a, m1) in monos.iter().enumerate() {
            for (b, m2) in monos.iter().enumerate() {
                pairs += 1;
                let product = monomial_product(m1, m2, &field).map_err(|e| e.to_string())?;
                let terms: Vec<_> = product
                    .terms()
                    .map(|(m, c)| (ladder_word(m), c.as_rational().expect("integer coefficients")))
                    .map(|(w, c)| (w, num::ToPrimitive::to_f64(c).unwrap()))
                    .collect();
                for s in &states {
                    // Columns where m2 or m1·m2 leaves the truncated space are
                    // not represented by the truncated matrices.
                    let direct = match apply(&words[b], s) {
                        Some((mid, _)) if outside(&mid) => continue,
                        Some((mid, x)) => match apply(&words[a], &mid) {
                            Some((end, _)) if outside(&end) => continue,
                            Some((end, y)) => Some((end, x * y)),
                            None => None,
                        },
                        None => None,
                    };
                    let mut target: Option<Vec<u32>> = None;
                    let mut sum = 0.0;
                    for (w, c) in &terms {
                        if let Some((end, amp)) = apply(w, s) {
                            if target.as_ref().is_some_and(|t| *t != end) {
                                return Err(format!("{m1} · {m2}: terms map {s:?} to different states"));
                            }
                            target = Some(end);
                            sum += c * amp;
                        }
                    }
                    let expected = match direct {
                        Some((end, v)) => {
                            if target.as_ref().is_some_and(|t| *t != end) {
                                return Err(format!("{m1} · {m2}: different target states from {s:?}"));
                            }
                            v
                        }
                        None => 0.0,
                    };
                    let diff = (expected - sum).abs();
                    worst = worst.max(diff);
                    compared += 1;
                    if diff > 1e-10 * expected.abs().max(1.0) {
                        return Err(format!(
                            "{m1} · {m2} on {s:?}: brute force {expected}, normal ordered {sum}"
                        ));
                    }
                }
            }
        }
    }
    Ok(format!(
        "{pairs} pairs, {compared} matrix columns, max deviation {worst:.2e}"
    ))
}

fn outside(state: &[u32]) -> bool {
    state.iter().any(|&k| k > CUTOFF)
}

/// Applies single ladder steps one at a time. `None` when a lowering step
/// hits an empty mode. A word lowers before it raises, so its largest
/// occupation is the final one.
fn apply(word: &[(usize, bool)], state: &[u32]) -> Option<(Vec<u32>, f64)> {
    let mut s = state.to_vec();
    let mut amp = 1.0f64;
    for &(i, raise) in word {
        if raise {
            s[i] += 1;
            amp *= f64::from(s[i]).sqrt();
        } else {
            if s[i] == 0 {
                return None;
            }
            amp *= f64::from(s[i]).sqrt();
            s[i] -= 1;
        }
    }
    Some((s, amp))
}

// ---- negative controls --------------------------------------------------

fn negative_controls() -> Outcome {
    let delta = rational(1, 1000);
    let mut located = 0;
    for n in [3u32, 4] {
        let flow = fundamental_formula_flow_side(n).map_err(|e| e.to_string())?;
        for (m, _) in flow.terms() {
            let bad = perturb_coefficient(&flow, m, &delta).map_err(|e| e.to_string())?;
            let report = verify_fundamental_formula_with(n, &bad).map_err(|e| e.to_string())?;
            match &report.first_mismatch {
                Some(mm) if !report.passed && mm.lhs != mm.rhs => located += 1,
                _ => return Err(format!("n={n}: perturbing {m} went unnoticed")),
            }
        }
    }

    let (n, particles) = (3, 4);
    let p = HamiltonianParams::from_ratios(n, (1, 1), (7, 10)).map_err(|e| e.to_string())?;
    let reference =
        sector_spectrum(&build_site(&p).map_err(|e| e.to_string())?, particles).map_err(|e| e.to_string())?;
    let hopping = build_flow_hopping(&p).map_err(|e| e.to_string())?;
    let interaction = build_flow_interaction(&p).map_err(|e| e.to_string())?;
    let mut smallest = f64::INFINITY;
    for (m, _) in interaction.terms() {
        // The Hermitian partner moves with it so the perturbed operator stays
        // Hermitian and its spectrum is well defined.
        let mut bad = perturb_coefficient(&interaction, m, &delta).map_err(|e| e.to_string())?;
        let partner = m.adjoint();
        if partner != *m {
            bad = perturb_coefficient(&bad, &partner, &delta).map_err(|e| e.to_string())?;
        }
        let h: BosonPolynomial = hopping.add(&bad).map_err(|e| e.to_string())?;
        let spectrum = sector_spectrum(&h, particles).map_err(|e| e.to_string())?;
        let dev = spectra_match(&reference, &spectrum, 1e-9)
            .map_err(|e| e.to_string())?
            .max_deviation;
        if dev <= 1e-4 {
            return Err(format!("perturbing {m} moves the (3,4) spectrum by only {dev:e}"));
        }
        smallest = smallest.min(dev);
    }
    Ok(format!(
        "{located} perturbed formulas rejected with located mismatch; smallest (3,4) spectral shift {smallest:.2e}"
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("fundamental formula", fundamental_formula),
        ("golden cases", golden_cases),
        ("flow representation", flow_representation),
        ("matrix identities", matrix_identities),
        ("conservation and hermiticity", conservation_and_hermiticity),
        ("spectral equivalence", spectral_equivalence),
        ("normal-ordering oracle", normal_ordering_oracle),
        ("negative controls", negative_controls),
    ];
    let mut failures = 0;
    for (name, run) in criteria {
        match run() {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(detail) => {
                failures += 1;
                println!("FAIL  {name}: {detail}");
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
