use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use bosonflow::cyclo::rational;
use bosonflow::fock::{sector_spectrum, spectra_match};
use bosonflow::hamiltonian::{
    fundamental_formula_flow_side, perturb_coefficient, verify_fundamental_formula, verify_fundamental_formula_with,
    ReportDocument,
};
use bosonflow::{
    build_flow, enumerate_basis, parse_rational, transcribed_special_case, verify_flow_representation, Hamiltonian,
    HamiltonianParams, Rational, Representation, VerificationReport,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

/// Exact and numerical checks of the Bose–Hubbard ring in site and flow modes.
#[derive(Parser, Debug)]
#[command(name = "bosonflow", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check Σ a†²a² = (1/n) Σ Q†Q exactly for one n or a range of n.
    VerifyFormula {
        #[arg(long, value_parser = ring_size)]
        n: u32,
        /// Last n of an inclusive range starting at --n.
        #[arg(long, value_parser = ring_size)]
        to: Option<u32>,
        /// Shift the k-th flow-side coefficient (canonical order) by 1/1000
        /// before checking. A deliberately broken input for sanity checks.
        #[arg(long, value_name = "K")]
        perturb: Option<usize>,
        #[command(flatten)]
        output: Output,
    },
    /// Check that the flow Hamiltonian rewritten in site modes equals the
    /// site Hamiltonian.
    VerifyFlow {
        #[command(flatten)]
        couplings: Couplings,
        #[command(flatten)]
        output: Output,
    },
    /// Compare the built flow Hamiltonian with the transcribed n = 3, 4, 5
    /// expressions.
    Golden {
        #[arg(long, value_parser = clap::value_parser!(u32).range(3..=5))]
        n: u32,
        #[arg(long = "J", default_value = "1", value_parser = exact)]
        hopping: Rational,
        #[arg(long = "U", default_value = "1", value_parser = exact)]
        interaction: Rational,
        #[command(flatten)]
        output: Output,
    },
    /// Emit a Hamiltonian polynomial.
    Build {
        #[command(flatten)]
        couplings: Couplings,
        #[arg(long, value_enum, default_value_t = Rep::Site)]
        rep: Rep,
        #[command(flatten)]
        output: Output,
    },
    /// List the occupation basis of an N-particle sector.
    Basis {
        #[arg(long, value_parser = ring_size)]
        n: u32,
        #[arg(long)]
        particles: u32,
        #[command(flatten)]
        output: Output,
    },
    /// Sorted eigenvalues in an N-particle sector.
    Spectrum {
        #[command(flatten)]
        couplings: Couplings,
        #[arg(long)]
        particles: u32,
        #[arg(long, value_enum, default_value_t = Rep::Site)]
        rep: Rep,
        /// Diagonalize both representations and report their deviation.
        #[arg(long)]
        compare: bool,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Args, Debug)]
struct Couplings {
    #[arg(long, value_parser = ring_size)]
    n: u32,
    /// Hopping J as p/q or an integer.
    #[arg(long = "J", value_parser = exact)]
    hopping: Rational,
    /// Interaction U as p/q or an integer.
    #[arg(long = "U", value_parser = exact)]
    interaction: Rational,
}

impl Couplings {
    fn params(&self) -> bosonflow::Result<HamiltonianParams> {
        HamiltonianParams::new(self.n, self.hopping.clone(), self.interaction.clone())
    }
}

#[derive(Args, Debug)]
struct Output {
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the payload here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Rep {
    Site,
    Flow,
}

impl From<Rep> for Representation {
    fn from(r: Rep) -> Self {
        match r {
            Rep::Site => Representation::Site,
            Rep::Flow => Representation::Flow,
        }
    }
}

fn ring_size(s: &str) -> Result<u32, String> {
    let n: u32 = s.parse().map_err(|e| format!("{e}"))?;
    if n < 2 {
        return Err("ring size must be at least 2".into());
    }
    Ok(n)
}

fn exact(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

/// Failure modes that map onto the exit-code contract.
enum Failure {
    /// A check ran and did not pass; the payload has already been written.
    Check,
    /// Usage, parse or I/O problem.
    Usage(String),
}

impl From<bosonflow::Error> for Failure {
    fn from(e: bosonflow::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn emit<T: Serialize + ?Sized>(output: &Output, doc: &T, text: impl FnOnce() -> String) -> Result<(), Failure> {
    let mut payload = match output.format {
        Format::Json => serde_json::to_string_pretty(doc).map_err(|e| Failure::Usage(e.to_string()))?,
        Format::Text => text(),
    };
    if !payload.ends_with('\n') {
        payload.push('\n');
    }
    match &output.out {
        Some(path) => fs::write(path, payload)?,
        None => io::stdout().lock().write_all(payload.as_bytes())?,
    }
    Ok(())
}

fn verdict(passed: bool) -> Result<(), Failure> {
    if passed {
        Ok(())
    } else {
        Err(Failure::Check)
    }
}

fn emit_reports(output: &Output, reports: &[VerificationReport]) -> Result<(), Failure> {
    let docs: Vec<ReportDocument> = reports.iter().map(VerificationReport::to_document).collect();
    emit(output, &docs, || reports.iter().map(|r| format!("{r}\n")).collect())?;
    verdict(reports.iter().all(|r| r.passed))
}

#[derive(Serialize)]
struct BasisDocument {
    n_modes: u32,
    particles: u32,
    dim: usize,
    states: Vec<Vec<u32>>,
}

#[derive(Serialize)]
struct SpectrumDocument {
    n: u32,
    particles: u32,
    rep: Representation,
    eigenvalues: Vec<f64>,
}

#[derive(Serialize)]
struct ComparisonDocument {
    n: u32,
    particles: u32,
    site: Vec<f64>,
    flow: Vec<f64>,
    max_deviation: f64,
    tolerance: f64,
    within_tolerance: bool,
}

const SPECTRAL_TOLERANCE: f64 = 1e-9;

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::VerifyFormula { n, to, perturb, output } => {
            let last = to.unwrap_or(n);
            if last < n {
                return Err(Failure::Usage(format!("--to {last} is below --n {n}")));
            }
            let reports: Vec<VerificationReport> = (n..=last)
                .into_par_iter()
                .map(|k| match perturb {
                    None => verify_fundamental_formula(k),
                    Some(index) => {
                        let flow = fundamental_formula_flow_side(k)?;
                        let target = flow.terms().nth(index).map(|(m, _)| m.clone()).ok_or_else(|| {
                            bosonflow::Error::Malformed(format!("n={k} flow side has only {} terms", flow.len()))
                        })?;
                        let bad = perturb_coefficient(&flow, &target, &rational(1, 1000))?;
                        verify_fundamental_formula_with(k, &bad)
                    }
                })
                .collect::<bosonflow::Result<_>>()?;
            emit_reports(&output, &reports)
        }
        Command::VerifyFlow { couplings, output } => {
            let report = verify_flow_representation(&couplings.params()?)?;
            emit_reports(&output, &[report])
        }
        Command::Golden {
            n,
            hopping,
            interaction,
            output,
        } => {
            let params = HamiltonianParams::new(n, hopping, interaction)?;
            let report =
                VerificationReport::compare("golden", n, &transcribed_special_case(&params)?, &build_flow(&params)?);
            emit_reports(&output, &[report])
        }
        Command::Build { couplings, rep, output } => {
            let h = Hamiltonian::build(&couplings.params()?, rep.into())?;
            emit(&output, &h.to_document(), || {
                format!("H = {}", h.poly.display_with(h.rep.label()))
            })
        }
        Command::Basis { n, particles, output } => {
            let basis = enumerate_basis(n as usize, particles);
            let doc = BasisDocument {
                n_modes: n,
                particles,
                dim: basis.len(),
                states: basis.states().iter().map(|s| s.0.clone()).collect(),
            };
            emit(&output, &doc, || {
                let mut text = format!("dim {}\n", doc.dim);
                for s in &doc.states {
                    let cells: Vec<String> = s.iter().map(u32::to_string).collect();
                    text.push_str(&cells.join(" "));
                    text.push('\n');
                }
                text
            })
        }
        Command::Spectrum {
            couplings,
            particles,
            rep,
            compare,
            output,
        } => {
            let params = couplings.params()?;
            if compare {
                let site = sector_spectrum(&Hamiltonian::build(&params, Representation::Site)?.poly, particles)?;
                let flow = sector_spectrum(&Hamiltonian::build(&params, Representation::Flow)?.poly, particles)?;
                let cmp = spectra_match(&site, &flow, SPECTRAL_TOLERANCE)?;
                let doc = ComparisonDocument {
                    n: params.n(),
                    particles,
                    site,
                    flow,
                    max_deviation: cmp.max_deviation,
                    tolerance: SPECTRAL_TOLERANCE,
                    within_tolerance: cmp.within_tolerance,
                };
                emit(&output, &doc, || {
                    let status = if doc.within_tolerance { "within" } else { "OUTSIDE" };
                    format!(
                        "n={} N={} dim {}: max deviation {:e} ({status} tolerance {:e})",
                        doc.n,
                        particles,
                        doc.site.len(),
                        doc.max_deviation,
                        SPECTRAL_TOLERANCE
                    )
                })?;
                verdict(cmp.within_tolerance)
            } else {
                let h = Hamiltonian::build(&params, rep.into())?;
                let doc = SpectrumDocument {
                    n: params.n(),
                    particles,
                    rep: h.rep,
                    eigenvalues: sector_spectrum(&h.poly, particles)?,
                };
                emit(&output, &doc, || {
                    doc.eigenvalues.iter().map(|e| format!("{e:.12}\n")).collect()
                })
            }
        }
    }
}

fn configure_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var("BOSONFLOW_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| format!("BOSONFLOW_THREADS must be a positive integer, got {raw:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(msg) = configure_threads() {
        eprintln!("error: {msg}");
        return ExitCode::from(2);
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check) => ExitCode::FAILURE,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
