//! Command-line front end.

use crate::arith::is_prime;
use crate::classpoly::{genclass, hilbert, r_curve, report_row, Algo, ReportRow, CURVE_ID};
use crate::cmmethod::{cm_generalized, cm_hilbert, compute_psi_incremental, FrobeniusSpec, ModularPolynomial, DJ_X0PLUS119};
use crate::error::{Error, Result};
use crate::nsystem::{build_nsystem, density, find_abc, plus_admissible, AbcMode};
use crate::numerics::IntPolyUV;
use crate::qexp::Basis;
use crate::quadforms::{class_number, is_fundamental, Discriminant};
use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::io::Write;
use std::path::PathBuf;

/// Exit status for usage errors.
pub const EXIT_USAGE: i32 = 64;
/// Exit status when `--algo both` finds a disagreement.
pub const EXIT_DISAGREE: i32 = 1;

#[derive(Parser, Debug)]
#[command(name = "genclass", version, about = "Hilbert and generalized class polynomials on X0+(119), and the CM method")]
pub struct Cli {
    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum BasisArg {
    Standard,
    Etamixed,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum AlgoArg {
    Lll,
    Tree,
    Both,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ModeArg {
    Generic,
    Ramified,
    Plus,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Via {
    Hilbert,
    X0plus119,
}

#[derive(Subcommand, Debug)]
pub enum Cmd {
    /// Hilbert class polynomial H_D[j].
    Hilbert {
        #[arg(short = 'D', allow_negative_numbers = true)]
        d: i64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generalized class function on X0+(119).
    Genclass {
        #[arg(short = 'D', allow_negative_numbers = true)]
        d: i64,
        #[arg(long, value_enum, default_value = "standard")]
        basis: BasisArg,
        #[arg(long, value_enum, default_value = "lll")]
        algo: AlgoArg,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also print the function in conventional notation.
        #[arg(long)]
        pretty: bool,
    },
    /// CM parameters and an N-system for D.
    Nsystem {
        #[arg(short = 'D', allow_negative_numbers = true)]
        d: i64,
        #[arg(short = 'N')]
        n: u64,
        #[arg(long, value_enum, default_value = "plus")]
        mode: ModeArg,
    },
    /// Density of discriminants admitting a Fricke-compatible N-system.
    Density {
        #[arg(short = 'N')]
        n: u64,
        #[arg(long)]
        fundamental: bool,
    },
    /// Reduction factor of X0(N) or X0+(N).
    Rfactor {
        #[arg(short = 'N')]
        n: u64,
        #[arg(long)]
        plus: bool,
    },
    /// CSV of coefficient sizes of H_D versus the class function, for dmin ≤ |D| ≤ dmax.
    Report {
        #[arg(long, allow_negative_numbers = true)]
        dmin: i64,
        #[arg(long, allow_negative_numbers = true)]
        dmax: i64,
        #[arg(long)]
        prime_class_number: bool,
        /// Only class numbers at least this large.
        #[arg(long)]
        hmin: Option<u64>,
        /// Only class numbers at most this large.
        #[arg(long)]
        hmax: Option<u64>,
        /// Include non-fundamental discriminants.
        #[arg(long)]
        all_orders: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Modular polynomial Ψ of j over the function field of the curve.
    Psi {
        #[arg(long, default_value = CURVE_ID)]
        curve: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Elliptic curve over F_q with q + 1 - t points.
    Cm {
        #[arg(short = 't', allow_negative_numbers = true)]
        t: i64,
        #[arg(short = 'q')]
        q: u64,
        #[arg(long, value_enum, default_value = "hilbert")]
        via: Via,
        /// Precomputed Ψ file (computed on the fly otherwise).
        #[arg(long)]
        psi: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn emit(text: &str, out: &Option<PathBuf>, stdout: &mut dyn Write) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}

/// `H_D` in the monomial-per-line format, with `j` in the `x` slot.
pub fn hilbert_text(d: Discriminant, h: &IntPolyUV) -> String {
    let mut s = format!("D={} N=1 curve=j basis=standard real=1\n", d.value());
    for (i, c) in h.coeffs().iter().enumerate().rev() {
        if *c != 0 {
            s.push_str(&format!("{c} {i} 0\n"));
        }
    }
    s
}

/// Discriminants covered by `report`, sorted by `|D|`.
pub fn report_discriminants(dmin: u64, dmax: u64, filter: &ReportFilter) -> Vec<Discriminant> {
    (dmin.max(3)..=dmax)
        .filter_map(|a| Discriminant::new(-(a as i64)).ok())
        .filter(|d| (filter.all_orders || is_fundamental(d.value())) && plus_admissible(d.value(), 119))
        .filter(|d| {
            let h = class_number(*d) as u64;
            (!filter.prime_h || is_prime(h)) && filter.hmin.is_none_or(|m| h >= m) && filter.hmax.is_none_or(|m| h <= m)
        })
        .collect()
}

/// Which discriminants a report covers (besides the `|D|` range).
#[derive(Clone, Copy, Debug, Default)]
pub struct ReportFilter {
    pub prime_h: bool,
    pub all_orders: bool,
    pub hmin: Option<u64>,
    pub hmax: Option<u64>,
}

pub fn report_csv(ds: &[Discriminant]) -> Result<String> {
    let rows: Vec<Result<ReportRow>> = ds.par_iter().map(|d| report_row(*d)).collect();
    let mut s = String::from(ReportRow::HEADER);
    s.push('\n');
    for r in rows {
        s.push_str(&r?.csv());
        s.push('\n');
    }
    Ok(s)
}

fn execute(cmd: Cmd, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    match cmd {
        Cmd::Hilbert { d, out } => {
            let d = Discriminant::new(d)?;
            let h = hilbert(d, None)?;
            emit(&hilbert_text(d, &h), &out, stdout)?;
        }
        Cmd::Genclass { d, basis, algo, out, pretty } => {
            let d = Discriminant::new(d)?;
            let basis = match basis {
                BasisArg::Standard => Basis::Standard,
                BasisArg::Etamixed => Basis::EtaMixed,
            };
            let algo = match algo {
                AlgoArg::Lll => Algo::Lll,
                AlgoArg::Tree => Algo::Tree,
                AlgoArg::Both => Algo::Both,
            };
            let o = genclass(d, basis, algo)?;
            emit(&o.function.to_text(), &out, stdout)?;
            if pretty {
                writeln!(stdout, "# {}", o.function.pretty())?;
            }
            if o.agree == Some(false) {
                writeln!(stderr, "LLL and binary-tree constructions disagree for D = {d}")?;
                return Ok(EXIT_DISAGREE);
            }
        }
        Cmd::Nsystem { d, n, mode } => {
            let d = Discriminant::new(d)?;
            let mode = match mode {
                ModeArg::Generic => AbcMode::Generic,
                ModeArg::Ramified => AbcMode::Ramified,
                ModeArg::Plus => AbcMode::Plus,
            };
            let p = find_abc(d, n, mode)?;
            writeln!(stdout, "D={} N={} a={} b={} c={}", d.value(), n, p.a, p.b, p.c)?;
            for f in build_nsystem(&p)? {
                writeln!(stdout, "{} {} {}", f.a, f.b, f.c)?;
            }
        }
        Cmd::Density { n, fundamental } => writeln!(stdout, "{}", density(n, fundamental)?)?,
        Cmd::Rfactor { n, plus } => writeln!(stdout, "{}", r_curve(n, plus)?)?,
        Cmd::Report { dmin, dmax, prime_class_number, hmin, hmax, all_orders, out, seed: _ } => {
            let (lo, hi) = (dmin.unsigned_abs().min(dmax.unsigned_abs()), dmin.unsigned_abs().max(dmax.unsigned_abs()));
            let ds = report_discriminants(lo, hi, &ReportFilter { prime_h: prime_class_number, all_orders, hmin, hmax });
            emit(&report_csv(&ds)?, &out, stdout)?;
        }
        Cmd::Psi { curve, out } => {
            if curve != CURVE_ID {
                return Err(Error::Precondition(format!("unsupported curve {curve}")));
            }
            let psi = compute_psi_incremental(DJ_X0PLUS119, 512)?;
            emit(&psi.to_text(), &out, stdout)?;
        }
        Cmd::Cm { t, q, via, psi, seed } => {
            let spec = FrobeniusSpec::new(t, q)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let o = match via {
                Via::Hilbert => cm_hilbert(&spec, &mut rng)?,
                Via::X0plus119 => {
                    let psi = match psi {
                        Some(p) => ModularPolynomial::from_text(&std::fs::read_to_string(p)?)?,
                        None => compute_psi_incremental(DJ_X0PLUS119, 512)?,
                    };
                    cm_generalized(&spec, &psi, &mut rng)?
                }
            };
            writeln!(stdout, "{}", o.curve.to_json())?;
        }
    }
    Ok(0)
}

/// Run the CLI on `args` (including the program name) and return the exit status.
pub fn run<I, S>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{e}");
                    0
                }
                _ => {
                    let _ = write!(stderr, "{}", e.render());
                    EXIT_USAGE
                }
            };
        }
    };
    match execute(cli.cmd, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
