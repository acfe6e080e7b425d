use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use auxcert::number::format_sig;
use auxcert::optimizer::OptimizeConfig;
use auxcert::plot::{sample, PlotTarget};
use auxcert::rho::{certify, rho_star_exact, Certificate};
use auxcert::two_step::{closed_form_alpha, closed_form_rho, ClosedFormValue};
use auxcert::{
    check_feasible_numeric, check_paper_mode, optimize, rho_star, solve_optimum, AuxFunction,
    BreakpointMode, DiscriminantVerdict, Error, Execution, Feasibility, TwoStepParams, Verdict,
};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

/// Feasibility certificates and ratio bounds for auxiliary functions.
///
/// Exit status: 0 feasible, 1 infeasible, 2 error.
#[derive(Parser, Debug)]
#[command(name = "auxcert", version)]
struct Cli {
    /// Significant digits for numeric output.
    #[arg(long, global = true, default_value_t = 12)]
    digits: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide G(z) <= 0 on [0, 1] and print the certificate as JSON.
    Verify {
        file: PathBuf,
        /// Exact rational certificate (step and constant functions only).
        #[arg(long, conflicts_with = "numeric")]
        exact: bool,
        /// Grid scan with golden-section refinement.
        #[arg(long)]
        numeric: bool,
        #[arg(long, default_value_t = 10_001)]
        grid: usize,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Exact certificate, plus the discriminant test for two-step inputs.
    Certify { file: PathBuf },
    /// The ratio bound 1 + 1 / (1 + int h) of a feasible function.
    Rho { file: PathBuf },
    /// Solve for the best two-step function.
    SolveTwoStep,
    /// Evaluate the radical closed forms of the two-step optimum.
    ClosedForm,
    /// Search k-step functions by cutting planes.
    Optimize {
        #[arg(long, default_value_t = 2)]
        pieces: usize,
        #[arg(long)]
        refine_breakpoints: bool,
        #[arg(long, default_value_t = 200)]
        max_rounds: usize,
        /// Write the optimised function as a function-spec JSON file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// CSV samples of h or G on a uniform grid.
    Plot {
        file: PathBuf,
        #[arg(long, default_value_t = 101)]
        samples: usize,
        #[arg(long, value_enum, default_value_t = What::H)]
        what: What,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum What {
    #[value(name = "h")]
    H,
    #[value(name = "G")]
    G,
}

enum CliError {
    Lib(Error),
    Io(PathBuf, std::io::Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

type Outcome = Result<Verdict, CliError>;

fn load(path: &Path) -> Result<AuxFunction, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(path.to_path_buf(), e))?;
    let h = AuxFunction::from_json_str(&text)?;
    h.validate().map_err(Error::Invalid)?;
    Ok(h)
}

// A closed pipe (e.g. `| head`) is not an error worth a panic.
fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(text.as_bytes()).and_then(|_| out.flush());
}

fn print_json(v: &Value) {
    emit(&(serde_json::to_string_pretty(v).expect("JSON values serialise") + "\n"));
}

/// A JSON number carrying `digits` significant digits verbatim.
fn number(x: f64, digits: usize) -> Value {
    serde_json::from_str(&format_sig(x, digits)).unwrap_or(Value::Null)
}

fn verify(
    path: &Path,
    exact: bool,
    numeric: bool,
    grid: usize,
    tol: f64,
    digits: usize,
) -> Outcome {
    let h = load(path)?;
    let reference = matches!(h, AuxFunction::ReferenceTv);
    if exact && reference {
        return Err(Error::Mode("reference_tv").into());
    }
    let cert = if numeric || reference {
        Certificate::Float(check_feasible_numeric(&h, grid, tol)?)
    } else {
        certify(&h)?
    };
    print_json(&cert.to_json());
    eprintln!("{}", cert.summary(digits));
    Ok(cert.verdict())
}

fn certify_cmd(path: &Path, digits: usize) -> Outcome {
    let h = load(path)?;
    let cert = match &h {
        AuxFunction::ReferenceTv => return Err(Error::Mode("reference_tv").into()),
        _ => certify(&h)?,
    };
    let mut out = json!({ "certificate": cert.to_json() });
    if let AuxFunction::Step(s) = &h {
        if let [b] = s.breakpoints() {
            let (a, beta) = (s.values()[0].clone(), s.values()[1].clone());
            match TwoStepParams::new(a, beta, b.clone()) {
                Ok(p) => {
                    let d = p.discriminants();
                    out["discriminants"] = json!(d
                        .iter()
                        .map(auxcert::number::ratio_to_text)
                        .collect::<Vec<_>>());
                    out["discriminants_approx"] = json!(p
                        .residuals()
                        .iter()
                        .map(|&r| number(r, digits))
                        .collect::<Vec<_>>());
                    out["discriminant_test"] = match check_paper_mode(&p) {
                        Ok(DiscriminantVerdict::Feasible) => json!("feasible"),
                        Ok(DiscriminantVerdict::NotProven) => json!("not proven"),
                        Err(e) => json!(e.to_string()),
                    };
                }
                Err(e) => out["discriminants"] = json!(e.to_string()),
            }
        }
    }
    print_json(&out);
    eprintln!("{}", cert.summary(digits));
    Ok(cert.verdict())
}

fn rho_cmd(path: &Path, digits: usize) -> Outcome {
    let h = load(path)?;
    match rho_star(&h, Feasibility::Required) {
        Ok(r) => {
            emit(&format!(
                "{}\n{}\n",
                format_sig(r.rho, digits),
                r.summary(digits)
            ));
            Ok(Verdict::Feasible)
        }
        Err(e @ Error::BoundNotEstablished { .. }) => {
            eprintln!("{e}");
            Ok(Verdict::Infeasible)
        }
        Err(e) => Err(e.into()),
    }
}

fn solve_two_step(digits: usize) -> Outcome {
    let p = solve_optimum()?;
    let digits = digits.max(17);
    let rho = auxcert::number::ratio_to_f64(&rho_star_exact(&p.to_step_function()));
    print_json(&json!({
        "alpha": number(p.alpha().value(), digits),
        "beta": number(p.beta().value(), digits),
        "x": number(p.x().value(), digits),
        "residuals": p.residuals().iter().map(|&r| number(r, digits)).collect::<Vec<_>>(),
        "rho": number(rho, digits),
    }));
    Ok(Verdict::Feasible)
}

fn closed_form(digits: usize) -> Outcome {
    let show = |c: ClosedFormValue| {
        json!({
            "value": number(c.value, digits.max(17)),
            "decimal": c.decimal,
            "imaginary_residue": number(c.imaginary_residue, 3),
        })
    };
    let (alpha, rho) = (closed_form_alpha()?, closed_form_rho()?);
    eprintln!("rho* = {}", format_sig(rho.value, digits));
    print_json(&json!({ "alpha": show(alpha), "rho": show(rho) }));
    Ok(Verdict::Feasible)
}

fn optimize_cmd(
    pieces: usize,
    refine: bool,
    max_rounds: usize,
    out: Option<&Path>,
    digits: usize,
) -> Outcome {
    let mode = if refine {
        BreakpointMode::Refine
    } else {
        BreakpointMode::Uniform
    };
    let cfg = OptimizeConfig {
        max_rounds,
        ..OptimizeConfig::new(pieces, mode)
    };
    let r = optimize(&cfg)?;
    if let Some(path) = out {
        let text = serde_json::to_string_pretty(&AuxFunction::Step(r.h.clone()).to_json_value())
            .expect("JSON values serialise");
        fs::write(path, text + "\n").map_err(|e| CliError::Io(path.to_path_buf(), e))?;
    }
    emit(&format!(
        "{}\nrounds {}, cuts {}; {}\n",
        format_sig(r.rho, digits),
        r.rounds,
        r.cuts_used.len(),
        r.certificate.summary(digits)
    ));
    Ok(r.certificate.verdict)
}

fn plot(path: &Path, samples: usize, what: What, digits: usize) -> Outcome {
    let h = load(path)?;
    if samples == 0 {
        return Err(Error::Config("need at least one sample".into()).into());
    }
    let (target, header) = match what {
        What::H => (PlotTarget::Function, "sigma,value"),
        What::G => (PlotTarget::Condition, "z,G"),
    };
    let rows = sample(&h, target, samples, Execution::default())?;
    let mut csv = String::from(header);
    csv.push('\n');
    for (x, y) in rows {
        csv.push_str(&format!(
            "{},{}\n",
            format_sig(x, digits),
            format_sig(y, digits)
        ));
    }
    emit(&csv);
    Ok(Verdict::Feasible)
}

fn run(cli: Cli) -> Outcome {
    let digits = cli.digits.max(1);
    match cli.command {
        Command::Verify {
            file,
            exact,
            numeric,
            grid,
            tol,
        } => verify(&file, exact, numeric, grid, tol, digits),
        Command::Certify { file } => certify_cmd(&file, digits),
        Command::Rho { file } => rho_cmd(&file, digits),
        Command::SolveTwoStep => solve_two_step(digits),
        Command::ClosedForm => closed_form(digits),
        Command::Optimize {
            pieces,
            refine_breakpoints,
            max_rounds,
            out,
        } => optimize_cmd(
            pieces,
            refine_breakpoints,
            max_rounds,
            out.as_deref(),
            digits,
        ),
        Command::Plot {
            file,
            samples,
            what,
        } => plot(&file, samples, what, digits),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Verdict::Feasible) => ExitCode::from(0),
        Ok(Verdict::Infeasible) => ExitCode::from(1),
        Err(CliError::Lib(Error::Invalid(violations))) => {
            eprintln!("error: invalid function");
            for v in violations {
                eprintln!("  - {v}");
            }
            ExitCode::from(2)
        }
        Err(CliError::Lib(Error::Json(e))) => {
            eprintln!(
                "error: malformed JSON at line {} column {}: {e}",
                e.line(),
                e.column()
            );
            ExitCode::from(2)
        }
        Err(CliError::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(CliError::Io(path, e)) => {
            eprintln!("error: {}: {e}", path.display());
            ExitCode::from(2)
        }
    }
}
