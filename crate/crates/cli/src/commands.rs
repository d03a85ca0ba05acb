use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use cesaro_core::cesaro::{cesaro_apply_numeric, cesaro_kernel_closed, v_apply, v_kernel_closed};
use cesaro_core::hardy::KernelFunction;
use cesaro_core::phi::{exact_ratio, phi_closed, phi_curve as curve, write_curve_csv};
use cesaro_core::search::{maximize_ratio, SearchConfig};
use cesaro_core::verify::{self, CheckRow, VerifyConfig};
use num_complex::Complex64;

use crate::svg::render_curve;
use crate::{Format, RunConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] cesaro_core::Error),
    #[error("I/O: {0}")]
    Io(#[from] io::Error),
    #[error("CSV: {0}")]
    Csv(#[from] csv::Error),
}

type CliResult = Result<ExitCode, CliError>;

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn complex(z: Complex64) -> String {
    // Adding +0 folds -0 into 0.
    format!("{:.16e} {:+.16e}i", z.re + 0.0, z.im + 0.0)
}

fn output(config: &RunConfig) -> Result<Box<dyn Write>, CliError> {
    Ok(match &config.out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn require_csv(config: &RunConfig, command: &str) -> Result<(), CliError> {
    match config.format {
        Format::Csv => Ok(()),
        Format::Svg => Err(CliError::Usage(format!(
            "{command} does not produce SVG output"
        ))),
    }
}

fn print_row(out: &mut impl Write, row: &CheckRow) -> io::Result<()> {
    let status = if row.passed { "PASS" } else { "FAIL" };
    write!(
        out,
        "[{status}] {:>2} {}: value {}, measured {} {} {}",
        row.criterion,
        row.name,
        num(row.value),
        num(row.measured),
        row.relation,
        num(row.threshold)
    )?;
    if !row.note.is_empty() {
        write!(out, " ({})", row.note)?;
    }
    writeln!(out)
}

pub fn verify(config: &RunConfig) -> CliResult {
    require_csv(config, "verify")?;
    let rows = verify::run(&VerifyConfig {
        tol: config.tol,
        seed: config.seed,
        budget: config.budget as usize,
    });

    let mut stdout = io::stdout().lock();
    for row in &rows {
        print_row(&mut stdout, row)?;
    }
    let passed = rows.iter().filter(|r| r.passed).count();
    writeln!(stdout, "{passed} of {} checks passed", rows.len())?;

    if let Some(path) = &config.out {
        let mut writer = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_path(path)?;
        writer.write_record([
            "criterion",
            "name",
            "value",
            "measured",
            "relation",
            "threshold",
            "passed",
            "note",
        ])?;
        for row in &rows {
            writer.write_record([
                row.criterion.to_string(),
                row.name.to_string(),
                num(row.value),
                num(row.measured),
                row.relation.to_string(),
                num(row.threshold),
                row.passed.to_string(),
                row.note.clone(),
            ])?;
        }
        writer.flush()?;
    }

    Ok(if passed == rows.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

pub fn phi_curve(p_min: f64, p_max: f64, steps: usize, config: &RunConfig) -> CliResult {
    let points = curve(p_min, p_max, steps)?;
    let mut out = output(config)?;
    match config.format {
        Format::Csv => write_curve_csv(&mut out, &points)?,
        Format::Svg => out.write_all(render_curve(&points).as_bytes())?,
    }
    out.flush()?;
    Ok(ExitCode::SUCCESS)
}

pub fn ratio(p: f64, t: f64, config: &RunConfig) -> CliResult {
    require_csv(config, "ratio")?;
    let point = exact_ratio(p, t, config.tol)?;
    let phi = phi_closed(p)?.phi;
    let mut out = output(config)?;
    writeln!(out, "p = {}", num(p))?;
    writeln!(out, "t = {}", num(t))?;
    writeln!(out, "ratio_pth_power = {}", num(point.ratio_pth_power))?;
    writeln!(out, "ratio = {}", num(point.ratio()))?;
    writeln!(out, "phi = {}", num(phi))?;
    writeln!(out, "phi_root = {}", num(phi.powf(1.0 / p)))?;
    writeln!(out, "error_bound = {}", num(point.error_bound))?;
    out.flush()?;
    Ok(ExitCode::SUCCESS)
}

pub fn search(p: f64, kernels: usize, config: &RunConfig) -> CliResult {
    require_csv(config, "search")?;
    let search = SearchConfig {
        seed: config.seed,
        budget: config.budget as usize,
        objective_tol: SearchConfig::default().objective_tol.max(config.tol),
        final_tol: config.tol / 10.0,
        ..SearchConfig::default()
    };
    let result = maximize_ratio(p, kernels, &search)?;
    let bound = phi_closed(p)?.phi.powf(1.0 / p);
    let mut out = output(config)?;
    writeln!(out, "p = {}", num(p))?;
    writeln!(out, "kernels = {kernels}")?;
    writeln!(out, "best_ratio = {}", num(result.best_ratio))?;
    writeln!(out, "phi_root = {}", num(bound))?;
    writeln!(out, "excess = {}", num(result.best_ratio - bound))?;
    writeln!(out, "evaluations = {}", result.evaluations)?;
    writeln!(out, "converged = {}", result.converged)?;
    for (i, (c, t)) in result.parameters.terms().enumerate() {
        writeln!(out, "term {} = {} at t = {}", i + 1, complex(c), num(t))?;
    }
    out.flush()?;
    Ok(ExitCode::SUCCESS)
}

pub fn cesaro_eval(t: f64, p: f64, z_re: f64, z_im: f64, config: &RunConfig) -> CliResult {
    require_csv(config, "cesaro-eval")?;
    let z = Complex64::new(z_re, z_im);
    let f = KernelFunction::new(t)?;
    let c_numeric = cesaro_apply_numeric(&f, z, config.tol)?;
    let c_closed = cesaro_kernel_closed(t, z)?;
    let v_numeric = v_apply(&f, p, z, config.tol)?;
    let v_closed = v_kernel_closed(t, p, z)?;
    let mut out = output(config)?;
    writeln!(out, "t = {}", num(t))?;
    writeln!(out, "p = {}", num(p))?;
    writeln!(out, "z = {}", complex(z))?;
    writeln!(out, "C_numeric = {}", complex(c_numeric))?;
    writeln!(out, "C_closed = {}", complex(c_closed))?;
    writeln!(out, "C_abs_diff = {}", num((c_numeric - c_closed).norm()))?;
    writeln!(out, "V_numeric = {}", complex(v_numeric))?;
    writeln!(out, "V_closed = {}", complex(v_closed))?;
    writeln!(out, "V_abs_diff = {}", num((v_numeric - v_closed).norm()))?;
    out.flush()?;
    Ok(ExitCode::SUCCESS)
}
