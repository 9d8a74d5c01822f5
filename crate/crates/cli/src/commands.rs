use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use deuteron_core::coordinate::sample;
use deuteron_core::fitting::{fit_parameters, FitOptions, FitTargets};
use deuteron_core::model::REFERENCE_ALPHA_INV_FM;
use deuteron_core::momentum::{form_factor_central, form_factor_tensor};
use deuteron_core::validation::{validate, Branches, Tolerances};
use deuteron_core::{report, u_momentum, w_momentum, ModelParams};

use crate::args::{
    FitArgs, MomentumArgs, ObservablesArgs, OutputArgs, ValidateArgs, WavefunctionsArgs,
};
use crate::error::{CliError, EXIT_CHECK_FAILED, EXIT_NOT_CONVERGED};
use crate::params::{load_file, resolve};

struct Output {
    path: Option<String>,
    inner: Box<dyn Write>,
}

impl Output {
    fn open(args: &OutputArgs) -> Result<Self, CliError> {
        match &args.output {
            Some(path) => {
                let file = File::create(path).map_err(|e| CliError::io(path, e))?;
                Ok(Self {
                    path: Some(path.display().to_string()),
                    inner: Box::new(BufWriter::new(file)),
                })
            }
            None => Ok(Self {
                path: None,
                inner: Box::new(BufWriter::new(io::stdout())),
            }),
        }
    }

    fn io_error(&self, e: io::Error) -> CliError {
        let path = self.path.clone().unwrap_or_else(|| "<stdout>".to_string());
        CliError::Io { path, source: e }
    }

    fn write_str(&mut self, s: &str) -> Result<(), CliError> {
        self.inner
            .write_all(s.as_bytes())
            .map_err(|e| self.io_error(e))
    }

    fn finish(mut self) -> Result<(), CliError> {
        self.inner.flush().map_err(|e| self.io_error(e))
    }
}

fn json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

/// Grid `lo, lo + step, ..., hi`; values rounded to 12 decimals so that the
/// printed abscissae are exact multiples of the step.
pub fn grid(lo: f64, hi: f64, step: f64, name: &str) -> Result<Vec<f64>, CliError> {
    if !(step > 0.0) || !step.is_finite() {
        return Err(CliError::Config(format!(
            "{name} step must be positive (got {step})"
        )));
    }
    if !(lo >= 0.0) || !(hi > lo) || !hi.is_finite() {
        return Err(CliError::Config(format!(
            "{name} grid needs 0 <= min < max (got {lo}..{hi})"
        )));
    }
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    Ok((0..=n)
        .map(|i| {
            let x = lo + i as f64 * step;
            format!("{x:.12}").parse().expect("formatted float parses")
        })
        .collect())
}

pub fn observables(args: &ObservablesArgs) -> Result<i32, CliError> {
    let p = resolve(&args.params)?;
    let rep = report(&p)?;
    let mut out = Output::open(&args.output)?;
    out.write_str(&json(&rep))?;
    out.finish()?;
    for w in &rep.warnings {
        eprintln!("warning: {w}");
    }
    if !args.quiet {
        eprintln!("{}", summary_table(&p, &rep));
    }
    Ok(0)
}

fn summary_table(p: &ModelParams, rep: &deuteron_core::ObservablesReport) -> String {
    let rows = [
        ("b1", p.b1(), "fm"),
        ("b2", p.b2(), "fm"),
        ("alpha", p.alpha(), "fm^-1"),
        ("A", p.norm_s(), "fm^-1/2"),
        ("B", p.norm_d(), "fm^-1/2"),
        ("P_S", rep.p_s, ""),
        ("P_D", rep.p_d, ""),
        ("A_S", rep.a_s, "fm^-1/2"),
        ("A_D", rep.a_d, "fm^-1/2"),
        ("eta", rep.eta, ""),
        ("r_rms", rep.r_rms_fm, "fm"),
        ("Q", rep.q, "fm^2"),
    ];
    let mut s = String::new();
    for (name, value, unit) in rows {
        s.push_str(format!("{name:<6} {value:>14.6} {unit}").trim_end());
        s.push('\n');
    }
    s.push_str(&format!("probabilities: {:?}", rep.probability_path).to_lowercase());
    s
}

struct Overlay {
    headers: Vec<String>,
    rows: Vec<(f64, Vec<String>)>,
}

impl Overlay {
    fn read(path: &Path) -> Result<Self, CliError> {
        let file = File::open(path).map_err(|e| CliError::io(path, e))?;
        let mut reader = csv::Reader::from_reader(file);
        let headers: Vec<String> = reader
            .headers()?
            .iter()
            .skip(1)
            .map(|h| match h {
                "r_fm" | "u" | "w" | "region" => format!("ref_{h}"),
                _ => h.to_string(),
            })
            .collect();
        let mut rows = Vec::new();
        for rec in reader.records() {
            let rec = rec?;
            let r: f64 = rec
                .get(0)
                .and_then(|v| v.trim().parse().ok())
                .ok_or_else(|| {
                    CliError::Config(format!("{}: non-numeric r in overlay", path.display()))
                })?;
            rows.push((r, rec.iter().skip(1).map(str::to_string).collect()));
        }
        if rows.is_empty() {
            return Err(CliError::Config(format!(
                "{}: overlay has no rows",
                path.display()
            )));
        }
        rows.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(Self { headers, rows })
    }

    fn nearest(&self, r: f64) -> &[String] {
        let i = self.rows.partition_point(|row| row.0 < r);
        let best = if i == 0 {
            0
        } else if i == self.rows.len() || r - self.rows[i - 1].0 <= self.rows[i].0 - r {
            i - 1
        } else {
            i
        };
        &self.rows[best].1
    }
}

fn csv_writer(out: Output) -> csv::Writer<Output> {
    csv::WriterBuilder::new().from_writer(out)
}

impl Write for Output {
    fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
        self.inner.write(buf)
    }

    fn flush(&mut self) -> io::Result<()> {
        self.inner.flush()
    }
}

fn finish_csv(w: csv::Writer<Output>) -> Result<(), CliError> {
    let out = w.into_inner().map_err(|e| CliError::Io {
        path: "<csv>".to_string(),
        source: io::Error::new(e.error().kind(), e.error().to_string()),
    })?;
    out.finish()
}

pub fn wavefunctions(args: &WavefunctionsArgs) -> Result<i32, CliError> {
    let p = resolve(&args.params)?;
    let rs = grid(args.r_min, args.r_max, args.step, "r")?;
    let overlay = args.overlay.as_deref().map(Overlay::read).transpose()?;
    let mut w = csv_writer(Output::open(&args.output)?);
    let mut header = vec!["r_fm".to_string(), "u".into(), "w".into(), "region".into()];
    if let Some(o) = &overlay {
        header.extend(o.headers.iter().cloned());
    }
    w.write_record(&header)?;
    for &r in &rs {
        let s = sample(r, &p);
        let mut rec = vec![
            r.to_string(),
            s.u.to_string(),
            s.w.to_string(),
            s.region.to_string(),
        ];
        if let Some(o) = &overlay {
            rec.extend(o.nearest(r).iter().cloned());
        }
        w.write_record(&rec)?;
    }
    finish_csv(w)?;
    Ok(0)
}

pub fn momentum(args: &MomentumArgs) -> Result<i32, CliError> {
    let p = resolve(&args.params)?;
    let ks = grid(args.k_min, args.k_max, args.k_step, "k")?;
    let mut w = csv_writer(Output::open(&args.output)?);
    w.write_record(["k", "g_C", "g_T", "u_k", "w_k"])?;
    for &k in &ks {
        w.write_record([
            k.to_string(),
            form_factor_central(k, &p).to_string(),
            form_factor_tensor(k, &p).to_string(),
            u_momentum(k, &p).to_string(),
            w_momentum(k, &p).to_string(),
        ])?;
    }
    finish_csv(w)?;
    Ok(0)
}

pub fn fit(args: &FitArgs) -> Result<i32, CliError> {
    let targets = FitTargets::new(args.r_rms, args.q)?;
    let opts = FitOptions {
        tolerance: args.tolerance,
        max_iterations: args.max_iterations,
        ..FitOptions::default()
    };
    let file = load_file(args.params_json.as_deref())?;
    let alpha = args
        .alpha
        .or(file.alpha_inv_fm)
        .unwrap_or(REFERENCE_ALPHA_INV_FM);
    let b0 = args.b0.or(file.b_fm).or(file.b1_fm).unwrap_or(1.2);
    let ratio0 = args.ratio0.or(file.ratio).unwrap_or(2.0);
    let res = fit_parameters(&targets, alpha, (b0, ratio0), &opts)?;
    let mut out = Output::open(&args.output)?;
    out.write_str(&json(&res))?;
    out.finish()?;
    if res.converged {
        Ok(0)
    } else {
        eprintln!(
            "fit did not converge: best point b = {:.6} fm, ratio = {:.6}, residual {:.3e}",
            res.b, res.ratio, res.residual_norm
        );
        Ok(EXIT_NOT_CONVERGED)
    }
}

pub fn validate_cmd(args: &ValidateArgs) -> Result<i32, CliError> {
    let p = resolve(&args.params)?;
    let tol = Tolerances {
        continuity: args.tol_continuity,
        derivative: args.tol_derivative,
        transform: args.tol_transform,
        parseval: args.tol_parseval,
        ..Tolerances::default()
    };
    let branches = match args.corrupt_middle_w {
        Some(scale) => Branches::with_middle_w_scaled(scale),
        None => Branches::EXACT,
    };
    let rep = validate(&p, &branches, &tol)?;
    let mut out = Output::open(&args.output)?;
    if args.json {
        out.write_str(&json(&rep))?;
    } else {
        let mut s = format!(
            "{:<18} {:<22} {:>8} {:>12} {:>10}  result\n",
            "check", "quantity", "r_fm", "deviation", "tolerance"
        );
        for c in &rep.checks {
            let r = c.r_fm.map_or("-".to_string(), |r| format!("{r:.4}"));
            s.push_str(&format!(
                "{:<18} {:<22} {:>8} {:>12.3e} {:>10.1e}  {}\n",
                c.check,
                c.quantity,
                r,
                c.deviation,
                c.tolerance,
                if c.passed { "pass" } else { "FAIL" }
            ));
        }
        s.push_str(if rep.passed {
            "all checks passed\n"
        } else {
            "some checks FAILED\n"
        });
        out.write_str(&s)?;
    }
    out.finish()?;
    Ok(if rep.passed { 0 } else { EXIT_CHECK_FAILED })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_is_exact_multiples() {
        let g = grid(0.0, 12.0, 0.05, "r").unwrap();
        assert_eq!(g.len(), 241);
        assert_eq!(g[3], 0.15);
        assert_eq!(g[240], 12.0);
    }

    #[test]
    fn grid_rejects_bad_specs() {
        assert!(grid(0.0, 1.0, 0.0, "r").is_err());
        assert!(grid(1.0, 1.0, 0.1, "r").is_err());
        assert!(grid(-1.0, 1.0, 0.1, "r").is_err());
    }
}
