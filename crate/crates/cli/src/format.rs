use std::io::Write;

use srcnoise_core::keyrate::SweepRow;
use srcnoise_core::Reconciliation;

use crate::CliError;

pub const CSV_HEADER: [&str; 7] = ["model", "recon", "T", "i_ab", "holevo", "key_rate", "feasible"];

/// C-style `%.{digits}g`.
pub fn fmt_g(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    if exp < -4 || exp >= digits as i32 {
        let mantissa = trim_fraction(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_fraction(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn fmt_num(x: f64) -> String {
    fmt_g(x, 12)
}

/// Infeasible rows leave the numeric fields empty.
pub fn write_csv<W: Write>(out: W, rows: &[SweepRow], recon: Reconciliation, clamp_zero: bool) -> Result<(), CliError> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(CSV_HEADER)?;
    for row in rows {
        let mut record = vec![row.model.name().to_string(), recon.name().to_string(), fmt_num(row.t)];
        match &row.outcome {
            Ok(p) => {
                let k = if clamp_zero { p.key_rate.max(0.0) } else { p.key_rate };
                record.extend([fmt_num(p.i_ab), fmt_num(p.holevo), fmt_num(k), "true".into()]);
            }
            Err(_) => record.extend([String::new(), String::new(), String::new(), "false".into()]),
        }
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}
