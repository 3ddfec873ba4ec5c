//! Range and count syntax shared by flags and the config file.

use crate::error::{CliError, Result};

/// Safety cap on grid sizes.
pub const MAX_POINTS: usize = 1 << 20;

/// Parses `start:stop:step` (inclusive of `stop` up to rounding), a single
/// number, or a comma-separated list of either.
pub fn parse_real_grid(s: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for part in s.split(',') {
        let fields: Vec<&str> = part.split(':').map(str::trim).collect();
        match fields.as_slice() {
            [v] => out.push(parse_real(v)?),
            [a, b, c] => {
                let (start, stop, step) = (parse_real(a)?, parse_real(b)?, parse_real(c)?);
                if !(step > 0.0) || stop < start {
                    return Err(CliError::usage(format!("range {part:?} needs start <= stop and step > 0")));
                }
                let count = ((stop - start) / step * (1.0 + 1e-12)).floor() + 1.0;
                if count > MAX_POINTS as f64 {
                    return Err(CliError::usage(format!("range {part:?} has more than {MAX_POINTS} points")));
                }
                out.extend((0..count as usize).map(|i| start + i as f64 * step));
            }
            _ => return Err(CliError::usage(format!("malformed range {part:?}, expected start:stop:step"))),
        }
        if out.len() > MAX_POINTS {
            return Err(CliError::usage(format!("grid has more than {MAX_POINTS} points")));
        }
    }
    Ok(out)
}

/// Parses integer ranges: `a..b` (inclusive), `a:b:step`, `k`, or a
/// comma-separated list of these.
pub fn parse_int_grid(s: &str) -> Result<Vec<u64>> {
    let mut out = Vec::new();
    for part in s.split(',') {
        let part = part.trim();
        let (start, stop, step) = if let Some((a, b)) = part.split_once("..") {
            let b = b.strip_prefix('=').unwrap_or(b);
            (parse_count(a)?, parse_count(b)?, 1)
        } else {
            match part.split(':').collect::<Vec<_>>().as_slice() {
                [v] => {
                    let v = parse_count(v)?;
                    (v, v, 1)
                }
                [a, b, c] => (parse_count(a)?, parse_count(b)?, parse_count(c)?),
                _ => return Err(CliError::usage(format!("malformed integer range {part:?}"))),
            }
        };
        if step == 0 || stop < start {
            return Err(CliError::usage(format!("range {part:?} needs start <= stop and step > 0")));
        }
        if (stop - start) / step >= MAX_POINTS as u64 || out.len() > MAX_POINTS {
            return Err(CliError::usage(format!("range {part:?} has more than {MAX_POINTS} points")));
        }
        out.extend((start..=stop).step_by(step as usize));
    }
    Ok(out)
}

pub fn parse_real(s: &str) -> Result<f64> {
    let v: f64 = s.trim().parse().map_err(|_| CliError::usage(format!("not a number: {s:?}")))?;
    if !v.is_finite() {
        return Err(CliError::usage(format!("not a finite number: {s:?}")));
    }
    Ok(v)
}

/// Parses a nonnegative integer, also in exponent form such as `1e6`.
pub fn parse_count(s: &str) -> Result<u64> {
    let s = s.trim();
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    let bad = || CliError::usage(format!("not a nonnegative integer: {s:?}"));
    let (mantissa, exp) = s.split_once(['e', 'E']).ok_or_else(bad)?;
    let exp: u32 = exp.strip_prefix('+').unwrap_or(exp).parse().map_err(|_| bad())?;
    let (int, frac) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int.is_empty() && frac.is_empty() || !(int.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit())) {
        return Err(bad());
    }
    let frac_len = frac.len() as u32;
    if frac_len > exp {
        return Err(bad());
    }
    let digits: u64 = format!("{int}{frac}").parse().map_err(|_| bad())?;
    10u64.checked_pow(exp - frac_len).and_then(|p| digits.checked_mul(p)).ok_or_else(bad)
}
