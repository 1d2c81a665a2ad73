//! Parsers for dimension lists and numeric grids given on the command line.

use qudit_epp::algebra::primes_in;

/// `7`, `2,3,5`, `2..40` (inclusive) or `primes:2..97`.
pub fn parse_dims(s: &str) -> Result<Vec<usize>, String> {
    let s = s.trim();
    let (primes, body) = match s.strip_prefix("primes:") {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let dims = if let Some((lo, hi)) = body.split_once("..") {
        let lo = parse_usize(lo)?;
        let hi = parse_usize(hi)?;
        if lo > hi {
            return Err(format!("empty range `{s}`"));
        }
        if primes {
            primes_in(lo, hi)
        } else {
            (lo..=hi).collect()
        }
    } else {
        if primes {
            return Err(format!("`primes:` needs a range, e.g. primes:2..97 (got `{s}`)"));
        }
        body.split(',').map(parse_usize).collect::<Result<Vec<_>, _>>()?
    };
    if dims.is_empty() {
        return Err(format!("`{s}` selects no dimensions"));
    }
    Ok(dims)
}

fn parse_usize(s: &str) -> Result<usize, String> {
    s.trim().parse().map_err(|_| format!("`{s}` is not a non-negative integer"))
}

fn parse_f64(s: &str) -> Result<f64, String> {
    s.trim()
        .parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| format!("`{s}` is not a finite number"))
}

/// `0.9`, `0.8,0.9,1` or `start:stop:step` (inclusive of `stop`).
pub fn parse_grid(s: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [start, stop, step] => {
            let (start, stop, step) = (parse_f64(start)?, parse_f64(stop)?, parse_f64(step)?);
            if !(step > 0.0) || stop < start {
                return Err(format!("bad grid `{s}`: need start <= stop and step > 0"));
            }
            let count = ((stop - start) / step + 1e-9).floor() as usize;
            if count > 1_000_000 {
                return Err(format!("grid `{s}` has too many points"));
            }
            Ok((0..=count).map(|i| start + i as f64 * step).collect())
        }
        [_] => s.split(',').map(parse_f64).collect(),
        _ => Err(format!("bad grid `{s}`: use a list or start:stop:step")),
    }
}

/// `100`, `10:1000` or `10:1000:10`.
pub fn parse_n_sweep(s: &str) -> Result<Vec<u64>, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let int = |x: &str| x.trim().parse::<u64>().map_err(|_| format!("`{x}` is not a positive integer"));
    let (lo, hi, step) = match parts.as_slice() {
        [n] => {
            let n = int(n)?;
            (n, n, 1)
        }
        [lo, hi] => (int(lo)?, int(hi)?, 1),
        [lo, hi, step] => (int(lo)?, int(hi)?, int(step)?),
        _ => return Err(format!("bad n sweep `{s}`")),
    };
    if lo > hi || step == 0 {
        return Err(format!("bad n sweep `{s}`: need lo <= hi and step > 0"));
    }
    if (hi - lo) / step > 1_000_000 {
        return Err(format!("n sweep `{s}` has too many points"));
    }
    Ok((lo..=hi).step_by(step as usize).collect())
}
