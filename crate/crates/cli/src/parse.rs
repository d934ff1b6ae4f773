//! Value parsers for command-line arguments.

use std::f64::consts::PI;
use std::ops::RangeInclusive;

use moebius_core::contraction::Window;
use moebius_core::Complex64;

fn number(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("'{s}' is not a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("'{s}' is not finite"))
    }
}

/// `re:im`, or a bare real number.
pub fn complex(s: &str) -> Result<Complex64, String> {
    match s.split_once(':') {
        Some((re, im)) => Ok(Complex64::new(number(re)?, number(im)?)),
        None => Ok(Complex64::new(number(s)?, 0.0)),
    }
}

/// `x0:x1:y0:y1`
pub fn window(s: &str) -> Result<Window, String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 4 {
        return Err(format!("window '{s}' must be x0:x1:y0:y1"));
    }
    let v = parts.iter().map(|p| number(p)).collect::<Result<Vec<_>, _>>()?;
    Window::new(v[0], v[1], v[2], v[3]).map_err(|e| e.to_string())
}

/// `nx:ny`, each at least 2.
pub fn resolution(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(':').ok_or_else(|| format!("resolution '{s}' must be nx:ny"))?;
    let nx: usize = a.trim().parse().map_err(|_| format!("'{a}' is not a count"))?;
    let ny: usize = b.trim().parse().map_err(|_| format!("'{b}' is not a count"))?;
    if nx < 2 || ny < 2 {
        return Err("resolution must be at least 2 in each axis".into());
    }
    Ok((nx, ny))
}

/// `lo..hi` (inclusive) or a single dimension.
pub fn dims(s: &str) -> Result<RangeInclusive<usize>, String> {
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (a, b.trim_start_matches('=')),
        None => (s, s),
    };
    let lo: usize = lo.trim().parse().map_err(|_| format!("'{lo}' is not a dimension"))?;
    let hi: usize = hi.trim().parse().map_err(|_| format!("'{hi}' is not a dimension"))?;
    if lo == 0 || lo > hi {
        return Err(format!("dimension range '{s}' must be nonempty and start at 1 or more"));
    }
    Ok(lo..=hi)
}

/// A real number or a multiple of pi: `0.5`, `pi`, `-pi/4`, `2*pi/3`.
pub fn angle(s: &str) -> Result<f64, String> {
    let t = s.trim();
    let Some(at) = t.find("pi") else {
        return number(t);
    };
    let (head, tail) = (&t[..at], &t[at + 2..]);
    let factor = match head.trim_end_matches('*') {
        "" => 1.0,
        "-" => -1.0,
        f => number(f)?,
    };
    let divisor = match tail {
        "" => 1.0,
        d => number(d.strip_prefix('/').ok_or_else(|| format!("cannot read angle '{s}'"))?)?,
    };
    if divisor == 0.0 {
        return Err(format!("angle '{s}' divides by zero"));
    }
    Ok(factor * PI / divisor)
}

/// `n:theta:r` for a `g_r` witness.
pub fn gr_witness(s: &str) -> Result<(u32, f64, f64), String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("witness '{s}' must be n:theta:r"));
    }
    let n: u32 = parts[0].trim().parse().map_err(|_| format!("'{}' is not a power", parts[0]))?;
    Ok((n, angle(parts[1])?, number(parts[2])?))
}
