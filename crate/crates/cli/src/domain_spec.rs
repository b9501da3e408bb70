//! Domain mini-language: `lo:hi` per axis joined by `,`, boxes joined by `+`.
//!
//! A box written with a single axis is repeated on every axis.

use kernel_roots::{Domain, LogBox};

pub fn parse_domain(spec: &str, n: usize) -> Result<Domain, String> {
    let boxes = spec
        .split('+')
        .map(|b| parse_box(b.trim(), n))
        .collect::<Result<Vec<_>, _>>()?;
    Domain::new(boxes).map_err(|e| format!("domain '{spec}': {e}"))
}

fn parse_box(spec: &str, n: usize) -> Result<LogBox, String> {
    let mut lo = Vec::new();
    let mut hi = Vec::new();
    for axis in spec.split(',') {
        let (a, b) = axis
            .split_once(':')
            .ok_or_else(|| format!("domain axis '{axis}' is not of the form lo:hi"))?;
        lo.push(parse_bound(a)?);
        hi.push(parse_bound(b)?);
    }
    if lo.len() == 1 && n > 1 {
        lo = vec![lo[0]; n];
        hi = vec![hi[0]; n];
    }
    if lo.len() != n {
        return Err(format!(
            "domain box '{spec}' has {} axes, the system has {n}",
            lo.len()
        ));
    }
    LogBox::new(lo, hi).map_err(|e| format!("domain box '{spec}': {e}"))
}

fn parse_bound(s: &str) -> Result<f64, String> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| format!("'{s}' is not a number"))?;
    if !v.is_finite() {
        return Err(format!("domain bound '{s}' must be finite"));
    }
    Ok(v)
}
