use anyhow::{bail, Context};

fn number(s: &str) -> anyhow::Result<f64> {
    let v: f64 = s
        .trim()
        .parse()
        .with_context(|| format!("not a number: {s:?}"))?;
    if !v.is_finite() {
        bail!("numbers must be finite, got {s:?}");
    }
    Ok(v)
}

/// Comma-separated coordinates.
pub fn parse_point(s: &str) -> anyhow::Result<Vec<f64>> {
    s.split(',').map(number).collect()
}

/// A comma list `0.1,0.01` or `geom:start:end:count` (geometric, both ends
/// included).
pub fn parse_grid(s: &str) -> anyhow::Result<Vec<f64>> {
    if let Some(rest) = s.strip_prefix("geom:") {
        let parts: Vec<&str> = rest.split(':').collect();
        let [start, end, count] = parts[..] else {
            bail!("geometric grid must be geom:start:end:count, got {s:?}");
        };
        let (start, end) = (number(start)?, number(end)?);
        let count: usize = count
            .trim()
            .parse()
            .with_context(|| format!("bad grid count in {s:?}"))?;
        if count < 2 || !(start > 0.0 && end > 0.0) {
            bail!("geometric grid needs positive ends and at least 2 points, got {s:?}");
        }
        let ratio = (end / start).powf(1.0 / (count - 1) as f64);
        let mut out: Vec<f64> = (0..count).map(|k| start * ratio.powi(k as i32)).collect();
        out[count - 1] = end;
        // Decimal ends such as 1e-3 come out exactly for powers of ten.
        for v in &mut out {
            let exp = v.log10().round();
            if (*v - 10f64.powf(exp)).abs() <= 1e-12 * *v {
                *v = 10f64.powf(exp);
            }
        }
        return Ok(out);
    }
    s.split(',').map(number).collect()
}
