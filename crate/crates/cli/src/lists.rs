//! Axis value lists: `0,1,2`, `30,40,...,90` and `-6..-1`.

fn number(s: &str) -> Result<f64, String> {
    let s = s.trim();
    s.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| format!("'{s}' is not a number"))
}

/// Parses an axis list. `a..b` is an inclusive range with step 1; a `...`
/// element continues the step set by the two values before it up to the
/// value after it.
pub fn parse_values(text: &str) -> Result<Vec<f64>, String> {
    let text = text.trim();
    if text.is_empty() {
        return Err("empty value list".into());
    }
    if !text.contains(',') {
        if let Some((lo, hi)) = split_range(text) {
            let (lo, hi) = (number(lo)?, number(hi)?);
            if lo > hi {
                return Err(format!("range {text} runs backwards"));
            }
            return Ok(progression(lo, 1.0, hi));
        }
    }

    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let mut out: Vec<f64> = Vec::new();
    let mut i = 0;
    while i < parts.len() {
        if parts[i] == "..." {
            if out.len() < 2 || i + 1 >= parts.len() {
                return Err("'...' needs two values before it and one after".into());
            }
            let step = out[out.len() - 1] - out[out.len() - 2];
            let end = number(parts[i + 1])?;
            let last = out[out.len() - 1];
            if step == 0.0 || (end - last) / step < 0.0 {
                return Err(format!("'...' cannot step by {step} from {last} to {end}"));
            }
            let tail = progression(last, step, end);
            if (tail[tail.len() - 1] - end).abs() > 1e-9 * step.abs() {
                return Err(format!("{end} is not reached from {last} in steps of {step}"));
            }
            out.extend(&tail[1..tail.len() - 1]);
            out.push(end);
            i += 2;
        } else {
            out.push(number(parts[i])?);
            i += 1;
        }
    }
    Ok(out)
}

/// `a..b` where either side may be negative.
fn split_range(text: &str) -> Option<(&str, &str)> {
    let at = text.get(1..)?.find("..")? + 1;
    let (lo, rest) = text.split_at(at);
    let hi = &rest[2..];
    (!hi.starts_with('.')).then_some((lo, hi))
}

/// `start, start + step, …` up to `end`, computed as `start + k·step` so
/// values do not drift.
fn progression(start: f64, step: f64, end: f64) -> Vec<f64> {
    let n = ((end - start) / step + 1e-9).floor() as usize;
    (0..=n).map(|k| start + k as f64 * step).collect()
}
