//! Parameter grid specifications: `start:stop:count:scale`, a comma list, or
//! a single number.

use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub struct GridError(pub String);

impl fmt::Display for GridError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for GridError {}

fn number(text: &str, spec: &str) -> Result<f64, GridError> {
    let v: f64 = text
        .trim()
        .parse()
        .map_err(|_| GridError(format!("`{spec}`: `{text}` is not a number")))?;
    if !v.is_finite() {
        return Err(GridError(format!("`{spec}`: `{text}` is not finite")));
    }
    Ok(v)
}

/// Expands one axis specification into its values, in the order given.
pub fn parse_axis(spec: &str) -> Result<Vec<f64>, GridError> {
    let spec = spec.trim();
    if spec.is_empty() {
        return Err(GridError("empty grid specification".into()));
    }
    if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 4 {
            return Err(GridError(format!(
                "`{spec}`: expected start:stop:count:scale"
            )));
        }
        let start = number(parts[0], spec)?;
        let stop = number(parts[1], spec)?;
        let count: usize = parts[2].trim().parse().map_err(|_| {
            GridError(format!(
                "`{spec}`: count `{}` is not a positive integer",
                parts[2]
            ))
        })?;
        if count == 0 {
            return Err(GridError(format!("`{spec}`: count must be positive")));
        }
        let log = match parts[3].trim() {
            "lin" | "linear" => false,
            "log" => true,
            other => {
                return Err(GridError(format!(
                    "`{spec}`: scale `{other}` is neither lin nor log"
                )))
            }
        };
        if log && !(start > 0.0 && stop > 0.0) {
            return Err(GridError(format!(
                "`{spec}`: log scale needs positive endpoints"
            )));
        }
        if count == 1 {
            return Ok(vec![start]);
        }
        let last = (count - 1) as f64;
        return Ok((0..count)
            .map(|i| {
                let t = i as f64 / last;
                if i == 0 {
                    start
                } else if i == count - 1 {
                    stop
                } else if log {
                    (start.ln() + t * (stop.ln() - start.ln())).exp()
                } else {
                    start + t * (stop - start)
                }
            })
            .collect());
    }
    spec.split(',').map(|p| number(p, spec)).collect()
}
