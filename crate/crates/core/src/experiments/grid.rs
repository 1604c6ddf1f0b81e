use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Parses `200`, `1,10,100` or the geometric form `a:b:mult`
/// (`200:3200:2` = 200, 400, ..., 3200).
pub fn parse_n_grid(s: &str) -> Result<Vec<usize>> {
    let s = s.trim();
    let bad = || Error::Config(format!("cannot parse n grid '{s}' (int, comma list, or a:b:mult)"));
    let grid: Vec<usize> = if s.contains(':') {
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(bad());
        }
        let a: usize = parts[0].parse().map_err(|_| bad())?;
        let b: usize = parts[1].parse().map_err(|_| bad())?;
        let mult: usize = parts[2].parse().map_err(|_| bad())?;
        if a == 0 || mult < 2 || b < a {
            return Err(Error::Config(format!("n grid '{s}' needs 1 <= a <= b and mult >= 2")));
        }
        let mut out = Vec::new();
        let mut v = a;
        while v <= b {
            out.push(v);
            v = v.checked_mul(mult).ok_or_else(bad)?;
        }
        out
    } else {
        s.split(',')
            .map(|p| p.trim().replace('_', "").parse::<usize>().map_err(|_| bad()))
            .collect::<Result<_>>()?
    };
    if grid.is_empty() || grid.contains(&0) {
        return Err(Error::Config(format!("n grid '{s}' must be nonempty with n >= 1")));
    }
    Ok(grid)
}

/// Comma-separated positive reals.
pub fn parse_x_grid(s: &str) -> Result<Vec<f64>> {
    let xs: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|_| Error::Config(format!("bad x grid '{s}'"))))
        .collect::<Result<_>>()?;
    if xs.is_empty() || xs.iter().any(|&x| !(x > 0.0) || !x.is_finite()) {
        return Err(Error::Config(format!("x grid '{s}' must hold positive reals")));
    }
    Ok(xs)
}

/// `b = ⌊n^p⌋`, written `floor(n^p)`, `n^p`, with `p` a decimal or `a/b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BRule {
    pub power: f64,
}

impl BRule {
    pub fn parse(expr: &str) -> Result<BRule> {
        let bad = || Error::Config(format!("cannot parse b rule '{expr}' (expected floor(n^p))"));
        let mut e: String = expr.chars().filter(|c| !c.is_whitespace()).collect();
        if let Some(inner) = e.strip_prefix("floor(").and_then(|r| r.strip_suffix(')')) {
            e = inner.to_string();
        }
        let p = e.strip_prefix("n^").ok_or_else(bad)?;
        let p = p.strip_prefix('(').and_then(|r| r.strip_suffix(')')).unwrap_or(p);
        let power = match p.split_once('/') {
            Some((a, b)) => {
                let a: f64 = a.parse().map_err(|_| bad())?;
                let b: f64 = b.parse().map_err(|_| bad())?;
                a / b
            }
            None => p.parse().map_err(|_| bad())?,
        };
        if !(power >= 0.0) || !power.is_finite() {
            return Err(bad());
        }
        Ok(BRule { power })
    }

    /// `⌊n^p⌋`, nudged so that exact integer powers are not lost to rounding.
    pub fn eval(&self, n: usize) -> usize {
        ((n as f64).powf(self.power) * (1.0 + 1e-12)).floor() as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BSpec {
    Fixed(usize),
    Rule(BRule),
}

impl BSpec {
    pub fn eval(&self, n: usize) -> usize {
        match *self {
            BSpec::Fixed(b) => b,
            BSpec::Rule(r) => r.eval(n),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(parse_n_grid("200:3200:2").unwrap(), vec![200, 400, 800, 1600, 3200]);
        assert_eq!(parse_n_grid("500:16000:2").unwrap().len(), 6);
        assert_eq!(parse_n_grid("1000,10000,100_000").unwrap(), vec![1000, 10_000, 100_000]);
        assert_eq!(parse_n_grid(" 7 ").unwrap(), vec![7]);
        assert!(parse_n_grid("0").is_err());
        assert!(parse_n_grid("10:5:2").is_err());
        assert!(parse_n_grid("1:5:1").is_err());
        assert!(parse_n_grid("a,b").is_err());
        assert_eq!(parse_x_grid("1,2").unwrap(), vec![1.0, 2.0]);
        assert!(parse_x_grid("1,-2").is_err());
    }

    #[test]
    fn b_rules() {
        let r = BRule::parse("floor(n^(1/4))").unwrap();
        assert_eq!(r.eval(3200), 7);
        assert_eq!(r.eval(625), 5);
        assert_eq!(r.eval(81), 3);
        let r = BRule::parse("n^0.5").unwrap();
        assert_eq!(r.eval(1600), 40);
        assert_eq!(r.eval(200), 14);
        assert_eq!(BRule::parse("floor(n^1/2)").unwrap().power, 0.5);
        assert!(BRule::parse("log(n)").is_err());
        assert_eq!(BSpec::Fixed(3).eval(100), 3);
    }
}
