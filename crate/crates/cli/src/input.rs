//! Parsing of command-line values and JSON input files.

use std::path::Path;

use serde::Deserialize;

use conedet::cone_terms::ConeOrder;
use conedet::determinants::HyperbolicSummary;
use conedet::quadrature::FlatSphereConfig;
use conedet::special_fn::RationalOrder;
use conedet::{Error, Result};

/// A cone order as typed by the user. Integers and fractions `n/d` are kept
/// exact, so that integer orders are recognized structurally.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OrderSpec {
    Fraction(i64, u64),
    Real(f64),
}

pub fn parse_order(s: &str) -> std::result::Result<OrderSpec, String> {
    let t = s.trim();
    if let Some((n, d)) = t.split_once('/') {
        let n: i64 = n.trim().parse().map_err(|_| format!("bad numerator in {s:?}"))?;
        let d: u64 = d.trim().parse().map_err(|_| format!("bad denominator in {s:?}"))?;
        if d == 0 {
            return Err(format!("zero denominator in {s:?}"));
        }
        return Ok(OrderSpec::Fraction(n, d));
    }
    if let Ok(n) = t.parse::<i64>() {
        return Ok(OrderSpec::Fraction(n, 1));
    }
    t.parse::<f64>()
        .map(OrderSpec::Real)
        .map_err(|_| format!("{s:?} is not an integer, a fraction n/d or a decimal"))
}

impl OrderSpec {
    pub fn value(self) -> f64 {
        match self {
            OrderSpec::Fraction(n, d) => n as f64 / d as f64,
            OrderSpec::Real(b) => b,
        }
    }

    pub fn cone_order(self) -> Result<ConeOrder> {
        match self {
            OrderSpec::Real(b) => ConeOrder::new(b),
            OrderSpec::Fraction(n, d) => {
                // beta + 1 = (n + d) / d
                let num = n as i128 + d as i128;
                if num <= 0 {
                    return Err(Error::AngleTooSmall { beta: self.value() });
                }
                let num = u64::try_from(num).map_err(|_| Error::Domain {
                    parameter: "beta",
                    reason: "numerator too large".into(),
                })?;
                ConeOrder::from_angle(RationalOrder::reduced(num, d)?)
            }
        }
    }
}

pub fn parse_tol(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("{s:?} is not a number"))?;
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err(format!("tolerance must lie in (0, 1), got {v}"))
    }
}

fn config_error(reason: String) -> Error {
    Error::Config {
        parameter: "input",
        reason,
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| config_error(format!("cannot read {}: {e}", path.display())))
}

#[derive(Deserialize)]
#[serde(untagged)]
enum OrderEntry {
    Number(f64),
    Text(String),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FlatSphereFile {
    points: Vec<[f64; 2]>,
    orders: Vec<OrderEntry>,
}

/// `{"points": [[re, im], ...], "orders": [...]}`; orders may be numbers or
/// strings such as `"-1/3"`.
pub fn load_flat_sphere(path: &Path) -> Result<FlatSphereConfig> {
    let file: FlatSphereFile =
        serde_json::from_str(&read(path)?).map_err(|e| config_error(format!("{}: {e}", path.display())))?;
    let mut orders = Vec::with_capacity(file.orders.len());
    for entry in file.orders {
        let spec = match entry {
            OrderEntry::Number(b) => OrderSpec::Real(b),
            OrderEntry::Text(s) => parse_order(&s).map_err(config_error)?,
        };
        orders.push(spec.cone_order()?);
    }
    FlatSphereConfig::new(file.points, orders)
}

/// `{"orders": [...], "phi_consts": [...], "liouville_integral": x}`.
pub fn load_hyperbolic(path: &Path) -> Result<HyperbolicSummary> {
    serde_json::from_str(&read(path)?).map_err(|e| config_error(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_syntax() {
        assert_eq!(parse_order("2"), Ok(OrderSpec::Fraction(2, 1)));
        assert_eq!(parse_order("-1/3"), Ok(OrderSpec::Fraction(-1, 3)));
        assert_eq!(parse_order("0.25"), Ok(OrderSpec::Real(0.25)));
        assert!(parse_order("1/0").is_err());
        assert!(parse_order("abc").is_err());
    }

    #[test]
    fn exact_orders() {
        let o = parse_order("-1/3").unwrap().cone_order().unwrap();
        assert_eq!(o.exact(), Some(RationalOrder::new(2, 3).unwrap()));
        let o = parse_order("3").unwrap().cone_order().unwrap();
        assert_eq!(o.exact(), Some(RationalOrder::new(4, 1).unwrap()));
        assert!(parse_order("-1").unwrap().cone_order().is_err());
        assert!(parse_order("-3/2").unwrap().cone_order().is_err());
        assert_eq!(parse_order("2.0").unwrap().cone_order().unwrap().exact(), None);
    }
}
