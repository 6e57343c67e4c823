//! Exact rational helpers used for demands and closed-form predictions.

use num_rational::Ratio;
use num_traits::ToPrimitive;
use thiserror::Error;

/// Exact rational number.
pub type Q = Ratio<i128>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("cannot parse `{0}` as a rational (expected an integer or `p/q`)")]
pub struct ParseRatioError(pub String);

/// Parses `"p/q"` or a plain integer.
pub fn parse_ratio(text: &str) -> Result<Q, ParseRatioError> {
    let err = || ParseRatioError(text.to_string());
    let t = text.trim();
    match t.split_once('/') {
        Some((p, q)) => {
            let p: i128 = p.trim().parse().map_err(|_| err())?;
            let q: i128 = q.trim().parse().map_err(|_| err())?;
            if q == 0 {
                return Err(err());
            }
            Ok(Q::new(p, q))
        }
        None => t.parse::<i128>().map(Q::from_integer).map_err(|_| err()),
    }
}

/// Renders a rational as `p/q`, or `p` when the denominator is one.
pub fn format_ratio(q: &Q) -> String {
    if *q.denom() == 1 {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn to_f64(q: &Q) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

pub fn q(p: i128, d: i128) -> Q {
    Q::new(p, d)
}

pub fn qi(p: i128) -> Q {
    Q::from_integer(p)
}
