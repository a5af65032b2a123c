//! Exact arithmetic helpers: dyadic-friendly rationals and values extended by `+inf`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign};

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Signed, Zero};

/// Exact rational number used for every objective value in the crate.
pub type Q = Ratio<i64>;

pub fn q(n: i64) -> Q {
    Q::from_integer(n)
}

pub fn qf(n: i64, d: i64) -> Q {
    Q::new(n, d)
}

/// A value in `R ∪ {+inf}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Ext {
    Finite(Q),
    Inf,
}

impl Ext {
    pub fn zero() -> Self {
        Ext::Finite(Q::zero())
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Ext::Finite(_))
    }

    pub fn finite(self) -> Option<Q> {
        match self {
            Ext::Finite(v) => Some(v),
            Ext::Inf => None,
        }
    }

    pub fn scale(self, w: Q) -> Self {
        match self {
            Ext::Finite(v) => Ext::Finite(v * w),
            // 0 * inf stays inf: a zero-weighted hard constraint is still a constraint
            Ext::Inf => Ext::Inf,
        }
    }
}

impl From<Q> for Ext {
    fn from(v: Q) -> Self {
        Ext::Finite(v)
    }
}

impl From<i64> for Ext {
    fn from(v: i64) -> Self {
        Ext::Finite(q(v))
    }
}

impl PartialOrd for Ext {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ext {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Ext::Finite(a), Ext::Finite(b)) => a.cmp(b),
            (Ext::Finite(_), Ext::Inf) => Ordering::Less,
            (Ext::Inf, Ext::Finite(_)) => Ordering::Greater,
            (Ext::Inf, Ext::Inf) => Ordering::Equal,
        }
    }
}

impl Add for Ext {
    type Output = Ext;
    fn add(self, rhs: Ext) -> Ext {
        match (self, rhs) {
            (Ext::Finite(a), Ext::Finite(b)) => Ext::Finite(a + b),
            _ => Ext::Inf,
        }
    }
}

impl AddAssign for Ext {
    fn add_assign(&mut self, rhs: Ext) {
        *self = *self + rhs;
    }
}

impl fmt::Display for Ext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ext::Finite(v) => write!(f, "{}", v),
            Ext::Inf => write!(f, "inf"),
        }
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
#[error("cannot parse rational `{0}`")]
pub struct ParseRationalError(pub String);

/// Parses `"p/q"`, `"p"` or a terminating decimal such as `"1.5"`.
pub fn parse_q(s: &str) -> Result<Q, ParseRationalError> {
    let err = || ParseRationalError(s.to_string());
    let t = s.trim();
    if let Some((n, d)) = t.split_once('/') {
        let n: i64 = n.trim().parse().map_err(|_| err())?;
        let d: i64 = d.trim().parse().map_err(|_| err())?;
        if d == 0 {
            return Err(err());
        }
        return Ok(Q::new(n, d));
    }
    if let Some((int, frac)) = t.split_once('.') {
        if frac.is_empty() || frac.len() > 12 || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(err());
        }
        let neg = int.starts_with('-');
        let int_val: i64 = if int.is_empty() || int == "-" {
            0
        } else {
            int.parse().map_err(|_| err())?
        };
        let den = 10i64.pow(frac.len() as u32);
        let frac_val: i64 = frac.parse().map_err(|_| err())?;
        let mag = int_val.abs() * den + frac_val;
        return Ok(Q::new(if neg { -mag } else { mag }, den));
    }
    t.parse::<i64>().map(q).map_err(|_| err())
}

/// Parses a rational or the literal `inf`.
pub fn parse_ext(s: &str) -> Result<Ext, ParseRationalError> {
    let t = s.trim();
    if t.eq_ignore_ascii_case("inf") || t.eq_ignore_ascii_case("infinity") {
        Ok(Ext::Inf)
    } else {
        parse_q(t).map(Ext::Finite)
    }
}

/// Renders a number of halves as an exact decimal (`3` -> `"1.5"`).
pub fn halves_to_decimal(h: i64) -> String {
    let sign = if h < 0 { "-" } else { "" };
    let a = h.abs();
    if a % 2 == 0 {
        format!("{}{}", sign, a / 2)
    } else {
        format!("{}{}.5", sign, a / 2)
    }
}

/// Least common multiple of the denominators of `values`.
pub fn common_denominator<'a>(values: impl IntoIterator<Item = &'a Q>) -> i64 {
    values
        .into_iter()
        .fold(1i64, |acc, v| acc.lcm(v.denom()))
}

/// Exact conversion `v * scale` to an integer; `None` if `scale` does not clear the denominator.
pub fn to_scaled_int(v: Q, scale: i64) -> Option<i64> {
    let s = v * q(scale);
    s.is_integer().then(|| s.to_integer())
}

pub fn abs_q(v: Q) -> Q {
    v.abs()
}
