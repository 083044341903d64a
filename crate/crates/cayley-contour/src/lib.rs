//! Exact contour machinery for finite-range spin models on Cayley trees.
//!
//! The crate takes a ball potential `U` on the order-`k` Cayley tree and
//! provides, end to end:
//!
//! * the tree itself as reduced group words ([`tree`]),
//! * ball potentials, the example model families, and conditional energies
//!   with a constant boundary ([`potential`]),
//! * the energy spectrum, ground states, the gap constant `lambda_0`, and
//!   Peierls checks ([`ground`]),
//! * subcontour/contour decomposition, contour removal, and the counting
//!   bounds ([`contour`]),
//! * exact finite-volume Gibbs measures by full enumeration and by tree
//!   message passing, contour probabilities, and coexistence scans
//!   ([`gibbs`]),
//! * file formats and the report-producing commands behind the CLI
//!   ([`fileio`], [`cli`]).
//!
//! Energies are exact rationals everywhere except inside the Gibbs sums,
//! which convert each energy to `f64` once per `(beta, energy)` pair and
//! run in log space.
//!
//! Every capability has a runnable demo under `examples/`.

pub mod cli;
pub mod contour;
pub mod fileio;
pub mod gibbs;
pub mod ground;
pub mod potential;
pub mod tree;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid vertex: {0}")]
    InvalidVertex(String),

    #[error("set diameter {diam} exceeds interaction radius {r}")]
    DiameterExceedsRange { diam: usize, r: usize },

    #[error("enumeration cap exceeded: {task} needs {needed} states, cap is {cap}")]
    CapExceeded {
        task: String,
        needed: u128,
        cap: u128,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("{0}")]
    Invalid(String),

    #[error("mismatch between inputs: {0}")]
    Mismatch(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code for the CLI: 2 for usage/parse trouble, 3 for cap
    /// refusals, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse(_) | Error::Mismatch(_) | Error::InvalidVertex(_) => 2,
            Error::CapExceeded { .. } => 3,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

/// Exact rational scalar used for every energy in the crate.
pub type Rational = num::BigRational;

/// Renders a rational as `p/q` (or a plain integer when the denominator is 1).
pub fn rational_string(x: &Rational) -> String {
    use num::One;
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parses `p`, `p/q`, or a decimal like `-0.5` into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    use num::BigInt;
    let s = s.trim();
    let bad = || Error::Parse(format!("bad rational '{s}'"));
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q == BigInt::from(0) {
            return Err(bad());
        }
        return Ok(Rational::new(p, q));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let neg = int.trim_start().starts_with('-');
        let int: BigInt = if int.is_empty() || int == "-" {
            BigInt::from(0)
        } else {
            int.parse().map_err(|_| bad())?
        };
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let digits = frac.len() as u32;
        let num: BigInt = frac.parse().map_err(|_| bad())?;
        let denom = BigInt::from(10u32).pow(digits);
        let frac_part = Rational::new(num, denom);
        let int_part = Rational::from(int);
        return Ok(if neg { int_part - frac_part } else { int_part + frac_part });
    }
    let p: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Rational::from(p))
}

/// Converts an exact rational to `f64` (used exactly once per Gibbs weight).
pub fn rational_to_f64(x: &Rational) -> f64 {
    use num::ToPrimitive;
    x.to_f64().expect("rational out of f64 range")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_round_trip() {
        for s in ["3", "-4", "1/2", "-7/3", "0.25", "-0.5", "2.75"] {
            let r = parse_rational(s).unwrap();
            let back = parse_rational(&rational_string(&r)).unwrap();
            assert_eq!(r, back);
        }
        assert_eq!(parse_rational("0.5").unwrap(), parse_rational("1/2").unwrap());
        assert_eq!(parse_rational("-0.5").unwrap(), parse_rational("-1/2").unwrap());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
    }
}
