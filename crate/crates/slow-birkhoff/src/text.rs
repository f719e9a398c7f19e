//! Textual forms shared by config files, function specs and CSV reports:
//! rationals are always `p/q` so exact values survive the round trip.

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};

pub fn format_rational(x: &BigRational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = |what: &str| Error::InvalidConfig(format!("bad rational {:?}: {}", s, what));
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num.trim().parse().map_err(|_| bad("numerator"))?;
        let d: BigInt = den.trim().parse().map_err(|_| bad("denominator"))?;
        if d == BigInt::from(0) {
            return Err(bad("zero denominator"));
        }
        Ok(BigRational::new(n, d))
    } else {
        let n: BigInt = s.parse().map_err(|_| bad("integer"))?;
        Ok(BigRational::from_integer(n))
    }
}
