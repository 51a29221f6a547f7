
use super::rational::Rational;
use crate::error::{domain, Result};

fn check_unit(x: &Rational) -> Result<()> {
    if x.as_big() < &Rational::zero().into() || x > &Rational::one() {
        return Err(domain(format!("{x} is outside [0, 1]")));
    }
    Ok(())
}

/// `T(x) = x/(1−x)` on `[0, 1/2]`, `(1−x)/x` on `(1/2, 1]`.
pub fn farey_map(x: &Rational) -> Result<Rational> {
    check_unit(x)?;
    let one = Rational::one();
    let half = Rational::new(1, 2)?;
    if x <= &half {
        Ok(x / &(&one - x))
    } else {
        Ok(&(&one - x) / x)
    }
}

/// `𝔤(x) = 1/x mod 1` on `(0, 1]`.
pub fn gauss_map(x: &Rational) -> Result<Rational> {
    check_unit(x)?;
    if x.is_zero() {
        return Err(domain("the Gauss map is undefined at 0"));
    }
    Ok(x.recip()?.fract())
}
