use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::Rng;

pub type Rational = num_rational::BigRational;

/// Builds `num/den` in lowest terms. Panics if `den == 0`.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Parses `[-]digits[/digits]`.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let (n, d) = match body.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (body, None),
    };
    let digits = |t: &str| !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit());
    if !digits(n) || !d.is_none_or(digits) {
        return None;
    }
    let num: BigInt = n.parse().ok()?;
    let den: BigInt = match d {
        Some(d) => d.parse().ok()?,
        None => BigInt::one(),
    };
    if den.is_zero() {
        return None;
    }
    let r = Rational::new(num, den);
    Some(if neg { -r } else { r })
}

/// Small random rational with numerator in [-9, 9] and denominator in [1, 7].
pub fn random_rational<R: Rng>(rng: &mut R) -> Rational {
    rat(rng.gen_range(-9..=9), rng.gen_range(1..=7))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse_rational("3/6"), Some(rat(1, 2)));
        assert_eq!(parse_rational("-4"), Some(rat(-4, 1)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("1/"), None);
        assert_eq!(parse_rational("a"), None);
    }
}
