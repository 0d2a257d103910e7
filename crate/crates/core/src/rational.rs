//! Exact rational scalars: parsing, formatting, and small vector helpers.
//!
//! All reduction and gap logic runs on `BigRational`; floats appear only in
//! Hamiltonian coefficient tables and the simulators.

use num::bigint::Sign;
use num::{BigInt, BigRational, One, Signed, Zero};

use crate::error::{Error, Result};

/// Parse a rational written as `p/q`, an integer, or a decimal like `0.75`.
///
/// Decimals are converted exactly (`0.75` -> `3/4`).
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty rational".into()));
    }
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad numerator in {s:?}")))?;
        let q: BigInt = q
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad denominator in {s:?}")))?;
        if q.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(BigRational::new(p, q));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let int_part = if int.is_empty() || int == "-" || int == "+" {
            format!("{int}0")
        } else {
            int.to_string()
        };
        let whole: BigInt = int_part
            .parse()
            .map_err(|_| Error::Parse(format!("bad decimal in {s:?}")))?;
        if frac.is_empty() {
            return Ok(BigRational::from_integer(whole));
        }
        let digits: BigInt = frac
            .parse()
            .map_err(|_| Error::Parse(format!("bad decimal in {s:?}")))?;
        if digits.is_negative() {
            return Err(Error::Parse(format!("bad decimal in {s:?}")));
        }
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let frac_part = BigRational::new(digits, scale);
        let whole = BigRational::from_integer(whole);
        return Ok(if s.starts_with('-') {
            whole - frac_part
        } else {
            whole + frac_part
        });
    }
    let n: BigInt = s
        .parse()
        .map_err(|_| Error::Parse(format!("bad rational {s:?}")))?;
    Ok(BigRational::from_integer(n))
}

/// Format a rational as `p/q`, or bare `p` when the denominator is 1.
pub fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Exact conversion to f64 via big-integer division (num's `to_f64` on
/// `Ratio<BigInt>` is only available behind conversions we spell out here).
pub fn rational_to_f64(r: &BigRational) -> f64 {
    big_to_f64(r.numer()) / big_to_f64(r.denom())
}

fn big_to_f64(n: &BigInt) -> f64 {
    // Good to ~[-2^1023, 2^1023]; desk-scale values are far smaller.
    let (sign, digits) = n.to_u64_digits();
    let mut value = 0.0f64;
    for d in digits.iter().rev() {
        value = value * 18446744073709551616.0 + *d as f64;
    }
    match sign {
        Sign::Minus => -value,
        _ => value,
    }
}

/// Round to the nearest integer, halves away from zero.
pub fn round_nearest(r: &BigRational) -> BigInt {
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    if r.is_negative() {
        -((half - r).floor().to_integer())
    } else {
        (r + half).floor().to_integer()
    }
}

/// Exact dot product of two rational vectors.
pub fn dot(a: &[BigRational], b: &[BigRational]) -> BigRational {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = BigRational::zero();
    for (x, y) in a.iter().zip(b) {
        acc += x * y;
    }
    acc
}

/// `a - q * b` elementwise.
pub fn sub_scaled(a: &[BigRational], q: &BigRational, b: &[BigRational]) -> Vec<BigRational> {
    a.iter().zip(b).map(|(x, y)| x - q * y).collect()
}

/// Determinant of a square rational matrix by Gaussian elimination.
pub fn determinant(m: &[Vec<BigRational>]) -> BigRational {
    let n = m.len();
    let mut a: Vec<Vec<BigRational>> = m.to_vec();
    let mut det = BigRational::one();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero());
        let Some(p) = pivot else {
            return BigRational::zero();
        };
        if p != col {
            a.swap(p, col);
            det = -det;
        }
        det *= a[col][col].clone();
        let inv = a[col][col].clone();
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let factor = &a[r][col] / &inv;
            for c in col..n {
                let v = &a[col][c] * &factor;
                a[r][c] -= v;
            }
        }
    }
    det
}

/// Solve the square system `A x = b` exactly. Returns None when singular.
pub fn solve_linear(a: &[Vec<BigRational>], b: &[BigRational]) -> Option<Vec<BigRational>> {
    let n = a.len();
    let mut m: Vec<Vec<BigRational>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(pivot, col);
        let inv = m[col][col].clone();
        for c in col..=n {
            let v = &m[col][c] / &inv;
            m[col][c] = v;
        }
        for r in 0..n {
            if r == col || m[r][col].is_zero() {
                continue;
            }
            let factor = m[r][col].clone();
            for c in col..=n {
                let v = &m[col][c] * &factor;
                m[r][c] -= v;
            }
        }
    }
    Some(m.into_iter().map(|row| row[n].clone()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(s: &str) -> BigRational {
        parse_rational(s).unwrap()
    }

    #[test]
    fn parses_fractions_integers_decimals() {
        assert_eq!(rat("3/4"), BigRational::new(3.into(), 4.into()));
        assert_eq!(rat("-7"), BigRational::from_integer((-7).into()));
        assert_eq!(rat("0.75"), rat("3/4"));
        assert_eq!(rat("-1.25"), rat("-5/4"));
        assert_eq!(format_rational(&rat("6/4")), "3/2");
        assert_eq!(format_rational(&rat("8/4")), "2");
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_rational("") .is_err());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn rounds_half_away_from_zero() {
        assert_eq!(round_nearest(&rat("1/2")), BigInt::from(1));
        assert_eq!(round_nearest(&rat("-1/2")), BigInt::from(-1));
        assert_eq!(round_nearest(&rat("7/5")), BigInt::from(1));
        assert_eq!(round_nearest(&rat("-8/5")), BigInt::from(-2));
    }

    #[test]
    fn determinant_matches_known_values() {
        let m = vec![
            vec![rat("2"), rat("-1"), rat("0")],
            vec![rat("-1"), rat("2"), rat("-1")],
            vec![rat("0"), rat("-1"), rat("1")],
        ];
        assert_eq!(determinant(&m), rat("1"));
        let singular = vec![vec![rat("1"), rat("2")], vec![rat("2"), rat("4")]];
        assert_eq!(determinant(&singular), rat("0"));
    }

    #[test]
    fn solves_linear_systems() {
        let a = vec![vec![rat("2"), rat("1")], vec![rat("1"), rat("3")]];
        let b = vec![rat("5"), rat("10")];
        let x = solve_linear(&a, &b).unwrap();
        assert_eq!(x, vec![rat("1"), rat("3")]);
    }
}
