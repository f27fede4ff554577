//! Text format: `3*x0^2*x1 - 7/36*x2 + 1`.

use super::scalar::{format_rational, parse_rational, Rational};
use super::{Exponent, Polynomial};
use crate::error::{Error, Result};
use num_traits::{One, Signed};

pub(super) fn format_polynomial(p: &Polynomial) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut terms: Vec<(&Exponent, &Rational)> = p.terms().collect();
    terms.sort_by(|a, b| {
        let da: u32 = a.0.iter().sum();
        let db: u32 = b.0.iter().sum();
        db.cmp(&da).then_with(|| b.0.cmp(a.0))
    });
    let mut out = String::new();
    for (k, (e, c)) in terms.into_iter().enumerate() {
        let neg = c.is_negative();
        let mag = c.abs();
        if k == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let vars: Vec<String> = e
            .iter()
            .enumerate()
            .filter(|(_, &a)| a > 0)
            .map(|(i, &a)| if a == 1 { format!("x{i}") } else { format!("x{i}^{a}") })
            .collect();
        if vars.is_empty() {
            out.push_str(&format_rational(&mag));
        } else {
            if !mag.is_one() {
                out.push_str(&format_rational(&mag));
                out.push('*');
            }
            out.push_str(&vars.join("*"));
        }
    }
    out
}

struct Term {
    coeff: Rational,
    powers: Vec<(usize, u32)>,
}

pub(super) fn parse_polynomial(s: &str, nvars: Option<usize>) -> Result<Polynomial> {
    let src: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if src.is_empty() {
        return Err(Error::Parse("empty polynomial".into()));
    }
    // split on top-level + and -, keeping the sign; a sign right after 'e'
    // belongs to a decimal exponent
    let bytes = src.as_bytes();
    let mut pieces = Vec::new();
    let mut start = 0;
    for i in 1..bytes.len() {
        let c = bytes[i];
        if (c == b'+' || c == b'-') && !matches!(bytes[i - 1], b'e' | b'E' | b'*' | b'^' | b'+' | b'-') {
            pieces.push(&src[start..i]);
            start = i;
        }
    }
    pieces.push(&src[start..]);

    let mut terms = Vec::with_capacity(pieces.len());
    let mut maxvar = None;
    for piece in pieces {
        let t = parse_term(piece)?;
        for &(v, _) in &t.powers {
            maxvar = Some(maxvar.map_or(v, |m: usize| m.max(v)));
        }
        terms.push(t);
    }
    let n = match (nvars, maxvar) {
        (Some(n), Some(m)) if m >= n => {
            return Err(Error::Parse(format!("variable x{m} out of range for {n} variables")))
        }
        (Some(n), _) => n,
        (None, Some(m)) => m + 1,
        (None, None) => 1,
    };
    let mut p = Polynomial::zero(n);
    for t in terms {
        let mut e = vec![0u32; n];
        for (v, a) in t.powers {
            e[v] += a;
        }
        p.add_term(e, t.coeff);
    }
    Ok(p)
}

fn parse_term(piece: &str) -> Result<Term> {
    let (neg, body) = match piece.as_bytes().first() {
        Some(b'-') => (true, &piece[1..]),
        Some(b'+') => (false, &piece[1..]),
        _ => (false, piece),
    };
    if body.is_empty() {
        return Err(Error::Parse(format!("dangling sign in '{piece}'")));
    }
    let mut coeff = Rational::one();
    let mut powers = Vec::new();
    for factor in body.split('*') {
        if factor.is_empty() {
            return Err(Error::Parse(format!("empty factor in '{piece}'")));
        }
        if let Some(rest) = factor.strip_prefix('x') {
            let (idx, exp) = match rest.split_once('^') {
                Some((i, e)) => (i, e.parse::<u32>().map_err(|_| bad(factor))?),
                None => (rest, 1),
            };
            let v: usize = idx.parse().map_err(|_| bad(factor))?;
            powers.push((v, exp));
        } else {
            let c = parse_rational(factor).ok_or_else(|| bad(factor))?;
            coeff *= c;
        }
    }
    if neg {
        coeff = -coeff;
    }
    Ok(Term { coeff, powers })
}

fn bad(tok: &str) -> Error {
    Error::Parse(format!("cannot parse factor '{tok}'"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::scalar::rat;
    use proptest::prelude::*;

    #[test]
    fn prints_in_canonical_order() {
        let p: Polynomial = "1 - 2*x0*x1*x2 + x2^2 + x1^2 + x0^2".parse().unwrap();
        assert_eq!(p.to_string(), "-2*x0*x1*x2 + x0^2 + x1^2 + x2^2 + 1");
        assert_eq!(Polynomial::zero(2).to_string(), "0");
        let q: Polynomial = "-x0 + 7/36*x1^3 - 1".parse().unwrap();
        assert_eq!(q.to_string(), "7/36*x1^3 - x0 - 1");
    }

    #[test]
    fn accepts_decimals_and_spacing() {
        let p: Polynomial = "0.5 * x0 ^ 2 + x1 - 0.7".parse().unwrap();
        assert_eq!(p.coeff(&[2, 0]), rat(1, 2));
        assert_eq!(p.coeff(&[0, 0]), rat(-7, 10));
        let q: Polynomial = "1e-1*x0".parse().unwrap();
        assert_eq!(q.coeff(&[1]), rat(1, 10));
    }

    #[test]
    fn rejects_garbage() {
        for s in ["", "x0^", "2**x1", "x0 +", "y^2", "x0^-1"] {
            assert!(s.parse::<Polynomial>().is_err(), "{s}");
        }
        assert!(Polynomial::parse_with_nvars("x3", 2).is_err());
    }

    fn arb_poly() -> impl Strategy<Value = Polynomial> {
        let term = (prop::collection::vec(0u32..4, 3), -20i64..20, 1i64..9);
        prop::collection::vec(term, 0..8).prop_map(|ts| {
            Polynomial::from_terms(3, ts.into_iter().map(|(e, n, d)| (e, rat(n, d)))).unwrap()
        })
    }

    proptest! {
        #[test]
        fn text_roundtrip(p in arb_poly()) {
            let q = Polynomial::parse_with_nvars(&p.to_string(), 3).unwrap();
            prop_assert_eq!(p, q);
        }

        #[test]
        fn json_roundtrip(p in arb_poly()) {
            let s = serde_json::to_string(&p).unwrap();
            let q: Polynomial = serde_json::from_str(&s).unwrap();
            prop_assert_eq!(p, q);
        }
    }
}
