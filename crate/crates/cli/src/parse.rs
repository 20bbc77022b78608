//! Parsers for the small expression languages of the CLI: polynomials over
//! F_q in the variable t, weight ranges, rationals, and the level grammar
//! `gamma1:<poly>[,<poly>^r]` | `gamma0p:<poly>^r` | `theta:<poly>^r:<gens>`.

use drinfeld_core::algebra::poly::Poly;
use drinfeld_core::algebra::rational::Rational;
use drinfeld_core::level::{LevelSpec, Theta};
use drinfeld_core::FieldSpec;

#[derive(Debug)]
pub struct ParseError(pub String);

impl std::fmt::Display for ParseError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for ParseError {}

fn err<T>(msg: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError(msg.into()))
}

/// Parse a polynomial expression: sums of terms `c`, `t`, `c*t`, `ct`,
/// `t^e`, `c*t^e`, `ct^e`, with optional `-` signs. Whitespace is ignored.
pub fn parse_poly(s: &str, f: &FieldSpec) -> Result<Poly, ParseError> {
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return err("empty polynomial");
    }
    let mut out = Poly::zero();
    let mut rest = compact.as_str();
    let mut sign = 1i64;
    // leading sign
    if let Some(r) = rest.strip_prefix('-') {
        sign = -1;
        rest = r;
    } else if let Some(r) = rest.strip_prefix('+') {
        rest = r;
    }
    while !rest.is_empty() {
        // term: [digits] [*] [t [^ digits]]
        let digits_end = rest.find(|c: char| !c.is_ascii_digit()).unwrap_or(rest.len());
        let coeff: i64 = if digits_end == 0 {
            1
        } else {
            rest[..digits_end]
                .parse()
                .map_err(|_| ParseError(format!("bad coefficient in {:?}", s)))?
        };
        rest = &rest[digits_end..];
        rest = rest.strip_prefix('*').unwrap_or(rest);
        let mut exp = 0usize;
        if let Some(r) = rest.strip_prefix('t') {
            rest = r;
            exp = 1;
            if let Some(r) = rest.strip_prefix('^') {
                let e_end = r.find(|c: char| !c.is_ascii_digit()).unwrap_or(r.len());
                if e_end == 0 {
                    return err(format!("missing exponent in {:?}", s));
                }
                exp = r[..e_end]
                    .parse()
                    .map_err(|_| ParseError(format!("bad exponent in {:?}", s)))?;
                rest = &r[e_end..];
            }
        } else if digits_end == 0 {
            return err(format!("unexpected character in polynomial {:?}", s));
        }
        let term = Poly::monomial(f.from_int(sign * coeff), exp);
        out = out.add(&term, f);
        if rest.is_empty() {
            break;
        }
        if let Some(r) = rest.strip_prefix('+') {
            sign = 1;
            rest = r;
        } else if let Some(r) = rest.strip_prefix('-') {
            sign = -1;
            rest = r;
        } else {
            return err(format!("expected + or - in polynomial {:?}", s));
        }
        if rest.is_empty() {
            return err(format!("trailing sign in {:?}", s));
        }
    }
    Ok(out)
}

/// Parse `<poly>` or `<poly>^<r>`; the base may be parenthesized.
fn parse_power(s: &str, f: &FieldSpec) -> Result<(Poly, usize), ParseError> {
    let s = s.trim();
    let (base, exp) = if let Some(inner) = s.strip_prefix('(') {
        let close = inner
            .find(')')
            .ok_or_else(|| ParseError(format!("unbalanced parentheses in {:?}", s)))?;
        let base = &inner[..close];
        let rest = inner[close + 1..].trim();
        let exp = if rest.is_empty() {
            1
        } else if let Some(e) = rest.strip_prefix('^') {
            e.parse()
                .map_err(|_| ParseError(format!("bad exponent in {:?}", s)))?
        } else {
            return err(format!("unexpected trailing input in {:?}", s));
        };
        (base.to_string(), exp)
    } else if let Some(pos) = s.rfind('^') {
        // In level position the trailing exponent is the level exponent r:
        // `t^2` reads as (t)^2. A sum like `t^2+1` falls back to a plain
        // polynomial reading (and is then rejected for having degree two).
        let tail = &s[pos + 1..];
        if tail.chars().all(|c| c.is_ascii_digit()) && !tail.is_empty() {
            let exp = tail
                .parse()
                .map_err(|_| ParseError(format!("bad exponent in {:?}", s)))?;
            (s[..pos].to_string(), exp)
        } else {
            (s.to_string(), 1)
        }
    } else {
        (s.to_string(), 1)
    };
    Ok((parse_poly(&base, f)?, exp))
}

/// A parsed level, together with the variable shift applied so that the
/// distinguished prime becomes exactly t: every input polynomial must be
/// pushed through `shift` before use, and outputs are reported in the
/// shifted coordinate.
pub struct ParsedLevel {
    pub level: LevelSpec,
    /// c with ℘(t + c)= t: inputs are substituted t ↦ t + c.
    pub shift: Option<drinfeld_core::FieldElem>,
}

/// Parse the level grammar. The ℘-part must be a degree-one prime (after a
/// linear change of variable); degree ≥ 2 is rejected.
pub fn parse_level(s: &str, f: &FieldSpec) -> Result<ParsedLevel, ParseError> {
    let (kind, body) = s
        .split_once(':')
        .ok_or_else(|| ParseError(format!("level must look like gamma1:..., got {:?}", s)))?;
    let build = |n: Poly, wp: Poly, r: usize, theta: Theta| -> Result<ParsedLevel, ParseError> {
        // normalize ℘ to t via t ↦ t + c
        let wp = wp.make_monic(f);
        if wp.degree() != Some(1) {
            return err(format!(
                "the distinguished prime must have degree one, got {:?}",
                wp.render()
            ));
        }
        let beta = wp.coeff(0);
        let shift = if beta.is_zero() {
            None
        } else {
            Some(f.neg(beta))
        };
        let n = match shift {
            None => n,
            Some(c) => n.shift_var(c, f),
        };
        let level = LevelSpec::new(f.clone(), n, r, theta).map_err(|e| ParseError(format!("{}", e)))?;
        Ok(ParsedLevel { level, shift })
    };
    match kind {
        "gamma1" => {
            let parts: Vec<&str> = body.split(',').collect();
            match parts.as_slice() {
                [wp_part] => {
                    let (wp, r) = parse_power(wp_part, f)?;
                    build(Poly::one(f), wp, r, Theta::Trivial)
                }
                [n_part, wp_part] => {
                    let n = parse_poly(n_part, f)?;
                    let (wp, r) = parse_power(wp_part, f)?;
                    build(n, wp, r, Theta::Trivial)
                }
                _ => err("gamma1 takes <wp>^r or <n>,<wp>^r"),
            }
        }
        "gamma0p" => {
            let (wp, r) = parse_power(body, f)?;
            build(Poly::one(f), wp, r, Theta::Full)
        }
        "theta" => {
            // theta:<wp>^r:<gen1>,<gen2>,...
            let (wp_part, gens_part) = body
                .split_once(':')
                .ok_or_else(|| ParseError("theta level needs <wp>^r:<gens>".into()))?;
            let (wp, r) = parse_power(wp_part, f)?;
            let mut gens = Vec::new();
            for g in gens_part.split(',') {
                gens.push(parse_poly(g, f)?);
            }
            build(Poly::one(f), wp, r, Theta::Gens(gens))
        }
        other => err(format!("unknown level kind {:?}", other)),
    }
}

/// Parse a weight list: `10`, `2..12` (inclusive), or `4,7,9`.
pub fn parse_weights(s: &str) -> Result<Vec<usize>, ParseError> {
    let s = s.trim();
    if let Some((lo, hi)) = s.split_once("..") {
        let lo: usize = lo.trim().parse().map_err(|_| ParseError("bad range".into()))?;
        let hi: usize = hi.trim().parse().map_err(|_| ParseError("bad range".into()))?;
        return Ok((lo..=hi).collect());
    }
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<usize>()
                .map_err(|_| ParseError(format!("bad weight {:?}", p)))
        })
        .collect()
}

/// Parse a rational like `1`, `3/2`.
pub fn parse_rational(s: &str) -> Result<Rational, ParseError> {
    match s.split_once('/') {
        None => Ok(Rational::integer(
            s.trim().parse().map_err(|_| ParseError("bad rational".into()))?,
        )),
        Some((n, d)) => {
            let n: i64 = n.trim().parse().map_err(|_| ParseError("bad rational".into()))?;
            let d: i64 = d.trim().parse().map_err(|_| ParseError("bad rational".into()))?;
            Ok(Rational::new(n, d))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f3() -> FieldSpec {
        FieldSpec::prime(3).unwrap()
    }

    #[test]
    fn poly_expressions() {
        let f = f3();
        assert_eq!(parse_poly("t", &f).unwrap(), Poly::t(&f));
        assert_eq!(parse_poly("1+t", &f).unwrap(), Poly::from_ints(&f, &[1, 1]));
        assert_eq!(
            parse_poly("t^2+1", &f).unwrap(),
            Poly::from_ints(&f, &[1, 0, 1])
        );
        assert_eq!(
            parse_poly("2t^3 - t + 1", &f).unwrap(),
            Poly::from_ints(&f, &[1, -1, 0, 2])
        );
        assert!(parse_poly("x", &f).is_err());
    }

    #[test]
    fn level_expressions() {
        let f = f3();
        let l = parse_level("gamma1:t", &f).unwrap();
        assert!(l.shift.is_none());
        assert_eq!(l.level.r(), 1);
        assert!(l.level.n().is_one(&f));
        let l = parse_level("gamma0p:t^2", &f).unwrap();
        assert_eq!(l.level.r(), 2);
        assert_eq!(l.level.theta().len(), 3);
        // shifted prime: ℘ = t + 2 = t − 1 becomes t after t ↦ t + 1
        let l = parse_level("gamma1:(t+2)^1", &f).unwrap();
        assert_eq!(l.shift, Some(f.from_int(1)));
        // degree-two primes are rejected
        assert!(parse_level("gamma1:t^2+1", &f).is_err());
        let l = parse_level("gamma1:1+t,t^2", &f).unwrap();
        assert_eq!(l.level.r(), 2);
        assert_eq!(l.level.n().degree(), Some(1));
    }

    #[test]
    fn weights_and_rationals() {
        assert_eq!(parse_weights("2..5").unwrap(), vec![2, 3, 4, 5]);
        assert_eq!(parse_weights("10").unwrap(), vec![10]);
        assert_eq!(parse_weights("4,7").unwrap(), vec![4, 7]);
        assert_eq!(parse_rational("3/2").unwrap(), Rational::new(3, 2));
        assert_eq!(parse_rational("1").unwrap(), Rational::integer(1));
    }
}
