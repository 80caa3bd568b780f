//! Parsing of command-line values: complex numbers, domain specs and
//! weight expressions.

use std::path::Path;

use potkern_core::geometry::{builtin_domain, Curve, CurveRole, Domain};
use potkern_core::C64;
use serde::Deserialize;

use crate::CliError;

const CATALOG: [&str; 4] = ["disc", "ellipse", "annulus", "three_connected"];

/// Parses `a+bi`, `a`, `bi`, `-i`, `1e-3-2e-1i` (no spaces).
pub fn parse_complex(s: &str) -> Result<C64, CliError> {
    let bad = || CliError::BadComplex(s.to_string());
    if s.is_empty() || s.chars().any(char::is_whitespace) {
        return Err(bad());
    }
    let Some(body) = s.strip_suffix('i') else {
        return s.parse::<f64>().ok().filter(|re| re.is_finite()).map(|re| C64::new(re, 0.0)).ok_or_else(bad);
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len()).rev().find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("0", body),
    };
    let re: f64 = re.parse().map_err(|_| bad())?;
    let im: f64 = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        x => x.parse().map_err(|_| bad())?,
    };
    if !re.is_finite() || !im.is_finite() {
        return Err(bad());
    }
    Ok(C64::new(re, im))
}

/// Formats a complex number the way [`parse_complex`] reads it.
pub fn format_complex(z: C64) -> String {
    format!("{}{:+}i", z.re, z.im)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CurveSpec {
    fourier: Vec<[f64; 2]>,
    kmin: i32,
    #[serde(default)]
    anchor: Option<[f64; 2]>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DomainSpec {
    outer: CurveSpec,
    #[serde(default)]
    holes: Vec<CurveSpec>,
}

/// A loaded domain with the label used in reports.
#[derive(Debug, Clone)]
pub struct LoadedDomain {
    pub label: String,
    pub domain: Domain,
}

fn catalog(spec: &str) -> Option<Result<(String, Vec<f64>), CliError>> {
    let (name, params) = match spec.split_once(':') {
        Some((n, p)) => (n, Some(p)),
        None => (spec, None),
    };
    if !CATALOG.contains(&name) {
        return None;
    }
    let params = match params {
        None => Ok(Vec::new()),
        Some(p) => p.split(',').map(|x| x.trim().parse::<f64>().map_err(|_| CliError::BadDomainSpec(format!("parameter `{x}` of `{spec}`")))).collect(),
    };
    Some(params.map(|p| (name.to_string(), p)))
}

/// Catalog name with optional parameters (`annulus:0.3`) or a path to a
/// JSON domain file.
pub fn load_domain(spec: &str) -> Result<LoadedDomain, CliError> {
    if let Some(parsed) = catalog(spec) {
        let (name, params) = parsed?;
        let domain = builtin_domain(&name, &params)?;
        return Ok(LoadedDomain { label: spec.to_string(), domain });
    }
    let path = Path::new(spec);
    let looks_like_path = spec.ends_with(".json") || spec.contains(std::path::MAIN_SEPARATOR) || spec.contains('/');
    if !path.exists() && !looks_like_path {
        return Err(potkern_core::Error::UnknownDomain(spec.to_string()).into());
    }
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(spec.to_string(), e.to_string()))?;
    let domain = domain_from_json(&text)?;
    let label = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| spec.to_string());
    Ok(LoadedDomain { label, domain })
}

/// Builds a domain from the JSON file format. Holes are listed
/// counterclockwise, each with an anchor point inside it.
pub fn domain_from_json(text: &str) -> Result<Domain, CliError> {
    let spec: DomainSpec = serde_json::from_str(text).map_err(|e| CliError::BadDomainSpec(e.to_string()))?;
    let curve = |c: &CurveSpec, role| {
        if c.fourier.is_empty() {
            return Err(CliError::BadDomainSpec("empty fourier coefficient list".into()));
        }
        Ok(Curve::new(c.fourier.iter().map(|[re, im]| C64::new(*re, *im)).collect(), c.kmin, role))
    };
    if spec.outer.anchor.is_some() {
        return Err(CliError::BadDomainSpec("the outer curve takes no anchor".into()));
    }
    let outer = curve(&spec.outer, CurveRole::Outer)?;
    let mut holes = Vec::new();
    for (k, h) in spec.holes.iter().enumerate() {
        let [re, im] = h.anchor.ok_or_else(|| CliError::BadDomainSpec(format!("hole {} has no anchor", k + 1)))?;
        holes.push((curve(h, CurveRole::Hole)?, C64::new(re, im)));
    }
    Ok(Domain::new(outer, holes)?)
}

/// Parsed `--weight` value.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightSpec {
    Unit,
    Poisson(C64),
    Expr { text: String, expr: Expr },
}

/// Weight expression in the boundary parameter `t`.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Cos(i64),
    Sin(i64),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Expr::Const(c) => *c,
            Expr::Cos(k) => (*k as f64 * t).cos(),
            Expr::Sin(k) => (*k as f64 * t).sin(),
            Expr::Neg(a) => -a.eval(t),
            Expr::Add(a, b) => a.eval(t) + b.eval(t),
            Expr::Sub(a, b) => a.eval(t) - b.eval(t),
            Expr::Mul(a, b) => a.eval(t) * b.eval(t),
        }
    }
}

pub fn parse_weight(s: &str) -> Result<WeightSpec, CliError> {
    if s == "unit" {
        return Ok(WeightSpec::Unit);
    }
    if let Some(a) = s.strip_prefix("poisson:") {
        return Ok(WeightSpec::Poisson(parse_complex(a)?));
    }
    let expr = Parser::new(s).parse()?;
    Ok(WeightSpec::Expr { text: s.to_string(), expr })
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    LParen,
    RParen,
}

struct Parser {
    src: String,
    toks: Vec<Tok>,
    pos: usize,
    err: Option<String>,
}

impl Parser {
    fn new(src: &str) -> Self {
        let mut toks = Vec::new();
        let mut err = None;
        let chars: Vec<char> = src.chars().collect();
        let mut k = 0;
        while k < chars.len() {
            let c = chars[k];
            match c {
                ' ' => {}
                '+' => toks.push(Tok::Plus),
                '-' => toks.push(Tok::Minus),
                '*' | '×' => toks.push(Tok::Star),
                '(' => toks.push(Tok::LParen),
                ')' => toks.push(Tok::RParen),
                c if c.is_ascii_digit() || c == '.' => {
                    let start = k;
                    while k + 1 < chars.len() && (chars[k + 1].is_ascii_digit() || chars[k + 1] == '.') {
                        k += 1;
                    }
                    let s: String = chars[start..=k].iter().collect();
                    match s.parse() {
                        Ok(v) => toks.push(Tok::Num(v)),
                        Err(_) => err = err.or(Some(format!("bad number `{s}`"))),
                    }
                }
                c if c.is_ascii_alphabetic() => {
                    let start = k;
                    while k + 1 < chars.len() && chars[k + 1].is_ascii_alphabetic() {
                        k += 1;
                    }
                    toks.push(Tok::Ident(chars[start..=k].iter().collect()));
                }
                c => err = err.or(Some(format!("unexpected character `{c}`"))),
            }
            k += 1;
        }
        Parser { src: src.to_string(), toks, pos: 0, err }
    }

    fn fail<T>(&self, what: &str) -> Result<T, CliError> {
        Err(CliError::BadWeight(format!("{}: {what}", self.src)))
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expect(&mut self, t: Tok) -> Result<(), CliError> {
        if self.next() == Some(t.clone()) {
            Ok(())
        } else {
            self.fail(&format!("expected {t:?}"))
        }
    }

    fn parse(mut self) -> Result<Expr, CliError> {
        if let Some(e) = self.err.clone() {
            return self.fail(&e);
        }
        let e = self.sum()?;
        if self.pos != self.toks.len() {
            return self.fail("trailing input");
        }
        Ok(e)
    }

    fn sum(&mut self) -> Result<Expr, CliError> {
        let mut acc = self.product()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    acc = Expr::Add(Box::new(acc), Box::new(self.product()?));
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    acc = Expr::Sub(Box::new(acc), Box::new(self.product()?));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn product(&mut self) -> Result<Expr, CliError> {
        let mut acc = self.factor()?;
        while self.peek() == Some(&Tok::Star) {
            self.pos += 1;
            acc = Expr::Mul(Box::new(acc), Box::new(self.factor()?));
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Expr, CliError> {
        match self.next() {
            Some(Tok::Num(v)) => Ok(Expr::Const(v)),
            Some(Tok::Minus) => Ok(Expr::Neg(Box::new(self.factor()?))),
            Some(Tok::LParen) => {
                let e = self.sum()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Some(Tok::Ident(f)) if f == "cos" || f == "sin" => {
                self.expect(Tok::LParen)?;
                let k = self.multiple()?;
                self.expect(Tok::RParen)?;
                Ok(if f == "cos" { Expr::Cos(k) } else { Expr::Sin(k) })
            }
            _ => self.fail("expected a constant, cos(kt), sin(kt) or a parenthesized expression"),
        }
    }

    /// `t`, `kt`, `k*t` or `-kt` with integer `k`.
    fn multiple(&mut self) -> Result<i64, CliError> {
        let sign = if self.peek() == Some(&Tok::Minus) {
            self.pos += 1;
            -1
        } else {
            1
        };
        let k = match self.peek().cloned() {
            Some(Tok::Num(v)) => {
                self.pos += 1;
                if v.fract() != 0.0 || v.abs() > 1e6 {
                    return self.fail("multiples of t must be integers");
                }
                if self.peek() == Some(&Tok::Star) {
                    self.pos += 1;
                }
                v as i64
            }
            _ => 1,
        };
        match self.next() {
            Some(Tok::Ident(t)) if t == "t" => Ok(sign * k),
            _ => self.fail("trigonometric arguments must be integer multiples of t"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_forms() {
        let cases = [
            ("0", C64::new(0.0, 0.0)),
            ("0.55", C64::new(0.55, 0.0)),
            ("-0.2+0.35i", C64::new(-0.2, 0.35)),
            ("0.3i", C64::new(0.0, 0.3)),
            ("-i", C64::new(0.0, -1.0)),
            ("1+i", C64::new(1.0, 1.0)),
            ("1e-3-2e-1i", C64::new(1e-3, -0.2)),
            ("-1.5e+2+3E-1i", C64::new(-150.0, 0.3)),
        ];
        for (s, z) in cases {
            assert_eq!(parse_complex(s).unwrap(), z, "{s}");
        }
        for s in ["", "1 + 2i", "abc", "1+2j", "i+1", "nan"] {
            assert!(parse_complex(s).is_err(), "{s}");
        }
    }

    #[test]
    fn complex_round_trip() {
        for z in [C64::new(0.1, -0.7), C64::new(-3.25, 0.0), C64::new(1e-9, 2e5)] {
            assert_eq!(parse_complex(&format_complex(z)).unwrap(), z);
        }
    }

    #[test]
    fn weight_grammar() {
        let WeightSpec::Expr { expr, .. } = parse_weight("2+cos(t)").unwrap() else { panic!() };
        assert_eq!(expr.eval(0.0), 3.0);
        let WeightSpec::Expr { expr, .. } = parse_weight("1.5 + 0.5*sin(2t) × (1 - 0.25*cos(3*t))").unwrap() else { panic!() };
        let t: f64 = 0.3;
        let want = 1.5 + 0.5 * (2.0 * t).sin() * (1.0 - 0.25 * (3.0 * t).cos());
        assert!((expr.eval(t) - want).abs() < 1e-15);
        assert_eq!(parse_weight("poisson:0.55").unwrap(), WeightSpec::Poisson(C64::new(0.55, 0.0)));
        assert_eq!(parse_weight("unit").unwrap(), WeightSpec::Unit);
        for bad in ["cos(0.5t)", "exp(t)", "t", "2+", "cos(t", "2 ^ 3", "sin(z)"] {
            assert!(matches!(parse_weight(bad), Err(CliError::BadWeight(_))), "{bad}");
        }
    }

    #[test]
    fn catalog_specs() {
        assert_eq!(load_domain("disc").unwrap().domain.connectivity(), 1);
        assert_eq!(load_domain("annulus:0.3").unwrap().domain.connectivity(), 2);
        assert_eq!(load_domain("three_connected:0.2,0.5").unwrap().domain.connectivity(), 3);
        assert!(matches!(load_domain("annulus:x"), Err(CliError::BadDomainSpec(_))));
        assert!(matches!(load_domain("torus"), Err(CliError::Core(potkern_core::Error::UnknownDomain(_)))));
    }

    #[test]
    fn json_annulus() {
        let text = r#"{"outer":{"fourier":[[1,0]],"kmin":1},
            "holes":[{"fourier":[[0.3,0]],"kmin":1,"anchor":[0,0]}]}"#;
        let d = domain_from_json(text).unwrap();
        assert_eq!(d.connectivity(), 2);
        let missing = r#"{"outer":{"fourier":[[1,0]],"kmin":1},"holes":[{"fourier":[[0.3,0]],"kmin":1}]}"#;
        assert!(matches!(domain_from_json(missing), Err(CliError::BadDomainSpec(_))));
        let crossing = r#"{"outer":{"fourier":[[1,0]],"kmin":1},"holes":[{"fourier":[[1.5,0]],"kmin":1,"anchor":[0,0]}]}"#;
        assert!(matches!(domain_from_json(crossing), Err(CliError::Core(_))));
    }
}
