//! Exact sparse multivariate polynomials over arbitrary-precision rationals.
//!
//! Every ideal-theoretic operation in the engine reduces to the arithmetic in
//! this module, so everything here is exact: no floats, no rounding, no
//! approximate zero tests. Terms are kept canonically sorted in graded
//! lexicographic order, which makes structural equality and printed output
//! deterministic.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Exact rational scalar. Stored in lowest terms with positive denominator
/// by construction of `BigRational`.
pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// A nonnegative integer extended with infinity (the order of the zero ideal).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtNat {
    Finite(u64),
    Infinity,
}

impl ExtNat {
    pub fn is_infinite(self) -> bool {
        matches!(self, ExtNat::Infinity)
    }

    pub fn finite(self) -> Option<u64> {
        match self {
            ExtNat::Finite(n) => Some(n),
            ExtNat::Infinity => None,
        }
    }
}

impl PartialOrd for ExtNat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtNat {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ExtNat::Infinity, ExtNat::Infinity) => Ordering::Equal,
            (ExtNat::Infinity, _) => Ordering::Greater,
            (_, ExtNat::Infinity) => Ordering::Less,
            (ExtNat::Finite(a), ExtNat::Finite(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for ExtNat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtNat::Finite(n) => write!(f, "{n}"),
            ExtNat::Infinity => write!(f, "inf"),
        }
    }
}

/// Exponent vector, one entry per chart variable. Ordered graded
/// lexicographically: higher total degree first, ties broken by the
/// exponent vector itself.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Monomial(e)
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    fn div(&self, other: &Monomial) -> Monomial {
        Monomial(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a - b)
                .collect(),
        )
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

/// Degree and term-count guardrails. Blowup substitutions grow degrees, so
/// arithmetic fails loudly instead of thrashing when a computation escapes
/// desk scale. Overridable through the CLI / environment.
#[derive(Debug, Clone, Copy)]
pub struct Caps {
    pub max_total_degree: u32,
    pub max_terms: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            max_total_degree: 64,
            max_terms: 100_000,
        }
    }
}

thread_local! {
    static CAPS: std::cell::Cell<Caps> = std::cell::Cell::new(Caps::default());
}

/// Install resource caps for the current thread and return the previous ones.
pub fn set_caps(caps: Caps) -> Caps {
    CAPS.with(|c| c.replace(caps))
}

pub fn current_caps() -> Caps {
    CAPS.with(|c| c.get())
}

/// Sparse multivariate polynomial. The zero polynomial has an empty term map;
/// no zero coefficient is ever stored, so structural equality is polynomial
/// equality.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Monomial, Rat>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Rat) -> Self {
        let mut p = Poly::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(nvars), c);
        }
        p
    }

    pub fn one(nvars: usize) -> Self {
        Poly::constant(nvars, Rat::one())
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        assert!(i < nvars, "variable index out of range");
        let mut p = Poly::zero(nvars);
        p.terms.insert(Monomial::var(nvars, i), Rat::one());
        p
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Monomial, Rat)>) -> Self {
        let mut p = Poly::zero(nvars);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.len() <= 1 && self.terms.keys().all(|m| m.total_degree() == 0)
    }

    pub fn constant_value(&self) -> Option<Rat> {
        if self.is_zero() {
            return Some(Rat::zero());
        }
        if self.is_constant() {
            return self.terms.values().next().cloned();
        }
        None
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.total_degree()).max()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rat)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Leading term under the graded lexicographic order.
    pub fn leading(&self) -> Option<(&Monomial, &Rat)> {
        self.terms.iter().next_back()
    }

    /// Degree in one variable.
    pub fn degree_in(&self, i: usize) -> u32 {
        self.terms.keys().map(|m| m.0[i]).max().unwrap_or(0)
    }

    pub fn involves(&self, i: usize) -> bool {
        self.terms.keys().any(|m| m.0[i] > 0)
    }

    fn add_term(&mut self, m: Monomial, c: Rat) {
        if c.is_zero() {
            return;
        }
        debug_assert_eq!(m.0.len(), self.nvars);
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get() + &c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    fn check_caps(&self) -> Result<()> {
        let caps = current_caps();
        if let Some(d) = self.total_degree() {
            if d > caps.max_total_degree {
                return Err(Error::ResourceCap(format!(
                    "total degree {d} exceeds cap {}",
                    caps.max_total_degree
                )));
            }
        }
        if self.num_terms() > caps.max_terms {
            return Err(Error::ResourceCap(format!(
                "term count {} exceeds cap {}",
                self.num_terms(),
                caps.max_terms
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Poly) -> Poly {
        debug_assert_eq!(self.nvars, other.nvars);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        debug_assert_eq!(self.nvars, other.nvars);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }

    pub fn neg(&self) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (m, c) in &self.terms {
            out.terms.insert(m.clone(), -c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Rat) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        let mut out = Poly::zero(self.nvars);
        for (m, k) in &self.terms {
            out.terms.insert(m.clone(), k * c);
        }
        out
    }

    pub fn mul(&self, other: &Poly) -> Result<Poly> {
        debug_assert_eq!(self.nvars, other.nvars);
        let mut out = Poly::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out.check_caps()?;
        Ok(out)
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &Rat) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (ma, ca) in &self.terms {
            out.add_term(ma.mul(m), ca * c);
        }
        out
    }

    pub fn pow(&self, e: u32) -> Result<Poly> {
        let mut out = Poly::one(self.nvars);
        for _ in 0..e {
            out = out.mul(self)?;
        }
        Ok(out)
    }

    /// Exact composition: every variable of `self` is replaced by its image.
    pub fn substitute(&self, images: &[Poly]) -> Result<Poly> {
        assert_eq!(images.len(), self.nvars, "one image per variable required");
        let nv = images.first().map_or(self.nvars, Poly::nvars);
        // Cache variable powers as they are needed.
        let mut powers: Vec<Vec<Poly>> = images.iter().map(|p| vec![Poly::one(nv), p.clone()]) .collect();
        let mut out = Poly::zero(nv);
        for (m, c) in &self.terms {
            let mut term = Poly::constant(nv, c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while powers[i].len() <= e as usize {
                    let last = powers[i].last().unwrap().clone();
                    powers[i].push(last.mul(&images[i])?);
                }
                term = term.mul(&powers[i][e as usize])?;
            }
            out = out.add(&term);
        }
        out.check_caps()?;
        Ok(out)
    }

    /// Substitute a single variable, leaving the others in place.
    pub fn substitute_var(&self, i: usize, image: &Poly) -> Result<Poly> {
        let images: Vec<Poly> = (0..self.nvars)
            .map(|j| if j == i { image.clone() } else { Poly::var(self.nvars, j) })
            .collect();
        self.substitute(&images)
    }

    /// Set one variable to zero (restriction to a coordinate hyperplane).
    pub fn set_var_zero(&self, i: usize) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (m, c) in &self.terms {
            if m.0[i] == 0 {
                out.terms.insert(m.clone(), c.clone());
            }
        }
        out
    }

    /// Evaluate at a rational point.
    pub fn eval(&self, point: &[Rat]) -> Result<Rat> {
        if point.len() != self.nvars {
            return Err(Error::input(format!(
                "point dimension {} does not match variable count {}",
                point.len(),
                self.nvars
            )));
        }
        let mut acc = Rat::zero();
        for (m, c) in &self.terms {
            let mut v = c.clone();
            for (i, &e) in m.0.iter().enumerate() {
                for _ in 0..e {
                    v *= &point[i];
                }
            }
            acc += v;
        }
        Ok(acc)
    }

    /// Translate so that `point` becomes the origin: x_i -> x_i + a_i.
    pub fn translate(&self, point: &[Rat]) -> Result<Poly> {
        if point.len() != self.nvars {
            return Err(Error::input(format!(
                "point dimension {} does not match variable count {}",
                point.len(),
                self.nvars
            )));
        }
        if point.iter().all(Rat::is_zero) {
            return Ok(self.clone());
        }
        let images: Vec<Poly> = (0..self.nvars)
            .map(|i| {
                let mut p = Poly::var(self.nvars, i);
                if !point[i].is_zero() {
                    p = p.add(&Poly::constant(self.nvars, point[i].clone()));
                }
                p
            })
            .collect();
        self.substitute(&images)
    }

    /// Order of vanishing at a rational point: the minimal total degree of
    /// the translated polynomial. Infinity for the zero polynomial.
    pub fn ord_at_point(&self, point: &[Rat]) -> Result<ExtNat> {
        if self.is_zero() {
            // Dimension check still applies for consistent error reporting.
            if point.len() != self.nvars {
                return Err(Error::input("point dimension mismatch".to_string()));
            }
            return Ok(ExtNat::Infinity);
        }
        let t = self.translate(point)?;
        Ok(ExtNat::Finite(
            t.terms.keys().map(|m| m.total_degree() as u64).min().unwrap(),
        ))
    }

    pub fn ord_at_origin(&self) -> ExtNat {
        if self.is_zero() {
            return ExtNat::Infinity;
        }
        ExtNat::Finite(self.terms.keys().map(|m| m.total_degree() as u64).min().unwrap())
    }

    /// Largest k with x_i^k dividing the polynomial. Undefined for zero.
    pub fn ord_along_coordinate(&self, i: usize) -> Result<u32> {
        if self.is_zero() {
            return Err(Error::domain(
                "order along a coordinate is undefined for the zero polynomial",
            ));
        }
        Ok(self.terms.keys().map(|m| m.0[i]).min().unwrap())
    }

    /// Exact division by x_i^k. Fails when x_i^k does not divide.
    pub fn divexact_coordinate(&self, i: usize, k: u32) -> Result<Poly> {
        if k == 0 {
            return Ok(self.clone());
        }
        let mut out = Poly::zero(self.nvars);
        for (m, c) in &self.terms {
            if m.0[i] < k {
                return Err(Error::domain(format!(
                    "polynomial is not divisible by variable {i} to the power {k}"
                )));
            }
            let mut e = m.0.clone();
            e[i] -= k;
            out.terms.insert(Monomial(e), c.clone());
        }
        Ok(out)
    }

    /// Exact division by an arbitrary nonzero polynomial, if it divides.
    /// Leading-term division under the graded lexicographic order: the
    /// remainder of the one-divisor division algorithm vanishes exactly when
    /// the division is exact.
    pub fn div_exact(&self, divisor: &Poly) -> Option<Poly> {
        if divisor.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Poly::zero(self.nvars));
        }
        let (lm, lc) = divisor.leading().unwrap();
        let lm = lm.clone();
        let lc = lc.clone();
        let mut rem = self.clone();
        let mut quo = Poly::zero(self.nvars);
        while let Some((m, c)) = rem.leading().map(|(m, c)| (m.clone(), c.clone())) {
            if !lm.divides(&m) {
                return None;
            }
            let qm = m.div(&lm);
            let qc = &c / &lc;
            quo.add_term(qm.clone(), qc.clone());
            rem = rem.sub(&divisor.mul_monomial(&qm, &qc));
        }
        Some(quo)
    }

    /// Multiplicity of `divisor` in `self`: the largest k with divisor^k
    /// dividing. Requires a nonconstant divisor and nonzero self.
    pub fn multiplicity_of(&self, divisor: &Poly) -> Result<u32> {
        if self.is_zero() {
            return Err(Error::domain("multiplicity undefined for the zero polynomial"));
        }
        if divisor.is_constant() {
            return Err(Error::domain("multiplicity along a constant is undefined"));
        }
        // Coordinate fast path.
        if divisor.terms.len() == 1 {
            if let Some((m, _)) = divisor.leading() {
                if m.total_degree() == 1 {
                    let i = m.0.iter().position(|&e| e == 1).unwrap();
                    return self.ord_along_coordinate(i);
                }
            }
        }
        let mut k = 0;
        let mut cur = self.clone();
        while let Some(q) = cur.div_exact(divisor) {
            k += 1;
            cur = q;
        }
        Ok(k)
    }

    /// Write self = sum c_j x_i^j and return (c_0, ..., c_m); each c_j is
    /// free of x_i.
    pub fn coefficients_wrt(&self, i: usize) -> Vec<Poly> {
        let deg = self.degree_in(i) as usize;
        let mut out = vec![Poly::zero(self.nvars); deg + 1];
        for (m, c) in &self.terms {
            let j = m.0[i] as usize;
            let mut e = m.0.clone();
            e[i] = 0;
            out[j].add_term(Monomial(e), c.clone());
        }
        out
    }

    /// Exact iterated partial derivative.
    pub fn partial_derivative(&self, i: usize, order: u32) -> Poly {
        let mut cur = self.clone();
        for _ in 0..order {
            let mut next = Poly::zero(self.nvars);
            for (m, c) in &cur.terms {
                let e = m.0[i];
                if e == 0 {
                    continue;
                }
                let mut em = m.0.clone();
                em[i] -= 1;
                next.add_term(Monomial(em), c * Rat::from_integer(BigInt::from(e)));
            }
            cur = next;
        }
        cur
    }

    /// The linear part after translating `a` to the origin, as coefficients
    /// per variable.
    pub fn linear_part_at(&self, point: &[Rat]) -> Result<Vec<Rat>> {
        let t = self.translate(point)?;
        let mut coeffs = vec![Rat::zero(); self.nvars];
        for (m, c) in &t.terms {
            if m.total_degree() == 1 {
                let i = m.0.iter().position(|&e| e == 1).unwrap();
                coeffs[i] = c.clone();
            }
        }
        Ok(coeffs)
    }

    /// Scale so the graded-lex leading coefficient is positive. Used only
    /// for display; generators are stored exactly as constructed.
    pub fn sign_normalized(&self) -> Poly {
        match self.leading() {
            Some((_, c)) if c.is_negative() => self.neg(),
            _ => self.clone(),
        }
    }

    /// Does every term contain at least one of the given variables?
    /// Equivalent to membership in the coordinate ideal they generate.
    pub fn in_coordinate_ideal(&self, vars: &[usize]) -> bool {
        self.terms
            .keys()
            .all(|m| vars.iter().any(|&v| m.0[v] > 0))
    }
}

fn fmt_rat(c: &Rat) -> String {
    if c.denom().is_one() {
        format!("{}", c.numer())
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

/// Canonical display: graded-lex descending terms, `^` powers, explicit `*`.
pub fn poly_to_string(p: &Poly, names: &[String]) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (idx, (m, c)) in p.terms.iter().rev().enumerate() {
        let neg = c.is_negative();
        let abs = c.abs();
        if idx == 0 {
            if neg {
                out.push('-');
            }
        } else if neg {
            out.push_str(" - ");
        } else {
            out.push_str(" + ");
        }
        let mut factors: Vec<String> = Vec::new();
        if !abs.is_one() || m.total_degree() == 0 {
            factors.push(fmt_rat(&abs));
        }
        for (i, &e) in m.0.iter().enumerate() {
            if e == 1 {
                factors.push(names[i].clone());
            } else if e > 1 {
                factors.push(format!("{}^{}", names[i], e));
            }
        }
        out.push_str(&factors.join("*"));
    }
    out
}

/// Exact parser for the polynomial text grammar: rational coefficients,
/// `^` powers, optional `*`, identifiers as variables, `+`/`-`, parentheses.
pub fn parse_poly(input: &str, names: &[String]) -> Result<Poly> {
    let mut p = Parser {
        chars: input.chars().collect(),
        pos: 0,
        names,
    };
    let poly = p.parse_sum()?;
    p.skip_ws();
    if p.pos != p.chars.len() {
        return Err(Error::input(format!(
            "unexpected trailing input at byte {} in polynomial {input:?}",
            p.pos
        )));
    }
    Ok(poly)
}

struct Parser<'a> {
    chars: Vec<char>,
    pos: usize,
    names: &'a [String],
}

impl<'a> Parser<'a> {
    fn nvars(&self) -> usize {
        self.names.len()
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn parse_sum(&mut self) -> Result<Poly> {
        let mut acc = Poly::zero(self.nvars());
        let mut sign = Rat::one();
        // Optional leading sign.
        match self.peek() {
            Some('-') => {
                self.pos += 1;
                sign = -sign;
            }
            Some('+') => {
                self.pos += 1;
            }
            _ => {}
        }
        loop {
            let term = self.parse_product()?;
            acc = acc.add(&term.scale(&sign));
            match self.peek() {
                Some('+') => {
                    self.pos += 1;
                    sign = Rat::one();
                }
                Some('-') => {
                    self.pos += 1;
                    sign = -Rat::one();
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn parse_product(&mut self) -> Result<Poly> {
        let mut acc = self.parse_power()?;
        loop {
            match self.peek() {
                Some('*') => {
                    self.pos += 1;
                    let rhs = self.parse_power()?;
                    acc = acc.mul(&rhs)?;
                }
                // Implicit multiplication before identifiers, digits, '('.
                Some(c) if c.is_alphabetic() || c == '_' || c.is_ascii_digit() || c == '(' => {
                    let rhs = self.parse_power()?;
                    acc = acc.mul(&rhs)?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn parse_power(&mut self) -> Result<Poly> {
        let base = self.parse_atom()?;
        if self.peek() == Some('^') {
            self.pos += 1;
            self.skip_ws();
            let e = self.parse_integer()?;
            let e: u32 = e.try_into().map_err(|_| Error::input("exponent out of range"))?;
            return base.pow(e);
        }
        Ok(base)
    }

    fn parse_atom(&mut self) -> Result<Poly> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let inner = self.parse_sum()?;
                if self.peek() != Some(')') {
                    return Err(Error::input("expected closing parenthesis"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.parse_integer()?;
                let num = BigInt::from(n);
                let mut den = BigInt::one();
                if self.peek() == Some('/') {
                    self.pos += 1;
                    self.skip_ws();
                    den = BigInt::from(self.parse_integer()?);
                    if den.is_zero() {
                        return Err(Error::input("zero denominator"));
                    }
                }
                Ok(Poly::constant(self.nvars(), Rat::new(num, den)))
            }
            Some(c) if c.is_alphabetic() || c == '_' => {
                let start = self.pos;
                while self.pos < self.chars.len()
                    && (self.chars[self.pos].is_alphanumeric() || self.chars[self.pos] == '_')
                {
                    self.pos += 1;
                }
                let ident: String = self.chars[start..self.pos].iter().collect();
                match self.names.iter().position(|n| *n == ident) {
                    Some(i) => Ok(Poly::var(self.nvars(), i)),
                    None => Err(Error::input(format!("unknown variable `{ident}`"))),
                }
            }
            other => Err(Error::input(format!(
                "unexpected token {other:?} in polynomial"
            ))),
        }
    }

    fn parse_integer(&mut self) -> Result<u64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::input("expected an integer"));
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        s.parse::<u64>()
            .map_err(|_| Error::input("integer out of range"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names() -> Vec<String> {
        vec!["x".into(), "y".into(), "z".into()]
    }

    fn p(s: &str) -> Poly {
        parse_poly(s, &names()).unwrap()
    }

    #[test]
    fn parse_and_print_round_trip() {
        for s in ["z^3 + x*y", "-3/2*x^2*y", "z^2 + x*y*z", "0", "1", "x - y"] {
            let q = p(s);
            let printed = poly_to_string(&q, &names());
            assert_eq!(parse_poly(&printed, &names()).unwrap(), q, "round-trip for {s}");
        }
    }

    #[test]
    fn ord_at_point_examples() {
        assert_eq!(p("x").ord_at_origin(), ExtNat::Finite(1));
        assert_eq!(p("z^3 + x*y").ord_at_origin(), ExtNat::Finite(2));
        assert_eq!(p("0").ord_at_origin(), ExtNat::Infinity);
        // Unit at a point away from its zero set.
        let a = vec![rat_int(1), rat_int(0), rat_int(0)];
        assert_eq!(p("x").ord_at_point(&a).unwrap(), ExtNat::Finite(0));
        assert!(p("x").ord_at_point(&[rat_int(0)]).is_err());
    }

    #[test]
    fn ord_along_coordinate_examples() {
        assert_eq!(p("x*z*(z + x*y)").ord_along_coordinate(0).unwrap(), 1);
        assert_eq!(p("x^2*z*(z + x*y)").ord_along_coordinate(0).unwrap(), 2);
        assert_eq!(p("y").ord_along_coordinate(0).unwrap(), 0);
        assert!(p("0").ord_along_coordinate(0).is_err());
    }

    #[test]
    fn substitute_blowup_chart() {
        // x -> xz, y -> yz, z -> z turns z^3 + xy into z^2 (z + xy).
        let f = p("z^3 + x*y");
        let images = vec![p("x*z"), p("y*z"), p("z")];
        let g = f.substitute(&images).unwrap();
        assert_eq!(g, p("z^2*(z + x*y)"));
        // Identity substitution.
        let id: Vec<Poly> = (0..3).map(|i| Poly::var(3, i)).collect();
        assert_eq!(f.substitute(&id).unwrap(), f);
        // Second chart of the worked example.
        let f2 = p("z*(z + x*y)");
        let images2 = vec![p("x"), p("x*y"), p("x*z")];
        assert_eq!(f2.substitute(&images2).unwrap(), p("x^2*z*(z + x*y)"));
    }

    #[test]
    fn coefficients_wrt_examples() {
        let f = p("z^3 + x*y");
        let cs = f.coefficients_wrt(0);
        assert_eq!(cs.len(), 2);
        assert_eq!(cs[0], p("z^3"));
        assert_eq!(cs[1], p("y"));

        let g = p("z + x*y");
        let cs = g.coefficients_wrt(2);
        assert_eq!(cs[0], p("x*y"));
        assert_eq!(cs[1], p("1"));

        let x = Poly::var(3, 0);
        let cs = x.coefficients_wrt(0);
        assert!(cs[0].is_zero());
        assert_eq!(cs[1], p("1"));
    }

    #[test]
    fn divexact_coordinate_examples() {
        assert_eq!(
            p("z^2*(z + x*y)").divexact_coordinate(2, 1).unwrap(),
            p("z*(z + x*y)")
        );
        let f = p("x + z");
        assert_eq!(f.divexact_coordinate(0, 0).unwrap(), f);
        assert_eq!(
            p("x^3*z*(z + x*y)").divexact_coordinate(0, 1).unwrap(),
            p("x^2*z*(z + x*y)")
        );
        assert!(p("x + z").divexact_coordinate(0, 1).is_err());
    }

    #[test]
    fn partial_derivative_examples() {
        assert_eq!(p("z^3 + x*y").partial_derivative(1, 1), p("x"));
        assert_eq!(p("z^3 + x*y").partial_derivative(2, 2), p("6*z"));
        assert!(p("5").partial_derivative(0, 1).is_zero());
    }

    #[test]
    fn div_exact_general() {
        let f = p("x^2 - y^2");
        let g = p("x - y");
        assert_eq!(f.div_exact(&g).unwrap(), p("x + y"));
        assert!(p("x^2 + y").div_exact(&g).is_none());
        assert_eq!(p("x*y + y^2").multiplicity_of(&p("x + y")).unwrap(), 1);
    }

    #[test]
    fn caps_trip() {
        let old = set_caps(Caps { max_total_degree: 3, max_terms: 100_000 });
        let f = p("x^2");
        let r = f.mul(&f);
        assert!(matches!(r, Err(Error::ResourceCap(_))));
        set_caps(old);
    }
}
