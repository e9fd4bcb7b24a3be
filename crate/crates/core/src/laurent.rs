//! Sparse Laurent polynomials in one variable `t` with big-integer coefficients.
//!
//! Every E-polynomial computed by this crate is a [`LaurentPoly`]. Intermediate
//! values (the closed-form generating functions in particular) routinely carry
//! negative powers of `t`, so the representation is a sparse map keyed by a
//! signed exponent. Zero coefficients are never stored, which makes structural
//! equality coincide with polynomial equality.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LaurentError {
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("division is not exact: nonzero remainder {remainder}")]
    InexactDivision { remainder: String },
    #[error("cannot parse polynomial {input:?}: {reason}")]
    Parse { input: String, reason: String },
}

/// An exact Laurent polynomial `sum c_k t^k` with `c_k` arbitrary-precision integers.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    terms: BTreeMap<i64, BigInt>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(0, 1)
    }

    /// `coeff * t^exp`.
    pub fn monomial(exp: i64, coeff: impl Into<BigInt>) -> Self {
        let coeff = coeff.into();
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(exp, coeff);
        }
        Self { terms }
    }

    /// `t^exp`.
    pub fn t_pow(exp: i64) -> Self {
        Self::monomial(exp, 1)
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        Self::monomial(0, c)
    }

    /// Builds a polynomial from `(exponent, coefficient)` pairs; repeated
    /// exponents are summed.
    pub fn from_terms<I, C>(terms: I) -> Self
    where
        I: IntoIterator<Item = (i64, C)>,
        C: Into<BigInt>,
    {
        let mut p = Self::zero();
        for (e, c) in terms {
            p.add_term(e, c.into());
        }
        p
    }

    /// `1 - t^exp`, the building block of every product in this crate.
    pub fn one_minus_t_pow(exp: i64) -> Self {
        Self::one() - Self::t_pow(exp)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&0).is_some_and(|c| c.is_one())
    }

    /// Terms in ascending exponent order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (i64, &BigInt)> + '_ {
        self.terms.iter().map(|(&e, c)| (e, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, exp: i64) -> BigInt {
        self.terms.get(&exp).cloned().unwrap_or_default()
    }

    pub fn min_exp(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    /// True iff no exponent is negative.
    pub fn is_polynomial(&self) -> bool {
        self.min_exp().is_none_or(|e| e >= 0)
    }

    /// Value at `t = 1`, i.e. the sum of all coefficients.
    pub fn eval_at_one(&self) -> BigInt {
        self.terms.values().sum()
    }

    /// If `self = ±t^k`, returns its multiplicative inverse `±t^{-k}`.
    pub fn unit_inverse(&self) -> Option<Self> {
        if self.terms.len() != 1 {
            return None;
        }
        let (&e, c) = self.terms.iter().next()?;
        if c.abs().is_one() {
            Some(Self::monomial(-e, c.clone()))
        } else {
            None
        }
    }

    /// Multiplies by `t^k`.
    pub fn shift(&self, k: i64) -> Self {
        Self {
            terms: self.terms.iter().map(|(&e, c)| (e + k, c.clone())).collect(),
        }
    }

    /// Substitutes `t -> t^{-1}`.
    pub fn reflect(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|(&e, c)| (-e, c.clone())).collect(),
        }
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(&e, v)| (e, v * c)).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// `self += c * t^e * other`; the hot loop of series arithmetic.
    pub fn add_shifted(&mut self, other: &Self, e: i64, c: &BigInt) {
        for (&k, v) in &other.terms {
            self.add_term(k + e, v * c);
        }
    }

    fn add_term(&mut self, exp: i64, c: BigInt) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exp) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// Exact quotient `self / divisor` in the Laurent ring.
    ///
    /// Fails if the divisor is zero or does not divide `self`.
    pub fn div_exact(&self, divisor: &Self) -> Result<Self, LaurentError> {
        let (dmin, dmax) = match (divisor.min_exp(), divisor.max_exp()) {
            (Some(a), Some(b)) => (a, b),
            _ => return Err(LaurentError::DivisionByZero),
        };
        let Some(pmin) = self.min_exp() else {
            return Ok(Self::zero());
        };
        // Normalise both sides to polynomials with nonzero constant term; the
        // quotient is then a genuine polynomial.
        let mut rem = self.shift(-pmin);
        let d = divisor.shift(-dmin);
        let ddeg = dmax - dmin;
        let lead = d.coeff(ddeg);
        let mut quot = Self::zero();
        while let Some(rdeg) = rem.max_exp() {
            if rdeg < ddeg {
                break;
            }
            let (q, r) = rem.coeff(rdeg).div_rem(&lead);
            if !r.is_zero() {
                break;
            }
            let k = rdeg - ddeg;
            rem.add_shifted(&d, k, &-&q);
            quot.add_term(k, q);
        }
        if !rem.is_zero() {
            return Err(LaurentError::InexactDivision {
                remainder: rem.shift(pmin).to_string(),
            });
        }
        Ok(quot.shift(pmin - dmin))
    }

    /// Renders in descending degree with the given multiplication sign
    /// between coefficient and power, e.g. `"*"` gives `t^4+2*t^3-t`.
    fn render(&self, times: &str, braces: bool) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (e, c)) in self.terms().rev().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if neg {
                out.push('-');
            } else if i > 0 {
                out.push('+');
            }
            let unit = mag.is_one();
            if e == 0 {
                out.push_str(&mag.to_string());
                continue;
            }
            if !unit {
                out.push_str(&mag.to_string());
                out.push_str(times);
            }
            out.push('t');
            if e != 1 {
                let es = e.to_string();
                if braces && (es.len() > 1) {
                    out.push_str(&format!("^{{{es}}}"));
                } else {
                    out.push('^');
                    out.push_str(&es);
                }
            }
        }
        out
    }

    /// Canonical plain-text form: `t^4+2*t^3-t`.
    pub fn to_canonical_string(&self) -> String {
        self.render("*", false)
    }

    /// LaTeX table-cell form: `t^{10}+2 t^3-t`.
    pub fn to_latex(&self) -> String {
        self.render(" ", true)
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_canonical_string())
    }
}

/// Parses the canonical form and the LaTeX form (`5 t^4+7 t^3`, `t^{10}`,
/// `2*t^-1`). Whitespace is insignificant.
impl FromStr for LaurentPoly {
    type Err = LaurentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = |reason: &str| LaurentError::Parse {
            input: s.to_string(),
            reason: reason.to_string(),
        };
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(err("empty input"));
        }
        let bytes = compact.as_bytes();
        let mut out = Self::zero();
        let mut i = 0;
        while i < bytes.len() {
            let mut sign = BigInt::one();
            if bytes[i] == b'+' || bytes[i] == b'-' {
                if bytes[i] == b'-' {
                    sign = -sign;
                }
                i += 1;
            } else if i > 0 {
                return Err(err("expected '+' or '-' between terms"));
            }
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let coeff = if i > start {
                compact[start..i]
                    .parse::<BigInt>()
                    .map_err(|_| err("bad coefficient"))?
            } else {
                BigInt::one()
            };
            if i < bytes.len() && bytes[i] == b'*' {
                i += 1;
            }
            let mut exp = 0i64;
            if i < bytes.len() && bytes[i] == b't' {
                i += 1;
                exp = 1;
                if i < bytes.len() && bytes[i] == b'^' {
                    i += 1;
                    let braced = i < bytes.len() && bytes[i] == b'{';
                    if braced {
                        i += 1;
                    }
                    let estart = i;
                    if i < bytes.len() && bytes[i] == b'-' {
                        i += 1;
                    }
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                    exp = compact[estart..i]
                        .parse()
                        .map_err(|_| err("bad exponent"))?;
                    if braced {
                        if i >= bytes.len() || bytes[i] != b'}' {
                            return Err(err("unclosed brace"));
                        }
                        i += 1;
                    }
                }
            } else if i == start {
                return Err(err("empty term"));
            }
            out.add_term(exp, sign * coeff);
        }
        Ok(out)
    }
}

impl Serialize for LaurentPoly {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            terms: Vec<(i64, String)>,
        }
        Repr {
            terms: self.terms().map(|(e, c)| (e, c.to_string())).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for LaurentPoly {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            terms: Vec<(i64, String)>,
        }
        let repr = Repr::deserialize(deserializer)?;
        let mut p = LaurentPoly::zero();
        for (e, c) in repr.terms {
            let c: BigInt = c.parse().map_err(D::Error::custom)?;
            p.add_term(e, c);
        }
        Ok(p)
    }
}

impl From<i64> for LaurentPoly {
    fn from(c: i64) -> Self {
        Self::constant(c)
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly {
            terms: self.terms.iter().map(|(&e, c)| (e, -c)).collect(),
        }
    }
}

impl Neg for LaurentPoly {
    type Output = LaurentPoly;
    fn neg(mut self) -> LaurentPoly {
        for c in self.terms.values_mut() {
            *c = -std::mem::take(c);
        }
        self
    }
}

impl AddAssign<&LaurentPoly> for LaurentPoly {
    fn add_assign(&mut self, rhs: &LaurentPoly) {
        for (&e, c) in &rhs.terms {
            self.add_term(e, c.clone());
        }
    }
}

impl SubAssign<&LaurentPoly> for LaurentPoly {
    fn sub_assign(&mut self, rhs: &LaurentPoly) {
        for (&e, c) in &rhs.terms {
            self.add_term(e, -c);
        }
    }
}

impl MulAssign<&LaurentPoly> for LaurentPoly {
    fn mul_assign(&mut self, rhs: &LaurentPoly) {
        *self = &*self * rhs;
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for (&e, c) in &self.terms {
            out.add_shifted(rhs, e, c);
        }
        out
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $assign:ident) => {
        impl $tr<&LaurentPoly> for LaurentPoly {
            type Output = LaurentPoly;
            fn $method(mut self, rhs: &LaurentPoly) -> LaurentPoly {
                self.$assign(rhs);
                self
            }
        }
        impl $tr for LaurentPoly {
            type Output = LaurentPoly;
            fn $method(mut self, rhs: LaurentPoly) -> LaurentPoly {
                self.$assign(&rhs);
                self
            }
        }
        impl $tr for &LaurentPoly {
            type Output = LaurentPoly;
            fn $method(self, rhs: &LaurentPoly) -> LaurentPoly {
                let mut out = self.clone();
                out.$assign(rhs);
                out
            }
        }
    };
}

forward_binop!(Add, add, add_assign);
forward_binop!(Sub, sub, sub_assign);

impl Mul<&LaurentPoly> for LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        &self * rhs
    }
}

impl Mul for LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: LaurentPoly) -> LaurentPoly {
        &self * &rhs
    }
}

impl std::iter::Sum for LaurentPoly {
    fn sum<I: Iterator<Item = LaurentPoly>>(iter: I) -> Self {
        iter.fold(LaurentPoly::zero(), |acc, p| acc + p)
    }
}

/// Gaussian binomial coefficient `[m over a]_t`.
///
/// Built as the running product `prod (1 - t^{m-i}) / (1 - t^{i+1})`; each
/// partial product is itself a Gaussian binomial, so every division is exact.
pub fn gauss_binomial(m: u32, a: u32) -> LaurentPoly {
    if a > m {
        return LaurentPoly::zero();
    }
    let mut acc = LaurentPoly::one();
    for i in 0..a {
        acc = &acc * &LaurentPoly::one_minus_t_pow(i64::from(m - i));
        acc = acc
            .div_exact(&LaurentPoly::one_minus_t_pow(i64::from(i + 1)))
            .expect("partial Gaussian binomial products are polynomials");
    }
    acc
}

/// Ordinary binomial coefficient as a big integer.
pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// `C(n, 2)` for signed `n`; zero for `n < 2`.
pub fn choose2(n: i64) -> i64 {
    if n < 2 {
        0
    } else {
        n * (n - 1) / 2
    }
}
