//! Power series in `q`, truncated at a fixed order, with [`LaurentPoly`]
//! coefficients.
//!
//! Every generating function is built from factors `(1 - t^a q^b)^{±1}`.
//! A factor with `b > N` equals `1 + O(q^{N+1})` and is skipped, so all the
//! infinite products below are exact to the requested order.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::laurent::{choose2, LaurentPoly};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeriesError {
    #[error("series is not invertible: constant coefficient {0} is not a unit monomial")]
    NotInvertible(String),
}

/// `sum_{n=0}^{order} c_n q^n + O(q^{order+1})`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SeriesRepr", into = "SeriesRepr")]
pub struct QSeries {
    coeffs: Vec<LaurentPoly>,
}

#[derive(Serialize, Deserialize)]
struct SeriesRepr {
    order: usize,
    coeffs: Vec<LaurentPoly>,
}

impl TryFrom<SeriesRepr> for QSeries {
    type Error = String;
    fn try_from(r: SeriesRepr) -> Result<Self, String> {
        if r.coeffs.len() != r.order + 1 {
            return Err(format!(
                "series of order {} must carry {} coefficients, found {}",
                r.order,
                r.order + 1,
                r.coeffs.len()
            ));
        }
        Ok(Self { coeffs: r.coeffs })
    }
}

impl From<QSeries> for SeriesRepr {
    fn from(s: QSeries) -> Self {
        Self {
            order: s.order(),
            coeffs: s.coeffs,
        }
    }
}

/// A factor `(1 - t^{t_exp} q^{q_exp})^{power}` with `power = ±1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Factor {
    pub t_exp: i64,
    pub q_exp: usize,
    pub inverted: bool,
}

impl Factor {
    /// `(1 - t^{t_exp} q^{q_exp})`
    pub fn numer(t_exp: i64, q_exp: usize) -> Self {
        Self { t_exp, q_exp, inverted: false }
    }

    /// `1 / (1 - t^{t_exp} q^{q_exp})`
    pub fn denom(t_exp: i64, q_exp: usize) -> Self {
        Self { t_exp, q_exp, inverted: true }
    }
}

impl QSeries {
    pub fn zero(order: usize) -> Self {
        Self {
            coeffs: vec![LaurentPoly::zero(); order + 1],
        }
    }

    pub fn one(order: usize) -> Self {
        Self::constant(LaurentPoly::one(), order)
    }

    pub fn constant(c: LaurentPoly, order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = c;
        s
    }

    /// Builds a series from its leading coefficients, padding with zeros up
    /// to `order` and dropping anything beyond it.
    pub fn from_coeffs(mut coeffs: Vec<LaurentPoly>, order: usize) -> Self {
        coeffs.resize(order + 1, LaurentPoly::zero());
        Self { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficient of `q^n`; zero beyond the truncation order.
    pub fn coeff(&self, n: usize) -> LaurentPoly {
        self.coeffs.get(n).cloned().unwrap_or_default()
    }

    pub fn coeff_ref(&self, n: usize) -> &LaurentPoly {
        &self.coeffs[n]
    }

    pub fn coeffs(&self) -> &[LaurentPoly] {
        &self.coeffs
    }

    pub fn set_coeff(&mut self, n: usize, c: LaurentPoly) {
        self.coeffs[n] = c;
    }

    pub fn truncate(&self, order: usize) -> Self {
        Self::from_coeffs(self.coeffs[..=order.min(self.order())].to_vec(), order.min(self.order()))
    }

    /// True iff this is `1 + O(q^{order+1})`.
    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(LaurentPoly::is_zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        Self {
            coeffs: (0..=order).map(|n| &self.coeffs[n] + &other.coeffs[n]).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        Self {
            coeffs: (0..=order).map(|n| &self.coeffs[n] - &other.coeffs[n]).collect(),
        }
    }

    /// Cauchy product truncated at the smaller of the two orders.
    pub fn mul(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        let mut out = Self::zero(order);
        for (i, a) in self.coeffs.iter().enumerate().take(order + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(order + 1 - i) {
                if !b.is_zero() {
                    out.coeffs[i + j] += &(a * b);
                }
            }
        }
        out
    }

    /// Multiplies every coefficient by a Laurent polynomial in `t`.
    pub fn scale(&self, c: &LaurentPoly) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
    }

    /// Multiplies by `q^k`, dropping what falls past the order.
    pub fn shift_q(&self, k: usize) -> Self {
        let order = self.order();
        let mut out = Self::zero(order);
        for n in k..=order {
            out.coeffs[n] = self.coeffs[n - k].clone();
        }
        out
    }

    /// Re-embeds a series computed at order `order - k` as `q^k * self` at `order`.
    fn shift_to_order(&self, k: usize, order: usize) -> Self {
        let mut out = Self::zero(order);
        for (n, c) in self.coeffs.iter().enumerate() {
            if n + k <= order {
                out.coeffs[n + k] = c.clone();
            }
        }
        out
    }

    /// Applies `f` to each coefficient, failing on the first error.
    pub fn try_map<E>(&self, f: impl Fn(&LaurentPoly) -> Result<LaurentPoly, E>) -> Result<Self, E> {
        Ok(Self {
            coeffs: self.coeffs.iter().map(f).collect::<Result<_, _>>()?,
        })
    }

    /// Multiplicative inverse; the constant coefficient must be `±t^k`.
    pub fn inv(&self) -> Result<Self, SeriesError> {
        let c0_inv = self.coeffs[0]
            .unit_inverse()
            .ok_or_else(|| SeriesError::NotInvertible(self.coeffs[0].to_string()))?;
        let order = self.order();
        let mut g = Self::zero(order);
        g.coeffs[0] = c0_inv.clone();
        for n in 1..=order {
            let mut acc = LaurentPoly::zero();
            for i in 1..=n {
                if !self.coeffs[i].is_zero() && !g.coeffs[n - i].is_zero() {
                    acc += &(&self.coeffs[i] * &g.coeffs[n - i]);
                }
            }
            g.coeffs[n] = -(&acc * &c0_inv);
        }
        Ok(g)
    }

    /// In-place multiplication by `(1 - t^{t_exp} q^{q_exp})^{±1}`.
    pub fn apply_factor(&mut self, f: Factor) {
        let order = self.order();
        let k = f.q_exp;
        assert!(k >= 1, "series factors need a positive q-exponent");
        if k > order {
            return;
        }
        let one = BigInt::from(1);
        if f.inverted {
            // a_n += t^e a_{n-k}, ascending so the geometric series accumulates.
            for n in k..=order {
                let (lo, hi) = self.coeffs.split_at_mut(n);
                hi[0].add_shifted(&lo[n - k], f.t_exp, &one);
            }
        } else {
            let minus_one = BigInt::from(-1);
            for n in (k..=order).rev() {
                let (lo, hi) = self.coeffs.split_at_mut(n);
                hi[0].add_shifted(&lo[n - k], f.t_exp, &minus_one);
            }
        }
    }

    /// `prod (1 - t^{t_exp} q^{q_exp})^{±1}` truncated at `order`.
    pub fn product_factors(factors: &[Factor], order: usize) -> Self {
        let mut s = Self::one(order);
        for &f in factors {
            s.apply_factor(f);
        }
        s
    }

    /// Integer coefficients of the `t = 1` specialisation.
    pub fn eval_at_one(&self) -> Vec<BigInt> {
        self.coeffs.iter().map(LaurentPoly::eval_at_one).collect()
    }
}

/// `sum_n E(H^[n]) q^n = prod_{d>=1} 1/(1 - t^{d+1} q^d)`.
pub fn series_h(order: usize) -> QSeries {
    let factors: Vec<_> = (1..=order).map(|d| Factor::denom(d as i64 + 1, d)).collect();
    QSeries::product_factors(&factors, order)
}

/// Generating function of `E(H^[n,n+r])`:
/// `q^{C(r,2)} prod_{d>=1} 1/(1 - t^{d+1} q^d) prod_{d=1}^{r} 1/(1 - t^d q^d)`.
pub fn series_hnnr(r: usize, order: usize) -> QSeries {
    let lead = choose2(r as i64) as usize;
    if lead > order {
        return QSeries::zero(order);
    }
    let mut factors: Vec<_> = (1..=order).map(|d| Factor::denom(d as i64 + 1, d)).collect();
    factors.extend((1..=r.min(order)).map(|d| Factor::denom(d as i64, d)));
    QSeries::product_factors(&factors, order - lead).shift_to_order(lead, order)
}

/// `sum_n E(Y_0^[n]) q^n = prod_{d>=1} (1 - t^{d-1} q^d) / (1 - t^{d+1} q^d)`,
/// the Hilbert schemes of points of the punctured plane.
pub fn series_y0(order: usize) -> QSeries {
    let factors: Vec<_> = (1..=order)
        .flat_map(|d| {
            let d_t = d as i64;
            [Factor::numer(d_t - 1, d), Factor::denom(d_t + 1, d)]
        })
        .collect();
    QSeries::product_factors(&factors, order)
}

/// Dual E-polynomials `t^{2n} E(Y_0^[n]; t^{-1})`:
/// `prod_{d>=1} (1 - t^{d+1} q^d) / (1 - t^{d-1} q^d)`.
pub fn series_y0_dual(order: usize) -> QSeries {
    let factors: Vec<_> = (1..=order)
        .flat_map(|d| {
            let d_t = d as i64;
            [Factor::numer(d_t + 1, d), Factor::denom(d_t - 1, d)]
        })
        .collect();
    QSeries::product_factors(&factors, order)
}

/// Poincaré polynomials of `H^[n]` in `sqrt t`: `prod_{d>=1} 1/(1 - t^{d-1} q^d)`.
pub fn series_poincare_h(order: usize) -> QSeries {
    let factors: Vec<_> = (1..=order).map(|d| Factor::denom(d as i64 - 1, d)).collect();
    QSeries::product_factors(&factors, order)
}

/// `(tq)_k = prod_{d=1}^{k} (1 - t^d q^d)`.
pub fn q_pochhammer(k: usize, order: usize) -> QSeries {
    let factors: Vec<_> = (1..=k).map(|d| Factor::numer(d as i64, d)).collect();
    QSeries::product_factors(&factors, order)
}

/// Both sides of the Euler identity
/// `sum_n (-1)^n z^n q^{C(n,2)} / (q)_n = prod_{n>=0} (1 - z q^n)`
/// after `q -> tq`, `z -> t^{z_exp}`, truncated at `order`.
pub fn euler_identity_sides(z_exp: i64, order: usize) -> (QSeries, QSeries) {
    let mut lhs = QSeries::zero(order);
    for n in 0usize.. {
        let qdeg = choose2(n as i64) as usize;
        if qdeg > order {
            break;
        }
        // (tq)^{C(n,2)} (-1)^n t^{z n} / (tq)_n
        let coeff = LaurentPoly::monomial(qdeg as i64 + z_exp * n as i64, if n % 2 == 0 { 1 } else { -1 });
        let denom = q_pochhammer(n, order)
            .inv()
            .expect("(tq)_n has constant term 1");
        lhs = lhs.add(&denom.scale(&coeff).shift_q(qdeg));
    }
    let factors: Vec<_> = (1..=order).map(|n| Factor::numer(z_exp + n as i64, n)).collect();
    let rhs = QSeries::product_factors(&factors, order).scale(&LaurentPoly::one_minus_t_pow(z_exp));
    (lhs, rhs)
}

pub fn euler_identity_check(z_exp: i64, order: usize) -> bool {
    let (lhs, rhs) = euler_identity_sides(z_exp, order);
    lhs == rhs
}
