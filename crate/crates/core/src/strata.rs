//! E-polynomials of the generator-number strata.
//!
//! Two independent routes produce the same tables:
//!
//! * the matrix pipeline `X = G^{-1} R` and `B = X A^{-1}`, where `R` holds
//!   the E-polynomials of the nested schemes `H^[n,n+r]`, `G` the Gaussian
//!   binomials and `A` the E-polynomials of `Y_0^[n]` (points away from the
//!   origin);
//! * closed-form generating functions for each row `m`.
//!
//! Rows are indexed by `m` (the number of generators) from 1, columns by `n`
//! from 0. Rows above `mu_max(N)` vanish identically on columns `0..=N`, so
//! truncating there is exact.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagrams::{count_partitions_with_mu, e_poly_bnnr_fixed, e_poly_hnnr_fixed, mu_max};
use crate::laurent::{binomial, choose2, gauss_binomial, LaurentError, LaurentPoly};
use crate::qseries::{
    euler_identity_sides, series_h, series_hnnr, series_y0, series_y0_dual, Factor, QSeries,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StrataError {
    #[error("coefficient of q^{n} in row m={m} is not a polynomial: {poly}")]
    NonPolynomialCoefficient { m: u32, n: usize, poly: String },
    #[error(transparent)]
    Division(#[from] LaurentError),
    #[error("matrix shapes do not compose: {0}")]
    Shape(String),
}

/// A finite block of one of the infinite matrices, with explicit index bases.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrataMatrix {
    row_base: usize,
    col_base: usize,
    entries: Vec<Vec<LaurentPoly>>,
}

impl StrataMatrix {
    pub fn zeros(row_base: usize, rows: usize, col_base: usize, cols: usize) -> Self {
        Self {
            row_base,
            col_base,
            entries: vec![vec![LaurentPoly::zero(); cols]; rows],
        }
    }

    pub fn from_fn(
        row_base: usize,
        rows: usize,
        col_base: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> LaurentPoly,
    ) -> Self {
        let entries = (0..rows)
            .map(|i| (0..cols).map(|j| f(i + row_base, j + col_base)).collect())
            .collect();
        Self { row_base, col_base, entries }
    }

    pub fn row_base(&self) -> usize {
        self.row_base
    }

    pub fn col_base(&self) -> usize {
        self.col_base
    }

    pub fn rows(&self) -> usize {
        self.entries.len()
    }

    pub fn cols(&self) -> usize {
        self.entries.first().map_or(0, Vec::len)
    }

    pub fn row_indices(&self) -> std::ops::Range<usize> {
        self.row_base..self.row_base + self.rows()
    }

    pub fn col_indices(&self) -> std::ops::Range<usize> {
        self.col_base..self.col_base + self.cols()
    }

    /// Entry at labelled position `(i, j)`.
    pub fn get(&self, i: usize, j: usize) -> &LaurentPoly {
        &self.entries[i - self.row_base][j - self.col_base]
    }

    pub fn set(&mut self, i: usize, j: usize, v: LaurentPoly) {
        self.entries[i - self.row_base][j - self.col_base] = v;
    }

    /// Product; the column labels of `self` must coincide with the row
    /// labels of `other`.
    pub fn mul(&self, other: &Self) -> Result<Self, StrataError> {
        if self.col_base != other.row_base || self.cols() != other.rows() {
            return Err(StrataError::Shape(format!(
                "columns {:?} against rows {:?}",
                self.col_indices(),
                other.row_indices()
            )));
        }
        let mut out = Self::zeros(self.row_base, self.rows(), other.col_base, other.cols());
        for (i, row) in self.entries.iter().enumerate() {
            for (k, a) in row.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                for (j, b) in other.entries[k].iter().enumerate() {
                    if !b.is_zero() {
                        out.entries[i][j] += &(a * b);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Labelled positions where `self` differs from the identity.
    pub fn identity_defects(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in self.row_indices() {
            for j in self.col_indices() {
                let want_one = i - self.row_base == j - self.col_base;
                let v = self.get(i, j);
                if (want_one && !v.is_one()) || (!want_one && !v.is_zero()) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn is_identity(&self) -> bool {
        self.rows() == self.cols() && self.identity_defects().is_empty()
    }

    /// True iff every entry below the diagonal is zero.
    pub fn is_upper_triangular(&self) -> bool {
        self.row_indices().all(|i| {
            self.col_indices()
                .filter(|&j| j - self.col_base < i - self.row_base)
                .all(|j| self.get(i, j).is_zero())
        })
    }
}

/// `{"row_labels": [...], "col_labels": [...], "entries": [[poly, ...], ...]}`.
#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    row_labels: Vec<usize>,
    col_labels: Vec<usize>,
    entries: Vec<Vec<LaurentPoly>>,
}

impl Serialize for StrataMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        MatrixRepr {
            row_labels: self.row_indices().collect(),
            col_labels: self.col_indices().collect(),
            entries: self.entries.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for StrataMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let repr = MatrixRepr::deserialize(d)?;
        let contiguous = |labels: &[usize]| labels.windows(2).all(|w| w[1] == w[0] + 1);
        if !contiguous(&repr.row_labels) || !contiguous(&repr.col_labels) {
            return Err(D::Error::custom("matrix labels must be contiguous"));
        }
        if repr.entries.len() != repr.row_labels.len()
            || repr.entries.iter().any(|r| r.len() != repr.col_labels.len())
        {
            return Err(D::Error::custom("matrix entries do not match labels"));
        }
        Ok(Self {
            row_base: repr.row_labels.first().copied().unwrap_or(0),
            col_base: repr.col_labels.first().copied().unwrap_or(0),
            entries: repr.entries,
        })
    }
}

/// `G[i][j] = [j over i]_t` for `1 <= i, j <= size`.
pub fn build_g(size: usize) -> StrataMatrix {
    StrataMatrix::from_fn(1, size, 1, size, |i, j| gauss_binomial(j as u32, i as u32))
}

/// `G^{-1}[i][j] = (-1)^{j-i} t^{C(j-i,2)} [j over i]_t`.
pub fn build_g_inverse(size: usize) -> StrataMatrix {
    StrataMatrix::from_fn(1, size, 1, size, |i, j| {
        if j < i {
            return LaurentPoly::zero();
        }
        let d = (j - i) as i64;
        let sign = if d % 2 == 0 { 1 } else { -1 };
        gauss_binomial(j as u32, i as u32) * LaurentPoly::monomial(choose2(d), sign)
    })
}

/// How the `E(H^[n,n+r])` entries are obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RMethod {
    /// Coefficients of the closed-form generating function.
    Series,
    /// Sums over marked Young diagrams.
    FixedPoint,
}

/// `R[r][n] = E(H^[n,n+r])` for `1 <= r <= max_r`, `0 <= n <= order`.
pub fn build_r(max_r: usize, order: usize, method: RMethod) -> StrataMatrix {
    let mut out = StrataMatrix::zeros(1, max_r, 0, order + 1);
    for r in 1..=max_r {
        match method {
            RMethod::Series => {
                let s = series_hnnr(r, order);
                for n in 0..=order {
                    out.set(r, n, s.coeff(n));
                }
            }
            RMethod::FixedPoint => {
                for n in 0..=order {
                    out.set(r, n, e_poly_hnnr_fixed(n as u32, r as u32));
                }
            }
        }
    }
    out
}

/// Upper-triangular Toeplitz matrix `M[i][j] = s_{j-i}` on labels
/// `base..=base+order`.
fn toeplitz(s: &QSeries, base: usize) -> StrataMatrix {
    let size = s.order() + 1;
    StrataMatrix::from_fn(base, size, base, size, |i, j| {
        if j >= i {
            s.coeff(j - i)
        } else {
            LaurentPoly::zero()
        }
    })
}

/// `A[i][j] = E(Y_0^[j-i])` for `1 <= i, j <= order + 1`.
pub fn build_a(order: usize) -> StrataMatrix {
    toeplitz(&series_y0(order), 1)
}

/// `A^{-1}[i][j]`: the dual E-polynomial of `Y_0^[j-i]`.
pub fn build_a_inverse(order: usize) -> StrataMatrix {
    toeplitz(&series_y0_dual(order), 1)
}

/// All matrices of the pipeline at truncation order `N`.
#[derive(Clone, Debug)]
pub struct StrataTables {
    pub order: usize,
    pub g: StrataMatrix,
    pub g_inv: StrataMatrix,
    pub r: StrataMatrix,
    pub a: StrataMatrix,
    pub a_inv: StrataMatrix,
    pub y0: QSeries,
    pub y0_dual: QSeries,
    /// `X[m][n] = E(H^[n]_m)`.
    pub x: StrataMatrix,
    /// `B[m][n] = E(B^[n]_m)`.
    pub b: StrataMatrix,
}

impl StrataTables {
    pub fn compute(order: usize) -> Self {
        Self::compute_with(order, RMethod::Series)
    }

    pub fn compute_with(order: usize, method: RMethod) -> Self {
        let max_m = mu_max(order as u32) as usize;
        let g = build_g(max_m);
        let g_inv = build_g_inverse(max_m);
        let r = build_r(max_m, order, method);
        let y0 = series_y0(order);
        let y0_dual = series_y0_dual(order);
        let x = g_inv.mul(&r).expect("G^{-1} and R share the m labels");
        // B has columns from n = 0 while A is labelled from 1; pairing
        // B[m][s] with A^{-1}[s][n] = dual(n - s) over 0 <= s <= n makes
        // B A = X hold literally.
        let b = x
            .mul(&toeplitz(&y0_dual, 0))
            .expect("X columns and the shifted A^{-1} share the n labels");
        Self {
            order,
            g,
            g_inv,
            r,
            a: toeplitz(&y0, 1),
            a_inv: toeplitz(&y0_dual, 1),
            y0,
            y0_dual,
            x,
            b,
        }
    }

    pub fn max_m(&self) -> usize {
        self.x.rows()
    }
}

/// `X[m][n] = E(H^[n]_m)` for `1 <= m <= mu_max(N)`, `0 <= n <= N`.
pub fn compute_x(order: usize) -> StrataMatrix {
    StrataTables::compute(order).x
}

/// `B[m][n] = E(B^[n]_m)` for `1 <= m <= mu_max(N)`, `0 <= n <= N`.
pub fn compute_b(order: usize) -> StrataMatrix {
    StrataTables::compute(order).b
}

fn sign(k: u32) -> i64 {
    if k.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Shared shape of both closed forms:
/// `prod_{i=1}^{m-1} 1/(1-t^{i+1}) * sum_{a=1}^{m} (-1)^{a+sign_shift} t^{C(a,2)+m+t_shift} [m over a]_t
///   * prod_{k>=0} (1 - q^k t^{k-a}) / (1 - q^k t^{k+den_shift})`.
fn closed_form(
    m: u32,
    order: usize,
    sign_shift: u32,
    t_shift: i64,
    den_shift: i64,
) -> Result<QSeries, StrataError> {
    assert!(m >= 1, "strata are indexed from m = 1");
    let denominators: Vec<_> = (1..=order)
        .map(|k| Factor::denom(k as i64 + den_shift, k))
        .collect();
    let common = QSeries::product_factors(&denominators, order);
    let mut sum = QSeries::zero(order);
    for a in 1..=m {
        let a_t = i64::from(a);
        // k = 0 factor, a Laurent polynomial in t alone.
        let k0 = LaurentPoly::one_minus_t_pow(-a_t).div_exact(&LaurentPoly::one_minus_t_pow(den_shift))?;
        let scalar = LaurentPoly::monomial(choose2(a_t) + i64::from(m) + t_shift, sign(a + sign_shift))
            * gauss_binomial(m, a)
            * k0;
        let mut term = common.clone();
        for k in 1..=order {
            term.apply_factor(Factor::numer(k as i64 - a_t, k));
        }
        sum = sum.add(&term.scale(&scalar));
    }
    let prefactor: LaurentPoly = (1..m)
        .map(|i| LaurentPoly::one_minus_t_pow(i64::from(i) + 1))
        .fold(LaurentPoly::one(), |acc, f| acc * f);
    let out = sum.try_map(|c| c.div_exact(&prefactor))?;
    if let Some(n) = out.coeffs().iter().position(|c| !c.is_polynomial()) {
        return Err(StrataError::NonPolynomialCoefficient {
            m,
            n,
            poly: out.coeff(n).to_string(),
        });
    }
    Ok(out)
}

/// `sum_n E(B^[n]_m) q^n` from its closed form.
pub fn closed_form_b(m: u32, order: usize) -> Result<QSeries, StrataError> {
    closed_form(m, order, 1, -1, -1)
}

/// `sum_n E(H^[n]_m) q^n` from its closed form.
pub fn closed_form_x(m: u32, order: usize) -> Result<QSeries, StrataError> {
    closed_form(m, order, 0, 0, 1)
}

/// `sum_n chi(B^[n]_m) q^n
///   = prod_{d>=1} 1/(1-q^d) * sum_{k>=m} (-1)^{k-m} C(k,m) q^{C(k,2)} / (q)_k`.
///
/// Coefficients are constant Laurent polynomials.
pub fn chi_series(m: u32, order: usize) -> QSeries {
    let mut sum = QSeries::zero(order);
    for k in m as usize.. {
        let qdeg = choose2(k as i64) as usize;
        if qdeg > order {
            break;
        }
        let factors: Vec<_> = (1..=k).map(|d| Factor::denom(0, d)).collect();
        let c = binomial(k as u64, u64::from(m)) * BigInt::from(sign(k as u32 - m));
        let term = QSeries::product_factors(&factors, order)
            .shift_q(qdeg)
            .scale(&LaurentPoly::constant(c));
        sum = sum.add(&term);
    }
    let euler: Vec<_> = (1..=order).map(|d| Factor::denom(0, d)).collect();
    sum.mul(&QSeries::product_factors(&euler, order))
}

/// Both sides of
/// `sum_{i=0}^{m} (-1)^{m+i} t^{km - C(m,2) + C(i,2) - ik} [m over i]_t = prod_{i=0}^{m-1} (1 - t^{k-i})`.
pub fn lemma_identity_sides(m: u32, k: i64) -> (LaurentPoly, LaurentPoly) {
    let m_t = i64::from(m);
    let lhs = (0..=m)
        .map(|i| {
            let i_t = i64::from(i);
            LaurentPoly::monomial(k * m_t - choose2(m_t) + choose2(i_t) - i_t * k, sign(m + i))
                * gauss_binomial(m, i)
        })
        .sum();
    let rhs = (0..m_t)
        .map(|i| LaurentPoly::one_minus_t_pow(k - i))
        .fold(LaurentPoly::one(), |acc, f| acc * f);
    (lhs, rhs)
}

pub fn lemma_identity_check(m: u32, k: i64) -> bool {
    let (l, r) = lemma_identity_sides(m, k);
    l == r
}

/// Closed-form series for every row `1..=max_m`, indexed by `m - 1`.
#[derive(Clone, Debug)]
pub struct ClosedForms {
    pub b: Vec<QSeries>,
    pub x: Vec<QSeries>,
    pub chi: Vec<QSeries>,
}

impl ClosedForms {
    pub fn compute(max_m: u32, order: usize) -> Result<Self, StrataError> {
        Ok(Self {
            b: (1..=max_m).map(|m| closed_form_b(m, order)).collect::<Result<_, _>>()?,
            x: (1..=max_m).map(|m| closed_form_x(m, order)).collect::<Result<_, _>>()?,
            chi: (1..=max_m).map(|m| chi_series(m, order)).collect(),
        })
    }
}

/// Bounds for [`verify_tables`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyOptions {
    pub order: usize,
    /// Largest `r` for the fixed-point route to `R`.
    pub fixed_point_max_r: usize,
    /// Largest `n` for fixed-point checks.
    pub fixed_point_max_n: usize,
    pub lemma_max_m: u32,
    pub lemma_k_range: (i64, i64),
    pub euler_z_range: (i64, i64),
    pub euler_order: usize,
}

impl VerifyOptions {
    pub fn for_order(order: usize) -> Self {
        Self {
            order,
            fixed_point_max_r: 4,
            fixed_point_max_n: order.min(10),
            lemma_max_m: 6,
            lemma_k_range: (-3, 10),
            euler_z_range: (-5, 0),
            euler_order: order,
        }
    }
}

/// One failing instance of an identity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Failure {
    pub coords: BTreeMap<String, i64>,
    pub expected: String,
    pub actual: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub cases: usize,
    pub failures: Vec<Failure>,
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub order: usize,
    pub checks: Vec<CheckOutcome>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckOutcome::passed)
    }

    pub fn failing(&self) -> impl Iterator<Item = &CheckOutcome> {
        self.checks.iter().filter(|c| !c.passed())
    }

    pub fn check(&self, name: &str) -> Option<&CheckOutcome> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let status = if c.passed() { "ok" } else { "FAILED" };
            writeln!(f, "{status:<6} {:<28} {} cases, {} failures", c.name, c.cases, c.failures.len())?;
        }
        Ok(())
    }
}

struct Check {
    outcome: CheckOutcome,
}

impl Check {
    fn new(name: &str) -> Self {
        Self {
            outcome: CheckOutcome {
                name: name.to_string(),
                cases: 0,
                failures: Vec::new(),
            },
        }
    }

    fn expect_eq<T: PartialEq + fmt::Display>(&mut self, coords: &[(&str, i64)], expected: &T, actual: &T) {
        self.outcome.cases += 1;
        if expected != actual {
            self.fail(coords, expected.to_string(), actual.to_string());
        }
    }

    fn expect(&mut self, coords: &[(&str, i64)], ok: bool, expected: &str, actual: impl fmt::Display) {
        self.outcome.cases += 1;
        if !ok {
            self.fail(coords, expected.to_string(), actual.to_string());
        }
    }

    fn fail(&mut self, coords: &[(&str, i64)], expected: String, actual: String) {
        self.outcome.failures.push(Failure {
            coords: coords.iter().map(|&(k, v)| (k.to_string(), v)).collect(),
            expected,
            actual,
        });
    }

    fn done(self) -> CheckOutcome {
        self.outcome
    }
}

fn identity_check(name: &str, product: Result<StrataMatrix, StrataError>) -> CheckOutcome {
    let mut c = Check::new(name);
    match product {
        Ok(p) => {
            for i in p.row_indices() {
                for j in p.col_indices() {
                    let want = if i - p.row_base() == j - p.col_base() {
                        LaurentPoly::one()
                    } else {
                        LaurentPoly::zero()
                    };
                    c.expect_eq(&[("i", i as i64), ("j", j as i64)], &want, p.get(i, j));
                }
            }
        }
        Err(e) => c.expect(&[], false, "composable matrices", e),
    }
    c.done()
}

/// Runs every identity against precomputed tables and closed forms.
///
/// The inputs are taken as given, so a corrupted entry shows up as failures
/// at the coordinates it touches.
pub fn verify_tables(tables: &StrataTables, closed: &ClosedForms, opts: &VerifyOptions) -> VerifyReport {
    let order = tables.order;
    let max_m = tables.max_m();
    let mut checks = Vec::new();

    checks.push(identity_check("g_times_g_inverse", tables.g.mul(&tables.g_inv)));
    checks.push(identity_check("g_inverse_times_g", tables.g_inv.mul(&tables.g)));
    checks.push(identity_check("a_times_a_inverse", tables.a.mul(&tables.a_inv)));

    let mut c = Check::new("relation1");
    for r in 1..=max_m {
        for n in 0..=order {
            let rhs: LaurentPoly = (1..=max_m).map(|m| tables.x.get(m, n) * tables.g.get(r, m)).sum();
            c.expect_eq(&[("r", r as i64), ("n", n as i64)], tables.r.get(r, n), &rhs);
        }
    }
    checks.push(c.done());

    let mut c = Check::new("relation2");
    for m in 1..=max_m {
        for n in 0..=order {
            let rhs: LaurentPoly = (0..=n).map(|s| tables.y0.coeff(n - s) * tables.b.get(m, s)).sum();
            c.expect_eq(&[("m", m as i64), ("n", n as i64)], tables.x.get(m, n), &rhs);
        }
    }
    checks.push(c.done());

    for (name, matrix, series) in [
        ("closed_form_b", &tables.b, &closed.b),
        ("closed_form_x", &tables.x, &closed.x),
    ] {
        let mut c = Check::new(name);
        for m in 1..=max_m {
            for n in 0..=order {
                let cf = series.get(m - 1).map(|s| s.coeff(n)).unwrap_or_default();
                c.expect_eq(&[("m", m as i64), ("n", n as i64)], &cf, matrix.get(m, n));
            }
        }
        checks.push(c.done());
    }

    let mut c = Check::new("fixed_point_r");
    let fp_n = opts.fixed_point_max_n.min(order);
    for r in 1..=opts.fixed_point_max_r {
        let series = series_hnnr(r, order);
        for n in 0..=fp_n {
            let via_series = if r <= max_m { tables.r.get(r, n).clone() } else { series.coeff(n) };
            let fixed = e_poly_hnnr_fixed(n as u32, r as u32);
            c.expect_eq(&[("r", r as i64), ("n", n as i64)], &via_series, &fixed);
        }
    }
    checks.push(c.done());

    let mut spec = Check::new("chi_specialization");
    let mut count = Check::new("chi_fixed_point_count");
    for m in 1..=max_m {
        for n in 0..=order {
            let coords = [("m", m as i64), ("n", n as i64)];
            let chi = closed.chi.get(m - 1).map(|s| s.coeff(n).eval_at_one()).unwrap_or_default();
            spec.expect_eq(&coords, &chi, &tables.b.get(m, n).eval_at_one());
            if n <= fp_n {
                let fixed = BigInt::from(count_partitions_with_mu(n as u32, m as u32));
                count.expect_eq(&coords, &fixed, &chi);
            }
        }
    }
    checks.push(spec.done());
    checks.push(count.done());

    let mut c = Check::new("x_column_sum");
    let h = series_h(order);
    for n in 0..=order {
        let sum: LaurentPoly = (1..=max_m).map(|m| tables.x.get(m, n).clone()).sum();
        c.expect_eq(&[("n", n as i64)], &h.coeff(n), &sum);
    }
    checks.push(c.done());

    let mut c = Check::new("b_column_sum");
    for n in 0..=fp_n {
        let sum: LaurentPoly = (1..=max_m).map(|m| tables.b.get(m, n).clone()).sum();
        c.expect_eq(&[("n", n as i64)], &e_poly_bnnr_fixed(n as u32, 0), &sum);
    }
    checks.push(c.done());

    checks.push(structure_check(tables));

    let mut c = Check::new("binomial_identity");
    for m in 1..=opts.lemma_max_m {
        for k in opts.lemma_k_range.0..=opts.lemma_k_range.1 {
            let (l, r) = lemma_identity_sides(m, k);
            c.expect_eq(&[("m", i64::from(m)), ("k", k)], &r, &l);
        }
    }
    checks.push(c.done());

    let mut c = Check::new("euler_identity");
    for z in opts.euler_z_range.0..=opts.euler_z_range.1 {
        let (l, r) = euler_identity_sides(z, opts.euler_order);
        for n in 0..=opts.euler_order {
            c.expect_eq(&[("z", z), ("n", n as i64)], &r.coeff(n), &l.coeff(n));
        }
    }
    checks.push(c.done());

    VerifyReport { order, checks }
}

/// Published-entry invariants of `B`: polynomial entries of degree at most
/// `n - 1`, zero below the staircase, a single point at `n = C(m,2)`, and
/// `B[1][n] = delta_{n,0}`.
fn structure_check(tables: &StrataTables) -> CheckOutcome {
    let mut c = Check::new("b_structure");
    for m in 1..=tables.max_m() {
        let stair = choose2(m as i64) as usize;
        for n in 0..=tables.order {
            let e = tables.b.get(m, n);
            let coords = [("m", m as i64), ("n", n as i64)];
            let top_ok = e.max_exp().is_none_or(|d| d <= (n as i64 - 1).max(0));
            c.expect(&coords, e.is_polynomial() && top_ok, "polynomial of degree <= max(n-1,0)", e);
            if m == 1 {
                let want = if n == 0 { LaurentPoly::one() } else { LaurentPoly::zero() };
                c.expect_eq(&coords, &want, e);
            } else if n > 0 && n < stair {
                c.expect_eq(&coords, &LaurentPoly::zero(), e);
            } else if n == stair {
                c.expect_eq(&coords, &LaurentPoly::one(), e);
            }
        }
    }
    c.done()
}

/// Computes everything at order `N` and runs the full identity suite.
pub fn verify_all(order: usize) -> Result<VerifyReport, StrataError> {
    verify_with(&VerifyOptions::for_order(order))
}

pub fn verify_with(opts: &VerifyOptions) -> Result<VerifyReport, StrataError> {
    let tables = StrataTables::compute(opts.order);
    let closed = ClosedForms::compute(tables.max_m() as u32, opts.order)?;
    Ok(verify_tables(&tables, &closed, opts))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> LaurentPoly {
        s.parse().unwrap()
    }

    #[test]
    fn g_examples() {
        let g = build_g(8);
        assert!(g.get(1, 1).is_one());
        assert!(g.get(2, 1).is_zero());
        assert_eq!(g.get(1, 2), &p("1+t"));
        assert!(g.is_upper_triangular());
        let gi = build_g_inverse(8);
        for i in 1..=8 {
            assert!(gi.get(i, i).is_one());
        }
        assert_eq!(gi.get(2, 3), &p("-1-t-t^2"));
        assert!(gi.is_upper_triangular());
        assert!(gi.mul(&g).unwrap().is_identity());
        assert!(g.mul(&gi).unwrap().is_identity());
    }

    #[test]
    fn a_examples() {
        let a = build_a(10);
        let ai = build_a_inverse(10);
        for i in 1..=11 {
            assert!(a.get(i, i).is_one());
        }
        assert_eq!(a.get(1, 2), &p("t^2-1"));
        assert!(a.mul(&ai).unwrap().is_identity());
        assert!(ai.mul(&a).unwrap().is_identity());
    }

    #[test]
    fn matrix_shape_mismatch() {
        let r = build_r(2, 3, RMethod::Series);
        assert!(matches!(r.mul(&build_g(2)), Err(StrataError::Shape(_))));
    }

    #[test]
    fn r_examples() {
        let r = build_r(4, 10, RMethod::Series);
        assert!(r.get(2, 1).is_one());
        assert!(r.get(3, 2).is_zero());
        assert_eq!(r, build_r(4, 10, RMethod::FixedPoint));
    }

    #[test]
    fn x_examples() {
        let x = compute_x(8);
        assert_eq!(x.get(2, 3), &p("t^4+2t^3+t^2-t-1"));
        assert_eq!(x.get(3, 4), &p("t^2+t"));
        let y = series_y0(8);
        for n in 0..=8 {
            assert_eq!(x.get(1, n), y.coeff_ref(n));
        }
    }

    #[test]
    fn b_examples() {
        let b = compute_b(14);
        assert_eq!(b.get(2, 5), &p("t^4+2t^3-t"));
        assert!(b.get(4, 6).is_one());
        assert_eq!(b.get(5, 14), &p("5t^4+7t^3+5t^2+2t+1"));
        assert!(b.get(1, 0).is_one());
        assert!((2..=5).all(|m| b.get(m, 0).is_zero()));
    }

    #[test]
    fn closed_form_examples() {
        assert!(closed_form_b(1, 10).unwrap().is_one());
        assert_eq!(closed_form_b(2, 4).unwrap().coeff(2), p("t+1"));
        assert_eq!(closed_form_b(3, 10).unwrap().coeff(9), p("4t^6+9t^5+7t^4-2t^2-t"));
        let x2 = closed_form_x(2, 4).unwrap();
        assert!(x2.coeff(1).is_one());
        assert_eq!(x2.coeff(4), p("t^6+2t^5+3t^4-2t^2-t"));
        assert!(closed_form_x(3, 4).unwrap().coeff(3).is_one());
        assert_eq!(closed_form_x(1, 8).unwrap(), series_y0(8));
    }

    #[test]
    fn closed_forms_match_pipeline() {
        let tables = StrataTables::compute(14);
        for m in 1..=tables.max_m() {
            let b = closed_form_b(m as u32, 14).unwrap();
            let x = closed_form_x(m as u32, 14).unwrap();
            for n in 0..=14 {
                assert_eq!(b.coeff_ref(n), tables.b.get(m, n), "B m={m} n={n}");
                assert_eq!(x.coeff_ref(n), tables.x.get(m, n), "X m={m} n={n}");
            }
        }
    }

    #[test]
    fn closed_forms_beyond_mu_max_vanish() {
        // C(6,2) = 15 > 14, so row 6 is empty up to q^14 and its first
        // nonzero entry is the single point m^5 at n = 15.
        let b6 = closed_form_b(6, 15).unwrap();
        for n in 1..15 {
            assert!(b6.coeff(n).is_zero(), "n={n}");
        }
        assert!(b6.coeff(15).is_one());
    }

    #[test]
    fn chi_examples() {
        assert_eq!(chi_series(3, 7).coeff(7), LaurentPoly::constant(11));
        assert_eq!(chi_series(4, 6).coeff(6), LaurentPoly::constant(1));
        assert_eq!(chi_series(2, 4).coeff(4), LaurentPoly::constant(3));
    }

    #[test]
    fn lemma_examples() {
        let (l, r) = lemma_identity_sides(1, 7);
        assert_eq!(l, p("1-t^7"));
        assert_eq!(r, p("1-t^7"));
        assert!(lemma_identity_check(3, 5));
        let (l, r) = lemma_identity_sides(5, 2);
        assert!(l.is_zero() && r.is_zero());
        for m in 0..=6 {
            for k in -4..=10 {
                assert!(lemma_identity_check(m, k), "m={m} k={k}");
            }
        }
    }

    #[test]
    fn matrix_json_round_trip() {
        let g = build_g_inverse(3);
        let s = serde_json::to_string(&g).unwrap();
        assert!(s.starts_with(r#"{"row_labels":[1,2,3],"col_labels":[1,2,3],"entries":"#));
        assert_eq!(serde_json::from_str::<StrataMatrix>(&s).unwrap(), g);
        let bad = r#"{"row_labels":[1,3],"col_labels":[0],"entries":[[{"terms":[]}],[{"terms":[]}]]}"#;
        assert!(serde_json::from_str::<StrataMatrix>(bad).is_err());
    }

    #[test]
    fn verify_passes_at_order_6() {
        let report = verify_all(6).unwrap();
        assert!(report.passed(), "{report}");
        assert!(report.checks.iter().all(|c| c.cases > 0), "{report}");
    }

    #[test]
    fn verify_trivial_at_order_0() {
        let report = verify_all(0).unwrap();
        assert!(report.passed(), "{report}");
    }

    #[test]
    fn corrupted_g_is_reported_by_relation1() {
        let mut tables = StrataTables::compute(6);
        let closed = ClosedForms::compute(tables.max_m() as u32, 6).unwrap();
        let bad = tables.g.get(2, 3) + &LaurentPoly::one();
        tables.g.set(2, 3, bad);
        let report = verify_tables(&tables, &closed, &VerifyOptions::for_order(6));
        assert!(!report.passed());
        let rel1 = report.check("relation1").unwrap();
        assert!(!rel1.passed());
        let f = &rel1.failures[0];
        assert_eq!(f.coords.get("r"), Some(&2));
        assert!(f.coords.contains_key("n"));
        // only the r = 2 row is affected
        assert!(rel1.failures.iter().all(|f| f.coords["r"] == 2));
        let json = serde_json::to_value(&report).unwrap();
        assert!(json["checks"].is_array());
    }
}
