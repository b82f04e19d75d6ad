use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::field::Field;
use super::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("all retained coefficients cancel: series is zero up to O(eps^{})", .known_order + 1)]
    PrecisionExhausted { known_order: i64 },
    #[error("division by a series that is zero up to O(eps^{})", .known_order + 1)]
    DivisionBySeriesZero { known_order: i64 },
    #[error("valuation undefined: series is zero up to O(eps^{})", .known_order + 1)]
    UndefinedValuation { known_order: i64 },
    #[error("coefficient {value} is not representable in the {field} field")]
    NotRepresentable { value: String, field: &'static str },
    #[error("malformed series: {0}")]
    Malformed(String),
}

/// Truncated formal Laurent series in one indeterminate `eps`.
///
/// Stores the coefficients of `eps^v .. eps^K` where `v` is the valuation and
/// `K` the known order: the value is certified modulo `O(eps^(K+1))`. An empty
/// coefficient list is the zero-up-to-truncation sentinel. Non-sentinel series
/// always have a nonzero leading coefficient.
#[derive(Clone, PartialEq)]
pub struct LaurentSeries<F> {
    valuation: i64,
    coeffs: Vec<F>,
    known_order: i64,
}

impl<F: Field> LaurentSeries<F> {
    /// Zero-up-to-truncation sentinel, i.e. `O(eps^(known_order + 1))`.
    pub fn zero(known_order: i64) -> Self {
        LaurentSeries {
            valuation: known_order + 1,
            coeffs: Vec::new(),
            known_order,
        }
    }

    pub fn constant(c: F, known_order: i64) -> Self {
        Self::monomial(c, 0, known_order)
    }

    pub fn one(known_order: i64) -> Self {
        Self::constant(F::one(), known_order)
    }

    /// `c * eps^exponent`.
    pub fn monomial(c: F, exponent: i64, known_order: i64) -> Self {
        Self::from_coeffs(exponent, vec![c], known_order)
    }

    /// Builds a series from the coefficients of `eps^valuation, eps^(valuation+1), ...`,
    /// normalizing leading zeros and padding or cutting at `known_order`.
    pub fn from_coeffs(valuation: i64, coeffs: Vec<F>, known_order: i64) -> Self {
        let mut valuation = valuation;
        let mut coeffs = coeffs;
        let lead = coeffs.iter().position(|c| !c.is_zero());
        match lead {
            None => return Self::zero(known_order),
            Some(i) => {
                coeffs.drain(..i);
                valuation += i as i64;
            }
        }
        if valuation > known_order {
            return Self::zero(known_order);
        }
        coeffs.resize((known_order - valuation + 1) as usize, F::zero());
        LaurentSeries {
            valuation,
            coeffs,
            known_order,
        }
    }

    /// Sum of `(exponent, coefficient)` terms; repeated exponents accumulate.
    pub fn from_terms(terms: impl IntoIterator<Item = (i64, F)>, known_order: i64) -> Self {
        let terms: Vec<_> = terms.into_iter().filter(|(e, _)| *e <= known_order).collect();
        let Some(lo) = terms.iter().map(|(e, _)| *e).min() else {
            return Self::zero(known_order);
        };
        let mut coeffs = vec![F::zero(); (known_order - lo + 1) as usize];
        for (e, c) in terms {
            let slot = &mut coeffs[(e - lo) as usize];
            *slot = slot.plus(&c);
        }
        Self::from_coeffs(lo, coeffs, known_order)
    }

    pub fn is_zero_sentinel(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn known_order(&self) -> i64 {
        self.known_order
    }

    /// Lowest power of `eps` with a certified nonzero coefficient.
    pub fn valuation(&self) -> Result<i64, SeriesError> {
        if self.is_zero_sentinel() {
            Err(SeriesError::UndefinedValuation {
                known_order: self.known_order,
            })
        } else {
            Ok(self.valuation)
        }
    }

    pub fn leading(&self) -> Option<(i64, &F)> {
        self.coeffs.first().map(|c| (self.valuation, c))
    }

    /// Coefficient of `eps^exponent`; `None` beyond the known order.
    pub fn coefficient(&self, exponent: i64) -> Option<F> {
        if exponent > self.known_order {
            None
        } else {
            Some(self.coeff_ref(exponent).cloned().unwrap_or_else(F::zero))
        }
    }

    /// Nonzero terms in ascending order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &F)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(i, c)| (self.valuation + i as i64, c))
    }

    fn coeff_ref(&self, exponent: i64) -> Option<&F> {
        if exponent < self.valuation {
            return None;
        }
        self.coeffs.get((exponent - self.valuation) as usize)
    }

    /// Coefficient-wise sum. Total cancellation yields the sentinel.
    pub fn add(&self, rhs: &Self) -> Self {
        self.combine(rhs, false)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.combine(rhs, true)
    }

    /// Like [`add`](Self::add) but reports total cancellation as an error.
    pub fn checked_add(&self, rhs: &Self) -> Result<Self, SeriesError> {
        let s = self.add(rhs);
        if s.is_zero_sentinel() {
            Err(SeriesError::PrecisionExhausted {
                known_order: s.known_order,
            })
        } else {
            Ok(s)
        }
    }

    fn combine(&self, rhs: &Self, negate_rhs: bool) -> Self {
        let k = self.known_order.min(rhs.known_order);
        // Sentinel valuation is known_order + 1 > k, so it never lowers `lo`.
        let lo = self.valuation.min(rhs.valuation);
        if lo > k {
            return Self::zero(k);
        }
        let coeffs = (lo..=k)
            .map(|e| match (self.coeff_ref(e), rhs.coeff_ref(e)) {
                (Some(a), Some(b)) if negate_rhs => a.minus(b),
                (Some(a), Some(b)) => a.plus(b),
                (Some(a), None) => a.clone(),
                (None, Some(b)) if negate_rhs => b.negated(),
                (None, Some(b)) => b.clone(),
                (None, None) => F::zero(),
            })
            .collect();
        Self::from_coeffs(lo, coeffs, k)
    }

    /// Adds an exact constant; the known order is unchanged.
    pub fn add_scalar(&self, c: &F) -> Self {
        if c.is_zero() || self.known_order < 0 {
            return self.clone();
        }
        self.add(&Self::constant(c.clone(), self.known_order))
    }

    pub fn neg(&self) -> Self {
        LaurentSeries {
            valuation: self.valuation,
            coeffs: self.coeffs.iter().map(F::negated).collect(),
            known_order: self.known_order,
        }
    }

    /// Multiplication by a field constant (which may be zero).
    pub fn scale(&self, c: &F) -> Self {
        if c.is_zero() {
            return Self::zero(self.known_order);
        }
        LaurentSeries {
            valuation: self.valuation,
            coeffs: self.coeffs.iter().map(|x| x.times(c)).collect(),
            known_order: self.known_order,
        }
    }

    /// Truncated Cauchy product with
    /// `known_order = min(a.known_order + b.valuation, b.known_order + a.valuation)`.
    pub fn mul(&self, rhs: &Self) -> Self {
        match (self.is_zero_sentinel(), rhs.is_zero_sentinel()) {
            (true, true) => return Self::zero(self.known_order + rhs.known_order + 1),
            (true, false) => return Self::zero(self.known_order + rhs.valuation),
            (false, true) => return Self::zero(rhs.known_order + self.valuation),
            (false, false) => {}
        }
        let len = self.coeffs.len().min(rhs.coeffs.len());
        let valuation = self.valuation + rhs.valuation;
        let coeffs = convolve(&self.coeffs, &rhs.coeffs, len);
        LaurentSeries {
            valuation,
            known_order: valuation + len as i64 - 1,
            coeffs,
        }
    }

    /// Multiplicative inverse. The relative precision is unchanged, so
    /// `known_order` becomes `known_order - 2 * valuation`.
    pub fn inv(&self) -> Result<Self, SeriesError> {
        if self.is_zero_sentinel() {
            return Err(SeriesError::DivisionBySeriesZero {
                known_order: self.known_order,
            });
        }
        let coeffs = series_reciprocal(&self.coeffs);
        Ok(LaurentSeries {
            valuation: -self.valuation,
            known_order: self.known_order - 2 * self.valuation,
            coeffs,
        })
    }

    /// Drops every term above `known_order` (no-op if already coarser).
    pub fn truncate(&self, known_order: i64) -> Self {
        if known_order >= self.known_order {
            return self.clone();
        }
        Self::from_coeffs(self.valuation, self.coeffs.clone(), known_order)
    }

    /// Equality up to the coarser of the two known orders.
    pub fn agrees_with(&self, other: &Self) -> bool {
        let k = self.known_order.min(other.known_order);
        self.truncate(k) == other.truncate(k)
    }

    /// Leading term `(valuation, coefficient)`, `None` for the sentinel.
    pub fn leading_term(&self) -> Option<(i64, F)> {
        self.leading().map(|(v, c)| (v, c.clone()))
    }

    pub fn to_json(&self) -> SeriesJson {
        SeriesJson {
            terms: self
                .terms()
                .map(|(e, c)| {
                    let (n, d) = c.to_fraction();
                    (e, n.to_string(), d.to_string())
                })
                .collect(),
            known_order: self.known_order,
        }
    }

    pub fn from_json(json: &SeriesJson) -> Result<Self, SeriesError> {
        let mut terms = Vec::with_capacity(json.terms.len());
        for (e, n, d) in &json.terms {
            let r: Rational = format!("{n}/{d}")
                .parse()
                .map_err(|err| SeriesError::Malformed(format!("term eps^{e}: {err}")))?;
            terms.push((*e, field_image::<F>(&r)?));
        }
        Ok(Self::from_terms(terms, json.known_order))
    }
}

/// Image of a rational in `F`.
pub fn field_image<F: Field>(r: &Rational) -> Result<F, SeriesError> {
    F::from_rational(r).ok_or_else(|| SeriesError::NotRepresentable {
        value: r.to_string(),
        field: F::NAME,
    })
}

fn convolve<F: Field>(a: &[F], b: &[F], len: usize) -> Vec<F> {
    (0..len)
        .map(|n| {
            let mut acc = a[0].times(&b[n]);
            for i in 1..=n {
                acc = acc.plus(&a[i].times(&b[n - i]));
            }
            acc
        })
        .collect()
}

fn series_reciprocal<F: Field>(a: &[F]) -> Vec<F> {
    let lead_inv = a[0].recip().expect("normalized series has a nonzero leading coefficient");
    let mut out: Vec<F> = Vec::with_capacity(a.len());
    out.push(lead_inv.clone());
    for n in 1..a.len() {
        let mut acc = F::zero();
        for k in 1..=n {
            acc = acc.plus(&a[k].times(&out[n - k]));
        }
        out.push(acc.times(&lead_inv).negated());
    }
    out
}

/// Wire form: `(exponent, numerator, denominator)` triples plus the known order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesJson {
    pub terms: Vec<(i64, String, String)>,
    pub known_order: i64,
}

impl<F: Field> fmt::Debug for LaurentSeries<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl<F: Field> fmt::Display for LaurentSeries<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (e, c) in self.terms() {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            match e {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}*e")?,
                _ => write!(f, "{c}*e^{e}")?,
            }
        }
        if !first {
            f.write_str(" + ")?;
        }
        write!(f, "O(e^{})", self.known_order + 1)
    }
}

impl<F: Field> Add for &LaurentSeries<F> {
    type Output = LaurentSeries<F>;
    fn add(self, rhs: Self) -> LaurentSeries<F> {
        LaurentSeries::add(self, rhs)
    }
}

impl<F: Field> Sub for &LaurentSeries<F> {
    type Output = LaurentSeries<F>;
    fn sub(self, rhs: Self) -> LaurentSeries<F> {
        LaurentSeries::sub(self, rhs)
    }
}

impl<F: Field> Mul for &LaurentSeries<F> {
    type Output = LaurentSeries<F>;
    fn mul(self, rhs: Self) -> LaurentSeries<F> {
        LaurentSeries::mul(self, rhs)
    }
}

impl<F: Field> Neg for &LaurentSeries<F> {
    type Output = LaurentSeries<F>;
    fn neg(self) -> LaurentSeries<F> {
        LaurentSeries::neg(self)
    }
}
