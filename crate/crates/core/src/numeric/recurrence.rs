//! Minimal linear recurrences over the rationals.
//!
//! [`min_recurrence`] finds the shortest linear recurrence
//! `z_{n+c} = a_{c-1} z_{n+c-1} + ... + a_0 z_n` satisfied by a window of
//! consecutive samples (Berlekamp–Massey over the field of rationals — all
//! arithmetic is exact). Given at least `2 * order_bound` samples of a
//! sequence whose true order is within the bound, the minimal recurrence of
//! the window equals the minimal recurrence of the sequence.
//!
//! [`extrapolate_back`] runs a recurrence backwards: solving the relation
//! for `z_n` divides by the constant coefficient `a_0`, so `a_0 != 0` is
//! required. For the interpolation pipeline this is exactly the statement
//! that no characteristic root is zero.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::numeric::Rational;

/// `z_{n+order} = sum_j coefficients[j] * z_{n+j}` for all n in range.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearRecurrence {
    pub order: usize,
    /// `coefficients[j]` multiplies `z_{n+j}`; length equals `order`.
    pub coefficients: Vec<Rational>,
}

impl LinearRecurrence {
    /// True iff every window of `order + 1` consecutive samples satisfies
    /// the recurrence. Vacuously true when there are too few samples.
    pub fn annihilates(&self, samples: &[Rational]) -> bool {
        if self.order == 0 {
            return samples.iter().all(Zero::is_zero);
        }
        for i in self.order..samples.len() {
            let mut acc = Rational::zero();
            for (j, a) in self.coefficients.iter().enumerate() {
                acc += a * &samples[i - self.order + j];
            }
            if acc != samples[i] {
                return false;
            }
        }
        true
    }
}

/// Shortest recurrence fitting the full sample window.
///
/// Preconditions: `samples.len() >= 2 * order_bound`. Errors with
/// [`Error::OrderBound`] when no recurrence of order `<= order_bound` fits.
pub fn min_recurrence(samples: &[Rational], order_bound: usize) -> Result<LinearRecurrence> {
    if samples.len() < 2 * order_bound {
        return Err(Error::Contract(format!(
            "need at least {} samples for order bound {}, got {}",
            2 * order_bound,
            order_bound,
            samples.len()
        )));
    }

    // Berlekamp–Massey. `conn` is the connection polynomial C with C[0] = 1
    // and sum_{j=0..l} C[j] * s[i-j] = 0 for all i >= l over the window.
    let mut conn: Vec<Rational> = vec![Rational::from_integer(1.into())];
    let mut prev: Vec<Rational> = conn.clone();
    let mut l: usize = 0;
    let mut gap: usize = 1;
    let mut prev_delta = Rational::from_integer(1.into());

    for i in 0..samples.len() {
        let mut delta = samples[i].clone();
        for j in 1..=l {
            if j < conn.len() {
                delta += &conn[j] * &samples[i - j];
            }
        }
        if delta.is_zero() {
            gap += 1;
        } else if 2 * l <= i {
            let snapshot = conn.clone();
            let coef = &delta / &prev_delta;
            if conn.len() < prev.len() + gap {
                conn.resize(prev.len() + gap, Rational::zero());
            }
            for (j, b) in prev.iter().enumerate() {
                conn[j + gap] -= &coef * b;
            }
            l = i + 1 - l;
            prev = snapshot;
            prev_delta = delta;
            gap = 1;
        } else {
            let coef = &delta / &prev_delta;
            if conn.len() < prev.len() + gap {
                conn.resize(prev.len() + gap, Rational::zero());
            }
            for (j, b) in prev.iter().enumerate() {
                conn[j + gap] -= &coef * b;
            }
            gap += 1;
        }
    }

    if l > order_bound {
        return Err(Error::OrderBound { bound: order_bound });
    }
    conn.resize(l + 1, Rational::zero());

    // z_{n+l} = sum_j a_j z_{n+j} with a_j = -C[l-j].
    let coefficients: Vec<Rational> = (0..l).map(|j| -conn[l - j].clone()).collect();
    let rec = LinearRecurrence {
        order: l,
        coefficients,
    };
    if !rec.annihilates(samples) {
        return Err(Error::Internal(
            "recurrence from Berlekamp-Massey fails its own window".into(),
        ));
    }
    Ok(rec)
}

/// Walk a recurrence backwards `steps` terms from the first sample.
///
/// `samples` are consecutive terms starting at some index `n0`; the return
/// value is the term at index `n0 - steps`. Needs `a_0 != 0` and at least
/// `order` samples (an order-0 recurrence describes the zero sequence and
/// extrapolates to zero).
pub fn extrapolate_back(
    rec: &LinearRecurrence,
    samples: &[Rational],
    steps: usize,
) -> Result<Rational> {
    if steps == 0 {
        return samples
            .first()
            .cloned()
            .ok_or_else(|| Error::Contract("no samples to extrapolate from".into()));
    }
    if rec.order == 0 {
        return Ok(Rational::zero());
    }
    if samples.len() < rec.order {
        return Err(Error::Contract(format!(
            "need at least {} samples to run an order-{} recurrence backwards",
            rec.order, rec.order
        )));
    }
    let a0 = &rec.coefficients[0];
    if a0.is_zero() {
        return Err(Error::ZeroConstantTerm);
    }
    // window[i] holds z_{n+i} for the current leading index n.
    let mut window: Vec<Rational> = samples[..rec.order].to_vec();
    for _ in 0..steps {
        // z_{n-1} = (z_{n-1+c} - sum_{j=1..c-1} a_j z_{n-1+j}) / a_0
        let mut num = window[rec.order - 1].clone();
        for j in 1..rec.order {
            num -= &rec.coefficients[j] * &window[j - 1];
        }
        let new = num / a0;
        window.rotate_right(1);
        window[0] = new;
    }
    Ok(window[0].clone())
}
