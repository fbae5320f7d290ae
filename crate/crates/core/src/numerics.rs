//! Scalar root finding, fixed-point iteration and the Gaussian CDF.
//!
//! Every scalar equation solved in this crate has the same shape: a function
//! that is continuous and strictly decreasing on `(0, inf)`, positive near
//! zero and negative for large arguments. [`bisect`] is specialised to that
//! shape and finds its own bracket.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Upper bracket is doubled at most this many times before giving up.
pub const MAX_BRACKET_DOUBLINGS: usize = 128;

/// Stopping rules shared by [`bisect`] and [`fixed_point`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub tolerance: f64,
    pub max_iterations: usize,
    /// First upper bracket tried by [`bisect`].
    pub bracket_seed: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tolerance: 1e-6,
            max_iterations: 10_000,
            bracket_seed: 1.0,
        }
    }
}

impl SolverConfig {
    pub fn with_tolerance(tolerance: f64) -> Self {
        Self {
            tolerance,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(Error::InvalidSolverConfig("tolerance must be positive"));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidSolverConfig(
                "max_iterations must be at least 1",
            ));
        }
        if !(self.bracket_seed > 0.0 && self.bracket_seed.is_finite()) {
            return Err(Error::InvalidSolverConfig("bracket_seed must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootResult {
    pub root: f64,
    /// `f(root)`.
    pub residual: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPoint {
    pub point: (f64, f64),
    pub iterations: usize,
}

fn eval(f: &mut impl FnMut(f64) -> f64, x: f64) -> Result<f64> {
    let y = f(x);
    if y.is_finite() {
        Ok(y)
    } else {
        Err(Error::NonFinite { at: x })
    }
}

/// Root of a strictly decreasing function on `(0, inf)`.
///
/// The bracket starts at `(0, bracket_seed]` and the upper end is doubled
/// until `f` turns negative. Bisection then runs until the bracket is no
/// wider than the tolerance *and* `|f(root)|` is within the tolerance, so the
/// returned point is both a small-residual point and within half a tolerance
/// of the true crossing.
pub fn bisect(mut f: impl FnMut(f64) -> f64, config: &SolverConfig) -> Result<RootResult> {
    config.validate()?;
    let tol = config.tolerance;

    let mut lo = 0.0_f64;
    let mut hi = config.bracket_seed;
    let mut f_hi = eval(&mut f, hi)?;
    let mut doublings = 0;
    while f_hi >= 0.0 {
        if f_hi == 0.0 {
            return Ok(RootResult {
                root: hi,
                residual: 0.0,
                iterations: 0,
            });
        }
        if doublings == MAX_BRACKET_DOUBLINGS {
            return Err(Error::NoSignChange {
                doublings,
                upper: hi,
            });
        }
        lo = hi;
        hi *= 2.0;
        f_hi = eval(&mut f, hi)?;
        doublings += 1;
    }

    let mut iterations = 0;
    loop {
        let mid = 0.5 * (lo + hi);
        let f_mid = eval(&mut f, mid)?;
        iterations += 1;
        let narrow = hi - lo <= tol;
        if f_mid == 0.0 || (narrow && f_mid.abs() <= tol) {
            return Ok(RootResult {
                root: mid,
                residual: f_mid,
                iterations,
            });
        }
        // bracket collapsed to adjacent floats: nothing left to refine
        if mid <= lo || mid >= hi || iterations >= config.max_iterations {
            return Err(Error::MaxIterations {
                iterations,
                last_change: hi - lo,
            });
        }
        if f_mid > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

/// Plain fixed-point iteration `z <- map(z)` on a pair of reals.
///
/// Converged when the largest component change of an iteration is within the
/// tolerance; the returned point is the last iterate.
pub fn fixed_point(
    mut map: impl FnMut(f64, f64) -> (f64, f64),
    init: (f64, f64),
    config: &SolverConfig,
) -> Result<FixedPoint> {
    damped_fixed_point(&mut map, init, 1.0, config)
}

/// Fixed-point iteration with relaxation `z <- (1 - w) z + w map(z)`.
pub fn damped_fixed_point(
    mut map: impl FnMut(f64, f64) -> (f64, f64),
    init: (f64, f64),
    weight: f64,
    config: &SolverConfig,
) -> Result<FixedPoint> {
    config.validate()?;
    let (mut a, mut b) = init;
    let mut change = f64::INFINITY;
    for iteration in 1..=config.max_iterations {
        let (ma, mb) = map(a, b);
        if !(ma.is_finite() && mb.is_finite()) {
            return Err(Error::NonFinite { at: a });
        }
        let na = a + weight * (ma - a);
        let nb = b + weight * (mb - b);
        change = (na - a).abs().max((nb - b).abs());
        a = na;
        b = nb;
        if change <= config.tolerance {
            return Ok(FixedPoint {
                point: (a, b),
                iterations: iteration,
            });
        }
    }
    Err(Error::MaxIterations {
        iterations: config.max_iterations,
        last_change: change,
    })
}

/// Standard Gaussian CDF, evaluated through the complementary error function
/// so both tails keep full relative accuracy.
pub fn std_normal_cdf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}
