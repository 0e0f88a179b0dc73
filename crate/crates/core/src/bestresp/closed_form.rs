//! Closed forms for the symmetric two-player game: both jobs have unit
//! workload, release 0 and priority 1, absolute waiting cost.
//!
//! Penalties are written as functions of the player's own deadline `x`
//! and the other player's deadline `y`. Both mechanisms split into four
//! smooth branches at `x = y/2`, `x = y` and `x = 2y`.

use crate::bestresp::BestResponse;
use crate::error::{Error, Result};
use crate::real::{c, Real};

/// Which of the four branches `x` falls into relative to `y`:
/// 1 for `x < y/2`, 2 for `[y/2, y]`, 3 for `(y, 2y]`, 4 beyond.
pub fn branch<T: Real>(x: T, y: T) -> u8 {
    if x < y / c(2.0) {
        1
    } else if x <= y {
        2
    } else if x <= y + y {
        3
    } else {
        4
    }
}

pub fn prop_label(k: u8) -> &'static str {
    ["f1", "f2", "f3", "f4"][(k - 1) as usize]
}

pub fn marg_label(k: u8) -> &'static str {
    ["h1", "h2", "h3", "h4"][(k - 1) as usize]
}

/// Proportional-sharing penalty branch `k` at own deadline `x`, other `y`.
pub fn prop_branch<T: Real>(k: u8, x: T, y: T, alpha: T) -> T {
    let e = T::one() - alpha;
    match k {
        1 => x + x.powf(e),
        2 => x + (y / c(2.0)).powf(e),
        3 => x + (x / c(2.0)).powf(e),
        4 => x + (x - y).powf(e),
        _ => panic!("branch index {k} out of 1..=4"),
    }
}

/// Marginal-sharing penalty branch `k` at own deadline `x`, other `y`.
pub fn marg_branch<T: Real>(k: u8, x: T, y: T, alpha: T) -> T {
    let e = T::one() - alpha;
    let two_a = c::<T>(2.0).powf(alpha);
    match k {
        1 => x + x.powf(e) + (y - x).powf(e) - y.powf(e),
        2 => x + (two_a - T::one()) * y.powf(e),
        3 => x + two_a * x.powf(e) - y.powf(e),
        4 => x + (x - y).powf(e),
        _ => panic!("branch index {k} out of 1..=4"),
    }
}

pub fn prop_penalty<T: Real>(x: T, y: T, alpha: T) -> T {
    prop_branch(branch(x, y), x, y, alpha)
}

pub fn marg_penalty<T: Real>(x: T, y: T, alpha: T) -> T {
    marg_branch(branch(x, y), x, y, alpha)
}

/// `(alpha - 1)^(1/alpha)`: the lone player's optimal deadline.
pub fn solo_deadline<T: Real>(alpha: T) -> T {
    (alpha - T::one()).powf(alpha.recip())
}

/// `((alpha - 1)/2)^(1/alpha)`: the first coordinate of the marginal
/// equilibrium and the unit of the `delta` parametrisation.
pub fn spiral_unit<T: Real>(alpha: T) -> T {
    ((alpha - T::one()) / c(2.0)).powf(alpha.recip())
}

/// Marginal equilibrium `(first, second)`: the earlier deadline and the one
/// stacked after it.
pub fn marginal_equilibrium<T: Real>(alpha: T) -> (T, T) {
    let first = spiral_unit(alpha);
    (first, first + solo_deadline(alpha))
}

/// Branch minima of the proportional penalty as functions of `y`.
#[derive(Clone, Copy, Debug)]
pub struct BranchMinima<T = f64> {
    alpha: T,
}

impl<T: Real> BranchMinima<T> {
    pub fn new(alpha: T) -> Self {
        BranchMinima { alpha }
    }

    /// Minimum of branch 1 (attained at the solo deadline).
    pub fn g1(&self) -> T {
        let a = self.alpha;
        a * (a - T::one()).powf(a.recip() - T::one())
    }

    /// Branch 2 is increasing, so its minimum sits at `y/2`.
    pub fn g2(&self, y: T) -> T {
        let h = y / c(2.0);
        h + h.powf(T::one() - self.alpha)
    }

    pub fn g3(&self) -> T {
        let a = self.alpha;
        a * ((a - T::one()) / c(2.0)).powf(a.recip() - T::one())
    }

    pub fn g4(&self, y: T) -> T {
        y + self.g1()
    }
}

/// Regime boundaries of the proportional best-response map.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PropThresholds<T = f64> {
    pub alpha: T,
    /// Below this the response stacks after the opponent.
    pub d21: T,
    /// Root of `g2 = g3`; equals `d21` at `alpha = 2`.
    pub d22: T,
    /// Branch-3 minimizer `2((alpha-1)/2)^(1/alpha)`.
    pub d13: T,
    /// Above `2 (alpha-1)^(1/alpha)` the response is the solo deadline.
    pub solo_limit: T,
}

pub fn prop_thresholds<T: Real>(alpha: T) -> Result<PropThresholds<T>> {
    require_alpha(alpha)?;
    let g = BranchMinima::new(alpha);
    let two = c::<T>(2.0);
    let d21 = g.g1() * (two.powf(T::one() - alpha.recip()) - T::one());
    let d13 = two * spiral_unit(alpha);
    let g3 = g.g3();
    let phi = |y: T| g.g2(y) - g3;

    let d22 = if phi(d21) <= c::<T>(8.0) * T::epsilon() * g3 {
        d21
    } else {
        let (mut lo, mut hi) = (d21, d13);
        for _ in 0..200 {
            let mid = (lo + hi) / two;
            if phi(mid) > T::zero() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        (lo + hi) / two
    };
    Ok(PropThresholds {
        alpha,
        d21,
        d22,
        d13,
        solo_limit: two * solo_deadline(alpha),
    })
}

fn require_alpha<T: Real>(alpha: T) -> Result<()> {
    if alpha >= c(2.0) && alpha.is_finite() {
        Ok(())
    } else {
        Err(Error::UnsupportedAlpha {
            alpha: alpha.to_f64(),
            min: 2.0,
        })
    }
}

fn require_positive<T: Real>(name: &str, v: T) -> Result<()> {
    if v > T::zero() && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Precondition(format!(
            "{name} must be positive, got {v}"
        )))
    }
}

/// Proportional best response to the other player's deadline `y`.
pub fn closed_form_response_prop<T: Real>(y: T, alpha: T) -> Result<BestResponse<T>> {
    let t = prop_thresholds(alpha)?;
    require_positive("other deadline", y)?;
    let g = BranchMinima::new(alpha);
    let (deadline, penalty, label) = if y <= t.d21 {
        (y + solo_deadline(alpha), g.g4(y), "f4")
    } else if y <= t.d22 {
        (t.d13, g.g3(), "f3")
    } else if y <= t.solo_limit {
        (y / c(2.0), g.g2(y), "f2")
    } else {
        (solo_deadline(alpha), g.g1(), "f1")
    };
    Ok(BestResponse {
        player: 0,
        deadline,
        penalty,
        regime: Some(label),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Responder {
    /// The later player answering `d_1 = delta * unit`.
    TwoGivenOne,
    /// The earlier player answering `d_2 = (alpha-1)^(1/alpha) (1 + 2^(-1/alpha) delta)`.
    OneGivenTwo,
}

/// `delta` encoded by the other player's deadline.
pub fn delta_of<T: Real>(y: T, alpha: T, responder: Responder) -> T {
    match responder {
        Responder::TwoGivenOne => y / spiral_unit(alpha),
        Responder::OneGivenTwo => {
            (y / solo_deadline(alpha) - T::one()) * c::<T>(2.0).powf(alpha.recip())
        }
    }
}

/// Marginal best response inside the spiral regime `1 < delta < 2^(1/alpha)`.
pub fn closed_form_response_marg<T: Real>(
    y: T,
    alpha: T,
    responder: Responder,
) -> Result<BestResponse<T>> {
    require_alpha(alpha)?;
    require_positive("other deadline", y)?;
    let delta = delta_of(y, alpha, responder);
    let cap = c::<T>(2.0).powf(alpha.recip());
    if !(delta > T::one() && delta < cap) {
        return Err(Error::Precondition(format!(
            "delta = {delta} outside (1, 2^(1/alpha) = {cap})"
        )));
    }
    match responder {
        Responder::TwoGivenOne => {
            let x = y + solo_deadline(alpha);
            Ok(BestResponse {
                player: 1,
                deadline: x,
                penalty: marg_branch(4, x, y, alpha),
                regime: Some("h4"),
            })
        }
        Responder::OneGivenTwo => {
            let unit = spiral_unit(alpha);
            // h1 is convex on [unit, delta * unit] with a sign change of its
            // derivative there.
            let slope =
                |x: T| T::one() + (alpha - T::one()) * ((y - x).powf(-alpha) - x.powf(-alpha));
            let (mut lo, mut hi) = (unit, delta * unit);
            let stop = c::<T>(4.0) * T::epsilon() * hi;
            for _ in 0..1000 {
                if hi - lo <= stop {
                    break;
                }
                let mid = (lo + hi) / c(2.0);
                if slope(mid) < T::zero() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let x = (lo + hi) / c(2.0);
            Ok(BestResponse {
                player: 0,
                deadline: x,
                penalty: marg_branch(1, x, y, alpha),
                regime: Some("h1"),
            })
        }
    }
}
