//! Global minimization of a continuous, piecewise-smooth function of one
//! variable over a bounded window.

use crate::error::{Error, Result};
use crate::real::{c, Real};

/// Search window plus the points where the objective may fail to be smooth.
#[derive(Clone, Debug, PartialEq)]
pub struct PiecewiseMinSpec<T = f64> {
    /// Sorted, deduplicated, strictly inside `(lower, upper)`.
    pub breakpoints: Vec<T>,
    pub lower: T,
    pub upper: T,
}

impl<T: Real> PiecewiseMinSpec<T> {
    /// Keeps the candidate breakpoints that fall strictly inside the window.
    pub fn new(lower: T, upper: T, candidates: impl IntoIterator<Item = T>) -> Result<Self> {
        if !(lower < upper) || !lower.is_finite() || !upper.is_finite() {
            return Err(Error::Precondition(format!(
                "search window ({lower}, {upper}) is empty"
            )));
        }
        let tiny = c::<T>(16.0) * T::epsilon() * (T::one() + upper.abs());
        let mut breakpoints: Vec<T> = candidates
            .into_iter()
            .filter(|&b| b.is_finite() && b > lower + tiny && b < upper - tiny)
            .collect();
        breakpoints.sort_by(|a, b| a.partial_cmp(b).expect("finite breakpoints"));
        breakpoints.dedup_by(|a, b| (*a - *b).abs() <= tiny);
        Ok(PiecewiseMinSpec {
            breakpoints,
            lower,
            upper,
        })
    }

    /// All knots: lower bound, breakpoints, upper bound.
    pub fn knots(&self) -> Vec<T> {
        let mut k = Vec::with_capacity(self.breakpoints.len() + 2);
        k.push(self.lower);
        k.extend_from_slice(&self.breakpoints);
        k.push(self.upper);
        k
    }
}

#[derive(Clone, Copy, Debug)]
pub struct MinimizerOptions<T = f64> {
    /// Evenly spaced probes per smooth piece; the best one seeds the local
    /// search.
    pub samples_per_piece: usize,
    /// Golden-section stopping width, relative to `1 + |x|`.
    pub arg_tol: T,
}

impl<T: Real> Default for MinimizerOptions<T> {
    fn default() -> Self {
        MinimizerOptions {
            samples_per_piece: 8,
            // 6.6e-11 for f64
            arg_tol: T::epsilon().powf(c(0.65)),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Minimum<T = f64> {
    pub x: T,
    pub value: T,
}

/// Smallest value of `f` over the window.
///
/// Knots and `extra` points are evaluated directly. Inside each piece the
/// best of `samples_per_piece` probes is refined by golden-section search on
/// its neighbouring bracket, then polished by bisection on a
/// finite-difference slope. Golden section alone stalls near `sqrt(eps)` because
/// values around a smooth minimum agree to machine precision.
pub fn minimize_piecewise<T, F>(
    mut f: F,
    spec: &PiecewiseMinSpec<T>,
    extra: &[T],
    opts: &MinimizerOptions<T>,
) -> Result<Minimum<T>>
where
    T: Real,
    F: FnMut(T) -> Result<T>,
{
    let knots = spec.knots();
    let mut best: Option<Minimum<T>> = None;
    let offer = |m: Minimum<T>, best: &mut Option<Minimum<T>>| {
        if best.is_none_or(|b| m.value < b.value) {
            *best = Some(m);
        }
    };

    for &x in knots.iter().chain(extra) {
        if x >= spec.lower && x <= spec.upper {
            let value = f(x)?;
            offer(Minimum { x, value }, &mut best);
        }
    }

    let probes = opts.samples_per_piece.max(2);
    for piece in knots.windows(2) {
        let (a, b) = (piece[0], piece[1]);
        let step = (b - a) / T::from_usize(probes);
        let mut xs = Vec::with_capacity(probes + 1);
        let mut fs = Vec::with_capacity(probes + 1);
        for k in 0..=probes {
            let x = if k == probes {
                b
            } else {
                a + step * T::from_usize(k)
            };
            xs.push(x);
            fs.push(f(x)?);
        }
        let k = (0..fs.len())
            .min_by(|&i, &j| fs[i].partial_cmp(&fs[j]).expect("finite penalty"))
            .expect("non-empty probe set");
        let lo = xs[k.saturating_sub(1)];
        let hi = xs[(k + 1).min(probes)];
        let g = golden_section(&mut f, lo, hi, opts.arg_tol)?;
        // Near a smooth minimum the polished point ties on value, but its
        // argument is far more accurate.
        let ulps = c::<T>(4.0) * T::epsilon() * (T::one() + g.value.abs());
        let local = match polish(&mut f, g, a, b, opts.arg_tol)? {
            Some(p) if p.value <= g.value + ulps => p,
            _ => g,
        };
        offer(local, &mut best);
    }
    best.ok_or_else(|| Error::Precondition("nothing to minimize".into()))
}

/// Golden-section search for a local minimum on `[a, b]`.
pub fn golden_section<T, F>(f: &mut F, mut a: T, mut b: T, arg_tol: T) -> Result<Minimum<T>>
where
    T: Real,
    F: FnMut(T) -> Result<T>,
{
    let inv_phi = (c::<T>(5.0).sqrt() - T::one()) / c(2.0);
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    for _ in 0..2000 {
        if b - a <= arg_tol * (T::one() + x1.abs()) {
            break;
        }
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2)?;
        }
    }
    Ok(if f1 <= f2 {
        Minimum { x: x1, value: f1 }
    } else {
        Minimum { x: x2, value: f2 }
    })
}

/// Refines `seed` by locating a sign change of a finite-difference slope
/// near it, staying inside the smooth piece `(a, b)`.
fn polish<T, F>(f: &mut F, seed: Minimum<T>, a: T, b: T, arg_tol: T) -> Result<Option<Minimum<T>>>
where
    T: Real,
    F: FnMut(T) -> Result<T>,
{
    let eps = T::epsilon();
    let scale = T::one() + seed.x.abs();
    // Five-point stencil with truncation O(h^4). Penalties have large higher
    // derivatives near a release, so h sits a bit below the textbook
    // eps^(1/5). Shrink it near the ends of the piece.
    let room = (seed.x - a).min(b - seed.x) / c(8.0);
    let h = (eps.powf(c(0.25)) * scale).min(room);
    if !(h > T::zero()) {
        return Ok(None);
    }
    let mut slope = |y: T| -> Result<T> {
        let near = f(y + h)? - f(y - h)?;
        let far = f(y + h + h)? - f(y - h - h)?;
        Ok((c::<T>(8.0) * near - far) / (c::<T>(12.0) * h))
    };

    let mut width = (arg_tol.max(eps.sqrt())) * c::<T>(8.0) * scale;
    let (mut lo, mut hi) = (seed.x, seed.x);
    let mut bracketed = false;
    for _ in 0..8 {
        lo = (seed.x - width).max(a + h + h);
        hi = (seed.x + width).min(b - h - h);
        if !(lo < hi) {
            return Ok(None);
        }
        let (s_lo, s_hi) = (slope(lo)?, slope(hi)?);
        if s_lo < T::zero() && s_hi > T::zero() {
            bracketed = true;
            break;
        }
        width *= c(8.0);
    }
    if !bracketed {
        return Ok(None);
    }
    let stop = c::<T>(4.0) * eps * scale;
    for _ in 0..600 {
        if hi - lo <= stop {
            break;
        }
        let mid = (lo + hi) / c(2.0);
        if slope(mid)? < T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let x = (lo + hi) / c(2.0);
    Ok(Some(Minimum { x, value: f(x)? }))
}
