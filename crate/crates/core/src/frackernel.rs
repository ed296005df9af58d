//! Fractional-derivative weights and truncated history sums.
//!
//! The derivative of order `q` of a position is evaluated from the history of
//! its first derivative (the velocity) as
//!
//! ```text
//! D^q x_n = dt^(1-q) / Γ(3-q) * Σ_{p} a_{p,n} v_p
//! ```
//!
//! with second-order weights `a_{p,n}`. Away from the start of the history the
//! weight of a sample depends only on its lag `k = n - p`, so the stationary
//! part of the kernel is computed once and shared by every particle.

use std::borrow::Cow;

use crate::Vector;

/// Error raised for invalid kernel parameters.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum KernelError {
    #[error("fractional order q = {0} must lie strictly between 0 and 1")]
    OrderOutOfRange(f64),
    #[error("timestep dt = {0} must be positive and finite")]
    NonPositiveTimestep(f64),
}

// Lanczos approximation, g = 7, n = 9.
const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Gamma function via the Lanczos approximation (reflection below 1/2).
pub fn gamma(x: f64) -> f64 {
    if x < 0.5 {
        std::f64::consts::PI / ((std::f64::consts::PI * x).sin() * gamma(1.0 - x))
    } else {
        let x = x - 1.0;
        let mut acc = LANCZOS_COEFFS[0];
        for (i, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
            acc += c / (x + i as f64);
        }
        let t = x + LANCZOS_G + 0.5;
        (2.0 * std::f64::consts::PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * acc
    }
}

/// Below this lag the weights are evaluated directly; above it through a
/// binomial series that avoids cancellation between large powers.
const SERIES_THRESHOLD: u64 = 8;

/// Second difference `(k-1)^a - 2 k^a + (k+1)^a` for `k >= 1`, `0^a = 0`.
fn second_difference(a: f64, k: u64) -> f64 {
    if k < SERIES_THRESHOLD {
        let kf = k as f64;
        let lower = if k == 1 { 0.0 } else { (kf - 1.0).powf(a) };
        return lower - 2.0 * kf.powf(a) + (kf + 1.0).powf(a);
    }
    // k^a * [(1+x)^a + (1-x)^a - 2] = 2 k^a Σ_{m>=1} C(a, 2m) x^(2m), x = 1/k.
    // Every even binomial coefficient is positive for 1 < a < 2.
    let x = 1.0 / k as f64;
    let x2 = x * x;
    let mut coeff = 1.0;
    let mut power = 1.0;
    let mut sum = 0.0;
    for m in 1..64u32 {
        let j = 2.0 * m as f64;
        coeff *= (a - j + 2.0) / (j - 1.0) * (a - j + 1.0) / j;
        power *= x2;
        let term = coeff * power;
        sum += term;
        if term <= sum * 1e-18 {
            break;
        }
    }
    2.0 * (k as f64).powf(a) * sum
}

/// Weight of the oldest sample (`p = 0`) when the history reaches back to the
/// start: `(n-1)^(2-q) - n^(1-q) (n+q-2)`.
///
/// Panics if `n == 0`; at `n = 0` the only sample is the newest and has weight 1.
pub fn weight_p0(q: f64, n: u64) -> f64 {
    assert!(n >= 1, "weight_p0 requires n >= 1");
    let a = 2.0 - q;
    if n < SERIES_THRESHOLD {
        let nf = n as f64;
        let lower = if n == 1 { 0.0 } else { (nf - 1.0).powf(a) };
        return lower - nf.powf(1.0 - q) * (nf + q - 2.0);
    }
    // n^a * [(1-x)^a - 1 + a x] = n^a Σ_{j>=2} C(a, j) (-x)^j, all terms positive.
    let x = 1.0 / n as f64;
    let mut coeff = a;
    let mut power = -x;
    let mut sum = 0.0;
    for j in 2..128u32 {
        let jf = j as f64;
        coeff *= (a - jf + 1.0) / jf;
        power *= -x;
        let term = coeff * power;
        sum += term;
        if term.abs() <= sum.abs() * 1e-18 {
            break;
        }
    }
    (n as f64).powf(a) * sum
}

/// Precomputed weights for a window of `d` past steps.
#[derive(Debug, Clone, PartialEq)]
pub struct FracWeights {
    q: f64,
    d: usize,
    dt: f64,
    /// `interior[k]` is the weight of lag `k`; `interior[0] = 1`.
    interior: Vec<f64>,
    /// `interior` reversed, i.e. the stationary window ordered oldest first.
    stationary: Vec<f64>,
    prefactor: f64,
}

impl FracWeights {
    pub fn new(q: f64, d: usize, dt: f64) -> Result<Self, KernelError> {
        if !(q > 0.0 && q < 1.0) {
            return Err(KernelError::OrderOutOfRange(q));
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(KernelError::NonPositiveTimestep(dt));
        }
        let a = 2.0 - q;
        let interior: Vec<f64> = (0..=d as u64)
            .map(|k| if k == 0 { 1.0 } else { second_difference(a, k) })
            .collect();
        let stationary = interior.iter().rev().copied().collect();
        Ok(Self {
            q,
            d,
            dt,
            interior,
            stationary,
            prefactor: dt.powf(1.0 - q) / gamma(3.0 - q),
        })
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn window_len(&self) -> usize {
        self.d
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Weights by lag, `k = 0..=d`.
    pub fn interior(&self) -> &[f64] {
        &self.interior
    }

    /// `dt^(1-q) / Γ(3-q)`.
    pub fn prefactor(&self) -> f64 {
        self.prefactor
    }

    /// Weights `a_{p,n}` for the samples entering the sum at step `n`, ordered
    /// oldest first. While `n <= d` the window reaches the first sample and
    /// uses the exact start-up weights; afterwards the stationary lag weights.
    pub fn window(&self, n: u64) -> Cow<'_, [f64]> {
        if n > self.d as u64 {
            return Cow::Borrowed(&self.stationary);
        }
        let n = n as usize;
        if n == 0 {
            return Cow::Borrowed(&self.stationary[self.d..]);
        }
        let mut w = Vec::with_capacity(n + 1);
        w.push(weight_p0(self.q, n as u64));
        w.extend_from_slice(&self.stationary[self.d + 1 - n..]);
        Cow::Owned(w)
    }

    /// Sum of the window weights at step `n`.
    pub fn window_sum(&self, n: u64) -> f64 {
        self.window(n).iter().sum()
    }
}

/// Ring buffer of the most recent velocities of one particle, oldest first.
#[derive(Debug, Clone, PartialEq)]
pub struct VelocityHistory<const D: usize> {
    entries: Vec<Vector<D>>,
    head: usize,
    capacity: usize,
}

impl<const D: usize> VelocityHistory<D> {
    /// A history keeping `window + 1` samples.
    pub fn new(window: usize) -> Self {
        Self {
            entries: Vec::new(),
            head: 0,
            capacity: window + 1,
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Appends the velocity of the newest step, evicting the oldest when full.
    pub fn push(&mut self, v: Vector<D>) {
        if self.entries.len() < self.capacity {
            self.entries.push(v);
        } else {
            self.entries[self.head] = v;
            self.head = (self.head + 1) % self.capacity;
        }
    }

    pub fn newest(&self) -> Option<&Vector<D>> {
        if self.entries.is_empty() {
            None
        } else if self.head == 0 {
            self.entries.last()
        } else {
            Some(&self.entries[self.head - 1])
        }
    }

    /// The stored samples as two contiguous runs, oldest first.
    pub fn as_slices(&self) -> (&[Vector<D>], &[Vector<D>]) {
        let (newer, older) = self.entries.split_at(self.head);
        (older, newer)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Vector<D>> + '_ {
        let (a, b) = self.as_slices();
        a.iter().chain(b)
    }

    pub fn clear(&mut self) {
        self.entries.clear();
        self.head = 0;
    }

    /// `Σ w_p v_p` over the newest `min(len, weights.len())` samples, aligning
    /// the newest sample with the last weight. Sums oldest to newest.
    pub fn weighted_sum(&self, weights: &[f64]) -> Vector<D> {
        let m = self.len().min(weights.len());
        let weights = &weights[weights.len() - m..];
        let skip = self.len() - m;
        let mut acc = Vector::<D>::zeros();
        for (v, &w) in self.iter().skip(skip).zip(weights) {
            acc += v * w;
        }
        acc
    }
}

/// Truncated fractional derivative of the trajectory whose velocities are
/// recorded in `history`, evaluated at step `n`.
pub fn frac_deriv<const D: usize>(
    history: &VelocityHistory<D>,
    weights: &FracWeights,
    n: u64,
) -> Vector<D> {
    if history.is_empty() {
        return Vector::<D>::zeros();
    }
    history.weighted_sum(&weights.window(n)) * weights.prefactor()
}
