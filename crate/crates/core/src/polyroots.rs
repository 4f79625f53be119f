//! Real roots of polynomials of degree at most four in closed form.
//!
//! Quartics go through Ferrari's resolvent cubic, cubics through Cardano or
//! the trigonometric form, and every root is then polished with a few Newton
//! steps on the original polynomial.

use crate::error::{Error, Result};

/// Leading coefficients below this fraction of the largest are treated as zero.
const DEGREE_DROP: f64 = 1e-12;
/// Complex pairs with |imag| ≤ this·(1 + |real|) are accepted as a real root.
const NEAR_REAL: f64 = 1e-8;
/// Complex pairs with |imag| up to this·(1 + |real|) may be a double root
/// split by rounding; their real part is kept only if |p| there is at the
/// rounding level.
const MAYBE_DOUBLE: f64 = 1e-3;
const ROUNDOFF: f64 = 1e3 * f64::EPSILON;
/// Roots closer than this·(1 + |r|) are merged; rounding splits a double
/// root by about √ε.
const DEDUP: f64 = 1e-7;
const RESIDUAL: f64 = 1e-8;
const NEWTON_STEPS: usize = 5;

/// Real roots of a polynomial, sorted ascending and deduplicated.
#[derive(Debug, Clone, PartialEq)]
pub struct RootSet {
    roots: Vec<f64>,
    degree: usize,
    residual_bound: f64,
}

impl RootSet {
    pub fn roots(&self) -> &[f64] {
        &self.roots
    }

    /// Effective degree after dropping negligible leading coefficients.
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Largest |p(r)| / (1+|r|)⁴ over the reported roots.
    pub fn residual_bound(&self) -> f64 {
        self.residual_bound
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }
}

/// All real roots of c4·x⁴ + c3·x³ + c2·x² + c1·x + c0.
pub fn solve_real(c4: f64, c3: f64, c2: f64, c1: f64, c0: f64) -> Result<RootSet> {
    let all = [c4, c3, c2, c1, c0];
    let scale = all.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
    if scale == 0.0 {
        return Err(Error::AllZeroCoefficients);
    }
    let lead = all.iter().position(|c| c.abs() > DEGREE_DROP * scale).unwrap_or(4);
    let coeffs = &all[lead..];
    let degree = coeffs.len() - 1;

    let raw: Vec<Cand> = match degree {
        0 => Vec::new(),
        1 => vec![(-coeffs[1] / coeffs[0], false)],
        2 => quadratic(coeffs[0], coeffs[1], coeffs[2]),
        3 => cubic(coeffs[1] / coeffs[0], coeffs[2] / coeffs[0], coeffs[3] / coeffs[0]),
        _ => quartic(
            coeffs[1] / coeffs[0],
            coeffs[2] / coeffs[0],
            coeffs[3] / coeffs[0],
            coeffs[4] / coeffs[0],
        ),
    };

    let mut roots: Vec<f64> = raw
        .into_iter()
        .filter(|(r, _)| r.is_finite())
        .map(|(r, split)| (polish(coeffs, r), split))
        .filter(|&(r, split)| {
            let value = horner(coeffs, r).abs();
            if split {
                value <= ROUNDOFF * magnitude(coeffs, r)
            } else {
                value <= RESIDUAL * (1.0 + scale) * (1.0 + r.abs()).powi(4)
            }
        })
        .map(|(r, _)| r)
        .collect();
    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|b, a| (*b - *a).abs() <= DEDUP * (1.0 + a.abs()));

    let residual_bound = roots
        .iter()
        .map(|&r| horner(coeffs, r).abs() / (1.0 + r.abs()).powi(4))
        .fold(0.0, f64::max);
    Ok(RootSet { roots, degree, residual_bound })
}

/// Roots mapped through max(0, ·) and deduplicated.
pub fn nonneg_roots(rs: &RootSet) -> Vec<f64> {
    let mut out: Vec<f64> = rs.roots.iter().map(|r| r.max(0.0)).collect();
    out.sort_by(f64::total_cmp);
    out.dedup_by(|b, a| (*b - *a).abs() <= DEDUP * (1.0 + a.abs()));
    out
}

/// A root candidate; `true` when it is the real part of a complex pair.
type Cand = (f64, bool);

/// Σ|c_k||x|^k, the scale of rounding error in evaluating p(x).
fn magnitude(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().fold(0.0, |acc, &c| acc * x.abs() + c.abs())
}

fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().fold(0.0, |acc, &c| acc * x + c)
}

fn horner_derivative(coeffs: &[f64], x: f64) -> f64 {
    let d = coeffs.len() - 1;
    coeffs[..d]
        .iter()
        .enumerate()
        .fold(0.0, |acc, (k, &c)| acc * x + c * (d - k) as f64)
}

fn polish(coeffs: &[f64], mut r: f64) -> f64 {
    let mut best = horner(coeffs, r).abs();
    for _ in 0..NEWTON_STEPS {
        let dp = horner_derivative(coeffs, r);
        if dp == 0.0 || best == 0.0 {
            break;
        }
        let next = r - horner(coeffs, r) / dp;
        let val = horner(coeffs, next).abs();
        if !(val < best) {
            break;
        }
        r = next;
        best = val;
    }
    r
}

/// Classifies the pair re ± i·im: a real root, a possible split double
/// root, or neither.
fn pair(re: f64, im: f64) -> Option<Cand> {
    let rel = im.abs() / (1.0 + re.abs());
    if rel <= NEAR_REAL {
        Some((re, false))
    } else if rel <= MAYBE_DOUBLE {
        Some((re, true))
    } else {
        None
    }
}

/// Real roots of a·x² + b·x + c (a ≠ 0), in the cancellation-free form.
fn quadratic(a: f64, b: f64, c: f64) -> Vec<Cand> {
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        let re = -b / (2.0 * a);
        let im = (-disc).sqrt() / (2.0 * a.abs());
        return pair(re, im).into_iter().collect();
    }
    let q = -0.5 * (b + b.signum() * disc.sqrt());
    if q == 0.0 {
        // b = 0 and c = 0.
        return vec![(0.0, false)];
    }
    vec![(q / a, false), (c / q, false)]
}

/// Real roots of x³ + a·x² + b·x + c.
fn cubic(a: f64, b: f64, c: f64) -> Vec<Cand> {
    let shift = a / 3.0;
    let p = b - a * a / 3.0;
    let q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    depressed_cubic(p, q).into_iter().map(|(t, split)| (t - shift, split)).collect()
}

/// Real roots of t³ + p·t + q.
fn depressed_cubic(p: f64, q: f64) -> Vec<Cand> {
    let half_q = 0.5 * q;
    let third_p = p / 3.0;
    let disc = half_q * half_q + third_p * third_p * third_p;
    if p == 0.0 {
        return vec![((-q).cbrt(), false)];
    }
    if disc > 0.0 {
        let sq = disc.sqrt();
        let u = (-half_q + sq).cbrt();
        let v = (-half_q - sq).cbrt();
        let t = u + v;
        let re = -0.5 * t;
        let im = 0.5 * 3f64.sqrt() * (u - v).abs();
        std::iter::once((t, false)).chain(pair(re, im)).collect()
    } else {
        let r = 2.0 * (-third_p).sqrt();
        let arg = (3.0 * q / (2.0 * p) * (-3.0 / p).sqrt()).clamp(-1.0, 1.0);
        let phi = arg.acos() / 3.0;
        (0..3)
            .map(|k| (r * (phi - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos(), false))
            .collect()
    }
}

/// Real roots of x⁴ + a·x³ + b·x² + c·x + d by Ferrari's method.
fn quartic(a: f64, b: f64, c: f64, d: f64) -> Vec<Cand> {
    let shift = a / 4.0;
    let a2 = a * a;
    let p = b - 3.0 * a2 / 8.0;
    let q = c - a * b / 2.0 + a2 * a / 8.0;
    let r = d - a * c / 4.0 + a2 * b / 16.0 - 3.0 * a2 * a2 / 256.0;
    let scale = 1.0 + p.abs() + r.abs().sqrt() + q.abs().cbrt();

    let ys = if q.abs() <= 1e-14 * scale * scale * scale {
        biquadratic(p, r)
    } else {
        // Largest root of 8m³ + 8pm² + (2p² − 8r)m − q² = 0 is positive since
        // the cubic is −q² < 0 at m = 0.
        let resolvent = [8.0, 8.0 * p, 2.0 * p * p - 8.0 * r, -q * q];
        let m = cubic(p, 0.25 * p * p - r, -q * q / 8.0)
            .into_iter()
            .map(|(m, _)| polish(&resolvent, m))
            .fold(f64::NEG_INFINITY, f64::max);
        if !(m > 0.0) {
            biquadratic(p, r)
        } else {
            let s = (2.0 * m).sqrt();
            let base = 0.5 * p + m;
            let skew = q / (2.0 * s);
            let mut ys = quadratic(1.0, -s, base + skew);
            ys.extend(quadratic(1.0, s, base - skew));
            ys
        }
    };
    ys.into_iter().map(|(y, split)| (y - shift, split)).collect()
}

/// Real roots of y⁴ + p·y² + r.
fn biquadratic(p: f64, r: f64) -> Vec<Cand> {
    let mut ys = Vec::new();
    for (z, split) in quadratic(1.0, p, r) {
        if z >= 0.0 {
            let y = z.sqrt();
            ys.push((y, split));
            ys.push((-y, split));
        } else if let Some((y, s2)) = pair(0.0, (-z).sqrt()) {
            ys.push((y, split || s2));
        }
    }
    ys
}
