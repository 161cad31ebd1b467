//! Reference computations for integration and acceptance tests. Nothing
//! here calls into the library's densities or samplers.

#![allow(dead_code)]

use std::f64::consts::PI;

use statrs::distribution::{ContinuousCDF, Normal};

/// Gauss–Legendre nodes and weights on [-1, 1] by Newton iteration on
/// the Legendre recurrence.
pub fn gauss_legendre(order: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(order);
    for i in 0..order {
        let mut x = (PI * (i as f64 + 0.75) / (order as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=order {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = order as f64 * (x * p1 - p0) / (x * x - 1.0);
            let step = p1 / dp;
            x -= step;
            if step.abs() < 1e-15 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// Composite Gauss–Legendre rule with `panels` equal panels.
pub struct Quadrature {
    rule: Vec<(f64, f64)>,
    panels: usize,
}

impl Quadrature {
    pub fn new(order: usize, panels: usize) -> Self {
        Self {
            rule: gauss_legendre(order),
            panels,
        }
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
        if a == b {
            return 0.0;
        }
        let h = (b - a) / self.panels as f64;
        let mut total = 0.0;
        for p in 0..self.panels {
            let mid = a + h * (p as f64 + 0.5);
            for &(x, w) in &self.rule {
                total += w * f(mid + 0.5 * h * x);
            }
        }
        0.5 * h * total
    }
}

pub fn std_normal_cdf(x: f64) -> f64 {
    Normal::standard().cdf(x)
}

/// CDF of `|𝒩(0,1)|`.
pub fn abs_normal_cdf(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        2.0 * std_normal_cdf(x) - 1.0
    }
}

fn heat_kernel(t: f64, z: f64) -> f64 {
    (-z * z / (2.0 * t)).exp() / (2.0 * PI * t).sqrt()
}

/// Skew Brownian transition density, written out independently.
pub fn skew_density(theta: f64, t: f64, x: f64, y: f64) -> f64 {
    let sign = if y > 0.0 {
        1.0
    } else if y < 0.0 {
        -1.0
    } else {
        0.0
    };
    heat_kernel(t, x - y) + sign * theta * heat_kernel(t, x.abs() + y.abs())
}

/// A CDF tabulated by cumulative quadrature on a grid that contains every
/// breakpoint of the density, then interpolated linearly.
pub struct TabulatedCdf {
    grid: Vec<f64>,
    cdf: Vec<f64>,
}

impl TabulatedCdf {
    pub fn new(density: impl Fn(f64) -> f64, lo: f64, hi: f64, breakpoints: &[f64], cells: usize) -> Self {
        let mut knots = vec![lo, hi];
        knots.extend(breakpoints.iter().copied().filter(|b| *b > lo && *b < hi));
        knots.sort_by(f64::total_cmp);
        knots.dedup();
        let quad = Quadrature::new(8, 1);
        let mut grid = vec![lo];
        let mut cdf = vec![0.0];
        for seg in knots.windows(2) {
            let m = ((seg[1] - seg[0]) / (hi - lo) * cells as f64).ceil().max(1.0) as usize;
            let h = (seg[1] - seg[0]) / m as f64;
            for j in 0..m {
                let a = seg[0] + h * j as f64;
                let b = if j + 1 == m { seg[1] } else { a + h };
                let mass = quad.integrate(&density, a, b);
                grid.push(b);
                cdf.push(cdf.last().unwrap() + mass);
            }
        }
        Self { grid, cdf }
    }

    pub fn total_mass(&self) -> f64 {
        *self.cdf.last().unwrap()
    }

    pub fn eval(&self, x: f64) -> f64 {
        if x <= self.grid[0] {
            return 0.0;
        }
        let last = self.grid.len() - 1;
        if x >= self.grid[last] {
            return self.cdf[last];
        }
        let i = self.grid.partition_point(|&g| g <= x);
        let (x0, x1) = (self.grid[i - 1], self.grid[i]);
        self.cdf[i - 1] + (x - x0) / (x1 - x0) * (self.cdf[i] - self.cdf[i - 1])
    }
}

/// CDF of the skew Brownian position after time `t` from `x`; the density
/// is integrated from 14 standard deviations below the lower of `x` and 0.
pub fn skew_cdf_table(theta: f64, t: f64, x: f64) -> TabulatedCdf {
    let s = t.sqrt();
    let lo = x.min(0.0) - 14.0 * s;
    let hi = x.max(0.0) + 14.0 * s;
    TabulatedCdf::new(|y| skew_density(theta, t, x, y), lo, hi, &[0.0, x, -x], 8000)
}

/// Occupation CDF `P(Λ ≤ u)` with `r = σ₊/σ₋`. Substituting `u = sin²φ`
/// turns the density into the smooth integrand `(2/π) r / (1 − (1 − r²)
/// sin²φ)` on `[0, asin √u]`.
pub fn occupation_cdf(u: f64, sigma_plus: f64, sigma_minus: f64) -> f64 {
    if u <= 0.0 {
        return 0.0;
    }
    if u >= 1.0 {
        return 1.0;
    }
    let r = sigma_plus / sigma_minus;
    let top = u.sqrt().asin();
    Quadrature::new(20, 16).integrate(
        |phi| {
            let s = phi.sin();
            2.0 / PI * r / (1.0 - (1.0 - r * r) * s * s)
        },
        0.0,
        top,
    )
}

/// Textbook one-sample KS for untied samples:
/// `max_i max(i/N − F(x_(i)), F(x_(i)) − (i−1)/N)`.
pub fn ks_reference(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut s = samples.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    s.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            ((i + 1) as f64 / n - f).max(f - i as f64 / n)
        })
        .fold(0.0, f64::max)
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

pub fn median(xs: &[f64]) -> f64 {
    let mut s = xs.to_vec();
    s.sort_by(f64::total_cmp);
    let m = s.len() / 2;
    if s.len() % 2 == 0 {
        0.5 * (s[m - 1] + s[m])
    } else {
        s[m]
    }
}

/// Brute-force estimators straight from their definitions, one loop per
/// quantity.
pub struct BruteForce {
    pub q_plus: f64,
    pub sigma2_plus: Option<f64>,
    pub sigma2_minus: Option<f64>,
    pub m2_plus: Option<f64>,
    pub m2_minus: Option<f64>,
    pub bracket_pm: f64,
}

pub fn brute_force(values: &[f64], horizon: f64) -> BruteForce {
    let n = values.len() - 1;
    let pos = |y: f64| if y > 0.0 { y } else { 0.0 };
    let neg = |y: f64| if y < 0.0 { -y } else { 0.0 };
    let mut above = 0;
    for k in 1..=n {
        if values[k] >= 0.0 {
            above += 1;
        }
    }
    let q_plus = above as f64 / n as f64;
    let q_minus = (n - above) as f64 / n as f64;
    let (mut pp, mut mm, mut pm, mut py, mut my) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for k in 1..=n {
        let dp = pos(values[k]) - pos(values[k - 1]);
        let dm = neg(values[k]) - neg(values[k - 1]);
        let dy = values[k] - values[k - 1];
        pp += dp * dp;
        mm += dm * dm;
        pm += dp * dm;
        py += dp * dy;
        my -= dm * dy;
    }
    let ratio = |b: f64, q: f64| (q > 0.0).then(|| b / (horizon * q));
    BruteForce {
        q_plus,
        sigma2_plus: ratio(pp, q_plus),
        sigma2_minus: ratio(mm, q_minus),
        m2_plus: ratio(py, q_plus),
        m2_minus: ratio(my, q_minus),
        bracket_pm: pm,
    }
}
