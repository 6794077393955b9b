//! Reference implementations written independently of the library, used as
//! test oracles. Plain arrays only, no library types.
#![allow(dead_code)]

use rand::Rng;

pub type V = [f64; 3];

pub fn sub(a: V, b: V) -> V {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub fn add(a: V, b: V) -> V {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub fn scale(a: V, s: f64) -> V {
    [a[0] * s, a[1] * s, a[2] * s]
}

pub fn dot(a: V, b: V) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn norm(a: V) -> f64 {
    dot(a, a).sqrt()
}

pub fn unit(a: V) -> V {
    scale(a, 1.0 / norm(a))
}

pub fn random_unit<R: Rng>(rng: &mut R) -> V {
    loop {
        let v = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
        let n = norm(v);
        if n > 0.1 && n <= 1.0 {
            return scale(v, 1.0 / n);
        }
    }
}

/// Squared distance from `x` to the line through `a` with unit direction `d`.
pub fn line_dist2(x: V, a: V, d: V) -> f64 {
    let r = sub(x, a);
    let perp = sub(r, scale(d, dot(r, d)));
    dot(perp, perp)
}

pub fn objective(x: V, lines: &[(V, V)]) -> f64 {
    lines.iter().map(|&(a, d)| line_dist2(x, a, d)).sum()
}

/// Brute-force minimizer of the summed squared line distances: a 21³ grid
/// over a box, recentered on the best node and shrunk until the spacing is
/// below 1e-10. Each pass halves the box.
pub fn grid_minimize(lines: &[(V, V)], center: V, half_width: f64) -> V {
    const N: i32 = 10;
    let mut c = center;
    let mut h = half_width;
    while h / N as f64 > 1e-10 {
        let step = h / N as f64;
        let mut best = (f64::INFINITY, c);
        for i in -N..=N {
            for j in -N..=N {
                for k in -N..=N {
                    let x = [c[0] + i as f64 * step, c[1] + j as f64 * step, c[2] + k as f64 * step];
                    let f = objective(x, lines);
                    if f < best.0 {
                        best = (f, x);
                    }
                }
            }
        }
        c = best.1;
        h = 5.0 * step;
    }
    c
}

/// A random first-order reflection: sender `s`, wall plane `x·n = d` with
/// the receiver (origin) and the sender on the same side.
pub struct Reflection {
    pub s: V,
    pub n_unit: V,
    pub d: f64,
    pub v: V,
    pub w: V,
    pub delta: f64,
}

pub fn random_reflection<R: Rng>(rng: &mut R) -> Reflection {
    loop {
        let n_unit = random_unit(rng);
        let d = rng.random_range(0.3..3.0);
        let s = scale(random_unit(rng), rng.random_range(0.1..3.0));
        let gap = d - dot(s, n_unit);
        if gap < 0.05 {
            continue;
        }
        let mirror = add(s, scale(n_unit, 2.0 * gap));
        let delta = norm(mirror) - norm(s);
        if delta < 1e-3 {
            continue;
        }
        return Reflection {
            s,
            n_unit,
            d,
            v: unit(s),
            w: unit(mirror),
            delta,
        };
    }
}

/// Candidate wall point for sender distance `p`: equidistant from the
/// receiver and the sender's image, on the reflected ray.
pub fn circle_point(v: V, w: V, delta: f64, p: f64) -> V {
    let dir = sub(scale(w, p + delta), scale(v, p));
    let k = (p * delta + delta * delta / 2.0) / dot(dir, dir);
    scale(dir, k)
}

pub fn invert(x: V) -> V {
    scale(x, 1.0 / dot(x, x))
}

/// Distance from `x` to the line through `a` and `b`.
pub fn dist_to_line_through(x: V, a: V, b: V) -> f64 {
    line_dist2(x, a, unit(sub(b, a))).sqrt()
}

/// Textbook statistics: sorted copy, arithmetic mean, population variance,
/// quantile at fractional rank (n−1)q.
pub struct NaiveStats {
    pub mean: f64,
    pub median: f64,
    pub std: f64,
    pub q1: f64,
    pub q3: f64,
}

pub fn naive_stats(xs: &[f64]) -> NaiveStats {
    let mut s = xs.to_vec();
    for i in 1..s.len() {
        let mut j = i;
        while j > 0 && s[j - 1] > s[j] {
            s.swap(j - 1, j);
            j -= 1;
        }
    }
    let n = s.len();
    let mean = s.iter().sum::<f64>() / n as f64;
    let var = s.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n as f64;
    let q = |f: f64| {
        let h = (n - 1) as f64 * f;
        let i = h as usize;
        if i + 1 >= n {
            s[n - 1]
        } else {
            s[i] * (1.0 - (h - i as f64)) + s[i + 1] * (h - i as f64)
        }
    };
    let median = if n % 2 == 1 { s[n / 2] } else { (s[n / 2 - 1] + s[n / 2]) / 2.0 };
    NaiveStats {
        mean,
        median,
        std: var.sqrt(),
        q1: q(0.25),
        q3: q(0.75),
    }
}
