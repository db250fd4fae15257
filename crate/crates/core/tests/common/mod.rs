//! Reference computations used only by tests. Nothing here calls into the
//! library's phase or cascade code.

#![allow(dead_code)]

use std::f64::consts::PI;

use num_complex::Complex64;

// 10-point Gauss–Legendre nodes and weights on [-1, 1].
const GL_NODES: [f64; 5] = [
    0.148_874_338_981_631_2,
    0.433_395_394_129_247_2,
    0.679_409_568_299_024_4,
    0.865_063_366_688_984_5,
    0.973_906_528_517_171_7,
];
const GL_WEIGHTS: [f64; 5] = [
    0.295_524_224_714_752_9,
    0.269_266_719_309_996_4,
    0.219_086_362_515_982,
    0.149_451_349_150_580_6,
    0.066_671_344_308_688_1,
];

/// Composite Gauss–Legendre over `panels` equal panels of `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * h;
        let half = 0.5 * h;
        let mut s = 0.0;
        for (x, w) in GL_NODES.iter().zip(GL_WEIGHTS) {
            s += w * (f(mid - half * x) + f(mid + half * x));
        }
        total += s * half;
    }
    total
}

pub fn integrate_complex<F: Fn(f64) -> Complex64>(f: F, a: f64, b: f64, panels: usize) -> Complex64 {
    Complex64::new(integrate(|x| f(x).re, a, b, panels), integrate(|x| f(x).im, a, b, panels))
}

/// `I₀(κ) = (1/π) ∫₀^π e^{κ cos t} dt`.
pub fn bessel_i0(kappa: f64) -> f64 {
    integrate(|t| (kappa * t.cos()).exp(), 0.0, PI, 200) / PI
}

/// `I₁(κ) = (1/π) ∫₀^π e^{κ cos t} cos t dt`.
pub fn bessel_i1(kappa: f64) -> f64 {
    integrate(|t| (kappa * t.cos()).exp() * t.cos(), 0.0, PI, 200) / PI
}

/// Residual `Q(φ) − φ` by scanning every level for the nearest one on the
/// circle; on a tie the lower level wins.
pub fn residual(phi: f64, bits: u32) -> f64 {
    let levels = 1u32 << bits;
    let step = 2.0 * PI / levels as f64;
    let mut best = f64::INFINITY;
    for m in 0..levels {
        let mut d = (m as f64 * step - phi) % (2.0 * PI);
        if d > PI {
            d -= 2.0 * PI;
        }
        if d <= -PI {
            d += 2.0 * PI;
        }
        if d.abs() < best.abs() - 1e-15 {
            best = d;
        }
    }
    best
}

/// `E[e^{jnε}]` for `ε = residual(−θ)` when `θ` follows the von Mises / atom
/// mixture with mean `c`. Integrates over the channel phase sector by sector,
/// so the quantizer's discontinuities sit on panel edges.
pub fn circular_moment(n: i32, kappa: f64, rice: f64, c: f64, bits: u32) -> Complex64 {
    let levels = 1u32 << bits;
    let step = 2.0 * PI / levels as f64;
    let i0 = bessel_i0(kappa);
    let cont_w = 1.0 / (rice + 1.0);
    let density = |theta: f64| cont_w * (kappa * (theta - c).cos()).exp() / (2.0 * PI * i0);
    let mut total = Complex64::new(0.0, 0.0);
    for k in 0..levels {
        // −θ nearest to level −k: θ within half a step of kΔ
        let lo = (k as f64 - 0.5) * step;
        let hi = (k as f64 + 0.5) * step;
        total += integrate_complex(
            |theta| {
                let eps = residual(-theta, bits);
                density(theta) * Complex64::from_polar(1.0, n as f64 * eps)
            },
            lo,
            hi,
            40,
        );
    }
    let atom_w = rice / (rice + 1.0);
    total + atom_w * Complex64::from_polar(1.0, n as f64 * residual(-c, bits))
}

/// `Γ(x)` for positive integers and half-integers.
pub fn gamma_half_integer(x: f64) -> f64 {
    let twice = (2.0 * x).round();
    assert!((2.0 * x - twice).abs() < 1e-12 && twice >= 1.0);
    let (mut g, mut y) = if twice as i64 % 2 == 0 { (1.0, 1.0) } else { (PI.sqrt(), 0.5) };
    while y + 0.5 < x {
        g *= y;
        y += 1.0;
    }
    g
}

/// `E[|h|^k]` of a Nakagami-m amplitude with integer or half-integer `m`.
pub fn nakagami_moment(m: f64, omega: f64, k: u32) -> f64 {
    gamma_half_integer(m + k as f64 / 2.0) / gamma_half_integer(m) * (omega / m).powf(k as f64 / 2.0)
}

/// All set partitions of `{0, …, n−1}` as block lists.
pub fn set_partitions(n: usize) -> Vec<Vec<Vec<usize>>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in set_partitions(n - 1) {
        for i in 0..p.len() {
            let mut q = p.clone();
            q[i].push(n - 1);
            out.push(q);
        }
        let mut q = p.clone();
        q.push(vec![n - 1]);
        out.push(q);
    }
    out
}

/// `E[X]` and `E[X²]` for `X = |Σ Zᵢ|²` with i.i.d. `Zᵢ = aᵢ e^{jεᵢ}`,
/// summed over set partitions of the index positions.
///
/// `amp(k)` is `E[a^k]` and `mu(n)` is `E[e^{jnε}]` for `n ≥ 0`.
pub fn cascade_moments(n: u64, amp: &dyn Fn(u32) -> f64, mu: &dyn Fn(u32) -> Complex64) -> (f64, f64) {
    let mu_signed = |d: i32| if d >= 0 { mu(d as u32) } else { mu((-d) as u32).conj() };
    let moment = |conj: &[bool]| -> f64 {
        let mut total = Complex64::new(0.0, 0.0);
        for partition in set_partitions(conj.len()) {
            let b = partition.len() as u64;
            if b > n {
                continue;
            }
            let count: f64 = (0..b).map(|i| (n - i) as f64).product();
            let mut value = Complex64::new(count, 0.0);
            for block in &partition {
                let plain = block.iter().filter(|&&i| !conj[i]).count() as i32;
                let conjugated = block.len() as i32 - plain;
                value *= amp(block.len() as u32) * mu_signed(plain - conjugated);
            }
            total += value;
        }
        total.re
    };
    (moment(&[false, true]), moment(&[false, true, false, true]))
}

/// `K` from the Nakagami shape.
pub fn rice_from_m(m: f64) -> f64 {
    let r = (m * m - m).sqrt();
    r / (m - r)
}
