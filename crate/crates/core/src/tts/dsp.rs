//! Elementary functions built from IEEE basic operations only, so synthesis is
//! bit-identical across platforms and math libraries.

use std::f64::consts::{PI, TAU};

pub fn exp(x: f64) -> f64 {
    if !x.is_finite() {
        return x.exp();
    }
    let mut r = x;
    let mut halvings = 0;
    while r.abs() > 0.5 && halvings < 1100 {
        r *= 0.5;
        halvings += 1;
    }
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..=20 {
        term = term * r / f64::from(k);
        sum += term;
    }
    for _ in 0..halvings {
        sum *= sum;
    }
    sum
}

pub fn cos(x: f64) -> f64 {
    if !x.is_finite() {
        return f64::NAN;
    }
    let mut r = x - TAU * (x / TAU).round();
    // cos is even and cos(pi - r) = -cos(r); fold into [0, pi/2]
    r = r.abs();
    let sign = if r > PI / 2.0 {
        r = PI - r;
        -1.0
    } else {
        1.0
    };
    let r2 = r * r;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..=14 {
        term = -term * r2 / f64::from((2 * k - 1) * (2 * k));
        sum += term;
    }
    sign * sum
}

/// Two-pole resonator `y = a x + b y1 + c y2` with unity gain at DC.
#[derive(Debug, Clone, Copy, Default)]
pub struct Resonator {
    a: f64,
    b: f64,
    c: f64,
    y1: f64,
    y2: f64,
}

impl Resonator {
    pub fn set(&mut self, freq: f64, bw: f64, sample_rate: f64) {
        let t = 1.0 / sample_rate;
        self.c = -exp(-TAU * bw * t);
        self.b = 2.0 * exp(-PI * bw * t) * cos(TAU * freq * t);
        self.a = 1.0 - self.b - self.c;
    }

    pub fn step(&mut self, x: f64) -> f64 {
        let y = self.a * x + self.b * self.y1 + self.c * self.y2;
        self.y2 = self.y1;
        self.y1 = y;
        y
    }
}

/// ANSI C `rand` recurrence, modulo 2^31; yields values in [-1, 1).
#[derive(Debug, Clone)]
pub struct Lcg(u32);

impl Lcg {
    pub const SEED: u32 = 0x5eed;

    pub fn new(seed: u32) -> Self {
        Lcg(seed)
    }

    pub fn next_f64(&mut self) -> f64 {
        self.0 = self.0.wrapping_mul(1_103_515_245).wrapping_add(12_345) & 0x7fff_ffff;
        f64::from((self.0 >> 16) & 0x7fff) / 16384.0 - 1.0
    }
}

/// Rosenberg glottal flow over one period, phase in [0, 1).
pub fn glottal_flow(phase: f64) -> f64 {
    const OPEN: f64 = 0.4;
    const CLOSE: f64 = 0.16;
    if phase < OPEN {
        0.5 * (1.0 - cos(PI * phase / OPEN))
    } else if phase < OPEN + CLOSE {
        cos(PI * (phase - OPEN) / (2.0 * CLOSE))
    } else {
        0.0
    }
}
