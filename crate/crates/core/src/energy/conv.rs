//! Counting `x + y` over `X × Y` for sorted integer lists.
//!
//! Small products are counted directly. Large ones go through a complex FFT
//! of the two indicator vectors; every output is rounded to the nearest
//! integer and the run falls back to direct counting if any value is more
//! than 0.25 away from an integer.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use super::RepFunction;

/// `|X||Y|` above which the transform path is preferred.
pub const DIRECT_PAIR_LIMIT: u64 = 10_000_000;
/// Largest transform length attempted; wider ranges are counted directly.
pub const MAX_FFT_LEN: usize = 1 << 24;
const ROUNDING_SLACK: f64 = 0.25;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Backend {
    #[default]
    Auto,
    Direct,
    Fft,
}

/// Which path produced a table.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Used {
    Direct,
    Fft,
    /// The transform failed the rounding check.
    FftFallback,
}

pub fn convolve(xs: &[i64], ys: &[i64], backend: Backend) -> (RepFunction, Used) {
    let (Some(&x0), Some(&y0)) = (xs.first(), ys.first()) else {
        return (RepFunction::empty(), Used::Direct);
    };
    let lx = (xs[xs.len() - 1] - x0 + 1) as usize;
    let ly = (ys[ys.len() - 1] - y0 + 1) as usize;
    let fft_len = (lx + ly - 1).next_power_of_two();
    let pairs = xs.len() as u64 * ys.len() as u64;

    let use_fft = match backend {
        Backend::Direct => false,
        Backend::Fft => fft_len <= MAX_FFT_LEN,
        Backend::Auto => pairs > DIRECT_PAIR_LIMIT && fft_len <= MAX_FFT_LEN,
    };
    if use_fft {
        if let Some(rep) = convolve_fft(xs, ys, lx, ly, fft_len) {
            return (rep, Used::Fft);
        }
        return (convolve_direct(xs, ys), Used::FftFallback);
    }
    (convolve_direct(xs, ys), Used::Direct)
}

pub fn convolve_direct(xs: &[i64], ys: &[i64]) -> RepFunction {
    let (Some(&x0), Some(&y0)) = (xs.first(), ys.first()) else {
        return RepFunction::empty();
    };
    let offset = x0 + y0;
    let top = xs[xs.len() - 1] + ys[ys.len() - 1];
    let mut counts = vec![0u32; (top - offset + 1) as usize];
    for &x in xs {
        let base = x - offset;
        for &y in ys {
            counts[(base + y) as usize] += 1;
        }
    }
    RepFunction::from_parts(offset, counts)
}

fn convolve_fft(xs: &[i64], ys: &[i64], lx: usize, ly: usize, len: usize) -> Option<RepFunction> {
    let (x0, y0) = (xs[0], ys[0]);
    // Pack both indicators into one complex vector: c = a + i b.
    let mut c = vec![Complex::new(0.0f64, 0.0); len];
    for &x in xs {
        c[(x - x0) as usize].re = 1.0;
    }
    for &y in ys {
        c[(y - y0) as usize].im = 1.0;
    }
    let mut planner = FftPlanner::<f64>::new();
    planner.plan_fft_forward(len).process(&mut c);

    // A_k B_k = (C_k² - conj(C_{-k})²) / 4i
    let inv_four_i = Complex::new(0.0, -0.25);
    let mut prod = vec![Complex::new(0.0, 0.0); len];
    for k in 0..len {
        let ck = c[k];
        let cmk = c[(len - k) % len].conj();
        prod[k] = (ck * ck - cmk * cmk) * inv_four_i;
    }
    planner.plan_fft_inverse(len).process(&mut prod);

    let width = lx + ly - 1;
    let scale = 1.0 / len as f64;
    let mut counts = Vec::with_capacity(width);
    for z in &prod[..width] {
        let v = z.re * scale;
        let r = v.round();
        if (v - r).abs() > ROUNDING_SLACK || r < 0.0 || (z.im * scale).abs() > ROUNDING_SLACK {
            return None;
        }
        counts.push(r as u32);
    }
    Some(RepFunction::from_parts(x0 + y0, counts))
}
