//! Dormand–Prince 5(4) with per-component mixed error control.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub h_min: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions { rtol: 1e-12, atol: 1e-12, h_min: 1e-14, max_steps: 2_000_000 }
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct OdeStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// b - b*, the embedded fourth-order weights subtracted
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Integrates y' = f(t, y) from t0 to t1 (either direction), overwriting y.
/// `h` carries a step size guess in and the last accepted size out.
pub fn integrate<F>(mut f: F, t0: f64, t1: f64, y: &mut [f64], h: &mut f64, opts: &OdeOptions) -> Result<OdeStats>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
{
    let n = y.len();
    let dir = (t1 - t0).signum();
    let mut stats = OdeStats::default();
    if t1 == t0 {
        return Ok(stats);
    }
    let mut k: Vec<Vec<f64>> = (0..7).map(|_| vec![0.0; n]).collect();
    let mut tmp = vec![0.0; n];
    let mut ynew = vec![0.0; n];
    let mut t = t0;
    f(t, y, &mut k[0])?;
    stats.evaluations += 1;
    let span = (t1 - t0).abs();
    let mut hh = if *h > 0.0 { h.min(span) } else { initial_step(y, &k[0], opts).min(span) };
    let mut last_reject = false;
    while (t1 - t) * dir > 0.0 {
        if stats.accepted + stats.rejected >= opts.max_steps {
            return Err(Error::StepSizeUnderflow { t });
        }
        let remaining = (t1 - t).abs();
        let last = hh >= remaining * (1.0 - 1e-12);
        if last {
            hh = remaining;
        }
        let s = hh * dir;
        stage(&mut tmp, y, s, &k, &[(0, A21)]);
        f(t + C2 * s, &tmp, &mut k[1])?;
        stage(&mut tmp, y, s, &k, &[(0, A31), (1, A32)]);
        f(t + C3 * s, &tmp, &mut k[2])?;
        stage(&mut tmp, y, s, &k, &[(0, A41), (1, A42), (2, A43)]);
        f(t + C4 * s, &tmp, &mut k[3])?;
        stage(&mut tmp, y, s, &k, &[(0, A51), (1, A52), (2, A53), (3, A54)]);
        f(t + C5 * s, &tmp, &mut k[4])?;
        stage(&mut tmp, y, s, &k, &[(0, A61), (1, A62), (2, A63), (3, A64), (4, A65)]);
        f(t + s, &tmp, &mut k[5])?;
        stage(&mut ynew, y, s, &k, &[(0, B1), (2, B3), (3, B4), (4, B5), (5, B6)]);
        let (head, tail) = k.split_at_mut(6);
        f(t + s, &ynew, &mut tail[0])?;
        stats.evaluations += 6;
        let mut err = 0.0;
        for i in 0..n {
            let e = s * (E1 * head[0][i] + E3 * head[2][i] + E4 * head[3][i] + E5 * head[4][i] + E6 * head[5][i] + E7 * tail[0][i]);
            let sc = opts.atol + opts.rtol * y[i].abs().max(ynew[i].abs());
            err += (e / sc) * (e / sc);
        }
        let err = (err / n as f64).sqrt();
        if !err.is_finite() {
            hh *= 0.2;
            last_reject = true;
            stats.rejected += 1;
            if hh < opts.h_min {
                return Err(Error::StepSizeUnderflow { t });
            }
            continue;
        }
        if err <= 1.0 {
            t = if last { t1 } else { t + s };
            y.copy_from_slice(&ynew);
            k.swap(0, 6);
            stats.accepted += 1;
            // no growth right after a rejection
            let grow = if last_reject { 1.0 } else { 5.0 };
            let fac = (0.9 * err.max(1e-10).powf(-0.2)).clamp(0.2, grow);
            if !last {
                hh *= fac;
            }
            *h = hh;
            last_reject = false;
        } else {
            hh *= (0.9 * err.powf(-0.2)).max(0.2);
            last_reject = true;
            stats.rejected += 1;
            if hh < opts.h_min {
                return Err(Error::StepSizeUnderflow { t });
            }
        }
    }
    Ok(stats)
}

fn stage(out: &mut [f64], y: &[f64], s: f64, k: &[Vec<f64>], coeffs: &[(usize, f64)]) {
    out.copy_from_slice(y);
    for &(j, a) in coeffs {
        let sa = s * a;
        for (o, kv) in out.iter_mut().zip(&k[j]) {
            *o += sa * kv;
        }
    }
}

fn initial_step(y: &[f64], f0: &[f64], opts: &OdeOptions) -> f64 {
    let mut d0 = 0.0;
    let mut d1 = 0.0;
    for (yi, fi) in y.iter().zip(f0) {
        let sc = opts.atol + opts.rtol * yi.abs();
        d0 += (yi / sc).powi(2);
        d1 += (fi / sc).powi(2);
    }
    let (d0, d1) = (d0.sqrt(), d1.sqrt());
    if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        (0.01 * d0 / d1).min(1e-2)
    }
}
