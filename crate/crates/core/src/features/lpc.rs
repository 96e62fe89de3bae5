//! Autocorrelation LPC analysis and the LPC-to-cepstrum recursion.
//!
//! Predictor convention: `s[n] ≈ Σ_{j=1}^{p} a_j s[n-j]`, so the inverse filter
//! is `A(z) = 1 - Σ a_j z^{-j}` and the model spectrum is `1 / A(z)`.

use crate::error::{Error, Result};
use crate::pitch::Period;
use crate::signal_io::SampleBuffer;

pub const CEPSTRAL_DIM: usize = 12;
pub const DEFAULT_LPC_ORDER: usize = 12;
pub const MAX_CEPSTRAL_FRAMES: usize = 18;
/// Pitch periods per cepstral analysis frame.
pub const PERIODS_PER_FRAME: usize = 3;

/// Cepstral coefficients `c1..c12`; `c0` is not kept.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CepstralVector(pub [f64; CEPSTRAL_DIM]);

impl CepstralVector {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// Output of the Levinson-Durbin recursion.
#[derive(Debug, Clone, PartialEq)]
pub struct LpcSolution {
    /// `a_1..a_p`.
    pub coefficients: Vec<f64>,
    /// Reflection coefficients `k_1..k_p`.
    pub reflection: Vec<f64>,
    /// Prediction error energies `E_0..E_p`.
    pub errors: Vec<f64>,
}

impl LpcSolution {
    pub fn residual(&self) -> f64 {
        *self.errors.last().unwrap()
    }
}

/// `R[k] = Σ_n x[n] x[n+k]` for `k = 0..=max_lag`, rectangular window.
pub fn autocorrelation(frame: &[f64], max_lag: usize) -> Result<Vec<f64>> {
    if frame.len() <= max_lag {
        return Err(Error::invalid(format!(
            "frame of {} samples too short for lag {max_lag}",
            frame.len()
        )));
    }
    let r: Vec<f64> = (0..=max_lag)
        .map(|k| {
            frame[..frame.len() - k]
                .iter()
                .zip(&frame[k..])
                .map(|(a, b)| a * b)
                .sum()
        })
        .collect();
    if r[0] <= 0.0 {
        return Err(Error::IllConditioned { order: 0 });
    }
    Ok(r)
}

/// Solves the order-`order` autocorrelation normal equations.
pub fn levinson_durbin(r: &[f64], order: usize) -> Result<LpcSolution> {
    if r.len() <= order {
        return Err(Error::invalid(format!(
            "order {order} needs {} autocorrelation lags, got {}",
            order + 1,
            r.len()
        )));
    }
    if r[0].is_nan() || r[0] <= 0.0 {
        return Err(Error::IllConditioned { order: 0 });
    }
    let mut a = vec![0.0; order];
    let mut prev = vec![0.0; order];
    let mut reflection = Vec::with_capacity(order);
    let mut errors = Vec::with_capacity(order + 1);
    let mut err = r[0];
    errors.push(err);

    for i in 1..=order {
        let acc: f64 = (1..i).map(|j| prev[j - 1] * r[i - j]).sum();
        let k = (r[i] - acc) / err;
        if !k.is_finite() || k.abs() >= 1.0 {
            return Err(Error::IllConditioned { order: i });
        }
        a[i - 1] = k;
        for j in 1..i {
            a[j - 1] = prev[j - 1] - k * prev[i - j - 1];
        }
        err *= 1.0 - k * k;
        if err.is_nan() || err <= 0.0 {
            return Err(Error::IllConditioned { order: i });
        }
        reflection.push(k);
        errors.push(err);
        prev[..i].copy_from_slice(&a[..i]);
    }

    Ok(LpcSolution {
        coefficients: a,
        reflection,
        errors,
    })
}

/// `c_n = a_n + Σ_{k=1}^{n-1} (k/n) c_k a_{n-k}` for `n = 1..=12`, with
/// `a_n = 0` beyond the predictor order.
pub fn lpc_to_cepstral(a: &[f64]) -> CepstralVector {
    let coef = |n: usize| {
        if n >= 1 && n <= a.len() {
            a[n - 1]
        } else {
            0.0
        }
    };
    let mut c = [0.0; CEPSTRAL_DIM];
    for n in 1..=CEPSTRAL_DIM {
        let mut acc = coef(n);
        for k in 1..n {
            acc += (k as f64 / n as f64) * c[k - 1] * coef(n - k);
        }
        c[n - 1] = acc;
    }
    CepstralVector(c)
}

/// Cepstra of one analysis frame.
pub fn frame_cepstrum(frame: &[f64], lpc_order: usize) -> Result<CepstralVector> {
    let r = autocorrelation(frame, lpc_order)?;
    let lpc = levinson_durbin(&r, lpc_order)?;
    Ok(lpc_to_cepstral(&lpc.coefficients))
}

/// Averages the cepstra of frames spanning three consecutive periods, shifted
/// one period at a time (at most 18 frames).
pub fn pitch_synchronous_cepstra(
    buffer: &SampleBuffer,
    periods: &[Period],
    lpc_order: usize,
) -> Result<CepstralVector> {
    if periods.len() < PERIODS_PER_FRAME {
        return Err(Error::RegionTooShort {
            periods: periods.len(),
            required: PERIODS_PER_FRAME,
        });
    }
    let n_frames = (periods.len() - PERIODS_PER_FRAME + 1).min(MAX_CEPSTRAL_FRAMES);
    let samples = buffer.samples();
    let mut sum = [0.0; CEPSTRAL_DIM];
    for i in 0..n_frames {
        let start = periods[i].start;
        let end = periods[i + PERIODS_PER_FRAME - 1].end();
        let frame = samples
            .get(start..end)
            .ok_or_else(|| Error::invalid("period lies outside the buffer"))?;
        let c = frame_cepstrum(frame, lpc_order)?;
        for (s, v) in sum.iter_mut().zip(c.0) {
            *s += v;
        }
    }
    Ok(CepstralVector(sum.map(|s| s / n_frames as f64)))
}

/// Number of cepstral frames for a region of `n_periods`.
pub fn cepstral_frame_count(n_periods: usize) -> usize {
    if n_periods < PERIODS_PER_FRAME {
        0
    } else {
        (n_periods - PERIODS_PER_FRAME + 1).min(MAX_CEPSTRAL_FRAMES)
    }
}
