use crate::error::{Error, Result};

/// Fourier feature map on time intervals: `d_T/2` frequencies, one
/// (cos, sin) output pair each, scaled so every output has unit norm.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeEncoding {
    frequencies: Vec<f64>,
}

impl TimeEncoding {
    /// Frequencies on a decade-spaced geometric grid from 1 down to 1e-9,
    /// covering timescales from single time units to billions.
    pub fn geometric(d_t: usize) -> Result<Self> {
        let half = Self::check_dim(d_t)?;
        let frequencies = (0..half)
            .map(|i| {
                if half == 1 {
                    1.0
                } else {
                    10f64.powf(-9.0 * i as f64 / (half - 1) as f64)
                }
            })
            .collect();
        Ok(TimeEncoding { frequencies })
    }

    pub fn with_frequencies(frequencies: Vec<f64>) -> Result<Self> {
        if frequencies.is_empty() {
            return Err(Error::invalid("time encoding needs at least one frequency"));
        }
        Ok(TimeEncoding { frequencies })
    }

    fn check_dim(d_t: usize) -> Result<usize> {
        if d_t == 0 || d_t % 2 != 0 {
            return Err(Error::invalid(format!("time encoding dimension {d_t} must be even and positive")));
        }
        Ok(d_t / 2)
    }

    pub fn dim(&self) -> usize {
        2 * self.frequencies.len()
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }
}

/// Encodes a non-negative time interval as
/// `sqrt(2/d_T) [cos(w_1 Δt), sin(w_1 Δt), ..., cos(w_{d_T/2} Δt), sin(w_{d_T/2} Δt)]`.
pub fn time_encode(dt: f64, enc: &TimeEncoding) -> Vec<f64> {
    let d_t = enc.dim();
    let scale = (2.0 / d_t as f64).sqrt();
    let mut out = Vec::with_capacity(d_t);
    for &w in enc.frequencies() {
        let phase = w * dt;
        out.push(scale * phase.cos());
        out.push(scale * phase.sin());
    }
    out
}
