//! Intrapitch crest and trough counts.

use crate::error::{Error, Result};
use crate::pitch::Period;
use crate::signal_io::SampleBuffer;

/// Raw extrema counts over one pitch period.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ExtremaCounts {
    /// Local maxima with a positive centre sample.
    pub poc: u32,
    /// Local minima with a positive centre sample.
    pub pot: u32,
    /// Local maxima with a centre sample `<= 0`.
    pub nec: u32,
    /// Local minima with a centre sample `<= 0`.
    pub net: u32,
}

impl std::ops::AddAssign for ExtremaCounts {
    fn add_assign(&mut self, rhs: Self) {
        self.poc += rhs.poc;
        self.pot += rhs.pot;
        self.nec += rhs.nec;
        self.net += rhs.net;
    }
}

/// Per-period averages of the four extrema counters.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TemporalFeatures {
    pub poc: f64,
    pub pot: f64,
    pub nec: f64,
    pub net: f64,
}

impl TemporalFeatures {
    pub fn to_array(self) -> [f64; 4] {
        [self.poc, self.pot, self.nec, self.net]
    }

    pub fn from_array(v: [f64; 4]) -> Self {
        Self {
            poc: v[0],
            pot: v[1],
            nec: v[2],
            net: v[3],
        }
    }
}

/// Slides a three-sample window over `samples` and counts strict local extrema,
/// binned by the sign of the centre sample.
pub fn count_extrema_in(samples: &[f64]) -> Result<ExtremaCounts> {
    if samples.len() < 3 {
        return Err(Error::invalid(format!(
            "period of {} samples is shorter than the 3-sample window",
            samples.len()
        )));
    }
    let mut c = ExtremaCounts::default();
    for w in samples.windows(3) {
        let crest = w[0] < w[1] && w[1] > w[2];
        let trough = w[0] > w[1] && w[1] < w[2];
        if w[1] > 0.0 {
            if crest {
                c.poc += 1;
            } else if trough {
                c.pot += 1;
            }
        } else if crest {
            c.nec += 1;
        } else if trough {
            c.net += 1;
        }
    }
    Ok(c)
}

pub fn count_extrema(buffer: &SampleBuffer, period: Period) -> Result<ExtremaCounts> {
    let samples = buffer
        .samples()
        .get(period.start..period.end())
        .ok_or_else(|| Error::invalid("period lies outside the buffer"))?;
    count_extrema_in(samples)
}

/// Sums the counters over `periods` and divides by their number.
pub fn temporal_features(buffer: &SampleBuffer, periods: &[Period]) -> Result<TemporalFeatures> {
    if periods.is_empty() {
        return Err(Error::RegionTooShort {
            periods: 0,
            required: 1,
        });
    }
    let counts = periods
        .iter()
        .map(|&p| count_extrema(buffer, p))
        .collect::<Result<Vec<_>>>()?;
    Ok(average_counts(&counts))
}

/// Mean of the per-period counters. An empty slice yields zeros.
pub fn average_counts(counts: &[ExtremaCounts]) -> TemporalFeatures {
    if counts.is_empty() {
        return TemporalFeatures::default();
    }
    let mut total = ExtremaCounts::default();
    for &c in counts {
        total += c;
    }
    let n = counts.len() as f64;
    TemporalFeatures {
        poc: f64::from(total.poc) / n,
        pot: f64::from(total.pot) / n,
        nec: f64::from(total.nec) / n,
        net: f64::from(total.net) / n,
    }
}
