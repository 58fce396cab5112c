//! Long-time windowed Fourier analysis of recorded observables and detection
//! of the dominant oscillation peak.
//!
//! The transform is the literal windowed integral
//! `F(ω) = |Σ_{t_j > t*} dt · e^{−iω t_j} x(t_j)|` evaluated by direct
//! summation on a uniform frequency grid — at the sample counts involved an
//! FFT buys nothing and would drag in padding and windowing choices. Signals
//! are real, so their spectra are symmetric and only ω ≥ 0 is reported; a
//! mode at negative frequency −ω shows up at +ω.

use crate::dynamics::TimeSeries;
use crate::scalar::Scalar;
use num_complex::Complex;
use thiserror::Error;

/// Peak prominence above which a series is declared oscillating.
pub const DEFAULT_PROMINENCE_THRESHOLD: f64 = 10.0;

/// Errors from spectrum computation.
#[derive(Debug, Error)]
pub enum SpectraError {
    #[error("no samples lie past the window start t* = {t_star}")]
    EmptyWindow { t_star: f64 },

    #[error("invalid sampling grid: {0}")]
    InvalidGrid(String),
}

/// Magnitude spectrum of one windowed time series.
#[derive(Clone, Debug)]
pub struct Spectrum<T> {
    /// Uniform angular-frequency grid `ω_m = m · omega_max / n_bins`,
    /// including both endpoints.
    pub omegas: Vec<T>,
    /// `|F(ω_m)|`, non-negative by construction.
    pub amplitudes: Vec<T>,
    /// Start of the analysis window; only samples with `t > t_star` enter.
    pub t_star: T,
    /// Sample spacing of the underlying series.
    pub dt: T,
}

impl<T: Scalar> Spectrum<T> {
    /// Frequency spacing of the grid.
    pub fn bin_width(&self) -> T {
        self.omegas[1] - self.omegas[0]
    }
}

/// Smallest frequency the peak search considers by default: two bins, enough
/// to keep the DC component and its immediate leakage out of the running.
pub fn default_omega_min<T: Scalar>(spectrum: &Spectrum<T>) -> T {
    spectrum.bin_width() * T::from_f64(2.0)
}

/// Dominant spectral peak and its prominence relative to the typical level.
#[derive(Clone, Copy, Debug)]
pub struct PeakReport<T> {
    pub omega: T,
    pub amplitude: T,
    /// Peak amplitude divided by the median amplitude over the searched
    /// range; a flat spectrum scores close to 1, a clean tone scores large.
    pub prominence: T,
}

/// Windowed Fourier magnitude of a uniformly sampled series:
/// `amplitudes[m] = |Σ_{t_j > t_star} dt · e^{−iω_m t_j} x_j|` on the grid
/// `ω_m = m · omega_max / n_bins`, `m = 0..=n_bins`.
pub fn windowed_fourier<T: Scalar>(
    times: &[T],
    values: &[T],
    t_star: T,
    omega_max: T,
    n_bins: usize,
) -> Result<Spectrum<T>, SpectraError> {
    if times.len() != values.len() {
        return Err(SpectraError::InvalidGrid(format!(
            "{} times but {} values",
            times.len(),
            values.len()
        )));
    }
    if times.len() < 2 {
        return Err(SpectraError::InvalidGrid(
            "need at least two samples to define the spacing".into(),
        ));
    }
    if !(omega_max > T::zero()) || n_bins == 0 {
        return Err(SpectraError::InvalidGrid(
            "frequency grid needs omega_max > 0 and at least one bin".into(),
        ));
    }
    let dt = times[1] - times[0];
    if !(dt > T::zero()) {
        return Err(SpectraError::InvalidGrid("times must be strictly increasing".into()));
    }
    let tol = T::from_f64(1e-6) * dt.max(T::one());
    for pair in times.windows(2) {
        if ((pair[1] - pair[0]) - dt).abs() > tol {
            return Err(SpectraError::InvalidGrid(format!(
                "non-uniform spacing between t = {} and t = {}",
                pair[0].to_f64(),
                pair[1].to_f64()
            )));
        }
    }

    let window: Vec<(T, T)> = times
        .iter()
        .zip(values.iter())
        .filter(|(&t, _)| t > t_star)
        .map(|(&t, &v)| (t, v))
        .collect();
    if window.is_empty() {
        return Err(SpectraError::EmptyWindow { t_star: t_star.to_f64() });
    }

    let step = omega_max / T::from_f64(n_bins as f64);
    let mut omegas = Vec::with_capacity(n_bins + 1);
    let mut amplitudes = Vec::with_capacity(n_bins + 1);
    for m in 0..=n_bins {
        let omega = step * T::from_f64(m as f64);
        let mut acc = Complex::new(T::zero(), T::zero());
        for &(t, x) in &window {
            acc += Complex::from_polar(T::one(), -omega * t).scale(x);
        }
        omegas.push(omega);
        amplitudes.push((acc * Complex::new(dt, T::zero())).norm());
    }

    Ok(Spectrum {
        omegas,
        amplitudes,
        t_star,
        dt,
    })
}

/// [`windowed_fourier`] applied to every observable row of a trajectory.
pub fn spectra_of_series<T: Scalar>(
    series: &TimeSeries<T>,
    t_star: T,
    omega_max: T,
    n_bins: usize,
) -> Result<Vec<Spectrum<T>>, SpectraError> {
    series
        .values
        .iter()
        .map(|row| windowed_fourier(&series.times, row, t_star, omega_max, n_bins))
        .collect()
}

fn median<T: Scalar>(data: &[T]) -> T {
    let mut sorted = data.to_vec();
    sorted.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite amplitudes"));
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) * T::from_f64(0.5)
    }
}

/// Largest-amplitude bin at `ω ≥ omega_min`, with ties broken toward lower
/// frequency, and its prominence over the median of the searched range.
///
/// A spectrum that is identically zero over the range reports prominence 0;
/// a nonzero peak over a zero median reports infinite prominence.
pub fn dominant_peak<T: Scalar>(spectrum: &Spectrum<T>, omega_min: T) -> PeakReport<T> {
    let searched: Vec<(T, T)> = spectrum
        .omegas
        .iter()
        .zip(spectrum.amplitudes.iter())
        .filter(|(&w, _)| w >= omega_min)
        .map(|(&w, &a)| (w, a))
        .collect();
    assert!(
        !searched.is_empty(),
        "omega_min {} excludes the entire frequency grid",
        omega_min.to_f64()
    );

    let mut best = searched[0];
    for &(w, a) in &searched[1..] {
        if a > best.1 {
            best = (w, a);
        }
    }
    let med = median(&searched.iter().map(|&(_, a)| a).collect::<Vec<T>>());
    let prominence = if med > T::zero() {
        best.1 / med
    } else if best.1 > T::zero() {
        T::infinity()
    } else {
        T::zero()
    };

    PeakReport {
        omega: best.0,
        amplitude: best.1,
        prominence,
    }
}

/// Whether the dominant peak stands out from the typical spectral level by
/// more than `k_threshold` — the formalized reading of "oscillates" vs "shows
/// no systematic peak".
pub fn oscillation_verdict<T: Scalar>(
    spectrum: &Spectrum<T>,
    omega_min: T,
    k_threshold: T,
) -> bool {
    dominant_peak(spectrum, omega_min).prominence > k_threshold
}
