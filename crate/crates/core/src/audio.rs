//! Onset-envelope, tempogram and predominant-local-pulse analysis.
//!
//! The chain is: spectral-flux onset envelope -> windowed Fourier tempogram
//! over a BPM grid -> per-frame predominant tempo and phase -> overlap-added
//! cosine kernels -> half-wave rectified pulse curve whose local maxima are
//! the estimated beat positions.

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::decode::AudioBuffer;

#[derive(Debug, thiserror::Error)]
pub enum AnalysisError {
    #[error("buffer of {samples} samples is shorter than one {window}-sample window")]
    BufferTooShort { samples: usize, window: usize },
    #[error("tempo range {min}..{max} BPM is empty")]
    EmptyTempoRange { min: f64, max: f64 },
    #[error("envelope is silent, tempo estimation is undefined")]
    SilentEnvelope,
}

/// Analysis parameters. The defaults give roughly 100 envelope frames per
/// second (10 ms beat resolution) and a 1 BPM tempo grid.
#[derive(Debug, Clone)]
pub struct AnalysisConfig {
    pub sample_rate: u32,
    pub window_len: usize,
    pub hop_len: usize,
    pub tempo_min_bpm: f64,
    pub tempo_max_bpm: f64,
    pub tempo_step_bpm: f64,
    pub plp_window_seconds: f64,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            sample_rate: 22050,
            window_len: 2048,
            hop_len: 220,
            tempo_min_bpm: 30.0,
            tempo_max_bpm: 300.0,
            tempo_step_bpm: 1.0,
            plp_window_seconds: 6.0,
        }
    }
}

impl AnalysisConfig {
    pub fn frame_rate(&self) -> f64 {
        self.sample_rate as f64 / self.hop_len as f64
    }

    fn tempo_grid(&self) -> Result<Vec<f64>, AnalysisError> {
        if self.tempo_max_bpm < self.tempo_min_bpm || self.tempo_step_bpm <= 0.0 {
            return Err(AnalysisError::EmptyTempoRange {
                min: self.tempo_min_bpm,
                max: self.tempo_max_bpm,
            });
        }
        let count = ((self.tempo_max_bpm - self.tempo_min_bpm) / self.tempo_step_bpm).floor()
            as usize
            + 1;
        Ok((0..count)
            .map(|i| self.tempo_min_bpm + i as f64 * self.tempo_step_bpm)
            .collect())
    }

    /// Kernel length in frames, forced odd so kernels center on a frame.
    fn plp_window_frames(&self) -> usize {
        let w = (self.plp_window_seconds * self.frame_rate()).round() as usize;
        (w | 1).max(3)
    }
}

/// Per-frame spectral novelty, non-negative.
#[derive(Debug, Clone)]
pub struct OnsetEnvelope {
    pub values: Vec<f64>,
    pub frame_rate: f64,
}

/// Per-frame pulse salience, non-negative by construction.
#[derive(Debug, Clone)]
pub struct PlpCurve {
    pub values: Vec<f64>,
    pub frame_rate: f64,
}

/// Selected beat frames, pairwise at least `distance` frames apart.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BeatPeaks {
    pub frames: Vec<usize>,
    pub distance: usize,
}

impl BeatPeaks {
    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    /// Peak positions in seconds (`t = frame / frame_rate`).
    pub fn times_seconds(&self, frame_rate: f64) -> Vec<f64> {
        self.frames.iter().map(|&f| f as f64 / frame_rate).collect()
    }
}

/// Windowed complex Fourier coefficients of the onset envelope over the BPM
/// grid, one row per envelope frame.
#[derive(Debug, Clone)]
pub struct Tempogram {
    coefficients: Vec<Complex64>,
    pub tempos_bpm: Vec<f64>,
    pub n_frames: usize,
    pub frame_rate: f64,
    window_frames: usize,
}

impl Tempogram {
    pub fn coefficient(&self, frame: usize, tempo_index: usize) -> Complex64 {
        self.coefficients[frame * self.tempos_bpm.len() + tempo_index]
    }

    fn row(&self, frame: usize) -> &[Complex64] {
        let n = self.tempos_bpm.len();
        &self.coefficients[frame * n..(frame + 1) * n]
    }

    /// Strongest tempo column of `|X|` aggregated over frames; ties go to the
    /// lower BPM.
    pub fn global_tempo_bpm(&self) -> Result<f64, AnalysisError> {
        let n = self.tempos_bpm.len();
        let mut totals = vec![0.0f64; n];
        for frame in 0..self.n_frames {
            for (total, c) in totals.iter_mut().zip(self.row(frame)) {
                *total += c.norm();
            }
        }
        let mut best = 0usize;
        let mut best_total = 0.0f64;
        for (i, &total) in totals.iter().enumerate() {
            if total > best_total {
                best_total = total;
                best = i;
            }
        }
        if best_total <= 0.0 {
            return Err(AnalysisError::SilentEnvelope);
        }
        Ok(self.tempos_bpm[best])
    }
}

/// Spectral-flux onset strength: log-compressed magnitude spectrogram,
/// half-wave rectified frame-to-frame difference summed over bins.
pub fn onset_envelope(
    audio: &AudioBuffer,
    config: &AnalysisConfig,
) -> Result<OnsetEnvelope, AnalysisError> {
    let window = config.window_len;
    if audio.samples.len() < window {
        return Err(AnalysisError::BufferTooShort {
            samples: audio.samples.len(),
            window,
        });
    }
    let hop = config.hop_len;
    let n_frames = audio.samples.len() / hop + 1;
    let hann: Vec<f64> = (0..window)
        .map(|n| 0.5 - 0.5 * (2.0 * std::f64::consts::PI * n as f64 / window as f64).cos())
        .collect();
    let fft = FftPlanner::new().plan_fft_forward(window);

    let n_bins = window / 2 + 1;
    let mut values = Vec::with_capacity(n_frames);
    let mut prev_log = vec![0.0f64; n_bins];
    let mut frame_buf = vec![Complex64::new(0.0, 0.0); window];
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    for frame in 0..n_frames {
        let center = frame as i64 * hop as i64;
        for (n, slot) in frame_buf.iter_mut().enumerate() {
            let idx = center - (window / 2) as i64 + n as i64;
            let sample = if idx >= 0 && (idx as usize) < audio.samples.len() {
                audio.samples[idx as usize] as f64
            } else {
                0.0
            };
            *slot = Complex64::new(sample * hann[n], 0.0);
        }
        fft.process_with_scratch(&mut frame_buf, &mut scratch);
        let mut flux = 0.0f64;
        for bin in 0..n_bins {
            let log_mag = (1.0 + 100.0 * frame_buf[bin].norm()).ln();
            if frame > 0 {
                flux += (log_mag - prev_log[bin]).max(0.0);
            }
            prev_log[bin] = log_mag;
        }
        values.push(if frame == 0 { 0.0 } else { flux });
    }
    Ok(OnsetEnvelope {
        values,
        frame_rate: config.frame_rate(),
    })
}

/// Compute the Fourier tempogram of the envelope: for every envelope frame,
/// the Hann-windowed complex coefficient at each tempo frequency of the grid.
pub fn fourier_tempogram(
    env: &OnsetEnvelope,
    config: &AnalysisConfig,
) -> Result<Tempogram, AnalysisError> {
    let tempos = config.tempo_grid()?;
    let n_frames = env.values.len();
    let window_frames = config.plp_window_frames();
    let half = (window_frames / 2) as i64;
    let hann: Vec<f64> = (0..window_frames)
        .map(|n| {
            0.5 - 0.5 * (2.0 * std::f64::consts::PI * n as f64 / window_frames as f64).cos()
        })
        .collect();

    let n_tempos = tempos.len();
    let mut coefficients = vec![Complex64::new(0.0, 0.0); n_frames * n_tempos];
    // Columns are independent; parallelize over tempo and write each column
    // into the frame-major matrix afterwards.
    let columns: Vec<Vec<Complex64>> = tempos
        .par_iter()
        .map(|&bpm| {
            let cycles_per_frame = bpm / 60.0 / env.frame_rate;
            // Envelope modulated by e^{-2*pi*i*f*j}, shared by every frame's
            // windowed sum at this tempo.
            let modulated: Vec<Complex64> = env
                .values
                .iter()
                .enumerate()
                .map(|(j, &v)| {
                    let angle = -2.0 * std::f64::consts::PI * cycles_per_frame * j as f64;
                    Complex64::from_polar(v, angle)
                })
                .collect();
            (0..n_frames)
                .map(|c| {
                    let mut acc = Complex64::new(0.0, 0.0);
                    let start = c as i64 - half;
                    for (m, &w) in hann.iter().enumerate() {
                        let j = start + m as i64;
                        if j >= 0 && (j as usize) < n_frames {
                            acc += modulated[j as usize] * w;
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect();
    for (tempo_idx, column) in columns.iter().enumerate() {
        for (frame, &c) in column.iter().enumerate() {
            coefficients[frame * n_tempos + tempo_idx] = c;
        }
    }
    Ok(Tempogram {
        coefficients,
        tempos_bpm: tempos,
        n_frames,
        frame_rate: env.frame_rate,
        window_frames,
    })
}

/// Global tempo of the strongest time-aggregated tempogram magnitude.
pub fn estimate_bpm(env: &OnsetEnvelope, config: &AnalysisConfig) -> Result<f64, AnalysisError> {
    fourier_tempogram(env, config)?.global_tempo_bpm()
}

/// Predominant-local-pulse curve: per frame, take the strongest tempo and its
/// phase, synthesize the windowed cosine kernel, overlap-add all kernels and
/// half-wave rectify.
pub fn plp_curve(env: &OnsetEnvelope, config: &AnalysisConfig) -> Result<PlpCurve, AnalysisError> {
    let tempogram = fourier_tempogram(env, config)?;
    Ok(plp_from_tempogram(&tempogram))
}

/// PLP synthesis step, reusable when the tempogram is already computed.
pub fn plp_from_tempogram(tempogram: &Tempogram) -> PlpCurve {
    let n_frames = tempogram.n_frames;
    let window_frames = tempogram.window_frames;
    let half = (window_frames / 2) as i64;
    let hann: Vec<f64> = (0..window_frames)
        .map(|n| {
            0.5 - 0.5 * (2.0 * std::f64::consts::PI * n as f64 / window_frames as f64).cos()
        })
        .collect();
    let mut values = vec![0.0f64; n_frames];
    for c in 0..n_frames {
        let row = tempogram.row(c);
        let mut best = 0usize;
        let mut best_mag = 0.0f64;
        for (i, coeff) in row.iter().enumerate() {
            let mag = coeff.norm();
            if mag > best_mag {
                best_mag = mag;
                best = i;
            }
        }
        if best_mag <= 0.0 {
            continue; // nothing periodic under this frame, no kernel
        }
        let cycles_per_frame = tempogram.tempos_bpm[best] / 60.0 / tempogram.frame_rate;
        let phase = row[best].arg();
        let start = c as i64 - half;
        for (m, &w) in hann.iter().enumerate() {
            let j = start + m as i64;
            if j >= 0 && (j as usize) < n_frames {
                let angle = 2.0 * std::f64::consts::PI * cycles_per_frame * j as f64 + phase;
                values[j as usize] += w * angle.cos();
            }
        }
    }
    for v in &mut values {
        *v = v.max(0.0);
    }
    PlpCurve {
        values,
        frame_rate: tempogram.frame_rate,
    }
}

/// Strict interior local maxima of the curve.
fn local_maxima(values: &[f64]) -> Vec<usize> {
    (1..values.len().saturating_sub(1))
        .filter(|&i| values[i - 1] < values[i] && values[i] > values[i + 1])
        .collect()
}

/// Pick peaks at least `distance` frames apart: start from all strict local
/// maxima and discard smaller peaks first until every surviving pair is far
/// enough apart. Equal heights discard the later frame first.
pub fn pick_peaks(curve: &PlpCurve, distance: usize) -> BeatPeaks {
    let distance = distance.max(1);
    let peaks = local_maxima(&curve.values);
    if distance == 1 || peaks.len() < 2 {
        return BeatPeaks {
            frames: peaks,
            distance,
        };
    }
    let mut order: Vec<usize> = (0..peaks.len()).collect();
    order.sort_by(|&a, &b| {
        curve.values[peaks[b]]
            .total_cmp(&curve.values[peaks[a]])
            .then(peaks[a].cmp(&peaks[b]))
    });
    let mut removed = vec![false; peaks.len()];
    for &idx in &order {
        if removed[idx] {
            continue;
        }
        let frame = peaks[idx];
        let mut left = idx;
        while left > 0 && frame - peaks[left - 1] < distance {
            left -= 1;
            removed[left] = true;
        }
        let mut right = idx + 1;
        while right < peaks.len() && peaks[right] - frame < distance {
            removed[right] = true;
            right += 1;
        }
    }
    BeatPeaks {
        frames: peaks
            .into_iter()
            .zip(&removed)
            .filter_map(|(frame, &gone)| (!gone).then_some(frame))
            .collect(),
        distance,
    }
}
