//! Audio decoding: WAV (PCM and float) and Ogg-Vorbis containers, mixed down
//! to mono and resampled to the analysis rate.

use std::io::Cursor;
use std::path::Path;

#[derive(Debug, thiserror::Error)]
pub enum DecodeError {
    #[error("failed to read audio: {0}")]
    Io(#[from] std::io::Error),
    #[error("unsupported container (expected RIFF/WAVE or Ogg-Vorbis)")]
    UnsupportedContainer,
    #[error("wav decode failed: {0}")]
    Wav(#[from] hound::Error),
    #[error("ogg decode failed: {0}")]
    Ogg(#[from] lewton::VorbisError),
    #[error("audio stream is empty")]
    Empty,
}

/// Mono audio at a known sample rate, samples in [-1, 1].
#[derive(Debug, Clone)]
pub struct AudioBuffer {
    pub samples: Vec<f32>,
    pub sample_rate: u32,
}

impl AudioBuffer {
    pub fn duration_seconds(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate as f64
    }
}

/// Decode a WAV or Ogg-Vorbis payload, average channels to mono, and resample
/// to `target_rate`. The container is sniffed from the leading magic bytes.
pub fn decode_audio_bytes(bytes: &[u8], target_rate: u32) -> Result<AudioBuffer, DecodeError> {
    let (samples, source_rate) = if bytes.starts_with(b"RIFF") {
        decode_wav(bytes)?
    } else if bytes.starts_with(b"OggS") {
        decode_ogg(bytes)?
    } else {
        return Err(DecodeError::UnsupportedContainer);
    };
    if samples.is_empty() {
        return Err(DecodeError::Empty);
    }
    Ok(AudioBuffer {
        samples: resample_linear(&samples, source_rate, target_rate),
        sample_rate: target_rate,
    })
}

/// Decode an audio file from disk. See [`decode_audio_bytes`].
pub fn decode_audio(path: impl AsRef<Path>, target_rate: u32) -> Result<AudioBuffer, DecodeError> {
    let bytes = std::fs::read(path)?;
    decode_audio_bytes(&bytes, target_rate)
}

fn decode_wav(bytes: &[u8]) -> Result<(Vec<f32>, u32), DecodeError> {
    let mut reader = hound::WavReader::new(Cursor::new(bytes))?;
    let spec = reader.spec();
    let channels = spec.channels.max(1) as usize;
    let interleaved: Vec<f32> = match spec.sample_format {
        hound::SampleFormat::Float => reader
            .samples::<f32>()
            .collect::<Result<Vec<_>, _>>()?,
        hound::SampleFormat::Int => {
            let scale = 1.0 / ((1i64 << (spec.bits_per_sample - 1)) as f32);
            reader
                .samples::<i32>()
                .map(|s| s.map(|v| v as f32 * scale))
                .collect::<Result<Vec<_>, _>>()?
        }
    };
    Ok((mix_to_mono(&interleaved, channels), spec.sample_rate))
}

fn decode_ogg(bytes: &[u8]) -> Result<(Vec<f32>, u32), DecodeError> {
    let mut reader = lewton::inside_ogg::OggStreamReader::new(Cursor::new(bytes))?;
    let channels = reader.ident_hdr.audio_channels.max(1) as usize;
    let rate = reader.ident_hdr.audio_sample_rate;
    let mut interleaved: Vec<f32> = Vec::new();
    while let Some(packet) = reader.read_dec_packet_itl()? {
        interleaved.extend(packet.iter().map(|&s| s as f32 / 32768.0));
    }
    Ok((mix_to_mono(&interleaved, channels), rate))
}

fn mix_to_mono(interleaved: &[f32], channels: usize) -> Vec<f32> {
    if channels == 1 {
        return interleaved.to_vec();
    }
    interleaved
        .chunks_exact(channels)
        .map(|frame| frame.iter().sum::<f32>() / channels as f32)
        .collect()
}

/// Linear-interpolation resampler. Adequate for onset analysis, where the
/// envelope lives far below the Nyquist limit of either rate.
fn resample_linear(samples: &[f32], source_rate: u32, target_rate: u32) -> Vec<f32> {
    if source_rate == target_rate {
        return samples.to_vec();
    }
    let out_len = ((samples.len() as u64 * target_rate as u64) / source_rate as u64) as usize;
    let step = source_rate as f64 / target_rate as f64;
    (0..out_len)
        .map(|i| {
            let pos = i as f64 * step;
            let left = pos as usize;
            let frac = (pos - left as f64) as f32;
            let a = samples[left.min(samples.len() - 1)];
            let b = samples[(left + 1).min(samples.len() - 1)];
            a + (b - a) * frac
        })
        .collect()
}
