#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "huffdrift/types.hpp"

namespace huffdrift {

// Decoded mono PCM audio, samples scaled to [-1, 1].
struct AudioData {
    std::vector<double> samples;
    int sample_rate = 0;
};

// Reads a RIFF/WAVE file containing 16-bit PCM mono audio. Anything else
// (extra channels, other bit depths or codecs, truncated headers) throws
// std::runtime_error naming the offending format field.
AudioData read_wav_mono16(const std::string& path);

// One frame of audio; length is round(frame_seconds * sample_rate).
struct AudioFrame {
    std::vector<double> samples;
    int sample_rate = 0;
    double start_time = 0.0;
};

// Splits audio into non-overlapping frames, dropping a trailing partial one.
std::vector<AudioFrame> split_frames(const AudioData& audio, double frame_seconds);

struct FeatureConfig {
    int mfcc_coeffs = 13;      // DCT-II coefficients 1..13 (0th dropped)
    int mel_filters = 26;      // triangular filters spanning 0 Hz..Nyquist
    double log_floor = 1e-10;  // floor inside log for filter energies and energy
};

// Frame-level features: [mfcc_1..mfcc_13, log_energy, zcr].
//
// Recipe: Hamming window over the whole frame, zero-padded to the next
// power-of-two FFT, power spectrum through the mel filterbank, log with
// floor, DCT-II keeping coefficients 1..13. Energy is log(sum s^2 + floor)
// over the raw samples; zcr counts sign changes normalized by length-1.
class FeatureExtractor {
public:
    explicit FeatureExtractor(FeatureConfig config = {});

    FeatureVec extract(const AudioFrame& frame);
    int dimension() const { return config_.mfcc_coeffs + 2; }
    const FeatureConfig& config() const { return config_; }

private:
    void prepare(int frame_len, int sample_rate);

    FeatureConfig config_;
    int frame_len_ = 0;
    int sample_rate_ = 0;
    int fft_size_ = 0;
    std::vector<double> window_;
    std::vector<std::vector<std::pair<int, double>>> filterbank_; // per filter: (bin, weight)
};

// Streaming per-dimension z-scaling. normalize() scales with the statistics
// accumulated before the incoming vector, then folds the vector in. The very
// first vector comes back as all zeros.
class OnlineNormalizer {
public:
    explicit OnlineNormalizer(int dimension);

    FeatureVec normalize(const FeatureVec& v);
    long count() const { return count_; }
    int dimension() const { return static_cast<int>(mean_.size()); }

private:
    long count_ = 0;
    std::vector<double> mean_;
    std::vector<double> m2_; // sum of squared deviations (Welford)
};

// A window of consecutive frames scored as one event.
struct EventWindow {
    int first_frame = 0; // 0-based index into the frame stream
    int frames = 0;
};

// Sliding event windows: [k*step, k*step + event_frames) for every k that
// fits. Defaults elsewhere are 8 frames per event, step 4 (50% overlap).
std::vector<EventWindow> window_events(int frame_count, int event_frames, int step_frames);

// Radix-2 FFT helpers shared by the extractor (n must be a power of two).
void fft_real(const std::vector<double>& input, std::vector<double>& re, std::vector<double>& im);
int next_pow2(int n);

}  // namespace huffdrift
