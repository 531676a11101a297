#include "huffdrift/features.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace huffdrift {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::uint32_t read_u32(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t read_u16(const unsigned char* p) {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

}  // namespace

AudioData read_wav_mono16(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open WAV file: " + path);
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
    if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
        std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
        throw std::runtime_error("WAV parse error: missing RIFF/WAVE header in " + path);

    bool have_fmt = false;
    std::uint16_t format = 0, channels = 0, bits = 0;
    std::uint32_t rate = 0;
    std::size_t data_off = 0, data_len = 0;

    std::size_t pos = 12;
    while (pos + 8 <= bytes.size()) {
        const unsigned char* chunk = bytes.data() + pos;
        std::uint32_t size = read_u32(chunk + 4);
        std::size_t body = pos + 8;
        if (body + size > bytes.size())
            throw std::runtime_error("WAV parse error: truncated chunk at byte " +
                                     std::to_string(pos));
        if (std::memcmp(chunk, "fmt ", 4) == 0) {
            if (size < 16) throw std::runtime_error("WAV parse error: fmt chunk too short");
            format = read_u16(bytes.data() + body);
            channels = read_u16(bytes.data() + body + 2);
            rate = read_u32(bytes.data() + body + 4);
            bits = read_u16(bytes.data() + body + 14);
            have_fmt = true;
        } else if (std::memcmp(chunk, "data", 4) == 0) {
            data_off = body;
            data_len = size;
        }
        pos = body + size + (size & 1); // chunks are word aligned
    }
    if (!have_fmt) throw std::runtime_error("WAV parse error: no fmt chunk");
    if (data_off == 0) throw std::runtime_error("WAV parse error: no data chunk");
    if (format != 1)
        throw std::runtime_error("unsupported WAV format tag " + std::to_string(format) +
                                 " (need PCM=1)");
    if (channels != 1)
        throw std::runtime_error("unsupported WAV channel count " + std::to_string(channels) +
                                 " (need mono)");
    if (bits != 16)
        throw std::runtime_error("unsupported WAV bit depth " + std::to_string(bits) +
                                 " (need 16)");
    if (rate == 0) throw std::runtime_error("WAV parse error: zero sample rate");

    AudioData out;
    out.sample_rate = static_cast<int>(rate);
    std::size_t n = data_len / 2;
    out.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const unsigned char* p = bytes.data() + data_off + 2 * i;
        auto s = static_cast<std::int16_t>(p[0] | (p[1] << 8));
        out.samples[i] = static_cast<double>(s) / 32768.0;
    }
    return out;
}

std::vector<AudioFrame> split_frames(const AudioData& audio, double frame_seconds) {
    if (audio.sample_rate <= 0) throw std::invalid_argument("split_frames: bad sample rate");
    auto frame_len = static_cast<std::size_t>(std::lround(frame_seconds * audio.sample_rate));
    if (frame_len == 0) throw std::invalid_argument("split_frames: frame too short");
    std::vector<AudioFrame> frames;
    std::size_t count = audio.samples.size() / frame_len;
    frames.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        AudioFrame f;
        f.samples.assign(audio.samples.begin() + static_cast<std::ptrdiff_t>(i * frame_len),
                         audio.samples.begin() + static_cast<std::ptrdiff_t>((i + 1) * frame_len));
        f.sample_rate = audio.sample_rate;
        f.start_time = static_cast<double>(i * frame_len) / audio.sample_rate;
        frames.push_back(std::move(f));
    }
    return frames;
}

int next_pow2(int n) {
    int p = 1;
    while (p < n) p <<= 1;
    return p;
}

void fft_real(const std::vector<double>& input, std::vector<double>& re, std::vector<double>& im) {
    std::size_t n = input.size();
    if (n == 0 || (n & (n - 1)) != 0)
        throw std::invalid_argument("fft_real: size must be a power of two");
    re = input;
    im.assign(n, 0.0);

    // Bit-reversal permutation.
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(re[i], re[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        double ang = -2.0 * kPi / static_cast<double>(len);
        double wr = std::cos(ang), wi = std::sin(ang);
        for (std::size_t i = 0; i < n; i += len) {
            double cr = 1.0, ci = 0.0;
            for (std::size_t k = 0; k < len / 2; ++k) {
                std::size_t a = i + k, b = i + k + len / 2;
                double tr = re[b] * cr - im[b] * ci;
                double ti = re[b] * ci + im[b] * cr;
                re[b] = re[a] - tr;
                im[b] = im[a] - ti;
                re[a] += tr;
                im[a] += ti;
                double ncr = cr * wr - ci * wi;
                ci = cr * wi + ci * wr;
                cr = ncr;
            }
        }
    }
}

FeatureExtractor::FeatureExtractor(FeatureConfig config) : config_(config) {
    if (config_.mfcc_coeffs < 1 || config_.mel_filters < config_.mfcc_coeffs)
        throw std::invalid_argument("FeatureExtractor: bad coefficient/filter counts");
}

void FeatureExtractor::prepare(int frame_len, int sample_rate) {
    if (frame_len == frame_len_ && sample_rate == sample_rate_) return;
    frame_len_ = frame_len;
    sample_rate_ = sample_rate;
    fft_size_ = next_pow2(frame_len);

    window_.resize(static_cast<std::size_t>(frame_len));
    for (int i = 0; i < frame_len; ++i)
        window_[static_cast<std::size_t>(i)] =
            0.54 - 0.46 * std::cos(2.0 * kPi * i / (frame_len - 1));

    // Triangular filters with mel-equidistant vertices; fractional bin
    // positions keep every filter non-degenerate.
    int m = config_.mel_filters;
    double mel_hi = hz_to_mel(sample_rate / 2.0);
    std::vector<double> bin(static_cast<std::size_t>(m) + 2);
    for (int j = 0; j <= m + 1; ++j) {
        double hz = mel_to_hz(mel_hi * j / (m + 1));
        bin[static_cast<std::size_t>(j)] = hz * fft_size_ / sample_rate;
    }
    filterbank_.assign(static_cast<std::size_t>(m), {});
    for (int f = 1; f <= m; ++f) {
        double lo = bin[static_cast<std::size_t>(f - 1)];
        double mid = bin[static_cast<std::size_t>(f)];
        double hi = bin[static_cast<std::size_t>(f + 1)];
        auto& taps = filterbank_[static_cast<std::size_t>(f - 1)];
        for (int k = static_cast<int>(std::ceil(lo)); k <= fft_size_ / 2; ++k) {
            if (k > hi) break;
            double w = (k <= mid) ? (k - lo) / (mid - lo) : (hi - k) / (hi - mid);
            if (w > 0.0) taps.emplace_back(k, w);
        }
    }
}

FeatureVec FeatureExtractor::extract(const AudioFrame& frame) {
    int len = static_cast<int>(frame.samples.size());
    if (len < 2) throw std::invalid_argument("extract: frame shorter than analysis window");
    prepare(len, frame.sample_rate);

    std::vector<double> padded(static_cast<std::size_t>(fft_size_), 0.0);
    for (int i = 0; i < len; ++i)
        padded[static_cast<std::size_t>(i)] =
            frame.samples[static_cast<std::size_t>(i)] * window_[static_cast<std::size_t>(i)];

    std::vector<double> re, im;
    fft_real(padded, re, im);
    std::vector<double> power(static_cast<std::size_t>(fft_size_ / 2 + 1));
    for (int k = 0; k <= fft_size_ / 2; ++k) {
        auto ku = static_cast<std::size_t>(k);
        power[ku] = re[ku] * re[ku] + im[ku] * im[ku];
    }

    int m = config_.mel_filters;
    std::vector<double> logmel(static_cast<std::size_t>(m));
    for (int f = 0; f < m; ++f) {
        double e = 0.0;
        for (const auto& [k, w] : filterbank_[static_cast<std::size_t>(f)])
            e += w * power[static_cast<std::size_t>(k)];
        logmel[static_cast<std::size_t>(f)] = std::log(std::max(e, config_.log_floor));
    }

    FeatureVec out(static_cast<std::size_t>(dimension()));
    for (int j = 1; j <= config_.mfcc_coeffs; ++j) {
        double c = 0.0;
        for (int i = 0; i < m; ++i)
            c += logmel[static_cast<std::size_t>(i)] * std::cos(kPi * j * (i + 0.5) / m);
        out[static_cast<std::size_t>(j - 1)] = c;
    }

    double energy = 0.0;
    for (double s : frame.samples) energy += s * s;
    out[static_cast<std::size_t>(config_.mfcc_coeffs)] = std::log(energy + config_.log_floor);

    int crossings = 0;
    for (int i = 0; i + 1 < len; ++i) {
        bool a = frame.samples[static_cast<std::size_t>(i)] >= 0.0;
        bool b = frame.samples[static_cast<std::size_t>(i + 1)] >= 0.0;
        if (a != b) ++crossings;
    }
    out[static_cast<std::size_t>(config_.mfcc_coeffs) + 1] =
        static_cast<double>(crossings) / (len - 1);
    return out;
}

OnlineNormalizer::OnlineNormalizer(int dimension) {
    if (dimension < 1) throw std::invalid_argument("OnlineNormalizer: dimension must be >= 1");
    mean_.assign(static_cast<std::size_t>(dimension), 0.0);
    m2_.assign(static_cast<std::size_t>(dimension), 0.0);
}

FeatureVec OnlineNormalizer::normalize(const FeatureVec& v) {
    if (v.size() != mean_.size())
        throw std::invalid_argument("normalize: dimension mismatch");
    FeatureVec out(v.size(), 0.0);
    if (count_ > 0) {
        for (std::size_t i = 0; i < v.size(); ++i) {
            double sd = std::sqrt(m2_[i] / static_cast<double>(count_));
            out[i] = (v[i] - mean_[i]) / (sd + 1e-8);
        }
    }
    ++count_;
    for (std::size_t i = 0; i < v.size(); ++i) {
        double delta = v[i] - mean_[i];
        mean_[i] += delta / static_cast<double>(count_);
        m2_[i] += delta * (v[i] - mean_[i]);
    }
    return out;
}

std::vector<EventWindow> window_events(int frame_count, int event_frames, int step_frames) {
    if (event_frames < 1) throw std::invalid_argument("window_events: event_frames must be >= 1");
    if (step_frames < 1 || step_frames > event_frames)
        throw std::invalid_argument("window_events: need 1 <= step_frames <= event_frames");
    std::vector<EventWindow> out;
    for (int start = 0; start + event_frames <= frame_count; start += step_frames)
        out.push_back({start, event_frames});
    return out;
}

}  // namespace huffdrift
