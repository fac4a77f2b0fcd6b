#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <vector>

#include "walshlink/codebook.hpp"
#include "walshlink/common.hpp"
#include "walshlink/waveform.hpp"

namespace walshlink::receiver {

using codebook::ChipSequence;
using codebook::Codebook;
using waveform::BasebandSignal;
using waveform::Complex;
using waveform::ModulationScheme;

/// One transmitted block in the chip domain: the doubled sync pattern (sync
/// code then its complement, 2N chips, zero net sum) followed by the payload
/// symbols.
struct Frame {
    ChipSequence sync_chips;
    std::vector<ChipSequence> payload;
};

struct SyncResult {
    int sample_offset = -1;
    double peak_metric = 0;  // raw correlation magnitude; a clean aligned frame scores 2N
    bool detected = false;
};

struct Decision {
    uint32_t word = 0;
    int code_index = 0;
    bool complement_flag = false;
    double metric = 0;  // signed correlation of the winning code
};

struct CarrierEstimate {
    double freq_hz = 0;
    double phase = 0;  // residual at the sync start; meaningful for BPSK only
};

struct ReceiverConfig {
    int search_window = 1;         // candidate sync offsets [0, search_window)
    double threshold = 0.5;        // sync declared above threshold * 2N
    bool estimate_carrier = false; // sync-aided derotation before the chip demap
    bool hard_chips = false;       // clamp chip estimates to +/-1 before correlating
};

struct SyncLossError : std::runtime_error {
    SyncLossError() : std::runtime_error("receiver: sync not detected") {}
};

inline Frame make_frame(const Codebook& cb, const std::vector<uint32_t>& payload_words) {
    if (payload_words.empty()) throw std::invalid_argument("make_frame: empty payload");
    if (!cb.sync_code) throw std::invalid_argument("make_frame: codebook has no sync code");
    Frame f;
    f.sync_chips = *cb.sync_code;
    for (int v : *cb.sync_code) f.sync_chips.push_back(-v);
    f.payload.reserve(payload_words.size());
    for (uint32_t w : payload_words) f.payload.push_back(codebook::encode_bits(cb, w));
    return f;
}

inline ChipSequence frame_chips(const Frame& f) {
    ChipSequence chips = f.sync_chips;
    for (const ChipSequence& sym : f.payload) chips.insert(chips.end(), sym.begin(), sym.end());
    return chips;
}

/// Modulated frame: doubled sync pattern, then one code per payload word.
inline BasebandSignal build_frame(const Codebook& cb, const std::vector<uint32_t>& payload_words,
                                  const ModulationScheme& scheme) {
    return waveform::modulate(frame_chips(make_frame(cb, payload_words)), scheme);
}

namespace detail {

/// Phase advance into sample j. The sample before the record is taken as
/// 1+0i, the modulator's reference, so increment 0 is exact for an undelayed
/// frame; across a zero prefix arg(0) = 0, which only grazes the first sync
/// chip of a delayed frame.
inline double phase_increment(const std::vector<Complex>& s, size_t j) {
    const Complex prev = j == 0 ? Complex{1.0, 0.0} : s[j - 1];
    return std::arg(s[j] * std::conj(prev));
}

inline ChipSequence doubled_sync(const Codebook& cb) {
    ChipSequence ref = *cb.sync_code;
    for (int v : *cb.sync_code) ref.push_back(-v);
    return ref;
}

}  // namespace detail

/// Slide the known 2N-chip sync reference across candidate sample offsets and
/// pick the maximum correlation magnitude. Chip estimates are unit-scaled for
/// both schemes, so a clean aligned frame scores exactly 2N and the detection
/// threshold is theta * 2N. The correlation is left unnormalized on purpose:
/// a balanced reference nulls narrowband interference in the sum itself,
/// while an RMS denominator would let strong interference suppress the peak.
inline SyncResult acquire_sync(const BasebandSignal& sig, const Codebook& cb,
                               const ModulationScheme& scheme, int search_window,
                               double threshold = 0.5) {
    waveform::validate(scheme);
    if (!cb.sync_code) throw std::invalid_argument("acquire_sync: codebook has no sync code");
    if (search_window < 1) throw std::invalid_argument("acquire_sync: empty search window");
    const int sps = scheme.samples_per_chip;
    const int n_sync = 2 * cb.order;
    const size_t span = static_cast<size_t>(n_sync) * static_cast<size_t>(sps);
    if (span + static_cast<size_t>(search_window) - 1 > sig.samples.size())
        throw std::invalid_argument("acquire_sync: search window exceeds the signal");

    const ChipSequence ref = detail::doubled_sync(cb);
    const bool cpfsk = scheme.kind == ModulationScheme::Kind::cpfsk;
    std::vector<double> inc;
    if (cpfsk) {
        inc.resize(sig.samples.size());
        for (size_t j = 0; j < sig.samples.size(); ++j)
            inc[j] = detail::phase_increment(sig.samples, j);
    }
    const double unit = std::numbers::pi * scheme.h;

    SyncResult best;
    best.peak_metric = -1.0;
    for (int d = 0; d < search_window; ++d) {
        double metric = 0.0;
        if (cpfsk) {
            double num = 0.0;
            for (int c = 0; c < n_sync; ++c) {
                double acc = 0.0;
                const size_t base = static_cast<size_t>(d) + static_cast<size_t>(c) * sps;
                for (int n = 0; n < sps; ++n) acc += inc[base + static_cast<size_t>(n)];
                num += ref[static_cast<size_t>(c)] * (acc / unit);
            }
            metric = std::abs(num);
        } else {
            Complex num{0.0, 0.0};
            for (int c = 0; c < n_sync; ++c) {
                Complex acc{0.0, 0.0};
                const size_t base = static_cast<size_t>(d) + static_cast<size_t>(c) * sps;
                for (int n = 0; n < sps; ++n) acc += sig.samples[base + static_cast<size_t>(n)];
                num += static_cast<double>(ref[static_cast<size_t>(c)]) *
                       (acc / static_cast<double>(sps));
            }
            metric = std::abs(num);
        }
        if (metric > best.peak_metric) {
            best.peak_metric = metric;
            best.sample_offset = d;
        }
    }
    best.detected = best.peak_metric > threshold * (2.0 * cb.order);
    return best;
}

/// Sync-aided carrier error fit over the 2N-chip sync span. CPFSK averages
/// the deviation of every sample-to-sample phase advance from its known
/// value; BPSK can only use within-chip advances (chip edges carry data
/// flips) and recovers the residual phase from the sign-stripped correlation.
inline CarrierEstimate estimate_carrier(const BasebandSignal& sig, int sync_offset,
                                        const Codebook& cb, const ModulationScheme& scheme) {
    waveform::validate(scheme);
    if (!cb.sync_code) throw std::invalid_argument("estimate_carrier: codebook has no sync code");
    const int sps = scheme.samples_per_chip;
    const int n_sync = 2 * cb.order;
    const size_t off = static_cast<size_t>(sync_offset);
    if (sync_offset < 0 ||
        off + static_cast<size_t>(n_sync) * static_cast<size_t>(sps) > sig.samples.size())
        throw std::invalid_argument("estimate_carrier: sync span out of range");

    const ChipSequence ref = detail::doubled_sync(cb);
    const double fs = sig.sample_rate;
    CarrierEstimate est;
    if (scheme.kind == ModulationScheme::Kind::cpfsk) {
        const double step = std::numbers::pi * scheme.h / sps;
        double acc = 0.0;
        int count = 0;
        for (int c = 0; c < n_sync; ++c)
            for (int n = 0; n < sps; ++n) {
                const size_t j = off + static_cast<size_t>(c) * sps + static_cast<size_t>(n);
                if (j == off && sync_offset > 0) continue;  // advance across the zero prefix
                acc += detail::phase_increment(sig.samples, j) - ref[static_cast<size_t>(c)] * step;
                ++count;
            }
        est.freq_hz = acc / count * fs / (2.0 * std::numbers::pi);
    } else {
        double acc = 0.0;
        int count = 0;
        for (int c = 0; c < n_sync; ++c)
            for (int n = 1; n < sps; ++n) {
                acc += detail::phase_increment(
                    sig.samples, off + static_cast<size_t>(c) * sps + static_cast<size_t>(n));
                ++count;
            }
        est.freq_hz = acc / count * fs / (2.0 * std::numbers::pi);
        const double wr = 2.0 * std::numbers::pi * est.freq_hz / fs;
        Complex z{0.0, 0.0};
        for (int c = 0; c < n_sync; ++c) {
            Complex m{0.0, 0.0};
            for (int n = 0; n < sps; ++n) {
                const size_t j = off + static_cast<size_t>(c) * sps + static_cast<size_t>(n);
                m += sig.samples[j] * std::polar(1.0, -wr * static_cast<double>(j - off));
            }
            z += static_cast<double>(ref[static_cast<size_t>(c)]) * m;
        }
        est.phase = std::arg(z);
    }
    return est;
}

/// Correlation of the chip estimates against every data code.
inline std::vector<double> symbol_correlations(const std::vector<double>& chip_estimates,
                                               const Codebook& cb) {
    if (chip_estimates.size() != static_cast<size_t>(cb.order))
        throw std::invalid_argument("symbol_correlations: expected N chip estimates");
    std::vector<double> corr(cb.data_codes.size());
    for (size_t j = 0; j < cb.data_codes.size(); ++j) {
        const ChipSequence& code = cb.data_codes[j];
        double acc = 0.0;
        for (size_t c = 0; c < code.size(); ++c) acc += chip_estimates[c] * code[c];
        corr[j] = acc;
    }
    return corr;
}

/// Argmax of |correlation| with the lowest code index breaking exact ties;
/// the sign picks the complement half of the constellation.
inline Decision decide(const std::vector<double>& correlations, const Codebook& cb) {
    if (correlations.size() != cb.data_codes.size())
        throw std::invalid_argument("decide: one correlation per data code required");
    size_t best = 0;
    for (size_t j = 1; j < correlations.size(); ++j)
        if (std::abs(correlations[j]) > std::abs(correlations[best])) best = j;
    Decision d;
    d.code_index = static_cast<int>(best);
    d.complement_flag = correlations[best] < 0;
    d.metric = correlations[best];
    d.word = static_cast<uint32_t>(best);
    if (d.complement_flag) d.word |= 1u << (cb.bits_per_symbol - 1);
    return d;
}

inline Decision demodulate_symbol(const std::vector<double>& chip_estimates, const Codebook& cb) {
    return decide(symbol_correlations(chip_estimates, cb), cb);
}

struct FrameResult {
    SyncResult sync;
    double carrier_offset_hat = 0;  // Hz
    std::vector<Decision> decisions;
    std::vector<std::vector<double>> correlations;  // per symbol, one per data code

    std::vector<uint32_t> words() const {
        std::vector<uint32_t> w;
        w.reserve(decisions.size());
        for (const Decision& d : decisions) w.push_back(d.word);
        return w;
    }
};

/// Full frame chain: acquire sync, optionally fit the carrier error, reduce
/// the payload to per-chip soft estimates (BPSK: derotated per-chip mean real
/// part; CPFSK: per-chip phase advance scaled to +/-1), then run the
/// correlator bank on every symbol. Throws SyncLossError when no candidate
/// offset clears the detection threshold.
inline FrameResult demodulate_frame(const BasebandSignal& sig, const Codebook& cb,
                                    const ModulationScheme& scheme, const ReceiverConfig& cfg) {
    FrameResult res;
    res.sync = acquire_sync(sig, cb, scheme, cfg.search_window, cfg.threshold);
    if (!res.sync.detected) throw SyncLossError{};

    const int sps = scheme.samples_per_chip;
    const int n = cb.order;
    const size_t off = static_cast<size_t>(res.sync.sample_offset);
    const size_t payload_start = off + static_cast<size_t>(2 * n) * static_cast<size_t>(sps);
    const size_t sym_span = static_cast<size_t>(n) * static_cast<size_t>(sps);
    if (payload_start + sym_span > sig.samples.size())
        throw std::invalid_argument("demodulate_frame: no payload symbol after the sync span");
    const size_t n_syms = (sig.samples.size() - payload_start) / sym_span;

    CarrierEstimate carrier;
    if (cfg.estimate_carrier) carrier = estimate_carrier(sig, res.sync.sample_offset, cb, scheme);
    res.carrier_offset_hat = carrier.freq_hz;

    const size_t n_chips = n_syms * static_cast<size_t>(n);
    std::vector<double> est(n_chips);
    if (scheme.kind == ModulationScheme::Kind::bpsk) {
        const double wr = 2.0 * std::numbers::pi * carrier.freq_hz / sig.sample_rate;
        const bool rotate = wr != 0.0 || carrier.phase != 0.0;
        for (size_t c = 0; c < n_chips; ++c) {
            Complex acc{0.0, 0.0};
            const size_t base = payload_start + c * static_cast<size_t>(sps);
            if (rotate) {
                for (int k = 0; k < sps; ++k) {
                    const size_t j = base + static_cast<size_t>(k);
                    acc += sig.samples[j] *
                           std::polar(1.0, -(wr * static_cast<double>(j - off) + carrier.phase));
                }
            } else {
                for (int k = 0; k < sps; ++k) acc += sig.samples[base + static_cast<size_t>(k)];
            }
            est[c] = acc.real() / sps;
        }
    } else {
        const double unit = std::numbers::pi * scheme.h;
        const double bias = 2.0 * std::numbers::pi * carrier.freq_hz / sig.sample_rate;
        for (size_t c = 0; c < n_chips; ++c) {
            double acc = 0.0;
            const size_t base = payload_start + c * static_cast<size_t>(sps);
            for (int k = 0; k < sps; ++k)
                acc += detail::phase_increment(sig.samples, base + static_cast<size_t>(k));
            est[c] = (acc - sps * bias) / unit;
        }
    }
    if (cfg.hard_chips)
        for (double& e : est) e = e < 0 ? -1.0 : 1.0;

    res.decisions.reserve(n_syms);
    res.correlations.reserve(n_syms);
    std::vector<double> sym(static_cast<size_t>(n));
    for (size_t s = 0; s < n_syms; ++s) {
        std::copy(est.begin() + static_cast<long>(s * static_cast<size_t>(n)),
                  est.begin() + static_cast<long>((s + 1) * static_cast<size_t>(n)), sym.begin());
        std::vector<double> corr = symbol_correlations(sym, cb);
        res.decisions.push_back(decide(corr, cb));
        res.correlations.push_back(std::move(corr));
    }
    return res;
}

struct ToneProbe {
    double power_ratio = 1.0;  // S_ni / S
    int trials = 20000;
    uint64_t seed = 1;
};

/// Monte Carlo measure of how much a single tone is suppressed by the
/// despreading correlator: input tone power over its leakage into the
/// normalized decision variable, in dB. Tone frequency is drawn uniformly in
/// cycles-per-chip and the phase uniformly in [0, 2pi), so the expectation
/// over the code set is exactly 10 log10(N).
inline double despreading_gain_probe(const Codebook& cb, const ToneProbe& probe) {
    if (probe.trials < 1) throw std::invalid_argument("despreading_gain_probe: trials must be positive");
    if (!(probe.power_ratio > 0))
        throw std::invalid_argument("despreading_gain_probe: power_ratio must be positive");
    Rng rng(splitmix64(probe.seed));
    const double amp = std::sqrt(probe.power_ratio);
    double pre = 0.0, post = 0.0;
    for (int t = 0; t < probe.trials; ++t) {
        const ChipSequence& code = cb.data_codes[static_cast<size_t>(t) % cb.data_codes.size()];
        const size_t n = code.size();
        const double f = rng.uniform();
        const double phi = 2.0 * std::numbers::pi * rng.uniform();
        double rho = 0.0;
        for (size_t c = 0; c < n; ++c) {
            const double e = amp * std::cos(2.0 * std::numbers::pi * f * static_cast<double>(c) + phi);
            pre += e * e;
            rho += e * code[c];
        }
        rho /= static_cast<double>(n);
        post += rho * rho;
    }
    pre /= static_cast<double>(probe.trials) * static_cast<double>(cb.order);
    post /= static_cast<double>(probe.trials);
    return linear_to_db(pre / post);
}

/// MSB-first packing of a bit stream into K-bit words; a short tail is
/// zero-padded.
inline std::vector<uint32_t> words_from_bits(const std::vector<uint8_t>& bits,
                                             int bits_per_symbol) {
    if (bits_per_symbol < 1 || bits_per_symbol > 30)
        throw std::invalid_argument("words_from_bits: bits_per_symbol out of range");
    const size_t k = static_cast<size_t>(bits_per_symbol);
    std::vector<uint32_t> words((bits.size() + k - 1) / k, 0u);
    for (size_t i = 0; i < bits.size(); ++i)
        if (bits[i]) words[i / k] |= 1u << (k - 1 - i % k);
    return words;
}

/// Inverse of words_from_bits, truncated to n_bits.
inline std::vector<uint8_t> bits_from_words(const std::vector<uint32_t>& words,
                                            int bits_per_symbol, size_t n_bits) {
    if (bits_per_symbol < 1 || bits_per_symbol > 30)
        throw std::invalid_argument("bits_from_words: bits_per_symbol out of range");
    const size_t k = static_cast<size_t>(bits_per_symbol);
    if (n_bits > words.size() * k)
        throw std::invalid_argument("bits_from_words: not enough words for n_bits");
    std::vector<uint8_t> bits(n_bits);
    for (size_t i = 0; i < n_bits; ++i)
        bits[i] = static_cast<uint8_t>((words[i / k] >> (k - 1 - i % k)) & 1u);
    return bits;
}

}  // namespace walshlink::receiver
