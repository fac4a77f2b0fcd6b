#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <vector>

#include "walshlink/common.hpp"
#include "walshlink/waveform.hpp"

namespace walshlink::channel {

using waveform::BasebandSignal;
using waveform::Complex;

struct Interferer {
    enum class Kind { tone, filtered_noise };
    double center_offset = 0;  // Hz from the carrier
    double power_ratio = 0;    // S_ni / S, linear
    double bandwidth = 1;      // occupied Hz, used by the filtered-noise kind
    Kind kind = Kind::tone;
};

/// One channel realization. EbN0 absent means noise-free; seed fixes every
/// random draw, so identical configs impair identically.
struct ChannelConfig {
    std::optional<double> ebn0_db;
    std::vector<Interferer> interferers;
    double carrier_offset = 0;  // Hz
    int timing_offset = 0;      // whole samples of delay
    uint64_t seed = 0;
};

struct OccupancyReport {
    double p = 0;  // fraction of W covered, clamped to [0, 1]
};

inline OccupancyReport occupancy(const std::vector<Interferer>& interferers, double W,
                                 double spacing_W_ni) {
    if (!(W > 0)) throw std::invalid_argument("occupancy: W must be positive");
    const double p = static_cast<double>(interferers.size()) * spacing_W_ni / W;
    return {std::clamp(p, 0.0, 1.0)};
}

/// Uniformly spaced interferer population spanning W, symmetric about the
/// carrier: count slices of width W/count, one interferer at each center.
inline std::vector<Interferer> place_interferers(int count, double W, double W_ni,
                                                 double power_ratio, Interferer::Kind kind,
                                                 uint64_t) {
    if (count < 0) throw std::invalid_argument("place_interferers: negative count");
    if (!(W > 0)) throw std::invalid_argument("place_interferers: W must be positive");
    std::vector<Interferer> out;
    out.reserve(static_cast<size_t>(count));
    for (int i = 0; i < count; ++i) {
        Interferer intf;
        intf.center_offset = (i - (count - 1) / 2.0) * (W / count);
        intf.power_ratio = power_ratio;
        intf.bandwidth = W_ni;
        intf.kind = kind;
        out.push_back(intf);
    }
    return out;
}

/// Impair a signal: delay by timing_offset samples, rotate by the carrier
/// offset, add each interferer, then AWGN sized from EbN0 and E_b. The
/// desired-signal power S is measured from the input so interferer levels
/// stay calibrated against whatever the modulator produced; a silent input
/// falls back to S = 1 for interferer-only measurements.
inline BasebandSignal apply(const BasebandSignal& in, const ChannelConfig& cfg, double e_b) {
    if (in.samples.empty()) throw std::invalid_argument("channel: empty input signal");
    if (cfg.timing_offset < 0) throw std::invalid_argument("channel: negative timing offset");
    const double fs = in.sample_rate;
    const size_t n_out = in.samples.size() + static_cast<size_t>(cfg.timing_offset);

    double s_pow = 0.0;
    for (const Complex& s : in.samples) s_pow += std::norm(s);
    s_pow /= static_cast<double>(in.samples.size());
    if (s_pow <= 0.0) s_pow = 1.0;

    BasebandSignal out;
    out.sample_rate = fs;
    out.samples.assign(n_out, Complex{0.0, 0.0});

    const double rot = 2.0 * std::numbers::pi * cfg.carrier_offset / fs;
    for (size_t i = 0; i < in.samples.size(); ++i) {
        const size_t j = i + static_cast<size_t>(cfg.timing_offset);
        const double ang = rot * static_cast<double>(j);
        out.samples[j] = in.samples[i] * Complex{std::cos(ang), std::sin(ang)};
    }

    for (size_t k = 0; k < cfg.interferers.size(); ++k) {
        const Interferer& intf = cfg.interferers[k];
        if (intf.power_ratio < 0)
            throw std::invalid_argument("channel: negative interferer power ratio");
        if (intf.power_ratio == 0) continue;
        Rng rng(splitmix64(cfg.seed ^ (0x1f123bb5u + 0x100000001b3ull * k)));
        const double target = intf.power_ratio * s_pow;
        const double w = 2.0 * std::numbers::pi * intf.center_offset / fs;
        if (intf.kind == Interferer::Kind::tone) {
            const double amp = std::sqrt(target);
            const double phi = 2.0 * std::numbers::pi * rng.uniform();
            for (size_t j = 0; j < n_out; ++j) {
                const double ang = w * static_cast<double>(j) + phi;
                out.samples[j] += amp * Complex{std::cos(ang), std::sin(ang)};
            }
        } else {
            if (!(intf.bandwidth > 0))
                throw std::invalid_argument("channel: filtered-noise interferer needs bandwidth");
            // white complex noise through a length-L moving average, L sized so
            // the averaged process occupies roughly `bandwidth` Hz
            const int len = std::max(1, static_cast<int>(std::lround(fs / intf.bandwidth)));
            const double sigma = std::sqrt(target * len / 2.0);  // per quadrature, pre-filter
            std::vector<Complex> ring(static_cast<size_t>(len));
            Complex acc{0.0, 0.0};
            for (auto& v : ring) {
                v = Complex{sigma * rng.gaussian(), sigma * rng.gaussian()};
                acc += v;
            }
            size_t head = 0;
            for (size_t j = 0; j < n_out; ++j) {
                const double ang = w * static_cast<double>(j);
                out.samples[j] += (acc / static_cast<double>(len)) *
                                  Complex{std::cos(ang), std::sin(ang)};
                acc -= ring[head];
                ring[head] = Complex{sigma * rng.gaussian(), sigma * rng.gaussian()};
                acc += ring[head];
                head = (head + 1) % static_cast<size_t>(len);
            }
        }
    }

    if (cfg.ebn0_db) {
        if (!(e_b > 0))
            throw std::invalid_argument("channel: E_b must be positive when noise is enabled");
        const double n0 = e_b * db_to_linear(-*cfg.ebn0_db);
        const double sigma = std::sqrt(n0 * fs / 2.0);  // per quadrature
        Rng rng(splitmix64(cfg.seed ^ 0xda3e39cb94b95bdbull));
        for (Complex& s : out.samples)
            s += Complex{sigma * rng.gaussian(), sigma * rng.gaussian()};
    }
    return out;
}

}  // namespace walshlink::channel
