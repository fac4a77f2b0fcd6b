#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "walshlink/common.hpp"
#include "walshlink/hadamard.hpp"

namespace walshlink::waveform {

using Complex = std::complex<double>;
using codebook::ChipSequence;

struct ModulationScheme {
    enum class Kind { bpsk, cpfsk };
    Kind kind = Kind::bpsk;
    double h = 0.5;            // CPFSK modulation index
    int samples_per_chip = 4;
    double sample_rate = 1.0;  // Hz

    double chip_rate() const { return sample_rate / samples_per_chip; }
};

struct BasebandSignal {
    std::vector<Complex> samples;
    double sample_rate = 1.0;
};

/// Phase at each chip boundary; phases[0] = 0 and the length is chips + 1.
struct PhaseTrajectory {
    std::vector<double> phases;
};

inline void validate(const ModulationScheme& s) {
    if (s.samples_per_chip < 2)
        throw std::invalid_argument("modulation: samples_per_chip must be at least 2");
    if (!(s.sample_rate > 0))
        throw std::invalid_argument("modulation: sample_rate must be positive");
    if (s.kind == ModulationScheme::Kind::cpfsk && !(s.h > 0))
        throw std::invalid_argument("modulation: CPFSK index h must be positive");
}

/// Complex-baseband modulation. BPSK holds each chip flat for samples_per_chip
/// samples. CPFSK advances the phase by chip * pi * h per chip in equal
/// sub-steps, sampled at sub-interval ends, so the last sample of chip k sits
/// exactly on the trajectory value phi_{k+1}. Accumulated phase is tracked as
/// an integer multiple of the sub-step; a balanced sequence therefore returns
/// to phase zero exactly, not just within rounding.
inline BasebandSignal modulate(const ChipSequence& chips, const ModulationScheme& scheme) {
    validate(scheme);
    if (chips.empty()) throw std::invalid_argument("modulate: empty chip sequence");
    BasebandSignal sig;
    sig.sample_rate = scheme.sample_rate;
    sig.samples.reserve(chips.size() * static_cast<size_t>(scheme.samples_per_chip));
    if (scheme.kind == ModulationScheme::Kind::bpsk) {
        for (int chip : chips)
            for (int n = 0; n < scheme.samples_per_chip; ++n)
                sig.samples.emplace_back(static_cast<double>(chip), 0.0);
    } else {
        const double step = std::numbers::pi * scheme.h / scheme.samples_per_chip;
        long long units = 0;
        for (int chip : chips)
            for (int n = 0; n < scheme.samples_per_chip; ++n) {
                units += chip;
                const double phase = static_cast<double>(units) * step;
                sig.samples.emplace_back(std::cos(phase), std::sin(phase));
            }
    }
    return sig;
}

/// Chip-boundary phase values for a CPFSK run over the given chips.
inline PhaseTrajectory phase_trajectory(const ChipSequence& chips, double h) {
    if (!(h > 0)) throw std::invalid_argument("phase_trajectory: h must be positive");
    if (chips.empty()) throw std::invalid_argument("phase_trajectory: empty chip sequence");
    PhaseTrajectory t;
    t.phases.reserve(chips.size() + 1);
    long long units = 0;
    t.phases.push_back(0.0);
    for (int chip : chips) {
        units += chip;
        t.phases.push_back(static_cast<double>(units) * std::numbers::pi * h);
    }
    return t;
}

/// Mean squared magnitude; calibration reference for S and S_ni.
inline double power(const BasebandSignal& sig) {
    if (sig.samples.empty()) throw std::invalid_argument("power: empty signal");
    double acc = 0.0;
    for (const Complex& s : sig.samples) acc += std::norm(s);
    return acc / static_cast<double>(sig.samples.size());
}

/// CSV dump for plotting: index,re,im.
inline std::string signal_csv(const BasebandSignal& sig) {
    std::string out = "index,re,im\n";
    for (size_t i = 0; i < sig.samples.size(); ++i) {
        out += std::to_string(i);
        out += ',';
        out += format_number(sig.samples[i].real());
        out += ',';
        out += format_number(sig.samples[i].imag());
        out += '\n';
    }
    return out;
}

/// CSV dump for plotting: index,phase_radians.
inline std::string trajectory_csv(const PhaseTrajectory& t) {
    std::string out = "index,phase_radians\n";
    for (size_t i = 0; i < t.phases.size(); ++i) {
        out += std::to_string(i);
        out += ',';
        out += format_number(t.phases[i]);
        out += '\n';
    }
    return out;
}

}  // namespace walshlink::waveform
