#include <cmath>
#include <complex>
#include <numbers>

#include <catch2/catch_amalgamated.hpp>

#include "walshlink/channel.hpp"
#include "walshlink/common.hpp"
#include "walshlink/waveform.hpp"

using namespace walshlink;
using namespace walshlink::channel;
using waveform::BasebandSignal;
using waveform::Complex;

namespace {

BasebandSignal flat_signal(size_t n, double fs = 1e6) {
    BasebandSignal s;
    s.sample_rate = fs;
    s.samples.assign(n, Complex{1.0, 0.0});
    return s;
}

double mean_power(const BasebandSignal& s) { return waveform::power(s); }

// lag-k sample autocovariance magnitude, normalized by lag-0
double norm_autocov(const BasebandSignal& s, size_t lag) {
    Complex acc{0.0, 0.0};
    double p = 0.0;
    Complex mean{0.0, 0.0};
    for (const Complex& v : s.samples) mean += v;
    mean /= static_cast<double>(s.samples.size());
    for (size_t j = 0; j + lag < s.samples.size(); ++j) {
        acc += (s.samples[j + lag] - mean) * std::conj(s.samples[j] - mean);
    }
    for (const Complex& v : s.samples) p += std::norm(v - mean);
    return std::abs(acc) / p;
}

}  // namespace

TEST_CASE("awgn hits the configured noise density", "[channel]") {
    const double fs = 1e6;
    BasebandSignal in = flat_signal(200000, fs);
    ChannelConfig cfg;
    cfg.ebn0_db = 4.0;
    cfg.seed = 11;
    const double e_b = 1e-5;
    BasebandSignal out = apply(in, cfg, e_b);
    REQUIRE(out.samples.size() == in.samples.size());

    const double n0 = e_b * db_to_linear(-4.0);
    double re = 0.0, im = 0.0, mre = 0.0, mim = 0.0;
    for (size_t j = 0; j < out.samples.size(); ++j) {
        const Complex z = out.samples[j] - in.samples[j];
        mre += z.real();
        mim += z.imag();
        re += z.real() * z.real();
        im += z.imag() * z.imag();
    }
    const double n = static_cast<double>(out.samples.size());
    REQUIRE_THAT(mre / n, Catch::Matchers::WithinAbs(0.0, 0.01 * std::sqrt(n0 * fs)));
    REQUIRE_THAT(mim / n, Catch::Matchers::WithinAbs(0.0, 0.01 * std::sqrt(n0 * fs)));
    // each quadrature carries half the complex noise power n0*fs
    REQUIRE_THAT(re / n, Catch::Matchers::WithinRel(n0 * fs / 2, 0.02));
    REQUIRE_THAT(im / n, Catch::Matchers::WithinRel(n0 * fs / 2, 0.02));
}

TEST_CASE("channel output is reproducible per seed", "[channel]") {
    BasebandSignal in = flat_signal(5000);
    ChannelConfig cfg;
    cfg.ebn0_db = 6.0;
    cfg.seed = 99;
    cfg.interferers = place_interferers(2, 400e3, 35e3, 1.0, Interferer::Kind::tone, 99);
    BasebandSignal a = apply(in, cfg, 1e-5);
    BasebandSignal b = apply(in, cfg, 1e-5);
    REQUIRE(a.samples == b.samples);

    cfg.seed = 100;
    BasebandSignal c = apply(in, cfg, 1e-5);
    REQUIRE(a.samples != c.samples);
}

TEST_CASE("timing offset prepends exact silence", "[channel]") {
    BasebandSignal in = flat_signal(100);
    ChannelConfig cfg;
    cfg.timing_offset = 7;
    BasebandSignal out = apply(in, cfg, 1.0);
    REQUIRE(out.samples.size() == 107);
    for (int j = 0; j < 7; ++j) REQUIRE(out.samples[static_cast<size_t>(j)] == Complex{0.0, 0.0});
    for (size_t j = 7; j < out.samples.size(); ++j) REQUIRE(out.samples[j] == Complex{1.0, 0.0});
}

TEST_CASE("carrier offset rotates without changing magnitude", "[channel]") {
    const double fs = 1e6;
    BasebandSignal in = flat_signal(500, fs);
    ChannelConfig cfg;
    cfg.carrier_offset = 1234.0;
    BasebandSignal out = apply(in, cfg, 1.0);
    const double w = 2.0 * std::numbers::pi * 1234.0 / fs;
    for (size_t j = 0; j < out.samples.size(); ++j) {
        REQUIRE_THAT(std::abs(out.samples[j]), Catch::Matchers::WithinAbs(1.0, 1e-12));
        const double expect = w * static_cast<double>(j);
        REQUIRE_THAT(std::arg(out.samples[j] * std::polar(1.0, -expect)),
                     Catch::Matchers::WithinAbs(0.0, 1e-9));
    }
}

TEST_CASE("tone interferer lands at the requested power and frequency", "[channel]") {
    const double fs = 1e6;
    BasebandSignal in = flat_signal(100000, fs);
    in.samples.assign(in.samples.size(), Complex{0.0, 0.0});  // probe the tone alone
    ChannelConfig cfg;
    cfg.seed = 5;
    Interferer tone;
    tone.center_offset = 50e3;
    tone.power_ratio = 2.0;  // relative to the zero-signal fallback power 1.0
    tone.kind = Interferer::Kind::tone;
    cfg.interferers.push_back(tone);
    BasebandSignal out = apply(in, cfg, 1.0);
    REQUIRE_THAT(mean_power(out), Catch::Matchers::WithinRel(2.0, 1e-9));

    // instantaneous frequency from the lag-1 rotation
    Complex rot{0.0, 0.0};
    for (size_t j = 1; j < out.samples.size(); ++j)
        rot += out.samples[j] * std::conj(out.samples[j - 1]);
    const double f_hat = std::arg(rot) * fs / (2.0 * std::numbers::pi);
    REQUIRE_THAT(f_hat, Catch::Matchers::WithinRel(50e3, 1e-6));
}

TEST_CASE("filtered noise interferer is band-limited to its width", "[channel]") {
    const double fs = 1e6;
    BasebandSignal in = flat_signal(200000, fs);
    in.samples.assign(in.samples.size(), Complex{0.0, 0.0});
    ChannelConfig cfg;
    cfg.seed = 21;
    Interferer nb;
    nb.center_offset = 0.0;
    nb.power_ratio = 1.5;
    nb.bandwidth = 50e3;  // averaging window of fs/50e3 = 20 samples
    nb.kind = Interferer::Kind::filtered_noise;
    cfg.interferers.push_back(nb);
    BasebandSignal out = apply(in, cfg, 1.0);

    REQUIRE_THAT(mean_power(out), Catch::Matchers::WithinRel(1.5, 0.05));
    // strong short-lag correlation, none beyond the window length
    REQUIRE(norm_autocov(out, 1) > 0.8);
    REQUIRE(norm_autocov(out, 25) < 0.05);
}

TEST_CASE("uniform interferer placement covers the band symmetrically", "[channel]") {
    auto set = place_interferers(8, 400e3, 35e3, 0.5, Interferer::Kind::tone, 3);
    REQUIRE(set.size() == 8);
    for (const Interferer& i : set) {
        REQUIRE(i.power_ratio == 0.5);
        REQUIRE(i.kind == Interferer::Kind::tone);
    }
    // symmetric pairs around the carrier, spacing W/count
    for (size_t k = 0; k < 4; ++k)
        REQUIRE_THAT(set[k].center_offset + set[7 - k].center_offset,
                     Catch::Matchers::WithinAbs(0.0, 1e-9));
    REQUIRE_THAT(set[1].center_offset - set[0].center_offset,
                 Catch::Matchers::WithinAbs(50e3, 1e-9));

    REQUIRE_THAT(occupancy(set, 400e3, 35e3).p, Catch::Matchers::WithinAbs(0.7, 1e-12));
    REQUIRE(occupancy(set, 100e3, 35e3).p == 1.0);  // clamped
    REQUIRE(occupancy({}, 400e3, 35e3).p == 0.0);
}

TEST_CASE("channel validation", "[channel]") {
    BasebandSignal in = flat_signal(10);
    ChannelConfig cfg;
    cfg.timing_offset = -1;
    REQUIRE_THROWS_AS(apply(in, cfg, 1.0), std::invalid_argument);

    cfg = ChannelConfig{};
    cfg.ebn0_db = 5.0;
    REQUIRE_THROWS_AS(apply(in, cfg, 0.0), std::invalid_argument);  // needs E_b > 0

    cfg = ChannelConfig{};
    Interferer bad;
    bad.power_ratio = -1.0;
    cfg.interferers.push_back(bad);
    REQUIRE_THROWS_AS(apply(in, cfg, 1.0), std::invalid_argument);

    cfg = ChannelConfig{};
    bad = Interferer{};
    bad.kind = Interferer::Kind::filtered_noise;
    bad.power_ratio = 1.0;
    bad.bandwidth = 0.0;
    cfg.interferers.push_back(bad);
    REQUIRE_THROWS_AS(apply(in, cfg, 1.0), std::invalid_argument);

    REQUIRE_THROWS_AS(apply(BasebandSignal{}, ChannelConfig{}, 1.0), std::invalid_argument);
    REQUIRE_THROWS_AS(place_interferers(-1, 400e3, 35e3, 1.0, Interferer::Kind::tone, 1),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(occupancy({}, 0.0, 35e3), std::invalid_argument);
}

TEST_CASE("interferers add on top of the carried signal", "[channel]") {
    BasebandSignal in = flat_signal(50000);
    ChannelConfig cfg;
    cfg.seed = 8;
    cfg.interferers =
        place_interferers(4, 400e3, 35e3, 0.25, Interferer::Kind::tone, 8);
    BasebandSignal out = apply(in, cfg, 1.0);
    // four tones at quarter power relative to unit signal power
    REQUIRE_THAT(mean_power(out), Catch::Matchers::WithinRel(2.0, 0.02));
}
