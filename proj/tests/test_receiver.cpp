#include <cmath>
#include <cstring>

#include <catch2/catch_amalgamated.hpp>

#include "walshlink/channel.hpp"
#include "walshlink/codebook.hpp"
#include "walshlink/hadamard.hpp"
#include "walshlink/receiver.hpp"

using namespace walshlink;
using namespace walshlink::receiver;
using codebook::build_hadamard;
using codebook::Codebook;
using codebook::select_codebook;
using waveform::BasebandSignal;
using waveform::ModulationScheme;

namespace {

ModulationScheme scheme_of(ModulationScheme::Kind kind, int sps = 4) {
    ModulationScheme s;
    s.kind = kind;
    s.samples_per_chip = sps;
    s.sample_rate = 400e3 * sps;
    return s;
}

std::vector<uint32_t> random_words(size_t count, uint32_t span, uint64_t seed) {
    Rng rng(seed);
    std::vector<uint32_t> w(count);
    for (auto& v : w) v = static_cast<uint32_t>(rng.next_u64() % span);
    return w;
}

const Codebook& cb12() {
    static Codebook cb = select_codebook(build_hadamard(12), 4);
    return cb;
}

}  // namespace

TEST_CASE("noiseless loopback recovers every word", "[receiver]") {
    for (auto kind : {ModulationScheme::Kind::bpsk, ModulationScheme::Kind::cpfsk}) {
        for (int sps : {2, 4}) {
            const ModulationScheme sch = scheme_of(kind, sps);
            const auto payload = random_words(500, 16, 42);
            BasebandSignal sig = build_frame(cb12(), payload, sch);
            ReceiverConfig rc;
            FrameResult fr = demodulate_frame(sig, cb12(), sch, rc);
            REQUIRE(fr.sync.detected);
            REQUIRE(fr.sync.sample_offset == 0);
            REQUIRE(fr.words() == payload);
        }
    }
}

TEST_CASE("sync search recovers integer sample delays exactly", "[receiver]") {
    const ModulationScheme sch = scheme_of(ModulationScheme::Kind::cpfsk);
    const auto payload = random_words(32, 16, 7);
    for (int delay : {0, 1, 3, 5}) {
        BasebandSignal sig = build_frame(cb12(), payload, sch);
        channel::ChannelConfig cfg;
        cfg.timing_offset = delay;
        BasebandSignal rx = channel::apply(sig, cfg, 1.0);
        ReceiverConfig rc;
        rc.search_window = 6;
        FrameResult fr = demodulate_frame(rx, cb12(), sch, rc);
        REQUIRE(fr.sync.sample_offset == delay);
        REQUIRE(fr.words() == payload);
    }
}

TEST_CASE("clean sync peak equals twice the single-code peak", "[receiver]") {
    const ModulationScheme sch = scheme_of(ModulationScheme::Kind::bpsk);
    const auto payload = random_words(8, 16, 11);
    BasebandSignal sig = build_frame(cb12(), payload, sch);
    SyncResult sr = acquire_sync(sig, cb12(), sch, 1);
    REQUIRE(sr.detected);
    // 24 doubled-sync chips each contribute exactly 1
    REQUIRE(sr.peak_metric == 2.0 * 12.0);
    const int single = codebook::chip_correlation(*cb12().sync_code, *cb12().sync_code);
    REQUIRE(sr.peak_metric == 2.0 * single);
}

TEST_CASE("detection threshold separates frames from noise", "[receiver]") {
    const ModulationScheme sch = scheme_of(ModulationScheme::Kind::bpsk);
    BasebandSignal sig = build_frame(cb12(), random_words(8, 16, 3), sch);
    REQUIRE(acquire_sync(sig, cb12(), sch, 1, 0.9).detected);

    // pure noise, no frame anywhere
    Rng rng(13);
    BasebandSignal noise;
    noise.sample_rate = sig.sample_rate;
    noise.samples.resize(sig.samples.size());
    for (auto& s : noise.samples) s = {rng.gaussian(), rng.gaussian()};
    SyncResult sr = acquire_sync(noise, cb12(), sch, 32);
    REQUIRE_FALSE(sr.detected);
}

TEST_CASE("demodulate_frame raises sync loss on noise-only input", "[receiver]") {
    const ModulationScheme sch = scheme_of(ModulationScheme::Kind::bpsk);
    Rng rng(29);
    BasebandSignal noise;
    noise.sample_rate = sch.sample_rate;
    noise.samples.resize(5000);
    for (auto& s : noise.samples) s = {rng.gaussian(), rng.gaussian()};
    ReceiverConfig rc;
    rc.search_window = 16;
    REQUIRE_THROWS_AS(demodulate_frame(noise, cb12(), sch, rc), SyncLossError);
}

TEST_CASE("carrier offset is estimated and removed", "[receiver]") {
    const auto payload = random_words(64, 16, 17);
    for (auto kind : {ModulationScheme::Kind::bpsk, ModulationScheme::Kind::cpfsk}) {
        const ModulationScheme sch = scheme_of(kind);
        const double f_true = 400.0;  // 0.025% of the sample rate
        BasebandSignal sig = build_frame(cb12(), payload, sch);
        channel::ChannelConfig cfg;
        cfg.carrier_offset = f_true;
        BasebandSignal rx = channel::apply(sig, cfg, 1.0);
        ReceiverConfig rc;
        rc.estimate_carrier = true;
        FrameResult fr = demodulate_frame(rx, cb12(), sch, rc);
        REQUIRE_THAT(fr.carrier_offset_hat, Catch::Matchers::WithinRel(f_true, 0.05));
        REQUIRE(fr.words() == payload);
    }
}

TEST_CASE("correlator picks the strongest code and its sign", "[receiver]") {
    const Codebook& cb = cb12();
    std::vector<double> corr(8, 0.5);
    corr[3] = 6.0;
    Decision d = decide(corr, cb);
    REQUIRE(d.word == 3);
    REQUIRE(d.code_index == 3);
    REQUIRE_FALSE(d.complement_flag);

    corr[3] = -6.0;
    d = decide(corr, cb);
    REQUIRE(d.word == 3 + 8);
    REQUIRE(d.complement_flag);

    // exact magnitude tie goes to the lowest index
    std::vector<double> tie(8, 0.0);
    tie[2] = 4.0;
    tie[5] = 4.0;
    REQUIRE(decide(tie, cb).word == 2);
    tie[2] = -4.0;
    REQUIRE(decide(tie, cb).word == 2 + 8);
}

TEST_CASE("decisions ignore constant chip-estimate offsets", "[receiver]") {
    const Codebook& cb = cb12();
    Rng rng(57);
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<double> est(12);
        for (auto& v : est) v = rng.gaussian();
        const double offset = 3.0 * rng.gaussian();
        std::vector<double> shifted = est;
        for (auto& v : shifted) v += offset;
        REQUIRE(demodulate_symbol(est, cb).word == demodulate_symbol(shifted, cb).word);
    }

    // integer inputs make the cancellation bitwise, not just approximate
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<double> est(12);
        for (auto& v : est) v = (rng.next_u64() & 1) ? 1.0 : -1.0;
        std::vector<double> shifted = est;
        for (auto& v : shifted) v += 5.0;
        const auto a = symbol_correlations(est, cb);
        const auto b = symbol_correlations(shifted, cb);
        for (size_t i = 0; i < a.size(); ++i) REQUIRE(a[i] == b[i]);
    }
}

TEST_CASE("despreading probe reports the processing gain", "[receiver]") {
    ToneProbe probe;
    probe.trials = 20000;
    probe.seed = 5;
    const double g12 = despreading_gain_probe(cb12(), probe);
    REQUIRE_THAT(g12, Catch::Matchers::WithinAbs(10.0 * std::log10(12.0), 0.5));

    Codebook cb40 = select_codebook(build_hadamard(40), 6);
    const double g40 = despreading_gain_probe(cb40, probe);
    REQUIRE_THAT(g40, Catch::Matchers::WithinAbs(10.0 * std::log10(40.0), 0.5));

    REQUIRE(despreading_gain_probe(cb12(), probe) == g12);  // same seed, same answer
}

TEST_CASE("bit packing round-trips through words", "[receiver]") {
    std::vector<uint8_t> bits{1, 0, 1, 1, 0, 0, 1, 0, 1, 1};
    const auto words = words_from_bits(bits, 4);
    REQUIRE(words.size() == 3);
    REQUIRE(words[0] == 0b1011);
    REQUIRE(words[1] == 0b0010);
    REQUIRE(words[2] == 0b1100);  // tail zero-padded
    REQUIRE(bits_from_words(words, 4, bits.size()) == bits);

    REQUIRE_THROWS_AS(words_from_bits(bits, 0), std::invalid_argument);
    REQUIRE_THROWS_AS(words_from_bits(bits, 31), std::invalid_argument);
}

TEST_CASE("hard chip clamping still decodes a clean frame", "[receiver]") {
    const ModulationScheme sch = scheme_of(ModulationScheme::Kind::cpfsk);
    const auto payload = random_words(64, 16, 23);
    BasebandSignal sig = build_frame(cb12(), payload, sch);
    ReceiverConfig rc;
    rc.hard_chips = true;
    FrameResult fr = demodulate_frame(sig, cb12(), sch, rc);
    REQUIRE(fr.words() == payload);
}

TEST_CASE("framing and sync argument validation", "[receiver]") {
    const ModulationScheme sch = scheme_of(ModulationScheme::Kind::bpsk);
    REQUIRE_THROWS_AS(build_frame(cb12(), {}, sch), std::invalid_argument);
    REQUIRE_THROWS_AS(build_frame(cb12(), {16}, sch), std::out_of_range);

    Codebook no_sync = select_codebook(build_hadamard(2), 1);
    REQUIRE_THROWS_AS(build_frame(no_sync, {0, 1}, sch), std::invalid_argument);

    BasebandSignal sig = build_frame(cb12(), {1, 2}, sch);
    REQUIRE_THROWS_AS(acquire_sync(sig, cb12(), sch, 0), std::invalid_argument);
    REQUIRE_THROWS_AS(acquire_sync(sig, cb12(), sch, 100000), std::invalid_argument);

    BasebandSignal tiny;
    tiny.sample_rate = sch.sample_rate;
    tiny.samples.resize(10);
    REQUIRE_THROWS_AS(acquire_sync(tiny, cb12(), sch, 1), std::invalid_argument);
}

TEST_CASE("frame result exposes per-symbol correlations", "[receiver]") {
    const ModulationScheme sch = scheme_of(ModulationScheme::Kind::bpsk);
    const auto payload = random_words(10, 16, 31);
    BasebandSignal sig = build_frame(cb12(), payload, sch);
    FrameResult fr = demodulate_frame(sig, cb12(), sch, ReceiverConfig{});
    REQUIRE(fr.correlations.size() == payload.size());
    for (size_t s = 0; s < payload.size(); ++s) {
        REQUIRE(fr.correlations[s].size() == 8);
        const uint32_t w = payload[s];
        const double rho = fr.correlations[s][w & 7u];
        // the transmitted code correlates at full strength, signed
        REQUIRE_THAT(rho, Catch::Matchers::WithinAbs(w < 8 ? 12.0 : -12.0, 1e-9));
    }
}
