#pragma once

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "walshlink/capacity.hpp"
#include "walshlink/channel.hpp"
#include "walshlink/codebook.hpp"
#include "walshlink/common.hpp"
#include "walshlink/fec.hpp"
#include "walshlink/receiver.hpp"
#include "walshlink/waveform.hpp"

namespace walshlink::simcli {

using nlohmann::json;

inline constexpr const char* kToolVersion = "0.1.0";

/// The spec cannot be used as given (parse failure, missing field, bad
/// range); maps to CLI exit code 1.
struct SpecError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// The spec was valid but the run failed, e.g. sync lost on every trial;
/// maps to CLI exit code 2.
struct RunError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline double require_number(const json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_number())
        throw SpecError(std::string("spec: missing numeric field '") + key + "'");
    return j.at(key).get<double>();
}

inline double number_or(const json& j, const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number())
        throw SpecError(std::string("spec: field '") + key + "' must be a number");
    return j.at(key).get<double>();
}

inline int int_or(const json& j, const char* key, int fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number_integer())
        throw SpecError(std::string("spec: field '") + key + "' must be an integer");
    return j.at(key).get<int>();
}

inline uint64_t seed_or(const json& j, const char* key, uint64_t fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number_integer())
        throw SpecError(std::string("spec: field '") + key + "' must be an integer seed");
    return j.at(key).get<uint64_t>();
}

inline bool flag_or(const json& j, const char* key, bool fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_boolean())
        throw SpecError(std::string("spec: field '") + key + "' must be a boolean");
    return j.at(key).get<bool>();
}

/// Grid: a single number, an array of numbers, or {start, stop, step}.
inline std::vector<double> parse_grid(const json& node, const char* name) {
    std::vector<double> out;
    if (node.is_number()) {
        out.push_back(node.get<double>());
    } else if (node.is_array()) {
        for (const auto& v : node) {
            if (!v.is_number())
                throw SpecError(std::string("spec: sweep '") + name + "' has a non-numeric entry");
            out.push_back(v.get<double>());
        }
    } else if (node.is_object()) {
        const double start = require_number(node, "start");
        const double stop = require_number(node, "stop");
        const double step = require_number(node, "step");
        if (!(step > 0) || start > stop)
            throw SpecError(std::string("spec: sweep '") + name + "' has a bad start/stop/step range");
        for (double v = start; v <= stop + step * 1e-9; v += step) out.push_back(v);
    } else {
        throw SpecError(std::string("spec: sweep '") + name +
                        "' must be a number, array, or start/stop/step object");
    }
    if (out.empty()) throw SpecError(std::string("spec: sweep '") + name + "' is empty");
    return out;
}

inline std::string spec_comment(const json& resolved) {
    // worker count can never change a byte of output, so it stays out of the
    // hash and runs differing only in parallelism produce identical files
    json hashed = resolved;
    hashed.erase("workers");
    return "# spec_hash=" + to_hex16(fnv1a64(hashed.dump())) + " tool=simcli " +
           kToolVersion + "\n";
}

inline void require_mode(const json& spec, const char* mode) {
    if (spec.contains("mode") && spec.at("mode") != mode)
        throw SpecError(std::string("spec: mode field says '") +
                        spec.at("mode").get<std::string>() + "' but the '" + mode +
                        "' command was invoked");
}

}  // namespace detail

/// Link budget shared by the capacity and throughput modes. SINR_req_dB is
/// kept in dB alongside the linear LinkParams for CSV echo.
struct LinkSpec {
    capacity::LinkParams lp;
    double sinr_req_db = 0;
    double w_ni = 0;
};

inline LinkSpec parse_link(const json& spec, bool require_rate) {
    if (!spec.contains("link") || !spec.at("link").is_object())
        throw SpecError("spec: missing 'link' object");
    const json& l = spec.at("link");
    LinkSpec out;
    out.lp.W = detail::require_number(l, "W");
    out.lp.R = require_rate ? detail::require_number(l, "R") : detail::number_or(l, "R", out.lp.W);
    out.lp.S = detail::number_or(l, "S", 1.0);
    out.lp.N0 = detail::number_or(l, "N0", 0.0);
    out.lp.n_users = detail::int_or(l, "n_users", 1);
    out.sinr_req_db = detail::require_number(l, "SINR_req_dB");
    out.lp.sinr_req = db_to_linear(out.sinr_req_db);
    out.lp.bandwidth_factor = detail::number_or(l, "bandwidth_factor", 1.0);
    if (!(out.lp.bandwidth_factor > 0)) throw SpecError("spec: bandwidth_factor must be positive");
    out.lp.chip_rate = out.lp.W / out.lp.bandwidth_factor;
    out.w_ni = detail::require_number(l, "W_ni");
    return out;
}

inline codebook::Codebook parse_codebook(const json& spec) {
    if (!spec.contains("codebook") || !spec.at("codebook").is_object())
        throw SpecError("spec: missing 'codebook' object");
    const json& c = spec.at("codebook");
    const int order = detail::int_or(c, "order", 12);
    const int bits = detail::int_or(c, "bits_per_symbol", 4);
    try {
        return codebook::select_codebook(codebook::build_hadamard(order), bits);
    } catch (const std::invalid_argument& e) {
        throw SpecError(std::string("spec: ") + e.what());
    }
}

/// One row per (R, p, S_ni/S) sweep point with the capacity-model outputs.
inline std::string run_capacity_table(const json& spec) {
    detail::require_mode(spec, "capacity");
    LinkSpec link = parse_link(spec, false);
    if (!spec.contains("sweep") || !spec.at("sweep").is_object())
        throw SpecError("spec: capacity mode needs a 'sweep' object");
    const json& sw = spec.at("sweep");
    if (!sw.contains("R")) throw SpecError("spec: sweep needs an 'R' grid");
    const std::vector<double> r_grid = detail::parse_grid(sw.at("R"), "R");
    const std::vector<double> p_grid =
        sw.contains("p") ? detail::parse_grid(sw.at("p"), "p") : std::vector<double>{0.0};
    const std::vector<double> s_grid = sw.contains("S_ni_over_S_dB")
                                           ? detail::parse_grid(sw.at("S_ni_over_S_dB"), "S_ni_over_S_dB")
                                           : std::vector<double>{0.0};

    std::string csv = detail::spec_comment(spec);
    csv += "W,R,SINR_req_dB,p,S_ni_over_S_dB,W_ni,N_pole,N_degraded,max_rate_bps\n";
    for (double r : r_grid)
        for (double p : p_grid)
            for (double sdb : s_grid) {
                capacity::LinkParams lp = link.lp;
                lp.R = r;
                capacity::InterferenceEnv env{p, db_to_linear(sdb) * lp.S, link.w_ni};
                capacity::CapacityReport rep;
                try {
                    rep = capacity::analyze(lp, env);
                } catch (const std::invalid_argument& e) {
                    throw SpecError(std::string("spec: ") + e.what());
                }
                csv += format_number(lp.W) + ',' + format_number(r) + ',' +
                       format_number(link.sinr_req_db) + ',' + format_number(p) + ',' +
                       format_number(sdb) + ',' + format_number(link.w_ni) + ',' +
                       format_number(rep.N_pole) + ',' + format_number(rep.N_degraded) + ',' +
                       format_number(rep.max_rate_bps) + '\n';
            }
    return csv;
}

/// Per (N, K): interference-free multi-user aggregate, the single M-ary
/// user's rate, and the throughput left after the configured interference.
inline std::string run_throughput_compare(const json& spec) {
    detail::require_mode(spec, "throughput");
    LinkSpec link = parse_link(spec, true);
    capacity::InterferenceEnv env{0.0, link.lp.S, link.w_ni};
    double s_db = 0.0;
    if (spec.contains("env")) {
        const json& e = spec.at("env");
        env.p = detail::number_or(e, "p", 0.0);
        s_db = detail::number_or(e, "S_ni_over_S_dB", 0.0);
        env.S_ni = db_to_linear(s_db) * link.lp.S;
    }
    if (!spec.contains("codebooks") || !spec.at("codebooks").is_array() ||
        spec.at("codebooks").empty())
        throw SpecError("spec: throughput mode needs a non-empty 'codebooks' array");

    std::string csv = detail::spec_comment(spec);
    csv += "N,K,R_c,R,p,S_ni_over_S_dB,N_pole,multiuser_bps,mary_bps,N_degraded,degraded_bps\n";
    for (const json& c : spec.at("codebooks")) {
        const int order = detail::int_or(c, "order", 0);
        const int bits = detail::int_or(c, "bits_per_symbol", 0);
        try {
            codebook::select_codebook(codebook::build_hadamard(order), bits);
        } catch (const std::invalid_argument& e) {
            throw SpecError(std::string("spec: ") + e.what());
        }
        capacity::CapacityReport rep;
        try {
            rep = capacity::analyze(link.lp, env);
        } catch (const std::invalid_argument& e) {
            throw SpecError(std::string("spec: ") + e.what());
        }
        const double mary = capacity::mary_bit_rate(link.lp.chip_rate, order, bits);
        const double users = std::max(0.0, std::floor(rep.N_degraded + 1e-9));
        csv += std::to_string(order) + ',' + std::to_string(bits) + ',' +
               format_number(link.lp.chip_rate) + ',' + format_number(link.lp.R) + ',' +
               format_number(env.p) + ',' + format_number(s_db) + ',' +
               format_number(rep.N_pole) + ',' + format_number(rep.N_pole * link.lp.R) + ',' +
               format_number(mary) + ',' + format_number(rep.N_degraded) + ',' +
               format_number(users * link.lp.R) + '\n';
    }
    return csv;
}

inline std::string dump_codebook(const json& spec) {
    detail::require_mode(spec, "codebook");
    return detail::spec_comment(spec) + codebook::codebook_csv(parse_codebook(spec));
}

/// Everything a BER sweep needs, resolved from the spec JSON.
struct BerSetup {
    codebook::Codebook cb;
    waveform::ModulationScheme scheme;
    channel::ChannelConfig chan;  // ebn0_db filled per sweep point
    int n_interferers = 0;
    receiver::ReceiverConfig rcfg;
    bool coded = false;
    fec::LdpcCode code;
    int symbols_per_frame = 0;  // per frame, fixed by the LDPC block when coded
    int frames = 1;
    int trials = 1;
    int workers = 1;
    uint64_t base_seed = 1;
    std::vector<std::optional<double>> ebn0_grid;
};

namespace detail {

inline json load_scenario(const json& spec) {
    if (spec.contains("channel")) {
        if (!spec.at("channel").is_object()) throw SpecError("spec: 'channel' must be an object");
        return spec.at("channel");
    }
    if (spec.contains("scenario")) {
        if (!spec.at("scenario").is_string())
            throw SpecError("spec: 'scenario' must be a file path");
        std::ifstream in(spec.at("scenario").get<std::string>());
        if (!in) throw SpecError("spec: scenario file missing: " +
                                 spec.at("scenario").get<std::string>());
        json j;
        try {
            in >> j;
        } catch (const json::exception& e) {
            throw SpecError(std::string("spec: scenario file invalid: ") + e.what());
        }
        if (!j.is_object()) throw SpecError("spec: scenario file must hold an object");
        return j;
    }
    return json::object();
}

inline channel::Interferer::Kind parse_kind(const std::string& s) {
    if (s == "tone") return channel::Interferer::Kind::tone;
    if (s == "noise") return channel::Interferer::Kind::filtered_noise;
    throw SpecError("spec: interferer kind must be 'tone' or 'noise'");
}

inline std::vector<std::optional<double>> parse_ebn0_grid(const json& spec, const json& scen) {
    std::vector<std::optional<double>> grid;
    const json* node = nullptr;
    if (spec.contains("ebn0_db"))
        node = &spec.at("ebn0_db");
    else if (scen.contains("ebn0_db"))
        node = &scen.at("ebn0_db");
    if (!node || node->is_null()) {
        grid.push_back(std::nullopt);  // noise-free
        return grid;
    }
    if (node->is_array()) {
        for (const auto& v : *node) {
            if (v.is_null())
                grid.push_back(std::nullopt);
            else if (v.is_number())
                grid.push_back(v.get<double>());
            else
                throw SpecError("spec: ebn0_db entries must be numbers or null");
        }
        if (grid.empty()) throw SpecError("spec: ebn0_db grid is empty");
        return grid;
    }
    for (double v : parse_grid(*node, "ebn0_db")) grid.push_back(v);
    return grid;
}

}  // namespace detail

inline BerSetup parse_ber_setup(const json& spec) {
    detail::require_mode(spec, "ber");
    BerSetup s;
    s.cb = parse_codebook(spec);
    if (!s.cb.sync_code) throw SpecError("spec: codebook too small to carry a sync code");
    const json scen = detail::load_scenario(spec);

    const json mod = spec.contains("modulation") ? spec.at("modulation") : json::object();
    if (!mod.is_object()) throw SpecError("spec: 'modulation' must be an object");
    const std::string kind = mod.contains("kind") ? mod.at("kind").get<std::string>() : "bpsk";
    if (kind == "bpsk")
        s.scheme.kind = waveform::ModulationScheme::Kind::bpsk;
    else if (kind == "cpfsk")
        s.scheme.kind = waveform::ModulationScheme::Kind::cpfsk;
    else
        throw SpecError("spec: modulation kind must be 'bpsk' or 'cpfsk'");
    s.scheme.samples_per_chip = detail::int_or(mod, "samples_per_chip", 4);
    s.scheme.h = detail::number_or(mod, "h", 0.5);
    const double chan_w = detail::number_or(scen, "W", 0.0);
    s.scheme.sample_rate = detail::number_or(
        mod, "sample_rate",
        chan_w > 0 ? chan_w * s.scheme.samples_per_chip : static_cast<double>(s.scheme.samples_per_chip));
    try {
        waveform::validate(s.scheme);
    } catch (const std::invalid_argument& e) {
        throw SpecError(std::string("spec: ") + e.what());
    }

    s.chan.carrier_offset = detail::number_or(scen, "carrier_offset", 0.0);
    s.chan.timing_offset = detail::int_or(scen, "timing_offset", 0);
    if (s.chan.timing_offset < 0) throw SpecError("spec: timing_offset must be non-negative");
    s.chan.seed = detail::seed_or(scen, "seed", 0);
    const double ratio_db = detail::number_or(scen, "power_ratio_db", 0.0);
    const auto kind_i = detail::parse_kind(
        scen.contains("kind") ? scen.at("kind").get<std::string>() : "tone");
    if (scen.contains("interferer_list")) {
        if (!scen.at("interferer_list").is_array())
            throw SpecError("spec: interferer_list must be an array");
        for (const json& it : scen.at("interferer_list")) {
            channel::Interferer intf;
            intf.center_offset = detail::number_or(it, "offset_hz", 0.0);
            intf.power_ratio = db_to_linear(detail::number_or(it, "power_ratio_db", ratio_db));
            intf.bandwidth = detail::number_or(it, "bandwidth", detail::number_or(scen, "W_ni", 1.0));
            intf.kind = it.contains("kind") ? detail::parse_kind(it.at("kind").get<std::string>())
                                            : kind_i;
            s.chan.interferers.push_back(intf);
        }
    } else {
        const int count = detail::int_or(scen, "interferers", 0);
        if (count < 0) throw SpecError("spec: interferer count must be non-negative");
        if (count > 0) {
            const double w = detail::require_number(scen, "W");
            const double w_ni = detail::require_number(scen, "W_ni");
            s.chan.interferers = channel::place_interferers(
                count, w, w_ni, db_to_linear(ratio_db), kind_i, s.chan.seed);
        }
    }
    s.n_interferers = static_cast<int>(s.chan.interferers.size());
    s.ebn0_grid = detail::parse_ebn0_grid(spec, scen);

    const json rc = spec.contains("receiver") ? spec.at("receiver") : json::object();
    if (!rc.is_object()) throw SpecError("spec: 'receiver' must be an object");
    s.rcfg.search_window =
        detail::int_or(rc, "search_window", s.chan.timing_offset + s.scheme.samples_per_chip + 1);
    s.rcfg.threshold = detail::number_or(rc, "threshold", 0.5);
    s.rcfg.estimate_carrier = detail::flag_or(rc, "estimate_carrier", s.chan.carrier_offset != 0.0);
    s.rcfg.hard_chips = detail::flag_or(rc, "hard_chips", false);
    if (s.rcfg.search_window < 1) throw SpecError("spec: search_window must be positive");

    s.coded = detail::flag_or(spec, "coded", false);
    if (s.coded) {
        const json lj = spec.contains("ldpc") ? spec.at("ldpc") : json::object();
        const int n = detail::int_or(lj, "n", 240);
        const int w_c = detail::int_or(lj, "w_c", 3);
        const int w_r = detail::int_or(lj, "w_r", 6);
        const uint64_t cseed = detail::seed_or(lj, "seed", 7);
        try {
            s.code = fec::build_gallager(n, w_c, w_r, cseed);
        } catch (const std::invalid_argument& e) {
            throw SpecError(std::string("spec: ") + e.what());
        }
        s.symbols_per_frame =
            (s.code.n + s.cb.bits_per_symbol - 1) / s.cb.bits_per_symbol;
    } else {
        s.symbols_per_frame = detail::int_or(spec, "symbols_per_frame", 50);
        if (s.symbols_per_frame < 1) throw SpecError("spec: symbols_per_frame must be positive");
    }
    s.frames = detail::int_or(spec, "frames", 1);
    if (s.frames < 1) throw SpecError("spec: frames must be positive");
    s.trials = detail::int_or(spec, "trials", 4);
    if (s.trials < 1) throw SpecError("spec: trials must be at least 1");
    s.workers = detail::int_or(spec, "workers", 1);
    if (s.workers < 1) throw SpecError("spec: workers must be at least 1");
    s.base_seed = detail::seed_or(spec, "seed", 1);
    return s;
}

namespace detail {

struct TrialOutcome {
    long long symbols = 0;
    long long symbol_errors = 0;
    long long bits = 0;
    long long bit_errors = 0;
    int frames_lost = 0;
    int frames_total = 0;
    int sync_offset = -1;  // first frame's lock, -1 when the first frame was lost
    uint64_t seed = 0;
};

inline TrialOutcome run_trial(const BerSetup& s, std::optional<double> ebn0, int trial) {
    TrialOutcome out;
    const uint64_t trial_seed = s.base_seed + static_cast<uint64_t>(trial);
    out.seed = trial_seed;
    Rng data_rng(splitmix64(trial_seed ^ 0xd1b54a32d192ed03ull));
    const int kbits = s.cb.bits_per_symbol;
    const int sps = s.scheme.samples_per_chip;
    const double fs = s.scheme.sample_rate;
    const double rate = s.coded ? static_cast<double>(s.code.k) / s.code.n : 1.0;

    for (int f = 0; f < s.frames; ++f) {
        ++out.frames_total;
        channel::ChannelConfig cfg = s.chan;
        cfg.ebn0_db = ebn0;
        cfg.seed = splitmix64(
            splitmix64(trial_seed + 0x632be59bd9b4e019ull * static_cast<uint64_t>(f)) ^ s.chan.seed);

        std::vector<uint32_t> payload;
        fec::Bits info;
        if (s.coded) {
            info.resize(static_cast<size_t>(s.code.k));
            for (auto& b : info) b = static_cast<uint8_t>(data_rng.next_u64() & 1u);
            payload = receiver::words_from_bits(fec::encode(s.code, info), kbits);
        } else {
            payload.resize(static_cast<size_t>(s.symbols_per_frame));
            for (auto& w : payload)
                w = static_cast<uint32_t>(data_rng.next_u64() & ((1u << kbits) - 1u));
        }
        const long long frame_bits =
            s.coded ? s.code.k : static_cast<long long>(payload.size()) * kbits;

        const waveform::BasebandSignal tx = receiver::build_frame(s.cb, payload, s.scheme);
        const double e_b =
            waveform::power(tx) * s.cb.order * sps / (fs * kbits * rate);
        const waveform::BasebandSignal rx = channel::apply(tx, cfg, e_b);

        receiver::FrameResult fr;
        try {
            fr = receiver::demodulate_frame(rx, s.cb, s.scheme, s.rcfg);
        } catch (const receiver::SyncLossError&) {
            ++out.frames_lost;
            out.symbols += static_cast<long long>(payload.size());
            out.symbol_errors += static_cast<long long>(payload.size());
            out.bits += frame_bits;
            out.bit_errors += frame_bits;
            continue;
        }
        if (f == 0) out.sync_offset = fr.sync.sample_offset;

        const size_t decided = std::min(payload.size(), fr.decisions.size());
        long long sym_err = static_cast<long long>(payload.size() - decided);
        for (size_t i = 0; i < decided; ++i)
            if (fr.decisions[i].word != payload[i]) ++sym_err;
        out.symbols += static_cast<long long>(payload.size());
        out.symbol_errors += sym_err;
        out.bits += frame_bits;

        if (s.coded) {
            // complex chip-estimate noise variance sets the LLR scale; the
            // min-sum decoder is scale-invariant, so interferer-induced
            // mismatch only biases the reported confidence
            double sigma_z = 1e-12;
            if (ebn0) sigma_z = e_b * db_to_linear(-*ebn0) * fs / sps;
            std::vector<double> llrs;
            llrs.reserve(static_cast<size_t>(s.code.n));
            for (size_t i = 0; i < fr.correlations.size(); ++i) {
                if (llrs.size() >= static_cast<size_t>(s.code.n)) break;
                for (double v : fec::symbol_llrs_to_bit_llrs(fr.correlations[i], sigma_z)) {
                    if (llrs.size() < static_cast<size_t>(s.code.n)) llrs.push_back(v);
                }
            }
            llrs.resize(static_cast<size_t>(s.code.n), 0.0);
            const fec::DecodeResult dec = fec::decode(s.code, llrs);
            long long be = 0;
            for (int i = 0; i < s.code.k; ++i)
                be += dec.bits[static_cast<size_t>(i)] != info[static_cast<size_t>(i)];
            out.bit_errors += be;
        } else {
            long long be = static_cast<long long>(payload.size() - decided) * kbits;
            for (size_t i = 0; i < decided; ++i)
                be += std::popcount(fr.decisions[i].word ^ payload[i]);
            out.bit_errors += be;
        }
    }
    return out;
}

inline void for_each_trial(int trials, int workers, const std::function<void(int)>& body) {
    if (workers <= 1 || trials <= 1) {
        for (int t = 0; t < trials; ++t) body(t);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    const int count = std::min(workers, trials);
    pool.reserve(static_cast<size_t>(count));
    for (int w = 0; w < count; ++w)
        pool.emplace_back([&] {
            for (int t = next.fetch_add(1); t < trials; t = next.fetch_add(1)) body(t);
        });
    for (auto& th : pool) th.join();
}

}  // namespace detail

struct BerOutput {
    std::string csv;
    std::string diagnostics;
};

/// Monte Carlo SER/BER sweep over the EbN0 grid. Trials use seeds
/// base_seed + trial_index and merge in trial order, so worker count never
/// changes a byte of output. A frame that loses sync counts every bit and
/// symbol as errored. Throws RunError when every frame of every trial lost
/// sync.
inline BerOutput run_ber_sweep(const json& spec) {
    const BerSetup s = parse_ber_setup(spec);
    BerOutput out;
    out.csv = detail::spec_comment(spec);
    out.csv += "EbN0_dB,coded,symbols,symbol_errors,bits,bit_errors,ser,ber\n";
    out.diagnostics = detail::spec_comment(spec);
    out.diagnostics += "trial,seed,EbN0_dB,n_interferers,sync_offset,word_errors,bit_errors,symbols\n";

    long long frames_lost = 0, frames_total = 0;
    for (const std::optional<double>& ebn0 : s.ebn0_grid) {
        std::vector<detail::TrialOutcome> outcomes(static_cast<size_t>(s.trials));
        detail::for_each_trial(s.trials, s.workers,
                               [&](int t) { outcomes[static_cast<size_t>(t)] = detail::run_trial(s, ebn0, t); });

        long long symbols = 0, symbol_errors = 0, bits = 0, bit_errors = 0;
        const double ebn0_val = ebn0 ? *ebn0 : std::numeric_limits<double>::infinity();
        for (int t = 0; t < s.trials; ++t) {
            const detail::TrialOutcome& o = outcomes[static_cast<size_t>(t)];
            symbols += o.symbols;
            symbol_errors += o.symbol_errors;
            bits += o.bits;
            bit_errors += o.bit_errors;
            frames_lost += o.frames_lost;
            frames_total += o.frames_total;
            out.diagnostics += std::to_string(t) + ',' + std::to_string(o.seed) + ',' +
                               format_number(ebn0_val) + ',' + std::to_string(s.n_interferers) +
                               ',' + std::to_string(o.sync_offset) + ',' +
                               std::to_string(o.symbol_errors) + ',' +
                               std::to_string(o.bit_errors) + ',' + std::to_string(o.symbols) +
                               '\n';
        }
        out.csv += format_number(ebn0_val) + ',' + (s.coded ? "1," : "0,") +
                   std::to_string(symbols) + ',' + std::to_string(symbol_errors) + ',' +
                   std::to_string(bits) + ',' + std::to_string(bit_errors) + ',' +
                   format_number(symbols ? static_cast<double>(symbol_errors) / symbols : 0.0) +
                   ',' +
                   format_number(bits ? static_cast<double>(bit_errors) / bits : 0.0) + '\n';
    }
    if (frames_total > 0 && frames_lost == frames_total)
        throw RunError("ber: sync was lost on every frame of every trial");
    return out;
}

}  // namespace walshlink::simcli
