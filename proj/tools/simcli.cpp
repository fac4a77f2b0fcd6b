// Command-line front end: loads an experiment spec (JSON), runs the chosen
// analysis or simulation, writes CSV to --out or stdout.
//
// Exit codes: 0 success, 1 unusable spec or bad invocation, 2 runtime
// failure (unwritable output, sync lost on every trial, ...).

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "walshlink/simcli.hpp"

namespace {

using nlohmann::json;
using walshlink::simcli::RunError;
using walshlink::simcli::SpecError;

json load_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SpecError("spec file missing: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw SpecError("spec file invalid JSON: " + std::string(e.what()));
    }
    if (!j.is_object()) throw SpecError("spec file must hold a JSON object");
    return j;
}

void emit(const std::string& text, const std::string& path) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw RunError("cannot open output file: " + path);
    out << text;
    if (!out) throw RunError("write failed: " + path);
}

struct Overrides {
    std::optional<uint64_t> seed;
    std::optional<int> trials;
    std::optional<int> workers;

    // folded into the spec before hashing so the emitted spec_hash covers
    // everything that shaped the run
    void apply(json& spec) const {
        if (seed) spec["seed"] = *seed;
        if (trials) spec["trials"] = *trials;
        if (workers) spec["workers"] = *workers;
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Walsh-link capacity and error-rate simulator"};
    app.require_subcommand(1);

    std::string spec_path, out_path, diag_path;
    Overrides ov;
    uint64_t seed_arg = 0;
    int trials_arg = 0, workers_arg = 0;

    auto add_common = [&](CLI::App* sub, bool with_diag) {
        sub->add_option("--spec", spec_path, "experiment spec (JSON)")->required();
        sub->add_option("--out", out_path, "output CSV path (default stdout)");
        if (with_diag)
            sub->add_option("--diag", diag_path, "per-trial diagnostics CSV path");
        sub->add_option("--seed", seed_arg, "override spec seed");
        sub->add_option("--trials", trials_arg, "override spec trial count");
        sub->add_option("--workers", workers_arg, "override spec worker count");
    };

    CLI::App* cap = app.add_subcommand("capacity", "user-capacity table over a sweep");
    CLI::App* ber = app.add_subcommand("ber", "Monte Carlo symbol/bit error rates");
    CLI::App* thr = app.add_subcommand("throughput", "aggregate vs single-user throughput");
    CLI::App* cbk = app.add_subcommand("codebook", "dump the selected code set");
    add_common(cap, false);
    add_common(ber, true);
    add_common(thr, false);
    add_common(cbk, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    for (const CLI::App* sub : app.get_subcommands()) {
        if (sub->count("--seed")) ov.seed = seed_arg;
        if (sub->count("--trials")) ov.trials = trials_arg;
        if (sub->count("--workers")) ov.workers = workers_arg;
    }

    try {
        json spec = load_spec(spec_path);
        ov.apply(spec);
        if (cap->parsed()) {
            emit(walshlink::simcli::run_capacity_table(spec), out_path);
        } else if (ber->parsed()) {
            const walshlink::simcli::BerOutput r = walshlink::simcli::run_ber_sweep(spec);
            emit(r.csv, out_path);
            if (!diag_path.empty()) emit(r.diagnostics, diag_path);
        } else if (thr->parsed()) {
            emit(walshlink::simcli::run_throughput_compare(spec), out_path);
        } else {
            emit(walshlink::simcli::dump_codebook(spec), out_path);
        }
    } catch (const SpecError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const RunError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
