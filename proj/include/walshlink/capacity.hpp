#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

namespace walshlink::capacity {

/// Link budget inputs, all linear units. Spread bandwidth and chip rate are
/// tied by W = bandwidth_factor * chip_rate.
struct LinkParams {
    double W = 0;                 // spread bandwidth, Hz
    double R = 0;                 // per-user information rate, bit/s
    double S = 1;                 // received power per user, W
    double N0 = 0;                // thermal noise density, W/Hz
    int n_users = 1;              // simultaneously active users
    double sinr_req = 1;          // post-despreading SINR needed by the demodulator
    double chip_rate = 0;         // chip/s
    double bandwidth_factor = 1;  // W / chip_rate
};

/// Narrowband interferer population: a fraction p of the spread band is
/// covered by interferers of power S_ni, one per W_ni-wide slice.
struct InterferenceEnv {
    double p = 0;
    double S_ni = 0;
    double W_ni = 1;
};

inline void validate(const LinkParams& lp) {
    if (!(lp.W > 0)) throw std::invalid_argument("link: W must be positive");
    if (!(lp.R > 0)) throw std::invalid_argument("link: R must be positive");
    if (lp.W < lp.R) throw std::invalid_argument("link: W must be at least R");
    if (!(lp.S > 0)) throw std::invalid_argument("link: S must be positive");
    if (lp.N0 < 0) throw std::invalid_argument("link: N0 must be non-negative");
    if (lp.n_users < 1) throw std::invalid_argument("link: n_users must be at least 1");
    if (!(lp.sinr_req > 0)) throw std::invalid_argument("link: sinr_req must be positive");
}

inline void validate(const InterferenceEnv& env) {
    if (env.p < 0 || env.p > 1) throw std::invalid_argument("interference: p must be in [0, 1]");
    if (env.S_ni < 0) throw std::invalid_argument("interference: S_ni must be non-negative");
    if (!(env.W_ni > 0)) throw std::invalid_argument("interference: W_ni must be positive");
}

/// Same-cell multiple-access interference density: the other n_users - 1
/// equal-power signals spread across W.
inline double self_interference(const LinkParams& lp) {
    return (lp.n_users - 1) * lp.S / lp.W;
}

/// Average narrowband interference density over the spread band; the W in
/// (p W / W_ni) interferers and the 1/W spreading cancel.
inline double narrowband_density(const InterferenceEnv& env) {
    return env.p * env.S_ni / env.W_ni;
}

/// Post-despreading SINR with thermal noise, same-cell users, and the
/// narrowband population all treated as flat noise over W.
inline double effective_sinr(const LinkParams& lp, const InterferenceEnv& env) {
    const double denom =
        lp.W * lp.N0 + (lp.n_users - 1) * lp.S + env.p * (lp.W / env.W_ni) * env.S_ni;
    if (denom <= 0) return std::numeric_limits<double>::infinity();
    return lp.S * (lp.W / lp.R) / denom;
}

/// Interference-limited user count, thermal noise ignored. The exact form
/// counts the user under test; the approximate form drops that +1 and is the
/// number aggregate-throughput figures quote.
inline double pole_capacity(const LinkParams& lp, bool exact = false) {
    const double base = (lp.W / lp.R) / lp.sinr_req;
    return exact ? 1.0 + base : base;
}

/// Exact pole capacity minus the narrowband interference toll, in users.
/// Falls below 1 when the interferers alone exceed the budget; callers
/// interpret that as an infeasible link.
inline double degraded_capacity(const LinkParams& lp, const InterferenceEnv& env) {
    return 1.0 + (lp.W / lp.R) / lp.sinr_req -
           env.p * (lp.W / env.W_ni) * (env.S_ni / lp.S);
}

/// Largest tolerable S_ni/S for a single user at rate R: the ratio at which
/// degraded capacity falls to exactly one user.
inline double max_interferer_ratio(const LinkParams& lp, const InterferenceEnv& env) {
    if (env.p <= 0) return std::numeric_limits<double>::infinity();
    return (env.W_ni / lp.R) / (env.p * lp.sinr_req);
}

/// Largest single-user rate sustainable against the given interferer
/// population, by the same one-user threshold.
inline double max_rate(const LinkParams& lp, const InterferenceEnv& env) {
    const double d = lp.sinr_req * env.p * (env.S_ni / lp.S);
    if (d <= 0) return std::numeric_limits<double>::infinity();
    return env.W_ni / d;
}

/// Bit rate of one M-ary user: K bits per N-chip symbol at the chip rate.
inline double mary_bit_rate(double chip_rate, int code_length, int bits_per_symbol) {
    if (!(chip_rate > 0)) throw std::invalid_argument("mary_bit_rate: chip_rate must be positive");
    if (code_length < 1) throw std::invalid_argument("mary_bit_rate: code_length must be positive");
    if (bits_per_symbol < 1)
        throw std::invalid_argument("mary_bit_rate: bits_per_symbol must be positive");
    return bits_per_symbol * chip_rate / code_length;
}

/// Everything the capacity table reports for one operating point. I_oc
/// (other-field interference) is carried for traceability but fixed to zero:
/// only one buoy field transmits.
struct CapacityReport {
    double E_b = 0;   // J/bit
    double I_sc = 0;  // same-cell density, W/Hz
    double I_ni = 0;  // narrowband density, W/Hz
    double I_oc = 0;  // other-field density, always 0
    double I_0 = 0;   // total interference density, W/Hz
    double sinr = 0;
    double N_pole = 0;  // approximate form
    double N_pole_exact = 0;
    double N_degraded = 0;
    double max_ratio = 0;     // S_ni/S, linear
    double max_rate_bps = 0;  // bit/s
};

inline CapacityReport analyze(const LinkParams& lp, const InterferenceEnv& env) {
    validate(lp);
    validate(env);
    CapacityReport r;
    r.E_b = lp.S / lp.R;
    r.I_sc = self_interference(lp);
    r.I_ni = narrowband_density(env);
    r.I_oc = 0.0;
    r.I_0 = r.I_sc + r.I_ni + r.I_oc;
    r.sinr = effective_sinr(lp, env);
    r.N_pole = pole_capacity(lp, false);
    r.N_pole_exact = pole_capacity(lp, true);
    r.N_degraded = degraded_capacity(lp, env);
    r.max_ratio = max_interferer_ratio(lp, env);
    r.max_rate_bps = max_rate(lp, env);
    return r;
}

}  // namespace walshlink::capacity
