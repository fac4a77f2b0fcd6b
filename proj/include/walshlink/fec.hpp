#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "walshlink/common.hpp"

namespace walshlink::fec {

using Bits = std::vector<uint8_t>;

/// Regular LDPC code with a systematic encoder: codeword = [info | parity].
/// row_cols/col_rows hold the sparse parity-check matrix in both orientations;
/// parity_of_info packs the dense GF(2) map from info bits to parity bits.
struct LdpcCode {
    int n = 0;
    int k = 0;
    int w_c = 0;
    int w_r = 0;
    std::vector<std::vector<int>> row_cols;
    std::vector<std::vector<int>> col_rows;
    std::vector<std::vector<uint64_t>> parity_of_info;
};

namespace detail {

/// Random (w_c, w_r)-regular edge assignment via stub matching, with repeated
/// random swaps to clear duplicate (column, row) incidences. Returns empty on
/// repair failure so the caller can redraw.
inline std::vector<std::vector<int>> regular_edges(int n, int w_c, int w_r,
                                                   std::mt19937_64& gen) {
    const int e_total = n * w_c;
    std::vector<int> slot(static_cast<size_t>(e_total));
    for (int e = 0; e < e_total; ++e) slot[static_cast<size_t>(e)] = e;
    for (int i = e_total - 1; i > 0; --i) {
        const int j = static_cast<int>(gen() % static_cast<uint64_t>(i + 1));
        std::swap(slot[static_cast<size_t>(i)], slot[static_cast<size_t>(j)]);
    }
    auto row_of = [&](int stub) { return slot[static_cast<size_t>(stub)] / w_r; };
    auto col_of = [&](int stub) { return stub / w_c; };
    auto duplicates = [&](int col, int stub_excl, int row_val) {
        for (int s = col * w_c; s < (col + 1) * w_c; ++s)
            if (s != stub_excl && row_of(s) == row_val) return true;
        return false;
    };

    bool clean = false;
    for (int pass = 0; pass < 100 && !clean; ++pass) {
        clean = true;
        for (int s = 0; s < e_total; ++s) {
            if (!duplicates(col_of(s), s, row_of(s))) continue;
            clean = false;
            for (int tries = 0; tries < 50; ++tries) {
                const int o = static_cast<int>(gen() % static_cast<uint64_t>(e_total));
                if (col_of(o) == col_of(s)) continue;
                if (duplicates(col_of(s), s, row_of(o))) continue;
                if (duplicates(col_of(o), o, row_of(s))) continue;
                std::swap(slot[static_cast<size_t>(s)], slot[static_cast<size_t>(o)]);
                break;
            }
        }
    }
    if (!clean) return {};

    std::vector<std::vector<int>> col_rows(static_cast<size_t>(n));
    for (int c = 0; c < n; ++c) {
        auto& rows = col_rows[static_cast<size_t>(c)];
        rows.reserve(static_cast<size_t>(w_c));
        for (int s = c * w_c; s < (c + 1) * w_c; ++s) rows.push_back(row_of(s));
        std::sort(rows.begin(), rows.end());
    }
    return col_rows;
}

inline bool contains(const std::vector<int>& v, int x) {
    return std::find(v.begin(), v.end(), x) != v.end();
}

/// 4-cycles touching column c: sum over partner columns of C(shared rows, 2).
inline long long column_cycles(const std::vector<std::vector<int>>& col_rows,
                               const std::vector<std::vector<int>>& row_cols, int c,
                               std::vector<int>& scratch) {
    long long acc = 0;
    std::vector<int> touched;
    for (int r : col_rows[static_cast<size_t>(c)])
        for (int c2 : row_cols[static_cast<size_t>(r)]) {
            if (c2 == c) continue;
            if (scratch[static_cast<size_t>(c2)]++ == 0) touched.push_back(c2);
        }
    for (int c2 : touched) {
        const long long s = scratch[static_cast<size_t>(c2)];
        acc += s * (s - 1) / 2;
        scratch[static_cast<size_t>(c2)] = 0;
    }
    return acc;
}

inline long long shared_count(const std::vector<int>& a, const std::vector<int>& b) {
    long long s = 0;
    for (int r : a)
        if (contains(b, r)) ++s;
    return s;
}

/// Greedy 4-cycle reduction: find a column pair sharing two rows and try edge
/// swaps with random partners, accepting only strict decreases in the local
/// cycle count.
inline void reduce_4cycles(std::vector<std::vector<int>>& col_rows, int n, int m,
                           std::mt19937_64& gen) {
    std::vector<std::vector<int>> row_cols(static_cast<size_t>(m));
    auto rebuild = [&] {
        for (auto& rc : row_cols) rc.clear();
        for (int c = 0; c < n; ++c)
            for (int r : col_rows[static_cast<size_t>(c)])
                row_cols[static_cast<size_t>(r)].push_back(c);
    };
    auto swap_edges = [&](int c1, int r1, int c2, int r2) {
        auto& a = col_rows[static_cast<size_t>(c1)];
        auto& b = col_rows[static_cast<size_t>(c2)];
        *std::find(a.begin(), a.end(), r1) = r2;
        *std::find(b.begin(), b.end(), r2) = r1;
        auto& ra = row_cols[static_cast<size_t>(r1)];
        auto& rb = row_cols[static_cast<size_t>(r2)];
        *std::find(ra.begin(), ra.end(), c1) = c2;
        *std::find(rb.begin(), rb.end(), c2) = c1;
    };
    std::vector<int> scratch(static_cast<size_t>(n), 0);

    rebuild();
    for (int pass = 0; pass < 8; ++pass) {
        bool offenders = false;
        for (int c = 0; c < n; ++c) {
            // locate a partner sharing at least two rows with c
            int partner = -1;
            for (int r : col_rows[static_cast<size_t>(c)])
                for (int c2 : row_cols[static_cast<size_t>(r)])
                    if (c2 != c && ++scratch[static_cast<size_t>(c2)] == 2 && partner < 0)
                        partner = c2;
            for (int r : col_rows[static_cast<size_t>(c)])
                for (int c2 : row_cols[static_cast<size_t>(r)])
                    if (c2 != c) scratch[static_cast<size_t>(c2)] = 0;
            if (partner < 0) continue;
            offenders = true;

            // second row shared with the partner is the edge to move
            int bad_row = -1;
            int seen = 0;
            for (int r : col_rows[static_cast<size_t>(c)])
                if (contains(row_cols[static_cast<size_t>(r)], partner) && ++seen == 2) bad_row = r;
            if (bad_row < 0) continue;

            for (int tries = 0; tries < 30; ++tries) {
                const int c3 = static_cast<int>(gen() % static_cast<uint64_t>(n));
                if (c3 == c) continue;
                const auto& cand = col_rows[static_cast<size_t>(c3)];
                const int r3 = cand[gen() % cand.size()];
                if (contains(col_rows[static_cast<size_t>(c)], r3)) continue;
                if (contains(cand, bad_row)) continue;
                const long long cross0 = shared_count(col_rows[static_cast<size_t>(c)], cand);
                const long long before = column_cycles(col_rows, row_cols, c, scratch) +
                                         column_cycles(col_rows, row_cols, c3, scratch) -
                                         cross0 * (cross0 - 1) / 2;
                swap_edges(c, bad_row, c3, r3);
                const long long cross1 = shared_count(col_rows[static_cast<size_t>(c)], cand);
                const long long after = column_cycles(col_rows, row_cols, c, scratch) +
                                        column_cycles(col_rows, row_cols, c3, scratch) -
                                        cross1 * (cross1 - 1) / 2;
                if (after < before) break;
                swap_edges(c, r3, c3, bad_row);
            }
        }
        if (!offenders) break;
    }
    for (auto& rows : col_rows) std::sort(rows.begin(), rows.end());
}

inline bool get_bit(const std::vector<uint64_t>& row, int col) {
    return (row[static_cast<size_t>(col >> 6)] >> (col & 63)) & 1u;
}

inline void xor_rows(std::vector<uint64_t>& dst, const std::vector<uint64_t>& src) {
    for (size_t i = 0; i < dst.size(); ++i) dst[i] ^= src[i];
}

}  // namespace detail

/// Build a (w_c, w_r)-regular parity-check code: random regular edge
/// assignment, greedy 4-cycle reduction, then a GF(2) rank check. Columns are
/// permuted so the codeword layout is [info | parity]; seeds that land on a
/// rank-deficient matrix are redrawn deterministically. Throws when no
/// full-rank instance is found.
inline LdpcCode build_gallager(int n, int w_c, int w_r, uint64_t seed) {
    if (n < 2 || n > 4096) throw std::invalid_argument("build_gallager: n must be in [2, 4096]");
    if (w_c < 2) throw std::invalid_argument("build_gallager: w_c must be at least 2");
    if (w_r <= w_c)
        throw std::invalid_argument("build_gallager: w_r must exceed w_c for a positive rate");
    if ((static_cast<long long>(n) * w_c) % w_r != 0)
        throw std::invalid_argument("build_gallager: n*w_c/w_r must be an integer row count");
    const int m = n * w_c / w_r;
    const int kbits = n - m;
    const int nwords = (n + 63) / 64;

    for (int attempt = 0; attempt < 50; ++attempt) {
        std::mt19937_64 gen(splitmix64(seed + 0x9e3779b97f4a7c15ull * static_cast<uint64_t>(attempt)));
        std::vector<std::vector<int>> col_rows = detail::regular_edges(n, w_c, w_r, gen);
        if (col_rows.empty()) continue;
        detail::reduce_4cycles(col_rows, n, m, gen);

        std::vector<std::vector<uint64_t>> h(
            static_cast<size_t>(m), std::vector<uint64_t>(static_cast<size_t>(nwords), 0));
        for (int c = 0; c < n; ++c)
            for (int r : col_rows[static_cast<size_t>(c)])
                h[static_cast<size_t>(r)][static_cast<size_t>(c >> 6)] |= 1ull << (c & 63);

        std::vector<int> pivot_cols;
        int rank = 0;
        for (int col = 0; col < n && rank < m; ++col) {
            int prow = -1;
            for (int r = rank; r < m; ++r)
                if (detail::get_bit(h[static_cast<size_t>(r)], col)) {
                    prow = r;
                    break;
                }
            if (prow < 0) continue;
            std::swap(h[static_cast<size_t>(rank)], h[static_cast<size_t>(prow)]);
            for (int r = 0; r < m; ++r)
                if (r != rank && detail::get_bit(h[static_cast<size_t>(r)], col))
                    detail::xor_rows(h[static_cast<size_t>(r)], h[static_cast<size_t>(rank)]);
            pivot_cols.push_back(col);
            ++rank;
        }
        if (rank < m) continue;

        std::vector<int> free_cols;
        free_cols.reserve(static_cast<size_t>(kbits));
        {
            std::vector<char> is_pivot(static_cast<size_t>(n), 0);
            for (int c : pivot_cols) is_pivot[static_cast<size_t>(c)] = 1;
            for (int c = 0; c < n; ++c)
                if (!is_pivot[static_cast<size_t>(c)]) free_cols.push_back(c);
        }
        std::vector<int> new_of_old(static_cast<size_t>(n));
        for (int j = 0; j < kbits; ++j) new_of_old[static_cast<size_t>(free_cols[static_cast<size_t>(j)])] = j;
        for (int i = 0; i < m; ++i)
            new_of_old[static_cast<size_t>(pivot_cols[static_cast<size_t>(i)])] = kbits + i;

        LdpcCode code;
        code.n = n;
        code.k = kbits;
        code.w_c = w_c;
        code.w_r = w_r;
        code.col_rows.assign(static_cast<size_t>(n), {});
        code.row_cols.assign(static_cast<size_t>(m), {});
        for (int c = 0; c < n; ++c) {
            const int nc = new_of_old[static_cast<size_t>(c)];
            for (int r : col_rows[static_cast<size_t>(c)]) {
                code.col_rows[static_cast<size_t>(nc)].push_back(r);
                code.row_cols[static_cast<size_t>(r)].push_back(nc);
            }
        }
        for (auto& v : code.col_rows) std::sort(v.begin(), v.end());
        for (auto& v : code.row_cols) std::sort(v.begin(), v.end());

        const int kwords = (kbits + 63) / 64;
        code.parity_of_info.assign(static_cast<size_t>(m),
                                   std::vector<uint64_t>(static_cast<size_t>(std::max(kwords, 1)), 0));
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < kbits; ++j)
                if (detail::get_bit(h[static_cast<size_t>(i)], free_cols[static_cast<size_t>(j)]))
                    code.parity_of_info[static_cast<size_t>(i)][static_cast<size_t>(j >> 6)] |=
                        1ull << (j & 63);
        return code;
    }
    throw std::runtime_error("build_gallager: no full-rank matrix found for this seed");
}

/// Systematic encoding: info bits verbatim, parity bits from the stored GF(2)
/// map.
inline Bits encode(const LdpcCode& code, const Bits& info) {
    if (static_cast<int>(info.size()) != code.k)
        throw std::invalid_argument("encode: info length must be k");
    Bits cw(static_cast<size_t>(code.n), 0);
    std::copy(info.begin(), info.end(), cw.begin());
    const size_t kwords = code.parity_of_info.empty() ? 0 : code.parity_of_info[0].size();
    std::vector<uint64_t> iv(kwords, 0);
    for (int j = 0; j < code.k; ++j)
        if (info[static_cast<size_t>(j)])
            iv[static_cast<size_t>(j >> 6)] |= 1ull << (j & 63);
    for (int r = 0; r < code.n - code.k; ++r) {
        uint64_t acc = 0;
        for (size_t w = 0; w < kwords; ++w) acc ^= code.parity_of_info[static_cast<size_t>(r)][w] & iv[w];
        cw[static_cast<size_t>(code.k + r)] = static_cast<uint8_t>(std::popcount(acc) & 1);
    }
    return cw;
}

inline bool check_syndrome(const LdpcCode& code, const Bits& cw) {
    if (static_cast<int>(cw.size()) != code.n)
        throw std::invalid_argument("check_syndrome: length mismatch");
    for (const auto& row : code.row_cols) {
        int acc = 0;
        for (int c : row) acc ^= cw[static_cast<size_t>(c)];
        if (acc) return false;
    }
    return true;
}

struct DecodeResult {
    Bits bits;
    bool converged = false;
    int iterations = 0;
};

/// Normalized min-sum belief propagation (factor 0.75), syndrome-checked at
/// the top of each iteration so a clean codeword returns immediately.
/// Non-convergence is reported through the flag, never an error.
inline DecodeResult decode(const LdpcCode& code, const std::vector<double>& llrs,
                           int max_iter = 50) {
    if (static_cast<int>(llrs.size()) != code.n)
        throw std::invalid_argument("decode: llrs length must be n");
    if (max_iter < 1) throw std::invalid_argument("decode: max_iter must be at least 1");
    for (double v : llrs)
        if (!std::isfinite(v)) throw std::invalid_argument("decode: LLRs must be finite");
    constexpr double alpha = 0.75;
    const int m = code.n - code.k;

    std::vector<int> row_start(static_cast<size_t>(m) + 1, 0);
    for (int r = 0; r < m; ++r)
        row_start[static_cast<size_t>(r) + 1] =
            row_start[static_cast<size_t>(r)] + static_cast<int>(code.row_cols[static_cast<size_t>(r)].size());
    const int n_edges = row_start[static_cast<size_t>(m)];
    std::vector<int> edge_col(static_cast<size_t>(n_edges));
    std::vector<std::vector<int>> var_edges(static_cast<size_t>(code.n));
    for (int r = 0; r < m; ++r) {
        int e = row_start[static_cast<size_t>(r)];
        for (int c : code.row_cols[static_cast<size_t>(r)]) {
            edge_col[static_cast<size_t>(e)] = c;
            var_edges[static_cast<size_t>(c)].push_back(e);
            ++e;
        }
    }

    std::vector<double> v2c(static_cast<size_t>(n_edges));
    std::vector<double> c2v(static_cast<size_t>(n_edges), 0.0);
    for (int e = 0; e < n_edges; ++e) v2c[static_cast<size_t>(e)] = llrs[static_cast<size_t>(edge_col[static_cast<size_t>(e)])];
    std::vector<double> total(llrs);
    Bits hard(static_cast<size_t>(code.n));

    for (int iter = 0;; ++iter) {
        for (int v = 0; v < code.n; ++v) hard[static_cast<size_t>(v)] = total[static_cast<size_t>(v)] < 0;
        if (check_syndrome(code, hard)) return {hard, true, iter};
        if (iter == max_iter) return {hard, false, iter};

        for (int r = 0; r < m; ++r) {
            double min1 = std::numeric_limits<double>::infinity();
            double min2 = min1;
            int argmin = -1;
            bool neg = false;
            for (int e = row_start[static_cast<size_t>(r)]; e < row_start[static_cast<size_t>(r) + 1]; ++e) {
                const double v = v2c[static_cast<size_t>(e)];
                neg ^= v < 0;
                const double mag = std::abs(v);
                if (mag < min1) {
                    min2 = min1;
                    min1 = mag;
                    argmin = e;
                } else if (mag < min2) {
                    min2 = mag;
                }
            }
            for (int e = row_start[static_cast<size_t>(r)]; e < row_start[static_cast<size_t>(r) + 1]; ++e) {
                const double mag = e == argmin ? min2 : min1;
                const bool sign = neg ^ (v2c[static_cast<size_t>(e)] < 0);
                c2v[static_cast<size_t>(e)] = alpha * (sign ? -mag : mag);
            }
        }
        for (int v = 0; v < code.n; ++v) {
            double acc = llrs[static_cast<size_t>(v)];
            for (int e : var_edges[static_cast<size_t>(v)]) acc += c2v[static_cast<size_t>(e)];
            total[static_cast<size_t>(v)] = acc;
            for (int e : var_edges[static_cast<size_t>(v)])
                v2c[static_cast<size_t>(e)] = acc - c2v[static_cast<size_t>(e)];
        }
    }
}

/// Max-log bridge from the bi-orthogonal correlator to bit LLRs. The metrics
/// are the 2^(K-1) data-code correlations; complement words score the negated
/// correlation. noise_variance is the complex noise variance of one chip
/// estimate, which makes 2/noise_variance the exact log-likelihood scale for
/// the coherent chain. Positive LLR means bit 0.
inline std::vector<double> symbol_llrs_to_bit_llrs(const std::vector<double>& decision_metrics,
                                                   double noise_variance) {
    const size_t half = decision_metrics.size();
    if (half == 0 || (half & (half - 1)) != 0)
        throw std::invalid_argument("symbol_llrs_to_bit_llrs: metric count must be a power of two");
    if (!(noise_variance > 0) || !std::isfinite(noise_variance))
        throw std::invalid_argument("symbol_llrs_to_bit_llrs: degenerate noise variance");
    for (double v : decision_metrics)
        if (!std::isfinite(v))
            throw std::invalid_argument("symbol_llrs_to_bit_llrs: metrics must be finite");

    int kbits = 1;
    while ((1u << (kbits - 1)) < half) ++kbits;
    const uint32_t n_words = 1u << kbits;
    const double scale = 2.0 / noise_variance;
    std::vector<double> llrs(static_cast<size_t>(kbits));
    for (int b = 0; b < kbits; ++b) {
        double best0 = -std::numeric_limits<double>::infinity();
        double best1 = best0;
        for (uint32_t w = 0; w < n_words; ++w) {
            const double metric =
                w < half ? decision_metrics[w] : -decision_metrics[w - half];
            double& best = ((w >> (kbits - 1 - b)) & 1u) ? best1 : best0;
            if (metric > best) best = metric;
        }
        llrs[static_cast<size_t>(b)] = (best0 - best1) * scale;
    }
    return llrs;
}

/// Standard alist export: dimensions, max degrees, per-column and per-row
/// degrees, then 1-based index lists, columns first.
inline std::string to_alist(const LdpcCode& code) {
    const int m = code.n - code.k;
    std::string out = std::to_string(code.n) + " " + std::to_string(m) + "\n";
    out += std::to_string(code.w_c) + " " + std::to_string(code.w_r) + "\n";
    for (int c = 0; c < code.n; ++c)
        out += std::to_string(code.col_rows[static_cast<size_t>(c)].size()) + (c + 1 < code.n ? " " : "\n");
    for (int r = 0; r < m; ++r)
        out += std::to_string(code.row_cols[static_cast<size_t>(r)].size()) + (r + 1 < m ? " " : "\n");
    for (const auto& rows : code.col_rows) {
        for (size_t i = 0; i < rows.size(); ++i)
            out += std::to_string(rows[i] + 1) + (i + 1 < rows.size() ? " " : "");
        out += '\n';
    }
    for (const auto& cols : code.row_cols) {
        for (size_t i = 0; i < cols.size(); ++i)
            out += std::to_string(cols[i] + 1) + (i + 1 < cols.size() ? " " : "");
        out += '\n';
    }
    return out;
}

}  // namespace walshlink::fec
