#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace walshlink::codebook {

/// A spreading sequence; chips are +1 or -1.
using ChipSequence = std::vector<int>;

/// Square +/-1 matrix with mutually orthogonal rows, kept in standard form
/// (first row and first column all +1).
struct HadamardMatrix {
    int order = 0;
    std::vector<ChipSequence> rows;
};

/// Integer dot product of two equal-length chip sequences.
inline long long chip_correlation(const ChipSequence& a, const ChipSequence& b) {
    if (a.size() != b.size()) throw std::invalid_argument("chip_correlation: length mismatch");
    long long acc = 0;
    for (size_t i = 0; i < a.size(); ++i) acc += static_cast<long long>(a[i]) * b[i];
    return acc;
}

namespace detail {

inline bool is_prime(int q) {
    if (q < 2) return false;
    for (int d = 2; d * d <= q; ++d)
        if (q % d == 0) return false;
    return true;
}

}  // namespace detail

/// [[H, H], [H, -H]]; doubles the order and preserves standard form.
inline HadamardMatrix double_order(const HadamardMatrix& h) {
    const int n = h.order;
    HadamardMatrix d;
    d.order = 2 * n;
    d.rows.assign(static_cast<size_t>(2 * n), ChipSequence(static_cast<size_t>(2 * n)));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const int v = h.rows[i][j];
            d.rows[i][j] = v;
            d.rows[i][j + n] = v;
            d.rows[i + n][j] = v;
            d.rows[i + n][j + n] = -v;
        }
    return d;
}

/// Sylvester construction: m doublings from the order-1 matrix, order 2^m.
inline HadamardMatrix sylvester(int m) {
    if (m < 0 || m > 10) throw std::invalid_argument("sylvester: m must be in [0, 10]");
    HadamardMatrix h;
    h.order = 1;
    h.rows = {ChipSequence{1}};
    for (int i = 0; i < m; ++i) h = double_order(h);
    return h;
}

/// Paley type-I construction of order q+1 from the quadratic residues mod q.
/// H = I + C where C is the skew conference matrix built from the Jacobsthal
/// matrix Q[i][j] = chi(j - i); rows are then flipped into standard form.
inline HadamardMatrix paley(int q) {
    if (!detail::is_prime(q)) throw std::invalid_argument("paley: q must be prime");
    if (q % 4 != 3) throw std::invalid_argument("paley: q must be 3 (mod 4)");
    if (q + 1 > 64) throw std::invalid_argument("paley: order q+1 exceeds 64");
    const int n = q + 1;
    std::vector<int> chi(static_cast<size_t>(q), -1);
    chi[0] = 0;
    for (int x = 1; x < q; ++x) chi[static_cast<size_t>((x * x) % q)] = 1;

    HadamardMatrix h;
    h.order = n;
    h.rows.assign(static_cast<size_t>(n), ChipSequence(static_cast<size_t>(n), 1));
    for (int i = 0; i < q; ++i) {
        h.rows[i + 1][0] = -1;
        for (int j = 0; j < q; ++j)
            h.rows[i + 1][j + 1] = (i == j) ? 1 : chi[static_cast<size_t>(((j - i) % q + q) % q)];
    }
    for (int i = 1; i < n; ++i)
        if (h.rows[i][0] < 0)
            for (int& v : h.rows[i]) v = -v;
    return h;
}

/// Build an order-N matrix: powers of two up to 64 via Sylvester, 12 and 20
/// via Paley, 24 and 40 by doubling the Paley matrices.
inline HadamardMatrix build_hadamard(int order) {
    switch (order) {
        case 12: return paley(11);
        case 20: return paley(19);
        case 24: return double_order(paley(11));
        case 40: return double_order(paley(19));
        default: break;
    }
    if (order >= 1 && order <= 64 && (order & (order - 1)) == 0) {
        int m = 0;
        while ((1 << m) < order) ++m;
        return sylvester(m);
    }
    throw std::invalid_argument("build_hadamard: unsupported order " + std::to_string(order));
}

}  // namespace walshlink::codebook
