#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "walshlink/hadamard.hpp"

namespace walshlink::codebook {

/// Number of adjacent chip pairs with opposite sign. High counts mean dense
/// zero crossings, which matters for clock recovery on long runs.
inline int transitions(const ChipSequence& chips) {
    if (chips.empty()) throw std::invalid_argument("transitions: empty sequence");
    int n = 0;
    for (size_t i = 1; i < chips.size(); ++i)
        if (chips[i] != chips[i - 1]) ++n;
    return n;
}

/// Bi-orthogonal constellation carved out of a Hadamard matrix: 2^(K-1) data
/// codes plus their complements carry K bits per symbol. The top bit of a word
/// selects the complement, the low K-1 bits index the data code. The sync code
/// is the next-ranked spare balanced row; it is absent only when the matrix
/// has no row left over (the order-2 toy case).
struct Codebook {
    int order = 0;
    int bits_per_symbol = 0;
    std::vector<ChipSequence> data_codes;
    std::optional<ChipSequence> sync_code;
    std::vector<ChipSequence> unused;

    int num_words() const { return 1 << bits_per_symbol; }

    int code_index(uint32_t word) const {
        return static_cast<int>(word & ((1u << (bits_per_symbol - 1)) - 1u));
    }

    bool complement_flag(uint32_t word) const {
        return ((word >> (bits_per_symbol - 1)) & 1u) != 0;
    }
};

/// Pick data codes from the balanced (zero-sum) rows, preferring dense
/// transitions; ties go to the lower original row index. The all-ones row and
/// any unbalanced rows are never selected.
inline Codebook select_codebook(const HadamardMatrix& h, int bits_per_symbol) {
    if (bits_per_symbol < 1 || bits_per_symbol > 12)
        throw std::invalid_argument("select_codebook: bits_per_symbol must be in [1, 12]");
    const int n_data = 1 << (bits_per_symbol - 1);

    std::vector<int> balanced;
    std::vector<int> excluded;
    for (int i = 0; i < h.order; ++i) {
        long long sum = 0;
        bool all_ones = true;
        for (int v : h.rows[static_cast<size_t>(i)]) {
            sum += v;
            all_ones = all_ones && v == 1;
        }
        if (!all_ones && sum == 0)
            balanced.push_back(i);
        else
            excluded.push_back(i);
    }
    if (static_cast<int>(balanced.size()) < n_data)
        throw std::invalid_argument("select_codebook: order " + std::to_string(h.order) +
                                    " has too few balanced rows for K=" +
                                    std::to_string(bits_per_symbol));

    std::sort(balanced.begin(), balanced.end(), [&](int a, int b) {
        const int ta = transitions(h.rows[static_cast<size_t>(a)]);
        const int tb = transitions(h.rows[static_cast<size_t>(b)]);
        return ta != tb ? ta > tb : a < b;
    });

    Codebook cb;
    cb.order = h.order;
    cb.bits_per_symbol = bits_per_symbol;
    for (int i = 0; i < n_data; ++i)
        cb.data_codes.push_back(h.rows[static_cast<size_t>(balanced[static_cast<size_t>(i)])]);
    size_t next = static_cast<size_t>(n_data);
    if (next < balanced.size()) cb.sync_code = h.rows[static_cast<size_t>(balanced[next++])];
    for (size_t i = next; i < balanced.size(); ++i)
        cb.unused.push_back(h.rows[static_cast<size_t>(balanced[i])]);
    for (int i : excluded) cb.unused.push_back(h.rows[static_cast<size_t>(i)]);
    return cb;
}

/// Map a K-bit word to its transmit sequence.
inline ChipSequence encode_bits(const Codebook& cb, uint32_t word) {
    if (word >= (1u << cb.bits_per_symbol))
        throw std::out_of_range("encode_bits: word out of range for K=" +
                                std::to_string(cb.bits_per_symbol));
    ChipSequence chips = cb.data_codes[static_cast<size_t>(cb.code_index(word))];
    if (cb.complement_flag(word))
        for (int& v : chips) v = -v;
    return chips;
}

namespace detail {

inline std::string chips_to_string(const ChipSequence& chips) {
    std::string out;
    for (size_t i = 0; i < chips.size(); ++i) {
        if (i) out += ' ';
        out += chips[i] > 0 ? "+1" : "-1";
    }
    return out;
}

}  // namespace detail

/// CSV listing of the constellation: word,complement_flag,chips. Words are
/// K-character binary strings, MSB first; a final row lists the sync code.
inline std::string codebook_csv(const Codebook& cb) {
    std::string out = "word,complement_flag,chips\n";
    for (uint32_t w = 0; w < static_cast<uint32_t>(cb.num_words()); ++w) {
        std::string bits(static_cast<size_t>(cb.bits_per_symbol), '0');
        for (int b = 0; b < cb.bits_per_symbol; ++b)
            if ((w >> (cb.bits_per_symbol - 1 - b)) & 1u) bits[static_cast<size_t>(b)] = '1';
        out += bits;
        out += cb.complement_flag(w) ? ",1," : ",0,";
        out += detail::chips_to_string(encode_bits(cb, w));
        out += '\n';
    }
    if (cb.sync_code) {
        out += "sync,0,";
        out += detail::chips_to_string(*cb.sync_code);
        out += '\n';
    }
    return out;
}

}  // namespace walshlink::codebook
