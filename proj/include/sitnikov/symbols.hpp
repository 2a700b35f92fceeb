#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace sitnikov {

/// Finite word over {-1,+1}.
class SymbolWord {
public:
    explicit SymbolWord(std::vector<int> symbols);

    /// Parse a string over {+,-}, e.g. "+++---".
    static SymbolWord parse(std::string_view text);

    std::string str() const;

    int size() const { return static_cast<int>(symbols_.size()); }
    int at(int j) const { return symbols_[static_cast<std::size_t>(j)]; }
    const std::vector<int>& symbols() const { return symbols_; }

    bool operator==(const SymbolWord&) const = default;

private:
    std::vector<int> symbols_;
};

/// Lengths of maximal runs of equal symbols, in order. In cyclic mode the
/// first and last runs merge when their symbols match.
std::vector<int> block_lengths(const SymbolWord& w, bool cyclic);

/// Membership in the class of sequences whose runs all have length >= 3.
bool in_m(const SymbolWord& w, bool cyclic);

/// N-periodic symbol sequence; word index 0 corresponds to time 0.
/// Invariants: N >= 6, not constant, every cyclic run length >= 3.
class PeriodicSymbols {
public:
    explicit PeriodicSymbols(SymbolWord word);
    static PeriodicSymbols parse(std::string_view text) { return PeriodicSymbols(SymbolWord::parse(text)); }

    int period() const { return word_.size(); }
    const SymbolWord& word() const { return word_; }

    /// Periodic extension at any integer n.
    int at(long n) const {
        const int N = word_.size();
        long j = n % N;
        if (j < 0) j += N;
        return word_.at(static_cast<int>(j));
    }

    bool symmetric() const { return symmetric_; }

    bool operator==(const PeriodicSymbols&) const = default;

private:
    SymbolWord word_;
    bool symmetric_;
};

/// word[j] == word[(N-j) mod N] for all j, i.e. a_n = a_{-n}.
bool in_s(const PeriodicSymbols& b);

/// Bi-infinite sequence: b_minus extension for n <= k_minus - 1, middle on
/// [k_minus, k_plus], b_plus extension for n >= k_plus + 1. Offsets are
/// canonical: k_plus = max{n : a_n != b+_n}, k_minus = min{n : a_n != b-_n}.
struct ConnectionSpec {
    PeriodicSymbols b_minus;
    PeriodicSymbols b_plus;
    SymbolWord middle;
    long k_minus = 0;
    long k_plus = 0;

    /// Build and validate a spec with `middle` placed starting at integer
    /// time `middle_start`. Offsets are recomputed canonically and the middle
    /// trimmed to [k_minus, k_plus]. Throws std::invalid_argument on:
    /// non-symmetric b±, trivial specs (no defect), k_minus >= k_plus after
    /// canonicalization, or any assembled run shorter than 3.
    static ConnectionSpec make(PeriodicSymbols b_minus, PeriodicSymbols b_plus, SymbolWord middle,
                               long middle_start);

    bool operator==(const ConnectionSpec&) const = default;
};

/// Total evaluator n -> a_n for a validated ConnectionSpec.
class AssembledSymbols {
public:
    explicit AssembledSymbols(ConnectionSpec spec) : spec_(std::move(spec)) {}

    int at(long n) const {
        if (n < spec_.k_minus) return spec_.b_minus.at(n);
        if (n > spec_.k_plus) return spec_.b_plus.at(n);
        return spec_.middle.at(static_cast<int>(n - spec_.k_minus));
    }

    const ConnectionSpec& spec() const { return spec_; }

private:
    ConnectionSpec spec_;
};

}  // namespace sitnikov
