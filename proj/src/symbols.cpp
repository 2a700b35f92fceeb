#include "sitnikov/symbols.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace sitnikov {

SymbolWord::SymbolWord(std::vector<int> symbols) : symbols_(std::move(symbols)) {
    if (symbols_.empty()) throw std::invalid_argument("SymbolWord: empty word");
    for (int s : symbols_)
        if (s != 1 && s != -1) throw std::invalid_argument("SymbolWord: entries must be +1 or -1");
}

SymbolWord SymbolWord::parse(std::string_view text) {
    std::vector<int> out;
    out.reserve(text.size());
    for (char c : text) {
        if (c == '+')
            out.push_back(1);
        else if (c == '-')
            out.push_back(-1);
        else
            throw std::invalid_argument("SymbolWord: expected a string over {+,-}");
    }
    return SymbolWord(std::move(out));
}

std::string SymbolWord::str() const {
    std::string s;
    s.reserve(symbols_.size());
    for (int v : symbols_) s.push_back(v > 0 ? '+' : '-');
    return s;
}

std::vector<int> block_lengths(const SymbolWord& w, bool cyclic) {
    std::vector<int> runs;
    std::vector<int> run_symbol;
    int count = 1;
    for (int j = 1; j < w.size(); ++j) {
        if (w.at(j) == w.at(j - 1)) {
            ++count;
        } else {
            runs.push_back(count);
            run_symbol.push_back(w.at(j - 1));
            count = 1;
        }
    }
    runs.push_back(count);
    run_symbol.push_back(w.at(w.size() - 1));
    if (cyclic && runs.size() > 1 && run_symbol.front() == run_symbol.back()) {
        runs.back() += runs.front();
        runs.erase(runs.begin());
    }
    return runs;
}

bool in_m(const SymbolWord& w, bool cyclic) {
    const auto runs = block_lengths(w, cyclic);
    return std::all_of(runs.begin(), runs.end(), [](int k) { return k >= 3; });
}

PeriodicSymbols::PeriodicSymbols(SymbolWord word) : word_(std::move(word)) {
    const int n = word_.size();
    if (n < 6) throw std::invalid_argument("PeriodicSymbols: period must be at least 6");
    const bool constant =
        std::all_of(word_.symbols().begin(), word_.symbols().end(), [&](int s) { return s == word_.at(0); });
    if (constant) throw std::invalid_argument("PeriodicSymbols: constant words are excluded");
    if (!in_m(word_, /*cyclic=*/true))
        throw std::invalid_argument("PeriodicSymbols: every cyclic run must have length >= 3");
    symmetric_ = true;
    for (int j = 0; j < n; ++j)
        if (word_.at(j) != word_.at((n - j) % n)) {
            symmetric_ = false;
            break;
        }
}

bool in_s(const PeriodicSymbols& b) { return b.symmetric(); }

namespace {

// Raw assembly before canonicalization: middle placed on [start, start+len-1].
int raw_at(const PeriodicSymbols& bm, const PeriodicSymbols& bp, const SymbolWord& mid, long start, long n) {
    const long end = start + mid.size() - 1;
    if (n < start) return bm.at(n);
    if (n > end) return bp.at(n);
    return mid.at(static_cast<int>(n - start));
}

}  // namespace

ConnectionSpec ConnectionSpec::make(PeriodicSymbols b_minus, PeriodicSymbols b_plus, SymbolWord middle,
                                    long middle_start) {
    if (!b_minus.symmetric() || !b_plus.symmetric())
        throw std::invalid_argument("ConnectionSpec: b_minus and b_plus must be symmetric (S_N)");

    const long middle_end = middle_start + middle.size() - 1;
    const long lcm = std::lcm<long>(b_minus.period(), b_plus.period());
    const auto a = [&](long n) { return raw_at(b_minus, b_plus, middle, middle_start, n); };

    // k_plus = max{n : a_n != b+_n}. Differences above middle_end are impossible;
    // below middle_start the comparison is between two periodic extensions, so one
    // lcm window decides.
    long k_plus = middle_end + 1;
    for (long n = middle_end; n >= middle_start - lcm; --n)
        if (a(n) != b_plus.at(n)) {
            k_plus = n;
            break;
        }
    if (k_plus > middle_end)
        throw std::invalid_argument("ConnectionSpec: trivial (sequence equals the b_plus extension)");

    long k_minus = middle_start - 1;
    for (long n = middle_start; n <= middle_end + lcm; ++n)
        if (a(n) != b_minus.at(n)) {
            k_minus = n;
            break;
        }
    if (k_minus < middle_start)
        throw std::invalid_argument("ConnectionSpec: trivial (sequence equals the b_minus extension)");

    if (k_minus >= k_plus)
        throw std::invalid_argument(
            "ConnectionSpec: defect window is empty (canonical k_minus >= k_plus); no connection problem");

    std::vector<int> trimmed;
    trimmed.reserve(static_cast<std::size_t>(k_plus - k_minus + 1));
    for (long n = k_minus; n <= k_plus; ++n) trimmed.push_back(a(n));

    // Run-length check on a window wide enough to contain every run touched by
    // the junctions; runs cut by the window edges are pure tail runs.
    const long lo = k_minus - 2 * b_minus.period() - 1;
    const long hi = k_plus + 2 * b_plus.period() + 1;
    long run_start = lo;
    for (long n = lo + 1; n <= hi + 1; ++n) {
        const bool boundary = n > hi || a(n) != a(n - 1);
        if (!boundary) continue;
        const long run_end = n - 1;
        if (run_start > lo && run_end < hi && run_end - run_start + 1 < 3)
            throw std::invalid_argument("ConnectionSpec: assembled sequence has a run shorter than 3");
        run_start = n;
    }

    ConnectionSpec spec{std::move(b_minus), std::move(b_plus), SymbolWord(std::move(trimmed)), k_minus,
                        k_plus};
    return spec;
}

}  // namespace sitnikov
