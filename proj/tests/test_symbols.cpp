#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sitnikov/symbols.hpp"

using namespace sitnikov;

TEST_CASE("word parsing and printing") {
    const auto w = SymbolWord::parse("+++---++");
    CHECK(w.size() == 8);
    CHECK(w.at(0) == 1);
    CHECK(w.at(3) == -1);
    CHECK(w.str() == "+++---++");
    CHECK_THROWS_AS(SymbolWord::parse(""), std::invalid_argument);
    CHECK_THROWS_AS(SymbolWord::parse("++x-"), std::invalid_argument);
}

TEST_CASE("block lengths") {
    CHECK(block_lengths(SymbolWord::parse("+++---"), true) == std::vector<int>{3, 3});
    CHECK(block_lengths(SymbolWord::parse("+++---++"), true) == std::vector<int>{3, 5});
    CHECK(block_lengths(SymbolWord::parse("++---"), false) == std::vector<int>{2, 3});
    CHECK(block_lengths(SymbolWord::parse("++++"), true) == std::vector<int>{4});
}

TEST_CASE("class membership: runs of length >= 3") {
    CHECK(in_m(SymbolWord::parse("+++---"), true));
    CHECK_FALSE(in_m(SymbolWord::parse("++--++"), true));
    CHECK_FALSE(in_m(SymbolWord::parse("+++--+++"), true));
    CHECK(in_m(SymbolWord::parse("++++++"), true));  // constant words belong to the class itself

    SUBCASE("invariant under global sign flip and shift") {
        const auto w = SymbolWord::parse("+++---++++----");
        std::vector<int> flipped, shifted;
        for (int j = 0; j < w.size(); ++j) flipped.push_back(-w.at(j));
        for (int j = 0; j < w.size(); ++j) shifted.push_back(w.at((j + 5) % w.size()));
        CHECK(in_m(w, true) == in_m(SymbolWord(flipped), true));
        CHECK(in_m(w, true) == in_m(SymbolWord(shifted), true));
    }
}

TEST_CASE("periodic symbols: construction guards") {
    CHECK_THROWS_AS(PeriodicSymbols::parse("+++--"), std::invalid_argument);   // N < 6
    CHECK_THROWS_AS(PeriodicSymbols::parse("++++++"), std::invalid_argument);  // constant
    CHECK_THROWS_AS(PeriodicSymbols::parse("++--++"), std::invalid_argument);  // runs of 2
    const auto b = PeriodicSymbols::parse("+++---++");
    CHECK(b.period() == 8);
    CHECK(b.at(0) == 1);
    CHECK(b.at(5) == -1);
    CHECK(b.at(8) == 1);
    CHECK(b.at(-1) == 1);
    CHECK(b.at(-5) == -1);
}

TEST_CASE("symmetric classes") {
    CHECK(in_s(PeriodicSymbols::parse("+++---++")));    // a1=a7, a2=a6, a3=a5
    CHECK_FALSE(in_s(PeriodicSymbols::parse("+++---")));  // a1 = + but a5 = -
    CHECK(in_s(PeriodicSymbols::parse("+++-----++")));
    // palindromic about 0 by construction
    CHECK(in_s(PeriodicSymbols::parse("++++---+++")));
}

TEST_CASE("k-fold concatenation stays periodic with runs >= 3") {
    const auto b = PeriodicSymbols::parse("+++---++");
    for (int k = 1; k <= 3; ++k) {
        std::vector<int> rep;
        for (int r = 0; r < k; ++r)
            rep.insert(rep.end(), b.word().symbols().begin(), b.word().symbols().end());
        const PeriodicSymbols kb{SymbolWord(rep)};
        CHECK(kb.period() == 8 * k);
        for (long n = -20; n <= 20; ++n) CHECK(kb.at(n) == b.at(n));
    }
}

TEST_CASE("connection spec: homoclinic insertion") {
    // b extension ..., -{3,4,5}, +{6..10}, ...; inserting "---+++++" after n=8
    // is the canonical extra negative excursion. Canonical offsets trim to
    // middle "---++" on [9, 13].
    const auto b = PeriodicSymbols::parse("+++---++");
    const auto spec = ConnectionSpec::make(b, b, SymbolWord::parse("---+++++"), 9);
    CHECK(spec.k_minus == 9);
    CHECK(spec.k_plus == 13);
    CHECK(spec.middle.str() == "---++");

    AssembledSymbols a(spec);
    CHECK(a.at(9) == -1);
    CHECK(a.at(13) == 1);
    SUBCASE("tails agree with the periodic extensions pointwise") {
        for (long n = spec.k_plus + 1; n < spec.k_plus + 40; ++n) CHECK(a.at(n) == b.at(n));
        for (long n = spec.k_minus - 40; n < spec.k_minus; ++n) CHECK(a.at(n) == b.at(n));
    }
    SUBCASE("offsets are canonical (recomputation is a fixed point)") {
        const auto again = ConnectionSpec::make(b, b, spec.middle, spec.k_minus);
        CHECK(again == spec);
    }
}

TEST_CASE("connection spec: shifted placement gives the same canonical window") {
    const auto b = PeriodicSymbols::parse("+++---++");
    const auto spec = ConnectionSpec::make(b, b, SymbolWord::parse("---++"), 1);
    CHECK(spec.k_minus == 1);
    CHECK(spec.k_plus == 5);
    AssembledSymbols a(spec);
    CHECK(a.at(1) == -1);
    CHECK(a.at(5) == 1);  // a_{K+} = +1 while b_{K+} = -1: the maximal case
    CHECK(b.at(5) == -1);
}

TEST_CASE("connection spec: heteroclinic junction") {
    const auto bm = PeriodicSymbols::parse("+++---++");
    const auto bp = PeriodicSymbols::parse("+++-----++");
    const auto spec = ConnectionSpec::make(bm, bp, SymbolWord::parse("------"), 14);
    CHECK(spec.k_minus == 14);
    CHECK(spec.k_plus == 19);
    AssembledSymbols a(spec);
    CHECK(a.at(19) == -1);
    CHECK(bp.at(19) == 1);  // minimal case at K+
    for (long n = 20; n < 60; ++n) CHECK(a.at(n) == bp.at(n));
    for (long n = -40; n < 14; ++n) CHECK(a.at(n) == bm.at(n));
}

TEST_CASE("connection spec: rejections") {
    const auto b = PeriodicSymbols::parse("+++---++");
    // middle identical to the periodic extension: no defect anywhere
    CHECK_THROWS_AS(ConnectionSpec::make(b, b, SymbolWord::parse("+++---++"), 0), std::invalid_argument);
    // junction cuts a run to length 2
    CHECK_THROWS_AS(ConnectionSpec::make(b, b, SymbolWord::parse("---+++++"), 8), std::invalid_argument);
    // non-symmetric tail word
    const auto ns = PeriodicSymbols::parse("+++---");
    CHECK_THROWS_AS(ConnectionSpec::make(ns, ns, SymbolWord::parse("---++"), 1), std::invalid_argument);
    // overlapping agreement collapses the window: heteroclinic pair that
    // matches both extensions around the junction
    const auto bp = PeriodicSymbols::parse("+++-----++");
    CHECK_THROWS_AS(ConnectionSpec::make(b, bp, SymbolWord::parse("-----"), 3), std::invalid_argument);
}
