#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>

#include "lucaslaw/rank.hpp"

#include "oracles.hpp"

using lucaslaw::Int;
using lucaslaw::make_params;

TEST_CASE("entry_point examples for the Fibonacci parameters") {
    const auto fib = make_params(1, -1);

    const auto at7 = lucaslaw::entry_point(fib, 7);
    CHECK(at7.rank == 8);
    CHECK(at7.epsilon == -1);
    CHECK(at7.valuation == 1);  // U_8 = 21

    const auto at5 = lucaslaw::entry_point(fib, 5);
    CHECK(at5.rank == 5);
    CHECK(at5.epsilon == 0);

    const auto at3 = lucaslaw::entry_point(fib, 3);
    CHECK(at3.rank == 4);
    CHECK(at3.valuation == 1);  // U_4 = 3
}

TEST_CASE("entry_point rejects excluded inputs") {
    const auto fib = make_params(1, -1);
    CHECK_THROWS_AS(lucaslaw::entry_point(fib, 2), lucaslaw::hypothesis_error);
    CHECK_THROWS_AS(lucaslaw::entry_point(fib, 9), lucaslaw::hypothesis_error);
    CHECK_THROWS_AS(lucaslaw::entry_point(make_params(2, 1), 7), lucaslaw::hypothesis_error);
    // p | Q leaves the rank undefined
    CHECK_THROWS_AS(lucaslaw::entry_point(make_params(3, 2), 2), lucaslaw::hypothesis_error);
    CHECK_THROWS_AS(lucaslaw::entry_point(make_params(1, -7), 7), lucaslaw::hypothesis_error);
}

TEST_CASE("apparition_valuation examples") {
    const auto fib = make_params(1, -1);
    CHECK(lucaslaw::apparition_valuation(fib, 3, 4) == 1);

    const auto mersenne = make_params(3, 2);  // U_n = 2^n - 1
    CHECK(lucaslaw::apparition_valuation(mersenne, 1093, 364) == 2);  // Wieferich depth
    CHECK(lucaslaw::apparition_valuation(mersenne, 5, 4) == 1);       // U_4 = 15

    CHECK_THROWS_AS(lucaslaw::apparition_valuation(fib, 7, 7), lucaslaw::hypothesis_error);
}

TEST_CASE("divides_iff examples") {
    const auto fib = make_params(1, -1);
    CHECK(lucaslaw::divides_iff(fib, 7, 16));
    CHECK_FALSE(lucaslaw::divides_iff(fib, 7, 12));
    CHECK(lucaslaw::divides_iff(fib, 3, 4));
}

TEST_CASE("divides_iff agrees with direct evaluation") {
    lucaslaw::RankCache cache;
    for (long p_coef = -5; p_coef <= 5; ++p_coef) {
        for (long q_coef : {-5L, -3L, -1L, 2L, 3L, 5L}) {
            const auto params = make_params(p_coef, q_coef);
            if (!params.strict) continue;
            for (uint64_t p : {3, 5, 7, 11, 13, 197, 199}) {
                if (mpz_divisible_ui_p(params.Q.get_mpz_t(), p)) continue;
                // walk the recurrence mod p once, checking every index against
                // the rank criterion
                const Int pz(static_cast<unsigned long>(p));
                Int u0 = 0, u1 = 1;
                for (uint64_t m = 1; m <= 500; ++m) {
                    CHECK(lucaslaw::divides_iff(params, p, Int(m), &cache) == (u1 == 0));
                    Int u2 = oracle::mod_pos(params.P * u1 - params.Q * u0, pz);
                    u0 = u1;
                    u1 = u2;
                }
            }
        }
    }
}

TEST_CASE("rank divides p - (D/p)") {
    for (const auto& [pc, qc] : {std::pair{1L, -1L}, {3L, 2L}, {5L, -6L}, {-3L, 7L}}) {
        const auto params = make_params(pc, qc);
        for (uint64_t p = 3; p <= 199; p += 2) {
            if (!lucaslaw::is_prime(p)) continue;
            if (mpz_divisible_ui_p(params.Q.get_mpz_t(), p)) continue;
            const auto rec = lucaslaw::entry_point(params, p);
            if (rec.epsilon == 0) {
                CHECK(rec.rank == p);
            } else {
                const uint64_t target = rec.epsilon > 0 ? p - 1 : p + 1;
                CHECK(target % rec.rank == 0);
            }
            // no proper divisor of the rank is an apparition index
            for (uint64_t d : lucaslaw::divisors_ascending(rec.rank)) {
                const bool divides =
                    lucaslaw::u_v_mod(params, Int(d), Int(static_cast<unsigned long>(p))).u == 0;
                CHECK(divides == (d == rec.rank));
            }
        }
    }
}

TEST_CASE("valuation at the entry index equals the apparition valuation") {
    // the ratio U_{p-(D/p)} / U_{r(p)} is a p-unit
    for (const auto& [pc, qc] : {std::pair{1L, -1L}, {3L, 2L}, {2L, -3L}}) {
        const auto params = make_params(pc, qc);
        for (uint64_t p = 3; p <= 199; p += 2) {
            if (!lucaslaw::is_prime(p)) continue;
            if (mpz_divisible_ui_p(Int(params.Q * params.D).get_mpz_t(), p)) continue;
            const auto rec = lucaslaw::entry_point(params, p);
            const uint64_t entry = rec.epsilon > 0 ? p - 1 : p + 1;
            CHECK(lucaslaw::ord_u_at_index(params, p, Int(entry)) == rec.valuation);
        }
    }
}

TEST_CASE("rank cache round-trips through its record file") {
    namespace fs = std::filesystem;
    const auto path = (fs::temp_directory_path() / "lucaslaw_rank_cache_test.jsonl").string();
    lucaslaw::RankCache cache;
    const auto fib = make_params(1, -1);
    const auto mersenne = make_params(3, 2);
    const auto r1 = cache.get(fib, 7);
    const auto r2 = cache.get(mersenne, 1093);
    cache.save(path);

    lucaslaw::RankCache reloaded;
    reloaded.load(path);
    CHECK(reloaded.size() == 2);
    CHECK(reloaded.get(fib, 7) == r1);
    CHECK(reloaded.get(mersenne, 1093) == r2);
    fs::remove(path);

    CHECK_THROWS_AS(reloaded.load("/nonexistent/rank_cache.jsonl"), lucaslaw::io_error);
}
