#pragma once

// Test-only oracles, all independent of the library's evaluation paths:
// plain three-term recurrences, Euler-criterion Legendre symbols, trial
// division, and direct valuations.

#include <cstdint>
#include <utility>
#include <vector>

#include <gmpxx.h>

namespace oracle {

using Int = mpz_class;

/// Exact (U_n, V_n) by the three-term recurrence, one step at a time.
inline std::pair<Int, Int> u_v(const Int& P, const Int& Q, uint64_t n) {
    Int u0 = 0, u1 = 1, v0 = 2, v1 = P;
    if (n == 0) return {u0, v0};
    for (uint64_t i = 1; i < n; ++i) {
        Int u2 = P * u1 - Q * u0;
        Int v2 = P * v1 - Q * v0;
        u0 = std::move(u1);
        u1 = std::move(u2);
        v0 = std::move(v1);
        v1 = std::move(v2);
    }
    return {u1, v1};
}

/// Exact (U_i, V_i) for all 0 <= i <= max_n.
inline std::vector<std::pair<Int, Int>> u_v_table(const Int& P, const Int& Q,
                                                  uint64_t max_n) {
    std::vector<std::pair<Int, Int>> table;
    table.reserve(max_n + 1);
    table.emplace_back(0, 2);
    if (max_n == 0) return table;
    table.emplace_back(1, P);
    for (uint64_t i = 2; i <= max_n; ++i) {
        table.emplace_back(P * table[i - 1].first - Q * table[i - 2].first,
                           P * table[i - 1].second - Q * table[i - 2].second);
    }
    return table;
}

inline Int mod_pos(const Int& x, const Int& m) {
    Int r;
    mpz_mod(r.get_mpz_t(), x.get_mpz_t(), m.get_mpz_t());
    return r;
}

/// (U_n mod m, V_n mod m) by the recurrence carried mod m.
inline std::pair<Int, Int> u_v_mod(const Int& P, const Int& Q, uint64_t n, const Int& m) {
    Int u0 = mod_pos(0, m), u1 = mod_pos(1, m), v0 = mod_pos(2, m), v1 = mod_pos(P, m);
    if (n == 0) return {u0, v0};
    for (uint64_t i = 1; i < n; ++i) {
        Int u2 = mod_pos(P * u1 - Q * u0, m);
        Int v2 = mod_pos(P * v1 - Q * v0, m);
        u0 = std::move(u1);
        u1 = std::move(u2);
        v0 = std::move(v1);
        v1 = std::move(v2);
    }
    return {u1, v1};
}

/// Legendre symbol by the Euler criterion: a^((p-1)/2) mod p for odd prime p.
inline int legendre_euler(const Int& a, uint64_t p) {
    const Int pz(static_cast<unsigned long>(p));
    Int r;
    const Int e = (pz - 1) / 2;
    mpz_powm(r.get_mpz_t(), a.get_mpz_t(), e.get_mpz_t(), pz.get_mpz_t());
    if (r == 0) return 0;
    return r == 1 ? 1 : -1;
}

inline bool trial_division_prime(uint64_t n) {
    if (n < 2) return false;
    for (uint64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

/// Largest t with p^t | x, by repeated division.  x must be nonzero.
inline unsigned direct_valuation(Int x, const Int& p) {
    unsigned t = 0;
    while (mpz_divisible_p(x.get_mpz_t(), p.get_mpz_t())) {
        Int q;
        mpz_divexact(q.get_mpz_t(), x.get_mpz_t(), p.get_mpz_t());
        x = std::move(q);
        ++t;
    }
    return t;
}

inline Int pow_exact(const Int& base, unsigned long e) {
    Int r;
    mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
    return r;
}

}  // namespace oracle
