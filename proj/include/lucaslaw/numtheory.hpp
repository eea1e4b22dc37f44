#pragma once

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "lucaslaw/errors.hpp"

namespace lucaslaw {

using Int = mpz_class;

/// x mod m, normalized to [0, m).  Requires m > 0.
inline Int mod_norm(const Int& x, const Int& m) {
    Int r;
    mpz_mod(r.get_mpz_t(), x.get_mpz_t(), m.get_mpz_t());
    return r;
}

/// base^exp mod m with a nonnegative exponent.  Negative bases are reduced first.
inline Int pow_mod(const Int& base, const Int& exp, const Int& m) {
    Int r;
    mpz_powm(r.get_mpz_t(), base.get_mpz_t(), exp.get_mpz_t(), m.get_mpz_t());
    return r;
}

/// base^exp as an exact integer.
inline Int pow_int(const Int& base, unsigned long exp) {
    Int r;
    mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), exp);
    return r;
}

/// p^exp for a word-sized p.
inline Int pow_ui(unsigned long base, unsigned long exp) {
    Int r;
    mpz_ui_pow_ui(r.get_mpz_t(), base, exp);
    return r;
}

inline size_t bit_length(const Int& x) {
    return mpz_sizeinbase(x.get_mpz_t(), 2);
}

/// Jacobi symbol (a/n) for odd n >= 1, by the binary algorithm.
/// Equals the Legendre symbol when n is an odd prime; 0 iff gcd(a, n) > 1.
inline int jacobi(Int a, Int n) {
    if (n <= 0 || mpz_even_p(n.get_mpz_t()))
        throw hypothesis_error("jacobi: bottom argument must be odd and positive");
    a = mod_norm(a, n);
    int sign = 1;
    while (a != 0) {
        const auto twos = mpz_scan1(a.get_mpz_t(), 0);
        if (twos & 1) {
            const unsigned long n8 = mpz_fdiv_ui(n.get_mpz_t(), 8);
            if (n8 == 3 || n8 == 5) sign = -sign;
        }
        a >>= twos;
        // quadratic reciprocity for odd coprime a, n
        if (mpz_fdiv_ui(a.get_mpz_t(), 4) == 3 && mpz_fdiv_ui(n.get_mpz_t(), 4) == 3)
            sign = -sign;
        std::swap(a, n);
        a = mod_norm(a, n);
    }
    return n == 1 ? sign : 0;
}

/// Largest t with p^t | x.  x must be nonzero (the valuation of 0 is infinite).
inline unsigned long padic_valuation(const Int& x, const Int& p) {
    if (x == 0)
        throw hypothesis_error("padic_valuation: argument is 0, valuation infinite");
    if (p < 2)
        throw hypothesis_error("padic_valuation: base must be >= 2");
    Int reduced;
    return static_cast<unsigned long>(
        mpz_remove(reduced.get_mpz_t(), x.get_mpz_t(), p.get_mpz_t()));
}

namespace detail {
inline constexpr unsigned long kMillerRabinWitnesses[] = {2,  3,  5,  7,  11, 13,
                                                          17, 19, 23, 29, 31, 37};
}

/// Deterministic Miller-Rabin primality test.  The witness set
/// {2,...,37} is proven exact for all n < 3.317e24, far past the word-sized
/// ranges the sieves and verifiers feed in.
inline bool is_prime(const Int& n) {
    if (n < 2) return false;
    for (unsigned long w : detail::kMillerRabinWitnesses) {
        if (mpz_cmp_ui(n.get_mpz_t(), w) == 0) return true;
        if (mpz_divisible_ui_p(n.get_mpz_t(), w)) return false;
    }
    // n - 1 = d * 2^s with d odd
    Int d = n - 1;
    const auto s = mpz_scan1(d.get_mpz_t(), 0);
    d >>= s;
    const Int n_minus_1 = n - 1;
    for (unsigned long w : detail::kMillerRabinWitnesses) {
        Int x = pow_mod(Int(w), d, n);
        if (x == 1 || x == n_minus_1) continue;
        bool composite = true;
        for (unsigned long i = 1; i < s; ++i) {
            x = mod_norm(x * x, n);
            if (x == n_minus_1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

inline bool is_prime(uint64_t n) { return is_prime(Int(static_cast<unsigned long>(n))); }

/// All primes < limit by a plain sieve of Eratosthenes.
inline std::vector<uint64_t> primes_below(uint64_t limit) {
    std::vector<uint64_t> primes;
    if (limit <= 2) return primes;
    std::vector<bool> composite(limit, false);
    for (uint64_t i = 2; i < limit; ++i) {
        if (composite[i]) continue;
        primes.push_back(i);
        for (uint64_t j = i * i; j < limit; j += i) composite[j] = true;
    }
    return primes;
}

/// Primes in [lo, hi) by a segmented sieve.  `base` must contain every prime
/// up to sqrt(hi) (primes_below output is fine).
inline std::vector<uint64_t> primes_in(uint64_t lo, uint64_t hi,
                                       const std::vector<uint64_t>& base) {
    std::vector<uint64_t> primes;
    if (lo < 2) lo = 2;
    if (hi <= lo) return primes;
    std::vector<bool> composite(hi - lo, false);
    for (uint64_t p : base) {
        if (p * p >= hi) break;
        uint64_t start = std::max(p * p, (lo + p - 1) / p * p);
        for (uint64_t j = start; j < hi; j += p) composite[j - lo] = true;
    }
    for (uint64_t i = lo; i < hi; ++i)
        if (!composite[i - lo]) primes.push_back(i);
    return primes;
}

/// Prime factorization of a word-sized n by trial division.  Fully factors any
/// n <= 1e12 and anything whose post-trial cofactor is prime; otherwise a
/// resource_error is raised rather than returning a partial answer.
inline std::vector<std::pair<uint64_t, unsigned>> factorize(uint64_t n) {
    if (n == 0) throw hypothesis_error("factorize: argument must be positive");
    std::vector<std::pair<uint64_t, unsigned>> factors;
    auto strip = [&](uint64_t p) {
        unsigned e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        if (e) factors.emplace_back(p, e);
    };
    strip(2);
    strip(3);
    constexpr uint64_t kTrialBound = 1'000'000;
    for (uint64_t f = 5; f <= kTrialBound && f * f <= n; f += 6) {
        strip(f);
        strip(f + 2);
    }
    if (n > 1) {
        if (n <= kTrialBound * kTrialBound || is_prime(n)) {
            factors.emplace_back(n, 1u);
        } else {
            throw resource_error("factorize: composite cofactor exceeds the trial-division bound");
        }
    }
    return factors;
}

/// All divisors of n in increasing order.
inline std::vector<uint64_t> divisors_ascending(uint64_t n) {
    std::vector<uint64_t> divs{1};
    for (const auto& [p, e] : factorize(n)) {
        const size_t count = divs.size();
        uint64_t pk = 1;
        for (unsigned i = 1; i <= e; ++i) {
            pk *= p;
            for (size_t j = 0; j < count; ++j) divs.push_back(divs[j] * pk);
        }
    }
    std::sort(divs.begin(), divs.end());
    return divs;
}

}  // namespace lucaslaw
