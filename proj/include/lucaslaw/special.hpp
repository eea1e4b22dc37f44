#pragma once

#include <cstdint>
#include <string>

#include "lucaslaw/errors.hpp"
#include "lucaslaw/lucas.hpp"
#include "lucaslaw/numtheory.hpp"
#include "lucaslaw/rank.hpp"

namespace lucaslaw {

// Valuation machinery applied to the named families:
//   S_n:      S_1 = P^2+2, S_{k+1} = S_k^2 - 2; equals V_{2^n}(P, -1)
//   a^n + 1:  V_n(a+1, a) = a^n + 1
//   Fermat:   2^(2^n) + 1, the a = 2 case along the power-of-two indices

enum class Family { SSeq, APowPlusOne, Fermat, Fibonacci };

inline const char* family_name(Family f) {
    switch (f) {
        case Family::SSeq: return "s-seq";
        case Family::APowPlusOne: return "a-pow";
        case Family::Fermat: return "fermat";
        case Family::Fibonacci: return "fibonacci";
    }
    return "?";
}

/// Whether p^alpha divides a member of one of the special families, plus the
/// modular residue that decided it.
struct SquareFactorVerdict {
    Family family;
    Int parameter;   // P for S_n, a for a^n+1, 2 for Fermat
    uint64_t index;  // n
    uint64_t p;
    unsigned alpha;
    bool holds;
    Int witness;  // the decisive residue
};

/// Exact S_n by the squaring recurrence.  S_n has about 2^n digits, so the
/// bit cap binds quickly.
inline Int s_term(const Int& P, uint64_t n, const EvalLimits& limits = {}) {
    if (P == 0) throw hypothesis_error("s_term: requires P != 0");
    if (n == 0) throw hypothesis_error("s_term: index starts at 1");
    Int s = P * P + 2;
    for (uint64_t i = 1; i < n; ++i) {
        s = s * s - 2;
        detail::check_bits(s, limits);
    }
    return s;
}

namespace detail {

/// S_n mod m through the x -> x^2 - 2 squaring map (n-1 squarings).
inline Int s_term_mod(const Int& P, uint64_t n, const Int& m) {
    Int s = mod_norm(P * P + 2, m);
    for (uint64_t i = 1; i < n; ++i) s = mod_norm(s * s - 2, m);
    return s;
}

}  // namespace detail

/// Does p^alpha divide S_n?  Decided without ever forming S_n: by the
/// apparition criterion, p^alpha | S_n iff p^alpha | U_{p-eps}(P,-1) with
/// eps = ((P^2+4)/p).  Requires p to be an odd prime factor of S_n.
inline SquareFactorVerdict s_square_factor(const Int& P, uint64_t n, uint64_t p,
                                           unsigned alpha) {
    if (P == 0) throw hypothesis_error("s_square_factor: requires P != 0");
    if (n == 0) throw hypothesis_error("s_square_factor: index starts at 1");
    if (alpha == 0) throw hypothesis_error("s_square_factor: alpha must be positive");
    detail::require_odd_prime(p, "s_square_factor");
    const Int pz(static_cast<unsigned long>(p));
    if (detail::s_term_mod(P, n, pz) != 0)
        throw hypothesis_error("s_square_factor: requires p | S_n (p = " + std::to_string(p) +
                               ")");
    const int eps = jacobi(P * P + 4, pz);
    if (eps == 0)
        throw std::logic_error("s_square_factor: p divides both S_n and P^2+4");
    const uint64_t index = eps > 0 ? p - 1 : p + 1;
    const LucasParams params = make_params(P, Int(-1));
    Int witness = u_v_mod(params, Int(static_cast<unsigned long>(index)), pow_ui(p, alpha)).u;
    const bool holds = witness == 0;
    return SquareFactorVerdict{Family::SSeq, P, n, p, alpha, holds, std::move(witness)};
}

/// ord_p(a^n + 1) = ord_p n + ord_p(a^(p-1) - 1) for an odd prime p | a^n+1.
/// The second term is lifted adaptively mod p^E; a^n+1 itself is never formed.
inline unsigned a_pow_plus_one_ord(const Int& a, uint64_t n, uint64_t p,
                                   unsigned max_exp = 64) {
    if (a == 0 || a == 1 || a == -1)
        throw hypothesis_error("a_pow_plus_one_ord: requires a != -1, 0, 1");
    if (n == 0) throw hypothesis_error("a_pow_plus_one_ord: requires n >= 1");
    detail::require_odd_prime(p, "a_pow_plus_one_ord");
    const Int pz(static_cast<unsigned long>(p));
    const Int nz(static_cast<unsigned long>(n));
    if (mod_norm(pow_mod(a, nz, pz) + 1, pz) != 0)
        throw hypothesis_error("a_pow_plus_one_ord: requires p | a^n + 1 (p = " +
                               std::to_string(p) + ")");
    const auto ord_n = padic_valuation(nz, pz);
    // ord_p(a^(p-1) - 1) >= 1 by Fermat since p does not divide a
    unsigned e = 2;
    while (true) {
        const Int pe = pow_ui(p, e);
        const Int residue = mod_norm(pow_mod(a, pz - 1, pe) - 1, pe);
        if (residue != 0)
            return static_cast<unsigned>(ord_n + padic_valuation(residue, pz));
        if (e >= max_exp)
            throw resource_error("a_pow_plus_one_ord: valuation exceeds the lifting ceiling");
        e = e * 2 > max_exp ? max_exp : e * 2;
    }
}

/// Does p^alpha divide 2^(2^idx) + 1?  Membership is checked by idx modular
/// squarings; the verdict is the Fermat-quotient criterion
/// p^alpha | 2^(2^idx)+1 iff 2^(p-1) == 1 (mod p^alpha).
inline SquareFactorVerdict fermat_square_check(uint64_t idx, uint64_t p, unsigned alpha) {
    if (alpha == 0) throw hypothesis_error("fermat_square_check: alpha must be positive");
    detail::require_odd_prime(p, "fermat_square_check");
    const Int pz(static_cast<unsigned long>(p));
    Int x = mod_norm(Int(2), pz);
    for (uint64_t i = 0; i < idx; ++i) x = mod_norm(x * x, pz);  // 2^(2^idx) mod p
    if (mod_norm(x + 1, pz) != 0)
        throw hypothesis_error("fermat_square_check: requires p | 2^(2^" +
                               std::to_string(idx) + ")+1 (p = " + std::to_string(p) + ")");
    Int witness = pow_mod(Int(2), pz - 1, pow_ui(p, alpha));
    const bool holds = witness == 1;
    return SquareFactorVerdict{Family::Fermat, Int(2), idx, p, alpha, holds,
                               std::move(witness)};
}

/// Wieferich condition: 2^(p-1) == 1 (mod p^2).  Caller supplies an odd prime.
inline bool wieferich_test(uint64_t p) {
    if (p < 3 || p % 2 == 0)
        throw hypothesis_error("wieferich_test: requires an odd prime");
    const Int pz(static_cast<unsigned long>(p));
    return pow_mod(Int(2), pz - 1, pz * pz) == 1;
}

/// Wall-Sun-Sun condition: p^2 | F_{p-(5/p)} for the Fibonacci sequence,
/// decided by the doubling ladder mod p^2.  p must be odd and != 5.
inline bool wall_sun_sun_test(uint64_t p) {
    if (p < 3 || p % 2 == 0)
        throw hypothesis_error("wall_sun_sun_test: requires an odd prime");
    if (p == 5) throw hypothesis_error("wall_sun_sun_test: p = 5 divides the discriminant");
    static const LucasParams fib = make_params(1, -1);
    const int eps = jacobi(Int(5), Int(static_cast<unsigned long>(p)));
    const uint64_t index = eps > 0 ? p - 1 : p + 1;
    const Int p2 = Int(static_cast<unsigned long>(p)) * static_cast<unsigned long>(p);
    return u_v_mod(fib, Int(static_cast<unsigned long>(index)), p2).u == 0;
}

}  // namespace lucaslaw
