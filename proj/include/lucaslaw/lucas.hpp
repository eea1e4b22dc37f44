#pragma once

#include <cstdint>
#include <string>
#include <utility>

#include <gmpxx.h>

#include "lucaslaw/errors.hpp"
#include "lucaslaw/numtheory.hpp"

namespace lucaslaw {

// Lucas sequences U_n(P,Q), V_n(P,Q):
//   U_0 = 0, U_1 = 1,  U_{n+1} = P*U_n - Q*U_{n-1}
//   V_0 = 2, V_1 = P,  V_{n+1} = P*V_n - Q*V_{n-1}
// with discriminant D = P^2 - 4Q and the fundamental identity
//   V_n^2 - D*U_n^2 = 4*Q^n.

/// Caps for exact evaluation.  U_n grows exponentially, so exact paths refuse
/// to run past these limits instead of silently blowing up.
struct EvalLimits {
    uint64_t max_index = 100'000;  // largest index evaluated exactly
    size_t max_bits = 1'000'000;   // largest exact intermediate, in bits
};

struct LucasParams {
    Int P;
    Int Q;
    Int D;        // always P^2 - 4Q
    bool strict;  // gcd(P,Q) = 1 and P*Q*(P^2-Q)*(P^2-4Q) != 0

    friend bool operator==(const LucasParams& a, const LucasParams& b) {
        return a.P == b.P && a.Q == b.Q;
    }
};

/// Exact (n, U_n, V_n).
struct SequencePair {
    uint64_t n;
    Int u;
    Int v;
};

/// (n, U_n, V_n, Q^n) reduced modulo `modulus`, residues in [0, modulus).
struct ModSequencePair {
    Int n;
    Int modulus;
    Int u;
    Int v;
    Int qn;
};

/// Builds LucasParams with the derived discriminant and classification flag.
/// Degenerate pairs are representable; the theorem verifiers reject them at
/// their own preconditions.
inline LucasParams make_params(Int P, Int Q) {
    Int D = P * P - 4 * Q;
    bool strict = false;
    if (P != 0 && Q != 0 && D != 0 && P * P != Q) {
        Int g;
        mpz_gcd(g.get_mpz_t(), P.get_mpz_t(), Q.get_mpz_t());
        strict = (g == 1);
    }
    return LucasParams{std::move(P), std::move(Q), std::move(D), strict};
}

namespace detail {

inline void check_bits(const Int& x, const EvalLimits& limits) {
    if (bit_length(x) > limits.max_bits)
        throw resource_error("exact evaluation exceeds the " +
                             std::to_string(limits.max_bits) + "-bit cap");
}

}  // namespace detail

/// Exact (U_n, V_n) by fast doubling on the state (U_i, U_{i+1}):
///   U_{2i}   = U_i * (2*U_{i+1} - P*U_i)
///   U_{2i+1} = U_{i+1}^2 - Q*U_i^2
/// and V_n = 2*U_{n+1} - P*U_n at the end.
inline SequencePair u_v_exact(const LucasParams& params, uint64_t n,
                              const EvalLimits& limits = {}) {
    if (n > limits.max_index)
        throw resource_error("index " + std::to_string(n) +
                             " exceeds the exact-evaluation cap of " +
                             std::to_string(limits.max_index));
    Int a = 0, b = 1;  // (U_0, U_1)
    if (n > 0) {
        int top = 63;
        while (top > 0 && !((n >> top) & 1)) --top;
        Int t;
        for (int i = top; i >= 0; --i) {
            t = a * (2 * b - params.P * a);
            b = b * b - params.Q * a * a;
            a = t;
            if ((n >> i) & 1) {
                t = params.P * b - params.Q * a;
                a = std::move(b);
                b = std::move(t);
            }
            detail::check_bits(b, limits);
        }
    }
    Int v = 2 * b - params.P * a;
    return SequencePair{n, std::move(a), std::move(v)};
}

/// (U_n, V_n, Q^n) mod `modulus` by the same doubling ladder, carried mod m.
/// Runs in O(log n) modular multiplications and never divides, so even moduli
/// are fine.  Q^n is tracked alongside the ladder on the same exponent bits.
inline ModSequencePair u_v_mod(const LucasParams& params, const Int& n,
                               const Int& modulus) {
    if (n < 0) throw hypothesis_error("u_v_mod: index must be nonnegative");
    if (modulus < 2) throw hypothesis_error("u_v_mod: modulus must be >= 2");
    const Int P = mod_norm(params.P, modulus);
    const Int Q = mod_norm(params.Q, modulus);
    Int a = 0, b = 1, q = 1;  // (U_i, U_{i+1}, Q^i) for the bit prefix i
    if (n > 0) {
        Int t;
        for (auto i = mpz_sizeinbase(n.get_mpz_t(), 2); i-- > 0;) {
            t = mod_norm(a * (2 * b - P * a), modulus);
            b = mod_norm(b * b - Q * a * a, modulus);
            a = std::move(t);
            q = mod_norm(q * q, modulus);
            if (mpz_tstbit(n.get_mpz_t(), i)) {
                t = mod_norm(P * b - Q * a, modulus);
                a = std::move(b);
                b = std::move(t);
                q = mod_norm(q * Q, modulus);
            }
        }
    }
    Int v = mod_norm(2 * b - P * a, modulus);
    return ModSequencePair{n, modulus, std::move(a), std::move(v), std::move(q)};
}

/// Parameters (V_k, Q^k) of the subsampled sequence: U_{kn}/U_k = U_n(V_k, Q^k).
/// Exact values, so k is bounded by the exact-evaluation caps.
inline LucasParams shifted_params(const LucasParams& params, uint64_t k,
                                  const EvalLimits& limits = {}) {
    if (k == 0) throw hypothesis_error("shifted_params: k must be positive");
    SequencePair at_k = u_v_exact(params, k, limits);  // also enforces the index cap on k
    if (at_k.u == 0)
        throw hypothesis_error("shifted_params: requires U_k != 0");
    if (params.Q != 0 && k * bit_length(params.Q) > limits.max_bits)
        throw resource_error("shifted_params: Q^k exceeds the exact-evaluation cap");
    Int qk = pow_int(params.Q, k);
    detail::check_bits(at_k.v, limits);
    return make_params(std::move(at_k.v), std::move(qk));
}

}  // namespace lucaslaw
