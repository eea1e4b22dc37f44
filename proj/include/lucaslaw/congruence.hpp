#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>

#include "lucaslaw/errors.hpp"
#include "lucaslaw/lucas.hpp"
#include "lucaslaw/numtheory.hpp"
#include "lucaslaw/rank.hpp"

namespace lucaslaw {

// Machine checks for the congruence laws satisfied by U_n(P,Q):
//
//   lemma1:      U_n == n*Q^((n-1)/2)            (mod |D|)        n odd
//                U_n == (n/2)*P*Q^((n-2)/2)      (mod |D|)        n even
//   lemma2a:     U_{(2n+1)k}/U_k == (2n+1)*Q^(kn)     (mod |D|*U_k^2)
//   lemma2b:     U_{2kn}/U_{2k}  == n*Q^(k(n-1))      (mod |D|*U_k^2)
//   theorem1:    U_{k*m*n^r}/U_k == m*n^r*Q^(k(mn^r-1)/2)         (mod n^(r+1)*A)   mn odd
//                U_{k*m*n^r}/U_k == (m*V_k/2)*n^r*Q^(k(mn^r-2)/2) (mod n^(r+1)*A)   mn even
//                with n | U_k and A = |D|*(U_k/n)^2
//   corollary1:  U_{k*p^r}/U_k == p^r  (mod p^(r+1))   for an odd prime p | U_k
//
// plus the repetition law (theorem2): if n^s exactly divides U_k then
// n^(r+s) | U_{k*m*n^r}, exactly when n is odd and gcd(m,n) = 1.

enum class Statement { Lemma1, Lemma2a, Lemma2b, Theorem1, Corollary1 };

inline const char* statement_name(Statement s) {
    switch (s) {
        case Statement::Lemma1: return "lemma1";
        case Statement::Lemma2a: return "lemma2a";
        case Statement::Lemma2b: return "lemma2b";
        case Statement::Theorem1: return "theorem1";
        case Statement::Corollary1: return "corollary1";
    }
    return "?";
}

/// One checked congruence: lhs == rhs (mod modulus), residues normalized to
/// [0, modulus).
struct CongruenceReport {
    Statement statement;
    Int lhs;
    Int rhs;
    Int modulus;
    bool holds;
};

/// Repetition-law certificate for U_{k*m*n^r} with n^s exactly dividing U_k.
struct RepetitionReport {
    uint64_t k, m, n, r;
    unsigned s;              // n^s | U_k, n^(s+1) does not
    unsigned predicted_min;  // r + s
    unsigned exact_ord;      // largest t with n^t | U_{k*m*n^r}
    bool strict;             // n odd, gcd(m,n)=1, and exact_ord == r+s certified
    bool ns_is_two;          // n^s == 2, the classically excluded edge, flagged for scrutiny
};

namespace detail {

inline CongruenceReport finish_report(Statement st, const Int& lhs_raw, const Int& rhs_raw,
                                      Int modulus) {
    Int lhs = mod_norm(lhs_raw, modulus);
    Int rhs = mod_norm(rhs_raw, modulus);
    const bool holds = lhs == rhs;
    return CongruenceReport{st, std::move(lhs), std::move(rhs), std::move(modulus), holds};
}

inline void require_positive(uint64_t x, const char* name, const char* op) {
    if (x == 0)
        throw hypothesis_error(std::string(op) + ": " + name + " must be positive");
}

/// Exact U_a / U_b for b | a (the ratio is an integer whenever U_b != 0).
inline Int exact_ratio(const Int& numer, const Int& denom) {
    Int q;
    mpz_divexact(q.get_mpz_t(), numer.get_mpz_t(), denom.get_mpz_t());
    return q;
}

/// Narrows an exact index to a word after checking it against the cap, so
/// composite indices like (2n+1)*k never wrap silently.
inline uint64_t checked_index(const Int& index, const EvalLimits& limits, const char* op) {
    if (index > limits.max_index)
        throw resource_error(std::string(op) + ": index " + index.get_str() +
                             " exceeds the exact-evaluation cap");
    return index.get_ui();
}

}  // namespace detail

/// U_n mod |D| against the closed-form residue of lemma1.  Needs D != 0;
/// |D| = 1 yields a trivially true report.
inline CongruenceReport check_lemma1(const LucasParams& params, const Int& n) {
    if (n < 0) throw hypothesis_error("check_lemma1: index must be nonnegative");
    if (params.D == 0)
        throw hypothesis_error("check_lemma1: requires P^2 - 4Q != 0");
    Int modulus = abs(params.D);
    if (modulus == 1)
        return CongruenceReport{Statement::Lemma1, 0, 0, std::move(modulus), true};
    const Int lhs = u_v_mod(params, n, modulus).u;
    Int rhs;
    if (n == 0) {
        rhs = 0;
    } else if (mpz_odd_p(n.get_mpz_t())) {
        rhs = mod_norm(n * pow_mod(params.Q, (n - 1) / 2, modulus), modulus);
    } else {
        rhs = mod_norm((n / 2) * params.P * pow_mod(params.Q, (n - 2) / 2, modulus), modulus);
    }
    return detail::finish_report(Statement::Lemma1, lhs, rhs, std::move(modulus));
}

/// The two subsampled-ratio congruences of lemma2, both mod |D|*U_k^2.
/// Ratios are computed exactly, so the indices (2n+1)k and 2kn must sit under
/// the exact-evaluation caps.
inline std::pair<CongruenceReport, CongruenceReport> check_lemma2(
    const LucasParams& params, uint64_t k, uint64_t n, const EvalLimits& limits = {}) {
    detail::require_strict(params, "check_lemma2");
    detail::require_positive(k, "k", "check_lemma2");
    const Int u_k = u_v_exact(params, k, limits).u;
    const Int u_2k = u_v_exact(params, 2 * k, limits).u;
    Int modulus = abs(params.D) * u_k * u_k;

    const Int nz(static_cast<unsigned long>(n));
    const Int kz(static_cast<unsigned long>(k));
    const Int u_odd =
        u_v_exact(params, detail::checked_index((2 * nz + 1) * kz, limits, "check_lemma2"),
                  limits)
            .u;
    const Int lhs_a = detail::exact_ratio(u_odd, u_k);
    const Int rhs_a = mod_norm((2 * nz + 1) * pow_mod(params.Q, kz * nz, modulus), modulus);
    auto report_a = detail::finish_report(Statement::Lemma2a, lhs_a, rhs_a, modulus);

    const Int u_even =
        u_v_exact(params, detail::checked_index(2 * kz * nz, limits, "check_lemma2"), limits).u;
    const Int lhs_b = detail::exact_ratio(u_even, u_2k);
    const Int rhs_b =
        n == 0 ? Int(0)
               : mod_norm(nz * pow_mod(params.Q, kz * (nz - 1), modulus), modulus);
    auto report_b = detail::finish_report(Statement::Lemma2b, lhs_b, rhs_b, std::move(modulus));
    return {std::move(report_a), std::move(report_b)};
}

/// The central congruence for U_{k*m*n^r}/U_k mod n^(r+1)*A.  The ratio is
/// evaluated modularly through the subsampled parameters (V_k, Q^k), never by
/// modular division (U_k is rarely invertible at the modulus), and replayed
/// exactly whenever the index sits under the caps; a disagreement between the
/// two routes is an internal error.
inline CongruenceReport check_theorem1(const LucasParams& params, uint64_t k, uint64_t m,
                                       uint64_t n, uint64_t r,
                                       const EvalLimits& limits = {}) {
    detail::require_strict(params, "check_theorem1");
    detail::require_positive(k, "k", "check_theorem1");
    detail::require_positive(m, "m", "check_theorem1");
    detail::require_positive(r, "r", "check_theorem1");
    if (n < 2) throw hypothesis_error("check_theorem1: requires n >= 2");

    const SequencePair at_k = u_v_exact(params, k, limits);
    if (!mpz_divisible_p(at_k.u.get_mpz_t(), Int(static_cast<unsigned long>(n)).get_mpz_t()))
        throw hypothesis_error("check_theorem1: requires n | U_k (n = " + std::to_string(n) +
                               ", U_k = " + at_k.u.get_str() + ")");

    const Int cofactor = detail::exact_ratio(at_k.u, Int(static_cast<unsigned long>(n)));
    const Int scale = abs(params.D) * cofactor * cofactor;  // A = |D|*(U_k/n)^2
    Int modulus = pow_ui(n, r + 1) * scale;

    const Int n_pow_r = pow_ui(n, r);
    const Int index_ratio = Int(static_cast<unsigned long>(m)) * n_pow_r;  // m*n^r
    const Int index = Int(static_cast<unsigned long>(k)) * index_ratio;

    Int rhs;
    if ((m & 1) && (n & 1)) {
        const Int exponent = Int(static_cast<unsigned long>(k)) * (index_ratio - 1) / 2;
        rhs = mod_norm(index_ratio * pow_mod(params.Q, exponent, modulus), modulus);
    } else {
        const Int exponent = Int(static_cast<unsigned long>(k)) * (index_ratio - 2) / 2;
        Int half_mv = Int(static_cast<unsigned long>(m)) * at_k.v;
        if (mpz_odd_p(half_mv.get_mpz_t()))
            throw std::logic_error("check_theorem1: m*V_k odd in the even branch");
        half_mv /= 2;
        rhs = mod_norm(mod_norm(half_mv * n_pow_r, modulus) *
                           pow_mod(params.Q, exponent, modulus),
                       modulus);
    }

    // modular route via the subsampled sequence
    const LucasParams sub = shifted_params(params, k, limits);
    const Int lhs = u_v_mod(sub, index_ratio, modulus).u;

    // exact replay when feasible
    if (index <= limits.max_index) {
        try {
            const Int u_big = u_v_exact(params, index.get_ui(), limits).u;
            if (mod_norm(detail::exact_ratio(u_big, at_k.u), modulus) != lhs)
                throw std::logic_error(
                    "check_theorem1: exact and modular evaluations disagree");
        } catch (const resource_error&) {
            // past the bit cap; the modular route stands alone
        }
    }
    return detail::finish_report(Statement::Theorem1, lhs, rhs, std::move(modulus));
}

/// Repetition-law certificate.  s is read off the exact U_k; the n-adic order
/// of U_{k*m*n^r} is then computed by adaptive modular lifting (exactly when
/// the index is small enough, as a cross-check).
inline RepetitionReport check_theorem2(const LucasParams& params, uint64_t k, uint64_t m,
                                       uint64_t n, uint64_t r,
                                       const EvalLimits& limits = {}) {
    detail::require_strict(params, "check_theorem2");
    detail::require_positive(k, "k", "check_theorem2");
    detail::require_positive(m, "m", "check_theorem2");
    detail::require_positive(r, "r", "check_theorem2");
    if (n < 2) throw hypothesis_error("check_theorem2: requires n >= 2");

    const Int u_k = u_v_exact(params, k, limits).u;
    const Int nz(static_cast<unsigned long>(n));
    if (!mpz_divisible_p(u_k.get_mpz_t(), nz.get_mpz_t()))
        throw hypothesis_error("check_theorem2: requires n | U_k (n = " + std::to_string(n) +
                               ", U_k = " + u_k.get_str() + ")");
    unsigned s = 0;
    for (Int t = u_k; mpz_divisible_p(t.get_mpz_t(), nz.get_mpz_t()); ++s)
        t = detail::exact_ratio(t, nz);

    const unsigned predicted = r + s;
    const Int index = Int(static_cast<unsigned long>(k)) * m * pow_ui(n, r);

    // adaptive n-adic order: raise the modulus n^e until the residue is nonzero
    unsigned exact_ord = 0;
    const unsigned ceiling = std::max<unsigned>(predicted + 1, 64);
    for (unsigned e = predicted + 1;; e = std::min(e * 2, ceiling)) {
        Int residue = u_v_mod(params, index, pow_int(nz, e)).u;
        if (residue != 0) {
            while (mpz_divisible_p(residue.get_mpz_t(), nz.get_mpz_t())) {
                residue = detail::exact_ratio(residue, nz);
                ++exact_ord;
            }
            break;
        }
        if (e >= ceiling)
            throw resource_error("check_theorem2: n-adic order exceeds the lifting ceiling");
    }

    if (index <= limits.max_index) {
        try {
            Int u_big = u_v_exact(params, index.get_ui(), limits).u;
            unsigned direct = 0;
            while (mpz_divisible_p(u_big.get_mpz_t(), nz.get_mpz_t())) {
                u_big = detail::exact_ratio(u_big, nz);
                ++direct;
            }
            if (direct != exact_ord)
                throw std::logic_error("check_theorem2: lifted and exact orders disagree");
        } catch (const resource_error&) {
        }
    }

    const bool part_two = (n & 1) && std::gcd(m, n) == 1;
    const bool strict_cert = part_two && exact_ord == predicted;
    return RepetitionReport{k, m, n, r, s, predicted, exact_ord, strict_cert,
                            n == 2 && s == 1};
}

/// U_{k*p^r}/U_k == p^r (mod p^(r+1)) for an odd prime p dividing U_k,
/// decided through the subsampled parameters without exact blowup.
inline CongruenceReport check_corollary1(const LucasParams& params, uint64_t k, uint64_t p,
                                         uint64_t r, const EvalLimits& limits = {}) {
    detail::require_strict(params, "check_corollary1");
    detail::require_positive(k, "k", "check_corollary1");
    detail::require_positive(r, "r", "check_corollary1");
    detail::require_odd_prime(p, "check_corollary1");
    if (u_v_mod(params, Int(static_cast<unsigned long>(k)), Int(static_cast<unsigned long>(p)))
            .u != 0)
        throw hypothesis_error("check_corollary1: requires p | U_k (p = " + std::to_string(p) +
                               ")");
    Int modulus = pow_ui(p, r + 1);
    const LucasParams sub = shifted_params(params, k, limits);
    const Int lhs = u_v_mod(sub, pow_ui(p, r), modulus).u;
    const Int rhs = pow_ui(p, r);
    return detail::finish_report(Statement::Corollary1, lhs, rhs, std::move(modulus));
}

namespace detail {

inline RankRecord rank_for(const LucasParams& params, uint64_t p, RankCache* cache) {
    return cache ? cache->get(params, p) : entry_point(params, p);
}

/// Repetition count past the apparition index: with m = r(p) * p^t * j and
/// p not dividing j, the order of U_m (or V_m) at p is t + ord_p U_{r(p)}.
/// When p does not divide D this t is just ord_p m; when p | D the rank is p
/// itself, so one factor of p in m belongs to the rank and t = ord_p m - 1.
inline unsigned rank_decomposed_ord(const RankRecord& rec, const Int& m) {
    const unsigned rank_ord = rec.rank % rec.p == 0 ? 1 : 0;
    return static_cast<unsigned>(
               padic_valuation(m, Int(static_cast<unsigned long>(rec.p)))) -
           rank_ord + rec.valuation;
}

}  // namespace detail

/// ord_p U_m by the rank decomposition: 0 when r(p) does not divide m.
/// Never computes U_m.
inline unsigned ord_u_fast(const LucasParams& params, uint64_t p, const Int& m,
                           RankCache* cache = nullptr) {
    if (m <= 0) throw hypothesis_error("ord_u_fast: index must be positive");
    const RankRecord rec = detail::rank_for(params, p, cache);
    if (!mpz_divisible_ui_p(m.get_mpz_t(), rec.rank)) return 0;
    return detail::rank_decomposed_ord(rec, m);
}

/// ord_p V_m likewise; p | V_m exactly when r(p) | 2m but r(p) does not
/// divide m (U and V share no odd factor prime to Q).
inline unsigned ord_v_fast(const LucasParams& params, uint64_t p, const Int& m,
                           RankCache* cache = nullptr) {
    if (m <= 0) throw hypothesis_error("ord_v_fast: index must be positive");
    const RankRecord rec = detail::rank_for(params, p, cache);
    const bool divides_v = mpz_divisible_ui_p(Int(2 * m).get_mpz_t(), rec.rank) &&
                           !mpz_divisible_ui_p(m.get_mpz_t(), rec.rank);
    if (!divides_v) return 0;
    return detail::rank_decomposed_ord(rec, m);
}

}  // namespace lucaslaw
