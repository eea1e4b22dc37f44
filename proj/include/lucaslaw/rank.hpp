#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "lucaslaw/errors.hpp"
#include "lucaslaw/lucas.hpp"
#include "lucaslaw/numtheory.hpp"

namespace lucaslaw {

/// Rank of apparition data for an odd prime p: the least index with p | U_n,
/// the p-adic valuation of U at that index, and the symbol (D/p).
struct RankRecord {
    uint64_t p;
    uint64_t rank;       // least n >= 1 with p | U_n
    unsigned valuation;  // ord_p U_rank
    int epsilon;         // (D/p) in {-1, 0, 1}

    friend bool operator==(const RankRecord&, const RankRecord&) = default;
};

namespace detail {

inline void require_strict(const LucasParams& params, const char* op) {
    if (!params.strict)
        throw hypothesis_error(std::string(op) +
                               ": requires gcd(P,Q) = 1 and P*Q*(P^2-Q)*(P^2-4Q) != 0");
}

inline void require_odd_prime(uint64_t p, const char* op) {
    if (p == 2) throw hypothesis_error(std::string(op) + ": requires an odd prime, got 2");
    if (p < 3 || !is_prime(p))
        throw hypothesis_error(std::string(op) + ": " + std::to_string(p) +
                               " is not an odd prime");
}

inline void require_rank_defined(const LucasParams& params, uint64_t p, const char* op) {
    require_strict(params, op);
    require_odd_prime(p, op);
    if (mpz_divisible_ui_p(params.Q.get_mpz_t(), p))
        throw hypothesis_error(std::string(op) +
                               ": rank of apparition undefined when p | Q (p = " +
                               std::to_string(p) + ")");
}

}  // namespace detail

/// ord_p U_index without materializing U_index: evaluate U mod p^E with E
/// doubling from `start_exp` until the residue is nonzero, then take the
/// valuation of the residue.  Returns 0 when p does not divide U_index.
inline unsigned ord_u_at_index(const LucasParams& params, uint64_t p, const Int& index,
                               unsigned start_exp = 2, unsigned max_exp = 64) {
    if (index == 0)
        throw hypothesis_error("ord_u_at_index: U_0 = 0 has infinite valuation");
    unsigned e = start_exp < 2 ? 2 : start_exp;
    while (true) {
        const Int residue = u_v_mod(params, index, pow_ui(p, e)).u;
        if (residue != 0)
            return static_cast<unsigned>(padic_valuation(residue, Int(static_cast<unsigned long>(p))));
        if (e >= max_exp)
            throw resource_error("ord_u_at_index: valuation exceeds the p^" +
                                 std::to_string(max_exp) + " lifting ceiling");
        e = e * 2 > max_exp ? max_exp : e * 2;
    }
}

/// ord_p U_rank for a known apparition index.  Requires p | U_rank.
inline unsigned apparition_valuation(const LucasParams& params, uint64_t p, uint64_t rank,
                                     unsigned max_exp = 64) {
    detail::require_rank_defined(params, p, "apparition_valuation");
    if (rank == 0 || u_v_mod(params, Int(static_cast<unsigned long>(rank)),
                             Int(static_cast<unsigned long>(p)))
                             .u != 0)
        throw hypothesis_error("apparition_valuation: requires p | U_rank");
    return ord_u_at_index(params, p, Int(static_cast<unsigned long>(rank)), 2, max_exp);
}

/// Computes the rank of apparition r(p) and its valuation.  r(p) divides
/// p - (D/p) when (D/p) != 0, so it is found by testing the divisors of
/// p - (D/p) in increasing order; when p | D the only candidates are {1, p}.
inline RankRecord entry_point(const LucasParams& params, uint64_t p,
                              unsigned max_exp = 64) {
    detail::require_rank_defined(params, p, "entry_point");
    const int epsilon = jacobi(params.D, Int(static_cast<unsigned long>(p)));
    std::vector<uint64_t> candidates;
    if (epsilon == 0) {
        candidates = {1, p};
    } else {
        candidates = divisors_ascending(epsilon > 0 ? p - 1 : p + 1);
    }
    const Int pz(static_cast<unsigned long>(p));
    for (uint64_t d : candidates) {
        if (u_v_mod(params, Int(static_cast<unsigned long>(d)), pz).u == 0) {
            const unsigned val =
                ord_u_at_index(params, p, Int(static_cast<unsigned long>(d)), 2, max_exp);
            return RankRecord{p, d, val, epsilon};
        }
    }
    throw std::logic_error("entry_point: no divisor of p - (D/p) is an apparition index");
}

/// Thread-safe memo table of RankRecords keyed by (P, Q, p), optionally
/// persisted as one JSON record per line with fields (P, Q, p, rank,
/// valuation, epsilon).
class RankCache {
public:
    RankRecord get(const LucasParams& params, uint64_t p) {
        const Key key{params.P, params.Q, p};
        {
            std::lock_guard<std::mutex> lock(mu_);
            auto it = table_.find(key);
            if (it != table_.end()) return it->second;
        }
        RankRecord rec = entry_point(params, p);
        std::lock_guard<std::mutex> lock(mu_);
        return table_.emplace(key, rec).first->second;
    }

    size_t size() const {
        std::lock_guard<std::mutex> lock(mu_);
        return table_.size();
    }

    void load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw io_error("rank cache: cannot open " + path);
        std::string line;
        std::lock_guard<std::mutex> lock(mu_);
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
            if (j.is_discarded())
                throw io_error("rank cache: malformed record in " + path);
            RankRecord rec{j.at("p").get<uint64_t>(), j.at("rank").get<uint64_t>(),
                           j.at("valuation").get<unsigned>(), j.at("epsilon").get<int>()};
            table_[Key{Int(j.at("P").get<std::string>()), Int(j.at("Q").get<std::string>()),
                       rec.p}] = rec;
        }
    }

    void save(const std::string& path) const {
        std::ofstream out(path, std::ios::trunc);
        if (!out) throw io_error("rank cache: cannot write " + path);
        std::lock_guard<std::mutex> lock(mu_);
        for (const auto& [key, rec] : table_) {
            nlohmann::json j{{"P", std::get<0>(key).get_str()},
                             {"Q", std::get<1>(key).get_str()},
                             {"p", rec.p},
                             {"rank", rec.rank},
                             {"valuation", rec.valuation},
                             {"epsilon", rec.epsilon}};
            out << j.dump() << '\n';
        }
        if (!out) throw io_error("rank cache: write to " + path + " failed");
    }

private:
    using Key = std::tuple<Int, Int, uint64_t>;
    mutable std::mutex mu_;
    std::map<Key, RankRecord> table_;
};

/// Lemma-of-apparition divisibility: p | U_m iff r(p) | m.
inline bool divides_iff(const LucasParams& params, uint64_t p, const Int& m,
                        RankCache* cache = nullptr) {
    if (m <= 0) throw hypothesis_error("divides_iff: index must be positive");
    const RankRecord rec = cache ? cache->get(params, p) : entry_point(params, p);
    return mpz_divisible_ui_p(m.get_mpz_t(), rec.rank) != 0;
}

}  // namespace lucaslaw
