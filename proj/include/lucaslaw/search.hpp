#pragma once

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "lucaslaw/errors.hpp"
#include "lucaslaw/lucas.hpp"
#include "lucaslaw/numtheory.hpp"
#include "lucaslaw/special.hpp"

namespace lucaslaw {

// Chunked, resumable scans over prime ranges for the rare-event predicates.
// Chunks cover `chunk` consecutive integers each, sieved segment by segment;
// results are merged strictly in ascending chunk order, so the hit list and
// every checkpoint are identical for any worker count.

enum class Predicate { Wieferich, WallSunSun, GeneralizedRepetition };

inline const char* predicate_name(Predicate p) {
    switch (p) {
        case Predicate::Wieferich: return "wieferich";
        case Predicate::WallSunSun: return "wall-sun-sun";
        case Predicate::GeneralizedRepetition: return "generalized-repetition";
    }
    return "?";
}

inline std::optional<Predicate> predicate_from_name(const std::string& name) {
    if (name == "wieferich") return Predicate::Wieferich;
    if (name == "wall-sun-sun") return Predicate::WallSunSun;
    if (name == "generalized-repetition") return Predicate::GeneralizedRepetition;
    return std::nullopt;
}

struct SearchSpec {
    Predicate predicate;
    Int P;
    Int Q;
    uint64_t lo;
    uint64_t hi;
    uint64_t chunk;  // integers per work unit

    friend bool operator==(const SearchSpec&, const SearchSpec&) = default;
};

/// Validates and normalizes a spec.  Wall-Sun-Sun is pinned to (1,-1);
/// Wieferich is pinned to (3,2), the pair whose U_n is 2^n - 1, for which the
/// generalized predicate is exactly the Wieferich condition.
inline SearchSpec make_search_spec(Predicate predicate, Int P, Int Q, uint64_t lo,
                                   uint64_t hi, uint64_t chunk = 10'000) {
    switch (predicate) {
        case Predicate::Wieferich:
            P = 3;
            Q = 2;
            break;
        case Predicate::WallSunSun:
            P = 1;
            Q = -1;
            break;
        case Predicate::GeneralizedRepetition:
            if (!make_params(P, Q).strict)
                throw hypothesis_error(
                    "search: generalized-repetition requires strict (P,Q): gcd(P,Q) = 1 and "
                    "P*Q*(P^2-Q)*(P^2-4Q) != 0");
            break;
    }
    if (lo < 3) throw hypothesis_error("search: lo must be >= 3");
    if (hi <= lo) throw hypothesis_error("search: hi must be > lo");
    if (chunk == 0) throw hypothesis_error("search: chunk must be positive");
    return SearchSpec{predicate, std::move(P), std::move(Q), lo, hi, chunk};
}

struct SearchCheckpoint {
    SearchSpec spec;
    uint64_t next_lo = 0;  // first unscanned value
    std::vector<uint64_t> hits;
    std::string version = "1";

    bool complete() const { return next_lo >= spec.hi; }
};

/// True iff the predicate applies (p does not divide Q*D) and holds at p.
/// p must be an odd prime.
inline bool predicate_holds(const SearchSpec& spec, uint64_t p) {
    switch (spec.predicate) {
        case Predicate::Wieferich:
            return wieferich_test(p);
        case Predicate::WallSunSun:
            return wall_sun_sun_test(p);
        case Predicate::GeneralizedRepetition: {
            const LucasParams params = make_params(spec.P, spec.Q);
            const Int pz(static_cast<unsigned long>(p));
            const int eps = jacobi(params.D, pz);
            const uint64_t index = eps > 0 ? p - 1 : p + 1;
            return u_v_mod(params, Int(static_cast<unsigned long>(index)), pz * pz).u == 0;
        }
    }
    return false;
}

/// The residue that decided the predicate at p (for the results log).
inline Int evidence_residue(const SearchSpec& spec, uint64_t p) {
    const Int pz(static_cast<unsigned long>(p));
    if (spec.predicate == Predicate::Wieferich)
        return pow_mod(Int(2), pz - 1, pz * pz);
    const LucasParams params = make_params(spec.P, spec.Q);
    const int eps = jacobi(params.D, pz);
    const uint64_t index = eps > 0 ? p - 1 : p + 1;
    return u_v_mod(params, Int(static_cast<unsigned long>(index)), pz * pz).u;
}

inline nlohmann::json checkpoint_to_json(const SearchCheckpoint& ck) {
    return nlohmann::json{{"version", ck.version},
                          {"predicate", predicate_name(ck.spec.predicate)},
                          {"P", ck.spec.P.get_str()},
                          {"Q", ck.spec.Q.get_str()},
                          {"lo", ck.spec.lo},
                          {"hi", ck.spec.hi},
                          {"chunk", ck.spec.chunk},
                          {"next_lo", ck.next_lo},
                          {"hits", ck.hits}};
}

inline SearchCheckpoint checkpoint_from_json(const nlohmann::json& j) {
    SearchCheckpoint ck;
    ck.version = j.at("version").get<std::string>();
    if (ck.version != "1")
        throw io_error("checkpoint: unsupported format version " + ck.version);
    const auto pred = predicate_from_name(j.at("predicate").get<std::string>());
    if (!pred) throw io_error("checkpoint: unknown predicate");
    ck.spec = SearchSpec{*pred,
                         Int(j.at("P").get<std::string>()),
                         Int(j.at("Q").get<std::string>()),
                         j.at("lo").get<uint64_t>(),
                         j.at("hi").get<uint64_t>(),
                         j.at("chunk").get<uint64_t>()};
    ck.next_lo = j.at("next_lo").get<uint64_t>();
    ck.hits = j.at("hits").get<std::vector<uint64_t>>();
    return ck;
}

/// Durable write: serialize to a sibling temp file, then atomically rename
/// over the destination, so a torn write can never corrupt resume state.
inline void save_checkpoint(const SearchCheckpoint& ck, const std::string& path) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) throw io_error("checkpoint: cannot write " + tmp);
        out << checkpoint_to_json(ck).dump() << '\n';
        out.flush();
        if (!out) throw io_error("checkpoint: write to " + tmp + " failed");
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw io_error("checkpoint: rename to " + path + " failed");
}

inline SearchCheckpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("checkpoint: cannot open " + path);
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded()) throw io_error("checkpoint: malformed JSON in " + path);
    return checkpoint_from_json(j);
}

struct RunOptions {
    unsigned workers = 1;
    uint64_t max_chunks = 0;      // stop after merging this many chunks (0 = run to hi)
    std::string checkpoint_path;  // empty = keep state in memory only
    std::string log_path;         // append one hit record per line when set
    std::function<void(uint64_t p, const Int& residue)> on_hit;  // merge-order callback
    std::function<void(uint64_t p)> on_skip;  // primes dividing Q*D, merge-order
};

namespace detail {

struct ChunkOutcome {
    std::vector<uint64_t> hits;
    std::vector<uint64_t> skipped;
};

inline ChunkOutcome scan_chunk(const SearchSpec& spec, const Int& qd_abs, uint64_t lo,
                               uint64_t hi, const std::vector<uint64_t>& base_primes) {
    ChunkOutcome out;
    for (uint64_t p : primes_in(lo, hi, base_primes)) {
        if (p < 3) continue;
        if (mpz_divisible_ui_p(qd_abs.get_mpz_t(), p)) {
            out.skipped.push_back(p);
            continue;
        }
        if (predicate_holds(spec, p)) out.hits.push_back(p);
    }
    return out;
}

}  // namespace detail

/// Runs (or resumes) a search.  Scans primes in [next_lo, hi) in ascending
/// chunks, checkpoints after every merged chunk, and returns the final state.
/// Output is identical regardless of worker count.
inline SearchCheckpoint run_search(const SearchSpec& spec,
                                   const std::optional<SearchCheckpoint>& resume = {},
                                   const RunOptions& opt = {}) {
    SearchCheckpoint state{spec, spec.lo, {}, "1"};
    if (resume) {
        if (!(resume->spec == spec))
            throw hypothesis_error("search: checkpoint/spec mismatch");
        if (resume->next_lo < spec.lo || resume->next_lo > spec.hi ||
            (resume->next_lo != spec.hi && (resume->next_lo - spec.lo) % spec.chunk != 0))
            throw hypothesis_error("search: checkpoint frontier is not a chunk boundary");
        state = *resume;
    }
    if (state.complete()) return state;

    const uint64_t first_chunk = (state.next_lo - spec.lo) / spec.chunk;
    const uint64_t total_chunks = (spec.hi - spec.lo + spec.chunk - 1) / spec.chunk;
    const auto chunk_end = [&](uint64_t i) {
        const uint64_t end = spec.lo + (i + 1) * spec.chunk;
        return end > spec.hi || end < spec.lo ? spec.hi : end;
    };

    uint64_t sieve_root = 2;
    while (sieve_root < (uint64_t(1) << 32) && sieve_root * sieve_root < spec.hi)
        ++sieve_root;
    const std::vector<uint64_t> base_primes = primes_below(sieve_root + 1);

    const LucasParams params = make_params(spec.P, spec.Q);
    const Int qd_abs = abs(params.Q * params.D);

    std::ofstream log;
    if (!opt.log_path.empty()) {
        log.open(opt.log_path, std::ios::app);
        if (!log) throw io_error("search: cannot open results log " + opt.log_path);
    }

    std::mutex mu;
    std::condition_variable cv;
    std::map<uint64_t, detail::ChunkOutcome> ready;
    std::exception_ptr worker_error;
    std::atomic<uint64_t> next_index{first_chunk};
    std::atomic<bool> stop{false};

    const unsigned workers = std::max(1u, opt.workers);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            try {
                while (!stop.load(std::memory_order_relaxed)) {
                    const uint64_t i = next_index.fetch_add(1);
                    if (i >= total_chunks) break;
                    auto outcome = detail::scan_chunk(spec, qd_abs, spec.lo + i * spec.chunk,
                                                      chunk_end(i), base_primes);
                    std::lock_guard<std::mutex> lock(mu);
                    ready.emplace(i, std::move(outcome));
                    cv.notify_all();
                }
            } catch (...) {
                std::lock_guard<std::mutex> lock(mu);
                if (!worker_error) worker_error = std::current_exception();
                stop.store(true);
                cv.notify_all();
            }
        });
    }

    uint64_t merged = 0;
    try {
        for (uint64_t i = first_chunk; i < total_chunks; ++i) {
            detail::ChunkOutcome outcome;
            {
                std::unique_lock<std::mutex> lock(mu);
                cv.wait(lock, [&] { return ready.count(i) != 0 || worker_error; });
                if (worker_error && ready.count(i) == 0)
                    std::rethrow_exception(worker_error);
                outcome = std::move(ready.at(i));
                ready.erase(i);
            }
            for (uint64_t p : outcome.skipped)
                if (opt.on_skip) opt.on_skip(p);
            for (uint64_t p : outcome.hits) {
                const Int residue = evidence_residue(spec, p);
                if (log.is_open()) {
                    log << nlohmann::json{
                               {"kind", "hit"},
                               {"payload",
                                {{"predicate", predicate_name(spec.predicate)},
                                 {"P", spec.P.get_str()},
                                 {"Q", spec.Q.get_str()},
                                 {"p", p},
                                 {"evidence_residue", residue.get_str()}}},
                               {"exit_hint", "success"}}
                               .dump()
                        << '\n';
                    log.flush();
                    if (!log) throw io_error("search: results log write failed");
                }
                if (opt.on_hit) opt.on_hit(p, residue);
                state.hits.push_back(p);
            }
            state.next_lo = chunk_end(i);
            if (!opt.checkpoint_path.empty()) save_checkpoint(state, opt.checkpoint_path);
            if (opt.max_chunks != 0 && ++merged >= opt.max_chunks) break;
        }
    } catch (...) {
        stop.store(true);
        for (auto& t : pool) t.join();
        throw;
    }
    stop.store(true);
    cv.notify_all();
    for (auto& t : pool) t.join();
    return state;
}

/// Re-evaluates the predicate on every recorded hit.
inline bool verify_hits(const SearchCheckpoint& ck) {
    const LucasParams params = make_params(ck.spec.P, ck.spec.Q);
    const Int qd_abs = abs(params.Q * params.D);
    for (uint64_t p : ck.hits) {
        if (p < ck.spec.lo || p >= ck.next_lo) return false;
        if (!is_prime(p)) return false;
        if (mpz_divisible_ui_p(qd_abs.get_mpz_t(), p)) return false;
        if (!predicate_holds(ck.spec, p)) return false;
    }
    return true;
}

}  // namespace lucaslaw
