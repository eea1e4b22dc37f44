// lucaslaw command-line interface.
//
// Subcommands: eval, rank, verify {lemma1,lemma2,theorem1,theorem2,corollary1},
// ord, special {s-seq,a-pow,fermat}, search.  Output is one JSON record per
// line ({"kind","payload","exit_hint"}); --human switches to aligned tables.
//
// Exit status: 0 success, 2 hypothesis violation (including usage errors),
// 3 resource limit, 4 I/O failure.

#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "lucaslaw/congruence.hpp"
#include "lucaslaw/errors.hpp"
#include "lucaslaw/lucas.hpp"
#include "lucaslaw/numtheory.hpp"
#include "lucaslaw/rank.hpp"
#include "lucaslaw/records.hpp"
#include "lucaslaw/search.hpp"
#include "lucaslaw/special.hpp"

namespace {

using lucaslaw::Int;
using lucaslaw::json;

constexpr int kExitSuccess = 0;
constexpr int kExitHypothesis = 2;
constexpr int kExitResource = 3;
constexpr int kExitIo = 4;

/// Decimal integer with optional leading minus and optional underscore
/// separators, e.g. -P 1_000_003.
Int parse_int(const std::string& raw, const std::string& name) {
    std::string digits;
    digits.reserve(raw.size());
    for (char c : raw)
        if (c != '_') digits.push_back(c);
    bool ok = !digits.empty();
    for (size_t i = 0; i < digits.size() && ok; ++i) {
        if (i == 0 && digits[i] == '-')
            ok = digits.size() > 1;
        else
            ok = std::isdigit(static_cast<unsigned char>(digits[i]));
    }
    if (!ok)
        throw lucaslaw::hypothesis_error(name + ": expected a decimal integer, got '" + raw +
                                         "'");
    return Int(digits);
}

uint64_t parse_u64(const std::string& raw, const std::string& name) {
    const Int value = parse_int(raw, name);
    if (value < 0 || !value.fits_ulong_p())
        throw lucaslaw::hypothesis_error(name + ": value out of range: " + raw);
    return value.get_ui();
}

unsigned parse_u32(const std::string& raw, const std::string& name) {
    const uint64_t value = parse_u64(raw, name);
    if (value > UINT32_MAX)
        throw lucaslaw::hypothesis_error(name + ": value out of range: " + raw);
    return static_cast<unsigned>(value);
}

class Emitter {
public:
    explicit Emitter(bool human) : human_(human) {}

    void record(const std::string& kind, const json& payload,
                const std::string& hint = "success") {
        if (!human_) {
            std::cout << lucaslaw::wrap_record(kind, payload, hint).dump() << '\n';
            return;
        }
        std::cout << kind << ":\n";
        size_t width = 0;
        for (const auto& [key, value] : payload.items()) width = std::max(width, key.size());
        for (const auto& [key, value] : payload.items()) {
            std::cout << "  " << key << std::string(width - key.size() + 2, ' ')
                      << (value.is_string() ? value.get<std::string>() : value.dump()) << '\n';
        }
        if (hint != "success") std::cout << "  (" << hint << ")\n";
    }

private:
    bool human_;
};

struct CommonArgs {
    std::string P, Q;
    lucaslaw::LucasParams params() const {
        return lucaslaw::make_params(parse_int(P, "-P"), parse_int(Q, "-Q"));
    }
};

void add_params_options(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("-P", args.P, "recurrence coefficient P")->required();
    cmd->add_option("-Q", args.Q, "recurrence coefficient Q")->required();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Lucas sequence congruence toolkit"};
    app.require_subcommand(1);
    app.fallthrough();
    bool human = false;
    app.add_flag("--human", human, "aligned tables instead of JSON records");

    std::string active_kind = "report";
    std::optional<std::function<void(Emitter&)>> action;

    // ---- eval ----------------------------------------------------------
    auto* eval = app.add_subcommand("eval", "evaluate (U_n, V_n), exactly or mod M");
    eval->fallthrough();
    auto eval_args = std::make_shared<CommonArgs>();
    auto eval_n = std::make_shared<std::string>();
    auto eval_mod = std::make_shared<std::string>();
    add_params_options(eval, *eval_args);
    eval->add_option("-n", *eval_n, "sequence index")->required();
    eval->add_option("--mod", *eval_mod, "evaluate modulo this value");
    eval->callback([&, eval_args, eval_n, eval_mod] {
        active_kind = "pair";
        action = [=](Emitter& out) {
            const auto params = eval_args->params();
            const Int n = parse_int(*eval_n, "-n");
            if (n < 0) throw lucaslaw::hypothesis_error("-n: index must be nonnegative");
            if (eval_mod->empty()) {
                const lucaslaw::EvalLimits limits;
                if (n > limits.max_index)
                    throw lucaslaw::resource_error(
                        "eval: index exceeds the exact-evaluation cap; use --mod");
                out.record("pair",
                           lucaslaw::pair_json(params, u_v_exact(params, n.get_ui())));
            } else {
                const Int modulus = parse_int(*eval_mod, "--mod");
                out.record("pair", lucaslaw::pair_json(params, u_v_mod(params, n, modulus)));
            }
        };
    });

    // ---- rank ----------------------------------------------------------
    auto* rank = app.add_subcommand("rank", "rank of apparition r(p) and ord_p U_r(p)");
    rank->fallthrough();
    auto rank_args = std::make_shared<CommonArgs>();
    auto rank_p = std::make_shared<std::string>();
    auto rank_cache = std::make_shared<std::string>();
    add_params_options(rank, *rank_args);
    rank->add_option("--prime", *rank_p, "odd prime p")->required();
    rank->add_option("--cache", *rank_cache, "line-delimited rank record file");
    rank->callback([&, rank_args, rank_p, rank_cache] {
        active_kind = "rank";
        action = [=](Emitter& out) {
            const auto params = rank_args->params();
            const uint64_t p = parse_u64(*rank_p, "--prime");
            lucaslaw::RankRecord rec{};
            if (rank_cache->empty()) {
                rec = lucaslaw::entry_point(params, p);
            } else {
                lucaslaw::RankCache cache;
                if (std::filesystem::exists(*rank_cache)) cache.load(*rank_cache);
                rec = cache.get(params, p);
                cache.save(*rank_cache);
            }
            out.record("rank", lucaslaw::rank_json(params, rec));
        };
    });

    // ---- verify --------------------------------------------------------
    auto* verify = app.add_subcommand("verify", "machine-check one congruence statement");
    verify->require_subcommand(1);
    verify->fallthrough();
    struct VerifyArgs {
        CommonArgs common;
        std::string k, m, n, r, p;
    };
    auto add_verify_sub = [&](const char* name, const char* desc,
                              std::initializer_list<char> needs) {
        auto* sub = verify->add_subcommand(name, desc);
        sub->fallthrough();
        auto args = std::make_shared<VerifyArgs>();
        add_params_options(sub, args->common);
        for (char c : needs) {
            switch (c) {
                case 'k': sub->add_option("-k", args->k)->required(); break;
                case 'm': sub->add_option("-m", args->m)->required(); break;
                case 'n': sub->add_option("-n", args->n)->required(); break;
                case 'r': sub->add_option("-r", args->r)->required(); break;
                case 'p': sub->add_option("--prime", args->p)->required(); break;
            }
        }
        return std::make_pair(sub, args);
    };

    {
        auto [sub, args] = add_verify_sub("lemma1", "U_n mod |D| closed-form residue", {'n'});
        sub->callback([&, args = args] {
            active_kind = "report";
            action = [=](Emitter& out) {
                const auto params = args->common.params();
                auto report = lucaslaw::check_lemma1(params, parse_int(args->n, "-n"));
                json j = lucaslaw::report_json(params, report);
                j["n"] = args->n;
                out.record("report", j);
            };
        });
    }
    {
        auto [sub, args] =
            add_verify_sub("lemma2", "subsampled-ratio congruences", {'k', 'n'});
        sub->callback([&, args = args] {
            active_kind = "report";
            action = [=](Emitter& out) {
                const auto params = args->common.params();
                auto [a, b] = lucaslaw::check_lemma2(params, parse_u64(args->k, "-k"),
                                                     parse_u64(args->n, "-n"));
                for (const auto& report : {a, b}) {
                    json j = lucaslaw::report_json(params, report);
                    j["k"] = parse_u64(args->k, "-k");
                    j["n"] = parse_u64(args->n, "-n");
                    out.record("report", j);
                }
            };
        });
    }
    {
        auto [sub, args] = add_verify_sub("theorem1", "U_{kmn^r}/U_k congruence",
                                          {'k', 'm', 'n', 'r'});
        sub->callback([&, args = args] {
            active_kind = "report";
            action = [=](Emitter& out) {
                const auto params = args->common.params();
                const uint64_t k = parse_u64(args->k, "-k"), m = parse_u64(args->m, "-m"),
                               n = parse_u64(args->n, "-n"), r = parse_u64(args->r, "-r");
                auto report = lucaslaw::check_theorem1(params, k, m, n, r);
                json j = lucaslaw::report_json(params, report);
                j["k"] = k;
                j["m"] = m;
                j["n"] = n;
                j["r"] = r;
                out.record("report", j);
            };
        });
    }
    {
        auto [sub, args] = add_verify_sub("theorem2", "law-of-repetition certificate",
                                          {'k', 'm', 'n', 'r'});
        sub->callback([&, args = args] {
            active_kind = "report";
            action = [=](Emitter& out) {
                const auto params = args->common.params();
                auto report = lucaslaw::check_theorem2(
                    params, parse_u64(args->k, "-k"), parse_u64(args->m, "-m"),
                    parse_u64(args->n, "-n"), parse_u64(args->r, "-r"));
                out.record("report", lucaslaw::repetition_json(params, report));
            };
        });
    }
    {
        auto [sub, args] = add_verify_sub("corollary1", "U_{kp^r}/U_k == p^r mod p^(r+1)",
                                          {'k', 'p', 'r'});
        sub->callback([&, args = args] {
            active_kind = "report";
            action = [=](Emitter& out) {
                const auto params = args->common.params();
                const uint64_t k = parse_u64(args->k, "-k"),
                               p = parse_u64(args->p, "--prime"),
                               r = parse_u64(args->r, "-r");
                auto report = lucaslaw::check_corollary1(params, k, p, r);
                json j = lucaslaw::report_json(params, report);
                j["k"] = k;
                j["p"] = p;
                j["r"] = r;
                out.record("report", j);
            };
        });
    }

    // ---- ord -----------------------------------------------------------
    auto* ord = app.add_subcommand("ord", "ord_p U_m or ord_p V_m, without computing U_m");
    ord->fallthrough();
    auto ord_args = std::make_shared<CommonArgs>();
    auto ord_p = std::make_shared<std::string>();
    auto ord_m = std::make_shared<std::string>();
    auto ord_which = std::make_shared<std::string>("u");
    add_params_options(ord, *ord_args);
    ord->add_option("--prime", *ord_p, "odd prime p")->required();
    ord->add_option("-m", *ord_m, "sequence index")->required();
    ord->add_option("--which", *ord_which, "u or v")
        ->check(CLI::IsMember({"u", "v"}));
    ord->callback([&, ord_args, ord_p, ord_m, ord_which] {
        active_kind = "verdict";
        action = [=](Emitter& out) {
            const auto params = ord_args->params();
            const uint64_t p = parse_u64(*ord_p, "--prime");
            const Int m = parse_int(*ord_m, "-m");
            const unsigned value = *ord_which == "u" ? lucaslaw::ord_u_fast(params, p, m)
                                                     : lucaslaw::ord_v_fast(params, p, m);
            out.record("verdict", json{{"query", "ord"},
                                       {"which", *ord_which},
                                       {"P", params.P.get_str()},
                                       {"Q", params.Q.get_str()},
                                       {"p", p},
                                       {"m", m.get_str()},
                                       {"valuation", value}});
        };
    });

    // ---- special -------------------------------------------------------
    auto* special = app.add_subcommand("special", "square-factor queries for named families");
    special->require_subcommand(1);
    special->fallthrough();

    auto* sseq = special->add_subcommand("s-seq", "p^alpha | S_n for S_{k+1} = S_k^2 - 2");
    sseq->fallthrough();
    auto sseq_P = std::make_shared<std::string>();
    auto sseq_n = std::make_shared<std::string>();
    auto sseq_p = std::make_shared<std::string>();
    auto sseq_alpha = std::make_shared<std::string>("1");
    sseq->add_option("-P", *sseq_P, "seed parameter, S_1 = P^2 + 2")->required();
    sseq->add_option("-n", *sseq_n, "term index")->required();
    sseq->add_option("--prime", *sseq_p, "odd prime factor of S_n")->required();
    sseq->add_option("--alpha", *sseq_alpha, "exponent queried");
    sseq->callback([&, sseq_P, sseq_n, sseq_p, sseq_alpha] {
        active_kind = "verdict";
        action = [=](Emitter& out) {
            auto verdict = lucaslaw::s_square_factor(
                parse_int(*sseq_P, "-P"), parse_u64(*sseq_n, "-n"),
                parse_u64(*sseq_p, "--prime"), parse_u32(*sseq_alpha, "--alpha"));
            out.record("verdict", lucaslaw::verdict_json(verdict));
        };
    });

    auto* apow = special->add_subcommand("a-pow", "ord_p(a^n + 1) via the valuation law");
    apow->fallthrough();
    auto apow_a = std::make_shared<std::string>();
    auto apow_n = std::make_shared<std::string>();
    auto apow_p = std::make_shared<std::string>();
    apow->add_option("-a", *apow_a, "base, a != -1, 0, 1")->required();
    apow->add_option("-n", *apow_n, "exponent")->required();
    apow->add_option("--prime", *apow_p, "odd prime dividing a^n + 1")->required();
    apow->callback([&, apow_a, apow_n, apow_p] {
        active_kind = "verdict";
        action = [=](Emitter& out) {
            const Int a = parse_int(*apow_a, "-a");
            const uint64_t n = parse_u64(*apow_n, "-n");
            const uint64_t p = parse_u64(*apow_p, "--prime");
            const unsigned value = lucaslaw::a_pow_plus_one_ord(a, n, p);
            out.record("verdict", json{{"family", "a-pow"},
                                       {"a", a.get_str()},
                                       {"n", n},
                                       {"p", p},
                                       {"valuation", value}});
        };
    });

    auto* fermat = special->add_subcommand("fermat", "p^alpha | 2^(2^idx) + 1");
    fermat->fallthrough();
    auto fermat_idx = std::make_shared<std::string>();
    auto fermat_p = std::make_shared<std::string>();
    auto fermat_alpha = std::make_shared<std::string>("1");
    fermat->add_option("--index", *fermat_idx, "Fermat index")->required();
    fermat->add_option("--prime", *fermat_p, "odd prime factor")->required();
    fermat->add_option("--alpha", *fermat_alpha, "exponent queried");
    fermat->callback([&, fermat_idx, fermat_p, fermat_alpha] {
        active_kind = "verdict";
        action = [=](Emitter& out) {
            auto verdict = lucaslaw::fermat_square_check(parse_u64(*fermat_idx, "--index"),
                                                         parse_u64(*fermat_p, "--prime"),
                                                         parse_u32(*fermat_alpha, "--alpha"));
            out.record("verdict", lucaslaw::verdict_json(verdict));
        };
    });

    // ---- search --------------------------------------------------------
    auto* search = app.add_subcommand("search", "resumable prime-range predicate scan");
    search->fallthrough();
    auto search_pred = std::make_shared<std::string>();
    auto search_args = std::make_shared<CommonArgs>();
    auto search_lo = std::make_shared<std::string>();
    auto search_hi = std::make_shared<std::string>();
    auto search_chunk = std::make_shared<std::string>("10000");
    auto search_ckpt = std::make_shared<std::string>();
    auto search_log = std::make_shared<std::string>();
    auto search_workers = std::make_shared<std::string>("1");
    auto search_resume = std::make_shared<bool>(false);
    search
        ->add_option("--predicate", *search_pred,
                     "wieferich | wall-sun-sun | generalized-repetition")
        ->required()
        ->check(CLI::IsMember({"wieferich", "wall-sun-sun", "generalized-repetition"}));
    search->add_option("-P", search_args->P, "P for generalized-repetition");
    search->add_option("-Q", search_args->Q, "Q for generalized-repetition");
    search->add_option("--lo", *search_lo, "range start (inclusive, >= 3)")->required();
    search->add_option("--hi", *search_hi, "range end (exclusive)")->required();
    search->add_option("--chunk", *search_chunk, "integers per work unit");
    search->add_option("--checkpoint", *search_ckpt, "checkpoint file path");
    search->add_option("--log", *search_log, "append hit records to this file");
    search->add_option("--workers", *search_workers, "concurrent chunk workers");
    search->add_flag("--resume", *search_resume, "resume from the checkpoint file");
    search->callback([&, search_pred, search_args, search_lo, search_hi, search_chunk,
                      search_ckpt, search_log, search_workers, search_resume] {
        active_kind = "checkpoint-summary";
        action = [=](Emitter& out) {
            const auto pred = lucaslaw::predicate_from_name(*search_pred);
            Int P = 0, Q = 0;
            if (*pred == lucaslaw::Predicate::GeneralizedRepetition) {
                if (search_args->P.empty() || search_args->Q.empty())
                    throw lucaslaw::hypothesis_error(
                        "search: generalized-repetition requires -P and -Q");
                P = parse_int(search_args->P, "-P");
                Q = parse_int(search_args->Q, "-Q");
            }
            const auto spec = lucaslaw::make_search_spec(
                *pred, P, Q, parse_u64(*search_lo, "--lo"), parse_u64(*search_hi, "--hi"),
                parse_u64(*search_chunk, "--chunk"));
            std::optional<lucaslaw::SearchCheckpoint> start;
            if (*search_resume && !search_ckpt->empty() &&
                std::filesystem::exists(*search_ckpt))
                start = lucaslaw::load_checkpoint(*search_ckpt);
            lucaslaw::RunOptions opt;
            opt.workers = parse_u32(*search_workers, "--workers");
            opt.checkpoint_path = *search_ckpt;
            opt.log_path = *search_log;
            opt.on_hit = [&](uint64_t p, const Int& residue) {
                out.record("hit", lucaslaw::hit_json(spec, p, residue));
            };
            opt.on_skip = [&](uint64_t p) {
                std::cerr << "skipping p = " << p << " (divides Q*D)\n";
            };
            const auto done = lucaslaw::run_search(spec, start, opt);
            out.record("checkpoint-summary",
                       lucaslaw::checkpoint_summary_json(done, *search_ckpt));
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << '\n';
        return kExitHypothesis;
    }

    Emitter out(human);
    try {
        if (action) (*action)(out);
        return kExitSuccess;
    } catch (const lucaslaw::hypothesis_error& e) {
        out.record(active_kind, json{{"error", e.what()}}, "hypothesis-violation");
        return kExitHypothesis;
    } catch (const lucaslaw::resource_error& e) {
        out.record(active_kind, json{{"error", e.what()}}, "resource-limit");
        return kExitResource;
    } catch (const lucaslaw::io_error& e) {
        std::cerr << e.what() << '\n';
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return kExitIo;
    }
}
