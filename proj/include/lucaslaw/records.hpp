#pragma once

#include <string>

#include <json.hpp>

#include "lucaslaw/congruence.hpp"
#include "lucaslaw/lucas.hpp"
#include "lucaslaw/rank.hpp"
#include "lucaslaw/search.hpp"
#include "lucaslaw/special.hpp"

namespace lucaslaw {

// Line-delimited record stream shared by the CLI and the search results log.
// Every record is {"kind": ..., "payload": {...}, "exit_hint": ...} on one
// line.  Arbitrary-precision values are serialized as decimal strings;
// word-sized values as JSON numbers.

using json = nlohmann::json;

inline json params_json(const LucasParams& params) {
    return json{{"P", params.P.get_str()},
                {"Q", params.Q.get_str()},
                {"D", params.D.get_str()},
                {"strict", params.strict}};
}

inline json pair_json(const LucasParams& params, const SequencePair& pair) {
    json j = params_json(params);
    j["n"] = pair.n;
    j["u"] = pair.u.get_str();
    j["v"] = pair.v.get_str();
    return j;
}

inline json pair_json(const LucasParams& params, const ModSequencePair& pair) {
    json j = params_json(params);
    j["n"] = pair.n.get_str();
    j["modulus"] = pair.modulus.get_str();
    j["u"] = pair.u.get_str();
    j["v"] = pair.v.get_str();
    j["qn"] = pair.qn.get_str();
    return j;
}

inline json rank_json(const LucasParams& params, const RankRecord& rec) {
    return json{{"P", params.P.get_str()}, {"Q", params.Q.get_str()},
                {"p", rec.p},              {"rank", rec.rank},
                {"valuation", rec.valuation}, {"epsilon", rec.epsilon}};
}

inline json report_json(const LucasParams& params, const CongruenceReport& report) {
    return json{{"statement", statement_name(report.statement)},
                {"P", params.P.get_str()},
                {"Q", params.Q.get_str()},
                {"lhs", report.lhs.get_str()},
                {"rhs", report.rhs.get_str()},
                {"modulus", report.modulus.get_str()},
                {"holds", report.holds}};
}

inline json repetition_json(const LucasParams& params, const RepetitionReport& report) {
    return json{{"statement", "theorem2"},
                {"P", params.P.get_str()},
                {"Q", params.Q.get_str()},
                {"k", report.k},
                {"m", report.m},
                {"n", report.n},
                {"r", report.r},
                {"s", report.s},
                {"predicted_min", report.predicted_min},
                {"exact_ord", report.exact_ord},
                {"strict", report.strict},
                {"ns_is_two", report.ns_is_two}};
}

inline json verdict_json(const SquareFactorVerdict& verdict) {
    return json{{"family", family_name(verdict.family)},
                {"parameter", verdict.parameter.get_str()},
                {"index", verdict.index},
                {"p", verdict.p},
                {"alpha", verdict.alpha},
                {"holds", verdict.holds},
                {"witness", verdict.witness.get_str()}};
}

inline json hit_json(const SearchSpec& spec, uint64_t p, const Int& residue) {
    return json{{"predicate", predicate_name(spec.predicate)},
                {"P", spec.P.get_str()},
                {"Q", spec.Q.get_str()},
                {"p", p},
                {"evidence_residue", residue.get_str()}};
}

inline json checkpoint_summary_json(const SearchCheckpoint& ck, const std::string& path) {
    json j = checkpoint_to_json(ck);
    j["complete"] = ck.complete();
    j["hit_count"] = ck.hits.size();
    if (!path.empty()) j["path"] = path;
    return j;
}

inline json wrap_record(const std::string& kind, json payload,
                        const std::string& exit_hint = "success") {
    return json{{"kind", kind}, {"payload", std::move(payload)}, {"exit_hint", exit_hint}};
}

}  // namespace lucaslaw
