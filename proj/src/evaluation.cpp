#include "kbregex/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "kbregex/parallel.hpp"

namespace kbregex {

long hits_rank(const RankOutcome& o) {
    return static_cast<long>(std::floor(o.frac_rank + 0.5));
}

double rank_from_distances(double target_dist, std::span<const double> others) {
    size_t closer = 0, ties = 0;
    for (double d : others) {
        if (d < target_dist) ++closer;
        else if (d == target_dist) ++ties;
    }
    return 1.0 + static_cast<double>(closer) + static_cast<double>(ties) / 2.0;
}

namespace {

void check_vocab(const KnowledgeBase& kb, const ModelParams& params) {
    if (params.num_entities != kb.num_entities() || params.num_relations != kb.num_relations()) {
        throw ModelError("parameter tables sized for " + std::to_string(params.num_entities) +
                         "/" + std::to_string(params.num_relations) + " but the KB has " +
                         std::to_string(kb.num_entities()) + "/" +
                         std::to_string(kb.num_relations()));
    }
}

// ranks of every answer of one query; distances are computed once per query
void rank_query(const ModelParams& params, Variant v, const RegexQuery& q,
                std::vector<RankOutcome>& out) {
    const size_t nE = params.num_entities;
    EmbeddedQuery emb = embed_regex(params, v, q.head, q.expr);
    if (emb.unanswerable) {
        for (EntId target : q.answers) {
            RankOutcome o;
            o.target = target;
            o.infinite = true;
            o.candidates = nE - q.full_answers.size() + 1;
            o.type_tag = q.type_tag;
            out.push_back(std::move(o));
        }
        return;
    }

    Vec dist(nE);
    for (size_t e = 0; e < nE; ++e) {
        dist[e] = query_distance(params, emb, static_cast<EntId>(e));
    }

    for (EntId target : q.answers) {
        if (!std::binary_search(q.full_answers.begin(), q.full_answers.end(), target)) {
            throw ModelError("target " + std::to_string(target) +
                             " missing from the query's full answer set");
        }
        size_t closer = 0, ties = 0;
        const double dt = dist[static_cast<size_t>(target)];
        for (size_t e = 0; e < nE; ++e) {
            if (static_cast<EntId>(e) == target) continue;
            if (std::binary_search(q.full_answers.begin(), q.full_answers.end(),
                                   static_cast<EntId>(e))) {
                continue;  // filtered: other true answers never compete
            }
            if (dist[e] < dt) ++closer;
            else if (dist[e] == dt) ++ties;
        }
        RankOutcome o;
        o.target = target;
        o.frac_rank = 1.0 + static_cast<double>(closer) + static_cast<double>(ties) / 2.0;
        o.candidates = nE - q.full_answers.size() + 1;
        o.type_tag = q.type_tag;
        out.push_back(std::move(o));
    }
}

}  // namespace

RankOutcome filtered_rank(const ModelParams& params, Variant v, const RegexQuery& query,
                          EntId target) {
    if (!std::binary_search(query.full_answers.begin(), query.full_answers.end(), target)) {
        throw ModelError("filtered_rank: target is not in the query's answer set");
    }
    RegexQuery one = query;
    one.answers = {target};
    std::vector<RankOutcome> out;
    rank_query(params, v, one, out);
    return out.front();
}

EvalReport metrics(std::span<const RankOutcome> outcomes, bool include_infinite) {
    EvalReport rep;
    struct Acc {
        double mrr = 0, h1 = 0, h5 = 0, h10 = 0;
        size_t n = 0;
    };
    std::map<std::string, Acc> per_type;
    Acc overall;

    for (const RankOutcome& o : outcomes) {
        ++rep.total_pairs;
        if (o.infinite) {
            ++rep.unanswerable;
            if (!include_infinite) continue;
        } else {
            ++rep.evaluated;
        }
        Acc& t = per_type[o.type_tag];
        for (Acc* a : {&overall, &t}) {
            ++a->n;
            if (!o.infinite) {
                a->mrr += 1.0 / o.frac_rank;
                long r = hits_rank(o);
                if (r <= 1) a->h1 += 1;
                if (r <= 5) a->h5 += 1;
                if (r <= 10) a->h10 += 1;
            }
        }
    }

    auto to_block = [](const Acc& a) {
        MetricBlock b;
        b.count = a.n;
        if (a.n > 0) {
            b.mrr = a.mrr / static_cast<double>(a.n);
            b.hits1 = a.h1 / static_cast<double>(a.n);
            b.hits5 = a.h5 / static_cast<double>(a.n);
            b.hits10 = a.h10 / static_cast<double>(a.n);
        }
        return b;
    };
    rep.overall = to_block(overall);
    for (const auto& [tag, acc] : per_type) rep.per_type[tag] = to_block(acc);
    return rep;
}

std::vector<RankOutcome> rank_all_pairs_serial(const KnowledgeBase& kb, const ModelParams& params,
                                               Variant v, const std::vector<RegexQuery>& queries) {
    check_vocab(kb, params);
    std::vector<RankOutcome> out;
    for (const RegexQuery& q : queries) rank_query(params, v, q, out);
    return out;
}

std::vector<RankOutcome> rank_all_pairs(const KnowledgeBase& kb, const ModelParams& params,
                                        Variant v, const std::vector<RegexQuery>& queries,
                                        int workers) {
    check_vocab(kb, params);
    std::vector<std::vector<RankOutcome>> per_query(queries.size());
    parallel_for(queries.size(), workers, [&](size_t i) {
        rank_query(params, v, queries[i], per_query[i]);
    });
    std::vector<RankOutcome> out;  // canonical query order regardless of workers
    for (auto& chunk : per_query) {
        for (auto& o : chunk) out.push_back(std::move(o));
    }
    return out;
}

EvalReport evaluate_split(const KnowledgeBase& kb, const ModelParams& params, Variant v,
                          const std::vector<RegexQuery>& queries, const EvalOptions& opts) {
    const std::vector<RegexQuery>* use = &queries;
    std::vector<RegexQuery> filtered;
    if (opts.types_answerable_by_all) {
        for (const RegexQuery& q : queries) {
            bool all = true;
            for (Variant w : {Variant::Baseline, Variant::FreeAgg, Variant::FreeDeepsets,
                              Variant::ProjAgg, Variant::Comp}) {
                if (!is_answerable(q.expr, w)) {
                    all = false;
                    break;
                }
            }
            if (all) filtered.push_back(q);
        }
        use = &filtered;
    }

    std::vector<RankOutcome> outcomes = rank_all_pairs(kb, params, v, *use, opts.workers);
    if (!opts.outcome_dump_path.empty()) {
        std::ofstream dump(opts.outcome_dump_path, std::ios::binary);
        for (const RankOutcome& o : outcomes) {
            nlohmann::json j;
            j["target"] = kb.entity_name(o.target);
            j["type"] = o.type_tag;
            j["candidates"] = o.candidates;
            if (o.infinite) {
                j["rank"] = "inf";
            } else {
                j["rank"] = o.frac_rank;
            }
            dump << j.dump() << '\n';
        }
    }
    EvalReport rep = metrics(outcomes, opts.include_infinite);

    nlohmann::json echo;
    echo["variant"] = variant_name(v);
    echo["model"] = model_kind_name(params.kind);
    echo["dim"] = params.dim;
    echo["alpha"] = params.alpha;
    echo["gamma"] = params.gamma;
    echo["include_infinite"] = opts.include_infinite;
    echo["types_answerable_by_all"] = opts.types_answerable_by_all;
    rep.config_echo = echo.dump();
    return rep;
}

std::string EvalReport::to_json() const {
    nlohmann::json j;
    auto block = [](const MetricBlock& b) {
        nlohmann::json m;
        m["mrr"] = b.mrr;
        m["hits1"] = b.hits1;
        m["hits5"] = b.hits5;
        m["hits10"] = b.hits10;
        m["count"] = b.count;
        return m;
    };
    j["overall"] = block(overall);
    j["per_type"] = nlohmann::json::object();
    for (const auto& [tag, b] : per_type) j["per_type"][tag] = block(b);
    j["total_pairs"] = total_pairs;
    j["evaluated"] = evaluated;
    j["unanswerable"] = unanswerable;
    if (!config_echo.empty()) j["config"] = nlohmann::json::parse(config_echo);
    return j.dump(2);
}

}  // namespace kbregex
