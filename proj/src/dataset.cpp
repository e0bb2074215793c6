#include "kbregex/dataset.hpp"

#include <algorithm>
#include <set>

#include <json.hpp>

#include "kbregex/nfa.hpp"
#include "kbregex/parallel.hpp"

namespace kbregex {

QueryTemplate make_template(std::string_view tag) {
    QueryTemplate t;
    t.tag = std::string(tag);
    int arity = 0;
    auto resolve = [&arity](std::string_view tok) -> std::optional<RelId> {
        if (tok.size() == 2 && tok[0] == 'r' && tok[1] >= '1' && tok[1] <= '3') {
            int id = tok[1] - '1';
            arity = std::max(arity, id + 1);
            return static_cast<RelId>(id);
        }
        return std::nullopt;
    };
    t.pattern = parse(tag, resolve);
    t.arity = arity;
    return t;
}

std::vector<QueryTemplate> builtin_templates(std::string_view dataset) {
    static const char* fb15k[] = {
        "r1+",          "r1/r2",        "r1+/r2+",      "r1+/r2+/r3+", "r1/r2+",
        "r1+/r2",       "r1+/r2+/r3",   "r1+/r2/r3+",   "r1/r2+/r3+",  "r1/r2/r3+",
        "r1/r2+/r3",    "r1+/r2/r3",    "r1|r2",        "(r1|r2)/r3",  "r1/(r2|r3)",
        "r1+|r2+",      "(r1|r2)/r3+",  "(r1+|r2+)/r3", "r1+/(r2|r3)", "r1/(r2+|r3+)",
        "(r1|r2)+",
    };
    static const char* wiki100[] = {"r1+", "r1+/r2+", "r1/r2+", "r1|r2", "(r1|r2)+"};

    std::vector<QueryTemplate> out;
    if (dataset == "fb15k-regex") {
        for (const char* tag : fb15k) out.push_back(make_template(tag));
    } else if (dataset == "wiki100-regex") {
        for (const char* tag : wiki100) out.push_back(make_template(tag));
    } else {
        throw std::invalid_argument("unknown template set: " + std::string(dataset) +
                                    " (expected fb15k-regex or wiki100-regex)");
    }
    return out;
}

namespace {

RegexPtr substitute(const RegexPtr& pattern, const std::vector<RelId>& rels) {
    switch (pattern->op) {
        case RegexOp::Rel: return RegexExpr::make_rel(rels[static_cast<size_t>(pattern->rel)]);
        case RegexOp::Plus: return RegexExpr::make_plus(substitute(pattern->left, rels));
        case RegexOp::Compose:
            return RegexExpr::make_compose(substitute(pattern->left, rels),
                                           substitute(pattern->right, rels));
        case RegexOp::Disj:
            return RegexExpr::make_disj(substitute(pattern->left, rels),
                                        substitute(pattern->right, rels));
    }
    return nullptr;
}

// Relations that can start a compatible path: labels leaving the NFA start.
std::vector<RelId> first_relations(const RegexPtr& expr) {
    RegexNfa nfa = to_nfa(expr);
    std::set<RelId> firsts;
    for (auto [rel, to] : nfa.edges[static_cast<size_t>(nfa.start)]) {
        (void)to;
        firsts.insert(rel);
    }
    return {firsts.begin(), firsts.end()};
}

// distinct relation ids, uniform
std::vector<RelId> sample_relations(Rng& rng, int arity, size_t num_relations) {
    std::vector<RelId> rels;
    while (static_cast<int>(rels.size()) < arity) {
        RelId r = static_cast<RelId>(rng.next_below(num_relations));
        if (std::find(rels.begin(), rels.end(), r) == rels.end()) rels.push_back(r);
    }
    return rels;
}

void generate_for_template(const KnowledgeBase& kb, const DatasetSpec& spec,
                           const QueryTemplate& tmpl, std::vector<RegexQuery>& out,
                           TemplateReport& rep) {
    rep.tag = tmpl.tag;
    rep.requested = spec.queries_per_template;
    if (static_cast<size_t>(tmpl.arity) > kb.num_relations()) {
        throw KbError("template " + tmpl.tag + " needs " + std::to_string(tmpl.arity) +
                      " distinct relations but the KB has " + std::to_string(kb.num_relations()));
    }
    Rng rng(mix_stream(spec.seed, "gen/" + tmpl.tag));
    const long max_attempts = static_cast<long>(spec.attempts_factor) * spec.queries_per_template;
    std::set<std::pair<EntId, std::string>> seen;
    auto name_of = [&kb](RelId r) { return kb.relation_name(r); };

    while (rep.generated < spec.queries_per_template && rep.attempts < max_attempts) {
        ++rep.attempts;
        std::vector<RelId> rels = sample_relations(rng, tmpl.arity, kb.num_relations());
        RegexPtr expr = substitute(tmpl.pattern, rels);

        std::vector<EntId> heads;
        for (RelId r : first_relations(expr)) {
            const auto& h = kb.adjacency(GraphSel::Full).heads(r);
            heads.insert(heads.end(), h.begin(), h.end());
        }
        std::sort(heads.begin(), heads.end());
        heads.erase(std::unique(heads.begin(), heads.end()), heads.end());
        if (heads.empty()) {
            ++rep.rejected_no_head;
            continue;
        }
        EntId head = heads[rng.next_below(heads.size())];

        std::string text = print(expr, name_of);
        if (seen.count({head, text})) {
            ++rep.rejected_duplicate;
            continue;
        }

        std::vector<EntId> answers = answer_set_capped(kb, GraphSel::Full, head, expr, spec.max_len);
        if (answers.empty()) {
            ++rep.rejected_empty;
            continue;
        }
        if (static_cast<int>(answers.size()) > spec.max_answers) {
            ++rep.rejected_oversize;
            continue;
        }

        seen.insert({head, text});
        RegexQuery q;
        q.head = head;
        q.expr = std::move(expr);
        q.regex_text = std::move(text);
        q.answers = answers;
        q.full_answers = std::move(answers);
        q.type_tag = tmpl.tag;
        out.push_back(std::move(q));
        ++rep.generated;
    }
}

}  // namespace

std::vector<RegexQuery> generate_queries(const KnowledgeBase& kb, const DatasetSpec& spec,
                                         GenReport& report) {
    kb.adjacency(GraphSel::Full);  // build once before fanning out
    const size_t nt = spec.templates.size();
    std::vector<std::vector<RegexQuery>> results(nt);
    report.per_template.assign(nt, {});

    parallel_for(nt, spec.workers, [&](size_t i) {
        generate_for_template(kb, spec, spec.templates[i], results[i], report.per_template[i]);
    });

    std::vector<RegexQuery> out;
    for (auto& chunk : results) {
        for (auto& q : chunk) out.push_back(std::move(q));
    }
    return out;
}

SplitQueries split_queries(const KnowledgeBase& kb, const std::vector<RegexQuery>& queries,
                           int max_len, GenReport* report) {
    SplitQueries out;
    std::map<std::string, std::array<int, 3>> counts;
    for (const RegexQuery& q : queries) {
        std::vector<EntId> train_reach =
            answer_set_capped(kb, GraphSel::Train, q.head, q.expr, max_len);
        std::vector<EntId> dev_reach =
            answer_set_capped(kb, GraphSel::TrainDev, q.head, q.expr, max_len);

        std::array<std::vector<EntId>, 3> routed;
        for (EntId a : q.full_answers) {
            if (std::binary_search(train_reach.begin(), train_reach.end(), a)) {
                routed[0].push_back(a);
            } else if (std::binary_search(dev_reach.begin(), dev_reach.end(), a)) {
                routed[1].push_back(a);
            } else {
                routed[2].push_back(a);
            }
        }
        std::array<std::vector<RegexQuery>*, 3> dests{&out.train, &out.dev, &out.test};
        for (int s = 0; s < 3; ++s) {
            if (routed[static_cast<size_t>(s)].empty()) continue;
            RegexQuery sq = q;
            sq.answers = routed[static_cast<size_t>(s)];
            dests[static_cast<size_t>(s)]->push_back(std::move(sq));
            counts[q.type_tag][static_cast<size_t>(s)] += 1;
        }
    }
    if (report) {
        for (auto& rep : report->per_template) {
            auto it = counts.find(rep.tag);
            if (it == counts.end()) continue;
            rep.train = it->second[0];
            rep.dev = it->second[1];
            rep.test = it->second[2];
        }
    }
    return out;
}

std::vector<RegexQuery> rebalance(const std::vector<RegexQuery>& queries,
                                  const std::map<std::string, int>& targets, Rng& rng) {
    std::map<std::string, std::vector<size_t>> by_tag;
    for (size_t i = 0; i < queries.size(); ++i) by_tag[queries[i].type_tag].push_back(i);

    std::vector<bool> keep(queries.size(), true);
    for (const auto& [tag, target] : targets) {
        auto it = by_tag.find(tag);
        const size_t avail = it == by_tag.end() ? 0 : it->second.size();
        if (static_cast<size_t>(target) > avail) {
            throw std::invalid_argument("rebalance: template '" + tag + "' has " +
                                        std::to_string(avail) + " queries, target " +
                                        std::to_string(target) +
                                        " (oversampling by duplication is refused)");
        }
        if (it == by_tag.end()) continue;
        // partial Fisher-Yates: keep a uniform subset without replacement
        std::vector<size_t>& idx = it->second;
        for (size_t k = 0; k < static_cast<size_t>(target); ++k) {
            size_t j = k + rng.next_below(idx.size() - k);
            std::swap(idx[k], idx[j]);
        }
        for (size_t k = static_cast<size_t>(target); k < idx.size(); ++k) keep[idx[k]] = false;
    }

    std::vector<RegexQuery> out;
    for (size_t i = 0; i < queries.size(); ++i) {
        if (keep[i]) out.push_back(queries[i]);
    }
    return out;
}

std::string GenReport::to_json() const {
    nlohmann::json j;
    j["templates"] = nlohmann::json::array();
    for (const TemplateReport& r : per_template) {
        nlohmann::json t;
        t["tag"] = r.tag;
        t["requested"] = r.requested;
        t["generated"] = r.generated;
        t["attempts"] = r.attempts;
        t["rejected_empty"] = r.rejected_empty;
        t["rejected_oversize"] = r.rejected_oversize;
        t["rejected_duplicate"] = r.rejected_duplicate;
        t["rejected_no_head"] = r.rejected_no_head;
        t["train"] = r.train;
        t["dev"] = r.dev;
        t["test"] = r.test;
        j["templates"].push_back(std::move(t));
    }
    return j.dump(2);
}

}  // namespace kbregex
