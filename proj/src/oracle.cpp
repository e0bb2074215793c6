#include "kbregex/oracle.hpp"

#include <algorithm>
#include <set>

namespace kbregex {

namespace {

void validate(const KnowledgeBase& kb, EntId head, const RegexPtr& expr) {
    if (head < 0 || static_cast<size_t>(head) >= kb.num_entities()) {
        throw KbError("head entity id out of range: " + std::to_string(head));
    }
    for (RelId r : relations_of(expr)) {
        if (r < 0 || static_cast<size_t>(r) >= kb.num_relations()) {
            throw KbError("unknown relation id in expression: " + std::to_string(r));
        }
    }
}

}  // namespace

std::vector<EntId> answer_set_exact(const KnowledgeBase& kb, GraphSel sel, EntId head,
                                    const RegexPtr& expr) {
    validate(kb, head, expr);
    const RegexNfa nfa = to_nfa(expr);
    const Adjacency& adj = kb.adjacency(sel);
    const size_t ns = static_cast<size_t>(nfa.num_states);

    // worklist fixpoint over (entity, nfa state)
    std::vector<bool> seen(kb.num_entities() * ns, false);
    auto mark = [&](EntId e, int s) -> bool {
        size_t idx = static_cast<size_t>(e) * ns + static_cast<size_t>(s);
        if (seen[idx]) return false;
        seen[idx] = true;
        return true;
    };

    std::vector<std::pair<EntId, int>> work;
    mark(head, nfa.start);
    work.emplace_back(head, nfa.start);
    std::set<EntId> answers;
    while (!work.empty()) {
        auto [ent, st] = work.back();
        work.pop_back();
        // The start state never accepts (the grammar has no empty path), so
        // the initial node contributes nothing here.
        if (nfa.accepting[static_cast<size_t>(st)]) answers.insert(ent);
        for (auto [rel, to] : nfa.edges[static_cast<size_t>(st)]) {
            for (EntId tail : adj.tails(rel, ent)) {
                if (mark(tail, to)) work.emplace_back(tail, to);
            }
        }
    }
    return {answers.begin(), answers.end()};
}

std::vector<EntId> answer_set_capped(const KnowledgeBase& kb, GraphSel sel, EntId head,
                                     const RegexPtr& expr, int max_len) {
    validate(kb, head, expr);
    const RegexNfa nfa = to_nfa(expr);
    const Adjacency& adj = kb.adjacency(sel);
    const size_t ns = static_cast<size_t>(nfa.num_states);

    std::vector<bool> seen(kb.num_entities() * ns, false);
    seen[static_cast<size_t>(head) * ns + static_cast<size_t>(nfa.start)] = true;

    std::vector<std::pair<EntId, int>> frontier{{head, nfa.start}};
    std::set<EntId> answers;
    for (int depth = 1; depth <= max_len && !frontier.empty(); ++depth) {
        std::vector<std::pair<EntId, int>> next;
        for (auto [ent, st] : frontier) {
            for (auto [rel, to] : nfa.edges[static_cast<size_t>(st)]) {
                for (EntId tail : adj.tails(rel, ent)) {
                    if (nfa.accepting[static_cast<size_t>(to)]) answers.insert(tail);
                    size_t idx = static_cast<size_t>(tail) * ns + static_cast<size_t>(to);
                    if (!seen[idx]) {
                        seen[idx] = true;
                        next.emplace_back(tail, to);
                    }
                }
            }
        }
        frontier = std::move(next);
    }
    return {answers.begin(), answers.end()};
}

std::vector<EntId> path_answers(const KnowledgeBase& kb, GraphSel sel, EntId head,
                                const RelationPath& path) {
    const Adjacency& adj = kb.adjacency(sel);
    std::set<EntId> cur{head};
    for (RelId rel : path) {
        std::set<EntId> next;
        for (EntId e : cur) {
            const auto& tails = adj.tails(rel, e);
            next.insert(tails.begin(), tails.end());
        }
        cur = std::move(next);
        if (cur.empty()) break;
    }
    return {cur.begin(), cur.end()};
}

}  // namespace kbregex
