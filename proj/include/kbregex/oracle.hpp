#pragma once

#include "kbregex/kb.hpp"
#include "kbregex/nfa.hpp"

namespace kbregex {

// Exact answer set of (head, expr, ?) under unbounded path length: fixpoint
// reachability over the product of the graph and to_nfa(expr). Terminates
// because entity x NFA-state is finite.
std::vector<EntId> answer_set_exact(const KnowledgeBase& kb, GraphSel sel, EntId head,
                                    const RegexPtr& expr);

// Union of path-query answers over compatible paths of length <= max_len,
// computed as level-synchronous BFS over the same product space.
std::vector<EntId> answer_set_capped(const KnowledgeBase& kb, GraphSel sel, EntId head,
                                     const RegexPtr& expr, int max_len);

// Single relation path from a head: follow each relation in order.
std::vector<EntId> path_answers(const KnowledgeBase& kb, GraphSel sel, EntId head,
                                const RelationPath& path);

}  // namespace kbregex
