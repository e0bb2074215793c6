#pragma once

#include <vector>

#include "kbregex/regex_ast.hpp"

namespace kbregex {

// Epsilon-free NFA over the relation alphabet. Accepts exactly the relation
// paths compatible with the source expression.
struct RegexNfa {
    int num_states = 0;
    int start = 0;
    std::vector<bool> accepting;                            // indexed by state
    std::vector<std::vector<std::pair<RelId, int>>> edges;  // state -> (rel, to)

    bool accepts(const RelationPath& path) const;
};

// Thompson construction followed by epsilon elimination.
// State count <= 2 * node_count(e) + 2.
RegexNfa to_nfa(const RegexPtr& e);

}  // namespace kbregex
