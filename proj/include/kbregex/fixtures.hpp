#pragma once

#include "kbregex/dataset.hpp"
#include "kbregex/kb.hpp"

namespace kbregex {

// Desk-scale synthetic graphs with documented answer sets.

// a -r-> b -r-> ... -r-> g (7 entities on a path)
KnowledgeBase make_chain();

// a -r-> b -r-> a (2-cycle)
KnowledgeBase make_cycle();

// every r1 edge is also an r2 edge; r2 has extra edges of its own
KnowledgeBase make_hierarchy();

// friend-style relation: every edge present in both directions
KnowledgeBase make_symmetric();

// ~200 entities on a ring; four total shift relations (+40, +50, +25, +80)
// and one one-to-many block relation (tails at +70, +71, +72). Every regex
// template instantiation keeps its answer set under the generation cap, and
// the whole KB is exactly representable by rotation-style models. Triples are
// split 90/5/5; regex queries come from the combined builtin template set.
struct PlantedFixture {
    KnowledgeBase kb;
    SplitQueries queries;
    GenReport report;
};

PlantedFixture make_planted(uint64_t seed, int queries_per_template = 30, int workers = 1);

}  // namespace kbregex
