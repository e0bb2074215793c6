#include "kbregex/fixtures.hpp"

#include <string>

namespace kbregex {

KnowledgeBase make_chain() {
    KnowledgeBase kb;
    const char* names[] = {"a", "b", "c", "d", "e", "f", "g"};
    for (int i = 0; i + 1 < 7; ++i) {
        kb.add_triple(names[i], "r", names[i + 1], Split::Train);
    }
    return kb;
}

KnowledgeBase make_cycle() {
    KnowledgeBase kb;
    kb.add_triple("a", "r", "b", Split::Train);
    kb.add_triple("b", "r", "a", Split::Train);
    return kb;
}

KnowledgeBase make_hierarchy() {
    KnowledgeBase kb;
    // r1(x,y) => r2(x,y); r2 also holds for extra pairs
    const std::pair<const char*, const char*> narrow[] = {
        {"x1", "y1"}, {"x2", "y2"}, {"x3", "y3"}, {"x4", "y4"}};
    for (auto [h, t] : narrow) {
        kb.add_triple(h, "r1", t, Split::Train);
        kb.add_triple(h, "r2", t, Split::Train);
    }
    kb.add_triple("x5", "r2", "y5", Split::Train);
    kb.add_triple("x1", "r2", "y2", Split::Train);
    return kb;
}

KnowledgeBase make_symmetric() {
    KnowledgeBase kb;
    const std::pair<const char*, const char*> pairs[] = {
        {"a", "b"}, {"c", "d"}, {"e", "f"}, {"a", "c"}};
    for (auto [x, y] : pairs) {
        kb.add_triple(x, "friend", y, Split::Train);
        kb.add_triple(y, "friend", x, Split::Train);
    }
    return kb;
}

PlantedFixture make_planted(uint64_t seed, int queries_per_template, int workers) {
    PlantedFixture out;
    const int n = 200;
    auto ent = [](int i) {
        std::string s = std::to_string(i);
        return "e" + std::string(3 - s.size(), '0') + s;
    };

    // triple split: mostly train with a sliver of dev/test for induction
    Rng split_rng(mix_stream(seed, "planted/split"));
    auto pick_split = [&split_rng]() {
        double u = split_rng.next_double();
        if (u < 0.90) return Split::Train;
        return u < 0.95 ? Split::Dev : Split::Test;
    };

    // ring shifts whose orbits divide 200 with large gcds (orbit sizes 5, 4
    // and 5 alone, at most 20 combined), so Kleene-plus answer sets stay small
    const std::pair<const char*, int> shifts[] = {
        {"shift40", 40}, {"shift50", 50}, {"shift80", 80}};
    for (auto [name, s] : shifts) {
        for (int i = 0; i < n; ++i) {
            out.kb.add_triple(ent(i), name, ent((i + s) % n), pick_split());
        }
    }
    // chain structure without wraparound: step walks 10-entity chains one
    // entity at a time
    for (int i = 0; i < n; ++i) {
        if (i % 10 != 9) out.kb.add_triple(ent(i), "step", ent(i + 1), pick_split());
    }
    // one-to-many block relation: two tails per head
    for (int i = 0; i < n; ++i) {
        for (int d = 0; d < 2; ++d) {
            out.kb.add_triple(ent(i), "block70", ent((i + 70 + d) % n), pick_split());
        }
    }

    DatasetSpec spec;
    spec.templates = builtin_templates("fb15k-regex");  // superset of the wiki100 set
    spec.queries_per_template = queries_per_template;
    spec.max_answers = 20;  // keeps coverage demands and candidate sets balanced
    spec.max_len = 5;
    spec.seed = mix_stream(seed, "planted/queries");
    spec.workers = workers;

    std::vector<RegexQuery> generated = generate_queries(out.kb, spec, out.report);
    out.queries = split_queries(out.kb, generated, spec.max_len, &out.report);
    return out;
}

}  // namespace kbregex
