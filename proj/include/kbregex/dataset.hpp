#pragma once

#include <map>
#include <string>
#include <vector>

#include "kbregex/kb.hpp"
#include "kbregex/oracle.hpp"
#include "kbregex/rng.hpp"

namespace kbregex {

// A regex pattern over placeholder relations r1..r3. `pattern` uses leaf ids
// 0..arity-1 for the placeholders.
struct QueryTemplate {
    std::string tag;   // surface form with placeholders, e.g. "r1/(r2|r3)"
    RegexPtr pattern;
    int arity = 0;
};

QueryTemplate make_template(std::string_view tag);

// "fb15k-regex" -> the 21 templates; "wiki100-regex" -> the 5 templates.
std::vector<QueryTemplate> builtin_templates(std::string_view dataset);

struct DatasetSpec {
    std::vector<QueryTemplate> templates;
    int queries_per_template = 0;  // generation target (before splitting)
    int max_answers = 50;
    int max_len = 5;
    uint64_t seed = 0;
    int attempts_factor = 100;  // bound: attempts <= factor * target
    int workers = 1;
};

struct TemplateReport {
    std::string tag;
    int requested = 0;
    int generated = 0;
    long attempts = 0;
    long rejected_empty = 0;
    long rejected_oversize = 0;
    long rejected_duplicate = 0;
    long rejected_no_head = 0;
    int train = 0, dev = 0, test = 0;  // filled after splitting
};

struct GenReport {
    std::vector<TemplateReport> per_template;
    std::string to_json() const;
};

// Template instantiation + rejection sampling over the full graph. Relations
// are distinct per placeholder; heads are sampled among entities with an
// outgoing edge on a possible first relation; queries with empty or oversize
// answer sets are resampled. Deterministic given the seed, independent of the
// worker count (each template owns a derived RNG stream).
std::vector<RegexQuery> generate_queries(const KnowledgeBase& kb, const DatasetSpec& spec,
                                         GenReport& report);

struct SplitQueries {
    std::vector<RegexQuery> train, dev, test;
};

// Route every (head, expr, answer) pair: reachable on G_train -> train; else
// reachable on G_train+G_dev -> dev; else test. Dev/test queries keep only
// their own split's answers; the full-graph set stays in `full_answers`.
SplitQueries split_queries(const KnowledgeBase& kb, const std::vector<RegexQuery>& queries,
                           int max_len, GenReport* report = nullptr);

// Undersample each listed template to its target count (uniform, without
// replacement). A target above the available count is an error; templates not
// in `targets` pass through.
std::vector<RegexQuery> rebalance(const std::vector<RegexQuery>& queries,
                                  const std::map<std::string, int>& targets, Rng& rng);

}  // namespace kbregex
