#pragma once

#include <map>
#include <span>

#include "kbregex/model.hpp"

namespace kbregex {

// Rank of one (query, answer) pair among the filtered candidates
// {target} + (E \ full_answers). Average-rank tie-breaking: the fractional
// rank 1 + #closer + #ties/2 feeds MRR; HITS uses it rounded half-up.
struct RankOutcome {
    EntId target = -1;
    double frac_rank = 0.0;  // >= 1 when finite
    bool infinite = false;   // unanswerable under the variant
    size_t candidates = 0;
    std::string type_tag;
};

long hits_rank(const RankOutcome& o);

// average-rank statistics of `target_dist` against other candidates' distances
double rank_from_distances(double target_dist, std::span<const double> others);

struct MetricBlock {
    double mrr = 0.0;
    double hits1 = 0.0, hits5 = 0.0, hits10 = 0.0;
    size_t count = 0;
};

struct EvalReport {
    MetricBlock overall;
    std::map<std::string, MetricBlock> per_type;
    size_t total_pairs = 0;
    size_t evaluated = 0;      // pairs that produced a finite rank
    size_t unanswerable = 0;   // pairs skipped with rank = infinity
    std::string config_echo;   // serialized options for exact re-runs
    std::string to_json() const;
};

struct EvalOptions {
    // count infinite ranks as zero reciprocal rank (the default); when false
    // they are dropped from the denominators (sensitivity analysis)
    bool include_infinite = true;
    // keep only query types answerable by every operator variant
    bool types_answerable_by_all = false;
    // when set, every outcome is appended here as one JSON line
    std::string outcome_dump_path;
    int workers = 1;
};

RankOutcome filtered_rank(const ModelParams& params, Variant v, const RegexQuery& query,
                          EntId target);

EvalReport metrics(std::span<const RankOutcome> outcomes, bool include_infinite = true);

EvalReport evaluate_split(const KnowledgeBase& kb, const ModelParams& params, Variant v,
                          const std::vector<RegexQuery>& queries, const EvalOptions& opts = {});

// plain-loop reference for the parallel ranking kernel
std::vector<RankOutcome> rank_all_pairs_serial(const KnowledgeBase& kb, const ModelParams& params,
                                               Variant v, const std::vector<RegexQuery>& queries);
std::vector<RankOutcome> rank_all_pairs(const KnowledgeBase& kb, const ModelParams& params,
                                        Variant v, const std::vector<RegexQuery>& queries,
                                        int workers);

}  // namespace kbregex
