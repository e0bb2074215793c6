#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "kbregex/regex_ast.hpp"

namespace kbregex {

using EntId = int32_t;

enum class Split : uint8_t { Train = 0, Dev = 1, Test = 2 };

// Evaluation universes: the split rule needs exactly these three unions.
enum class GraphSel : uint8_t { Train = 0, TrainDev = 1, Full = 2 };

const char* split_name(Split s);

struct Triple {
    EntId head;
    RelId rel;
    EntId tail;
    auto operator<=>(const Triple&) const = default;
};

struct LoadSummary {
    size_t lines = 0;
    size_t stored = 0;
    size_t duplicates = 0;
};

struct KbError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Forward adjacency for one graph selector: relation -> head -> sorted tails.
class Adjacency {
public:
    void build(const std::vector<Triple>& triples, size_t num_relations);
    // sorted tails of (head, rel); empty when none
    const std::vector<EntId>& tails(RelId rel, EntId head) const;
    // sorted distinct heads that have at least one outgoing `rel` edge
    const std::vector<EntId>& heads(RelId rel) const;

private:
    std::vector<std::unordered_map<EntId, std::vector<EntId>>> by_rel_;
    std::vector<std::vector<EntId>> heads_;
    static const std::vector<EntId> empty_;
};

// Interned vocabularies plus triple sets per split. Loading is single-writer;
// after the last load (or an explicit finalize) the structure is frozen and
// safe for concurrent read-only traversal.
class KnowledgeBase {
public:
    EntId intern_entity(std::string_view name);
    RelId intern_relation(std::string_view name);
    std::optional<EntId> entity_id(std::string_view name) const;
    std::optional<RelId> relation_id(std::string_view name) const;
    const std::string& entity_name(EntId id) const { return entities_.at(static_cast<size_t>(id)); }
    const std::string& relation_name(RelId id) const { return relations_.at(static_cast<size_t>(id)); }
    size_t num_entities() const { return entities_.size(); }
    size_t num_relations() const { return relations_.size(); }
    const std::vector<std::string>& entity_names() const { return entities_; }
    const std::vector<std::string>& relation_names() const { return relations_; }

    // Tab-separated `head<TAB>relation<TAB>tail`, UTF-8, one triple per line.
    // Duplicate lines within a split are deduplicated; a triple already stored
    // in another split is an error naming the triple.
    LoadSummary load_triples(const std::filesystem::path& path, Split split);

    void add_triple(std::string_view h, std::string_view r, std::string_view t, Split split);

    const std::set<Triple>& triples(Split s) const { return triples_[static_cast<size_t>(s)]; }
    size_t total_triples() const;

    // Lazily (re)built after loads; not thread-safe while loading.
    const Adjacency& adjacency(GraphSel sel) const;

    // FNV-1a over names in id order; stored in checkpoints to detect mismatches.
    uint64_t entity_vocab_hash() const;
    uint64_t relation_vocab_hash() const;

private:
    void check_cross_split(const Triple& t, Split split) const;

    std::vector<std::string> entities_;
    std::vector<std::string> relations_;
    std::unordered_map<std::string, EntId> entity_ids_;
    std::unordered_map<std::string, RelId> relation_ids_;
    std::array<std::set<Triple>, 3> triples_;
    mutable std::array<Adjacency, 3> adj_;
    mutable std::array<bool, 3> adj_fresh_{false, false, false};
};

// One regex query with ground truth. `answers` holds the answers of the split
// the query belongs to; `full_answers` the answer set over the whole graph
// (used for filtered ranking and negative sampling).
struct RegexQuery {
    EntId head = -1;
    RegexPtr expr;
    std::string regex_text;
    std::vector<EntId> answers;       // sorted
    std::vector<EntId> full_answers;  // sorted
    std::string type_tag;
};

// Line-oriented JSON: {"head":..., "regex":..., "answers":[...],
// "full_answers":[...], "type":...}. full_answers may be omitted when it
// equals answers.
std::vector<RegexQuery> load_queries(const std::filesystem::path& path, const KnowledgeBase& kb);
void save_queries(const std::filesystem::path& path, const KnowledgeBase& kb,
                  const std::vector<RegexQuery>& queries);

}  // namespace kbregex
