#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace kbregex {

using RelId = int32_t;

enum class RegexOp : uint8_t { Rel, Compose, Disj, Plus };

struct RegexExpr;
using RegexPtr = std::shared_ptr<const RegexExpr>;

// Immutable expression tree over relation ids. Operators: `/` composition,
// `|` disjunction, postfix `+` Kleene plus. Safe to share across threads.
struct RegexExpr {
    RegexOp op;
    RelId rel = -1;       // Rel leaves only
    RegexPtr left;        // Compose/Disj left, Plus child
    RegexPtr right;       // Compose/Disj right

    static RegexPtr make_rel(RelId r);
    static RegexPtr make_compose(RegexPtr l, RegexPtr r);
    static RegexPtr make_disj(RegexPtr l, RegexPtr r);
    static RegexPtr make_plus(RegexPtr inner);
};

bool equal(const RegexPtr& a, const RegexPtr& b);
int node_count(const RegexPtr& e);
int leaf_count(const RegexPtr& e);
bool contains_disj(const RegexPtr& e);
// true when every Plus node wraps a bare relation leaf
bool plus_only_on_relations(const RegexPtr& e);
// relation ids appearing in the expression, sorted and deduplicated
std::vector<RelId> relations_of(const RegexPtr& e);

struct ParseError : std::runtime_error {
    size_t offset;  // byte offset into the input
    ParseError(size_t off, const std::string& msg)
        : std::runtime_error(msg + " at offset " + std::to_string(off)), offset(off) {}
};

struct UnknownNameError : std::runtime_error {
    std::string name;
    explicit UnknownNameError(std::string n)
        : std::runtime_error("unknown relation '" + n + "'"), name(std::move(n)) {}
};

using RelResolver = std::function<std::optional<RelId>(std::string_view)>;
using RelNamer = std::function<std::string(RelId)>;

// Precedence: `+` > `/` > `|`; `/` and `|` left-associative. Relation tokens
// match [A-Za-z0-9_.:-]+. Kleene star is rejected (the task uses plus only).
RegexPtr parse(std::string_view text, const RelResolver& resolve);

// Minimal-parentheses rendering; parse(print(e)) == e.
std::string print(const RegexPtr& e, const RelNamer& name_of);

using RelationPath = std::vector<RelId>;

// All relation paths of length <= max_len compatible with the expression.
std::set<RelationPath> enumerate_paths(const RegexPtr& e, int max_len);

inline constexpr int kDefaultDnfLimit = 64;

// Rewrite as a disjunction of disjunction-free expressions, distributing
// Compose over Disj. A Disj strictly inside a Plus blocks decomposition, as
// does exceeding `limit` branches. nullopt = undecomposable.
std::optional<std::vector<RegexPtr>> dnf_decompose(const RegexPtr& e, int limit = kDefaultDnfLimit);

// Operator combinations used to answer regex queries.
enum class Variant : uint8_t { Baseline, FreeAgg, FreeDeepsets, ProjAgg, Comp };

const char* variant_name(Variant v);
std::optional<Variant> variant_from_name(std::string_view s);

// Whether `v` can embed the expression at all: Comp always can; aggregation
// variants need a DNF; free-parameter variants additionally need every Plus
// to wrap a single relation.
bool is_answerable(const RegexPtr& e, Variant v, int dnf_limit = kDefaultDnfLimit);

// Branches of a (possibly nested) disjunction node, flattened left to right.
std::vector<RegexPtr> flatten_disj(const RegexPtr& e);

}  // namespace kbregex
