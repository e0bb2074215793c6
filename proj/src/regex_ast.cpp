#include "kbregex/regex_ast.hpp"

#include <algorithm>
#include <cctype>

namespace kbregex {

RegexPtr RegexExpr::make_rel(RelId r) {
    auto e = std::make_shared<RegexExpr>();
    e->op = RegexOp::Rel;
    e->rel = r;
    return e;
}

RegexPtr RegexExpr::make_compose(RegexPtr l, RegexPtr r) {
    auto e = std::make_shared<RegexExpr>();
    e->op = RegexOp::Compose;
    e->left = std::move(l);
    e->right = std::move(r);
    return e;
}

RegexPtr RegexExpr::make_disj(RegexPtr l, RegexPtr r) {
    auto e = std::make_shared<RegexExpr>();
    e->op = RegexOp::Disj;
    e->left = std::move(l);
    e->right = std::move(r);
    return e;
}

RegexPtr RegexExpr::make_plus(RegexPtr inner) {
    auto e = std::make_shared<RegexExpr>();
    e->op = RegexOp::Plus;
    e->left = std::move(inner);
    return e;
}

bool equal(const RegexPtr& a, const RegexPtr& b) {
    if (a.get() == b.get()) return true;
    if (!a || !b) return false;
    if (a->op != b->op) return false;
    switch (a->op) {
        case RegexOp::Rel: return a->rel == b->rel;
        case RegexOp::Plus: return equal(a->left, b->left);
        case RegexOp::Compose:
        case RegexOp::Disj: return equal(a->left, b->left) && equal(a->right, b->right);
    }
    return false;
}

int node_count(const RegexPtr& e) {
    if (!e) return 0;
    return 1 + node_count(e->left) + node_count(e->right);
}

int leaf_count(const RegexPtr& e) {
    if (!e) return 0;
    if (e->op == RegexOp::Rel) return 1;
    return leaf_count(e->left) + leaf_count(e->right);
}

bool contains_disj(const RegexPtr& e) {
    if (!e) return false;
    if (e->op == RegexOp::Disj) return true;
    return contains_disj(e->left) || contains_disj(e->right);
}

bool plus_only_on_relations(const RegexPtr& e) {
    if (!e) return true;
    if (e->op == RegexOp::Plus && e->left->op != RegexOp::Rel) return false;
    return plus_only_on_relations(e->left) && plus_only_on_relations(e->right);
}

static void collect_relations(const RegexPtr& e, std::vector<RelId>& out) {
    if (!e) return;
    if (e->op == RegexOp::Rel) {
        out.push_back(e->rel);
        return;
    }
    collect_relations(e->left, out);
    collect_relations(e->right, out);
}

std::vector<RelId> relations_of(const RegexPtr& e) {
    std::vector<RelId> out;
    collect_relations(e, out);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

namespace {

bool is_token_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == ':' || c == '-';
}

struct Parser {
    std::string_view text;
    size_t pos = 0;
    const RelResolver& resolve;

    explicit Parser(std::string_view t, const RelResolver& r) : text(t), resolve(r) {}

    void skip_ws() {
        while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
    }

    char peek() {
        skip_ws();
        return pos < text.size() ? text[pos] : '\0';
    }

    RegexPtr parse_alt() {
        RegexPtr lhs = parse_cat();
        while (peek() == '|') {
            ++pos;
            RegexPtr rhs = parse_cat();
            lhs = RegexExpr::make_disj(std::move(lhs), std::move(rhs));
        }
        return lhs;
    }

    RegexPtr parse_cat() {
        RegexPtr lhs = parse_post();
        while (peek() == '/') {
            ++pos;
            RegexPtr rhs = parse_post();
            lhs = RegexExpr::make_compose(std::move(lhs), std::move(rhs));
        }
        return lhs;
    }

    RegexPtr parse_post() {
        RegexPtr inner = parse_atom();
        while (peek() == '+') {
            ++pos;
            inner = RegexExpr::make_plus(std::move(inner));
        }
        return inner;
    }

    RegexPtr parse_atom() {
        char c = peek();
        if (c == '(') {
            size_t open = pos;
            ++pos;
            RegexPtr e = parse_alt();
            if (peek() != ')') throw ParseError(open, "unbalanced parenthesis");
            ++pos;
            return e;
        }
        if (c == '*') throw ParseError(pos, "Kleene star is not supported (use '+')");
        if (c == '\0' || c == ')' || c == '|' || c == '/' || c == '+') {
            throw ParseError(pos, "expected relation or '('");
        }
        if (!is_token_char(c)) throw ParseError(pos, std::string("unexpected character '") + c + "'");
        size_t start = pos;
        while (pos < text.size() && is_token_char(text[pos])) ++pos;
        std::string_view token = text.substr(start, pos - start);
        auto id = resolve(token);
        if (!id) throw UnknownNameError(std::string(token));
        return RegexExpr::make_rel(*id);
    }
};

}  // namespace

RegexPtr parse(std::string_view text, const RelResolver& resolve) {
    Parser p(text, resolve);
    if (p.peek() == '\0') throw ParseError(0, "empty expression");
    RegexPtr e = p.parse_alt();
    if (p.peek() == ')') throw ParseError(p.pos, "unbalanced parenthesis");
    if (p.peek() != '\0') throw ParseError(p.pos, "trailing input");
    return e;
}

// ---------------------------------------------------------------------------
// Printer
// ---------------------------------------------------------------------------

namespace {

int precedence(RegexOp op) {
    switch (op) {
        case RegexOp::Disj: return 0;
        case RegexOp::Compose: return 1;
        case RegexOp::Plus: return 2;
        case RegexOp::Rel: return 3;
    }
    return 3;
}

void print_rec(const RegexPtr& e, const RelNamer& name_of, std::string& out) {
    auto child = [&](const RegexPtr& c, bool strict) {
        // Left-associative parse: a right child at equal precedence needs
        // parentheses to round-trip exactly.
        bool parens = strict ? precedence(c->op) <= precedence(e->op)
                             : precedence(c->op) < precedence(e->op);
        if (parens) out += '(';
        print_rec(c, name_of, out);
        if (parens) out += ')';
    };
    switch (e->op) {
        case RegexOp::Rel:
            out += name_of(e->rel);
            break;
        case RegexOp::Compose:
            child(e->left, false);
            out += '/';
            child(e->right, true);
            break;
        case RegexOp::Disj:
            child(e->left, false);
            out += '|';
            child(e->right, true);
            break;
        case RegexOp::Plus:
            child(e->left, false);
            out += '+';
            break;
    }
}

}  // namespace

std::string print(const RegexPtr& e, const RelNamer& name_of) {
    std::string out;
    print_rec(e, name_of, out);
    return out;
}

// ---------------------------------------------------------------------------
// Path enumeration
// ---------------------------------------------------------------------------

static std::set<RelationPath> enum_rec(const RegexPtr& e, int max_len) {
    std::set<RelationPath> out;
    if (max_len < 1) return out;
    switch (e->op) {
        case RegexOp::Rel:
            out.insert(RelationPath{e->rel});
            break;
        case RegexOp::Disj: {
            out = enum_rec(e->left, max_len);
            auto r = enum_rec(e->right, max_len);
            out.insert(r.begin(), r.end());
            break;
        }
        case RegexOp::Compose: {
            auto ls = enum_rec(e->left, max_len - 1);
            for (const auto& l : ls) {
                int budget = max_len - static_cast<int>(l.size());
                if (budget < 1) continue;
                for (const auto& r : enum_rec(e->right, budget)) {
                    RelationPath p = l;
                    p.insert(p.end(), r.begin(), r.end());
                    out.insert(std::move(p));
                }
            }
            break;
        }
        case RegexOp::Plus: {
            auto base = enum_rec(e->left, max_len);
            out = base;
            std::set<RelationPath> frontier = base;
            while (!frontier.empty()) {
                std::set<RelationPath> next;
                for (const auto& p : frontier) {
                    int budget = max_len - static_cast<int>(p.size());
                    if (budget < 1) continue;
                    for (const auto& q : enum_rec(e->left, budget)) {
                        RelationPath ext = p;
                        ext.insert(ext.end(), q.begin(), q.end());
                        if (!out.count(ext)) {
                            next.insert(ext);
                            out.insert(std::move(ext));
                        }
                    }
                }
                frontier = std::move(next);
            }
            break;
        }
    }
    return out;
}

std::set<RelationPath> enumerate_paths(const RegexPtr& e, int max_len) {
    return enum_rec(e, max_len);
}

// ---------------------------------------------------------------------------
// DNF decomposition
// ---------------------------------------------------------------------------

static bool dnf_rec(const RegexPtr& e, int limit, std::vector<RegexPtr>& out) {
    switch (e->op) {
        case RegexOp::Rel:
            out.push_back(e);
            return true;
        case RegexOp::Plus:
            if (contains_disj(e->left)) return false;
            out.push_back(e);
            return true;
        case RegexOp::Disj: {
            if (!dnf_rec(e->left, limit, out)) return false;
            if (!dnf_rec(e->right, limit, out)) return false;
            return static_cast<int>(out.size()) <= limit;
        }
        case RegexOp::Compose: {
            std::vector<RegexPtr> ls, rs;
            if (!dnf_rec(e->left, limit, ls)) return false;
            if (!dnf_rec(e->right, limit, rs)) return false;
            if (ls.size() * rs.size() + out.size() > static_cast<size_t>(limit)) return false;
            for (const auto& l : ls) {
                for (const auto& r : rs) {
                    out.push_back(RegexExpr::make_compose(l, r));
                }
            }
            return true;
        }
    }
    return false;
}

std::optional<std::vector<RegexPtr>> dnf_decompose(const RegexPtr& e, int limit) {
    std::vector<RegexPtr> out;
    if (!dnf_rec(e, limit, out)) return std::nullopt;
    return out;
}

// ---------------------------------------------------------------------------
// Answerability
// ---------------------------------------------------------------------------

const char* variant_name(Variant v) {
    switch (v) {
        case Variant::Baseline: return "baseline";
        case Variant::FreeAgg: return "free-agg";
        case Variant::FreeDeepsets: return "free-deepsets";
        case Variant::ProjAgg: return "proj-agg";
        case Variant::Comp: return "comp";
    }
    return "?";
}

std::optional<Variant> variant_from_name(std::string_view s) {
    for (Variant v : {Variant::Baseline, Variant::FreeAgg, Variant::FreeDeepsets,
                      Variant::ProjAgg, Variant::Comp}) {
        if (s == variant_name(v)) return v;
    }
    return std::nullopt;
}

bool is_answerable(const RegexPtr& e, Variant v, int dnf_limit) {
    switch (v) {
        case Variant::Comp:
            return true;
        case Variant::ProjAgg:
            return dnf_decompose(e, dnf_limit).has_value();
        case Variant::FreeDeepsets:
            return plus_only_on_relations(e);
        case Variant::FreeAgg:
        case Variant::Baseline:
            return dnf_decompose(e, dnf_limit).has_value() && plus_only_on_relations(e);
    }
    return false;
}

std::vector<RegexPtr> flatten_disj(const RegexPtr& e) {
    std::vector<RegexPtr> out;
    std::vector<RegexPtr> stack{e};
    while (!stack.empty()) {
        RegexPtr cur = stack.back();
        stack.pop_back();
        if (cur->op == RegexOp::Disj) {
            stack.push_back(cur->right);
            stack.push_back(cur->left);
        } else {
            out.push_back(std::move(cur));
        }
    }
    return out;
}

}  // namespace kbregex
