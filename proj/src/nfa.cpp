#include "kbregex/nfa.hpp"

#include <algorithm>
#include <set>

namespace kbregex {

namespace {

struct EpsNfa {
    struct State {
        std::vector<std::pair<RelId, int>> sym;  // labelled edges
        std::vector<int> eps;
    };
    std::vector<State> states;

    int add() {
        states.emplace_back();
        return static_cast<int>(states.size()) - 1;
    }
};

struct Frag {
    int start;
    int accept;
};

Frag build(const RegexPtr& e, EpsNfa& n) {
    switch (e->op) {
        case RegexOp::Rel: {
            int s = n.add();
            int t = n.add();
            n.states[s].sym.emplace_back(e->rel, t);
            return {s, t};
        }
        case RegexOp::Compose: {
            Frag a = build(e->left, n);
            Frag b = build(e->right, n);
            n.states[a.accept].eps.push_back(b.start);
            return {a.start, b.accept};
        }
        case RegexOp::Disj: {
            Frag a = build(e->left, n);
            Frag b = build(e->right, n);
            int s = n.add();
            int t = n.add();
            n.states[s].eps.push_back(a.start);
            n.states[s].eps.push_back(b.start);
            n.states[a.accept].eps.push_back(t);
            n.states[b.accept].eps.push_back(t);
            return {s, t};
        }
        case RegexOp::Plus: {
            Frag a = build(e->left, n);
            int s = n.add();
            int t = n.add();
            n.states[s].eps.push_back(a.start);
            n.states[a.accept].eps.push_back(t);
            n.states[a.accept].eps.push_back(a.start);  // loop back: one or more
            return {s, t};
        }
    }
    return {0, 0};
}

std::vector<int> eps_closure(const EpsNfa& n, int s) {
    std::vector<int> out;
    std::vector<bool> seen(n.states.size(), false);
    std::vector<int> stack{s};
    seen[static_cast<size_t>(s)] = true;
    while (!stack.empty()) {
        int cur = stack.back();
        stack.pop_back();
        out.push_back(cur);
        for (int nx : n.states[static_cast<size_t>(cur)].eps) {
            if (!seen[static_cast<size_t>(nx)]) {
                seen[static_cast<size_t>(nx)] = true;
                stack.push_back(nx);
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

RegexNfa to_nfa(const RegexPtr& e) {
    EpsNfa eps;
    Frag f = build(e, eps);

    const int n = static_cast<int>(eps.states.size());
    RegexNfa out;
    out.num_states = n;
    out.start = f.start;
    out.accepting.assign(static_cast<size_t>(n), false);
    out.edges.assign(static_cast<size_t>(n), {});

    for (int s = 0; s < n; ++s) {
        std::set<std::pair<RelId, int>> moved;
        for (int u : eps_closure(eps, s)) {
            if (u == f.accept) out.accepting[static_cast<size_t>(s)] = true;
            for (auto [rel, to] : eps.states[static_cast<size_t>(u)].sym) {
                moved.emplace(rel, to);
            }
        }
        out.edges[static_cast<size_t>(s)].assign(moved.begin(), moved.end());
    }
    return out;
}

bool RegexNfa::accepts(const RelationPath& path) const {
    std::vector<bool> cur(static_cast<size_t>(num_states), false);
    cur[static_cast<size_t>(start)] = true;
    for (RelId rel : path) {
        std::vector<bool> next(static_cast<size_t>(num_states), false);
        bool any = false;
        for (int s = 0; s < num_states; ++s) {
            if (!cur[static_cast<size_t>(s)]) continue;
            for (auto [r, to] : edges[static_cast<size_t>(s)]) {
                if (r == rel) {
                    next[static_cast<size_t>(to)] = true;
                    any = true;
                }
            }
        }
        if (!any) return false;
        cur = std::move(next);
    }
    for (int s = 0; s < num_states; ++s) {
        if (cur[static_cast<size_t>(s)] && accepting[static_cast<size_t>(s)]) return true;
    }
    return false;
}

}  // namespace kbregex
