#include "kbregex/tape.hpp"

#include <cmath>

namespace kbregex {

void GradSink::accumulate(int group, int row, std::span<const double> g, double scale) {
    auto& m = rows_[static_cast<size_t>(group)];
    auto it = m.find(row);
    if (it == m.end()) it = m.emplace(row, Vec(g.size(), 0.0)).first;
    Vec& dst = it->second;
    for (size_t i = 0; i < g.size(); ++i) dst[i] += scale * g[i];
}

void GradSink::merge_scaled(const GradSink& other, double scale) {
    for (size_t g = 0; g < rows_.size(); ++g) {
        for (const auto& [row, grad] : other.rows_[g]) {
            accumulate(static_cast<int>(g), row, grad, scale);
        }
    }
}

void GradSink::clear() {
    for (auto& m : rows_) m.clear();
}

Node Tape::push(Rec rec, size_t len) {
    rec.off = values_.size();
    rec.len = len;
    values_.resize(values_.size() + len, 0.0);
    recs_.push_back(rec);
    return Node{static_cast<int>(recs_.size()) - 1};
}

Node Tape::leaf(const ParamGroup& g, int group_id, int row) {
    Rec r;
    r.op = Op::Leaf;
    r.group = group_id;
    r.row = row;
    Node n = push(r, static_cast<size_t>(g.cols));
    const double* src = g.row(row);
    std::copy(src, src + g.cols, values_.begin() + static_cast<long>(recs_.back().off));
    return n;
}

Node Tape::constant(Vec v) {
    Rec r;
    r.op = Op::Const;
    Node n = push(r, v.size());
    std::copy(v.begin(), v.end(), values_.begin() + static_cast<long>(recs_.back().off));
    return n;
}

Node Tape::constant_fill(double x, size_t n) {
    Rec r;
    r.op = Op::Const;
    Node node = push(r, n);
    std::fill_n(values_.begin() + static_cast<long>(recs_.back().off), n, x);
    return node;
}

#define KBX_BINOP(NAME, OPTAG, EXPR)                                      \
    Node Tape::NAME(Node a, Node b) {                                     \
        auto va = vals(a.idx);                                            \
        auto vb = vals(b.idx);                                            \
        if (va.size() != vb.size())                                       \
            throw ShapeError(#NAME ": shapes " + std::to_string(va.size()) + " vs " + \
                             std::to_string(vb.size()));                  \
        Rec r;                                                            \
        r.op = Op::OPTAG;                                                 \
        r.a = a.idx;                                                      \
        r.b = b.idx;                                                      \
        Node n = push(r, va.size());                                      \
        va = vals(a.idx);                                                 \
        vb = vals(b.idx);                                                 \
        double* out = values_.data() + recs_.back().off;                  \
        for (size_t i = 0; i < va.size(); ++i) out[i] = (EXPR);           \
        return n;                                                         \
    }

KBX_BINOP(add, Add, va[i] + vb[i])
KBX_BINOP(sub, Sub, va[i] - vb[i])
KBX_BINOP(hadamard, Hadamard, va[i] * vb[i])

#undef KBX_BINOP

Node Tape::vmax(Node a, Node b) {
    auto va = vals(a.idx);
    auto vb = vals(b.idx);
    if (va.size() != vb.size()) {
        throw ShapeError("vmax: shapes " + std::to_string(va.size()) + " vs " +
                         std::to_string(vb.size()));
    }
    Rec r;
    r.op = Op::MaxV;
    r.a = a.idx;
    r.b = b.idx;
    Node n = push(r, va.size());
    va = vals(a.idx);
    vb = vals(b.idx);
    double* out = values_.data() + recs_.back().off;
    for (size_t i = 0; i < va.size(); ++i) {
        note_kink(std::fabs(va[i] - vb[i]));
        out[i] = va[i] >= vb[i] ? va[i] : vb[i];
    }
    return n;
}

Node Tape::vmin(Node a, Node b) {
    auto va = vals(a.idx);
    auto vb = vals(b.idx);
    if (va.size() != vb.size()) {
        throw ShapeError("vmin: shapes " + std::to_string(va.size()) + " vs " +
                         std::to_string(vb.size()));
    }
    Rec r;
    r.op = Op::MinV;
    r.a = a.idx;
    r.b = b.idx;
    Node n = push(r, va.size());
    va = vals(a.idx);
    vb = vals(b.idx);
    double* out = values_.data() + recs_.back().off;
    for (size_t i = 0; i < va.size(); ++i) {
        note_kink(std::fabs(va[i] - vb[i]));
        out[i] = va[i] <= vb[i] ? va[i] : vb[i];
    }
    return n;
}

#define KBX_UNOP(NAME, OPTAG, EXPR)                             \
    Node Tape::NAME(Node a) {                                   \
        Rec r;                                                  \
        r.op = Op::OPTAG;                                       \
        r.a = a.idx;                                            \
        Node n = push(r, vals(a.idx).size());                   \
        auto va = vals(a.idx);                                  \
        double* out = values_.data() + recs_.back().off;        \
        for (size_t i = 0; i < va.size(); ++i) out[i] = (EXPR); \
        return n;                                               \
    }

KBX_UNOP(neg, Neg, -va[i])
KBX_UNOP(sin_, Sin, std::sin(va[i]))
KBX_UNOP(cos_, Cos, std::cos(va[i]))
KBX_UNOP(log_, Log, std::log(va[i]))

#undef KBX_UNOP

Node Tape::scale(Node a, double s) {
    Rec r;
    r.op = Op::Scale;
    r.a = a.idx;
    r.s = s;
    Node n = push(r, vals(a.idx).size());
    auto va = vals(a.idx);
    double* out = values_.data() + recs_.back().off;
    for (size_t i = 0; i < va.size(); ++i) out[i] = s * va[i];
    return n;
}

Node Tape::abs_(Node a) {
    Rec r;
    r.op = Op::Abs;
    r.a = a.idx;
    Node n = push(r, vals(a.idx).size());
    auto va = vals(a.idx);
    double* out = values_.data() + recs_.back().off;
    for (size_t i = 0; i < va.size(); ++i) {
        note_kink(std::fabs(va[i]));
        out[i] = std::fabs(va[i]);
    }
    return n;
}

Node Tape::smax(Node a, double s) {
    Rec r;
    r.op = Op::MaxS;
    r.a = a.idx;
    r.s = s;
    Node n = push(r, vals(a.idx).size());
    auto va = vals(a.idx);
    double* out = values_.data() + recs_.back().off;
    for (size_t i = 0; i < va.size(); ++i) {
        note_kink(std::fabs(va[i] - s));
        out[i] = va[i] >= s ? va[i] : s;
    }
    return n;
}

Node Tape::smin(Node a, double s) {
    Rec r;
    r.op = Op::MinS;
    r.a = a.idx;
    r.s = s;
    Node n = push(r, vals(a.idx).size());
    auto va = vals(a.idx);
    double* out = values_.data() + recs_.back().off;
    for (size_t i = 0; i < va.size(); ++i) {
        note_kink(std::fabs(va[i] - s));
        out[i] = va[i] <= s ? va[i] : s;
    }
    return n;
}

static double stable_sigmoid(double x) {
    if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
    double e = std::exp(x);
    return e / (1.0 + e);
}

static double stable_log_sigmoid(double x) {
    if (x >= 0) return -std::log1p(std::exp(-x));
    return x - std::log1p(std::exp(x));
}

Node Tape::sigmoid(Node a) {
    Rec r;
    r.op = Op::Sigmoid;
    r.a = a.idx;
    Node n = push(r, vals(a.idx).size());
    auto va = vals(a.idx);
    double* out = values_.data() + recs_.back().off;
    for (size_t i = 0; i < va.size(); ++i) out[i] = stable_sigmoid(va[i]);
    return n;
}

Node Tape::log_sigmoid(Node a) {
    Rec r;
    r.op = Op::LogSigmoid;
    r.a = a.idx;
    Node n = push(r, vals(a.idx).size());
    auto va = vals(a.idx);
    double* out = values_.data() + recs_.back().off;
    for (size_t i = 0; i < va.size(); ++i) out[i] = stable_log_sigmoid(va[i]);
    return n;
}

Node Tape::l1(Node a) {
    Rec r;
    r.op = Op::L1;
    r.a = a.idx;
    Node n = push(r, 1);
    auto va = vals(a.idx);
    double s = 0.0;
    for (size_t i = 0; i < va.size(); ++i) {
        note_kink(std::fabs(va[i]));
        s += std::fabs(va[i]);
    }
    values_[recs_.back().off] = s;
    return n;
}

Node Tape::sum(Node a) {
    Rec r;
    r.op = Op::Sum;
    r.a = a.idx;
    Node n = push(r, 1);
    auto va = vals(a.idx);
    double s = 0.0;
    for (double x : va) s += x;
    values_[recs_.back().off] = s;
    return n;
}

Node Tape::mean(Node a) {
    Rec r;
    r.op = Op::Mean;
    r.a = a.idx;
    Node n = push(r, 1);
    auto va = vals(a.idx);
    double s = 0.0;
    for (double x : va) s += x;
    values_[recs_.back().off] = va.empty() ? 0.0 : s / static_cast<double>(va.size());
    return n;
}

Node Tape::matvec(Node mat, int rows, int cols, Node x) {
    if (vals(mat.idx).size() != static_cast<size_t>(rows) * static_cast<size_t>(cols) ||
        vals(x.idx).size() != static_cast<size_t>(cols)) {
        throw ShapeError("matvec: " + std::to_string(rows) + "x" + std::to_string(cols) +
                         " with mat size " + std::to_string(vals(mat.idx).size()) + ", vec " +
                         std::to_string(vals(x.idx).size()));
    }
    Rec r;
    r.op = Op::MatVec;
    r.a = mat.idx;
    r.b = x.idx;
    r.rows = rows;
    r.cols = cols;
    Node n = push(r, static_cast<size_t>(rows));
    auto a = vals(mat.idx);
    auto v = vals(x.idx);
    double* out = values_.data() + recs_.back().off;
    for (int i = 0; i < rows; ++i) {
        double s = 0.0;
        const double* arow = a.data() + static_cast<size_t>(i) * cols;
        for (int j = 0; j < cols; ++j) s += arow[j] * v[static_cast<size_t>(j)];
        out[i] = s;
    }
    return n;
}

Node Tape::slice(Node a, int begin, int len) {
    auto va = vals(a.idx);
    if (begin < 0 || len < 0 || static_cast<size_t>(begin + len) > va.size()) {
        throw ShapeError("slice: [" + std::to_string(begin) + ", " + std::to_string(begin + len) +
                         ") of " + std::to_string(va.size()));
    }
    Rec r;
    r.op = Op::Slice;
    r.a = a.idx;
    r.rows = begin;
    r.cols = len;
    Node n = push(r, static_cast<size_t>(len));
    va = vals(a.idx);
    std::copy(va.begin() + begin, va.begin() + begin + len,
              values_.begin() + static_cast<long>(recs_.back().off));
    return n;
}

std::span<const double> Tape::value(Node n) const { return vals(n.idx); }

double Tape::scalar(Node n) const {
    auto v = vals(n.idx);
    if (v.size() != 1) throw ShapeError("scalar: node has size " + std::to_string(v.size()));
    return v[0];
}

size_t Tape::size(Node n) const { return vals(n.idx).size(); }

void Tape::backward(Node out, GradSink& sink, double seed) const {
    if (vals(out.idx).size() != 1) {
        throw ShapeError("backward: output must be scalar");
    }
    grad_scratch_.assign(values_.size(), 0.0);
    Vec& grads = grad_scratch_;
    grads[recs_[static_cast<size_t>(out.idx)].off] = seed;

    for (int i = out.idx; i >= 0; --i) {
        const Rec& r = recs_[static_cast<size_t>(i)];
        const double* g = grads.data() + r.off;
        const double* v = values_.data() + r.off;
        if (r.op == Op::Leaf) {
            // touched parameters always report, even with an all-zero gradient
            sink.accumulate(r.group, r.row, {g, r.len}, 1.0);
            continue;
        }
        bool any = false;
        for (size_t j = 0; j < r.len; ++j) {
            if (g[j] != 0.0) {
                any = true;
                break;
            }
        }
        if (!any) continue;

        auto ga = [&]() { return grads.data() + recs_[static_cast<size_t>(r.a)].off; };
        auto gb = [&]() { return grads.data() + recs_[static_cast<size_t>(r.b)].off; };
        auto va = [&]() { return values_.data() + recs_[static_cast<size_t>(r.a)].off; };
        auto vb = [&]() { return values_.data() + recs_[static_cast<size_t>(r.b)].off; };
        const size_t n = r.len;

        switch (r.op) {
            case Op::Leaf:
            case Op::Const:
                break;
            case Op::Add:
                for (size_t j = 0; j < n; ++j) ga()[j] += g[j];
                for (size_t j = 0; j < n; ++j) gb()[j] += g[j];
                break;
            case Op::Sub:
                for (size_t j = 0; j < n; ++j) ga()[j] += g[j];
                for (size_t j = 0; j < n; ++j) gb()[j] -= g[j];
                break;
            case Op::Hadamard:
                for (size_t j = 0; j < n; ++j) ga()[j] += g[j] * vb()[j];
                for (size_t j = 0; j < n; ++j) gb()[j] += g[j] * va()[j];
                break;
            case Op::Scale:
                for (size_t j = 0; j < n; ++j) ga()[j] += r.s * g[j];
                break;
            case Op::Neg:
                for (size_t j = 0; j < n; ++j) ga()[j] -= g[j];
                break;
            case Op::Abs:
                for (size_t j = 0; j < n; ++j) {
                    double x = va()[j];
                    ga()[j] += x > 0 ? g[j] : (x < 0 ? -g[j] : 0.0);
                }
                break;
            case Op::MaxV:
                for (size_t j = 0; j < n; ++j) {
                    if (va()[j] >= vb()[j]) ga()[j] += g[j];
                    else gb()[j] += g[j];
                }
                break;
            case Op::MinV:
                for (size_t j = 0; j < n; ++j) {
                    if (va()[j] <= vb()[j]) ga()[j] += g[j];
                    else gb()[j] += g[j];
                }
                break;
            case Op::MaxS:
                for (size_t j = 0; j < n; ++j) {
                    if (va()[j] >= r.s) ga()[j] += g[j];
                }
                break;
            case Op::MinS:
                for (size_t j = 0; j < n; ++j) {
                    if (va()[j] <= r.s) ga()[j] += g[j];
                }
                break;
            case Op::Sin:
                for (size_t j = 0; j < n; ++j) ga()[j] += g[j] * std::cos(va()[j]);
                break;
            case Op::Cos:
                for (size_t j = 0; j < n; ++j) ga()[j] -= g[j] * std::sin(va()[j]);
                break;
            case Op::Sigmoid:
                for (size_t j = 0; j < n; ++j) ga()[j] += g[j] * v[j] * (1.0 - v[j]);
                break;
            case Op::Log:
                for (size_t j = 0; j < n; ++j) ga()[j] += g[j] / va()[j];
                break;
            case Op::LogSigmoid:
                for (size_t j = 0; j < n; ++j) ga()[j] += g[j] * stable_sigmoid(-va()[j]);
                break;
            case Op::L1: {
                double g0 = g[0];
                size_t an = recs_[static_cast<size_t>(r.a)].len;
                for (size_t j = 0; j < an; ++j) {
                    double x = va()[j];
                    ga()[j] += x > 0 ? g0 : (x < 0 ? -g0 : 0.0);
                }
                break;
            }
            case Op::Sum: {
                double g0 = g[0];
                size_t an = recs_[static_cast<size_t>(r.a)].len;
                for (size_t j = 0; j < an; ++j) ga()[j] += g0;
                break;
            }
            case Op::Mean: {
                size_t an = recs_[static_cast<size_t>(r.a)].len;
                if (an == 0) break;
                double g0 = g[0] / static_cast<double>(an);
                for (size_t j = 0; j < an; ++j) ga()[j] += g0;
                break;
            }
            case Op::MatVec: {
                const double* x = vb();
                const double* m = va();
                for (int row = 0; row < r.rows; ++row) {
                    double grow = g[row];
                    if (grow == 0.0) continue;
                    double* gm = ga() + static_cast<size_t>(row) * r.cols;
                    double* gx = gb();
                    const double* mrow = m + static_cast<size_t>(row) * r.cols;
                    for (int c = 0; c < r.cols; ++c) {
                        gm[c] += grow * x[c];
                        gx[c] += grow * mrow[c];
                    }
                }
                break;
            }
            case Op::Slice:
                for (size_t j = 0; j < n; ++j) ga()[static_cast<size_t>(r.rows) + j] += g[j];
                break;
        }
    }
}

void Tape::clear() {
    recs_.clear();
    values_.clear();
    kink_margin_ = std::numeric_limits<double>::infinity();
}

}  // namespace kbregex
