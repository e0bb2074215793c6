#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <stdexcept>
#include <vector>

#include "kbregex/tensor.hpp"

namespace kbregex {

struct Node {
    int idx = -1;
    bool valid() const { return idx >= 0; }
};

// Sparse gradients keyed by (param group, row). Accumulation order is the
// caller's call order, so reductions stay deterministic.
class GradSink {
public:
    explicit GradSink(const ParamSet& ps) : shape_(&ps), rows_(ps.groups.size()) {}

    void accumulate(int group, int row, std::span<const double> g, double scale = 1.0);
    void merge_scaled(const GradSink& other, double scale);

    const std::map<int, Vec>& rows(int group) const { return rows_[static_cast<size_t>(group)]; }
    size_t num_groups() const { return rows_.size(); }
    const ParamSet& shape() const { return *shape_; }
    void clear();

private:
    const ParamSet* shape_;
    std::vector<std::map<int, Vec>> rows_;
};

// Append-only record of vector-valued primitives; forward values are computed
// eagerly, reverse accumulation handles a scalar output. Subgradient
// conventions: d|x|/dx = 0 at 0; max/min route to the first argument on ties.
class Tape {
public:
    // leaves bound to a parameter row; gradients land in the GradSink
    Node leaf(const ParamGroup& g, int group_id, int row);
    Node constant(Vec v);
    Node constant_fill(double x, size_t n);

    Node add(Node a, Node b);
    Node sub(Node a, Node b);
    Node hadamard(Node a, Node b);
    Node scale(Node a, double s);
    Node neg(Node a);
    Node abs_(Node a);
    Node vmax(Node a, Node b);
    Node vmin(Node a, Node b);
    Node smax(Node a, double s);  // elementwise max(a, s); relu = smax(a, 0)
    Node smin(Node a, double s);
    Node sin_(Node a);
    Node cos_(Node a);
    Node sigmoid(Node a);
    Node log_(Node a);
    Node log_sigmoid(Node a);  // numerically stable; never returns -inf for finite input
    Node l1(Node a);           // scalar
    Node sum(Node a);          // scalar
    Node mean(Node a);         // scalar
    Node matvec(Node mat, int rows, int cols, Node x);
    Node slice(Node a, int begin, int len);

    std::span<const double> value(Node n) const;
    double scalar(Node n) const;
    size_t size(Node n) const;

    // Smallest positive distance to a kink seen by abs/max/min ops this
    // forward pass. Exact hits (margin 0) are excluded: they come from
    // constructions like max(x,0)+max(-x,0) or clamping into a zero-width
    // box, where the subgradient conventions give the exact local derivative.
    // Finite differences only go wrong when a kink is nearby but not hit.
    double kink_margin() const { return kink_margin_; }

    // reverse accumulation from a scalar node; leaf gradients are scaled by
    // `seed` and added to the sink
    void backward(Node out, GradSink& sink, double seed = 1.0) const;

    void clear();

private:
    enum class Op : uint8_t {
        Leaf, Const, Add, Sub, Hadamard, Scale, Neg, Abs, MaxV, MinV, MaxS, MinS,
        Sin, Cos, Sigmoid, Log, LogSigmoid, L1, Sum, Mean, MatVec, Slice
    };

    struct Rec {
        Op op;
        int a = -1, b = -1;
        double s = 0.0;       // scalar operand
        int rows = 0, cols = 0;  // matvec shape; slice: rows=begin, cols=len
        int group = -1, row = -1;
        size_t off = 0;
        size_t len = 0;
    };

    Node push(Rec rec, size_t len);
    void note_kink(double margin) {
        if (margin > 0.0 && margin < kink_margin_) kink_margin_ = margin;
    }
    std::span<const double> vals(int idx) const {
        const Rec& r = recs_[static_cast<size_t>(idx)];
        return {values_.data() + r.off, r.len};
    }

    std::vector<Rec> recs_;
    Vec values_;
    mutable Vec grad_scratch_;
    double kink_margin_ = std::numeric_limits<double>::infinity();
};

}  // namespace kbregex
