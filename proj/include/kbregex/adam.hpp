#pragma once

#include "kbregex/tape.hpp"
#include "kbregex/tensor.hpp"

namespace kbregex {

struct OptimError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Adam with bias correction. Moments are kept for every parameter; rows
// without gradient in a step are untouched (sparse update, global step count).
struct AdamState {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    long step = 0;
    std::vector<Vec> m, v;

    static AdamState init(const ParamSet& ps, double lr);
};

// One update from accumulated gradients. NaN/Inf in a gradient aborts the
// step naming the parameter; non-finite values after the update do the same.
void adam_step(ParamSet& ps, const GradSink& grads, AdamState& state);

}  // namespace kbregex
