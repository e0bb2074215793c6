#pragma once

#include <functional>

#include "kbregex/tape.hpp"

namespace kbregex {

struct FdOutcome {
    long total = 0;
    long passed = 0;
    double worst_rel = 0.0;
    double pass_rate() const { return total == 0 ? 1.0 : static_cast<double>(passed) / total; }
};

// Central finite differences over every coordinate of every parameter row the
// analytic sink touched. `loss_fn` must recompute the loss from the current
// parameter values. A coordinate passes when |analytic - fd| <= tol *
// max(|analytic|, |fd|) or both are tiny.
FdOutcome finite_diff_check(ParamSet& ps, const GradSink& analytic,
                            const std::function<double()>& loss_fn, double h, double tol);

}  // namespace kbregex
