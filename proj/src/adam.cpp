#include "kbregex/adam.hpp"

#include <cmath>

namespace kbregex {

AdamState AdamState::init(const ParamSet& ps, double lr) {
    AdamState s;
    s.lr = lr;
    s.m.reserve(ps.groups.size());
    s.v.reserve(ps.groups.size());
    for (const ParamGroup& g : ps.groups) {
        s.m.emplace_back(g.size(), 0.0);
        s.v.emplace_back(g.size(), 0.0);
    }
    return s;
}

void adam_step(ParamSet& ps, const GradSink& grads, AdamState& state) {
    ++state.step;
    const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));

    for (size_t gi = 0; gi < ps.groups.size(); ++gi) {
        ParamGroup& group = ps.groups[gi];
        for (const auto& [row, grad] : grads.rows(static_cast<int>(gi))) {
            const size_t base = static_cast<size_t>(row) * group.cols;
            double* x = group.data.data() + base;
            double* m = state.m[gi].data() + base;
            double* v = state.v[gi].data() + base;
            for (size_t j = 0; j < grad.size(); ++j) {
                if (!std::isfinite(grad[j])) {
                    throw OptimError("non-finite gradient in " + group.name + " row " +
                                     std::to_string(row));
                }
                m[j] = state.beta1 * m[j] + (1.0 - state.beta1) * grad[j];
                v[j] = state.beta2 * v[j] + (1.0 - state.beta2) * grad[j] * grad[j];
                x[j] -= state.lr * (m[j] / bc1) / (std::sqrt(v[j] / bc2) + state.eps);
                if (!std::isfinite(x[j])) {
                    throw OptimError("non-finite parameter after update in " + group.name +
                                     " row " + std::to_string(row));
                }
            }
        }
    }
}

}  // namespace kbregex
