#include "kbregex/fdcheck.hpp"

#include <cmath>

namespace kbregex {

FdOutcome finite_diff_check(ParamSet& ps, const GradSink& analytic,
                            const std::function<double()>& loss_fn, double h, double tol) {
    FdOutcome out;
    for (size_t gi = 0; gi < ps.groups.size(); ++gi) {
        ParamGroup& group = ps.groups[gi];
        for (const auto& [row, grad] : analytic.rows(static_cast<int>(gi))) {
            double* x = group.row(row);
            for (size_t j = 0; j < grad.size(); ++j) {
                const double orig = x[j];
                x[j] = orig + h;
                const double fp = loss_fn();
                x[j] = orig - h;
                const double fm = loss_fn();
                x[j] = orig;
                const double fd = (fp - fm) / (2.0 * h);
                const double a = grad[j];
                const double diff = std::fabs(a - fd);
                const double denom = std::max(std::fabs(a), std::fabs(fd));
                const double rel = denom > 0 ? diff / denom : 0.0;
                ++out.total;
                if (diff <= tol * denom || diff <= 1e-7) {
                    ++out.passed;
                } else if (rel > out.worst_rel) {
                    out.worst_rel = rel;
                }
            }
        }
    }
    return out;
}

}  // namespace kbregex
