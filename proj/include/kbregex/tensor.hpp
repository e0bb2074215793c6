#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace kbregex {

using Vec = std::vector<double>;

struct ShapeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline void check_same_size(const Vec& a, const Vec& b, const char* where) {
    if (a.size() != b.size()) {
        throw ShapeError(std::string(where) + ": shapes " + std::to_string(a.size()) +
                         " vs " + std::to_string(b.size()));
    }
}

inline bool all_finite(const Vec& v) {
    for (double x : v) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

inline double l1_norm(const Vec& v) {
    double s = 0.0;
    for (double x : v) s += std::fabs(x);
    return s;
}

// One named block of trainable state. Embedding tables are rows x cols with
// rows addressed individually; operator matrices keep their natural rows/cols
// and are read or updated as whole rows.
struct ParamGroup {
    std::string name;
    int rows = 0;
    int cols = 0;
    Vec data;

    ParamGroup() = default;
    ParamGroup(std::string n, int r, int c) : name(std::move(n)), rows(r), cols(c), data(static_cast<size_t>(r) * c, 0.0) {}

    double* row(int r) { return data.data() + static_cast<size_t>(r) * cols; }
    const double* row(int r) const { return data.data() + static_cast<size_t>(r) * cols; }
    size_t size() const { return data.size(); }
};

struct ParamSet {
    std::vector<ParamGroup> groups;

    int add(std::string name, int rows, int cols) {
        groups.emplace_back(std::move(name), rows, cols);
        return static_cast<int>(groups.size()) - 1;
    }
    ParamGroup& operator[](int id) { return groups[static_cast<size_t>(id)]; }
    const ParamGroup& operator[](int id) const { return groups[static_cast<size_t>(id)]; }
};

}  // namespace kbregex
