#pragma once

#include <cassert>
#include <span>
#include <vector>

namespace csirl::nn {

// Minimal dense row-major matrix used for batched network evaluation.
// T is double for plain values and Dual for forward-over-reverse passes.
template <typename T>
struct Mat {
    int rows = 0;
    int cols = 0;
    std::vector<T> a;

    Mat() = default;
    Mat(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c) {}

    T& operator()(int r, int c) { return a[static_cast<size_t>(r) * cols + c]; }
    const T& operator()(int r, int c) const { return a[static_cast<size_t>(r) * cols + c]; }

    std::span<T> row(int r) { return {a.data() + static_cast<size_t>(r) * cols, static_cast<size_t>(cols)}; }
    std::span<const T> row(int r) const {
        return {a.data() + static_cast<size_t>(r) * cols, static_cast<size_t>(cols)};
    }

    void fill(const T& x) { a.assign(a.size(), x); }
};

using MatD = Mat<double>;

template <typename T>
Mat<T> promote(const MatD& m) {
    Mat<T> out(m.rows, m.cols);
    for (size_t i = 0; i < m.a.size(); ++i) out.a[i] = T(m.a[i]);
    return out;
}

}  // namespace csirl::nn
