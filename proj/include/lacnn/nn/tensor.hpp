#pragma once

#include <cassert>
#include <cstdint>
#include <numeric>
#include <vector>

namespace lacnn::nn {

/// Dense row-major tensor. Batches are laid out NHWC, logits N x M.
template <typename Real>
struct Tensor {
    std::vector<int> shape;
    std::vector<Real> data;

    Tensor() = default;

    explicit Tensor(std::vector<int> s) : shape(std::move(s)) {
        data.assign(count(), Real(0));
    }

    size_t count() const {
        size_t n = 1;
        for (int d : shape) n *= static_cast<size_t>(d);
        return n;
    }

    int dim(int i) const { return shape[static_cast<size_t>(i)]; }

    // NHWC access
    Real& at4(int n, int y, int x, int c) {
        return data[((static_cast<size_t>(n) * shape[1] + y) * shape[2] + x) * shape[3] + c];
    }
    Real at4(int n, int y, int x, int c) const {
        return data[((static_cast<size_t>(n) * shape[1] + y) * shape[2] + x) * shape[3] + c];
    }

    // N x M access
    Real& at2(int n, int m) { return data[static_cast<size_t>(n) * shape[1] + m]; }
    Real at2(int n, int m) const { return data[static_cast<size_t>(n) * shape[1] + m]; }

    template <typename Other>
    static Tensor<Real> from(const Tensor<Other>& src) {
        Tensor<Real> out(src.shape);
        for (size_t i = 0; i < src.data.size(); ++i) out.data[i] = static_cast<Real>(src.data[i]);
        return out;
    }
};

} // namespace lacnn::nn
