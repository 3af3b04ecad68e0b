#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "g2g/common.hpp"

namespace g2g {

// Dense row-major tensor of doubles. Rank 1 and 2 cover every network in
// this project; scalars are shape {1}.
struct Tensor {
    std::vector<std::size_t> shape;
    std::vector<double> v;

    Tensor() = default;

    explicit Tensor(std::vector<std::size_t> s, double fill = 0.0) : shape(std::move(s)) {
        v.assign(count(shape), fill);
    }

    Tensor(std::vector<std::size_t> s, std::vector<double> vals)
        : shape(std::move(s)), v(std::move(vals)) {
        require(v.size() == count(shape), "tensor: ", v.size(), " values for shape of ",
                count(shape));
    }

    static std::size_t count(const std::vector<std::size_t>& s) {
        std::size_t c = 1;
        for (auto d : s) c *= d;
        return c;
    }

    static Tensor scalar(double x) { return Tensor({1}, {x}); }

    std::size_t numel() const { return v.size(); }
    std::size_t ndim() const { return shape.size(); }

    std::size_t rows() const { return shape.empty() ? 0 : shape[0]; }
    std::size_t cols() const { return shape.size() < 2 ? 0 : shape[1]; }

    double& at(std::size_t i) { return v[i]; }
    double at(std::size_t i) const { return v[i]; }
    double& at(std::size_t i, std::size_t j) { return v[i * shape[1] + j]; }
    double at(std::size_t i, std::size_t j) const { return v[i * shape[1] + j]; }

    bool same_shape(const Tensor& o) const { return shape == o.shape; }
};

inline std::string shape_str(const Tensor& t) {
    std::string s = "[";
    for (std::size_t i = 0; i < t.shape.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(t.shape[i]);
    }
    return s + "]";
}

}  // namespace g2g
