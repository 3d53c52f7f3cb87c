#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "deepads/errors.hpp"

namespace deepads {

// Dense row-major array of doubles with a fixed shape. The shape never
// changes after construction; values are mutable. Image tensors are laid
// out [H, W, C] with channels innermost; conv weights [3, 3, c_in, c_out].
class Tensor {
public:
    Tensor() = default;

    // every dimension must be >= 1
    explicit Tensor(std::vector<int> shape, double fill = 0.0);

    // adopts an existing flat buffer; length must equal the shape product
    static Tensor from_data(std::vector<int> shape, std::vector<double> values);

    const std::vector<int>& shape() const { return shape_; }
    int rank() const { return static_cast<int>(shape_.size()); }
    int dim(int axis) const { return shape_[static_cast<std::size_t>(axis)]; }
    std::int64_t size() const { return static_cast<std::int64_t>(data_.size()); }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    std::vector<double>& values() & { return data_; }
    const std::vector<double>& values() const& { return data_; }
    // rvalue access returns by value so `f(x).values()` never dangles
    std::vector<double> values() && { return std::move(data_); }

    double operator[](std::int64_t i) const { return data_[static_cast<std::size_t>(i)]; }
    double& operator[](std::int64_t i) { return data_[static_cast<std::size_t>(i)]; }

    // unchecked element access for the common ranks
    double operator()(int i, int j) const { return data_[idx2(i, j)]; }
    double& operator()(int i, int j) { return data_[idx2(i, j)]; }
    double operator()(int i, int j, int c) const { return data_[idx3(i, j, c)]; }
    double& operator()(int i, int j, int c) { return data_[idx3(i, j, c)]; }
    double operator()(int a, int b, int c, int d) const { return data_[idx4(a, b, c, d)]; }
    double& operator()(int a, int b, int c, int d) { return data_[idx4(a, b, c, d)]; }

    // checked flat offset of a multi-index, and its inverse
    std::int64_t offset(const std::vector<int>& index) const;
    std::vector<int> index_of(std::int64_t offset) const;

    bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }

    // same data under a new shape; element counts must agree
    Tensor reshaped(std::vector<int> shape) const;

private:
    std::size_t idx2(int i, int j) const {
        return static_cast<std::size_t>(i) * static_cast<std::size_t>(shape_[1]) +
               static_cast<std::size_t>(j);
    }
    std::size_t idx3(int i, int j, int c) const {
        return (static_cast<std::size_t>(i) * static_cast<std::size_t>(shape_[1]) +
                static_cast<std::size_t>(j)) *
                   static_cast<std::size_t>(shape_[2]) +
               static_cast<std::size_t>(c);
    }
    std::size_t idx4(int a, int b, int c, int d) const {
        return ((static_cast<std::size_t>(a) * static_cast<std::size_t>(shape_[1]) +
                 static_cast<std::size_t>(b)) *
                    static_cast<std::size_t>(shape_[2]) +
                static_cast<std::size_t>(c)) *
                   static_cast<std::size_t>(shape_[3]) +
               static_cast<std::size_t>(d);
    }

    std::vector<int> shape_;
    std::vector<double> data_;
};

// throws NumericError if any element is non-finite
void check_finite(const Tensor& t, const char* what);

// element-wise application; results must stay finite
template <class F>
Tensor map(const Tensor& t, F&& f) {
    Tensor out = t;
    for (auto& v : out.values()) {
        v = f(v);
        if (!std::isfinite(v)) throw NumericError("map: produced a non-finite value");
    }
    return out;
}

// element-wise combination of two equally shaped tensors
template <class F>
Tensor zip(const Tensor& a, const Tensor& b, F&& f) {
    if (!a.same_shape(b)) throw ShapeError("zip: shape mismatch");
    Tensor out = a;
    const double* bp = b.data();
    double* op = out.data();
    const std::int64_t n = out.size();
    for (std::int64_t i = 0; i < n; ++i) {
        op[i] = f(op[i], bp[i]);
        if (!std::isfinite(op[i])) throw NumericError("zip: produced a non-finite value");
    }
    return out;
}

}  // namespace deepads
