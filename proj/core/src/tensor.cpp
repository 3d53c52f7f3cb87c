#include "deepads/tensor.hpp"

#include <string>

namespace deepads {

namespace {

std::int64_t checked_product(const std::vector<int>& shape) {
    if (shape.empty()) throw ShapeError("tensor: shape must have at least one dimension");
    std::int64_t n = 1;
    for (int d : shape) {
        if (d < 1) {
            throw ShapeError("tensor: invalid dimension " + std::to_string(d) +
                             " (every dimension must be >= 1)");
        }
        n *= d;
    }
    return n;
}

}  // namespace

Tensor::Tensor(std::vector<int> shape, double fill) : shape_(std::move(shape)) {
    const std::int64_t n = checked_product(shape_);
    data_.assign(static_cast<std::size_t>(n), fill);
}

Tensor Tensor::from_data(std::vector<int> shape, std::vector<double> values) {
    const std::int64_t n = checked_product(shape);
    if (n != static_cast<std::int64_t>(values.size())) {
        throw ShapeError("tensor: data length " + std::to_string(values.size()) +
                         " does not match shape product " + std::to_string(n));
    }
    Tensor t;
    t.shape_ = std::move(shape);
    t.data_ = std::move(values);
    return t;
}

std::int64_t Tensor::offset(const std::vector<int>& index) const {
    if (index.size() != shape_.size()) {
        throw ShapeError("tensor offset: index rank " + std::to_string(index.size()) +
                         " does not match tensor rank " + std::to_string(shape_.size()));
    }
    std::int64_t flat = 0;
    for (std::size_t k = 0; k < index.size(); ++k) {
        if (index[k] < 0 || index[k] >= shape_[k]) {
            throw ShapeError("tensor offset: index out of bounds at axis " + std::to_string(k));
        }
        flat = flat * shape_[k] + index[k];
    }
    return flat;
}

std::vector<int> Tensor::index_of(std::int64_t offset) const {
    if (offset < 0 || offset >= size()) {
        throw ShapeError("tensor index_of: offset out of bounds");
    }
    std::vector<int> index(shape_.size());
    for (std::size_t k = shape_.size(); k-- > 0;) {
        index[k] = static_cast<int>(offset % shape_[k]);
        offset /= shape_[k];
    }
    return index;
}

Tensor Tensor::reshaped(std::vector<int> shape) const {
    const std::int64_t n = checked_product(shape);
    if (n != size()) {
        throw ShapeError("tensor reshape: element count mismatch");
    }
    Tensor t;
    t.shape_ = std::move(shape);
    t.data_ = data_;
    return t;
}

void check_finite(const Tensor& t, const char* what) {
    for (double v : t.values()) {
        if (!std::isfinite(v)) {
            throw NumericError(std::string(what) + ": non-finite value");
        }
    }
}

}  // namespace deepads
