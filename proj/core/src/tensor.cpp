#include "mtae/tensor.hpp"

#include <cmath>

#include "mtae/errors.hpp"

namespace mtae::ad {

namespace {
std::size_t product(const std::vector<std::size_t>& shape) {
    std::size_t n = 1;
    for (std::size_t d : shape) n *= d;
    return n;
}
}  // namespace

Tensor Tensor::scalar(double v) {
    Tensor t;
    t.values_.assign(1, v);
    return t;
}

Tensor Tensor::zeros(std::vector<std::size_t> shape) { return full(std::move(shape), 0.0); }

Tensor Tensor::full(std::vector<std::size_t> shape, double v) {
    Tensor t;
    t.values_.assign(product(shape), v);
    t.shape_ = std::move(shape);
    return t;
}

Tensor Tensor::from_values(std::vector<std::size_t> shape, std::vector<double> values) {
    if (values.size() != product(shape))
        throw DimensionError("tensor: " + std::to_string(values.size()) +
                             " values do not fill the requested shape");
    Tensor t;
    t.shape_ = std::move(shape);
    t.values_ = std::move(values);
    return t;
}

Tensor Tensor::vec(std::vector<double> values) {
    std::size_t n = values.size();
    return from_values({n}, std::move(values));
}

Tensor Tensor::mat(std::size_t rows, std::size_t cols, std::vector<double> values) {
    return from_values({rows, cols}, std::move(values));
}

Tensor Tensor::one_hot(std::size_t index, std::size_t size) {
    if (index >= size)
        throw IndexError("one_hot: index " + std::to_string(index) + " out of range for size " +
                         std::to_string(size));
    Tensor t = zeros({size});
    t[index] = 1.0;
    return t;
}

std::size_t Tensor::rows() const {
    if (rank() != 2) throw DimensionError("rows(): tensor is " + shape_str() + ", not a matrix");
    return shape_[0];
}

std::size_t Tensor::cols() const {
    if (rank() != 2) throw DimensionError("cols(): tensor is " + shape_str() + ", not a matrix");
    return shape_[1];
}

double Tensor::item() const {
    if (values_.size() != 1)
        throw ContractError("item(): tensor " + shape_str() + " is not a scalar");
    return values_[0];
}

double Tensor::at(std::size_t r, std::size_t c) const {
    return values_[r * cols() + c];
}

double& Tensor::at(std::size_t r, std::size_t c) {
    return values_[r * cols() + c];
}

bool Tensor::all_finite() const {
    for (double v : values_)
        if (!std::isfinite(v)) return false;
    return true;
}

std::span<double> Tensor::grad() {
    if (!grad_) grad_.emplace(values_.size(), 0.0);
    return *grad_;
}

std::span<const double> Tensor::grad() const {
    if (!grad_) throw ContractError("grad(): no gradient accumulator present");
    return *grad_;
}

void Tensor::zero_grad() {
    if (grad_)
        grad_->assign(values_.size(), 0.0);
    else
        grad_.emplace(values_.size(), 0.0);
}

std::string Tensor::shape_str() const {
    if (shape_.empty()) return "scalar";
    if (shape_.size() == 1) return "[" + std::to_string(shape_[0]) + "]";
    return std::to_string(shape_[0]) + "x" + std::to_string(shape_[1]);
}

}  // namespace mtae::ad
