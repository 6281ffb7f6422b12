#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mtae::ad {

// Dense row-major float64 tensor of rank 0..2. Rank 0 is a scalar.
// Carries an optional same-shape gradient accumulator, used by the
// optimizer to collect per-batch gradients outside any tape.
class Tensor {
public:
    Tensor() = default;

    static Tensor scalar(double v);
    static Tensor zeros(std::vector<std::size_t> shape);
    static Tensor full(std::vector<std::size_t> shape, double v);
    static Tensor from_values(std::vector<std::size_t> shape, std::vector<double> values);
    static Tensor vec(std::vector<double> values);
    static Tensor mat(std::size_t rows, std::size_t cols, std::vector<double> values);
    static Tensor one_hot(std::size_t index, std::size_t size);

    const std::vector<std::size_t>& shape() const { return shape_; }
    std::size_t rank() const { return shape_.size(); }
    std::size_t size() const { return values_.size(); }
    bool is_scalar() const { return shape_.empty(); }
    std::size_t rows() const;  // rank-2 only
    std::size_t cols() const;  // rank-2 only

    double item() const;  // scalar only

    double operator[](std::size_t i) const { return values_[i]; }
    double& operator[](std::size_t i) { return values_[i]; }
    double at(std::size_t r, std::size_t c) const;
    double& at(std::size_t r, std::size_t c);

    std::span<const double> values() const { return values_; }
    std::span<double> values() { return values_; }

    bool same_shape(const Tensor& o) const { return shape_ == o.shape_; }
    bool all_finite() const;

    // gradient accumulator
    bool has_grad() const { return grad_.has_value(); }
    std::span<double> grad();              // allocates zeros on first use
    std::span<const double> grad() const;  // requires has_grad()
    void zero_grad();
    void drop_grad() { grad_.reset(); }

    std::string shape_str() const;  // "2x3", "[5]", "scalar"

private:
    std::vector<std::size_t> shape_;
    std::vector<double> values_;
    std::optional<std::vector<double>> grad_;
};

}  // namespace mtae::ad
