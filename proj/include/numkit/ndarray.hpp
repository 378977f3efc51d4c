#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace numkit {

/// Dense row-major array of 64-bit floats.
class NDArray {
public:
    NDArray() = default;
    explicit NDArray(std::vector<std::size_t> shape);
    NDArray(std::vector<std::size_t> shape, std::vector<double> data);

    static NDArray scalar(double v);
    static NDArray full(std::vector<std::size_t> shape, double v);

    const std::vector<std::size_t>& shape() const { return shape_; }
    std::size_t rank() const { return shape_.size(); }
    std::size_t size() const { return data_.size(); }
    std::size_t extent(std::size_t axis) const { return shape_[axis]; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    double& operator[](std::size_t i) { return data_[i]; }
    double operator[](std::size_t i) const { return data_[i]; }

    // rank-2 element access
    double& at(std::size_t row, std::size_t col);
    double at(std::size_t row, std::size_t col) const;

    bool same_shape(const NDArray& other) const { return shape_ == other.shape_; }
    bool all_finite() const;
    std::string shape_str() const;

private:
    std::vector<std::size_t> shape_;
    std::vector<double> data_;
};

std::string shape_str(const std::vector<std::size_t>& shape);

/// C = A * B for rank-2 operands; inner extents must match.
NDArray matmul_values(const NDArray& a, const NDArray& b);

} // namespace numkit
