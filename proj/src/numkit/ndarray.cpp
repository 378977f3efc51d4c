#include "numkit/ndarray.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace numkit {

namespace {

std::size_t shape_product(const std::vector<std::size_t>& shape) {
    std::size_t n = 1;
    for (std::size_t e : shape) n *= e;
    return n;
}

} // namespace

NDArray::NDArray(std::vector<std::size_t> shape)
    : shape_(std::move(shape)), data_(shape_product(shape_), 0.0) {}

NDArray::NDArray(std::vector<std::size_t> shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
    if (shape_product(shape_) != data_.size()) {
        throw std::invalid_argument("NDArray: shape " + numkit::shape_str(shape_) +
                                    " does not match data length " + std::to_string(data_.size()));
    }
}

NDArray NDArray::scalar(double v) { return NDArray({1}, {v}); }

NDArray NDArray::full(std::vector<std::size_t> shape, double v) {
    NDArray out(std::move(shape));
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = v;
    return out;
}

double& NDArray::at(std::size_t row, std::size_t col) {
    return data_[row * shape_[1] + col];
}

double NDArray::at(std::size_t row, std::size_t col) const {
    return data_[row * shape_[1] + col];
}

bool NDArray::all_finite() const {
    for (double v : data_) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

std::string NDArray::shape_str() const { return numkit::shape_str(shape_); }

std::string shape_str(const std::vector<std::size_t>& shape) {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) os << ",";
        os << shape[i];
    }
    os << "]";
    return os.str();
}

NDArray matmul_values(const NDArray& a, const NDArray& b) {
    if (a.rank() != 2 || b.rank() != 2 || a.extent(1) != b.extent(0)) {
        throw std::invalid_argument("matmul: incompatible shapes " + a.shape_str() + " x " + b.shape_str());
    }
    const std::size_t m = a.extent(0), k = a.extent(1), n = b.extent(1);
    NDArray out({m, n});
    const double* ap = a.data();
    const double* bp = b.data();
    double* cp = out.data();
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t p = 0; p < k; ++p) {
            const double aip = ap[i * k + p];
            if (aip == 0.0) continue;
            const double* brow = bp + p * n;
            double* crow = cp + i * n;
            for (std::size_t j = 0; j < n; ++j) crow[j] += aip * brow[j];
        }
    }
    return out;
}

} // namespace numkit
