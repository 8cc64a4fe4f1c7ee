#include "tfr/nn/tensor.hpp"

#include <functional>
#include <numeric>
#include <stdexcept>

namespace tfr::nn {

Tensor::Tensor(std::vector<int> dims, double fill) : shape(std::move(dims)) {
  data.assign(count(shape), fill);
}

std::size_t Tensor::count(std::span<const int> dims) {
  std::size_t n = 1;
  for (int d : dims) {
    if (d < 0) throw std::invalid_argument("Tensor: negative dimension");
    n *= static_cast<std::size_t>(d);
  }
  return n;
}

std::string Tensor::shape_string() const {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

}  // namespace tfr::nn
