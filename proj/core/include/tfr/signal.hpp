#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace tfr {

// Maps any integer index onto [0, n) by mirror reflection about the end
// samples (numpy "reflect" mode, edge sample not repeated), repeating the
// reflection when the index lies more than one length outside.
std::ptrdiff_t reflect_index(std::ptrdiff_t i, std::ptrdiff_t n);

// Signal padded with `left` and `right` reflected samples.
std::vector<double> reflect_pad(std::span<const double> x, std::size_t left, std::size_t right);

}  // namespace tfr
