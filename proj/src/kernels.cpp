#include "suffbench/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace suffbench::kernels {

void softmax_row(std::span<const double> logits, std::span<double> out) {
  if (logits.empty() || logits.size() != out.size()) throw std::invalid_argument("softmax shape mismatch");
  double m = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - m);
    sum += out[i];
  }
  for (double& x : out) x /= sum;
}

std::vector<double> softmax_rows_serial(std::span<const double> logits, std::size_t width) {
  if (width == 0 || logits.size() % width != 0) throw std::invalid_argument("softmax_rows: bad width");
  std::vector<double> out(logits.size());
  const std::size_t rows = logits.size() / width;
  for (std::size_t r = 0; r < rows; ++r) {
    softmax_row(logits.subspan(r * width, width), std::span<double>(out).subspan(r * width, width));
  }
  return out;
}

std::vector<double> softmax_rows_parallel(std::span<const double> logits, std::size_t width) {
  if (width == 0 || logits.size() % width != 0) throw std::invalid_argument("softmax_rows: bad width");
  std::vector<double> out(logits.size());
  const auto rows = static_cast<std::ptrdiff_t>(logits.size() / width);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t r = 0; r < rows; ++r) {
    auto off = static_cast<std::size_t>(r) * width;
    softmax_row(logits.subspan(off, width), std::span<double>(out).subspan(off, width));
  }
  return out;
}

namespace {

double cosine_one(const double* u, const double* v, std::size_t dim) {
  double dot = 0.0, nu = 0.0, nv = 0.0;
  for (std::size_t k = 0; k < dim; ++k) {
    dot += u[k] * v[k];
    nu += u[k] * u[k];
    nv += v[k] * v[k];
  }
  if (nu == 0.0 || nv == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return std::clamp(dot / (std::sqrt(nu) * std::sqrt(nv)), -1.0, 1.0);
}

void check_cosine_shape(std::span<const double> a, std::span<const double> b, std::size_t dim) {
  if (dim == 0 || a.size() != b.size() || a.size() % dim != 0) throw std::invalid_argument("cosine_rows: bad shape");
}

}  // namespace

std::vector<double> cosine_rows_serial(std::span<const double> a, std::span<const double> b, std::size_t dim) {
  check_cosine_shape(a, b, dim);
  std::vector<double> out(a.size() / dim);
  for (std::size_t r = 0; r < out.size(); ++r) out[r] = cosine_one(a.data() + r * dim, b.data() + r * dim, dim);
  return out;
}

std::vector<double> cosine_rows_parallel(std::span<const double> a, std::span<const double> b, std::size_t dim) {
  check_cosine_shape(a, b, dim);
  std::vector<double> out(a.size() / dim);
  const auto rows = static_cast<std::ptrdiff_t>(out.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t r = 0; r < rows; ++r) {
    auto off = static_cast<std::size_t>(r) * dim;
    out[static_cast<std::size_t>(r)] = cosine_one(a.data() + off, b.data() + off, dim);
  }
  return out;
}

std::vector<std::exception_ptr> for_each_index(std::size_t n, int width, const std::function<void(std::size_t)>& fn) {
  std::vector<std::exception_ptr> errors(n);
  const auto count = static_cast<std::ptrdiff_t>(n);
  const int threads = std::max(1, width);
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    try {
      fn(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  return errors;
}

}  // namespace suffbench::kernels
