#pragma once

// Data-parallel kernels. Each *_parallel function has a *_serial twin with
// identical results; tests compare them and bench/ times them.

#include <cstddef>
#include <exception>
#include <functional>
#include <span>
#include <vector>

namespace suffbench::kernels {

/// Numerically stable softmax (max subtraction) of one row.
void softmax_row(std::span<const double> logits, std::span<double> out);

/// Row-wise softmax over a row-major [rows x width] matrix.
std::vector<double> softmax_rows_serial(std::span<const double> logits, std::size_t width);
std::vector<double> softmax_rows_parallel(std::span<const double> logits, std::size_t width);

/// Cosine similarity of row i of `a` with row i of `b` (both [rows x dim]).
/// Rows with zero norm yield NaN; callers validate inputs first.
std::vector<double> cosine_rows_serial(std::span<const double> a, std::span<const double> b, std::size_t dim);
std::vector<double> cosine_rows_parallel(std::span<const double> a, std::span<const double> b, std::size_t dim);

/// Runs fn(i) for i in [0, n) on up to `width` OpenMP threads with dynamic
/// scheduling. Exceptions are captured per index; the returned vector holds
/// one (possibly null) exception_ptr per index.
std::vector<std::exception_ptr> for_each_index(std::size_t n, int width, const std::function<void(std::size_t)>& fn);

}  // namespace suffbench::kernels
