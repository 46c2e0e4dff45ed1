#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cbnc/field.hpp"

namespace cbnc::kernels {

// Bulk row operations used by the codec. Each kernel exists twice: a serial
// reference in kernels::serial and an OpenMP version in kernels::omp. The
// unqualified entry points dispatch on row length; results are identical
// either way (elementwise independent work). tools/bench_kernels compares
// the two implementations.

namespace serial {

// dst[i] = add(dst[i], mul(c, src[i]))
void axpy(const Field& f, std::span<Symbol> dst, std::span<const Symbol> src, Symbol c);

// row[i] = mul(row[i], c)
void scale(const Field& f, std::span<Symbol> row, Symbol c);

// out[r] = sum_i coeffs[r][i] * sources[i], rows independent.
// sources: m rows of n symbols; coeffs: rows.size() vectors of m symbols.
void combine_rows(const Field& f, const std::vector<std::vector<Symbol>>& sources,
                  const std::vector<std::vector<Symbol>>& coeffs,
                  std::vector<std::vector<Symbol>>& out);

}  // namespace serial

namespace omp {

void axpy(const Field& f, std::span<Symbol> dst, std::span<const Symbol> src, Symbol c);
void scale(const Field& f, std::span<Symbol> row, Symbol c);
void combine_rows(const Field& f, const std::vector<std::vector<Symbol>>& sources,
                  const std::vector<std::vector<Symbol>>& coeffs,
                  std::vector<std::vector<Symbol>>& out);

}  // namespace omp

// Row lengths below this stay serial; OpenMP fork/join costs more than the
// loop at simulator block sizes.
inline constexpr std::size_t kParallelThreshold = 1 << 15;

void axpy(const Field& f, std::span<Symbol> dst, std::span<const Symbol> src, Symbol c);
void scale(const Field& f, std::span<Symbol> row, Symbol c);
void combine_rows(const Field& f, const std::vector<std::vector<Symbol>>& sources,
                  const std::vector<std::vector<Symbol>>& coeffs,
                  std::vector<std::vector<Symbol>>& out);

}  // namespace cbnc::kernels
