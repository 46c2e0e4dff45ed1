#include "cbnc/kernels.hpp"

#include <cassert>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace cbnc::kernels {

namespace {

inline void axpy_span(const Field& f, Symbol* dst, const Symbol* src, std::size_t n, Symbol c,
                      std::size_t begin, std::size_t end) {
  if (c == 0) return;
  if (f.is_gf256()) {
    const std::uint8_t* row = f.mul_table() + std::size_t(c) * 256;
    for (std::size_t i = begin; i < end; ++i) dst[i] ^= row[src[i]];
  } else {
    const std::uint32_t q = f.order();
    for (std::size_t i = begin; i < end; ++i)
      dst[i] = static_cast<Symbol>((dst[i] + std::uint32_t(c) * src[i]) % q);
  }
  (void)n;
}

inline void scale_span(const Field& f, Symbol* row, Symbol c, std::size_t begin,
                       std::size_t end) {
  if (c == 1) return;
  if (f.is_gf256()) {
    const std::uint8_t* mrow = f.mul_table() + std::size_t(c) * 256;
    for (std::size_t i = begin; i < end; ++i) row[i] = mrow[row[i]];
  } else {
    const std::uint32_t q = f.order();
    for (std::size_t i = begin; i < end; ++i)
      row[i] = static_cast<Symbol>((std::uint32_t(c) * row[i]) % q);
  }
}

inline void combine_one(const Field& f, const std::vector<std::vector<Symbol>>& sources,
                        const std::vector<Symbol>& coeffs, std::vector<Symbol>& out) {
  const std::size_t n = sources.empty() ? 0 : sources.front().size();
  out.assign(n, 0);
  for (std::size_t i = 0; i < sources.size(); ++i)
    axpy_span(f, out.data(), sources[i].data(), n, coeffs[i], 0, n);
}

}  // namespace

namespace serial {

void axpy(const Field& f, std::span<Symbol> dst, std::span<const Symbol> src, Symbol c) {
  assert(dst.size() == src.size());
  axpy_span(f, dst.data(), src.data(), dst.size(), c, 0, dst.size());
}

void scale(const Field& f, std::span<Symbol> row, Symbol c) {
  scale_span(f, row.data(), c, 0, row.size());
}

void combine_rows(const Field& f, const std::vector<std::vector<Symbol>>& sources,
                  const std::vector<std::vector<Symbol>>& coeffs,
                  std::vector<std::vector<Symbol>>& out) {
  out.resize(coeffs.size());
  for (std::size_t r = 0; r < coeffs.size(); ++r) combine_one(f, sources, coeffs[r], out[r]);
}

}  // namespace serial

namespace omp {

void axpy(const Field& f, std::span<Symbol> dst, std::span<const Symbol> src, Symbol c) {
  assert(dst.size() == src.size());
  if (c == 0) return;
  const std::size_t n = dst.size();
#ifdef _OPENMP
#pragma omp parallel
  {
    const int tid = omp_get_thread_num();
    const int nt = omp_get_num_threads();
    const std::size_t chunk = (n + nt - 1) / nt;
    const std::size_t b = std::min(n, chunk * tid);
    const std::size_t e = std::min(n, b + chunk);
    axpy_span(f, dst.data(), src.data(), n, c, b, e);
  }
#else
  axpy_span(f, dst.data(), src.data(), n, c, 0, n);
#endif
}

void scale(const Field& f, std::span<Symbol> row, Symbol c) {
  const std::size_t n = row.size();
#ifdef _OPENMP
#pragma omp parallel
  {
    const int tid = omp_get_thread_num();
    const int nt = omp_get_num_threads();
    const std::size_t chunk = (n + nt - 1) / nt;
    const std::size_t b = std::min(n, chunk * tid);
    const std::size_t e = std::min(n, b + chunk);
    scale_span(f, row.data(), c, b, e);
  }
#else
  scale_span(f, row.data(), c, 0, n);
#endif
}

void combine_rows(const Field& f, const std::vector<std::vector<Symbol>>& sources,
                  const std::vector<std::vector<Symbol>>& coeffs,
                  std::vector<std::vector<Symbol>>& out) {
  out.resize(coeffs.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
  for (std::size_t r = 0; r < coeffs.size(); ++r) combine_one(f, sources, coeffs[r], out[r]);
#else
  serial::combine_rows(f, sources, coeffs, out);
#endif
}

}  // namespace omp

void axpy(const Field& f, std::span<Symbol> dst, std::span<const Symbol> src, Symbol c) {
  if (dst.size() >= kParallelThreshold)
    omp::axpy(f, dst, src, c);
  else
    serial::axpy(f, dst, src, c);
}

void scale(const Field& f, std::span<Symbol> row, Symbol c) {
  if (row.size() >= kParallelThreshold)
    omp::scale(f, row, c);
  else
    serial::scale(f, row, c);
}

void combine_rows(const Field& f, const std::vector<std::vector<Symbol>>& sources,
                  const std::vector<std::vector<Symbol>>& coeffs,
                  std::vector<std::vector<Symbol>>& out) {
  const std::size_t n = sources.empty() ? 0 : sources.front().size();
  if (coeffs.size() * n >= kParallelThreshold && coeffs.size() > 1)
    omp::combine_rows(f, sources, coeffs, out);
  else
    serial::combine_rows(f, sources, coeffs, out);
}

}  // namespace cbnc::kernels
