// Compares the serial reference kernels against the OpenMP versions, and the
// incremental decoder against the batch-inversion reference.

#include <chrono>
#include <cstdio>
#include <vector>

#include "cbnc/kernels.hpp"
#include "cbnc/rlnc.hpp"

using namespace cbnc;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<Symbol> random_row(RngStream& rng, std::size_t n, std::uint32_t order) {
  std::vector<Symbol> row(n);
  for (auto& s : row) s = static_cast<Symbol>(rng.next_below(order));
  return row;
}

void bench_axpy(const Field& f) {
  std::printf("axpy (dst += c*src), %s\n", f.spec().name().c_str());
  std::printf("%12s %14s %14s %8s\n", "symbols", "serial MB/s", "omp MB/s", "speedup");
  RngStream rng(1);
  for (std::size_t n : {1u << 10, 1u << 14, 1u << 18, 1u << 21}) {
    auto dst = random_row(rng, n, f.order());
    auto src = random_row(rng, n, f.order());
    const int reps = int(std::max<std::size_t>(8, (64u << 20) / n));

    auto t0 = Clock::now();
    for (int i = 0; i < reps; ++i)
      kernels::serial::axpy(f, dst, src, static_cast<Symbol>(1 + (i % (f.order() - 1))));
    const double serial_s = seconds_since(t0);

    t0 = Clock::now();
    for (int i = 0; i < reps; ++i)
      kernels::omp::axpy(f, dst, src, static_cast<Symbol>(1 + (i % (f.order() - 1))));
    const double omp_s = seconds_since(t0);

    const double mb = double(reps) * n / (1 << 20);
    std::printf("%12zu %14.1f %14.1f %7.2fx\n", n, mb / serial_s, mb / omp_s,
                serial_s / omp_s);
  }
}

void bench_decode() {
  Field f(FieldSpec::gf256());
  RngStream rng(2);
  const std::size_t m = 32, n = 1 << 16;
  std::vector<std::uint8_t> file(m * n);
  for (auto& b : file) b = static_cast<std::uint8_t>(rng.next_below(256));
  auto [gen, sources] = rlnc::segment(file, m, f, "bench");

  std::vector<rlnc::CodedBlock> blocks;
  while (blocks.size() < m) blocks.push_back(rlnc::encode_random(f, sources, ref_of(gen), rng));

  auto t0 = Clock::now();
  rlnc::DecoderState st(ref_of(gen), &f);
  for (const auto& b : blocks) st.absorb(b);
  auto incremental_bytes = st.decode(gen);
  const double incremental_s = seconds_since(t0);

  t0 = Clock::now();
  auto batch_bytes = rlnc::batch_decode(f, gen, blocks);
  const double batch_s = seconds_since(t0);

  std::printf("\ndecode, m=%zu n=%zu (%.1f MiB)\n", m, n, double(m * n) / (1 << 20));
  std::printf("  incremental rref: %.3f s\n", incremental_s);
  std::printf("  batch inversion : %.3f s\n", batch_s);
  std::printf("  outputs equal   : %s\n", incremental_bytes == batch_bytes ? "yes" : "NO");
}

}  // namespace

int main() {
  bench_axpy(Field(FieldSpec::gf256()));
  std::printf("\n");
  bench_axpy(Field(FieldSpec::prime(65521)));
  bench_decode();
  return 0;
}
