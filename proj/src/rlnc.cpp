#include "cbnc/rlnc.hpp"

#include <algorithm>
#include <cassert>

#include "cbnc/digest.hpp"
#include "cbnc/kernels.hpp"

namespace cbnc::rlnc {

std::pair<Generation, std::vector<SourceVector>> segment(std::span<const std::uint8_t> file_bytes,
                                                         std::size_t block_count,
                                                         const Field& field,
                                                         const std::string& file_id) {
  if (file_bytes.empty()) throw EmptyFile();
  if (block_count < 1) throw DimensionMismatch("segment: block count must be >= 1");
  if (field.order() <= 255)
    throw ConfigInvalid("segment: field order must exceed 255 to hold byte symbols");

  const std::size_t n = (file_bytes.size() + block_count - 1) / block_count;
  Generation gen;
  gen.file_id = file_id;
  gen.block_count = block_count;
  gen.symbols_per_block = n;
  gen.original_length = file_bytes.size();
  gen.file_digest = digest_bytes(file_bytes.data(), file_bytes.size());

  std::vector<SourceVector> sources(block_count);
  for (std::size_t i = 0; i < block_count; ++i) {
    sources[i].index = i;
    sources[i].symbols.assign(n, 0);
    const std::size_t begin = i * n;
    const std::size_t end = std::min(file_bytes.size(), begin + n);
    for (std::size_t j = begin; j < end; ++j) sources[i].symbols[j - begin] = file_bytes[j];
  }
  return {std::move(gen), std::move(sources)};
}

CodedBlock encode(const Field& field, const std::vector<SourceVector>& sources,
                  std::vector<Symbol> coefficients, std::uint64_t block_id) {
  if (coefficients.size() != sources.size())
    throw DimensionMismatch("encode: coefficient count differs from source count");
  CodedBlock block;
  block.block_id = block_id;
  block.coefficients = std::move(coefficients);
  const std::size_t n = sources.empty() ? 0 : sources.front().symbols.size();
  block.payload.assign(n, 0);
  for (std::size_t i = 0; i < sources.size(); ++i)
    kernels::axpy(field, block.payload, sources[i].symbols, block.coefficients[i]);
  return block;
}

CodedBlock encode_random(const Field& field, const std::vector<SourceVector>& sources,
                         const GenerationRef& gen, RngStream& rng) {
  std::vector<Symbol> coeffs(sources.size());
  for (auto& c : coeffs) c = static_cast<Symbol>(rng.next_below(field.order()));
  CodedBlock block = encode(field, sources, std::move(coeffs), rng.next_u64());
  block.gen = gen;
  return block;
}

CodedBlock recode_with(const Field& field, std::span<const CodedBlock> blocks,
                       std::span<const Symbol> weights, std::uint64_t block_id) {
  if (blocks.empty()) throw DimensionMismatch("recode: no input blocks");
  if (weights.size() != blocks.size())
    throw DimensionMismatch("recode: one weight per input block required");
  const GenerationRef& gen = blocks.front().gen;
  for (const auto& b : blocks)
    if (!(b.gen == gen)) throw GenerationMismatch();

  CodedBlock out;
  out.gen = gen;
  out.block_id = block_id;
  out.coefficients.assign(gen.block_count, 0);
  out.payload.assign(gen.symbols_per_block, 0);
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    kernels::axpy(field, out.coefficients, blocks[k].coefficients, weights[k]);
    kernels::axpy(field, out.payload, blocks[k].payload, weights[k]);
  }
  return out;
}

CodedBlock recode(const Field& field, std::span<const CodedBlock> blocks, RngStream& rng) {
  if (blocks.empty()) throw DimensionMismatch("recode: no input blocks");
  std::vector<Symbol> weights(blocks.size());
  for (auto& w : weights) w = static_cast<Symbol>(rng.next_below(field.order()));
  return recode_with(field, blocks, weights, rng.next_u64());
}

Verdict DecoderState::absorb(const CodedBlock& block, NodeId sender) {
  if (!(block.gen == gen_)) throw GenerationMismatch();
  assert(field_ != nullptr);
  const Field& f = *field_;
  const std::size_t m = gen_.block_count;

  std::vector<Symbol> coeffs = block.coefficients;
  std::vector<Symbol> payload = block.payload;

  // Forward-reduce against existing pivots (rows are normalized to pivot 1).
  for (const Row& row : rows_) {
    const Symbol factor = coeffs[row.pivot];
    if (factor == 0) continue;
    const Symbol neg = f.neg(factor);
    kernels::axpy(f, coeffs, row.coeffs, neg);
    kernels::axpy(f, payload, row.payload, neg);
  }

  std::size_t pivot = m;
  for (std::size_t i = 0; i < m; ++i)
    if (coeffs[i] != 0) {
      pivot = i;
      break;
    }
  if (pivot == m) return Verdict::Redundant;

  const Symbol scale = f.inv(coeffs[pivot]);
  kernels::scale(f, coeffs, scale);
  kernels::scale(f, payload, scale);

  // Back-eliminate the new pivot from stored rows to keep full RREF.
  for (Row& row : rows_) {
    const Symbol factor = row.coeffs[pivot];
    if (factor == 0) continue;
    const Symbol neg = f.neg(factor);
    kernels::axpy(f, row.coeffs, coeffs, neg);
    kernels::axpy(f, row.payload, payload, neg);
  }

  Row row;
  row.pivot = pivot;
  row.coeffs = std::move(coeffs);
  row.payload = std::move(payload);
  row.sender = sender;
  row.signer = block.provenance.block.signer;
  row.block_id = block.block_id;
  auto pos = std::lower_bound(rows_.begin(), rows_.end(), pivot,
                              [](const Row& r, std::size_t p) { return r.pivot < p; });
  rows_.insert(pos, std::move(row));
  return Verdict::Innovative;
}

std::vector<std::uint8_t> DecoderState::decode(const Generation& gen) const {
  if (!full()) throw RankDeficient();
  std::vector<std::uint8_t> out;
  out.reserve(gen.block_count * gen.symbols_per_block);
  for (const Row& row : rows_)
    for (Symbol s : row.payload) out.push_back(static_cast<std::uint8_t>(s & 0xff));
  out.resize(gen.original_length);
  return out;
}

std::vector<SourceVector> DecoderState::recovered_sources() const {
  if (!full()) throw RankDeficient();
  std::vector<SourceVector> sources(rows_.size());
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    sources[i].index = rows_[i].pivot;
    sources[i].symbols = rows_[i].payload;
  }
  return sources;
}

std::vector<std::uint8_t> batch_decode(const Field& field, const Generation& gen,
                                       std::span<const CodedBlock> blocks) {
  const std::size_t m = gen.block_count;
  const std::size_t n = gen.symbols_per_block;
  if (blocks.size() != m) throw DimensionMismatch("batch_decode: exactly m blocks required");

  // Gauss-Jordan on the augmented system [E | B], serial by design.
  std::vector<std::vector<Symbol>> e(m), b(m);
  for (std::size_t r = 0; r < m; ++r) {
    if (!(blocks[r].gen == ref_of(gen))) throw GenerationMismatch();
    e[r] = blocks[r].coefficients;
    b[r] = blocks[r].payload;
  }

  for (std::size_t col = 0; col < m; ++col) {
    std::size_t pivot_row = col;
    while (pivot_row < m && e[pivot_row][col] == 0) ++pivot_row;
    if (pivot_row == m) throw RankDeficient();
    std::swap(e[col], e[pivot_row]);
    std::swap(b[col], b[pivot_row]);

    const Symbol inv = field.inv(e[col][col]);
    kernels::serial::scale(field, e[col], inv);
    kernels::serial::scale(field, b[col], inv);
    for (std::size_t r = 0; r < m; ++r) {
      if (r == col || e[r][col] == 0) continue;
      const Symbol neg = field.neg(e[r][col]);
      kernels::serial::axpy(field, e[r], e[col], neg);
      kernels::serial::axpy(field, b[r], b[col], neg);
    }
  }

  std::vector<std::uint8_t> out;
  out.reserve(m * n);
  for (std::size_t r = 0; r < m; ++r)
    for (Symbol s : b[r]) out.push_back(static_cast<std::uint8_t>(s & 0xff));
  out.resize(gen.original_length);
  return out;
}

std::size_t coded_block_wire_bytes(const Field& field, const GenerationRef& gen) {
  const std::size_t symbol_bytes = field.order() <= 256 ? 1 : 2;
  // file id digest 8 + m 2 + n 2 + block id 8 + signature chain 2*(2+8+8)
  const std::size_t header = 8 + 2 + 2 + 8 + 36;
  return header + symbol_bytes * (gen.block_count + gen.symbols_per_block);
}

}  // namespace cbnc::rlnc
