#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cbnc/field.hpp"
#include "cbnc/rng.hpp"
#include "cbnc/signature.hpp"

namespace cbnc::rlnc {

// A single generation: the m source vectors a file is coded over.
struct Generation {
  std::string file_id;
  std::size_t block_count = 0;       // m
  std::size_t symbols_per_block = 0; // n
  std::size_t original_length = 0;   // bytes before padding
  Digest file_digest = 0;
};

struct GenerationRef {
  std::string file_id;
  std::size_t block_count = 0;
  std::size_t symbols_per_block = 0;

  bool operator==(const GenerationRef&) const = default;
};

inline GenerationRef ref_of(const Generation& g) {
  return {g.file_id, g.block_count, g.symbols_per_block};
}

struct SourceVector {
  std::size_t index = 0;
  std::vector<Symbol> symbols;
};

struct CodedBlock {
  GenerationRef gen;
  std::uint64_t block_id = 0;
  std::vector<Symbol> coefficients;  // length m
  std::vector<Symbol> payload;       // length n
  SignatureChain provenance;
};

enum class Verdict { Innovative, Redundant };

// Accumulates coefficient rows in reduced row-echelon form. One Gaussian
// elimination step per absorbed block gives an immediate innovativeness
// verdict; at rank m the payload rows are the source vectors in order.
class DecoderState {
 public:
  struct Row {
    std::size_t pivot = 0;
    std::vector<Symbol> coeffs;
    std::vector<Symbol> payload;
    NodeId sender = kNoNode;  // immediate sender that contributed the row
    NodeId signer = kNoNode;  // block signer at absorb time, if any
    std::uint64_t block_id = 0;
  };

  DecoderState() = default;
  DecoderState(GenerationRef gen, const Field* field) : gen_(std::move(gen)), field_(field) {}

  Verdict absorb(const CodedBlock& block, NodeId sender = kNoNode);

  std::size_t rank() const { return rows_.size(); }
  bool full() const { return rank() == gen_.block_count && gen_.block_count > 0; }
  const GenerationRef& generation() const { return gen_; }
  const std::vector<Row>& rows() const { return rows_; }

  // Requires full rank; returns original_length bytes.
  std::vector<std::uint8_t> decode(const Generation& gen) const;

  // Source vectors recovered at full rank (for full-cache recoding).
  std::vector<SourceVector> recovered_sources() const;

  void reset() { rows_.clear(); }

 private:
  GenerationRef gen_;
  const Field* field_ = nullptr;
  std::vector<Row> rows_;  // sorted by pivot column
};

// Splits bytes into m vectors of n = ceil(len/m) symbols, zero-padded.
// One byte per symbol; requires field order > 255.
std::pair<Generation, std::vector<SourceVector>> segment(std::span<const std::uint8_t> file_bytes,
                                                         std::size_t block_count,
                                                         const Field& field,
                                                         const std::string& file_id);

CodedBlock encode(const Field& field, const std::vector<SourceVector>& sources,
                  std::vector<Symbol> coefficients, std::uint64_t block_id = 0);

CodedBlock encode_random(const Field& field, const std::vector<SourceVector>& sources,
                         const GenerationRef& gen, RngStream& rng);

// Random combination of the inputs; the output lies in their span.
CodedBlock recode(const Field& field, std::span<const CodedBlock> blocks, RngStream& rng);

CodedBlock recode_with(const Field& field, std::span<const CodedBlock> blocks,
                       std::span<const Symbol> weights, std::uint64_t block_id);

// Serial batch-inversion reference: E^-1 * B from exactly m independent
// blocks. Kept as the oracle the incremental decoder is checked against.
std::vector<std::uint8_t> batch_decode(const Field& field, const Generation& gen,
                                       std::span<const CodedBlock> blocks);

// Wire size of a coded data block in bytes (header + coefficients + payload);
// the encoding-vector overhead is charged explicitly.
std::size_t coded_block_wire_bytes(const Field& field, const GenerationRef& gen);

}  // namespace cbnc::rlnc
