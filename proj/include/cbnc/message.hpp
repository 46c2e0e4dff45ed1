#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "cbnc/naming.hpp"
#include "cbnc/rlnc.hpp"

namespace cbnc::proto {

// Uncoded data unit (no-coding strategy); integrity comes from the per-block
// digest manifest published with the file metadata.
struct PlainBlock {
  std::string file;
  std::uint32_t index = 0;
  std::vector<Symbol> symbols;
};

struct InterestMsg {
  naming::BloomFilter names;
  int ttl = 0;
};

struct RequestMsg {
  naming::BloomFilter names;
};

struct SummaryMsg {
  naming::CacheSummaryView view;
};

struct RtsbMsg {
  naming::ContentName name;
  NodeId target = kNoNode;
};

enum class RejectCode { BlockAlreadyReceived = 1, FileAlreadyReceived = 2, BeingSentByOther = 3 };

struct RtsbReplyMsg {
  naming::ContentName name;
  NodeId target = kNoNode;  // the offerer this reply answers
  bool accept = false;
  RejectCode code = RejectCode::BlockAlreadyReceived;
};

struct DataMsg {
  NodeId target = kNoNode;  // kNoNode in pure-broadcast mode
  std::variant<rlnc::CodedBlock, PlainBlock> block;
};

struct AckMsg {
  naming::ContentName name;
  NodeId to = kNoNode;  // the sender being acknowledged
};

using Body =
    std::variant<InterestMsg, RequestMsg, SummaryMsg, RtsbMsg, RtsbReplyMsg, DataMsg, AckMsg>;

// Every message is physically broadcast; logical addressing lives in the body.
struct Message {
  NodeId sender = kNoNode;
  Body body;
};

const char* kind_name(const Message& msg);
std::size_t wire_bytes(const Message& msg, const Field& field);

inline naming::ContentName name_of(const DataMsg& data) {
  if (std::holds_alternative<rlnc::CodedBlock>(data.block)) {
    const auto& b = std::get<rlnc::CodedBlock>(data.block);
    return {b.gen.file_id, b.block_id};
  }
  const auto& p = std::get<PlainBlock>(data.block);
  return {p.file, p.index};
}

}  // namespace cbnc::proto
