#include "cbnc/message.hpp"

namespace cbnc::proto {

const char* kind_name(const Message& msg) {
  if (std::holds_alternative<InterestMsg>(msg.body)) return "interest";
  if (std::holds_alternative<RequestMsg>(msg.body)) return "request";
  if (std::holds_alternative<SummaryMsg>(msg.body)) return "summary";
  if (std::holds_alternative<RtsbMsg>(msg.body)) return "rtsb";
  if (std::holds_alternative<RtsbReplyMsg>(msg.body)) return "rtsb_reply";
  if (std::holds_alternative<DataMsg>(msg.body)) return "data";
  return "ack";
}

std::size_t wire_bytes(const Message& msg, const Field& field) {
  constexpr std::size_t kHeader = 3;  // type + sender
  constexpr std::size_t kName = 16;   // file ref + block id
  if (const auto* m = std::get_if<InterestMsg>(&msg.body))
    return kHeader + m->names.wire_bytes() + 1;
  if (const auto* m = std::get_if<RequestMsg>(&msg.body))
    return kHeader + m->names.wire_bytes();
  if (const auto* m = std::get_if<SummaryMsg>(&msg.body))
    return kHeader + m->view.wire_bytes();
  if (std::holds_alternative<RtsbMsg>(msg.body)) return kHeader + kName + 2;
  if (std::holds_alternative<RtsbReplyMsg>(msg.body)) return kHeader + kName + 2 + 1;
  if (const auto* m = std::get_if<DataMsg>(&msg.body)) {
    if (const auto* coded = std::get_if<rlnc::CodedBlock>(&m->block))
      return kHeader + 2 + rlnc::coded_block_wire_bytes(field, coded->gen);
    const auto& plain = std::get<PlainBlock>(m->block);
    const std::size_t symbol_bytes = field.order() <= 256 ? 1 : 2;
    // file ref + index + origin signature + payload
    return kHeader + 2 + 8 + 4 + 18 + symbol_bytes * plain.symbols.size();
  }
  return kHeader + kName + 2;  // ack
}

}  // namespace cbnc::proto
