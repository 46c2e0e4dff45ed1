#pragma once

#include <optional>
#include <variant>

#include "cbnc/node.hpp"

namespace cbnc::proto {

// The four dissemination strategies as serve/verify policies over a node's
// per-file state. Serving decides whether a transmission is a verbatim
// forward, a fresh recode, or a reassemble-then-recode; verification decides
// whether an arriving block may enter the decoder.

// Source emissions: the raw blocks for no-coding, otherwise `count` fresh
// publisher-signed random encodings.
std::vector<DataMsg> produce_at_source(Node& node, const std::string& file, std::size_t count);

// One block served per the node's strategy, target-aware when a target is
// known (skips content the target is known to hold). nullopt when the node
// has nothing to serve. The attacker's corruption is applied here.
std::optional<DataMsg> serve_block(Node& node, const std::string& file,
                                   std::optional<NodeId> target);

enum class ReceiveVerdict { AcceptAbsorb, Drop };

// no_coding: raw digest against the manifest. source_only/full_cache: block
// signature valid and signer/sender not blacklisted (source_only additionally
// requires the publisher as signer). unrestricted: accept always.
ReceiveVerdict verify_incoming(Node& node, const DataMsg& data, NodeId sender);

// True when the node could serve something for this file right now.
bool servable(const Node& node, const std::string& file);

}  // namespace cbnc::proto
