#include "bytegram/aho_corasick.hpp"

#include <algorithm>
#include <map>
#include <queue>

#include "bytegram/error.hpp"

namespace bytegram {

AhoCorasick::AhoCorasick(std::span<const Gram> patterns) {
  // Trie with per-node sorted child lists while building.
  std::vector<std::vector<std::pair<Byte, std::uint32_t>>> children(1);
  std::vector<std::uint32_t> output(1, kNone);
  pattern_lengths_.reserve(patterns.size());

  for (std::size_t id = 0; id < patterns.size(); ++id) {
    const Gram& p = patterns[id];
    if (p.empty()) throw BuildError("empty pattern at index " + std::to_string(id));
    std::uint32_t node = 0;
    for (char ch : p) {
      const auto b = static_cast<Byte>(ch);
      auto& kids = children[node];
      auto it = std::lower_bound(kids.begin(), kids.end(), b,
                                 [](const auto& e, Byte key) { return e.first < key; });
      if (it != kids.end() && it->first == b) {
        node = it->second;
      } else {
        auto fresh = static_cast<std::uint32_t>(children.size());
        kids.insert(it, {b, fresh});
        children.emplace_back();
        output.push_back(kNone);
        node = fresh;
      }
    }
    if (output[node] != kNone) throw BuildError("duplicate pattern " + to_hex(p));
    output[node] = static_cast<std::uint32_t>(id);
    pattern_lengths_.push_back(static_cast<std::uint32_t>(p.size()));
  }

  const std::size_t nodes = children.size();
  edge_begin_.assign(nodes + 1, 0);
  for (std::size_t n = 0; n < nodes; ++n) {
    edge_begin_[n + 1] = edge_begin_[n] + static_cast<std::uint32_t>(children[n].size());
  }
  edge_byte_.reserve(edge_begin_.back());
  edge_target_.reserve(edge_begin_.back());
  for (const auto& kids : children) {
    for (auto [b, t] : kids) {
      edge_byte_.push_back(b);
      edge_target_.push_back(t);
    }
  }
  output_ = std::move(output);
  fail_.assign(nodes, 0);
  dict_link_.assign(nodes, kNone);

  root_goto_.fill(0);
  std::queue<std::uint32_t> queue;
  for (auto [b, t] : children[0]) {
    root_goto_[b] = t;
    queue.push(t);
  }
  // Breadth-first: a node's failure target is always shallower, so it is
  // final by the time the node is dequeued.
  while (!queue.empty()) {
    std::uint32_t node = queue.front();
    queue.pop();
    const std::uint32_t f = fail_[node];
    dict_link_[node] = output_[f] != kNone ? f : dict_link_[f];
    for (auto [b, t] : children[node]) {
      fail_[t] = next_state(f, b);
      queue.push(t);
    }
  }
}

std::uint32_t AhoCorasick::child(std::uint32_t node, Byte b) const {
  const std::uint32_t lo = edge_begin_[node];
  const std::uint32_t hi = edge_begin_[node + 1];
  if (hi - lo <= 8) {
    for (std::uint32_t e = lo; e < hi; ++e) {
      if (edge_byte_[e] == b) return edge_target_[e];
    }
    return kNone;
  }
  auto first = edge_byte_.begin() + lo;
  auto last = edge_byte_.begin() + hi;
  auto it = std::lower_bound(first, last, b);
  if (it != last && *it == b) return edge_target_[static_cast<std::size_t>(it - edge_byte_.begin())];
  return kNone;
}

std::vector<std::uint32_t> AhoCorasick::count(ByteView text) const {
  std::vector<std::uint32_t> counts(pattern_count(), 0);
  scan(text, [&](std::uint32_t id, std::size_t) { ++counts[id]; });
  return counts;
}

}  // namespace bytegram
