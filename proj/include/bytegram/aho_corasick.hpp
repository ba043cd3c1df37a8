#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bytegram/bytes.hpp"

namespace bytegram {

// Byte-alphabet Aho-Corasick automaton. The root keeps a dense 256-entry
// goto table; every other node stores its edges sorted in a shared array,
// which keeps memory proportional to total pattern bytes.
class AhoCorasick {
 public:
  static constexpr std::uint32_t kNone = 0xffffffffu;

  // Throws BuildError on an empty or duplicate pattern.
  explicit AhoCorasick(std::span<const Gram> patterns);

  std::size_t pattern_count() const { return pattern_lengths_.size(); }
  std::size_t node_count() const { return fail_.size(); }

  // Calls on_match(pattern_id, start_offset) for every occurrence,
  // overlapping ones included, in order of end offset.
  template <typename OnMatch>
  void scan(ByteView text, OnMatch&& on_match) const {
    scan(text, [](Byte) {}, on_match);
  }

  // Same, also calling on_byte(b) for every input byte in the same pass.
  template <typename OnByte, typename OnMatch>
  void scan(ByteView text, OnByte&& on_byte, OnMatch&& on_match) const {
    std::uint32_t state = 0;
    for (std::size_t i = 0; i < text.size(); ++i) {
      on_byte(text[i]);
      state = next_state(state, text[i]);
      for (std::uint32_t node = state_output(state); node != kNone; node = dict_link_[node]) {
        const std::uint32_t id = output_[node];
        on_match(id, i + 1 - pattern_lengths_[id]);
      }
    }
  }

  // Occurrence count of every pattern in text.
  std::vector<std::uint32_t> count(ByteView text) const;

 private:
  std::uint32_t child(std::uint32_t node, Byte b) const;
  std::uint32_t next_state(std::uint32_t state, Byte b) const {
    while (state != 0) {
      std::uint32_t c = child(state, b);
      if (c != kNone) return c;
      state = fail_[state];
    }
    return root_goto_[b];
  }
  // First node on the suffix chain of `state` (itself included) that ends a pattern.
  std::uint32_t state_output(std::uint32_t state) const {
    return output_[state] != kNone ? state : dict_link_[state];
  }

  std::array<std::uint32_t, 256> root_goto_{};
  std::vector<std::uint32_t> edge_begin_;  // per node, index into edge arrays; size nodes+1
  std::vector<Byte> edge_byte_;
  std::vector<std::uint32_t> edge_target_;
  std::vector<std::uint32_t> fail_;
  std::vector<std::uint32_t> output_;     // pattern id ending exactly here, or kNone
  std::vector<std::uint32_t> dict_link_;  // nearest proper-suffix node with an output
  std::vector<std::uint32_t> pattern_lengths_;
};

}  // namespace bytegram
