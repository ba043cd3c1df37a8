#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bytegram/bundle.hpp"
#include "bytegram/selector.hpp"

namespace bytegram {

struct ExplainEntry {
  std::size_t feature = 0;  // index into ModelBundle::features
  double score = 0.0;       // pair gain, or summed gain for a family section
};

struct PairSection {
  FamilyPair pair;
  std::vector<ExplainEntry> entries;  // score descending, canonical gram order on ties
};

struct FamilySection {
  std::size_t family = 0;
  std::vector<ExplainEntry> entries;
};

struct ExplainReport {
  std::vector<PairSection> pairs;
  std::vector<FamilySection> families;
};

// For each requested pair (all pairs by default), the top_n surviving
// features tagged with it. For each involved family, the top_n features it
// is an origin of, ranked by gain summed over its pairs. Throws LookupError
// on an unknown family name.
ExplainReport explain(const ModelBundle& bundle,
                      const std::optional<std::pair<std::string, std::string>>& pair, std::size_t top_n);

std::string render_text(const ExplainReport& report, const ModelBundle& bundle);
// `# pair a|b` / `# family a` headers followed by features dump lines.
std::string render_tsv(const ExplainReport& report, const ModelBundle& bundle);

}  // namespace bytegram
