// Copyright 2026 The PeKit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pekit/features.hpp"
#include "pekit/memory.hpp"

namespace pekit {

inline constexpr double kDefaultTau = 0.75;

struct RetrievalConfig {
  double tau = kDefaultTau;
  std::map<std::string, double> per_object_tau;
  bool dedupe_per_object = true;

  /// Throws Errc::invalid_argument unless every threshold is in (-1, 1].
  void validate() const;
  double threshold_for(const std::string& object_id) const;
};

struct Match {
  std::string object_id;
  double score = 0.0;
};

struct DetectedInstance {
  BoundingBox bbox;
  std::string object_id;
  std::string name;
  std::string context;
  double score = 0.0;
  int color_slot = -1;  // filled by assign_colors
};

struct ProposalEmbedding {
  BoundingBox bbox;
  InstanceEmbedding embedding;
};

/// Top object for `e` if its best-view score is strictly above that object's
/// threshold; std::nullopt otherwise (including an empty store).
std::optional<Match> match_proposal(const InstanceEmbedding& e, const MemoryStore& store,
                                    const RetrievalConfig& cfg);

/// Matches every proposal, optionally keeps the best proposal per object
/// (earlier proposal wins ties) and sorts by descending score.
std::vector<DetectedInstance> retrieve_instances(const std::vector<ProposalEmbedding>& proposals,
                                                 const MemoryStore& store,
                                                 const RetrievalConfig& cfg);

}  // namespace pekit
