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

#include "pekit/retrieval.hpp"

#include <algorithm>
#include <cstdint>
#include <exception>
#include <mutex>

#include "pekit/error.hpp"

namespace pekit {
namespace {

bool valid_threshold(double t) { return t > -1.0 && t <= 1.0; }

}  // namespace

void RetrievalConfig::validate() const {
  if (!valid_threshold(tau)) fail(Errc::invalid_argument, "retrieval: tau must be in (-1, 1]");
  for (const auto& [id, t] : per_object_tau) {
    if (!valid_threshold(t)) {
      fail(Errc::invalid_argument, "retrieval: threshold for '" + id + "' must be in (-1, 1]");
    }
  }
}

double RetrievalConfig::threshold_for(const std::string& object_id) const {
  auto it = per_object_tau.find(object_id);
  return it == per_object_tau.end() ? tau : it->second;
}

std::optional<Match> match_proposal(const InstanceEmbedding& e, const MemoryStore& store,
                                    const RetrievalConfig& cfg) {
  auto best = store.best_match(e);
  if (!best) return std::nullopt;
  // Strictly greater: a score equal to the threshold is a miss.
  if (!(best->score > cfg.threshold_for(best->object_id))) return std::nullopt;
  return Match{best->object_id, best->score};
}

std::vector<DetectedInstance> retrieve_instances(const std::vector<ProposalEmbedding>& proposals,
                                                 const MemoryStore& store,
                                                 const RetrievalConfig& cfg) {
  cfg.validate();
  std::vector<std::optional<Match>> matches(proposals.size());
  std::exception_ptr error;
  std::mutex error_mutex;
  const auto n = static_cast<std::int64_t>(proposals.size());
#pragma omp parallel for schedule(dynamic) if (n > 8)
  for (std::int64_t i = 0; i < n; ++i) {
    try {
      matches[i] = match_proposal(proposals[i].embedding, store, cfg);
    } catch (...) {
      std::lock_guard lock(error_mutex);
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);

  struct Hit {
    std::size_t proposal;
    Match match;
  };
  std::vector<Hit> hits;
  for (std::size_t i = 0; i < matches.size(); ++i) {
    if (matches[i]) hits.push_back({i, *matches[i]});
  }
  // Descending score, then proposal order.
  std::stable_sort(hits.begin(), hits.end(),
                   [](const Hit& a, const Hit& b) { return a.match.score > b.match.score; });
  if (cfg.dedupe_per_object) {
    std::vector<Hit> kept;
    for (const auto& h : hits) {
      const bool seen = std::any_of(kept.begin(), kept.end(), [&](const Hit& k) {
        return k.match.object_id == h.match.object_id;
      });
      if (!seen) kept.push_back(h);
    }
    hits = std::move(kept);
  }

  std::vector<DetectedInstance> out;
  out.reserve(hits.size());
  for (const auto& h : hits) {
    auto entry = store.find(h.match.object_id);
    if (!entry) continue;  // removed concurrently
    out.push_back({proposals[h.proposal].bbox, entry->id, entry->name, entry->context,
                   h.match.score, -1});
  }
  return out;
}

}  // namespace pekit
