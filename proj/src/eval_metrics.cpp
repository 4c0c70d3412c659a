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

#include <cmath>
#include <cstdio>
#include <map>

#include "pekit/error.hpp"
#include "pekit/eval.hpp"

namespace pekit::eval {
namespace {

struct Counts {
  std::size_t hit = 0;
  std::size_t total = 0;
};

double pct(std::size_t num, std::size_t den) {
  return 100.0 * static_cast<double>(num) / static_cast<double>(den);
}

std::optional<double> pct_if_any(const Counts& c) {
  if (c.total == 0) return std::nullopt;
  return pct(c.hit, c.total);
}

// Mean over the objects that report the value.
std::optional<double> macro(const std::vector<std::optional<double>>& values) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& v : values) {
    if (v) {
      sum += *v;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

bool is_word_byte(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
         c == '_' || c >= 0x80;
}

}  // namespace

std::string_view to_string(Split split) {
  switch (split) {
    case Split::positive: return "positive";
    case Split::hard_negative: return "hard_negative";
    case Split::other: return "other";
    case Split::fake: return "fake";
  }
  return "positive";
}

double weighted_accuracy(double positive_acc, double negative_acc) {
  return (positive_acc + negative_acc) / 2.0;
}

double average_visual_recognition(double precision, double positive_acc,
                                  std::optional<double> other, std::optional<double> hard,
                                  std::optional<double> fake) {
  double sum = precision + positive_acc;
  int n = 2;
  for (const auto& v : {other, hard, fake}) {
    if (v) {
      sum += *v;
      ++n;
    }
  }
  return sum / n;
}

MetricsReport recognition_metrics(const std::vector<RecognitionOutcome>& outcomes) {
  struct PerObject {
    Counts positive;  // hit = detected
    Counts pooled;    // hit = rejected
    Counts other, hard, fake;
    std::size_t false_positive = 0;
  };
  std::map<std::string, PerObject> by_object;
  for (const auto& o : outcomes) {
    auto& acc = by_object[o.object_id];
    if (o.ground_truth_present()) {
      ++acc.positive.total;
      if (o.predicted_present) ++acc.positive.hit;
      continue;
    }
    Counts* split = o.split == Split::hard_negative ? &acc.hard
                    : o.split == Split::other       ? &acc.other
                                                    : &acc.fake;
    ++split->total;
    ++acc.pooled.total;
    if (o.predicted_present) {
      ++acc.false_positive;
    } else {
      ++split->hit;
      ++acc.pooled.hit;
    }
  }

  MetricsReport report;
  std::vector<std::optional<double>> precision, positive, pooled, other, hard, fake;
  for (const auto& [id, acc] : by_object) {
    if (acc.positive.total == 0 || acc.pooled.total == 0) {
      fail(Errc::invalid_argument,
           "recognition metrics: object '" + id + "' needs at least one positive and one negative");
    }
    ObjectRecognition r;
    r.object_id = id;
    r.true_positive = acc.positive.hit;
    r.false_negative = acc.positive.total - acc.positive.hit;
    r.true_negative = acc.pooled.hit;
    r.false_positive = acc.false_positive;
    const std::size_t predicted = r.true_positive + r.false_positive;
    // No positive predictions means no wrong personalization.
    r.precision = predicted == 0 ? 100.0 : pct(r.true_positive, predicted);
    r.positive_acc = pct(acc.positive.hit, acc.positive.total);
    r.negative_acc.pooled = pct(acc.pooled.hit, acc.pooled.total);
    r.negative_acc.other = pct_if_any(acc.other);
    r.negative_acc.hard = pct_if_any(acc.hard);
    r.negative_acc.fake = pct_if_any(acc.fake);

    precision.push_back(r.precision);
    positive.push_back(r.positive_acc);
    pooled.push_back(r.negative_acc.pooled);
    other.push_back(r.negative_acc.other);
    hard.push_back(r.negative_acc.hard);
    fake.push_back(r.negative_acc.fake);
    report.per_object.push_back(std::move(r));
  }
  if (report.per_object.empty()) {
    fail(Errc::invalid_argument, "recognition metrics: no outcomes");
  }

  report.precision = *macro(precision);
  report.positive_acc = *macro(positive);
  report.negative_acc_by_split.pooled = *macro(pooled);
  report.negative_acc_by_split.other = macro(other);
  report.negative_acc_by_split.hard = macro(hard);
  report.negative_acc_by_split.fake = macro(fake);
  report.weighted_acc =
      weighted_accuracy(report.positive_acc, report.negative_acc_by_split.pooled);
  report.avg_visual_recognition = average_visual_recognition(
      report.precision, report.positive_acc, report.negative_acc_by_split.other,
      report.negative_acc_by_split.hard, report.negative_acc_by_split.fake);
  return report;
}

std::optional<char> parse_choice(std::string_view answer) {
  for (std::size_t i = 0; i < answer.size(); ++i) {
    const char c = answer[i];
    if (c != 'a' && c != 'b' && c != 'A' && c != 'B') continue;
    const bool left_ok = i == 0 || !is_word_byte(static_cast<unsigned char>(answer[i - 1]));
    const bool right_ok =
        i + 1 == answer.size() || !is_word_byte(static_cast<unsigned char>(answer[i + 1]));
    if (left_ok && right_ok) return (c == 'a' || c == 'A') ? 'A' : 'B';
  }
  return std::nullopt;
}

double vqa_accuracy(const std::vector<std::string>& model_answers, const std::vector<char>& gold) {
  if (model_answers.size() != gold.size()) {
    fail(Errc::invalid_argument, "vqa: answers and gold labels differ in length");
  }
  if (gold.empty()) return 0.0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const auto parsed = parse_choice(model_answers[i]);
    if (parsed && *parsed == gold[i]) ++correct;
  }
  return pct(correct, gold.size());
}

std::string normalize_for_match(std::string_view text) {
  // UTF-8 apostrophe look-alikes folded to '\''.
  static const std::pair<std::string_view, char> kFold[] = {
      {"\xE2\x80\x98", '\''},  // left single quotation mark
      {"\xE2\x80\x99", '\''},  // right single quotation mark
      {"\xE2\x80\x9B", '\''},  // single high-reversed-9 quotation mark
      {"\xE2\x80\xB2", '\''},  // prime
      {"\xCA\xBC", '\''},      // modifier letter apostrophe
      {"\xC2\xB4", '\''},      // acute accent
      {"`", '\''},
  };
  std::string out;
  bool pending_space = false;
  std::size_t i = 0;
  while (i < text.size()) {
    bool folded = false;
    for (const auto& [seq, repl] : kFold) {
      if (text.substr(i).starts_with(seq)) {
        if (pending_space && !out.empty()) out.push_back(' ');
        pending_space = false;
        out.push_back(repl);
        i += seq.size();
        folded = true;
        break;
      }
    }
    if (folded) continue;
    const auto c = static_cast<unsigned char>(text[i++]);
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v') {
      pending_space = true;
      continue;
    }
    if (pending_space && !out.empty()) out.push_back(' ');
    pending_space = false;
    out.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c | 0x20) : static_cast<char>(c));
  }
  return out;
}

bool caption_mentions(std::string_view caption, std::string_view name) {
  const auto needle = normalize_for_match(name);
  if (needle.empty()) return false;
  return normalize_for_match(caption).find(needle) != std::string::npos;
}

double personalization_recall(const std::vector<CaptionSet>& per_object) {
  std::vector<std::optional<double>> rates;
  for (const auto& set : per_object) {
    if (set.captions.empty()) continue;
    std::size_t hits = 0;
    for (const auto& c : set.captions) {
      if (caption_mentions(c, set.name)) ++hits;
    }
    rates.push_back(pct(hits, set.captions.size()));
  }
  return macro(rates).value_or(0.0);
}

double round_half_up(double value, int decimals) {
  const double scale = std::pow(10.0, decimals);
  // The epsilon absorbs binary representation error such as 93.7499999999.
  return std::floor(value * scale + 0.5 + 1e-9) / scale;
}

namespace {

nlohmann::ordered_json opt(const std::optional<double>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

nlohmann::ordered_json negative_json(const NegativeAccuracy& n) {
  return {{"other", opt(n.other)},
          {"hard", opt(n.hard)},
          {"fake", opt(n.fake)},
          {"pooled", n.pooled}};
}

std::string cell(const std::optional<double>& v) {
  if (!v) return "      -";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%7.1f", round_half_up(*v, 1));
  return buf;
}

}  // namespace

nlohmann::ordered_json report_to_json(const MetricsReport& report) {
  nlohmann::ordered_json j;
  j["precision"] = report.precision;
  j["positive_acc"] = report.positive_acc;
  j["negative_acc_by_split"] = negative_json(report.negative_acc_by_split);
  j["weighted_acc"] = report.weighted_acc;
  j["avg_visual_recognition"] = report.avg_visual_recognition;
  j["vqa_acc"] = opt(report.vqa_acc);
  j["personalization_recall"] = opt(report.personalization_recall);
  j["per_object"] = nlohmann::ordered_json::array();
  for (const auto& o : report.per_object) {
    j["per_object"].push_back({{"object_id", o.object_id},
                               {"true_positive", o.true_positive},
                               {"false_negative", o.false_negative},
                               {"true_negative", o.true_negative},
                               {"false_positive", o.false_positive},
                               {"precision", o.precision},
                               {"positive_acc", o.positive_acc},
                               {"negative_acc_by_split", negative_json(o.negative_acc)}});
  }
  return j;
}

std::string report_table(const MetricsReport& report) {
  const auto& n = report.negative_acc_by_split;
  std::string out;
  out += "Precision Positive Negative Weighted\n";
  out += cell(report.precision) + "  " + cell(report.positive_acc) + "  " + cell(n.pooled) +
         "  " + cell(report.weighted_acc) + "\n\n";
  out += "Precision Positive   Other    Hard    Fake    Avg.\n";
  out += cell(report.precision) + "  " + cell(report.positive_acc) + " " + cell(n.other) + " " +
         cell(n.hard) + " " + cell(n.fake) + " " + cell(report.avg_visual_recognition) + "\n";
  if (report.vqa_acc || report.personalization_recall) {
    out += "\n    VQA  Personal. Recall\n";
    out += cell(report.vqa_acc) + "  " + cell(report.personalization_recall) + "\n";
  }
  return out;
}

}  // namespace pekit::eval
