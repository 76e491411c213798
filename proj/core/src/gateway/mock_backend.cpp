// Copyright 2026 The pipebench Authors
// SPDX-License-Identifier: Apache-2.0

#include "pipebench/gateway/mock_backend.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "pipebench/common/text.hpp"
#include "pipebench/gateway/prompts.hpp"
#include "pipebench/gateway/reply.hpp"

namespace pipebench::gateway {
namespace {

using WordSet = std::set<std::string>;

WordSet word_set(std::string_view s) {
  auto w = text::words(s);
  return {w.begin(), w.end()};
}

double jaccard(const WordSet& a, const WordSet& b) {
  if (a.empty() && b.empty()) return 1.0;
  std::size_t inter = 0;
  for (const auto& w : a) inter += b.count(w);
  return static_cast<double>(inter) / static_cast<double>(a.size() + b.size() - inter);
}

// Fraction of `ref` words present in `cand`.
double coverage(const WordSet& ref, const WordSet& cand) {
  if (ref.empty()) return 0.0;
  std::size_t inter = 0;
  for (const auto& w : ref) inter += cand.count(w);
  return static_cast<double>(inter) / static_cast<double>(ref.size());
}

std::string var(const GenerationRequest& r, const std::string& key) {
  auto it = r.vars.find(key);
  return it == r.vars.end() ? std::string() : it->second;
}

std::size_t var_count(const GenerationRequest& r, const std::string& key) {
  auto v = reply::integer(var(r, key));
  return v && *v > 0 ? static_cast<std::size_t>(*v) : 0;
}

std::vector<std::string> split_ws(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream in{std::string(s)};
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

bool contains_sequence(const std::vector<std::string>& hay, const std::vector<std::string>& needle) {
  if (needle.empty()) return false;
  if (needle.size() > hay.size()) return false;
  return std::search(hay.begin(), hay.end(), needle.begin(), needle.end()) != hay.end();
}

const std::set<std::string>& stopwords() {
  static const std::set<std::string> kStop = {
      "the",  "and",   "for",  "with", "that", "this", "from", "into", "are",  "was",  "were", "has",
      "have", "been",  "its",  "their", "which", "when", "what", "how",  "why",  "does", "can",  "our",
      "not",  "but",   "also", "than", "then", "they", "them", "such", "each", "over", "under", "more",
      "less", "other", "within", "between", "about", "these", "those", "will", "would", "should"};
  return kStop;
}

std::string reply_filter(const GenerationRequest& r) {
  if (text::words(var(r, "question")).size() < 4) return "VERDICT: remove\nREASON: incomplete";
  return "VERDICT: keep";
}

std::string reply_adjudicate(const GenerationRequest& r) {
  return jaccard(word_set(var(r, "first")), word_set(var(r, "second"))) >= 0.75 ? "VERDICT: duplicate"
                                                                                 : "VERDICT: distinct";
}

std::string reply_rewrite(const GenerationRequest& r) {
  static const char* kSuffixes[] = {
      " Quantify the trade-offs involved.",
      " Explain the underlying physical mechanism step by step.",
      " Compare at least two alternative process conditions and justify the choice.",
  };
  auto round = reply::integer(var(r, "round")).value_or(1);
  std::string q = text::trim(var(r, "question"));
  return "QUESTION: " + q + kSuffixes[static_cast<std::size_t>(std::max<long long>(0, round - 1)) % 3];
}

std::string reply_complexity(const GenerationRequest& r) {
  return text::words(var(r, "question")).size() >= 24 ? "VERDICT: sufficient" : "VERDICT: insufficient";
}

std::string reply_distill(const GenerationRequest& r, const std::string& model) {
  std::string q = text::trim(var(r, "question"));
  std::string sample = var(r, "sample");
  auto w = text::words(q);
  w.resize(std::min<std::size_t>(w.size(), 8));
  return "REASONING: Work through " + join(w, " ") + " with " + model + " sample " + sample +
         ".\nANSWER: " + model + " answer " + sample + ": " + q;
}

std::string reply_distill_judge(const GenerationRequest& r) {
  std::uint64_t h = text::feature_hash(var(r, "answer"));
  return "SCORE: " + std::to_string(1 + h % 10);
}

std::string reply_sample(const GenerationRequest& r) {
  std::string reference = var(r, "reference");
  auto ref_words = split_ws(reference.empty() ? var(r, "question") : reference);
  std::size_t n = std::max<std::size_t>(var_count(r, "count"), 1);
  std::size_t index = static_cast<std::size_t>(reply::integer(var(r, "index")).value_or(0));
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  // Hash-derived permutation so response quality is not monotone in index.
  std::uint64_t h = text::feature_hash(var(r, "question"));
  for (std::size_t i = n; i > 1; --i) {
    h = text::mix64(h);
    std::swap(order[i - 1], order[h % i]);
  }
  std::size_t rank = order[index % n];
  std::size_t keep = (ref_words.size() * (rank + 1) + n - 1) / n;
  std::vector<std::string> out(ref_words.begin(), ref_words.begin() + static_cast<std::ptrdiff_t>(keep));
  std::string text = join(out, " ");
  if (ref_words.size() < n) text += " (variant " + std::to_string(index) + ")";
  return text;
}

std::string reply_rank(const GenerationRequest& r) {
  WordSet ref = word_set(var(r, "reference"));
  std::size_t n = var_count(r, "count");
  std::vector<std::pair<double, std::size_t>> scored;
  for (std::size_t i = 1; i <= n; ++i) scored.emplace_back(coverage(ref, word_set(var(r, "candidate_" + std::to_string(i)))), i);
  std::stable_sort(scored.begin(), scored.end(), [](auto& a, auto& b) { return a.first > b.first; });
  std::vector<std::string> labels;
  for (auto& [_, i] : scored) labels.push_back(std::to_string(i));
  return "ORDER: " + join(labels, ", ");
}

std::string reply_pair(const GenerationRequest& r) {
  WordSet ref = word_set(var(r, "reference"));
  double a = coverage(ref, word_set(var(r, "response_a")));
  double b = coverage(ref, word_set(var(r, "response_b")));
  return a >= b ? "WINNER: A" : "WINNER: B";
}

std::string reply_score(const GenerationRequest& r) {
  double c = coverage(word_set(var(r, "reference")), word_set(var(r, "response")));
  std::ostringstream out;
  out << "SCORE: " << std::round(c * 100.0) / 10.0;
  return out.str();
}

std::string reply_label(const GenerationRequest& r) {
  auto labels = reply::split_list(var(r, "labels"));
  if (labels.empty()) return "LABEL: none";
  auto q = text::words(var(r, "question"));
  for (const auto& l : labels) {
    auto lw = text::words(l);
    if (contains_sequence(q, lw)) return "LABEL: " + l;
  }
  return "LABEL: " + labels[text::feature_hash(var(r, "question")) % labels.size()];
}

std::string reply_relevance(const GenerationRequest& r) {
  return jaccard(word_set(var(r, "first")), word_set(var(r, "second"))) >= 0.9 ? "VERDICT: relevant"
                                                                               : "VERDICT: irrelevant";
}

std::string reply_paraphrase(const GenerationRequest& r) {
  std::string src = var(r, "text");
  auto w = split_ws(src);
  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (text::words(w[i]).size() == 1 && w[i].size() >= 3) candidates.push_back(i);
  }
  if (candidates.empty()) return "PARAPHRASE: " + text::trim(src) + " (perturbed)";
  std::size_t index = static_cast<std::size_t>(reply::integer(var(r, "index")).value_or(0));
  std::size_t pick = candidates[(index + text::feature_hash(src)) % candidates.size()];
  w[pick] = "non-" + w[pick];
  return "PARAPHRASE: " + join(w, " ");
}

std::string reply_topics(const GenerationRequest& r) {
  std::vector<std::string> ids;
  for (auto& line : reply::split_list(var(r, "chunk_ids"))) ids.push_back(line);
  struct Entry {
    std::string id;
    std::size_t words;
    std::size_t order;
  };
  std::vector<Entry> entries;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    entries.push_back({ids[i], text::words(var(r, "chunk:" + ids[i])).size(), i});
  }
  std::stable_sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) { return a.words > b.words; });
  if (entries.size() > 5) entries.resize(5);
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) { return a.order < b.order; });
  std::map<std::string, std::size_t> freq;
  std::vector<std::string> first_seen;
  std::vector<std::string> oracle;
  for (const auto& e : entries) {
    oracle.push_back(e.id);
    for (auto& w : text::words(var(r, "chunk:" + e.id))) {
      if (w.size() < 4 || stopwords().count(w)) continue;
      if (freq[w]++ == 0) first_seen.push_back(w);
    }
  }
  std::stable_sort(first_seen.begin(), first_seen.end(),
                   [&](const std::string& a, const std::string& b) { return freq[a] > freq[b]; });
  std::string out = "ORACLE: " + join(oracle, ", ");
  for (std::size_t i = 0; i < 5; ++i) {
    out += "\nTOPIC: " + (i < first_seen.size() ? first_seen[i] : "concept-" + std::to_string(i + 1));
  }
  return out;
}

std::string reply_query(const GenerationRequest& r) {
  auto t = reply::split_list(var(r, "topics"));
  while (t.size() < 3) t.push_back("the process");
  return "QUERY: How do " + t[0] + " and " + t[1] + " influence " + t[2] + " in this context?";
}

std::string reply_answer(const GenerationRequest& r) {
  std::vector<std::string> parts;
  for (int i = 1; i <= 2; ++i) {
    auto s = text::split_sentences(var(r, "chunk_" + std::to_string(i)));
    if (!s.empty()) parts.push_back(s.front());
  }
  if (parts.empty()) parts.push_back("No supporting context was provided.");
  return "ANSWER: " + join(parts, " ");
}

std::string reply_standardize(const GenerationRequest& r) {
  std::size_t n = var_count(r, "source_count");
  if (n == 1) return var(r, "source_1");
  std::vector<std::string> parts;
  for (std::size_t i = 1; i <= n; ++i) parts.push_back(text::trim(var(r, "source_" + std::to_string(i))));
  return join(parts, "\n");
}

std::string reply_refine(const GenerationRequest& r) {
  std::size_t n = var_count(r, "segment_count");
  std::vector<std::string> drop;
  for (std::size_t i = 1; i <= n; ++i) {
    std::string s = reply::lower(text::trim(var(r, "segment_" + std::to_string(i))));
    if (s.starts_with(">") || s.starts_with("\"") || s.starts_with("in summary") || s.starts_with("summary:") ||
        s.starts_with("to summarize")) {
      drop.push_back(std::to_string(i));
    }
  }
  return "REMOVE: " + (drop.empty() ? std::string("none") : join(drop, ", "));
}

std::string reply_extract(const GenerationRequest& r) {
  auto sentences = text::split_sentences(var(r, "text"));
  if (sentences.empty()) return "NONE";
  std::string out;
  for (const auto& s : sentences) out += "- " + s + "\n";
  return out;
}

std::string reply_support(const GenerationRequest& r) {
  bool yes = contains_sequence(text::words(var(r, "context")), text::words(var(r, "statement")));
  return yes ? "SUPPORTED: yes" : "SUPPORTED: no";
}

std::int64_t count_words(std::string_view s) { return static_cast<std::int64_t>(split_ws(s).size()); }

}  // namespace

std::vector<MockRule> mock_rules_from_json(const nlohmann::json& j) {
  const auto& rules = j.contains("rules") ? j.at("rules") : j;
  if (!rules.is_array()) throw std::invalid_argument("mock fixtures: 'rules' must be an array");
  std::vector<MockRule> out;
  for (const auto& rj : rules) {
    MockRule r;
    r.task = rj.value("task", "");
    if (rj.contains("when")) {
      for (auto it = rj.at("when").begin(); it != rj.at("when").end(); ++it) r.when[it.key()] = it.value().get<std::string>();
    }
    r.prompt_contains = rj.value("prompt_contains", "");
    if (rj.contains("output")) r.outputs.push_back(rj.at("output").get<std::string>());
    if (rj.contains("outputs")) {
      for (const auto& o : rj.at("outputs")) r.outputs.push_back(o.get<std::string>());
    }
    if (rj.contains("error")) {
      std::string e = rj.at("error").get<std::string>();
      if (e == "timeout") r.error = GatewayErrc::timeout;
      else if (e == "transport") r.error = GatewayErrc::transport;
      else if (e == "refusal") r.error = GatewayErrc::refusal;
      else throw std::invalid_argument("mock fixtures: unknown error kind '" + e + "'");
    }
    if (r.outputs.empty() && !r.error) throw std::invalid_argument("mock fixtures: rule without output or error");
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<MockRule> load_mock_rules(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open mock fixtures '" + path.string() + "'");
  return mock_rules_from_json(nlohmann::json::parse(in));
}

MockBackend::MockBackend(std::vector<MockRule> rules, int embedding_dims, std::string model)
    : rules_(std::move(rules)), dims_(embedding_dims), model_(std::move(model)) {
  if (dims_ < 1) throw std::invalid_argument("mock embedding dims must be >= 1");
}

std::optional<std::string> MockBackend::builtin(const GenerationRequest& r) const {
  const std::string& t = r.task;
  if (t == tasks::kQuestionFilter) return reply_filter(r);
  if (t == tasks::kDedupAdjudicate) return reply_adjudicate(r);
  if (t == tasks::kComplexityRewrite) return reply_rewrite(r);
  if (t == tasks::kComplexityJudge) return reply_complexity(r);
  if (t == tasks::kDistillAnswer) return reply_distill(r, model_);
  if (t == tasks::kDistillJudge) return reply_distill_judge(r);
  if (t == tasks::kSampleResponse) return reply_sample(r);
  if (t == tasks::kRankCandidates) return reply_rank(r);
  if (t == tasks::kJudgePair) return reply_pair(r);
  if (t == tasks::kScoreResponse) return reply_score(r);
  if (t == tasks::kDomainLabel) return reply_label(r);
  if (t == tasks::kSemanticRelevance) return reply_relevance(r);
  if (t == tasks::kParaphrase) return reply_paraphrase(r);
  if (t == tasks::kCoverageAnalysis) return std::string("COVERAGE: complete");
  if (t == tasks::kTopicExtraction) return reply_topics(r);
  if (t == tasks::kQueryGeneration) return reply_query(r);
  if (t == tasks::kAnswerGeneration) return reply_answer(r);
  if (t == tasks::kReferenceStandardize) return reply_standardize(r);
  if (t == tasks::kReferenceRefine) return reply_refine(r);
  if (t == tasks::kExtractStatements) return reply_extract(r);
  if (t == tasks::kJudgeSupport) return reply_support(r);
  return std::nullopt;
}

Generation MockBackend::generate(const GenerationRequest& r) {
  std::string prompt;
  for (const auto& m : r.messages) prompt += m.text + "\n";

  std::optional<std::string> text;
  for (const auto& rule : rules_) {
    if (!rule.task.empty() && rule.task != r.task) continue;
    bool ok = true;
    for (const auto& [k, sub] : rule.when) {
      auto it = r.vars.find(k);
      if (it == r.vars.end() || it->second.find(sub) == std::string::npos) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    if (!rule.prompt_contains.empty() && prompt.find(rule.prompt_contains) == std::string::npos) continue;
    if (rule.error) throw GatewayError(*rule.error, "mock rule failure for task '" + r.task + "'");
    std::size_t pick = static_cast<std::size_t>(r.seed.value_or(0)) % rule.outputs.size();
    text = render_template(rule.outputs[pick], r.vars);
    break;
  }
  if (!text) text = builtin(r);
  if (!text) {
    std::vector<std::string_view> parts{r.task};
    for (const auto& m : r.messages) {
      parts.push_back(m.role);
      parts.push_back(m.text);
    }
    std::string temp = std::to_string(r.temperature);
    std::string seed = r.seed ? std::to_string(*r.seed) : "-";
    parts.push_back(temp);
    parts.push_back(seed);
    text = "mock-" + text::content_hash(parts);
  }
  Generation g;
  g.usage.prompt_tokens = count_words(prompt);
  g.usage.completion_tokens = count_words(*text);
  g.text = std::move(*text);
  return g;
}

EmbeddingVec MockBackend::embed_text(std::string_view s, int dims) {
  EmbeddingVec v;
  v.values.assign(static_cast<std::size_t>(dims), 0.0);
  auto w = text::words(s);
  if (w.empty()) {
    v.values[text::feature_hash(s) % static_cast<std::uint64_t>(dims)] = 1.0;
    return v;
  }
  for (const auto& word : w) {
    std::uint64_t h = text::feature_hash(word);
    double sign = (text::mix64(h) >> 63) ? -1.0 : 1.0;
    v.values[h % static_cast<std::uint64_t>(dims)] += sign;
  }
  double norm = 0;
  for (double x : v.values) norm += x * x;
  norm = std::sqrt(norm);
  if (norm == 0) {
    // Every word cancelled in a shared bucket; fall back to a hash one-hot.
    v.values[text::feature_hash(s) % static_cast<std::uint64_t>(dims)] = 1.0;
    return v;
  }
  for (double& x : v.values) x /= norm;
  return v;
}

std::vector<EmbeddingVec> MockBackend::embed(const std::vector<std::string>& texts) {
  std::vector<EmbeddingVec> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(embed_text(t, dims_));
  return out;
}

RerankResult MockBackend::rerank(const std::string& query, const std::vector<corpus::ChunkRecord>& chunks) {
  WordSet q = word_set(query);
  RerankResult r;
  for (const auto& c : chunks) r.entries.push_back({c.id, coverage(q, word_set(c.text))});
  return r;
}

}  // namespace pipebench::gateway
