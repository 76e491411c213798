// Copyright 2026 The pipebench Authors
// SPDX-License-Identifier: Apache-2.0

#include "pipebench/review/store.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <mutex>
#include <set>

#include "pipebench/common/rng.hpp"
#include "pipebench/corpus/dataset.hpp"

namespace pipebench::review {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr corpus::EnumNames<SessionStatus, 2> kStatusNames{{{
    {SessionStatus::open, "open"},
    {SessionStatus::complete, "complete"},
}}};

std::string slot_label(std::size_t i) {
  std::string s;
  for (std::size_t n = i + 1; n > 0; n = (n - 1) / 26) s.insert(s.begin(), static_cast<char>('A' + (n - 1) % 26));
  return s;
}

std::string now_iso8601() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

void to_json(json& j, const ReviewSession& r) {
  j = corpus::with_extra(r.extra);
  j["id"] = r.id;
  j["caseset"] = r.caseset;
  j["reviewer"] = r.reviewer;
  j["seed"] = r.seed;
  j["cursor"] = r.cursor;
  j["status"] = kStatusNames.name(r.status);
  j["items"] = json::array();
  for (const auto& it : r.items) {
    json slots = json::array();
    for (const auto& s : it.slots) slots.push_back({{"label", s.label}, {"model_id", s.model_id}, {"text", s.text}});
    j["items"].push_back({{"item_id", it.item_id}, {"question", it.question}, {"slots", slots}});
  }
}

void from_json(const json& j, ReviewSession& r) {
  corpus::FieldReader f(j);
  r.id = f.text("id");
  r.caseset = f.text("caseset");
  r.reviewer = f.text("reviewer");
  r.seed = f.raw("seed").get<std::uint64_t>();
  r.cursor = f.integer("cursor");
  r.status = f.enumerated("status", kStatusNames);
  r.items.clear();
  for (const auto& ij : f.raw("items")) {
    corpus::FieldReader fi(ij);
    SessionItem it;
    it.item_id = fi.text("item_id");
    it.question = fi.text("question");
    for (const auto& sj : fi.raw("slots")) {
      corpus::FieldReader fs(sj);
      Slot s;
      s.label = fs.text("label");
      s.model_id = fs.text("model_id");
      s.text = fs.text("text");
      it.slots.push_back(std::move(s));
    }
    r.items.push_back(std::move(it));
  }
  r.extra = f.rest();
}

std::vector<corpus::Violation> validate_record(const ReviewSession& r) {
  std::vector<corpus::Violation> v;
  corpus::require_text(v, "id", r.id);
  corpus::require_text(v, "caseset", r.caseset);
  corpus::require_text(v, "reviewer", r.reviewer);
  if (r.items.empty()) v.push_back({"items", "must not be empty"});
  if (r.cursor < 0 || r.cursor > static_cast<std::int64_t>(r.items.size())) v.push_back({"cursor", "must be in [0, item count]"});
  std::set<std::string> ids;
  for (const auto& it : r.items) {
    if (!ids.insert(it.item_id).second) v.push_back({"items", "duplicate item '" + it.item_id + "'"});
    if (it.slots.empty()) v.push_back({"items", "item '" + it.item_id + "' has no slots"});
  }
  return v;
}

void to_json(json& j, const ReviewSubmission& r) {
  j = corpus::with_extra(r.extra);
  j["id"] = r.id;
  j["session_id"] = r.session_id;
  j["item_id"] = r.item_id;
  j["slot"] = r.slot;
  j["reviewer"] = r.reviewer;
  j["scores"] = r.scores;
  j["timestamp"] = r.timestamp;
}

void from_json(const json& j, ReviewSubmission& r) {
  corpus::FieldReader f(j);
  r.id = f.text("id");
  r.session_id = f.text("session_id");
  r.item_id = f.text("item_id");
  r.slot = f.text("slot");
  r.reviewer = f.text("reviewer");
  r.scores = f.raw("scores").get<ReviewScores>();
  r.timestamp = f.text("timestamp");
  r.extra = f.rest();
}

std::vector<corpus::Violation> validate_record(const ReviewSubmission& r) {
  std::vector<corpus::Violation> v;
  corpus::require_text(v, "id", r.id);
  corpus::require_text(v, "session_id", r.session_id);
  corpus::require_text(v, "item_id", r.item_id);
  corpus::require_text(v, "slot", r.slot);
  corpus::require_text(v, "reviewer", r.reviewer);
  for (auto& x : r.scores.validate()) v.push_back({"scores." + x.field, x.message});
  return v;
}

json to_json(const ReviewItemView& v) {
  json slots = json::array();
  for (const auto& [label, text] : v.slots) slots.push_back({{"label", label}, {"text", text}});
  return {{"item_id", v.item_id},
          {"question", v.question},
          {"slots", slots},
          {"progress", {{"item_index", v.item_index}, {"item_count", v.item_count}, {"scored_slots", v.scored_slots}}}};
}

ReviewSession make_session(std::string id, std::string caseset, std::string reviewer, std::uint64_t seed,
                           const std::vector<CaseInput>& cases, const std::vector<corpus::ResponseRecord>& outputs) {
  if (cases.empty()) throw ReviewError(ReviewError::Kind::invalid, "case set is empty");
  std::map<std::string, std::vector<const corpus::ResponseRecord*>> by_case;
  std::set<std::string> case_ids;
  for (const auto& c : cases) {
    if (!case_ids.insert(c.id).second) throw ReviewError(ReviewError::Kind::invalid, "duplicate case '" + c.id + "'");
  }
  for (const auto& o : outputs) {
    if (!case_ids.contains(o.question_id)) {
      throw ReviewError(ReviewError::Kind::invalid, "output " + o.id + " names unknown case '" + o.question_id + "'");
    }
    by_case[o.question_id].push_back(&o);
  }

  ReviewSession s;
  s.id = std::move(id);
  s.caseset = std::move(caseset);
  s.reviewer = std::move(reviewer);
  s.seed = seed;
  DeterministicRng rng(derive_seed(seed, s.reviewer));
  std::vector<const CaseInput*> order;
  for (const auto& c : cases) order.push_back(&c);
  std::sort(order.begin(), order.end(), [](auto* a, auto* b) { return a->id < b->id; });
  rng.shuffle(std::span(order));
  for (auto* c : order) {
    auto& outs = by_case[c->id];
    if (outs.empty()) throw ReviewError(ReviewError::Kind::invalid, "case '" + c->id + "' has no model outputs");
    std::sort(outs.begin(), outs.end(), [](auto* a, auto* b) { return a->model_id < b->model_id; });
    rng.shuffle(std::span(outs));
    SessionItem it{c->id, c->question, {}};
    for (std::size_t i = 0; i < outs.size(); ++i) it.slots.push_back({slot_label(i), outs[i]->model_id, outs[i]->answer_text});
    s.items.push_back(std::move(it));
  }
  return s;
}

json to_json(const AggregateReport& r) {
  json models = json::object();
  for (const auto& [m, a] : r.models) {
    models[m] = {{"submissions", a.submissions},
                 {"reviewers", a.reviewers},
                 {"mean_weighted", a.mean_weighted},
                 {"acceptable_rate", a.acceptable_rate},
                 {"criterion_means", a.criterion_means}};
  }
  return {{"caseset", r.caseset}, {"models", models}, {"submissions", r.submissions}, {"reviewers", r.reviewers}};
}

AggregateReport aggregate_report(const std::string& caseset, const std::vector<ReviewSession>& sessions,
                                 const std::vector<ReviewSubmission>& submissions) {
  std::map<std::string, const ReviewSession*> by_id;
  for (const auto& s : sessions) {
    if (s.caseset == caseset) by_id[s.id] = &s;
  }
  std::map<std::string, std::vector<ReviewScores>> scores;
  std::map<std::string, std::set<std::string>> reviewers;
  std::set<std::string> all_reviewers;
  AggregateReport rep;
  rep.caseset = caseset;
  for (const auto& sub : submissions) {
    auto it = by_id.find(sub.session_id);
    if (it == by_id.end()) continue;
    const SessionItem* item = nullptr;
    for (const auto& i : it->second->items) {
      if (i.item_id == sub.item_id) item = &i;
    }
    const Slot* slot = nullptr;
    if (item) {
      for (const auto& s : item->slots) {
        if (s.label == sub.slot) slot = &s;
      }
    }
    if (!slot) throw ReviewError(ReviewError::Kind::invalid, "submission " + sub.id + " references an unknown slot");
    scores[slot->model_id].push_back(sub.scores);
    reviewers[slot->model_id].insert(sub.reviewer);
    all_reviewers.insert(sub.reviewer);
    ++rep.submissions;
  }
  if (rep.submissions == 0) throw ReviewError(ReviewError::Kind::not_found, "no submissions for case set '" + caseset + "'");
  rep.reviewers = all_reviewers.size();
  for (const auto& [m, list] : scores) {
    ModelAggregate a;
    a.submissions = list.size();
    a.reviewers = reviewers[m].size();
    double sum = 0.0;
    for (const auto& s : list) sum += evalengine::weighted_human_score(s);
    a.mean_weighted = sum / static_cast<double>(list.size());
    a.acceptable_rate = evalengine::acceptable_rate(list);
    for (const auto& c : evalengine::kCriterionWeights) {
      double t = 0.0;
      for (const auto& s : list) t += evalengine::criterion_value(s, c.name);
      a.criterion_means[std::string(c.name)] = t / static_cast<double>(list.size());
    }
    rep.models[m] = std::move(a);
  }
  return rep;
}

ReviewStore::ReviewStore(fs::path data_dir) : dir_(std::move(data_dir)) {
  fs::create_directories(dir_);
  if (fs::exists(dir_ / "sessions.jsonl")) {
    for (auto& s : corpus::read_dataset<ReviewSession>(dir_ / "sessions.jsonl").records) sessions_.emplace(s.id, std::move(s));
  }
  if (fs::exists(dir_ / "submissions.jsonl")) {
    submissions_ = corpus::read_dataset<ReviewSubmission>(dir_ / "submissions.jsonl").records;
  }
  for (std::size_t i = 0; i < submissions_.size(); ++i) submission_index_[submissions_[i].id] = i;
  // The log is authoritative; re-derive cursors in case a snapshot lagged.
  for (auto& [id, s] : sessions_) {
    s.cursor = 0;
    while (s.cursor < static_cast<std::int64_t>(s.items.size())) {
      const auto& item = s.items[static_cast<std::size_t>(s.cursor)];
      bool done = true;
      for (const auto& slot : item.slots) done = done && submission_index_.contains(s.id + "/" + item.item_id + "/" + slot.label);
      if (!done) break;
      ++s.cursor;
    }
    s.status = s.cursor == static_cast<std::int64_t>(s.items.size()) ? SessionStatus::complete : SessionStatus::open;
  }
}

void ReviewStore::persist_sessions() const {
  std::vector<ReviewSession> all;
  for (const auto& [id, s] : sessions_) all.push_back(s);
  corpus::write_dataset(all, dir_ / "sessions.jsonl");
}

ReviewSession& ReviewStore::find(const std::string& id) {
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw ReviewError(ReviewError::Kind::not_found, "unknown session '" + id + "'");
  return it->second;
}

const ReviewSession& ReviewStore::find(const std::string& id) const {
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw ReviewError(ReviewError::Kind::not_found, "unknown session '" + id + "'");
  return it->second;
}

ReviewSession ReviewStore::create_session(const std::string& caseset, const std::string& reviewer, std::uint64_t seed,
                                          const std::vector<CaseInput>& cases,
                                          const std::vector<corpus::ResponseRecord>& outputs) {
  if (caseset.empty() || reviewer.empty()) throw ReviewError(ReviewError::Kind::invalid, "caseset and reviewer are required");
  std::unique_lock lock(mu_);
  char id[32];
  std::snprintf(id, sizeof id, "session-%04zu", sessions_.size() + 1);
  ReviewSession s = make_session(id, caseset, reviewer, seed, cases, outputs);
  sessions_.emplace(s.id, s);
  persist_sessions();
  return s;
}

std::optional<ReviewItemView> ReviewStore::next_item(const std::string& session_id) const {
  std::shared_lock lock(mu_);
  const ReviewSession& s = find(session_id);
  if (s.status == SessionStatus::complete) return std::nullopt;
  const auto& item = s.items[static_cast<std::size_t>(s.cursor)];
  ReviewItemView v;
  v.item_id = item.item_id;
  v.question = item.question;
  for (const auto& slot : item.slots) {
    v.slots.emplace_back(slot.label, slot.text);
    if (submission_index_.contains(s.id + "/" + item.item_id + "/" + slot.label)) ++v.scored_slots;
  }
  v.item_index = static_cast<std::size_t>(s.cursor);
  v.item_count = s.items.size();
  return v;
}

SessionStatus ReviewStore::status(const std::string& session_id) const {
  std::shared_lock lock(mu_);
  return find(session_id).status;
}

std::size_t ReviewStore::submit_scores(const std::string& session_id, const std::string& item_id, const std::string& slot,
                                       const ReviewScores& scores) {
  if (auto v = scores.validate(); !v.empty()) {
    throw ReviewError(ReviewError::Kind::invalid, "invalid scores: " + corpus::detail::describe(v), v);
  }
  std::unique_lock lock(mu_);
  ReviewSession& s = find(session_id);
  const std::string key = s.id + "/" + item_id + "/" + slot;
  if (submission_index_.contains(key)) {
    throw ReviewError(ReviewError::Kind::conflict, "slot " + slot + " of item " + item_id + " already scored");
  }
  if (s.status == SessionStatus::complete) throw ReviewError(ReviewError::Kind::invalid, "session is complete");
  const SessionItem& item = s.items[static_cast<std::size_t>(s.cursor)];
  if (item.item_id != item_id) throw ReviewError(ReviewError::Kind::invalid, "item '" + item_id + "' is not the current item");
  bool known = false;
  for (const auto& sl : item.slots) known = known || sl.label == slot;
  if (!known) throw ReviewError(ReviewError::Kind::invalid, "unknown slot '" + slot + "'");

  ReviewSubmission sub{key, s.id, item_id, slot, s.reviewer, scores, now_iso8601(), json::object()};
  corpus::append_record(sub, dir_ / "submissions.jsonl");
  submission_index_[key] = submissions_.size();
  submissions_.push_back(std::move(sub));

  bool done = true;
  for (const auto& sl : item.slots) done = done && submission_index_.contains(s.id + "/" + item_id + "/" + sl.label);
  if (done) {
    ++s.cursor;
    if (s.cursor == static_cast<std::int64_t>(s.items.size())) s.status = SessionStatus::complete;
    persist_sessions();
  }
  std::size_t remaining = 0;
  for (std::size_t i = static_cast<std::size_t>(s.cursor); i < s.items.size(); ++i) {
    for (const auto& sl : s.items[i].slots) {
      remaining += submission_index_.contains(s.id + "/" + s.items[i].item_id + "/" + sl.label) ? 0 : 1;
    }
  }
  return remaining;
}

AggregateReport ReviewStore::report(const std::string& caseset) const {
  std::shared_lock lock(mu_);
  std::vector<ReviewSession> all;
  for (const auto& [id, s] : sessions_) all.push_back(s);
  bool known = false;
  for (const auto& s : all) known = known || s.caseset == caseset;
  if (!known) throw ReviewError(ReviewError::Kind::not_found, "unknown case set '" + caseset + "'");
  return aggregate_report(caseset, all, submissions_);
}

std::vector<ReviewSession> ReviewStore::sessions() const {
  std::shared_lock lock(mu_);
  std::vector<ReviewSession> all;
  for (const auto& [id, s] : sessions_) all.push_back(s);
  return all;
}

std::vector<ReviewSubmission> ReviewStore::submissions() const {
  std::shared_lock lock(mu_);
  return submissions_;
}

}  // namespace pipebench::review
