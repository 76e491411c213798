// Copyright 2026 The pipebench Authors
// SPDX-License-Identifier: Apache-2.0

#include "pipebench/review/server.hpp"

#include <httplib.h>

namespace pipebench::review {

using nlohmann::json;

json rubric() {
  const json criteria = json::array({
      {{"name", "grammatical_fluency"}, {"label", "Grammatical fluency"}, {"weight", 0.1}, {"scale", {0, 1, 2, 3}},
       {"description", "Is the response well formed, readable and free of language errors?"}},
      {{"name", "safety"}, {"label", "Safety"}, {"weight", 0.1}, {"scale", {0, 3}},
       {"description", "3 if the content is safe and compliant, 0 if it is harmful or non-compliant."}},
      {{"name", "logical_reasoning"}, {"label", "Logical reasoning"}, {"weight", 0.1}, {"scale", {0, 1, 2, 3}},
       {"description", "Does the reasoning hold together, without contradictions or unsupported leaps?"}},
      {{"name", "accuracy"}, {"label", "Accuracy"}, {"weight", 0.2}, {"scale", {0, 1, 2, 3}},
       {"description", "Are the technical facts, values and mechanisms correct?"}},
      {{"name", "comprehensiveness"}, {"label", "Comprehensiveness"}, {"weight", 0.2}, {"scale", {0, 1, 2, 3}},
       {"description", "Does the response cover every important aspect of the question?"}},
      {{"name", "practicality"}, {"label", "Practicality"}, {"weight", 0.3}, {"scale", {0, 1, 2, 3}},
       {"description", "Is the response useful and actionable for a domain engineer?"}},
  });
  return {{"criteria", criteria},
          {"acceptable", "accuracy, comprehensiveness and practicality all at least 2"},
          {"scale", "0 = poor, 1 = weak, 2 = adequate, 3 = excellent"}};
}

struct ReviewServer::Impl {
  ReviewStore& store;
  httplib::Server http;
  explicit Impl(ReviewStore& s) : store(s) {}
};

namespace {

void send(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, const ReviewError& e) {
  int status = 400;
  if (e.kind() == ReviewError::Kind::not_found) status = 404;
  if (e.kind() == ReviewError::Kind::conflict) status = 409;
  json body{{"error", e.what()}};
  if (!e.violations().empty()) {
    body["violations"] = json::array();
    for (const auto& v : e.violations()) body["violations"].push_back({{"field", v.field}, {"message", v.message}});
  }
  send(res, status, body);
}

template <class Fn>
void guarded(httplib::Response& res, Fn&& fn) {
  try {
    fn();
  } catch (const ReviewError& e) {
    send_error(res, e);
  } catch (const json::exception& e) {
    send(res, 400, {{"error", std::string("malformed request: ") + e.what()}});
  } catch (const corpus::RecordFormatError& e) {
    send(res, 400, {{"error", std::string("malformed request: ") + e.what()}});
  } catch (const std::exception& e) {
    send(res, 500, {{"error", e.what()}});
  }
}

}  // namespace

namespace api {

ReviewScores parse_scores(const json& j) {
  if (!j.is_object()) throw ReviewError(ReviewError::Kind::invalid, "scores must be an object");
  std::vector<corpus::Violation> missing;
  ReviewScores s;
  auto get = [&](const char* key, int& out) {
    auto it = j.find(key);
    if (it == j.end() || !it->is_number_integer()) {
      missing.push_back({key, "required integer"});
      return;
    }
    out = it->get<int>();
  };
  get("grammatical_fluency", s.grammatical_fluency);
  get("logical_reasoning", s.logical_reasoning);
  get("accuracy", s.accuracy);
  get("comprehensiveness", s.comprehensiveness);
  get("practicality", s.practicality);
  get("safety", s.safety);
  if (!missing.empty()) throw ReviewError(ReviewError::Kind::invalid, "invalid scores", missing);
  return s;
}

json create_session(ReviewStore& st, const json& body) {
  std::vector<CaseInput> cases;
  for (const auto& c : body.at("cases")) cases.push_back({c.at("id").get<std::string>(), c.at("question").get<std::string>()});
  std::vector<corpus::ResponseRecord> outputs;
  for (const auto& o : body.at("outputs")) {
    corpus::ResponseRecord r;
    r.question_id = o.at("question_id").get<std::string>();
    r.model_id = o.at("model_id").get<std::string>();
    r.answer_text = o.at("answer_text").get<std::string>();
    r.id = o.value("id", r.question_id + "/" + r.model_id);
    outputs.push_back(std::move(r));
  }
  auto s = st.create_session(body.at("caseset").get<std::string>(), body.at("reviewer").get<std::string>(),
                             body.value("seed", std::uint64_t{0}), cases, outputs);
  std::size_t slots = 0;
  for (const auto& it : s.items) slots += it.slots.size();
  return {{"session_id", s.id}, {"reviewer", s.reviewer}, {"items", s.items.size()}, {"slots", slots},
          {"status", "open"}};
}

json next_item(const ReviewStore& st, const std::string& session_id) {
  auto item = st.next_item(session_id);
  if (!item) return {{"session_id", session_id}, {"status", "complete"}};
  return {{"session_id", session_id}, {"status", "open"}, {"item", to_json(*item)}, {"rubric", rubric()}};
}

json submit_scores(ReviewStore& st, const std::string& session_id, const json& body) {
  auto scores = parse_scores(body.at("scores"));
  auto remaining =
      st.submit_scores(session_id, body.at("item_id").get<std::string>(), body.at("slot").get<std::string>(), scores);
  return {{"accepted", true},
          {"remaining_slots", remaining},
          {"status", remaining == 0 && st.status(session_id) == SessionStatus::complete ? "complete" : "open"}};
}

json report(const ReviewStore& st, const std::string& caseset) { return to_json(st.report(caseset)); }

}  // namespace api

ReviewServer::ReviewServer(ReviewStore& store) : impl_(std::make_unique<Impl>(store)) {
  auto& http = impl_->http;
  ReviewStore& st = store;
  http.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                            {"Access-Control-Allow-Headers", "Content-Type"},
                            {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
  http.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

  http.Get("/rubric", [](const httplib::Request&, httplib::Response& res) { send(res, 200, rubric()); });

  http.Post("/sessions", [&st](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { send(res, 201, api::create_session(st, json::parse(req.body))); });
  });
  http.Get(R"(/sessions/([^/]+)/next)", [&st](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { send(res, 200, api::next_item(st, req.matches[1])); });
  });
  http.Post(R"(/sessions/([^/]+)/scores)", [&st](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { send(res, 200, api::submit_scores(st, req.matches[1], json::parse(req.body))); });
  });
  http.Get(R"(/reports/([^/]+))", [&st](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { send(res, 200, api::report(st, req.matches[1])); });
  });
}

ReviewServer::~ReviewServer() { stop(); }

int ReviewServer::bind(const std::string& host, int port) {
  if (port == 0) return impl_->http.bind_to_any_port(host);
  if (!impl_->http.bind_to_port(host, port)) return -1;
  return port;
}

void ReviewServer::listen() { impl_->http.listen_after_bind(); }

void ReviewServer::stop() {
  if (impl_) impl_->http.stop();
}

}  // namespace pipebench::review
