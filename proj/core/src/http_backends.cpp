#include "wpgen/http_backends.hpp"

#include "httplib.h"
#include "json.hpp"

namespace wpgen {

namespace {

using nlohmann::json;

// Splits "http://host:port" into client target + keeps the path prefix.
struct Endpoint {
  std::string base;
  explicit Endpoint(std::string url) : base(std::move(url)) {
    while (!base.empty() && base.back() == '/') base.pop_back();
  }
};

json post_json(httplib::Client& client, const std::string& path, const json& body,
               const std::string& who) {
  auto res = client.Post(path, body.dump(), "application/json");
  if (!res) {
    throw Error(Errc::BackendUnavailable,
                who + ": no connection (" + httplib::to_string(res.error()) + ")");
  }
  if (res->status != 200) {
    throw Error(Errc::ScorerFailure, who + ": HTTP " + std::to_string(res->status));
  }
  try {
    return json::parse(res->body);
  } catch (const json::exception& e) {
    throw Error(Errc::ScorerFailure, who + ": bad JSON response: " + e.what());
  }
}

std::unique_ptr<httplib::Client> make_client(const std::string& base) {
  auto client = std::make_unique<httplib::Client>(base);
  client->set_connection_timeout(5, 0);
  client->set_read_timeout(120, 0);
  return client;
}

}  // namespace

struct HttpInfillBackend::Impl {
  Endpoint endpoint;
  std::unique_ptr<httplib::Client> client;
  explicit Impl(std::string url) : endpoint(std::move(url)), client(make_client(endpoint.base)) {}
};

HttpInfillBackend::HttpInfillBackend(std::string endpoint)
    : impl_(std::make_unique<Impl>(std::move(endpoint))) {}
HttpInfillBackend::~HttpInfillBackend() = default;

std::string HttpInfillBackend::raw_generate(const InfillQuery& query) {
  const json body = {{"left", query.left_context},
                     {"right", query.right_context},
                     {"nucleus", query.nucleus},
                     {"temperature", query.temperature},
                     {"max_new_tokens", query.max_new_tokens},
                     {"seed", query.seed}};
  const json res = post_json(*impl_->client, "/infill", body, name());
  if (!res.contains("text") || !res["text"].is_string()) {
    throw Error(Errc::ScorerFailure, "infill response lacks 'text'");
  }
  return res["text"].get<std::string>();
}

struct HttpNliScorer::Impl {
  Endpoint endpoint;
  std::unique_ptr<httplib::Client> client;
  explicit Impl(std::string url) : endpoint(std::move(url)), client(make_client(endpoint.base)) {}
};

HttpNliScorer::HttpNliScorer(std::string endpoint)
    : impl_(std::make_unique<Impl>(std::move(endpoint))) {}
HttpNliScorer::~HttpNliScorer() = default;

NliScores HttpNliScorer::score(const std::string& premise, const std::string& hypothesis) {
  const json body = {{"premise", premise}, {"hypothesis", hypothesis}};
  const json res = post_json(*impl_->client, "/nli", body, name());
  try {
    return {res.at("entailment").get<double>(), res.at("neutral").get<double>(),
            res.at("contradiction").get<double>()};
  } catch (const json::exception& e) {
    throw Error(Errc::ScorerFailure, std::string("nli response: ") + e.what());
  }
}

struct HttpNspScorer::Impl {
  Endpoint endpoint;
  std::unique_ptr<httplib::Client> client;
  explicit Impl(std::string url) : endpoint(std::move(url)), client(make_client(endpoint.base)) {}
};

HttpNspScorer::HttpNspScorer(std::string endpoint)
    : impl_(std::make_unique<Impl>(std::move(endpoint))) {}
HttpNspScorer::~HttpNspScorer() = default;

double HttpNspScorer::is_next_probability(const std::string& first, const std::string& second) {
  const json body = {{"first", first}, {"second", second}};
  const json res = post_json(*impl_->client, "/nsp", body, name());
  try {
    return res.at("is_next").get<double>();
  } catch (const json::exception& e) {
    throw Error(Errc::ScorerFailure, std::string("nsp response: ") + e.what());
  }
}

struct HttpEmbeddingScorer::Impl {
  Endpoint endpoint;
  std::unique_ptr<httplib::Client> client;
  explicit Impl(std::string url) : endpoint(std::move(url)), client(make_client(endpoint.base)) {}
};

HttpEmbeddingScorer::HttpEmbeddingScorer(std::string endpoint)
    : impl_(std::make_unique<Impl>(std::move(endpoint))) {}
HttpEmbeddingScorer::~HttpEmbeddingScorer() = default;

std::vector<double> HttpEmbeddingScorer::embed(const std::string& sentence) {
  const json body = {{"sentence", sentence}};
  const json res = post_json(*impl_->client, "/embed", body, name());
  try {
    return res.at("vector").get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw Error(Errc::ScorerFailure, std::string("embed response: ") + e.what());
  }
}

}  // namespace wpgen
