#include "liftdl/service/server.hpp"

#include <cstdlib>

#include "httplib.h"
#include "json.hpp"
#include "liftdl/common/error.hpp"

namespace liftdl::service {

using nlohmann::ordered_json;

namespace {

HttpResponse error_response(const char* kind, const std::string& message, std::optional<std::size_t> offset) {
  ordered_json body;
  body["error"] = kind;
  body["message"] = message;
  body["offset"] = offset ? ordered_json(*offset) : ordered_json(nullptr);
  return {400, body.dump()};
}

}  // namespace

GraphService::GraphService(std::string graph_document, const std::optional<std::string>& fm_text, bool use_fm)
    : document_(std::move(graph_document)) {
  graph_ = analysis::parse_graph_json(document_, store_);
  if (fm_text) {
    const auto fm = featexpr::FeatureModel::parse(*fm_text, store_, "feature model");
    if (use_fm) model_ = fm.compiled();
  }
  store_.features().close();
}

std::vector<std::string> GraphService::highlighted(std::string_view expr, bool* satisfiable) {
  std::lock_guard lock(mutex_);
  const auto antecedent = store_.pc_and(store_.parse(expr), model_);
  if (satisfiable) *satisfiable = !antecedent.is_false();
  std::vector<std::string> out;
  if (antecedent.is_false()) return out;
  for (const auto& e : graph_.edges)
    if (store_.implies(antecedent, e.pc)) out.push_back(e.id);
  return out;
}

HttpResponse GraphService::filter(std::string_view request_body) {
  std::string expr;
  try {
    const auto doc = nlohmann::json::parse(request_body);
    if (!doc.is_object() || !doc.contains("expr") || !doc["expr"].is_string())
      return error_response("bad_request", "body must be an object with a string field \"expr\"", std::nullopt);
    expr = doc["expr"].get<std::string>();
  } catch (const nlohmann::json::parse_error& e) {
    return error_response("malformed_json", e.what(), e.byte > 0 ? e.byte - 1 : 0);
  }
  try {
    bool sat = false;
    const auto ids = highlighted(expr, &sat);
    ordered_json body;
    body["highlighted"] = ids;
    body["satisfiable"] = sat;
    return {200, body.dump()};
  } catch (const SyntaxError& e) {
    return error_response("syntax_error", e.what(), e.offset());
  } catch (const UnknownFeatureError& e) {
    return error_response("unknown_feature", e.what(), e.offset());
  }
}

HttpServer::HttpServer(GraphService& service) : service_(service), server_(std::make_unique<httplib::Server>()) {
  server_->Get("/graph", [this](const httplib::Request&, httplib::Response& res) {
    res.set_content(service_.graph_document(), "application/json");
  });
  server_->Post("/filter", [this](const httplib::Request& req, httplib::Response& res) {
    const HttpResponse r = service_.filter(req.body);
    res.status = r.status;
    res.set_content(r.body, "application/json");
  });
}

HttpServer::~HttpServer() = default;

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) {
    const int bound = server_->bind_to_any_port(host);
    if (bound < 0) throw Error("cannot bind " + host);
    return bound;
  }
  if (!server_->bind_to_port(host, port)) throw Error("cannot bind " + host + ":" + std::to_string(port));
  return port;
}

void HttpServer::run() { server_->listen_after_bind(); }

void HttpServer::stop() { server_->stop(); }

int resolve_port(std::optional<int> flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("LIFTDL_PORT"); env && *env) {
    char* end = nullptr;
    const long port = std::strtol(env, &end, 10);
    if (*end != '\0' || port < 0 || port > 65535) throw Error(std::string("invalid LIFTDL_PORT '") + env + "'");
    return static_cast<int>(port);
  }
  return 8080;
}

}  // namespace liftdl::service
