#pragma once

#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "liftdl/analysis/analysis.hpp"
#include "liftdl/featexpr/feature_model.hpp"
#include "liftdl/featexpr/pc_store.hpp"

namespace httplib {
class Server;
}

namespace liftdl::service {

struct HttpResponse {
  int status = 200;
  std::string body;  // JSON
};

/// The loaded graph, its store and the feature model; answers the two
/// endpoints. Requests are serialised on an internal mutex because parsing
/// and implication checks extend the shared decision-diagram store.
class GraphService {
 public:
  /// `fm_text` uses the feature-model format; `use_fm` false ignores it
  /// when filtering. Throws Error on a malformed graph or model.
  GraphService(std::string graph_document, const std::optional<std::string>& fm_text = std::nullopt,
               bool use_fm = true);

  const std::string& graph_document() const noexcept { return document_; }
  const analysis::ComponentGraph& graph() const noexcept { return graph_; }

  /// `POST /filter`: body `{"expr": "..."}` →
  /// `{"highlighted": [edge ids whose PC is implied by expr ∧ FM], "satisfiable": bool}`.
  /// An unsatisfiable antecedent highlights nothing. Malformed requests,
  /// syntax errors and unknown features give 400 with
  /// `{"error": kind, "message": text, "offset": byte offset or null}`.
  HttpResponse filter(std::string_view request_body);

  /// Highlighted edge ids for `expr`; throws SyntaxError or UnknownFeatureError.
  std::vector<std::string> highlighted(std::string_view expr, bool* satisfiable = nullptr);

 private:
  std::mutex mutex_;
  std::string document_;
  featexpr::PcStore store_;
  analysis::ComponentGraph graph_;
  featexpr::PresenceCondition model_ = featexpr::PresenceCondition::True();
};

/// HTTP front end: `GET /graph` and `POST /filter`.
class HttpServer {
 public:
  explicit HttpServer(GraphService& service);
  ~HttpServer();

  /// Binds `host:port`; port 0 picks a free port. Returns the bound port.
  int bind(const std::string& host, int port);
  /// Serves until stop(); call after bind.
  void run();
  void stop();

 private:
  GraphService& service_;
  std::unique_ptr<httplib::Server> server_;
};

/// Port from the command line when given, else `LIFTDL_PORT`, else 8080.
int resolve_port(std::optional<int> flag);

}  // namespace liftdl::service
