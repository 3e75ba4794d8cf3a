#include "domavec/service.h"

#include <stdexcept>

#include "domavec/query.h"
#include "httplib.h"
#include "json.hpp"

namespace domavec {

using nlohmann::json;

namespace {

struct BadRequest : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Response Json(int status, const json& j) { return {status, j.dump()}; }

Response Error(int status, const std::string& message, json extra = json::object()) {
  extra["error"] = message;
  return Json(status, extra);
}

std::vector<std::string> StringList(const json& req, const char* key, bool required) {
  if (!req.contains(key)) {
    if (required) throw BadRequest(std::string("missing field '") + key + "'");
    return {};
  }
  const json& v = req.at(key);
  if (!v.is_array()) throw BadRequest(std::string("'") + key + "' must be an array");
  std::vector<std::string> out;
  for (const json& s : v) {
    if (!s.is_string()) throw BadRequest(std::string("'") + key + "' must hold strings");
    out.push_back(s.get<std::string>());
  }
  return out;
}

const Measure& MeasureOf(const json& req) {
  std::string name = req.value("measure", std::string("cosine"));
  try {
    return GetMeasure(name);
  } catch (const std::invalid_argument& e) {
    throw BadRequest(e.what());
  }
}

double NumberOf(const json& req, const char* key, double fallback) {
  if (!req.contains(key)) return fallback;
  if (!req.at(key).is_number()) throw BadRequest(std::string("'") + key + "' must be a number");
  return req.at(key).get<double>();
}

std::size_t CountOf(const json& req, const char* key, std::size_t fallback) {
  if (!req.contains(key)) return fallback;
  const json& v = req.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw BadRequest(std::string("'") + key + "' must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

json OovJson(const std::vector<OovNote>& oov) {
  json out = json::array();
  for (const auto& o : oov) out.push_back({{"word", o.word}, {"matrix", o.matrix}});
  return out;
}

json HeaderJson(const CatalogEntry& e) {
  json j{{"name", e.name},
         {"kind", std::string(KindName(e.header.kind))},
         {"window", e.header.window},
         {"weighting", e.header.weighting},
         {"rows", e.header.rows},
         {"cols", e.header.cols},
         {"logical_cols", e.header.logical_cols},
         {"nnz", e.header.nnz}};
  j["reduced_rank"] = e.header.reduced_rank ? json(*e.header.reduced_rank) : json(nullptr);
  return j;
}

}  // namespace

QueryService::QueryService(std::shared_ptr<const MatrixCatalog> catalog)
    : catalog_(std::move(catalog)) {}

Response QueryService::Handle(const std::string& method, const std::string& path,
                              const std::string& body) const {
  try {
    if (path == "/api/matrices") {
      if (method != "GET") return Error(405, "method not allowed");
      json list = json::array();
      for (const auto& e : catalog_->entries()) list.push_back(HeaderJson(e));
      return Json(200, {{"matrices", list}});
    }
    bool known = path == "/api/vectors" || path == "/api/similarity" ||
                 path == "/api/neighbors" || path == "/api/features";
    if (!known) return Error(404, "no such endpoint " + path);
    if (method != "POST") return Error(405, "method not allowed");

    json req = json::parse(body, nullptr, false);
    if (req.is_discarded() || !req.is_object()) {
      return Error(400, "request body must be a JSON object");
    }

    if (path == "/api/features") {
      if (!req.contains("target") || !req["target"].is_string()) {
        throw BadRequest("missing field 'target'");
      }
      if (!req.contains("configRef") || !req["configRef"].is_string()) {
        throw BadRequest("missing field 'configRef'");
      }
      std::string target = req["target"];
      const FeatureConfig* config;
      try {
        config = &catalog_->Features(req["configRef"].get<std::string>());
      } catch (const std::invalid_argument& e) {
        return Error(404, e.what());
      }
      double pk = NumberOf(req, "pk", 0.71);
      double ck = NumberOf(req, "ck", 3.9);
      auto scores = AssignFeatures(target, *config, catalog_->Lookup(), pk, ck,
                                   MeasureOf(req));
      json list = json::array();
      for (const auto& s : scores) {
        list.push_back({{"feature", s.feature},
                        {"s_rel", s.s_rel},
                        {"s_unrel", s.s_unrel},
                        {"c_t", s.c_t},
                        {"f_t", s.f_t},
                        {"assigned", s.assigned}});
      }
      return Json(200, {{"target", target},
                        {"pk", pk},
                        {"ck", ck},
                        {"text", FormatFeatureReport(scores)},
                        {"scores", list}});
    }

    auto matrices = SelectMatrices(*catalog_, StringList(req, "matrices", true));
    auto words = StringList(req, "words", true);

    if (path == "/api/vectors") {
      auto out = QueryVectors(matrices, words);
      json vecs = json::array();
      for (const auto& v : out.vectors) {
        vecs.push_back({{"word", v.word}, {"matrix", v.matrix}, {"values", v.values}});
      }
      return Json(200, {{"text", out.text}, {"vectors", vecs}, {"oov", OovJson(out.oov)}});
    }

    const Measure& measure = MeasureOf(req);
    if (path == "/api/similarity") {
      auto targets = StringList(req, "targets", true);
      if (targets.empty()) throw BadRequest("'targets' must not be empty");
      auto out = QuerySimilarity(matrices, words, targets, measure);
      json files = json::array();
      for (const auto& f : out.files) files.push_back({{"word", f.word}, {"text", f.text}});
      return Json(200, {{"measure", measure.name},
                        {"files", files},
                        {"oov", OovJson(out.oov)}});
    }

    std::size_t k = CountOf(req, "k", 20);
    std::size_t expand = CountOf(req, "expand", 0);
    auto out = QueryNeighbors(matrices, words, k, measure);
    json files = json::array();
    for (const auto& f : out.files) {
      json lists = json::array();
      for (const auto& [name, list] : f.lists) {
        json items = json::array();
        for (const auto& n : list) items.push_back({{"word", n.word}, {"score", n.score}});
        lists.push_back({{"matrix", name}, {"neighbors", items}});
      }
      json file{{"word", f.word}, {"text", f.text}, {"lists", lists}};
      if (expand > 0) {
        json graphs = json::array();
        for (const auto& [name, list] : f.lists) {
          auto g = NeighborGraph(*catalog_->Get(name), f.word, k, expand, measure);
          json edges = json::array();
          for (const auto& e : g.edges()) {
            edges.push_back({g.nodes()[e.a], g.nodes()[e.b], e.weight});
          }
          graphs.push_back({{"matrix", name}, {"nodes", g.nodes()}, {"edges", edges}});
        }
        file["graphs"] = graphs;
      }
      files.push_back(std::move(file));
    }
    return Json(200, {{"measure", measure.name}, {"k", k}, {"files", files},
                      {"oov", OovJson(out.oov)}});
  } catch (const UnknownMatrix& e) {
    return Error(404, e.what(), {{"matrix", e.name()}});
  } catch (const OovError& e) {
    return Error(400, "out of vocabulary", {{"word", e.word()}, {"matrix", e.matrix()}});
  } catch (const BadRequest& e) {
    return Error(400, e.what());
  } catch (const std::invalid_argument& e) {
    return Error(400, e.what());
  } catch (const json::exception& e) {
    return Error(400, e.what());
  } catch (const std::exception& e) {
    return Error(500, e.what());
  }
}

BindAddress ParseBind(const std::string& spec) {
  BindAddress addr;
  if (spec.empty()) return addr;
  auto colon = spec.rfind(':');
  std::string port = spec;
  if (colon != std::string::npos) {
    if (colon > 0) addr.host = spec.substr(0, colon);
    port = spec.substr(colon + 1);
  } else if (spec.find_first_not_of("0123456789") != std::string::npos) {
    addr.host = spec;
    return addr;
  }
  if (port.empty() || port.find_first_not_of("0123456789") != std::string::npos ||
      port.size() > 5 || std::stoi(port) > 65535) {
    throw std::invalid_argument("bad bind address '" + spec + "'");
  }
  addr.port = std::stoi(port);
  return addr;
}

HttpServer::HttpServer(std::shared_ptr<const MatrixCatalog> catalog)
    : service_(std::move(catalog)), server_(std::make_unique<httplib::Server>()) {
  auto handler = [this](const httplib::Request& req, httplib::Response& res) {
    Response r = service_.Handle(req.method, req.path, req.body);
    res.status = r.status;
    res.set_content(r.body, "application/json");
  };
  server_->Get(R"(/api/.*)", handler);
  server_->Post(R"(/api/.*)", handler);
}

HttpServer::~HttpServer() { Stop(); }

int HttpServer::Start(const BindAddress& addr) {
  int port = addr.port;
  if (port == 0) {
    port = server_->bind_to_any_port(addr.host);
  } else if (!server_->bind_to_port(addr.host, port)) {
    port = -1;
  }
  if (port < 0) {
    throw std::runtime_error("cannot bind " + addr.host + ":" + std::to_string(addr.port));
  }
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return port;
}

void HttpServer::Stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
}

void HttpServer::Wait() {
  if (thread_.joinable()) thread_.join();
}

}  // namespace domavec
