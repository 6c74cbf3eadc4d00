#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "cityscan/ingest.hpp"

namespace httplib {
class Server;
}

namespace cityscan::api {

struct Request {
  std::string path;
  std::multimap<std::string, std::string> params;
};

struct Response {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
  std::map<std::string, std::string> headers;
};

/// Request handling over one immutable dataset snapshot. Handlers are pure
/// functions of (snapshot, params) and safe to call from many threads.
/// Until a dataset is loaded every endpoint answers 503.
class Service {
 public:
  Service() = default;
  explicit Service(std::shared_ptr<const CityDataset> dataset);

  void load(std::shared_ptr<const CityDataset> dataset);
  bool loaded() const;

  Response handle(const Request& request) const;

 private:
  std::shared_ptr<const CityDataset> snapshot() const;

  mutable std::mutex mutex_;
  std::shared_ptr<const CityDataset> dataset_;
};

struct ServeOptions {
  std::string host = "0.0.0.0";
  int port = 8080;
  std::string ui_dir;  // served at / when non-empty
};

/// Registers the /api routes (and the static UI mount) on `server`.
void mount(httplib::Server& server, const Service& service, const ServeOptions& options);

/// Blocks serving HTTP until the server is stopped. Returns false when the
/// port could not be bound.
bool serve(const Service& service, const ServeOptions& options);

}  // namespace cityscan::api
