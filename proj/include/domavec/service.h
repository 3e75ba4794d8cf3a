// Read-only HTTP+JSON query service over a matrix catalog.

#ifndef DOMAVEC_SERVICE_H_
#define DOMAVEC_SERVICE_H_

#include <memory>
#include <string>
#include <thread>

#include "domavec/catalog.h"

namespace httplib {
class Server;
}

namespace domavec {

struct Response {
  int status = 200;
  std::string body;  // JSON
};

// Request dispatch without sockets. Handlers only read the catalog, so one
// instance serves concurrent requests.
//
//   GET  /api/matrices
//   POST /api/vectors     {matrices, words}
//   POST /api/similarity  {matrices, words, targets, measure}
//   POST /api/neighbors   {matrices, words, k, measure, expand}
//   POST /api/features    {target, configRef, pk, ck, measure}
//
// Query responses carry a "text" field (or per-word "files") identical to
// the CLI output files. OOV words are listed under "oov" and skipped; an OOV
// feature target is a 400 with {error, word, matrix}. Unknown matrices are
// 404, malformed requests 400.
class QueryService {
 public:
  explicit QueryService(std::shared_ptr<const MatrixCatalog> catalog);

  Response Handle(const std::string& method, const std::string& path,
                  const std::string& body) const;

 private:
  std::shared_ptr<const MatrixCatalog> catalog_;
};

// "host:port", ":port" or "host"; missing parts default to 127.0.0.1:8080.
struct BindAddress {
  std::string host = "127.0.0.1";
  int port = 8080;
};
BindAddress ParseBind(const std::string& spec);

class HttpServer {
 public:
  explicit HttpServer(std::shared_ptr<const MatrixCatalog> catalog);
  ~HttpServer();

  // Binds and serves on a background thread. Port 0 picks a free port.
  // Returns the bound port.
  int Start(const BindAddress& addr);
  // Stops accepting and waits for in-flight requests.
  void Stop();
  // Blocks until Stop() is called from elsewhere.
  void Wait();

 private:
  QueryService service_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
};

}  // namespace domavec

#endif  // DOMAVEC_SERVICE_H_
