#include "chronolens/http_server.hpp"

#include <httplib.h>

namespace chronolens {

bool serve(const Api& api, const ServerOptions& options) {
  httplib::Server server;
  auto dispatch = [&api](const httplib::Request& req, httplib::Response& res) {
    QueryParams params;
    for (const auto& [k, v] : req.params) params.emplace(k, v); // first value wins
    const auto r = api.handle(req.method, req.path, params, req.body);
    res.status = r.status;
    res.set_content(r.body, r.content_type);
  };
  server.Get(R"(/api/.*)", dispatch);
  server.Post(R"(/api/.*)", dispatch);
  server.Put(R"(/api/.*)", dispatch);
  server.Delete(R"(/api/.*)", dispatch);
  if (options.static_dir && !server.set_mount_point("/", options.static_dir->string())) return false;
  return server.listen(options.host, options.port);
}

} // namespace chronolens
