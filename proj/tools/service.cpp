#include "service.hpp"

#include "edgetap/api.hpp"

namespace edgetap::service {
namespace {

void send(httplib::Response& res, const api::Reply& reply) {
  res.status = reply.status;
  res.set_content(reply.body, reply.content_type);
}

}  // namespace

void install_routes(httplib::Server& server, const PresetRegistry& presets) {
  // The playground is served from its own origin.
  server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                              {"Access-Control-Allow-Headers", "Content-Type"},
                              {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
  server.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.status = 204;
  });
  server.Post("/predict", [&presets](const httplib::Request& req, httplib::Response& res) {
    send(res, api::handle_predict(req.body, presets));
  });
  server.Get("/presets", [&presets](const httplib::Request&, httplib::Response& res) {
    send(res, api::handle_presets(presets));
  });
  server.Post("/curve", [](const httplib::Request& req, httplib::Response& res) {
    send(res, api::handle_curve(req.body));
  });
  server.Get("/health", [](const httplib::Request&, httplib::Response& res) {
    send(res, api::handle_health());
  });
}

bool serve(const std::string& host, int port, const PresetRegistry& presets) {
  httplib::Server server;
  install_routes(server, presets);
  return server.listen(host, port);
}

}  // namespace edgetap::service
