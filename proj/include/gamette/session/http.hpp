#pragma once

#include <memory>
#include <string>
#include <thread>

#include <httplib.h>

#include "gamette/session/client.hpp"

// JSON over HTTP transport for the session service.
//
//   GET  /v1/health                    -> {"status":"ok"}
//   POST /v1/sessions                  {"study":"study1","seed":7?} -> 201 {"session","condition","reply"}
//   GET  /v1/sessions/{id}             -> current reply
//   POST /v1/sessions/{id}/messages    message -> reply
//   GET  /v1/sessions/{id}/events      -> event log, one JSON record per line
//
// Errors carry {"error":{"code","message","expected_phase"?}} with status
// 400 malformed, 404 unknown_session, 409 out_of_phase, 503 storage_unavailable.
namespace gamette::session {

inline int http_status(const std::string& code) {
  if (code == "out_of_phase") return 409;
  if (code == "unknown_session") return 404;
  if (code == "storage_unavailable") return 503;
  return 400;
}

inline Json error_body(const ProtocolError& e) {
  Json err{{"code", e.code()}, {"message", e.what()}};
  if (e.expected()) err["expected_phase"] = std::string(to_string(*e.expected()));
  return Json{{"error", err}};
}

class HttpServer {
 public:
  explicit HttpServer(SessionService& service) : service_(service) { routes(); }
  ~HttpServer() { stop(); }
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Binds (port 0 picks a free port) and serves on a background thread.
  int start(const std::string& host = "127.0.0.1", int port = 0) {
    port_ = port == 0 ? server_.bind_to_any_port(host) : (server_.bind_to_port(host, port) ? port : -1);
    if (port_ < 0) throw StorageError("cannot bind " + host + ":" + std::to_string(port));
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
    return port_;
  }

  // Serves on the calling thread until stop() is called elsewhere.
  bool listen(const std::string& host, int port) { return server_.listen(host, port); }

  void stop() {
    server_.stop();
    if (thread_.joinable()) thread_.join();
  }

  int port() const { return port_; }

 private:
  static void send_json(httplib::Response& res, int status, const Json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
  }

  template <class F>
  static void guarded(httplib::Response& res, F&& f) {
    try {
      f();
    } catch (const ProtocolError& e) {
      send_json(res, http_status(e.code()), error_body(e));
    } catch (const std::exception& e) {
      send_json(res, 500, Json{{"error", {{"code", "internal"}, {"message", e.what()}}}});
    }
  }

  static Json parse_body(const httplib::Request& req) {
    auto j = Json::parse(req.body, nullptr, false);
    if (j.is_discarded()) throw ProtocolError("malformed", "request body is not valid JSON");
    return j;
  }

  void routes() {
    server_.Get("/v1/health", [](const httplib::Request&, httplib::Response& res) {
      send_json(res, 200, Json{{"status", "ok"}});
    });
    server_.Post("/v1/sessions", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const Json body = req.body.empty() ? Json::object() : parse_body(req);
        if (!body.is_object()) throw ProtocolError("malformed", "body must be an object");
        const auto tag = body.value("study", std::string("study1"));
        const auto study = protocol::parse_study(tag);
        if (!study) throw ProtocolError("malformed", "unknown study tag '" + tag + "'");
        std::optional<std::uint64_t> seed;
        if (body.contains("seed")) {
          if (!body.at("seed").is_number_unsigned()) throw ProtocolError("malformed", "seed must be a non-negative integer");
          seed = body.at("seed").get<std::uint64_t>();
        }
        const auto created = service_.create_session(*study, seed);
        send_json(res, 201,
                  Json{{"session", created.id}, {"condition", to_json(created.condition)}, {"reply", created.reply}});
      });
    });
    server_.Get(R"(/v1/sessions/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] { send_json(res, 200, service_.status(req.matches[1])); });
    });
    server_.Post(R"(/v1/sessions/([^/]+)/messages)", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] { send_json(res, 200, service_.handle_message(req.matches[1], parse_body(req))); });
    });
    server_.Get(R"(/v1/sessions/([^/]+)/events)", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        std::string body;
        for (const auto& e : service_.events(req.matches[1])) body += to_line(e) + "\n";
        res.status = 200;
        res.set_content(body, "application/x-ndjson");
      });
    });
  }

  SessionService& service_;
  httplib::Server server_;
  std::thread thread_;
  int port_ = -1;
};

// Talks to an HttpServer; maps error bodies back to ProtocolError.
class HttpClient : public SessionClient {
 public:
  HttpClient(const std::string& host, int port) : client_(host, port) {
    client_.set_connection_timeout(5);
    client_.set_read_timeout(30);
  }

  CreatedSession create(protocol::Study study, std::optional<std::uint64_t> seed) override {
    Json body{{"study", std::string(protocol::to_string(study))}};
    if (seed) body["seed"] = *seed;
    const Json r = post("/v1/sessions", body, 201);
    return {r.at("session").get<std::string>(), condition_from_json(r.at("condition")), r.at("reply")};
  }

  Json send(const std::string& session, const Json& message) override {
    return post("/v1/sessions/" + session + "/messages", message, 200);
  }

  std::vector<SessionEvent> events(const std::string& session) {
    auto res = client_.Get("/v1/sessions/" + session + "/events");
    if (!res) throw ProtocolError("storage_unavailable", "service unreachable");
    if (res->status != 200) throw_error(res->status, res->body);
    std::vector<SessionEvent> out;
    std::size_t pos = 0;
    while (pos < res->body.size()) {
      const auto nl = res->body.find('\n', pos);
      const auto line = res->body.substr(pos, nl == std::string::npos ? std::string::npos : nl - pos);
      if (!line.empty()) out.push_back(from_line(line));
      if (nl == std::string::npos) break;
      pos = nl + 1;
    }
    return out;
  }

  bool healthy() {
    auto res = client_.Get("/v1/health");
    return res && res->status == 200;
  }

 private:
  Json post(const std::string& path, const Json& body, int ok) {
    auto res = client_.Post(path, body.dump(), "application/json");
    if (!res) throw ProtocolError("storage_unavailable", "service unreachable: " + httplib::to_string(res.error()));
    if (res->status != ok) throw_error(res->status, res->body);
    return Json::parse(res->body);
  }

  [[noreturn]] static void throw_error(int status, const std::string& body) {
    const auto j = Json::parse(body, nullptr, false);
    if (j.is_discarded() || !j.contains("error"))
      throw ProtocolError("malformed", "HTTP " + std::to_string(status) + ": " + body);
    const auto& err = j.at("error");
    std::optional<Phase> expected;
    if (err.contains("expected_phase")) expected = parse_phase(err.at("expected_phase").get<std::string>());
    throw ProtocolError(err.value("code", std::string("malformed")), err.value("message", std::string{}), expected);
  }

  httplib::Client client_;
};

}  // namespace gamette::session
