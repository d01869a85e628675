#pragma once

#include <optional>
#include <string>

#include "gamette/session/service.hpp"

namespace gamette::session {

// What a player (human UI or bot) needs from the service, independent of
// transport. Rejections surface as ProtocolError.
class SessionClient {
 public:
  virtual ~SessionClient() = default;
  virtual CreatedSession create(protocol::Study study, std::optional<std::uint64_t> seed) = 0;
  virtual Json send(const std::string& session, const Json& message) = 0;
};

// Calls an in-process service directly.
class LocalClient : public SessionClient {
 public:
  explicit LocalClient(SessionService& service) : service_(service) {}
  CreatedSession create(protocol::Study study, std::optional<std::uint64_t> seed) override {
    return service_.create_session(study, seed);
  }
  Json send(const std::string& session, const Json& message) override {
    return service_.handle_message(session, message);
  }

 private:
  SessionService& service_;
};

}  // namespace gamette::session
