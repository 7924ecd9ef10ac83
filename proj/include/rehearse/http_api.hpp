#pragma once

#include <memory>
#include <string>

#include "rehearse/error.hpp"
#include "rehearse/service.hpp"

namespace rehearse {

/// HTTP status for a domain error.
int http_status(ErrorCode code);

/// JSON-over-HTTP front end of a GameService. Routes:
///   POST /players                                  {seed?}
///   GET  /players/{id}/session
///   POST /players/{id}/challenges/{cid}/answer     {submission}
///   POST /players/{id}/challenges/{cid}/give_up
///   POST /players/{id}/challenges/{cid}/hint       {kind?: verbal_cues|letter_reveal}
///   GET  /players/{id}/report?period=day|week|month
///   GET  /players/{id}/notifications
///   POST /auth/{id}/reset
///   POST /auth/{id}/reset/{token}                  {answers: [...]}
///   GET  /admin/clock, POST /admin/clock           {set?, advance?}  (operator)
///   GET  /health
class ApiServer {
public:
    explicit ApiServer(GameService& service);
    ~ApiServer();
    ApiServer(const ApiServer&) = delete;
    ApiServer& operator=(const ApiServer&) = delete;

    /// Binds; port 0 picks a free port. Returns the bound port.
    int bind(const std::string& host, int port);
    /// Serves until stop(). Blocks.
    void listen();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace rehearse
