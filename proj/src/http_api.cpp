#include "rehearse/http_api.hpp"

#include <httplib.h>

#include "rehearse/challenge.hpp"
#include "rehearse/engagement.hpp"

namespace rehearse {

using json = nlohmann::json;

int http_status(ErrorCode code) {
    switch (code) {
        case ErrorCode::UnknownPlayer:
        case ErrorCode::UnknownChallenge:
        case ErrorCode::UnknownSession:
        case ErrorCode::SessionUnknown:
        case ErrorCode::UnknownField: return 404;
        case ErrorCode::InsufficientPoints: return 402;
        case ErrorCode::DuplicateGrant:
        case ErrorCode::NotStuck:
        case ErrorCode::PlayerExists: return 409;
        case ErrorCode::EntropyUnattainable: return 422;
        case ErrorCode::StorageFailure:
        case ErrorCode::CorruptLog: return 500;
        default: return 400;
    }
}

struct ApiServer::Impl {
    GameService& service;
    httplib::Server server;

    explicit Impl(GameService& s) : service(s) {}

    static void send(httplib::Response& res, int status, const json& body) {
        res.status = status;
        res.set_content(body.dump(), "application/json");
    }

    static json body_of(const httplib::Request& req) {
        if (req.body.empty()) return json::object();
        try {
            json j = json::parse(req.body);
            if (!j.is_object()) throw Error(ErrorCode::ParseError, "request body must be an object");
            return j;
        } catch (const json::exception& e) {
            throw Error(ErrorCode::ParseError, std::string("request body: ") + e.what());
        }
    }

    bool authorized(const httplib::Request& req) const {
        const auto& token = service.options().operator_token;
        return !token || req.get_header_value("Authorization") == "Bearer " + *token;
    }

    template <typename F>
    httplib::Server::Handler wrap(int ok_status, F f) {
        return [ok_status, f](const httplib::Request& req, httplib::Response& res) {
            try {
                send(res, ok_status, f(req));
            } catch (const Error& e) {
                send(res, http_status(e.code()), {{"error", to_string(e.code())}, {"message", e.what()}});
            } catch (const json::exception& e) {
                send(res, 400, {{"error", "ParseError"}, {"message", e.what()}});
            } catch (const std::exception& e) {
                send(res, 500, {{"error", "Internal"}, {"message", e.what()}});
            }
        };
    }

    void routes() {
        server.Get("/health", wrap(200, [](const httplib::Request&) { return json{{"ok", true}}; }));

        server.Post("/players", wrap(201, [this](const httplib::Request& req) {
            const json b = body_of(req);
            std::optional<std::uint64_t> seed;
            if (b.contains("seed") && !b["seed"].is_null()) seed = b["seed"].get<std::uint64_t>();
            return service.create_player(seed);
        }));
        server.Get(R"(/players/([A-Za-z0-9_-]+)/session)", wrap(200, [this](const httplib::Request& req) {
            return service.session(req.matches[1]);
        }));
        server.Post(R"(/players/([A-Za-z0-9_-]+)/challenges/([A-Za-z0-9_.-]+)/answer)",
                    wrap(200, [this](const httplib::Request& req) {
                        const json b = body_of(req);
                        return service.answer(req.matches[1], req.matches[2], b.at("submission").get<std::string>());
                    }));
        server.Post(R"(/players/([A-Za-z0-9_-]+)/challenges/([A-Za-z0-9_.-]+)/give_up)",
                    wrap(200, [this](const httplib::Request& req) {
                        return service.give_up(req.matches[1], req.matches[2]);
                    }));
        server.Post(R"(/players/([A-Za-z0-9_-]+)/challenges/([A-Za-z0-9_.-]+)/hint)",
                    wrap(200, [this](const httplib::Request& req) {
                        const json b = body_of(req);
                        const auto kind = hint_kind_from_string(b.value("kind", std::string("verbal_cues")));
                        return service.hint(req.matches[1], req.matches[2], kind);
                    }));
        server.Get(R"(/players/([A-Za-z0-9_-]+)/report)", wrap(200, [this](const httplib::Request& req) {
            const auto period = req.has_param("period") ? req.get_param_value("period") : std::string("day");
            return service.report(req.matches[1], report_period_from_string(period));
        }));
        server.Get(R"(/players/([A-Za-z0-9_-]+)/notifications)", wrap(200, [this](const httplib::Request& req) {
            return service.notifications(req.matches[1]);
        }));
        server.Post(R"(/auth/([A-Za-z0-9_-]+)/reset)", wrap(201, [this](const httplib::Request& req) {
            return service.start_reset(req.matches[1]);
        }));
        server.Post(R"(/auth/([A-Za-z0-9_-]+)/reset/([0-9a-f]+))", wrap(200, [this](const httplib::Request& req) {
            const json b = body_of(req);
            return service.finish_reset(req.matches[1], req.matches[2],
                                        b.at("answers").get<std::vector<std::string>>());
        }));

        server.Get("/admin/clock", [this](const httplib::Request& req, httplib::Response& res) {
            if (!authorized(req)) return send(res, 401, {{"error", "Unauthorized"}});
            send(res, 200, {{"now", service.now()}, {"manual", service.manual_clock() != nullptr}});
        });
        server.Post("/admin/clock", [this](const httplib::Request& req, httplib::Response& res) {
            if (!authorized(req)) return send(res, 401, {{"error", "Unauthorized"}});
            ManualClock* clock = service.manual_clock();
            if (!clock) return send(res, 409, {{"error", "ClockNotManual"}});
            wrap(200, [clock](const httplib::Request& r) {
                const json b = body_of(r);
                if (b.contains("set")) {
                    const auto t = b["set"].get<Timestamp>();
                    if (t < clock->now()) throw Error(ErrorCode::InvalidConfig, "the clock only moves forward");
                    clock->set(t);
                }
                if (b.contains("advance")) {
                    const auto delta = b["advance"].get<Timestamp>();
                    if (delta < 0) throw Error(ErrorCode::InvalidConfig, "the clock only moves forward");
                    clock->advance(delta);
                }
                return json{{"now", clock->now()}};
            })(req, res);
        });
    }
};

ApiServer::ApiServer(GameService& service) : impl_(std::make_unique<Impl>(service)) { impl_->routes(); }

ApiServer::~ApiServer() { stop(); }

int ApiServer::bind(const std::string& host, int port) {
    if (port == 0) {
        const int bound = impl_->server.bind_to_any_port(host);
        if (bound < 0) throw Error(ErrorCode::StorageFailure, "cannot bind " + host);
        return bound;
    }
    if (!impl_->server.bind_to_port(host, port)) {
        throw Error(ErrorCode::StorageFailure, "cannot bind " + host + ":" + std::to_string(port));
    }
    return port;
}

void ApiServer::listen() { impl_->server.listen_after_bind(); }

void ApiServer::stop() {
    if (impl_) impl_->server.stop();
}

}  // namespace rehearse
