#include <httplib.h>

#include "cybok/error.hpp"
#include "cybok/service.hpp"

namespace cybok {

using nlohmann::json;

struct HttpServer::Impl {
    AnalysisService& service;
    httplib::Server server;
    bool bound = false;

    explicit Impl(AnalysisService& s) : service(s) {}
};

namespace {

void send_json(httplib::Response& res, const json& body, int status = 200) {
    res.status = status;
    res.set_content(body.dump(2, ' ', false, json::error_handler_t::replace) + "\n", "application/json");
}

void send_error(httplib::Response& res, int status, std::string_view kind, const std::string& message) {
    send_json(res, json{{"error", kind}, {"message", message}}, status);
}

// Maps library exceptions onto HTTP status codes.
template <typename Handler>
httplib::Server::Handler guarded(Handler handler) {
    return [handler](const httplib::Request& req, httplib::Response& res) {
        try {
            handler(req, res);
        } catch (const NotFoundError& e) {
            send_error(res, 404, "not_found", e.what());
        } catch (const ParseError& e) {
            send_error(res, 400, "parse_error", e.what());
        } catch (const ValidationError& e) {
            send_error(res, 400, "validation_error", e.what());
        } catch (const InvalidArgument& e) {
            send_error(res, 400, "invalid_argument", e.what());
        } catch (const json::exception& e) {
            send_error(res, 400, "invalid_argument", e.what());
        } catch (const std::exception& e) {
            send_error(res, 500, "internal_error", e.what());
        }
    };
}

std::size_t parse_size(const std::string& text, const char* name) {
    std::size_t pos = 0;
    unsigned long long v = 0;
    try {
        v = std::stoull(text, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos != text.size() || text.empty() || text[0] == '-') {
        throw InvalidArgument(std::string(name) + " must be a non-negative integer");
    }
    return static_cast<std::size_t>(v);
}

AnalysisOptions options_from(const httplib::Request& req) {
    AnalysisOptions options;
    if (req.has_param("target")) options.target = req.get_param_value("target");
    if (req.has_param("max_len")) options.max_len = parse_size(req.get_param_value("max_len"), "max_len");
    return options;
}

std::vector<std::string> keywords_from(const std::string& body) {
    const auto j = json::parse(body);
    const auto& list = j.is_object() ? j.at("keywords") : j;
    if (!list.is_array()) throw InvalidArgument("expected a JSON array of keywords");
    return list.get<std::vector<std::string>>();
}

}  // namespace

HttpServer::HttpServer(AnalysisService& service, std::optional<std::filesystem::path> static_dir)
    : impl_(std::make_unique<Impl>(service)) {
    auto& svr = impl_->server;
    auto& svc = impl_->service;

    svr.Post("/api/v1/sessions", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
                 const auto id = svc.create_session(req.body);
                 send_json(res, json{{"session_id", id}, {"revision", 0}}, 201);
             }));
    svr.Get(R"(/api/v1/sessions/([^/]+)/model)", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
                send_json(res, svc.model_json(req.matches[1]));
            }));
    svr.Put(R"(/api/v1/sessions/([^/]+)/elements/([^/]+)/descriptors/([^/]+))",
            guarded([&svc](const httplib::Request& req, httplib::Response& res) {
                const auto revision =
                    svc.edit_descriptor(req.matches[1], req.matches[2].str(), req.matches[3].str(), keywords_from(req.body));
                send_json(res, json{{"revision", revision}});
            }));
    svr.Post(R"(/api/v1/sessions/([^/]+)/analyze)", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
                 res.set_content(svc.analyze(req.matches[1], options_from(req)), "application/json");
             }));
    svr.Get(R"(/api/v1/sessions/([^/]+)/surface)", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
                send_json(res, json{{"surface", svc.surface(req.matches[1])}});
            }));
    svr.Get(R"(/api/v1/sessions/([^/]+)/chains)", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
                const auto options = options_from(req);
                if (!options.target) throw InvalidArgument("query parameter 'target' is required");
                send_json(res, svc.chains(req.matches[1], *options.target, options.max_len));
            }));
    svr.Get(R"(/api/v1/sessions/([^/]+)/export)", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
                res.set_content(svc.export_graphml(req.matches[1]), "application/graphml+xml");
            }));
    svr.Get(R"(/api/v1/corpus/entries/([^/]+))", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
                send_json(res, svc.corpus_entry(req.matches[1].str()));
            }));

    if (static_dir) {
        if (!svr.set_mount_point("/", static_dir->string())) {
            throw InvalidArgument("static directory " + static_dir->string() + " does not exist");
        }
    }
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
    int bound_port = port;
    if (port == 0) {
        bound_port = impl_->server.bind_to_any_port(host);
    } else if (!impl_->server.bind_to_port(host, port)) {
        bound_port = -1;
    }
    if (bound_port < 0) throw Error("cannot bind " + host + ":" + std::to_string(port));
    impl_->bound = true;
    return bound_port;
}

void HttpServer::listen() {
    if (!impl_->bound) throw Error("HttpServer::listen called before bind");
    impl_->server.listen_after_bind();
}

void HttpServer::stop() {
    if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

bool HttpServer::running() const { return impl_->server.is_running(); }

}  // namespace cybok
