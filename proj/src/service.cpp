#include "adboin/service.hpp"

#include "adboin/errors.hpp"
#include "adboin/tables.hpp"

#include <httplib.h>

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <unistd.h>

namespace adboin {

using nlohmann::json;

namespace {

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

ServiceResponse error_response(const Error& e) {
    const int status = e.code() == ErrorCode::OutOfOrder ? 409 : 400;
    return {status, json{{"error", std::string(to_string(e.code()))}, {"message", e.what()}}};
}

ServiceResponse schema_error(const std::string& message) {
    return {400, json{{"error", "schema"}, {"message", message}}};
}

struct CohortRequest {
    int dose = 0; // zero-based
    OutcomeCounts2x2 counts;
};

CohortRequest parse_cohort(const std::string& body) {
    CohortRequest req;
    try {
        const auto j = json::parse(body);
        for (const auto& [key, _] : j.items())
            if (key != "dose" && key != "a" && key != "b" && key != "c" && key != "d")
                fail(ErrorCode::Schema, "unknown key '" + key + "' in cohort");
        req.dose = j.at("dose").get<int>() - 1;
        req.counts = j.get<OutcomeCounts2x2>();
    } catch (const json::exception& e) {
        fail(ErrorCode::Schema, std::string("malformed cohort: ") + e.what());
    }
    if (req.counts.a < 0 || req.counts.b < 0 || req.counts.c < 0 || req.counts.d < 0)
        fail(ErrorCode::InvalidArgument, "outcome counts must be nonnegative");
    return req;
}

json decision_body(const TrialEngine& engine) {
    const auto& s = engine.state();
    json body{{"schema_version", kStateSchemaVersion},
              {"status", to_string(s.status)},
              {"report", decision_report(engine)}};
    const Decision* last = engine.last_decision();
    body["decision"] = last ? json(*last) : json(nullptr);
    if (s.active()) {
        body["next_dose"] = s.current_dose + 1;
        body["next_cohort_size"] = s.next_cohort_size;
    } else {
        const auto obd = engine.final_selection();
        body["next_dose"] = nullptr;
        body["next_cohort_size"] = nullptr;
        body["selected_obd"] = obd ? json(*obd + 1) : json(nullptr);
    }
    return body;
}

template <typename F>
ServiceResponse guarded(F&& f) {
    try {
        return f();
    } catch (const Error& e) {
        return error_response(e);
    } catch (const json::exception& e) {
        return schema_error(e.what());
    }
}

} // namespace

TrialEngine replay_audit_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::InvalidArgument, "cannot open audit file " + path);
    std::optional<TrialEngine> engine;
    std::string line;
    std::uintmax_t valid_bytes = 0;
    bool torn = false;
    while (std::getline(in, line)) {
        const bool newline_terminated = !in.eof();
        const bool last = !newline_terminated || in.peek() == std::char_traits<char>::eof();
        if (line.empty()) {
            valid_bytes += 1;
            continue;
        }
        json rec;
        try {
            rec = json::parse(line);
        } catch (const json::exception&) {
            // A torn final write is dropped; damage anywhere else is fatal.
            if (last) {
                torn = true;
                break;
            }
            fail(ErrorCode::Schema, "corrupt audit record in " + path);
        }
        try {
            const auto op = rec.at("op").get<std::string>();
            if (op == "reset") {
                auto params = rec.at("params").get<DesignParams>();
                engine.emplace(params);
            } else if (op == "cohort") {
                if (!engine) fail(ErrorCode::Schema, "audit file must start with a reset record");
                engine->record_cohort(rec.at("dose").get<int>() - 1, rec.get<OutcomeCounts2x2>(),
                                      rec.at("timestamp").get<std::string>());
            } else {
                fail(ErrorCode::Schema, "unknown audit op '" + op + "'");
            }
        } catch (const json::exception& e) {
            fail(ErrorCode::Schema, std::string("malformed audit record: ") + e.what());
        }
        valid_bytes += line.size() + (newline_terminated ? 1 : 0);
    }
    if (!engine) fail(ErrorCode::Schema, "audit file has no reset record");
    if (torn) {
        in.close();
        std::filesystem::resize_file(path, valid_bytes);
    }
    return std::move(*engine);
}

TrialService::TrialService(const DesignParams& params, std::string audit_path)
    : engine_(params), audit_path_(std::move(audit_path)) {
    namespace fs = std::filesystem;
    const bool existing = fs::exists(audit_path_) && fs::file_size(audit_path_) > 0;
    if (existing) engine_ = replay_audit_file(audit_path_);
    wal_ = std::fopen(audit_path_.c_str(), "a");
    if (!wal_) fail(ErrorCode::InvalidArgument, "cannot open audit file " + audit_path_);
    if (existing) {
        std::ifstream tail(audit_path_, std::ios::binary | std::ios::ate);
        const auto size = static_cast<std::streamoff>(tail.tellg());
        char c = '\n';
        if (size > 0) {
            tail.seekg(size - 1);
            tail.get(c);
        }
        if (c != '\n') std::fputc('\n', wal_);
    }
    if (!existing) append_wal(json{{"op", "reset"}, {"params", params}});
}

TrialService::~TrialService() {
    if (wal_) std::fclose(wal_);
}

void TrialService::append_wal(const json& record) {
    const std::string line = record.dump() + "\n";
    if (std::fwrite(line.data(), 1, line.size(), wal_) != line.size() || std::fflush(wal_) != 0)
        fail(ErrorCode::StateViolation, "failed to write audit file");
    ::fsync(::fileno(wal_));
}

TrialEngine TrialService::engine() const {
    std::shared_lock lock(mu_);
    return engine_;
}

ServiceResponse TrialService::get_design() const {
    std::shared_lock lock(mu_);
    return {200, json{{"schema_version", kStateSchemaVersion},
                      {"params", engine_.state().params},
                      {"benchmark",
                       {{"u_b", engine_.state().params.benchmark().u_b},
                        {"u_tilde", engine_.state().params.benchmark().u_tilde}}}}};
}

ServiceResponse TrialService::get_tables() const {
    std::shared_lock lock(mu_);
    const auto& p = engine_.state().params;
    json safety = json::array();
    std::vector<int> grid;
    for (int n = p.base_cohort; n <= p.max_n; n += p.base_cohort) grid.push_back(n);
    for (const auto& r : safety_table(p, grid))
        safety.push_back({{"n", r.n}, {"escalate_le", r.escalate_le}, {"deescalate_ge", r.deescalate_ge}});
    json rds = json::array();
    for (const auto& r : rds_table(p, default_rds_grid(p), p.max_n))
        rds.push_back({{"n", r.n}, {"tox", r.tox}, {"eff", r.eff}, {"dp", r.dp}, {"rank", r.rank}});
    json expansion = json::array();
    for (const auto& r : expansion_table(p, p.theta, grid))
        expansion.push_back({{"n", r.n}, {"tox", r.tox}, {"min_eff", r.min_eff}});
    return {200, json{{"schema_version", kStateSchemaVersion},
                      {"safety", safety},
                      {"rds", rds},
                      {"expansion", {{"theta", p.theta}, {"rows", expansion}}}}};
}

ServiceResponse TrialService::get_state() const {
    std::shared_lock lock(mu_);
    return {200, json(engine_.state())};
}

ServiceResponse TrialService::get_decision() const {
    std::shared_lock lock(mu_);
    return {200, decision_body(engine_)};
}

ServiceResponse TrialService::get_audit() const {
    std::shared_lock lock(mu_);
    return {200, json{{"schema_version", kStateSchemaVersion},
                      {"audit", json(engine_.state())["audit"]}}};
}

ServiceResponse TrialService::post_cohort(const std::string& body) {
    return guarded([&] {
        const auto req = parse_cohort(body);
        std::unique_lock lock(mu_);
        TrialEngine next = engine_;
        const auto stamp = utc_timestamp();
        next.record_cohort(req.dose, req.counts, stamp);
        json rec = req.counts;
        rec["op"] = "cohort";
        rec["dose"] = req.dose + 1;
        rec["timestamp"] = stamp;
        append_wal(rec);
        engine_ = std::move(next);
        return ServiceResponse{200, decision_body(engine_)};
    });
}

ServiceResponse TrialService::post_whatif(const std::string& body) const {
    return guarded([&] {
        const auto req = parse_cohort(body);
        std::shared_lock lock(mu_);
        if (!engine_.state().active())
            return ServiceResponse{200, json{{"decision", nullptr},
                                             {"status", to_string(engine_.state().status)}}};
        TrialEngine copy = engine_;
        copy.record_cohort(req.dose, req.counts);
        return ServiceResponse{200, decision_body(copy)};
    });
}

ServiceResponse TrialService::post_reset(const std::string& body) {
    return guarded([&] {
        std::unique_lock lock(mu_);
        DesignParams params = engine_.state().params;
        if (!body.empty()) {
            const auto j = json::parse(body);
            for (const auto& [key, _] : j.items())
                if (key != "params") fail(ErrorCode::Schema, "unknown key '" + key + "' in reset");
            if (j.contains("params")) params = j.at("params").get<DesignParams>();
        }
        TrialEngine fresh(params);
        append_wal(json{{"op", "reset"}, {"params", params}});
        engine_ = std::move(fresh);
        return ServiceResponse{200, json(engine_.state())};
    });
}

void TrialService::mount(httplib::Server& server) {
    auto reply = [](httplib::Response& res, const ServiceResponse& r) {
        res.status = r.status;
        res.set_content(r.body.dump(), "application/json");
    };
    server.Get("/design", [this, reply](const httplib::Request&, httplib::Response& res) {
        reply(res, get_design());
    });
    server.Get("/tables", [this, reply](const httplib::Request&, httplib::Response& res) {
        reply(res, get_tables());
    });
    server.Get("/state", [this, reply](const httplib::Request&, httplib::Response& res) {
        reply(res, get_state());
    });
    server.Get("/decision", [this, reply](const httplib::Request&, httplib::Response& res) {
        reply(res, get_decision());
    });
    server.Get("/audit", [this, reply](const httplib::Request&, httplib::Response& res) {
        reply(res, get_audit());
    });
    server.Post("/cohort", [this, reply](const httplib::Request& req, httplib::Response& res) {
        reply(res, post_cohort(req.body));
    });
    server.Post("/whatif", [this, reply](const httplib::Request& req, httplib::Response& res) {
        reply(res, post_whatif(req.body));
    });
    server.Post("/reset", [this, reply](const httplib::Request& req, httplib::Response& res) {
        reply(res, post_reset(req.body));
    });
}

int serve(const DesignParams& params, const std::string& audit_path, int port) {
    TrialService service(params, audit_path);
    httplib::Server server;
    service.mount(server);
    if (!server.listen("127.0.0.1", port)) return 1;
    return 0;
}

} // namespace adboin
