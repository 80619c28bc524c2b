#pragma once
// Local JSON-over-HTTP decision service for live trial conduct.
//
// Binds to localhost only and has no authentication: it is a single-operator
// tool. Every mutation is appended to a write-ahead audit file (JSON lines)
// before it is applied, so restarting with the same file restores the trial.

#include "adboin/trial_io.hpp"

#include <json.hpp>

#include <cstdio>
#include <shared_mutex>
#include <string>

namespace httplib {
class Server;
}

namespace adboin {

struct ServiceResponse {
    int status = 200;
    nlohmann::json body;
};

class TrialService {
public:
    // Replays `audit_path` when it exists and is non-empty, otherwise starts
    // a fresh trial with `params` and writes the initial reset record.
    TrialService(const DesignParams& params, std::string audit_path);
    ~TrialService();

    TrialService(const TrialService&) = delete;
    TrialService& operator=(const TrialService&) = delete;

    ServiceResponse get_design() const;
    ServiceResponse get_tables() const;
    ServiceResponse get_state() const;
    ServiceResponse get_decision() const;
    ServiceResponse get_audit() const;
    ServiceResponse post_cohort(const std::string& body);
    ServiceResponse post_whatif(const std::string& body) const;
    ServiceResponse post_reset(const std::string& body);

    // Snapshot of the engine, for tests and the CLI.
    TrialEngine engine() const;

    void mount(httplib::Server& server);

private:
    void append_wal(const nlohmann::json& record);
    void replay_wal();

    mutable std::shared_mutex mu_;
    TrialEngine engine_;
    std::string audit_path_;
    std::FILE* wal_ = nullptr;
};

// Builds the audit-replayed engine from a write-ahead audit file.
TrialEngine replay_audit_file(const std::string& path);

// Blocks serving on 127.0.0.1:port until the process is stopped.
int serve(const DesignParams& params, const std::string& audit_path, int port);

} // namespace adboin
