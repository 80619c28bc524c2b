#include "adboin/tables.hpp"

#include "adboin/errors.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace adboin {

std::vector<SafetyRow> safety_table(const DesignParams& params, const std::vector<int>& n_grid) {
    const auto bp = interval_boundaries(params);
    std::vector<SafetyRow> rows;
    rows.reserve(n_grid.size());
    for (int n : n_grid) {
        const auto cb = count_boundaries(bp, n);
        rows.push_back({n, cb.escalate_if_tox_le, cb.deescalate_if_tox_ge});
    }
    return rows;
}

std::vector<RdsRow> rds_table(const DesignParams& params, const std::vector<int>& n_grid,
                              int per_dose_cap) {
    std::vector<int> grid = n_grid;
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    std::vector<RdsRow> rows;
    for (int n : grid) {
        if (n < 0) fail(ErrorCode::InvalidArgument, "grid counts must be nonnegative");
        if (n > per_dose_cap) continue;
        for (int tox = 0; tox <= n; ++tox) {
            for (int eff = 0; eff <= n; ++eff) {
                rows.push_back({n, tox, eff, dose_desirability(n, tox, eff, params), 0});
            }
        }
    }
    std::sort(rows.begin(), rows.end(), [](const RdsRow& l, const RdsRow& r) {
        if (l.dp != r.dp) return l.dp < r.dp;
        if (l.n != r.n) return l.n < r.n;
        if (l.tox != r.tox) return l.tox > r.tox;
        return l.eff < r.eff;
    });
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i].rank = static_cast<int>(i) + 1;
    return rows;
}

std::vector<ExpansionRow> expansion_table(const DesignParams& params, double theta,
                                          const std::vector<int>& n_grid) {
    if (!(theta > 0.0 && theta < 1.0))
        fail(ErrorCode::InvalidArgument, "theta must lie in (0,1)");
    DesignParams p = params;
    p.theta = theta;
    std::vector<ExpansionRow> rows;
    for (int n : n_grid) {
        for (int tox = 0; tox <= n; ++tox) {
            for (int eff = 0; eff <= n; ++eff) {
                if (expansion_qualifies(n, tox, eff, p)) {
                    rows.push_back({n, tox, eff});
                    break;
                }
            }
        }
    }
    return rows;
}

std::vector<int> default_rds_grid(const DesignParams& params) {
    std::vector<int> grid;
    for (int n = 0; n <= params.max_n; n += params.base_cohort) grid.push_back(n);
    return grid;
}

std::string format_probability(double p) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", p);
    return buf;
}

std::string safety_csv(const std::vector<SafetyRow>& rows) {
    std::ostringstream os;
    os << "n,escalate_le,deescalate_ge\n";
    for (const auto& r : rows) os << r.n << ',' << r.escalate_le << ',' << r.deescalate_ge << '\n';
    return os.str();
}

std::string safety_markdown(const std::vector<SafetyRow>& rows) {
    std::ostringstream os;
    os << "| n | escalate_le | deescalate_ge |\n|---|---|---|\n";
    for (const auto& r : rows)
        os << "| " << r.n << " | " << r.escalate_le << " | " << r.deescalate_ge << " |\n";
    return os.str();
}

std::string rds_csv(const std::vector<RdsRow>& rows) {
    std::ostringstream os;
    os << "n,tox,eff,dp,rank\n";
    for (const auto& r : rows)
        os << r.n << ',' << r.tox << ',' << r.eff << ',' << format_probability(r.dp) << ','
           << r.rank << '\n';
    return os.str();
}

std::string rds_markdown(const std::vector<RdsRow>& rows) {
    std::ostringstream os;
    os << "| n | tox | eff | dp | rank |\n|---|---|---|---|---|\n";
    for (const auto& r : rows)
        os << "| " << r.n << " | " << r.tox << " | " << r.eff << " | " << format_probability(r.dp)
           << " | " << r.rank << " |\n";
    return os.str();
}

std::string expansion_csv(const std::vector<ExpansionRow>& rows) {
    std::ostringstream os;
    os << "n,tox,min_eff\n";
    for (const auto& r : rows) os << r.n << ',' << r.tox << ',' << r.min_eff << '\n';
    return os.str();
}

std::string expansion_markdown(const std::vector<ExpansionRow>& rows, double theta) {
    std::ostringstream os;
    os << "Cohort expansion when desirability probability > " << format_probability(theta)
       << "\n\n| n | tox | min_eff |\n|---|---|---|\n";
    for (const auto& r : rows)
        os << "| " << r.n << " | " << r.tox << " | " << r.min_eff << " |\n";
    return os.str();
}

} // namespace adboin
