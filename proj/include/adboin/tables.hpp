#pragma once
// Protocol tables: BOIN safety boundaries, rank-based desirability scores and
// the cohort-expansion lookup used at each dose assignment.

#include "adboin/design_rules.hpp"

#include <optional>
#include <string>
#include <vector>

namespace adboin {

struct SafetyRow {
    int n = 0;
    int escalate_le = 0;
    int deescalate_ge = 0;
};

struct RdsRow {
    int n = 0;
    int tox = 0;
    int eff = 0;
    double dp = 0.0;
    int rank = 0;
};

struct ExpansionRow {
    int n = 0;
    int tox = 0;
    int min_eff = 0;
};

std::vector<SafetyRow> safety_table(const DesignParams& params, const std::vector<int>& n_grid);

// All (n, tox, eff) over the grid ranked by ascending desirability; grid
// entries above per_dose_cap are skipped. Ties order by n asc, tox desc,
// eff asc.
std::vector<RdsRow> rds_table(const DesignParams& params, const std::vector<int>& n_grid,
                              int per_dose_cap);

std::vector<ExpansionRow> expansion_table(const DesignParams& params, double theta,
                                          const std::vector<int>& n_grid);

// {0, base, 2*base, ..., max_n}
std::vector<int> default_rds_grid(const DesignParams& params);

// 4 decimals, round-half-even on the binary value.
std::string format_probability(double p);

std::string safety_csv(const std::vector<SafetyRow>& rows);
std::string safety_markdown(const std::vector<SafetyRow>& rows);
std::string rds_csv(const std::vector<RdsRow>& rows);
std::string rds_markdown(const std::vector<RdsRow>& rows);
std::string expansion_csv(const std::vector<ExpansionRow>& rows);
std::string expansion_markdown(const std::vector<ExpansionRow>& rows, double theta);

} // namespace adboin
