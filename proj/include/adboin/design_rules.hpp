#pragma once

#include "adboin/quasibeta.hpp"

namespace adboin {

struct DesignParams {
    int num_doses = 5;
    int start_dose = 0; // zero-based
    double phiT = 0.35;
    double psiE = 0.25;
    UtilityWeights weights;
    double safety_cutoff = 0.95;
    double futility_cutoff = 0.90;
    double theta = 0.20;
    int base_cohort = 3;
    int expanded_cohort = 6; // equal to base_cohort disables expansion
    int max_n = 36;
    int per_dose_stop_n = 12;
    bool stop_rule_enabled = true;
    double tox_window_days = 45.0;
    double eff_window_days = 60.0;
    double accrual_rate_per_month = 3.0;
    double phi1_factor = 0.6;
    double phi2_factor = 1.4;

    void validate() const;
    Benchmark benchmark() const { return benchmark_from(phiT, psiE, weights); }

    friend bool operator==(const DesignParams&, const DesignParams&) = default;
};

struct BoundaryPair {
    double lambda_e = 0.0;
    double lambda_d = 0.0;
};

struct CountBoundaries {
    int escalate_if_tox_le = 0;
    int deescalate_if_tox_ge = 0;
};

BoundaryPair interval_boundaries(const DesignParams& params);

CountBoundaries count_boundaries(const BoundaryPair& bp, int n);

bool safety_eliminated(int n, int tox, const DesignParams& params);

bool futility_eliminated(int n, int eff, const DesignParams& params);

// Desirability probability of a dose from its margins (default weights) or
// its full table.
double dose_desirability(int n, int tox, int eff, const DesignParams& params);
double dose_desirability(const OutcomeCounts2x2& counts, const DesignParams& params);

// Whether the next cohort at a dose with these accumulated data may be
// enlarged to expanded_cohort. Requires n >= base_cohort, the observed
// toxicity count below the de-escalation boundary, and dp > theta.
bool expansion_qualifies(int n, int tox, int eff, const DesignParams& params);
bool expansion_qualifies(const OutcomeCounts2x2& counts, const DesignParams& params);

} // namespace adboin
