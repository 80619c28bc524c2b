#include "adboin/design_rules.hpp"

#include "adboin/errors.hpp"

#include <cmath>
#include <string>

namespace adboin {

namespace {

// Both elimination rules only look at doses with at least this many patients.
constexpr int kMinEliminationN = 3;

void check_counts(int n, int events, const char* what) {
    if (n < 0 || events < 0 || events > n)
        fail(ErrorCode::InvalidArgument, std::string(what) + " count must lie in [0, n]");
}

bool expansion_from(int n, int tox, double dp, const DesignParams& params) {
    if (n < params.base_cohort || n == 0) return false;
    const auto cb = count_boundaries(interval_boundaries(params), n);
    if (tox >= cb.deescalate_if_tox_ge) return false;
    return dp > params.theta;
}

} // namespace

void DesignParams::validate() const {
    if (num_doses < 1) fail(ErrorCode::Configuration, "num_doses must be at least 1");
    if (start_dose < 0 || start_dose >= num_doses)
        fail(ErrorCode::Configuration, "start_dose out of range");
    if (!(phiT > 0.0 && phiT < 1.0)) fail(ErrorCode::Configuration, "phiT must lie in (0,1)");
    if (!(psiE > 0.0 && psiE < 1.0)) fail(ErrorCode::Configuration, "psiE must lie in (0,1)");
    weights.validate();
    if (!(safety_cutoff > 0.0 && safety_cutoff < 1.0))
        fail(ErrorCode::Configuration, "safety_cutoff must lie in (0,1)");
    if (!(futility_cutoff > 0.0 && futility_cutoff < 1.0))
        fail(ErrorCode::Configuration, "futility_cutoff must lie in (0,1)");
    if (!(theta > 0.0 && theta < 1.0)) fail(ErrorCode::Configuration, "theta must lie in (0,1)");
    if (base_cohort < 1) fail(ErrorCode::Configuration, "base_cohort must be at least 1");
    if (expanded_cohort < base_cohort)
        fail(ErrorCode::Configuration, "expanded_cohort must be at least base_cohort");
    if (max_n < base_cohort) fail(ErrorCode::Configuration, "max_n must be at least base_cohort");
    if (per_dose_stop_n < 1 || per_dose_stop_n > max_n)
        fail(ErrorCode::Configuration, "per_dose_stop_n must lie in [1, max_n]");
    if (!(tox_window_days >= 0.0) || !(eff_window_days >= 0.0))
        fail(ErrorCode::Configuration, "assessment windows must be nonnegative");
    if (!(accrual_rate_per_month > 0.0))
        fail(ErrorCode::Configuration, "accrual rate must be positive");
    interval_boundaries(*this);
}

BoundaryPair interval_boundaries(const DesignParams& params) {
    const double phi = params.phiT;
    const double phi1 = params.phi1_factor * phi;
    const double phi2 = params.phi2_factor * phi;
    if (!(phi > 0.0 && phi < 1.0 && phi1 > 0.0 && phi1 < phi && phi < phi2 && phi2 < 1.0))
        fail(ErrorCode::InvalidArgument, "interval boundaries need 0 < phi1 < phiT < phi2 < 1");
    BoundaryPair bp;
    bp.lambda_e = std::log((1.0 - phi1) / (1.0 - phi)) /
                  std::log(phi * (1.0 - phi1) / (phi1 * (1.0 - phi)));
    bp.lambda_d = std::log((1.0 - phi) / (1.0 - phi2)) /
                  std::log(phi2 * (1.0 - phi) / (phi * (1.0 - phi2)));
    return bp;
}

CountBoundaries count_boundaries(const BoundaryPair& bp, int n) {
    if (n < 1) fail(ErrorCode::InvalidArgument, "count boundaries need n >= 1");
    return {static_cast<int>(std::floor(n * bp.lambda_e)),
            static_cast<int>(std::ceil(n * bp.lambda_d))};
}

bool safety_eliminated(int n, int tox, const DesignParams& params) {
    check_counts(n, tox, "toxicity");
    if (n < kMinEliminationN) return false;
    return tail_posterior(tox, n, params.phiT, Tail::Above) > params.safety_cutoff;
}

bool futility_eliminated(int n, int eff, const DesignParams& params) {
    check_counts(n, eff, "efficacy");
    if (n < kMinEliminationN) return false;
    return tail_posterior(eff, n, params.psiE, Tail::Below) > params.futility_cutoff;
}

double dose_desirability(int n, int tox, int eff, const DesignParams& params) {
    return desirability_probability(n, quasi_events(n, tox, eff, params.weights),
                                    params.benchmark());
}

double dose_desirability(const OutcomeCounts2x2& counts, const DesignParams& params) {
    return desirability_probability(counts.n(), quasi_events(counts, params.weights),
                                    params.benchmark());
}

bool expansion_qualifies(int n, int tox, int eff, const DesignParams& params) {
    check_counts(n, tox, "toxicity");
    check_counts(n, eff, "efficacy");
    if (n < params.base_cohort || n == 0) return false;
    return expansion_from(n, tox, dose_desirability(n, tox, eff, params), params);
}

bool expansion_qualifies(const OutcomeCounts2x2& counts, const DesignParams& params) {
    counts.validate();
    if (counts.n() < params.base_cohort || counts.n() == 0) return false;
    return expansion_from(counts.n(), counts.n_tox(), dose_desirability(counts, params), params);
}

} // namespace adboin
