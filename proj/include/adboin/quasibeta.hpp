#pragma once
// Beta-posterior numerics behind the utility-based dose-finding rules.
//
// Each patient contributes a standardized utility in [0,1] (score/100). The
// summed utilities are treated as fractional "events" out of n trials, so the
// mean utility has a Beta(1 + x_u, 1 + n - x_u) posterior under a uniform
// prior. Toxicity and efficacy margins use ordinary Beta-binomial posteriors.

namespace adboin {

struct UtilityWeights {
    double eff_notox = 100.0;
    double eff_tox = 60.0;
    double noeff_notox = 40.0;
    double noeff_tox = 0.0;

    void validate() const;
    // True when the quasi-event count depends on the margins alone
    // (eff_notox + noeff_tox == eff_tox + noeff_notox).
    bool marginally_sufficient() const noexcept;

    friend bool operator==(const UtilityWeights&, const UtilityWeights&) = default;
};

// a: efficacy without toxicity, b: efficacy with toxicity,
// c: neither, d: toxicity without efficacy.
struct OutcomeCounts2x2 {
    int a = 0;
    int b = 0;
    int c = 0;
    int d = 0;

    int n() const noexcept { return a + b + c + d; }
    int n_eff() const noexcept { return a + b; }
    int n_tox() const noexcept { return b + d; }

    void validate() const;
    OutcomeCounts2x2& operator+=(const OutcomeCounts2x2& o) noexcept;
    friend bool operator==(const OutcomeCounts2x2&, const OutcomeCounts2x2&) = default;
};

struct Benchmark {
    double u_b = 0.0;     // 0-100 scale
    double u_tilde = 0.5; // 0-1 scale, (u_b/100 + 1)/2
};

enum class Tail { Above, Below };

double quasi_events(const OutcomeCounts2x2& counts, const UtilityWeights& weights);

// Quasi events from margins; requires marginally sufficient weights.
double quasi_events(int n, int tox, int eff, const UtilityWeights& weights);

// I_x(alpha, beta). Lentz continued fraction with a symmetry switch.
double regularized_incomplete_beta(double x, double alpha, double beta);

// Pr(u > u_tilde) for u ~ Beta(1 + x_u, 1 + n - x_u).
double desirability_probability(int n, double x_u, const Benchmark& bench);

Benchmark benchmark_from(double phiT, double psiE, const UtilityWeights& weights);

// Pr(p > cut) or Pr(p < cut) for p ~ Beta(1 + events, 1 + n - events).
double tail_posterior(int events, int n, double cut_point, Tail direction);

} // namespace adboin
