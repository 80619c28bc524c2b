#include "adboin/quasibeta.hpp"

#include "adboin/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace adboin {

namespace {

constexpr double kCfEps = 1e-16;
constexpr double kCfTiny = 1e-300;
constexpr int kCfMaxIter = 1000;
// Slack for floating round-off when x_u is assembled from real-valued weights.
constexpr double kRangeSlack = 1e-9;

// Continued fraction for I_x(a,b), modified Lentz. Converges fast for
// x < (a+1)/(a+b+2); callers reflect otherwise.
double beta_cf(double x, double a, double b) {
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kCfTiny) d = kCfTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kCfMaxIter; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kCfTiny) d = kCfTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kCfTiny) c = kCfTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kCfTiny) d = kCfTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kCfTiny) c = kCfTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kCfEps) return h;
    }
    fail(ErrorCode::InvalidArgument, "incomplete beta continued fraction did not converge");
}

// log of x^a (1-x)^b / (a B(a,b)) without the 1/a, i.e. the series prefactor.
double log_prefactor(double x, double a, double b) {
    return std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
           b * std::log1p(-x);
}

void check_probability(double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0))
        fail(ErrorCode::InvalidArgument, std::string(name) + " must lie in [0,1]");
}

} // namespace

void UtilityWeights::validate() const {
    for (double w : {eff_notox, eff_tox, noeff_notox, noeff_tox}) {
        if (!(w >= 0.0 && w <= 100.0))
            fail(ErrorCode::Configuration, "utility weights must lie in [0,100]");
    }
    if (eff_notox < eff_tox || eff_notox < noeff_notox || eff_notox < noeff_tox)
        fail(ErrorCode::Configuration, "efficacy without toxicity must carry the maximum utility");
    if (noeff_tox > eff_tox || noeff_tox > noeff_notox)
        fail(ErrorCode::Configuration, "toxicity without efficacy must carry the minimum utility");
}

bool UtilityWeights::marginally_sufficient() const noexcept {
    return std::fabs((eff_notox + noeff_tox) - (eff_tox + noeff_notox)) < 1e-12;
}

void OutcomeCounts2x2::validate() const {
    if (a < 0 || b < 0 || c < 0 || d < 0)
        fail(ErrorCode::InvalidArgument, "outcome counts must be nonnegative");
}

OutcomeCounts2x2& OutcomeCounts2x2::operator+=(const OutcomeCounts2x2& o) noexcept {
    a += o.a;
    b += o.b;
    c += o.c;
    d += o.d;
    return *this;
}

double quasi_events(const OutcomeCounts2x2& counts, const UtilityWeights& weights) {
    counts.validate();
    return (counts.a * weights.eff_notox + counts.b * weights.eff_tox +
            counts.c * weights.noeff_notox + counts.d * weights.noeff_tox) /
           100.0;
}

double quasi_events(int n, int tox, int eff, const UtilityWeights& weights) {
    if (n < 0 || tox < 0 || eff < 0 || tox > n || eff > n)
        fail(ErrorCode::InvalidArgument, "inconsistent marginal counts");
    if (!weights.marginally_sufficient())
        fail(ErrorCode::Configuration,
             "utility weights need the full 2x2 table; margins are not sufficient");
    // Any 2x2 table with these margins gives the same value; take the one
    // with the fewest patients showing both outcomes.
    OutcomeCounts2x2 t;
    t.b = std::max(0, tox + eff - n);
    t.a = eff - t.b;
    t.d = tox - t.b;
    t.c = n - t.a - t.b - t.d;
    return quasi_events(t, weights);
}

double regularized_incomplete_beta(double x, double alpha, double beta) {
    if (!(alpha > 0.0) || !(beta > 0.0) || !std::isfinite(alpha) || !std::isfinite(beta))
        fail(ErrorCode::InvalidArgument, "incomplete beta shapes must be positive and finite");
    check_probability(x, "incomplete beta argument");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;

    if (x <= alpha / (alpha + beta)) {
        return std::exp(log_prefactor(x, alpha, beta)) * beta_cf(x, alpha, beta) / alpha;
    }
    const double y = 1.0 - x;
    return 1.0 - std::exp(log_prefactor(y, beta, alpha)) * beta_cf(y, beta, alpha) / beta;
}

double desirability_probability(int n, double x_u, const Benchmark& bench) {
    if (n < 0) fail(ErrorCode::InvalidArgument, "patient count must be nonnegative");
    if (!(x_u >= -kRangeSlack && x_u <= n + kRangeSlack))
        fail(ErrorCode::InvalidArgument, "quasi events must lie in [0, n]");
    check_probability(bench.u_tilde, "desirability threshold");
    x_u = std::clamp(x_u, 0.0, static_cast<double>(n));
    // Pr(u > t) = I_{1-t}(1 + n - x_u, 1 + x_u)
    return regularized_incomplete_beta(1.0 - bench.u_tilde, 1.0 + n - x_u, 1.0 + x_u);
}

Benchmark benchmark_from(double phiT, double psiE, const UtilityWeights& weights) {
    check_probability(phiT, "phiT");
    check_probability(psiE, "psiE");
    weights.validate();
    Benchmark out;
    out.u_b = weights.eff_notox * psiE * (1.0 - phiT) + weights.eff_tox * psiE * phiT +
              weights.noeff_notox * (1.0 - psiE) * (1.0 - phiT) +
              weights.noeff_tox * (1.0 - psiE) * phiT;
    out.u_tilde = (out.u_b / 100.0 + 1.0) / 2.0;
    return out;
}

double tail_posterior(int events, int n, double cut_point, Tail direction) {
    if (n < 0 || events < 0 || events > n)
        fail(ErrorCode::InvalidArgument, "events must lie in [0, n]");
    check_probability(cut_point, "cut point");
    const double a = 1.0 + events;
    const double b = 1.0 + n - events;
    if (direction == Tail::Below) return regularized_incomplete_beta(cut_point, a, b);
    return regularized_incomplete_beta(1.0 - cut_point, b, a);
}

} // namespace adboin
