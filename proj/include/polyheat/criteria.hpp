#pragma once

#include <optional>
#include <string>
#include <vector>

#include "polyheat/initial_data.hpp"
#include "polyheat/params.hpp"

namespace polyheat {

    enum class Verdict { Satisfied, Violated, Inconclusive };
    enum class ScanVerdict { NonexistenceIndicated, Inconclusive };
    enum class SummaryKind { Exists, Nonexistence, Undecided };

    std::string_view to_string(Verdict v);
    std::string_view to_string(ScanVerdict v);

    struct CriterionCheck {
        std::string id;  // thm1.2, thm1.3, thm1.4, thm5.2, thm5.3, cor1.1, cor1.2
        Verdict verdict = Verdict::Inconclusive;
        double quantity = 0.0;
        double threshold = 0.0;
        double gamma = 0.0;
        std::string note;
    };

    struct ClassificationReport {
        Regime p_vs_pm = Regime::Subcritical;
        std::vector<CriterionCheck> checks;
        std::optional<double> suggested_T;
        SummaryKind summary = SummaryKind::Undecided;
        std::string summary_id;
        /// "EXISTS_BY thm1.3", "NONEXISTENCE_BY cor1.2" or "UNDECIDED".
        [[nodiscard]] std::string summary_line() const;
    };

    /// Search grid for horizons T (log-spaced, inclusive).
    struct TimeGrid {
        double T_min = 1e-8;
        double T_max = 1e4;
        int per_decade = 8;
        [[nodiscard]] std::vector<double> values() const;
    };

    struct ExponentScan {
        std::vector<double> sigmas;
        std::vector<double> q;
        /// Slope of log q against log(1/sigma) (power trend) and against
        /// log log(e + 1/sigma) (logarithmic trend), fitted over all scales.
        double power_slope = 0.0;
        double loglog_slope = 0.0;
        bool monotone_growth = false;
        ScanVerdict verdict = ScanVerdict::Inconclusive;
        std::string reason;
    };

    struct ScanOptions {
        /// Minimal fitted growth exponent read as divergence.
        double slope_threshold = 0.05;
        /// q above this already exceeds any admissible necessary-condition constant.
        double gamma_nec = 10.0;
    };

    /// q(sigma) = sup mass(sigma) sigma^{-(N - 2m/(p-1))}, or at p = p_m
    /// sup mass(sigma) [log(e + 1/sigma)]^{N/2m}, and its trend as sigma -> 0.
    ExponentScan necessary_exponent_scan(const InitialData &mu, const ProblemParams &params,
                                         const std::vector<double> &sigmas, const ScanOptions &opt = {});
    /// Dyadic sigmas 2^{-k}, k = 0..count-1.
    std::vector<double> dyadic_sigmas(int count = 24);

    /// log T* for a Dirac mass, where the subcritical condition holds exactly for T <= T*.
    double dirac_log_threshold(const InitialData &mu, const ProblemParams &params, double gamma2);
    /// Largest T with sup_x mu(B(x, T^{1/2m})) <= gamma2 T^{N/2m - 1/(p-1)}.
    /// For a Dirac mass the threshold is exact and nullopt means it underflows a double.
    std::optional<double> subcritical_sufficiency(const InitialData &mu, const ProblemParams &params, double gamma2,
                                                  const TimeGrid &grid = {});

    /// Left and right side of the subcritical condition at horizon T.
    struct SubcriticalSides {
        double mass = 0.0;
        double bound = 0.0;
    };
    SubcriticalSides subcritical_sides(const InitialData &mu, const ProblemParams &params, double gamma2, double T);

    /// Pointwise domination mu <= gamma3 profile + gamma3 (p >= p_m).
    struct ProfileCheck {
        Verdict verdict = Verdict::Inconclusive;
        /// max over samples of mu(x) / (gamma3 profile(x) + gamma3)
        double worst_ratio = 0.0;
    };
    ProfileCheck supercritical_profile_check(const InitialData &mu, const ProblemParams &params, double gamma3);
    /// |x|^{-2m/(p-1)}, or |x|^{-N}[log(e+1/|x|)]^{-N/2m-1} at p = p_m.
    double supercritical_profile(const ProblemParams &params, double r);

    /// log T* for a Dirac mass, where the subcritical condition holds exactly for T <= T*.
    double dirac_log_threshold(const InitialData &mu, const ProblemParams &params, double gamma2);
    /// Largest T with sup_x [avg_{B(x,sigma)} |mu|^alpha]^{1/alpha} <= gamma sigma^{-2m/(p-1)}
    /// for all sigma <= T^{1/2m}.
    std::optional<double> lalpha_condition(const InitialData &mu, const ProblemParams &params, double alpha,
                                           double gamma, const TimeGrid &grid = {});

    /// Phi(s) = s [log(e + s)]^beta and its inverse by bisection.
    double orlicz_phi(double s, double beta);
    double orlicz_phi_inverse(double y, double beta);
    /// rho(s) = s^{-N} [log(e + 1/s)]^{-N/2m}
    double orlicz_rho(double s, int N, int m);

    struct OrliczOptions {
        double beta = 1.0;
        double gamma = 1.0;
        /// Window 0 < sigma <= T^{window_exponent}; defaults to 1/2m when unset.
        std::optional<double> window_exponent;
        int sigmas_per_decade = 4;
        double sigma_min = 1e-8;
    };
    /// Largest grid T satisfying the Orlicz average condition (p = p_m only).
    std::optional<double> orlicz_condition(const InitialData &mu, const ProblemParams &params,
                                           const OrliczOptions &opt, const TimeGrid &grid = {});

    struct ClassifyConfig {
        double gamma2 = 0.0;  // 0 selects the calibrated default
        double gamma3 = 1.0;
        double gamma_lalpha = 1.0;
        double alpha = 0.0;  // 0 selects (1 + p) / 2
        OrliczOptions orlicz;
        ScanOptions scan;
        TimeGrid times;
        int sigma_count = 24;
    };

    /// Calibrated default for gamma_2 (see README).
    double default_gamma2();

    ClassificationReport classify(const InitialData &mu, const ProblemParams &params, const ClassifyConfig &cfg);

    /// mu_T(x) = T^{1/(p-1)} mu(T^{1/2m} x). Exact for DIRAC, ATOMS, POWER and
    /// GRID data (the grid box shrinks by T^{-1/2m}); LOGPOWER is not closed
    /// under the map and is rejected.
    InitialData rescale_data(const InitialData &mu, const ProblemParams &params, double T);

}  // namespace polyheat
