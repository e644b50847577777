#include "polyheat/params.hpp"

#include <cmath>
#include <string>

#include "polyheat/errors.hpp"

namespace polyheat {

    std::string_view to_string(ErrorCode code) {
        switch (code) {
            case ErrorCode::InvalidArgument: return "InvalidArgument";
            case ErrorCode::InvalidConfig: return "InvalidConfig";
            case ErrorCode::UnsupportedDimension: return "UnsupportedDimension";
            case ErrorCode::QuadratureNonConvergence: return "QuadratureNonConvergence";
            case ErrorCode::NonPositiveTime: return "NonPositiveTime";
            case ErrorCode::BoxTooSmall: return "BoxTooSmall";
            case ErrorCode::EstimateDiverging: return "EstimateDiverging";
            case ErrorCode::SemigroupMismatch: return "SemigroupMismatch";
            case ErrorCode::DegenerateMeasure: return "DegenerateMeasure";
            case ErrorCode::NonSigmaFinite: return "NonSigmaFinite";
            case ErrorCode::InsufficientSigmas: return "InsufficientSigmas";
            case ErrorCode::WrongRegime: return "WrongRegime";
            case ErrorCode::PointwiseUnavailable: return "PointwiseUnavailable";
            case ErrorCode::AlphaOutOfRange: return "AlphaOutOfRange";
            case ErrorCode::WeightDegenerate: return "WeightDegenerate";
            case ErrorCode::NoContraction: return "NoContraction";
            case ErrorCode::IterationDiverged: return "IterationDiverged";
            case ErrorCode::NaNDetected: return "NaNDetected";
            case ErrorCode::OutOfBox: return "OutOfBox";
            case ErrorCode::SupportMismatch: return "SupportMismatch";
            case ErrorCode::CacheCorrupt: return "CacheCorrupt";
            case ErrorCode::IoError: return "IoError";
        }
        return "Unknown";
    }

    void ProblemParams::validate() const {
        require(N >= 1, ErrorCode::InvalidArgument, "N must be >= 1, got " + std::to_string(N));
        require(m >= 1, ErrorCode::InvalidArgument, "m must be >= 1, got " + std::to_string(m));
        require(std::isfinite(p) && p > 1.0, ErrorCode::InvalidArgument, "p must be > 1, got " + std::to_string(p));
        require(std::isfinite(theta) && theta > 0.0 && theta < 2.0, ErrorCode::InvalidArgument,
                "theta must lie in (0,2), got " + std::to_string(theta));
    }

    Regime regime_of(const ProblemParams &params) {
        const double pm = params.p_m();
        if (std::abs(params.p - pm) <= 1e-12 * pm) return Regime::Critical;
        return params.p < pm ? Regime::Subcritical : Regime::Supercritical;
    }

    const char *to_string(Regime r) {
        switch (r) {
            case Regime::Subcritical: return "SUBCRITICAL";
            case Regime::Critical: return "CRITICAL";
            case Regime::Supercritical: return "SUPERCRITICAL";
        }
        return "?";
    }

    double unit_ball_volume(int N) {
        return std::pow(std::numbers::pi, 0.5 * N) / std::tgamma(0.5 * N + 1.0);
    }

    double unit_sphere_area(int N) {
        return 2.0 * std::pow(std::numbers::pi, 0.5 * N) / std::tgamma(0.5 * N);
    }

}  // namespace polyheat
