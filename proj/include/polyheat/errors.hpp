#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace polyheat {

    // Every failure the library reports carries one of these categories. The CLI
    // maps them to exit codes; the names are printed verbatim in error lines.
    enum class ErrorCode {
        InvalidArgument,
        InvalidConfig,
        UnsupportedDimension,
        QuadratureNonConvergence,
        NonPositiveTime,
        BoxTooSmall,
        EstimateDiverging,
        SemigroupMismatch,
        DegenerateMeasure,
        NonSigmaFinite,
        InsufficientSigmas,
        WrongRegime,
        PointwiseUnavailable,
        AlphaOutOfRange,
        WeightDegenerate,
        NoContraction,
        IterationDiverged,
        NaNDetected,
        OutOfBox,
        SupportMismatch,
        CacheCorrupt,
        IoError,
    };

    std::string_view to_string(ErrorCode code);

    class Error : public std::runtime_error {
    public:
        Error(ErrorCode code, const std::string &what)
            : std::runtime_error(what), code_(code) {}

        [[nodiscard]] ErrorCode code() const noexcept { return code_; }

    private:
        ErrorCode code_;
    };

    [[noreturn]] inline void fail(ErrorCode code, const std::string &msg) { throw Error(code, msg); }

    inline void require(bool cond, ErrorCode code, const std::string &msg) {
        if (!cond) fail(code, msg);
    }

}  // namespace polyheat
