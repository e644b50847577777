#include "doctest.h"

#include "polyheat/config.hpp"
#include "polyheat/errors.hpp"

using namespace polyheat;

namespace {
    ErrorCode code_of(const std::function<void()> &f) {
        try {
            f();
        } catch (const Error &e) {
            return e.code();
        }
        FAIL("expected an Error");
        return ErrorCode::IoError;
    }
}  // namespace

TEST_CASE("normalized text round-trips") {
    const auto cfg = parse_config(R"(
# comment
N = 2
p = 2.5   # trailing comment
data = kind=atoms atoms=0,0:0.5;0.25,0.1:1.5
T = 0.1
weight_mode = ORLICZ
delta = 0.3
orlicz_window_exponent = 0.2
)");
    CHECK(cfg.params.N == 2);
    CHECK(cfg.params.p == 2.5);
    CHECK(cfg.data.atoms.size() == 2);
    CHECK(cfg.picard.weight_mode == WeightMode::Orlicz);
    CHECK(cfg.picard.delta.value() == 0.3);
    CHECK_FALSE(cfg.picard.M.has_value());
    const auto text = cfg.normalized();
    const auto again = parse_config(text);
    CHECK(again.normalized() == text);
    CHECK(again.hash() == cfg.hash());
    CHECK(text.find("T = 0.1\n") != std::string::npos);  // shortest round-trip form

    auto other = cfg;
    other.set("seed", "2");
    CHECK(other.hash() != cfg.hash());
    auto moved = cfg;
    moved.set("output_dir", "/elsewhere");
    moved.set("cache_dir", "/tmp/cache");
    CHECK(moved.hash() == cfg.hash());
    // Every key appears exactly once.
    for (const auto &k : RunConfig::keys()) {
        const bool present = ("\n" + text).find("\n" + k + " = ") != std::string::npos;
        CHECK(present);
    }
}

TEST_CASE("validation rejects bad values before any computation") {
    CHECK(code_of([] { (void)parse_config("bogus = 1\n"); }) == ErrorCode::InvalidConfig);
    CHECK(code_of([] { (void)parse_config("p = abc\n"); }) == ErrorCode::InvalidConfig);
    CHECK(code_of([] { (void)parse_config("n = 1000\n"); }) == ErrorCode::InvalidConfig);
    CHECK(code_of([] { (void)parse_config("p = 0.5\n"); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([] { (void)parse_config("N = 4\n"); }) == ErrorCode::UnsupportedDimension);
    CHECK(code_of([] { (void)parse_config("data = kind=dirac mass=-1\n"); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([] { (void)parse_config("data = kind=blob\n"); }) == ErrorCode::InvalidConfig);
    CHECK(code_of([] { (void)parse_config("weight_mode = alpha\nweight_alpha = 5\n"); }) == ErrorCode::InvalidConfig);
    CHECK(code_of([] { (void)parse_config("classify_alpha = 9\n"); }) == ErrorCode::InvalidConfig);
    CHECK(code_of([] { (void)parse_config("delta = 2\nM = 1\n"); }) == ErrorCode::InvalidConfig);
    CHECK(code_of([] { (void)parse_config("T = inf\n"); }) == ErrorCode::InvalidConfig);
    CHECK(code_of([] { (void)parse_config("N = 1\ndata = kind=dirac mass=1 at=0,1,0\n"); }) == ErrorCode::InvalidConfig);
    CHECK(code_of([] { (void)load_config("/nonexistent/polyheat.cfg"); }) == ErrorCode::IoError);
}

TEST_CASE("data specs build the matching measures") {
    const auto d = DataSpec::parse("kind=dirac mass=2 at=0.5");
    CHECK(d.build(1).atoms.front().mass == 2.0);
    CHECK(d.build(1).atoms.front().x[0] == 0.5);
    CHECK(DataSpec::parse(d.normalized()).normalized() == d.normalized());
    const auto lp = DataSpec::parse("kind=logpower c=1 a=1 b=1.5 cutoff=0.5").build(1);
    CHECK(lp.kind == DataKind::LogPower);
    CHECK(code_of([] { (void)DataSpec::parse("kind=mollified mass=1 eps=0.1").build(1); }) ==
          ErrorCode::PointwiseUnavailable);
    CHECK(DataSpec::parse("").kind == "zero");
}
