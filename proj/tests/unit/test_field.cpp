#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include <gtest/gtest.h>

#include "sausage_lab/error.hpp"
#include "sausage_lab/field.hpp"
#include "sausage_lab/rng.hpp"

using namespace sausage_lab;
using std::numbers::pi;

namespace {

void expect_vec(const std::vector<double>& got, std::initializer_list<double> want, double tol = 1e-15) {
    ASSERT_EQ(got.size(), want.size());
    std::size_t k = 0;
    for (double w : want) EXPECT_NEAR(got[k++], w, tol);
}

VelocityField sin_shear() {
    FourierMode mode;
    mode.wave = {0, 1, 0};
    mode.cos_amp = {0.0, 0.0, 0.0};
    mode.sin_amp = {1.0, 0.0, 0.0};
    return VelocityField::fourier(3, 1.0, {mode});
}

}  // namespace

TEST(TaylorGreen, MatchesTheClosedForm) {
    const auto at = [](double a, double b, double c) {
        const auto v = eval_taylor_green(std::vector<double>{a, b, c});
        return std::vector<double>(v.begin(), v.end());
    };
    expect_vec(at(0, 0, 0), {0, 0, 0});
    expect_vec(at(pi / 2, 0, 0), {-1, 0, 0});
    expect_vec(at(pi / 2, pi / 2, 1.7), {0, 0, 0}, 1e-15);
}

TEST(TaylorGreen, RejectsOtherDimensions) {
    EXPECT_THROW(eval_taylor_green(std::vector<double>{1.0, 2.0}), ConfigError);
    EXPECT_THROW(eval_taylor_green(std::vector<double>{1.0, 2.0, 3.0, 4.0}), ConfigError);
}

TEST(ScaledField, AppliesRTimesVAtRx) {
    const auto tg = VelocityField::taylor_green();
    expect_vec(eval_scaled(VelocityField::zero().scaled(5.0), std::vector<double>{0.3, -1.0, 2.0}), {0, 0, 0});
    expect_vec(eval_scaled(tg, std::vector<double>{pi / 2, 0, 0}), {-1, 0, 0});
    expect_vec(eval_scaled(tg.scaled(2.0), std::vector<double>{pi / 4, 0, 0}), {-2, 0, 0}, 1e-15);
}

TEST(ScaledField, UnitScaleIsPointwiseIdenticalToTheBase) {
    const auto tg = VelocityField::taylor_green();
    const auto same = tg.scaled(1.0);
    rng::PhiloxEngine gen(3, rng::Stream::Validation);
    for (int i = 0; i < 1000; ++i) {
        std::vector<double> x = {20 * gen.uniform() - 10, 20 * gen.uniform() - 10, gen.uniform()};
        std::vector<double> a(3), b(3);
        tg.eval_base(x, a);
        same.eval(x, b);
        ASSERT_EQ(a, b);
    }
}

TEST(ScaledField, WrongPositionDimensionIsAConfigError) {
    EXPECT_THROW(eval_scaled(VelocityField::taylor_green(), std::vector<double>{1.0, 2.0}), ConfigError);
}

TEST(Divergence, ZeroFieldIsExactlyDivergenceFree) {
    EXPECT_EQ(check_divergence_free(VelocityField::zero(), 1000, 1e-4), 0.0);
}

TEST(Divergence, ProvidedFieldsPassAtTheDocumentedStep) {
    EXPECT_LE(check_divergence_free(VelocityField::taylor_green(), 1000, 1e-4), 1e-3);
    EXPECT_LE(check_divergence_free(VelocityField::taylor_green(), 10000, 1e-4), 1e-3);
    EXPECT_LE(check_divergence_free(sin_shear(), 1000, 1e-4), 1e-3);
    // Central differences of smooth fields are O(h²); 10·h is the stated bound.
    EXPECT_LE(check_divergence_free(VelocityField::taylor_green(), 10000, 1e-4), 10 * 1e-4);
}

TEST(Periodicity, UnscaledFieldsRepeatOverTheirLattice) {
    // The shift x + p·period is computed in floating point, so the comparison
    // allows for rounding of the shifted argument.
    rng::PhiloxEngine gen(11, rng::Stream::Validation);
    for (const auto& field : {VelocityField::taylor_green(), sin_shear()}) {
        const double period = field.period();
        for (int i = 0; i < 2000; ++i) {
            std::vector<double> x = {gen.uniform() * 7, gen.uniform() * 7, gen.uniform() * 7};
            std::vector<double> y = x;
            const int axis = i % 2;
            const int shift = 1 + i % 3;
            y[static_cast<std::size_t>(axis)] += shift * period;
            std::vector<double> a(3), b(3);
            field.eval_base(x, a);
            field.eval_base(y, b);
            for (int k = 0; k < 3; ++k) ASSERT_NEAR(a[static_cast<std::size_t>(k)], b[static_cast<std::size_t>(k)], 1e-12);
        }
    }
}

TEST(Periodicity, TaylorGreenPeriodIsTwoPi) {
    EXPECT_DOUBLE_EQ(VelocityField::taylor_green().period(), 2 * pi);
}

TEST(CellMean, ProvidedFieldsAreMeanZero) {
    for (const auto& field : {VelocityField::zero(), VelocityField::taylor_green(), sin_shear()}) {
        const auto mean = cell_mean(field);
        double norm = 0.0;
        for (double m : mean) norm += m * m;
        EXPECT_LE(std::sqrt(norm), 1e-3) << field.id();
    }
}

TEST(Validation, RejectsADivergentCustomField) {
    // v = (sin 2πx1, 0, 0) has divergence 2π cos 2πx1.
    auto bad = [](std::span<const double> x, std::span<double> out) {
        out[0] = std::sin(2 * pi * x[0]);
        out[1] = 0.0;
        out[2] = 0.0;
    };
    EXPECT_THROW(VelocityField::custom(3, 1.0, bad), ConfigError);
}

TEST(Validation, RejectsANonzeroMean) {
    auto drift = [](std::span<const double>, std::span<double> out) {
        out[0] = 0.5;
        out[1] = 0.0;
        out[2] = 0.0;
    };
    EXPECT_THROW(VelocityField::custom(3, 1.0, drift), ConfigError);
}

TEST(Validation, AcceptsADivergenceFreeCustomField) {
    auto shear = [](std::span<const double> x, std::span<double> out) {
        out[0] = std::sin(2 * pi * x[1]);
        out[1] = 0.0;
        out[2] = 0.0;
    };
    const auto field = VelocityField::custom(3, 1.0, shear);
    EXPECT_TRUE(inspect_field(field).ok);
    EXPECT_EQ(field.kind(), FieldKind::Custom);
}

TEST(FieldIds, ParseKnownNamesAndRejectOthers) {
    EXPECT_EQ(VelocityField::from_id("zero").kind(), FieldKind::Zero);
    EXPECT_EQ(VelocityField::from_id("zero:4").dimension(), 4);
    EXPECT_EQ(VelocityField::from_id("taylor-green").kind(), FieldKind::TaylorGreen);
    EXPECT_THROW(VelocityField::from_id("vortex"), ConfigError);
    EXPECT_THROW(VelocityField::from_id("custom:/nonexistent/field.json"), ConfigError);
}

TEST(FieldIds, LoadsAFourierSeriesFile) {
    const auto file = std::filesystem::temp_directory_path() / "sausage_lab_field_test.json";
    std::ofstream(file) << R"({"dimension": 3, "period": 1.0,
        "modes": [{"k": [0, 1, 0], "cos": [0, 0, 0], "sin": [0.5, 0, 0]},
                  {"k": [1, 0, 0], "cos": [0, 0, 0.25], "sin": [0, 0, 0]}]})";
    const auto field = VelocityField::from_id("custom:" + file.string());
    std::vector<double> v(3);
    field.eval_base(std::vector<double>{0.0, 0.25, 0.0}, v);
    EXPECT_NEAR(v[0], 0.5, 1e-12);
    EXPECT_NEAR(v[2], 0.25, 1e-12);
    std::filesystem::remove(file);
}

TEST(FieldIds, RejectsAFourierSeriesWithDivergence) {
    const auto file = std::filesystem::temp_directory_path() / "sausage_lab_field_bad.json";
    std::ofstream(file) << R"({"dimension": 3, "period": 1.0,
        "modes": [{"k": [1, 0, 0], "cos": [0, 0, 0], "sin": [1, 0, 0]}]})";
    EXPECT_THROW(VelocityField::from_id("custom:" + file.string()), ConfigError);
    std::filesystem::remove(file);
}

TEST(FieldProperties, MaxSpeedAndPlaneConfinement) {
    EXPECT_DOUBLE_EQ(VelocityField::taylor_green().max_speed(), 1.0);
    EXPECT_DOUBLE_EQ(VelocityField::taylor_green().scaled(3.0).max_speed(), 3.0);
    EXPECT_TRUE(VelocityField::taylor_green().drift_confined_to_plane());
    EXPECT_EQ(VelocityField::zero().max_speed(), 0.0);
}
