#include "spingate/cavity.hpp"
#include "spingate/errors.hpp"
#include "spingate/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <complex>
#include <limits>

using namespace spingate;

namespace {

CavityParams fig_params() {
    CavityParams p;
    p.g = 2.4;
    p.kappa = 1.0;
    p.kappa_s = 0.0;
    p.gamma = 0.1;
    p.omega_c = 0.0;
    p.omega_x = 0.0;
    return p;
}

bool close(double a, double b, double tol) { return std::abs(a - b) <= tol; }

bool close(Complex a, Complex b, double tol) {
    return std::abs(a - b) <= tol;
}

} // namespace

TEST_SUITE("cavity") {

TEST_CASE("bare cavity on resonance") {
    CavityParams p = fig_params();

    SUBCASE("no side leakage: full transmission with sign flip") {
        const CoefficientPair c = empty_cavity_coeffs(p, ProbeFrequency{0.0});
        CHECK(close(c.t, Complex{-1.0, 0.0}, 1e-15));
        CHECK(close(c.r, Complex{0.0, 0.0}, 1e-15));
    }

    SUBCASE("side leakage equal to the port rate") {
        p.kappa_s = 1.0;
        const CoefficientPair c = empty_cavity_coeffs(p, ProbeFrequency{0.0});
        CHECK(close(c.t, Complex{-2.0 / 3.0, 0.0}, 1e-15));
        CHECK(close(c.r, Complex{1.0 / 3.0, 0.0}, 1e-15));
    }
}

TEST_CASE("bare cavity detuned magnitude") {
    // |t0| = 1 / sqrt(1 + 0.5^2) at half-linewidth detuning.
    const CoefficientPair c =
        empty_cavity_coeffs(fig_params(), ProbeFrequency{0.5});
    CHECK(close(std::abs(c.t), 0.8944271909999159, 1e-15));
}

TEST_CASE("coupled cavity at the strong-coupling operating point") {
    const CoefficientPair c =
        coupled_cavity_coeffs(fig_params(), ProbeFrequency{0.0});
    CHECK(close(c.t, Complex{-0.008605851979345955, 0.0}, 1e-15));
    CHECK(close(c.r, Complex{0.9913941480206540, 0.0}, 1e-15));
    CHECK(close(std::abs(coupled_cavity_coeffs(fig_params(),
                                               ProbeFrequency{0.5})
                             .t),
                0.08997635580587861, 1e-15));
}

TEST_CASE("algebraic identities over random parameters") {
    SeededRng rng(20240811);
    for (int i = 0; i < 10000; ++i) {
        CavityParams p;
        p.g = 4.0 * rng.uniform();
        p.kappa = 0.1 + 2.0 * rng.uniform();
        p.kappa_s = rng.uniform();
        p.gamma = 0.5 * rng.uniform();
        p.omega_c = 2.0 * rng.uniform() - 1.0;
        p.omega_x = p.omega_c + rng.uniform() - 0.5;
        const ProbeFrequency f{p.omega_c + 6.0 * rng.uniform() - 3.0};

        const CoefficientPair c0 = empty_cavity_coeffs(p, f);
        const CoefficientPair c = coupled_cavity_coeffs(p, f);
        REQUIRE(std::abs(c0.r - c0.t - 1.0) <= 1e-12);
        // r is defined as 1 + t, so the identity is exact.
        REQUIRE(c.r == Complex{1.0, 0.0} + c.t);

        p.kappa_s = 0.0;
        const CoefficientPair lossless = empty_cavity_coeffs(p, f);
        REQUIRE(std::abs(std::norm(lossless.r) + std::norm(lossless.t) -
                         1.0) <= 1e-12);
    }
}

TEST_CASE("decoupled emitter reduces to the bare cavity") {
    CavityParams p = fig_params();
    p.g = 0.0;
    for (const double w : {-1.3, -0.2, 0.0, 0.4, 2.2}) {
        const CoefficientPair c0 = empty_cavity_coeffs(p, ProbeFrequency{w});
        const CoefficientPair c =
            coupled_cavity_coeffs(p, ProbeFrequency{w});
        CHECK(close(c.t, c0.t, 1e-12));
    }

    // The decoupled, lossless, resonant point is a 0/0 limit; it must still
    // give the bare-cavity response rather than NaN.
    p.gamma = 0.0;
    const CoefficientPair c = coupled_cavity_coeffs(p, ProbeFrequency{0.0});
    CHECK(close(c.t, Complex{-1.0, 0.0}, 1e-15));
}

TEST_CASE("gate fidelity values") {
    CavityParams p = fig_params();
    CHECK(close(gate_fidelity(p, ProbeFrequency{0.0}), 0.9999629717125974,
                1e-12));
    CHECK(close(gate_fidelity(p, ProbeFrequency{0.5}), 0.9949782415862812,
                1e-12));

    p.g = 0.0;
    CHECK(close(gate_fidelity(p, ProbeFrequency{0.0}),
                1.0 / std::sqrt(2.0), 1e-12));
}

TEST_CASE("gate fidelity grows with coupling") {
    const double expected[] = {0.7071067811865475, 0.9863939238321437,
                               0.9988681377244376, 0.9999238008152207,
                               0.9999629717125974, 0.9999951475979396};
    const double gs[] = {0.0, 0.5, 1.0, 2.0, 2.4, 4.0};
    double prev = 0.0;
    for (int i = 0; i < 6; ++i) {
        CavityParams p = fig_params();
        p.g = gs[i];
        const double f = gate_fidelity(p, ProbeFrequency{0.0});
        CHECK(close(f, expected[i], 1e-12));
        CHECK(f > prev);
        prev = f;
    }
}

TEST_CASE("sweep endpoints, consistency and CSV shape") {
    const CavityParams p = fig_params();
    const SpectraTable table = sweep_spectra(p, -5.0, 5.0, 1001);
    REQUIRE(table.rows.size() == 1001);
    CHECK(table.rows.front().omega == -5.0);
    CHECK(table.rows.back().omega == 5.0);

    const SpectraRow& mid = table.rows[500];
    CHECK(mid.omega == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(close(mid.abs_t0, 1.0, 1e-12));
    CHECK(close(mid.fidelity, 0.9999629717125974, 1e-12));

    for (const SpectraRow& row : table.rows) {
        const ProbeFrequency f{row.omega};
        CHECK(close(row.abs_r, std::abs(coupled_cavity_coeffs(p, f).r),
                    1e-15));
        CHECK(close(row.fidelity, gate_fidelity(p, f), 1e-15));
    }

    const std::string csv = table.to_csv();
    CHECK(csv.rfind("omega,abs_r0,abs_t0,abs_r,abs_t,fidelity\n", 0) == 0);
    CHECK(csv.find('\r') == std::string::npos);
    std::size_t lines = 0;
    for (const char c : csv)
        if (c == '\n') ++lines;
    CHECK(lines == 1002);
}

TEST_CASE("normalization from absolute energy units") {
    CavityParams p;
    p.g = 80.0;
    p.kappa = 33.0;
    p.kappa_s = 6.6;
    p.gamma = 3.3;
    p.omega_c = 1.3e6;
    p.omega_x = 1.3e6 + 16.5;
    const CavityParams n = p.normalized_to(33.0);
    CHECK(close(n.g, 80.0 / 33.0, 1e-12));
    CHECK(close(n.kappa, 1.0, 1e-12));
    CHECK(close(n.kappa_s, 0.2, 1e-12));
    CHECK(close(n.gamma, 0.1, 1e-12));
    CHECK(n.omega_c == 0.0);
    CHECK(close(n.omega_x, 0.5, 1e-12));
}

TEST_CASE("parameter validation") {
    CavityParams p = fig_params();
    p.kappa = 0.0;
    CHECK_THROWS_AS(p.validate(), InvalidParameter);
    p.kappa = -1.0;
    CHECK_THROWS_AS(p.validate(), InvalidParameter);

    p = fig_params();
    p.g = -0.1;
    CHECK_THROWS_AS(empty_cavity_coeffs(p, ProbeFrequency{0.0}),
                    InvalidParameter);

    p = fig_params();
    CHECK_THROWS_AS(
        empty_cavity_coeffs(
            p, ProbeFrequency{std::numeric_limits<double>::quiet_NaN()}),
        InvalidParameter);
    CHECK_THROWS_AS(sweep_spectra(p, 1.0, -1.0, 100), InvalidParameter);
    CHECK_THROWS_AS(sweep_spectra(p, -1.0, 1.0, 1), InvalidParameter);
    CHECK_THROWS_AS(p.normalized_to(0.0), InvalidParameter);
}

} // TEST_SUITE
