#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <cmath>

#include "nhpc/models.hpp"
#include "support/fixtures.hpp"

using namespace nhpc;
using Catch::Approx;

namespace {

double hermiticity_defect(const Matrix& m) {
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

RealVector spectrum(const Matrix& h) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

}  // namespace

TEST_CASE("SNS builder", "[models]") {
    ModelSpec m = fixtures::sns_junction();

    SECTION("Hermitian 24x24 with particle-hole symmetric spectrum") {
        const Matrix h = build_sns(m);
        REQUIRE(h.rows() == 24);
        CHECK(hermiticity_defect(h) < 1e-14);
        const RealVector ev = spectrum(h);
        for (int k = 0; k < 12; ++k)
            CHECK(ev(k) == Approx(-ev(23 - k)).margin(1e-12));
    }

    SECTION("pairing off gives a block-diagonal plain chain") {
        m.pairing = 0.0;
        const Matrix h = build_sns(m);
        const int n = 12;
        CHECK(h.topRightCorner(n, n).cwiseAbs().maxCoeff() == 0.0);
        const Matrix block = h.topLeftCorner(n, n);
        for (int i = 0; i < n; ++i) CHECK(block(i, i) == Complex(-1.1, 0.0));
        for (int b = 0; b < n - 1; ++b) CHECK(block(b, b + 1) == Complex(-1.0, 0.0));
    }

    SECTION("phase +pi and -pi give identical spectra") {
        m.phase = pi;
        const RealVector ep = spectrum(build_sns(m));
        m.phase = -pi;
        const RealVector em = spectrum(build_sns(m));
        CHECK((ep - em).cwiseAbs().maxCoeff() < 1e-12);
    }

    SECTION("deterministic") {
        const Matrix a = build_sns(m), b = build_sns(m);
        CHECK(a == b);
    }

    SECTION("rejects bad segment sizes") {
        m.n_middle = 0;
        CHECK_THROWS_AS(build_sns(m), SpecError);
    }
}

TEST_CASE("ring builder", "[models]") {
    SECTION("reference disordered ring") {
        const ModelSpec m = fixtures::disordered_ring();
        const Matrix h = build_ring(m);
        REQUIRE(h.rows() == 6);
        CHECK(hermiticity_defect(h) < 1e-14);
        CHECK(h.trace().real() == Approx(-6.0).margin(1e-12));
    }

    SECTION("uniform ring matches the closed-form spectrum") {
        ModelSpec m = fixtures::uniform_ring(6);
        m.phase = 0.83;
        const RealVector ev = spectrum(build_ring(m));
        std::vector<double> expected;
        for (int k = 0; k < 6; ++k)
            expected.push_back(2.0 * m.hopping * std::cos((2.0 * pi * k + m.phase) / 6.0));
        std::sort(expected.begin(), expected.end());
        for (int k = 0; k < 6; ++k) CHECK(ev(k) == Approx(expected[k]).margin(1e-10));
    }

    SECTION("flux period is 2 pi") {
        ModelSpec m = fixtures::disordered_ring();
        m.phase = 1.1;
        const Matrix a = build_ring(m);
        m.phase = 1.1 + 2.0 * pi;
        const Matrix b = build_ring(m);
        CHECK((a - b).cwiseAbs().maxCoeff() < 1e-14);
    }

    SECTION("rejects wrong hopping count") {
        ModelSpec m = fixtures::disordered_ring();
        m.ring_hoppings.pop_back();
        CHECK_THROWS_AS(build_ring(m), SpecError);
    }
}

TEST_CASE("reservoir builder", "[models]") {
    SECTION("two-site chain") {
        const RealVector ev = spectrum(build_reservoir({2, -1.0, 0.0, 1, 0.0}));
        CHECK(ev(0) == Approx(-1.0).margin(1e-14));
        CHECK(ev(1) == Approx(1.0).margin(1e-14));
    }
    SECTION("open-chain cosine band") {
        const int ne = 101;
        const RealVector ev = spectrum(build_reservoir({ne, -1.0, 0.0, 1, 0.0}));
        std::vector<double> expected;
        for (int k = 1; k <= ne; ++k)
            expected.push_back(-2.0 * std::cos(k * pi / (ne + 1)));
        std::sort(expected.begin(), expected.end());
        for (int k = 0; k < ne; ++k) CHECK(ev(k) == Approx(expected[k]).margin(1e-10));
    }
    SECTION("chemical potential shifts the band rigidly") {
        const RealVector a = spectrum(build_reservoir({17, -1.0, 0.0, 1, 0.0}));
        const RealVector b = spectrum(build_reservoir({17, -1.0, -1.1, 1, 0.0}));
        CHECK((b - a).cwiseAbs().maxCoeff() == Approx(1.1).margin(1e-13));
    }
}

TEST_CASE("coupled total system", "[models]") {
    SECTION("ring + one reservoir dimension") {
        const Matrix h = build_total(fixtures::disordered_ring(), fixtures::ring_reservoirs());
        REQUIRE(h.rows() == 107);
        CHECK(hermiticity_defect(h) < 1e-14);
    }

    SECTION("SNS + two reservoirs: 428-dim with paired spectrum") {
        const Matrix h = build_total(fixtures::sns_junction(), fixtures::sns_reservoirs());
        REQUIRE(h.rows() == 428);
        CHECK(hermiticity_defect(h) < 1e-14);
        const RealVector ev = spectrum(h);
        for (int k = 0; k < 214; ++k)
            CHECK(ev(k) == Approx(-ev(427 - k)).margin(1e-10));
    }

    SECTION("decoupled limit is block diagonal") {
        ModelSpec m = fixtures::disordered_ring();
        auto res = fixtures::ring_reservoirs(0.0, 31);
        const RealVector coupled = spectrum(build_total(m, res));
        RealVector merged(37);
        merged << spectrum(build_ring(m)), spectrum(build_reservoir(res[0]));
        std::sort(merged.data(), merged.data() + merged.size());
        CHECK((coupled - merged).cwiseAbs().maxCoeff() < 1e-12);
    }

    SECTION("duplicate attach sites rejected") {
        auto res = fixtures::ring_reservoirs();
        res.push_back(res[0]);
        CHECK_THROWS_AS(build_total(fixtures::disordered_ring(), res), SpecError);
    }
}

TEST_CASE("current operator", "[models]") {
    SECTION("Hermitian and traceless on all valid bonds") {
        for (const ModelSpec& m : {fixtures::sns_junction(), fixtures::disordered_ring()}) {
            auto [lo, hi] = normal_bond_range(m);
            for (int b = lo; b <= hi; ++b) {
                const Matrix j = current_operator(m, b);
                CHECK(hermiticity_defect(j) < 1e-14);
                CHECK(std::abs(j.trace()) < 1e-14);
            }
        }
    }

    SECTION("bond outside the normal segment rejected") {
        CHECK_THROWS_AS(current_operator(fixtures::sns_junction(), 1), SpecError);
        CHECK_THROWS_AS(current_operator(fixtures::sns_junction(), 8), SpecError);
        CHECK_THROWS_AS(current_operator(fixtures::disordered_ring(), 7), SpecError);
    }

    SECTION("filled Fermi sea current equals the energy derivative") {
        // uniform ring at mu = 0: both sides of the ground-state identity
        ModelSpec m = fixtures::uniform_ring(6);
        m.phase = 0.9;
        const double dphi = 1e-5;
        const auto e0 = [&](double p) {
            ModelSpec mm = m;
            mm.phase = p;
            const RealVector ev = spectrum(build_ring(mm));
            double e = 0.0;
            for (int k = 0; k < ev.size(); ++k)
                if (ev(k) <= 0.0) e += ev(k);
            return e;
        };
        Eigen::SelfAdjointEigenSolver<Matrix> es(build_ring(m));
        const Matrix j = current_operator(m, 1);
        double i_modes = 0.0;
        for (int k = 0; k < 6; ++k)
            if (es.eigenvalues()(k) <= 0.0)
                i_modes += es.eigenvectors().col(k).dot(j * es.eigenvectors().col(k)).real();
        const double i_energy = (e0(m.phase + dphi) - e0(m.phase - dphi)) / (2.0 * dphi);
        CHECK(i_modes == Approx(i_energy).margin(1e-6));
    }

    SECTION("ground-state current uniform along the SNS normal segment") {
        ModelSpec m = fixtures::sns_junction();
        m.phase = 2.1;
        Eigen::SelfAdjointEigenSolver<Matrix> es(build_sns(m));
        auto [lo, hi] = normal_bond_range(m);
        std::vector<double> currents;
        for (int b = lo; b <= hi; ++b) {
            const Matrix j = current_operator(m, b);
            double acc = 0.0;
            for (int k = 0; k < 24; ++k)
                if (es.eigenvalues()(k) <= 0.0)
                    acc += es.eigenvectors().col(k).dot(j * es.eigenvectors().col(k)).real();
            currents.push_back(acc / 2.0);
        }
        for (std::size_t b = 1; b < currents.size(); ++b)
            CHECK(currents[b] == Approx(currents[0]).margin(1e-10));
    }
}

TEST_CASE("disordered hopping generator", "[models]") {
    const auto a = disordered_ring_hoppings(-1.0, 64, 7);
    const auto b = disordered_ring_hoppings(-1.0, 64, 7);
    CHECK(a == b);
    for (double t : a) {
        CHECK(t <= -0.7);
        CHECK(t >= -1.3);
    }
    const auto c = disordered_ring_hoppings(-1.0, 64, 8);
    CHECK(a != c);
}
