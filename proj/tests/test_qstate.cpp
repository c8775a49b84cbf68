#include "doctest.h"

#include "oracles.hpp"
#include "sdc/dynamics.hpp"
#include "sdc/errors.hpp"
#include "sdc/qstate.hpp"

using namespace sdc;
using oracle::I;

namespace {

const std::string P0 = momentum_label(0);
const std::string Pm2 = momentum_label(-2);

CompositeState ket(std::vector<SubsystemSpec> s, std::vector<std::pair<BasisLabels, cplx>> e)
{
    return make_state(std::move(s), e);
}

} // namespace

TEST_CASE("subsystem specs validate their labels")
{
    CHECK_NOTHROW(internal_levels("a").validate());
    CHECK(momentum_pair("m").labels == std::vector<std::string>{"P0", "P-2"});
    CHECK(momentum_pair("m").momentum_orders == std::vector<int>{0, -2});
    CHECK(momentum_lattice("m", -3, 1).dimension() == 5);
    CHECK(fock_space("c", 3).labels.back() == "3");
    CHECK(momentum_in_hbar_k(0) == doctest::Approx(1.0));
    CHECK(momentum_in_hbar_k(-2) == doctest::Approx(-1.0));

    SubsystemSpec dup = internal_levels("a");
    dup.labels = {"g", "g"};
    CHECK_THROWS_AS(dup.validate(), StateError);
    SubsystemSpec tiny = internal_levels("a");
    tiny.labels = {"g"};
    CHECK_THROWS_AS(tiny.validate(), StateError);
    CHECK_THROWS(fock_space("c", 0));
}

TEST_CASE("make_state normalizes and rejects bad input")
{
    const auto basis = ket({internal_levels("q"), momentum_pair("m"), fock_space("c", 1)}, {{{"g", P0, "0"}, 1.0}});
    CHECK(basis.norm() == doctest::Approx(1.0));
    CHECK(std::abs(basis.amplitude({"g", P0, "0"}) - cplx(1.0)) < 1e-15);

    const auto plus = ket({internal_levels("q")}, {{{"g"}, 1.0}, {{"e"}, 1.0}});
    CHECK(std::abs(plus.amplitude({"g"}) - 1.0 / std::sqrt(2.0)) < 1e-15);
    CHECK(std::abs(plus.amplitude({"e"}) - 1.0 / std::sqrt(2.0)) < 1e-15);

    const auto tilted = ket({internal_levels("q")}, {{{"g"}, 3.0}, {{"e"}, 4.0}});
    CHECK(tilted.amplitude({"g"}).real() == doctest::Approx(0.6));
    CHECK(tilted.amplitude({"e"}).real() == doctest::Approx(0.8));

    CHECK_THROWS_AS(ket({internal_levels("q")}, {{{"x"}, 1.0}}), StateError);
    CHECK_THROWS_AS(ket({internal_levels("q")}, {{{"g"}, 0.0}}), StateError);
    CHECK_THROWS_AS(ket({internal_levels("q")}, {{{"g"}, 1.0}, {{"g"}, 1.0}}), StateError);
    CHECK_THROWS_AS(CompositeState({internal_levels("q")}, Eigen::VectorXcd::Zero(3)), StateError);
}

TEST_CASE("tensor is the Kronecker product")
{
    const auto g = ket({internal_levels("q")}, {{{"g"}, 1.0}});
    const auto p = ket({momentum_pair("m")}, {{{P0}, 1.0}});
    const auto gp = tensor(g, p);
    CHECK(gp.subsystem_count() == 2);
    CHECK(std::abs(gp.amplitude({"g", P0}) - cplx(1.0)) < 1e-15);

    const auto a = ket({internal_levels("q")}, {{{"g"}, 3.0}, {{"e"}, 4.0}});
    const auto c = ket({fock_space("c", 1)}, {{{"0"}, 1.0}, {{"1"}, 1.0}});
    const auto ac = tensor(a, c);
    const double s = 1.0 / std::sqrt(2.0);
    const std::vector<double> expected{0.6 * s, 0.6 * s, 0.8 * s, 0.8 * s};
    for (std::size_t k = 0; k < 4; ++k) {
        CHECK(ac.amplitudes()(static_cast<Eigen::Index>(k)).real() == doctest::Approx(expected[k]).epsilon(1e-14));
    }
    CHECK(ac.amplitudes()(0).real() == doctest::Approx(0.424).epsilon(1e-3));
    CHECK(ac.amplitudes()(2).real() == doctest::Approx(0.566).epsilon(1e-3));

    const auto eq9 = tensor(tensor(ket({internal_levels("q")}, {{{"g"}, 1.0}, {{"e"}, 1.0}}), p),
                            ket({fock_space("c", 1)}, {{{"0"}, 1.0}}));
    CHECK(eq9.population({"g", P0, "0"}) == doctest::Approx(0.5));
    CHECK(eq9.population({"e", P0, "0"}) == doctest::Approx(0.5));
}

TEST_CASE("apply_local examples")
{
    oracle::Rng rng(7);
    const auto psi = oracle::random_state(rng, {internal_levels("q"), momentum_pair("m"), fock_space("c", 2)});
    const Propagator id{Eigen::MatrixXcd::Identity(2, 2), {{SubsystemKind::AtomMomentum, 2}}, Provenance::Analytic, 0};
    CHECK((apply_local(psi, id, {1}).amplitudes() - psi.amplitudes()).norm() < 1e-15);

    const auto g = ket({internal_levels("q")}, {{{"g"}, 1.0}});
    const auto h = apply_local(g, ramsey_unitary(), {0});
    CHECK(std::abs(h.amplitude({"g"}) - 1.0 / std::sqrt(2.0)) < 1e-14);
    CHECK(std::abs(h.amplitude({"e"}) - 1.0 / std::sqrt(2.0)) < 1e-14);

    // Mirror on the momentum of |g, 1, P0>.
    PhysicalParams p = PhysicalParams::rb85_defaults();
    const auto start = ket({internal_levels("q"), fock_space("c", 1), momentum_pair("m")}, {{{"g", "1", P0}, 1.0}});
    const auto out = apply_local(start, offresonant_bragg_propagator(p, mirror_time(p), PhaseMode::Full), {2});
    CHECK(std::abs(out.amplitude({"g", "1", Pm2}) - (-I)) < 1e-12);
}

TEST_CASE("apply_local rejects mismatched or non-unitary operators")
{
    const auto s = ket({internal_levels("q"), momentum_pair("m")}, {{{"g", P0}, 1.0}});
    CHECK_THROWS_AS(apply_local(s, ramsey_unitary(), {1}), DimensionError);
    CHECK_THROWS_AS(apply_local(s, ramsey_unitary(), {5}), DimensionError);
    Propagator bad = ramsey_unitary();
    bad.matrix *= 1.1;
    CHECK_THROWS_AS(apply_local(s, bad, {0}), NonUnitaryError);
    Propagator wrong = ramsey_unitary();
    wrong.targets[0].dimension = 3;
    CHECK_THROWS(apply_local(s, wrong, {0}));
}

TEST_CASE("apply_local on non-adjacent reversed targets matches an explicit operator")
{
    oracle::Rng rng(11);
    const std::vector<SubsystemSpec> space{internal_levels("a"), fock_space("c", 2), momentum_pair("m")};
    const auto psi = oracle::random_state(rng, space);
    const Eigen::MatrixXcd u = rng.unitary(4);
    const Propagator op{u, {{SubsystemKind::AtomMomentum, 2}, {SubsystemKind::AtomInternal, 2}}, Provenance::Numeric, 0};
    const auto out = apply_local(psi, op, {2, 0});

    // Explicit: index (a, c, m), operator acts on (m, a).
    Eigen::VectorXcd expected = Eigen::VectorXcd::Zero(12);
    for (int a = 0; a < 2; ++a) {
        for (int c = 0; c < 3; ++c) {
            for (int m = 0; m < 2; ++m) {
                for (int a2 = 0; a2 < 2; ++a2) {
                    for (int m2 = 0; m2 < 2; ++m2) {
                        expected(a * 6 + c * 2 + m) += u(m * 2 + a, m2 * 2 + a2) * psi.amplitudes()(a2 * 6 + c * 2 + m2);
                    }
                }
            }
        }
    }
    CHECK((out.amplitudes() - expected).norm() < 1e-13);
}

TEST_CASE("postselect examples")
{
    const auto gp = ket({internal_levels("q"), momentum_pair("m")}, {{{"g", P0}, 1.0}});
    const auto sel = postselect(gp, 0, "g");
    CHECK(sel.probability == doctest::Approx(1.0));
    CHECK(sel.collapsed.subsystem_count() == 1);
    CHECK(std::abs(sel.collapsed.amplitude({P0}) - cplx(1.0)) < 1e-15);
    CHECK_THROWS_AS(postselect(gp, 0, "e"), ZeroProbabilityError);
    CHECK_THROWS_AS(postselect(gp, 0, "x"), StateError);

    // Measuring the last factor leaves the scalar state.
    const auto q = ket({internal_levels("q")}, {{{"e"}, 1.0}});
    const auto scalar = postselect(q, 0, "e");
    CHECK(scalar.collapsed.subsystem_count() == 0);
    CHECK(scalar.collapsed.dimension() == 1);
}

TEST_CASE("sample_measurement")
{
    const auto g = ket({internal_levels("q")}, {{{"g"}, 1.0}});
    for (std::uint64_t seed : {0ull, 1ull, 99ull}) {
        const auto rec = sample_measurement(g, 0, seed);
        CHECK(rec.outcome == "g");
        CHECK(rec.probability == doctest::Approx(1.0));
        CHECK(rec.seed == seed);
    }

    const auto plus = ket({internal_levels("q")}, {{{"g"}, 1.0}, {{"e"}, 1.0}});
    int ground = 0;
    for (std::uint64_t seed = 0; seed < 10000; ++seed) {
        ground += sample_measurement(plus, 0, seed).outcome == "g" ? 1 : 0;
    }
    CHECK(ground / 10000.0 == doctest::Approx(0.5).epsilon(0.04));
    CHECK(std::abs(ground / 10000.0 - 0.5) <= 0.02);

    const auto a = sample_measurement(plus, 0, 1234);
    const auto b = sample_measurement(plus, 0, 1234);
    CHECK(a.outcome == b.outcome);
    CHECK((a.collapsed.amplitudes() - b.collapsed.amplitudes()).norm() == 0.0);

    // Atom-cavity Bell state: cavity outcomes are equiprobable.
    const auto bell = ket({momentum_pair("m"), fock_space("c", 1)}, {{{P0, "0"}, 1.0}, {{Pm2, "1"}, -I}});
    const auto rec = sample_measurement(bell, 1, 5);
    CHECK(rec.probability == doctest::Approx(0.5));
}

TEST_CASE("reduced_density examples")
{
    const auto gp = ket({internal_levels("q"), momentum_pair("m")}, {{{"g", P0}, 1.0}});
    const auto rho = reduced_density(gp, {0});
    CHECK(std::abs(rho(0, 0) - cplx(1.0)) < 1e-15);
    CHECK(std::abs(rho(1, 1)) < 1e-15);

    const auto bell =
        ket({momentum_pair("m1"), momentum_pair("m2")}, {{{P0, P0}, 1.0}, {{Pm2, Pm2}, -I}});
    const auto half = reduced_density(bell, {0});
    CHECK(half.isApprox(0.5 * Eigen::MatrixXcd::Identity(2, 2), 1e-14));

    const auto hyper = ket({internal_levels("a"), internal_levels("b"), momentum_pair("ma"), momentum_pair("mb")},
                           {{{"g", "g", P0, P0}, 1.0}, {{"e", "e", Pm2, Pm2}, -I}});
    const auto rho_a = reduced_density(hyper, {0, 2});
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(rho_a);
    CHECK(eig.eigenvalues()(3) == doctest::Approx(0.5));
    CHECK(eig.eigenvalues()(2) == doctest::Approx(0.5));
    CHECK(std::abs(eig.eigenvalues()(1)) < 1e-14);
    CHECK(std::abs(rho_a.trace() - cplx(1.0)) < 1e-14);
    CHECK_THROWS(reduced_density(hyper, {}));
}

TEST_CASE("phase_invariant_fidelity examples")
{
    oracle::Rng rng(3);
    const auto psi = oracle::random_state(rng, {internal_levels("q"), momentum_pair("m")});
    const CompositeState rotated(psi.subsystems(), std::exp(I * 0.7) * psi.amplitudes());
    CHECK(phase_invariant_fidelity(psi, rotated) == doctest::Approx(1.0));

    const auto a = ket({internal_levels("q"), momentum_pair("m")}, {{{"g", P0}, 1.0}, {{"e", Pm2}, -I}});
    const auto b = ket({internal_levels("q"), momentum_pair("m")},
                       {{{"g", P0}, 1.0}, {{"e", Pm2}, -I * std::exp(-I * oracle::pi / 3.0)}});
    CHECK(phase_invariant_fidelity(a, b) == doctest::Approx(0.75).epsilon(1e-12));

    const auto g = ket({internal_levels("q")}, {{{"g"}, 1.0}});
    const auto e = ket({internal_levels("q")}, {{{"e"}, 1.0}});
    CHECK(phase_invariant_fidelity(g, e) == doctest::Approx(0.0));
    CHECK_THROWS(phase_invariant_fidelity(g, a));
}

TEST_CASE("concurrence examples")
{
    const Eigen::Vector4cd product = oracle::kron(Eigen::VectorXcd(Eigen::Vector2cd(0.6, 0.8)),
                                                  Eigen::VectorXcd(Eigen::Vector2cd(1.0, I)))
                                         .normalized();
    CHECK(concurrence(product * product.adjoint()) == doctest::Approx(0.0).epsilon(1e-7));

    Eigen::Vector4cd bell(1.0, 0.0, 0.0, -I);
    bell /= std::sqrt(2.0);
    CHECK(concurrence(bell * bell.adjoint()) == doctest::Approx(1.0));

    CHECK(concurrence(0.25 * Eigen::MatrixXcd::Identity(4, 4)) == doctest::Approx(0.0));

    Eigen::MatrixXcd bad = Eigen::MatrixXcd::Identity(4, 4);
    CHECK_THROWS_AS(concurrence(bad), NonPhysicalError);
    Eigen::MatrixXcd negative = 0.25 * Eigen::MatrixXcd::Identity(4, 4);
    negative(0, 0) = -0.25;
    negative(1, 1) = 0.75;
    CHECK_THROWS_AS(concurrence(negative), NonPhysicalError);
    CHECK_THROWS_AS(concurrence(Eigen::MatrixXcd::Identity(2, 2) * 0.5), NonPhysicalError);
}
