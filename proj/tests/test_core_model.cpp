#include "oracles.hpp"

#include "sor/core_model.hpp"
#include "sor/tracking_sim.hpp"

#include <doctest.h>

#include <algorithm>
#include <limits>

using namespace sor;

namespace {

NonlinearSSM small_model()
{
    return oracle::linear_model(MatrixXd::Identity(2, 2), 0.1 * MatrixXd::Identity(2, 2), MatrixXd::Identity(3, 2),
                                VectorXd::Ones(3));
}

bool has_error(const ValidationResult& r, const std::string& msg)
{
    return std::find(r.errors.begin(), r.errors.end(), msg) != r.errors.end();
}

} // namespace

TEST_CASE("validate_model accepts a well-formed model")
{
    CHECK(validate_model(small_model()).ok());
}

TEST_CASE("validate_model rejects a zero measurement variance")
{
    NonlinearSSM m = small_model();
    m.meas_var_diag(1) = 0.0;
    const auto r = validate_model(m);
    CHECK_FALSE(r.ok());
    CHECK(has_error(r, "meas_var_diag must be strictly positive"));
}

TEST_CASE("validate_model rejects a process covariance of the wrong shape")
{
    NonlinearSSM m = small_model();
    m.process_cov = MatrixXd::Identity(1, 2);
    CHECK(has_error(validate_model(m), "process_cov dimension mismatch"));
}

TEST_CASE("validate_model reports non-finite maps at the zero vector")
{
    NonlinearSSM m = small_model();
    m.meas_fn = [](const VectorXd&) { return VectorXd::Constant(3, std::numeric_limits<double>::quiet_NaN()); };
    CHECK(has_error(validate_model(m), "meas_fn is not finite at the zero vector"));
    m = small_model();
    m.process_fn = [](const VectorXd&) { return VectorXd::Zero(3); };
    CHECK(has_error(validate_model(m), "process_fn output dimension mismatch"));
}

TEST_CASE("validate_model reports every violation and is idempotent")
{
    NonlinearSSM m = small_model();
    m.meas_var_diag(0) = -1.0;
    m.process_cov = MatrixXd::Identity(3, 3);
    m.angular_dims = {true};
    const auto a = validate_model(m);
    const auto b = validate_model(m);
    CHECK(a.errors.size() == 3);
    CHECK(a.errors == b.errors);
}

TEST_CASE("tracking model validates with the nominal bearing variance")
{
    const auto model = tracking::make_tracking_model(tracking::TurnModelConfig{}, tracking::SensorField::lattice(3),
                                                     3.5e-3, 10.0);
    CHECK(validate_model(model).ok());
    CHECK(model.state_dim == 5);
    CHECK(model.meas_dim == 6);
    for (Index i = 0; i < 3; ++i) {
        CHECK(model.meas_var_diag(i) == doctest::Approx(1.225e-5).epsilon(1e-12));
        CHECK(model.meas_var_diag(i + 3) == doctest::Approx(100.0));
    }
}

TEST_CASE("GaussianBelief enforces its invariants")
{
    CHECK_NOTHROW(GaussianBelief(VectorXd::Zero(2), MatrixXd::Identity(2, 2)));
    MatrixXd asym(2, 2);
    asym << 1.0, 0.1, 0.2, 1.0;
    CHECK_THROWS_AS(GaussianBelief(VectorXd::Zero(2), asym), std::invalid_argument);
    MatrixXd indefinite(2, 2);
    indefinite << 1.0, 2.0, 2.0, 1.0;
    CHECK_THROWS_AS(GaussianBelief(VectorXd::Zero(2), indefinite), std::invalid_argument);
    CHECK_THROWS_AS(GaussianBelief(VectorXd::Zero(3), MatrixXd::Identity(2, 2)), std::invalid_argument);
}

TEST_CASE("from_update symmetrizes and jitters once")
{
    MatrixXd nearly(2, 2);
    nearly << 1.0, 1.0 + 1e-14, 1.0, 1.0;
    const auto b = GaussianBelief::from_update(VectorXd::Zero(2), nearly);
    CHECK((b.cov() - b.cov().transpose()).norm() == 0.0);
    CHECK(b.cov().llt().info() == Eigen::Success);
    CHECK(b.cov()(0, 0) == doctest::Approx(1.0 + 1e-9).epsilon(1e-12));

    MatrixXd bad(2, 2);
    bad << 1.0, 0.0, 0.0, -1.0;
    CHECK_THROWS_AS(GaussianBelief::from_update(VectorXd::Zero(2), bad), NumericalError);
}

TEST_CASE("hygienic_cholesky reproduces the covariance")
{
    std::mt19937_64 rng(3);
    for (int t = 0; t < 50; ++t) {
        const MatrixXd p = oracle::random_spd(5, rng, 1e-3, 10.0);
        const auto f = hygienic_cholesky(p);
        CHECK((f.lower * f.lower.transpose() - p).norm() < 1e-12 * p.norm());
        CHECK(f.lower.isLowerTriangular());
    }
}

TEST_CASE("every accepted belief admits a Cholesky factorization")
{
    std::mt19937_64 rng(11);
    for (int t = 0; t < 200; ++t) {
        const MatrixXd p = oracle::random_spd(4, rng, 1e-6, 1e3);
        const GaussianBelief b(oracle::random_vector(4, rng), p);
        CHECK(b.cov().llt().info() == Eigen::Success);
    }
}

TEST_CASE("per-step noise overrides are consulted")
{
    NonlinearSSM m = small_model();
    m.meas_var_at = [](long k) { return VectorXd::Constant(3, static_cast<double>(k)); };
    CHECK(m.meas_var_for(4)(0) == 4.0);
    CHECK(m.process_cov_for(4).isApprox(m.process_cov));
}
