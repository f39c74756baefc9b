#include <doctest.h>

#include <cmath>
#include <random>

#include "balcert/unbalance.hpp"

using namespace balcert;

namespace {

VoltageTriple random_triple(std::mt19937_64& rng, double scale = 1.5) {
  std::uniform_real_distribution<double> u(-scale, scale);
  return {{u(rng), u(rng)}, {u(rng), u(rng)}, {u(rng), u(rng)}};
}

}  // namespace

TEST_CASE("sequence transform identities") {
  const Complex al = alpha();
  CHECK(std::abs(al - Complex(-0.5, std::sqrt(3.0) / 2.0)) < 1e-15);
  CHECK(std::abs(al * al * al - 1.0) < 1e-15);

  std::mt19937_64 rng(11);
  for (int t = 0; t < 200; ++t) {
    const VoltageTriple v = random_triple(rng);
    const SequenceComponents s = sequence_components(v);
    CHECK(std::abs(3.0 * s.positive - (v.a + al * v.b + al * al * v.c)) < 1e-12);
    CHECK(std::abs(3.0 * s.negative - (v.a + al * al * v.b + al * v.c)) < 1e-12);
    CHECK(std::abs(3.0 * s.zero - (v.a + v.b + v.c)) < 1e-12);
  }
}

TEST_CASE("real view round trip") {
  std::mt19937_64 rng(12);
  for (int t = 0; t < 50; ++t) {
    const VoltageTriple v = random_triple(rng);
    const VoltageTriple w = VoltageTriple::from_real(v.to_real());
    CHECK(v.a == w.a);
    CHECK(v.b == w.b);
    CHECK(v.c == w.c);
  }
}

TEST_CASE("pvur pointwise values") {
  CHECK(pvur(1, 1, 1) == doctest::Approx(0.0));
  CHECK(pvur(1, 1, 1, PvurVariant::max_minus_min) == doctest::Approx(0.0));
  CHECK(pvur(1.02, 0.98, 1.00) == doctest::Approx(0.02));
  CHECK(pvur(1.02, 0.98, 1.00, PvurVariant::max_minus_min) == doctest::Approx(0.04));
  CHECK(pvur(1, 1, 0.7) == doctest::Approx(0.2 / 0.9));
  CHECK_THROWS_AS(pvur(0, 0, 0), std::invalid_argument);
}

TEST_CASE("lvur pointwise values") {
  const double s3 = std::sqrt(3.0);
  CHECK(lvur(s3, s3, s3) == doctest::Approx(0.0));
  CHECK(lvur(1.02, 0.98, 1.00) == doctest::Approx(0.02));
  CHECK_THROWS_AS(lvur(0, 0, 0), std::invalid_argument);

  // scale invariance of the ratio
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(0.1, 2.0);
  for (int t = 0; t < 100; ++t) {
    const double a = u(rng), b = u(rng), c = u(rng), s = u(rng);
    CHECK(lvur(s * a, s * b, s * c) == doctest::Approx(lvur(a, b, c)).epsilon(1e-12));
  }
}

TEST_CASE("vuf on pure sequences") {
  const Complex al = alpha();
  const VoltageTriple pos{1.0, al * al, al};
  CHECK(vuf(pos, Sequence::negative) == doctest::Approx(0.0));
  CHECK(vuf(pos, Sequence::zero) == doctest::Approx(0.0));

  const VoltageTriple neg{1.0, al, al * al};
  CHECK_THROWS_AS(vuf(neg), std::domain_error);
}

TEST_CASE("vuf agrees with the quadratic-form route") {
  const Complex al = alpha();
  const VoltageTriple v{1.05, al * al, 0.95 * al};
  const Vector6d x = v.to_real();
  const QuadraticForms& f = quadratic_forms();
  const double n9 = x.dot(f.negative * x);
  const double p9 = x.dot(f.positive * x);
  CHECK(vuf(v) == doctest::Approx(std::sqrt(n9 / p9)).epsilon(1e-10));

  const SequenceComponents s = sequence_components(v);
  CHECK(std::abs(n9 - 9.0 * std::norm(s.negative)) < 1e-10);
  CHECK(std::abs(p9 - 9.0 * std::norm(s.positive)) < 1e-10);
}

TEST_CASE("vuf rotation invariance") {
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> u(0.0, 2.0 * 3.14159265358979);
  for (int t = 0; t < 200; ++t) {
    VoltageTriple v = random_triple(rng);
    SequenceComponents s = sequence_components(v);
    if (std::abs(s.positive) < 1e-6) continue;
    const Complex rot = std::polar(1.0, u(rng));
    const VoltageTriple w{rot * v.a, rot * v.b, rot * v.c};
    CHECK(vuf(w, Sequence::negative) ==
          doctest::Approx(vuf(v, Sequence::negative)).epsilon(1e-10));
    CHECK(vuf(w, Sequence::zero) == doctest::Approx(vuf(v, Sequence::zero)).epsilon(1e-10));
  }
}

TEST_CASE("quadratic forms structure") {
  const QuadraticForms f = build_quadratic_forms();

  // rotation blocks are orthogonal, diagonal blocks are I2
  CHECK((f.b_positive.transpose() * f.b_positive - Eigen::Matrix2d::Identity()).norm() < 1e-14);
  CHECK(f.negative.trace() == doctest::Approx(6.0));
  CHECK((f.negative - f.negative.transpose()).norm() < 1e-14);
  CHECK((f.positive - f.positive.transpose()).norm() < 1e-14);
  CHECK((f.zero - f.zero.transpose()).norm() < 1e-14);

  // eigenvalues of A_n are {3, 3, 0, 0, 0, 0}
  for (const Matrix6d* a : {&f.negative, &f.zero, &f.positive}) {
    Eigen::SelfAdjointEigenSolver<Matrix6d> es(*a);
    const Eigen::VectorXd ev = es.eigenvalues();
    for (int i = 0; i < 4; ++i) CHECK(std::abs(ev[i]) < 1e-10);
    CHECK(std::abs(ev[4] - 3.0) < 1e-10);
    CHECK(std::abs(ev[5] - 3.0) < 1e-10);
  }

  // lambda_min(eps^2 A_p - A_n) = -3 on the whole eps range
  for (double eps : {0.01, 0.1, 0.3, 0.9}) {
    const Matrix6d a = eps * eps * f.positive - f.negative;
    Eigen::SelfAdjointEigenSolver<Matrix6d> es(a);
    CHECK(std::abs(es.eigenvalues().minCoeff() + 3.0) < 1e-10);
  }
}

TEST_CASE("quadratic forms match the sequence transform") {
  const QuadraticForms& f = quadratic_forms();
  std::mt19937_64 rng(15);
  double worst = 0.0;
  for (int t = 0; t < 2000; ++t) {
    const VoltageTriple v = random_triple(rng);
    const Vector6d x = v.to_real();
    const SequenceComponents s = sequence_components(v);
    worst = std::max(worst, std::abs(x.dot(f.negative * x) - 9.0 * std::norm(s.negative)));
    worst = std::max(worst, std::abs(x.dot(f.zero * x) - 9.0 * std::norm(s.zero)));
    worst = std::max(worst, std::abs(x.dot(f.positive * x) - 9.0 * std::norm(s.positive)));
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("linear rows are equivalent to the metric threshold") {
  std::mt19937_64 rng(16);
  std::uniform_real_distribution<double> umag(0.2, 1.8), ueps(0.01, 0.99);
  int mismatches = 0;
  for (int t = 0; t < 2000; ++t) {
    const double a = umag(rng), b = umag(rng), c = umag(rng), eps = ueps(rng);
    for (PvurVariant variant : {PvurVariant::avg_deviation, PvurVariant::max_minus_min}) {
      const bool metric_ok = pvur(a, b, c, variant) <= eps;
      const Eigen::Matrix<double, 6, 3> rows = magnitude_constraint_rows(eps, variant);
      const Eigen::Vector3d x(a, b, c);
      const bool rows_ok = ((rows * x).array() >= 0.0).all();
      if (metric_ok != rows_ok) ++mismatches;
    }
    // LVUR shares the avg-deviation rows on line-to-line magnitudes
    const bool metric_ok = lvur(a, b, c) <= eps;
    const Eigen::Matrix<double, 6, 3> rows = magnitude_constraint_rows(eps);
    const bool rows_ok = ((rows * Eigen::Vector3d(a, b, c)).array() >= 0.0).all();
    if (metric_ok != rows_ok) ++mismatches;
  }
  CHECK(mismatches == 0);
}

TEST_CASE("penalty matrix combines the forms") {
  const QuadraticForms& f = quadratic_forms();
  const Matrix6d a = sequence_penalty_matrix(0.3, Sequence::negative);
  CHECK((a - (f.negative - 0.09 * f.positive)).norm() < 1e-15);
  const Matrix6d z = sequence_penalty_matrix(0.5, Sequence::zero);
  CHECK((z - (f.zero - 0.25 * f.positive)).norm() < 1e-15);
}
