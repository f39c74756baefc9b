#include "balcert/unbalance.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace balcert {

namespace {

Eigen::Matrix2d rotation(double angle) {
  Eigen::Matrix2d r;
  r << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  return r;
}

// Block-circulant assembly shared by A_n, A_0, A_p:
//   [ I   B   B^T ]
//   [ B^T I   B   ]
//   [ B   B^T I   ]
Matrix6d circulant_form(const Eigen::Matrix2d& b) {
  Matrix6d a = Matrix6d::Identity();
  const Eigen::Matrix2d bt = b.transpose();
  a.block<2, 2>(0, 2) = b;
  a.block<2, 2>(0, 4) = bt;
  a.block<2, 2>(2, 0) = bt;
  a.block<2, 2>(2, 4) = b;
  a.block<2, 2>(4, 0) = b;
  a.block<2, 2>(4, 2) = bt;
  return a;
}

}  // namespace

Complex alpha() {
  static const Complex a = std::polar(1.0, 2.0 * std::numbers::pi / 3.0);
  return a;
}

VoltageTriple VoltageTriple::from_real(const Vector6d& v) {
  return {{v[0], v[1]}, {v[2], v[3]}, {v[4], v[5]}};
}

Vector6d VoltageTriple::to_real() const {
  Vector6d v;
  v << a.real(), a.imag(), b.real(), b.imag(), c.real(), c.imag();
  return v;
}

SequenceComponents sequence_components(const VoltageTriple& v) {
  const Complex al = alpha();
  const Complex al2 = al * al;
  return {(v.a + al * v.b + al2 * v.c) / 3.0,
          (v.a + al2 * v.b + al * v.c) / 3.0,
          (v.a + v.b + v.c) / 3.0};
}

double pvur(double mag_a, double mag_b, double mag_c, PvurVariant variant) {
  if (mag_a < 0 || mag_b < 0 || mag_c < 0)
    throw std::invalid_argument("pvur: negative magnitude");
  const double avg = (mag_a + mag_b + mag_c) / 3.0;
  if (avg <= 0.0) throw std::invalid_argument("pvur: all magnitudes are zero");
  if (variant == PvurVariant::max_minus_min) {
    const double hi = std::max({mag_a, mag_b, mag_c});
    const double lo = std::min({mag_a, mag_b, mag_c});
    return (hi - lo) / avg;
  }
  const double dev = std::max({std::abs(mag_a - avg), std::abs(mag_b - avg),
                               std::abs(mag_c - avg)});
  return dev / avg;
}

double lvur(double mag_ab, double mag_bc, double mag_ca) {
  if (mag_ab < 0 || mag_bc < 0 || mag_ca < 0)
    throw std::invalid_argument("lvur: negative magnitude");
  const double avg = (mag_ab + mag_bc + mag_ca) / 3.0;
  if (avg <= 0.0) throw std::invalid_argument("lvur: all magnitudes are zero");
  const double dev = std::max({std::abs(mag_ab - avg), std::abs(mag_bc - avg),
                               std::abs(mag_ca - avg)});
  return dev / avg;
}

double vuf(const VoltageTriple& v, Sequence which) {
  const SequenceComponents s = sequence_components(v);
  const double pos = std::abs(s.positive);
  const double scale = (std::abs(v.a) + std::abs(v.b) + std::abs(v.c)) / 3.0;
  if (pos <= 1e-12 * scale || scale == 0.0)
    throw std::domain_error("vuf: zero positive-sequence magnitude");
  const double num = which == Sequence::negative ? std::abs(s.negative)
                                                 : std::abs(s.zero);
  return num / pos;
}

QuadraticForms build_quadratic_forms() {
  const double third = 2.0 * std::numbers::pi / 3.0;
  QuadraticForms f;
  f.b_negative = rotation(2.0 * third);  // 240 degrees
  f.b_zero = rotation(0.0);
  f.b_positive = rotation(third);  // 120 degrees
  f.negative = circulant_form(f.b_negative);
  f.zero = circulant_form(f.b_zero);
  f.positive = circulant_form(f.b_positive);
  return f;
}

const QuadraticForms& quadratic_forms() {
  static const QuadraticForms f = build_quadratic_forms();
  return f;
}

Matrix6d sequence_penalty_matrix(double eps, Sequence which) {
  const QuadraticForms& f = quadratic_forms();
  const Matrix6d& num = which == Sequence::negative ? f.negative : f.zero;
  return num - eps * eps * f.positive;
}

Eigen::Matrix<double, 6, 3> magnitude_constraint_rows(double eps, PvurVariant variant) {
  Eigen::Matrix<double, 6, 3> rows;
  if (variant == PvurVariant::avg_deviation) {
    rows << eps + 2, eps - 1, eps - 1,
            eps - 1, eps + 2, eps - 1,
            eps - 1, eps - 1, eps + 2,
            eps - 2, eps + 1, eps + 1,
            eps + 1, eps - 2, eps + 1,
            eps + 1, eps + 1, eps - 2;
  } else {
    // max - min <= eps V_avg, one row per ordered phase pair (p, q):
    // eps sum_r x_r - 3 x_p + 3 x_q >= 0.
    rows << eps - 3, eps + 3, eps,
            eps - 3, eps,     eps + 3,
            eps + 3, eps - 3, eps,
            eps,     eps - 3, eps + 3,
            eps + 3, eps,     eps - 3,
            eps,     eps + 3, eps - 3;
  }
  return rows;
}

}  // namespace balcert
