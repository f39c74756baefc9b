#ifndef BALCERT_UNBALANCE_HPP
#define BALCERT_UNBALANCE_HPP

#include <complex>

#include <Eigen/Dense>

#include "balcert/netmodel.hpp"

namespace balcert {

using Vector6d = Eigen::Matrix<double, 6, 1>;
using Matrix6d = Eigen::Matrix<double, 6, 6>;

/// alpha = 1 /_ 120 degrees, the rotation of the symmetrical-component
/// transform.
Complex alpha();

/// Three phase voltages with a fixed real-coordinate view ordered
/// (a_re, a_im, b_re, b_im, c_re, c_im).
struct VoltageTriple {
  Complex a, b, c;

  static VoltageTriple from_real(const Vector6d& v);
  Vector6d to_real() const;
};

struct SequenceComponents {
  Complex positive, negative, zero;
};

/// 3 V_p = V_a + alpha V_b + alpha^2 V_c, 3 V_n = V_a + alpha^2 V_b + alpha V_c,
/// 3 V_0 = V_a + V_b + V_c.
SequenceComponents sequence_components(const VoltageTriple& v);

enum class PvurVariant { avg_deviation, max_minus_min };
enum class Sequence { negative, zero };

/// Phase voltage unbalance rate from line-to-ground magnitudes. The
/// avg_deviation variant is max_p | |V_p| - V_avg | / V_avg; the
/// max_minus_min variant is (max - min) / V_avg.
double pvur(double mag_a, double mag_b, double mag_c,
            PvurVariant variant = PvurVariant::avg_deviation);

/// Line voltage unbalance rate from line-to-line magnitudes, with the
/// deviation measured against the line-to-line average.
double lvur(double mag_ab, double mag_bc, double mag_ca);

/// Voltage unbalance factor |V_n|/|V_p| (or |V_0|/|V_p|). Throws on a
/// zero positive-sequence magnitude.
double vuf(const VoltageTriple& v, Sequence which = Sequence::negative);

/// Quadratic forms of the squared sequence magnitudes:
///   V^T A_n V = 9 |V_n|^2,  V^T A_0 V = 9 |V_0|^2,  V^T A_p V = 9 |V_p|^2
/// in the fixed real ordering. Each A is block-circulant with identity
/// diagonal blocks and a 2x2 rotation off-diagonal block.
struct QuadraticForms {
  Matrix6d negative, zero, positive;
  Eigen::Matrix2d b_negative, b_zero, b_positive;
};

QuadraticForms build_quadratic_forms();

/// Shared, lazily built instance.
const QuadraticForms& quadratic_forms();

/// A_x - eps^2 A_p for x in {negative, zero}: the indefinite form whose
/// worst-case sign decides VUF <= eps.
Matrix6d sequence_penalty_matrix(double eps, Sequence which);

/// Row matrix of the linear system equivalent to "metric <= eps" on a
/// nonnegative magnitude triple: metric <= eps iff all six rows are >= 0.
/// The avg_deviation rows also encode LVUR on line-to-line magnitudes.
Eigen::Matrix<double, 6, 3> magnitude_constraint_rows(double eps,
                                                      PvurVariant variant = PvurVariant::avg_deviation);

}  // namespace balcert

#endif
