#ifndef BALCERT_ROBUSTCERT_HPP
#define BALCERT_ROBUSTCERT_HPP

#include <array>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "balcert/solvability.hpp"
#include "balcert/unbalance.hpp"

namespace balcert {

enum class Metric { pvur, lvur, vuf_negative, vuf_zero };
enum class Method { closed_form, line_bound, magnitude_bound, bound, polytope, lgr };
enum class Exactness { exact, safe_approximation, strong_duality_certified };

const char* to_string(Metric m);
const char* to_string(Method m);
const char* to_string(Exactness e);

/// Outcome of certifying one balance constraint over a DiskBundle.
/// For PVUR/LVUR the worst values are the six certified row minima
/// (pass iff all >= 0); for VUF methods a single certified worst-case
/// objective value (pass iff <= 0).
struct RobustVerdict {
  Metric metric{};
  Method method{};
  double epsilon = 0.0;
  bool pass = false;
  std::vector<double> worst_values;
  Exactness exactness = Exactness::safe_approximation;

  // diagnostics
  int polygon_m = 0;
  std::array<double, 3> multipliers{};
  bool solver_converged = true;
};

/// Exact reformulation: each linear row is minimized phase-separably,
/// positive coefficients against max{|C|-r, 0} and negative ones against
/// |C|+r.
RobustVerdict robust_pvur(const DiskBundle& disks, double eps,
                          PvurVariant variant = PvurVariant::avg_deviation);

/// Safe approximation via line-to-line distance bounds
/// |C_p - C_q| -+ (r_p + r_q).
RobustVerdict robust_lvur_linebound(const DiskBundle& disks, double eps);

/// Safe approximation via per-phase magnitude boxes; each relaxed row is
/// evaluated at the eight box vertices and the minimum reported.
RobustVerdict robust_lvur_magbound(const DiskBundle& disks, double eps);

/// Safe approximation of the VUF constraint by sequence-magnitude bounds:
/// (|C_a + a^2 C_b + a C_c| + r_a + r_b + r_c)^2 against
/// eps^2 max{|C_a + a C_b + a^2 C_c| - r_a - r_b - r_c, 0}^2.
RobustVerdict vuf_bound(const DiskBundle& disks, double eps,
                        Sequence which = Sequence::negative);

enum class PolygonMode { circumscribed, inscribed };

/// Vertices of the regular 2m-gon attached to each phase disk. The
/// circumscribed polygon contains the disk (circumradius r / cos(pi/2m));
/// the inscribed variant places every vertex exactly on the circle.
struct CrpVertices {
  int sides_half = 0;  // m; the polygon has 2m vertices
  PolygonMode mode = PolygonMode::circumscribed;
  std::array<std::vector<Eigen::Vector2d>, 3> vertices;
};

CrpVertices build_crp(const DiskBundle& disks, int m, PolygonMode mode);

/// Finite evaluation of the worst-case VUF objective over polygon vertex
/// combinations. outer_value (circumscribed) upper-bounds the true
/// boundary maximum, inner_value (inscribed) lower-bounds it, and
/// gap_bound is the Lipschitz-based bound on outer - inner.
struct PolytopeCertificate {
  double outer_value = 0.0;  // F_e
  double inner_value = 0.0;  // F_i
  double gap_bound = 0.0;
  RobustVerdict verdict;
};

PolytopeCertificate vuf_polytope(const DiskBundle& disks, double eps, int m,
                                 Sequence which = Sequence::negative);

/// Lagrangian-relaxation certificate: gamma is the minimized dual value
/// (an upper bound on the worst-case objective for any multipliers), and
/// psd_min_eigenvalue certifies feasibility of the bordered dual matrix.
struct LgrCertificate {
  double gamma = 0.0;
  std::array<double, 3> multipliers{};
  bool converged = true;
  double psd_min_eigenvalue = 0.0;
  RobustVerdict verdict;
};

LgrCertificate vuf_lgr(const DiskBundle& disks, double eps,
                       Sequence which = Sequence::negative);

enum class CheckOutcome { holds, fails, indeterminate };

/// Strong-duality test for the Lagrangian relaxation built from a
/// coordinate-separation condition plus three convex minimizations over
/// the product of (origin-centered) phase disks. Indeterminate when an
/// inner solve does not converge; never a false positive.
struct StrongDualityCheck {
  CheckOutcome outcome = CheckOutcome::fails;
  std::array<bool, 3> separation_ok{};
  std::array<double, 3> inner_minima{};
  std::array<double, 3> thresholds{};
  bool inner_converged = true;

  bool holds() const { return outcome == CheckOutcome::holds; }
};

StrongDualityCheck lgr_strong_duality_check(const DiskBundle& disks, double eps,
                                            Sequence which = Sequence::negative);

/// Exactness test for the lifted relaxation: holds when the center vector
/// lies in the nullspace of the penalty matrix, i.e. the worst-case
/// problem is homogeneous in the disk offsets.
bool sdr_exactness_check(const DiskBundle& disks, double eps,
                         Sequence which = Sequence::negative);

struct SampleOptions {
  std::int64_t count = 500000;
  std::uint64_t seed = 1;
  int threads = 0;  // 0: resolve from BALCERT_THREADS / hardware
};

/// Monte Carlo estimate of the worst-case VUF objective: the maximum of
/// the objective over i.i.d. triples drawn uniformly on the disk boundary
/// circles. A lower estimate of the true maximum; deterministic for a
/// fixed seed at any thread count.
double sample_oracle(const DiskBundle& disks, double eps, Sequence which,
                     const SampleOptions& opts = {});

/// Worker-count resolution shared by the sampling and sweep paths.
int resolve_threads(int requested);

}  // namespace balcert

#endif
