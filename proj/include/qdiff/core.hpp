#pragma once

// Canonical form of the quadratic differential -(z-a)(z-b)/z^2 dz^2,
// its discriminant, branch-tracked square roots and local geometry at
// the critical points.

#include <complex>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qd {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

enum class ErrorCode {
  InvalidArgument = 1,
  InvalidDifferential,
  Degenerate,
  Domain,
  Continuation,
  Convergence,
  PoleProximity,
  InsufficientResolution,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline bool is_finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

/// Throws InvalidArgument when z has a NaN or infinite component.
void require_finite(Complex z, const char* what);

enum class Sheet : int { Plus = 1, Minus = -1 };
enum class TrajectoryKind { Horizontal, Vertical };

const char* to_string(TrajectoryKind kind);

/// Affine change of variables y = scale * (x - shift) taking raw
/// coordinates to canonical ones.
struct NormalizationMap {
  Complex shift{0.0, 0.0};
  Complex scale{1.0, 0.0};

  Complex forward(Complex x) const { return scale * (x - shift); }
  Complex backward(Complex y) const { return y / scale + shift; }
};

/// Which of the two zeros of the differential.
enum class ZeroId : int { A = 0, B = 1 };

struct CriticalPoint {
  Complex location{0.0, 0.0};
  bool at_infinity = false;
  // 1 simple zero, 2 double zero, -1 simple pole, -2 double pole, -4 pole at infinity
  int order = 0;
  int ray_count = 0;
};

/// Canonical differential -(z-a)(z-b)/z^2 dz^2. Values are stored after
/// normalization; near-coincidences inside the declared bands are snapped
/// so the degeneracy flags agree exactly with the stored numbers.
class QDiff {
 public:
  QDiff(Complex a, Complex b);

  /// Shift by c, then scale by sqrt(A): zeros become sqrt(A)(a_raw - c), sqrt(A)(b_raw - c).
  static QDiff canonicalize(Complex a_raw, Complex b_raw, Complex c = {0.0, 0.0},
                            Complex A = {1.0, 0.0});

  Complex a() const { return a_; }
  Complex b() const { return b_; }
  Complex zero(ZeroId id) const { return id == ZeroId::A ? a_ : b_; }
  const NormalizationMap& map() const { return map_; }

  bool is_degenerate_equal() const { return equal_; }
  bool is_degenerate_zero() const { return zero_at_origin_; }

  /// True when the named zero is a genuine zero of the differential
  /// (false for the one sitting at the origin in the a*b = 0 case).
  bool is_zero_of_differential(ZeroId id) const;

  /// max(1, |a|, |b|)
  double scale() const;

  Complex D(Complex z) const { return (z - a_) * (z - b_); }
  Complex Q(Complex z) const { return -D(z) / (z * z); }

  std::vector<CriticalPoint> critical_points() const;

 private:
  QDiff(Complex a, Complex b, NormalizationMap map);

  Complex a_;
  Complex b_;
  NormalizationMap map_;
  bool equal_ = false;
  bool zero_at_origin_ = false;
};

/// (z-a)(z-b)
inline Complex eval_D(const QDiff& q, Complex z) { return q.D(z); }

struct BranchPath {
  std::vector<Complex> samples;
  std::vector<Complex> branch_values;
};

/// Pick the square root of d on the same sheet as `reference`.
Complex nearest_sqrt(Complex d, Complex reference);

/// Continue sqrt(D) along `path`, starting from `seed` at path[0].
BranchPath continue_sqrt_D(const QDiff& q, std::span<const Complex> path, Complex seed);

/// sheet * principal sqrt(ab); the residue of sqrt(D)/z at the origin.
Complex residue_origin(const QDiff& q, Sheet sheet);

/// (a+b)/2; the residue at infinity for the branch sqrt(D) ~ z.
Complex residue_infinity(const QDiff& q);

/// Launch angles (radians in [0, 2pi)) of the trajectories leaving a zero.
std::vector<double> launch_directions(const QDiff& q, ZeroId at, TrajectoryKind kind);

}  // namespace qd
