#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace plab {

// Scalar coefficient pair (sigma, b) with exact first derivatives and the
// regularity metadata the solvers and derivative propagation rely on.
// Instances are immutable after construction and safe to share across threads.
struct CoefficientField {
  std::function<double(double)> sigma;
  std::function<double(double)> b;
  std::function<double(double)> sigma_prime;
  std::function<double(double)> b_prime;
  double lipschitz_bound = 0.0;     // common bound for |sigma'| and |b'|
  bool uniformly_elliptic = false;  // |sigma| bounded away from zero
  std::string sigma_label;          // "name:p0[:p1]" used when echoing configs
  std::string drift_label = "constant:0";
};

enum class Builtin { Constant, Affine, SinPerturbed, TanhBounded };

// Throws std::invalid_argument for an unknown family name.
Builtin builtin_from_name(const std::string& name);

// Builds sigma from a named family; the drift is zero until with_drift is
// applied.  Families and parameter counts:
//   constant:1       sigma(x) = p0
//   affine:2         sigma(x) = p0 + p1*x
//   sin_perturbed:2  sigma(x) = p0 + p1*sin(x), elliptic iff |p1| < |p0|
//   tanh_bounded:2   sigma(x) = p0 + p1*tanh(x), elliptic iff |p1| < |p0|
CoefficientField make_builtin(Builtin which, const std::vector<double>& params);

// Returns a copy of base with the drift replaced by the named family.
// lipschitz_bound becomes the max of the sigma and drift bounds, and the
// ellipticity flag is unchanged (it only concerns sigma).
CoefficientField with_drift(CoefficientField base, Builtin which,
                            const std::vector<double>& params);

// Parses "name:p0[:p1:...]" into a builtin sigma (drift zero).
CoefficientField parse_coefficient(const std::string& text);
// Same format, replaces the drift of base.
CoefficientField with_drift(CoefficientField base, const std::string& text);

struct RegularityReport {
  double max_lipschitz_ratio = 0.0;   // worst pairwise difference quotient
  double min_abs_sigma = 0.0;         // min |sigma| over the sample grid
  double max_derivative_error = 0.0;  // declared derivative vs central difference
  bool lipschitz_violated = false;    // ratio exceeds the declared bound
};

// Equispaced brute-force check of the declared bounds on [box_lo, box_hi].
// Pairwise difference quotients are evaluated for both sigma and b.
RegularityReport check_regularity(const CoefficientField& f, double box_lo, double box_hi,
                                  std::size_t n_samples);

}  // namespace plab
