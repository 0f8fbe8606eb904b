#include "plab/coefficients.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace plab {

namespace {

void require_params(const std::string& name, const std::vector<double>& params,
                    std::size_t want) {
  if (params.size() != want) {
    std::ostringstream msg;
    msg << "builtin '" << name << "' expects " << want << " parameter(s), got "
        << params.size();
    throw std::invalid_argument(msg.str());
  }
}

std::string label_of(const std::string& name, const std::vector<double>& params) {
  std::ostringstream out;
  out << name;
  for (double p : params) out << ':' << p;
  return out.str();
}

struct BuiltinFuncs {
  std::function<double(double)> f, fp;
  double lipschitz = 0.0;
  bool elliptic = false;
};

BuiltinFuncs build(Builtin which, const std::vector<double>& params) {
  BuiltinFuncs out;
  switch (which) {
    case Builtin::Constant: {
      require_params("constant", params, 1);
      const double c = params[0];
      out.f = [c](double) { return c; };
      out.fp = [](double) { return 0.0; };
      out.lipschitz = 0.0;
      out.elliptic = c != 0.0;
      break;
    }
    case Builtin::Affine: {
      require_params("affine", params, 2);
      const double a = params[0], s = params[1];
      out.f = [a, s](double x) { return a + s * x; };
      out.fp = [s](double) { return s; };
      out.lipschitz = std::abs(s);
      out.elliptic = s == 0.0 && a != 0.0;  // any nonzero slope has a root
      break;
    }
    case Builtin::SinPerturbed: {
      require_params("sin_perturbed", params, 2);
      const double c0 = params[0], c1 = params[1];
      out.f = [c0, c1](double x) { return c0 + c1 * std::sin(x); };
      out.fp = [c1](double x) { return c1 * std::cos(x); };
      out.lipschitz = std::abs(c1);
      out.elliptic = std::abs(c1) < std::abs(c0);
      break;
    }
    case Builtin::TanhBounded: {
      require_params("tanh_bounded", params, 2);
      const double c0 = params[0], c1 = params[1];
      out.f = [c0, c1](double x) { return c0 + c1 * std::tanh(x); };
      out.fp = [c1](double x) {
        const double th = std::tanh(x);
        return c1 * (1.0 - th * th);
      };
      out.lipschitz = std::abs(c1);
      out.elliptic = std::abs(c1) < std::abs(c0);
      break;
    }
  }
  return out;
}

std::string name_of(Builtin which) {
  switch (which) {
    case Builtin::Constant: return "constant";
    case Builtin::Affine: return "affine";
    case Builtin::SinPerturbed: return "sin_perturbed";
    case Builtin::TanhBounded: return "tanh_bounded";
  }
  return "?";
}

}  // namespace

Builtin builtin_from_name(const std::string& name) {
  if (name == "constant") return Builtin::Constant;
  if (name == "affine") return Builtin::Affine;
  if (name == "sin_perturbed") return Builtin::SinPerturbed;
  if (name == "tanh_bounded") return Builtin::TanhBounded;
  throw std::invalid_argument("unknown coefficient builtin '" + name + "'");
}

CoefficientField make_builtin(Builtin which, const std::vector<double>& params) {
  BuiltinFuncs fns = build(which, params);
  CoefficientField field;
  field.sigma = fns.f;
  field.sigma_prime = fns.fp;
  field.b = [](double) { return 0.0; };
  field.b_prime = [](double) { return 0.0; };
  field.lipschitz_bound = fns.lipschitz;
  field.uniformly_elliptic = fns.elliptic;
  field.sigma_label = label_of(name_of(which), params);
  return field;
}

CoefficientField with_drift(CoefficientField base, Builtin which,
                            const std::vector<double>& params) {
  BuiltinFuncs fns = build(which, params);
  base.b = fns.f;
  base.b_prime = fns.fp;
  base.lipschitz_bound = std::max(base.lipschitz_bound, fns.lipschitz);
  base.drift_label = label_of(name_of(which), params);
  return base;
}

namespace {

std::pair<Builtin, std::vector<double>> parse_spec(const std::string& text) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : text) {
    if (c == ':') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  parts.push_back(cur);
  if (parts.empty() || parts[0].empty())
    throw std::invalid_argument("empty coefficient spec '" + text + "'");
  Builtin which = builtin_from_name(parts[0]);
  std::vector<double> params;
  for (std::size_t i = 1; i < parts.size(); ++i) {
    try {
      std::size_t used = 0;
      params.push_back(std::stod(parts[i], &used));
      if (used != parts[i].size()) throw std::invalid_argument("");
    } catch (const std::exception&) {
      throw std::invalid_argument("bad parameter '" + parts[i] + "' in coefficient spec '" +
                                  text + "'");
    }
  }
  return {which, params};
}

}  // namespace

CoefficientField parse_coefficient(const std::string& text) {
  auto [which, params] = parse_spec(text);
  return make_builtin(which, params);
}

CoefficientField with_drift(CoefficientField base, const std::string& text) {
  auto [which, params] = parse_spec(text);
  return with_drift(std::move(base), which, params);
}

RegularityReport check_regularity(const CoefficientField& f, double box_lo, double box_hi,
                                  std::size_t n_samples) {
  if (!(box_lo < box_hi)) throw std::invalid_argument("check_regularity: empty box");
  if (n_samples < 2) throw std::invalid_argument("check_regularity: need >= 2 samples");

  const double span = box_hi - box_lo;
  std::vector<double> xs(n_samples), sv(n_samples), bv(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i) {
    xs[i] = box_lo + span * static_cast<double>(i) / static_cast<double>(n_samples - 1);
    sv[i] = f.sigma(xs[i]);
    bv[i] = f.b(xs[i]);
  }

  RegularityReport report;
  report.min_abs_sigma = std::abs(sv[0]);
  for (std::size_t i = 0; i < n_samples; ++i) {
    report.min_abs_sigma = std::min(report.min_abs_sigma, std::abs(sv[i]));
    for (std::size_t j = i + 1; j < n_samples; ++j) {
      const double dx = xs[j] - xs[i];
      report.max_lipschitz_ratio =
          std::max({report.max_lipschitz_ratio, std::abs(sv[j] - sv[i]) / dx,
                    std::abs(bv[j] - bv[i]) / dx});
    }
  }

  const double h = 1e-4;
  for (std::size_t i = 0; i < n_samples; ++i) {
    const double ds = (f.sigma(xs[i] + h) - f.sigma(xs[i] - h)) / (2.0 * h);
    const double db = (f.b(xs[i] + h) - f.b(xs[i] - h)) / (2.0 * h);
    report.max_derivative_error =
        std::max({report.max_derivative_error, std::abs(ds - f.sigma_prime(xs[i])),
                  std::abs(db - f.b_prime(xs[i]))});
  }

  report.lipschitz_violated =
      report.max_lipschitz_ratio > f.lipschitz_bound * (1.0 + 1e-9);
  return report;
}

}  // namespace plab
