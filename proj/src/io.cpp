#include "plab/io.hpp"

#include <ctime>
#include <iomanip>

namespace plab {

namespace {

void maybe_stamp(std::ostream& os, bool stamp) {
  if (!stamp) return;
  const std::time_t now = std::time(nullptr);
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  os << "# generated " << std::put_time(&tm_utc, "%Y-%m-%dT%H:%M:%SZ") << "\n";
}

struct Precision {
  explicit Precision(std::ostream& os_) : os(os_), saved(os_.precision()) {
    os.precision(17);
  }
  ~Precision() { os.precision(saved); }
  std::ostream& os;
  std::streamsize saved;
};

}  // namespace

void write_perturbed_csv(std::ostream& os, const ProcessPath& path, bool stamp) {
  maybe_stamp(os, stamp);
  Precision p(os);
  os << "t,y,C,F,m,theta\n";
  for (std::size_t k = 0; k < path.y.size(); ++k)
    os << path.grid.t(k) << ',' << path.y[k] << ',' << path.cumulative[k] << ','
       << path.running_max_cum[k] << ',' << path.m[k] << ',' << path.argmax_index[k]
       << '\n';
}

void write_reflected_csv(std::ostream& os, const ReflectedPath& path, bool stamp) {
  maybe_stamp(os, stamp);
  Precision p(os);
  os << "t,x,g,m,l,v\n";
  for (std::size_t k = 0; k < path.x.size(); ++k)
    os << path.grid.t(k) << ',' << path.x[k] << ',' << path.g[k] << ',' << path.m[k]
       << ',' << path.l[k] << ',' << path.v[k] << '\n';
}

void write_field_csv(std::ostream& os, const DerivativeField& field, bool stamp) {
  maybe_stamp(os, stamp);
  Precision p(os);
  os << "i,j,u\n";
  for (std::size_t i = 1; i <= field.n(); ++i)
    for (std::size_t j = i; j <= field.n(); ++j)
      os << i << ',' << j << ',' << field.u_at(i, j) << '\n';
}

void write_terminal_row_csv(std::ostream& os, const std::vector<double>& row,
                            const TimeGrid& grid, bool stamp) {
  maybe_stamp(os, stamp);
  Precision p(os);
  os << "t,u\n";
  for (std::size_t k = 0; k < row.size(); ++k)
    os << grid.t(k + 1) << ',' << row[k] << '\n';
}

void write_density_csv(std::ostream& os, const DensityEstimate& est, bool stamp) {
  maybe_stamp(os, stamp);
  Precision p(os);
  os << "grid_point,density\n";
  for (std::size_t g = 0; g < est.grid_points.size(); ++g)
    os << est.grid_points[g] << ',' << est.values[g] << '\n';
}

void write_atom_csv(std::ostream& os, const std::vector<AtomScanEntry>& scan, bool stamp) {
  maybe_stamp(os, stamp);
  Precision p(os);
  os << "delta,max_mass\n";
  for (const auto& e : scan) os << e.delta << ',' << e.max_mass << '\n';
}

nlohmann::json to_json(const HNormStat& s) {
  return {{"value", s.value},
          {"min_over_paths", s.min_over_paths},
          {"q01", s.q01},
          {"q50", s.q50},
          {"fraction_zero", s.fraction_zero},
          {"boundary_fraction", s.boundary_fraction},
          {"n_paths", s.n_paths},
          {"n_boundary", s.n_boundary}};
}

nlohmann::json to_json(const ComparisonReport& r) {
  return {{"max_violation", r.max_violation},
          {"n_violating_paths", r.n_violating_paths},
          {"n_paths", r.n_paths},
          {"tolerance", r.tolerance},
          {"pass", r.pass()}};
}

nlohmann::json to_json(const PicardReport& r) {
  return {{"distances", r.distances}, {"ratios", r.ratios}};
}

nlohmann::json to_json(const ZeroHitReport& r) {
  return {{"delta", r.delta},
          {"fraction", r.fraction},
          {"fraction_half", r.fraction_half},
          {"ratio", r.ratio},
          {"n_paths", r.n_paths}};
}

nlohmann::json to_json(const RegularityReport& r) {
  return {{"max_lipschitz_ratio", r.max_lipschitz_ratio},
          {"min_abs_sigma", r.min_abs_sigma},
          {"max_derivative_error", r.max_derivative_error},
          {"lipschitz_violated", r.lipschitz_violated}};
}

}  // namespace plab
