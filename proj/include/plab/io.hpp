#pragma once
// CSV and JSON serialization of paths, sensitivity fields and reports.
// Column orders are fixed; numeric output is full-precision so identical runs
// produce identical bytes. The optional stamp adds a "# generated ..." first
// line and is the only run-dependent output.
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "plab/coefficients.hpp"
#include "plab/density.hpp"
#include "plab/malliavin.hpp"
#include "plab/perturbed.hpp"
#include "plab/reflected.hpp"
#include "plab/verify.hpp"

namespace plab {

// columns: t,y,C,F,m,theta
void write_perturbed_csv(std::ostream& os, const ProcessPath& path, bool stamp);
// columns: t,x,g,m,l,v
void write_reflected_csv(std::ostream& os, const ReflectedPath& path, bool stamp);
// columns: i,j,u (stored lower-triangular entries, row-major)
void write_field_csv(std::ostream& os, const DerivativeField& field, bool stamp);
// columns: t,u; entry k of the row is stamped with t_{k+1}, the diagonal time
void write_terminal_row_csv(std::ostream& os, const std::vector<double>& row,
                            const TimeGrid& grid, bool stamp);
// columns: grid_point,density
void write_density_csv(std::ostream& os, const DensityEstimate& est, bool stamp);
// columns: delta,max_mass
void write_atom_csv(std::ostream& os, const std::vector<AtomScanEntry>& scan, bool stamp);

nlohmann::json to_json(const HNormStat& s);
nlohmann::json to_json(const ComparisonReport& r);
nlohmann::json to_json(const PicardReport& r);
nlohmann::json to_json(const ZeroHitReport& r);
nlohmann::json to_json(const RegularityReport& r);

}  // namespace plab
