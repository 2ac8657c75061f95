#include "maflow/hermitian.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#include "maflow/errors.hpp"

namespace maflow {

MetricField MetricField::from(HermitianField m) {
  const int n = m.grid.n;
  double lo = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < m.size(); ++i) {
    const double e = m.at(i).min_eig(n);
    if (!(e > 0.0) || !std::isfinite(e)) {
      std::ostringstream os;
      os << "min eigenvalue " << e << " at gridpoint " << i;
      throw KaehlerConeViolation(os.str());
    }
    lo = std::min(lo, e);
  }
  return MetricField(std::move(m), lo);
}

}  // namespace maflow
