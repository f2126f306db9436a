#include "geopmp/common.hpp"

#include <sstream>

namespace geopmp {

std::string format_vector(const Vec& v)
{
  std::ostringstream os;
  os.precision(17);
  os << '(';
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i > 0) os << ", ";
    os << v[i];
  }
  os << ')';
  return os.str();
}

void require_size(const Vec& v, Eigen::Index expected, const char* what)
{
  if (v.size() != expected) {
    std::ostringstream os;
    os << what << ": expected length " << expected << ", got " << v.size();
    throw ArgumentError(os.str());
  }
}

}  // namespace geopmp
