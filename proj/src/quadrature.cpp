#include "funcest/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace funcest {

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           double rel_tol, unsigned max_depth) {
  QuadratureResult out;
  double l1 = 0.0;
  out.value = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      f, a, b, max_depth, rel_tol, &out.error_estimate, &l1);
  return out;
}

}  // namespace funcest
