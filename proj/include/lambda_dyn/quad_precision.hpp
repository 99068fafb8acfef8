// quad_precision.hpp — 113-bit real scalar usable inside Eigen

#pragma once

#include <boost/multiprecision/eigen.hpp>
#include <boost/multiprecision/float128.hpp>

namespace lambda_dyn {

using quad_real = boost::multiprecision::float128;

} // namespace lambda_dyn
