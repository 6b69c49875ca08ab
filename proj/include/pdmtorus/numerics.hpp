#ifndef PDMTORUS_NUMERICS_HPP
#define PDMTORUS_NUMERICS_HPP

#include "pdmtorus/numerics/differentiate.hpp"
#include "pdmtorus/numerics/grid.hpp"
#include "pdmtorus/numerics/quadrature.hpp"
#include "pdmtorus/numerics/rk4.hpp"
#include "pdmtorus/numerics/spline.hpp"
#include "pdmtorus/numerics/trajectory.hpp"
#include "pdmtorus/numerics/tridiagonal.hpp"

#endif  // PDMTORUS_NUMERICS_HPP
