#pragma once

#include <string>

#include "pdikit/pdi_kernel.hpp"

namespace pdikit {

// Flat key=value kernel configuration. One `family=` line selects the
// kernel; mixtures use repeated `atom=` lines. Unknown keys are errors,
// reported with the offending line number.
//
//   family=kronecker|bernstein2|cm2sum|rawgrid
//   centered=true|false                 (default false)
//   x_kernel=sqeuclidean|euclidean|power|sphere|precomputed
//   x_exponent=<a>                      (x_kernel=power)
//   x_offset=<nonnegative>              (default 0)
//   x_matrix=<path>                     (x_kernel=precomputed)
//   y_kernel=..., y_exponent=, y_offset=, y_matrix=
//   atom=<r1> <r2> <w>                  (family=bernstein2, repeated)
//   psi=power|tlogt|quadratic|mixture   (family=cm2sum)
//   a=<exponent in (1,2)>               (psi=power)
//   a0=, a1=, a2=                       (psi=quadratic|mixture)
//   atom=<r> <w>                        (psi=mixture, repeated)
//   matrix=<path>, n=, m=               (family=rawgrid)
PdiKernel parse_kernel_config(const std::string& text, const std::string& source_name = "config");

PdiKernel load_kernel_config(const std::string& path);

}  // namespace pdikit
