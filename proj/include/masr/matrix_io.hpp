#pragma once

#include <Eigen/Core>
#include <complex>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace masr {

// Text matrix format for cross-language validation dumps. One matrix per
// section:
//
//   [name] rows cols
//   1.5+2i -0.25-1i ...
//
// Entries are written "a+bi" with full double precision.

using NamedMatrix = std::pair<std::string, Eigen::MatrixXcd>;

void write_matrix(std::ostream& out, const std::string& name,
                  const Eigen::MatrixXcd& m);
void write_matrices(std::ostream& out, const std::vector<NamedMatrix>& ms);

std::vector<NamedMatrix> read_matrices(std::istream& in);

std::string format_complex(std::complex<double> z);
std::complex<double> parse_complex(const std::string& token);

}  // namespace masr
