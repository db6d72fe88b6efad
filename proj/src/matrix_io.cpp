#include "masr/matrix_io.hpp"

#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "masr/errors.hpp"

namespace masr {

std::string format_complex(std::complex<double> z) {
    std::ostringstream ss;
    ss << std::setprecision(17) << z.real();
    if (z.imag() >= 0.0 || std::isnan(z.imag())) ss << "+";
    ss << std::setprecision(17) << z.imag() << "i";
    return ss.str();
}

std::complex<double> parse_complex(const std::string& token) {
    if (token.empty() || token.back() != 'i')
        throw IoError("matrix entry must end in 'i': '" + token + "'");
    // Split at the sign that starts the imaginary part (skip position 0 and
    // signs directly after an exponent marker).
    std::size_t split = std::string::npos;
    for (std::size_t i = token.size() - 1; i > 0; --i) {
        const char c = token[i];
        if ((c == '+' || c == '-') &&
            token[i - 1] != 'e' && token[i - 1] != 'E') {
            split = i;
            break;
        }
    }
    if (split == std::string::npos)
        throw IoError("malformed complex entry: '" + token + "'");
    try {
        const double re = std::stod(token.substr(0, split));
        const double im =
            std::stod(token.substr(split, token.size() - 1 - split));
        return {re, im};
    } catch (const std::exception&) {
        throw IoError("malformed complex entry: '" + token + "'");
    }
}

void write_matrix(std::ostream& out, const std::string& name,
                  const Eigen::MatrixXcd& m) {
    out << "[" << name << "] " << m.rows() << " " << m.cols() << "\n";
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            if (c) out << " ";
            out << format_complex(m(r, c));
        }
        out << "\n";
    }
}

void write_matrices(std::ostream& out, const std::vector<NamedMatrix>& ms) {
    for (const auto& [name, m] : ms) write_matrix(out, name, m);
}

std::vector<NamedMatrix> read_matrices(std::istream& in) {
    std::vector<NamedMatrix> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (line[0] != '[') throw IoError("expected section header: " + line);
        const auto close = line.find(']');
        if (close == std::string::npos)
            throw IoError("unterminated section header: " + line);
        const std::string name = line.substr(1, close - 1);
        std::istringstream header(line.substr(close + 1));
        Eigen::Index rows = 0, cols = 0;
        if (!(header >> rows >> cols) || rows < 0 || cols < 0)
            throw IoError("bad matrix dimensions in header: " + line);
        Eigen::MatrixXcd m(rows, cols);
        for (Eigen::Index r = 0; r < rows; ++r) {
            if (!std::getline(in, line))
                throw IoError("truncated matrix " + name);
            std::istringstream row(line);
            std::string token;
            for (Eigen::Index c = 0; c < cols; ++c) {
                if (!(row >> token))
                    throw IoError("short row in matrix " + name);
                m(r, c) = parse_complex(token);
            }
        }
        out.emplace_back(name, std::move(m));
    }
    return out;
}

}  // namespace masr
