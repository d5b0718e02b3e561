#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "orlicz_qha/errors.hpp"
#include "orlicz_qha/serialize.hpp"

namespace oqha {

namespace {

static_assert(std::endian::native == std::endian::little, "binary layout assumes a little-endian host");

template <typename T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T get(std::istream& is) {
  T v{};
  if (!is.read(reinterpret_cast<char*>(&v), sizeof v)) throw Error(ErrorCode::ParseError, "truncated binary input");
  return v;
}

void write_values(std::ostream& os, const cd* data, std::size_t count) {
  for (std::size_t i = 0; i < count; ++i) {
    put(os, data[i].real());
    put(os, data[i].imag());
  }
}

void read_tag(std::istream& is, const char* expected) {
  char tag[8];
  if (!is.read(tag, 8) || std::memcmp(tag, expected, 8) != 0)
    throw Error(ErrorCode::ParseError, std::string("missing binary tag ") + expected);
}

std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

bool parse_double(const std::string& s, double& out) {
  try {
    std::size_t used = 0;
    out = std::stod(s, &used);
    return s.find_first_not_of(" \t\r", used) == std::string::npos;
  } catch (...) {
    return false;
  }
}

std::pair<double, double> parse_pair(const std::string& line, std::size_t lineno) {
  const auto comma = line.find(',');
  double a = 0, b = 0;
  if (comma == std::string::npos || !parse_double(line.substr(0, comma), a) || !parse_double(line.substr(comma + 1), b))
    throw Error(ErrorCode::ParseError, "malformed CSV row " + std::to_string(lineno));
  return {a, b};
}

}  // namespace

void write_step_csv(std::ostream& os, const StepFunction& mu) {
  os << "t_break,value\n";
  for (std::size_t i = 0; i < mu.size(); ++i)
    os << format_double(mu.breakpoints()[i]) << ',' << format_double(mu.values()[i]) << '\n';
}

StepFunction read_step_csv(std::istream& is) {
  std::string line;
  std::size_t lineno = 0;
  std::vector<double> t, v;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (lineno == 1 && line.rfind("t_break", 0) == 0) continue;
    const auto [a, b] = parse_pair(line, lineno);
    t.push_back(a);
    v.push_back(b);
  }
  try {
    return StepFunction(std::move(t), std::move(v));
  } catch (const Error& e) {
    throw Error(ErrorCode::ParseError, std::string("invalid step function: ") + e.what());
  }
}

void write_grid_binary(std::ostream& os, const GridFunction& f) {
  os.write(kGridTag, 8);
  put<std::uint64_t>(os, static_cast<std::uint64_t>(f.grid.d));
  put<double>(os, f.grid.L);
  put<std::uint64_t>(os, static_cast<std::uint64_t>(f.grid.n));
  write_values(os, f.values.data(), static_cast<std::size_t>(f.values.size()));
}

GridFunction read_grid_binary(std::istream& is) {
  read_tag(is, kGridTag);
  const auto d = get<std::uint64_t>(is);
  const auto L = get<double>(is);
  const auto n = get<std::uint64_t>(is);
  if (d < 1 || d > 4 || n < 2 || n > 4096 || n % 2 || !(L > 0.0)) throw Error(ErrorCode::ParseError, "invalid grid header");
  GridSpec g{static_cast<int>(d), L, static_cast<int>(n)};
  Eigen::VectorXcd v(static_cast<Eigen::Index>(g.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double re = get<double>(is), im = get<double>(is);
    v(i) = cd(re, im);
  }
  try {
    return GridFunction(g, std::move(v));
  } catch (const Error& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
}

void write_operator_binary(std::ostream& os, const OperatorMatrix& A) {
  if (A.rows() != A.cols()) throw Error(ErrorCode::DimensionMismatch, "operator must be square");
  os.write(kOperatorTag, 8);
  put<std::uint64_t>(os, 0);
  put<double>(os, 0.0);
  put<std::uint64_t>(os, static_cast<std::uint64_t>(A.rows()));
  // Row-major on disk; Eigen stores column-major.
  const Eigen::Matrix<cd, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = A;
  write_values(os, rm.data(), static_cast<std::size_t>(rm.size()));
}

OperatorMatrix read_operator_binary(std::istream& is) {
  read_tag(is, kOperatorTag);
  get<std::uint64_t>(is);
  get<double>(is);
  const auto n = get<std::uint64_t>(is);
  if (n < 1 || n > 8192) throw Error(ErrorCode::ParseError, "invalid operator header");
  const auto N = static_cast<Eigen::Index>(n);
  OperatorMatrix A(N, N);
  for (Eigen::Index r = 0; r < N; ++r)
    for (Eigen::Index c = 0; c < N; ++c) {
      const double re = get<double>(is), im = get<double>(is);
      A(r, c) = cd(re, im);
    }
  if (!A.allFinite()) throw Error(ErrorCode::ParseError, "operator entries must be finite");
  return A;
}

void write_grid_csv(std::ostream& os, const GridFunction& f) {
  os << "# gridfunction d=" << f.grid.d << " L=" << format_double(f.grid.L) << " n=" << f.grid.n << '\n';
  for (Eigen::Index i = 0; i < f.values.size(); ++i)
    os << format_double(f.values(i).real()) << ',' << format_double(f.values(i).imag()) << '\n';
}

GridFunction read_grid_csv(std::istream& is) {
  std::string header;
  if (!std::getline(is, header) || header.rfind("# gridfunction", 0) != 0)
    throw Error(ErrorCode::ParseError, "missing '# gridfunction' header");
  GridSpec g;
  {
    std::istringstream hs(header.substr(14));
    std::string tok;
    int seen = 0;
    while (hs >> tok) {
      const auto eq = tok.find('=');
      if (eq == std::string::npos) throw Error(ErrorCode::ParseError, "bad header token '" + tok + "'");
      const std::string key = tok.substr(0, eq);
      double val = 0;
      if (!parse_double(tok.substr(eq + 1), val)) throw Error(ErrorCode::ParseError, "bad header value '" + tok + "'");
      if (key == "d") g.d = static_cast<int>(val), seen |= 1;
      else if (key == "L") g.L = val, seen |= 2;
      else if (key == "n") g.n = static_cast<int>(val), seen |= 4;
      else throw Error(ErrorCode::ParseError, "unknown header key '" + key + "'");
    }
    if (seen != 7) throw Error(ErrorCode::ParseError, "header needs d, L and n");
  }
  try {
    g.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  Eigen::VectorXcd v(static_cast<Eigen::Index>(g.size()));
  std::string line;
  Eigen::Index i = 0;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (i >= v.size()) throw Error(ErrorCode::ParseError, "too many grid rows");
    const auto [re, im] = parse_pair(line, lineno);
    v(i++) = cd(re, im);
  }
  if (i != v.size()) throw Error(ErrorCode::ParseError, "too few grid rows");
  return GridFunction(g, std::move(v));
}

FileKind sniff_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open '" + path + "'");
  char head[16] = {};
  in.read(head, 16);
  const std::string s(head, static_cast<std::size_t>(in.gcount()));
  if (s.rfind(std::string(kGridTag, 8), 0) == 0) return FileKind::Grid;
  if (s.rfind(std::string(kOperatorTag, 8), 0) == 0) return FileKind::Operator;
  if (s.rfind("# gridfunction", 0) == 0) return FileKind::GridCsv;
  return FileKind::StepCsv;
}

}  // namespace oqha
