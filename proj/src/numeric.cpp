#include "orlicz_qha/numeric.hpp"

#include <cstdio>
#include <string>

namespace oqha {

std::vector<double> log_grid(double lo, double hi, std::size_t points) {
  std::vector<double> out(points);
  if (points == 1) {
    out[0] = lo;
    return out;
  }
  const double a = std::log(lo), b = std::log(hi);
  for (std::size_t i = 0; i < points; ++i)
    out[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(points - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

void Digest::add(const void* data, std::size_t size) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < size; ++i) {
    state_ ^= bytes[i];
    state_ *= 1099511628211ull;
  }
}

std::string Digest::hex() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(state_));
  return buf;
}

}  // namespace oqha
