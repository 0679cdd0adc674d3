#include "stringtop/graded.hpp"

#include <sstream>

namespace stringtop {

namespace {

std::string scalar(const Complex &z) {
  std::ostringstream os;
  os.precision(12);
  if (z.imag() == 0.0)
    os << z.real();
  else if (z.real() == 0.0)
    os << z.imag() << "i";
  else
    os << "(" << z.real() << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag())
       << "i)";
  return os.str();
}

} // namespace

std::string to_string(const GradedCoefficient &a) {
  if (a.is_zero())
    return "0";
  std::string out;
  for (const auto &t : a.terms()) {
    if (!out.empty())
      out += " + ";
    out += scalar(t.value);
    if (t.mask == 0)
      continue;
    out += "*";
    for (Mask m = t.mask; m; m &= m - 1)
      out += "t" + std::to_string(std::countr_zero(m) + 1);
  }
  return out;
}

} // namespace stringtop
