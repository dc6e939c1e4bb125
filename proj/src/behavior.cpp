#include "belldet/behavior.hpp"

#include <cmath>
#include <string>

namespace belldet {

std::vector<double> Behavior::marginal_a() const {
  std::vector<double> pa(std::size_t(m_) * o_, 0.0);
  for (int x = 0; x < m_; ++x)
    for (int a = 0; a < o_; ++a) {
      double s = 0;
      for (int b = 0; b < o_; ++b) s += at(x, 0, a, b);
      pa[std::size_t(x) * o_ + a] = s;
    }
  return pa;
}

std::vector<double> Behavior::marginal_b() const {
  std::vector<double> pb(std::size_t(m_) * o_, 0.0);
  for (int y = 0; y < m_; ++y)
    for (int b = 0; b < o_; ++b) {
      double s = 0;
      for (int a = 0; a < o_; ++a) s += at(0, y, a, b);
      pb[std::size_t(y) * o_ + b] = s;
    }
  return pb;
}

void Behavior::validate(double tol) const {
  if (m_ < 1 || o_ < 2 || p_.size() != std::size_t(m_) * m_ * o_ * o_)
    throw InputError("behavior: inconsistent dimensions");
  for (int x = 0; x < m_; ++x)
    for (int y = 0; y < m_; ++y) {
      double sum = 0;
      for (int a = 0; a < o_; ++a)
        for (int b = 0; b < o_; ++b) {
          double v = at(x, y, a, b);
          if (v < -tol || v > 1 + tol)
            throw InputError("behavior: entry " + std::to_string(v) +
                             " out of [0,1] at x=" + std::to_string(x) +
                             " y=" + std::to_string(y) + " a=" + std::to_string(a) +
                             " b=" + std::to_string(b));
          sum += v;
        }
      if (std::abs(sum - 1) > tol)
        throw InputError("behavior: context (" + std::to_string(x) + "," +
                         std::to_string(y) + ") sums to " + std::to_string(sum));
    }
  // No-signaling: Alice's marginal must not depend on y, and vice versa.
  for (int x = 0; x < m_; ++x)
    for (int a = 0; a < o_; ++a) {
      double ref = 0;
      for (int b = 0; b < o_; ++b) ref += at(x, 0, a, b);
      for (int y = 1; y < m_; ++y) {
        double s = 0;
        for (int b = 0; b < o_; ++b) s += at(x, y, a, b);
        if (std::abs(s - ref) > tol)
          throw InputError("behavior: signaling A->B at x=" + std::to_string(x) +
                           " a=" + std::to_string(a) + " y=" + std::to_string(y));
      }
    }
  for (int y = 0; y < m_; ++y)
    for (int b = 0; b < o_; ++b) {
      double ref = 0;
      for (int a = 0; a < o_; ++a) ref += at(0, y, a, b);
      for (int x = 1; x < m_; ++x) {
        double s = 0;
        for (int a = 0; a < o_; ++a) s += at(x, y, a, b);
        if (std::abs(s - ref) > tol)
          throw InputError("behavior: signaling B->A at y=" + std::to_string(y) +
                           " b=" + std::to_string(b) + " x=" + std::to_string(x));
      }
    }
}

Behavior Behavior::padded(int new_o) const {
  if (new_o < o_) throw InputError("behavior: cannot shrink output range");
  if (new_o == o_) return *this;
  Behavior out(m_, new_o);
  for (int x = 0; x < m_; ++x)
    for (int y = 0; y < m_; ++y)
      for (int a = 0; a < o_; ++a)
        for (int b = 0; b < o_; ++b) out.at(x, y, a, b) = at(x, y, a, b);
  return out;
}

}  // namespace belldet
