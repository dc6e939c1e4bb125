#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace belldet {

// Bad external data (files, CLI arguments, out-of-contract calls). CLI exit 2.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Violated internal invariant, i.e. a bug. CLI exit 3.
struct InvariantError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Joint conditional probability table P(a,b|x,y) for a bipartite scenario
// with m inputs and o outputs per party. Flat layout is row-major in
// (x,y,a,b).
class Behavior {
 public:
  Behavior() = default;
  Behavior(int m, int o) : m_(m), o_(o), p_(std::size_t(m) * m * o * o, 0.0) {
    if (m < 1 || o < 2) throw InputError("behavior: need m >= 1, o >= 2");
  }

  int m() const { return m_; }
  int o() const { return o_; }

  std::size_t index(int x, int y, int a, int b) const {
    return ((std::size_t(x) * m_ + y) * o_ + a) * o_ + b;
  }
  double at(int x, int y, int a, int b) const { return p_[index(x, y, a, b)]; }
  double& at(int x, int y, int a, int b) { return p_[index(x, y, a, b)]; }

  std::span<const double> data() const { return p_; }
  std::vector<double>& raw() { return p_; }
  const std::vector<double>& raw() const { return p_; }

  // P^A(a|x) at slot x*o+a, taken from the y=0 page. Call validate() first if
  // the table is of uncertain origin; internally produced tables are
  // no-signaling by construction.
  std::vector<double> marginal_a() const;
  // P^B(b|y) at slot y*o+b, from the x=0 page.
  std::vector<double> marginal_b() const;

  // Nonnegativity, per-(x,y) normalization and no-signaling, all within tol.
  // Throws InputError describing the first violation.
  void validate(double tol) const;

  // Zero-extends the output range (new outcomes get probability 0).
  Behavior padded(int new_o) const;

 private:
  int m_ = 0, o_ = 0;
  std::vector<double> p_;
};

}  // namespace belldet
