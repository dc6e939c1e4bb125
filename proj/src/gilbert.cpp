#include "belldet/gilbert.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <utility>

#include "belldet/codec.hpp"
#include "belldet/rng.hpp"
#include "belldet/strategies.hpp"

namespace belldet {
namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double dist2(std::span<const double> a, std::span<const double> b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

// Gaussian elimination with partial pivoting; returns false on a tiny pivot.
bool solve_dense(std::vector<std::vector<double>>& a, std::vector<double>& b) {
  int n = int(b.size());
  for (int k = 0; k < n; ++k) {
    int piv = k;
    for (int i = k + 1; i < n; ++i)
      if (std::abs(a[i][k]) > std::abs(a[piv][k])) piv = i;
    if (std::abs(a[piv][k]) < 1e-13) return false;
    std::swap(a[piv], a[k]);
    std::swap(b[piv], b[k]);
    for (int i = k + 1; i < n; ++i) {
      double f = a[i][k] / a[k][k];
      if (f == 0) continue;
      for (int j = k; j < n; ++j) a[i][j] -= f * a[k][j];
      b[i] -= f * b[k];
    }
  }
  for (int k = n - 1; k >= 0; --k) {
    double s = b[k];
    for (int j = k + 1; j < n; ++j) s -= a[k][j] * b[j];
    b[k] = s / a[k][k];
  }
  return true;
}

// Best point on the segment (1-t) p + t q, minimizing distance to target.
double segment_step(std::span<const double> target, std::span<const double> p,
                    std::span<const double> q) {
  double num = 0, den = 0;
  for (std::size_t i = 0; i < target.size(); ++i) {
    double d = q[i] - p[i];
    num += (target[i] - p[i]) * d;
    den += d * d;
  }
  if (den <= 0) return 0;
  return std::clamp(num / den, 0.0, 1.0);
}

}  // namespace

std::vector<double> symmetrize(std::span<const double> v, int copies) {
  if (copies < 1 || copies > 12) throw InputError("symmetrize: copies out of range");
  int m = 1 << copies;
  std::size_t mm = std::size_t(m) * m;
  if (v.size() % mm != 0) throw InputError("symmetrize: size mismatch");
  std::size_t oo = v.size() / mm;
  int o = int(std::lround(std::sqrt(double(oo))));
  if (std::size_t(o) * o != oo || (o != m && o != m + 1))
    throw InputError("symmetrize: scenario is not a padded power of two");

  std::vector<int> perm(copies);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<double> acc(v.size(), 0.0);
  std::vector<int> pin(m), pout(o);
  int count = 0;
  do {
    ++count;
    for (int i = 0; i < m; ++i) pin[i] = codec_permute(i, perm);
    for (int i = 0; i < m; ++i) pout[i] = pin[i];
    if (o == m + 1) pout[m] = m;  // a shared no-click outcome stays put
    for (int x = 0; x < m; ++x)
      for (int y = 0; y < m; ++y)
        for (int a = 0; a < o; ++a)
          for (int b = 0; b < o; ++b)
            acc[((std::size_t(x) * m + y) * o + a) * o + b] +=
                v[((std::size_t(pin[x]) * m + pin[y]) * o + pout[a]) * o + pout[b]];
  } while (std::next_permutation(perm.begin(), perm.end()));

  for (double& e : acc) e /= count;
  return acc;
}

std::vector<double> party_symmetrize(std::span<const double> v, int m, int o) {
  if (v.size() != std::size_t(m) * m * o * o)
    throw InputError("party_symmetrize: size mismatch");
  std::vector<double> out(v.size());
  for (int x = 0; x < m; ++x)
    for (int y = 0; y < m; ++y)
      for (int a = 0; a < o; ++a)
        for (int b = 0; b < o; ++b)
          out[((std::size_t(x) * m + y) * o + a) * o + b] =
              0.5 * (v[((std::size_t(x) * m + y) * o + a) * o + b] +
                     v[((std::size_t(y) * m + x) * o + b) * o + a]);
  return out;
}

namespace {

// active-set core of reoptimize_hull with the Gram matrix and atom-target
// overlaps supplied by the caller (the driver keeps them incrementally)
std::vector<double> nnls_simplex(std::span<const double> target,
                                 const std::vector<std::vector<double>>& atoms,
                                 const std::vector<std::vector<double>>& gram,
                                 const std::vector<double>& h,
                                 std::vector<double>& weights) {
  int n = int(atoms.size());
  weights.resize(n, 0.0);
  if (n == 1) {
    weights[0] = 1.0;
    return atoms[0];
  }

  // warm start: clip and renormalize
  double wsum = 0;
  for (double& w : weights) {
    w = std::max(w, 0.0);
    wsum += w;
  }
  if (wsum <= 0) {
    std::fill(weights.begin(), weights.end(), 1.0 / n);
  } else {
    for (double& w : weights) w /= wsum;
  }

  auto combine = [&](const std::vector<double>& w) {
    std::vector<double> p(target.size(), 0.0);
    for (int i = 0; i < n; ++i) {
      if (w[i] == 0) continue;
      for (std::size_t k = 0; k < p.size(); ++k) p[k] += w[i] * atoms[i][k];
    }
    return p;
  };

  auto fallback = [&]() {
    std::vector<double> p = combine(weights);
    int best = -1;
    double best_d2 = dist2(target, p), best_t = 0;
    for (int i = 0; i < n; ++i) {
      double t = segment_step(target, p, atoms[i]);
      if (t <= 0) continue;
      std::vector<double> q(p.size());
      for (std::size_t k = 0; k < p.size(); ++k)
        q[k] = p[k] + t * (atoms[i][k] - p[k]);
      double d2 = dist2(target, q);
      if (d2 < best_d2 - 1e-15) {
        best_d2 = d2;
        best = i;
        best_t = t;
      }
    }
    if (best >= 0) {
      for (double& w : weights) w *= 1.0 - best_t;
      weights[best] += best_t;
    }
    return combine(weights);
  };

  std::vector<char> active(n, 0);
  for (int i = 0; i < n; ++i) active[i] = weights[i] > 1e-14;
  if (std::count(active.begin(), active.end(), char(1)) == 0) active[0] = 1;

  const double tol = 1e-12;
  for (int pass = 0; pass < 100 * n; ++pass) {
    // equality-constrained least squares on the active support
    std::vector<int> sup;
    for (int i = 0; i < n; ++i)
      if (active[i]) sup.push_back(i);
    int k = int(sup.size());
    std::vector<std::vector<double>> kkt(k + 1, std::vector<double>(k + 1, 0.0));
    std::vector<double> rhs(k + 1, 0.0);
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < k; ++j) kkt[i][j] = gram[sup[i]][sup[j]];
      kkt[i][i] += 1e-12;
      kkt[i][k] = kkt[k][i] = 1.0;
      rhs[i] = h[sup[i]];
    }
    rhs[k] = 1.0;
    if (!solve_dense(kkt, rhs)) return fallback();

    bool feasible = true;
    for (int i = 0; i < k; ++i)
      if (rhs[i] < -1e-12) feasible = false;

    if (!feasible) {
      // step from the current point toward the subproblem optimum until a
      // weight hits zero, then retire it
      double alpha = 1.0;
      int drop = -1;
      for (int i = 0; i < k; ++i) {
        double wo = weights[sup[i]], wn = rhs[i];
        if (wn < wo - 1e-15 && wn < 0) {
          double a = wo / (wo - wn);
          if (a < alpha) {
            alpha = a;
            drop = sup[i];
          }
        }
      }
      if (drop < 0) return fallback();
      for (int i = 0; i < k; ++i) {
        double wo = weights[sup[i]];
        weights[sup[i]] = wo + alpha * (rhs[i] - wo);
      }
      weights[drop] = 0;
      active[drop] = 0;
      if (std::count(active.begin(), active.end(), char(1)) == 0) return fallback();
      continue;
    }

    std::fill(weights.begin(), weights.end(), 0.0);
    for (int i = 0; i < k; ++i) weights[sup[i]] = std::max(rhs[i], 0.0);
    double lambda = rhs[k];

    // KKT check on the inactive set: reduced gradient must be nonnegative
    int enter = -1;
    double worst = -tol;
    for (int i = 0; i < n; ++i) {
      if (active[i]) continue;
      double g = lambda - h[i];
      for (int j = 0; j < k; ++j) g += gram[i][sup[j]] * weights[sup[j]];
      if (g < worst) {
        worst = g;
        enter = i;
      }
    }
    if (enter < 0) return combine(weights);
    active[enter] = 1;
  }
  return fallback();
}

}  // namespace

std::vector<double> reoptimize_hull(std::span<const double> target,
                                    const std::vector<std::vector<double>>& atoms,
                                    std::vector<double>& weights) {
  int n = int(atoms.size());
  if (n == 0) throw InputError("reoptimize_hull: no atoms");
  std::vector<std::vector<double>> gram(n, std::vector<double>(n));
  std::vector<double> h(n);
  for (int i = 0; i < n; ++i) {
    h[i] = dot(atoms[i], target);
    for (int j = 0; j <= i; ++j) gram[i][j] = gram[j][i] = dot(atoms[i], atoms[j]);
  }
  return nnls_simplex(target, atoms, gram, h, weights);
}

GilbertOutcome gilbert_distance(const DeflatedPoint& target, const GilbertConfig& config) {
  if (config.memory < 1 || config.memory > 200)
    throw InputError("gilbert_distance: memory must lie in 1..200");
  int m = target.table.m();
  int o = target.table.o();
  std::size_t dim = std::size_t(m) * m * o * o;

  bool sym = config.symmetrize && target.copies >= 2;
  auto project = [&](std::vector<double> v) {
    if (sym) v = symmetrize(v, target.copies);
    if (config.party_symmetrize) v = party_symmetrize(v, m, o);
    return v;
  };

  std::vector<double> tvec(target.table.data().begin(), target.table.data().end());
  tvec = project(std::move(tvec));

  LocalBoundOptions oracle_opts;
  oracle_opts.restarts = config.restarts;
  oracle_opts.threads = config.threads;

  DeterministicStrategy all_last;
  all_last.alice.assign(m, o - 1);
  all_last.bob.assign(m, o - 1);
  Behavior p0 = strategy_point(all_last, m, o);

  // atoms[0] is the running point itself, carried as a pseudo-atom so hull
  // reoptimization can only improve on it; the rest are polytope vertices.
  // vertex_keys[i] identifies atoms[i+1] and tracks evictions, so a vertex
  // that was dropped from memory can be re-admitted later.
  std::vector<std::vector<double>> atoms;
  atoms.emplace_back(project({p0.data().begin(), p0.data().end()}));
  std::vector<double> weights = {1.0};
  using AtomKey = std::pair<std::uint64_t, std::uint64_t>;
  std::vector<AtomKey> vertex_keys;

  // Gram matrix and atom-target overlaps for the hull reoptimizer, maintained
  // incrementally: vertex-vertex entries never change once computed, only the
  // pseudo-atom row has to be refreshed between rounds.
  std::vector<std::vector<double>> gram = {{dot(atoms[0], atoms[0])}};
  std::vector<double> h = {dot(atoms[0], tvec)};

  std::vector<double> current = atoms[0];
  GilbertOutcome out;
  double certified = -1.0;

  for (int iter = 1; iter <= config.max_iterations; ++iter) {
    out.iterations = iter;
    std::vector<double> d(dim);
    for (std::size_t i = 0; i < dim; ++i) d[i] = tvec[i] - current[i];
    double dist = std::sqrt(dist2(tvec, current));

    BellFunctional c = BellFunctional::zeros(m, o, false);
    c.joint = d;
    // rotate the see-saw starting points every round; a fixed seed keeps
    // reusing the same starts and eventually stalls on known face vertices
    oracle_opts.seed = mix_seed(config.seed, std::uint64_t(iter));
    OracleResult vio = oracle_max_overlap(c, oracle_opts, config.exact_oracle);
    double gap = vio.overlap - dot(d, current);
    if (gap <= config.gap_tol && !config.exact_oracle && dist > config.epsilon) {
      // the current point lies in the hull of known vertices, so a
      // non-positive gap can only be an oracle miss; confirm the stall with a
      // heavier sweep before trusting it
      LocalBoundOptions heavy = oracle_opts;
      heavy.restarts = 4 * std::max(1, oracle_opts.restarts);
      heavy.seed = mix_seed(config.seed, 0x636f6e6669726dULL + std::uint64_t(iter));
      OracleResult again = oracle_max_overlap(c, heavy, false);
      if (again.overlap > vio.overlap) {
        vio = again;
        gap = vio.overlap - dot(d, current);
      }
    }
    out.final_gap = gap;

    if ((iter - 1) % config.log_every == 0 || gap <= config.gap_tol || dist <= config.epsilon)
      out.log.push_back({iter, dist, gap});

    if (dist <= config.epsilon) {
      out.converged = true;
      out.verdict = GilbertVerdict::kInside;
      break;
    }
    // The hyperplane through the current point bounds the hull distance from
    // below by dist - gap/dist; remember the best such bound in case the
    // iteration cap lands first.
    certified = std::max(certified, dist - gap / dist);
    // A vanished gap at positive distance means the projection itself was
    // found and the point sits outside at the working resolution.
    if (gap <= config.gap_tol) {
      out.converged = true;
      out.verdict = GilbertVerdict::kSeparated;
      break;
    }

    AtomKey key{map_lex_index(vio.vertex.alice, o), map_lex_index(vio.vertex.bob, o)};
    if (std::find(vertex_keys.begin(), vertex_keys.end(), key) == vertex_keys.end()) {
      Behavior vp = strategy_point(vio.vertex, m, o);
      atoms.emplace_back(project({vp.data().begin(), vp.data().end()}));
      weights.push_back(0.0);
      vertex_keys.push_back(key);
      std::size_t n = atoms.size();
      gram.emplace_back();
      gram.back().reserve(n);
      for (std::size_t i = 0; i + 1 < n; ++i) {
        double g = dot(atoms[i], atoms.back());
        gram[i].push_back(g);
        gram.back().push_back(g);
      }
      gram.back().push_back(dot(atoms.back(), atoms.back()));
      h.push_back(dot(atoms.back(), tvec));
    }

    std::vector<double> prev = current;
    std::vector<double> next = nnls_simplex(tvec, atoms, gram, h, weights);

    // insurance: never do worse than the plain two-point step
    double t2 = segment_step(tvec, prev, atoms.back());
    std::vector<double> two(dim);
    for (std::size_t i = 0; i < dim; ++i)
      two[i] = prev[i] + t2 * (atoms.back()[i] - prev[i]);
    if (dist2(tvec, two) < dist2(tvec, next)) {
      next = two;
      std::fill(weights.begin(), weights.end(), 0.0);
      weights[0] = 1.0 - t2;
      weights.back() = t2;
    }
    current = std::move(next);
    atoms[0] = current;

    if (int(atoms.size()) - 1 > config.memory) {
      int evict = 1;
      for (int i = 2; i < int(atoms.size()); ++i)
        if (weights[i] < weights[evict]) evict = i;
      atoms.erase(atoms.begin() + evict);
      weights.erase(weights.begin() + evict);
      vertex_keys.erase(vertex_keys.begin() + (evict - 1));
      gram.erase(gram.begin() + evict);
      for (auto& row : gram) row.erase(row.begin() + evict);
      h.erase(h.begin() + evict);
    }
    for (std::size_t i = 0; i < atoms.size(); ++i)
      gram[0][i] = gram[i][0] = dot(atoms[0], atoms[i]);
    h[0] = dot(atoms[0], tvec);
    // fold everything the pseudo-atom absorbed back into its warm-start weight
    double rest = 0;
    for (std::size_t i = 1; i < weights.size(); ++i) rest += std::max(weights[i], 0.0);
    weights[0] = std::max(1.0 - rest, 0.0);
  }

  std::vector<double> d(dim);
  for (std::size_t i = 0; i < dim; ++i) d[i] = tvec[i] - current[i];
  out.witness.direction = d;
  out.witness.distance = std::sqrt(dist2(tvec, current));
  out.witness.functional = BellFunctional::zeros(m, o, false);
  out.witness.functional.joint = d;
  out.witness.inner_point = current;
  if (!out.converged)
    out.verdict = certified > config.epsilon ? GilbertVerdict::kSeparated
                                             : GilbertVerdict::kIterationLimit;
  return out;
}

}  // namespace belldet
