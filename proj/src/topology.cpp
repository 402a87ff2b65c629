#include "delicoco/topology.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "delicoco/errors.hpp"

namespace delicoco {

TopologyKind topology_kind_from_string(const std::string& s) {
  if (s == "ring") return TopologyKind::ring;
  if (s == "torus") return TopologyKind::torus;
  if (s == "fully_connected") return TopologyKind::fully_connected;
  if (s == "disconnected") return TopologyKind::disconnected;
  throw ConfigError("unknown topology kind: \"" + s +
                    "\" (expected ring|torus|fully_connected|disconnected)");
}

std::string to_string(TopologyKind kind) {
  switch (kind) {
    case TopologyKind::ring: return "ring";
    case TopologyKind::torus: return "torus";
    case TopologyKind::fully_connected: return "fully_connected";
    case TopologyKind::disconnected: return "disconnected";
  }
  return "?";
}

namespace {

int exact_sqrt(int n) {
  const int r = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n))));
  return r * r == n ? r : -1;
}

}  // namespace

Topology build_topology(TopologyKind kind, int n) {
  Topology t;
  t.kind = kind;
  t.n = n;
  t.neighbors.assign(static_cast<size_t>(std::max(n, 0)), {});

  switch (kind) {
    case TopologyKind::ring: {
      if (n < 3) throw ConfigError("ring topology requires n >= 3");
      for (int i = 0; i < n; ++i) {
        std::set<int> nb{(i + 1) % n, (i + n - 1) % n};
        t.neighbors[i].assign(nb.begin(), nb.end());
      }
      break;
    }
    case TopologyKind::torus: {
      const int side = n >= 4 ? exact_sqrt(n) : -1;
      if (side < 2) throw ConfigError("torus topology: n must be a perfect square >= 4");
      for (int r = 0; r < side; ++r) {
        for (int c = 0; c < side; ++c) {
          const int i = r * side + c;
          std::set<int> nb{r * side + (c + 1) % side,
                           r * side + (c + side - 1) % side,
                           ((r + 1) % side) * side + c,
                           ((r + side - 1) % side) * side + c};
          nb.erase(i);
          t.neighbors[i].assign(nb.begin(), nb.end());
        }
      }
      break;
    }
    case TopologyKind::fully_connected: {
      if (n < 2) throw ConfigError("fully_connected topology requires n >= 2");
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          if (j != i) t.neighbors[i].push_back(j);
      break;
    }
    case TopologyKind::disconnected: {
      if (n < 2) throw ConfigError("disconnected topology requires n >= 2");
      const int half = n / 2;
      for (int i = 0; i < n; ++i) {
        const int lo = i < half ? 0 : half;
        const int hi = i < half ? half : n;
        for (int j = lo; j < hi; ++j)
          if (j != i) t.neighbors[i].push_back(j);
      }
      break;
    }
  }
  return t;
}

SpectralQuantities spectral_quantities(const Matrix& w) {
  if (w.rows != w.cols) throw ContractViolation("spectral_quantities: matrix is not square");
  SpectralQuantities out;
  if (w.rows == 1) {
    // Single node: mixing is trivially exact.
    out.delta = 1.0;
    out.lambda_max_i_minus_w = 1.0 - w(0, 0);
    return out;
  }
  const std::vector<double> eigs = eig_sym(w);  // descending |.|
  const double lambda2_abs = std::fabs(eigs[1]);
  const double lambda_min = *std::min_element(eigs.begin(), eigs.end());
  out.lambda_max_i_minus_w = 1.0 - lambda_min;
  const double delta = 1.0 - lambda2_abs;
  if (delta <= 1e-12) {
    out.delta = 0.0;
    out.connected = false;
  } else {
    out.delta = delta;
  }
  return out;
}

MixingMatrix metropolis_mixing(const Topology& t) {
  const int n = t.n;
  MixingMatrix mm;
  mm.w = Matrix(n, n);

  if (t.kind == TopologyKind::fully_connected) {
    for (double& x : mm.w.data) x = 1.0 / n;
  } else {
    for (int i = 0; i < n; ++i) {
      double off_sum = 0.0;
      for (int j : t.neighbors[i]) {
        const double wij = 1.0 / (1.0 + std::max(t.degree(i), t.degree(j)));
        mm.w(i, j) = wij;
        off_sum += wij;
      }
      mm.w(i, i) = 1.0 - off_sum;
    }
  }

  const SpectralQuantities sq = spectral_quantities(mm.w);
  mm.delta = sq.delta;
  mm.lambda_max_i_minus_w = sq.lambda_max_i_minus_w;
  mm.connected = sq.connected;
  return mm;
}

}  // namespace delicoco
