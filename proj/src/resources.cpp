#include "schwadapt/resources.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace schwadapt {

namespace {

void synthesize_string(Circuit& c, const PauliString& s, double coeff, double theta) {
  auto support = s.support();
  if (support.empty()) return;  // identity terms contribute a global phase only

  std::vector<Gate> basis_in, basis_out;
  for (uint32_t q : support) {
    bool x = (s.x_mask >> q) & 1, z = (s.z_mask >> q) & 1;
    if (x && z) {
      // Y -> Z under H S^dg (conjugate), undone by S H.
      basis_in.push_back({GateKind::CLIFF1, static_cast<int>(q), -1, 0.0, "Sdg"});
      basis_in.push_back({GateKind::CLIFF1, static_cast<int>(q), -1, 0.0, "H"});
      basis_out.push_back({GateKind::CLIFF1, static_cast<int>(q), -1, 0.0, "H"});
      basis_out.push_back({GateKind::CLIFF1, static_cast<int>(q), -1, 0.0, "S"});
    } else if (x) {
      basis_in.push_back({GateKind::CLIFF1, static_cast<int>(q), -1, 0.0, "H"});
      basis_out.push_back({GateKind::CLIFF1, static_cast<int>(q), -1, 0.0, "H"});
    }
  }
  for (const auto& g : basis_in) c.gates.push_back(g);
  for (size_t i = 0; i + 1 < support.size(); ++i)
    c.gates.push_back({GateKind::CNOT, static_cast<int>(support[i]),
                       static_cast<int>(support[i + 1]), 0.0, {}});
  c.gates.push_back({GateKind::RZ, static_cast<int>(support.back()), -1,
                     2.0 * coeff * theta, {}});
  for (size_t i = support.size() - 1; i-- > 0;)
    c.gates.push_back({GateKind::CNOT, static_cast<int>(support[i]),
                       static_cast<int>(support[i + 1]), 0.0, {}});
  for (const auto& g : basis_out) c.gates.push_back(g);
}

}  // namespace

Circuit synthesize_exponential(const PauliSum& op, double theta) {
  if (!op.is_hermitian())
    throw std::invalid_argument("synthesize_exponential: non-Hermitian operator");
  Circuit c;
  c.n = op.num_qubits();
  auto terms = op.terms();
  std::stable_sort(terms.begin(), terms.end(),
                   [](const PauliTerm& a, const PauliTerm& b) {
                     auto sa = a.string.support(), sb = b.string.support();
                     uint32_t ma = sa.empty() ? 0 : sa.front();
                     uint32_t mb = sb.empty() ? 0 : sb.front();
                     if (ma != mb) return ma < mb;
                     return a.string.letters() < b.string.letters();
                   });
  for (const auto& t : terms)
    synthesize_string(c, t.string, t.coeff.real(), theta);
  return c;
}

int cnot_depth(const Circuit& c) {
  std::vector<int> depth(c.n, 0);
  int best = 0;
  for (const auto& g : c.gates) {
    if (g.kind != GateKind::CNOT) continue;
    int d = std::max(depth[g.q0], depth[g.q1]) + 1;
    depth[g.q0] = depth[g.q1] = d;
    best = std::max(best, d);
  }
  return best;
}

long cnot_count(const Circuit& c) {
  long k = 0;
  for (const auto& g : c.gates)
    if (g.kind == GateKind::CNOT) ++k;
  return k;
}

long rz_count(const Circuit& c) {
  long k = 0;
  for (const auto& g : c.gates)
    if (g.kind == GateKind::RZ) ++k;
  return k;
}

Circuit concatenate(const std::vector<Circuit>& circuits) {
  Circuit out;
  for (const auto& c : circuits) {
    out.n = std::max(out.n, c.n);
    out.gates.insert(out.gates.end(), c.gates.begin(), c.gates.end());
  }
  return out;
}

Circuit cancel_adjacent_cnots(const Circuit& c) {
  std::vector<Gate> gates = c.gates;
  bool changed = true;
  while (changed) {
    changed = false;
    // last_touch[q]: index of the most recent surviving gate acting on q.
    std::vector<int> last_touch(c.n, -1);
    std::vector<bool> removed(gates.size(), false);
    for (size_t i = 0; i < gates.size(); ++i) {
      const Gate& g = gates[i];
      if (g.kind == GateKind::CNOT) {
        int lc = last_touch[g.q0], lt = last_touch[g.q1];
        if (lc >= 0 && lc == lt && gates[lc].kind == GateKind::CNOT &&
            gates[lc].q0 == g.q0 && gates[lc].q1 == g.q1) {
          removed[i] = removed[lc] = true;
          last_touch[g.q0] = last_touch[g.q1] = -1;
          changed = true;
          continue;
        }
        last_touch[g.q0] = last_touch[g.q1] = static_cast<int>(i);
      } else {
        last_touch[g.q0] = static_cast<int>(i);
      }
    }
    if (changed) {
      std::vector<Gate> kept;
      kept.reserve(gates.size());
      for (size_t i = 0; i < gates.size(); ++i)
        if (!removed[i]) kept.push_back(gates[i]);
      gates = std::move(kept);
    }
  }
  Circuit out;
  out.n = c.n;
  out.gates = std::move(gates);
  return out;
}

ResourceSummary ansatz_resources(
    const std::vector<std::pair<const PauliSum*, double>>& steps) {
  std::vector<Circuit> circuits;
  circuits.reserve(steps.size());
  for (const auto& [op, theta] : steps)
    circuits.push_back(synthesize_exponential(*op, theta));
  Circuit full = concatenate(circuits);
  return {cnot_count(full), cnot_depth(full), rz_count(full)};
}

std::string circuit_to_text(const Circuit& c) {
  std::ostringstream os;
  for (const auto& g : c.gates) {
    switch (g.kind) {
      case GateKind::CNOT: os << "CNOT " << g.q0 << ' ' << g.q1 << '\n'; break;
      case GateKind::RZ: os << "RZ " << g.q0 << ' ' << g.angle << '\n'; break;
      case GateKind::CLIFF1: os << g.tag << ' ' << g.q0 << '\n'; break;
    }
  }
  return os.str();
}

Eigen::MatrixXcd circuit_unitary(const Circuit& c) {
  if (c.n > 12) throw CapacityError("circuit_unitary: n <= 12 required");
  const size_t dim = size_t{1} << c.n;
  const cplx im{0.0, 1.0};
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(dim, dim);

  auto apply_1q = [&](const Eigen::Matrix2cd& m, int q) {
    Eigen::MatrixXcd next = Eigen::MatrixXcd::Zero(dim, dim);
    for (size_t b = 0; b < dim; ++b) {
      size_t bit = (b >> q) & 1;
      for (size_t nb = 0; nb < 2; ++nb) {
        size_t b2 = (b & ~(size_t{1} << q)) | (nb << q);
        next.row(b2) += m(nb, bit) * u.row(b);
      }
    }
    u = std::move(next);
  };

  for (const auto& g : c.gates) {
    switch (g.kind) {
      case GateKind::CNOT: {
        Eigen::MatrixXcd next = Eigen::MatrixXcd::Zero(dim, dim);
        for (size_t b = 0; b < dim; ++b) {
          size_t b2 = ((b >> g.q0) & 1) ? b ^ (size_t{1} << g.q1) : b;
          next.row(b2) = u.row(b);
        }
        u = std::move(next);
        break;
      }
      case GateKind::RZ: {
        Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
        m(0, 0) = std::exp(-im * (g.angle / 2.0));
        m(1, 1) = std::exp(im * (g.angle / 2.0));
        apply_1q(m, g.q0);
        break;
      }
      case GateKind::CLIFF1: {
        Eigen::Matrix2cd m;
        if (g.tag == "H") {
          m << 1, 1, 1, -1;
          m /= std::sqrt(2.0);
        } else if (g.tag == "S") {
          m << 1, 0, 0, im;
        } else if (g.tag == "Sdg") {
          m << 1, 0, 0, -im;
        } else {
          throw std::invalid_argument("unknown CLIFF1 tag: " + g.tag);
        }
        apply_1q(m, g.q0);
        break;
      }
    }
  }
  return u;
}

}  // namespace schwadapt
