#include "schwadapt/fermion.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace schwadapt {

namespace {

// A raw (not normal-ordered) monomial factor: mode index + dagger flag.
struct Ladder {
  uint32_t mode;
  bool dagger;
};

// Sorts `ops` into canonical order, returning the permutation sign, or 0 if a
// repeated operator makes the monomial vanish. `ascending` selects the order.
int canonical_sort(std::vector<uint32_t>& ops, bool ascending) {
  int sign = 1;
  for (size_t i = 1; i < ops.size(); ++i)
    for (size_t j = i; j > 0; --j) {
      if (ops[j] == ops[j - 1]) return 0;
      bool swap = ascending ? ops[j] < ops[j - 1] : ops[j] > ops[j - 1];
      if (!swap) break;
      std::swap(ops[j], ops[j - 1]);
      sign = -sign;
    }
  return sign;
}

// Normal-orders one monomial of ladder operators into `out`, branching on the
// anticommutator {a_i, a_j^+} = delta_ij at each annihilator-creator swap.
void normal_order(cplx coeff, std::vector<Ladder> word, FermionSum& out) {
  if (std::abs(coeff) <= kCoeffPruneTol) return;
  for (size_t i = 0; i + 1 < word.size(); ++i) {
    if (!word[i].dagger && word[i + 1].dagger) {
      std::vector<Ladder> swapped = word;
      std::swap(swapped[i], swapped[i + 1]);
      normal_order(-coeff, std::move(swapped), out);
      if (word[i].mode == word[i + 1].mode) {
        std::vector<Ladder> contracted;
        contracted.reserve(word.size() - 2);
        for (size_t k = 0; k < word.size(); ++k)
          if (k != i && k != i + 1) contracted.push_back(word[k]);
        normal_order(coeff, std::move(contracted), out);
      }
      return;
    }
  }
  std::vector<uint32_t> create, annihilate;
  for (const auto& l : word) (l.dagger ? create : annihilate).push_back(l.mode);
  int sc = canonical_sort(create, /*ascending=*/true);
  int sa = canonical_sort(annihilate, /*ascending=*/false);
  if (sc == 0 || sa == 0) return;
  out.add(coeff * static_cast<double>(sc * sa), std::move(create),
          std::move(annihilate));
}

// Expands coeff * prod_{k in parity} (1 - 2 n_k) * prod ladders, binomially
// over the parity factors and the (a^+ +/- a) ladder pairs.
void expand_monomials(cplx coeff, const std::vector<uint32_t>& parity_modes,
                      const std::vector<std::pair<uint32_t, char>>& xy_sites,
                      FermionSum& out) {
  const size_t np = parity_modes.size();
  const size_t nl = xy_sites.size();
  for (uint64_t pb = 0; pb < (uint64_t{1} << np); ++pb) {
    cplx c1 = coeff;
    std::vector<Ladder> head;
    for (size_t k = 0; k < np; ++k) {
      if ((pb >> k) & 1) {
        c1 *= -2.0;
        head.push_back({parity_modes[k], true});
        head.push_back({parity_modes[k], false});
      }
    }
    for (uint64_t lb = 0; lb < (uint64_t{1} << nl); ++lb) {
      cplx c2 = c1;
      std::vector<Ladder> word = head;
      for (size_t k = 0; k < nl; ++k) {
        bool dagger = ((lb >> k) & 1) == 0;
        // X_q ~ (a_q^+ + a_q), Y_q ~ i (a_q^+ - a_q), after prefix extraction.
        if (xy_sites[k].second == 'Y' && !dagger) c2 *= -1.0;
        word.push_back({xy_sites[k].first, dagger});
      }
      normal_order(c2, std::move(word), out);
    }
  }
}

}  // namespace

void FermionSum::add(cplx coeff, std::vector<uint32_t> create,
                     std::vector<uint32_t> annihilate) {
  auto key = std::pair{std::move(create), std::move(annihilate)};
  auto it = terms_.find(key);
  if (it == terms_.end()) {
    if (std::abs(coeff) > kCoeffPruneTol) terms_.emplace(std::move(key), coeff);
    return;
  }
  it->second += coeff;
  if (std::abs(it->second) <= kCoeffPruneTol) terms_.erase(it);
}

std::vector<FermionTerm> FermionSum::terms() const {
  std::vector<FermionTerm> out;
  out.reserve(terms_.size());
  for (const auto& [key, c] : terms_) out.push_back({c, key.first, key.second});
  return out;
}

std::string FermionSum::str() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [key, c] : terms_) {
    if (!first) os << " + ";
    first = false;
    os << '(' << c.real();
    if (c.imag() != 0.0) os << (c.imag() > 0 ? "+" : "") << c.imag() << 'i';
    os << ')';
    for (auto m : key.first) os << " a" << m << '^';
    for (auto m : key.second) os << " a" << m;
  }
  return os.str();
}

FermionSum reverse_jordan_wigner(const PauliSum& s, uint32_t max_qubits) {
  if (s.num_qubits() > max_qubits)
    throw CapacityError("reverse_jordan_wigner: qubit count over guard");
  FermionSum out(s.num_qubits());
  for (const auto& term : s.terms()) {
    // Per qubit q (ascending):
    //   Z_q          -> p_q
    //   X_q          -> p_0 .. p_{q-1} (a_q^+ + a_q)
    //   Y_q          -> p_0 .. p_{q-1} i (a_q^+ - a_q)
    // with p_k = (1 - 2 n_k). p_k anticommutes with ladders on mode k and
    // commutes with everything else, so all p's move to the front with a
    // sign of (-1) per same-mode ladder passed, then cancel pairwise.
    const PauliString& str = term.string;
    std::vector<int> parity_count(str.n, 0);
    std::vector<std::pair<uint32_t, char>> xy_sites;
    int sign = 1;
    int y_letters = 0;
    for (uint32_t q = 0; q < str.n; ++q) {
      bool x = (str.x_mask >> q) & 1, z = (str.z_mask >> q) & 1;
      if (x) {
        for (uint32_t k = 0; k < q; ++k) {
          // Ladder on mode k already emitted iff k is an earlier X/Y site.
          bool passed_ladder = (str.x_mask >> k) & 1;
          if (passed_ladder) sign = -sign;
          parity_count[k] ^= 1;
        }
        xy_sites.push_back({q, z ? 'Y' : 'X'});
        if (z) ++y_letters;
      } else if (z) {
        // p_q passes only ladders on modes < q, never its own mode: no sign.
        parity_count[q] ^= 1;
      }
    }
    std::vector<uint32_t> parity_modes;
    for (uint32_t k = 0; k < str.n; ++k)
      if (parity_count[k]) parity_modes.push_back(k);
    cplx coeff = term.coeff * static_cast<double>(sign);
    for (int k = 0; k < y_letters; ++k) coeff *= cplx{0.0, 1.0};
    expand_monomials(coeff, parity_modes, xy_sites, out);
  }
  return out;
}

PauliSum jw_ladder(uint32_t n_qubits, uint32_t mode, bool dagger) {
  // a_j = (prod_{k<j} Z_k) sigma_j^-, sigma^- = (X + iY)/2.
  PauliSum zs = PauliSum::identity(n_qubits);
  for (uint32_t k = 0; k < mode; ++k) {
    uint64_t bit = uint64_t{1} << k;
    zs = zs * PauliSum::single(1.0, PauliString(n_qubits, 0, bit));
  }
  uint64_t bit = uint64_t{1} << mode;
  PauliSum x = PauliSum::single(0.5, PauliString(n_qubits, bit, 0));
  PauliSum y = PauliSum::single(dagger ? cplx{0.0, -0.5} : cplx{0.0, 0.5},
                                PauliString(n_qubits, bit, bit));
  return zs * (x + y);
}

PauliSum jw_image(const FermionSum& f) {
  const uint32_t n = f.num_modes();
  PauliSum out(n);
  for (const auto& term : f.terms()) {
    PauliSum prod = PauliSum::identity(n, term.coeff);
    for (auto m : term.create) prod = prod * jw_ladder(n, m, true);
    for (auto m : term.annihilate) prod = prod * jw_ladder(n, m, false);
    out.add(prod);
  }
  return out;
}

}  // namespace schwadapt
