#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "schwadapt/pauli.hpp"

namespace schwadapt {

/// One normal-ordered product of ladder operators: creation operators with
/// ascending mode indices, then annihilation operators with descending ones.
struct FermionTerm {
  cplx coeff;
  std::vector<uint32_t> create;
  std::vector<uint32_t> annihilate;
};

/// A normal-ordered polynomial in fermionic creation/annihilation operators.
class FermionSum {
 public:
  explicit FermionSum(uint32_t n_modes) : n_(n_modes) {}

  uint32_t num_modes() const { return n_; }
  size_t size() const { return terms_.size(); }

  /// Adds a term assumed already canonical (create ascending, annihilate
  /// descending, no repeats).
  void add(cplx coeff, std::vector<uint32_t> create,
           std::vector<uint32_t> annihilate);

  std::vector<FermionTerm> terms() const;

  /// e.g. "(1) + (-2) a0^ a0"
  std::string str() const;

 private:
  uint32_t n_;
  std::map<std::pair<std::vector<uint32_t>, std::vector<uint32_t>>, cplx> terms_;
};

/// Rewrites a qubit operator as a normal-ordered fermionic polynomial under
/// the Jordan-Wigner convention a_j = (prod_{k<j} Z_k) sigma_j^-.
FermionSum reverse_jordan_wigner(const PauliSum& s, uint32_t max_qubits = 8);

/// Maps a fermionic polynomial back to qubits (the forward JW transform).
/// Satisfies jw_image(reverse_jordan_wigner(s)) == s symbolically.
PauliSum jw_image(const FermionSum& f);

/// JW image of a single ladder operator (dagger ? a_mode^+ : a_mode).
PauliSum jw_ladder(uint32_t n_qubits, uint32_t mode, bool dagger);

}  // namespace schwadapt
