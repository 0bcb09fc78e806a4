#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace schwadapt {

using cplx = std::complex<double>;

/// Magnitude below which coefficients are pruned when merging terms.
inline constexpr double kCoeffPruneTol = 1e-14;

struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct CapacityError : std::length_error {
  using std::length_error::length_error;
};

/// A phase-free Pauli string on n qubits in symplectic (x, z) mask form.
///
/// Qubit q carries X iff bit q of x_mask is set, Z iff bit q of z_mask,
/// Y iff both, I iff neither. All phases live in term coefficients.
struct PauliString {
  uint32_t n = 0;
  uint64_t x_mask = 0;
  uint64_t z_mask = 0;

  PauliString() = default;
  PauliString(uint32_t n_qubits, uint64_t x, uint64_t z);

  static PauliString identity(uint32_t n_qubits) { return {n_qubits, 0, 0}; }

  /// Parse "XZZY" with qubit 0 as the leftmost character.
  static PauliString from_letters(const std::string& letters);

  int weight() const;
  int y_count() const;
  bool is_identity() const { return x_mask == 0 && z_mask == 0; }

  /// Qubit indices with a non-identity letter, ascending.
  std::vector<uint32_t> support() const;
  uint64_t support_mask() const { return x_mask | z_mask; }

  /// True iff the strings commute (symplectic product is even).
  bool commutes_with(const PauliString& other) const;

  /// Letter form, qubit 0 leftmost.
  std::string letters() const;

  /// Same string embedded into a larger register starting at `offset`.
  PauliString embedded(uint32_t n_total, uint32_t offset) const;

  friend bool operator==(const PauliString&, const PauliString&) = default;
  /// Order by (x_mask, z_mask); any fixed total order works for term storage.
  friend auto operator<=>(const PauliString& a, const PauliString& b) {
    return std::pair{a.x_mask, a.z_mask} <=> std::pair{b.x_mask, b.z_mask};
  }
};

/// One complex-weighted Pauli string.
struct PauliTerm {
  cplx coeff;
  PauliString string;
};

/// Exact product of two terms; masks combine by XOR, the phase by the
/// per-qubit multiplication table folded into popcounts.
PauliTerm multiply(const PauliTerm& a, const PauliTerm& b);

/// A sum of Pauli terms with unique strings and no zero coefficients.
///
/// Values are immutable once constructed by the factory-style builders;
/// the mutating add/scale members are meant for construction only.
class PauliSum {
 public:
  explicit PauliSum(uint32_t n_qubits) : n_(n_qubits) {}

  static PauliSum zero(uint32_t n_qubits) { return PauliSum(n_qubits); }
  static PauliSum identity(uint32_t n_qubits, cplx c = 1.0);
  static PauliSum single(cplx coeff, const PauliString& s);
  static PauliSum single(cplx coeff, const std::string& letters);

  uint32_t num_qubits() const { return n_; }
  size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }

  void add(cplx coeff, const PauliString& s);
  void add(const PauliTerm& t) { add(t.coeff, t.string); }
  void add(const PauliSum& other);
  void scale(cplx c);

  /// Terms in the canonical (x_mask, z_mask) order; deterministic.
  std::vector<PauliTerm> terms() const;
  cplx coefficient(const PauliString& s) const;

  PauliSum operator+(const PauliSum& other) const;
  PauliSum operator-(const PauliSum& other) const;
  PauliSum operator*(const PauliSum& other) const;
  PauliSum operator*(cplx c) const;

  /// Hermitian iff every merged coefficient is real (strings are Hermitian).
  bool is_hermitian(double tol = 1e-12) const;

  /// Largest |coefficient|; 0 for the empty sum.
  double max_abs_coeff() const;
  /// Sum of |coefficient| (a cheap operator-norm bound).
  double one_norm() const;

  /// True iff all pairs of strings commute; such sums exponentiate factorwise.
  bool terms_mutually_commute() const;

  friend bool operator==(const PauliSum& a, const PauliSum& b);

 private:
  uint32_t n_;
  std::map<std::pair<uint64_t, uint64_t>, cplx> terms_;
};

/// ab - ba with merged terms.
PauliSum commutator(const PauliSum& a, const PauliSum& b);

/// True iff every term's string carries an odd number of Y letters, i.e. the
/// operator is purely imaginary entrywise (and Hermitian when coefficients
/// are real). Vacuously true for the empty sum.
bool is_time_reversal_odd(const PauliSum& s);

/// Dense 2^n x 2^n materialization; basis index packs qubit q at bit q.
Eigen::MatrixXcd to_matrix(const PauliSum& s, uint32_t max_qubits = 14);
Eigen::MatrixXcd to_matrix(const PauliString& s, uint32_t max_qubits = 14);

/// Text form: one `<re> <im> <letters>` line per term, canonical term order.
std::string to_text(const PauliSum& s);
PauliSum sum_from_text(const std::string& text, uint32_t n_qubits);

/// Canonical single-line serialization (term lines joined by ';'), used as
/// the deterministic tie-break key for operators.
std::string serialize(const PauliSum& s);

}  // namespace schwadapt
