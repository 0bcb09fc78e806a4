#include "schwadapt/pauli.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace schwadapt {

namespace {

uint64_t n_bit_mask(uint32_t n) {
  return n >= 64 ? ~uint64_t{0} : ((uint64_t{1} << n) - 1);
}

cplx i_power(int k) {
  switch (((k % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

}  // namespace

PauliString::PauliString(uint32_t n_qubits, uint64_t x, uint64_t z)
    : n(n_qubits), x_mask(x), z_mask(z) {
  if (n > 64) throw CapacityError("PauliString supports at most 64 qubits");
  if ((x_mask | z_mask) & ~n_bit_mask(n))
    throw DimensionError("Pauli mask exceeds qubit count");
}

PauliString PauliString::from_letters(const std::string& letters) {
  PauliString s(static_cast<uint32_t>(letters.size()), 0, 0);
  for (uint32_t q = 0; q < letters.size(); ++q) {
    switch (letters[q]) {
      case 'I': break;
      case 'X': s.x_mask |= uint64_t{1} << q; break;
      case 'Y': s.x_mask |= uint64_t{1} << q; s.z_mask |= uint64_t{1} << q; break;
      case 'Z': s.z_mask |= uint64_t{1} << q; break;
      default:
        throw std::invalid_argument("invalid Pauli letter: " +
                                    std::string(1, letters[q]));
    }
  }
  return s;
}

int PauliString::weight() const {
  return std::popcount(x_mask | z_mask);
}

int PauliString::y_count() const {
  return std::popcount(x_mask & z_mask);
}

std::vector<uint32_t> PauliString::support() const {
  std::vector<uint32_t> out;
  uint64_t m = x_mask | z_mask;
  while (m) {
    out.push_back(static_cast<uint32_t>(std::countr_zero(m)));
    m &= m - 1;
  }
  return out;
}

bool PauliString::commutes_with(const PauliString& other) const {
  int anti = std::popcount(x_mask & other.z_mask) +
             std::popcount(z_mask & other.x_mask);
  return (anti & 1) == 0;
}

std::string PauliString::letters() const {
  std::string out(n, 'I');
  for (uint32_t q = 0; q < n; ++q) {
    bool x = (x_mask >> q) & 1, z = (z_mask >> q) & 1;
    if (x && z) out[q] = 'Y';
    else if (x) out[q] = 'X';
    else if (z) out[q] = 'Z';
  }
  return out;
}

PauliString PauliString::embedded(uint32_t n_total, uint32_t offset) const {
  if (offset + n > n_total)
    throw DimensionError("embedded string does not fit in target register");
  return PauliString(n_total, x_mask << offset, z_mask << offset);
}

PauliTerm multiply(const PauliTerm& a, const PauliTerm& b) {
  if (a.string.n != b.string.n)
    throw DimensionError("PauliTerm product: mismatched qubit counts");
  uint64_t x = a.string.x_mask ^ b.string.x_mask;
  uint64_t z = a.string.z_mask ^ b.string.z_mask;
  // Per qubit, with P(x,z) = i^{xz} X^x Z^z:
  //   P(x1,z1) P(x2,z2) = i^{x1 z1 + x2 z2 - x3 z3} (-1)^{z1 x2} P(x3,z3).
  int ipow = std::popcount(a.string.x_mask & a.string.z_mask) +
             std::popcount(b.string.x_mask & b.string.z_mask) -
             std::popcount(x & z) +
             2 * std::popcount(a.string.z_mask & b.string.x_mask);
  return {a.coeff * b.coeff * i_power(ipow), PauliString(a.string.n, x, z)};
}

PauliSum PauliSum::identity(uint32_t n_qubits, cplx c) {
  PauliSum s(n_qubits);
  s.add(c, PauliString::identity(n_qubits));
  return s;
}

PauliSum PauliSum::single(cplx coeff, const PauliString& str) {
  PauliSum s(str.n);
  s.add(coeff, str);
  return s;
}

PauliSum PauliSum::single(cplx coeff, const std::string& letters) {
  return single(coeff, PauliString::from_letters(letters));
}

void PauliSum::add(cplx coeff, const PauliString& s) {
  if (s.n != n_) throw DimensionError("PauliSum::add: mismatched qubit counts");
  auto key = std::pair{s.x_mask, s.z_mask};
  auto it = terms_.find(key);
  if (it == terms_.end()) {
    if (std::abs(coeff) > kCoeffPruneTol) terms_.emplace(key, coeff);
    return;
  }
  it->second += coeff;
  if (std::abs(it->second) <= kCoeffPruneTol) terms_.erase(it);
}

void PauliSum::add(const PauliSum& other) {
  if (other.n_ != n_) throw DimensionError("PauliSum::add: mismatched qubit counts");
  for (const auto& [key, c] : other.terms_)
    add(c, PauliString(n_, key.first, key.second));
}

void PauliSum::scale(cplx c) {
  if (std::abs(c) <= kCoeffPruneTol) {
    terms_.clear();
    return;
  }
  for (auto& [key, coeff] : terms_) coeff *= c;
}

std::vector<PauliTerm> PauliSum::terms() const {
  std::vector<PauliTerm> out;
  out.reserve(terms_.size());
  for (const auto& [key, c] : terms_)
    out.push_back({c, PauliString(n_, key.first, key.second)});
  return out;
}

cplx PauliSum::coefficient(const PauliString& s) const {
  auto it = terms_.find({s.x_mask, s.z_mask});
  return it == terms_.end() ? cplx{0.0} : it->second;
}

PauliSum PauliSum::operator+(const PauliSum& other) const {
  PauliSum out = *this;
  out.add(other);
  return out;
}

PauliSum PauliSum::operator-(const PauliSum& other) const {
  PauliSum out = *this;
  PauliSum neg = other;
  neg.scale(-1.0);
  out.add(neg);
  return out;
}

PauliSum PauliSum::operator*(const PauliSum& other) const {
  if (other.n_ != n_) throw DimensionError("PauliSum product: mismatched qubit counts");
  PauliSum out(n_);
  for (const auto& [ka, ca] : terms_) {
    PauliTerm ta{ca, PauliString(n_, ka.first, ka.second)};
    for (const auto& [kb, cb] : other.terms_) {
      PauliTerm tb{cb, PauliString(n_, kb.first, kb.second)};
      out.add(multiply(ta, tb));
    }
  }
  return out;
}

PauliSum PauliSum::operator*(cplx c) const {
  PauliSum out = *this;
  out.scale(c);
  return out;
}

bool PauliSum::is_hermitian(double tol) const {
  for (const auto& [key, c] : terms_)
    if (std::abs(c.imag()) > tol) return false;
  return true;
}

double PauliSum::max_abs_coeff() const {
  double m = 0.0;
  for (const auto& [key, c] : terms_) m = std::max(m, std::abs(c));
  return m;
}

double PauliSum::one_norm() const {
  double s = 0.0;
  for (const auto& [key, c] : terms_) s += std::abs(c);
  return s;
}

bool PauliSum::terms_mutually_commute() const {
  auto ts = terms();
  for (size_t i = 0; i < ts.size(); ++i)
    for (size_t j = i + 1; j < ts.size(); ++j)
      if (!ts[i].string.commutes_with(ts[j].string)) return false;
  return true;
}

bool operator==(const PauliSum& a, const PauliSum& b) {
  if (a.n_ != b.n_ || a.terms_.size() != b.terms_.size()) return false;
  auto ia = a.terms_.begin();
  auto ib = b.terms_.begin();
  for (; ia != a.terms_.end(); ++ia, ++ib) {
    if (ia->first != ib->first) return false;
    if (std::abs(ia->second - ib->second) > 1e-12) return false;
  }
  return true;
}

PauliSum commutator(const PauliSum& a, const PauliSum& b) {
  if (a.num_qubits() != b.num_qubits())
    throw DimensionError("commutator: mismatched qubit counts");
  PauliSum out(a.num_qubits());
  for (const auto& ta : a.terms()) {
    for (const auto& tb : b.terms()) {
      // Strings either commute (term cancels) or anticommute (doubles).
      if (ta.string.commutes_with(tb.string)) continue;
      PauliTerm ab = multiply(ta, tb);
      out.add(2.0 * ab.coeff, ab.string);
    }
  }
  return out;
}

bool is_time_reversal_odd(const PauliSum& s) {
  for (const auto& t : s.terms())
    if ((t.string.y_count() & 1) == 0) return false;
  return true;
}

Eigen::MatrixXcd to_matrix(const PauliString& s, uint32_t max_qubits) {
  if (s.n > max_qubits) throw CapacityError("to_matrix: qubit count over guard");
  const size_t dim = size_t{1} << s.n;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  const int yc = s.y_count();
  const cplx global = i_power(yc);
  for (size_t b = 0; b < dim; ++b) {
    size_t b2 = b ^ s.x_mask;
    int sign = std::popcount(b & s.z_mask) & 1 ? -1 : 1;
    m(static_cast<Eigen::Index>(b2), static_cast<Eigen::Index>(b)) =
        global * static_cast<double>(sign);
  }
  return m;
}

Eigen::MatrixXcd to_matrix(const PauliSum& s, uint32_t max_qubits) {
  if (s.num_qubits() > max_qubits)
    throw CapacityError("to_matrix: qubit count over guard");
  const size_t dim = size_t{1} << s.num_qubits();
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& t : s.terms())
    m += t.coeff * to_matrix(t.string, max_qubits);
  return m;
}

std::string to_text(const PauliSum& s) {
  std::ostringstream os;
  char buf[64];
  for (const auto& t : s.terms()) {
    double re = t.coeff.real(), im = t.coeff.imag();
    if (re == 0.0) re = 0.0;  // canonicalize negative zero
    if (im == 0.0) im = 0.0;
    std::snprintf(buf, sizeof buf, "%.17g %.17g", re, im);
    os << buf << ' ' << t.string.letters() << '\n';
  }
  return os.str();
}

PauliSum sum_from_text(const std::string& text, uint32_t n_qubits) {
  PauliSum s(n_qubits);
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    double re, im;
    std::string letters;
    if (!(ls >> re >> im >> letters))
      throw std::invalid_argument("malformed Pauli term line: " + line);
    PauliString str = PauliString::from_letters(letters);
    if (str.n != n_qubits)
      throw DimensionError("Pauli term line has wrong qubit count: " + line);
    s.add(cplx{re, im}, str);
  }
  return s;
}

std::string serialize(const PauliSum& s) {
  std::string text = to_text(s);
  for (auto& ch : text)
    if (ch == '\n') ch = ';';
  if (!text.empty() && text.back() == ';') text.pop_back();
  return text;
}

}  // namespace schwadapt
