#include "schwadapt/pools.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include <Eigen/Dense>

#include "schwadapt/model.hpp"

namespace schwadapt {

namespace {

const char* kPoolLabels[] = {"LQZ", "LQx", "LxZ", "Lxx", "xQZ", "xQx",
                             "xxZ", "xxx", "tile_pauli", "tile_Q", "tile_L"};

PauliString endpoint_string(int i, int d, bool with_z, int n, bool x_left) {
  // x_left: X at site i and Y at i+d; otherwise Y at i, X at i+d.
  uint64_t x = (uint64_t{1} << i) | (uint64_t{1} << (i + d));
  uint64_t z = uint64_t{1} << (x_left ? i + d : i);
  if (with_z)
    for (int k = i + 1; k < i + d; ++k) z |= uint64_t{1} << k;
  return PauliString(static_cast<uint32_t>(n), x, z);
}

void check_generator_range(int i, int d, int sites) {
  if (d < 1 || i < 0 || i + d > 2 * sites - 1)
    throw std::invalid_argument("generator: site indices out of range");
}

void finalize(OperatorPool& pool) {
  // Deduplicate (keep-first) and freeze the canonical tie-break keys.
  std::set<std::string> seen;
  std::vector<PoolOperator> unique;
  for (auto& op : pool.operators) {
    op.serialization = serialize(op.op);
    if (seen.insert(op.serialization).second) unique.push_back(std::move(op));
  }
  pool.operators = std::move(unique);
  if (pool.operators.empty())
    throw std::invalid_argument("pool construction produced no operators");
}

std::vector<int> distance_set(int sites, bool all_distances) {
  std::vector<int> ds;
  for (int d = 1; d <= 2 * sites - 1; ++d)
    if (all_distances || d % 2 == 1) ds.push_back(d);
  return ds;
}

// Splits a sum into its (X left endpoint) and (Y left endpoint) halves,
// preserving signs so that the halves sum back to the original operator.
std::pair<PauliSum, PauliSum> split_endpoint_halves(const PauliSum& op) {
  PauliSum xy(op.num_qubits()), yx(op.num_qubits());
  for (const auto& t : op.terms()) {
    auto support = t.string.support();
    uint32_t left = support.front();
    bool left_is_y = (t.string.x_mask >> left) & (t.string.z_mask >> left) & 1;
    (left_is_y ? yx : xy).add(t.coeff, t.string);
  }
  return {xy, yx};
}

}  // namespace

PoolId pool_id_from_label(const std::string& label) {
  for (int i = 0; i < 11; ++i)
    if (label == kPoolLabels[i]) return static_cast<PoolId>(i);
  throw std::invalid_argument("unknown pool id: " + label);
}

std::string pool_label(PoolId id) { return kPoolLabels[static_cast<int>(id)]; }

bool is_topdown(PoolId id) { return static_cast<int>(id) < 8; }
bool is_tiled(PoolId id) { return !is_topdown(id); }

std::string kind_label(OperatorKind k) {
  switch (k) {
    case OperatorKind::volume: return "volume";
    case OperatorKind::surface: return "surface";
    default: return "local";
  }
}

std::string PoolOptions::summary() const {
  std::ostringstream os;
  os << "all_distances=" << all_distances << ";split_surfaces=" << split_surfaces
     << ";z_surface_swap=" << z_surface_swap << ";t_relax=" << t_relax;
  return os.str();
}

PoolOptions PoolOptions::from_summary(const std::string& text) {
  PoolOptions opt;
  std::istringstream is(text);
  std::string field;
  while (std::getline(is, field, ';')) {
    auto eq = field.find('=');
    if (eq == std::string::npos) continue;
    std::string key = field.substr(0, eq);
    bool value = field.substr(eq + 1) == "1";
    if (key == "all_distances") opt.all_distances = value;
    else if (key == "split_surfaces") opt.split_surfaces = value;
    else if (key == "z_surface_swap") opt.z_surface_swap = value;
    else if (key == "t_relax") opt.t_relax = value;
  }
  return opt;
}

PauliSum generator(int i, int d, bool with_z, int sites) {
  check_generator_range(i, d, sites);
  const int n = 2 * sites;
  PauliSum g(static_cast<uint32_t>(n));
  g.add(0.5, endpoint_string(i, d, with_z, n, true));
  g.add(-0.5, endpoint_string(i, d, with_z, n, false));
  return g;
}

PauliSum generator_t_even(int i, int d, bool with_z, int sites) {
  check_generator_range(i, d, sites);
  const int n = 2 * sites;
  uint64_t x = (uint64_t{1} << i) | (uint64_t{1} << (i + d));
  uint64_t zmid = 0;
  if (with_z)
    for (int k = i + 1; k < i + d; ++k) zmid |= uint64_t{1} << k;
  PauliSum g(static_cast<uint32_t>(n));
  g.add(0.5, PauliString(static_cast<uint32_t>(n), x, zmid));      // X..X
  g.add(0.5, PauliString(static_cast<uint32_t>(n), x, zmid | x));  // Y..Y
  return g;
}

int cp_surface_sign(int distance) {
  static int cached[2] = {0, 0};  // [parity]
  const int parity = distance % 2;
  if (cached[parity] != 0) return cached[parity];
  // Smallest lattice where G_d(0) and its mirror are distinct.
  const int d = parity == 1 ? 1 : 2;
  const int sites = 2;
  Eigen::MatrixXcd cp = cp_unitary(sites);
  for (int sign : {1, -1}) {
    PauliSum s = generator(0, d, true, sites);
    PauliSum mirror = generator(2 * sites - 1 - d, d, true, sites);
    mirror.scale(static_cast<double>(sign));
    s.add(mirror);
    Eigen::MatrixXcd m = to_matrix(s);
    if ((cp * m * cp.adjoint() - m).cwiseAbs().maxCoeff() < 1e-12) {
      cached[parity] = sign;
      return sign;
    }
  }
  throw std::logic_error("cp_surface_sign: no CP-symmetric pairing found");
}

namespace {

struct LambdaParts {
  std::vector<PoolOperator> ops;
};

// Volume and surface operators of the translation-invariant family for one
// distance. The volume sum carries the (-1)^i staggering of the displayed
// d = 3 operator; surfaces default to the CP-symmetric pairing.
std::vector<PoolOperator> lambda_distance_ops(int d, int sites, bool volume_z,
                                              bool surface_z, bool split_surfaces) {
  std::vector<PoolOperator> out;
  const int imax = 2 * sites - 1 - d;
  PauliSum volume(static_cast<uint32_t>(2 * sites));
  for (int i = 0; i <= imax; ++i) {
    PauliSum g = generator(i, d, volume_z, sites);
    if (i % 2 == 1) g.scale(-1.0);
    volume.add(g);
  }
  out.push_back({volume, OperatorKind::volume, d, 0, true, {}});
  if (imax == 0) return out;  // the lone translate is the volume operator
  if (split_surfaces) {
    out.push_back({generator(0, d, surface_z, sites), OperatorKind::surface, d,
                   0, false, {}});
    out.push_back({generator(imax, d, surface_z, sites), OperatorKind::surface,
                   d, imax, false, {}});
  } else {
    PauliSum s = generator(0, d, surface_z, sites);
    PauliSum mirror = generator(imax, d, surface_z, sites);
    mirror.scale(static_cast<double>(cp_surface_sign(d)));
    s.add(mirror);
    out.push_back({s, OperatorKind::surface, d, 0, true, {}});
  }
  return out;
}

}  // namespace

OperatorPool build_topdown_pool(PoolId id, int sites, const PoolOptions& options) {
  if (!is_topdown(id))
    throw std::invalid_argument("build_topdown_pool: not a top-down pool id");
  if (sites < 1) throw std::invalid_argument("build_topdown_pool: L >= 1 required");
  if (options.t_relax && id != PoolId::xQZ && id != PoolId::xQx)
    throw std::invalid_argument("t_relax is defined for the xQZ/xQx pools only");
  if (options.z_surface_swap && id != PoolId::LQx && id != PoolId::Lxx)
    throw std::invalid_argument("z_surface_swap applies to the LQx/Lxx pools only");

  OperatorPool pool;
  pool.id = id;
  pool.sites = sites;
  pool.options = options;
  const auto distances = distance_set(sites, options.all_distances);

  const bool with_z = id == PoolId::LQZ || id == PoolId::LxZ ||
                      id == PoolId::xQZ || id == PoolId::xxZ;
  const bool lambda = id == PoolId::LQZ || id == PoolId::LQx ||
                      id == PoolId::LxZ || id == PoolId::Lxx;
  const bool split_q = id == PoolId::LxZ || id == PoolId::Lxx ||
                       id == PoolId::xxZ || id == PoolId::xxx;

  if (!lambda) {
    for (int d : distances) {
      for (int i = 0; i + d <= 2 * sites - 1; ++i) {
        PauliSum g = generator(i, d, with_z, sites);
        if (split_q) {
          auto [xy, yx] = split_endpoint_halves(g);
          pool.operators.push_back({xy, OperatorKind::local, d, i, false, {}});
          pool.operators.push_back({yx, OperatorKind::local, d, i, false, {}});
        } else {
          pool.operators.push_back({g, OperatorKind::local, d, i, false, {}});
          if (options.t_relax)
            pool.operators.push_back({generator_t_even(i, d, with_z, sites),
                                      OperatorKind::local, d, i, false, {}});
        }
      }
    }
  } else {
    const bool surface_z = with_z || options.z_surface_swap;
    for (int d : distances) {
      auto ops = lambda_distance_ops(d, sites, with_z, surface_z,
                                     options.split_surfaces);
      if (split_q) {
        for (auto& lop : ops) {
          auto [xy, yx] = split_endpoint_halves(lop.op);
          pool.operators.push_back({xy, lop.kind, d, lop.offset, false, {}});
          pool.operators.push_back({yx, lop.kind, d, lop.offset, false, {}});
        }
      } else {
        for (auto& lop : ops) pool.operators.push_back(std::move(lop));
      }
    }
  }
  finalize(pool);
  return pool;
}

OperatorPool tile_pool(const std::vector<Tile>& tiles, int sites) {
  if (tiles.empty()) throw std::invalid_argument("tile_pool: no tiles");
  const uint32_t n = static_cast<uint32_t>(2 * sites);
  const uint32_t width = tiles.front().string.n;
  if (n < width) throw std::invalid_argument("tile_pool: lattice smaller than tile");
  OperatorPool pool;
  pool.id = PoolId::tile_pauli;
  pool.sites = sites;
  pool.tiles = tiles;
  for (const auto& tile : tiles)
    for (uint32_t off = 0; off + width <= n; ++off)
      pool.operators.push_back(
          {PauliSum::single(1.0, tile.string.embedded(n, off)),
           OperatorKind::local, 0, static_cast<int>(off), false, {}});
  finalize(pool);
  return pool;
}

OperatorPool synthesize_charge_conserving(const std::vector<Tile>& tiles, int sites) {
  if (tiles.empty())
    throw std::invalid_argument("synthesize_charge_conserving: no tiles");
  const uint32_t n = static_cast<uint32_t>(2 * sites);
  const uint32_t width = tiles.front().string.n;
  if (n < width)
    throw std::invalid_argument("synthesize_charge_conserving: lattice too small");
  const PauliSum q = charge_operator(sites);

  OperatorPool pool;
  pool.id = PoolId::tile_Q;
  pool.sites = sites;
  pool.tiles = tiles;

  for (uint32_t off = 0; off + width <= n; ++off) {
    // Group by identical support after embedding; dependent commutators live
    // among the X<->Y partner strings, which share their support exactly.
    std::map<uint64_t, std::vector<PauliString>> by_support;
    for (const auto& tile : tiles) {
      PauliString s = tile.string.embedded(n, off);
      by_support[s.support_mask()].push_back(s);
    }

    // Refine each support class into mutually commuting cliques.
    std::vector<std::vector<PauliString>> groups;
    for (const auto& [mask, strings] : by_support) {
      size_t first = groups.size();
      for (const auto& s : strings) {
        bool placed = false;
        for (size_t g = first; g < groups.size(); ++g) {
          bool ok = true;
          for (const auto& m : groups[g])
            if (!m.commutes_with(s)) { ok = false; break; }
          if (ok) { groups[g].push_back(s); placed = true; break; }
        }
        if (!placed) groups.push_back({s});
      }
    }

    for (const auto& group : groups) {
      const size_t k = group.size();
      // Columns of the linear map c -> [sum_j c_j P_j, Q].
      std::vector<PauliSum> comms;
      std::map<std::pair<uint64_t, uint64_t>, size_t> row_of;
      for (const auto& s : group) {
        comms.push_back(commutator(PauliSum::single(1.0, s), q));
        for (const auto& t : comms.back().terms()) {
          auto key = std::pair{t.string.x_mask, t.string.z_mask};
          if (!row_of.count(key)) row_of.emplace(key, row_of.size());
        }
      }
      Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2 * std::max<size_t>(row_of.size(), 1), k);
      for (size_t j = 0; j < k; ++j)
        for (const auto& t : comms[j].terms()) {
          size_t r = row_of.at({t.string.x_mask, t.string.z_mask});
          a(2 * r, j) = t.coeff.real();
          a(2 * r + 1, j) = t.coeff.imag();
        }
      Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
      lu.setThreshold(1e-10);
      Eigen::MatrixXd kernel = lu.kernel();
      if (lu.dimensionOfKernel() == 0) continue;  // no Q-conserving combination

      // Deterministic orthonormalization with a sign convention.
      std::vector<Eigen::VectorXd> basis;
      for (Eigen::Index col = 0; col < kernel.cols(); ++col) {
        Eigen::VectorXd v = kernel.col(col);
        for (const auto& b : basis) v -= b.dot(v) * b;
        if (v.norm() < 1e-10) continue;
        v.normalize();
        Eigen::Index imax = 0;
        v.cwiseAbs().maxCoeff(&imax);
        if (v(imax) < 0) v = -v;
        basis.push_back(v);
      }
      for (const auto& v : basis) {
        PauliSum op(n);
        for (size_t j = 0; j < k; ++j)
          if (std::abs(v(static_cast<Eigen::Index>(j))) > 1e-12)
            op.add(v(static_cast<Eigen::Index>(j)), group[j]);
        pool.operators.push_back(
            {op, OperatorKind::local, 0, static_cast<int>(off), false, {}});
      }
    }
  }
  finalize(pool);
  return pool;
}

OperatorPool tile_translation_invariant(const std::vector<Tile>& tiles, int sites) {
  if (tiles.empty())
    throw std::invalid_argument("tile_translation_invariant: no tiles");
  const uint32_t n = static_cast<uint32_t>(2 * sites);
  const uint32_t width = tiles.front().string.n;
  if (n < width)
    throw std::invalid_argument("tile_translation_invariant: lattice too small");

  OperatorPool pool;
  pool.id = PoolId::tile_L;
  pool.sites = sites;
  pool.tiles = tiles;

  for (const auto& tile : tiles) {
    for (int p : {1, 2}) {
      // Tile positions are 1-based in the p-parity sublattice; position p
      // sits at zero-based offset p-1.
      PauliSum volume(n);
      int count = 0;
      for (uint32_t off = static_cast<uint32_t>(p - 1); off + width <= n; off += 2) {
        volume.add(1.0, tile.string.embedded(n, off));
        ++count;
      }
      if (count > 0)
        pool.operators.push_back({volume, OperatorKind::volume, 0, p, false, {}});

      const int left = p - 1;
      const int right = static_cast<int>(n) - static_cast<int>(width) + 1 - p;
      if (right >= 0 && left + static_cast<int>(width) <= static_cast<int>(n)) {
        PauliSum surf(n);
        surf.add(1.0, tile.string.embedded(n, static_cast<uint32_t>(left)));
        surf.add(1.0, tile.string.embedded(n, static_cast<uint32_t>(right)));
        pool.operators.push_back({surf, OperatorKind::surface, 0, p, false, {}});
      }
    }
  }
  finalize(pool);
  return pool;
}

std::string pool_to_text(const OperatorPool& pool) {
  std::ostringstream os;
  os << "pool " << pool_label(pool.id) << " L=" << pool.sites
     << " options=" << pool.options.summary() << '\n';
  for (const auto& tile : pool.tiles)
    os << "# tile " << tile.string.letters() << " run=" << tile.seed_run
       << " step=" << tile.adapt_step << '\n';
  for (const auto& op : pool.operators) {
    os << "op kind=" << kind_label(op.kind) << " d=" << op.distance
       << " offset=" << op.offset << " cp=" << (op.cp_symmetric ? 1 : 0) << '\n';
    os << to_text(op.op);
  }
  return os.str();
}

OperatorPool pool_from_text(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  OperatorPool pool;
  bool header_seen = false;
  PoolOperator current{PauliSum(0), OperatorKind::local, 0, 0, false, {}};
  bool in_op = false;
  std::ostringstream term_lines;
  uint32_t n = 0;

  auto flush_op = [&]() {
    if (!in_op) return;
    current.op = sum_from_text(term_lines.str(), n);
    current.serialization = serialize(current.op);
    pool.operators.push_back(current);
    term_lines.str("");
    in_op = false;
  };

  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line.rfind("# tile ", 0) == 0) {
      std::istringstream ls(line.substr(7));
      std::string letters, runf, stepf;
      ls >> letters >> runf >> stepf;
      Tile t{PauliString::from_letters(letters), 0, 0};
      if (runf.rfind("run=", 0) == 0) t.seed_run = std::stoi(runf.substr(4));
      if (stepf.rfind("step=", 0) == 0) t.adapt_step = std::stoi(stepf.substr(5));
      pool.tiles.push_back(t);
      continue;
    }
    if (line[0] == '#') continue;
    if (line.rfind("pool ", 0) == 0) {
      std::istringstream ls(line.substr(5));
      std::string label, lfield, ofield;
      ls >> label >> lfield >> ofield;
      pool.id = pool_id_from_label(label);
      if (lfield.rfind("L=", 0) != 0)
        throw std::invalid_argument("pool header missing L=: " + line);
      pool.sites = std::stoi(lfield.substr(2));
      if (ofield.rfind("options=", 0) == 0)
        pool.options = PoolOptions::from_summary(ofield.substr(8));
      n = static_cast<uint32_t>(2 * pool.sites);
      header_seen = true;
      continue;
    }
    if (!header_seen)
      throw std::invalid_argument("pool file must start with a 'pool' header");
    if (line.rfind("op ", 0) == 0) {
      flush_op();
      current = PoolOperator{PauliSum(n), OperatorKind::local, 0, 0, false, {}};
      std::istringstream ls(line.substr(3));
      std::string field;
      while (ls >> field) {
        auto eq = field.find('=');
        if (eq == std::string::npos) continue;
        std::string key = field.substr(0, eq), value = field.substr(eq + 1);
        if (key == "kind") {
          if (value == "volume") current.kind = OperatorKind::volume;
          else if (value == "surface") current.kind = OperatorKind::surface;
          else current.kind = OperatorKind::local;
        } else if (key == "d") {
          current.distance = std::stoi(value);
        } else if (key == "offset") {
          current.offset = std::stoi(value);
        } else if (key == "cp") {
          current.cp_symmetric = value == "1";
        }
      }
      in_op = true;
      continue;
    }
    if (!in_op) throw std::invalid_argument("term line outside op block: " + line);
    term_lines << line << '\n';
  }
  flush_op();
  if (pool.operators.empty())
    throw std::invalid_argument("pool file contains no operators");
  return pool;
}

}  // namespace schwadapt
