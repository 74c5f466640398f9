#include "csbp/instance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace csbp {

void EnsembleSpec::validate() const {
  if (n <= 0 || m <= 0) throw std::invalid_argument("EnsembleSpec: n and m must be positive");
  if (m >= n) throw std::invalid_argument("EnsembleSpec: need m < n");
  if (is_sparse()) {
    const auto& rk = regular_kind();
    if (rk.j < 2 || rk.k < 2)
      throw std::invalid_argument("EnsembleSpec: regular ensemble needs j >= 2 and k >= 2");
    if (rk.j > m || rk.k > n)
      throw std::invalid_argument("EnsembleSpec: regular ensemble needs j <= m and k <= n");
    if (static_cast<long long>(n) * rk.j != static_cast<long long>(m) * rk.k)
      throw std::invalid_argument("EnsembleSpec: edge counts disagree, need n*j == m*k");
  }
}

SparseMeasurementMatrix::SparseMeasurementMatrix(int n, int m, std::vector<Edge> edges)
    : n_(n), m_(m), edges_(std::move(edges)) {
  if (n_ <= 0 || m_ <= 0) throw std::invalid_argument("SparseMeasurementMatrix: bad dimensions");
  const std::size_t e_count = edges_.size();
  std::vector<int> col_count(static_cast<std::size_t>(n_) + 1, 0);
  std::vector<int> row_count(static_cast<std::size_t>(m_) + 1, 0);
  for (const Edge& e : edges_) {
    if (e.row < 0 || e.row >= m_ || e.col < 0 || e.col >= n_)
      throw std::invalid_argument("SparseMeasurementMatrix: edge index out of range");
    if (!std::isfinite(e.value))
      throw std::invalid_argument("SparseMeasurementMatrix: non-finite edge value");
    ++col_count[static_cast<std::size_t>(e.col) + 1];
    ++row_count[static_cast<std::size_t>(e.row) + 1];
  }
  col_ptr_.assign(col_count.begin(), col_count.end());
  row_ptr_.assign(row_count.begin(), row_count.end());
  for (int i = 0; i < n_; ++i) col_ptr_[static_cast<std::size_t>(i) + 1] += col_ptr_[static_cast<std::size_t>(i)];
  for (int mu = 0; mu < m_; ++mu) row_ptr_[static_cast<std::size_t>(mu) + 1] += row_ptr_[static_cast<std::size_t>(mu)];
  col_ids_.resize(e_count);
  row_ids_.resize(e_count);
  std::vector<int> col_fill(col_ptr_.begin(), col_ptr_.end() - 1);
  std::vector<int> row_fill(row_ptr_.begin(), row_ptr_.end() - 1);
  for (std::size_t e = 0; e < e_count; ++e) {
    col_ids_[static_cast<std::size_t>(col_fill[static_cast<std::size_t>(edges_[e].col)]++)] = static_cast<int>(e);
    row_ids_[static_cast<std::size_t>(row_fill[static_cast<std::size_t>(edges_[e].row)]++)] = static_cast<int>(e);
  }

  // duplicate (row, col) detection, column by column
  std::vector<int> rows_here;
  for (int i = 0; i < n_; ++i) {
    rows_here.clear();
    for (int e : column_edges(i)) rows_here.push_back(edges_[static_cast<std::size_t>(e)].row);
    std::sort(rows_here.begin(), rows_here.end());
    if (std::adjacent_find(rows_here.begin(), rows_here.end()) != rows_here.end())
      throw std::invalid_argument("SparseMeasurementMatrix: duplicate (row, col) edge in column " +
                                  std::to_string(i));
  }

  min_col_degree_ = n_ > 0 ? column_degree(0) : 0;
  max_degree_ = 0;
  for (int i = 0; i < n_; ++i) {
    min_col_degree_ = std::min(min_col_degree_, column_degree(i));
    max_degree_ = std::max(max_degree_, column_degree(i));
  }
  for (int mu = 0; mu < m_; ++mu) max_degree_ = std::max(max_degree_, row_degree(mu));
}

Eigen::MatrixXd SparseMeasurementMatrix::to_dense() const {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m_, n_);
  for (const Edge& e : edges_) out(e.row, e.col) = e.value;
  return out;
}

namespace {

// True when two of the column's j edges land on the same row.
bool column_has_duplicate(const std::vector<int>& row_of_edge, int col, int j) {
  const int base = col * j;
  for (int a = 1; a < j; ++a)
    for (int b = 0; b < a; ++b)
      if (row_of_edge[static_cast<std::size_t>(base + a)] == row_of_edge[static_cast<std::size_t>(base + b)])
        return true;
  return false;
}

}  // namespace

RegularPairing draw_regular_pairing(int n, int m, int j, int k, RandomStream& rng) {
  const long long e_count_ll = static_cast<long long>(n) * j;
  if (e_count_ll != static_cast<long long>(m) * k)
    throw std::invalid_argument("draw_regular_pairing: need n*j == m*k");
  const int e_count = static_cast<int>(e_count_ll);

  RegularPairing pairing;
  pairing.n = n;
  pairing.m = m;
  pairing.j = j;
  pairing.k = k;

  std::vector<int> sockets(static_cast<std::size_t>(e_count));
  std::vector<int> dirty;
  constexpr int kShuffleRetries = 100;
  constexpr int kRepairPasses = 1000;

  for (int attempt = 0; attempt < kShuffleRetries; ++attempt) {
    for (int s = 0; s < e_count; ++s) sockets[static_cast<std::size_t>(s)] = s;
    for (int s = e_count - 1; s > 0; --s) {
      const int t = static_cast<int>(rng.below(static_cast<std::uint64_t>(s) + 1));
      std::swap(sockets[static_cast<std::size_t>(s)], sockets[static_cast<std::size_t>(t)]);
    }
    std::vector<int>& rows = pairing.row_of_edge;
    rows.resize(static_cast<std::size_t>(e_count));
    for (int e = 0; e < e_count; ++e) rows[static_cast<std::size_t>(e)] = sockets[static_cast<std::size_t>(e)] / k;

    // swap-repair: exchanging the row sockets of two edges preserves all
    // degrees, so parallel edges can be broken up one by one
    bool simple = false;
    for (int pass = 0; pass < kRepairPasses && !simple; ++pass) {
      dirty.clear();
      for (int col = 0; col < n; ++col)
        if (column_has_duplicate(rows, col, j)) dirty.push_back(col);
      if (dirty.empty()) {
        simple = true;
        break;
      }
      for (int col : dirty) {
        const int base = col * j;
        for (int a = 1; a < j; ++a) {
          for (int b = 0; b < a; ++b) {
            if (rows[static_cast<std::size_t>(base + a)] != rows[static_cast<std::size_t>(base + b)]) continue;
            const int e = base + a;
            const int partner = static_cast<int>(rng.below(static_cast<std::uint64_t>(e_count)));
            std::swap(sockets[static_cast<std::size_t>(e)], sockets[static_cast<std::size_t>(partner)]);
            rows[static_cast<std::size_t>(e)] = sockets[static_cast<std::size_t>(e)] / k;
            rows[static_cast<std::size_t>(partner)] = sockets[static_cast<std::size_t>(partner)] / k;
            break;
          }
        }
      }
    }
    if (simple) return pairing;
  }
  throw std::runtime_error("draw_regular_pairing: no simple pairing found within the retry budget");
}

SparseMeasurementMatrix matrix_from_pairing(const RegularPairing& pairing,
                                            const std::vector<double>& values) {
  const std::size_t e_count = pairing.row_of_edge.size();
  if (values.size() != e_count)
    throw std::invalid_argument("matrix_from_pairing: value count does not match edge count");
  std::vector<Edge> edges(e_count);
  for (std::size_t e = 0; e < e_count; ++e) {
    edges[e].row = pairing.row_of_edge[e];
    edges[e].col = static_cast<int>(e) / pairing.j;
    edges[e].value = values[e];
  }
  return SparseMeasurementMatrix(pairing.n, pairing.m, std::move(edges));
}

SparseMeasurementMatrix gen_regular_sparse_matrix(const EnsembleSpec& spec, RandomStream& rng,
                                                  double value_stddev) {
  spec.validate();
  if (!spec.is_sparse())
    throw std::invalid_argument("gen_regular_sparse_matrix: spec is not a regular sparse ensemble");
  const auto& rk = spec.regular_kind();
  RegularPairing pairing = draw_regular_pairing(spec.n, spec.m, rk.j, rk.k, rng);
  std::vector<double> values(pairing.row_of_edge.size());
  for (double& v : values) v = value_stddev * rng.normal();
  return matrix_from_pairing(pairing, values);
}

SparseMeasurementMatrix gen_regular_sparse_matrix(const EnsembleSpec& spec, RngSeed seed,
                                                  double value_stddev) {
  RandomStream rng(seed);
  return gen_regular_sparse_matrix(spec, rng, value_stddev);
}

DenseMeasurementMatrix gen_dense_matrix(const EnsembleSpec& spec, RandomStream& rng,
                                        double entry_stddev) {
  spec.validate();
  if (spec.is_sparse())
    throw std::invalid_argument("gen_dense_matrix: spec is not a dense ensemble");
  const double sd = entry_stddev > 0.0 ? entry_stddev : 1.0 / std::sqrt(static_cast<double>(spec.n));
  DenseMeasurementMatrix F;
  F.values.resize(spec.m, spec.n);
  for (int mu = 0; mu < spec.m; ++mu)
    for (int i = 0; i < spec.n; ++i) F.values(mu, i) = sd * rng.normal();
  return F;
}

DenseMeasurementMatrix gen_dense_matrix(const EnsembleSpec& spec, RngSeed seed, double entry_stddev) {
  RandomStream rng(seed);
  return gen_dense_matrix(spec, rng, entry_stddev);
}

SignalVector gen_signal(int n, double rho, RandomStream& rng) {
  if (n <= 0) throw std::invalid_argument("gen_signal: n must be positive");
  if (!(rho >= 0.0 && rho <= 1.0)) throw std::invalid_argument("gen_signal: rho must lie in [0, 1]");
  SignalVector x;
  x.density = rho;
  x.values = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < n; ++i)
    if (rng.uniform01() < rho) x.values[i] = rng.normal();
  return x;
}

SignalVector gen_signal(int n, double rho, RngSeed seed) {
  RandomStream rng(seed);
  return gen_signal(n, rho, rng);
}

MeasurementVector measure(const SparseMeasurementMatrix& F, const SignalVector& x) {
  if (x.values.size() != F.n()) throw std::invalid_argument("measure: signal length != matrix columns");
  MeasurementVector y;
  y.values = Eigen::VectorXd::Zero(F.m());
  for (const Edge& e : F.edges()) y.values[e.row] += e.value * x.values[e.col];
  return y;
}

MeasurementVector measure(const DenseMeasurementMatrix& F, const SignalVector& x) {
  if (x.values.size() != F.n()) throw std::invalid_argument("measure: signal length != matrix columns");
  MeasurementVector y;
  y.values = F.values * x.values;
  return y;
}

SparseMeasurementMatrix complete_bipartite_from_dense(const DenseMeasurementMatrix& F) {
  const int n = F.n(), m = F.m();
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(m));
  for (int i = 0; i < n; ++i)
    for (int mu = 0; mu < m; ++mu) edges.push_back({mu, i, F.values(mu, i)});
  return SparseMeasurementMatrix(n, m, std::move(edges));
}

namespace {

void put_double(std::ofstream& out, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out << buf;
}

struct LineReader {
  std::ifstream in;
  int line_no = 0;

  explicit LineReader(const std::string& path) : in(path) {
    if (!in) throw std::runtime_error("cannot open instance file: " + path);
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw std::runtime_error("instance parse error at line " + std::to_string(line_no) + ": " + what);
  }

  std::istringstream next(const std::string& expect) {
    std::string line;
    if (!std::getline(in, line)) {
      ++line_no;
      fail("unexpected end of file, expected " + expect);
    }
    ++line_no;
    return std::istringstream(line);
  }

  double next_value() {
    auto ls = next("a value");
    double v;
    if (!(ls >> v)) fail("expected a value");
    return v;
  }
};

}  // namespace

void save_instance(const std::string& path, const Instance& inst) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  const int n = static_cast<int>(inst.signal.values.size());
  const int m = static_cast<int>(inst.measurements.values.size());
  if (inst.is_sparse()) {
    const auto& F = inst.sparse();
    out << "sparse " << F.n() << ' ' << F.m() << ' ' << F.edge_count() << '\n';
    for (const Edge& e : F.edges()) {
      out << e.row << ' ' << e.col << ' ';
      put_double(out, e.value);
      out << '\n';
    }
  } else {
    const auto& F = inst.dense();
    out << "dense " << F.n() << ' ' << F.m() << '\n';
    for (int mu = 0; mu < F.m(); ++mu) {
      for (int i = 0; i < F.n(); ++i) {
        if (i) out << ' ';
        put_double(out, F.values(mu, i));
      }
      out << '\n';
    }
  }
  out << "signal " << n << ' ';
  put_double(out, inst.signal.density);
  out << '\n';
  for (int i = 0; i < n; ++i) {
    put_double(out, inst.signal.values[i]);
    out << '\n';
  }
  out << "measurements " << m << '\n';
  for (int mu = 0; mu < m; ++mu) {
    put_double(out, inst.measurements.values[mu]);
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failure: " + path);
}

Instance load_instance(const std::string& path) {
  LineReader r(path);
  Instance inst;

  auto header = r.next("matrix header");
  std::string kind;
  int n = 0, m = 0;
  if (!(header >> kind >> n >> m)) r.fail("expected 'sparse N M E' or 'dense N M'");
  if (n <= 0 || m <= 0) r.fail("dimensions must be positive");

  if (kind == "sparse") {
    long long e_count = 0;
    if (!(header >> e_count) || e_count < 0) r.fail("expected edge count after 'sparse N M'");
    std::vector<Edge> edges;
    edges.reserve(static_cast<std::size_t>(e_count));
    for (long long e = 0; e < e_count; ++e) {
      auto ls = r.next("an edge line 'mu i value'");
      Edge ed;
      if (!(ls >> ed.row >> ed.col >> ed.value)) r.fail("expected 'mu i value'");
      edges.push_back(ed);
    }
    try {
      inst.matrix = SparseMeasurementMatrix(n, m, std::move(edges));
    } catch (const std::invalid_argument& ex) {
      r.fail(ex.what());
    }
  } else if (kind == "dense") {
    DenseMeasurementMatrix F;
    F.values.resize(m, n);
    for (int mu = 0; mu < m; ++mu) {
      auto ls = r.next("a matrix row");
      for (int i = 0; i < n; ++i)
        if (!(ls >> F.values(mu, i))) r.fail("expected " + std::to_string(n) + " values in matrix row");
    }
    inst.matrix = std::move(F);
  } else {
    r.fail("unknown matrix kind '" + kind + "'");
  }

  {
    auto ls = r.next("'signal N rho'");
    std::string tag;
    int sn = 0;
    double rho = 0.0;
    if (!(ls >> tag >> sn >> rho) || tag != "signal") r.fail("expected 'signal N rho'");
    if (sn != n) r.fail("signal length " + std::to_string(sn) + " does not match matrix columns " + std::to_string(n));
    inst.signal.density = rho;
    inst.signal.values.resize(sn);
    for (int i = 0; i < sn; ++i) inst.signal.values[i] = r.next_value();
  }
  {
    auto ls = r.next("'measurements M'");
    std::string tag;
    int sm = 0;
    if (!(ls >> tag >> sm) || tag != "measurements") r.fail("expected 'measurements M'");
    if (sm != m) r.fail("measurement length " + std::to_string(sm) + " does not match matrix rows " + std::to_string(m));
    inst.measurements.values.resize(sm);
    for (int mu = 0; mu < sm; ++mu) inst.measurements.values[mu] = r.next_value();
  }
  return inst;
}

}  // namespace csbp
