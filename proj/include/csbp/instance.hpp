#pragma once
/*
 * Problem instances: measurement-matrix ensembles (regular sparse and dense
 * Gaussian), Bernoulli-Gaussian signals, measurement vectors, and a plain
 * text serialization format for reproducible cross-checks.
 */

#include <Eigen/Dense>

#include <span>
#include <string>
#include <variant>
#include <vector>

#include "csbp/rng.hpp"

namespace csbp {

struct RegularSparseKind {
  int j = 0;  // non-zeros per column
  int k = 0;  // non-zeros per row
};
struct DenseGaussianKind {};

/// Matrix ensemble description: dimensions plus the ensemble kind.
struct EnsembleSpec {
  int n = 0;  // signal length (columns)
  int m = 0;  // measurement count (rows)
  std::variant<RegularSparseKind, DenseGaussianKind> kind = DenseGaussianKind{};

  static EnsembleSpec regular(int n, int m, int j, int k) {
    EnsembleSpec s;
    s.n = n;
    s.m = m;
    s.kind = RegularSparseKind{j, k};
    s.validate();
    return s;
  }
  static EnsembleSpec dense(int n, int m) {
    EnsembleSpec s;
    s.n = n;
    s.m = m;
    s.validate();
    return s;
  }

  bool is_sparse() const { return std::holds_alternative<RegularSparseKind>(kind); }
  const RegularSparseKind& regular_kind() const { return std::get<RegularSparseKind>(kind); }
  double alpha() const { return static_cast<double>(m) / static_cast<double>(n); }

  /// Throws std::invalid_argument unless m < n and, for the regular kind,
  /// n*j == m*k with 2 <= j <= m and 2 <= k <= n.
  void validate() const;
};

struct Edge {
  int row = 0;
  int col = 0;
  double value = 0.0;
};

/// Sparse measurement matrix as a bipartite edge list with per-column and
/// per-row adjacency (edge ids) for O(1) neighborhood iteration.
class SparseMeasurementMatrix {
 public:
  SparseMeasurementMatrix() = default;

  /// Validates indices/values and rejects duplicate (row, col) pairs.
  SparseMeasurementMatrix(int n, int m, std::vector<Edge> edges);

  int n() const { return n_; }
  int m() const { return m_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(int e) const { return edges_[static_cast<std::size_t>(e)]; }

  /// Edge ids incident to column i, in insertion order.
  std::span<const int> column_edges(int i) const {
    return {col_ids_.data() + col_ptr_[static_cast<std::size_t>(i)],
            col_ids_.data() + col_ptr_[static_cast<std::size_t>(i) + 1]};
  }
  /// Edge ids incident to row mu, in insertion order.
  std::span<const int> row_edges(int mu) const {
    return {row_ids_.data() + row_ptr_[static_cast<std::size_t>(mu)],
            row_ids_.data() + row_ptr_[static_cast<std::size_t>(mu) + 1]};
  }

  int column_degree(int i) const {
    return col_ptr_[static_cast<std::size_t>(i) + 1] - col_ptr_[static_cast<std::size_t>(i)];
  }
  int row_degree(int mu) const {
    return row_ptr_[static_cast<std::size_t>(mu) + 1] - row_ptr_[static_cast<std::size_t>(mu)];
  }
  int min_column_degree() const { return min_col_degree_; }
  int max_degree() const { return max_degree_; }

  Eigen::MatrixXd to_dense() const;

 private:
  int n_ = 0, m_ = 0;
  int min_col_degree_ = 0, max_degree_ = 0;
  std::vector<Edge> edges_;
  std::vector<int> col_ptr_, col_ids_, row_ptr_, row_ids_;
};

/// Dense measurement matrix (m x n grid of reals).
struct DenseMeasurementMatrix {
  Eigen::MatrixXd values;  // m x n

  int n() const { return static_cast<int>(values.cols()); }
  int m() const { return static_cast<int>(values.rows()); }
};

struct SignalVector {
  Eigen::VectorXd values;
  double density = 0.0;  // rho used at generation
};

struct MeasurementVector {
  Eigen::VectorXd values;
};

/// A matrix/signal/measurements triple as written to instance files.
struct Instance {
  std::variant<SparseMeasurementMatrix, DenseMeasurementMatrix> matrix;
  SignalVector signal;
  MeasurementVector measurements;

  bool is_sparse() const { return std::holds_alternative<SparseMeasurementMatrix>(matrix); }
  const SparseMeasurementMatrix& sparse() const { return std::get<SparseMeasurementMatrix>(matrix); }
  const DenseMeasurementMatrix& dense() const { return std::get<DenseMeasurementMatrix>(matrix); }
};

/// Socket-level description of a regular bipartite pairing.  Edge e is the
/// (e mod j)-th socket of column e / j; row_of_edge[e] is its row.  Exposed
/// so the connectivity-reshuffling experiment can re-draw pairings while
/// keeping per-edge state aligned by column socket.
struct RegularPairing {
  int n = 0, m = 0, j = 0, k = 0;
  std::vector<int> row_of_edge;
};

/// Draws a uniform configuration pairing with exact degrees (j, k), then
/// repairs duplicate edges by degree-preserving socket swaps.  Retries with
/// a fresh shuffle up to 100 times; throws std::runtime_error if no simple
/// pairing is found within the budget.
RegularPairing draw_regular_pairing(int n, int m, int j, int k, RandomStream& rng);

/// Builds the matrix for a pairing; values[e] is the entry on edge e.
SparseMeasurementMatrix matrix_from_pairing(const RegularPairing& pairing,
                                            const std::vector<double>& values);

SparseMeasurementMatrix gen_regular_sparse_matrix(const EnsembleSpec& spec, RandomStream& rng,
                                                  double value_stddev = 1.0);
SparseMeasurementMatrix gen_regular_sparse_matrix(const EnsembleSpec& spec, RngSeed seed,
                                                  double value_stddev = 1.0);

/// Dense ensemble: i.i.d. N(0, entry_stddev^2) entries, default stddev
/// 1/sqrt(n).  Filled row-major for a fixed draw order.
DenseMeasurementMatrix gen_dense_matrix(const EnsembleSpec& spec, RandomStream& rng,
                                        double entry_stddev = -1.0);
DenseMeasurementMatrix gen_dense_matrix(const EnsembleSpec& spec, RngSeed seed,
                                        double entry_stddev = -1.0);

/// Bernoulli-Gaussian signal: each entry is 0 with probability 1 - rho and
/// standard normal otherwise.
SignalVector gen_signal(int n, double rho, RandomStream& rng);
SignalVector gen_signal(int n, double rho, RngSeed seed);

MeasurementVector measure(const SparseMeasurementMatrix& F, const SignalVector& x);
MeasurementVector measure(const DenseMeasurementMatrix& F, const SignalVector& x);

/// Views a dense matrix as the complete bipartite sparse matrix with the
/// same entries (j = m, k = n), edge ids in column-socket order.
SparseMeasurementMatrix complete_bipartite_from_dense(const DenseMeasurementMatrix& F);

/// Plain-text instance serialization.  Lossless at full double precision;
/// load errors name the offending line.
void save_instance(const std::string& path, const Instance& inst);
Instance load_instance(const std::string& path);

}  // namespace csbp
