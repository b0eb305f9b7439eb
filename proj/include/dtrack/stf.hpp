#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

namespace dtrack {

/// N x R x d RoI features, one R x d matrix per proposal.
using RoiFeatures = std::vector<Eigen::MatrixXd>;

namespace detail {

inline Eigen::MatrixXd xavier_uniform(Eigen::Index fan_in, Eigen::Index fan_out, std::mt19937_64& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::uniform_real_distribution<double> u(-limit, limit);
  Eigen::MatrixXd m(fan_in, fan_out);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = u(rng);
  return m;
}

inline Eigen::MatrixXd relu(const Eigen::MatrixXd& m) { return m.cwiseMax(0.0); }

}  // namespace detail

/// Bias-free reference weights for the spatial-temporal fusion block.
///
/// Linear1 maps a query (d) to the two dynamic kernels P1 (d x h) and
/// P2 (h x d); the RoI features of both frames are stacked along the RoI axis
/// (2R x d) and pushed through P1 then P2, and Linear2 flattens the 2R x d
/// result back to d.
struct StfWeights {
  int rois = 49;
  int dim = 16;
  int hidden = 4;
  Eigen::MatrixXd linear1;  // d x (2 d h)
  Eigen::MatrixXd linear2;  // (2 R d) x d

  static StfWeights seeded(std::uint64_t seed, int rois = 49, int dim = 16, int hidden = 4) {
    std::mt19937_64 rng(seed);
    StfWeights w;
    w.rois = rois;
    w.dim = dim;
    w.hidden = hidden;
    w.linear1 = detail::xavier_uniform(dim, 2 * dim * hidden, rng);
    w.linear2 = detail::xavier_uniform(2 * rois * dim, dim, rng);
    return w;
  }
};

namespace detail {

inline Eigen::RowVectorXd stf_one(const Eigen::MatrixXd& f_self, const Eigen::MatrixXd& f_other,
                                  const Eigen::RowVectorXd& query, const StfWeights& w) {
  const Eigen::Index d = w.dim, h = w.hidden, r = w.rois;
  const Eigen::RowVectorXd params = query * w.linear1;
  const Eigen::MatrixXd p1 =
      Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(params.data(), d, h);
  const Eigen::MatrixXd p2 = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      params.data() + d * h, h, d);
  Eigen::MatrixXd stacked(2 * r, d);
  stacked << f_self, f_other;
  const Eigen::MatrixXd feat = relu(relu(stacked * p1) * p2);  // 2R x d
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> row_major = feat;
  const Eigen::Map<const Eigen::RowVectorXd> flat(row_major.data(), row_major.size());
  return flat * w.linear2;
}

}  // namespace detail

/// Fuses each proposal's two frames; output i is computed from
/// (f_i, f_j, q_i) for (i, j) in [(prev, cur), (cur, prev)].
inline std::pair<Eigen::MatrixXd, Eigen::MatrixXd> stf_fuse(const RoiFeatures& f_prev, const RoiFeatures& f_cur,
                                                            const Eigen::MatrixXd& q_prev,
                                                            const Eigen::MatrixXd& q_cur, const StfWeights& w) {
  const std::size_t n = f_prev.size();
  if (f_cur.size() != n || static_cast<std::size_t>(q_prev.rows()) != n ||
      static_cast<std::size_t>(q_cur.rows()) != n || q_prev.cols() != w.dim || q_cur.cols() != w.dim) {
    throw std::invalid_argument("stf_fuse: shape mismatch");
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto* f : {&f_prev[i], &f_cur[i]}) {
      if (f->rows() != w.rois || f->cols() != w.dim) throw std::invalid_argument("stf_fuse: RoI feature shape mismatch");
    }
  }
  Eigen::MatrixXd out_prev(static_cast<Eigen::Index>(n), w.dim);
  Eigen::MatrixXd out_cur(static_cast<Eigen::Index>(n), w.dim);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    out_prev.row(row) = detail::stf_one(f_prev[i], f_cur[i], q_prev.row(row), w);
    out_cur.row(row) = detail::stf_one(f_cur[i], f_prev[i], q_cur.row(row), w);
  }
  return {out_prev, out_cur};
}

/// Linear layer over the concatenated fused queries, squashed by a sigmoid.
struct AssociationHead {
  Eigen::VectorXd weight;  // 2d
  double bias = 0.0;

  static AssociationHead seeded(std::uint64_t seed, int dim = 16) {
    std::mt19937_64 rng(seed);
    return {detail::xavier_uniform(2 * dim, 1, rng).col(0), 0.0};
  }
};

inline Eigen::VectorXd association_score_head(const Eigen::MatrixXd& fused_prev, const Eigen::MatrixXd& fused_cur,
                                              const AssociationHead& head) {
  if (fused_prev.rows() != fused_cur.rows() || fused_prev.cols() != fused_cur.cols() ||
      2 * fused_prev.cols() != head.weight.size()) {
    throw std::invalid_argument("association_score_head: shape mismatch");
  }
  Eigen::MatrixXd joined(fused_prev.rows(), 2 * fused_prev.cols());
  joined << fused_prev, fused_cur;
  const Eigen::VectorXd logits = (joined * head.weight).array() + head.bias;
  return logits.unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });
}

}  // namespace dtrack
