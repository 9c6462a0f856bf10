#include "gaussact/cohomology.hpp"

#include <algorithm>
#include <map>

#include <json.hpp>

namespace gaussact::coh {

namespace {

/// Rank under a relative singular-value threshold; the scale floor keeps the
/// zero matrix at rank zero.
int sv_rank(const Eigen::VectorXd& sigma, double tol) {
  double scale = sigma.size() > 0 ? std::max(sigma[0], 1.0) : 1.0;
  int rank = 0;
  while (rank < sigma.size() && sigma[rank] > tol * scale) ++rank;
  return rank;
}

/// Cocycle value of a single letter: b_s or -pi_s^T b_s.
Eigen::VectorXd letter_value(const RepCocycle& b, int letter) {
  int index = std::abs(letter) - 1;
  if (letter > 0) return b.gen_values[index];
  return -(b.rep.generators[index].transpose() * b.gen_values[index]);
}

/// Unpack a stacked vector in R^{k*d} into a cocycle on the representation.
RepCocycle unstack(const OrthogonalRep& rep, const Eigen::VectorXd& stacked) {
  int d = rep.dim();
  RepCocycle b{rep, {}};
  for (std::size_t s = 0; s < rep.generators.size(); ++s) {
    b.gen_values.push_back(stacked.segment(static_cast<Eigen::Index>(s) * d, d));
  }
  return b;
}

}  // namespace

void check_cocycle(const RepCocycle& b) {
  if (b.gen_values.size() != b.rep.generators.size()) {
    throw DomainError("cocycle needs one value per generator");
  }
  for (const auto& v : b.gen_values) {
    if (v.size() != b.rep.dim()) {
      throw DomainError("cocycle value dimension != representation dimension");
    }
  }
}

Eigen::VectorXd extend(const RepCocycle& b, const Word& w) {
  check_cocycle(b);
  grp::check_word(b.rep.presentation, w);
  Eigen::VectorXd value = Eigen::VectorXd::Zero(b.rep.dim());
  Eigen::MatrixXd prefix =
      Eigen::MatrixXd::Identity(b.rep.dim(), b.rep.dim());
  for (int letter : w) {
    value += prefix * letter_value(b, letter);
    const Eigen::MatrixXd& g = b.rep.generators[std::abs(letter) - 1];
    prefix = (letter > 0) ? (prefix * g).eval() : (prefix * g.transpose()).eval();
  }
  return value;
}

double relator_residual(const RepCocycle& b) {
  double worst = 0.0;
  for (const Word& r : b.rep.presentation.relators) {
    worst = std::max(worst, extend(b, r).norm());
  }
  return worst;
}

CohomologyReport cocycle_space(const OrthogonalRep& rep, double sv_tol) {
  int d = rep.dim();
  int k = static_cast<int>(rep.generators.size());
  CohomologyReport report;
  const auto& relators = rep.presentation.relators;

  Eigen::MatrixXd null_basis;
  if (relators.empty() || k == 0) {
    null_basis = Eigen::MatrixXd::Identity(k * d, k * d);
  } else {
    // Row block per relator: the value extend(b, r) as a linear function of
    // the stacked generator values.
    Eigen::MatrixXd constraints =
        Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(relators.size()) * d,
                              static_cast<Eigen::Index>(k) * d);
    for (std::size_t ri = 0; ri < relators.size(); ++ri) {
      grp::check_word(rep.presentation, relators[ri]);
      Eigen::MatrixXd prefix = Eigen::MatrixXd::Identity(d, d);
      for (int letter : relators[ri]) {
        int s = std::abs(letter) - 1;
        const Eigen::MatrixXd& g = rep.generators[s];
        auto block = constraints.block(static_cast<Eigen::Index>(ri) * d,
                                       static_cast<Eigen::Index>(s) * d, d, d);
        if (letter > 0) {
          block += prefix;
          prefix = prefix * g;
        } else {
          block -= prefix * g.transpose();
          prefix = prefix * g.transpose();
        }
      }
    }
    Eigen::BDCSVD<Eigen::MatrixXd> svd(constraints, Eigen::ComputeFullV);
    report.singular_values.assign(
        svd.singularValues().data(),
        svd.singularValues().data() + svd.singularValues().size());
    int rank = sv_rank(svd.singularValues(), sv_tol);
    null_basis = svd.matrixV().rightCols(k * d - rank);
  }

  report.dimZ1 = static_cast<int>(null_basis.cols());
  for (Eigen::Index c = 0; c < null_basis.cols(); ++c) {
    report.basisZ1.push_back(unstack(rep, null_basis.col(c)));
  }
  report.dimB1 = static_cast<int>(coboundary_space(rep, sv_tol).cols());
  report.dimH1 = report.dimZ1 - report.dimB1;
  return report;
}

Eigen::MatrixXd coboundary_space(const OrthogonalRep& rep, double sv_tol) {
  int d = rep.dim();
  int k = static_cast<int>(rep.generators.size());
  Eigen::MatrixXd stacked(static_cast<Eigen::Index>(k) * d, d);
  for (int s = 0; s < k; ++s) {
    stacked.middleRows(static_cast<Eigen::Index>(s) * d, d) =
        rep.generators[s] - Eigen::MatrixXd::Identity(d, d);
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(stacked, Eigen::ComputeThinU);
  return svd.matrixU().leftCols(sv_rank(svd.singularValues(), sv_tol));
}

CohomologyReport h1(const OrthogonalRep& rep, double sv_tol) {
  return cocycle_space(rep, sv_tol);
}

std::string report_to_json(const CohomologyReport& report) {
  nlohmann::json j;
  j["dimZ1"] = report.dimZ1;
  j["dimB1"] = report.dimB1;
  j["dimH1"] = report.dimH1;
  j["singular_values"] = report.singular_values;
  auto& basis = j["basis"] = nlohmann::json::array();
  for (const RepCocycle& b : report.basisZ1) {
    nlohmann::json element = nlohmann::json::array();
    for (const auto& v : b.gen_values) {
      element.push_back(std::vector<double>(v.data(), v.data() + v.size()));
    }
    basis.push_back(std::move(element));
  }
  return j.dump(2);
}

CoboundaryFit coboundary_fit(const RepCocycle& b,
                             const std::vector<Word>& words, double sv_tol) {
  check_cocycle(b);
  if (words.empty()) throw DomainError("coboundary_fit: empty word sample");
  int d = b.rep.dim();
  Eigen::MatrixXd lhs(static_cast<Eigen::Index>(words.size()) * d, d);
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(words.size()) * d);
  for (std::size_t i = 0; i < words.size(); ++i) {
    lhs.middleRows(static_cast<Eigen::Index>(i) * d, d) =
        grp::evaluate(b.rep, words[i]) - Eigen::MatrixXd::Identity(d, d);
    rhs.segment(static_cast<Eigen::Index>(i) * d, d) = extend(b, words[i]);
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(
      lhs, Eigen::ComputeThinU | Eigen::ComputeThinV);
  CoboundaryFit fit;
  fit.rank_deficient = sv_rank(svd.singularValues(), sv_tol) < d;
  // SVD solve with small singular values zeroed: the minimum-norm solution.
  svd.setThreshold(sv_tol);
  fit.eta = svd.solve(rhs);
  for (std::size_t i = 0; i < words.size(); ++i) {
    fit.word_residuals.push_back(
        (lhs.middleRows(static_cast<Eigen::Index>(i) * d, d) * fit.eta -
         rhs.segment(static_cast<Eigen::Index>(i) * d, d))
            .norm());
    fit.max_residual = std::max(fit.max_residual, fit.word_residuals.back());
  }
  return fit;
}

CoboundaryFit coboundary_fit(const RepCocycle& b, double sv_tol) {
  return coboundary_fit(
      b, grp::free_ball(b.rep.presentation.generator_count, 4), sv_tol);
}

std::vector<GrowthPoint> growth_probe(const RepCocycle& b, int radius,
                                      std::size_t cap) {
  check_cocycle(b);
  std::vector<Word> ball =
      grp::free_ball(b.rep.presentation.generator_count, radius, cap);
  std::map<Word, int> index;
  for (std::size_t i = 0; i < ball.size(); ++i) {
    index[ball[i]] = static_cast<int>(i);
  }

  std::vector<Eigen::VectorXd> values(ball.size());
  std::vector<GrowthPoint> points(static_cast<std::size_t>(radius) + 1);
  values[0] = Eigen::VectorXd::Zero(b.rep.dim());
  for (std::size_t i = 1; i < ball.size(); ++i) {
    // b(s w') = b(s) + pi_s b(w'): one matrix-vector product per word.
    int letter = ball[i].front();
    Word suffix(ball[i].begin() + 1, ball[i].end());
    const Eigen::MatrixXd& g = b.rep.generators[std::abs(letter) - 1];
    const Eigen::VectorXd& parent = values[index.at(suffix)];
    values[i] = letter_value(b, letter) +
                (letter > 0 ? (g * parent).eval() : (g.transpose() * parent).eval());
    auto& point = points[ball[i].size()];
    point.max_norm = std::max(point.max_norm, values[i].norm());
  }
  double running = 0.0;
  for (int r = 0; r <= radius; ++r) {
    points[r].radius = r;
    running = std::max(running, points[r].max_norm);
    points[r].max_norm = running;  // ball max, not sphere max
  }
  return points;
}

std::vector<GrowthPoint> growth_probe(const RepCocycle& b,
                                      const FiniteGroup& table, int radius) {
  check_cocycle(b);
  if (radius < 0) throw DomainError("growth_probe: negative radius");
  std::vector<GrowthPoint> points(static_cast<std::size_t>(radius) + 1);
  for (const Word& w : table.element_words) {
    if (static_cast<int>(w.size()) > radius) continue;
    auto& point = points[w.size()];
    point.max_norm = std::max(point.max_norm, extend(b, w).norm());
  }
  double running = 0.0;
  for (int r = 0; r <= radius; ++r) {
    points[r].radius = r;
    running = std::max(running, points[r].max_norm);
    points[r].max_norm = running;
  }
  return points;
}

}  // namespace gaussact::coh
