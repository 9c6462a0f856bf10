#include "gaussact/group_rep.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

namespace gaussact::grp {

Word reduce(const Word& w) {
  Word out;
  out.reserve(w.size());
  for (int letter : w) {
    if (letter == 0) throw DomainError("reduce: zero letter");
    if (!out.empty() && out.back() == -letter) {
      out.pop_back();
    } else {
      out.push_back(letter);
    }
  }
  return out;
}

Word inverse(const Word& w) {
  Word out(w.rbegin(), w.rend());
  for (int& letter : out) letter = -letter;
  return out;
}

Word concat(const Word& a, const Word& b) {
  Word joined = a;
  joined.insert(joined.end(), b.begin(), b.end());
  return reduce(joined);
}

void check_word(const GroupPresentation& p, const Word& w) {
  for (int letter : w) {
    int index = std::abs(letter) - 1;
    if (letter == 0 || index >= p.generator_count) {
      throw DomainError("word letter " + std::to_string(letter) +
                        " outside generator range");
    }
  }
}

Eigen::MatrixXd evaluate(const OrthogonalRep& rep, const Word& w) {
  check_word(rep.presentation, w);
  int d = rep.dim();
  Eigen::MatrixXd result = Eigen::MatrixXd::Identity(d, d);
  for (int letter : w) {
    const Eigen::MatrixXd& g = rep.generators[std::abs(letter) - 1];
    if (letter > 0) {
      result = result * g;
    } else {
      result = result * g.transpose();
    }
  }
  return result;
}

RepCheckReport rep_check(const OrthogonalRep& rep) {
  int d = rep.dim();
  Eigen::MatrixXd id = Eigen::MatrixXd::Identity(d, d);
  RepCheckReport report;
  for (const auto& g : rep.generators) {
    report.orthogonality_residual = std::max(
        report.orthogonality_residual, (g.transpose() * g - id).norm());
  }
  for (const Word& r : rep.presentation.relators) {
    double residual = (evaluate(rep, r) - id).norm();
    report.relator_residuals.push_back(residual);
    report.max_relator_residual =
        std::max(report.max_relator_residual, residual);
  }
  return report;
}

namespace {

void check_same_presentation(const OrthogonalRep& a, const OrthogonalRep& b,
                             const char* who) {
  if (a.presentation.generator_count != b.presentation.generator_count ||
      a.presentation.relators != b.presentation.relators) {
    throw DomainError(std::string(who) + ": presentations differ");
  }
}

Eigen::MatrixXd kronecker(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

/// C = sum_s (pi_s - I)^T (pi_s - I): positive semidefinite with null space
/// exactly the joint fixed space.
Eigen::MatrixXd defect_operator(const OrthogonalRep& rep) {
  int d = rep.dim();
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(d, d);
  Eigen::MatrixXd id = Eigen::MatrixXd::Identity(d, d);
  for (const auto& g : rep.generators) {
    Eigen::MatrixXd diff = g - id;
    c += diff.transpose() * diff;
  }
  return c;
}

}  // namespace

OrthogonalRep direct_sum(const OrthogonalRep& a, const OrthogonalRep& b) {
  check_same_presentation(a, b, "direct_sum");
  OrthogonalRep out{a.presentation, {}};
  for (std::size_t i = 0; i < a.generators.size(); ++i) {
    int da = a.dim(), db = b.dim();
    Eigen::MatrixXd block = Eigen::MatrixXd::Zero(da + db, da + db);
    block.topLeftCorner(da, da) = a.generators[i];
    block.bottomRightCorner(db, db) = b.generators[i];
    out.generators.push_back(std::move(block));
  }
  return out;
}

OrthogonalRep tensor(const OrthogonalRep& a, const OrthogonalRep& b) {
  check_same_presentation(a, b, "tensor");
  OrthogonalRep out{a.presentation, {}};
  for (std::size_t i = 0; i < a.generators.size(); ++i) {
    out.generators.push_back(kronecker(a.generators[i], b.generators[i]));
  }
  return out;
}

Eigen::MatrixXd invariant_vectors(const OrthogonalRep& rep, double eig_tol) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(defect_operator(rep));
  int fixed = 0;
  while (fixed < rep.dim() && es.eigenvalues()[fixed] <= eig_tol) ++fixed;
  return es.eigenvectors().leftCols(fixed);
}

bool weak_mixing_check(const OrthogonalRep& rep, double eig_tol) {
  return invariant_vectors(tensor(rep, rep), eig_tol).cols() == 0;
}

std::optional<double> spectral_gap_estimate(const OrthogonalRep& rep,
                                            double eig_tol) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(defect_operator(rep));
  int fixed = 0;
  while (fixed < rep.dim() && es.eigenvalues()[fixed] <= eig_tol) ++fixed;
  if (fixed == rep.dim()) return std::nullopt;
  return es.eigenvalues()[fixed];
}

std::vector<Word> free_ball(int rank, int radius, std::size_t cap) {
  if (rank < 1) throw DomainError("free_ball: rank must be positive");
  if (radius < 0) throw DomainError("free_ball: negative radius");
  // |B_R| = 1 + 2k ((2k-1)^R - 1) / (2k - 2) for rank k >= 2, 2R + 1 for Z.
  long double size_estimate = 1.0L;
  long double layer = 1.0L;
  for (int r = 1; r <= radius; ++r) {
    layer *= (r == 1) ? 2.0L * rank : (2.0L * rank - 1.0L);
    size_estimate += layer;
    if (size_estimate > static_cast<long double>(cap)) {
      throw ResourceError("free_ball: ball size exceeds cap " +
                          std::to_string(cap));
    }
  }

  std::vector<Word> ball = {Word{}};
  std::size_t level_begin = 0;
  for (int r = 1; r <= radius; ++r) {
    std::size_t level_end = ball.size();
    for (std::size_t i = level_begin; i < level_end; ++i) {
      for (int letter = -rank; letter <= rank; ++letter) {
        if (letter == 0) continue;
        // Prepend: every reduced word of length r is s.w for a unique
        // reduced w of length r-1 whose first letter is not s^-1.
        if (!ball[i].empty() && ball[i].front() == -letter) continue;
        Word extended;
        extended.reserve(ball[i].size() + 1);
        extended.push_back(letter);
        extended.insert(extended.end(), ball[i].begin(), ball[i].end());
        ball.push_back(std::move(extended));
      }
    }
    level_begin = level_end;
    std::sort(ball.begin() + level_begin, ball.end());
  }
  return ball;
}

OrthogonalRep regular_rep_ball(int rank, int radius, std::size_t cap) {
  std::vector<Word> ball = free_ball(rank, radius, cap);
  std::map<Word, int> index;
  for (std::size_t i = 0; i < ball.size(); ++i) {
    index[ball[i]] = static_cast<int>(i);
  }
  int n = static_cast<int>(ball.size());
  OrthogonalRep rep{GroupPresentation{rank, {}}, {}};
  for (int s = 1; s <= rank; ++s) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (int j = 0; j < n; ++j) {
      Word image = concat(Word{s}, ball[j]);
      auto found = index.find(image);
      if (found != index.end()) m(found->second, j) = 1.0;
    }
    rep.generators.push_back(std::move(m));
  }
  return rep;
}

FiniteGroup FiniteGroup::cyclic(int n) {
  if (n < 1) throw DomainError("cyclic: order must be positive");
  FiniteGroup g;
  g.order = n;
  g.table.assign(n, std::vector<int>(n));
  g.inverse.resize(n);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) g.table[a][b] = (a + b) % n;
    g.inverse[a] = (n - a) % n;
    g.element_words.push_back(Word(a, 1));
  }
  g.generator_elements = {1 % n};
  return g;
}

FiniteGroup FiniteGroup::from_permutations(
    const std::vector<std::vector<int>>& perms) {
  if (perms.empty()) throw DomainError("from_permutations: no generators");
  std::size_t n = perms[0].size();
  for (const auto& p : perms) {
    if (p.size() != n) {
      throw DomainError("from_permutations: inconsistent permutation sizes");
    }
  }
  std::vector<int> id(n);
  for (std::size_t i = 0; i < n; ++i) id[i] = static_cast<int>(i);

  // Breadth-first closure from the identity; shortest word per element.
  std::map<std::vector<int>, int> index;
  std::vector<std::vector<int>> elements = {id};
  std::vector<Word> words = {Word{}};
  index[id] = 0;
  std::size_t frontier = 0;
  while (frontier < elements.size()) {
    std::vector<int> current = elements[frontier];
    Word current_word = words[frontier];
    ++frontier;
    for (std::size_t s = 0; s < perms.size(); ++s) {
      std::vector<int> next(n);
      for (std::size_t i = 0; i < n; ++i) {
        next[i] = perms[s][current[i]];  // left multiply by generator s
      }
      if (index.emplace(next, static_cast<int>(elements.size())).second) {
        Word w{static_cast<int>(s) + 1};
        w.insert(w.end(), current_word.begin(), current_word.end());
        elements.push_back(std::move(next));
        words.push_back(std::move(w));
      }
    }
  }

  FiniteGroup g;
  g.order = static_cast<int>(elements.size());
  g.element_words = words;
  g.table.assign(g.order, std::vector<int>(g.order));
  g.inverse.resize(g.order);
  for (int a = 0; a < g.order; ++a) {
    for (int b = 0; b < g.order; ++b) {
      std::vector<int> prod(n);
      for (std::size_t i = 0; i < n; ++i) prod[i] = elements[a][elements[b][i]];
      g.table[a][b] = index.at(prod);
      if (g.table[a][b] == 0) g.inverse[a] = b;
    }
  }
  for (std::size_t s = 0; s < perms.size(); ++s) {
    g.generator_elements.push_back(index.at(perms[s]));
  }
  return g;
}

Eigen::MatrixXd averaging_projector(const OrthogonalRep& rep,
                                    const FiniteGroup& table) {
  int d = rep.dim();
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(d, d);
  for (const Word& w : table.element_words) {
    sum += evaluate(rep, w);
  }
  return sum / static_cast<double>(table.order);
}

std::string representation_to_json(const OrthogonalRep& rep) {
  nlohmann::json j;
  j["generators"] = rep.presentation.generator_count;
  j["relators"] = rep.presentation.relators;
  auto& matrices = j["matrices"] = nlohmann::json::array();
  for (const auto& g : rep.generators) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < g.rows(); ++r) {
      nlohmann::json row = nlohmann::json::array();
      for (Eigen::Index c = 0; c < g.cols(); ++c) row.push_back(g(r, c));
      rows.push_back(std::move(row));
    }
    matrices.push_back(std::move(rows));
  }
  return j.dump(2);
}

OrthogonalRep representation_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw DomainError(std::string("representation JSON parse error: ") +
                      e.what());
  }
  if (!j.is_object() || !j.contains("generators") || !j.contains("relators") ||
      !j.contains("matrices")) {
    throw DomainError(
        "representation JSON needs keys generators/relators/matrices");
  }
  OrthogonalRep rep;
  rep.presentation.generator_count = j["generators"].get<int>();
  rep.presentation.relators = j["relators"].get<std::vector<Word>>();
  for (const auto& rows : j["matrices"]) {
    std::size_t nrows = rows.size();
    if (nrows == 0) throw DomainError("representation JSON: empty matrix");
    Eigen::MatrixXd m(nrows, rows[0].size());
    for (std::size_t r = 0; r < nrows; ++r) {
      if (rows[r].size() != static_cast<std::size_t>(m.cols())) {
        throw DomainError("representation JSON: ragged matrix");
      }
      for (std::size_t c = 0; c < rows[r].size(); ++c) {
        m(r, c) = rows[r][c].get<double>();
      }
    }
    rep.generators.push_back(std::move(m));
  }
  if (static_cast<int>(rep.generators.size()) !=
      rep.presentation.generator_count) {
    throw DomainError("representation JSON: matrix count != generator count");
  }
  for (const Word& r : rep.presentation.relators) {
    check_word(rep.presentation, r);
  }
  return rep;
}

void save_representation(const OrthogonalRep& rep, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DomainError("cannot open for writing: " + path);
  out << representation_to_json(rep) << '\n';
}

OrthogonalRep load_representation(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open representation file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return representation_from_json(buffer.str());
}

}  // namespace gaussact::grp
