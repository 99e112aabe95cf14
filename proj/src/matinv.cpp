#include "randers_foliate/matinv.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "randers_foliate/error.hpp"

namespace rf::matinv {

namespace {

void check_square(const Matrix& A) {
  if (A.rows() != A.cols()) throw ShapeError("matinv: matrix is not square");
  if (A.rows() == 0) throw ShapeError("matinv: empty matrix");
}

// Dense box of exponent vectors e with 0 <= e_i <= bound_i, mixed radix.
struct ExponentBox {
  std::vector<int> bound;
  std::vector<std::size_t> stride;
  std::size_t size = 1;

  explicit ExponentBox(const MultiIndex& b) : bound(b), stride(b.size()) {
    for (std::size_t i = 0; i < b.size(); ++i) {
      stride[i] = size;
      size *= static_cast<std::size_t>(b[i] + 1);
    }
  }

  std::vector<int> decode(std::size_t idx) const {
    std::vector<int> e(bound.size());
    for (std::size_t i = 0; i < bound.size(); ++i) {
      e[i] = static_cast<int>(idx % static_cast<std::size_t>(bound[i] + 1));
      idx /= static_cast<std::size_t>(bound[i] + 1);
    }
    return e;
  }

  std::size_t encode(const std::vector<int>& e) const {
    std::size_t idx = 0;
    for (std::size_t i = 0; i < e.size(); ++i) idx += static_cast<std::size_t>(e[i]) * stride[i];
    return idx;
  }
};

}  // namespace

double sigma_multi(std::span<const Matrix> mats, const MultiIndex& lambda) {
  if (mats.empty()) throw ShapeError("sigma_multi: no matrices");
  if (mats.size() != lambda.size()) throw ShapeError("sigma_multi: |λ| entries do not match matrix count");
  const Eigen::Index m = mats[0].rows();
  for (const auto& A : mats) {
    check_square(A);
    if (A.rows() != m) throw ShapeError("sigma_multi: matrices of different sizes");
  }
  int total = 0;
  for (int l : lambda) {
    if (l < 0) throw DomainError("sigma_multi: negative exponent");
    total += l;
  }
  if (total > m) return 0.0;
  if (total == 0) return 1.0;

  // Only monomials dividing t^λ contribute, so everything lives in the box e <= λ.
  const ExponentBox box(lambda);
  if (box.size > (std::size_t{1} << 22)) throw DomainError("sigma_multi: exponent box too large");
  std::vector<int> degree(box.size);
  for (std::size_t idx = 0; idx < box.size; ++idx) {
    const auto e = box.decode(idx);
    degree[idx] = std::accumulate(e.begin(), e.end(), 0);
  }

  // power[j][e] = tr of the t^e coefficient of (Σ t_i A_i)^j.
  std::vector<std::vector<double>> power(total + 1, std::vector<double>(box.size, 0.0));
  std::vector<Matrix> prev(box.size), next(box.size);
  prev[0] = Matrix::Identity(m, m);
  for (int j = 1; j <= total; ++j) {
    for (std::size_t idx = 0; idx < box.size; ++idx) {
      if (degree[idx] != j) continue;
      const auto e = box.decode(idx);
      Matrix acc = Matrix::Zero(m, m);
      for (std::size_t i = 0; i < e.size(); ++i) {
        if (e[i] == 0) continue;
        auto f = e;
        --f[i];
        acc.noalias() += mats[i] * prev[box.encode(f)];
      }
      power[j][idx] = acc.trace();
      next[idx] = std::move(acc);
    }
    std::swap(prev, next);
    for (auto& M : next) M.resize(0, 0);
  }

  // Graded Newton identity: d E_d = Σ_j (-1)^{j-1} p_j E_{d-j}, products taken in the box.
  std::vector<double> E(box.size, 0.0);
  E[0] = 1.0;
  std::vector<std::size_t> order(box.size);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return degree[x] < degree[y]; });
  for (std::size_t idx : order) {
    const int d = degree[idx];
    if (d == 0) continue;
    const auto e = box.decode(idx);
    double acc = 0.0;
    // Split e = f + g with |f| = j >= 1.
    for (std::size_t fidx = 0; fidx < box.size; ++fidx) {
      const int j = degree[fidx];
      if (j == 0 || j > d) continue;
      const auto f = box.decode(fidx);
      bool fits = true;
      std::vector<int> g(e.size());
      for (std::size_t i = 0; i < e.size(); ++i) {
        if (f[i] > e[i]) {
          fits = false;
          break;
        }
        g[i] = e[i] - f[i];
      }
      if (!fits) continue;
      const double sign = (j % 2 == 1) ? 1.0 : -1.0;
      acc += sign * power[j][fidx] * E[box.encode(g)];
    }
    E[idx] = acc / d;
  }
  return E[box.size - 1];
}

double sigma_single(const Matrix& A, int k) {
  check_square(A);
  if (k < 0) throw DomainError("sigma_single: negative order");
  if (k > A.rows()) return 0.0;
  return sigma_all(A)[static_cast<std::size_t>(k)];
}

std::vector<double> sigma_all(const Matrix& A) {
  check_square(A);
  const Eigen::Index m = A.rows();
  std::vector<double> p(m + 1, 0.0), e(m + 1, 0.0);
  Matrix P = Matrix::Identity(m, m);
  for (Eigen::Index j = 1; j <= m; ++j) {
    P = P * A;
    p[j] = P.trace();
  }
  e[0] = 1.0;
  for (Eigen::Index d = 1; d <= m; ++d) {
    double acc = 0.0;
    for (Eigen::Index j = 1; j <= d; ++j) acc += ((j % 2 == 1) ? 1.0 : -1.0) * p[j] * e[d - j];
    e[d] = acc / static_cast<double>(d);
  }
  return e;
}

double sigma_pair(const Matrix& A, const Matrix& B, int k, int l) {
  const Matrix mats[2] = {A, B};
  return sigma_multi(mats, {k, l});
}

Matrix newton_transform(const Matrix& A, int r) {
  check_square(A);
  if (r < 0) throw DomainError("newton_transform: negative order");
  const Eigen::Index m = A.rows();
  const auto s = sigma_all(A);
  Matrix T = Matrix::Identity(m, m);
  for (int j = 1; j <= r; ++j) {
    const double sj = j <= m ? s[static_cast<std::size_t>(j)] : 0.0;
    T = sj * Matrix::Identity(m, m) - A * T;
  }
  return T;
}

double IdentitySuiteReport::worst() const {
  double w = 0.0;
  for (const auto& r : rows) w = std::max(w, r.max_abs_residual);
  return w;
}

namespace {

Matrix random_matrix(std::mt19937_64& rng, Eigen::Index m) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix A(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j) A(i, j) = u(rng);
  return A;
}

Matrix random_rank_one(std::mt19937_64& rng, Eigen::Index m) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::VectorXd x(m), y(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    x(i) = u(rng);
    y(i) = u(rng);
  }
  return x * y.transpose();
}

// Random λ with k entries and |λ| <= m.
MultiIndex random_lambda(std::mt19937_64& rng, int k, int m) {
  MultiIndex lambda(k, 0);
  std::uniform_int_distribution<int> pick(0, k - 1);
  std::uniform_int_distribution<int> total(0, m);
  const int t = total(rng);
  for (int i = 0; i < t; ++i) ++lambda[pick(rng)];
  return lambda;
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

struct Tally {
  IdentityResidual row;
  void add(double lhs, double rhs) {
    ++row.checks;
    const double scale = std::max(1.0, std::max(std::abs(lhs), std::abs(rhs)));
    row.max_abs_residual = std::max(row.max_abs_residual, std::abs(lhs - rhs) / scale);
  }
};

}  // namespace

IdentitySuiteReport verify_sigma_identities(std::uint64_t seed, int trials, int m_max) {
  if (trials <= 0) throw DomainError("verify_sigma_identities: trials must be positive");
  if (m_max < 2 || m_max > 16) throw DomainError("verify_sigma_identities: m_max must be in [2, 16]");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> dim(2, m_max);
  std::uniform_int_distribution<int> arity(2, 3);
  std::uniform_real_distribution<double> scal(0.25, 2.0);

  Tally zero_slot{{"zero-slot"}}, drop_slot{{"drop-slot"}}, perm{{"permutation"}},
      ident{{"identity-slot"}}, repeat{{"repeated-slot"}}, additive{{"additive"}},
      homog{{"homogeneous"}}, pair{{"sigma_kl.product"}}, newton{{"newton.rank-one"}},
      rank1{{"sum.rank-one-chain"}};

  for (int trial = 0; trial < trials; ++trial) {
    const int m = dim(rng);
    const int k = arity(rng);
    std::vector<Matrix> mats;
    for (int i = 0; i < k; ++i) mats.push_back(random_matrix(rng, m));
    const MultiIndex lambda = random_lambda(rng, k, m);
    const MultiIndex hat(lambda.begin() + 1, lambda.end());
    const std::vector<Matrix> rest(mats.begin() + 1, mats.end());

    {
      auto z = mats;
      z[0] = Matrix::Zero(m, m);
      auto l = lambda;
      if (l[0] == 0 && hat.size() > 0) {
        // Move one unit into the first slot when possible so the check is not vacuous.
        for (auto& x : l)
          if (x > 0) {
            --x;
            break;
          }
        l[0] += 1;
      }
      if (l[0] > 0) zero_slot.add(sigma_multi(z, l), 0.0);
      auto l0 = lambda;
      l0[0] = 0;
      const MultiIndex hat0(l0.begin() + 1, l0.end());
      drop_slot.add(sigma_multi(mats, l0), sigma_multi(rest, hat0));
    }
    {
      std::vector<int> s(k);
      std::iota(s.begin(), s.end(), 0);
      std::shuffle(s.begin(), s.end(), rng);
      // Slot i of the permuted list holds A_{s(i)} with exponent λ_i.
      std::vector<Matrix> permuted;
      MultiIndex moved(k);
      for (int i = 0; i < k; ++i) {
        permuted.push_back(mats[s[i]]);
        moved[s[i]] = lambda[i];
      }
      perm.add(sigma_multi(permuted, lambda), sigma_multi(mats, moved));
    }
    {
      auto with_id = mats;
      with_id[0] = Matrix::Identity(m, m);
      int hat_w = 0;
      for (int x : hat) hat_w += x;
      ident.add(sigma_multi(with_id, lambda), binomial(m - hat_w, lambda[0]) * sigma_multi(rest, hat));
    }
    {
      auto rep = mats;
      rep[1] = rep[0];
      MultiIndex merged{lambda[0] + lambda[1]};
      std::vector<Matrix> mm{mats[0]};
      for (int i = 2; i < k; ++i) {
        merged.push_back(lambda[i]);
        mm.push_back(mats[i]);
      }
      repeat.add(sigma_multi(rep, lambda), binomial(lambda[0] + lambda[1], lambda[0]) * sigma_multi(mm, merged));
    }
    {
      const Matrix B = random_matrix(rng, m);
      auto l1 = lambda;
      l1[0] = 1;
      int w = 0;
      for (int x : l1) w += x;
      if (w > m) {
        for (std::size_t i = 1; i < l1.size() && w > m; ++i) {
          const int cut = std::min(l1[i], w - m);
          l1[i] -= cut;
          w -= cut;
        }
      }
      auto sum = mats;
      sum[0] = mats[0] + B;
      auto withB = mats;
      withB[0] = B;
      additive.add(sigma_multi(sum, l1), sigma_multi(mats, l1) + sigma_multi(withB, l1));
      const double a = scal(rng) * (trial % 2 == 0 ? 1.0 : -1.0);
      auto scaled = mats;
      scaled[0] = a * mats[0];
      homog.add(sigma_multi(scaled, lambda), std::pow(a, lambda[0]) * sigma_multi(mats, lambda));
    }
    {
      std::uniform_int_distribution<int> kl(1, m - 1);
      const int kk = kl(rng);
      std::uniform_int_distribution<int> ll(1, m - kk);
      const int l = ll(rng);
      const Matrix& B = mats[0];
      const Matrix& C = mats[1];
      const Matrix BC = B * C;
      double rhs = sigma_single(B, kk) * sigma_single(C, l);
      const std::vector<Matrix> triple{B, C, BC};
      for (int i = 1; i <= std::min(kk, l); ++i) rhs -= sigma_multi(triple, {kk - i, l - i, i});
      pair.add(sigma_pair(B, C, kk, l), rhs);
    }
    {
      std::uniform_int_distribution<int> kd(1, m);
      const int kk = kd(rng);
      const Matrix& C = mats[0];
      const Matrix A = random_rank_one(rng, m);
      newton.add(sigma_single(C + A, kk), sigma_single(C, kk) + (newton_transform(C, kk - 1) * A).trace());

      const Matrix& D = mats[1];
      std::uniform_int_distribution<int> sd(1, 3);
      const int s = sd(rng);
      std::vector<Matrix> ones;
      for (int i = 0; i < s; ++i) ones.push_back(random_rank_one(rng, m));
      Matrix total = C + D;
      for (const auto& R : ones) total += R;
      double rhs = sigma_single(C, kk);
      for (int j = 1; j <= kk; ++j) rhs += sigma_pair(C, D, kk - j, j);
      Matrix partial = C + D;
      for (const auto& R : ones) {
        rhs += (newton_transform(partial, kk - 1) * R).trace();
        partial += R;
      }
      rank1.add(sigma_single(total, kk), rhs);
    }
  }

  IdentitySuiteReport report;
  report.seed = seed;
  report.trials = trials;
  report.m_max = m_max;
  for (auto* t : {&zero_slot, &drop_slot, &perm, &ident, &repeat, &additive, &homog, &pair, &newton, &rank1})
    report.rows.push_back(t->row);
  return report;
}

}  // namespace rf::matinv
