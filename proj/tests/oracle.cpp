#include "oracle.hpp"

#include <cstdlib>
#include <stdexcept>

namespace oracle {

Mat identity(long n) {
  Mat m(n, Vec(n, 0.0));
  for (long i = 0; i < n; ++i) m[i][i] = 1.0;
  return m;
}

Mat kron(const Mat& a, const Mat& b) {
  long ra = static_cast<long>(a.size()), ca = static_cast<long>(a[0].size());
  long rb = static_cast<long>(b.size()), cb = static_cast<long>(b[0].size());
  Mat m(ra * rb, Vec(ca * cb, 0.0));
  for (long i = 0; i < ra; ++i)
    for (long j = 0; j < ca; ++j)
      for (long k = 0; k < rb; ++k)
        for (long l = 0; l < cb; ++l) m[i * rb + k][j * cb + l] = a[i][j] * b[k][l];
  return m;
}

Vec kron_vec(const Vec& a, const Vec& b) {
  Vec v(a.size() * b.size());
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) v[i * b.size() + j] = a[i] * b[j];
  return v;
}

Mat outer(const Vec& a, const Vec& b) {
  Mat m(a.size(), Vec(b.size()));
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) m[i][j] = a[i] * std::conj(b[j]);
  return m;
}

Vec mat_vec(const Mat& m, const Vec& v) {
  if (m[0].size() != v.size()) throw std::invalid_argument("oracle: shape mismatch");
  Vec out(m.size(), 0.0);
  for (size_t i = 0; i < m.size(); ++i)
    for (size_t j = 0; j < v.size(); ++j) out[i] += m[i][j] * v[j];
  return out;
}

cxd inner(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw std::invalid_argument("oracle: shape mismatch");
  cxd s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

double norm2(const Vec& v) {
  double s = 0.0;
  for (const auto& a : v) s += std::norm(a);
  return s;
}

std::vector<int> digits(long index, const std::vector<int>& dims) {
  std::vector<int> d(dims.size(), 0);
  for (int i = static_cast<int>(dims.size()) - 1; i >= 0; --i) {
    d[i] = static_cast<int>(index % dims[i]);
    index /= dims[i];
  }
  return d;
}

Mat embed(const Mat& u, const std::vector<int>& targets, const std::vector<int>& dims) {
  long full = 1;
  for (int d : dims) full *= d;
  Mat m(full, Vec(full, 0.0));
  for (long row = 0; row < full; ++row) {
    std::vector<int> rd = digits(row, dims);
    for (long col = 0; col < full; ++col) {
      std::vector<int> cd = digits(col, dims);
      bool spectator_match = true;
      for (size_t i = 0; i < dims.size(); ++i) {
        bool is_target = false;
        for (int t : targets) is_target = is_target || t == static_cast<int>(i);
        if (!is_target && rd[i] != cd[i]) spectator_match = false;
      }
      if (!spectator_match) continue;
      long r = 0, c = 0;
      for (int t : targets) {
        r = r * dims[t] + rd[t];
        c = c * dims[t] + cd[t];
      }
      m[row][col] = u[r][c];
    }
  }
  return m;
}

Mat reduced(const Vec& psi, const std::vector<int>& keep, const std::vector<int>& dims) {
  long kd = 1;
  for (int k : keep) kd *= dims[k];
  Mat rho(kd, Vec(kd, 0.0));
  long full = static_cast<long>(psi.size());
  for (long row = 0; row < full; ++row) {
    std::vector<int> rd = digits(row, dims);
    for (long col = 0; col < full; ++col) {
      std::vector<int> cd = digits(col, dims);
      bool spectator_match = true;
      for (size_t i = 0; i < dims.size(); ++i) {
        bool is_kept = false;
        for (int k : keep) is_kept = is_kept || k == static_cast<int>(i);
        if (!is_kept && rd[i] != cd[i]) spectator_match = false;
      }
      if (!spectator_match) continue;
      long r = 0, c = 0;
      for (int k : keep) {
        r = r * dims[k] + rd[k];
        c = c * dims[k] + cd[k];
      }
      rho[r][c] += psi[row] * std::conj(psi[col]);
    }
  }
  return rho;
}

}  // namespace oracle
