#pragma once

// Independent reference implementations used only by tests. Nothing here
// calls into the library's extraction, weighting, solver or scoring code.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace oracle {

// ---------------------------------------------------------------- text

inline std::vector<std::string> split_code_points(const std::string& s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const auto b = static_cast<unsigned char>(s[i]);
    std::size_t len = b < 0x80 ? 1 : (b >> 5) == 0x6 ? 2 : (b >> 4) == 0xe ? 3 : 4;
    out.push_back(s.substr(i, len));
    i += len;
  }
  return out;
}

inline char32_t code_point(const std::string& ch) {
  const auto* b = reinterpret_cast<const unsigned char*>(ch.data());
  switch (ch.size()) {
    case 1: return b[0];
    case 2: return ((b[0] & 0x1f) << 6) | (b[1] & 0x3f);
    case 3: return ((b[0] & 0x0f) << 12) | ((b[1] & 0x3f) << 6) | (b[2] & 0x3f);
    default:
      return ((b[0] & 0x07) << 18) | ((b[1] & 0x3f) << 12) | ((b[2] & 0x3f) << 6) | (b[3] & 0x3f);
  }
}

// The Unicode White_Space property, listed explicitly.
inline bool is_white_space(char32_t c) {
  static const char32_t kSpaces[] = {0x09,   0x0A,   0x0B,   0x0C,   0x0D,   0x20,   0x85,
                                     0xA0,   0x1680, 0x2000, 0x2001, 0x2002, 0x2003, 0x2004,
                                     0x2005, 0x2006, 0x2007, 0x2008, 0x2009, 0x200A, 0x2028,
                                     0x2029, 0x202F, 0x205F, 0x3000};
  return std::find(std::begin(kSpaces), std::end(kSpaces), c) != std::end(kSpaces);
}

inline std::vector<std::string> tokens(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (const auto& ch : split_code_points(s)) {
    if (is_white_space(code_point(ch))) {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

inline std::map<std::string, int> char_ngrams(const std::string& s, int n) {
  std::map<std::string, int> out;
  const auto cps = split_code_points(s);
  for (int i = 0; i + n <= static_cast<int>(cps.size()); ++i) {
    std::string t;
    for (int j = 0; j < n; ++j) t += cps[i + j];
    ++out[t];
  }
  return out;
}

inline std::map<std::string, int> word_ngrams(const std::vector<std::string>& toks, int n) {
  std::map<std::string, int> out;
  for (int i = 0; i + n <= static_cast<int>(toks.size()); ++i) {
    std::string t = toks[i];
    for (int j = 1; j < n; ++j) t += " " + toks[i + j];
    ++out[t];
  }
  return out;
}

// All ordered pairs i < j, kept when the number of tokens strictly between
// them satisfies the gap rule.
inline std::map<std::string, int> skip_bigrams(const std::vector<std::string>& toks, int k,
                                               bool exact) {
  std::map<std::string, int> out;
  for (std::size_t i = 0; i < toks.size(); ++i) {
    for (std::size_t j = i + 1; j < toks.size(); ++j) {
      const std::size_t between = j - i - 1;
      const bool keep = exact ? between == static_cast<std::size_t>(k)
                              : between <= static_cast<std::size_t>(k);
      if (keep) ++out[toks[i] + " " + toks[j]];
    }
  }
  return out;
}

template <class Terms>
std::map<std::string, int> count(const Terms& terms) {
  std::map<std::string, int> out;
  for (const auto& t : terms) ++out[t];
  return out;
}

// ---------------------------------------------------------------- TF-IDF

// Dense TF-IDF: vocabulary = sorted union of terms, df by document, idf
// ln((1+N)/(1+df))+1, raw-count tf, L2 normalization.
struct DenseTfIdf {
  std::vector<std::string> vocab;
  std::vector<double> idf;

  explicit DenseTfIdf(const std::vector<std::map<std::string, int>>& docs) {
    std::map<std::string, int> df;
    for (const auto& d : docs)
      for (const auto& [t, c] : d) df[t] += 1;
    const double N = static_cast<double>(docs.size());
    for (const auto& [t, f] : df) {
      vocab.push_back(t);
      idf.push_back(std::log((1.0 + N) / (1.0 + f)) + 1.0);
    }
  }

  std::vector<double> transform(const std::map<std::string, int>& doc) const {
    std::vector<double> v(vocab.size(), 0.0);
    for (std::size_t i = 0; i < vocab.size(); ++i) {
      auto it = doc.find(vocab[i]);
      if (it != doc.end()) v[i] = it->second * idf[i];
    }
    double n2 = 0;
    for (double x : v) n2 += x * x;
    if (n2 > 0)
      for (double& x : v) x /= std::sqrt(n2);
    return v;
  }
};

// ---------------------------------------------------------------- SVM

// Gaussian elimination with partial pivoting; nullopt when singular.
inline std::optional<std::vector<double>> solve(std::vector<std::vector<double>> A,
                                                std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::fabs(A[r][col]) > std::fabs(A[piv][col])) piv = r;
    if (std::fabs(A[piv][col]) < 1e-12) return std::nullopt;
    std::swap(A[piv], A[col]);
    std::swap(b[piv], b[col]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = A[r][col] / A[col][col];
      if (f == 0.0) continue;
      for (std::size_t c = col; c < n; ++c) A[r][c] -= f * A[col][c];
      b[r] -= f * b[col];
    }
  }
  for (std::size_t i = 0; i < n; ++i) b[i] /= A[i][i];
  return b;
}

struct SvmProblem {
  std::vector<std::vector<double>> x;  // augmented rows (bias column included)
  std::vector<int> y;
  double C = 1.0;
  bool squared = true;
};

inline double primal(const SvmProblem& p, const std::vector<double>& w) {
  double obj = 0;
  for (double v : w) obj += 0.5 * v * v;
  for (std::size_t i = 0; i < p.x.size(); ++i) {
    double s = 0;
    for (std::size_t k = 0; k < w.size(); ++k) s += w[k] * p.x[i][k];
    const double slack = std::max(0.0, 1.0 - p.y[i] * s);
    obj += p.C * (p.squared ? slack * slack : slack);
  }
  return obj;
}

// Exact primal minimizer by enumerating loss regimes. Each regime
// assignment yields a candidate from a linear system; the true optimum is
// the candidate of its own regime, every other candidate is merely a point,
// so the minimum primal value over all candidates is the optimum.
//   squared hinge: regimes {inactive, active}; candidate solves
//     (I + 2C sum_A x x^T) w = 2C sum_A y x
//   hinge: regimes {inactive, active, on-margin}; candidate minimizes
//     0.5|w|^2 - C sum_A y x.w subject to y x.w = 1 on the margin set.
inline std::vector<double> svm_optimum(const SvmProblem& p) {
  const std::size_t n = p.x.size();
  const std::size_t d = p.x.front().size();
  std::vector<double> best(d, 0.0);
  double best_obj = primal(p, best);
  const int base = p.squared ? 2 : 3;
  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i) total *= base;

  for (std::size_t code = 0; code < total; ++code) {
    std::vector<int> regime(n);
    std::size_t c = code;
    for (std::size_t i = 0; i < n; ++i) {
      regime[i] = static_cast<int>(c % base);
      c /= base;
    }
    std::optional<std::vector<double>> w;
    if (p.squared) {
      std::vector<std::vector<double>> A(d, std::vector<double>(d, 0.0));
      std::vector<double> b(d, 0.0);
      for (std::size_t k = 0; k < d; ++k) A[k][k] = 1.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (regime[i] != 1) continue;
        for (std::size_t r = 0; r < d; ++r) {
          b[r] += 2 * p.C * p.y[i] * p.x[i][r];
          for (std::size_t s = 0; s < d; ++s) A[r][s] += 2 * p.C * p.x[i][r] * p.x[i][s];
        }
      }
      w = solve(A, b);
    } else {
      std::vector<std::size_t> margin;
      for (std::size_t i = 0; i < n; ++i)
        if (regime[i] == 2) margin.push_back(i);
      if (margin.size() > d) continue;
      const std::size_t m = margin.size();
      std::vector<std::vector<double>> K(d + m, std::vector<double>(d + m, 0.0));
      std::vector<double> rhs(d + m, 0.0);
      for (std::size_t k = 0; k < d; ++k) K[k][k] = 1.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (regime[i] != 1) continue;
        for (std::size_t r = 0; r < d; ++r) rhs[r] += p.C * p.y[i] * p.x[i][r];
      }
      for (std::size_t j = 0; j < m; ++j) {
        const auto i = margin[j];
        for (std::size_t r = 0; r < d; ++r) {
          K[d + j][r] = p.y[i] * p.x[i][r];
          K[r][d + j] = p.y[i] * p.x[i][r];
        }
        rhs[d + j] = 1.0;
      }
      auto sol = solve(K, rhs);
      if (sol) w = std::vector<double>(sol->begin(), sol->begin() + static_cast<long>(d));
    }
    if (!w) continue;
    const double obj = primal(p, *w);
    if (obj < best_obj) {
      best_obj = obj;
      best = *w;
    }
  }
  return best;
}

// Minimizer of a 1-D convex function on [lo, hi] by a fine grid followed by
// golden-section refinement around the best grid point.
template <class F>
double minimize_1d(F f, double lo, double hi, int grid = 20001) {
  double best_x = lo;
  double best_f = f(lo);
  const double step = (hi - lo) / (grid - 1);
  for (int i = 1; i < grid; ++i) {
    const double x = lo + i * step;
    const double v = f(x);
    if (v < best_f) {
      best_f = v;
      best_x = x;
    }
  }
  double a = best_x - step, b = best_x + step;
  const double g = (std::sqrt(5.0) - 1) / 2;
  for (int it = 0; it < 200; ++it) {
    const double c = b - g * (b - a), d = a + g * (b - a);
    if (f(c) < f(d)) b = d;
    else a = c;
  }
  return 0.5 * (a + b);
}

// ---------------------------------------------------------------- voting

inline std::uint32_t vote(const std::vector<std::uint32_t>& preds, std::size_t L) {
  std::vector<int> counts(L, 0);
  for (auto p : preds) counts[p]++;
  int top = -1;
  for (int c : counts) top = std::max(top, c);
  for (std::size_t l = 0; l < L; ++l)
    if (counts[l] == top) return static_cast<std::uint32_t>(l);
  return 0;
}

// ---------------------------------------------------------------- metrics

struct Scores {
  std::vector<double> f1;
  double macro = 0, weighted = 0, accuracy = 0;
};

// F1 written as 2tp / (2tp + fp + fn), 0 when tp = 0.
inline Scores scores(const std::vector<std::vector<std::uint64_t>>& cm) {
  const std::size_t L = cm.size();
  Scores s;
  double total = 0, diag = 0;
  for (std::size_t g = 0; g < L; ++g)
    for (std::size_t p = 0; p < L; ++p) {
      total += cm[g][p];
      if (g == p) diag += cm[g][p];
    }
  for (std::size_t l = 0; l < L; ++l) {
    double tp = cm[l][l], fp = 0, fn = 0, support = 0;
    for (std::size_t k = 0; k < L; ++k) {
      if (k != l) {
        fp += cm[k][l];
        fn += cm[l][k];
      }
      support += cm[l][k];
    }
    const double f1 = tp > 0 ? 2 * tp / (2 * tp + fp + fn) : 0.0;
    s.f1.push_back(f1);
    s.macro += f1 / L;
    s.weighted += f1 * support / total;
  }
  s.accuracy = diag / total;
  return s;
}

}  // namespace oracle
