#include "noma/detection.hpp"

#include <cmath>
#include <limits>

#include "noma/types.hpp"

namespace noma {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

// Real/imag parts of symbol index m. BPSK lives on the real axis.
inline double symbol_re(Modulation mod, int m) {
  if (mod == Modulation::BPSK) return m == 0 ? 1.0 : -1.0;
  return ((m >> 1) == 0 ? kInvSqrt2 : -kInvSqrt2);
}

inline double symbol_im(Modulation mod, int m) {
  if (mod == Modulation::BPSK) return 0.0;
  return ((m & 1) == 0 ? kInvSqrt2 : -kInvSqrt2);
}

}  // namespace

JointHypothesisSet build_hypotheses(const std::vector<double>& amplitudes, Modulation mod) {
  require(!amplitudes.empty(), "joint detection needs at least one user");
  const int n = static_cast<int>(amplitudes.size());
  const int m_ary = mod == Modulation::BPSK ? 2 : 4;
  require(n <= 20, "joint hypothesis count exceeds enumeration limit");
  long long count = 1;
  for (int j = 0; j < n; ++j) {
    count *= m_ary;
    if (count > (1LL << 24)) throw ResourceLimitError("joint hypothesis count exceeds enumeration limit");
  }

  JointHypothesisSet hyp;
  hyp.modulation = mod;
  hyp.n_users = n;
  hyp.m_ary = m_ary;
  hyp.n_hyp = static_cast<int>(count);
  hyp.re.assign(hyp.n_hyp, 0.0);
  hyp.im.assign(hyp.n_hyp, 0.0);
  for (int h = 0; h < hyp.n_hyp; ++h) {
    double re = 0.0, im = 0.0;
    for (int j = 0; j < n; ++j) {
      const int m = hypothesis_symbol(hyp, h, j);
      re += amplitudes[static_cast<std::size_t>(j)] * symbol_re(mod, m);
      im += amplitudes[static_cast<std::size_t>(j)] * symbol_im(mod, m);
    }
    hyp.re[static_cast<std::size_t>(h)] = re;
    hyp.im[static_cast<std::size_t>(h)] = im;
  }
  return hyp;
}

int nearest_hypothesis(const JointHypothesisSet& hyp, double y_re, double y_im) {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (int h = 0; h < hyp.n_hyp; ++h) {
    const double dr = y_re - hyp.re[static_cast<std::size_t>(h)];
    const double di = y_im - hyp.im[static_cast<std::size_t>(h)];
    const double d = dr * dr + di * di;
    if (d < best_d) {
      best_d = d;
      best = h;
    }
  }
  return best;
}

int hypothesis_symbol(const JointHypothesisSet& hyp, int h, int user) {
  const int shift_users = hyp.n_users - 1 - user;
  int v = h;
  for (int j = 0; j < shift_users; ++j) v /= hyp.m_ary;
  return v % hyp.m_ary;
}

std::vector<int> joint_ml_detect(double y_re, double y_im,
                                 const std::vector<double>& amplitudes, Modulation mod) {
  const JointHypothesisSet hyp = build_hypotheses(amplitudes, mod);
  const int h = nearest_hypothesis(hyp, y_re, y_im);
  std::vector<int> symbols(amplitudes.size());
  for (int j = 0; j < hyp.n_users; ++j) symbols[static_cast<std::size_t>(j)] = hypothesis_symbol(hyp, h, j);
  return symbols;
}

}  // namespace noma
